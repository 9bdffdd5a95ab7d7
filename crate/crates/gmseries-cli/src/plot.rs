//! Re-emits a report as plot-ready CSV columns.

use gmseries::experiments::StudyReport;
use serde_json::Value;

use crate::error::{CliError, CliResult};

fn number(v: &Value) -> Option<f64> {
    match v {
        Value::Number(x) => x.as_f64(),
        Value::Null => Some(f64::NAN),
        Value::String(s) => s.parse().ok(),
        _ => None,
    }
}

fn columns(x: &str, y: &str, rows: impl IntoIterator<Item = (f64, f64)>) -> String {
    let mut out = format!("{x},{y}\n");
    for (a, b) in rows {
        out.push_str(&format!("{a},{b}\n"));
    }
    out
}

/// CSV for a report: `n,<y>` for norm lists and grid reports, the study
/// tables for study reports.
pub fn plot_csv(report: &Value, y: Option<&str>, table: Option<&str>) -> CliResult<String> {
    if report.get("study").is_some() {
        let study: StudyReport = serde_json::from_value(report.clone())?;
        let tables = study.tables();
        let t = match table {
            Some(name) => tables.iter().find(|t| t.name == name),
            None => tables.first(),
        };
        let names: Vec<&str> = tables.iter().map(|t| t.name.as_str()).collect();
        return t.map(|t| t.to_csv()).ok_or_else(|| CliError::config(format!("no table {table:?}; available: {names:?}")));
    }
    if let Value::Array(items) = report {
        let field = y.unwrap_or("value");
        let rows = items
            .iter()
            .map(|it| {
                let n = it.pointer("/params/n").and_then(number);
                let v = it.get(field).and_then(number);
                n.zip(v).ok_or_else(|| CliError::config(format!("array entries need params.n and a numeric `{field}`")))
            })
            .collect::<CliResult<Vec<_>>>()?;
        return Ok(columns("n", field, rows));
    }
    if let Some(Value::Array(grid)) = report.get("grid") {
        let field = y.unwrap_or(if report.get("ratios").is_some() { "ratios" } else { "values" });
        let Some(Value::Array(ys)) = report.get(field) else {
            return Err(CliError::config(format!("report has no array `{field}`")));
        };
        if ys.len() != grid.len() {
            return Err(CliError::config(format!("`{field}` has {} entries for a grid of {}", ys.len(), grid.len())));
        }
        let rows = grid
            .iter()
            .zip(ys)
            .map(|(n, v)| number(n).zip(number(v)).ok_or_else(|| CliError::config(format!("`{field}` is not numeric"))))
            .collect::<CliResult<Vec<_>>>()?;
        return Ok(columns("n", field, rows));
    }
    if let (Some(n), Some(v)) = (report.pointer("/params/n").and_then(number), report.get(y.unwrap_or("value")).and_then(number)) {
        return Ok(columns("n", y.unwrap_or("value"), [(n, v)]));
    }
    Err(CliError::config("report has no plottable columns"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn norm_lists_and_grids() {
        let norms = json!([
            {"params": {"n": 16, "abs_tol": 1e-6}, "value": 0.5},
            {"params": {"n": 32, "abs_tol": 1e-6}, "value": 0.25}
        ]);
        assert_eq!(plot_csv(&norms, None, None).unwrap(), "n,value\n16,0.5\n32,0.25\n");
        let scan = json!({"grid": [1, 2], "ratios": [0.5, "inf"], "values": [3, 4]});
        assert_eq!(plot_csv(&scan, None, None).unwrap(), "n,ratios\n1,0.5\n2,inf\n");
        assert_eq!(plot_csv(&scan, Some("values"), None).unwrap(), "n,values\n1,3\n2,4\n");
        assert!(plot_csv(&json!({"x": 1}), None, None).is_err());
    }
}
