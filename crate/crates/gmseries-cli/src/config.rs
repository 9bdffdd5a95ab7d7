//! Config layering: JSON file, then `--param key=value`, then explicit flags.

use std::path::Path;

use serde_json::{Map, Value};

use crate::error::{CliError, CliResult};

/// Parses `start:stop:step` into `start, ⌊start·step⌉, …` up to `stop`.
pub fn parse_grid(s: &str) -> CliResult<Vec<u64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || CliError::config(format!("grid `{s}` is not start:stop:step"));
    let (start, stop, step) = match parts.as_slice() {
        [a, b] => (a, b, "2"),
        [a, b, c] => (a, b, *c),
        _ => return Err(bad()),
    };
    let start: u64 = start.trim().parse().map_err(|_| bad())?;
    let stop: u64 = stop.trim().parse().map_err(|_| bad())?;
    let step: f64 = step.trim().parse().map_err(|_| bad())?;
    if start == 0 || stop < start {
        return Err(CliError::config(format!("grid `{s}` needs 1 ≤ start ≤ stop")));
    }
    if !(step > 1.0 && step.is_finite()) {
        return Err(CliError::config(format!("grid `{s}` needs a geometric step > 1")));
    }
    let mut grid = vec![start];
    let mut x = start as f64;
    loop {
        x *= step;
        let n = x.round() as u64;
        if n > stop {
            break;
        }
        if n > *grid.last().unwrap() {
            grid.push(n);
        }
    }
    Ok(grid)
}

/// A literal that is either inline JSON or the path of a JSON file.
pub fn json_or_path(arg: &str) -> CliResult<Value> {
    let t = arg.trim_start();
    if t.starts_with('{') || t.starts_with('[') {
        return Ok(serde_json::from_str(arg)?);
    }
    let path = Path::new(arg);
    if path.exists() {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        return Ok(serde_json::from_str(&text)?);
    }
    Err(CliError::config(format!("`{arg}` is neither inline JSON nor an existing file")))
}

/// Like [`json_or_path`], but a bare word is taken as a generator name.
pub fn generator_arg(arg: &str) -> CliResult<Value> {
    let bare = !arg.is_empty() && arg.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
    if bare && !Path::new(arg).exists() {
        return Ok(serde_json::json!({ "name": arg }));
    }
    json_or_path(arg)
}

/// The value of a `--param`: JSON when it parses, a string otherwise.
fn param_value(v: &str) -> Value {
    serde_json::from_str(v).unwrap_or_else(|_| Value::String(v.to_string()))
}

/// Applies `key=value` overrides. Dotted keys descend into nested objects.
pub fn apply_params(target: &mut Map<String, Value>, params: &[String]) -> CliResult<()> {
    for p in params {
        let (key, value) = p.split_once('=').ok_or_else(|| CliError::config(format!("--param `{p}` is not key=value")))?;
        let path: Vec<&str> = key.split('.').collect();
        if path.iter().any(|k| k.is_empty()) {
            return Err(CliError::config(format!("--param `{p}` has an empty key")));
        }
        let mut obj = &mut *target;
        for k in &path[..path.len() - 1] {
            let slot = obj.entry(k.to_string()).or_insert_with(|| Value::Object(Map::new()));
            obj = slot.as_object_mut().ok_or_else(|| CliError::config(format!("--param `{p}`: `{k}` is not an object")))?;
        }
        obj.insert(path[path.len() - 1].to_string(), param_value(value));
    }
    Ok(())
}

/// Reads a config file into a JSON object, or starts an empty one.
pub fn load(path: Option<&Path>) -> CliResult<Map<String, Value>> {
    let Some(path) = path else { return Ok(Map::new()) };
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    match serde_json::from_str(&text)? {
        Value::Object(m) => Ok(m),
        _ => Err(CliError::config(format!("{}: config must be a JSON object", path.display()))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(parse_grid("16:4096:2").unwrap(), vec![16, 32, 64, 128, 256, 512, 1024, 2048, 4096]);
        assert_eq!(parse_grid("10:1000:10").unwrap(), vec![10, 100, 1000]);
        assert_eq!(parse_grid("1:5:1.5").unwrap(), vec![1, 2, 3, 5]);
        assert_eq!(parse_grid("8:8").unwrap(), vec![8]);
        for bad in ["64:16:2", "0:8:2", "1:8:1", "a:b:c", "1:2:3:4"] {
            assert!(parse_grid(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn params_override_and_nest() {
        let mut m = Map::new();
        m.insert("n".into(), Value::from(3));
        apply_params(&mut m, &["n=50".into(), "kind=cos".into(), "policy.slope=0.3".into(), "grid=[1,2]".into()]).unwrap();
        assert_eq!(Value::Object(m), serde_json::json!({"n": 50, "kind": "cos", "policy": {"slope": 0.3}, "grid": [1, 2]}));
        assert!(apply_params(&mut Map::new(), &["novalue".into()]).is_err());
    }

    #[test]
    fn generator_words() {
        assert_eq!(generator_arg("harmonic").unwrap(), serde_json::json!({"name": "harmonic"}));
        assert_eq!(generator_arg(r#"{"name":"power","params":{"p":2}}"#).unwrap()["params"]["p"], 2);
        assert!(generator_arg("no/such/file.json").is_err());
    }
}
