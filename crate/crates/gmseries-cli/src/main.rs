//! `gmseries`: classify coefficient sequences, measure L¹ norms of partial
//! sums, run the reproduction studies and emit plot data.
//!
//! Exit codes: 0 success or consistent, 2 config error, 3 inconsistent or a
//! failed study check, 4 inconclusive, 5 numeric failure.

mod config;
mod error;
mod exec;
mod plot;

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gmseries::beta::BetaSpec;
use gmseries::classes::{membership_scan, ClassSpec, Verdict};
use gmseries::experiments::{default_grid, run_study, GridExecutor, StudyReport, StudySpec, DEFAULT_SCAN_HORIZON};
use gmseries::fit::TrendPolicy;
use gmseries::lnorm::{cauchy_gap, partial_sum_norm, sn_f_gap, vn_sn_gap, NormReport, QuadratureSpec, DEFAULT_TAIL_HORIZON, DEFAULT_TOL};
use gmseries::sequences::{CoefficientSequence, GeneratorDescriptor, SeriesKind};
use serde::Deserialize;
use serde_json::{Map, Value};

use crate::config::{apply_params, generator_arg, json_or_path, load, parse_grid};
use crate::error::{CliError, CliResult};
use crate::exec::RayonExecutor;

#[derive(Parser, Debug)]
#[command(name = "gmseries", version, about = "L1 convergence diagnostics for trigonometric series")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct Common {
    /// JSON config file; `--param` and the flags below override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Generator descriptor as inline JSON, a file path, or a bare name.
    #[arg(long, global = true)]
    generator: Option<String>,
    /// Class id (M, QM, RBVS, GM, GBVS, NBVS, MVBV) or a class JSON object.
    #[arg(long, global = true)]
    class: Option<String>,
    /// Beta functional as JSON, e.g. '{"variant":"b5","c":2}'.
    #[arg(long, global = true)]
    beta: Option<String>,
    #[arg(long, global = true)]
    r: Option<u64>,
    /// start:stop:geometric-step
    #[arg(long, global = true)]
    grid: Option<String>,
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true)]
    horizon: Option<u64>,
    /// Worker threads; defaults to the available cores.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Output file, or output directory for `study`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// key=value override; the value is parsed as JSON when possible.
    #[arg(long = "param", global = true)]
    params: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Scan a sequence against a class over the grid.
    Classify,
    /// Compute an L1 norm at `n` or over the grid.
    Norm {
        /// partial_sum, cauchy_gap, vn_sn_gap or sn_f_gap
        #[arg(long)]
        functional: Option<String>,
        /// cos, sin or exp
        #[arg(long)]
        kind: Option<String>,
        #[arg(long)]
        n: Option<u64>,
        #[arg(long)]
        m: Option<u64>,
    },
    /// Run a study and write its reports.
    Study {
        /// remark5_cos, remark5_sin, remark6, criterion_iff, theorem3_suite,
        /// theorem4_suite or embedding_suite
        study: Option<String>,
    },
    /// Re-emit a report as x,y CSV columns.
    Plotdata {
        report: PathBuf,
        /// Column to use as y.
        #[arg(long)]
        y: Option<String>,
        /// Table of a study report.
        #[arg(long)]
        table: Option<String>,
    },
}

#[derive(Deserialize, Debug, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
enum Functional {
    PartialSum,
    CauchyGap,
    VnSnGap,
    SnFGap,
}

/// Settings of `classify` and `norm` after layering.
#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
struct RunConfig {
    generator: Option<GeneratorDescriptor>,
    class: Option<Value>,
    beta: Option<BetaSpec>,
    r: Option<u64>,
    grid: Option<Vec<u64>>,
    tol: Option<f64>,
    horizon: Option<u64>,
    kind: Option<SeriesKind>,
    functional: Option<Functional>,
    n: Option<u64>,
    m: Option<u64>,
    policy: Option<TrendPolicy>,
}

impl RunConfig {
    fn sequence(&self) -> CliResult<CoefficientSequence> {
        let d = self.generator.as_ref().ok_or_else(|| CliError::config("no generator given (use --generator)"))?;
        Ok(CoefficientSequence::from_descriptor(d)?)
    }

    fn class(&self) -> CliResult<ClassSpec> {
        let class = self.class.clone().ok_or_else(|| CliError::config("no class given (use --class)"))?;
        let mut obj = match class {
            Value::String(id) => {
                let mut m = Map::new();
                m.insert("class".into(), Value::String(id));
                m
            }
            Value::Object(m) => m,
            other => return Err(CliError::config(format!("class must be an id or an object, got {other}"))),
        };
        if let Some(beta) = &self.beta {
            let id = obj.get("class").and_then(Value::as_str).unwrap_or_default();
            let lifted = match id {
                "GM" => Some("GM(beta,r)"),
                "RBVS" => Some("RBVS(beta,r)"),
                _ => None,
            };
            if let Some(l) = lifted {
                obj.insert("class".into(), Value::String(l.into()));
            }
            obj.entry("beta").or_insert(serde_json::to_value(beta)?);
        }
        if let Some(r) = self.r {
            if obj.contains_key("beta") {
                obj.entry("r").or_insert(Value::from(r));
            }
        }
        Ok(serde_json::from_value(Value::Object(obj))?)
    }
}

fn set(map: &mut Map<String, Value>, key: &str, v: Option<Value>) {
    if let Some(v) = v {
        map.insert(key.into(), v);
    }
}

fn grid_value(c: &Common) -> CliResult<Option<Value>> {
    c.grid.as_deref().map(parse_grid).transpose().map(|g| g.map(Value::from))
}

/// Flags shared by `classify`, `norm` and `study`, as JSON values.
fn common_values(c: &Common) -> CliResult<Vec<(&'static str, Option<Value>)>> {
    Ok(vec![
        ("grid", grid_value(c)?),
        ("beta", c.beta.as_deref().map(json_or_path).transpose()?),
        ("r", c.r.map(Value::from)),
        ("tol", c.tol.map(Value::from)),
        ("horizon", c.horizon.map(Value::from)),
    ])
}

fn run_config(c: &Common, extra: Vec<(&'static str, Option<Value>)>) -> CliResult<RunConfig> {
    let mut map = load(c.config.as_deref())?;
    apply_params(&mut map, &c.params)?;
    for (k, v) in common_values(c)?.into_iter().chain(extra) {
        set(&mut map, k, v);
    }
    set(&mut map, "generator", c.generator.as_deref().map(generator_arg).transpose()?);
    set(&mut map, "class", c.class.as_deref().map(class_value).transpose()?);
    Ok(serde_json::from_value(Value::Object(map))?)
}

fn class_value(s: &str) -> CliResult<Value> {
    if s.trim_start().starts_with('{') {
        json_or_path(s)
    } else {
        Ok(Value::String(s.to_string()))
    }
}

fn executor(c: &Common) -> CliResult<RayonExecutor> {
    RayonExecutor::new(c.jobs.unwrap_or(0))
}

/// Writes to the file, or to stdout without `--out`.
fn emit(out: Option<&Path>, body: &str) -> CliResult<()> {
    match out {
        Some(path) => std::fs::write(path, body).map_err(|e| CliError::io(path, e)),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(body.as_bytes()).map_err(|e| CliError::io("<stdout>", e))
        }
    }
}

fn pretty<T: serde::Serialize>(v: &T) -> CliResult<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

fn classify(c: &Common) -> CliResult<i32> {
    let cfg = run_config(c, Vec::new())?;
    let seq = cfg.sequence()?;
    let class = cfg.class()?;
    let grid = cfg.grid.clone().unwrap_or_else(default_grid);
    let horizon = cfg.horizon.unwrap_or(DEFAULT_SCAN_HORIZON);
    log::info!("classify {} as {} over {} grid points", seq.name(), class.label(), grid.len());
    let rep = membership_scan(&seq, &class, &grid, horizon, &cfg.policy.unwrap_or_default())?;
    let body = match c.format {
        Format::Json => pretty(&rep)?,
        Format::Csv => {
            let mut s = String::from("n,variation,majorant,ratio\n");
            for i in 0..rep.grid.len() {
                s.push_str(&format!("{},{},{},{}\n", rep.grid[i], rep.variations[i], rep.majorants[i], rep.ratios[i]));
            }
            s
        }
    };
    emit(c.out.as_deref(), &body)?;
    eprintln!("{}: {:?} (sup ratio {})", rep.class, rep.verdict, rep.sup_ratio);
    Ok(match rep.verdict {
        Verdict::Consistent => 0,
        Verdict::Inconsistent => 3,
        Verdict::Inconclusive => 4,
    })
}

fn norm(c: &Common, functional: Option<String>, kind: Option<String>, n: Option<u64>, m: Option<u64>) -> CliResult<i32> {
    let extra = vec![
        ("functional", functional.map(Value::String)),
        ("kind", kind.map(Value::String)),
        ("n", n.map(Value::from)),
        ("m", m.map(Value::from)),
    ];
    let cfg = run_config(c, extra)?;
    let seq = cfg.sequence()?;
    let kind = cfg.kind.unwrap_or(SeriesKind::Cosine);
    let functional = cfg.functional.unwrap_or(Functional::PartialSum);
    let spec = QuadratureSpec::new(cfg.tol.unwrap_or(DEFAULT_TOL));
    spec.validate()?;
    let horizon = cfg.horizon.unwrap_or(DEFAULT_TAIL_HORIZON);
    let r = cfg.r.unwrap_or(1);
    let one = |n: u64| -> gmseries::Result<NormReport> {
        match functional {
            Functional::PartialSum => partial_sum_norm(&seq, kind, n, &spec),
            Functional::CauchyGap => cauchy_gap(&seq, kind, n, cfg.m.unwrap_or_else(|| (2 * n).saturating_sub(1)), &spec),
            Functional::VnSnGap => vn_sn_gap(&seq, kind, n, &spec),
            Functional::SnFGap => sn_f_gap(&seq, kind, n, r, &spec, horizon),
        }
    };
    let reports: Vec<NormReport> = match (cfg.n, &cfg.grid) {
        (Some(n), _) => vec![one(n)?],
        (None, Some(grid)) => {
            if grid.is_empty() || grid[0] == 0 || grid.windows(2).any(|w| w[1] <= w[0]) {
                return Err(gmseries::Error::InvalidGrid.into());
            }
            executor(c)?.map(grid, one).into_iter().collect::<gmseries::Result<_>>()?
        }
        (None, None) => return Err(CliError::config("norm needs --n or --grid")),
    };
    let body = match c.format {
        Format::Json if cfg.n.is_some() => pretty(&reports[0])?,
        Format::Json => pretty(&reports)?,
        Format::Csv => {
            let mut s = String::from("n,value,error_estimate\n");
            for rep in &reports {
                s.push_str(&format!("{},{},{}\n", rep.params.n.unwrap_or(0), rep.value, rep.error_estimate));
            }
            s
        }
    };
    emit(c.out.as_deref(), &body)?;
    Ok(0)
}

fn safe_name(s: &str) -> String {
    s.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' }).collect()
}

fn study(c: &Common, id: Option<String>) -> CliResult<i32> {
    let mut map = load(c.config.as_deref())?;
    if let Some(id) = id {
        map.insert("study".into(), Value::String(id));
    }
    let params = map.entry("params").or_insert_with(|| Value::Object(Map::new()));
    let params = params.as_object_mut().ok_or_else(|| CliError::config("`params` must be an object"))?;
    apply_params(params, &c.params)?;
    for (k, v) in common_values(c)? {
        set(params, k, v);
    }
    if let Some(g) = &c.generator {
        params.insert("generators".into(), Value::Array(vec![generator_arg(g)?]));
    }
    if !map.contains_key("study") {
        return Err(CliError::config("no study given"));
    }
    let spec: StudySpec = serde_json::from_value(Value::Object(map))?;
    spec.validate()?;
    let dir = c.out.clone().or_else(|| spec.output.clone().map(PathBuf::from)).unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;

    log::info!("running study {}", spec.study.as_str());
    let report = run_study(&spec, &executor(c)?)?;

    let stem = format!("{}-{}", spec.study.as_str(), chrono::Local::now().format("%Y%m%dT%H%M%S%3f"));
    let mut files: Vec<(PathBuf, String)> = vec![(dir.join(format!("{stem}.json")), pretty(&report)?)];
    if let StudyReport::Remark6(r) = &report {
        files.push((dir.join(format!("{stem}-rbvs.json")), pretty(&r.rbvs)?));
        files.push((dir.join(format!("{stem}-beta_series.json")), pretty(&r.beta_series)?));
        files.push((dir.join(format!("{stem}-gm.json")), pretty(&r.gm)?));
    }
    for t in report.tables() {
        files.push((dir.join(format!("{stem}-{}.csv", safe_name(&t.name))), t.to_csv()));
    }
    for (path, body) in &files {
        std::fs::write(path, body).map_err(|e| CliError::io(path, e))?;
        println!("{}", path.display());
    }
    for check in report.checks() {
        eprintln!("{} {}: {}", if check.passed { "PASS" } else { "FAIL" }, check.name, check.detail);
    }
    Ok(if report.passed() { 0 } else { 3 })
}

fn plotdata(c: &Common, report: &Path, y: Option<&str>, table: Option<&str>) -> CliResult<i32> {
    let text = std::fs::read_to_string(report).map_err(|e| CliError::io(report, e))?;
    let value: Value = serde_json::from_str(&text)?;
    emit(c.out.as_deref(), &plot::plot_csv(&value, y, table)?)?;
    Ok(0)
}

fn run(cli: Cli) -> CliResult<i32> {
    let c = &cli.common;
    match cli.command {
        Command::Classify => classify(c),
        Command::Norm { functional, kind, n, m } => norm(c, functional, kind, n, m),
        Command::Study { study: id } => study(c, id),
        Command::Plotdata { report, y, table } => plotdata(c, &report, y.as_deref(), table.as_deref()),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("GMSERIES_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("invalid arguments").trim_start_matches("error: ");
            eprintln!("{}", CliError::config(first).line());
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("{}", e.line());
            ExitCode::from(e.code() as u8)
        }
    }
}
