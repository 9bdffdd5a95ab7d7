use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn gmseries(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gmseries")).args(args).env_remove("GMSERIES_LOG").output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn assert_error_line(o: &Output, expected: i32) {
    assert_eq!(code(o), expected, "{}", stderr(o));
    let err = stderr(o);
    let line = err.lines().last().unwrap();
    assert!(line.starts_with(&format!("gmseries: error code={expected} kind=")), "{line}");
    assert!(line.contains(": "), "{line}");
}

fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn files(dir: &Path) -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    v.sort();
    v
}

#[test]
fn classify_harmonic_as_gm_b1_is_consistent() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("h.json");
    let o = gmseries(&[
        "classify",
        "--generator",
        r#"{"name":"harmonic","params":{}}"#,
        "--class",
        "GM",
        "--beta",
        r#"{"variant":"b1"}"#,
        "--r",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rep = read_json(&out);
    assert_eq!(rep["verdict"], "consistent-with-membership");
    assert_eq!(rep["grid"][0], 16);
}

#[test]
fn classify_remark6_as_gm_b6_2_is_inconsistent() {
    let o = gmseries(&[
        "classify",
        "--generator",
        r#"{"name":"remark6","params":{"r":3}}"#,
        "--class",
        "GM",
        "--beta",
        r#"{"variant":"b6","c":2}"#,
        "--r",
        "2",
        "--format",
        "csv",
    ]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    let csv = String::from_utf8(o.stdout).unwrap();
    assert!(csv.starts_with("n,variation,majorant,ratio\n16,"));
}

#[test]
fn classify_config_errors() {
    assert_error_line(&gmseries(&["classify", "--generator", r#"{"params":{}}"#, "--class", "GM"]), 2);
    assert_error_line(&gmseries(&["classify", "--generator", "no_such_generator", "--class", "GM"]), 2);
    assert_error_line(&gmseries(&["classify", "--generator", "harmonic"]), 2);
    assert_error_line(&gmseries(&["classify", "--generator", "harmonic", "--class", "XYZ"]), 2);
    assert_error_line(&gmseries(&["frobnicate"]), 2);
}

#[test]
fn short_grid_is_inconclusive() {
    let o = gmseries(&["classify", "--generator", "harmonic", "--class", "GM", "--grid", "16:16"]);
    assert_eq!(code(&o), 4, "{}", stderr(&o));
}

#[test]
fn norm_of_sin_3x_is_two_over_pi() {
    let o = gmseries(&["norm", "--generator", r#"{"name":"explicit","params":{"values":[0,0,1]}}"#, "--kind", "sin", "--n", "3"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rep: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let v = rep["value"].as_f64().unwrap();
    assert!((v - 2.0 / std::f64::consts::PI).abs() < 1e-8, "{v}");
    assert_eq!(rep["functional"], "partial_sum");
}

#[test]
fn vn_sn_gap_of_a_constant_term_series_is_zero() {
    let o = gmseries(&["norm", "--generator", r#"{"name":"zero","params":{"a0":3}}"#, "--functional", "vn_sn_gap", "--n", "7"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rep: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(rep["value"].as_f64().unwrap(), 0.0);
}

#[test]
fn norm_errors() {
    assert_error_line(&gmseries(&["norm", "--generator", "harmonic", "--n", "4", "--tol", "0"]), 2);
    assert_error_line(&gmseries(&["norm", "--generator", "harmonic"]), 2);
    assert_error_line(&gmseries(&["norm", "--generator", "harmonic", "--n", "4", "--functional", "nope"]), 2);
    let mut cfg = tempfile::NamedTempFile::new().unwrap();
    std::io::Write::write_all(&mut cfg, br#"{"generator":{"name":"harmonic"},"n":300,"kind":"sin"}"#).unwrap();
    let o = gmseries(&["norm", "--config", cfg.path().to_str().unwrap(), "--n", "4", "--param", "functional=cauchy_gap", "--param", "m=3"]);
    assert_error_line(&o, 2);
    let o = gmseries(&["norm", "--generator", "constant", "--functional", "sn_f_gap", "--n", "16", "--horizon", "4096"]);
    assert_error_line(&o, 5);
}

#[test]
fn norm_grid_and_plotdata() {
    let dir = tempfile::tempdir().unwrap();
    let one = dir.path().join("one.json");
    let four = dir.path().join("four.json");
    for (jobs, out) in [("1", &one), ("4", &four)] {
        let o = gmseries(&["norm", "--generator", "harmonic", "--grid", "16:256:2", "--jobs", jobs, "--out", out.to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
    }
    assert_eq!(fs::read(&one).unwrap(), fs::read(&four).unwrap());
    let o = gmseries(&["plotdata", one.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let csv = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "n,value");
    assert_eq!(lines.len(), 6);
    assert!(lines[1..].iter().all(|l| l.split(',').count() == 2));
    assert!(lines[1].starts_with("16,"));
}

#[test]
fn study_remark6_writes_three_sub_reports_deterministically() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let o = gmseries(&["study", "remark6", "--out", dir.path().to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
    }
    let (fa, fb) = (files(a.path()), files(b.path()));
    assert_eq!(fa.len(), 5);
    for suffix in ["-rbvs.json", "-beta_series.json", "-gm.json", "-remark6.csv"] {
        assert_eq!(fa.iter().filter(|p| p.to_str().unwrap().ends_with(suffix)).count(), 1, "{suffix}");
    }
    for (x, y) in fa.iter().zip(&fb) {
        assert_eq!(fs::read(x).unwrap(), fs::read(y).unwrap(), "{}", x.display());
    }
    let main = fa.iter().find(|p| p.file_name().unwrap().to_str().unwrap().matches('-').count() == 1);
    let rep = read_json(main.unwrap());
    assert_eq!(rep["study"], "remark6");
    assert_eq!(rep["report"]["r"], 3);
}

#[test]
fn study_config_file_with_param_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("spec.json");
    fs::write(&cfg, r#"{"study":"remark5_sin","params":{"n":20,"m":200,"growth_m":[200,2000,20000],"tol":1e-8}}"#).unwrap();
    let out = dir.path().join("out");
    let o = gmseries(&["study", "--config", cfg.to_str().unwrap(), "--param", "n=10", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let main = files(&out).into_iter().find(|p| p.extension().unwrap() == "json").unwrap();
    let rep = read_json(&main);
    assert_eq!(rep["report"]["n"], 10);
    assert_eq!(rep["report"]["kind"], "sin");
}

#[test]
fn study_errors() {
    assert_error_line(&gmseries(&["study", "remark6", "--param", "grid=[64,16]"]), 2);
    assert_error_line(&gmseries(&["study", "remark6", "--grid", "64:16:2"]), 2);
    assert_error_line(&gmseries(&["study", "no_such_study"]), 2);
    assert_error_line(&gmseries(&["study"]), 2);
    assert_error_line(&gmseries(&["study", "remark6", "--param", "unknown=1"]), 2);
    assert_error_line(&gmseries(&["plotdata", "/nonexistent/report.json"]), 2);
}
