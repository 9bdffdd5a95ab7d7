//! Scripted reproductions of the counterexamples and theorems as named,
//! parameterised studies.
//!
//! Every study is deterministic given its [`StudySpec`]. Each pass/fail line
//! ([`Check`]) carries the numbers it was judged on.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::beta::{beta_series_tail, BetaSpec, DEFAULT_B6_HORIZON};
use crate::classes::{
    block_variation, coefficient_criterion, membership_scan, rbvs_in_gm, remark1_chain, remark2_chain,
    theorem3_hypothesis, validate_grid, ChainReport, ClassSpec, GridReport, MembershipReport, Verdict,
};
use crate::error::{invalid, Result};
use crate::fit::{float_serde, TailSum, Trend, TrendPolicy};
use crate::lnorm::{
    cauchy_gap, sn_f_gap, theorem4_bound, vn_sn_gap, NormReport, QuadratureSpec, DEFAULT_TAIL_HORIZON, DEFAULT_TOL,
};
use crate::math::{ln, sin, Neumaier, PI};
use crate::sequences::{CoefficientSequence, GeneratorDescriptor, GeneratorParams, SeriesKind};

/// Horizon of the membership scans and tail fits in the studies.
pub const DEFAULT_SCAN_HORIZON: u64 = 1 << 18;
/// Horizon of `f` in the criterion study; slowly decaying coefficients need a long one.
pub const CRITERION_HORIZON: u64 = 1 << 24;

/// Powers of two from `2^a` to `2^b`.
pub fn pow2_grid(a: u32, b: u32) -> Vec<u64> {
    (a..=b).map(|k| 1u64 << k).collect()
}

/// The default grid `16, 32, …, 4096`.
pub fn default_grid() -> Vec<u64> {
    pow2_grid(4, 12)
}

/// Runs a computation over grid points. Implementations may evaluate points
/// concurrently but must return results in grid order.
pub trait GridExecutor {
    fn map<T, F>(&self, grid: &[u64], f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Send + Sync;
}

/// Evaluates grid points one after another.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl GridExecutor for Sequential {
    fn map<T, F>(&self, grid: &[u64], f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Send + Sync,
    {
        grid.iter().map(|&n| f(n)).collect()
    }
}

/// A pass/fail line with the numbers behind it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    #[serde(with = "float_serde::vec")]
    pub values: Vec<f64>,
    pub detail: String,
}

impl Check {
    fn new(name: &str, passed: bool, values: Vec<f64>, detail: String) -> Self {
        Check { name: name.into(), passed, values, detail }
    }
}

/// A numeric table for CSV output.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    fn new(name: &str, columns: &[&str]) -> Self {
        Table { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            for (i, v) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{v}");
            }
            out.push('\n');
        }
        out
    }
}

fn norm_spec(tol: f64) -> QuadratureSpec {
    QuadratureSpec::new(tol)
}

fn collect<T>(results: Vec<Result<T>>) -> Result<Vec<T>> {
    results.into_iter().collect()
}

// ---------------------------------------------------------------- Remark 5

/// One row of the growth table of the Remark 5 lower-bound sum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthRow {
    pub m: u64,
    pub lower_bound: f64,
    pub increment: Option<f64>,
    pub predicted: Option<f64>,
    pub relative_deviation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Remark5Report {
    pub kind: SeriesKind,
    pub n: u64,
    pub m: u64,
    pub lower_bound: f64,
    pub gap: NormReport,
    pub growth: Vec<GrowthRow>,
    pub checks: Vec<Check>,
}

fn remark5_shape(kind: SeriesKind) -> Result<(u64, f64)> {
    match kind {
        SeriesKind::Cosine => Ok((3, sin(2.0 * PI / 3.0) / PI)),
        SeriesKind::Sine => Ok((2, 2.0 / PI)),
        SeriesKind::Exponential => Err(invalid("kind", "remark 5 concerns cosine or sine series")),
    }
}

fn lll(x: f64) -> f64 {
    ln(ln(ln(x)))
}

/// The explicit lower bound `C Σ_{k=n}^{M} 1/((sk+1) ln(sk+1) ln ln(sk+1))`
/// with `(s, C) = (3, sin(2π/3)/π)` for cosine and `(2, 2/π)` for sine.
pub fn remark5_lower_bound(kind: SeriesKind, n: u64, m: u64) -> Result<f64> {
    let (s, c) = remark5_shape(kind)?;
    if n < 2 || m < n {
        return Err(invalid("n, M", "need M ≥ n ≥ 2"));
    }
    let mut acc = Neumaier::new();
    for k in n..=m {
        let x = (s * k + 1) as f64;
        acc.add(1.0 / (x * ln(x) * ln(ln(x))));
    }
    Ok(c * acc.value())
}

/// Lower-bound sums at each `M` with increments against `(C/s) Δ ln ln ln(sM)`.
pub fn remark5_growth(kind: SeriesKind, n: u64, ms: &[u64]) -> Result<Vec<GrowthRow>> {
    let (s, c) = remark5_shape(kind)?;
    let mut rows: Vec<GrowthRow> = Vec::with_capacity(ms.len());
    for &m in ms {
        let lb = remark5_lower_bound(kind, n, m)?;
        let row = match rows.last() {
            Some(prev) => {
                let inc = lb - prev.lower_bound;
                let pred = c / s as f64 * (lll((s * m) as f64) - lll((s * prev.m) as f64));
                GrowthRow { m, lower_bound: lb, increment: Some(inc), predicted: Some(pred), relative_deviation: Some((inc - pred).abs() / pred) }
            }
            None => GrowthRow { m, lower_bound: lb, increment: None, predicted: None, relative_deviation: None },
        };
        rows.push(row);
    }
    Ok(rows)
}

/// Remark 5: the Cauchy gap `‖S_{3M+2} − S_{3n−1}‖` (cosine) or
/// `‖S_{2M+1} − S_{2n−1}‖` (sine) against the explicit lower-bound sum.
pub fn run_remark5(kind: SeriesKind, n: u64, m: u64, growth_ms: &[u64], spec: &QuadratureSpec) -> Result<Remark5Report> {
    let (s, _) = remark5_shape(kind)?;
    let lower_bound = remark5_lower_bound(kind, n, m)?;
    let seq = match kind {
        SeriesKind::Cosine => CoefficientSequence::remark5_cos(),
        _ => CoefficientSequence::remark5_sin(),
    };
    let gap = cauchy_gap(&seq, kind, s * n, s * m + s - 1, spec)?;
    let mut checks = vec![Check::new(
        "gap >= lower bound - tol",
        gap.value >= lower_bound - spec.abs_tol,
        vec![gap.value, lower_bound, spec.abs_tol],
        format!("||S_{} - S_{}|| against the explicit sum over k = {n}..{m}", s * m + s - 1, s * n - 1),
    )];
    let growth = if growth_ms.is_empty() { Vec::new() } else { remark5_growth(kind, n, growth_ms)? };
    if growth.len() > 1 {
        let incs: Vec<f64> = growth.iter().filter_map(|r| r.increment).collect();
        let devs: Vec<f64> = growth.iter().filter_map(|r| r.relative_deviation).collect();
        checks.push(Check::new(
            "lower bound strictly increasing in M",
            incs.iter().all(|d| *d > 0.0),
            incs,
            "increments between consecutive M".into(),
        ));
        checks.push(Check::new(
            "increments within 15% of the ln ln ln prediction",
            devs.iter().all(|d| *d <= 0.15),
            devs,
            "relative deviation from the integral comparison".into(),
        ));
    }
    Ok(Remark5Report { kind, n, m, lower_bound, gap, growth, checks })
}

// ---------------------------------------------------------------- Remark 6

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundRow {
    pub n: u64,
    pub block_variation: f64,
    pub bound: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Remark6Report {
    pub r: u64,
    pub grid: Vec<u64>,
    /// Sub-report 1: the RBVS(β,r) scan.
    pub rbvs: MembershipReport,
    /// Running fitted constant over the top decade of the grid.
    pub rbvs_top_decade_c: Vec<f64>,
    /// Sub-report 2: `Σ β_k/k`.
    pub beta_series: TailSum,
    /// Sub-report 3: the GM(₆β,2) scan.
    pub gm: MembershipReport,
    /// `Σ_{n}^{2n−1}|d_k − d_{k+2}| ≥ 1/(4rn)` at every grid point.
    pub lower_bound: Vec<LowerBoundRow>,
    pub checks: Vec<Check>,
}

/// Remark 6: `d_n = 1/n²` on `r | n` lies in RBVS(β,r) with `Σβ_k/k < ∞` but
/// not in GM(₆β,2).
pub fn run_remark6(
    r: u64,
    grid: &[u64],
    beta6: &BetaSpec,
    rbvs_beta: &BetaSpec,
    horizon: u64,
    policy: &TrendPolicy,
) -> Result<Remark6Report> {
    if r < 3 {
        return Err(invalid("r", "remark 6 needs r ≥ 3"));
    }
    validate_grid(grid)?;
    let seq = CoefficientSequence::remark6(r)?;
    let rbvs = membership_scan(&seq, &ClassSpec::RbvsBeta { beta: rbvs_beta.clone(), r }, grid, horizon, policy)?;
    let beta_series = beta_series_tail(rbvs_beta, &seq, grid[0], horizon)?;
    let gm = membership_scan(&seq, &ClassSpec::GmBeta { beta: beta6.clone(), r: 2 }, grid, horizon, policy)?;

    let lower_bound: Vec<LowerBoundRow> = grid
        .iter()
        .map(|&n| {
            let v = block_variation(&seq, n, 2);
            let b = 1.0 / (4 * r * n) as f64;
            LowerBoundRow { n, block_variation: v, bound: b, holds: v >= b }
        })
        .collect();

    let top = *grid.last().unwrap() as f64 / 10.0;
    let mut running = 0.0f64;
    let mut rbvs_top_decade_c = Vec::new();
    for (i, &n) in grid.iter().enumerate() {
        running = running.max(rbvs.ratios[i]);
        if n as f64 >= top {
            rbvs_top_decade_c.push(running);
        }
    }
    let c_lo = rbvs_top_decade_c.iter().copied().fold(f64::INFINITY, f64::min);
    let c_hi = rbvs_top_decade_c.iter().copied().fold(0.0, f64::max);

    let checks = vec![
        Check::new(
            "RBVS scan bounded",
            rbvs.verdict == Verdict::Consistent,
            vec![rbvs.sup_ratio, rbvs.trend_slope.unwrap_or(f64::NAN)],
            format!("{} over the grid", rbvs.class),
        ),
        Check::new(
            "RBVS fitted C stable within 10% over the top decade",
            c_hi > 0.0 && c_hi <= 1.1 * c_lo,
            vec![c_lo, c_hi],
            "min and max of the running sup of the ratios".into(),
        ),
        Check::new(
            "sum beta_k/k summable",
            beta_series.summable,
            vec![beta_series.value, beta_series.tail_estimate, beta_series.fitted_exponent],
            format!("from k = {}", grid[0]),
        ),
        Check::new(
            "block variation >= 1/(4rn)",
            lower_bound.iter().all(|row| row.holds),
            lower_bound.iter().map(|row| row.block_variation * (4 * r * row.n) as f64).collect(),
            "4rn times the step-2 block variation at each grid point".into(),
        ),
        Check::new(
            "GM(beta6,2) ratios grow",
            gm.verdict == Verdict::Inconsistent,
            vec![gm.trend_slope.unwrap_or(f64::NAN), gm.trend_stderr.unwrap_or(f64::NAN)],
            format!("{} verdict {:?}", gm.class, gm.verdict),
        ),
    ];
    Ok(Remark6Report { r, grid: grid.to_vec(), rbvs, rbvs_top_decade_c, beta_series, gm, lower_bound, checks })
}

// ---------------------------------------------------------------- criterion

/// How the coefficient hypothesis of the criterion was established.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hypothesis {
    pub monotone: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gm_scan: Option<MembershipReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub sequence: String,
    pub kind: SeriesKind,
    pub hypothesis: Hypothesis,
    pub norms: Vec<NormReport>,
    pub norm_column: GridReport,
    pub criterion: GridReport,
    pub agree: bool,
    pub checks: Vec<Check>,
}

fn vanishing(g: &GridReport) -> bool {
    g.verdict == Trend::Vanishing
}

/// Pairs `‖f − S_n‖` (monotone coefficients) or `‖V_n − S_n‖` (otherwise)
/// with `|a_n| ln n` and asks whether both are o(1) or neither is.
pub fn run_criterion_iff<E: GridExecutor>(
    seq: &CoefficientSequence,
    kind: SeriesKind,
    grid: &[u64],
    spec: &QuadratureSpec,
    horizon: u64,
    policy: &TrendPolicy,
    exec: &E,
) -> Result<CriterionReport> {
    validate_grid(grid)?;
    let monotone = seq.is_monotone_on(grid[grid.len() - 1].saturating_mul(4).min(horizon));
    let gm_scan = if monotone {
        None
    } else {
        let beta6 = BetaSpec::b6(2.0, DEFAULT_B6_HORIZON);
        Some(membership_scan(seq, &ClassSpec::GmBeta { beta: beta6, r: 2 }, grid, DEFAULT_SCAN_HORIZON, policy)?)
    };
    let hypothesis_ok = monotone || gm_scan.as_ref().is_some_and(|g| g.verdict == Verdict::Consistent);
    let norms = collect(exec.map(grid, |n| {
        if monotone {
            sn_f_gap(seq, kind, n, 1, spec, horizon)
        } else {
            vn_sn_gap(seq, kind, n, spec)
        }
    }))?;
    let functional = if monotone { "||f - S_n||" } else { "||V_n - S_n||" };
    let values: Vec<f64> = norms.iter().map(|r| r.value).collect();
    let norm_column = GridReport::vanishing(functional.into(), grid, values, Vec::new(), seq.effective_start(), policy);
    let criterion = coefficient_criterion(seq, grid, policy)?;
    let agree = vanishing(&norm_column) == vanishing(&criterion)
        && norm_column.verdict != Trend::Inconclusive
        && criterion.verdict != Trend::Inconclusive;
    let checks = vec![
        Check::new(
            "coefficient hypothesis",
            hypothesis_ok,
            gm_scan.as_ref().map(|g| vec![g.sup_ratio]).unwrap_or_default(),
            if monotone { "monotone on the scanned prefix".into() } else { "GM(beta6,2) scan".into() },
        ),
        Check::new(
            "norm and criterion trends agree",
            agree,
            vec![norm_column.trend_slope.unwrap_or(f64::NAN), criterion.trend_slope.unwrap_or(f64::NAN)],
            format!("{:?} vs {:?}", norm_column.verdict, criterion.verdict),
        ),
    ];
    Ok(CriterionReport {
        sequence: seq.name().into(),
        kind,
        hypothesis: Hypothesis { monotone, gm_scan },
        norms,
        norm_column,
        criterion,
        agree,
        checks,
    })
}

// ---------------------------------------------------------------- Theorem 3

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theorem3Report {
    pub sequence: String,
    pub kind: SeriesKind,
    pub beta: String,
    pub hypothesis: GridReport,
    /// `max_{n≤m≤2n−1} ‖S_m − S_{n−1}‖`, the maximum over sampled `m`.
    pub cauchy_max: GridReport,
    pub vn_sn: GridReport,
    /// `‖V_n − S_n‖` over the right side of the imported inequality.
    pub inequality_ratio: GridReport,
    pub fitted_constant: f64,
    pub checks: Vec<Check>,
}

/// At most `count` integers spread over `lo..=hi`, both ends included.
fn sample(lo: u64, hi: u64, count: u64) -> Vec<u64> {
    if hi <= lo {
        return vec![lo];
    }
    let span = hi - lo;
    let steps = count.saturating_sub(1).max(1).min(span);
    let mut out: Vec<u64> = (0..=steps).map(|i| lo + span * i / steps).collect();
    out.dedup();
    out
}

const MAX_SAMPLES: u64 = 9;

/// Theorem 3: the weighted hypothesis sum, the Cauchy maxima it controls and
/// `‖V_n − S_n‖`, with a fitted constant for the imported inequality
/// `‖V_n − S_n‖ ≪ (1/(n+1)) Σ_{j≤n} ‖S_j − S_{[j/2]}‖ + max_{[n/2]≤k≤n} ‖S_k − S_{[n/2]}‖`.
pub fn run_theorem3_suite<E: GridExecutor>(
    seq: &CoefficientSequence,
    kind: SeriesKind,
    beta: &BetaSpec,
    grid: &[u64],
    spec: &QuadratureSpec,
    policy: &TrendPolicy,
    exec: &E,
) -> Result<Theorem3Report> {
    let hypothesis = theorem3_hypothesis(seq, beta, grid, policy)?;
    let rows = collect(exec.map(grid, |n| -> Result<(f64, f64, f64)> {
        let mut cmax = 0.0f64;
        for m in sample(n, 2 * n - 1, MAX_SAMPLES) {
            cmax = cmax.max(cauchy_gap(seq, kind, n, m, spec)?.value);
        }
        let vn = vn_sn_gap(seq, kind, n, spec)?.value;
        let mut avg = Neumaier::new();
        for j in 1..=n {
            avg.add(cauchy_gap(seq, kind, j / 2 + 1, j, spec)?.value);
        }
        let half = n / 2;
        let mut kmax = 0.0f64;
        for k in sample(half + 1, n, MAX_SAMPLES) {
            kmax = kmax.max(cauchy_gap(seq, kind, half + 1, k, spec)?.value);
        }
        let rhs = avg.value() / (n + 1) as f64 + kmax;
        Ok((cmax, vn, if rhs > 0.0 { vn / rhs } else { 0.0 }))
    }))?;
    let start = seq.effective_start();
    let cauchy_max = GridReport::vanishing(
        "max_{n<=m<=2n-1} ||S_m - S_{n-1}|| (sampled m)".into(),
        grid,
        rows.iter().map(|r| r.0).collect(),
        Vec::new(),
        start,
        policy,
    );
    let vn_sn = GridReport::vanishing("||V_n - S_n||".into(), grid, rows.iter().map(|r| r.1).collect(), Vec::new(), start, policy);
    let inequality_ratio = GridReport::bounded(
        "||V_n - S_n|| / (mean Cauchy gap + max half-block gap)".into(),
        grid,
        rows.iter().map(|r| r.2).collect(),
        Vec::new(),
        start,
        policy,
    );
    let fitted_constant = inequality_ratio.sup;
    let implication = !vanishing(&hypothesis) || (vanishing(&cauchy_max) && vanishing(&vn_sn));
    let checks = vec![
        Check::new(
            "hypothesis o(1) implies Cauchy maxima and ||V_n - S_n|| o(1)",
            implication,
            vec![
                hypothesis.trend_slope.unwrap_or(f64::NAN),
                cauchy_max.trend_slope.unwrap_or(f64::NAN),
                vn_sn.trend_slope.unwrap_or(f64::NAN),
            ],
            format!("{:?}, {:?}, {:?}", hypothesis.verdict, cauchy_max.verdict, vn_sn.verdict),
        ),
        Check::new(
            "imported inequality holds with a bounded constant",
            inequality_ratio.verdict == Trend::Bounded,
            vec![fitted_constant, inequality_ratio.trend_slope.unwrap_or(f64::NAN)],
            format!("{:?}", inequality_ratio.verdict),
        ),
    ];
    Ok(Theorem3Report {
        sequence: seq.name().into(),
        kind,
        beta: beta.label(),
        hypothesis,
        cauchy_max,
        vn_sn,
        inequality_ratio,
        fitted_constant,
        checks,
    })
}

// ---------------------------------------------------------------- Theorem 4

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theorem4Report {
    pub sequence: String,
    pub kind: SeriesKind,
    pub r: u64,
    pub beta: String,
    pub grid: Vec<u64>,
    pub norms: Vec<NormReport>,
    pub bounds: Vec<f64>,
    pub ratios: Vec<f64>,
    /// `K = max ratio`, fitted once over the grid.
    pub fitted_k: f64,
    /// `max ratio / min ratio`.
    pub ratio_spread: f64,
    /// First grid point from which the norms decrease strictly.
    pub strictly_decreasing_from: Option<u64>,
    pub trend: GridReport,
    pub checks: Vec<Check>,
}

/// Theorem 4: `‖S_n − f‖` against `β_{n+1} ln(n+1) + Σ_{k>n} β_k/k`.
#[allow(clippy::too_many_arguments)]
pub fn run_theorem4_suite<E: GridExecutor>(
    seq: &CoefficientSequence,
    kind: SeriesKind,
    r: u64,
    beta: &BetaSpec,
    grid: &[u64],
    spec: &QuadratureSpec,
    horizon: u64,
    policy: &TrendPolicy,
    exec: &E,
) -> Result<Theorem4Report> {
    validate_grid(grid)?;
    let rows = collect(exec.map(grid, |n| -> Result<(NormReport, f64)> {
        Ok((sn_f_gap(seq, kind, n, r, spec, horizon)?, theorem4_bound(seq, beta, n, horizon)?))
    }))?;
    let (norms, bounds): (Vec<NormReport>, Vec<f64>) = rows.into_iter().unzip();
    let values: Vec<f64> = norms.iter().map(|r| r.value).collect();
    let ratios: Vec<f64> = values.iter().zip(&bounds).map(|(v, b)| if *b > 0.0 { v / b } else { 0.0 }).collect();
    let fitted_k = ratios.iter().copied().fold(0.0, f64::max);
    let k_min = ratios.iter().copied().filter(|r| *r > 0.0).fold(f64::INFINITY, f64::min);
    let ratio_spread = if k_min.is_finite() { fitted_k / k_min } else { 1.0 };
    let mut from = grid.len() - 1;
    while from > 0 && values[from] < values[from - 1] {
        from -= 1;
    }
    let strictly_decreasing_from = (grid.len() > 1 && from < grid.len() - 1).then(|| grid[from]);
    let trend = GridReport::vanishing("||S_n - f||".into(), grid, values.clone(), Vec::new(), seq.effective_start(), policy);
    let bounded_by = values.iter().zip(&bounds).all(|(v, b)| *v <= fitted_k * b * (1.0 + 1e-12) + 1e-300);
    let checks = vec![
        Check::new(
            "||S_n - f|| <= K (beta_{n+1} ln(n+1) + sum beta_k/k) with one K",
            bounded_by && ratio_spread < 3.0,
            vec![fitted_k, ratio_spread],
            "fitted K and max/min ratio".into(),
        ),
        Check::new(
            "||S_n - f|| is o(1)",
            vanishing(&trend),
            vec![trend.trend_slope.unwrap_or(f64::NAN)],
            format!("{:?}", trend.verdict),
        ),
    ];
    Ok(Theorem4Report {
        sequence: seq.name().into(),
        kind,
        r,
        beta: beta.label(),
        grid: grid.to_vec(),
        norms,
        bounds,
        ratios,
        fitted_k,
        ratio_spread,
        strictly_decreasing_from,
        trend,
        checks,
    })
}

// ---------------------------------------------------------------- embeddings

/// An inclusion whose proof chain is checked.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "inclusion", rename_all = "snake_case")]
pub enum Inclusion {
    /// `GM(β,q) ⊆ GM(β,pq)` when `Σ_{i<p} β_{n+iq} ≪ β_n`; with ₆β and `q = 1` this is the embedding `GM(₆β,1) ⊆ GM(₆β,p)`.
    Remark1 { beta: BetaSpec, q: u64, p: u64 },
    /// `RBVS(β,q) ⊆ RBVS(β,pq)`.
    Remark2 { q: u64, p: u64 },
    /// `RBVS(β,r) ⊆ GM(β,r)`.
    RbvsInGm { r: u64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EmbeddingCase {
    pub generator: GeneratorDescriptor,
    #[serde(flatten)]
    pub inclusion: Inclusion,
    pub grid: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingCaseReport {
    pub sequence: String,
    pub chain: ChainReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingReport {
    pub cases: Vec<EmbeddingCaseReport>,
    pub all_hold: bool,
    pub checks: Vec<Check>,
}

fn descriptor(name: &str, params: GeneratorParams) -> GeneratorDescriptor {
    GeneratorDescriptor { name: name.into(), params }
}

/// The cases checked by the default embedding study.
pub fn default_embedding_cases() -> Vec<EmbeddingCase> {
    let harmonic = descriptor("harmonic", GeneratorParams::default());
    let constant = descriptor("constant", GeneratorParams { value: Some(1.0), ..Default::default() });
    let remark6 = |r| descriptor("remark6", GeneratorParams { r: Some(r), ..Default::default() });
    let grid = pow2_grid(1, 10);
    let case = |generator: &GeneratorDescriptor, inclusion| EmbeddingCase { generator: generator.clone(), inclusion, grid: grid.clone() };
    vec![
        case(&harmonic, Inclusion::Remark1 { beta: BetaSpec::b5(2.0), q: 1, p: 3 }),
        case(&harmonic, Inclusion::Remark1 { beta: BetaSpec::b6(2.0, 1 << 14), q: 1, p: 2 }),
        case(&harmonic, Inclusion::Remark2 { q: 1, p: 3 }),
        case(&harmonic, Inclusion::RbvsInGm { r: 2 }),
        case(&remark6(6), Inclusion::Remark2 { q: 2, p: 3 }),
        case(&remark6(6), Inclusion::Remark1 { beta: BetaSpec::b5(2.0), q: 2, p: 3 }),
        case(&remark6(3), Inclusion::RbvsInGm { r: 3 }),
        case(&constant, Inclusion::Remark1 { beta: BetaSpec::B1, q: 1, p: 2 }),
        case(&constant, Inclusion::Remark2 { q: 1, p: 2 }),
    ]
}

/// Checks the quantitative proof chains of the given inclusions pointwise.
pub fn run_embedding_suite(cases: &[EmbeddingCase], horizon: u64) -> Result<EmbeddingReport> {
    let mut out = Vec::with_capacity(cases.len());
    for c in cases {
        let seq = CoefficientSequence::from_descriptor(&c.generator)?;
        let chain = match &c.inclusion {
            Inclusion::Remark1 { beta, q, p } => remark1_chain(&seq, beta, *q, *p, &c.grid)?,
            Inclusion::Remark2 { q, p } => remark2_chain(&seq, *q, *p, &c.grid, horizon)?,
            Inclusion::RbvsInGm { r } => rbvs_in_gm(&seq, *r, &c.grid, horizon)?,
        };
        out.push(EmbeddingCaseReport { sequence: seq.name().into(), chain });
    }
    let all_hold = out.iter().all(|c| c.chain.all_hold);
    let failing: Vec<f64> = out.iter().enumerate().filter(|(_, c)| !c.chain.all_hold).map(|(i, _)| i as f64).collect();
    let checks = vec![Check::new(
        "all chain inequalities hold pointwise",
        all_hold,
        failing,
        format!("{} cases; values list failing case indices", out.len()),
    )];
    Ok(EmbeddingReport { cases: out, all_hold, checks })
}

// ---------------------------------------------------------------- studies

/// The named studies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StudyId {
    Remark5Cos,
    Remark5Sin,
    Remark6,
    CriterionIff,
    Theorem3Suite,
    Theorem4Suite,
    EmbeddingSuite,
}

impl StudyId {
    pub fn as_str(self) -> &'static str {
        match self {
            StudyId::Remark5Cos => "remark5_cos",
            StudyId::Remark5Sin => "remark5_sin",
            StudyId::Remark6 => "remark6",
            StudyId::CriterionIff => "criterion_iff",
            StudyId::Theorem3Suite => "theorem3_suite",
            StudyId::Theorem4Suite => "theorem4_suite",
            StudyId::EmbeddingSuite => "embedding_suite",
        }
    }
}

/// Study parameters. Unset fields take per-study defaults.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StudyParams {
    pub grid: Option<Vec<u64>>,
    pub n: Option<u64>,
    pub m: Option<u64>,
    pub growth_m: Option<Vec<u64>>,
    pub r: Option<u64>,
    pub kind: Option<SeriesKind>,
    pub beta: Option<BetaSpec>,
    pub beta6: Option<BetaSpec>,
    pub generators: Option<Vec<GeneratorDescriptor>>,
    pub cases: Option<Vec<EmbeddingCase>>,
    pub tol: Option<f64>,
    pub horizon: Option<u64>,
    pub policy: Option<TrendPolicy>,
}

/// A study to run and where its reports go.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StudySpec {
    pub study: StudyId,
    #[serde(default)]
    pub params: StudyParams,
    /// Output directory for reports.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

impl StudySpec {
    pub fn new(study: StudyId) -> Self {
        StudySpec { study, params: StudyParams::default(), output: None }
    }

    /// Grids sorted, generators resolvable, tolerances valid.
    pub fn validate(&self) -> Result<()> {
        let p = &self.params;
        if let Some(g) = &p.grid {
            validate_grid(g)?;
        }
        if let Some(g) = &p.growth_m {
            validate_grid(g)?;
        }
        for d in p.generators.iter().flatten() {
            CoefficientSequence::from_descriptor(d)?;
        }
        for c in p.cases.iter().flatten() {
            CoefficientSequence::from_descriptor(&c.generator)?;
            validate_grid(&c.grid)?;
        }
        for b in p.beta.iter().chain(&p.beta6) {
            b.validate()?;
        }
        if let Some(t) = p.tol {
            QuadratureSpec::new(t).validate()?;
        }
        Ok(())
    }

    fn generators(&self, default: &[GeneratorDescriptor]) -> Result<Vec<CoefficientSequence>> {
        let ds = self.params.generators.clone().unwrap_or_else(|| default.to_vec());
        ds.iter().map(CoefficientSequence::from_descriptor).collect()
    }

    fn generator(&self, default: GeneratorDescriptor) -> Result<CoefficientSequence> {
        let mut gs = self.generators(&[default])?;
        if gs.len() != 1 {
            return Err(invalid("generators", "this study takes exactly one generator"));
        }
        Ok(gs.remove(0))
    }
}

/// The report of one study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "study", content = "report", rename_all = "snake_case")]
pub enum StudyReport {
    Remark5(Remark5Report),
    Remark6(Remark6Report),
    CriterionIff(Vec<CriterionReport>),
    Theorem3(Theorem3Report),
    Theorem4(Theorem4Report),
    Embedding(EmbeddingReport),
}

impl StudyReport {
    pub fn checks(&self) -> Vec<&Check> {
        match self {
            StudyReport::Remark5(r) => r.checks.iter().collect(),
            StudyReport::Remark6(r) => r.checks.iter().collect(),
            StudyReport::CriterionIff(rs) => rs.iter().flat_map(|r| &r.checks).collect(),
            StudyReport::Theorem3(r) => r.checks.iter().collect(),
            StudyReport::Theorem4(r) => r.checks.iter().collect(),
            StudyReport::Embedding(r) => r.checks.iter().collect(),
        }
    }

    pub fn passed(&self) -> bool {
        self.checks().iter().all(|c| c.passed)
    }

    /// Numeric tables for CSV output.
    pub fn tables(&self) -> Vec<Table> {
        match self {
            StudyReport::Remark5(r) => {
                let mut t = Table::new("growth", &["m", "lower_bound", "increment", "predicted"]);
                for g in &r.growth {
                    t.rows.push(vec![
                        g.m as f64,
                        g.lower_bound,
                        g.increment.unwrap_or(f64::NAN),
                        g.predicted.unwrap_or(f64::NAN),
                    ]);
                }
                vec![t]
            }
            StudyReport::Remark6(r) => {
                let mut t = Table::new("remark6", &["n", "rbvs_ratio", "gm_ratio", "block_variation", "lower_bound"]);
                for (i, &n) in r.grid.iter().enumerate() {
                    t.rows.push(vec![
                        n as f64,
                        r.rbvs.ratios[i],
                        r.gm.ratios.get(i).copied().unwrap_or(f64::NAN),
                        r.lower_bound[i].block_variation,
                        r.lower_bound[i].bound,
                    ]);
                }
                vec![t]
            }
            StudyReport::CriterionIff(rs) => rs
                .iter()
                .map(|r| {
                    let mut t = Table::new(&r.sequence, &["n", "norm", "criterion"]);
                    for (i, &n) in r.norm_column.grid.iter().enumerate() {
                        t.rows.push(vec![n as f64, r.norm_column.values[i], r.criterion.values[i]]);
                    }
                    t
                })
                .collect(),
            StudyReport::Theorem3(r) => {
                let mut t = Table::new("theorem3", &["n", "hypothesis", "cauchy_max", "vn_sn", "inequality_ratio"]);
                for (i, &n) in r.vn_sn.grid.iter().enumerate() {
                    t.rows.push(vec![
                        n as f64,
                        r.hypothesis.values[i],
                        r.cauchy_max.values[i],
                        r.vn_sn.values[i],
                        r.inequality_ratio.values[i],
                    ]);
                }
                vec![t]
            }
            StudyReport::Theorem4(r) => {
                let mut t = Table::new("theorem4", &["n", "sn_f_gap", "error_estimate", "bound", "ratio"]);
                for (i, &n) in r.grid.iter().enumerate() {
                    t.rows.push(vec![n as f64, r.norms[i].value, r.norms[i].error_estimate, r.bounds[i], r.ratios[i]]);
                }
                vec![t]
            }
            StudyReport::Embedding(r) => {
                let mut t = Table::new("embedding", &["case", "n", "link", "lhs", "rhs", "holds"]);
                for (ci, c) in r.cases.iter().enumerate() {
                    for row in &c.chain.rows {
                        for (li, l) in row.links.iter().enumerate() {
                            t.rows.push(vec![ci as f64, row.n as f64, li as f64, l.lhs, l.rhs, if l.holds { 1.0 } else { 0.0 }]);
                        }
                    }
                }
                vec![t]
            }
        }
    }
}

/// Runs a study with its defaults filled in.
pub fn run_study<E: GridExecutor>(spec: &StudySpec, exec: &E) -> Result<StudyReport> {
    spec.validate()?;
    let p = &spec.params;
    let tol = p.tol.unwrap_or(DEFAULT_TOL);
    let qspec = norm_spec(tol);
    let policy = p.policy.unwrap_or_default();
    let grid = p.grid.clone().unwrap_or_else(default_grid);
    Ok(match spec.study {
        StudyId::Remark5Cos | StudyId::Remark5Sin => {
            let kind = if spec.study == StudyId::Remark5Cos { SeriesKind::Cosine } else { SeriesKind::Sine };
            let growth = p.growth_m.clone().unwrap_or_else(|| vec![500, 5_000, 500_000]);
            StudyReport::Remark5(run_remark5(kind, p.n.unwrap_or(50), p.m.unwrap_or(5000), &growth, &qspec)?)
        }
        StudyId::Remark6 => StudyReport::Remark6(run_remark6(
            p.r.unwrap_or(3),
            &grid,
            &p.beta6.clone().unwrap_or_else(|| BetaSpec::b6(2.0, DEFAULT_B6_HORIZON)),
            &p.beta.clone().unwrap_or_else(|| BetaSpec::b5(2.0)),
            p.horizon.unwrap_or(DEFAULT_SCAN_HORIZON),
            &policy,
        )?),
        StudyId::CriterionIff => {
            let defaults = [
                descriptor("harmonic", GeneratorParams::default()),
                descriptor("inv_log", GeneratorParams { shift: Some(2.0), ..Default::default() }),
            ];
            let kind = p.kind.unwrap_or(SeriesKind::Cosine);
            let horizon = p.horizon.unwrap_or(CRITERION_HORIZON);
            let mut out = Vec::new();
            for seq in spec.generators(&defaults)? {
                out.push(run_criterion_iff(&seq, kind, &grid, &qspec, horizon, &policy, exec)?);
            }
            StudyReport::CriterionIff(out)
        }
        StudyId::Theorem3Suite => {
            let seq = spec.generator(descriptor("harmonic", GeneratorParams::default()))?;
            let grid = p.grid.clone().unwrap_or_else(|| pow2_grid(3, 10));
            let beta = p.beta.clone().unwrap_or_else(|| BetaSpec::b5(2.0));
            StudyReport::Theorem3(run_theorem3_suite(&seq, p.kind.unwrap_or(SeriesKind::Cosine), &beta, &grid, &qspec, &policy, exec)?)
        }
        StudyId::Theorem4Suite => {
            let seq = spec.generator(descriptor("remark6", GeneratorParams { r: Some(3), ..Default::default() }))?;
            let grid = p.grid.clone().unwrap_or_else(|| pow2_grid(4, 9));
            let beta = p.beta.clone().unwrap_or_else(|| BetaSpec::b5(2.0));
            StudyReport::Theorem4(run_theorem4_suite(
                &seq,
                p.kind.unwrap_or(SeriesKind::Cosine),
                p.r.unwrap_or(3),
                &beta,
                &grid,
                &qspec,
                p.horizon.unwrap_or(DEFAULT_TAIL_HORIZON),
                &policy,
                exec,
            )?)
        }
        StudyId::EmbeddingSuite => {
            let cases = p.cases.clone().unwrap_or_else(default_embedding_cases);
            StudyReport::Embedding(run_embedding_suite(&cases, p.horizon.unwrap_or(DEFAULT_SCAN_HORIZON))?)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn remark5_lower_bound_examples() {
        let c = sin(2.0 * PI / 3.0) / PI;
        let x = 151.0f64;
        let single = c / (x * ln(x) * ln(ln(x)));
        assert!((remark5_lower_bound(SeriesKind::Cosine, 50, 50).unwrap() - single).abs() < 1e-18);
        assert!(remark5_lower_bound(SeriesKind::Cosine, 50, 49).is_err());
        assert!(remark5_lower_bound(SeriesKind::Exponential, 50, 60).is_err());
        let rep = run_remark5(SeriesKind::Cosine, 50, 50, &[], &norm_spec(1e-10)).unwrap();
        assert!(rep.gap.value >= rep.lower_bound);
        let rep = run_remark5(SeriesKind::Sine, 20, 200, &[200, 2000, 20000], &norm_spec(1e-8)).unwrap();
        assert!(rep.checks.iter().all(|c| c.passed), "{:?}", rep.checks);
    }

    #[test]
    fn sampling_covers_ends() {
        assert_eq!(sample(5, 5, 9), vec![5]);
        assert_eq!(sample(4, 7, 9), vec![4, 5, 6, 7]);
        let s = sample(16, 31, 9);
        assert_eq!((s[0], *s.last().unwrap(), s.len()), (16, 31, 9));
    }

    #[test]
    fn remark6_degenerate_grid_is_inconclusive() {
        let rep = run_remark6(3, &[64], &BetaSpec::b6(2.0, 1 << 12), &BetaSpec::b5(2.0), 1 << 17, &TrendPolicy::default()).unwrap();
        assert_eq!(rep.gm.verdict, Verdict::Inconclusive);
        assert!(run_remark6(2, &[64], &BetaSpec::B1, &BetaSpec::B1, 1 << 14, &TrendPolicy::default()).is_err());
    }

    #[test]
    fn remark6_r4_has_the_same_shape() {
        let grid = pow2_grid(4, 11);
        let rep = run_remark6(4, &grid, &BetaSpec::b6(2.0, 1 << 14), &BetaSpec::b5(2.0), 1 << 16, &TrendPolicy::default()).unwrap();
        assert!(rep.checks.iter().all(|c| c.passed), "{:?}", rep.checks);
    }

    #[test]
    fn criterion_on_zero_and_small_grids() {
        let z = CoefficientSequence::zero();
        let grid = pow2_grid(2, 9);
        let rep = run_criterion_iff(&z, SeriesKind::Cosine, &grid, &norm_spec(1e-6), 1 << 16, &TrendPolicy::default(), &Sequential).unwrap();
        assert!(rep.norm_column.values.iter().all(|v| *v == 0.0));
        assert!(rep.criterion.values.iter().all(|v| *v == 0.0));
        assert!(rep.agree);
    }

    #[test]
    fn theorem3_suite_on_harmonic() {
        let h = CoefficientSequence::harmonic();
        let rep = run_theorem3_suite(&h, SeriesKind::Cosine, &BetaSpec::b5(2.0), &pow2_grid(3, 10), &norm_spec(1e-8), &TrendPolicy::default(), &Sequential)
            .unwrap();
        assert!(rep.checks.iter().all(|c| c.passed), "{:?}", rep.checks);
        assert!(rep.fitted_constant > 0.0 && rep.fitted_constant.is_finite());
    }

    #[test]
    fn embedding_defaults_hold() {
        let rep = run_embedding_suite(&default_embedding_cases(), 1 << 16).unwrap();
        for c in &rep.cases {
            assert!(c.chain.all_hold, "{} {}", c.sequence, c.chain.inclusion);
        }
    }

    #[test]
    fn study_specs_round_trip_and_validate() {
        let json = r#"{"study":"remark6","params":{"grid":[16,32,64],"r":3}}"#;
        let spec: StudySpec = serde_json::from_str(json).unwrap();
        assert_eq!(spec.study, StudyId::Remark6);
        spec.validate().unwrap();
        let back: StudySpec = serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
        assert_eq!(back.params.grid, spec.params.grid);
        let bad: StudySpec = serde_json::from_str(r#"{"study":"remark6","params":{"grid":[32,16]}}"#).unwrap();
        assert!(bad.validate().is_err());
        let unknown: StudySpec = serde_json::from_str(r#"{"study":"theorem4_suite","params":{"generators":[{"name":"nope"}]}}"#).unwrap();
        assert!(unknown.validate().is_err());
        assert!(serde_json::from_str::<StudySpec>(r#"{"study":"remark7"}"#).is_err());
    }

    #[test]
    fn tables_render_as_csv() {
        let mut t = Table::new("t", &["n", "v"]);
        t.rows.push(vec![16.0, 0.5]);
        assert_eq!(t.to_csv(), "n,v\n16,0.5\n");
    }
}
