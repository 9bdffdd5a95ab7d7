//! Finite-prefix class membership diagnostics and the hypothesis checks of
//! the convergence theorems.
//!
//! Membership is never decided from a prefix. Every report carries the raw
//! ratios together with a trend verdict judged by a [`TrendPolicy`].

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::beta::{beta, BetaSpec};
use crate::error::{invalid, Error, Result};
use crate::fit::{float_serde, TailSum, Trend, TrendPolicy};
use crate::math::{floor, ln, pow, Neumaier};
use crate::sequences::{CoefficientSequence, GeneratorDescriptor};

/// A sequence class.
#[derive(Debug, Clone)]
pub enum ClassSpec {
    /// Nonnegative nonincreasing.
    Monotone,
    /// `n^{-τ} a_n` nonincreasing.
    QuasiMonotone { tau: f64 },
    /// `Σ_{n≥m} |a_n − a_{n+1}| ≤ C|a_m|`
    Rbvs,
    /// `Σ_{n=m}^{2m−1} |a_n − a_{n+1}| ≤ C|a_m|`
    Gm,
    /// Majorant `max_{m ≤ n ≤ N+m} |a_n|`.
    Gbvs { n_terms: u64 },
    /// Majorant `|a_m| + |a_{2m}|`.
    Nbvs,
    /// Majorant `Σ_{n=[m/c]}^{[cm]} |a_n|/n`.
    Mvbv { c: f64 },
    /// `λ` nondecreasing with `λ_{2n} ≤ Cλ_n` and `a_n/λ_n` nonincreasing, for a user-supplied `λ`.
    Orvqm { lambda: CoefficientSequence },
    /// Block variation with step `r` against `β_m`.
    GmBeta { beta: BetaSpec, r: u64 },
    /// Tail variation with step `r` against `β_m`.
    RbvsBeta { beta: BetaSpec, r: u64 },
}

impl ClassSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            ClassSpec::QuasiMonotone { tau } if !(*tau > 0.0 && tau.is_finite()) => Err(invalid("tau", "must be positive")),
            ClassSpec::Mvbv { c } if !(*c > 1.0 && c.is_finite()) => Err(invalid("c", "must be a finite real > 1")),
            ClassSpec::GmBeta { beta, r } | ClassSpec::RbvsBeta { beta, r } => {
                if *r == 0 {
                    return Err(invalid("r", "must be at least 1"));
                }
                beta.validate()
            }
            _ => Ok(()),
        }
    }

    /// Display name such as `GM(b5(c=2),3)`.
    pub fn label(&self) -> String {
        match self {
            ClassSpec::Monotone => "M".into(),
            ClassSpec::QuasiMonotone { tau } => alloc::format!("QM(tau={tau})"),
            ClassSpec::Rbvs => "RBVS".into(),
            ClassSpec::Gm => "GM".into(),
            ClassSpec::Gbvs { n_terms } => alloc::format!("GBVS(N={n_terms})"),
            ClassSpec::Nbvs => "NBVS".into(),
            ClassSpec::Mvbv { c } => alloc::format!("MVBV(c={c})"),
            ClassSpec::Orvqm { lambda } => alloc::format!("ORVQM(lambda={})", lambda.name()),
            ClassSpec::GmBeta { beta, r } => alloc::format!("GM({},{r})", beta.label()),
            ClassSpec::RbvsBeta { beta, r } => alloc::format!("RBVS({},{r})", beta.label()),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ClassSpecRepr {
    class: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    r: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    beta: Option<BetaSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tau: Option<f64>,
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    n: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lambda: Option<GeneratorDescriptor>,
}

impl Serialize for ClassSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        let mut r = ClassSpecRepr { class: String::new(), r: None, beta: None, tau: None, n: None, c: None, lambda: None };
        r.class = match self {
            ClassSpec::Monotone => "M",
            ClassSpec::QuasiMonotone { tau } => {
                r.tau = Some(*tau);
                "QM"
            }
            ClassSpec::Rbvs => "RBVS",
            ClassSpec::Gm => "GM",
            ClassSpec::Gbvs { n_terms } => {
                r.n = Some(*n_terms);
                "GBVS"
            }
            ClassSpec::Nbvs => "NBVS",
            ClassSpec::Mvbv { c } => {
                r.c = Some(*c);
                "MVBV"
            }
            ClassSpec::Orvqm { lambda } => {
                r.lambda = Some(lambda.descriptor().map_err(serde::ser::Error::custom)?);
                "ORVQM"
            }
            ClassSpec::GmBeta { beta, r: step } => {
                r.beta = Some(beta.clone());
                r.r = Some(*step);
                "GM(beta,r)"
            }
            ClassSpec::RbvsBeta { beta, r: step } => {
                r.beta = Some(beta.clone());
                r.r = Some(*step);
                "RBVS(beta,r)"
            }
        }
        .to_string();
        r.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ClassSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> core::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = ClassSpecRepr::deserialize(d)?;
        let need_beta = || r.beta.clone().ok_or_else(|| D::Error::custom("class needs a beta functional"));
        let spec = match r.class.as_str() {
            "M" => ClassSpec::Monotone,
            "QM" => ClassSpec::QuasiMonotone { tau: r.tau.ok_or_else(|| D::Error::custom("QM needs tau"))? },
            "RBVS" => ClassSpec::Rbvs,
            "GM" => ClassSpec::Gm,
            "GBVS" => ClassSpec::Gbvs { n_terms: r.n.unwrap_or(crate::beta::DEFAULT_N) },
            "NBVS" => ClassSpec::Nbvs,
            "MVBV" => ClassSpec::Mvbv { c: r.c.unwrap_or(crate::beta::DEFAULT_C) },
            "ORVQM" => {
                let l = r.lambda.as_ref().ok_or_else(|| D::Error::custom("ORVQM needs a lambda generator"))?;
                ClassSpec::Orvqm { lambda: CoefficientSequence::from_descriptor(l).map_err(D::Error::custom)? }
            }
            "GM(beta,r)" => ClassSpec::GmBeta { beta: need_beta()?, r: r.r.unwrap_or(1) },
            "RBVS(beta,r)" => ClassSpec::RbvsBeta { beta: need_beta()?, r: r.r.unwrap_or(1) },
            other => return Err(D::Error::custom(alloc::format!("unknown class `{other}`"))),
        };
        spec.validate().map_err(D::Error::custom)?;
        Ok(spec)
    }
}

/// A note attached to a report, optionally tied to a grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Flag {
    pub code: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Flag {
    pub fn new(code: &str) -> Self {
        Flag { code: code.into(), n: None, detail: None }
    }

    pub fn at(code: &str, n: u64) -> Self {
        Flag { code: code.into(), n: Some(n), detail: None }
    }

    pub fn with_detail(mut self, detail: String) -> Self {
        self.detail = Some(detail);
        self
    }
}

/// Membership verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "consistent-with-membership")]
    Consistent,
    #[serde(rename = "inconsistent")]
    Inconsistent,
    #[serde(rename = "inconclusive")]
    Inconclusive,
}

/// Outcome of [`membership_scan`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MembershipReport {
    pub class: String,
    pub grid: Vec<u64>,
    #[serde(with = "float_serde::vec")]
    pub variations: Vec<f64>,
    #[serde(with = "float_serde::vec")]
    pub majorants: Vec<f64>,
    #[serde(with = "float_serde::vec")]
    pub ratios: Vec<f64>,
    #[serde(with = "float_serde")]
    pub sup_ratio: f64,
    /// The implicit constant `C`, estimated as the sup of the ratios.
    #[serde(with = "float_serde")]
    pub fitted_c: f64,
    pub trend_slope: Option<f64>,
    pub trend_stderr: Option<f64>,
    pub verdict: Verdict,
    pub effective_start: Option<u64>,
    pub flags: Vec<Flag>,
}

/// A column of values over a grid with a trend verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridReport {
    pub quantity: String,
    pub grid: Vec<u64>,
    #[serde(with = "float_serde::vec")]
    pub values: Vec<f64>,
    #[serde(with = "float_serde")]
    pub sup: f64,
    pub trend_slope: Option<f64>,
    pub trend_stderr: Option<f64>,
    pub verdict: Trend,
    pub effective_start: Option<u64>,
    pub flags: Vec<Flag>,
}

pub(crate) fn validate_grid(grid: &[u64]) -> Result<()> {
    if grid.is_empty() || grid[0] == 0 || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidGrid);
    }
    Ok(())
}

fn sup(values: &[f64]) -> f64 {
    values.iter().copied().fold(0.0, f64::max)
}

impl GridReport {
    pub(crate) fn bounded(quantity: String, grid: &[u64], values: Vec<f64>, flags: Vec<Flag>, start: Option<u64>, policy: &TrendPolicy) -> Self {
        let (verdict, fit) = policy.growth(grid, &values);
        Self::assemble(quantity, grid, values, flags, start, verdict, fit)
    }

    pub(crate) fn vanishing(quantity: String, grid: &[u64], values: Vec<f64>, flags: Vec<Flag>, start: Option<u64>, policy: &TrendPolicy) -> Self {
        let (verdict, fit) = policy.decay(grid, &values);
        Self::assemble(quantity, grid, values, flags, start, verdict, fit)
    }

    fn assemble(
        quantity: String,
        grid: &[u64],
        values: Vec<f64>,
        flags: Vec<Flag>,
        effective_start: Option<u64>,
        verdict: Trend,
        fit: Option<crate::fit::SlopeFit>,
    ) -> Self {
        GridReport {
            quantity,
            grid: grid.to_vec(),
            sup: sup(&values),
            values,
            trend_slope: fit.map(|f| f.slope),
            trend_stderr: fit.map(|f| f.stderr),
            verdict,
            effective_start,
            flags,
        }
    }
}

fn diff_abs(seq: &CoefficientSequence, k: u64, r: u64) -> f64 {
    let d = seq.coeff(k) - seq.coeff(k + r);
    if d.im == 0.0 {
        d.re.abs()
    } else {
        d.norm()
    }
}

/// `Σ_{n=m}^{2m−1} |a_n − a_{n+r}|`.
pub fn block_variation(seq: &CoefficientSequence, m: u64, r: u64) -> f64 {
    window_variation(seq, m, m, r)
}

/// `Σ_{k=s}^{s+len−1} |a_k − a_{k+r}|`.
pub fn window_variation(seq: &CoefficientSequence, s: u64, len: u64, r: u64) -> f64 {
    crate::math::compensated_sum((s..s + len).map(|k| diff_abs(seq, k, r)))
}

/// `Σ_{n=m}^{∞} |a_n − a_{n+r}|`, truncated at `horizon` with a fitted remainder.
pub fn tail_variation(seq: &CoefficientSequence, m: u64, r: u64, horizon: u64) -> Result<TailSum> {
    check_step(m, r)?;
    if horizon < 2 * m {
        return Err(Error::HorizonTooSmall { horizon, reason: "tail variation needs horizon ≥ 2m" });
    }
    let summands: Vec<f64> = (m..=horizon).map(|k| diff_abs(seq, k, r)).collect();
    Ok(TailSum::from_summands(m, &summands))
}

fn check_step(m: u64, r: u64) -> Result<()> {
    if m == 0 {
        return Err(invalid("m", "indices start at 1"));
    }
    if r == 0 {
        return Err(invalid("r", "must be at least 1"));
    }
    Ok(())
}

/// Suffix sums of `|a_k − a_{k+r}|` on `[from, horizon]` sharing one fitted remainder.
pub(crate) struct TailVariations {
    from: u64,
    suffix: Vec<f64>,
    pub(crate) fit: TailSum,
}

impl TailVariations {
    pub(crate) fn new(seq: &CoefficientSequence, from: u64, r: u64, horizon: u64) -> Result<Self> {
        check_step(from, r)?;
        if horizon < 2 * from {
            return Err(Error::HorizonTooSmall { horizon, reason: "tail variation needs horizon ≥ 2m" });
        }
        let summands: Vec<f64> = (from..=horizon).map(|k| diff_abs(seq, k, r)).collect();
        let fit = TailSum::from_summands(from, &summands);
        let mut suffix = alloc::vec![0.0; summands.len() + 1];
        let mut acc = Neumaier::new();
        for i in (0..summands.len()).rev() {
            acc.add(summands[i]);
            suffix[i] = acc.value();
        }
        Ok(TailVariations { from, suffix, fit })
    }

    /// Truncated sum from `m` to the horizon.
    pub(crate) fn truncated(&self, m: u64) -> f64 {
        self.suffix[((m - self.from) as usize).min(self.suffix.len() - 1)]
    }

    /// Truncated sum plus the fitted remainder.
    pub(crate) fn total(&self, m: u64) -> f64 {
        self.truncated(m) + self.fit.tail_estimate
    }
}

/// Result of an exact monotonicity check on a prefix.
struct PrefixCheck {
    holds: bool,
    first_violation: Option<u64>,
}

fn check_nonincreasing(horizon: u64, f: impl Fn(u64) -> Option<f64>) -> PrefixCheck {
    let mut prev: Option<f64> = None;
    for n in 1..=horizon {
        let Some(v) = f(n) else {
            return PrefixCheck { holds: false, first_violation: Some(n) };
        };
        if v < 0.0 || prev.is_some_and(|p| v > p) {
            return PrefixCheck { holds: false, first_violation: Some(n) };
        }
        prev = Some(v);
    }
    PrefixCheck { holds: true, first_violation: None }
}

fn real_value(seq: &CoefficientSequence, n: u64) -> Option<f64> {
    let c = seq.coeff(n);
    (c.im == 0.0).then_some(c.re)
}

/// Scans the ratio of a class's variation functional to its majorant over `grid`.
pub fn membership_scan(
    seq: &CoefficientSequence,
    class: &ClassSpec,
    grid: &[u64],
    horizon: u64,
    policy: &TrendPolicy,
) -> Result<MembershipReport> {
    validate_grid(grid)?;
    class.validate()?;
    let mut flags = Vec::new();
    let mut variations = Vec::with_capacity(grid.len());
    let mut majorants = Vec::with_capacity(grid.len());
    let m_max = *grid.last().unwrap();
    let mut exact: Option<PrefixCheck> = None;

    let tails = match class {
        ClassSpec::Rbvs => Some(TailVariations::new(seq, grid[0], 1, horizon)?),
        ClassSpec::RbvsBeta { r, .. } => Some(TailVariations::new(seq, grid[0], *r, horizon)?),
        _ => None,
    };
    if let Some(t) = &tails {
        if !t.fit.summable {
            flags.push(Flag::new("tail_not_summable").with_detail(alloc::format!(
                "fitted exponent {:.4}, remainder {:e}",
                t.fit.fitted_exponent, t.fit.tail_estimate
            )));
        }
        flags.push(Flag::new("tail_fitted").with_detail(alloc::format!(
            "horizon {horizon}, fitted exponent {:.4}, remainder {:e}",
            t.fit.fitted_exponent, t.fit.tail_estimate
        )));
    }
    if let ClassSpec::GmBeta { beta: b, .. } | ClassSpec::RbvsBeta { beta: b, .. } = class {
        if b.floors_real_c() {
            flags.push(Flag::new("b3_real_c_floored"));
        }
    }

    match class {
        ClassSpec::Monotone => {
            exact = Some(check_nonincreasing(horizon.max(2 * m_max), |n| real_value(seq, n)));
        }
        ClassSpec::QuasiMonotone { tau } => {
            exact = Some(check_nonincreasing(horizon.max(2 * m_max), |n| {
                real_value(seq, n).map(|v| v * pow(n as f64, -tau))
            }));
        }
        ClassSpec::Orvqm { lambda } => {
            let top = horizon.max(2 * m_max);
            let mut ok = PrefixCheck { holds: true, first_violation: None };
            let mut prev = 0.0;
            for n in 1..=top {
                let l = real_value(lambda, n).unwrap_or(f64::NAN);
                if !(l > 0.0) || l < prev {
                    ok = PrefixCheck { holds: false, first_violation: Some(n) };
                    break;
                }
                prev = l;
            }
            if ok.holds {
                ok = check_nonincreasing(top, |n| real_value(seq, n).map(|v| v / lambda.re(n)));
            }
            exact = Some(ok);
        }
        _ => {}
    }

    for &m in grid {
        let (var, maj) = match class {
            ClassSpec::Monotone | ClassSpec::QuasiMonotone { .. } | ClassSpec::Gm => {
                (block_variation(seq, m, 1), seq.abs(m))
            }
            ClassSpec::Orvqm { lambda } => (lambda.abs(2 * m), lambda.abs(m)),
            ClassSpec::Rbvs => (tails.as_ref().unwrap().total(m), seq.abs(m)),
            ClassSpec::Gbvs { n_terms } => {
                (block_variation(seq, m, 1), (m..=m + n_terms).map(|k| seq.abs(k)).fold(0.0, f64::max))
            }
            ClassSpec::Nbvs => (block_variation(seq, m, 1), seq.abs(m) + seq.abs(2 * m)),
            ClassSpec::Mvbv { c } => {
                let lo = (floor(m as f64 / c) as u64).max(1);
                let hi = floor(c * m as f64) as u64;
                (
                    block_variation(seq, m, 1),
                    crate::math::compensated_sum((lo..=hi).map(|k| seq.abs(k) / k as f64)),
                )
            }
            ClassSpec::GmBeta { beta: b, r } => (block_variation(seq, m, *r), beta(b, seq, m)?),
            ClassSpec::RbvsBeta { beta: b, .. } => (tails.as_ref().unwrap().total(m), beta(b, seq, m)?),
        };
        variations.push(var);
        majorants.push(maj);
    }

    let mut ratios = Vec::with_capacity(grid.len());
    for (i, &m) in grid.iter().enumerate() {
        let (v, b) = (variations[i], majorants[i]);
        ratios.push(if b > 0.0 {
            v / b
        } else if v == 0.0 {
            flags.push(Flag::at("zero_over_zero", m));
            0.0
        } else {
            flags.push(Flag::at("zero_majorant", m));
            f64::INFINITY
        });
    }

    let (trend, fit) = policy.growth(grid, &ratios);
    let mut verdict = match trend {
        Trend::Unbounded => Verdict::Inconsistent,
        Trend::Bounded => Verdict::Consistent,
        _ => Verdict::Inconclusive,
    };
    if let Some(check) = exact {
        let mut f = Flag::new(if check.holds { "exact_prefix_check_holds" } else { "exact_prefix_check_fails" });
        if let Some(n) = check.first_violation {
            f.n = Some(n);
        }
        flags.push(f);
        if !check.holds {
            verdict = Verdict::Inconsistent;
        } else if !matches!(class, ClassSpec::Orvqm { .. }) {
            verdict = Verdict::Consistent;
        }
    }
    if matches!(class, ClassSpec::QuasiMonotone { .. } | ClassSpec::Orvqm { .. }) {
        flags.push(Flag::new("certificate_check_only"));
    }
    let sup_ratio = sup(&ratios);
    Ok(MembershipReport {
        class: class.label(),
        grid: grid.to_vec(),
        variations,
        majorants,
        ratios,
        sup_ratio,
        fitted_c: sup_ratio,
        trend_slope: fit.map(|f| f.slope),
        trend_stderr: fit.map(|f| f.stderr),
        verdict,
        effective_start: seq.effective_start(),
        flags,
    })
}

/// Smallest `τ` from `taus` for which the QM certificate holds on the prefix.
/// The search is incomplete by nature: a `None` does not refute membership.
pub fn qm_tau_search(seq: &CoefficientSequence, taus: &[f64], horizon: u64) -> Option<f64> {
    let mut sorted: Vec<f64> = taus.iter().copied().filter(|t| *t > 0.0).collect();
    sorted.sort_by(|a, b| a.total_cmp(b));
    sorted
        .into_iter()
        .find(|tau| check_nonincreasing(horizon, |n| real_value(seq, n).map(|v| v * pow(n as f64, -tau))).holds)
}

fn ratio_column(grid: &[u64], num: &[f64], den: &[f64], flags: &mut Vec<Flag>) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(grid.len());
    let mut usable = 0;
    for i in 0..grid.len() {
        if den[i] > 0.0 {
            usable += 1;
            out.push(num[i] / den[i]);
        } else {
            flags.push(Flag::at(if num[i] == 0.0 { "zero_over_zero" } else { "zero_denominator" }, grid[i]));
            out.push(if num[i] == 0.0 { 0.0 } else { f64::INFINITY });
        }
    }
    if usable == 0 {
        return Err(Error::ZeroDenominator);
    }
    Ok(out)
}

/// `(Σ_{i=0}^{p−1} β_{n+iq})/β_n` over the grid.
pub fn remark1_condition(
    spec: &BetaSpec,
    seq: &CoefficientSequence,
    q: u64,
    p: u64,
    grid: &[u64],
    policy: &TrendPolicy,
) -> Result<GridReport> {
    validate_grid(grid)?;
    if p == 0 || q == 0 {
        return Err(invalid("p, q", "must be at least 1"));
    }
    let mut flags = Vec::new();
    let mut values = Vec::with_capacity(grid.len());
    let mut fit_grid = Vec::with_capacity(grid.len());
    for &n in grid {
        let bn = beta(spec, seq, n)?;
        if bn == 0.0 {
            flags.push(Flag::at("zero_beta_excluded", n));
            continue;
        }
        let mut acc = Neumaier::new();
        for i in 0..p {
            acc.add(beta(spec, seq, n + i * q)?);
        }
        fit_grid.push(n);
        values.push(acc.value() / bn);
    }
    if fit_grid.is_empty() {
        return Err(Error::ZeroDenominator);
    }
    Ok(GridReport::bounded(
        alloc::format!("sum_{{i<{p}}} beta_(n+{q}i) / beta_n [{}]", spec.label()),
        &fit_grid,
        values,
        flags,
        seq.effective_start(),
        policy,
    ))
}

fn window_abs(seq: &CoefficientSequence, n: u64, gamma: f64) -> f64 {
    let lo = (floor(n as f64 / gamma) as u64).max(1);
    let hi = floor(gamma * n as f64) as u64;
    crate::math::compensated_sum((lo..=hi).map(|k| seq.abs(k)))
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma > 1.0 && gamma.is_finite() {
        Ok(())
    } else {
        Err(invalid("gamma", "must be a finite real > 1"))
    }
}

/// `(Σ_{k=[n/2]}^{n} β_k)/(Σ_{k=[n/γ]}^{[γn]} |c_k|)` over the grid.
pub fn theorem2_hypothesis(
    seq: &CoefficientSequence,
    spec: &BetaSpec,
    gamma: f64,
    grid: &[u64],
    policy: &TrendPolicy,
) -> Result<GridReport> {
    validate_grid(grid)?;
    check_gamma(gamma)?;
    let mut num = Vec::with_capacity(grid.len());
    for &n in grid {
        let mut acc = Neumaier::new();
        for k in (n / 2).max(1)..=n {
            acc.add(beta(spec, seq, k)?);
        }
        num.push(acc.value());
    }
    let den: Vec<f64> = grid.iter().map(|&n| window_abs(seq, n, gamma)).collect();
    let mut flags = Vec::new();
    let values = ratio_column(grid, &num, &den, &mut flags)?;
    Ok(GridReport::bounded(
        alloc::format!("sum beta_k [n/2..n] / sum |c_k| [n/{gamma}..{gamma}n] [{}]", spec.label()),
        grid,
        values,
        flags,
        seq.effective_start(),
        policy,
    ))
}

/// `n|c_n| / Σ_{k=[n/γ]}^{[γn]} |c_k|` over the grid.
pub fn theorem2_keystep(seq: &CoefficientSequence, gamma: f64, grid: &[u64], policy: &TrendPolicy) -> Result<GridReport> {
    validate_grid(grid)?;
    check_gamma(gamma)?;
    let num: Vec<f64> = grid.iter().map(|&n| n as f64 * seq.abs(n)).collect();
    let den: Vec<f64> = grid.iter().map(|&n| window_abs(seq, n, gamma)).collect();
    let mut flags = Vec::new();
    let values = ratio_column(grid, &num, &den, &mut flags)?;
    Ok(GridReport::bounded(
        alloc::format!("n|c_n| / sum |c_k| [n/{gamma}..{gamma}n]"),
        grid,
        values,
        flags,
        seq.effective_start(),
        policy,
    ))
}

/// `Σ_{k=[n/2]}^{2n−1} (β_k + β_{2k} + |a_k| + |a_{k+1}|)/(2k−n+2)` over the grid.
pub fn theorem3_hypothesis(seq: &CoefficientSequence, spec: &BetaSpec, grid: &[u64], policy: &TrendPolicy) -> Result<GridReport> {
    validate_grid(grid)?;
    if grid[0] < 2 {
        return Err(invalid("n", "theorem 3 hypothesis needs n ≥ 2"));
    }
    let mut values = Vec::with_capacity(grid.len());
    for &n in grid {
        let lo = (n / 2).max(1);
        let table = crate::beta::BetaTable::build(spec, seq, lo.max(if matches!(spec, BetaSpec::B6 { .. }) { 2 } else { 1 }), 4 * n)?;
        let get = |k: u64| if k < table.first() { 0.0 } else { table.get(k) };
        let mut acc = Neumaier::new();
        for k in lo..=2 * n - 1 {
            let w = (2 * k + 2 - n) as f64;
            acc.add((get(k) + get(2 * k) + seq.abs(k) + seq.abs(k + 1)) / w);
        }
        values.push(acc.value());
    }
    Ok(GridReport::vanishing(
        alloc::format!("theorem 3 weighted sum [{}]", spec.label()),
        grid,
        values,
        Vec::new(),
        seq.effective_start(),
        policy,
    ))
}

/// `|a_n| ln n` over the grid with an o(1) verdict.
pub fn coefficient_criterion(seq: &CoefficientSequence, grid: &[u64], policy: &TrendPolicy) -> Result<GridReport> {
    validate_grid(grid)?;
    if grid[0] < 2 {
        return Err(invalid("n", "the criterion needs n ≥ 2"));
    }
    let mut flags = Vec::new();
    let values: Vec<f64> = grid
        .iter()
        .map(|&n| {
            let v = seq.abs(n) * ln(n as f64);
            if v == 0.0 {
                flags.push(Flag::at("zero_value_excluded_from_fit", n));
            }
            v
        })
        .collect();
    Ok(GridReport::vanishing("|a_n| ln n".into(), grid, values, flags, seq.effective_start(), policy))
}

/// One inequality `lhs ≤ rhs` of a proof chain, with the numbers it was judged on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainLink {
    pub label: String,
    #[serde(with = "float_serde")]
    pub lhs: f64,
    #[serde(with = "float_serde")]
    pub rhs: f64,
    pub holds: bool,
}

impl ChainLink {
    fn new(label: &str, lhs: f64, rhs: f64) -> Self {
        let holds = lhs <= rhs * (1.0 + 1e-12) + 1e-300;
        ChainLink { label: label.into(), lhs, rhs, holds }
    }
}

/// All links of a proof chain at one grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainRow {
    pub n: u64,
    pub links: Vec<ChainLink>,
}

/// Pointwise proof-chain checks over a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub inclusion: String,
    pub rows: Vec<ChainRow>,
    pub summary: Vec<ChainLink>,
    pub all_hold: bool,
}

impl ChainReport {
    fn finish(inclusion: String, rows: Vec<ChainRow>, summary: Vec<ChainLink>) -> Self {
        let all_hold = rows.iter().flat_map(|r| &r.links).chain(&summary).all(|l| l.holds);
        ChainReport { inclusion, rows, summary, all_hold }
    }
}

/// The quantitative chain behind `GM(β,q) ⊆ GM(β,pq)` when `Σ_{i<p} β_{n+iq} ≤ R(n) β_n`:
/// `Σ_{k=n}^{2n−1}|a_k − a_{k+pq}| ≤ Σ_l Σ_{k=n+lq}^{2n+lq−1}|a_k − a_{k+q}|
///  ≤ Σ_l V_q(n+lq) ≤ C_q Σ_l β_{n+lq} = C_q R(n) β_n`.
pub fn remark1_chain(seq: &CoefficientSequence, spec: &BetaSpec, q: u64, p: u64, grid: &[u64]) -> Result<ChainReport> {
    validate_grid(grid)?;
    if p == 0 || q == 0 {
        return Err(invalid("p, q", "must be at least 1"));
    }
    let r = p * q;
    let mut rows = Vec::with_capacity(grid.len());
    let (mut sup_ratio_r, mut sup_cq, mut sup_r1) = (0.0f64, 0.0f64, 0.0f64);
    for &n in grid {
        let l0 = block_variation(seq, n, r);
        let mut l1 = Neumaier::new();
        let mut l2 = Neumaier::new();
        let mut betas = Neumaier::new();
        let mut cq = 0.0f64;
        for l in 0..p {
            let s = n + l * q;
            l1.add(window_variation(seq, s, n, q));
            let v = block_variation(seq, s, q);
            l2.add(v);
            let b = beta(spec, seq, s)?;
            betas.add(b);
            if b > 0.0 {
                cq = cq.max(v / b);
            } else if v > 0.0 {
                cq = f64::INFINITY;
            }
        }
        let bn = beta(spec, seq, n)?;
        let rn = if bn > 0.0 { betas.value() / bn } else { 0.0 };
        let ratio_r = if bn > 0.0 { l0 / bn } else { 0.0 };
        sup_ratio_r = sup_ratio_r.max(ratio_r);
        sup_cq = sup_cq.max(cq);
        sup_r1 = sup_r1.max(rn);
        let l3 = if betas.value() > 0.0 { cq * betas.value() } else { 0.0 };
        rows.push(ChainRow {
            n,
            links: alloc::vec![
                ChainLink::new("step-r block <= sum of shifted step-q windows", l0, l1.value()),
                ChainLink::new("shifted windows <= shifted step-q blocks", l1.value(), l2.value()),
                ChainLink::new("shifted blocks <= C_q * sum of shifted betas", l2.value(), l3),
                ChainLink::new("GM(beta,r) ratio <= C_q * remark-1 ratio", ratio_r, cq * rn),
            ],
        });
    }
    let summary = alloc::vec![ChainLink::new(
        "fitted C of GM(beta,r) <= sup remark-1 ratio * sup C_q",
        sup_ratio_r,
        sup_r1 * sup_cq * (1.0 + 1e-12),
    )];
    Ok(ChainReport::finish(alloc::format!("GM({0},{q}) in GM({0},{r})", spec.label()), rows, summary))
}

/// The chain behind `RBVS(β,q) ⊆ RBVS(β,pq)`:
/// `Σ_{k≥m}|a_k − a_{k+pq}| ≤ p Σ_{k≥m}|a_k − a_{k+q}|`, checked exactly on
/// truncated sums and with fitted remainders.
pub fn remark2_chain(seq: &CoefficientSequence, q: u64, p: u64, grid: &[u64], horizon: u64) -> Result<ChainReport> {
    validate_grid(grid)?;
    if p == 0 || q == 0 {
        return Err(invalid("p, q", "must be at least 1"));
    }
    let r = p * q;
    let tr = TailVariations::new(seq, grid[0], r, horizon)?;
    let tq = TailVariations::new(seq, grid[0], q, horizon + r - q)?;
    let tq_fit = TailVariations::new(seq, grid[0], q, horizon)?;
    let tol = tr.fit.tail_estimate + p as f64 * tq_fit.fit.tail_estimate;
    let mut rows = Vec::with_capacity(grid.len());
    for &m in grid {
        rows.push(ChainRow {
            n: m,
            links: alloc::vec![
                ChainLink::new("truncated step-r tail <= p * truncated step-q tail", tr.truncated(m), p as f64 * tq.truncated(m)),
                ChainLink::new(
                    "fitted step-r tail <= p * fitted step-q tail + fit tolerance",
                    tr.total(m),
                    p as f64 * tq_fit.total(m) + tol,
                ),
            ],
        });
    }
    Ok(ChainReport::finish(alloc::format!("RBVS(beta,{q}) in RBVS(beta,{r})"), rows, Vec::new()))
}

/// `RBVS(β,r) ⊆ GM(β,r)`: the block variation never exceeds the tail variation.
pub fn rbvs_in_gm(seq: &CoefficientSequence, r: u64, grid: &[u64], horizon: u64) -> Result<ChainReport> {
    validate_grid(grid)?;
    let t = TailVariations::new(seq, grid[0], r, horizon.max(2 * grid[grid.len() - 1]))?;
    let rows = grid
        .iter()
        .map(|&m| ChainRow { n: m, links: alloc::vec![ChainLink::new("block variation <= tail variation", block_variation(seq, m, r), t.truncated(m))] })
        .collect();
    Ok(ChainReport::finish(alloc::format!("RBVS(beta,{r}) in GM(beta,{r})"), rows, Vec::new()))
}
