//! `L¹` norms of trigonometric expressions and the convergence functionals
//! `‖S_m − S_{n−1}‖`, `‖V_n − S_n‖` and `‖S_n − f‖`.

mod continuation;
pub mod quadrature;

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::beta::{beta, beta_over_k, BetaSpec};
use crate::classes::Flag;
use crate::error::{invalid, Error, Result};
use crate::fit::float_serde;
use crate::math::{ln, TrigPoly, PI, TWO_PI};
use crate::sequences::{CoefficientSequence, SeriesKind};
use crate::Complex64;

use continuation::TailEvaluator;
pub use quadrature::{integrate, FnIntegrand, Integrand, Quadrature, QuadratureSpec, Sample, DEFAULT_MAX_PANELS};

/// Default absolute tolerance of the norm functionals.
pub const DEFAULT_TOL: f64 = 1e-6;
/// Default truncation horizon of `f` in `‖S_n − f‖`.
pub const DEFAULT_TAIL_HORIZON: u64 = 1 << 22;

/// Parameters recorded with a norm.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct NormParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sequence: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<SeriesKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<u64>,
    pub abs_tol: f64,
}

/// A computed norm with its error budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub functional: String,
    pub params: NormParams,
    pub value: f64,
    pub error_estimate: f64,
    pub panels: usize,
    pub evaluations: u64,
    /// Mass bound of the excluded neighbourhoods; `inf` when no finite bound exists.
    #[serde(with = "float_serde")]
    pub excluded_mass: f64,
    /// Integrated pointwise error bound of the integrand (the tail envelope for `‖S_n − f‖`).
    pub envelope_mass: f64,
    pub epsilon: f64,
    pub flags: Vec<Flag>,
}

impl NormReport {
    fn from_quadrature(functional: &str, params: NormParams, q: &Quadrature, epsilon: f64, flags: Vec<Flag>) -> Self {
        NormReport {
            functional: functional.into(),
            params,
            value: q.value.max(0.0),
            error_estimate: q.error_estimate(),
            panels: q.panels,
            evaluations: q.evaluations,
            excluded_mass: q.excluded_mass,
            envelope_mass: q.pointwise_error,
            epsilon,
            flags,
        }
    }

    fn zero(functional: &str, params: NormParams, flags: Vec<Flag>) -> Self {
        NormReport {
            functional: functional.into(),
            params,
            value: 0.0,
            error_estimate: 0.0,
            panels: 0,
            evaluations: 0,
            excluded_mass: 0.0,
            envelope_mass: 0.0,
            epsilon: 0.0,
            flags,
        }
    }
}

/// `(1/2π)∫_{−π}^{π}|g|`.
pub fn l1_norm(g: &dyn Integrand, spec: &QuadratureSpec) -> Result<NormReport> {
    let q = integrate(g, spec)?;
    let params = NormParams { abs_tol: spec.abs_tol, ..Default::default() };
    Ok(NormReport::from_quadrature("l1", params, &q, spec.exclusion_radius, Vec::new()))
}

enum Part {
    Re,
    Im,
    Full,
}

/// A trigonometric polynomial `P(x) + Q(−x)`, or the real or imaginary part of `P`.
struct PolyIntegrand {
    pos: TrigPoly,
    neg: TrigPoly,
    part: Part,
}

impl Integrand for PolyIntegrand {
    fn eval(&self, x: f64) -> Sample {
        let v = self.pos.eval(x);
        Sample::exact(match self.part {
            Part::Re => Complex64::new(v.re, 0.0),
            Part::Im => Complex64::new(v.im, 0.0),
            Part::Full => v + self.neg.eval(-x),
        })
    }

    fn is_even(&self) -> bool {
        !matches!(self.part, Part::Full)
    }
}

/// `Σ_{k=lo}^{hi} w(k) a_k trig(kx)`, with `k = 0` the constant term.
fn poly(seq: &CoefficientSequence, kind: SeriesKind, lo: u64, hi: u64, w: impl Fn(u64) -> f64) -> PolyIntegrand {
    let (mut pos, mut neg) = (TrigPoly::new(), TrigPoly::new());
    let real = seq.is_real();
    let part = match kind {
        SeriesKind::Cosine if real => Part::Re,
        SeriesKind::Sine if real => Part::Im,
        _ => Part::Full,
    };
    if matches!(part, Part::Full) {
        let e = seq.exponential_form(kind);
        let negative = e.negative();
        for k in lo..=hi {
            let wk = w(k);
            pos.push(k, e.coeff(k) * wk);
            if k > 0 {
                if let Some(nb) = negative {
                    neg.push(k, nb.coeff(k) * wk);
                }
            }
        }
    } else {
        for k in lo..=hi {
            let c = if k == 0 {
                if kind == SeriesKind::Cosine {
                    seq.constant_term() * 0.5
                } else {
                    Complex64::new(0.0, 0.0)
                }
            } else {
                seq.coeff(k)
            };
            pos.push(k, c * w(k));
        }
    }
    PolyIntegrand { pos, neg, part }
}

fn params(seq: &CoefficientSequence, kind: SeriesKind, spec: &QuadratureSpec) -> NormParams {
    NormParams { sequence: Some(seq.name().into()), kind: Some(kind), abs_tol: spec.abs_tol, ..Default::default() }
}

fn poly_norm(functional: &str, g: &PolyIntegrand, p: NormParams, spec: &QuadratureSpec) -> Result<NormReport> {
    if g.pos.is_empty() && g.neg.is_empty() {
        spec.validate()?;
        return Ok(NormReport::zero(functional, p, Vec::new()));
    }
    let q = integrate(g, spec)?;
    Ok(NormReport::from_quadrature(functional, p, &q, spec.exclusion_radius, Vec::new()))
}

/// `‖S_n‖`.
pub fn partial_sum_norm(seq: &CoefficientSequence, kind: SeriesKind, n: u64, spec: &QuadratureSpec) -> Result<NormReport> {
    let g = poly(seq, kind, 0, n, |_| 1.0);
    poly_norm("partial_sum", &g, NormParams { n: Some(n), ..params(seq, kind, spec) }, spec)
}

/// `‖S_m − S_{n−1}‖`.
pub fn cauchy_gap(seq: &CoefficientSequence, kind: SeriesKind, n: u64, m: u64, spec: &QuadratureSpec) -> Result<NormReport> {
    if n == 0 || m < n {
        return Err(invalid("n, m", "need m ≥ n ≥ 1"));
    }
    let g = poly(seq, kind, n, m, |_| 1.0);
    poly_norm("cauchy_gap", &g, NormParams { n: Some(n), m: Some(m), ..params(seq, kind, spec) }, spec)
}

/// `‖V_n − S_n‖`, using `V_n − S_n = −Σ_{k=1}^{n} (k/(n+1)) a_k trig(kx)`.
pub fn vn_sn_gap(seq: &CoefficientSequence, kind: SeriesKind, n: u64, spec: &QuadratureSpec) -> Result<NormReport> {
    if n == 0 {
        return Err(invalid("n", "must be at least 1"));
    }
    let d = (n + 1) as f64;
    let g = poly(seq, kind, 1, n, |k| -(k as f64) / d);
    poly_norm("vn_sn_gap", &g, NormParams { n: Some(n), ..params(seq, kind, spec) }, spec)
}

#[derive(Clone, Copy)]
enum Map {
    Re,
    Im,
    Id,
    Conj,
}

struct Component {
    eval: TailEvaluator,
    map: Map,
    times_i: bool,
}

/// `Σ_{k>n} a_k trig(kx)` assembled from real tail evaluators.
struct TailIntegrand {
    parts: Vec<Component>,
    even: bool,
}

impl Integrand for TailIntegrand {
    fn eval(&self, x: f64) -> Sample {
        let mut value = Complex64::new(0.0, 0.0);
        let mut error = 0.0;
        for c in &self.parts {
            let (v, e) = c.eval.eval(x);
            let v = match c.map {
                Map::Re => Complex64::new(v.re, 0.0),
                Map::Im => Complex64::new(v.im, 0.0),
                Map::Id => v,
                Map::Conj => v.conj(),
            };
            value += if c.times_i { v * Complex64::new(0.0, 1.0) } else { v };
            error += e;
        }
        Sample { value, error }
    }

    fn is_even(&self) -> bool {
        self.even
    }

    fn excluded_mass(&self, radius: f64) -> Option<f64> {
        Some(self.mass(radius))
    }
}

impl TailIntegrand {
    fn r(&self) -> u64 {
        self.parts[0].eval.step()
    }

    /// `(1/2π)∫` over all `2r` one-sided neighbourhoods of radius `eps`.
    fn mass(&self, eps: f64) -> f64 {
        let per_side: f64 = self.parts.iter().map(|c| c.eval.side_mass(eps)).sum();
        self.r() as f64 / PI * per_side
    }

    fn set_spread(&mut self, eps: f64) {
        for c in &mut self.parts {
            c.eval.set_spread(eps);
        }
    }

    /// Predicted integrated pointwise error for the exclusion radius `eps`.
    fn envelope(&self, eps: f64) -> f64 {
        let r = self.r() as f64;
        let (a, b) = (ln(eps), ln(PI / r));
        let steps = libm::ceil((b - a) * 16.0).max(1.0) as usize;
        let h = (b - a) / steps as f64;
        let f = |t: f64| {
            let d = crate::math::exp(t);
            d * self.parts.iter().map(|c| c.eval.floor_error(d)).sum::<f64>()
        };
        let mut acc = 0.5 * (f(a) + f(b));
        for i in 1..steps {
            acc += f(a + i as f64 * h);
        }
        r / PI * acc * h
    }
}

/// Exclusion radii tried by [`sn_f_gap`], as fractions of the period `2π/r`.
const EPS_FRACTIONS: [f64; 17] = [
    1e-2, 3.16e-3, 1e-3, 3.16e-4, 1e-4, 3.16e-5, 1e-5, 3.16e-6, 1e-6, 3.16e-7, 1e-7, 3.16e-8, 1e-8, 3.16e-9, 1e-9,
    3.16e-10, 1e-10,
];

/// `‖S_n − f‖`, with `f` continued beyond the partial sums by iterated `r`-step
/// summation by parts on the coefficients up to `horizon`.
///
/// The neighbourhoods of `2πℤ/r` of radius `ε` are excluded and their mass is
/// bounded by the linear sine lower bound; `ε` minimises that mass plus the
/// integrated pointwise error. When the mass bound is not certified (for
/// instance when `Σ|a_k|/k` diverges), `ε` is the smallest radius whose
/// pointwise error fits the tolerance, the report covers the complement of
/// the excluded set and carries `excluded_mass_unbounded`.
pub fn sn_f_gap(
    seq: &CoefficientSequence,
    kind: SeriesKind,
    n: u64,
    r: u64,
    spec: &QuadratureSpec,
    horizon: u64,
) -> Result<NormReport> {
    spec.validate()?;
    if r == 0 {
        return Err(invalid("r", "must be at least 1"));
    }
    let p = NormParams { n: Some(n), r: Some(r), horizon: Some(horizon), ..params(seq, kind, spec) };
    let mut flags = Vec::new();
    if seq.support_end().is_some_and(|e| e <= n) && seq.negative().is_none_or(|b| b.support_end().is_some_and(|e| e <= n)) {
        flags.push(Flag::new("finite_support"));
        return Ok(NormReport::zero("sn_f_gap", p, flags));
    }
    if horizon < 10 * (n + 1) + 8 * r {
        return Err(Error::HorizonTooSmall { horizon, reason: "‖S_n − f‖ needs a decade of coefficients beyond n" });
    }

    let mut branches = alloc::vec![(seq.clone(), false)];
    if kind == SeriesKind::Exponential {
        if let Some(b) = seq.negative() {
            branches.push((b.clone(), true));
        }
    }
    let mut specs = Vec::new();
    for (b, negative) in &branches {
        for imag in [false, true] {
            if imag && b.is_real() {
                continue;
            }
            let map = match (kind, negative) {
                (SeriesKind::Cosine, _) => Map::Re,
                (SeriesKind::Sine, _) => Map::Im,
                (SeriesKind::Exponential, false) => Map::Id,
                (SeriesKind::Exponential, true) => Map::Conj,
            };
            specs.push((b.clone(), imag, map));
        }
    }
    let target = 0.2 * spec.abs_tol / specs.len() as f64;
    let mut parts = Vec::with_capacity(specs.len());
    for (b, imag, map) in specs {
        let eval = TailEvaluator::new(&b, imag, n, r, horizon, target);
        if !eval.has_certificate() {
            return Err(Error::NoTailCertificate { from: n + 1 });
        }
        if !eval.is_zero() {
            parts.push(Component { eval, map, times_i: imag });
        }
    }
    if parts.is_empty() {
        return Ok(NormReport::zero("sn_f_gap", p, flags));
    }
    let mut g = TailIntegrand { even: seq.is_real() && kind != SeriesKind::Exponential, parts };
    if g.parts.iter().any(|c| c.eval.uses_fitted_tail()) {
        flags.push(Flag::new("fitted_tail_beyond_horizon"));
    }

    let period = TWO_PI / r as f64;
    let mut best: Option<(f64, f64)> = None;
    let mut resolvable: Option<f64> = None;
    for frac in EPS_FRACTIONS {
        let eps = frac * period;
        g.set_spread(eps);
        let env = g.envelope(eps);
        if env <= 0.7 * spec.abs_tol {
            resolvable = Some(eps);
        }
        let total = g.mass(eps) + env;
        if total.is_finite() && best.is_none_or(|(_, t)| total < t) {
            best = Some((eps, total));
        }
    }
    let eps = match best {
        Some((eps, _)) => eps,
        None => {
            flags.push(Flag::new("excluded_mass_unbounded").with_detail(
                "no certified mass bound near the singular set: the value covers the complement of the excluded neighbourhoods".into(),
            ));
            resolvable.unwrap_or(EPS_FRACTIONS[0] * period)
        }
    };
    g.set_spread(eps);
    let qspec = QuadratureSpec {
        singular_points: Vec::new(),
        breakpoints: Vec::new(),
        exclusion_radius: 0.0,
        ..spec.clone()
    }
    .with_step(r, eps);
    let q = integrate(&g, &qspec)?;
    Ok(NormReport::from_quadrature("sn_f_gap", p, &q, eps, flags))
}

/// `β_{n+1} ln(n+1) + Σ_{k>n} β_k/k`, the tail summed to `horizon` plus a fitted remainder.
pub fn theorem4_bound(seq: &CoefficientSequence, spec: &BetaSpec, n: u64, horizon: u64) -> Result<f64> {
    if n == 0 {
        return Err(invalid("n", "must be at least 1"));
    }
    let head = beta(spec, seq, n + 1)? * ln((n + 1) as f64);
    let tail = beta_over_k(spec, seq, n + 1, horizon, 1)?;
    if !tail.tail_estimate.is_finite() {
        return Err(Error::NotSummable { from: n + 1 });
    }
    Ok(head + tail.total())
}
