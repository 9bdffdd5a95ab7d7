//! Adaptive Gauss-Kronrod (7, 15) quadrature of `|g|` over the circle.
//!
//! Panels are refined greedily by largest `|K − G|`. Panels whose nodes show
//! a sign change of a real integrand are split at the located roots first,
//! so the kinks of `|g|` sit on panel boundaries.

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{invalid, Error, Result};
use crate::math::{compensated_sum, Neumaier, PI, TWO_PI};
use crate::Complex64;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// One evaluation of an integrand: its value and a bound on the value's error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub value: Complex64,
    pub error: f64,
}

impl Sample {
    pub fn exact(value: Complex64) -> Self {
        Sample { value, error: 0.0 }
    }

    pub fn real(value: f64) -> Self {
        Sample { value: Complex64::new(value, 0.0), error: 0.0 }
    }
}

/// A function on the circle whose `L¹` norm is wanted.
pub trait Integrand {
    fn eval(&self, x: f64) -> Sample;

    /// True when `|g(−x)| = |g(x)|`.
    fn is_even(&self) -> bool {
        false
    }

    /// A bound on `(1/2π)∫|g|` over the excluded neighbourhoods of radius `radius`
    /// around the singular points; `None` when the integrand supplies no envelope.
    fn excluded_mass(&self, _radius: f64) -> Option<f64> {
        None
    }
}

/// Adapter for closures `x ↦ g(x)` with exact values.
pub struct FnIntegrand<F> {
    f: F,
    even: bool,
}

impl<F: Fn(f64) -> f64> FnIntegrand<F> {
    pub fn new(f: F) -> Self {
        FnIntegrand { f, even: false }
    }

    pub fn even(f: F) -> Self {
        FnIntegrand { f, even: true }
    }
}

impl<F: Fn(f64) -> f64> Integrand for FnIntegrand<F> {
    fn eval(&self, x: f64) -> Sample {
        Sample::real((self.f)(x))
    }

    fn is_even(&self) -> bool {
        self.even
    }
}

/// Quadrature settings.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    /// Points where the integrand may blow up.
    pub singular_points: Vec<f64>,
    /// Half-width of the neighbourhoods cut out around the singular points.
    pub exclusion_radius: f64,
    /// Extra initial panel boundaries.
    pub breakpoints: Vec<f64>,
    pub max_panels: usize,
}

pub const DEFAULT_MAX_PANELS: usize = 400_000;

impl QuadratureSpec {
    pub fn new(abs_tol: f64) -> Self {
        QuadratureSpec {
            abs_tol,
            singular_points: Vec::new(),
            exclusion_radius: 0.0,
            breakpoints: Vec::new(),
            max_panels: DEFAULT_MAX_PANELS,
        }
    }

    /// Adds the singular set `2πℤ/r` with the given exclusion radius, and the
    /// breakpoints `2lπ/r ± π/r`.
    pub fn with_step(mut self, r: u64, radius: f64) -> Self {
        for l in step_points(r, 0.0) {
            self.singular_points.push(l);
        }
        self.breakpoints.extend(step_points(r, PI / r as f64));
        self.exclusion_radius = radius;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return Err(invalid("tol", "absolute tolerance must be a positive finite number"));
        }
        if !(self.exclusion_radius >= 0.0 && self.exclusion_radius < PI) {
            return Err(invalid("epsilon", "exclusion radius must lie in [0, π)"));
        }
        if self.max_panels == 0 {
            return Err(invalid("max_panels", "must be positive"));
        }
        Ok(())
    }
}

/// Points `2lπ/r + shift` in `[−π, π]`.
fn step_points(r: u64, shift: f64) -> impl Iterator<Item = f64> {
    let r = r.max(1) as i64;
    (-r..=r).map(move |l| TWO_PI * l as f64 / r as f64 + shift).filter(|x| x.abs() <= PI + 1e-15)
}

/// Outcome of [`integrate`], already normalised by `1/2π`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    /// Sum of the panel estimates `|K − G|`.
    pub rule_error: f64,
    /// Integrated pointwise error bound of the integrand.
    pub pointwise_error: f64,
    /// Mass bound of the excluded neighbourhoods; infinite when unbounded.
    pub excluded_mass: f64,
    pub panels: usize,
    pub evaluations: u64,
}

impl Quadrature {
    /// The error budget that counts against the tolerance.
    pub fn error_estimate(&self) -> f64 {
        let excl = if self.excluded_mass.is_finite() { self.excluded_mass } else { 0.0 };
        self.rule_error + self.pointwise_error + excl
    }
}

#[derive(Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    kronrod: f64,
    error: f64,
    pointwise: f64,
}

struct Key {
    error: f64,
    index: usize,
}

impl PartialEq for Key {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Key {}
impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error).then_with(|| other.index.cmp(&self.index))
    }
}

struct Engine<'a> {
    g: &'a dyn Integrand,
    evaluations: u64,
}

impl Engine<'_> {
    fn sample(&mut self, x: f64) -> Sample {
        self.evaluations += 1;
        self.g.eval(x)
    }

    fn nodes(a: f64, b: f64) -> [f64; 15] {
        let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
        let mut xs = [0.0; 15];
        for i in 0..7 {
            xs[i] = c - h * XGK[i];
            xs[14 - i] = c + h * XGK[i];
        }
        xs[7] = c;
        xs
    }

    fn rule(a: f64, b: f64, s: &[Sample; 15]) -> Panel {
        let h = 0.5 * (b - a);
        let abs = |i: usize| s[i].value.norm();
        let mut k = Neumaier::new();
        let mut g = Neumaier::new();
        let mut pw = Neumaier::new();
        for i in 0..7 {
            let (l, r) = (i, 14 - i);
            k.add(WGK[i] * (abs(l) + abs(r)));
            pw.add(WGK[i] * (s[l].error + s[r].error));
            if i % 2 == 1 {
                g.add(WG[i / 2] * (abs(l) + abs(r)));
            }
        }
        k.add(WGK[7] * abs(7));
        pw.add(WGK[7] * s[7].error);
        g.add(WG[3] * abs(7));
        let kronrod = h * k.value();
        let gauss = h * g.value();
        Panel { a, b, kronrod, error: (kronrod - gauss).abs(), pointwise: h * pw.value() }
    }

    fn real_value(s: &Sample) -> Option<f64> {
        (s.value.im == 0.0).then_some(s.value.re)
    }

    fn root(&mut self, mut lo: f64, mut flo: f64, mut hi: f64, mut fhi: f64) -> f64 {
        // Illinois variant of regula falsi
        let mut side = 0i8;
        for _ in 0..60 {
            let x = (lo * fhi - hi * flo) / (fhi - flo);
            let x = if x > lo && x < hi { x } else { 0.5 * (lo + hi) };
            if hi - lo <= 4.0 * f64::EPSILON * hi.abs().max(lo.abs()).max(1e-300) {
                return x;
            }
            let Some(fx) = Self::real_value(&self.sample(x)) else { return x };
            if fx == 0.0 {
                return x;
            }
            if (fx > 0.0) == (fhi > 0.0) {
                hi = x;
                fhi = fx;
                if side == 1 {
                    flo *= 0.5;
                }
                side = 1;
            } else {
                lo = x;
                flo = fx;
                if side == -1 {
                    fhi *= 0.5;
                }
                side = -1;
            }
        }
        0.5 * (lo + hi)
    }

    /// Evaluates a panel, splitting it first at sign changes of a real integrand.
    fn panel(&mut self, a: f64, b: f64, out: &mut Vec<Panel>) {
        let xs = Self::nodes(a, b);
        let mut s = [Sample::real(0.0); 15];
        for i in 0..15 {
            s[i] = self.sample(xs[i]);
        }
        let mut roots = Vec::new();
        let mut prev: Option<(f64, f64)> = None;
        for i in 0..15 {
            let Some(v) = Self::real_value(&s[i]) else {
                roots.clear();
                break;
            };
            if v == 0.0 {
                continue;
            }
            if let Some((px, pv)) = prev {
                if (pv > 0.0) != (v > 0.0) {
                    roots.push(self.root(px, pv, xs[i], v));
                }
            }
            prev = Some((xs[i], v));
        }
        if roots.is_empty() {
            out.push(Self::rule(a, b, &s));
            return;
        }
        let mut left = a;
        for x in roots.into_iter().chain(core::iter::once(b)) {
            if x > left {
                let ys = Self::nodes(left, x);
                let mut t = [Sample::real(0.0); 15];
                for i in 0..15 {
                    t[i] = self.sample(ys[i]);
                }
                out.push(Self::rule(left, x, &t));
                left = x;
            }
        }
    }
}

/// Initial panel boundaries: breakpoints and singular-point neighbourhoods,
/// minus the excluded zones.
fn initial_intervals(spec: &QuadratureSpec, lo: f64, hi: f64) -> Vec<(f64, f64)> {
    let eps = spec.exclusion_radius;
    let mut excluded: Vec<(f64, f64)> = Vec::new();
    let mut cuts = alloc::vec![lo, hi];
    for &s in &spec.singular_points {
        for shift in [-TWO_PI, 0.0, TWO_PI] {
            let c = s + shift;
            if eps > 0.0 {
                excluded.push((c - eps, c + eps));
            }
            for p in [c - eps, c, c + eps] {
                if p > lo && p < hi {
                    cuts.push(p);
                }
            }
        }
    }
    for &p in &spec.breakpoints {
        if p > lo && p < hi {
            cuts.push(p);
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() <= 1e-15 * (1.0 + b.abs()));
    cuts.windows(2)
        .map(|w| (w[0], w[1]))
        .filter(|(a, b)| b > a)
        .filter(|(a, b)| {
            let mid = 0.5 * (a + b);
            !excluded.iter().any(|(l, r)| mid > *l && mid < *r)
        })
        .collect()
}

/// `(1/2π)∫_{−π}^{π} |g|` by adaptive Gauss-Kronrod quadrature.
pub fn integrate(g: &dyn Integrand, spec: &QuadratureSpec) -> Result<Quadrature> {
    spec.validate()?;
    let excluded_mass = if !spec.singular_points.is_empty() && spec.exclusion_radius > 0.0 {
        let m = g.excluded_mass(spec.exclusion_radius).ok_or(Error::MissingEnvelope)?;
        if m.is_nan() || m < 0.0 {
            return Err(Error::MissingEnvelope);
        }
        m
    } else {
        0.0
    };
    let even = g.is_even();
    let (lo, scale) = if even { (0.0, 1.0 / PI) } else { (-PI, 1.0 / TWO_PI) };
    let mut engine = Engine { g, evaluations: 0 };
    let mut panels: Vec<Option<Panel>> = Vec::new();
    let mut heap = BinaryHeap::new();
    let mut fresh = Vec::new();
    for (a, b) in initial_intervals(spec, lo, PI) {
        engine.panel(a, b, &mut fresh);
    }
    let push = |p: Panel, panels: &mut Vec<Option<Panel>>, heap: &mut BinaryHeap<Key>| {
        heap.push(Key { error: p.error, index: panels.len() });
        panels.push(Some(p));
    };
    let (mut rule_err, mut pw_err) = (0.0, 0.0);
    for p in fresh.drain(..) {
        rule_err += p.error;
        pw_err += p.pointwise;
        push(p, &mut panels, &mut heap);
    }
    let excl = if excluded_mass.is_finite() { excluded_mass } else { 0.0 };
    let mut active = panels.len();
    let mut refreshed = 0usize;
    loop {
        // running sums drift; recompute them now and then
        if refreshed >= 1024 {
            rule_err = compensated_sum(panels.iter().flatten().map(|p| p.error));
            pw_err = compensated_sum(panels.iter().flatten().map(|p| p.pointwise));
            refreshed = 0;
        }
        let budget = (spec.abs_tol - pw_err * scale - excl).max(0.1 * spec.abs_tol);
        if rule_err * scale <= budget {
            break;
        }
        if active >= spec.max_panels {
            break;
        }
        let Some(key) = heap.pop() else { break };
        let Some(p) = panels[key.index].take() else { continue };
        let mid = 0.5 * (p.a + p.b);
        if !(mid > p.a && mid < p.b) {
            panels[key.index] = Some(p);
            continue;
        }
        rule_err -= p.error;
        pw_err -= p.pointwise;
        active -= 1;
        engine.panel(p.a, mid, &mut fresh);
        engine.panel(mid, p.b, &mut fresh);
        for q in fresh.drain(..) {
            rule_err += q.error;
            pw_err += q.pointwise;
            active += 1;
            push(q, &mut panels, &mut heap);
        }
        refreshed += 1;
    }
    let mut live: Vec<Panel> = panels.into_iter().flatten().collect();
    live.sort_by(|x, y| x.a.total_cmp(&y.a));
    let value = compensated_sum(live.iter().map(|p| p.kronrod)) * scale;
    let rule_error = compensated_sum(live.iter().map(|p| p.error)) * scale;
    let pointwise_error = compensated_sum(live.iter().map(|p| p.pointwise)) * scale;
    let q = Quadrature {
        value,
        rule_error,
        pointwise_error,
        excluded_mass,
        panels: live.len(),
        evaluations: engine.evaluations,
    };
    if q.error_estimate() > spec.abs_tol {
        return Err(Error::QuadratureFailed { tol: spec.abs_tol, panels: q.panels, estimate: q.error_estimate() });
    }
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::{cos, sin};

    #[test]
    fn constant_and_single_harmonics() {
        let q = integrate(&FnIntegrand::new(|_| 1.0), &QuadratureSpec::new(1e-12)).unwrap();
        assert!((q.value - 1.0).abs() < 1e-15);
        for k in [1.0, 3.0, 17.0, 250.0] {
            let q = integrate(&FnIntegrand::new(move |x| sin(k * x)), &QuadratureSpec::new(1e-10)).unwrap();
            assert!((q.value - 2.0 / PI).abs() < 1e-10, "k={k}: {}", q.value);
        }
    }

    #[test]
    fn kinks_are_split_at_roots() {
        let q = integrate(&FnIntegrand::even(|x| cos(x) - 0.3), &QuadratureSpec::new(1e-12)).unwrap();
        // (1/π)∫_0^π |cos x − 0.3| = (1/π)(2 sqrt(1 − 0.09) + 0.3π − 0.6 acos(0.3))
        let x0 = libm::acos(0.3);
        let exact = (2.0 * crate::math::sqrt(0.91) + 0.3 * PI - 0.6 * x0) / PI;
        assert!((q.value - exact).abs() < 1e-12, "{} vs {exact}", q.value);
        assert!(q.panels < 40);
    }

    #[test]
    fn excluded_neighbourhoods_need_an_envelope() {
        let spec = QuadratureSpec::new(1e-6).with_step(1, 1e-3);
        assert_eq!(integrate(&FnIntegrand::new(|_| 1.0), &spec), Err(Error::MissingEnvelope));
    }

    #[test]
    fn invalid_tolerance() {
        assert!(integrate(&FnIntegrand::new(|_| 1.0), &QuadratureSpec::new(0.0)).is_err());
        assert!(integrate(&FnIntegrand::new(|_| 1.0), &QuadratureSpec::new(f64::NAN)).is_err());
    }

    #[test]
    fn panel_limit_reports_failure() {
        let mut spec = QuadratureSpec::new(1e-14);
        spec.max_panels = 2;
        let r = integrate(&FnIntegrand::new(|x| sin(40.0 * x) * x), &spec);
        assert!(matches!(r, Err(Error::QuadratureFailed { .. })));
    }
}
