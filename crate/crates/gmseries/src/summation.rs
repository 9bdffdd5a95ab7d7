//! Partial sums, de la Vallée Poussin means, and the `r`-step Abel
//! transformation of finite trigonometric blocks.

use serde::{Deserialize, Serialize};

use crate::classes::TailVariations;
use crate::error::{invalid, Error, Result};
use crate::fit::TailSum;
use crate::math::{cis_tx, compensated_sum, singular_distance, Neumaier, TWO_PI};
use crate::sequences::{CoefficientSequence, SeriesKind};
use crate::Complex64;

/// Default exclusion radius around `2πℤ/r`, as a fraction of the period.
pub const DEFAULT_EXCLUSION_FRACTION: f64 = 1e-6;

/// `Σ_{k=n}^{m} a_k cos kx` or `Σ_{k=n}^{m} a_k sin kx`.
#[derive(Debug, Clone)]
pub struct BlockSumRequest {
    pub seq: CoefficientSequence,
    pub n: u64,
    pub m: u64,
    pub r: u64,
    pub x: f64,
    pub kind: SeriesKind,
    /// Exclusion radius; `None` means `1e-6·2π/r`.
    pub epsilon: Option<f64>,
}

impl BlockSumRequest {
    pub fn new(seq: &CoefficientSequence, kind: SeriesKind, n: u64, m: u64, r: u64, x: f64) -> Self {
        BlockSumRequest { seq: seq.clone(), n, m, r, x, kind, epsilon: None }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(invalid("n", "block sums start at index 1"));
        }
        if self.m < self.n {
            return Err(invalid("m", "must satisfy m ≥ n"));
        }
        if self.r == 0 {
            return Err(invalid("r", "must be at least 1"));
        }
        if !self.x.is_finite() {
            return Err(invalid("x", "must be finite"));
        }
        if self.kind == SeriesKind::Exponential {
            return Err(invalid("kind", "block sums take the cos or sin form"));
        }
        Ok(())
    }

    pub fn exclusion_radius(&self) -> f64 {
        self.epsilon.unwrap_or(DEFAULT_EXCLUSION_FRACTION * TWO_PI / self.r as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Direct,
    Abel,
}

/// A block sum and, for the Abel form, its three bracketed parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockSumResult {
    pub value: Complex64,
    /// `Σ_{k=n}^{m} (a_k − a_{k+r}) trig((k + r/2)x)`
    pub difference: Complex64,
    /// `Σ_{k=m+1}^{m+r} a_k trig((k − r/2)x)`
    pub trailing: Complex64,
    /// `Σ_{k=n}^{n+r−1} a_k trig((k − r/2)x)`
    pub leading: Complex64,
    pub method: Method,
}

/// Complex compensated accumulator.
#[derive(Default)]
pub(crate) struct CSum {
    re: Neumaier,
    im: Neumaier,
}

impl CSum {
    #[inline]
    pub(crate) fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        if z.im != 0.0 {
            self.im.add(z.im);
        }
    }

    pub(crate) fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

#[inline]
fn trig(kind: SeriesKind, t: f64, x: f64) -> f64 {
    let (c, s) = cis_tx(t, x);
    if kind == SeriesKind::Cosine {
        c
    } else {
        s
    }
}

/// Direct accumulation in ascending index order.
pub fn direct_block_sum(req: &BlockSumRequest) -> Result<BlockSumResult> {
    req.validate()?;
    let mut acc = CSum::default();
    for k in req.n..=req.m {
        acc.add(req.seq.coeff(k) * trig(req.kind, k as f64, req.x));
    }
    let zero = Complex64::new(0.0, 0.0);
    Ok(BlockSumResult { value: acc.value(), difference: zero, trailing: zero, leading: zero, method: Method::Direct })
}

/// The `r`-step Abel transformation of the block.
///
/// ```
/// use gmseries::sequences::{CoefficientSequence, SeriesKind};
/// use gmseries::summation::{abel_block_sum, direct_block_sum, BlockSumRequest};
///
/// let req = BlockSumRequest::new(&CoefficientSequence::remark6(3).unwrap(), SeriesKind::Cosine, 6, 60, 3, 1.0);
/// let a = abel_block_sum(&req).unwrap().value.re;
/// let d = direct_block_sum(&req).unwrap().value.re;
/// assert!((a - d).abs() <= 1e-10 * d.abs());
/// ```
pub fn abel_block_sum(req: &BlockSumRequest) -> Result<BlockSumResult> {
    req.validate()?;
    let (n, m, r, x) = (req.n, req.m, req.r, req.x);
    let radius = req.exclusion_radius();
    if singular_distance(x, r) < radius {
        return Err(Error::SingularPoint { x, r, radius });
    }
    let (kind, seq) = (req.kind, &req.seq);
    let half = r as f64 / 2.0;
    let dual = if kind == SeriesKind::Cosine { SeriesKind::Sine } else { SeriesKind::Cosine };

    let mut diff = CSum::default();
    for k in n..=m {
        let d = seq.coeff(k) - seq.coeff(k + r);
        if d.re != 0.0 || d.im != 0.0 {
            diff.add(d * trig(dual, k as f64 + half, x));
        }
    }
    let mut trailing = CSum::default();
    for k in m + 1..=m + r {
        trailing.add(seq.coeff(k) * trig(dual, k as f64 - half, x));
    }
    let mut leading = CSum::default();
    for k in n..n + r {
        leading.add(seq.coeff(k) * trig(dual, k as f64 - half, x));
    }
    let (difference, trailing, leading) = (diff.value(), trailing.value(), leading.value());
    let sign = if kind == SeriesKind::Cosine { 1.0 } else { -1.0 };
    let denom = 2.0 * crate::math::sin_tx(half, x);
    let value = (difference + trailing - leading) * (sign / denom);
    Ok(BlockSumResult { value, difference, trailing, leading, method: Method::Abel })
}

/// A majorant of `|Σ_{k>n} a_k trig(kx)|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailBound {
    pub bound: f64,
    pub variation: TailSum,
    pub boundary: f64,
    /// The bound relies on the fitted variation remainder being an overestimate.
    pub fitted_assumption: bool,
}

/// `(Σ_{k>n}|a_k − a_{k+r}| + Σ_{k=n+1}^{n+r}|a_k|)/(2|sin(rx/2)|)`, with the
/// variation truncated at `horizon` plus a fitted remainder.
pub fn series_tail_bound(seq: &CoefficientSequence, n: u64, r: u64, x: f64, horizon: u64) -> Result<TailBound> {
    if r == 0 {
        return Err(invalid("r", "must be at least 1"));
    }
    let radius = DEFAULT_EXCLUSION_FRACTION * TWO_PI / r as f64;
    if singular_distance(x, r) < radius {
        return Err(Error::SingularPoint { x, r, radius });
    }
    let t = TailVariations::new(seq, n + 1, r, horizon.max(2 * (n + 1)))?;
    let variation = t.fit;
    if !variation.tail_estimate.is_finite() {
        return Err(Error::NoTailCertificate { from: n + 1 });
    }
    let boundary = compensated_sum((n + 1..=n + r).map(|k| seq.abs(k)));
    let s = crate::math::sin_tx(r as f64 / 2.0, x).abs();
    Ok(TailBound {
        bound: (variation.total() + boundary) / (2.0 * s),
        variation,
        boundary,
        fitted_assumption: variation.tail_estimate > 0.0,
    })
}

/// `S_n` at `x`: `a_0/2 + Σ_{k≤n} a_k cos kx`, `Σ_{k≤n} b_k sin kx`, or
/// `Σ_{|k|≤n} c_k e^{ikx}` with `c_{−k}` from the negative branch (zero if absent).
pub fn partial_sum(seq: &CoefficientSequence, kind: SeriesKind, n: u64, x: f64) -> Complex64 {
    weighted_sum(seq, kind, n, x, |_| 1.0)
}

/// `V_n = (1/(n+1)) Σ_{j=0}^{n} S_j`, via the weights `1 − k/(n+1)`.
pub fn vallee_poussin(seq: &CoefficientSequence, kind: SeriesKind, n: u64, x: f64) -> Complex64 {
    let d = (n + 1) as f64;
    weighted_sum(seq, kind, n, x, |k| (n + 1 - k) as f64 / d)
}

fn weighted_sum(seq: &CoefficientSequence, kind: SeriesKind, n: u64, x: f64, w: impl Fn(u64) -> f64) -> Complex64 {
    let mut acc = CSum::default();
    match kind {
        SeriesKind::Cosine => acc.add(seq.constant_term() * 0.5),
        SeriesKind::Exponential => acc.add(seq.constant_term()),
        SeriesKind::Sine => {}
    }
    let neg = seq.negative();
    for k in 1..=n {
        let (c, s) = cis_tx(k as f64, x);
        let wk = w(k);
        match kind {
            SeriesKind::Cosine => acc.add(seq.coeff(k) * (wk * c)),
            SeriesKind::Sine => acc.add(seq.coeff(k) * (wk * s)),
            SeriesKind::Exponential => {
                acc.add(seq.coeff(k) * Complex64::new(wk * c, wk * s));
                if let Some(neg) = neg {
                    acc.add(neg.coeff(k) * Complex64::new(wk * c, -wk * s));
                }
            }
        }
    }
    acc.value()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::PI;
    use alloc::vec;
    use alloc::vec::Vec;
    use proptest::prelude::*;

    fn req(seq: &CoefficientSequence, kind: SeriesKind, n: u64, m: u64, r: u64, x: f64) -> BlockSumRequest {
        BlockSumRequest::new(seq, kind, n, m, r, x)
    }

    #[test]
    fn direct_examples() {
        let z = CoefficientSequence::zero();
        assert_eq!(direct_block_sum(&req(&z, SeriesKind::Sine, 1, 50, 1, 0.3)).unwrap().value.re, 0.0);
        let one = CoefficientSequence::constant(1.0);
        let v = direct_block_sum(&req(&one, SeriesKind::Cosine, 1, 5, 1, PI / 3.0)).unwrap().value.re;
        assert!((v + 1.0).abs() < 1e-14);
        let h = CoefficientSequence::harmonic();
        let v = direct_block_sum(&req(&h, SeriesKind::Sine, 1, 10_000, 1, 1.0)).unwrap().value.re;
        assert!((v - 1.070_868_194_833_174_4).abs() < 1e-12, "{v}");
        assert!(direct_block_sum(&req(&h, SeriesKind::Sine, 5, 4, 1, 1.0)).is_err());
        assert!(direct_block_sum(&req(&h, SeriesKind::Exponential, 1, 4, 1, 1.0)).is_err());
    }

    #[test]
    fn abel_examples() {
        let one = CoefficientSequence::constant(1.0);
        let res = abel_block_sum(&req(&one, SeriesKind::Cosine, 1, 5, 1, PI / 3.0)).unwrap();
        assert_eq!(res.difference, Complex64::new(0.0, 0.0));
        assert!((res.value.re + 1.0).abs() < 1e-14);
        let d = CoefficientSequence::remark6(3).unwrap();
        for kind in [SeriesKind::Cosine, SeriesKind::Sine] {
            let r = req(&d, kind, 6, 60, 3, 1.0);
            let a = abel_block_sum(&r).unwrap().value.re;
            let b = direct_block_sum(&r).unwrap().value.re;
            assert!((a - b).abs() <= 1e-10 * b.abs(), "{a} {b}");
        }
        let err = abel_block_sum(&req(&one, SeriesKind::Cosine, 1, 5, 3, 2.0 * PI / 3.0 + 1e-9));
        assert!(matches!(err, Err(Error::SingularPoint { .. })));
    }

    #[test]
    fn abel_r1_is_classical_summation_by_parts() {
        let h = CoefficientSequence::harmonic();
        let (n, m, x) = (3u64, 40u64, 0.7);
        // Σ a_k cos kx = Σ (a_k − a_{k+1}) D_k + a_{m+1} D_m − a_n D_{n−1},
        // D_k = sin((k+1/2)x)/(2 sin(x/2)), the conjugate Dirichlet form
        let dk = |k: u64| crate::math::sin((k as f64 + 0.5) * x) / (2.0 * crate::math::sin(x / 2.0));
        let mut acc = Neumaier::new();
        for k in n..=m {
            acc.add((h.re(k) - h.re(k + 1)) * dk(k));
        }
        acc.add(h.re(m + 1) * dk(m) - h.re(n) * dk(n - 1));
        let a = abel_block_sum(&req(&h, SeriesKind::Cosine, n, m, 1, x)).unwrap().value.re;
        assert!((a - acc.value()).abs() < 1e-14);
    }

    fn brute_tail(seq: &CoefficientSequence, kind: SeriesKind, n: u64, x: f64, to: u64) -> f64 {
        compensated_sum((n + 1..=to).map(|k| seq.re(k) * trig(kind, k as f64, x)))
    }

    #[test]
    fn tail_bound_examples() {
        let z = CoefficientSequence::zero();
        assert_eq!(series_tail_bound(&z, 10, 2, 1.0, 1000).unwrap().bound, 0.0);
        let d = CoefficientSequence::remark6(3).unwrap();
        let tb = series_tail_bound(&d, 30, 3, 1.0, 100_000).unwrap();
        let actual = brute_tail(&d, SeriesKind::Cosine, 30, 1.0, 1_000_000).abs();
        assert!(tb.bound >= actual, "{} < {actual}", tb.bound);
        let s = CoefficientSequence::remark5_sin();
        let tb = series_tail_bound(&s, 20, 2, PI / 2.0, 1 << 20).unwrap();
        assert!(tb.bound.is_finite());
        assert!(tb.bound >= brute_tail(&s, SeriesKind::Sine, 20, PI / 2.0, 4_000_000).abs());
        let flat = CoefficientSequence::explicit((1..=4000).map(|k| if k % 2 == 0 { 1.0 } else { 0.0 }).collect()).unwrap();
        assert!(series_tail_bound(&flat, 10, 1, 1.0, 3000).is_err());
        assert!(series_tail_bound(&d, 10, 3, 0.0, 1000).is_err());
    }

    #[test]
    fn partial_sums() {
        let z = CoefficientSequence::zero();
        assert_eq!(partial_sum(&z, SeriesKind::Cosine, 9, 0.4).re, 0.0);
        let c = CoefficientSequence::zero().with_constant_term(Complex64::new(2.0, 0.0));
        assert_eq!(partial_sum(&c, SeriesKind::Cosine, 7, 1.3).re, 1.0);
        let d = CoefficientSequence::explicit(vec![0.0, 0.0, 1.0]).unwrap();
        assert!((partial_sum(&d, SeriesKind::Sine, 5, PI / 6.0).re - 1.0).abs() < 1e-15);
        assert_eq!(partial_sum(&d, SeriesKind::Sine, 0, PI / 6.0).re, 0.0);
        let h = CoefficientSequence::harmonic();
        let e = h.exponential_form(SeriesKind::Cosine);
        let x = 0.9;
        let a = partial_sum(&h, SeriesKind::Cosine, 30, x);
        let b = partial_sum(&e, SeriesKind::Exponential, 30, x);
        assert!((a - b).norm() < 1e-14);
        let e = h.exponential_form(SeriesKind::Sine);
        let b = partial_sum(&e, SeriesKind::Exponential, 30, x);
        assert!((partial_sum(&h, SeriesKind::Sine, 30, x) - b).norm() < 1e-14);
    }

    #[test]
    fn vallee_poussin_examples() {
        let h = CoefficientSequence::harmonic().with_constant_term(Complex64::new(0.7, 0.0));
        assert_eq!(vallee_poussin(&h, SeriesKind::Cosine, 0, 1.0), partial_sum(&h, SeriesKind::Cosine, 0, 1.0));
        let c = CoefficientSequence::zero().with_constant_term(Complex64::new(3.0, 0.0));
        assert_eq!(vallee_poussin(&c, SeriesKind::Cosine, 12, 0.2).re, 1.5);
        let h = CoefficientSequence::harmonic();
        let literal = compensated_sum((0..=16).map(|k| partial_sum(&h, SeriesKind::Cosine, k, 1.0).re)) / 17.0;
        assert!((vallee_poussin(&h, SeriesKind::Cosine, 16, 1.0).re - literal).abs() < 1e-13);
    }

    fn seq_strategy() -> impl Strategy<Value = CoefficientSequence> {
        prop_oneof![
            Just(CoefficientSequence::harmonic()),
            Just(CoefficientSequence::remark5_cos()),
            Just(CoefficientSequence::remark6(3).unwrap()),
            Just(CoefficientSequence::constant(1.0)),
            prop::collection::vec(-1.0f64..1.0, 1..300).prop_map(|v| CoefficientSequence::explicit(v).unwrap()),
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn lemma1_identity(
            seq in seq_strategy(),
            r in prop::sample::select(vec![1u64, 2, 3, 5, 7]),
            n in 1u64..10_000,
            len in 0u64..3_000,
            x in -PI..PI,
            cos in any::<bool>(),
        ) {
            let m = (n + len).min(10_000);
            let kind = if cos { SeriesKind::Cosine } else { SeriesKind::Sine };
            let rq = req(&seq, kind, n, m, r, x);
            prop_assume!(singular_distance(x, r) >= rq.exclusion_radius());
            let a = abel_block_sum(&rq).unwrap().value.re;
            let d = direct_block_sum(&rq).unwrap().value.re;
            prop_assert!((a - d).abs() <= 1e-10 * (1.0 + d.abs()), "abel {} direct {}", a, d);
        }

        #[test]
        fn sums_are_linear(
            u in prop::collection::vec(-1.0f64..1.0, 1..200),
            v in prop::collection::vec(-1.0f64..1.0, 1..200),
            x in -PI..PI,
            n in 1u64..250,
        ) {
            let len = u.len().max(v.len());
            let w: Vec<f64> = (0..len).map(|i| u.get(i).unwrap_or(&0.0) + v.get(i).unwrap_or(&0.0)).collect();
            let (a, b, c) = (
                CoefficientSequence::explicit(u).unwrap(),
                CoefficientSequence::explicit(v).unwrap(),
                CoefficientSequence::explicit(w).unwrap(),
            );
            for kind in [SeriesKind::Cosine, SeriesKind::Sine] {
                let s = partial_sum(&a, kind, n, x) + partial_sum(&b, kind, n, x);
                prop_assert!((s - partial_sum(&c, kind, n, x)).norm() < 1e-12);
                let s = vallee_poussin(&a, kind, n, x) + vallee_poussin(&b, kind, n, x);
                prop_assert!((s - vallee_poussin(&c, kind, n, x)).norm() < 1e-12);
                if singular_distance(x, 2) > 1e-3 {
                    let r = |q: &CoefficientSequence| abel_block_sum(&req(q, kind, 1, n, 2, x)).unwrap().value;
                    prop_assert!((r(&a) + r(&b) - r(&c)).norm() < 1e-9 * (1.0 + r(&c).norm()));
                }
            }
        }

        #[test]
        fn tail_bound_is_sound(
            n in 4u64..200,
            x in 0.05f64..(PI - 0.05),
            harmonic in any::<bool>(),
        ) {
            let (seq, r) = if harmonic {
                (CoefficientSequence::harmonic(), 1)
            } else {
                (CoefficientSequence::remark6(3).unwrap(), 3)
            };
            prop_assume!(singular_distance(x, r) > 0.05);
            let tb = series_tail_bound(&seq, n, r, x, 1 << 16).unwrap();
            // brute force with the exact remainder of the Abel form beyond the horizon
            let to = 1u64 << 18;
            let mut head = brute_tail(&seq, SeriesKind::Cosine, n, x, to);
            let tail_bound = seq.abs(to + 1) / crate::math::sin_tx(0.5, x).abs();
            head = head.abs() - tail_bound;
            prop_assert!(tb.bound >= head, "{} < {}", tb.bound, head);
        }
    }
}
