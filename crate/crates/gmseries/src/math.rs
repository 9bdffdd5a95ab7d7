//! Floating point helpers: compensated sums, accurate `cos(kx)`/`sin(kx)`
//! for large `k`, and fast evaluation of sparse trigonometric polynomials.

use num_complex::Complex64;

pub const PI: f64 = core::f64::consts::PI;
pub const TWO_PI: f64 = core::f64::consts::TAU;
const TWO_PI_LO: f64 = 2.449_293_598_294_706_4e-16;

#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn sin(x: f64) -> f64 {
    libm::sin(x)
}

#[inline]
pub fn cos(x: f64) -> f64 {
    libm::cos(x)
}

#[inline]
pub fn floor(x: f64) -> f64 {
    libm::floor(x)
}

#[inline]
pub fn pow(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

#[inline]
pub fn hypot(x: f64, y: f64) -> f64 {
    libm::hypot(x, y)
}

/// Neumaier's improved Kahan summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub const fn new() -> Self {
        Self { sum: 0.0, comp: 0.0 }
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }

    /// The running sum and its compensation term.
    pub fn parts(&self) -> (f64, f64) {
        (self.sum, self.comp)
    }
}

impl core::iter::FromIterator<f64> for Neumaier {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Neumaier::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Compensated sum of an iterator, in iteration order.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<Neumaier>().value()
}

/// Compensated prefix sums over `[start, end]`.
pub(crate) struct Prefix {
    start: u64,
    hi: alloc::vec::Vec<f64>,
    lo: alloc::vec::Vec<f64>,
}

impl Prefix {
    pub(crate) fn new(start: u64, values: impl Iterator<Item = f64>) -> Self {
        let mut hi = alloc::vec![0.0];
        let mut lo = alloc::vec![0.0];
        let mut acc = Neumaier::new();
        for v in values {
            acc.add(v);
            let (h, l) = acc.parts();
            hi.push(h);
            lo.push(l);
        }
        Prefix { start, hi, lo }
    }

    /// `Σ_{k=a}^{b}` for `start ≤ a`, `b ≤ end`; empty ranges give 0.
    pub(crate) fn sum(&self, a: u64, b: u64) -> f64 {
        if b < a {
            return 0.0;
        }
        let i = (a - self.start) as usize;
        let j = (b - self.start + 1) as usize;
        (self.hi[j] - self.hi[i]) + (self.lo[j] - self.lo[i])
    }
}

#[inline]
fn split(a: f64) -> (f64, f64) {
    let c = 134_217_729.0 * a;
    let hi = c - (c - a);
    (hi, a - hi)
}

/// Error-free product: `a*b = p + e` exactly (Dekker).
#[inline]
pub fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    let e = ((ah * bh - p) + ah * bl + al * bh) + al * bl;
    (p, e)
}

/// Reduces `t*x` into `[-π, π]` as an unevaluated pair `hi + lo`.
#[inline]
pub fn reduce_tx(t: f64, x: f64) -> (f64, f64) {
    let (p, e) = two_prod(t, x);
    if p.abs() <= PI {
        let hi = p + e;
        return (hi, e - (hi - p));
    }
    let q = libm::round(p / TWO_PI);
    let (h, l) = two_prod(q, TWO_PI);
    let hi = p - h;
    let lo = e - l - q * TWO_PI_LO;
    let s = hi + lo;
    (s, lo - (s - hi))
}

/// `(cos(t x), sin(t x))` with the product formed and reduced in extra precision.
#[inline]
pub fn cis_tx(t: f64, x: f64) -> (f64, f64) {
    let (hi, lo) = reduce_tx(t, x);
    let (s, c) = libm::sincos(hi);
    (c - lo * s, s + lo * c)
}

#[inline]
pub fn cos_tx(t: f64, x: f64) -> f64 {
    cis_tx(t, x).0
}

#[inline]
pub fn sin_tx(t: f64, x: f64) -> f64 {
    cis_tx(t, x).1
}

/// Distance from `x` to the nearest point of `2πℤ/r`.
pub fn singular_distance(x: f64, r: u64) -> f64 {
    let period = TWO_PI / r as f64;
    let k = libm::round(x / period);
    let (hi, lo) = two_prod(k, period);
    ((x - hi) - lo).abs()
}

/// Number of terms between accurate re-anchoring of the rotation recurrence.
const ANCHOR: usize = 64;

/// A trigonometric polynomial `Σ c_j e^{i k_j x}` with ascending frequencies.
#[derive(Debug, Clone, Default)]
pub struct TrigPoly {
    freqs: alloc::vec::Vec<u64>,
    coeffs: alloc::vec::Vec<Complex64>,
}

impl TrigPoly {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a term; frequencies must be pushed in ascending order.
    pub fn push(&mut self, k: u64, c: Complex64) {
        debug_assert!(self.freqs.last().is_none_or(|&last| last < k));
        if c != Complex64::new(0.0, 0.0) {
            self.freqs.push(k);
            self.coeffs.push(c);
        }
    }

    pub fn len(&self) -> usize {
        self.freqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freqs.is_empty()
    }

    pub fn degree(&self) -> u64 {
        self.freqs.last().copied().unwrap_or(0)
    }

    /// Sum of coefficient moduli, a bound on the sup norm.
    pub fn abs_sum(&self) -> f64 {
        compensated_sum(self.coeffs.iter().map(|c| c.norm()))
    }

    /// Evaluates `Σ c_j e^{i k_j x}` by a rotation recurrence anchored every
    /// few dozen terms with an accurately reduced `cis`.
    pub fn eval(&self, x: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut z = Complex64::new(1.0, 0.0);
        let mut prev = 0u64;
        let mut step_gap = 0u64;
        let mut step = Complex64::new(1.0, 0.0);
        for (j, (&k, &c)) in self.freqs.iter().zip(&self.coeffs).enumerate() {
            if j % ANCHOR == 0 {
                let (cr, si) = cis_tx(k as f64, x);
                z = Complex64::new(cr, si);
            } else {
                let gap = k - prev;
                if gap != step_gap {
                    let (cr, si) = cis_tx(gap as f64, x);
                    step = Complex64::new(cr, si);
                    step_gap = gap;
                }
                z *= step;
            }
            prev = k;
            acc += c * z;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neumaier_recovers_cancelled_terms() {
        let v = [1.0, 1e100, 1.0, -1e100];
        assert_eq!(compensated_sum(v), 2.0);
    }

    #[test]
    fn two_prod_is_exact() {
        let a = 1.0 + libm::ldexp(1.0, -30);
        let (p, e) = two_prod(a, a);
        assert_eq!(p, 1.0 + libm::ldexp(1.0, -29));
        assert_eq!(e, libm::ldexp(1.0, -60));
    }

    #[test]
    fn cis_matches_naive_for_small_arguments() {
        for &(t, x) in &[(1.0, 0.3), (3.0, -2.0), (7.0, 1.1)] {
            let (c, s) = cis_tx(t, x);
            assert!((c - libm::cos(t * x)).abs() < 1e-15);
            assert!((s - libm::sin(t * x)).abs() < 1e-15);
        }
    }

    #[test]
    fn cis_large_arguments_match_high_precision() {
        let cases = [
            (1.0e6, PI / 3.0, -0.500_000_000_099_451_264_17, -0.866_025_403_727_020_432_62),
            (987_654.0, 2.5, 0.967_937_391_475_631_004_29, 0.251_191_572_675_818_589_1),
            (15_002.0, 0.123_456_7, 0.128_190_399_523_663_537_91, -0.991_749_575_986_782_826_21),
            (300_007.0, 3.0, 0.254_992_552_691_835_885_29, -0.966_943_016_972_407_376_42),
        ];
        for (t, x, c, s) in cases {
            let (cc, ss) = cis_tx(t, x);
            assert!((cc - c).abs() < 1e-15, "{t} {x}: {cc} vs {c}");
            assert!((ss - s).abs() < 1e-15, "{t} {x}: {ss} vs {s}");
        }
    }

    #[test]
    fn singular_distance_basic() {
        assert!(singular_distance(TWO_PI / 3.0, 3) < 1e-15);
        assert!((singular_distance(1.0, 1) - 1.0).abs() < 1e-15);
        assert!((singular_distance(PI, 2) - 0.0).abs() < 1e-15);
    }

    #[test]
    fn trig_poly_matches_direct() {
        let mut p = TrigPoly::new();
        for k in (1..2000u64).step_by(3) {
            p.push(k, Complex64::new(1.0 / k as f64, 0.5 / k as f64));
        }
        let x = 0.7312;
        let v = p.eval(x);
        let mut re = Neumaier::new();
        let mut im = Neumaier::new();
        for k in (1..2000u64).step_by(3) {
            let (c, s) = cis_tx(k as f64, x);
            let a = Complex64::new(1.0 / k as f64, 0.5 / k as f64) * Complex64::new(c, s);
            re.add(a.re);
            im.add(a.im);
        }
        assert!((v.re - re.value()).abs() < 1e-13);
        assert!((v.im - im.value()).abs() < 1e-13);
    }
}
