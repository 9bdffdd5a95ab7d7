//! Log-log trend fits, finite-evidence verdicts and power-law tail estimates.

use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::math::{exp, ln, pow, sqrt, Neumaier};

/// Least-squares fit of `log y` against `log x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub stderr: f64,
    pub points: usize,
}

/// Fits `ln y = intercept + slope·ln x` over the points with `x, y > 0` and finite.
pub fn loglog_fit(xs: &[f64], ys: &[f64]) -> Option<SlopeFit> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0 && x.is_finite() && y.is_finite())
        .map(|(x, y)| (ln(*x), ln(*y)))
        .collect();
    linear_fit(&pts)
}

fn linear_fit(pts: &[(f64, f64)]) -> Option<SlopeFit> {
    let n = pts.len();
    if n < 2 {
        return None;
    }
    let nf = n as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let stderr = if n > 2 {
        let rss: f64 = pts
            .iter()
            .map(|p| {
                let e = p.1 - intercept - slope * p.0;
                e * e
            })
            .sum();
        sqrt(rss / (nf - 2.0) / sxx)
    } else {
        0.0
    };
    Some(SlopeFit { slope, intercept, stderr, points: n })
}

/// Thresholds used to turn a finite table into a verdict.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrendPolicy {
    /// Ratios whose log-log slope exceeds this are judged growing.
    pub slope_threshold: f64,
    /// Values whose log-log slope is below `-decay_threshold` are judged vanishing.
    pub decay_threshold: f64,
    /// Minimal span of the grid in decades.
    pub min_decades: f64,
    /// Minimal number of grid points.
    pub min_points: usize,
}

impl Default for TrendPolicy {
    fn default() -> Self {
        Self { slope_threshold: 0.2, decay_threshold: 0.1, min_decades: 2.0, min_points: 3 }
    }
}

impl TrendPolicy {
    fn grid_is_informative(&self, grid: &[u64]) -> bool {
        if grid.len() < self.min_points {
            return false;
        }
        let (lo, hi) = (grid[0] as f64, grid[grid.len() - 1] as f64);
        libm::log10(hi / lo) >= self.min_decades - 1e-12
    }

    /// Bounded-versus-growing judgement for a ratio column.
    pub fn growth(&self, grid: &[u64], ratios: &[f64]) -> (Trend, Option<SlopeFit>) {
        if ratios.iter().any(|r| r.is_infinite()) {
            return (Trend::Unbounded, None);
        }
        if !self.grid_is_informative(grid) {
            return (Trend::Inconclusive, None);
        }
        let xs: Vec<f64> = grid.iter().map(|&n| n as f64).collect();
        let Some(fit) = loglog_fit(&xs, ratios) else {
            return (Trend::Bounded, None);
        };
        if fit.slope > self.slope_threshold && fit.slope - 2.0 * fit.stderr > 0.0 {
            (Trend::Unbounded, Some(fit))
        } else {
            (Trend::Bounded, Some(fit))
        }
    }

    /// Vanishing-versus-persistent judgement for a value column.
    pub fn decay(&self, grid: &[u64], values: &[f64]) -> (Trend, Option<SlopeFit>) {
        if !self.grid_is_informative(grid) {
            return (Trend::Inconclusive, None);
        }
        if values.iter().all(|v| *v == 0.0) {
            return (Trend::Vanishing, None);
        }
        if values.iter().any(|v| !v.is_finite()) {
            return (Trend::Inconclusive, None);
        }
        let xs: Vec<f64> = grid.iter().map(|&n| n as f64).collect();
        let Some(fit) = loglog_fit(&xs, values) else {
            return (Trend::Inconclusive, None);
        };
        let positive: Vec<f64> = values.iter().copied().filter(|v| *v > 0.0).collect();
        let shrinking = positive.last() < positive.first();
        if fit.slope < -self.decay_threshold && fit.slope + 2.0 * fit.stderr < 0.0 && shrinking {
            (Trend::Vanishing, Some(fit))
        } else {
            (Trend::Persistent, Some(fit))
        }
    }
}

/// Finite-evidence verdict on a column of a grid table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trend {
    /// Ratios stay bounded on the grid.
    Bounded,
    /// Ratios grow (fitted slope above threshold, or an infinite ratio).
    Unbounded,
    /// Values tend to zero (the o(1) verdict).
    Vanishing,
    /// Values do not tend to zero.
    Persistent,
    /// Too little data for a trend fit.
    Inconclusive,
}

/// A power-law model `s_k ≈ C k^{-α}` of the last decade of summands.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailFit {
    /// Fitted decay exponent α; `+∞` when the summands vanish identically.
    pub exponent: f64,
    /// `C` in `C k^{-α}`.
    pub scale: f64,
    /// Estimate of `Σ_{k>hi} s_k`; `+∞` when α is not clearly above 1.
    pub estimate: f64,
}

impl TailFit {
    pub const ZERO: TailFit = TailFit { exponent: f64::INFINITY, scale: 0.0, estimate: 0.0 };

    /// Estimate of `Σ_{k=from}^{∞} s_k` for `from` beyond the fitted window.
    pub fn sum_from(&self, from: f64) -> f64 {
        if self.scale == 0.0 {
            return 0.0;
        }
        if self.exponent <= MIN_SUMMABLE_EXPONENT {
            return f64::INFINITY;
        }
        self.scale * pow(from - 0.5, 1.0 - self.exponent) / (self.exponent - 1.0)
    }

    /// Estimate of `Σ_{k=a}^{b} s_k` from the model.
    pub fn sum_between(&self, a: f64, b: f64) -> f64 {
        if self.scale == 0.0 || b < a {
            return 0.0;
        }
        let (lo, hi) = (a - 0.5, b + 0.5);
        if (self.exponent - 1.0).abs() < 1e-12 {
            return self.scale * ln(hi / lo);
        }
        let e = 1.0 - self.exponent;
        self.scale * (pow(hi, e) - pow(lo, e)) / e
    }

    pub fn value_at(&self, k: f64) -> f64 {
        self.scale * pow(k, -self.exponent)
    }
}

const TAIL_BLOCKS: usize = 16;

/// Fitted exponents at or below this are treated as divergent.
pub const MIN_SUMMABLE_EXPONENT: f64 = 1.01;

/// Fits a power law to the summands `s[i] = s_{first+i}` over the last decade
/// of the range and extrapolates `Σ_{k>hi} s_k`.
pub fn fit_tail(first: u64, summands: &[f64]) -> TailFit {
    if summands.is_empty() {
        return TailFit::ZERO;
    }
    let hi = first + summands.len() as u64 - 1;
    let lo = (hi / 10).max(first);
    let window = &summands[(lo - first) as usize..];
    let len = window.len();
    let blocks = TAIL_BLOCKS.min(len);
    let mut pts = Vec::with_capacity(blocks);
    let ratio = (hi as f64 + 1.0) / lo as f64;
    let mut start = lo;
    for b in 0..blocks {
        let mut end = if b + 1 == blocks {
            hi + 1
        } else {
            (lo as f64 * pow(ratio, (b + 1) as f64 / blocks as f64)) as u64
        };
        end = end.max(start + 1).min(hi + 1);
        if start >= end {
            continue;
        }
        let mut acc = Neumaier::new();
        for k in start..end {
            acc.add(summands[(k - first) as usize].abs());
        }
        let mean = acc.value() / (end - start) as f64;
        if mean > 0.0 {
            let centre = sqrt(start as f64 * (end - 1) as f64);
            pts.push((ln(centre), ln(mean)));
        }
        start = end;
    }
    let Some(last_nonzero) = window.iter().rposition(|s| *s != 0.0) else {
        return TailFit::ZERO;
    };
    if len >= 8 && last_nonzero < len * 3 / 4 {
        // the summands stop well inside the window: finite support
        return TailFit::ZERO;
    }
    match linear_fit(&pts) {
        Some(fit) => {
            let exponent = -fit.slope;
            let scale = exp(fit.intercept);
            let model = TailFit { exponent, scale, estimate: 0.0 };
            TailFit { estimate: model.sum_from(hi as f64 + 1.0), ..model }
        }
        None => TailFit { exponent: 0.0, scale: exp(pts[0].1), estimate: f64::INFINITY },
    }
}

/// A truncated series with a fitted remainder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailSum {
    /// The partial sum up to the horizon.
    pub value: f64,
    /// The fitted estimate of the remainder beyond the horizon.
    pub tail_estimate: f64,
    /// Decay exponent of the fitted summands.
    pub fitted_exponent: f64,
    pub summable: bool,
}

/// Relative size of the fitted remainder above which partial sums are not
/// considered Cauchy.
pub const CAUCHY_REL_TOL: f64 = 0.05;

impl TailSum {
    pub fn from_summands(first: u64, summands: &[f64]) -> TailSum {
        let value = crate::math::compensated_sum(summands.iter().copied());
        let fit = fit_tail(first, summands);
        let summable = fit.estimate.is_finite()
            && fit.exponent > MIN_SUMMABLE_EXPONENT
            && fit.estimate <= CAUCHY_REL_TOL * value.abs().max(f64::MIN_POSITIVE);
        let summable = summable || (fit.estimate == 0.0 && value.is_finite());
        TailSum { value, tail_estimate: fit.estimate, fitted_exponent: fit.exponent, summable }
    }

    pub fn total(&self) -> f64 {
        self.value + self.tail_estimate
    }
}

/// Serde adapter writing non-finite floats as `"inf"`, `"-inf"` or `"nan"`.
pub mod float_serde {
    use alloc::string::String;
    use serde::{Deserialize, Deserializer, Serializer};

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    fn to_repr<S: Serializer>(v: f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    fn parse<E: serde::de::Error>(r: Repr) -> Result<f64, E> {
        match r {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) => match t.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                _ => Err(E::custom("expected a number, \"inf\", \"-inf\" or \"nan\"")),
            },
        }
    }

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        to_repr(*v, s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        parse(Repr::deserialize(d)?)
    }

    /// The same convention for `Vec<f64>`.
    pub mod vec {
        use alloc::vec::Vec;
        use serde::ser::SerializeSeq;
        use serde::{Deserialize, Deserializer, Serializer};

        struct Item(f64);

        impl serde::Serialize for Item {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                super::to_repr(self.0, s)
            }
        }

        pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for x in v {
                seq.serialize_element(&Item(*x))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
            let raw = Vec::<super::Repr>::deserialize(d)?;
            raw.into_iter().map(super::parse).collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn slope_of_exact_power_law() {
        let xs: Vec<f64> = (4..12).map(|k| (1u64 << k) as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * pow(*x, 1.5)).collect();
        let f = loglog_fit(&xs, &ys).unwrap();
        assert!((f.slope - 1.5).abs() < 1e-12);
        assert!(f.stderr < 1e-10);
    }

    #[test]
    fn growth_verdicts() {
        let p = TrendPolicy::default();
        let grid: Vec<u64> = (4..=12).map(|k| 1u64 << k).collect();
        let flat = vec![0.5; grid.len()];
        assert_eq!(p.growth(&grid, &flat).0, Trend::Bounded);
        let lin: Vec<f64> = grid.iter().map(|&n| n as f64).collect();
        assert_eq!(p.growth(&grid, &lin).0, Trend::Unbounded);
        assert_eq!(p.growth(&grid[..1], &lin[..1]).0, Trend::Inconclusive);
        let mut inf = flat.clone();
        inf[3] = f64::INFINITY;
        assert_eq!(p.growth(&grid, &inf).0, Trend::Unbounded);
    }

    #[test]
    fn decay_verdicts() {
        let p = TrendPolicy::default();
        let grid: Vec<u64> = (4..=12).map(|k| 1u64 << k).collect();
        let harmonic: Vec<f64> = grid.iter().map(|&n| ln(n as f64) / n as f64).collect();
        assert_eq!(p.decay(&grid, &harmonic).0, Trend::Vanishing);
        let flat: Vec<f64> = grid.iter().map(|&n| ln(n as f64) / ln(n as f64 + 1.0)).collect();
        assert_eq!(p.decay(&grid, &flat).0, Trend::Persistent);
        assert_eq!(p.decay(&grid, &vec![0.0; grid.len()]).0, Trend::Vanishing);
    }

    #[test]
    fn tail_of_inverse_squares() {
        let first = 1u64;
        let s: Vec<f64> = (1..=100_000u64).map(|k| 1.0 / (k as f64 * k as f64)).collect();
        let ts = TailSum::from_summands(first, &s);
        assert!((ts.fitted_exponent - 2.0).abs() < 1e-3);
        assert!((ts.total() - core::f64::consts::PI * core::f64::consts::PI / 6.0).abs() < 1e-8);
        assert!(ts.summable);
    }

    #[test]
    fn tail_of_harmonic_diverges() {
        let s: Vec<f64> = (1..=100_000u64).map(|k| 1.0 / k as f64).collect();
        let ts = TailSum::from_summands(1, &s);
        assert!(!ts.summable);
        assert!(ts.tail_estimate.is_infinite());
    }

    #[test]
    fn sparse_summands_use_block_density() {
        let s: Vec<f64> =
            (1..=100_000u64).map(|k| if k % 3 == 0 { 1.0 / (k * k * k) as f64 } else { 0.0 }).collect();
        let ts = TailSum::from_summands(1, &s);
        let exact = 1.202_056_903_159_594_3 / 27.0;
        assert!((ts.total() - exact).abs() < 1e-12);
    }

    #[test]
    fn finite_support_has_zero_tail() {
        let mut s = vec![0.0; 10_000];
        s[..50].iter_mut().for_each(|v| *v = 1.0);
        assert_eq!(fit_tail(1, &s).estimate, 0.0);
    }
}

#[cfg(test)]
mod serde_tests {
    use super::*;

    #[derive(Serialize, Deserialize)]
    struct Row {
        #[serde(with = "float_serde")]
        a: f64,
        #[serde(with = "float_serde::vec")]
        b: Vec<f64>,
    }

    #[test]
    fn non_finite_round_trip() {
        let r = Row { a: f64::INFINITY, b: alloc::vec![1.5, f64::NEG_INFINITY] };
        let j = serde_json::to_string(&r).unwrap();
        assert_eq!(j, r#"{"a":"inf","b":[1.5,"-inf"]}"#);
        let back: Row = serde_json::from_str(&j).unwrap();
        assert!(back.a.is_infinite() && back.b[1] == f64::NEG_INFINITY);
    }
}
