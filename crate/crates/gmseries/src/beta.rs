//! The majorant functionals ₁β…₆β and custom majorants.

use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, Error, Result};
use crate::fit::TailSum;
use crate::math::{floor, ln, pow, Prefix};
use crate::sequences::CoefficientSequence;

pub const DEFAULT_N: u64 = 1;
pub const DEFAULT_C: f64 = 2.0;
pub const DEFAULT_B6_HORIZON: u64 = 1 << 16;

type CustomFn = Arc<dyn Fn(&CoefficientSequence, u64) -> f64 + Send + Sync>;

/// A user-supplied majorant `(seq, n) ↦ β_n ≥ 0`.
#[derive(Clone)]
pub struct CustomBeta {
    label: String,
    f: CustomFn,
}

impl CustomBeta {
    pub fn new<F>(label: &str, f: F) -> Self
    where
        F: Fn(&CoefficientSequence, u64) -> f64 + Send + Sync + 'static,
    {
        CustomBeta { label: label.to_string(), f: Arc::new(f) }
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

impl fmt::Debug for CustomBeta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CustomBeta({})", self.label)
    }
}

/// Selects a β functional.
#[derive(Debug, Clone)]
pub enum BetaSpec {
    /// `|a_n|`
    B1,
    /// `Σ_{k=n}^{n+N} |a_k|`
    B2 { n_terms: u64 },
    /// `Σ_{ν=0}^{N} |a_{⌊c^ν n⌋}|`
    B3 { n_terms: u64, c: f64, strict_integer: bool },
    /// `|a_n| + Σ_{k=n+1}^{[cn]} |a_k|/k`
    B4 { c: f64 },
    /// `Σ_{k=[n/c]}^{[cn]} |a_k|/k`
    B5 { c: f64 },
    /// `(1/ln n) max_{[n/c] ≤ m ≤ horizon} (ln m/m) Σ_{k=m}^{2m} |a_k|`
    B6 { c: f64, horizon: u64 },
    Custom(CustomBeta),
}

impl BetaSpec {
    pub fn b5(c: f64) -> Self {
        BetaSpec::B5 { c }
    }

    pub fn b6(c: f64, horizon: u64) -> Self {
        BetaSpec::B6 { c, horizon }
    }

    /// Checks parameter ranges.
    pub fn validate(&self) -> Result<()> {
        let check_c = |c: f64| {
            if c > 1.0 && c.is_finite() {
                Ok(())
            } else {
                Err(invalid("c", "must be a finite real > 1"))
            }
        };
        match self {
            BetaSpec::B3 { c, strict_integer, .. } => {
                check_c(*c)?;
                if *strict_integer && floor(*c) != *c {
                    return Err(invalid("c", "b3 in strict-integer mode requires an integer c"));
                }
                Ok(())
            }
            BetaSpec::B4 { c } | BetaSpec::B5 { c } => check_c(*c),
            BetaSpec::B6 { c, horizon } => {
                check_c(*c)?;
                if *horizon < 2 {
                    return Err(invalid("horizon", "b6 needs a horizon of at least 2"));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Short label such as `b5(c=2)`.
    pub fn label(&self) -> String {
        match self {
            BetaSpec::B1 => "b1".into(),
            BetaSpec::B2 { n_terms } => alloc::format!("b2(N={n_terms})"),
            BetaSpec::B3 { n_terms, c, .. } => alloc::format!("b3(N={n_terms},c={c})"),
            BetaSpec::B4 { c } => alloc::format!("b4(c={c})"),
            BetaSpec::B5 { c } => alloc::format!("b5(c={c})"),
            BetaSpec::B6 { c, horizon } => alloc::format!("b6(c={c},horizon={horizon})"),
            BetaSpec::Custom(cb) => alloc::format!("custom({})", cb.label),
        }
    }

    /// True if b3 uses a non-integer `c` (indices are floored).
    pub fn floors_real_c(&self) -> bool {
        matches!(self, BetaSpec::B3 { c, .. } if floor(*c) != *c)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BetaSpecRepr {
    variant: String,
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    n: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    horizon: Option<u64>,
    #[serde(default, skip_serializing_if = "core::ops::Not::not")]
    strict_integer: bool,
}

impl Serialize for BetaSpec {
    fn serialize<S: Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        let mut r = BetaSpecRepr { variant: String::new(), n: None, c: None, horizon: None, strict_integer: false };
        match self {
            BetaSpec::B1 => r.variant = "b1".into(),
            BetaSpec::B2 { n_terms } => {
                r.variant = "b2".into();
                r.n = Some(*n_terms);
            }
            BetaSpec::B3 { n_terms, c, strict_integer } => {
                r.variant = "b3".into();
                r.n = Some(*n_terms);
                r.c = Some(*c);
                r.strict_integer = *strict_integer;
            }
            BetaSpec::B4 { c } => {
                r.variant = "b4".into();
                r.c = Some(*c);
            }
            BetaSpec::B5 { c } => {
                r.variant = "b5".into();
                r.c = Some(*c);
            }
            BetaSpec::B6 { c, horizon } => {
                r.variant = "b6".into();
                r.c = Some(*c);
                r.horizon = Some(*horizon);
            }
            BetaSpec::Custom(_) => {
                return Err(serde::ser::Error::custom("a custom beta functional cannot be serialized"));
            }
        }
        r.serialize(s)
    }
}

impl<'de> Deserialize<'de> for BetaSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> core::result::Result<Self, D::Error> {
        let r = BetaSpecRepr::deserialize(d)?;
        let n_terms = r.n.unwrap_or(DEFAULT_N);
        let c = r.c.unwrap_or(DEFAULT_C);
        let spec = match r.variant.as_str() {
            "b1" => BetaSpec::B1,
            "b2" => BetaSpec::B2 { n_terms },
            "b3" => BetaSpec::B3 { n_terms, c, strict_integer: r.strict_integer },
            "b4" => BetaSpec::B4 { c },
            "b5" => BetaSpec::B5 { c },
            "b6" => BetaSpec::B6 { c, horizon: r.horizon.unwrap_or(DEFAULT_B6_HORIZON) },
            "custom" => {
                return Err(serde::de::Error::custom("custom beta functionals are defined in code, not JSON"))
            }
            other => return Err(serde::de::Error::unknown_variant(other, &["b1", "b2", "b3", "b4", "b5", "b6"])),
        };
        spec.validate().map_err(serde::de::Error::custom)?;
        Ok(spec)
    }
}

fn lower_index(n: u64, c: f64) -> u64 {
    (floor(n as f64 / c) as u64).max(1)
}

fn upper_index(n: u64, c: f64) -> u64 {
    floor(c * n as f64) as u64
}

fn check_n(n: u64) -> Result<()> {
    if n == 0 {
        Err(invalid("n", "indices start at 1"))
    } else {
        Ok(())
    }
}

/// Value and maximiser of ₆β.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Beta6 {
    pub value: f64,
    pub argmax: u64,
}

/// `₆β_n` together with the index `m` where the maximum is attained.
pub fn beta6(seq: &CoefficientSequence, n: u64, c: f64, horizon: u64) -> Result<Beta6> {
    BetaSpec::B6 { c, horizon }.validate()?;
    if n < 2 {
        return Err(invalid("n", "b6 needs n ≥ 2 so that ln n > 0"));
    }
    let lo = lower_index(n, c);
    if lo >= horizon {
        return Err(Error::HorizonTooSmall { horizon, reason: "b6 window [n/c, horizon] is empty" });
    }
    let prefix = Prefix::new(lo, seq.abs_values(lo, 2 * horizon).into_iter());
    let mut best = f64::NEG_INFINITY;
    let mut arg = lo;
    for m in lo..=horizon {
        let g = ln(m as f64) / m as f64 * prefix.sum(m, 2 * m);
        if g > best {
            best = g;
            arg = m;
        }
    }
    if arg == horizon {
        return Err(Error::BetaAtBoundary { n, m: arg });
    }
    Ok(Beta6 { value: best.max(0.0) / ln(n as f64), argmax: arg })
}

/// Evaluates `β_n` from its definition.
pub fn beta(spec: &BetaSpec, seq: &CoefficientSequence, n: u64) -> Result<f64> {
    check_n(n)?;
    spec.validate()?;
    let sum = |a: u64, b: u64, f: &dyn Fn(u64) -> f64| crate::math::compensated_sum((a..=b).map(f));
    Ok(match spec {
        BetaSpec::B1 => seq.abs(n),
        BetaSpec::B2 { n_terms } => sum(n, n + n_terms, &|k| seq.abs(k)),
        BetaSpec::B3 { n_terms, c, .. } => {
            crate::math::compensated_sum((0..=*n_terms).map(|nu| seq.abs(floor(pow(*c, nu as f64) * n as f64) as u64)))
        }
        BetaSpec::B4 { c } => seq.abs(n) + sum(n + 1, upper_index(n, *c), &|k| seq.abs(k) / k as f64),
        BetaSpec::B5 { c } => sum(lower_index(n, *c), upper_index(n, *c), &|k| seq.abs(k) / k as f64),
        BetaSpec::B6 { c, horizon } => beta6(seq, n, *c, *horizon)?.value,
        BetaSpec::Custom(cb) => {
            let v = (cb.f)(seq, n);
            if !(v >= 0.0) {
                return Err(invalid("custom", "custom majorant must be nonnegative"));
            }
            v
        }
    })
}

/// `β_n` for every `n ∈ [first, last]`, computed with prefix sums.
#[derive(Debug, Clone)]
pub struct BetaTable {
    first: u64,
    values: Vec<f64>,
    argmax: Option<Vec<u64>>,
}

impl BetaTable {
    pub fn build(spec: &BetaSpec, seq: &CoefficientSequence, first: u64, last: u64) -> Result<Self> {
        check_n(first)?;
        spec.validate()?;
        if last < first {
            return Ok(BetaTable { first, values: Vec::new(), argmax: None });
        }
        let count = (last - first + 1) as usize;
        let mut values = Vec::with_capacity(count);
        let mut argmax = None;
        match spec {
            BetaSpec::B1 => values.extend((first..=last).map(|n| seq.abs(n))),
            BetaSpec::B2 { n_terms } => {
                let p = Prefix::new(first, seq.abs_values(first, last + n_terms).into_iter());
                values.extend((first..=last).map(|n| p.sum(n, n + n_terms)));
            }
            BetaSpec::B4 { c } | BetaSpec::B5 { c } => {
                let top = upper_index(last, *c).max(last);
                let p = Prefix::new(1, (1..=top).map(|k| seq.abs(k) / k as f64));
                for n in first..=last {
                    values.push(match spec {
                        BetaSpec::B4 { .. } => seq.abs(n) + p.sum(n + 1, upper_index(n, *c)),
                        _ => p.sum(lower_index(n, *c), upper_index(n, *c)),
                    });
                }
            }
            BetaSpec::B6 { c, horizon } => {
                if first < 2 {
                    return Err(invalid("n", "b6 needs n ≥ 2 so that ln n > 0"));
                }
                let lo = lower_index(first, *c);
                let hi_lo = lower_index(last, *c);
                if hi_lo >= *horizon {
                    return Err(Error::HorizonTooSmall { horizon: *horizon, reason: "b6 window [n/c, horizon] is empty" });
                }
                let p = Prefix::new(lo, seq.abs_values(lo, 2 * horizon).into_iter());
                let len = (horizon - lo + 1) as usize;
                let mut best = alloc::vec![0.0; len];
                let mut arg = alloc::vec![0u64; len];
                let mut cur = f64::NEG_INFINITY;
                let mut cur_arg = *horizon;
                for m in (lo..=*horizon).rev() {
                    let g = ln(m as f64) / m as f64 * p.sum(m, 2 * m);
                    if g >= cur {
                        cur = g;
                        cur_arg = m;
                    }
                    best[(m - lo) as usize] = cur;
                    arg[(m - lo) as usize] = cur_arg;
                }
                let mut args = Vec::with_capacity(count);
                for n in first..=last {
                    let i = (lower_index(n, *c) - lo) as usize;
                    if arg[i] == *horizon {
                        return Err(Error::BetaAtBoundary { n, m: arg[i] });
                    }
                    values.push(best[i].max(0.0) / ln(n as f64));
                    args.push(arg[i]);
                }
                argmax = Some(args);
            }
            BetaSpec::B3 { .. } | BetaSpec::Custom(_) => {
                for n in first..=last {
                    values.push(beta(spec, seq, n)?);
                }
            }
        }
        Ok(BetaTable { first, values, argmax })
    }

    pub fn first(&self) -> u64 {
        self.first
    }

    pub fn get(&self, n: u64) -> f64 {
        self.values[(n - self.first) as usize]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Maximiser of the b6 window for `n`.
    pub fn argmax(&self, n: u64) -> Option<u64> {
        self.argmax.as_ref().map(|a| a[(n - self.first) as usize])
    }
}

/// `Σ_{k=from}^{horizon} β_k/k` with a fitted tail, requiring at least
/// `decades` decades of data.
pub(crate) fn beta_over_k(
    spec: &BetaSpec,
    seq: &CoefficientSequence,
    from: u64,
    horizon: u64,
    decades: u32,
) -> Result<TailSum> {
    check_n(from)?;
    if horizon < from.saturating_mul(10u64.pow(decades)) {
        return Err(Error::HorizonTooSmall { horizon, reason: "not enough decades of data to fit a tail" });
    }
    let first = if matches!(spec, BetaSpec::B6 { .. }) { from.max(2) } else { from };
    let table = BetaTable::build(spec, seq, first, horizon)?;
    let summands: Vec<f64> = (first..=horizon).map(|k| table.get(k) / k as f64).collect();
    Ok(TailSum::from_summands(first, &summands))
}

/// `Σ_{k=from}^{horizon} β_k/k` plus a power-law tail fitted on the last decade.
pub fn beta_series_tail(spec: &BetaSpec, seq: &CoefficientSequence, from: u64, horizon: u64) -> Result<TailSum> {
    beta_over_k(spec, seq, from, horizon, 3)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    const B5_HARMONIC_4: f64 = 0.527_422_052_154_195_011_3;
    const ZETA3_OVER_27: f64 = 0.044_520_626_042_947_936_5;
    const PI2_OVER_6: f64 = 1.644_934_066_848_226_436_5;

    #[test]
    fn spot_values() {
        let h = CoefficientSequence::harmonic();
        assert_eq!(beta(&BetaSpec::B1, &h, 10).unwrap(), 0.1);
        assert!((beta(&BetaSpec::b5(2.0), &h, 4).unwrap() - B5_HARMONIC_4).abs() < 1e-15);
    }

    #[test]
    fn b6_errors() {
        let h = CoefficientSequence::harmonic();
        assert!(beta(&BetaSpec::b6(2.0, 1000), &h, 1).is_err());
        let one = CoefficientSequence::constant(1.0);
        assert!(matches!(beta(&BetaSpec::b6(2.0, 1000), &one, 10), Err(Error::BetaAtBoundary { .. })));
        let b3 = BetaSpec::B3 { n_terms: 2, c: 1.5, strict_integer: true };
        assert!(beta(&b3, &h, 4).is_err());
    }

    #[test]
    fn b6_remark6_is_order_inverse_square() {
        let d = CoefficientSequence::remark6(3).unwrap();
        let mut scaled = vec![];
        for n in [64u64, 256, 1024, 4096] {
            let b = beta6(&d, n, 2.0, 1 << 15).unwrap();
            assert!(b.argmax < 1 << 15);
            scaled.push(b.value * (n * n) as f64);
        }
        let (lo, hi) = scaled.iter().fold((f64::MAX, 0.0f64), |(a, b), v| (a.min(*v), b.max(*v)));
        assert!(hi / lo < 2.0, "{scaled:?}");
    }

    #[test]
    fn table_matches_direct() {
        let seqs = [
            CoefficientSequence::harmonic(),
            CoefficientSequence::remark5_cos(),
            CoefficientSequence::remark6(3).unwrap(),
        ];
        let specs = [
            BetaSpec::B1,
            BetaSpec::B2 { n_terms: 3 },
            BetaSpec::B3 { n_terms: 2, c: 2.0, strict_integer: false },
            BetaSpec::B4 { c: 2.0 },
            BetaSpec::b5(3.0),
            BetaSpec::b6(2.0, 4000),
        ];
        for s in &seqs {
            for spec in &specs {
                let t = BetaTable::build(spec, s, 2, 300).unwrap();
                for n in 2..=300 {
                    let d = beta(spec, s, n).unwrap();
                    assert!((t.get(n) - d).abs() <= 1e-14 * d.max(1e-300), "{} n={n}", spec.label());
                }
            }
        }
    }

    #[test]
    fn series_tails() {
        let d = CoefficientSequence::remark6(3).unwrap();
        let t = beta_series_tail(&BetaSpec::B1, &d, 1, 100_000).unwrap();
        assert!(t.summable);
        assert!((t.total() - ZETA3_OVER_27).abs() < 1e-12);
        let h = CoefficientSequence::harmonic();
        let t = beta_series_tail(&BetaSpec::B1, &h, 1, 100_000).unwrap();
        assert!(t.summable);
        assert!((t.total() - PI2_OVER_6).abs() < 1e-8);
        let one = CoefficientSequence::constant(1.0);
        let t = beta_series_tail(&BetaSpec::B1, &one, 1, 100_000).unwrap();
        assert!(!t.summable);
        assert!((t.value - (ln(100_000.0) + 0.577_215_664_901_532_9)).abs() < 1e-4);
        assert!(beta_series_tail(&BetaSpec::B1, &h, 10, 5000).is_err());
    }

    #[test]
    fn serde_round_trip() {
        for spec in [BetaSpec::B1, BetaSpec::B2 { n_terms: 4 }, BetaSpec::b5(3.0), BetaSpec::b6(2.0, 5000)] {
            let json = serde_json::to_string(&spec).unwrap();
            let back: BetaSpec = serde_json::from_str(&json).unwrap();
            assert_eq!(back.label(), spec.label());
        }
        let b6: BetaSpec = serde_json::from_str(r#"{"variant":"b6","c":2.0,"horizon":100}"#).unwrap();
        assert_eq!(b6.label(), "b6(c=2,horizon=100)");
        assert!(serde_json::from_str::<BetaSpec>(r#"{"variant":"b5","c":0.5}"#).is_err());
        assert!(serde_json::to_string(&BetaSpec::Custom(CustomBeta::new("x", |_, _| 1.0))).is_err());
    }
}
