//! Coefficient sequences: closed-form generators with a shared, lock-free cache.
//!
//! Indices are 1-based. Below a generator's support every value is exactly 0,
//! and real generators have imaginary part exactly 0. Index 0 is reserved for
//! the constant term (`a_0` of a cosine series, `c_0` of an exponential one).

use alloc::boxed::Box;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;
use core::sync::atomic::{AtomicU64, Ordering};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::math::{ln, pow};

/// Default number of cached leading coefficients.
pub const DEFAULT_CACHE_HORIZON: u64 = 4096;

/// The three series forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SeriesKind {
    /// `a_0/2 + Σ a_k cos kx`
    #[serde(rename = "cos", alias = "cosine")]
    Cosine,
    /// `Σ b_k sin kx`
    #[serde(rename = "sin", alias = "sine")]
    Sine,
    /// `Σ c_k e^{ikx}` over all integers `k`
    #[serde(rename = "exp", alias = "exponential")]
    Exponential,
}

impl SeriesKind {
    /// Maps a coefficient to its exponential pair `(c_k, c_{-k})`.
    pub fn to_exponential(self, a: Complex64) -> (Complex64, Complex64) {
        match self {
            SeriesKind::Cosine => (a * 0.5, a * 0.5),
            SeriesKind::Sine => {
                let half = a * 0.5;
                (Complex64::new(half.im, -half.re), Complex64::new(-half.im, half.re))
            }
            SeriesKind::Exponential => (a, Complex64::new(0.0, 0.0)),
        }
    }

    /// Inverse of [`SeriesKind::to_exponential`] for the cosine and sine forms.
    pub fn from_exponential(self, ck: Complex64, cmk: Complex64) -> Complex64 {
        match self {
            SeriesKind::Cosine => ck + cmk,
            SeriesKind::Sine => {
                let d = ck - cmk;
                Complex64::new(-d.im, d.re)
            }
            SeriesKind::Exponential => ck,
        }
    }

    /// `cos kx`, `sin kx` or `e^{ikx}`.
    pub fn trig(self, k: u64, x: f64) -> Complex64 {
        let (c, s) = crate::math::cis_tx(k as f64, x);
        match self {
            SeriesKind::Cosine => Complex64::new(c, 0.0),
            SeriesKind::Sine => Complex64::new(s, 0.0),
            SeriesKind::Exponential => Complex64::new(c, s),
        }
    }
}

impl fmt::Display for SeriesKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SeriesKind::Cosine => "cos",
            SeriesKind::Sine => "sin",
            SeriesKind::Exponential => "exp",
        })
    }
}

type CustomFn = Arc<dyn Fn(u64) -> Complex64 + Send + Sync>;

#[derive(Clone)]
enum Generator {
    Zero,
    Constant(f64),
    Harmonic,
    InvLog { shift: f64 },
    Power { p: f64 },
    Geometric { ratio: f64 },
    MonotoneList(Arc<[f64]>),
    Remark5Cos,
    Remark5Sin,
    Remark6 { r: u64 },
    Explicit { re: Arc<[f64]>, im: Option<Arc<[f64]>> },
    Custom { label: String, f: CustomFn },
}

fn remark5_value(n: u64) -> f64 {
    let l = ln(n as f64);
    let ll = if l > 0.0 { ln(l) } else { 0.0 };
    if ll > 0.0 {
        1.0 / (l * ll)
    } else {
        0.0
    }
}

impl Generator {
    fn eval(&self, n: u64) -> Complex64 {
        let re = match self {
            Generator::Zero => 0.0,
            Generator::Constant(v) => *v,
            Generator::Harmonic => 1.0 / n as f64,
            Generator::InvLog { shift } => {
                let l = ln(n as f64 + shift);
                if l > 0.0 {
                    1.0 / l
                } else {
                    0.0
                }
            }
            Generator::Power { p } => pow(n as f64, -p),
            Generator::Geometric { ratio } => pow(*ratio, n as f64),
            Generator::MonotoneList(v) => v.get((n - 1) as usize).copied().unwrap_or(0.0),
            Generator::Remark5Cos => {
                if n >= 4 && n % 3 == 1 {
                    remark5_value(n)
                } else {
                    0.0
                }
            }
            Generator::Remark5Sin => {
                if n >= 3 && n % 2 == 1 {
                    remark5_value(n)
                } else {
                    0.0
                }
            }
            Generator::Remark6 { r } => {
                if n % r == 0 {
                    let nf = n as f64;
                    1.0 / (nf * nf)
                } else {
                    0.0
                }
            }
            Generator::Explicit { re, im } => {
                let i = (n - 1) as usize;
                let a = re.get(i).copied().unwrap_or(0.0);
                let b = im.as_ref().and_then(|v| v.get(i).copied()).unwrap_or(0.0);
                return Complex64::new(a, b);
            }
            Generator::Custom { f, .. } => return f(n),
        };
        Complex64::new(re, 0.0)
    }

    fn name(&self) -> &str {
        match self {
            Generator::Zero => "zero",
            Generator::Constant(_) => "constant",
            Generator::Harmonic => "harmonic",
            Generator::InvLog { .. } => "inv_log",
            Generator::Power { .. } => "power",
            Generator::Geometric { .. } => "geometric",
            Generator::MonotoneList(_) => "monotone_list",
            Generator::Remark5Cos => "remark5_cos",
            Generator::Remark5Sin => "remark5_sin",
            Generator::Remark6 { .. } => "remark6",
            Generator::Explicit { .. } => "explicit",
            Generator::Custom { label, .. } => label,
        }
    }

    fn is_real(&self) -> bool {
        match self {
            Generator::Explicit { im, .. } => im.is_none(),
            Generator::Custom { .. } => false,
            _ => true,
        }
    }

    fn start(&self) -> Option<u64> {
        match self {
            Generator::Zero => None,
            Generator::Constant(v) => (*v != 0.0).then_some(1),
            Generator::InvLog { shift } => {
                let mut n = 1u64;
                while ln(n as f64 + shift) <= 0.0 {
                    n += 1;
                }
                Some(n)
            }
            Generator::Remark5Cos => Some(4),
            Generator::Remark5Sin => Some(3),
            Generator::Remark6 { r } => Some(*r),
            Generator::MonotoneList(v) => v.iter().position(|x| *x != 0.0).map(|i| i as u64 + 1),
            Generator::Explicit { re, im } => {
                let a = re.iter().position(|x| *x != 0.0);
                let b = im.as_ref().and_then(|v| v.iter().position(|x| *x != 0.0));
                match (a, b) {
                    (Some(a), Some(b)) => Some(a.min(b) as u64 + 1),
                    (a, b) => a.or(b).map(|i| i as u64 + 1),
                }
            }
            _ => Some(1),
        }
    }

    fn support_end(&self) -> Option<u64> {
        match self {
            Generator::Zero => Some(0),
            Generator::MonotoneList(v) => Some(v.len() as u64),
            Generator::Explicit { re, im } => {
                Some(re.len().max(im.as_ref().map_or(0, |v| v.len())) as u64)
            }
            _ => None,
        }
    }
}

const EMPTY: u64 = 0x7ff8_dead_beef_0001;

struct SlotCache {
    re: Box<[AtomicU64]>,
    im: Box<[AtomicU64]>,
}

impl SlotCache {
    fn new(horizon: u64) -> Self {
        let mk = || (0..horizon).map(|_| AtomicU64::new(EMPTY)).collect::<Vec<_>>().into_boxed_slice();
        SlotCache { re: mk(), im: mk() }
    }

    fn horizon(&self) -> u64 {
        self.re.len() as u64
    }

    fn get(&self, n: u64) -> Option<Complex64> {
        let i = (n - 1) as usize;
        let re = self.re.get(i)?.load(Ordering::Acquire);
        let im = self.im[i].load(Ordering::Acquire);
        (re != EMPTY && im != EMPTY).then(|| Complex64::new(f64::from_bits(re), f64::from_bits(im)))
    }

    fn insert(&self, n: u64, v: Complex64) {
        let i = (n - 1) as usize;
        if i >= self.re.len() {
            return;
        }
        // Values are deterministic, so a lost race stores identical bits.
        let _ = self.im[i].compare_exchange(EMPTY, v.im.to_bits(), Ordering::AcqRel, Ordering::Acquire);
        let _ = self.re[i].compare_exchange(EMPTY, v.re.to_bits(), Ordering::AcqRel, Ordering::Acquire);
    }
}

struct Inner {
    generator: Generator,
    scale: Complex64,
    constant: Complex64,
    negative: Option<CoefficientSequence>,
    cache: SlotCache,
    descriptor: Option<GeneratorDescriptor>,
}

/// A generator-backed coefficient sequence. Cloning is cheap and clones share
/// the cache; sequences are `Send + Sync`.
#[derive(Clone)]
pub struct CoefficientSequence {
    inner: Arc<Inner>,
}

impl fmt::Debug for CoefficientSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CoefficientSequence")
            .field("generator", &self.inner.generator.name())
            .field("scale", &self.inner.scale)
            .field("constant", &self.inner.constant)
            .field("negative", &self.inner.negative.is_some())
            .finish()
    }
}

impl CoefficientSequence {
    fn build(generator: Generator, descriptor: Option<GeneratorDescriptor>) -> Self {
        Self::assemble(generator, Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), None, DEFAULT_CACHE_HORIZON, descriptor)
    }

    fn assemble(
        generator: Generator,
        scale: Complex64,
        constant: Complex64,
        negative: Option<CoefficientSequence>,
        horizon: u64,
        descriptor: Option<GeneratorDescriptor>,
    ) -> Self {
        CoefficientSequence {
            inner: Arc::new(Inner { generator, scale, constant, negative, cache: SlotCache::new(horizon), descriptor }),
        }
    }

    fn rebuild(&self, f: impl FnOnce(&mut Complex64, &mut Complex64, &mut Option<CoefficientSequence>, &mut u64, &mut Option<GeneratorDescriptor>)) -> Self {
        let i = &self.inner;
        let (mut scale, mut constant, mut negative, mut horizon, mut descriptor) =
            (i.scale, i.constant, i.negative.clone(), i.cache.horizon(), i.descriptor.clone());
        f(&mut scale, &mut constant, &mut negative, &mut horizon, &mut descriptor);
        Self::assemble(i.generator.clone(), scale, constant, negative, horizon, descriptor)
    }

    pub fn zero() -> Self {
        Self::named("zero", GeneratorParams::default()).expect("zero generator")
    }

    pub fn constant(value: f64) -> Self {
        Self::named("constant", GeneratorParams { value: Some(value), ..Default::default() }).expect("finite constant")
    }

    pub fn harmonic() -> Self {
        Self::named("harmonic", GeneratorParams::default()).expect("harmonic generator")
    }

    /// `1/ln(n + shift)`.
    pub fn inv_log(shift: f64) -> Result<Self> {
        Self::named("inv_log", GeneratorParams { shift: Some(shift), ..Default::default() })
    }

    /// `n^{-p}` for `p > 0`.
    pub fn power(p: f64) -> Result<Self> {
        Self::named("power", GeneratorParams { p: Some(p), ..Default::default() })
    }

    pub fn geometric(ratio: f64) -> Result<Self> {
        Self::named("geometric", GeneratorParams { ratio: Some(ratio), ..Default::default() })
    }

    /// `1/(ln n · ln ln n)` on `n = 3l+1`, `l ≥ 1`.
    pub fn remark5_cos() -> Self {
        Self::named("remark5_cos", GeneratorParams::default()).expect("remark5_cos generator")
    }

    /// `1/(ln n · ln ln n)` on `n = 2l+1`, `l ≥ 1`.
    pub fn remark5_sin() -> Self {
        Self::named("remark5_sin", GeneratorParams::default()).expect("remark5_sin generator")
    }

    /// `1/n²` if `r | n`, else 0.
    pub fn remark6(r: u64) -> Result<Self> {
        Self::named("remark6", GeneratorParams { r: Some(r), ..Default::default() })
    }

    /// Finitely supported real sequence `a_1, a_2, …`.
    pub fn explicit(values: Vec<f64>) -> Result<Self> {
        Self::named("explicit", GeneratorParams { values: Some(values), ..Default::default() })
    }

    /// Finitely supported complex sequence.
    pub fn explicit_complex(values: &[Complex64]) -> Result<Self> {
        Self::named(
            "explicit",
            GeneratorParams {
                values: Some(values.iter().map(|c| c.re).collect()),
                values_im: Some(values.iter().map(|c| c.im).collect()),
                ..Default::default()
            },
        )
    }

    /// Finitely supported nonnegative nonincreasing sequence.
    pub fn monotone_list(values: Vec<f64>) -> Result<Self> {
        Self::named("monotone_list", GeneratorParams { values: Some(values), ..Default::default() })
    }

    /// A sequence defined by a closure. It has no JSON descriptor.
    pub fn custom<F>(label: &str, f: F) -> Self
    where
        F: Fn(u64) -> Complex64 + Send + Sync + 'static,
    {
        Self::build(Generator::Custom { label: label.to_string(), f: Arc::new(f) }, None)
    }

    /// Builds a named generator.
    pub fn named(name: &str, params: GeneratorParams) -> Result<Self> {
        let descriptor = GeneratorDescriptor { name: name.to_string(), params };
        Self::from_descriptor(&descriptor)
    }

    /// Builds a sequence from its canonical JSON form.
    pub fn from_descriptor(d: &GeneratorDescriptor) -> Result<Self> {
        let p = &d.params;
        let finite = |name: &'static str, v: f64| {
            if v.is_finite() {
                Ok(v)
            } else {
                Err(invalid(name, "must be finite"))
            }
        };
        let generator = match d.name.as_str() {
            "zero" => Generator::Zero,
            "constant" => Generator::Constant(finite("value", p.value.unwrap_or(1.0))?),
            "harmonic" => Generator::Harmonic,
            "inv_log" => {
                let shift = finite("shift", p.shift.unwrap_or(1.0))?;
                if shift <= 0.0 {
                    return Err(invalid("shift", "must be positive"));
                }
                Generator::InvLog { shift }
            }
            "power" => {
                let e = p.p.ok_or_else(|| invalid("p", "power requires an exponent"))?;
                if !(e > 0.0) || !e.is_finite() {
                    return Err(invalid("p", "exponent must be positive"));
                }
                Generator::Power { p: e }
            }
            "geometric" => Generator::Geometric {
                ratio: finite("ratio", p.ratio.ok_or_else(|| invalid("ratio", "geometric requires a ratio"))?)?,
            },
            "monotone_list" => {
                let v = p.values.clone().ok_or_else(|| invalid("values", "monotone_list requires values"))?;
                if v.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
                    return Err(invalid("values", "entries must be finite and nonnegative"));
                }
                if v.windows(2).any(|w| w[1] > w[0]) {
                    return Err(invalid("values", "entries must be nonincreasing"));
                }
                Generator::MonotoneList(v.into())
            }
            "remark5_cos" => Generator::Remark5Cos,
            "remark5_sin" => Generator::Remark5Sin,
            "remark6" => {
                let r = p.r.ok_or_else(|| invalid("r", "remark6 requires r"))?;
                if r == 0 {
                    return Err(invalid("r", "must be at least 1"));
                }
                Generator::Remark6 { r }
            }
            "explicit" => {
                let re = p.values.clone().unwrap_or_default();
                if re.iter().chain(p.values_im.iter().flatten()).any(|x| !x.is_finite()) {
                    return Err(invalid("values", "entries must be finite"));
                }
                Generator::Explicit { re: re.into(), im: p.values_im.clone().map(Into::into) }
            }
            other => return Err(Error::UnknownGenerator(other.to_string())),
        };
        let scale = Complex64::new(finite("scale", p.scale.unwrap_or(1.0))?, 0.0);
        let constant = Complex64::new(finite("a0", p.a0.unwrap_or(0.0))?, 0.0);
        let negative = match &p.negative {
            Some(nd) => Some(Self::from_descriptor(nd)?),
            None => None,
        };
        let horizon = p.cache_horizon.unwrap_or(DEFAULT_CACHE_HORIZON);
        Ok(Self::assemble(generator, scale, constant, negative, horizon, Some(d.clone())))
    }

    /// The canonical JSON form, if the sequence has one.
    pub fn descriptor(&self) -> Result<GeneratorDescriptor> {
        self.inner.descriptor.clone().ok_or(Error::NotSerializable("a closure-defined sequence"))
    }

    pub fn name(&self) -> &str {
        self.inner.generator.name()
    }

    /// A copy with the given constant term `a_0` (or `c_0`).
    pub fn with_constant_term(&self, a0: Complex64) -> Self {
        self.rebuild(|_, c, _, _, d| {
            *c = a0;
            if a0.im != 0.0 {
                *d = None;
            } else if let Some(d) = d {
                d.params.a0 = Some(a0.re).filter(|v| *v != 0.0);
            }
        })
    }

    /// A copy carrying `c_{-k}` for the exponential form.
    pub fn with_negative(&self, negative: CoefficientSequence) -> Self {
        let nd = negative.inner.descriptor.clone();
        self.rebuild(|_, _, n, _, d| {
            *n = Some(negative);
            match (d.as_mut(), nd) {
                (Some(d), Some(nd)) => d.params.negative = Some(Box::new(nd)),
                _ => *d = None,
            }
        })
    }

    /// A copy scaled by a complex factor.
    pub fn scaled(&self, factor: Complex64) -> Self {
        self.rebuild(|s, c, n, _, d| {
            *s *= factor;
            *c *= factor;
            *n = n.as_ref().map(|neg| neg.scaled(factor));
            let neg_descriptor = n.as_ref().map(|neg| neg.inner.descriptor.clone());
            if factor.im != 0.0 || neg_descriptor.as_ref().is_some_and(|nd| nd.is_none()) {
                *d = None;
            } else if let Some(d) = d {
                d.params.scale = Some(s.re).filter(|v| *v != 1.0);
                d.params.a0 = Some(c.re).filter(|v| *v != 0.0);
                d.params.negative = neg_descriptor.flatten().map(Box::new);
            }
        })
    }

    /// A copy with a different cache size.
    pub fn with_cache_horizon(&self, horizon: u64) -> Self {
        self.rebuild(|_, _, _, h, d| {
            *h = horizon;
            if let Some(d) = d {
                d.params.cache_horizon = Some(horizon).filter(|v| *v != DEFAULT_CACHE_HORIZON);
            }
        })
    }

    pub fn constant_term(&self) -> Complex64 {
        self.inner.constant
    }

    pub fn negative(&self) -> Option<&CoefficientSequence> {
        self.inner.negative.as_ref()
    }

    /// True when every coefficient (and the constant term) is real.
    pub fn is_real(&self) -> bool {
        self.inner.generator.is_real()
            && self.inner.scale.im == 0.0
            && self.inner.constant.im == 0.0
            && self.inner.negative.as_ref().is_none_or(|n| n.is_real())
    }

    /// First index at which the generator can be nonzero (`None` for the zero sequence).
    pub fn effective_start(&self) -> Option<u64> {
        if self.inner.scale == Complex64::new(0.0, 0.0) {
            return None;
        }
        self.inner.generator.start()
    }

    /// Last index of a finite support, if the generator has one.
    pub fn support_end(&self) -> Option<u64> {
        if self.inner.scale == Complex64::new(0.0, 0.0) {
            return Some(0);
        }
        self.inner.generator.support_end()
    }

    pub fn cache_horizon(&self) -> u64 {
        self.inner.cache.horizon()
    }

    /// The coefficient with index `n`; `n = 0` gives the constant term.
    pub fn coeff(&self, n: u64) -> Complex64 {
        if n == 0 {
            return self.inner.constant;
        }
        if let Some(v) = self.inner.cache.get(n) {
            return v;
        }
        let v = self.coeff_uncached(n);
        self.inner.cache.insert(n, v);
        v
    }

    /// The coefficient computed from the closed form, bypassing the cache.
    pub fn coeff_uncached(&self, n: u64) -> Complex64 {
        if n == 0 {
            return self.inner.constant;
        }
        let v = self.inner.generator.eval(n);
        let s = self.inner.scale;
        if s == Complex64::new(1.0, 0.0) {
            v
        } else if s.im == 0.0 && v.im == 0.0 {
            Complex64::new(v.re * s.re, 0.0)
        } else {
            v * s
        }
    }

    /// Real part of `coeff(n)`.
    pub fn re(&self, n: u64) -> f64 {
        self.coeff(n).re
    }

    /// `|coeff(n)|`.
    pub fn abs(&self, n: u64) -> f64 {
        let c = self.coeff(n);
        if c.im == 0.0 {
            c.re.abs()
        } else {
            c.norm()
        }
    }

    /// `coeff(k)` for `k ∈ [lo, hi]`.
    pub fn values(&self, lo: u64, hi: u64) -> Vec<Complex64> {
        if hi < lo {
            return Vec::new();
        }
        (lo..=hi).map(|k| self.coeff(k)).collect()
    }

    /// `|coeff(k)|` for `k ∈ [lo, hi]`.
    pub fn abs_values(&self, lo: u64, hi: u64) -> Vec<f64> {
        if hi < lo {
            return Vec::new();
        }
        (lo..=hi).map(|k| self.abs(k)).collect()
    }

    /// Checks `coeff(n) ≥ coeff(n+1) ≥ 0` for real coefficients on `[1, horizon]`.
    pub fn is_monotone_on(&self, horizon: u64) -> bool {
        if !self.is_real() {
            return false;
        }
        let mut prev = self.re(1);
        if prev < 0.0 {
            return false;
        }
        for n in 2..=horizon {
            let v = self.re(n);
            if v > prev || v < 0.0 {
                return false;
            }
            prev = v;
        }
        true
    }

    /// The sequence `c_k` of the exponential form of a cosine or sine series,
    /// with its negative branch `c_{-k}` and constant `c_0`.
    pub fn exponential_form(&self, kind: SeriesKind) -> CoefficientSequence {
        match kind {
            SeriesKind::Exponential => self.clone(),
            SeriesKind::Cosine => {
                let half = Complex64::new(0.5, 0.0);
                let pos = self.scaled(half).with_constant_term(self.constant_term() * half);
                pos.with_negative(self.scaled(half).with_constant_term(Complex64::new(0.0, 0.0)))
            }
            SeriesKind::Sine => {
                let pos = self.scaled(Complex64::new(0.0, -0.5)).with_constant_term(Complex64::new(0.0, 0.0));
                let neg = self.scaled(Complex64::new(0.0, 0.5)).with_constant_term(Complex64::new(0.0, 0.0));
                pos.with_negative(neg)
            }
        }
    }
}

/// Parameters of a named generator. Unused fields are omitted from JSON.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shift: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values_im: Option<Vec<f64>>,
    /// Constant term `a_0`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a0: Option<f64>,
    /// Real multiplier applied to every coefficient.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    /// `c_{-k}` branch for exponential series.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub negative: Option<Box<GeneratorDescriptor>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cache_horizon: Option<u64>,
}

/// Canonical JSON form `{"name": …, "params": {…}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorDescriptor {
    pub name: String,
    #[serde(default)]
    pub params: GeneratorParams,
}

/// Builds a named generator (`harmonic`, `inv_log`, `power`, `geometric`,
/// `constant`, `zero`, `monotone_list`, `remark5_cos`, `remark5_sin`,
/// `remark6`, `explicit`).
pub fn make_generator(name: &str, params: GeneratorParams) -> Result<CoefficientSequence> {
    CoefficientSequence::named(name, params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    const REMARK5_AT_4: f64 = 2.208_425_780_236_422_664_5;
    const REMARK5_AT_3: f64 = 9.678_471_578_701_478_057_1;

    #[test]
    fn spot_values() {
        assert_eq!(CoefficientSequence::harmonic().re(4), 0.25);
        let d = CoefficientSequence::remark6(3).unwrap();
        assert_eq!(d.re(6), 1.0 / 36.0);
        assert_eq!(d.re(7), 0.0);
        assert_eq!([d.re(3), d.re(6), d.re(9)], [1.0 / 9.0, 1.0 / 36.0, 1.0 / 81.0]);
        let c = CoefficientSequence::remark5_cos();
        assert!((c.re(4) - REMARK5_AT_4).abs() < 1e-14);
        let s = CoefficientSequence::remark5_sin();
        assert!((s.re(3) - REMARK5_AT_3).abs() < 1e-13);
        assert_eq!(CoefficientSequence::explicit(vec![5.0]).unwrap().re(2), 0.0);
    }

    #[test]
    fn below_support_is_zero() {
        let c = CoefficientSequence::remark5_cos();
        assert_eq!(c.coeff(1), Complex64::new(0.0, 0.0));
        assert_eq!(c.effective_start(), Some(4));
        let s = CoefficientSequence::remark5_sin();
        assert_eq!(s.re(1), 0.0);
        assert_eq!(s.effective_start(), Some(3));
    }

    #[test]
    fn generator_errors() {
        assert!(matches!(make_generator("nope", GeneratorParams::default()), Err(Error::UnknownGenerator(_))));
        assert!(CoefficientSequence::power(0.0).is_err());
        assert!(CoefficientSequence::power(-1.0).is_err());
        assert!(CoefficientSequence::monotone_list(vec![1.0, 2.0]).is_err());
        assert!(CoefficientSequence::remark6(0).is_err());
    }

    #[test]
    fn descriptor_round_trip() {
        let d = GeneratorDescriptor {
            name: "remark6".into(),
            params: GeneratorParams { r: Some(3), a0: Some(2.0), ..Default::default() },
        };
        let s = CoefficientSequence::from_descriptor(&d).unwrap();
        assert_eq!(s.descriptor().unwrap(), d);
        assert_eq!(s.constant_term().re, 2.0);
        assert!(CoefficientSequence::custom("f", |_| Complex64::new(1.0, 0.0)).descriptor().is_err());
    }

    #[test]
    fn cache_is_transparent() {
        let s = CoefficientSequence::inv_log(1.0).unwrap().with_cache_horizon(64);
        for n in 1..200 {
            assert_eq!(s.coeff(n).re.to_bits(), s.coeff_uncached(n).re.to_bits());
            assert_eq!(s.coeff(n).re.to_bits(), s.coeff(n).re.to_bits());
        }
    }

    #[test]
    fn kind_round_trip() {
        let a = Complex64::new(0.3, -1.7);
        for kind in [SeriesKind::Cosine, SeriesKind::Sine] {
            let (ck, cmk) = kind.to_exponential(a);
            assert_eq!(kind.from_exponential(ck, cmk), a);
        }
        let (ck, _) = SeriesKind::Sine.to_exponential(Complex64::new(2.0, 0.0));
        assert_eq!(ck, Complex64::new(0.0, -1.0));
    }

    #[test]
    fn monotone_generators_scan() {
        for s in [
            CoefficientSequence::harmonic(),
            CoefficientSequence::inv_log(1.0).unwrap(),
            CoefficientSequence::power(0.5).unwrap(),
        ] {
            assert!(s.is_monotone_on(10_000));
        }
    }
}
