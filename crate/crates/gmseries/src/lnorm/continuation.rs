//! Evaluation of series tails `Σ_{k>n} u_k e^{ikx}` for real `u` by iterated
//! `r`-step summation by parts.
//!
//! With `w = e^{irx}` and `(Du)_k = u_k − u_{k−r}`,
//! `Σ_{k≥K} u_k z^k = Σ_{j<p} B_j/(1−w)^{j+1} + R_p`, where
//! `B_j = Σ_{k=K+jr}^{K+(j+1)r−1} (D^j u)_k z^k` and
//! `|R_p| ≤ Σ_{k≥K+pr} |(D^p u)_k| / |1−w|^p`.

use alloc::vec::Vec;

use crate::fit::{fit_tail, TailFit, TailSum, MIN_SUMMABLE_EXPONENT};
use crate::math::{cis_tx, ln, pow, sin, Neumaier, PI};
use crate::sequences::CoefficientSequence;
use crate::Complex64;

/// Highest summation-by-parts order tried.
pub(crate) const MAX_ORDER: usize = 3;
const CUTS_PER_OCTAVE: f64 = 8.0;
const ANCHOR: u64 = 64;

pub(crate) struct TailEvaluator {
    n: u64,
    r: u64,
    horizon: u64,
    /// `u[k]` for `k ≤ horizon + r`; `u[0] = 0`.
    u: Vec<f64>,
    cuts: Vec<u64>,
    /// `rem[p][i] = Σ_{k ≥ cuts[i] + p r} |(D^p u)_k|`, fitted beyond the horizon.
    rem: [Vec<f64>; MAX_ORDER + 1],
    abs_fit: TailFit,
    var_fit: TailFit,
    /// `Σ|u_k|/k` converges as far as the fit tells.
    abs_over_k: bool,
    /// Pointwise error target at `|1 − w| = 2`.
    target: f64,
    /// Normaliser of the `1/|1 − w|` target profile; `0` for a flat target.
    spread: f64,
}

fn binom(p: usize, j: usize) -> f64 {
    const C: [[f64; 4]; 4] = [[1.0, 0.0, 0.0, 0.0], [1.0, 1.0, 0.0, 0.0], [1.0, 2.0, 1.0, 0.0], [1.0, 3.0, 3.0, 1.0]];
    C[p][j]
}

fn power_sum(scale: f64, exponent: f64, from: f64) -> f64 {
    if scale == 0.0 {
        0.0
    } else if exponent <= MIN_SUMMABLE_EXPONENT {
        f64::INFINITY
    } else {
        scale * pow(from - 0.5, 1.0 - exponent) / (exponent - 1.0)
    }
}

impl TailEvaluator {
    /// `part` selects the real (`false`) or imaginary (`true`) part of the coefficients.
    pub(crate) fn new(seq: &CoefficientSequence, imag: bool, n: u64, r: u64, horizon: u64, target: f64) -> Self {
        let top = horizon + r;
        let mut u = Vec::with_capacity(top as usize + 1);
        u.push(0.0);
        let end = seq.support_end().unwrap_or(u64::MAX);
        for k in 1..=top {
            let v = if k <= n || k > end {
                0.0
            } else {
                let c = seq.coeff_uncached(k);
                if imag {
                    c.im
                } else {
                    c.re
                }
            };
            u.push(v);
        }
        let last = horizon - MAX_ORDER as u64 * r;
        let mut cuts = alloc::vec![n + 1];
        let step = pow(2.0, 1.0 / CUTS_PER_OCTAVE);
        loop {
            let prev = *cuts.last().unwrap();
            let next = ((prev as f64 * step) as u64).max(prev + 1);
            if next >= last {
                break;
            }
            cuts.push(next);
        }
        if *cuts.last().unwrap() < last {
            cuts.push(last);
        }
        let mut ev = TailEvaluator {
            n,
            r,
            horizon,
            u,
            cuts,
            rem: Default::default(),
            abs_fit: TailFit::ZERO,
            var_fit: TailFit::ZERO,
            abs_over_k: true,
            target,
            spread: 0.0,
        };
        for p in 0..=MAX_ORDER {
            ev.rem[p] = ev.remainders(p);
        }
        ev.abs_fit = ev.fit_last_decade(|k| ev.u[k as usize].abs());
        ev.var_fit = ev.fit_last_decade(|k| (ev.u[k as usize] - ev.u[(k + r) as usize]).abs());
        let first = n + 1;
        if first < horizon {
            let s: Vec<f64> = (first..=horizon).map(|k| ev.u[k as usize].abs() / k as f64).collect();
            ev.abs_over_k = TailSum::from_summands(first, &s).summable;
        }
        ev
    }

    #[inline]
    fn diff(&self, p: usize, k: u64) -> f64 {
        let mut acc = 0.0;
        for j in 0..=p {
            let i = k - j as u64 * self.r;
            let t = binom(p, j) * self.u[i as usize];
            acc += if j % 2 == 0 { t } else { -t };
        }
        acc
    }

    fn fit_last_decade(&self, f: impl Fn(u64) -> f64) -> TailFit {
        let lo = (self.horizon / 10).max(self.n + 1 + MAX_ORDER as u64 * self.r);
        if lo >= self.horizon {
            return TailFit::ZERO;
        }
        let s: Vec<f64> = (lo..=self.horizon).map(f).collect();
        fit_tail(lo, &s)
    }

    fn remainders(&self, p: usize) -> Vec<f64> {
        let pr = p as u64 * self.r;
        let fit = self.fit_last_decade(|k| self.diff(p, k).abs());
        let beyond = fit.estimate;
        let mut out = alloc::vec![0.0; self.cuts.len()];
        let mut acc = Neumaier::new();
        let mut k = self.horizon;
        for i in (0..self.cuts.len()).rev() {
            let from = self.cuts[i] + pr;
            while k >= from {
                acc.add(self.diff(p, k).abs());
                k -= 1;
            }
            out[i] = acc.value() + beyond;
        }
        out
    }

    /// The tail `Σ_{k>n} u_k e^{ikx}` and a bound on its error.
    pub(crate) fn eval(&self, x: f64) -> (Complex64, f64) {
        // 1 − e^{iθ} = 2 sin(θ/2) (sin(θ/2) − i cos(θ/2))
        let (hc, hs) = cis_tx(0.5 * self.r as f64, x);
        let one_minus_w = Complex64::new(2.0 * hs * hs, -2.0 * hs * hc);
        let d = 2.0 * hs.abs();
        let err = |i: usize, p: usize| -> f64 {
            let s = self.rem[p][i];
            if s == 0.0 {
                0.0
            } else {
                s / pow(d, p as f64)
            }
        };
        let best = |i: usize| -> (usize, f64) {
            (0..=MAX_ORDER).map(|p| (p, err(i, p))).fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a })
        };
        let (mut lo, mut hi) = (0usize, self.cuts.len() - 1);
        let (i, (p, e)) = if best(hi).1 > self.target_at(d) {
            (hi, best(hi))
        } else {
            while lo < hi {
                let mid = (lo + hi) / 2;
                if best(mid).1 <= self.target_at(d) {
                    hi = mid;
                } else {
                    lo = mid + 1;
                }
            }
            (lo, best(lo))
        };
        let cut = self.cuts[i];
        let mut value = self.head(x, self.n + 1, cut);
        let mut denom = one_minus_w;
        for j in 0..p {
            let from = cut + j as u64 * self.r;
            let mut b = Complex64::new(0.0, 0.0);
            for k in from..from + self.r {
                let (c, s) = cis_tx(k as f64, x);
                let v = self.diff(j, k);
                b += Complex64::new(v * c, v * s);
            }
            value += b / denom;
            denom *= one_minus_w;
        }
        (value, e)
    }

    /// `Σ_{k=a}^{b−1} u_k e^{ikx}` by an anchored rotation recurrence.
    fn head(&self, x: f64, a: u64, b: u64) -> Complex64 {
        let mut re = Neumaier::new();
        let mut im = Neumaier::new();
        let (sc, ss) = cis_tx(1.0, x);
        let mut k = a;
        while k < b {
            let end = (k + ANCHOR).min(b);
            let (mut zc, mut zs) = cis_tx(k as f64, x);
            let (mut br, mut bi) = (0.0, 0.0);
            for j in k..end {
                let v = self.u[j as usize];
                br += v * zc;
                bi += v * zs;
                let t = zc * sc - zs * ss;
                zs = zc * ss + zs * sc;
                zc = t;
            }
            re.add(br);
            im.add(bi);
            k = end;
        }
        Complex64::new(re.value(), im.value())
    }

    /// Pointwise error bound at distance `d` from the singular set, with the largest cut.
    pub(crate) fn floor_error(&self, d: f64) -> f64 {
        let s = 2.0 * sin(0.5 * d * self.r as f64).abs();
        let i = self.cuts.len() - 1;
        (0..=MAX_ORDER)
            .map(|p| if self.rem[p][i] == 0.0 { 0.0 } else { self.rem[p][i] / pow(s, p as f64) })
            .fold(f64::INFINITY, f64::min)
            .max(self.target_at(s))
    }

    /// Bound on `∫|Σ_{k>n} u_k e^{ikx}|dx` over one side `(0, ε]` of one singular point.
    ///
    /// On `d ∈ (π/(M+1), π/M]` the tail is at most `Σ_{n<k≤M}|u_k| + V(max(M,n))/(2 sin(rd/2))`
    /// with `V(L) = Σ_{k>L}|u_k − u_{k+r}| + Σ_{k=L+1}^{L+r}|u_k|`, and `sin(rd/2) ≥ rd/π`.
    pub(crate) fn side_mass(&self, eps: f64) -> f64 {
        if !self.abs_over_k {
            return f64::INFINITY;
        }
        let r = self.r;
        let m0 = crate::math::floor(PI / eps).max(r as f64) as u64;
        let (n, h) = (self.n, self.horizon);
        let abs = |k: u64| self.u[k as usize].abs();

        let mut part1 = Neumaier::new();
        for k in n + 1..=h {
            part1.add(abs(k) / k.max(m0) as f64);
        }
        let a = self.abs_fit;
        if a.scale != 0.0 {
            if m0 > h {
                part1.add(a.sum_between((h + 1) as f64, m0 as f64) / m0 as f64);
                part1.add(power_sum(a.scale, a.exponent + 1.0, (m0 + 1) as f64));
            } else {
                part1.add(power_sum(a.scale, a.exponent + 1.0, (h + 1) as f64));
            }
        }

        // V(L) for n ≤ L ≤ h by a backward pass
        let v = self.var_fit;
        let mut part2 = Neumaier::new();
        let mut suffix = Neumaier::new();
        let mut boundary: Neumaier = (h + 1..=h + r).map(abs).collect();
        let mut v_at_n = 0.0;
        for l in (n..=h).rev() {
            let vl = suffix.value() + v.estimate + boundary.value();
            if l == n {
                v_at_n = vl;
            }
            if l >= m0 {
                part2.add(vl * libm::log1p(1.0 / l as f64));
            }
            suffix.add((self.u[l as usize] - self.u[(l + r) as usize]).abs());
            boundary.add(abs(l) - abs(l + r));
        }
        if m0 < n {
            part2.add(v_at_n * ln(n as f64 / m0 as f64));
        }
        {
            let from = (h + 1).max(m0) as f64;
            if v.scale != 0.0 {
                part2.add(power_sum(v.scale / (v.exponent - 1.0), v.exponent, from));
            }
            if a.scale != 0.0 {
                part2.add(power_sum(r as f64 * a.scale, a.exponent + 1.0, from));
            }
        }
        PI * part1.value() + PI / (2.0 * r as f64) * part2.value()
    }

    /// Lets the pointwise target grow like `1/|1 − w|` down to the exclusion radius `eps`,
    /// keeping its mean over a period below the flat target.
    pub(crate) fn set_spread(&mut self, eps: f64) {
        self.spread = ln(PI / (self.r as f64 * eps)).max(0.0) + 1.0;
    }

    fn target_at(&self, s: f64) -> f64 {
        if self.spread == 0.0 {
            self.target
        } else {
            2.0 * self.target / (s * self.spread)
        }
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.rem[0][0] == 0.0
    }

    pub(crate) fn step(&self) -> u64 {
        self.r
    }

    /// The coefficients tend to zero and have summable `r`-step variation, as far as the fits tell.
    pub(crate) fn has_certificate(&self) -> bool {
        self.var_fit.estimate.is_finite() && (self.abs_fit.scale == 0.0 || self.abs_fit.exponent > 0.0)
    }

    pub(crate) fn uses_fitted_tail(&self) -> bool {
        self.abs_fit.scale != 0.0
    }
}
