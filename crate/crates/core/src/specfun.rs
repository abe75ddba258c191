//! Normalized Bessel-type functions that appear in the integrands.
//!
//! All three functions are hypergeometric series normalized to 1 at `x = 0`:
//!
//! * `Γ(1+ν) I_ν(x) / (x/2)^ν = Σ (x/2)^{2k} / ((1+ν)_k k!)`
//! * `2 e^x (x/2)^ν K_ν(x) / Γ(ν)` for non-integer `ν > 1/2`
//! * `₀F_m(; σ_1+1, ..., σ_m+1; -(x/p)^p)` with `p = m + 1`

use std::cmp::Ordering;
use std::fmt;

use rug::ops::Pow;
use rug::Float;

use crate::error::{domain, Result};
use crate::numeric::{exponent, gamma, pi, Prec, Rational, GUARD_BITS};

/// Parameters of the hyper-Bessel function `J_{σ_1, ..., σ_m}`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct HyperParams {
    sigma: Vec<Rational>,
}

impl HyperParams {
    pub fn new(sigma: Vec<Rational>) -> Result<Self> {
        if sigma.is_empty() {
            return Err(domain("hyper-Bessel parameters need m >= 1"));
        }
        if let Some(s) = sigma.iter().find(|s| **s <= Rational::from_int(-1)) {
            return Err(domain(format!("hyper-Bessel parameters need every σ_j > -1, got {s}")));
        }
        Ok(HyperParams { sigma })
    }

    /// The classical Bessel case `m = 1`, `σ_1 = ν`.
    pub fn bessel(nu: Rational) -> Result<Self> {
        Self::new(vec![nu])
    }

    pub fn sigma(&self) -> &[Rational] {
        &self.sigma
    }

    pub fn m(&self) -> u32 {
        self.sigma.len() as u32
    }

    pub fn p(&self) -> u32 {
        self.m() + 1
    }

    pub fn sigma_sum(&self) -> Rational {
        self.sigma.iter().fold(Rational::from_int(0), |a, &s| a + s)
    }

    /// `μ_k = Π_j (σ_j + k)^{-1}`.
    pub fn mu(&self, k: u32, prec: Prec) -> Float {
        let mut den = Float::with_val(prec + 8, 1);
        for s in &self.sigma {
            den *= (*s + Rational::from(k as i64)).to_big(prec + 8);
        }
        Float::with_val(prec, den.recip())
    }

    /// `γ_k = μ_k / μ_1 = Π_j (σ_j + 1) / (σ_j + k)`, exact.
    pub fn gamma_ratio(&self, k: u32) -> Rational {
        self.sigma.iter().fold(Rational::from_int(1), |acc, &s| {
            acc * (s + Rational::from_int(1)) / (s + Rational::from(k as i64))
        })
    }

    /// Exponent `ϑ` of the algebraic factor in the large-`x` behaviour,
    /// `ϑ = -m/2 - Σ σ_j`.
    pub fn theta(&self) -> Rational {
        Rational::new(-(self.m() as i64), 2).expect("nonzero") - self.sigma_sum()
    }
}

impl fmt::Display for HyperParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list: Vec<String> = self.sigma.iter().map(|s| s.to_string()).collect();
        write!(f, "m={}, sigma=({})", self.m(), list.join(", "))
    }
}

impl fmt::Debug for HyperParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn check_x(x: &Float) -> Result<()> {
    if !x.is_finite() || x.cmp0() == Some(Ordering::Less) {
        return Err(domain(format!("argument must be finite and x >= 0, got {x}")));
    }
    Ok(())
}

/// Sums `Σ t_k` with `t_0 = 1` and `t_{k+1} = t_k · ratio(k)`. Stops once the
/// geometric tail bound `|t_k| r / (1 - r)`, with `r` bounding all later term
/// ratios, drops below `2^-bits` relative to the largest partial sum seen.
/// `ratio_bound(k)` must bound `|ratio(j)|` for all `j >= k` or return `None`.
fn hypergeometric_sum<R, B>(prec: Prec, bits: Prec, mut ratio: R, mut ratio_bound: B) -> Float
where
    R: FnMut(usize, &mut Float),
    B: FnMut(usize) -> Option<f64>,
{
    let mut sum = Float::with_val(prec, 1);
    let mut term = Float::with_val(prec, 1);
    let mut scale = Float::with_val(prec, 1);
    for k in 0.. {
        ratio(k, &mut term);
        sum += &term;
        let abs_sum = Float::with_val(prec, sum.abs_ref());
        if abs_sum > scale {
            scale = abs_sum;
        }
        if term.is_zero() {
            break;
        }
        if let Some(r) = ratio_bound(k + 1) {
            if r < 1.0 {
                let tail_log2 = exponent(&term) as f64 + (r / (1.0 - r)).log2();
                if tail_log2 < (exponent(&scale) - bits as i64) as f64 {
                    break;
                }
            }
        }
    }
    sum
}

/// `Γ(1+ν) I_ν(x) / (x/2)^ν = Σ (x/2)^{2k} / ((1+ν)_k k!)`.
pub fn norm_bessel_i(nu: &Float, x: &Float, prec: Prec) -> Result<Float> {
    if !nu.is_finite() || *nu <= -1 {
        return Err(domain(format!("normalized I_ν needs ν > -1, got ν = {nu}")));
    }
    check_x(x)?;
    let wp = prec + GUARD_BITS;
    let q = Float::with_val(wp, x.square_ref()) / 4u32;
    let nu_w = Float::with_val(wp, nu);
    let q64 = q.to_f64();
    let nu64 = nu.to_f64();
    let s = hypergeometric_sum(
        wp,
        prec + 8,
        |k, t| {
            let kk = (k + 1) as u32;
            *t *= &q;
            *t /= Float::with_val(wp, &nu_w + kk) * kk;
        },
        |k| {
            let kk = (k + 1) as f64;
            let d = (nu64 + kk) * kk;
            (d > 0.0).then(|| q64 / d)
        },
    );
    Ok(Float::with_val(prec, s))
}

/// `e^{-x} Γ(1+ν) I_ν(x) / (x/2)^ν`, the base of the I-case integrand.
pub fn scaled_bessel_i(nu: &Float, x: &Float, prec: Prec) -> Result<Float> {
    let wp = prec + 16;
    let v = norm_bessel_i(nu, x, wp)?;
    Ok(Float::with_val(prec, v * Float::with_val(wp, -x).exp()))
}

/// Evaluator for the bracket `2 e^x (x/2)^ν K_ν(x) / Γ(ν)`.
///
/// For moderate `x` the bracket is `e^x (S_1 + g (x/2)^{2ν} S_2)` with
/// `S_1 = Σ (x/2)^{2k}/((1-ν)_k k!)`, `S_2 = Σ (x/2)^{2k}/((1+ν)_k k!)` and
/// `g = Γ(-ν)/Γ(ν)`. The two parts are each of size `e^x` and cancel down
/// to `O(e^{-x} x^{ν-1/2})`, so the series branch runs with `2x / ln 2 + 64` extra
/// bits. Past `large_x` the Hankel expansion
/// `e^x K_ν(x) = √(π/2x) Σ a_k(ν) x^{-k}` takes over; its remainder is
/// bounded by the first omitted term.
#[derive(Clone, Debug)]
pub struct BesselKBracket {
    nu: Rational,
    prec: Prec,
    large_x: f64,
    gamma_ratio: Float,
    gamma_nu: Float,
}

impl BesselKBracket {
    pub fn new(nu: Rational, prec: Prec) -> Result<Self> {
        if nu.is_integer() {
            return Err(domain(format!(
                "K-case requires ν > 1/2, non-integer (integer ν = {nu} is the logarithmic case)"
            )));
        }
        if nu <= Rational::new(1, 2)? {
            return Err(domain(format!("K-case requires ν > 1/2, non-integer, got ν = {nu}")));
        }
        // The smallest Hankel term is about e^{-2x}.
        let large_x = (prec + 16) as f64 * std::f64::consts::LN_2 / 2.0 + 8.0;
        let top = Self::series_prec(prec, large_x);
        let nu_b = nu.to_big(top + 16);
        let gamma_nu = gamma(&nu_b, top)?;
        let gamma_ratio = Float::with_val(top, gamma(&Float::with_val(top + 16, -&nu_b), top)? / &gamma_nu);
        Ok(BesselKBracket {
            nu,
            prec,
            large_x,
            gamma_ratio,
            gamma_nu,
        })
    }

    fn series_prec(prec: Prec, x: f64) -> Prec {
        prec + GUARD_BITS + (2.0 * x / std::f64::consts::LN_2).ceil() as Prec + 64
    }

    pub fn nu(&self) -> Rational {
        self.nu
    }

    /// Abscissa beyond which the Hankel expansion is used.
    pub fn large_x(&self) -> f64 {
        self.large_x
    }

    pub fn eval(&self, x: &Float) -> Result<Float> {
        check_x(x)?;
        if x.is_zero() {
            return Ok(Float::with_val(self.prec, 1));
        }
        if x.to_f64() >= self.large_x {
            if let Some(v) = self.eval_hankel(x) {
                return Ok(v);
            }
        }
        Ok(self.eval_series(x))
    }

    fn eval_series(&self, x: &Float) -> Float {
        let wp = Self::series_prec(self.prec, x.to_f64());
        let half = Float::with_val(wp, x) / 2u32;
        let q = Float::with_val(wp, half.square_ref());
        let q64 = q.to_f64();
        let nu = self.nu.to_big(wp);
        let nu64 = self.nu.to_f64();
        let s1 = hypergeometric_sum(
            wp,
            wp,
            |k, t| {
                let kk = (k + 1) as u32;
                *t *= &q;
                *t /= Float::with_val(wp, kk - &nu) * kk;
            },
            |k| {
                let kk = (k + 1) as f64;
                let d = (kk - nu64) * kk;
                (d > 0.0).then(|| q64 / d)
            },
        );
        let s2 = hypergeometric_sum(
            wp,
            wp,
            |k, t| {
                let kk = (k + 1) as u32;
                *t *= &q;
                *t /= Float::with_val(wp, &nu + kk) * kk;
            },
            |k| {
                let kk = (k + 1) as f64;
                Some(q64 / ((kk + nu64) * kk))
            },
        );
        let two_nu = Float::with_val(wp, &nu * 2u32);
        let power = Float::with_val(wp, half.pow(&two_nu));
        let g = Float::with_val(wp, &self.gamma_ratio);
        let v = (s1 + g * power * s2) * Float::with_val(wp, x).exp();
        Float::with_val(self.prec, v)
    }

    fn eval_hankel(&self, x: &Float) -> Option<Float> {
        let wp = self.prec + GUARD_BITS;
        let xw = Float::with_val(wp, x);
        let mu = Float::with_val(wp, self.nu.to_big(wp).square_ref()) * 4u32;
        let eight_x = Float::with_val(wp, &xw * 8u32);
        let mut sum = Float::with_val(wp, 1);
        let mut term = Float::with_val(wp, 1);
        let target = -((self.prec + 16) as i64);
        let min_k = (self.nu.to_f64() - 0.5).ceil().max(0.0) as u32;
        let mut converged = false;
        for k in 1..10_000u32 {
            let odd = (2 * k - 1) as u64;
            let factor = Float::with_val(wp, &mu - odd * odd);
            let prev = term.clone();
            term *= factor;
            term /= Float::with_val(wp, &eight_x * k);
            if k > min_k && Float::with_val(wp, term.abs_ref()) > Float::with_val(wp, prev.abs_ref()) {
                break;
            }
            if term.is_zero() || (k > min_k && exponent(&term) < target) {
                sum += &term;
                converged = true;
                break;
            }
            sum += &term;
        }
        if !converged {
            return None;
        }
        // 2 (x/2)^ν √(π/(2x)) Σ / Γ(ν)
        let half = Float::with_val(wp, &xw / 2u32);
        let nu = self.nu.to_big(wp);
        let pref = Float::with_val(wp, half.pow(&nu)) * Float::with_val(wp, pi(wp) / (xw * 2u32)).sqrt();
        let v = pref * sum * 2u32 / Float::with_val(wp, &self.gamma_nu);
        Some(Float::with_val(self.prec, v))
    }
}

/// `2 e^x (x/2)^ν K_ν(x) / Γ(ν)` for non-integer `ν > 1/2` (equals 1 at `x = 0`).
pub fn norm_bessel_k(nu: Rational, x: &Float, prec: Prec) -> Result<Float> {
    BesselKBracket::new(nu, prec)?.eval(x)
}

/// log2 of the largest term of `₀F_m(-z)` together with the index where the
/// terms have fallen well below it; computed in `f64` to size the working
/// precision.
fn hyper_term_profile(hp: &HyperParams, z: f64) -> f64 {
    if z <= 0.0 {
        return 0.0;
    }
    let lz = z.ln();
    let mut log_t = 0.0f64;
    let mut best = 0.0f64;
    for k in 1..1_000_000u64 {
        let kf = k as f64;
        let mut step = lz - kf.ln();
        for s in hp.sigma() {
            step -= (s.to_f64() + kf).ln();
        }
        log_t += step;
        best = best.max(log_t);
        if step < 0.0 && log_t < best - 60.0 {
            break;
        }
    }
    best / std::f64::consts::LN_2
}

/// `₀F_m(; σ+1; -(x/p)^p)` and, optionally, its `x`-derivative, both summed
/// term-wise.
fn hyper_series(hp: &HyperParams, x: &Float, prec: Prec, with_deriv: bool) -> (Float, Float) {
    let p = hp.p();
    let xf = x.to_f64();
    let z64 = (xf / p as f64).powi(p as i32);
    let inflate = hyper_term_profile(hp, z64).ceil().max(0.0) as Prec;
    let wp = prec + GUARD_BITS + inflate;
    let z = Float::with_val(wp, Float::with_val(wp, x) / p).pow(p);
    let sigma: Vec<Float> = hp.sigma().iter().map(|s| s.to_big(wp)).collect();
    let mut sum = Float::with_val(wp, 1);
    let mut dsum = Float::new(wp);
    let mut term = Float::with_val(wp, 1);
    let target = exponent(&Float::with_val(wp, 1)) - (prec + 16) as i64 - inflate as i64;
    for k in 1..1_000_000u32 {
        term *= &z;
        term /= k;
        for s in &sigma {
            term /= Float::with_val(wp, s + k);
        }
        term = -term;
        sum += &term;
        if with_deriv {
            dsum += Float::with_val(wp, &term * k);
        }
        // ratio of successive terms decreases once k exceeds z^{1/p}-ish;
        // the bound is checked in f64 from the current index on.
        let kf = (k + 1) as f64;
        let mut r = z64 / kf;
        for s in hp.sigma() {
            r /= s.to_f64() + kf;
        }
        if r < 0.5 && exponent(&term) + 1 < target {
            break;
        }
        if term.is_zero() {
            break;
        }
    }
    let deriv = if with_deriv && !x.is_zero() {
        // d/dx of z^k is k p z^k / x
        Float::with_val(wp, dsum * p) / Float::with_val(wp, x)
    } else {
        Float::new(wp)
    };
    (Float::with_val(prec, sum), Float::with_val(prec, deriv))
}

/// Normalized hyper-Bessel function `₀F_m(; σ_1+1, ..., σ_m+1; -(x/p)^p)`.
/// The working precision grows with the largest series term to absorb the
/// alternating cancellation.
pub fn norm_hyper_bessel(hp: &HyperParams, x: &Float, prec: Prec) -> Result<Float> {
    check_x(x)?;
    Ok(hyper_series(hp, x, prec, false).0)
}

/// Value and `x`-derivative of the normalized hyper-Bessel function.
pub fn norm_hyper_bessel_with_derivative(hp: &HyperParams, x: &Float, prec: Prec) -> Result<(Float, Float)> {
    check_x(x)?;
    Ok(hyper_series(hp, x, prec, true))
}

/// The un-normalized `J_{σ_1..σ_m}(x) = (x/p)^{Σσ} / Π Γ(σ_j+1) · ₀F_m(...)`.
pub fn hyper_bessel(hp: &HyperParams, x: &Float, prec: Prec) -> Result<Float> {
    let wp = prec + 16;
    let f = norm_hyper_bessel(hp, x, wp)?;
    let mut scale = Float::with_val(wp, Float::with_val(wp, x) / hp.p()).pow(hp.sigma_sum().to_big(wp));
    for s in hp.sigma() {
        scale /= gamma(&(*s + Rational::from_int(1)).to_big(wp), wp)?;
    }
    Ok(Float::with_val(prec, f * scale))
}

/// Leading large-`x` form of the un-normalized hyper-Bessel function:
///
/// `2 (2π)^{-m/2} p^{-1/2} (x/p)^{-m/2} e^{x cos(π/p)} cos(x sin(π/p) + πϑ/p)`.
pub fn hyper_bessel_asym(hp: &HyperParams, x: &Float, prec: Prec) -> Result<Float> {
    if x.cmp0() != Some(Ordering::Greater) {
        return Err(domain("asymptotic form needs x > 0"));
    }
    let wp = prec + GUARD_BITS + exponent(x).max(0) as Prec;
    let m = hp.m();
    let p = hp.p();
    let xw = Float::with_val(wp, x);
    let pi_w = pi(wp);
    let angle = Float::with_val(wp, &pi_w / p);
    let (sin_a, cos_a) = angle.sin_cos(Float::new(wp));
    let two_pi = Float::with_val(wp, &pi_w * 2u32);
    let half_m = Float::with_val(wp, m) / 2u32;
    let amp = Float::with_val(wp, two_pi.pow(-half_m.clone())) * 2u32 / Float::with_val(wp, p).sqrt()
        * Float::with_val(wp, Float::with_val(wp, &xw / p).pow(-half_m));
    let growth = Float::with_val(wp, &xw * &cos_a).exp();
    let phase = Float::with_val(wp, &xw * &sin_a) + hp.theta().to_big(wp) * pi_w / p;
    let v = amp * growth * phase.cos();
    Ok(Float::with_val(prec, v))
}

/// Abscissae near `x0` where the cosine factor of the asymptotic form is `±1`.
pub fn envelope_peak_near(hp: &HyperParams, x0: f64, prec: Prec) -> Float {
    let wp = prec + 16;
    let p = hp.p();
    let pi_w = pi(wp);
    let s = Float::with_val(wp, &pi_w / p).sin();
    let shift = hp.theta().to_big(wp) * Float::with_val(wp, &pi_w / p);
    // x sin(π/p) + πϑ/p = jπ
    let j = ((x0 * s.to_f64() + shift.to_f64()) / std::f64::consts::PI).round();
    let x = (Float::with_val(wp, j) * &pi_w - shift) / s;
    Float::with_val(prec, x)
}
