//! Double-exponential quadrature and the four integral oracles.

use rayon::prelude::*;
use rug::Float;

use crate::error::{domain, Error, Result};
use crate::numeric::{exponent, pi, Prec, Rational};
use crate::specfun::{norm_bessel_i, scaled_bessel_i, BesselKBracket, HyperParams};
use crate::zeros::hyper_first_zero;

/// Bits carried beyond the requested precision while evaluating integrands.
const QUAD_GUARD: Prec = 40;
const MAX_LEVEL: u32 = 12;
/// Left end of the second panel in semi-infinite integration.
const FIRST_PANEL: f64 = 1.0 / 64.0;

#[derive(Clone, Debug)]
pub struct QuadResult {
    pub value: Float,
    pub err_estimate: Float,
    pub nodes_used: usize,
}

/// Largest `t` worth sampling: beyond it the tanh-sinh weight is below
/// `2^-2(bits + 20)`. The weight falls like the square of the distance to the
/// endpoint, so the margin also covers integrable `x^{-1/2}`-type endpoint
/// singularities.
fn t_max(bits: Prec) -> f64 {
    let target = 2.0 * (bits + 20) as f64 * std::f64::consts::LN_2;
    let mut t = 1.0f64;
    loop {
        let u = std::f64::consts::FRAC_PI_2 * t.sinh();
        let log_w = (std::f64::consts::FRAC_PI_2 * t.cosh()).ln() + 2.0 * std::f64::consts::LN_2 - 2.0 * u;
        if -log_w > target {
            return t;
        }
        t += 0.0625;
    }
}

/// Abscissa and weight (including the `(b-a)/2` Jacobian) at `t = k h`.
fn node(k: i64, level: u32, a: &Float, b: &Float, half_len: &Float, wp: Prec) -> (Float, Float) {
    let t = Float::with_val(wp, k) >> level;
    let half_pi = Float::with_val(wp, pi(wp) / 2u32);
    let (sinh_t, cosh_t) = t.clone().abs().sinh_cosh(Float::new(wp));
    let u = Float::with_val(wp, &half_pi * &sinh_t);
    let e2u = Float::with_val(wp, &u * 2u32).exp();
    // 1/cosh²(u) = 4 e^{2u} / (1 + e^{2u})²
    let denom = Float::with_val(wp, &e2u + 1u32);
    let w = Float::with_val(wp, &half_pi * &cosh_t) * Float::with_val(wp, &e2u * 4u32)
        / Float::with_val(wp, denom.square_ref())
        * half_len;
    // Distance to the nearer endpoint, (b - a) / (1 + e^{2u}), without cancellation.
    let dist = Float::with_val(wp, half_len * 2u32) / denom;
    let x = if k > 0 {
        Float::with_val(wp, b - dist)
    } else if k < 0 {
        Float::with_val(wp, a + dist)
    } else {
        Float::with_val(wp, a + half_len)
    };
    (x, w)
}

fn integrate_with<F>(f: &F, a: &Float, b: &Float, prec: Prec, wp: Prec) -> Result<QuadResult>
where
    F: Fn(&Float) -> Result<Float> + Sync,
{
    let half_len = Float::with_val(wp, Float::with_val(wp, b - a) / 2u32);
    let tm = t_max(wp);
    let mut sum = Float::new(wp);
    let mut prev: Option<Float> = None;
    let mut nodes = 0usize;
    let mut last_diff = Float::with_val(wp, f64::INFINITY);
    for level in 0..=MAX_LEVEL {
        let kmax = (tm * (1u64 << level) as f64).ceil() as i64;
        let ks: Vec<i64> = (-kmax..=kmax).filter(|k| level == 0 || k % 2 != 0).collect();
        let terms: Vec<Result<Float>> = ks
            .par_iter()
            .map(|&k| {
                let (x, w) = node(k, level, a, b, &half_len, wp);
                if w.is_zero() {
                    return Ok(Float::new(wp));
                }
                Ok(f(&x)? * w)
            })
            .collect();
        nodes += ks.len();
        for t in terms {
            sum += t?;
        }
        let est = Float::with_val(wp, &sum >> level);
        if let Some(p) = prev {
            last_diff = Float::with_val(wp, &est - &p).abs();
            let scale = Float::with_val(wp, est.abs_ref());
            if last_diff.is_zero() || (!scale.is_zero() && exponent(&last_diff) < exponent(&scale) - (prec + 8) as i64)
            {
                return Ok(QuadResult {
                    value: est,
                    err_estimate: last_diff,
                    nodes_used: nodes,
                });
            }
        }
        prev = Some(est);
    }
    Err(Error::NonConvergence {
        levels: MAX_LEVEL as usize,
        diff: last_diff.to_string_radix(10, Some(6)),
    })
}

/// `∫_a^b f(x) dx` by tanh-sinh quadrature. Levels halve the step until two
/// successive estimates agree to `2^-(prec+8)` relative; the last difference
/// is reported as the error estimate. Node values are computed in parallel
/// and summed in a fixed order.
pub fn integrate_finite<F>(f: F, a: &Float, b: &Float, prec: Prec) -> Result<QuadResult>
where
    F: Fn(&Float) -> Result<Float> + Sync,
{
    let wp = prec + QUAD_GUARD;
    let r = integrate_with(&f, a, b, prec, wp)?;
    Ok(QuadResult {
        value: Float::with_val(prec, r.value),
        err_estimate: Float::with_val(prec, r.err_estimate),
        nodes_used: r.nodes_used,
    })
}

/// `∫_0^∞ f(x) dx` for `f` positive and eventually decreasing with
/// `f(x) <= C x^{-alpha}`. Pass `f64::INFINITY` for faster-than-algebraic decay.
///
/// The head is integrated over panels `[0, 1/64], [1/64, 1/32], ...`. After
/// each panel ending at `X` the tail is bounded by `f(X) X / (α' - 1)` with
/// `α' = min(alpha, log2(f(X)/f(2X)))`; integration stops once that bound is
/// below `2^-(prec+8)` of the accumulated head.
pub fn integrate_semiinf<F>(f: F, prec: Prec, alpha: f64) -> Result<QuadResult>
where
    F: Fn(&Float) -> Result<Float> + Sync,
{
    if alpha.is_nan() || alpha <= 1.0 {
        return Err(domain(format!(
            "semi-infinite integral needs decay exponent alpha > 1, got {alpha}"
        )));
    }
    let wp = prec + QUAD_GUARD;
    let mut head = Float::new(wp);
    let mut err = Float::new(wp);
    let mut nodes = 0usize;
    let mut a = Float::new(wp);
    let mut b = Float::with_val(wp, FIRST_PANEL);
    for _ in 0..200 {
        let r = integrate_with(&f, &a, &b, prec, wp)?;
        head += &r.value;
        err += &r.err_estimate;
        nodes += r.nodes_used;
        let fb = f(&b)?;
        let b2 = Float::with_val(wp, &b * 2u32);
        let f2b = f(&b2)?;
        nodes += 2;
        if fb.is_zero() {
            break;
        }
        let local = if f2b.is_zero() {
            f64::INFINITY
        } else {
            Float::with_val(wp, &fb / &f2b).log2().to_f64()
        };
        let eff = alpha.min(local);
        if eff > 1.0 {
            let tail = Float::with_val(wp, &fb * &b) / (eff - 1.0);
            if !head.is_zero() && exponent(&tail) < exponent(&head) - (prec + 8) as i64 {
                err += tail;
                return Ok(QuadResult {
                    value: Float::with_val(prec, head),
                    err_estimate: Float::with_val(prec, err),
                    nodes_used: nodes,
                });
            }
        }
        a = b;
        b = b2;
    }
    Err(Error::NonConvergence {
        levels: 200,
        diff: "tail bound never cleared".into(),
    })
}

/// `exp(n log v)` for `v > 0`; zero for `v <= 0`.
fn power(v: Float, n: &Float) -> Float {
    if v.cmp0() != Some(std::cmp::Ordering::Greater) {
        return Float::new(v.prec());
    }
    let p = v.prec();
    Float::with_val(p, v.ln() * n).exp()
}

fn check_n(n: &Float) -> Result<()> {
    if !n.is_finite() || *n <= 0 {
        return Err(domain(format!("n must be positive, got {n}")));
    }
    Ok(())
}

/// `∫_0^∞ (e^{-x} Γ(1+ν) I_ν(x) / (x/2)^ν)^n dx`.
pub fn oracle_in(nu: Rational, n: &Float, prec: Prec) -> Result<QuadResult> {
    check_n(n)?;
    if nu <= Rational::new(-1, 2)? {
        return Err(domain(format!("I-case requires ν > -1/2, got ν = {nu}")));
    }
    let wp = prec + QUAD_GUARD + 16;
    let nu_b = nu.to_big(wp);
    let n_b = Float::with_val(wp, n);
    let alpha = n.to_f64() * (nu.to_f64() + 0.5);
    integrate_semiinf(|x| Ok(power(scaled_bessel_i(&nu_b, x, wp)?, &n_b)), prec, alpha)
}

/// `∫_0^∞ (Γ(1+ν) I_ν(x) / (x/2)^ν)^{-n} dx`.
pub fn oracle_in_hat(nu: Rational, n: &Float, prec: Prec) -> Result<QuadResult> {
    check_n(n)?;
    if nu < Rational::from_int(0) {
        return Err(domain(format!("Ihat-case requires ν >= 0, got ν = {nu}")));
    }
    let wp = prec + QUAD_GUARD + 16;
    let nu_b = nu.to_big(wp);
    let neg_n = Float::with_val(wp, -n);
    integrate_semiinf(|x| Ok(power(norm_bessel_i(&nu_b, x, wp)?, &neg_n)), prec, f64::INFINITY)
}

/// `∫_0^∞ (2 e^x (x/2)^ν K_ν(x) / Γ(ν))^{-n} dx`.
pub fn oracle_kn(nu: Rational, n: &Float, prec: Prec) -> Result<QuadResult> {
    check_n(n)?;
    let wp = prec + QUAD_GUARD + 16;
    let bracket = BesselKBracket::new(nu, wp)?;
    let neg_n = Float::with_val(wp, -n);
    let alpha = n.to_f64() * (nu.to_f64() - 0.5);
    integrate_semiinf(|x| Ok(power(bracket.eval(x)?, &neg_n)), prec, alpha)
}

/// `∫_0^{j_1} ₀F_m(-(x/p)^p)^n dx` with `j_1` from [`hyper_first_zero`].
pub fn oracle_jn(hp: &HyperParams, n: &Float, prec: Prec) -> Result<QuadResult> {
    check_n(n)?;
    let wp = prec + QUAD_GUARD + 16;
    let zero = hyper_first_zero(hp, wp)?;
    let n_b = Float::with_val(wp, n);
    integrate_finite(
        |x| Ok(power(crate::specfun::norm_hyper_bessel(hp, x, wp)?, &n_b)),
        &Float::new(wp),
        &zero.value,
        prec,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{pow2, rel_dev};

    const P: Prec = 128;

    fn tight(r: &QuadResult, want: &Float) -> bool {
        rel_dev(&r.value, want) < pow2(4 - P as i64, 64)
    }

    #[test]
    fn finite_polynomial_and_sine() {
        let zero = Float::new(P);
        let one = Float::with_val(P, 1);
        let r = integrate_finite(|x| Ok(Float::with_val(P + 40, x)), &zero, &one, P).unwrap();
        assert!(tight(&r, &Float::with_val(P, 0.5)));
        assert!(r.err_estimate >= 0);
        let r = integrate_finite(|x| Ok(Float::with_val(P + 40, x.sin_ref())), &zero, &pi(P + 40), P).unwrap();
        assert!(tight(&r, &Float::with_val(P, 2)));
    }

    #[test]
    fn finite_endpoint_singularity() {
        // ∫_0^1 x^{-1/2} dx = 2
        let r = integrate_finite(
            |x| Ok(Float::with_val(P + 40, x.sqrt_ref()).recip()),
            &Float::new(P),
            &Float::with_val(P, 1),
            P,
        )
        .unwrap();
        assert!(rel_dev(&r.value, &Float::with_val(P, 2)) < 1e-30);
    }

    #[test]
    fn semiinf_exponential_and_algebraic() {
        let r = integrate_semiinf(|x| Ok(Float::with_val(P + 40, -x).exp()), P, f64::INFINITY).unwrap();
        assert!(tight(&r, &Float::with_val(P, 1)));
        let r = integrate_semiinf(
            |x| Ok(Float::with_val(P + 40, x + 1u32).square().recip() / (x + Float::with_val(P + 40, 1))),
            P,
            3.0,
        )
        .unwrap();
        assert!(tight(&r, &Float::with_val(P, 0.5)));
        assert!(integrate_semiinf(|x| Ok(x.clone()), P, 1.0).is_err());
    }

    #[test]
    fn oracle_in_leading_behaviour() {
        // I_n ≈ 1/n (1 + 1/(2n) + ...) at ν = 0
        let n = Float::with_val(P, 1000);
        let r = oracle_in(Rational::from_int(0), &n, 96).unwrap();
        let dev = rel_dev(&r.value, &Float::with_val(96, 0.001)).to_f64();
        assert!(dev < 0.01 && dev > 1e-4);
    }
}
