//! First positive zero of the hyper-Bessel function.

use rug::ops::Pow;
use rug::Float;

use crate::error::{Error, Result};
use crate::numeric::{exponent, Prec, GUARD_BITS};
use crate::specfun::{norm_hyper_bessel, norm_hyper_bessel_with_derivative, HyperParams};

#[derive(Clone, Debug)]
pub struct ZeroResult {
    pub value: Float,
    pub bracket_lo: Float,
    pub bracket_hi: Float,
    /// `|₀F_m|` at `value`.
    pub residual: Float,
}

/// The a-priori bounds `p μ_1^{-1/p} < j_1 < p (μ_1 - μ_2)^{-1/p}`.
pub fn zero_bounds(hp: &HyperParams, prec: Prec) -> (Float, Float) {
    let p = hp.p();
    let inv_p = -(Float::with_val(prec, 1) / p);
    let mu1 = hp.mu(1, prec);
    let mu2 = hp.mu(2, prec);
    let lo = Float::with_val(prec, mu1.clone().pow(&inv_p)) * p;
    let hi = Float::with_val(prec, Float::with_val(prec, mu1 - mu2).pow(&inv_p)) * p;
    (lo, hi)
}

fn sign(hp: &HyperParams, x: &Float, prec: Prec) -> Result<i32> {
    let v = norm_hyper_bessel(hp, x, prec)?;
    Ok(match v.cmp0() {
        Some(std::cmp::Ordering::Greater) => 1,
        Some(std::cmp::Ordering::Less) => -1,
        _ => 0,
    })
}

/// Smallest positive zero of `₀F_m(-(x/p)^p)`, refined to `prec` bits.
///
/// The a-priori bounds are checked, not trusted: the bracket is widened by
/// halving the lower end and doubling the upper end (up to 4x) until the
/// function is positive at the left end and negative at the right one.
/// Bisection runs to 20 bits, then Newton with the term-wise derivative,
/// falling back to bisection whenever an iterate leaves the bracket.
pub fn hyper_first_zero(hp: &HyperParams, prec: Prec) -> Result<ZeroResult> {
    let wp = prec + GUARD_BITS;
    let (bound_lo, bound_hi) = zero_bounds(hp, wp);
    let mut lo = bound_lo.clone();
    let mut hi = bound_hi.clone();
    let mut widen = 1u32;
    while sign(hp, &lo, wp)? <= 0 || sign(hp, &hi, wp)? >= 0 {
        if widen >= 4 {
            return Err(Error::NoSignChange {
                lo: lo.to_string(),
                hi: hi.to_string(),
            });
        }
        widen *= 2;
        lo = Float::with_val(wp, &bound_lo / widen);
        hi = Float::with_val(wp, &bound_hi * widen);
    }
    // Below the a-priori lower bound the series has no zero only if the
    // bound holds; make sure no earlier sign change is skipped.
    if lo < bound_lo {
        let steps = 64;
        let mut prev = lo.clone();
        for i in 1..=steps {
            let x = Float::with_val(wp, &lo + Float::with_val(wp, &hi - &lo) * i / steps);
            if sign(hp, &x, wp)? <= 0 {
                hi = x;
                lo = prev;
                break;
            }
            prev = x;
        }
    }
    let (bracket_lo, bracket_hi) = (
        Float::with_val(prec, lo.clone().min(&bound_lo)),
        Float::with_val(prec, hi.clone().max(&bound_hi)),
    );

    while exponent(&Float::with_val(wp, &hi - &lo)) > exponent(&lo) - 20 {
        let mid = Float::with_val(wp, &lo + &hi) / 2u32;
        match sign(hp, &mid, wp)? {
            0 => {
                lo = mid.clone();
                hi = mid;
                break;
            }
            s if s > 0 => lo = mid,
            _ => hi = mid,
        }
    }

    let mut x = Float::with_val(wp, &lo + &hi) / 2u32;
    let target = exponent(&x) - (prec + 8) as i64;
    for _ in 0..200 {
        let (f, df) = norm_hyper_bessel_with_derivative(hp, &x, wp)?;
        if f.is_zero() {
            break;
        }
        if f.cmp0() == Some(std::cmp::Ordering::Greater) {
            lo = x.clone();
        } else {
            hi = x.clone();
        }
        let mut next = Float::with_val(wp, &x - Float::with_val(wp, &f / &df));
        if df.is_zero() || next <= lo || next >= hi {
            next = Float::with_val(wp, &lo + &hi) / 2u32;
        }
        let step = Float::with_val(wp, &next - &x);
        x = next;
        if step.is_zero() || exponent(&step) < target {
            break;
        }
    }
    let residual = Float::with_val(prec, norm_hyper_bessel(hp, &x, wp)?.abs());
    Ok(ZeroResult {
        value: Float::with_val(prec, x),
        bracket_lo,
        bracket_hi,
        residual,
    })
}
