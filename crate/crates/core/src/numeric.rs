//! Multiprecision reals, exact rationals and the gamma function.
//!
//! Reals are [`rug::Float`] values. Every routine takes the target precision
//! in bits explicitly and rounds its result to it; intermediate work is done
//! with guard bits chosen locally.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::OnceLock;

use num_integer::Integer as _;
use num_rational::Ratio;
use rug::float::Constant;
use rug::{Float, Integer};

use crate::error::{domain, Error, Result};

/// Arbitrary-precision real. The precision travels with each value.
pub type BigReal = Float;

/// Working precision in bits.
pub type Prec = u32;

/// Guard bits added on top of a requested output precision.
pub const GUARD_BITS: Prec = 32;

/// Exact rational with `i64` numerator and denominator, kept reduced with a
/// positive denominator.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rational(Ratio<i64>);

impl Rational {
    pub fn new(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(domain("rational with zero denominator"));
        }
        Ok(Rational(Ratio::new(num, den)))
    }

    pub const fn from_int(n: i64) -> Self {
        Rational(Ratio::new_raw(n, 1))
    }

    pub fn numer(&self) -> i64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i64 {
        *self.0.denom()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_zero(&self) -> bool {
        self.numer() == 0
    }

    pub fn floor(&self) -> i64 {
        self.0.floor().to_integer()
    }

    pub fn ceil(&self) -> i64 {
        self.0.ceil().to_integer()
    }

    pub fn to_f64(&self) -> f64 {
        self.numer() as f64 / self.denom() as f64
    }

    pub fn to_big(&self, prec: Prec) -> Float {
        Float::with_val(prec, self.numer()) / self.denom()
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_int(n)
    }
}

impl Add for Rational {
    type Output = Rational;
    fn add(self, rhs: Rational) -> Rational {
        Rational(self.0 + rhs.0)
    }
}

impl Sub for Rational {
    type Output = Rational;
    fn sub(self, rhs: Rational) -> Rational {
        Rational(self.0 - rhs.0)
    }
}

impl Mul for Rational {
    type Output = Rational;
    fn mul(self, rhs: Rational) -> Rational {
        Rational(self.0 * rhs.0)
    }
}

impl Div for Rational {
    type Output = Rational;
    fn div(self, rhs: Rational) -> Rational {
        assert!(!rhs.is_zero(), "rational division by zero");
        Rational(self.0 / rhs.0)
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom() == 1 {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Accepts `p/q`, integers, and terminating decimals such as `0.75`.
impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::ParseRational(s.to_string());
        let t = s.trim();
        if let Some((n, d)) = t.split_once('/') {
            let n: i64 = n.trim().parse().map_err(|_| bad())?;
            let d: i64 = d.trim().parse().map_err(|_| bad())?;
            return Rational::new(n, d).map_err(|_| bad());
        }
        if let Some((int, frac)) = t.split_once('.') {
            if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) || frac.len() > 15 {
                return Err(bad());
            }
            let neg = int.starts_with('-');
            let int_abs: i64 = int.trim_start_matches(['-', '+']).parse().unwrap_or(0);
            if !int.trim_start_matches(['-', '+']).is_empty()
                && int.trim_start_matches(['-', '+']).parse::<i64>().is_err()
            {
                return Err(bad());
            }
            let scale = 10i64.pow(frac.len() as u32);
            let frac_v: i64 = frac.parse().map_err(|_| bad())?;
            let mag = int_abs
                .checked_mul(scale)
                .and_then(|v| v.checked_add(frac_v))
                .ok_or_else(bad)?;
            return Rational::new(if neg { -mag } else { mag }, scale);
        }
        t.parse::<i64>().map(Rational::from_int).map_err(|_| bad())
    }
}

pub fn lcm(a: u32, b: u32) -> u32 {
    a.lcm(&b)
}

pub fn pi(prec: Prec) -> Float {
    Float::with_val(prec, Constant::Pi)
}

/// Binary exponent of `x` (so `2^(e-1) <= |x| < 2^e`), or 0 for zero.
pub(crate) fn exponent(x: &Float) -> i64 {
    x.get_exp().map(i64::from).unwrap_or(0)
}

/// `2^e` at the given precision.
pub(crate) fn pow2(e: i64, prec: Prec) -> Float {
    Float::with_val(prec, 1) << (e as i32)
}

/// Relative deviation `|a - b| / |b|` (absolute when `b` is zero).
pub fn rel_dev(a: &Float, b: &Float) -> Float {
    let prec = a.prec().max(b.prec());
    let diff = Float::with_val(prec, a - b).abs();
    if b.is_zero() {
        diff
    } else {
        diff / Float::with_val(prec, b.abs_ref())
    }
}

const MAX_BERNOULLI: usize = 202;

/// Bernoulli numbers `B_0 ..= B_MAX_BERNOULLI` as exact rationals.
fn bernoulli_table() -> &'static [rug::Rational] {
    static TABLE: OnceLock<Vec<rug::Rational>> = OnceLock::new();
    TABLE.get_or_init(|| {
        // B_m = -1/(m+1) * sum_{k<m} C(m+1, k) B_k
        let mut b: Vec<rug::Rational> = Vec::with_capacity(MAX_BERNOULLI + 1);
        b.push(rug::Rational::from(1));
        for m in 1..=MAX_BERNOULLI {
            if m > 1 && m % 2 == 1 {
                b.push(rug::Rational::new());
                continue;
            }
            let mut acc = rug::Rational::new();
            for (k, bk) in b.iter().enumerate() {
                if bk.cmp0().is_eq() {
                    continue;
                }
                let c = Integer::from(Integer::binomial_u(m as u32 + 1, k as u32));
                acc += rug::Rational::from(bk * c);
            }
            acc /= -(m as i64 + 1);
            b.push(acc);
        }
        b
    })
}

/// Bernoulli number `B_k` (exact), `k <= 202`.
pub fn bernoulli(k: usize) -> rug::Rational {
    bernoulli_table()[k].clone()
}

/// Chooses a shift threshold and a number of Stirling terms so that the
/// first omitted term `|B_{2N+2}| / ((2N+2)(2N+1) X^{2N+1})` is below `2^-bits`.
fn stirling_plan(bits: Prec) -> (Float, usize) {
    let lo = 64;
    let target = -(bits as f64) - 8.0;
    let mut x = (bits as f64 / 4.0).max(12.0);
    loop {
        let xf = Float::with_val(lo, x);
        let log2x = xf.clone().log2().to_f64();
        for n in 1..(MAX_BERNOULLI / 2) {
            let k = 2 * n + 2;
            let b = Float::with_val(lo, &bernoulli_table()[k]).abs();
            let log2b = b.log2().to_f64();
            let bound = log2b - ((k * (k - 1)) as f64).log2() - (k as f64 - 1.0) * log2x;
            if bound < target {
                return (xf.ceil(), n);
            }
        }
        x *= 1.5;
    }
}

/// `ln Γ(y)` by the Stirling series, for `y` at or beyond the planned threshold.
fn ln_gamma_stirling(y: &Float, terms: usize, prec: Prec) -> Float {
    let ln2pi = Float::with_val(prec, pi(prec) * 2u32).ln();
    let half = Float::with_val(prec, 0.5);
    let mut s = Float::with_val(prec, y - &half) * Float::with_val(prec, y.ln_ref()) - y;
    s += ln2pi / 2u32;
    let y2 = Float::with_val(prec, y.square_ref());
    let mut ypow = y.clone();
    for k in 1..=terms {
        let b = &bernoulli_table()[2 * k];
        let denom = (2 * k * (2 * k - 1)) as u64;
        let term = Float::with_val(prec, b) / denom / &ypow;
        s += term;
        ypow *= &y2;
    }
    s
}

fn gamma_positive(x: &Float, prec: Prec) -> Float {
    let (threshold, terms) = stirling_plan(prec);
    let mut y = Float::with_val(prec, x);
    let mut prod = Float::with_val(prec, 1);
    let mut shifted = false;
    while y < threshold {
        prod *= &y;
        y += 1u32;
        shifted = true;
    }
    // |ln Γ(y)| ~ y ln y; exponentiating costs that many bits of accuracy.
    let mag = Float::with_val(53, &y).to_f64().max(2.0);
    let extra = (mag * mag.ln()).log2().ceil().max(0.0) as Prec + 8;
    let wp = prec + extra;
    let yw = Float::with_val(wp, &y);
    let lg = ln_gamma_stirling(&yw, terms, wp);
    let g = lg.exp();
    if shifted {
        Float::with_val(prec, g / prod)
    } else {
        Float::with_val(prec, g)
    }
}

/// Γ(x) for real `x` that is not a non-positive integer.
///
/// Shifts the argument upward by the recurrence until the Stirling series with
/// a bounded truncation error applies; negative arguments go through the
/// reflection formula.
pub fn gamma(x: &Float, prec: Prec) -> Result<Float> {
    if !x.is_finite() {
        return Err(domain(format!("gamma of non-finite argument {x}")));
    }
    if x.is_integer() && *x <= 0 {
        return Err(Error::Pole(x.to_string_radix(10, Some(20))));
    }
    let wp = prec + GUARD_BITS;
    if *x >= 0.5 {
        return Ok(Float::with_val(prec, gamma_positive(x, wp)));
    }
    // Γ(x) = π / (sin(πx) Γ(1-x)); reduce x mod 2 exactly before taking sin.
    let xp = x.prec().max(wp) + exponent(x).max(0) as Prec;
    let xw = Float::with_val(xp, x);
    let two_k = Float::with_val(xp, &xw / 2u32).round() * 2u32;
    let r = Float::with_val(xp, &xw - &two_k);
    let s = Float::with_val(wp, &r * pi(wp)).sin();
    let one_minus = Float::with_val(xp, 1 - &xw);
    let g = gamma_positive(&one_minus, wp);
    Ok(Float::with_val(prec, pi(wp) / (s * g)))
}

/// Rising factorial `a (a+1) ... (a+k-1)`; `1` when `k == 0`.
pub fn pochhammer(a: &Float, k: u32, prec: Prec) -> Float {
    let wp = prec + 16 + (32 - k.leading_zeros());
    let mut acc = Float::with_val(wp, 1);
    let mut term = Float::with_val(wp, a);
    for _ in 0..k {
        acc *= &term;
        term += 1u32;
    }
    Float::with_val(prec, acc)
}
