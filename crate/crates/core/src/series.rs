//! Truncated series on a rational exponent lattice.
//!
//! A [`TruncatedSeries`] with lattice denominator `d` stores coefficients
//! `c_0 ..= c_M` of `sum_k c_k x^(k/d)`. Terms beyond index `M` are unknown,
//! not zero. Every operation works out how far its result is determined by
//! its inputs and never reports more terms than that.

use std::borrow::Cow;
use std::ops::{Add, Mul, Neg, Sub};

use rug::ops::Pow;
use rug::{Assign, Float};

use crate::error::{Error, Result};
use crate::numeric::{lcm, Prec, Rational};

#[derive(Clone, Debug)]
pub struct TruncatedSeries {
    den: u32,
    coeffs: Vec<Float>,
    prec: Prec,
}

fn series_err(msg: impl Into<String>) -> Error {
    Error::Series(msg.into())
}

/// Largest index `k` with `k / den < bound`.
fn last_index_below(bound: Rational, den: u32) -> Option<usize> {
    let scaled = bound * Rational::from(den as i64);
    let k = scaled.ceil() - 1;
    (k >= 0).then_some(k as usize)
}

impl TruncatedSeries {
    pub fn new(den: u32, coeffs: Vec<Float>, prec: Prec) -> Self {
        assert!(den >= 1, "lattice denominator must be positive");
        assert!(!coeffs.is_empty(), "a series needs at least one known term");
        let coeffs = coeffs.into_iter().map(|c| Float::with_val(prec, c)).collect();
        TruncatedSeries { den, coeffs, prec }
    }

    /// Series known through index `order` with the listed nonzero terms.
    pub fn from_terms<I>(den: u32, order: usize, prec: Prec, terms: I) -> Self
    where
        I: IntoIterator<Item = (usize, Float)>,
    {
        let mut s = Self::zero(den, order, prec);
        for (k, c) in terms {
            if k <= order {
                s.coeffs[k] += c;
            }
        }
        s
    }

    pub fn zero(den: u32, order: usize, prec: Prec) -> Self {
        assert!(den >= 1, "lattice denominator must be positive");
        TruncatedSeries {
            den,
            coeffs: vec![Float::new(prec); order + 1],
            prec,
        }
    }

    /// The series `x` itself.
    pub fn variable(den: u32, order: usize, prec: Prec) -> Self {
        Self::from_terms(den, order, prec, [(den as usize, Float::with_val(prec, 1))])
    }

    pub fn constant(c: &Float, den: u32, order: usize, prec: Prec) -> Self {
        Self::from_terms(den, order, prec, [(0, Float::with_val(prec, c))])
    }

    pub fn den(&self) -> u32 {
        self.den
    }

    /// Highest known index `M`.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn prec(&self) -> Prec {
        self.prec
    }

    /// Coefficient of `x^(k/d)`, or `None` past the truncation order.
    pub fn coeff(&self, k: usize) -> Option<&Float> {
        self.coeffs.get(k)
    }

    pub fn coeffs(&self) -> &[Float] {
        &self.coeffs
    }

    /// Coefficient of `x^e`; zero when `e` is off the lattice.
    pub fn coeff_at(&self, e: Rational) -> Option<Float> {
        if e < Rational::from_int(0) || e >= self.bound() {
            return None;
        }
        let scaled = e * Rational::from(self.den as i64);
        if !scaled.is_integer() {
            return Some(Float::new(self.prec));
        }
        self.coeffs.get(scaled.numer() as usize).cloned()
    }

    pub fn exponent(&self, k: usize) -> Rational {
        Rational::new(k as i64, self.den as i64).expect("positive denominator")
    }

    /// Nonzero terms as `(exponent, coefficient)`.
    pub fn terms(&self) -> impl Iterator<Item = (Rational, &Float)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(k, c)| (self.exponent(k), c))
    }

    /// Exclusive bound on known exponents: the result is `... + O(x^bound)`.
    pub fn bound(&self) -> Rational {
        self.exponent(self.coeffs.len())
    }

    /// Index of the first nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    /// Exponent of the first nonzero term, or the truncation bound when all
    /// known terms vanish.
    fn valuation_exp(&self) -> Rational {
        self.valuation().map_or_else(|| self.bound(), |k| self.exponent(k))
    }

    /// Same series on a finer lattice; `den` must be a multiple of the current one.
    pub fn rebase(&self, den: u32) -> Self {
        assert!(
            den.is_multiple_of(self.den),
            "lattice {den} does not refine {}",
            self.den
        );
        if den == self.den {
            return self.clone();
        }
        let step = (den / self.den) as usize;
        let order = last_index_below(self.bound(), den).expect("nonempty series");
        let mut out = Self::zero(den, order, self.prec);
        for (k, c) in self.coeffs.iter().enumerate() {
            out.coeffs[k * step].assign(c);
        }
        out
    }

    fn common<'a>(a: &'a Self, b: &'a Self) -> (Cow<'a, Self>, Cow<'a, Self>) {
        let d = lcm(a.den, b.den);
        let ra = if a.den == d {
            Cow::Borrowed(a)
        } else {
            Cow::Owned(a.rebase(d))
        };
        let rb = if b.den == d {
            Cow::Borrowed(b)
        } else {
            Cow::Owned(b.rebase(d))
        };
        (ra, rb)
    }

    /// Keeps indices `0..=order` (no-op when already shorter).
    pub fn truncate(&self, order: usize) -> Self {
        let mut out = self.clone();
        out.coeffs.truncate(order + 1);
        out
    }

    pub fn scale(&self, c: &Float) -> Self {
        let coeffs = self.coeffs.iter().map(|x| Float::with_val(self.prec, x * c)).collect();
        TruncatedSeries {
            den: self.den,
            coeffs,
            prec: self.prec,
        }
    }

    fn zip_with(&self, other: &Self, sub: bool) -> Self {
        let (a, b) = Self::common(self, other);
        let n = a.coeffs.len().min(b.coeffs.len());
        let prec = a.prec.max(b.prec);
        let coeffs = (0..n)
            .map(|k| {
                if sub {
                    Float::with_val(prec, &a.coeffs[k] - &b.coeffs[k])
                } else {
                    Float::with_val(prec, &a.coeffs[k] + &b.coeffs[k])
                }
            })
            .collect();
        TruncatedSeries {
            den: a.den,
            coeffs,
            prec,
        }
    }

    /// Product truncated at index `last` on the shared lattice of `a` and `b`.
    fn mul_upto(a: &Self, b: &Self, last: usize) -> Self {
        debug_assert_eq!(a.den, b.den);
        let prec = a.prec.max(b.prec);
        let mut out = Self::zero(a.den, last, prec);
        for (i, ai) in a.coeffs.iter().enumerate().take(last + 1) {
            if ai.is_zero() {
                continue;
            }
            for (j, bj) in b.coeffs.iter().enumerate().take(last + 1 - i) {
                if bj.is_zero() {
                    continue;
                }
                out.coeffs[i + j] += ai * bj;
            }
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (a, b) = Self::common(self, other);
        let bound = (a.bound() + b.valuation_exp()).min(b.bound() + a.valuation_exp());
        match last_index_below(bound, a.den) {
            Some(last) => Self::mul_upto(&a, &b, last),
            None => unreachable!("product bound is positive"),
        }
    }

    /// Multiplies by `x^e` for a nonnegative `e`.
    pub fn shift_up(&self, e: Rational) -> Self {
        assert!(e >= Rational::from_int(0), "shift_up needs a nonnegative exponent");
        let d = lcm(self.den, e.denom() as u32);
        let s = self.rebase(d);
        let k = (e * Rational::from(d as i64)).numer() as usize;
        let mut coeffs = vec![Float::new(self.prec); k];
        coeffs.extend(s.coeffs);
        TruncatedSeries {
            den: d,
            coeffs,
            prec: self.prec,
        }
    }

    /// Divides by `x^e`; every term below `x^e` must vanish.
    pub fn shift_down(&self, e: Rational) -> Result<Self> {
        let d = lcm(self.den, e.denom() as u32);
        let s = self.rebase(d);
        let k = (e * Rational::from(d as i64)).numer();
        if k < 0 {
            return Err(series_err("shift_down needs a nonnegative exponent"));
        }
        let k = k as usize;
        if k >= s.coeffs.len() {
            return Err(series_err(format!(
                "cannot divide by x^{e}: series known only below it"
            )));
        }
        if s.coeffs[..k].iter().any(|c| !c.is_zero()) {
            return Err(series_err(format!("cannot divide by x^{e}: lower terms present")));
        }
        Ok(TruncatedSeries {
            den: d,
            coeffs: s.coeffs[k..].to_vec(),
            prec: self.prec,
        })
    }

    fn check_unit_constant(&self, what: &str) -> Result<()> {
        if self.coeffs[0] != 1 {
            return Err(series_err(format!(
                "{what} needs constant term 1, found {}",
                self.coeffs[0].to_string_radix(10, Some(12))
            )));
        }
        Ok(())
    }

    /// `log(s)` for a series with constant term exactly 1.
    pub fn log(&self) -> Result<Self> {
        self.check_unit_constant("log")?;
        // With the Euler operator θ = x d/dx (which acts on the lattice index),
        // s θf = θs gives f_k = s_k - (1/k) sum_{j<k} j f_j s_{k-j}.
        let n = self.coeffs.len();
        let prec = self.prec;
        let mut f: Vec<Float> = vec![Float::new(prec); n];
        for k in 1..n {
            let mut acc = Float::new(prec);
            for (j, fj) in f.iter().enumerate().take(k).skip(1) {
                if fj.is_zero() || self.coeffs[k - j].is_zero() {
                    continue;
                }
                acc += Float::with_val(prec, fj * &self.coeffs[k - j]) * j as u32;
            }
            f[k] = Float::with_val(prec, &self.coeffs[k] - acc / k as u32);
        }
        Ok(TruncatedSeries {
            den: self.den,
            coeffs: f,
            prec,
        })
    }

    /// `exp(s)` for a series with zero constant term.
    pub fn exp(&self) -> Result<Self> {
        if !self.coeffs[0].is_zero() {
            return Err(series_err("exp needs a zero constant term"));
        }
        let n = self.coeffs.len();
        let prec = self.prec;
        let mut g: Vec<Float> = vec![Float::new(prec); n];
        g[0] = Float::with_val(prec, 1);
        for k in 1..n {
            let mut acc = Float::new(prec);
            for j in 1..=k {
                if self.coeffs[j].is_zero() {
                    continue;
                }
                acc += Float::with_val(prec, &self.coeffs[j] * &g[k - j]) * j as u32;
            }
            g[k] = acc / k as u32;
        }
        Ok(TruncatedSeries {
            den: self.den,
            coeffs: g,
            prec,
        })
    }

    /// `s^alpha` for a series with positive constant term.
    pub fn powf(&self, alpha: &Float) -> Result<Self> {
        let c0 = &self.coeffs[0];
        if c0.cmp0() != Some(std::cmp::Ordering::Greater) {
            return Err(series_err("real power needs a positive constant term"));
        }
        let prec = self.prec;
        let inv = Float::with_val(prec, c0.recip_ref());
        let a: Vec<Float> = self.coeffs.iter().map(|c| Float::with_val(prec, c * &inv)).collect();
        let n = a.len();
        // g = a^alpha with a_0 = 1: k g_k = sum_{j=1}^{k} ((alpha+1) j - k) a_j g_{k-j}
        let mut g: Vec<Float> = vec![Float::new(prec); n];
        g[0] = Float::with_val(prec, 1);
        let alpha1 = Float::with_val(prec, alpha + 1u32);
        for k in 1..n {
            let mut acc = Float::new(prec);
            for j in 1..=k {
                if a[j].is_zero() {
                    continue;
                }
                let w = Float::with_val(prec, &alpha1 * j as u32) - k as u32;
                acc += w * Float::with_val(prec, &a[j] * &g[k - j]);
            }
            g[k] = acc / k as u32;
        }
        let lead = Float::with_val(prec, c0.pow(alpha));
        let coeffs = g.into_iter().map(|x| x * &lead).collect();
        Ok(TruncatedSeries {
            den: self.den,
            coeffs,
            prec,
        })
    }

    /// Multiplicative inverse; the constant term must be nonzero.
    pub fn recip(&self) -> Result<Self> {
        let c0 = &self.coeffs[0];
        if c0.is_zero() {
            return Err(series_err("reciprocal needs a nonzero constant term"));
        }
        let prec = self.prec;
        let inv0 = Float::with_val(prec, c0.recip_ref());
        let n = self.coeffs.len();
        let mut b: Vec<Float> = vec![Float::new(prec); n];
        b[0] = inv0.clone();
        for k in 1..n {
            let mut acc = Float::new(prec);
            for j in 1..=k {
                if self.coeffs[j].is_zero() {
                    continue;
                }
                acc += &self.coeffs[j] * &b[k - j];
            }
            b[k] = -acc * &inv0;
        }
        Ok(TruncatedSeries {
            den: self.den,
            coeffs: b,
            prec,
        })
    }

    /// Term-wise derivative. Exponents `k/d` in `(0, 1)` would turn negative
    /// and are rejected.
    pub fn diff(&self) -> Result<Self> {
        let d = self.den as usize;
        if let Some(k) = (1..d.min(self.coeffs.len())).find(|&k| !self.coeffs[k].is_zero()) {
            return Err(series_err(format!(
                "derivative of x^{} leaves the lattice of nonnegative exponents",
                self.exponent(k)
            )));
        }
        if self.coeffs.len() <= d {
            return Err(series_err("series too short to differentiate"));
        }
        let prec = self.prec;
        let coeffs = self.coeffs[d..]
            .iter()
            .enumerate()
            .map(|(i, c)| Float::with_val(prec, c * (i + d) as u32) / self.den)
            .collect();
        Ok(TruncatedSeries {
            den: self.den,
            coeffs,
            prec,
        })
    }

    /// Composition `self(inner(t))`.
    ///
    /// `inner` must be `c t + (higher lattice terms)` with `c != 0`, and `c > 0`
    /// whenever `self` has fractional exponents.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        let one = Rational::from_int(1);
        if inner.valuation_exp() != one {
            return Err(series_err(format!(
                "inner series must start at exponent 1, starts at {}",
                inner.valuation_exp()
            )));
        }
        let prec = self.prec.max(inner.prec);
        let c = inner.coeff_at(one).expect("valuation term is known");
        let dh = self.den;
        // q = inner^(1/dh), so that x^(k/dh) becomes q^k.
        let q = if dh == 1 {
            inner.clone()
        } else {
            if c.cmp0() != Some(std::cmp::Ordering::Greater) {
                return Err(series_err(
                    "fractional composition needs a positive leading coefficient",
                ));
            }
            let unit = inner.shift_down(one)?.scale(&Float::with_val(prec, c.recip_ref()));
            let root = unit.powf(&(Float::with_val(prec, 1) / dh))?;
            let c_root = Float::with_val(prec, c.pow(Float::with_val(prec, 1) / dh));
            root.shift_up(Rational::new(1, dh as i64)?).scale(&c_root)
        };
        let l = lcm(dh, q.den);
        let q = q.rebase(l);
        // Unknown terms of `self` start at t^bound; an error O(t^E) in q moves
        // q^k by O(t^(E + (k-1)/dh)), first felt at the lowest k >= 1 present.
        let mut bound = self.bound();
        if let Some(kmin) = (1..self.coeffs.len()).find(|&k| !self.coeffs[k].is_zero()) {
            let prop = q.bound() + Rational::new(kmin as i64 - 1, dh as i64)?;
            bound = bound.min(prop);
        }
        let last = last_index_below(bound, l).expect("positive bound");
        // Horner in q.
        let mut acc = Self::constant(&self.coeffs[self.order()], l, last, prec);
        for k in (0..self.order()).rev() {
            acc = Self::mul_upto(&acc, &q, last);
            acc.coeffs[0] += &self.coeffs[k];
        }
        Ok(acc)
    }

    /// Compositional inverse: returns `t` with `self(t(tau)) = tau`.
    ///
    /// `self` must be `c x + (terms with exponents > 1)` with `c != 0`. The
    /// result is known to the same exponent bound as `self`.
    pub fn revert(&self) -> Result<Self> {
        let one = Rational::from_int(1);
        if !self.coeffs[0].is_zero() {
            return Err(series_err("reversion needs a zero constant term"));
        }
        if self.bound() <= one {
            return Err(series_err("series too short to revert"));
        }
        match self.valuation() {
            Some(k) if self.exponent(k) == one => {}
            Some(k) => {
                return Err(series_err(format!(
                    "reversion needs leading exponent 1, found {}",
                    self.exponent(k)
                )))
            }
            None => return Err(series_err("reversion needs a nonzero linear coefficient")),
        }
        let d = self.den;
        let prec = self.prec;
        let c = self.coeff_at(one).expect("known");
        let last = self.order();
        let inv_c = Float::with_val(prec, c.recip_ref());
        let tau = Self::variable(d, last, prec);
        let mut t = tau.scale(&inv_c);
        let deriv = self.diff()?;
        // Newton on the lattice. If t is correct through O(tau^(1+δ)), the
        // step leaves an error O(tau^(1 + 2δ + 1/d)), since the second
        // derivative of self is at worst O(x^(1/d - 1)).
        let step = Rational::new(1, d as i64)?;
        let mut delta = step;
        let target = self.bound();
        while one + delta < target {
            let resid = self.compose(&t)?.sub(&tau);
            let slope = deriv.compose(&t)?;
            let corr = Self::mul_upto(&resid.pad(last), &slope.recip()?.pad(last), last);
            t = Self::sub_exact(&t, &corr, last);
            delta = delta + delta + step;
        }
        Ok(t.truncate(last))
    }

    /// Extends with zero coefficients up to `last` (used only on values whose
    /// higher terms cannot affect the caller's truncated product).
    fn pad(&self, last: usize) -> Self {
        let mut out = self.clone();
        while out.coeffs.len() <= last {
            out.coeffs.push(Float::new(self.prec));
        }
        out
    }

    fn sub_exact(a: &Self, b: &Self, last: usize) -> Self {
        let a = a.pad(last);
        let b = b.pad(last);
        let coeffs = (0..=last)
            .map(|k| Float::with_val(a.prec, &a.coeffs[k] - &b.coeffs[k]))
            .collect();
        TruncatedSeries {
            den: a.den,
            coeffs,
            prec: a.prec,
        }
    }

    /// Sums the known terms at `x >= 0`.
    pub fn eval(&self, x: &Float) -> Float {
        let prec = self.prec.max(x.prec());
        let root = if self.den == 1 {
            Float::with_val(prec, x)
        } else {
            Float::with_val(prec, x.pow(Float::with_val(prec, 1) / self.den))
        };
        let mut acc = Float::with_val(prec, &self.coeffs[self.order()]);
        for c in self.coeffs[..self.order()].iter().rev() {
            acc *= &root;
            acc += c;
        }
        acc
    }
}

impl Add for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn add(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        self.zip_with(rhs, false)
    }
}

impl Sub for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn sub(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        self.zip_with(rhs, true)
    }
}

impl Mul for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn mul(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        TruncatedSeries::mul(self, rhs)
    }
}

impl Neg for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn neg(self) -> TruncatedSeries {
        self.scale(&Float::with_val(self.prec, -1))
    }
}

impl TruncatedSeries {
    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, false)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{gamma, pow2, rel_dev};

    const P: Prec = 256;

    fn fl(v: f64) -> Float {
        Float::with_val(P, v)
    }

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d).unwrap()
    }

    fn poly(den: u32, order: usize, terms: &[(usize, f64)]) -> TruncatedSeries {
        TruncatedSeries::from_terms(den, order, P, terms.iter().map(|&(k, v)| (k, fl(v))))
    }

    fn close(a: &Float, b: &Float, tol_bits: i64) -> bool {
        let scale = if b.is_zero() {
            fl(1.0)
        } else {
            Float::with_val(P, b.abs_ref())
        };
        Float::with_val(P, a - b).abs() <= scale * pow2(-tol_bits, P)
    }

    #[test]
    fn difference_of_squares() {
        let a = poly(1, 4, &[(0, 1.0), (1, 1.0)]);
        let b = poly(1, 4, &[(0, 1.0), (1, -1.0)]);
        let p = &a * &b;
        assert_eq!(p.order(), 4);
        let expect = [1.0, 0.0, -1.0, 0.0, 0.0];
        for (k, e) in expect.iter().enumerate() {
            assert_eq!(p.coeff(k).unwrap(), &fl(*e));
        }
    }

    #[test]
    fn adding_zero_is_identity() {
        let s = poly(2, 6, &[(0, 1.5), (3, -2.0), (6, 0.25)]);
        let z = TruncatedSeries::zero(2, 6, P);
        let t = &s + &z;
        assert_eq!(t.coeffs(), s.coeffs());
    }

    #[test]
    fn product_rebases_to_lattice_lcm() {
        // (1 + x^(1/2)) (1 + x^(1/3)) = 1 + x^(1/3) + x^(1/2) + x^(5/6)
        let a = poly(2, 4, &[(0, 1.0), (1, 1.0)]);
        let b = poly(3, 6, &[(0, 1.0), (1, 1.0)]);
        let p = &a * &b;
        assert_eq!(p.den(), 6);
        for (e, v) in [
            (r(0, 1), 1.0),
            (r(1, 3), 1.0),
            (r(1, 2), 1.0),
            (r(5, 6), 1.0),
            (r(1, 6), 0.0),
        ] {
            assert_eq!(p.coeff_at(e).unwrap(), fl(v), "exponent {e}");
        }
        // Both inputs are known through x^2 (exclusive bound 5/2 and 7/3).
        assert_eq!(p.bound(), r(7, 3));
    }

    #[test]
    fn product_order_uses_valuations() {
        // x * (1 + x + x^2 + O(x^3)) is known through x^3.
        let x = TruncatedSeries::variable(1, 10, P);
        let g = poly(1, 2, &[(0, 1.0), (1, 1.0), (2, 1.0)]);
        assert_eq!((&x * &g).order(), 3);
    }

    #[test]
    fn log_of_one_is_zero() {
        let one = poly(1, 8, &[(0, 1.0)]);
        assert!(one.log().unwrap().coeffs().iter().all(|c| c.is_zero()));
    }

    #[test]
    fn log_requires_unit_constant() {
        assert!(poly(1, 3, &[(0, 2.0)]).log().is_err());
        assert!(poly(1, 3, &[(1, 1.0)]).exp().is_ok());
        assert!(poly(1, 3, &[(0, 1.0)]).exp().is_err());
    }

    #[test]
    fn log_of_bessel_i0_series() {
        // I_0 normalized: 1 + x^2/4 + x^4/64 + x^6/2304; log = x^2/4 - x^4/64 + x^6/576
        let s = TruncatedSeries::from_terms(
            1,
            6,
            P,
            [
                (0, fl(1.0)),
                (2, fl(0.25)),
                (4, fl(1.0 / 64.0)),
                (6, Float::with_val(P, 1) / 2304u32),
            ],
        );
        let l = s.log().unwrap();
        assert!(close(l.coeff(2).unwrap(), &fl(0.25), 250));
        assert!(close(l.coeff(4).unwrap(), &fl(-1.0 / 64.0), 250));
        let c6 = Float::with_val(P, 1) / 576u32;
        assert!(close(l.coeff(6).unwrap(), &c6, 248));
        assert!(l.coeff(3).unwrap().is_zero());
    }

    #[test]
    fn revert_identity() {
        let x = TruncatedSeries::variable(1, 7, P);
        let t = x.revert().unwrap();
        assert_eq!(t.coeffs(), x.coeffs());
    }

    #[test]
    fn revert_psi_series_at_nu_zero() {
        // tau = x - x^2/4 + x^4/32 - x^6/576 ... reverted gives
        // x = tau + tau^2/4 + tau^3/8 + tau^4/16 ... at nu = 0.
        let i0 = poly(
            1,
            8,
            &[
                (0, 1.0),
                (2, 0.25),
                (4, 1.0 / 64.0),
                (6, 1.0 / 2304.0),
                (8, 1.0 / 147456.0),
            ],
        );
        let psi = &TruncatedSeries::variable(1, 8, P) - &i0.log().unwrap();
        let x = psi.revert().unwrap();
        for (k, v) in [(1, 1.0), (2, 0.25), (3, 0.125), (4, 1.0 / 16.0)] {
            assert!(
                close(x.coeff(k).unwrap(), &fl(v), 245),
                "tau^{k}: {}",
                x.coeff(k).unwrap()
            );
        }
        // The tau^5 coefficient is (8 + nu) / (128 (1+nu)^4 (2+nu)) = 1/32 at nu = 0.
        assert!(close(x.coeff(5).unwrap(), &fl(1.0 / 32.0), 245));
    }

    #[test]
    fn revert_nu_two_thirds_puiseux() {
        // K-case phase for nu = 2/3 on lattice 3:
        // tau = x + g (x/2)^(4/3) + 3/4 x^2 - (g^2/2) (x/2)^(8/3) + ...
        let prec = 300;
        let nu = r(2, 3);
        let g = gamma(&(-nu).to_big(prec), prec).unwrap() / gamma(&nu.to_big(prec), prec).unwrap();
        let x = crate::expansions::psi_series_k(nu, 12, prec).unwrap().revert().unwrap();
        let two = Float::with_val(prec, 2);
        let c43 = Float::with_val(prec, -&g) / two.clone().pow(Float::with_val(prec, 4) / 3u32);
        let c53 = Float::with_val(prec, g.square_ref())
            / (Float::with_val(prec, 3) * two.clone().pow(Float::with_val(prec, 2) / 3u32));
        let c2 = -Float::with_val(prec, g.clone().pow(3u32)) / 8u32 - Float::with_val(prec, 0.75);
        for (e, v) in [
            (r(1, 1), Float::with_val(prec, 1)),
            (r(4, 3), c43),
            (r(5, 3), c53),
            (r(2, 1), c2),
        ] {
            let got = x.coeff_at(e).unwrap();
            assert!(rel_dev(&got, &v) < pow2(-260, 64), "tau^{e}: {got} vs {v}");
        }
        assert!(x.coeff_at(r(1, 3)).unwrap().is_zero());
    }

    #[test]
    fn revert_rejects_bad_leading_terms() {
        assert!(poly(1, 4, &[(2, 1.0)]).revert().is_err());
        assert!(poly(1, 4, &[(0, 1.0), (1, 1.0)]).revert().is_err());
        assert!(poly(3, 6, &[(1, 1.0), (3, 1.0)]).revert().is_err());
    }

    #[test]
    fn diff_basics() {
        let t = TruncatedSeries::variable(1, 5, P);
        let d = t.diff().unwrap();
        assert_eq!(d.coeff(0).unwrap(), &fl(1.0));
        let s = poly(1, 5, &[(1, 1.0), (2, 0.25)]);
        let d = s.diff().unwrap();
        assert_eq!(d.coeff(0).unwrap(), &fl(1.0));
        assert_eq!(d.coeff(1).unwrap(), &fl(0.5));
        let frac = poly(3, 9, &[(4, 1.0)]);
        let d = frac.diff().unwrap();
        let want = Float::with_val(P, 4) / 3u32;
        assert_eq!(d.coeff_at(r(1, 3)).unwrap(), want);
        assert!(poly(3, 9, &[(1, 1.0)]).diff().is_err());
    }

    #[test]
    fn shifts_round_trip() {
        let s = poly(2, 8, &[(3, 1.0), (5, -2.0)]);
        let down = s.shift_down(r(3, 2)).unwrap();
        assert_eq!(down.coeff(0).unwrap(), &fl(1.0));
        let up = down.shift_up(r(3, 2));
        assert_eq!(up.coeffs(), s.coeffs());
        assert!(s.shift_down(r(2, 1)).is_err());
    }

    #[test]
    fn powf_square_root() {
        // sqrt(1 + 2x + x^2) = 1 + x
        let s = poly(1, 6, &[(0, 1.0), (1, 2.0), (2, 1.0)]);
        let h = s.powf(&fl(0.5)).unwrap();
        assert!(close(h.coeff(0).unwrap(), &fl(1.0), 250));
        assert!(close(h.coeff(1).unwrap(), &fl(1.0), 250));
        for k in 2..=6 {
            assert!(h.coeff(k).unwrap().clone().abs() < pow2(-245, P));
        }
        let inv = s.recip().unwrap();
        let prod = &s * &inv;
        assert!(close(prod.coeff(0).unwrap(), &fl(1.0), 250));
        assert!(prod.coeff(3).unwrap().clone().abs() < pow2(-240, P));
    }

    #[test]
    fn eval_matches_direct_sum() {
        let s = poly(2, 4, &[(0, 1.0), (1, 2.0), (4, 3.0)]);
        let v = s.eval(&fl(4.0));
        assert_eq!(v, fl(1.0 + 2.0 * 2.0 + 3.0 * 16.0));
    }
}
