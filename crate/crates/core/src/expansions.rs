//! Large-`n` expansions of the four integrals.
//!
//! Each integral is written as `∫ e^{-n ψ(x)} dx`. The phase `ψ` is expanded
//! as a [`TruncatedSeries`], reverted, and differentiated; Watson's lemma
//! then turns the coefficients of `dx/dτ` into powers of `1/n`.

use std::fmt;

use rug::ops::Pow;
use rug::Float;

use crate::error::{domain, Error, Result};
use crate::numeric::{exponent, gamma, pow2, Prec, Rational, GUARD_BITS};
use crate::series::TruncatedSeries;
use crate::specfun::HyperParams;

/// Extra bits carried through series construction and reversion.
const SERIES_GUARD: Prec = GUARD_BITS + 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum IntegralKind {
    /// `∫_0^∞ (e^{-x} Γ(1+ν) I_ν(x) / (x/2)^ν)^n dx`
    I,
    /// `∫_0^∞ (Γ(1+ν) I_ν(x) / (x/2)^ν)^{-n} dx`
    IHat,
    /// `∫_0^∞ (2 e^x (x/2)^ν K_ν(x) / Γ(ν))^{-n} dx`
    K,
    /// `∫_0^{j_1} ₀F_m(-(x/p)^p)^n dx`
    J,
}

impl IntegralKind {
    pub fn name(self) -> &'static str {
        match self {
            IntegralKind::I => "I",
            IntegralKind::IHat => "Ihat",
            IntegralKind::K => "K",
            IntegralKind::J => "J",
        }
    }
}

impl fmt::Display for IntegralKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Params {
    Nu(Rational),
    Hyper(HyperParams),
}

impl fmt::Display for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Params::Nu(nu) => write!(f, "nu={nu}"),
            Params::Hyper(hp) => write!(f, "{hp}"),
        }
    }
}

/// Coefficients of `dx/dτ` (suitably normalized per kind). `exponents[k]` is
/// the power of `τ` carried by `values[k]`.
#[derive(Clone, Debug)]
pub struct CoeffTable {
    pub kind: IntegralKind,
    pub params: Params,
    pub lattice_den: u32,
    pub exponents: Vec<Rational>,
    pub values: Vec<Float>,
}

/// `Σ_j c_j n^{-e_j}` with strictly increasing `e_j`.
#[derive(Clone, Debug)]
pub struct AsymptoticExpansion {
    pub kind: IntegralKind,
    pub params: Params,
    pub truncation: usize,
    pub terms: Vec<(Rational, Float)>,
}

impl AsymptoticExpansion {
    /// Sum of all terms at `n`.
    pub fn value(&self, n: &Float) -> Float {
        self.partial_sums(n).pop().expect("at least one term")
    }

    /// Running sums through each truncation index `0..=truncation`.
    pub fn partial_sums(&self, n: &Float) -> Vec<Float> {
        let prec = self.terms[0].1.prec();
        let mut acc = Float::new(prec);
        self.terms
            .iter()
            .map(|(e, c)| {
                let np = Float::with_val(prec, n).pow(&e.to_big(prec));
                acc += Float::with_val(prec, c / np);
                acc.clone()
            })
            .collect()
    }

    /// First exponent of `n` that truncation drops, given the next term's
    /// exponent. Used by the error-scaling checks.
    pub fn exponents(&self) -> Vec<Rational> {
        self.terms.iter().map(|(e, _)| *e).collect()
    }
}

fn check_n(n: &Float) -> Result<()> {
    if !n.is_finite() || *n <= 0 {
        return Err(domain(format!("n must be positive, got {n}")));
    }
    Ok(())
}

fn check_nu_i(nu: Rational) -> Result<()> {
    if nu <= Rational::new(-1, 2)? {
        return Err(domain(format!("I-case requires ν > -1/2, got ν = {nu}")));
    }
    Ok(())
}

fn check_nu_ihat(nu: Rational) -> Result<()> {
    if nu < Rational::from_int(0) {
        return Err(domain(format!("Ihat-case requires ν >= 0, got ν = {nu}")));
    }
    Ok(())
}

fn check_nu_k(nu: Rational) -> Result<()> {
    if nu.is_integer() || nu <= Rational::new(1, 2)? {
        return Err(domain(format!("K-case requires ν > 1/2, non-integer, got ν = {nu}")));
    }
    Ok(())
}

/// Builds coefficients at series order `m` and `m + period` and returns the
/// latter after checking that no coefficient moved.
fn order_stable<F>(m: usize, period: usize, prec: Prec, build: F) -> Result<Vec<Float>>
where
    F: Fn(usize) -> Result<Vec<Float>>,
{
    let lo = build(m)?;
    let hi = build(m + period)?;
    let tol = pow2(16 - prec as i64, 64);
    for (k, (a, b)) in lo.iter().zip(&hi).enumerate() {
        let scale = Float::with_val(prec, b.abs_ref()).max(&Float::with_val(prec, 1));
        let change = Float::with_val(prec, a - b).abs() / scale;
        if change > tol {
            return Err(Error::OrderSensitive {
                index: k,
                change: change.to_string_radix(10, Some(6)),
            });
        }
    }
    Ok(hi)
}

fn round_all(v: Vec<Float>, prec: Prec) -> Vec<Float> {
    v.into_iter().map(|c| Float::with_val(prec, c)).collect()
}

/// `Σ_{k} (x/2)^{2k} / ((1+a)_k k!)` through `x^order`, as exact-rational
/// factors evaluated at `wp`. Index `k` sits at `x^{2k}` times `shift`.
fn bessel_i_terms(a: Rational, order: usize, wp: Prec) -> Vec<(usize, Float)> {
    let mut out = Vec::new();
    let mut c = Float::with_val(wp, 1);
    let mut k = 0usize;
    while 2 * k <= order {
        out.push((2 * k, c.clone()));
        k += 1;
        let denom = (a + Rational::from(k as i64)) * Rational::from(k as i64 * 4);
        c /= denom.to_big(wp);
    }
    out
}

/// `ψ(x) = x - log(Γ(1+ν) I_ν(x) / (x/2)^ν)` through `x^order`.
pub fn psi_series_i(nu: Rational, order: usize, prec: Prec) -> Result<TruncatedSeries> {
    check_nu_i(nu)?;
    if order < 2 {
        return Err(domain("psi series needs order >= 2"));
    }
    let f = TruncatedSeries::from_terms(1, order, prec, bessel_i_terms(nu, order, prec));
    let x = TruncatedSeries::variable(1, order, prec);
    Ok(x.sub(&f.log()?))
}

/// `A_0..A_K` with `dx/dτ = Σ A_k τ^k` for the I-case.
pub fn coeffs_a_i(nu: Rational, k_max: usize, prec: Prec) -> Result<CoeffTable> {
    check_nu_i(nu)?;
    let wp = prec + SERIES_GUARD;
    let values = order_stable(k_max + 2, 2, wp, |m| {
        let dx = psi_series_i(nu, m, wp)?.revert()?.diff()?;
        Ok(dx.coeffs()[..=k_max].to_vec())
    })?;
    Ok(CoeffTable {
        kind: IntegralKind::I,
        params: Params::Nu(nu),
        lattice_den: 1,
        exponents: (0..=k_max).map(|k| Rational::from(k as i64)).collect(),
        values: round_all(values, prec),
    })
}

/// `I_n ~ Σ_{k<=K} k! A_k / n^{k+1}`.
pub fn expand_in(nu: Rational, n: &Float, k_max: usize, prec: Prec) -> Result<(AsymptoticExpansion, Float)> {
    check_n(n)?;
    let table = coeffs_a_i(nu, k_max, prec)?;
    let wp = prec + GUARD_BITS;
    let terms = table
        .values
        .iter()
        .enumerate()
        .map(|(k, a)| {
            let fact = Float::with_val(wp, &rug::Integer::from(rug::Integer::factorial(k as u32)));
            (Rational::from(k as i64 + 1), Float::with_val(wp, a * fact))
        })
        .collect();
    finish(IntegralKind::I, table.params, k_max, terms, n, prec)
}

fn finish(
    kind: IntegralKind,
    params: Params,
    truncation: usize,
    terms: Vec<(Rational, Float)>,
    n: &Float,
    prec: Prec,
) -> Result<(AsymptoticExpansion, Float)> {
    let exp = AsymptoticExpansion {
        kind,
        params,
        truncation,
        terms,
    };
    let v = exp.value(&Float::with_val(prec + GUARD_BITS, n));
    let exp = AsymptoticExpansion {
        terms: exp
            .terms
            .into_iter()
            .map(|(e, c)| (e, Float::with_val(prec, c)))
            .collect(),
        ..exp
    };
    Ok((exp, Float::with_val(prec, v)))
}

/// `Â_0..Â_K` with `(1/(2√(1+ν))) dx/dτ = Σ Â_k τ^{2k}` where
/// `τ² = log(Γ(1+ν) I_ν(x)/(x/2)^ν)`.
pub fn coeffs_ahat(nu: Rational, k_max: usize, prec: Prec) -> Result<CoeffTable> {
    check_nu_ihat(nu)?;
    let wp = prec + SERIES_GUARD;
    let two = Rational::from_int(2);
    let values = order_stable(2 * k_max + 4, 2, wp, |m| {
        // In y = x / (2√(1+ν)) the series is Σ ((1+ν) y²)^k / ((1+ν)_k k!),
        // so τ² = y² + O(y⁴) and dy/dτ is the normalized derivative.
        let mut terms = Vec::new();
        let mut c = Float::with_val(wp, 1);
        let mut k = 0usize;
        while 2 * k <= m {
            terms.push((2 * k, c.clone()));
            k += 1;
            let r = (nu + Rational::from_int(1)) / ((nu + Rational::from(k as i64)) * Rational::from(k as i64));
            c *= r.to_big(wp);
        }
        let psi = TruncatedSeries::from_terms(1, m, wp, terms).log()?;
        let ratio = psi.shift_down(two)?;
        let tau = ratio.powf(&Float::with_val(wp, 0.5))?.shift_up(Rational::from_int(1));
        let dy = tau.revert()?.diff()?;
        Ok((0..=k_max).map(|k| dy.coeffs()[2 * k].clone()).collect())
    })?;
    Ok(CoeffTable {
        kind: IntegralKind::IHat,
        params: Params::Nu(nu),
        lattice_den: 1,
        exponents: (0..=k_max).map(|k| Rational::from(2 * k as i64)).collect(),
        values: round_all(values, prec),
    })
}

/// `Î_n ~ √(1+ν) Σ_{k<=K} Â_k Γ(k+1/2) / n^{k+1/2}`.
pub fn expand_in_hat(nu: Rational, n: &Float, k_max: usize, prec: Prec) -> Result<(AsymptoticExpansion, Float)> {
    check_n(n)?;
    let table = coeffs_ahat(nu, k_max, prec)?;
    let wp = prec + GUARD_BITS;
    let root = (nu + Rational::from_int(1)).to_big(wp).sqrt();
    let half = Rational::new(1, 2)?;
    let mut terms = Vec::with_capacity(k_max + 1);
    for (k, a) in table.values.iter().enumerate() {
        let e = Rational::from(k as i64) + half;
        let g = gamma(&e.to_big(wp), wp)?;
        terms.push((e, Float::with_val(wp, a * &root) * g));
    }
    finish(IntegralKind::IHat, table.params, k_max, terms, n, prec)
}

/// Lattice denominator of the K-case: the denominator of `2ν`.
pub fn k_lattice_den(nu: Rational) -> u32 {
    (nu * Rational::from_int(2)).denom() as u32
}

/// `ψ(x) = x + log(2 (x/2)^ν K_ν(x) / Γ(ν))` on the lattice `x^{k/d}`,
/// `d = den(2ν)`, through index `order`.
pub fn psi_series_k(nu: Rational, order: usize, prec: Prec) -> Result<TruncatedSeries> {
    check_nu_k(nu)?;
    let d = k_lattice_den(nu);
    let wp = prec + 16;
    let nu_b = nu.to_big(wp + 16);
    let g = gamma(&Float::with_val(wp + 16, -&nu_b), wp)? / gamma(&nu_b, wp)?;
    let mut terms = Vec::new();
    // Σ (x/2)^{2k} / ((1-ν)_k k!) at indices 2k·d
    let last_int = order / d as usize;
    for (e, c) in bessel_i_terms(-nu, last_int, wp) {
        terms.push((e * d as usize, c));
    }
    // g (x/2)^{2ν} Σ (x/2)^{2k} / ((1+ν)_k k!) at indices (2ν + 2k)·d
    let shift = (nu * Rational::from_int(2) * Rational::from(d as i64)).numer() as usize;
    if shift <= order {
        let two_nu = (nu * Rational::from_int(2)).to_big(wp);
        let lead = Float::with_val(wp, &g / Float::with_val(wp, Float::with_val(wp, 2).pow(&two_nu)));
        for (e, c) in bessel_i_terms(nu, (order - shift) / d as usize, wp) {
            terms.push((shift + e * d as usize, Float::with_val(wp, &c * &lead)));
        }
    }
    let bracket = TruncatedSeries::from_terms(d, order, wp, terms);
    let x = TruncatedSeries::variable(d, order, wp);
    let psi = x.add(&bracket.log()?);
    Ok(TruncatedSeries::new(d, psi.coeffs().to_vec(), prec))
}

/// Exponents of `τ` in `dx/dτ` for the K-case: the sorted values
/// `a + b(2ν - 1)`, `a, b >= 0`, first `count` of them.
pub fn k_lattice_exponents(nu: Rational, count: usize) -> Vec<Rational> {
    let step = nu * Rational::from_int(2) - Rational::from_int(1);
    let mut set = std::collections::BTreeSet::new();
    let cap = count as i64 + 1;
    for a in 0..=cap {
        for b in 0..=cap {
            set.insert(Rational::from(a) + step * Rational::from(b));
        }
    }
    set.into_iter().take(count).collect()
}

/// `B_0..B_K` with `dx/dτ = Σ B_k τ^{e_k}` for the K-case.
pub fn coeffs_b_k(nu: Rational, k_max: usize, prec: Prec) -> Result<CoeffTable> {
    check_nu_k(nu)?;
    let d = k_lattice_den(nu);
    let exps = k_lattice_exponents(nu, k_max + 1);
    let last = exps[k_max];
    let wp = prec + SERIES_GUARD;
    let index = |e: Rational| (e * Rational::from(d as i64)).numer() as usize;
    // dx/dτ loses one unit of exponent to differentiation; one more unit of
    // slack keeps the last coefficient clear of the truncation edge.
    let m = index(last) + 2 * d as usize;
    let values = order_stable(m, d as usize, wp, |m| {
        let dx = psi_series_k(nu, m, wp)?.revert()?.diff()?;
        let scale = dx.coeffs()[..=index(last)]
            .iter()
            .map(|c| Float::with_val(wp, c.abs_ref()))
            .fold(Float::with_val(wp, 1), |a, b| a.max(&b));
        let tol = pow2(exponent(&scale) + 32 - wp as i64, 64);
        for k in 0..=index(last) {
            let e = Rational::new(k as i64, d as i64)?;
            if !exps.contains(&e) && Float::with_val(wp, dx.coeffs()[k].abs_ref()) > tol {
                return Err(Error::Consistency(format!(
                    "dx/dτ has a term at τ^{e} off the K-case exponent set"
                )));
            }
        }
        Ok(exps.iter().map(|&e| dx.coeffs()[index(e)].clone()).collect())
    })?;
    Ok(CoeffTable {
        kind: IntegralKind::K,
        params: Params::Nu(nu),
        lattice_den: d,
        exponents: exps,
        values: round_all(values, prec),
    })
}

/// `K_n ~ Σ_{k<=K} B_k Γ(e_k + 1) / n^{e_k + 1}`.
pub fn expand_kn(nu: Rational, n: &Float, k_max: usize, prec: Prec) -> Result<(AsymptoticExpansion, Float)> {
    check_n(n)?;
    let table = coeffs_b_k(nu, k_max, prec)?;
    let wp = prec + GUARD_BITS;
    let one = Rational::from_int(1);
    let mut terms = Vec::with_capacity(k_max + 1);
    for (e, b) in table.exponents.iter().zip(&table.values) {
        let g = gamma(&(*e + one).to_big(wp), wp)?;
        terms.push((*e + one, Float::with_val(wp, b * g)));
    }
    finish(IntegralKind::K, table.params, k_max, terms, n, prec)
}

/// Hyper-Bessel `A_0..A_K` in the normal form
/// `dx/dτ = (p/μ_1^{1/p}) Σ (-1)^k A_k (kp+1) τ^{kp} / p^k`.
///
/// With `v = μ_1 (x/p)^p` the phase is an ordinary power series
/// `ψ(v) = -log Σ (-v)^k γ_1 ... γ_k / k!`. Reverting gives `v(s)`, `s = τ^p`,
/// and `x = (p τ / μ_1^{1/p}) (v/s)^{1/p}`.
pub fn coeffs_a_hyper(hp: &HyperParams, k_max: usize, prec: Prec) -> Result<CoeffTable> {
    let wp = prec + SERIES_GUARD;
    let p = hp.p();
    let values = order_stable(k_max + 2, 1, wp, |m| {
        let mut terms = Vec::with_capacity(m + 1);
        let mut c = Float::with_val(wp, 1);
        for k in 0..=m {
            terms.push((k, c.clone()));
            let r = hp.gamma_ratio(k as u32 + 1) / Rational::from(k as i64 + 1);
            c *= -r.to_big(wp);
        }
        let psi = -&TruncatedSeries::from_terms(1, m, wp, terms).log()?;
        let v = psi.revert()?;
        let w = v
            .shift_down(Rational::from_int(1))?
            .powf(&(Float::with_val(wp, 1) / p))?;
        let mut scale = Float::with_val(wp, 1);
        let mut out = Vec::with_capacity(k_max + 1);
        for k in 0..=k_max {
            out.push(Float::with_val(wp, &w.coeffs()[k] * &scale));
            scale *= -(p as i32);
        }
        Ok(out)
    })?;
    Ok(CoeffTable {
        kind: IntegralKind::J,
        params: Params::Hyper(hp.clone()),
        lattice_den: 1,
        exponents: (0..=k_max).map(|k| Rational::from((k as i64) * p as i64)).collect(),
        values: round_all(values, prec),
    })
}

/// `J_n ~ (p / (n μ_1)^{1/p}) Σ_{k<=K} (-1)^k A_k Γ(k + 1/p + 1) / (np)^k`.
pub fn expand_jn(hp: &HyperParams, n: &Float, k_max: usize, prec: Prec) -> Result<(AsymptoticExpansion, Float)> {
    check_n(n)?;
    let table = coeffs_a_hyper(hp, k_max, prec)?;
    let wp = prec + GUARD_BITS;
    let p = hp.p();
    let inv_p = Rational::new(1, p as i64)?;
    let mu1 = hp.mu(1, wp);
    let lead = Float::with_val(wp, p) / Float::with_val(wp, mu1.pow(&inv_p.to_big(wp)));
    let tol = pow2(16 - wp as i64, 64);
    let mut terms = Vec::with_capacity(k_max + 1);
    let mut p_pow = Float::with_val(wp, 1);
    for (k, a) in table.values.iter().enumerate() {
        let e = Rational::from(k as i64) + inv_p;
        let g1 = gamma(&(e + Rational::from_int(1)).to_big(wp), wp)?;
        // Watson's lemma gives (kp+1) Γ(k+1/p) / p, which must equal Γ(k+1/p+1).
        let g0 = gamma(&e.to_big(wp), wp)? * (k as u32 * p + 1) / p;
        if Float::with_val(wp, &g0 - &g1).abs() > Float::with_val(wp, &g1 * &tol) {
            return Err(Error::Consistency(format!("gamma factor mismatch at k = {k}")));
        }
        let mut c = Float::with_val(wp, a * &lead) * g1 / &p_pow;
        if k % 2 == 1 {
            c = -c;
        }
        terms.push((e, c));
        p_pow *= p;
    }
    finish(IntegralKind::J, table.params, k_max, terms, n, prec)
}

/// Dispatches on kind; `params` must match (`Nu` for I, Ihat, K).
pub fn coeffs(kind: IntegralKind, params: &Params, k_max: usize, prec: Prec) -> Result<CoeffTable> {
    match (kind, params) {
        (IntegralKind::I, Params::Nu(nu)) => coeffs_a_i(*nu, k_max, prec),
        (IntegralKind::IHat, Params::Nu(nu)) => coeffs_ahat(*nu, k_max, prec),
        (IntegralKind::K, Params::Nu(nu)) => coeffs_b_k(*nu, k_max, prec),
        (IntegralKind::J, Params::Hyper(hp)) => coeffs_a_hyper(hp, k_max, prec),
        _ => Err(domain(format!("{kind}-case does not take parameters {params}"))),
    }
}

pub fn expand(
    kind: IntegralKind,
    params: &Params,
    n: &Float,
    k_max: usize,
    prec: Prec,
) -> Result<(AsymptoticExpansion, Float)> {
    match (kind, params) {
        (IntegralKind::I, Params::Nu(nu)) => expand_in(*nu, n, k_max, prec),
        (IntegralKind::IHat, Params::Nu(nu)) => expand_in_hat(*nu, n, k_max, prec),
        (IntegralKind::K, Params::Nu(nu)) => expand_kn(*nu, n, k_max, prec),
        (IntegralKind::J, Params::Hyper(hp)) => expand_jn(hp, n, k_max, prec),
        _ => Err(domain(format!("{kind}-case does not take parameters {params}"))),
    }
}
