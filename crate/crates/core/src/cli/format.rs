//! Decimal rendering and the per-cell pass rules.
//!
//! Every number leaves the program as a decimal string with a stated digit
//! count. Pass flags are computed from those strings, so re-reading an output
//! file reproduces them exactly.

use rug::ops::Pow;
use rug::{Float, Integer};

/// Working precision for parsing and comparing decimal strings.
const CMP_PREC: u32 = 256;

/// Scientific notation with `sig` significant digits, e.g. `5.051e-3`.
pub fn sci(x: &Float, sig: usize) -> String {
    if x.is_zero() {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let (neg, digits, exp) = x.to_sign_string_exp(10, Some(sig.max(1)));
    let exp = exp.expect("finite nonzero") - 1;
    let (head, tail) = digits.split_at(1);
    let sign = if neg { "-" } else { "" };
    if tail.is_empty() {
        format!("{sign}{head}e{exp}")
    } else {
        format!("{sign}{head}.{tail}e{exp}")
    }
}

/// Fixed notation rounded to `decimals` places, with an explicit sign.
pub fn fixed(x: &Float, decimals: usize) -> String {
    let prec = x.prec().max(64) + 4 * decimals as u32;
    let scaled = Float::with_val(prec, x * Float::with_val(prec, 10).pow(decimals as u32)).round();
    let int = scaled.to_integer().unwrap_or_default();
    let neg = int < 0;
    let mut s = Integer::from(int.abs_ref()).to_string();
    if s.len() <= decimals {
        s = "0".repeat(decimals + 1 - s.len()) + &s;
    }
    let point = s.len() - decimals;
    let body = if decimals == 0 {
        s
    } else {
        format!("{}.{}", &s[..point], &s[point..])
    };
    format!("{}{}", if neg { "-" } else { "+" }, body)
}

pub fn parse(s: &str) -> Option<Float> {
    let s = s.trim().trim_start_matches('+');
    Float::parse(s).ok().map(|v| Float::with_val(CMP_PREC, v))
}

/// Number of digits after the decimal point in a fixed-notation literal.
pub fn decimals(s: &str) -> usize {
    s.split_once('.').map_or(0, |(_, frac)| frac.len())
}

/// `|a - b| / |b|`.
pub fn rel_dev_str(computed: &str, reference: &str) -> Option<Float> {
    let a = parse(computed)?;
    let b = parse(reference)?;
    Some(crate::numeric::rel_dev(&a, &b))
}

/// Error-table rule: relative deviation within `tolerance`.
pub fn error_cell_pass(computed: &str, reference: &str, tolerance: f64) -> (String, bool) {
    match rel_dev_str(computed, reference) {
        Some(d) => {
            let pass = d.to_f64() <= tolerance;
            (sci(&d, 4), pass)
        }
        None => ("nan".into(), false),
    }
}

/// Coefficient rule: within one unit of the reference's last printed digit.
pub fn coeff_cell_pass(computed: &str, reference: &str) -> (String, bool) {
    let (Some(a), Some(b)) = (parse(computed), parse(reference)) else {
        return ("nan".into(), false);
    };
    let unit = Float::with_val(CMP_PREC, 10).pow(-(decimals(reference) as i32));
    let diff = Float::with_val(CMP_PREC, &a - &b).abs();
    let tol = unit * Float::with_val(CMP_PREC, 1.0 + 1e-9);
    (sci(&crate::numeric::rel_dev(&a, &b), 4), diff <= tol)
}

/// `true` when `x` rounded to the reference's printed decimals reproduces it.
pub fn rounds_to(x: &Float, reference: &str) -> bool {
    let printed = fixed(x, decimals(reference));
    match (parse(&printed), parse(reference)) {
        (Some(a), Some(b)) => a == b,
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(v: f64) -> Float {
        Float::with_val(128, v)
    }

    #[test]
    fn scientific() {
        assert_eq!(sci(&f(0.005051234), 4), "5.051e-3");
        assert_eq!(sci(&f(-123.5), 3), "-1.24e2");
        assert_eq!(sci(&f(0.0), 4), "0");
        assert_eq!(sci(&f(7.0), 1), "7e0");
    }

    #[test]
    fn fixed_point() {
        assert_eq!(fixed(&f(1.5702287534698), 12), "+1.570228753470");
        assert_eq!(fixed(&f(-18.71865115111428), 10), "-18.7186511511");
        assert_eq!(fixed(&f(0.000123), 2), "+0.00");
        assert_eq!(fixed(&f(9.999), 2), "+10.00");
    }

    #[test]
    fn pass_rules() {
        assert!(error_cell_pass("5.06e-3", "5.051e-03", 0.005).1);
        assert!(!error_cell_pass("5.1e-3", "5.051e-03", 0.005).1);
        assert!(!coeff_cell_pass("+2.40239373061", "-2.4023937306").1);
        assert!(coeff_cell_pass("-2.40239373069", "-2.4023937306").1);
        assert!(!coeff_cell_pass("-2.40239373090", "-2.4023937306").1);
        assert!(rounds_to(&f(9.13820142516), "+9.1382014252"));
        assert!(!rounds_to(&f(9.13820142514), "+9.1382014252"));
        assert_eq!(decimals("+10.658049516385"), 12);
    }
}
