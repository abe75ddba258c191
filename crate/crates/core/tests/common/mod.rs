//! Independent oracles shared by the integration and acceptance tests.
//!
//! The closed forms are evaluated in exact rational arithmetic and only
//! rounded at the end.

#![allow(dead_code)]

use ball_asymptotics::numeric::Rational;
use rug::{Float, Rational as Q};

pub fn q(s: &str) -> Q {
    let r: Rational = s.parse().unwrap();
    Q::from((r.numer(), r.denom()))
}

pub fn r(s: &str) -> Rational {
    s.parse().unwrap()
}

fn poly(v: &Q, c: &[i64]) -> Q {
    let mut acc = Q::new();
    for &ci in c.iter().rev() {
        acc = acc * v + Q::from(ci);
    }
    acc
}

fn shifted(v: &Q, s: i64, e: u32) -> Q {
    let b = v + Q::from(s);
    let mut out = Q::from(1);
    for _ in 0..e {
        out *= &b;
    }
    out
}

/// `A_k(ν)` of the I-case, `k <= 8`.
pub fn a_closed(k: usize, v: &Q) -> Q {
    let s = |sh, e| shifted(v, sh, e);
    let (num, den): (Q, Q) = match k {
        0 => (Q::from(1), Q::from(1)),
        1 => (Q::from(1), 2 * s(1, 1)),
        2 => (Q::from(3), 8 * s(1, 2)),
        3 => (poly(v, &[8, 3]), 16 * s(1, 3) * s(2, 1)),
        4 => (5 * poly(v, &[8, 1]), 128 * s(1, 4) * s(2, 1)),
        5 => (poly(v, &[142, 11, -5]), 256 * s(1, 5) * s(2, 1) * s(3, 1)),
        6 => (7 * poly(v, &[272, 8, -71, -5]), 3072 * s(1, 6) * s(2, 2) * s(3, 1)),
        7 => (
            poly(v, &[2656, -1364, -1602, -137, 19]),
            2048 * s(1, 7) * s(2, 2) * s(3, 1) * s(4, 1),
        ),
        // ν³ coefficient 1035, re-derived by exact reversion.
        8 => (
            3 * poly(v, &[6816, -11740, -4770, 1035, 119]),
            32768 * s(1, 8) * s(2, 2) * s(3, 1) * s(4, 1),
        ),
        _ => panic!("no closed form for k = {k}"),
    };
    num / den
}

/// `Â_k(ν)` of the Î-case, `k <= 5`.
pub fn ahat_closed(k: usize, v: &Q) -> Q {
    let s = |sh, e| shifted(v, sh, e);
    let (num, den): (Q, Q) = match k {
        0 => (Q::from(1), Q::from(1)),
        1 => (Q::from(3), 4 * s(2, 1)),
        2 => (-5 * poly(v, &[1, 11]), 96 * s(2, 2) * s(3, 1)),
        3 => (-7 * poly(v, &[20, 9, -17]), 128 * s(2, 3) * s(3, 1) * s(4, 1)),
        4 => (
            poly(v, &[75404, 262439, 182205, -28031, -19409]),
            10240 * s(2, 4) * s(3, 2) * s(4, 1) * s(5, 1),
        ),
        5 => (
            11 * poly(v, &[127864, -364742, -1417421, -966731, 8605, 48361]),
            122880 * s(2, 5) * s(3, 2) * s(4, 1) * s(5, 1) * s(6, 1),
        ),
        _ => panic!("no closed form for k = {k}"),
    };
    num / den
}

/// `γ_k = Π_j (σ_j+1)/(σ_j+k)`.
pub fn gamma_k(sigma: &[Q], k: i64) -> Q {
    sigma
        .iter()
        .fold(Q::from(1), |acc, s| acc * Q::from(s + 1i64) / (s + Q::from(k)))
}

/// `(1+9p+20p²)γ₂² - 4p(4p+1)γ₂γ₃ + 2p²γ₃γ₄`, the cubic group that enters
/// `A_3` as `-γ₂` times this bracket (re-derived by exact reversion).
pub fn hyper_a3_cubic(p: &Q, g2: &Q, g3: &Q, g4: &Q) -> Q {
    poly(p, &[1, 9, 20]) * Q::from(g2 * g2) - 4 * (p * poly(p, &[1, 4])) * Q::from(g2 * g3)
        + 2 * poly(p, &[0, 0, 1]) * Q::from(g3 * g4)
}

/// Hyper-Bessel `A_k(σ)`, `k <= 4`.
pub fn hyper_closed(k: usize, sigma: &[Q]) -> Q {
    let p = Q::from(sigma.len() as i64 + 1);
    let g2 = gamma_k(sigma, 2);
    let g3 = gamma_k(sigma, 3);
    let g4 = gamma_k(sigma, 4);
    let g5 = gamma_k(sigma, 5);
    let pp = |c: &[i64]| poly(&p, c);
    match k {
        0 => Q::from(1),
        1 => (Q::from(1) - &g2) / 2,
        2 => {
            (pp(&[3, 1]) - 6 * pp(&[1, 1]) * &g2 + 3 * pp(&[1, 3]) * Q::from(&g2 * &g2) - 4 * Q::from(&p * &g2) * &g3)
                / 24
        }
        3 => {
            let quadratic = pp(&[1, 1]) - pp(&[1, 1]) * pp(&[3, 4]) * &g2
                + 3 * pp(&[1, 2]) * pp(&[1, 3]) * Q::from(&g2 * &g2)
                - 4 * (&p * pp(&[1, 2])) * Q::from(&g2 * &g3);
            (quadratic - (&g2 * hyper_a3_cubic(&p, &g2, &g3, &g4))) / 48
        }
        4 => {
            let g22 = Q::from(&g2 * &g2);
            let t0 = pp(&[15, 30, 5, -2]);
            let t1 = -60 * pp(&[1, 1]) * pp(&[1, 1]) * pp(&[1, 2]) * &g2;
            let t2 = 10 * pp(&[3, 13, 14]) * &g2 * (3 * pp(&[1, 3]) * &g2 - 4 * Q::from(&p * &g3));
            let inner = pp(&[1, 9, 20]) * &g22 - 4 * (&p * pp(&[1, 4])) * Q::from(&g2 * &g3)
                + 2 * pp(&[0, 0, 1]) * Q::from(&g3 * &g4);
            let t3 = -60 * pp(&[1, 3]) * &g2 * inner;
            let brace = 15 * pp(&[1, 18, 107, 210]) * Q::from(&g22 * &g2)
                - 120 * (&p * pp(&[1, 11, 30])) * Q::from(&g22 * &g3)
                + 40 * pp(&[0, 0, 1]) * pp(&[1, 5]) * &g2 * &g3 * (2 * g3.clone() + 3 * g4.clone())
                - 48 * pp(&[0, 0, 0, 1]) * &g3 * &g4 * &g5;
            let t4 = &g2 * brace;
            (t0 + t1 + t2 + t3 + t4) / 5760
        }
        _ => panic!("no closed form for k = {k}"),
    }
}

pub fn to_float(x: &Q, prec: u32) -> Float {
    Float::with_val(prec, x)
}

/// `|a - b| / |b|` with `b` exact; absolute deviation when `b = 0`.
pub fn rel_dev_exact(a: &Float, b: &Q, prec: u32) -> Float {
    let bf = to_float(b, prec + 64);
    let d = Float::with_val(prec + 64, a - &bf).abs();
    if bf.is_zero() {
        d
    } else {
        d / bf.abs()
    }
}

pub const NU_CHOICES: [&str; 5] = ["0", "1/4", "3/4", "1", "2"];
pub const SIGMA_CHOICES: [&[&str]; 2] = [&["1/2", "3/4"], &["1/3", "2/3", "5/4"]];

/// Largest relative deviation between reverted coefficients and the closed
/// forms over all parameter choices, with a label for the worst case.
pub fn closed_form_worst(prec: u32) -> (f64, String) {
    use ball_asymptotics::expansions::{coeffs_a_hyper, coeffs_a_i, coeffs_ahat};
    use ball_asymptotics::specfun::HyperParams;
    let mut worst = (0.0f64, String::new());
    let mut note = |d: Float, label: String| {
        let d = d.to_f64();
        if d >= worst.0 {
            worst = (d, label);
        }
    };
    for nu in NU_CHOICES {
        let a = coeffs_a_i(r(nu), 8, prec).unwrap();
        for k in 0..=8 {
            note(
                rel_dev_exact(&a.values[k], &a_closed(k, &q(nu)), prec),
                format!("A_{k}(nu={nu})"),
            );
        }
        let ah = coeffs_ahat(r(nu), 5, prec).unwrap();
        for k in 0..=5 {
            note(
                rel_dev_exact(&ah.values[k], &ahat_closed(k, &q(nu)), prec),
                format!("Ahat_{k}(nu={nu})"),
            );
        }
    }
    for sigma in SIGMA_CHOICES {
        let hp = HyperParams::new(sigma.iter().map(|s| r(s)).collect()).unwrap();
        let sq: Vec<Q> = sigma.iter().map(|s| q(s)).collect();
        let a = coeffs_a_hyper(&hp, 4, prec).unwrap();
        for k in 0..=4 {
            note(
                rel_dev_exact(&a.values[k], &hyper_closed(k, &sq), prec),
                format!("A_{k}(sigma={sigma:?})"),
            );
        }
    }
    worst
}
