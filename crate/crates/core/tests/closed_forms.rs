mod common;

use ball_asymptotics::expansions::{coeffs_a_hyper, coeffs_a_i, coeffs_ahat};
use ball_asymptotics::specfun::HyperParams;
use common::*;
use proptest::prelude::*;
use rug::Rational as Q;

#[test]
fn closed_forms_at_fixed_parameters() {
    let (worst, label) = closed_form_worst(256);
    assert!(worst < 2f64.powi(-256 + 24), "{label}: {worst:e}");
}

#[test]
fn i_case_low_coefficients_are_positive() {
    for nu in ["0", "1/4", "1/2", "3/4", "1"] {
        let a = coeffs_a_i(r(nu), 6, 128).unwrap();
        assert!(a.values.iter().all(|v| *v > 0), "nu = {nu}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn i_and_ihat_match_closed_forms(num in 0i64..40, den in 1i64..12) {
        let nu = format!("{num}/{den}");
        let v = q(&nu);
        let a = coeffs_a_i(r(&nu), 8, 192).unwrap();
        for k in 0..=8 {
            prop_assert!(rel_dev_exact(&a.values[k], &a_closed(k, &v), 192).to_f64() < 2f64.powi(-192 + 24));
        }
        let ah = coeffs_ahat(r(&nu), 5, 192).unwrap();
        for k in 0..=5 {
            prop_assert!(rel_dev_exact(&ah.values[k], &ahat_closed(k, &v), 192).to_f64() < 2f64.powi(-192 + 24));
        }
    }

    #[test]
    fn hyper_matches_closed_form(s in prop::collection::vec((0i64..20, 1i64..6), 1..4)) {
        let sigma: Vec<String> = s.iter().map(|(n, d)| format!("{n}/{d}")).collect();
        let hp = HyperParams::new(sigma.iter().map(|x| r(x)).collect()).unwrap();
        let sq: Vec<Q> = sigma.iter().map(|x| q(x)).collect();
        let a = coeffs_a_hyper(&hp, 4, 192).unwrap();
        for k in 0..=4 {
            prop_assert!(rel_dev_exact(&a.values[k], &hyper_closed(k, &sq), 192).to_f64() < 2f64.powi(-192 + 24));
        }
    }
}
