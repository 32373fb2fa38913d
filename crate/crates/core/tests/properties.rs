mod common;

use dpsqueeze::autmb::pullback_coeffs;
use dpsqueeze::domain::GeneralEllipsoid;
use dpsqueeze::scalemethod::{tau, DefiningFunctionPoly};
use dpsqueeze::squeeze::ball_automorphism;
use dpsqueeze::C64;
use proptest::prelude::*;

#[test]
fn weighted_homogeneity() {
    common::weighted_homogeneity(256).unwrap();
}

#[test]
fn hermitian_realness() {
    common::hermitian_realness(256).unwrap();
}

#[test]
fn boundary_preservation() {
    common::boundary_preservation(20, 1000).unwrap();
}

#[test]
fn inverse_round_trips() {
    common::inverse_round_trips(256).unwrap();
}

#[test]
fn estimator_consistency() {
    common::estimator_consistency(12, 256).unwrap();
}

#[test]
fn finite_differences() {
    common::finite_differences(128).unwrap();
}

#[test]
fn half_weight_enumeration() {
    assert_eq!(common::half_weight_indices(&[2, 2]), vec![vec![2, 0], vec![1, 1], vec![0, 2]]);
    assert_eq!(common::half_weight_indices(&[1]), vec![vec![1]]);
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 128, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn ball_automorphism_stays_in_ball(
        c in prop::collection::vec((-0.7f64..0.7, -0.7f64..0.7), 2),
        w in prop::collection::vec((-0.7f64..0.7, -0.7f64..0.7), 2),
    ) {
        let c: Vec<C64> = c.into_iter().map(|(a, b)| C64::new(a, b)).collect();
        let w: Vec<C64> = w.into_iter().map(|(a, b)| C64::new(a, b)).collect();
        prop_assume!(dpsqueeze::linalg::norm(&c) < 1.0 && dpsqueeze::linalg::norm(&w) < 1.0);
        let image = ball_automorphism(&c, &w).unwrap();
        prop_assert!(dpsqueeze::linalg::norm(&image) < 1.0);
    }

    #[test]
    fn tau_grows_with_eps(x in 0.0f64..0.95, e1 in 1e-6f64..1e-2, factor in 1.5f64..10.0) {
        let rho = DefiningFunctionPoly::ball(2);
        let eta = [C64::new(0.0, 0.0), C64::new(x, 0.0)];
        let v = [C64::new(0.0, 0.0), C64::new(1.0, 0.0)];
        prop_assert!(tau(&rho, &eta, &v, e1).unwrap() < tau(&rho, &eta, &v, e1 * factor).unwrap());
    }

    #[test]
    fn pullback_coefficients_approach_identity(b in 0.0f64..0.99, k in 1i32..30) {
        let a1 = 1.0 - 0.5f64.powi(k);
        let a2 = 1.0 - 0.5f64.powi(k + 1);
        let p1 = pullback_coeffs(b, a1).unwrap();
        let p2 = pullback_coeffs(b, a2).unwrap();
        prop_assert!(p2.c1 <= p1.c1 + 1e-15);
        prop_assert!((p2.c2 - 1.0).abs() <= (p1.c2 - 1.0).abs() + 1e-15);
        prop_assert!((p2.c3 - 1.0).abs() <= (p1.c3 - 1.0).abs() + 1e-15);
    }

    #[test]
    fn boundary_samples_lie_on_boundary(m in prop::collection::vec(1u32..=4, 1..=3), seed in any::<u64>()) {
        let d = GeneralEllipsoid::power_sum(m).unwrap();
        for b in d.boundary_sample(32, seed) {
            prop_assert!(d.rho(&b.z).abs() <= 1e-10);
        }
    }
}
