mod common;

use common::{brute_force_bias, hull_support, small_snapshot};
use nalgebra::DVector;
use polyfeas_core::baselines::{membership_gap, random_unit_directions, support_oracle};
use polyfeas_core::error::Error;
use polyfeas_core::ichm::{evaluate, EvaluateOptions, ExplicitForm};
use polyfeas_core::lp::DEFAULT_TOL;
use polyfeas_core::msk::{
    bias_force, bias_objective, capacity_along, mock_model, raw_problem, residual_problem,
    residual_problem_unshifted,
};
use polyfeas_core::numerics::svd_split;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn bias_matches_brute_force(seed in any::<u64>()) {
        let (s, f_star) = small_snapshot(seed);
        let (best, _) = brute_force_bias(&s).expect("F* is feasible");
        let r = bias_force(&s, 1e-10).unwrap();
        prop_assert!((r.objective - best).abs() <= 1e-8, "qp {} oracle {}", r.objective, best);
        prop_assert!(r.kkt_residual <= 1e-6);
        prop_assert!((bias_objective(&s, &r.f_bias) - r.objective).abs() <= 1e-9);
        prop_assert!(r.objective <= bias_objective(&s, &f_star) + 1e-9);
        let torque = -&s.moment_arm_t * &r.f_bias;
        prop_assert!((torque - &s.torque_bias).amax() <= 1e-7 * (1.0 + s.torque_bias.amax()));
        for i in 0..s.muscles() {
            prop_assert!(r.f_bias[i] >= s.f_passive[i] && r.f_bias[i] <= s.f_max[i]);
        }
    }

    /// No feasible force found by sampling the torque-consistent set beats
    /// the bias force.
    #[test]
    fn bias_beats_random_feasible_forces(seed in any::<u64>()) {
        let (s, f_star) = small_snapshot(seed);
        let r = bias_force(&s, 1e-10).unwrap();
        let c = -&s.moment_arm_t;
        let null = svd_split(&c.transpose(), 1e-12).unwrap().null_basis;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..50 {
            if null.ncols() == 0 {
                break;
            }
            let step = &null * DVector::from_fn(null.ncols(), |_, _| rng.random_range(-50.0..50.0));
            let f = &f_star + step;
            if (0..s.muscles()).all(|i| f[i] >= s.f_passive[i] && f[i] <= s.f_max[i]) {
                prop_assert!(r.objective <= bias_objective(&s, &f) + 1e-9);
            }
        }
    }

    #[test]
    fn residual_sets_contain_origin(seed in any::<u64>()) {
        let (s, _) = small_snapshot(seed);
        let bias = bias_force(&s, 1e-10).unwrap();
        let zero = DVector::zeros(s.output_dim());
        for p in [residual_problem(&s, &bias).unwrap(), residual_problem_unshifted(&s, &bias).unwrap()] {
            let form = ExplicitForm::new(&p, DEFAULT_TOL).unwrap();
            prop_assert!(membership_gap(&form, &zero).unwrap() <= 1e-6);
        }
    }

    #[test]
    fn capacity_is_the_support_function(seed in any::<u64>()) {
        let s = mock_model(seed, 7, 12, 3).unwrap();
        let p = raw_problem(&s).unwrap();
        let form = ExplicitForm::new(&p, DEFAULT_TOL).unwrap();
        let dirs = random_unit_directions(seed, 5, 3);
        let support = support_oracle(&form, &dirs).unwrap();
        for (c, h) in dirs.iter().zip(&support) {
            let cap = capacity_along(&p, c).unwrap();
            prop_assert!((cap - h).abs() <= 1e-9 * h.abs().max(1.0));
        }
    }
}

#[test]
fn capacity_agrees_with_the_evaluated_polytope() {
    for seed in 0..10 {
        let s = mock_model(seed, 7, 20, 3).unwrap();
        let p = raw_problem(&s).unwrap();
        let eps = 0.1;
        let r = evaluate(&p, &EvaluateOptions::with_eps(eps)).unwrap();
        for c in random_unit_directions(seed, 20, 3) {
            let cap = capacity_along(&p, &c).unwrap();
            let inner = hull_support(&r.vertices, &c);
            assert!(inner <= cap + 1e-7 && cap <= inner + eps + 1e-7, "{inner} {cap}");
        }
    }
}

#[test]
fn mock_jacobians_have_full_rank() {
    for seed in 0..200 {
        let s = mock_model(seed, 7, 20, 3).unwrap();
        assert_eq!(svd_split(&s.jacobian_t, 1e-12).unwrap().rank(), 3);
        assert!(s.f_max.iter().all(|f| (100.0..=1000.0).contains(f)));
    }
}

#[test]
fn capacity_rejects_bad_directions() {
    let s = mock_model(1, 7, 20, 3).unwrap();
    let p = raw_problem(&s).unwrap();
    assert!(matches!(capacity_along(&p, &DVector::from_vec(vec![1.0, 1.0, 0.0])), Err(Error::InvalidArgument(_))));
    assert!(matches!(capacity_along(&p, &DVector::from_vec(vec![1.0, 0.0])), Err(Error::Dimension(_))));
    assert!(matches!(capacity_along(&p, &DVector::from_vec(vec![f64::NAN, 0.0, 0.0])), Err(Error::NonFinite)));
}
