mod common;

use admm4pop::admm::{self, project_triple, projection_gradient, rho_lower_bound, u_update, x_update_relaxed, z_update};
use admm4pop::bench;
use admm4pop::numerics::{quintic_real_roots, spectral_norm, QuinticCoefficients};
use admm4pop::{reduce_to_qop, Monomial, Polynomial, PopProblem};
use common::triple_cost;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn finite() -> impl Strategy<Value = f64> {
    -8.0f64..8.0
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn projection_is_stationary_and_feasible(v in prop::array::uniform3(finite())) {
        let z = project_triple(v);
        prop_assert_eq!(z[2], z[0] * z[1]);
        let g = projection_gradient(v, z[0], z[1]);
        let norm_v = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        prop_assert!(g[0].hypot(g[1]) <= 1e-8 * (1.0 + norm_v));
    }

    #[test]
    fn projection_is_idempotent(v in prop::array::uniform3(finite())) {
        let z = project_triple(v);
        let again = project_triple(z);
        for k in 0..3 {
            prop_assert!((again[k] - z[k]).abs() <= 1e-9 * (1.0 + z[k].abs()));
        }
    }

    #[test]
    fn quintic_roots_are_roots(c in prop::array::uniform5(-10.0f64..10.0)) {
        let q = QuinticCoefficients(c);
        let roots = quintic_real_roots(&q);
        prop_assert!(!roots.is_empty());
        for r in roots {
            let (p, dp) = q.eval_with_derivative(r);
            // one Newton step would move the root by at most 1e-8
            prop_assert!(p.abs() <= 1e-8 * dp.abs().max(1.0));
        }
    }

    #[test]
    fn spectral_norm_matches_svd(rows in 1usize..7, cols in 1usize..7, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = DMatrix::from_fn(rows, cols, |_, _| rng.random_range(-2.0..2.0));
        let oracle = m.clone().svd(false, false).singular_values.max();
        prop_assert!((spectral_norm(&m) - oracle).abs() <= 1e-9 * (1.0 + oracle));
    }

    #[test]
    fn scaled_dual_identity(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = reduce_to_qop(&bench::gen_experiment1(seed % 100).pop);
        let n = q.dim();
        let x = DVector::from_fn(n, |_, _| rng.random_range(-3.0..3.0));
        let u = DVector::from_fn(n, |_, _| rng.random_range(-3.0..3.0));
        let z = z_update(&q, &x, &u);
        prop_assert_eq!(q.bilinear_violation(&z), 0.0);
        let next = u_update(&u, &x, &z);
        prop_assert_eq!(next, &u + (&x - &z));
    }

    #[test]
    fn reduction_preserves_semantics(
        n in 1usize..=4,
        terms in prop::collection::vec((prop::collection::vec(0usize..4, 0..=4), -3.0f64..3.0), 1..6),
        point in prop::collection::vec(-2.0f64..2.0, 4),
    ) {
        let mut obj = Polynomial::zero(n);
        for (factors, c) in &terms {
            let f: Vec<usize> = factors.iter().map(|v| v % n).collect();
            obj.add_term(Monomial::from_factors(&f), *c);
        }
        let pop = PopProblem::unconstrained(obj.clone());
        let q = reduce_to_qop(&pop);
        prop_assert!(q.validate().is_empty());
        let x = &point[..n];
        let lifted = q.lift_point(x).unwrap();
        let f = obj.evaluate(x).unwrap();
        let scale: f64 = obj.terms().map(|(m, c)| (c * m.eval(x)).abs()).sum::<f64>().max(1.0);
        prop_assert!((q.cost(&lifted) - f).abs() <= 1e-9 * scale);
        prop_assert_eq!(q.project_solution(&lifted).unwrap(), x.to_vec());
    }
}

#[test]
fn projection_beats_dense_feasible_sample() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..20 {
        let v = [rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)];
        let z = project_triple(v);
        let best = triple_cost(v, z[0], z[1]);
        for _ in 0..10_000 {
            let (a, b) = (rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0));
            assert!(best <= triple_cost(v, a, b) + 1e-12);
        }
    }
}

#[test]
fn projection_of_one_one_two_matches_grid() {
    let v = [1.0, 1.0, 2.0];
    let z = project_triple(v);
    let (_, _, oracle) = common::projection_oracle(v, 1e-3);
    assert!((triple_cost(v, z[0], z[1]) - oracle).abs() <= 1e-6);
}

#[test]
fn relaxed_step_on_identification_instance() {
    let q = bench::gen_experiment2(5, 50).to_qop();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let n = q.dim();
    let z = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
    let u = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
    let (rho, gamma) = (1.0, 10.0);
    let x = x_update_relaxed(&q, &z, &u, rho, gamma).unwrap();
    let ct = q.eq_mat.transpose();
    let lhs = &q.quad * &x + &ct * (&q.eq_mat * &x) * (2.0 * gamma) + &x * rho;
    let rhs = (&z - &u) * rho - &q.lin + &ct * &q.eq_rhs * (2.0 * gamma);
    assert!((lhs - rhs).amax() <= 1e-10);
}

#[test]
fn rho_bound_matches_eigen_oracle() {
    let q = bench::gen_experiment2(6, 50).to_qop();
    let gamma = 10.0;
    let hess = &q.quad + q.eq_mat.transpose() * &q.eq_mat * (2.0 * gamma);
    let oracle = std::f64::consts::SQRT_2 * hess.symmetric_eigenvalues().amax();
    let bound = rho_lower_bound(&q, gamma);
    assert!((bound - oracle).abs() <= 1e-8 * oracle, "{bound} vs {oracle}");
}

#[test]
fn below_bound_rho_only_warns() {
    let q = reduce_to_qop(&bench::gen_experiment1(2).pop);
    let cfg = admm::AdmmConfig { rho: 2.0, ..Default::default() };
    let report = admm::run(&q, &cfg).unwrap();
    assert!(report.rho_lower_bound > 2.0);
    assert_eq!(report.warnings.len(), 1);
}

#[test]
fn unbounded_objective_never_converges() {
    // min −x1 with no constraints: x1 drifts by 1/ρ per iteration
    let pop = PopProblem::unconstrained(Polynomial::parse("-x1", 1).unwrap());
    let q = reduce_to_qop(&pop);
    let cfg = admm::AdmmConfig { rho: 1.0, max_iter: 2000, ..Default::default() };
    match admm::run(&q, &cfg) {
        Ok(report) => assert_eq!(report.status, admm4pop::SolveStatus::MaxIter),
        Err(e) => assert!(matches!(e, admm::AdmmError::Divergence { .. }), "{e}"),
    }
}
