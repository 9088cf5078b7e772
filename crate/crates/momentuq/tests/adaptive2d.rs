//! Adaptive runs on 2D triangular meshes: the shock-tube configuration at
//! reduced scale.

use std::sync::Arc;

use momentuq::closure::EulerClosure;
use momentuq::mesh::generate_rect;
use momentuq::models::EulerModel;
use momentuq::random_space::{sparse_quadrature, tensor_quadrature, BasisSet, QuadratureFamily};
use momentuq::solver::{
    run, AdaptivityConfig, BoundaryCondition, Domain, DualUpdate, LevelSpec, MomentProblem,
    SolverConfig, SolverError, StochasticFn, StochasticLadder, TimeControl,
};

const RHO_UPPER: f64 = 1.289;
const E_UPPER: f64 = 1.0;

/// Two-state gas at rest with uncertain lower density, lower energy and
/// interface height: ρ_l ~ U(1.189, 1.389)·½, ρe_l ~ U(0.2, 0.4),
/// y_s ~ U(1.0, 1.2).
fn shock_tube_ic() -> StochasticFn {
    Arc::new(|x, xi, out| {
        let y_s = 1.1 + 0.1 * xi[2];
        if x[1] > y_s {
            out.copy_from_slice(&[RHO_UPPER, 0.0, 0.0, E_UPPER]);
        } else {
            let rho_l = 0.5 * (1.289 + 0.1 * xi[0]);
            let e_l = 0.3 + 0.1 * xi[1];
            out.copy_from_slice(&[rho_l, 0.0, 0.0, e_l]);
        }
    })
}

fn tube_domain(nx: usize, ny: usize) -> (momentuq::mesh::Mesh2D, Vec<BoundaryCondition>) {
    let mesh = generate_rect([0.0, 1.0], [0.0, 3.0], nx, ny);
    let lower: StochasticFn =
        Arc::new(|_x, _xi, out| out.copy_from_slice(&[0.5 * 1.289, 0.0, 0.0, 0.3]));
    let upper: StochasticFn =
        Arc::new(|_x, _xi, out| out.copy_from_slice(&[RHO_UPPER, 0.0, 0.0, E_UPPER]));
    // Markers: left, right, bottom, top.
    let bcs = vec![
        BoundaryCondition::SlipWall,
        BoundaryCondition::SlipWall,
        BoundaryCondition::Dirichlet(lower),
        BoundaryCondition::Dirichlet(upper),
    ];
    (mesh, bcs)
}

fn tensor_ladder() -> StochasticLadder {
    StochasticLadder::new(vec![
        LevelSpec {
            basis: BasisSet::total_degree(1, 3),
            rule: tensor_quadrature(QuadratureFamily::ClenshawCurtis, &[1, 1, 1], 3),
        },
        LevelSpec {
            basis: BasisSet::total_degree(2, 3),
            rule: tensor_quadrature(QuadratureFamily::ClenshawCurtis, &[2, 2, 2], 3),
        },
    ])
}

#[test]
fn adaptive_tube_refines_at_the_shock_and_keeps_variance_nonnegative() {
    let (mesh, bcs) = tube_domain(6, 18); // 216 triangles at test scale
    let domain = Domain::triangular(&mesh, bcs);
    let model = EulerModel::new(1.4, 2);
    let closure = EulerClosure::new(1.4);
    let ladder = tensor_ladder();
    let problem = MomentProblem {
        model: &model,
        closure: &closure,
        ladder: &ladder,
        domain: &domain,
        initial: shock_tube_ic(),
    };
    let mut config = SolverConfig::new(TimeControl::EndTime(0.5));
    config.dual.tau = 1e-7;
    config.workers = 2;
    let mut adapt = AdaptivityConfig::new(2e-3, 2e-2);
    adapt.initial_level = 0;
    let out = run(&problem, &config, DualUpdate::Converge, Some(&adapt), None).unwrap();

    // Var[ρ] ≥ 0 everywhere (sum of squares, checked for sanity).
    for j in 0..domain.n_cells() {
        assert!(out.moments.variance(j)[0] >= 0.0);
    }
    // Some cells must sit above the base level, concentrated at the front.
    let elevated: Vec<usize> =
        (0..domain.n_cells()).filter(|&j| out.levels[j] > 0).collect();
    assert!(!elevated.is_empty(), "no cell ever refined");
    eprintln!(
        "elevated {} of {} cells after {} steps (t = {:.3})",
        elevated.len(),
        domain.n_cells(),
        out.steps,
        out.final_time
    );
}

#[test]
fn sparse_rule_with_order_three_moments_fails_with_ill_conditioned_hessian() {
    let (mesh, bcs) = tube_domain(6, 18);
    let domain = Domain::triangular(&mesh, bcs);
    let model = EulerModel::new(1.4, 2);
    let closure = EulerClosure::new(1.4);
    let ladder = StochasticLadder::single(BasisSet::total_degree(3, 3), sparse_quadrature(5, 3));
    assert_eq!(ladder.rule(0).len(), 441);
    let problem = MomentProblem {
        model: &model,
        closure: &closure,
        ladder: &ladder,
        domain: &domain,
        initial: shock_tube_ic(),
    };
    let config = SolverConfig::new(TimeControl::EndTime(2.0));
    let err = run(&problem, &config, DualUpdate::Converge, None, None).unwrap_err();
    match &err {
        SolverError::Dual { source, .. } => {
            assert!(
                matches!(source, momentuq::closure::ClosureError::IllConditionedHessian { rule }
                    if rule.contains("sparse")),
                "unexpected dual failure: {source}"
            );
        }
        other => panic!("expected an ill-conditioned Hessian failure, got {other}"),
    }
}
