//! Scratch probe: at which tube resolution does the 441-node sparse rule
//! break the dual Hessian? Run: cargo run --example probe_sparse -- NX NY ORDER

use std::sync::Arc;

use momentuq::closure::EulerClosure;
use momentuq::mesh::generate_rect;
use momentuq::models::EulerModel;
use momentuq::random_space::{
    sparse_quadrature, tensor_quadrature, BasisSet, QuadratureFamily,
};
use momentuq::solver::{
    run, AdaptivityConfig, BoundaryCondition, Domain, DualUpdate, LevelSpec, MomentProblem,
    SolverConfig, StochasticFn, StochasticLadder, TimeControl,
};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let nx: usize = args.get(1).map(|s| s.parse().unwrap()).unwrap_or(6);
    let ny: usize = args.get(2).map(|s| s.parse().unwrap()).unwrap_or(18);
    let order: usize = args.get(3).map(|s| s.parse().unwrap()).unwrap_or(3);
    let mesh = generate_rect([0.0, 1.0], [0.0, 3.0], nx, ny);
    println!("tube {}x{} = {} cells, order {}", nx, ny, mesh.n_cells(), order);
    let lower: StochasticFn =
        Arc::new(|_x, _xi, out| out.copy_from_slice(&[0.5 * 1.289, 0.0, 0.0, 0.3]));
    let upper: StochasticFn =
        Arc::new(|_x, _xi, out| out.copy_from_slice(&[1.289, 0.0, 0.0, 1.0]));
    let bcs = vec![
        BoundaryCondition::SlipWall,
        BoundaryCondition::SlipWall,
        BoundaryCondition::Dirichlet(lower),
        BoundaryCondition::Dirichlet(upper),
    ];
    let domain = Domain::triangular(&mesh, bcs);
    let model = EulerModel::new(1.4, 2);
    let closure = EulerClosure::new(1.4);
    let tensor = std::env::args().nth(4).as_deref() == Some("tensor");
    let ladder = if tensor {
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
    } else {
        StochasticLadder::single(BasisSet::total_degree(order, 3), sparse_quadrature(5, 3))
    };
    let ic: StochasticFn = Arc::new(|x, xi, out| {
        let y_s = 1.1 + 0.1 * xi[2];
        if x[1] > y_s {
            out.copy_from_slice(&[1.289, 0.0, 0.0, 1.0]);
        } else {
            out.copy_from_slice(&[0.5 * (1.289 + 0.1 * xi[0]), 0.0, 0.0, 0.3 + 0.1 * xi[1]]);
        }
    });
    let problem = MomentProblem {
        model: &model,
        closure: &closure,
        ladder: &ladder,
        domain: &domain,
        initial: ic,
    };
    let mut config = SolverConfig::new(TimeControl::EndTime(2.0));
    config.workers = 8;
    let started = std::time::Instant::now();
    let mut steps = 0usize;
    let mut obs = |rec: &momentuq::solver::StepRecord| {
        steps = rec.step;
        if rec.step % 20 == 0 {
            println!("step {} t={:.3} ({:.1}s)", rec.step, rec.time, started.elapsed().as_secs_f64());
        }
    };
    let adapt = tensor.then(|| AdaptivityConfig::new(1e-3, 5e-3));
    match run(&problem, &config, DualUpdate::Converge, adapt.as_ref(), Some(&mut obs)) {
        Ok(out) => println!(
            "COMPLETED: {} steps to t={:.3} in {:.1}s",
            out.steps,
            out.final_time,
            started.elapsed().as_secs_f64()
        ),
        Err(e) => println!("FAILED after {steps} steps in {:.1}s: {e}", started.elapsed().as_secs_f64()),
    }
}
