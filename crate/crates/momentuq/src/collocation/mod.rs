//! Stochastic collocation: deterministic solves at quadrature points,
//! assembled into moments by the bracket operator.
//!
//! Two modes exist. **Black-box** runs every point independently (its own
//! time steps, its own steady residual) and is embarrassingly parallel —
//! this is the production configuration. **Coupled** advances all points
//! with a shared Δt per pseudo-time step, which allows recording
//! expectation and variance errors against a reference after every step;
//! its extra synchronization cost is a measurement artifact, so runtimes
//! of coupled runs are conventionally rescaled to black-box clocks by the
//! caller.

mod deterministic;

pub use deterministic::{
    point_max_wave_speed, point_residual, point_step, project_point_initial, solve_deterministic,
    PointFailure, PointState,
};

use std::time::Instant;

use nalgebra::DMatrix;
use thiserror::Error;

use crate::mesh::{relative_l2_error, BoxMask, CellGeometry};
use crate::models::ModelProblem;
use crate::parallel;
use crate::random_space::{BasisSet, QuadratureRule};
use crate::solver::{Domain, MomentField, StochasticFn, TimeControl};

#[derive(Debug, Error)]
pub enum ScError {
    #[error("{} collocation point(s) failed; first: point {} ({})", .0.len(), .0[0].0, .0[0].1)]
    PointFailures(Vec<(usize, PointFailure)>),
    #[error("coupled error recording needs a reference")]
    MissingReference,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScMode {
    Blackbox,
    Coupled,
}

#[derive(Clone)]
pub struct ScConfig {
    pub cfl: f64,
    pub time: TimeControl,
    pub workers: usize,
    /// Conserved component driving per-point steady residuals (density).
    pub steady_component: usize,
    /// Shared fixed Δt, overriding the CFL condition (used by equivalence
    /// tests between the two modes).
    pub fixed_dt: Option<f64>,
}

impl ScConfig {
    pub fn new(time: TimeControl) -> Self {
        Self { cfl: 0.5, time, workers: 1, steady_component: 0, fixed_dt: None }
    }
}

/// Relative L² errors of one recorded step.
#[derive(Debug, Clone)]
pub struct ScErrorRecord {
    pub step: usize,
    pub time: f64,
    /// Raw wall clock of the coupled run up to this step; callers rescale
    /// to black-box timings for reporting.
    pub wall_seconds: f64,
    pub rel_e_error: f64,
    pub rel_var_error: f64,
}

pub struct ScOutput {
    pub moments: MomentField,
    pub per_point_steps: Vec<usize>,
    pub steps: usize,
    pub final_time: f64,
    /// Per-step errors (coupled mode with a reference).
    pub error_series: Vec<ScErrorRecord>,
}

/// Moments û_i = Σ_k w_k u(ξ_k) φ_i(ξ_k) f_Ξ(ξ_k) from per-point states,
/// reduced in fixed point-index blocks.
pub fn assemble_moments(
    points: &[PointState],
    rule: &QuadratureRule,
    tab: &DMatrix<f64>,
    n_cells: usize,
    m: usize,
) -> MomentField {
    let n = tab.ncols();
    let cells = parallel::ordered_map(n_cells, |j| {
        parallel::blocked_sum(
            rule.len(),
            DMatrix::zeros(n, m),
            |range| {
                let mut part = DMatrix::zeros(n, m);
                for k in range {
                    let wf = rule.weight(k) * rule.density(k);
                    let u = points[k].cell(j);
                    for a in 0..m {
                        let ws = wf * u[a];
                        for i in 0..n {
                            part[(i, a)] += ws * tab[(k, i)];
                        }
                    }
                }
                part
            },
            |acc, p| *acc += p,
        )
    });
    MomentField { cells }
}

/// Run stochastic collocation.
///
/// In coupled mode with a `reference`, expectation and variance errors of
/// `error_component` are recorded after every shared step over the
/// optionally masked region.
#[allow(clippy::too_many_arguments)]
pub fn run_sc(
    model: &dyn ModelProblem,
    domain: &Domain,
    geometry: &(dyn CellGeometry + Sync),
    ic: &StochasticFn,
    rule: &QuadratureRule,
    basis: &BasisSet,
    config: &ScConfig,
    mode: ScMode,
    reference: Option<&MomentField>,
    error_component: usize,
    mask: Option<&BoxMask>,
) -> Result<ScOutput, ScError> {
    let pool = parallel::WorkerPool::new(config.workers);
    pool.install(|| match mode {
        ScMode::Blackbox => run_blackbox(model, domain, ic, rule, basis, config),
        ScMode::Coupled => run_coupled(
            model,
            domain,
            geometry,
            ic,
            rule,
            basis,
            config,
            reference,
            error_component,
            mask,
        ),
    })
}

fn run_blackbox(
    model: &dyn ModelProblem,
    domain: &Domain,
    ic: &StochasticFn,
    rule: &QuadratureRule,
    basis: &BasisSet,
    config: &ScConfig,
) -> Result<ScOutput, ScError> {
    let m = model.num_conserved();
    let results = parallel::ordered_map(rule.len(), |k| {
        solve_deterministic(
            model,
            domain,
            ic,
            rule.point(k),
            config.time,
            config.cfl,
            config.fixed_dt,
            config.steady_component,
        )
    });
    let mut points = Vec::with_capacity(rule.len());
    let mut steps = Vec::with_capacity(rule.len());
    let mut failures = Vec::new();
    for (k, r) in results.into_iter().enumerate() {
        match r {
            Ok((ps, s)) => {
                points.push(ps);
                steps.push(s);
            }
            Err(f) => failures.push((k, f)),
        }
    }
    if !failures.is_empty() {
        return Err(ScError::PointFailures(failures));
    }
    let tab = basis.tabulate(rule);
    let moments = assemble_moments(&points, rule, &tab, domain.n_cells(), m);
    let max_steps = steps.iter().copied().max().unwrap_or(0);
    Ok(ScOutput {
        moments,
        per_point_steps: steps,
        steps: max_steps,
        final_time: f64::NAN,
        error_series: Vec::new(),
    })
}

#[allow(clippy::too_many_arguments)]
fn run_coupled(
    model: &dyn ModelProblem,
    domain: &Domain,
    geometry: &(dyn CellGeometry + Sync),
    ic: &StochasticFn,
    rule: &QuadratureRule,
    basis: &BasisSet,
    config: &ScConfig,
    reference: Option<&MomentField>,
    error_component: usize,
    mask: Option<&BoxMask>,
) -> Result<ScOutput, ScError> {
    let m = model.num_conserved();
    let n_cells = domain.n_cells();
    let tab = basis.tabulate(rule);
    let started = Instant::now();

    let mut points: Vec<PointState> = parallel::ordered_map(rule.len(), |k| {
        project_point_initial(ic, domain, rule.point(k), m)
    });
    let mut error_series = Vec::new();
    let mut t = 0.0;
    let mut step = 0usize;
    loop {
        match config.time {
            TimeControl::FixedSteps(n) if step >= n => break,
            TimeControl::EndTime(te) if t >= te * (1.0 - 1e-14) => break,
            _ => {}
        }
        // Shared Δt: the smallest CFL step over all points.
        let mut dt = match config.fixed_dt {
            Some(dt) => dt,
            None => {
                let per_point = parallel::ordered_map(rule.len(), |k| {
                    point_max_wave_speed(model, domain, &points[k])
                });
                let smax = per_point.into_iter().fold(0.0, f64::max);
                config.cfl * domain.min_char_length() / smax
            }
        };
        if let TimeControl::EndTime(te) = config.time {
            dt = dt.min(te - t);
        }
        let ratio = domain.min_char_length() / dt;
        let stepped = parallel::ordered_map(rule.len(), |k| {
            point_step(model, domain, rule.point(k), &points[k], dt, ratio, step)
        });
        let mut failures = Vec::new();
        let mut next = Vec::with_capacity(rule.len());
        for (k, r) in stepped.into_iter().enumerate() {
            match r {
                Ok(ps) => next.push(ps),
                Err(f) => failures.push((k, f)),
            }
        }
        if !failures.is_empty() {
            return Err(ScError::PointFailures(failures));
        }
        let residual = (0..rule.len())
            .map(|k| point_residual(domain, &points[k], &next[k], config.steady_component))
            .fold(0.0, f64::max);
        points = next;
        t += dt;
        step += 1;

        if let Some(reference) = reference {
            let moments = assemble_moments(&points, rule, &tab, n_cells, m);
            let e = moments.component_expectation(error_component);
            let v = moments.component_variance(error_component);
            let e_ref = reference.component_expectation(error_component);
            let v_ref = reference.component_variance(error_component);
            let rel_e = relative_l2_error(geometry, &e, &e_ref, mask).unwrap_or(f64::NAN);
            let rel_var = relative_l2_error(geometry, &v, &v_ref, mask).unwrap_or(f64::NAN);
            error_series.push(ScErrorRecord {
                step,
                time: t,
                wall_seconds: started.elapsed().as_secs_f64(),
                rel_e_error: rel_e,
                rel_var_error: rel_var,
            });
        }

        if let TimeControl::Steady { epsilon, max_steps } = config.time {
            if residual <= epsilon {
                break;
            }
            if step >= max_steps {
                let failures = vec![(
                    0,
                    PointFailure::SteadyNonConvergence { steps: step, last_residual: residual },
                )];
                return Err(ScError::PointFailures(failures));
            }
        }
    }
    let moments = assemble_moments(&points, rule, &tab, n_cells, m);
    Ok(ScOutput {
        moments,
        per_point_steps: vec![step; rule.len()],
        steps: step,
        final_time: t,
        error_series,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Mesh1D;
    use crate::models::BurgersModel;
    use crate::random_space::gauss_legendre_1d;
    use crate::solver::BoundaryCondition;
    use std::sync::Arc;

    fn burgers_setup(n_cells: usize) -> (BurgersModel, Mesh1D) {
        (BurgersModel::new(), Mesh1D::new(0.0, 1.0, n_cells))
    }

    #[test]
    fn polynomial_ic_projects_exactly_with_zero_steps() {
        // With no time steps, SC moments are the quadrature projection of
        // the initial condition; for a degree-2 polynomial in ξ and an
        // exact rule they match the analytic coefficients.
        let (model, mesh) = burgers_setup(4);
        let domain = Domain::line(&mesh, BoundaryCondition::Outflow, BoundaryCondition::Outflow);
        let basis = BasisSet::total_degree(2, 1);
        let rule = gauss_legendre_1d(4);
        // u_IC = φ₂(ξ) + 2φ₀.
        let ic: StochasticFn = Arc::new(|_x, xi, out| {
            let x = xi[0];
            let phi2 = (5.0f64).sqrt() * 0.5 * (3.0 * x * x - 1.0);
            out[0] = 2.0 + phi2;
        });
        let config = ScConfig::new(TimeControl::FixedSteps(0));
        let out = run_sc(
            &model,
            &domain,
            &mesh,
            &ic,
            &rule,
            &basis,
            &config,
            ScMode::Blackbox,
            None,
            0,
            None,
        )
        .unwrap();
        for j in 0..4 {
            let u = &out.moments.cells[j];
            assert!((u[(0, 0)] - 2.0).abs() < 1e-13);
            assert!(u[(1, 0)].abs() < 1e-13);
            assert!((u[(2, 0)] - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn xi_independent_problem_has_zero_variance() {
        let (model, mesh) = burgers_setup(16);
        let domain = Domain::line(&mesh, BoundaryCondition::Outflow, BoundaryCondition::Outflow);
        let basis = BasisSet::total_degree(3, 1);
        let rule = gauss_legendre_1d(8);
        let ic: StochasticFn =
            Arc::new(|x, _xi, out| out[0] = if x[0] < 0.4 { 1.0 } else { 0.2 });
        let config = ScConfig::new(TimeControl::EndTime(0.2));
        let out = run_sc(
            &model, &domain, &mesh, &ic, &rule, &basis, &config, ScMode::Blackbox, None, 0, None,
        )
        .unwrap();
        for j in 0..16 {
            assert!(out.moments.variance(j)[0] < 1e-14);
        }
    }

    #[test]
    fn blackbox_and_coupled_agree_on_fixed_dt() {
        let (model, mesh) = burgers_setup(32);
        let domain = Domain::line(&mesh, BoundaryCondition::Outflow, BoundaryCondition::Outflow);
        let basis = BasisSet::total_degree(3, 1);
        let rule = gauss_legendre_1d(6);
        let ic: StochasticFn =
            Arc::new(|x, xi, out| out[0] = if x[0] < 0.4 + 0.05 * xi[0] { 1.0 } else { 0.2 });
        let mut config = ScConfig::new(TimeControl::FixedSteps(40));
        config.fixed_dt = Some(0.005);
        let bb = run_sc(
            &model, &domain, &mesh, &ic, &rule, &basis, &config, ScMode::Blackbox, None, 0, None,
        )
        .unwrap();
        let cp = run_sc(
            &model, &domain, &mesh, &ic, &rule, &basis, &config, ScMode::Coupled, None, 0, None,
        )
        .unwrap();
        for j in 0..32 {
            let d = (&bb.moments.cells[j] - &cp.moments.cells[j]).abs().max();
            assert!(d < 1e-12, "cell {j} differs by {d}");
        }
    }

    #[test]
    fn coupled_error_series_is_deterministic_and_zero_against_self() {
        let (model, mesh) = burgers_setup(24);
        let domain = Domain::line(&mesh, BoundaryCondition::Outflow, BoundaryCondition::Outflow);
        let basis = BasisSet::total_degree(2, 1);
        let rule = gauss_legendre_1d(5);
        let ic: StochasticFn =
            Arc::new(|x, xi, out| out[0] = if x[0] < 0.4 + 0.05 * xi[0] { 1.0 } else { 0.2 });
        let config = ScConfig::new(TimeControl::FixedSteps(20));
        let run = |workers: usize| {
            let mut c = config.clone();
            c.workers = workers;
            run_sc(
                &model, &domain, &mesh, &ic, &rule, &basis, &c, ScMode::Coupled, None, 0, None,
            )
            .unwrap()
        };
        let a = run(1);
        let b = run(4);
        for j in 0..24 {
            for i in 0..a.moments.cells[j].nrows() {
                assert_eq!(
                    a.moments.cells[j][(i, 0)].to_bits(),
                    b.moments.cells[j][(i, 0)].to_bits()
                );
            }
        }
        // Error against the final state of an identical run: zero at the end.
        let reference = a.moments;
        let with_ref = {
            let c = config.clone();
            run_sc(
                &model,
                &domain,
                &mesh,
                &ic,
                &rule,
                &basis,
                &c,
                ScMode::Coupled,
                Some(&reference),
                0,
                None,
            )
            .unwrap()
        };
        let last = with_ref.error_series.last().unwrap();
        assert!(last.rel_e_error < 1e-13);
        assert!(last.rel_var_error < 1e-12);
    }
}
