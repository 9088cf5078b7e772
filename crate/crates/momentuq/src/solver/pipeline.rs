//! The pseudo-time driver shared by every intrusive variant.
//!
//! One step runs four phases:
//!
//! 1. **Dual phase** — per cell, either converge the dual Newton iteration
//!    (classical scheme, warm-started from the previous duals) or apply a
//!    single Newton step (one-shot scheme).
//! 2. **Level phase** — with adaptivity, move each cell's refinement level
//!    by at most one according to the smoothness indicator, capped by the
//!    retardation schedule's current maximal level.
//! 3. **Time-step phase** — a global Δt from the CFL number, the smallest
//!    cell length and the largest wave speed over all cells and quadrature
//!    points.
//! 4. **Update phase** — the kinetic-flux finite-volume update, evaluated
//!    quadrature-point-major: for each point of the target level's rule,
//!    reconstruct the stencil (coarser neighbors are simply evaluated at
//!    the finer points), combine physical value and edge fluxes, and
//!    accumulate moments against the target basis in fixed-size blocks so
//!    that the reduction order is independent of the worker count.
//!
//! Cell dual solves run concurrently over cells; the quadrature reduction
//! is partitioned by point index. All combining is done in a fixed order,
//! making every run bit-reproducible for 1, 2 or 8 workers.

use nalgebra::DMatrix;

use crate::closure::{dual_step, solve_dual, DualContext, DualSettings, EntropyClosure};
use crate::mesh::{ghost_state, BoundaryKind};
use crate::models::ModelProblem;
use crate::parallel;

use super::discretization::StochasticLadder;
use super::domain::{BoundaryCondition, Domain, Neighbor, StochasticFn};
use super::fields::{resize_rows, DualField, MomentField, ResidualMode};
use super::projection::project_initial;
use super::SolverError;

/// Dual treatment per pseudo-time step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DualUpdate {
    /// Fully converge the dual problem in every cell (classical scheme).
    Converge,
    /// Exactly one Newton step per cell per pseudo-time step (one-shot).
    SingleStep,
}

#[derive(Debug, Clone, Copy)]
pub enum TimeControl {
    FixedSteps(usize),
    EndTime(f64),
    Steady { epsilon: f64, max_steps: usize },
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// CFL number in (0, 1].
    pub cfl: f64,
    pub dual: DualSettings,
    pub residual_mode: ResidualMode,
    pub time: TimeControl,
    pub workers: usize,
}

impl SolverConfig {
    pub fn new(time: TimeControl) -> Self {
        Self {
            cfl: 0.5,
            dual: DualSettings::default(),
            residual_mode: ResidualMode::AllMoments,
            time,
            workers: 1,
        }
    }
}

/// Residual-gated schedule of maximal refinement levels: the cap
/// `stages[s].1` applies until the residual first drops below
/// `stages[s].0`; after the last stage the full ladder is allowed.
#[derive(Debug, Clone)]
pub struct RetardationSchedule {
    pub stages: Vec<(f64, usize)>,
}

impl RetardationSchedule {
    pub fn new(stages: Vec<(f64, usize)>) -> Self {
        for w in stages.windows(2) {
            assert!(w[0].0 > w[1].0, "thresholds must decrease");
            assert!(w[0].1 <= w[1].1, "maximal levels must not decrease");
        }
        Self { stages }
    }
}

#[derive(Debug, Clone)]
pub struct AdaptivityConfig {
    /// Decrease the level when the indicator falls below this.
    pub delta_dec: f64,
    /// Increase the level when the indicator exceeds this.
    pub delta_inc: f64,
    /// Level every cell starts at.
    pub initial_level: usize,
    pub retardation: Option<RetardationSchedule>,
}

impl AdaptivityConfig {
    pub fn new(delta_dec: f64, delta_inc: f64) -> Self {
        assert!(delta_dec <= delta_inc, "δ_dec must not exceed δ_inc");
        Self { delta_dec, delta_inc, initial_level: 0, retardation: None }
    }
}

/// The moment system of one conservation law over one spatial domain.
pub struct MomentProblem<'a> {
    pub model: &'a dyn ModelProblem,
    pub closure: &'a dyn EntropyClosure,
    pub ladder: &'a StochasticLadder,
    pub domain: &'a Domain,
    pub initial: StochasticFn,
}

/// Per-step observer data.
pub struct StepRecord<'a> {
    pub step: usize,
    pub time: f64,
    pub dt: f64,
    pub residual: f64,
    /// Newton iterations spent in the dual phase of this step.
    pub newton_steps: usize,
    pub moments: &'a MomentField,
    pub duals: &'a DualField,
    pub levels: &'a [usize],
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub moments: MomentField,
    pub duals: DualField,
    pub levels: Vec<usize>,
    pub residuals: Vec<f64>,
    /// Total dual Newton iterations over the whole run.
    pub newton_steps: usize,
    pub steps: usize,
    pub final_time: f64,
    /// Δt of the last completed step (the settled step size for steady runs).
    pub final_dt: f64,
}

/// Global Lax-Friedrichs dissipation ratio for a step: smallest cell
/// length over Δt.
pub fn interface_ratio(domain: &Domain, dt: f64) -> f64 {
    domain.min_char_length() / dt
}

/// Run the moment solver.
///
/// Non-adaptive runs must use a single-level ladder; adaptive runs walk
/// the ladder per cell. `observer` sees every completed step.
pub fn run(
    problem: &MomentProblem,
    config: &SolverConfig,
    variant: DualUpdate,
    adaptivity: Option<&AdaptivityConfig>,
    mut observer: Option<&mut (dyn FnMut(&StepRecord) + Send)>,
) -> Result<RunOutput, SolverError> {
    let pool = parallel::WorkerPool::new(config.workers);
    pool.install(|| run_inner(problem, config, variant, adaptivity, &mut observer))
}

fn run_inner(
    problem: &MomentProblem,
    config: &SolverConfig,
    variant: DualUpdate,
    adaptivity: Option<&AdaptivityConfig>,
    observer: &mut Option<&mut (dyn FnMut(&StepRecord) + Send)>,
) -> Result<RunOutput, SolverError> {
    assert!(config.cfl > 0.0 && config.cfl <= 1.0, "CFL must lie in (0, 1]");
    if adaptivity.is_none() {
        assert_eq!(
            problem.ladder.n_levels(),
            1,
            "non-adaptive runs take a single-level ladder"
        );
    }
    let n_cells = problem.domain.n_cells();
    let m = problem.closure.num_conserved();
    let initial_level = adaptivity.map_or(0, |a| a.initial_level);
    assert!(initial_level < problem.ladder.n_levels());

    let mut levels = vec![initial_level; n_cells];
    let mut moments =
        project_initial(&problem.initial, problem.domain, problem.ladder, &levels, m);
    for j in 0..n_cells {
        if !problem.model.admissible(&moments.expectation(j)) {
            return Err(SolverError::InadmissibleInitial { cell: j });
        }
    }
    let mut duals = DualField {
        cells: (0..n_cells)
            .map(|j| {
                initial_dual(problem.closure, &moments.cells[j])
                    .ok_or(SolverError::InadmissibleInitial { cell: j })
            })
            .collect::<Result<_, _>>()?,
    };

    let mut residuals: Vec<f64> = Vec::new();
    let mut newton_total = 0usize;
    let mut retard_stage = 0usize;
    let mut t = 0.0;
    let mut step = 0usize;
    let mut last_dt = f64::NAN;

    loop {
        match config.time {
            TimeControl::FixedSteps(n) if step >= n => break,
            TimeControl::EndTime(te) if t >= te * (1.0 - 1e-14) => break,
            _ => {}
        }

        // Phase 1: dual updates.
        let (new_duals, newton_this_step) =
            dual_phase(problem, &moments, &duals, &levels, &config.dual, variant, step)?;
        duals = DualField { cells: new_duals };
        newton_total += newton_this_step;

        // Phase 2: refinement levels for the updated moments.
        let cap = adaptivity
            .and_then(|a| a.retardation.as_ref())
            .map_or(problem.ladder.top(), |r| {
                r.stages.get(retard_stage).map_or(problem.ladder.top(), |s| s.1)
            })
            .min(problem.ladder.top());
        let new_levels = match adaptivity {
            Some(a) => adapt_levels(
                &moments,
                &levels,
                problem.ladder,
                a.delta_dec,
                a.delta_inc,
                cap,
            ),
            None => levels.clone(),
        };

        // Phase 3: global time step.
        let smax = wave_speed_phase(problem, &duals, &levels, step)?;
        let mut dt = config.cfl * problem.domain.min_char_length() / smax;
        if let TimeControl::EndTime(te) = config.time {
            dt = dt.min(te - t);
        }
        let ratio = interface_ratio(problem.domain, dt);

        // Phase 4: kinetic moment update.
        let new_moments =
            update_phase(problem, &duals, &levels, &new_levels, dt, ratio, step)?;
        for j in 0..n_cells {
            if !problem.model.admissible(&new_moments.expectation(j)) {
                return Err(SolverError::InadmissibleMean { cell: j, step });
            }
        }

        let residual = new_moments.weighted_residual(
            &moments,
            measures(problem.domain),
            config.residual_mode,
        );
        residuals.push(residual);

        // Resize duals onto the new levels for the next warm start.
        for j in 0..n_cells {
            if new_levels[j] != levels[j] {
                let rows = problem.ladder.basis(new_levels[j]).len();
                duals.cells[j] = resize_rows(&duals.cells[j], rows);
            }
        }
        moments = new_moments;
        levels = new_levels;
        t += dt;
        last_dt = dt;
        step += 1;

        if let Some(obs) = observer.as_mut() {
            obs(&StepRecord {
                step,
                time: t,
                dt,
                residual,
                newton_steps: newton_this_step,
                moments: &moments,
                duals: &duals,
                levels: &levels,
            });
        }

        if let Some(r) = adaptivity.and_then(|a| a.retardation.as_ref()) {
            while retard_stage < r.stages.len() && residual <= r.stages[retard_stage].0 {
                retard_stage += 1;
            }
        }

        if let TimeControl::Steady { epsilon, max_steps } = config.time {
            if residual <= epsilon {
                break;
            }
            if step >= max_steps {
                let last = residual;
                return Err(SolverError::SteadyNonConvergence {
                    steps: step,
                    epsilon,
                    last_residual: last,
                    residuals,
                });
            }
        }
    }

    Ok(RunOutput {
        moments,
        duals,
        levels,
        residuals,
        newton_steps: newton_total,
        steps: step,
        final_time: t,
        final_dt: last_dt,
    })
}

fn measures(domain: &Domain) -> &[f64] {
    // Exposed through a helper so the residual weights match the update.
    domain.measures()
}

/// Warm-start duals for a cell with no history: the quadratic closure
/// starts at û itself (its dual problem is solved by the moments), other
/// closures at ∇s of the cell mean in the constant row.
pub(crate) fn initial_dual(
    closure: &dyn EntropyClosure,
    uhat: &DMatrix<f64>,
) -> Option<DMatrix<f64>> {
    let m = closure.num_conserved();
    if closure.is_galerkin() {
        return Some(uhat.clone());
    }
    let mean: Vec<f64> = (0..m).map(|a| uhat[(0, a)]).collect();
    if !closure.state_admissible(&mean) {
        return None;
    }
    let mut grad = vec![0.0; m];
    closure.entropy_gradient(&mean, &mut grad);
    let mut out = DMatrix::zeros(uhat.nrows(), m);
    for a in 0..m {
        out[(0, a)] = grad[a];
    }
    Some(out)
}

pub(crate) fn dual_phase(
    problem: &MomentProblem,
    moments: &MomentField,
    duals: &DualField,
    levels: &[usize],
    settings: &DualSettings,
    variant: DualUpdate,
    step: usize,
) -> Result<(Vec<DMatrix<f64>>, usize), SolverError> {
    let results = parallel::ordered_try_map(problem.domain.n_cells(), |j| {
        let l = levels[j];
        let ctx = DualContext {
            closure: problem.closure,
            tab: problem.ladder.tab(l, l),
            rule: problem.ladder.rule(l),
        };
        match variant {
            DualUpdate::Converge => {
                solve_dual(ctx, &moments.cells[j], &duals.cells[j], settings)
                    .map(|(lam, report)| (lam, report.iterations))
                    .map_err(|source| SolverError::Dual { cell: j, step, source })
            }
            DualUpdate::SingleStep => dual_step(ctx, &duals.cells[j], &moments.cells[j], settings)
                .map(|lam| (lam, 1))
                .map_err(|source| SolverError::Dual { cell: j, step, source }),
        }
    })?;
    let mut newton = 0;
    let mut cells = Vec::with_capacity(results.len());
    for (lam, its) in results {
        newton += its;
        cells.push(lam);
    }
    Ok((cells, newton))
}

/// Largest wave speed over all cells, their quadrature points and edge
/// normals, evaluated on the current duals.
pub(crate) fn wave_speed_phase(
    problem: &MomentProblem,
    duals: &DualField,
    levels: &[usize],
    step: usize,
) -> Result<f64, SolverError> {
    let per_cell = parallel::ordered_try_map(problem.domain.n_cells(), |j| {
        let l = levels[j];
        let tab = problem.ladder.tab(l, l);
        let rule = problem.ladder.rule(l);
        let m = problem.closure.num_conserved();
        let mut lam_pt = vec![0.0; m];
        let mut state = vec![0.0; m];
        let mut smax = 0.0f64;
        for k in 0..rule.len() {
            eval_dual(tab, &duals.cells[j], k, &mut lam_pt);
            if !problem.closure.ansatz(&lam_pt, &mut state) {
                return Err(SolverError::InadmissibleReconstruction { cell: j, point: k, step });
            }
            for &(e, _) in problem.domain.cell_edges(j) {
                let n = problem.domain.edges()[e].normal;
                smax = smax.max(problem.model.max_wave_speed(&state, &n));
            }
        }
        Ok(smax)
    })?;
    Ok(per_cell.into_iter().fold(0.0, f64::max))
}

/// Kinetic-flux update of every cell onto its target level.
pub(crate) fn update_phase(
    problem: &MomentProblem,
    duals: &DualField,
    levels_old: &[usize],
    levels_new: &[usize],
    dt: f64,
    ratio: f64,
    step: usize,
) -> Result<MomentField, SolverError> {
    let cells = parallel::ordered_try_map(problem.domain.n_cells(), |j| {
        update_cell(problem, duals, levels_old, levels_new[j], j, dt, ratio, step)
    })?;
    Ok(MomentField { cells })
}

#[allow(clippy::too_many_arguments)]
fn update_cell(
    problem: &MomentProblem,
    duals: &DualField,
    levels_old: &[usize],
    target_level: usize,
    j: usize,
    dt: f64,
    ratio: f64,
    step: usize,
) -> Result<DMatrix<f64>, SolverError> {
    let ladder = problem.ladder;
    let domain = problem.domain;
    let model = problem.model;
    let closure = problem.closure;
    let m = closure.num_conserved();
    let rule = ladder.rule(target_level);
    let basis_tab = ladder.tab(target_level, target_level);
    let n_t = ladder.basis(target_level).len();
    let q = rule.len();
    let inv_measure = dt / domain.measure(j);

    let blocks = q.div_ceil(parallel::QUAD_BLOCK);
    let partials = parallel::ordered_map(blocks, |b| -> Result<DMatrix<f64>, SolverError> {
        let range = b * parallel::QUAD_BLOCK..((b + 1) * parallel::QUAD_BLOCK).min(q);
        let mut part = DMatrix::zeros(n_t, m);
        let mut lam_pt = vec![0.0; m];
        let mut u_own = vec![0.0; m];
        let mut u_in = vec![0.0; m];
        let mut u_out = vec![0.0; m];
        let mut g = vec![0.0; m];
        let mut flux = vec![0.0; m];
        for k in range {
            let reconstruct =
                |cell: usize, lam_pt: &mut [f64], out: &mut [f64]| -> Result<(), SolverError> {
                    let tab = ladder.tab(target_level, levels_old[cell]);
                    eval_dual(tab, &duals.cells[cell], k, lam_pt);
                    if !closure.ansatz(lam_pt, out) {
                        return Err(SolverError::InadmissibleReconstruction {
                            cell,
                            point: k,
                            step,
                        });
                    }
                    Ok(())
                };
            reconstruct(j, &mut lam_pt, &mut u_own)?;
            flux.fill(0.0);
            for &(e, sign) in domain.cell_edges(j) {
                let edge = &domain.edges()[e];
                reconstruct(edge.left, &mut lam_pt, &mut u_in)?;
                match edge.right {
                    Neighbor::Cell(c) => reconstruct(c, &mut lam_pt, &mut u_out)?,
                    Neighbor::Boundary(b) => match domain.boundary_condition(b) {
                        BoundaryCondition::Outflow => u_out.copy_from_slice(&u_in),
                        BoundaryCondition::SlipWall => {
                            ghost_state(&u_in, BoundaryKind::SlipWall, &edge.normal, &[], &mut u_out)
                        }
                        BoundaryCondition::Dirichlet(f) => {
                            f(&edge.midpoint, rule.point(k), &mut u_out)
                        }
                        BoundaryCondition::Periodic => unreachable!("wrap edges are interior"),
                    },
                }
                model
                    .numerical_flux(&u_in, &u_out, &edge.normal, ratio, &mut g)
                    .map_err(|_| SolverError::InadmissibleReconstruction {
                        cell: j,
                        point: k,
                        step,
                    })?;
                let scale = sign * edge.length;
                for (acc, gg) in flux.iter_mut().zip(&g) {
                    *acc += scale * gg;
                }
            }
            let wf = rule.weight(k) * rule.density(k);
            for a in 0..m {
                let val = wf * (u_own[a] - inv_measure * flux[a]);
                for i in 0..n_t {
                    part[(i, a)] += val * basis_tab[(k, i)];
                }
            }
        }
        Ok(part)
    });
    let mut total = DMatrix::zeros(n_t, m);
    for p in partials {
        total += p?;
    }
    Ok(total)
}

#[inline]
fn eval_dual(tab: &DMatrix<f64>, lam: &DMatrix<f64>, k: usize, out: &mut [f64]) {
    for (a, slot) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for i in 0..lam.nrows() {
            acc += tab[(k, i)] * lam[(i, a)];
        }
        *slot = acc;
    }
}

/// Parseval smoothness indicator of a cell at ladder level `level`: the
/// first conserved component's energy in the top degree band over its
/// total energy, S = Σ_{band} û_{i,0}² / Σ û_{i,0}², with S = 0 for a
/// zero field.
pub fn smoothness_indicator(uhat: &DMatrix<f64>, ladder: &StochasticLadder, level: usize) -> f64 {
    let prefix = ladder.prefix_len(level);
    let den: f64 = (0..uhat.nrows()).map(|i| uhat[(i, 0)] * uhat[(i, 0)]).sum();
    if den == 0.0 {
        return 0.0;
    }
    let num: f64 = (prefix..uhat.nrows()).map(|i| uhat[(i, 0)] * uhat[(i, 0)]).sum();
    num / den
}

/// One-level moves per cell: decrease below δ_dec, increase above δ_inc,
/// clamped to [0, cap].
pub fn adapt_levels(
    moments: &MomentField,
    levels: &[usize],
    ladder: &StochasticLadder,
    delta_dec: f64,
    delta_inc: f64,
    cap: usize,
) -> Vec<usize> {
    levels
        .iter()
        .enumerate()
        .map(|(j, &l)| {
            let s = smoothness_indicator(&moments.cells[j], ladder, l);
            if s < delta_dec {
                l.saturating_sub(1)
            } else if s > delta_inc {
                (l + 1).min(cap)
            } else {
                l.min(cap)
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closure::QuadraticClosure;
    use crate::mesh::Mesh1D;
    use crate::models::BurgersModel;
    use crate::random_space::{gauss_legendre_1d, BasisSet};
    use crate::solver::discretization::LevelSpec;
    use crate::solver::domain::BoundaryCondition;
    use std::sync::Arc;

    fn two_level_ladder() -> StochasticLadder {
        StochasticLadder::new(vec![
            LevelSpec {
                basis: BasisSet::total_degree(2, 1),
                rule: crate::random_space::clenshaw_curtis_1d(2),
            },
            LevelSpec {
                basis: BasisSet::total_degree(4, 1),
                rule: crate::random_space::clenshaw_curtis_1d(3),
            },
        ])
    }

    #[test]
    fn indicator_examples() {
        let ladder = two_level_ladder();
        // Level 1 has N = 5 rows, prefix (level 0) N = 3.
        let mut u = DMatrix::zeros(5, 1);
        u[(0, 0)] = 1.0;
        u[(2, 0)] = 0.5;
        assert_eq!(smoothness_indicator(&u, &ladder, 1), 0.0);
        // Only the top band: S = 1.
        let mut top = DMatrix::zeros(5, 1);
        top[(4, 0)] = 0.3;
        assert_eq!(smoothness_indicator(&top, &ladder, 1), 1.0);
        // û₀ = 2, û_top = 1: S = 1/5.
        let mut mixed = DMatrix::zeros(5, 1);
        mixed[(0, 0)] = 2.0;
        mixed[(4, 0)] = 1.0;
        assert!((smoothness_indicator(&mixed, &ladder, 1) - 0.2).abs() < 1e-15);
        // Flat zero field: S = 0 by definition.
        assert_eq!(smoothness_indicator(&DMatrix::zeros(5, 1), &ladder, 1), 0.0);
    }

    #[test]
    fn indicator_at_coarsest_level_uses_its_top_degree_band() {
        let ladder = two_level_ladder();
        // Level 0: M = 2, prefix = degree ≤ 1 (2 entries).
        let mut u = DMatrix::zeros(3, 1);
        u[(0, 0)] = 1.0;
        assert_eq!(smoothness_indicator(&u, &ladder, 0), 0.0);
        u[(2, 0)] = 1.0;
        assert!((smoothness_indicator(&u, &ladder, 0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn adapt_moves_one_level_with_clamping() {
        let ladder = two_level_ladder();
        let smooth = MomentField {
            cells: vec![
                {
                    let mut u = DMatrix::zeros(3, 1);
                    u[(0, 0)] = 1.0;
                    u
                },
                {
                    let mut u = DMatrix::zeros(5, 1);
                    u[(0, 0)] = 1.0;
                    u
                },
            ],
        };
        // S = 0 everywhere: decrease with floor at 0.
        assert_eq!(adapt_levels(&smooth, &[0, 1], &ladder, 1e-3, 1e-2, 1), vec![0, 0]);
        let rough = MomentField {
            cells: vec![
                {
                    let mut u = DMatrix::zeros(3, 1);
                    u[(2, 0)] = 1.0;
                    u
                },
                {
                    let mut u = DMatrix::zeros(5, 1);
                    u[(4, 0)] = 1.0;
                    u
                },
            ],
        };
        // S = 1 everywhere: increase with cap at the top.
        assert_eq!(adapt_levels(&rough, &[0, 1], &ladder, 1e-3, 1e-2, 1), vec![1, 1]);
        // Dead band keeps levels: pick moments with S = 0.2 ∈ [0.1, 0.5].
        let mid = MomentField {
            cells: vec![{
                let mut u = DMatrix::zeros(3, 1);
                u[(0, 0)] = 2.0;
                u[(2, 0)] = 1.0;
                u
            }],
        };
        assert_eq!(adapt_levels(&mid, &[0], &ladder, 0.1, 0.5, 1), vec![0]);
    }

    #[test]
    fn constant_duals_give_zero_net_flux() {
        // A spatially constant field update reduces to û' = ⟨u_s(λᵀφ)φᵀ⟩ᵀ.
        let model = BurgersModel::new();
        let closure = QuadraticClosure::new(1);
        let basis = BasisSet::total_degree(3, 1);
        let rule = gauss_legendre_1d(6);
        let ladder = StochasticLadder::single(basis, rule);
        let mesh = Mesh1D::new(0.0, 1.0, 6);
        let domain =
            Domain::line(&mesh, BoundaryCondition::Outflow, BoundaryCondition::Outflow);
        let problem = MomentProblem {
            model: &model,
            closure: &closure,
            ladder: &ladder,
            domain: &domain,
            initial: Arc::new(|_x, _xi, out: &mut [f64]| out[0] = 0.0),
        };
        let lam = DMatrix::from_column_slice(4, 1, &[0.8, 0.1, -0.05, 0.02]);
        let duals = DualField { cells: vec![lam.clone(); 6] };
        let levels = vec![0usize; 6];
        let updated = update_phase(&problem, &duals, &levels, &levels, 0.01, 100.0, 0).unwrap();
        // Quadratic closure with an exact Gram: ⟨u_s(λᵀφ)φᵀ⟩ᵀ = λ.
        for j in 0..6 {
            assert!(
                (&updated.cells[j] - &lam).abs().max() < 1e-13,
                "cell {j} saw a net flux"
            );
        }
    }
}
