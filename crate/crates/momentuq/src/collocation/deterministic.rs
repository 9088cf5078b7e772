//! The deterministic finite-volume kernel driven once per quadrature
//! point. It shares the numerical flux, the domain topology and the
//! initial-condition projection with the intrusive solvers, so intrusive
//! and non-intrusive runs differ only in how they close the moments.

use crate::mesh::{ghost_state, BoundaryKind};
use crate::models::ModelProblem;
use crate::solver::{BoundaryCondition, Domain, Neighbor, StochasticFn, TimeControl};

/// Why a single collocation point's solve failed.
#[derive(Debug, Clone)]
pub enum PointFailure {
    NonFinite { cell: usize, step: usize },
    Inadmissible { cell: usize, step: usize },
    SteadyNonConvergence { steps: usize, last_residual: f64 },
}

impl std::fmt::Display for PointFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PointFailure::NonFinite { cell, step } => {
                write!(f, "non-finite state in cell {cell} at step {step}")
            }
            PointFailure::Inadmissible { cell, step } => {
                write!(f, "inadmissible state in cell {cell} at step {step}")
            }
            PointFailure::SteadyNonConvergence { steps, last_residual } => {
                write!(f, "no steady state after {steps} steps (residual {last_residual:.3e})")
            }
        }
    }
}

/// Cell states of one deterministic solve, flat row-major (cell-major).
pub struct PointState {
    pub states: Vec<f64>,
    pub m: usize,
}

impl PointState {
    pub fn cell(&self, j: usize) -> &[f64] {
        &self.states[j * self.m..(j + 1) * self.m]
    }
}

/// Project the initial condition for a fixed random point: the same
/// 3-point Gauss average across 1D cells and centroid value in 2D that
/// the moment projection uses.
pub fn project_point_initial(
    ic: &StochasticFn,
    domain: &Domain,
    xi: &[f64],
    m: usize,
) -> PointState {
    let gauss_x = [-0.5 * (0.6f64).sqrt(), 0.0, 0.5 * (0.6f64).sqrt()];
    let gauss_w = [5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0];
    let mut states = vec![0.0; domain.n_cells() * m];
    let mut state = vec![0.0; m];
    for j in 0..domain.n_cells() {
        let center = domain.center(j);
        let out = &mut states[j * m..(j + 1) * m];
        if domain.dim() == 1 {
            let h = domain.measure(j);
            for (gx, gw) in gauss_x.iter().zip(gauss_w) {
                ic(&[center[0] + gx * h, 0.0], xi, &mut state);
                for (acc, s) in out.iter_mut().zip(&state) {
                    *acc += gw * s;
                }
            }
        } else {
            ic(&center, xi, out);
        }
    }
    PointState { states, m }
}

/// Largest wave speed over cells and their edge normals.
pub fn point_max_wave_speed(model: &dyn ModelProblem, domain: &Domain, ps: &PointState) -> f64 {
    let mut smax = 0.0f64;
    for j in 0..domain.n_cells() {
        for &(e, _) in domain.cell_edges(j) {
            let n = domain.edges()[e].normal;
            smax = smax.max(model.max_wave_speed(ps.cell(j), &n));
        }
    }
    smax
}

/// One conservative update of all cells; `ratio` is the global
/// Lax-Friedrichs Δx/Δt of this step.
pub fn point_step(
    model: &dyn ModelProblem,
    domain: &Domain,
    xi: &[f64],
    ps: &PointState,
    dt: f64,
    ratio: f64,
    step: usize,
) -> Result<PointState, PointFailure> {
    let m = ps.m;
    let mut next = vec![0.0; ps.states.len()];
    let mut u_out = vec![0.0; m];
    let mut g = vec![0.0; m];
    let mut flux = vec![0.0; m];
    for j in 0..domain.n_cells() {
        flux.fill(0.0);
        for &(e, sign) in domain.cell_edges(j) {
            let edge = &domain.edges()[e];
            let u_in = ps.cell(edge.left);
            match edge.right {
                Neighbor::Cell(c) => u_out.copy_from_slice(ps.cell(c)),
                Neighbor::Boundary(b) => match domain.boundary_condition(b) {
                    BoundaryCondition::Outflow => u_out.copy_from_slice(u_in),
                    BoundaryCondition::SlipWall => {
                        ghost_state(u_in, BoundaryKind::SlipWall, &edge.normal, &[], &mut u_out)
                    }
                    BoundaryCondition::Dirichlet(f) => f(&edge.midpoint, xi, &mut u_out),
                    BoundaryCondition::Periodic => unreachable!("wrap edges are interior"),
                },
            }
            model
                .numerical_flux(u_in, &u_out, &edge.normal, ratio, &mut g)
                .map_err(|_| PointFailure::Inadmissible { cell: j, step })?;
            let scale = sign * edge.length;
            for (acc, gg) in flux.iter_mut().zip(&g) {
                *acc += scale * gg;
            }
        }
        let inv = dt / domain.measure(j);
        let out = &mut next[j * m..(j + 1) * m];
        for a in 0..m {
            out[a] = ps.cell(j)[a] - inv * flux[a];
        }
        if out.iter().any(|x| !x.is_finite()) {
            return Err(PointFailure::NonFinite { cell: j, step });
        }
        if !model.admissible(out) {
            return Err(PointFailure::Inadmissible { cell: j, step });
        }
    }
    Ok(PointState { states: next, m })
}

/// Measure-weighted 1-norm of the change of one component.
pub fn point_residual(domain: &Domain, old: &PointState, new: &PointState, component: usize) -> f64 {
    let mut acc = 0.0;
    for j in 0..domain.n_cells() {
        acc += domain.measure(j) * (new.cell(j)[component] - old.cell(j)[component]).abs();
    }
    acc
}

/// Full deterministic solve at one random point.
#[allow(clippy::too_many_arguments)]
pub fn solve_deterministic(
    model: &dyn ModelProblem,
    domain: &Domain,
    ic: &StochasticFn,
    xi: &[f64],
    time: TimeControl,
    cfl: f64,
    fixed_dt: Option<f64>,
    steady_component: usize,
) -> Result<(PointState, usize), PointFailure> {
    let m = model.num_conserved();
    let mut ps = project_point_initial(ic, domain, xi, m);
    let mut t = 0.0;
    let mut step = 0usize;
    loop {
        match time {
            TimeControl::FixedSteps(n) if step >= n => return Ok((ps, step)),
            TimeControl::EndTime(te) if t >= te * (1.0 - 1e-14) => return Ok((ps, step)),
            _ => {}
        }
        let mut dt = match fixed_dt {
            Some(dt) => dt,
            None => cfl * domain.min_char_length() / point_max_wave_speed(model, domain, &ps),
        };
        if let TimeControl::EndTime(te) = time {
            dt = dt.min(te - t);
        }
        let ratio = domain.min_char_length() / dt;
        let next = point_step(model, domain, xi, &ps, dt, ratio, step)?;
        let res = point_residual(domain, &ps, &next, steady_component);
        ps = next;
        t += dt;
        step += 1;
        if let TimeControl::Steady { epsilon, max_steps } = time {
            if res <= epsilon {
                return Ok((ps, step));
            }
            if step >= max_steps {
                return Err(PointFailure::SteadyNonConvergence { steps: step, last_residual: res });
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Mesh1D;
    use crate::models::{exact_riemann_burgers, BurgersModel};
    use std::sync::Arc;

    #[test]
    fn burgers_shock_matches_exact_solution() {
        let model = BurgersModel::new();
        let mesh = Mesh1D::new(0.0, 1.0, 400);
        let domain =
            Domain::line(&mesh, BoundaryCondition::Outflow, BoundaryCondition::Outflow);
        let ic: StochasticFn =
            Arc::new(|x, _xi, out| out[0] = if x[0] < 0.3 { 1.0 } else { 0.0 });
        let t_end = 0.4;
        let (ps, _) = solve_deterministic(
            &model,
            &domain,
            &ic,
            &[],
            TimeControl::EndTime(t_end),
            0.5,
            None,
            0,
        )
        .unwrap();
        // L¹ error against the exact shock at x = 0.3 + t/2.
        let mut err = 0.0;
        for j in 0..mesh.n_cells() {
            let x = mesh.cell_center(j);
            let exact = exact_riemann_burgers(1.0, 0.0, (x - 0.3) / t_end);
            err += mesh.dx() * (ps.cell(j)[0] - exact).abs();
        }
        assert!(err < 0.02, "L1 error {err}");
    }
}
