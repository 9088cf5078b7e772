//! Moment-system solvers: kinetic-flux finite-volume updates driven by
//! either fully converged dual solves (classical entropy-closure iteration)
//! or a single dual Newton step per pseudo-time step (one-shot), with
//! optional per-cell adaptive refinement of the moment order and
//! residual-gated refinement retardation for steady problems.
//!
//! One driver runs every variant: stochastic-Galerkin is the quadratic
//! closure, non-adaptive runs use a single-level ladder, and the one-shot
//! scheme differs only in the dual phase. Parallel phases follow a fixed
//! reduction order, so results are bit-identical for any worker count.

mod diagnostics;
mod discretization;
mod domain;
mod fields;
mod pipeline;
mod projection;

pub use diagnostics::{one_shot_jacobian, OneShotJacobianReport};
pub use discretization::{LevelSpec, StochasticLadder};
pub use domain::{BoundaryCondition, Domain, Neighbor, StochasticFn};
pub use fields::{DualField, MomentField, ResidualMode};
pub use pipeline::{
    interface_ratio, run, AdaptivityConfig, DualUpdate, MomentProblem, RetardationSchedule,
    RunOutput, SolverConfig, StepRecord, TimeControl,
};
pub use projection::project_initial;

use crate::closure::{ClosureError, DualSolveReport};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("dual solve failed in cell {cell} at step {step}: {source}")]
    Dual {
        cell: usize,
        step: usize,
        #[source]
        source: ClosureError,
    },
    #[error("inadmissible reconstruction in cell {cell} at quadrature point {point}, step {step}")]
    InadmissibleReconstruction { cell: usize, point: usize, step: usize },
    #[error("cell-mean state of cell {cell} inadmissible after step {step}")]
    InadmissibleMean { cell: usize, step: usize },
    #[error(
        "steady iteration did not reach residual {epsilon:.3e} in {steps} steps (last residual {last_residual:.3e})"
    )]
    SteadyNonConvergence { steps: usize, epsilon: f64, last_residual: f64, residuals: Vec<f64> },
    #[error("initial condition inadmissible in cell {cell}")]
    InadmissibleInitial { cell: usize },
    #[error("diagnostic precondition violated: {0}")]
    Precondition(String),
}

impl SolverError {
    pub fn dual_report(&self) -> Option<&DualSolveReport> {
        match self {
            SolverError::Dual { source: ClosureError::NonConvergence { report, .. }, .. } => {
                Some(report)
            }
            _ => None,
        }
    }
}
