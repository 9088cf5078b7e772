//! Newton iteration for the dual problem of the entropy closure.
//!
//! For a moment matrix û ∈ R^{N×m} the dual variables solve
//! ∇_λ L(λ; û) = ⟨u_s(λᵀφ) φᵀ⟩_Q^T − û = 0 with Hessian
//! H(λ) = ⟨∇u_s(λᵀφ) ⊗ φφᵀ⟩_Q^T. The iteration function is
//!
//! d(λ, û) = λ − H(λ)^{-1} ∇_λ L(λ; û),
//!
//! optionally damped by halving the step until ‖∇L‖ decreases; a full step
//! is always taken when it already decreases the gradient norm. The
//! stopping criterion sums the Euclidean norms of the per-component
//! gradient columns.
//!
//! Hessian factorization failure is reported as
//! [`ClosureError::IllConditionedHessian`] carrying the quadrature rule's
//! identity; it is never masked by regularization, since a rule that cannot
//! keep H definite (sparse grids with negative weights, most prominently)
//! is a finding, not a nuisance.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use super::{ClosureError, EntropyClosure};
use crate::random_space::QuadratureRule;

/// Everything a dual solve needs besides the unknowns: the closure, the
/// basis tabulated at the rule's points (Q × N) and the rule itself.
#[derive(Clone, Copy)]
pub struct DualContext<'a> {
    pub closure: &'a dyn EntropyClosure,
    pub tab: &'a DMatrix<f64>,
    pub rule: &'a QuadratureRule,
}

impl<'a> DualContext<'a> {
    pub fn num_moments(&self) -> usize {
        self.tab.ncols()
    }

    pub fn num_conserved(&self) -> usize {
        self.closure.num_conserved()
    }
}

/// Norm combining the per-column gradient norms into the scalar tested
/// against τ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StoppingNorm {
    /// Σ_i ‖∇_{λ_i} L‖₂ over the m conserved-variable columns.
    #[default]
    SumColumnNorms,
    /// Frobenius norm of the full gradient matrix.
    Frobenius,
}

impl StoppingNorm {
    pub fn apply(&self, grad: &DMatrix<f64>) -> f64 {
        match self {
            StoppingNorm::SumColumnNorms => grad.column_iter().map(|c| c.norm()).sum(),
            StoppingNorm::Frobenius => grad.norm(),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct DualSettings {
    /// Tolerance τ of the stopping criterion.
    pub tau: f64,
    pub max_iterations: usize,
    pub max_halvings: usize,
    /// Halve steps that leave the admissible domain or increase ‖∇L‖.
    pub damping: bool,
    pub stopping: StoppingNorm,
}

impl Default for DualSettings {
    fn default() -> Self {
        Self {
            tau: 1e-7,
            max_iterations: 1000,
            max_halvings: 40,
            damping: true,
            stopping: StoppingNorm::SumColumnNorms,
        }
    }
}

impl DualSettings {
    pub fn with_tau(tau: f64) -> Self {
        Self { tau, ..Self::default() }
    }
}

/// Convergence record of one dual solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualSolveReport {
    /// Accepted Newton steps.
    pub iterations: usize,
    /// Stopping quantity at the final iterate.
    pub final_gradient_norm: f64,
    pub converged: bool,
}

/// u_s(λᵀφ(ξ_k)) for every point of the rule, as a Q × m matrix.
pub fn reconstruct_at_points(
    ctx: DualContext,
    lam: &DMatrix<f64>,
) -> Result<DMatrix<f64>, ClosureError> {
    let q = ctx.rule.len();
    let m = ctx.num_conserved();
    let n = lam.nrows();
    let mut out = DMatrix::zeros(q, m);
    let mut dual_pt = vec![0.0; m];
    let mut state = vec![0.0; m];
    for k in 0..q {
        eval_dual_at_point(ctx.tab, lam, k, n, &mut dual_pt);
        if !ctx.closure.ansatz(&dual_pt, &mut state) {
            return Err(ClosureError::InadmissibleDual { point: k });
        }
        for a in 0..m {
            out[(k, a)] = state[a];
        }
    }
    Ok(out)
}

/// ∇_λ L(λ; û) = ⟨u_s(λᵀφ) φᵀ⟩_Q^T − û ∈ R^{N×m}.
pub fn lagrangian_gradient(
    ctx: DualContext,
    lam: &DMatrix<f64>,
    uhat: &DMatrix<f64>,
) -> Result<DMatrix<f64>, ClosureError> {
    let n = lam.nrows();
    let m = ctx.num_conserved();
    let mut grad = DMatrix::zeros(n, m);
    let mut dual_pt = vec![0.0; m];
    let mut state = vec![0.0; m];
    for k in 0..ctx.rule.len() {
        eval_dual_at_point(ctx.tab, lam, k, n, &mut dual_pt);
        if !ctx.closure.ansatz(&dual_pt, &mut state) {
            return Err(ClosureError::InadmissibleDual { point: k });
        }
        let wf = ctx.rule.weight(k) * ctx.rule.density(k);
        for a in 0..m {
            let ws = wf * state[a];
            for i in 0..n {
                grad[(i, a)] += ws * ctx.tab[(k, i)];
            }
        }
    }
    grad -= uhat;
    Ok(grad)
}

/// H(λ) = ⟨∇u_s(λᵀφ) ⊗ φφᵀ⟩_Q^T as an (N·m) × (N·m) matrix in
/// component-major layout: unknown (i, a) sits at index a·N + i, so the
/// quadratic closure yields m identical ⟨φφᵀ⟩ diagonal blocks.
pub fn hessian(ctx: DualContext, lam: &DMatrix<f64>) -> Result<DMatrix<f64>, ClosureError> {
    let n = lam.nrows();
    let m = ctx.num_conserved();
    let mut h = DMatrix::zeros(n * m, n * m);
    let mut dual_pt = vec![0.0; m];
    let mut jac = vec![0.0; m * m];
    for k in 0..ctx.rule.len() {
        eval_dual_at_point(ctx.tab, lam, k, n, &mut dual_pt);
        if !ctx.closure.ansatz_jacobian(&dual_pt, &mut jac) {
            return Err(ClosureError::InadmissibleDual { point: k });
        }
        let wf = ctx.rule.weight(k) * ctx.rule.density(k);
        for b in 0..m {
            for a in 0..m {
                let jab = wf * jac[a + m * b];
                if jab == 0.0 {
                    continue;
                }
                for j in 0..n {
                    let pj = jab * ctx.tab[(k, j)];
                    for i in 0..n {
                        h[(a * n + i, b * n + j)] += pj * ctx.tab[(k, i)];
                    }
                }
            }
        }
    }
    Ok(h)
}

/// One Newton step d(λ, û); damping per the settings.
pub fn dual_step(
    ctx: DualContext,
    lam: &DMatrix<f64>,
    uhat: &DMatrix<f64>,
    settings: &DualSettings,
) -> Result<DMatrix<f64>, ClosureError> {
    let grad = lagrangian_gradient(ctx, lam, uhat)?;
    let (next, _) = dual_step_from_gradient(ctx, lam, uhat, grad, settings)?;
    Ok(next)
}

/// Newton step reusing an already-computed gradient; returns the new
/// iterate with its gradient (when damping evaluates it anyway).
fn dual_step_from_gradient(
    ctx: DualContext,
    lam: &DMatrix<f64>,
    uhat: &DMatrix<f64>,
    grad: DMatrix<f64>,
    settings: &DualSettings,
) -> Result<(DMatrix<f64>, Option<DMatrix<f64>>), ClosureError> {
    let n = lam.nrows();
    let m = ctx.num_conserved();
    let base_merit = grad.norm();
    if base_merit <= 1e-14 * (1.0 + uhat.norm()) {
        // Gradient at rounding level: d(λ, û) = λ, a further step would
        // only chase noise.
        return Ok((lam.clone(), Some(grad)));
    }
    let h = hessian(ctx, lam)?;
    let chol = factorize(h, ctx.rule)?;
    let g_vec = DVector::from_iterator(n * m, (0..m).flat_map(|a| (0..n).map(move |i| (i, a))).map(|(i, a)| grad[(i, a)]));
    let delta = chol.solve(&g_vec);
    let delta = DMatrix::from_fn(n, m, |i, a| delta[a * n + i]);
    if !settings.damping {
        return Ok((lam - delta, None));
    }
    let mut t = 1.0;
    for _ in 0..=settings.max_halvings {
        let cand = lam - t * &delta;
        match lagrangian_gradient(ctx, &cand, uhat) {
            Ok(cand_grad) => {
                if cand_grad.norm() < base_merit {
                    return Ok((cand, Some(cand_grad)));
                }
            }
            Err(ClosureError::InadmissibleDual { .. }) => {}
            Err(e) => return Err(e),
        }
        t *= 0.5;
    }
    Err(ClosureError::LineSearchFailure {
        halvings: settings.max_halvings,
        gradient_norm: base_merit,
    })
}

/// Factorize the SPD Hessian; a failed factorization or an extreme
/// diagonal spread of the Cholesky factor is reported as ill-conditioned.
fn factorize(
    h: DMatrix<f64>,
    rule: &QuadratureRule,
) -> Result<Cholesky<f64, Dyn>, ClosureError> {
    let ill = || ClosureError::IllConditionedHessian { rule: rule.label().to_string() };
    let chol = Cholesky::new(h).ok_or_else(ill)?;
    let diag = chol.l_dirty();
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for i in 0..diag.nrows() {
        let d = diag[(i, i)];
        lo = lo.min(d);
        hi = hi.max(d);
    }
    // (hi/lo)² bounds the condition number from below.
    if !(lo > 0.0) || (hi / lo).powi(2) > 1e14 {
        return Err(ill());
    }
    Ok(chol)
}

/// Converge the dual iteration for û, warm-started at `lam0`.
///
/// Stops when the stopping quantity drops below τ; exceeding the iteration
/// cap yields [`ClosureError::NonConvergence`] carrying the report of the
/// last iterate.
pub fn solve_dual(
    ctx: DualContext,
    uhat: &DMatrix<f64>,
    lam0: &DMatrix<f64>,
    settings: &DualSettings,
) -> Result<(DMatrix<f64>, DualSolveReport), ClosureError> {
    let mut lam = lam0.clone();
    let mut grad = lagrangian_gradient(ctx, &lam, uhat)?;
    let mut iterations = 0;
    loop {
        let crit = settings.stopping.apply(&grad);
        if crit < settings.tau {
            return Ok((
                lam,
                DualSolveReport { iterations, final_gradient_norm: crit, converged: true },
            ));
        }
        if iterations >= settings.max_iterations {
            return Err(ClosureError::NonConvergence {
                report: DualSolveReport {
                    iterations,
                    final_gradient_norm: crit,
                    converged: false,
                },
                tau: settings.tau,
            });
        }
        let (next, next_grad) = dual_step_from_gradient(ctx, &lam, uhat, grad, settings)?;
        lam = next;
        grad = match next_grad {
            Some(g) => g,
            None => lagrangian_gradient(ctx, &lam, uhat)?,
        };
        iterations += 1;
    }
}

#[inline]
fn eval_dual_at_point(
    tab: &DMatrix<f64>,
    lam: &DMatrix<f64>,
    k: usize,
    n: usize,
    out: &mut [f64],
) {
    for (a, slot) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for i in 0..n {
            acc += tab[(k, i)] * lam[(i, a)];
        }
        *slot = acc;
    }
}
