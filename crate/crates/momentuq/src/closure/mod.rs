//! Entropy closures and the dual optimization that maps moments to
//! entropic expansion coefficients.
//!
//! A closure is a strictly convex entropy s on the admissible states of a
//! conservation law. The moment-constrained entropy minimizer is recovered
//! from dual variables λ through the inverse gradient map
//!
//! u_s(Λ) = (∇_u s)^{-1}(Λ),
//!
//! evaluated at Λ = λᵀφ(ξ). Finding λ for a given moment matrix û means
//! finding the root of ∇_λ L(λ; û) = ⟨u_s(λᵀφ) φᵀ⟩_Q^T − û, which
//! [`solve_dual`] does with a damped Newton iteration ([`dual_step`]).
//!
//! The quadratic entropy ½uᵀu makes u_s the identity and reduces the whole
//! construction to stochastic-Galerkin; the gas-dynamics entropy of
//! [`EulerClosure`] keeps reconstructions at positive density and pressure.

mod euler;
mod newton;
mod quadratic;

pub use euler::EulerClosure;
pub use newton::{
    dual_step, hessian, lagrangian_gradient, reconstruct_at_points, solve_dual, DualContext,
    DualSettings, DualSolveReport, StoppingNorm,
};
pub use quadratic::QuadraticClosure;

use thiserror::Error;

/// Errors of the dual optimization layer.
#[derive(Debug, Clone, Error)]
pub enum ClosureError {
    #[error("inadmissible dual variables at quadrature point {point}")]
    InadmissibleDual { point: usize },
    #[error("ill-conditioned Hessian of the dual problem (quadrature rule: {rule})")]
    IllConditionedHessian { rule: String },
    #[error("dual line search failed after {halvings} halvings (gradient norm {gradient_norm:.3e})")]
    LineSearchFailure { halvings: usize, gradient_norm: f64 },
    #[error("dual Newton iteration did not converge: {report:?} (τ = {tau:.3e})")]
    NonConvergence { report: DualSolveReport, tau: f64 },
}

/// A strictly convex entropy s with its gradient, the inverse map
/// u_s = (∇s)^{-1} and the derivative ∇u_s.
///
/// `ansatz` and `ansatz_jacobian` are only defined on the admissible dual
/// domain reported by [`EntropyClosure::dual_admissible`]; ∇u_s is
/// symmetric positive definite there.
pub trait EntropyClosure: Send + Sync {
    /// Number m of conserved variables.
    fn num_conserved(&self) -> usize;

    /// Whether u_s is the identity map (the stochastic-Galerkin case);
    /// solvers then warm-start the duals at the moments themselves.
    fn is_galerkin(&self) -> bool {
        false
    }

    /// Whether u lies in the entropy's admissible state domain.
    fn state_admissible(&self, u: &[f64]) -> bool;

    /// Entropy value s(u) at an admissible state.
    fn entropy(&self, u: &[f64]) -> f64;

    /// ∇_u s(u) at an admissible state.
    fn entropy_gradient(&self, u: &[f64], out: &mut [f64]);

    /// Whether Λ lies in the domain of u_s.
    fn dual_admissible(&self, lam: &[f64]) -> bool;

    /// u_s(Λ) = (∇s)^{-1}(Λ); `false` when Λ is inadmissible.
    fn ansatz(&self, lam: &[f64], out: &mut [f64]) -> bool;

    /// ∇u_s(Λ) into the column-major m×m buffer; `false` when inadmissible.
    fn ansatz_jacobian(&self, lam: &[f64], out: &mut [f64]) -> bool;
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    /// Shared helper: a random admissible Euler state with moderate values.
    pub fn random_state(rng: &mut StdRng) -> [f64; 4] {
        let rho = rng.gen_range(0.1..3.0);
        let v1 = rng.gen_range(-2.0..2.0);
        let v2 = rng.gen_range(-2.0..2.0);
        let p = rng.gen_range(0.1..3.0);
        let gamma = 1.4;
        let e = p / (gamma - 1.0) + 0.5 * rho * (v1 * v1 + v2 * v2);
        [rho, rho * v1, rho * v2, e]
    }

    #[test]
    fn inverse_pair_property_euler() {
        // ‖u_s(∇s(u)) − u‖ / ‖u‖ < 1e-8 over 10⁴ random admissible states.
        let closure = EulerClosure::new(1.4);
        let mut rng = StdRng::seed_from_u64(7);
        let mut worst = 0.0f64;
        for _ in 0..10_000 {
            let u = random_state(&mut rng);
            let mut lam = [0.0; 4];
            closure.entropy_gradient(&u, &mut lam);
            let mut back = [0.0; 4];
            assert!(closure.ansatz(&lam, &mut back));
            let err = (0..4).map(|i| (back[i] - u[i]).powi(2)).sum::<f64>().sqrt();
            let norm = (0..4).map(|i| u[i] * u[i]).sum::<f64>().sqrt();
            worst = worst.max(err / norm);
        }
        assert!(worst < 1e-8, "worst relative round-trip error {worst:.3e}");
    }

    #[test]
    fn euler_ansatz_matches_damped_newton_oracle() {
        // Solve ∇s(u) = Λ by a damped Newton iteration on ∇s (independent of
        // the closed-form ansatz) and compare.
        let closure = EulerClosure::new(1.4);
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..200 {
            let seed_state = random_state(&mut rng);
            let mut lam = [0.0; 4];
            closure.entropy_gradient(&seed_state, &mut lam);
            // Start the oracle from a perturbed admissible state.
            let mut u = seed_state;
            for x in &mut u {
                *x *= rng.gen_range(0.8..1.2);
            }
            if !admissible(&u) {
                u = seed_state;
            }
            let oracle = newton_oracle(&closure, &lam, u);
            let mut direct = [0.0; 4];
            assert!(closure.ansatz(&lam, &mut direct));
            for i in 0..4 {
                assert!(
                    (oracle[i] - direct[i]).abs() < 1e-7 * (1.0 + direct[i].abs()),
                    "component {i}: oracle {} vs ansatz {}",
                    oracle[i],
                    direct[i]
                );
            }
        }
    }

    #[test]
    fn euler_ansatz_output_is_admissible() {
        // ρ > 0 and p > 0 for any Λ with Λ₄ < 0; Λ is sampled widely but
        // within the range where α(Λ) stays inside double precision.
        let closure = EulerClosure::new(1.4);
        let mut rng = StdRng::seed_from_u64(23);
        for _ in 0..10_000 {
            let lam = [
                rng.gen_range(-5.0..5.0),
                rng.gen_range(-3.0..3.0),
                rng.gen_range(-3.0..3.0),
                -rng.gen_range(0.05..5.0),
            ];
            let mut u = [0.0; 4];
            assert!(closure.ansatz(&lam, &mut u));
            assert!(u[0] > 0.0, "negative density for {lam:?}");
            // Velocity form of the pressure avoids overflowing m² for the
            // most extreme reconstructions.
            let v1 = u[1] / u[0];
            let v2 = u[2] / u[0];
            let p = 0.4 * u[0] * (u[3] / u[0] - 0.5 * (v1 * v1 + v2 * v2));
            assert!(p > 0.0, "negative pressure for {lam:?}");
        }
    }

    #[test]
    fn euler_rejects_nonnegative_lambda4() {
        let closure = EulerClosure::new(1.4);
        let mut out = [0.0; 4];
        assert!(!closure.dual_admissible(&[0.1, 0.0, 0.0, 0.0]));
        assert!(!closure.ansatz(&[0.1, 0.0, 0.0, 1.0], &mut out));
    }

    fn admissible(u: &[f64]) -> bool {
        u[0] > 0.0 && u[3] - 0.5 * (u[1] * u[1] + u[2] * u[2]) / u[0] > 0.0
    }

    /// Damped Newton on F(u) = ∇s(u) − Λ with a finite-difference Jacobian.
    fn newton_oracle(closure: &EulerClosure, lam: &[f64; 4], mut u: [f64; 4]) -> [f64; 4] {
        use nalgebra::{DMatrix, DVector};
        for _ in 0..200 {
            let mut g = [0.0; 4];
            closure.entropy_gradient(&u, &mut g);
            let f = DVector::from_iterator(4, (0..4).map(|i| g[i] - lam[i]));
            if f.norm() < 1e-13 {
                break;
            }
            let mut jac = DMatrix::zeros(4, 4);
            for j in 0..4 {
                let h = 1e-7 * (1.0 + u[j].abs());
                let mut up = u;
                up[j] += h;
                let mut um = u;
                um[j] -= h;
                if !admissible(&up) || !admissible(&um) {
                    continue;
                }
                let mut gp = [0.0; 4];
                let mut gm = [0.0; 4];
                closure.entropy_gradient(&up, &mut gp);
                closure.entropy_gradient(&um, &mut gm);
                for i in 0..4 {
                    jac[(i, j)] = (gp[i] - gm[i]) / (2.0 * h);
                }
            }
            let delta = jac.lu().solve(&f).expect("entropy Hessian is invertible");
            let mut t = 1.0;
            for _ in 0..60 {
                let cand = [
                    u[0] - t * delta[0],
                    u[1] - t * delta[1],
                    u[2] - t * delta[2],
                    u[3] - t * delta[3],
                ];
                if admissible(&cand) {
                    let mut gc = [0.0; 4];
                    closure.entropy_gradient(&cand, &mut gc);
                    let fc = (0..4).map(|i| (gc[i] - lam[i]).powi(2)).sum::<f64>().sqrt();
                    if fc < f.norm() {
                        u = cand;
                        break;
                    }
                }
                t *= 0.5;
            }
        }
        u
    }
}
