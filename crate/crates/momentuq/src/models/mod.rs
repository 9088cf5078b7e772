//! Deterministic conservation laws: fluxes, wave speeds, admissibility and
//! exact Riemann reference solutions.
//!
//! Everything the moment solvers need from the underlying physics is a
//! consistent two-point numerical flux g(u_l, u_r, n) with
//! g(u, u, n) = f(u)·n, a wave-speed bound for the CFL condition, and an
//! admissibility predicate. Intrusive and non-intrusive methods share these
//! implementations, so comparisons between them see the same deterministic
//! solver.

mod burgers;
mod euler;
mod galerkin;
mod riemann;

pub use burgers::BurgersModel;
pub use euler::{EulerFlux, EulerModel};
pub use galerkin::GalerkinTensor;
pub use riemann::{exact_riemann_burgers, exact_riemann_euler_1d, RiemannError};

use thiserror::Error;

/// A state outside the model's admissible set was fed to a flux.
#[derive(Debug, Clone, Error)]
#[error("inadmissible state {state:?}")]
pub struct InadmissibleState {
    pub state: Vec<f64>,
}

/// One conservation law: m conserved variables over d spatial dimensions.
pub trait ModelProblem: Send + Sync {
    fn num_conserved(&self) -> usize;

    fn spatial_dim(&self) -> usize;

    /// Physical flux projected on the unit normal, f(u)·n.
    fn physical_flux(&self, u: &[f64], n: &[f64], out: &mut [f64]);

    /// Upper bound for the spectral radius of the projected flux Jacobian.
    fn max_wave_speed(&self, u: &[f64], n: &[f64]) -> f64;

    fn admissible(&self, u: &[f64]) -> bool;

    /// Consistent numerical flux through an oriented interface.
    ///
    /// `dx_over_dt` supplies the global Lax-Friedrichs dissipation ratio
    /// for models that use it (Burgers); locally bounded fluxes ignore it.
    fn numerical_flux(
        &self,
        ul: &[f64],
        ur: &[f64],
        n: &[f64],
        dx_over_dt: f64,
        out: &mut [f64],
    ) -> Result<(), InadmissibleState>;
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    #[test]
    fn consistency_of_all_numerical_fluxes() {
        // g(u, u, n) = f(u)·n within 1e-12 over 10³ random admissible states.
        let burgers = BurgersModel::new();
        let euler1 = EulerModel::new(1.4, 1);
        let euler2 = EulerModel::new(1.4, 2);
        let euler2_hll = EulerModel::with_flux(1.4, 2, EulerFlux::Hll);
        let mut rng = StdRng::seed_from_u64(41);
        for _ in 0..1000 {
            let u = [rng.gen_range(-2.0..2.0)];
            check_consistency(&burgers, &u, &[1.0], &mut rng);
            check_consistency(&burgers, &u, &[-1.0], &mut rng);

            let rho = rng.gen_range(0.1..3.0);
            let v1 = rng.gen_range(-2.0..2.0);
            let v2 = rng.gen_range(-2.0..2.0);
            let p = rng.gen_range(0.1..3.0);
            let e1 = p / 0.4 + 0.5 * rho * v1 * v1;
            check_consistency(&euler1, &[rho, rho * v1, e1], &[1.0], &mut rng);
            let e2 = p / 0.4 + 0.5 * rho * (v1 * v1 + v2 * v2);
            let theta: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let n = [theta.cos(), theta.sin()];
            check_consistency(&euler2, &[rho, rho * v1, rho * v2, e2], &n, &mut rng);
            check_consistency(&euler2_hll, &[rho, rho * v1, rho * v2, e2], &n, &mut rng);
        }
    }

    fn check_consistency(model: &dyn ModelProblem, u: &[f64], n: &[f64], rng: &mut StdRng) {
        let m = model.num_conserved();
        let mut f = vec![0.0; m];
        let mut g = vec![0.0; m];
        model.physical_flux(u, n, &mut f);
        let ratio = rng.gen_range(0.5..4.0);
        model.numerical_flux(u, u, n, ratio, &mut g).unwrap();
        for a in 0..m {
            assert!((f[a] - g[a]).abs() < 1e-12, "consistency violated: {f:?} vs {g:?}");
        }
    }
}
