//! Burgers' equation ∂_t u + ∂_x u²/2 = 0.

use super::{InadmissibleState, ModelProblem};

/// Scalar Burgers model with a global Lax-Friedrichs flux
///
/// g(u_l, u_r) = ½(f(u_l) + f(u_r)) − ½ (Δx/Δt)(u_r − u_l),
///
/// whose dissipation ratio Δx/Δt is supplied by the solver per step. Every
/// state is admissible.
#[derive(Debug, Clone, Default)]
pub struct BurgersModel;

impl BurgersModel {
    pub fn new() -> Self {
        Self
    }
}

impl ModelProblem for BurgersModel {
    fn num_conserved(&self) -> usize {
        1
    }

    fn spatial_dim(&self) -> usize {
        1
    }

    fn physical_flux(&self, u: &[f64], n: &[f64], out: &mut [f64]) {
        out[0] = n[0] * 0.5 * u[0] * u[0];
    }

    fn max_wave_speed(&self, u: &[f64], n: &[f64]) -> f64 {
        (u[0] * n[0]).abs()
    }

    fn admissible(&self, _u: &[f64]) -> bool {
        true
    }

    fn numerical_flux(
        &self,
        ul: &[f64],
        ur: &[f64],
        n: &[f64],
        dx_over_dt: f64,
        out: &mut [f64],
    ) -> Result<(), InadmissibleState> {
        out[0] = n[0] * 0.25 * (ul[0] * ul[0] + ur[0] * ur[0])
            - 0.5 * dx_over_dt * (ur[0] - ul[0]);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flux_values() {
        let model = BurgersModel::new();
        let mut g = [0.0];
        model.numerical_flux(&[0.0], &[0.0], &[1.0], 1.0, &mut g).unwrap();
        assert_eq!(g[0], 0.0);
        // g(1,-1) with Δx/Δt = 1: ½(½+½) − ½(−2) = 1.5
        model.numerical_flux(&[1.0], &[-1.0], &[1.0], 1.0, &mut g).unwrap();
        assert_eq!(g[0], 1.5);
        // consistency at u = 3
        model.numerical_flux(&[3.0], &[3.0], &[1.0], 2.0, &mut g).unwrap();
        assert_eq!(g[0], 4.5);
    }
}
