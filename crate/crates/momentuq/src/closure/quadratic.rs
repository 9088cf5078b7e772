//! The quadratic entropy, under which the moment system is the
//! stochastic-Galerkin system.

use super::EntropyClosure;

/// s(u) = ½ uᵀu, so ∇s = id, u_s(Λ) = Λ and ∇u_s = I. Every dual is
/// admissible.
#[derive(Debug, Clone)]
pub struct QuadraticClosure {
    m: usize,
}

impl QuadraticClosure {
    pub fn new(num_conserved: usize) -> Self {
        assert!(num_conserved >= 1);
        Self { m: num_conserved }
    }
}

impl EntropyClosure for QuadraticClosure {
    fn num_conserved(&self) -> usize {
        self.m
    }

    fn is_galerkin(&self) -> bool {
        true
    }

    fn state_admissible(&self, _u: &[f64]) -> bool {
        true
    }

    fn entropy(&self, u: &[f64]) -> f64 {
        0.5 * u.iter().map(|x| x * x).sum::<f64>()
    }

    fn entropy_gradient(&self, u: &[f64], out: &mut [f64]) {
        out.copy_from_slice(u);
    }

    fn dual_admissible(&self, _lam: &[f64]) -> bool {
        true
    }

    fn ansatz(&self, lam: &[f64], out: &mut [f64]) -> bool {
        out.copy_from_slice(lam);
        true
    }

    fn ansatz_jacobian(&self, _lam: &[f64], out: &mut [f64]) -> bool {
        out.fill(0.0);
        for i in 0..self.m {
            out[i * self.m + i] = 1.0;
        }
        true
    }
}
