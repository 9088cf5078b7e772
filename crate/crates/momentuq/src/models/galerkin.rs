//! Galerkin tensors C_i = ⟨φ φᵀ φ_i⟩ for scalar Burgers in one stochastic
//! dimension, and the analytic Lax-Friedrichs moment flux built from them.

use nalgebra::{DMatrix, DVector};

use crate::random_space::{gauss_legendre_1d, BasisSet};

/// The N matrices C_i ∈ R^{N×N}, assembled once by a Gauss-Legendre rule
/// exact for the triple products (degree 3M).
#[derive(Debug, Clone)]
pub struct GalerkinTensor {
    tensors: Vec<DMatrix<f64>>,
}

impl GalerkinTensor {
    pub fn new(basis: &BasisSet) -> Self {
        assert_eq!(basis.dim(), 1, "Galerkin tensors are built for p = 1");
        let n = basis.len();
        let m = basis.max_degree();
        let q = (3 * m).div_ceil(2) + 1; // 2q-1 ≥ 3M
        let rule = gauss_legendre_1d(q.max(1));
        let tab = basis.tabulate(&rule);
        let mut tensors = vec![DMatrix::zeros(n, n); n];
        for k in 0..rule.len() {
            let wf = rule.weight(k) * rule.density(k);
            for (i, c) in tensors.iter_mut().enumerate() {
                let wi = wf * tab[(k, i)];
                for a in 0..n {
                    for b in 0..n {
                        c[(a, b)] += wi * tab[(k, a)] * tab[(k, b)];
                    }
                }
            }
        }
        Self { tensors }
    }

    pub fn len(&self) -> usize {
        self.tensors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tensors.is_empty()
    }

    pub fn tensor(&self, i: usize) -> &DMatrix<f64> {
        &self.tensors[i]
    }

    /// SG Burgers flux F_i(û) = ½ ûᵀ C_i û.
    pub fn physical_flux(&self, uhat: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(
            self.len(),
            self.tensors.iter().map(|c| 0.5 * (uhat.transpose() * c * uhat)[(0, 0)]),
        )
    }

    /// Analytic Lax-Friedrichs moment flux
    ///
    /// G_i = ¼(û_lᵀ C_i û_l + û_rᵀ C_i û_r) − (Δx/(2Δt))(û_r − û_l)_i,
    ///
    /// requiring no quadrature at all.
    pub fn lax_friedrichs_flux(
        &self,
        ul_hat: &DVector<f64>,
        ur_hat: &DVector<f64>,
        dx_over_dt: f64,
    ) -> DVector<f64> {
        DVector::from_iterator(
            self.len(),
            self.tensors.iter().enumerate().map(|(i, c)| {
                0.25 * ((ul_hat.transpose() * c * ul_hat)[(0, 0)]
                    + (ur_hat.transpose() * c * ur_hat)[(0, 0)])
                    - 0.5 * dx_over_dt * (ur_hat[i] - ul_hat[i])
            }),
        )
    }
}
