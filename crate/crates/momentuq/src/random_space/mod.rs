//! Polynomial chaos bases and quadrature over the random space Θ = [-1,1]^p.
//!
//! All random inputs are uniform on [-1,1], so the joint density is
//! f_Ξ(ξ) = 2^{-p} and the orthonormal basis is the product of normalized
//! Legendre polynomials. Quadrature rules carry plain Lebesgue weights on
//! [-1,1]^p; the density enters through the bracket
//!
//! ⟨h⟩_Q = Σ_k w_k h(ξ_k) f_Ξ(ξ_k),
//!
//! which approximates the expectation ⟨h⟩ = ∫ h f_Ξ dξ.

mod basis;
mod quadrature;

pub use basis::{BasisSet, MultiIndex};
pub use quadrature::{
    clenshaw_curtis_1d, gauss_legendre_1d, gauss_lobatto_1d, nesting_map, sparse_quadrature,
    tensor_quadrature, QuadratureFamily, QuadratureRule,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum RandomSpaceError {
    #[error("point {0:?} lies outside the uniform support [-1,1]^p")]
    OutOfSupport(Vec<f64>),
    #[error("dimension mismatch: basis has p = {basis}, point has length {point}")]
    DimensionMismatch { basis: usize, point: usize },
}

/// ⟨h⟩_Q = Σ_k w_k h(ξ_k) f_Ξ(ξ_k) for a scalar integrand.
pub fn bracket<F: Fn(&[f64]) -> f64>(rule: &QuadratureRule, h: F) -> f64 {
    let mut acc = 0.0;
    for k in 0..rule.len() {
        acc += rule.weight(k) * rule.density(k) * h(rule.point(k));
    }
    acc
}

/// Componentwise bracket of a vector-valued integrand of length `m`.
pub fn bracket_vec<F: Fn(&[f64], &mut [f64])>(rule: &QuadratureRule, m: usize, h: F) -> Vec<f64> {
    let mut acc = vec![0.0; m];
    let mut val = vec![0.0; m];
    for k in 0..rule.len() {
        h(rule.point(k), &mut val);
        let wf = rule.weight(k) * rule.density(k);
        for (a, v) in acc.iter_mut().zip(&val) {
            *a += wf * v;
        }
    }
    acc
}
