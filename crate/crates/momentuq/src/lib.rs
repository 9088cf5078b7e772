//! Moment methods for hyperbolic conservation laws with uncertain data.
//!
//! The solution of a conservation law `∂_t u + ∇·f(u) = 0` with random
//! initial data `u(t=0) = u_IC(x, ξ)` is expanded in polynomials that are
//! orthonormal with respect to the density of the random vector ξ. The
//! crate provides both families of methods for computing the expansion
//! coefficients (the *moments*):
//!
//! * **Intrusive**: stochastic-Galerkin and entropy-closure moment systems
//!   discretized by a finite-volume kinetic flux, including a one-shot
//!   variant for steady problems and per-cell adaptive moment refinement
//!   ([`solver`], [`closure`]).
//! * **Non-intrusive**: stochastic collocation driving the same
//!   deterministic flux at quadrature points ([`collocation`]).
//!
//! Supporting layers: multi-index bases and tensor/sparse quadrature
//! ([`random_space`]), conservation-law definitions with exact Riemann
//! reference solutions ([`models`]) and spatial meshes ([`mesh`]).

pub mod closure;
pub mod collocation;
pub mod mesh;
pub mod models;
pub mod random_space;
pub mod solver;

mod parallel;

pub use parallel::WorkerPool;

// The moment containers expose nalgebra matrices; re-export the crate so
// downstream users match versions.
pub use nalgebra;

#[cfg(doctest)]
mod book;
