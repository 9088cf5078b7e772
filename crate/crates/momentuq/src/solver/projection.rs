//! Initial-condition projection onto the moment basis.

use nalgebra::DMatrix;

use super::domain::{Domain, StochasticFn};
use super::discretization::StochasticLadder;
use super::fields::MomentField;

/// Moments of the initial condition per cell,
/// û_j = cell-average of ⟨u_IC(x, ·) φ⟩_Q at that cell's level.
///
/// The spatial average uses a 3-point Gauss rule across 1D cells and the
/// centroid value in 2D; both are higher order than the first-order
/// scheme.
pub fn project_initial(
    ic: &StochasticFn,
    domain: &Domain,
    ladder: &StochasticLadder,
    levels: &[usize],
    m: usize,
) -> MomentField {
    // 3-point Gauss-Legendre on [-1/2, 1/2].
    let gauss_x = [-0.5 * (0.6f64).sqrt(), 0.0, 0.5 * (0.6f64).sqrt()];
    let gauss_w = [5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0];
    let cells = (0..domain.n_cells())
        .map(|j| {
            let l = levels[j];
            let rule = ladder.rule(l);
            let tab = ladder.tab(l, l);
            let n = ladder.basis(l).len();
            let mut uhat = DMatrix::zeros(n, m);
            let mut state = vec![0.0; m];
            let center = domain.center(j);
            for k in 0..rule.len() {
                let xi = rule.point(k);
                let wf = rule.weight(k) * rule.density(k);
                if domain.dim() == 1 {
                    let h = domain.measure(j);
                    let mut avg = vec![0.0; m];
                    for (gx, gw) in gauss_x.iter().zip(gauss_w) {
                        ic(&[center[0] + gx * h, 0.0], xi, &mut state);
                        for (acc, s) in avg.iter_mut().zip(&state) {
                            *acc += gw * s;
                        }
                    }
                    state.copy_from_slice(&avg);
                } else {
                    ic(&center, xi, &mut state);
                }
                for a in 0..m {
                    let ws = wf * state[a];
                    for i in 0..n {
                        uhat[(i, a)] += ws * tab[(k, i)];
                    }
                }
            }
            uhat
        })
        .collect();
    MomentField { cells }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Mesh1D;
    use crate::random_space::{gauss_legendre_1d, BasisSet};
    use crate::solver::domain::BoundaryCondition;
    use std::sync::Arc;

    fn setup(n_cells: usize, deg: usize, q: usize) -> (Domain, StochasticLadder) {
        let mesh = Mesh1D::new(0.0, 1.0, n_cells);
        let domain =
            Domain::line(&mesh, BoundaryCondition::Outflow, BoundaryCondition::Outflow);
        let ladder = StochasticLadder::single(BasisSet::total_degree(deg, 1), gauss_legendre_1d(q));
        (domain, ladder)
    }

    #[test]
    fn deterministic_ic_has_only_zeroth_moments() {
        let (domain, ladder) = setup(4, 3, 6);
        let ic: StochasticFn = Arc::new(|x, _xi, out| out[0] = x[0] * x[0]);
        let field = project_initial(&ic, &domain, &ladder, &[0; 4], 1);
        for j in 0..4 {
            let u = &field.cells[j];
            for i in 1..u.nrows() {
                assert!(u[(i, 0)].abs() < 1e-15, "higher moment {i} nonzero");
            }
        }
    }

    #[test]
    fn basis_function_ic_projects_to_unit_coordinate() {
        // u_IC(ξ) = φ₁(ξ) = √3 ξ gives û₁ = 1 and all other moments 0.
        let (domain, ladder) = setup(2, 3, 6);
        let ic: StochasticFn = Arc::new(|_x, xi, out| out[0] = 3.0f64.sqrt() * xi[0]);
        let field = project_initial(&ic, &domain, &ladder, &[0; 2], 1);
        let u = &field.cells[0];
        assert!((u[(1, 0)] - 1.0).abs() < 1e-13);
        for i in [0usize, 2, 3] {
            assert!(u[(i, 0)].abs() < 1e-13);
        }
    }

    #[test]
    fn spatial_average_matches_analytic_mean() {
        // u_IC = x²: the 3-point Gauss rule integrates degree 2 exactly, so
        // the projection equals the true cell average (x_r³ − x_l³)/(3Δx).
        let (domain, ladder) = setup(5, 1, 3);
        let ic: StochasticFn = Arc::new(|x, _xi, out| out[0] = x[0] * x[0]);
        let field = project_initial(&ic, &domain, &ladder, &[0; 5], 1);
        for j in 0..5 {
            let xl = 0.2 * j as f64;
            let xr = xl + 0.2;
            let exact = (xr.powi(3) - xl.powi(3)) / (3.0 * 0.2);
            assert!((field.cells[j][(0, 0)] - exact).abs() < 1e-14);
        }
    }
}
