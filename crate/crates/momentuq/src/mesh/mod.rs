//! Spatial discretization: uniform 1D meshes, unstructured triangular 2D
//! meshes with boundary markers, ghost-state boundary conditions, and the
//! discrete L² norms used for error reporting.

mod line;
mod norms;
mod tri;

pub use line::Mesh1D;
pub use norms::{discrete_l2, relative_l2_error, BoxMask, CellGeometry};
pub use tri::{generate_bend, generate_rect, load_mesh, parse_mesh, write_mesh, Edge, Mesh2D};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("io error reading mesh: {0}")]
    Io(#[from] std::io::Error),
    #[error("triangle {cell} has zero area (defined at line {line})")]
    ZeroArea { cell: usize, line: usize },
    #[error("edge ({0}, {1}) is shared by more than two triangles")]
    NonManifold(usize, usize),
    #[error("boundary edge ({0}, {1}) belongs to no marker")]
    UnmarkedBoundary(usize, usize),
    #[error("marker '{marker}' references edge ({0}, {1}) which is not a boundary edge", .pair.0, .pair.1)]
    BadMarkerEdge { marker: String, pair: (usize, usize) },
    #[error("empty mask region: no cell centroid lies inside")]
    EmptyMask,
    #[error("reference field has zero norm; relative error undefined")]
    ZeroReference,
}

/// How a boundary edge closes the stencil.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryKind {
    /// Mirror the normal velocity: ghost density and energy copy the
    /// interior, the velocity is reflected to v − 2(v·n)n.
    SlipWall,
    /// Prescribed far-field state.
    DirichletFarfield,
    /// Copy the interior state (outflow).
    Outflow,
}

/// Ghost state seen through a boundary edge with outward unit normal `n`.
///
/// Works for any state layout (ρ, ρv₁[, ρv₂], E): the velocity block is
/// everything between the first and last component.
pub fn ghost_state(
    u_interior: &[f64],
    kind: BoundaryKind,
    n: &[f64],
    farfield: &[f64],
    out: &mut [f64],
) {
    match kind {
        BoundaryKind::SlipWall => {
            let m = u_interior.len();
            out.copy_from_slice(u_interior);
            let mut vn = 0.0;
            for d in 0..m - 2 {
                vn += u_interior[1 + d] * n[d];
            }
            for d in 0..m - 2 {
                out[1 + d] = u_interior[1 + d] - 2.0 * vn * n[d];
            }
        }
        BoundaryKind::DirichletFarfield => out.copy_from_slice(farfield),
        BoundaryKind::Outflow => out.copy_from_slice(u_interior),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn slip_reflects_normal_velocity() {
        // v parallel to n flips sign; v orthogonal to n is kept.
        let n = [1.0, 0.0];
        let parallel = [1.0, 2.0, 0.0, 5.0];
        let mut ghost = [0.0; 4];
        ghost_state(&parallel, BoundaryKind::SlipWall, &n, &[], &mut ghost);
        assert_eq!(ghost, [1.0, -2.0, 0.0, 5.0]);

        let orthogonal = [1.0, 0.0, 3.0, 5.0];
        ghost_state(&orthogonal, BoundaryKind::SlipWall, &n, &[], &mut ghost);
        assert_eq!(ghost, [1.0, 0.0, 3.0, 5.0]);

        // (v_ghost + v_int)·n = 0 for a skew normal.
        let n = [0.6, 0.8];
        let u = [1.2, 0.7, -0.4, 3.0];
        ghost_state(&u, BoundaryKind::SlipWall, &n, &[], &mut ghost);
        let vn = (ghost[1] + u[1]) * n[0] + (ghost[2] + u[2]) * n[1];
        assert_abs_diff_eq!(vn, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn dirichlet_returns_farfield_verbatim() {
        let far = [2.0, 0.3, -0.1, 9.0];
        let mut ghost = [0.0; 4];
        ghost_state(&[1.0; 4], BoundaryKind::DirichletFarfield, &[1.0, 0.0], &far, &mut ghost);
        assert_eq!(ghost, far);
    }
}
