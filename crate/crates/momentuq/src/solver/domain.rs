//! Edge-based view of the spatial mesh shared by 1D and 2D solvers.
//!
//! Boundary conditions act pointwise in the random space: the state seen
//! through a boundary edge at quadrature point ξ_k is derived from the
//! interior reconstruction at ξ_k (slip, outflow) or prescribed directly
//! (Dirichlet). Periodic 1D boundaries become ordinary interior edges that
//! wrap around, so they need no special handling anywhere else.

use std::sync::Arc;

use crate::mesh::{Mesh1D, Mesh2D};

/// State-valued function of position and random point, writing m values.
pub type StochasticFn = Arc<dyn Fn(&[f64; 2], &[f64], &mut [f64]) + Send + Sync>;

#[derive(Clone)]
pub enum BoundaryCondition {
    /// 1D only: identify the two ends.
    Periodic,
    /// Copy the interior state.
    Outflow,
    /// Reflect the normal velocity.
    SlipWall,
    /// Prescribed far-field state, possibly ξ-dependent.
    Dirichlet(StochasticFn),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Neighbor {
    Cell(usize),
    /// Index into the domain's boundary-condition table.
    Boundary(usize),
}

#[derive(Debug, Clone)]
pub struct DomainEdge {
    pub left: usize,
    pub right: Neighbor,
    /// Unit normal pointing out of `left`.
    pub normal: [f64; 2],
    pub length: f64,
    pub midpoint: [f64; 2],
}

/// Cells, oriented edges and boundary conditions of a spatial mesh.
pub struct Domain {
    edges: Vec<DomainEdge>,
    /// Per cell: (edge id, +1 when the cell is the edge's left side).
    cell_edges: Vec<Vec<(usize, f64)>>,
    measures: Vec<f64>,
    char_lengths: Vec<f64>,
    centers: Vec<[f64; 2]>,
    bcs: Vec<BoundaryCondition>,
    dim: usize,
}

impl Domain {
    /// 1D line domain with the given end conditions. Periodic requires
    /// both ends periodic and produces a wrap-around edge.
    pub fn line(mesh: &Mesh1D, left: BoundaryCondition, right: BoundaryCondition) -> Self {
        let n = mesh.n_cells();
        let periodic = matches!(left, BoundaryCondition::Periodic);
        assert_eq!(
            periodic,
            matches!(right, BoundaryCondition::Periodic),
            "periodic boundaries come in pairs"
        );
        let mut edges = Vec::new();
        let mut cell_edges = vec![Vec::new(); n];
        for j in 0..n - 1 {
            let x = mesh.x_min() + (j as f64 + 1.0) * mesh.dx();
            edges.push(DomainEdge {
                left: j,
                right: Neighbor::Cell(j + 1),
                normal: [1.0, 0.0],
                length: 1.0,
                midpoint: [x, 0.0],
            });
        }
        if periodic {
            edges.push(DomainEdge {
                left: n - 1,
                right: Neighbor::Cell(0),
                normal: [1.0, 0.0],
                length: 1.0,
                midpoint: [mesh.x_max(), 0.0],
            });
        } else {
            edges.push(DomainEdge {
                left: 0,
                right: Neighbor::Boundary(0),
                normal: [-1.0, 0.0],
                length: 1.0,
                midpoint: [mesh.x_min(), 0.0],
            });
            edges.push(DomainEdge {
                left: n - 1,
                right: Neighbor::Boundary(1),
                normal: [1.0, 0.0],
                length: 1.0,
                midpoint: [mesh.x_max(), 0.0],
            });
        }
        for (id, e) in edges.iter().enumerate() {
            cell_edges[e.left].push((id, 1.0));
            if let Neighbor::Cell(c) = e.right {
                cell_edges[c].push((id, -1.0));
            }
        }
        let measures = vec![mesh.dx(); n];
        let centers = (0..n).map(|j| [mesh.cell_center(j), 0.0]).collect();
        Self {
            edges,
            cell_edges,
            measures,
            char_lengths: vec![mesh.dx(); n],
            centers,
            bcs: vec![left, right],
            dim: 1,
        }
    }

    /// 2D triangular domain; `bcs` maps each mesh marker (by index) to its
    /// boundary condition.
    pub fn triangular(mesh: &Mesh2D, bcs: Vec<BoundaryCondition>) -> Self {
        assert_eq!(bcs.len(), mesh.marker_names().len(), "one condition per marker");
        assert!(
            !bcs.iter().any(|bc| matches!(bc, BoundaryCondition::Periodic)),
            "periodic boundaries are a 1D feature"
        );
        let n = mesh.n_cells();
        let mut edges = Vec::with_capacity(mesh.edges().len());
        let mut cell_edges = vec![Vec::new(); n];
        for e in mesh.edges() {
            let [a, b] = e.vertices;
            let (pa, pb) = (mesh.vertices()[a], mesh.vertices()[b]);
            let right = match e.right {
                Some(c) => Neighbor::Cell(c),
                None => Neighbor::Boundary(e.marker.expect("validated on load")),
            };
            let id = edges.len();
            edges.push(DomainEdge {
                left: e.left,
                right,
                normal: e.normal,
                length: e.length,
                midpoint: [(pa[0] + pb[0]) / 2.0, (pa[1] + pb[1]) / 2.0],
            });
            cell_edges[e.left].push((id, 1.0));
            if let Some(c) = e.right {
                cell_edges[c].push((id, -1.0));
            }
        }
        let measures = (0..n).map(|c| mesh.area(c)).collect();
        let char_lengths = (0..n).map(|c| mesh.char_length(c)).collect();
        let centers = (0..n).map(|c| mesh.centroid_of(c)).collect();
        Self { edges, cell_edges, measures, char_lengths, centers, bcs, dim: 2 }
    }

    pub fn n_cells(&self) -> usize {
        self.measures.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn edges(&self) -> &[DomainEdge] {
        &self.edges
    }

    pub fn cell_edges(&self, cell: usize) -> &[(usize, f64)] {
        &self.cell_edges[cell]
    }

    /// Cell length (1D) or area (2D).
    pub fn measure(&self, cell: usize) -> f64 {
        self.measures[cell]
    }

    pub fn measures(&self) -> &[f64] {
        &self.measures
    }

    /// CFL length: Δx in 1D, area/perimeter in 2D.
    pub fn char_length(&self, cell: usize) -> f64 {
        self.char_lengths[cell]
    }

    pub fn min_char_length(&self) -> f64 {
        self.char_lengths.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn center(&self, cell: usize) -> [f64; 2] {
        self.centers[cell]
    }

    pub fn boundary_condition(&self, id: usize) -> &BoundaryCondition {
        &self.bcs[id]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_domain_stencils() {
        let mesh = Mesh1D::new(0.0, 1.0, 4);
        let outflow = Domain::line(&mesh, BoundaryCondition::Outflow, BoundaryCondition::Outflow);
        // Interior cell 1 touches the edges (0,1) and (1,2).
        let ce = outflow.cell_edges(1);
        assert_eq!(ce.len(), 2);
        assert_eq!(ce.iter().map(|e| e.1).sum::<f64>(), 0.0);
        assert_eq!(outflow.edges().len(), 5);

        let periodic =
            Domain::line(&mesh, BoundaryCondition::Periodic, BoundaryCondition::Periodic);
        assert_eq!(periodic.edges().len(), 4);
        // Every edge joins two cells; cell 0 sees the wrap edge from the right side.
        assert!(periodic.edges().iter().all(|e| matches!(e.right, Neighbor::Cell(_))));
        assert!(periodic.cell_edges(0).contains(&(3, -1.0)));
    }

    #[test]
    fn triangular_domain_carries_mesh_geometry() {
        let mesh = crate::mesh::generate_rect([0.0, 1.0], [0.0, 1.0], 2, 2);
        let bcs = vec![
            BoundaryCondition::Outflow,
            BoundaryCondition::Outflow,
            BoundaryCondition::Outflow,
            BoundaryCondition::Outflow,
        ];
        let domain = Domain::triangular(&mesh, bcs);
        assert_eq!(domain.n_cells(), 8);
        let total: f64 = (0..8).map(|c| domain.measure(c)).sum();
        assert!((total - 1.0).abs() < 1e-12);
        for c in 0..8 {
            assert_eq!(domain.cell_edges(c).len(), 3);
        }
    }
}
