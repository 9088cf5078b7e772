//! Uniform 1D meshes.

use super::CellGeometry;

/// Uniform subdivision of [x_min, x_max] into interior cells indexed
/// 0..n_cells; boundary closure is handled by the solvers through ghost
/// states at the two end interfaces.
#[derive(Debug, Clone)]
pub struct Mesh1D {
    x_min: f64,
    x_max: f64,
    n_cells: usize,
    dx: f64,
}

impl Mesh1D {
    pub fn new(x_min: f64, x_max: f64, n_cells: usize) -> Self {
        assert!(n_cells >= 1 && x_max > x_min);
        Self { x_min, x_max, n_cells, dx: (x_max - x_min) / n_cells as f64 }
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn cell_center(&self, j: usize) -> f64 {
        self.x_min + (j as f64 + 0.5) * self.dx
    }
}

impl CellGeometry for Mesh1D {
    fn n_cells(&self) -> usize {
        self.n_cells
    }

    fn measure(&self, _j: usize) -> f64 {
        self.dx
    }

    fn centroid(&self, j: usize) -> [f64; 2] {
        [self.cell_center(j), 0.0]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn centers_and_width() {
        let mesh = Mesh1D::new(0.0, 1.0, 4);
        assert_eq!(mesh.dx(), 0.25);
        assert_eq!(mesh.cell_center(0), 0.125);
        assert_eq!(mesh.cell_center(3), 0.875);
    }
}
