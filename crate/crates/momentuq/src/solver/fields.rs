//! Per-cell moment and dual fields.

use nalgebra::DMatrix;

/// Per-cell moment matrices û_j ∈ R^{N_{ℓ_j} × m} in the graded basis
/// ordering; row 0 is the cell mean.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentField {
    pub cells: Vec<DMatrix<f64>>,
}

/// Per-cell dual matrices λ_j with the same layout as the moments.
#[derive(Debug, Clone, PartialEq)]
pub struct DualField {
    pub cells: Vec<DMatrix<f64>>,
}

/// Which rows of the moment difference enter the steady-state residual.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ResidualMode {
    /// Frobenius norm over all moments.
    #[default]
    AllMoments,
    /// Only the zeroth-order row (the expectation).
    ZerothOnly,
}

impl MomentField {
    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    /// E[u] per cell: the zeroth-moment row.
    pub fn expectation(&self, cell: usize) -> Vec<f64> {
        let u = &self.cells[cell];
        (0..u.ncols()).map(|a| u[(0, a)]).collect()
    }

    /// Var[u] per cell: Σ_{i≥1} û_i² componentwise.
    pub fn variance(&self, cell: usize) -> Vec<f64> {
        let u = &self.cells[cell];
        (0..u.ncols())
            .map(|a| (1..u.nrows()).map(|i| u[(i, a)] * u[(i, a)]).sum())
            .collect()
    }

    /// One conserved component's expectation over all cells.
    pub fn component_expectation(&self, component: usize) -> Vec<f64> {
        self.cells.iter().map(|u| u[(0, component)]).collect()
    }

    /// One conserved component's variance over all cells.
    pub fn component_variance(&self, component: usize) -> Vec<f64> {
        self.cells
            .iter()
            .map(|u| (1..u.nrows()).map(|i| u[(i, component)] * u[(i, component)]).sum())
            .collect()
    }

    /// Measure-weighted 1-norm of the per-cell difference,
    /// Σ_j w_j ‖û_j − v̂_j‖, comparing matrices of different sizes as if
    /// zero-padded.
    pub fn weighted_residual(
        &self,
        other: &MomentField,
        measures: &[f64],
        mode: ResidualMode,
    ) -> f64 {
        let mut acc = 0.0;
        for ((a, b), w) in self.cells.iter().zip(&other.cells).zip(measures) {
            let rows = match mode {
                ResidualMode::AllMoments => a.nrows().max(b.nrows()),
                ResidualMode::ZerothOnly => 1,
            };
            let cols = a.ncols();
            let mut cell = 0.0;
            for i in 0..rows {
                for c in 0..cols {
                    let x = if i < a.nrows() { a[(i, c)] } else { 0.0 };
                    let y = if i < b.nrows() { b[(i, c)] } else { 0.0 };
                    cell += (x - y) * (x - y);
                }
            }
            acc += w * cell.sqrt();
        }
        acc
    }
}

impl DualField {
    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }
}

/// Truncate or zero-pad a cell matrix to `rows` rows.
pub fn resize_rows(mat: &DMatrix<f64>, rows: usize) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(rows, mat.ncols());
    for i in 0..rows.min(mat.nrows()) {
        for c in 0..mat.ncols() {
            out[(i, c)] = mat[(i, c)];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantities_from_moments() {
        // û = (1, 0.5) for a scalar: E = 1, Var = 0.25.
        let field = MomentField { cells: vec![DMatrix::from_column_slice(2, 1, &[1.0, 0.5])] };
        assert_eq!(field.expectation(0), vec![1.0]);
        assert_eq!(field.variance(0), vec![0.25]);
        // Only the zeroth moment: variance 0.
        let flat = MomentField { cells: vec![DMatrix::from_column_slice(1, 1, &[2.0])] };
        assert_eq!(flat.variance(0), vec![0.0]);
    }

    #[test]
    fn variance_is_nonnegative() {
        let field = MomentField {
            cells: vec![DMatrix::from_column_slice(3, 2, &[1.0, -2.0, 0.3, -0.5, 0.0, 4.0])],
        };
        for v in field.variance(0) {
            assert!(v >= 0.0);
        }
    }

    #[test]
    fn residual_pads_mismatched_levels() {
        let a = MomentField { cells: vec![DMatrix::from_column_slice(2, 1, &[1.0, 3.0])] };
        let b = MomentField { cells: vec![DMatrix::from_column_slice(1, 1, &[1.0])] };
        let r = a.weighted_residual(&b, &[2.0], ResidualMode::AllMoments);
        assert!((r - 6.0).abs() < 1e-14);
        let r0 = a.weighted_residual(&b, &[2.0], ResidualMode::ZerothOnly);
        assert_eq!(r0, 0.0);
    }
}
