//! Discrete L² norms over cell-averaged fields.

use super::MeshError;

/// Per-cell measures and centroids, shared by 1D and 2D meshes.
pub trait CellGeometry {
    fn n_cells(&self) -> usize;
    /// Cell length (1D) or area (2D).
    fn measure(&self, j: usize) -> f64;
    fn centroid(&self, j: usize) -> [f64; 2];
}

/// Axis-aligned restriction region for error norms.
#[derive(Debug, Clone, Copy)]
pub struct BoxMask {
    pub x: [f64; 2],
    pub y: [f64; 2],
}

impl BoxMask {
    pub fn contains(&self, p: [f64; 2]) -> bool {
        p[0] >= self.x[0] && p[0] <= self.x[1] && p[1] >= self.y[0] && p[1] <= self.y[1]
    }
}

/// ‖e‖_Δ = sqrt(Σ_j measure_j e_j²) over cells whose centroid lies in the
/// mask (whole domain when `None`).
pub fn discrete_l2<G: CellGeometry + ?Sized>(
    geom: &G,
    field: &[f64],
    mask: Option<&BoxMask>,
) -> Result<f64, MeshError> {
    assert_eq!(field.len(), geom.n_cells());
    let mut acc = 0.0;
    let mut any = false;
    for (j, e) in field.iter().enumerate() {
        if mask.map_or(true, |m| m.contains(geom.centroid(j))) {
            acc += geom.measure(j) * e * e;
            any = true;
        }
    }
    if !any {
        return Err(MeshError::EmptyMask);
    }
    Ok(acc.sqrt())
}

/// ‖f − r‖_Δ / ‖r‖_Δ over the masked region.
pub fn relative_l2_error<G: CellGeometry + ?Sized>(
    geom: &G,
    field: &[f64],
    reference: &[f64],
    mask: Option<&BoxMask>,
) -> Result<f64, MeshError> {
    let diff: Vec<f64> = field.iter().zip(reference).map(|(f, r)| f - r).collect();
    let num = discrete_l2(geom, &diff, mask)?;
    let den = discrete_l2(geom, reference, mask)?;
    if den == 0.0 {
        return Err(MeshError::ZeroReference);
    }
    Ok(num / den)
}
