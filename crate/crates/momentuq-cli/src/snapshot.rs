//! Moment snapshots: a self-describing ASCII header followed by one line
//! per cell carrying the cell's measure, centroid and moment block.
//!
//! Floats are written in Rust's shortest round-trip representation, so
//! write → read → write is byte-stable and snapshot files can be compared
//! bit-exactly.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Context, Result};
use momentuq::mesh::{CellGeometry, Mesh1D, Mesh2D};
use momentuq::solver::MomentField;
use momentuq::nalgebra::DMatrix;
use sha2::{Digest, Sha256};

pub const FORMAT_TAG: &str = "momentuq-snapshot v1";

#[derive(Debug, Clone)]
pub struct Snapshot {
    pub method: String,
    /// Stochastic dimension p.
    pub dim: usize,
    /// Conserved variables m.
    pub m: usize,
    pub mesh_hash: String,
    /// Basis size (number of moments) per cell.
    pub basis_sizes: Vec<usize>,
    pub measures: Vec<f64>,
    pub centroids: Vec<[f64; 2]>,
    pub moments: MomentField,
}

/// Stable hash of the spatial discretization, so snapshots refuse to be
/// compared across meshes.
pub fn mesh_hash_1d(mesh: &Mesh1D) -> String {
    let text = format!("line {} {} {}", mesh.x_min(), mesh.x_max(), mesh.n_cells());
    hex_digest(&text)
}

pub fn mesh_hash_2d(mesh: &Mesh2D) -> String {
    hex_digest(&momentuq::mesh::write_mesh(mesh))
}

fn hex_digest(text: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(text.as_bytes());
    let digest = hasher.finalize();
    let mut out = String::with_capacity(16);
    for byte in digest.iter().take(8) {
        write!(out, "{byte:02x}").unwrap();
    }
    out
}

impl Snapshot {
    pub fn from_run(
        method: &str,
        dim: usize,
        moments: &MomentField,
        geometry: &dyn CellGeometry,
        mesh_hash: String,
    ) -> Self {
        let n_cells = moments.n_cells();
        let m = moments.cells[0].ncols();
        Self {
            method: method.to_string(),
            dim,
            m,
            mesh_hash,
            basis_sizes: moments.cells.iter().map(|c| c.nrows()).collect(),
            measures: (0..n_cells).map(|j| geometry.measure(j)).collect(),
            centroids: (0..n_cells).map(|j| geometry.centroid(j)).collect(),
            moments: moments.clone(),
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{FORMAT_TAG}").unwrap();
        writeln!(out, "method: {}", self.method).unwrap();
        writeln!(out, "p: {}", self.dim).unwrap();
        writeln!(out, "m: {}", self.m).unwrap();
        writeln!(out, "cells: {}", self.moments.n_cells()).unwrap();
        writeln!(out, "mesh_hash: {}", self.mesh_hash).unwrap();
        write!(out, "basis_sizes:").unwrap();
        for s in &self.basis_sizes {
            write!(out, " {s}").unwrap();
        }
        writeln!(out).unwrap();
        writeln!(out, "---").unwrap();
        for j in 0..self.moments.n_cells() {
            let u = &self.moments.cells[j];
            write!(
                out,
                "{} {} {}",
                self.measures[j], self.centroids[j][0], self.centroids[j][1]
            )
            .unwrap();
            for i in 0..u.nrows() {
                for a in 0..u.ncols() {
                    write!(out, " {}", u[(i, a)]).unwrap();
                }
            }
            writeln!(out).unwrap();
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text())
            .with_context(|| format!("writing snapshot {}", path.display()))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading snapshot {}", path.display()))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let tag = lines.next().unwrap_or_default();
        if tag != FORMAT_TAG {
            bail!("not a snapshot file (header '{tag}')");
        }
        let mut method = String::new();
        let mut dim = 0usize;
        let mut m = 0usize;
        let mut cells = 0usize;
        let mut mesh_hash = String::new();
        let mut basis_sizes = Vec::new();
        for line in lines.by_ref() {
            if line == "---" {
                break;
            }
            let (key, value) = line.split_once(':').context("malformed header line")?;
            let value = value.trim();
            match key.trim() {
                "method" => method = value.to_string(),
                "p" => dim = value.parse()?,
                "m" => m = value.parse()?,
                "cells" => cells = value.parse()?,
                "mesh_hash" => mesh_hash = value.to_string(),
                "basis_sizes" => {
                    basis_sizes =
                        value.split_whitespace().map(|t| t.parse()).collect::<Result<_, _>>()?
                }
                other => bail!("unknown header field '{other}'"),
            }
        }
        if basis_sizes.len() != cells {
            bail!("basis_sizes lists {} entries for {cells} cells", basis_sizes.len());
        }
        let mut measures = Vec::with_capacity(cells);
        let mut centroids = Vec::with_capacity(cells);
        let mut moment_cells = Vec::with_capacity(cells);
        for (j, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            if j >= cells {
                bail!("more cell lines than declared cells");
            }
            let values: Vec<f64> = line
                .split_whitespace()
                .map(|t| t.parse::<f64>())
                .collect::<Result<_, _>>()
                .with_context(|| format!("cell {j}"))?;
            let n = basis_sizes[j];
            if values.len() != 3 + n * m {
                bail!("cell {j}: expected {} values, found {}", 3 + n * m, values.len());
            }
            measures.push(values[0]);
            centroids.push([values[1], values[2]]);
            let mut mat = DMatrix::zeros(n, m);
            for i in 0..n {
                for a in 0..m {
                    mat[(i, a)] = values[3 + i * m + a];
                }
            }
            moment_cells.push(mat);
        }
        if moment_cells.len() != cells {
            bail!("expected {cells} cell lines, found {}", moment_cells.len());
        }
        Ok(Self {
            method,
            dim,
            m,
            mesh_hash,
            basis_sizes,
            measures,
            centroids,
            moments: MomentField { cells: moment_cells },
        })
    }

    /// Check two snapshots live on the same mesh and state space.
    pub fn compatible(&self, other: &Snapshot) -> Result<()> {
        if self.mesh_hash != other.mesh_hash {
            bail!(
                "incompatible snapshots: mesh hashes {} vs {}",
                self.mesh_hash,
                other.mesh_hash
            );
        }
        if self.m != other.m || self.dim != other.dim {
            bail!("incompatible snapshots: state layout differs");
        }
        Ok(())
    }

    /// Truncate every cell to at most `max_moments` rows (projection onto
    /// the leading graded basis block).
    pub fn truncate(&mut self, max_moments: usize) {
        for (size, cell) in self.basis_sizes.iter_mut().zip(&mut self.moments.cells) {
            if *size > max_moments {
                *cell = cell.rows(0, max_moments).into_owned();
                *size = max_moments;
            }
        }
    }
}

impl CellGeometry for Snapshot {
    fn n_cells(&self) -> usize {
        self.measures.len()
    }

    fn measure(&self, j: usize) -> f64 {
        self.measures[j]
    }

    fn centroid(&self, j: usize) -> [f64; 2] {
        self.centroids[j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Snapshot {
        let moments = MomentField {
            cells: vec![
                DMatrix::from_row_slice(2, 1, &[1.0, 0.25]),
                DMatrix::from_row_slice(3, 1, &[0.5, -0.125, 1e-17]),
            ],
        };
        Snapshot {
            method: "ipm".into(),
            dim: 1,
            m: 1,
            mesh_hash: "0011223344556677".into(),
            basis_sizes: vec![2, 3],
            measures: vec![0.5, 0.5],
            centroids: vec![[0.25, 0.0], [0.75, 0.0]],
            moments,
        }
    }

    #[test]
    fn round_trip_is_byte_stable() {
        let snap = sample();
        let text = snap.to_text();
        let back = Snapshot::parse(&text).unwrap();
        assert_eq!(text, back.to_text());
        for (a, b) in snap.moments.cells.iter().zip(&back.moments.cells) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn mesh_hash_mismatch_is_rejected() {
        let a = sample();
        let mut b = sample();
        b.mesh_hash = "ffff".into();
        assert!(a.compatible(&b).is_err());
        assert!(a.compatible(&sample()).is_ok());
    }

    #[test]
    fn truncation_keeps_leading_moments() {
        let mut snap = sample();
        snap.truncate(2);
        assert_eq!(snap.basis_sizes, vec![2, 2]);
        assert_eq!(snap.moments.cells[1].nrows(), 2);
        assert_eq!(snap.moments.cells[1][(0, 0)], 0.5);
        assert_eq!(snap.moments.cells[1][(1, 0)], -0.125);
    }
}
