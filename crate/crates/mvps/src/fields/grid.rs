//! Uniform Cartesian mesh and cell-centered fields.

use serde::{Deserialize, Serialize};

use crate::error::{MvpsError, Result};
use crate::vec3::Vec3;

/// Uniform Cartesian grid; values live at cell centers
/// origin + (i + 1/2) h per axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub origin: Vec3,
    pub extent: Vec3,
    pub cells: [usize; 3],
}

impl GridSpec {
    pub fn new(origin: Vec3, extent: Vec3, cells: [usize; 3]) -> Result<Self> {
        if cells.iter().any(|&c| c < 2) {
            return Err(MvpsError::Config(format!(
                "grid needs at least 2 cells per axis, got {cells:?}"
            )));
        }
        if !(extent.x > 0.0 && extent.y > 0.0 && extent.z > 0.0) {
            return Err(MvpsError::Config("grid extent must be positive".into()));
        }
        Ok(GridSpec { origin, extent, cells })
    }

    /// Cube grid centered on the origin.
    pub fn centered_cube(side: f64, n: usize) -> Result<Self> {
        let half = side / 2.0;
        GridSpec::new(
            Vec3::new(-half, -half, -half),
            Vec3::new(side, side, side),
            [n, n, n],
        )
    }

    pub fn spacing(&self) -> Vec3 {
        Vec3::new(
            self.extent.x / self.cells[0] as f64,
            self.extent.y / self.cells[1] as f64,
            self.extent.z / self.cells[2] as f64,
        )
    }

    pub fn cell_volume(&self) -> f64 {
        let h = self.spacing();
        h.x * h.y * h.z
    }

    pub fn len(&self) -> usize {
        self.cells[0] * self.cells[1] * self.cells[2]
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.cells[1] + j) * self.cells[2] + k
    }

    /// Center of cell (i, j, k).
    pub fn cell_center(&self, i: usize, j: usize, k: usize) -> Vec3 {
        let h = self.spacing();
        Vec3::new(
            self.origin.x + (i as f64 + 0.5) * h.x,
            self.origin.y + (j as f64 + 0.5) * h.y,
            self.origin.z + (k as f64 + 0.5) * h.z,
        )
    }
}

/// Cell-centered scalar field (density units for rho).
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub grid: GridSpec,
    pub values: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(grid: GridSpec) -> Self {
        ScalarField { grid, values: vec![0.0; grid.len()] }
    }

    /// Sample an analytic profile at every cell center.
    pub fn from_fn(grid: GridSpec, f: impl Fn(Vec3) -> f64) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for i in 0..grid.cells[0] {
            for j in 0..grid.cells[1] {
                for k in 0..grid.cells[2] {
                    values.push(f(grid.cell_center(i, j, k)));
                }
            }
        }
        ScalarField { grid, values }
    }

    /// Integral over the domain (sum of cell values times cell volume).
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.cell_volume()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// Cell-centered 3-vector field (the electric field E).
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    pub grid: GridSpec,
    pub values: Vec<Vec3>,
}

impl VectorField {
    pub fn zeros(grid: GridSpec) -> Self {
        VectorField { grid, values: vec![Vec3::ZERO; grid.len()] }
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn(Vec3) -> Vec3) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for i in 0..grid.cells[0] {
            for j in 0..grid.cells[1] {
                for k in 0..grid.cells[2] {
                    values.push(f(grid.cell_center(i, j, k)));
                }
            }
        }
        VectorField { grid, values }
    }

    /// Largest |E| over the grid.
    pub fn max_norm(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.norm()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_degenerate_grids() {
        assert!(GridSpec::new(Vec3::ZERO, Vec3::new(1.0, 1.0, 1.0), [1, 4, 4]).is_err());
        assert!(GridSpec::new(Vec3::ZERO, Vec3::new(0.0, 1.0, 1.0), [4, 4, 4]).is_err());
    }

    #[test]
    fn cell_centers_and_volume() {
        let g = GridSpec::centered_cube(2.0, 4).unwrap();
        let h = g.spacing();
        assert_eq!(h, Vec3::new(0.5, 0.5, 0.5));
        assert_eq!(g.cell_volume(), 0.125);
        let c = g.cell_center(0, 0, 0);
        assert_eq!(c, Vec3::new(-0.75, -0.75, -0.75));
        let c = g.cell_center(3, 3, 3);
        assert_eq!(c, Vec3::new(0.75, 0.75, 0.75));
    }
}
