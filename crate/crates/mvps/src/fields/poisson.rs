//! Free-space Poisson field solve E = -(grad K3) * rho by Hockney-Eastwood
//! domain doubling.
//!
//! The grid is zero-padded to twice its size per axis and the discrete
//! convolution with the Coulomb kernel gradient x/(4 pi |x|^3) is evaluated
//! with FFTs, so the boundary condition is the whole-space Newtonian field
//! with 1/|x|^2 far-field decay.  The kernel is mollified by assigning the
//! self-cell its cell-averaged value, which is zero by oddness.

use rustfft::num_complex::Complex;

use crate::error::{MvpsError, Result};
use crate::fields::fft::{C64, Fft3};
use crate::fields::{GridSpec, ScalarField, VectorField};

/// Default budget for the doubled-domain work arrays (bytes).
pub const DEFAULT_MEMORY_BUDGET: usize = 4 << 30;

pub struct PoissonSolver {
    grid: GridSpec,
    fft: Fft3,
    /// Spectra of the three kernel components on the doubled grid.
    kernel_hat: [Vec<C64>; 3],
}

impl PoissonSolver {
    pub fn new(grid: GridSpec) -> Result<Self> {
        Self::with_budget(grid, DEFAULT_MEMORY_BUDGET)
    }

    pub fn with_budget(grid: GridSpec, budget_bytes: usize) -> Result<Self> {
        let doubled = [2 * grid.cells[0], 2 * grid.cells[1], 2 * grid.cells[2]];
        let cells = doubled[0] * doubled[1] * doubled[2];
        // kernel spectra (3) plus one work array, 16 bytes per complex cell
        let needed = cells.saturating_mul(16).saturating_mul(4);
        if needed > budget_bytes {
            return Err(MvpsError::GridTooSmall { cells, budget_bytes });
        }
        let fft = Fft3::new(doubled);
        let h = grid.spacing();
        let mut kernel_hat: [Vec<C64>; 3] = [Vec::new(), Vec::new(), Vec::new()];
        for (comp, slot) in kernel_hat.iter_mut().enumerate() {
            let mut k = vec![C64::default(); cells];
            for i in 0..doubled[0] {
                let dx = wrap_offset(i, doubled[0]) * h.x;
                for j in 0..doubled[1] {
                    let dy = wrap_offset(j, doubled[1]) * h.y;
                    for kk in 0..doubled[2] {
                        let dz = wrap_offset(kk, doubled[2]) * h.z;
                        let r2 = dx * dx + dy * dy + dz * dz;
                        let val = if r2 == 0.0 {
                            0.0
                        } else {
                            let d = [dx, dy, dz][comp];
                            d / (4.0 * std::f64::consts::PI * r2 * r2.sqrt())
                        };
                        k[(i * doubled[1] + j) * doubled[2] + kk] = Complex::new(val, 0.0);
                    }
                }
            }
            fft.forward(&mut k);
            *slot = k;
        }
        Ok(PoissonSolver { grid, fft, kernel_hat })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// Solve for the self-consistent field of the given charge density.
    pub fn solve(&self, rho: &ScalarField) -> Result<VectorField> {
        if rho.grid != self.grid {
            return Err(MvpsError::Config("density grid does not match solver grid".into()));
        }
        let [n0, n1, n2] = self.grid.cells;
        let d = self.fft.dims();
        let h3 = self.grid.cell_volume();

        let mut rho_hat = vec![C64::default(); self.fft.len()];
        for i in 0..n0 {
            for j in 0..n1 {
                for k in 0..n2 {
                    rho_hat[(i * d[1] + j) * d[2] + k] =
                        Complex::new(rho.values[self.grid.index(i, j, k)], 0.0);
                }
            }
        }
        self.fft.forward(&mut rho_hat);

        let mut field = VectorField::zeros(self.grid);
        let mut work = vec![C64::default(); self.fft.len()];
        for comp in 0..3 {
            for ((w, r), g) in work
                .iter_mut()
                .zip(rho_hat.iter())
                .zip(self.kernel_hat[comp].iter())
            {
                *w = r * g * h3;
            }
            self.fft.inverse(&mut work);
            for i in 0..n0 {
                for j in 0..n1 {
                    for k in 0..n2 {
                        let v = work[(i * d[1] + j) * d[2] + k].re;
                        let cell = self.grid.index(i, j, k);
                        match comp {
                            0 => field.values[cell].x = v,
                            1 => field.values[cell].y = v,
                            _ => field.values[cell].z = v,
                        }
                    }
                }
            }
        }
        Ok(field)
    }
}

/// Signed displacement (in cells) for a periodic index on the doubled grid.
fn wrap_offset(i: usize, n: usize) -> f64 {
    if i <= n / 2 {
        i as f64
    } else {
        i as f64 - n as f64
    }
}

/// One-shot convenience wrapper; building the solver dominates, so reuse a
/// `PoissonSolver` inside loops.
pub fn solve_field(rho: &ScalarField) -> Result<VectorField> {
    PoissonSolver::new(rho.grid)?.solve(rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn zero_density_gives_zero_field() {
        let g = GridSpec::centered_cube(2.0, 8).unwrap();
        let rho = ScalarField::zeros(g);
        let e = solve_field(&rho).unwrap();
        assert!(e.max_norm() < 1e-14);
    }

    #[test]
    fn point_charge_coulomb_field() {
        let n = 16;
        let g = GridSpec::centered_cube(2.0, n).unwrap();
        let h = g.spacing().x;
        // unit charge in the cell nearest the origin
        let mut rho = ScalarField::zeros(g);
        let c = n / 2; // cell center at +h/2 per axis
        rho.values[g.index(c, c, c)] = 1.0 / g.cell_volume();
        let center = g.cell_center(c, c, c);
        let e = solve_field(&rho).unwrap();
        let mut checked = 0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let x = g.cell_center(i, j, k) - center;
                    let r = x.norm();
                    if r >= 4.0 * h && r < 0.8 {
                        let expected = 1.0 / (4.0 * std::f64::consts::PI * r * r);
                        let got = e.values[g.index(i, j, k)].norm();
                        assert_relative_eq!(got, expected, max_relative = 0.05);
                        checked += 1;
                    }
                }
            }
        }
        assert!(checked > 100);
    }

    #[test]
    fn solver_is_linear() {
        let g = GridSpec::centered_cube(2.0, 8).unwrap();
        let rho1 = ScalarField::from_fn(g, |x| (-x.norm_sq() * 8.0).exp());
        let rho2 = ScalarField::from_fn(g, |x| x.x * (-x.norm_sq() * 4.0).exp());
        let solver = PoissonSolver::new(g).unwrap();
        let e1 = solver.solve(&rho1).unwrap();
        let e2 = solver.solve(&rho2).unwrap();
        let combo = ScalarField {
            grid: g,
            values: rho1
                .values
                .iter()
                .zip(rho2.values.iter())
                .map(|(a, b)| 2.0 * a - 0.5 * b)
                .collect(),
        };
        let ec = solver.solve(&combo).unwrap();
        let scale = e1.max_norm();
        for idx in 0..ec.values.len() {
            let expect = e1.values[idx] * 2.0 + e2.values[idx] * -0.5;
            let diff = (ec.values[idx] - expect).norm();
            assert!(diff <= 1e-12 * scale, "linearity violated: {diff}");
        }
    }

    #[test]
    fn memory_budget_enforced() {
        let g = GridSpec::centered_cube(2.0, 64).unwrap();
        assert!(matches!(
            PoissonSolver::with_budget(g, 1 << 20),
            Err(MvpsError::GridTooSmall { .. })
        ));
    }
}
