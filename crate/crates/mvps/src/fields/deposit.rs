//! Cloud-in-cell (trilinear) particle-grid transfer.
//!
//! Deposition and field gather use the same trilinear weights, which makes
//! the pair adjoint and removes the leading-order self-force.

use crate::ensemble::ParticleEnsemble;
use crate::error::{MvpsError, Result};
use crate::fields::{GridSpec, ScalarField, VectorField};
use crate::vec3::Vec3;

/// Trilinear stencil for one position: base cell index and weights per axis.
struct Stencil {
    base: [usize; 3],
    w: [[f64; 2]; 3],
}

fn stencil(grid: &GridSpec, p: Vec3, index: usize) -> Result<Stencil> {
    let h = grid.spacing();
    let mut base = [0usize; 3];
    let mut w = [[0.0; 2]; 3];
    for axis in 0..3 {
        // fractional cell-center coordinate
        let u = (p[axis] - grid.origin[axis]) / h[axis] - 0.5;
        let fl = u.floor();
        let b = fl as isize;
        if !u.is_finite() || b < 0 || b as usize + 1 > grid.cells[axis] - 1 {
            return Err(MvpsError::OutOfDomain { index, x: p.x, y: p.y, z: p.z });
        }
        let frac = u - fl;
        base[axis] = b as usize;
        w[axis] = [1.0 - frac, frac];
    }
    Ok(Stencil { base, w })
}

/// Deposit particle weights onto the grid as a number density.
///
/// The integral of the result equals the total particle weight exactly up to
/// rounding (partition of unity of the trilinear weights).
pub fn deposit_density(ensemble: &ParticleEnsemble, grid: &GridSpec) -> Result<ScalarField> {
    let mut field = ScalarField::zeros(*grid);
    let inv_vol = 1.0 / grid.cell_volume();
    for (idx, (p, w)) in ensemble
        .positions
        .iter()
        .zip(ensemble.weights.iter())
        .enumerate()
    {
        let st = stencil(grid, *p, idx)?;
        let amount = w * inv_vol;
        for di in 0..2 {
            for dj in 0..2 {
                for dk in 0..2 {
                    let weight = st.w[0][di] * st.w[1][dj] * st.w[2][dk];
                    let cell =
                        grid.index(st.base[0] + di, st.base[1] + dj, st.base[2] + dk);
                    field.values[cell] += amount * weight;
                }
            }
        }
    }
    Ok(field)
}

/// Deposit arbitrary per-particle vector weights (no 1/h^3 density scaling is
/// implied beyond the usual cell-volume normalization).
pub fn deposit_vector(
    positions: &[Vec3],
    weights: &[Vec3],
    grid: &GridSpec,
) -> Result<VectorField> {
    let mut field = VectorField::zeros(*grid);
    let inv_vol = 1.0 / grid.cell_volume();
    for (idx, (p, w)) in positions.iter().zip(weights.iter()).enumerate() {
        let st = stencil(grid, *p, idx)?;
        for di in 0..2 {
            for dj in 0..2 {
                for dk in 0..2 {
                    let weight = st.w[0][di] * st.w[1][dj] * st.w[2][dk] * inv_vol;
                    let cell =
                        grid.index(st.base[0] + di, st.base[1] + dj, st.base[2] + dk);
                    field.values[cell] += *w * weight;
                }
            }
        }
    }
    Ok(field)
}

/// Interpolate a vector field at a particle position with the same trilinear
/// weights used for deposition.
pub fn gather(field: &VectorField, p: Vec3, index: usize) -> Result<Vec3> {
    let st = stencil(&field.grid, p, index)?;
    let mut out = Vec3::ZERO;
    for di in 0..2 {
        for dj in 0..2 {
            for dk in 0..2 {
                let weight = st.w[0][di] * st.w[1][dj] * st.w[2][dk];
                let cell = field
                    .grid
                    .index(st.base[0] + di, st.base[1] + dj, st.base[2] + dk);
                out += field.values[cell] * weight;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::ParticleEnsemble;
    use approx::assert_relative_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn grid() -> GridSpec {
        GridSpec::centered_cube(2.0, 8).unwrap()
    }

    #[test]
    fn single_particle_at_cell_center() {
        let g = grid();
        let c = g.cell_center(3, 4, 2);
        let ens = ParticleEnsemble::from_parts(vec![c], vec![Vec3::ZERO], vec![1.0]);
        let rho = deposit_density(&ens, &g).unwrap();
        let h3 = g.cell_volume();
        for (idx, v) in rho.values.iter().enumerate() {
            if idx == g.index(3, 4, 2) {
                assert_relative_eq!(*v, 1.0 / h3, max_relative = 1e-12);
            } else {
                assert_eq!(*v, 0.0);
            }
        }
    }

    #[test]
    fn midway_split_along_axis() {
        let g = grid();
        let a = g.cell_center(3, 4, 2);
        let b = g.cell_center(4, 4, 2);
        let mid = (a + b) * 0.5;
        let ens = ParticleEnsemble::from_parts(vec![mid], vec![Vec3::ZERO], vec![1.0]);
        let rho = deposit_density(&ens, &g).unwrap();
        let h3 = g.cell_volume();
        assert_relative_eq!(rho.values[g.index(3, 4, 2)], 0.5 / h3, max_relative = 1e-12);
        assert_relative_eq!(rho.values[g.index(4, 4, 2)], 0.5 / h3, max_relative = 1e-12);
    }

    #[test]
    fn charge_conservation_random_ensemble() {
        let g = grid();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 100;
        let mut pos = Vec::new();
        let mut wts = Vec::new();
        for _ in 0..n {
            pos.push(Vec3::new(
                rng.gen_range(-0.7..0.7),
                rng.gen_range(-0.7..0.7),
                rng.gen_range(-0.7..0.7),
            ));
            wts.push(rng.gen_range(0.0..2.0));
        }
        let total: f64 = wts.iter().sum();
        let ens = ParticleEnsemble::from_parts(pos, vec![Vec3::ZERO; n], wts);
        let rho = deposit_density(&ens, &g).unwrap();
        assert_relative_eq!(rho.integral(), total, max_relative = 1e-12);
        assert!(rho.values.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn out_of_domain_reports_index_and_position() {
        let g = grid();
        let ens = ParticleEnsemble::from_parts(
            vec![Vec3::new(0.0, 0.0, 0.0), Vec3::new(0.99, 0.0, 0.0)],
            vec![Vec3::ZERO; 2],
            vec![1.0; 2],
        );
        match deposit_density(&ens, &g) {
            Err(MvpsError::OutOfDomain { index, x, .. }) => {
                assert_eq!(index, 1);
                assert_eq!(x, 0.99);
            }
            other => panic!("expected OutOfDomain, got {other:?}"),
        }
    }

    #[test]
    fn gather_is_adjoint_of_deposit() {
        // <deposit(w at p), F> over cells * h^3 == w * gather(F, p)
        let g = grid();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = VectorField::from_fn(g, |x| Vec3::new(x.x * x.y, x.z, 1.0 - x.x));
        for _ in 0..20 {
            let p = Vec3::new(
                rng.gen_range(-0.7..0.7),
                rng.gen_range(-0.7..0.7),
                rng.gen_range(-0.7..0.7),
            );
            let ens = ParticleEnsemble::from_parts(vec![p], vec![Vec3::ZERO], vec![1.3]);
            let rho = deposit_density(&ens, &g).unwrap();
            let pairing: f64 = rho
                .values
                .iter()
                .zip(f.values.iter())
                .map(|(r, v)| r * v.x)
                .sum::<f64>()
                * g.cell_volume();
            let gathered = gather(&f, p, 0).unwrap();
            assert_relative_eq!(pairing, 1.3 * gathered.x, max_relative = 1e-12);
        }
    }
}
