//! Strang-split time integrator: half electric kick, exact cyclotron+drift
//! map, half electric kick.
//!
//! The rotation substep uses the closed-form characteristics, so the E = 0
//! dynamics is exact and all integration error lives in the kick/field
//! coupling.  The field is frozen within a step.

use crate::ensemble::ParticleEnsemble;
use crate::error::Result;
use crate::fields::{gather, VectorField};
use crate::kinematics::{flow, MagneticConfig, PhasePoint};

/// Advance the ensemble by one step of size `dt` under the frozen field `e`.
pub fn step(
    ens: &mut ParticleEnsemble,
    e: &VectorField,
    dt: f64,
    mag: &MagneticConfig,
) -> Result<()> {
    let half = 0.5 * dt;
    for i in 0..ens.len() {
        let kick1 = gather(e, ens.positions[i], i)?;
        let v = ens.velocities[i] + kick1 * half;
        let moved = flow(0.0, dt, PhasePoint::new(ens.positions[i], v), mag);
        let kick2 = gather(e, moved.x, i)?;
        ens.positions[i] = moved.x;
        ens.velocities[i] = moved.v + kick2 * half;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{GridSpec, VectorField};
    use crate::vec3::Vec3;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use std::f64::consts::PI;

    fn grid() -> GridSpec {
        GridSpec::centered_cube(40.0, 16).unwrap()
    }

    fn one_particle(x: Vec3, v: Vec3) -> ParticleEnsemble {
        ParticleEnsemble::from_parts(vec![x], vec![v], vec![1.0])
    }

    #[test]
    fn zero_field_step_is_exact_flow() {
        let e = VectorField::zeros(grid());
        let mag = MagneticConfig::new(0.9).unwrap();
        let x = Vec3::new(0.5, -0.25, 1.0);
        let v = Vec3::new(1.0, 2.0, -0.5);
        let mut ens = one_particle(x, v);
        let dt = 0.7;
        step(&mut ens, &e, dt, &mag).unwrap();
        let exact = flow(0.0, dt, PhasePoint::new(x, v), &mag);
        assert_abs_diff_eq!(ens.positions[0].x, exact.x.x, epsilon = 1e-14);
        assert_abs_diff_eq!(ens.positions[0].y, exact.x.y, epsilon = 1e-14);
        assert_abs_diff_eq!(ens.positions[0].z, exact.x.z, epsilon = 1e-14);
        assert_abs_diff_eq!(ens.velocities[0].x, exact.v.x, epsilon = 1e-14);
    }

    #[test]
    fn unmagnetized_constant_field_leapfrog_algebra() {
        let e0 = Vec3::new(0.3, -0.1, 0.2);
        let e = VectorField::from_fn(grid(), |_| e0);
        let mag = MagneticConfig::unmagnetized();
        let x = Vec3::new(0.0, 0.0, 0.0);
        let v = Vec3::new(0.5, 0.0, -0.2);
        let mut ens = one_particle(x, v);
        let dt = 0.25;
        step(&mut ens, &e, dt, &mag).unwrap();
        // v gains exactly dt E; x advances by dt (v + (dt/2) E)
        assert_relative_eq!(ens.velocities[0].x, v.x + dt * e0.x, max_relative = 1e-13);
        assert_relative_eq!(ens.velocities[0].y, v.y + dt * e0.y, max_relative = 1e-13);
        assert_relative_eq!(ens.positions[0].x, x.x + dt * (v.x + 0.5 * dt * e0.x), max_relative = 1e-13);
        assert_relative_eq!(ens.positions[0].z, x.z + dt * (v.z + 0.5 * dt * e0.z), max_relative = 1e-13);
    }

    #[test]
    fn full_gyro_orbit_returns_velocity() {
        let e = VectorField::zeros(grid());
        let mag = MagneticConfig::new(1.0).unwrap();
        let x = Vec3::new(1.0, 2.0, 0.0);
        let v = Vec3::new(0.7, -0.3, 0.4);
        let mut ens = one_particle(x, v);
        let dt = 2.0 * PI;
        step(&mut ens, &e, dt, &mag).unwrap();
        assert_abs_diff_eq!(ens.velocities[0].x, v.x, epsilon = 1e-12);
        assert_abs_diff_eq!(ens.velocities[0].y, v.y, epsilon = 1e-12);
        assert_abs_diff_eq!(ens.velocities[0].z, v.z, epsilon = 1e-12);
        assert_abs_diff_eq!(ens.positions[0].x, x.x, epsilon = 1e-12);
        assert_abs_diff_eq!(ens.positions[0].y, x.y, epsilon = 1e-12);
        assert_abs_diff_eq!(ens.positions[0].z, x.z + 2.0 * PI * v.z, epsilon = 1e-12);
    }

    #[test]
    fn axial_momentum_conserved_without_axial_field() {
        let e = VectorField::from_fn(grid(), |x| Vec3::new(0.1 * x.y, -0.2 * x.x, 0.0));
        let mag = MagneticConfig::new(2.0).unwrap();
        let mut ens = ParticleEnsemble::from_parts(
            vec![Vec3::new(1.0, 0.0, 0.0), Vec3::new(-1.0, 0.5, 2.0)],
            vec![Vec3::new(0.1, 0.2, 0.3), Vec3::new(-0.4, 0.0, 1.1)],
            vec![0.5, 1.5],
        );
        let before = ens.axial_momentum();
        for _ in 0..50 {
            step(&mut ens, &e, 0.05, &mag).unwrap();
        }
        assert_abs_diff_eq!(ens.axial_momentum(), before, epsilon = 1e-13);
    }

    #[test]
    fn one_step_map_preserves_phase_space_volume() {
        // finite-difference 6x6 Jacobian determinant of the frozen-field map
        let e = VectorField::from_fn(grid(), |x| {
            Vec3::new(0.2 * (x.x * 0.2).sin(), -0.1 * x.z, 0.15 * (x.y * 0.3).cos())
        });
        let mag = MagneticConfig::new(1.3).unwrap();
        let dt = 0.2;
        let base = [0.4f64, -0.3, 0.9, 0.6, -0.2, 0.5];
        let eps = 1e-5;
        let map = |z: [f64; 6]| -> [f64; 6] {
            let mut ens = one_particle(
                Vec3::new(z[0], z[1], z[2]),
                Vec3::new(z[3], z[4], z[5]),
            );
            step(&mut ens, &e, dt, &mag).unwrap();
            let (p, v) = (ens.positions[0], ens.velocities[0]);
            [p.x, p.y, p.z, v.x, v.y, v.z]
        };
        let mut jac = [[0.0f64; 6]; 6];
        for col in 0..6 {
            let mut zp = base;
            let mut zm = base;
            zp[col] += eps;
            zm[col] -= eps;
            let (fp, fm) = (map(zp), map(zm));
            for row in 0..6 {
                jac[row][col] = (fp[row] - fm[row]) / (2.0 * eps);
            }
        }
        let det = crate::harness::det6(&jac);
        assert_abs_diff_eq!(det, 1.0, epsilon = 1e-8);
    }
}
