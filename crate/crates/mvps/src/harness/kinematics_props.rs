//! Property suite for the closed-form characteristics: comparison against an
//! independent adaptive Runge-Kutta integration of x' = v, v' = v x B, plus
//! the algebraic identities (group law, volume preservation, speed
//! invariance, the two change-of-variables identities, and the Jacobian
//! formula) on random samples.

use crate::error::Result;
use crate::harness::det6;
use crate::harness::report::EstimateReport;
use crate::kinematics::{
    flow, jacobian_psi_abs, kernel_d, kernel_h, rotate_velocity, xstar, MagneticConfig, PhasePoint,
};
use crate::vec3::Vec3;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

/// One adaptive RKF45 (Fehlberg) solve of the magnetized free motion from
/// time t to time s.  Deliberately ignores the closed form: the right-hand
/// side is just the Lorentz rotation term.
pub fn rk45_flow(t: f64, s: f64, p: PhasePoint, omega: f64, tol: f64) -> PhasePoint {
    let rhs = |y: &[f64; 6]| -> [f64; 6] {
        // v x B with B = (0, 0, omega)
        [
            y[3],
            y[4],
            y[5],
            omega * y[4],
            -omega * y[3],
            0.0,
        ]
    };
    let mut y = [p.x.x, p.x.y, p.x.z, p.v.x, p.v.y, p.v.z];
    let total = s - t;
    if total == 0.0 {
        return p;
    }
    let dir = total.signum();
    let mut remaining = total.abs();
    let mut h = (remaining / 10.0).min(0.1);
    // Fehlberg coefficients
    const A: [[f64; 5]; 5] = [
        [1.0 / 4.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 32.0, 9.0 / 32.0, 0.0, 0.0, 0.0],
        [1932.0 / 2197.0, -7200.0 / 2197.0, 7296.0 / 2197.0, 0.0, 0.0],
        [439.0 / 216.0, -8.0, 3680.0 / 513.0, -845.0 / 4104.0, 0.0],
        [-8.0 / 27.0, 2.0, -3544.0 / 2565.0, 1859.0 / 4104.0, -11.0 / 40.0],
    ];
    const B5: [f64; 6] = [
        16.0 / 135.0,
        0.0,
        6656.0 / 12825.0,
        28561.0 / 56430.0,
        -9.0 / 50.0,
        2.0 / 55.0,
    ];
    const B4: [f64; 6] = [
        25.0 / 216.0,
        0.0,
        1408.0 / 2565.0,
        2197.0 / 4104.0,
        -1.0 / 5.0,
        0.0,
    ];
    while remaining > 1e-300 {
        let step = h.min(remaining) * dir;
        let mut k = [[0.0f64; 6]; 6];
        k[0] = rhs(&y);
        for stage in 1..6 {
            let mut yy = y;
            for (j, row) in A[stage - 1].iter().enumerate().take(stage) {
                for c in 0..6 {
                    yy[c] += step * row * k[j][c];
                }
            }
            k[stage] = rhs(&yy);
        }
        let mut y5 = y;
        let mut y4 = y;
        for c in 0..6 {
            for stage in 0..6 {
                y5[c] += step * B5[stage] * k[stage][c];
                y4[c] += step * B4[stage] * k[stage][c];
            }
        }
        let err: f64 = (0..6)
            .map(|c| (y5[c] - y4[c]).abs())
            .fold(0.0, f64::max);
        if err <= tol || h < 1e-12 {
            y = y5;
            remaining -= step.abs();
        }
        let scale = if err > 0.0 {
            0.9 * (tol / err).powf(0.2)
        } else {
            2.0
        };
        h = (h * scale.clamp(0.2, 2.0)).min(0.25);
    }
    PhasePoint::new(Vec3::new(y[0], y[1], y[2]), Vec3::new(y[3], y[4], y[5]))
}

fn random_point(rng: &mut impl Rng) -> PhasePoint {
    let mut coord = || rng.gen_range(-3.0..3.0);
    PhasePoint::new(
        Vec3::new(coord(), coord(), coord()),
        Vec3::new(coord(), coord(), coord()),
    )
}

/// Max relative error of the closed-form flow against the RKF45 oracle over
/// one gyro-period per sample.
pub fn verify_flow_against_ode(samples: usize, seed: u64) -> Result<EstimateReport> {
    let mut report = EstimateReport::new("flow vs adaptive ODE oracle");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let omega = *[0.1, 1.0, 10.0].get(rng.gen_range(0..3)).unwrap();
        let mag = MagneticConfig::new(omega)?;
        let p = random_point(&mut rng);
        let s = 2.0 * PI / omega; // one gyro-period
        let exact = flow(0.0, s, p, &mag);
        let ode = rk45_flow(0.0, s, p, omega, 1e-13);
        let scale = p.x.norm().max(p.v.norm()).max(1.0) * (1.0 + s);
        let err = (exact.x - ode.x).norm().max((exact.v - ode.v).norm()) / scale;
        worst = worst.max(err);
    }
    report.record("samples", samples as f64);
    report.check_le("max_relative_error", worst, 1e-9);
    Ok(report)
}

/// Group law, volume preservation, speed invariance, the X/X* identity and
/// the H/D identity on random samples.
pub fn verify_flow_identities(samples: usize, seed: u64) -> Result<EstimateReport> {
    let mut report = EstimateReport::new("flow identities");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut group = 0.0f64;
    let mut volume = 0.0f64;
    let mut speed = 0.0f64;
    let mut xstar_dev = 0.0f64;
    let mut hd_dev = 0.0f64;
    for _ in 0..samples {
        let omega = rng.gen_range(0.0..4.0);
        let mag = MagneticConfig::new(omega)?;
        let p = random_point(&mut rng);
        let (t, s1, s2) = (
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
        );

        // group law
        let direct = flow(t, s2, p, &mag);
        let via = flow(s1, s2, flow(t, s1, p, &mag), &mag);
        let scale = direct.x.norm().max(direct.v.norm()).max(1.0);
        group = group.max(
            (direct.x - via.x).norm().max((direct.v - via.v).norm()) / scale,
        );

        // speed invariance
        speed = speed.max((direct.v.norm() - p.v.norm()).abs() / p.v.norm().max(1e-12));

        // 6x6 finite-difference volume preservation
        let eps = 1e-6;
        let base = [p.x.x, p.x.y, p.x.z, p.v.x, p.v.y, p.v.z];
        let map = |z: [f64; 6]| {
            let out = flow(
                t,
                s1,
                PhasePoint::new(Vec3::new(z[0], z[1], z[2]), Vec3::new(z[3], z[4], z[5])),
                &mag,
            );
            [out.x.x, out.x.y, out.x.z, out.v.x, out.v.y, out.v.z]
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
        volume = volume.max((det6(&jac) - 1.0).abs());

        // X(s; t, x, v) = X*(t - s, x, rotate_velocity(s, t, v)) for 0 <= s <= t
        let (tt, ss) = {
            let a: f64 = rng.gen_range(0.0..2.0);
            let b: f64 = rng.gen_range(0.0..2.0);
            (a.max(b), a.min(b))
        };
        let fwd = flow(tt, ss, p, &mag);
        let alt = xstar(tt - ss, p.x, rotate_velocity(ss, tt, p.v, &mag), &mag);
        xstar_dev = xstar_dev.max((fwd.x - alt).norm() / fwd.x.norm().max(1.0));

        // D(t, s, e) agrees with H evaluated at the shifted time argument
        let e = Vec3::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        let d = kernel_d(tt, ss, e, &mag);
        let h = kernel_h(tt, tt - ss, e, &mag);
        hd_dev = hd_dev.max((d - h).norm());
    }
    report.record("samples", samples as f64);
    report.check_le("group_law", group, 1e-12);
    report.check_le("volume_preservation", volume, 1e-8);
    report.check_le("speed_invariance", speed, 1e-12);
    report.check_le("xstar_identity", xstar_dev, 1e-12);
    report.check_le("hd_identity", hd_dev, 1e-14);
    Ok(report)
}

/// |det| of the finite-difference 3x3 Jacobian of v -> X*(s, x, v) against
/// the closed form 2 s (1 - cos omega s)/omega^2, away from singular times.
pub fn verify_jacobian_formula(samples: usize, seed: u64) -> Result<EstimateReport> {
    let mut report = EstimateReport::new("jacobian formula");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let omega = rng.gen_range(0.3..3.0);
        let mag = MagneticConfig::new(omega)?;
        let us = rng.gen_range(0.01..(2.0 * PI - 0.01));
        let s = us / omega;
        let p = random_point(&mut rng);
        let eps = 1e-5;
        let mut jac = [[0.0f64; 3]; 3];
        for col in 0..3 {
            let mut vp = [p.v.x, p.v.y, p.v.z];
            let mut vm = vp;
            vp[col] += eps;
            vm[col] -= eps;
            let xp = xstar(s, p.x, Vec3::new(vp[0], vp[1], vp[2]), &mag);
            let xm = xstar(s, p.x, Vec3::new(vm[0], vm[1], vm[2]), &mag);
            for row in 0..3 {
                jac[row][col] = (xp[row] - xm[row]) / (2.0 * eps);
            }
        }
        let det = (jac[0][0] * (jac[1][1] * jac[2][2] - jac[1][2] * jac[2][1])
            - jac[0][1] * (jac[1][0] * jac[2][2] - jac[1][2] * jac[2][0])
            + jac[0][2] * (jac[1][0] * jac[2][1] - jac[1][1] * jac[2][0]))
            .abs();
        let formula = jacobian_psi_abs(s, &mag)?;
        worst = worst.max((det - formula).abs() / formula);
    }
    report.record("samples", samples as f64);
    report.check_le("max_relative_error", worst, 1e-5);
    Ok(report)
}

/// The omega -> 0 branches agree with tiny positive omega.
pub fn verify_zero_field_continuity(samples: usize, seed: u64) -> Result<EstimateReport> {
    let mut report = EstimateReport::new("omega -> 0 continuity");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tiny = MagneticConfig::new(1e-8)?;
    let zero = MagneticConfig::unmagnetized();
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let p = random_point(&mut rng);
        let (t, s) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let a = flow(t, s, p, &tiny);
        let b = flow(t, s, p, &zero);
        let scale = b.x.norm().max(b.v.norm()).max(1.0);
        worst = worst.max((a.x - b.x).norm().max((a.v - b.v).norm()) / scale);
        let dur = rng.gen_range(0.01..2.0);
        let ja = jacobian_psi_abs(dur, &tiny)?;
        let jb = jacobian_psi_abs(dur, &zero)?;
        worst = worst.max((ja - jb).abs() / jb);
    }
    report.record("samples", samples as f64);
    report.check_le("max_relative_deviation", worst, 1e-6);
    Ok(report)
}

/// The whole kinematics suite, as run by the command-line verifier.
pub fn verify_kinematics(samples: usize, seed: u64) -> Result<EstimateReport> {
    let mut report = EstimateReport::new("kinematics");
    report.merge(verify_flow_against_ode(samples.min(200), seed)?);
    report.merge(verify_flow_identities(samples, seed.wrapping_add(1))?);
    report.merge(verify_jacobian_formula(samples.min(200), seed.wrapping_add(2))?);
    report.merge(verify_zero_field_continuity(samples, seed.wrapping_add(3))?);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ode_oracle_matches_closed_form_on_one_orbit() {
        let mag = MagneticConfig::new(1.0).unwrap();
        let p = PhasePoint::new(Vec3::new(1.0, -0.5, 0.2), Vec3::new(0.3, 1.1, -0.7));
        let exact = flow(0.0, 2.0 * PI, p, &mag);
        let ode = rk45_flow(0.0, 2.0 * PI, p, 1.0, 1e-13);
        assert!((exact.x - ode.x).norm() < 1e-10);
        assert!((exact.v - ode.v).norm() < 1e-10);
    }

    #[test]
    fn suites_pass_on_small_sample_counts() {
        assert!(verify_flow_against_ode(20, 1).unwrap().passed());
        assert!(verify_flow_identities(50, 2).unwrap().passed());
        assert!(verify_jacobian_formula(20, 3).unwrap().passed());
        assert!(verify_zero_field_continuity(50, 4).unwrap().passed());
    }
}
