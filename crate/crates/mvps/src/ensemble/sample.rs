//! Deterministic initial-data sampling for the named distribution families.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::ensemble::{DistributionSpec, ParticleEnsemble};
use crate::fields::GridSpec;
use crate::vec3::Vec3;

/// Fraction of the grid half-extent kept clear of initial positions so the
/// one-cell deposition margin is never violated at t = 0.
const POSITION_MARGIN: f64 = 0.9;

/// Evaluate the initial distribution f^in(x, v) of a family (untruncated
/// analytic form; the sampler's domain rejection is a tail effect).
pub fn f_in_value(spec: &DistributionSpec, x: Vec3, v: Vec3) -> f64 {
    match spec {
        DistributionSpec::Maxwellian { mass, sigma_x, temperature } => {
            let two_pi = 2.0 * std::f64::consts::PI;
            let nx = (two_pi * sigma_x * sigma_x).powf(-1.5)
                * (-x.norm_sq() / (2.0 * sigma_x * sigma_x)).exp();
            let nv = (two_pi * temperature).powf(-1.5)
                * (-v.norm_sq() / (2.0 * temperature)).exp();
            mass * nx * nv
        }
        DistributionSpec::TwoStream { mass, sigma_x, temperature, drift } => {
            let two_pi = 2.0 * std::f64::consts::PI;
            let nx = (two_pi * sigma_x * sigma_x).powf(-1.5)
                * (-x.norm_sq() / (2.0 * sigma_x * sigma_x)).exp();
            let beam = |center: f64| {
                (two_pi * temperature).powf(-1.5)
                    * (-(v.x * v.x
                        + v.y * v.y
                        + (v.z - center) * (v.z - center))
                        / (2.0 * temperature))
                        .exp()
            };
            mass * nx * 0.5 * (beam(*drift) + beam(-*drift))
        }
        DistributionSpec::CompactBump { mass, x_radius, v_radius } => {
            let bx = (1.0 - x.norm_sq() / (x_radius * x_radius)).max(0.0);
            let bv = (1.0 - v.norm_sq() / (v_radius * v_radius)).max(0.0);
            compact_bump_amplitude(*mass, *x_radius, *v_radius) * bx * bv
        }
    }
}

/// Normalization C such that the product bump integrates to `mass`:
/// Int (1 - r^2/R^2)_+ dx over the ball = (8 pi / 15) R^3.
pub fn compact_bump_amplitude(mass: f64, x_radius: f64, v_radius: f64) -> f64 {
    let shell = |r: f64| 8.0 * std::f64::consts::PI / 15.0 * r * r * r;
    mass / (shell(x_radius) * shell(v_radius))
}

/// Draw a deterministic ensemble of `n` equal-weight markers from the family.
///
/// Positions are rejected until they fall inside the grid interior (with a
/// margin), so every marker is depositable at t = 0.
pub fn sample_initial(
    spec: &DistributionSpec,
    n: usize,
    seed: u64,
    grid: &GridSpec,
) -> ParticleEnsemble {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mass = spec.mass();
    let weight = mass / n as f64;
    let mut positions = Vec::with_capacity(n);
    let mut velocities = Vec::with_capacity(n);
    let mut tags = Vec::with_capacity(n);

    let center = grid.origin + grid.extent * 0.5;
    let half = Vec3::new(grid.extent.x / 2.0, grid.extent.y / 2.0, grid.extent.z / 2.0);
    let inside = |p: Vec3| {
        (p.x - center.x).abs() < POSITION_MARGIN * half.x
            && (p.y - center.y).abs() < POSITION_MARGIN * half.y
            && (p.z - center.z).abs() < POSITION_MARGIN * half.z
    };

    for _ in 0..n {
        let (x, v) = loop {
            let candidate = match spec {
                DistributionSpec::Maxwellian { sigma_x, temperature, .. } => {
                    let x = gaussian3(&mut rng, *sigma_x);
                    let v = gaussian3(&mut rng, temperature.sqrt());
                    (x, v)
                }
                DistributionSpec::TwoStream { sigma_x, temperature, drift, .. } => {
                    let x = gaussian3(&mut rng, *sigma_x);
                    let mut v = gaussian3(&mut rng, temperature.sqrt());
                    v.z += if rng.gen::<bool>() { *drift } else { -*drift };
                    (x, v)
                }
                DistributionSpec::CompactBump { x_radius, v_radius, .. } => {
                    let x = bump_ball(&mut rng, *x_radius);
                    let v = bump_ball(&mut rng, *v_radius);
                    (x, v)
                }
            };
            if inside(candidate.0 + center) {
                break (candidate.0 + center, candidate.1);
            }
        };
        positions.push(x);
        velocities.push(v);
        tags.push(f_in_value(spec, x - center, v));
    }

    ParticleEnsemble {
        positions,
        velocities,
        weights: vec![weight; n],
        f_in_tags: Some(tags),
    }
}

fn gaussian3(rng: &mut ChaCha8Rng, sigma: f64) -> Vec3 {
    let g = |rng: &mut ChaCha8Rng| -> f64 {
        let s: f64 = rng.sample(StandardNormal);
        sigma * s
    };
    Vec3::new(g(rng), g(rng), g(rng))
}

/// Rejection sample from the radial profile (1 - r^2/R^2)_+ inside a ball.
fn bump_ball(rng: &mut ChaCha8Rng, radius: f64) -> Vec3 {
    loop {
        let p = Vec3::new(
            rng.gen_range(-radius..radius),
            rng.gen_range(-radius..radius),
            rng.gen_range(-radius..radius),
        );
        let r2 = p.norm_sq() / (radius * radius);
        if r2 < 1.0 && rng.gen::<f64>() < 1.0 - r2 {
            return p;
        }
    }
}
