//! Weighted phase-space markers carrying the distribution function.

use crate::error::{MvpsError, Result};
use crate::vec3::Vec3;

/// N weighted markers (x_i, v_i, w_i) representing f.  Weights are fixed at
/// sampling time and never mutated by stepping, so the total mass is exact.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParticleEnsemble {
    pub positions: Vec<Vec3>,
    pub velocities: Vec<Vec3>,
    pub weights: Vec<f64>,
    /// Initial f values per particle, constant along characteristics
    /// (Liouville); present when the sampler provides them.
    pub f_in_tags: Option<Vec<f64>>,
}

impl ParticleEnsemble {
    pub fn from_parts(positions: Vec<Vec3>, velocities: Vec<Vec3>, weights: Vec<f64>) -> Self {
        assert_eq!(positions.len(), velocities.len());
        assert_eq!(positions.len(), weights.len());
        ParticleEnsemble { positions, velocities, weights, f_in_tags: None }
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Velocity moment M_k = sum_i w_i |v_i|^k.
    pub fn moment(&self, k: f64) -> f64 {
        self.velocities
            .iter()
            .zip(self.weights.iter())
            .map(|(v, w)| w * v.norm().powf(k))
            .sum()
    }

    pub fn moments(&self, ks: &[f64]) -> Vec<(f64, f64)> {
        ks.iter().map(|&k| (k, self.moment(k))).collect()
    }

    /// Axial momentum sum_i w_i v3_i (conserved whenever E3 = 0).
    pub fn axial_momentum(&self) -> f64 {
        self.velocities
            .iter()
            .zip(self.weights.iter())
            .map(|(v, w)| w * v.z)
            .sum()
    }
}

/// The stability functional Q(t) between two trajectories started from the
/// same initial ensemble:
/// Q = (1/2) sum_i w_i (|X_a,i - X_b,i|^2 + |V_a,i - V_b,i|^2).
pub fn stability_q(a: &ParticleEnsemble, b: &ParticleEnsemble) -> Result<f64> {
    if a.len() != b.len() {
        return Err(MvpsError::MismatchedEnsembles { a: a.len(), b: b.len() });
    }
    let mut q = 0.0;
    for i in 0..a.len() {
        let dx = a.positions[i] - b.positions[i];
        let dv = a.velocities[i] - b.velocities[i];
        q += 0.5 * a.weights[i] * (dx.norm_sq() + dv.norm_sq());
    }
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn moment_basics() {
        let ens = ParticleEnsemble::from_parts(
            vec![Vec3::ZERO],
            vec![Vec3::new(0.0, 3.0, 0.0)],
            vec![2.0],
        );
        assert_relative_eq!(ens.moment(0.0), 2.0); // total mass
        assert_relative_eq!(ens.moment(2.0), 18.0);
    }

    #[test]
    fn q_zero_for_identical_runs() {
        let ens = ParticleEnsemble::from_parts(
            vec![Vec3::new(1.0, 0.0, 0.0); 3],
            vec![Vec3::new(0.0, 1.0, 0.0); 3],
            vec![0.5; 3],
        );
        assert_eq!(stability_q(&ens, &ens.clone()).unwrap(), 0.0);
    }

    #[test]
    fn q_free_streaming_velocity_offset() {
        // pure velocity shift delta under free streaming:
        // Q(t) = (1/2) M0 delta^2 (1 + t^2)
        let delta = 1e-3;
        let t = 2.0;
        let mass = 3.0;
        let a = ParticleEnsemble::from_parts(
            vec![Vec3::ZERO],
            vec![Vec3::new(1.0, 0.0, 0.0)],
            vec![mass],
        );
        let mut b = a.clone();
        b.velocities[0].x += delta;
        // stream both for time t
        let mut a2 = a.clone();
        let mut b2 = b.clone();
        a2.positions[0] += a.velocities[0] * t;
        b2.positions[0] += b.velocities[0] * t;
        let q = stability_q(&a2, &b2).unwrap();
        assert_relative_eq!(q, 0.5 * mass * delta * delta * (1.0 + t * t), max_relative = 1e-12);
    }

    #[test]
    fn q_rejects_size_mismatch() {
        let a = ParticleEnsemble::from_parts(vec![Vec3::ZERO], vec![Vec3::ZERO], vec![1.0]);
        let b = ParticleEnsemble::from_parts(vec![], vec![], vec![]);
        assert!(stability_q(&a, &b).is_err());
    }
}
