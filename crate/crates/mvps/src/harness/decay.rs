//! Velocity-decay envelope check: initial values transported along
//! characteristics stay below h(|v| - A t) when the initial data sits below
//! h(|v|), with A the running sup of the field amplitude.
//!
//! Each marker carries its initial density value (constant along
//! characteristics).  The rotation preserves speed and each kick changes it
//! by at most dt * max|E|, so |v_i(t)| <= |v_i(0)| + A_t * t telescopes and
//! the envelope with the running sup A_t is the sharper version of the
//! whole-run bound with A_T.

use crate::ensemble::{MomentRecord, ParticleEnsemble};
use crate::error::{MvpsError, Result};
use crate::fields::VectorField;
use crate::harness::report::EstimateReport;

/// The profile h(r) = c (1 + r)^(-4).
#[derive(Debug, Clone, Copy)]
pub struct DecayProfile {
    pub c: f64,
}

impl DecayProfile {
    pub fn value(&self, r: f64) -> f64 {
        self.c / (1.0 + r.max(0.0)).powi(4)
    }

    /// Smallest admissible c for the sampled markers: the profile then
    /// dominates every tagged initial value at t = 0.
    pub fn enveloping(ens: &ParticleEnsemble) -> Result<Self> {
        let tags = ens
            .f_in_tags
            .as_ref()
            .ok_or_else(|| MvpsError::MissingHistory("ensemble carries no density tags".into()))?;
        let mut c = 0.0f64;
        for (tag, v) in tags.iter().zip(&ens.velocities) {
            c = c.max(tag * (1.0 + v.norm()).powi(4));
        }
        Ok(DecayProfile { c: c * (1.0 + 1e-12) })
    }
}

/// Online violation counter, fed from the run observer at each diagnostic.
#[derive(Debug)]
pub struct DecayMonitor {
    profile: Option<DecayProfile>,
    pub violations: usize,
    pub checked_times: usize,
    pub t_max: f64,
    /// running sup of max|E| over observed records
    field_sup: f64,
    slack: f64,
}

impl DecayMonitor {
    /// Check records up to time `t_max` (inclusive, with tolerance).
    pub fn new(t_max: f64) -> Self {
        DecayMonitor {
            profile: None,
            violations: 0,
            checked_times: 0,
            t_max,
            field_sup: 0.0,
            slack: 1e-9,
        }
    }

    pub fn observe(
        &mut self,
        rec: &MomentRecord,
        ens: &ParticleEnsemble,
        e: &VectorField,
    ) -> Result<()> {
        self.field_sup = self
            .field_sup
            .max(rec.field_sup_running)
            .max(e.max_norm());
        if rec.t > self.t_max * (1.0 + 1e-9) {
            return Ok(());
        }
        let profile = match &self.profile {
            Some(p) => *p,
            None => {
                let p = DecayProfile::enveloping(ens)?;
                self.profile = Some(p);
                p
            }
        };
        let tags = ens
            .f_in_tags
            .as_ref()
            .ok_or_else(|| MvpsError::MissingHistory("ensemble carries no density tags".into()))?;
        let shift = self.field_sup * rec.t;
        for (tag, v) in tags.iter().zip(&ens.velocities) {
            if *tag > profile.value(v.norm() - shift) * (1.0 + self.slack) {
                self.violations += 1;
            }
        }
        self.checked_times += 1;
        Ok(())
    }

    pub fn report(&self) -> EstimateReport {
        let mut report = EstimateReport::new("decay envelope");
        report.record("checked_times", self.checked_times as f64);
        report.record("envelope_c", self.profile.map(|p| p.c).unwrap_or(0.0));
        report.record("field_sup", self.field_sup);
        report.check_le("violations", self.violations as f64, 0.0);
        report
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::{run_observed, DistributionSpec, RunConfig};
    use crate::fields::GridSpec;
    use crate::vec3::Vec3;

    #[test]
    fn profile_envelopes_initial_tags() {
        let mut ens = ParticleEnsemble::from_parts(
            vec![Vec3::ZERO, Vec3::ZERO],
            vec![Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.0, 2.0, 0.0)],
            vec![0.5, 0.5],
        );
        ens.f_in_tags = Some(vec![0.3, 0.1]);
        let p = DecayProfile::enveloping(&ens).unwrap();
        assert!(p.value(1.0) >= 0.3);
        assert!(p.value(2.0) >= 0.1);
        assert!(DecayProfile::enveloping(&ParticleEnsemble::default()).is_err());
    }

    #[test]
    fn profile_is_decreasing_and_clamped() {
        let p = DecayProfile { c: 2.0 };
        assert!(p.value(0.0) >= p.value(1.0));
        assert_eq!(p.value(-3.0), p.value(0.0));
    }

    #[test]
    fn short_coupled_run_has_no_violations() {
        let config = RunConfig {
            initial: DistributionSpec::Maxwellian {
                mass: 1.0,
                sigma_x: 2.0,
                temperature: 1.0,
            },
            particles: 3000,
            seed: 11,
            grid: GridSpec::centered_cube(40.0, 16).unwrap(),
            omega: 1.0,
            dt: 0.05,
            t_end: 0.5,
            diag_interval: 2,
            moment_exponents: vec![0.0, 2.0],
            field_norm_exponents: vec![],
            snapshot_times: vec![],
        };
        let mut monitor = DecayMonitor::new(0.5);
        run_observed(&config, &mut |rec, ens, e| monitor.observe(rec, ens, e)).unwrap();
        let report = monitor.report();
        assert!(report.passed(), "{report}");
        assert!(monitor.checked_times >= 5);
    }
}
