//! Stability functional for paired perturbed runs.
//!
//! Q(t) = 1/2 sum_i w_i (|X_a,i - X_b,i|^2 + |V_a,i - V_b,i|^2) compares two
//! runs started from the same markers with a controlled offset.  The
//! continuum bound dQ/dt <= C Q (1 + ln(1/Q)) integrates to
//! 1 + ln(1/Q(t)) >= (1 + ln(1/Q(0))) e^(-C t), so the least admissible C is
//! read off each sample in closed form.

use crate::ensemble::{run_from, ParticleEnsemble, RunConfig};
use crate::error::{MvpsError, Result};
use crate::harness::report::EstimateReport;
use crate::vec3::Vec3;

pub const C_CAP: f64 = 1e3;

/// Least C with 1 + ln(1/Q(t)) >= (1 + ln(1/Q0)) e^(-C t) over all samples.
/// Returns None for an identically-zero series (identical runs: trivially
/// stable, nothing to fit).
pub fn fit_log_lipschitz(q_series: &[(f64, f64)]) -> Result<Option<f64>> {
    if q_series.iter().all(|&(_, q)| q == 0.0) {
        return Ok(None);
    }
    let &(_, q0) = q_series
        .first()
        .ok_or_else(|| MvpsError::MissingHistory("empty Q series".into()))?;
    if q0 <= 0.0 {
        return Err(MvpsError::CheckFailed(
            "perturbed series must start with Q(0) > 0".into(),
        ));
    }
    let l0 = 1.0 + (1.0 / q0).ln();
    let mut c = 0.0f64;
    for &(t, q) in q_series.iter().skip(1) {
        if t <= 0.0 {
            continue;
        }
        if !(q > 0.0 && q.is_finite()) {
            return Err(MvpsError::NonFinite(format!("Q({t}) = {q}")));
        }
        let l = 1.0 + (1.0 / q).ln();
        if l < l0 {
            // Q grew: the envelope requires C >= ln(l0/l)/t
            c = c.max((l0 / l).ln() / t);
        }
    }
    Ok(Some(c))
}

/// Run the same configuration twice, the second copy with every initial
/// position shifted by `delta` along the first axis, and record Q at each
/// diagnostic time of run a.
pub fn paired_runs(config: &RunConfig, delta: f64) -> Result<Vec<(f64, f64)>> {
    config.validate()?;
    let mag = config.magnetic()?;
    let base = crate::ensemble::sample_initial(
        &config.initial,
        config.particles,
        config.seed,
        &config.grid,
    );
    let mut a = base.clone();
    let mut b = base;
    let shift = Vec3::new(delta, 0.0, 0.0);
    for p in b.positions.iter_mut() {
        *p += shift;
    }
    // co-stepping via two observed runs would interleave awkwardly; instead
    // capture each trajectory's states at diagnostic times and difference them
    let states_a = capture(config, &mag, &mut a)?;
    let states_b = capture(config, &mag, &mut b)?;
    if states_a.len() != states_b.len() {
        return Err(MvpsError::MismatchedEnsembles {
            a: states_a.len(),
            b: states_b.len(),
        });
    }
    states_a
        .iter()
        .zip(&states_b)
        .map(|((t, ens_a), (_, ens_b))| Ok((*t, crate::ensemble::stability_q(ens_a, ens_b)?)))
        .collect()
}

fn capture(
    config: &RunConfig,
    mag: &crate::kinematics::MagneticConfig,
    ens: &mut ParticleEnsemble,
) -> Result<Vec<(f64, ParticleEnsemble)>> {
    let mut states = Vec::new();
    run_from(config, mag, ens, &mut |rec, ens, _| {
        states.push((rec.t, ens.clone()));
        Ok(())
    })?;
    Ok(states)
}

/// Report on a Q series: final value, fitted C, both under their caps.
pub fn verify_stability_envelope(
    q_series: &[(f64, f64)],
    q_ceiling: f64,
) -> Result<EstimateReport> {
    let mut report = EstimateReport::new("stability envelope");
    match fit_log_lipschitz(q_series)? {
        None => {
            report.record("fitted_C", 0.0);
            report.require("identical_runs_trivially_stable", true);
        }
        Some(c) => {
            report.record("fitted_C", c);
            report.check_le("fitted_C_vs_cap", c, C_CAP);
        }
    }
    let q_final = q_series.last().map(|&(_, q)| q).unwrap_or(0.0);
    report.check_le("final_Q", q_final, q_ceiling);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::DistributionSpec;
    use crate::fields::GridSpec;

    #[test]
    fn constant_q_fits_zero() {
        let series: Vec<(f64, f64)> = (0..10).map(|i| (i as f64 * 0.1, 1e-6)).collect();
        assert_eq!(fit_log_lipschitz(&series).unwrap(), Some(0.0));
    }

    #[test]
    fn synthetic_envelope_recovers_rate() {
        let c_true = 0.7;
        let q0: f64 = 1e-10;
        let l0 = 1.0 + (1.0 / q0).ln();
        let series: Vec<(f64, f64)> = (0..=20)
            .map(|i| {
                let t = i as f64 * 0.05;
                let l = l0 * (-c_true * t).exp();
                (t, (1.0 - l).exp())
            })
            .collect();
        let c = fit_log_lipschitz(&series).unwrap().unwrap();
        assert!((c - c_true).abs() < 1e-9, "fitted {c}");
    }

    #[test]
    fn identical_runs_are_trivially_stable() {
        let series = vec![(0.0, 0.0), (0.5, 0.0)];
        let report = verify_stability_envelope(&series, 1e-3).unwrap();
        assert!(report.passed(), "{report}");
    }

    #[test]
    fn paired_short_run_stays_controlled() {
        let config = RunConfig {
            initial: DistributionSpec::Maxwellian {
                mass: 1.0,
                sigma_x: 2.0,
                temperature: 1.0,
            },
            particles: 2000,
            seed: 3,
            grid: GridSpec::centered_cube(40.0, 16).unwrap(),
            omega: 1.0,
            dt: 0.05,
            t_end: 0.5,
            diag_interval: 2,
            moment_exponents: vec![0.0, 2.0],
            field_norm_exponents: vec![],
            snapshot_times: vec![],
        };
        let series = paired_runs(&config, 1e-6).unwrap();
        assert!((series[0].1 - 0.5e-12).abs() < 1e-15); // Q(0) = M0 delta^2 / 2
        let report = verify_stability_envelope(&series, 1e-3).unwrap();
        assert!(report.passed(), "{report}");
    }
}
