//! Main simulation driver: deposit charge, solve for the field, record
//! diagnostics, advance the particles.

use crate::ensemble::config::RunConfig;
use crate::ensemble::sample::sample_initial;
use crate::ensemble::stepper::step;
use crate::ensemble::ParticleEnsemble;
use crate::error::{MvpsError, Result};
use crate::fields::{
    deposit_density, energy, lp_norm_vector, weak_lq_norm_vector, PoissonSolver, ScalarField,
    VectorField,
};
use crate::kinematics::MagneticConfig;

/// One diagnostic sample along a run.
#[derive(Debug, Clone)]
pub struct MomentRecord {
    pub t: f64,
    /// velocity moments, paired with their exponents in `RunConfig::moment_exponents`
    pub moments: Vec<(f64, f64)>,
    pub energy: f64,
    pub e_l2: f64,
    pub e_l3p5: f64,
    pub e_weak32: f64,
    pub e_max: f64,
    /// running sup of max|E| over every step so far, including steps between
    /// diagnostic records
    pub field_sup_running: f64,
    pub rho_max: f64,
    /// extra field norms, paired with their exponents in
    /// `RunConfig::field_norm_exponents`
    pub e_norms: Vec<(f64, f64)>,
}

/// All diagnostics accumulated over a run.
#[derive(Debug, Clone)]
pub struct MomentSeries {
    pub records: Vec<MomentRecord>,
    /// running sup over time of the grid maximum of |E|
    pub field_sup: f64,
}

impl MomentSeries {
    pub fn last(&self) -> Result<&MomentRecord> {
        self.records
            .last()
            .ok_or_else(|| MvpsError::MissingHistory("run produced no diagnostics".into()))
    }

    /// Moment column for exponent `k`, if it was requested in the config.
    pub fn moment_column(&self, k: f64) -> Option<Vec<(f64, f64)>> {
        let idx = self
            .records
            .first()?
            .moments
            .iter()
            .position(|&(ke, _)| ke == k)?;
        Some(
            self.records
                .iter()
                .map(|r| (r.t, r.moments[idx].1))
                .collect(),
        )
    }
}

/// Field snapshot captured at a requested time.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub t: f64,
    pub rho: ScalarField,
    pub e: VectorField,
}

/// Full output of a run.
pub struct RunOutput {
    pub series: MomentSeries,
    pub snapshots: Vec<Snapshot>,
    pub ensemble: ParticleEnsemble,
}

/// Observer hook invoked at every diagnostic sample, before stepping.
pub type Observer<'a> = dyn FnMut(&MomentRecord, &ParticleEnsemble, &VectorField) -> Result<()> + 'a;

/// Run a full simulation from the given config.
pub fn run(config: &RunConfig) -> Result<RunOutput> {
    run_observed(config, &mut |_, _, _| Ok(()))
}

/// Run a simulation, calling `observer` at each recorded diagnostic.
pub fn run_observed(config: &RunConfig, observer: &mut Observer<'_>) -> Result<RunOutput> {
    config.validate()?;
    let mag = config.magnetic()?;
    let mut ens = sample_initial(&config.initial, config.particles, config.seed, &config.grid);
    run_from(config, &mag, &mut ens, observer)
}

/// Run the field/step loop on an already-prepared ensemble.
pub fn run_from(
    config: &RunConfig,
    mag: &MagneticConfig,
    ens: &mut ParticleEnsemble,
    observer: &mut Observer<'_>,
) -> Result<RunOutput> {
    let solver = PoissonSolver::new(config.grid)?;
    let steps = config.steps();
    let mut records = Vec::new();
    let mut snapshots = Vec::new();
    let mut field_sup = 0.0f64;
    let mut snap_times = config.snapshot_times.clone();
    snap_times.sort_by(|a, b| a.partial_cmp(b).unwrap());

    for n in 0..=steps {
        let t = n as f64 * config.dt;
        let rho = deposit_density(ens, &config.grid)?;
        let e = solver.solve(&rho)?;
        let e_max = e.max_norm();
        field_sup = field_sup.max(e_max);

        if n % config.diag_interval == 0 || n == steps {
            let rec = diagnostics(t, ens, &rho, &e, config, e_max, field_sup)?;
            observer(&rec, ens, &e)?;
            records.push(rec);
        }
        while let Some(&ts) = snap_times.first() {
            if ts <= t + 0.5 * config.dt {
                snapshots.push(Snapshot {
                    t,
                    rho: rho.clone(),
                    e: e.clone(),
                });
                snap_times.remove(0);
            } else {
                break;
            }
        }
        if n < steps {
            step(ens, &e, config.dt, mag)?;
        }
    }

    Ok(RunOutput {
        series: MomentSeries {
            records,
            field_sup,
        },
        snapshots,
        ensemble: std::mem::take(ens),
    })
}

fn diagnostics(
    t: f64,
    ens: &ParticleEnsemble,
    rho: &ScalarField,
    e: &VectorField,
    config: &RunConfig,
    e_max: f64,
    field_sup_running: f64,
) -> Result<MomentRecord> {
    let moments = ens.moments(&config.moment_exponents);
    let mut e_norms = Vec::with_capacity(config.field_norm_exponents.len());
    for &p in &config.field_norm_exponents {
        e_norms.push((p, lp_norm_vector(e, p)?));
    }
    let rec = MomentRecord {
        t,
        moments,
        energy: energy(ens, e),
        e_l2: lp_norm_vector(e, 2.0)?,
        e_l3p5: lp_norm_vector(e, 3.5)?,
        e_weak32: weak_lq_norm_vector(e, 1.5)?,
        e_max,
        field_sup_running,
        rho_max: rho.max_abs(),
        e_norms,
    };
    let finite = rec.energy.is_finite()
        && rec.e_l2.is_finite()
        && rec.moments.iter().all(|&(_, m)| m.is_finite());
    if !finite {
        return Err(MvpsError::NonFinite(format!(
            "non-finite diagnostic at t = {t}"
        )));
    }
    Ok(rec)
}
