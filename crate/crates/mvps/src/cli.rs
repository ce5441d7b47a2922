//! Command-line interface: simulation plus the verification subcommands.
//!
//! Exit codes: 0 on success, 1 when a check fails or a run aborts, 2 on
//! usage or configuration errors.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::ensemble::{run, run_observed, DistributionSpec, RunConfig};
use crate::error::{MvpsError, Result};
use crate::harness::{
    fit_gronwall_envelope, gronwall_report, paired_runs, verify_bounded_density,
    verify_field_estimates, verify_kinematics, verify_moment_interpolation,
    verify_poisson_convergence, verify_product_weak_bound, verify_representation,
    verify_singular_operator_probe, verify_stability_envelope, verify_weak_young,
    DecayMonitor, EstimateReport, FrozenFieldProblem,
};
use crate::io::{echo_config, load_config, series_to_csv, write_scalar, write_vector, FileConfig, Manifest};
use crate::kinematics::{jacobian_psi_abs, singular_amplification, zeta, MagneticConfig};

#[derive(Debug, Parser)]
#[command(name = "mvps", version, about = "Magnetized Vlasov-Poisson particle simulator and estimate verifier")]
pub struct Cli {
    /// TOML experiment file; built-in defaults when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory for artifacts and the manifest.
    #[arg(long, global = true, value_name = "DIR", default_value = "out")]
    pub out: PathBuf,
    /// Dotted-key override, e.g. --set run.dt=0.01 (repeatable).
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    /// Override run.seed.
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
    /// For simulate: rerun and insist the series bytes are identical.
    #[arg(long, global = true)]
    pub deterministic: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum Command {
    /// Integrate the configured experiment and write series + snapshots.
    Simulate,
    /// Closed-form characteristics against an independent ODE oracle and
    /// the algebraic flow identities.
    VerifyKinematics,
    /// Poisson solver convergence, weak-norm laws, and field-norm bounds
    /// along a run.
    VerifyFields,
    /// Density-change identity in a frozen-field problem.
    VerifyRepresentation,
    /// Moment/velocity-average interpolation inequalities on random data.
    VerifyInequalities,
    /// Per-window double-exponential moment envelope along a run.
    VerifyGronwall,
    /// Log-Lipschitz separation bound between perturbed paired runs.
    VerifyStability,
    /// Transported decay profile of the tagged phase-space density.
    VerifyDecay,
    /// Finiteness of the transported density envelope inside its horizon.
    VerifyDensity,
    /// Tabulate the singular kinematic factors across one gyro-period.
    ScanSingularity,
}

/// Outcome a subcommand hands back to `main`.
pub struct Outcome {
    pub passed: bool,
    pub summary: String,
}

fn ensure_out_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)
        .map_err(|e| MvpsError::Config(format!("cannot create {}: {e}", dir.display())))
}

fn load(cli: &Cli) -> Result<FileConfig> {
    let mut config = load_config(cli.config.as_deref(), &cli.overrides)?;
    if let Some(seed) = cli.seed {
        config.run.seed = seed;
    }
    Ok(config)
}

/// Write a report to `report.txt`, echo the config, and finish the manifest.
fn finish_report(
    cli: &Cli,
    config: &FileConfig,
    report: &EstimateReport,
    mut manifest: Manifest,
) -> Result<Outcome> {
    let text = format!("{report}");
    let path = cli.out.join("report.txt");
    fs::write(&path, &text)
        .map_err(|e| MvpsError::Config(format!("cannot write {}: {e}", path.display())))?;
    manifest.add_file("report.txt", &path)?;
    let csv_path = cli.out.join("report.csv");
    fs::write(&csv_path, report.to_csv())
        .map_err(|e| MvpsError::Config(format!("cannot write {}: {e}", csv_path.display())))?;
    manifest.add_file("report.csv", &csv_path)?;
    let echoed = echo_config(config, &cli.out)?;
    manifest.add_file("config.toml", &echoed)?;
    manifest.write(&cli.out)?;
    Ok(Outcome { passed: report.passed(), summary: text })
}

fn simulate(cli: &Cli, config: &FileConfig) -> Result<Outcome> {
    let output = run(&config.run)?;
    let csv = series_to_csv(&output.series)?;
    if cli.deterministic {
        let again = run(&config.run)?;
        let csv2 = series_to_csv(&again.series)?;
        if csv != csv2 {
            return Err(MvpsError::CheckFailed(
                "repeated run produced different series bytes".into(),
            ));
        }
    }
    let mut manifest = Manifest::new();
    let series_path = cli.out.join("series.csv");
    fs::write(&series_path, &csv)
        .map_err(|e| MvpsError::Config(format!("cannot write {}: {e}", series_path.display())))?;
    manifest.add_file("series.csv", &series_path)?;
    for (i, snap) in output.snapshots.iter().enumerate() {
        let rho_path = cli.out.join(format!("rho_{i:03}.mvps"));
        let e_path = cli.out.join(format!("e_{i:03}.mvps"));
        write_scalar(&rho_path, &snap.rho)?;
        write_vector(&e_path, &snap.e)?;
        manifest.add_file(&format!("rho_{i:03}.mvps"), &rho_path)?;
        manifest.add_file(&format!("e_{i:03}.mvps"), &e_path)?;
    }
    let echoed = echo_config(config, &cli.out)?;
    manifest.add_file("config.toml", &echoed)?;
    manifest.write(&cli.out)?;
    let last = output.series.last()?;
    Ok(Outcome {
        passed: true,
        summary: format!(
            "simulate: {} records, {} snapshots, final t = {}, energy = {:.6e}",
            output.series.records.len(),
            output.snapshots.len(),
            last.t,
            last.energy
        ),
    })
}

/// A reduced copy of the run used by field/envelope/decay verifiers: the
/// configured experiment, capped in size so a verification pass stays cheap.
fn verification_run(config: &FileConfig) -> RunConfig {
    let mut run_cfg = config.run.clone();
    run_cfg.particles = run_cfg.particles.min(50_000);
    run_cfg.snapshot_times.clear();
    let p = config.checks.moment_exponent + 3.0;
    if !run_cfg.field_norm_exponents.contains(&p) {
        run_cfg.field_norm_exponents.push(p);
    }
    run_cfg
}

fn verify_fields(config: &FileConfig) -> Result<EstimateReport> {
    let mut report = EstimateReport::new("fields");
    report.merge(verify_poisson_convergence(&[16, 32, 64], 3.0)?);
    report.merge(verify_weak_young()?);
    let run_cfg = verification_run(config);
    let output = run(&run_cfg)?;
    let energy_in = output
        .series
        .records
        .first()
        .ok_or_else(|| MvpsError::MissingHistory("run produced no records".into()))?
        .energy;
    report.merge(verify_field_estimates(
        &output.series,
        config.checks.moment_exponent,
        run_cfg.omega,
        energy_in,
    )?);
    Ok(report)
}

fn verify_inequalities(config: &FileConfig, seed: u64) -> Result<EstimateReport> {
    let trials = config.checks.trials;
    let mut report = EstimateReport::new("interpolation inequalities");
    report.merge(verify_moment_interpolation(trials, seed)?);
    report.merge(verify_product_weak_bound(trials.min(200), seed.wrapping_add(1))?);
    report.merge(verify_singular_operator_probe(4, seed.wrapping_add(2))?);
    Ok(report)
}

fn verify_gronwall(config: &FileConfig) -> Result<EstimateReport> {
    let run_cfg = verification_run(config);
    let output = run(&run_cfg)?;
    let mag = MagneticConfig::new(run_cfg.omega)?;
    let window = mag.t_omega().unwrap_or(run_cfg.t_end);
    let fits = fit_gronwall_envelope(&output.series, config.checks.moment_exponent, window)?;
    Ok(gronwall_report(&fits, config.checks.moment_exponent))
}

fn verify_stability(config: &FileConfig) -> Result<EstimateReport> {
    let mut run_cfg = verification_run(config);
    run_cfg.particles = run_cfg.particles.min(20_000);
    run_cfg.diag_interval = run_cfg.diag_interval.max(5);
    let mag = MagneticConfig::new(run_cfg.omega)?;
    run_cfg.t_end = run_cfg.t_end.min(mag.t_omega().unwrap_or(run_cfg.t_end));
    let q_series = paired_runs(&run_cfg, config.checks.delta)?;
    verify_stability_envelope(&q_series, config.checks.q_ceiling)
}

fn verify_decay(config: &FileConfig) -> Result<EstimateReport> {
    let run_cfg = verification_run(config);
    let mag = MagneticConfig::new(run_cfg.omega)?;
    let mut monitor = DecayMonitor::new(run_cfg.t_end.min(mag.t_omega().unwrap_or(run_cfg.t_end)));
    run_observed(&run_cfg, &mut |rec, ens, e| monitor.observe(rec, ens, e))?;
    Ok(monitor.report())
}

fn verify_density(config: &FileConfig) -> Result<EstimateReport> {
    // The envelope argument needs compact support; substitute the bump family
    // when the configured initial data is not compactly supported.
    let spec = match &config.run.initial {
        bump @ DistributionSpec::CompactBump { .. } => bump.clone(),
        _ => DistributionSpec::CompactBump { mass: 1.0, x_radius: 4.0, v_radius: 3.0 },
    };
    let mut run_cfg = verification_run(config);
    run_cfg.initial = spec.clone();
    let output = run(&run_cfg)?;
    let r_field = output
        .series
        .records
        .iter()
        .map(|r| r.e_max)
        .fold(0.0f64, f64::max);
    verify_bounded_density(
        &spec,
        run_cfg.omega,
        r_field,
        Some(&output.series),
        config.checks.density_factor,
    )
}

fn representation_report(config: &FileConfig) -> Result<EstimateReport> {
    let problem = FrozenFieldProblem::reference();
    verify_representation(
        &problem,
        config.checks.quadrature_points,
        config.checks.tolerance,
        config.checks.doubling_factor,
    )
}

fn scan_singularity(cli: &Cli, config: &FileConfig) -> Result<Outcome> {
    let omega = config.run.omega;
    if !(omega > 0.0) {
        return Err(MvpsError::Config(
            "scan-singularity needs omega > 0: the unmagnetized flow has no singular times".into(),
        ));
    }
    let mag = MagneticConfig::new(omega)?;
    let d = config.checks.dimension;
    let period = 2.0 * std::f64::consts::PI / omega;
    let mut times: Vec<f64> = (1..64).map(|i| 2.0 * period * i as f64 / 64.0).collect();
    // geometric refinement toward the singular time from both sides
    for j in 1..=24 {
        let off = period * 0.5f64.powi(j);
        times.push(period - off);
        times.push(period + off);
    }
    times.sort_by(|a, b| a.partial_cmp(b).unwrap());
    times.dedup();
    // the factors are undefined inside the guard band around 2 pi / omega
    times.retain(|&s| !mag.near_singular_time(s));
    let mut text = String::from("s,jacobian_psi_abs,singular_amplification,zeta\n");
    let mut all_finite = true;
    for &s in &times {
        let jac = jacobian_psi_abs(s, &mag)?;
        let amp = singular_amplification(s, &mag)?;
        let z = zeta(s, &mag, d)?;
        all_finite &= jac.is_finite() && amp.is_finite() && z.is_finite();
        text.push_str(&format!("{s},{jac},{amp},{z}\n"));
    }
    let path = cli.out.join("singularity_scan.csv");
    fs::write(&path, &text)
        .map_err(|e| MvpsError::Config(format!("cannot write {}: {e}", path.display())))?;
    let mut manifest = Manifest::new();
    manifest.add_file("singularity_scan.csv", &path)?;
    let echoed = echo_config(config, &cli.out)?;
    manifest.add_file("config.toml", &echoed)?;
    manifest.write(&cli.out)?;
    Ok(Outcome {
        passed: all_finite,
        summary: format!(
            "scan-singularity: {} samples around s = {period} written to {}",
            times.len(),
            path.display()
        ),
    })
}

pub fn execute(cli: &Cli) -> Result<Outcome> {
    let config = load(cli)?;
    ensure_out_dir(&cli.out)?;
    let seed = config.run.seed;
    match cli.command {
        Command::Simulate => simulate(cli, &config),
        Command::ScanSingularity => scan_singularity(cli, &config),
        Command::VerifyKinematics => {
            let report = verify_kinematics(config.checks.samples, seed)?;
            finish_report(cli, &config, &report, Manifest::new())
        }
        Command::VerifyFields => {
            let report = verify_fields(&config)?;
            finish_report(cli, &config, &report, Manifest::new())
        }
        Command::VerifyRepresentation => {
            let report = representation_report(&config)?;
            finish_report(cli, &config, &report, Manifest::new())
        }
        Command::VerifyInequalities => {
            let report = verify_inequalities(&config, seed)?;
            finish_report(cli, &config, &report, Manifest::new())
        }
        Command::VerifyGronwall => {
            let report = verify_gronwall(&config)?;
            finish_report(cli, &config, &report, Manifest::new())
        }
        Command::VerifyStability => {
            let report = verify_stability(&config)?;
            finish_report(cli, &config, &report, Manifest::new())
        }
        Command::VerifyDecay => {
            let report = verify_decay(&config)?;
            finish_report(cli, &config, &report, Manifest::new())
        }
        Command::VerifyDensity => {
            let report = verify_density(&config)?;
            finish_report(cli, &config, &report, Manifest::new())
        }
    }
}

/// Map an error to its process exit code: configuration and usage problems
/// exit 2, everything else (aborted runs, failed invariants) exits 1.
pub fn exit_code_for(err: &MvpsError) -> i32 {
    match err {
        MvpsError::Config(_) => 2,
        _ => 1,
    }
}
