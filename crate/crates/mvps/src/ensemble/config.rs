//! Experiment configuration.

use serde::{Deserialize, Serialize};

use crate::error::{MvpsError, Result};
use crate::fields::GridSpec;
use crate::kinematics::MagneticConfig;

/// Named initial-distribution families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum DistributionSpec {
    /// Spatial Gaussian of width `sigma_x`, Maxwellian velocities of
    /// temperature `temperature`.
    Maxwellian { mass: f64, sigma_x: f64, temperature: f64 },
    /// Two counter-streaming Maxwellian beams drifting along the axis.
    TwoStream { mass: f64, sigma_x: f64, temperature: f64, drift: f64 },
    /// Compactly supported product bump
    /// f = C (1 - |x|^2/Rx^2)_+ (1 - |v|^2/Rv^2)_+.
    CompactBump { mass: f64, x_radius: f64, v_radius: f64 },
}

impl DistributionSpec {
    pub fn mass(&self) -> f64 {
        match self {
            DistributionSpec::Maxwellian { mass, .. }
            | DistributionSpec::TwoStream { mass, .. }
            | DistributionSpec::CompactBump { mass, .. } => *mass,
        }
    }

    /// A velocity scale used for timestep validation (roughly the rms speed).
    pub fn velocity_scale(&self) -> f64 {
        match self {
            DistributionSpec::Maxwellian { temperature, .. } => temperature.sqrt(),
            DistributionSpec::TwoStream { temperature, drift, .. } => {
                temperature.sqrt() + drift.abs()
            }
            DistributionSpec::CompactBump { v_radius, .. } => *v_radius,
        }
    }
}

/// Full experiment description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub initial: DistributionSpec,
    pub particles: usize,
    pub seed: u64,
    pub grid: GridSpec,
    pub omega: f64,
    pub dt: f64,
    pub t_end: f64,
    /// Steps between diagnostic records (1 = every step).
    #[serde(default = "default_diag_interval")]
    pub diag_interval: usize,
    /// Moment exponents recorded per diagnostic time.
    #[serde(default = "default_moment_exponents")]
    pub moment_exponents: Vec<f64>,
    /// Extra field-norm exponents recorded per diagnostic time, beyond the
    /// always-present 2, 3.5 and weak 3/2.
    #[serde(default)]
    pub field_norm_exponents: Vec<f64>,
    /// Times at which field snapshots are emitted.
    #[serde(default)]
    pub snapshot_times: Vec<f64>,
}

fn default_diag_interval() -> usize {
    1
}

/// Spans the regimes k0 > 3 (moment propagation) and k0 > 6 (regularity,
/// bounded density).
pub fn default_moment_exponents() -> Vec<f64> {
    vec![0.0, 1.0, 2.0, 3.0, 3.5, 4.0, 6.0]
}

impl RunConfig {
    pub fn magnetic(&self) -> Result<MagneticConfig> {
        MagneticConfig::new(self.omega)
    }

    /// Validate the cross-field invariants (positive dt/T, gyro-resolution
    /// and CFL bounds on dt).
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) {
            return Err(MvpsError::Config(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_end > 0.0) {
            return Err(MvpsError::Config(format!("t_end must be positive, got {}", self.t_end)));
        }
        if self.particles == 0 {
            return Err(MvpsError::Config("particle count must be at least 1".into()));
        }
        if self.omega > 0.0 {
            let gyro_limit = 0.05 * 2.0 * std::f64::consts::PI / self.omega;
            if self.dt > gyro_limit {
                return Err(MvpsError::Config(format!(
                    "dt = {} exceeds the gyro-resolution bound 0.05 * 2 pi / omega = {}",
                    self.dt, gyro_limit
                )));
            }
        }
        let h = self.grid.spacing();
        let hmin = h.x.min(h.y).min(h.z);
        let vscale = self.initial.velocity_scale();
        if vscale > 0.0 {
            // 5 sigma tail speed should not cross a cell per step
            let cfl_limit = hmin / (5.0 * vscale);
            if self.dt > cfl_limit {
                return Err(MvpsError::Config(format!(
                    "dt = {} exceeds the CFL bound {} (cell {} / 5 x velocity scale {})",
                    self.dt, cfl_limit, hmin, vscale
                )));
            }
        }
        if self.moment_exponents.iter().any(|&k| k < 0.0) {
            return Err(MvpsError::Config("moment exponents must be nonnegative".into()));
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        (self.t_end / self.dt).round().max(1.0) as usize
    }
}
