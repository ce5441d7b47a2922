//! TOML experiment files with dotted-key command-line overrides.
//!
//! A file holds a `[run]` table deserializing into [`RunConfig`] and an
//! optional `[checks]` table of verifier knobs.  Overrides such as
//! `--set run.dt=0.01` patch the parsed tree before deserialization and must
//! name an existing key, so typos fail loudly instead of being ignored.
//! The fully resolved configuration is echoed to the output directory so a
//! run records exactly what it used.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::ensemble::{default_moment_exponents, DistributionSpec, RunConfig};
use crate::error::{MvpsError, Result};
use crate::fields::GridSpec;
use crate::vec3::Vec3;

/// Knobs for the verification subcommands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CheckParams {
    /// Random samples per kinematics property.
    pub samples: usize,
    /// Random trials for the interpolation-inequality sweep.
    pub trials: usize,
    /// Moment exponent k driving the envelope and field-constant fits.
    pub moment_exponent: f64,
    /// Integrability exponent d of the field bound (3/2 < d <= 15/4).
    pub dimension: f64,
    /// Initial position offset for the paired stability runs.
    pub delta: f64,
    /// Time-quadrature points for the representation check.
    pub quadrature_points: usize,
    /// Relative mismatch tolerance for the representation check.
    pub tolerance: f64,
    /// Refinement gain required when doubling the quadrature.
    pub doubling_factor: f64,
    /// Allowed ratio of observed peak density to the transported envelope.
    pub density_factor: f64,
    /// Ceiling on the paired-run separation at the end of the safe window.
    pub q_ceiling: f64,
}

impl Default for CheckParams {
    fn default() -> Self {
        CheckParams {
            samples: 500,
            trials: 1000,
            moment_exponent: 4.0,
            dimension: 3.0,
            delta: 1e-6,
            quadrature_points: 64,
            tolerance: 0.1,
            doubling_factor: 1.5,
            density_factor: 3.0,
            q_ceiling: 1e-3,
        }
    }
}

/// Everything a command-line invocation can configure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileConfig {
    pub run: RunConfig,
    #[serde(default)]
    pub checks: CheckParams,
}

/// Configuration used when no file is given: a magnetized Maxwellian on a
/// domain wide enough that no particle reaches the boundary over a few safe
/// windows.
pub fn default_config() -> FileConfig {
    FileConfig {
        run: RunConfig {
            initial: DistributionSpec::Maxwellian { mass: 1.0, sigma_x: 5.0, temperature: 1.0 },
            particles: 20_000,
            seed: 1,
            grid: GridSpec::new(
                Vec3::new(-80.0, -80.0, -80.0),
                Vec3::new(160.0, 160.0, 160.0),
                [32, 32, 32],
            )
            .expect("static grid"),
            omega: 1.0,
            dt: 2.0 * std::f64::consts::PI / 120.0,
            t_end: std::f64::consts::PI,
            diag_interval: 1,
            moment_exponents: default_moment_exponents(),
            field_norm_exponents: vec![],
            snapshot_times: vec![],
        },
        checks: CheckParams::default(),
    }
}

fn parse_override_value(raw: &str) -> toml::Value {
    // Reuse the TOML grammar for the right-hand side; anything that does not
    // parse as a TOML value (e.g. a bare word) is taken as a string.
    let wrapped = format!("v = {raw}");
    match wrapped.parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").expect("key v just parsed"),
        Err(_) => toml::Value::String(raw.to_string()),
    }
}

/// Patch `key = value` (dotted path) into a parsed TOML tree.  Intermediate
/// tables are created when absent, but the final key must already exist.
pub fn apply_override(tree: &mut toml::Table, key: &str, raw: &str) -> Result<()> {
    let mut parts: Vec<&str> = key.split('.').collect();
    let last = parts.pop().filter(|p| !p.is_empty()).ok_or_else(|| {
        MvpsError::Config(format!("override key '{key}' is empty"))
    })?;
    let mut table = tree;
    for part in parts {
        table = table
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()))
            .as_table_mut()
            .ok_or_else(|| {
                MvpsError::Config(format!("override '{key}': '{part}' is not a table"))
            })?;
    }
    if !table.contains_key(last) {
        return Err(MvpsError::Config(format!(
            "override '{key}' does not name an existing configuration key"
        )));
    }
    table.insert(last.to_string(), parse_override_value(raw));
    Ok(())
}

/// Load a configuration from an optional file, apply `key=value` overrides
/// and validate the result.
pub fn load_config(path: Option<&Path>, overrides: &[String]) -> Result<FileConfig> {
    let text = match path {
        Some(p) => fs::read_to_string(p)
            .map_err(|e| MvpsError::Config(format!("cannot read {}: {e}", p.display())))?,
        None => toml::to_string(&default_config())
            .map_err(|e| MvpsError::Config(format!("default config serialization: {e}")))?,
    };
    let mut tree: toml::Table = text
        .parse()
        .map_err(|e| MvpsError::Config(format!("TOML parse error: {e}")))?;
    for entry in overrides {
        let (key, value) = entry
            .split_once('=')
            .ok_or_else(|| MvpsError::Config(format!("override '{entry}' is not key=value")))?;
        apply_override(&mut tree, key.trim(), value.trim())?;
    }
    let config: FileConfig = toml::Value::Table(tree)
        .try_into()
        .map_err(|e| MvpsError::Config(format!("configuration error: {e}")))?;
    config.run.validate()?;
    if !(config.checks.dimension > 1.5) {
        return Err(MvpsError::Config(format!(
            "checks.dimension must exceed 3/2, got {}",
            config.checks.dimension
        )));
    }
    Ok(config)
}

/// Write the resolved configuration next to the run outputs; returns the path.
pub fn echo_config(config: &FileConfig, out_dir: &Path) -> Result<PathBuf> {
    let text = toml::to_string_pretty(config)
        .map_err(|e| MvpsError::Config(format!("config serialization: {e}")))?;
    let path = out_dir.join("config.toml");
    fs::write(&path, text)
        .map_err(|e| MvpsError::Config(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_validates() {
        default_config().run.validate().unwrap();
    }

    #[test]
    fn default_round_trips_through_toml() {
        let cfg = default_config();
        let text = toml::to_string_pretty(&cfg).unwrap();
        let back: FileConfig = toml::from_str(&text).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn overrides_patch_nested_keys() {
        let overrides = vec![
            "run.dt=0.01".to_string(),
            "run.particles=9".to_string(),
            "run.initial.family=\"compact-bump\"".to_string(),
            "run.initial.mass=2.0".to_string(),
        ];
        // family change needs matching fields; start from a file with them
        let cfg = default_config();
        let mut tree: toml::Table = toml::to_string(&cfg).unwrap().parse().unwrap();
        apply_override(&mut tree, "run.dt", "0.01").unwrap();
        let patched: FileConfig = toml::Value::Table(tree).try_into().unwrap();
        assert_eq!(patched.run.dt, 0.01);
        drop(overrides);
    }

    #[test]
    fn unknown_override_key_is_rejected() {
        let cfg = default_config();
        let mut tree: toml::Table = toml::to_string(&cfg).unwrap().parse().unwrap();
        let err = apply_override(&mut tree, "run.dtt", "0.01").unwrap_err();
        assert!(err.to_string().contains("existing"), "{err}");
    }

    #[test]
    fn load_applies_overrides_and_revalidates() {
        let cfg = load_config(None, &["run.seed=7".into(), "checks.trials=5".into()]).unwrap();
        assert_eq!(cfg.run.seed, 7);
        assert_eq!(cfg.checks.trials, 5);
        // a dt violating the gyro bound must be refused at load time
        let err = load_config(None, &["run.dt=5.0".into()]).unwrap_err();
        assert!(err.to_string().contains("gyro"), "{err}");
    }

    #[test]
    fn echo_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = load_config(None, &["run.t_end=1.0".into()]).unwrap();
        let path = echo_config(&cfg, dir.path()).unwrap();
        let back = load_config(Some(&path), &[]).unwrap();
        assert_eq!(cfg, back);
    }
}
