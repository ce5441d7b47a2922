//! Particle ensembles: initial sampling, moment diagnostics, and the
//! field-coupled time stepping loop.

pub mod config;
pub mod particle;
pub mod run;
pub mod sample;
pub mod stepper;

pub use config::{default_moment_exponents, DistributionSpec, RunConfig};
pub use particle::{stability_q, ParticleEnsemble};
pub use run::{run, run_from, run_observed, MomentRecord, MomentSeries, RunOutput, Snapshot};
pub use sample::{f_in_value, sample_initial};
pub use stepper::step;
