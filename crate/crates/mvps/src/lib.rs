//! Magnetized Vlasov-Poisson particle simulator.
//!
//! The continuum model is the three-dimensional Vlasov-Poisson system with a
//! uniform magnetic field along the third axis.  Free characteristics are
//! known in closed form (gyration in the perpendicular plane, drift along the
//! axis), and the crate is organised around exploiting that structure:
//!
//! - [`kinematics`]: exact flow maps, field-response kernels, and the
//!   singular-time geometry of the backward characteristics;
//! - [`fields`]: free-space Poisson solve on a grid, particle/grid transfer,
//!   and the norms used by the diagnostics;
//! - [`ensemble`]: sampling, moments, and the Strang-split time loop;
//! - [`harness`]: quantitative checks of the estimates that control the
//!   long-time behaviour (moment propagation, stability, density bounds);
//! - [`io`]: run configuration, CSV series output, and field snapshots.

pub mod cli;
pub mod ensemble;
pub mod error;
pub mod fields;
pub mod harness;
pub mod io;
pub mod kinematics;
pub mod vec3;

pub use error::{MvpsError, Result};
