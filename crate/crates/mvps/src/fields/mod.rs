//! Charge deposition, free-space Poisson field solve and norm machinery.

mod deposit;
pub mod fft;
mod grid;
mod norms;
mod poisson;

pub use deposit::{deposit_density, deposit_vector, gather};
pub use grid::{GridSpec, ScalarField, VectorField};
pub use norms::{energy, lp_norm, lp_norm_vector, weak_lq_norm, weak_lq_norm_vector};
pub use poisson::{solve_field, PoissonSolver, DEFAULT_MEMORY_BUDGET};
