//! Configuration files, CSV series, binary snapshots and the output
//! manifest.

pub mod config;
pub mod csv;
pub mod manifest;
pub mod snapshot;

pub use config::{default_config, echo_config, load_config, CheckParams, FileConfig};
pub use csv::{read_table, series_to_csv, write_series};
pub use manifest::{sha256_hex, Manifest};
pub use snapshot::{read_scalar, read_vector, write_scalar, write_vector};
