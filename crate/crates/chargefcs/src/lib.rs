//! Drivers, file formats and the command line for the `chargefcs-core` engines.
//!
//! Results are tidy CSV tables (see [`table::COLUMNS`]) written with seventeen
//! significant digits, each accompanied by a JSON manifest holding the resolved
//! configuration and output hashes. Parallel runs split sample ranges into fixed
//! chunks and merge them in order, so outputs do not depend on the thread count.

pub mod acceptance;
pub mod config;
pub mod engines;
pub mod error;
pub mod figures;
pub mod manifest;
pub mod parallel;
pub mod table;

pub use config::{EngineKind, ExperimentSpec, Mu, Options, ParamsSpec};
pub use error::{CliError, CliResult};
pub use manifest::{run_spec, Manifest};
pub use parallel::Pool;
pub use table::{Row, Table};
