//! File formats, run manifests and the command runner for `packpress-core`.

pub mod config;
pub mod error;
pub mod io;
pub mod manifest;
pub mod run;

pub use config::{Overrides, RunConfig};
pub use error::{CliError, CliResult};
pub use run::{execute, RunOutcome};
