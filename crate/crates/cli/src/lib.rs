//! Library half of the `cfwave` command: configuration, row computation
//! and CSV/JSON output.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod run;

pub use config::{Format, Overrides, RunConfig};
pub use error::{CliError, Result};
pub use run::ResultRow;
