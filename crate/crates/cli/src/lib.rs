//! Scenario files, parameter sweeps, result files and the acceptance suite
//! behind the `coexist` command.

pub mod error;
pub mod fixture;
pub mod output;
pub mod scenario;
pub mod sweep;
pub mod validate;

pub use error::{CliError, Result};
