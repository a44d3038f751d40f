//! Experiment orchestration for the Liouville simulator: configuration,
//! subcommands, CSV/JSON reports, field snapshots and the acceptance suite.

pub mod acceptance;
pub mod config;
mod error;
pub mod experiments;
pub mod report;
pub mod snapshot;

pub use error::RunError;
