//! Config ingestion, experiment runners, and reports for the `bergman` binary.

pub mod config;
pub mod experiments;
pub mod report;

pub use config::ExperimentConfig;
pub use experiments::run;
pub use report::{RunReport, SCHEMA_VERSION};
