//! Monte-Carlo experiments, configuration files and the command-line front
//! end built on `powertalk-core`.

pub mod cli;
pub mod config;
pub mod error;
pub mod experiments;
pub mod report;
pub mod selftest;

pub use config::Config;
pub use error::AppError;
pub use experiments::Experiment;
