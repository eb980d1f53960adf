//! Command-line front end for the spin-boson ensemble simulator: config
//! parsing with presets, run orchestration, population tables, deviation
//! reports and run manifests.

pub mod config;
pub mod ingest;
pub mod output;
pub mod runner;

pub use config::{parse_config, render, ConfigFile, EngineKind, RunConfig, TableFormat};
pub use ingest::ingest_reference;
pub use runner::{run, RunOutcome};
