//! Command-line driver for `ahnls`: seeded verification suites, λ-plane
//! scans of the Weyl function, and convergence studies, written out as CSV
//! and JSON.

pub mod config;
pub mod emit;
pub mod error;
pub mod report;
pub mod run;
pub mod scan;
pub mod suites;

pub use config::{Format, LambdaGrid, PotentialSpec, RunConfig, Suite, Tolerances};
pub use error::{CliError, ConfigError};
pub use report::{CaseRow, SuiteReport};
pub use run::{execute, run_suites, run_verify, Outcome, Verb};
pub use scan::{run_scan, ScanRow};
