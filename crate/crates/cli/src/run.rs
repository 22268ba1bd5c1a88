use std::path::PathBuf;

use crate::config::{RunConfig, Suite};
use crate::emit;
use crate::error::{CliError, ConfigError};
use crate::report::SuiteReport;
use crate::scan;
use crate::suites::{run_suite, SuiteContext};

/// Runs the configured suites in order; an empty list means every suite.
pub fn run_verify(config: &RunConfig) -> Result<Vec<SuiteReport>, ConfigError> {
    let suites: Vec<Suite> = if config.suites.is_empty() { Suite::ALL.to_vec() } else { config.suites.clone() };
    run_suites(config, &suites)
}

pub fn run_suites(config: &RunConfig, suites: &[Suite]) -> Result<Vec<SuiteReport>, ConfigError> {
    config.validate()?;
    let ctx = SuiteContext::from_config(config)?;
    Ok(suites.iter().map(|s| run_suite(*s, &ctx)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verb {
    Verify,
    Scan,
    Gradients,
    DeltaProbe,
}

#[derive(Debug)]
pub struct Outcome {
    pub passed: bool,
    pub reports: Vec<SuiteReport>,
    pub files: Vec<PathBuf>,
}

impl Outcome {
    pub fn exit_code(&self) -> u8 {
        if self.passed {
            0
        } else {
            1
        }
    }
}

fn persist(config: &RunConfig, reports: Vec<SuiteReport>) -> Result<Outcome, CliError> {
    let mut files = Vec::new();
    for r in &reports {
        files.extend(emit::emit_report(r, config.format, &config.output_dir)?);
    }
    if config.format.json() {
        files.push(emit::emit_summary(&reports, &config.output_dir)?);
    }
    Ok(Outcome { passed: reports.iter().all(|r| r.passed()), reports, files })
}

/// Runs a verb and writes its outputs to `config.output_dir`.
pub fn execute(verb: Verb, config: &RunConfig) -> Result<Outcome, CliError> {
    match verb {
        Verb::Verify => persist(config, run_verify(config)?),
        Verb::Gradients => persist(config, run_suites(config, &[Suite::Gradients])?),
        Verb::DeltaProbe => persist(config, run_suites(config, &[Suite::Theorem44Delta])?),
        Verb::Scan => {
            let rows = scan::run_scan(config)?;
            let files = emit::emit_scan(&rows, config.format, &config.output_dir)?;
            Ok(Outcome { passed: rows.iter().all(|r| r.flag.is_empty()), reports: Vec::new(), files })
        }
    }
}
