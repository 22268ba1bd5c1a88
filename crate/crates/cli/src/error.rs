use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot parse configuration: {0}")]
    Parse(String),
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
    #[error("unknown tolerance `{0}`")]
    UnknownTolerance(String),
    #[error("tolerance `{name}` must be positive, got {value}")]
    NonPositiveTolerance { name: String, value: f64 },
    #[error("invalid λ grid: {0}")]
    Grid(String),
    #[error("no seed given in the configuration or on the command line")]
    MissingSeed,
    #[error("invalid potential: {0}")]
    Potential(#[from] ahnls::Error),
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("cannot serialize report: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// Process exit status: 2 for configuration problems, 1 otherwise.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            _ => 1,
        }
    }
}
