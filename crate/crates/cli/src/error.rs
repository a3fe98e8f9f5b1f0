use std::path::PathBuf;

use forest_pest::epidemic::EpidemicError;
use forest_pest::sweep::SweepError;
use forest_pest::ValidationReport;
use thiserror::Error;

/// Failures with a dedicated exit code.
#[derive(Debug, Error)]
pub enum Failure {
    #[error("no configuration given; pass --config PATH")]
    NoConfig,
    #[error("cannot read configuration {}", path.display())]
    ConfigRead { path: PathBuf, source: std::io::Error },
    #[error("malformed configuration {}", path.display())]
    ConfigParse { path: PathBuf, source: serde_json::Error },
    #[error("invalid configuration {}:\n{report}", path.display())]
    ConfigInvalid { path: PathBuf, report: ValidationReport },
    #[error("invalid setting: {0}")]
    Setting(String),
    #[error("cannot write {}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Step(EpidemicError),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::NoConfig
            | Failure::ConfigRead { .. }
            | Failure::ConfigParse { .. }
            | Failure::ConfigInvalid { .. }
            | Failure::Setting(_) => 2,
            Failure::Io { .. } => 3,
            Failure::Step(_) => 4,
        }
    }
}

impl From<EpidemicError> for Failure {
    fn from(e: EpidemicError) -> Self {
        match e {
            EpidemicError::StepTooLarge { .. } => Failure::Step(e),
            other => Failure::Setting(other.to_string()),
        }
    }
}

impl From<SweepError> for Failure {
    fn from(e: SweepError) -> Self {
        match e {
            SweepError::Epidemic(inner) => inner.into(),
            other => Failure::Setting(other.to_string()),
        }
    }
}

/// Exit code for an error chain: the first `Failure` found, else 1.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    err.chain()
        .find_map(|e| e.downcast_ref::<Failure>())
        .map_or(1, Failure::exit_code)
}
