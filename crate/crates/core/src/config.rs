//! The JSON configuration document: `epidemic`, `econ`, `assessment`
//! (3x3, rows = true state) and `prevalence`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{
    AssessmentMatrix, EconInput, EconParams, EpidemicParams, Prevalence, PrevalenceInput, Validate, ValidationReport,
};
use crate::epidemic::ModelInputs;
use crate::scalar::Scalar;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("malformed configuration: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid configuration: {0}")]
    Invalid(ValidationReport),
}

/// The document as written, before validation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelConfigInput<T> {
    pub epidemic: EpidemicParams<T>,
    pub econ: EconInput<T>,
    pub assessment: [[T; 3]; 3],
    pub prevalence: PrevalenceInput<T>,
}

/// A validated configuration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ModelConfig<T> {
    pub epidemic: EpidemicParams<T>,
    pub econ: EconParams<T>,
    pub assessment: AssessmentMatrix<T>,
    pub prevalence: Prevalence<T>,
}

impl<T: Scalar> ModelConfigInput<T> {
    /// Validates every block, collecting all violations.
    pub fn validate(self) -> Result<ModelConfig<T>, ValidationReport> {
        let mut report = ValidationReport::default();
        let epidemic = self
            .epidemic
            .validate()
            .map_err(|e| report.merge(e.scoped("epidemic")))
            .ok();
        let econ = self.econ.resolve().map_err(|e| report.merge(e.scoped("econ"))).ok();
        let assessment = AssessmentMatrix::new(self.assessment)
            .map_err(|e| report.merge(e.scoped("assessment")))
            .ok();
        let prevalence = self
            .prevalence
            .resolve()
            .map_err(|e| report.merge(e.scoped("prevalence")))
            .ok();
        match (epidemic, econ, assessment, prevalence) {
            (Some(epidemic), Some(econ), Some(assessment), Some(prevalence)) if report.is_empty() => Ok(ModelConfig {
                epidemic,
                econ,
                assessment,
                prevalence,
            }),
            _ => Err(report),
        }
    }
}

impl<T: Scalar> ModelConfig<T> {
    pub fn inputs(&self) -> ModelInputs<T> {
        ModelInputs {
            epidemic: self.epidemic,
            econ: self.econ,
            matrix: self.assessment,
        }
    }
}

impl<T: Scalar + serde::de::DeserializeOwned> ModelConfig<T> {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let input: ModelConfigInput<T> = serde_json::from_str(text)?;
        input.validate().map_err(ConfigError::Invalid)
    }
}
