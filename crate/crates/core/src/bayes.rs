//! Bayes updating of true tree state from an assessment.

use serde::Serialize;
use thiserror::Error;

use crate::domain::{AssessedState, AssessmentMatrix, Prevalence, TreeState};
use crate::scalar::Scalar;

/// `P(true state | assessed state)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Posterior<T> {
    pub p_h_given: T,
    pub p_i_given: T,
    pub p_d_given: T,
}

impl<T: Scalar> Posterior<T> {
    pub fn as_array(&self) -> [T; 3] {
        [self.p_h_given, self.p_i_given, self.p_d_given]
    }

    pub fn get(&self, s: TreeState) -> T {
        self.as_array()[s.index()]
    }

    fn from_array(p: [T; 3]) -> Self {
        Posterior {
            p_h_given: p[0],
            p_i_given: p[1],
            p_d_given: p[2],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum BayesError {
    #[error("assessed state `{0}` has zero probability under the prior")]
    ZeroMarginal(AssessedState),
}

/// Marginal probability that a tree is assessed as `assessed`.
pub fn marginal<T: Scalar>(prior: &Prevalence<T>, matrix: &AssessmentMatrix<T>, assessed: AssessedState) -> T {
    TreeState::ALL
        .iter()
        .map(|&s| matrix.entry(s, assessed) * prior.get(s))
        .sum()
}

pub fn posterior<T: Scalar>(
    prior: &Prevalence<T>,
    matrix: &AssessmentMatrix<T>,
    assessed: AssessedState,
) -> Result<Posterior<T>, BayesError> {
    let joint = TreeState::ALL.map(|s| matrix.entry(s, assessed) * prior.get(s));
    let m = joint[0] + joint[1] + joint[2];
    if m <= T::zero() {
        return Err(BayesError::ZeroMarginal(assessed));
    }
    Ok(Posterior::from_array(joint.map(|j| j / m)))
}

/// Share of trees landing in each assessed state.
pub fn assessed_shares<T: Scalar>(prior: &Prevalence<T>, matrix: &AssessmentMatrix<T>) -> [T; 3] {
    AssessedState::ALL.map(|a| marginal(prior, matrix, a))
}
