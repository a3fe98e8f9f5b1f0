//! Six-compartment pest-spread model over public (`m`) and private (`o`)
//! trees, with treatment policies fed back from the current state.

mod dynamics;
mod integrate;
mod policy;
mod welfare;

pub use dynamics::{assessed_to_true, derivatives};
pub use integrate::{simulate, SimulationOptions};
pub use policy::{effects_at_prevalence, policy_at_state, private_policy, public_policy, PolicySnapshot};
pub use welfare::{welfare_flows, WelfareFlows};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{AssessmentMatrix, EconParams, EpidemicParams, Prevalence, Validate, ValidationReport, Violation};
use crate::risk::RiskError;
use crate::scalar::{lit, Scalar};

pub const COMPARTMENTS: [&str; 6] = ["H_m", "I_m", "D_m", "H_o", "I_o", "D_o"];

/// Population fractions by ownership and health.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForestState<T> {
    pub h_m: T,
    pub i_m: T,
    pub d_m: T,
    pub h_o: T,
    pub i_o: T,
    pub d_o: T,
}

impl<T: Scalar> ForestState<T> {
    pub fn from_array(x: [T; 6]) -> Self {
        ForestState {
            h_m: x[0],
            i_m: x[1],
            d_m: x[2],
            h_o: x[3],
            i_o: x[4],
            d_o: x[5],
        }
    }

    pub fn as_array(&self) -> [T; 6] {
        [self.h_m, self.i_m, self.d_m, self.h_o, self.i_o, self.d_o]
    }

    /// `public_share` of the trees are public; a fraction `infested` of
    /// each ownership starts infested and none are dying.
    pub fn seeded(public_share: T, infested: T) -> Result<Self, ValidationReport> {
        let o = T::one();
        ForestState {
            h_m: public_share * (o - infested),
            i_m: public_share * infested,
            d_m: T::zero(),
            h_o: (o - public_share) * (o - infested),
            i_o: (o - public_share) * infested,
            d_o: T::zero(),
        }
        .validate()
    }

    pub fn total(&self) -> T {
        self.as_array().into_iter().sum()
    }

    pub fn dying(&self) -> T {
        self.d_m + self.d_o
    }

    pub fn survival(&self) -> T {
        T::one() - self.dying()
    }

    /// Community prevalence `(H, I, D)` pooled over both ownerships.
    pub fn prevalence(&self) -> Prevalence<T> {
        Prevalence::normalized(self.pooled())
    }

    pub(crate) fn pooled(&self) -> [T; 3] {
        [self.h_m + self.h_o, self.i_m + self.i_o, self.d_m + self.d_o]
    }
}

impl<T: Scalar> Validate for ForestState<T> {
    fn validate(self) -> Result<Self, ValidationReport> {
        let mut violations = Vec::new();
        for (name, v) in COMPARTMENTS.iter().zip(self.as_array()) {
            if !(v >= T::zero() && v <= T::one()) {
                violations.push(Violation {
                    field: (*name).into(),
                    observed: v.to_f64_lossy(),
                    rule: "must lie in [0, 1]".into(),
                });
            }
        }
        let total = self.total();
        if violations.is_empty() && (total - T::one()).abs() > lit(T::STATE_TOL) {
            violations.push(Violation {
                field: "sum".into(),
                observed: total.to_f64_lossy(),
                rule: format!("compartments must sum to 1 (tolerance {:e})", T::STATE_TOL),
            });
        }
        ValidationReport { violations }.into_result(self)
    }
}

/// Treatment probability per assessed state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct AssessedPolicy<T>(pub [T; 3]);

impl<T: Scalar> AssessedPolicy<T> {
    pub fn zero() -> Self {
        AssessedPolicy([T::zero(); 3])
    }
}

/// Treatment probability per true state, after assessment error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TrueStatePolicy<T> {
    pub p_th: T,
    pub p_ti: T,
    /// Treatment of dying trees costs money but changes no dynamics.
    pub p_td: T,
}

impl<T: Scalar> TrueStatePolicy<T> {
    pub fn zero() -> Self {
        TrueStatePolicy {
            p_th: T::zero(),
            p_ti: T::zero(),
            p_td: T::zero(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PrivateArm {
    #[serde(rename = "none")]
    NoPrivateTreatment,
    #[serde(rename = "nosub")]
    NoSubsidy,
    #[serde(rename = "optimal")]
    OptimalSubsidy,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PublicArm {
    #[serde(rename = "none")]
    NoPublicTreatment,
    #[serde(rename = "optimal")]
    OptimalPublic,
}

impl PrivateArm {
    pub const ALL: [PrivateArm; 3] = [
        PrivateArm::NoPrivateTreatment,
        PrivateArm::NoSubsidy,
        PrivateArm::OptimalSubsidy,
    ];

    pub fn label(self) -> &'static str {
        match self {
            PrivateArm::NoPrivateTreatment => "none",
            PrivateArm::NoSubsidy => "nosub",
            PrivateArm::OptimalSubsidy => "optimal",
        }
    }
}

impl PublicArm {
    pub const ALL: [PublicArm; 2] = [PublicArm::NoPublicTreatment, PublicArm::OptimalPublic];

    pub fn label(self) -> &'static str {
        match self {
            PublicArm::NoPublicTreatment => "none",
            PublicArm::OptimalPublic => "optimal",
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown {kind} arm `{value}` (expected one of: {expected})")]
pub struct ParseArmError {
    pub kind: &'static str,
    pub value: String,
    pub expected: &'static str,
}

impl FromStr for PrivateArm {
    type Err = ParseArmError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "none" | "no_treatment" | "notreat" => Ok(PrivateArm::NoPrivateTreatment),
            "nosub" | "no_subsidy" | "unsubsidized" => Ok(PrivateArm::NoSubsidy),
            "optimal" | "opt" | "subsidy" => Ok(PrivateArm::OptimalSubsidy),
            other => Err(ParseArmError {
                kind: "private",
                value: other.into(),
                expected: "none, nosub, optimal",
            }),
        }
    }
}

impl FromStr for PublicArm {
    type Err = ParseArmError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "none" | "no_treatment" | "notreat" => Ok(PublicArm::NoPublicTreatment),
            "optimal" | "opt" => Ok(PublicArm::OptimalPublic),
            other => Err(ParseArmError {
                kind: "public",
                value: other.into(),
                expected: "none, optimal",
            }),
        }
    }
}

impl fmt::Display for PrivateArm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl fmt::Display for PublicArm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// A policy pair, optionally enacted only from `switch_time` onwards.
/// Before the switch, owners treat unsubsidized and the city does nothing.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec<T> {
    pub private_arm: PrivateArm,
    pub public_arm: PublicArm,
    pub switch_time: Option<T>,
}

impl<T: Scalar> ScenarioSpec<T> {
    pub fn new(private_arm: PrivateArm, public_arm: PublicArm) -> Self {
        ScenarioSpec {
            private_arm,
            public_arm,
            switch_time: None,
        }
    }

    pub fn switched_at(mut self, t: T) -> Self {
        self.switch_time = Some(t);
        self
    }

    /// The six combinations of private and public arms.
    pub fn matrix() -> Vec<Self> {
        PrivateArm::ALL
            .iter()
            .flat_map(|&p| PublicArm::ALL.iter().map(move |&q| ScenarioSpec::new(p, q)))
            .collect()
    }

    pub fn arms_at(&self, t: T) -> (PrivateArm, PublicArm) {
        match self.switch_time {
            Some(ts) if t < ts => (PrivateArm::NoSubsidy, PublicArm::NoPublicTreatment),
            _ => (self.private_arm, self.public_arm),
        }
    }

    pub fn file_stem(&self) -> String {
        format!("traj_{}_{}", self.private_arm.label(), self.public_arm.label())
    }
}

/// Everything the model needs besides the state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ModelInputs<T> {
    pub epidemic: EpidemicParams<T>,
    pub econ: EconParams<T>,
    pub matrix: AssessmentMatrix<T>,
}

/// One output sample of a trajectory.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TrajectoryRecord<T> {
    pub time: T,
    pub state: ForestState<T>,
    pub policy_m: TrueStatePolicy<T>,
    pub policy_o: TrueStatePolicy<T>,
    pub subsidies: [T; 3],
    pub welfare: Option<WelfareFlows<T>>,
}

#[derive(Debug, Error, PartialEq)]
pub enum EpidemicError {
    #[error(
        "step too large: {compartment} reached {value:e} at t = {time} with dt = {dt}; \
         rerun with a smaller --dt (the default is 1/64 year)"
    )]
    StepTooLarge {
        time: f64,
        dt: f64,
        compartment: &'static str,
        value: f64,
    },
    #[error(transparent)]
    Risk(#[from] RiskError),
    #[error("welfare accounting needs v_m, w_m and w_m_prime in the economic parameters")]
    MissingDecomposition,
    #[error("invalid forest state: {0}")]
    InvalidState(ValidationReport),
    #[error("invalid simulation option: {0}")]
    InvalidOption(String),
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;
    use crate::domain::SocialValues;

    pub fn case_inputs() -> ModelInputs<f64> {
        ModelInputs {
            epidemic: EpidemicParams {
                beta: 1.0,
                gamma: 0.3,
                alpha: 1.0,
                eps_h: 0.97,
                eps_i: 0.5,
                tau_star: 3.0,
            },
            econ: EconParams {
                cost_c: 250.0,
                a: 675.0,
                b: 1100.0,
                delta_m: 1150.0,
                delta_m_prime: 1850.0,
                decomposition: Some(SocialValues {
                    v_m: 1000.0,
                    w_m: 150.0,
                    w_m_prime: 850.0,
                }),
            },
            matrix: AssessmentMatrix::new([[0.89, 0.1, 0.01], [0.49, 0.5, 0.01], [0.01, 0.19, 0.8]]).unwrap(),
        }
    }

    pub fn case_initial() -> ForestState<f64> {
        ForestState::seeded(0.4, 0.01).unwrap()
    }
}
