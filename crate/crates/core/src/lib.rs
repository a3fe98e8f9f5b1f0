//! Policy computation and simulation for pest treatment in urban forests
//! split between public and private ownership.
//!
//! A municipality subsidizes treatment of private trees and decides whether
//! to treat its own, each tree's state known only through an imperfect
//! assessment. [`game`] computes the equilibrium subsidies and treatment
//! probabilities for one community state; [`epidemic`] feeds them back into
//! a six-compartment spread model; [`sweep`] batches both.
//!
//! All numerics are generic over [`Scalar`] (`f32` or `f64`). The aliases
//! below fix the scalar to `f64`, which is what the command-line driver and
//! the CSV writers use.

pub mod bayes;
pub mod config;
pub mod domain;
pub mod epidemic;
pub mod game;
pub mod risk;
pub mod scalar;
pub mod sweep;
pub mod tables;

pub use domain::{AssessedState, TreeState, Validate, ValidationReport};
pub use epidemic::{PrivateArm, PublicArm};
pub use game::SubsidyRegime;
pub use scalar::Scalar;

pub type Prevalence = domain::Prevalence<f64>;
pub type AssessmentMatrix = domain::AssessmentMatrix<f64>;
pub type EpidemicParams = domain::EpidemicParams<f64>;
pub type EconParams = domain::EconParams<f64>;
pub type Posterior = bayes::Posterior<f64>;
pub type RiskSnapshot = risk::RiskSnapshot<f64>;
pub type RiskProfile = risk::RiskProfile<f64>;
pub type TreatmentEffect = game::TreatmentEffect<f64>;
pub type SubsidyDecision = game::SubsidyDecision<f64>;
pub type MonopolyOutcome = game::MonopolyOutcome<f64>;
pub type ForestState = epidemic::ForestState<f64>;
pub type ModelInputs = epidemic::ModelInputs<f64>;
pub type ScenarioSpec = epidemic::ScenarioSpec<f64>;
pub type SimulationOptions = epidemic::SimulationOptions<f64>;
pub type TrajectoryRecord = epidemic::TrajectoryRecord<f64>;
pub type ModelConfig = config::ModelConfig<f64>;
