use serde::Serialize;

use super::{
    assessed_to_true, AssessedPolicy, EpidemicError, ForestState, ModelInputs, PrivateArm, PublicArm, TrueStatePolicy,
};
use crate::bayes::posterior;
use crate::domain::{AssessedState, EconParams, Prevalence};
use crate::game::treatment_effects;
use crate::game::{optimal_subsidy, private_treatment_probability, public_treatment_decision, TreatmentEffect};
use crate::risk::{risk_profile, RiskError, RiskSnapshot};
use crate::scalar::Scalar;

/// Treatment effects `(k, l)` per assessed state at a community prevalence.
///
/// With no infested trees every effect is zero and Bayes is never invoked.
/// An assessed state that cannot occur under the prior is inactive and
/// also gets a zero effect.
pub fn effects_at_prevalence<T: Scalar>(
    prevalence: &Prevalence<T>,
    inputs: &ModelInputs<T>,
) -> Result<[TreatmentEffect<T>; 3], RiskError> {
    if prevalence.p_i() <= T::zero() {
        return Ok([TreatmentEffect::zero(); 3]);
    }
    let risks = risk_profile(&inputs.epidemic, &RiskSnapshot::from_prevalence(prevalence))?;
    Ok(
        AssessedState::ALL.map(|a| match posterior(prevalence, &inputs.matrix, a) {
            Ok(post) => treatment_effects(&post, &risks),
            Err(_) => TreatmentEffect::zero(),
        }),
    )
}

/// Private treatment probabilities and subsidies per assessed state.
pub fn private_policy<T: Scalar>(
    effects: &[TreatmentEffect<T>; 3],
    econ: &EconParams<T>,
    arm: PrivateArm,
) -> (AssessedPolicy<T>, [T; 3]) {
    let z = T::zero();
    match arm {
        PrivateArm::NoPrivateTreatment => (AssessedPolicy::zero(), [z; 3]),
        PrivateArm::NoSubsidy => (
            AssessedPolicy(effects.map(|e| private_treatment_probability(e.k, econ, z))),
            [z; 3],
        ),
        PrivateArm::OptimalSubsidy => {
            let d = effects.map(|e| optimal_subsidy(&e, econ, z));
            (AssessedPolicy(d.map(|d| d.treat_prob)), d.map(|d| d.s_star))
        }
    }
}

/// Public treatment rule per assessed state.
pub fn public_policy<T: Scalar>(
    effects: &[TreatmentEffect<T>; 3],
    econ: &EconParams<T>,
    arm: PublicArm,
) -> AssessedPolicy<T> {
    match arm {
        PublicArm::NoPublicTreatment => AssessedPolicy::zero(),
        PublicArm::OptimalPublic => AssessedPolicy(effects.map(|e| public_treatment_decision(&e, econ))),
    }
}

/// Policies in force at one forest state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PolicySnapshot<T> {
    pub effects: [TreatmentEffect<T>; 3],
    pub private: AssessedPolicy<T>,
    pub subsidies: [T; 3],
    pub public: AssessedPolicy<T>,
    pub true_m: TrueStatePolicy<T>,
    pub true_o: TrueStatePolicy<T>,
}

pub fn policy_at_state<T: Scalar>(
    state: &ForestState<T>,
    inputs: &ModelInputs<T>,
    private_arm: PrivateArm,
    public_arm: PublicArm,
) -> Result<PolicySnapshot<T>, EpidemicError> {
    let effects = effects_at_prevalence(&state.prevalence(), inputs)?;
    let (private, subsidies) = private_policy(&effects, &inputs.econ, private_arm);
    let public = public_policy(&effects, &inputs.econ, public_arm);
    Ok(PolicySnapshot {
        effects,
        private,
        subsidies,
        public,
        true_m: assessed_to_true(&public, &inputs.matrix),
        true_o: assessed_to_true(&private, &inputs.matrix),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::epidemic::fixtures::case_inputs;

    #[test]
    fn all_healthy_means_no_treatment() {
        let x = ForestState::from_array([0.4, 0.0, 0.0, 0.6, 0.0, 0.0]);
        let snap = policy_at_state(&x, &case_inputs(), PrivateArm::NoSubsidy, PublicArm::OptimalPublic).unwrap();
        assert_eq!(snap.private.0, [0.0; 3]);
        assert_eq!(snap.public.0, [0.0; 3]);
        assert_eq!(snap.true_o, TrueStatePolicy::zero());
    }

    #[test]
    fn no_private_treatment_arm_is_zero() {
        let x = ForestState::from_array([0.32, 0.06, 0.02, 0.48, 0.09, 0.03]);
        let snap = policy_at_state(
            &x,
            &case_inputs(),
            PrivateArm::NoPrivateTreatment,
            PublicArm::NoPublicTreatment,
        )
        .unwrap();
        assert_eq!(snap.true_o, TrueStatePolicy::zero());
        assert_eq!(snap.subsidies, [0.0; 3]);
    }

    #[test]
    fn case_study_subsidizes_assessed_infested() {
        // pooled prevalence (0.8, 0.15, 0.05)
        let x = ForestState::from_array([0.32, 0.06, 0.02, 0.48, 0.09, 0.03]);
        let inputs = case_inputs();
        let snap = policy_at_state(&x, &inputs, PrivateArm::OptimalSubsidy, PublicArm::OptimalPublic).unwrap();
        let infested = AssessedState::AssessedInfested.index();
        assert!(snap.subsidies[infested] > 0.0);
        assert!(snap.private.0[infested] > 0.0);

        // the closed form against a brute-force subsidy search
        let e = snap.effects[infested];
        let econ = inputs.econ;
        let n = 10_000;
        let best = (0..=n)
            .map(|i| {
                let s = econ.cost_c * i as f64 / n as f64;
                let price = econ.cost_c - s;
                let p = ((econ.b * e.k - price) / (e.k * (econ.b - econ.a))).clamp(0.0, 1.0);
                (econ.delta_m * (e.k + e.l) - s) * p
            })
            .fold(f64::NEG_INFINITY, f64::max);
        let d = optimal_subsidy(&e, &econ, 0.0);
        assert!(d.muni_eu >= best - 1e-6);
    }
}
