use serde::Serialize;

use super::{assessed_to_true, AssessedPolicy, EpidemicError, ForestState, ModelInputs};
use crate::domain::TreeState;
use crate::scalar::Scalar;

/// Annualized municipal welfare flows per ownership (currency per year,
/// per unit of tree population).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WelfareFlows<T> {
    pub benefit_m: T,
    pub benefit_o: T,
    pub public_treatment_cost: T,
    pub subsidy_cost: T,
    pub mortality_cost_m: T,
    pub mortality_cost_o: T,
    pub net_m: T,
    pub net_o: T,
}

/// `rates` are the compartment derivatives at `state`.
pub fn welfare_flows<T: Scalar>(
    state: &ForestState<T>,
    rates: &[T; 6],
    public: &AssessedPolicy<T>,
    private: &AssessedPolicy<T>,
    subsidies: &[T; 3],
    inputs: &ModelInputs<T>,
) -> Result<WelfareFlows<T>, EpidemicError> {
    let values = inputs.econ.decomposition.ok_or(EpidemicError::MissingDecomposition)?;
    let tau = inputs.epidemic.tau_star;
    let per_year = values.v_m / tau;

    let benefit_m = per_year * (state.h_m + state.i_m);
    let benefit_o = per_year * (state.h_o + state.i_o);

    let pm = assessed_to_true(public, &inputs.matrix);
    let treated_public = pm.p_th * state.h_m + pm.p_ti * state.i_m + pm.p_td * state.d_m;
    let public_treatment_cost = inputs.econ.cost_c / tau * treated_public;

    let private_pop = [state.h_o, state.i_o, state.d_o];
    let mut subsidy_cost = T::zero();
    for (j, (&s, &p)) in subsidies.iter().zip(&private.0).enumerate() {
        let share: T = TreeState::ALL
            .iter()
            .map(|&t| inputs.matrix.row(t)[j] * private_pop[t.index()])
            .sum();
        subsidy_cost += s * p * share;
    }
    subsidy_cost /= tau;

    let mortality_cost_m = rates[2] * values.w_m_prime;
    let mortality_cost_o = rates[5] * values.w_m;

    Ok(WelfareFlows {
        benefit_m,
        benefit_o,
        public_treatment_cost,
        subsidy_cost,
        mortality_cost_m,
        mortality_cost_o,
        net_m: benefit_m - public_treatment_cost - mortality_cost_m,
        net_o: benefit_o - subsidy_cost - mortality_cost_o,
    })
}
