//! Owner, firm and municipality decisions.

mod bertrand;
mod monopoly;
mod subsidy;

pub use bertrand::{firm_best_response, firm_expected_profit, unequal_subsidy_outcome, BidResponse, UnequalOutcome};
pub use monopoly::{monopoly_case, MonopolyOutcome};
pub use subsidy::{municipal_expected_utility, optimal_subsidy, SubsidyDecision, SubsidyRegime};

use serde::Serialize;
use thiserror::Error;

use crate::bayes::Posterior;
use crate::domain::{EconParams, TreeState};
use crate::risk::RiskProfile;
use crate::scalar::{lit, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum GameError {
    #[error("single-firm subsidy analysis needs b*k < c, got b*k = {bk} and c = {cost_c}")]
    PreconditionViolated { bk: f64, cost_c: f64 },
}

/// Survival gains from treating one tree: `k` for the tree itself, `l` for
/// the trees it would otherwise infest.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TreatmentEffect<T> {
    pub k: T,
    pub l: T,
}

impl<T: Scalar> TreatmentEffect<T> {
    pub fn zero() -> Self {
        TreatmentEffect {
            k: T::zero(),
            l: T::zero(),
        }
    }

    pub fn total(&self) -> T {
        self.k + self.l
    }
}

pub fn treatment_effects<T: Scalar>(post: &Posterior<T>, risks: &RiskProfile<T>) -> TreatmentEffect<T> {
    let mut k = T::zero();
    let mut l = T::zero();
    for s in [TreeState::Healthy, TreeState::Infested] {
        let w = post.get(s);
        let i = s.index();
        k += w * (risks.mu_u[i] - risks.mu_t[i]);
        l += w * (risks.lam_u[i] - risks.lam_t[i]);
    }
    TreatmentEffect { k, l }
}

/// Owner payoffs `(treated, untreated)` excluding the price paid. The
/// survival value is `v_o_share` and the mortality cost `delta_o - v_o_share`.
pub fn owner_payoffs<T: Scalar>(post: &Posterior<T>, risks: &RiskProfile<T>, delta_o: T, v_o_share: T) -> (T, T) {
    let w_o = delta_o - v_o_share;
    let payoff = |mu: &[T; 3]| -> T {
        TreeState::ALL
            .iter()
            .map(|&s| post.get(s) * ((T::one() - mu[s.index()]) * v_o_share - mu[s.index()] * w_o))
            .sum()
    };
    (payoff(&risks.mu_t), payoff(&risks.mu_u))
}

/// Ties go to treatment.
pub fn owner_decision<T: Scalar>(delta_o: T, k: T, price: T) -> bool {
    delta_o * k >= price
}

/// `P(price <= Δ_o k)` for `Δ_o ~ U[a, b]`.
pub fn acceptance_probability<T: Scalar>(price: T, k: T, a: T, b: T) -> T {
    let (z, o) = (T::zero(), T::one());
    if k == z {
        return if price <= z { o } else { z };
    }
    if k < z {
        // Δ_o k >= price  <=>  Δ_o <= price / k
        let x = price / k;
        return if x >= b {
            o
        } else if x < a {
            z
        } else {
            ((x - a) / (b - a)).min(o).max(z)
        };
    }
    if price <= a * k {
        o
    } else if price >= b * k {
        z
    } else {
        ((b * k - price) / (k * (b - a))).min(o).max(z)
    }
}

/// Probability an owner treats when firms price at `c - s`.
pub fn private_treatment_probability<T: Scalar>(k: T, econ: &EconParams<T>, s: T) -> T {
    acceptance_probability(econ.cost_c - s, k, econ.a, econ.b)
}

/// 1 when treating a public tree is worth its cost, else 0.
pub fn public_treatment_decision<T: Scalar>(effect: &TreatmentEffect<T>, econ: &EconParams<T>) -> T {
    if econ.cost_c <= econ.delta_m_prime * effect.total() {
        T::one()
    } else {
        T::zero()
    }
}

#[inline]
pub(crate) fn half<T: Scalar>() -> T {
    lit(0.5)
}
