use serde::Serialize;

use super::{acceptance_probability, half, TreatmentEffect};
use crate::domain::EconParams;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SubsidyRegime {
    FreeRiding,
    FullCoverage,
    Interior,
    NoSubsidy,
}

/// Equilibrium of the subsidy game for one assessed state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SubsidyDecision<T> {
    pub s_star: T,
    pub regime: SubsidyRegime,
    /// Price faced by the owner; firms pass the subsidy through.
    pub price: T,
    pub treat_prob: T,
    pub muni_eu: T,
}

/// Municipal expected utility when both firms receive subsidy `s`.
pub fn municipal_expected_utility<T: Scalar>(s: T, effect: &TreatmentEffect<T>, econ: &EconParams<T>, pi_u: T) -> T {
    let p = acceptance_probability(econ.cost_c - s, effect.k, econ.a, econ.b);
    pi_u + (econ.delta_m * effect.total() - s) * p
}

pub fn optimal_subsidy<T: Scalar>(effect: &TreatmentEffect<T>, econ: &EconParams<T>, pi_u: T) -> SubsidyDecision<T> {
    let z = T::zero();
    let TreatmentEffect { k, l } = *effect;
    let c = econ.cost_c;
    if k <= z {
        return SubsidyDecision {
            s_star: z,
            regime: SubsidyRegime::NoSubsidy,
            price: c,
            treat_prob: z,
            muni_eu: pi_u,
        };
    }
    let (ak, bk) = (econ.a * k, econ.b * k);
    let gain = econ.delta_m * (k + l);
    let full_threshold = c + bk - ak - ak;
    let (regime, s_star) = if c <= ak {
        (SubsidyRegime::FreeRiding, z)
    } else if full_threshold <= gain {
        (SubsidyRegime::FullCoverage, c - ak)
    } else if (c - bk).abs() < gain {
        (SubsidyRegime::Interior, half::<T>() * (gain + c - bk))
    } else {
        (SubsidyRegime::NoSubsidy, z)
    };
    let price = c - s_star;
    // c - (c - ak) need not round back to ak
    let treat_prob = if regime == SubsidyRegime::FullCoverage {
        T::one()
    } else {
        acceptance_probability(price, k, econ.a, econ.b)
    };
    SubsidyDecision {
        s_star,
        regime,
        price,
        treat_prob,
        muni_eu: pi_u + (gain - s_star) * treat_prob,
    }
}
