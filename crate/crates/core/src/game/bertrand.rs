use serde::Serialize;

use super::{acceptance_probability, half, TreatmentEffect};
use crate::domain::EconParams;
use crate::scalar::Scalar;

/// A firm's best reply to its rival's bid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum BidResponse<T> {
    /// No bid earns a positive expected profit; any bid at or above the
    /// firm's own net cost is a best reply.
    AnyBidAtLeast(T),
    /// Bid just below the rival, recorded at the rival's price.
    Undercut(T),
    /// The rival is priced out; bid the unconstrained optimum.
    Monopolist(T),
}

impl<T: Copy> BidResponse<T> {
    pub fn bid(&self) -> T {
        match *self {
            BidResponse::AnyBidAtLeast(p) | BidResponse::Undercut(p) | BidResponse::Monopolist(p) => p,
        }
    }
}

pub fn firm_best_response<T: Scalar>(p_other: T, s_own: T, k: T, a: T, b: T, cost_c: T) -> BidResponse<T> {
    let floor = cost_c - s_own;
    let p_prime = (half::<T>() * (b * k + cost_c - s_own)).max(a * k);
    if s_own < cost_c - b * k || p_other < floor {
        BidResponse::AnyBidAtLeast(floor)
    } else if p_other <= p_prime {
        BidResponse::Undercut(p_other)
    } else {
        BidResponse::Monopolist(p_prime)
    }
}

/// Expected profit of a firm bidding `p_own` against `p_other`. The lower
/// bid wins the job; ties split it.
pub fn firm_expected_profit<T: Scalar>(p_own: T, p_other: T, s_own: T, k: T, a: T, b: T, cost_c: T) -> T {
    let share = if p_own < p_other {
        T::one()
    } else if p_own == p_other {
        half()
    } else {
        return T::zero();
    };
    (p_own - (cost_c - s_own)) * acceptance_probability(p_own, k, a, b) * share
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct UnequalOutcome<T> {
    /// Winning bid faced by the owner.
    pub bid: T,
    pub treat_prob: T,
    pub muni_eu: T,
}

/// Market outcome when the two firms receive different subsidies. The
/// better-subsidized firm wins: it prices as a monopolist unless the rival's
/// net cost forces it lower, and the municipality pays its subsidy.
pub fn unequal_subsidy_outcome<T: Scalar>(
    s1: T,
    s2: T,
    effect: &TreatmentEffect<T>,
    econ: &EconParams<T>,
    pi_u: T,
) -> UnequalOutcome<T> {
    let (s_hi, s_lo) = if s1 >= s2 { (s1, s2) } else { (s2, s1) };
    let TreatmentEffect { k, l } = *effect;
    let c = econ.cost_c;
    if k <= T::zero() || s_hi < c - econ.b * k {
        return UnequalOutcome {
            bid: c - s_hi,
            treat_prob: T::zero(),
            muni_eu: pi_u,
        };
    }
    let p_prime = (half::<T>() * (econ.b * k + c - s_hi)).max(econ.a * k);
    let bid = if c - s_lo > p_prime { p_prime } else { c - s_lo };
    let treat_prob = acceptance_probability(bid, k, econ.a, econ.b);
    UnequalOutcome {
        bid,
        treat_prob,
        muni_eu: pi_u + (econ.delta_m * (k + l) - s_hi) * treat_prob,
    }
}
