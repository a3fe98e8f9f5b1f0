use serde::Serialize;

use super::{GameError, TreatmentEffect};
use crate::domain::EconParams;
use crate::scalar::{lit, Scalar};

/// Outcome when only one firm is subsidized.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MonopolyOutcome<T> {
    pub s1_star: T,
    pub p1_star: T,
    pub treat_prob: T,
    pub muni_eu: T,
    pub firm_eu: T,
}

/// Requires `b k < c`, so the unsubsidized firm can never profitably treat.
pub fn monopoly_case<T: Scalar>(
    effect: &TreatmentEffect<T>,
    econ: &EconParams<T>,
    pi_u: T,
) -> Result<MonopolyOutcome<T>, GameError> {
    let TreatmentEffect { k, l } = *effect;
    let c = econ.cost_c;
    let (ak, bk) = (econ.a * k, econ.b * k);
    if bk >= c {
        return Err(GameError::PreconditionViolated {
            bk: bk.to_f64_lossy(),
            cost_c: c.to_f64_lossy(),
        });
    }
    let z = T::zero();
    let gain = econ.delta_m * (k + l);
    if k <= z || gain < c - bk {
        return Ok(MonopolyOutcome {
            s1_star: z,
            p1_star: c,
            treat_prob: z,
            muni_eu: pi_u,
            firm_eu: z,
        });
    }
    let (two, three, four) = (lit::<T>(2.0), lit::<T>(3.0), lit::<T>(4.0));
    if gain < c + three * bk - four * ak {
        let surplus = gain - c + bk;
        let spread = k * (econ.b - econ.a);
        Ok(MonopolyOutcome {
            s1_star: (gain + c - bk) / two,
            p1_star: (c + three * bk - gain) / four,
            treat_prob: surplus / (four * spread),
            muni_eu: pi_u + surplus * surplus / (lit::<T>(8.0) * spread),
            firm_eu: surplus * surplus / (lit::<T>(16.0) * spread),
        })
    } else {
        Ok(MonopolyOutcome {
            s1_star: c + bk - two * ak,
            p1_star: ak,
            treat_prob: T::one(),
            muni_eu: pi_u + gain - c - bk + two * ak,
            firm_eu: bk - ak,
        })
    }
}
