//! Perceived direct (`μ`) and spillover (`λ`) mortality risks.

use serde::Serialize;
use thiserror::Error;

use crate::domain::{EpidemicParams, Prevalence, TreeState, ValidationReport, Violation};
use crate::scalar::{lit, one_minus_exp_over, Scalar};

/// Community fractions that drive risk perception.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RiskSnapshot<T> {
    i0: T,
    h0_comm: T,
}

impl<T: Scalar> RiskSnapshot<T> {
    pub fn new(i0: T, h0_comm: T) -> Result<Self, ValidationReport> {
        let mut violations = Vec::new();
        for (field, v) in [("i0", i0), ("h0_comm", h0_comm)] {
            if !(v >= T::zero() && v <= T::one()) {
                violations.push(Violation {
                    field: field.into(),
                    observed: v.to_f64_lossy(),
                    rule: "must lie in [0, 1]".into(),
                });
            }
        }
        if violations.is_empty() && i0 + h0_comm > T::one() + lit(T::PROB_TOL) {
            violations.push(Violation {
                field: "i0 + h0_comm".into(),
                observed: (i0 + h0_comm).to_f64_lossy(),
                rule: "must not exceed 1".into(),
            });
        }
        ValidationReport { violations }.into_result(RiskSnapshot { i0, h0_comm })
    }

    pub fn from_prevalence(p: &Prevalence<T>) -> Self {
        RiskSnapshot {
            i0: p.p_i(),
            h0_comm: p.p_h(),
        }
    }

    pub fn i0(&self) -> T {
        self.i0
    }

    pub fn h0_comm(&self) -> T {
        self.h0_comm
    }
}

/// Risks per true state, indexed by [`TreeState::index`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RiskProfile<T> {
    pub mu_u: [T; 3],
    pub mu_t: [T; 3],
    pub lam_u: [T; 3],
    pub lam_t: [T; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum RiskError {
    #[error("treated-infested exit rate gamma*(1-eps_i) + alpha*eps_i is zero (alpha = 0 and eps_i = 1)")]
    DegenerateRates,
}

/// Probability of being dead after `tau` in the chain healthy -> infested
/// (rate `r1`) -> dying (rate `r2`), from the initial split `(h0, i0, d0)`.
///
/// The healthy-start term is written in the rates' minimum and maximum so it
/// has no pole at `r1 = r2`.
pub fn bateman_d<T: Scalar>(h0: T, i0: T, d0: T, r1: T, r2: T, tau: T) -> T {
    let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
    let from_infested = -(-r2 * tau).exp_m1();
    let survive_both = (-lo * tau).exp() * (T::one() + lo * tau * one_minus_exp_over((hi - lo) * tau));
    let from_healthy = T::one() - survive_both;
    let d = d0 + i0 * from_infested + h0 * from_healthy;
    d.max(T::zero()).min(T::one())
}

/// `(mu_u, mu_t)` at horizon `tau_star`.
pub fn direct_risks<T: Scalar>(params: &EpidemicParams<T>, snap: &RiskSnapshot<T>) -> ([T; 3], [T; 3]) {
    let (z, o) = (T::zero(), T::one());
    let tau = params.tau_star;
    let r1_u = params.beta * snap.i0;
    let r2_u = params.gamma;
    let r1_t = r1_u * (o - params.eps_h);
    let r2_t = params.gamma * (o - params.eps_i);
    let healthy = |r1: T, r2: T| {
        if snap.i0 == z {
            z
        } else {
            bateman_d(o, z, z, r1, r2, tau)
        }
    };
    let mu_u = [healthy(r1_u, r2_u), bateman_d(z, o, z, r1_u, r2_u, tau), o];
    let mu_t = [healthy(r1_t, r2_t), bateman_d(z, o, z, r1_t, r2_t, tau), o];
    (mu_u, mu_t)
}

/// `(lam_u, lam_t)`: expected mortality among other trees from one focal tree.
pub fn spillover_risks<T: Scalar>(
    params: &EpidemicParams<T>,
    snap: &RiskSnapshot<T>,
) -> Result<([T; 3], [T; 3]), RiskError> {
    let z = T::zero();
    let o = T::one();
    let treated_exit = params.gamma * (o - params.eps_i) + params.alpha * params.eps_i;
    if treated_exit <= z {
        return Err(RiskError::DegenerateRates);
    }
    if snap.h0_comm == z {
        return Ok(([z; 3], [z; 3]));
    }
    let reach = params.beta * snap.h0_comm;
    let lam_ui = reach / params.gamma;
    let lam_ti = reach / treated_exit;
    let (lam_uh, lam_th) = if snap.i0 == z {
        (z, z)
    } else {
        let tau = params.tau_star;
        let infect_u = -(-params.beta * snap.i0 * tau).exp_m1();
        let infect_t = -(-params.beta * snap.i0 * (o - params.eps_h) * tau).exp_m1();
        (infect_u * lam_ui, infect_t * lam_ti)
    };
    Ok(([lam_uh, lam_ui, z], [lam_th, lam_ti, z]))
}

pub fn risk_profile<T: Scalar>(
    params: &EpidemicParams<T>,
    snap: &RiskSnapshot<T>,
) -> Result<RiskProfile<T>, RiskError> {
    let (mu_u, mu_t) = direct_risks(params, snap);
    let (lam_u, lam_t) = spillover_risks(params, snap)?;
    Ok(RiskProfile {
        mu_u,
        mu_t,
        lam_u,
        lam_t,
    })
}

impl<T: Scalar> RiskProfile<T> {
    pub fn mu_u(&self, s: TreeState) -> T {
        self.mu_u[s.index()]
    }

    pub fn mu_t(&self, s: TreeState) -> T {
        self.mu_t[s.index()]
    }
}
