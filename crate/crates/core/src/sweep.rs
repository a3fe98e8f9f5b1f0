//! Batch drivers: simplex policy maps, Δ_m sweeps, scenario matrices and
//! intervention-timing studies. Work is spread over the rayon pool; results
//! always come back in input order.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::bayes::posterior;
use crate::domain::{AssessedState, Prevalence, TreeState};
use crate::epidemic::{
    effects_at_prevalence, simulate, EpidemicError, ForestState, ModelInputs, PrivateArm, PublicArm, ScenarioSpec,
    SimulationOptions, TrajectoryRecord,
};
use crate::game::{optimal_subsidy, private_treatment_probability, public_treatment_decision};
use crate::risk::{risk_profile, RiskError, RiskSnapshot};
use crate::scalar::Scalar;

#[derive(Debug, Error, PartialEq)]
pub enum SweepError {
    #[error("sweep range is empty")]
    EmptyRange,
    #[error("simplex resolution must be at least 1")]
    ZeroResolution,
    #[error(transparent)]
    Risk(#[from] RiskError),
    #[error(transparent)]
    Epidemic(#[from] EpidemicError),
}

/// Points `(i/n, j/n, (n-i-j)/n)` of the prevalence simplex, corners and
/// edges included, ordered by `i` then `j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SimplexGrid {
    resolution: usize,
}

impl SimplexGrid {
    pub fn new(resolution: usize) -> Result<Self, SweepError> {
        if resolution == 0 {
            return Err(SweepError::ZeroResolution);
        }
        Ok(SimplexGrid { resolution })
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn len(&self) -> usize {
        (self.resolution + 1) * (self.resolution + 2) / 2
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn points<T: Scalar>(&self) -> Vec<Prevalence<T>> {
        let n = self.resolution;
        let nt = T::from_usize(n).unwrap();
        let mut out = Vec::with_capacity(self.len());
        for i in 0..=n {
            for j in 0..=n - i {
                let f = |v: usize| T::from_usize(v).unwrap() / nt;
                out.push(Prevalence::new(f(i), f(j), f(n - i - j)).expect("grid points lie on the simplex"));
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PolicyRow<T> {
    pub prevalence: Prevalence<T>,
    pub assessed: AssessedState,
    pub k: T,
    pub l: T,
    pub s_star: T,
    pub treat_prob_subsidized: T,
    pub treat_prob_unsubsidized: T,
    pub public_treat: T,
}

/// Equilibrium policies for each assessed state at one prevalence.
pub fn policy_at_point<T: Scalar>(
    prevalence: &Prevalence<T>,
    inputs: &ModelInputs<T>,
) -> Result<[PolicyRow<T>; 3], RiskError> {
    let effects = effects_at_prevalence(prevalence, inputs)?;
    let econ = &inputs.econ;
    Ok(AssessedState::ALL.map(|a| {
        let e = effects[a.index()];
        let d = optimal_subsidy(&e, econ, T::zero());
        PolicyRow {
            prevalence: *prevalence,
            assessed: a,
            k: e.k,
            l: e.l,
            s_star: d.s_star,
            treat_prob_subsidized: d.treat_prob,
            treat_prob_unsubsidized: private_treatment_probability(e.k, econ, T::zero()),
            public_treat: public_treatment_decision(&e, econ),
        }
    }))
}

/// Three rows per grid point, in grid order.
pub fn policy_map<T: Scalar>(grid: &SimplexGrid, inputs: &ModelInputs<T>) -> Result<Vec<PolicyRow<T>>, SweepError> {
    let rows: Result<Vec<[PolicyRow<T>; 3]>, RiskError> =
        grid.points().par_iter().map(|p| policy_at_point(p, inputs)).collect();
    Ok(rows?.into_iter().flatten().collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DeltaRow<T> {
    pub delta_m: T,
    pub assessed: AssessedState,
    pub s_star: T,
    pub treat_prob: T,
    /// `1 - Σ_φ P(φ|φ̂) [P μ_t(φ) + (1 - P) μ_u(φ)]`, with `P` the
    /// equilibrium treatment probability. NaN if the assessed state cannot
    /// occur at this prevalence.
    pub survival_3y: T,
}

/// Subsidy, treatment probability and expected survival over the planning
/// horizon, for each `Δ_m` in `deltas` and each assessed state.
pub fn delta_sweep<T: Scalar>(
    deltas: &[T],
    inputs: &ModelInputs<T>,
    prevalence: &Prevalence<T>,
) -> Result<Vec<DeltaRow<T>>, SweepError> {
    if deltas.is_empty() {
        return Err(SweepError::EmptyRange);
    }
    let effects = effects_at_prevalence(prevalence, inputs)?;
    let risks = risk_profile(&inputs.epidemic, &RiskSnapshot::from_prevalence(prevalence))?;
    let posteriors = AssessedState::ALL.map(|a| posterior(prevalence, &inputs.matrix, a).ok());
    let rows: Vec<[DeltaRow<T>; 3]> = deltas
        .par_iter()
        .map(|&delta_m| {
            let econ = inputs.econ.with_delta_m(delta_m);
            AssessedState::ALL.map(|a| {
                let d = optimal_subsidy(&effects[a.index()], &econ, T::zero());
                let survival_3y = match posteriors[a.index()] {
                    Some(post) => {
                        let p = d.treat_prob;
                        let dead: T = TreeState::ALL
                            .iter()
                            .map(|&s| post.get(s) * (p * risks.mu_t(s) + (T::one() - p) * risks.mu_u(s)))
                            .sum();
                        T::one() - dead
                    }
                    None => T::nan(),
                };
                DeltaRow {
                    delta_m,
                    assessed: a,
                    s_star: d.s_star,
                    treat_prob: d.treat_prob,
                    survival_3y,
                }
            })
        })
        .collect();
    Ok(rows.into_iter().flatten().collect())
}

/// `count` evenly spaced values from `lo` to `hi` inclusive.
pub fn linspace<T: Scalar>(lo: T, hi: T, count: usize) -> Vec<T> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let span = T::from_usize(count - 1).unwrap();
            (0..count)
                .map(|i| {
                    let f = T::from_usize(i).unwrap() / span;
                    lo + (hi - lo) * f
                })
                .collect()
        }
    }
}

/// Runs every scenario, in order.
pub fn run_scenarios<T: Scalar>(
    scenarios: &[ScenarioSpec<T>],
    initial: &ForestState<T>,
    inputs: &ModelInputs<T>,
    opts: &SimulationOptions<T>,
) -> Result<Vec<Vec<TrajectoryRecord<T>>>, EpidemicError> {
    scenarios
        .par_iter()
        .map(|s| simulate(initial, inputs, s, opts))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TimingRow<T> {
    pub switch_time: T,
    /// `1 - D_m - D_o` at the horizon.
    pub survival_total: T,
    /// Surviving share of public trees.
    pub survival_public: T,
    /// Surviving share of private trees.
    pub survival_private: T,
}

impl<T: Scalar> TimingRow<T> {
    fn from_state(switch_time: T, x: &ForestState<T>) -> Self {
        let share = |h: T, i: T, d: T| {
            let all = h + i + d;
            if all > T::zero() {
                (h + i) / all
            } else {
                T::nan()
            }
        };
        TimingRow {
            switch_time,
            survival_total: x.survival(),
            survival_public: share(x.h_m, x.i_m, x.d_m),
            survival_private: share(x.h_o, x.i_o, x.d_o),
        }
    }
}

/// Survival at the horizon when optimal private and public policies start
/// at each switch time, with unsubsidized private treatment before.
pub fn timing_study<T: Scalar>(
    switch_times: &[T],
    initial: &ForestState<T>,
    inputs: &ModelInputs<T>,
    opts: &SimulationOptions<T>,
) -> Result<Vec<TimingRow<T>>, SweepError> {
    if switch_times.is_empty() {
        return Err(SweepError::EmptyRange);
    }
    let rows: Result<Vec<_>, EpidemicError> = switch_times
        .par_iter()
        .map(|&ts| {
            let scenario = ScenarioSpec::new(PrivateArm::OptimalSubsidy, PublicArm::OptimalPublic).switched_at(ts);
            let out = simulate(initial, inputs, &scenario, opts)?;
            let last = out.last().expect("simulate emits the initial record");
            Ok(TimingRow::from_state(ts, &last.state))
        })
        .collect();
    Ok(rows?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::epidemic::fixtures::{case_initial, case_inputs};
    use crate::epidemic::policy_at_state;

    #[test]
    fn grid_counts() {
        let g = SimplexGrid::new(100).unwrap();
        assert_eq!(g.len(), 5151);
        assert_eq!(g.points::<f64>().len(), 5151);
        assert!(SimplexGrid::new(0).is_err());
    }

    #[test]
    fn healthy_corner_is_untreated() {
        let inputs = case_inputs();
        let rows = policy_at_point(&Prevalence::new(1.0, 0.0, 0.0).unwrap(), &inputs).unwrap();
        for r in rows {
            assert_eq!(
                (r.k, r.s_star, r.treat_prob_subsidized, r.public_treat),
                (0.0, 0.0, 0.0, 0.0)
            );
        }
    }

    #[test]
    fn map_matches_single_state_policy() {
        let inputs = case_inputs();
        let x = ForestState::from_array([0.32, 0.06, 0.02, 0.48, 0.09, 0.03]);
        let snap = policy_at_state(&x, &inputs, PrivateArm::OptimalSubsidy, PublicArm::OptimalPublic).unwrap();
        let rows = policy_at_point(&x.prevalence(), &inputs).unwrap();
        for (r, a) in rows.iter().zip(AssessedState::ALL) {
            assert_eq!(r.s_star, snap.subsidies[a.index()]);
            assert_eq!(r.treat_prob_subsidized, snap.private.0[a.index()]);
            assert_eq!(r.public_treat, snap.public.0[a.index()]);
        }
        let g = SimplexGrid::new(20).unwrap();
        let all = policy_map(&g, &inputs).unwrap();
        assert_eq!(all.len(), 3 * g.len());
    }

    #[test]
    fn no_social_value_no_subsidy() {
        let inputs = case_inputs();
        let prev = Prevalence::new(0.8, 0.15, 0.05).unwrap();
        let rows = delta_sweep(&[0.0], &inputs, &prev).unwrap();
        assert!(rows.iter().all(|r| r.s_star == 0.0));
        assert_eq!(delta_sweep::<f64>(&[], &inputs, &prev), Err(SweepError::EmptyRange));
    }

    #[test]
    fn linspace_endpoints() {
        let v = linspace(0.0, 10.0, 11);
        assert_eq!(v.first(), Some(&0.0));
        assert_eq!(v.last(), Some(&10.0));
        assert_eq!(v[3], 3.0);
    }

    #[test]
    fn late_switch_matches_unsubsidized_baseline() {
        let inputs = case_inputs();
        let opts = SimulationOptions::new(1.0 / 32.0, 10.0);
        let rows = timing_study(&[10.0], &case_initial(), &inputs, &opts).unwrap();
        let base = simulate(
            &case_initial(),
            &inputs,
            &ScenarioSpec::new(PrivateArm::NoSubsidy, PublicArm::NoPublicTreatment),
            &opts,
        )
        .unwrap();
        assert_eq!(rows[0].survival_total, base.last().unwrap().state.survival());
    }
}
