use super::{AssessedPolicy, ForestState, TrueStatePolicy};
use crate::domain::{AssessmentMatrix, EpidemicParams, TreeState};
use crate::scalar::Scalar;

pub fn assessed_to_true<T: Scalar>(policy: &AssessedPolicy<T>, matrix: &AssessmentMatrix<T>) -> TrueStatePolicy<T> {
    let through = |s: TreeState| -> T {
        let row = matrix.row(s);
        row[0] * policy.0[0] + row[1] * policy.0[1] + row[2] * policy.0[2]
    };
    TrueStatePolicy {
        p_th: through(TreeState::Healthy),
        p_ti: through(TreeState::Infested),
        p_td: through(TreeState::Dying),
    }
}

/// Rates of change `[H_m, I_m, D_m, H_o, I_o, D_o]`.
pub fn derivatives<T: Scalar>(
    state: &ForestState<T>,
    params: &EpidemicParams<T>,
    pol_m: &TrueStatePolicy<T>,
    pol_o: &TrueStatePolicy<T>,
) -> [T; 6] {
    let o = T::one();
    let infested = state.i_m + state.i_o;
    let flows = |h: T, i: T, pol: &TrueStatePolicy<T>| {
        let infection = params.beta * (o - params.eps_h * pol.p_th) * h * infested;
        let recovery = params.alpha * params.eps_i * pol.p_ti * i;
        let death = params.gamma * (o - params.eps_i * pol.p_ti) * i;
        [recovery - infection, infection - death - recovery, death]
    };
    let m = flows(state.h_m, state.i_m, pol_m);
    let p = flows(state.h_o, state.i_o, pol_o);
    [m[0], m[1], m[2], p[0], p[1], p[2]]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::epidemic::fixtures::{case_initial, case_inputs};

    #[test]
    fn identity_assessment_passes_policy_through() {
        let pol = AssessedPolicy([0.2, 0.7, 0.4]);
        let t = assessed_to_true(&pol, &AssessmentMatrix::identity());
        assert_eq!((t.p_th, t.p_ti, t.p_td), (0.2, 0.7, 0.4));
    }

    #[test]
    fn treating_everything_treats_every_true_state() {
        let t = assessed_to_true(&AssessedPolicy([1.0; 3]), &case_inputs().matrix);
        assert!((t.p_th - 1.0).abs() < 1e-15 && (t.p_ti - 1.0).abs() < 1e-15);
    }

    #[test]
    fn case_matrix_infested_only_policy() {
        let t = assessed_to_true(&AssessedPolicy([0.0, 1.0, 0.0]), &case_inputs().matrix);
        assert_eq!(t.p_th, 0.1);
        assert_eq!(t.p_ti, 0.5);
    }

    #[test]
    fn disease_free_state_is_stationary() {
        let x = ForestState::from_array([0.4, 0.0, 0.0, 0.6, 0.0, 0.0]);
        let r = derivatives(
            &x,
            &case_inputs().epidemic,
            &TrueStatePolicy::zero(),
            &TrueStatePolicy::zero(),
        );
        assert_eq!(r, [0.0; 6]);
    }

    #[test]
    fn initial_mortality_rates() {
        let r = derivatives(
            &case_initial(),
            &case_inputs().epidemic,
            &TrueStatePolicy::zero(),
            &TrueStatePolicy::zero(),
        );
        assert!((r[2] - 0.0012).abs() < 1e-15);
        assert!((r[5] - 0.0018).abs() < 1e-15);
        assert!(r.iter().sum::<f64>().abs() < 1e-14);
    }
}
