//! Shared fixtures for the integration tests: the ash-borer case study.
#![allow(dead_code)]

use forest_pest::domain::SocialValues;
use forest_pest::{AssessmentMatrix, EconParams, EpidemicParams, ForestState, ModelInputs};

pub const CASE_MATRIX: [[f64; 3]; 3] = [[0.89, 0.1, 0.01], [0.49, 0.5, 0.01], [0.01, 0.19, 0.8]];

pub fn case_epidemic() -> EpidemicParams {
    EpidemicParams {
        beta: 1.0,
        gamma: 0.3,
        alpha: 1.0,
        eps_h: 0.97,
        eps_i: 0.5,
        tau_star: 3.0,
    }
}

pub fn case_econ() -> EconParams {
    EconParams {
        cost_c: 250.0,
        a: 675.0,
        b: 1100.0,
        delta_m: 1150.0,
        delta_m_prime: 1850.0,
        decomposition: Some(SocialValues {
            v_m: 1000.0,
            w_m: 150.0,
            w_m_prime: 850.0,
        }),
    }
}

pub fn case_inputs() -> ModelInputs {
    ModelInputs {
        epidemic: case_epidemic(),
        econ: case_econ(),
        matrix: AssessmentMatrix::new(CASE_MATRIX).unwrap(),
    }
}

/// 40% public trees, 1% of every holding infested.
pub fn case_initial() -> ForestState {
    ForestState::seeded(0.4, 0.01).unwrap()
}

/// Plain economic parameters with no value decomposition.
pub fn econ(cost_c: f64, a: f64, b: f64, delta_m: f64) -> EconParams {
    EconParams {
        cost_c,
        a,
        b,
        delta_m,
        delta_m_prime: delta_m,
        decomposition: None,
    }
}

/// Probability that an owner with `Δ_o ~ U[a, b]` accepts `price`, for `k > 0`.
pub fn uniform_acceptance(price: f64, k: f64, a: f64, b: f64) -> f64 {
    ((b - price / k) / (b - a)).clamp(0.0, 1.0)
}

/// RK4 on the healthy -> infested -> dying chain; returns the dying share.
pub fn chain_dying(x0: [f64; 3], r1: f64, r2: f64, tau: f64, max_h_rate: f64) -> f64 {
    let steps = ((r1.max(r2) * tau / max_h_rate).ceil() as usize).max(16);
    let h = tau / steps as f64;
    let f = |x: [f64; 3]| [-r1 * x[0], r1 * x[0] - r2 * x[1], r2 * x[1]];
    let axpy = |x: [f64; 3], d: [f64; 3], s: f64| [x[0] + s * d[0], x[1] + s * d[1], x[2] + s * d[2]];
    let mut x = x0;
    for _ in 0..steps {
        let k1 = f(x);
        let k2 = f(axpy(x, k1, h / 2.0));
        let k3 = f(axpy(x, k2, h / 2.0));
        let k4 = f(axpy(x, k3, h));
        for i in 0..3 {
            x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    x[2]
}
