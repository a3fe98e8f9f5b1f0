mod common;

use forest_pest::bayes::{assessed_shares, marginal, posterior};
use forest_pest::config::{ConfigError, ModelConfigInput};
use forest_pest::domain::{EconInput, PrevalenceInput};
use forest_pest::{AssessedState, AssessmentMatrix, EpidemicParams, ModelConfig, Prevalence, TreeState};
use proptest::prelude::*;

/// Three nonnegative weights summing to one.
fn simplex() -> impl Strategy<Value = [f64; 3]> {
    (0.0..1.0f64, 0.0..1.0f64).prop_map(|(u, v)| {
        let (lo, hi) = (u.min(v), u.max(v));
        [lo, hi - lo, 1.0 - hi]
    })
}

fn prevalence() -> impl Strategy<Value = Prevalence> {
    simplex().prop_map(|[h, i, d]| Prevalence::new(h, i, d).unwrap())
}

fn matrix() -> impl Strategy<Value = AssessmentMatrix> {
    [simplex(), simplex(), simplex()].prop_map(|rows| AssessmentMatrix::new(rows).unwrap())
}

fn config() -> impl Strategy<Value = ModelConfig> {
    let epidemic = (
        0.01..5.0f64,
        0.01..2.0f64,
        0.0..3.0f64,
        0.0..1.0f64,
        0.0..1.0f64,
        0.1..10.0f64,
    );
    let econ = (
        1.0..1000.0f64,
        0.0..2000.0f64,
        1.0..2000.0f64,
        0.0..5000.0f64,
        0.0..5000.0f64,
        any::<bool>(),
    );
    (epidemic, econ, matrix(), prevalence()).prop_map(|(e, n, m, p)| {
        let (beta, gamma, alpha, eps_h, eps_i, tau_star) = e;
        let (cost_c, a, spread, v_m, w, decompose) = n;
        let econ = if decompose {
            EconInput {
                cost_c,
                a,
                b: a + spread,
                delta_m: None,
                delta_m_prime: None,
                v_m: Some(v_m),
                w_m: Some(w),
                w_m_prime: Some(2.0 * w),
            }
        } else {
            EconInput {
                cost_c,
                a,
                b: a + spread,
                delta_m: Some(v_m),
                delta_m_prime: Some(w),
                v_m: None,
                w_m: None,
                w_m_prime: None,
            }
        };
        let prev = p.as_array();
        ModelConfigInput {
            epidemic: EpidemicParams {
                beta,
                gamma,
                alpha,
                eps_h,
                eps_i,
                tau_star,
            },
            econ,
            assessment: m.rows(),
            prevalence: PrevalenceInput {
                p_h: prev[0],
                p_i: prev[1],
                p_d: prev[2],
            },
        }
        .validate()
        .unwrap()
    })
}

fn any_number() -> impl Strategy<Value = f64> {
    prop_oneof![
        4 => -10.0..10.0f64,
        1 => any::<f64>(),
        1 => Just(0.0),
        1 => Just(f64::NAN),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn posterior_is_a_distribution(prior in prevalence(), m in matrix()) {
        for a in AssessedState::ALL {
            if let Ok(post) = posterior(&prior, &m, a) {
                let sum: f64 = post.as_array().iter().sum();
                prop_assert!((sum - 1.0).abs() <= 1e-12, "sum = {sum}");
                prop_assert!(post.as_array().iter().all(|&p| (0.0..=1.0).contains(&p)));
            } else {
                prop_assert_eq!(marginal(&prior, &m, a), 0.0);
            }
        }
    }

    #[test]
    fn total_probability_recovers_prior(prior in prevalence(), m in matrix()) {
        let shares = assessed_shares(&prior, &m);
        prop_assert!((shares.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        for s in TreeState::ALL {
            let mut recovered = 0.0;
            for a in AssessedState::ALL {
                if let Ok(post) = posterior(&prior, &m, a) {
                    recovered += post.get(s) * shares[a.index()];
                }
            }
            prop_assert!((recovered - prior.get(s)).abs() <= 1e-12, "{s:?}: {recovered} vs {}", prior.get(s));
        }
    }

    #[test]
    fn perfect_assessment_reveals_state(prior in prevalence()) {
        let m = AssessmentMatrix::identity();
        for (s, a) in TreeState::ALL.into_iter().zip(AssessedState::ALL) {
            if prior.get(s) > 0.0 {
                let post = posterior(&prior, &m, a).unwrap();
                for t in TreeState::ALL {
                    prop_assert_eq!(post.get(t), if t == s { 1.0 } else { 0.0 });
                }
            } else {
                prop_assert!(posterior(&prior, &m, a).is_err());
            }
        }
    }

    #[test]
    fn config_round_trips_bit_exactly(cfg in config()) {
        let text = serde_json::to_string(&cfg).unwrap();
        let back = ModelConfig::from_json(&text).unwrap();
        prop_assert_eq!(back, cfg);
        prop_assert_eq!(serde_json::to_string(&back).unwrap(), text);
    }

    #[test]
    fn validation_never_panics(
        epi in proptest::array::uniform6(any_number()),
        econ in proptest::array::uniform5(any_number()),
        rows in proptest::array::uniform3(proptest::array::uniform3(any_number())),
        prev in proptest::array::uniform3(any_number()),
    ) {
        let input = ModelConfigInput {
            epidemic: EpidemicParams {
                beta: epi[0],
                gamma: epi[1],
                alpha: epi[2],
                eps_h: epi[3],
                eps_i: epi[4],
                tau_star: epi[5],
            },
            econ: EconInput {
                cost_c: econ[0],
                a: econ[1],
                b: econ[2],
                delta_m: Some(econ[3]),
                delta_m_prime: Some(econ[4]),
                v_m: None,
                w_m: None,
                w_m_prime: None,
            },
            assessment: rows,
            prevalence: PrevalenceInput { p_h: prev[0], p_i: prev[1], p_d: prev[2] },
        };
        match input.validate() {
            Ok(cfg) => {
                prop_assert!(cfg.epidemic.beta.is_finite());
                prop_assert!((cfg.prevalence.as_array().iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            }
            Err(report) => {
                prop_assert!(!report.is_empty());
                prop_assert!(report.violations.iter().all(|v| !v.field.is_empty() && !v.rule.is_empty()));
            }
        }
    }

    #[test]
    fn arbitrary_text_is_rejected_cleanly(text in ".{0,200}") {
        prop_assert!(matches!(ModelConfig::from_json(&text), Err(ConfigError::Parse(_))));
    }
}

#[test]
fn case_matrix_is_valid() {
    assert!(AssessmentMatrix::new(common::CASE_MATRIX).is_ok());
}
