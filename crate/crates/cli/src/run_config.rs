//! The run configuration: the model document plus optional per-command blocks.

use std::path::PathBuf;

use forest_pest::config::ModelConfigInput;
use forest_pest::domain::{EconInput, PrevalenceInput};
use forest_pest::sweep::linspace;
use forest_pest::ValidationReport;
use forest_pest::{EpidemicParams, ForestState, ModelConfig, PrivateArm, PublicArm, ScenarioSpec, SimulationOptions};
use serde::Deserialize;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub epidemic: EpidemicParams,
    pub econ: EconInput<f64>,
    pub assessment: [[f64; 3]; 3],
    pub prevalence: PrevalenceInput<f64>,
    #[serde(default)]
    pub scenario: Option<ScenarioBlock>,
    #[serde(default)]
    pub simulation: SimulationBlock,
    #[serde(default)]
    pub sweep: SweepBlock,
    #[serde(default)]
    pub timing: TimingBlock,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioBlock {
    pub private: PrivateArm,
    pub public: PublicArm,
    #[serde(default)]
    pub switch_time: Option<f64>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulationBlock {
    pub dt: f64,
    pub horizon: f64,
    pub output_interval: f64,
    /// Share of trees in public ownership.
    pub public_share: f64,
    /// Initially infested share, split across ownerships in proportion.
    pub infested: f64,
}

impl Default for SimulationBlock {
    fn default() -> Self {
        SimulationBlock {
            dt: 1.0 / 64.0,
            horizon: 50.0,
            output_interval: 0.25,
            public_share: 0.4,
            infested: 0.01,
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepBlock {
    pub resolution: usize,
    pub delta_m_min: f64,
    pub delta_m_max: f64,
    pub delta_m_count: usize,
}

impl Default for SweepBlock {
    fn default() -> Self {
        SweepBlock {
            resolution: 100,
            delta_m_min: 0.0,
            delta_m_max: 5000.0,
            delta_m_count: 101,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TimingBlock {
    pub switch_times: Vec<f64>,
}

impl Default for TimingBlock {
    fn default() -> Self {
        TimingBlock {
            switch_times: (0..=8).map(|i| 3.5 * f64::from(i)).collect(),
        }
    }
}

/// A run configuration whose every block has been checked.
#[derive(Debug, Clone)]
pub struct ValidRun {
    pub model: ModelConfig,
    pub scenario: Option<ScenarioSpec>,
    pub options: SimulationOptions,
    pub initial: ForestState,
    pub sweep: SweepBlock,
    pub deltas: Vec<f64>,
    pub switch_times: Vec<f64>,
    pub output_dir: Option<PathBuf>,
}

fn check(report: &mut ValidationReport, ok: bool, field: &str, observed: f64, rule: &str) {
    if !ok {
        report.violations.push(forest_pest::domain::Violation {
            field: field.into(),
            observed,
            rule: rule.into(),
        });
    }
}

impl RunConfig {
    pub fn validate(self) -> Result<ValidRun, ValidationReport> {
        let mut report = ValidationReport::default();
        let model = ModelConfigInput {
            epidemic: self.epidemic,
            econ: self.econ,
            assessment: self.assessment,
            prevalence: self.prevalence,
        }
        .validate()
        .map_err(|e| report.merge(e))
        .ok();

        let sim = self.simulation;
        let positive = |x: f64| x > 0.0 && x.is_finite();
        check(
            &mut report,
            positive(sim.dt),
            "simulation.dt",
            sim.dt,
            "must be positive",
        );
        check(
            &mut report,
            sim.horizon >= 0.0 && sim.horizon.is_finite(),
            "simulation.horizon",
            sim.horizon,
            "must be nonnegative",
        );
        check(
            &mut report,
            positive(sim.output_interval),
            "simulation.output_interval",
            sim.output_interval,
            "must be positive",
        );
        let initial = ForestState::seeded(sim.public_share, sim.infested)
            .map_err(|e| report.merge(e.scoped("simulation")))
            .ok();

        let scenario = self.scenario.map(|b| {
            let spec = ScenarioSpec::new(b.private, b.public);
            match b.switch_time {
                Some(t) => {
                    check(
                        &mut report,
                        t >= 0.0 && t.is_finite(),
                        "scenario.switch_time",
                        t,
                        "must be nonnegative",
                    );
                    spec.switched_at(t)
                }
                None => spec,
            }
        });

        let sw = self.sweep;
        check(
            &mut report,
            sw.resolution >= 1,
            "sweep.resolution",
            sw.resolution as f64,
            "must be at least 1",
        );
        check(
            &mut report,
            sw.delta_m_count >= 1,
            "sweep.delta_m_count",
            sw.delta_m_count as f64,
            "must be at least 1",
        );
        check(
            &mut report,
            sw.delta_m_min >= 0.0 && sw.delta_m_min <= sw.delta_m_max && sw.delta_m_max.is_finite(),
            "sweep.delta_m_min",
            sw.delta_m_min,
            "must satisfy 0 <= delta_m_min <= delta_m_max < inf",
        );

        let times = self.timing.switch_times;
        check(
            &mut report,
            !times.is_empty(),
            "timing.switch_times",
            f64::NAN,
            "must not be empty",
        );
        for &t in &times {
            check(
                &mut report,
                t >= 0.0 && t.is_finite(),
                "timing.switch_times",
                t,
                "must be nonnegative",
            );
        }

        match (model, initial) {
            (Some(model), Some(initial)) if report.is_empty() => Ok(ValidRun {
                model,
                scenario,
                options: SimulationOptions {
                    dt: sim.dt,
                    horizon: sim.horizon,
                    output_interval: sim.output_interval,
                },
                initial,
                sweep: sw,
                deltas: linspace(sw.delta_m_min, sw.delta_m_max, sw.delta_m_count),
                switch_times: times,
                output_dir: self.output_dir,
            }),
            _ => Err(report),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "epidemic": {"beta": 1, "gamma": 0.3, "alpha": 1, "eps_h": 0.97, "eps_i": 0.5, "tau_star": 3},
        "econ": {"cost_c": 250, "a": 675, "b": 1100, "delta_m": 1150, "delta_m_prime": 1850},
        "assessment": [[0.89, 0.1, 0.01], [0.49, 0.5, 0.01], [0.01, 0.19, 0.8]],
        "prevalence": {"p_h": 0.8, "p_i": 0.15, "p_d": 0.05}
    }"#;

    #[test]
    fn blocks_default_to_the_case_study() {
        let run = serde_json::from_str::<RunConfig>(MINIMAL).unwrap().validate().unwrap();
        assert_eq!(run.options.dt, 1.0 / 64.0);
        assert_eq!(run.options.horizon, 50.0);
        assert_eq!(run.switch_times.len(), 9);
        assert_eq!(run.switch_times[8], 28.0);
        assert_eq!(run.deltas.len(), 101);
        assert!(run.scenario.is_none());
        assert!((run.initial.h_m - 0.396).abs() < 1e-15);
    }

    #[test]
    fn command_blocks_are_checked() {
        let text = MINIMAL.trim_end().trim_end_matches('}').to_string()
            + r#", "simulation": {"dt": -1}, "timing": {"switch_times": []},
                 "scenario": {"private": "optimal", "public": "none", "switch_time": -2}}"#;
        let report = serde_json::from_str::<RunConfig>(&text)
            .unwrap()
            .validate()
            .unwrap_err();
        let fields: Vec<_> = report.violations.iter().map(|v| v.field.as_str()).collect();
        assert_eq!(fields, ["simulation.dt", "scenario.switch_time", "timing.switch_times"]);
    }

    #[test]
    fn unknown_blocks_are_rejected() {
        let text = MINIMAL.trim_end().trim_end_matches('}').to_string() + r#", "sweeep": {}}"#;
        assert!(serde_json::from_str::<RunConfig>(&text).is_err());
    }
}
