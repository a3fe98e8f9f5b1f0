use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::Context;
use forest_pest::bayes::{marginal, posterior, Posterior};
use forest_pest::epidemic::effects_at_prevalence;
use forest_pest::game::{owner_decision, private_treatment_probability, public_treatment_decision};
use forest_pest::sweep::{delta_sweep, policy_map, run_scenarios, timing_study, SimplexGrid};
use forest_pest::tables::{write_delta, write_simplex, write_timing, write_trajectory};
use forest_pest::{game, AssessedState, Prevalence, ScenarioSpec, SubsidyDecision, TreatmentEffect};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::args::{Command, GlobalArgs};
use crate::error::Failure;
use crate::output::{ensure_dir, sha256_hex, update_manifest, write_atomic, FileEntry, Manifest};
use crate::run_config::{RunConfig, ScenarioBlock, ValidRun};

/// A validated run plus what the manifest needs to describe it.
pub struct Loaded {
    pub run: ValidRun,
    pub config_sha256: String,
    pub overrides: BTreeMap<String, String>,
}

pub fn load(args: &GlobalArgs) -> Result<Loaded, Failure> {
    let path = args.config.clone().ok_or(Failure::NoConfig)?;
    let bytes = fs::read(&path).map_err(|source| Failure::ConfigRead {
        path: path.clone(),
        source,
    })?;
    let mut cfg: RunConfig = serde_json::from_slice(&bytes).map_err(|source| Failure::ConfigParse {
        path: path.clone(),
        source,
    })?;
    let overrides = apply_overrides(&mut cfg, args);
    let run = cfg
        .validate()
        .map_err(|report| Failure::ConfigInvalid { path, report })?;
    Ok(Loaded {
        run,
        config_sha256: sha256_hex(&bytes),
        overrides,
    })
}

/// Folds command-line settings into the configuration and lists those that
/// affect results.
fn apply_overrides(cfg: &mut RunConfig, args: &GlobalArgs) -> BTreeMap<String, String> {
    let mut applied = BTreeMap::new();
    let mut note = |key: &str, value: String| {
        applied.insert(key.to_string(), value);
    };
    if let Some(dt) = args.dt {
        cfg.simulation.dt = dt;
        note("dt", dt.to_string());
    }
    if let Some(h) = args.horizon {
        cfg.simulation.horizon = h;
        note("horizon", h.to_string());
    }
    if let Some(n) = args.resolution {
        cfg.sweep.resolution = n;
        note("resolution", n.to_string());
    }
    if let Some(s) = args.scenario {
        cfg.scenario = Some(ScenarioBlock {
            private: s.private,
            public: s.public,
            switch_time: None,
        });
        note("scenario", format!("private={},public={}", s.private, s.public));
    }
    if let Some(times) = &args.switch_times {
        cfg.timing.switch_times = times.clone();
        let text: Vec<String> = times.iter().map(f64::to_string).collect();
        note("switch_times", text.join(","));
    }
    if let Some(p) = args.prevalence {
        cfg.prevalence.p_h = p.0[0];
        cfg.prevalence.p_i = p.0[1];
        cfg.prevalence.p_d = p.0[2];
        note("prevalence", format!("{},{},{}", p.0[0], p.0[1], p.0[2]));
    }
    applied
}

pub fn dispatch(command: &Command, args: &GlobalArgs) -> anyhow::Result<()> {
    let loaded = load(args)?;
    match command {
        Command::Policy => policy(&loaded.run, args),
        Command::Simulate => write_outputs(&loaded, args, "simulate", simulate_files),
        Command::Sweep => write_outputs(&loaded, args, "sweep", sweep_files),
        Command::Timing => write_outputs(&loaded, args, "timing", timing_files),
    }
}

#[derive(Debug, Serialize)]
struct MonteCarlo {
    samples: usize,
    seed: u64,
    treat_prob: f64,
    std_error: f64,
}

#[derive(Debug, Serialize)]
struct PolicyEntry {
    assessed: AssessedState,
    marginal: f64,
    /// Absent when the assessed state cannot occur at this prevalence.
    posterior: Option<Posterior<f64>>,
    effect: TreatmentEffect,
    decision: SubsidyDecision,
    unsubsidized_treat_prob: f64,
    public_treat: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    monte_carlo: Option<MonteCarlo>,
}

#[derive(Debug, Serialize)]
struct PolicyDocument {
    prevalence: Prevalence,
    entries: Vec<PolicyEntry>,
}

/// Share of `n` owners with `Δ_o ~ U[a, b]` who accept `price`.
fn monte_carlo(n: usize, seed: u64, k: f64, price: f64, a: f64, b: f64) -> MonteCarlo {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hits = (0..n)
        .filter(|_| owner_decision(rng.gen_range(a..=b), k, price))
        .count();
    let p = hits as f64 / n as f64;
    MonteCarlo {
        samples: n,
        seed,
        treat_prob: p,
        std_error: (p * (1.0 - p) / n as f64).sqrt(),
    }
}

fn policy(run: &ValidRun, args: &GlobalArgs) -> anyhow::Result<()> {
    let inputs = run.model.inputs();
    let prevalence = run.model.prevalence;
    let effects = effects_at_prevalence(&prevalence, &inputs).map_err(|e| Failure::Setting(e.to_string()))?;
    let econ = &inputs.econ;
    let entries = AssessedState::ALL
        .into_iter()
        .filter(|a| args.assessed.is_none_or(|only| only == *a))
        .map(|a| {
            let effect = effects[a.index()];
            let decision = game::optimal_subsidy(&effect, econ, 0.0);
            let monte_carlo = (args.mc_samples > 0 && effect.k > 0.0).then(|| {
                let seed = args.seed.wrapping_add(a.index() as u64);
                monte_carlo(args.mc_samples, seed, effect.k, decision.price, econ.a, econ.b)
            });
            PolicyEntry {
                assessed: a,
                marginal: marginal(&prevalence, &inputs.matrix, a),
                posterior: posterior(&prevalence, &inputs.matrix, a).ok(),
                effect,
                decision,
                unsubsidized_treat_prob: private_treatment_probability(effect.k, econ, 0.0),
                public_treat: public_treatment_decision(&effect, econ),
                monte_carlo,
            }
        })
        .collect();
    let doc = PolicyDocument { prevalence, entries };
    let mut stdout = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut stdout, &doc).context("writing policy document")?;
    writeln!(stdout).context("writing policy document")?;
    Ok(())
}

type Produced = Vec<(String, FileEntry)>;

fn write_outputs(
    loaded: &Loaded,
    args: &GlobalArgs,
    command: &str,
    produce: fn(&ValidRun, &Path, &str) -> anyhow::Result<Produced>,
) -> anyhow::Result<()> {
    let dir: PathBuf = args
        .out
        .clone()
        .or_else(|| loaded.run.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    ensure_dir(&dir)?;
    let files = produce(&loaded.run, &dir, command)?;
    let manifest = Manifest::new(&loaded.config_sha256, loaded.overrides.clone());
    update_manifest(&dir, manifest, &files)?;
    for (name, entry) in &files {
        log::info!("wrote {} ({} rows)", dir.join(name).display(), entry.rows);
    }
    eprintln!("{command}: wrote {} file(s) to {}", files.len(), dir.display());
    Ok(())
}

fn csv_file(
    dir: &Path,
    name: &str,
    command: &str,
    write: impl FnOnce(&mut dyn Write) -> csv::Result<usize>,
) -> anyhow::Result<(String, FileEntry)> {
    let path = dir.join(name);
    let rows = write_atomic(&path, |w| write(w).map_err(std::io::Error::other))?;
    Ok((
        name.to_string(),
        FileEntry {
            command: command.into(),
            rows,
        },
    ))
}

fn simulate_files(run: &ValidRun, dir: &Path, command: &str) -> anyhow::Result<Produced> {
    let scenarios = match run.scenario {
        Some(s) => vec![s],
        None => ScenarioSpec::matrix(),
    };
    let inputs = run.model.inputs();
    let outputs = run_scenarios(&scenarios, &run.initial, &inputs, &run.options).map_err(Failure::from)?;
    scenarios
        .iter()
        .zip(&outputs)
        .map(|(s, records)| {
            csv_file(dir, &format!("{}.csv", s.file_stem()), command, |w| {
                write_trajectory(w, records)
            })
        })
        .collect()
}

fn sweep_files(run: &ValidRun, dir: &Path, command: &str) -> anyhow::Result<Produced> {
    let inputs = run.model.inputs();
    let grid = SimplexGrid::new(run.sweep.resolution).map_err(Failure::from)?;
    let map = policy_map(&grid, &inputs).map_err(Failure::from)?;
    let deltas = delta_sweep(&run.deltas, &inputs, &run.model.prevalence).map_err(Failure::from)?;
    Ok(vec![
        csv_file(dir, "simplex.csv", command, |w| write_simplex(w, &map))?,
        csv_file(dir, "delta_sweep.csv", command, |w| write_delta(w, &deltas))?,
    ])
}

fn timing_files(run: &ValidRun, dir: &Path, command: &str) -> anyhow::Result<Produced> {
    let rows =
        timing_study(&run.switch_times, &run.initial, &run.model.inputs(), &run.options).map_err(Failure::from)?;
    Ok(vec![csv_file(dir, "timing.csv", command, |w| write_timing(w, &rows))?])
}
