use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use forest_pest::{AssessedState, PrivateArm, PublicArm};

#[derive(Debug, Parser)]
#[command(
    name = "pest-engine",
    version,
    about = "Subsidy policy and epidemic engine for urban forest pests"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print equilibrium subsidies and public decisions at one prevalence as JSON.
    Policy,
    /// Integrate the epidemic and write one trajectory CSV per scenario.
    Simulate,
    /// Write the prevalence-simplex policy map and the delta_m sweep.
    Sweep,
    /// Write 50-year survival for each intervention switch time.
    Timing,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Configuration document (JSON). Required.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Output directory [default: ./out, or `output_dir` from the config].
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,

    /// Integration step in years.
    #[arg(long, global = true, value_name = "YEARS")]
    pub dt: Option<f64>,

    /// Simulated span in years.
    #[arg(long, global = true, value_name = "YEARS")]
    pub horizon: Option<f64>,

    /// Simplex subdivisions per side for `sweep`.
    #[arg(long, global = true, value_name = "N")]
    pub resolution: Option<usize>,

    /// Run a single scenario, e.g. `private=optimal,public=none`.
    /// Private arms: none, nosub, optimal. Public arms: none, optimal.
    #[arg(long, global = true, value_name = "SPEC")]
    pub scenario: Option<ScenarioArg>,

    /// Comma-separated switch times in years for `timing`.
    #[arg(long, global = true, value_name = "T1,T2,...", value_delimiter = ',')]
    pub switch_times: Option<Vec<f64>>,

    /// Seed for Monte Carlo cross-checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Restrict `policy` output to one assessed state (healthy, infested, dying).
    #[arg(long, global = true, value_name = "STATE")]
    pub assessed: Option<AssessedState>,

    /// Prevalence `p_h,p_i,p_d` for `policy` and the delta_m sweep.
    #[arg(long, global = true, value_name = "P_H,P_I,P_D")]
    pub prevalence: Option<PrevalenceArg>,

    /// Monte Carlo owner draws used by `policy` to cross-check treatment probabilities.
    #[arg(long, global = true, value_name = "N", default_value_t = 0)]
    pub mc_samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioArg {
    pub private: PrivateArm,
    pub public: PublicArm,
}

impl FromStr for ScenarioArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut private = None;
        let mut public = None;
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| format!("expected key=value, got `{part}`"))?;
            match key.trim() {
                "private" => private = Some(value.parse::<PrivateArm>().map_err(|e| e.to_string())?),
                "public" => public = Some(value.parse::<PublicArm>().map_err(|e| e.to_string())?),
                other => return Err(format!("unknown scenario key `{other}` (expected private, public)")),
            }
        }
        match (private, public) {
            (Some(private), Some(public)) => Ok(ScenarioArg { private, public }),
            _ => Err("scenario needs both private=... and public=...".into()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrevalenceArg(pub [f64; 3]);

impl FromStr for PrevalenceArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<f64> = s
            .split(',')
            .map(|p| p.trim().parse::<f64>().map_err(|e| format!("`{p}`: {e}")))
            .collect::<Result<_, _>>()?;
        match parts[..] {
            [h, i, d] => Ok(PrevalenceArg([h, i, d])),
            _ => Err(format!("expected three comma-separated values, got {}", parts.len())),
        }
    }
}
