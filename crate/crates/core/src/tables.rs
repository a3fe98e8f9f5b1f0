//! CSV encodings of trajectories and sweep results.

use std::io::Write;

use crate::epidemic::TrajectoryRecord;
use crate::sweep::{DeltaRow, PolicyRow, TimingRow};

pub const TRAJECTORY_HEADER: [&str; 16] = [
    "t",
    "H_m",
    "I_m",
    "D_m",
    "H_o",
    "I_o",
    "D_o",
    "p_thm",
    "p_tim",
    "p_tho",
    "p_tio",
    "s_hat_h",
    "s_hat_i",
    "s_hat_d",
    "net_value_m",
    "net_value_o",
];

pub const SIMPLEX_HEADER: [&str; 10] = [
    "p_h",
    "p_i",
    "p_d",
    "assessed",
    "k",
    "l",
    "s_star",
    "treat_prob_subsidized",
    "treat_prob_unsubsidized",
    "public_treat",
];

pub const DELTA_HEADER: [&str; 5] = ["delta_m", "assessed", "s_star", "treat_prob", "survival_3y"];

pub const DELTA_COMMENT: &str =
    "# survival_3y = 1 - sum_phi P(phi|assessed) * (treat_prob * mu_t(phi) + (1 - treat_prob) * mu_u(phi)), \
mu evaluated over tau_star at the configured prevalence";

pub const TIMING_HEADER: [&str; 4] = [
    "switch_time",
    "survival_50y_total",
    "survival_50y_public",
    "survival_50y_private",
];

/// Formats with 9 significant digits, fixed or scientific like C's `%.9g`.
pub fn sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "NaN".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..9).contains(&exp) {
        format!("{}e{exp}", trim_zeros(mantissa))
    } else {
        let decimals = (8 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn finish<W: Write>(mut w: csv::Writer<W>, rows: usize) -> csv::Result<usize> {
    w.flush()?;
    Ok(rows)
}

/// Writes a trajectory; welfare columns are NaN when the economic
/// parameters carry no value decomposition.
pub fn write_trajectory<W: Write>(out: W, records: &[TrajectoryRecord<f64>]) -> csv::Result<usize> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRAJECTORY_HEADER)?;
    for r in records {
        let (net_m, net_o) = r.welfare.map_or((f64::NAN, f64::NAN), |w| (w.net_m, w.net_o));
        let x = r.state.as_array();
        let fields = [
            r.time,
            x[0],
            x[1],
            x[2],
            x[3],
            x[4],
            x[5],
            r.policy_m.p_th,
            r.policy_m.p_ti,
            r.policy_o.p_th,
            r.policy_o.p_ti,
            r.subsidies[0],
            r.subsidies[1],
            r.subsidies[2],
            net_m,
            net_o,
        ];
        w.write_record(fields.map(sig9))?;
    }
    finish(w, records.len())
}

pub fn write_simplex<W: Write>(out: W, rows: &[PolicyRow<f64>]) -> csv::Result<usize> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SIMPLEX_HEADER)?;
    for r in rows {
        let p = r.prevalence.as_array();
        let mut rec: Vec<String> = p.iter().map(|&v| sig9(v)).collect();
        rec.push(r.assessed.label().into());
        rec.extend(
            [
                r.k,
                r.l,
                r.s_star,
                r.treat_prob_subsidized,
                r.treat_prob_unsubsidized,
                r.public_treat,
            ]
            .map(sig9),
        );
        w.write_record(&rec)?;
    }
    finish(w, rows.len())
}

/// Writes the Δ_m sweep preceded by a `#` line documenting the survival
/// weighting.
pub fn write_delta<W: Write>(mut out: W, rows: &[DeltaRow<f64>]) -> csv::Result<usize> {
    writeln!(out, "{DELTA_COMMENT}")?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(DELTA_HEADER)?;
    for r in rows {
        w.write_record([
            sig9(r.delta_m),
            r.assessed.label().into(),
            sig9(r.s_star),
            sig9(r.treat_prob),
            sig9(r.survival_3y),
        ])?;
    }
    finish(w, rows.len())
}

pub fn write_timing<W: Write>(out: W, rows: &[TimingRow<f64>]) -> csv::Result<usize> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TIMING_HEADER)?;
    for r in rows {
        w.write_record([r.switch_time, r.survival_total, r.survival_public, r.survival_private].map(sig9))?;
    }
    finish(w, rows.len())
}
