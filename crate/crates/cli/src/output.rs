//! Run output files.
//!
//! Every file is written to a temporary sibling and renamed into place.
//! Numbers never pass through a locale: reals in CSV use `.` as the decimal
//! point and 9 significant digits, lines end in LF.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use regsel_core::analysis::{burstiness, BurstReport, SurvivalCurve, SweepResult};
use regsel_core::{MetricsFrame, RunResult};
use serde::Serialize;

use crate::config::echo_config;
use crate::error::CliError;
use crate::svg::{render_snapshot, render_timeseries};

pub const METRICS_HEADER: &str =
    "step,alive_count,delta_ave,rho_ratio,tau_ave,epsilon_ave,capacity_ave,deaths";

/// Files produced for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputBundle {
    pub out_dir: PathBuf,
    pub metrics_csv: PathBuf,
    pub events_jsonl: PathBuf,
    pub final_state_json: PathBuf,
    pub config_echo_json: PathBuf,
    pub burst_json: PathBuf,
    pub timeseries_svg: Option<PathBuf>,
    pub snapshot_svgs: Vec<PathBuf>,
}

/// Formats a real like C's `%.9g`.
pub fn format_real(x: f64) -> String {
    const DIGITS: i32 = 9;
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..DIGITS).contains(&exp) {
        let mantissa = trim_fraction(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let fixed = format!("{:.*}", (DIGITS - 1 - exp) as usize, x);
        trim_fraction(&fixed).to_string()
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn cell(x: Option<f64>) -> String {
    x.map(format_real).unwrap_or_default()
}

pub fn metrics_csv(frames: &[MetricsFrame]) -> String {
    let mut out = String::with_capacity(64 * (frames.len() + 1));
    out.push_str(METRICS_HEADER);
    out.push('\n');
    for f in frames {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            f.step,
            f.alive_count,
            cell(f.delta_ave),
            cell(f.rho_ratio),
            cell(f.tau_ave),
            cell(f.epsilon_ave),
            cell(f.capacity_ave),
            f.deaths_this_step
        );
    }
    out
}

pub fn jsonl<T: Serialize>(items: &[T]) -> String {
    let mut out = String::new();
    for item in items {
        out.push_str(&serde_json::to_string(item).expect("serializable"));
        out.push('\n');
    }
    out
}

fn pretty<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    text
}

/// Writes `contents` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let name = path
        .file_name()
        .ok_or_else(|| CliError::Usage(format!("not a file path: {}", path.display())))?;
    let tmp = path.with_file_name(format!(".{}.tmp", name.to_string_lossy()));
    fs::write(&tmp, contents).map_err(|e| CliError::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| CliError::io(path, e))
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

pub fn write_run_outputs(
    result: &RunResult,
    out_dir: &Path,
    with_svg: bool,
) -> Result<OutputBundle, CliError> {
    ensure_dir(out_dir)?;
    let metrics_csv_path = out_dir.join("metrics.csv");
    let events_jsonl = out_dir.join("events.jsonl");
    let final_state_json = out_dir.join("final_state.json");
    let config_echo_json = out_dir.join("config_echo.json");
    let burst_json = out_dir.join("burst.json");

    write_atomic(&metrics_csv_path, &metrics_csv(&result.frames))?;
    write_atomic(&events_jsonl, &jsonl(&result.events))?;
    write_atomic(&final_state_json, &pretty(&result.population))?;
    write_atomic(&config_echo_json, &echo_config(&result.config))?;
    let report: BurstReport = burstiness(&result.events);
    write_atomic(&burst_json, &pretty(&report))?;

    let mut timeseries_svg = None;
    let mut snapshot_svgs = Vec::new();
    if with_svg {
        let path = out_dir.join("timeseries.svg");
        write_atomic(&path, &render_timeseries(&result.frames)?)?;
        timeseries_svg = Some(path);
        for snap in &result.snapshots {
            let path = out_dir.join(format!("snapshot_{}.svg", snap.step));
            write_atomic(&path, &render_snapshot(snap.step, &snap.population))?;
            snapshot_svgs.push(path);
        }
    }

    Ok(OutputBundle {
        out_dir: out_dir.to_path_buf(),
        metrics_csv: metrics_csv_path,
        events_jsonl,
        final_state_json,
        config_echo_json,
        burst_json,
        timeseries_svg,
        snapshot_svgs,
    })
}

pub fn sweep_csv(result: &SweepResult) -> String {
    let mut out = String::from(
        "epsilon,energy,capacity,mean_lifetime,mean_final_delta_ave,survivor_fraction,censored\n",
    );
    for c in &result.cells {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            format_real(c.epsilon),
            format_real(c.energy),
            format_real(c.capacity),
            format_real(c.mean_lifetime),
            cell(c.mean_final_delta_ave),
            format_real(c.survivor_fraction),
            c.censored
        );
    }
    out
}

#[derive(Serialize)]
struct SweepSummary<'a> {
    #[serde(flatten)]
    result: &'a SweepResult,
    capacity_lifetime_spearman: Option<f64>,
}

pub fn write_sweep_outputs(result: &SweepResult, out_dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    ensure_dir(out_dir)?;
    let csv = out_dir.join("sweep.csv");
    let json = out_dir.join("sweep.json");
    write_atomic(&csv, &sweep_csv(result))?;
    let summary = SweepSummary {
        result,
        capacity_lifetime_spearman: result.capacity_lifetime_spearman(),
    };
    write_atomic(&json, &pretty(&summary))?;
    Ok(vec![csv, json])
}

pub fn curve_csv(curve: &SurvivalCurve) -> String {
    let mut out = String::from("delta,probability\n");
    for (d, p) in curve.delta_grid.iter().zip(&curve.probs) {
        let _ = writeln!(out, "{},{}", format_real(*d), format_real(*p));
    }
    out
}

pub fn write_curve_outputs(
    curve: &SurvivalCurve,
    out_dir: &Path,
) -> Result<Vec<PathBuf>, CliError> {
    ensure_dir(out_dir)?;
    let csv = out_dir.join("survival_curve.csv");
    let json = out_dir.join("survival_curve.json");
    write_atomic(&csv, &curve_csv(curve))?;
    write_atomic(&json, &pretty(curve))?;
    Ok(vec![csv, json])
}

pub fn write_config_echo(
    config: &regsel_core::UniverseConfig,
    out_dir: &Path,
) -> Result<PathBuf, CliError> {
    ensure_dir(out_dir)?;
    let path = out_dir.join("config_echo.json");
    write_atomic(&path, &echo_config(config))?;
    Ok(path)
}
