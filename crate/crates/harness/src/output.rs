//! Persisted artifacts: the sweep CSV, a JSON manifest capturing the exact
//! config and code version, and optional whitespace-delimited plot data.

use crate::config::{ExperimentConfig, Sweep};
use crate::runner::SweepRecord;
use crate::{HarnessError, Result};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

pub const CSV_HEADER: [&str; 9] = [
    "method",
    "point",
    "objective_mean",
    "objective_se",
    "Ic_mean",
    "Is_mean",
    "ee_mean",
    "trials",
    "ms",
];

/// Renders records as CSV. Floats use the shortest round-trip form so two
/// identical runs serialize identically.
pub fn csv_string(records: &[SweepRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record(&[
            r.method.label().to_string(),
            r.point.to_string(),
            r.objective_mean.to_string(),
            r.objective_se.to_string(),
            r.ic_mean.to_string(),
            r.is_mean.to_string(),
            r.ee_mean.to_string(),
            r.trials.to_string(),
            r.ms.to_string(),
        ])?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| HarnessError::Io(std::io::Error::other(e.to_string())))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn write_csv(path: &Path, records: &[SweepRecord]) -> Result<()> {
    fs::write(path, csv_string(records)?)?;
    Ok(())
}

/// `git describe` of the working tree, or "unknown" outside a repository.
pub fn git_describe() -> String {
    Command::new("git")
        .args(["describe", "--always", "--dirty", "--tags"])
        .output()
        .ok()
        .filter(|out| out.status.success())
        .and_then(|out| String::from_utf8(out.stdout).ok())
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .unwrap_or_else(|| "unknown".to_string())
}

pub fn write_manifest(path: &Path, cfg: &ExperimentConfig) -> Result<()> {
    let manifest = serde_json::json!({
        "config": cfg,
        "git": git_describe(),
        "tool": format!("isac-sim {}", env!("CARGO_PKG_VERSION")),
    });
    fs::write(path, serde_json::to_string_pretty(&manifest)?)?;
    Ok(())
}

/// Whitespace-delimited table, one row per sweep point, one column block per
/// method: (mean, se) for SNR/K sweeps, the efficiency for EE sweeps, and
/// (Ic, Is) pairs for the weight trace.
pub fn plot_data_string(cfg: &ExperimentConfig, records: &[SweepRecord]) -> String {
    let mut points: Vec<f64> = Vec::new();
    for r in records {
        if !points.contains(&r.point) {
            points.push(r.point);
        }
    }
    let find = |m: crate::config::Method, p: f64| {
        records
            .iter()
            .find(|r| r.method == m && r.point == p)
            .expect("record for every method x point")
    };

    let mut text = String::new();
    match cfg.sweep {
        Sweep::Pareto(_) => {
            text.push_str("# omega_c");
            for m in &cfg.methods {
                let _ = write!(text, " {}_Ic {}_Is", m.label(), m.label());
            }
            text.push('\n');
            for &p in &points {
                let _ = write!(text, "{p}");
                for &m in &cfg.methods {
                    let r = find(m, p);
                    let _ = write!(text, " {} {}", r.ic_mean, r.is_mean);
                }
                text.push('\n');
            }
        }
        Sweep::Ee(_) => {
            text.push_str("# k");
            for m in &cfg.methods {
                let _ = write!(text, " {}", m.label());
            }
            text.push('\n');
            for &p in &points {
                let _ = write!(text, "{p}");
                for &m in &cfg.methods {
                    let _ = write!(text, " {}", find(m, p).ee_mean);
                }
                text.push('\n');
            }
        }
        Sweep::Snr(_) | Sweep::K(_) => {
            text.push_str("# point");
            for m in &cfg.methods {
                let _ = write!(text, " {} {}_se", m.label(), m.label());
            }
            text.push('\n');
            for &p in &points {
                let _ = write!(text, "{p}");
                for &m in &cfg.methods {
                    let r = find(m, p);
                    let _ = write!(text, " {} {}", r.objective_mean, r.objective_se);
                }
                text.push('\n');
            }
        }
    }
    text
}

/// Writes csv + manifest (+ plot data) into `dir`; returns the written paths.
pub fn persist(
    dir: &Path,
    cfg: &ExperimentConfig,
    records: &[SweepRecord],
    plot_data: bool,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let kind = cfg.sweep.kind();
    let mut written = Vec::new();

    let csv_path = dir.join(format!("{kind}.csv"));
    write_csv(&csv_path, records)?;
    written.push(csv_path);

    let manifest_path = dir.join("manifest.json");
    write_manifest(&manifest_path, cfg)?;
    written.push(manifest_path);

    if plot_data {
        let plot_path = dir.join(format!("plot_{kind}.dat"));
        fs::write(&plot_path, plot_data_string(cfg, records))?;
        written.push(plot_path);
    }
    Ok(written)
}
