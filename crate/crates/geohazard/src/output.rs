//! Report files: `report.json` and the optional histogram CSV.

use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::Context;
use geohazard_core::hazard::ExperimentReport;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::BoundReport;

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub tool_version: String,
    pub subcommand: String,
    /// SHA-256 of the effective config with keys sorted.
    pub config_hash: String,
    pub seed: u64,
    pub config: Value,
    /// Seconds since the Unix epoch.
    pub started_at: f64,
    pub finished_at: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Payload {
    pub report: ExperimentReport,
    pub bounds: BoundReport,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub wall_time_seconds: f64,
    pub workers: usize,
}

/// Everything in `report.json`. Only `manifest` timestamps and `timing`
/// vary between identical runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub manifest: Manifest,
    pub payload: Payload,
    pub timing: Timing,
}

pub fn unix_now() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0.0, |d| d.as_secs_f64())
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("creating a temporary file in {}", dir.display()))?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path)
        .with_context(|| format!("moving the report into place at {}", path.display()))?;
    Ok(())
}

pub fn write_report(path: &Path, report: &ReportFile) -> anyhow::Result<()> {
    let mut text = serde_json::to_vec_pretty(report)?;
    text.push(b'\n');
    write_atomic(path, &text)
}

pub fn read_report(path: &Path) -> anyhow::Result<ReportFile> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(serde_json::from_str(&text)?)
}

/// Rows `k, count, empirical_prob, target_prob` over the union of both
/// supports. Empirical probabilities sum to one minus the censored fraction.
pub fn histogram_csv(report: &ExperimentReport) -> anyhow::Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["k", "count", "empirical_prob", "target_prob"])?;
    let counts = &report.histogram.counts;
    let rows = counts.len().max(report.target.pmf().len());
    for k in 0..rows {
        w.write_record([
            k.to_string(),
            counts.get(k).copied().unwrap_or(0).to_string(),
            report.empirical.prob(k).unwrap_or(0.0).to_string(),
            report.target.prob(k).unwrap_or(0.0).to_string(),
        ])?;
    }
    Ok(w.into_inner()?)
}

/// Plain-text summary for the terminal.
pub fn summary(report: &ExperimentReport, bounds: &BoundReport) -> String {
    let mut s = String::new();
    let mut row = |k: &str, v: String| s.push_str(&format!("  {k:<22} {v}\n"));
    row("kind", format!("{:?}", report.kind).to_lowercase());
    row("trials", report.trials.to_string());
    row("seed", report.seed.to_string());
    if let Some(r) = report.rho_used {
        row("rho", format!("{r:.6}"));
    }
    if let Some(l) = report.lambda_used {
        row("lambda", format!("{l:.6}"));
    }
    row("empirical mean", format!("{:.6}", report.empirical.mean()));
    row("target mean", format!("{:.6}", report.target.mean()));
    row(
        "tvd",
        format!("[{:.6}, {:.6}]", report.tvd_interval.lo, report.tvd_interval.hi),
    );
    row(
        "bootstrap 95% ci",
        format!("[{:.6}, {:.6}]", report.bootstrap_ci.lo, report.bootstrap_ci.hi),
    );
    row("censored fraction", format!("{:.3e}", report.censored_fraction));
    row("steps", report.steps.to_string());
    for (name, v) in [
        ("thm21 rhs", bounds.thm21_rhs),
        ("thm23 rhs", bounds.thm23_rhs),
        ("main_thm rhs", bounds.main_thm_rhs),
    ] {
        if let Some(v) = v {
            row(name, format!("{v:.6e} ({})", bounds.note));
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.json");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), b"two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
