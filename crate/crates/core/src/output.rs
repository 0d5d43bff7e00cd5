//! CSV and manifest writers. Existing files are never replaced unless `force` is set.

use crate::error::{Error, Result};
use crate::scenario::{fmt, ResultTable};
use crate::sim::{EnsembleStats, TrajectoryRecord};
use serde::Serialize;
use std::path::{Path, PathBuf};

/// Column header of trajectory files.
pub const TRAJECTORY_HEADER: [&str; 10] = ["t", "sector", "w", "l", "x", "p", "zeta", "zeta_hat", "gdp", "labor_share"];

/// Creates `dir` if absent.
pub fn prepare_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    Ok(())
}

fn target(dir: &Path, file: &str, force: bool) -> Result<PathBuf> {
    let path = dir.join(file);
    if path.exists() && !force {
        return Err(Error::InvalidInput(format!(
            "{} exists; pass --force to overwrite",
            path.display()
        )));
    }
    Ok(path)
}

/// Fails if any of `files` already exists in `dir` and `force` is not set.
pub fn check_free(dir: &Path, files: &[String], force: bool) -> Result<()> {
    for f in files {
        target(dir, f, force)?;
    }
    Ok(())
}

fn write_rows(path: &Path, header: &[String], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes a table to `dir/<name>.csv` and returns the file name.
pub fn write_table(dir: &Path, table: &ResultTable, force: bool) -> Result<String> {
    let file = format!("{}.csv", table.name);
    write_rows(&target(dir, &file, force)?, &table.header, &table.rows)?;
    Ok(file)
}

/// Trajectory as a table with one row per (period, sector).
pub fn trajectory_table(name: &str, records: &[TrajectoryRecord]) -> ResultTable {
    let mut t = ResultTable::new(name, &TRAJECTORY_HEADER);
    for r in records {
        for (i, s) in r.sectors.iter().enumerate() {
            t.push(vec![
                r.t.to_string(),
                i.to_string(),
                fmt(r.w),
                fmt(s.l),
                fmt(s.x),
                fmt(s.p),
                fmt(s.zeta),
                fmt(s.zeta_hat),
                fmt(r.gdp),
                fmt(r.labor_share),
            ]);
        }
    }
    t
}

/// Per-sector ensemble summary.
pub fn ensemble_summary_table(stats: &EnsembleStats) -> ResultTable {
    let mut t = ResultTable::new(
        "ensemble_summary",
        &["sector", "reps", "horizon", "mean_abs_err", "expectation_gap", "mean_terminal", "labor_share_mean", "labor_share_sd"],
    );
    for i in 0..stats.mean_abs_err.len() {
        t.push(vec![
            i.to_string(),
            stats.reps.to_string(),
            stats.horizon.to_string(),
            fmt(stats.mean_abs_err[i]),
            fmt(stats.expectation_gap[i]),
            fmt(stats.mean_terminal[i]),
            fmt(stats.labor_share_mean),
            fmt(stats.labor_share_sd),
        ]);
    }
    t
}

/// Per-period band of zeta(t).
pub fn ensemble_band_table(stats: &EnsembleStats) -> ResultTable {
    let mut t = ResultTable::new("ensemble_band", &["t", "sector", "mean", "sd"]);
    for b in &stats.band {
        t.push(vec![b.t.to_string(), b.sector.to_string(), fmt(b.mean), fmt(b.sd)]);
    }
    t
}

/// Run manifest written next to every output set.
#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub artifact: String,
    pub version: String,
    pub command: String,
    pub seed: u64,
    pub reps: Option<usize>,
    pub config: serde_json::Value,
    pub files: Vec<String>,
    pub notes: Vec<String>,
    pub runtime_seconds: f64,
}

impl Manifest {
    pub fn new(command: &str, seed: u64, config: serde_json::Value) -> Self {
        Self {
            artifact: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            seed,
            reps: None,
            config,
            files: Vec::new(),
            notes: Vec::new(),
            runtime_seconds: 0.0,
        }
    }
}

/// File name of the manifest.
pub const MANIFEST: &str = "manifest.json";

/// Writes `dir/manifest.json`.
pub fn write_manifest(dir: &Path, manifest: &Manifest, force: bool) -> Result<()> {
    let path = target(dir, MANIFEST, force)?;
    std::fs::write(path, serde_json::to_string_pretty(manifest)? + "\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn refuses_overwrite_without_force() {
        let dir = tempfile::tempdir().unwrap();
        let mut t = ResultTable::new("a", &["x"]);
        t.push(vec!["1".into()]);
        write_table(dir.path(), &t, false).unwrap();
        assert!(write_table(dir.path(), &t, false).is_err());
        write_table(dir.path(), &t, true).unwrap();
        let text = std::fs::read_to_string(dir.path().join("a.csv")).unwrap();
        assert_eq!(text, "x\n1\n");
    }
}
