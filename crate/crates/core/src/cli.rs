//! Command-line front end.
//!
//! Exit codes: 0 success, 1 configuration/input/I-O error, 2 solver or numerical failure.
//! `--seed` overrides the seed stored in a config file.

use crate::error::{Error, Result};
use crate::highdim::HighDimConfig;
use crate::model::{EconomyConfig, LearningMode};
use crate::moments::{mean_field_labor_path, pd_moments, pi_moments};
use crate::output::{self, Manifest};
use crate::scenario::{self, fmt, highdim_table, ResultTable, ScenarioOptions};
use crate::sim::{run_ensemble, run_trajectory};
use clap::{Args, Parser, Subcommand};
use std::path::{Path, PathBuf};
use std::time::Instant;

#[derive(Debug, Parser)]
#[command(name = "sectorlearn", version, about = "Sectoral economy with learning of returns to scale")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output directory (created if absent).
    #[arg(long)]
    pub out: PathBuf,
    /// Overwrite existing output files.
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one trajectory and write trajectory.csv.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        out: OutputArgs,
        #[arg(long)]
        seed: Option<u64>,
        /// Replication index selecting the shock stream.
        #[arg(long, default_value_t = 0)]
        rep: usize,
    },
    /// Run a Monte Carlo ensemble and write summary and band tables.
    Ensemble {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        out: OutputArgs,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 100)]
        reps: usize,
    },
    /// Closed-form belief moments along the mean-field labor path.
    Moments {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run a named preset.
    Scenario {
        /// example1 | example2 | example4 | appendixE | demography | highdim_demo
        name: String,
        #[command(flatten)]
        out: OutputArgs,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        reps: Option<usize>,
    },
    /// Elasticity learning on exogenous input paths.
    Highdim {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        out: OutputArgs,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn finish(dir: &Path, force: bool, tables: &[ResultTable], mut manifest: Manifest, start: Instant) -> Result<()> {
    output::prepare_dir(dir)?;
    let mut names: Vec<String> = tables.iter().map(|t| format!("{}.csv", t.name)).collect();
    names.push(output::MANIFEST.into());
    output::check_free(dir, &names, force)?;
    for t in tables {
        manifest.files.push(output::write_table(dir, t, force)?);
    }
    manifest.runtime_seconds = start.elapsed().as_secs_f64();
    output::write_manifest(dir, &manifest, force)
}

fn load_economy(path: &Path, seed: Option<u64>) -> Result<EconomyConfig> {
    let mut cfg = EconomyConfig::from_path(path)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn moments_table(cfg: &EconomyConfig) -> Result<ResultTable> {
    let path = mean_field_labor_path(cfg)?;
    let mut t = ResultTable::new(
        "moments",
        &["t", "sector", "z", "zeta_mean_field", "expectation", "variance", "mode", "location", "scale"],
    );
    for (i, p) in cfg.sectors.iter().enumerate() {
        for k in 0..cfg.horizon {
            let rep = match cfg.learning_mode {
                LearningMode::PD => pd_moments(&path.z[i][..=k], p),
                LearningMode::PI => pi_moments(path.zeta[i][k], path.z[i][k], p),
            };
            t.push(vec![
                (k + 1).to_string(),
                i.to_string(),
                fmt(path.z[i][k]),
                fmt(path.zeta[i][k]),
                fmt(rep.expectation),
                fmt(rep.variance),
                fmt(rep.mode),
                fmt(rep.vbar),
                fmt(rep.phibar),
            ]);
        }
    }
    Ok(t)
}

/// Executes a parsed command.
pub fn execute(cli: Cli) -> Result<()> {
    let start = Instant::now();
    match cli.command {
        Command::Simulate { config, out, seed, rep } => {
            let cfg = load_economy(&config, seed)?;
            let records = run_trajectory(&cfg, rep)?;
            let mut m = Manifest::new("simulate", cfg.seed, serde_json::to_value(&cfg)?);
            m.notes.push(format!("replication {rep}"));
            finish(&out.out, out.force, &[output::trajectory_table("trajectory", &records)], m, start)
        }
        Command::Ensemble { config, out, seed, reps } => {
            let cfg = load_economy(&config, seed)?;
            let stats = run_ensemble(&cfg, reps)?;
            let mut m = Manifest::new("ensemble", cfg.seed, serde_json::to_value(&cfg)?);
            m.reps = Some(reps);
            let tables = [output::ensemble_summary_table(&stats), output::ensemble_band_table(&stats)];
            finish(&out.out, out.force, &tables, m, start)
        }
        Command::Moments { config, out } => {
            let cfg = load_economy(&config, None)?;
            let t = moments_table(&cfg)?;
            let m = Manifest::new("moments", cfg.seed, serde_json::to_value(&cfg)?);
            finish(&out.out, out.force, &[t], m, start)
        }
        Command::Scenario { name, out, seed, reps } => {
            let defaults = ScenarioOptions::default();
            let opts = ScenarioOptions {
                reps: reps.unwrap_or(defaults.reps),
                seed: seed.unwrap_or(defaults.seed),
            };
            let res = scenario::run_scenario(&name, opts)?;
            let mut m = Manifest::new(
                &format!("scenario {name}"),
                opts.seed,
                serde_json::Value::Array(res.configs.clone()),
            );
            m.reps = Some(opts.reps);
            m.notes = res.notes.clone();
            finish(&out.out, out.force, &res.tables, m, start)
        }
        Command::Highdim { config, out, seed } => {
            let text = std::fs::read_to_string(&config)
                .map_err(|e| Error::Config(format!("{}: {e}", config.display())))?;
            let mut cfg = HighDimConfig::from_json(&text)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let t = highdim_table(&cfg, "elasticity")?;
            let m = Manifest::new("highdim", cfg.seed, serde_json::to_value(&cfg)?);
            finish(&out.out, out.force, &[t], m, start)
        }
    }
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
