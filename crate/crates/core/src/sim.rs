//! Decision-estimation loop and Monte Carlo ensembles.
//!
//! Each period clamps beliefs, clears the labor market, realizes production with a fresh
//! shock and updates every sector's belief from (z, s) = (ln l, ln x - m).

use crate::belief::{self, clamp_belief, BeliefState};
use crate::equilibrium::{clear_period, Supply};
use crate::error::{Error, Result};
use crate::model::{EconomyConfig, ShockStream};
use rayon::prelude::*;
use serde::Serialize;

/// How beliefs evolve along a trajectory.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum BeliefPolicy {
    /// MAP learning in the configured mode.
    #[default]
    Learn,
    /// Beliefs held fixed at the given per-sector values (no learning).
    Fixed(Vec<f64>),
    /// Beliefs held at the true returns to scale.
    PerfectKnowledge,
}

/// One sector's realization in a period.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SectorRecord {
    pub l: f64,
    pub x: f64,
    pub p: f64,
    /// Belief after absorbing this period's observation.
    pub zeta: f64,
    /// Clamped value of `zeta`, the input belief for the next period.
    pub zeta_hat: f64,
}

/// One period of a trajectory.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryRecord {
    pub t: usize,
    pub w: f64,
    pub sectors: Vec<SectorRecord>,
    pub gdp: f64,
    pub labor_share: f64,
    /// Total labor supply (exogenous or endogenous).
    pub delta: f64,
    pub l0: f64,
    /// Signed labor-market residual of the wage solve.
    pub residual: f64,
}

/// Full trajectory with the terminal belief states.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub records: Vec<TrajectoryRecord>,
    pub beliefs: Vec<BeliefState>,
}

/// Runs one replication with MAP learning.
pub fn run_trajectory(config: &EconomyConfig, replication: usize) -> Result<Vec<TrajectoryRecord>> {
    Ok(run_trajectory_with(config, replication, &BeliefPolicy::Learn)?.records)
}

/// Runs one replication under the given belief policy.
///
/// Shocks of sector i at period t are draw t-1 of the stream (seed, i, replication), so runs
/// that differ only in learning mode or policy see identical shocks.
pub fn run_trajectory_with(
    config: &EconomyConfig,
    replication: usize,
    policy: &BeliefPolicy,
) -> Result<Trajectory> {
    config.validate()?;
    let n = config.n_sectors();
    let mut states: Vec<BeliefState> = config
        .sectors
        .iter()
        .map(|p| BeliefState::new(p, config.learning_mode))
        .collect();
    let fixed: Option<Vec<f64>> = match policy {
        BeliefPolicy::Learn => None,
        BeliefPolicy::PerfectKnowledge => Some(config.sectors.iter().map(|p| p.zeta_star).collect()),
        BeliefPolicy::Fixed(v) => {
            if v.len() != n {
                return Err(Error::InvalidInput(format!(
                    "fixed beliefs need {n} entries, got {}",
                    v.len()
                )));
            }
            Some(v.clone())
        }
    };
    if let Some(v) = &fixed {
        for (s, z) in states.iter_mut().zip(v) {
            s.zeta = *z;
        }
    }
    let mut streams: Vec<ShockStream> = (0..n)
        .map(|i| ShockStream::new(config.seed, i, replication))
        .collect();
    let mut records = Vec::with_capacity(config.horizon);
    for t in 1..=config.horizon {
        let beliefs: Vec<f64> = states
            .iter()
            .zip(&config.sectors)
            .map(|(s, p)| s.zeta_hat(p))
            .collect();
        let shocks: Vec<_> = config
            .sectors
            .iter()
            .zip(streams.iter_mut())
            .map(|(p, st)| st.draw((t - 1) as u64, p.m, p.sigma))
            .collect();
        let supply = match config.endogenous_labor {
            Some(e) => Supply::Endogenous { r: e.r },
            None => Supply::Exogenous { delta: config.delta(t) },
        };
        let out = clear_period(&config.sectors, &beliefs, &shocks, supply, config.l0_at(t), config.alpha)
            .map_err(|e| Error::Period { period: t, source: Box::new(e) })?;
        let mut sectors = Vec::with_capacity(n);
        for i in 0..n {
            let p = &config.sectors[i];
            if fixed.is_none() {
                let (z, s) = belief::observation(out.labor[i], out.output[i], p.m);
                states[i] = belief::update(&states[i], z, s, p)
                    .map_err(|e| Error::Period { period: t, source: Box::new(e) })?;
            }
            sectors.push(SectorRecord {
                l: out.labor[i],
                x: out.output[i],
                p: out.prices[i],
                zeta: states[i].zeta,
                zeta_hat: clamp_belief(states[i].zeta, p),
            });
        }
        records.push(TrajectoryRecord {
            t,
            w: out.w,
            sectors,
            gdp: out.gdp,
            labor_share: out.labor_share,
            delta: out.delta,
            l0: out.l0,
            residual: out.residual,
        });
    }
    Ok(Trajectory { records, beliefs: states })
}

/// Mean and standard deviation of zeta(t) across replications.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BandPoint {
    pub t: usize,
    pub sector: usize,
    pub mean: f64,
    pub sd: f64,
}

/// Aggregate statistics of an ensemble of replications.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleStats {
    pub reps: usize,
    pub horizon: usize,
    /// Per sector: mean over replications of |zeta(T) - zeta*|.
    pub mean_abs_err: Vec<f64>,
    /// Per sector: |mean over replications of zeta(T) - zeta*|.
    pub expectation_gap: Vec<f64>,
    /// Per sector: mean terminal belief.
    pub mean_terminal: Vec<f64>,
    /// Terminal beliefs, `terminal[rep][sector]`.
    pub terminal: Vec<Vec<f64>>,
    /// Labor share averaged over periods and replications.
    pub labor_share_mean: f64,
    /// Within-replication standard deviation of the labor share over time, averaged over
    /// replications.
    pub labor_share_sd: f64,
    /// Per-period expectation band of zeta(t), ordered by (t, sector).
    pub band: Vec<BandPoint>,
}

struct RepSummary {
    zeta: Vec<Vec<f64>>,
    ls_mean: f64,
    ls_sd: f64,
}

fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Runs `reps` learning replications in parallel.
pub fn run_ensemble(config: &EconomyConfig, reps: usize) -> Result<EnsembleStats> {
    run_ensemble_with(config, reps, &BeliefPolicy::Learn)
}

/// Runs `reps` replications under a belief policy.
///
/// Replications are computed in parallel but reduced sequentially in replication order, so
/// the statistics are bit-identical for any thread count.
pub fn run_ensemble_with(config: &EconomyConfig, reps: usize, policy: &BeliefPolicy) -> Result<EnsembleStats> {
    if reps == 0 {
        return Err(Error::InvalidInput("reps must be at least 1".into()));
    }
    config.validate()?;
    let n = config.n_sectors();
    let horizon = config.horizon;
    let summaries: Vec<RepSummary> = (0..reps)
        .into_par_iter()
        .map(|rep| {
            let traj = run_trajectory_with(config, rep, policy)?;
            let shares: Vec<f64> = traj.records.iter().map(|r| r.labor_share).collect();
            let (ls_mean, ls_sd) = mean_sd(&shares);
            let zeta = (0..n)
                .map(|i| traj.records.iter().map(|r| r.sectors[i].zeta).collect())
                .collect();
            Ok(RepSummary { zeta, ls_mean, ls_sd })
        })
        .collect::<Result<_>>()?;

    let terminal: Vec<Vec<f64>> = summaries
        .iter()
        .map(|s| s.zeta.iter().map(|z| z[horizon - 1]).collect())
        .collect();
    let r = reps as f64;
    let mut mean_abs_err = vec![0.0; n];
    let mut mean_terminal = vec![0.0; n];
    for row in &terminal {
        for i in 0..n {
            mean_abs_err[i] += (row[i] - config.sectors[i].zeta_star).abs();
            mean_terminal[i] += row[i];
        }
    }
    for i in 0..n {
        mean_abs_err[i] /= r;
        mean_terminal[i] /= r;
    }
    let expectation_gap = (0..n)
        .map(|i| (mean_terminal[i] - config.sectors[i].zeta_star).abs())
        .collect();
    let mut band = Vec::with_capacity(horizon * n);
    let mut column = vec![0.0; reps];
    for t in 0..horizon {
        for i in 0..n {
            for (k, s) in summaries.iter().enumerate() {
                column[k] = s.zeta[i][t];
            }
            let (mean, sd) = mean_sd(&column);
            band.push(BandPoint { t: t + 1, sector: i, mean, sd });
        }
    }
    Ok(EnsembleStats {
        reps,
        horizon,
        mean_abs_err,
        expectation_gap,
        mean_terminal,
        terminal,
        labor_share_mean: summaries.iter().map(|s| s.ls_mean).sum::<f64>() / r,
        labor_share_sd: summaries.iter().map(|s| s.ls_sd).sum::<f64>() / r,
        band,
    })
}
