//! Seed-matched ensembles comparing path-dependent and path-independent learning.

use sectorlearn::scenario::example1_config;
use sectorlearn::sim::run_ensemble;
use sectorlearn::LearningMode;

fn main() -> sectorlearn::Result<()> {
    for mode in [LearningMode::PD, LearningMode::PI] {
        let cfg = example1_config(mode, 0.4, 0.1, 0.1, 0.1, 500, 42);
        let s = run_ensemble(&cfg, 200)?;
        println!(
            "{mode:?}: mean |zeta(T) - zeta*| = {:.3e}  |E zeta(T) - zeta*| = {:.3e}  mean zeta(T) = {:.6}",
            s.mean_abs_err[0], s.expectation_gap[0], s.mean_terminal[0]
        );
    }
    Ok(())
}
