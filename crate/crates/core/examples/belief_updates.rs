//! Path-dependent and path-independent MAP updates on the same observation stream.

use sectorlearn::belief::{pd_update, pi_update, BeliefState};
use sectorlearn::{LearningMode, SectorParams};

fn main() -> sectorlearn::Result<()> {
    let p = SectorParams::new(0.4, 0.0, 0.1, 0.1, 0.1);
    let mut pd = BeliefState::new(&p, LearningMode::PD);
    let mut pi = BeliefState::new(&p, LearningMode::PI);
    // exact signals s = zeta* z perturbed by a small deterministic wobble
    for t in 0..20 {
        let z = 1.0 + 0.05 * t as f64;
        let s = p.zeta_star * z + 0.02 * ((t % 3) as f64 - 1.0);
        pd = pd_update(&pd, z, s, &p)?;
        pi = pi_update(&pi, z, s, &p)?;
        println!("t={:2}  pd={:.6}  pi={:.6}", t + 1, pd.zeta, pi.zeta);
    }
    println!("pd sufficient statistics: sum zs = {:.6}, sum zz = {:.6}", pd.pd_sum_zs, pd.pd_sum_zz);
    Ok(())
}
