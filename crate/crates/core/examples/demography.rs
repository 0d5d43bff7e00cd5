//! Expected path-dependent belief along the mean-field path of a growing population.

use sectorlearn::scenario::demography_analysis;

fn main() -> sectorlearn::Result<()> {
    let a = demography_analysis(200)?;
    for t in [1, 10, 50, 100, 200] {
        println!("t={t:3}  sum z^2 = {:10.4}  E zeta = {:.6}  (zeta* = {})", a.z2[t - 1], a.expected_belief[t - 1], a.zeta_star);
    }
    Ok(())
}
