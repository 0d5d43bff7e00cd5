//! Learning with endogenous labor supply delta = (w / r)^(1 / (r - 1)).

use sectorlearn::equilibrium::{labor_supply_endogenous, solve_wage_endogenous};
use sectorlearn::sim::run_trajectory;
use sectorlearn::{EconomyConfig, SectorParams};

fn main() -> sectorlearn::Result<()> {
    let p = [SectorParams::new(0.5, 0.0, 0.1, 0.1, 0.2)];
    let (sol, delta) = solve_wage_endogenous(&[0.5], &p, 0.5, 2.0, 0.0)?;
    println!("static: w = {:.12}  delta = {:.12}  check = {:.12}", sol.w, delta, labor_supply_endogenous(sol.w, 2.0));

    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/configs/endogenous_pi.json");
    let cfg = EconomyConfig::from_path(std::path::Path::new(path))?;
    for r in run_trajectory(&cfg, 0)?.iter().step_by(25) {
        println!("t={:3}  w={:.6}  delta={:.6}  zeta={:.6}", r.t, r.w, r.delta, r.sectors[0].zeta);
    }
    Ok(())
}
