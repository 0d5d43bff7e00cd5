//! Solves the market-clearing wage for a three-sector economy and checks the allocation.

use sectorlearn::equilibrium::{aggregate_labor_demand, labor_demand, solve_wage};
use sectorlearn::SectorParams;

fn main() -> sectorlearn::Result<()> {
    let params = [
        SectorParams::new(0.4, 0.0, 0.1, 0.1, 0.1),
        SectorParams::new(0.6, 0.2, 0.3, 0.1, 0.5),
        SectorParams::new(0.8, -0.1, 0.2, 0.1, 0.9),
    ];
    let beliefs = [0.35, 0.55, 0.75];
    let alpha = 0.5;
    let target = 9.0;
    let sol = solve_wage(&beliefs, &params, alpha, target)?;
    println!("w = {:.12} (bracket [{:.6}, {:.6}], residual {:.2e})", sol.w, sol.lo, sol.hi, sol.residual);
    for (i, (p, z)) in params.iter().zip(beliefs).enumerate() {
        println!("sector {i}: l = {:.6}", labor_demand(p, z, alpha, sol.w)?);
    }
    println!("aggregate demand = {:.12}", aggregate_labor_demand(&beliefs, &params, alpha, sol.w)?);
    Ok(())
}
