//! One learning trajectory of a two-sector economy loaded from a JSON config.

use sectorlearn::sim::run_trajectory;
use sectorlearn::EconomyConfig;

fn main() -> sectorlearn::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/configs/two_sector_pd.json");
    let cfg = EconomyConfig::from_path(std::path::Path::new(path))?;
    let records = run_trajectory(&cfg, 0)?;
    for r in records.iter().step_by(20).chain(records.last()) {
        let z: Vec<String> = r.sectors.iter().map(|s| format!("{:.4}", s.zeta)).collect();
        println!("t={:3}  w={:.5}  gdp={:.5}  labor share={:.4}  zeta=[{}]", r.t, r.w, r.gdp, r.labor_share, z.join(", "));
    }
    Ok(())
}
