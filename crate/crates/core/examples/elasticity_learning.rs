//! Nonnegative MAP learning of input elasticities for three firms.

use sectorlearn::highdim::{simulate_elasticity_learning, HighDimConfig};

fn main() -> sectorlearn::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/configs/highdim_pd.json");
    let cfg = HighDimConfig::from_json(&std::fs::read_to_string(path)?)?;
    let records = simulate_elasticity_learning(&cfg)?;
    for r in records.iter().filter(|r| r.t == 1 || r.t % 50 == 0) {
        let b: Vec<String> = r.beta.iter().map(|v| format!("{v:.4}")).collect();
        println!("t={:3} firm={} beta=[{}] active={} kkt={:.1e}", r.t, r.firm, b.join(", "), r.active, r.kkt);
    }
    for (i, row) in cfg.params.beta_star.iter().enumerate() {
        println!("firm {i} true beta = {row:?}");
    }
    Ok(())
}
