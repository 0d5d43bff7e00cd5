//! Runs a named preset and prints the first rows of each table.
//!
//! Usage: cargo run --release --example scenarios -- [name] [reps]

use sectorlearn::scenario::{run_scenario, ScenarioOptions, SCENARIOS};

fn main() -> sectorlearn::Result<()> {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "appendixE".into());
    let reps = args.next().and_then(|r| r.parse().ok()).unwrap_or(20);
    println!("available: {}", SCENARIOS.join(", "));
    let res = run_scenario(&name, ScenarioOptions { reps, ..Default::default() })?;
    for t in &res.tables {
        println!("\n{} ({} rows)\n{}", t.name, t.rows.len(), t.header.join(","));
        for row in t.rows.iter().take(5) {
            println!("{}", row.join(","));
        }
    }
    for n in &res.notes {
        println!("note: {n}");
    }
    Ok(())
}
