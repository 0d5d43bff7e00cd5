use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sectorlearn"))
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/configs").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn read(p: &Path) -> String {
    std::fs::read_to_string(p).unwrap()
}

#[test]
fn simulate_writes_trajectory_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let cfg = config("two_sector_pd.json");
    let o = run(&["simulate", "--config", cfg.to_str().unwrap(), "--out", out]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = read(&dir.path().join("trajectory.csv"));
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "t,sector,w,l,x,p,zeta,zeta_hat,gdp,labor_share");
    assert_eq!(lines.count(), 200 * 2);
    let m: serde_json::Value = serde_json::from_str(&read(&dir.path().join("manifest.json"))).unwrap();
    assert_eq!(m["seed"], 7);
    assert_eq!(m["command"], "simulate");
}

#[test]
fn seed_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let cfg = config("two_sector_pd.json");
    let o = run(&["simulate", "--config", cfg.to_str().unwrap(), "--out", out, "--seed", "99"]);
    assert!(o.status.success());
    let m: serde_json::Value = serde_json::from_str(&read(&dir.path().join("manifest.json"))).unwrap();
    assert_eq!(m["seed"], 99);
}

#[test]
fn ensemble_is_byte_identical_across_runs() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let cfg = config("two_sector_pd.json");
    for d in [&a, &b] {
        let o = run(&["ensemble", "--config", cfg.to_str().unwrap(), "--reps", "16", "--out", d.path().to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    for f in ["ensemble_summary.csv", "ensemble_band.csv"] {
        assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap(), "{f}");
    }
}

#[test]
fn malformed_config_exits_one_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\n  \"alpha\": 0.5,\n  \"sectors\": [,]\n}\n").unwrap();
    let o = run(&["simulate", "--config", bad.to_str().unwrap(), "--out", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn unknown_field_and_missing_file_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    let text = read(&config("two_sector_pd.json")).replace("\"horizon\"", "\"horizn\"");
    std::fs::write(&bad, text).unwrap();
    let out = dir.path().join("o");
    assert_eq!(run(&["simulate", "--config", bad.to_str().unwrap(), "--out", out.to_str().unwrap()]).status.code(), Some(1));
    let missing = dir.path().join("nope.json");
    assert_eq!(run(&["simulate", "--config", missing.to_str().unwrap(), "--out", out.to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(run(&["bogus"]).status.code(), Some(1));
}

#[test]
fn refuses_to_overwrite_without_force() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let cfg = config("two_sector_pd.json");
    let args = ["simulate", "--config", cfg.to_str().unwrap(), "--out", out];
    assert!(run(&args).status.success());
    let before = read(&dir.path().join("trajectory.csv"));
    assert_eq!(run(&[&args[..], &["--seed", "1"]].concat()).status.code(), Some(1));
    assert_eq!(read(&dir.path().join("trajectory.csv")), before);
    assert!(run(&[&args[..], &["--seed", "1", "--force"]].concat()).status.success());
    assert_ne!(read(&dir.path().join("trajectory.csv")), before);
}

#[test]
fn scenario_example2_writes_histograms() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["scenario", "example2", "--reps", "20", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csvs: Vec<String> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.ends_with(".csv"))
        .collect();
    assert_eq!(csvs.iter().filter(|n| n.contains("hist")).count(), 3, "{csvs:?}");
    assert_eq!(csvs.len(), 4, "{csvs:?}");
    assert!(dir.path().join("manifest.json").exists());
}

#[test]
fn unknown_scenario_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(&["scenario", "nope", "--out", dir.path().to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn highdim_and_moments_subcommands() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("highdim_pd.json");
    let o = run(&["highdim", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = read(&dir.path().join("elasticity.csv"));
    assert!(csv.starts_with("t,firm,beta_0,beta_1,beta_2,active,kkt_violation"));
    assert_eq!(csv.lines().count(), 1 + 200 * 3);

    let cfg = config("two_sector_pd.json");
    let m = dir.path().join("m");
    let o = run(&["moments", "--config", cfg.to_str().unwrap(), "--out", m.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(read(&m.join("moments.csv")).lines().count(), 1 + 200 * 2);
}
