use std::path::Path;
use std::process::{Command, Output};

use spinbath::harness::sweep::{metadata_path, SweepConfig};

fn spinbath(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spinbath")).args(args).output().unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn sweep_writes_csv_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run.csv");
    let res = spinbath(&["sweep", "--scenario", "common", "--n-spins", "20", "--steps", "11", "--out", path_str(&out)]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let csv = std::fs::read_to_string(&out).unwrap();
    let header = csv.lines().next().unwrap();
    assert!(header.starts_with("trial,time,re_r1,im_r1,re_r2,im_r2,re_r12p,im_r12p,re_r12m,im_r12m,concurrence"));
    assert_eq!(csv.lines().count(), 1 + 11 * 3);
    let meta = std::fs::read_to_string(metadata_path(&out)).unwrap();
    let table: toml::Table = toml::from_str(&meta).unwrap();
    assert_eq!(table["ensemble"].as_str(), Some("single-realization"));
    let cfg: SweepConfig = table["config"].clone().try_into().unwrap();
    assert_eq!(cfg.bath.n_spins, 20);
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("sweep.toml");
    std::fs::write(
        &cfg_path,
        r#"
scenario = "one-coupled"
n_trials = 1
outputs = ["factors"]
seed = 3

[initial_state]
bell = 3

[time_grid]
stop = 0.5
steps = 6

[bath]
n_spins = 12

[bath.omega_dist]
kind = "constant"
value = 0.5
"#,
    )
    .unwrap();
    let base = spinbath(&["sweep", "--config", path_str(&cfg_path)]);
    assert!(base.status.success(), "{}", String::from_utf8_lossy(&base.stderr));
    let text = String::from_utf8(base.stdout).unwrap();
    assert_eq!(text.lines().next().unwrap(), "trial,time,re_r1,im_r1,re_r2,im_r2");
    assert_eq!(text.lines().count(), 1 + 6 * 3);

    let over = spinbath(&["sweep", "--config", path_str(&cfg_path), "--steps", "4", "--outputs", "concurrence"]);
    assert!(over.status.success());
    let text = String::from_utf8(over.stdout).unwrap();
    assert_eq!(text.lines().next().unwrap(), "trial,time,concurrence,concurrence_closed");
    assert_eq!(text.lines().count(), 1 + 4 * 3);
}

#[test]
fn invalid_configuration_exits_2() {
    for args in [
        &["sweep", "--bell", "5"][..],
        &["sweep", "--steps", "1"],
        &["sweep", "--omega-dist", "uniform:3,1"],
        &["sweep", "--outputs", "purity"],
        &["sweep", "--scenario", "two-bath", "--omega-dist", "equal"],
        &["oracle-check", "--n-spins", "12"],
    ] {
        let res = spinbath(args);
        assert_eq!(res.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&res.stderr));
    }
}

#[test]
fn oracle_check_reports_deviation() {
    let res = spinbath(&["oracle-check", "--scenario", "one-coupled", "--n-spins", "5", "--seed", "9"]);
    assert!(res.status.success());
    let text = String::from_utf8(res.stdout).unwrap();
    let last = text.lines().last().unwrap();
    let dev: f64 = last.rsplit(' ').next().unwrap().parse().unwrap();
    assert!(dev <= 1e-12, "{last}");
}

#[test]
fn fit_reads_sweep_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("big.csv");
    let res = spinbath(&[
        "sweep", "--n-spins", "1000", "--t-max", "0.12", "--steps", "121", "--outputs", "factors", "--out",
        path_str(&out),
    ]);
    assert!(res.status.success());
    let fit = spinbath(&["fit", "--input", path_str(&out), "--factor", "r2"]);
    assert!(fit.status.success(), "{}", String::from_utf8_lossy(&fit.stderr));
    let text = String::from_utf8(fit.stdout).unwrap();
    let value = |key: &str| -> f64 {
        let line = text.lines().find(|l| l.starts_with(key)).unwrap();
        line.split(" = ").nth(1).unwrap().parse().unwrap()
    };
    assert!(value("a_hat") > 0.0);
    assert!(value("max_residual") < 0.05);

    let missing = spinbath(&["fit", "--input", path_str(&out), "--factor", "r12p"]);
    assert_eq!(missing.status.code(), Some(2));
}
