//! End-to-end tests of the `isac-sim` binary: exit codes, output files,
//! reproducibility, and thread invariance.

use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_isac-sim"))
        .args(args)
        .output()
        .expect("binary should launch")
}

fn write_config(dir: &Path, name: &str, v: serde_json::Value) -> String {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string_pretty(&v).unwrap()).unwrap();
    path.to_str().unwrap().to_string()
}

fn small_sweep_config() -> serde_json::Value {
    serde_json::json!({
        "geometry": {"n_tx": 6, "n_rx_comm": 4, "n_rx_sense": 3, "n_paths": 4},
        "link": {"slots": 32, "omega_c": 0.5, "omega_s": 0.5},
        "sweep": {"snr": [0.0, 10.0]},
        "trials": 3,
        "seed": 7,
        "methods": ["ges", "random", "full"],
        "k": 3,
        "k_rx_comm": 3,
        "k_rx_sense": 2
    })
}

/// Drops the trailing wall-time field from every CSV line.
fn mask_ms(csv: &str) -> String {
    csv.lines()
        .map(|l| match l.rfind(',') {
            Some(i) => &l[..i],
            None => l,
        })
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn sweep_writes_csv_and_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "cfg.json", small_sweep_config());
    let out = tmp.path().join("out");
    let res = run(&["sweep", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(res.status.success(), "stderr: {}", String::from_utf8_lossy(&res.stderr));

    let csv = std::fs::read_to_string(out.join("snr.csv")).unwrap();
    assert_eq!(
        csv.lines().next().unwrap(),
        "method,point,objective_mean,objective_se,Ic_mean,Is_mean,ee_mean,trials,ms"
    );
    // 2 sweep points x 3 methods.
    assert_eq!(csv.lines().count(), 7);

    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["config"]["seed"], 7);
    assert!(manifest["git"].is_string());
    assert!(manifest["tool"].as_str().unwrap().starts_with("isac-sim "));
}

#[test]
fn identical_configs_reproduce_identical_output() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "cfg.json", small_sweep_config());
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for out in [&a, &b] {
        let res =
            run(&["sweep", "--config", &cfg, "--out", out.to_str().unwrap(), "--plot-data"]);
        assert!(res.status.success());
    }
    let csv_a = std::fs::read_to_string(a.join("snr.csv")).unwrap();
    let csv_b = std::fs::read_to_string(b.join("snr.csv")).unwrap();
    assert_eq!(mask_ms(&csv_a), mask_ms(&csv_b));
    // Plot data carries no wall time, so it must match byte for byte.
    let dat_a = std::fs::read(a.join("plot_snr.dat")).unwrap();
    let dat_b = std::fs::read(b.join("plot_snr.dat")).unwrap();
    assert_eq!(dat_a, dat_b);
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "cfg.json", small_sweep_config());
    let (a, b) = (tmp.path().join("t1"), tmp.path().join("t4"));
    for (out, threads) in [(&a, "1"), (&b, "4")] {
        let res = run(&[
            "sweep",
            "--config",
            &cfg,
            "--out",
            out.to_str().unwrap(),
            "--threads",
            threads,
        ]);
        assert!(res.status.success());
    }
    let csv_a = std::fs::read_to_string(a.join("snr.csv")).unwrap();
    let csv_b = std::fs::read_to_string(b.join("snr.csv")).unwrap();
    assert_eq!(mask_ms(&csv_a), mask_ms(&csv_b));
}

#[test]
fn seed_flag_overrides_the_config() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "cfg.json", small_sweep_config());
    let (a, b) = (tmp.path().join("s7"), tmp.path().join("s8"));
    let res = run(&["sweep", "--config", &cfg, "--out", a.to_str().unwrap()]);
    assert!(res.status.success());
    let res = run(&["sweep", "--config", &cfg, "--out", b.to_str().unwrap(), "--seed", "8"]);
    assert!(res.status.success());
    let csv_a = std::fs::read_to_string(a.join("snr.csv")).unwrap();
    let csv_b = std::fs::read_to_string(b.join("snr.csv")).unwrap();
    assert_ne!(mask_ms(&csv_a), mask_ms(&csv_b));
}

#[test]
fn pareto_verb_runs_and_emits_plot_data() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "cfg.json",
        serde_json::json!({
            "geometry": {"n_tx": 6, "n_rx_comm": 4, "n_rx_sense": 3, "n_paths": 4},
            "link": {"slots": 32, "snr_db": 10.0},
            "sweep": {"pareto": [0.0, 0.5, 1.0]},
            "trials": 2,
            "seed": 3,
            "methods": ["ges", "fixed"],
            "k": 3
        }),
    );
    let out = tmp.path().join("out");
    let res = run(&["pareto", "--config", &cfg, "--out", out.to_str().unwrap(), "--plot-data"]);
    assert!(res.status.success(), "stderr: {}", String::from_utf8_lossy(&res.stderr));
    let dat = std::fs::read_to_string(out.join("plot_pareto.dat")).unwrap();
    assert!(dat.starts_with("# omega_c "));
    assert!(dat.contains("ges_Ic"));
    assert_eq!(dat.lines().count(), 4); // header + one line per weight
}

#[test]
fn ee_verb_runs() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "cfg.json",
        serde_json::json!({
            "geometry": {"n_tx": 6, "n_rx_comm": 4, "n_rx_sense": 3, "n_paths": 4},
            "link": {"slots": 32, "snr_db": 10.0},
            "sweep": {"ee": [3, 4]},
            "trials": 2,
            "seed": 3,
            "methods": ["ges", "full"]
        }),
    );
    let out = tmp.path().join("out");
    let res = run(&["ee", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(res.status.success(), "stderr: {}", String::from_utf8_lossy(&res.stderr));
    assert!(out.join("ee.csv").exists());
}

#[test]
fn oracle_verb_passes_on_a_clean_config() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "cfg.json",
        serde_json::json!({
            "geometry": {"n_tx": 6, "n_rx_comm": 4, "n_rx_sense": 3, "n_paths": 4},
            "link": {"slots": 32, "snr_db": 10.0},
            "sweep": {"snr": [10.0]},
            "trials": 10,
            "seed": 5,
            "methods": ["ges"],
            "k": 3
        }),
    );
    let res = run(&["oracle", "--config", &cfg]);
    assert!(res.status.success(), "stderr: {}", String::from_utf8_lossy(&res.stderr));
    let text = String::from_utf8_lossy(&res.stdout);
    assert!(text.contains("oracle PASS"), "stdout: {text}");
    assert!(text.contains("greedy/exhaustive"));
}

#[test]
fn scene_dump_writes_parseable_json() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "cfg.json", small_sweep_config());
    let out = tmp.path().join("out");
    let res = run(&["scene-dump", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(res.status.success());
    let scene: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("scene.json")).unwrap()).unwrap();
    assert_eq!(scene["h_c"]["rows"], 4);
    assert_eq!(scene["h_c"]["cols"], 6);
}

#[test]
fn config_errors_exit_2() {
    let tmp = tempfile::tempdir().unwrap();

    // No --config at all.
    let res = run(&["sweep"]);
    assert_eq!(res.status.code(), Some(2));

    // Unknown field.
    let mut bad = small_sweep_config();
    bad["surprise"] = serde_json::json!(1);
    let cfg = write_config(tmp.path(), "bad.json", bad);
    let res = run(&["sweep", "--config", &cfg]);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("config"));

    // Verb does not match the sweep kind.
    let mut pareto = small_sweep_config();
    pareto["sweep"] = serde_json::json!({"pareto": [0.0, 1.0]});
    pareto.as_object_mut().unwrap().remove("k_rx_comm");
    pareto.as_object_mut().unwrap().remove("k_rx_sense");
    let cfg = write_config(tmp.path(), "pareto.json", pareto);
    let res = run(&["sweep", "--config", &cfg]);
    assert_eq!(res.status.code(), Some(2));

    // Nonexistent file.
    let res = run(&["sweep", "--config", "/nonexistent/cfg.json"]);
    assert_eq!(res.status.code(), Some(2));
}

#[test]
fn exhaustive_over_cap_exits_4_before_running() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "cfg.json",
        serde_json::json!({
            "geometry": {"n_tx": 40, "n_rx_comm": 4, "n_rx_sense": 3, "n_paths": 4},
            "link": {"slots": 32, "snr_db": 10.0},
            "sweep": {"snr": [10.0]},
            "trials": 1,
            "seed": 1,
            "methods": ["exhaustive"],
            "k": 20
        }),
    );
    let out = tmp.path().join("out");
    let res = run(&["sweep", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(4));
    // Fails at validation, so nothing may have been written.
    assert!(!out.join("snr.csv").exists());
}
