use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn nucmem(args: &[&str], root: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nucmem"))
        .args(args)
        .env("NUCMEM_OUTPUT_ROOT", root)
        .output()
        .expect("binary runs")
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn counterexample_report() {
    let dir = tempfile::tempdir().unwrap();
    let o = nucmem(&["couplings", "--preset", "counterexample1", "--N", "10000", "--out", "c1"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let h = read_json(&dir.path().join("c1/homogeneity.json"));
    let r = &h["report"];
    assert!((r["ratio_max"].as_f64().unwrap() - 99.0197).abs() < 1e-3);
    assert_eq!(r["max_condition_ok"], Value::Bool(false));
    assert_eq!(r["deviation_condition_ok"], Value::Bool(true));
    let csv = std::fs::read_to_string(dir.path().join("c1/profile.csv")).unwrap();
    assert_eq!(csv.lines().count(), 10001);
}

#[test]
fn decoherence_grid_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let o = nucmem(&["decoherence", "--N", "20", "--grid", "100x100"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let run = dir.path().join("runs/decoherence");
    let csv = std::fs::read_to_string(run.join("surface.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("x,gt,d,theta,D"));
    assert_eq!(lines.count(), 100 * 100);

    let m = read_json(&run.join("manifest.json"));
    assert_eq!(m["experiment"], "decoherence");
    assert_eq!(m["config"]["N"], 20);
    assert_eq!(m["artifacts"][0]["file"], "surface.csv");
    assert_eq!(m["artifacts"][0]["bytes"].as_u64().unwrap() as usize, csv.len());
    assert!(!m["notes"].as_array().unwrap().is_empty());
    let leftovers: Vec<_> = std::fs::read_dir(&run)
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| e.file_name().to_string_lossy().ends_with(".partial"))
        .collect();
    assert!(leftovers.is_empty());
}

#[test]
fn temperature_axis() {
    let dir = tempfile::tempdir().unwrap();
    let o = nucmem(
        &["decoherence", "--grid", "2x3", "--kbt-range", "0:1", "--omega-z", "2", "--out", "t"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("t/surface.csv")).unwrap();
    assert!(csv.starts_with("kbt,gt,d,theta,D\n"));
    assert_eq!(csv.lines().count(), 7);
}

#[test]
fn identical_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let args = |out: &'static str| {
        vec!["couplings", "--profile", "uniform", "--N", "50", "--seed", "11", "--out", out]
    };
    for out in ["a", "b"] {
        let o = nucmem(&args(out), dir.path());
        assert!(o.status.success(), "{}", stderr(&o));
    }
    for f in ["profile.csv", "homogeneity.json"] {
        let a = std::fs::read(dir.path().join("a").join(f)).unwrap();
        let b = std::fs::read(dir.path().join("b").join(f)).unwrap();
        assert_eq!(a, b, "{f}");
    }
    let ma = read_json(&dir.path().join("a/manifest.json"));
    let mb = read_json(&dir.path().join("b/manifest.json"));
    assert_eq!(ma["artifacts"], mb["artifacts"]);
    assert_eq!(ma["config"], mb["config"]);

    let o = nucmem(&["couplings", "--profile", "uniform", "--N", "50", "--seed", "12", "--out", "c"], dir.path());
    assert!(o.status.success());
    let c = std::fs::read(dir.path().join("c/profile.csv")).unwrap();
    assert_ne!(c, std::fs::read(dir.path().join("a/profile.csv")).unwrap());
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{"experiment": "couplings", "N": 8, "profile": {"kind": "homogeneous", "g": 2.0}}"#,
    )
    .unwrap();
    let o = nucmem(&["couplings", "--config", cfg.to_str().unwrap(), "--N", "5", "--out", "o"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("o/profile.csv")).unwrap();
    assert_eq!(csv.lines().count(), 6);
    let h = read_json(&dir.path().join("o/homogeneity.json"));
    assert_eq!(h["report"]["mean_sq"].as_f64(), Some(4.0));
    assert_eq!(h["report"]["ratio_dev"].as_f64(), Some(0.0));
}

#[test]
fn bad_config_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"N": 10, "grid": [1, "two"]}"#).unwrap();
    let o = nucmem(&["decoherence", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`grid"), "{}", stderr(&o));

    std::fs::write(&cfg, r#"{"widht": 3}"#).unwrap();
    let o = nucmem(&["couplings", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`widht`"), "{}", stderr(&o));

    std::fs::write(&cfg, r#"{"experiment": "storage"}"#).unwrap();
    let o = nucmem(&["spectrum", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`experiment`"));

    let o = nucmem(&["couplings", "--config", dir.path().join("missing.json").to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(!dir.path().join("runs").exists());
}

#[test]
fn invalid_values_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["couplings", "--I0", "0.7"],
        vec!["couplings", "--N", "0"],
        vec!["modes", "--profile", "homogeneous", "--width", "3"],
        vec!["decoherence", "--x-range", "0:1"],
        vec!["storage", "--Omega-z", "9"],
    ] {
        let o = nucmem(&args, dir.path());
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn dense_cap_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let o = nucmem(&["spectrum", "--N", "30", "--n", "1", "--dense-cap", "100"], dir.path());
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).contains("needs 465"));
    assert!(!dir.path().join("runs/spectrum").exists());
}

#[test]
fn spectrum_exports() {
    let dir = tempfile::tempdir().unwrap();
    let o = nucmem(
        &["spectrum", "--N", "10", "--n", "1", "--profile", "homogeneous", "--export-matrix", "--out", "s"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let s = dir.path().join("s");
    let exact = std::fs::read_to_string(s.join("spectrum_exact.csv")).unwrap();
    assert_eq!(exact.lines().count(), 1 + 10 + 45);
    let eff = std::fs::read_to_string(s.join("spectrum_effective.csv")).unwrap();
    assert_eq!(eff.lines().count(), 1 + 10 + 45 + 10);
    let cmp = read_json(&s.join("comparison.json"));
    assert_eq!(cmp["comparison"]["dim_a"], 55);
    let basis = read_json(&s.join("basis.json"));
    assert_eq!(basis.as_array().unwrap().len(), 55);
    let triplets = std::fs::read_to_string(s.join("hs_triplets.txt")).unwrap();
    assert!(!triplets.is_empty());
}

#[test]
fn storage_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let o = nucmem(&["storage", "--N", "25", "--m-list", "0,1", "--t-steps", "5", "--out", "w"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let s = read_json(&dir.path().join("w/storage.json"));
    assert!((s["effective"]["decode_fidelity"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    let full = s["exact_full"]["state_error"].as_f64().unwrap();
    assert!(full > 0.05 && full < 0.2, "{full}");
    let sweep = std::fs::read_to_string(dir.path().join("w/sweep.csv")).unwrap();
    assert_eq!(sweep.lines().next(), Some("t,m,fidelity,leakage,deviation"));
    assert_eq!(sweep.lines().count(), 1 + 2 * 5);
}

#[test]
fn modes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let o = nucmem(&["modes", "--N", "6", "--out", "m"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("m/modes.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 36);
    let j = read_json(&dir.path().join("m/modes.json"));
    assert!(j["orthonormality_error"].as_f64().unwrap() < 1e-12);
    assert!(j["permutation_mode"]["g_dot_h"].as_f64().unwrap().abs() < 1e-12);

    let o = nucmem(&["modes", "--N", "7", "--out", "odd"], dir.path());
    assert!(o.status.success());
    let j = read_json(&dir.path().join("odd/modes.json"));
    assert!(j["permutation_mode"]["unavailable"].is_string());
}

#[test]
fn verify_exit_status() {
    let dir = tempfile::tempdir().unwrap();
    let o = nucmem(&["verify", "--out", "v"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let out = String::from_utf8_lossy(&o.stdout);
    assert!(out.lines().filter(|l| l.starts_with("PASS")).count() >= 20);
    assert!(!out.contains("FAIL"));

    let o = nucmem(&["verify", "--N", "2", "--out", "v2"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));

    let o = nucmem(&["verify", "--convention", "half-factor", "--out", "vh"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    let out = String::from_utf8_lossy(&o.stdout);
    let failed: Vec<_> = out.lines().filter(|l| l.starts_with("FAIL")).collect();
    assert_eq!(failed.len(), 1, "{out}");
    assert!(failed[0].contains("commutator identity"));
    let report = read_json(&dir.path().join("vh/verify.json"));
    assert_eq!(report["failed"], 1);
}

#[test]
fn absolute_out_ignores_root() {
    let root = tempfile::tempdir().unwrap();
    let abs = tempfile::tempdir().unwrap();
    let target = abs.path().join("here");
    let o = nucmem(&["couplings", "--N", "4", "--out", target.to_str().unwrap()], root.path());
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(target.join("manifest.json").exists());
    assert!(!root.path().join("runs").exists());
}
