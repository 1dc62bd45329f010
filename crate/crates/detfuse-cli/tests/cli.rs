//! End-to-end checks of the `detfuse` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn detfuse(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_detfuse"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

#[test]
fn validate_echoes_resolved_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("empty.toml");
    fs::write(&cfg, "").unwrap();
    let out = detfuse(&["validate", "--config", cfg.to_str().unwrap()], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("experiment = \"roc\""));
    assert!(text.contains("p_fa = 0.1"));
    assert!(text.contains("amplitude = 0.1"));
    assert!(text.contains("comm_noise_var = 0.1"));
    assert!(text.contains("quant_half_range = 0.5"));
    assert!(text.contains("target_avg_snr_db = -8.5"));
}

#[test]
fn validate_rejects_unknown_key_by_name() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "no_such_key = 1\n").unwrap();
    let out = detfuse(&["validate", "--config", cfg.to_str().unwrap()], dir.path());
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("no_such_key"));
}

#[test]
fn verb_and_experiment_must_match() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("alloc.toml");
    fs::write(&cfg, "experiment = \"power-alloc\"\n").unwrap();
    let out = detfuse(
        &["roc", "--config", cfg.to_str().unwrap(), "--out", "o"],
        dir.path(),
    );
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("power-alloc"));
}

#[test]
fn roc_run_then_manifest_rerun_reproduces_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("roc.toml");
    fs::write(
        &cfg,
        "m = 4\nn_trials = 300\nseed = 11\np_fa_grid = [0.1, 0.5, 1.0]\nrules = [\"optimal\", \"optimal-quantized\"]\n",
    )
    .unwrap();
    let out_a = dir.path().join("a");
    let run_a = detfuse(
        &[
            "roc",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out_a.to_str().unwrap(),
        ],
        dir.path(),
    );
    assert!(
        run_a.status.success(),
        "{}",
        String::from_utf8_lossy(&run_a.stderr)
    );
    let manifest = out_a.join("manifest.toml");
    assert!(manifest.exists());
    let manifest_text = fs::read_to_string(&manifest).unwrap();
    assert!(manifest_text.contains("# status: complete"));

    // rerun from the manifest into a second directory
    let out_b = dir.path().join("b");
    let run_b = detfuse(
        &[
            "roc",
            "--config",
            manifest.to_str().unwrap(),
            "--out",
            out_b.to_str().unwrap(),
        ],
        dir.path(),
    );
    assert!(
        run_b.status.success(),
        "{}",
        String::from_utf8_lossy(&run_b.stderr)
    );
    let csv_a = fs::read(out_a.join("roc.csv")).unwrap();
    let csv_b = fs::read(out_b.join("roc.csv")).unwrap();
    assert_eq!(csv_a, csv_b, "manifest rerun must be bit-identical");
}

#[test]
fn trials_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("roc.toml");
    fs::write(
        &cfg,
        "m = 3\nn_trials = 500\nseed = 1\np_fa_grid = [0.1, 0.5]\nrules = [\"optimal\"]\n",
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let out = detfuse(
        &[
            "roc",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
            "--trials",
            "0",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    // analytic rows only
    let csv = fs::read_to_string(out_dir.join("roc.csv")).unwrap();
    assert!(csv.contains("analytic"));
    assert!(!csv.contains("empirical"));
    // the manifest records the override
    let manifest = fs::read_to_string(out_dir.join("manifest.toml")).unwrap();
    assert!(manifest.contains("n_trials = 0"));
}

#[test]
fn alloc_run_prints_summary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("alloc.toml");
    fs::write(&cfg, "experiment = \"power-alloc\"\nm = 5\nbudget = 8.0\nseed = 2\n").unwrap();
    let out = detfuse(
        &[
            "alloc",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            dir.path().join("alloc_out").to_str().unwrap(),
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("run_p_d = "));
    assert!(text.contains("allocation.csv"));
}
