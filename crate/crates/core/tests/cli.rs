use std::path::Path;
use std::process::Command;

use serde_json::Value;

fn run(dir: &Path, args: &[&str]) -> i32 {
    let out = Command::new(env!("CARGO_BIN_EXE_nonlocal-euler"))
        .args(args)
        .arg("--out")
        .arg(dir)
        .output()
        .expect("binary runs");
    out.status.code().expect("exit code")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn csv_rows(path: &Path) -> Vec<csv::StringRecord> {
    csv::Reader::from_path(path).unwrap().records().map(|r| r.unwrap()).collect()
}

fn manifest_is_complete(dir: &Path) -> Value {
    let m = json(&dir.join("manifest.json"));
    for f in m["outputs"].as_array().unwrap() {
        assert!(dir.join(f.as_str().unwrap()).exists(), "{f} missing");
    }
    assert_eq!(m["config_digest"].as_str().unwrap().len(), 64);
    m
}

#[test]
fn kernel_samples_peak_at_origin() {
    let dir = tempfile::tempdir().unwrap();
    let code = run(dir.path(), &["kernel", "--set", "kernel.c=100", "--set", "kernel.n_points=256"]);
    assert_eq!(code, 0);
    let rows = csv_rows(&dir.path().join("kernel_samples.csv"));
    assert_eq!(rows.len(), 256);
    let values: Vec<f64> = rows.iter().map(|r| r[2].parse().unwrap()).collect();
    let argmax = values.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap().0;
    assert_eq!(argmax, 0);
    assert!((values[0] - (100.0 / std::f64::consts::PI).sqrt()).abs() < 1e-12);
    assert_eq!(csv_rows(&dir.path().join("kernel_spectrum.csv")).len(), 256);
    let m = manifest_is_complete(dir.path());
    assert_eq!(m["command"], "kernel");
}

#[test]
fn laplace_kernel_passes_every_check() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(dir.path(), &["kernel", "--set", "kernel.family=laplace"]), 0);
    let report = json(&dir.path().join("assumptions.json"));
    for key in ["a1_nonneg", "a2_symmetric", "a3_unit_mass", "a4_monotone_decreasing_on_half", "a5_nonneg_fourier"] {
        assert_eq!(report["checks"][key]["pass"], true, "{key}");
    }
    assert_eq!(report["checks"]["overall"], true);
}

#[test]
fn strict_mode_rejects_cosine_kernel() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(dir.path(), &["kernel", "--strict", "--set", "kernel.family=cosine"]), 3);
    let report = json(&dir.path().join("assumptions.json"));
    assert_eq!(report["checks"]["a4_monotone_decreasing_on_half"]["pass"], false);
    assert_eq!(manifest_is_complete(dir.path())["exit_code"], 3);
    let other = tempfile::tempdir().unwrap();
    assert_eq!(run(other.path(), &["kernel", "--set", "kernel.family=cosine"]), 0);
    assert_eq!(run(other.path(), &["simulate", "--strict", "--set", "kernel.family=cosine"]), 3);
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "[kernel\nc = 1").unwrap();
    assert_eq!(run(dir.path(), &["kernel", "--config", bad.to_str().unwrap()]), 2);
    assert_eq!(run(dir.path(), &["kernel", "--set", "kernel.n_points=7"]), 2);
    assert_eq!(run(dir.path(), &["kernel", "--set", "nonsense"]), 2);
    assert_eq!(run(dir.path(), &["converge", "--set", "kernel.family=cosine"]), 2);
    assert_eq!(run(dir.path(), &["frobnicate"]), 2);
}

#[test]
fn simulate_below_threshold_has_nonincreasing_norms() {
    let dir = tempfile::tempdir().unwrap();
    let code = run(
        dir.path(),
        &["simulate", "--set", "scheme.dt=0.5", "--set", "scheme.n_steps=200", "--snapshot-every", "50"],
    );
    assert_eq!(code, 0);
    let norms: Vec<f64> = csv_rows(&dir.path().join("norms.csv")).iter().map(|r| r[2].parse().unwrap()).collect();
    assert_eq!(norms.len(), 201);
    assert!(norms.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)));
    let steps: Vec<String> = csv_rows(&dir.path().join("snapshots.csv")).iter().map(|r| r[0].to_string()).collect();
    let mut distinct = steps.clone();
    distinct.dedup();
    assert_eq!(distinct, ["0", "50", "100", "150", "200"]);
    manifest_is_complete(dir.path());
}

#[test]
fn simulate_zero_steps_writes_initial_state_only() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(dir.path(), &["simulate", "--set", "scheme.n_steps=0", "--set", "kernel.n_points=16"]), 0);
    let rows = csv_rows(&dir.path().join("snapshots.csv"));
    assert_eq!(rows.len(), 16);
    assert!(rows.iter().all(|r| &r[0] == "0"));
}

#[test]
fn blowup_policy_sets_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let args =
        ["simulate", "--set", "initial.family=worst-mode", "--set", "scheme.dt=2.5", "--set", "scheme.n_steps=4000"];
    let mut allowed = args.to_vec();
    allowed.push("--allow-blowup");
    assert_eq!(run(dir.path(), &allowed), 0);
    let m = manifest_is_complete(dir.path());
    assert_eq!(m["blowup"], true);
    let norms: Vec<f64> = csv_rows(&dir.path().join("norms.csv")).iter().map(|r| r[2].parse().unwrap()).collect();
    assert!(norms[20] > norms[0]);
    let strict = tempfile::tempdir().unwrap();
    assert_eq!(run(strict.path(), &args), 4);
    assert_eq!(manifest_is_complete(strict.path())["exit_code"], 4);
}

#[test]
fn stability_probes() {
    let dir = tempfile::tempdir().unwrap();
    let code = run(
        dir.path(),
        &["stability", "--set", "stability.probe_factors=[1.0, 1.25]", "--set", "stability.probe_dts=[]"],
    );
    assert_eq!(code, 0);
    let r = json(&dir.path().join("stability.json"));
    let sharp = r["dt_star_sharp"].as_f64().unwrap();
    assert!(sharp >= 1.0);
    assert_eq!(r["dt_star_conservative"], 1.0);
    let probes = r["probes"].as_array().unwrap();
    assert!((probes[0]["max_abs_g"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    let gap = r["max_gap"].as_f64().unwrap();
    let over = probes[1]["max_abs_g"].as_f64().unwrap();
    assert!((over - (1.25 * sharp * gap - 1.0)).abs() < 1e-12 && over > 1.0);
    assert_eq!(probes[1]["empirical_monotone"], false);
}

#[test]
fn converge_writes_tables_and_fits() {
    let dir = tempfile::tempdir().unwrap();
    let code = run(
        dir.path(),
        &["converge", "--set", "sweep.grids=[16, 32, 64]", "--set", "sweep.dts=[0.0625, 0.03125, 0.015625]"],
    );
    assert_eq!(code, 0);
    let rows = csv_rows(&dir.path().join("errors.csv"));
    assert_eq!(rows.len(), 18);
    let header = csv::Reader::from_path(dir.path().join("errors.csv")).unwrap().headers().unwrap().clone();
    assert_eq!(header.iter().collect::<Vec<_>>(), ["N", "h", "dt", "t_final", "error", "family", "kernel", "blowup"]);
    let rates = json(&dir.path().join("rates.json"));
    let fams = rates["families"].as_array().unwrap();
    assert_eq!(fams.len(), 2);
    for f in fams {
        let slope = f["dt"]["fit"]["slope"].as_f64().unwrap();
        assert!((slope - 1.0).abs() < 0.2, "{slope}");
        assert!(f["h"]["fit"]["slope"].is_f64());
    }
    manifest_is_complete(dir.path());
}

#[test]
fn converge_single_cell_reports_insufficient_data() {
    let dir = tempfile::tempdir().unwrap();
    let code = run(
        dir.path(),
        &[
            "converge",
            "--set",
            "sweep.grids=[8]",
            "--set",
            "sweep.dts=[0.125]",
            "--set",
            "sweep.families=[\"gaussian-bump\"]",
        ],
    );
    assert_eq!(code, 0);
    assert_eq!(csv_rows(&dir.path().join("errors.csv")).len(), 1);
    let rates = json(&dir.path().join("rates.json"));
    let err = rates["families"][0]["h"]["error"].as_str().unwrap();
    assert!(err.contains("insufficient data"), "{err}");
}

#[test]
fn converge_output_is_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["converge", "--set", "sweep.grids=[16, 32]", "--set", "sweep.dts=[0.0625, 0.03125, 0.015625]"];
    let mut one = args.to_vec();
    one.extend(["--jobs", "1"]);
    assert_eq!(run(a.path(), &one), 0);
    assert_eq!(run(b.path(), &args), 0);
    for f in ["errors.csv", "rates.json"] {
        assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap(), "{f}");
    }
}
