use std::path::Path;
use std::process::{Command, Output};

fn tsfe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tsfe")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn ml_eval_prints_e() {
    let o = tsfe(&["ml", "eval", "--alpha", "1", "--beta", "1", "--re", "1,0"]);
    assert!(o.status.success());
    let v: Vec<f64> = stdout(&o).lines().map(|l| l.trim().parse().unwrap()).collect();
    assert!((v[0] - std::f64::consts::E).abs() < 1e-14);
    assert!((v[1] - 1.0).abs() < 1e-14);
}

#[test]
fn missing_alpha_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"suite": "theorem1"}"#).unwrap();
    let o = tsfe(&["--config", cfg.to_str().unwrap(), "verify"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("alpha"));
}

#[test]
fn verify_specfun_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = tsfe(&["--out-dir", out.to_str().unwrap(), "--seed", "4", "verify", "--suite", "specfun"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    for f in ["specfun.json", "specfun_checks.csv", "specfun_constants.csv", "specfun_timing.json"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("specfun.json")).unwrap()).unwrap();
    assert_eq!(report["pass"], true);
    assert_eq!(report["config"]["seed"], 4);
}

#[test]
fn solve_writes_solution() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("p.json");
    std::fs::write(
        &cfg,
        r#"{"phi": {"kind": "linear"}, "alpha": 0.5,
            "grid": {"n": 16, "l": 3.141592653589793, "n_time": 64, "t_final": 1.0},
            "source": {"kind": "single_mode", "k": [1]}}"#,
    )
    .unwrap();
    let out = dir.path().join("out");
    let o = tsfe(&["--config", cfg.to_str().unwrap(), "--out-dir", out.to_str().unwrap(), "solve"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["solution.bin", "solution.json", "solution_final.csv", "solve_report.json"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("solve_report.json")).unwrap()).unwrap();
    assert!(r["final_error"].as_f64().unwrap() < 1e-8);
}

#[test]
fn kernel_build_and_verify() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("k");
    let base = ["--out-dir", out.to_str().unwrap(), "kernel"];
    let o = tsfe(&[&base[..], &["build", "--alpha", "0.5", "--n", "128", "--L", "10"]].concat());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(Path::new(&out.join("kernel_fourier.csv")).exists());
    let o = tsfe(&[&base[..], &["verify", "--alpha", "0.5", "--n", "128", "--L", "10"]].concat());
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, "{\"suite\": \"specfun\",\n  \"sead\": 1}").unwrap();
    let o = tsfe(&["--config", cfg.to_str().unwrap(), "verify"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
}
