use std::path::PathBuf;

use tsfe_core::analysis::verify::StudyGrid;
use tsfe_core::error::Error;
use tsfe_core::harness::{compare, oracle_description, record_fixtures, run, run_with_threads, ExperimentConfig, FixtureFile, SuiteId};

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn theorem1() -> ExperimentConfig {
    ExperimentConfig::from_path(&fixtures().join("theorem1.config.json")).unwrap()
}

#[test]
fn missing_alpha_is_named() {
    let err = ExperimentConfig::from_json(r#"{"suite": "theorem1", "phi": {"kind": "linear"}}"#)
        .and_then(|c| c.validate().map(|_| c))
        .unwrap_err();
    assert!(matches!(&err, Error::Config(m) if m.contains("`alpha`")), "{err}");
    let err = ExperimentConfig::from_json("{\"suite\": \"sharp\",\n \"alpah\": 0.5}").unwrap_err();
    assert!(err.to_string().contains("line 2"), "{err}");
}

#[test]
fn theorem1_reproduces_its_fixture() {
    let mut r = run(&theorem1()).unwrap();
    assert!(r.pass, "{:#?}", r.failures());
    let diffs = record_fixtures(&mut r, &fixtures().join("theorem1.baseline.json"), false, oracle_description(SuiteId::Theorem1)).unwrap();
    assert!(diffs.is_empty(), "{diffs:#?}");
    let base = FixtureFile::load(&fixtures().join("theorem1.baseline.json")).unwrap();
    for (k, e) in &base.entries {
        let m = &r.constants[k];
        assert!((m.value / e.value - 1.0).abs() <= 1e-6, "{k}");
    }
}

#[test]
fn identical_rerun_and_altered_tolerance() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.json");
    let cfg = theorem1();
    let mut a = run_with_threads(&cfg, 2).unwrap();
    record_fixtures(&mut a, &path, true, "test").unwrap();
    let mut b = run_with_threads(&cfg, 3).unwrap();
    assert!(record_fixtures(&mut b, &path, false, "test").unwrap().is_empty());
    let mut cfg = cfg;
    cfg.tolerances.fixture = Some(1e-3);
    let mut c = run(&cfg).unwrap();
    let d = record_fixtures(&mut c, &path, false, "test").unwrap();
    assert_eq!(d.len(), c.constants.len());
    assert!(d.iter().all(|x| x.within && x.note.contains("overrides")));
}

#[test]
fn refined_theorem1_stays_within_growth() {
    let mut cfg = theorem1();
    cfg.grid = Some(StudyGrid { n: 128, n_time: 128, l: 4.0, t_final: 1.0 });
    let r = run(&cfg).unwrap();
    let base = FixtureFile::load(&fixtures().join("theorem1.baseline.json")).unwrap();
    let d = compare(&r, &base);
    assert!(!d.is_empty());
    assert!(d.iter().all(|x| x.within && x.note.starts_with("grid")), "{d:#?}");
}

#[test]
fn reports_are_byte_identical() {
    let cfg = ExperimentConfig::from_path(&fixtures().join("sharp_linear.config.json")).unwrap();
    let mut cfg = cfg;
    cfg.trials = Some(2);
    let a = run_with_threads(&cfg, 2).unwrap().to_json().unwrap();
    let b = run_with_threads(&cfg, 2).unwrap().to_json().unwrap();
    assert_eq!(a, b);
    let dir = tempfile::tempdir().unwrap();
    let written = run(&cfg).unwrap().write(dir.path()).unwrap();
    assert_eq!(written.len(), 4);
}
