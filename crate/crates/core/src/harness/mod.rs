//! Experiment runner: configs, suites, reports and regression baselines.

pub mod config;
pub mod fixtures;
pub mod problem;
pub mod report;
pub mod suites;

use std::time::Instant;

pub use config::{ExperimentConfig, SuiteId, Tolerances};
pub use problem::{GridSpec, ProblemConfig, SolveSummary, SourceSpec};
pub use fixtures::{compare, record_fixtures, FixtureDiff, FixtureEntry, FixtureFile, Provenance};
pub use report::{Check, Measured, RunReport};

use crate::error::{Error, Result};

/// Validates `config` and executes its suite on the current rayon pool.
pub fn run(config: &ExperimentConfig) -> Result<RunReport> {
    config.validate()?;
    let mut report = RunReport::new(config.clone(), rayon::current_num_threads());
    let start = Instant::now();
    match config.suite {
        SuiteId::Specfun => suites::run_specfun(config, &mut report)?,
        SuiteId::Kernel => suites::run_kernel(config, &mut report)?,
        SuiteId::Oscillation => suites::run_oscillation(config, &mut report)?,
        SuiteId::Sharp => suites::run_sharp(config, &mut report)?,
        SuiteId::Theorem1 => suites::run_theorem1(config, &mut report)?,
    }
    report.wall_clock = start.elapsed().as_secs_f64();
    Ok(report)
}

/// `run` on a dedicated pool of `threads` workers.
pub fn run_with_threads(config: &ExperimentConfig, threads: usize) -> Result<RunReport> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {threads} threads: {e}")))?;
    pool.install(|| run(config))
}

/// How each suite's constants are produced, for fixture provenance.
pub fn oracle_description(suite: SuiteId) -> &'static str {
    match suite {
        SuiteId::Specfun => "closed forms, Gamma ratios, 4th-order finite differences and adaptive Gauss-Kronrod quadrature",
        SuiteId::Kernel => "Fourier-symbol and subordination kernels on the periodic lattice",
        SuiteId::Oscillation => "brute-force cylinder averages and maximal functions over seeded localized sources",
        SuiteId::Sharp => "brute-force sharp and maximal functions over seeded localized sources",
        SuiteId::Theorem1 => "product-integration solver and trapezoid mixed norms over seeded band-limited sources",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn specfun_suite_passes_and_is_deterministic() {
        let cfg = ExperimentConfig::from_json(r#"{"suite": "specfun", "seed": 3}"#).unwrap();
        let a = run(&cfg).unwrap();
        assert!(a.pass, "{:#?}", a.failures());
        let b = run(&cfg).unwrap();
        assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
    }

    #[test]
    fn threads_are_recorded() {
        let cfg = ExperimentConfig::new(SuiteId::Specfun);
        assert_eq!(run_with_threads(&cfg, 2).unwrap().threads, 2);
    }
}
