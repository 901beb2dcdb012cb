//! Regression baselines for measured constants.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::report::RunReport;
use crate::error::{Error, Result};

/// Relative tolerance of a freshly recorded entry.
pub const DEFAULT_FIXTURE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Provenance {
    /// How the values were produced.
    pub oracle: String,
    /// UTC date of the recording run.
    pub recorded: String,
    /// Configuration of the recording run.
    pub config: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixtureEntry {
    pub value: f64,
    /// Grid label of the recording run.
    pub grid: String,
    /// Relative tolerance on the recording grid.
    pub tol: f64,
    /// Admissible ratio against measurements on other grids.
    pub growth_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixtureFile {
    pub provenance: Provenance,
    pub entries: BTreeMap<String, FixtureEntry>,
}

/// Comparison of one measured constant with its stored value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixtureDiff {
    pub key: String,
    pub stored: f64,
    pub measured: f64,
    /// `measured / stored - 1`, or the absolute change when `stored == 0`.
    pub rel_change: f64,
    pub tol: f64,
    pub within: bool,
    pub note: String,
}

impl FixtureFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        std::fs::write(path, serde_json::to_string_pretty(self)? + "\n")?;
        Ok(())
    }

    /// Baseline holding every constant of `report`.
    pub fn from_report(report: &RunReport, oracle: &str) -> Result<Self> {
        let growth_bound = report.config.tolerances.growth.unwrap_or(super::suites::default_growth(report.config.suite));
        let tol = report.config.tolerances.fixture.unwrap_or(DEFAULT_FIXTURE_TOL);
        let entries = report
            .constants
            .iter()
            .map(|(k, m)| (k.clone(), FixtureEntry { value: m.value, grid: m.grid.clone(), tol, growth_bound }))
            .collect();
        Ok(FixtureFile {
            provenance: Provenance {
                oracle: oracle.to_string(),
                recorded: chrono::Utc::now().format("%Y-%m-%d").to_string(),
                config: serde_json::to_value(&report.config)?,
            },
            entries,
        })
    }
}

/// Entries whose value or tolerance changed. Same-grid measurements are held
/// to the relative tolerance, other grids to the growth bound.
pub fn compare(report: &RunReport, baseline: &FixtureFile) -> Vec<FixtureDiff> {
    let override_tol = report.config.tolerances.fixture;
    let mut diffs = Vec::new();
    for (key, entry) in &baseline.entries {
        let Some(m) = report.constants.get(key) else { continue };
        let tol = override_tol.unwrap_or(entry.tol);
        let tol_changed = tol != entry.tol;
        if m.value.to_bits() == entry.value.to_bits() && !tol_changed {
            continue;
        }
        let rel_change = if entry.value == 0.0 { m.value } else { m.value / entry.value - 1.0 };
        let (within, mut note) = if m.grid == entry.grid {
            (rel_change.abs() <= tol, String::from("same grid"))
        } else {
            let ratio = m.value / entry.value;
            let b = entry.growth_bound;
            (ratio.is_finite() && ratio <= b && ratio >= 1.0 / b, format!("grid {} vs {}", m.grid, entry.grid))
        };
        if tol_changed {
            note.push_str(&format!("; tolerance {} overrides {}", tol, entry.tol));
        }
        diffs.push(FixtureDiff {
            key: key.clone(),
            stored: entry.value,
            measured: m.value,
            rel_change,
            tol,
            within,
            note,
        });
    }
    diffs
}

/// Compares `report` with the baseline at `path` and stores the diff in the
/// report. A missing baseline is written from the report when `init` is set.
/// Entries outside their tolerance raise `FixtureDrift`.
pub fn record_fixtures(report: &mut RunReport, path: &Path, init: bool, oracle: &str) -> Result<Vec<FixtureDiff>> {
    if !path.exists() {
        if !init {
            return Err(Error::Config(format!("baseline {} does not exist; rerun with init", path.display())));
        }
        FixtureFile::from_report(report, oracle)?.save(path)?;
        report.fixture_diffs.clear();
        return Ok(Vec::new());
    }
    let baseline = FixtureFile::load(path)?;
    let diffs = compare(report, &baseline);
    report.fixture_diffs = diffs.clone();
    let drift: Vec<String> = diffs
        .iter()
        .filter(|d| !d.within)
        .map(|d| format!("{}: stored {:e}, measured {:e} ({})", d.key, d.stored, d.measured, d.note))
        .collect();
    if !drift.is_empty() {
        report.pass = false;
        return Err(Error::FixtureDrift(drift));
    }
    Ok(diffs)
}
