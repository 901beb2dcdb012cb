use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::fixtures::FixtureDiff;
use crate::error::Result;

/// Outcome of one assertion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    /// Measured quantity the assertion is about; `null` when not finite.
    #[serde(with = "nullable")]
    pub value: f64,
    /// Threshold it was compared against.
    #[serde(with = "nullable")]
    pub limit: f64,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub note: String,
}

impl Check {
    /// Passes when `value <= limit` and `value` is finite.
    pub fn at_most(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Check { name: name.into(), pass: value.is_finite() && value <= limit, value, limit, note: String::new() }
    }

    /// Passes when `value >= limit`.
    pub fn at_least(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Check { name: name.into(), pass: value.is_finite() && value >= limit, value, limit, note: String::new() }
    }

    pub fn within(name: impl Into<String>, value: f64, lo: f64, hi: f64) -> Self {
        Check {
            name: name.into(),
            pass: value.is_finite() && value >= lo && value <= hi,
            value,
            limit: hi,
            note: format!("range [{lo}, {hi}]"),
        }
    }

    pub fn failed(name: impl Into<String>, note: impl Into<String>) -> Self {
        Check { name: name.into(), pass: false, value: f64::NAN, limit: f64::NAN, note: note.into() }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }
}

/// A measured constant and the grid it was measured on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Measured {
    pub value: f64,
    pub grid: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub config: ExperimentConfig,
    pub threads: usize,
    pub checks: Vec<Check>,
    pub constants: BTreeMap<String, Measured>,
    /// Refinement growth of every ratio study, keyed like `constants`.
    pub growth: BTreeMap<String, f64>,
    pub fixture_diffs: Vec<FixtureDiff>,
    pub pass: bool,
    /// Seconds spent in the suite; kept out of the JSON so reports stay
    /// byte-identical across reruns, and written to `<suite>_timing.json` instead.
    #[serde(skip)]
    pub wall_clock: f64,
}

impl RunReport {
    pub fn new(config: ExperimentConfig, threads: usize) -> Self {
        RunReport {
            config,
            threads,
            checks: Vec::new(),
            constants: BTreeMap::new(),
            growth: BTreeMap::new(),
            fixture_diffs: Vec::new(),
            pass: true,
            wall_clock: 0.0,
        }
    }

    pub fn push(&mut self, check: Check) {
        self.pass &= check.pass;
        self.checks.push(check);
    }

    /// Records a constant; non-finite values are left to the checks.
    pub fn constant(&mut self, key: impl Into<String>, value: f64, grid: impl Into<String>) {
        if value.is_finite() {
            self.constants.insert(key.into(), Measured { value, grid: grid.into() });
        }
    }

    pub fn record_growth(&mut self, key: impl Into<String>, growth: f64) {
        if growth.is_finite() {
            self.growth.insert(key.into(), growth);
        }
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    /// One row per check.
    pub fn checks_csv(&self) -> String {
        let mut out = String::from("name,pass,value,limit,note\n");
        for c in &self.checks {
            let _ = writeln!(out, "{},{},{:e},{:e},{}", csv_field(&c.name), c.pass, c.value, c.limit, csv_field(&c.note));
        }
        out
    }

    /// One row per measured constant, with its growth when recorded.
    pub fn constants_csv(&self) -> String {
        let mut out = String::from("key,value,grid,growth\n");
        for (k, m) in &self.constants {
            let g = self.growth.get(k).map(|g| format!("{g:e}")).unwrap_or_default();
            let _ = writeln!(out, "{},{:e},{},{}", csv_field(k), m.value, csv_field(&m.grid), g);
        }
        out
    }

    /// Writes `<suite>.json`, `<suite>_checks.csv`, `<suite>_constants.csv`
    /// and `<suite>_timing.json` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let name = self.config.suite.name();
        let files = [
            (format!("{name}.json"), self.to_json()?),
            (format!("{name}_checks.csv"), self.checks_csv()),
            (format!("{name}_constants.csv"), self.constants_csv()),
            (
                format!("{name}_timing.json"),
                serde_json::to_string_pretty(&serde_json::json!({ "suite": name, "wall_clock_s": self.wall_clock }))? + "\n",
            ),
        ];
        let mut paths = Vec::new();
        for (file, body) in files {
            let p = dir.join(file);
            std::fs::write(&p, body)?;
            paths.push(p);
        }
        Ok(paths)
    }
}

mod nullable {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
