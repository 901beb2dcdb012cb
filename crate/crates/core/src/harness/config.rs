use serde::{Deserialize, Serialize};

use crate::analysis::{LemmaCase, MixedNormSpec, StudyGrid};
use crate::bernstein::{BernsteinFunction, BernsteinKind};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SuiteId {
    Specfun,
    Kernel,
    Oscillation,
    Sharp,
    Theorem1,
}

impl SuiteId {
    pub fn name(&self) -> &'static str {
        match self {
            SuiteId::Specfun => "specfun",
            SuiteId::Kernel => "kernel",
            SuiteId::Oscillation => "oscillation",
            SuiteId::Sharp => "sharp",
            SuiteId::Theorem1 => "theorem1",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .map_err(|_| Error::Config(format!("unknown suite `{s}`")))
    }
}

/// Overrides of the built-in acceptance tolerances.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Relative tolerance of identity checks.
    pub relative: Option<f64>,
    /// Admissible refinement growth of ratio studies.
    pub growth: Option<f64>,
    /// Relative tolerance applied to every fixture comparison.
    pub fixture: Option<f64>,
}

/// Declarative description of one harness run.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub suite: SuiteId,
    /// Bernstein function; kernel runs sweep the stock set when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<BernsteinKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<StudyGrid>,
    /// Mixed norms `(p, q, mu1, mu2)` of the theorem1 suite.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub norms: Vec<MixedNormSpec>,
    /// Integrability exponent of the oscillation and sharp suites.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p0: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cases: Vec<LemmaCase>,
    /// Kernel sample times.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub times: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub tolerances: Tolerances,
}

fn positive(key: &str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::Config(format!("key `{key}` must be positive and finite, got {v}")));
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn new(suite: SuiteId) -> Self {
        ExperimentConfig {
            suite,
            phi: None,
            alpha: None,
            grid: None,
            norms: Vec::new(),
            p0: None,
            cases: Vec::new(),
            times: Vec::new(),
            trials: None,
            seed: 0,
            tolerances: Tolerances::default(),
        }
    }

    /// Parses and validates JSON text. Errors carry the offending key and,
    /// for syntax and type errors, the line and column.
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)
            .map_err(|e| Error::Config(format!("line {}, column {}: {e}", e.line(), e.column())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    fn requires_alpha(&self) -> bool {
        !matches!(self.suite, SuiteId::Specfun | SuiteId::Kernel)
    }

    pub fn validate(&self) -> Result<()> {
        if self.requires_alpha() && self.alpha.is_none() {
            return Err(Error::Config(format!("missing key `alpha` (required by suite {})", self.suite.name())));
        }
        if let Some(a) = self.alpha {
            if !(a > 0.0 && a < 1.0) {
                return Err(Error::Config(format!("key `alpha` must lie in (0,1), got {a}")));
            }
        }
        if let Some(kind) = &self.phi {
            BernsteinFunction::new(kind.clone()).map_err(|e| Error::Config(format!("key `phi`: {e}")))?;
        }
        if let Some(g) = &self.grid {
            if g.n < 8 || !g.n.is_power_of_two() {
                return Err(Error::Config(format!("key `grid.n` must be a power of two >= 8, got {}", g.n)));
            }
            if g.n_time < 2 {
                return Err(Error::Config(format!("key `grid.n_time` must be at least 2, got {}", g.n_time)));
            }
            positive("grid.l", g.l)?;
            positive("grid.t_final", g.t_final)?;
        }
        for (i, spec) in self.norms.iter().enumerate() {
            if !(spec.p > 1.0 && spec.p.is_finite() && spec.q > 1.0 && spec.q.is_finite()) {
                return Err(Error::Config(format!("key `norms[{i}]`: p and q must lie in (1, inf)")));
            }
        }
        if let Some(p0) = self.p0 {
            if !(p0 >= 1.0) || !p0.is_finite() {
                return Err(Error::Config(format!("key `p0` must be at least 1, got {p0}")));
            }
        }
        for &t in &self.times {
            positive("times", t)?;
        }
        if self.trials == Some(0) {
            return Err(Error::Config("key `trials` must be at least 1".into()));
        }
        let t = &self.tolerances;
        for (key, v) in [("tolerances.relative", t.relative), ("tolerances.fixture", t.fixture)] {
            if let Some(v) = v {
                positive(key, v)?;
            }
        }
        if let Some(g) = t.growth {
            if !(g >= 1.0) || !g.is_finite() {
                return Err(Error::Config(format!("key `tolerances.growth` must be at least 1, got {g}")));
            }
        }
        Ok(())
    }

    pub fn bernstein(&self) -> Result<BernsteinFunction> {
        BernsteinFunction::new(self.phi.clone().unwrap_or(BernsteinKind::Linear))
    }

    pub fn alpha_or(&self, default: f64) -> f64 {
        self.alpha.unwrap_or(default)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_a_full_config() {
        let text = r#"{
            "suite": "theorem1",
            "phi": {"kind": "linear"},
            "alpha": 0.5,
            "grid": {"n": 64, "n_time": 64, "l": 4.0, "t_final": 1.0},
            "norms": [{"p": 2.0, "q": 2.0, "mu1": {"kind": "unit"}, "mu2": {"kind": "power", "exponent": 0.3}}],
            "trials": 5,
            "seed": 7,
            "tolerances": {"growth": 1.1}
        }"#;
        let cfg = ExperimentConfig::from_json(text).unwrap();
        assert_eq!(cfg.suite, SuiteId::Theorem1);
        assert_eq!(cfg.trials, Some(5));
        assert_eq!(cfg.norms.len(), 1);
        let echo = serde_json::to_string(&cfg).unwrap();
        assert_eq!(serde_json::to_string(&ExperimentConfig::from_json(&echo).unwrap()).unwrap(), echo);
    }

    #[test]
    fn missing_alpha_names_the_key() {
        let err = ExperimentConfig::from_json(r#"{"suite": "sharp", "seed": 1}"#).unwrap_err();
        assert!(matches!(&err, Error::Config(m) if m.contains("`alpha`")), "{err}");
    }

    #[test]
    fn unknown_keys_are_rejected_with_a_position() {
        let err = ExperimentConfig::from_json("{\n  \"suite\": \"specfun\",\n  \"alhpa\": 0.5\n}").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("alhpa") && msg.contains("line 3"), "{msg}");
    }

    #[test]
    fn values_are_validated() {
        for text in [
            r#"{"suite": "theorem1", "alpha": 1.5}"#,
            r#"{"suite": "kernel", "grid": {"n": 100, "n_time": 4, "l": 1.0, "t_final": 1.0}}"#,
            r#"{"suite": "oscillation", "alpha": 0.5, "trials": 0}"#,
            r#"{"suite": "kernel", "phi": {"kind": "power", "beta": 3.0}}"#,
            r#"{"suite": "bogus"}"#,
        ] {
            assert!(matches!(ExperimentConfig::from_json(text), Err(Error::Config(_))), "{text}");
        }
    }
}
