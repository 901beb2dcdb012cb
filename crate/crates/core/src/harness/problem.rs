//! Declarative solver problems for `solve`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analysis::random::band_limited_source;
use crate::bernstein::{BernsteinFunction, BernsteinKind};
use crate::error::{Error, Result};
use crate::grid::{Field, SpaceTimeGrid};
use crate::solver::{residual, solve_tsfe, TsfeProblem};
use crate::specfun::{gamma, mittag_leffler_real, Accuracy};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(default = "one")]
    pub d: usize,
    pub n: usize,
    pub l: f64,
    pub n_time: usize,
    pub t_final: f64,
}

fn one() -> usize {
    1
}

impl GridSpec {
    pub fn build(&self) -> Result<SpaceTimeGrid> {
        SpaceTimeGrid::new(self.d, self.n, self.l, self.n_time, self.t_final)
    }
}

/// Source `h`. Wave vectors are integer lattice indices `k`, `xi = pi k / L`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SourceSpec {
    /// `h` chosen so that `w = t e^{i xi x}`.
    Manufactured { k: Vec<i64> },
    /// `h = e^{i xi x}` for `t > 0`, solved by `t^a E_{a,1+a}(-t^a phi) e^{i xi x}`.
    SingleMode { k: Vec<i64> },
    /// Seeded band-limited source.
    Random {
        seed: u64,
        #[serde(default = "three")]
        space_modes: i64,
        #[serde(default = "three_u")]
        time_modes: usize,
    },
}

fn three() -> i64 {
    3
}

fn three_u() -> usize {
    3
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub phi: BernsteinKind,
    pub alpha: f64,
    pub grid: GridSpec,
    pub source: SourceSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveSummary {
    pub grid: SpaceTimeGrid,
    pub residual: f64,
    /// Relative max error at the final time against the exact solution.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub final_error: Option<f64>,
    pub max_abs: f64,
}

fn mode_field(grid: SpaceTimeGrid, xi: &[f64], amp: impl Fn(f64) -> f64) -> Field {
    Field::spacetime_from_fn(grid, |t, x| {
        let phase: f64 = xi.iter().zip(x).map(|(k, x)| k * x).sum();
        Complex64::new(0.0, phase).exp() * amp(t)
    })
}

impl ProblemConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ProblemConfig = serde_json::from_str(text)
            .map_err(|e| Error::Config(format!("line {}, column {}: {e}", e.line(), e.column())))?;
        if !(cfg.alpha > 0.0 && cfg.alpha < 1.0) {
            return Err(Error::Config(format!("key `alpha` must lie in (0,1), got {}", cfg.alpha)));
        }
        Ok(cfg)
    }

    fn wave(&self, k: &[i64]) -> Result<Vec<f64>> {
        if k.len() != self.grid.d {
            return Err(Error::Config(format!("key `source.k` needs {} entries, got {}", self.grid.d, k.len())));
        }
        let half = (self.grid.n / 2) as i64;
        if k.iter().any(|&v| v.abs() >= half) {
            return Err(Error::Config(format!("key `source.k` must stay below the Nyquist index {half}")));
        }
        Ok(k.iter().map(|&v| PI * v as f64 / self.grid.l).collect())
    }

    /// The problem and, where known in closed form, its exact solution.
    pub fn build(&self) -> Result<(TsfeProblem, Option<Field>)> {
        let grid = self.grid.build()?;
        let phi = BernsteinFunction::new(self.phi.clone())?;
        let a = self.alpha;
        let (h, exact) = match &self.source {
            SourceSpec::Manufactured { k } => {
                let xi = self.wave(k)?;
                let rho = phi.phi(xi.iter().map(|v| v * v).sum());
                let h = mode_field(grid, &xi, |t| t.powf(1.0 - a) / gamma(2.0 - a) + t * rho);
                (h, Some(mode_field(grid, &xi, |t| t)))
            }
            SourceSpec::SingleMode { k } => {
                let xi = self.wave(k)?;
                let rho = phi.phi(xi.iter().map(|v| v * v).sum());
                let acc = Accuracy::default();
                let amp: Vec<f64> = grid
                    .times()
                    .iter()
                    .map(|&t| Ok(t.powf(a) * mittag_leffler_real(a, a + 1.0, -rho * t.powf(a), &acc)?))
                    .collect::<Result<_>>()?;
                let dt = grid.dt();
                let exact = mode_field(grid, &xi, |t| amp[(t / dt).round() as usize]);
                (mode_field(grid, &xi, |_| 1.0), Some(exact))
            }
            SourceSpec::Random { seed, space_modes, time_modes } => {
                (band_limited_source(&grid, *seed, *space_modes, *time_modes), None)
            }
        };
        Ok((TsfeProblem::new(phi, a, h)?, exact))
    }

    pub fn solve(&self) -> Result<(Field, SolveSummary)> {
        let (p, exact) = self.build()?;
        let w = solve_tsfe(&p)?;
        let grid = w.grid;
        let final_error = exact.map(|e| {
            let last = grid.n_time;
            let diff: Vec<f64> = w.slice(last).iter().zip(e.slice(last)).map(|(a, b)| (a - b).norm()).collect();
            let scale = e.slice(last).iter().map(|v| v.norm()).fold(0.0, f64::max);
            diff.iter().cloned().fold(0.0, f64::max) / scale
        });
        let summary = SolveSummary { grid, residual: residual(&p, &w)?, final_error, max_abs: w.max_abs() };
        Ok((w, summary))
    }
}
