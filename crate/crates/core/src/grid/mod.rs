//! Uniform time grids times a periodic spatial lattice on `[-L, L)^d`.

mod io;
mod spectral;
mod time;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

pub use io::{read_field, write_csv_slice, write_field, FieldHeader};
pub use spectral::{apply_bessel, apply_multiplier, apply_phi_delta, spectral_derivative, Dft};
pub use time::{caputo_l1, caputo_weights, fractional_integral, rl_derivative};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceTimeGrid {
    pub d: usize,
    pub n: usize,
    /// Half width `L` of the spatial box.
    pub l: f64,
    pub n_time: usize,
    /// Final time `T`.
    pub t_final: f64,
    /// First time node; zero unless the grid carries two-sided time.
    #[serde(default)]
    pub t_start: f64,
}

impl SpaceTimeGrid {
    pub fn new(d: usize, n: usize, l: f64, n_time: usize, t_final: f64) -> Result<Self> {
        Self::two_sided(d, n, l, n_time, 0.0, t_final)
    }

    pub fn two_sided(d: usize, n: usize, l: f64, n_time: usize, t_start: f64, t_final: f64) -> Result<Self> {
        let g = SpaceTimeGrid { d, n, l, n_time, t_final, t_start };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=3).contains(&self.d) {
            return domain(format!("dimension must be 1, 2 or 3, got {}", self.d));
        }
        if self.n < 8 || !self.n.is_power_of_two() {
            return domain(format!("points per axis must be a power of two >= 8, got {}", self.n));
        }
        if !(self.l > 0.0) || !self.l.is_finite() {
            return domain(format!("box half width must be positive, got {}", self.l));
        }
        if self.n_time == 0 {
            return domain("n_time must be positive");
        }
        if !(self.t_final > self.t_start) || !self.t_final.is_finite() || !self.t_start.is_finite() {
            return domain(format!("need t_start < T, got [{}, {}]", self.t_start, self.t_final));
        }
        Ok(())
    }

    pub fn n_points(&self) -> usize {
        self.n.pow(self.d as u32)
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.l / self.n as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.d as i32)
    }

    pub fn dt(&self) -> f64 {
        (self.t_final - self.t_start) / self.n_time as f64
    }

    pub fn time(&self, k: usize) -> f64 {
        self.t_start + k as f64 * self.dt()
    }

    pub fn times(&self) -> Vec<f64> {
        (0..=self.n_time).map(|k| self.time(k)).collect()
    }

    pub fn coord(&self, j: usize) -> f64 {
        -self.l + j as f64 * self.spacing()
    }

    /// Per-axis indices of a flat lattice index (last axis fastest).
    pub fn multi_index(&self, mut flat: usize) -> [usize; 3] {
        let mut idx = [0; 3];
        for a in (0..self.d).rev() {
            idx[a] = flat % self.n;
            flat /= self.n;
        }
        idx
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().take(self.d).fold(0, |acc, &i| acc * self.n + i)
    }

    pub fn point(&self, flat: usize) -> [f64; 3] {
        let idx = self.multi_index(flat);
        let mut x = [0.0; 3];
        for a in 0..self.d {
            x[a] = self.coord(idx[a]);
        }
        x
    }

    pub fn radius(&self, flat: usize) -> f64 {
        let x = self.point(flat);
        x.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Signed wavenumber index in `[-n/2, n/2)`.
    pub fn wavenumber(&self, k: usize) -> i64 {
        let k = k as i64;
        let n = self.n as i64;
        if k < n / 2 {
            k
        } else {
            k - n
        }
    }

    pub fn frequency(&self, k: usize) -> f64 {
        PI * self.wavenumber(k) as f64 / self.l
    }

    pub fn frequency_vector(&self, flat: usize) -> [f64; 3] {
        let idx = self.multi_index(flat);
        let mut xi = [0.0; 3];
        for a in 0..self.d {
            xi[a] = self.frequency(idx[a]);
        }
        xi
    }

    /// `|xi|^2` of a flat frequency index.
    pub fn xi_sq(&self, flat: usize) -> f64 {
        self.frequency_vector(flat).iter().map(|v| v * v).sum()
    }

    /// Whether any axis of the frequency sits at the Nyquist index `n/2`.
    pub fn is_nyquist(&self, flat: usize) -> bool {
        let idx = self.multi_index(flat);
        idx.iter().take(self.d).any(|&k| k == self.n / 2)
    }

    /// Same lattice with `n` doubled (same box).
    pub fn refined_space(&self) -> Self {
        SpaceTimeGrid { n: 2 * self.n, ..*self }
    }

    /// Same lattice with `n` and `L` doubled (same spacing, wider box).
    pub fn widened(&self) -> Self {
        SpaceTimeGrid { n: 2 * self.n, l: 2.0 * self.l, ..*self }
    }

    /// `n` and `n_time` doubled on the same domain.
    pub fn refined(&self) -> Self {
        SpaceTimeGrid { n: 2 * self.n, n_time: 2 * self.n_time, ..*self }
    }

    pub fn with_time(&self, n_time: usize) -> Self {
        SpaceTimeGrid { n_time, ..*self }
    }

    pub fn check_same(&self, other: &SpaceTimeGrid) -> Result<()> {
        if self != other {
            return Err(Error::GridMismatch(format!("{self:?} vs {other:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldDomain {
    Space,
    SpaceTime,
}

/// Complex samples over a spatial slice or over all time nodes of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub grid: SpaceTimeGrid,
    pub domain: FieldDomain,
    pub values: Vec<Complex64>,
}

impl Field {
    pub fn new(grid: SpaceTimeGrid, domain: FieldDomain, values: Vec<Complex64>) -> Result<Self> {
        let expected = match domain {
            FieldDomain::Space => grid.n_points(),
            FieldDomain::SpaceTime => (grid.n_time + 1) * grid.n_points(),
        };
        if values.len() != expected {
            return Err(Error::GridMismatch(format!(
                "field has {} values, grid needs {expected}",
                values.len()
            )));
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return crate::error::domain("field contains non-finite entries");
        }
        Ok(Field { grid, domain, values })
    }

    pub fn zeros(grid: SpaceTimeGrid, domain: FieldDomain) -> Self {
        let len = match domain {
            FieldDomain::Space => grid.n_points(),
            FieldDomain::SpaceTime => (grid.n_time + 1) * grid.n_points(),
        };
        Field { grid, domain, values: vec![Complex64::new(0.0, 0.0); len] }
    }

    pub fn space_from_fn(grid: SpaceTimeGrid, f: impl Fn(&[f64; 3]) -> Complex64) -> Self {
        let values = (0..grid.n_points()).map(|j| f(&grid.point(j))).collect();
        Field { grid, domain: FieldDomain::Space, values }
    }

    pub fn spacetime_from_fn(grid: SpaceTimeGrid, f: impl Fn(f64, &[f64; 3]) -> Complex64) -> Self {
        let np = grid.n_points();
        let mut values = Vec::with_capacity((grid.n_time + 1) * np);
        for k in 0..=grid.n_time {
            let t = grid.time(k);
            values.extend((0..np).map(|j| f(t, &grid.point(j))));
        }
        Field { grid, domain: FieldDomain::SpaceTime, values }
    }

    pub fn n_slices(&self) -> usize {
        match self.domain {
            FieldDomain::Space => 1,
            FieldDomain::SpaceTime => self.grid.n_time + 1,
        }
    }

    pub fn slice(&self, k: usize) -> &[Complex64] {
        let np = self.grid.n_points();
        &self.values[k * np..(k + 1) * np]
    }

    pub fn slice_mut(&mut self, k: usize) -> &mut [Complex64] {
        let np = self.grid.n_points();
        &mut self.values[k * np..(k + 1) * np]
    }

    /// Spatial slice at time node `k` as a space field.
    pub fn time_slice(&self, k: usize) -> Field {
        Field { grid: self.grid, domain: FieldDomain::Space, values: self.slice(k).to_vec() }
    }

    pub fn check_compatible(&self, other: &Field) -> Result<()> {
        self.grid.check_same(&other.grid)?;
        if self.domain != other.domain {
            return Err(Error::GridMismatch("space and spacetime fields mixed".into()));
        }
        Ok(())
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Field {
        Field { values: self.values.iter().map(|&v| f(v)).collect(), ..self.clone() }
    }

    pub fn axpy(&self, a: Complex64, other: &Field) -> Result<Field> {
        self.check_compatible(other)?;
        let values = self.values.iter().zip(&other.values).map(|(&x, &y)| x + a * y).collect();
        Ok(Field { values, ..self.clone() })
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Field) -> Result<f64> {
        self.check_compatible(other)?;
        Ok(self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
    }

    /// Discrete spatial L2 norm of slice `k` (cell volume included).
    pub fn slice_l2(&self, k: usize) -> f64 {
        (pairwise_sum(&self.slice(k).iter().map(|v| v.norm_sqr()).collect::<Vec<_>>()) * self.grid.cell_volume()).sqrt()
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }
}

/// Pairwise summation, used wherever reports must be reproducible bit for bit.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 16 {
        return v.iter().sum();
    }
    let mid = v.len() / 2;
    pairwise_sum(&v[..mid]) + pairwise_sum(&v[mid..])
}
