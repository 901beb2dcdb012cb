use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::grid::SpaceTimeGrid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightAxis {
    Space,
    Time,
}

/// Positive weight sampled on the spatial lattice or on the time nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Weight {
    pub axis: WeightAxis,
    /// Points per axis; a single axis for time weights.
    pub shape: Vec<usize>,
    pub samples: Vec<f64>,
}

/// Declarative weight family, turned into samples once a grid is known.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightSpec {
    Unit,
    /// `|x|^a` or `|t|^a`, clamped at one cell near the origin.
    Power { exponent: f64 },
}

impl WeightSpec {
    pub fn build(&self, grid: &SpaceTimeGrid, axis: WeightAxis) -> Result<Weight> {
        match (self, axis) {
            (WeightSpec::Unit, _) => Weight::constant(grid, axis, 1.0),
            (WeightSpec::Power { exponent }, WeightAxis::Space) => Weight::power_space(grid, *exponent),
            (WeightSpec::Power { exponent }, WeightAxis::Time) => Weight::power_time(grid, *exponent),
        }
    }

    pub fn label(&self) -> String {
        match self {
            WeightSpec::Unit => "1".into(),
            WeightSpec::Power { exponent } => format!("|.|^{exponent}"),
        }
    }
}

fn axis_shape(grid: &SpaceTimeGrid, axis: WeightAxis) -> Vec<usize> {
    match axis {
        WeightAxis::Space => vec![grid.n; grid.d],
        WeightAxis::Time => vec![grid.n_time + 1],
    }
}

impl Weight {
    pub fn from_samples(axis: WeightAxis, shape: Vec<usize>, samples: Vec<f64>) -> Result<Self> {
        if shape.is_empty() || shape.len() > 3 {
            return domain(format!("weights live on 1 to 3 axes, got {}", shape.len()));
        }
        if shape.iter().product::<usize>() != samples.len() {
            return domain(format!("{} samples do not fill shape {shape:?}", samples.len()));
        }
        if let Some(bad) = samples.iter().find(|v| !(**v > 0.0) || !v.is_finite()) {
            return domain(format!("weight samples must be positive and finite, found {bad}"));
        }
        Ok(Weight { axis, shape, samples })
    }

    pub fn constant(grid: &SpaceTimeGrid, axis: WeightAxis, c: f64) -> Result<Self> {
        let shape = axis_shape(grid, axis);
        let len = shape.iter().product();
        Self::from_samples(axis, shape, vec![c; len])
    }

    pub fn space_from_fn(grid: &SpaceTimeGrid, f: impl Fn(&[f64; 3]) -> f64) -> Result<Self> {
        let samples = (0..grid.n_points()).map(|j| f(&grid.point(j))).collect();
        Self::from_samples(WeightAxis::Space, axis_shape(grid, WeightAxis::Space), samples)
    }

    pub fn time_from_fn(grid: &SpaceTimeGrid, f: impl Fn(f64) -> f64) -> Result<Self> {
        let samples = grid.times().into_iter().map(f).collect();
        Self::from_samples(WeightAxis::Time, axis_shape(grid, WeightAxis::Time), samples)
    }

    /// `max(|x|, h)^a`.
    pub fn power_space(grid: &SpaceTimeGrid, a: f64) -> Result<Self> {
        let h = grid.spacing();
        Self::space_from_fn(grid, |x| x.iter().map(|v| v * v).sum::<f64>().sqrt().max(h).powf(a))
    }

    /// `max(|t|, dt)^a` on the time nodes.
    pub fn power_time(grid: &SpaceTimeGrid, a: f64) -> Result<Self> {
        let dt = grid.dt();
        Self::time_from_fn(grid, |t| t.abs().max(dt).powf(a))
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    pub(crate) fn check_on(&self, grid: &SpaceTimeGrid, axis: WeightAxis) -> Result<()> {
        if self.axis != axis || self.shape != axis_shape(grid, axis) {
            return Err(crate::Error::GridMismatch(format!(
                "{:?} weight of shape {:?} does not sit on the {axis:?} axis of the grid",
                self.axis, self.shape
            )));
        }
        Ok(())
    }
}

/// Summed-volume table over a non-periodic box, with one padding layer.
struct Prefix {
    shape: Vec<usize>,
    table: Vec<f64>,
}

impl Prefix {
    fn new(shape: &[usize], v: &[f64]) -> Self {
        let pshape: Vec<usize> = shape.iter().map(|n| n + 1).collect();
        let total: usize = pshape.iter().product();
        let mut table = vec![0.0; total];
        // copy, shifted by one along every axis
        for (flat, &x) in v.iter().enumerate() {
            let mut rem = flat;
            let mut idx = [0usize; 3];
            for a in (0..shape.len()).rev() {
                idx[a] = rem % shape[a] + 1;
                rem /= shape[a];
            }
            table[Self::flat(&pshape, &idx)] = x;
        }
        // running sums axis by axis
        for a in 0..shape.len() {
            let stride: usize = pshape[a + 1..].iter().product();
            for flat in 0..total {
                if !(flat / stride).is_multiple_of(pshape[a]) {
                    table[flat] += table[flat - stride];
                }
            }
        }
        Prefix { shape: pshape, table }
    }

    fn flat(shape: &[usize], idx: &[usize]) -> usize {
        shape.iter().zip(idx).fold(0, |acc, (n, i)| acc * n + i)
    }

    /// Sum over the half-open box `lo..hi`.
    fn sum(&self, lo: &[usize], hi: &[usize]) -> f64 {
        let d = self.shape.len();
        let mut s = 0.0;
        for corner in 0..(1usize << d) {
            let mut idx = [0usize; 3];
            let mut sign = 1.0;
            for a in 0..d {
                if corner >> a & 1 == 1 {
                    idx[a] = lo[a];
                    sign = -sign;
                } else {
                    idx[a] = hi[a];
                }
            }
            s += sign * self.table[Self::flat(&self.shape, &idx[..d])];
        }
        s
    }
}

/// Sampled `A_p` characteristic: sup over cubes of side `2r+1 >= 5` cells,
/// centered on lattice points and contained in the sampled domain.
pub fn ap_characteristic(mu: &Weight, p: f64, d: usize) -> Result<f64> {
    if !(p > 1.0) || !p.is_finite() {
        return domain(format!("A_p characteristic needs p > 1, got {p}"));
    }
    if d != mu.dim() {
        return domain(format!("weight has {} axes, asked for d={d}", mu.dim()));
    }
    let dual: Vec<f64> = mu.samples.iter().map(|v| v.powf(-1.0 / (p - 1.0))).collect();
    let pm = Prefix::new(&mu.shape, &mu.samples);
    let pd = Prefix::new(&mu.shape, &dual);
    let r_max = mu.shape.iter().map(|n| (n - 1) / 2).min().unwrap_or(0);
    if r_max < 2 {
        return domain("sampled domain is too small for balls of radius 2 cells");
    }
    let mut best: f64 = 0.0;
    for flat in 0..mu.samples.len() {
        let mut rem = flat;
        let mut c = [0usize; 3];
        for a in (0..d).rev() {
            c[a] = rem % mu.shape[a];
            rem /= mu.shape[a];
        }
        let fit = (0..d).map(|a| c[a].min(mu.shape[a] - 1 - c[a])).min().unwrap_or(0);
        for r in 2..=fit {
            let lo: Vec<usize> = (0..d).map(|a| c[a] - r).collect();
            let hi: Vec<usize> = (0..d).map(|a| c[a] + r + 1).collect();
            let count = ((2 * r + 1) as f64).powi(d as i32);
            let am = pm.sum(&lo, &hi) / count;
            let ad = pd.sum(&lo, &hi) / count;
            best = best.max(am * ad.powf(p - 1.0));
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(n: usize, l: f64) -> SpaceTimeGrid {
        SpaceTimeGrid::new(1, n, l, 8, 1.0).unwrap()
    }

    #[test]
    fn unit_weight_has_characteristic_one() {
        let g = line(64, 1.0);
        let mu = Weight::constant(&g, WeightAxis::Space, 1.0).unwrap();
        assert_eq!(ap_characteristic(&mu, 2.0, 1).unwrap(), 1.0);
        assert_eq!(ap_characteristic(&mu, 3.5, 1).unwrap(), 1.0);
        let g2 = SpaceTimeGrid::new(2, 16, 1.0, 8, 1.0).unwrap();
        let mu = Weight::constant(&g2, WeightAxis::Space, 1.0).unwrap();
        assert_eq!(ap_characteristic(&mu, 2.0, 2).unwrap(), 1.0);
    }

    #[test]
    fn constant_weights_are_scale_invariant() {
        let g = line(64, 1.0);
        for c in [1e-3, 0.7, 42.0] {
            let mu = Weight::constant(&g, WeightAxis::Space, c).unwrap();
            assert!((ap_characteristic(&mu, 2.0, 1).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn power_weight_is_stable_under_refinement() {
        let a = ap_characteristic(&Weight::power_space(&line(128, 4.0), 0.5).unwrap(), 2.0, 1).unwrap();
        let b = ap_characteristic(&Weight::power_space(&line(256, 4.0), 0.5).unwrap(), 2.0, 1).unwrap();
        assert!(a.is_finite() && a > 1.0);
        assert!((b / a - 1.0).abs() < 0.05, "{a} -> {b}");
    }

    #[test]
    fn exponential_weight_diverges_as_the_box_widens() {
        let char_for = |l: f64| {
            let g = line((16.0 * l) as usize, l);
            let mu = Weight::space_from_fn(&g, |x| x[0].abs().exp()).unwrap();
            ap_characteristic(&mu, 2.0, 1).unwrap()
        };
        let (a, b, c) = (char_for(4.0), char_for(8.0), char_for(16.0));
        assert!(b / a >= 2.0 && c / b >= 2.0, "{a} {b} {c}");
    }

    #[test]
    fn prefix_sums_match_direct_sums() {
        let shape = vec![5, 4, 3];
        let v: Vec<f64> = (0..60).map(|i| (i as f64 * 0.37).sin() + 2.0).collect();
        let p = Prefix::new(&shape, &v);
        let (lo, hi) = ([1, 0, 1], [4, 3, 3]);
        let mut direct = 0.0;
        for i in lo[0]..hi[0] {
            for j in lo[1]..hi[1] {
                for k in lo[2]..hi[2] {
                    direct += v[(i * 4 + j) * 3 + k];
                }
            }
        }
        assert!((p.sum(&lo, &hi) - direct).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        let g = line(32, 1.0);
        let mu = Weight::constant(&g, WeightAxis::Space, 1.0).unwrap();
        assert!(ap_characteristic(&mu, 1.0, 1).is_err());
        assert!(ap_characteristic(&mu, 2.0, 2).is_err());
        assert!(Weight::from_samples(WeightAxis::Space, vec![2], vec![1.0, 0.0]).is_err());
        let t = Weight::power_time(&g, 0.3).unwrap();
        assert_eq!(t.shape, vec![9]);
        assert!(t.check_on(&g, WeightAxis::Space).is_err());
    }
}
