use serde::{Deserialize, Serialize};

use super::weights::{Weight, WeightAxis, WeightSpec};
use crate::error::{domain, Error, Result};
use crate::grid::{pairwise_sum, Field, FieldDomain, SpaceTimeGrid};

#[derive(Debug, Clone, PartialEq)]
pub struct MixedNormParams {
    pub p: f64,
    pub q: f64,
    /// Upper end `T` of the time integral, which starts at `t = 0`.
    pub t_final: f64,
    pub mu1: Weight,
    pub mu2: Weight,
}

/// Grid-free description of a mixed norm; weights are sampled per grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixedNormSpec {
    pub p: f64,
    pub q: f64,
    pub mu1: WeightSpec,
    pub mu2: WeightSpec,
}

impl MixedNormSpec {
    pub fn unweighted(p: f64, q: f64) -> Self {
        MixedNormSpec { p, q, mu1: WeightSpec::Unit, mu2: WeightSpec::Unit }
    }

    pub fn on(&self, grid: &SpaceTimeGrid) -> Result<MixedNormParams> {
        MixedNormParams::new(
            self.p,
            self.q,
            grid.t_final,
            self.mu1.build(grid, WeightAxis::Space)?,
            self.mu2.build(grid, WeightAxis::Time)?,
        )
    }
}

fn check_exponent(name: &str, v: f64) -> Result<()> {
    if !(v > 1.0) || !v.is_finite() {
        return domain(format!("exponent {name} must lie in (1, inf), got {v}"));
    }
    Ok(())
}

impl MixedNormParams {
    pub fn new(p: f64, q: f64, t_final: f64, mu1: Weight, mu2: Weight) -> Result<Self> {
        let m = MixedNormParams { p, q, t_final, mu1, mu2 };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        check_exponent("p", self.p)?;
        check_exponent("q", self.q)?;
        if !(self.t_final > 0.0) || !self.t_final.is_finite() {
            return domain(format!("T must be positive, got {}", self.t_final));
        }
        if self.mu1.axis != WeightAxis::Space || self.mu2.axis != WeightAxis::Time {
            return domain("mu1 must be a space weight and mu2 a time weight");
        }
        Ok(())
    }
}

/// `(sum |f|^p mu h^d)^{1/p}` of a spatial slice.
pub fn weighted_lp(grid: &SpaceTimeGrid, slice: &[num_complex::Complex64], p: f64, mu: Option<&Weight>) -> f64 {
    let terms: Vec<f64> = match mu {
        Some(m) => slice.iter().zip(&m.samples).map(|(v, w)| v.norm().powf(p) * w).collect(),
        None => slice.iter().map(|v| v.norm().powf(p)).collect(),
    };
    (pairwise_sum(&terms) * grid.cell_volume()).powf(1.0 / p)
}

/// `L_p(mu)` norm of a space field.
pub fn lp_norm(f: &Field, p: f64, mu: Option<&Weight>) -> Result<f64> {
    if f.domain != FieldDomain::Space {
        return domain("lp_norm takes a space field");
    }
    if let Some(m) = mu {
        m.check_on(&f.grid, WeightAxis::Space)?;
    }
    Ok(weighted_lp(&f.grid, &f.values, p, mu))
}

/// Time nodes inside `[max(t_start, 0), T]`.
fn time_nodes(grid: &SpaceTimeGrid, t_final: f64) -> Result<Vec<usize>> {
    let tol = 1e-9 * grid.dt();
    if t_final > grid.t_final + tol {
        return domain(format!("T = {t_final} exceeds the grid horizon {}", grid.t_final));
    }
    let nodes: Vec<usize> = (0..=grid.n_time)
        .filter(|&k| {
            let t = grid.time(k);
            t >= -tol && t <= t_final + tol
        })
        .collect();
    if nodes.len() < 2 {
        return domain("fewer than two time nodes inside [0, T]");
    }
    Ok(nodes)
}

/// `(int_0^T (int |f|^p mu1 dx)^{q/p} mu2 dt)^{1/q}`: midpoint rule in space,
/// trapezoid rule in time.
pub fn mixed_norm(f: &Field, params: &MixedNormParams) -> Result<f64> {
    params.validate()?;
    if f.domain != FieldDomain::SpaceTime {
        return Err(Error::GridMismatch("mixed norms need a spacetime field".into()));
    }
    params.mu1.check_on(&f.grid, WeightAxis::Space)?;
    params.mu2.check_on(&f.grid, WeightAxis::Time)?;
    let nodes = time_nodes(&f.grid, params.t_final)?;
    let (p, q) = (params.p, params.q);
    let dt = f.grid.dt();
    let last = nodes.len() - 1;
    let terms: Vec<f64> = nodes
        .iter()
        .enumerate()
        .map(|(i, &k)| {
            let inner = weighted_lp(&f.grid, f.slice(k), p, Some(&params.mu1));
            let w = if i == 0 || i == last { 0.5 * dt } else { dt };
            inner.powf(q) * params.mu2.samples[k] * w
        })
        .collect();
    Ok(pairwise_sum(&terms).powf(1.0 / q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn unit(g: &SpaceTimeGrid, p: f64, q: f64) -> MixedNormParams {
        MixedNormSpec::unweighted(p, q).on(g).unwrap()
    }

    #[test]
    fn constant_field_volume() {
        let g = SpaceTimeGrid::new(1, 32, 1.0, 16, 1.0).unwrap();
        let f = Field::spacetime_from_fn(g, |_, _| Complex64::new(1.0, 0.0));
        for p in [1.5, 2.0, 3.0] {
            let v = mixed_norm(&f, &unit(&g, p, p)).unwrap();
            assert!((v - 2f64.powf(1.0 / p)).abs() < 1e-14);
        }
    }

    #[test]
    fn single_cell_indicator() {
        let g = SpaceTimeGrid::new(1, 32, 1.0, 16, 1.0).unwrap();
        let f = Field::spacetime_from_fn(g, |_, x| Complex64::new(if x[0] == 0.0 { 1.0 } else { 0.0 }, 0.0));
        let v = mixed_norm(&f, &unit(&g, 2.5, 2.5)).unwrap();
        assert!((v - g.cell_volume().powf(1.0 / 2.5)).abs() < 1e-14);
    }

    #[test]
    fn weighted_gaussian_converges() {
        // mu1 = |x|^{1/2}, p=2, q=3, f = exp(-x^2): the exact value is
        // (int |x|^{1/2} e^{-2x^2} dx)^{1/2} = (Gamma(3/4) 2^{-3/4})^{1/2}
        let exact = (crate::specfun::gamma(0.75) * 2f64.powf(-0.75)).sqrt();
        let spec = MixedNormSpec { p: 2.0, q: 3.0, mu1: WeightSpec::Power { exponent: 0.5 }, mu2: WeightSpec::Unit };
        let value = |n: usize| {
            let g = SpaceTimeGrid::new(1, n, 6.0, 8, 1.0).unwrap();
            let f = Field::spacetime_from_fn(g, |_, x| Complex64::new((-x[0] * x[0]).exp(), 0.0));
            mixed_norm(&f, &spec.on(&g).unwrap()).unwrap()
        };
        // the clamped |x|^{1/2} cell at the origin limits the rule to order 3/2
        let errs: Vec<f64> = [128, 512].iter().map(|&n| (value(n) - exact).abs()).collect();
        let order = (errs[0] / errs[1]).log2() / 2.0;
        assert!(order > 1.4 && errs[1] < 2e-3 * exact, "{errs:?}");
    }

    #[test]
    fn two_sided_grids_start_at_zero() {
        let g = SpaceTimeGrid::two_sided(1, 16, 1.0, 20, -1.0, 1.0).unwrap();
        let f = Field::spacetime_from_fn(g, |t, _| Complex64::new(if t < 0.0 { 100.0 } else { 1.0 }, 0.0));
        let v = mixed_norm(&f, &unit(&g, 2.0, 2.0)).unwrap();
        assert!((v - 2f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn mismatched_weights_are_rejected() {
        let g = SpaceTimeGrid::new(1, 16, 1.0, 8, 1.0).unwrap();
        let other = SpaceTimeGrid::new(1, 32, 1.0, 8, 1.0).unwrap();
        let f = Field::zeros(g, FieldDomain::SpaceTime);
        assert!(matches!(mixed_norm(&f, &unit(&other, 2.0, 2.0)), Err(Error::GridMismatch(_))));
        assert!(MixedNormSpec::unweighted(1.0, 2.0).on(&g).is_err());
    }
}
