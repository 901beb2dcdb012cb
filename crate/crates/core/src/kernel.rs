//! Fundamental solutions `S_{a,g,phi}(t, x)` with Fourier symbol
//! `t^{a-g} E_{a,1+a-g}(-t^a phi(|xi|^2))`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bernstein::BernsteinFunction;
use crate::error::{domain, Error, Result};
use crate::grid::{pairwise_sum, rl_derivative, Dft, Field, FieldDomain, SpaceTimeGrid};
use crate::quad::{adaptive_gk, gauss_legendre, CompositeRule};
use crate::specfun::mittag_leffler::{mittag_leffler_real, ml_symbol_with};
use crate::specfun::wright::{theta_max, wright_m, WrightQuery};
use crate::specfun::Accuracy;

/// Nyquist-to-peak symbol ratio above which a sample is flagged as aliased.
pub const ALIAS_RATIO: f64 = 1e-8;

/// Lattice cells excluded around the origin in pointwise-bound checks.
pub const ORIGIN_CELLS: f64 = 4.0;

/// Strength of the spectral filter on differentiated kernels.
pub const DERIVATIVE_FILTER: f64 = 36.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelRoute {
    Fourier,
    Subordination,
}

#[derive(Debug, Clone)]
pub struct KernelSample {
    pub alpha: f64,
    pub gamma: f64,
    pub t: f64,
    pub route: KernelRoute,
    /// Lattice symbol values, indexed like the DFT output.
    pub symbol: Vec<f64>,
    pub field: Field,
    /// Symbol at the Nyquist shell exceeds `ALIAS_RATIO` of its peak.
    pub alias_warning: bool,
}

impl KernelSample {
    pub fn mass(&self) -> f64 {
        let v: Vec<f64> = self.field.values.iter().map(|v| v.re).collect();
        pairwise_sum(&v) * self.field.grid.cell_volume()
    }

    pub fn l1_norm(&self) -> f64 {
        let v: Vec<f64> = self.field.values.iter().map(|v| v.re.abs()).collect();
        pairwise_sum(&v) * self.field.grid.cell_volume()
    }

    /// Symbol value at zero frequency.
    pub fn symbol_at_zero(&self) -> f64 {
        self.symbol[0]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub constant_hat: f64,
    pub argmax: Vec<f64>,
    /// Ratio at the mirror image of the argmax.
    pub mirror_ratio: f64,
    pub refinement_growth: Option<f64>,
    /// Worst ratio against the small-distance comparator, when computed.
    pub regime2_constant: Option<f64>,
}

fn check_params(alpha: f64, gamma: f64, t: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return domain(format!("alpha must lie in (0,1), got {alpha}"));
    }
    if !(t > 0.0) || !t.is_finite() {
        return domain(format!("kernel time must be positive, got {t}"));
    }
    let allowed = [alpha, 1.0, 1.0 + alpha];
    if !allowed.iter().any(|g| (g - gamma).abs() < 1e-12) {
        return domain(format!("gamma must be alpha, 1 or 1+alpha; got {gamma}"));
    }
    Ok(())
}

/// Inverse transform of a lattice symbol into `(2L)^{-d} sum_k m_k e^{i xi_k x}`.
pub fn symbol_to_field(grid: &SpaceTimeGrid, symbol: &[f64]) -> Field {
    let dft = Dft::new(grid);
    let n = grid.n_points();
    let scale = n as f64 / (2.0 * grid.l).powi(grid.d as i32);
    let mut data: Vec<Complex64> = (0..n)
        .map(|k| {
            let idx = grid.multi_index(k);
            let parity: usize = idx.iter().take(grid.d).sum();
            let sign = if parity.is_multiple_of(2) { 1.0 } else { -1.0 };
            Complex64::new(sign * symbol[k] * scale, 0.0)
        })
        .collect();
    dft.inverse(&mut data);
    for v in data.iter_mut() {
        v.im = 0.0;
    }
    Field { grid: *grid, domain: FieldDomain::Space, values: data }
}

/// Lattice symbol from a function of `|xi|^2`, evaluated once per distinct value.
fn radial_symbol(grid: &SpaceTimeGrid, f: impl Fn(f64) -> Result<f64> + Sync) -> Result<Vec<f64>> {
    let xi: Vec<f64> = (0..grid.n_points()).map(|k| grid.xi_sq(k)).collect();
    let mut uniq = xi.clone();
    uniq.sort_by(f64::total_cmp);
    uniq.dedup();
    let vals: Vec<f64> = uniq.par_iter().map(|&x| f(x)).collect::<Result<Vec<_>>>()?;
    Ok(xi
        .iter()
        .map(|x| {
            let i = uniq.binary_search_by(|u| u.total_cmp(x)).expect("value present");
            vals[i]
        })
        .collect())
}

fn alias_flag(grid: &SpaceTimeGrid, symbol: &[f64]) -> bool {
    let peak = symbol.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let nyq = (0..grid.n_points())
        .filter(|&k| grid.is_nyquist(k))
        .map(|k| symbol[k].abs())
        .fold(0.0, f64::max);
    peak > 0.0 && nyq > ALIAS_RATIO * peak
}

pub fn kernel_fourier(
    phi: &BernsteinFunction,
    alpha: f64,
    gamma: f64,
    t: f64,
    grid: &SpaceTimeGrid,
) -> Result<KernelSample> {
    check_params(alpha, gamma, t)?;
    let acc = Accuracy::default();
    let symbol = radial_symbol(grid, |x| ml_symbol_with(alpha, gamma, t, phi.phi(x), &acc))?;
    let field = symbol_to_field(grid, &symbol);
    let alias_warning = alias_flag(grid, &symbol);
    Ok(KernelSample { alpha, gamma, t, route: KernelRoute::Fourier, symbol, field, alias_warning })
}

/// Composite Gauss-Legendre rule for `int_0^inf M_a(u) e^{-lam u} du`:
/// geometric panels near zero down to `1e-3 / lam_max`, then panels of width
/// `min(1/2, 1-a)` around the peak of `M_a`, which narrows as `a -> 1`,
/// widening geometrically to its left.
fn subordination_rule(alpha: f64, lam_max: f64, order: usize) -> CompositeRule {
    let acc = Accuracy::default();
    let u_max = theta_max(alpha, &acc);
    let width = (1.0 - alpha).min(0.5);
    let mut breaks = vec![0.0];
    let mut b = (1e-3 / lam_max.max(1e-3)).min(0.25);
    while b < 0.25 {
        breaks.push(b);
        b *= 2.0;
    }
    let fine_start = 1.0 - 20.0 * width;
    if fine_start > 0.25 {
        // steps doubling away from the peak on its left
        let mut left = Vec::new();
        let (mut u, mut step) = (fine_start, width);
        while u > 0.25 {
            left.push(u);
            step = (2.0 * step).min(0.25);
            u -= step;
        }
        breaks.push(0.25);
        breaks.extend(left.into_iter().rev());
    }
    let mut b = *breaks.last().expect("nonempty") + width;
    while b < u_max {
        breaks.push(b);
        b += width;
    }
    breaks.push(u_max);
    breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
    CompositeRule::from_breaks(&breaks, order)
}

fn subordination_symbol(alpha: f64, lam: &[f64], order: usize) -> Result<(Vec<f64>, f64)> {
    let lam_max = lam.iter().cloned().fold(0.0, f64::max);
    let rule = subordination_rule(alpha, lam_max, order);
    let acc = Accuracy::default();
    let m: Vec<f64> = rule
        .nodes
        .par_iter()
        .map(|&u| wright_m(&WrightQuery::new(alpha, u), &acc).map(|w| w.value))
        .collect::<Result<Vec<_>>>()?;
    let wm: Vec<f64> = rule.weights.iter().zip(&m).map(|(w, m)| w * m).collect();
    let mass = pairwise_sum(&wm);
    let sym = lam
        .par_iter()
        .map(|&l| {
            let terms: Vec<f64> = wm.iter().zip(&rule.nodes).map(|(w, u)| w * (-l * u).exp()).collect();
            pairwise_sum(&terms)
        })
        .collect();
    Ok((sym, mass))
}

/// Probability kernel `S_{a,phi}(t,.) = int_0^inf p(s,.) t^{-a} M_a(s t^{-a}) ds`,
/// integrated mode-wise after the substitution `s = t^a u`.
pub fn kernel_subordination(phi: &BernsteinFunction, alpha: f64, t: f64, grid: &SpaceTimeGrid) -> Result<KernelSample> {
    check_params(alpha, alpha, t)?;
    let ta = t.powf(alpha);
    let lam: Vec<f64> = (0..grid.n_points()).map(|k| ta * phi.phi(grid.xi_sq(k))).collect();
    let (coarse, _) = subordination_symbol(alpha, &lam, 12)?;
    let (symbol, _) = subordination_symbol(alpha, &lam, 24)?;
    let change = coarse.iter().zip(&symbol).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let tol = Accuracy::default().rel_tol;
    if change > tol {
        return Err(Error::Quadrature(format!(
            "subordination symbol changed by {change:.2e} under node doubling (tol {tol:.1e})"
        )));
    }
    let field = symbol_to_field(grid, &symbol);
    let alias_warning = alias_flag(grid, &symbol);
    Ok(KernelSample { alpha, gamma: alpha, t, route: KernelRoute::Subordination, symbol, field, alias_warning })
}

/// Relative discrete L2 distance of two fields on the same grid.
pub fn relative_l2(a: &Field, b: &Field) -> Result<f64> {
    a.check_compatible(b)?;
    let num: Vec<f64> = a.values.iter().zip(&b.values).map(|(x, y)| (x - y).norm_sqr()).collect();
    let den: Vec<f64> = b.values.iter().map(|y| y.norm_sqr()).collect();
    Ok((pairwise_sum(&num) / pairwise_sum(&den)).sqrt())
}

/// `|d^k S|` on the lattice (gradient magnitude for `k = 1`). The derivative
/// symbol carries the filter `exp(-36 (|xi|/xi_max)^8)`: the differentiated
/// symbol decays too slowly for a sharp cutoff, whose ripple would otherwise
/// dominate the far field.
fn derivative_magnitude(sample: &KernelSample, k: u8) -> Vec<f64> {
    let g = sample.field.grid;
    if k == 0 {
        return sample.field.values.iter().map(|v| v.re.abs()).collect();
    }
    let dft = Dft::new(&g);
    let n = g.n_points();
    let xi_max = g.frequency(g.n / 2).abs();
    let mut sq = vec![0.0; n];
    for axis in 0..g.d {
        let mut data = sample.field.values.clone();
        dft.forward(&mut data);
        for (kk, v) in data.iter_mut().enumerate() {
            let idx = g.multi_index(kk);
            let filter = (-DERIVATIVE_FILTER * (g.xi_sq(kk).sqrt() / xi_max).powi(8)).exp();
            *v *= if idx[axis] == g.n / 2 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(0.0, g.frequency(idx[axis]) * filter)
            };
        }
        dft.inverse(&mut data);
        for (s, v) in sq.iter_mut().zip(&data) {
            *s += v.re * v.re;
        }
    }
    sq.into_iter().map(f64::sqrt).collect()
}

fn mirror_index(g: &SpaceTimeGrid, flat: usize) -> usize {
    let idx = g.multi_index(flat);
    let mut m = [0usize; 3];
    for a in 0..g.d {
        m[a] = (g.n - idx[a]) % g.n;
    }
    g.flat_index(&m[..g.d])
}

/// `max |d^k S| |x|^{d+k} / (t^{2a-g} phi(|x|^{-2}))` over lattice points with
/// `|x| >= 4 cells`.
pub fn verify_pointwise_bound(sample: &KernelSample, phi: &BernsteinFunction, k: u8) -> Result<BoundReport> {
    if k > 1 {
        return domain(format!("derivative order must be 0 or 1, got {k}"));
    }
    let g = sample.field.grid;
    let d = g.d as f64;
    let mag = derivative_magnitude(sample, k);
    let scale = sample.t.powf(2.0 * sample.alpha - sample.gamma);
    let r_min = ORIGIN_CELLS * g.spacing();
    let ratio = |j: usize| -> Option<f64> {
        let r = g.radius(j);
        if r < r_min - 1e-12 {
            return None;
        }
        Some(mag[j] * r.powf(d + k as f64) / (scale * phi.phi(r.powi(-2))))
    };
    let mut best = (0.0_f64, 0usize);
    for j in 0..g.n_points() {
        if let Some(v) = ratio(j) {
            if v > best.0 {
                best = (v, j);
            }
        }
    }
    let mirror = ratio(mirror_index(&g, best.1)).unwrap_or(f64::NAN);
    let x = g.point(best.1);
    Ok(BoundReport {
        constant_hat: best.0,
        argmax: x[..g.d].to_vec(),
        mirror_ratio: mirror,
        refinement_growth: None,
        regime2_constant: None,
    })
}

/// `int_{1/phi(|x|^-2)}^{2 t^a} (phi^{-1}(1/rho))^{(d+k)/2} t^{-g} drho`.
pub fn regime2_comparator(phi: &BernsteinFunction, sample: &KernelSample, r: f64, k: u8) -> Result<f64> {
    let d = sample.field.grid.d as f64;
    let lo = 1.0 / phi.phi(r.powi(-2));
    let hi = 2.0 * sample.t.powf(sample.alpha);
    if lo >= hi {
        return Ok(0.0);
    }
    let e = 0.5 * (d + k as f64);
    let mut err = None;
    let (v, _) = adaptive_gk(
        |s: f64| {
            let rho = s.exp();
            match phi.inverse(1.0 / rho) {
                Ok(x) => x.powf(e) * rho,
                Err(e) => {
                    err = Some(e);
                    0.0
                }
            }
        },
        lo.ln(),
        hi.ln(),
        0.0,
        1e-8,
        500,
    )?;
    if let Some(e) = err {
        return Err(e);
    }
    Ok(v * sample.t.powf(-sample.gamma))
}

/// Worst ratio of `|d^k S|` to the small-distance comparator over lattice
/// points with `t^a phi(|x|^-2) >= 1` and `|x| >= 4 cells`.
pub fn verify_regime2_bound(sample: &KernelSample, phi: &BernsteinFunction, k: u8) -> Result<Option<f64>> {
    let g = sample.field.grid;
    let mag = derivative_magnitude(sample, k);
    let ta = sample.t.powf(sample.alpha);
    let r_min = ORIGIN_CELLS * g.spacing();
    let mut best: Option<f64> = None;
    for j in 0..g.n_points() {
        let r = g.radius(j);
        if r < r_min - 1e-12 || ta * phi.phi(r.powi(-2)) < 1.0 {
            continue;
        }
        let c = regime2_comparator(phi, sample, r, k)?;
        if c > 0.0 {
            let v = mag[j] / c;
            best = Some(best.map_or(v, |b: f64| b.max(v)));
        }
    }
    Ok(best)
}

/// Pointwise bound at `grid` and at the (n, L)-doubled grid.
pub fn pointwise_bound_study(
    phi: &BernsteinFunction,
    alpha: f64,
    gamma: f64,
    t: f64,
    grid: &SpaceTimeGrid,
    k: u8,
) -> Result<BoundReport> {
    let s1 = kernel_fourier(phi, alpha, gamma, t, grid)?;
    let s2 = kernel_fourier(phi, alpha, gamma, t, &grid.widened())?;
    let mut r1 = verify_pointwise_bound(&s1, phi, k)?;
    let r2 = verify_pointwise_bound(&s2, phi, k)?;
    r1.refinement_growth = Some(ratio_or_one(r2.constant_hat, r1.constant_hat));
    if matches!(phi.kind(), crate::bernstein::BernsteinKind::Linear) {
        r1.regime2_constant = verify_regime2_bound(&s1, phi, k)?;
    }
    Ok(r1)
}

fn ratio_or_one(a: f64, b: f64) -> f64 {
    if a.abs() < 1e-300 && b.abs() < 1e-300 {
        1.0
    } else {
        a / b
    }
}

fn l1_constant(phi: &BernsteinFunction, alpha: f64, gamma: f64, t_list: &[f64], grid: &SpaceTimeGrid) -> Result<(f64, f64)> {
    let mut best = (0.0_f64, t_list[0]);
    for &t in t_list {
        let s = kernel_fourier(phi, alpha, gamma, t, grid)?;
        let v = s.l1_norm() * t.powf(gamma - alpha);
        if v > best.0 {
            best = (v, t);
        }
    }
    Ok(best)
}

/// `max_t (int |S|) t^{g-a}` at `grid` and at the (n, L)-doubled grid.
pub fn verify_l1_bound(
    phi: &BernsteinFunction,
    alpha: f64,
    gamma: f64,
    t_list: &[f64],
    grid: &SpaceTimeGrid,
) -> Result<BoundReport> {
    if t_list.len() < 2 {
        return domain("need at least two sample times");
    }
    let lo = t_list.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = t_list.iter().cloned().fold(0.0, f64::max);
    if hi / lo < 100.0 - 1e-9 {
        return domain("sample times must span at least two decades");
    }
    let (c1, at) = l1_constant(phi, alpha, gamma, t_list, grid)?;
    let (c2, _) = l1_constant(phi, alpha, gamma, t_list, &grid.widened())?;
    Ok(BoundReport {
        constant_hat: c1,
        argmax: vec![at],
        mirror_ratio: c1,
        refinement_growth: Some(ratio_or_one(c2, c1)),
        regime2_constant: None,
    })
}

/// Time-sampled `S_{a,a,phi}` (the probability kernel) on every node of `grid`
/// after the first, with node 0 left at zero.
pub fn probability_kernel_history(phi: &BernsteinFunction, alpha: f64, grid: &SpaceTimeGrid) -> Result<Field> {
    let mut out = Field::zeros(*grid, FieldDomain::SpaceTime);
    let slices: Vec<Field> = (1..=grid.n_time)
        .into_par_iter()
        .map(|k| kernel_fourier(phi, alpha, alpha, grid.time(k), grid).map(|s| s.field))
        .collect::<Result<Vec<_>>>()?;
    for (k, s) in slices.into_iter().enumerate() {
        out.slice_mut(k + 1).copy_from_slice(&s.values);
    }
    Ok(out)
}

/// Relative L2 distance at the final time between `D_t^{1-a}` of the sampled
/// probability kernel and the Duhamel kernel `S_{a,1,phi}`.
pub fn time_derivative_consistency(phi: &BernsteinFunction, alpha: f64, grid: &SpaceTimeGrid) -> Result<f64> {
    let hist = probability_kernel_history(phi, alpha, grid)?;
    let d = rl_derivative(&hist, 1.0 - alpha)?;
    let target = kernel_fourier(phi, alpha, 1.0, grid.t_final, grid)?;
    relative_l2(&d.time_slice(grid.n_time), &target.field)
}

/// `F(xi) = phi(|xi|^2) E_{a,a}(-phi(|xi|^2))` for a frequency vector.
fn multiplier_symbol(phi: &BernsteinFunction, alpha: f64, xi: &[f64]) -> Result<f64> {
    let r2: f64 = xi.iter().map(|v| v * v).sum();
    let p = phi.phi(r2);
    Ok(p * mittag_leffler_real(alpha, alpha, -p, &Accuracy::default())?)
}

/// Fourth-order central difference stencil for derivative order 0, 1 or 2.
fn stencil(order: usize) -> &'static [(i32, f64)] {
    match order {
        0 => &[(0, 1.0)],
        1 => &[(-2, 1.0 / 12.0), (-1, -8.0 / 12.0), (1, 8.0 / 12.0), (2, -1.0 / 12.0)],
        2 => &[(-2, -1.0 / 12.0), (-1, 16.0 / 12.0), (0, -30.0 / 12.0), (1, 16.0 / 12.0), (2, -1.0 / 12.0)],
        _ => &[(-2, -0.5), (-1, 1.0), (1, -1.0), (2, 0.5)],
    }
}

fn multi_indices(d: usize, max_order: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..d {
        let mut next = Vec::new();
        for v in &out {
            for a in 0..=max_order {
                let mut w = v.clone();
                w.push(a);
                next.push(w);
            }
        }
        out = next;
    }
    out.into_iter().filter(|v| v.iter().sum::<usize>() <= max_order).collect()
}

/// Mixed partial `D^g F(xi)` by tensor-product central differences with step `h`.
fn mixed_partial(phi: &BernsteinFunction, alpha: f64, xi: &[f64], gamma: &[usize], h: f64) -> Result<f64> {
    let d = xi.len();
    let mut acc = 0.0;
    let stencils: Vec<&[(i32, f64)]> = gamma.iter().map(|&o| stencil(o)).collect();
    let mut idx = vec![0usize; d];
    loop {
        let mut w = 1.0;
        let mut p = xi.to_vec();
        for a in 0..d {
            let (off, c) = stencils[a][idx[a]];
            w *= c;
            p[a] += off as f64 * h;
        }
        acc += w * multiplier_symbol(phi, alpha, &p)?;
        let mut a = 0;
        loop {
            if a == d {
                let denom: f64 = gamma.iter().map(|&o| h.powi(o as i32)).product();
                return Ok(acc / denom);
            }
            idx[a] += 1;
            if idx[a] < stencils[a].len() {
                break;
            }
            idx[a] = 0;
            a += 1;
        }
    }
}

/// `K^{-d} sum_{|g| <= ceil(d/2)+1} int_{K/2<|xi|<K} |K^{|g|} D^g F(xi)|^2 dxi`.
pub fn multiplier_sum(phi: &BernsteinFunction, alpha: f64, big_k: f64, d: usize) -> Result<f64> {
    if !(1..=3).contains(&d) {
        return domain(format!("dimension must be 1, 2 or 3, got {d}"));
    }
    if !(big_k > 0.0) {
        return domain(format!("K must be positive, got {big_k}"));
    }
    let max_order = d.div_ceil(2) + 1;
    let gammas = multi_indices(d, max_order);
    let h = big_k * 1e-3;
    let (rx, rw) = gauss_legendre(24);
    let (ax, aw) = gauss_legendre(16);
    // quadrature over the annulus in polar/spherical coordinates
    let mut nodes: Vec<(Vec<f64>, f64)> = Vec::new();
    for (x, w) in rx.iter().zip(&rw) {
        let r = big_k * (0.75 + 0.25 * x);
        let wr = 0.25 * big_k * w;
        match d {
            1 => {
                nodes.push((vec![r], wr));
                nodes.push((vec![-r], wr));
            }
            2 => {
                for (y, v) in ax.iter().zip(&aw) {
                    let th = std::f64::consts::PI * (y + 1.0);
                    nodes.push((vec![r * th.cos(), r * th.sin()], wr * r * std::f64::consts::PI * v));
                }
            }
            _ => {
                for (y, v) in ax.iter().zip(&aw) {
                    let ct = *y;
                    let st = (1.0 - ct * ct).sqrt();
                    for (z, u) in ax.iter().zip(&aw) {
                        let ph = std::f64::consts::PI * (z + 1.0);
                        nodes.push((
                            vec![r * st * ph.cos(), r * st * ph.sin(), r * ct],
                            wr * r * r * v * std::f64::consts::PI * u,
                        ));
                    }
                }
            }
        }
    }
    let terms: Vec<f64> = nodes
        .par_iter()
        .map(|(xi, w)| -> Result<f64> {
            let mut s = 0.0;
            for g in &gammas {
                let order: usize = g.iter().sum();
                let v = big_k.powi(order as i32) * mixed_partial(phi, alpha, xi, g, h)?;
                s += v * v;
            }
            Ok(w * s)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(pairwise_sum(&terms) / big_k.powi(d as i32))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::gamma::rgamma;

    fn grid(n: usize, l: f64) -> SpaceTimeGrid {
        SpaceTimeGrid::new(1, n, l, 1, 1.0).unwrap()
    }

    #[test]
    fn mass_identity_is_exact() {
        let g = grid(128, 10.0);
        let p = BernsteinFunction::power(1.0).unwrap();
        for &(a, t) in &[(0.5, 1.0), (0.3, 0.2), (0.8, 3.0)] {
            let s = kernel_fourier(&p, a, 1.0, t, &g).unwrap();
            let exact = t.powf(a - 1.0) * rgamma(a);
            assert!((s.mass() / exact - 1.0).abs() < 1e-12);
            assert!((s.symbol_at_zero() - exact).abs() < 1e-14 * exact);
        }
        let s = kernel_fourier(&p, 0.5, 1.5, 1.0, &g).unwrap();
        assert!(s.mass().abs() < 1e-14);
    }

    #[test]
    fn kernel_is_even() {
        let g = grid(64, 8.0);
        let s = kernel_fourier(&BernsteinFunction::linear(), 0.5, 1.0, 1.0, &g).unwrap();
        let peak = s.field.max_abs();
        for j in 1..64 {
            assert!((s.field.values[j].re - s.field.values[64 - j].re).abs() < 1e-14 * peak);
        }
    }

    #[test]
    fn subordination_mass_and_symbol() {
        let g = grid(128, 10.0);
        for &a in &[0.3, 0.7] {
            let s = kernel_subordination(&BernsteinFunction::power(0.5).unwrap(), a, 1.0, &g).unwrap();
            assert!((s.mass() - 1.0).abs() < 1e-5);
            let minv = s.field.values.iter().map(|v| v.re).fold(f64::INFINITY, f64::min);
            let peak = s.field.max_abs();
            assert!(minv >= -1e-8 * peak);
        }
    }

    #[test]
    fn near_unit_order_is_the_heat_kernel() {
        let g = grid(256, 16.0);
        let s = kernel_subordination(&BernsteinFunction::linear(), 0.999, 1.0, &g).unwrap();
        let err = (0..g.n_points())
            .map(|j| {
                let x = g.coord(j);
                (s.field.values[j].re - (-x * x / 4.0).exp() / (4.0 * std::f64::consts::PI).sqrt()).abs()
            })
            .fold(0.0, f64::max);
        assert!(err <= 1e-2, "sup error {err}");
    }

    #[test]
    fn rejects_out_of_scope_gamma() {
        let g = grid(16, 4.0);
        assert!(kernel_fourier(&BernsteinFunction::linear(), 0.5, 0.8, 1.0, &g).is_err());
        assert!(kernel_fourier(&BernsteinFunction::linear(), 0.5, 1.0, 0.0, &g).is_err());
    }

    #[test]
    fn alias_flag_on_coarse_lattices() {
        let p = BernsteinFunction::power(0.5).unwrap();
        let coarse = kernel_fourier(&p, 0.5, 1.0, 1.0, &grid(8, 20.0)).unwrap();
        assert!(coarse.alias_warning);
        let heat = kernel_fourier(&BernsteinFunction::linear(), 0.5, 1.0, 1.0, &grid(64, 4.0)).unwrap();
        let _ = heat.alias_warning;
    }

    #[test]
    fn multiplier_indices() {
        assert_eq!(multi_indices(1, 2).len(), 3);
        assert_eq!(multi_indices(2, 2).len(), 6);
        assert_eq!(multi_indices(3, 3).len(), 20);
    }

    #[test]
    fn multiplier_sum_zeroth_term_vanishes_at_small_k() {
        let lin = BernsteinFunction::linear();
        let a = multiplier_sum(&lin, 0.5, 1e-2, 1).unwrap();
        let b = multiplier_sum(&lin, 0.5, 1e-3, 1).unwrap();
        assert!(b < a && b < 1e-8);
    }

    #[test]
    fn mixed_partials_of_a_quadratic() {
        // phi = linear and tiny |xi|: F ~ |xi|^2 / Gamma(a)
        let lin = BernsteinFunction::linear();
        let a = 0.5;
        let xi = [1e-3, 2e-3];
        let d2 = mixed_partial(&lin, a, &xi, &[2, 0], 1e-6).unwrap();
        assert!((d2 - 2.0 * rgamma(a)).abs() < 1e-3);
    }
}
