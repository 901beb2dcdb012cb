use std::collections::VecDeque;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bernstein::BernsteinFunction;
use crate::error::{domain, Result};
use crate::grid::{Field, FieldDomain, SpaceTimeGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaximalMode {
    Space,
    Time,
    SpacetimeCylinder,
}

/// `Q = (t0 - lambda, t0] x B_rho(x0)`, with `lambda = phi(rho^{-2})^{-1/alpha}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CylinderSpec {
    pub t0: f64,
    /// Lattice index of the center, one entry per axis.
    pub x0: Vec<usize>,
    pub rho: f64,
    pub lambda: f64,
}

impl CylinderSpec {
    pub fn new(phi: &BernsteinFunction, alpha: f64, t0: f64, x0: Vec<usize>, rho: f64) -> Result<Self> {
        let lambda = phi.lambda_of_rho(alpha, rho)?;
        Ok(CylinderSpec { t0, x0, rho, lambda })
    }

    /// Averaging rule over the closed cylinder: `(time node, flat lattice
    /// point, weight)` with weights summing to 1. Nodes on the boundary carry
    /// half weight per axis, so the measured extent is exactly `lambda` by `2 rho`.
    pub fn quadrature(&self, grid: &SpaceTimeGrid) -> Result<Vec<(usize, usize, f64)>> {
        if self.x0.len() != grid.d || self.x0.iter().any(|&i| i >= grid.n) {
            return domain(format!("cylinder center {:?} is not a lattice point", self.x0));
        }
        let edge = |dist: f64, radius: f64, step: f64| {
            let tol = 1e-9 * step;
            if dist < radius - tol {
                1.0
            } else if dist <= radius + tol {
                0.5
            } else {
                0.0
            }
        };
        let dt = grid.dt();
        let times: Vec<(usize, f64)> = (0..=grid.n_time)
            .filter_map(|k| {
                let t = grid.time(k);
                if t > self.t0 + 1e-9 * dt {
                    return None;
                }
                let w = if (t - self.t0).abs() <= 1e-9 * dt { 0.5 } else { edge(self.t0 - t, self.lambda, dt) };
                (w > 0.0).then_some((k, w))
            })
            .collect();
        let h = grid.spacing();
        let n = grid.n as i64;
        let points: Vec<(usize, f64)> = (0..grid.n_points())
            .filter_map(|j| {
                let idx = grid.multi_index(j);
                let w: f64 = (0..grid.d)
                    .map(|a| {
                        let raw = (idx[a] as i64 - self.x0[a] as i64).rem_euclid(n);
                        edge(raw.min(n - raw) as f64 * h, self.rho, h)
                    })
                    .product();
                (w > 0.0).then_some((j, w))
            })
            .collect();
        if times.len() < 2 || points.is_empty() {
            return domain("cylinder is not resolved by the grid");
        }
        let mut rule: Vec<(usize, usize, f64)> =
            times.iter().flat_map(|&(k, wt)| points.iter().map(move |&(j, wx)| (k, j, wt * wx))).collect();
        let total: f64 = rule.iter().map(|r| r.2).sum();
        rule.iter_mut().for_each(|r| r.2 /= total);
        Ok(rule)
    }
}

/// Number of time nodes of a cylinder whose cube has `side` cells.
pub fn cylinder_window(phi: &BernsteinFunction, alpha: f64, grid: &SpaceTimeGrid, side: usize) -> Result<usize> {
    let rho = 0.5 * side as f64 * grid.spacing();
    let lambda = phi.lambda_of_rho(alpha, rho)?;
    Ok(((lambda / grid.dt()).round() as usize).max(1))
}

/// Cube sides `2, 4, ..., n` in cells.
pub fn dyadic_ladder(n: usize) -> Vec<usize> {
    std::iter::successors(Some(2usize), |s| Some(s * 2)).take_while(|&s| s <= n).collect()
}

#[derive(Debug, Clone, Copy)]
struct Layout {
    slices: usize,
    n: usize,
    d: usize,
}

impl Layout {
    fn of(f: &Field) -> Self {
        Layout { slices: f.n_slices(), n: f.grid.n, d: f.grid.d }
    }

    fn np(&self) -> usize {
        self.n.pow(self.d as u32)
    }
}

/// Applies `op(line, out)` to every lattice line along `axis` of one slice.
fn along_axis(chunk: &mut [f64], n: usize, d: usize, axis: usize, op: &dyn Fn(&[f64], &mut [f64])) {
    let stride = n.pow((d - 1 - axis) as u32);
    let block = stride * n;
    let mut line = vec![0.0; n];
    let mut out = vec![0.0; n];
    for b in (0..chunk.len()).step_by(block) {
        for off in 0..stride {
            for (i, slot) in line.iter_mut().enumerate() {
                *slot = chunk[b + off + i * stride];
            }
            op(&line, &mut out);
            for (i, v) in out.iter().enumerate() {
                chunk[b + off + i * stride] = *v;
            }
        }
    }
}

/// `out[c] = sum_{i<s} line[(c+i) mod n]`.
fn periodic_window_sum(line: &[f64], s: usize, out: &mut [f64]) {
    let n = line.len();
    let mut acc: f64 = line.iter().take(s).sum();
    for c in 0..n {
        out[c] = acc;
        acc += line[(c + s) % n] - line[c];
    }
}

/// Max over the `w` entries ending at each index, with the window clipped at 0.
fn trailing_max(seq: &[f64], w: usize) -> Vec<f64> {
    let mut dq: VecDeque<usize> = VecDeque::new();
    let mut out = Vec::with_capacity(seq.len());
    for (i, &v) in seq.iter().enumerate() {
        while dq.back().is_some_and(|&j| seq[j] <= v) {
            dq.pop_back();
        }
        dq.push_back(i);
        while dq.front().is_some_and(|&j| j + w <= i) {
            dq.pop_front();
        }
        out.push(seq[dq[0]]);
    }
    out
}

/// `out[x] = max_{c in x-s+1..=x (mod n)} line[c]`.
fn periodic_trailing_max(line: &[f64], s: usize, out: &mut [f64]) {
    let n = line.len();
    if s >= n {
        let m = line.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        out.fill(m);
        return;
    }
    let ext: Vec<f64> = line[n - (s - 1)..].iter().chain(line).copied().collect();
    let m = trailing_max(&ext, s);
    out.copy_from_slice(&m[s - 1..]);
}

/// Box means over `ell` consecutive slices and periodic cubes of side `s`,
/// indexed by first slice and lowest corner.
fn box_means(a: &[f64], lay: Layout, ell: usize, s: usize) -> Vec<f64> {
    let np = lay.np();
    let k_count = lay.slices + 1 - ell;
    let mut sums = vec![0.0; k_count * np];
    for j in 0..np {
        let mut acc: f64 = (0..ell).map(|k| a[k * np + j]).sum();
        for k0 in 0..k_count {
            sums[k0 * np + j] = acc;
            if k0 + ell < lay.slices {
                acc += a[(k0 + ell) * np + j] - a[k0 * np + j];
            }
        }
    }
    let scale = 1.0 / (ell as f64 * (s as f64).powi(lay.d as i32));
    sums.par_chunks_mut(np).for_each(|chunk| {
        for axis in 0..lay.d {
            along_axis(chunk, lay.n, lay.d, axis, &|l, o| periodic_window_sum(l, s, o));
        }
        chunk.iter_mut().for_each(|v| *v *= scale);
    });
    sums
}

/// Sup over anchors whose cylinder (first slice `k0`, corner `c`) contains each node.
fn sup_containing(anchored: Vec<f64>, lay: Layout, ell: usize, s: usize) -> Vec<f64> {
    let np = lay.np();
    let k_count = anchored.len() / np;
    let mut v = anchored;
    v.par_chunks_mut(np).for_each(|chunk| {
        for axis in 0..lay.d {
            along_axis(chunk, lay.n, lay.d, axis, &|l, o| periodic_trailing_max(l, s, o));
        }
    });
    let mut out = vec![0.0; lay.slices * np];
    let mut seq = vec![f64::NEG_INFINITY; lay.slices];
    for j in 0..np {
        for (k0, slot) in seq.iter_mut().enumerate().take(k_count) {
            *slot = v[k0 * np + j];
        }
        for (k, m) in trailing_max(&seq, ell).into_iter().enumerate() {
            out[k * np + j] = m;
        }
    }
    out
}

fn real_field(template: &Field, values: Vec<f64>) -> Field {
    Field {
        grid: template.grid,
        domain: template.domain,
        values: values.into_iter().map(|v| Complex64::new(v, 0.0)).collect(),
    }
}

fn need_spacetime(f: &Field, what: &str) -> Result<()> {
    if f.domain != FieldDomain::SpaceTime {
        return domain(format!("{what} needs a spacetime field"));
    }
    Ok(())
}

fn space_families(lay: Layout) -> Vec<(usize, usize)> {
    (1..=lay.n).map(|s| (1, s)).collect()
}

fn time_families(lay: Layout) -> Vec<(usize, usize)> {
    (1..=lay.slices).map(|ell| (ell, 1)).collect()
}

fn max_over(f: &Field, families: &[(usize, usize)]) -> Field {
    let lay = Layout::of(f);
    let a: Vec<f64> = f.values.iter().map(|v| v.norm()).collect();
    let mut best = a.clone();
    for &(ell, s) in families {
        let m = sup_containing(box_means(&a, lay, ell, s), lay, ell, s);
        best.iter_mut().zip(&m).for_each(|(b, v)| *b = b.max(*v));
    }
    real_field(f, best)
}

/// Uncentered Hardy-Littlewood maximal function of `|f|`, brute force over
/// every lattice cube, time interval or cylinder containing the node.
pub fn hl_maximal(f: &Field, mode: MaximalMode, phi: &BernsteinFunction, alpha: f64) -> Result<Field> {
    let lay = Layout::of(f);
    let families = match mode {
        MaximalMode::Space => space_families(lay),
        MaximalMode::Time => {
            need_spacetime(f, "the time maximal function")?;
            time_families(lay)
        }
        MaximalMode::SpacetimeCylinder => {
            need_spacetime(f, "the cylinder maximal function")?;
            let mut fam = Vec::new();
            for s in 1..=lay.n {
                let ell = cylinder_window(phi, alpha, &f.grid, s)?;
                if ell <= lay.slices {
                    fam.push((ell, s));
                }
            }
            fam
        }
    };
    Ok(max_over(f, &families))
}

/// `M_t M_x f`: the spatial maximal function of each slice, then the time
/// maximal function at each lattice point.
pub fn hl_maximal_iterated(f: &Field) -> Result<Field> {
    need_spacetime(f, "the iterated maximal function")?;
    let lay = Layout::of(f);
    let mx = max_over(f, &space_families(lay));
    Ok(max_over(&mx, &time_families(lay)))
}

/// Mean oscillation over every anchored cylinder of one (ell, s) family.
fn oscillations(f: &Field, lay: Layout, ell: usize, s: usize) -> Vec<f64> {
    let np = lay.np();
    let n = lay.n;
    let d = lay.d;
    let k_count = lay.slices + 1 - ell;
    let offsets: Vec<[usize; 3]> = (0..s.pow(d as u32))
        .map(|mut o| {
            let mut idx = [0; 3];
            for slot in idx.iter_mut().take(d).rev() {
                *slot = o % s;
                o /= s;
            }
            idx
        })
        .collect();
    // a cube spanning the whole period is the same for every corner
    let corners: Vec<usize> = if s == n { vec![0] } else { (0..np).collect() };
    let count = (ell * offsets.len()) as f64;
    let mut out = vec![0.0; k_count * np];
    out.par_chunks_mut(np).enumerate().for_each(|(k0, row)| {
        let mut flat_pts = Vec::with_capacity(offsets.len());
        for &c in &corners {
            let mut ci = [0usize; 3];
            let mut rem = c;
            for a in (0..d).rev() {
                ci[a] = rem % n;
                rem /= n;
            }
            flat_pts.clear();
            flat_pts.extend(offsets.iter().map(|o| (0..d).fold(0, |acc, a| acc * n + (ci[a] + o[a]) % n)));
            let mut mean = Complex64::new(0.0, 0.0);
            for k in k0..k0 + ell {
                let sl = f.slice(k);
                for &p in &flat_pts {
                    mean += sl[p];
                }
            }
            mean /= count;
            let mut osc = 0.0;
            for k in k0..k0 + ell {
                let sl = f.slice(k);
                for &p in &flat_pts {
                    osc += (sl[p] - mean).norm();
                }
            }
            row[c] = osc / count;
        }
        if s == n {
            let v = row[0];
            row.fill(v);
        }
    });
    out
}

/// Sharp function over the dyadic ladder of cube sides.
pub fn sharp_function(f: &Field, phi: &BernsteinFunction, alpha: f64) -> Result<Field> {
    sharp_function_with(f, phi, alpha, &dyadic_ladder(f.grid.n))
}

/// `f^#(t,x) = sup_{Q containing (t,x)} mean_Q |f - f_Q|` over cylinders whose cube
/// side is drawn from `sides`; cylinders longer than the time grid are left out.
pub fn sharp_function_with(f: &Field, phi: &BernsteinFunction, alpha: f64, sides: &[usize]) -> Result<Field> {
    need_spacetime(f, "the sharp function")?;
    let lay = Layout::of(f);
    let mut best = vec![0.0f64; f.values.len()];
    for &s in sides {
        if s == 0 || s > lay.n {
            return domain(format!("cube side {s} outside 1..={}", lay.n));
        }
        let ell = cylinder_window(phi, alpha, &f.grid, s)?;
        if ell > lay.slices {
            continue;
        }
        let m = sup_containing(oscillations(f, lay, ell, s), lay, ell, s);
        best.iter_mut().zip(&m).for_each(|(b, v)| *b = b.max(*v));
    }
    Ok(real_field(f, best))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn st(n: usize, l: f64, nt: usize) -> SpaceTimeGrid {
        SpaceTimeGrid::new(1, n, l, nt, 1.0).unwrap()
    }

    fn real(g: SpaceTimeGrid, f: impl Fn(f64, f64) -> f64) -> Field {
        Field::spacetime_from_fn(g, |t, x| Complex64::new(f(t, x[0]), 0.0))
    }

    #[test]
    fn trailing_windows() {
        let v = [3.0, 1.0, 4.0, 1.0, 5.0, 9.0, 2.0, 6.0];
        assert_eq!(trailing_max(&v, 3), vec![3.0, 3.0, 4.0, 4.0, 5.0, 9.0, 9.0, 9.0]);
        let mut out = [0.0; 8];
        periodic_trailing_max(&v, 3, &mut out);
        assert_eq!(out, [6.0, 6.0, 4.0, 4.0, 5.0, 9.0, 9.0, 9.0]);
        periodic_window_sum(&v, 2, &mut out);
        assert_eq!(out, [4.0, 5.0, 5.0, 6.0, 14.0, 11.0, 8.0, 9.0]);
    }

    #[test]
    fn brute_force_agrees_with_direct_enumeration() {
        let g = st(16, 1.0, 7);
        let f = real(g, |t, x| ((3.0 * x + 5.0 * t).sin() + 0.3 * x).abs());
        let lay = Layout::of(&f);
        let a: Vec<f64> = f.values.iter().map(|v| v.norm()).collect();
        let (ell, s) = (3, 5);
        let got = sup_containing(box_means(&a, lay, ell, s), lay, ell, s);
        let np = 16;
        for k in 0..8usize {
            for x in 0..np {
                let mut best: f64 = f64::NEG_INFINITY;
                for k0 in k.saturating_sub(ell - 1)..=k.min(8 - ell) {
                    for back in 0..s {
                        let c = (x + np - back) % np;
                        let mut sum = 0.0;
                        for kk in k0..k0 + ell {
                            for i in 0..s {
                                sum += a[kk * np + (c + i) % np];
                            }
                        }
                        best = best.max(sum / (ell * s) as f64);
                    }
                }
                assert!((got[k * np + x] - best).abs() < 1e-13, "k={k} x={x}");
            }
        }
    }

    #[test]
    fn constants_are_fixed_points() {
        let g = st(32, 2.0, 16);
        let f = real(g, |_, _| 2.5);
        let phi = BernsteinFunction::linear();
        for mode in [MaximalMode::Space, MaximalMode::Time, MaximalMode::SpacetimeCylinder] {
            let m = hl_maximal(&f, mode, &phi, 0.5).unwrap();
            assert!(m.values.iter().all(|v| (v.re - 2.5).abs() < 1e-13), "{mode:?}");
        }
        let sh = sharp_function(&f, &phi, 0.5).unwrap();
        assert!(sh.max_abs() < 1e-13);
    }

    #[test]
    fn indicator_maximal_at_two() {
        // sup over intervals containing 2 of the mean of 1_[0,1] is 1/2
        for n in [128, 256] {
            let g = st(n, 4.0, 1);
            let h = g.spacing();
            let f = Field::space_from_fn(g, |x| Complex64::new(if x[0] >= 0.0 && x[0] < 1.0 { 1.0 } else { 0.0 }, 0.0));
            let m = hl_maximal(&f, MaximalMode::Space, &BernsteinFunction::linear(), 0.5).unwrap();
            let j = ((2.0 + 4.0) / h).round() as usize;
            assert!((m.values[j].re - 0.5).abs() <= h, "n={n}: {}", m.values[j].re);
        }
    }

    #[test]
    fn maximal_function_dominates_and_is_sublinear() {
        let g = st(32, 1.0, 16);
        let phi = BernsteinFunction::power(1.0).unwrap();
        let f = real(g, |t, x| (4.0 * x).sin() * (1.0 + t));
        let u = real(g, |t, x| (x * x - t).cos());
        let sum = f.axpy(Complex64::new(1.0, 0.0), &u).unwrap();
        let mf = hl_maximal(&f, MaximalMode::SpacetimeCylinder, &phi, 0.6).unwrap();
        let mu = hl_maximal(&u, MaximalMode::SpacetimeCylinder, &phi, 0.6).unwrap();
        let ms = hl_maximal(&sum, MaximalMode::SpacetimeCylinder, &phi, 0.6).unwrap();
        for i in 0..f.values.len() {
            assert!(mf.values[i].re >= f.values[i].norm() - 1e-14);
            assert!(ms.values[i].re <= mf.values[i].re + mu.values[i].re + 1e-12);
        }
        let sh = sharp_function(&f, &phi, 0.6).unwrap();
        for i in 0..f.values.len() {
            assert!(sh.values[i].re <= 2.0 * mf.values[i].re + 1e-12);
        }
    }

    #[test]
    fn affine_oscillation_on_one_cylinder() {
        // mean of |x - mean| over a cube of side s is s h / 4 up to the lattice
        // offset; with s = n the cube is the whole period and every node sees it
        let g = st(64, 1.0, 4);
        let f = real(g, |_, x| x);
        let lay = Layout::of(&f);
        let osc = oscillations(&f, lay, 1, 64);
        assert!((osc[0] - 0.5).abs() < 1e-12, "{}", osc[0]);
        let osc = oscillations(&f, lay, 2, 8);
        let h = g.spacing();
        // corner 28 covers x = -1 + 28h .. -1 + 35h, away from the wrap
        assert!((osc[28] - 2.0 * h).abs() < 1e-12, "{}", osc[28]);
    }

    #[test]
    fn enlarging_the_ladder_never_decreases() {
        let g = st(32, 1.0, 32);
        let phi = BernsteinFunction::power(1.0).unwrap();
        let f = real(g, |t, x| (5.0 * x).sin() * t + x.abs());
        let small = sharp_function_with(&f, &phi, 0.5, &[2, 4]).unwrap();
        let large = sharp_function_with(&f, &phi, 0.5, &[2, 4, 8, 16]).unwrap();
        assert!(small.values.iter().zip(&large.values).all(|(a, b)| b.re >= a.re));
    }

    #[test]
    fn cylinder_nodes_and_windows() {
        let g = SpaceTimeGrid::two_sided(1, 64, 8.0, 64, -8.0, 0.0).unwrap();
        let phi = BernsteinFunction::linear();
        let q = CylinderSpec::new(&phi, 0.5, 0.0, vec![32], 1.0).unwrap();
        assert!((q.lambda - 1.0).abs() < 1e-12);
        let rule = q.quadrature(&g).unwrap();
        // 9 time nodes on [-1, 0] by 9 points on [-1, 1], halved at the ends
        assert_eq!(rule.len(), 81);
        assert!((rule.iter().map(|r| r.2).sum::<f64>() - 1.0).abs() < 1e-14);
        let corner = rule.iter().find(|r| r.0 == 56 && r.1 == 28).unwrap().2;
        let inner = rule.iter().find(|r| r.0 == 60 && r.1 == 32).unwrap().2;
        assert!((inner / corner - 4.0).abs() < 1e-12);
        assert_eq!(cylinder_window(&phi, 0.5, &g, 8).unwrap(), 8);
        assert_eq!(dyadic_ladder(16), vec![2, 4, 8, 16]);
        let s = Field::zeros(g, FieldDomain::Space);
        assert!(hl_maximal(&s, MaximalMode::Time, &phi, 0.5).is_err());
    }
}
