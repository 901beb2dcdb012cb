use num_complex::Complex64;
use rayon::prelude::*;

use super::{Field, FieldDomain};
use crate::error::{domain, Result};
use crate::specfun::gamma::gamma;

fn check(f: &Field, alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return domain(format!("fractional order must lie in (0,1), got {alpha}"));
    }
    if f.domain != FieldDomain::SpaceTime {
        return domain("time-fractional operators need a spacetime field");
    }
    Ok(())
}

/// L1 weights `b_j = ((j+1)^{1-a} - j^{1-a}) / (Gamma(2-a) dt^a)`.
pub fn caputo_weights(alpha: f64, dt: f64, n: usize) -> Vec<f64> {
    let c = 1.0 / (gamma(2.0 - alpha) * dt.powf(alpha));
    (0..n)
        .map(|j| {
            let j = j as f64;
            c * ((j + 1.0).powf(1.0 - alpha) - j.powf(1.0 - alpha))
        })
        .collect()
}

/// `sum_j w_j g_{idx(j)}` over whole spatial slices.
fn combine(f: &Field, terms: impl Iterator<Item = (usize, f64)>) -> Vec<Complex64> {
    let np = f.grid.n_points();
    let mut acc = vec![Complex64::new(0.0, 0.0); np];
    for (k, w) in terms {
        if w == 0.0 {
            continue;
        }
        for (a, v) in acc.iter_mut().zip(f.slice(k)) {
            *a += w * v;
        }
    }
    acc
}

/// L1 discretization of the Caputo derivative; node 0 is set to zero.
pub fn caputo_l1(f: &Field, alpha: f64) -> Result<Field> {
    check(f, alpha)?;
    let nt = f.grid.n_time;
    let np = f.grid.n_points();
    let b = caputo_weights(alpha, f.grid.dt(), nt);
    let diffs: Vec<Complex64> = (1..=nt)
        .flat_map(|m| f.slice(m).iter().zip(f.slice(m - 1)).map(|(a, c)| a - c).collect::<Vec<_>>())
        .collect();
    let diff_field = |m: usize| &diffs[(m - 1) * np..m * np];
    let slices: Vec<Vec<Complex64>> = (1..=nt)
        .into_par_iter()
        .map(|n| {
            let mut acc = vec![Complex64::new(0.0, 0.0); np];
            for (j, &bj) in b.iter().enumerate().take(n) {
                for (a, v) in acc.iter_mut().zip(diff_field(n - j)) {
                    *a += bj * v;
                }
            }
            acc
        })
        .collect();
    let mut values = vec![Complex64::new(0.0, 0.0); np];
    for s in slices {
        values.extend(s);
    }
    Field::new(f.grid, FieldDomain::SpaceTime, values)
}

/// Product-trapezoidal fractional integral `J^a f`, exact on piecewise-linear data.
pub fn fractional_integral(f: &Field, alpha: f64) -> Result<Field> {
    check(f, alpha)?;
    let nt = f.grid.n_time;
    let np = f.grid.n_points();
    let c = f.grid.dt().powf(alpha) / gamma(alpha + 2.0);
    let p = alpha + 1.0;
    let slices: Vec<Vec<Complex64>> = (1..=nt)
        .into_par_iter()
        .map(|n| {
            let nf = n as f64;
            let a0 = (nf - 1.0).powf(p) - (nf - alpha - 1.0) * nf.powf(alpha);
            let terms = (0..=n).map(|j| {
                let w = if j == 0 {
                    a0
                } else if j == n {
                    1.0
                } else {
                    let m = (n - j) as f64;
                    (m + 1.0).powf(p) - 2.0 * m.powf(p) + (m - 1.0).powf(p)
                };
                (j, c * w)
            });
            combine(f, terms)
        })
        .collect();
    let mut values = Vec::with_capacity((nt + 1) * np);
    values.extend(f.slice(0).iter().map(|_| Complex64::new(0.0, 0.0)));
    for s in slices {
        values.extend(s);
    }
    Field::new(f.grid, FieldDomain::SpaceTime, values)
}

/// Riemann-Liouville derivative `d/dt J^{1-a} f` of order `a`, with the
/// outer derivative taken by second-order finite differences; node 0 is zero.
pub fn rl_derivative(f: &Field, order: f64) -> Result<Field> {
    check(f, order)?;
    let g = fractional_integral(f, 1.0 - order)?;
    let nt = f.grid.n_time;
    let np = f.grid.n_points();
    let dt = f.grid.dt();
    let mut out = Field::zeros(f.grid, FieldDomain::SpaceTime);
    for n in 1..=nt {
        let terms: Vec<(usize, f64)> = if n < nt {
            vec![(n + 1, 0.5 / dt), (n - 1, -0.5 / dt)]
        } else if n >= 2 {
            vec![(n, 1.5 / dt), (n - 1, -2.0 / dt), (n - 2, 0.5 / dt)]
        } else {
            vec![(n, 1.0 / dt), (n - 1, -1.0 / dt)]
        };
        let v = combine(&g, terms.into_iter());
        out.values[n * np..(n + 1) * np].copy_from_slice(&v);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::SpaceTimeGrid;
    use crate::specfun::gamma::gamma;

    fn series(n_time: usize, f: impl Fn(f64) -> f64) -> Field {
        let g = SpaceTimeGrid::new(1, 8, 1.0, n_time, 1.0).unwrap();
        Field::spacetime_from_fn(g, |t, _| Complex64::new(f(t), 0.0))
    }

    fn at_end(f: &Field) -> f64 {
        f.slice(f.grid.n_time)[3].re
    }

    #[test]
    fn caputo_of_constants_and_lines() {
        let a = 0.4;
        let c = caputo_l1(&series(64, |_| 3.0), a).unwrap();
        assert!(c.max_abs() < 1e-13);
        let c = caputo_l1(&series(64, |t| t), a).unwrap();
        for k in 0..=64 {
            let t = k as f64 / 64.0;
            let exact = t.powf(1.0 - a) / gamma(2.0 - a);
            assert!((c.slice(k)[0].re - exact).abs() < 1e-12, "k={k}");
        }
    }

    #[test]
    fn caputo_order_on_powers() {
        for &a in &[0.3, 0.5, 0.7] {
            for k in [2, 3] {
                let kf = k as f64;
                let exact = gamma(kf + 1.0) / gamma(kf + 1.0 - a);
                let errs: Vec<f64> = [64usize, 128, 256]
                    .iter()
                    .map(|&n| (at_end(&caputo_l1(&series(n, |t| t.powi(k)), a).unwrap()) - exact).abs())
                    .collect();
                let order = (errs[1] / errs[2]).log2();
                assert!(order >= 2.0 - a - 0.2, "a={a} k={k}: order {order}");
            }
        }
    }

    #[test]
    fn fractional_integral_of_one_and_semigroup() {
        let a = 0.35;
        let j = fractional_integral(&series(50, |_| 1.0), a).unwrap();
        for k in 0..=50 {
            let t = k as f64 / 50.0;
            assert!((j.slice(k)[2].re - t.powf(a) / gamma(1.0 + a)).abs() < 1e-13);
        }
    }

    #[test]
    fn semigroup_composition_converges() {
        // J^{0.4} 1 = t^{0.4} is not piecewise linear, so the composed rule is
        // only asymptotically equal to J^{0.7}; its error is largest near t=0
        let err = |n: usize| {
            let one = series(n, |_| 1.0);
            let composed = fractional_integral(&fractional_integral(&one, 0.4).unwrap(), 0.3).unwrap();
            let direct = fractional_integral(&one, 0.7).unwrap();
            (composed.max_abs_diff(&direct).unwrap(), (at_end(&composed) - at_end(&direct)).abs())
        };
        let (m1, _) = err(256);
        let (m2, _) = err(512);
        assert!((m1 / m2).log2() > 0.6);
        let (_, end) = err(4096);
        assert!(end < 1e-6, "terminal composition error {end}");
    }

    #[test]
    fn caputo_inverts_the_integral() {
        let a = 0.6;
        let f = series(512, |t| (3.0 * t).sin() * t);
        let back = caputo_l1(&fractional_integral(&f, a).unwrap(), a).unwrap();
        let err = back.max_abs_diff(&f).unwrap();
        assert!(err <= 1e-3, "err {err}");
    }

    #[test]
    fn rl_derivative_of_power() {
        // D^{a} t = t^{1-a} / Gamma(2-a)
        let a = 0.3;
        let f = rl_derivative(&series(400, |t| t), a).unwrap();
        let exact = 1.0 / gamma(2.0 - a);
        assert!((at_end(&f) - exact).abs() < 1e-5);
    }

    #[test]
    fn rejects_space_fields_and_bad_orders() {
        let g = SpaceTimeGrid::new(1, 8, 1.0, 4, 1.0).unwrap();
        let s = Field::zeros(g, FieldDomain::Space);
        assert!(caputo_l1(&s, 0.5).is_err());
        let st = Field::zeros(g, FieldDomain::SpaceTime);
        assert!(caputo_l1(&st, 1.0).is_err());
        assert!(fractional_integral(&st, 0.0).is_err());
    }
}
