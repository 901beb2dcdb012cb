//! Duhamel solver for `d_t^a w = phi(Delta) w + h`, `w(0) = 0`, by product
//! integration in Fourier space, plus the operators `G0` and `G1`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::bernstein::BernsteinFunction;
use crate::error::{domain, Error, Result};
use crate::grid::{apply_phi_delta, caputo_l1, pairwise_sum, Dft, Field, FieldDomain, SpaceTimeGrid};
use crate::specfun::mittag_leffler::mittag_leffler_real;
use crate::specfun::Accuracy;

/// Relative size of `h` on the first time node above which a two-sided input
/// is rejected.
pub const LEFT_EDGE_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct TsfeProblem {
    pub phi: BernsteinFunction,
    pub alpha: f64,
    pub grid: SpaceTimeGrid,
    pub h: Field,
}

impl TsfeProblem {
    pub fn new(phi: BernsteinFunction, alpha: f64, h: Field) -> Result<Self> {
        let p = TsfeProblem { phi, alpha, grid: h.grid, h };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        check_alpha(self.alpha)?;
        self.grid.check_same(&self.h.grid)?;
        if self.h.domain != FieldDomain::SpaceTime {
            return domain("source term must be a spacetime field");
        }
        if self.h.slice(0).iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return domain("source term is not finite at the first time node");
        }
        Ok(())
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return domain(format!("alpha must lie in (0,1), got {alpha}"));
    }
    Ok(())
}

/// `A1(s) = s^a E_{a,a+1}(-rho s^a)`, the antiderivative of the Duhamel kernel
/// `s^{a-1} E_{a,a}(-rho s^a)`, and `A2(s) = s^{a+1} E_{a,a+2}(-rho s^a)`,
/// the antiderivative of `A1`.
fn antiderivatives(alpha: f64, rho: f64, s: f64, acc: &Accuracy) -> Result<(f64, f64)> {
    if s == 0.0 {
        return Ok((0.0, 0.0));
    }
    let sa = s.powf(alpha);
    let a1 = sa * mittag_leffler_real(alpha, alpha + 1.0, -rho * sa, acc)?;
    let a2 = sa * s * mittag_leffler_real(alpha, alpha + 2.0, -rho * sa, acc)?;
    Ok((a1, a2))
}

/// Lag weights for one mode: `far[m]` multiplies `h` at lag `m+1`, `near[m]` at
/// lag `m`, for the interval `s in [m dt, (m+1) dt]` clipped at `window`.
#[derive(Debug, Clone)]
struct LagWeights {
    far: Vec<f64>,
    near: Vec<f64>,
}

fn lag_weights(alpha: f64, rho: f64, dt: f64, n: usize, window: Option<f64>) -> Result<LagWeights> {
    let acc = Accuracy::default();
    let table: Vec<(f64, f64)> =
        (0..=n).map(|m| antiderivatives(alpha, rho, m as f64 * dt, &acc)).collect::<Result<_>>()?;
    let clip = match window {
        Some(t) => Some((t, antiderivatives(alpha, rho, t, &acc)?)),
        None => None,
    };
    let mut far = vec![0.0; n];
    let mut near = vec![0.0; n];
    for m in 0..n {
        let a = m as f64 * dt;
        let c = a + dt;
        let (a1a, a2a) = table[m];
        let (b, a1b, a2b) = match clip {
            Some((t, _)) if t <= a => break,
            Some((t, (a1t, a2t))) if t < c => (t, a1t, a2t),
            _ => (c, table[m + 1].0, table[m + 1].1),
        };
        far[m] = (a1b * (b - a) - (a2b - a2a)) / dt;
        near[m] = (a1b * (c - b) - a1a * dt + (a2b - a2a)) / dt;
    }
    Ok(LagWeights { far, near })
}

/// Mode-wise Volterra convolution `int K(t-tau) h(tau) dtau` over the time
/// nodes of `h`, with `h` piecewise linear between nodes.
fn duhamel(phi: &BernsteinFunction, alpha: f64, h: &Field, window: Option<f64>) -> Result<Field> {
    check_alpha(alpha)?;
    if h.domain != FieldDomain::SpaceTime {
        return domain("source term must be a spacetime field");
    }
    if let Some(t) = window {
        if !(t > 0.0) {
            return domain(format!("window length must be positive, got {t}"));
        }
    }
    let g = h.grid;
    let nt = g.n_time;
    let np = g.n_points();
    let dt = g.dt();

    let dft = Dft::new(&g);
    let mut spec = h.clone();
    dft.forward_field(&mut spec);

    // one weight table per distinct |xi|^2
    let xi: Vec<f64> = (0..np).map(|k| g.xi_sq(k)).collect();
    let mut uniq = xi.clone();
    uniq.sort_by(f64::total_cmp);
    uniq.dedup();
    let tables: Vec<LagWeights> = uniq
        .par_iter()
        .map(|&x| lag_weights(alpha, phi.phi(x), dt, nt, window))
        .collect::<Result<_>>()?;
    let which: Vec<usize> = xi
        .iter()
        .map(|x| uniq.binary_search_by(|u| u.total_cmp(x)).expect("value present"))
        .collect();

    let modes: Vec<Vec<Complex64>> = (0..np)
        .into_par_iter()
        .map(|k| {
            let w = &tables[which[k]];
            let hk: Vec<Complex64> = (0..=nt).map(|n| spec.values[n * np + k]).collect();
            let mut out = vec![Complex64::new(0.0, 0.0); nt + 1];
            for n in 1..=nt {
                let mut acc = Complex64::new(0.0, 0.0);
                for m in 0..n {
                    acc += w.near[m] * hk[n - m] + w.far[m] * hk[n - m - 1];
                }
                out[n] = acc;
            }
            out
        })
        .collect();

    let mut values = vec![Complex64::new(0.0, 0.0); (nt + 1) * np];
    for (k, m) in modes.iter().enumerate() {
        for n in 0..=nt {
            values[n * np + k] = m[n];
        }
    }
    let mut w = Field::new(g, FieldDomain::SpaceTime, values)?;
    dft.inverse_field(&mut w);
    Ok(w)
}

pub fn solve_tsfe(p: &TsfeProblem) -> Result<Field> {
    p.validate()?;
    duhamel(&p.phi, p.alpha, &p.h, None)
}

fn check_left_edge(h: &Field) -> Result<()> {
    let peak = h.max_abs();
    let edge = h.slice(0).iter().map(|v| v.norm()).fold(0.0, f64::max);
    if edge > LEFT_EDGE_TOL * peak {
        return Err(Error::Domain(format!(
            "source must vanish at the left time boundary (|h| = {edge:.3e} there)"
        )));
    }
    Ok(())
}

/// `G0 h(t) = int_{t-T}^{t} S_{a,1}(t-tau) * h(tau) dtau`.
pub fn apply_g0(phi: &BernsteinFunction, alpha: f64, window: f64, h: &Field) -> Result<Field> {
    check_left_edge(h)?;
    duhamel(phi, alpha, h, Some(window))
}

/// `G1 h(t) = int_{-inf}^{t} S_{a,1+a}(t-tau) * h(tau) dtau`, realized as
/// `phi(Delta)` of the unwindowed Duhamel convolution.
pub fn apply_g1(phi: &BernsteinFunction, alpha: f64, h: &Field) -> Result<Field> {
    check_left_edge(h)?;
    Ok(apply_phi_delta(phi, &duhamel(phi, alpha, h, None)?))
}

/// `|| caputo(w) - phi(Delta) w - h || / ||h||` over interior time nodes.
pub fn residual(p: &TsfeProblem, w: &Field) -> Result<f64> {
    p.validate()?;
    w.check_compatible(&p.h)?;
    let r = caputo_l1(w, p.alpha)?;
    let lw = apply_phi_delta(&p.phi, w);
    let np = p.grid.n_points();
    let mut num = Vec::new();
    let mut den = Vec::new();
    for n in 1..p.grid.n_time {
        for j in 0..np {
            let i = n * np + j;
            num.push((r.values[i] - lw.values[i] - p.h.values[i]).norm_sqr());
            den.push(p.h.values[i].norm_sqr());
        }
    }
    let den = pairwise_sum(&den);
    if den == 0.0 {
        return Ok(pairwise_sum(&num).sqrt());
    }
    Ok((pairwise_sum(&num) / den).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::gamma::gamma;

    fn mode_field(g: SpaceTimeGrid, k0: f64, f: impl Fn(f64) -> f64) -> Field {
        Field::spacetime_from_fn(g, |t, x| Complex64::new(0.0, k0 * x[0]).exp() * f(t))
    }

    #[test]
    fn zero_source_gives_zero() {
        let g = SpaceTimeGrid::new(1, 16, 3.0, 8, 1.0).unwrap();
        let p = TsfeProblem::new(BernsteinFunction::linear(), 0.5, Field::zeros(g, FieldDomain::SpaceTime)).unwrap();
        let w = solve_tsfe(&p).unwrap();
        assert_eq!(w.max_abs(), 0.0);
        assert_eq!(residual(&p, &w).unwrap(), 0.0);
    }

    #[test]
    fn constant_source_matches_closed_form() {
        let (a, l) = (0.6, std::f64::consts::PI);
        let g = SpaceTimeGrid::new(1, 16, l, 32, 1.0).unwrap();
        let phi = BernsteinFunction::power(1.2).unwrap();
        let k0 = 2.0 * std::f64::consts::PI / (2.0 * l) * 2.0;
        let p = TsfeProblem::new(phi.clone(), a, mode_field(g, k0, |_| 1.0)).unwrap();
        let w = solve_tsfe(&p).unwrap();
        let rho = phi.phi(k0 * k0);
        let acc = Accuracy::default();
        for n in [1, 7, 32] {
            let t = g.time(n);
            let exact = t.powf(a) * mittag_leffler_real(a, a + 1.0, -rho * t.powf(a), &acc).unwrap();
            for j in 0..16 {
                let e = Complex64::new(0.0, k0 * g.coord(j)).exp() * exact;
                assert!((w.slice(n)[j] - e).norm() < 1e-11, "n={n}");
            }
        }
    }

    #[test]
    fn window_weights_sum_to_kernel_integral() {
        let (a, rho, dt) = (0.4, 2.0, 0.1);
        let acc = Accuracy::default();
        for &t in &[0.35, 0.5, 5.0] {
            let w = lag_weights(a, rho, dt, 20, Some(t)).unwrap();
            let total: f64 = w.far.iter().chain(&w.near).sum();
            let exact = antiderivatives(a, rho, t.min(2.0), &acc).unwrap().0;
            assert!((total - exact).abs() < 1e-13, "T={t}");
        }
    }

    #[test]
    fn g1_without_window_is_phi_delta_of_the_solution() {
        let g = SpaceTimeGrid::new(1, 32, 4.0, 16, 1.0).unwrap();
        let h = Field::spacetime_from_fn(g, |t, x| Complex64::new(t * t * (-x[0] * x[0]).exp(), 0.0));
        let phi = BernsteinFunction::power(0.7).unwrap();
        let p = TsfeProblem::new(phi.clone(), 0.5, h.clone()).unwrap();
        let w = apply_phi_delta(&phi, &solve_tsfe(&p).unwrap());
        let g1 = apply_g1(&phi, 0.5, &h).unwrap();
        assert!(g1.max_abs_diff(&w).unwrap() <= 1e-10 * w.max_abs());
    }

    #[test]
    fn g0_rejects_sources_alive_at_the_left_edge() {
        let g = SpaceTimeGrid::two_sided(1, 8, 1.0, 8, -1.0, 1.0).unwrap();
        let h = Field::spacetime_from_fn(g, |_, _| Complex64::new(1.0, 0.0));
        assert!(apply_g0(&BernsteinFunction::linear(), 0.5, 1.0, &h).is_err());
        assert!(apply_g1(&BernsteinFunction::linear(), 0.5, &h).is_err());
    }

    #[test]
    fn manufactured_linear_solution() {
        let a = 0.5;
        let l = std::f64::consts::PI;
        let g = SpaceTimeGrid::new(1, 16, l, 128, 1.0).unwrap();
        let phi = BernsteinFunction::linear();
        let k0 = 1.0;
        let rho = phi.phi(k0 * k0);
        let h = mode_field(g, k0, |t| t.powf(1.0 - a) / gamma(2.0 - a) + t * rho);
        let p = TsfeProblem::new(phi, a, h).unwrap();
        let w = solve_tsfe(&p).unwrap();
        let exact = mode_field(g, k0, |t| t);
        let err = (0..16).map(|j| (w.slice(128)[j] - exact.slice(128)[j]).norm()).fold(0.0, f64::max);
        assert!(err < 1e-3, "final-time error {err}");
    }
}
