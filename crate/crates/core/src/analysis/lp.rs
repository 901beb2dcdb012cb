use num_complex::Complex64;

use super::norms::weighted_lp;
use super::weights::{Weight, WeightAxis};
use crate::bernstein::BernsteinFunction;
use crate::error::{domain, Result};
use crate::grid::{apply_multiplier, Field, FieldDomain};

/// `exp(-1/u)` for `u > 0`, the flat building block of the cutoff.
fn flat(u: f64) -> f64 {
    if u > 0.0 {
        (-1.0 / u).exp()
    } else {
        0.0
    }
}

/// Low-pass profile: 1 on `[0, 1]`, 0 on `[2, inf)`, smooth in between.
pub fn lp_cutoff(r: f64) -> f64 {
    let a = flat(2.0 - r);
    let b = flat(r - 1.0);
    if a + b == 0.0 {
        return if r <= 1.0 { 1.0 } else { 0.0 };
    }
    a / (a + b)
}

/// Annulus bump `chi(r) - chi(2r)`, supported in `(1/2, 2)`; its dyadic
/// dilates sum to `1 - chi` exactly.
pub fn lp_bump(r: f64) -> f64 {
    lp_cutoff(r) - lp_cutoff(2.0 * r)
}

/// `Delta_j f` for `j >= 1`: the multiplier `bump(2^{-j} |xi|)`.
pub fn lp_block(f: &Field, j: u32) -> Field {
    let g = f.grid;
    let scale = 0.5f64.powi(j as i32);
    apply_multiplier(f, |k| Complex64::new(lp_bump(scale * g.xi_sq(k).sqrt()), 0.0))
}

/// `S f`, the multiplier `chi(|xi|)`.
pub fn lp_low(f: &Field) -> Field {
    let g = f.grid;
    apply_multiplier(f, |k| Complex64::new(lp_cutoff(g.xi_sq(k).sqrt()), 0.0))
}

/// Last block index whose annulus meets the lattice frequencies.
pub fn lp_top_block(f: &Field) -> u32 {
    let g = f.grid;
    let xi_max = (0..g.n_points()).map(|k| g.xi_sq(k)).fold(0.0, f64::max).sqrt();
    let mut j = 1;
    while 2f64.powi(j as i32 - 1) < xi_max {
        j += 1;
    }
    j
}

/// `||S f||_{L_p(mu)} + ||(sum_j phi(4^j)^s |Delta_j f|^2)^{1/2}||_{L_p(mu)}`.
pub fn littlewood_paley_norm(f: &Field, phi: &BernsteinFunction, s: f64, p: f64, mu: &Weight) -> Result<f64> {
    if f.domain != FieldDomain::Space {
        return domain("Littlewood-Paley norms take a space field");
    }
    if !(p > 1.0) || !p.is_finite() {
        return domain(format!("p must lie in (1, inf), got {p}"));
    }
    mu.check_on(&f.grid, WeightAxis::Space)?;
    let low = weighted_lp(&f.grid, &lp_low(f).values, p, Some(mu));
    let mut square = vec![0.0; f.values.len()];
    for j in 1..=lp_top_block(f) {
        let b = lp_block(f, j);
        let w = phi.phi(4f64.powi(j as i32)).powf(s);
        for (acc, v) in square.iter_mut().zip(&b.values) {
            *acc += w * v.norm_sqr();
        }
    }
    let square: Vec<Complex64> = square.into_iter().map(|v| Complex64::new(v.sqrt(), 0.0)).collect();
    Ok(low + weighted_lp(&f.grid, &square, p, Some(mu)))
}
