//! Wright function `M_a(theta)`, the density of the inverse `a`-stable
//! subordinator at unit time.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::gamma::{ln_gamma, ln_gamma_signed};
use super::Accuracy;
use crate::error::{domain, Error, Result};
use crate::quad::{adaptive_gk, gk15};

/// Logarithm below which the value is reported as an underflow.
pub const UNDERFLOW_LOG: f64 = -740.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WrightQuery {
    pub alpha: f64,
    pub theta: f64,
}

impl WrightQuery {
    pub fn new(alpha: f64, theta: f64) -> Self {
        WrightQuery { alpha, theta }
    }

    fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return domain(format!("Wright order must lie in (0,1), got {}", self.alpha));
        }
        if !(self.theta >= 0.0) || !self.theta.is_finite() {
            return domain(format!("Wright argument must be finite and nonnegative, got {}", self.theta));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WrightValue {
    pub value: f64,
    pub underflow: bool,
}

fn series_limit(alpha: f64) -> f64 {
    (4.0 * (1.0 - alpha)).min(1.0)
}

pub fn wright_m(q: &WrightQuery, acc: &Accuracy) -> Result<WrightValue> {
    q.validate()?;
    acc.validate()?;
    let WrightQuery { alpha, theta } = *q;
    if theta <= series_limit(alpha) {
        if let Ok(v) = series(alpha, theta, acc) {
            return Ok(WrightValue { value: v.max(0.0), underflow: false });
        }
    }
    integral(alpha, theta, acc)
}

/// Convenience wrapper returning the bare value at default accuracy.
pub fn wright_value(alpha: f64, theta: f64) -> Result<f64> {
    wright_m(&WrightQuery::new(alpha, theta), &Accuracy::default()).map(|w| w.value)
}

/// `sum_k (-theta)^k / (k! Gamma(1 - alpha (k+1)))`.
pub fn series(alpha: f64, theta: f64, acc: &Accuracy) -> Result<f64> {
    if theta == 0.0 {
        return Ok(super::gamma::rgamma(1.0 - alpha));
    }
    let ln_t = theta.ln();
    let mut sum = 0.0;
    let mut max_term = 0.0_f64;
    for k in 0..acc.max_terms {
        let kf = k as f64;
        let (lg, sg) = ln_gamma_signed(1.0 - alpha * (kf + 1.0));
        if sg == 0.0 {
            continue;
        }
        let mag = (kf * ln_t - ln_gamma(kf + 1.0) - lg).exp();
        let sign = if k % 2 == 0 { sg } else { -sg };
        sum += sign * mag;
        max_term = max_term.max(mag);
        let target = acc.abs_tol.max(acc.rel_tol * sum.abs());
        if k > 4 && mag <= 1e-3 * target && kf > theta {
            let est = max_term * f64::EPSILON * (kf + 1.0).sqrt() * 4.0 + 2.0 * mag;
            if est <= target {
                return Ok(sum);
            }
            return Err(Error::NonConvergence(format!(
                "Wright series cancellation at theta={theta}: estimated error {est:.2e}"
            )));
        }
    }
    Err(Error::NonConvergence(format!(
        "Wright series did not converge at theta={theta} in {} terms",
        acc.max_terms
    )))
}

fn ln_sinc(y: f64) -> f64 {
    if y.abs() < 1e-8 {
        -y * y / 6.0
    } else {
        (y.sin() / y).ln()
    }
}

/// `ln A(phi) - ln A(0)` as a function of `phi`, accurate near `phi = 0`.
fn excess_phi(alpha: f64, phi: f64) -> f64 {
    let one_m = 1.0 - alpha;
    (alpha * ln_sinc(alpha * phi) + one_m * ln_sinc(one_m * phi) - ln_sinc(phi)) / one_m
}

/// `ln A` at `phi = pi - psi`, written in `psi` so it stays accurate near `phi = pi`.
fn ln_a_reflected(alpha: f64, psi: f64) -> f64 {
    let one_m = 1.0 - alpha;
    let s_a = (one_m * PI + alpha * psi).sin();
    let s_1m = (one_m * (PI - psi)).sin();
    (alpha * s_a.ln() + one_m * s_1m.ln() - psi.sin().ln()) / one_m
}

/// Breakpoints on `[0, half]` graded geometrically around `peak`.
fn graded_breaks(half: f64, peak: Option<f64>) -> Vec<f64> {
    let mut breaks = vec![0.0, half];
    if let Some(p) = peak {
        breaks.push(p);
        for k in 1..=60 {
            let w = half * 0.5f64.powi(k);
            breaks.push(p - w);
            breaks.push(p + w);
        }
    }
    breaks.retain(|b| (0.0..=half).contains(b));
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    breaks
}

/// Root of a monotone function on `[0, half]` by bisection.
fn bisect(half: f64, increasing: bool, g: impl Fn(f64) -> f64) -> f64 {
    let (mut lo, mut hi) = (0.0, half);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (g(mid) < 0.0) == increasing {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Integral representation
/// `M(theta) = theta^(a/(1-a)) / (pi (1-a)) int_0^pi A(phi) exp(-theta^(1/(1-a)) A(phi)) dphi`.
///
/// The range is split at `pi/2`: the left half is integrated in `phi` with
/// `A - A(0)` formed from its logarithmic excess, the right half in `pi - phi`.
/// The integrand peaks where `A = theta^(-1/(1-a))`, which becomes very narrow
/// as `a -> 1`, so panels are graded around that point.
pub fn integral(alpha: f64, theta: f64, acc: &Accuracy) -> Result<WrightValue> {
    let one_m = 1.0 - alpha;
    if theta == 0.0 {
        return Ok(WrightValue { value: super::gamma::rgamma(one_m), underflow: false });
    }
    let ln_x = theta.ln() / one_m;
    let x = ln_x.exp();
    let ln_a0 = (alpha * alpha.ln() + one_m * one_m.ln()) / one_m;
    let a0 = ln_a0.exp();
    let ln_pre = (alpha / one_m) * theta.ln() - (PI * one_m).ln() - x * a0;
    // A ranges over [a0, inf), so ln(A e^{-x (A - a0)}) is bounded by its value
    // at A = max(a0, 1/x); shifting by that bound keeps the integrand in [0, 1]
    let shift = if -ln_x >= ln_a0 { -ln_x - 1.0 + x * a0 } else { ln_a0 };
    if ln_pre + shift + PI.ln() < UNDERFLOW_LOG {
        return Ok(WrightValue { value: 0.0, underflow: true });
    }
    let from_excess = |e: f64| {
        // x (A - a0), in log space once x itself may underflow
        let xa = if e > 30.0 { (ln_x + ln_a0 + e).exp() } else { x * a0 * e.exp_m1() };
        let v = (ln_a0 + e - xa - shift).exp();
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    let left = |phi: f64| from_excess(excess_phi(alpha, phi));
    let right = |psi: f64| from_excess(ln_a_reflected(alpha, psi) - ln_a0);
    let half = 0.5 * PI;
    let target = -ln_x - ln_a0;
    let (left_peak, right_peak) = if target <= 0.0 {
        (Some(0.0), None)
    } else if target <= excess_phi(alpha, half) {
        (Some(bisect(half, true, |p| excess_phi(alpha, p) - target)), None)
    } else {
        (None, Some(bisect(half, false, |p| ln_a_reflected(alpha, p) - ln_a0 - target)))
    };
    let lb = graded_breaks(half, left_peak);
    let rb = graded_breaks(half, right_peak);
    let rough: f64 = lb.windows(2).map(|w| gk15(&mut &left, w[0], w[1]).0).sum::<f64>()
        + rb.windows(2).map(|w| gk15(&mut &right, w[0], w[1]).0).sum::<f64>();
    let abs_tol = 0.01 * acc.rel_tol * rough / (lb.len() + rb.len()) as f64;
    let mut parts = Vec::with_capacity(lb.len() + rb.len());
    let fail = |e: Error| Error::NonConvergence(format!("Wright integral at theta={theta}: {e}"));
    for w in lb.windows(2) {
        parts.push(adaptive_gk(&left, w[0], w[1], abs_tol, acc.rel_tol * 0.1, 200).map_err(fail)?.0);
    }
    for w in rb.windows(2) {
        parts.push(adaptive_gk(&right, w[0], w[1], abs_tol, acc.rel_tol * 0.1, 200).map_err(fail)?.0);
    }
    parts.sort_by(f64::total_cmp);
    let val: f64 = parts.iter().sum();
    if val <= 0.0 {
        return Ok(WrightValue { value: 0.0, underflow: true });
    }
    let ln_m = ln_pre + shift + val.ln();
    if ln_m < UNDERFLOW_LOG {
        return Ok(WrightValue { value: 0.0, underflow: true });
    }
    Ok(WrightValue { value: ln_m.exp(), underflow: false })
}

/// Point beyond which `M_alpha` is below `exp(UNDERFLOW_LOG)` relative scale
/// for the requested accuracy.
pub fn theta_max(alpha: f64, acc: &Accuracy) -> f64 {
    let one_m = 1.0 - alpha;
    let a0 = ((alpha * alpha.ln() + one_m * one_m.ln()) / one_m).exp();
    // exp(-a0 theta^(1/(1-a))) well below the tolerance, with a polynomial margin
    let target = -(acc.abs_tol.min(acc.rel_tol)).ln() + 40.0;
    (target / a0).powf(one_m)
}

/// `int_0^inf theta^zeta M_alpha(theta) dtheta` by quadrature.
pub fn wright_moment(alpha: f64, zeta: f64, acc: &Accuracy) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return domain(format!("Wright order must lie in (0,1), got {alpha}"));
    }
    if !(zeta > -1.0) {
        return domain(format!("moment exponent must exceed -1, got {zeta}"));
    }
    acc.validate()?;
    let t_max = theta_max(alpha, acc);
    let inv = 1.0 / (1.0 + zeta);
    let v_max = t_max.powf(1.0 + zeta);
    let inner = Accuracy { rel_tol: acc.rel_tol * 0.01, abs_tol: acc.abs_tol * 0.01, ..*acc };
    let f = |v: f64| {
        let theta = v.powf(inv);
        match wright_m(&WrightQuery::new(alpha, theta), &inner) {
            Ok(w) => w.value,
            Err(_) => f64::NAN,
        }
    };
    let (val, est) = adaptive_gk(&f, 0.0, v_max, 0.0, acc.rel_tol * 0.05, 2000)?;
    if !val.is_finite() {
        return Err(Error::NonConvergence(format!(
            "Wright moment integrand failed for alpha={alpha}, zeta={zeta}"
        )));
    }
    let tail = f(v_max) * v_max;
    if tail > acc.rel_tol * val || est > acc.rel_tol * val {
        return Err(Error::NonConvergence(format!(
            "Wright moment tail or quadrature error too large (tail {tail:.2e}, est {est:.2e})"
        )));
    }
    Ok(val * inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::gamma::{gamma, rgamma};

    #[test]
    fn value_at_zero() {
        let v = wright_value(0.3, 0.0).unwrap();
        assert!((v - rgamma(0.7)).abs() < 1e-15);
        assert!((v - 0.770_383_183_866_566).abs() < 1e-12);
    }

    #[test]
    fn half_order_is_a_half_gaussian() {
        let acc = Accuracy::default();
        for &theta in &[0.0f64, 0.3, 1.0, 1.7, 3.0, 6.0, 12.0, 30.0] {
            let exact = (-theta * theta / 4.0).exp() / PI.sqrt();
            let w = wright_m(&WrightQuery::new(0.5, theta), &acc).unwrap();
            assert!(
                (w.value - exact).abs() <= 1e-9 * exact + 1e-300,
                "theta={theta}: {} vs {exact}",
                w.value
            );
            if theta <= 1.0 {
                let s = series(0.5, theta, &acc).unwrap();
                assert!((s - exact).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn series_and_integral_agree_where_both_apply() {
        let acc = Accuracy::default();
        for &alpha in &[0.1, 0.3, 0.6, 0.8, 0.9] {
            for &theta in &[0.2, 0.6, 1.0] {
                let s = series(alpha, theta, &acc).unwrap();
                let i = integral(alpha, theta, &acc).unwrap().value;
                assert!((s - i).abs() <= 1e-9 * s.abs().max(1e-3), "a={alpha} t={theta}: {s} {i}");
            }
        }
    }

    #[test]
    fn far_tail_underflows() {
        let w = wright_m(&WrightQuery::new(0.5, 100.0), &Accuracy::default()).unwrap();
        assert!(w.underflow);
        assert_eq!(w.value, 0.0);
    }

    #[test]
    fn moments() {
        let acc = Accuracy::default();
        for &(alpha, zeta) in &[(0.5, 0.0), (0.5, 2.0), (0.4, 1.5), (0.7, 1.0), (0.2, 3.0), (0.9, 0.5), (0.999, 0.0), (0.999, 1.0)] {
            let m = wright_moment(alpha, zeta, &acc).unwrap();
            let exact = gamma(1.0 + zeta) / gamma(1.0 + alpha * zeta);
            assert!((m / exact - 1.0).abs() < 1e-9, "a={alpha} z={zeta}: {m} vs {exact}");
        }
    }

    #[test]
    fn near_unit_order_against_long_series() {
        // 300-digit partial sums of the defining series
        for &(theta, v) in &[(0.003, 1.006_598_489_634_83e-3), (0.2, 1.562_153_817_887_88e-3), (0.7, 1.099_443_949_433_44e-2)] {
            let m = wright_value(0.999, theta).unwrap();
            assert!((m / v - 1.0).abs() < 1e-9, "theta={theta}: {m}");
        }
    }

    #[test]
    fn rejects_bad_queries() {
        let acc = Accuracy::default();
        assert!(wright_m(&WrightQuery::new(1.0, 0.5), &acc).is_err());
        assert!(wright_m(&WrightQuery::new(0.5, -0.1), &acc).is_err());
        assert!(wright_moment(0.5, -1.0, &acc).is_err());
    }
}
