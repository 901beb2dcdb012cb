//! Bernstein functions `phi(x) = a x + int_0^inf (1 - e^{-t x}) w(t) dt`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::quad::{adaptive_gk, adaptive_gk_semi_infinite};
use crate::specfun::gamma::{gamma, rgamma};

/// Smallest and largest arguments of the working interval used by the inverse.
pub const X_MIN: f64 = 1e-200;
pub const X_MAX: f64 = 1e200;

const SAMPLE_LO: f64 = 1e-8;
const SAMPLE_HI: f64 = 1e8;
const SAMPLE_N: usize = 512;

pub type DensityFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Lévy density `w(t)` of a custom Bernstein function.
#[derive(Clone, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum LevyDensity {
    /// `c t^{-1-s} e^{-lambda t}` with `s` in (0,1).
    TemperedStable { c: f64, s: f64, lambda: f64 },
    #[serde(skip)]
    Function(DensityFn),
}

impl fmt::Debug for LevyDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LevyDensity::TemperedStable { c, s, lambda } => f
                .debug_struct("TemperedStable")
                .field("c", c)
                .field("s", s)
                .field("lambda", lambda)
                .finish(),
            LevyDensity::Function(_) => f.write_str("Function(..)"),
        }
    }
}

impl LevyDensity {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            LevyDensity::TemperedStable { c, s, lambda } => c * t.powf(-1.0 - s) * (-lambda * t).exp(),
            LevyDensity::Function(f) => f(t),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BernsteinKind {
    /// `x^{beta/2}`
    Power { beta: f64 },
    /// `x / ln(1 + x^{beta/2})`
    PowerLog { beta: f64 },
    Linear,
    Custom { drift: f64, levy: LevyDensity },
}

impl BernsteinKind {
    pub fn label(&self) -> String {
        match self {
            BernsteinKind::Power { beta } => format!("power({beta})"),
            BernsteinKind::PowerLog { beta } => format!("powerlog({beta})"),
            BernsteinKind::Linear => "linear".into(),
            BernsteinKind::Custom { drift, levy } => format!("custom(a={drift}, {levy:?})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub delta0_hat: f64,
    pub c1_hat: f64,
    pub pairs_checked: usize,
    /// `(m, M, phi(M)/phi(m))` at the pair attaining the smallest log-slope.
    pub worst_pair: (f64, f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivativeBoundReport {
    /// `max |x^n phi^(n)(x)| / phi(x)` for `n = 1..=n_max`.
    pub max_ratio: Vec<f64>,
    pub argmax: Vec<f64>,
    /// Same maxima on a sample set refined by log-midpoints.
    pub refined_max_ratio: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct BernsteinFunction {
    kind: BernsteinKind,
    delta0: f64,
    c1: f64,
}

pub fn make_bernstein(kind: BernsteinKind) -> Result<BernsteinFunction> {
    BernsteinFunction::new(kind)
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

impl BernsteinFunction {
    pub fn new(kind: BernsteinKind) -> Result<Self> {
        match &kind {
            BernsteinKind::Power { beta } | BernsteinKind::PowerLog { beta } => {
                if !(*beta > 0.0 && *beta < 2.0) {
                    return domain(format!("beta must lie in (0,2), got {beta}"));
                }
            }
            BernsteinKind::Linear => {}
            BernsteinKind::Custom { drift, levy } => {
                if !(*drift >= 0.0) || !drift.is_finite() {
                    return domain(format!("drift must be nonnegative, got {drift}"));
                }
                if let LevyDensity::TemperedStable { c, s, lambda } = levy {
                    if !(*c >= 0.0 && *s > 0.0 && *s < 1.0 && *lambda >= 0.0) {
                        return domain(format!(
                            "tempered-stable density needs c >= 0, s in (0,1), lambda >= 0; got c={c}, s={s}, lambda={lambda}"
                        ));
                    }
                    if *c == 0.0 && *drift == 0.0 {
                        return Err(Error::InvalidBernstein("custom function is identically zero".into()));
                    }
                }
            }
        }
        let mut f = BernsteinFunction { kind, delta0: 1.0, c1: 1.0 };
        f.check_invariants()?;
        let report = f.estimate_delta0(1e-6, 1e6, 64)?;
        f.delta0 = report.delta0_hat.min(1.0);
        f.c1 = report.c1_hat;
        Ok(f)
    }

    pub fn power(beta: f64) -> Result<Self> {
        Self::new(BernsteinKind::Power { beta })
    }

    pub fn power_log(beta: f64) -> Result<Self> {
        Self::new(BernsteinKind::PowerLog { beta })
    }

    pub fn linear() -> Self {
        Self::new(BernsteinKind::Linear).expect("linear function is valid")
    }

    pub fn kind(&self) -> &BernsteinKind {
        &self.kind
    }

    pub fn delta0(&self) -> f64 {
        self.delta0
    }

    pub fn c1(&self) -> f64 {
        self.c1
    }

    pub fn drift(&self) -> f64 {
        match &self.kind {
            BernsteinKind::Linear => 1.0,
            BernsteinKind::Custom { drift, .. } => *drift,
            _ => 0.0,
        }
    }

    fn check_invariants(&self) -> Result<()> {
        let p1 = self.phi(1.0);
        let tiny = self.phi(1e-12);
        if !(tiny.is_finite() && p1.is_finite() && p1 > 0.0) {
            return Err(Error::InvalidBernstein(format!(
                "{}: non-finite or nonpositive values near 0 or at 1",
                self.kind.label()
            )));
        }
        if tiny > 1e-6 * p1 {
            // slowly vanishing functions such as x^{1/4}: require a power-law approach to 0
            let slope = (tiny / self.phi(1e-14)).ln() / 100f64.ln();
            if !(slope >= 0.01) {
                return Err(Error::InvalidBernstein(format!(
                    "{}: phi(0+) does not vanish (phi(1e-12) = {tiny:e}, log-slope {slope:.3e})",
                    self.kind.label()
                )));
            }
        }
        let xs = log_grid(SAMPLE_LO, SAMPLE_HI, SAMPLE_N);
        let vals: Vec<f64> = xs.iter().map(|&x| self.phi(x)).collect();
        for i in 1..xs.len() {
            if vals[i] < vals[i - 1] * (1.0 - 1e-12) {
                return Err(Error::InvalidBernstein(format!(
                    "{}: not nondecreasing between {:e} and {:e}",
                    self.kind.label(),
                    xs[i - 1],
                    xs[i]
                )));
            }
        }
        let slopes: Vec<f64> = (1..xs.len()).map(|i| (vals[i] - vals[i - 1]) / (xs[i] - xs[i - 1])).collect();
        for i in 1..slopes.len() {
            if slopes[i] > slopes[i - 1] * (1.0 + 1e-8) + 1e-300 {
                return Err(Error::InvalidBernstein(format!(
                    "{}: concavity fails near x = {:e}",
                    self.kind.label(),
                    xs[i]
                )));
            }
        }
        Ok(())
    }

    /// `phi(x)` for `x >= 0`.
    pub fn phi(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        match &self.kind {
            BernsteinKind::Power { beta } => x.powf(0.5 * beta),
            BernsteinKind::PowerLog { beta } => {
                let u = x.powf(0.5 * beta);
                if u < 1e-8 {
                    // x / ln(1+u) with ln(1+u) = u (1 - u/2 + u^2/3)
                    x / u / (1.0 - 0.5 * u + u * u / 3.0)
                } else {
                    x / u.ln_1p()
                }
            }
            BernsteinKind::Linear => x,
            BernsteinKind::Custom { drift, levy } => drift * x + self.levy_part(levy, x, 0),
        }
    }

    /// First derivative.
    pub fn d1(&self, x: f64) -> f64 {
        match &self.kind {
            BernsteinKind::Power { beta } => 0.5 * beta * x.powf(0.5 * beta - 1.0),
            BernsteinKind::PowerLog { beta } => {
                let (l, xl1, _) = powerlog_parts(*beta, x);
                (1.0 - xl1 / l) / l
            }
            BernsteinKind::Linear => 1.0,
            BernsteinKind::Custom { drift, levy } => drift + self.levy_part(levy, x, 1),
        }
    }

    /// Second derivative.
    pub fn d2(&self, x: f64) -> f64 {
        match &self.kind {
            BernsteinKind::Power { beta } => {
                let b = 0.5 * beta;
                b * (b - 1.0) * x.powf(b - 2.0)
            }
            BernsteinKind::PowerLog { beta } => {
                let (l, xl1, x2l2) = powerlog_parts(*beta, x);
                (-2.0 * xl1 / l - x2l2 / l + 2.0 * xl1 * xl1 / (l * l)) / (l * x)
            }
            BernsteinKind::Linear => 0.0,
            BernsteinKind::Custom { levy, .. } => self.levy_part(levy, x, 2),
        }
    }

    /// `int (1 - e^{-tx}) w`, `int t e^{-tx} w` or `-int t^2 e^{-tx} w`, in `v = ln t`.
    fn levy_part(&self, levy: &LevyDensity, x: f64, order: u8) -> f64 {
        if let (LevyDensity::TemperedStable { c, s, lambda }, 0) = (levy, order) {
            if *lambda == 0.0 {
                // c Gamma(1-s)/s x^s
                return c * gamma(1.0 - s) / s * x.powf(*s);
            }
        }
        let g = move |v: f64| -> f64 {
            let t = v.exp();
            let w = levy.eval(t) * t;
            let tx = t * x;
            let k = match order {
                0 => -(-tx).exp_m1(),
                1 => t * (-tx).exp(),
                _ => -t * t * (-tx).exp(),
            };
            let val = k * w;
            if val.is_finite() {
                val
            } else {
                0.0
            }
        };
        let v0 = -x.ln();
        let upper = adaptive_gk_semi_infinite(&g, v0, 0.0, 1e-12, 2000);
        let lower = adaptive_gk_semi_infinite(|v| g(-v), -v0, 0.0, 1e-12, 2000);
        match (upper, lower) {
            (Ok((a, _)), Ok((b, _))) => a + b,
            _ => f64::NAN,
        }
    }

    /// Finite-difference derivative (Richardson extrapolated central
    /// differences in log scale), used to cross-check the analytic formulas.
    pub fn numeric_derivative(&self, x: f64, n: u8) -> f64 {
        let f = |h: f64| match n {
            1 => (self.phi(x * (1.0 + h)) - self.phi(x * (1.0 - h))) / (2.0 * x * h),
            _ => (self.phi(x * (1.0 + h)) - 2.0 * self.phi(x) + self.phi(x * (1.0 - h))) / (x * h).powi(2),
        };
        let h = if n == 1 { 1e-3 } else { 1e-2 };
        (4.0 * f(h / 2.0) - f(h)) / 3.0
    }

    pub fn estimate_delta0(&self, x_min: f64, x_max: f64, n: usize) -> Result<ScalingReport> {
        estimate_delta0(self, x_min, x_max, n)
    }

    pub fn inverse(&self, y: f64) -> Result<f64> {
        phi_inverse(self, y)
    }

    pub fn lambda_of_rho(&self, alpha: f64, rho: f64) -> Result<f64> {
        lambda_of_rho(self, alpha, rho)
    }

    pub fn jump_kernel(&self, r: f64, d: usize) -> Result<f64> {
        jump_kernel(self, r, d)
    }

    /// Lévy density if the kind provides one.
    pub fn levy_density(&self, t: f64) -> Option<f64> {
        match &self.kind {
            BernsteinKind::Power { beta } => {
                let s = 0.5 * beta;
                Some(s * rgamma(1.0 - s) * t.powf(-1.0 - s))
            }
            BernsteinKind::Custom { levy, .. } => Some(levy.eval(t)),
            _ => None,
        }
    }

    /// `int_{1/rho}^{R} t^{-1} phi(t^{-2}) dt`.
    pub fn tail_integral(&self, rho: f64, r_upper: f64) -> Result<f64> {
        if !(rho > 0.0 && r_upper > 1.0 / rho) {
            return domain("tail integral needs rho > 0 and R > 1/rho");
        }
        // in v = ln t
        let (val, _) = adaptive_gk(
            |v: f64| self.phi((-2.0 * v).exp()),
            -rho.ln(),
            r_upper.ln(),
            0.0,
            1e-11,
            4000,
        )?;
        Ok(val)
    }
}

/// `(ln(1+u), x L'(x), x^2 L''(x))` with `u = x^{beta/2}`.
fn powerlog_parts(beta: f64, x: f64) -> (f64, f64, f64) {
    let b = 0.5 * beta;
    let u = x.powf(b);
    let l = u.ln_1p();
    let q = u / (1.0 + u);
    (l, b * q, b * (b - 1.0) * q - b * b * q * q)
}

pub fn estimate_delta0(phi: &BernsteinFunction, x_min: f64, x_max: f64, n: usize) -> Result<ScalingReport> {
    if !(x_min > 0.0 && x_min < x_max) {
        return domain(format!("need 0 < x_min < x_max, got [{x_min}, {x_max}]"));
    }
    if n < 32 {
        return domain(format!("need at least 32 sample points, got {n}"));
    }
    let xs = log_grid(x_min, x_max, n);
    let ls: Vec<f64> = xs.iter().map(|&x| phi.phi(x).ln()).collect();
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let mut best = f64::INFINITY;
    let mut worst = (0.0, 0.0, 0.0);
    let mut pairs = 0usize;
    for i in 0..n {
        for j in (i + 1)..n {
            pairs += 1;
            let dl = ls[j] - ls[i];
            let dx = lx[j] - lx[i];
            if dl > dx * (1.0 + 1e-9) + 1e-12 {
                return Err(Error::ScalingViolation(format!(
                    "{}: phi(M)/phi(m) = {:e} exceeds M/m = {:e} at m={:e}, M={:e}",
                    phi.kind.label(),
                    dl.exp(),
                    dx.exp(),
                    xs[i],
                    xs[j]
                )));
            }
            let s = dl / dx;
            if s < best {
                best = s;
                worst = (xs[i], xs[j], dl.exp());
            }
        }
    }
    if !(best > 0.0) {
        return Err(Error::ScalingViolation(format!(
            "{}: lower scaling exponent {best} is not positive",
            phi.kind.label()
        )));
    }
    let mut c1 = f64::INFINITY;
    for i in 0..n {
        for j in (i + 1)..n {
            c1 = c1.min(((ls[j] - ls[i]) - best * (lx[j] - lx[i])).exp());
        }
    }
    Ok(ScalingReport { delta0_hat: best, c1_hat: c1, pairs_checked: pairs, worst_pair: worst })
}

pub fn phi_inverse(phi: &BernsteinFunction, y: f64) -> Result<f64> {
    if !(y > 0.0) || !y.is_finite() {
        return domain(format!("inverse needs a positive argument, got {y}"));
    }
    if let BernsteinKind::Linear = phi.kind {
        return Ok(y);
    }
    let (mut lo, mut hi) = (X_MIN.ln(), X_MAX.ln());
    if phi.phi(X_MAX) < y {
        return Err(Error::Range(format!(
            "{} does not reach {y:e} on the working interval (max {:e})",
            phi.kind.label(),
            phi.phi(X_MAX)
        )));
    }
    if phi.phi(X_MIN) > y {
        return Err(Error::Range(format!(
            "{y:e} lies below phi on the working interval (min {:e})",
            phi.phi(X_MIN)
        )));
    }
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        let v = phi.phi(mid.exp());
        if (v - y).abs() <= 1e-13 * y {
            return Ok(mid.exp());
        }
        if v < y {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-16 * mid.abs().max(1.0) {
            break;
        }
    }
    Ok((0.5 * (lo + hi)).exp())
}

pub fn lambda_of_rho(phi: &BernsteinFunction, alpha: f64, rho: f64) -> Result<f64> {
    if !(rho > 0.0) || !rho.is_finite() {
        return domain(format!("rho must be positive, got {rho}"));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return domain(format!("alpha must lie in (0,1), got {alpha}"));
    }
    Ok(phi.phi(rho.powi(-2)).powf(-1.0 / alpha))
}

/// `j(r) = int (4 pi t)^{-d/2} exp(-r^2 / 4t) w(t) dt`.
pub fn jump_kernel(phi: &BernsteinFunction, r: f64, d: usize) -> Result<f64> {
    if !(r > 0.0) {
        return domain(format!("jump kernel needs r > 0, got {r}"));
    }
    if !matches!(phi.kind, BernsteinKind::Power { .. } | BernsteinKind::Custom { .. }) {
        return Err(Error::Unsupported(format!(
            "{} has no explicit Lévy density",
            phi.kind.label()
        )));
    }
    let half_d = 0.5 * d as f64;
    let g = |v: f64| -> f64 {
        let t = v.exp();
        let w = phi.levy_density(t).unwrap_or(0.0);
        let val = (4.0 * PI * t).powf(-half_d) * (-r * r / (4.0 * t)).exp() * w * t;
        if val.is_finite() {
            val
        } else {
            0.0
        }
    };
    let v0 = (r * r / 4.0).ln();
    let (a, _) = adaptive_gk(g, v0 - 12.0, v0 + 4.0, 0.0, 1e-12, 2000)?;
    let (b, _) = adaptive_gk_semi_infinite(g, v0 + 4.0, 0.0, 1e-12, 2000)?;
    Ok(a + b)
}

pub fn verify_derivative_bound(phi: &BernsteinFunction, n_max: u8, samples: &[f64]) -> Result<DerivativeBoundReport> {
    if !(1..=2).contains(&n_max) {
        return domain(format!("derivative order must be 1 or 2, got {n_max}"));
    }
    if samples.is_empty() || samples.iter().any(|&x| !(x > 0.0)) {
        return domain("samples must be positive and non-empty");
    }
    let ratio = |x: f64, n: u8| -> f64 {
        let d = if n == 1 { phi.d1(x) } else { phi.d2(x) };
        (x.powi(n as i32) * d).abs() / phi.phi(x)
    };
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut refined = sorted.clone();
    for w in sorted.windows(2) {
        refined.push((w[0] * w[1]).sqrt());
    }
    let mut max_ratio = Vec::new();
    let mut argmax = Vec::new();
    let mut refined_max = Vec::new();
    for n in 1..=n_max {
        let (mut m, mut at) = (0.0_f64, sorted[0]);
        for &x in &sorted {
            let r = ratio(x, n);
            if r > m {
                m = r;
                at = x;
            }
        }
        max_ratio.push(m);
        argmax.push(at);
        refined_max.push(refined.iter().map(|&x| ratio(x, n)).fold(0.0, f64::max));
    }
    Ok(DerivativeBoundReport { max_ratio, argmax, refined_max_ratio: refined_max })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tempered() -> BernsteinFunction {
        BernsteinFunction::new(BernsteinKind::Custom {
            drift: 0.5,
            levy: LevyDensity::TemperedStable { c: 1.0, s: 0.6, lambda: 2.0 },
        })
        .unwrap()
    }

    #[test]
    fn built_in_values() {
        assert!((BernsteinFunction::power(1.0).unwrap().phi(4.0) - 2.0).abs() < 1e-15);
        assert_eq!(BernsteinFunction::linear().phi(7.0), 7.0);
        let pl = BernsteinFunction::power_log(1.0).unwrap();
        assert!((pl.phi(1.0) - 1.0 / 2f64.ln()).abs() < 1e-15);
        assert!((pl.phi(1e-20) / 1e-10 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn analytic_derivatives_match_finite_differences() {
        let fns = [
            BernsteinFunction::power(0.7).unwrap(),
            BernsteinFunction::power_log(1.0).unwrap(),
            BernsteinFunction::power_log(1.6).unwrap(),
            tempered(),
        ];
        for f in &fns {
            for &x in &[1e-3, 0.1, 1.0, 3.0, 50.0, 1e4] {
                let (a1, n1) = (f.d1(x), f.numeric_derivative(x, 1));
                assert!((a1 - n1).abs() <= 1e-6 * a1.abs(), "{:?} x={x}: {a1} vs {n1}", f.kind());
                let (a2, n2) = (f.d2(x), f.numeric_derivative(x, 2));
                assert!((a2 - n2).abs() <= 1e-4 * a2.abs(), "{:?} x={x}: {a2} vs {n2}", f.kind());
            }
        }
    }

    #[test]
    fn tempered_stable_matches_closed_form() {
        // int (1 - e^{-tx}) t^{-1-s} e^{-lambda t} dt = Gamma(-s) (lambda^s - (lambda+x)^s)
        let f = tempered();
        for &x in &[1e-4f64, 0.3, 2.0, 1e3] {
            let exact = 0.5 * x + gamma(-0.6) * (2f64.powf(0.6) - (2.0 + x).powf(0.6));
            assert!((f.phi(x) / exact - 1.0).abs() < 1e-9, "x={x}: {} vs {exact}", f.phi(x));
        }
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        assert!(matches!(BernsteinFunction::power(2.0), Err(Error::Domain(_))));
        assert!(matches!(BernsteinFunction::power_log(0.0), Err(Error::Domain(_))));
        let convex = BernsteinFunction::new(BernsteinKind::Custom {
            drift: 0.0,
            levy: LevyDensity::Function(Arc::new(|t: f64| -t.powf(-1.5))),
        });
        assert!(matches!(convex, Err(Error::InvalidBernstein(_))));
    }

    #[test]
    fn scaling_exponents() {
        let r = BernsteinFunction::power(1.0).unwrap().estimate_delta0(1e-4, 1e4, 64).unwrap();
        assert!((r.delta0_hat - 0.5).abs() < 1e-12);
        assert!((r.c1_hat - 1.0).abs() < 1e-9);
        let r = BernsteinFunction::linear().estimate_delta0(1e-4, 1e4, 64).unwrap();
        assert!((r.delta0_hat - 1.0).abs() < 1e-12);
        assert!(matches!(
            BernsteinFunction::linear().estimate_delta0(1.0, 2.0, 8),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn two_sided_scaling_holds_on_every_pair() {
        for f in [BernsteinFunction::power_log(1.0).unwrap(), tempered()] {
            let r = f.estimate_delta0(1e-3, 1e3, 48).unwrap();
            let xs = log_grid(1e-3, 1e3, 48);
            for i in 0..xs.len() {
                for j in i + 1..xs.len() {
                    let ratio = f.phi(xs[j]) / f.phi(xs[i]);
                    let q = xs[j] / xs[i];
                    assert!(r.c1_hat * q.powf(r.delta0_hat) <= ratio * (1.0 + 1e-12));
                    assert!(ratio <= q * (1.0 + 1e-9));
                }
            }
        }
    }

    #[test]
    fn inverse_round_trip() {
        let fns = [
            BernsteinFunction::power(1.0).unwrap(),
            BernsteinFunction::power(0.4).unwrap(),
            BernsteinFunction::power_log(1.0).unwrap(),
            BernsteinFunction::linear(),
        ];
        assert!((fns[0].inverse(3.0).unwrap() - 9.0).abs() < 1e-11);
        assert_eq!(fns[3].inverse(5.0).unwrap(), 5.0);
        for f in &fns {
            for x in log_grid(1e-6, 1e6, 100) {
                let back = f.inverse(f.phi(x)).unwrap();
                assert!((back / x - 1.0).abs() < 1e-10, "{:?} x={x} back={back}", f.kind());
            }
        }
        assert!(matches!(fns[0].inverse(1e150), Err(Error::Range(_))));
    }

    #[test]
    fn lambda_identity_and_monotonicity() {
        let f = BernsteinFunction::linear();
        assert!((f.lambda_of_rho(0.5, 2.0).unwrap() - 16.0).abs() < 1e-12);
        let p = BernsteinFunction::power(1.0).unwrap();
        assert!((p.lambda_of_rho(0.5, 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(p.lambda_of_rho(0.5, 0.0), Err(Error::Domain(_))));
        let mut prev = 0.0;
        for rho in log_grid(1e-3, 1e3, 60) {
            let l = p.lambda_of_rho(0.3, rho).unwrap();
            assert!(l >= prev);
            prev = l;
        }
    }

    #[test]
    fn jump_kernel_homogeneity_and_slope() {
        let p = BernsteinFunction::power(1.0).unwrap();
        for &r in &[0.1, 1.0, 3.0] {
            let ratio = p.jump_kernel(2.0 * r, 1).unwrap() / p.jump_kernel(r, 1).unwrap();
            assert!((ratio - 0.25).abs() < 1e-9, "r={r}: {ratio}");
        }
        let p = BernsteinFunction::power(0.5).unwrap();
        let rs = log_grid(0.1, 10.0, 9);
        let ls: Vec<(f64, f64)> = rs.iter().map(|&r| (r.ln(), p.jump_kernel(r, 1).unwrap().ln())).collect();
        let n = ls.len() as f64;
        let (sx, sy) = ls.iter().fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
        let sxy: f64 = ls.iter().map(|(x, y)| x * y).sum();
        let sxx: f64 = ls.iter().map(|(x, _)| x * x).sum();
        let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        assert!((slope + 1.5).abs() < 1e-3, "slope {slope}");
        assert!(matches!(BernsteinFunction::linear().jump_kernel(1.0, 1), Err(Error::Unsupported(_))));
        let t = tempered();
        let mut prev = f64::INFINITY;
        for r in log_grid(0.05, 20.0, 30) {
            let j = t.jump_kernel(r, 2).unwrap();
            assert!(j <= prev);
            prev = j;
        }
    }

    #[test]
    fn derivative_bound_reports() {
        let s = log_grid(1e-3, 1e3, 200);
        let r = verify_derivative_bound(&BernsteinFunction::linear(), 1, &s).unwrap();
        assert!((r.max_ratio[0] - 1.0).abs() < 1e-15);
        let r = verify_derivative_bound(&BernsteinFunction::power(1.0).unwrap(), 2, &s).unwrap();
        assert!((r.max_ratio[0] - 0.5).abs() < 1e-14);
        assert!((r.max_ratio[1] - 0.25).abs() < 1e-14);
        let r = verify_derivative_bound(&BernsteinFunction::power_log(1.0).unwrap(), 2, &s).unwrap();
        assert!(r.max_ratio.iter().all(|v| v.is_finite()));
        assert!((r.refined_max_ratio[0] / r.max_ratio[0] - 1.0).abs() < 1e-3);
    }

    #[test]
    fn tail_integral_is_bounded() {
        for f in [BernsteinFunction::power(1.0).unwrap(), BernsteinFunction::power_log(1.0).unwrap()] {
            for &rho in &[0.1, 1.0, 10.0] {
                let bound = f.phi(rho * rho) / (2.0 * f.delta0() * f.c1());
                let mut prev = 0.0;
                for &upper in &[10.0, 1e3, 1e6, 1e9] {
                    let r_up = upper / rho;
                    let v = f.tail_integral(rho, r_up).unwrap();
                    assert!(v >= prev);
                    assert!(v <= bound * 1.05, "rho={rho}: {v} vs {bound}");
                    prev = v;
                }
            }
        }
    }
}
