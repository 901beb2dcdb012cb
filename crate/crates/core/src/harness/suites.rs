use std::f64::consts::{E, PI};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::{ExperimentConfig, SuiteId};
use super::report::{Check, RunReport};
use crate::analysis::verify::{default_norm_grid, NORM_GROWTH, OSCILLATION_GROWTH};
use crate::analysis::{
    verify_oscillation_lemmas, verify_sharp_bound, verify_theorem1, LemmaCase, MixedNormSpec, OscillationOptions,
    RatioStudy, SharpOptions, StudyGrid,
};
use crate::bernstein::{BernsteinFunction, BernsteinKind};
use crate::error::Result;
use crate::grid::SpaceTimeGrid;
use crate::kernel::{
    kernel_fourier, kernel_subordination, multiplier_sum, pointwise_bound_study, relative_l2,
    time_derivative_consistency, verify_l1_bound,
};
use crate::quad::adaptive_gk_semi_infinite;
use crate::specfun::{gamma, mittag_leffler, mittag_leffler_real, ml_symbol, wright_moment, Accuracy, MlQuery, WrightQuery};

/// Refinement growth admitted by each suite unless overridden.
pub fn default_growth(suite: SuiteId) -> f64 {
    match suite {
        SuiteId::Theorem1 => NORM_GROWTH,
        _ => OSCILLATION_GROWTH,
    }
}

/// Relative tolerance of the identity checks unless overridden.
pub const IDENTITY_TOL: f64 = 1e-5;
/// Kernel bound constants must keep their growth in this band.
pub const KERNEL_GROWTH_BAND: (f64, f64) = (0.8, 1.25);
/// Allowed `max/min` of the normalized multiplier sum over the K sweep.
pub const MULTIPLIER_FLATNESS: f64 = 3.0;
/// Stock Bernstein functions and orders of the kernel sweep.
pub const KERNEL_ALPHAS: [f64; 3] = [0.3, 0.5, 0.8];
pub const KERNEL_TIMES: [f64; 3] = [0.5, 1.0, 2.0];

pub fn stock_bernstein() -> Vec<BernsteinKind> {
    vec![BernsteinKind::Linear, BernsteinKind::Power { beta: 0.5 }, BernsteinKind::Power { beta: 1.0 }]
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

/// Tight evaluation used inside finite differences and quadratures.
fn fine_acc() -> Accuracy {
    Accuracy { abs_tol: 1e-13, rel_tol: 1e-11, max_terms: 4000 }
}

fn ml(alpha: f64, beta: f64, x: f64) -> Result<f64> {
    mittag_leffler_real(alpha, beta, x, &fine_acc())
}

/// Fourth-order central difference of `f` at `t` with step `h`.
fn derivative(f: impl Fn(f64) -> Result<f64>, t: f64, h: f64) -> Result<f64> {
    Ok((f(t - 2.0 * h)? - 8.0 * f(t - h)? + 8.0 * f(t + h)? - f(t + 2.0 * h)?) / (12.0 * h))
}

pub fn run_specfun(cfg: &ExperimentConfig, report: &mut RunReport) -> Result<()> {
    let tol = cfg.tolerances.relative.unwrap_or(IDENTITY_TOL);
    let acc = Accuracy::default();
    let e = mittag_leffler(&MlQuery::new(1.0, 1.0, Complex64::new(1.0, 0.0)), &acc)?;
    report.push(Check::at_most("E_{1,1}(1) = e", rel(e.re, E) + e.im.abs(), 1e-10));
    let c = mittag_leffler(&MlQuery::new(2.0, 1.0, Complex64::new(-PI * PI, 0.0)), &acc)?;
    report.push(Check::at_most("E_{2,1}(-pi^2) = -1", (c.re + 1.0).abs() + c.im.abs(), 1e-10));
    for (a, b) in [(0.3, 0.5), (0.6, 1.0), (0.9, 2.5), (1.5, 0.7)] {
        let v = mittag_leffler_real(a, b, 0.0, &acc)?;
        report.push(Check::at_most(format!("E_{{{a},{b}}}(0) = 1/Gamma({b})"), (v * gamma(b) - 1.0).abs(), 1e-12));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut worst = [0.0f64; 2];
    for _ in 0..20 {
        let alpha = rng.gen_range(0.3..0.9);
        let rho = rng.gen_range(0.1..3.0);
        let t = rng.gen_range(0.2..3.0);
        let h = 1e-3 * t;
        // d/dt t^{a-1} E_{a,a}(-rho t^a) = t^{a-2} E_{a,a-1}(-rho t^a)
        let lhs = derivative(|s| Ok(s.powf(alpha - 1.0) * ml(alpha, alpha, -rho * s.powf(alpha))?), t, h)?;
        let rhs = t.powf(alpha - 2.0) * ml(alpha, alpha - 1.0, -rho * t.powf(alpha))?;
        worst[0] = worst[0].max(rel(lhs, rhs));
        // d/dt E_{a,1}(-rho t^a) = -rho t^{a-1} E_{a,a}(-rho t^a)
        let lhs = derivative(|s| ml(alpha, 1.0, -rho * s.powf(alpha)), t, h)?;
        let rhs = -rho * t.powf(alpha - 1.0) * ml(alpha, alpha, -rho * t.powf(alpha))?;
        worst[1] = worst[1].max(rel(lhs, rhs));
    }
    report.push(Check::at_most("derivative identity for t^{a-1} E_{a,a}, 20 points", worst[0], tol));
    report.push(Check::at_most("derivative identity for E_{a,1}, 20 points", worst[1], tol));

    let mut worst = 0.0f64;
    for _ in 0..10 {
        let alpha = rng.gen_range(0.3..0.9);
        let beta = rng.gen_range(0.5..1.5);
        let z: f64 = rng.gen_range(1.0..4.0);
        let rho = rng.gen_range(0.1..0.9) * z.powf(alpha);
        // t = u^{1/beta} absorbs the t^{beta-1} singularity
        let integrand = |u: f64| {
            let t = u.powf(1.0 / beta);
            let w = (-z * t).exp();
            if w == 0.0 {
                return 0.0;
            }
            w * ml(alpha, beta, -rho * t.powf(alpha)).unwrap_or(f64::NAN) / beta
        };
        let (lhs, _) = adaptive_gk_semi_infinite(integrand, 0.0, 1e-14, 1e-10, 4000)?;
        let rhs = z.powf(alpha - beta) / (z.powf(alpha) + rho);
        worst = worst.max(rel(lhs, rhs));
    }
    report.push(Check::at_most("Laplace transform identity, 10 points", worst, tol));

    let mut worst = 0.0f64;
    for alpha in [0.3, 0.5, 0.7] {
        for zeta in [0.0, 0.5, 1.0, 1.5, 2.0, 3.0] {
            let m = wright_moment(alpha, zeta, &acc)?;
            worst = worst.max(rel(m, gamma(1.0 + zeta) / gamma(1.0 + alpha * zeta)));
        }
    }
    report.push(Check::at_most("Wright moments Gamma(1+z)/Gamma(1+a z)", worst, 1e-6));

    let mut monotone = true;
    for alpha in [0.2, 0.5, 0.9] {
        let mut prev = f64::INFINITY;
        for k in 0..=200 {
            let v = mittag_leffler_real(alpha, 1.0, -(0.05 * k as f64).powf(alpha), &acc)?;
            monotone &= v <= prev + acc.abs_tol;
            prev = v;
        }
    }
    report.push(Check::at_least("E_{a,1}(-t^a) nonincreasing", if monotone { 1.0 } else { 0.0 }, 1.0));

    report.constant("ml/E_0.6,1(-2)", mittag_leffler_real(0.6, 1.0, -2.0, &acc)?, "scalar");
    report.constant("ml/symbol(0.7,1,1,3)", ml_symbol(0.7, 1.0, 1.0, 3.0)?, "scalar");
    report.constant("wright/M_0.5(1)", crate::specfun::wright_m(&WrightQuery::new(0.5, 1.0), &acc)?.value, "scalar");
    report.constant("wright/moment(0.4,1.5)", wright_moment(0.4, 1.5, &acc)?, "scalar");
    Ok(())
}

fn kernel_sweep(cfg: &ExperimentConfig) -> Vec<BernsteinKind> {
    cfg.phi.clone().map(|p| vec![p]).unwrap_or_else(stock_bernstein)
}

fn kernel_grid(cfg: &ExperimentConfig) -> Result<SpaceTimeGrid> {
    let g = cfg.grid.unwrap_or(StudyGrid { n: 512, n_time: 256, l: 20.0, t_final: 1.0 });
    SpaceTimeGrid::new(1, g.n, g.l, g.n_time, g.t_final)
}

pub fn run_kernel(cfg: &ExperimentConfig, report: &mut RunReport) -> Result<()> {
    let grid = kernel_grid(cfg)?;
    let label = format!("n={},L={}", grid.n, grid.l);
    let alphas: Vec<f64> = cfg.alpha.map(|a| vec![a]).unwrap_or(KERNEL_ALPHAS.to_vec());
    let times: Vec<f64> = if cfg.times.is_empty() { KERNEL_TIMES.to_vec() } else { cfg.times.clone() };
    let (lo, hi) = match cfg.tolerances.growth {
        Some(g) => (1.0 / g, g),
        None => KERNEL_GROWTH_BAND,
    };
    for kind in kernel_sweep(cfg) {
        let phi = BernsteinFunction::new(kind.clone())?;
        let name = kind.label();
        for &alpha in &alphas {
            let tag = format!("{name}/a={alpha}");
            for &t in &times {
                let tag = format!("{tag}/t={t}");
                let f = kernel_fourier(&phi, alpha, alpha, t, &grid)?;
                let s = kernel_subordination(&phi, alpha, t, &grid)?;
                let d = relative_l2(&f.field, &s.field)?;
                report.push(Check::at_most(format!("route equivalence {tag}"), d, 1e-3));
                report.constant(format!("route/{tag}"), d, label.clone());
                let peak = s.field.values.iter().map(|v| v.re).fold(0.0, f64::max);
                let min = s.field.values.iter().map(|v| v.re).fold(f64::INFINITY, f64::min);
                report.push(Check::at_least(format!("subordination kernel nonnegative {tag}"), min / peak, -1e-8));

                let duhamel = kernel_fourier(&phi, alpha, 1.0, t, &grid)?;
                let exact = t.powf(alpha - 1.0) / gamma(alpha);
                report.push(Check::at_most(format!("mass identity {tag}"), rel(duhamel.mass(), exact), 1e-6));
                for k in [0u8, 1] {
                    let b = pointwise_bound_study(&phi, alpha, 1.0, t, &grid, k)?;
                    let g = b.refinement_growth.unwrap_or(f64::NAN);
                    report.push(Check::within(format!("pointwise bound k={k} growth {tag}"), g, lo, hi));
                    report.constant(format!("pointwise/k={k}/{tag}"), b.constant_hat, label.clone());
                    report.record_growth(format!("pointwise/k={k}/{tag}"), g);
                }
            }
            for gamma_ in [1.0, 1.0 + alpha] {
                let b = verify_l1_bound(&phi, alpha, gamma_, &[0.01, 0.1, 1.0, 10.0], &grid)?;
                let g = b.refinement_growth.unwrap_or(f64::NAN);
                let key = format!("l1/g={gamma_}/{tag}");
                report.push(Check::within(format!("L1 bound growth {key}"), g, lo, hi));
                report.constant(key.clone(), b.constant_hat, label.clone());
                report.record_growth(key, g);
            }
            let dt_grid = SpaceTimeGrid::new(1, 128, grid.l, 256, 1.0)?;
            let c = time_derivative_consistency(&phi, alpha, &dt_grid)?;
            report.push(Check::at_most(format!("time-derivative consistency {tag}"), c, 1e-2));
            let sums: Vec<f64> =
                (-4..=8).map(|j| multiplier_sum(&phi, alpha, 2f64.powi(j), 1)).collect::<Result<_>>()?;
            let max = sums.iter().cloned().fold(0.0, f64::max);
            let min = sums.iter().cloned().fold(f64::INFINITY, f64::min);
            report.push(
                Check::at_most(format!("multiplier sum flatness {tag}"), max / min, MULTIPLIER_FLATNESS)
                    .with_note(format!("max {max:e}, min {min:e}")),
            );
            report.constant(format!("multiplier/K=1/{tag}"), sums[4], "scalar");
        }
    }
    Ok(())
}

fn push_study(report: &mut RunReport, prefix: &str, study: &RatioStudy, bound: f64, grid: &str) {
    for row in &study.rows {
        let key = format!("{prefix}/{}/{}", study.label, row.label);
        let finite = row.coarse.is_finite() && row.fine.is_finite();
        let check = if finite {
            Check::at_most(format!("growth {key}"), row.growth, bound)
        } else {
            Check::failed(format!("growth {key}"), "non-finite ratio")
        };
        report.push(check);
        report.constant(key.clone(), row.coarse, grid);
        report.record_growth(key, row.growth);
    }
    if study.rows.is_empty() {
        report.push(Check::failed(format!("{prefix}/{}", study.label), "no admissible trials"));
    }
}

fn alpha(cfg: &ExperimentConfig) -> f64 {
    cfg.alpha_or(0.5)
}

pub fn run_oscillation(cfg: &ExperimentConfig, report: &mut RunReport) -> Result<()> {
    let phi = cfg.bernstein()?;
    let bound = cfg.tolerances.growth.unwrap_or(OSCILLATION_GROWTH);
    let mut opts = OscillationOptions::default();
    if let Some(g) = cfg.grid {
        opts.n = g.n;
        opts.n_time = g.n_time;
    }
    let grid = format!("n={},nt={}", opts.n, opts.n_time);
    let cases: Vec<LemmaCase> = if cfg.cases.is_empty() { LemmaCase::ALL.to_vec() } else { cfg.cases.clone() };
    let trials = cfg.trials.unwrap_or(10);
    for case in cases {
        let r = verify_oscillation_lemmas(&phi, alpha(cfg), cfg.p0.unwrap_or(2.0), case, trials, cfg.seed, &opts)?;
        let prefix = format!("oscillation/{}", serde_json::to_value(case)?.as_str().unwrap_or("case"));
        for s in &r.studies {
            push_study(report, &prefix, s, bound, &grid);
        }
    }
    Ok(())
}

pub fn run_sharp(cfg: &ExperimentConfig, report: &mut RunReport) -> Result<()> {
    let phi = cfg.bernstein()?;
    let bound = cfg.tolerances.growth.unwrap_or(OSCILLATION_GROWTH);
    let mut opts = SharpOptions::default();
    if let Some(g) = cfg.grid {
        opts.grid = g;
    }
    let grid = format!("n={},nt={}", opts.grid.n, opts.grid.n_time);
    let r = verify_sharp_bound(&phi, alpha(cfg), cfg.p0.unwrap_or(2.0), cfg.trials.unwrap_or(10), cfg.seed, &opts)?;
    for s in &r.studies {
        push_study(report, "sharp", s, bound, &grid);
    }
    Ok(())
}

pub fn norm_label(spec: &MixedNormSpec) -> String {
    format!("p={},q={},mu1={},mu2={}", spec.p, spec.q, spec.mu1.label(), spec.mu2.label())
}

pub fn run_theorem1(cfg: &ExperimentConfig, report: &mut RunReport) -> Result<()> {
    let phi = cfg.bernstein()?;
    let bound = cfg.tolerances.growth.unwrap_or(NORM_GROWTH);
    let grid = cfg.grid.unwrap_or_else(default_norm_grid);
    let glabel = format!("n={},nt={},L={},T={}", grid.n, grid.n_time, grid.l, grid.t_final);
    let norms = if cfg.norms.is_empty() { vec![MixedNormSpec::unweighted(2.0, 2.0)] } else { cfg.norms.clone() };
    for spec in &norms {
        let r = verify_theorem1(&phi, alpha(cfg), spec, cfg.trials.unwrap_or(5), cfg.seed, &grid)?;
        let tag = format!("theorem1/{}", norm_label(spec));
        for row in [&r.c0, &r.c1] {
            let key = format!("{tag}/{}", row.label);
            let ok = row.coarse.is_finite() && row.fine.is_finite() && row.coarse > 0.0;
            let check = if ok {
                Check::at_most(format!("growth {key}"), row.growth, bound)
            } else {
                Check::failed(format!("growth {key}"), "no admissible trials")
            };
            report.push(check);
            report.constant(key.clone(), row.coarse, glabel.clone());
            report.record_growth(key, row.growth);
        }
        report.constant(format!("{tag}/ap_space"), r.ap_space, glabel.clone());
        report.constant(format!("{tag}/ap_time"), r.ap_time, glabel.clone());
    }
    Ok(())
}
