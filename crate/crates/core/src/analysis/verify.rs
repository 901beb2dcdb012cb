//! Empirical ratio studies for the oscillation, sharp-function and
//! maximal-regularity estimates.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::maximal::{hl_maximal, hl_maximal_iterated, sharp_function, CylinderSpec, MaximalMode};
use super::norms::{lp_norm, mixed_norm, MixedNormSpec};
use super::random::{band_limited_source, localized_source, trial_seed, SpaceSupport, TimeSupport};
use super::weights::{ap_characteristic, WeightAxis, WeightSpec};
use crate::bernstein::BernsteinFunction;
use crate::error::{domain, Result};
use crate::grid::{apply_phi_delta, caputo_l1, spectral_derivative, Field, SpaceTimeGrid};
use crate::solver::{apply_g0, apply_g1, solve_tsfe, TsfeProblem};

/// Trials whose denominator falls below this fraction of the source size are skipped.
pub const ZERO_GUARD: f64 = 1e-12;
/// Allowed refinement growth of oscillation and sharp-function ratios.
pub const OSCILLATION_GROWTH: f64 = 1.25;
/// Allowed refinement growth of norm-ratio constants.
pub const NORM_GROWTH: f64 = 1.10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LemmaCase {
    /// Support in `(-3 lambda, 3 lambda) x B_{3 rho}`.
    Local,
    /// Support in `(-3 lambda, inf) x R^d`.
    TimeStrip,
    /// Support in `(-inf, -2 lambda) x B_{3 rho}`.
    PastBall,
    /// Support in `(-inf, -2 lambda) x B_{2 rho}^c`; measured by the two-point difference.
    PastComplement,
}

impl LemmaCase {
    pub const ALL: [LemmaCase; 4] = [LemmaCase::Local, LemmaCase::TimeStrip, LemmaCase::PastBall, LemmaCase::PastComplement];
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Operator {
    /// Duhamel operator with the memory window `T`.
    G0 { window: f64 },
    G1,
}

impl Operator {
    pub fn label(&self) -> String {
        match self {
            Operator::G0 { window } => format!("G0(T={window})"),
            Operator::G1 => "G1".into(),
        }
    }

    pub fn apply(&self, phi: &BernsteinFunction, alpha: f64, h: &Field) -> Result<Field> {
        match self {
            Operator::G0 { window } => apply_g0(phi, alpha, *window, h),
            Operator::G1 => apply_g1(phi, alpha, h),
        }
    }
}

/// Ratio measured on a coarse grid and on its refinement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioRow {
    pub label: String,
    pub coarse: f64,
    pub fine: f64,
    pub growth: f64,
}

impl RatioRow {
    pub fn new(label: impl Into<String>, coarse: f64, fine: f64) -> Self {
        let growth = if coarse == fine { 1.0 } else { fine / coarse };
        RatioRow { label: label.into(), coarse, fine, growth }
    }

    fn ok(&self, bound: f64) -> bool {
        self.coarse.is_finite() && self.fine.is_finite() && self.growth <= bound
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioStudy {
    pub label: String,
    pub rows: Vec<RatioRow>,
    pub max_ratio: f64,
    pub max_growth: f64,
    pub growth_bound: f64,
    pub skipped: usize,
    pub pass: bool,
}

impl RatioStudy {
    pub fn new(label: impl Into<String>, rows: Vec<RatioRow>, growth_bound: f64, skipped: usize) -> Self {
        let max_ratio = rows.iter().map(|r| r.coarse.max(r.fine)).fold(0.0, f64::max);
        let max_growth = rows.iter().map(|r| r.growth).fold(0.0, f64::max);
        let pass = !rows.is_empty() && rows.iter().all(|r| r.ok(growth_bound));
        RatioStudy { label: label.into(), rows, max_ratio, max_growth, growth_bound, skipped, pass }
    }
}

/// Coarse grid of a study; the refined level doubles `n` and `n_time`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyGrid {
    pub n: usize,
    pub n_time: usize,
    pub l: f64,
    pub t_final: f64,
}

impl StudyGrid {
    pub fn levels(&self) -> Result<[SpaceTimeGrid; 2]> {
        let g = SpaceTimeGrid::new(1, self.n, self.l, self.n_time, self.t_final)?;
        if 2 * self.n > 256 || 2 * self.n_time > 256 {
            return domain("analysis grids are capped at n, n_time <= 256 after refinement");
        }
        Ok([g, g.refined()])
    }
}

fn pow_field(f: &Field, p: f64) -> Field {
    f.map(|v| Complex64::new(v.norm().powf(p), 0.0))
}

/// Largest of a per-trial list, ignoring skipped trials.
fn max_of(v: &[Option<f64>]) -> (f64, usize) {
    let skipped = v.iter().filter(|r| r.is_none()).count();
    (v.iter().flatten().copied().fold(0.0, f64::max), skipped)
}

fn collect_trials<T: Send>(trials: usize, f: impl Fn(usize) -> Result<T> + Sync + Send) -> Result<Vec<T>> {
    (0..trials).into_par_iter().map(f).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OscillationOptions {
    pub n: usize,
    pub n_time: usize,
    pub rhos: Vec<f64>,
    /// Memory window of `G0`.
    pub window: f64,
}

impl Default for OscillationOptions {
    fn default() -> Self {
        OscillationOptions { n: 64, n_time: 64, rhos: vec![0.5, 1.0], window: 1.0 }
    }
}

/// Grid around the reference cylinder `Q_rho = (-lambda, 0] x B_rho`: space
/// `[-8 rho, 8 rho)`, time `[-8 lambda, 0]`.
pub fn lemma_geometry(
    phi: &BernsteinFunction,
    alpha: f64,
    rho: f64,
    n: usize,
    n_time: usize,
) -> Result<(SpaceTimeGrid, CylinderSpec)> {
    let q = CylinderSpec::new(phi, alpha, 0.0, vec![n / 2], rho)?;
    let g = SpaceTimeGrid::two_sided(1, n, 8.0 * rho, n_time, -8.0 * q.lambda, 0.0)?;
    Ok((g, q))
}

/// Random smooth source with the support geometry of `case`.
pub fn lemma_source(case: LemmaCase, grid: &SpaceTimeGrid, q: &CylinderSpec, seed: u64) -> Field {
    let (r, lam) = (q.rho, q.lambda);
    let (space, time) = match case {
        LemmaCase::Local => (SpaceSupport::Ball(3.0 * r), TimeSupport::Interval(-3.0 * lam, 3.0 * lam)),
        LemmaCase::TimeStrip => (SpaceSupport::Whole, TimeSupport::From { start: -3.0 * lam, ramp: lam }),
        LemmaCase::PastBall => (SpaceSupport::Ball(3.0 * r), TimeSupport::Interval(-7.5 * lam, -2.0 * lam)),
        LemmaCase::PastComplement => {
            (SpaceSupport::Shell(2.0 * r, grid.l), TimeSupport::Interval(-7.5 * lam, -2.0 * lam))
        }
    };
    localized_source(grid, seed, space, time)
}

/// Left side over right side of one oscillation estimate at the worst point
/// of `Q`, or `None` when the right side vanishes.
pub fn lemma_ratio(
    phi: &BernsteinFunction,
    alpha: f64,
    p: f64,
    case: LemmaCase,
    op: Operator,
    q: &CylinderSpec,
    h: &Field,
) -> Result<Option<f64>> {
    let rule = q.quadrature(&h.grid)?;
    let hp = pow_field(h, p);
    let scale = hp.max_abs();
    if scale == 0.0 {
        return Ok(None);
    }
    let mut rhs = hl_maximal(&hp, MaximalMode::SpacetimeCylinder, phi, alpha)?;
    if case == LemmaCase::PastComplement {
        rhs = rhs.axpy(Complex64::new(1.0, 0.0), &hl_maximal_iterated(&hp)?)?;
    }
    let rhs_min = rule.iter().map(|&(k, j, _)| rhs.slice(k)[j].re).fold(f64::INFINITY, f64::min);
    if !(rhs_min > ZERO_GUARD * scale) {
        return Ok(None);
    }
    let g = op.apply(phi, alpha, h)?;
    let vals: Vec<(Complex64, f64)> = rule.iter().map(|&(k, j, w)| (g.slice(k)[j], w)).collect();
    let lhs: f64 = if case == LemmaCase::PastComplement {
        vals.iter().map(|(a, wa)| wa * vals.iter().map(|(b, wb)| wb * (a - b).norm().powf(p)).sum::<f64>()).sum()
    } else {
        vals.iter().map(|(v, w)| w * v.norm().powf(p)).sum()
    };
    Ok(Some(lhs / rhs_min))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OscillationReport {
    pub case: LemmaCase,
    pub p0: f64,
    pub trials: usize,
    pub seed: u64,
    pub options: OscillationOptions,
    pub studies: Vec<RatioStudy>,
    pub pass: bool,
}

/// Max ratio over trials, the points of `Q_rho` and each `rho`, for `G0` and
/// `G1`, on a grid and its refinement.
pub fn verify_oscillation_lemmas(
    phi: &BernsteinFunction,
    alpha: f64,
    p0: f64,
    case: LemmaCase,
    trials: usize,
    seed: u64,
    opts: &OscillationOptions,
) -> Result<OscillationReport> {
    let ops = [Operator::G0 { window: opts.window }, Operator::G1];
    let mut rows: Vec<Vec<RatioRow>> = vec![Vec::new(); ops.len()];
    let mut skipped = vec![0; ops.len()];
    for &rho in &opts.rhos {
        let mut levels = Vec::new();
        for (n, nt) in [(opts.n, opts.n_time), (2 * opts.n, 2 * opts.n_time)] {
            let (g, q) = lemma_geometry(phi, alpha, rho, n, nt)?;
            let per_trial = collect_trials(trials, |i| {
                let h = lemma_source(case, &g, &q, trial_seed(seed, i));
                ops.iter().map(|&op| lemma_ratio(phi, alpha, p0, case, op, &q, &h)).collect::<Result<Vec<_>>>()
            })?;
            levels.push(per_trial);
        }
        for (o, op) in ops.iter().enumerate() {
            let (c, sc) = max_of(&levels[0].iter().map(|t| t[o]).collect::<Vec<_>>());
            let (f, sf) = max_of(&levels[1].iter().map(|t| t[o]).collect::<Vec<_>>());
            skipped[o] += sc + sf;
            rows[o].push(RatioRow::new(format!("{} rho={rho}", op.label()), c, f));
        }
    }
    let studies: Vec<RatioStudy> = ops
        .iter()
        .zip(rows)
        .zip(skipped)
        .map(|((op, r), s)| RatioStudy::new(op.label(), r, OSCILLATION_GROWTH, s))
        .collect();
    let pass = studies.iter().all(|s| s.pass);
    Ok(OscillationReport { case, p0, trials, seed, options: opts.clone(), studies, pass })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SharpOptions {
    pub grid: StudyGrid,
    /// Windows `T` of the `G0` variant.
    pub windows: Vec<f64>,
}

impl Default for SharpOptions {
    fn default() -> Self {
        SharpOptions { grid: StudyGrid { n: 64, n_time: 64, l: 2.0, t_final: 2.0 }, windows: vec![0.5, 1.0, 2.0] }
    }
}

/// `max_{t,x} (G h)^#(t,x) / ((M_{t,x}|h|^p)^{1/p} + (M_t M_x |h|^p)^{1/p})`.
pub fn sharp_ratio(phi: &BernsteinFunction, alpha: f64, p: f64, op: Operator, h: &Field) -> Result<Option<f64>> {
    let hp = pow_field(h, p);
    let scale = hp.max_abs();
    if scale == 0.0 {
        return Ok(None);
    }
    let m = hl_maximal(&hp, MaximalMode::SpacetimeCylinder, phi, alpha)?;
    let mm = hl_maximal_iterated(&hp)?;
    let sharp = sharp_function(&op.apply(phi, alpha, h)?, phi, alpha)?;
    let mut best: f64 = 0.0;
    for i in 0..hp.values.len() {
        let den = m.values[i].re.powf(1.0 / p) + mm.values[i].re.powf(1.0 / p);
        if den > ZERO_GUARD * scale.powf(1.0 / p) {
            best = best.max(sharp.values[i].re / den);
        }
    }
    Ok(Some(best))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharpReport {
    pub p0: f64,
    pub trials: usize,
    pub seed: u64,
    pub options: SharpOptions,
    pub studies: Vec<RatioStudy>,
    pub pass: bool,
}

/// Sources supported in `(T/8, 5T/8) x B_{L/2}`.
pub fn verify_sharp_bound(
    phi: &BernsteinFunction,
    alpha: f64,
    p0: f64,
    trials: usize,
    seed: u64,
    opts: &SharpOptions,
) -> Result<SharpReport> {
    let levels = opts.grid.levels()?;
    let mut ops = vec![Operator::G1];
    ops.extend(opts.windows.iter().map(|&w| Operator::G0 { window: w }));
    let t = opts.grid.t_final;
    let mut per_level = Vec::new();
    for g in &levels {
        per_level.push(collect_trials(trials, |i| {
            let h = localized_source(
                g,
                trial_seed(seed, i),
                SpaceSupport::Ball(0.5 * g.l),
                TimeSupport::Interval(0.125 * t, 0.625 * t),
            );
            ops.iter().map(|&op| sharp_ratio(phi, alpha, p0, op, &h)).collect::<Result<Vec<_>>>()
        })?);
    }
    let studies: Vec<RatioStudy> = ops
        .iter()
        .enumerate()
        .map(|(o, op)| {
            let (c, sc) = max_of(&per_level[0].iter().map(|r| r[o]).collect::<Vec<_>>());
            let (f, sf) = max_of(&per_level[1].iter().map(|r| r[o]).collect::<Vec<_>>());
            RatioStudy::new(op.label(), vec![RatioRow::new(op.label(), c, f)], OSCILLATION_GROWTH, sc + sf)
        })
        .collect();
    let pass = studies.iter().all(|s| s.pass);
    Ok(SharpReport { p0, trials, seed, options: opts.clone(), studies, pass })
}

/// Default grid of the norm studies: `[-4, 4)`, `[0, 1]`, 64 x 64.
pub fn default_norm_grid() -> StudyGrid {
    StudyGrid { n: 64, n_time: 64, l: 4.0, t_final: 1.0 }
}

fn norm_source(g: &SpaceTimeGrid, seed: u64) -> Field {
    band_limited_source(g, seed, 4, 3)
}

/// `(||phi(Delta) w||, ||d_t^a w|| + ||w|| + ||phi(Delta) w||) / ||h||` for
/// the solution `w` with source `h`, or `None` when `||h||` vanishes.
pub fn theorem1_ratios(phi: &BernsteinFunction, alpha: f64, spec: &MixedNormSpec, h: &Field) -> Result<Option<(f64, f64)>> {
    let params = spec.on(&h.grid)?;
    let hn = mixed_norm(h, &params)?;
    if !(hn > 0.0) {
        return Ok(None);
    }
    let w = solve_tsfe(&TsfeProblem::new(phi.clone(), alpha, h.clone())?)?;
    let lw = mixed_norm(&apply_phi_delta(phi, &w), &params)?;
    let dw = mixed_norm(&caputo_l1(&w, alpha)?, &params)?;
    let ww = mixed_norm(&w, &params)?;
    Ok(Some((lw / hn, (dw + ww + lw) / hn)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theorem1Report {
    pub norm: MixedNormSpec,
    pub trials: usize,
    pub seed: u64,
    pub grid: StudyGrid,
    /// Sampled `[mu1]_p` and `[mu2]_q` on the coarse grid.
    pub ap_space: f64,
    pub ap_time: f64,
    pub c0: RatioRow,
    pub c1: RatioRow,
    pub skipped: usize,
    pub pass: bool,
}

pub fn verify_theorem1(
    phi: &BernsteinFunction,
    alpha: f64,
    spec: &MixedNormSpec,
    trials: usize,
    seed: u64,
    grid: &StudyGrid,
) -> Result<Theorem1Report> {
    let levels = grid.levels()?;
    let ap_space = ap_characteristic(&spec.mu1.build(&levels[0], WeightAxis::Space)?, spec.p, 1)?;
    let ap_time = ap_characteristic(&spec.mu2.build(&levels[0], WeightAxis::Time)?, spec.q, 1)?;
    let mut c0 = [0.0; 2];
    let mut c1 = [0.0; 2];
    let mut skipped = 0;
    for (l, g) in levels.iter().enumerate() {
        let r = collect_trials(trials, |i| theorem1_ratios(phi, alpha, spec, &norm_source(g, trial_seed(seed, i))))?;
        skipped += r.iter().filter(|v| v.is_none()).count();
        for (a, b) in r.into_iter().flatten() {
            c0[l] = f64::max(c0[l], a);
            c1[l] = f64::max(c1[l], b);
        }
    }
    let c0 = RatioRow::new("C0", c0[0], c0[1]);
    let c1 = RatioRow::new("C1", c1[0], c1[1]);
    let pass = c0.ok(NORM_GROWTH) && c1.ok(NORM_GROWTH);
    Ok(Theorem1Report { norm: *spec, trials, seed, grid: *grid, ap_space, ap_time, c0, c1, skipped, pass })
}

/// `||G1 h||_{L_q(L_p)} / ||h||_{L_q(L_p)}` over random band-limited sources.
pub fn verify_g1_mixed_norm(
    phi: &BernsteinFunction,
    alpha: f64,
    norms: &[MixedNormSpec],
    trials: usize,
    seed: u64,
    grid: &StudyGrid,
) -> Result<RatioStudy> {
    let levels = grid.levels()?;
    let mut best = vec![[0.0f64; 2]; norms.len()];
    let mut skipped = 0;
    for (l, g) in levels.iter().enumerate() {
        let params: Vec<_> = norms.iter().map(|s| s.on(g)).collect::<Result<_>>()?;
        let r = collect_trials(trials, |i| {
            let h = norm_source(g, trial_seed(seed, i));
            let gh = apply_g1(phi, alpha, &h)?;
            params
                .iter()
                .map(|pm| {
                    let hn = mixed_norm(&h, pm)?;
                    Ok(if hn > 0.0 { Some(mixed_norm(&gh, pm)? / hn) } else { None })
                })
                .collect::<Result<Vec<_>>>()
        })?;
        for trial in r {
            for (k, v) in trial.into_iter().enumerate() {
                match v {
                    Some(x) => best[k][l] = best[k][l].max(x),
                    None => skipped += 1,
                }
            }
        }
    }
    let rows = norms
        .iter()
        .zip(&best)
        .map(|(s, b)| RatioRow::new(format!("p={}, q={}", s.p, s.q), b[0], b[1]))
        .collect();
    Ok(RatioStudy::new("G1 mixed-norm bound", rows, NORM_GROWTH, skipped))
}

/// `||f|| / ||f^#||` in weighted mixed norms for compactly supported
/// mean-zero fields `f = d_x g`.
pub fn verify_fefferman_stein(
    phi: &BernsteinFunction,
    alpha: f64,
    norms: &[MixedNormSpec],
    trials: usize,
    seed: u64,
    grid: &StudyGrid,
) -> Result<RatioStudy> {
    let levels = grid.levels()?;
    let mut best = vec![[0.0f64; 2]; norms.len()];
    let mut skipped = 0;
    for (l, g) in levels.iter().enumerate() {
        let params: Vec<_> = norms.iter().map(|s| s.on(g)).collect::<Result<_>>()?;
        let t = g.t_final;
        let r = collect_trials(trials, |i| {
            let base = localized_source(
                g,
                trial_seed(seed, i),
                SpaceSupport::Ball(0.5 * g.l),
                TimeSupport::Interval(0.2 * t, 0.8 * t),
            );
            let f = spectral_derivative(&base, 0)?;
            let sharp = sharp_function(&f, phi, alpha)?;
            params
                .iter()
                .map(|pm| {
                    let den = mixed_norm(&sharp, pm)?;
                    let num = mixed_norm(&f, pm)?;
                    Ok(if den > ZERO_GUARD * num.max(f64::MIN_POSITIVE) { Some(num / den) } else { None })
                })
                .collect::<Result<Vec<_>>>()
        })?;
        for trial in r {
            for (k, v) in trial.into_iter().enumerate() {
                match v {
                    Some(x) => best[k][l] = best[k][l].max(x),
                    None => skipped += 1,
                }
            }
        }
    }
    let rows = norms
        .iter()
        .zip(&best)
        .map(|(s, b)| RatioRow::new(format!("p={}, q={}, mu1={}, mu2={}", s.p, s.q, s.mu1.label(), s.mu2.label()), b[0], b[1]))
        .collect();
    Ok(RatioStudy::new("Fefferman-Stein", rows, OSCILLATION_GROWTH, skipped))
}

/// `||M_x f||_{L_p(mu)} / ||f||_{L_p(mu)}` for `mu = |x|^a` over localized
/// spatial fields, on `n` and `2n` points of `[-l, l)`.
pub fn verify_weighted_hl(cases: &[(f64, f64)], trials: usize, seed: u64, n: usize, l: f64) -> Result<RatioStudy> {
    let coarse = SpaceTimeGrid::new(1, n, l, 1, 1.0)?;
    let levels = [coarse, coarse.refined_space()];
    let unused = BernsteinFunction::linear();
    let mut rows = Vec::new();
    let mut skipped = 0;
    for &(p, a) in cases {
        let mut best = [0.0f64; 2];
        for (lv, g) in levels.iter().enumerate() {
            let mu = WeightSpec::Power { exponent: a }.build(g, WeightAxis::Space)?;
            let r = collect_trials(trials, |i| {
                let f = localized_source(
                    g,
                    trial_seed(seed, i),
                    SpaceSupport::Ball(0.5 * l),
                    TimeSupport::Interval(-1.0, 2.0),
                )
                .time_slice(0);
                let mf = hl_maximal(&f, MaximalMode::Space, &unused, 0.5)?;
                let den = lp_norm(&f, p, Some(&mu))?;
                Ok(if den > 0.0 { Some(lp_norm(&mf, p, Some(&mu))? / den) } else { None })
            })?;
            let (m, s) = max_of(&r);
            best[lv] = m;
            skipped += s;
        }
        rows.push(RatioRow::new(format!("p={p}, a={a}"), best[0], best[1]));
    }
    Ok(RatioStudy::new("weighted Hardy-Littlewood", rows, OSCILLATION_GROWTH, skipped))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::FieldDomain;

    #[test]
    fn zero_sources_are_skipped() {
        let phi = BernsteinFunction::power(1.0).unwrap();
        let (g, q) = lemma_geometry(&phi, 0.5, 1.0, 32, 32).unwrap();
        let zero = Field::zeros(g, FieldDomain::SpaceTime);
        for case in LemmaCase::ALL {
            assert_eq!(lemma_ratio(&phi, 0.5, 2.0, case, Operator::G1, &q, &zero).unwrap(), None);
        }
        assert_eq!(sharp_ratio(&phi, 0.5, 2.0, Operator::G1, &zero).unwrap(), None);
        let spec = MixedNormSpec::unweighted(2.0, 2.0);
        let g = SpaceTimeGrid::new(1, 16, 1.0, 8, 1.0).unwrap();
        assert_eq!(theorem1_ratios(&phi, 0.5, &spec, &Field::zeros(g, FieldDomain::SpaceTime)).unwrap(), None);
    }

    #[test]
    fn sources_respect_the_geometry() {
        let phi = BernsteinFunction::linear();
        let (g, q) = lemma_geometry(&phi, 0.5, 1.0, 64, 64).unwrap();
        for case in LemmaCase::ALL {
            let h = lemma_source(case, &g, &q, 3);
            assert!(h.slice(0).iter().all(|v| v.norm() == 0.0), "{case:?}");
            assert!(h.max_abs() > 0.0);
            for k in 0..=64 {
                let t = g.time(k);
                for j in 0..64 {
                    let x = g.point(j)[0].abs();
                    let v = h.slice(k)[j].norm();
                    let outside = match case {
                        LemmaCase::Local => t <= -3.0 || x >= 3.0,
                        LemmaCase::TimeStrip => t <= -3.0,
                        LemmaCase::PastBall => t >= -2.0 || x >= 3.0,
                        LemmaCase::PastComplement => t >= -2.0 || x <= 2.0,
                    };
                    if outside {
                        assert_eq!(v, 0.0, "{case:?} t={t} x={x}");
                    }
                }
            }
        }
    }

    #[test]
    fn ratio_rows() {
        let r = RatioRow::new("a", 2.0, 2.4);
        assert!((r.growth - 1.2).abs() < 1e-15);
        assert!(RatioStudy::new("s", vec![r.clone()], 1.25, 0).pass);
        assert!(!RatioStudy::new("s", vec![r], 1.1, 0).pass);
        assert_eq!(RatioRow::new("z", 0.0, 0.0).growth, 1.0);
        assert!(!RatioStudy::new("s", vec![RatioRow::new("z", 0.0, 1.0)], 1.25, 0).pass);
    }
}
