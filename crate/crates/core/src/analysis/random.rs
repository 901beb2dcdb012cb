//! Seeded random test fields.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::grid::{Field, FieldDomain, SpaceTimeGrid};

/// Seed of trial `i` in a sweep seeded with `seed`.
pub fn trial_seed(seed: u64, i: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(i as u64 + 1)
}

/// `exp(1 - 1/(1-u^2))` on `|u| < 1`, zero outside.
pub fn bump(u: f64) -> f64 {
    if u.abs() < 1.0 {
        (1.0 - 1.0 / (1.0 - u * u)).exp()
    } else {
        0.0
    }
}

/// Smooth step from 0 at `u <= 0` to 1 at `u >= 1`.
pub fn smooth_step(u: f64) -> f64 {
    let f = |v: f64| if v > 0.0 { (-1.0 / v).exp() } else { 0.0 };
    let (a, b) = (f(u), f(1.0 - u));
    if a + b == 0.0 {
        return 0.0;
    }
    a / (a + b)
}

/// Random trigonometric polynomial in space with wavenumbers up to `modes`.
struct SpacePoly {
    terms: Vec<([f64; 3], f64, f64)>,
}

impl SpacePoly {
    fn new(rng: &mut ChaCha8Rng, grid: &SpaceTimeGrid, modes: i64) -> Self {
        let mut terms = Vec::new();
        let span = (2 * modes + 1) as usize;
        for flat in 0..span.pow(grid.d as u32) {
            let mut rem = flat;
            let mut k = [0.0; 3];
            let mut len = 0.0;
            for slot in k.iter_mut().take(grid.d) {
                let kk = (rem % span) as i64 - modes;
                rem /= span;
                *slot = PI * kk as f64 / grid.l;
                len += (kk * kk) as f64;
            }
            let amp = rng.gen_range(-1.0..1.0) / (1.0 + len);
            let phase = rng.gen_range(0.0..2.0 * PI);
            terms.push((k, amp, phase));
        }
        SpacePoly { terms }
    }

    fn eval(&self, x: &[f64; 3]) -> f64 {
        self.terms
            .iter()
            .map(|(k, a, ph)| a * (k[0] * x[0] + k[1] * x[1] + k[2] * x[2] + ph).cos())
            .sum()
    }
}

/// Band-limited source: a random spatial trigonometric polynomial times
/// `sum_m c_m sin(m pi (t - t_start)/(T - t_start))`, which vanishes at `t_start`.
pub fn band_limited_source(grid: &SpaceTimeGrid, seed: u64, space_modes: i64, time_modes: usize) -> Field {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let poly = SpacePoly::new(&mut rng, grid, space_modes);
    let coef: Vec<f64> = (1..=time_modes).map(|m| rng.gen_range(-1.0..1.0) / m as f64).collect();
    let span = grid.t_final - grid.t_start;
    let space: Vec<f64> = (0..grid.n_points()).map(|j| poly.eval(&grid.point(j))).collect();
    let mut values = Vec::with_capacity((grid.n_time + 1) * space.len());
    for k in 0..=grid.n_time {
        let u = (grid.time(k) - grid.t_start) / span;
        let env: f64 = coef.iter().enumerate().map(|(m, c)| c * ((m + 1) as f64 * PI * u).sin()).sum();
        values.extend(space.iter().map(|s| Complex64::new(env * s, 0.0)));
    }
    Field::new(*grid, FieldDomain::SpaceTime, values).expect("finite source")
}

/// Spatial support of a localized source.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpaceSupport {
    /// `|x| < r`.
    Ball(f64),
    /// `r < |x| < R`.
    Shell(f64, f64),
    Whole,
}

/// Time support of a localized source.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeSupport {
    /// `a < t < b`.
    Interval(f64, f64),
    /// `t > a`, switched on smoothly over `ramp`.
    From { start: f64, ramp: f64 },
}

fn space_envelope(s: SpaceSupport, r: f64) -> f64 {
    match s {
        SpaceSupport::Ball(rad) => bump(r / rad),
        SpaceSupport::Shell(r0, r1) => bump((2.0 * r - r0 - r1) / (r1 - r0)),
        SpaceSupport::Whole => 1.0,
    }
}

fn time_envelope(s: TimeSupport, t: f64) -> f64 {
    match s {
        TimeSupport::Interval(a, b) => bump((2.0 * t - a - b) / (b - a)),
        TimeSupport::From { start, ramp } => smooth_step((t - start) / ramp),
    }
}

/// Smooth source with the given support: envelope times `1 + 0.5 g`, where
/// `g` is a random low-order trigonometric polynomial in space and time.
pub fn localized_source(grid: &SpaceTimeGrid, seed: u64, space: SpaceSupport, time: TimeSupport) -> Field {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let poly = SpacePoly::new(&mut rng, grid, 3);
    let span = grid.t_final - grid.t_start;
    let freq: Vec<(f64, f64)> =
        (1..=3).map(|m| (rng.gen_range(-1.0..1.0), m as f64 * PI / span)).collect();
    let phase = rng.gen_range(0.0..2.0 * PI);
    Field::spacetime_from_fn(*grid, |t, x| {
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let env = space_envelope(space, r) * time_envelope(time, t);
        if env == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let wave: f64 = freq.iter().map(|(c, w)| c * (w * t + phase).cos()).sum();
        Complex64::new(env * (1.0 + 0.5 * poly.eval(x) * wave), 0.0)
    })
}
