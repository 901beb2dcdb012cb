//! Gamma function via the Lanczos approximation (g = 7, nine coefficients),
//! with the reflection formula for arguments below one half.

use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

fn lanczos_sum(z: f64) -> f64 {
    let mut x = LANCZOS_COEF[0];
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        x += c / (z + i as f64);
    }
    x
}

/// `sin(pi x)` with exact zeros at the integers.
pub fn sin_pi(x: f64) -> f64 {
    if x == x.round() {
        return 0.0;
    }
    let r = x.rem_euclid(2.0);
    (PI * r).sin()
}

/// True when `x` is a pole of Gamma (a non-positive integer), up to rounding.
pub fn is_gamma_pole(x: f64) -> bool {
    x <= 0.0 && (x - x.round()).abs() <= 1e-12 * x.abs().max(1.0)
}

pub fn gamma(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if is_gamma_pole(x) {
        return f64::NAN;
    }
    if x < 0.5 {
        PI / (sin_pi(x) * gamma(1.0 - x))
    } else if x > 171.7 {
        f64::INFINITY
    } else {
        let z = x - 1.0;
        let t = z + LANCZOS_G + 0.5;
        // t^(z+1/2) split in two to push the overflow point past 171
        let half = t.powf(0.5 * (z + 0.5));
        (2.0 * PI).sqrt() * half * (half * (-t).exp()) * lanczos_sum(z)
    }
}

/// `ln |Gamma(x)|` together with the sign of `Gamma(x)`.
///
/// At the poles the returned log is `+inf` and the sign is zero.
pub fn ln_gamma_signed(x: f64) -> (f64, f64) {
    if is_gamma_pole(x) {
        return (f64::INFINITY, 0.0);
    }
    if x < 0.5 {
        let s = sin_pi(x);
        let (lg, sg) = ln_gamma_signed(1.0 - x);
        (PI.ln() - s.abs().ln() - lg, s.signum() * sg)
    } else {
        let z = x - 1.0;
        let t = z + LANCZOS_G + 0.5;
        (LN_SQRT_2PI + (z + 0.5) * t.ln() - t + lanczos_sum(z).ln(), 1.0)
    }
}

pub fn ln_gamma(x: f64) -> f64 {
    ln_gamma_signed(x).0
}

/// Reciprocal Gamma, entire: zero at the poles of Gamma.
pub fn rgamma(x: f64) -> f64 {
    if is_gamma_pole(x) {
        return 0.0;
    }
    if (0.5..=171.0).contains(&x) {
        return 1.0 / gamma(x);
    }
    let (lg, sg) = ln_gamma_signed(x);
    sg * (-lg).exp()
}
