use tsfe_core::quad::adaptive_gk;
use tsfe_core::specfun::{mittag_leffler_real, Accuracy};

/// `int_0^t s^{a-1} E_{a,a}(-rho s^a) c(t-s) ds` with `s = u^{1/a}`, the scalar
/// Duhamel integral of one Fourier mode.
pub fn duhamel_mode(alpha: f64, rho: f64, t: f64, c: impl Fn(f64) -> f64) -> f64 {
    let acc = Accuracy::default();
    let f = |u: f64| mittag_leffler_real(alpha, alpha, -rho * u, &acc).unwrap() * c(t - u.powf(1.0 / alpha)) / alpha;
    adaptive_gk(f, 0.0, t.powf(alpha), 1e-13, 1e-12, 2000).unwrap().0
}
