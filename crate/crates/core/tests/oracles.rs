//! Frozen high-precision values in `fixtures/scalar_oracles.json`.

use std::collections::BTreeMap;

use tsfe_core::bernstein::BernsteinFunction;
use tsfe_core::specfun::{mittag_leffler_real, ml_symbol, wright_m, Accuracy, WrightQuery};

fn oracles() -> BTreeMap<String, String> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures/scalar_oracles.json");
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn value(key: &str) -> f64 {
    oracles()[key].parse().unwrap()
}

fn close(got: f64, key: &str, tol: f64) {
    let want = value(key);
    assert!((got / want - 1.0).abs() < tol, "{key}: {got} vs {want}");
}

#[test]
fn mittag_leffler_values() {
    let acc = Accuracy::default();
    close(mittag_leffler_real(0.6, 1.0, -2.0, &acc).unwrap(), "ml_0.6_1_m2", 1e-9);
    close(ml_symbol(0.7, 1.0, 1.0, 3.0).unwrap(), "ml_0.7_0.7_m3", 1e-9);
}

#[test]
fn wright_closed_form_at_one_half() {
    close(wright_m(&WrightQuery::new(0.5, 1.0), &Accuracy::default()).unwrap().value, "wright_0.5_1", 1e-10);
}

#[test]
fn power_log_values() {
    let phi = BernsteinFunction::power_log(1.0).unwrap();
    close(phi.phi(1.0), "powerlog_phi_1", 1e-14);
    close(phi.inverse(1.0).unwrap(), "powerlog_inverse_of_1", 1e-10);
    let r = phi.estimate_delta0(1e-3, 1e6, 400).unwrap();
    close(r.delta0_hat, "powerlog_delta0_1e-3_1e6_n400", 1e-8);
}
