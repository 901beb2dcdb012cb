use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use super::{Field, SpaceTimeGrid};
use crate::bernstein::BernsteinFunction;
use crate::error::{domain, Result};

/// Multidimensional DFT over the spatial lattice. The inverse is normalized so
/// that `inverse(forward(f)) = f`.
#[derive(Clone)]
pub struct Dft {
    n: usize,
    d: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Dft {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Dft(n={}, d={})", self.n, self.d)
    }
}

impl Dft {
    pub fn new(grid: &SpaceTimeGrid) -> Self {
        let mut planner = FftPlanner::new();
        Dft {
            n: grid.n,
            d: grid.d,
            fwd: planner.plan_fft_forward(grid.n),
            inv: planner.plan_fft_inverse(grid.n),
        }
    }

    fn run(&self, data: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        let n = self.n;
        let total = n.pow(self.d as u32);
        assert_eq!(data.len(), total, "DFT length mismatch");
        let mut scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
        let mut line = vec![Complex64::new(0.0, 0.0); n];
        for axis in 0..self.d {
            let stride = n.pow((self.d - 1 - axis) as u32);
            if stride == 1 {
                for chunk in data.chunks_mut(n) {
                    plan.process_with_scratch(chunk, &mut scratch);
                }
                continue;
            }
            let block = stride * n;
            for b in (0..total).step_by(block) {
                for off in 0..stride {
                    let base = b + off;
                    for (i, slot) in line.iter_mut().enumerate() {
                        *slot = data[base + i * stride];
                    }
                    plan.process_with_scratch(&mut line, &mut scratch);
                    for (i, v) in line.iter().enumerate() {
                        data[base + i * stride] = *v;
                    }
                }
            }
        }
    }

    pub fn forward(&self, data: &mut [Complex64]) {
        self.run(data, &self.fwd);
    }

    pub fn inverse(&self, data: &mut [Complex64]) {
        self.run(data, &self.inv);
        let scale = 1.0 / data.len() as f64;
        for v in data.iter_mut() {
            *v *= scale;
        }
    }

    /// Forward transform of every slice of a field.
    pub fn forward_field(&self, f: &mut Field) {
        let np = f.grid.n_points();
        f.values.par_chunks_mut(np).for_each(|s| self.forward(s));
    }

    pub fn inverse_field(&self, f: &mut Field) {
        let np = f.grid.n_points();
        f.values.par_chunks_mut(np).for_each(|s| self.inverse(s));
    }
}

/// Multiplies every spatial slice mode-wise by `m(flat frequency index)`.
pub fn apply_multiplier(f: &Field, m: impl Fn(usize) -> Complex64 + Sync) -> Field {
    let dft = Dft::new(&f.grid);
    let symbol: Vec<Complex64> = (0..f.grid.n_points()).map(&m).collect();
    let mut out = f.clone();
    let np = f.grid.n_points();
    out.values.par_chunks_mut(np).for_each(|s| {
        dft.forward(s);
        for (v, m) in s.iter_mut().zip(&symbol) {
            *v *= m;
        }
        dft.inverse(s);
    });
    out
}

/// `phi(Delta) f`, the multiplier `-phi(|xi|^2)`.
pub fn apply_phi_delta(phi: &BernsteinFunction, f: &Field) -> Field {
    let g = f.grid;
    apply_multiplier(f, |k| Complex64::new(-phi.phi(g.xi_sq(k)), 0.0))
}

/// `(I - phi(Delta))^{s/2} f`, the multiplier `(1 + phi(|xi|^2))^{s/2}`.
pub fn apply_bessel(phi: &BernsteinFunction, s: f64, f: &Field) -> Field {
    let g = f.grid;
    apply_multiplier(f, |k| Complex64::new((1.0 + phi.phi(g.xi_sq(k))).powf(0.5 * s), 0.0))
}

/// Spectral partial derivative along `axis`, with the Nyquist mode dropped.
pub fn spectral_derivative(f: &Field, axis: usize) -> Result<Field> {
    let g = f.grid;
    if axis >= g.d {
        return domain(format!("axis {axis} out of range for d={}", g.d));
    }
    Ok(apply_multiplier(f, |k| {
        let idx = g.multi_index(k);
        if idx[axis] == g.n / 2 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(0.0, g.frequency(idx[axis]))
        }
    }))
}
