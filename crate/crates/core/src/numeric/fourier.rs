//! Scaled discrete Fourier sums evaluated with Bluestein's chirp-z algorithm.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::grid::GridFunction;
use crate::symplectic::IndexSet;

/// Plan for `out_m = Σ_k in_k · exp(2πi·σ·(s0 + m·ds)(t0 + k·dt))`, `σ = ±1`,
/// with `ds·dt` fixed at construction and the offsets free per call.
pub struct ChirpZ {
    n_in: usize,
    n_out: usize,
    alpha: f64,
    kernel: Vec<Complex64>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

fn cis(theta: f64) -> Complex64 {
    Complex64::from_polar(1.0, theta)
}

impl ChirpZ {
    /// `alpha = σ·ds·dt`.
    pub fn new(n_in: usize, n_out: usize, alpha: f64) -> Self {
        let size = (n_in + n_out - 1).next_power_of_two();
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(size);
        let inv = planner.plan_fft_inverse(size);
        let mut kernel = vec![Complex64::new(0.0, 0.0); size];
        for j in 0..n_out {
            kernel[j] = cis(-PI * alpha * (j * j) as f64);
        }
        for j in 1..n_in {
            kernel[size - j] = cis(-PI * alpha * (j * j) as f64);
        }
        fwd.process(&mut kernel);
        ChirpZ { n_in, n_out, alpha, kernel, fwd, inv }
    }

    /// Evaluates the sum with `σ·s0`, `σ·ds`, `t0`, `dt` such that `σ·ds·dt = alpha`.
    /// `s0` and `ds` are passed already multiplied by `σ`.
    pub fn apply(&self, input: &[Complex64], s0: f64, ds: f64, t0: f64, dt: f64) -> Vec<Complex64> {
        debug_assert_eq!(input.len(), self.n_in);
        debug_assert!((ds * dt - self.alpha).abs() <= 1e-12 * self.alpha.abs().max(1e-300));
        let size = self.kernel.len();
        let mut buf = vec![Complex64::new(0.0, 0.0); size];
        for (k, v) in input.iter().enumerate() {
            let kf = k as f64;
            buf[k] = v * cis(2.0 * PI * s0 * dt * kf + PI * self.alpha * kf * kf);
        }
        self.fwd.process(&mut buf);
        for (b, w) in buf.iter_mut().zip(&self.kernel) {
            *b *= w;
        }
        self.inv.process(&mut buf);
        let scale = 1.0 / size as f64;
        (0..self.n_out)
            .map(|m| {
                let mf = m as f64;
                buf[m] * scale * cis(2.0 * PI * (s0 * t0 + ds * t0 * mf) + PI * self.alpha * mf * mf)
            })
            .collect()
    }
}

/// Applies `f` to every line of `values` parallel to `axis`.
pub(crate) fn map_lines(
    f: &GridFunction,
    axis: usize,
    mut op: impl FnMut(usize, &[Complex64]) -> Vec<Complex64>,
) -> Vec<Complex64> {
    let grid = f.grid();
    let (n, stride) = (grid.n(), grid.stride(axis));
    let mut out = f.values().to_vec();
    let mut line = vec![Complex64::new(0.0, 0.0); n];
    for start in grid.line_starts(axis) {
        for (k, slot) in line.iter_mut().enumerate() {
            *slot = out[start + k * stride];
        }
        let res = op(start, &line);
        for (k, v) in res.into_iter().enumerate() {
            out[start + k * stride] = v;
        }
    }
    out
}

/// Continuous Fourier transform `∫ f(x) e^{∓2πixξ} dx` along one axis,
/// sampled on the same grid (`sign = -1` forward, `+1` inverse).
pub fn transform_axis(f: &GridFunction, axis: usize, sign: f64) -> GridFunction {
    let grid = *f.grid();
    let (n, h, t) = (grid.n(), grid.step(), grid.extent());
    let cz = ChirpZ::new(n, n, sign * h * h);
    let values =
        map_lines(f, axis, |_, line| cz.apply(line, -sign * t, sign * h, -t, h).into_iter().map(|v| v * h).collect());
    GridFunction::from_parts(grid, values, f.aliasing_warning())
}

/// Partial Fourier transform `𝓕_J`, forward along every axis in `J`.
pub fn partial_ft(j: &IndexSet, f: &GridFunction) -> GridFunction {
    j.members().iter().fold(f.clone(), |acc, &axis| transform_axis(&acc, axis, -1.0))
}

/// Partial inverse Fourier transform `𝓕_J⁻¹`.
pub fn partial_ift(j: &IndexSet, f: &GridFunction) -> GridFunction {
    j.members().iter().fold(f.clone(), |acc, &axis| transform_axis(&acc, axis, 1.0))
}
