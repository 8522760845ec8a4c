//! Dense matrices of `Op_𝒜(a)`, defined by `⟨Op_𝒜(a)f, g⟩ = ⟨a, W_𝒜(g, f)⟩`.
//!
//! Since `W_𝒜(g, f) = Â(g ⊗ f̄)` and `Â` is unitary, the kernel of `Op_𝒜(a)` is
//! `k = Â⁻¹a`. The Fourier stages of `Â⁻¹` run on the grid; the final rescaling
//! is evaluated pointwise from the exact trigonometric interpolant, so that
//! kernels concentrated on the diagonal are resolved.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use super::gaussian::GaussianChirp;
use super::grid::{Grid, GridFunction};
use super::ops::{apply_metaplectic, Generators};
use crate::error::{Error, Result};
use crate::linalg::{CMat, Mat, INVERTIBILITY_RTOL};
use crate::symplectic::{dj_factorize, DjFactorization, SymplecticMatrix};

/// Largest admissible number of rows `n^d`.
pub const MAX_ROWS: usize = 4096;

/// Largest `(n^{2d})²` work for the pointwise kernel evaluation.
const MAX_KERNEL_WORK: usize = 1 << 28;

#[derive(Debug, Clone, PartialEq)]
pub struct QuantizedOperator {
    grid: Grid,
    matrix: CMat,
    /// Unimodular constant fixing `Â⁻¹` relative to the factorized `𝒜⁻¹`.
    phase: Complex64,
}

impl QuantizedOperator {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn phase(&self) -> Complex64 {
        self.phase
    }

    pub fn apply(&self, f: &GridFunction) -> Result<GridFunction> {
        opa_apply(self, f)
    }

    /// `max |K - K*|` relative to `max |K|`.
    pub fn adjoint_defect(&self) -> f64 {
        let scale = self.matrix.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        (&self.matrix - self.matrix.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max) / scale
    }

    /// Eigenvalues of the Hermitian part `(K + K*)/2`, ascending.
    pub fn hermitian_spectrum(&self) -> Vec<f64> {
        let h = (&self.matrix + self.matrix.adjoint()) * Complex64::new(0.5, 0.0);
        let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().cloned().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }
}

pub fn opa_apply(op: &QuantizedOperator, f: &GridFunction) -> Result<GridFunction> {
    if !f.grid().same_as(&op.grid) {
        return Err(Error::GridMismatch("operator and input live on different grids".into()));
    }
    let v = nalgebra::DVector::from_column_slice(f.values());
    let out = &op.matrix * v;
    GridFunction::new(op.grid, out.iter().cloned().collect())
}

/// Per-axis trigonometric basis at `y`: index `k` holds `e^{2πi(k - n/2)u}`, with
/// the Nyquist term as `cos(πnu)`, `u = (y + T)/(2T)`.
fn basis(n: usize, t: f64, y: f64) -> Option<Vec<Complex64>> {
    if y < -t - 1e-12 * t || y > t + 1e-12 * t {
        return None;
    }
    let u = (y + t) / (2.0 * t);
    let mut out: Vec<Complex64> =
        (0..n).map(|k| Complex64::from_polar(1.0, 2.0 * PI * (k as f64 - n as f64 / 2.0) * u)).collect();
    out[0] = Complex64::new((PI * n as f64 * u).cos(), 0.0);
    Some(out)
}

/// Multi-dimensional trigonometric coefficients, layout as the grid with each
/// axis index shifted by `n/2`.
fn coefficients(f: &GridFunction) -> Vec<Complex64> {
    let grid = *f.grid();
    let n = grid.n();
    let fft = FftPlanner::new().plan_fft_forward(n);
    let mut g = f.clone();
    for axis in 0..grid.dim() {
        let vals = super::fourier::map_lines(&g, axis, |_, line| {
            let mut buf = line.to_vec();
            fft.process(&mut buf);
            let mut c = vec![Complex64::new(0.0, 0.0); n];
            for (k, v) in buf.into_iter().enumerate() {
                c[(k + n / 2) % n] = v / n as f64;
            }
            c
        });
        g = GridFunction::from_parts(grid, vals, false);
    }
    g.into_values()
}

/// Contracts the coefficient tensor with one basis vector per axis.
fn contract(coeffs: &[Complex64], bases: &[Vec<Complex64>]) -> Complex64 {
    let mut cur: Vec<Complex64> = coeffs.to_vec();
    for b in bases.iter().rev() {
        let n = b.len();
        cur = cur.chunks(n).map(|chunk| chunk.iter().zip(b).map(|(c, e)| c * e).sum()).collect();
    }
    cur[0]
}

/// `x ↦ e^{iπQx·x} |det L|^{1/2} u(Lx)` at every grid point, from the exact interpolant of `u`.
fn final_stages(u: &GridFunction, fact: &DjFactorization) -> GridFunction {
    let grid = *u.grid();
    let (n, t, dim) = (grid.n(), grid.extent(), grid.dim());
    let coeffs = coefficients(u);
    let amp = fact.l.determinant().abs().sqrt();
    let values = (0..grid.len())
        .map(|k| {
            let z = grid.coords(k);
            let y: Vec<f64> = (0..dim).map(|i| (0..dim).map(|j| fact.l[(i, j)] * z[j]).sum()).collect();
            let bases: Option<Vec<Vec<Complex64>>> = y.iter().map(|&yi| basis(n, t, yi)).collect();
            let val = bases.map(|b| contract(&coeffs, &b)).unwrap_or(Complex64::new(0.0, 0.0));
            let qz: f64 = (0..dim).map(|i| (0..dim).map(|j| fact.q[(i, j)] * z[i] * z[j]).sum::<f64>()).sum();
            val * amp * Complex64::from_polar(1.0, PI * qz)
        })
        .collect();
    GridFunction::from_parts(grid, values, u.aliasing_warning())
}

/// Builds the matrix `K[m, n] = h^d · k(x_m, x_n)` of `Op_𝒜(a)`.
pub fn opa_build(a: &GridFunction, op: &SymplecticMatrix) -> Result<QuantizedOperator> {
    let grid2 = *a.grid();
    if !grid2.dim().is_multiple_of(2) {
        return Err(Error::Dimension("symbol must live on a 2d-dimensional grid".into()));
    }
    let d = grid2.dim() / 2;
    if op.dim() != 2 * d {
        return Err(Error::Dimension(format!(
            "expected a {}x{} matrix, got {}x{}",
            4 * d,
            4 * d,
            2 * op.dim(),
            2 * op.dim()
        )));
    }
    let rows = grid2.n().pow(d as u32);
    if rows > MAX_ROWS {
        return Err(Error::TooLarge(format!("{rows} rows exceeds the limit of {MAX_ROWS}")));
    }
    if grid2.len().saturating_mul(grid2.len()) > MAX_KERNEL_WORK {
        return Err(Error::TooLarge(format!("kernel evaluation on {} points is too costly", grid2.len())));
    }
    let fwd = dj_factorize(op, INVERTIBILITY_RTOL)?;
    let inv = dj_factorize(&op.inverse(), INVERTIBILITY_RTOL)?;

    // phase of pipeline(𝒜⁻¹) ∘ pipeline(𝒜), tracked exactly on a Gaussian
    let probe = GaussianChirp::standard(2 * d);
    let round = apply_metaplectic(&inv, &apply_metaplectic(&fwd, &probe)?)?;
    let mismatch = (round.m() - probe.m()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if mismatch > 1e-8 {
        return Err(Error::Factorization(format!("inverse pipeline does not invert the forward one ({mismatch:.2e})")));
    }
    let c = round.gamma() / round.gamma().norm();
    let phase = c.conj();

    let staged = a.fourier(&inv.j)?.multiplier(&inv.p)?;
    let kernel = final_stages(&staged, &inv);
    let h = grid2.step().powi(d as i32);
    let matrix = CMat::from_row_slice(rows, rows, kernel.values()) * (phase * h);
    Ok(QuantizedOperator { grid: grid2.with_dim(d)?, matrix, phase })
}

/// Symbol on the `2d`-dimensional grid from a function of `(x, ξ)`.
pub fn symbol_from_fn(grid: &Grid, d: usize, f: impl Fn(&[f64], &[f64]) -> Complex64) -> Result<GridFunction> {
    let g2 = grid.with_dim(2 * d)?;
    Ok(GridFunction::from_fn(g2, |z| f(&z[..d], &z[d..])))
}

/// Gaussian symbol `exp(-πWz·z)` on the grid of dimension `W.nrows()`.
pub fn quadratic_symbol(grid: &Grid, w: &Mat) -> Result<GridFunction> {
    let d2 = w.nrows();
    let g2 = grid.with_dim(d2)?;
    Ok(GridFunction::from_fn(g2, |z| {
        let q: f64 = (0..d2).map(|i| (0..d2).map(|j| w[(i, j)] * z[i] * z[j]).sum::<f64>()).sum();
        Complex64::new((-PI * q).exp(), 0.0)
    }))
}
