use std::f64::consts::PI;

use num_complex::Complex64;

use super::fourier::{partial_ft, partial_ift};
use super::grid::GridFunction;
use super::resample::{compose_linear, resample_axis};
use crate::error::{Error, Result};
use crate::linalg::{self, Mat, INVERTIBILITY_RTOL};
use crate::symplectic::{free_factorize, is_free, DjFactorization, IndexSet, SymplecticMatrix};

/// The four generator actions; implemented by sampled and by symbolic functions.
pub trait Generators: Sized {
    fn dim(&self) -> usize;
    /// `𝔭_Q f = e^{iπQx·x} f`
    fn chirp(&self, q: &Mat) -> Result<Self>;
    /// `𝔗_L f = |det L|^{1/2} f(L·)`
    fn rescale(&self, l: &Mat) -> Result<Self>;
    /// `𝔪_P f = 𝓕⁻¹(Φ_{-P} 𝓕f)`
    fn multiplier(&self, p: &Mat) -> Result<Self>;
    /// `𝓕_J`
    fn fourier(&self, j: &IndexSet) -> Result<Self>;
}

fn check_square(m: &Mat, d: usize, what: &str) -> Result<()> {
    if m.nrows() != d || m.ncols() != d {
        return Err(Error::Dimension(format!("{what} must be {d}x{d}, got {}x{}", m.nrows(), m.ncols())));
    }
    Ok(())
}

pub(crate) fn check_symmetric(m: &Mat, d: usize, what: &str) -> Result<()> {
    check_square(m, d, what)?;
    if linalg::symmetry_defect(m) > 1e-12 {
        return Err(Error::Validation(format!("{what} is not symmetric")));
    }
    Ok(())
}

fn quadratic(m: &Mat, x: &[f64]) -> f64 {
    let d = x.len();
    let mut s = 0.0;
    for i in 0..d {
        for j in 0..d {
            s += m[(i, j)] * x[i] * x[j];
        }
    }
    s
}

fn phase_multiply(f: &GridFunction, q: &Mat) -> GridFunction {
    let grid = *f.grid();
    let values = f
        .values()
        .iter()
        .enumerate()
        .map(|(k, v)| v * Complex64::from_polar(1.0, PI * quadratic(q, &grid.coords(k))))
        .collect();
    GridFunction::from_parts(grid, values, f.aliasing_warning())
}

impl Generators for GridFunction {
    fn dim(&self) -> usize {
        self.grid().dim()
    }

    fn chirp(&self, q: &Mat) -> Result<Self> {
        check_symmetric(q, self.dim(), "Q")?;
        Ok(phase_multiply(self, q))
    }

    fn rescale(&self, l: &Mat) -> Result<Self> {
        check_square(l, self.dim(), "L")?;
        if !linalg::is_invertible(l) {
            return Err(Error::Validation("L is not invertible".into()));
        }
        let g = compose_linear(self, l)?;
        let scale = l.determinant().abs().sqrt();
        let out = g.scale(Complex64::new(scale, 0.0));
        let decays = out.decays();
        Ok(out.with_aliasing(!decays))
    }

    fn multiplier(&self, p: &Mat) -> Result<Self> {
        check_symmetric(p, self.dim(), "P")?;
        if p.iter().all(|&v| v == 0.0) {
            return Ok(self.clone());
        }
        let full = IndexSet::full(self.dim());
        let spectrum = partial_ft(&full, self);
        Ok(partial_ift(&full, &phase_multiply(&spectrum, &-p)))
    }

    fn fourier(&self, j: &IndexSet) -> Result<Self> {
        if j.dim() != self.dim() {
            return Err(Error::Dimension(format!("index set over {} axes, grid has {}", j.dim(), self.dim())));
        }
        Ok(partial_ft(j, self))
    }
}

pub fn chirp_apply<F: Generators>(q: &Mat, f: &F) -> Result<F> {
    f.chirp(q)
}

pub fn rescale_apply<F: Generators>(l: &Mat, f: &F) -> Result<F> {
    f.rescale(l)
}

pub fn multiplier_apply<F: Generators>(p: &Mat, f: &F) -> Result<F> {
    f.multiplier(p)
}

/// `Ŝ f = 𝔭_Q 𝔗_L 𝔪_P 𝓕_J f`, applied right to left.
pub fn apply_metaplectic<F: Generators>(fact: &DjFactorization, f: &F) -> Result<F> {
    if fact.dim() != f.dim() {
        return Err(Error::Dimension(format!("factorization in {} variables, input in {}", fact.dim(), f.dim())));
    }
    f.fourier(&fact.j)?.multiplier(&fact.p)?.rescale(&fact.l)?.chirp(&fact.q)
}

/// Quadrature evaluation of the oscillatory integral of a free metaplectic operator:
/// `|det B|^{-1/2} e^{iπDB⁻¹x·x} ∫ e^{-2πiB⁻¹x·t} e^{iπB⁻¹At·t} f(t) dt`.
pub fn free_apply_direct(s: &SymplecticMatrix, f: &GridFunction) -> Result<GridFunction> {
    if !is_free(s, INVERTIBILITY_RTOL) {
        return Err(Error::Precondition("matrix is not free".into()));
    }
    let grid = *f.grid();
    if s.dim() != grid.dim() {
        return Err(Error::Dimension(format!("matrix acts on {} variables, grid has {}", s.dim(), grid.dim())));
    }
    let ff = free_factorize(s)?;
    let d = grid.dim();
    let pts: Vec<Vec<f64>> = (0..grid.len()).map(|k| grid.coords(k)).collect();
    let pre: Vec<Complex64> =
        f.values().iter().zip(&pts).map(|(v, t)| v * Complex64::from_polar(1.0, PI * quadratic(&ff.p, t))).collect();
    let amp = ff.l.determinant().abs().sqrt() * grid.cell_volume();
    let values = pts
        .iter()
        .map(|x| {
            let bx: Vec<f64> = (0..d).map(|i| (0..d).map(|j| ff.l[(i, j)] * x[j]).sum()).collect();
            let sum: Complex64 = pre
                .iter()
                .zip(&pts)
                .map(|(v, t)| {
                    let dot: f64 = bx.iter().zip(t).map(|(a, b)| a * b).sum();
                    v * Complex64::from_polar(1.0, -2.0 * PI * dot)
                })
                .sum();
            sum * amp * Complex64::from_polar(1.0, PI * quadratic(&ff.q, x))
        })
        .collect();
    Ok(GridFunction::from_parts(grid, values, f.aliasing_warning()))
}

/// `ρ(x, ξ; τ) f(t) = e^{2πiτ} e^{-iπξ·x} e^{2πiξ·t} f(t - x)`.
pub fn tf_shift(x: &[f64], xi: &[f64], tau: f64, f: &GridFunction) -> Result<GridFunction> {
    let grid = *f.grid();
    let d = grid.dim();
    if x.len() != d || xi.len() != d {
        return Err(Error::Dimension(format!("shift vectors must have length {d}")));
    }
    let mut g = f.clone();
    for (axis, &dx) in x.iter().enumerate() {
        if dx != 0.0 {
            g = resample_axis(&g, axis, 1.0, |_| -dx);
        }
    }
    let xi_x: f64 = xi.iter().zip(x).map(|(a, b)| a * b).sum();
    let c = Complex64::from_polar(1.0, 2.0 * PI * tau - PI * xi_x);
    let values = g
        .values()
        .iter()
        .enumerate()
        .map(|(k, v)| {
            let t = grid.coords(k);
            let xt: f64 = xi.iter().zip(&t).map(|(a, b)| a * b).sum();
            v * c * Complex64::from_polar(1.0, 2.0 * PI * xt)
        })
        .collect();
    Ok(GridFunction::from_parts(grid, values, g.aliasing_warning()))
}

/// Best unimodular constant `c` aligning `g` to `f`, and `min_{|c|=1} ‖f - c·g‖₂ / ‖g‖₂`.
pub fn phase_align(f: &GridFunction, g: &GridFunction) -> Result<(Complex64, f64)> {
    f.check_same_grid(g)?;
    let gn = g.l2_norm();
    if gn == 0.0 {
        return Err(Error::Domain("reference function is zero".into()));
    }
    let ip = f.inner(g)?;
    let c = if ip.norm() > 0.0 { ip / ip.norm() } else { Complex64::new(1.0, 0.0) };
    let w = f.grid().cell_volume();
    let diff: f64 = f.values().iter().zip(g.values()).map(|(a, b)| (a - c * b).norm_sqr()).sum::<f64>() * w;
    Ok((c, diff.sqrt() / gn))
}

pub fn phase_align_distance(f: &GridFunction, g: &GridFunction) -> Result<f64> {
    phase_align(f, g).map(|(_, d)| d)
}

/// Acceptance bound for comparisons that hold up to a global unimodular constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseTolerance {
    tol: f64,
}

impl PhaseTolerance {
    pub fn new(tol: f64) -> Result<Self> {
        if tol > 0.0 && tol.is_finite() {
            Ok(PhaseTolerance { tol })
        } else {
            Err(Error::Validation(format!("tolerance must be positive, got {tol}")))
        }
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn accepts(&self, f: &GridFunction, g: &GridFunction) -> Result<bool> {
        Ok(phase_align_distance(f, g)? <= self.tol)
    }
}
