//! Generalized Gaussians `γ·exp(iπMx·x + 2πib·x)`, propagated exactly through
//! the generators.

use std::f64::consts::PI;

use nalgebra::DVector;
use num_complex::Complex64;

use super::grid::{Grid, GridFunction};
use super::ops::{apply_metaplectic, check_symmetric, Generators};
use crate::error::{Error, Result};
use crate::linalg::{self, to_complex, CMat, Mat, INVERTIBILITY_RTOL};
use crate::symplectic::{dj_factorize, IndexSet, SymplecticMatrix};

pub type CVec = DVector<Complex64>;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianChirp {
    gamma: Complex64,
    m: CMat,
    b: CVec,
}

fn min_eigenvalue(sym: &Mat) -> f64 {
    if sym.nrows() == 0 {
        return f64::INFINITY;
    }
    linalg::symmetrize(sym).symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min)
}

fn sub(m: &CMat, rows: &[usize], cols: &[usize]) -> CMat {
    linalg::complex_sub_matrix(m, rows, cols)
}

fn sub_vec(v: &CVec, idx: &[usize]) -> CVec {
    CVec::from_iterator(idx.len(), idx.iter().map(|&k| v[k]))
}

/// `det(A)^{-1/2}` on the branch continuous from the identity, for `A` with
/// positive definite real part.
fn det_inv_sqrt(a: &CMat) -> Complex64 {
    if a.nrows() == 0 {
        return Complex64::new(1.0, 0.0);
    }
    match a.eigenvalues() {
        Some(ev) => ev.iter().map(|l| l.sqrt().inv()).product(),
        None => linalg::complex_det(a).sqrt().inv(),
    }
}

impl GaussianChirp {
    pub fn new(gamma: Complex64, m: CMat, b: CVec) -> Result<Self> {
        let d = m.nrows();
        if m.ncols() != d || b.len() != d {
            return Err(Error::Dimension(format!("M is {}x{}, b has length {}", m.nrows(), m.ncols(), b.len())));
        }
        let scale = m.iter().map(|z| z.norm()).fold(1.0, f64::max);
        if (&m - m.transpose()).iter().any(|z| z.norm() > 1e-12 * scale) {
            return Err(Error::Validation("M is not symmetric".into()));
        }
        if min_eigenvalue(&m.map(|z| z.im)) < -1e-12 * scale {
            return Err(Error::Validation("Im M is not positive semidefinite".into()));
        }
        Ok(GaussianChirp { gamma, m, b })
    }

    /// `exp(-π|x|²)`.
    pub fn standard(d: usize) -> Self {
        Self::isotropic(d, 1.0)
    }

    /// `exp(-π s²|x|²)`.
    pub fn isotropic(d: usize, s: f64) -> Self {
        GaussianChirp {
            gamma: Complex64::new(1.0, 0.0),
            m: CMat::from_diagonal_element(d, d, I * s * s),
            b: CVec::zeros(d),
        }
    }

    /// `exp(-π Wx·x)` for a real positive definite `W`.
    pub fn with_covariance(w: &Mat) -> Result<Self> {
        Self::new(Complex64::new(1.0, 0.0), to_complex(w) * I, CVec::zeros(w.nrows()))
    }

    pub fn gamma(&self) -> Complex64 {
        self.gamma
    }

    pub fn m(&self) -> &CMat {
        &self.m
    }

    pub fn b(&self) -> &CVec {
        &self.b
    }

    pub fn with_gamma(mut self, gamma: Complex64) -> Self {
        self.gamma = gamma;
        self
    }

    /// `e^{2πi b·x}` factor added to the current one.
    pub fn modulate(mut self, b: &[f64]) -> Self {
        for (k, v) in b.iter().enumerate() {
            self.b[k] += v;
        }
        self
    }

    pub fn eval(&self, x: &[f64]) -> Complex64 {
        let d = self.m.nrows();
        let mut phase = Complex64::new(0.0, 0.0);
        for i in 0..d {
            phase += 2.0 * self.b[i] * x[i];
            for j in 0..d {
                phase += self.m[(i, j)] * x[i] * x[j];
            }
        }
        self.gamma * (I * PI * phase).exp()
    }

    /// Imaginary part of `M`, the decay matrix of `|g|`.
    pub fn decay_matrix(&self) -> Mat {
        linalg::symmetrize(&self.m.map(|z| z.im))
    }

    pub fn sample(&self, grid: &Grid) -> Result<GridFunction> {
        if grid.dim() != self.dim() {
            return Err(Error::Dimension(format!("grid has {} axes, function {} variables", grid.dim(), self.dim())));
        }
        if min_eigenvalue(&self.decay_matrix()) <= 0.0 {
            return Err(Error::Domain("sampling requires Im M positive definite".into()));
        }
        Ok(GridFunction::from_fn(*grid, |x| self.eval(x)))
    }

    pub fn conj(&self) -> Self {
        GaussianChirp { gamma: self.gamma.conj(), m: -self.m.map(|z| z.conj()), b: -self.b.map(|z| z.conj()) }
    }

    /// `(f ⊗ g)(x, y) = f(x)·g(y)`.
    pub fn tensor(&self, other: &Self) -> Self {
        let (d1, d2) = (self.dim(), other.dim());
        let mut m = CMat::zeros(d1 + d2, d1 + d2);
        m.view_mut((0, 0), (d1, d1)).copy_from(&self.m);
        m.view_mut((d1, d1), (d2, d2)).copy_from(&other.m);
        let b = CVec::from_iterator(d1 + d2, self.b.iter().chain(other.b.iter()).cloned());
        GaussianChirp { gamma: self.gamma * other.gamma, m, b }
    }

    /// `|g(x)| = |γ| exp(-π Nx·x - 2π c·x)` with `N = Im M`, `c = Im b`: returns `(N, c)`.
    fn modulus_form(&self) -> (Mat, DVector<f64>) {
        (self.decay_matrix(), self.b.map(|z| z.im))
    }

    /// Closed-form `‖g‖_p`, `0 < p ≤ ∞`.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        let (n, c) = self.modulus_form();
        gaussian_modulus_norm(self.gamma.norm(), &n, &c, p)
    }

    /// Closed-form `‖y ↦ ‖g(·, y)‖_p‖_q`, inner norm over the first `inner` variables.
    pub fn lpq_norm(&self, inner: usize, p: f64, q: f64) -> Result<f64> {
        let d = self.dim();
        if inner == 0 || inner >= d {
            return Err(Error::Dimension(format!("inner block size {inner} invalid for {d} variables")));
        }
        let (n, c) = self.modulus_form();
        let xs: Vec<usize> = (0..inner).collect();
        let ys: Vec<usize> = (inner..d).collect();
        let nxx = linalg::sub_matrix(&n, &xs, &xs);
        let nxy = linalg::sub_matrix(&n, &xs, &ys);
        let nyy = linalg::sub_matrix(&n, &ys, &ys);
        let cx = DVector::from_iterator(inner, xs.iter().map(|&k| c[k]));
        let cy = DVector::from_iterator(d - inner, ys.iter().map(|&k| c[k]));
        if min_eigenvalue(&nxx) <= 0.0 {
            return Err(Error::Domain("inner block is not decaying".into()));
        }
        let nxx_inv = linalg::inverse(&nxx).ok_or_else(|| Error::Domain("inner block singular".into()))?;
        // |g(x, y)| as a Gaussian in x for fixed y, integrated out.
        let inner_amp = gaussian_modulus_norm(self.gamma.norm(), &nxx, &cx, p)?;
        let schur = linalg::symmetrize(&(&nyy - nxy.transpose() * &nxx_inv * &nxy));
        let c_outer = &cy - nxy.transpose() * &nxx_inv * &cx;
        gaussian_modulus_norm(inner_amp, &schur, &c_outer, q)
    }

    fn fourier_signed(&self, j: &IndexSet, sign: f64) -> Result<Self> {
        let d = self.dim();
        if j.dim() != d {
            return Err(Error::Dimension(format!("index set over {} axes, function has {d}", j.dim())));
        }
        if j.is_empty() {
            return Ok(self.clone());
        }
        let u: Vec<usize> = j.members().to_vec();
        let w: Vec<usize> = j.complement().members().to_vec();
        let muu = sub(&self.m, &u, &u);
        if min_eigenvalue(&muu.map(|z| z.im)) <= 0.0 {
            return Err(Error::Domain("Fourier integral of a non-decaying Gaussian".into()));
        }
        let nmat = linalg::complex_inverse(&muu).ok_or_else(|| Error::Domain("singular quadratic form".into()))?;
        let muw = sub(&self.m, &u, &w);
        let mww = sub(&self.m, &w, &w);
        let bu = sub_vec(&self.b, &u);
        let bw = sub_vec(&self.b, &w);
        let s = Complex64::new(-sign, 0.0);

        let new_uu = -&nmat;
        let new_uw = &nmat * &muw * s;
        let new_ww = &mww - muw.transpose() * &nmat * &muw;
        let new_bu = &nmat * &bu * s;
        let new_bw = &bw - muw.transpose() * &nmat * &bu;
        let bnb = (bu.transpose() * &nmat * &bu)[(0, 0)];
        let gamma = self.gamma * det_inv_sqrt(&(&muu * -I)) * (-I * PI * bnb).exp();

        let mut m = CMat::zeros(d, d);
        let mut b = CVec::zeros(d);
        for (a, &ua) in u.iter().enumerate() {
            b[ua] = new_bu[a];
            for (c, &uc) in u.iter().enumerate() {
                m[(ua, uc)] = new_uu[(a, c)];
            }
            for (c, &wc) in w.iter().enumerate() {
                m[(ua, wc)] = new_uw[(a, c)];
                m[(wc, ua)] = new_uw[(a, c)];
            }
        }
        for (a, &wa) in w.iter().enumerate() {
            b[wa] = new_bw[a];
            for (c, &wc) in w.iter().enumerate() {
                m[(wa, wc)] = new_ww[(a, c)];
            }
        }
        let m = (&m + m.transpose()) * Complex64::new(0.5, 0.0);
        Ok(GaussianChirp { gamma, m, b })
    }

    pub fn inverse_fourier(&self, j: &IndexSet) -> Result<Self> {
        self.fourier_signed(j, 1.0)
    }
}

/// `‖A·exp(-πNx·x - 2πc·x)‖_p = A·exp(πN⁻¹c·c)·(p^n det N)^{-1/(2p)}`.
fn gaussian_modulus_norm(amp: f64, n: &Mat, c: &DVector<f64>, p: f64) -> Result<f64> {
    if !(p > 0.0) {
        return Err(Error::Validation(format!("exponent must be positive, got {p}")));
    }
    let dim = n.nrows();
    if dim == 0 {
        return Ok(amp);
    }
    if min_eigenvalue(n) <= 0.0 {
        return Err(Error::Domain("L^p norm of a non-decaying Gaussian".into()));
    }
    let ninv = linalg::inverse(n).ok_or_else(|| Error::Domain("singular decay matrix".into()))?;
    let peak = amp * (PI * c.dot(&(&ninv * c))).exp();
    if p.is_infinite() {
        return Ok(peak);
    }
    Ok(peak * (p.powi(dim as i32) * n.determinant()).powf(-1.0 / (2.0 * p)))
}

impl Generators for GaussianChirp {
    fn dim(&self) -> usize {
        self.m.nrows()
    }

    fn chirp(&self, q: &Mat) -> Result<Self> {
        check_symmetric(q, self.dim(), "Q")?;
        Ok(GaussianChirp { gamma: self.gamma, m: &self.m + to_complex(q), b: self.b.clone() })
    }

    fn rescale(&self, l: &Mat) -> Result<Self> {
        if l.nrows() != self.dim() || l.ncols() != self.dim() {
            return Err(Error::Dimension("L has the wrong size".into()));
        }
        if !linalg::is_invertible(l) {
            return Err(Error::Validation("L is not invertible".into()));
        }
        let lc = to_complex(l);
        let m = lc.transpose() * &self.m * &lc;
        let m = (&m + m.transpose()) * Complex64::new(0.5, 0.0);
        Ok(GaussianChirp { gamma: self.gamma * l.determinant().abs().sqrt(), m, b: lc.transpose() * &self.b })
    }

    fn multiplier(&self, p: &Mat) -> Result<Self> {
        check_symmetric(p, self.dim(), "P")?;
        let full = IndexSet::full(self.dim());
        self.fourier_signed(&full, -1.0)?.chirp(&-p)?.fourier_signed(&full, 1.0)
    }

    fn fourier(&self, j: &IndexSet) -> Result<Self> {
        self.fourier_signed(j, -1.0)
    }
}

/// Exact `Ŝg` through the Dopico-Johnson factorization of `S`.
pub fn gaussian_apply(s: &SymplecticMatrix, g: &GaussianChirp) -> Result<GaussianChirp> {
    apply_metaplectic(&dj_factorize(s, INVERTIBILITY_RTOL)?, g)
}

/// Quadratic form of `Ŝg` predicted by the action on the Siegel half-space,
/// `M' = (C + D·M)(A + B·M)⁻¹`, valid for `b = 0`.
pub fn siegel_action(s: &SymplecticMatrix, m: &CMat) -> Result<CMat> {
    let (a, b, c, d) = (to_complex(&s.a()), to_complex(&s.b()), to_complex(&s.c()), to_complex(&s.d()));
    let den = linalg::complex_inverse(&(&a + &b * m)).ok_or_else(|| Error::Domain("A + BM singular".into()))?;
    Ok((&c + &d * m) * den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::ops::phase_align_distance;
    use crate::symplectic::random_symplectic;

    #[test]
    fn standard_gaussian_is_fixed_by_fourier() {
        let g = GaussianChirp::standard(2);
        let f = g.fourier(&IndexSet::full(2)).unwrap();
        assert!((f.gamma - 1.0).norm() < 1e-14);
        assert!((&f.m - &g.m).norm() < 1e-14);
    }

    #[test]
    fn closed_form_norms() {
        let g = GaussianChirp::standard(1);
        for p in [1.0, 2.0, 3.5] {
            assert!((g.lp_norm(p).unwrap() - p.powf(-1.0 / (2.0 * p))).abs() < 1e-14);
        }
        assert_eq!(g.lp_norm(f64::INFINITY).unwrap(), 1.0);
        let t = GaussianChirp::isotropic(1, 2.0).tensor(&GaussianChirp::standard(1));
        let expected =
            GaussianChirp::isotropic(1, 2.0).lp_norm(1.0).unwrap() * GaussianChirp::standard(1).lp_norm(3.0).unwrap();
        assert!((t.lpq_norm(1, 1.0, 3.0).unwrap() - expected).abs() < 1e-14);
    }

    #[test]
    fn propagation_matches_siegel_action() {
        for seed in 0..20 {
            let s = random_symplectic(seed, 2, 6).unwrap();
            let g = GaussianChirp::standard(2);
            let out = gaussian_apply(&s, &g).unwrap();
            let expected = siegel_action(&s, g.m()).unwrap();
            assert!((out.m() - &expected).norm() < 1e-9 * expected.norm().max(1.0), "seed {seed}");
            // unitarity
            assert!((out.lp_norm(2.0).unwrap() - g.lp_norm(2.0).unwrap()).abs() < 1e-9);
        }
    }

    #[test]
    fn fourier_matches_grid_transform() {
        let grid = Grid::self_dual(1, 256).unwrap();
        let g = GaussianChirp::new(
            Complex64::new(0.7, 0.2),
            CMat::from_element(1, 1, Complex64::new(0.4, 1.3)),
            CVec::from_element(1, Complex64::new(0.3, 0.1)),
        )
        .unwrap();
        let exact = g.fourier(&IndexSet::full(1)).unwrap().sample(&grid).unwrap();
        let numeric = g.sample(&grid).unwrap().fourier(&IndexSet::full(1)).unwrap();
        let diff: f64 = exact.values().iter().zip(numeric.values()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(diff < 1e-12, "{diff}");
        assert!(phase_align_distance(&numeric, &exact).unwrap() < 1e-12);
    }
}
