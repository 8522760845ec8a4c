//! Shift-invertibility of `4d × 4d` symplectic matrices and the constructive
//! identities built on their Dopico-Johnson factorizations.

use serde::{Deserialize, Serialize};

use super::{
    dilation, dj_factorize, interchange, is_free, v_lower, v_upper, DjFactorization, IndexSet, SymplecticMatrix,
};
use crate::error::{Error, Result};
use crate::linalg::{self, Mat, INVERTIBILITY_RTOL};

fn half_block_dim(a: &SymplecticMatrix) -> Result<usize> {
    if !a.dim().is_multiple_of(2) {
        return Err(Error::Dimension(format!("expected a 4d x 4d matrix, got {}x{}", 2 * a.dim(), 2 * a.dim())));
    }
    Ok(a.dim() / 2)
}

/// Projection of the cross-Wigner distribution `W = 𝓕₂ 𝔗_{L_{1/2}}`.
pub fn cross_wigner_matrix(d: usize) -> SymplecticMatrix {
    let mut m = Mat::zeros(4 * d, 4 * d);
    for k in 0..d {
        m[(k, k)] = 0.5;
        m[(k, d + k)] = 0.5;
        m[(d + k, 2 * d + k)] = 0.5;
        m[(d + k, 3 * d + k)] = -0.5;
        m[(2 * d + k, 2 * d + k)] = 1.0;
        m[(2 * d + k, 3 * d + k)] = 1.0;
        m[(3 * d + k, k)] = -1.0;
        m[(3 * d + k, d + k)] = 1.0;
    }
    SymplecticMatrix::from_trusted(m)
}

/// Projection of `𝓕₂`, the Fourier transform in the last `d` of `2d` variables.
pub fn partial_fourier_frequency_matrix(d: usize) -> SymplecticMatrix {
    interchange(&frequency_set(d))
}

fn frequency_set(d: usize) -> IndexSet {
    IndexSet::new(2 * d, &(d..2 * d).collect::<Vec<_>>()).expect("in range")
}

fn block2(a: &Mat, b: &Mat, c: &Mat, dd: &Mat) -> Mat {
    linalg::from_blocks(a, b, c, dd)
}

/// Projection of the short-time Fourier transform `V_g f = 𝓕₂ 𝔗_{L_st}(f ⊗ ḡ)`.
pub fn stft_matrix(d: usize) -> SymplecticMatrix {
    let i = Mat::identity(d, d);
    let z = Mat::zeros(d, d);
    let l_st = block2(&z, &i, &(-&i), &i);
    &partial_fourier_frequency_matrix(d) * &dilation(&l_st).expect("invertible")
}

/// Projection of the Rihacek distribution `f(x)·conj(ĝ(ξ))·e^{-2πiξx}`,
/// i.e. `𝔭_Q 𝓕₂⁻¹` with `Q = [[0, -I], [-I, 0]]`.
pub fn rihacek_matrix(d: usize) -> SymplecticMatrix {
    let i = Mat::identity(d, d);
    let z = Mat::zeros(d, d);
    let q = block2(&z, &(-&i), &(-&i), &z);
    &v_lower(&q).expect("symmetric") * &partial_fourier_frequency_matrix(d).inverse()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftInvReport {
    pub d: usize,
    /// `[[A₁₁, A₁₃], [A₂₁, A₂₃]]`
    pub e: Mat,
    pub det_e: f64,
    pub invertible: bool,
    /// Invertibility of the `P₁₂` block of the canonical Dopico-Johnson factorization.
    pub dj_p12_invertible: bool,
}

impl ShiftInvReport {
    pub fn consistent(&self) -> bool {
        self.invertible == self.dj_p12_invertible
    }
}

fn p12(f: &DjFactorization, d: usize) -> Mat {
    f.p.view((0, d), (d, d)).into_owned()
}

pub fn shift_invertible(a: &SymplecticMatrix, tol: f64) -> Result<ShiftInvReport> {
    let d = half_block_dim(a)?;
    let m = a.entries();
    let mut e = Mat::zeros(2 * d, 2 * d);
    e.view_mut((0, 0), (2 * d, d)).copy_from(&m.view((0, 0), (2 * d, d)));
    e.view_mut((0, d), (2 * d, d)).copy_from(&m.view((0, 2 * d), (2 * d, d)));
    let (min, max) = linalg::singular_value_range(&e);
    let invertible = max > 0.0 && min >= tol * max;
    let f = dj_factorize(a, INVERTIBILITY_RTOL)?;
    let scale = linalg::singular_value_range(&f.p).1.max(1.0);
    let dj_p12_invertible = linalg::is_invertible_at_scale(&p12(&f, d), scale);
    Ok(ShiftInvReport { d, det_e: e.determinant(), e, invertible, dj_p12_invertible })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShiftPerturbation {
    pub tau: f64,
    pub factorization: DjFactorization,
    /// `V_Q D_L V_{P+τR}ᵀ Π_J`
    pub a_tau: SymplecticMatrix,
    /// `V_Q V_{τ L⁻¹ R L⁻ᵀ}ᵀ V_{-Q}`, with `𝒜 = Ξ_τ⁻¹ 𝒜_τ`.
    pub xi: SymplecticMatrix,
    /// `V_{τ I_{Jᶜ} R I_{Jᶜ}}ᵀ D_{I + τ I_{Jᶜ} R I_J} V_{-τ I_J R I_J}`, with `𝒜_τ = 𝒜 Θ_τ`.
    pub theta: SymplecticMatrix,
    pub residual_left: f64,
    pub residual_right: f64,
}

/// `R = [[0, I], [I, 0]]` in `2d × 2d`.
fn swap_matrix(d: usize) -> Mat {
    let i = Mat::identity(d, d);
    let z = Mat::zeros(d, d);
    block2(&z, &i, &i, &z)
}

/// Smallest nonzero eigenvalue modulus of `P₁₂` (`∞` when `P₁₂ = 0`).
pub fn perturbation_bound(f: &DjFactorization) -> f64 {
    let d = f.dim() / 2;
    let block = p12(f, d);
    let scale = f.p.amax().max(1.0);
    block.complex_eigenvalues().iter().map(|z| z.norm()).filter(|&r| r > 1e-12 * scale).fold(f64::INFINITY, f64::min)
}

pub fn shift_perturb(a: &SymplecticMatrix, tau: f64) -> Result<ShiftPerturbation> {
    let d = half_block_dim(a)?;
    let f = dj_factorize(a, INVERTIBILITY_RTOL)?;
    let bound = perturbation_bound(&f);
    if !(tau > 0.0 && tau < bound) {
        return Err(Error::Precondition(format!("tau = {tau} outside the admissible range (0, {bound})")));
    }
    let r = swap_matrix(d);
    let n = 2 * d;
    let a_tau = super::factor::compose_dj(&f.q, &f.l, &(&f.p + &r * tau), &f.j);

    let linv = linalg::inverse(&f.l).ok_or_else(|| Error::Factorization("L singular".into()))?;
    let inner = linalg::symmetrize(&(&linv * &r * linv.transpose() * tau));
    let xi = &(&v_lower(&f.q)? * &v_upper(&inner)?) * &v_lower(&-&f.q)?;

    let (ij, ijc) = (f.j.projector(), f.j.complement().projector());
    let t1 = v_upper(&(&ijc * &r * &ijc * tau))?;
    let t2 = dilation(&(Mat::identity(n, n) + &ijc * &r * &ij * tau))?;
    let t3 = v_lower(&(-(&ij * &r * &ij) * tau))?;
    let theta = &(&t1 * &t2) * &t3;

    let residual_left = (&xi.inverse() * &a_tau).residual_to(a.entries());
    let residual_right = (&a_tau * &theta.inverse()).residual_to(a.entries());
    Ok(ShiftPerturbation { tau, factorization: f, a_tau, xi, theta, residual_left, residual_right })
}

impl ShiftPerturbation {
    pub fn xi_is_free(&self) -> bool {
        is_free(&self.xi, INVERTIBILITY_RTOL)
    }

    /// `‖Ξ_τ - I‖_F`.
    pub fn xi_distance_to_identity(&self) -> f64 {
        let n = self.xi.entries().nrows();
        (self.xi.entries() - Mat::identity(n, n)).norm()
    }

    pub fn theta_upper_left_invertible(&self) -> bool {
        linalg::is_invertible(&self.theta.a())
    }
}

/// `𝒜 = D_L V_{Q̃} 𝒜_{FT2}⁻¹ D_M 𝒜_{FT2} V_{P̃}ᵀ Π_{J₁} Π_{J₂}` with
/// `M = [[I + P₁₂Q₁₂ᵀ, -P₁₂], [-Q₁₂ᵀ, I]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerSplit {
    pub l: Mat,
    pub q_tilde: Mat,
    pub m: Mat,
    pub p_tilde: Mat,
    pub j1: IndexSet,
    pub j2: IndexSet,
    pub factors: Vec<SymplecticMatrix>,
    pub residual: f64,
}

impl WignerSplit {
    pub fn product(&self) -> SymplecticMatrix {
        let n = self.l.nrows();
        self.factors.iter().fold(SymplecticMatrix::identity(n), |acc, f| &acc * f)
    }
}

fn block_diag(a: &Mat, b: &Mat) -> Mat {
    let d = a.nrows();
    let z = Mat::zeros(d, d);
    block2(a, &z, &z, b)
}

pub fn wigner_split(a: &SymplecticMatrix) -> Result<WignerSplit> {
    let d = half_block_dim(a)?;
    let n = 2 * d;
    let f = dj_factorize(a, INVERTIBILITY_RTOL)?;
    let q = f.q_after_dilation();
    let blk = |m: &Mat, i: usize, j: usize| linalg::block(m, i, j, d);
    let q_tilde = block_diag(&blk(&q, 0, 0), &blk(&q, 1, 1));
    let p_tilde = block_diag(&blk(&f.p, 0, 0), &blk(&f.p, 1, 1));
    let (p12, q12) = (blk(&f.p, 0, 1), blk(&q, 0, 1));
    let i = Mat::identity(d, d);
    let m = block2(&(&i + &p12 * q12.transpose()), &(-&p12), &(-q12.transpose()), &i);

    let j1 = IndexSet::new(n, &f.j.members().iter().cloned().filter(|&k| k < d).collect::<Vec<_>>())?;
    let j2 = IndexSet::new(n, &f.j.members().iter().cloned().filter(|&k| k >= d).collect::<Vec<_>>())?;
    let ft2 = partial_fourier_frequency_matrix(d);
    let factors = vec![
        dilation(&f.l)?,
        v_lower(&q_tilde)?,
        ft2.inverse(),
        dilation(&m)?,
        ft2,
        v_upper(&p_tilde)?,
        interchange(&j1),
        interchange(&j2),
    ];
    let mut split = WignerSplit { l: f.l.clone(), q_tilde, m, p_tilde, j1, j2, factors, residual: 0.0 };
    split.residual = split.product().residual_to(a.entries());
    Ok(split)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symplectic::{is_symplectic, random_symplectic};

    #[test]
    fn named_matrices_are_symplectic() {
        for d in 1..4 {
            for m in [cross_wigner_matrix(d), stft_matrix(d), rihacek_matrix(d), partial_fourier_frequency_matrix(d)] {
                assert!(is_symplectic(m.entries(), 1e-14).unwrap());
            }
        }
    }

    #[test]
    fn cross_wigner_matches_generator_composition() {
        for d in 1..4 {
            let i = Mat::identity(d, d);
            let l_half = block2(&i, &(&i * 0.5), &i, &(&i * -0.5));
            let composed = &partial_fourier_frequency_matrix(d) * &dilation(&l_half).unwrap();
            assert!(composed.residual_to(cross_wigner_matrix(d).entries()) < 1e-15);
        }
    }

    #[test]
    fn shift_invertibility_examples() {
        for d in 1..4 {
            let r = shift_invertible(&cross_wigner_matrix(d), 1e-9).unwrap();
            assert!(r.invertible && r.consistent());
            assert!((r.det_e - 2f64.powi(-2 * d as i32)).abs() < 1e-15);
            let r = shift_invertible(&rihacek_matrix(d), 1e-9).unwrap();
            assert!(!r.invertible && r.consistent());
            let r = shift_invertible(&stft_matrix(d), 1e-9).unwrap();
            assert!(r.invertible && r.consistent());
        }
        assert!(shift_invertible(&SymplecticMatrix::identity(3), 1e-9).is_err());
    }

    #[test]
    fn p12_cross_check_on_random_matrices() {
        for seed in 0..200 {
            let a = random_symplectic(seed, 2 * (1 + seed as usize % 2), 8).unwrap();
            let r = shift_invertible(&a, 1e-9).unwrap();
            assert!(r.consistent(), "seed {seed}: {r:?}");
        }
    }

    #[test]
    fn perturbation_of_rihacek() {
        let a = rihacek_matrix(1);
        let mut last = f64::INFINITY;
        for tau in [1e-1, 1e-2, 1e-3, 1e-4] {
            let p = shift_perturb(&a, tau).unwrap();
            assert!(p.residual_left <= 1e-10 && p.residual_right <= 1e-10);
            assert!(p.xi_is_free());
            assert!(p.theta_upper_left_invertible());
            assert!(shift_invertible(&p.a_tau, 1e-9).unwrap().invertible);
            let dist = p.xi_distance_to_identity();
            assert!(dist < last);
            last = dist;
        }
        assert!(shift_perturb(&a, 0.0).is_err());
        assert!(shift_perturb(&a, -1.0).is_err());
    }

    #[test]
    fn perturbation_keeps_shift_invertible() {
        let a = cross_wigner_matrix(1);
        let f = dj_factorize(&a, 1e-9).unwrap();
        let bound = perturbation_bound(&f);
        let p = shift_perturb(&a, 0.1 * bound.min(1.0)).unwrap();
        assert!(shift_invertible(&p.a_tau, 1e-9).unwrap().invertible);
        assert!(shift_perturb(&a, 2.0 * bound).is_err());
    }

    #[test]
    fn wigner_split_examples() {
        let ft2 = partial_fourier_frequency_matrix(1);
        let s = wigner_split(&ft2).unwrap();
        assert_eq!(s.m, Mat::identity(2, 2));
        assert!(s.residual < 1e-14);
        for seed in 0..50 {
            let a = random_symplectic(100 + seed, 2, 9).unwrap();
            let s = wigner_split(&a).unwrap();
            assert!(s.residual <= 1e-10, "seed {seed}: {}", s.residual);
            assert!((s.m.determinant() - 1.0).abs() < 1e-9);
        }
    }
}
