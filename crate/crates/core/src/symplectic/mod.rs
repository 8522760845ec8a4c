//! Symplectic matrices, their elementary generators and factorizations.
//!
//! Conventions: a `2d × 2d` matrix is split into `d × d` blocks
//! `[[A, B], [C, D]]`. The generators are
//!
//! * `V_P = [[I, 0], [P, I]]` (chirp product, `P` symmetric),
//! * `V_Pᵀ = [[I, P], [0, I]]` (Fourier multiplier),
//! * `D_L = [[L⁻¹, 0], [0, Lᵀ]]` (rescaling `f ↦ |det L|^{1/2} f(L·)`),
//! * `Π_J = [[I_{Jᶜ}, I_J], [-I_J, I_{Jᶜ}]]` (partial Fourier transform).

mod classify;
mod factor;
mod index_set;
mod shift;

pub use classify::{beckner_constant, classify_lp, conjugate_exponent, is_free, BoundednessCase, BoundednessVerdict};
pub use factor::{
    dj_factorize, free_block_test, free_factorize, lower_tri_factorize, redox_split, DjFactorization,
    FreeFactorization, LowerTriFactorization, RedoxSplit,
};
pub use index_set::IndexSet;
pub use shift::{
    cross_wigner_matrix, partial_fourier_frequency_matrix, perturbation_bound, rihacek_matrix, shift_invertible,
    shift_perturb, stft_matrix, wigner_split, ShiftInvReport, ShiftPerturbation, WignerSplit,
};

use std::ops::Mul;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Mat};

/// Default relative tolerance for the symplectic relations.
pub const DEFAULT_SYMPLECTIC_TOL: f64 = 1e-10;

/// A validated `2d × 2d` real symplectic matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymplecticMatrix {
    dim: usize,
    entries: Mat,
}

/// Largest residual of the three block relations `AᵀC = CᵀA`, `BᵀD = DᵀB`,
/// `AᵀD - CᵀB = I`, in max-entry norm.
pub fn symplectic_residual(m: &Mat) -> Result<f64> {
    let d = half_dim(m)?;
    let a = linalg::block(m, 0, 0, d);
    let b = linalg::block(m, 0, 1, d);
    let c = linalg::block(m, 1, 0, d);
    let dd = linalg::block(m, 1, 1, d);
    let r1 = (a.transpose() * &c - c.transpose() * &a).amax();
    let r2 = (b.transpose() * &dd - dd.transpose() * &b).amax();
    let r3 = (a.transpose() * &dd - c.transpose() * &b - Mat::identity(d, d)).amax();
    Ok(r1.max(r2).max(r3))
}

fn half_dim(m: &Mat) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::Dimension(format!("matrix is {}x{}, expected square", m.nrows(), m.ncols())));
    }
    if m.nrows() == 0 || !m.nrows().is_multiple_of(2) {
        return Err(Error::Dimension(format!("matrix size {} is not a positive even number", m.nrows())));
    }
    Ok(m.nrows() / 2)
}

/// Checks the symplectic relations with residual at most `tol · max(‖M‖_F², 1)`.
///
/// The relations are quadratic in the entries, hence the squared scale.
pub fn is_symplectic(m: &Mat, tol: f64) -> Result<bool> {
    let res = symplectic_residual(m)?;
    let scale = m.norm_squared().max(1.0);
    Ok(res <= tol * scale)
}

impl SymplecticMatrix {
    pub fn new(entries: Mat) -> Result<Self> {
        Self::with_tol(entries, DEFAULT_SYMPLECTIC_TOL)
    }

    pub fn with_tol(entries: Mat, tol: f64) -> Result<Self> {
        let dim = half_dim(&entries)?;
        if !entries.iter().all(|v| v.is_finite()) {
            return Err(Error::Validation("matrix has non-finite entries".into()));
        }
        if !is_symplectic(&entries, tol)? {
            let res = symplectic_residual(&entries)?;
            return Err(Error::Validation(format!("matrix is not symplectic (relation residual {res:.3e})")));
        }
        Ok(Self { dim, entries })
    }

    /// Wraps a product of generators without re-validating it.
    pub(crate) fn from_trusted(entries: Mat) -> Self {
        let dim = entries.nrows() / 2;
        Self { dim, entries }
    }

    pub fn identity(d: usize) -> Self {
        Self::from_trusted(Mat::identity(2 * d, 2 * d))
    }

    /// The standard symplectic matrix `J = [[0, I], [-I, 0]]`.
    pub fn standard_j(d: usize) -> Self {
        interchange(&IndexSet::full(d))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &Mat {
        &self.entries
    }

    pub fn into_entries(self) -> Mat {
        self.entries
    }

    pub fn a(&self) -> Mat {
        linalg::block(&self.entries, 0, 0, self.dim)
    }
    pub fn b(&self) -> Mat {
        linalg::block(&self.entries, 0, 1, self.dim)
    }
    pub fn c(&self) -> Mat {
        linalg::block(&self.entries, 1, 0, self.dim)
    }
    pub fn d(&self) -> Mat {
        linalg::block(&self.entries, 1, 1, self.dim)
    }

    /// `S⁻¹ = [[Dᵀ, -Bᵀ], [-Cᵀ, Aᵀ]]`.
    pub fn inverse(&self) -> Self {
        let inv = linalg::from_blocks(
            &self.d().transpose(),
            &(-self.b().transpose()),
            &(-self.c().transpose()),
            &self.a().transpose(),
        );
        Self::from_trusted(inv)
    }

    pub fn transpose(&self) -> Self {
        Self::from_trusted(self.entries.transpose())
    }

    pub fn apply(&self, z: &[f64]) -> Vec<f64> {
        let v = nalgebra::DVector::from_column_slice(z);
        (&self.entries * v).iter().cloned().collect()
    }

    pub fn residual_to(&self, other: &Mat) -> f64 {
        linalg::rel_residual(&self.entries, other)
    }
}

impl Mul for &SymplecticMatrix {
    type Output = SymplecticMatrix;
    fn mul(self, rhs: &SymplecticMatrix) -> SymplecticMatrix {
        assert_eq!(self.dim, rhs.dim, "symplectic dimension mismatch");
        SymplecticMatrix::from_trusted(&self.entries * &rhs.entries)
    }
}

impl Mul for SymplecticMatrix {
    type Output = SymplecticMatrix;
    fn mul(self, rhs: SymplecticMatrix) -> SymplecticMatrix {
        &self * &rhs
    }
}

/// `I_J`: diagonal 0/1 matrix selecting the coordinates in `J`.
pub fn projector(j: &IndexSet) -> Mat {
    j.projector()
}

/// The symplectic interchange `Π_J`.
pub fn interchange(j: &IndexSet) -> SymplecticMatrix {
    let ij = j.projector();
    let ijc = j.complement().projector();
    SymplecticMatrix::from_trusted(linalg::from_blocks(&ijc, &ij, &(-&ij), &ijc))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GeneratorKind {
    /// `V_P = [[I, 0], [P, I]]`
    Lower,
    /// `V_Pᵀ = [[I, P], [0, I]]`
    Upper,
    /// `D_L = [[L⁻¹, 0], [0, Lᵀ]]`
    Dilation,
}

const PARAM_SYMMETRY_TOL: f64 = 1e-10;

fn check_symmetric(p: &Mat) -> Result<()> {
    if p.nrows() != p.ncols() || p.nrows() == 0 {
        return Err(Error::Dimension(format!("parameter is {}x{}", p.nrows(), p.ncols())));
    }
    let defect = linalg::symmetry_defect(p);
    if defect > PARAM_SYMMETRY_TOL {
        return Err(Error::Validation(format!("parameter is not symmetric (defect {defect:.3e})")));
    }
    Ok(())
}

pub fn generator(kind: GeneratorKind, param: &Mat) -> Result<SymplecticMatrix> {
    match kind {
        GeneratorKind::Lower => v_lower(param),
        GeneratorKind::Upper => v_upper(param),
        GeneratorKind::Dilation => dilation(param),
    }
}

/// `V_P`.
pub fn v_lower(p: &Mat) -> Result<SymplecticMatrix> {
    check_symmetric(p)?;
    let d = p.nrows();
    let i = Mat::identity(d, d);
    Ok(SymplecticMatrix::from_trusted(linalg::from_blocks(&i, &Mat::zeros(d, d), p, &i)))
}

/// `V_Pᵀ`.
pub fn v_upper(p: &Mat) -> Result<SymplecticMatrix> {
    Ok(v_lower(p)?.transpose())
}

/// `D_L = [[L⁻¹, 0], [0, Lᵀ]]`.
pub fn dilation(l: &Mat) -> Result<SymplecticMatrix> {
    if l.nrows() != l.ncols() || l.nrows() == 0 {
        return Err(Error::Dimension(format!("parameter is {}x{}", l.nrows(), l.ncols())));
    }
    if !linalg::is_invertible(l) {
        return Err(Error::Validation("dilation parameter is singular".into()));
    }
    let d = l.nrows();
    let inv = linalg::inverse(l).ok_or_else(|| Error::Validation("dilation parameter is singular".into()))?;
    Ok(SymplecticMatrix::from_trusted(linalg::from_blocks(&inv, &Mat::zeros(d, d), &Mat::zeros(d, d), &l.transpose())))
}

pub(crate) fn random_symmetric<R: Rng>(rng: &mut R, d: usize, scale: f64) -> Mat {
    let m = Mat::from_fn(d, d, |_, _| rng.gen_range(-scale..scale));
    linalg::symmetrize(&m)
}

pub(crate) fn random_well_conditioned<R: Rng>(rng: &mut R, d: usize) -> Mat {
    loop {
        let m = Mat::identity(d, d) + Mat::from_fn(d, d, |_, _| rng.gen_range(-0.45..0.45));
        let (min, max) = linalg::singular_value_range(&m);
        if min > 0.2 * max {
            return m;
        }
    }
}

/// Product of `n_factors` random generators and interchanges, deterministic in `seed`.
pub fn random_symplectic(seed: u64, d: usize, n_factors: usize) -> Result<SymplecticMatrix> {
    if n_factors == 0 {
        return Err(Error::Precondition("n_factors must be at least 1".into()));
    }
    if d == 0 {
        return Err(Error::Dimension("d must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut acc = SymplecticMatrix::identity(d);
    for _ in 0..n_factors {
        let factor = match rng.gen_range(0..4) {
            0 => v_lower(&random_symmetric(&mut rng, d, 0.8))?,
            1 => v_upper(&random_symmetric(&mut rng, d, 0.8))?,
            2 => dilation(&random_well_conditioned(&mut rng, d))?,
            _ => interchange(&IndexSet::from_mask(d, rng.gen_range(0..(1u64 << d.min(63))))),
        };
        acc = &acc * &factor;
    }
    Ok(acc)
}

/// Random `S` with `B = 0`: `V_Q · D_L`.
pub fn random_lower_triangular(seed: u64, d: usize) -> Result<SymplecticMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = random_symmetric(&mut rng, d, 0.8);
    let l = random_well_conditioned(&mut rng, d);
    Ok(&v_lower(&q)? * &dilation(&l)?)
}

/// Random free `S`: `V_Q · D_L · J · V_P`, which has `B = L⁻¹`.
pub fn random_free(seed: u64, d: usize) -> Result<SymplecticMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = random_symmetric(&mut rng, d, 0.8);
    let l = random_well_conditioned(&mut rng, d);
    let p = random_symmetric(&mut rng, d, 0.8);
    Ok(&(&(&v_lower(&q)? * &dilation(&l)?) * &SymplecticMatrix::standard_j(d)) * &v_lower(&p)?)
}
