//! Dopico-Johnson factorizations `S = V_Q · D_L · V_Pᵀ · Π_J` and the
//! special-case factorizations of free and block lower-triangular matrices.

use serde::{Deserialize, Serialize};

use super::{dilation, interchange, is_free, v_lower, v_upper, IndexSet, SymplecticMatrix};
use crate::error::{Error, Result};
use crate::linalg::{self, Mat};

/// `S = V_Q · D_L · V_Pᵀ · Π_J` with `Q`, `P` symmetric and `L` invertible.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DjFactorization {
    pub q: Mat,
    pub l: Mat,
    pub p: Mat,
    pub j: IndexSet,
    /// Relative asymmetry of `P` and `Q` before symmetrization.
    pub symmetry_defect: f64,
    /// `‖V_Q D_L V_Pᵀ Π_J - S‖_F / max(‖S‖_F, 1)`.
    pub residual: f64,
}

impl DjFactorization {
    pub fn dim(&self) -> usize {
        self.l.nrows()
    }

    pub fn compose(&self) -> SymplecticMatrix {
        compose_dj(&self.q, &self.l, &self.p, &self.j)
    }

    /// `V_Q · D_L = D_L · V_{L⁻ᵀ Q L⁻¹}`: the chirp parameter for the
    /// dilation-first ordering.
    pub fn q_after_dilation(&self) -> Mat {
        let linv = linalg::inverse(&self.l).expect("L is invertible by construction");
        linalg::symmetrize(&(linv.transpose() * &self.q * &linv))
    }
}

pub(crate) fn compose_dj(q: &Mat, l: &Mat, p: &Mat, j: &IndexSet) -> SymplecticMatrix {
    let vq = v_lower(&linalg::symmetrize(q)).expect("symmetric");
    let dl = dilation(l).expect("invertible");
    let vp = v_upper(&linalg::symmetrize(p)).expect("symmetric");
    &(&(&vq * &dl) * &vp) * &interchange(j)
}

/// `A·I_{Jᶜ} + B·I_J`: columns of `A` outside `J`, of `B` inside `J`.
fn mixed_columns(a: &Mat, b: &Mat, j: &IndexSet) -> Mat {
    let mut x = a.clone();
    for &k in j.members() {
        x.set_column(k, &b.column(k));
    }
    x
}

const DET_TIE_RTOL: f64 = 1e-12;

/// Dopico-Johnson factorization with an exhaustive, deterministic search
/// over `J`: among admissible subsets (`A·I_{Jᶜ} + B·I_J` invertible with
/// relative singular-value tolerance `tol`) the one with the largest
/// `|det|` wins, ties going to the smallest cardinality and then to the
/// lexicographically smallest member list.
pub fn dj_factorize(s: &SymplecticMatrix, tol: f64) -> Result<DjFactorization> {
    let d = s.dim();
    if d > 12 {
        return Err(Error::TooLarge(format!("exhaustive J-search is capped at d = 12 (got {d})")));
    }
    let (a, b, c, dd) = (s.a(), s.b(), s.c(), s.d());

    let mut candidates: Vec<(f64, IndexSet)> =
        IndexSet::all_subsets(d).map(|j| (mixed_columns(&a, &b, &j).determinant().abs(), j)).collect();
    candidates.sort_by(|(da, ja), (db, jb)| {
        let scale = da.max(*db);
        if (da - db).abs() <= DET_TIE_RTOL * scale {
            ja.len().cmp(&jb.len()).then_with(|| ja.members().cmp(jb.members()))
        } else {
            db.partial_cmp(da).unwrap_or(std::cmp::Ordering::Equal)
        }
    });

    for (_, j) in candidates {
        let x = mixed_columns(&a, &b, &j);
        let (min, max) = linalg::singular_value_range(&x);
        if !(max > 0.0 && min >= tol * max) {
            continue;
        }
        let Some(l) = linalg::inverse(&x) else { continue };
        let jc = j.complement();
        let (ij, ijc) = (j.projector(), jc.projector());
        let p_raw = &l * (&b * &ijc - &a * &ij);
        let q_raw = (&c * &ijc + &dd * &ij) * &l;
        let symmetry_defect = linalg::symmetry_defect(&p_raw).max(linalg::symmetry_defect(&q_raw));
        let p = linalg::symmetrize(&p_raw);
        let q = linalg::symmetrize(&q_raw);
        let composed = compose_dj(&q, &l, &p, &j);
        let residual = composed.residual_to(s.entries());
        return Ok(DjFactorization { q, l, p, j, symmetry_defect, residual });
    }
    Err(Error::Factorization("no index set J makes A·I_Jc + B·I_J invertible".into()))
}

/// `S = V_{DB⁻¹} · D_{B⁻¹} · J · V_{B⁻¹A}` for free `S`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FreeFactorization {
    /// `D·B⁻¹`
    pub q: Mat,
    /// `B⁻¹`
    pub l: Mat,
    /// `B⁻¹·A` (enters as the chirp `V_{+B⁻¹A}` applied first)
    pub p: Mat,
    pub residual: f64,
}

impl FreeFactorization {
    pub fn compose(&self) -> SymplecticMatrix {
        let d = self.l.nrows();
        let left = &v_lower(&self.q).expect("symmetric") * &dilation(&self.l).expect("invertible");
        &(&left * &SymplecticMatrix::standard_j(d)) * &v_lower(&self.p).expect("symmetric")
    }
}

pub fn free_factorize(s: &SymplecticMatrix) -> Result<FreeFactorization> {
    if !is_free(s, linalg::INVERTIBILITY_RTOL) {
        return Err(Error::Precondition("matrix is not free (B is singular)".into()));
    }
    let binv = linalg::inverse(&s.b()).ok_or_else(|| Error::Precondition("B is singular".into()))?;
    let q = linalg::symmetrize(&(s.d() * &binv));
    let p = linalg::symmetrize(&(&binv * s.a()));
    let mut f = FreeFactorization { q, l: binv, p, residual: 0.0 };
    f.residual = f.compose().residual_to(s.entries());
    Ok(f)
}

/// `S = V_{CA⁻¹} · D_{A⁻¹}` and `S = D_{A⁻¹} · V_{AᵀC}` for `B = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LowerTriFactorization {
    /// `C·A⁻¹`
    pub q: Mat,
    /// `A⁻¹`
    pub l: Mat,
    /// `AᵀC`, the chirp of the dilation-first form.
    pub q_right: Mat,
    pub residual: f64,
    pub residual_right: f64,
}

pub fn lower_tri_factorize(s: &SymplecticMatrix) -> Result<LowerTriFactorization> {
    let scale = s.entries().amax().max(1.0);
    if s.b().amax() > linalg::ZERO_RTOL * scale {
        return Err(Error::Precondition("B is not zero".into()));
    }
    let a = s.a();
    let ainv = linalg::inverse(&a).ok_or_else(|| Error::Precondition("A is singular".into()))?;
    let q = linalg::symmetrize(&(s.c() * &ainv));
    let q_right = linalg::symmetrize(&(a.transpose() * s.c()));
    let left = &v_lower(&q)? * &dilation(&ainv)?;
    let right = &dilation(&ainv)? * &v_lower(&q_right)?;
    Ok(LowerTriFactorization {
        residual: left.residual_to(s.entries()),
        residual_right: right.residual_to(s.entries()),
        q,
        l: ainv,
        q_right,
    })
}

/// Both sides of the block criterion: invertibility of `I_J + P·I_{Jᶜ}` and
/// of the principal submatrix `P_{JᶜJᶜ}`, both judged at the scale `max(1, ‖P‖₂)`.
pub fn free_block_test(p: &Mat, j: &IndexSet) -> Result<(bool, bool)> {
    if j.is_full() {
        return Err(Error::Precondition("J must be a proper subset".into()));
    }
    if p.nrows() != j.dim() || p.ncols() != j.dim() {
        return Err(Error::Dimension("P and J dimensions differ".into()));
    }
    let lhs_m = j.projector() + p * j.complement().projector();
    let jc = j.complement();
    let sub = linalg::sub_matrix(p, jc.members(), jc.members());
    let scale = linalg::singular_value_range(p).1.max(1.0);
    Ok((linalg::is_invertible_at_scale(&lhs_m, scale), linalg::is_invertible_at_scale(&sub, scale)))
}

/// `Π_J⁻¹ V_Pᵀ Π_J` next to its factorization
/// `V_{I_{Jᶜ}PI_{Jᶜ}}ᵀ · D_{I + I_{Jᶜ}PI_J} · V_{-I_J P I_J}`.
#[derive(Debug, Clone, PartialEq)]
pub struct RedoxSplit {
    pub lhs: SymplecticMatrix,
    /// `I_{Jᶜ} P I_{Jᶜ}`
    pub multiplier: Mat,
    /// `I + I_{Jᶜ} P I_J`
    pub dilation: Mat,
    /// `-I_J P I_J`
    pub chirp: Mat,
    pub factors: (SymplecticMatrix, SymplecticMatrix, SymplecticMatrix),
}

impl RedoxSplit {
    pub fn product(&self) -> SymplecticMatrix {
        &(&self.factors.0 * &self.factors.1) * &self.factors.2
    }

    pub fn residual(&self) -> f64 {
        self.product().residual_to(self.lhs.entries())
    }
}

pub fn redox_split(p: &Mat, j: &IndexSet) -> Result<RedoxSplit> {
    let pi = interchange(j);
    let lhs = &(&pi.inverse() * &v_upper(p)?) * &pi;
    let (ij, ijc) = (j.projector(), j.complement().projector());
    let d = j.dim();
    let multiplier = &ijc * p * &ijc;
    let dil = Mat::identity(d, d) + &ijc * p * &ij;
    let chirp = -(&ij * p * &ij);
    let factors = (v_upper(&multiplier)?, dilation(&dil)?, v_lower(&chirp)?);
    Ok(RedoxSplit { lhs, multiplier, dilation: dil, chirp, factors })
}
