use serde::{Deserialize, Serialize};

use super::SymplecticMatrix;
use crate::linalg::{self, INVERTIBILITY_RTOL, ZERO_RTOL};

/// `σ_min(B) ≥ tol · σ_max(S)`.
pub fn is_free(s: &SymplecticMatrix, tol: f64) -> bool {
    let (_, smax) = linalg::singular_value_range(s.entries());
    let (bmin, _) = linalg::singular_value_range(&s.b());
    bmin >= tol * smax
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundednessCase {
    /// `B = 0`: a quasi-isometry of every `L^p`, `0 < p ≤ ∞`.
    LowerTriangular,
    /// `B` invertible: bounded `L^p → L^{p'}` exactly for `1 ≤ p ≤ 2`.
    Free,
    /// `B ≠ 0` singular: unbounded `L^p → L^q` for all `p, q ≠ 2`.
    SingularNonzeroB,
    /// The singular values of `B` fall between the zero and invertibility
    /// thresholds; no verdict is given.
    Ambiguous,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundednessVerdict {
    pub case: BoundednessCase,
    pub dim: usize,
    pub det_a: f64,
    pub det_b: f64,
    /// Singular values of `B` relative to `σ_max(S)`.
    pub b_sigma_min_rel: f64,
    pub b_sigma_max_rel: f64,
}

/// Hölder conjugate, with `1' = ∞` and `∞' = 1`.
pub fn conjugate_exponent(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

/// `p^{1/p}` with the limit value 1 at `p = ∞`.
fn root_power(p: f64) -> f64 {
    if p.is_infinite() {
        1.0
    } else {
        p.powf(1.0 / p)
    }
}

/// Sharp constant `(p^{1/p} / p'^{1/p'})^{d/2}` of the Fourier transform `L^p → L^{p'}`.
pub fn beckner_constant(p: f64, d: usize) -> f64 {
    let pp = conjugate_exponent(p);
    (root_power(p) / root_power(pp)).powf(d as f64 / 2.0)
}

fn inv(p: f64) -> f64 {
    if p.is_infinite() {
        0.0
    } else {
        1.0 / p
    }
}

impl BoundednessVerdict {
    /// Exponent of the target space for which a norm is defined.
    pub fn target_exponent(&self, p: f64) -> Option<f64> {
        match self.case {
            BoundednessCase::LowerTriangular if p > 0.0 => Some(p),
            BoundednessCase::Free if (1.0..=2.0).contains(&p) => Some(conjugate_exponent(p)),
            _ => None,
        }
    }

    /// Closed-form operator norm `‖Ŝ‖_{L^p → L^q}` for `q = target_exponent(p)`.
    ///
    /// For `B = 0`, `Ŝ = 𝔭_{CA⁻¹} 𝔗_{A⁻¹}` and the norm is `|det A⁻¹|^{1/2-1/p}`.
    /// For free `S`, `Ŝ = 𝔭 𝔗_{B⁻¹} 𝓕 𝔭` and the norm is
    /// `|det B⁻¹|^{1/2-1/p'}` times the Beckner constant.
    pub fn norm(&self, p: f64) -> Option<f64> {
        match self.case {
            BoundednessCase::LowerTriangular if p > 0.0 => Some(self.det_a.abs().powf(inv(p) - 0.5)),
            BoundednessCase::Free if (1.0..=2.0).contains(&p) => {
                Some(self.det_b.abs().powf(0.5 - inv(p)) * beckner_constant(p, self.dim))
            }
            _ => None,
        }
    }
}

pub fn classify_lp(s: &SymplecticMatrix) -> BoundednessVerdict {
    let (_, smax) = linalg::singular_value_range(s.entries());
    let (bmin, bmax) = linalg::singular_value_range(&s.b());
    let (rmin, rmax) = (bmin / smax, bmax / smax);
    let case = if rmax <= ZERO_RTOL {
        BoundednessCase::LowerTriangular
    } else if rmin >= INVERTIBILITY_RTOL {
        BoundednessCase::Free
    } else if rmin <= ZERO_RTOL && rmax >= INVERTIBILITY_RTOL {
        BoundednessCase::SingularNonzeroB
    } else {
        BoundednessCase::Ambiguous
    };
    BoundednessVerdict {
        case,
        dim: s.dim(),
        det_a: s.a().determinant(),
        det_b: s.b().determinant(),
        b_sigma_min_rel: rmin,
        b_sigma_max_rel: rmax,
    }
}
