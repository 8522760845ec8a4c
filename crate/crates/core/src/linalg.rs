//! Small dense linear-algebra helpers shared by the symplectic and numeric layers.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type Mat = DMatrix<f64>;
pub type CMat = DMatrix<Complex64>;

/// Relative singular-value threshold under which a matrix counts as singular.
pub const INVERTIBILITY_RTOL: f64 = 1e-9;

/// Relative threshold below which a block is treated as exactly zero, and
/// singular values as exactly vanishing, for classification purposes.
pub const ZERO_RTOL: f64 = 1e-12;

pub fn singular_value_range(m: &Mat) -> (f64, f64) {
    if m.nrows() == 0 || m.ncols() == 0 {
        return (0.0, 0.0);
    }
    let sv = m.clone().singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    (min, max)
}

/// `true` when the smallest singular value is at least `INVERTIBILITY_RTOL`
/// times the largest one.
pub fn is_invertible(m: &Mat) -> bool {
    let (min, max) = singular_value_range(m);
    max > 0.0 && min >= INVERTIBILITY_RTOL * max
}

/// Invertibility of a block measured against the scale of its parent matrix:
/// `σ_min ≥ INVERTIBILITY_RTOL · max(scale, σ_max)`.
pub fn is_invertible_at_scale(m: &Mat, scale: f64) -> bool {
    let (min, max) = singular_value_range(m);
    max > 0.0 && min >= INVERTIBILITY_RTOL * max.max(scale)
}

pub fn frobenius(m: &Mat) -> f64 {
    m.norm()
}

/// `‖a - b‖_F / max(‖b‖_F, 1)`.
pub fn rel_residual(a: &Mat, b: &Mat) -> f64 {
    (a - b).norm() / b.norm().max(1.0)
}

/// Largest entry of `|m - mᵀ|` relative to `max(‖m‖_max, 1)`.
pub fn symmetry_defect(m: &Mat) -> f64 {
    let scale = m.amax().max(1.0);
    (m - m.transpose()).amax() / scale
}

pub fn symmetrize(m: &Mat) -> Mat {
    (m + m.transpose()) * 0.5
}

pub fn block(m: &Mat, row: usize, col: usize, size: usize) -> Mat {
    m.view((row * size, col * size), (size, size)).into_owned()
}

pub fn from_blocks(a: &Mat, b: &Mat, c: &Mat, d: &Mat) -> Mat {
    let k = a.nrows();
    let mut m = Mat::zeros(2 * k, 2 * k);
    m.view_mut((0, 0), (k, k)).copy_from(a);
    m.view_mut((0, k), (k, k)).copy_from(b);
    m.view_mut((k, 0), (k, k)).copy_from(c);
    m.view_mut((k, k), (k, k)).copy_from(d);
    m
}

pub fn inverse(m: &Mat) -> Option<Mat> {
    m.clone().try_inverse()
}

pub fn to_complex(m: &Mat) -> CMat {
    m.map(|v| Complex64::new(v, 0.0))
}

pub fn complex_inverse(m: &CMat) -> Option<CMat> {
    m.clone().try_inverse()
}

/// Determinant of a complex matrix via LU.
pub fn complex_det(m: &CMat) -> Complex64 {
    if m.nrows() == 0 {
        return Complex64::new(1.0, 0.0);
    }
    m.clone().lu().determinant()
}

pub fn sub_matrix(m: &Mat, rows: &[usize], cols: &[usize]) -> Mat {
    Mat::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])])
}

pub fn complex_sub_matrix(m: &CMat, rows: &[usize], cols: &[usize]) -> CMat {
    CMat::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])])
}
