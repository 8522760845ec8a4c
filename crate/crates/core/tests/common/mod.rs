#![allow(dead_code)]

use metaplectic::linalg::{CMat, Mat};
use metaplectic::numeric::gaussian::CVec;
use metaplectic::numeric::{GaussianChirp, GridFunction};
use metaplectic::symplectic::{interchange, v_lower};
use metaplectic::{IndexSet, SymplecticMatrix};
use num_complex::Complex64;
use rand::Rng;

/// Random `γ·exp(iπMx·x + 2πib·x)`: diagonal of `Im M` in `[0.8, 1.4]`, off-diagonal
/// within `0.2`, `Re M` entries within `0.4`, `|Re b| < 0.5`, `|Im b| < 0.4`.
pub fn random_chirp<R: Rng>(rng: &mut R, d: usize) -> GaussianChirp {
    let mut m = CMat::zeros(d, d);
    for i in 0..d {
        for j in i..d {
            let re = rng.gen_range(-0.4..0.4);
            let im = if i == j { rng.gen_range(0.8..1.4) } else { rng.gen_range(-0.2..0.2) };
            m[(i, j)] = Complex64::new(re, im);
            m[(j, i)] = m[(i, j)];
        }
    }
    let b = CVec::from_fn(d, |_, _| Complex64::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.4..0.4)));
    let gamma = Complex64::from_polar(rng.gen_range(0.5..2.0), rng.gen_range(0.0..std::f64::consts::TAU));
    GaussianChirp::new(gamma, m, b).expect("valid chirp")
}

pub fn random_symmetric<R: Rng>(rng: &mut R, d: usize, scale: f64) -> Mat {
    let m = Mat::from_fn(d, d, |_, _| rng.gen_range(-scale..scale));
    (&m + m.transpose()) * 0.5
}

pub fn random_subset<R: Rng>(rng: &mut R, d: usize) -> IndexSet {
    IndexSet::from_mask(d, rng.gen_range(0..(1u64 << d)))
}

pub fn geometric(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| a * (b / a).powf(k as f64 / (n - 1) as f64)).collect()
}

/// `V_Q Π_{{1}} V_{Q₂}` in `d = 2`, whose upper-right block is `diag(1, 0)`.
pub fn diag_b_matrix() -> SymplecticMatrix {
    let q = Mat::from_row_slice(2, 2, &[0.3, 0.2, 0.2, -0.4]);
    let q2 = Mat::from_row_slice(2, 2, &[0.5, -0.1, -0.1, 0.7]);
    let j = IndexSet::new(2, &[0]).unwrap();
    &(&v_lower(&q).unwrap() * &interchange(&j)) * &v_lower(&q2).unwrap()
}

pub fn max_abs_diff(a: &GridFunction, b: &GridFunction) -> f64 {
    a.values().iter().zip(b.values()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}
