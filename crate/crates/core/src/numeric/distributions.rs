//! Time-frequency distributions of grid functions, on the `2d`-dimensional grid
//! with the same `n` and `T`.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::fourier::{partial_ft, ChirpZ};
use super::grid::GridFunction;
use super::ops::{apply_metaplectic, Generators};
use super::resample::{interpolate_line, interpolation_plan};
use crate::error::{Error, Result};
use crate::linalg::{from_blocks, Mat, INVERTIBILITY_RTOL};
use crate::symplectic::{dj_factorize, IndexSet, SymplecticMatrix};

fn check_pair(f: &GridFunction, g: &GridFunction) -> Result<()> {
    f.check_same_grid(g)
}

fn frequency_axes(d: usize) -> IndexSet {
    IndexSet::new(2 * d, &(d..2 * d).collect::<Vec<_>>()).expect("in range")
}

/// `L_{1/2} = [[I, I/2], [I, -I/2]]`, so `(f ⊗ ḡ)(L_{1/2}(x, t)) = f(x + t/2)·conj(g(x - t/2))`.
pub fn wigner_rescaling(d: usize) -> Mat {
    let i = Mat::identity(d, d);
    from_blocks(&i, &(&i * 0.5), &i, &(&i * -0.5))
}

/// `L_st = [[0, I], [-I, I]]`, so `(f ⊗ ḡ)(L_st(x, t)) = f(t)·conj(g(t - x))`.
pub fn stft_rescaling(d: usize) -> Mat {
    let i = Mat::identity(d, d);
    let z = Mat::zeros(d, d);
    from_blocks(&z, &i, &(-&i), &i)
}

/// Cross-Wigner distribution `W(f, g) = 𝓕₂ 𝔗_{L_{1/2}} (f ⊗ ḡ)`.
pub fn wigner(f: &GridFunction, g: &GridFunction) -> Result<GridFunction> {
    check_pair(f, g)?;
    let d = f.grid().dim();
    let t = f.tensor(&g.conj())?.rescale(&wigner_rescaling(d))?;
    Ok(partial_ft(&frequency_axes(d), &t))
}

/// Short-time Fourier transform `V_g f = 𝓕₂ 𝔗_{L_st} (f ⊗ ḡ)`.
pub fn stft(window: &GridFunction, f: &GridFunction) -> Result<GridFunction> {
    check_pair(f, window)?;
    let d = f.grid().dim();
    let t = f.tensor(&window.conj())?.rescale(&stft_rescaling(d))?;
    Ok(partial_ft(&frequency_axes(d), &t))
}

/// Rihacek distribution `f(x)·conj(ĝ(ξ))·e^{-2πiξ·x}`.
pub fn rihacek(f: &GridFunction, g: &GridFunction) -> Result<GridFunction> {
    check_pair(f, g)?;
    let d = f.grid().dim();
    let gh = partial_ft(&IndexSet::full(d), g).conj();
    let prod = f.tensor(&gh)?;
    let grid = *prod.grid();
    let values = prod
        .values()
        .iter()
        .enumerate()
        .map(|(k, v)| {
            let z = grid.coords(k);
            let xi_x: f64 = (0..d).map(|i| z[i] * z[d + i]).sum();
            v * Complex64::from_polar(1.0, -2.0 * PI * xi_x)
        })
        .collect();
    Ok(GridFunction::from_parts(grid, values, prod.aliasing_warning()))
}

/// Metaplectic Wigner distribution `W_𝒜(f, g) = Â(f ⊗ ḡ)` for a `4d × 4d` symplectic `𝒜`.
pub fn wigner_metaplectic(a: &SymplecticMatrix, f: &GridFunction, g: &GridFunction) -> Result<GridFunction> {
    check_pair(f, g)?;
    let d = f.grid().dim();
    if a.dim() != 2 * d {
        return Err(Error::Dimension(format!("expected a {}x{} matrix for d = {d}", 4 * d, 4 * d)));
    }
    apply_metaplectic(&dj_factorize(a, INVERTIBILITY_RTOL)?, &f.tensor(&g.conj())?)
}

fn require_1d(f: &GridFunction) -> Result<()> {
    if f.grid().dim() != 1 {
        return Err(Error::Dimension("direct quadrature is implemented for d = 1".into()));
    }
    Ok(())
}

/// Direct quadrature of `∫ f(x + t/2) conj(g(x - t/2)) e^{-2πitξ} dt` with
/// half-step samples from trigonometric interpolation.
pub fn wigner_direct(f: &GridFunction, g: &GridFunction) -> Result<GridFunction> {
    check_pair(f, g)?;
    require_1d(f)?;
    let grid1 = *f.grid();
    let (n, h, t) = (grid1.n(), grid1.step(), grid1.extent());
    let (fft, cz) = interpolation_plan(n, t, h / 2.0, 2 * n);
    let fine_f = interpolate_line(f.values(), t, -t, h / 2.0, 2 * n, fft.as_ref(), &cz);
    let fine_g = interpolate_line(g.values(), t, -t, h / 2.0, 2 * n, fft.as_ref(), &cz);
    let at =
        |v: &[Complex64], i: i64| if (0..2 * n as i64).contains(&i) { v[i as usize] } else { Complex64::new(0.0, 0.0) };
    let grid = grid1.with_dim(2)?;
    let sum = ChirpZ::new(2 * n, n, -h * h);
    let mut values = vec![Complex64::new(0.0, 0.0); grid.len()];
    for k in 0..n {
        let c = 2 * k as i64;
        let line: Vec<Complex64> = (0..2 * n as i64)
            .map(|jj| {
                let j = jj - n as i64;
                at(&fine_f, c + j) * at(&fine_g, c - j).conj()
            })
            .collect();
        // Σ_j a_j e^{-2πi ξ_m (j h)}, j = -n..n-1
        let out = sum.apply(&line, t, -h, -(n as f64) * h, h);
        for (m, v) in out.into_iter().enumerate() {
            values[k * n + m] = v * h;
        }
    }
    Ok(GridFunction::from_parts(grid, values, f.aliasing_warning() || g.aliasing_warning()))
}

/// Direct quadrature `V_g f(x_k, ξ) = h Σ_j f(x_j) conj(g(x_j - x_k)) e^{-2πiξx_j}`.
pub fn stft_direct(window: &GridFunction, f: &GridFunction) -> Result<GridFunction> {
    check_pair(f, window)?;
    require_1d(f)?;
    let grid1 = *f.grid();
    let (n, h, t) = (grid1.n(), grid1.step(), grid1.extent());
    let grid = grid1.with_dim(2)?;
    let cz = ChirpZ::new(n, n, -h * h);
    let mut values = vec![Complex64::new(0.0, 0.0); grid.len()];
    for k in 0..n {
        let line: Vec<Complex64> = (0..n)
            .map(|j| {
                let gi = j as i64 - k as i64 + (n / 2) as i64;
                if (0..n as i64).contains(&gi) {
                    f.values()[j] * window.values()[gi as usize].conj()
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect();
        let out = cz.apply(&line, t, -h, -t, h);
        for (m, v) in out.into_iter().enumerate() {
            values[k * n + m] = v * h;
        }
    }
    Ok(GridFunction::from_parts(grid, values, f.aliasing_warning()))
}
