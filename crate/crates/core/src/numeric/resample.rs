//! Band-limited periodic interpolation of grid functions.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use super::fourier::{map_lines, ChirpZ};
use super::grid::GridFunction;
use crate::error::{Error, Result};
use crate::linalg::Mat;

/// Trigonometric coefficients `c_m`, `m = -n/2..n/2-1`, of one line, stored at `m + n/2`.
fn coefficients(line: &[Complex64], fft: &dyn rustfft::Fft<f64>) -> Vec<Complex64> {
    let n = line.len();
    let mut buf = line.to_vec();
    fft.process(&mut buf);
    let mut c = vec![Complex64::new(0.0, 0.0); n];
    for (k, v) in buf.into_iter().enumerate() {
        c[(k + n / 2) % n] = v / n as f64;
    }
    c
}

/// Evaluates the trigonometric interpolant of `line` (samples at `-T + k·2T/n`)
/// at `y_i = y0 + i·dy`, `i < count`. Points outside `[-T, T]` give zero.
pub fn interpolate_line(
    line: &[Complex64],
    extent: f64,
    y0: f64,
    dy: f64,
    count: usize,
    fft: &dyn rustfft::Fft<f64>,
    cz: &ChirpZ,
) -> Vec<Complex64> {
    let n = line.len();
    let t = extent;
    let mut c = coefficients(line, fft);
    let nyquist = c[0];
    c[0] = Complex64::new(0.0, 0.0);
    let s0 = (y0 + t) / (2.0 * t);
    let ds = dy / (2.0 * t);
    let mut out = cz.apply(&c, s0, ds, -(n as f64) / 2.0, 1.0);
    for (i, v) in out.iter_mut().enumerate().take(count) {
        let y = y0 + i as f64 * dy;
        if y < -t - 1e-12 * t || y > t + 1e-12 * t {
            *v = Complex64::new(0.0, 0.0);
        } else {
            *v += nyquist * (PI * (s0 + i as f64 * ds) * n as f64).cos();
        }
    }
    out
}

/// Plan pieces for [`interpolate_line`] with `count` outputs spaced `dy` on an `n`-sample line.
pub fn interpolation_plan(
    n: usize,
    extent: f64,
    dy: f64,
    count: usize,
) -> (std::sync::Arc<dyn rustfft::Fft<f64>>, ChirpZ) {
    (FftPlanner::new().plan_fft_forward(n), ChirpZ::new(n, count, dy / (2.0 * extent)))
}

/// `g(x) = f(a·x + b)` along `axis`, with `b` a function of the remaining
/// coordinates of each line. Points mapped outside `[-T, T]` are set to zero.
pub fn resample_axis(f: &GridFunction, axis: usize, a: f64, b: impl Fn(&[f64]) -> f64) -> GridFunction {
    let grid = *f.grid();
    let (n, t, h) = (grid.n(), grid.extent(), grid.step());
    let (fft, cz) = interpolation_plan(n, t, a * h, n);
    let values = map_lines(f, axis, |start, line| {
        let shift = b(&grid.coords(start));
        interpolate_line(line, t, -a * t + shift, a * h, n, fft.as_ref(), &cz)
    });
    GridFunction::from_parts(grid, values, f.aliasing_warning())
}

/// A coordinate substitution that rewrites only coordinate `axis`:
/// `x_axis ↦ Σ_j row_j x_j`.
struct RowSubstitution {
    axis: usize,
    row: Vec<f64>,
}

/// Splits `x ↦ Lx` into an axis permutation followed by single-coordinate
/// substitutions, from the partially pivoted `P·L = Lo·U`.
fn substitutions(l: &Mat) -> Result<(Vec<usize>, Vec<RowSubstitution>)> {
    let d = l.nrows();
    let lu = l.clone().lu();
    if !lu.is_invertible() {
        return Err(Error::Validation("rescaling matrix is singular".into()));
    }
    let mut perm = Mat::identity(d, d);
    lu.p().permute_rows(&mut perm);
    let (lo, up) = (lu.l(), lu.u());
    // (Pᵀ x)_i = x_{sigma(i)}
    let pt = perm.transpose();
    let sigma: Vec<usize> = (0..d).map(|i| (0..d).find(|&j| pt[(i, j)] == 1.0).expect("permutation")).collect();
    let mut subs = Vec::new();
    for i in 1..d {
        let mut row = vec![0.0; d];
        row[i] = 1.0;
        for j in 0..i {
            row[j] = lo[(i, j)];
        }
        if row[..i].iter().any(|&v| v != 0.0) {
            subs.push(RowSubstitution { axis: i, row });
        }
    }
    for i in (0..d).rev() {
        let row: Vec<f64> = (0..d).map(|j| if j >= i { up[(i, j)] } else { 0.0 }).collect();
        let trivial = row.iter().enumerate().all(|(j, &v)| v == if j == i { 1.0 } else { 0.0 });
        if !trivial {
            subs.push(RowSubstitution { axis: i, row });
        }
    }
    Ok((sigma, subs))
}

fn permute_axes(f: &GridFunction, sigma: &[usize]) -> GridFunction {
    let grid = *f.grid();
    let values = (0..grid.len())
        .map(|k| {
            let idx = grid.multi_index(k);
            let src: Vec<usize> = sigma.iter().map(|&s| idx[s]).collect();
            f.values()[grid.flat_index(&src)]
        })
        .collect();
    GridFunction::from_parts(grid, values, f.aliasing_warning())
}

/// `x ↦ f(Lx)` without the `|det L|^{1/2}` normalization.
pub fn compose_linear(f: &GridFunction, l: &Mat) -> Result<GridFunction> {
    let d = f.grid().dim();
    if l.nrows() != d || l.ncols() != d {
        return Err(Error::Dimension(format!("expected a {d}x{d} matrix, got {}x{}", l.nrows(), l.ncols())));
    }
    let (sigma, subs) = substitutions(l)?;
    let mut g = if sigma.iter().enumerate().all(|(i, &s)| i == s) { f.clone() } else { permute_axes(f, &sigma) };
    // Substitutions are listed in application order: Pᵀ, then the rows of Lo, then U.
    for sub in &subs {
        let (axis, row) = (sub.axis, &sub.row);
        g = resample_axis(&g, axis, row[axis], |x| {
            row.iter().enumerate().filter(|&(j, _)| j != axis).map(|(j, r)| r * x[j]).sum()
        });
    }
    Ok(g)
}
