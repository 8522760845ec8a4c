use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest number of samples a single grid function may hold.
pub const MAX_SAMPLES: usize = 1 << 22;

/// Threshold for the outer-shell decay test, relative to the sup norm.
pub const DECAY_RTOL: f64 = 1e-10;

/// Uniform periodic grid with `n` samples per axis at `x_k = -T + k·(2T/n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    dim: usize,
    n: usize,
    extent: f64,
}

impl Grid {
    pub fn new(dim: usize, n: usize, extent: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Dimension("grid dimension must be positive".into()));
        }
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::Validation(format!("samples per axis must be a power of two >= 8, got {n}")));
        }
        if !(extent.is_finite() && extent > 0.0) {
            return Err(Error::Validation(format!("extent must be positive and finite, got {extent}")));
        }
        match n.checked_pow(dim as u32) {
            Some(len) if len <= MAX_SAMPLES => Ok(Grid { dim, n, extent }),
            _ => Err(Error::TooLarge(format!("{n}^{dim} samples exceeds the limit of {MAX_SAMPLES}"))),
        }
    }

    /// Grid with `T = √n / 2`, on which the sampled Fourier transform maps the
    /// grid onto itself and is unitary.
    pub fn self_dual(dim: usize, n: usize) -> Result<Self> {
        Grid::new(dim, n, (n as f64).sqrt() / 2.0)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn extent(&self) -> f64 {
        self.extent
    }

    pub fn step(&self) -> f64 {
        2.0 * self.extent / self.n as f64
    }

    /// Quadrature weight `h^d`.
    pub fn cell_volume(&self) -> f64 {
        self.step().powi(self.dim as i32)
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_self_dual(&self) -> bool {
        (self.extent * self.extent * 4.0 / self.n as f64 - 1.0).abs() < 1e-12
    }

    pub fn point(&self, k: usize) -> f64 {
        -self.extent + k as f64 * self.step()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|k| self.point(k)).collect()
    }

    /// Index of `x = 0`.
    pub fn origin_index(&self) -> usize {
        self.n / 2
    }

    /// Stride of `axis` in the row-major layout (axis 0 varies slowest).
    pub fn stride(&self, axis: usize) -> usize {
        self.n.pow((self.dim - 1 - axis) as u32)
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim];
        for a in (0..self.dim).rev() {
            idx[a] = flat % self.n;
            flat /= self.n;
        }
        idx
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &k| acc * self.n + k)
    }

    pub fn coords(&self, flat: usize) -> Vec<f64> {
        self.multi_index(flat).into_iter().map(|k| self.point(k)).collect()
    }

    /// Same `n` and `T` in `dim` dimensions.
    pub fn with_dim(&self, dim: usize) -> Result<Self> {
        Grid::new(dim, self.n, self.extent)
    }

    /// Starting offsets of all lines parallel to `axis`.
    pub fn line_starts(&self, axis: usize) -> Vec<usize> {
        let stride = self.stride(axis);
        let block = stride * self.n;
        let mut starts = Vec::with_capacity(self.len() / self.n);
        for outer in (0..self.len()).step_by(block) {
            for inner in 0..stride {
                starts.push(outer + inner);
            }
        }
        starts
    }

    pub fn same_as(&self, other: &Grid) -> bool {
        self.dim == other.dim && self.n == other.n && (self.extent - other.extent).abs() <= 1e-12 * self.extent
    }
}

/// Complex samples on a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: Grid,
    values: Vec<Complex64>,
    /// Set once an operation produced a result that does not decay at the boundary.
    aliasing: bool,
}

impl GridFunction {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!("expected {} samples, got {}", grid.len(), values.len())));
        }
        if let Some(k) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::Validation(format!("sample {k} is not finite")));
        }
        Ok(GridFunction { grid, values, aliasing: false })
    }

    pub(crate) fn from_parts(grid: Grid, values: Vec<Complex64>, aliasing: bool) -> Self {
        GridFunction { grid, values, aliasing }
    }

    pub fn from_fn(grid: Grid, f: impl Fn(&[f64]) -> Complex64) -> Self {
        let values = (0..grid.len()).map(|k| f(&grid.coords(k))).collect();
        GridFunction { grid, values, aliasing: false }
    }

    pub fn zeros(grid: Grid) -> Self {
        GridFunction { grid, values: vec![Complex64::new(0.0, 0.0); grid.len()], aliasing: false }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn aliasing_warning(&self) -> bool {
        self.aliasing
    }

    pub(crate) fn with_aliasing(mut self, flag: bool) -> Self {
        self.aliasing |= flag;
        self
    }

    /// `max |f|` over the outermost shell of the grid.
    pub fn boundary_max(&self) -> f64 {
        let n = self.grid.n;
        (0..self.values.len())
            .filter(|&k| self.grid.multi_index(k).iter().any(|&i| i == 0 || i == n - 1))
            .map(|k| self.values[k].norm())
            .fold(0.0, f64::max)
    }

    pub fn sup(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Boundary decay flag: the outer shell is below `DECAY_RTOL` times the sup norm.
    pub fn decays(&self) -> bool {
        self.boundary_max() <= DECAY_RTOL * self.sup()
    }

    /// Discrete `⟨f, g⟩ = h^d Σ f·conj(g)`.
    pub fn inner(&self, other: &GridFunction) -> Result<Complex64> {
        self.check_same_grid(other)?;
        let s: Complex64 = self.values.iter().zip(&other.values).map(|(a, b)| a * b.conj()).sum();
        Ok(s * self.grid.cell_volume())
    }

    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.cell_volume()).sqrt()
    }

    pub fn scale(&self, c: Complex64) -> GridFunction {
        self.map(|v| v * c)
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> GridFunction {
        GridFunction { grid: self.grid, values: self.values.iter().map(|&v| f(v)).collect(), aliasing: self.aliasing }
    }

    pub fn conj(&self) -> GridFunction {
        self.map(|v| v.conj())
    }

    pub fn check_same_grid(&self, other: &GridFunction) -> Result<()> {
        if self.grid.same_as(&other.grid) {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!("{:?} vs {:?}", self.grid, other.grid)))
        }
    }

    /// `(f ⊗ g)(x, y) = f(x)·g(y)` on the grid of dimension `d_f + d_g`.
    pub fn tensor(&self, other: &GridFunction) -> Result<GridFunction> {
        if self.grid.n != other.grid.n || (self.grid.extent - other.grid.extent).abs() > 1e-12 * self.grid.extent {
            return Err(Error::GridMismatch("tensor factors must share n and T".into()));
        }
        let grid = self.grid.with_dim(self.grid.dim + other.grid.dim)?;
        let mut values = Vec::with_capacity(grid.len());
        for a in &self.values {
            values.extend(other.values.iter().map(|b| a * b));
        }
        Ok(GridFunction { grid, values, aliasing: self.aliasing || other.aliasing })
    }
}
