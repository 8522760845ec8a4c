//! Metaplectic operators on sampled functions and on symbolic Gaussians.
//!
//! Grid functions live on uniform periodic grids; the default grids are
//! self-dual (`T = √n/2`), on which the sampled Fourier transform maps the grid
//! onto itself and is unitary.

pub mod distributions;
pub mod fourier;
pub mod gaussian;
pub mod grid;
pub mod norms;
pub mod ops;
pub mod quantize;
pub mod resample;

pub use distributions::{rihacek, stft, stft_direct, wigner, wigner_direct, wigner_metaplectic};
pub use fourier::{partial_ft, partial_ift};
pub use gaussian::{gaussian_apply, siegel_action, GaussianChirp};
pub use grid::{Grid, GridFunction};
pub use norms::{lp_norm, lpq_norm, lpq_norm_split, mp_norm};
pub use ops::{
    apply_metaplectic, chirp_apply, free_apply_direct, multiplier_apply, phase_align, phase_align_distance,
    rescale_apply, tf_shift, Generators, PhaseTolerance,
};
pub use quantize::{opa_apply, opa_build, symbol_from_fn, QuantizedOperator};
