//! Symplectic matrix algebra and metaplectic operators.
//!
//! The crate is split in three layers:
//!
//! * [`symplectic`]: validation of symplectic matrices, the elementary
//!   generators, Dopico-Johnson factorizations, free/shift-invertibility
//!   predicates and the `L^p` boundedness classification.
//! * [`numeric`]: metaplectic operators acting on sampled grid functions and
//!   on exactly propagated Gaussian chirps, time-frequency distributions,
//!   Lebesgue and modulation norms, and metaplectic quantization.
//! * [`probes`]: desk-scale experiments measuring operator-norm ratios over
//!   witness families.
//!
//! All operators on `L^2` are determined by their symplectic projection only
//! up to a unimodular constant; numerical comparisons between operators go
//! through [`numeric::phase_align_distance`].

pub mod error;
pub mod io;
pub mod linalg;
pub mod numeric;
pub mod probes;
pub mod symplectic;

pub use error::{Error, Result};
pub use symplectic::{IndexSet, SymplecticMatrix};
