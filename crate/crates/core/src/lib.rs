//! Sinh-arcsinh family of flexible distributions.
//!
//! Three constructions built on the symmetric sinh-arcsinh density `f0(x; delta)`:
//!
//! - [`sas`]: the original sinh-arcsinh distribution, skewness `epsilon`, tail weight `delta`.
//! - [`two_piece`]: two scaled halves of `f0` joined at the mode (main-body asymmetry).
//! - [`skew_symmetric`]: `2 f0(z) F0(lambda z)` (tail asymmetry), with the skew-normal at `delta = 1`.
//!
//! On top of the densities sit maximum-likelihood fitting with profile-likelihood
//! intervals ([`inference`]), scalar and functional asymmetry measures ([`asymmetry`]),
//! a replicate-level estimator study ([`montecarlo`]) and envelope QQ diagnostics
//! ([`diagnostics`]). Shared kernels live in [`numerics`].

pub mod asymmetry;
pub mod diagnostics;
mod error;
pub mod inference;
pub mod montecarlo;
pub mod numerics;
pub mod sas;
pub mod skew_symmetric;
pub mod two_piece;

pub use error::{Error, Result};
pub use inference::{Distribution, FitReport, ModelFamily, ModelSpec};
pub use numerics::OptimizerSettings;
pub use sas::{SasParams, SymmetricSas};
pub use skew_symmetric::SsSasParams;
pub use two_piece::{Parameterisation, TpSasParams};
