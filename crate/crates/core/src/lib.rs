//! Spectral simulation of the stochastic Liouville heat and damped wave
//! equations on `T² = (R/2πZ)²`, with the Gaussian multiplicative chaos,
//! truncated Gibbs measures and Monte-Carlo estimators built on top.
//!
//! Fields, transforms and time steppers are generic over [`Scalar`]
//! (`f32`/`f64`); estimators work in `f64`. The wave parameter table uses
//! exact arithmetic in `Q(√3)` ([`exact::QSqrt3`]).

pub mod convolution;
pub mod ensemble;
pub mod exact;
pub mod gibbs;
pub mod gmc;
pub mod heat;
mod error;
pub mod quadrature;
mod scalar;
pub mod random;
pub mod spectral;
pub mod stats;
pub mod wave;

pub use error::{Error, Result};
pub use exact::QSqrt3;
pub use scalar::Scalar;

pub type Grid = spectral::TorusGrid<f64>;
pub type Field = spectral::SpectralField<f64>;
pub type GridF32 = spectral::TorusGrid<f32>;
pub type FieldF32 = spectral::SpectralField<f32>;
