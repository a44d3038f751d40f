//! Torus grids, Fourier fields, truncations, propagator symbols and kernels.

mod fft;
mod field;
mod grid;
pub mod kernels;
mod sobolev;
mod symbols;
mod truncation;

pub use fft::Fft2;
pub use field::SpectralField;
pub use grid::{bracket_sq, in_half_lattice, TorusGrid};
pub use sobolev::{sobolev_h_norm_sq, sobolev_norm};
pub use symbols::{
    damped_noise_covariance, damped_response, damped_transition, heat_symbol, sinc_t, wave_symbols,
    WaveSymbols,
};
pub use truncation::{
    bump, mollifier_decay_radius, mollifier_kernel, mollifier_symbol, smooth_cutoff, TruncationKind,
    TruncationScheme,
};
