//! Truncated Gibbs measures `dρ_N ∝ exp(−λ C_N ∫ e^{βQu}) dμ₁` (and
//! `ρ_N ⊗ μ₀` for the wave): exact samplers, the generator of the heat
//! flow on cylinder observables, and invariance tests.

mod generator;
mod invariance;
mod sampler;

pub use generator::{
    generator_apply, m_functional, Coord, GeneratorContext, Observable,
};
pub use invariance::{
    dynamical_invariance, dynamical_observables, generator_invariance, DynamicalConfig, DynamicalOutcome, Flow,
    GeneratorOutcome,
};
pub use sampler::{density_rn, sample_ensemble, GibbsSample, GibbsSampler};
