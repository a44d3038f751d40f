//! Wick-ordered exponentials of the truncated free field (Gaussian
//! multiplicative chaos) and the Monte-Carlo estimators built on them.

mod estimators;
mod hermite;
mod kahane;
mod wick;

pub use estimators::{
    ball_indicator, cauchy_decay, chaos_mass, covariance_profile, mean_estimate, moment_estimate,
    moment_ladder, multifractal_fit, theoretical_zeta, GmcSampler, MomentLadder, MultifractalFit,
    ProfileBin, Sampling,
};
pub use hermite::{hermite, hermite_series};
pub use kahane::{kahane_check, ConvexFn, KahaneResult};
pub use wick::{wick_exp, wick_exp_values, GmcField};
