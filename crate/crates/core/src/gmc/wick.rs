use crate::spectral::{SpectralField, TorusGrid, TruncationScheme};
use crate::{Error, Result, Scalar};

/// Grid values of `Θ = e^{−β²σ/2} e^{βψ}`.
#[derive(Clone, Debug)]
pub struct GmcField<T: Scalar = f64> {
    pub grid: TorusGrid<T>,
    pub theta: Vec<T>,
    pub beta: f64,
    pub sigma: f64,
    pub scheme: Option<TruncationScheme>,
}

impl<T: Scalar> GmcField<T> {
    pub fn min(&self) -> T {
        self.theta.iter().copied().fold(T::infinity(), T::min)
    }

    /// `∫ Θ dx` by grid quadrature.
    pub fn total_mass(&self) -> T {
        self.grid.quadrature(&self.theta)
    }

    pub fn to_spectral(&self) -> SpectralField<T> {
        SpectralField::from_physical(&self.grid, &self.theta)
    }

    /// Zero-mode coefficient; `∫ Θ = 2π Θ̂(0)`.
    pub fn zero_mode(&self) -> T {
        let s = self.theta.iter().fold(T::zero(), |a, &v| a + v);
        T::TAU() * s / T::lit(self.grid.len() as f64)
    }
}

/// `e^{βψ − β²σ/2}` pointwise, computed as one exponential of the log.
pub fn wick_exp_values<T: Scalar>(psi: &[T], beta: f64, sigma: f64) -> Vec<T> {
    let b = T::lit(beta);
    let shift = T::lit(0.5 * beta * beta * sigma);
    psi.iter().map(|&v| (b * v - shift).exp()).collect()
}

/// Wick exponential of `psi` with variance `sigma`.
pub fn wick_exp<T: Scalar>(
    psi: &SpectralField<T>,
    beta: f64,
    sigma: f64,
    scheme: Option<TruncationScheme>,
) -> Result<GmcField<T>> {
    let theta = wick_exp_values(&psi.to_physical(), beta, sigma);
    if let Some(bad) = theta.iter().find(|v| !v.is_finite()) {
        return Err(Error::NumericAbort {
            step: 0,
            t: 0.0,
            what: format!("Wick exponential overflowed ({bad})"),
        });
    }
    Ok(GmcField {
        grid: psi.grid().clone(),
        theta,
        beta,
        sigma,
        scheme,
    })
}
