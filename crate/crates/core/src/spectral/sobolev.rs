use super::field::SpectralField;
use super::grid::bracket_sq;
use crate::{Error, Result, Scalar};

/// `‖⟨∇⟩^s f‖_{L^p}` with grid quadrature; `p = ∞` gives the grid maximum.
pub fn sobolev_norm<T: Scalar>(f: &SpectralField<T>, s: f64, p: f64) -> Result<T> {
    if !(p >= 1.0) {
        return Err(Error::InvalidArgument(format!("Lebesgue exponent {p} < 1")));
    }
    let grid = f.grid();
    let g = if s == 0.0 {
        f.clone()
    } else {
        f.with_multiplier(&grid.multiplier(|n1, n2| bracket_sq(n1, n2).powf(0.5 * s)))
    };
    let values = g.to_physical();
    if p.is_infinite() {
        return Ok(values.iter().fold(T::zero(), |a, v| a.max(v.abs())));
    }
    let pt = T::lit(p);
    let powered: Vec<T> = values.iter().map(|v| v.abs().powf(pt)).collect();
    Ok(grid.quadrature(&powered).powf(T::one() / pt))
}

/// `‖f‖_{H^s}² = Σ ⟨n⟩^{2s} |c_n|²`, computed on coefficients.
pub fn sobolev_h_norm_sq<T: Scalar>(f: &SpectralField<T>, s: f64) -> T {
    let grid = f.grid();
    let mut acc = T::zero();
    for (idx, c) in f.coeffs().iter().enumerate() {
        let (n1, n2) = grid.mode(idx);
        acc = acc + T::lit(bracket_sq(n1, n2).powf(s)) * c.norm_sqr();
    }
    acc
}
