//! Seeded Gaussian samplers: free field `μ₁`, white noise `μ₀` and Wiener increments.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::spectral::{bracket_sq, SpectralField, TorusGrid, TruncationScheme};
use crate::{Error, Result, Scalar};

/// Identifies one independent random stream: a ChaCha8 key derived from
/// `seed` and the stream selector `stream_id`.
///
/// Within a stream, [`rng_at`](Self::rng_at) positions the generator at a
/// block reserved for one time step, so draws depend only on
/// `(seed, stream_id, step, mode)` and never on scheduling.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        RngStream { seed, stream_id }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        self.rng_at(0)
    }

    /// Generator positioned at the start of the block for `step`
    /// (`2^40` words per step).
    pub fn rng_at(&self, step: u64) -> ChaCha8Rng {
        let mut r = ChaCha8Rng::seed_from_u64(self.seed);
        r.set_stream(self.stream_id);
        r.set_word_pos((step as u128) << 40);
        r
    }

    /// An unrelated family of streams for a separate purpose (e.g. the noise
    /// path versus the initial data), keyed by `tag`.
    pub fn fork(&self, tag: u64) -> RngStream {
        RngStream {
            seed: splitmix64(self.seed ^ splitmix64(tag.wrapping_add(0x9E37_79B9_7F4A_7C15))),
            stream_id: self.stream_id,
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[inline]
pub fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// Hermitian Gaussian field with `E|c(n)|² = amp(n)²`.
///
/// On the half-lattice `Re c` and `Im c` are independent `N(0, amp²/2)`; the
/// zero mode is real `N(0, amp(0)²)`. Draws are taken in slot order, two per
/// half-lattice mode and one for the zero mode; modes with zero amplitude
/// consume no draws.
pub fn sample_gaussian_field<T: Scalar, R: Rng + ?Sized>(
    grid: &TorusGrid<T>,
    amp: &[T],
    rng: &mut R,
) -> SpectralField<T> {
    let mut f = SpectralField::zeros(grid);
    fill_gaussian(grid, amp, rng, f.coeffs_mut());
    f
}

pub(crate) fn fill_gaussian<T: Scalar, R: Rng + ?Sized>(
    grid: &TorusGrid<T>,
    amp: &[T],
    rng: &mut R,
    out: &mut [Complex<T>],
) {
    assert_eq!(amp.len(), grid.len());
    let m = grid.m();
    let half = T::FRAC_1_SQRT_2();
    for i1 in 0..m {
        for i2 in 0..m {
            if i1 == m / 2 || i2 == m / 2 {
                continue;
            }
            let idx = i1 * m + i2;
            if amp[idx] == T::zero() {
                continue;
            }
            if i1 == 0 && i2 == 0 {
                out[idx] = Complex::new(amp[idx] * T::lit(standard_normal(rng)), T::zero());
            } else if (1..m / 2).contains(&i2) || (i2 == 0 && (1..m / 2).contains(&i1)) {
                let s = amp[idx] * half;
                let re = T::lit(standard_normal(rng)) * s;
                let im = T::lit(standard_normal(rng)) * s;
                out[idx] = Complex::new(re, im);
                out[((m - i1) % m) * m + (m - i2) % m] = Complex::new(re, -im);
            }
        }
    }
}

/// Adds an independent Gaussian field with amplitudes `amp` to `f`; `f` must
/// vanish wherever `amp` is nonzero.
pub fn fill_gaussian_field<T: Scalar, R: Rng + ?Sized>(
    grid: &TorusGrid<T>,
    amp: &[T],
    rng: &mut R,
    f: &mut SpectralField<T>,
) {
    fill_gaussian(grid, amp, rng, f.coeffs_mut());
}

/// Standard complex Gaussians on every half-lattice mode (real at `n = 0`),
/// in the same draw order as [`sample_gaussian_field`].
pub fn sample_unit_noise<T: Scalar, R: Rng + ?Sized>(grid: &TorusGrid<T>, rng: &mut R) -> SpectralField<T> {
    let amp = vec![T::one(); grid.len()];
    sample_gaussian_field(grid, &amp, rng)
}

fn scheme_symbol(scheme: Option<&TruncationScheme>, n1: i64, n2: i64) -> f64 {
    scheme.map_or(1.0, |s| s.symbol(n1, n2))
}

/// Amplitudes `symbol(n)/⟨n⟩` of the (truncated) free field.
pub fn gff_amplitudes<T: Scalar>(grid: &TorusGrid<T>, scheme: Option<&TruncationScheme>) -> Vec<T> {
    grid.multiplier(|n1, n2| scheme_symbol(scheme, n1, n2) / bracket_sq(n1, n2).sqrt())
}

/// Amplitudes `symbol(n)` of (truncated) white noise.
pub fn white_amplitudes<T: Scalar>(grid: &TorusGrid<T>, scheme: Option<&TruncationScheme>) -> Vec<T> {
    grid.multiplier(|n1, n2| scheme_symbol(scheme, n1, n2))
}

/// Sample of the massive free field `Σ symbol(n) g_n/⟨n⟩ e_n`.
pub fn sample_gff<T: Scalar, R: Rng + ?Sized>(
    grid: &TorusGrid<T>,
    scheme: Option<&TruncationScheme>,
    rng: &mut R,
) -> SpectralField<T> {
    sample_gaussian_field(grid, &gff_amplitudes(grid, scheme), rng)
}

/// Sample of white noise `Σ symbol(n) h_n e_n`.
pub fn sample_white<T: Scalar, R: Rng + ?Sized>(
    grid: &TorusGrid<T>,
    scheme: Option<&TruncationScheme>,
    rng: &mut R,
) -> SpectralField<T> {
    sample_gaussian_field(grid, &white_amplitudes(grid, scheme), rng)
}

/// Increment of the cylindrical Wiener process over `dt`: per-mode variance
/// `dt · symbol(n)²`.
pub fn wiener_increment<T: Scalar, R: Rng + ?Sized>(
    grid: &TorusGrid<T>,
    scheme: Option<&TruncationScheme>,
    dt: f64,
    rng: &mut R,
) -> Result<SpectralField<T>> {
    if !(dt > 0.0) {
        return Err(Error::InvalidArgument(format!("time step {dt} must be positive")));
    }
    let s = dt.sqrt();
    let amp = grid.multiplier(|n1, n2| s * scheme_symbol(scheme, n1, n2));
    Ok(sample_gaussian_field(grid, &amp, rng))
}
