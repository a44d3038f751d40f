use std::fmt;
use std::sync::Arc;

use num_complex::Complex;

use super::fft::Fft2;
use crate::{Error, Result, Scalar};

/// Collocation grid of `M × M` points on the torus `(R/2πZ)²`.
///
/// Arrays are row-major: index `i1 * M + i2` holds the point `(i1 h, i2 h)`
/// or the mode `(n1, n2)` with `n_i ≡ i_i (mod M)`, `−M/2 ≤ n_i < M/2`.
/// Modes with a component equal to `−M/2` are the Nyquist modes; real fields
/// keep them at zero.
#[derive(Clone)]
pub struct TorusGrid<T: Scalar = f64> {
    m: usize,
    fft: Arc<Fft2<T>>,
}

impl<T: Scalar> fmt::Debug for TorusGrid<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TorusGrid").field("m", &self.m).finish()
    }
}

impl<T: Scalar> PartialEq for TorusGrid<T> {
    fn eq(&self, other: &Self) -> bool {
        self.m == other.m
    }
}

impl<T: Scalar> TorusGrid<T> {
    pub fn new(m: usize) -> Result<Self> {
        if m < 4 || m % 2 != 0 {
            return Err(Error::InvalidGrid(m));
        }
        Ok(TorusGrid {
            m,
            fft: Arc::new(Fft2::new(m)),
        })
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.m * self.m
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> T {
        T::TAU() / T::lit(self.m as f64)
    }

    pub fn cell_area(&self) -> T {
        let h = self.spacing();
        h * h
    }

    pub fn fft(&self) -> &Fft2<T> {
        &self.fft
    }

    /// Mode `(n1, n2)` stored at `idx`.
    #[inline]
    pub fn mode(&self, idx: usize) -> (i64, i64) {
        let m = self.m as i64;
        let wrap = |i: i64| if i < m / 2 { i } else { i - m };
        (wrap(idx as i64 / m), wrap(idx as i64 % m))
    }

    /// Array slot of mode `n`, reduced mod `M`.
    #[inline]
    pub fn index(&self, n1: i64, n2: i64) -> usize {
        let m = self.m as i64;
        (n1.rem_euclid(m) * m + n2.rem_euclid(m)) as usize
    }

    #[inline]
    pub fn is_nyquist(&self, idx: usize) -> bool {
        let h = self.m / 2;
        idx / self.m == h || idx % self.m == h
    }

    /// Slot of `−n`.
    #[inline]
    pub fn conjugate_index(&self, idx: usize) -> usize {
        let m = self.m;
        let (i1, i2) = (idx / m, idx % m);
        ((m - i1) % m) * m + (m - i2) % m
    }

    /// Physical point `(x1, x2)` at `idx`.
    pub fn point(&self, idx: usize) -> (T, T) {
        let h = self.spacing();
        (
            h * T::lit((idx / self.m) as f64),
            h * T::lit((idx % self.m) as f64),
        )
    }

    /// `h² Σ f`. The constant 1 integrates to `4π²` exactly.
    pub fn quadrature(&self, values: &[T]) -> T {
        let s = values.iter().fold(T::zero(), |a, &v| a + v);
        T::lit(4.0) * T::PI() * T::PI() * s / T::lit(self.len() as f64)
    }

    /// Tabulates a real Fourier multiplier; Nyquist slots are zero.
    pub fn multiplier(&self, f: impl Fn(i64, i64) -> f64) -> Vec<T> {
        (0..self.len())
            .map(|idx| {
                if self.is_nyquist(idx) {
                    T::zero()
                } else {
                    let (n1, n2) = self.mode(idx);
                    T::lit(f(n1, n2))
                }
            })
            .collect()
    }

    /// `f(x_j) = (1/2π) Σ_n c_n e^{i n·x_j}` for a complex coefficient array.
    pub fn synthesize(&self, coeffs: &mut [Complex<T>]) {
        self.fft.inverse(coeffs);
        let s = T::one() / T::TAU();
        for c in coeffs.iter_mut() {
            *c = c.scale(s);
        }
    }

    /// Inverse of [`synthesize`](Self::synthesize): `c_n = (2π/M²) Σ_j f_j e^{−i n·x_j}`.
    pub fn analyze(&self, values: &mut [Complex<T>]) {
        self.fft.forward(values);
        let s = T::TAU() / T::lit(self.len() as f64);
        for c in values.iter_mut() {
            *c = c.scale(s);
        }
    }
}

/// `n` lies in the half-lattice `{n2 > 0} ∪ {n2 = 0, n1 > 0}`.
#[inline]
pub fn in_half_lattice(n1: i64, n2: i64) -> bool {
    n2 > 0 || (n2 == 0 && n1 > 0)
}

/// `⟨n⟩² = 1 + |n|²`.
#[inline]
pub fn bracket_sq(n1: i64, n2: i64) -> f64 {
    1.0 + (n1 * n1 + n2 * n2) as f64
}
