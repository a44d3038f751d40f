use num_complex::Complex;

use super::grid::{in_half_lattice, TorusGrid};
use crate::{Error, Result, Scalar};

/// Real field on a [`TorusGrid`], stored as its coefficients against
/// `e_n(x) = e^{i n·x}/(2π)`.
///
/// Coefficients are exactly Hermitian (`c(−n) = conj c(n)`) and zero on the
/// Nyquist modes. Every constructor enforces this.
#[derive(Clone, Debug)]
pub struct SpectralField<T: Scalar = f64> {
    grid: TorusGrid<T>,
    coeffs: Vec<Complex<T>>,
}

#[inline]
fn czero<T: Scalar>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

impl<T: Scalar> SpectralField<T> {
    pub fn zeros(grid: &TorusGrid<T>) -> Self {
        SpectralField {
            grid: grid.clone(),
            coeffs: vec![czero(); grid.len()],
        }
    }

    /// Field whose physical values are all `c`.
    pub fn constant(grid: &TorusGrid<T>, c: T) -> Self {
        let mut f = Self::zeros(grid);
        f.coeffs[0] = Complex::new(T::TAU() * c, T::zero());
        f
    }

    /// Validates a coefficient array. Hermitian and Nyquist defects up to
    /// `tol` (relative to the largest coefficient) are projected away; larger
    /// ones are rejected.
    pub fn from_coeffs(grid: &TorusGrid<T>, coeffs: Vec<Complex<T>>, tol: f64) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::LengthMismatch {
                got: coeffs.len(),
                want: grid.len(),
            });
        }
        let scale = coeffs
            .iter()
            .map(|c| c.norm().as_f64())
            .fold(0.0_f64, f64::max)
            .max(f64::MIN_POSITIVE);
        let mut defect = 0.0_f64;
        for idx in 0..grid.len() {
            let d = if grid.is_nyquist(idx) {
                coeffs[idx].norm().as_f64()
            } else {
                (coeffs[idx] - coeffs[grid.conjugate_index(idx)].conj())
                    .norm()
                    .as_f64()
            };
            defect = defect.max(d / scale);
        }
        if !(defect <= tol) {
            return Err(Error::NotHermitian { defect, tol });
        }
        let mut f = SpectralField {
            grid: grid.clone(),
            coeffs,
        };
        f.symmetrize();
        Ok(f)
    }

    /// Builds a field from `f(n)` evaluated on the half-lattice and at `n = 0`
    /// (imaginary part dropped there); the rest follows by symmetry.
    pub fn from_modes(grid: &TorusGrid<T>, f: impl Fn(i64, i64) -> Complex<T>) -> Self {
        let mut out = Self::zeros(grid);
        for idx in 0..grid.len() {
            if grid.is_nyquist(idx) {
                continue;
            }
            let (n1, n2) = grid.mode(idx);
            if n1 == 0 && n2 == 0 {
                out.coeffs[idx] = Complex::new(f(0, 0).re, T::zero());
            } else if in_half_lattice(n1, n2) {
                let c = f(n1, n2);
                out.coeffs[idx] = c;
                out.coeffs[grid.conjugate_index(idx)] = c.conj();
            }
        }
        out
    }

    /// Samples `values` (row-major physical grid values) into coefficients.
    pub fn from_physical(grid: &TorusGrid<T>, values: &[T]) -> Self {
        assert_eq!(values.len(), grid.len());
        let mut buf: Vec<Complex<T>> = values.iter().map(|&v| Complex::new(v, T::zero())).collect();
        grid.analyze(&mut buf);
        let mut f = SpectralField { grid: grid.clone(), coeffs: buf };
        f.symmetrize();
        f
    }

    /// Transforms two real arrays with one complex FFT.
    pub fn from_physical_pair(grid: &TorusGrid<T>, a: &[T], b: &[T]) -> (Self, Self) {
        assert_eq!(a.len(), grid.len());
        assert_eq!(b.len(), grid.len());
        let mut buf: Vec<Complex<T>> = a.iter().zip(b).map(|(&x, &y)| Complex::new(x, y)).collect();
        grid.analyze(&mut buf);
        let half = T::lit(0.5);
        let mut fa = vec![czero(); grid.len()];
        let mut fb = vec![czero(); grid.len()];
        for idx in 0..grid.len() {
            if grid.is_nyquist(idx) {
                continue;
            }
            let p = buf[idx];
            let q = buf[grid.conjugate_index(idx)].conj();
            fa[idx] = (p + q).scale(half);
            let d = p - q;
            fb[idx] = Complex::new(d.im * half, -d.re * half);
        }
        (
            SpectralField { grid: grid.clone(), coeffs: fa },
            SpectralField { grid: grid.clone(), coeffs: fb },
        )
    }

    pub fn grid(&self) -> &TorusGrid<T> {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    /// Coefficient of mode `n` (zero for Nyquist or out-of-range modes).
    pub fn coeff(&self, n1: i64, n2: i64) -> Complex<T> {
        let h = (self.grid.m() / 2) as i64;
        if n1 <= -h || n1 >= h || n2 <= -h || n2 >= h {
            return czero();
        }
        self.coeffs[self.grid.index(n1, n2)]
    }

    /// Overwrites `c(n)` and `c(−n)` consistently.
    pub fn set_mode(&mut self, n1: i64, n2: i64, c: Complex<T>) {
        let idx = self.grid.index(n1, n2);
        if self.grid.is_nyquist(idx) {
            return;
        }
        if n1 == 0 && n2 == 0 {
            self.coeffs[idx] = Complex::new(c.re, T::zero());
        } else {
            self.coeffs[idx] = c;
            let j = self.grid.conjugate_index(idx);
            self.coeffs[j] = c.conj();
        }
    }

    /// Real part of the zero-mode coefficient; `∫ f = 2π · zero_mode`.
    pub fn zero_mode(&self) -> T {
        self.coeffs[0].re
    }

    pub fn to_physical(&self) -> Vec<T> {
        let mut buf = self.coeffs.clone();
        self.grid.synthesize(&mut buf);
        buf.into_iter().map(|c| c.re).collect()
    }

    /// Physical values of two fields with one complex FFT.
    pub fn to_physical_pair(a: &Self, b: &Self) -> (Vec<T>, Vec<T>) {
        assert!(a.grid == b.grid, "fields on different grids");
        let mut buf: Vec<Complex<T>> = a
            .coeffs
            .iter()
            .zip(&b.coeffs)
            .map(|(&x, &y)| Complex::new(x.re - y.im, x.im + y.re))
            .collect();
        a.grid.synthesize(&mut buf);
        (
            buf.iter().map(|c| c.re).collect(),
            buf.iter().map(|c| c.im).collect(),
        )
    }

    /// Multiplies coefficient `n` by `mult[idx]`.
    pub fn apply_multiplier(&mut self, mult: &[T]) {
        assert_eq!(mult.len(), self.coeffs.len());
        for (c, &s) in self.coeffs.iter_mut().zip(mult) {
            *c = c.scale(s);
        }
    }

    pub fn with_multiplier(&self, mult: &[T]) -> Self {
        let mut out = self.clone();
        out.apply_multiplier(mult);
        out
    }

    pub fn scale(&mut self, s: T) {
        for c in self.coeffs.iter_mut() {
            *c = c.scale(s);
        }
    }

    /// `self += s · other`.
    pub fn axpy(&mut self, s: T, other: &Self) {
        assert!(self.grid == other.grid, "fields on different grids");
        for (c, &o) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *c = *c + o.scale(s);
        }
    }

    /// `Σ_n |c_n|²`, the squared `L²` norm.
    pub fn norm_sq(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |a, c| a + c.norm_sqr())
    }

    /// Largest Hermitian defect `|c(n) − conj c(−n)|`.
    pub fn hermitian_defect(&self) -> T {
        let mut d = T::zero();
        for idx in 0..self.grid.len() {
            let e = (self.coeffs[idx] - self.coeffs[self.grid.conjugate_index(idx)].conj()).norm();
            d = d.max(e);
        }
        d
    }

    /// Copies the coefficients onto another grid, keeping the modes both
    /// grids share and zeroing the rest.
    pub fn resample(&self, grid: &TorusGrid<T>) -> Self {
        let mut out = Self::zeros(grid);
        let h = (grid.m().min(self.grid.m()) / 2) as i64;
        for n1 in (1 - h)..h {
            for n2 in (1 - h)..h {
                out.coeffs[grid.index(n1, n2)] = self.coeffs[self.grid.index(n1, n2)];
            }
        }
        out
    }

    pub(crate) fn coeffs_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.coeffs
    }

    /// Replaces `c` with the Hermitian part and zeroes the Nyquist slots.
    fn symmetrize(&mut self) {
        let g = &self.grid;
        let half = T::lit(0.5);
        for idx in 0..g.len() {
            if g.is_nyquist(idx) {
                self.coeffs[idx] = czero();
                continue;
            }
            let j = g.conjugate_index(idx);
            if j < idx {
                continue;
            }
            if j == idx {
                self.coeffs[idx].im = T::zero();
                continue;
            }
            let c = (self.coeffs[idx] + self.coeffs[j].conj()).scale(half);
            self.coeffs[idx] = c;
            self.coeffs[j] = c.conj();
        }
    }
}
