use std::f64::consts::PI;

use num_complex::Complex;

use super::GibbsSampler;
use crate::spectral::{bracket_sq, in_half_lattice};
use crate::{Error, Field, Result};

/// A real coordinate of `u`: the zero mode `a₀`, or `a_n = Re û(n)`,
/// `b_n = Im û(n)` for `n` in the half-lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coord {
    Zero,
    Re(i64, i64),
    Im(i64, i64),
}

impl Coord {
    fn mode(self) -> (i64, i64) {
        match self {
            Coord::Zero => (0, 0),
            Coord::Re(a, b) | Coord::Im(a, b) => (a, b),
        }
    }
}

/// Cylinder observables. `Weight` is `W(u) = C_N ∫ e^{βQu}` and `ExpCap`
/// is the bounded functional `exp(−W/scale)`.
#[derive(Clone, Debug)]
pub enum Observable {
    Coord(Coord),
    Square(Coord),
    Product(Coord, Coord),
    Weight,
    ExpCap { scale: f64 },
    Combination(Vec<(f64, Observable)>),
}

/// Per-configuration quantities needed to apply the generator: the grid
/// values of `E = e^{βQu}` through their raw transform.
pub struct GeneratorContext<'a> {
    sampler: &'a GibbsSampler,
    u: &'a Field,
    /// `Σ_j E(x_j) e^{−ik·x_j}`, aliased slots included.
    raw: Vec<Complex<f64>>,
    /// Largest `|n|_∞` with nonzero truncation symbol.
    q_radius: i64,
}

impl<'a> GeneratorContext<'a> {
    pub fn new(sampler: &'a GibbsSampler, u: &'a Field) -> Result<Self> {
        let grid = sampler.grid();
        if u.grid().m() != grid.m() {
            return Err(Error::GridMismatch);
        }
        let q = sampler.truncation();
        let qu = u.with_multiplier(q).to_physical();
        let beta = sampler.beta();
        let mut raw: Vec<Complex<f64>> = qu.iter().map(|&v| Complex::new((beta * v).exp(), 0.0)).collect();
        if raw.iter().any(|c| !c.re.is_finite()) {
            return Err(Error::NumericAbort {
                step: 0,
                t: 0.0,
                what: "e^{βQu} overflowed".into(),
            });
        }
        grid.fft().forward(&mut raw);
        let mut q_radius = 0;
        for idx in 0..grid.len() {
            if q[idx] != 0.0 && !grid.is_nyquist(idx) {
                let (a, b) = grid.mode(idx);
                q_radius = q_radius.max(a.abs()).max(b.abs());
            }
        }
        Ok(GeneratorContext { sampler, u, raw, q_radius })
    }

    fn check(&self, k: Coord) -> Result<usize> {
        let (n1, n2) = k.mode();
        let half = (self.sampler.grid().m() / 2) as i64;
        let ok = match k {
            Coord::Zero => true,
            _ => in_half_lattice(n1, n2),
        };
        if !ok || n1.abs() >= half || n2.abs() >= half {
            return Err(Error::InvalidArgument(format!(
                "coordinate {k:?} is not a half-lattice mode resolved by the grid"
            )));
        }
        Ok(self.sampler.grid().index(n1, n2))
    }

    /// Analysis coefficient `Ê(n) = (2π/M²) Σ_j E(x_j) e^{−in·x_j}`.
    fn e_hat(&self, idx: usize) -> Complex<f64> {
        let m = self.sampler.grid().m() as f64;
        self.raw[idx] * (2.0 * PI / (m * m))
    }

    /// `∫ E` by quadrature.
    fn e_integral(&self) -> f64 {
        self.e_hat(0).re * 2.0 * PI
    }

    pub fn value_of(&self, k: Coord) -> Result<f64> {
        let idx = self.check(k)?;
        let c = self.u.coeffs()[idx];
        Ok(match k {
            Coord::Im(..) => c.im,
            _ => c.re,
        })
    }

    /// `W(u) = C_N ∫ e^{βQu}`.
    pub fn weight(&self) -> f64 {
        self.sampler.c_n() * self.e_integral()
    }

    /// Drift of the heat flow in coordinate `k`:
    /// `−½⟨n⟩² x_k − ½λβC_N q_n (Re|Im) Ê(n)`.
    pub fn drift(&self, k: Coord) -> Result<f64> {
        let idx = self.check(k)?;
        let (n1, n2) = k.mode();
        let x = self.value_of(k)?;
        let e = self.e_hat(idx);
        let part = match k {
            Coord::Im(..) => e.im,
            _ => e.re,
        };
        let s = &self.sampler;
        Ok(-0.5 * bracket_sq(n1, n2) * x - 0.5 * s.lambda() * s.beta() * s.c_n() * s.truncation()[idx] * part)
    }

    /// Diffusion coefficient: `½` for the zero mode, `¼` otherwise.
    pub fn diffusion(&self, k: Coord) -> f64 {
        match k {
            Coord::Zero => 0.5,
            _ => 0.25,
        }
    }

    /// `∂_k W`.
    pub fn weight_grad(&self, k: Coord) -> Result<f64> {
        let idx = self.check(k)?;
        let s = &self.sampler;
        let e = self.e_hat(idx);
        let g = match k {
            Coord::Zero => s.beta() * e.re,
            Coord::Re(..) => 2.0 * s.beta() * s.truncation()[idx] * e.re,
            Coord::Im(..) => 2.0 * s.beta() * s.truncation()[idx] * e.im,
        };
        Ok(s.c_n() * g)
    }

    /// `∂²_k W`.
    pub fn weight_hess(&self, k: Coord) -> Result<f64> {
        let idx = self.check(k)?;
        let s = &self.sampler;
        let grid = s.grid();
        let b2 = s.beta() * s.beta();
        let total = self.e_integral();
        let h = match k {
            Coord::Zero => b2 * total / (4.0 * PI * PI),
            Coord::Re(n1, n2) | Coord::Im(n1, n2) => {
                let m = grid.m() as i64;
                let idx2 = grid.index((2 * n1).rem_euclid(m), (2 * n2).rem_euclid(m));
                let cos2 = self.raw[idx2].re * grid.cell_area();
                let sign = if matches!(k, Coord::Re(..)) { 1.0 } else { -1.0 };
                let q = s.truncation()[idx];
                b2 * q * q / (2.0 * PI * PI) * (total + sign * cos2)
            }
        };
        Ok(s.c_n() * h)
    }

    /// Coordinates on which `W` depends.
    pub fn weight_coords(&self) -> Vec<Coord> {
        let grid = self.sampler.grid();
        let q = self.sampler.truncation();
        let mut out = vec![Coord::Zero];
        for idx in 1..grid.len() {
            if q[idx] == 0.0 || grid.is_nyquist(idx) {
                continue;
            }
            let (n1, n2) = grid.mode(idx);
            if in_half_lattice(n1, n2) {
                out.push(Coord::Re(n1, n2));
                out.push(Coord::Im(n1, n2));
            }
        }
        out
    }

    fn lw(&self, d: impl Fn(Coord) -> Result<(f64, f64)>) -> Result<f64> {
        let mut acc = 0.0;
        for k in self.weight_coords() {
            let (df, d2f) = d(k)?;
            acc += self.drift(k)? * df + self.diffusion(k) * d2f;
        }
        Ok(acc)
    }
}

impl Observable {
    /// Largest `|n|_∞` the observable depends on.
    pub fn max_mode(&self, ctx: &GeneratorContext) -> i64 {
        let r = |k: &Coord| {
            let (a, b) = k.mode();
            a.abs().max(b.abs())
        };
        match self {
            Observable::Coord(k) | Observable::Square(k) => r(k),
            Observable::Product(j, k) => r(j).max(r(k)),
            Observable::Weight | Observable::ExpCap { .. } => ctx.q_radius,
            Observable::Combination(parts) => parts.iter().map(|(_, o)| o.max_mode(ctx)).max().unwrap_or(0),
        }
    }

    pub fn value(&self, ctx: &GeneratorContext) -> Result<f64> {
        Ok(match self {
            Observable::Coord(k) => ctx.value_of(*k)?,
            Observable::Square(k) => ctx.value_of(*k)?.powi(2),
            Observable::Product(j, k) => ctx.value_of(*j)? * ctx.value_of(*k)?,
            Observable::Weight => ctx.weight(),
            Observable::ExpCap { scale } => (-ctx.weight() / scale).exp(),
            Observable::Combination(parts) => {
                let mut acc = 0.0;
                for (c, o) in parts {
                    acc += c * o.value(ctx)?;
                }
                acc
            }
        })
    }

    fn apply(&self, ctx: &GeneratorContext) -> Result<f64> {
        Ok(match self {
            Observable::Coord(k) => ctx.drift(*k)?,
            Observable::Square(k) => 2.0 * ctx.value_of(*k)? * ctx.drift(*k)? + 2.0 * ctx.diffusion(*k),
            Observable::Product(j, k) if j == k => Observable::Square(*j).apply(ctx)?,
            Observable::Product(j, k) => ctx.value_of(*k)? * ctx.drift(*j)? + ctx.value_of(*j)? * ctx.drift(*k)?,
            Observable::Weight => ctx.lw(|k| Ok((ctx.weight_grad(k)?, ctx.weight_hess(k)?)))?,
            Observable::ExpCap { scale } => {
                let f = (-ctx.weight() / scale).exp();
                ctx.lw(|k| {
                    let g = ctx.weight_grad(k)?;
                    let h = ctx.weight_hess(k)?;
                    Ok((-f / scale * g, f / (scale * scale) * g * g - f / scale * h))
                })?
            }
            Observable::Combination(parts) => {
                let mut acc = 0.0;
                for (c, o) in parts {
                    acc += c * o.apply(ctx)?;
                }
                acc
            }
        })
    }
}

/// `(LF)(u)` for the generator of the full heat flow. Cylinder observables
/// must live on modes `|n|_∞ ≤ 2 m_cap`.
pub fn generator_apply(obs: &Observable, ctx: &GeneratorContext, m_cap: i64) -> Result<f64> {
    let r = obs.max_mode(ctx);
    if r > 2 * m_cap {
        return Err(Error::InvalidArgument(format!(
            "observable reaches |n| = {r}, beyond 2·M = {}",
            2 * m_cap
        )));
    }
    obs.apply(ctx)
}

/// `M(u) = ½a₀² + Σ_Λ ⟨n⟩²(a_n² + b_n²) + λ W(u)`; the heat drift is
/// `−D ∇M` coordinatewise.
pub fn m_functional(sampler: &GibbsSampler, u: &Field) -> Result<f64> {
    let grid = sampler.grid();
    let mut quad = 0.5 * u.coeff(0, 0).re.powi(2);
    for idx in 1..grid.len() {
        if grid.is_nyquist(idx) {
            continue;
        }
        let (n1, n2) = grid.mode(idx);
        if in_half_lattice(n1, n2) {
            quad += bracket_sq(n1, n2) * u.coeffs()[idx].norm_sqr();
        }
    }
    let ctx = GeneratorContext::new(sampler, u)?;
    Ok(quad + sampler.lambda() * ctx.weight())
}
