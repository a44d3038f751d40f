//! Exact-in-law stepping of the linear stochastic heat and damped wave flows.

use rand::Rng;

use crate::ensemble::map_replicas;
use crate::random::{sample_gaussian_field, sample_gff, sample_unit_noise, sample_white};
use crate::spectral::{
    bracket_sq, damped_noise_covariance, damped_transition, sobolev_norm, SpectralField, TorusGrid,
    TruncationScheme,
};
use crate::stats::Estimate;
use crate::{Error, Result, Scalar};

fn check_dt(dt: f64) -> Result<()> {
    if dt > 0.0 && dt.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("time step {dt} must be positive")))
    }
}

fn symbol_of(scheme: Option<&TruncationScheme>, n1: i64, n2: i64) -> f64 {
    scheme.map_or(1.0, |s| s.symbol(n1, n2))
}

/// One exact step of `dψ̂ = −(⟨n⟩²/2) ψ̂ dt + symbol(n) dB_n`.
#[derive(Clone, Debug)]
pub struct HeatConvStepper<T: Scalar = f64> {
    grid: TorusGrid<T>,
    dt: f64,
    decay: Vec<T>,
    noise_amp: Vec<T>,
}

impl<T: Scalar> HeatConvStepper<T> {
    pub fn new(grid: &TorusGrid<T>, scheme: Option<&TruncationScheme>, dt: f64) -> Result<Self> {
        check_dt(dt)?;
        let decay = grid.multiplier(|n1, n2| (-0.5 * dt * bracket_sq(n1, n2)).exp());
        let noise_amp = grid.multiplier(|n1, n2| {
            let b = bracket_sq(n1, n2);
            symbol_of(scheme, n1, n2) * (-(-dt * b).exp_m1() / b).sqrt()
        });
        Ok(HeatConvStepper {
            grid: grid.clone(),
            dt,
            decay,
            noise_amp,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Multiplier `e^{−dt⟨n⟩²/2}`.
    pub fn decay(&self) -> &[T] {
        &self.decay
    }

    /// Standard deviation of the transition noise per mode.
    pub fn noise_amplitudes(&self) -> &[T] {
        &self.noise_amp
    }

    /// Deterministic part of the step.
    pub fn propagate(&self, psi: &mut SpectralField<T>) {
        psi.apply_multiplier(&self.decay);
    }

    pub fn sample_noise<R: Rng + ?Sized>(&self, rng: &mut R) -> SpectralField<T> {
        sample_gaussian_field(&self.grid, &self.noise_amp, rng)
    }

    pub fn step<R: Rng + ?Sized>(&self, psi: &mut SpectralField<T>, rng: &mut R) {
        self.propagate(psi);
        let eta = self.sample_noise(rng);
        psi.axpy(T::one(), &eta);
    }
}

/// Running heat convolution `Ψ_N(t)`.
#[derive(Clone, Debug)]
pub struct HeatConvState<T: Scalar = f64> {
    pub t: f64,
    pub psi: SpectralField<T>,
    pub scheme: Option<TruncationScheme>,
}

impl<T: Scalar> HeatConvState<T> {
    /// Starts from the stationary law: the truncated free field.
    pub fn stationary<R: Rng + ?Sized>(grid: &TorusGrid<T>, scheme: Option<TruncationScheme>, rng: &mut R) -> Self {
        HeatConvState {
            t: 0.0,
            psi: sample_gff(grid, scheme.as_ref(), rng),
            scheme,
        }
    }

    pub fn step<R: Rng + ?Sized>(&mut self, stepper: &HeatConvStepper<T>, rng: &mut R) {
        stepper.step(&mut self.psi, rng);
        self.t += stepper.dt;
    }
}

/// Exact step of the per-mode damped oscillator
/// `ẍ + ẋ + k(n) x = σ(n) Ḃ_n` on position/velocity pairs.
///
/// With `k = ⟨n⟩²` and `σ = √2 · symbol` this is the stochastic damped
/// wave flow; with `σ = 0` it is any deterministic damped flow, e.g.
/// `k = 1/4 + |n|²` for the kernel `e^{−t/2} sin(t|∇|)/|∇|`.
#[derive(Clone, Debug)]
pub struct DampedStepper<T: Scalar = f64> {
    grid: TorusGrid<T>,
    dt: f64,
    phi: Vec<[[T; 2]; 2]>,
    chol: Vec<[T; 3]>,
    cov: Vec<[[f64; 2]; 2]>,
    stiffness: Vec<f64>,
    noise_sq: Vec<f64>,
}

impl<T: Scalar> DampedStepper<T> {
    pub fn new(
        grid: &TorusGrid<T>,
        dt: f64,
        stiffness: impl Fn(i64, i64) -> f64,
        noise_sq: impl Fn(i64, i64) -> f64,
    ) -> Result<Self> {
        check_dt(dt)?;
        let n = grid.len();
        let mut phi = vec![[[T::zero(); 2]; 2]; n];
        let mut chol = vec![[T::zero(); 3]; n];
        let mut cov = vec![[[0.0; 2]; 2]; n];
        let mut ks = vec![0.0; n];
        let mut ss = vec![0.0; n];
        for idx in 0..n {
            if grid.is_nyquist(idx) {
                continue;
            }
            let (n1, n2) = grid.mode(idx);
            let k = stiffness(n1, n2);
            let s2 = noise_sq(n1, n2);
            let p = damped_transition(k, dt);
            phi[idx] = [
                [T::lit(p[0][0]), T::lit(p[0][1])],
                [T::lit(p[1][0]), T::lit(p[1][1])],
            ];
            let c = damped_noise_covariance(k, dt, s2);
            let l11 = c[0][0].max(0.0).sqrt();
            let l21 = if l11 > 0.0 { c[0][1] / l11 } else { 0.0 };
            let l22 = (c[1][1] - l21 * l21).max(0.0).sqrt();
            chol[idx] = [T::lit(l11), T::lit(l21), T::lit(l22)];
            cov[idx] = c;
            ks[idx] = k;
            ss[idx] = s2;
        }
        Ok(DampedStepper {
            grid: grid.clone(),
            dt,
            phi,
            chol,
            cov,
            stiffness: ks,
            noise_sq: ss,
        })
    }

    /// Stochastic damped wave flow `ü + u̇ + ⟨n⟩² u = √2 · symbol · Ḃ`.
    pub fn wave(grid: &TorusGrid<T>, scheme: Option<&TruncationScheme>, dt: f64) -> Result<Self> {
        Self::new(grid, dt, bracket_sq, |n1, n2| 2.0 * symbol_of(scheme, n1, n2).powi(2))
    }

    pub fn deterministic(grid: &TorusGrid<T>, dt: f64, stiffness: impl Fn(i64, i64) -> f64) -> Result<Self> {
        Self::new(grid, dt, stiffness, |_, _| 0.0)
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// `(x, ẋ) ← Φ(dt)(x, ẋ)` mode by mode.
    pub fn propagate(&self, x: &mut SpectralField<T>, v: &mut SpectralField<T>) {
        assert!(x.grid() == &self.grid && v.grid() == &self.grid);
        let xs = x.coeffs_mut();
        let vs = v.coeffs_mut();
        for idx in 0..self.phi.len() {
            let p = &self.phi[idx];
            let (a, b) = (xs[idx], vs[idx]);
            xs[idx] = a.scale(p[0][0]) + b.scale(p[0][1]);
            vs[idx] = a.scale(p[1][0]) + b.scale(p[1][1]);
        }
    }

    /// Transition noise `L (ξ₁, ξ₂)` built from two standard complex fields.
    pub fn noise_from_standard(
        &self,
        xi1: &SpectralField<T>,
        xi2: &SpectralField<T>,
    ) -> (SpectralField<T>, SpectralField<T>) {
        let mut a = SpectralField::zeros(&self.grid);
        let mut b = SpectralField::zeros(&self.grid);
        {
            let (ca, z1, z2) = (a.coeffs_mut(), xi1.coeffs(), xi2.coeffs());
            for idx in 0..ca.len() {
                ca[idx] = z1[idx].scale(self.chol[idx][0]);
            }
            let cb = b.coeffs_mut();
            for idx in 0..cb.len() {
                let l = &self.chol[idx];
                cb[idx] = z1[idx].scale(l[1]) + z2[idx].scale(l[2]);
            }
        }
        (a, b)
    }

    pub fn sample_noise<R: Rng + ?Sized>(&self, rng: &mut R) -> (SpectralField<T>, SpectralField<T>) {
        let xi1 = sample_unit_noise(&self.grid, rng);
        let xi2 = sample_unit_noise(&self.grid, rng);
        self.noise_from_standard(&xi1, &xi2)
    }

    pub fn step<R: Rng + ?Sized>(&self, x: &mut SpectralField<T>, v: &mut SpectralField<T>, rng: &mut R) {
        self.propagate(x, v);
        let (a, b) = self.sample_noise(rng);
        x.axpy(T::one(), &a);
        v.axpy(T::one(), &b);
    }

    /// `Φ Σ Φᵀ + Q` for a per-mode covariance `Σ` of `(x, ẋ)` (complex
    /// modes, `Σ = E[(x, ẋ)(x, ẋ)*]`).
    pub fn push_covariance(&self, idx: usize, s: [[f64; 2]; 2]) -> [[f64; 2]; 2] {
        let p = damped_transition(self.stiffness[idx], self.dt);
        let mut out = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = 0.0;
                for a in 0..2 {
                    for b in 0..2 {
                        acc += p[i][a] * s[a][b] * p[j][b];
                    }
                }
                out[i][j] = acc + self.cov[idx][i][j];
            }
        }
        out
    }

    /// Stationary covariance `diag(σ²/(2k), σ²/2)` of mode `idx`.
    pub fn stationary_covariance(&self, idx: usize) -> [[f64; 2]; 2] {
        let k = self.stiffness[idx];
        let s2 = self.noise_sq[idx];
        if k == 0.0 {
            return [[0.0; 2]; 2];
        }
        [[0.5 * s2 / k, 0.0], [0.0, 0.5 * s2]]
    }

    /// Exact transition noise covariance of mode `idx`.
    pub fn transition_covariance(&self, idx: usize) -> [[f64; 2]; 2] {
        self.cov[idx]
    }
}

/// Running wave convolution `(Ψ_N, ∂_tΨ_N)`.
#[derive(Clone, Debug)]
pub struct WaveConvState<T: Scalar = f64> {
    pub t: f64,
    pub psi: SpectralField<T>,
    pub psi_dot: SpectralField<T>,
    pub scheme: Option<TruncationScheme>,
}

impl<T: Scalar> WaveConvState<T> {
    /// Stationary start `μ₁ ⊗ μ₀`, both truncated by `scheme`.
    pub fn stationary<R: Rng + ?Sized>(grid: &TorusGrid<T>, scheme: Option<TruncationScheme>, rng: &mut R) -> Self {
        let psi = sample_gff(grid, scheme.as_ref(), rng);
        let psi_dot = sample_white(grid, scheme.as_ref(), rng);
        WaveConvState {
            t: 0.0,
            psi,
            psi_dot,
            scheme,
        }
    }

    pub fn step<R: Rng + ?Sized>(&mut self, stepper: &DampedStepper<T>, rng: &mut R) {
        stepper.step(&mut self.psi, &mut self.psi_dot, rng);
        self.t += stepper.dt;
    }
}

/// Monte-Carlo estimate of `E ‖Ψ_{N₁} − Ψ_{N₂}‖_{W^{−ε,∞}}` for the smooth
/// projector, with both truncations applied to the same stationary field.
///
/// The grid has `4 N₂` points per side so that both truncations are resolved.
pub fn conv_convergence_stat(n1: u32, n2: u32, eps: f64, samples: usize, seed: u64) -> Result<Estimate> {
    if n2 < n1 {
        return Err(Error::InvalidArgument("need N2 >= N1".into()));
    }
    let grid = TorusGrid::<f64>::new(4 * n2 as usize)?;
    let s1 = TruncationScheme::smooth(n1);
    let s2 = TruncationScheme::smooth(n2);
    let mult = grid.multiplier(|a, b| s1.symbol(a, b) - s2.symbol(a, b));
    let values = map_replicas(samples, seed, |_, stream| {
        let mut rng = stream.rng();
        let w = sample_gff(&grid, None, &mut rng);
        let d = w.with_multiplier(&mult);
        sobolev_norm(&d, -eps, f64::INFINITY).expect("p = ∞ is valid")
    });
    Ok(Estimate::from_samples(&values))
}

