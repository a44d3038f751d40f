use std::f64::consts::PI;

use rand::Rng;

use crate::ensemble::map_replicas;
use crate::gmc::wick_exp_values;
use crate::random::{fill_gaussian_field, gff_amplitudes, sample_gaussian_field, sample_white, standard_normal};
use crate::spectral::kernels::sigma_grid;
use crate::spectral::{SpectralField, TruncationScheme};
use crate::{Error, Field, Grid, Result};

/// `R_N(u) = exp(−λ C_N ∫ e^{βQu}) = exp(−2πλ Θ̂(0))` with `Θ` the Wick
/// exponential of `Qu`; the integral is the grid quadrature.
pub fn density_rn(u: &Field, scheme: &TruncationScheme, beta: f64, lambda: f64) -> f64 {
    let grid = u.grid();
    let q = grid.multiplier(|n1, n2| scheme.symbol(n1, n2));
    let theta = wick_exp_values(&u.with_multiplier(&q).to_physical(), beta, sigma_grid(grid, scheme));
    let zero = theta.iter().sum::<f64>() * 2.0 * PI / grid.len() as f64;
    (-2.0 * PI * lambda * zero).exp()
}

#[derive(Clone, Debug)]
pub struct GibbsSample {
    pub u: Field,
    /// Velocity for wave samples.
    pub u_dot: Option<Field>,
    pub accept_count: u64,
    pub propose_count: u64,
    pub density_value: f64,
}

/// Exact rejection sampler for `ρ_N` on a grid.
///
/// Write `u = a₀ e₀ + u⊥`. Since `Qu⊥` has grid mean zero, Jensen gives
/// `C_N ∫ e^{βQu⊥} ≥ 4π² C_N =: A`, so `R_N(u) ≤ exp(−λ A e^{c a₀})` with
/// `c = β/2π`. The zero mode is drawn from `N(0,1)` tilted by this bound
/// (log-concave, sampled exactly), `u⊥` from `μ₁`, and the pair is accepted
/// with probability `exp(−λ e^{c a₀}(C_N ∫ e^{βQu⊥} − A))`. Only the modes
/// seen by `Q` are drawn before the decision; the rest are drawn after.
#[derive(Clone, Debug)]
pub struct GibbsSampler {
    grid: Grid,
    scheme: TruncationScheme,
    beta: f64,
    lambda: f64,
    c_n: f64,
    q: Vec<f64>,
    amp_seen: Vec<f64>,
    amp_rest: Vec<f64>,
    a_min: f64,
    /// Mode of the tilted zero-mode density.
    tilt_mode: f64,
}

impl GibbsSampler {
    pub fn new(scheme: TruncationScheme, beta2: f64, lambda: f64, m: usize) -> Result<Self> {
        if !(lambda > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "λ = {lambda}: the truncated Gibbs measure needs λ > 0"
            )));
        }
        Self::build(scheme, beta2, lambda, m)
    }

    /// The `λ = 0` case: samples are exactly `μ₁` and the generator is the
    /// free (Ornstein–Uhlenbeck) one.
    pub fn gaussian(scheme: TruncationScheme, beta2: f64, m: usize) -> Result<Self> {
        Self::build(scheme, beta2, 0.0, m)
    }

    fn build(scheme: TruncationScheme, beta2: f64, lambda: f64, m: usize) -> Result<Self> {
        if !(beta2 > 0.0 && beta2 < 4.0 * PI) {
            return Err(Error::InvalidArgument(format!("β² = {beta2} outside (0, 4π)")));
        }
        let grid = Grid::new(m)?;
        let beta = beta2.sqrt();
        let sigma = sigma_grid(&grid, &scheme);
        let c_n = (-0.5 * beta2 * sigma).exp();
        let q = grid.multiplier(|n1, n2| scheme.symbol(n1, n2));
        let amp = gff_amplitudes(&grid, None);
        let mut amp_seen = vec![0.0; grid.len()];
        let mut amp_rest = vec![0.0; grid.len()];
        for idx in 1..grid.len() {
            if q[idx] != 0.0 {
                amp_seen[idx] = amp[idx];
            } else {
                amp_rest[idx] = amp[idx];
            }
        }
        let a_min = 4.0 * PI * PI * c_n;
        let c = beta / (2.0 * PI);
        // mode of −a²/2 − λA e^{ca}: a + λAc e^{ca} = 0
        let k = lambda * a_min * c;
        let mut a: f64 = 0.0;
        for _ in 0..100 {
            let g = a + k * (c * a).exp();
            let dg = 1.0 + k * c * (c * a).exp();
            let next = a - g / dg;
            if (next - a).abs() < 1e-14 {
                a = next;
                break;
            }
            a = next;
        }
        Ok(GibbsSampler {
            grid,
            scheme,
            beta,
            lambda,
            c_n,
            q,
            amp_seen,
            amp_rest,
            a_min,
            tilt_mode: a,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn scheme(&self) -> TruncationScheme {
        self.scheme
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn c_n(&self) -> f64 {
        self.c_n
    }

    pub fn truncation(&self) -> &[f64] {
        &self.q
    }

    pub fn density(&self, u: &Field) -> f64 {
        density_rn(u, &self.scheme, self.beta, self.lambda)
    }

    /// `C_N ∫ e^{βf}` by grid quadrature for grid values `f`.
    fn weight(&self, f: &[f64]) -> f64 {
        let s: f64 = f.iter().map(|&v| (self.beta * v).exp()).sum();
        self.c_n * 4.0 * PI * PI * s / f.len() as f64
    }

    /// Exact draw from `∝ φ(a) exp(−λA e^{ca})`: the log-density is
    /// 1-strongly concave, so `N(mode, 1)` dominates it after rescaling.
    fn tilted_zero_mode<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let c = self.beta / (2.0 * PI);
        let k = self.lambda * self.a_min;
        let m = self.tilt_mode;
        let h = |a: f64| -0.5 * a * a - k * (c * a).exp();
        let hm = h(m);
        loop {
            let a = m + standard_normal(rng);
            let log_acc = h(a) - hm + 0.5 * (a - m) * (a - m);
            if rng.random::<f64>().ln() < log_acc {
                return a;
            }
        }
    }

    /// One exact sample of `ρ_N`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> GibbsSample {
        let c = self.beta / (2.0 * PI);
        let mut proposals = 0u64;
        loop {
            // two proposals share one inverse transform
            let ua = sample_gaussian_field(&self.grid, &self.amp_seen, rng);
            let ub = sample_gaussian_field(&self.grid, &self.amp_seen, rng);
            let (fa, fb) = SpectralField::to_physical_pair(&ua.with_multiplier(&self.q), &ub.with_multiplier(&self.q));
            for (u, f) in [(ua, fa), (ub, fb)] {
                proposals += 1;
                let w = self.weight(&f);
                let a0 = self.tilted_zero_mode(rng);
                let scale = self.lambda * (c * a0).exp();
                if rng.random::<f64>().ln() < -scale * (w - self.a_min) {
                    let mut u = u;
                    fill_gaussian_field(&self.grid, &self.amp_rest, rng, &mut u);
                    u.set_mode(0, 0, num_complex::Complex::new(a0, 0.0));
                    return GibbsSample {
                        u,
                        u_dot: None,
                        accept_count: 1,
                        propose_count: proposals,
                        density_value: (-scale * w).exp(),
                    };
                }
            }
        }
    }

    /// `ρ_N ⊗ μ₀`: the velocity is untruncated white noise on the grid.
    pub fn sample_wave<R: Rng + ?Sized>(&self, rng: &mut R) -> GibbsSample {
        let mut s = self.sample(rng);
        s.u_dot = Some(sample_white(&self.grid, None, rng));
        s
    }

    /// Plain rejection from `μ₁` with acceptance `R_N(u)`; gives up after
    /// `max_proposals`.
    pub fn sample_plain<R: Rng + ?Sized>(&self, rng: &mut R, max_proposals: u64) -> Option<GibbsSample> {
        let amp = gff_amplitudes(&self.grid, None);
        for k in 1..=max_proposals {
            let u = sample_gaussian_field(&self.grid, &amp, rng);
            let r = self.density(&u);
            if rng.random::<f64>() < r {
                return Some(GibbsSample {
                    u,
                    u_dot: None,
                    accept_count: 1,
                    propose_count: k,
                    density_value: r,
                });
            }
        }
        None
    }
}

/// `count` independent samples, replica `i` drawn from stream `(seed, i)`.
pub fn sample_ensemble(sampler: &GibbsSampler, count: usize, seed: u64, wave: bool) -> Vec<GibbsSample> {
    map_replicas(count, seed, |_, stream| {
        let mut rng = stream.rng();
        if wave {
            sampler.sample_wave(&mut rng)
        } else {
            sampler.sample(&mut rng)
        }
    })
}
