use std::f64::consts::PI;

use num_complex::Complex;
use rand::Rng;

use super::wick::wick_exp_values;
use crate::ensemble::map_replicas;
use crate::random::{gff_amplitudes, sample_gaussian_field, sample_unit_noise, RngStream};
use crate::spectral::kernels::{sigma_grid, torus_norm};
use crate::spectral::{bracket_sq, SpectralField, TorusGrid, TruncationKind, TruncationScheme};
use crate::stats::{bootstrap_mean_ci, linear_fit, Estimate};
use crate::{Error, Field, Grid, Result};

/// Where a pointwise expectation is read off each replica.
///
/// By stationarity every grid point has the same law, so averaging over all
/// points of a replica estimates the same quantity with lower variance.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sampling {
    /// A single grid slot.
    Point(usize),
    SpatialAverage,
}

/// Draws stationary `Ψ_N` and `Θ_N` on a fixed grid.
#[derive(Clone, Debug)]
pub struct GmcSampler {
    grid: Grid,
    scheme: TruncationScheme,
    amp: Vec<f64>,
    beta: f64,
    sigma: f64,
}

impl GmcSampler {
    /// `σ` is the exact pointwise variance of `Ψ_N` on this grid, so
    /// `E Θ = 1` holds without discretisation bias.
    pub fn new(scheme: TruncationScheme, beta2: f64, m: usize) -> Result<Self> {
        if !(beta2 >= 0.0) {
            return Err(Error::InvalidArgument(format!("β² = {beta2} must be nonnegative")));
        }
        let grid = TorusGrid::new(m)?;
        let amp = gff_amplitudes(&grid, Some(&scheme));
        let sigma = sigma_grid(&grid, &scheme);
        Ok(GmcSampler {
            grid,
            scheme,
            amp,
            beta: beta2.sqrt(),
            sigma,
        })
    }

    /// Grid of `4N` points per side.
    pub fn standard(scheme: TruncationScheme, beta2: f64) -> Result<Self> {
        let m = (4 * scheme.n as usize).max(8);
        Self::new(scheme, beta2, m)
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

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn psi<R: Rng + ?Sized>(&self, rng: &mut R) -> Field {
        sample_gaussian_field(&self.grid, &self.amp, rng)
    }

    /// Two independent `Θ` samples from one inverse FFT.
    pub fn theta_pair<R: Rng + ?Sized>(&self, rng: &mut R) -> (Vec<f64>, Vec<f64>) {
        let a = self.psi(rng);
        let b = self.psi(rng);
        let (pa, pb) = SpectralField::to_physical_pair(&a, &b);
        (
            wick_exp_values(&pa, self.beta, self.sigma),
            wick_exp_values(&pb, self.beta, self.sigma),
        )
    }

    fn pairs<F>(&self, samples: usize, seed: u64, f: F) -> Vec<f64>
    where
        F: Fn(&[f64]) -> f64 + Sync,
    {
        let pairs = map_replicas(samples.div_ceil(2), seed, |_, stream| {
            let (a, b) = self.theta_pair(&mut stream.rng());
            [f(&a), f(&b)]
        });
        pairs.into_iter().flatten().take(samples).collect()
    }
}

fn read(values: &[f64], sampling: Sampling) -> f64 {
    match sampling {
        Sampling::Point(i) => values[i],
        Sampling::SpatialAverage => values.iter().sum::<f64>() / values.len() as f64,
    }
}

/// Monte-Carlo estimate of `E Θ_N(x)`.
pub fn mean_estimate(sampler: &GmcSampler, samples: usize, seed: u64, sampling: Sampling) -> Estimate {
    Estimate::from_samples(&sampler.pairs(samples, seed, |t| read(t, sampling)))
}

/// One bin of the radial covariance profile.
#[derive(Clone, Copy, Debug)]
pub struct ProfileBin {
    /// Mean separation of the grid offsets in the bin.
    pub r: f64,
    pub mc: Estimate,
    /// Exact covariance of the grid field, averaged over the same offsets.
    pub exact: f64,
}

fn radial_bins(grid: &Grid) -> (Vec<usize>, Vec<f64>, Vec<usize>) {
    let h = grid.spacing();
    let nb = grid.m() / 2 + 1;
    let mut bin = vec![0; grid.len()];
    let mut rsum = vec![0.0; nb];
    let mut count = vec![0; nb];
    for idx in 0..grid.len() {
        let (x1, x2) = grid.point(idx);
        let r = torus_norm(x1, x2);
        let b = ((r / h).round() as usize).min(nb - 1);
        bin[idx] = b;
        rsum[b] += r;
        count[b] += 1;
    }
    let rmean = rsum.iter().zip(&count).map(|(s, &c)| if c > 0 { s / c as f64 } else { 0.0 }).collect();
    (bin, rmean, count)
}

fn bin_average(values: &[f64], bin: &[usize], count: &[usize]) -> Vec<f64> {
    let mut acc = vec![0.0; count.len()];
    for (v, &b) in values.iter().zip(bin) {
        acc[b] += v;
    }
    acc.iter().zip(count).map(|(a, &c)| if c > 0 { a / c as f64 } else { 0.0 }).collect()
}

/// Estimated `E Ψ(x)Ψ(y)` binned by `|x − y|` (bins of one grid spacing),
/// against the exact grid covariance `(1/4π²) Σ amp(n)² e^{in·d}`.
///
/// Each replica contributes its spatial autocovariance
/// `M^{−2} Σ_x Ψ(x)Ψ(x + d)`.
pub fn covariance_profile(sampler: &GmcSampler, samples: usize, seed: u64) -> Vec<ProfileBin> {
    let grid = sampler.grid();
    let (bin, rmean, count) = radial_bins(grid);
    let power = |f: &Field| -> Field {
        let c: Vec<Complex<f64>> = f.coeffs().iter().map(|c| Complex::new(c.norm_sqr() / (2.0 * PI), 0.0)).collect();
        SpectralField::from_coeffs(grid, c, f64::INFINITY).expect("power spectrum is real and even")
    };
    let per_pair = map_replicas(samples.div_ceil(2), seed, |_, stream| {
        let mut rng = stream.rng();
        let a = sampler.psi(&mut rng);
        let b = sampler.psi(&mut rng);
        let (ca, cb) = SpectralField::to_physical_pair(&power(&a), &power(&b));
        [bin_average(&ca, &bin, &count), bin_average(&cb, &bin, &count)]
    });
    let rows: Vec<Vec<f64>> = per_pair.into_iter().flatten().take(samples).collect();
    let exact_field = SpectralField::from_modes(grid, |n1, n2| {
        let a = sampler.amp[grid.index(n1, n2)];
        Complex::new(a * a / (2.0 * PI), 0.0)
    });
    let exact = bin_average(&exact_field.to_physical(), &bin, &count);
    (0..count.len())
        .filter(|&b| count[b] > 0)
        .map(|b| {
            let col: Vec<f64> = rows.iter().map(|r| r[b]).collect();
            ProfileBin {
                r: rmean[b],
                mc: Estimate::from_samples(&col),
                exact: exact[b],
            }
        })
        .collect()
}

/// Multiplier `⟨n⟩^{−α}` on `grid`.
fn bessel_multiplier(grid: &Grid, alpha: f64) -> Vec<f64> {
    grid.multiplier(|n1, n2| bracket_sq(n1, n2).powf(-0.5 * alpha))
}

/// `|f|^p` read from the coefficients of `f`; `p = 2` with spatial averaging
/// uses Parseval and skips the inverse transform.
fn power_read(f: &Field, p: f64, sampling: Sampling) -> f64 {
    if p == 2.0 && sampling == Sampling::SpatialAverage {
        return f.norm_sq() / (4.0 * PI * PI);
    }
    let v: Vec<f64> = f.to_physical().iter().map(|x| x.abs().powf(p)).collect();
    read(&v, sampling)
}

/// Estimate of `E|⟨∇⟩^{−α}Θ_N(x)|^p` with a 95% percentile bootstrap interval.
pub fn moment_estimate(
    sampler: &GmcSampler,
    alpha: f64,
    p: f64,
    samples: usize,
    seed: u64,
    sampling: Sampling,
) -> Result<(Estimate, (f64, f64))> {
    if !(p >= 1.0) || !(alpha > 0.0 && alpha < 2.0) {
        return Err(Error::InvalidArgument(format!("need p ≥ 1 and α ∈ (0, 2), got p = {p}, α = {alpha}")));
    }
    let grid = sampler.grid();
    let mult = bessel_multiplier(grid, alpha);
    let values = sampler.pairs(samples, seed, |theta| {
        let f = SpectralField::from_physical(grid, theta).with_multiplier(&mult);
        power_read(&f, p, sampling)
    });
    let ci = bootstrap_mean_ci(&values, 400, 0.95, &mut RngStream::new(seed, u64::MAX).rng());
    Ok((Estimate::from_samples(&values), ci))
}

/// Per-replica values of `M^{−2} Σ_x |⟨∇⟩^{−α}Θ_N(x)|^p` for a ladder of
/// truncations driven by the same white noise.
///
/// Truncation `N` is sampled on a grid of `4N` points; the Gaussian
/// coefficients of the shared modes coincide across the ladder.
#[derive(Clone, Debug)]
pub struct MomentLadder {
    pub ns: Vec<u32>,
    pub alpha: f64,
    pub p: f64,
    /// `values[k][i]`: truncation `ns[k]`, replica `i`.
    pub values: Vec<Vec<f64>>,
}

impl MomentLadder {
    pub fn estimate(&self, k: usize) -> Estimate {
        Estimate::from_samples(&self.values[k])
    }

    /// Coupled estimate of `value(ns[k]) − value(ns[j])`.
    pub fn difference(&self, k: usize, j: usize) -> Estimate {
        let d: Vec<f64> = self.values[k].iter().zip(&self.values[j]).map(|(a, b)| a - b).collect();
        Estimate::from_samples(&d)
    }
}

/// Builds coupled ladders for each `α` in `alphas` from one set of replicas.
pub fn moment_ladder(
    kind: TruncationKind,
    beta2: f64,
    ns: &[u32],
    alphas: &[f64],
    p: f64,
    samples: usize,
    seed: u64,
) -> Result<Vec<MomentLadder>> {
    let nmax = *ns.iter().max().ok_or_else(|| Error::InvalidArgument("empty ladder".into()))?;
    let base = TorusGrid::<f64>::new(2 * nmax as usize + 2)?;
    let levels: Vec<(GmcSampler, Vec<Vec<f64>>)> = ns
        .iter()
        .map(|&n| {
            let s = GmcSampler::standard(TruncationScheme::new(kind, n)?, beta2)?;
            let mults = alphas.iter().map(|&a| bessel_multiplier(s.grid(), a)).collect();
            Ok((s, mults))
        })
        .collect::<Result<_>>()?;
    let rows = map_replicas(samples, seed, |_, stream| {
        let noise = sample_unit_noise(&base, &mut stream.rng());
        let mut out = vec![vec![0.0; ns.len()]; alphas.len()];
        for (k, (s, mults)) in levels.iter().enumerate() {
            let psi = noise.resample(s.grid()).with_multiplier(&s.amp);
            let theta = wick_exp_values(&psi.to_physical(), s.beta, s.sigma);
            let hat = SpectralField::from_physical(s.grid(), &theta);
            for (a, mult) in mults.iter().enumerate() {
                out[a][k] = power_read(&hat.with_multiplier(mult), p, Sampling::SpatialAverage);
            }
        }
        out
    });
    Ok(alphas
        .iter()
        .enumerate()
        .map(|(a, &alpha)| MomentLadder {
            ns: ns.to_vec(),
            alpha,
            p,
            values: (0..ns.len()).map(|k| rows.iter().map(|r| r[a][k]).collect()).collect(),
        })
        .collect())
}

/// Estimate of `E|⟨∇⟩^{−α}(Θ_{N₁} − Θ_{2N₁})(x)|²` from coupled samples on a
/// grid of `8N₁` points.
pub fn cauchy_decay(
    kind: TruncationKind,
    beta2: f64,
    alpha: f64,
    n1: u32,
    samples: usize,
    seed: u64,
    sampling: Sampling,
) -> Result<Estimate> {
    let m = 8 * n1 as usize;
    let coarse = GmcSampler::new(TruncationScheme::new(kind, n1)?, beta2, m)?;
    let fine = GmcSampler::new(TruncationScheme::new(kind, 2 * n1)?, beta2, m)?;
    let grid = coarse.grid();
    let mult = bessel_multiplier(grid, alpha);
    let values = map_replicas(samples, seed, |_, stream| {
        let g = sample_unit_noise(grid, &mut stream.rng());
        let (a, b) = SpectralField::to_physical_pair(&g.with_multiplier(&coarse.amp), &g.with_multiplier(&fine.amp));
        let ta = wick_exp_values(&a, coarse.beta, coarse.sigma);
        let tb = wick_exp_values(&b, fine.beta, fine.sigma);
        let d: Vec<f64> = ta.iter().zip(&tb).map(|(x, y)| x - y).collect();
        let f = SpectralField::from_physical(grid, &d).with_multiplier(&mult);
        power_read(&f, 2.0, sampling)
    });
    Ok(Estimate::from_samples(&values))
}

/// `∫_{B(center, r)} Θ dx` by grid quadrature.
pub fn chaos_mass(theta: &super::GmcField<f64>, center: (f64, f64), r: f64) -> f64 {
    let grid = &theta.grid;
    let mut acc = 0.0;
    for (idx, &v) in theta.theta.iter().enumerate() {
        let (x1, x2) = grid.point(idx);
        if torus_norm(x1 - center.0, x2 - center.1) < r {
            acc += v;
        }
    }
    acc * grid.cell_area()
}

/// Indicator of the ball `|x| < r` on the grid.
pub fn ball_indicator(grid: &Grid, r: f64) -> Vec<f64> {
    (0..grid.len())
        .map(|idx| {
            let (x1, x2) = grid.point(idx);
            if torus_norm(x1, x2) < r {
                1.0
            } else {
                0.0
            }
        })
        .collect()
}

/// `ζ(p) = (2 + β²/4π)p − (β²/4π)p²`.
pub fn theoretical_zeta(beta2: f64, p: f64) -> f64 {
    let g = beta2 / (4.0 * PI);
    (2.0 + g) * p - g * p * p
}

#[derive(Clone, Debug)]
pub struct MultifractalFit {
    pub radii: Vec<f64>,
    /// `E M_N(B(x, r))^p` per radius, averaged over all centres.
    pub moments: Vec<Estimate>,
    /// Slope of `log E M^p` against `log r`.
    pub zeta: f64,
    /// Bootstrap standard error of the slope.
    pub zeta_se: f64,
    pub intercept: f64,
}

/// Fits `E M_N(B(x, r))^p ∝ r^ζ` over `radii`.
///
/// For every replica the ball masses at all grid centres come from one
/// convolution with the ball indicator; `p = 2` needs only the spectrum.
pub fn multifractal_fit(
    sampler: &GmcSampler,
    p: f64,
    radii: &[f64],
    samples: usize,
    seed: u64,
) -> Result<MultifractalFit> {
    let n = sampler.scheme().n as f64;
    if radii.len() < 2 {
        return Err(Error::InvalidArgument("need at least two radii".into()));
    }
    if let Some(r) = radii.iter().find(|&&r| !(r > 1.0 / n && r < 1.0)) {
        return Err(Error::InvalidArgument(format!("radius {r} outside (1/N, 1)")));
    }
    if !(p >= 1.0) {
        return Err(Error::InvalidArgument(format!("p = {p} must be at least 1")));
    }
    let grid = sampler.grid();
    let balls: Vec<Field> = radii
        .iter()
        .map(|&r| {
            let mut b = SpectralField::from_physical(grid, &ball_indicator(grid, r));
            b.scale(2.0 * PI);
            b
        })
        .collect();
    let rows: Vec<Vec<f64>> = sampler
        .hat_rows(samples, seed, |hat| {
            balls
                .iter()
                .map(|b| {
                    if p == 2.0 {
                        let s: f64 = hat.coeffs().iter().zip(b.coeffs()).map(|(t, w)| t.norm_sqr() * w.norm_sqr()).sum();
                        s / (4.0 * PI * PI)
                    } else {
                        let mass = SpectralField::from_coeffs(
                            grid,
                            hat.coeffs().iter().zip(b.coeffs()).map(|(t, w)| t * w).collect(),
                            f64::INFINITY,
                        )
                        .expect("product of real fields")
                        .to_physical();
                        mass.iter().map(|m| m.max(0.0).powf(p)).sum::<f64>() / mass.len() as f64
                    }
                })
                .collect()
        });
    let k = radii.len();
    let moments: Vec<Estimate> = (0..k)
        .map(|j| Estimate::from_samples(&rows.iter().map(|r| r[j]).collect::<Vec<_>>()))
        .collect();
    let lr: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    let fit = |means: &[f64]| {
        let lm: Vec<f64> = means.iter().map(|m| m.ln()).collect();
        linear_fit(&lr, &lm)
    };
    let (zeta, intercept, _) = fit(&moments.iter().map(|m| m.mean).collect::<Vec<_>>());
    let mut rng = RngStream::new(seed, u64::MAX).rng();
    let boot: Vec<f64> = (0..200)
        .map(|_| {
            let mut acc = vec![0.0; k];
            for _ in 0..rows.len() {
                let row = &rows[rng.random_range(0..rows.len())];
                for j in 0..k {
                    acc[j] += row[j];
                }
            }
            fit(&acc).0
        })
        .collect();
    let zeta_se = Estimate::from_samples(&boot).se * (boot.len() as f64).sqrt();
    Ok(MultifractalFit {
        radii: radii.to_vec(),
        moments,
        zeta,
        zeta_se,
        intercept,
    })
}

impl GmcSampler {
    /// Like `pairs`, but hands over the coefficients of `Θ`; both transforms
    /// are shared between the two replicas of a pair.
    fn hat_rows<F>(&self, samples: usize, seed: u64, f: F) -> Vec<Vec<f64>>
    where
        F: Fn(&Field) -> Vec<f64> + Sync,
    {
        let pairs = map_replicas(samples.div_ceil(2), seed, |_, stream| {
            let (a, b) = self.theta_pair(&mut stream.rng());
            let (ha, hb) = SpectralField::from_physical_pair(&self.grid, &a, &b);
            [f(&ha), f(&hb)]
        });
        pairs.into_iter().flatten().take(samples).collect()
    }
}
