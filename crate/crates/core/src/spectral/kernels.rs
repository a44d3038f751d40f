use std::f64::consts::{PI, TAU};

use num_complex::Complex;
use statrs::function::gamma::{gamma, gamma_ur};

use super::grid::TorusGrid;
use super::symbols::sinc_t;
use super::truncation::{TruncationKind, TruncationScheme};
use crate::quadrature::{gauss_legendre, integrate};
use crate::{Error, Result};

/// `σ_N = (1/4π²) Σ_{n ∈ Z²} symbol(n)² / ⟨n⟩²` summed over the whole lattice.
///
/// For the mollifier the sum stops at `|n| ≤ K N` with `K` chosen so that the
/// tail bound returned in [`SigmaSum::remainder`] is below `1e−10`.
pub fn sigma_n(scheme: &TruncationScheme) -> SigmaSum {
    let n = scheme.n as f64;
    let (radius, remainder) = match scheme.kind {
        TruncationKind::SmoothProjector | TruncationKind::Sharp => (n, 0.0),
        TruncationKind::PositiveMollifier => mollifier_sigma_radius(n, 1e-10),
    };
    let r = radius.floor() as i64;
    let value = radial_lattice_sum(r, |n1, n2| {
        let s = scheme.symbol(n1, n2);
        if s == 0.0 {
            0.0
        } else {
            s * s / (1.0 + (n1 * n1 + n2 * n2) as f64)
        }
    }) / (4.0 * PI * PI);
    SigmaSum { value, remainder }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SigmaSum {
    pub value: f64,
    /// Upper bound on the omitted lattice tail.
    pub remainder: f64,
}

/// `(1/4π²) Σ symbol²/⟨n⟩²` over the non-Nyquist modes of `grid`. This is the
/// pointwise variance of the truncated free field sampled on that grid.
pub fn sigma_grid<T: crate::Scalar>(grid: &TorusGrid<T>, scheme: &TruncationScheme) -> f64 {
    let mut acc = 0.0;
    for idx in 0..grid.len() {
        if grid.is_nyquist(idx) {
            continue;
        }
        let (n1, n2) = grid.mode(idx);
        let s = scheme.symbol(n1, n2);
        acc += s * s / (1.0 + (n1 * n1 + n2 * n2) as f64);
    }
    acc / (4.0 * PI * PI)
}

/// Tail bound `(1/4π²) Σ_{|n|>R} m(|n|/N)²/|n|² ≤ (1/2π) ∫_{R−1}^∞ m(r/N)² / r · (1 + 1/r) dr`.
fn mollifier_sigma_radius(n: f64, tol: f64) -> (f64, f64) {
    let k_end = super::truncation::mollifier_decay_radius(0.0).max(1.0);
    let tail = |k0: f64| -> f64 {
        // ∫_{k0}^{k_end} m(k)²/k dk by the midpoint rule on the table spacing
        let dk = 1.0 / 64.0;
        let mut acc = 0.0;
        let mut k = k0 + 0.5 * dk;
        while k < k_end {
            let m = super::truncation::mollifier_symbol(k);
            acc += m * m / k * dk;
            k += dk;
        }
        acc / TAU * 1.1
    };
    let mut k = 8.0;
    while k < k_end {
        let r = k * n;
        let bound = tail((r - 1.0).max(1.0) / n);
        if bound < tol {
            return (r, bound);
        }
        k += 4.0;
    }
    (k_end * n, 0.0)
}

/// `Σ_{|n| ≤ r} f(n)` for a function of `|n|` only, evaluating each orbit of the
/// lattice symmetry group once.
pub fn radial_lattice_sum(r: i64, f: impl Fn(i64, i64) -> f64) -> f64 {
    let r2 = r * r;
    let mut acc = 0.0;
    for a in 0..=r {
        for b in 0..=a {
            if a * a + b * b > r2 {
                break;
            }
            let mult = match (a, b) {
                (0, 0) => 1.0,
                (_, 0) => 4.0,
                _ if a == b => 4.0,
                _ => 8.0,
            };
            acc += mult * f(a, b);
        }
    }
    acc
}

/// Values on `grid` of the periodic function `(1/4π²) Σ_{n ∈ Z², |n| ≤ r} f(|n|) e^{i n·x}`.
///
/// Lattice modes are folded onto grid modes mod `M` before the inverse
/// transform, so the grid values are exact (no truncation to the grid's
/// frequency box). `f` must depend on `|n|` only.
pub fn folded_radial_kernel(grid: &TorusGrid<f64>, r: f64, f: impl Fn(f64) -> f64) -> Vec<f64> {
    let m = grid.m() as i64;
    let mut buf = vec![Complex::new(0.0, 0.0); grid.len()];
    let ri = r.floor() as i64;
    let r2 = ri * ri;
    for a in 0..=ri {
        for b in 0..=a {
            let nsq = a * a + b * b;
            if nsq > r2 {
                break;
            }
            let v = f((nsq as f64).sqrt());
            if v == 0.0 {
                continue;
            }
            let mut add = |p: i64, q: i64| {
                let idx = (p.rem_euclid(m) * m + q.rem_euclid(m)) as usize;
                buf[idx].re += v;
            };
            if a == 0 {
                add(0, 0);
            } else if b == 0 {
                add(a, 0);
                add(-a, 0);
                add(0, a);
                add(0, -a);
            } else if a == b {
                add(a, a);
                add(-a, a);
                add(a, -a);
                add(-a, -a);
            } else {
                for (p, q) in [(a, b), (b, a)] {
                    add(p, q);
                    add(-p, q);
                    add(p, -q);
                    add(-p, -q);
                }
            }
        }
    }
    grid.fft().inverse(&mut buf);
    buf.iter().map(|c| c.re / (4.0 * PI * PI)).collect()
}

/// Grid values of the truncated Bessel kernel `T₁ T₂ ⟨∇⟩^{−α} δ`, i.e.
/// `(1/4π²) Σ s₁(n) s₂(n) ⟨n⟩^{−α} e^{i n·x}` over all of `Z²`.
pub fn truncated_bessel_on_grid(
    grid: &TorusGrid<f64>,
    alpha: f64,
    first: &TruncationScheme,
    second: &TruncationScheme,
) -> Vec<f64> {
    let r = first.support_radius(1e-9).min(second.support_radius(1e-9));
    folded_radial_kernel(grid, r, |k| {
        first.radial_symbol(k) * second.radial_symbol(k) * (1.0 + k * k).powf(-0.5 * alpha)
    })
}

/// Ewald evaluation of the Bessel potential `J_α = ⟨∇⟩^{−α} δ` on the torus,
/// `J_α(x) = (1/4π²) Σ_n ⟨n⟩^{−α} e^{i n·x}`, for `α ∈ (0, 2]` and `x ≠ 0`.
///
/// The Mellin representation `⟨n⟩^{−α} = Γ(α/2)^{−1} ∫_0^∞ s^{α/2−1} e^{−s⟨n⟩²} ds`
/// is split at `s = 1`: the part `s > 1` is summed in Fourier space (terms
/// decay like `e^{−|n|²}`), the part `s < 1` in real space after Poisson
/// summation (terms decay like `e^{−|x+2πk|²/4}`). `G = J_2` is the Green
/// function of `1 − Δ`.
pub fn bessel_kernel(alpha: f64, x1: f64, x2: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 2.0) {
        return Err(Error::InvalidArgument(format!("alpha = {alpha} outside (0, 2]")));
    }
    let y1 = wrap(x1);
    let y2 = wrap(x2);
    if y1 * y1 + y2 * y2 < 1e-28 {
        return Err(Error::SingularPoint);
    }
    let a = 0.5 * alpha;
    let mut fourier = 0.0;
    for n1 in -7i64..=7 {
        for n2 in -7i64..=7 {
            let bsq = 1.0 + (n1 * n1 + n2 * n2) as f64;
            let w = bsq.powf(-a) * gamma_ur(a, bsq);
            fourier += w * (n1 as f64 * y1 + n2 as f64 * y2).cos();
        }
    }
    fourier /= 4.0 * PI * PI;
    let rule = gauss_legendre(12);
    let mut real = 0.0;
    for k1 in -3i64..=3 {
        for k2 in -3i64..=3 {
            let d1 = y1 + TAU * k1 as f64;
            let d2 = y2 + TAU * k2 as f64;
            let r2 = d1 * d1 + d2 * d2;
            real += short_time_integral(a, r2, &rule);
        }
    }
    real /= 4.0 * PI * gamma(a);
    Ok(fourier + real)
}

/// `∫_0^1 s^{a−2} e^{−s − r²/(4s)} ds` with `s = e^τ`.
fn short_time_integral(a: f64, r2: f64, rule: &(Vec<f64>, Vec<f64>)) -> f64 {
    let q = 0.25 * r2;
    if q > 700.0 {
        return 0.0;
    }
    // below τ_min the factor e^{−q e^{−τ}} is under e^{−745}
    let tau_min = (q / 745.0).ln();
    let f = |tau: f64| ((a - 1.0) * tau - tau.exp() - q * (-tau).exp()).exp();
    let panels = ((-tau_min) / 0.25).ceil().max(1.0) as usize;
    integrate(f, tau_min, 0.0, panels, rule)
}

/// Reduces an angle to `[−π, π)`.
pub fn wrap(x: f64) -> f64 {
    (x + PI).rem_euclid(TAU) - PI
}

/// Torus distance of `(x1, x2)` from the origin.
pub fn torus_norm(x1: f64, x2: f64) -> f64 {
    let (a, b) = (wrap(x1), wrap(x2));
    (a * a + b * b).sqrt()
}

/// Grid values of the mollified undamped wave kernel `Q_N S_t δ`,
/// `(1/4π²) Σ_n m(|n|/N) sin(t|n|)/|n| e^{i n·x}`, and its minimum.
pub fn wave_kernel_check(grid: &TorusGrid<f64>, t: f64, n: u32) -> (f64, Vec<f64>) {
    let scheme = TruncationScheme::mollifier(n);
    let r = scheme.support_radius(1e-9);
    let values = folded_radial_kernel(grid, r, |k| scheme.radial_symbol(k) * sinc_t(k, t));
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    (min, values)
}
