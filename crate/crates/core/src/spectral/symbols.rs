use crate::{Error, Result};

/// `e^{−t⟨n⟩²/2}`, the heat semigroup `e^{t(Δ−1)/2}` at a mode with `⟨n⟩² = bsq`.
pub fn heat_symbol(t: f64, bsq: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::InvalidArgument(format!("negative time {t}")));
    }
    Ok((-0.5 * t * bsq).exp())
}

/// `sin(ω t)/ω`, continuous at `ω = 0` where it equals `t`.
#[inline]
pub fn sinc_t(omega: f64, t: f64) -> f64 {
    let x = omega * t;
    if x.abs() < 1e-4 {
        let x2 = x * x;
        t * (1.0 - x2 / 6.0 * (1.0 - x2 / 20.0))
    } else {
        x.sin() / omega
    }
}

/// Impulse response `w` of `ẍ + ẋ + k x = 0` (`w(0) = 0`, `ẇ(0) = 1`) and its
/// derivative, for `k ≥ 1/4`: `w = e^{−t/2} sin(ω t)/ω`, `ω = √(k − 1/4)`.
#[inline]
pub fn damped_response(k: f64, t: f64) -> (f64, f64) {
    let omega = (k - 0.25).max(0.0).sqrt();
    let e = (-0.5 * t).exp();
    let s = sinc_t(omega, t);
    let c = (omega * t).cos();
    (e * s, e * (c - 0.5 * s))
}

/// Per-mode propagator values of the damped Klein–Gordon and wave flows.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WaveSymbols {
    /// `D = e^{−t/2} sin(tω)/ω`, `ω = √(3/4 + |n|²)`.
    pub d: f64,
    pub d_dot: f64,
    /// `S = sin(t|n|)/|n|`, equal to `t` at `n = 0`.
    pub s: f64,
    /// `D − e^{−t/2} S`.
    pub diff: f64,
    pub diff_dot: f64,
}

/// Symbols at time `t` and `|n|² = nsq`.
pub fn wave_symbols(t: f64, nsq: f64) -> WaveSymbols {
    let (d, d_dot) = damped_response(1.0 + nsq, t);
    let r = nsq.sqrt();
    let s = sinc_t(r, t);
    let e = (-0.5 * t).exp();
    let x = e * s;
    let x_dot = e * ((r * t).cos() - 0.5 * s);
    WaveSymbols {
        d,
        d_dot,
        s,
        diff: d - x,
        diff_dot: d_dot - x_dot,
    }
}

/// State transition of `ẍ + ẋ + k x = 0` over time `t`, acting on `(x, ẋ)`.
pub fn damped_transition(k: f64, t: f64) -> [[f64; 2]; 2] {
    let (w, wd) = damped_response(k, t);
    [[wd + w, w], [-k * w, wd]]
}

/// Covariance of `∫_0^h Φ(h−s) (0, σ) dB(s)` for `ẍ + ẋ + k x = σ Ḃ`, with
/// `E|dB|² = ds`. Entries are `σ² ∫_0^h (w², w ẇ, ẇ²)`.
pub fn damped_noise_covariance(k: f64, h: f64, sigma_sq: f64) -> [[f64; 2]; 2] {
    let omega = (k - 0.25).max(0.0).sqrt();
    let i0 = -(-h).exp_m1();
    let (ww, wwd, wdwd) = if omega * h < 1e-3 {
        moments_by_quadrature(k, h)
    } else {
        // J = ∫_0^h e^{(−1 + 2iω)s} ds = (e^{zh} − 1)/z with z = −1 + 2iω
        let th = 2.0 * omega * h;
        let em = (-h).exp_m1();
        let half = 0.5 * th;
        let num_re = em * th.cos() - 2.0 * half.sin() * half.sin();
        let num_im = (-h).exp() * th.sin();
        let (zr, zi) = (-1.0, 2.0 * omega);
        let den = zr * zr + zi * zi;
        let ic = (num_re * zr + num_im * zi) / den;
        let is = (num_im * zr - num_re * zi) / den;
        let o2 = omega * omega;
        let one_minus = i0 - ic;
        (
            one_minus / (2.0 * o2),
            is / (2.0 * omega) - one_minus / (4.0 * o2),
            0.5 * (i0 + ic) - is / (2.0 * omega) + one_minus / (8.0 * o2),
        )
    };
    [
        [sigma_sq * ww, sigma_sq * wwd],
        [sigma_sq * wwd, sigma_sq * wdwd],
    ]
}

fn moments_by_quadrature(k: f64, h: f64) -> (f64, f64, f64) {
    let (nodes, weights) = crate::quadrature::gauss_legendre(24);
    let (mut a, mut b, mut c) = (0.0, 0.0, 0.0);
    for (x, w) in nodes.iter().zip(&weights) {
        let s = 0.5 * h * (x + 1.0);
        let (u, ud) = damped_response(k, s);
        let w = 0.5 * h * w;
        a += w * u * u;
        b += w * u * ud;
        c += w * ud * ud;
    }
    (a, b, c)
}
