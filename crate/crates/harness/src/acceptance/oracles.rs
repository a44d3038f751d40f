//! Fine Euler–Maruyama references for the full heat and wave steppers on
//! the three-mode system: grid `4²`, sharp truncation `N = 1`, so `Q` keeps
//! the modes `(0,0)`, `(±1,0)`, `(0,±1)`. Everything here is computed by
//! direct sums, independently of the transforms in the core crate.

use std::f64::consts::PI;

use liouville_core::random::standard_normal;
use liouville_core::Field;
use num_complex::Complex;
use rand::Rng;

pub const M: usize = 4;
/// Modes resolved by the 4² grid (Nyquist removed).
const RANGE: [i64; 3] = [-1, 0, 1];

/// Coefficients indexed by `(n1 + 1) * 3 + (n2 + 1)`.
pub type Modes = [Complex<f64>; 9];

fn slot(n1: i64, n2: i64) -> usize {
    ((n1 + 1) * 3 + (n2 + 1)) as usize
}

fn kept(n1: i64, n2: i64) -> bool {
    n1 * n1 + n2 * n2 <= 1
}

fn bracket(n1: i64, n2: i64) -> f64 {
    1.0 + (n1 * n1 + n2 * n2) as f64
}

/// `C_N` for the sharp `N = 1` cut: `σ = 3/(4π²)`.
pub fn c_n(beta: f64) -> f64 {
    (-0.5 * beta * beta * 3.0 / (4.0 * PI * PI)).exp()
}

/// `Q(e^{βQu})` coefficients, `Ê(n) = (2π/M²) Σ_j E(x_j) e^{−in·x_j}`.
pub fn chaos_drift(u: &Modes, beta: f64) -> Modes {
    let h = 2.0 * PI / M as f64;
    let mut e = [0.0; M * M];
    for (j, ej) in e.iter_mut().enumerate() {
        let (x1, x2) = ((j / M) as f64 * h, (j % M) as f64 * h);
        let mut v = 0.0;
        for &a in &RANGE {
            for &b in &RANGE {
                if kept(a, b) {
                    v += (u[slot(a, b)] * Complex::from_polar(1.0, a as f64 * x1 + b as f64 * x2)).re;
                }
            }
        }
        *ej = (beta * v / (2.0 * PI)).exp();
    }
    let mut out = [Complex::new(0.0, 0.0); 9];
    for &a in &RANGE {
        for &b in &RANGE {
            if !kept(a, b) {
                continue;
            }
            let mut acc = Complex::new(0.0, 0.0);
            for (j, &ej) in e.iter().enumerate() {
                let (x1, x2) = ((j / M) as f64 * h, (j % M) as f64 * h);
                acc += ej * Complex::from_polar(1.0, -(a as f64 * x1 + b as f64 * x2));
            }
            out[slot(a, b)] = acc * (2.0 * PI / (M * M) as f64);
        }
    }
    out
}

/// Hermitian increment with `E|ΔW(n)|² = h` (real at `n = 0`).
pub fn increment<R: Rng + ?Sized>(h: f64, rng: &mut R) -> Modes {
    let mut w = [Complex::new(0.0, 0.0); 9];
    let s = (0.5 * h).sqrt();
    w[slot(0, 0)] = Complex::new(h.sqrt() * standard_normal(rng), 0.0);
    for (a, b) in [(1, 0), (-1, 1), (0, 1), (1, 1)] {
        let c = Complex::new(s * standard_normal(rng), s * standard_normal(rng));
        w[slot(a, b)] = c;
        w[slot(-a, -b)] = c.conj();
    }
    w
}

pub fn heat_em_step(u: &mut Modes, beta: f64, lambda: f64, h: f64, dw: &Modes) {
    let n = chaos_drift(u, beta);
    let k = 0.5 * lambda * beta * c_n(beta);
    for &a in &RANGE {
        for &b in &RANGE {
            let i = slot(a, b);
            u[i] += h * (-0.5 * bracket(a, b) * u[i] - k * n[i]) + dw[i];
        }
    }
}

pub fn wave_em_step(u: &mut Modes, v: &mut Modes, beta: f64, lambda: f64, h: f64, dw: &Modes) {
    let n = chaos_drift(u, beta);
    let k = lambda * beta * c_n(beta);
    let u_old = *u;
    for &a in &RANGE {
        for &b in &RANGE {
            let i = slot(a, b);
            u[i] += h * v[i];
            v[i] += h * (-v[i] - bracket(a, b) * u_old[i] - k * n[i]) + 2f64.sqrt() * dw[i];
        }
    }
}

/// `exp(h A)` for `A = [[0, 1], [−k, −1]]` by scaling and squaring.
pub fn damped_flow(k: f64, h: f64) -> [[f64; 2]; 2] {
    let mul = |x: [[f64; 2]; 2], y: [[f64; 2]; 2]| {
        let mut z = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                z[i][j] = x[i][0] * y[0][j] + x[i][1] * y[1][j];
            }
        }
        z
    };
    let s = 10;
    let t = h / (1 << s) as f64;
    let a = [[0.0, t], [-k * t, -t]];
    let mut e = [[1.0, 0.0], [0.0, 1.0]];
    let mut term = e;
    for j in 1..20 {
        term = mul(term, a);
        for r in 0..2 {
            for c in 0..2 {
                term[r][c] /= j as f64;
                e[r][c] += term[r][c];
            }
        }
    }
    for _ in 0..s {
        e = mul(e, e);
    }
    e
}

/// Wave noise accumulated over one fine step: `(a, b) ← e^{hA}(a, b) + (0, √2 ΔW)`.
pub fn accumulate_wave_noise(a: &mut Modes, b: &mut Modes, h: f64, dw: &Modes) {
    for &p in &RANGE {
        for &q in &RANGE {
            let i = slot(p, q);
            let f = damped_flow(bracket(p, q), h);
            let (x, y) = (a[i], b[i]);
            a[i] = x * f[0][0] + y * f[0][1];
            b[i] = x * f[1][0] + y * f[1][1] + 2f64.sqrt() * dw[i];
        }
    }
}

/// Heat noise accumulated over one fine step: `η ← e^{−h⟨n⟩²/2} η + ΔW`.
pub fn accumulate_heat_noise(eta: &mut Modes, h: f64, dw: &Modes) {
    for &p in &RANGE {
        for &q in &RANGE {
            let i = slot(p, q);
            eta[i] = eta[i] * (-0.5 * h * bracket(p, q)).exp() + dw[i];
        }
    }
}

pub fn to_field(grid: &liouville_core::Grid, u: &Modes) -> Field {
    Field::from_modes(grid, |a, b| if a.abs() <= 1 && b.abs() <= 1 { u[slot(a, b)] } else { Complex::new(0.0, 0.0) })
}

pub fn from_field(f: &Field) -> Modes {
    let mut u = [Complex::new(0.0, 0.0); 9];
    for &a in &RANGE {
        for &b in &RANGE {
            u[slot(a, b)] = f.coeff(a, b);
        }
    }
    u
}

pub fn distance(a: &Modes, b: &Modes) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

/// Deterministic starting data.
pub fn initial() -> (Modes, Modes) {
    let mut u = [Complex::new(0.0, 0.0); 9];
    let mut v = [Complex::new(0.0, 0.0); 9];
    let set = |w: &mut Modes, a: i64, b: i64, c: Complex<f64>| {
        w[slot(a, b)] = c;
        w[slot(-a, -b)] = c.conj();
    };
    set(&mut u, 0, 0, Complex::new(0.4, 0.0));
    set(&mut u, 1, 0, Complex::new(0.3, -0.2));
    set(&mut u, 0, 1, Complex::new(-0.25, 0.1));
    set(&mut u, 1, 1, Complex::new(0.1, 0.05));
    set(&mut v, 0, 0, Complex::new(-0.2, 0.0));
    set(&mut v, 1, 0, Complex::new(0.1, 0.3));
    set(&mut v, -1, 1, Complex::new(0.2, -0.1));
    (u, v)
}
