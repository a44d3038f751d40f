use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TruncationKind {
    /// `χ(n/N)` with `χ = 1` on `[0, 1/2]`, `0` on `[1, ∞)`, quintic smoothstep between.
    SmoothProjector,
    /// Convolution with `ρ_N(x) = N² ρ(N x)`, `ρ` the normalized bump on the unit disc.
    PositiveMollifier,
    /// Indicator of `|n| ≤ N`.
    Sharp,
}

impl std::str::FromStr for TruncationKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "smooth" | "smooth_projector" | "P" => Ok(TruncationKind::SmoothProjector),
            "mollifier" | "positive_mollifier" | "Q" => Ok(TruncationKind::PositiveMollifier),
            "sharp" => Ok(TruncationKind::Sharp),
            _ => Err(Error::InvalidArgument(format!("unknown truncation scheme '{s}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncationScheme {
    pub kind: TruncationKind,
    pub n: u32,
}

impl TruncationScheme {
    pub fn new(kind: TruncationKind, n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("truncation parameter N must be positive".into()));
        }
        Ok(TruncationScheme { kind, n })
    }

    pub fn smooth(n: u32) -> Self {
        Self::new(TruncationKind::SmoothProjector, n).expect("N > 0")
    }

    pub fn mollifier(n: u32) -> Self {
        Self::new(TruncationKind::PositiveMollifier, n).expect("N > 0")
    }

    pub fn sharp(n: u32) -> Self {
        Self::new(TruncationKind::Sharp, n).expect("N > 0")
    }

    /// Symbol at mode `n`.
    pub fn symbol(&self, n1: i64, n2: i64) -> f64 {
        self.radial_symbol(((n1 * n1 + n2 * n2) as f64).sqrt())
    }

    /// Symbol as a function of `|n|`.
    pub fn radial_symbol(&self, r: f64) -> f64 {
        let xi = r / self.n as f64;
        match self.kind {
            TruncationKind::SmoothProjector => smooth_cutoff(xi),
            TruncationKind::PositiveMollifier => mollifier_symbol(xi),
            TruncationKind::Sharp => {
                if xi <= 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Radius in `|n|` beyond which `|symbol| < tol`.
    pub fn support_radius(&self, tol: f64) -> f64 {
        let n = self.n as f64;
        match self.kind {
            TruncationKind::SmoothProjector | TruncationKind::Sharp => n,
            TruncationKind::PositiveMollifier => n * mollifier_decay_radius(tol),
        }
    }
}

/// `1 − S((|ξ| − 1/2)/(1/2))` with `S(t) = 6t⁵ − 15t⁴ + 10t³` clamped to `[0,1]`.
pub fn smooth_cutoff(xi: f64) -> f64 {
    let t = ((xi.abs() - 0.5) * 2.0).clamp(0.0, 1.0);
    1.0 - t * t * t * (t * (6.0 * t - 15.0) + 10.0)
}

/// Unnormalized bump `exp(−1/(1 − r²))` on `r < 1`.
pub fn bump(r2: f64) -> f64 {
    if r2 < 1.0 {
        (-1.0 / (1.0 - r2)).exp()
    } else {
        0.0
    }
}

/// Physical mollifier `ρ_N(x) = N² ρ(N x)` with unit mass.
pub fn mollifier_kernel(n: f64, x1: f64, x2: f64) -> f64 {
    let (y1, y2) = (n * x1, n * x2);
    n * n * bump(y1 * y1 + y2 * y2) / mollifier_table().mass
}

/// `m(k) = ∫ ρ(y) e^{−i k y_1} dy`, the radial Fourier transform of `ρ`; the
/// symbol of `Q_N` at mode `n` is `m(|n|/N)`.
pub fn mollifier_symbol(k: f64) -> f64 {
    mollifier_table().eval(k.abs())
}

/// Smallest `K` with `|m(k)| < tol` for all tabulated `k ≥ K`.
pub fn mollifier_decay_radius(tol: f64) -> f64 {
    let t = mollifier_table();
    let mut last = t.k_max;
    for (j, v) in t.values.iter().enumerate().rev() {
        if v.abs() >= tol {
            last = (j + 1) as f64 * t.dk;
            break;
        }
    }
    last.min(t.k_max)
}

const TABLE_K_MAX: f64 = 256.0;
const TABLE_STEPS_PER_UNIT: usize = 128;
const MARGINAL_NODES: usize = 2048;
const INNER_NODES: usize = 512;

struct MollifierTable {
    mass: f64,
    dk: f64,
    k_max: f64,
    values: Vec<f64>,
}

impl MollifierTable {
    fn eval(&self, k: f64) -> f64 {
        if k >= self.k_max {
            return 0.0;
        }
        let u = k / self.dk;
        let j = (u.floor() as usize).min(self.values.len() - 2);
        let s = u - j as f64;
        let at = |i: isize| -> f64 {
            let i = i.unsigned_abs();
            self.values.get(i).copied().unwrap_or(0.0)
        };
        // four-point Lagrange; the table is even in k so index −1 mirrors 1
        let j = j as isize;
        let (p0, p1, p2, p3) = (at(j - 1), at(j), at(j + 1), at(j + 2));
        let w0 = -s * (s - 1.0) * (s - 2.0) / 6.0;
        let w1 = (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0;
        let w2 = -(s + 1.0) * s * (s - 2.0) / 2.0;
        let w3 = (s + 1.0) * s * (s - 1.0) / 6.0;
        w0 * p0 + w1 * p1 + w2 * p2 + w3 * p3
    }
}

fn mollifier_table() -> &'static MollifierTable {
    static TABLE: OnceLock<MollifierTable> = OnceLock::new();
    TABLE.get_or_init(build_table)
}

/// `∫ exp(−1/(1 − y² − y₂²)) dy₂` over the chord at height `y`.
///
/// With `s = √(1 − y²)` and `y₂ = s t` the integrand becomes
/// `s exp(−1/(s²(1 − t²)))`, flat to all orders at `t = ±1`, so the trapezoid
/// rule converges faster than any power.
fn marginal(y: f64) -> f64 {
    let s2 = 1.0 - y * y;
    if s2 <= 0.0 {
        return 0.0;
    }
    let dt = 2.0 / INNER_NODES as f64;
    let mut acc = 0.0;
    for i in 1..INNER_NODES {
        let t = -1.0 + i as f64 * dt;
        acc += (-1.0 / (s2 * (1.0 - t * t))).exp();
    }
    s2.sqrt() * acc * dt
}

fn build_table() -> MollifierTable {
    let dy = 1.0 / MARGINAL_NODES as f64;
    let g: Vec<f64> = (0..MARGINAL_NODES).map(|i| marginal(i as f64 * dy)).collect();
    // the marginal is even: ∫_{−1}^{1} g = 2 ∫_0^1 g, trapezoid with g(1) = 0
    let mass = dy * (2.0 * g.iter().sum::<f64>() - g[0]);
    let dk = 1.0 / TABLE_STEPS_PER_UNIT as f64;
    let count = (TABLE_K_MAX / dk) as usize + 1;
    let mut values = vec![0.0; count];
    for (i, &gi) in g.iter().enumerate() {
        let w = if i == 0 { dy } else { 2.0 * dy } * gi / mass;
        if w == 0.0 {
            continue;
        }
        let y = i as f64 * dy;
        let c1 = (dk * y).cos();
        let (mut prev, mut cur) = (c1, 1.0);
        for v in values.iter_mut() {
            *v += w * cur;
            let next = 2.0 * c1 * cur - prev;
            prev = cur;
            cur = next;
        }
    }
    MollifierTable {
        mass,
        dk,
        k_max: TABLE_K_MAX,
        values,
    }
}
