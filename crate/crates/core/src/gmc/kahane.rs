use crate::ensemble::map_replicas;
use crate::random::standard_normal;
use crate::stats::Estimate;
use crate::{Error, Result};

/// Convex test functions of polynomial growth on `[0, ∞)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ConvexFn {
    /// `x^p`, `p ≥ 1`.
    Power(f64),
    /// `max(0, x − c)`.
    Hinge(f64),
}

impl ConvexFn {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            ConvexFn::Power(p) => x.powf(p),
            ConvexFn::Hinge(c) => (x - c).max(0.0),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct KahaneResult {
    pub lhs: Estimate,
    pub rhs: Estimate,
    /// `rhs − lhs` estimated on common random numbers.
    pub gap: Estimate,
    /// `lhs ≤ rhs + 3 SE(gap)`.
    pub holds: bool,
}

fn cholesky(a: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let n = a.len();
    let scale = (0..n).map(|i| a[i][i].abs()).fold(0.0, f64::max).max(1e-300);
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        if a[i].len() != n {
            return Err(Error::InvalidArgument("covariance must be square".into()));
        }
        for j in 0..=i {
            if (a[i][j] - a[j][i]).abs() > 1e-12 * scale {
                return Err(Error::InvalidArgument("covariance must be symmetric".into()));
            }
            let mut s = a[i][j];
            for k in 0..j {
                s -= l[i][k] * l[j][k];
            }
            if i == j {
                if s < -1e-12 * scale {
                    return Err(Error::NotPositiveSemidefinite);
                }
                l[i][i] = s.max(0.0).sqrt();
            } else {
                l[i][j] = if l[j][j] > 0.0 { s / l[j][j] } else { 0.0 };
            }
        }
    }
    Ok(l)
}

/// Monte-Carlo comparison of `E F(Σ p_j e^{X_j − E X_j²/2})` (lhs) with the
/// same functional of `Y` (rhs) for centred Gaussian vectors with
/// `E X_j X_k ≤ E Y_j Y_k`.
///
/// Both sides are evaluated on the same standard normal draws.
pub fn kahane_check(
    cov_x: &[Vec<f64>],
    cov_y: &[Vec<f64>],
    weights: &[f64],
    f: ConvexFn,
    samples: usize,
    seed: u64,
) -> Result<KahaneResult> {
    let n = weights.len();
    if cov_x.len() != n || cov_y.len() != n {
        return Err(Error::InvalidArgument("dimension mismatch".into()));
    }
    if weights.iter().any(|&p| p < 0.0) {
        return Err(Error::InvalidArgument("weights must be nonnegative".into()));
    }
    for i in 0..n {
        for j in 0..n {
            if cov_x[i][j] > cov_y[i][j] + 1e-14 {
                return Err(Error::InvalidArgument(format!(
                    "covariances not ordered at ({i}, {j})"
                )));
            }
        }
    }
    let lx = cholesky(cov_x)?;
    let ly = cholesky(cov_y)?;
    let rows = map_replicas(samples, seed, |_, stream| {
        let mut rng = stream.rng();
        let g: Vec<f64> = (0..n).map(|_| standard_normal(&mut rng)).collect();
        let side = |l: &[Vec<f64>], c: &[Vec<f64>]| {
            let mut acc = 0.0;
            for j in 0..n {
                let x: f64 = (0..=j).map(|k| l[j][k] * g[k]).sum();
                acc += weights[j] * (x - 0.5 * c[j][j]).exp();
            }
            f.eval(acc)
        };
        (side(&lx, cov_x), side(&ly, cov_y))
    });
    let lhs: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let rhs: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let gap: Vec<f64> = rows.iter().map(|r| r.1 - r.0).collect();
    let gap = Estimate::from_samples(&gap);
    Ok(KahaneResult {
        lhs: Estimate::from_samples(&lhs),
        rhs: Estimate::from_samples(&rhs),
        gap,
        holds: gap.mean >= -3.0 * gap.se,
    })
}
