use std::f64::consts::PI;

use liouville_core::gmc::*;
use liouville_core::random::{sample_gff, RngStream};
use liouville_core::spectral::kernels::sigma_grid;
use liouville_core::spectral::{bracket_sq, SpectralField, TruncationKind, TruncationScheme};
use liouville_core::{Error, Grid};
use num_complex::Complex;

/// `E φ(g)`, `g ~ N(0, σ)`, by the trapezoid rule on `±14√σ` (exponentially
/// accurate for entire integrands).
fn gaussian_expect(sigma: f64, phi: impl Fn(f64) -> f64) -> f64 {
    let l = 14.0 * sigma.sqrt();
    let n = 4000;
    let h = 2.0 * l / n as f64;
    let mut acc = 0.0;
    for i in 0..=n {
        let x = -l + i as f64 * h;
        let w = if i == 0 || i == n { 0.5 } else { 1.0 };
        acc += w * phi(x) * (-x * x / (2.0 * sigma)).exp();
    }
    acc * h / (2.0 * PI * sigma).sqrt()
}

#[test]
fn hermite_low_orders() {
    for &(x, s) in &[(0.3, 0.7), (-1.7, 2.0), (2.5, 0.0)] {
        assert_eq!(hermite(0, x, s), 1.0);
        assert_eq!(hermite(1, x, s), x);
        assert!((hermite(2, x, s) - (x * x - s)).abs() < 1e-14);
        assert!((hermite(3, x, s) - (x * x * x - 3.0 * s * x)).abs() < 1e-13);
    }
}

#[test]
fn hermite_orthogonality() {
    for &sigma in &[0.5, 1.0, 1.7] {
        for j in 0..=6 {
            for k in 0..=6 {
                let e = gaussian_expect(sigma, |x| hermite(j, x, sigma) * hermite(k, x, sigma));
                let want = if j == k {
                    (1..=k).map(|i| i as f64).product::<f64>() * sigma.powi(k as i32)
                } else {
                    0.0
                };
                assert!((e - want).abs() < 1e-8, "σ={sigma} j={j} k={k}: {e} vs {want}");
            }
        }
    }
}

#[test]
fn hermite_generating_function() {
    for &x in &[-3.0f64, -1.2, 0.0, 0.8, 3.0] {
        for &s in &[0.0, 0.5, 2.0] {
            for &b in &[0.2, 0.7, 1.0] {
                let want = (b * x - 0.5 * b * b * s).exp();
                assert!((hermite_series(50, b, x, s) - want).abs() < 1e-10 * want.max(1.0));
            }
        }
    }
}

#[test]
fn wick_exp_trivial_and_positive() {
    let grid = Grid::new(32).unwrap();
    let scheme = TruncationScheme::smooth(8);
    let psi: SpectralField<f64> = sample_gff(&grid, Some(&scheme), &mut RngStream::new(1, 0).rng());
    let one = wick_exp(&psi, 0.0, 1.3, Some(scheme)).unwrap();
    assert!(one.theta.iter().all(|&v| v == 1.0));
    let sigma = sigma_grid(&grid, &scheme);
    let th = wick_exp(&psi, (2.0 * PI).sqrt(), sigma, Some(scheme)).unwrap();
    assert!(th.min() > 0.0);
    assert!((th.total_mass() - 2.0 * PI * th.zero_mode()).abs() < 1e-9 * th.total_mass());
}

#[test]
fn wick_exp_overflow_is_reported() {
    let grid = Grid::new(8).unwrap();
    let psi = SpectralField::constant(&grid, 1e6);
    assert!(matches!(wick_exp(&psi, 10.0, 0.0, None), Err(Error::NumericAbort { .. })));
}

#[test]
fn gmc_mean_is_one() {
    for &b2 in &[PI / 2.0, PI, 2.0 * PI] {
        let s = GmcSampler::standard(TruncationScheme::smooth(16), b2).unwrap();
        let e = mean_estimate(&s, 4000, 11, Sampling::SpatialAverage);
        assert!(e.within(1.0, 3.0), "β²={b2}: {e:?}");
        let e = mean_estimate(&s, 4000, 12, Sampling::Point(0));
        assert!(e.within(1.0, 3.0), "β²={b2} pointwise: {e:?}");
    }
}

#[test]
fn covariance_profile_matches_spectral_sum() {
    let s = GmcSampler::standard(TruncationScheme::smooth(8), PI).unwrap();
    let prof = covariance_profile(&s, 3000, 5);
    assert_eq!(prof[0].r, 0.0);
    assert!((prof[0].exact - s.sigma()).abs() < 1e-12);
    for b in &prof {
        let z = (b.mc.mean - b.exact) / b.mc.se;
        assert!(z.abs() < 4.5, "r={} z={z}", b.r);
    }
}

#[test]
fn covariance_profile_tracks_log_singularity() {
    // Γ_N(r) + (1/2π) log(r + 1/N) stays in a fixed band for r ≤ 1 and N.
    let mut all = Vec::new();
    for n in [16u32, 32, 64] {
        let s = GmcSampler::standard(TruncationScheme::smooth(n), PI).unwrap();
        let prof = covariance_profile(&s, 2, 1);
        for b in prof.iter().filter(|b| b.r <= 1.0) {
            all.push(b.exact + (b.r + 1.0 / n as f64).ln() / (2.0 * PI));
        }
    }
    let lo = all.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = all.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    assert!(hi - lo < 0.25, "band [{lo}, {hi}]");
}

/// `E|(K ∗ Θ)(x)|²` for the grid operator `K` with multiplier `⟨n⟩^{−α}`:
/// `Σ_d (K ⋆ K)(d) e^{β² Γ(d)}`, both factors computed as exact spectral sums.
fn second_moment_oracle(s: &GmcSampler, alpha: f64) -> f64 {
    let grid = s.grid();
    let m2 = grid.len() as f64;
    // K ⋆ K has discrete Fourier weights ⟨n⟩^{−2α}/M² per slot
    let kk = SpectralField::from_modes(grid, |n1, n2| {
        Complex::new(bracket_sq(n1, n2).powf(-alpha) * 2.0 * PI / m2, 0.0)
    })
    .to_physical();
    let scheme = s.scheme();
    let gam = SpectralField::from_modes(grid, |n1, n2| {
        let a = scheme.symbol(n1, n2);
        Complex::new(a * a / bracket_sq(n1, n2) / (2.0 * PI), 0.0)
    })
    .to_physical();
    kk.iter().zip(&gam).map(|(k, g)| k * (s.beta().powi(2) * g).exp()).sum()
}

#[test]
fn second_moment_linearisation() {
    let b2 = 0.1;
    let alpha = 0.5;
    let s = GmcSampler::standard(TruncationScheme::smooth(8), b2).unwrap();
    let scheme = s.scheme();
    let grid = s.grid();
    let mut lin = 0.0;
    for idx in 0..grid.len() {
        if grid.is_nyquist(idx) {
            continue;
        }
        let (n1, n2) = grid.mode(idx);
        let a = scheme.symbol(n1, n2);
        lin += bracket_sq(n1, n2).powf(-alpha) * a * a / bracket_sq(n1, n2);
    }
    let lin = 1.0 + b2 * lin / (4.0 * PI * PI);
    let exact = second_moment_oracle(&s, alpha);
    assert!((exact - lin).abs() < 0.02 * (lin - 1.0));
    let (e, ci) = moment_estimate(&s, alpha, 2.0, 4000, 3, Sampling::Point(5)).unwrap();
    assert!(e.within(lin, 3.0) || (e.mean - lin).abs() < 0.02 * (lin - 1.0), "{e:?} vs {lin}");
    assert!(ci.0 <= e.mean && e.mean <= ci.1);
}

#[test]
fn second_moment_matches_exact_pairing_sum() {
    let s = GmcSampler::standard(TruncationScheme::smooth(8), PI).unwrap();
    let exact = second_moment_oracle(&s, 0.5);
    let (e, _) = moment_estimate(&s, 0.5, 2.0, 4000, 8, Sampling::SpatialAverage).unwrap();
    assert!(e.within(exact, 3.0), "{e:?} vs {exact}");
}

#[test]
fn first_moment_is_one() {
    let s = GmcSampler::standard(TruncationScheme::smooth(16), PI).unwrap();
    let (e, _) = moment_estimate(&s, 0.7, 1.0, 4000, 21, Sampling::Point(17)).unwrap();
    assert!(e.within(1.0, 3.0), "{e:?}");
    assert!(moment_estimate(&s, 2.5, 2.0, 10, 1, Sampling::SpatialAverage).is_err());
}

#[test]
fn ladder_levels_match_independent_estimates() {
    let ladders = moment_ladder(TruncationKind::SmoothProjector, PI, &[4, 8], &[0.5], 2.0, 3000, 2).unwrap();
    let l = &ladders[0];
    for (k, &n) in l.ns.iter().enumerate() {
        let s = GmcSampler::standard(TruncationScheme::smooth(n), PI).unwrap();
        let exact = second_moment_oracle(&s, 0.5);
        assert!(l.estimate(k).within(exact, 3.0), "N={n}: {:?} vs {exact}", l.estimate(k));
    }
}

#[test]
fn cauchy_difference_trivial_cases() {
    let e = cauchy_decay(TruncationKind::SmoothProjector, 0.0, 0.6, 4, 20, 1, Sampling::SpatialAverage).unwrap();
    assert!(e.mean.abs() < 1e-24);
    let a = cauchy_decay(TruncationKind::SmoothProjector, PI, 0.6, 4, 1000, 1, Sampling::SpatialAverage).unwrap();
    let b = cauchy_decay(TruncationKind::SmoothProjector, PI, 0.6, 16, 1000, 1, Sampling::SpatialAverage).unwrap();
    assert!(a.mean > 0.0 && b.mean < a.mean, "{a:?} {b:?}");
}

#[test]
fn chaos_mass_properties() {
    let s = GmcSampler::standard(TruncationScheme::smooth(8), PI).unwrap();
    let grid = s.grid().clone();
    let flat = SpectralField::<f64>::zeros(&grid);
    let one = wick_exp(&flat, 0.0, 0.0, None).unwrap();
    assert!((chaos_mass(&one, (0.0, 0.0), 10.0) - 4.0 * PI * PI).abs() < 1e-10);
    let psi = s.psi(&mut RngStream::new(4, 0).rng());
    let th = wick_exp(&psi, s.beta(), s.sigma(), None).unwrap();
    let mut last = 0.0;
    for i in 1..30 {
        let m = chaos_mass(&th, (1.0, -2.0), 0.15 * i as f64);
        assert!(m >= last);
        last = m;
    }
    let masses: Vec<f64> = (0..2000)
        .map(|i| {
            let psi = s.psi(&mut RngStream::new(9, i).rng());
            wick_exp(&psi, s.beta(), s.sigma(), None).unwrap().total_mass()
        })
        .collect();
    let e = liouville_core::stats::Estimate::from_samples(&masses);
    assert!(e.within(4.0 * PI * PI, 3.0), "{e:?}");
}

#[test]
fn multifractal_first_moment_scales_like_area() {
    let s = GmcSampler::standard(TruncationScheme::smooth(32), PI).unwrap();
    let radii: Vec<f64> = (0..6).map(|i| 0.12 * 1.5f64.powi(i)).collect();
    let fit = multifractal_fit(&s, 1.0, &radii, 200, 3).unwrap();
    assert!((fit.zeta - 2.0).abs() < 0.1, "{}", fit.zeta);
    assert!(multifractal_fit(&s, 2.0, &[0.01, 0.5], 10, 1).is_err());
    assert!((theoretical_zeta(PI, 2.0) - 3.5).abs() < 1e-15);
    assert!((theoretical_zeta(0.0, 3.0) - 6.0).abs() < 1e-15);
}

#[test]
fn multifractal_second_moment_without_chaos() {
    let s = GmcSampler::standard(TruncationScheme::smooth(32), 1e-8).unwrap();
    let radii: Vec<f64> = (0..6).map(|i| 0.12 * 1.5f64.powi(i)).collect();
    let fit = multifractal_fit(&s, 2.0, &radii, 20, 3).unwrap();
    assert!((fit.zeta - 4.0).abs() < 0.1, "{}", fit.zeta);
}

#[test]
fn kahane_menu() {
    let id = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
    let y = vec![vec![1.5, 0.5], vec![0.5, 1.5]];
    let w = [0.5, 0.5];
    let same = kahane_check(&id, &id, &w, ConvexFn::Power(2.0), 20000, 1).unwrap();
    assert_eq!(same.gap.mean, 0.0);
    assert!(same.holds);
    let r = kahane_check(&id, &y, &w, ConvexFn::Power(2.0), 20000, 2).unwrap();
    assert!(r.holds && r.gap.mean > 0.0, "{r:?}");
    // E X² for sums of unit lognormals: Σ p_j p_k e^{C_jk}
    let want = |c: &Vec<Vec<f64>>| 0.25 * (c[0][0].exp() + c[1][1].exp() + 2.0 * c[0][1].exp());
    assert!(r.lhs.within(want(&id), 4.0) && r.rhs.within(want(&y), 4.0));
    let r = kahane_check(&[vec![0.5]], &[vec![1.0]], &[1.0], ConvexFn::Power(3.0), 20000, 3).unwrap();
    assert!(r.holds);
    let r = kahane_check(&id, &y, &w, ConvexFn::Hinge(1.2), 20000, 4).unwrap();
    assert!(r.holds);
}

#[test]
fn kahane_rejects_bad_covariances() {
    let bad = vec![vec![1.0, 2.0], vec![2.0, 1.0]];
    let big = vec![vec![3.0, 2.5], vec![2.5, 3.0]];
    assert!(matches!(
        kahane_check(&bad, &big, &[1.0, 1.0], ConvexFn::Power(2.0), 10, 1),
        Err(Error::NotPositiveSemidefinite)
    ));
    let id = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
    assert!(kahane_check(&big, &id, &[1.0, 1.0], ConvexFn::Power(2.0), 10, 1).is_err());
}
