use std::f64::consts::{PI, TAU};

use approx::assert_relative_eq;
use liouville_core::random::{sample_gff, RngStream};
use liouville_core::spectral::kernels::{
    bessel_kernel, radial_lattice_sum, sigma_grid, sigma_n, torus_norm, truncated_bessel_on_grid,
    wave_kernel_check,
};
use liouville_core::spectral::*;
use liouville_core::{Error, Field, Grid};
use num_complex::Complex;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex<f64> {
    Complex::new(re, im)
}

#[test]
fn grid_rejects_odd_or_tiny_sizes() {
    assert_eq!(Grid::new(3).unwrap_err(), Error::InvalidGrid(3));
    assert_eq!(Grid::new(2).unwrap_err(), Error::InvalidGrid(2));
    assert!(Grid::new(5).is_err());
}

#[test]
fn grid_of_four_points() {
    let g = Grid::new(4).unwrap();
    assert_eq!(g.len(), 16);
    let mut seen: Vec<(i64, i64)> = (0..16).map(|i| g.mode(i)).collect();
    seen.sort();
    assert_eq!(seen.first(), Some(&(-2, -2)));
    assert_eq!(seen.last(), Some(&(1, 1)));
    let nyq = (0..16).filter(|&i| g.is_nyquist(i)).count();
    assert_eq!(nyq, 7);
    for i in 0..16 {
        let (a, b) = g.mode(i);
        assert_eq!(g.is_nyquist(i), a == -2 || b == -2);
    }
}

#[test]
fn cell_area_and_constant_quadrature() {
    let g = Grid::new(64).unwrap();
    assert_relative_eq!(g.cell_area(), (TAU / 64.0).powi(2), max_relative = 1e-15);
    for m in [4, 6, 10, 64, 100] {
        let g = Grid::new(m).unwrap();
        assert_eq!(g.quadrature(&vec![1.0; m * m]), 4.0 * PI * PI);
    }
}

#[test]
fn zero_mode_is_constant_over_two_pi() {
    let g = Grid::new(8).unwrap();
    let mut coeffs = vec![c(0.0, 0.0); 64];
    coeffs[0] = c(3.0, 0.0);
    let f = Field::from_coeffs(&g, coeffs, 1e-10).unwrap();
    for v in f.to_physical() {
        assert_relative_eq!(v, 3.0 / TAU, max_relative = 1e-14);
    }
}

#[test]
fn single_mode_pair_is_twice_real_part() {
    let g = Grid::new(16).unwrap();
    let cn = c(0.7, -0.4);
    let mut f = Field::zeros(&g);
    f.set_mode(2, -3, cn);
    let vals = f.to_physical();
    for (idx, v) in vals.iter().enumerate() {
        let (x1, x2) = g.point(idx);
        let e = Complex::from_polar(1.0 / TAU, 2.0 * x1 - 3.0 * x2);
        assert!((v - 2.0 * (cn * e).re).abs() < 1e-14);
    }
}

#[test]
fn non_hermitian_input_is_rejected() {
    let g = Grid::new(8).unwrap();
    let mut coeffs = vec![c(0.0, 0.0); 64];
    coeffs[g.index(1, 0)] = c(1.0, 0.0);
    let err = Field::from_coeffs(&g, coeffs.clone(), 1e-10).unwrap_err();
    assert!(matches!(err, Error::NotHermitian { .. }));
    coeffs[g.index(-1, 0)] = c(1.0, 1e-12);
    let f = Field::from_coeffs(&g, coeffs, 1e-10).unwrap();
    assert_eq!(f.hermitian_defect(), 0.0);
}

#[test]
fn nyquist_coefficients_are_rejected_or_removed() {
    let g = Grid::new(8).unwrap();
    let mut coeffs = vec![c(0.0, 0.0); 64];
    coeffs[g.index(-4, 1)] = c(1.0, 0.0);
    assert!(Field::from_coeffs(&g, coeffs, 1e-10).is_err());
    let vals: Vec<f64> = (0..64).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
    let f = Field::from_physical(&g, &vals);
    for i in 0..64 {
        if g.is_nyquist(i) {
            assert_eq!(f.coeffs()[i], c(0.0, 0.0));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn random_field_round_trip(seed in 0u64..1000, half_m in 2usize..20) {
        let g = Grid::new(2 * half_m).unwrap();
        let mut rng = RngStream::new(seed, 0).rng();
        let f = sample_gff(&g, None, &mut rng);
        let back = Field::from_physical(&g, &f.to_physical());
        let scale = f.norm_sq().sqrt();
        let mut err = 0.0_f64;
        for (a, b) in f.coeffs().iter().zip(back.coeffs()) {
            err = err.max((a - b).norm());
        }
        prop_assert!(err <= 1e-12 * scale);
        prop_assert_eq!(f.hermitian_defect(), 0.0);
    }

    #[test]
    fn pair_transforms_match_single(seed in 0u64..1000) {
        let g = Grid::new(12).unwrap();
        let mut rng = RngStream::new(seed, 1).rng();
        let a = sample_gff(&g, None, &mut rng);
        let b = sample_gff(&g, None, &mut rng);
        let (pa, pb) = Field::to_physical_pair(&a, &b);
        let (qa, qb) = (a.to_physical(), b.to_physical());
        for i in 0..g.len() {
            prop_assert!((pa[i] - qa[i]).abs() < 1e-13);
            prop_assert!((pb[i] - qb[i]).abs() < 1e-13);
        }
        let (fa, fb) = Field::from_physical_pair(&g, &pa, &pb);
        for i in 0..g.len() {
            prop_assert!((fa.coeffs()[i] - a.coeffs()[i]).norm() < 1e-13);
            prop_assert!((fb.coeffs()[i] - b.coeffs()[i]).norm() < 1e-13);
        }
    }
}

#[test]
fn single_precision_round_trip() {
    let g = liouville_core::GridF32::new(16).unwrap();
    let mut rng = RngStream::new(3, 0).rng();
    let f = sample_gff(&g, None, &mut rng);
    let back = liouville_core::FieldF32::from_physical(&g, &f.to_physical());
    for (a, b) in f.coeffs().iter().zip(back.coeffs()) {
        assert!((a - b).norm() < 1e-5);
    }
}

#[test]
fn smooth_projector_plateau_and_support() {
    let s = TruncationScheme::smooth(16);
    for (n1, n2) in [(0, 0), (3, 4), (8, 0), (5, 6)] {
        assert_eq!(s.symbol(n1, n2), 1.0);
    }
    for (n1, n2) in [(17, 0), (12, 12), (30, 1)] {
        assert_eq!(s.symbol(n1, n2), 0.0);
    }
    for k in 0..200 {
        let v = s.radial_symbol(k as f64 * 0.1);
        assert!((0.0..=1.0).contains(&v));
    }
}

#[test]
fn every_scheme_is_one_at_zero() {
    for s in [
        TruncationScheme::smooth(4),
        TruncationScheme::mollifier(4),
        TruncationScheme::sharp(4),
    ] {
        assert!((s.symbol(0, 0) - 1.0).abs() < 1e-13);
    }
}

/// Symbol of the bump by direct 2-D quadrature of `∫ρ(y) cos(k y₁) dy`.
fn mollifier_symbol_oracle(k: f64) -> f64 {
    let n = 800;
    let h = 2.0 / n as f64;
    let (mut mass, mut acc) = (0.0, 0.0);
    for i in 0..=n {
        let y1 = -1.0 + i as f64 * h;
        for j in 0..=n {
            let y2 = -1.0 + j as f64 * h;
            let b = bump(y1 * y1 + y2 * y2);
            mass += b;
            acc += b * (k * y1).cos();
        }
    }
    acc / mass
}

#[test]
fn mollifier_symbol_matches_direct_quadrature() {
    for k in [0.0, 0.5, 1.0, 2.0, 3.7, 8.0, 16.0] {
        let oracle = mollifier_symbol_oracle(k);
        assert!(
            (mollifier_symbol(k) - oracle).abs() < 1e-9,
            "k = {k}: {} vs {oracle}",
            mollifier_symbol(k)
        );
    }
}

#[test]
fn mollifier_kernel_has_unit_mass_and_is_nonnegative() {
    let n = 4.0;
    let h = 0.002;
    let mut mass = 0.0;
    let r = 1.0 / n;
    let steps = (2.0 * r / h) as i64;
    for i in 0..=steps {
        for j in 0..=steps {
            let v = mollifier_kernel(n, -r + i as f64 * h, -r + j as f64 * h);
            assert!(v >= 0.0);
            mass += v * h * h;
        }
    }
    assert!((mass - 1.0).abs() < 1e-6, "mass {mass}");
}

#[test]
fn sigma_lower_bound_and_direct_sum() {
    for s in [TruncationScheme::sharp(1), TruncationScheme::smooth(3), TruncationScheme::mollifier(2)] {
        assert!(sigma_n(&s).value >= 1.0 / (4.0 * PI * PI));
    }
    // direct lattice sum over the square, keeping |n| ≤ 4
    let mut direct = 0.0;
    for n1 in -4i64..=4 {
        for n2 in -4i64..=4 {
            if n1 * n1 + n2 * n2 <= 16 {
                direct += 1.0 / (1.0 + (n1 * n1 + n2 * n2) as f64);
            }
        }
    }
    direct /= 4.0 * PI * PI;
    assert_relative_eq!(sigma_n(&TruncationScheme::sharp(4)).value, direct, max_relative = 1e-14);
}

#[test]
fn sigma_grid_agrees_with_lattice_when_support_fits() {
    let s = TruncationScheme::smooth(16);
    let g = Grid::new(64).unwrap();
    assert_relative_eq!(sigma_grid(&g, &s), sigma_n(&s).value, max_relative = 1e-13);
}

#[test]
fn mollifier_sigma_has_certified_tail() {
    let s = sigma_n(&TruncationScheme::mollifier(8));
    assert!(s.remainder < 1e-10);
    // brute force to a much larger radius changes nothing beyond the bound
    let scheme = TruncationScheme::mollifier(8);
    let brute = radial_lattice_sum(8 * 200, |a, b| {
        let v = scheme.symbol(a, b);
        v * v / (1.0 + (a * a + b * b) as f64)
    }) / (4.0 * PI * PI);
    assert!((brute - s.value).abs() <= s.remainder + 1e-12);
}

#[test]
fn sharp_sigma_grows_like_log() {
    for n in [128u32, 256, 512, 1024] {
        let s = sigma_n(&TruncationScheme::sharp(n)).value;
        let ratio = s / (n as f64).ln() * TAU;
        assert!((ratio - 1.0).abs() < 0.05, "N = {n}: {ratio}");
    }
}

#[test]
fn heat_symbol_properties() {
    assert_eq!(heat_symbol(0.0, 17.0).unwrap(), 1.0);
    assert_relative_eq!(heat_symbol(2.0, 1.0).unwrap(), (-1.0f64).exp(), max_relative = 1e-15);
    assert!(heat_symbol(-0.1, 1.0).is_err());
    let mut prev = 1.0;
    for k in 1..50 {
        let v = heat_symbol(0.1 * k as f64, 3.0).unwrap();
        assert!(v < prev);
        prev = v;
    }
    for (t1, t2, b) in [(0.3, 0.4, 5.0), (1.0, 0.25, 101.0)] {
        let lhs = heat_symbol(t1 + t2, b).unwrap();
        let rhs = heat_symbol(t1, b).unwrap() * heat_symbol(t2, b).unwrap();
        assert_relative_eq!(lhs, rhs, max_relative = 1e-14);
    }
}

#[test]
fn wave_symbols_at_zero_time() {
    let w = wave_symbols(0.0, 5.0);
    assert_eq!((w.d, w.s, w.d_dot), (0.0, 0.0, 1.0));
    let w0 = wave_symbols(0.7, 0.0);
    assert_relative_eq!(w0.s, 0.7, max_relative = 1e-15);
}

#[test]
fn wave_symbol_closed_forms() {
    for &(t, nsq) in &[(0.3, 2.0), (1.7, 25.0), (2.0, 0.0)] {
        let w = wave_symbols(t, nsq);
        let om = (0.75f64 + nsq).sqrt();
        assert_relative_eq!(w.d, (-t / 2.0f64).exp() * (t * om).sin() / om, max_relative = 1e-13);
        let r = nsq.sqrt();
        let s = if r == 0.0 { t } else { (t * r).sin() / r };
        assert_relative_eq!(w.diff, w.d - (-t / 2.0f64).exp() * s, epsilon = 1e-15);
    }
}

#[test]
fn damped_klein_gordon_residual() {
    let h = 1e-4;
    for &nsq in &[0.0, 1.0, 10.0, 100.0] {
        for &t in &[0.2, 0.9, 1.6] {
            let d = |s: f64| wave_symbols(s, nsq).d;
            let d2 = (d(t + h) - 2.0 * d(t) + d(t - h)) / (h * h);
            let d1 = (d(t + h) - d(t - h)) / (2.0 * h);
            let res = d2 + d1 + (1.0 + nsq) * d(t);
            assert!(res.abs() < 1e-5 * (1.0 + nsq), "residual {res}");
            // finite-difference check of the analytic derivative
            assert!((wave_symbols(t, nsq).d_dot - d1).abs() < 1e-7 * (1.0 + nsq));
        }
    }
}

#[test]
fn smoothing_symbol_scan_is_bounded() {
    let mut worst = 0.0_f64;
    for k in 0..=(256 * 256) {
        let nsq = k as f64;
        for j in 0..=200 {
            let t = 2.0 * j as f64 / 200.0;
            let w = wave_symbols(t, nsq);
            worst = worst.max((1.0 + nsq) * w.diff.abs());
        }
    }
    assert!(worst <= 3.0, "{worst}");
}

#[test]
fn sobolev_norm_examples() {
    let g = Grid::new(16).unwrap();
    let mut f = Field::zeros(&g);
    f.set_mode(2, 1, c(0.5, 0.0));
    // ‖f‖² = 2|c|² and the multiplier scales it by ⟨n⟩^s
    for s in [0.0, 1.0, -0.5] {
        let v = sobolev_norm(&f, s, 2.0).unwrap();
        let want = (2.0f64 * 0.25).sqrt() * 6.0f64.powf(0.5 * s);
        assert_relative_eq!(v, want, max_relative = 1e-12);
    }
    let cst = Field::constant(&g, -1.5);
    for (s, p) in [(0.0, 1.0), (2.0, 3.0), (-1.0, 2.0)] {
        let want = 1.5 * (4.0 * PI * PI).powf(1.0 / p);
        assert_relative_eq!(sobolev_norm(&cst, s, p).unwrap(), want, max_relative = 1e-12);
    }
    assert_relative_eq!(sobolev_norm(&cst, 0.0, f64::INFINITY).unwrap(), 1.5, max_relative = 1e-12);
    assert!(sobolev_norm(&cst, 0.0, 0.5).is_err());
}

#[test]
fn parseval_identity() {
    let g = Grid::new(32).unwrap();
    let mut rng = RngStream::new(11, 0).rng();
    let f = sample_gff(&g, None, &mut rng);
    let vals = f.to_physical();
    let sq: Vec<f64> = vals.iter().map(|v| v * v).collect();
    assert_relative_eq!(sobolev_norm(&f, 0.0, 2.0).unwrap().powi(2), g.quadrature(&sq), max_relative = 1e-10);
    assert_relative_eq!(f.norm_sq(), g.quadrature(&sq), max_relative = 1e-10);
}

/// Periodized `(1/2π) K_0(|x|)` with `K_0(r) = ∫_0^∞ e^{−r cosh u} du`.
fn green_oracle(x1: f64, x2: f64) -> f64 {
    let k0 = |r: f64| {
        let h = 0.01;
        let mut acc = 0.5 * (-r).exp();
        let mut u: f64 = h;
        loop {
            let v = (-r * u.cosh()).exp();
            acc += v;
            if v < 1e-300 || u > 50.0 {
                break;
            }
            u += h;
        }
        acc * h
    };
    let mut acc = 0.0;
    for k1 in -6i64..=6 {
        for k2 in -6i64..=6 {
            let r = ((x1 + TAU * k1 as f64).powi(2) + (x2 + TAU * k2 as f64).powi(2)).sqrt();
            acc += k0(r);
        }
    }
    acc / TAU
}

#[test]
fn green_function_matches_periodized_bessel_k0() {
    for &(x1, x2) in &[(0.1, 0.0), (0.5, -0.3), (2.0, 1.0), (PI, PI), (0.01, 0.02)] {
        let g = bessel_kernel(2.0, x1, x2).unwrap();
        let o = green_oracle(x1, x2);
        assert!((g - o).abs() < 1e-9, "({x1},{x2}): {g} vs {o}");
    }
}

#[test]
fn bessel_kernel_matches_smoothed_mode_sum() {
    // heat-regularized Fourier sums converge to the kernel as the regularization vanishes
    for &alpha in &[0.5, 1.0, 1.5] {
        let (x1, x2) = (0.9, 0.4);
        let eps = 1e-4;
        let mut acc = 0.0;
        for n1 in -400i64..=400 {
            for n2 in -400i64..=400 {
                let b = 1.0 + (n1 * n1 + n2 * n2) as f64;
                acc += b.powf(-0.5 * alpha) * (-eps * b).exp() * (n1 as f64 * x1 + n2 as f64 * x2).cos();
            }
        }
        acc /= 4.0 * PI * PI;
        let k = bessel_kernel(alpha, x1, x2).unwrap();
        assert!((k - acc).abs() < 2e-3, "alpha {alpha}: {k} vs {acc}");
    }
}

#[test]
fn bessel_kernel_errors_and_logarithmic_singularity() {
    assert_eq!(bessel_kernel(2.0, 0.0, 0.0).unwrap_err(), Error::SingularPoint);
    assert_eq!(bessel_kernel(1.0, TAU, 0.0).unwrap_err(), Error::SingularPoint);
    assert!(bessel_kernel(2.5, 1.0, 0.0).is_err());
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for k in 0..=45 {
        let r = 0.05 + 0.01 * k as f64;
        let d = bessel_kernel(2.0, r, 0.0).unwrap() + r.ln() / TAU;
        lo = lo.min(d);
        hi = hi.max(d);
    }
    assert!(hi - lo < 0.1, "band [{lo}, {hi}]");
}

/// Grid quadrature of a folded kernel picks up the lattice points `n ∈ M Z²`.
fn aliased_zero_mode(m: i64, reach: i64, f: impl Fn(f64) -> f64) -> f64 {
    let mut acc = 0.0;
    for k1 in -reach..=reach {
        for k2 in -reach..=reach {
            acc += f(((m * m * (k1 * k1 + k2 * k2)) as f64).sqrt());
        }
    }
    acc / (4.0 * PI * PI)
}

#[test]
fn truncated_kernel_total_mass() {
    let g = Grid::new(32).unwrap();
    let s = TruncationScheme::smooth(8);
    let k = truncated_bessel_on_grid(&g, 1.0, &s, &s);
    assert_relative_eq!(g.quadrature(&k), 1.0, max_relative = 1e-12);
    let q = TruncationScheme::mollifier(4);
    let k = truncated_bessel_on_grid(&g, 1.0, &q, &q);
    let want = 4.0 * PI * PI
        * aliased_zero_mode(32, 40, |r| q.radial_symbol(r).powi(2) / (1.0 + r * r).sqrt());
    assert_relative_eq!(g.quadrature(&k), want, max_relative = 1e-10);
    assert!((want - 1.0).abs() < 1e-3);
}

#[test]
fn truncated_green_band_over_n() {
    let g = Grid::new(256).unwrap();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for n in [16u32, 32, 64] {
        for s in [TruncationScheme::smooth(n), TruncationScheme::mollifier(n)] {
            let k = truncated_bessel_on_grid(&g, 2.0, &s, &s);
            for (idx, v) in k.iter().enumerate() {
                let (x1, x2) = g.point(idx);
                let d = v + (torus_norm(x1, x2) + 1.0 / n as f64).ln() / TAU;
                lo = lo.min(d);
                hi = hi.max(d);
            }
        }
    }
    assert!(hi - lo <= 1.0, "band [{lo}, {hi}]");
}

#[test]
fn mollified_wave_kernel_is_nonnegative() {
    let g = Grid::new(128).unwrap();
    let (min, vals) = wave_kernel_check(&g, 0.5, 16);
    assert!(min >= -1e-6, "min {min}");
    // the zero mode carries mass t; grid quadrature adds the aliased modes
    let q = TruncationScheme::mollifier(16);
    let want = 4.0 * PI * PI * aliased_zero_mode(128, 40, |r| q.radial_symbol(r) * sinc_t(r, 0.5));
    assert_relative_eq!(g.quadrature(&vals), want, max_relative = 1e-9);
    assert!((want - 0.5).abs() < 5e-3);
    let (min, _) = wave_kernel_check(&g, 1.0, 32);
    assert!(min >= -1e-6, "min {min}");
}
