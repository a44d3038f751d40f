use std::f64::consts::{E, PI};

use liouville_core::convolution::HeatConvStepper;
use liouville_core::gmc::wick_exp_values;
use liouville_core::heat::*;
use liouville_core::random::{sample_gff, RngStream};
use liouville_core::spectral::{SpectralField, TruncationScheme};
use liouville_core::{Error, Field, Grid};
use num_complex::Complex;

fn config(n: u32, m: usize, dt: f64, horizon: f64, nl: Nonlinearity) -> HeatRunConfig {
    HeatRunConfig {
        beta: PI.sqrt(),
        lambda: 1.0,
        scheme: TruncationScheme::smooth(n),
        m,
        dt,
        horizon,
        nonlinearity: nl,
        projected_noise: false,
    }
}

/// Smooth initial datum built from a handful of low modes.
fn bumpy(grid: &Grid, amp: f64) -> Field {
    SpectralField::from_modes(grid, |n1, n2| {
        let r2 = (n1 * n1 + n2 * n2) as f64;
        if r2 <= 4.0 {
            Complex::new(amp / (1.0 + r2), 0.3 * amp * (n1 - n2) as f64 / (1.0 + r2))
        } else {
            Complex::new(0.0, 0.0)
        }
    })
}

fn frozen_theta(grid: &Grid, n: u32, seed: u64) -> Vec<f64> {
    let scheme = TruncationScheme::smooth(n);
    let psi: Field = sample_gff(grid, Some(&scheme), &mut RngStream::new(seed, 0).rng());
    let sigma = liouville_core::spectral::kernels::sigma_grid(grid, &scheme);
    wick_exp_values(&psi.to_physical(), PI.sqrt(), sigma)
}

#[test]
fn bounded_f_shape() {
    let [c3, c4, c5] = bounded_f_coeffs();
    // F' = (1 − x)²(1 + 3x + c x²)
    let c = 5.0 * c5;
    assert!((3.0 * c3 - (c - 5.0)).abs() < 1e-12);
    assert!((4.0 * c4 - (3.0 - 2.0 * c)).abs() < 1e-12);
    assert!(c > 0.0);
    for i in 0..=200 {
        let x = -5.0 + i as f64 * 0.05;
        if x <= 0.0 {
            assert_eq!(bounded_f(x), x.exp());
        }
        assert!(bounded_f(x + 0.05) >= bounded_f(x));
        assert!(bounded_f(x) <= E + 1e-15);
    }
    assert!((bounded_f(1.0 - 1e-12) - E).abs() < 1e-10);
    let d = |x: f64, h: f64| (bounded_f(x + h) - bounded_f(x - h)) / (2.0 * h);
    let d2 = |x: f64, h: f64| (bounded_f(x + h) - 2.0 * bounded_f(x) + bounded_f(x - h)) / (h * h);
    assert!((d(0.0, 1e-5) - 1.0).abs() < 1e-8);
    assert!((d2(0.0, 1e-5) - 1.0).abs() < 1e-3);
    assert!(d(1.0, 1e-5).abs() < 1e-8);
    assert!(d2(1.0, 1e-5).abs() < 1e-3);
}

#[test]
fn config_validation() {
    let mut c = config(8, 32, 0.1, 1.0, Nonlinearity::BoundedF);
    assert!(c.validate().is_ok());
    c.lambda = -1.0;
    assert!(c.validate().is_err());
    c.nonlinearity = Nonlinearity::RawExp;
    assert!(c.validate().is_ok());
    c.beta = 0.0;
    assert!(c.validate().is_err());
    let mut c = config(8, 31, 0.1, 1.0, Nonlinearity::RawExp);
    assert!(matches!(c.validate(), Err(Error::InvalidGrid(31))));
    c.m = 32;
    c.dt = 0.0;
    assert!(HeatModel::<f64>::new(c).is_err());
}

#[test]
fn zero_coupling_is_the_linear_flow() {
    let mut c = config(8, 32, 0.05, 1.0, Nonlinearity::RawExp);
    c.lambda = 0.0;
    let model = HeatModel::<f64>::new(c).unwrap();
    let grid = model.grid().clone();
    let u0 = bumpy(&grid, 1.0);
    let mut st = HeatState::new(u0.clone());
    let lin = HeatConvStepper::new(&grid, None, 0.05).unwrap();
    let mut u = u0;
    for k in 0..10 {
        snlh_full_step(&model, &mut st, &mut RngStream::new(3, 0).rng_at(k)).unwrap();
        lin.step(&mut u, &mut RngStream::new(3, 0).rng_at(k));
    }
    assert_eq!(st.u.coeffs(), u.coeffs());
    assert!((st.t - 0.5).abs() < 1e-12);
}

#[test]
fn drift_at_rest_scales_with_renormalisation_constant() {
    // at u = 0 the drift is ½λβ C_N times the constant 1, whose zero mode is 2π
    let mut drifts = Vec::new();
    for n in [8u32, 32] {
        let model = HeatModel::<f64>::new(config(n, 4 * n as usize, 0.1, 1.0, Nonlinearity::RawExp)).unwrap();
        let d = model.full_drift(&SpectralField::zeros(model.grid()), 0, 0.0).unwrap();
        let want = 0.5 * PI.sqrt() * model.c_n() * 2.0 * PI;
        assert!((d.zero_mode() - want).abs() < 1e-12);
        assert!(d.norm_sq().sqrt() - want < 1e-12);
        drifts.push((d.zero_mode(), model.sigma()));
    }
    let ratio = drifts[1].0 / drifts[0].0;
    assert!((ratio - (-0.5 * PI * (drifts[1].1 - drifts[0].1)).exp()).abs() < 1e-12);
    assert!(ratio < 0.75);
}

#[test]
fn focusing_overflow_aborts() {
    let mut c = config(8, 32, 0.5, 50.0, Nonlinearity::RawExp);
    c.lambda = -50.0;
    let model = HeatModel::<f64>::new(c).unwrap();
    let u0 = SpectralField::constant(model.grid(), 5.0);
    let r = run_heat(&model, HeatSolver::Full, &u0, RngStream::new(1, 0), 1);
    assert!(matches!(r, Err(Error::NumericAbort { .. })), "{:?}", r.map(|r| r.times.len()));
}

#[test]
fn residual_vanishes_without_chaos() {
    let model = HeatModel::<f64>::new(config(8, 32, 0.1, 1.0, Nonlinearity::BoundedF)).unwrap();
    let grid = model.grid().clone();
    let mut st = DpdState::new(SpectralField::zeros(&grid), bumpy(&grid, 2.0));
    let zero = vec![0.0; grid.len()];
    for _ in 0..10 {
        dpd_v_step(&model, &mut st, &zero).unwrap();
    }
    assert_eq!(st.v.norm_sq(), 0.0);
    // z follows the deterministic heat semigroup
    let z0 = bumpy(&grid, 2.0);
    let c = z0.coeff(1, 0) * (-0.5f64 * 2.0).exp();
    assert!((st.z.coeff(1, 0) - c).norm() < 1e-12);
}

#[test]
fn bounded_residual_stays_nonpositive() {
    for scheme in [TruncationScheme::smooth(16), TruncationScheme::mollifier(16)] {
        let mut c = config(16, 64, 1.0 / 16.0, 1.0, Nonlinearity::BoundedF);
        c.scheme = scheme;
        let model = HeatModel::<f64>::new(c).unwrap();
        let z0 = bumpy(model.grid(), 1.5);
        let run = run_heat(&model, HeatSolver::Residual, &z0, RngStream::new(7, 0), 1).unwrap();
        assert_eq!(run.times.len(), 17);
        assert!(run.sign_violations.iter().all(|&k| k == 0), "{scheme:?}: {:?}", run.max_beta_v);
        assert!(run.max_beta_v.iter().skip(1).all(|&m| m < 0.0));
    }
}

#[test]
fn raw_and_bounded_agree_while_nonpositive() {
    let a = HeatModel::<f64>::new(config(16, 64, 1.0 / 16.0, 1.0, Nonlinearity::BoundedF)).unwrap();
    let b = HeatModel::<f64>::new(config(16, 64, 1.0 / 16.0, 1.0, Nonlinearity::RawExp)).unwrap();
    let z0 = bumpy(a.grid(), 1.0);
    let ra = run_heat(&a, HeatSolver::Residual, &z0, RngStream::new(2, 0), 1).unwrap();
    let rb = run_heat(&b, HeatSolver::Residual, &z0, RngStream::new(2, 0), 1).unwrap();
    assert!(ra.max_beta_v.iter().all(|&m| m <= 1e-12));
    for (x, y) in ra.path.iter().zip(&rb.path) {
        let mut d = x.clone();
        d.axpy(-1.0, y);
        assert!(d.norm_sq().sqrt() < 1e-9);
    }
}

fn frozen_run(dt: f64, theta: &[f64], steps_to: f64) -> Field {
    let model = HeatModel::<f64>::new(config(8, 32, dt, steps_to, Nonlinearity::BoundedF)).unwrap();
    let grid = model.grid().clone();
    let mut st = DpdState::new(SpectralField::zeros(&grid), bumpy(&grid, 1.0));
    for _ in 0..model.config.steps() {
        dpd_v_step(&model, &mut st, theta).unwrap();
    }
    st.v
}

#[test]
fn residual_converges_at_first_order() {
    let grid = Grid::new(32).unwrap();
    let theta = frozen_theta(&grid, 8, 5);
    let reference = frozen_run(1.0 / 2048.0, &theta, 1.0);
    let dts = [1.0 / 8.0, 1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0];
    let errs: Vec<f64> = dts
        .iter()
        .map(|&dt| {
            let mut d = frozen_run(dt, &theta, 1.0);
            d.axpy(-1.0, &reference);
            d.norm_sq().sqrt()
        })
        .collect();
    let x: Vec<f64> = dts.iter().map(|d| d.ln()).collect();
    let y: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
    let (slope, _, _) = liouville_core::stats::linear_fit(&x, &y);
    assert!((0.8..=1.2).contains(&slope), "slope {slope}, errors {errs:?}");
}

#[test]
fn difference_energy_is_nonincreasing() {
    let dt = 1.0 / 128.0;
    let model = HeatModel::<f64>::new(config(8, 32, dt, 1.0, Nonlinearity::BoundedF)).unwrap();
    let grid = model.grid().clone();
    let theta = frozen_theta(&grid, 8, 9);
    let path = |v0: Field| {
        let mut st = DpdState::new(v0, SpectralField::zeros(&grid));
        let mut out = vec![st.v.clone()];
        for _ in 0..128 {
            dpd_v_step(&model, &mut st, &theta).unwrap();
            out.push(st.v.clone());
        }
        out
    };
    let mut base = bumpy(&grid, -1.0);
    base.set_mode(0, 0, Complex::new(-3.0, 0.0));
    let mut pert = base.clone();
    pert.axpy(0.2, &bumpy(&grid, 1.0));
    let a = path(base.clone());
    let b = path(pert);
    let e = difference_energy(&a, &b, dt);
    assert!(e[0] > 0.0);
    for k in 1..e.len() {
        assert!(e[k] <= e[k - 1] + 1e-6 * e[0] + 1e-10, "step {k}: {} > {}", e[k], e[k - 1]);
    }
    let same = difference_energy(&a, &a, dt);
    assert!(same.iter().all(|&x| x == 0.0));
}

#[test]
fn energy_norms_stable_under_refinement() {
    let grid = Grid::new(32).unwrap();
    let theta = frozen_theta(&grid, 8, 5);
    let norms = |dt: f64| {
        let model = HeatModel::<f64>::new(config(8, 32, dt, 1.0, Nonlinearity::BoundedF)).unwrap();
        let mut st = DpdState::new(SpectralField::zeros(&grid), bumpy(&grid, 1.0));
        let mut path = vec![st.v.clone()];
        let mut times = vec![0.0];
        for _ in 0..model.config.steps() {
            dpd_v_step(&model, &mut st, &theta).unwrap();
            path.push(st.v.clone());
            times.push(st.t);
        }
        energy_diagnostics(&path, &times)
    };
    let a = norms(1.0 / 64.0);
    let b = norms(1.0 / 128.0);
    assert!(a.sup_l2.is_finite() && a.h1_integral > 0.0);
    assert!((a.sup_l2 - b.sup_l2).abs() < 0.02 * b.sup_l2);
    assert!((a.h1_integral - b.h1_integral).abs() < 0.05 * b.h1_integral);
}

#[test]
fn single_precision_matches_double() {
    let c = config(8, 32, 0.05, 0.5, Nonlinearity::BoundedF);
    let m64 = HeatModel::<f64>::new(c.clone()).unwrap();
    let m32 = HeatModel::<f32>::new(c).unwrap();
    let z64 = bumpy(m64.grid(), 1.0);
    let z32 = SpectralField::<f32>::from_physical(m32.grid(), &z64.to_physical().iter().map(|&v| v as f32).collect::<Vec<_>>());
    let r64 = run_heat(&m64, HeatSolver::Residual, &z64, RngStream::new(4, 0), 10).unwrap();
    let r32 = run_heat(&m32, HeatSolver::Residual, &z32, RngStream::new(4, 0), 10).unwrap();
    for (a, b) in r64.path.iter().zip(&r32.path) {
        let pa = a.to_physical();
        let pb = b.to_physical();
        let err = pa.iter().zip(&pb).map(|(x, &y)| (x - y as f64).abs()).fold(0.0, f64::max);
        assert!(err < 1e-4, "{err}");
    }
}
