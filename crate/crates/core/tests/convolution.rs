use liouville_core::convolution::*;
use liouville_core::random::{sample_unit_noise, RngStream};
use liouville_core::spectral::*;
use liouville_core::stats::Estimate;
use liouville_core::{Field, Grid};
use num_complex::Complex;

#[test]
fn heat_step_preserves_stationary_variance() {
    let g = Grid::new(16).unwrap();
    let scheme = TruncationScheme::smooth(5);
    for dt in [1e-3, 0.1, 2.0] {
        let st = HeatConvStepper::new(&g, Some(&scheme), dt).unwrap();
        for idx in 0..g.len() {
            if g.is_nyquist(idx) {
                continue;
            }
            let (n1, n2) = g.mode(idx);
            let b = bracket_sq(n1, n2);
            let v = scheme.symbol(n1, n2).powi(2) / b;
            let pushed = st.decay()[idx].powi(2) * v + st.noise_amplitudes()[idx].powi(2);
            assert!((pushed - v).abs() <= 1e-15 + 1e-12 * v);
        }
    }
}

#[test]
fn heat_long_step_reaches_stationary_variance() {
    let g = Grid::new(8).unwrap();
    let st = HeatConvStepper::new(&g, None, 200.0).unwrap();
    for idx in 0..g.len() {
        if g.is_nyquist(idx) {
            continue;
        }
        let (n1, n2) = g.mode(idx);
        assert!((st.noise_amplitudes()[idx].powi(2) - 1.0 / bracket_sq(n1, n2)).abs() < 1e-14);
    }
    assert!(HeatConvStepper::new(&g, None, 0.0).is_err());
}

#[test]
fn heat_step_matches_fine_euler_maruyama() {
    // five modes of an M = 4 grid, one exact step of size dt against 1000 EM substeps
    let g = Grid::new(4).unwrap();
    let dt = 0.05;
    let fine = 1000;
    let h = dt / fine as f64;
    let st = HeatConvStepper::new(&g, None, dt).unwrap();
    let mut sq_err = 0.0;
    let mut count = 0.0;
    for path in 0..50u64 {
        let mut rng = RngStream::new(7, path).rng();
        let x0 = liouville_core::random::sample_gff(&g, None, &mut rng);
        let mut em = x0.clone();
        let mut exact_noise = Field::zeros(&g);
        for k in 0..fine {
            let db = sample_unit_noise(&g, &mut rng);
            let t_left = k as f64 * h;
            let mut drift = em.clone();
            drift.apply_multiplier(&g.multiplier(|a, b| -0.5 * bracket_sq(a, b) * h));
            em.axpy(1.0, &drift);
            em.axpy(h.sqrt(), &db);
            // ∫ e^{−a(dt−s)} dB(s) with the same increments
            let w = g.multiplier(|a, b| (-0.5 * bracket_sq(a, b) * (dt - t_left)).exp() * h.sqrt());
            exact_noise.axpy(1.0, &db.with_multiplier(&w));
        }
        let mut ex = x0.clone();
        st.propagate(&mut ex);
        ex.axpy(1.0, &exact_noise);
        for (n1, n2) in [(0, 0), (1, 0), (0, 1), (1, 1), (-1, 1)] {
            sq_err += (ex.coeff(n1, n2) - em.coeff(n1, n2)).norm_sqr();
            count += 1.0;
        }
    }
    let rms = (sq_err / count).sqrt();
    assert!(rms <= 1e-3, "rms {rms}");
}

#[test]
fn wave_stationary_covariance_is_invariant() {
    let g = Grid::new(16).unwrap();
    let scheme = TruncationScheme::mollifier(4);
    for dt in [1e-3, 0.05, 0.7] {
        let st = DampedStepper::wave(&g, Some(&scheme), dt).unwrap();
        for idx in 0..g.len() {
            if g.is_nyquist(idx) {
                continue;
            }
            let (n1, n2) = g.mode(idx);
            let s2 = scheme.symbol(n1, n2).powi(2);
            let sigma = st.stationary_covariance(idx);
            assert!((sigma[0][0] - s2 / bracket_sq(n1, n2)).abs() < 1e-15);
            assert!((sigma[1][1] - s2).abs() < 1e-15);
            let mut s = sigma;
            for _ in 0..20 {
                s = st.push_covariance(idx, s);
            }
            for i in 0..2 {
                for j in 0..2 {
                    assert!((s[i][j] - sigma[i][j]).abs() <= 1e-10 * (1.0 + sigma[i][j].abs()));
                }
            }
        }
    }
}

/// `σ² ∫_0^h (w², w ẇ, ẇ²)` by composite Simpson with many nodes.
fn noise_covariance_oracle(k: f64, h: f64, s2: f64) -> [[f64; 2]; 2] {
    let n = 20_000;
    let dx = h / n as f64;
    let (mut a, mut b, mut c) = (0.0, 0.0, 0.0);
    for i in 0..=n {
        let s = i as f64 * dx;
        let wgt = if i == 0 || i == n {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        let om = (k - 0.25f64).sqrt();
        let w = (-s / 2.0).exp() * (om * s).sin() / om;
        let wd = (-s / 2.0).exp() * ((om * s).cos() - (om * s).sin() / (2.0 * om));
        a += wgt * w * w;
        b += wgt * w * wd;
        c += wgt * wd * wd;
    }
    let f = s2 * dx / 3.0;
    [[f * a, f * b], [f * b, f * c]]
}

#[test]
fn wave_noise_covariance_matches_quadrature() {
    for &(k, h) in &[(1.0, 0.01), (1.0, 0.5), (2.0, 1.3), (50.0, 0.2), (1000.0, 0.05), (0.3, 0.002)] {
        let exact = damped_noise_covariance(k, h, 2.0);
        let oracle = noise_covariance_oracle(k, h, 2.0);
        for i in 0..2 {
            for j in 0..2 {
                let err = (exact[i][j] - oracle[i][j]).abs();
                assert!(err <= 1e-9 * (1.0 + oracle[i][j].abs()), "k={k} h={h}: {exact:?} vs {oracle:?}");
            }
        }
    }
}

#[test]
fn zero_noise_oscillator_solution() {
    let g = Grid::new(8).unwrap();
    let dt = 0.37;
    let st = DampedStepper::wave(&g, None, dt).unwrap();
    for (n1, n2) in [(0, 0), (2, 1), (3, -3)] {
        let mut x = Field::zeros(&g);
        let mut v = Field::zeros(&g);
        x.set_mode(n1, n2, Complex::new(1.0, 0.0));
        st.propagate(&mut x, &mut v);
        let om = (0.75 + (n1 * n1 + n2 * n2) as f64).sqrt();
        let want = (-dt / 2.0f64).exp() * ((dt * om).cos() + (dt * om).sin() / (2.0 * om));
        assert!((x.coeff(n1, n2).re - want).abs() < 1e-14);
    }
}

#[test]
fn undamped_kernel_flow_at_zero_mode_is_critically_damped() {
    // k = 1/4 at n = 0: impulse response t e^{−t/2}
    let g = Grid::new(4).unwrap();
    let dt = 0.8;
    let st = DampedStepper::deterministic(&g, dt, |a, b| 0.25 + (a * a + b * b) as f64).unwrap();
    let mut x = Field::zeros(&g);
    let mut v = Field::zeros(&g);
    v.set_mode(0, 0, Complex::new(1.0, 0.0));
    st.propagate(&mut x, &mut v);
    assert!((x.coeff(0, 0).re - dt * (-dt / 2.0f64).exp()).abs() < 1e-14);
}

#[test]
fn wave_monte_carlo_marginals() {
    let g = Grid::new(8).unwrap();
    let st = DampedStepper::wave(&g, None, 0.3).unwrap();
    let idx = g.index(1, 2);
    let mut xs = Vec::new();
    let mut vs = Vec::new();
    for r in 0..4000u64 {
        let mut rng = RngStream::new(5, r).rng();
        let mut s = WaveConvState::stationary(&g, None, &mut rng);
        for _ in 0..3 {
            s.step(&st, &mut rng);
        }
        xs.push(s.psi.coeffs()[idx].norm_sqr());
        vs.push(s.psi_dot.coeffs()[idx].norm_sqr());
    }
    let ex = Estimate::from_samples(&xs);
    let ev = Estimate::from_samples(&vs);
    assert!(ex.within(1.0 / 6.0, 4.0), "{ex:?}");
    assert!(ev.within(1.0, 4.0), "{ev:?}");
}

#[test]
fn convergence_statistic() {
    assert_eq!(conv_convergence_stat(8, 8, 0.25, 20, 1).unwrap().mean, 0.0);
    let est: Vec<f64> = [8u32, 16, 32]
        .iter()
        .map(|&n| conv_convergence_stat(n, 2 * n, 0.25, 300, 2).unwrap().mean)
        .collect();
    assert!(est[0] > est[1] && est[1] > est[2], "{est:?}");
    let div: Vec<f64> = [8u32, 16, 32]
        .iter()
        .map(|&n| conv_convergence_stat(n, 2 * n, 0.0, 300, 3).unwrap().mean)
        .collect();
    assert!(div[0] < div[1] && div[1] < div[2], "{div:?}");
}
