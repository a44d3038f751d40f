//! Truncated stochastic damped nonlinear wave flow and its decomposition
//! `v = X + Y` into a sign-definite rough part and a smoother remainder.

mod params;

pub use params::{beta_sq_wave_over_pi, wave_parameters, Constraint, Relation, WaveParameters};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::convolution::{DampedStepper, WaveConvState};
use crate::gmc::wick_exp_values;
use crate::heat::{bounded_f, sign_check};
use crate::random::RngStream;
use crate::spectral::kernels::sigma_grid;
use crate::spectral::{bracket_sq, SpectralField, TorusGrid, TruncationScheme};
use crate::{Error, Result, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WaveSolver {
    Full,
    XySystem,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WaveRunConfig {
    pub beta: f64,
    pub lambda: f64,
    pub scheme: TruncationScheme,
    pub m: usize,
    pub dt: f64,
    pub horizon: f64,
    pub solver: WaveSolver,
    /// Drive the full equation by truncated instead of full white noise.
    #[serde(default)]
    pub projected_noise: bool,
}

impl WaveRunConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |s: String| Err(Error::InvalidArgument(s));
        if self.beta == 0.0 || !self.beta.is_finite() {
            return bad(format!("β = {} must be finite and nonzero", self.beta));
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return bad(format!("λ = {} must be positive for the wave flow", self.lambda));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad(format!("dt = {} must be positive", self.dt));
        }
        if !(self.horizon >= 0.0) {
            return bad(format!("horizon {} must be nonnegative", self.horizon));
        }
        if self.m < 4 || self.m % 2 != 0 {
            return Err(Error::InvalidGrid(self.m));
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        (self.horizon / self.dt).round() as usize
    }
}

#[derive(Clone, Debug)]
pub struct WaveModel<T: Scalar = f64> {
    pub config: WaveRunConfig,
    grid: TorusGrid<T>,
    linear: DampedStepper<T>,
    conv: DampedStepper<T>,
    /// `e^{−t/2} S(t)`: stiffness `1/4 + |n|²`, no noise.
    x_flow: DampedStepper<T>,
    /// `D(t)`: stiffness `⟨n⟩²`, no noise.
    v_flow: DampedStepper<T>,
    q: Vec<T>,
    sigma: f64,
}

impl<T: Scalar> WaveModel<T> {
    pub fn new(config: WaveRunConfig) -> Result<Self> {
        config.validate()?;
        let grid = TorusGrid::new(config.m)?;
        let noise_scheme = config.projected_noise.then_some(&config.scheme);
        let linear = DampedStepper::wave(&grid, noise_scheme, config.dt)?;
        let conv = DampedStepper::wave(&grid, Some(&config.scheme), config.dt)?;
        let x_flow = DampedStepper::deterministic(&grid, config.dt, |n1, n2| 0.25 + (n1 * n1 + n2 * n2) as f64)?;
        let v_flow = DampedStepper::deterministic(&grid, config.dt, bracket_sq)?;
        let q = grid.multiplier(|n1, n2| config.scheme.symbol(n1, n2));
        let sigma = sigma_grid(&grid, &config.scheme);
        Ok(WaveModel {
            config,
            grid,
            linear,
            conv,
            x_flow,
            v_flow,
            q,
            sigma,
        })
    }

    pub fn grid(&self) -> &TorusGrid<T> {
        &self.grid
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn c_n(&self) -> f64 {
        (-0.5 * self.config.beta.powi(2) * self.sigma).exp()
    }

    pub fn truncation(&self) -> &[T] {
        &self.q
    }

    pub fn linear_stepper(&self) -> &DampedStepper<T> {
        &self.linear
    }

    pub fn conv_stepper(&self) -> &DampedStepper<T> {
        &self.conv
    }

    /// `λβ C_N Q e^{βQu}`.
    pub fn full_kick(&self, u: &SpectralField<T>, step: usize, t: f64) -> Result<SpectralField<T>> {
        let b = self.config.beta;
        let qu = u.with_multiplier(&self.q).to_physical();
        let e: Vec<T> = qu.iter().map(|&v| T::lit((b * v.as_f64()).exp())).collect();
        if e.iter().any(|v| !v.is_finite()) {
            return Err(Error::NumericAbort {
                step,
                t,
                what: "e^{βQu} overflowed".into(),
            });
        }
        let mut f = SpectralField::from_physical(&self.grid, &e);
        f.apply_multiplier(&self.q);
        f.scale(T::lit(self.config.lambda * b * self.c_n()));
        Ok(f)
    }
}

#[derive(Clone, Debug)]
pub struct WaveState<T: Scalar = f64> {
    pub t: f64,
    pub step: usize,
    pub u: SpectralField<T>,
    pub u_dot: SpectralField<T>,
}

impl<T: Scalar> WaveState<T> {
    pub fn new(u: SpectralField<T>, u_dot: SpectralField<T>) -> Self {
        WaveState { t: 0.0, step: 0, u, u_dot }
    }
}

/// Exact linear step with the given transition noise, then the velocity
/// kick `u̇ ← u̇ − dt · λβC_N Q e^{βQu}`.
pub fn sdnlw_step_with_noise<T: Scalar>(
    model: &WaveModel<T>,
    state: &mut WaveState<T>,
    noise: (&SpectralField<T>, &SpectralField<T>),
) -> Result<()> {
    model.linear.propagate(&mut state.u, &mut state.u_dot);
    state.u.axpy(T::one(), noise.0);
    state.u_dot.axpy(T::one(), noise.1);
    let kick = model.full_kick(&state.u, state.step, state.t)?;
    state.u_dot.axpy(T::lit(-model.config.dt), &kick);
    state.t += model.config.dt;
    state.step += 1;
    Ok(())
}

pub fn sdnlw_full_step<T: Scalar, R: Rng + ?Sized>(
    model: &WaveModel<T>,
    state: &mut WaveState<T>,
    rng: &mut R,
) -> Result<()> {
    let (a, b) = model.linear.sample_noise(rng);
    sdnlw_step_with_noise(model, state, (&a, &b))
}

/// `(X, Ẋ, Y, Ẏ)` together with the linear evolution `(z, ż)` of the data.
#[derive(Clone, Debug)]
pub struct WaveXYState<T: Scalar = f64> {
    pub t: f64,
    pub step: usize,
    pub x: SpectralField<T>,
    pub x_dot: SpectralField<T>,
    pub y: SpectralField<T>,
    pub y_dot: SpectralField<T>,
    pub z: SpectralField<T>,
    pub z_dot: SpectralField<T>,
}

impl<T: Scalar> WaveXYState<T> {
    pub fn new(z: SpectralField<T>, z_dot: SpectralField<T>) -> Self {
        let zero = SpectralField::zeros(z.grid());
        WaveXYState {
            t: 0.0,
            step: 0,
            x: zero.clone(),
            x_dot: zero.clone(),
            y: zero.clone(),
            y_dot: zero,
            z,
            z_dot,
        }
    }
}

/// `Q(e^{βQz} F(βQX) e^{βQY} Θ)`.
pub fn xy_source<T: Scalar>(model: &WaveModel<T>, state: &WaveXYState<T>, theta: &[T]) -> Result<SpectralField<T>> {
    let b = model.config.beta;
    let (qx, qy) = SpectralField::to_physical_pair(&state.x.with_multiplier(&model.q), &state.y.with_multiplier(&model.q));
    let qz = state.z.with_multiplier(&model.q).to_physical();
    let mut src = Vec::with_capacity(qx.len());
    for i in 0..qx.len() {
        let s = (b * (qz[i].as_f64() + qy[i].as_f64())).exp() * bounded_f(b * qx[i].as_f64()) * theta[i].as_f64();
        if !s.is_finite() {
            return Err(Error::NumericAbort {
                step: state.step,
                t: state.t,
                what: "e^{βY} overflowed in the X+Y source".into(),
            });
        }
        src.push(T::lit(s));
    }
    let mut f = SpectralField::from_physical(&model.grid, &src);
    f.apply_multiplier(&model.q);
    Ok(f)
}

/// One left-endpoint step of the X+Y system: the source kicks the velocity
/// of `X` (kernel `e^{−t/2}S`) and of `V = X + Y` (kernel `D`), both are
/// propagated exactly and `Y = V − X`.
pub fn xy_step<T: Scalar>(model: &WaveModel<T>, state: &mut WaveXYState<T>, theta: &[T]) -> Result<()> {
    let src = xy_source(model, state, theta)?;
    let kick = T::lit(-model.config.dt * model.config.lambda * model.config.beta);
    let mut v = state.x.clone();
    v.axpy(T::one(), &state.y);
    let mut v_dot = state.x_dot.clone();
    v_dot.axpy(T::one(), &state.y_dot);
    v_dot.axpy(kick, &src);
    state.x_dot.axpy(kick, &src);
    model.x_flow.propagate(&mut state.x, &mut state.x_dot);
    model.v_flow.propagate(&mut v, &mut v_dot);
    v.axpy(-T::one(), &state.x);
    v_dot.axpy(-T::one(), &state.x_dot);
    state.y = v;
    state.y_dot = v_dot;
    model.v_flow.propagate(&mut state.z, &mut state.z_dot);
    state.t += model.config.dt;
    state.step += 1;
    Ok(())
}

#[derive(Clone, Debug)]
pub struct WaveRun<T: Scalar = f64> {
    pub times: Vec<f64>,
    /// `u` for full runs, `X` for X+Y runs.
    pub path: Vec<SpectralField<T>>,
    /// `Y` for X+Y runs; empty otherwise.
    pub path_y: Vec<SpectralField<T>>,
    /// Largest grid value of `βQX` per record (X+Y runs).
    pub max_beta_qx: Vec<f64>,
    pub sign_violations: Vec<usize>,
}

/// Runs to the horizon. Full runs start from `(init.0, init.1)`; X+Y runs
/// take them as the data of `z` and draw `Θ` from a stationary wave
/// convolution advanced with the same stream.
pub fn run_wave<T: Scalar>(
    model: &WaveModel<T>,
    init: (&SpectralField<T>, &SpectralField<T>),
    stream: RngStream,
    record_every: usize,
) -> Result<WaveRun<T>> {
    let steps = model.config.steps();
    let every = record_every.max(1);
    let beta = model.config.beta;
    let mut run = WaveRun {
        times: Vec::new(),
        path: Vec::new(),
        path_y: Vec::new(),
        max_beta_qx: Vec::new(),
        sign_violations: Vec::new(),
    };
    match model.config.solver {
        WaveSolver::Full => {
            let mut st = WaveState::new(init.0.clone(), init.1.clone());
            run.times.push(0.0);
            run.path.push(st.u.clone());
            for k in 0..steps {
                sdnlw_full_step(model, &mut st, &mut stream.rng_at(k as u64))?;
                if (k + 1) % every == 0 {
                    run.times.push(st.t);
                    run.path.push(st.u.clone());
                }
            }
        }
        WaveSolver::XySystem => {
            let mut conv = WaveConvState::stationary(&model.grid, Some(model.config.scheme), &mut stream.fork(1).rng());
            let mut st = WaveXYState::new(init.0.clone(), init.1.clone());
            let record = |st: &WaveXYState<T>, run: &mut WaveRun<T>| {
                let (max, count) = sign_check(&st.x.with_multiplier(&model.q), beta, 1e-8);
                run.times.push(st.t);
                run.path.push(st.x.clone());
                run.path_y.push(st.y.clone());
                run.max_beta_qx.push(max);
                run.sign_violations.push(count);
            };
            record(&st, &mut run);
            for k in 0..steps {
                let theta = wick_exp_values(&conv.psi.to_physical(), beta, model.sigma);
                xy_step(model, &mut st, &theta)?;
                conv.step(&model.conv, &mut stream.rng_at(k as u64));
                if (k + 1) % every == 0 {
                    record(&st, &mut run);
                }
            }
        }
    }
    Ok(run)
}
