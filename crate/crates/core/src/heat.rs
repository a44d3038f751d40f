//! Truncated stochastic nonlinear heat flow: the full equation by Lie
//! splitting, and the residual `v = u − z − Ψ` by exponential Euler.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::convolution::{HeatConvState, HeatConvStepper};
use crate::gmc::wick_exp_values;
use crate::random::RngStream;
use crate::spectral::kernels::sigma_grid;
use crate::spectral::{bracket_sq, SpectralField, TorusGrid, TruncationScheme};
use crate::{Error, Result, Scalar};

/// Coefficients `(c3, c4, c5)` of the cap polynomial
/// `1 + x + x²/2 + c3 x³ + c4 x⁴ + c5 x⁵` on `[0, 1]`.
///
/// They match `e^x` to second order at 0 and the constant `e` to second
/// order at 1. Then `F'(x) = (1 − x)²(1 + 3x + c x²)` with `c > 0`, so the
/// cap is C², nondecreasing and Lipschitz.
pub fn bounded_f_coeffs() -> [f64; 3] {
    let e = std::f64::consts::E - 2.5;
    [7.5 + 10.0 * e, -13.0 - 15.0 * e, 0.5 * (11.0 + 12.0 * e)]
}

/// `F(x) = e^x` for `x ≤ 0`, smooth monotone cap on `(0, 1)`, `e` beyond.
pub fn bounded_f(x: f64) -> f64 {
    if x <= 0.0 {
        x.exp()
    } else if x >= 1.0 {
        std::f64::consts::E
    } else {
        let [c3, c4, c5] = bounded_f_coeffs();
        1.0 + x * (1.0 + x * (0.5 + x * (c3 + x * (c4 + x * c5))))
    }
}

/// How `e^{βv}` enters the residual equation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Nonlinearity {
    RawExp,
    BoundedF,
}

impl Nonlinearity {
    #[inline]
    pub fn eval(self, x: f64) -> f64 {
        match self {
            Nonlinearity::RawExp => x.exp(),
            Nonlinearity::BoundedF => bounded_f(x),
        }
    }
}

impl std::str::FromStr for Nonlinearity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "raw_exp" | "raw" => Ok(Nonlinearity::RawExp),
            "bounded_f" | "bounded" => Ok(Nonlinearity::BoundedF),
            _ => Err(Error::InvalidArgument(format!("unknown nonlinearity '{s}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeatRunConfig {
    pub beta: f64,
    pub lambda: f64,
    pub scheme: TruncationScheme,
    /// Grid points per side.
    pub m: usize,
    pub dt: f64,
    pub horizon: f64,
    pub nonlinearity: Nonlinearity,
    /// Drive the full equation by noise projected with the truncation
    /// symbol instead of full space-time white noise.
    #[serde(default)]
    pub projected_noise: bool,
}

impl HeatRunConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |s: String| Err(Error::InvalidArgument(s));
        if self.beta == 0.0 || !self.beta.is_finite() {
            return bad(format!("β = {} must be finite and nonzero", self.beta));
        }
        if !self.lambda.is_finite() {
            return bad("λ must be finite".into());
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad(format!("dt = {} must be positive", self.dt));
        }
        if !(self.horizon >= 0.0) {
            return bad(format!("horizon {} must be nonnegative", self.horizon));
        }
        if self.nonlinearity == Nonlinearity::BoundedF && self.lambda <= 0.0 {
            return bad("the bounded nonlinearity needs λ > 0".into());
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

/// Precomputed multipliers for one configuration.
#[derive(Clone, Debug)]
pub struct HeatModel<T: Scalar = f64> {
    pub config: HeatRunConfig,
    grid: TorusGrid<T>,
    /// Exact stochastic step of the linear part of the full equation.
    linear: HeatConvStepper<T>,
    /// Stationary convolution stepper (noise always truncated).
    conv: HeatConvStepper<T>,
    q: Vec<T>,
    /// Pointwise variance of `Ψ_N` on the grid.
    sigma: f64,
}

impl<T: Scalar> HeatModel<T> {
    pub fn new(config: HeatRunConfig) -> Result<Self> {
        config.validate()?;
        let grid = TorusGrid::new(config.m)?;
        let noise_scheme = config.projected_noise.then_some(&config.scheme);
        let linear = HeatConvStepper::new(&grid, noise_scheme, config.dt)?;
        let conv = HeatConvStepper::new(&grid, Some(&config.scheme), config.dt)?;
        let q = grid.multiplier(|n1, n2| config.scheme.symbol(n1, n2));
        let sigma = sigma_grid(&grid, &config.scheme);
        Ok(HeatModel {
            config,
            grid,
            linear,
            conv,
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

    /// `C_N = e^{−β²σ/2}`.
    pub fn c_n(&self) -> f64 {
        (-0.5 * self.config.beta.powi(2) * self.sigma).exp()
    }

    pub fn truncation(&self) -> &[T] {
        &self.q
    }

    pub fn linear_stepper(&self) -> &HeatConvStepper<T> {
        &self.linear
    }

    pub fn conv_stepper(&self) -> &HeatConvStepper<T> {
        &self.conv
    }

    /// `½ λ β C_N Q(e^{βQu})`, the drift of the full equation.
    pub fn full_drift(&self, u: &SpectralField<T>, step: usize, t: f64) -> Result<SpectralField<T>> {
        let b = self.config.beta;
        let qu = u.with_multiplier(&self.q).to_physical();
        let e: Vec<T> = qu.iter().map(|&v| T::lit((b * v.as_f64()).exp())).collect();
        if e.iter().any(|v| !v.is_finite()) {
            return Err(Error::NumericAbort {
                step,
                t,
                what: "e^{βQu} overflowed (focusing blow-up?)".into(),
            });
        }
        let mut f = SpectralField::from_physical(&self.grid, &e);
        f.apply_multiplier(&self.q);
        f.scale(T::lit(0.5 * self.config.lambda * b * self.c_n()));
        Ok(f)
    }
}

#[derive(Clone, Debug)]
pub struct HeatState<T: Scalar = f64> {
    pub t: f64,
    pub step: usize,
    pub u: SpectralField<T>,
}

impl<T: Scalar> HeatState<T> {
    pub fn new(u: SpectralField<T>) -> Self {
        HeatState { t: 0.0, step: 0, u }
    }
}

/// Lie step of the full equation with a given linear-substep noise `eta`:
/// `u ← e^{−dt(1−Δ)/2}u + η`, then `u ← u − dt · ½λβC_N Q e^{βQu}`.
pub fn snlh_step_with_noise<T: Scalar>(
    model: &HeatModel<T>,
    state: &mut HeatState<T>,
    eta: &SpectralField<T>,
) -> Result<()> {
    model.linear.propagate(&mut state.u);
    state.u.axpy(T::one(), eta);
    let drift = model.full_drift(&state.u, state.step, state.t)?;
    state.u.axpy(T::lit(-model.config.dt), &drift);
    state.t += model.config.dt;
    state.step += 1;
    Ok(())
}

pub fn snlh_full_step<T: Scalar, R: Rng + ?Sized>(
    model: &HeatModel<T>,
    state: &mut HeatState<T>,
    rng: &mut R,
) -> Result<()> {
    let eta = model.linear.sample_noise(rng);
    snlh_step_with_noise(model, state, &eta)
}

/// Residual `v` with the linear evolution `z` of the initial data.
#[derive(Clone, Debug)]
pub struct DpdState<T: Scalar = f64> {
    pub t: f64,
    pub step: usize,
    pub v: SpectralField<T>,
    pub z: SpectralField<T>,
}

impl<T: Scalar> DpdState<T> {
    pub fn new(v: SpectralField<T>, z: SpectralField<T>) -> Self {
        DpdState { t: 0.0, step: 0, v, z }
    }
}

/// Exponential Euler step of the residual equation,
/// `v ← e^{−dt(1−Δ)/2}[v − dt · (λβ/2) Q(e^{βQz} NL(βQv) Θ)]`, `z ← e^{−dt(1−Δ)/2} z`,
/// with `Θ` the grid values of the chaos at the left endpoint.
pub fn dpd_v_step<T: Scalar>(model: &HeatModel<T>, state: &mut DpdState<T>, theta: &[T]) -> Result<()> {
    let cfg = &model.config;
    let b = cfg.beta;
    let (qv, qz) = SpectralField::to_physical_pair(&state.v.with_multiplier(&model.q), &state.z.with_multiplier(&model.q));
    let mut src = Vec::with_capacity(qv.len());
    for ((&v, &z), &th) in qv.iter().zip(&qz).zip(theta) {
        let s = (b * z.as_f64()).exp() * cfg.nonlinearity.eval(b * v.as_f64()) * th.as_f64();
        if !s.is_finite() {
            return Err(Error::NumericAbort {
                step: state.step,
                t: state.t,
                what: "residual nonlinearity overflowed".into(),
            });
        }
        src.push(T::lit(s));
    }
    let mut f = SpectralField::from_physical(&model.grid, &src);
    f.apply_multiplier(&model.q);
    state.v.axpy(T::lit(-cfg.dt * 0.5 * cfg.lambda * b), &f);
    model.linear.propagate(&mut state.v);
    model.linear.propagate(&mut state.z);
    state.t += cfg.dt;
    state.step += 1;
    Ok(())
}

/// Which form of the equation a run integrates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HeatSolver {
    Full,
    Residual,
}

/// Recorded trajectory of a run.
#[derive(Clone, Debug)]
pub struct HeatRun<T: Scalar = f64> {
    pub times: Vec<f64>,
    /// `u` for full runs, `v` for residual runs.
    pub path: Vec<SpectralField<T>>,
    /// Largest grid value of `βv` (residual runs) at each record.
    pub max_beta_v: Vec<f64>,
    /// Number of grid points with `βv > tol` at each record.
    pub sign_violations: Vec<usize>,
}

/// Largest grid value of `β f` and the number of grid points above `tol`.
pub fn sign_check<T: Scalar>(f: &SpectralField<T>, beta: f64, tol: f64) -> (f64, usize) {
    let vals = f.to_physical();
    let mut max = f64::NEG_INFINITY;
    let mut count = 0;
    for v in vals {
        let x = beta * v.as_f64();
        max = max.max(x);
        if x > tol {
            count += 1;
        }
    }
    (max, count)
}

/// Runs to the configured horizon, recording every `record_every` steps.
///
/// Residual runs start from `v = 0`, `z = init` and generate `Θ` on the fly
/// from a stationary heat convolution driven by the same stream.
pub fn run_heat<T: Scalar>(
    model: &HeatModel<T>,
    solver: HeatSolver,
    init: &SpectralField<T>,
    stream: RngStream,
    record_every: usize,
) -> Result<HeatRun<T>> {
    let steps = model.config.steps();
    let every = record_every.max(1);
    let beta = model.config.beta;
    let mut run = HeatRun {
        times: Vec::new(),
        path: Vec::new(),
        max_beta_v: Vec::new(),
        sign_violations: Vec::new(),
    };
    let record = |t: f64, f: &SpectralField<T>, run: &mut HeatRun<T>| {
        let (max, count) = sign_check(f, beta, 1e-8);
        run.times.push(t);
        run.path.push(f.clone());
        run.max_beta_v.push(max);
        run.sign_violations.push(count);
    };
    match solver {
        HeatSolver::Full => {
            let mut st = HeatState::new(init.clone());
            record(0.0, &st.u, &mut run);
            for k in 0..steps {
                snlh_full_step(model, &mut st, &mut stream.rng_at(k as u64))?;
                if (k + 1) % every == 0 {
                    record(st.t, &st.u, &mut run);
                }
            }
        }
        HeatSolver::Residual => {
            let mut conv = HeatConvState::stationary(&model.grid, Some(model.config.scheme), &mut stream.fork(1).rng());
            let mut st = DpdState::new(SpectralField::zeros(&model.grid), init.clone());
            record(0.0, &st.v, &mut run);
            for k in 0..steps {
                let theta = wick_exp_values(&conv.psi.to_physical(), beta, model.sigma);
                dpd_v_step(model, &mut st, &theta)?;
                conv.step(&model.conv, &mut stream.rng_at(k as u64));
                if (k + 1) % every == 0 {
                    record(st.t, &st.v, &mut run);
                }
            }
        }
    }
    Ok(run)
}

/// Norms of a trajectory in `C([0,T]; L²) ∩ L²([0,T]; H¹)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyNorms {
    pub sup_l2: f64,
    /// `∫ ‖v‖²_{H¹} dt`, left-endpoint sum over the recorded times.
    pub h1_integral: f64,
}

pub fn energy_diagnostics<T: Scalar>(path: &[SpectralField<T>], times: &[f64]) -> EnergyNorms {
    let mut sup: f64 = 0.0;
    let mut acc = 0.0;
    for (k, f) in path.iter().enumerate() {
        sup = sup.max(f.norm_sq().as_f64().sqrt());
        if k + 1 < path.len() {
            acc += (times[k + 1] - times[k]) * h1_sq(f);
        }
    }
    EnergyNorms {
        sup_l2: sup,
        h1_integral: acc,
    }
}

fn h1_sq<T: Scalar>(f: &SpectralField<T>) -> f64 {
    let g = f.grid();
    f.coeffs()
        .iter()
        .enumerate()
        .map(|(idx, c)| {
            let (n1, n2) = g.mode(idx);
            bracket_sq(n1, n2) * c.norm_sqr().as_f64()
        })
        .sum()
}

/// `E_k = ‖w_k‖² + ½ Σ_{j<k} Σ_n (1 − e^{−dt⟨n⟩²}) |ĝ_j(n)|²` for the
/// difference `w = a − b` of two residual paths recorded at every step.
///
/// `g_j = e^{dt(1−Δ)/2} w_{j+1}` is the difference just before the linear
/// substep, so the sum is exactly the dissipation of the linear substeps.
/// For steps in which the nonlinear substep contracts the difference, `E`
/// is nonincreasing.
pub fn difference_energy<T: Scalar>(a: &[SpectralField<T>], b: &[SpectralField<T>], dt: f64) -> Vec<f64> {
    assert_eq!(a.len(), b.len());
    let mut out = Vec::with_capacity(a.len());
    let mut dissipated = 0.0;
    for (k, (x, y)) in a.iter().zip(b).enumerate() {
        let mut w = x.clone();
        w.axpy(-T::one(), y);
        let g = w.grid();
        if k > 0 {
            dissipated += w
                .coeffs()
                .iter()
                .enumerate()
                .map(|(idx, c)| {
                    let (n1, n2) = g.mode(idx);
                    (dt * bracket_sq(n1, n2)).exp_m1() * c.norm_sqr().as_f64()
                })
                .sum::<f64>();
        }
        out.push(w.norm_sq().as_f64() + 0.5 * dissipated);
    }
    out
}
