use serde::{Deserialize, Serialize};

use super::{generator_apply, sample_ensemble, GeneratorContext, GibbsSampler, Observable};
use crate::ensemble::map_replicas;
use crate::heat::{snlh_step_with_noise, HeatModel, HeatRunConfig, HeatState, Nonlinearity};
use crate::spectral::TruncationScheme;
use crate::stats::{ks_two_sample, Estimate};
use crate::wave::{sdnlw_step_with_noise, WaveModel, WaveRunConfig, WaveSolver, WaveState};
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct GeneratorOutcome {
    pub names: Vec<String>,
    /// `E_ρ[LF]` per observable.
    pub estimates: Vec<Estimate>,
    /// Largest `|L(F+2G) − LF − 2LG|` over samples (first two observables).
    pub linearity_defect: f64,
    pub acceptance_rate: f64,
}

/// Monte-Carlo estimate of `E_ρ[LF]` over exact Gibbs samples.
pub fn generator_invariance(
    sampler: &GibbsSampler,
    observables: &[(String, Observable)],
    samples: usize,
    seed: u64,
    m_cap: i64,
) -> Result<GeneratorOutcome> {
    let ens = sample_ensemble(sampler, samples, seed, false);
    let proposals: u64 = ens.iter().map(|s| s.propose_count).sum();
    let rows: Vec<Result<(Vec<f64>, f64)>> = map_replicas(samples, seed, |i, _| {
        let ctx = GeneratorContext::new(sampler, &ens[i].u)?;
        let mut vals = Vec::with_capacity(observables.len());
        for (_, o) in observables {
            vals.push(generator_apply(o, &ctx, m_cap)?);
        }
        let mut defect = 0.0;
        if observables.len() >= 2 {
            let combo = Observable::Combination(vec![(1.0, observables[0].1.clone()), (2.0, observables[1].1.clone())]);
            let lc = generator_apply(&combo, &ctx, m_cap)?;
            defect = (lc - vals[0] - 2.0 * vals[1]).abs();
        }
        Ok((vals, defect))
    });
    let mut cols = vec![Vec::with_capacity(samples); observables.len()];
    let mut linearity_defect: f64 = 0.0;
    for r in rows {
        let (vals, d) = r?;
        for (c, v) in cols.iter_mut().zip(vals) {
            c.push(v);
        }
        linearity_defect = linearity_defect.max(d);
    }
    Ok(GeneratorOutcome {
        names: observables.iter().map(|(n, _)| n.clone()).collect(),
        estimates: cols.iter().map(|c| Estimate::from_samples(c)).collect(),
        linearity_defect,
        acceptance_rate: samples as f64 / proposals.max(1) as f64,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flow {
    Heat,
    Wave,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DynamicalConfig {
    pub flow: Flow,
    pub scheme: TruncationScheme,
    pub beta2: f64,
    pub lambda: f64,
    pub m: usize,
    /// Coarsest step; level `l` uses `dt / 2^l`.
    pub dt: f64,
    /// Number of step sizes, at least 2.
    pub levels: usize,
    pub horizon: f64,
    pub samples: usize,
    pub seed: u64,
}

#[derive(Clone, Debug)]
pub struct DynamicalOutcome {
    pub names: Vec<String>,
    pub dts: Vec<f64>,
    /// `ks[l][j]`: two-sample KS `(D, p)` of time-0 against time-`horizon`
    /// values of observable `j` at step `dts[l]`.
    pub ks: Vec<Vec<(f64, f64)>>,
    /// `drift[l][j]`: `E[F(u_T) − F(u_0)]`.
    pub drift: Vec<Vec<Estimate>>,
    /// `refinement[l][j]`: paired `drift[l+1] − drift[l]`.
    pub refinement: Vec<Vec<Estimate>>,
    /// Richardson extrapolation `2·drift[L] − drift[L−1]` from the two
    /// finest steps to `dt → 0`.
    pub drift_extrapolated: Vec<Estimate>,
}

/// Observables tracked by the dynamical test.
pub fn dynamical_observables() -> Vec<(String, Observable)> {
    use super::Coord;
    vec![
        ("zero_mode".into(), Observable::Coord(Coord::Zero)),
        ("re_u_1_0".into(), Observable::Coord(Coord::Re(1, 0))),
        ("abs2_u_1_1".into(), Observable::Combination(vec![
            (1.0, Observable::Square(Coord::Re(1, 1))),
            (1.0, Observable::Square(Coord::Im(1, 1))),
        ])),
        ("weight".into(), Observable::Weight),
    ]
}

/// Starts an ensemble in `ρ_N` (or `ρ_N ⊗ μ₀`), runs the full flow with
/// steps `dt, dt/2, …` driven by one noise path, and compares the law of
/// the observables at time `horizon` with the initial one.
///
/// The noise of a step `2h` is `e^{hA}η₁ + η₂` built from the two `h`-step
/// increments, so every level sees the same Brownian path.
pub fn dynamical_invariance(cfg: &DynamicalConfig) -> Result<DynamicalOutcome> {
    if cfg.levels < 2 {
        return Err(Error::InvalidArgument(format!("need at least two step sizes, got {}", cfg.levels)));
    }
    let sampler = GibbsSampler::new(cfg.scheme, cfg.beta2, cfg.lambda, cfg.m)?;
    let beta = cfg.beta2.sqrt();
    let levels = cfg.levels;
    let dts: Vec<f64> = (0..levels).map(|l| cfg.dt / (1u64 << l) as f64).collect();
    let sub = 1usize << (levels - 1);
    let steps = (cfg.horizon / cfg.dt).round() as usize;
    let obs = dynamical_observables();
    let wave = cfg.flow == Flow::Wave;
    let ens = sample_ensemble(&sampler, cfg.samples, cfg.seed, wave);

    let heat_cfg = |dt| HeatRunConfig {
        beta,
        lambda: cfg.lambda,
        scheme: cfg.scheme,
        m: cfg.m,
        dt,
        horizon: cfg.horizon,
        nonlinearity: Nonlinearity::RawExp,
        projected_noise: false,
    };
    let wave_cfg = |dt| WaveRunConfig {
        beta,
        lambda: cfg.lambda,
        scheme: cfg.scheme,
        m: cfg.m,
        dt,
        horizon: cfg.horizon,
        solver: WaveSolver::Full,
        projected_noise: false,
    };
    enum Models {
        Heat(Vec<HeatModel>),
        Wave(Vec<WaveModel>),
    }
    let models = if wave {
        Models::Wave(dts.iter().map(|&dt| WaveModel::new(wave_cfg(dt))).collect::<Result<_>>()?)
    } else {
        Models::Heat(dts.iter().map(|&dt| HeatModel::new(heat_cfg(dt))).collect::<Result<_>>()?)
    };

    let eval = |u: &crate::Field| -> Result<Vec<f64>> {
        let ctx = GeneratorContext::new(&sampler, u)?;
        obs.iter().map(|(_, o)| o.value(&ctx)).collect()
    };

    // per replica: values at time 0, then at the horizon for each level
    let runs: Vec<Result<Vec<Vec<f64>>>> = map_replicas(cfg.samples, cfg.seed, |i, stream| {
        let noise = stream.fork(0x6e6f_6973_65);
        let s0 = &ens[i];
        let mut out = vec![eval(&s0.u)?];
        let finals = match &models {
            Models::Heat(ms) => {
                let mut st: Vec<HeatState> = ms.iter().map(|_| HeatState::new(s0.u.clone())).collect();
                for k in 0..steps {
                    let mut rng = noise.rng_at(k as u64);
                    let finest = ms[levels - 1].linear_stepper();
                    let mut eta: Vec<_> = (0..sub).map(|_| finest.sample_noise(&mut rng)).collect();
                    for l in (0..levels).rev() {
                        for e in &eta {
                            snlh_step_with_noise(&ms[l], &mut st[l], e)?;
                        }
                        eta = eta
                            .chunks(2)
                            .filter(|p| p.len() == 2)
                            .map(|p| {
                                let mut e = p[0].clone();
                                ms[l].linear_stepper().propagate(&mut e);
                                e.axpy(1.0, &p[1]);
                                e
                            })
                            .collect();
                    }
                }
                st.into_iter().map(|s| s.u).collect::<Vec<_>>()
            }
            Models::Wave(ms) => {
                let ud = s0.u_dot.clone().expect("wave samples carry a velocity");
                let mut st: Vec<WaveState> = ms.iter().map(|_| WaveState::new(s0.u.clone(), ud.clone())).collect();
                for k in 0..steps {
                    let mut rng = noise.rng_at(k as u64);
                    let finest = ms[levels - 1].linear_stepper();
                    let mut eta: Vec<_> = (0..sub).map(|_| finest.sample_noise(&mut rng)).collect();
                    for l in (0..levels).rev() {
                        for (a, b) in &eta {
                            sdnlw_step_with_noise(&ms[l], &mut st[l], (a, b))?;
                        }
                        eta = eta
                            .chunks(2)
                            .filter(|p| p.len() == 2)
                            .map(|p| {
                                let (mut a, mut b) = p[0].clone();
                                ms[l].linear_stepper().propagate(&mut a, &mut b);
                                a.axpy(1.0, &p[1].0);
                                b.axpy(1.0, &p[1].1);
                                (a, b)
                            })
                            .collect();
                    }
                }
                st.into_iter().map(|s| s.u).collect()
            }
        };
        for u in &finals {
            out.push(eval(u)?);
        }
        Ok(out)
    });

    // per[j][s]: observable j at slot s (0 = start, 1 + l = level l)
    let mut per = vec![vec![Vec::with_capacity(cfg.samples); levels + 1]; obs.len()];
    for r in runs {
        let vals = r?;
        for (j, p) in per.iter_mut().enumerate() {
            for (s, v) in vals.iter().enumerate() {
                p[s].push(v[j]);
            }
        }
    }
    let paired = |f: &dyn Fn(&[Vec<f64>], usize) -> f64, p: &[Vec<f64>]| -> Estimate {
        Estimate::from_samples(&(0..p[0].len()).map(|i| f(p, i)).collect::<Vec<_>>())
    };
    let ks = (0..levels).map(|l| per.iter().map(|p| ks_two_sample(&p[0], &p[l + 1])).collect()).collect();
    let drift = (0..levels)
        .map(|l| per.iter().map(|p| paired(&|p, i| p[l + 1][i] - p[0][i], p)).collect())
        .collect();
    let refinement = (0..levels - 1)
        .map(|l| per.iter().map(|p| paired(&|p, i| p[l + 2][i] - p[l + 1][i], p)).collect())
        .collect();
    let drift_extrapolated = per
        .iter()
        .map(|p| paired(&|p, i| 2.0 * p[levels][i] - p[levels - 1][i] - p[0][i], p))
        .collect();
    Ok(DynamicalOutcome {
        names: obs.iter().map(|(n, _)| n.clone()).collect(),
        dts,
        ks,
        drift,
        refinement,
        drift_extrapolated,
    })
}
