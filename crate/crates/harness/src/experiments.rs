//! Subcommand drivers. Each returns the reports it produced; the caller
//! writes them.

use std::f64::consts::TAU;
use std::path::Path;

use liouville_core::gibbs::{dynamical_invariance, generator_invariance, DynamicalConfig, Flow, GibbsSampler};
use liouville_core::gmc::{
    cauchy_decay, covariance_profile, mean_estimate, moment_ladder, multifractal_fit, theoretical_zeta, GmcSampler,
    Sampling,
};
use liouville_core::heat::{energy_diagnostics, run_heat, HeatModel, HeatRunConfig, HeatSolver};
use liouville_core::random::{sample_gff, RngStream};
use liouville_core::spectral::kernels::{sigma_n, torus_norm, truncated_bessel_on_grid, wave_kernel_check};
use liouville_core::spectral::{SpectralField, TruncationScheme};
use liouville_core::stats::Estimate;
use liouville_core::wave::{run_wave, WaveModel, WaveRunConfig, WaveSolver};
use liouville_core::{Field, Grid};
use serde_json::json;

use crate::acceptance::{self, generator_battery, kahane_menu};
use crate::config::{scheme, Config};
use crate::report::{ExperimentReport, MetricRow};
use crate::snapshot::{write_snapshot, SnapshotMeta};
use crate::RunError;

pub const SUBCOMMANDS: [&str; 7] = ["sigma", "kernels", "gmc", "heat", "wave", "gibbs", "all"];

/// Runs one subcommand. Snapshots (heat, wave) go under `out_dir`
/// immediately; reports are returned.
pub fn run(command: &str, cfg: &Config, out_dir: &Path) -> Result<Vec<ExperimentReport>, RunError> {
    match command {
        "sigma" => Ok(vec![sigma(cfg)?]),
        "kernels" => Ok(vec![kernels(cfg)?]),
        "gmc" => gmc(cfg),
        "heat" => Ok(vec![heat(cfg, out_dir)?]),
        "wave" => Ok(vec![wave(cfg, out_dir)?]),
        "gibbs" => gibbs(cfg),
        "all" => Ok(acceptance::run_all(cfg.profile, cfg.seed)?.into_iter().map(|c| c.report).collect()),
        other => Err(RunError::Config(format!("unknown subcommand '{other}'"))),
    }
}

fn sigma(cfg: &Config) -> Result<ExperimentReport, RunError> {
    let c = &cfg.sigma;
    let ns = c.n.map(|n| vec![n]).unwrap_or_else(|| c.ns.clone());
    let mut r = ExperimentReport::new("sigma", json!({"scheme": c.scheme, "N": ns}), cfg.seed);
    for n in ns {
        let s = sigma_n(&scheme(&c.scheme, n, "sigma")?);
        r.push(MetricRow::info("sigma", "sigma_N", s.value, s.remainder).n(n));
        if n > 1 {
            let ratio = s.value / (n as f64).ln();
            r.push(MetricRow::info("sigma", "sigma_over_log_N", ratio, 0.0).n(n));
        }
    }
    Ok(r)
}

fn kernels(cfg: &Config) -> Result<ExperimentReport, RunError> {
    let c = &cfg.kernels;
    let mut r = ExperimentReport::new("kernels", serde_json::to_value(c).unwrap_or_default(), cfg.seed);
    let grid = Grid::new(c.m)?;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &n in &c.ns {
        for (tag, s) in [("P", TruncationScheme::smooth(n)), ("Q", TruncationScheme::mollifier(n))] {
            let k = truncated_bessel_on_grid(&grid, 2.0, &s, &s);
            for (idx, v) in k.iter().enumerate() {
                let (x1, x2) = grid.point(idx);
                let d = v + (torus_norm(x1, x2) + 1.0 / n as f64).ln() / TAU;
                lo = lo.min(d);
                hi = hi.max(d);
            }
            r.push(MetricRow::info("kernels", format!("{tag}_kernel_at_origin"), k[0], 0.0).n(n));
        }
    }
    r.push(MetricRow::check("kernels", "log_band_width", hi - lo, 0.0, 0.0, 1.0, hi - lo <= 1.0));
    for &t in &c.times {
        let (min, _) = wave_kernel_check(&grid, t, c.wave_n);
        r.push(MetricRow::check("kernels", format!("wave_kernel_min_t{t}"), min, 0.0, 0.0, 1e-6, min >= -1e-6).n(c.wave_n));
    }
    Ok(r)
}

fn gmc(cfg: &Config) -> Result<Vec<ExperimentReport>, RunError> {
    let c = &cfg.gmc;
    let s = scheme(&c.scheme, c.n, "gmc")?;
    let id = |task: &str| format!("gmc_{task}");
    let mut out = Vec::new();
    for task in &c.tasks {
        let exp = id(task);
        let mut r = ExperimentReport::new(&exp, serde_json::to_value(c).unwrap_or_default(), cfg.seed);
        match task.as_str() {
            "mean" => {
                let sampler = GmcSampler::standard(s, c.beta2)?;
                let e = mean_estimate(&sampler, c.samples, cfg.seed, Sampling::SpatialAverage);
                r.push(
                    MetricRow::check(&exp, "mean_theta", e.mean, e.se, 1.0, 3.0 * e.se, (e.mean - 1.0).abs() <= 3.0 * e.se)
                        .n(c.n)
                        .beta2(c.beta2)
                        .seed(cfg.seed),
                );
            }
            "covariance" => {
                let sampler = GmcSampler::standard(s, c.beta2)?;
                for b in covariance_profile(&sampler, c.samples, cfg.seed) {
                    let ok = (b.mc.mean - b.exact).abs() <= 4.0 * b.mc.se + 1e-12;
                    r.push(MetricRow::check(&exp, format!("cov_r{:.5}", b.r), b.mc.mean, b.mc.se, b.exact, 4.0 * b.mc.se, ok).n(c.n));
                    let reference = -(b.r + 1.0 / c.n as f64).ln() / TAU;
                    r.push(MetricRow::info(&exp, format!("log_reference_r{:.5}", b.r), reference, 0.0).n(c.n));
                }
            }
            "moments" => {
                let ladders = moment_ladder(s.kind, c.beta2, &c.ladder, &[c.alpha], c.p, c.samples, cfg.seed)?;
                let l = &ladders[0];
                for (k, &n) in l.ns.iter().enumerate() {
                    let e = l.estimate(k);
                    r.push(MetricRow::info(&exp, "moment", e.mean, e.se).n(n).beta2(c.beta2));
                }
                // bounded: the coupled increments shrink, or none is significant
                let last = l.ns.len() - 1;
                let second: Vec<f64> = (0..c.samples)
                    .map(|i| (l.values[last][i] - l.values[last - 1][i]) - (l.values[1][i] - l.values[0][i]))
                    .collect();
                let sd = Estimate::from_samples(&second);
                let total = l.difference(last, 0);
                let ok = sd.mean + 3.0 * sd.se < 0.0 || total.mean <= 3.0 * total.se;
                r.push(MetricRow::info(&exp, "increment_change", sd.mean, sd.se).beta2(c.beta2));
                r.push(MetricRow::check(&exp, "bounded_in_N", total.mean, total.se, 0.0, 3.0 * total.se, ok).beta2(c.beta2).seed(cfg.seed));
            }
            "cauchy" => {
                let mut prev: Option<Estimate> = None;
                for (i, &n) in c.ladder.iter().enumerate() {
                    let e = cauchy_decay(s.kind, c.beta2, c.alpha, n, c.samples, cfg.seed + i as u64, Sampling::SpatialAverage)?;
                    r.push(MetricRow::info(&exp, "coupled_difference_second_moment", e.mean, e.se).n(n).beta2(c.beta2));
                    if let Some(p) = prev {
                        let d = p.minus(&e);
                        r.push(MetricRow::check(&exp, "decrease", d.mean, d.se, 0.0, 3.0 * d.se, d.mean > 3.0 * d.se).n(n).beta2(c.beta2));
                    }
                    prev = Some(e);
                }
            }
            "multifractal" => {
                let sampler = GmcSampler::new(s, c.beta2, 2 * c.n as usize)?;
                let lo = 4.0 / c.n as f64;
                let radii: Vec<f64> = (0..8).map(|i| lo * (0.5 / lo).powf(i as f64 / 7.0)).collect();
                let fit = multifractal_fit(&sampler, c.p, &radii, c.samples, cfg.seed)?;
                for (rad, m) in fit.radii.iter().zip(&fit.moments) {
                    r.push(MetricRow::info(&exp, format!("ball_moment_r{rad:.5}"), m.mean, m.se).n(c.n));
                }
                let target = theoretical_zeta(c.beta2, c.p);
                let ok = (fit.zeta - target).abs() <= 0.1 * target.abs();
                r.push(MetricRow::check(&exp, "zeta", fit.zeta, fit.zeta_se, target, 0.1 * target.abs(), ok).n(c.n).beta2(c.beta2));
            }
            "kahane" => {
                let mut k = kahane_menu(&exp, c.samples, cfg.seed)?;
                k.config = r.config.clone();
                r = k;
            }
            other => return Err(RunError::Config(format!("gmc.tasks: unknown task '{other}'"))),
        }
        out.push(r);
    }
    Ok(out)
}

fn snapshot(dir: &Path, label: &str, k: usize, t: f64, f: &Field, seed: u64) -> Result<(), RunError> {
    let meta = SnapshotMeta {
        m: f.grid().m(),
        t,
        step: k,
        label: label.to_string(),
        seed,
    };
    write_snapshot(&dir.join(format!("{label}_{k:05}.bin")), f, &meta)?;
    Ok(())
}

fn heat(cfg: &Config, out_dir: &Path) -> Result<ExperimentReport, RunError> {
    let c = &cfg.heat;
    let sch = scheme(&c.scheme, c.n, "heat")?;
    let run_cfg = HeatRunConfig {
        beta: c.beta2.sqrt(),
        lambda: c.lambda,
        scheme: sch,
        m: c.m,
        dt: c.dt,
        horizon: c.horizon,
        nonlinearity: c.nonlinearity.parse()?,
        projected_noise: false,
    };
    let solver = if c.solver == "full" { HeatSolver::Full } else { HeatSolver::Residual };
    let model = HeatModel::<f64>::new(run_cfg.clone())?;
    let init = sample_gff(model.grid(), Some(&sch), &mut RngStream::new(cfg.seed, 0).rng());
    let run = run_heat(&model, solver, &init, RngStream::new(cfg.seed, 1), c.record_every)?;
    let mut r = ExperimentReport::new("heat", json!({"run": run_cfg, "solver": c.solver}), cfg.seed);
    let tag = |m: MetricRow| m.n(c.n).beta2(c.beta2).lambda(c.lambda).seed(cfg.seed);
    let e = energy_diagnostics(&run.path, &run.times);
    r.push(tag(MetricRow::info("heat", "sup_l2", e.sup_l2, 0.0)));
    r.push(tag(MetricRow::info("heat", "h1_time_integral", e.h1_integral, 0.0)));
    if solver == HeatSolver::Residual {
        let max = run.max_beta_v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let count: usize = run.sign_violations.iter().sum();
        r.push(tag(MetricRow::info("heat", "max_beta_v", max, 0.0)));
        r.push(tag(MetricRow::check("heat", "sign_violations", count as f64, 0.0, 0.0, 0.0, count == 0)));
    }
    if c.snapshots {
        let dir = out_dir.join("snapshots").join("heat");
        for (k, (t, f)) in run.times.iter().zip(&run.path).enumerate() {
            snapshot(&dir, if solver == HeatSolver::Full { "u" } else { "v" }, k, *t, f, cfg.seed)?;
        }
    }
    Ok(r)
}

fn wave(cfg: &Config, out_dir: &Path) -> Result<ExperimentReport, RunError> {
    let c = &cfg.wave;
    let sch = scheme(&c.scheme, c.n, "wave")?;
    let solver = if c.solver == "full" { WaveSolver::Full } else { WaveSolver::XySystem };
    let run_cfg = WaveRunConfig {
        beta: c.beta2.sqrt(),
        lambda: c.lambda,
        scheme: sch,
        m: c.m,
        dt: c.dt,
        horizon: c.horizon,
        solver,
        projected_noise: false,
    };
    let model = WaveModel::<f64>::new(run_cfg.clone())?;
    let z0 = sample_gff(model.grid(), Some(&sch), &mut RngStream::new(cfg.seed, 0).rng());
    let z1 = SpectralField::zeros(model.grid());
    let run = run_wave(&model, (&z0, &z1), RngStream::new(cfg.seed, 1), c.record_every)?;
    let mut r = ExperimentReport::new("wave", json!({"run": run_cfg}), cfg.seed);
    let tag = |m: MetricRow| m.n(c.n).beta2(c.beta2).lambda(c.lambda).seed(cfg.seed);
    let e = energy_diagnostics(&run.path, &run.times);
    r.push(tag(MetricRow::info("wave", "sup_l2", e.sup_l2, 0.0)));
    if solver == WaveSolver::XySystem {
        let max = run.max_beta_qx.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let count: usize = run.sign_violations.iter().sum();
        r.push(tag(MetricRow::info("wave", "max_beta_qx", max, 0.0)));
        r.push(tag(MetricRow::check("wave", "sign_violations", count as f64, 0.0, 0.0, 0.0, count == 0)));
    }
    if c.snapshots {
        let dir = out_dir.join("snapshots").join("wave");
        let label = if solver == WaveSolver::Full { "u" } else { "x" };
        for (k, (t, f)) in run.times.iter().zip(&run.path).enumerate() {
            snapshot(&dir, label, k, *t, f, cfg.seed)?;
        }
        for (k, (t, f)) in run.times.iter().zip(&run.path_y).enumerate() {
            snapshot(&dir, "y", k, *t, f, cfg.seed)?;
        }
    }
    Ok(r)
}

fn gibbs(cfg: &Config) -> Result<Vec<ExperimentReport>, RunError> {
    let c = &cfg.gibbs;
    let sch = scheme(&c.scheme, c.n, "gibbs")?;
    let sampler = if c.lambda == 0.0 {
        GibbsSampler::gaussian(sch, c.beta2, c.m)?
    } else {
        GibbsSampler::new(sch, c.beta2, c.lambda, c.m)?
    };
    let battery = generator_battery();
    let mut r = ExperimentReport::new("gibbs_generator", serde_json::to_value(c).unwrap_or_default(), cfg.seed);
    let g = generator_invariance(&sampler, &battery, c.samples, cfg.seed, c.m_cap)?;
    r.push(MetricRow::info("gibbs_generator", "acceptance_rate", g.acceptance_rate, 0.0).n(c.n));
    for (name, e) in g.names.iter().zip(&g.estimates) {
        let ok = e.mean.abs() <= 3.0 * e.se;
        r.push(MetricRow::check("gibbs_generator", format!("E_LF_{name}"), e.mean, e.se, 0.0, 3.0 * e.se, ok).n(c.n).beta2(c.beta2).lambda(c.lambda).seed(cfg.seed));
    }
    let mut out = vec![r];
    if c.dynamical {
        let mut d = ExperimentReport::new("gibbs_dynamical", serde_json::to_value(c).unwrap_or_default(), cfg.seed);
        for (flow, f) in [(Flow::Heat, "heat"), (Flow::Wave, "wave")] {
            let res = dynamical_invariance(&DynamicalConfig {
                flow,
                scheme: sch,
                beta2: c.beta2,
                lambda: c.lambda,
                m: c.m,
                dt: c.dt,
                levels: 2,
                horizon: c.horizon,
                samples: c.dyn_samples,
                seed: cfg.seed,
            })?;
            for (j, name) in res.names.iter().enumerate() {
                for (l, dt) in res.dts.iter().enumerate() {
                    let ks = res.ks[l][j].1;
                    d.push(MetricRow::check("gibbs_dynamical", format!("{f}_{name}_ks_p_dt{dt}"), ks, 0.0, 0.01, 0.0, ks > 0.01).n(c.n).beta2(c.beta2).lambda(c.lambda));
                    let dr = res.drift[l][j];
                    d.push(MetricRow::info("gibbs_dynamical", format!("{f}_{name}_drift_dt{dt}"), dr.mean, dr.se));
                }
                let ex = res.drift_extrapolated[j];
                let ok = ex.mean.abs() <= 3.0 * ex.se;
                d.push(MetricRow::check("gibbs_dynamical", format!("{f}_{name}_drift_extrapolated"), ex.mean, ex.se, 0.0, 3.0 * ex.se, ok));
            }
        }
        out.push(d);
    }
    Ok(out)
}
