//! TOML configuration with `--key value` overrides.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;

use liouville_core::spectral::{TruncationKind, TruncationScheme};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    /// Reduced sample counts where the full count is too slow for a test run.
    Test,
    /// The full desk-scale sample counts.
    Desk,
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Profile::Test => "test",
            Profile::Desk => "desk",
        })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    pub seed: u64,
    pub out_dir: String,
    pub profile: Profile,
    pub sigma: SigmaConfig,
    pub kernels: KernelsConfig,
    pub gmc: GmcConfig,
    pub heat: HeatConfig,
    pub wave: WaveConfig,
    pub gibbs: GibbsConfig,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            seed: 20_241_016,
            out_dir: "out".into(),
            profile: Profile::Desk,
            sigma: SigmaConfig::default(),
            kernels: KernelsConfig::default(),
            gmc: GmcConfig::default(),
            heat: HeatConfig::default(),
            wave: WaveConfig::default(),
            gibbs: GibbsConfig::default(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SigmaConfig {
    pub scheme: String,
    /// A single `N`; when absent the `ns` list is used.
    pub n: Option<u32>,
    pub ns: Vec<u32>,
}

impl Default for SigmaConfig {
    fn default() -> Self {
        SigmaConfig {
            scheme: "sharp".into(),
            n: None,
            ns: vec![16, 32, 64, 128, 256, 512, 1024],
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KernelsConfig {
    pub m: usize,
    pub ns: Vec<u32>,
    pub wave_n: u32,
    pub times: Vec<f64>,
}

impl Default for KernelsConfig {
    fn default() -> Self {
        KernelsConfig {
            m: 256,
            ns: vec![16, 32, 64],
            wave_n: 32,
            times: vec![0.25, 0.5, 1.0],
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GmcConfig {
    pub scheme: String,
    pub n: u32,
    pub beta2: f64,
    pub alpha: f64,
    pub p: f64,
    pub samples: usize,
    pub ladder: Vec<u32>,
    /// Any of `mean`, `covariance`, `moments`, `cauchy`, `multifractal`, `kahane`.
    pub tasks: Vec<String>,
}

impl Default for GmcConfig {
    fn default() -> Self {
        GmcConfig {
            scheme: "smooth".into(),
            n: 16,
            beta2: PI,
            alpha: 0.5,
            p: 2.0,
            samples: 10_000,
            ladder: vec![8, 16, 32, 64],
            tasks: vec!["mean".into(), "moments".into()],
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HeatConfig {
    pub scheme: String,
    pub n: u32,
    pub m: usize,
    pub beta2: f64,
    pub lambda: f64,
    pub dt: f64,
    pub horizon: f64,
    /// `raw_exp` or `bounded_f`.
    pub nonlinearity: String,
    /// `full` or `residual`.
    pub solver: String,
    pub record_every: usize,
    pub snapshots: bool,
}

impl Default for HeatConfig {
    fn default() -> Self {
        HeatConfig {
            scheme: "smooth".into(),
            n: 16,
            m: 64,
            beta2: PI,
            lambda: 1.0,
            dt: 1.0 / 16.0,
            horizon: 1.0,
            nonlinearity: "bounded_f".into(),
            solver: "residual".into(),
            record_every: 1,
            snapshots: true,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WaveConfig {
    pub scheme: String,
    pub n: u32,
    pub m: usize,
    pub beta2: f64,
    pub lambda: f64,
    pub dt: f64,
    pub horizon: f64,
    /// `full` or `xy_system`.
    pub solver: String,
    pub record_every: usize,
    pub snapshots: bool,
}

impl Default for WaveConfig {
    fn default() -> Self {
        WaveConfig {
            scheme: "mollifier".into(),
            n: 8,
            m: 256,
            beta2: 0.8 * PI,
            lambda: 1.0,
            dt: 1.0 / 32.0,
            horizon: 1.0,
            solver: "xy_system".into(),
            record_every: 1,
            snapshots: true,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GibbsConfig {
    pub scheme: String,
    pub n: u32,
    pub m: usize,
    pub beta2: f64,
    pub lambda: f64,
    /// Cylinder cutoff: observables live on `|n| ≤ 2 m_cap`.
    pub m_cap: i64,
    pub samples: usize,
    pub dynamical: bool,
    pub dyn_samples: usize,
    pub dt: f64,
    pub horizon: f64,
}

impl Default for GibbsConfig {
    fn default() -> Self {
        GibbsConfig {
            scheme: "smooth".into(),
            n: 8,
            m: 32,
            beta2: PI,
            lambda: 1.0,
            m_cap: 8,
            samples: 20_000,
            dynamical: true,
            dyn_samples: 2000,
            dt: 0.01,
            horizon: 0.5,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

const TOP_LEVEL: [&str; 3] = ["seed", "out_dir", "profile"];

/// Splits `--key value` / `--key=value` arguments into pairs.
pub fn parse_overrides(args: &[String]) -> Result<Vec<(String, String)>, ConfigError> {
    let mut out = Vec::new();
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let Some(key) = a.strip_prefix("--") else {
            return Err(ConfigError(format!("expected --key value, found '{a}'")));
        };
        if let Some((k, v)) = key.split_once('=') {
            out.push((k.to_string(), v.to_string()));
        } else {
            let v = it.next().ok_or_else(|| ConfigError(format!("--{key} needs a value")))?;
            out.push((key.to_string(), v.clone()));
        }
    }
    Ok(out)
}

fn parse_value(s: &str) -> toml::Value {
    if let Ok(b) = s.parse::<bool>() {
        return toml::Value::Boolean(b);
    }
    if let Ok(i) = s.parse::<i64>() {
        return toml::Value::Integer(i);
    }
    if let Ok(f) = s.parse::<f64>() {
        return toml::Value::Float(f);
    }
    if s.starts_with('[') {
        if let Ok(t) = format!("v = {s}").parse::<toml::Table>() {
            return t["v"].clone();
        }
    }
    toml::Value::String(s.to_string())
}

/// Integers given where a float is expected are accepted.
fn coerce_numbers(defaults: &toml::Value, v: &mut toml::Value) {
    match (defaults, v) {
        (toml::Value::Float(_), v @ toml::Value::Integer(_)) => {
            let i = v.as_integer().unwrap();
            *v = toml::Value::Float(i as f64);
        }
        (toml::Value::Table(d), toml::Value::Table(t)) => {
            for (k, val) in t.iter_mut() {
                if let Some(dv) = d.get(k) {
                    coerce_numbers(dv, val);
                }
            }
        }
        (toml::Value::Array(d), toml::Value::Array(a)) => {
            if let Some(d0) = d.first() {
                for x in a.iter_mut() {
                    coerce_numbers(d0, x);
                }
            }
        }
        _ => {}
    }
}

/// Reads `path` (if any), applies overrides and deserializes. Bare override
/// keys go to `section` unless they are top-level keys; `section.key` is
/// also accepted. Keys are case-insensitive (`--N` sets `n`).
pub fn load(path: Option<&Path>, section: &str, overrides: &[(String, String)]) -> Result<Config, ConfigError> {
    let mut table: toml::Table = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| ConfigError(format!("{}: {e}", p.display())))?;
            text.parse().map_err(|e| ConfigError(format!("{}: {e}", p.display())))?
        }
        None => toml::Table::new(),
    };
    for (key, raw) in overrides {
        let key = key.to_lowercase().replace('-', "_");
        let (sec, field) = match key.split_once('.') {
            Some((s, f)) => (Some(s.to_string()), f.to_string()),
            None if TOP_LEVEL.contains(&key.as_str()) => (None, key.clone()),
            None => (Some(section.to_string()), key.clone()),
        };
        let value = parse_value(raw);
        match sec {
            None => {
                table.insert(field, value);
            }
            Some(s) => {
                let entry = table.entry(s.clone()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
                let t = entry
                    .as_table_mut()
                    .ok_or_else(|| ConfigError(format!("'{s}' is not a section")))?;
                t.insert(field, value);
            }
        }
    }
    let defaults = toml::Value::try_from(Config::default()).expect("defaults serialize");
    let mut value = toml::Value::Table(table);
    coerce_numbers(&defaults, &mut value);
    let cfg: Config = value
        .try_into()
        .map_err(|e: toml::de::Error| ConfigError(format!("invalid configuration: {}", e.message().trim())))?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn scheme(kind: &str, n: u32, field: &str) -> Result<TruncationScheme, ConfigError> {
    let kind: TruncationKind = kind.parse().map_err(|e| ConfigError(format!("{field}.scheme: {e}")))?;
    TruncationScheme::new(kind, n).map_err(|e| ConfigError(format!("{field}.n: {e}")))
}

impl Config {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |s: String| Err(ConfigError(s));
        scheme(&self.sigma.scheme, self.sigma.n.unwrap_or(1), "sigma")?;
        scheme(&self.gmc.scheme, self.gmc.n, "gmc")?;
        scheme(&self.heat.scheme, self.heat.n, "heat")?;
        scheme(&self.wave.scheme, self.wave.n, "wave")?;
        scheme(&self.gibbs.scheme, self.gibbs.n, "gibbs")?;
        for (name, b) in [("gmc", self.gmc.beta2), ("heat", self.heat.beta2), ("wave", self.wave.beta2), ("gibbs", self.gibbs.beta2)] {
            if !(b > 0.0 && b < 4.0 * PI) {
                return bad(format!("{name}.beta2 = {b} must lie in (0, 4π)"));
            }
        }
        if self.gmc.samples < 2 || self.gibbs.samples < 2 {
            return bad("samples must be at least 2".into());
        }
        if !["raw_exp", "raw", "bounded_f", "bounded"].contains(&self.heat.nonlinearity.as_str()) {
            return bad(format!("heat.nonlinearity: unknown value '{}'", self.heat.nonlinearity));
        }
        if !["full", "residual"].contains(&self.heat.solver.as_str()) {
            return bad(format!("heat.solver: unknown value '{}'", self.heat.solver));
        }
        if !["full", "xy_system"].contains(&self.wave.solver.as_str()) {
            return bad(format!("wave.solver: unknown value '{}'", self.wave.solver));
        }
        for t in &self.gmc.tasks {
            if !["mean", "covariance", "moments", "cauchy", "multifractal", "kahane"].contains(&t.as_str()) {
                return bad(format!("gmc.tasks: unknown task '{t}'"));
            }
        }
        Ok(())
    }
}
