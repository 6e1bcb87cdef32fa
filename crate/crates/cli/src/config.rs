use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("config line {line}: expected key=value, got {text:?}")]
    Syntax { line: usize, text: String },
    #[error("unknown config key {0:?}")]
    UnknownKey(String),
    #[error("bad value for {key}: {value:?} ({reason})")]
    Value { key: String, value: String, reason: String },
}

/// Flat run configuration. `n` is optional because the commands have
/// different cost profiles; each picks its own default grid size.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub d: u32,
    pub n: Option<usize>,
    pub dt: f64,
    pub tau_max: f64,
    pub tau: f64,
    pub epsilon: f64,
    pub omega_max: f64,
    pub d_omega: f64,
    pub delta: f64,
    pub amplitude: f64,
    pub pairs: Vec<(f64, f64)>,
    pub seed: u64,
    pub count: usize,
    pub window: f64,
    pub mode: String,
    /// Initial data kind; `None` lets each command choose.
    pub data: Option<String>,
    pub snapshot_every: usize,
    pub jobs: usize,
    pub out_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            d: 4,
            n: None,
            dt: 0.01,
            tau_max: 15.0,
            tau: 1.0,
            epsilon: 0.1,
            omega_max: 200.0,
            d_omega: 0.05,
            delta: 0.1,
            amplitude: 0.05,
            pairs: vec![(2.0, 8.0), (f64::INFINITY, 4.0)],
            seed: 0,
            count: 10,
            window: 50.0,
            mode: "nonlinear".into(),
            data: None,
            snapshot_every: 10,
            jobs: 1,
            out_dir: PathBuf::from("out"),
        }
    }
}

fn bad(key: &str, value: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Value { key: key.into(), value: value.into(), reason: reason.into() }
}

fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
    value.trim().parse().map_err(|_| bad(key, value, "not a number"))
}

fn exponent(key: &str, s: &str) -> Result<f64, ConfigError> {
    match s.trim() {
        "inf" | "infinity" => Ok(f64::INFINITY),
        t => num(key, t),
    }
}

/// "2:8,inf:4" → [(2, 8), (∞, 4)].
pub fn parse_pairs(value: &str) -> Result<Vec<(f64, f64)>, ConfigError> {
    value
        .split(',')
        .map(|item| {
            let (p, q) = item.split_once(':').ok_or_else(|| bad("pairs", value, "expected p:q[,p:q...]"))?;
            Ok((exponent("pairs", p)?, exponent("pairs", q)?))
        })
        .collect()
}

fn format_exponent(x: f64) -> String {
    if x.is_infinite() {
        "inf".into()
    } else {
        format!("{x}")
    }
}

impl RunConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let v = value.trim();
        match key {
            "d" => self.d = num(key, v)?,
            "N" | "n" => self.n = Some(num(key, v)?),
            "dt" => self.dt = num(key, v)?,
            "tau_max" | "tau-max" => self.tau_max = num(key, v)?,
            "tau" => self.tau = num(key, v)?,
            "epsilon" => self.epsilon = num(key, v)?,
            "omega_max" => self.omega_max = num(key, v)?,
            "d_omega" => self.d_omega = num(key, v)?,
            "delta" => self.delta = num(key, v)?,
            "amplitude" => self.amplitude = num(key, v)?,
            "pairs" => self.pairs = parse_pairs(v)?,
            "seed" => self.seed = num(key, v)?,
            "count" => self.count = num(key, v)?,
            "window" => self.window = num(key, v)?,
            "mode" => self.mode = v.to_string(),
            "data" => self.data = Some(v.to_string()),
            "snapshot_every" => self.snapshot_every = num(key, v)?,
            "jobs" => self.jobs = num(key, v)?,
            "out" => self.out_dir = PathBuf::from(v),
            _ => return Err(ConfigError::UnknownKey(key.to_string())),
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.to_path_buf(), source })?;
        let mut cfg = RunConfig::default();
        cfg.apply_text(&text)?;
        Ok(cfg)
    }

    pub fn apply_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for (k, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Syntax { line: k + 1, text: raw.to_string() })?;
            self.set(key.trim(), value)?;
        }
        Ok(())
    }

    /// Range checks shared by every command; module-level checks still apply.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let check = |ok: bool, key: &str, value: String, reason: &str| if ok { Ok(()) } else { Err(bad(key, &value, reason)) };
        check((3..=6).contains(&self.d), "d", self.d.to_string(), "need 3 <= d <= 6")?;
        if let Some(n) = self.n {
            check((16..=512).contains(&n), "N", n.to_string(), "need 16 <= N <= 512")?;
        }
        check(self.dt > 0.0 && self.dt <= 0.5, "dt", self.dt.to_string(), "need 0 < dt <= 0.5")?;
        check(self.tau_max > 0.0 && self.tau_max <= 50.0, "tau_max", self.tau_max.to_string(), "need 0 < tau_max <= 50")?;
        check(self.tau >= 0.0 && self.tau <= 50.0, "tau", self.tau.to_string(), "need 0 <= tau <= 50")?;
        check(self.epsilon > 0.0 && self.epsilon < 1.0, "epsilon", self.epsilon.to_string(), "need 0 < epsilon < 1")?;
        check(self.omega_max > 0.0, "omega_max", self.omega_max.to_string(), "must be positive")?;
        check(self.d_omega > 0.0 && self.d_omega <= self.omega_max, "d_omega", self.d_omega.to_string(), "need 0 < d_omega <= omega_max")?;
        check(self.delta > 0.0 && self.delta < 0.5, "delta", self.delta.to_string(), "need 0 < delta < 1/2")?;
        check(self.amplitude.is_finite(), "amplitude", self.amplitude.to_string(), "must be finite")?;
        check(!self.pairs.is_empty(), "pairs", String::new(), "need at least one pair")?;
        check(self.count >= 1, "count", self.count.to_string(), "need at least one sample")?;
        check(self.window > 0.0 && self.window <= 60.0, "window", self.window.to_string(), "need 0 < window <= 60")?;
        check(self.snapshot_every >= 1, "snapshot_every", self.snapshot_every.to_string(), "must be positive")?;
        check(self.jobs >= 1, "jobs", self.jobs.to_string(), "must be positive")?;
        if let Some(kind) = &self.data {
            check(["bump", "gauge", "random", "zero"].contains(&kind.as_str()), "data", kind.clone(), "one of bump, gauge, random, zero")?;
        }
        Ok(())
    }

    pub fn data_or<'a>(&'a self, default: &'a str) -> &'a str {
        self.data.as_deref().unwrap_or(default)
    }

    /// Canonical key=value listing; the manifest hash is taken over it.
    pub fn canonical(&self) -> BTreeMap<&'static str, String> {
        let pairs = self.pairs.iter().map(|&(p, q)| format!("{}:{}", format_exponent(p), format_exponent(q))).collect::<Vec<_>>().join(",");
        let mut m = BTreeMap::new();
        m.insert("d", self.d.to_string());
        m.insert("N", self.n.map(|n| n.to_string()).unwrap_or_else(|| "default".into()));
        m.insert("dt", format!("{}", self.dt));
        m.insert("tau_max", format!("{}", self.tau_max));
        m.insert("tau", format!("{}", self.tau));
        m.insert("epsilon", format!("{}", self.epsilon));
        m.insert("omega_max", format!("{}", self.omega_max));
        m.insert("d_omega", format!("{}", self.d_omega));
        m.insert("delta", format!("{}", self.delta));
        m.insert("amplitude", format!("{}", self.amplitude));
        m.insert("pairs", pairs);
        m.insert("seed", self.seed.to_string());
        m.insert("count", self.count.to_string());
        m.insert("window", format!("{}", self.window));
        m.insert("mode", self.mode.clone());
        m.insert("data", self.data.clone().unwrap_or_else(|| "default".into()));
        m.insert("snapshot_every", self.snapshot_every.to_string());
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_flat_text() {
        let mut c = RunConfig::default();
        c.apply_text("# comment\nd = 5\nN=48  # trailing\npairs=2:6,inf:3\n\n").unwrap();
        assert_eq!(c.d, 5);
        assert_eq!(c.n, Some(48));
        assert_eq!(c.pairs, vec![(2.0, 6.0), (f64::INFINITY, 3.0)]);
        assert!(c.apply_text("d 4").is_err());
        assert!(c.apply_text("colour=blue").is_err());
        assert!(c.apply_text("dt=fast").is_err());
    }

    #[test]
    fn validation_rejects_out_of_range() {
        let mut c = RunConfig::default();
        assert!(c.validate().is_ok());
        c.d = 9;
        assert!(c.validate().is_err());
        let c = RunConfig { delta: 0.7, ..Default::default() };
        assert!(c.validate().is_err());
    }

    #[test]
    fn canonical_form_ignores_output_location() {
        let a = RunConfig::default();
        let b = RunConfig { out_dir: "elsewhere".into(), jobs: 4, ..Default::default() };
        assert_eq!(a.canonical(), b.canonical());
        assert_eq!(a.canonical()["pairs"], "2:8,inf:4");
    }
}
