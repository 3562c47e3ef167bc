//! Flat `key = value` run settings, merged from a file and command-line flags.
//!
//! Recognized keys: `dist`, `dim`, `n`, `t`, `alpha`, `reps`, `pilot_reps`,
//! `seed`, `vertex_sample`, `out`, `json_summary`, `threads`,
//! `no_timestamp`, `k`, `configs`. Lists are comma separated; `#` starts a
//! comment.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use crate::distributions::WeightDistribution;
use crate::error::{Error, Result};

pub const DEFAULT_REPLICATES: usize = 1000;
pub const DEFAULT_PILOT_REPLICATES: usize = 1000;
pub const MIN_PILOT_REPLICATES: usize = 1000;
pub const DEFAULT_SEED: u64 = 1;

/// Raw settings; `None` means "not given here".
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    pub dist: Option<Vec<WeightDistribution>>,
    pub dim: Option<usize>,
    pub n: Option<Vec<usize>>,
    pub t: Option<Vec<f64>>,
    pub alpha: Option<Vec<f64>>,
    pub reps: Option<usize>,
    pub pilot_reps: Option<usize>,
    pub seed: Option<u64>,
    pub vertex_sample: Option<usize>,
    pub out: Option<PathBuf>,
    pub json_summary: Option<PathBuf>,
    pub threads: Option<usize>,
    pub no_timestamp: Option<bool>,
    pub k: Option<Vec<f64>>,
    pub configs: Option<usize>,
}

fn parse_one<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value.trim().parse().map_err(|_| Error::Config(format!("invalid value for `{key}`: `{value}`")))
}

pub fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    let items: Vec<T> = value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_one(key, s))
        .collect::<Result<_>>()?;
    if items.is_empty() {
        return Err(Error::Config(format!("empty list for `{key}`")));
    }
    Ok(items)
}

pub fn parse_distributions(value: &str) -> Result<Vec<WeightDistribution>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<WeightDistribution>().map_err(|e| Error::Config(e.to_string())))
        .collect()
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.trim() {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        other => Err(Error::Config(format!("invalid value for `{key}`: `{other}`"))),
    }
}

impl Settings {
    /// Sets one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "dist" => self.dist = Some(parse_distributions(value)?),
            "dim" => self.dim = Some(parse_one(key, value)?),
            "n" => self.n = Some(parse_list(key, value)?),
            "t" => self.t = Some(parse_list(key, value)?),
            "alpha" => self.alpha = Some(parse_list(key, value)?),
            "reps" => self.reps = Some(parse_one(key, value)?),
            "pilot_reps" => self.pilot_reps = Some(parse_one(key, value)?),
            "seed" => self.seed = Some(parse_one(key, value)?),
            "vertex_sample" => self.vertex_sample = Some(parse_one(key, value)?),
            "out" => self.out = Some(PathBuf::from(value.trim())),
            "json_summary" => self.json_summary = Some(PathBuf::from(value.trim())),
            "threads" => self.threads = Some(parse_one(key, value)?),
            "no_timestamp" => self.no_timestamp = Some(parse_bool(key, value)?),
            "k" => self.k = Some(parse_list(key, value)?),
            "configs" => self.configs = Some(parse_one(key, value)?),
            _ => return Err(Error::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut s = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", i + 1)))?;
            s.set(key.trim().replace('-', "_").as_str(), value)
                .map_err(|e| Error::Config(format!("line {}: {e}", i + 1)))?;
        }
        Ok(s)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io { path: path.display().to_string(), message: e.to_string() })?;
        Self::parse(&text)
    }

    /// `self` with every key present in `top` replaced.
    pub fn overlay(self, top: Settings) -> Settings {
        Settings {
            dist: top.dist.or(self.dist),
            dim: top.dim.or(self.dim),
            n: top.n.or(self.n),
            t: top.t.or(self.t),
            alpha: top.alpha.or(self.alpha),
            reps: top.reps.or(self.reps),
            pilot_reps: top.pilot_reps.or(self.pilot_reps),
            seed: top.seed.or(self.seed),
            vertex_sample: top.vertex_sample.or(self.vertex_sample),
            out: top.out.or(self.out),
            json_summary: top.json_summary.or(self.json_summary),
            threads: top.threads.or(self.threads),
            no_timestamp: top.no_timestamp.or(self.no_timestamp),
            k: top.k.or(self.k),
            configs: top.configs.or(self.configs),
        }
    }

    pub fn single_distribution(&self) -> Result<WeightDistribution> {
        match self.dist.as_deref() {
            None => Ok(WeightDistribution::exponential(1.0)?),
            Some([one]) => Ok(*one),
            Some(_) => Err(Error::Config("expected a single distribution".into())),
        }
    }

    pub fn timestamp(&self) -> bool {
        !self.no_timestamp.unwrap_or(false)
    }

    pub fn dimension(&self) -> usize {
        self.dim.unwrap_or(2)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    pub fn replicates(&self) -> usize {
        self.reps.unwrap_or(DEFAULT_REPLICATES)
    }

    pub fn n_list(&self) -> Result<Vec<usize>> {
        self.n.clone().ok_or_else(|| Error::Config("missing side lengths `n`".into()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeSpec {
    Explicit(Vec<f64>),
    /// `t = α Var̂(T) / n`, capped at 1.
    Alpha(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepConfig {
    #[serde(serialize_with = "serialize_display")]
    pub dist: WeightDistribution,
    pub d: usize,
    pub n_list: Vec<usize>,
    pub times: TimeSpec,
    pub replicates: usize,
    pub pilot_replicates: usize,
    pub vertex_sample: Option<usize>,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub json_summary: Option<PathBuf>,
    pub timestamp: bool,
}

pub(crate) fn serialize_display<T: std::fmt::Display, S: serde::Serializer>(x: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(x)
}

impl SweepConfig {
    pub fn from_settings(s: &Settings) -> Result<Self> {
        let times = match (&s.t, &s.alpha) {
            (Some(t), None) => TimeSpec::Explicit(t.clone()),
            (None, Some(a)) => TimeSpec::Alpha(a.clone()),
            (Some(_), Some(_)) => return Err(Error::Config("give either `t` or `alpha`, not both".into())),
            (None, None) => return Err(Error::Config("missing times: give `t` or `alpha`".into())),
        };
        let config = Self {
            dist: s.single_distribution()?,
            d: s.dimension(),
            n_list: s.n_list()?,
            times,
            replicates: s.replicates(),
            pilot_replicates: s.pilot_reps.unwrap_or(DEFAULT_PILOT_REPLICATES),
            vertex_sample: s.vertex_sample,
            seed: s.seed(),
            out: s.out.clone(),
            json_summary: s.json_summary.clone(),
            timestamp: s.timestamp(),
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_list.is_empty() || self.n_list.contains(&0) {
            return Err(Error::Config("side lengths must be a non-empty list of positive integers".into()));
        }
        if self.d == 0 {
            return Err(Error::Config("dimension must be positive".into()));
        }
        if self.replicates < crate::estimators::MIN_REPLICATES {
            return Err(Error::Config(format!("reps must be at least {}", crate::estimators::MIN_REPLICATES)));
        }
        if self.pilot_replicates < MIN_PILOT_REPLICATES {
            return Err(Error::Config(format!("pilot_reps must be at least {MIN_PILOT_REPLICATES}")));
        }
        match &self.times {
            TimeSpec::Explicit(ts) => {
                if let Some(t) = ts.iter().find(|t| !(0.0..=1.0).contains(*t)) {
                    return Err(Error::Config(format!("time {t} lies outside [0, 1]")));
                }
            }
            TimeSpec::Alpha(alphas) => {
                if let Some(a) = alphas.iter().find(|a| !(a.is_finite() && **a >= 0.0)) {
                    return Err(Error::Config(format!("alpha {a} must be finite and non-negative")));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_file_and_overrides() {
        let file = Settings::parse(
            "# sweep\n dist = exp:1\n n = 4, 8,16\nalpha=0.1,10 # two cells\nreps=200\nno-timestamp = true\n",
        )
        .unwrap();
        assert_eq!(file.n, Some(vec![4, 8, 16]));
        assert_eq!(file.alpha, Some(vec![0.1, 10.0]));
        assert!(!file.timestamp());
        let mut flags = Settings::default();
        flags.set("reps", "300").unwrap();
        let merged = file.overlay(flags);
        assert_eq!(merged.reps, Some(300));
        let c = SweepConfig::from_settings(&merged).unwrap();
        assert_eq!(c.times, TimeSpec::Alpha(vec![0.1, 10.0]));
        assert_eq!(c.replicates, 300);
    }

    #[test]
    fn rejects_bad_settings() {
        assert!(Settings::parse("bogus = 1").is_err());
        assert!(Settings::parse("n 4").is_err());
        assert!(Settings::parse("n = 4,x").is_err());
        assert!(Settings::parse("dist = exp:-1").is_err());
        let s = Settings::parse("n = 4\nt = 0.5, 1.5").unwrap();
        assert!(SweepConfig::from_settings(&s).is_err());
        let s = Settings::parse("n = 4\nt = 0.5\nalpha = 1").unwrap();
        assert!(SweepConfig::from_settings(&s).is_err());
        let s = Settings::parse("n = 4\nalpha = 1\npilot_reps = 999").unwrap();
        assert!(SweepConfig::from_settings(&s).is_err());
        let s = Settings::parse("t = 0.5").unwrap();
        assert!(SweepConfig::from_settings(&s).is_err());
    }

    #[test]
    fn distribution_lists() {
        let ds = parse_distributions("pareto:3, stretched:0.5:1,unif01").unwrap();
        assert_eq!(ds.len(), 3);
        assert_eq!(ds[1].to_string(), "stretched:0.5:1");
    }
}
