//! Flat `section.key=value` experiment configuration.
//!
//! Values come from an optional file and are then overridden by command-line
//! flags. Unknown keys and unparsable values are errors.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use polar_harq::{Algorithm, DecoderConfig, TrialPolicy};

/// Every key the tool understands, with its default (if any).
const KEYS: &[(&str, Option<&str>)] = &[
    ("mother.n", None),
    ("mother.k", None),
    ("mother.crc_len", Some("16")),
    ("mother.eps", Some("0.5")),
    ("subset.m", None),
    ("subset.algorithm", Some("greedy")),
    ("subset.x", None),
    ("subset.extra_offsets", None),
    ("subset.eps", None),
    ("subset.pattern", None),
    ("decoder.l", Some("8")),
    ("decoder.llr_clip", None),
    ("channel.snr", None),
    ("channel.seed", Some("1")),
    ("policy.min_trials", Some("0")),
    ("policy.min_errors", Some("100")),
    ("policy.max_trials", Some("1000000")),
    ("policy.batch", Some("1000")),
    ("equiv.points", Some("100")),
    ("equiv.max_n", Some("32")),
    ("equiv.eps", Some("0.2,0.5,0.8")),
    ("equiv.n", None),
    ("equiv.subset", None),
    ("equiv.x", None),
    ("equiv.exhaustive", Some("false")),
];

/// Raw key-value settings before interpretation.
#[derive(Debug, Clone, Default)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

impl Settings {
    pub fn parse(text: &str) -> Result<Self> {
        let mut s = Settings::default();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {}: expected key=value, got {line:?}", no + 1))?;
            s.set(k.trim(), v.trim()).with_context(|| format!("line {}", no + 1))?;
        }
        Ok(s)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        if !KEYS.iter().any(|(k, _)| *k == key) {
            bail!("unknown config key {key:?}");
        }
        self.values.insert(key.to_string(), value.to_string());
        Ok(())
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.values
            .get(key)
            .map(String::as_str)
            .or_else(|| KEYS.iter().find(|(k, _)| *k == key).and_then(|(_, d)| *d))
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        self.raw(key)
            .map(|v| v.parse::<T>().map_err(|e| anyhow!("{key}={v}: {e}")))
            .transpose()
    }

    fn require<T: FromStr>(&self, key: &str) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        self.get(key)?.ok_or_else(|| anyhow!("missing required setting {key}"))
    }

    fn list<T: FromStr>(&self, key: &str) -> Result<Vec<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.raw(key) {
            None => Ok(Vec::new()),
            Some(v) => v
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<T>().map_err(|e| anyhow!("{key}: {s:?}: {e}")))
                .collect(),
        }
    }

    /// `key=value` for every set or defaulted key, in key order.
    pub fn resolved_lines(&self) -> Vec<String> {
        let mut out: Vec<String> = KEYS
            .iter()
            .filter_map(|(k, _)| self.raw(k).map(|v| format!("{k}={v}")))
            .collect();
        out.sort();
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MotherSpec {
    pub n: u32,
    pub k: usize,
    pub crc_len: usize,
    pub eps: f64,
}

impl MotherSpec {
    pub fn len(&self) -> usize {
        1 << self.n
    }

    pub fn build(&self) -> Result<polar_harq::MotherCode> {
        polar_harq::MotherCode::design(self.n, self.k, self.crc_len, self.eps).with_context(|| {
            format!(
                "designing mother code n={} K={} crc_len={}",
                self.n, self.k, self.crc_len
            )
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubsetSpec {
    pub m: usize,
    pub algorithm: Algorithm,
    pub x: Option<usize>,
    pub extra_offsets: Vec<usize>,
    pub eps: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquivSpec {
    pub points: usize,
    pub max_n: usize,
    pub eps: Vec<f64>,
    pub single: Option<(usize, Vec<usize>, usize)>,
    pub exhaustive: bool,
}

/// Interpreted, cross-checked settings.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub mother: Option<MotherSpec>,
    pub subset: Option<SubsetSpec>,
    pub pattern_file: Option<PathBuf>,
    pub decoder: DecoderConfig,
    pub snr: Vec<f64>,
    pub seed: u64,
    pub policy: TrialPolicy,
    pub equiv: EquivSpec,
    pub resolved: Vec<String>,
}

impl ExperimentConfig {
    pub fn from_settings(s: &Settings) -> Result<Self> {
        let mother = match (s.get::<u32>("mother.n")?, s.get::<usize>("mother.k")?) {
            (Some(n), Some(k)) => Some(MotherSpec {
                n,
                k,
                crc_len: s.require("mother.crc_len")?,
                eps: s.require("mother.eps")?,
            }),
            (None, None) => None,
            _ => bail!("mother.n and mother.k must be given together"),
        };
        if let Some(m) = &mother {
            if m.n == 0 || m.n > 24 {
                bail!("mother.n={} outside [1, 24]", m.n);
            }
            if !(m.eps > 0.0 && m.eps < 1.0) {
                bail!("mother.eps={} outside (0, 1)", m.eps);
            }
            if m.k + m.crc_len >= m.len() {
                bail!(
                    "mother.k + mother.crc_len = {} must be below N = {}",
                    m.k + m.crc_len,
                    m.len()
                );
            }
        }

        let subset = match s.get::<usize>("subset.m")? {
            None => None,
            Some(m) => {
                let algorithm: Algorithm = s.require::<String>("subset.algorithm")?.parse()?;
                let spec = SubsetSpec {
                    m,
                    algorithm,
                    x: s.get("subset.x")?,
                    extra_offsets: s.list("subset.extra_offsets")?,
                    eps: s.get("subset.eps")?,
                };
                let mspec = mother.ok_or_else(|| anyhow!("subset.m needs mother.n and mother.k"))?;
                validate_subset(&mspec, &spec)?;
                Some(spec)
            }
        };

        let list_size: usize = s.require("decoder.l")?;
        if list_size == 0 {
            bail!("decoder.l must be at least 1");
        }
        let llr_clip: Option<f64> = s.get("decoder.llr_clip")?;
        if let Some(c) = llr_clip {
            if c.is_nan() || c <= 0.0 {
                bail!("decoder.llr_clip must be positive");
            }
        }

        let policy = TrialPolicy {
            min_trials: s.require("policy.min_trials")?,
            min_errors: s.require("policy.min_errors")?,
            max_trials: s.require("policy.max_trials")?,
            batch: s.require("policy.batch")?,
        };
        if policy.max_trials == 0 || policy.batch == 0 {
            bail!("policy.max_trials and policy.batch must be at least 1");
        }

        let single = match (
            s.get::<usize>("equiv.n")?,
            s.raw("equiv.subset"),
            s.get::<usize>("equiv.x")?,
        ) {
            (None, None, None) => None,
            (Some(n), Some(_), Some(x)) => Some((n, s.list("equiv.subset")?, x)),
            _ => bail!("equiv.n, equiv.subset and equiv.x must be given together"),
        };
        let equiv = EquivSpec {
            points: s.require("equiv.points")?,
            max_n: s.require("equiv.max_n")?,
            eps: s.list("equiv.eps")?,
            single,
            exhaustive: s.require("equiv.exhaustive")?,
        };
        if equiv.eps.is_empty() || equiv.eps.iter().any(|e| !(0.0..=1.0).contains(e)) {
            bail!("equiv.eps needs values in [0, 1]");
        }
        if !equiv.max_n.is_power_of_two() || equiv.max_n < 2 {
            bail!("equiv.max_n must be a power of two >= 2");
        }

        Ok(ExperimentConfig {
            mother,
            subset,
            pattern_file: s.get::<String>("subset.pattern")?.map(PathBuf::from),
            decoder: DecoderConfig { list_size, llr_clip },
            snr: s.list("channel.snr")?,
            seed: s.require("channel.seed")?,
            policy,
            equiv,
            resolved: s.resolved_lines(),
        })
    }

    pub fn mother(&self) -> Result<MotherSpec> {
        self.mother.ok_or_else(|| anyhow!("mother.n and mother.k are required"))
    }

    pub fn snr(&self) -> Result<&[f64]> {
        if self.snr.is_empty() {
            bail!("channel.snr is required (comma-separated Eb/N0 values in dB)");
        }
        Ok(&self.snr)
    }
}

fn validate_subset(mother: &MotherSpec, s: &SubsetSpec) -> Result<()> {
    let len = mother.len();
    let info = mother.k + mother.crc_len;
    if s.m < info || s.m > len {
        bail!("subset.m={} outside [K + crc_len, N] = [{info}, {len}]", s.m);
    }
    for &off in s.x.iter().chain(&s.extra_offsets) {
        if off == 0 || off > len {
            bail!("offset {off} outside [1, {len}]");
        }
    }
    if let Some(e) = s.eps {
        if !(e > 0.0 && e <= 1.0) {
            bail!("subset.eps={e} outside (0, 1]");
        }
    }
    if s.algorithm == Algorithm::Symmetric {
        match s.x {
            None => bail!("symmetric construction needs subset.x"),
            Some(1) => bail!("subset.x=1 is the identity; symmetric construction needs x > 1"),
            _ => {}
        }
        if 2 * s.m < len {
            bail!("symmetric construction needs subset.m >= N/2 = {}", len / 2);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(text: &str) -> Result<ExperimentConfig> {
        ExperimentConfig::from_settings(&Settings::parse(text)?)
    }

    #[test]
    fn defaults_fill_in() {
        let c = cfg("mother.n=10\nmother.k=256\n").unwrap();
        assert_eq!(c.mother.unwrap().crc_len, 16);
        assert_eq!(c.decoder.list_size, 8);
        assert_eq!(c.policy.min_errors, 100);
        assert!(c.subset.is_none());
        assert!(c.resolved.contains(&"mother.n=10".to_string()));
    }

    #[test]
    fn comments_and_spacing() {
        let c = cfg("# experiment\n mother.n = 5 \n\nmother.k=4\nchannel.snr=1, 2,3.5\n").unwrap();
        assert_eq!(c.snr, vec![1.0, 2.0, 3.5]);
    }

    #[test]
    fn malformed_inputs() {
        assert!(cfg("mother.n 5\n").is_err());
        assert!(cfg("mother.bogus=5\n").is_err());
        assert!(cfg("mother.n=five\nmother.k=2\n").is_err());
        assert!(cfg("mother.n=5\n").is_err());
        assert!(cfg("mother.n=3\nmother.k=8\n").is_err());
        assert!(cfg("decoder.l=0\n").is_err());
    }

    #[test]
    fn subset_cross_checks() {
        let base = "mother.n=5\nmother.k=4\nmother.crc_len=8\n";
        assert!(cfg(&format!("{base}subset.m=20\n")).is_ok());
        assert!(cfg(&format!("{base}subset.m=8\n")).is_err());
        assert!(cfg(&format!("{base}subset.m=33\n")).is_err());
        assert!(cfg(&format!("{base}subset.m=20\nsubset.algorithm=symmetric\n")).is_err());
        assert!(cfg(&format!("{base}subset.m=20\nsubset.algorithm=symmetric\nsubset.x=1\n")).is_err());
        assert!(cfg(&format!("{base}subset.m=14\nsubset.algorithm=symmetric\nsubset.x=32\n")).is_err());
        assert!(cfg(&format!("{base}subset.m=20\nsubset.algorithm=symmetric\nsubset.x=32\n")).is_ok());
        assert!(cfg(&format!("{base}subset.m=20\nsubset.algorithm=magic\n")).is_err());
        assert!(cfg("subset.m=4\n").is_err());
    }
}
