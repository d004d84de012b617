//! Experiment configuration: defaults, a flat `key = value` file format and
//! command-line overrides.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::channel::{ChannelParams, SfCountDistribution};
use crate::{Error, Result};

/// Detector evaluated by the harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DetectorKind {
    Proposed,
    Baseline,
    /// Two-threshold reading with the true failure rows and columns.
    Oracle,
}

impl DetectorKind {
    pub fn label(self) -> &'static str {
        match self {
            DetectorKind::Proposed => "proposed",
            DetectorKind::Baseline => "baseline",
            DetectorKind::Oracle => "oracle",
        }
    }
}

impl fmt::Display for DetectorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Parses `proposed`, `baseline` or `both`.
pub fn parse_detector_selection(s: &str) -> Result<Vec<DetectorKind>> {
    match s.trim() {
        "proposed" => Ok(vec![DetectorKind::Proposed]),
        "baseline" => Ok(vec![DetectorKind::Baseline]),
        "both" => Ok(vec![DetectorKind::Proposed, DetectorKind::Baseline]),
        other => Err(Error::Config(format!(
            "detector must be proposed, baseline or both, got '{other}'"
        ))),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub n: usize,
    pub q: f64,
    pub r0: f64,
    pub r1: f64,
    pub rs: f64,
    pub sigmas: Vec<f64>,
    pub dist: SfCountDistribution,
    pub trials: u64,
    pub detectors: Vec<DetectorKind>,
    /// Also run the genie-aided reading.
    pub oracle_sf: bool,
    pub seed: u64,
    pub out: Option<PathBuf>,
    /// Record wall time in the output; off by default so output is reproducible.
    pub timing: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let p = ChannelParams::default();
        ExperimentConfig {
            n: 128,
            q: p.q,
            r0: p.r0,
            r1: p.r1,
            rs: p.rs,
            sigmas: (1..=14).map(|k| 30.0 * k as f64).collect(),
            dist: SfCountDistribution::PA,
            trials: 1000,
            detectors: vec![DetectorKind::Proposed, DetectorKind::Baseline],
            oracle_sf: false,
            seed: 1,
            out: None,
            timing: false,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidDimension(self.n));
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.sigmas.is_empty() {
            return Err(Error::Config("sigma list is empty".into()));
        }
        if self.detectors.is_empty() && !self.oracle_sf {
            return Err(Error::Config("no detector selected".into()));
        }
        self.dist.validate()?;
        for &s in &self.sigmas {
            self.channel(s)?;
        }
        Ok(())
    }

    /// Channel parameters at noise level `sigma`.
    pub fn channel(&self, sigma: f64) -> Result<ChannelParams> {
        ChannelParams::new(self.r0, self.r1, self.rs, sigma, self.q)
    }

    /// Detectors in output order, with the oracle appended when requested.
    pub fn detector_list(&self) -> Vec<DetectorKind> {
        let mut v = self.detectors.clone();
        if self.oracle_sf && !v.contains(&DetectorKind::Oracle) {
            v.push(DetectorKind::Oracle);
        }
        v.sort();
        v.dedup();
        v
    }

    /// Applies overrides in order: later sources win.
    pub fn merged(sources: &[&ConfigOverrides]) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        for o in sources {
            o.apply(&mut cfg);
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Optional settings from one source (file or flags).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigOverrides {
    pub n: Option<usize>,
    pub q: Option<f64>,
    pub r0: Option<f64>,
    pub r1: Option<f64>,
    pub rs: Option<f64>,
    pub sigmas: Option<Vec<f64>>,
    pub dist: Option<SfCountDistribution>,
    pub trials: Option<u64>,
    pub detectors: Option<Vec<DetectorKind>>,
    pub oracle_sf: Option<bool>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub timing: Option<bool>,
}

impl ConfigOverrides {
    fn apply(&self, cfg: &mut ExperimentConfig) {
        macro_rules! take {
            ($($f:ident),*) => {$(
                if let Some(v) = &self.$f {
                    cfg.$f = v.clone();
                }
            )*};
        }
        take!(n, q, r0, r1, rs, sigmas, dist, trials, detectors, oracle_sf, seed, timing);
        if let Some(p) = &self.out {
            cfg.out = Some(p.clone());
        }
    }

    /// Parses the flat text format: one `key = value` per line, `#` starts a
    /// comment, blank lines are ignored and unknown keys are errors.
    pub fn parse_text(text: &str) -> Result<Self> {
        let mut o = ConfigOverrides::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected key = value, got '{line}'", lineno + 1))
            })?;
            let (key, value) = (key.trim(), value.trim());
            let at = |e: Error| Error::Config(format!("line {}: {e}", lineno + 1));
            match key {
                "n" => o.n = Some(parse_num(key, value).map_err(at)?),
                "q" => o.q = Some(parse_num(key, value).map_err(at)?),
                "r0" => o.r0 = Some(parse_num(key, value).map_err(at)?),
                "r1" => o.r1 = Some(parse_num(key, value).map_err(at)?),
                "rs" => o.rs = Some(parse_num(key, value).map_err(at)?),
                "sigma" => o.sigmas = Some(parse_list(key, value).map_err(at)?),
                "sf_dist" => o.dist = Some(parse_dist(value).map_err(at)?),
                "trials" => o.trials = Some(parse_num(key, value).map_err(at)?),
                "detector" => o.detectors = Some(parse_detector_selection(value).map_err(at)?),
                "oracle_sf" => o.oracle_sf = Some(parse_num(key, value).map_err(at)?),
                "seed" => o.seed = Some(parse_num(key, value).map_err(at)?),
                "out" => o.out = Some(PathBuf::from(value)),
                "timing" => o.timing = Some(parse_num(key, value).map_err(at)?),
                other => return Err(Error::Config(format!("line {}: unknown key '{other}'", lineno + 1))),
            }
        }
        Ok(o)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse_text(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("malformed value for {key}: '{value}'")))
}

/// Comma-separated numbers.
pub fn parse_list(key: &str, value: &str) -> Result<Vec<f64>> {
    value
        .split(',')
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .map(|s| parse_num(key, s))
        .collect()
}

/// `p0,p1,p2`, which must sum to 1.
pub fn parse_dist(value: &str) -> Result<SfCountDistribution> {
    let v = parse_list("sf_dist", value)?;
    let [p0, p1, p2] = v[..] else {
        return Err(Error::Config(format!(
            "sf_dist needs three probabilities, got {}",
            v.len()
        )));
    };
    SfCountDistribution::new(p0, p1, p2).map_err(|e| Error::Config(e.to_string()))
}
