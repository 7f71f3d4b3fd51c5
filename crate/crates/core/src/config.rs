//! Plain-text run configuration: UTF-8 `key = value` lines, `#` comments.
//!
//! A `preset` key (if present) is applied first; every other key overrides
//! it. Unknown and repeated keys are rejected. [`RunConfig::to_manifest`]
//! writes the fully resolved configuration back in the same format, so a
//! manifest can be fed straight back in as a config.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::metrics::DEFAULT_EDGE_THRESHOLD;
use crate::objective::Hyperparams;
use crate::solver::SolverConfig;
use crate::synth::{SbmConfig, SynthConfig, WeightDist};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// `n = 64`, `T = 640`, 4 clusters, `p_within = 0.075`, `p_between = 0.7`.
    PaperSynth,
    /// `n = 20`, `T = 200`, rates `{0.5, 0.7, 0.9}`, seeds `0..10`.
    Desk,
}

impl Preset {
    fn parse(s: &str) -> Option<Self> {
        match s {
            "paper-synth" => Some(Preset::PaperSynth),
            "desk" => Some(Preset::Desk),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Preset::PaperSynth => "paper-synth",
            Preset::Desk => "desk",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub preset: Option<Preset>,
    pub n: usize,
    pub t: usize,
    pub clusters: usize,
    pub p_within: f64,
    pub p_between: f64,
    pub weight_dist: WeightDist,
    pub seed: u64,
    pub sampling_rate: f64,
    /// `None` means "derive from T" (see [`Hyperparams::defaults_for`]).
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
    pub tau: Option<f64>,
    pub theta_slack: f64,
    pub w_floor: f64,
    pub rel_tol: f64,
    pub max_iters: usize,
    pub track_objective: bool,
    pub edge_threshold: f64,
    pub rates: Vec<f64>,
    pub seeds: Vec<u64>,
    pub workers: usize,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            preset: None,
            n: 64,
            t: 640,
            clusters: 4,
            p_within: 0.075,
            p_between: 0.7,
            weight_dist: WeightDist::Unit,
            seed: 0,
            sampling_rate: 1.0,
            alpha: None,
            beta: None,
            gamma: None,
            tau: None,
            theta_slack: SolverConfig::DEFAULT_THETA_SLACK,
            w_floor: SolverConfig::DEFAULT_W_FLOOR,
            rel_tol: SolverConfig::DEFAULT_REL_TOL,
            max_iters: SolverConfig::DEFAULT_MAX_ITERS,
            track_objective: true,
            edge_threshold: DEFAULT_EDGE_THRESHOLD,
            rates: vec![1.0],
            seeds: vec![0],
            workers: 1,
            out: None,
        }
    }
}

impl RunConfig {
    pub fn preset(p: Preset) -> Self {
        let base = Self {
            preset: Some(p),
            ..Self::default()
        };
        match p {
            Preset::PaperSynth => base,
            Preset::Desk => Self {
                n: 20,
                t: 200,
                rates: vec![0.5, 0.7, 0.9],
                seeds: (0..10).collect(),
                ..base
            },
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut entries: Vec<(usize, String, String)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!(
                    "line {}: expected key = value, got {line:?}",
                    idx + 1
                ))
            })?;
            let key = k.trim().to_string();
            if entries.iter().any(|(_, existing, _)| *existing == key) {
                return Err(Error::Config(format!(
                    "line {}: duplicate key {key:?}",
                    idx + 1
                )));
            }
            entries.push((idx + 1, key, v.trim().to_string()));
        }

        let mut cfg = match entries.iter().find(|(_, k, _)| k == "preset") {
            Some((line, _, v)) => Self::preset(
                Preset::parse(v)
                    .ok_or_else(|| Error::Config(format!("line {line}: unknown preset {v:?}")))?,
            ),
            None => Self::default(),
        };
        for (line, key, value) in &entries {
            cfg.set(key, value)
                .map_err(|msg| Error::Config(format!("line {line}: {key}: {msg}")))?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn set(&mut self, key: &str, v: &str) -> std::result::Result<(), String> {
        match key {
            "preset" => {}
            "format_version" => {
                let v: u32 = num(v)?;
                if v != FORMAT_VERSION {
                    return Err(format!("unsupported format version {v}"));
                }
            }
            "n" => self.n = num(v)?,
            "t" => self.t = num(v)?,
            "clusters" => self.clusters = num(v)?,
            "p_within" => self.p_within = num(v)?,
            "p_between" => self.p_between = num(v)?,
            "weight_dist" => self.weight_dist = weight_dist(v)?,
            "seed" => self.seed = num(v)?,
            "sampling_rate" => self.sampling_rate = num(v)?,
            "alpha" => self.alpha = Some(num(v)?),
            "beta" => self.beta = Some(num(v)?),
            "gamma" => self.gamma = Some(num(v)?),
            "tau" => self.tau = Some(num(v)?),
            "theta_slack" => self.theta_slack = num(v)?,
            "w_floor" => self.w_floor = num(v)?,
            "rel_tol" => self.rel_tol = num(v)?,
            "max_iters" => self.max_iters = num(v)?,
            "track_objective" => self.track_objective = num(v)?,
            "edge_threshold" => self.edge_threshold = num(v)?,
            "rates" => self.rates = list(v)?,
            "seeds" => self.seeds = seeds(v)?,
            "workers" => self.workers = num(v)?,
            "out" => self.out = Some(PathBuf::from(v)),
            _ => return Err("unknown key".into()),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.sbm(self.seed).validate()?;
        if self.t == 0 {
            return Err(Error::Config("t must be >= 1".into()));
        }
        if self.rates.is_empty() || self.seeds.is_empty() {
            return Err(Error::Config("rates and seeds must be non-empty".into()));
        }
        for &r in self
            .rates
            .iter()
            .chain(std::iter::once(&self.sampling_rate))
        {
            if !(0.0..=1.0).contains(&r) {
                return Err(Error::Config(format!("sampling rate {r} not in [0, 1]")));
            }
        }
        if self.workers == 0 {
            return Err(Error::Config("workers must be >= 1".into()));
        }
        if !(self.edge_threshold >= 0.0) {
            return Err(Error::Config("edge_threshold must be >= 0".into()));
        }
        self.solver(self.t).validate()
    }

    pub fn sbm(&self, seed: u64) -> SbmConfig {
        SbmConfig {
            n: self.n,
            clusters: self.clusters,
            p_within: self.p_within,
            p_between: self.p_between,
            weight_dist: self.weight_dist,
            seed,
        }
    }

    pub fn synth(&self, seed: u64, sampling_rate: f64) -> SynthConfig {
        SynthConfig {
            sbm: self.sbm(seed),
            t: self.t,
            sampling_rate,
        }
    }

    /// Hyper-parameters for a signal with `t` time stamps.
    pub fn hyperparams(&self, t: usize) -> Hyperparams {
        let d = Hyperparams::defaults_for(t);
        Hyperparams {
            alpha: self.alpha.unwrap_or(d.alpha),
            beta: self.beta.unwrap_or(d.beta),
            gamma: self.gamma.unwrap_or(d.gamma),
            tau: self.tau.unwrap_or(d.tau),
        }
    }

    pub fn solver(&self, t: usize) -> SolverConfig {
        SolverConfig {
            hp: self.hyperparams(t),
            theta_slack: self.theta_slack,
            w_floor: self.w_floor,
            rel_tol: self.rel_tol,
            max_iters: self.max_iters,
            track_objective: self.track_objective,
        }
    }

    /// Every effective parameter as `key = value` lines, hyper-parameters
    /// resolved for `t_effective` time stamps.
    pub fn to_manifest(&self, t_effective: usize) -> String {
        let hp = self.hyperparams(t_effective);
        let mut s = String::new();
        let _ = writeln!(s, "# graphfill manifest");
        let _ = writeln!(s, "format_version = {FORMAT_VERSION}");
        if let Some(p) = self.preset {
            let _ = writeln!(s, "preset = {}", p.name());
        }
        let kv: [(&str, String); 22] = [
            ("n", self.n.to_string()),
            ("t", self.t.to_string()),
            ("clusters", self.clusters.to_string()),
            ("p_within", self.p_within.to_string()),
            ("p_between", self.p_between.to_string()),
            ("weight_dist", weight_dist_name(&self.weight_dist)),
            ("seed", self.seed.to_string()),
            ("sampling_rate", self.sampling_rate.to_string()),
            ("alpha", hp.alpha.to_string()),
            ("beta", hp.beta.to_string()),
            ("gamma", hp.gamma.to_string()),
            ("tau", hp.tau.to_string()),
            ("theta_slack", self.theta_slack.to_string()),
            ("w_floor", self.w_floor.to_string()),
            ("rel_tol", self.rel_tol.to_string()),
            ("max_iters", self.max_iters.to_string()),
            ("track_objective", self.track_objective.to_string()),
            ("edge_threshold", self.edge_threshold.to_string()),
            ("rates", join(&self.rates)),
            ("seeds", join(&self.seeds)),
            ("workers", self.workers.to_string()),
            (
                "rng",
                "chacha20 seed_from_u64 streams graph=1 signal=2 mask=3".into(),
            ),
        ];
        for (k, v) in kv {
            if k == "rng" {
                let _ = writeln!(s, "# {k}: {v}");
            } else {
                let _ = writeln!(s, "{k} = {v}");
            }
        }
        s
    }
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

fn num<T: std::str::FromStr>(v: &str) -> std::result::Result<T, String> {
    v.parse().map_err(|_| format!("invalid value {v:?}"))
}

fn list(v: &str) -> std::result::Result<Vec<f64>, String> {
    v.split(',').map(|s| num(s.trim())).collect()
}

/// `0,3,7` or a half-open range `0..10`.
fn seeds(v: &str) -> std::result::Result<Vec<u64>, String> {
    if let Some((a, b)) = v.split_once("..") {
        let (a, b): (u64, u64) = (num(a.trim())?, num(b.trim())?);
        if b <= a {
            return Err(format!("empty seed range {v:?}"));
        }
        return Ok((a..b).collect());
    }
    v.split(',').map(|s| num(s.trim())).collect()
}

fn weight_dist(v: &str) -> std::result::Result<WeightDist, String> {
    if v == "unit" {
        return Ok(WeightDist::Unit);
    }
    let inner = v
        .strip_prefix("uniform(")
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(|| format!("expected `unit` or `uniform(a,b)`, got {v:?}"))?;
    let (a, b) = inner
        .split_once(',')
        .ok_or_else(|| format!("expected `uniform(a,b)`, got {v:?}"))?;
    Ok(WeightDist::Uniform {
        lo: num(a.trim())?,
        hi: num(b.trim())?,
    })
}

fn weight_dist_name(w: &WeightDist) -> String {
    match w {
        WeightDist::Unit => "unit".into(),
        WeightDist::Uniform { lo, hi } => format!("uniform({lo},{hi})"),
    }
}
