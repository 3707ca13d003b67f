//! Run configuration: a plain-text `key = value` file.
//!
//! Lines are `key = value`; `#` starts a comment; blank lines are ignored.
//! Every key is optional and falls back to [`RunConfig::default`]. Numbers
//! may be written as fractions (`1/9000`). Axis partitions are written as
//!
//! ```text
//! partition_x = uniform 20              # [0, 1] in 20 cells
//! partition_x = graded 0 5 3/16 12 13/16 5 1
//! ```
//!
//! where `graded` alternates breakpoints and cell counts.

use std::fmt::Write as _;
use std::path::PathBuf;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::mesh::AxisPartition;
use crate::postprocess::ProfileSection;
use crate::stepper::StepperConfig;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("key `{0}` given twice")]
    Duplicate(String),
    #[error("bad value for `{key}`: {msg}")]
    Value { key: String, msg: String },
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

/// All keys in canonical order.
pub const KEYS: &[&str] = &[
    "ra",
    "pr",
    "partition_x",
    "partition_y",
    "partition_z",
    "dt",
    "substeps",
    "steady_eps",
    "max_steps",
    "cg_tol",
    "cg_max_iter",
    "pcg_tol",
    "pcg_max_iter",
    "mean_eps",
    "theta_ref",
    "profile_line",
    "output_dir",
    "snapshot_every",
    "checkpoint_every",
    "restart",
];

/// Keys that determine the computed trajectory; only these enter the hash.
const HASHED: &[&str] = &[
    "ra",
    "pr",
    "partition_x",
    "partition_y",
    "partition_z",
    "dt",
    "substeps",
    "cg_tol",
    "cg_max_iter",
    "pcg_tol",
    "pcg_max_iter",
    "mean_eps",
    "theta_ref",
];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub ra: f64,
    pub pr: f64,
    pub partitions: [AxisPartition; 3],
    pub dt: f64,
    /// Transport substeps `Q` per step.
    pub substeps: usize,
    /// Steady-state threshold on the relative step change.
    pub steady_eps: f64,
    pub max_steps: u64,
    pub cg_tol: f64,
    pub cg_max_iter: usize,
    pub pcg_tol: f64,
    pub pcg_max_iter: usize,
    pub mean_eps: f64,
    /// Temperature at which buoyancy vanishes; only the pressure gauge
    /// depends on it in the continuum.
    pub theta_ref: f64,
    pub profile_line: ProfileSection,
    pub output_dir: PathBuf,
    /// Snapshot every this many steps, 0 for the final state only.
    pub snapshot_every: u64,
    /// Checkpoint every this many steps, 0 for never.
    pub checkpoint_every: u64,
    pub restart: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let p = AxisPartition::uniform(1.0, 10).expect("valid");
        Self {
            ra: 1e3,
            pr: 0.71,
            partitions: [p.clone(), p.clone(), p],
            dt: 1e-3,
            substeps: 10,
            steady_eps: 1e-5,
            max_steps: 100_000,
            cg_tol: 1e-8,
            cg_max_iter: 5000,
            pcg_tol: 1e-8,
            pcg_max_iter: 500,
            mean_eps: 1e-8,
            theta_ref: 0.5,
            profile_line: ProfileSection::MidHeightLine,
            output_dir: PathBuf::from("natconv-out"),
            snapshot_every: 0,
            checkpoint_every: 0,
            restart: None,
        }
    }
}

/// Parses a number, allowing `a/b`.
pub fn parse_number(s: &str) -> Option<f64> {
    match s.split_once('/') {
        Some((a, b)) => Some(a.trim().parse::<f64>().ok()? / b.trim().parse::<f64>().ok()?),
        None => s.trim().parse().ok(),
    }
}

pub fn parse_partition(s: &str) -> Result<AxisPartition, String> {
    let words: Vec<&str> = s.split_whitespace().collect();
    let count = |w: &str| w.parse::<usize>().map_err(|_| format!("`{w}` is not a cell count"));
    let num = |w: &str| parse_number(w).ok_or_else(|| format!("`{w}` is not a number"));
    let part = match words.as_slice() {
        ["uniform", n] => AxisPartition::uniform(1.0, count(n)?),
        ["uniform", n, len] => AxisPartition::uniform(num(len)?, count(n)?),
        ["graded", rest @ ..] if rest.len() >= 3 && rest.len() % 2 == 1 => {
            let bps = rest.iter().step_by(2).map(|w| num(w)).collect::<Result<Vec<_>, _>>()?;
            let divs = rest
                .iter()
                .skip(1)
                .step_by(2)
                .map(|w| count(w))
                .collect::<Result<Vec<_>, _>>()?;
            AxisPartition::new(bps, divs)
        }
        _ => return Err("expected `uniform N [LENGTH]` or `graded b0 n0 b1 ... bk`".into()),
    };
    part.map_err(|e| e.to_string())
}

pub fn format_partition(p: &AxisPartition) -> String {
    let b = p.breakpoints();
    if b.len() == 2 {
        if b[1] == 1.0 {
            format!("uniform {}", p.divisions()[0])
        } else {
            format!("uniform {} {:?}", p.divisions()[0], b[1])
        }
    } else {
        let mut s = String::from("graded");
        for (i, x) in b.iter().enumerate() {
            write!(s, " {x:?}").unwrap();
            if let Some(n) = p.divisions().get(i) {
                write!(s, " {n}").unwrap();
            }
        }
        s
    }
}

impl RunConfig {
    /// Parses a config file body on top of the defaults.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        let mut seen = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line: i + 1,
                msg: format!("expected `key = value`, got `{line}`"),
            })?;
            let k = k.trim();
            if seen.contains(&k) {
                return Err(ConfigError::Duplicate(k.into()));
            }
            seen.push(k);
            cfg.set(k, v.trim())?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Sets one key from its text form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let err = |msg: String| ConfigError::Value { key: key.into(), msg };
        let float = || parse_number(value).ok_or_else(|| err(format!("`{value}` is not a number")));
        let int = || {
            value
                .parse::<u64>()
                .map_err(|_| err(format!("`{value}` is not a non-negative integer")))
        };
        match key {
            "ra" => self.ra = float()?,
            "pr" => self.pr = float()?,
            "partition_x" => self.partitions[0] = parse_partition(value).map_err(err)?,
            "partition_y" => self.partitions[1] = parse_partition(value).map_err(err)?,
            "partition_z" => self.partitions[2] = parse_partition(value).map_err(err)?,
            "dt" => self.dt = float()?,
            "substeps" => self.substeps = int()? as usize,
            "steady_eps" => self.steady_eps = float()?,
            "max_steps" => self.max_steps = int()?,
            "cg_tol" => self.cg_tol = float()?,
            "cg_max_iter" => self.cg_max_iter = int()? as usize,
            "pcg_tol" => self.pcg_tol = float()?,
            "pcg_max_iter" => self.pcg_max_iter = int()? as usize,
            "mean_eps" => self.mean_eps = float()?,
            "theta_ref" => self.theta_ref = float()?,
            "profile_line" => {
                self.profile_line =
                    ProfileSection::parse(value).ok_or_else(|| err("expected `y-mid` or `x-mid`".into()))?
            }
            "output_dir" => self.output_dir = PathBuf::from(value),
            "snapshot_every" => self.snapshot_every = int()?,
            "checkpoint_every" => self.checkpoint_every = int()?,
            "restart" => self.restart = (!value.is_empty() && value != "none").then(|| PathBuf::from(value)),
            _ => return Err(ConfigError::UnknownKey(key.into())),
        }
        Ok(())
    }

    /// Text form of one key; `parse` of it restores the value exactly.
    pub fn get(&self, key: &str) -> Option<String> {
        Some(match key {
            "ra" => format!("{:?}", self.ra),
            "pr" => format!("{:?}", self.pr),
            "partition_x" => format_partition(&self.partitions[0]),
            "partition_y" => format_partition(&self.partitions[1]),
            "partition_z" => format_partition(&self.partitions[2]),
            "dt" => format!("{:?}", self.dt),
            "substeps" => self.substeps.to_string(),
            "steady_eps" => format!("{:?}", self.steady_eps),
            "max_steps" => self.max_steps.to_string(),
            "cg_tol" => format!("{:?}", self.cg_tol),
            "cg_max_iter" => self.cg_max_iter.to_string(),
            "pcg_tol" => format!("{:?}", self.pcg_tol),
            "pcg_max_iter" => self.pcg_max_iter.to_string(),
            "mean_eps" => format!("{:?}", self.mean_eps),
            "theta_ref" => format!("{:?}", self.theta_ref),
            "profile_line" => self.profile_line.as_str().into(),
            "output_dir" => self.output_dir.display().to_string(),
            "snapshot_every" => self.snapshot_every.to_string(),
            "checkpoint_every" => self.checkpoint_every.to_string(),
            "restart" => self.restart.as_ref().map_or("none".into(), |p| p.display().to_string()),
            _ => return None,
        })
    }

    pub fn serialize(&self) -> String {
        KEYS.iter()
            .map(|k| format!("{k} = {}\n", self.get(k).unwrap()))
            .collect()
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: &str| Err(ConfigError::Invalid(m.into()));
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad("dt must be positive");
        }
        if !(self.steady_eps > 0.0) {
            return bad("steady_eps must be positive");
        }
        if !(self.ra >= 0.0 && self.ra.is_finite()) {
            return bad("ra must be non-negative");
        }
        if !(self.pr > 0.0 && self.pr.is_finite()) {
            return bad("pr must be positive");
        }
        if self.substeps == 0 {
            return bad("substeps must be at least 1");
        }
        if !(self.cg_tol > 0.0 && self.pcg_tol > 0.0 && self.mean_eps > 0.0) {
            return bad("solver tolerances must be positive");
        }
        if !self.theta_ref.is_finite() {
            return bad("theta_ref must be finite");
        }
        if self.cg_max_iter == 0 || self.pcg_max_iter == 0 {
            return bad("iteration limits must be at least 1");
        }
        Ok(())
    }

    /// Hex SHA-256 of the trajectory-defining keys.
    pub fn hash(&self) -> String {
        let canon: String = HASHED
            .iter()
            .map(|k| format!("{k} = {}\n", self.get(k).unwrap()))
            .collect();
        Sha256::digest(canon.as_bytes()).iter().fold(String::new(), |mut s, b| {
            write!(s, "{b:02x}").unwrap();
            s
        })
    }

    pub fn stepper_config(&self) -> StepperConfig {
        StepperConfig {
            ra: self.ra,
            pr: self.pr,
            dt: self.dt,
            substeps: self.substeps,
            cg_tol: self.cg_tol,
            cg_max_iter: self.cg_max_iter,
            pcg_tol: self.pcg_tol,
            pcg_max_iter: self.pcg_max_iter,
            mean_eps: self.mean_eps,
            theta_ref: self.theta_ref,
        }
    }
}

/// Coarse partition whose refinement is the 45-node graded axis.
fn graded_full() -> AxisPartition {
    AxisPartition::boundary_layer_graded()
}

/// A coarser partition with the same breakpoints: 11 coarse cells, 23 fine
/// nodes.
fn graded_desk() -> AxisPartition {
    AxisPartition::new(vec![0.0, 3.0 / 16.0, 13.0 / 16.0, 1.0], vec![3, 5, 3]).expect("valid")
}

/// Names of the built-in configurations.
pub const PRESETS: &[&str] = &[
    "paper-ra1e3",
    "paper-ra1e4",
    "paper-ra1e5",
    "paper-ra1e6",
    "ra1e3-desk",
    "ra1e5-desk",
    "conduction",
];

pub fn preset(name: &str) -> Result<RunConfig, ConfigError> {
    let uni = |n| AxisPartition::uniform(1.0, n).expect("valid");
    let all = |p: AxisPartition| [p.clone(), p.clone(), p];
    let base = RunConfig::default();
    let cfg = match name {
        "paper-ra1e3" | "paper-ra1e4" => RunConfig {
            ra: if name.ends_with("1e3") { 1e3 } else { 1e4 },
            partitions: all(uni(20)),
            dt: 1.0 / 4000.0,
            ..base
        },
        "paper-ra1e5" | "paper-ra1e6" => RunConfig {
            ra: if name.ends_with("1e5") { 1e5 } else { 1e6 },
            partitions: all(graded_full()),
            dt: 1.0 / 9000.0,
            ..base
        },
        "ra1e3-desk" => RunConfig {
            ra: 1e3,
            partitions: all(uni(10)),
            dt: 1.0 / 1000.0,
            ..base
        },
        "ra1e5-desk" => RunConfig {
            ra: 1e5,
            partitions: all(graded_desk()),
            dt: 1.0 / 9000.0,
            max_steps: 2000,
            ..base
        },
        "conduction" => RunConfig {
            ra: 0.0,
            partitions: all(uni(10)),
            dt: 0.05,
            steady_eps: 1e-10,
            cg_tol: 1e-12,
            ..base
        },
        _ => return Err(ConfigError::UnknownPreset(name.into())),
    };
    Ok(cfg)
}
