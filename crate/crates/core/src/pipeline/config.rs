use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::fragmenter::Strategy;

use super::PipelineError;

/// A count given either absolutely or as a percentage of the workload size.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Count {
    Absolute(usize),
    Percent(f64),
}

impl Count {
    /// Percentages round up and never resolve below 1.
    pub fn resolve(self, total: usize) -> usize {
        match self {
            Count::Absolute(n) => n,
            Count::Percent(p) => ((p / 100.0 * total as f64).ceil() as usize).max(1),
        }
    }
}

impl FromStr for Count {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if let Some(p) = s.strip_suffix('%') {
            let v: f64 = p.trim().parse().map_err(|_| format!("bad percentage `{s}`"))?;
            if !(v > 0.0 && v <= 100.0) {
                return Err(format!("percentage `{s}` must be in (0, 100]"));
            }
            return Ok(Count::Percent(v));
        }
        match s.parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Count::Absolute(n)),
            _ => Err(format!("`{s}` is not a positive count")),
        }
    }
}

impl fmt::Display for Count {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Count::Absolute(n) => write!(f, "{n}"),
            Count::Percent(p) => write!(f, "{p}%"),
        }
    }
}

/// Pipeline settings. Build from defaults, a `key=value` file and flag
/// overrides, in that order.
#[derive(Clone, Debug, PartialEq)]
pub struct Config {
    pub theta: Count,
    pub min_sup: Count,
    /// Edge budget; twice the hot graph size when unset.
    pub sc: Option<usize>,
    pub sites: usize,
    pub strategy: Strategy,
    pub min_acc: usize,
    pub max_pattern_edges: usize,
    pub graph: Option<PathBuf>,
    pub workload: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            theta: Count::Absolute(1),
            min_sup: Count::Absolute(1),
            sc: None,
            sites: 2,
            strategy: Strategy::Vertical,
            min_acc: 1,
            max_pattern_edges: 4,
            graph: None,
            workload: None,
            out: None,
        }
    }
}

fn positive(key: &str, value: &str) -> Result<usize, String> {
    match value.trim().parse::<usize>() {
        Ok(n) if n >= 1 => Ok(n),
        _ => Err(format!("{key}: `{value}` is not a positive integer")),
    }
}

impl Config {
    /// Applies one setting. Keys accept `_` or `-` separators.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), PipelineError> {
        let k = key.trim().to_ascii_lowercase().replace('-', "_");
        let v = value.trim();
        let res: Result<(), String> = (|| {
            match k.as_str() {
                "theta" => self.theta = v.parse().map_err(|e| format!("theta: {e}"))?,
                "min_sup" | "minsup" => self.min_sup = v.parse().map_err(|e| format!("min_sup: {e}"))?,
                "sc" => self.sc = Some(positive("sc", v)?),
                "sites" | "m" => self.sites = positive("sites", v)?,
                "strategy" => self.strategy = v.parse()?,
                "min_acc" | "minacc" => self.min_acc = positive("min_acc", v)?,
                "max_pattern_edges" => self.max_pattern_edges = positive("max_pattern_edges", v)?,
                "graph" => self.graph = Some(PathBuf::from(v)),
                "workload" => self.workload = Some(PathBuf::from(v)),
                "out" => self.out = Some(PathBuf::from(v)),
                _ => return Err(format!("unknown setting `{key}`")),
            }
            Ok(())
        })();
        res.map_err(PipelineError::Usage)
    }

    /// Reads `key = value` lines; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<(), PipelineError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| PipelineError::Usage(format!("config line {}: expected key=value", i + 1)))?;
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn from_text(text: &str) -> Result<Self, PipelineError> {
        let mut c = Config::default();
        c.apply_text(text)?;
        Ok(c)
    }

    /// Resolves percentages against the workload size.
    pub fn params(&self, workload_len: usize) -> Params {
        Params {
            theta: self.theta.resolve(workload_len),
            min_sup: self.min_sup.resolve(workload_len),
            sc: self.sc,
            sites: self.sites,
            strategy: self.strategy,
            min_acc: self.min_acc,
            max_pattern_edges: self.max_pattern_edges,
        }
    }
}

/// Fully resolved numeric settings for one pipeline run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Params {
    pub theta: usize,
    pub min_sup: usize,
    pub sc: Option<usize>,
    pub sites: usize,
    pub strategy: Strategy,
    pub min_acc: usize,
    pub max_pattern_edges: usize,
}

impl Default for Params {
    fn default() -> Self {
        Config::default().params(0)
    }
}
