//! Shared settings: built-in defaults, then the config file, then flags.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use pathwl::complex::DEFAULT_MEMBER_CAP;
use pathwl::BoundaryMode;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Text,
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "text" => Ok(Self::Text),
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(format!("unknown output format {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub boundary_mode: BoundaryMode,
    pub member_cap: usize,
    pub hidden_dim: usize,
    pub embed_dim: usize,
    pub epsilon: f64,
    pub seeds: Vec<u64>,
    /// Zero means one worker per logical CPU.
    pub threads: usize,
    pub output_format: OutputFormat,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            boundary_mode: BoundaryMode::Incidence,
            member_cap: DEFAULT_MEMBER_CAP,
            hidden_dim: 16,
            embed_dim: 32,
            epsilon: 0.01,
            seeds: (0..10).collect(),
            threads: 0,
            output_format: OutputFormat::Text,
        }
    }
}

/// Keys accepted in config files; each matches the long flag of the same name.
pub const KEYS: [&str; 8] = [
    "boundary-mode",
    "member-cap",
    "hidden-dim",
    "embed-dim",
    "epsilon",
    "seeds",
    "threads",
    "output-format",
];

/// `0..10`, `3`, or `0,4,7`.
pub fn parse_seeds(text: &str) -> Result<Vec<u64>, String> {
    let text = text.trim();
    if let Some((a, b)) = text.split_once("..") {
        let a: u64 = a
            .trim()
            .parse()
            .map_err(|_| format!("bad seed range {text:?}"))?;
        let b: u64 = b
            .trim()
            .parse()
            .map_err(|_| format!("bad seed range {text:?}"))?;
        return Ok((a..b).collect());
    }
    text.split(',')
        .map(|s| s.trim().parse().map_err(|_| format!("bad seed {s:?}")))
        .collect()
}

/// `3..7` (end exclusive), `3..=6`, `4`, or `3,5`.
pub fn parse_usize_list(text: &str) -> Result<Vec<usize>, String> {
    let text = text.trim();
    let bad = || format!("bad list {text:?}");
    if let Some((a, b)) = text.split_once("..=") {
        let a: usize = a.trim().parse().map_err(|_| bad())?;
        let b: usize = b.trim().parse().map_err(|_| bad())?;
        return Ok((a..=b).collect());
    }
    if let Some((a, b)) = text.split_once("..") {
        let a: usize = a.trim().parse().map_err(|_| bad())?;
        let b: usize = b.trim().parse().map_err(|_| bad())?;
        return Ok((a..b).collect());
    }
    text.split(',')
        .map(|s| s.trim().parse().map_err(|_| bad()))
        .collect()
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .parse()
        .map_err(|_| CliError::Usage(format!("invalid value {value:?} for {key}")))
}

impl Settings {
    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let value = value.trim();
        match key {
            "boundary-mode" => {
                self.boundary_mode = BoundaryMode::from_str(value).map_err(CliError::Usage)?
            }
            "member-cap" => self.member_cap = parse_value(key, value)?,
            "hidden-dim" => self.hidden_dim = parse_value(key, value)?,
            "embed-dim" => self.embed_dim = parse_value(key, value)?,
            "epsilon" => self.epsilon = parse_value(key, value)?,
            "seeds" => self.seeds = parse_seeds(value).map_err(CliError::Usage)?,
            "threads" => self.threads = parse_value(key, value)?,
            "output-format" => {
                self.output_format = OutputFormat::from_str(value).map_err(CliError::Usage)?
            }
            other => return Err(CliError::Usage(format!("unknown config key {other:?}"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let fail = |m: &str| Err(CliError::Usage(m.to_string()));
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return fail("epsilon must be a positive number");
        }
        if self.hidden_dim == 0 || self.embed_dim == 0 {
            return fail("hidden-dim and embed-dim must be positive");
        }
        if self.member_cap == 0 {
            return fail("member-cap must be positive");
        }
        if self.seeds.is_empty() {
            return fail("seeds must not be empty");
        }
        Ok(())
    }
}

/// Reads `key = value` lines; blank lines and `#` comments are skipped.
pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    parse_config(&text).map_err(|e| match e {
        CliError::Usage(m) => CliError::Usage(format!("{}: {m}", path.display())),
        other => other,
    })
}

pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("line {}: expected `key = value`", i + 1)))?;
        let key = key.trim();
        if !KEYS.contains(&key) {
            return Err(CliError::Usage(format!(
                "line {}: unknown key {key:?}",
                i + 1
            )));
        }
        out.insert(key.to_string(), value.trim().to_string());
    }
    Ok(out)
}
