//! Run configuration: a flat TOML file merged with command-line flags.
//!
//! Every key takes the same text as the flag of the same name, so
//! `interval = "2,inf"` in a file and `--interval 2,inf` mean the same.
//! Numbers and arrays of numbers are also accepted as TOML values. Flags
//! override the file.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use bgls_core::{Interval, WeightedDomain};

use crate::expr::{self, FuncExpr, ParseError, PsiExpr};

pub const KEYS: [&str; 16] = [
    "command", "interval", "psi", "nu", "blocks", "function", "s", "matrix", "sigma", "alpha", "beta", "levels", "tol",
    "seed", "format", "out",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Norm,
    Fundfn,
    DilationNorm,
    MatrixDilation,
    Boyd,
    Shimogaki,
    Criteria,
    Probe,
    VerifyAll,
}

impl Command {
    pub const ALL: [Command; 9] = [
        Command::Norm,
        Command::Fundfn,
        Command::DilationNorm,
        Command::MatrixDilation,
        Command::Boyd,
        Command::Shimogaki,
        Command::Criteria,
        Command::Probe,
        Command::VerifyAll,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Command::Norm => "norm",
            Command::Fundfn => "fundfn",
            Command::DilationNorm => "dilation-norm",
            Command::MatrixDilation => "matrix-dilation",
            Command::Boyd => "boyd",
            Command::Shimogaki => "shimogaki",
            Command::Criteria => "criteria",
            Command::Probe => "probe",
            Command::VerifyAll => "verify-all",
        }
    }

    pub fn parse(s: &str) -> Option<Command> {
        Command::ALL.into_iter().find(|c| c.name() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

/// Configuration errors.
#[derive(Debug, Clone, PartialEq)]
pub enum ConfigError {
    /// Malformed text, with the key it belongs to when known.
    Parse { field: Option<String>, err: ParseError },
    /// Well-formed but unusable value.
    Invalid { field: String, msg: String },
    Io(String),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Parse { field: Some(k), err } => write!(f, "parse error in '{k}' at {err}"),
            ConfigError::Parse { field: None, err } => write!(f, "parse error at {err}"),
            ConfigError::Invalid { field, msg } => write!(f, "invalid '{field}': {msg}"),
            ConfigError::Io(m) => write!(f, "{m}"),
        }
    }
}

impl std::error::Error for ConfigError {}

/// Where a raw value came from: a flag, or a file position of its first
/// character.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Origin {
    Flag,
    File { line: usize, col: usize },
}

/// Raw key/value text before validation.
#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    values: BTreeMap<String, (String, Origin)>,
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, col)
}

/// Position of the value of `key` in a flat TOML text.
fn value_position(text: &str, key: &str) -> (usize, usize) {
    for (i, l) in text.lines().enumerate() {
        let t = l.trim_start();
        if let Some(rest) = t.strip_prefix(key) {
            let rest_trim = rest.trim_start();
            if let Some(v) = rest_trim.strip_prefix('=') {
                let lead = l.len() - v.trim_start().len();
                let quote = v.trim_start().starts_with('"') as usize;
                return (i + 1, l[..lead].chars().count() + 1 + quote);
            }
        }
    }
    (1, 1)
}

fn value_text(key: &str, v: &toml::Value) -> Result<String, String> {
    match v {
        toml::Value::String(s) => Ok(s.clone()),
        toml::Value::Integer(i) => Ok(i.to_string()),
        toml::Value::Float(x) => Ok(x.to_string()),
        toml::Value::Array(xs) => {
            let parts: Result<Vec<String>, String> = xs
                .iter()
                .map(|x| match x {
                    toml::Value::Integer(i) => Ok(i.to_string()),
                    toml::Value::Float(f) => Ok(f.to_string()),
                    toml::Value::String(s) => Ok(s.clone()),
                    _ => Err(format!("'{key}' must be a list of numbers")),
                })
                .collect();
            Ok(parts?.join(","))
        }
        _ => Err(format!("'{key}' must be a string, a number or a list of numbers")),
    }
}

impl RawConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let table: toml::Table = text.parse().map_err(|e: toml::de::Error| {
            let (line, col) = e.span().map_or((1, 1), |s| line_col(text, s.start));
            ConfigError::Parse { field: None, err: ParseError { line, col, msg: e.message().to_string() } }
        })?;
        let mut values = BTreeMap::new();
        for (k, v) in &table {
            if !KEYS.contains(&k.as_str()) {
                return Err(ConfigError::Invalid { field: k.clone(), msg: "unknown key".into() });
            }
            let s = value_text(k, v).map_err(|msg| ConfigError::Invalid { field: k.clone(), msg })?;
            let (line, col) = value_position(text, k);
            values.insert(k.clone(), (s, Origin::File { line, col }));
        }
        Ok(RawConfig { values })
    }

    pub fn load(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Set a key from a flag; flags win over file values.
    pub fn set_flag(&mut self, key: &str, value: impl Into<String>) {
        debug_assert!(KEYS.contains(&key));
        self.values.insert(key.to_string(), (value.into(), Origin::Flag));
    }

    fn get(&self, key: &str) -> Option<&(String, Origin)> {
        self.values.get(key)
    }

    /// Shift a value-relative parse error to its file position.
    fn locate(&self, key: &str, mut err: ParseError) -> ConfigError {
        if let Some((_, Origin::File { line, col })) = self.get(key) {
            err.line = *line;
            err.col += col - 1;
        }
        ConfigError::Parse { field: Some(key.to_string()), err }
    }

    fn parse_with<T>(&self, key: &str, f: impl Fn(&str) -> Result<T, ParseError>) -> Result<Option<T>, ConfigError> {
        match self.get(key) {
            None => Ok(None),
            Some((s, _)) => f(s).map(Some).map_err(|e| self.locate(key, e)),
        }
    }

    fn number(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        self.parse_with(key, |s| {
            let v = expr::parse_floats(s)?;
            if v.len() != 1 {
                return Err(ParseError { line: 1, col: 1, msg: format!("expected one number, got {}", v.len()) });
            }
            Ok(v[0])
        })
    }

    pub fn resolve(&self) -> Result<RunConfig, ConfigError> {
        let invalid = |field: &str, msg: String| ConfigError::Invalid { field: field.to_string(), msg };
        let command = match self.get("command") {
            None => return Err(invalid("command", "no command given".into())),
            Some((s, _)) => Command::parse(s.trim()).ok_or_else(|| invalid("command", format!("unknown command '{s}'")))?,
        };
        let interval = self.parse_with("interval", expr::parse_interval)?;
        if interval.is_none() && command != Command::VerifyAll {
            return Err(invalid("interval", "required".into()));
        }
        let psi = self.parse_with("psi", expr::parse_psi)?.unwrap_or(PsiExpr::Canonical);
        let nu = self.parse_with("nu", expr::parse_psi)?.unwrap_or(PsiExpr::Const(1.0));
        let blocks = self.parse_with("blocks", expr::parse_blocks)?;
        let function = self.parse_with("function", expr::parse_function)?;
        let s = self.parse_with("s", expr::parse_floats)?;
        let matrix = self.parse_with("matrix", expr::parse_floats)?;
        let sigma = self.number("sigma")?;
        let alpha = self.number("alpha")?;
        let beta = self.number("beta")?;
        let levels = match self.number("levels")? {
            None => DEFAULT_LEVELS,
            Some(v) if (3.0..=64.0).contains(&v) && v.fract() == 0.0 => v as usize,
            Some(v) => return Err(invalid("levels", format!("{v} is not an integer in 3..=64"))),
        };
        let tol = match self.number("tol")? {
            None => DEFAULT_TOL,
            Some(v) if v > 0.0 && v < 1.0 => v,
            Some(v) => return Err(invalid("tol", format!("{v} is not in (0, 1)"))),
        };
        let seed = match self.get("seed") {
            None => DEFAULT_SEED,
            Some((s, _)) => s.trim().parse().map_err(|_| invalid("seed", format!("'{s}' is not an unsigned integer")))?,
        };
        let format = match self.get("format").map(|v| v.0.trim()) {
            None | Some("csv") => Format::Csv,
            Some("json") => Format::Json,
            Some(other) => return Err(invalid("format", format!("'{other}' is neither json nor csv"))),
        };
        let out = self.get("out").map(|v| PathBuf::from(&v.0));
        if let Some(m) = &matrix {
            let n = (m.len() as f64).sqrt().round() as usize;
            if n == 0 || n * n != m.len() {
                return Err(invalid("matrix", format!("{} entries do not form a square matrix", m.len())));
            }
        }
        let mut entries = Vec::new();
        for k in KEYS {
            let v = match k {
                "command" => command.name().to_string(),
                "levels" => levels.to_string(),
                "tol" => format!("{tol:e}"),
                "seed" => seed.to_string(),
                "format" => if format == Format::Json { "json" } else { "csv" }.into(),
                "psi" => self.get(k).map_or("canonical".into(), |v| v.0.clone()),
                "nu" => self.get(k).map_or("one".into(), |v| v.0.clone()),
                "out" => continue,
                _ => match self.get(k) {
                    Some(v) => v.0.clone(),
                    None => continue,
                },
            };
            entries.push((k.to_string(), v));
        }
        Ok(RunConfig { command, interval, psi, nu, blocks, function, s, matrix, sigma, alpha, beta, levels, tol, seed, format, out, entries })
    }
}

pub const DEFAULT_LEVELS: usize = 6;
pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_SEED: u64 = 20_240_601;

/// A validated run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub interval: Option<Interval>,
    pub psi: PsiExpr,
    pub nu: PsiExpr,
    pub blocks: Option<WeightedDomain>,
    pub function: Option<FuncExpr>,
    pub s: Option<Vec<f64>>,
    pub matrix: Option<Vec<f64>>,
    pub sigma: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub levels: usize,
    pub tol: f64,
    pub seed: u64,
    pub format: Format,
    pub out: Option<PathBuf>,
    /// Effective settings in key order, for output headers.
    pub entries: Vec<(String, String)>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let mut raw = RawConfig::from_toml("command = \"boyd\"\ninterval = \"2,4\"\nlevels = 4\ns = [0.5, 2]\n").unwrap();
        raw.set_flag("levels", "7");
        let c = raw.resolve().unwrap();
        assert_eq!(c.command, Command::Boyd);
        assert_eq!(c.levels, 7);
        assert_eq!(c.s, Some(vec![0.5, 2.0]));
        assert_eq!(c.interval.unwrap().b(), 4.0);
    }

    #[test]
    fn errors_name_fields_and_positions() {
        let raw = RawConfig::from_toml("command = \"norm\"\ninterval = \"2,4\"\npsi = \"power(1, 2\"\n").unwrap();
        match raw.resolve().unwrap_err() {
            ConfigError::Parse { field, err } => {
                assert_eq!(field.as_deref(), Some("psi"));
                assert_eq!((err.line, err.col), (3, 18));
            }
            e => panic!("{e}"),
        }
        assert!(matches!(RawConfig::from_toml("colour = 1"), Err(ConfigError::Invalid { .. })));
        match RawConfig::from_toml("command = \"norm\"\ninterval = ").unwrap_err() {
            ConfigError::Parse { err, .. } => assert_eq!(err.line, 2),
            e => panic!("{e}"),
        }
        let mut raw = RawConfig::default();
        raw.set_flag("command", "norm");
        assert!(matches!(raw.resolve(), Err(ConfigError::Invalid { field, .. }) if field == "interval"));
        raw.set_flag("interval", "2,4");
        raw.set_flag("levels", "2.5");
        assert!(matches!(raw.resolve(), Err(ConfigError::Invalid { field, .. }) if field == "levels"));
    }
}
