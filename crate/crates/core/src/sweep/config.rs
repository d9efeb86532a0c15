//! Sweep configuration files: `[section]` headers and `key = value` lines,
//! `#` comments. Errors carry the 1-based line and column.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::entropy::{Method, DEFAULT_NMAX, DEFAULT_TRANSIENT};
use crate::error::Error;
use crate::measures::{DEFAULT_BURN_IN, DEFAULT_MODES};
use crate::oseledets::DEFAULT_BLOCKS;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MeasureSpec {
    Birkhoff { burn_in: usize, length: usize },
    Ulam { resolution: usize, samples_per_cell: usize, tol: f64, max_iters: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub family: String,
    pub grid: Vec<f64>,
    pub estimators: Vec<Method>,
    pub seed: u64,
    /// 0 means the machine default.
    pub workers: usize,
    pub tolerance: f64,
    pub measure: MeasureSpec,
    /// Orbit length of the Lyapunov spectrum at each grid point.
    pub steps: usize,
    pub spectrum_burn_in: usize,
    pub blocks: usize,
    pub n_max: usize,
    pub dim_f: usize,
    pub n_transient: usize,
    pub weak_star: bool,
    pub weak_star_modes: usize,
    pub usc_window: usize,
    pub usc_slack: f64,
}

impl SweepConfig {
    pub fn new(family: &str, grid: Vec<f64>) -> Self {
        SweepConfig {
            family: family.into(),
            grid,
            estimators: vec![Method::Pesin],
            seed: 0,
            workers: 0,
            tolerance: 0.02,
            measure: MeasureSpec::Birkhoff { burn_in: DEFAULT_BURN_IN, length: 100_000 },
            steps: 1_000_000,
            spectrum_burn_in: DEFAULT_BURN_IN,
            blocks: DEFAULT_BLOCKS,
            n_max: DEFAULT_NMAX,
            dim_f: 1,
            n_transient: DEFAULT_TRANSIENT,
            weak_star: true,
            weak_star_modes: DEFAULT_MODES,
            usc_window: 1,
            usc_slack: 0.05,
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        let bad = |m: String| Err(Error::InvalidInput(m));
        if self.grid.is_empty() {
            return bad("grid is empty".into());
        }
        if self.grid.iter().any(|t| !t.is_finite()) || self.grid.windows(2).any(|w| w[0] >= w[1]) {
            return bad("grid must be finite and strictly increasing".into());
        }
        if !(self.tolerance > 0.0) {
            return bad("tolerance must be positive".into());
        }
        if !(self.usc_slack >= 0.0) {
            return bad("usc_slack must be non-negative".into());
        }
        if self.estimators.is_empty() {
            return bad("no estimators selected".into());
        }
        Ok(())
    }

    /// Parses the text format described in the README.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        parse(text)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConfigError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ConfigError {}

impl From<ConfigError> for Error {
    fn from(e: ConfigError) -> Self {
        Error::InvalidInput(format!("config {e}"))
    }
}

fn err<T>(line: usize, column: usize, message: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError { line, column, message: message.into() })
}

/// Non-negative integer, also in float notation such as `1e6`.
pub fn parse_count(s: &str) -> Option<usize> {
    if let Ok(v) = s.parse::<usize>() {
        return Some(v);
    }
    let f: f64 = s.parse().ok()?;
    (f >= 0.0 && f.fract() == 0.0 && f <= 9.0e15).then_some(f as usize)
}

/// `pesin`, `ls`, `jacobian` (or their long names) and `all`.
pub fn parse_method(s: &str) -> Option<Vec<Method>> {
    match s {
        "pesin" => Some(vec![Method::Pesin]),
        "ls" | "ledrappier_strelcyn" => Some(vec![Method::LedrappierStrelcyn]),
        "jacobian" | "jacobian_F" => Some(vec![Method::JacobianF]),
        "all" => Some(vec![Method::Pesin, Method::LedrappierStrelcyn, Method::JacobianF]),
        _ => None,
    }
}

/// `a, b, c` or `lo:hi:count` (inclusive, evenly spaced).
fn parse_grid(s: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(':').map(str::trim).collect();
    if parts.len() == 3 {
        let lo: f64 = parts[0].parse().map_err(|_| format!("bad grid start '{}'", parts[0]))?;
        let hi: f64 = parts[1].parse().map_err(|_| format!("bad grid end '{}'", parts[1]))?;
        let n = parse_count(parts[2]).filter(|&n| n >= 1).ok_or_else(|| format!("bad grid count '{}'", parts[2]))?;
        if n == 1 {
            return Ok(vec![lo]);
        }
        // rounded to 12 decimals so 0:0.9:10 yields the literals 0.1, 0.2, ...
        return Ok((0..n)
            .map(|k| {
                let v = lo + (hi - lo) * k as f64 / (n - 1) as f64;
                format!("{v:.12}").parse().unwrap_or(v)
            })
            .collect());
    }
    s.split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|_| format!("bad grid value '{}'", p.trim())))
        .collect()
}

#[derive(Default)]
struct MeasureFields {
    kind: Option<String>,
    burn_in: Option<usize>,
    length: Option<usize>,
    resolution: Option<usize>,
    samples_per_cell: Option<usize>,
    tol: Option<f64>,
    max_iters: Option<usize>,
}

fn parse(text: &str) -> Result<SweepConfig, ConfigError> {
    let mut cfg = SweepConfig::new("", Vec::new());
    let mut family: Option<String> = None;
    let mut grid: Option<Vec<f64>> = None;
    let mut m = MeasureFields::default();
    let mut section = String::new();
    for (ln, raw) in text.lines().enumerate() {
        let line_no = ln + 1;
        let content = raw.split('#').next().unwrap_or("");
        let trimmed = content.trim();
        if trimmed.is_empty() {
            continue;
        }
        let indent = content.len() - content.trim_start().len();
        if trimmed.starts_with('[') {
            if !trimmed.ends_with(']') {
                return err(line_no, indent + 1, "unterminated section header");
            }
            section = trimmed[1..trimmed.len() - 1].trim().to_string();
            if !matches!(section.as_str(), "sweep" | "measure" | "spectrum" | "entropy" | "checks") {
                return err(line_no, indent + 2, format!("unknown section '{section}'"));
            }
            continue;
        }
        let Some(eq) = content.find('=') else {
            return err(line_no, indent + 1, "expected 'key = value'");
        };
        let key = content[..eq].trim();
        let value = content[eq + 1..].trim();
        let value_col = eq + 2 + (content[eq + 1..].len() - content[eq + 1..].trim_start().len());
        if section.is_empty() {
            return err(line_no, indent + 1, "key outside of any [section]");
        }
        if key.is_empty() {
            return err(line_no, indent + 1, "missing key");
        }
        macro_rules! count {
            () => {
                parse_count(value).ok_or_else(|| ConfigError {
                    line: line_no,
                    column: value_col,
                    message: format!("expected a non-negative integer for '{key}', got '{value}'"),
                })?
            };
        }
        macro_rules! real {
            () => {
                value.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| ConfigError {
                    line: line_no,
                    column: value_col,
                    message: format!("expected a number for '{key}', got '{value}'"),
                })?
            };
        }
        match (section.as_str(), key) {
            ("sweep", "family") => family = Some(value.to_string()),
            ("sweep", "grid") => {
                grid = Some(parse_grid(value).or_else(|e| err(line_no, value_col, e))?);
            }
            ("sweep", "estimators") => {
                let mut out = Vec::new();
                for name in value.split(',').map(str::trim) {
                    let ms = parse_method(name)
                        .ok_or_else(|| ConfigError { line: line_no, column: value_col, message: format!("unknown estimator '{name}'") })?;
                    for mm in ms {
                        if !out.contains(&mm) {
                            out.push(mm);
                        }
                    }
                }
                cfg.estimators = out;
            }
            ("sweep", "seed") => cfg.seed = count!() as u64,
            ("sweep", "workers") => cfg.workers = count!(),
            ("sweep", "tolerance") => cfg.tolerance = real!(),
            ("measure", "kind") => m.kind = Some(value.to_string()),
            ("measure", "burn_in") => m.burn_in = Some(count!()),
            ("measure", "length") => m.length = Some(count!()),
            ("measure", "resolution") => m.resolution = Some(count!()),
            ("measure", "samples_per_cell") => m.samples_per_cell = Some(count!()),
            ("measure", "tol") => m.tol = Some(real!()),
            ("measure", "max_iters") => m.max_iters = Some(count!()),
            ("spectrum", "steps") => cfg.steps = count!(),
            ("spectrum", "burn_in") => cfg.spectrum_burn_in = count!(),
            ("spectrum", "blocks") => cfg.blocks = count!(),
            ("entropy", "n_max") => cfg.n_max = count!(),
            ("entropy", "dim_f") => cfg.dim_f = count!(),
            ("entropy", "n_transient") => cfg.n_transient = count!(),
            ("checks", "weak_star") => {
                cfg.weak_star = match value {
                    "true" | "yes" | "1" => true,
                    "false" | "no" | "0" => false,
                    _ => return err(line_no, value_col, format!("expected true/false, got '{value}'")),
                }
            }
            ("checks", "weak_star_modes") => cfg.weak_star_modes = count!(),
            ("checks", "usc_window") => cfg.usc_window = count!(),
            ("checks", "usc_slack") => cfg.usc_slack = real!(),
            _ => return err(line_no, indent + 1, format!("unknown key '{key}' in [{section}]")),
        }
    }
    cfg.family = family.ok_or(ConfigError { line: 0, column: 0, message: "missing [sweep] family".into() })?;
    cfg.grid = grid.ok_or(ConfigError { line: 0, column: 0, message: "missing [sweep] grid".into() })?;
    cfg.measure = match m.kind.as_deref().unwrap_or("birkhoff") {
        "birkhoff" => MeasureSpec::Birkhoff {
            burn_in: m.burn_in.unwrap_or(DEFAULT_BURN_IN),
            length: m.length.unwrap_or(100_000),
        },
        "ulam" => MeasureSpec::Ulam {
            resolution: m.resolution.unwrap_or(256),
            samples_per_cell: m.samples_per_cell.unwrap_or(64),
            tol: m.tol.unwrap_or(1e-10),
            max_iters: m.max_iters.unwrap_or(100_000),
        },
        other => return err(0, 0, format!("unknown measure kind '{other}'")),
    };
    cfg.validate().map_err(|e| ConfigError { line: 0, column: 0, message: e.to_string() })?;
    Ok(cfg)
}
