//! Run configuration: defaults, then command-line flags, then a TOML file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;
use unipotent_core::group::TriangularIndex;
use unipotent_core::measure::{ClassifyConfig, Family, MeasureParams, SeriesConfig};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{0}")]
    Invalid(String),
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot parse {path}: {source}")]
    Parse { path: PathBuf, source: toml::de::Error },
    #[error(transparent)]
    Measure(#[from] unipotent_core::MeasureError),
    #[error(transparent)]
    Symbolic(#[from] unipotent_core::SymbolicError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum FamilyKind {
    Geometric,
    Explicit,
    Custom,
}

/// Named weight rules for `--family custom`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum CustomRule {
    /// `b_kn = value`.
    Constant,
    /// `b_kn = a_k^n` with `a_k = s^k`, except `a_row = base`.
    Spliced,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Structured,
}

/// Every setting a subcommand may read.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub n: usize,
    pub family: FamilyKind,
    pub s: f64,
    pub window: usize,
    pub e_window: usize,
    pub max_terms: usize,
    pub seed: u64,
    pub samples: usize,
    pub points: usize,
    pub tol_pointwise: f64,
    /// In standard errors.
    pub tol_stat: f64,
    /// Relative tolerance on sampler second moments.
    pub tol_moment: f64,
    pub tol_series: f64,
    pub threshold: f64,
    pub symbolic_cap: usize,
    pub rule: Option<CustomRule>,
    pub value: Option<f64>,
    pub row: Option<usize>,
    pub base: Option<f64>,
    /// Explicit weights keyed by `"k,n"`.
    pub weights: BTreeMap<String, f64>,
    #[serde(skip)]
    pub format: Format,
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            n: 4,
            family: FamilyKind::Geometric,
            s: 2.0,
            window: 6,
            e_window: 40,
            max_terms: 200,
            seed: 42,
            samples: 100_000,
            points: 1000,
            tol_pointwise: 1e-9,
            tol_stat: 3.0,
            tol_moment: 0.01,
            tol_series: 1e-10,
            threshold: 1e9,
            symbolic_cap: 6,
            rule: None,
            value: None,
            row: None,
            base: None,
            weights: BTreeMap::new(),
            format: Format::Text,
            out: None,
        }
    }
}

/// Optional overrides, as parsed from flags or from a config file.
#[derive(Debug, Clone, Default, PartialEq, Deserialize, clap::Args)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct Overrides {
    /// Truncation size N
    #[arg(long)]
    pub n: Option<usize>,
    /// Weight family
    #[arg(long, value_enum)]
    pub family: Option<FamilyKind>,
    /// Base s of the geometric family (s > 1)
    #[arg(long)]
    pub s: Option<f64>,
    /// Index window for the criteria series
    #[arg(long)]
    pub window: Option<usize>,
    /// Truncation of the double sum E(b)
    #[arg(long)]
    pub e_window: Option<usize>,
    /// Terms per criteria series
    #[arg(long)]
    pub max_terms: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Monte Carlo samples
    #[arg(long)]
    pub samples: Option<usize>,
    /// Points for pointwise identities
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long)]
    pub tol_pointwise: Option<f64>,
    /// Statistical tolerance in standard errors
    #[arg(long)]
    pub tol_stat: Option<f64>,
    #[arg(long)]
    pub tol_moment: Option<f64>,
    #[arg(long)]
    pub tol_series: Option<f64>,
    /// Partial-sum level counted as divergence
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long)]
    pub symbolic_cap: Option<usize>,
    /// Rule for --family custom
    #[arg(long, value_enum)]
    pub rule: Option<CustomRule>,
    /// Weight for the constant rule
    #[arg(long)]
    pub value: Option<f64>,
    /// Replaced row for the spliced rule
    #[arg(long)]
    pub row: Option<usize>,
    /// Replacement a_row for the spliced rule
    #[arg(long)]
    pub base: Option<f64>,
    /// Explicit weights, e.g. "1,2=1.5;1,3=2"
    #[arg(long, value_parser = parse_weights)]
    pub weights: Option<BTreeMap<String, f64>>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write the report here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_weights(s: &str) -> Result<BTreeMap<String, f64>, String> {
    s.split(';')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            let (key, v) = p
                .split_once('=')
                .ok_or_else(|| format!("expected k,n=value in {p:?}"))?;
            let v: f64 = v.trim().parse().map_err(|e| format!("{p:?}: {e}"))?;
            Ok((key.trim().to_string(), v))
        })
        .collect()
}

impl RunConfig {
    pub fn apply(&mut self, o: &Overrides) {
        macro_rules! set {
            ($($f:ident),*) => { $( if let Some(v) = o.$f.clone() { self.$f = v; } )* };
        }
        set!(
            n,
            family,
            s,
            window,
            e_window,
            max_terms,
            seed,
            samples,
            points,
            tol_pointwise,
            tol_stat,
            tol_moment,
            tol_series,
            threshold,
            symbolic_cap,
            weights,
            format
        );
        if o.rule.is_some() {
            self.rule = o.rule;
        }
        if o.value.is_some() {
            self.value = o.value;
        }
        if o.row.is_some() {
            self.row = o.row;
        }
        if o.base.is_some() {
            self.base = o.base;
        }
        if o.out.is_some() {
            self.out = o.out.clone();
        }
    }

    /// Defaults, then `flags`, then the file at `config` if given.
    pub fn resolve(flags: &Overrides, config: Option<&Path>) -> Result<Self, ConfigError> {
        let mut cfg = RunConfig::default();
        cfg.apply(flags);
        if let Some(path) = config {
            let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
                path: path.to_path_buf(),
                source,
            })?;
            let file: Overrides = toml::from_str(&text).map_err(|source| ConfigError::Parse {
                path: path.to_path_buf(),
                source,
            })?;
            cfg.apply(&file);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: String| Err(ConfigError::Invalid(m));
        if self.n < 2 {
            return bad(format!("n must be at least 2, got {}", self.n));
        }
        for (name, v) in [
            ("tol-pointwise", self.tol_pointwise),
            ("tol-stat", self.tol_stat),
            ("tol-moment", self.tol_moment),
            ("tol-series", self.tol_series),
            ("threshold", self.threshold),
        ] {
            if !v.is_finite() || v <= 0.0 {
                return bad(format!("{name} must be positive and finite, got {v}"));
            }
        }
        if self.window < 2 {
            return bad(format!("window must be at least 2, got {}", self.window));
        }
        Ok(())
    }

    pub fn measure_family(&self) -> Result<Family, ConfigError> {
        match self.family {
            FamilyKind::Geometric => Ok(Family::geometric(self.s)),
            FamilyKind::Explicit => {
                if self.weights.is_empty() {
                    return Err(ConfigError::Invalid("explicit family needs weights".into()));
                }
                let mut weights = BTreeMap::new();
                for (key, v) in &self.weights {
                    let idx = parse_index(key)
                        .ok_or_else(|| ConfigError::Invalid(format!("weight key {key:?} is not k,n with k < n")))?;
                    weights.insert(idx, *v);
                }
                Ok(Family::Explicit { weights })
            }
            FamilyKind::Custom => match self.rule {
                Some(CustomRule::Constant) => {
                    let value = self
                        .value
                        .ok_or_else(|| ConfigError::Invalid("constant rule needs --value".into()))?;
                    Ok(Family::Constant { value })
                }
                Some(CustomRule::Spliced) => {
                    let row = self
                        .row
                        .ok_or_else(|| ConfigError::Invalid("spliced rule needs --row".into()))?;
                    let base = self
                        .base
                        .ok_or_else(|| ConfigError::Invalid("spliced rule needs --base".into()))?;
                    if base.is_nan() || base <= 0.0 {
                        return Err(ConfigError::Invalid(format!("base must be positive, got {base}")));
                    }
                    Ok(Family::spliced(self.s, row, base))
                }
                None => Err(ConfigError::Invalid("custom family needs --rule".into())),
            },
        }
    }

    /// The measure on the index window needed by this configuration.
    pub fn measure(&self, window: usize) -> Result<MeasureParams, ConfigError> {
        Ok(MeasureParams::new(self.measure_family()?, window)?)
    }

    pub fn series(&self) -> SeriesConfig {
        SeriesConfig {
            max_terms: self.max_terms,
            tol: self.tol_series,
            threshold: self.threshold,
        }
    }

    pub fn classify(&self) -> ClassifyConfig {
        ClassifyConfig {
            window: self.window,
            e_window: self.e_window,
            series: self.series(),
        }
    }
}

/// `"k,n"` or `"kn"` with single digits.
fn parse_index(key: &str) -> Option<TriangularIndex> {
    let (k, n) = match key.split_once(',') {
        Some((k, n)) => (k.trim().parse().ok()?, n.trim().parse().ok()?),
        None if key.len() == 2 => (key[..1].parse().ok()?, key[1..].parse().ok()?),
        None => return None,
    };
    (k >= 1 && k < n).then_some(TriangularIndex { k, n })
}
