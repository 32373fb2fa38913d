//! Experiment configuration: JSON file, then command-line overrides, then
//! defaults.

use std::fs;
use std::path::{Path, PathBuf};

use dpsqueeze::domain::GeneralEllipsoid;
use dpsqueeze::seqclass::SequenceKind;
use dpsqueeze::wpoly::PolynomialFile;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Rejected input; reported with exit status 2.
#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("invalid config {path}")]
    Schema { path: PathBuf, source: serde_json::Error },
    #[error("invalid polynomial file {path}: {message}")]
    Polynomial { path: PathBuf, message: String },
    #[error("invalid value for `{field}`: {message}")]
    Value { field: &'static str, message: String },
}

/// On-disk schema. Every field is optional; unknown fields are rejected.
#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Option<String>,
    /// Polynomial file; relative paths resolve against the config's directory.
    pub polynomial: Option<PathBuf>,
    /// Exponents of the power sum `Σ |z_k|^{2 m_k}`, used without `polynomial`.
    pub m: Option<Vec<u32>>,
    pub s: Option<f64>,
    pub r: Option<f64>,
    pub s_values: Option<Vec<f64>>,
    pub r_values: Option<Vec<f64>>,
    /// `example11` or `normal`.
    pub sequence: Option<String>,
    pub indices: Option<Vec<u64>>,
    pub count: Option<usize>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub grid: Option<usize>,
    pub a_grid: Option<Vec<f64>>,
    pub deltas: Option<Vec<f64>>,
    /// `ellipsoid` or `graph`.
    pub model: Option<String>,
    pub tube: Option<f64>,
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.into(), source })?;
        let mut cfg: Self =
            serde_json::from_str(&text).map_err(|source| ConfigError::Schema { path: path.into(), source })?;
        if let (Some(p), Some(dir)) = (&cfg.polynomial, path.parent()) {
            if p.is_relative() {
                cfg.polynomial = Some(dir.join(p));
            }
        }
        Ok(cfg)
    }
}

/// Flags that override the config file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub experiment: Option<String>,
}

/// Fully resolved parameters; serialized into the run manifest.
#[derive(Clone, Debug, Serialize)]
pub struct Settings {
    pub experiment: Option<String>,
    pub polynomial: Option<PathBuf>,
    pub m: Vec<u32>,
    pub s: f64,
    pub r: Option<f64>,
    pub s_values: Vec<f64>,
    pub r_values: Vec<f64>,
    pub sequence: String,
    pub indices: Vec<u64>,
    pub count: usize,
    pub samples: Option<usize>,
    pub seed: u64,
    pub grid: usize,
    pub a_grid: Option<Vec<f64>>,
    pub deltas: Vec<f64>,
    pub model: String,
    pub tube: f64,
    #[serde(skip)]
    pub out: PathBuf,
}

fn value_err(field: &'static str, message: impl Into<String>) -> ConfigError {
    ConfigError::Value { field, message: message.into() }
}

impl Settings {
    pub fn resolve(cfg: ExperimentConfig, flags: Overrides) -> Result<Self, ConfigError> {
        let s = cfg.s.unwrap_or(0.5);
        let settings = Self {
            experiment: flags.experiment.or(cfg.experiment),
            polynomial: cfg.polynomial,
            m: cfg.m.unwrap_or_else(|| vec![2]),
            s,
            r: cfg.r,
            s_values: cfg.s_values.unwrap_or_else(|| vec![s]),
            r_values: cfg.r_values.unwrap_or_else(|| vec![0.25, 0.5, 0.75]),
            sequence: cfg.sequence.unwrap_or_else(|| "example11".into()),
            indices: cfg.indices.unwrap_or_else(|| vec![10, 100, 1000, 10_000]),
            count: cfg.count.unwrap_or(60),
            samples: flags.samples.or(cfg.samples),
            seed: flags.seed.or(cfg.seed).unwrap_or(1),
            grid: cfg.grid.unwrap_or(200),
            a_grid: cfg.a_grid,
            deltas: cfg.deltas.unwrap_or_else(|| vec![1e-2, 1e-3, 1e-4, 1e-5]),
            model: cfg.model.unwrap_or_else(|| "ellipsoid".into()),
            tube: cfg.tube.unwrap_or(0.05),
            out: flags.out.or(cfg.out).unwrap_or_else(|| PathBuf::from("out")),
        };
        settings.validate()?;
        Ok(settings)
    }

    fn validate(&self) -> Result<(), ConfigError> {
        let unit = |x: f64| x > 0.0 && x < 1.0;
        if !(self.s > 0.0 && self.s <= 1.0) || !self.s_values.iter().all(|&s| s > 0.0 && s <= 1.0) {
            return Err(value_err("s", "must lie in (0, 1]"));
        }
        if !self.r.map_or(true, unit) || !self.r_values.iter().all(|&r| unit(r)) {
            return Err(value_err("r", "must lie in (0, 1)"));
        }
        if self.indices.is_empty() || self.indices.contains(&0) {
            return Err(value_err("indices", "must be non-empty and start at 1"));
        }
        if self.samples == Some(0) || self.count == 0 || self.grid == 0 {
            return Err(value_err("samples", "counts must be positive"));
        }
        if self.deltas.len() < 3 || !self.deltas.iter().all(|&d| unit(d)) {
            return Err(value_err("deltas", "need at least three values in (0, 1)"));
        }
        if let Some(g) = &self.a_grid {
            if g.is_empty() || !g.iter().all(|&a| (0.0..1.0).contains(&a)) {
                return Err(value_err("a_grid", "values must lie in [0, 1)"));
            }
        }
        if !matches!(self.model.as_str(), "ellipsoid" | "graph") {
            return Err(value_err("model", format!("expected `ellipsoid` or `graph`, got `{}`", self.model)));
        }
        if !(self.tube >= 0.0) {
            return Err(value_err("tube", "must be non-negative"));
        }
        self.sequence_kind()?;
        Ok(())
    }

    pub fn sequence_kind(&self) -> Result<SequenceKind, ConfigError> {
        match self.sequence.as_str() {
            "example11" => Ok(SequenceKind::Example11),
            "normal" => Ok(SequenceKind::Normal),
            other => Err(value_err("sequence", format!("expected `example11` or `normal`, got `{other}`"))),
        }
    }

    pub fn samples_or(&self, default: usize) -> usize {
        self.samples.unwrap_or(default)
    }

    pub fn domain(&self) -> Result<GeneralEllipsoid, ConfigError> {
        match &self.polynomial {
            Some(path) => {
                let poly_err = |message: String| ConfigError::Polynomial { path: path.clone(), message };
                let text = fs::read_to_string(path).map_err(|e| poly_err(e.to_string()))?;
                let file: PolynomialFile = serde_json::from_str(&text).map_err(|e| poly_err(e.to_string()))?;
                let p = file.into_polynomial().map_err(|e| poly_err(e.to_string()))?;
                GeneralEllipsoid::new(p).map_err(|e| poly_err(e.to_string()))
            }
            None => GeneralEllipsoid::power_sum(self.m.clone()).map_err(|e| value_err("m", e.to_string())),
        }
    }
}
