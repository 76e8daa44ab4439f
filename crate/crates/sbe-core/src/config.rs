//! JSON experiment configuration shared by the library and the CLI.
//!
//! Validation reports the failing field by name so front ends can surface it
//! on stderr and exit with a dedicated status code.

use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

use crate::env::{CorruptionConfig, InstanceConfig};
use crate::learner::AlgorithmConfig;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("invalid config field {field}: {reason}")]
    Invalid { field: String, reason: String },
}

fn invalid(field: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        field: field.into(),
        reason: reason.into(),
    }
}

/// A single-experiment configuration: one instance, one algorithm, one
/// corruption strategy, replicated over `seeds`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub instance: InstanceConfig,
    pub algorithm: AlgorithmConfig,
    #[serde(default)]
    pub corruption: CorruptionConfig,
    pub horizon: u64,
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default = "default_true")]
    pub record_trace: bool,
}

/// Grid configuration: the same instance template swept over corruption
/// budgets, dimensions, and algorithms.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepConfig {
    pub instance: InstanceConfig,
    pub algorithms: Vec<AlgorithmConfig>,
    #[serde(default)]
    pub corruption: CorruptionConfig,
    pub budgets: Vec<f64>,
    #[serde(default)]
    pub dims: Option<Vec<usize>>,
    pub horizon: u64,
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub record_traces: bool,
    #[serde(default)]
    pub check_lemmas: bool,
}

fn default_true() -> bool {
    true
}

pub fn load_experiment(path: &Path) -> Result<ExperimentConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let cfg: ExperimentConfig =
        serde_json::from_str(&text).map_err(|e| ConfigError::Parse(e.to_string()))?;
    validate_experiment(&cfg)?;
    Ok(cfg)
}

pub fn load_sweep(path: &Path) -> Result<SweepConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let cfg: SweepConfig =
        serde_json::from_str(&text).map_err(|e| ConfigError::Parse(e.to_string()))?;
    validate_sweep(&cfg)?;
    Ok(cfg)
}

pub fn validate_experiment(cfg: &ExperimentConfig) -> Result<(), ConfigError> {
    validate_instance(&cfg.instance)?;
    validate_algorithm(&cfg.algorithm, "algorithm")?;
    validate_corruption(&cfg.corruption)?;
    if cfg.horizon == 0 {
        return Err(invalid("horizon", "must be at least 1"));
    }
    if cfg.seeds.is_empty() {
        return Err(invalid("seeds", "must list at least one seed"));
    }
    Ok(())
}

pub fn validate_sweep(cfg: &SweepConfig) -> Result<(), ConfigError> {
    validate_instance(&cfg.instance)?;
    if cfg.algorithms.is_empty() {
        return Err(invalid("algorithms", "must list at least one algorithm"));
    }
    for (i, a) in cfg.algorithms.iter().enumerate() {
        validate_algorithm(a, &format!("algorithms[{i}]"))?;
    }
    validate_corruption(&cfg.corruption)?;
    if cfg.budgets.is_empty() {
        return Err(invalid("budgets", "must list at least one budget"));
    }
    if cfg.budgets.iter().any(|&b| b < 0.0 || !b.is_finite()) {
        return Err(invalid("budgets", "must be finite and nonnegative"));
    }
    if let Some(dims) = &cfg.dims {
        if dims.is_empty() || dims.contains(&0) {
            return Err(invalid("dims", "must be nonempty positive dimensions"));
        }
    }
    if cfg.horizon == 0 {
        return Err(invalid("horizon", "must be at least 1"));
    }
    if cfg.seeds.is_empty() {
        return Err(invalid("seeds", "must list at least one seed"));
    }
    Ok(())
}

fn validate_instance(cfg: &InstanceConfig) -> Result<(), ConfigError> {
    if cfg.d == 0 {
        return Err(invalid("instance.d", "must be at least 1"));
    }
    if cfg.delta_floor < 0.0 {
        return Err(invalid("instance.delta_floor", "must be nonnegative"));
    }
    if let Some(scale) = cfg.scale {
        if scale <= 0.0 || scale.is_nan() {
            return Err(invalid("instance.scale", "must be positive"));
        }
    }
    if cfg.family == "file" {
        let Some(path) = &cfg.path else {
            return Err(invalid("instance.path", "required when family is \"file\""));
        };
        if !path.exists() {
            return Err(invalid(
                "instance.path",
                format!("{} does not exist", path.display()),
            ));
        }
    }
    Ok(())
}

fn validate_algorithm(cfg: &AlgorithmConfig, field: &str) -> Result<(), ConfigError> {
    if cfg.delta <= 0.0 || cfg.delta >= 1.0 || cfg.delta.is_nan() {
        return Err(invalid(&format!("{field}.delta"), "must lie in (0, 1)"));
    }
    if cfg.zeta_scale <= 0.0 || !cfg.zeta_scale.is_finite() {
        return Err(invalid(
            &format!("{field}.zeta_scale"),
            "must be positive and finite",
        ));
    }
    if cfg.lambda <= 0.0 || !cfg.lambda.is_finite() {
        return Err(invalid(
            &format!("{field}.lambda"),
            "must be positive and finite",
        ));
    }
    Ok(())
}

fn validate_corruption(cfg: &CorruptionConfig) -> Result<(), ConfigError> {
    if cfg.budget < 0.0 || !cfg.budget.is_finite() {
        return Err(invalid(
            "corruption.budget",
            "must be finite and nonnegative",
        ));
    }
    if cfg.gain <= 0.0 || !cfg.gain.is_finite() {
        return Err(invalid("corruption.gain", "must be positive and finite"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::NoiseKind;

    fn minimal_experiment_json() -> String {
        r#"{
            "instance": {"family": "box", "d": 2, "scale": 0.7, "theta": [0.5, 0.1]},
            "algorithm": {"name": "sbe", "zeta_scale": 1e-4},
            "corruption": {"name": "none"},
            "horizon": 1000,
            "seeds": [1, 2]
        }"#
        .into()
    }

    #[test]
    fn minimal_config_parses_with_defaults() {
        let cfg: ExperimentConfig = serde_json::from_str(&minimal_experiment_json()).unwrap();
        validate_experiment(&cfg).unwrap();
        assert_eq!(cfg.instance.noise, NoiseKind::GaussianStd);
        assert!(cfg.record_trace);
        assert!((cfg.algorithm.delta - 0.1).abs() < 1e-15);
        assert_eq!(cfg.instance.delta_floor, 0.05);
    }

    #[test]
    fn invalid_fields_are_named() {
        let mut cfg: ExperimentConfig = serde_json::from_str(&minimal_experiment_json()).unwrap();
        cfg.seeds.clear();
        match validate_experiment(&cfg) {
            Err(ConfigError::Invalid { field, .. }) => assert_eq!(field, "seeds"),
            other => panic!("expected Invalid, got {other:?}"),
        }
        let mut cfg: ExperimentConfig = serde_json::from_str(&minimal_experiment_json()).unwrap();
        cfg.algorithm.delta = 1.5;
        match validate_experiment(&cfg) {
            Err(ConfigError::Invalid { field, .. }) => assert_eq!(field, "algorithm.delta"),
            other => panic!("expected Invalid, got {other:?}"),
        }
    }

    #[test]
    fn missing_polytope_file_is_reported_with_its_path() {
        let mut cfg: ExperimentConfig = serde_json::from_str(&minimal_experiment_json()).unwrap();
        cfg.instance.family = "file".into();
        cfg.instance.path = Some("/nonexistent/poly.json".into());
        match validate_experiment(&cfg) {
            Err(ConfigError::Invalid { field, reason }) => {
                assert_eq!(field, "instance.path");
                assert!(reason.contains("/nonexistent/poly.json"));
            }
            other => panic!("expected Invalid, got {other:?}"),
        }
    }
}
