//! `key=value` run configuration.

use std::collections::HashSet;

use choquard_core::constants::critical_exponents;
use choquard_core::reduced_energy::DEGENERACY_THRESHOLD;
use choquard_core::solver::check_schedule;
use choquard_core::{ProblemParams, QuadSpec, SolverConfig};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid value for `{key}`: {msg}")]
    Invalid { key: String, msg: String },
    #[error("cannot read config: {0}")]
    Io(String),
}

/// Every accepted key; anything else is rejected.
pub const KEYS: &[&str] = &[
    "N",
    "mu",
    "eps",
    "eps_schedule",
    "lambda",
    "radial_nodes",
    "angular_nodes",
    "refinement_levels",
    "truncation_radius",
    "tol",
    "max_iter",
    "degeneracy_threshold",
    "tau_max",
    "tau_points",
    "lambda_min",
    "lambda_max",
    "lambda_points",
    "sample_points",
];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub dim: usize,
    pub mu: f64,
    pub eps: f64,
    pub eps_schedule: Vec<f64>,
    /// Bubble concentration for the `bubble` command; `eps^{-1/2}` when unset.
    pub lambda: Option<f64>,
    pub quad: QuadSpec,
    pub tol: f64,
    pub max_iter: usize,
    pub degeneracy_threshold: f64,
    pub tau_max: f64,
    pub tau_points: usize,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub lambda_points: usize,
    pub sample_points: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            dim: 5,
            mu: 0.5,
            eps: 0.05,
            eps_schedule: vec![0.1, 0.05, 0.02, 0.01],
            lambda: None,
            quad: QuadSpec { radial_nodes: 256, angular_nodes: 128, truncation_radius: 100.0, refinement_levels: 40 },
            tol: 1e-9,
            max_iter: 50,
            degeneracy_threshold: DEGENERACY_THRESHOLD,
            tau_max: 0.5,
            tau_points: 11,
            lambda_min: 0.25,
            lambda_max: 4.0,
            lambda_points: 33,
            sample_points: 20,
        }
    }
}

impl RunConfig {
    pub fn params(&self) -> ProblemParams {
        critical_exponents(self.dim, self.mu).expect("validated at parse time")
    }

    pub fn solver(&self) -> SolverConfig {
        SolverConfig { quad: self.quad, tol: self.tol, max_iter: self.max_iter }
    }

    pub fn bubble_lambda(&self) -> f64 {
        self.lambda.unwrap_or(self.eps.powf(-0.5))
    }

    fn validate(&self) -> Result<(), ConfigError> {
        let bad = |key: &str, msg: String| Err(ConfigError::Invalid { key: key.into(), msg });
        if let Err(e) = critical_exponents(self.dim, self.mu) {
            let key = if self.dim < 3 { "N" } else { "mu" };
            return bad(key, e.to_string());
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return bad("eps", format!("must lie in (0, 1), got {}", self.eps));
        }
        if let Err(e) = check_schedule(&self.eps_schedule) {
            return bad("eps_schedule", e.to_string());
        }
        if let Some(l) = self.lambda {
            if !(l > 0.0 && l.is_finite()) {
                return bad("lambda", format!("must be positive, got {l}"));
            }
        }
        let q = &self.quad;
        if q.radial_nodes < 8 {
            return bad("radial_nodes", format!("must be at least 8, got {}", q.radial_nodes));
        }
        if q.angular_nodes < 8 {
            return bad("angular_nodes", format!("must be at least 8, got {}", q.angular_nodes));
        }
        if q.refinement_levels < 1 {
            return bad("refinement_levels", "must be at least 1".into());
        }
        if !(q.truncation_radius >= 50.0 && q.truncation_radius.is_finite()) {
            return bad("truncation_radius", format!("must be at least 50, got {}", q.truncation_radius));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return bad("tol", format!("must be positive, got {}", self.tol));
        }
        if self.max_iter == 0 {
            return bad("max_iter", "must be at least 1".into());
        }
        if !(self.degeneracy_threshold >= 0.0 && self.degeneracy_threshold.is_finite()) {
            return bad("degeneracy_threshold", format!("must be non-negative, got {}", self.degeneracy_threshold));
        }
        if !(self.tau_max >= 0.0 && self.tau_max < self.quad.truncation_radius) {
            return bad("tau_max", format!("must lie in [0, truncation_radius), got {}", self.tau_max));
        }
        if !(self.lambda_min > 0.0 && self.lambda_max > self.lambda_min && self.lambda_max.is_finite()) {
            return bad("lambda_max", format!("need 0 < lambda_min < lambda_max, got {} and {}", self.lambda_min, self.lambda_max));
        }
        for (key, v) in [("tau_points", self.tau_points), ("lambda_points", self.lambda_points), ("sample_points", self.sample_points)] {
            if v < 2 {
                return bad(key, format!("must be at least 2, got {v}"));
            }
        }
        Ok(())
    }
}

fn parse_value<T: std::str::FromStr>(line: usize, key: &str, raw: &str) -> Result<T, ConfigError> {
    raw.parse::<T>().map_err(|_| ConfigError::Parse { line, msg: format!("cannot parse `{raw}` as a value for `{key}`") })
}

fn parse_list(line: usize, key: &str, raw: &str) -> Result<Vec<f64>, ConfigError> {
    raw.split(',').map(|s| parse_value::<f64>(line, key, s.trim())).collect()
}

/// Parses `key=value` lines. Blank lines and text after `#` are ignored;
/// unknown or repeated keys are errors. Omitted keys take their defaults.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut cfg = RunConfig::default();
    let mut seen = HashSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let Some((key, value)) = body.split_once('=') else {
            return Err(ConfigError::Parse { line, msg: format!("expected key=value, got `{body}`") });
        };
        let (key, value) = (key.trim(), value.trim());
        if !KEYS.contains(&key) {
            return Err(ConfigError::Parse { line, msg: format!("unknown key `{key}`") });
        }
        if !seen.insert(key.to_string()) {
            return Err(ConfigError::Parse { line, msg: format!("duplicate key `{key}`") });
        }
        match key {
            "N" => cfg.dim = parse_value(line, key, value)?,
            "mu" => cfg.mu = parse_value(line, key, value)?,
            "eps" => cfg.eps = parse_value(line, key, value)?,
            "eps_schedule" => cfg.eps_schedule = parse_list(line, key, value)?,
            "lambda" => cfg.lambda = Some(parse_value(line, key, value)?),
            "radial_nodes" => cfg.quad.radial_nodes = parse_value(line, key, value)?,
            "angular_nodes" => cfg.quad.angular_nodes = parse_value(line, key, value)?,
            "refinement_levels" => cfg.quad.refinement_levels = parse_value(line, key, value)?,
            "truncation_radius" => cfg.quad.truncation_radius = parse_value(line, key, value)?,
            "tol" => cfg.tol = parse_value(line, key, value)?,
            "max_iter" => cfg.max_iter = parse_value(line, key, value)?,
            "degeneracy_threshold" => cfg.degeneracy_threshold = parse_value(line, key, value)?,
            "tau_max" => cfg.tau_max = parse_value(line, key, value)?,
            "tau_points" => cfg.tau_points = parse_value(line, key, value)?,
            "lambda_min" => cfg.lambda_min = parse_value(line, key, value)?,
            "lambda_max" => cfg.lambda_max = parse_value(line, key, value)?,
            "lambda_points" => cfg.lambda_points = parse_value(line, key, value)?,
            "sample_points" => cfg.sample_points = parse_value(line, key, value)?,
            _ => unreachable!("key list and match arms agree"),
        }
    }
    cfg.validate()?;
    Ok(cfg)
}
