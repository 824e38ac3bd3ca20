use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::altestimators::GsConfig;
use crate::arfima::ArfimaModel;
use crate::error::{Error, Result};
use crate::jackknife::{IterationConfig, Scheme};

/// Estimators the harness can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimatorKind {
    Lpr,
    JackOpt,
    JackChambers,
    JackFeasible,
    Gs,
    Mle,
    Pw,
}

impl EstimatorKind {
    pub const ALL: [EstimatorKind; 7] = [
        EstimatorKind::Lpr,
        EstimatorKind::JackOpt,
        EstimatorKind::JackChambers,
        EstimatorKind::JackFeasible,
        EstimatorKind::Gs,
        EstimatorKind::Mle,
        EstimatorKind::Pw,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            EstimatorKind::Lpr => "lpr",
            EstimatorKind::JackOpt => "jack-opt",
            EstimatorKind::JackChambers => "jack-chambers",
            EstimatorKind::JackFeasible => "jack-feasible",
            EstimatorKind::Gs => "gs",
            EstimatorKind::Mle => "mle",
            EstimatorKind::Pw => "pw",
        }
    }

    pub fn is_jackknife(&self) -> bool {
        matches!(self, EstimatorKind::JackOpt | EstimatorKind::JackChambers | EstimatorKind::JackFeasible)
    }
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EstimatorKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown estimator '{s}'")))
    }
}

/// What the estimators may assume about the short-memory part.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Knowledge {
    /// Short-memory coefficients are known.
    TrueParams,
    /// Estimated with the true orders.
    Estimated,
    /// Estimated with the configured orders `(p, q)`.
    Misspecified,
}

impl Knowledge {
    pub fn as_str(&self) -> &'static str {
        match self {
            Knowledge::TrueParams => "true-params",
            Knowledge::Estimated => "estimated",
            Knowledge::Misspecified => "misspecified",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::Config(format!("unknown output format '{other}'"))),
        }
    }
}

fn default_alpha() -> f64 {
    0.65
}

fn default_reps() -> usize {
    5000
}

fn default_knowledge() -> Knowledge {
    Knowledge::TrueParams
}

const KNOWN_KEYS: &[&str] = &[
    "d", "ar", "phi", "ma", "theta", "sigma2", "mu", "n", "alpha", "m_values", "schemes", "estimators", "knowledge",
    "p", "q", "reps", "seed", "output", "format", "iteration", "gs",
];

/// A Monte Carlo design. The JSON form is flat: model fields (`d`, `phi`,
/// `theta`, `sigma2`, `mu`) sit next to the experiment fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(flatten)]
    pub model: ArfimaModel,
    pub n: usize,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default)]
    pub m_values: Vec<usize>,
    #[serde(default)]
    pub schemes: Vec<Scheme>,
    pub estimators: Vec<EstimatorKind>,
    #[serde(default = "default_knowledge")]
    pub knowledge: Knowledge,
    /// Fitted AR order under misspecification.
    #[serde(default)]
    pub p: Option<usize>,
    /// Fitted MA order under misspecification.
    #[serde(default)]
    pub q: Option<usize>,
    #[serde(default = "default_reps")]
    pub reps: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output: Option<String>,
    #[serde(default)]
    pub format: OutputFormat,
    #[serde(default)]
    pub iteration: IterationConfig,
    #[serde(default)]
    pub gs: GsConfig,
}

impl ExperimentConfig {
    /// Minimal configuration with defaults for everything optional.
    pub fn new(model: ArfimaModel, n: usize, estimators: Vec<EstimatorKind>) -> Self {
        Self {
            model,
            n,
            alpha: default_alpha(),
            m_values: vec![],
            schemes: vec![],
            estimators,
            knowledge: default_knowledge(),
            p: None,
            q: None,
            reps: default_reps(),
            seed: 0,
            output: None,
            format: OutputFormat::Csv,
            iteration: IterationConfig::default(),
            gs: GsConfig::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        // serde cannot combine `flatten` with `deny_unknown_fields`, so typos
        // are caught here instead.
        if let Some(obj) = value.as_object() {
            if let Some(k) = obj.keys().find(|k| !KNOWN_KEYS.contains(&k.as_str())) {
                return Err(Error::Config(format!("unknown configuration key '{k}'")));
            }
        }
        let cfg: Self = serde_json::from_value(value).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Orders `(p, q)` used whenever short-memory parameters are estimated.
    pub fn fitted_orders(&self) -> (usize, usize) {
        match self.knowledge {
            Knowledge::Misspecified => (self.p.unwrap_or(0), self.q.unwrap_or(0)),
            _ => (self.model.ar.len(), self.model.ma.len()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate().map_err(|e| Error::Config(e.to_string()))?;
        if self.reps == 0 {
            return Err(Error::Config("reps must be at least 1".into()));
        }
        if self.estimators.is_empty() {
            return Err(Error::Config("estimator list is empty".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Config(format!("alpha must lie in (0, 1), got {}", self.alpha)));
        }
        if self.estimators.iter().any(|e| e.is_jackknife()) && (self.m_values.is_empty() || self.schemes.is_empty()) {
            return Err(Error::Config("jackknife estimators need m_values and schemes".into()));
        }
        for &m in &self.m_values {
            if m < 2 || !self.n.is_multiple_of(m) {
                return Err(Error::Config(format!("n = {} is not divisible by m = {m} (m >= 2 required)", self.n)));
            }
        }
        if self.knowledge == Knowledge::Misspecified && (self.p.is_none() || self.q.is_none()) {
            return Err(Error::Config("misspecified runs need p and q".into()));
        }
        self.gs.validate()?;
        Ok(())
    }
}
