//! Experiment configuration.

use serde::{Deserialize, Serialize};

use super::alternatives::AlternativeFamily;
use crate::dyadic::ProbabilityVector;
use crate::error::{Error, Result};
use crate::gof::order_statistic_index;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Level,
    PowerCurve,
    RateRegression,
    Discrete,
    Adaptive,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Level => "level",
            ExperimentKind::PowerCurve => "power-curve",
            ExperimentKind::RateRegression => "rate-regression",
            ExperimentKind::Discrete => "discrete",
            ExperimentKind::Adaptive => "adaptive",
        }
    }
}

fn default_gamma() -> Vec<f64> {
    vec![0.05]
}
fn default_beta() -> Vec<f64> {
    vec![0.1]
}
fn default_one() -> Vec<f64> {
    vec![1.0]
}
fn default_trials() -> usize {
    1000
}
fn default_replicates() -> usize {
    crate::gof::DEFAULT_REPLICATES
}
fn default_iterations() -> usize {
    12
}
fn default_tolerance() -> f64 {
    crate::adaptive::DEFAULT_TOLERANCE
}

/// A grid of settings plus Monte Carlo budgets.
///
/// An empty `L` list selects `L*` from `(n, alpha, s)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    #[serde(default)]
    pub n: Vec<usize>,
    #[serde(default)]
    pub alpha: Vec<f64>,
    /// Budgets are `alpha · n^alpha_exponent`.
    #[serde(default)]
    pub alpha_exponent: f64,
    #[serde(default = "default_gamma")]
    pub gamma: Vec<f64>,
    #[serde(default = "default_beta")]
    pub beta: Vec<f64>,
    #[serde(default = "default_one")]
    pub s: Vec<f64>,
    #[serde(default = "default_one", rename = "R")]
    pub radius: Vec<f64>,
    #[serde(default)]
    pub d: Vec<usize>,
    #[serde(default, rename = "L")]
    pub resolution: Vec<usize>,
    /// Alternative amplitudes.
    #[serde(default)]
    pub epsilon: Vec<f64>,
    #[serde(default)]
    pub alternative: AlternativeFamily,
    /// Add a point at the upper-bound separation with the pinned constant.
    #[serde(default)]
    pub at_separation: bool,
    /// Overrides the pinned constant.
    #[serde(default)]
    pub constant: Option<f64>,
    /// Bisect for the critical amplitude (discrete experiments).
    #[serde(default)]
    pub critical: bool,
    #[serde(default)]
    pub p0: Option<ProbabilityVector>,
    /// Highest released level of the adaptive channel.
    #[serde(default)]
    pub max_level: Option<u32>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_replicates")]
    pub replicates: usize,
    #[serde(default = "default_iterations")]
    pub iterations: usize,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default)]
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn new(kind: ExperimentKind) -> Self {
        ExperimentConfig {
            kind,
            n: Vec::new(),
            alpha: Vec::new(),
            alpha_exponent: 0.0,
            gamma: default_gamma(),
            beta: default_beta(),
            s: default_one(),
            radius: default_one(),
            d: Vec::new(),
            resolution: Vec::new(),
            epsilon: Vec::new(),
            alternative: AlternativeFamily::default(),
            at_separation: false,
            constant: None,
            critical: false,
            p0: None,
            max_level: None,
            trials: default_trials(),
            replicates: default_replicates(),
            iterations: default_iterations(),
            tolerance: default_tolerance(),
            seed: 0,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid experiment config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn budget(&self, alpha: f64, n: usize) -> f64 {
        alpha * (n as f64).powf(self.alpha_exponent)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.trials < 100 {
            return fail(format!("at least 100 trials per grid point required, got {}", self.trials));
        }
        if self.n.is_empty() || self.alpha.is_empty() {
            return fail("grid needs at least one n and one alpha".into());
        }
        if let Some(n) = self.n.iter().find(|&&n| n < 2) {
            return fail(format!("sample size {n} below 2"));
        }
        if let Some(a) = self.alpha.iter().find(|a| !(**a > 0.0 && a.is_finite())) {
            return fail(format!("privacy budget {a} must be positive"));
        }
        if !self.alpha_exponent.is_finite() {
            return fail("alpha exponent must be finite".into());
        }
        for (name, values) in [("gamma", &self.gamma), ("beta", &self.beta)] {
            if values.is_empty() {
                return fail(format!("{name} grid is empty"));
            }
            if let Some(v) = values.iter().find(|v| !(**v > 0.0 && **v < 1.0)) {
                return fail(format!("{name} = {v} outside (0, 1)"));
            }
        }
        for (name, values) in [("s", &self.s), ("R", &self.radius)] {
            if values.is_empty() || values.iter().any(|v| !(*v > 0.0)) {
                return fail(format!("{name} grid must be nonempty and positive"));
            }
        }
        if self.resolution.contains(&0) {
            return fail("resolutions must be positive".into());
        }
        if let Some(e) = self.epsilon.iter().find(|e| !(**e >= 0.0 && e.is_finite())) {
            return fail(format!("amplitude {e} must be nonnegative"));
        }
        if let Some(c) = self.constant {
            if !(c > 0.0 && c.is_finite()) {
                return fail(format!("constant {c} must be positive"));
            }
        }
        if !(self.tolerance > 0.0) {
            return fail("tolerance must be positive".into());
        }
        if self.iterations == 0 {
            return fail("at least one bisection iteration required".into());
        }
        for &g in &self.gamma {
            order_statistic_index(self.replicates, g)?;
        }
        match self.kind {
            ExperimentKind::Discrete => {
                if self.d.is_empty() || self.d.iter().any(|&d| d < 2) {
                    return fail("discrete experiments need categories d >= 2".into());
                }
                if let Some(p0) = &self.p0 {
                    if self.d.iter().any(|&d| d != p0.d()) {
                        return fail("p0 length must match every d".into());
                    }
                }
            }
            ExperimentKind::RateRegression => {
                if self.n.len() < 4 {
                    return fail(format!("rate regression needs at least 4 sample sizes, got {}", self.n.len()));
                }
                let single = [self.alpha.len(), self.gamma.len(), self.beta.len(), self.s.len()];
                if single.iter().any(|&l| l != 1) || self.resolution.len() > 1 {
                    return fail("rate regression takes a single alpha, gamma, beta, s and L".into());
                }
            }
            ExperimentKind::Adaptive => {
                for &g in &self.gamma {
                    for &n in &self.n {
                        let released = crate::channel::max_adaptive_level(n).min(self.max_level.unwrap_or(u32::MAX)) + 1;
                        order_statistic_index(self.replicates, g / released as f64)?;
                    }
                }
            }
            _ => {}
        }
        Ok(())
    }
}
