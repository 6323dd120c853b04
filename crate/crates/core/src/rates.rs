//! Separation-rate kernels, the indistinguishability amplitude and the Haar
//! perturbation family used to probe the lower bound.
//!
//! All kernels are returned without their unspecified constants.

use serde::{Deserialize, Serialize};

use crate::dyadic::PiecewiseConstantDensity;
use crate::error::{domain, Error, Result};

/// `z_α = e^{2α} − e^{−2α}`.
pub fn z_alpha(alpha: f64) -> Result<f64> {
    if !(alpha >= 0.0) {
        return domain(format!("privacy budget must be nonnegative, got {alpha}"));
    }
    Ok(2.0 * (2.0 * alpha).sinh())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateQuery {
    pub n: usize,
    pub alpha: f64,
    pub gamma: f64,
    pub beta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[serde(default, rename = "R", skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
}

impl RateQuery {
    pub fn continuous(n: usize, alpha: f64, s: f64) -> Self {
        RateQuery { n, alpha, gamma: 0.05, beta: 0.05, s: Some(s), radius: Some(1.0), d: None }
    }

    pub fn discrete(n: usize, alpha: f64, d: usize) -> Self {
        RateQuery { n, alpha, gamma: 0.05, beta: 0.05, s: None, radius: None, d: Some(d) }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return domain("sample size must be positive");
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return domain(format!("privacy budget must be positive, got {}", self.alpha));
        }
        for (name, v) in [("gamma", self.gamma), ("beta", self.beta)] {
            if !(v > 0.0 && v < 1.0) {
                return domain(format!("{name} must lie in (0, 1), got {v}"));
            }
        }
        if let Some(s) = self.s {
            if !(s > 0.0) {
                return domain(format!("smoothness must be positive, got {s}"));
            }
        }
        if let Some(r) = self.radius {
            if !(r > 0.0) {
                return domain(format!("radius must be positive, got {r}"));
            }
        }
        if let Some(d) = self.d {
            if d < 2 {
                return domain(format!("need at least 2 categories, got {d}"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateBounds {
    pub lower: f64,
    pub upper: f64,
}

/// `(n a²)^{−2s/(4s+3)} ∨ n^{−2s/(4s+1)}`.
pub fn continuous_kernel(n: usize, a: f64, s: f64) -> f64 {
    let nf = n as f64;
    let private = (nf * a * a).powf(-2.0 * s / (4.0 * s + 3.0));
    let classical = nf.powf(-2.0 * s / (4.0 * s + 1.0));
    private.max(classical)
}

/// `(n a²)^{−1/2} d^{1/4} ∨ n^{−1/2} d^{−1/4}`.
pub fn discrete_kernel(n: usize, a: f64, d: usize) -> f64 {
    let nf = n as f64;
    let df = d as f64;
    let private = (nf * a * a).powf(-0.5) * df.powf(0.25);
    let classical = nf.powf(-0.5) * df.powf(-0.25);
    private.max(classical)
}

/// `(nα²/log^{5/2} n)^{−2s/(4s+3)} ∨ (n/√log n)^{−2s/(4s+1)}`.
pub fn adaptive_kernel(n: usize, alpha: f64, s: f64) -> f64 {
    let nf = n as f64;
    let log = nf.ln();
    let private = (nf * alpha * alpha / log.powf(2.5)).powf(-2.0 * s / (4.0 * s + 3.0));
    let classical = (nf / log.sqrt()).powf(-2.0 * s / (4.0 * s + 1.0));
    private.max(classical)
}

pub fn continuous_rate_bounds(q: &RateQuery) -> Result<RateBounds> {
    q.validate()?;
    let s = q.s.ok_or_else(|| Error::Domain("continuous bounds need a smoothness".into()))?;
    Ok(RateBounds { lower: continuous_kernel(q.n, z_alpha(q.alpha)?, s), upper: continuous_kernel(q.n, q.alpha, s) })
}

pub fn discrete_rate_bounds(q: &RateQuery) -> Result<RateBounds> {
    q.validate()?;
    let d = q.d.ok_or_else(|| Error::Domain("discrete bounds need a number of categories".into()))?;
    Ok(RateBounds { lower: discrete_kernel(q.n, z_alpha(q.alpha)?, d), upper: discrete_kernel(q.n, q.alpha, d) })
}

/// Calculator output record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateRecord {
    pub query: RateQuery,
    pub lower_kernel: f64,
    pub upper_kernel: f64,
}

/// Squared projected distance `D` solving
/// `D = C (‖f‖ + ‖f0‖ + σ²) √L / n` with `‖f‖² = ‖f0‖² + D`.
///
/// The norm identity is exact when `f0` is uniform and `f − f0` lives on the
/// test grid.
pub fn upper_separation(constant: f64, f0_norm: f64, sigma: f64, resolution: usize, n: usize) -> f64 {
    let k = constant * (resolution as f64).sqrt() / n as f64;
    let b = f0_norm * f0_norm;
    let c = f0_norm + sigma * sigma;
    // y = ‖f‖ solves y² − b = k (y + c).
    let y = 0.5 * (k + (k * k + 4.0 * (b + k * c)).sqrt());
    (y * y - b).max(0.0)
}

/// Largest Haar amplitude `ε` certified indistinguishable at `(γ, β)`.
pub fn indistinguishable_epsilon(
    n: usize,
    alpha: f64,
    resolution: usize,
    gamma: f64,
    beta: f64,
    smoothness: Option<(f64, f64)>,
) -> Result<f64> {
    RateQuery { n, alpha, gamma, beta, s: smoothness.map(|p| p.0), radius: smoothness.map(|p| p.1), d: None }
        .validate()?;
    if resolution == 0 {
        return domain("resolution must be positive");
    }
    let slack = 1.0 - 2.0 * gamma - beta;
    if slack <= 0.0 {
        return Err(Error::Hypothesis(format!("2·gamma + beta = {} must be below 1", 2.0 * gamma + beta)));
    }
    let l = resolution as f64;
    let z = z_alpha(alpha)?;
    let information = (n as f64 * z * z).powf(-0.5) * ((1.0 + 4.0 * slack * slack).ln() / l).powf(0.25);
    let log_term = (2.0 * (2.0 * l / gamma).ln()).sqrt();
    let mut eps = information.min(1.0 / (l * log_term));
    if let Some((s, r)) = smoothness {
        eps = eps.min((r * l.powf(-s)).min(1.0) / (l * log_term));
    }
    Ok(eps)
}

/// `f_η = f0 + ε√L Σ_k η_k ψ_{L,k}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlternativeSpec {
    #[serde(rename = "L")]
    pub resolution: usize,
    pub epsilon: f64,
    pub eta: Vec<i8>,
    pub base: PiecewiseConstantDensity,
}

impl AlternativeSpec {
    /// All signs `+1` over a uniform base.
    pub fn uniform_base(resolution: usize, epsilon: f64) -> Self {
        AlternativeSpec {
            resolution,
            epsilon,
            eta: vec![1; resolution],
            base: PiecewiseConstantDensity::uniform(1),
        }
    }
}

pub fn generate_alternative(spec: &AlternativeSpec) -> Result<PiecewiseConstantDensity> {
    let l = spec.resolution;
    if l == 0 || spec.eta.len() != l {
        return Err(Error::Shape(format!("{} signs for resolution {l}", spec.eta.len())));
    }
    if spec.eta.iter().any(|&e| e != 1 && e != -1) {
        return domain("signs must be +1 or -1");
    }
    if !(spec.epsilon >= 0.0 && spec.epsilon.is_finite()) {
        return domain(format!("amplitude must be nonnegative, got {}", spec.epsilon));
    }
    let base_cells = spec.base.level_count();
    let fine = base_cells.max(2 * l);
    if fine % base_cells != 0 || fine % (2 * l) != 0 {
        return Err(Error::Resolution(format!("base grid {base_cells} is not nested with {}", 2 * l)));
    }
    let refined = spec.base.refine(fine / base_cells);
    let height = spec.epsilon * l as f64;
    let half = fine / (2 * l);
    let mut values = refined.values().to_vec();
    for (c, v) in values.iter_mut().enumerate() {
        let k = c / (2 * half);
        let sign = if (c / half) % 2 == 0 { 1.0 } else { -1.0 };
        *v += sign * f64::from(spec.eta[k]) * height;
    }
    if let Some(min) = values.iter().copied().reduce(f64::min) {
        if min < -1e-15 {
            return Err(Error::Infeasible(format!(
                "epsilon·L = {height} exceeds the base density on some half-cell"
            )));
        }
    }
    let values = values.into_iter().map(|v| v.max(0.0)).collect();
    PiecewiseConstantDensity::new(values)
}
