//! The multi-resolution aggregated test.
//!
//! Each released level `J` gets its own statistic `T̃_J`. All levels are tested
//! at a common level `u`, the largest value for which the simulated null
//! family-wise error stays below `γ`.

use serde::{Deserialize, Serialize};

use crate::channel::{check_samples, privatize, ChannelSpec, ChannelMode, PrivatizedSample};
use crate::dyadic::{project, PiecewiseConstantDensity};
use crate::error::{Error, Result};
use crate::gof::{check_level, order_statistic_index, simulate_null_statistics, statistic_rows};
use crate::rng::{purpose, Seed};

pub const DEFAULT_TOLERANCE: f64 = 1e-3;

fn level_of(resolution: usize) -> u32 {
    resolution.trailing_zeros()
}

/// `T̃_J` for every level of a multi-level sample, in channel order.
pub fn statistics_all_levels(z: &PrivatizedSample, f0: &PiecewiseConstantDensity) -> Result<Vec<f64>> {
    z.validate()?;
    z.levels
        .iter()
        .map(|block| statistic_rows(&block.data, &project(f0, block.resolution)?))
        .collect()
}

/// Outcome of the common-level search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UCalibration {
    pub u_gamma: f64,
    /// Per-level `(1−u)` thresholds.
    pub thresholds: Vec<f64>,
    /// One-based order-statistic index behind `thresholds`.
    pub order_index: usize,
    /// Simulated family-wise error at `u_gamma`.
    pub family_error: f64,
}

struct SortedNull {
    columns: Vec<Vec<f64>>,
    rows: Vec<Vec<f64>>,
}

impl SortedNull {
    fn new(null: &[Vec<f64>]) -> Result<Self> {
        let width = null.first().map(Vec::len).unwrap_or(0);
        if width == 0 || null.iter().any(|r| r.len() != width) {
            return Err(Error::Shape("null replicates must share a nonzero number of levels".into()));
        }
        let columns = (0..width)
            .map(|j| {
                let mut c: Vec<f64> = null.iter().map(|r| r[j]).collect();
                c.sort_by(f64::total_cmp);
                c
            })
            .collect();
        Ok(SortedNull { columns, rows: null.to_vec() })
    }

    fn thresholds(&self, k: usize) -> Vec<f64> {
        self.columns.iter().map(|c| c[k - 1]).collect()
    }

    fn family_error(&self, thresholds: &[f64]) -> f64 {
        let hits = self.rows.iter().filter(|r| r.iter().zip(thresholds).any(|(t, c)| t > c)).count();
        hits as f64 / self.rows.len() as f64
    }
}

/// Thresholds at common level `u` from null replicates (replicate-major).
pub fn thresholds_at(null: &[Vec<f64>], u: f64) -> Result<Vec<f64>> {
    let sorted = SortedNull::new(null)?;
    Ok(sorted.thresholds(order_statistic_index(null.len(), u)?))
}

/// Largest `u ∈ [γ/m, γ]` (to `tolerance`) whose simulated family-wise error is `≤ γ`,
/// where `m` is the number of columns.
pub fn search_u_gamma(null: &[Vec<f64>], gamma: f64, tolerance: f64) -> Result<UCalibration> {
    check_level(gamma)?;
    if !(tolerance > 0.0) {
        return Err(Error::Config("search tolerance must be positive".into()));
    }
    let sorted = SortedNull::new(null)?;
    let b = null.len();
    let m = sorted.columns.len();
    let evaluate = |u: f64| -> Result<UCalibration> {
        let order_index = order_statistic_index(b, u)?;
        let thresholds = sorted.thresholds(order_index);
        let family_error = sorted.family_error(&thresholds);
        Ok(UCalibration { u_gamma: u, thresholds, order_index, family_error })
    };
    let top = evaluate(gamma)?;
    if top.family_error <= gamma {
        return Ok(top);
    }
    // With conservative order statistics the union bound makes γ/m feasible.
    let mut lo = evaluate(gamma / m as f64)?;
    debug_assert!(lo.family_error <= gamma);
    let mut hi = gamma;
    while hi - lo.u_gamma > tolerance {
        let mid = 0.5 * (lo.u_gamma + hi);
        let probe = evaluate(mid)?;
        if probe.family_error <= gamma {
            lo = probe;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdaptiveConfig {
    pub gamma: f64,
    pub replicates: usize,
    pub tolerance: f64,
    pub seed: Seed,
    /// Release only levels `J ≤ max_level` (noise scales unchanged).
    #[serde(default)]
    pub max_level: Option<u32>,
}

impl AdaptiveConfig {
    pub fn new(gamma: f64, replicates: usize, seed: Seed) -> Self {
        AdaptiveConfig { gamma, replicates, tolerance: DEFAULT_TOLERANCE, seed, max_level: None }
    }

    pub fn channel(&self, alpha: f64, n: usize) -> Result<ChannelSpec> {
        ChannelSpec::multi_level_truncated(alpha, n, self.max_level.unwrap_or(u32::MAX))
    }

    pub fn validate(&self, released_levels: usize) -> Result<()> {
        check_level(self.gamma)?;
        if !(self.tolerance > 0.0) {
            return Err(Error::Config("search tolerance must be positive".into()));
        }
        order_statistic_index(self.replicates, self.gamma / released_levels.max(1) as f64).map(|_| ())
    }
}

/// Null replicates and the calibrated common level for a multi-level channel.
pub fn calibrate_u_gamma(
    f0: &PiecewiseConstantDensity,
    spec: &ChannelSpec,
    n: usize,
    gamma: f64,
    replicates: usize,
    tolerance: f64,
    seed: Seed,
) -> Result<UCalibration> {
    order_statistic_index(replicates, gamma / spec.levels.len() as f64)?;
    let null = simulate_null_statistics(f0, spec, n, replicates, seed)?;
    search_u_gamma(&null, gamma, tolerance)
}

/// `nα² / log^{5/2} n`; the rate guarantee assumes this is at least one.
pub fn rate_condition(n: usize, alpha: f64) -> f64 {
    let nf = n as f64;
    nf * alpha * alpha / nf.ln().powf(2.5)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelResult {
    #[serde(rename = "J")]
    pub level: u32,
    pub statistic: f64,
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdaptiveReport {
    pub levels: Vec<LevelResult>,
    pub u_gamma: f64,
    pub reject: bool,
    pub gamma: f64,
    #[serde(rename = "B")]
    pub replicates: usize,
    pub seed: Seed,
    pub order_index: usize,
    /// Size of the full level set used for the noise inflation.
    pub level_count: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

pub fn run_adaptive_test_private(
    z: &PrivatizedSample,
    f0: &PiecewiseConstantDensity,
    config: &AdaptiveConfig,
) -> Result<AdaptiveReport> {
    z.validate()?;
    let level_count = match z.channel.mode {
        ChannelMode::MultiLevel { level_count } => level_count,
        ChannelMode::SingleLevel => return Err(Error::Shape("the adaptive test needs a multi-level sample".into())),
    };
    config.validate(z.levels.len())?;
    let statistics = statistics_all_levels(z, f0)?;
    let cal = calibrate_u_gamma(
        f0,
        &z.channel,
        z.n,
        config.gamma,
        config.replicates,
        config.tolerance,
        config.seed.child(purpose::CALIBRATION),
    )?;
    let reject = statistics.iter().zip(&cal.thresholds).any(|(t, c)| t > c);
    let condition = rate_condition(z.n, z.channel.alpha);
    let warning = (condition < 1.0).then(|| {
        format!("n·alpha²/log^2.5(n) = {condition:.4} < 1: the adaptive rate guarantee does not apply")
    });
    let levels = z
        .levels
        .iter()
        .zip(statistics.iter().zip(&cal.thresholds))
        .map(|(b, (&statistic, &threshold))| LevelResult { level: level_of(b.resolution), statistic, threshold })
        .collect();
    Ok(AdaptiveReport {
        levels,
        u_gamma: cal.u_gamma,
        reject,
        gamma: config.gamma,
        replicates: config.replicates,
        seed: config.seed,
        order_index: cal.order_index,
        level_count,
        warning,
    })
}

pub fn run_adaptive_test_raw(
    xs: &[f64],
    f0: &PiecewiseConstantDensity,
    alpha: f64,
    config: &AdaptiveConfig,
) -> Result<AdaptiveReport> {
    check_samples(xs)?;
    let spec = config.channel(alpha, xs.len())?;
    let z = privatize(xs, &spec, config.seed.child(purpose::PRIVATIZE))?;
    run_adaptive_test_private(&z, f0, config)
}
