//! Pass/fail thresholds applied to experiment results.

use super::config::ExperimentKind;
use super::emit::{ExperimentResult, Record};

/// Maximum slope discrepancy accepted by the rate regression.
pub const SLOPE_TOLERANCE: f64 = 0.15;

/// `γ + 3 √(γ(1−γ)/M)`.
pub fn level_band(gamma: f64, trials: usize) -> f64 {
    gamma + 3.0 * (gamma * (1.0 - gamma) / trials as f64).sqrt()
}

fn is_null(r: &Record) -> bool {
    r.separation == Some(0.0) || r.flag.as_deref() == Some("null")
}

fn describe(r: &Record) -> String {
    format!("n={} alpha={} gamma={} L={} epsilon={:?}", r.n, r.alpha, r.gamma, r.resolution, r.epsilon)
}

/// Human-readable failures; empty when every threshold holds.
pub fn check(result: &ExperimentResult) -> Vec<String> {
    let mut failures = Vec::new();
    for r in &result.records {
        let Some(rate) = r.rate else { continue };
        if is_null(r) && rate > level_band(r.gamma, r.trials) {
            failures.push(format!("{}: level {rate} above {}", describe(r), level_band(r.gamma, r.trials)));
        }
        if r.flag.as_deref() == Some("separation") {
            let beta = r.beta.unwrap_or(0.1);
            let floor = 1.0 - beta - 3.0 * r.se.unwrap_or(0.0);
            if rate < floor {
                failures.push(format!("{}: power {rate} below {floor}", describe(r)));
            }
        }
        if let Some(u) = r.u_gamma {
            let levels = (2.0 * (r.n as f64).log2()).floor() + 1.0;
            if u < r.gamma / levels {
                failures.push(format!("{}: u_gamma {u} below gamma/|J|", describe(r)));
            }
        }
    }
    match result.kind.as_str() {
        k if k == ExperimentKind::RateRegression.name() => {
            match (result.summary.get("fitted_slope"), result.summary.get("predicted_slope")) {
                (Some(f), Some(p)) if (f - p).abs() <= SLOPE_TOLERANCE => {}
                (Some(f), Some(p)) => failures.push(format!("fitted slope {f} vs predicted {p}")),
                _ => failures.push("no slope could be fitted".into()),
            }
            if result.records.iter().any(|r| r.flag.is_some()) {
                failures.push("some sample sizes were not bracketed".into());
            }
        }
        k if k == ExperimentKind::Discrete.name() => {
            if result.summary.get("critical_increasing_in_d") == Some(&0.0) {
                failures.push("critical separation does not grow with d".into());
            }
        }
        _ => {}
    }
    failures
}
