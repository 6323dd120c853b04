//! Alternatives used to probe power.

use serde::{Deserialize, Serialize};

use crate::dyadic::{projection_sq_distance, PiecewiseConstantDensity, Piecewise, ProbabilityVector};
use crate::error::{domain, Error, Result};
use crate::rates::{generate_alternative, AlternativeSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlternativeFamily {
    /// Mass `t` moved onto the first of `L` cells.
    #[default]
    Spike,
    /// Haar perturbation at half the test resolution, all signs `+1`.
    Haar,
}

/// `(1 − t) f0 + t · cells · 1_{[0, 1/cells)}`.
pub fn spike_density(f0: &PiecewiseConstantDensity, cells: usize, t: f64) -> Result<PiecewiseConstantDensity> {
    if cells == 0 {
        return domain("spike needs at least one cell");
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Infeasible(format!("spike amplitude {t} outside [0, 1]")));
    }
    let base = f0.level_count();
    let fine = base.max(cells);
    if fine % base != 0 || fine % cells != 0 {
        return Err(Error::Resolution(format!("grids {base} and {cells} are not nested")));
    }
    let refined = f0.refine(fine / base);
    let spike_cells = fine / cells;
    let values = refined
        .values()
        .iter()
        .enumerate()
        .map(|(c, v)| (1.0 - t) * v + if c < spike_cells { t * cells as f64 } else { 0.0 })
        .collect();
    PiecewiseConstantDensity::new(values)
}

/// `(1 − t) p0 + t e_0`.
pub fn spike_probability(p0: &ProbabilityVector, t: f64) -> Result<ProbabilityVector> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Infeasible(format!("spike amplitude {t} outside [0, 1]")));
    }
    let probs = p0
        .probs()
        .iter()
        .enumerate()
        .map(|(k, p)| (1.0 - t) * p + if k == 0 { t } else { 0.0 })
        .collect();
    ProbabilityVector::new(probs)
}

/// Alternative of `family` at amplitude `a` for a test at `resolution`.
pub fn alternative(
    family: AlternativeFamily,
    f0: &PiecewiseConstantDensity,
    resolution: usize,
    a: f64,
) -> Result<PiecewiseConstantDensity> {
    match family {
        AlternativeFamily::Spike => spike_density(f0, resolution, a),
        AlternativeFamily::Haar => {
            if resolution < 2 || resolution % 2 != 0 {
                return Err(Error::Resolution(format!("Haar alternative needs an even test resolution, got {resolution}")));
            }
            let half = resolution / 2;
            generate_alternative(&AlternativeSpec { resolution: half, epsilon: a, eta: vec![1; half], base: f0.clone() })
        }
    }
}

/// Amplitude at which the spike family reaches
/// `‖Π(f − f0)‖² = K (‖f‖ + ‖f0‖ + σ²)` at `resolution`.
///
/// `None` when even `t = 1` falls short.
pub fn spike_amplitude_for_separation(
    f0: &PiecewiseConstantDensity,
    resolution: usize,
    k: f64,
    sigma: f64,
) -> Result<Option<f64>> {
    let f0_norm = f0.l2_norm_sq().sqrt();
    let gap = |t: f64| -> Result<f64> {
        let f = spike_density(f0, resolution, t)?;
        let d = projection_sq_distance(&f, f0, resolution)?;
        Ok(d - k * (f.l2_norm_sq().sqrt() + f0_norm + sigma * sigma))
    };
    if gap(1.0)? < 0.0 {
        return Ok(None);
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if gap(mid)? >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    Ok(Some(hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rates::upper_separation;

    #[test]
    fn spike_shapes() {
        let f0 = PiecewiseConstantDensity::uniform(1);
        let f = spike_density(&f0, 4, 0.5).unwrap();
        assert_eq!(f.values(), &[2.5, 0.5, 0.5, 0.5]);
        let d = projection_sq_distance(&f, &f0, 4).unwrap();
        assert!((d - 0.25 * 3.0).abs() < 1e-15);
        assert!(spike_density(&f0, 4, 1.5).is_err());
        let p = spike_probability(&ProbabilityVector::uniform(4), 0.2).unwrap();
        assert!((p.probs()[0] - 0.4).abs() < 1e-15);
    }

    #[test]
    fn two_cell_spike_is_a_haar_alternative() {
        let f0 = PiecewiseConstantDensity::uniform(1);
        let spike = spike_density(&f0, 2, 0.3).unwrap();
        let haar = alternative(AlternativeFamily::Haar, &f0, 2, 0.3).unwrap();
        for (a, b) in spike.values().iter().zip(haar.values()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn separation_solver_agrees_with_closed_form() {
        let f0 = PiecewiseConstantDensity::uniform(1);
        let (l, n, c, sigma) = (8, 1000, 2.0, 3.0);
        let k = c * (l as f64).sqrt() / n as f64;
        let t = spike_amplitude_for_separation(&f0, l, k, sigma).unwrap().unwrap();
        let d = upper_separation(c, 1.0, sigma, l, n);
        assert!((t * t * (l as f64 - 1.0) - d).abs() < 1e-12);
        assert!(spike_amplitude_for_separation(&f0, l, 100.0, sigma).unwrap().is_none());
    }
}
