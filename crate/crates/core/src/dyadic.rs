//! Piecewise-constant densities on equal-cell grids and their Haar geometry.
//!
//! Densities on `[0, 1)` are stored as their cell values on `L0` equal cells.
//! The scaled indicators `φ_{L,k}(x) = √L·1{Lx − k ∈ [0,1)}` and the scaled
//! Haar wavelets `ψ_{L,k}` are evaluated exactly against such densities by
//! summing cell overlaps, so projections, norms and Besov seminorms carry no
//! quadrature error. Grids of different sizes are only combined when one size
//! divides the other.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Absolute tolerance on total mass and on probability sums.
pub const MASS_TOLERANCE: f64 = 1e-12;

/// Read access to the cell values of a piecewise-constant function on `[0, 1)`.
pub trait Piecewise {
    fn cell_values(&self) -> &[f64];

    fn resolution(&self) -> usize {
        self.cell_values().len()
    }

    /// `∫_a^b g` for `0 <= a <= b <= 1`.
    fn integrate(&self, a: f64, b: f64) -> f64 {
        let values = self.cell_values();
        let cells = values.len();
        let width = 1.0 / cells as f64;
        let first = ((a * cells as f64).floor() as usize).min(cells - 1);
        let mut total = 0.0;
        for (c, &v) in values.iter().enumerate().skip(first) {
            let lo = c as f64 * width;
            if lo >= b {
                break;
            }
            let hi = (c + 1) as f64 * width;
            let overlap = hi.min(b) - lo.max(a);
            if overlap > 0.0 {
                total += v * overlap;
            }
        }
        total
    }

    /// `‖g‖₂²`.
    fn l2_norm_sq(&self) -> f64 {
        let values = self.cell_values();
        values.iter().map(|v| v * v).sum::<f64>() / values.len() as f64
    }
}

/// A density on `[0, 1)` that is constant on each of `level_count` equal cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DensityRepr", into = "DensityRepr")]
pub struct PiecewiseConstantDensity {
    values: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct DensityRepr {
    level_count: usize,
    values: Vec<f64>,
}

impl TryFrom<DensityRepr> for PiecewiseConstantDensity {
    type Error = Error;

    fn try_from(repr: DensityRepr) -> Result<Self> {
        if repr.level_count != repr.values.len() {
            return Err(Error::Shape(format!(
                "level_count {} but {} values",
                repr.level_count,
                repr.values.len()
            )));
        }
        PiecewiseConstantDensity::new(repr.values)
    }
}

impl From<PiecewiseConstantDensity> for DensityRepr {
    fn from(f: PiecewiseConstantDensity) -> Self {
        DensityRepr { level_count: f.values.len(), values: f.values }
    }
}

impl PiecewiseConstantDensity {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return domain("a density needs at least one cell");
        }
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return domain(format!("density values must be finite and nonnegative, got {v}"));
        }
        let mass = values.iter().sum::<f64>() / values.len() as f64;
        if (mass - 1.0).abs() > MASS_TOLERANCE {
            return domain(format!("density integrates to {mass}, not 1"));
        }
        Ok(PiecewiseConstantDensity { values })
    }

    pub fn uniform(level_count: usize) -> Self {
        PiecewiseConstantDensity { values: vec![1.0; level_count.max(1)] }
    }

    pub fn level_count(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_uniform(&self) -> bool {
        self.values.iter().all(|&v| v == 1.0)
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_sq().sqrt()
    }

    /// The same density on a grid `factor` times finer.
    pub fn refine(&self, factor: usize) -> Self {
        let values = self
            .values
            .iter()
            .flat_map(|&v| std::iter::repeat(v).take(factor))
            .collect();
        PiecewiseConstantDensity { values }
    }

    /// Cell probabilities `p_k = v_k / L0`.
    pub fn extract_multinomial(&self) -> ProbabilityVector {
        let d = self.values.len();
        ProbabilityVector { probs: self.values.iter().map(|v| v / d as f64).collect() }
    }

    /// `self − other` on the finer of the two grids.
    pub fn difference(&self, other: &PiecewiseConstantDensity) -> Result<StepFunction> {
        let cells = common_resolution(self.level_count(), other.level_count())?;
        let a = refine_values(&self.values, cells);
        let b = refine_values(&other.values, cells);
        Ok(StepFunction { values: a.iter().zip(&b).map(|(x, y)| x - y).collect() })
    }

    pub fn sampler(&self) -> DensitySampler {
        DensitySampler::new(self)
    }
}

impl Piecewise for PiecewiseConstantDensity {
    fn cell_values(&self) -> &[f64] {
        &self.values
    }
}

/// A real-valued step function on an equal-cell grid, e.g. `f − f₀`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepFunction {
    pub values: Vec<f64>,
}

impl StepFunction {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return domain("a step function needs at least one cell");
        }
        Ok(StepFunction { values })
    }

    pub fn zero(cells: usize) -> Self {
        StepFunction { values: vec![0.0; cells.max(1)] }
    }
}

impl Piecewise for StepFunction {
    fn cell_values(&self) -> &[f64] {
        &self.values
    }
}

/// A probability vector over `d` classes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProbabilityRepr", into = "ProbabilityRepr")]
pub struct ProbabilityVector {
    probs: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct ProbabilityRepr {
    d: usize,
    probs: Vec<f64>,
}

impl TryFrom<ProbabilityRepr> for ProbabilityVector {
    type Error = Error;

    fn try_from(repr: ProbabilityRepr) -> Result<Self> {
        if repr.d != repr.probs.len() {
            return Err(Error::Shape(format!("d = {} but {} probabilities", repr.d, repr.probs.len())));
        }
        ProbabilityVector::new(repr.probs)
    }
}

impl From<ProbabilityVector> for ProbabilityRepr {
    fn from(p: ProbabilityVector) -> Self {
        ProbabilityRepr { d: p.probs.len(), probs: p.probs }
    }
}

impl ProbabilityVector {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return domain("a probability vector needs at least one class");
        }
        if let Some(p) = probs.iter().find(|p| !(**p >= 0.0 && **p <= 1.0)) {
            return domain(format!("probabilities must lie in [0, 1], got {p}"));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return domain(format!("probabilities sum to {total}, not 1"));
        }
        Ok(ProbabilityVector { probs })
    }

    pub fn uniform(d: usize) -> Self {
        let d = d.max(1);
        ProbabilityVector { probs: vec![1.0 / d as f64; d] }
    }

    pub fn d(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }
}

/// Coefficients `∫ φ_{L,k} f` for `k = 0..L`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientVector {
    pub resolution: usize,
    pub coeffs: Vec<f64>,
}

impl CoefficientVector {
    pub fn new(coeffs: Vec<f64>) -> Self {
        CoefficientVector { resolution: coeffs.len(), coeffs }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }
}

fn check_point(resolution: usize, k: usize, x: f64) -> Result<()> {
    if resolution == 0 {
        return domain("resolution must be positive");
    }
    if k >= resolution {
        return domain(format!("cell index {k} outside [0, {resolution})"));
    }
    if !(0.0..1.0).contains(&x) {
        return domain(format!("x = {x} outside [0, 1)"));
    }
    Ok(())
}

/// Index of the cell of an `L`-grid containing `x ∈ [0, 1)`.
#[inline]
pub fn cell_of(resolution: usize, x: f64) -> usize {
    ((x * resolution as f64) as usize).min(resolution - 1)
}

/// `φ_{L,k}(x) = √L` on `[k/L, (k+1)/L)`, zero elsewhere.
pub fn phi_eval(resolution: usize, k: usize, x: f64) -> Result<f64> {
    check_point(resolution, k, x)?;
    Ok(if cell_of(resolution, x) == k { (resolution as f64).sqrt() } else { 0.0 })
}

/// `ψ_{L,k}(x)`: `√L` on the left half of cell `k`, `−√L` on its right half.
pub fn psi_eval(resolution: usize, k: usize, x: f64) -> Result<f64> {
    check_point(resolution, k, x)?;
    let half = cell_of(2 * resolution, x);
    let scale = (resolution as f64).sqrt();
    Ok(if half == 2 * k {
        scale
    } else if half == 2 * k + 1 {
        -scale
    } else {
        0.0
    })
}

/// The density with value `d·p_k` on cell `k` of a `d`-cell grid.
pub fn embed_multinomial(p: &ProbabilityVector) -> PiecewiseConstantDensity {
    let d = p.d() as f64;
    PiecewiseConstantDensity { values: p.probs().iter().map(|q| d * q).collect() }
}

fn common_resolution(a: usize, b: usize) -> Result<usize> {
    if a % b == 0 {
        Ok(a)
    } else if b % a == 0 {
        Ok(b)
    } else {
        Err(Error::Resolution(format!("grids of {a} and {b} cells are not nested")))
    }
}

fn refine_values(values: &[f64], cells: usize) -> Vec<f64> {
    let factor = cells / values.len();
    values.iter().flat_map(|&v| std::iter::repeat(v).take(factor)).collect()
}

/// Exact coefficients `∫ φ_{L,k} f` for a grid nested with that of `f`.
pub fn project<P: Piecewise + ?Sized>(f: &P, resolution: usize) -> Result<CoefficientVector> {
    if resolution == 0 {
        return domain("resolution must be positive");
    }
    let values = f.cell_values();
    let native = values.len();
    let scale = (resolution as f64).sqrt();
    let coeffs = if native % resolution == 0 {
        let block = native / resolution;
        values
            .chunks(block)
            .map(|chunk| scale * chunk.iter().sum::<f64>() / native as f64)
            .collect()
    } else if resolution % native == 0 {
        let factor = resolution / native;
        (0..resolution).map(|k| scale * values[k / factor] / resolution as f64).collect()
    } else {
        return Err(Error::Resolution(format!(
            "cannot project a {native}-cell function on {resolution} cells"
        )));
    };
    Ok(CoefficientVector { resolution, coeffs })
}

/// `‖Π_{S_L}(f − f₀)‖₂² = Σ_k (α_{L,k} − α⁰_{L,k})²`.
pub fn projection_sq_distance<P, Q>(f: &P, f0: &Q, resolution: usize) -> Result<f64>
where
    P: Piecewise + ?Sized,
    Q: Piecewise + ?Sized,
{
    let a = project(f, resolution)?;
    let b = project(f0, resolution)?;
    Ok(a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| (x - y) * (x - y)).sum())
}

/// Haar detail energy `Σ_k β_{j,k}²(g)` at level `j` (cells of width `2^{-j}`).
pub fn besov_seminorm_level<P: Piecewise + ?Sized>(g: &P, level: u32) -> Result<f64> {
    let native = g.resolution();
    let cells = 1usize.checked_shl(level).filter(|&c| c <= native).ok_or_else(|| {
        Error::Resolution(format!("level {level} is finer than the {native}-cell grid"))
    })?;
    let width = 1.0 / cells as f64;
    let scale = (cells as f64).sqrt();
    let mut energy = 0.0;
    for k in 0..cells {
        let lo = k as f64 * width;
        let mid = lo + 0.5 * width;
        let hi = lo + width;
        let beta = scale * (g.integrate(lo, mid) - g.integrate(mid, hi));
        energy += beta * beta;
    }
    Ok(energy)
}

/// Whether `g` lies in the Haar Besov ball `B_{s,2,∞}(R)`.
///
/// Levels `j` with `2^j` up to the native grid size are checked; for dyadic
/// grids every finer level has zero detail energy, so the check is exact.
pub fn besov_membership<P: Piecewise + ?Sized>(g: &P, smoothness: f64, radius: f64) -> bool {
    let native = g.resolution();
    let mut level = 0u32;
    while (1usize << level) <= native {
        let energy = besov_seminorm_level(g, level).expect("level within resolution");
        let bound = radius * radius * 2f64.powf(-2.0 * level as f64 * smoothness);
        if energy > bound * (1.0 + 1e-12) + 1e-300 {
            return false;
        }
        level += 1;
    }
    true
}

/// Inverse-CDF sampler for a piecewise-constant density.
#[derive(Debug, Clone)]
pub struct DensitySampler {
    cumulative: Vec<f64>,
    masses: Vec<f64>,
}

impl DensitySampler {
    pub fn new(f: &PiecewiseConstantDensity) -> Self {
        let cells = f.level_count() as f64;
        let masses: Vec<f64> = f.values().iter().map(|v| v / cells).collect();
        let mut cumulative = Vec::with_capacity(masses.len() + 1);
        let mut acc = 0.0;
        cumulative.push(0.0);
        for m in &masses {
            acc += m;
            cumulative.push(acc);
        }
        DensitySampler { cumulative, masses }
    }

    /// Map `u ∈ (0, 1)` to a point of `[0, 1)`; nondecreasing in `u`.
    pub fn quantile(&self, u: f64) -> f64 {
        let cells = self.masses.len();
        let total = self.cumulative[cells];
        let t = u * total;
        let cell = (self.cumulative.partition_point(|&c| c <= t) - 1).min(cells - 1);
        let mass = self.masses[cell];
        let frac = if mass > 0.0 { ((t - self.cumulative[cell]) / mass).clamp(0.0, 1.0) } else { 0.0 };
        let x = (cell as f64 + frac) / cells as f64;
        if x < 1.0 {
            x
        } else {
            1.0 - f64::EPSILON / 2.0
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn phi_examples() {
        assert_eq!(phi_eval(4, 1, 0.3).unwrap(), 2.0);
        assert_eq!(phi_eval(1, 0, 0.7).unwrap(), 1.0);
        assert_eq!(phi_eval(4, 1, 0.6).unwrap(), 0.0);
    }

    #[test]
    fn psi_examples() {
        let r2 = 2f64.sqrt();
        assert!(close(psi_eval(2, 0, 0.1).unwrap(), r2, 1e-15));
        assert!(close(psi_eval(2, 0, 0.4).unwrap(), -r2, 1e-15));
        assert_eq!(psi_eval(2, 1, 0.1).unwrap(), 0.0);
    }

    #[test]
    fn evaluation_domain_errors() {
        assert!(matches!(phi_eval(4, 4, 0.1), Err(Error::Domain(_))));
        assert!(matches!(phi_eval(4, 0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(psi_eval(2, 0, -0.1), Err(Error::Domain(_))));
        assert!(matches!(phi_eval(0, 0, 0.1), Err(Error::Domain(_))));
    }

    #[test]
    fn embedding_examples() {
        let f = embed_multinomial(&ProbabilityVector::new(vec![0.5, 0.5]).unwrap());
        assert_eq!(f.values(), &[1.0, 1.0]);
        let f = embed_multinomial(&ProbabilityVector::new(vec![1.0, 0.0]).unwrap());
        assert_eq!(f.values(), &[2.0, 0.0]);
        let f = embed_multinomial(&ProbabilityVector::uniform(4));
        assert_eq!(f.values(), &[1.0; 4]);
        let p = ProbabilityVector::new(vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let back = embed_multinomial(&p).extract_multinomial();
        for (a, b) in back.probs().iter().zip(p.probs()) {
            assert!(close(*a, *b, 1e-15));
        }
    }

    #[test]
    fn projection_examples() {
        let u = PiecewiseConstantDensity::uniform(1);
        for l in [1usize, 2, 4, 8, 16] {
            let c = project(&u, l).unwrap();
            assert!(c.coeffs.iter().all(|&a| close(a, 1.0 / (l as f64).sqrt(), 1e-15)));
        }
        let f = embed_multinomial(&ProbabilityVector::new(vec![1.0, 0.0]).unwrap());
        let c = project(&f, 2).unwrap();
        assert!(close(c.coeffs[0], 2f64.sqrt(), 1e-15));
        assert_eq!(c.coeffs[1], 0.0);
        let f = PiecewiseConstantDensity::new(vec![1.5, 0.5]).unwrap();
        assert_eq!(project(&f, 1).unwrap().coeffs, vec![1.0]);
        assert!(matches!(project(&PiecewiseConstantDensity::uniform(3), 2), Err(Error::Resolution(_))));
    }

    #[test]
    fn projection_distance_examples() {
        let f = embed_multinomial(&ProbabilityVector::new(vec![1.0, 0.0]).unwrap());
        let f0 = embed_multinomial(&ProbabilityVector::uniform(2));
        assert_eq!(projection_sq_distance(&f, &f, 2).unwrap(), 0.0);
        assert!(close(projection_sq_distance(&f, &f0, 2).unwrap(), 1.0, 1e-14));
        assert!(close(projection_sq_distance(&f, &f0, 1).unwrap(), 0.0, 1e-15));
    }

    #[test]
    fn seminorm_examples() {
        let zero = StepFunction::zero(8);
        for j in 0..=3 {
            assert_eq!(besov_seminorm_level(&zero, j).unwrap(), 0.0);
        }
        let r = 0.5f64.sqrt();
        let g = StepFunction::new(vec![r, -r]).unwrap();
        assert!(close(besov_seminorm_level(&g, 0).unwrap(), 0.5, 1e-15));
        assert_eq!(besov_seminorm_level(&g, 1).unwrap(), 0.0);
        assert!(matches!(besov_seminorm_level(&g, 2), Err(Error::Resolution(_))));
    }

    #[test]
    fn membership_examples() {
        assert!(besov_membership(&StepFunction::zero(4), 1.0, 0.1));
        // Level-0 energy 2R² with R = 1 breaks the j = 0 bound R².
        let g = StepFunction::new(vec![2f64.sqrt(), -(2f64.sqrt())]).unwrap();
        assert!(close(besov_seminorm_level(&g, 0).unwrap(), 2.0, 1e-14));
        assert!(!besov_membership(&g, 1.0, 1.0));
    }

    #[test]
    fn density_validation() {
        assert!(PiecewiseConstantDensity::new(vec![1.0, -0.0, 1.0]).is_err());
        assert!(PiecewiseConstantDensity::new(vec![2.0, -0.5, 0.5]).is_err());
        assert!(PiecewiseConstantDensity::new(vec![1.0, 1.1]).is_err());
        assert!(ProbabilityVector::new(vec![0.5, 0.6]).is_err());
        assert!(ProbabilityVector::new(vec![1.5, -0.5]).is_err());
    }

    #[test]
    fn json_shapes() {
        let f = PiecewiseConstantDensity::new(vec![1.5, 0.5]).unwrap();
        let text = serde_json::to_string(&f).unwrap();
        assert_eq!(text, r#"{"level_count":2,"values":[1.5,0.5]}"#);
        let back: PiecewiseConstantDensity = serde_json::from_str(&text).unwrap();
        assert_eq!(back, f);
        let p = ProbabilityVector::uniform(2);
        assert_eq!(serde_json::to_string(&p).unwrap(), r#"{"d":2,"probs":[0.5,0.5]}"#);
        assert!(serde_json::from_str::<PiecewiseConstantDensity>(r#"{"level_count":3,"values":[1,1]}"#).is_err());
        assert!(serde_json::from_str::<ProbabilityVector>(r#"{"d":2,"probs":[0.9,0.9]}"#).is_err());
    }

    #[test]
    fn sampler_matches_cell_masses() {
        let f = PiecewiseConstantDensity::new(vec![0.0, 2.0, 1.0, 1.0]).unwrap();
        let s = f.sampler();
        assert!(close(s.quantile(0.25), 0.375, 1e-15));
        assert!(close(s.quantile(0.5), 0.5, 1e-15));
        assert!(s.quantile(1.0 - 1e-17) < 1.0);
        let mut prev = 0.0;
        for i in 1..1000 {
            let x = s.quantile(i as f64 / 1000.0);
            assert!(x >= prev && x >= 0.25);
            prev = x;
        }
    }
}
