//! The projection U-statistic, null calibration and the single-resolution test.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{check_samples, noise_base, privatize, privatize_row, sample_noise, ChannelSpec, PrivatizedSample};
use crate::dyadic::{project, CoefficientVector, DensitySampler, PiecewiseConstantDensity, ProbabilityVector};
use crate::error::{domain, Error, Result};
use crate::rng::{purpose, Seed, Stream};

/// Default number of null replicates.
pub const DEFAULT_REPLICATES: usize = 999;

/// Streaming accumulator for `Σ_{i≠l} <Z_i − α⁰, Z_l − α⁰> / (n(n−1))`.
#[derive(Debug, Clone)]
pub struct UStat {
    sum: Vec<f64>,
    sum_sq: f64,
    n: usize,
}

impl UStat {
    pub fn new(resolution: usize) -> Self {
        UStat { sum: vec![0.0; resolution], sum_sq: 0.0, n: 0 }
    }

    #[inline]
    pub fn push(&mut self, row: &[f64], alpha0: &[f64]) {
        let mut sq = 0.0;
        for ((s, z), a) in self.sum.iter_mut().zip(row).zip(alpha0) {
            let c = z - a;
            *s += c;
            sq += c * c;
        }
        self.sum_sq += sq;
        self.n += 1;
    }

    pub fn count(&self) -> usize {
        self.n
    }

    pub fn finish(&self) -> Result<f64> {
        if self.n < 2 {
            return domain(format!("statistic needs at least 2 samples, got {}", self.n));
        }
        let total: f64 = self.sum.iter().map(|s| s * s).sum();
        let n = self.n as f64;
        Ok((total - self.sum_sq) / (n * (n - 1.0)))
    }
}

/// Statistic of a row-major `n × L` matrix against `alpha0`.
pub fn statistic_rows(data: &[f64], alpha0: &CoefficientVector) -> Result<f64> {
    let l = alpha0.len();
    if l == 0 || data.len() % l != 0 {
        return Err(Error::Shape(format!("{} values do not form rows of length {l}", data.len())));
    }
    let mut acc = UStat::new(l);
    for row in data.chunks(l) {
        acc.push(row, &alpha0.coeffs);
    }
    acc.finish()
}

/// `T̂_L` for a single-level private sample.
pub fn statistic(z: &PrivatizedSample, alpha0: &CoefficientVector) -> Result<f64> {
    if z.levels.len() != 1 {
        return Err(Error::Shape(format!("expected one level, sample has {}", z.levels.len())));
    }
    let block = &z.levels[0];
    if block.resolution != alpha0.len() {
        return Err(Error::Shape(format!(
            "sample resolution {} but {} null coefficients",
            block.resolution,
            alpha0.len()
        )));
    }
    statistic_rows(&block.data, alpha0)
}

/// The multinomial statistic on raw class labels.
pub fn statistic_discrete(xs: &[usize], p0: &ProbabilityVector) -> Result<f64> {
    let d = p0.d();
    let n = xs.len();
    if n < 2 {
        return domain(format!("statistic needs at least 2 samples, got {n}"));
    }
    let mut counts = vec![0usize; d];
    for &x in xs {
        if x >= d {
            return domain(format!("label {x} outside [0, {d})"));
        }
        counts[x] += 1;
    }
    let nf = n as f64;
    let mut total = 0.0;
    for (&c, &p) in counts.iter().zip(p0.probs()) {
        let c = c as f64;
        let sum = c - nf * p;
        let sum_sq = c * (1.0 - p) * (1.0 - p) + (nf - c) * p * p;
        total += sum * sum - sum_sq;
    }
    Ok(d as f64 * total / (nf * (nf - 1.0)))
}

/// Draw `n` points from `f` using the data stream under `seed`.
pub fn draw_sample(sampler: &DensitySampler, n: usize, seed: Seed) -> Vec<f64> {
    let mut data = Stream::new(seed.child(purpose::DATA), 0);
    (0..n).map(|_| sampler.quantile(data.open01())).collect()
}

/// Null coefficients `project(f0, L)` for every level of `spec`.
pub fn null_coefficients(f0: &PiecewiseConstantDensity, spec: &ChannelSpec) -> Result<Vec<CoefficientVector>> {
    spec.levels.iter().map(|l| project(f0, l.resolution)).collect()
}

/// Per-level statistics of one simulated experiment: `n` draws from
/// `sampler`, privatized through `spec`, all under `seed`.
///
/// Bit-identical to `draw_sample` + `privatize` + `statistic` with the same seed.
pub fn simulate_statistics(
    sampler: &DensitySampler,
    alpha0: &[CoefficientVector],
    spec: &ChannelSpec,
    n: usize,
    seed: Seed,
) -> Result<Vec<f64>> {
    if alpha0.len() != spec.levels.len() {
        return Err(Error::Shape("one coefficient vector per level required".into()));
    }
    let mut data = Stream::new(seed.child(purpose::DATA), 0);
    let base = noise_base(seed);
    let mut acc: Vec<UStat> = spec.levels.iter().map(|l| UStat::new(l.resolution)).collect();
    let mut view = vec![0.0; spec.dimension()];
    for i in 0..n {
        let x = sampler.quantile(data.open01());
        let mut noise = sample_noise(&base, i);
        privatize_row(x, spec, &mut noise, &mut view);
        let mut offset = 0;
        for (stat, a) in acc.iter_mut().zip(alpha0) {
            let l = a.len();
            stat.push(&view[offset..offset + l], &a.coeffs);
            offset += l;
        }
    }
    acc.iter().map(UStat::finish).collect()
}

/// Seed of null replicate `r` under a calibration seed.
pub fn replicate_seed(seed: Seed, r: usize) -> Seed {
    seed.child(purpose::CALIBRATION).child(r as u64)
}

/// `B` null replicates of the per-level statistic vector (replicate-major).
pub fn simulate_null_statistics(
    f0: &PiecewiseConstantDensity,
    spec: &ChannelSpec,
    n: usize,
    replicates: usize,
    seed: Seed,
) -> Result<Vec<Vec<f64>>> {
    spec.validate()?;
    if n < 2 {
        return domain(format!("statistic needs at least 2 samples, got {n}"));
    }
    let alpha0 = null_coefficients(f0, spec)?;
    let sampler = f0.sampler();
    (0..replicates)
        .into_par_iter()
        .map(|r| simulate_statistics(&sampler, &alpha0, spec, n, replicate_seed(seed, r)))
        .collect()
}

pub(crate) fn check_level(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma < 1.0 {
        Ok(())
    } else {
        Err(Error::Config(format!("level must lie in (0, 1), got {gamma}")))
    }
}

/// One-based index `ceil((B+1)(1−γ))` of the conservative upper quantile.
pub fn order_statistic_index(replicates: usize, gamma: f64) -> Result<usize> {
    check_level(gamma)?;
    let x = (replicates as f64 + 1.0) * (1.0 - gamma);
    let nearest = x.round();
    let k = if (x - nearest).abs() <= 1e-9 * x.max(1.0) { nearest } else { x.ceil() } as usize;
    if k > replicates {
        return Err(Error::Config(format!(
            "{replicates} replicates cannot estimate the {} quantile (need at least {k})",
            1.0 - gamma
        )));
    }
    Ok(k.max(1))
}

/// The `k`-th smallest value (one-based).
pub fn order_statistic(values: &[f64], k: usize) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted[k - 1]
}

/// Monte Carlo estimate of the null `(1−γ)` quantile of `T̂_L`.
pub fn calibrate_null_quantile(
    f0: &PiecewiseConstantDensity,
    spec: &ChannelSpec,
    n: usize,
    gamma: f64,
    replicates: usize,
    seed: Seed,
) -> Result<f64> {
    if spec.levels.len() != 1 {
        return Err(Error::Config("null quantile calibration needs a single-level channel".into()));
    }
    let k = order_statistic_index(replicates, gamma)?;
    let stats: Vec<f64> = simulate_null_statistics(f0, spec, n, replicates, seed)?.into_iter().map(|v| v[0]).collect();
    Ok(order_statistic(&stats, k))
}

/// `(J*, 2^J*)`: the smallest `J` with `2^J ≥ (nα²)^{2/(4s+3)} ∧ n^{2/(4s+1)}`.
///
/// The radius does not enter the choice.
pub fn select_resolution(n: usize, alpha: f64, s: f64, _radius: Option<f64>) -> (u32, usize) {
    let nf = n.max(1) as f64;
    if alpha < 1.0 / nf.sqrt() {
        return (0, 1);
    }
    let private = (nf * alpha * alpha).powf(2.0 / (4.0 * s + 3.0));
    let classical = nf.powf(2.0 / (4.0 * s + 1.0));
    let target = private.min(classical) * (1.0 - 1e-12);
    let mut j = 0u32;
    while ((1u64 << j) as f64) < target && j < 62 {
        j += 1;
    }
    (j, 1usize << j)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ResolutionChoice {
    Fixed { resolution: usize },
    /// Pick `L*` from the smoothness; the radius is recorded but unused.
    Auto { s: f64, radius: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestConfig {
    pub gamma: f64,
    pub replicates: usize,
    pub seed: Seed,
    pub resolution: ResolutionChoice,
}

impl TestConfig {
    pub fn fixed(gamma: f64, resolution: usize, seed: Seed) -> Self {
        TestConfig { gamma, replicates: DEFAULT_REPLICATES, seed, resolution: ResolutionChoice::Fixed { resolution } }
    }

    pub fn validate(&self) -> Result<()> {
        check_level(self.gamma)?;
        order_statistic_index(self.replicates, self.gamma)?;
        match self.resolution {
            ResolutionChoice::Fixed { resolution: 0 } => Err(Error::Config("resolution must be positive".into())),
            ResolutionChoice::Auto { s, radius } if !(s > 0.0 && radius > 0.0) => {
                Err(Error::Config("smoothness and radius must be positive".into()))
            }
            _ => Ok(()),
        }
    }

    fn resolution_for(&self, n: usize, alpha: f64) -> usize {
        match self.resolution {
            ResolutionChoice::Fixed { resolution } => resolution,
            ResolutionChoice::Auto { s, radius } => select_resolution(n, alpha, s, Some(radius)).1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub statistic: f64,
    pub threshold: f64,
    pub reject: bool,
    #[serde(rename = "L")]
    pub resolution: usize,
    pub gamma: f64,
    #[serde(rename = "B")]
    pub replicates: usize,
    pub seed: Seed,
    pub order_index: usize,
}

/// Test `H0: f = f0` from already privatized views.
pub fn run_test_private(z: &PrivatizedSample, f0: &PiecewiseConstantDensity, config: &TestConfig) -> Result<TestReport> {
    config.validate()?;
    z.validate()?;
    let resolution = z.channel.levels.first().map(|l| l.resolution).unwrap_or(0);
    if z.levels.len() != 1 {
        return Err(Error::Shape("the fixed-resolution test needs a single-level sample".into()));
    }
    if let ResolutionChoice::Fixed { resolution: wanted } = config.resolution {
        if wanted != resolution {
            return Err(Error::Shape(format!("sample released at L = {resolution}, test asks for L = {wanted}")));
        }
    }
    let alpha0 = project(f0, resolution)?;
    let stat = statistic(z, &alpha0)?;
    let order_index = order_statistic_index(config.replicates, config.gamma)?;
    let threshold = calibrate_null_quantile(
        f0,
        &z.channel,
        z.n,
        config.gamma,
        config.replicates,
        config.seed.child(purpose::CALIBRATION),
    )?;
    Ok(TestReport {
        statistic: stat,
        threshold,
        reject: stat > threshold,
        resolution,
        gamma: config.gamma,
        replicates: config.replicates,
        seed: config.seed,
        order_index,
    })
}

/// Privatize raw samples at budget `alpha`, then test.
pub fn run_test_raw(xs: &[f64], f0: &PiecewiseConstantDensity, alpha: f64, config: &TestConfig) -> Result<TestReport> {
    config.validate()?;
    check_samples(xs)?;
    let resolution = config.resolution_for(xs.len(), alpha);
    let spec = ChannelSpec::single_level(alpha, resolution)?;
    let z = privatize(xs, &spec, config.seed.child(purpose::PRIVATIZE))?;
    run_test_private(&z, f0, config)
}

/// Label `k` of a `d`-cell multinomial as a point of `[0, 1)`.
pub fn label_point(k: usize, d: usize) -> f64 {
    (k as f64 + 0.5) / d as f64
}
