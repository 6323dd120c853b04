//! Monte Carlo experiments over a configuration grid.
//!
//! Each setting (sample size, budget, resolution) is calibrated once with
//! `replicates` null runs. Trial statistics are simulated once per alternative
//! and compared against the thresholds of every requested level, so all
//! levels and amplitudes at a setting share their random numbers.

use std::collections::BTreeMap;

use super::alternatives::{alternative, spike_amplitude_for_separation, spike_density, AlternativeFamily};
use super::config::{ExperimentConfig, ExperimentKind};
use super::constants::PinnedConstants;
use super::emit::{binomial_se, ExperimentResult, Record};
use super::executor::Executor;
use crate::adaptive::{rate_condition, search_u_gamma};
use crate::channel::ChannelSpec;
use crate::dyadic::{embed_multinomial, projection_sq_distance, CoefficientVector, Piecewise, PiecewiseConstantDensity, ProbabilityVector};
use crate::error::{Error, Result};
use crate::gof::{null_coefficients, order_statistic, order_statistic_index, replicate_seed, select_resolution, simulate_statistics};
use crate::rates::{adaptive_kernel, continuous_kernel};
use crate::rng::{purpose, Seed};

/// A calibrated unit of work: sample size, channel and null density.
pub struct Setting {
    pub n: usize,
    pub spec: ChannelSpec,
    pub f0: PiecewiseConstantDensity,
    alpha0: Vec<CoefficientVector>,
}

impl Setting {
    pub fn new(n: usize, spec: ChannelSpec, f0: PiecewiseConstantDensity) -> Result<Self> {
        spec.validate()?;
        let alpha0 = null_coefficients(&f0, &spec)?;
        Ok(Setting { n, spec, f0, alpha0 })
    }

    /// Null statistic vectors, replicate-major.
    pub fn null(&self, exec: &Executor, replicates: usize, seed: Seed) -> Result<Vec<Vec<f64>>> {
        let sampler = self.f0.sampler();
        exec.try_map(replicates, |r| {
            simulate_statistics(&sampler, &self.alpha0, &self.spec, self.n, replicate_seed(seed, r))
        })
    }

    /// Statistic vectors of `trials` experiments under `f`; trial `t` always
    /// uses the same seed whatever `f` is.
    pub fn trials(&self, exec: &Executor, f: &PiecewiseConstantDensity, trials: usize, seed: Seed) -> Result<Vec<Vec<f64>>> {
        let sampler = f.sampler();
        exec.try_map(trials, |t| simulate_statistics(&sampler, &self.alpha0, &self.spec, self.n, trial_seed(seed, t)))
    }

    pub fn noise_scale(&self) -> f64 {
        self.spec.levels[0].noise_scale
    }

    pub fn resolution(&self) -> usize {
        self.spec.levels[0].resolution
    }
}

pub fn trial_seed(seed: Seed, t: usize) -> Seed {
    seed.child(purpose::TRIAL).child(t as u64)
}

/// Single-level threshold at `gamma`.
pub fn single_threshold(null: &[Vec<f64>], gamma: f64) -> Result<f64> {
    let k = order_statistic_index(null.len(), gamma)?;
    let column: Vec<f64> = null.iter().map(|r| r[0]).collect();
    Ok(order_statistic(&column, k))
}

/// Fraction of statistic vectors with some coordinate above its threshold.
pub fn rejection_rate(stats: &[Vec<f64>], thresholds: &[f64]) -> f64 {
    let hits = stats.iter().filter(|r| r.iter().zip(thresholds).any(|(t, c)| t > c)).count();
    hits as f64 / stats.len() as f64
}

/// Outcome of a bisection for the amplitude where power crosses a target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Critical {
    pub amplitude: f64,
    pub power: f64,
    pub bracketed: bool,
}

/// Bisect `a ∈ [0, 1]` for `power(a) = target`; `power` must be monotone in
/// expectation.
pub fn critical_amplitude(
    power: impl Fn(f64) -> Result<f64>,
    target: f64,
    iterations: usize,
) -> Result<Critical> {
    let p_lo = power(0.0)?;
    let p_hi = power(1.0)?;
    if !(p_lo < target && p_hi >= target) {
        return Ok(Critical { amplitude: f64::NAN, power: f64::NAN, bracketed: false });
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..iterations {
        let mid = 0.5 * (lo + hi);
        if power(mid)? >= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let amplitude = 0.5 * (lo + hi);
    Ok(Critical { amplitude, power: power(amplitude)?, bracketed: true })
}

/// Least-squares slope of `y` on `x`.
pub fn ols_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

fn resolutions(cfg: &ExperimentConfig, n: usize, alpha: f64) -> Vec<usize> {
    if !cfg.resolution.is_empty() {
        return cfg.resolution.clone();
    }
    let mut ls: Vec<usize> = cfg.s.iter().map(|&s| select_resolution(n, alpha, s, None).1).collect();
    ls.sort_unstable();
    ls.dedup();
    ls
}

struct Context<'a> {
    cfg: &'a ExperimentConfig,
    exec: &'a Executor,
    records: Vec<Record>,
    summary: BTreeMap<String, f64>,
    warnings: Vec<String>,
}

impl<'a> Context<'a> {
    fn new(cfg: &'a ExperimentConfig, exec: &'a Executor) -> Self {
        Context { cfg, exec, records: Vec::new(), summary: BTreeMap::new(), warnings: Vec::new() }
    }

    fn base(&self, n: usize, alpha: f64, gamma: f64, resolution: usize) -> Record {
        Record {
            n,
            alpha,
            gamma,
            resolution,
            trials: self.cfg.trials,
            replicates: self.cfg.replicates,
            ..Record::default()
        }
    }

    fn finish(self) -> ExperimentResult {
        ExperimentResult {
            kind: self.cfg.kind.name().to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed: self.cfg.seed,
            workers: self.exec.workers(),
            config: self.cfg.clone(),
            records: self.records,
            summary: self.summary,
            warnings: self.warnings,
        }
    }
}

fn with_rate(mut r: Record, rate: f64, trials: usize) -> Record {
    r.rate = Some(rate);
    r.se = Some(binomial_se(rate, trials));
    r
}

/// Rejection rates under the null density.
pub fn run_level_experiment(cfg: &ExperimentConfig, exec: &Executor) -> Result<ExperimentResult> {
    cfg.validate()?;
    let mut ctx = Context::new(cfg, exec);
    let master = Seed(cfg.seed);
    let f0 = PiecewiseConstantDensity::uniform(1);
    let mut index = 0u64;
    for &n in &cfg.n {
        for &a in &cfg.alpha {
            let alpha = cfg.budget(a, n);
            for l in resolutions(cfg, n, alpha) {
                let seed = master.child(index);
                index += 1;
                let setting = Setting::new(n, ChannelSpec::single_level(alpha, l)?, f0.clone())?;
                let null = setting.null(exec, cfg.replicates, seed)?;
                let stats = setting.trials(exec, &f0, cfg.trials, seed)?;
                for &gamma in &cfg.gamma {
                    let threshold = single_threshold(&null, gamma)?;
                    let mut r = ctx.base(n, alpha, gamma, l);
                    r.threshold = Some(threshold);
                    r.epsilon = Some(0.0);
                    r.separation = Some(0.0);
                    ctx.records.push(with_rate(r, rejection_rate(&stats, &[threshold]), cfg.trials));
                }
            }
        }
    }
    Ok(ctx.finish())
}

/// An alternative to simulate: amplitude plus the requested `(s, β)` context.
struct Point {
    amplitude: f64,
    beta: Option<f64>,
    s: Option<f64>,
    label: Option<&'static str>,
}

fn flag_non_monotone(records: &mut [Record], warnings: &mut Vec<String>) {
    let mut plain: Vec<usize> = (0..records.len()).filter(|&i| records[i].flag.is_none() && records[i].rate.is_some()).collect();
    plain.sort_by(|&a, &b| records[a].epsilon.partial_cmp(&records[b].epsilon).unwrap());
    for w in plain.windows(2) {
        let (prev, next) = (&records[w[0]], &records[w[1]]);
        let (pr, nr) = (prev.rate.unwrap(), next.rate.unwrap());
        if nr < pr - prev.se.unwrap().max(next.se.unwrap()) {
            warnings.push(format!(
                "power not monotone at n={} alpha={} gamma={}: {pr} at epsilon {:?} then {nr} at {:?}",
                next.n, next.alpha, next.gamma, prev.epsilon, next.epsilon
            ));
            records[w[1]].flag = Some("non-monotone".into());
        }
    }
}

fn continuous_constant(cfg: &ExperimentConfig, pinned: &PinnedConstants) -> f64 {
    cfg.constant.unwrap_or(pinned.continuous.constant)
}

/// Power over amplitudes at each fixed-resolution setting.
pub fn run_power_curve(cfg: &ExperimentConfig, exec: &Executor, pinned: &PinnedConstants) -> Result<ExperimentResult> {
    cfg.validate()?;
    let mut ctx = Context::new(cfg, exec);
    let master = Seed(cfg.seed);
    let f0 = PiecewiseConstantDensity::uniform(1);
    let constant = continuous_constant(cfg, pinned);
    let mut index = 0u64;
    for &n in &cfg.n {
        for &a in &cfg.alpha {
            let alpha = cfg.budget(a, n);
            for l in resolutions(cfg, n, alpha) {
                let seed = master.child(index);
                index += 1;
                let setting = Setting::new(n, ChannelSpec::single_level(alpha, l)?, f0.clone())?;
                let mut points: Vec<Point> =
                    cfg.epsilon.iter().map(|&e| Point { amplitude: e, beta: None, s: None, label: None }).collect();
                if cfg.at_separation {
                    if cfg.alternative != AlternativeFamily::Spike {
                        return Err(Error::Config("separation points use the spike family".into()));
                    }
                    let k = constant * (l as f64).sqrt() / n as f64;
                    match spike_amplitude_for_separation(&f0, l, k, setting.noise_scale())? {
                        Some(t) => {
                            for &beta in &cfg.beta {
                                points.push(Point { amplitude: t, beta: Some(beta), s: None, label: Some("separation") });
                            }
                        }
                        None => ctx.warnings.push(format!("separation at n={n} alpha={alpha} L={l} exceeds any spike")),
                    }
                }
                let null = setting.null(exec, cfg.replicates, seed)?;
                let thresholds: Vec<f64> = cfg.gamma.iter().map(|&g| single_threshold(&null, g)).collect::<Result<_>>()?;
                let first = ctx.records.len();
                let mut cache: Vec<(f64, Vec<Vec<f64>>)> = Vec::new();
                for p in &points {
                    let f = match alternative(cfg.alternative, &f0, l, p.amplitude) {
                        Ok(f) => f,
                        Err(Error::Infeasible(msg)) => {
                            ctx.warnings.push(format!("skipped amplitude {}: {msg}", p.amplitude));
                            for &gamma in &cfg.gamma {
                                let mut r = ctx.base(n, alpha, gamma, l);
                                r.epsilon = Some(p.amplitude);
                                r.flag = Some("infeasible".into());
                                ctx.records.push(r);
                            }
                            continue;
                        }
                        Err(e) => return Err(e),
                    };
                    let separation = projection_sq_distance(&f, &f0, l)?;
                    if !cache.iter().any(|(a, _)| *a == p.amplitude) {
                        cache.push((p.amplitude, setting.trials(exec, &f, cfg.trials, seed)?));
                    }
                    let stats = &cache.iter().find(|(a, _)| *a == p.amplitude).unwrap().1;
                    for (&gamma, &threshold) in cfg.gamma.iter().zip(&thresholds) {
                        let mut r = ctx.base(n, alpha, gamma, l);
                        r.epsilon = Some(p.amplitude);
                        r.beta = p.beta;
                        r.s = p.s;
                        r.separation = Some(separation);
                        r.threshold = Some(threshold);
                        r.flag = p.label.map(String::from);
                        ctx.records.push(with_rate(r, rejection_rate(stats, &[threshold]), cfg.trials));
                    }
                }
                for &gamma in &cfg.gamma {
                    let idx: Vec<usize> = (first..ctx.records.len()).filter(|&i| ctx.records[i].gamma == gamma).collect();
                    let mut group: Vec<Record> = idx.iter().map(|&i| ctx.records[i].clone()).collect();
                    flag_non_monotone(&mut group, &mut ctx.warnings);
                    for (i, r) in idx.into_iter().zip(group) {
                        ctx.records[i] = r;
                    }
                }
            }
        }
    }
    Ok(ctx.finish())
}

/// Critical spike amplitude per sample size and the fitted log-log slope.
///
/// Each `n` is tested at its own `L*` against a spike on `L*` cells, whose
/// distance to the null is `t √(L* − 1)`.
pub fn run_rate_regression(cfg: &ExperimentConfig, exec: &Executor) -> Result<ExperimentResult> {
    cfg.validate()?;
    let mut ctx = Context::new(cfg, exec);
    let master = Seed(cfg.seed);
    let f0 = PiecewiseConstantDensity::uniform(1);
    let (gamma, beta, s) = (cfg.gamma[0], cfg.beta[0], cfg.s[0]);
    let target = 1.0 - beta;
    let (mut log_n, mut log_rho, mut log_t, mut log_kernel) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for (index, &n) in cfg.n.iter().enumerate() {
        let alpha = cfg.budget(cfg.alpha[0], n);
        let l = cfg.resolution.first().copied().unwrap_or_else(|| select_resolution(n, alpha, s, None).1);
        let seed = master.child(index as u64);
        let mut r = ctx.base(n, alpha, gamma, l);
        r.beta = Some(beta);
        r.s = Some(s);
        if l < 2 {
            r.flag = Some("resolution-too-coarse".into());
            ctx.warnings.push(format!("n={n}: L = {l} leaves no room for a spike"));
            ctx.records.push(r);
            continue;
        }
        let setting = Setting::new(n, ChannelSpec::single_level(alpha, l)?, f0.clone())?;
        let null = setting.null(exec, cfg.replicates, seed)?;
        let threshold = single_threshold(&null, gamma)?;
        let power = |t: f64| -> Result<f64> {
            let f = spike_density(&f0, l, t)?;
            Ok(rejection_rate(&setting.trials(exec, &f, cfg.trials, seed)?, &[threshold]))
        };
        let crit = critical_amplitude(power, target, cfg.iterations)?;
        r.threshold = Some(threshold);
        if !crit.bracketed {
            r.flag = Some("not-bracketed".into());
            ctx.warnings.push(format!("n={n}: power does not cross {target} on [0, 1]"));
            ctx.records.push(r);
            continue;
        }
        let f = spike_density(&f0, l, crit.amplitude)?;
        let distance_sq = f.difference(&f0)?.l2_norm_sq();
        r.epsilon = Some(crit.amplitude);
        r.separation = Some(distance_sq);
        ctx.records.push(with_rate(r, crit.power, cfg.trials));
        log_n.push((n as f64).ln());
        log_rho.push(0.5 * distance_sq.ln());
        log_t.push(crit.amplitude.ln());
        log_kernel.push(continuous_kernel(n, alpha, s).ln());
    }
    if log_n.len() >= 2 {
        let fitted = ols_slope(&log_n, &log_rho);
        let predicted = ols_slope(&log_n, &log_kernel);
        ctx.summary.insert("fitted_slope".into(), fitted);
        ctx.summary.insert("predicted_slope".into(), predicted);
        ctx.summary.insert("slope_difference".into(), fitted - predicted);
        ctx.summary.insert("fitted_slope_amplitude".into(), ols_slope(&log_n, &log_t));
    }
    ctx.summary.insert("points".into(), log_n.len() as f64);
    Ok(ctx.finish())
}

/// Multinomial experiments through the `d`-cell channel.
pub fn run_discrete_experiment(cfg: &ExperimentConfig, exec: &Executor, pinned: &PinnedConstants) -> Result<ExperimentResult> {
    cfg.validate()?;
    let mut ctx = Context::new(cfg, exec);
    let master = Seed(cfg.seed);
    let constant = cfg.constant.unwrap_or(pinned.discrete.constant);
    let mut critical: BTreeMap<(usize, u64, u64, u64), Vec<(usize, f64)>> = BTreeMap::new();
    let mut index = 0u64;
    for &n in &cfg.n {
        for &a in &cfg.alpha {
            let alpha = cfg.budget(a, n);
            for &d in &cfg.d {
                let seed = master.child(index);
                index += 1;
                let p0 = cfg.p0.clone().unwrap_or_else(|| ProbabilityVector::uniform(d));
                let f0 = embed_multinomial(&p0);
                let setting = Setting::new(n, ChannelSpec::single_level(alpha, d)?, f0.clone())?;
                let null = setting.null(exec, cfg.replicates, seed)?;
                let thresholds: Vec<f64> = cfg.gamma.iter().map(|&g| single_threshold(&null, g)).collect::<Result<_>>()?;
                let mut points: Vec<Point> =
                    cfg.epsilon.iter().map(|&e| Point { amplitude: e, beta: None, s: None, label: None }).collect();
                if cfg.at_separation {
                    let k = constant * (d as f64).sqrt() / n as f64;
                    match spike_amplitude_for_separation(&f0, d, k, setting.noise_scale())? {
                        Some(t) => {
                            for &beta in &cfg.beta {
                                points.push(Point { amplitude: t, beta: Some(beta), s: None, label: Some("separation") });
                            }
                        }
                        None => ctx.warnings.push(format!("separation at n={n} alpha={alpha} d={d} exceeds any spike")),
                    }
                }
                let first = ctx.records.len();
                for p in &points {
                    let f = spike_density(&f0, d, p.amplitude)?;
                    let separation = projection_sq_distance(&f, &f0, d)?;
                    let stats = setting.trials(exec, &f, cfg.trials, seed)?;
                    for (&gamma, &threshold) in cfg.gamma.iter().zip(&thresholds) {
                        let mut r = ctx.base(n, alpha, gamma, d);
                        r.d = Some(d);
                        r.epsilon = Some(p.amplitude);
                        r.beta = p.beta;
                        r.separation = Some(separation);
                        r.threshold = Some(threshold);
                        r.flag = p.label.map(String::from);
                        ctx.records.push(with_rate(r, rejection_rate(&stats, &[threshold]), cfg.trials));
                    }
                }
                for &gamma in &cfg.gamma {
                    let idx: Vec<usize> = (first..ctx.records.len()).filter(|&i| ctx.records[i].gamma == gamma).collect();
                    let mut group: Vec<Record> = idx.iter().map(|&i| ctx.records[i].clone()).collect();
                    flag_non_monotone(&mut group, &mut ctx.warnings);
                    for (i, r) in idx.into_iter().zip(group) {
                        ctx.records[i] = r;
                    }
                }
                if cfg.critical {
                    for (&gamma, &threshold) in cfg.gamma.iter().zip(&thresholds) {
                        for &beta in &cfg.beta {
                            let power = |t: f64| -> Result<f64> {
                                let f = spike_density(&f0, d, t)?;
                                Ok(rejection_rate(&setting.trials(exec, &f, cfg.trials, seed)?, &[threshold]))
                            };
                            let crit = critical_amplitude(power, 1.0 - beta, cfg.iterations)?;
                            let mut r = ctx.base(n, alpha, gamma, d);
                            r.d = Some(d);
                            r.beta = Some(beta);
                            r.threshold = Some(threshold);
                            if crit.bracketed {
                                let f = spike_density(&f0, d, crit.amplitude)?;
                                let separation = projection_sq_distance(&f, &f0, d)?;
                                r.epsilon = Some(crit.amplitude);
                                r.separation = Some(separation);
                                r.flag = Some("critical".into());
                                critical
                                    .entry((n, alpha.to_bits(), gamma.to_bits(), beta.to_bits()))
                                    .or_default()
                                    .push((d, (separation / d as f64).sqrt()));
                                ctx.records.push(with_rate(r, crit.power, cfg.trials));
                            } else {
                                r.flag = Some("not-bracketed".into());
                                ctx.warnings.push(format!("n={n} d={d}: power does not cross {} on [0, 1]", 1.0 - beta));
                                ctx.records.push(r);
                            }
                        }
                    }
                }
            }
        }
    }
    if cfg.critical {
        // The private kernel grows like d^{1/4} in the probability-vector norm.
        let increasing = critical.values().all(|series| {
            let mut series = series.clone();
            series.sort_by_key(|p| p.0);
            series.windows(2).all(|w| w[1].1 > w[0].1)
        });
        ctx.summary.insert("critical_increasing_in_d".into(), if increasing { 1.0 } else { 0.0 });
    }
    Ok(ctx.finish())
}

/// Level and power of the aggregated multi-resolution test.
pub fn run_adaptive_experiment(cfg: &ExperimentConfig, exec: &Executor, pinned: &PinnedConstants) -> Result<ExperimentResult> {
    cfg.validate()?;
    let mut ctx = Context::new(cfg, exec);
    let master = Seed(cfg.seed);
    let f0 = PiecewiseConstantDensity::uniform(1);
    let constant = cfg.constant.unwrap_or(pinned.adaptive.constant);
    let cells = cfg.resolution.first().copied().unwrap_or(2);
    let unit = spike_density(&f0, cells, 1.0)?.difference(&f0)?.l2_norm_sq().sqrt();
    let mut index = 0u64;
    for &n in &cfg.n {
        for &a in &cfg.alpha {
            let alpha = cfg.budget(a, n);
            let seed = master.child(index);
            index += 1;
            let spec = ChannelSpec::multi_level_truncated(alpha, n, cfg.max_level.unwrap_or(u32::MAX))?;
            let top = spec.levels.last().map(|l| l.resolution).unwrap_or(1);
            if rate_condition(n, alpha) < 1.0 {
                ctx.warnings.push(format!("n={n} alpha={alpha}: n·alpha²/log^2.5(n) < 1, rate guarantee lapses"));
            }
            let setting = Setting::new(n, spec, f0.clone())?;
            let null = setting.null(exec, cfg.replicates, seed)?;
            let calibrations = cfg.gamma.iter().map(|&g| search_u_gamma(&null, g, cfg.tolerance)).collect::<Result<Vec<_>>>()?;
            let mut points = vec![Point { amplitude: 0.0, beta: None, s: None, label: Some("null") }];
            points.extend(cfg.epsilon.iter().filter(|&&e| e > 0.0).map(|&e| Point { amplitude: e, beta: None, s: None, label: None }));
            if cfg.at_separation {
                for &s in &cfg.s {
                    let t = constant * adaptive_kernel(n, alpha, s) / unit;
                    for &beta in &cfg.beta {
                        points.push(Point { amplitude: t, beta: Some(beta), s: Some(s), label: Some("separation") });
                    }
                }
            }
            for p in &points {
                let f = match spike_density(&f0, cells, p.amplitude) {
                    Ok(f) => f,
                    Err(Error::Infeasible(msg)) => {
                        ctx.warnings.push(format!("skipped amplitude {}: {msg}", p.amplitude));
                        continue;
                    }
                    Err(e) => return Err(e),
                };
                let separation = f.difference(&f0)?.l2_norm_sq();
                let stats = setting.trials(exec, &f, cfg.trials, seed)?;
                for (&gamma, cal) in cfg.gamma.iter().zip(&calibrations) {
                    let mut r = ctx.base(n, alpha, gamma, top);
                    r.epsilon = Some(p.amplitude);
                    r.beta = p.beta;
                    r.s = p.s;
                    r.separation = Some(separation);
                    r.u_gamma = Some(cal.u_gamma);
                    r.flag = p.label.map(String::from);
                    ctx.records.push(with_rate(r, rejection_rate(&stats, &cal.thresholds), cfg.trials));
                }
            }
        }
    }
    Ok(ctx.finish())
}

/// Dispatch on the configured kind.
pub fn run(cfg: &ExperimentConfig, exec: &Executor, pinned: &PinnedConstants) -> Result<ExperimentResult> {
    match cfg.kind {
        ExperimentKind::Level => run_level_experiment(cfg, exec),
        ExperimentKind::PowerCurve => run_power_curve(cfg, exec, pinned),
        ExperimentKind::RateRegression => run_rate_regression(cfg, exec),
        ExperimentKind::Discrete => run_discrete_experiment(cfg, exec, pinned),
        ExperimentKind::Adaptive => run_adaptive_experiment(cfg, exec, pinned),
    }
}
