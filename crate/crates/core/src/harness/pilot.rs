//! Fitting the separation constant on a pilot setting.
//!
//! The constant `C` scales a separation formula into a concrete alternative;
//! the pilot finds the smallest `C` (on a log-bisection grid) whose simulated
//! power reaches `1 − β`.

use serde::{Deserialize, Serialize};

use super::alternatives::{spike_amplitude_for_separation, spike_density};
use super::constants::PinnedConstant;
use super::executor::Executor;
use super::experiments::{rejection_rate, single_threshold, Setting};
use crate::adaptive::{search_u_gamma, DEFAULT_TOLERANCE};
use crate::channel::ChannelSpec;
use crate::dyadic::{embed_multinomial, Piecewise, PiecewiseConstantDensity, ProbabilityVector};
use crate::error::{Error, Result};
use crate::rates::adaptive_kernel;
use crate::rng::Seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PilotKind {
    /// `‖Π(f − f0)‖² = C (‖f‖ + ‖f0‖ + σ²) √L / n` on `L` cells.
    Continuous,
    /// The same separation with `L = d` cells of a multinomial.
    Discrete,
    /// `‖f − f0‖ = C ·` adaptive kernel, spike on `L` cells.
    Adaptive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pilot {
    pub kind: PilotKind,
    pub n: usize,
    pub alpha: f64,
    pub s: f64,
    /// Test resolution, number of categories, or spike cells.
    #[serde(rename = "L")]
    pub resolution: usize,
    pub gamma: f64,
    pub beta: f64,
    pub trials: usize,
    pub replicates: usize,
    pub iterations: usize,
    pub seed: u64,
    #[serde(default)]
    pub max_level: Option<u32>,
}

impl Pilot {
    pub fn continuous() -> Self {
        Pilot {
            kind: PilotKind::Continuous,
            n: 1000,
            alpha: 1.0,
            s: 1.0,
            resolution: 8,
            gamma: 0.05,
            beta: 0.05,
            trials: 2000,
            replicates: 999,
            iterations: 14,
            seed: 0x5eed_0001,
            max_level: None,
        }
    }

    pub fn discrete() -> Self {
        Pilot { kind: PilotKind::Discrete, resolution: 16, seed: 0x5eed_0002, ..Pilot::continuous() }
    }

    pub fn adaptive() -> Self {
        Pilot {
            kind: PilotKind::Adaptive,
            n: 100,
            alpha: 40.0,
            resolution: 2,
            trials: 500,
            iterations: 10,
            seed: 0x5eed_0003,
            ..Pilot::continuous()
        }
    }
}

/// A pilot with its null calibration done.
pub struct PilotRun<'a> {
    pilot: &'a Pilot,
    exec: &'a Executor,
    setting: Setting,
    thresholds: Vec<f64>,
    seed: Seed,
}

impl<'a> PilotRun<'a> {
    pub fn new(pilot: &'a Pilot, exec: &'a Executor) -> Result<Self> {
        let seed = Seed(pilot.seed);
        let (spec, f0) = match pilot.kind {
            PilotKind::Continuous => {
                (ChannelSpec::single_level(pilot.alpha, pilot.resolution)?, PiecewiseConstantDensity::uniform(1))
            }
            PilotKind::Discrete => (
                ChannelSpec::single_level(pilot.alpha, pilot.resolution)?,
                embed_multinomial(&ProbabilityVector::uniform(pilot.resolution)),
            ),
            PilotKind::Adaptive => (
                ChannelSpec::multi_level_truncated(pilot.alpha, pilot.n, pilot.max_level.unwrap_or(u32::MAX))?,
                PiecewiseConstantDensity::uniform(1),
            ),
        };
        let setting = Setting::new(pilot.n, spec, f0)?;
        let null = setting.null(exec, pilot.replicates, seed)?;
        let thresholds = match pilot.kind {
            PilotKind::Adaptive => search_u_gamma(&null, pilot.gamma, DEFAULT_TOLERANCE)?.thresholds,
            _ => vec![single_threshold(&null, pilot.gamma)?],
        };
        Ok(PilotRun { pilot, exec, setting, thresholds, seed })
    }

    /// Spike amplitude implied by constant `c`, if feasible.
    pub fn amplitude(&self, c: f64) -> Result<Option<f64>> {
        let p = self.pilot;
        let f0 = &self.setting.f0;
        match p.kind {
            PilotKind::Continuous | PilotKind::Discrete => {
                let k = c * (p.resolution as f64).sqrt() / p.n as f64;
                spike_amplitude_for_separation(f0, p.resolution, k, self.setting.noise_scale())
            }
            PilotKind::Adaptive => {
                let unit = spike_density(f0, p.resolution, 1.0)?.difference(f0)?.l2_norm_sq().sqrt();
                let t = c * adaptive_kernel(p.n, p.alpha, p.s) / unit;
                Ok((t <= 1.0).then_some(t))
            }
        }
    }

    pub fn power(&self, c: f64) -> Result<Option<f64>> {
        let Some(t) = self.amplitude(c)? else { return Ok(None) };
        let f = spike_density(&self.setting.f0, self.pilot.resolution, t)?;
        let stats = self.setting.trials(self.exec, &f, self.pilot.trials, self.seed)?;
        Ok(Some(rejection_rate(&stats, &self.thresholds)))
    }

    /// Smallest constant on the bisection grid with power `≥ 1 − β`.
    pub fn fit(&self) -> Result<PinnedConstant> {
        let target = 1.0 - self.pilot.beta;
        let reaches = |c: f64| -> Result<bool> { Ok(self.power(c)?.is_none_or(|p| p >= target)) };
        let (mut lo, mut hi) = (0.5, 1.0);
        if reaches(hi)? {
            while reaches(lo)? {
                hi = lo;
                lo *= 0.5;
                if lo < 1e-9 {
                    return Err(Error::Infeasible("pilot power exceeds the target at any constant".into()));
                }
            }
        } else {
            while !reaches(hi)? {
                lo = hi;
                hi *= 2.0;
            }
        }
        if self.power(hi)?.is_none() {
            return Err(Error::Infeasible("pilot target power needs an alternative outside the family".into()));
        }
        for _ in 0..self.pilot.iterations {
            let mid = (lo * hi).sqrt();
            if reaches(mid)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let power = self.power(hi)?.expect("feasible by construction");
        Ok(PinnedConstant { constant: hi, power, pilot: self.pilot.clone() })
    }
}
