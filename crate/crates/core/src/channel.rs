//! Non-interactive Laplace privatization channels.
//!
//! A sample `x ∈ [0, 1)` is released as `Z_k = φ_{L,k}(x) + σ_L·W_k` for each
//! cell `k` of every released resolution `L`, with `W_k` i.i.d. unit-variance
//! Laplace. The single-level channel uses `σ_L = 2√2·√L/α`; the multi-level
//! channel releases every `L = 2^J` with `2^J ≤ n²` and inflates each scale
//! by the number of levels.

use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dyadic::cell_of;
use crate::error::{domain, Error, Result};
use crate::rng::{purpose, NoiseSource, Seed, Stream};

const TWO_SQRT_2: f64 = 2.0 * std::f64::consts::SQRT_2;

/// Laplace standard deviation for one resolution.
///
/// `level_count` is `|𝒥|` for the multi-level channel and `None` for the
/// single-level one.
pub fn laplace_scale_for(alpha: f64, resolution: usize, level_count: Option<usize>) -> Result<f64> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return domain(format!("privacy budget must be positive, got {alpha}"));
    }
    if resolution == 0 {
        return domain("resolution must be positive");
    }
    let inflation = match level_count {
        None => 1.0,
        Some(0) => return domain("level count must be positive"),
        Some(c) => c as f64,
    };
    Ok(TWO_SQRT_2 * inflation * (resolution as f64).sqrt() / alpha)
}

/// Largest `J` with `2^J ≤ n²`.
pub fn max_adaptive_level(n: usize) -> u32 {
    let square = (n.max(1) as u128) * (n.max(1) as u128);
    127 - square.leading_zeros()
}

/// The resolution exponents `𝒥 = {J : 2^J ≤ n²}`.
pub fn adaptive_levels(n: usize) -> Vec<u32> {
    (0..=max_adaptive_level(n)).collect()
}

/// One released resolution and its noise scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelNoise {
    pub resolution: usize,
    pub noise_scale: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChannelMode {
    SingleLevel,
    /// `level_count` is the inflation factor `|𝒥|`.
    MultiLevel { level_count: usize },
}

/// Resolutions and noise scales of an α-LDP Laplace channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelSpec {
    pub alpha: f64,
    pub mode: ChannelMode,
    pub levels: Vec<LevelNoise>,
}

impl ChannelSpec {
    pub fn single_level(alpha: f64, resolution: usize) -> Result<Self> {
        let noise_scale = laplace_scale_for(alpha, resolution, None)?;
        Ok(ChannelSpec {
            alpha,
            mode: ChannelMode::SingleLevel,
            levels: vec![LevelNoise { resolution, noise_scale }],
        })
    }

    /// The adaptive channel for sample size `n`: every `2^J ≤ n²`.
    pub fn multi_level(alpha: f64, n: usize) -> Result<Self> {
        Self::multi_level_truncated(alpha, n, u32::MAX)
    }

    /// The adaptive channel restricted to levels `J ≤ max_level`.
    ///
    /// Scales keep the full `|𝒥|` inflation, so each released level has the
    /// same law as in the untruncated channel.
    pub fn multi_level_truncated(alpha: f64, n: usize, max_level: u32) -> Result<Self> {
        if n == 0 {
            return domain("sample size must be positive");
        }
        let all = adaptive_levels(n);
        let level_count = all.len();
        let levels = all
            .into_iter()
            .filter(|&j| j <= max_level)
            .map(|j| {
                let resolution = 1usize << j;
                laplace_scale_for(alpha, resolution, Some(level_count))
                    .map(|noise_scale| LevelNoise { resolution, noise_scale })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ChannelSpec { alpha, mode: ChannelMode::MultiLevel { level_count }, levels })
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return domain(format!("privacy budget must be positive, got {}", self.alpha));
        }
        if self.levels.is_empty() {
            return Err(Error::Config("channel releases no level".into()));
        }
        let inflation = match self.mode {
            ChannelMode::SingleLevel => {
                if self.levels.len() != 1 {
                    return Err(Error::Config("single-level channel with several levels".into()));
                }
                None
            }
            ChannelMode::MultiLevel { level_count } => {
                if self.levels.len() > level_count {
                    return Err(Error::Config("more released levels than the inflation factor".into()));
                }
                Some(level_count)
            }
        };
        for level in &self.levels {
            let expected = laplace_scale_for(self.alpha, level.resolution, inflation)?;
            if (level.noise_scale - expected).abs() > 1e-12 * expected.max(1.0) {
                return Err(Error::Config(format!(
                    "noise scale {} at resolution {} should be {expected}",
                    level.noise_scale, level.resolution
                )));
            }
        }
        Ok(())
    }

    /// Length of one private view (all levels concatenated).
    pub fn dimension(&self) -> usize {
        self.levels.iter().map(|l| l.resolution).sum()
    }

    pub fn resolutions(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.resolution).collect()
    }
}

/// Write the private view of `x` into `out` (length `spec.dimension()`).
pub fn privatize_row<N: NoiseSource + ?Sized>(x: f64, spec: &ChannelSpec, noise: &mut N, out: &mut [f64]) {
    debug_assert_eq!(out.len(), spec.dimension());
    let mut offset = 0;
    for level in &spec.levels {
        let l = level.resolution;
        let row = &mut out[offset..offset + l];
        let hit = cell_of(l, x);
        let height = (l as f64).sqrt();
        for (k, z) in row.iter_mut().enumerate() {
            let signal = if k == hit { height } else { 0.0 };
            *z = signal + level.noise_scale * noise.laplace();
        }
        offset += l;
    }
}

pub(crate) fn check_samples(xs: &[f64]) -> Result<()> {
    match xs.iter().find(|x| !(0.0..1.0).contains(*x)) {
        Some(x) => domain(format!("sample {x} outside [0, 1)")),
        None => Ok(()),
    }
}

/// Noise stream for sample `i` of a release seeded by `seed`.
pub(crate) fn sample_noise(base: &Stream, i: usize) -> Stream {
    base.fork(i as u64)
}

pub(crate) fn noise_base(seed: Seed) -> Stream {
    Stream::new(seed.child(purpose::NOISE), 0)
}

/// Privatize `xs` through `spec`; reproducible from `seed` alone.
pub fn privatize(xs: &[f64], spec: &ChannelSpec, seed: Seed) -> Result<PrivatizedSample> {
    let base = noise_base(seed);
    privatize_with(xs, spec, seed, |i| sample_noise(&base, i))
}

/// Privatize with an explicit per-sample noise source.
pub fn privatize_with<N, F>(xs: &[f64], spec: &ChannelSpec, seed: Seed, make_noise: F) -> Result<PrivatizedSample>
where
    N: NoiseSource,
    F: Fn(usize) -> N + Sync,
{
    spec.validate()?;
    check_samples(xs)?;
    let dim = spec.dimension();
    let mut views = vec![0.0; xs.len() * dim];
    views.par_chunks_mut(dim.max(1)).enumerate().for_each(|(i, row)| {
        let mut noise = make_noise(i);
        privatize_row(xs[i], spec, &mut noise, row);
    });
    let n = xs.len();
    let mut levels: Vec<LevelBlock> = spec
        .levels
        .iter()
        .map(|l| LevelBlock { resolution: l.resolution, data: Vec::with_capacity(n * l.resolution) })
        .collect();
    for row in views.chunks(dim.max(1)) {
        let mut offset = 0;
        for block in &mut levels {
            block.data.extend_from_slice(&row[offset..offset + block.resolution]);
            offset += block.resolution;
        }
    }
    Ok(PrivatizedSample { n, channel: spec.clone(), seed: seed.value(), levels })
}

/// `log q(z|x) − log q(z|x')` for the product-Laplace density of one view.
pub fn privacy_ratio_audit(spec: &ChannelSpec, x: f64, x_prime: f64, z: &[f64]) -> Result<f64> {
    check_samples(&[x, x_prime])?;
    if z.len() != spec.dimension() {
        return Err(Error::Shape(format!("view has {} entries, channel emits {}", z.len(), spec.dimension())));
    }
    if z.iter().any(|v| !v.is_finite()) {
        return domain("view must be finite");
    }
    let mut log_ratio = 0.0;
    let mut offset = 0;
    for level in &spec.levels {
        let l = level.resolution;
        let height = (l as f64).sqrt();
        let (a, b) = (cell_of(l, x), cell_of(l, x_prime));
        // Coordinates outside cells a and b contribute |z| - |z| = 0.
        if a != b {
            let term = |k: usize| {
                let zk = z[offset + k];
                let phi = if k == a { height } else { 0.0 };
                let phi_prime = if k == b { height } else { 0.0 };
                (zk - phi_prime).abs() - (zk - phi).abs()
            };
            log_ratio += std::f64::consts::SQRT_2 / level.noise_scale * (term(a) + term(b));
        }
        offset += l;
    }
    Ok(log_ratio)
}

/// The `n × L` matrix of one released resolution, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelBlock {
    pub resolution: usize,
    pub data: Vec<f64>,
}

/// Private views of a whole sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrivatizedSample {
    pub n: usize,
    pub channel: ChannelSpec,
    pub seed: u64,
    pub levels: Vec<LevelBlock>,
}

#[derive(Serialize, Deserialize)]
struct BinaryHeader {
    n: usize,
    channel: ChannelSpec,
    seed: u64,
    resolutions: Vec<usize>,
}

const MAGIC: &[u8; 4] = b"LDPZ";
const FORMAT_VERSION: u32 = 1;

impl PrivatizedSample {
    pub fn validate(&self) -> Result<()> {
        self.channel.validate()?;
        if self.levels.len() != self.channel.levels.len() {
            return Err(Error::Shape("level count differs from the channel".into()));
        }
        for (block, level) in self.levels.iter().zip(&self.channel.levels) {
            if block.resolution != level.resolution || block.data.len() != self.n * block.resolution {
                return Err(Error::Shape(format!(
                    "level with resolution {} holds {} values for n = {}",
                    block.resolution,
                    block.data.len(),
                    self.n
                )));
            }
        }
        Ok(())
    }

    /// Row `i` of level `level_index`.
    pub fn row(&self, level_index: usize, i: usize) -> &[f64] {
        let block = &self.levels[level_index];
        &block.data[i * block.resolution..(i + 1) * block.resolution]
    }

    /// The concatenated view of sample `i` across levels.
    pub fn view(&self, i: usize) -> Vec<f64> {
        (0..self.levels.len()).flat_map(|j| self.row(j, i).iter().copied()).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let sample: PrivatizedSample = serde_json::from_str(text)?;
        sample.validate()?;
        Ok(sample)
    }

    /// Binary container: magic, version, JSON header, then little-endian f64 data.
    pub fn write_binary<W: Write>(&self, mut out: W) -> Result<()> {
        let header = BinaryHeader {
            n: self.n,
            channel: self.channel.clone(),
            seed: self.seed,
            resolutions: self.levels.iter().map(|b| b.resolution).collect(),
        };
        let header = serde_json::to_vec(&header)?;
        out.write_all(MAGIC)?;
        out.write_all(&FORMAT_VERSION.to_le_bytes())?;
        out.write_all(&(header.len() as u64).to_le_bytes())?;
        out.write_all(&header)?;
        for block in &self.levels {
            for v in &block.data {
                out.write_all(&v.to_le_bytes())?;
            }
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut input: R) -> Result<Self> {
        let mut magic = [0u8; 4];
        input.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::Serialization("not a privatized-sample container".into()));
        }
        let mut word = [0u8; 4];
        input.read_exact(&mut word)?;
        let version = u32::from_le_bytes(word);
        if version != FORMAT_VERSION {
            return Err(Error::Serialization(format!("unsupported container version {version}")));
        }
        let mut long = [0u8; 8];
        input.read_exact(&mut long)?;
        let mut header = vec![0u8; u64::from_le_bytes(long) as usize];
        input.read_exact(&mut header)?;
        let header: BinaryHeader = serde_json::from_slice(&header)?;
        let mut levels = Vec::with_capacity(header.resolutions.len());
        for &resolution in &header.resolutions {
            let mut data = Vec::with_capacity(header.n * resolution);
            for _ in 0..header.n * resolution {
                input.read_exact(&mut long)?;
                data.push(f64::from_le_bytes(long));
            }
            levels.push(LevelBlock { resolution, data });
        }
        let sample = PrivatizedSample { n: header.n, channel: header.channel, seed: header.seed, levels };
        sample.validate()?;
        Ok(sample)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::phi_eval;
    use crate::rng::ZeroNoise;

    #[test]
    fn scale_examples() {
        assert!((laplace_scale_for(0.5, 8, None).unwrap() - 16.0).abs() < 1e-12);
        assert!((laplace_scale_for(1.0, 1, None).unwrap() - 2.0 * 2f64.sqrt()).abs() < 1e-12);
        assert!((laplace_scale_for(1.0, 4, Some(7)).unwrap() - 39.597_979_746_446_66).abs() < 1e-9);
        assert!(laplace_scale_for(0.0, 4, None).is_err());
        assert!(laplace_scale_for(-1.0, 4, None).is_err());
    }

    #[test]
    fn level_set_size() {
        assert_eq!(adaptive_levels(1), vec![0]);
        assert_eq!(adaptive_levels(2).len(), 3);
        for n in 1..2000usize {
            let expected = 1 + (2.0 * (n as f64).log2()).floor() as usize;
            assert_eq!(adaptive_levels(n).len(), expected, "n = {n}");
            let top = 1u128 << max_adaptive_level(n);
            assert!(top <= (n * n) as u128 && 2 * top > (n * n) as u128);
        }
    }

    #[test]
    fn multi_level_scales_inflate_single_level() {
        let spec = ChannelSpec::multi_level(1.0, 100).unwrap();
        let count = adaptive_levels(100).len();
        assert_eq!(spec.levels.len(), count);
        for level in &spec.levels {
            let single = laplace_scale_for(1.0, level.resolution, None).unwrap();
            assert!((level.noise_scale - count as f64 * single).abs() < 1e-9);
        }
        spec.validate().unwrap();
        let capped = ChannelSpec::multi_level_truncated(1.0, 100, 3).unwrap();
        assert_eq!(capped.levels.len(), 4);
        assert_eq!(capped.levels[..], spec.levels[..4]);
    }

    #[test]
    fn zero_noise_gives_indicator_features() {
        let spec = ChannelSpec::single_level(1.0, 4).unwrap();
        let xs = [0.1, 0.3, 0.99];
        let sample = privatize_with(&xs, &spec, Seed(0), |_| ZeroNoise).unwrap();
        for (i, &x) in xs.iter().enumerate() {
            for k in 0..4 {
                assert_eq!(sample.row(0, i)[k], phi_eval(4, k, x).unwrap());
            }
        }
    }

    #[test]
    fn release_is_reproducible() {
        let spec = ChannelSpec::single_level(1.0, 2).unwrap();
        let a = privatize(&[0.1], &spec, Seed(42)).unwrap();
        let b = privatize(&[0.1], &spec, Seed(42)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.levels[0].data.len(), 2);
        let c = privatize(&[0.1], &spec, Seed(43)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn samples_outside_unit_interval_are_rejected() {
        let spec = ChannelSpec::single_level(1.0, 2).unwrap();
        assert!(matches!(privatize(&[0.2, 1.0], &spec, Seed(0)), Err(Error::Domain(_))));
        assert!(matches!(privatize(&[-0.1], &spec, Seed(0)), Err(Error::Domain(_))));
    }

    #[test]
    fn audit_examples() {
        let spec = ChannelSpec::single_level(1.0, 4).unwrap();
        let z = vec![0.3, -1.0, 2.5, 0.0];
        assert_eq!(privacy_ratio_audit(&spec, 0.6, 0.6, &z).unwrap(), 0.0);
        // x in cell 0, x' in cell 2: push z_0 above √L and z_2 below 0.
        let worst = vec![3.0, 0.7, -1.0, 0.2];
        let r = privacy_ratio_audit(&spec, 0.1, 0.6, &worst).unwrap();
        assert!((r - 1.0).abs() < 1e-12, "{r}");
        assert!(privacy_ratio_audit(&spec, 0.1, 0.6, &worst[..3]).is_err());
    }

    #[test]
    fn sparse_audit_matches_dense_sum() {
        let spec = ChannelSpec::multi_level(0.7, 6).unwrap();
        let sample = privatize(&[0.37], &spec, Seed(5)).unwrap();
        let z = sample.view(0);
        let (x, xp) = (0.37, 0.81);
        let mut dense = 0.0;
        let mut offset = 0;
        for level in &spec.levels {
            let mut level_sum = 0.0;
            for k in 0..level.resolution {
                let phi = phi_eval(level.resolution, k, x).unwrap();
                let phi_p = phi_eval(level.resolution, k, xp).unwrap();
                level_sum += (z[offset + k] - phi_p).abs() - (z[offset + k] - phi).abs();
            }
            dense += std::f64::consts::SQRT_2 / level.noise_scale * level_sum;
            offset += level.resolution;
        }
        let sparse = privacy_ratio_audit(&spec, x, xp, &z).unwrap();
        assert!((dense - sparse).abs() < 1e-12);
    }

    #[test]
    fn containers_round_trip() {
        let spec = ChannelSpec::multi_level(2.0, 3).unwrap();
        let sample = privatize(&[0.1, 0.5, 0.9], &spec, Seed(9)).unwrap();
        let json = sample.to_json().unwrap();
        assert_eq!(PrivatizedSample::from_json(&json).unwrap(), sample);
        let mut bytes = Vec::new();
        sample.write_binary(&mut bytes).unwrap();
        assert_eq!(PrivatizedSample::read_binary(&bytes[..]).unwrap(), sample);
        bytes[0] = b'X';
        assert!(PrivatizedSample::read_binary(&bytes[..]).is_err());
        let mut broken = sample.clone();
        broken.levels[1].data.pop();
        assert!(PrivatizedSample::from_json(&broken.to_json().unwrap()).is_err());
    }
}
