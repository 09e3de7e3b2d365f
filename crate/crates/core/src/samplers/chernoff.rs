//! Tail bound for sums of bits with limited independence, checked against a sampler.

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rand::SeedableRng;
use serde::Serialize;

use crate::bits::BitSubset;
use crate::error::{Error, Result};

use super::kwise::AlmostKWiseSpec;
use super::seed::SeedSource;

/// Seeds up to this many bits are enumerated instead of sampled.
pub const EXHAUSTIVE_SEED_BITS: usize = 20;

/// A seeded distribution on `n` bits with a claimed per-bit mean, independence
/// order and distance from independence.
pub trait BitSampler: Sync {
    fn n(&self) -> usize;
    fn p(&self) -> f64;
    fn independence(&self) -> usize;
    fn delta(&self) -> f64;
    fn seed_len(&self) -> usize;
    fn sample(&self, seed: &BitSubset) -> Result<BitSubset>;
}

/// Fully independent fair bits.
#[derive(Clone, Copy, Debug)]
pub struct UniformBits {
    pub n: usize,
}

impl BitSampler for UniformBits {
    fn n(&self) -> usize {
        self.n
    }
    fn p(&self) -> f64 {
        0.5
    }
    fn independence(&self) -> usize {
        self.n
    }
    fn delta(&self) -> f64 {
        0.0
    }
    fn seed_len(&self) -> usize {
        self.n
    }
    fn sample(&self, seed: &BitSubset) -> Result<BitSubset> {
        Ok(seed.clone())
    }
}

/// A fixed string that nonetheless claims mean `p` and `k`-wise independence.
/// Useful only to show the check can fail.
#[derive(Clone, Copy, Debug)]
pub struct ConstantBits {
    pub n: usize,
    pub p: f64,
    pub k: usize,
    pub value: bool,
}

impl BitSampler for ConstantBits {
    fn n(&self) -> usize {
        self.n
    }
    fn p(&self) -> f64 {
        self.p
    }
    fn independence(&self) -> usize {
        self.k
    }
    fn delta(&self) -> f64 {
        0.0
    }
    fn seed_len(&self) -> usize {
        0
    }
    fn sample(&self, _seed: &BitSubset) -> Result<BitSubset> {
        Ok(if self.value { BitSubset::ones(self.n) } else { BitSubset::zeros(self.n) })
    }
}

impl BitSampler for AlmostKWiseSpec {
    fn n(&self) -> usize {
        self.n
    }
    fn p(&self) -> f64 {
        AlmostKWiseSpec::p(self)
    }
    fn independence(&self) -> usize {
        self.k
    }
    fn delta(&self) -> f64 {
        self.delta
    }
    fn seed_len(&self) -> usize {
        AlmostKWiseSpec::seed_len(self)
    }
    fn sample(&self, seed: &BitSubset) -> Result<BitSubset> {
        AlmostKWiseSpec::sample(self, seed)
    }
}

/// `(20k/(α²μ))^{⌊k/2⌋} + 2δ(ℓ/(αμ))^k`.
pub fn chernoff_bound(k: usize, alpha: f64, mu: f64, delta: f64, ell: usize) -> f64 {
    (20.0 * k as f64 / (alpha * alpha * mu)).powi((k / 2) as i32) + 2.0 * delta * (ell as f64 / (alpha * mu)).powi(k as i32)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChernoffReport {
    pub n: usize,
    pub k: usize,
    pub alpha: f64,
    pub mu: f64,
    /// Observed `Pr[|X − μ| ≥ αμ]`.
    pub tail: f64,
    pub bound: f64,
    pub sigma: f64,
    pub exhaustive: bool,
    pub trials: u64,
    pub pass: bool,
}

/// Compares the observed tail of `Σ X_i` with the bound. `k` defaults to the
/// sampler's independence order and is rounded down to even. Seeds of at most
/// [`EXHAUSTIVE_SEED_BITS`] bits are enumerated; otherwise `trials` seeds are
/// drawn from `root` and the check allows three standard errors of slack.
pub fn chernoff_check(s: &dyn BitSampler, alpha: f64, k: Option<usize>, trials: u64, root: u64) -> Result<ChernoffReport> {
    let p = s.p();
    if p > 0.5 {
        return Err(Error::Precondition(format!("bit expectation {p} exceeds 1/2")));
    }
    if !(alpha > 0.0) || !(p > 0.0) {
        return Err(Error::InvalidParams("alpha and p must be positive".into()));
    }
    let k = k.unwrap_or(s.independence());
    if k > s.independence() {
        return Err(Error::Precondition(format!("k = {k} exceeds the sampler's independence {}", s.independence())));
    }
    let k = k - k % 2;
    if k == 0 {
        return Err(Error::Precondition("need k ≥ 2".into()));
    }
    let n = s.n();
    let mu = n as f64 * p;
    let in_tail = |x: &BitSubset| (x.count_ones() as f64 - mu).abs() >= alpha * mu;

    let seeds = s.seed_len();
    let exhaustive = seeds <= EXHAUSTIVE_SEED_BITS;
    let (hits, total) = if exhaustive {
        let hits = (0..1u64 << seeds)
            .into_par_iter()
            .map(|seed| s.sample(&BitSubset::from_u64(seeds, seed)).map(|x| in_tail(&x) as u64))
            .try_reduce(|| 0, |a, b| Ok(a + b))?;
        (hits, 1u64 << seeds)
    } else {
        if trials == 0 {
            return Err(Error::InvalidParams("sampled check needs trials > 0".into()));
        }
        let hits = (0..trials)
            .into_par_iter()
            .map(|t| {
                let mut rng = ChaCha8Rng::seed_from_u64(root);
                rng.set_stream(t);
                let seed = SeedSource::from_rng(rng).take_bits(seeds)?;
                s.sample(&seed).map(|x| in_tail(&x) as u64)
            })
            .try_reduce(|| 0, |a, b| Ok(a + b))?;
        (hits, trials)
    };
    let tail = hits as f64 / total as f64;
    let sigma = if exhaustive { 0.0 } else { (tail * (1.0 - tail) / total as f64).sqrt() };
    let bound = chernoff_bound(k, alpha, mu, s.delta(), n);
    Ok(ChernoffReport {
        n,
        k,
        alpha,
        mu,
        tail,
        bound,
        sigma,
        exhaustive,
        trials: total,
        pass: tail <= bound + 3.0 * sigma,
    })
}
