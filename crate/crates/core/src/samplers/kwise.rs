//! Biased bits with limited independence: each output bit is the AND of `d`
//! consecutive bits of an inner string.

use rayon::prelude::*;
use serde::Serialize;

use crate::bits::BitSubset;
use crate::error::{Error, Result};
use crate::fourier::INPUT_BUDGET_BITS;

use super::smallbias::{min_degree, SmallBiasSpec};

/// Where the `n·d` inner bits come from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InnerSource {
    SmallBias(SmallBiasSpec),
    /// Truly uniform inner bits, read straight from the seed.
    Uniform,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AlmostKWiseSpec {
    pub n: usize,
    pub d: u32,
    pub k: usize,
    pub delta: f64,
    pub inner: InnerSource,
}

impl AlmostKWiseSpec {
    /// Inner small-bias field of degree `m`; `delta` is the accounted bound.
    pub fn new(n: usize, d: u32, k: usize, m: u32) -> Result<Self> {
        check_shape(n, d, k)?;
        let inner = SmallBiasSpec::new(n * d as usize, m)?;
        let mut spec = AlmostKWiseSpec {
            n,
            d,
            k,
            delta: 0.0,
            inner: InnerSource::SmallBias(inner),
        };
        spec.delta = spec.accounted_delta();
        Ok(spec)
    }

    /// Smallest inner field whose accounted distance is at most `delta`.
    pub fn for_delta(n: usize, d: u32, k: usize, delta: f64) -> Result<Self> {
        check_shape(n, d, k)?;
        if !(delta > 0.0) {
            return Err(Error::InvalidParams(format!("delta {delta} must be positive")));
        }
        let m = min_degree(accounting_factor(k, d) * (n as f64 * d as f64 - 1.0), delta).max(1);
        let mut spec = Self::new(n, d, k, m)?;
        spec.delta = delta.max(spec.delta);
        Ok(spec)
    }

    pub fn ideal(n: usize, d: u32, k: usize) -> Result<Self> {
        check_shape(n, d, k)?;
        Ok(AlmostKWiseSpec {
            n,
            d,
            k,
            delta: 0.0,
            inner: InnerSource::Uniform,
        })
    }

    /// `2^{kd/2}` times the inner bias; zero for a uniform inner source.
    pub fn accounted_delta(&self) -> f64 {
        match self.inner {
            InnerSource::SmallBias(s) => accounting_factor(self.k, self.d) * s.claimed_bias(),
            InnerSource::Uniform => 0.0,
        }
    }

    pub fn p(&self) -> f64 {
        0.5f64.powi(self.d as i32)
    }

    pub fn seed_len(&self) -> usize {
        match self.inner {
            InnerSource::SmallBias(s) => s.seed_len(),
            InnerSource::Uniform => self.n * self.d as usize,
        }
    }

    pub fn sample(&self, seed: &BitSubset) -> Result<BitSubset> {
        if seed.len() != self.seed_len() {
            return Err(Error::BadSeedLength {
                expected: self.seed_len(),
                got: seed.len(),
            });
        }
        let inner = match self.inner {
            InnerSource::SmallBias(s) => s.sample(seed)?,
            InnerSource::Uniform => seed.clone(),
        };
        let d = self.d as usize;
        let mut out = BitSubset::zeros(self.n);
        for i in 0..self.n {
            out.set(i, (i * d..(i + 1) * d).all(|j| inner.get(j)));
        }
        Ok(out)
    }
}

fn accounting_factor(k: usize, d: u32) -> f64 {
    2f64.powf((k as f64) * (d as f64) / 2.0)
}

fn check_shape(n: usize, d: u32, k: usize) -> Result<()> {
    if n == 0 || d == 0 || k == 0 || k > n {
        return Err(Error::InvalidParams(format!("need n ≥ 1, d ≥ 1 and 1 ≤ k ≤ n (n={n}, d={d}, k={k})")));
    }
    Ok(())
}

pub fn almost_kwise_sample(spec: &AlmostKWiseSpec, seed: &BitSubset) -> Result<BitSubset> {
    spec.sample(seed)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KwiseReport {
    /// Largest distance from `Bernoulli(p)^k` over all `k`-subsets.
    pub max_distance: f64,
    pub worst_subset: Vec<usize>,
    /// Largest distance from the product of the subset's own marginals.
    pub max_distance_to_marginals: f64,
    pub max_marginal_gap: f64,
    pub bound: f64,
    pub pass: bool,
}

/// Largest number of `(subset, pattern)` cells `verify_kwise` will tabulate.
pub const KWISE_CELL_BUDGET: u128 = 50_000_000;

fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        let Some(i) = (0..k).rev().find(|&i| cur[i] < n - k + i) else {
            return out;
        };
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

fn binom(n: usize, k: usize) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Exact statistical distances of every `k` coordinates, by enumerating all seeds.
pub fn verify_kwise(spec: &AlmostKWiseSpec) -> Result<KwiseReport> {
    let seeds = spec.seed_len();
    let cells = binom(spec.n, spec.k) << spec.k;
    if seeds > INPUT_BUDGET_BITS || spec.n > 64 || cells > KWISE_CELL_BUDGET {
        return Err(Error::BudgetExceeded {
            what: "k-wise verification",
            needed: cells.max(1u128 << seeds.min(127)),
            budget: KWISE_CELL_BUDGET,
        });
    }
    let outputs: Vec<u64> = (0..1u64 << seeds)
        .into_par_iter()
        .map(|s| spec.sample(&BitSubset::from_u64(seeds, s)).map(|o| o.as_u64().unwrap()))
        .collect::<Result<_>>()?;
    let total = outputs.len() as f64;
    let p = spec.p();

    let mut ones = vec![0u64; spec.n];
    for &o in &outputs {
        for (i, c) in ones.iter_mut().enumerate() {
            *c += (o >> i) & 1;
        }
    }
    let marg: Vec<f64> = ones.iter().map(|&c| c as f64 / total).collect();
    let max_marginal_gap = marg.iter().map(|m| (m - p).abs()).fold(0.0, f64::max);

    let subsets = k_subsets(spec.n, spec.k);
    let dists: Vec<(f64, f64)> = subsets
        .par_iter()
        .map(|sub| {
            let mut hist = vec![0u64; 1 << spec.k];
            for &o in &outputs {
                let pat = sub.iter().enumerate().fold(0usize, |acc, (j, &i)| acc | ((((o >> i) & 1) as usize) << j));
                hist[pat] += 1;
            }
            let mut ideal = 0.0;
            let mut product = 0.0;
            for (pat, &c) in hist.iter().enumerate() {
                let freq = c as f64 / total;
                let mut pi = 1.0;
                let mut pm = 1.0;
                for (j, &i) in sub.iter().enumerate() {
                    let bit = (pat >> j) & 1 == 1;
                    pi *= if bit { p } else { 1.0 - p };
                    pm *= if bit { marg[i] } else { 1.0 - marg[i] };
                }
                ideal += (freq - pi).abs();
                product += (freq - pm).abs();
            }
            (ideal / 2.0, product / 2.0)
        })
        .collect();

    let mut worst = 0;
    for (i, d) in dists.iter().enumerate() {
        if d.0 > dists[worst].0 {
            worst = i;
        }
    }
    let max_distance = dists[worst].0;
    let max_distance_to_marginals = dists.iter().map(|d| d.1).fold(0.0, f64::max);
    Ok(KwiseReport {
        max_distance,
        worst_subset: subsets[worst].clone(),
        max_distance_to_marginals,
        max_marginal_gap,
        bound: spec.delta,
        pass: max_distance <= spec.delta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn d1_passes_inner_bits_through() {
        let spec = AlmostKWiseSpec::new(6, 1, 2, 5).unwrap();
        let InnerSource::SmallBias(inner) = spec.inner else { unreachable!() };
        for seed in [0u64, 77, 1023] {
            let seed = BitSubset::from_u64(10, seed);
            assert_eq!(spec.sample(&seed).unwrap(), inner.sample(&seed).unwrap());
        }
    }

    #[test]
    fn all_ones_inner_gives_all_ones() {
        let spec = AlmostKWiseSpec::ideal(5, 3, 2).unwrap();
        assert_eq!(spec.sample(&BitSubset::ones(15)).unwrap(), BitSubset::ones(5));
    }

    #[test]
    fn ideal_source_is_exactly_independent() {
        let r = verify_kwise(&AlmostKWiseSpec::ideal(4, 2, 2).unwrap()).unwrap();
        assert_eq!(r.max_distance, 0.0);
        assert!(r.pass);
    }

    #[test]
    fn marginals_within_delta() {
        let spec = AlmostKWiseSpec::new(4, 2, 1, 6).unwrap();
        let r = verify_kwise(&spec).unwrap();
        assert!(r.max_marginal_gap <= spec.delta);
        assert!((r.max_marginal_gap - r.max_distance).abs() < 1e-15);
    }

    #[test]
    fn for_delta_meets_target() {
        let spec = AlmostKWiseSpec::for_delta(4, 2, 2, 0.05).unwrap();
        assert!(spec.accounted_delta() <= 0.05);
        let smaller = AlmostKWiseSpec::new(4, 2, 2, spec.seed_len() as u32 / 2 - 1).unwrap();
        assert!(smaller.accounted_delta() > 0.05);
    }

    #[test]
    fn subsets_enumerated_in_order() {
        assert_eq!(k_subsets(4, 2).len(), 6);
        assert_eq!(k_subsets(4, 2)[5], vec![2, 3]);
        assert_eq!(k_subsets(3, 3), vec![vec![0, 1, 2]]);
    }
}
