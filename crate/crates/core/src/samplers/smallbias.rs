//! The powering construction of small-bias strings over GF(2^m).

use serde::Serialize;

use crate::bits::BitSubset;
use crate::error::{Error, Result};
use crate::fourier::{fwht, INPUT_BUDGET_BITS};

use super::gf::{Field, MAX_DEGREE};

/// `n` output bits from a `2m`-bit seed `(x, y)`; bit `i` is `⟨x^i, y⟩` for
/// `i = 0..n-1`, so the bias is at most `(n−1)/2^m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SmallBiasSpec {
    pub n: usize,
    pub m: u32,
}

impl SmallBiasSpec {
    pub fn new(n: usize, m: u32) -> Result<Self> {
        Field::new(m)?;
        if n == 0 {
            return Err(Error::InvalidParams("small-bias output length must be positive".into()));
        }
        Ok(SmallBiasSpec { n, m })
    }

    /// Smallest field with claimed bias at most `eps`.
    pub fn for_bias(n: usize, eps: f64) -> Result<Self> {
        if !(eps > 0.0) {
            return Err(Error::InvalidParams(format!("bias target {eps} must be positive")));
        }
        for m in 1..=MAX_DEGREE {
            let s = Self::new(n, m)?;
            if s.claimed_bias() <= eps {
                return Ok(s);
            }
        }
        Err(Error::UnsupportedField(min_degree(n as f64 - 1.0, eps)))
    }

    pub fn claimed_bias(&self) -> f64 {
        (self.n as f64 - 1.0) / 2f64.powi(self.m as i32)
    }

    pub fn seed_len(&self) -> usize {
        2 * self.m as usize
    }

    /// Output for the seed whose low `m` bits are `x` and next `m` bits are `y`.
    pub fn sample_seed(&self, seed: u64) -> BitSubset {
        let f = Field::new(self.m).expect("validated degree");
        let x = seed & f.mask();
        let y = (seed >> self.m) & f.mask();
        let mut words = vec![0u64; self.n.div_ceil(64)];
        let mut pow = 1u64;
        for i in 0..self.n {
            words[i / 64] |= (((pow & y).count_ones() & 1) as u64) << (i % 64);
            pow = f.mul(pow, x);
        }
        BitSubset::from_words(self.n, words)
    }

    pub fn sample(&self, seed: &BitSubset) -> Result<BitSubset> {
        if seed.len() != self.seed_len() {
            return Err(Error::BadSeedLength {
                expected: self.seed_len(),
                got: seed.len(),
            });
        }
        Ok(self.sample_seed(seed.as_u64().expect("seed fits in 64 bits")))
    }
}

/// `min m` with `num / 2^m <= target`.
pub(crate) fn min_degree(num: f64, target: f64) -> u32 {
    if num <= target {
        return 0;
    }
    (num / target).log2().ceil() as u32
}

pub fn smallbias_sample(spec: &SmallBiasSpec, seed: &BitSubset) -> Result<BitSubset> {
    spec.sample(seed)
}

/// Exact `max_{s≠0} |E χ_s|` over all `2^{2m}` seeds, with a maximizing `s`.
pub fn exact_bias(spec: &SmallBiasSpec) -> Result<(f64, u64)> {
    if spec.n > INPUT_BUDGET_BITS || spec.seed_len() > INPUT_BUDGET_BITS {
        return Err(Error::BudgetExceeded {
            what: "small-bias enumeration",
            needed: 1u128 << spec.n.max(spec.seed_len()).min(127),
            budget: 1u128 << INPUT_BUDGET_BITS,
        });
    }
    let mut counts = vec![0f64; 1usize << spec.n];
    for seed in 0..1u64 << spec.seed_len() {
        counts[spec.sample_seed(seed).as_u64().unwrap() as usize] += 1.0;
    }
    fwht(&mut counts);
    let total = (1u64 << spec.seed_len()) as f64;
    let mut best = (0.0, 0u64);
    for (s, v) in counts.iter().enumerate().skip(1) {
        if v.abs() > best.0 {
            best = (v.abs(), s as u64);
        }
    }
    Ok((best.0 / total, best.1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::ExplicitDistribution;

    #[test]
    fn zero_y_gives_zero() {
        let s = SmallBiasSpec::new(9, 4).unwrap();
        for x in 0..16 {
            assert_eq!(s.sample_seed(x).count_ones(), 0);
        }
    }

    #[test]
    fn zero_x_reads_only_low_bit_of_y() {
        let s = SmallBiasSpec::new(5, 3).unwrap();
        assert_eq!(s.sample_seed(0b011 << 3).to_string(), "10000");
        assert_eq!(s.sample_seed(0b010 << 3).to_string(), "00000");
    }

    #[test]
    fn n4_m3_bias_matches_distribution_oracle() {
        let s = SmallBiasSpec::new(4, 3).unwrap();
        let d = ExplicitDistribution::from_samples(4, (0..64).map(|seed| s.sample_seed(seed).as_u64().unwrap())).unwrap();
        let (b, _) = exact_bias(&s).unwrap();
        assert_eq!(b, d.bias().0);
        assert!(b <= 3.0 / 8.0);
    }

    #[test]
    fn bad_seed_length() {
        let s = SmallBiasSpec::new(4, 3).unwrap();
        assert!(matches!(s.sample(&BitSubset::zeros(5)), Err(Error::BadSeedLength { expected: 6, got: 5 })));
    }

    #[test]
    fn for_bias_picks_smallest_field() {
        let s = SmallBiasSpec::for_bias(9, 0.1).unwrap();
        assert_eq!(s.m, 7);
        assert!(matches!(SmallBiasSpec::for_bias(9, 1e-12), Err(Error::UnsupportedField(43))));
    }

    #[test]
    fn long_outputs_span_words() {
        let s = SmallBiasSpec::new(150, 16).unwrap();
        let out = s.sample_seed(0x1234_5678);
        assert_eq!(out.len(), 150);
        let f = Field::new(16).unwrap();
        let pow = f.pow(0x5678, 149);
        assert_eq!(out.get(149), (pow & 0x1234).count_ones() % 2 == 1);
    }
}
