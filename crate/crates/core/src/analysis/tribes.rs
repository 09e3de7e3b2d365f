//! Closed forms for the Tribes spectrum.

use crate::bits::BitSubset;
use crate::error::{Error, Result};
use crate::fourier::INPUT_BUDGET_BITS;

/// `f̂[s] = Π_i (𝕀(s_i = 0) − 2^{−m}(−1)^{|s_i|})` over the `2^m` blocks of `m` bits.
pub fn tribes_oracle(m: usize, s: &BitSubset) -> Result<f64> {
    let blocks = 1usize << m;
    if s.len() != m * blocks {
        return Err(Error::LengthMismatch {
            expected: m * blocks,
            got: s.len(),
        });
    }
    let w = 0.5f64.powi(m as i32);
    let mut prod = 1.0;
    for i in 0..blocks {
        let ones = (i * m..(i + 1) * m).filter(|&j| s.get(j)).count();
        let sign = if ones % 2 == 0 { 1.0 } else { -1.0 };
        prod *= (ones == 0) as u8 as f64 - w * sign;
    }
    Ok(prod)
}

/// Every coefficient, indexed by packed `s`.
pub fn tribes_spectrum(m: usize) -> Result<Vec<f64>> {
    let n = m << m;
    if n > INPUT_BUDGET_BITS {
        return Err(Error::BudgetExceeded {
            what: "tribes spectrum",
            needed: 1u128 << n.min(127),
            budget: 1u128 << INPUT_BUDGET_BITS,
        });
    }
    (0..1u64 << n).map(|s| tribes_oracle(m, &BitSubset::from_u64(n, s))).collect()
}

/// `L_p + |f̂[∅]| = (1 + ((1+p)^m − 2)/2^m)^{2^m}`.
pub fn tribes_damped(m: usize, p: f64) -> f64 {
    let two_m = 2f64.powi(m as i32);
    (1.0 + ((1.0 + p).powi(m as i32) - 2.0) / two_m).powf(two_m)
}

/// `(1/4)(1/ℓ)^ℓ (m/(k/ℓ + 1))^k` with `ℓ = ⌈k / log₂(2k)⌉`.
pub fn tribes_lower(m: usize, k: usize) -> f64 {
    if k == 0 {
        return 0.0;
    }
    let kf = k as f64;
    let ell = (kf / (2.0 * kf).log2()).ceil();
    0.25 * (1.0 / ell).powf(ell) * (m as f64 / (kf / ell + 1.0)).powi(k as i32)
}
