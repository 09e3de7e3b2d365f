//! Explicit distributions on `{0,1}^n`, their transforms and bias.

use crate::bp::BranchingProgram;
use crate::error::{Error, Result};
use crate::matrix::Mat;

use super::layered::LayeredFunction;
use super::wht::fwht;
use super::INPUT_BUDGET_BITS;

/// Probability weights over all `2^n` strings, indexed by packed value.
#[derive(Clone, Debug, PartialEq)]
pub struct ExplicitDistribution {
    n: usize,
    weights: Vec<f64>,
}

fn check_n(n: usize) -> Result<()> {
    if n > INPUT_BUDGET_BITS {
        return Err(Error::BudgetExceeded {
            what: "distribution support",
            needed: 1u128 << n.min(127),
            budget: 1u128 << INPUT_BUDGET_BITS,
        });
    }
    Ok(())
}

impl ExplicitDistribution {
    pub fn from_weights(n: usize, weights: Vec<f64>) -> Result<Self> {
        check_n(n)?;
        if weights.len() != 1usize << n {
            return Err(Error::LengthMismatch {
                expected: 1usize << n,
                got: weights.len(),
            });
        }
        if weights.iter().any(|&w| !(w >= 0.0) || !w.is_finite()) {
            return Err(Error::InvalidParams("weights must be finite and non-negative".into()));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParams(format!("weights sum to {sum}, not 1")));
        }
        Ok(ExplicitDistribution { n, weights })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        check_n(n)?;
        let w = (0.5f64).powi(n as i32);
        Ok(ExplicitDistribution {
            n,
            weights: vec![w; 1usize << n],
        })
    }

    pub fn point(n: usize, x: u64) -> Result<Self> {
        check_n(n)?;
        let mut weights = vec![0.0; 1usize << n];
        weights[x as usize] = 1.0;
        Ok(ExplicitDistribution { n, weights })
    }

    /// Uniform over a multiset of samples, e.g. a generator's outputs over all seeds.
    pub fn from_samples<I: IntoIterator<Item = u64>>(n: usize, samples: I) -> Result<Self> {
        check_n(n)?;
        let mut counts = vec![0u64; 1usize << n];
        let mut total = 0u64;
        for x in samples {
            counts[x as usize] += 1;
            total += 1;
        }
        if total == 0 {
            return Err(Error::InvalidParams("no samples".into()));
        }
        let weights = counts.iter().map(|&c| c as f64 / total as f64).collect();
        Ok(ExplicitDistribution { n, weights })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `X̂(s) = E_X[χ_s(X)]` for every `s`.
    pub fn fourier(&self) -> Vec<f64> {
        let mut v = self.weights.clone();
        fwht(&mut v);
        v
    }

    /// `max_{s≠0} |X̂(s)|` and a maximizing `s` (the smallest mask on ties).
    pub fn bias(&self) -> (f64, u64) {
        let spec = self.fourier();
        let mut best = (0.0, 0u64);
        for (s, v) in spec.iter().enumerate().skip(1) {
            if v.abs() > best.0 {
                best = (v.abs(), s as u64);
            }
        }
        best
    }

    /// Distribution of `X ⊕ Y` for independent `X`, `Y`.
    pub fn xor_convolve(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                got: other.n,
            });
        }
        let mut weights = vec![0.0; self.weights.len()];
        for (x, &wx) in self.weights.iter().enumerate() {
            if wx == 0.0 {
                continue;
            }
            for (y, &wy) in other.weights.iter().enumerate() {
                weights[x ^ y] += wx * wy;
            }
        }
        Ok(ExplicitDistribution { n: self.n, weights })
    }

    /// `E_X[B[X]]` by enumerating the support.
    pub fn expect_matrix(&self, b: &BranchingProgram) -> Result<Mat> {
        if b.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: b.len(),
                got: self.n,
            });
        }
        let (rows, cols) = (b.input_width(), b.output_width());
        let mut m = Mat::zeros(rows, cols);
        for (x, &w) in self.weights.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            for u in 0..rows {
                m[(u, b.run_packed(u, x as u64))] += w;
            }
        }
        Ok(m)
    }
}

pub fn bias(x: &ExplicitDistribution) -> (f64, u64) {
    x.bias()
}

/// `‖E_X[B[X]] − E_U[B[U]]‖₂`.
pub fn residual(b: &BranchingProgram, x: &ExplicitDistribution) -> Result<f64> {
    let ex = x.expect_matrix(b)?;
    let eu = LayeredFunction::from_bp(b).expectation();
    Ok((&ex - &eu).spectral_norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bp::families;

    #[test]
    fn uniform_and_point_bias() {
        assert_eq!(ExplicitDistribution::uniform(5).unwrap().bias().0, 0.0);
        assert_eq!(ExplicitDistribution::point(5, 0).unwrap().bias().0, 1.0);
    }

    #[test]
    fn rejects_bad_weights() {
        assert!(ExplicitDistribution::from_weights(1, vec![0.7, 0.7]).is_err());
        assert!(ExplicitDistribution::from_weights(1, vec![1.0]).is_err());
    }

    #[test]
    fn residual_of_uniform_is_zero() {
        let b = families::mod3(6).unwrap();
        assert!(residual(&b, &ExplicitDistribution::uniform(6).unwrap()).unwrap() < 1e-15);
    }

    #[test]
    fn parity_tilt_residual_equals_bias() {
        for n in 1..=6 {
            let beta = 0.3;
            let weights: Vec<f64> = (0..1u64 << n)
                .map(|x| {
                    let sign = if x.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                    (1.0 + beta * sign) / (1u64 << n) as f64
                })
                .collect();
            let x = ExplicitDistribution::from_weights(n, weights).unwrap();
            let (b, s) = x.bias();
            assert!((b - beta).abs() < 1e-12);
            assert_eq!(s, (1u64 << n) - 1);
            let r = residual(&families::xor(n).unwrap(), &x).unwrap();
            assert!((r - beta).abs() < 1e-12, "n={n}: {r}");
        }
    }
}
