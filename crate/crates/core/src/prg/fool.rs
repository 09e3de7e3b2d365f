//! Measuring how well the generator fools a program.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bp::BranchingProgram;
use crate::error::{Error, Result};
use crate::fourier::{LayeredFunction, INPUT_BUDGET_BITS};
use crate::matrix::Mat;
use crate::samplers::SeedSource;

use super::generate::Prg;
use super::params::{Mode, PrgParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FoolMode {
    Exact,
    Sampled,
}

/// Two-sided 99% normal quantile.
pub const Z99: f64 = 2.576;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FoolReport {
    /// `‖E[B[G(U_s)]] − E[B[U]]‖₂`
    pub gap: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub eps: f64,
    pub mode: FoolMode,
    pub params_mode: Mode,
    pub seed_len: usize,
    pub seeds: u64,
    pub zero_out_rate: f64,
    pub note: String,
}

/// Exact mode enumerates every seed; sampled mode draws `trials` seeds from
/// `root` and reports a 99% interval that also covers the matrix-norm error.
pub fn fool_test(b: &BranchingProgram, params: &PrgParams, mode: FoolMode, trials: u64, root: u64) -> Result<FoolReport> {
    if b.len() != params.n {
        return Err(Error::LengthMismatch {
            expected: params.n,
            got: b.len(),
        });
    }
    let prg = Prg::new(params.clone())?;
    let s = prg.seed_length();
    let (rows, cols) = (b.input_width(), b.output_width());
    let truth = LayeredFunction::from_bp(b).expectation();

    // Each seed contributes the 0/1 matrix B[G(seed)] as `rows` end states.
    let one = |seed: &mut SeedSource| -> Result<(Vec<usize>, bool)> {
        let (x, trace) = prg.generate(seed)?;
        Ok((b.eval_map(&x)?, trace.zeroed_out()))
    };
    let fold = |mut acc: (Vec<u64>, u64), (ends, zero): (Vec<usize>, bool)| {
        for (u, v) in ends.into_iter().enumerate() {
            acc.0[u * cols + v] += 1;
        }
        acc.1 += zero as u64;
        acc
    };
    let merge = |mut a: (Vec<u64>, u64), b: (Vec<u64>, u64)| {
        for (x, y) in a.0.iter_mut().zip(b.0) {
            *x += y;
        }
        (a.0, a.1 + b.1)
    };
    let zero = || (vec![0u64; rows * cols], 0u64);

    let (counts, zeros, total) = match mode {
        FoolMode::Exact => {
            if s > INPUT_BUDGET_BITS || params.n > INPUT_BUDGET_BITS {
                return Err(Error::BudgetExceeded {
                    what: "exact fooling test",
                    needed: 1u128 << s.max(params.n).min(127),
                    budget: 1u128 << INPUT_BUDGET_BITS,
                });
            }
            let (c, z) = (0..1u64 << s)
                .into_par_iter()
                .map(|seed| one(&mut SeedSource::from_u64(s, seed)))
                .try_fold(zero, |acc, r| r.map(|r| fold(acc, r)))
                .try_reduce(zero, |a, b| Ok(merge(a, b)))?;
            (c, z, 1u64 << s)
        }
        FoolMode::Sampled => {
            if trials == 0 {
                return Err(Error::InvalidParams("sampled mode needs trials > 0".into()));
            }
            let (c, z) = (0..trials)
                .into_par_iter()
                .map(|t| {
                    let mut rng = ChaCha8Rng::seed_from_u64(root);
                    rng.set_stream(t);
                    one(&mut SeedSource::from_rng(rng))
                })
                .try_fold(zero, |acc, r| r.map(|r| fold(acc, r)))
                .try_reduce(zero, |a, b| Ok(merge(a, b)))?;
            (c, z, trials)
        }
    };

    let mut est = Mat::zeros(rows, cols);
    for u in 0..rows {
        for v in 0..cols {
            est[(u, v)] = counts[u * cols + v] as f64 / total as f64;
        }
    }
    let gap = (&est - &truth).spectral_norm();
    let (ci_low, ci_high) = match mode {
        FoolMode::Exact => (gap, gap),
        FoolMode::Sampled => {
            // |gap − true gap| ≤ ‖est − mean‖₂ ≤ ‖est − mean‖_F
            let var: f64 = est.data().iter().map(|&q| q * (1.0 - q)).sum::<f64>() / total as f64;
            let h = Z99 * var.sqrt();
            ((gap - h).max(0.0), gap + h)
        }
    };
    let note = match params.mode {
        Mode::Scaled => "scaled parameters: fooling is measured, not guaranteed".to_string(),
        Mode::Rigorous => "rigorous parameters".to_string(),
    };
    Ok(FoolReport {
        gap,
        ci_low,
        ci_high,
        eps: params.eps,
        mode,
        params_mode: params.mode,
        seed_len: s,
        seeds: total,
        zero_out_rate: zeros as f64 / total as f64,
        note,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bp::families;
    use crate::bp::Layer;
    use crate::prg::params::{derive_params, derive_scaled, Overrides};

    fn toy(n: usize) -> PrgParams {
        let o = Overrides {
            threshold: Some(7),
            m_t: Some(3),
            m_x: Some(3),
            ..Default::default()
        };
        derive_scaled(1.0, 2.0, 3, n, 0.25, o).unwrap()
    }

    #[test]
    fn constant_program_has_zero_gap() {
        let layers = vec![Layer::new(2, vec![0, 0], vec![0, 0]).unwrap(); 8];
        let b = BranchingProgram::ordered(layers, 0, vec![0]).unwrap();
        let p = toy(8);
        for mode in [FoolMode::Exact, FoolMode::Sampled] {
            let r = fool_test(&b, &p, mode, 500, 1).unwrap();
            assert!(r.gap < 1e-15, "{mode:?}");
        }
    }

    #[test]
    fn base_case_is_exact() {
        let p = derive_params(1.0, 2.0, 3, 8, 0.1).unwrap();
        let r = fool_test(&families::mod3(8).unwrap(), &p, FoolMode::Exact, 0, 0).unwrap();
        assert!(r.gap < 1e-15);
        assert_eq!(r.seed_len, 8);
    }

    #[test]
    fn sampled_interval_covers_exact() {
        let b = families::tribes(2).unwrap();
        let p = toy(8);
        let exact = fool_test(&b, &p, FoolMode::Exact, 0, 0).unwrap();
        let sampled = fool_test(&b, &p, FoolMode::Sampled, 20_000, 4).unwrap();
        assert!(sampled.ci_low <= exact.gap && exact.gap <= sampled.ci_high, "{exact:?} {sampled:?}");
    }

    #[test]
    fn length_mismatch() {
        assert!(fool_test(&families::xor(5).unwrap(), &toy(8), FoolMode::Exact, 0, 0).is_err());
    }
}
