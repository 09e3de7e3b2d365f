//! The recursive generator.

use serde::Serialize;

use crate::bits::{select, BitSubset};
use crate::error::Result;
use crate::samplers::SeedSource;

use super::params::{LevelPlan, PrgParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Base,
    ZeroOut,
    Recurse,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelRecord {
    pub n: usize,
    /// `|T|`, absent at the base level.
    pub t_size: Option<usize>,
    pub branch: Branch,
    /// Bits this level consumed, excluding deeper levels. On a zero-out this
    /// includes the skipped remainder of the level's budget.
    pub bits: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrgTrace {
    pub levels: Vec<LevelRecord>,
    pub consumed: usize,
}

impl PrgTrace {
    pub fn zeroed_out(&self) -> bool {
        self.levels.iter().any(|l| l.branch == Branch::ZeroOut)
    }
}

/// A generator with its recursion plan computed once.
#[derive(Clone, Debug)]
pub struct Prg {
    params: PrgParams,
    plan: Vec<LevelPlan>,
    /// `suffix[i]`: bits read by levels `i..`.
    suffix: Vec<usize>,
}

impl Prg {
    pub fn new(params: PrgParams) -> Result<Self> {
        let plan = params.plan()?;
        let mut suffix = vec![0; plan.len() + 1];
        for i in (0..plan.len()).rev() {
            suffix[i] = suffix[i + 1] + plan[i].own_bits();
        }
        Ok(Prg { params, plan, suffix })
    }

    pub fn params(&self) -> &PrgParams {
        &self.params
    }

    pub fn plan(&self) -> &[LevelPlan] {
        &self.plan
    }

    pub fn seed_length(&self) -> usize {
        self.suffix[0]
    }

    /// Reads `T_0, T_1, …`, then the base bits, then `…, X_1, X_0`.
    pub fn generate(&self, seed: &mut SeedSource) -> Result<(BitSubset, PrgTrace)> {
        let before = seed.consumed();
        let mut trace = Vec::with_capacity(self.plan.len());
        let mut ts: Vec<BitSubset> = Vec::new();
        let mut out = BitSubset::zeros(0);
        for (i, level) in self.plan.iter().enumerate() {
            match level {
                LevelPlan::Base { n } => {
                    out = seed.take_bits(*n)?;
                    trace.push(LevelRecord {
                        n: *n,
                        t_size: None,
                        branch: Branch::Base,
                        bits: *n,
                    });
                    break;
                }
                LevelPlan::Step { n, t, .. } => {
                    let tv = t.sample(&seed.take_bits(t.seed_len())?)?;
                    let size = tv.count_ones();
                    // |T| < pn/2 with p = 2^{-d}
                    if size << (self.params.d + 1) < *n {
                        seed.skip(self.suffix[i] - t.seed_len())?;
                        out = BitSubset::zeros(*n);
                        trace.push(LevelRecord {
                            n: *n,
                            t_size: Some(size),
                            branch: Branch::ZeroOut,
                            bits: self.suffix[i],
                        });
                        break;
                    }
                    trace.push(LevelRecord {
                        n: *n,
                        t_size: Some(size),
                        branch: Branch::Recurse,
                        bits: t.seed_len(),
                    });
                    ts.push(tv);
                }
            }
        }
        for (i, t) in ts.iter().enumerate().rev() {
            let LevelPlan::Step { x, .. } = &self.plan[i] else { unreachable!() };
            let xv = x.sample(&seed.take_bits(x.seed_len())?)?;
            trace[i].bits += x.seed_len();
            out = select(t, &xv, &pad(t, &out))?;
        }
        let consumed = seed.consumed() - before;
        Ok((out, PrgTrace { levels: trace, consumed }))
    }
}

/// Spreads `u` over the positions outside `t`, in order; positions in `t` and
/// any leftover bits of `u` are dropped.
fn pad(t: &BitSubset, u: &BitSubset) -> BitSubset {
    let mut out = BitSubset::zeros(t.len());
    let mut j = 0;
    for i in 0..t.len() {
        if !t.get(i) {
            out.set(i, u.get(j));
            j += 1;
        }
    }
    out
}

pub fn generate(params: &PrgParams, seed: &mut SeedSource) -> Result<(BitSubset, PrgTrace)> {
    Prg::new(params.clone())?.generate(seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prg::params::{derive_params, derive_scaled, seed_length, Overrides};

    fn toy(n: usize, threshold: usize, m_t: u32, m_x: u32) -> PrgParams {
        let o = Overrides {
            threshold: Some(threshold),
            m_t: Some(m_t),
            m_x: Some(m_x),
            ..Default::default()
        };
        derive_scaled(1.0, 2.0, 3, n, 0.25, o).unwrap()
    }

    #[test]
    fn base_case_copies_seed() {
        let p = derive_params(1.0, 2.0, 3, 100, 0.1).unwrap();
        let mut seed = SeedSource::stream(3);
        let expect = SeedSource::stream(3).take_bits(100).unwrap();
        let (out, trace) = generate(&p, &mut seed).unwrap();
        assert_eq!(out, expect);
        assert_eq!(trace.levels.len(), 1);
        assert_eq!(trace.consumed, 100);
    }

    #[test]
    fn empty_t_zeroes_output() {
        let p = toy(8, 7, 3, 3);
        // x = 0 and the low bit of y clear make the inner string all zero
        let mut seed = SeedSource::from_u64(19, u64::MAX << 6 & ((1 << 19) - 1) | (0b110 << 3));
        let (out, trace) = generate(&p, &mut seed).unwrap();
        assert_eq!(out, BitSubset::zeros(8));
        assert!(trace.zeroed_out());
        assert_eq!(trace.consumed, 19);
        assert_eq!(seed.remaining(), Some(0));
    }

    #[test]
    fn consumed_matches_seed_length() {
        for (n, th) in [(8, 7), (12, 7), (40, 10), (64, 20)] {
            let p = toy(n, th, 5, 4);
            let len = seed_length(&p).unwrap();
            for root in 0..50 {
                let mut seed = SeedSource::stream(root);
                let (out, trace) = generate(&p, &mut seed).unwrap();
                assert_eq!(out.len(), n);
                assert_eq!(trace.consumed, len);
                assert_eq!(trace.levels.iter().map(|l| l.bits).sum::<usize>(), len);
                for w in trace.levels.windows(2) {
                    assert_eq!(w[1].n, p.next_len(w[0].n));
                }
            }
        }
    }

    #[test]
    fn outside_t_comes_from_recursion() {
        let p = toy(8, 7, 3, 3);
        let prg = Prg::new(p).unwrap();
        for s in 0..1u64 << 19 {
            let mut seed = SeedSource::from_u64(19, s);
            let (out, trace) = prg.generate(&mut seed).unwrap();
            if trace.zeroed_out() {
                continue;
            }
            let LevelPlan::Step { t, x, .. } = &prg.plan()[0] else { panic!() };
            let tv = t.sample(&BitSubset::from_u64(6, s & 63)).unwrap();
            let u = (s >> 6) & 127;
            let xv = x.sample(&BitSubset::from_u64(6, s >> 13)).unwrap();
            let mut j = 0;
            for i in 0..8 {
                if tv.get(i) {
                    assert_eq!(out.get(i), xv.get(i));
                } else {
                    assert_eq!(out.get(i), (u >> j) & 1 == 1);
                    j += 1;
                }
            }
            if s > 5000 {
                break;
            }
        }
    }
}
