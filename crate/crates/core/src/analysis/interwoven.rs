//! `L^k(B) ≤ C(m,k) · max_t E_U[L^k(B|_{ḡ_t←U})]`, checked exactly.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bits::BitSubset;
use crate::bp::{restrict_fixed, BranchingProgram};
use crate::error::Result;
use crate::fourier::{level_mass, LayeredFunction};

use super::chunks::{for_each_subset, interwoven_groups, ChunkRule};

/// Restrictions with at most this many fixed bits are enumerated.
pub const EXACT_FIXED_BITS: usize = 16;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GroupTerm {
    pub t: Vec<usize>,
    pub free_bits: usize,
    pub expected_mass: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InterwovenReport {
    pub m: usize,
    pub k: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub terms: Vec<GroupTerm>,
    pub exact: bool,
    pub pass: bool,
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Exact when every `ḡ_t` has at most [`EXACT_FIXED_BITS`] positions;
/// otherwise each expectation averages `trials` restrictions drawn from `root`.
pub fn interwoven_mass_check(b: &BranchingProgram, m: usize, k: usize, rule: ChunkRule, trials: u64, root: u64) -> Result<InterwovenReport> {
    let groups = interwoven_groups(b, m, rule)?;
    let lhs = level_mass(&LayeredFunction::from_bp(b), k)?;
    let n = b.len();
    let mut ts = Vec::new();
    for_each_subset(m, k, &mut |t| ts.push(t.to_vec()));
    let mut exact = true;
    let mut terms = Vec::with_capacity(ts.len());
    for (ti, t) in ts.iter().enumerate() {
        let g = groups.g(t);
        let fixed = n - g.count_ones();
        let mass_at = |x: u64, rng: Option<&mut ChaCha8Rng>| -> Result<f64> {
            let bits = match rng {
                None => spread(&g, x),
                Some(r) => {
                    let mut v = BitSubset::zeros(n);
                    for i in 0..n {
                        if !g.get(i) {
                            v.set(i, r.gen_bool(0.5));
                        }
                    }
                    v
                }
            };
            let r = restrict_fixed(b, &g, &bits, false)?;
            level_mass(&LayeredFunction::from_bp(&r), k)
        };
        let masses: Vec<f64> = if fixed <= EXACT_FIXED_BITS {
            (0..1u64 << fixed).into_par_iter().map(|x| mass_at(x, None)).collect::<Result<_>>()?
        } else {
            exact = false;
            (0..trials)
                .into_par_iter()
                .map(|i| {
                    let mut rng = ChaCha8Rng::seed_from_u64(root);
                    rng.set_stream((ti as u64) << 32 | i);
                    mass_at(0, Some(&mut rng))
                })
                .collect::<Result<_>>()?
        };
        let expected_mass = masses.iter().sum::<f64>() / masses.len().max(1) as f64;
        terms.push(GroupTerm {
            t: t.clone(),
            free_bits: n - fixed,
            expected_mass,
        });
    }
    let max = terms.iter().map(|t| t.expected_mass).fold(0.0, f64::max);
    let rhs = binomial(m, k) * max;
    Ok(InterwovenReport {
        m,
        k,
        lhs,
        rhs,
        terms,
        exact,
        pass: lhs <= rhs * (1.0 + 1e-9),
    })
}

/// Places the bits of `x` at the positions outside `g`, in order.
fn spread(g: &BitSubset, x: u64) -> BitSubset {
    let mut out = BitSubset::zeros(g.len());
    let mut j = 0;
    for i in 0..g.len() {
        if !g.get(i) {
            out.set(i, (x >> j) & 1 == 1);
            j += 1;
        }
    }
    out
}
