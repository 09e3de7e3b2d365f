//! Width-≤2 vertex layers created by restriction and pruning.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bits::BitSubset;
use crate::bp::{prune_unreachable, restrict_fixed, BranchingProgram};
use crate::error::{Error, Result};

use super::chunks::{interwoven_groups, ChunkRule};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BottleneckReport {
    /// Vertex-layer widths after pruning.
    pub widths: Vec<usize>,
    /// Vertex layers of width at most 2.
    pub bottlenecks: Vec<usize>,
    /// Largest number of non-regular layers with no bottleneck between them.
    pub beta: usize,
}

/// A vertex layer `j` separates layers `< j` from layers `≥ j`.
pub fn bottleneck_scan(b: &BranchingProgram) -> Result<BottleneckReport> {
    let p = prune_unreachable(b)?;
    let widths = p.widths();
    let bottlenecks: Vec<usize> = (0..widths.len()).filter(|&j| widths[j] <= 2).collect();
    let mut beta = 0;
    let mut run = 0;
    for i in 0..p.len() {
        if widths[i] <= 2 {
            run = 0;
        }
        if !p.layer(i).is_regular() {
            run += 1;
            beta = beta.max(run);
        }
    }
    Ok(BottleneckReport {
        widths,
        bottlenecks,
        beta,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BottleneckFrequency {
    pub m: usize,
    pub k: usize,
    pub ell: usize,
    pub trials: u64,
    /// Fraction of restrictions with some window of `ℓk+1` consecutive free
    /// chunks containing no interior bottleneck.
    pub failure_rate: f64,
    /// `n · 2^{−ℓ(m−k)}`.
    pub bound: f64,
    pub sigma: f64,
    pub pass: bool,
}

/// Monte-Carlo over `t` (uniform `k`-subset of groups) and the fixed bits.
pub fn bottleneck_frequency(b: &BranchingProgram, m: usize, k: usize, ell: usize, trials: u64, root: u64) -> Result<BottleneckFrequency> {
    if k == 0 || k > m || trials == 0 {
        return Err(Error::InvalidParams(format!("need 1 ≤ k ≤ m and trials > 0 (m={m}, k={k})")));
    }
    let groups = interwoven_groups(b, m, ChunkRule::EndAtNonRegular)?;
    let n = b.len();
    let window = ell * k + 1;
    let fails: Vec<bool> = (0..trials)
        .into_par_iter()
        .map(|trial| -> Result<bool> {
            let mut rng = ChaCha8Rng::seed_from_u64(root);
            rng.set_stream(trial);
            let mut t: Vec<usize> = rand::seq::index::sample(&mut rng, m, k).into_vec();
            t.sort_unstable();
            let g = groups.g(&t);
            let mut x = BitSubset::zeros(n);
            for i in 0..n {
                x.set(i, rng.gen_bool(0.5));
            }
            let r = prune_unreachable(&restrict_fixed(b, &g, &x, false)?)?;
            let widths = r.widths();
            // free layers in program order and the chunk each came from
            let free_chunks: Vec<usize> = (0..n).filter(|&l| g.get(b.order()[l])).map(|l| groups.chunks.chunk_of(l)).collect();
            let mut starts = Vec::new();
            for (j, &c) in free_chunks.iter().enumerate() {
                if j == 0 || free_chunks[j - 1] != c {
                    starts.push(j);
                }
            }
            starts.push(free_chunks.len());
            let chunks = starts.len() - 1;
            for a in 0..chunks.saturating_sub(window - 1) {
                let lo = starts[a];
                let hi = starts[a + window];
                if !(lo + 1..hi).any(|v| widths[v] <= 2) {
                    return Ok(true);
                }
            }
            Ok(false)
        })
        .collect::<Result<_>>()?;
    let failure_rate = fails.iter().filter(|&&f| f).count() as f64 / trials as f64;
    let bound = n as f64 * 0.5f64.powi((ell * (m - k)) as i32);
    let sigma = (failure_rate * (1.0 - failure_rate) / trials as f64).sqrt();
    Ok(BottleneckFrequency {
        m,
        k,
        ell,
        trials,
        failure_rate,
        bound,
        sigma,
        pass: failure_rate <= bound + 3.0 * sigma,
    })
}
