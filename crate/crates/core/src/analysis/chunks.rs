//! Chunks (one non-regular layer each) and interwoven restriction groups.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::bits::BitSubset;
use crate::bp::BranchingProgram;
use crate::error::{Error, Result};

/// Where chunk boundaries sit relative to the non-regular layers.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChunkRule {
    /// Each chunk ends with its non-regular layer; a regular tail joins the last chunk.
    #[default]
    EndAtNonRegular,
    /// Each chunk starts with its non-regular layer; a regular head joins the first chunk.
    StartAtNonRegular,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChunkDecomposition {
    pub rule: ChunkRule,
    /// Layer index where each chunk starts, followed by `n`.
    pub boundaries: Vec<usize>,
    /// Layer index of the non-regular layer of each chunk.
    pub nonregular: Vec<usize>,
    /// No non-regular layer at all: the whole program is one chunk.
    pub degenerate: bool,
}

impl ChunkDecomposition {
    pub fn len(&self) -> usize {
        self.boundaries.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Layer indices of chunk `i`.
    pub fn chunk(&self, i: usize) -> Range<usize> {
        self.boundaries[i]..self.boundaries[i + 1]
    }

    /// Chunk containing layer `layer`.
    pub fn chunk_of(&self, layer: usize) -> usize {
        self.boundaries.partition_point(|&b| b <= layer) - 1
    }
}

pub fn nonregular_layers(b: &BranchingProgram) -> Vec<usize> {
    (0..b.len()).filter(|&i| !b.layer(i).is_regular()).collect()
}

pub fn chunk_decompose(b: &BranchingProgram, rule: ChunkRule) -> ChunkDecomposition {
    let n = b.len();
    let nonregular = nonregular_layers(b);
    if nonregular.is_empty() {
        return ChunkDecomposition {
            rule,
            boundaries: vec![0, n],
            nonregular,
            degenerate: true,
        };
    }
    let mut boundaries = vec![0];
    match rule {
        ChunkRule::EndAtNonRegular => boundaries.extend(nonregular[..nonregular.len() - 1].iter().map(|&i| i + 1)),
        ChunkRule::StartAtNonRegular => boundaries.extend(nonregular[1..].iter().copied()),
    }
    boundaries.push(n);
    ChunkDecomposition {
        rule,
        boundaries,
        nonregular,
        degenerate: false,
    }
}

/// Groups `g_{{j}}` for `j < m`: chunk `i` (counted from 1) belongs to group `i mod m`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InterwovenGroups {
    pub m: usize,
    pub chunks: ChunkDecomposition,
    /// Input positions of each single group.
    pub singles: Vec<BitSubset>,
}

impl InterwovenGroups {
    pub fn group_of_chunk(&self, chunk: usize) -> usize {
        (chunk + 1) % self.m
    }

    /// `g_t`: union of the groups in `t`.
    pub fn g(&self, t: &[usize]) -> BitSubset {
        let n = self.singles[0].len();
        let mut out = BitSubset::zeros(n);
        for &j in t {
            for pos in self.singles[j].ones_positions() {
                out.set(pos, true);
            }
        }
        out
    }

    /// Group of every input position.
    pub fn position_groups(&self) -> Vec<usize> {
        let n = self.singles[0].len();
        let mut out = vec![0; n];
        for (j, g) in self.singles.iter().enumerate() {
            for pos in g.ones_positions() {
                out[pos] = j;
            }
        }
        out
    }

    /// Whether every `k`-subset of positions lies inside some `g_t` with `|t| = k`.
    pub fn covers_level(&self, k: usize) -> bool {
        if k > self.m {
            return false;
        }
        let groups = self.position_groups();
        let n = groups.len();
        // a k-set spans at most k groups, so it extends to some t with |t| = k
        let mut ok = true;
        for_each_subset(n, k, &mut |s| {
            let mut seen: Vec<usize> = s.iter().map(|&p| groups[p]).collect();
            seen.sort_unstable();
            seen.dedup();
            ok &= seen.len() <= k;
        });
        ok
    }
}

pub fn interwoven_groups(b: &BranchingProgram, m: usize, rule: ChunkRule) -> Result<InterwovenGroups> {
    if m == 0 {
        return Err(Error::InvalidParams("need at least one group".into()));
    }
    let chunks = chunk_decompose(b, rule);
    let mut singles = vec![BitSubset::zeros(b.len()); m];
    for c in 0..chunks.len() {
        let g = (c + 1) % m;
        for layer in chunks.chunk(c) {
            singles[g].set(b.order()[layer], true);
        }
    }
    Ok(InterwovenGroups { m, chunks, singles })
}

/// Calls `visit` on every `k`-subset of `0..n` in lexicographic order.
pub fn for_each_subset(n: usize, k: usize, visit: &mut dyn FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        visit(&cur);
        let Some(i) = (0..k).rev().find(|&i| cur[i] < n - k + i) else {
            return;
        };
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}
