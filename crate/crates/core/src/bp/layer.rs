use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Mat;

/// One layer of edges: a pair of transition maps `[width_in] -> [width_out]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Layer {
    width_out: usize,
    next0: Vec<usize>,
    next1: Vec<usize>,
}

/// Structural flags of a layer, each recomputable from the transition tables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerClass {
    pub trivial: bool,
    pub regular: bool,
    pub permutation: bool,
    pub has_collision: bool,
}

impl Layer {
    pub fn new(width_out: usize, next0: Vec<usize>, next1: Vec<usize>) -> Result<Self> {
        let layer = Layer {
            width_out,
            next0,
            next1,
        };
        layer.validate(0)?;
        Ok(layer)
    }

    pub(crate) fn validate(&self, index: usize) -> Result<()> {
        let bad = |reason: String| Err(Error::InvalidLayer { layer: index, reason });
        if self.next0.is_empty() {
            return bad("width_in must be positive".into());
        }
        if self.width_out == 0 {
            return bad("width_out must be positive".into());
        }
        if self.next0.len() != self.next1.len() {
            return bad(format!(
                "next0 has {} entries but next1 has {}",
                self.next0.len(),
                self.next1.len()
            ));
        }
        for (label, map) in [(0, &self.next0), (1, &self.next1)] {
            if let Some((u, &v)) = map.iter().enumerate().find(|(_, &v)| v >= self.width_out) {
                return bad(format!("next{label}[{u}] = {v} is outside width_out {}", self.width_out));
            }
        }
        Ok(())
    }

    pub fn identity(width: usize) -> Self {
        let map: Vec<usize> = (0..width).collect();
        Layer {
            width_out: width,
            next0: map.clone(),
            next1: map,
        }
    }

    /// Both labels go through the same map.
    pub fn constant_map(width_out: usize, map: Vec<usize>) -> Result<Self> {
        Self::new(width_out, map.clone(), map)
    }

    #[inline]
    pub fn width_in(&self) -> usize {
        self.next0.len()
    }

    #[inline]
    pub fn width_out(&self) -> usize {
        self.width_out
    }

    #[inline]
    pub fn next(&self, bit: bool) -> &[usize] {
        if bit {
            &self.next1
        } else {
            &self.next0
        }
    }

    #[inline]
    pub fn step(&self, state: usize, bit: bool) -> usize {
        if bit {
            self.next1[state]
        } else {
            self.next0[state]
        }
    }

    pub fn next0(&self) -> &[usize] {
        &self.next0
    }

    pub fn next1(&self) -> &[usize] {
        &self.next1
    }

    /// The 0/1 transition matrix `B_i[b]`.
    pub fn matrix(&self, bit: bool) -> Mat {
        Mat::from_map(self.next(bit), self.width_out)
    }

    /// Follows this layer by the fixed map `after: [width_out] -> [w]`.
    pub(crate) fn then_map(&self, after: &[usize], w: usize) -> Layer {
        Layer {
            width_out: w,
            next0: self.next0.iter().map(|&v| after[v]).collect(),
            next1: self.next1.iter().map(|&v| after[v]).collect(),
        }
    }

    /// Precedes this layer by the fixed map `before: [w] -> [width_in]`.
    pub(crate) fn after_map(&self, before: &[usize]) -> Layer {
        Layer {
            width_out: self.width_out,
            next0: before.iter().map(|&u| self.next0[u]).collect(),
            next1: before.iter().map(|&u| self.next1[u]).collect(),
        }
    }

    /// Swaps the two outgoing labels of every state `u` with `swap[u]` set.
    pub fn with_labels_swapped(&self, swap: &[bool]) -> Layer {
        let mut out = self.clone();
        for (u, &s) in swap.iter().enumerate() {
            if s {
                std::mem::swap(&mut out.next0[u], &mut out.next1[u]);
            }
        }
        out
    }

    /// Total in-degree of every right vertex, counting both labels.
    pub fn in_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.width_out];
        for &v in self.next0.iter().chain(&self.next1) {
            deg[v] += 1;
        }
        deg
    }

    pub fn is_trivial(&self) -> bool {
        self.next0 == self.next1
    }

    /// Doubly stochastic expectation: square, and every right vertex has in-degree 2.
    pub fn is_regular(&self) -> bool {
        self.width_in() == self.width_out && self.in_degrees().iter().all(|&d| d == 2)
    }

    pub fn is_permutation(&self) -> bool {
        self.width_in() == self.width_out && is_injective(&self.next0, self.width_out) && is_injective(&self.next1, self.width_out)
    }

    /// Two same-labelled edges from distinct origins share an endpoint.
    pub fn has_collision(&self) -> bool {
        !is_injective(&self.next0, self.width_out) || !is_injective(&self.next1, self.width_out)
    }

    pub fn classify(&self) -> LayerClass {
        LayerClass {
            trivial: self.is_trivial(),
            regular: self.is_regular(),
            permutation: self.is_permutation(),
            has_collision: self.has_collision(),
        }
    }
}

fn is_injective(map: &[usize], width: usize) -> bool {
    let mut seen = vec![false; width];
    for &v in map {
        if std::mem::replace(&mut seen[v], true) {
            return false;
        }
    }
    true
}

pub fn classify_layer(layer: &Layer) -> LayerClass {
    layer.classify()
}
