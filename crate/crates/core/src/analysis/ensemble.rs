//! Generators for width-3 programs whose first and last vertex layers have width 2.
//!
//! Instance `i` of a batch draws from `ChaCha8Rng::seed_from_u64(root)` on
//! stream `i`, so batches are reproducible under any thread count.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bp::families::{random_nonregular_layer, random_regular_layer};
use crate::bp::{BranchingProgram, Layer};
use crate::error::{Error, Result};
use crate::fourier::lambda;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EnsembleKind {
    /// Random regular layers around `k` random non-regular ones.
    Mixing,
    /// Tracks `{0}` and `{1, 2}` inside the width-3 stretch; each middle
    /// non-regular layer leaks vertex 2 into track 0 with probability `leak`.
    TwoTrack { leak: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub kind: EnsembleKind,
    pub n: usize,
    /// Non-regular layers.
    pub k: usize,
}

pub fn instance_rng(root: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(root);
    rng.set_stream(index);
    rng
}

fn lay(w_out: usize, next0: &[usize], next1: &[usize]) -> Layer {
    Layer::new(w_out, next0.to_vec(), next1.to_vec()).expect("static layer")
}

/// Positions of the non-regular layers: sorted, distinct, in `0..n`.
fn positions<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Vec<usize> {
    let mut all: Vec<usize> = (0..n).collect();
    all.shuffle(rng);
    let mut p = all[..k].to_vec();
    p.sort_unstable();
    p
}

fn track_preserving_regular<R: Rng + ?Sized>(rng: &mut R) -> Layer {
    const MAPS: [[usize; 3]; 2] = [[0, 1, 2], [0, 2, 1]];
    lay(3, &MAPS[rng.gen_range(0..2)], &MAPS[rng.gen_range(0..2)])
}

fn track_preserving_nonregular<R: Rng + ?Sized>(rng: &mut R) -> Layer {
    let merged: [usize; 3] = if rng.gen() { [0, 1, 1] } else { [0, 2, 2] };
    let (a, b) = if rng.gen() { ([0, 1, 2], merged) } else { (merged, [0, 1, 2]) };
    lay(3, &a, &b)
}

fn leak_layer<R: Rng + ?Sized>(rng: &mut R) -> Layer {
    if rng.gen() {
        lay(3, &[0, 1, 2], &[0, 1, 0])
    } else {
        lay(3, &[0, 1, 0], &[0, 1, 2])
    }
}

pub fn generate<R: Rng + ?Sized>(spec: &EnsembleSpec, rng: &mut R) -> Result<BranchingProgram> {
    let EnsembleSpec { kind, n, k } = *spec;
    if k == 0 || k > n {
        return Err(Error::InvalidParams(format!("need 1 <= k <= n, got k = {k}, n = {n}")));
    }
    let pos = positions(n, k, rng);
    let mut layers = Vec::with_capacity(n);
    if k == 1 {
        // A width-3 stretch costs two non-regular layers, so stay at width 2.
        for i in 0..n {
            layers.push(match (i == pos[0], kind) {
                (true, EnsembleKind::Mixing) => random_nonregular_layer(2, 2, rng),
                (true, EnsembleKind::TwoTrack { .. }) => lay(2, &[0, 1], if rng.gen() { &[0, 0] } else { &[1, 1] }),
                (false, EnsembleKind::Mixing) => random_regular_layer(2, rng),
                (false, EnsembleKind::TwoTrack { .. }) => Layer::identity(2),
            });
        }
    } else {
        let (up, down) = (pos[0], pos[k - 1]);
        for i in 0..n {
            let wide = i > up && i < down;
            let nonregular = pos.binary_search(&i).is_ok();
            let layer = match kind {
                EnsembleKind::Mixing => {
                    if i == up {
                        random_nonregular_layer(2, 3, rng)
                    } else if i == down {
                        random_nonregular_layer(3, 2, rng)
                    } else if nonregular {
                        random_nonregular_layer(3, 3, rng)
                    } else {
                        random_regular_layer(if wide { 3 } else { 2 }, rng)
                    }
                }
                EnsembleKind::TwoTrack { leak } => {
                    if i == up {
                        let a: &[usize] = if rng.gen() { &[0, 1] } else { &[0, 2] };
                        lay(3, a, &[0, if rng.gen() { 1 } else { 2 }])
                    } else if i == down {
                        lay(2, &[0, 1, 1], &[0, 1, 1])
                    } else if nonregular {
                        if rng.gen_bool(leak) {
                            leak_layer(rng)
                        } else {
                            track_preserving_nonregular(rng)
                        }
                    } else if wide {
                        track_preserving_regular(rng)
                    } else {
                        Layer::identity(2)
                    }
                }
            };
            layers.push(layer);
        }
    }
    BranchingProgram::ordered(layers, 0, vec![0])
}

/// `count` instances of `spec`, instance `i` on stream `i`.
pub fn generate_batch(spec: &EnsembleSpec, count: usize, root: u64) -> Result<Vec<BranchingProgram>> {
    (0..count as u64).into_par_iter().map(|i| generate(spec, &mut instance_rng(root, i))).collect()
}

/// Keeps programs with `λ ≥ min_lambda`.
pub fn filter_lambda(programs: Vec<BranchingProgram>, min_lambda: f64) -> Vec<BranchingProgram> {
    programs.into_iter().filter(|d| lambda(d) >= min_lambda).collect()
}

/// The `p` of the mixing lemma for `k` non-regular layers.
pub fn lemma_p(k: usize) -> f64 {
    1.0 / (6000.0 * (k + 1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::{mass, MassOptions};

    fn nonregular(b: &BranchingProgram) -> usize {
        b.layers().iter().filter(|l| !l.is_regular()).count()
    }

    #[test]
    fn shapes_and_counts() {
        for kind in [EnsembleKind::Mixing, EnsembleKind::TwoTrack { leak: 0.5 }] {
            for k in 1..=4 {
                let spec = EnsembleSpec { kind, n: 10, k };
                for b in generate_batch(&spec, 20, 3).unwrap() {
                    assert_eq!(nonregular(&b), k);
                    let w = b.widths();
                    assert_eq!((w[0], w[10]), (2, 2));
                    assert!(b.max_width() <= 3);
                }
            }
        }
    }

    #[test]
    fn pseudomixing_has_no_mass() {
        let spec = EnsembleSpec {
            kind: EnsembleKind::TwoTrack { leak: 0.0 },
            n: 9,
            k: 4,
        };
        for b in generate_batch(&spec, 20, 5).unwrap() {
            assert!((lambda(&b) - 1.0).abs() < 1e-12);
            assert!(mass(&b, &MassOptions::default()).unwrap().total < 1e-12);
        }
    }

    #[test]
    fn batch_is_reproducible() {
        let spec = EnsembleSpec {
            kind: EnsembleKind::Mixing,
            n: 8,
            k: 3,
        };
        assert_eq!(generate_batch(&spec, 10, 9).unwrap(), generate_batch(&spec, 10, 9).unwrap());
        assert_eq!(generate_batch(&spec, 10, 9).unwrap()[4], generate(&spec, &mut instance_rng(9, 4)).unwrap());
    }

    #[test]
    fn chunk_products_stay_below_2i() {
        let p = lemma_p(2);
        for kind in [EnsembleKind::TwoTrack { leak: 0.5 }, EnsembleKind::Mixing] {
            let spec = EnsembleSpec { kind, n: 4, k: 2 };
            let chunks = generate_batch(&spec, 30, 17).unwrap();
            for trio in chunks.chunks(3) {
                let mut acc = trio[0].clone();
                for i in 1..=3 {
                    if i > 1 {
                        acc = acc.concat(&trio[i - 1]).unwrap();
                    }
                    let lp = mass(&acc, &MassOptions::default().with_p(&[p])).unwrap().damped[0].value;
                    assert!(lp <= 2.0 * i as f64, "L_p = {lp} after {i} chunks");
                }
            }
        }
    }
}
