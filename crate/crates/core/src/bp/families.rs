//! Canonical program families and random generators.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::layer::Layer;
use super::program::BranchingProgram;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilySpec {
    Tribes { m: usize },
    Mod3 { n: usize },
    Xor { n: usize },
    Dictator { n: usize, i: usize },
    Random3 { n: usize, density: f64 },
    RandomRegular2 { n: usize },
}

impl FamilySpec {
    pub fn len(&self) -> usize {
        match *self {
            FamilySpec::Tribes { m } => m << m,
            FamilySpec::Mod3 { n }
            | FamilySpec::Xor { n }
            | FamilySpec::Dictator { n, .. }
            | FamilySpec::Random3 { n, .. }
            | FamilySpec::RandomRegular2 { n } => n,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

pub fn make_family<R: Rng + ?Sized>(spec: &FamilySpec, rng: &mut R) -> Result<BranchingProgram> {
    match *spec {
        FamilySpec::Tribes { m } => tribes(m),
        FamilySpec::Mod3 { n } => mod3(n),
        FamilySpec::Xor { n } => xor(n),
        FamilySpec::Dictator { n, i } => dictator(n, i),
        FamilySpec::Random3 { n, density } => random3(n, density, rng),
        FamilySpec::RandomRegular2 { n } => random_regular2(n, rng),
    }
}

fn need_positive(n: usize, what: &str) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParams(format!("{what} must be at least 1")));
    }
    Ok(())
}

/// Tribes on `m·2^m` bits: accepts iff no block of `m` consecutive bits is all ones.
///
/// Boundary vertex layers have states {0: alive, 1: dead}; inside a block the
/// states are {0: ones so far, 1: saw a zero, 2: dead}.
pub fn tribes(m: usize) -> Result<BranchingProgram> {
    need_positive(m, "tribes m")?;
    if m > 16 {
        return Err(Error::InvalidParams(format!("tribes m = {m} is larger than supported (m <= 16)")));
    }
    let mut layers = Vec::with_capacity(m << m);
    for _ in 0..(1usize << m) {
        if m == 1 {
            layers.push(Layer::new(2, vec![0, 1], vec![1, 1])?);
            continue;
        }
        layers.push(Layer::new(3, vec![1, 2], vec![0, 2])?);
        for _ in 1..m - 1 {
            layers.push(Layer::new(3, vec![1, 1, 2], vec![0, 1, 2])?);
        }
        layers.push(Layer::new(2, vec![0, 0, 1], vec![1, 0, 1])?);
    }
    BranchingProgram::ordered(layers, 0, vec![0])
}

/// Hamming weight modulo 3; accepts weight ≡ 0.
pub fn mod3(n: usize) -> Result<BranchingProgram> {
    need_positive(n, "mod3 n")?;
    let layer = Layer::new(3, vec![0, 1, 2], vec![1, 2, 0])?;
    BranchingProgram::ordered(vec![layer; n], 0, vec![0])
}

/// Parity; accepts even weight.
pub fn xor(n: usize) -> Result<BranchingProgram> {
    need_positive(n, "xor n")?;
    BranchingProgram::ordered(vec![xor_layer(); n], 0, vec![0])
}

pub fn xor_layer() -> Layer {
    Layer::new(2, vec![0, 1], vec![1, 0]).expect("static layer")
}

pub fn dictator_layer() -> Layer {
    Layer::new(2, vec![0, 0], vec![1, 1]).expect("static layer")
}

/// `f(x) = x_i` (0-based `i`), width 2.
pub fn dictator(n: usize, i: usize) -> Result<BranchingProgram> {
    need_positive(n, "dictator n")?;
    if i >= n {
        return Err(Error::InvalidParams(format!("dictator index {i} out of range for n = {n}")));
    }
    let mut layers = vec![Layer::identity(2); n];
    layers[i] = dictator_layer();
    BranchingProgram::ordered(layers, 0, vec![1])
}

/// Uniformly random regular layer: a shuffle of the in-degree multiset.
pub fn random_regular_layer<R: Rng + ?Sized>(w: usize, rng: &mut R) -> Layer {
    let mut slots: Vec<usize> = (0..w).flat_map(|v| [v, v]).collect();
    slots.shuffle(rng);
    let next1 = slots.split_off(w);
    Layer::new(w, slots, next1).expect("in range by construction")
}

/// Uniformly random layer with arbitrary transition maps.
pub fn random_layer<R: Rng + ?Sized>(w_in: usize, w_out: usize, rng: &mut R) -> Layer {
    let next0 = (0..w_in).map(|_| rng.gen_range(0..w_out)).collect();
    let next1 = (0..w_in).map(|_| rng.gen_range(0..w_out)).collect();
    Layer::new(w_out, next0, next1).expect("in range by construction")
}

/// Random non-regular layer, by rejection. Every 1→1 layer is regular, so that shape panics.
pub fn random_nonregular_layer<R: Rng + ?Sized>(w_in: usize, w_out: usize, rng: &mut R) -> Layer {
    assert!(w_in > 1 || w_out > 1, "no non-regular 1x1 layer exists");
    loop {
        let l = random_layer(w_in, w_out, rng);
        if !l.is_regular() {
            return l;
        }
    }
}

/// Random nonempty subset of `[w]`.
pub fn random_accept<R: Rng + ?Sized>(w: usize, rng: &mut R) -> Vec<usize> {
    loop {
        let acc: Vec<usize> = (0..w).filter(|_| rng.gen_bool(0.5)).collect();
        if !acc.is_empty() {
            return acc;
        }
    }
}

/// Width-3 program split into `round(density·n)` contiguous chunks, each with
/// exactly one non-regular layer at a random position; all other layers are
/// random regular.
pub fn random3<R: Rng + ?Sized>(n: usize, density: f64, rng: &mut R) -> Result<BranchingProgram> {
    need_positive(n, "random3 n")?;
    if !(0.0..=1.0).contains(&density) {
        return Err(Error::InvalidParams(format!("density {density} must lie in [0, 1]")));
    }
    let chunks = ((density * n as f64).round() as usize).min(n);
    let mut nonregular = vec![false; n];
    for c in 0..chunks {
        let lo = c * n / chunks;
        let hi = (c + 1) * n / chunks;
        nonregular[rng.gen_range(lo..hi)] = true;
    }
    let layers = nonregular
        .iter()
        .map(|&nr| {
            if nr {
                random_nonregular_layer(3, 3, rng)
            } else {
                random_regular_layer(3, rng)
            }
        })
        .collect();
    let accept = random_accept(3, rng);
    BranchingProgram::ordered(layers, 0, accept)
}

/// Width-2 program of random regular layers (trivial, XOR-type or dictator-type).
pub fn random_regular2<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<BranchingProgram> {
    need_positive(n, "random_regular2 n")?;
    let layers = (0..n).map(|_| random_regular_layer(2, rng)).collect();
    let start = rng.gen_range(0..2);
    let accept = random_accept(2, rng);
    BranchingProgram::ordered(layers, start, accept)
}

/// Program with the given vertex-layer widths and uniformly random maps.
pub fn random_program<R: Rng + ?Sized>(widths: &[usize], rng: &mut R) -> Result<BranchingProgram> {
    if widths.len() < 2 {
        return Err(Error::InvalidParams("need at least two vertex layers".into()));
    }
    let layers = widths.windows(2).map(|w| random_layer(w[0], w[1], rng)).collect();
    let start = rng.gen_range(0..widths[0]);
    let accept = random_accept(widths[widths.len() - 1], rng);
    BranchingProgram::ordered(layers, start, accept)
}

/// Random read order.
pub fn random_order<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    order
}
