use serde::{Deserialize, Serialize};

use crate::bits::BitSubset;
use crate::error::{Error, Result};
use crate::matrix::Mat;

use super::layer::Layer;

/// Largest input length accepted by exhaustive walks over `{0,1}^n`.
pub const INPUT_BUDGET_BITS: usize = 24;

/// A read-once oblivious branching program.
///
/// Layer `i` reads input position `order[i]`. A length-0 program still has a
/// matrix: the fixed `entry` map, which is the identity unless the program was
/// produced by restricting every variable away.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchingProgram {
    layers: Vec<Layer>,
    order: Vec<usize>,
    start: usize,
    accept: Vec<usize>,
    entry: Vec<usize>,
    entry_width: usize,
}

impl BranchingProgram {
    pub fn new(layers: Vec<Layer>, order: Vec<usize>, start: usize, accept: Vec<usize>) -> Result<Self> {
        let Some(first) = layers.first() else {
            return Err(Error::InvalidParams(
                "use BranchingProgram::empty for length-0 programs".into(),
            ));
        };
        let w0 = first.width_in();
        Self::build(layers, order, start, accept, (0..w0).collect(), w0)
    }

    /// Ordered program (identity read order).
    pub fn ordered(layers: Vec<Layer>, start: usize, accept: Vec<usize>) -> Result<Self> {
        let n = layers.len();
        Self::new(layers, (0..n).collect(), start, accept)
    }

    /// Length-0 identity program of the given width; accepts every state.
    pub fn empty(width: usize) -> Self {
        BranchingProgram {
            layers: Vec::new(),
            order: Vec::new(),
            start: 0,
            accept: (0..width).collect(),
            entry: (0..width).collect(),
            entry_width: width,
        }
    }

    /// Length-0 program whose single matrix is the map `entry: [len] -> [width_out]`.
    pub fn constant(entry: Vec<usize>, width_out: usize, start: usize, accept: Vec<usize>) -> Result<Self> {
        if entry.is_empty() || entry.iter().any(|&v| v >= width_out) {
            return Err(Error::InvalidLayer {
                layer: 0,
                reason: "entry map out of range".into(),
            });
        }
        Self::build(Vec::new(), Vec::new(), start, accept, entry, width_out)
    }

    pub(crate) fn build(
        layers: Vec<Layer>,
        order: Vec<usize>,
        start: usize,
        mut accept: Vec<usize>,
        entry: Vec<usize>,
        entry_width: usize,
    ) -> Result<Self> {
        for (i, layer) in layers.iter().enumerate() {
            layer.validate(i)?;
        }
        for i in 1..layers.len() {
            if layers[i - 1].width_out() != layers[i].width_in() {
                return Err(Error::Seam {
                    index: i - 1,
                    left: layers[i - 1].width_out(),
                    right: layers[i].width_in(),
                });
            }
        }
        check_permutation(&order, layers.len())?;
        if !layers.is_empty() && (entry_width != layers[0].width_in() || entry != (0..entry_width).collect::<Vec<_>>()) {
            return Err(Error::InvalidState("entry map must be the identity when layers are present".into()));
        }
        let w_in = entry.len();
        if start >= w_in {
            return Err(Error::InvalidState(format!("start {start} outside input width {w_in}")));
        }
        accept.sort_unstable();
        accept.dedup();
        let w_out = layers.last().map_or(entry_width, |l| l.width_out());
        if let Some(&bad) = accept.iter().find(|&&a| a >= w_out) {
            return Err(Error::InvalidState(format!("accept state {bad} outside output width {w_out}")));
        }
        Ok(BranchingProgram {
            layers,
            order,
            start,
            accept,
            entry,
            entry_width,
        })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.layers.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.layers.is_empty()
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn layer(&self, i: usize) -> &Layer {
        &self.layers[i]
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn accept(&self) -> &[usize] {
        &self.accept
    }

    pub fn entry(&self) -> &[usize] {
        &self.entry
    }

    pub fn entry_is_identity(&self) -> bool {
        self.entry_width == self.entry.len() && self.entry.iter().enumerate().all(|(i, &v)| i == v)
    }

    pub fn is_ordered(&self) -> bool {
        self.order.iter().enumerate().all(|(i, &p)| i == p)
    }

    pub fn input_width(&self) -> usize {
        self.entry.len()
    }

    pub fn output_width(&self) -> usize {
        self.layers.last().map_or(self.entry_width, |l| l.width_out())
    }

    /// Widths of the vertex layers `0..=n`. For a length-0 program with a
    /// non-identity entry map the two boundary widths are both listed.
    pub fn widths(&self) -> Vec<usize> {
        let mut w = vec![self.input_width()];
        if self.layers.is_empty() {
            if !self.entry_is_identity() {
                w.push(self.entry_width);
            }
        } else {
            w.extend(self.layers.iter().map(|l| l.width_out()));
        }
        w
    }

    pub fn max_width(&self) -> usize {
        self.widths().into_iter().max().unwrap_or(0)
    }

    pub fn with_order(&self, order: Vec<usize>) -> Result<Self> {
        check_permutation(&order, self.len())?;
        let mut out = self.clone();
        out.order = order;
        Ok(out)
    }

    pub fn with_accept(&self, accept: Vec<usize>) -> Result<Self> {
        Self::build(
            self.layers.clone(),
            self.order.clone(),
            self.start,
            accept,
            self.entry.clone(),
            self.entry_width,
        )
    }

    pub fn with_start(&self, start: usize) -> Result<Self> {
        Self::build(
            self.layers.clone(),
            self.order.clone(),
            start,
            self.accept.clone(),
            self.entry.clone(),
            self.entry_width,
        )
    }

    /// Same read order, start and accept set with new layers.
    pub fn replace_layers(&self, layers: Vec<Layer>) -> Result<Self> {
        Self::build(layers, self.order.clone(), self.start, self.accept.clone(), self.entry.clone(), self.entry_width)
    }

    fn check_len(&self, x: &BitSubset) -> Result<()> {
        if x.len() != self.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                got: x.len(),
            });
        }
        Ok(())
    }

    /// Final state reached from input state `from` on input `x`.
    pub fn run_from(&self, from: usize, x: &BitSubset) -> Result<usize> {
        self.check_len(x)?;
        let mut state = self.entry[from];
        for (layer, &pos) in self.layers.iter().zip(&self.order) {
            state = layer.step(state, x.get(pos));
        }
        Ok(state)
    }

    /// `run_from` on a packed input of at most 64 bits; no length check.
    #[inline]
    pub fn run_packed(&self, from: usize, x: u64) -> usize {
        let mut state = self.entry[from];
        for (layer, &pos) in self.layers.iter().zip(&self.order) {
            state = layer.step(state, (x >> pos) & 1 == 1);
        }
        state
    }

    /// `B[x]` as a map from input states to output states.
    pub fn eval_map(&self, x: &BitSubset) -> Result<Vec<usize>> {
        (0..self.input_width()).map(|u| self.run_from(u, x)).collect()
    }

    /// The 0/1 matrix `B[x]`.
    pub fn eval_matrix(&self, x: &BitSubset) -> Result<Mat> {
        Ok(Mat::from_map(&self.eval_map(x)?, self.output_width()))
    }

    /// The scalar function: does the path from `start` end in `accept`?
    pub fn eval_bool(&self, x: &BitSubset) -> Result<bool> {
        let end = self.run_from(self.start, x)?;
        Ok(self.accept.binary_search(&end).is_ok())
    }

    #[inline]
    pub fn accepts_state(&self, state: usize) -> bool {
        self.accept.binary_search(&state).is_ok()
    }

    pub fn accept_indicator(&self) -> Vec<f64> {
        let mut v = vec![0.0; self.output_width()];
        for &a in &self.accept {
            v[a] = 1.0;
        }
        v
    }

    fn check_budget(&self) -> Result<()> {
        if self.len() > INPUT_BUDGET_BITS {
            return Err(Error::BudgetExceeded {
                what: "input enumeration",
                needed: 1u128 << self.len().min(127),
                budget: 1u128 << INPUT_BUDGET_BITS,
            });
        }
        Ok(())
    }

    /// Calls `visit(x, map)` for every input `x` (packed, position `i` at bit `i`),
    /// where `map[u]` is the state reached from input state `u`.
    pub fn for_each_input<F: FnMut(u64, &[usize])>(&self, mut visit: F) -> Result<()> {
        self.check_budget()?;
        let n = self.len();
        let mut stack: Vec<Vec<usize>> = Vec::with_capacity(n + 1);
        stack.push(self.entry.clone());
        for i in 0..n {
            stack.push(vec![0; self.layers[i].width_out()]);
        }
        self.walk(0, 0, &mut stack, &mut visit);
        Ok(())
    }

    fn walk<F: FnMut(u64, &[usize])>(&self, depth: usize, x: u64, stack: &mut [Vec<usize>], visit: &mut F) {
        if depth == self.len() {
            visit(x, &stack[depth]);
            return;
        }
        let layer = &self.layers[depth];
        let pos = self.order[depth];
        for bit in [false, true] {
            let (head, tail) = stack.split_at_mut(depth + 1);
            let cur = &head[depth];
            let next = &mut tail[0];
            next.clear();
            next.extend(cur.iter().map(|&s| layer.step(s, bit)));
            self.walk(depth + 1, x | ((bit as u64) << pos), stack, visit);
        }
    }

    /// Truth table of the scalar function, indexed by packed input.
    pub fn truth_table(&self) -> Result<Vec<bool>> {
        self.check_budget()?;
        let mut table = vec![false; 1usize << self.len()];
        let start = self.start;
        self.for_each_input(|x, map| table[x as usize] = self.accepts_state(map[start]))?;
        Ok(table)
    }

    /// `B ∘ B'`: reads `x ∘ x'`, result matrix `B[x]·B'[x']`.
    pub fn concat(&self, other: &BranchingProgram) -> Result<Self> {
        let w_left = self.output_width();
        let w_right = other.input_width();
        if w_left != w_right {
            return Err(Error::Seam {
                index: self.len().saturating_sub(1),
                left: w_left,
                right: w_right,
            });
        }
        let n = self.len();
        let mut order = self.order.clone();
        order.extend(other.order.iter().map(|&p| p + n));
        let accept = other.accept.clone();
        let mut layers = self.layers.clone();
        match (self.is_empty(), other.is_empty()) {
            (_, false) => {
                let mut rest = other.layers.clone();
                if self.is_empty() {
                    let entry = self.entry.clone();
                    rest[0] = rest[0].after_map(&entry);
                    let composed_entry: Vec<usize> = (0..entry.len()).collect();
                    let w0 = entry.len();
                    layers = rest;
                    return Self::build(layers, order, self.start, accept, composed_entry, w0);
                }
                layers.extend(rest);
                Self::build(layers, order, self.start, accept, self.entry.clone(), self.entry_width)
            }
            (false, true) => {
                let last = layers.len() - 1;
                layers[last] = layers[last].then_map(&other.entry, other.entry_width);
                Self::build(layers, order, self.start, accept, self.entry.clone(), self.entry_width)
            }
            (true, true) => {
                let entry = self.entry.iter().map(|&v| other.entry[v]).collect();
                Self::build(Vec::new(), Vec::new(), self.start, accept, entry, other.entry_width)
            }
        }
    }

    /// Layers `i..=j`, 1-based inclusive. Start state 0, every state accepting
    /// except that `j == n` keeps the original accept set.
    pub fn subprogram(&self, i: usize, j: usize) -> Result<Self> {
        let n = self.len();
        if !self.is_ordered() {
            return Err(Error::Precondition("subprogram requires an ordered program".into()));
        }
        if i < 1 || i > j || j > n {
            return Err(Error::OutOfRange(format!("subprogram({i}, {j}) on length {n}")));
        }
        let layers = self.layers[i - 1..j].to_vec();
        let start = if i == 1 { self.start } else { 0 };
        let accept = if j == n {
            self.accept.clone()
        } else {
            (0..layers.last().map_or(0, |l| l.width_out())).collect()
        };
        let m = layers.len();
        Self::build(layers, (0..m).collect(), start, accept, (0..self.layers[i - 1].width_in()).collect(), self.layers[i - 1].width_in())
    }

    /// Layers `lo..hi` (0-based, half-open), keeping their read positions
    /// renumbered to `0..hi-lo` in layer order. Empty ranges give a length-0
    /// identity program of the boundary width.
    pub fn slice(&self, lo: usize, hi: usize) -> Result<Self> {
        if lo > hi || hi > self.len() {
            return Err(Error::OutOfRange(format!("slice {lo}..{hi} on length {}", self.len())));
        }
        if lo == hi {
            let w = if lo == 0 { self.input_width() } else { self.layers[lo - 1].width_out() };
            return Ok(Self::empty(w));
        }
        let layers = self.layers[lo..hi].to_vec();
        let w_out = layers.last().unwrap().width_out();
        let w_in = layers[0].width_in();
        Self::build(layers, (0..hi - lo).collect(), 0, (0..w_out).collect(), (0..w_in).collect(), w_in)
    }
}

pub(crate) fn check_permutation(order: &[usize], n: usize) -> Result<()> {
    if order.len() != n {
        return Err(Error::BadPermutation {
            n,
            reason: format!("order has {} entries", order.len()),
        });
    }
    let mut seen = vec![false; n];
    for &p in order {
        if p >= n {
            return Err(Error::BadPermutation {
                n,
                reason: format!("position {p} out of range"),
            });
        }
        if std::mem::replace(&mut seen[p], true) {
            return Err(Error::BadPermutation {
                n,
                reason: format!("position {p} repeated"),
            });
        }
    }
    Ok(())
}

/// Applies `order` to a string: `out[i] = x[order[i]]`.
pub fn permute_bits(order: &[usize], x: &BitSubset) -> BitSubset {
    let mut out = BitSubset::zeros(x.len());
    for (i, &p) in order.iter().enumerate() {
        out.set(i, x.get(p));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bp::families;

    fn all_inputs(n: usize) -> impl Iterator<Item = BitSubset> {
        (0..1u64 << n).map(move |x| BitSubset::from_u64(n, x))
    }

    #[test]
    fn identity_program_gives_identity_matrix() {
        let p = BranchingProgram::ordered(vec![Layer::identity(3); 4], 0, vec![0]).unwrap();
        for x in all_inputs(4) {
            assert_eq!(p.eval_matrix(&x).unwrap(), Mat::identity(3));
        }
    }

    #[test]
    fn xor2_on_01_is_swap() {
        let p = families::xor(2).unwrap();
        let x = BitSubset::parse_bits("01").unwrap();
        assert_eq!(p.eval_matrix(&x).unwrap(), Mat::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]));
    }

    #[test]
    fn length_mismatch_is_reported() {
        let p = families::xor(3).unwrap();
        assert_eq!(
            p.eval_matrix(&BitSubset::zeros(2)).unwrap_err(),
            Error::LengthMismatch { expected: 3, got: 2 }
        );
    }

    #[test]
    fn concat_with_empty_is_neutral() {
        let b = families::mod3(4).unwrap();
        let unit = BranchingProgram::empty(3).with_accept(vec![0]).unwrap();
        assert_eq!(b.concat(&unit).unwrap(), b);
        let joined = b.concat(&BranchingProgram::empty(3)).unwrap();
        for x in all_inputs(4) {
            assert_eq!(joined.eval_matrix(&x).unwrap(), b.eval_matrix(&x).unwrap());
        }
        assert_eq!(BranchingProgram::empty(3).concat(&b).unwrap().layers(), b.layers());
    }

    #[test]
    fn concat_matches_families() {
        let x2 = families::xor(1).unwrap().concat(&families::xor(1).unwrap()).unwrap();
        let xor2 = families::xor(2).unwrap();
        for x in all_inputs(2) {
            assert_eq!(x2.eval_matrix(&x).unwrap(), xor2.eval_matrix(&x).unwrap());
        }
        let m5 = families::mod3(2).unwrap().concat(&families::mod3(3).unwrap()).unwrap();
        let mod5 = families::mod3(5).unwrap();
        for x in all_inputs(5) {
            assert_eq!(m5.eval_matrix(&x).unwrap(), mod5.eval_matrix(&x).unwrap());
        }
    }

    #[test]
    fn concat_seam_error() {
        let err = families::xor(2).unwrap().concat(&families::mod3(2).unwrap()).unwrap_err();
        assert!(matches!(err, Error::Seam { left: 2, right: 3, .. }));
    }

    #[test]
    fn subprogram_cases() {
        let b = families::mod3(5).unwrap();
        assert_eq!(b.subprogram(1, 5).unwrap(), b);
        let x5 = families::xor(5).unwrap().subprogram(2, 4).unwrap();
        let x3 = families::xor(3).unwrap();
        for x in all_inputs(3) {
            assert_eq!(x5.eval_matrix(&x).unwrap(), x3.eval_matrix(&x).unwrap());
        }
        assert_eq!(b.subprogram(3, 3).unwrap().layers(), &b.layers()[2..3]);
        assert!(matches!(b.subprogram(0, 2), Err(Error::OutOfRange(_))));
        assert!(matches!(b.subprogram(3, 6), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn subprogram_split_reassembles() {
        let b = families::mod3(6).unwrap();
        for i in 2..=6 {
            let joined = b.subprogram(1, i - 1).unwrap().concat(&b.subprogram(i, 6).unwrap()).unwrap();
            for x in all_inputs(6) {
                assert_eq!(joined.eval_matrix(&x).unwrap(), b.eval_matrix(&x).unwrap());
            }
        }
    }

    #[test]
    fn bad_permutation_rejected() {
        let b = families::xor(3).unwrap();
        assert!(matches!(b.with_order(vec![0, 0, 1]), Err(Error::BadPermutation { .. })));
        assert!(matches!(b.with_order(vec![0, 1]), Err(Error::BadPermutation { .. })));
    }

    #[test]
    fn walk_agrees_with_direct_eval() {
        let b = families::mod3(7).unwrap().with_order(vec![3, 1, 6, 0, 2, 5, 4]).unwrap();
        b.for_each_input(|x, map| {
            let bits = BitSubset::from_u64(7, x);
            assert_eq!(map, b.eval_map(&bits).unwrap().as_slice());
            assert_eq!(map[0], b.run_packed(0, x));
        })
        .unwrap();
    }
}
