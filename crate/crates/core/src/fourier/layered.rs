//! Matrix-valued layered functions and their Fourier coefficients.

use crate::bits::BitSubset;
use crate::bp::{BranchingProgram, Layer};
use crate::error::{Error, Result};
use crate::matrix::Mat;

use super::INPUT_BUDGET_BITS;

/// One layer of a matrix-valued function: the matrices read on bits 0 and 1.
#[derive(Clone, Debug, PartialEq)]
pub struct FLayer {
    m0: Mat,
    m1: Mat,
    c0: Mat,
    c1: Mat,
    boolean: bool,
}

impl FLayer {
    pub fn new(m0: Mat, m1: Mat, boolean: bool) -> Self {
        assert_eq!((m0.rows(), m0.cols()), (m1.rows(), m1.cols()), "layer matrices differ in shape");
        let c0 = (&m0 + &m1).scale(0.5);
        let c1 = (&m0 - &m1).scale(0.5);
        FLayer { m0, m1, c0, c1, boolean }
    }

    pub fn from_layer(layer: &Layer) -> Self {
        Self::new(layer.matrix(false), layer.matrix(true), true)
    }

    /// The layer replaced by its expectation matrix on both bits.
    pub fn averaged(&self) -> Self {
        Self::new(self.c0.clone(), self.c0.clone(), false)
    }

    pub fn matrix(&self, bit: bool) -> &Mat {
        if bit {
            &self.m1
        } else {
            &self.m0
        }
    }

    /// `(M0 + M1)/2` for `b = 0`, `(M0 − M1)/2` for `b = 1`.
    pub fn coeff(&self, bit: bool) -> &Mat {
        if bit {
            &self.c1
        } else {
            &self.c0
        }
    }

    pub fn is_boolean(&self) -> bool {
        self.boolean
    }

    pub fn rows(&self) -> usize {
        self.m0.rows()
    }

    pub fn cols(&self) -> usize {
        self.m0.cols()
    }
}

/// Per-layer Fourier coefficient of a program layer.
pub fn layer_coeff(layer: &Layer, bit: bool) -> Mat {
    FLayer::from_layer(layer).coeff(bit).clone()
}

/// `F[x] = base · L_1[x_{order[0]}] ⋯ L_n[x_{order[n−1]}]`, with scalar read-out
/// through `start` and `accept`.
#[derive(Clone, Debug, PartialEq)]
pub struct LayeredFunction {
    base: Mat,
    layers: Vec<FLayer>,
    order: Vec<usize>,
    start: usize,
    accept: Vec<usize>,
}

impl LayeredFunction {
    pub fn from_bp(b: &BranchingProgram) -> Self {
        LayeredFunction {
            base: Mat::from_map(b.entry(), if b.is_empty() { b.output_width() } else { b.layer(0).width_in() }),
            layers: b.layers().iter().map(FLayer::from_layer).collect(),
            order: b.order().to_vec(),
            start: b.start(),
            accept: b.accept().to_vec(),
        }
    }

    pub fn len(&self) -> usize {
        self.layers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.layers.is_empty()
    }

    pub fn layers(&self) -> &[FLayer] {
        &self.layers
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn base(&self) -> &Mat {
        &self.base
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn accept(&self) -> &[usize] {
        &self.accept
    }

    pub fn rows(&self) -> usize {
        self.base.rows()
    }

    pub fn cols(&self) -> usize {
        self.layers.last().map_or(self.base.cols(), |l| l.cols())
    }

    pub fn accept_indicator(&self) -> Vec<f64> {
        let mut v = vec![0.0; self.cols()];
        for &a in &self.accept {
            v[a] = 1.0;
        }
        v
    }

    /// Scalar read-out `e_start^T · M · 1_accept`.
    pub fn scalar(&self, m: &Mat) -> f64 {
        let acc = self.accept_indicator();
        m.row(self.start).iter().zip(&acc).map(|(a, b)| a * b).sum()
    }

    fn check_len(&self, s: &BitSubset) -> Result<()> {
        if s.len() != self.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                got: s.len(),
            });
        }
        Ok(())
    }

    /// `F̂[s]` as the product of per-layer coefficients; `s` indexes input positions.
    pub fn coeff(&self, s: &BitSubset) -> Result<Mat> {
        self.check_len(s)?;
        let mut acc = self.base.clone();
        let mut tmp = Mat::zeros(0, 0);
        for (layer, &pos) in self.layers.iter().zip(&self.order) {
            acc.mul_into(layer.coeff(s.get(pos)), &mut tmp);
            std::mem::swap(&mut acc, &mut tmp);
        }
        Ok(acc)
    }

    /// `E_U[F[U]]`.
    pub fn expectation(&self) -> Mat {
        self.coeff(&BitSubset::zeros(self.len())).expect("length matches")
    }

    /// `F[x]`; refuses averaged layers.
    pub fn eval_matrix(&self, x: &BitSubset) -> Result<Mat> {
        if let Some(i) = self.layers.iter().position(|l| !l.is_boolean()) {
            return Err(Error::NotBoolean(i));
        }
        self.eval_real(x)
    }

    /// Product of the layer matrices selected by `x`, averaged layers included.
    pub fn eval_real(&self, x: &BitSubset) -> Result<Mat> {
        self.check_len(x)?;
        let mut acc = self.base.clone();
        for (layer, &pos) in self.layers.iter().zip(&self.order) {
            acc = &acc * layer.matrix(x.get(pos));
        }
        Ok(acc)
    }

    /// Averaging restriction: layers reading positions outside `t` are replaced
    /// by their expectation.
    pub fn avg_restrict(&self, t: &BitSubset) -> Result<Self> {
        self.check_len(t)?;
        let mut out = self.clone();
        for (layer, &pos) in out.layers.iter_mut().zip(&self.order) {
            if !t.get(pos) {
                *layer = layer.averaged();
            }
        }
        Ok(out)
    }

    /// The subfunction on layers `lo..hi` with read positions renumbered in layer order.
    pub fn slice(&self, lo: usize, hi: usize) -> Self {
        let base = if lo == 0 {
            self.base.clone()
        } else {
            Mat::identity(self.layers[lo - 1].cols())
        };
        LayeredFunction {
            base,
            layers: self.layers[lo..hi].to_vec(),
            order: (0..hi - lo).collect(),
            start: 0,
            accept: Vec::new(),
        }
    }

    pub(crate) fn check_budget(&self) -> Result<()> {
        if self.len() > INPUT_BUDGET_BITS {
            return Err(Error::BudgetExceeded {
                what: "input enumeration",
                needed: 1u128 << self.len().min(127),
                budget: 1u128 << INPUT_BUDGET_BITS,
            });
        }
        Ok(())
    }
}

/// Averaging restriction of a program.
pub fn avg_restrict(b: &BranchingProgram, t: &BitSubset) -> Result<LayeredFunction> {
    LayeredFunction::from_bp(b).avg_restrict(t)
}

/// `B̂[s]` through the per-layer factorization.
pub fn coeff(b: &BranchingProgram, s: &BitSubset) -> Result<Mat> {
    LayeredFunction::from_bp(b).coeff(s)
}

/// `B̂[s]` straight from the definition: the average of `B[x]·χ_s(x)` over all inputs.
pub fn coeff_oracle(b: &BranchingProgram, s: &BitSubset) -> Result<Mat> {
    if s.len() != b.len() {
        return Err(Error::LengthMismatch {
            expected: b.len(),
            got: s.len(),
        });
    }
    let mask = s.as_u64().unwrap_or(0);
    let mut sums = vec![0i64; b.input_width() * b.output_width()];
    let w_out = b.output_width();
    b.for_each_input(|x, map| {
        let sign = if (x & mask).count_ones() % 2 == 0 { 1 } else { -1 };
        for (u, &v) in map.iter().enumerate() {
            sums[u * w_out + v] += sign;
        }
    })?;
    let scale = (0.5f64).powi(b.len() as i32);
    let mut m = Mat::zeros(b.input_width(), w_out);
    for u in 0..b.input_width() {
        for v in 0..w_out {
            m[(u, v)] = sums[u * w_out + v] as f64 * scale;
        }
    }
    Ok(m)
}

/// Definition-level coefficient of a layered function: enumerates every input
/// and multiplies the selected matrices directly.
pub fn coeff_oracle_layered(f: &LayeredFunction, s: &BitSubset) -> Result<Mat> {
    f.check_len(s)?;
    f.check_budget()?;
    let n = f.len();
    let mut acc = Mat::zeros(f.rows(), f.cols());
    for x in 0..1u64 << n {
        let xb = BitSubset::from_u64(n, x);
        let sign = if (0..n).filter(|&i| s.get(i) && xb.get(i)).count() % 2 == 0 { 1.0 } else { -1.0 };
        acc.add_scaled(&f.eval_real(&xb)?, sign);
    }
    Ok(acc.scale((0.5f64).powi(n as i32)))
}

/// Every coefficient `F̂[s]`, indexed by the packed mask of `s`.
pub fn all_coeffs(f: &LayeredFunction) -> Result<Vec<Mat>> {
    f.check_budget()?;
    let n = f.len();
    let mut out = vec![Mat::zeros(0, 0); 1usize << n];
    fn rec(f: &LayeredFunction, depth: usize, s: u64, acc: &Mat, out: &mut Vec<Mat>) {
        if depth == f.len() {
            out[s as usize] = acc.clone();
            return;
        }
        let pos = f.order[depth];
        for bit in [false, true] {
            let next = acc * f.layers[depth].coeff(bit);
            rec(f, depth + 1, s | ((bit as u64) << pos), &next, out);
        }
    }
    rec(f, 0, 0, &f.base, &mut out);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bp::families;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn layer_coefficients() {
        let id = Layer::identity(2);
        assert_eq!(layer_coeff(&id, false), Mat::identity(2));
        assert!(layer_coeff(&id, true).is_zero());
        let half = |rows: [[f64; 2]; 2]| Mat::from_rows(&rows.map(|r| r.to_vec()));
        assert_eq!(layer_coeff(&families::xor_layer(), true), half([[0.5, -0.5], [-0.5, 0.5]]));
        assert_eq!(layer_coeff(&families::dictator_layer(), true), half([[0.5, -0.5], [0.5, -0.5]]));
    }

    #[test]
    fn xor_coefficients() {
        for n in 1..=6 {
            let b = families::xor(n).unwrap();
            let f = LayeredFunction::from_bp(&b);
            let all = all_coeffs(&f).unwrap();
            let top = (1usize << n) - 1;
            for (s, c) in all.iter().enumerate() {
                let oracle = coeff_oracle(&b, &BitSubset::from_u64(n, s as u64)).unwrap();
                assert!(c.max_abs_diff(&oracle) < 1e-12);
                if s == top {
                    let want = Mat::from_rows(&[vec![0.5, -0.5], vec![-0.5, 0.5]]);
                    assert!(c.max_abs_diff(&want) < 1e-15);
                } else if s != 0 {
                    assert!(c.is_zero());
                }
            }
        }
    }

    #[test]
    fn avg_restrict_kills_outside_coefficients() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let n = rng.gen_range(1..=8);
            let widths: Vec<usize> = (0..=n).map(|_| rng.gen_range(1..=3)).collect();
            let b = families::random_program(&widths, &mut rng).unwrap();
            let b = b.with_order(families::random_order(n, &mut rng)).unwrap();
            let t = BitSubset::from_u64(n, rng.gen());
            let f = LayeredFunction::from_bp(&b);
            let r = f.avg_restrict(&t).unwrap();
            for s in 0..1u64 << n {
                let s = BitSubset::from_u64(n, s);
                let want = if s.is_subset_of(&t) { f.coeff(&s).unwrap() } else { Mat::zeros(f.rows(), f.cols()) };
                assert!(r.coeff(&s).unwrap().max_abs_diff(&want) < 1e-12);
                assert!(coeff_oracle_layered(&r, &s).unwrap().max_abs_diff(&want) < 1e-12);
            }
        }
    }

    #[test]
    fn averaged_layers_refuse_boolean_eval() {
        let b = families::mod3(3).unwrap();
        let r = avg_restrict(&b, &BitSubset::parse_bits("101").unwrap()).unwrap();
        assert_eq!(r.eval_matrix(&BitSubset::zeros(3)).unwrap_err(), Error::NotBoolean(1));
        let full = avg_restrict(&b, &BitSubset::ones(3)).unwrap();
        assert_eq!(full, LayeredFunction::from_bp(&b));
        let none = avg_restrict(&b, &BitSubset::zeros(3)).unwrap();
        let e = LayeredFunction::from_bp(&b).expectation();
        for x in 0..8 {
            assert!(none.eval_real(&BitSubset::from_u64(3, x)).unwrap().max_abs_diff(&e) < 1e-15);
        }
    }
}
