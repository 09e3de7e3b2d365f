//! Level-1 mass and the weight of each bit on the final state.

use serde::Serialize;

use crate::bp::BranchingProgram;
use crate::error::Result;
use crate::fourier::LayeredFunction;
use crate::matrix::Mat;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FirstOrderReport {
    pub n: usize,
    /// `Σ_i ‖B̂[{i}]‖₂`
    pub matrix: f64,
    /// `Σ_i |f̂[{i}]|`
    pub scalar: f64,
    /// Per position `i`: `(‖B̂[{i}]‖₂, f̂[{i}])`.
    pub per_position: Vec<(f64, f64)>,
    /// `(w, bound on ξ(n, w))` from `ξ(n,2) ≤ 10` and the width recursion.
    pub xi_bounds: Vec<(usize, f64)>,
}

/// `ξ(n,2) ≤ 10` (stated without proof) and `ξ(n,w) ≤ (2 + 2 log₂ n)(ξ(n,w−1) + 1)`.
pub fn xi_bounds(n: usize, w_max: usize) -> Vec<(usize, f64)> {
    let mut out = vec![(2, 10.0)];
    for w in 3..=w_max {
        let prev = out.last().unwrap().1;
        out.push((w, (2.0 + 2.0 * (n.max(1) as f64).log2()) * (prev + 1.0)));
    }
    out
}

/// Every single-position coefficient from prefix and suffix products of the
/// zero coefficients, in time linear in `n`.
pub fn first_order_mass(b: &BranchingProgram) -> Result<FirstOrderReport> {
    let f = LayeredFunction::from_bp(b);
    let n = f.len();
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(f.base().clone());
    for l in f.layers() {
        let next = prefix.last().unwrap() * l.coeff(false);
        prefix.push(next);
    }
    let mut suffix = vec![Mat::identity(f.cols()); n + 1];
    for i in (0..n).rev() {
        suffix[i] = f.layers()[i].coeff(false) * &suffix[i + 1];
    }
    let mut per_position = vec![(0.0, 0.0); n];
    for i in 0..n {
        let c = &(&prefix[i] * f.layers()[i].coeff(true)) * &suffix[i + 1];
        per_position[f.order()[i]] = (c.spectral_norm(), f.scalar(&c));
    }
    Ok(FirstOrderReport {
        n,
        matrix: per_position.iter().map(|p| p.0).sum(),
        scalar: per_position.iter().map(|p| p.1.abs()).sum(),
        per_position,
        xi_bounds: xi_bounds(n, b.max_width().max(2)),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeightReport {
    pub n: usize,
    pub w: usize,
    /// Non-regular layers.
    pub k: usize,
    /// `Σ_i ‖B̂_{i..n}[1∘0^{n−i}]‖₂`
    pub weight: f64,
    /// `(2w² + 1)√w (k + 1)`
    pub bound: f64,
    pub pass: bool,
}

pub fn nonregular_weight(b: &BranchingProgram) -> WeightReport {
    let f = LayeredFunction::from_bp(b);
    let n = f.len();
    let mut suffix = Mat::identity(f.cols());
    let mut weight = 0.0;
    for i in (0..n).rev() {
        let l = &f.layers()[i];
        weight += (l.coeff(true) * &suffix).spectral_norm();
        suffix = l.coeff(false) * &suffix;
    }
    let w = b.max_width();
    let k = b.layers().iter().filter(|l| !l.is_regular()).count();
    let bound = (2.0 * (w * w) as f64 + 1.0) * (w as f64).sqrt() * (k + 1) as f64;
    WeightReport {
        n,
        w,
        k,
        weight,
        bound,
        pass: weight <= bound,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::BitSubset;
    use crate::bp::families;
    use crate::fourier::{coeff, scalar_spectrum};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn matches_direct_coefficients() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..30 {
            let order = families::random_order(7, &mut rng);
            let b = families::random_program(&[2, 3, 3, 2, 3, 3, 3, 2], &mut rng).unwrap().with_order(order).unwrap();
            let r = first_order_mass(&b).unwrap();
            let spec = scalar_spectrum(&b).unwrap();
            for i in 0..7 {
                let s = BitSubset::from_u64(7, 1 << i);
                assert!((r.per_position[i].0 - coeff(&b, &s).unwrap().spectral_norm()).abs() < 1e-12);
                assert!((r.per_position[i].1 - spec[1 << i]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn xor_has_no_level_one_mass() {
        let r = first_order_mass(&families::xor(5).unwrap()).unwrap();
        assert!(r.matrix < 1e-15 && r.scalar < 1e-15);
    }

    #[test]
    fn dictator_has_one_term() {
        let r = first_order_mass(&families::dictator(6, 4).unwrap()).unwrap();
        let nonzero: Vec<usize> = (0..6).filter(|&i| r.per_position[i].1 != 0.0).collect();
        assert_eq!(nonzero, vec![4]);
        assert_eq!(r.scalar, 0.5);
    }

    #[test]
    fn xi_recursion() {
        let b = xi_bounds(8, 4);
        assert_eq!(b[0], (2, 10.0));
        assert_eq!(b[1], (3, 88.0));
        assert_eq!(b[2], (4, 712.0));
    }

    #[test]
    fn regular_weight_is_small() {
        let r = nonregular_weight(&families::mod3(10).unwrap());
        assert_eq!(r.k, 0);
        assert!(r.pass);
    }
}
