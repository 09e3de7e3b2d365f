//! Charge propagation and the sign partition it induces.

use serde::Serialize;

use crate::bp::BranchingProgram;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChargeProfile {
    /// Charge of every vertex, per vertex layer. The two start vertices hold `+1` and `−1`.
    pub charges: Vec<Vec<f64>>,
    /// `true` for vertices in `Q` (charge ≥ 0).
    pub in_q: Vec<Vec<bool>>,
    /// Layers with an edge whose endpoints lie on different sides.
    pub crossing_layers: Vec<usize>,
    /// Sum of absolute charges per vertex layer.
    pub total: Vec<f64>,
    /// Smallest absolute charge per vertex layer.
    pub min_charge: Vec<f64>,
    /// Absolute charge carried by crossing edges, per layer.
    pub crossing_charge: Vec<f64>,
}

impl ChargeProfile {
    pub fn crossing_count(&self) -> usize {
        self.crossing_layers.len()
    }

    pub fn is_crossing(&self, layer: usize) -> bool {
        self.crossing_layers.binary_search(&layer).is_ok()
    }

    /// Half the final total charge; equals `λ` when the last layer has width 2.
    pub fn final_half_total(&self) -> f64 {
        self.total.last().copied().unwrap_or(0.0) / 2.0
    }
}

/// Charges are dyadic rationals, so every sum here is exact for the lengths we use.
pub fn charge_partition(d: &BranchingProgram) -> Result<ChargeProfile> {
    if d.input_width() != 2 {
        return Err(Error::Precondition(format!("first vertex layer has width {}, need 2", d.input_width())));
    }
    if d.max_width() > 3 {
        return Err(Error::Precondition(format!("width {} exceeds 3", d.max_width())));
    }
    let mut charges: Vec<Vec<f64>> = vec![vec![1.0, -1.0]];
    for layer in d.layers() {
        let cur = charges.last().unwrap();
        let mut next = vec![0.0; layer.width_out()];
        for (u, &c) in cur.iter().enumerate() {
            next[layer.next0()[u]] += c / 2.0;
            next[layer.next1()[u]] += c / 2.0;
        }
        charges.push(next);
    }
    let in_q: Vec<Vec<bool>> = charges.iter().map(|l| l.iter().map(|&c| c >= 0.0).collect()).collect();
    let mut crossing_layers = Vec::new();
    let mut crossing_charge = Vec::with_capacity(d.len());
    for (i, layer) in d.layers().iter().enumerate() {
        let mut carried = 0.0;
        let mut crosses = false;
        for u in 0..layer.width_in() {
            for v in [layer.next0()[u], layer.next1()[u]] {
                if in_q[i][u] != in_q[i + 1][v] {
                    crosses = true;
                    carried += charges[i][u].abs() / 2.0;
                }
            }
        }
        if crosses {
            crossing_layers.push(i);
        }
        crossing_charge.push(carried);
    }
    let total = charges.iter().map(|l| l.iter().map(|c| c.abs()).sum()).collect();
    let min_charge = charges.iter().map(|l| l.iter().map(|c| c.abs()).fold(f64::INFINITY, f64::min)).collect();
    Ok(ChargeProfile {
        charges,
        in_q,
        crossing_layers,
        total,
        min_charge,
        crossing_charge,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bp::{families, Layer};
    use crate::fourier::lambda;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_keeps_charges() {
        let b = BranchingProgram::ordered(vec![Layer::identity(2); 5], 0, vec![0]).unwrap();
        let c = charge_partition(&b).unwrap();
        assert!(c.charges.iter().all(|l| l == &vec![1.0, -1.0]));
        assert!(c.crossing_layers.is_empty());
    }

    #[test]
    fn xor_cancels_at_first_layer() {
        let c = charge_partition(&families::xor(4).unwrap()).unwrap();
        assert_eq!(c.charges[1], vec![0.0, 0.0]);
        assert_eq!(c.total, vec![2.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(c.crossing_layers, vec![0]);
    }

    #[test]
    fn conservation_and_monotonicity() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..200 {
            let n = 8;
            let mut widths = vec![2];
            widths.extend((1..n).map(|_| 3));
            widths.push(2);
            let b = families::random_program(&widths, &mut rng).unwrap();
            let c = charge_partition(&b).unwrap();
            for (i, l) in c.charges.iter().enumerate() {
                assert_eq!(l.iter().sum::<f64>(), 0.0);
                if i > 0 {
                    let drop = c.total[i - 1] - c.total[i];
                    assert!(drop >= 0.0);
                    assert_eq!(drop, 2.0 * c.crossing_charge[i - 1]);
                }
            }
            assert!((c.final_half_total() - lambda(&b)).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_wide_start() {
        assert!(charge_partition(&families::mod3(3).unwrap()).is_err());
    }
}
