//! Fast Walsh–Hadamard transform.

use rayon::prelude::*;

const PAR_THRESHOLD: usize = 1 << 14;

/// In-place unnormalized transform: `out[s] = Σ_x a[x]·(−1)^{popcount(s & x)}`.
///
/// Every butterfly is computed the same way regardless of how the work is
/// split, so the result does not depend on the thread count.
pub fn fwht(a: &mut [f64]) {
    let n = a.len();
    assert!(n.is_power_of_two(), "length must be a power of two");
    let mut h = 1;
    while h < n {
        let butterfly = |block: &mut [f64]| {
            let (lo, hi) = block.split_at_mut(h);
            for (x, y) in lo.iter_mut().zip(hi.iter_mut()) {
                let (u, v) = (*x, *y);
                *x = u + v;
                *y = u - v;
            }
        };
        if n >= PAR_THRESHOLD {
            a.par_chunks_mut(2 * h).for_each(butterfly);
        } else {
            a.chunks_mut(2 * h).for_each(butterfly);
        }
        h *= 2;
    }
}
