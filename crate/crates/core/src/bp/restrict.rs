use crate::bits::BitSubset;
use crate::error::{Error, Result};

use super::layer::Layer;
use super::program::BranchingProgram;

/// `B|_{ḡ←x}`: positions outside `g` are fixed to `x`, positions in `g` stay free.
///
/// The result reads `|g|` bits; its position `j` is the `j`-th set position of
/// `g` (see [`expand_free`]). Fixed layers are folded into the preceding free
/// layer, and leading fixed layers into the first free layer. With no free
/// layers the result is a length-0 program whose matrix is `B[x]`.
pub fn restrict_fixed(b: &BranchingProgram, g: &BitSubset, x: &BitSubset, prune: bool) -> Result<BranchingProgram> {
    let n = b.len();
    for s in [g, x] {
        if s.len() != n {
            return Err(Error::LengthMismatch { expected: n, got: s.len() });
        }
    }
    let mut rank = vec![usize::MAX; n];
    let mut next_rank = 0;
    for (pos, r) in rank.iter_mut().enumerate() {
        if g.get(pos) {
            *r = next_rank;
            next_rank += 1;
        }
    }

    // `lead` composes the fixed maps seen before the first free layer.
    let mut lead: Vec<usize> = b.entry().to_vec();
    let mut lead_width = if b.is_empty() { b.output_width() } else { b.layer(0).width_in() };
    let mut layers: Vec<Layer> = Vec::new();
    let mut order: Vec<usize> = Vec::new();
    for (i, layer) in b.layers().iter().enumerate() {
        let pos = b.order()[i];
        if g.get(pos) {
            let l = if layers.is_empty() { layer.after_map(&lead) } else { layer.clone() };
            layers.push(l);
            order.push(rank[pos]);
        } else {
            let map = layer.next(x.get(pos));
            match layers.last_mut() {
                Some(last) => *last = last.then_map(map, layer.width_out()),
                None => {
                    lead = lead.iter().map(|&u| map[u]).collect();
                    lead_width = layer.width_out();
                }
            }
        }
    }

    let out = if layers.is_empty() {
        BranchingProgram::constant(lead, lead_width, b.start(), b.accept().to_vec())?
    } else {
        let w0 = layers[0].width_in();
        BranchingProgram::build(layers, order, b.start(), b.accept().to_vec(), (0..w0).collect(), w0)?
    };
    if prune {
        prune_unreachable(&out)
    } else {
        Ok(out)
    }
}

/// Places the free bits `y` (length `|g|`) into the set positions of `g`;
/// other positions are zero.
pub fn expand_free(g: &BitSubset, y: &BitSubset) -> Result<BitSubset> {
    let ones = g.ones_positions();
    if ones.len() != y.len() {
        return Err(Error::LengthMismatch { expected: ones.len(), got: y.len() });
    }
    let mut out = BitSubset::zeros(g.len());
    for (j, &pos) in ones.iter().enumerate() {
        out.set(pos, y.get(j));
    }
    Ok(out)
}

/// Vertices reachable from any vertex of layer 0, per vertex layer.
pub fn reachable_sets(b: &BranchingProgram) -> Vec<Vec<bool>> {
    let mut sets = Vec::with_capacity(b.len() + 1);
    let mut cur = vec![true; b.input_width()];
    if b.is_empty() {
        let mut r = vec![false; b.output_width()];
        for &v in b.entry() {
            r[v] = true;
        }
        if b.entry_is_identity() {
            sets.push(r);
        } else {
            sets.push(cur);
            sets.push(r);
        }
        return sets;
    }
    sets.push(cur.clone());
    for layer in b.layers() {
        let mut next = vec![false; layer.width_out()];
        for (u, &live) in cur.iter().enumerate() {
            if live {
                next[layer.next0()[u]] = true;
                next[layer.next1()[u]] = true;
            }
        }
        sets.push(next.clone());
        cur = next;
    }
    sets
}

/// Deletes vertices unreachable from layer 0 and renumbers the survivors.
/// Accept states that disappear are dropped.
pub fn prune_unreachable(b: &BranchingProgram) -> Result<BranchingProgram> {
    if b.is_empty() {
        return Ok(b.clone());
    }
    let reach = reachable_sets(b);
    let renumber: Vec<Vec<usize>> = reach
        .iter()
        .map(|r| {
            let mut next = 0;
            r.iter()
                .map(|&live| {
                    if live {
                        next += 1;
                        next - 1
                    } else {
                        usize::MAX
                    }
                })
                .collect()
        })
        .collect();
    let layers = b
        .layers()
        .iter()
        .enumerate()
        .map(|(i, layer)| {
            let w_out = reach[i + 1].iter().filter(|&&l| l).count();
            let keep: Vec<usize> = (0..layer.width_in()).filter(|&u| reach[i][u]).collect();
            let next0 = keep.iter().map(|&u| renumber[i + 1][layer.next0()[u]]).collect();
            let next1 = keep.iter().map(|&u| renumber[i + 1][layer.next1()[u]]).collect();
            Layer::new(w_out, next0, next1)
        })
        .collect::<Result<Vec<_>>>()?;
    let last = &renumber[b.len()];
    let accept = b.accept().iter().filter_map(|&a| (last[a] != usize::MAX).then_some(last[a])).collect();
    let w0 = layers[0].width_in();
    BranchingProgram::build(layers, b.order().to_vec(), b.start(), accept, (0..w0).collect(), w0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::select;
    use crate::bp::families;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn full_support_is_identity() {
        let b = families::mod3(5).unwrap().with_order(vec![4, 2, 0, 1, 3]).unwrap();
        let r = restrict_fixed(&b, &BitSubset::ones(5), &BitSubset::zeros(5), false).unwrap();
        assert_eq!(r, b);
    }

    #[test]
    fn empty_support_gives_constant_matrix() {
        let b = families::tribes(2).unwrap();
        let x = BitSubset::parse_bits("10110111").unwrap();
        let r = restrict_fixed(&b, &BitSubset::zeros(8), &x, false).unwrap();
        assert_eq!(r.len(), 0);
        assert_eq!(r.eval_matrix(&BitSubset::zeros(0)).unwrap(), b.eval_matrix(&x).unwrap());
    }

    #[test]
    fn collision_restriction_drops_width() {
        // label 0 merges states 0 and 1
        let mid = Layer::new(3, vec![0, 0, 1], vec![2, 1, 0]).unwrap();
        let b = BranchingProgram::ordered(vec![Layer::identity(3), mid, Layer::identity(3)], 0, vec![0]).unwrap();
        let g = BitSubset::parse_bits("101").unwrap();
        let r = restrict_fixed(&b, &g, &BitSubset::zeros(3), true).unwrap();
        assert_eq!(r.widths(), vec![3, 2, 2]);
    }

    #[test]
    fn restriction_semantics_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..40 {
            let n = rng.gen_range(1..=8);
            let widths: Vec<usize> = (0..=n).map(|_| rng.gen_range(1..=4)).collect();
            let order = families::random_order(n, &mut rng);
            let b = families::random_program(&widths, &mut rng).unwrap().with_order(order).unwrap();
            let g = BitSubset::from_u64(n, rng.gen());
            let x = BitSubset::from_u64(n, rng.gen());
            let unpruned = restrict_fixed(&b, &g, &x, false).unwrap().widths();
            for prune in [false, true] {
                let r = restrict_fixed(&b, &g, &x, prune).unwrap();
                let ws = r.widths();
                assert_eq!(ws.len(), unpruned.len());
                assert!(ws.iter().zip(&unpruned).all(|(a, b)| a <= b));
                for y in 0..1u64 << g.count_ones() {
                    let y = BitSubset::from_u64(g.count_ones(), y);
                    let full = select(&g, &expand_free(&g, &y).unwrap(), &x).unwrap();
                    assert_eq!(r.eval_bool(&y).unwrap(), b.eval_bool(&full).unwrap());
                    if !prune {
                        assert_eq!(r.eval_matrix(&y).unwrap(), b.eval_matrix(&full).unwrap());
                    }
                }
            }
        }
    }
}
