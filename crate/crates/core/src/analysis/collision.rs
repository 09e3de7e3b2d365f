//! Relabelling edges so that every 0-edge leads to the likelier-to-accept vertex.

use crate::bp::BranchingProgram;
use crate::error::Result;

/// Acceptance probability from every vertex, per vertex layer.
pub fn acceptance_probabilities(b: &BranchingProgram) -> Vec<Vec<f64>> {
    let mut q = vec![b.accept_indicator()];
    for layer in b.layers().iter().rev() {
        let next = q.last().unwrap();
        let cur = (0..layer.width_in()).map(|u| (next[layer.next0()[u]] + next[layer.next1()[u]]) / 2.0).collect();
        q.push(cur);
    }
    q.reverse();
    q
}

/// Rank of each vertex: 0 is the highest acceptance probability, ties go to the lower index.
fn ranks(q: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..q.len()).collect();
    idx.sort_by(|&a, &b| q[b].total_cmp(&q[a]).then(a.cmp(&b)));
    let mut rank = vec![0; q.len()];
    for (r, &v) in idx.iter().enumerate() {
        rank[v] = r;
    }
    rank
}

/// Swaps the labels out of every vertex whose 0-edge leads to a lower-ranked
/// vertex than its 1-edge. Acceptance probabilities do not depend on labels,
/// so applying this twice changes nothing more.
pub fn collision_flip(b: &BranchingProgram) -> Result<BranchingProgram> {
    let q = acceptance_probabilities(b);
    let layers = b
        .layers()
        .iter()
        .enumerate()
        .map(|(i, layer)| {
            let rank = ranks(&q[i + 1]);
            let swap: Vec<bool> = (0..layer.width_in()).map(|u| rank[layer.next0()[u]] > rank[layer.next1()[u]]).collect();
            layer.with_labels_swapped(&swap)
        })
        .collect();
    b.replace_layers(layers)
}
