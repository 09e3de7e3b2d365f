//! Writing a nearly non-mixing program as a sum of products of width-2 pieces.

use serde::Serialize;

use crate::bits::BitSubset;
use crate::bp::families::dictator_layer;
use crate::bp::{BranchingProgram, Layer};
use crate::error::{Error, Result};
use crate::fourier::lambda;

use super::charge::{charge_partition, ChargeProfile};

/// Default `λ` threshold below which the decomposition is refused.
pub const DEFAULT_MIN_LAMBDA: f64 = 0.99;

/// Largest number of nonzero terms produced before giving up.
pub const TERM_BUDGET: usize = 200_000;

/// One factor `f_{s,j}` and the input positions it reads, in its own read order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Factor {
    pub block: Vec<usize>,
    pub program: BranchingProgram,
    pub literal: bool,
}

impl Factor {
    pub fn eval(&self, x: &BitSubset) -> Result<bool> {
        let mut y = BitSubset::zeros(self.block.len());
        for (j, &pos) in self.block.iter().enumerate() {
            y.set(j, x.get(pos));
        }
        self.program.eval_bool(&y)
    }
}

/// A fixing: for each critical layer, the origin state and label of the edge taken.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Term {
    pub fixing: Vec<(usize, bool)>,
    pub factors: Vec<Factor>,
}

impl Term {
    pub fn eval(&self, x: &BitSubset) -> Result<bool> {
        for f in &self.factors {
            if !f.eval(x)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SumProductForm {
    pub critical_layers: Vec<usize>,
    /// `Π_{i∈Γ} 2·w_i`: every fixing, including those that no path realizes.
    pub fixings_total: u128,
    /// Fixings whose factors are not identically zero.
    pub terms: Vec<Term>,
    pub lambda: f64,
}

impl SumProductForm {
    pub fn eval(&self, x: &BitSubset) -> Result<u32> {
        let mut sum = 0;
        for t in &self.terms {
            sum += t.eval(x)? as u32;
        }
        Ok(sum)
    }
}

/// The width-≤2 program on one side of the partition running layers `lo..hi`
/// from `start` (a vertex of layer `lo`) into `accept` (vertices of layer `hi`).
/// `None` when no accepting vertex lies on that side.
fn gap_program(d: &BranchingProgram, prof: &ChargeProfile, lo: usize, hi: usize, start: usize, accept: &[usize]) -> Result<Option<BranchingProgram>> {
    let side = prof.in_q[lo][start];
    let members: Vec<Vec<usize>> = (lo..=hi).map(|j| (0..prof.in_q[j].len()).filter(|&v| prof.in_q[j][v] == side).collect()).collect();
    if let Some(j) = members.iter().position(|m| m.len() > 2) {
        return Err(Error::Precondition(format!("side of vertex layer {} has {} vertices", lo + j, members[j].len())));
    }
    let index = |j: usize, v: usize| members[j - lo].iter().position(|&u| u == v);
    let acc: Vec<usize> = accept.iter().filter_map(|&v| index(hi, v)).collect();
    if acc.is_empty() {
        return Ok(None);
    }
    if lo == hi {
        return Ok(accept.contains(&start).then(|| BranchingProgram::empty(1)));
    }
    let mut layers = Vec::with_capacity(hi - lo);
    for i in lo..hi {
        let l = d.layer(i);
        let map = |next: &[usize]| -> Result<Vec<usize>> {
            members[i - lo]
                .iter()
                .map(|&u| index(i + 1, next[u]).ok_or_else(|| Error::Precondition(format!("layer {i} crosses the partition"))))
                .collect()
        };
        layers.push(Layer::new(members[i + 1 - lo].len(), map(l.next0())?, map(l.next1())?)?);
    }
    let start = index(lo, start).expect("start is on its own side");
    Ok(Some(BranchingProgram::ordered(layers, start, acc)?))
}

fn literal(bit: bool) -> BranchingProgram {
    BranchingProgram::ordered(vec![dictator_layer()], 0, vec![bit as usize]).expect("valid dictator")
}

/// `Γ` is the set of non-regular and crossing layers. Each term fixes one edge
/// per critical layer; its factors alternate between a gap program and a
/// single-literal check, so a term has at most `2|Γ| + 1` factors.
pub fn sum_product_decompose(d: &BranchingProgram, min_lambda: f64) -> Result<SumProductForm> {
    if d.output_width() != 2 {
        return Err(Error::Precondition(format!("last vertex layer has width {}, need 2", d.output_width())));
    }
    let lam = lambda(d);
    if lam < min_lambda {
        return Err(Error::Precondition(format!("λ = {lam} is below {min_lambda}")));
    }
    let prof = charge_partition(d)?;
    let n = d.len();
    let critical: Vec<usize> = (0..n).filter(|&i| !d.layer(i).is_regular() || prof.is_crossing(i)).collect();
    let fixings_total = critical.iter().map(|&i| 2 * d.layer(i).width_in() as u128).product();

    let block = |lo: usize, hi: usize| -> Vec<usize> { (lo..hi).map(|i| d.order()[i]).collect() };
    let mut terms = Vec::new();
    // depth-first over fixings, dropping prefixes whose gap factor is identically zero
    let mut stack: Vec<(usize, usize, Vec<(usize, bool)>, Vec<Factor>)> = vec![(0, d.start(), Vec::new(), Vec::new())];
    while let Some((j, from, fixing, factors)) = stack.pop() {
        let lo = if j == 0 { 0 } else { critical[j - 1] + 1 };
        if j == critical.len() {
            if let Some(p) = gap_program(d, &prof, lo, n, from, d.accept())? {
                let mut factors = factors;
                factors.push(Factor {
                    block: block(lo, n),
                    program: p,
                    literal: false,
                });
                terms.push(Term { fixing, factors });
                if terms.len() > TERM_BUDGET {
                    return Err(Error::BudgetExceeded {
                        what: "sum-product terms",
                        needed: fixings_total,
                        budget: TERM_BUDGET as u128,
                    });
                }
            }
            continue;
        }
        let i = critical[j];
        let layer = d.layer(i);
        for u in (0..layer.width_in()).rev() {
            let Some(gap) = gap_program(d, &prof, lo, i, from, &[u])? else {
                continue;
            };
            for bit in [true, false] {
                let mut fx = fixing.clone();
                fx.push((u, bit));
                let mut fs = factors.clone();
                fs.push(Factor {
                    block: block(lo, i),
                    program: gap.clone(),
                    literal: false,
                });
                fs.push(Factor {
                    block: vec![d.order()[i]],
                    program: literal(bit),
                    literal: true,
                });
                stack.push((j + 1, layer.step(u, bit), fx, fs));
            }
        }
    }
    terms.sort_by(|a, b| a.fixing.cmp(&b.fixing));
    Ok(SumProductForm {
        critical_layers: critical,
        fixings_total,
        terms,
        lambda: lam,
    })
}
