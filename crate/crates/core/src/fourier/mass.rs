//! Fourier-mass functionals by exhaustive subset enumeration.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::BitSubset;
use crate::bp::BranchingProgram;
use crate::error::{Error, Result};
use crate::matrix::Mat;

use super::layered::LayeredFunction;
use super::wht::fwht;

/// Default cap on the number of coefficients one mass call may visit.
pub const SUBSET_BUDGET: u64 = 10_000_000;

/// Layers handled before the walk is split into parallel tasks.
const SPLIT_DEPTH: usize = 10;

pub const MASS_CSV_SCHEMA: &str = "# bpprg-mass v1";

#[derive(Clone, Debug, PartialEq)]
pub struct MassOptions {
    /// Highest level to enumerate; `None` means all levels.
    pub k_max: Option<usize>,
    pub p_list: Vec<f64>,
    /// Sum `|f̂[s]|` of the scalar function instead of `‖B̂[s]‖₂`.
    pub use_scalar: bool,
    pub subset_budget: u64,
}

impl Default for MassOptions {
    fn default() -> Self {
        MassOptions {
            k_max: None,
            p_list: Vec::new(),
            use_scalar: false,
            subset_budget: SUBSET_BUDGET,
        }
    }
}

impl MassOptions {
    pub fn levels(k_max: usize) -> Self {
        MassOptions {
            k_max: Some(k_max),
            ..Self::default()
        }
    }

    pub fn with_p(mut self, p_list: &[f64]) -> Self {
        self.p_list = p_list.to_vec();
        self
    }

    pub fn scalar(mut self) -> Self {
        self.use_scalar = true;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MassMode {
    Matrix,
    Scalar,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Damped {
    pub p: f64,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MassReport {
    pub n: usize,
    pub mode: MassMode,
    pub k_max: usize,
    /// `L^k` for `k = 0..=k_max`; entry 0 is `‖B̂[0]‖₂` (or `|f̂[0]|`).
    pub per_level: Vec<f64>,
    /// `L = Σ_{s≠0}`, accumulated separately from the levels.
    pub total: f64,
    pub damped: Vec<Damped>,
    /// `L^{≥k}` restricted to the enumerated levels.
    pub tail: Vec<f64>,
    /// False when `k_max < n`, so `total`, `damped` and `tail` cover only the enumerated levels.
    pub complete: bool,
}

impl MassReport {
    fn assemble(n: usize, mode: MassMode, per_level: Vec<f64>, total: f64, p_list: &[f64]) -> Self {
        let k_max = per_level.len() - 1;
        let damped = p_list
            .iter()
            .map(|&p| Damped {
                p,
                value: damped_mass(&per_level, p),
            })
            .collect();
        let mut tail = vec![0.0; per_level.len()];
        let mut acc = 0.0;
        for k in (0..per_level.len()).rev() {
            acc += per_level[k];
            tail[k] = acc;
        }
        MassReport {
            n,
            mode,
            k_max,
            per_level,
            total,
            damped,
            tail,
            complete: k_max >= n,
        }
    }

    /// `Σ_{k≥1} L^k`.
    pub fn level_sum(&self) -> f64 {
        self.per_level.iter().skip(1).sum()
    }

    pub fn level(&self, k: usize) -> f64 {
        self.per_level.get(k).copied().unwrap_or(0.0)
    }

    pub fn damped_at(&self, p: f64) -> f64 {
        damped_mass(&self.per_level, p)
    }

    /// Columns `k, L_k, cumulative, damped_<p>...`, after a schema comment line.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{MASS_CSV_SCHEMA} mode={:?} n={} complete={}", self.mode, self.n, self.complete);
        out.push_str("k,L_k,cumulative");
        for d in &self.damped {
            let _ = write!(out, ",damped_{}", d.p);
        }
        out.push('\n');
        let mut cumulative = 0.0;
        for (k, &l) in self.per_level.iter().enumerate() {
            if k > 0 {
                cumulative += l;
            }
            let _ = write!(out, "{k},{l:.17e},{cumulative:.17e}");
            for d in &self.damped {
                let partial: f64 = (1..=k).map(|j| d.p.powi(j as i32) * self.per_level[j]).sum();
                let _ = write!(out, ",{partial:.17e}");
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// `L_p = Σ_{k≥1} p^k L^k` over the given levels.
pub fn damped_mass(per_level: &[f64], p: f64) -> f64 {
    per_level.iter().enumerate().skip(1).map(|(k, l)| p.powi(k as i32) * l).sum()
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 0..k {
        c = c * (n - i) as u128 / (i + 1) as u128;
    }
    c
}

/// Number of subsets of `[n]` with at most `k_max` elements.
pub fn subsets_up_to(n: usize, k_max: usize) -> u128 {
    (0..=k_max.min(n)).map(|k| binomial(n, k)).sum()
}

pub fn mass(b: &BranchingProgram, opts: &MassOptions) -> Result<MassReport> {
    if opts.use_scalar {
        scalar_mass(b, opts)
    } else {
        layered_mass(&LayeredFunction::from_bp(b), opts)
    }
}

/// Matrix-mode mass of any layered function (averaged layers allowed).
pub fn layered_mass(f: &LayeredFunction, opts: &MassOptions) -> Result<MassReport> {
    if opts.use_scalar {
        return Err(Error::InvalidParams("scalar mode needs a Boolean program".into()));
    }
    let n = f.len();
    let k_max = opts.k_max.unwrap_or(n).min(n);
    let needed = subsets_up_to(n, k_max);
    if needed > opts.subset_budget as u128 {
        return Err(Error::BudgetExceeded {
            what: "subset enumeration",
            needed,
            budget: opts.subset_budget as u128,
        });
    }
    let (per_level, total) = level_walk(f, k_max);
    Ok(MassReport::assemble(n, MassMode::Matrix, per_level, total, &opts.p_list))
}

/// Suffix products of the expectation coefficients: `suf[i] = Π_{j≥i} c0_j`.
fn suffix_expectations(f: &LayeredFunction) -> Vec<Mat> {
    let n = f.len();
    let mut suf = vec![Mat::identity(f.cols()); n + 1];
    for i in (0..n).rev() {
        suf[i] = f.layers()[i].coeff(false) * &suf[i + 1];
    }
    suf
}

struct Walk<'a> {
    f: &'a LayeredFunction,
    suf: Vec<Mat>,
    k_max: usize,
}

impl Walk<'_> {
    fn leaf(&self, depth: usize, k: usize, prefix: &Mat, levels: &mut [f64], total: &mut f64) {
        let norm = (prefix * &self.suf[depth]).spectral_norm();
        levels[k] += norm;
        if k > 0 {
            *total += norm;
        }
    }

    fn run(&self, depth: usize, k: usize, prefix: &Mat, levels: &mut [f64], total: &mut f64) {
        if depth == self.f.len() || k == self.k_max {
            self.leaf(depth, k, prefix, levels, total);
            return;
        }
        let layer = &self.f.layers()[depth];
        for bit in [false, true] {
            let next = prefix * layer.coeff(bit);
            if next.is_zero() {
                continue;
            }
            self.run(depth + 1, k + bit as usize, &next, levels, total);
        }
    }

    /// Prefixes at the split depth, in a fixed order.
    fn tasks(&self, depth: usize, k: usize, prefix: Mat, out: &mut Vec<(usize, usize, Mat)>) {
        if depth == self.f.len() || k == self.k_max || depth == SPLIT_DEPTH {
            out.push((depth, k, prefix));
            return;
        }
        let layer = &self.f.layers()[depth];
        for bit in [false, true] {
            let next = &prefix * layer.coeff(bit);
            if next.is_zero() {
                continue;
            }
            self.tasks(depth + 1, k + bit as usize, next, out);
        }
    }
}

/// Per-level sums of `‖F̂[s]‖₂` for `|s| ≤ k_max`, plus the separately
/// accumulated sum over `s ≠ 0`. Partial results are combined in a fixed
/// order, so the output does not depend on the thread count.
fn level_walk(f: &LayeredFunction, k_max: usize) -> (Vec<f64>, f64) {
    let walk = Walk {
        f,
        suf: suffix_expectations(f),
        k_max,
    };
    let mut tasks = Vec::new();
    walk.tasks(0, 0, f.base().clone(), &mut tasks);
    let partials: Vec<(Vec<f64>, f64)> = tasks
        .par_iter()
        .map(|(depth, k, prefix)| {
            let mut levels = vec![0.0; k_max + 1];
            let mut total = 0.0;
            walk.run(*depth, *k, prefix, &mut levels, &mut total);
            (levels, total)
        })
        .collect();
    let mut levels = vec![0.0; k_max + 1];
    let mut total = 0.0;
    for (l, t) in partials {
        for (a, b) in levels.iter_mut().zip(l) {
            *a += b;
        }
        total += t;
    }
    (levels, total)
}

/// `f̂[s]` for every `s`, indexed by the packed mask, via the fast transform.
pub fn scalar_spectrum(b: &BranchingProgram) -> Result<Vec<f64>> {
    let table = b.truth_table()?;
    let mut v: Vec<f64> = table.iter().map(|&t| if t { 1.0 } else { 0.0 }).collect();
    fwht(&mut v);
    let scale = (0.5f64).powi(b.len() as i32);
    v.iter_mut().for_each(|x| *x *= scale);
    Ok(v)
}

fn scalar_mass(b: &BranchingProgram, opts: &MassOptions) -> Result<MassReport> {
    let n = b.len();
    let k_max = opts.k_max.unwrap_or(n).min(n);
    let spec = scalar_spectrum(b)?;
    let mut per_level = vec![0.0; k_max + 1];
    let mut total = 0.0;
    for (s, v) in spec.iter().enumerate() {
        let k = s.count_ones() as usize;
        if k <= k_max {
            per_level[k] += v.abs();
            if s != 0 {
                total += v.abs();
            }
        }
    }
    Ok(MassReport::assemble(n, MassMode::Scalar, per_level, total, &opts.p_list))
}

/// `Σ_{|s|=k} ‖F̂[s]‖₂`.
pub fn level_mass(f: &LayeredFunction, k: usize) -> Result<f64> {
    Ok(layered_mass(f, &MassOptions::levels(k))?.level(k))
}

/// Every `(s, ‖F̂[s]‖₂)` with `|s| ≤ k_max`, sorted by `|s|` then by mask value.
pub fn matrix_spectrum(f: &LayeredFunction, k_max: usize, budget: u64) -> Result<Vec<(BitSubset, f64)>> {
    let n = f.len();
    let needed = subsets_up_to(n, k_max);
    if needed > budget as u128 || n > 64 {
        return Err(Error::BudgetExceeded {
            what: "spectrum dump",
            needed,
            budget: budget as u128,
        });
    }
    let suf = suffix_expectations(f);
    let mut out = Vec::new();
    fn rec(f: &LayeredFunction, suf: &[Mat], k_max: usize, depth: usize, s: u64, prefix: &Mat, out: &mut Vec<(u64, f64)>) {
        let k = s.count_ones() as usize;
        if depth == f.len() || k == k_max {
            out.push((s, (prefix * &suf[depth]).spectral_norm()));
            return;
        }
        let pos = f.order()[depth];
        for bit in [false, true] {
            let next = prefix * f.layers()[depth].coeff(bit);
            rec(f, suf, k_max, depth + 1, s | ((bit as u64) << pos), &next, out);
        }
    }
    rec(f, &suf, k_max, 0, 0, f.base(), &mut out);
    out.sort_by_key(|&(s, _)| (s.count_ones(), s));
    Ok(out.into_iter().map(|(s, v)| (BitSubset::from_u64(n, s), v)).collect())
}

/// `(hex mask, value)` rows sorted by `|s|` then mask, as CSV.
pub fn spectrum_csv(rows: &[(BitSubset, f64)]) -> String {
    let mut out = String::from("# bpprg-spectrum v1\ns,weight,value\n");
    for (s, v) in rows {
        let _ = writeln!(out, "{},{},{v:.17e}", s.to_hex(), s.count_ones());
    }
    out
}

/// The scalar spectrum as sorted `(s, f̂[s])` rows.
pub fn scalar_spectrum_rows(b: &BranchingProgram) -> Result<Vec<(BitSubset, f64)>> {
    let n = b.len();
    let spec = scalar_spectrum(b)?;
    let mut rows: Vec<(u64, f64)> = spec.into_iter().enumerate().map(|(s, v)| (s as u64, v)).collect();
    rows.sort_by_key(|&(s, _)| (s.count_ones(), s));
    Ok(rows.into_iter().map(|(s, v)| (BitSubset::from_u64(n, s), v)).collect())
}
