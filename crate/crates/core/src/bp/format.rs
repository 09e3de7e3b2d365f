//! Text interchange format for branching programs.
//!
//! ```text
//! {
//!   "n": 2,
//!   "widths": [2, 2, 2],
//!   "start": 0,
//!   "accept": [0],
//!   "order": [0, 1],
//!   "layers": [
//!     {"next0": [0, 1], "next1": [1, 0]},
//!     {"next0": [0, 1], "next1": [1, 0]}
//!   ]
//! }
//! ```
//!
//! A length-0 program with a non-identity matrix also carries
//! `"entry": [..]`, and then `widths` lists its two boundary widths.

use std::fmt::Write as _;

use serde::Deserialize;

use crate::error::{Error, Result};

use super::layer::Layer;
use super::program::BranchingProgram;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProgram {
    n: usize,
    widths: Vec<usize>,
    start: usize,
    accept: Vec<usize>,
    order: Vec<usize>,
    layers: Vec<RawLayer>,
    #[serde(default)]
    entry: Option<Vec<usize>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLayer {
    next0: Vec<usize>,
    next1: Vec<usize>,
}

fn list(items: &[usize]) -> String {
    let parts: Vec<String> = items.iter().map(|v| v.to_string()).collect();
    format!("[{}]", parts.join(", "))
}

/// Canonical, byte-stable serialization.
pub fn serialize_bp(b: &BranchingProgram) -> String {
    let mut out = String::new();
    out.push_str("{\n");
    let _ = writeln!(out, "  \"n\": {},", b.len());
    let _ = writeln!(out, "  \"widths\": {},", list(&b.widths()));
    let _ = writeln!(out, "  \"start\": {},", b.start());
    let _ = writeln!(out, "  \"accept\": {},", list(b.accept()));
    let _ = writeln!(out, "  \"order\": {},", list(b.order()));
    if !b.entry_is_identity() {
        let _ = writeln!(out, "  \"entry\": {},", list(b.entry()));
    }
    if b.is_empty() {
        out.push_str("  \"layers\": []\n");
    } else {
        out.push_str("  \"layers\": [\n");
        for (i, layer) in b.layers().iter().enumerate() {
            let sep = if i + 1 == b.len() { "" } else { "," };
            let _ = writeln!(
                out,
                "    {{\"next0\": {}, \"next1\": {}}}{sep}",
                list(layer.next0()),
                list(layer.next1())
            );
        }
        out.push_str("  ]\n");
    }
    out.push_str("}\n");
    out
}

pub fn parse_bp(text: &str) -> Result<BranchingProgram> {
    let raw: RawProgram = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    if raw.layers.len() != raw.n {
        return Err(Error::Parse(format!("n = {} but {} layers given", raw.n, raw.layers.len())));
    }
    if let Some(entry) = raw.entry {
        if raw.n != 0 {
            return Err(Error::Parse("entry is only allowed for length-0 programs".into()));
        }
        let [w_in, w_out] = raw.widths[..] else {
            return Err(Error::Parse("a length-0 program with entry lists exactly two widths".into()));
        };
        if entry.len() != w_in {
            return Err(Error::Parse(format!("entry has {} states, widths[0] = {w_in}", entry.len())));
        }
        return BranchingProgram::constant(entry, w_out, raw.start, raw.accept);
    }
    if raw.widths.len() != raw.n + 1 {
        return Err(Error::Parse(format!(
            "widths lists {} vertex layers, expected n + 1 = {}",
            raw.widths.len(),
            raw.n + 1
        )));
    }
    if raw.n == 0 {
        let w = raw.widths[0];
        return BranchingProgram::constant((0..w).collect(), w, raw.start, raw.accept);
    }
    let mut layers = Vec::with_capacity(raw.n);
    for (i, rl) in raw.layers.into_iter().enumerate() {
        if rl.next0.len() != raw.widths[i] || rl.next1.len() != raw.widths[i] {
            let got = if rl.next0.len() != raw.widths[i] { rl.next0.len() } else { rl.next1.len() };
            return Err(if i == 0 {
                Error::InvalidLayer {
                    layer: 0,
                    reason: format!("has {got} input states but widths[0] = {}", raw.widths[0]),
                }
            } else {
                Error::Seam {
                    index: i - 1,
                    left: raw.widths[i],
                    right: got,
                }
            });
        }
        let layer = Layer::new(raw.widths[i + 1], rl.next0, rl.next1).map_err(|e| match e {
            Error::InvalidLayer { reason, .. } => Error::InvalidLayer { layer: i, reason },
            other => other,
        })?;
        layers.push(layer);
    }
    BranchingProgram::new(layers, raw.order, raw.start, raw.accept)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::BitSubset;
    use crate::bp::families;
    use crate::bp::restrict::restrict_fixed;

    #[test]
    fn round_trip_families() {
        for b in [
            families::xor(3).unwrap(),
            families::mod3(4).unwrap(),
            families::tribes(2).unwrap(),
            families::dictator(4, 1).unwrap(),
            families::mod3(3).unwrap().with_order(vec![2, 0, 1]).unwrap(),
        ] {
            let text = serialize_bp(&b);
            let back = parse_bp(&text).unwrap();
            assert_eq!(back, b);
            assert_eq!(serialize_bp(&back), text);
        }
    }

    #[test]
    fn round_trip_constant_program() {
        let b = families::mod3(3).unwrap();
        let r = restrict_fixed(&b, &BitSubset::zeros(3), &BitSubset::parse_bits("110").unwrap(), false).unwrap();
        let text = serialize_bp(&r);
        assert!(text.contains("\"entry\""));
        assert_eq!(parse_bp(&text).unwrap(), r);
    }

    #[test]
    fn seam_error_names_layer() {
        let text = r#"{"n": 2, "widths": [2, 2, 2], "start": 0, "accept": [0], "order": [0, 1],
            "layers": [{"next0": [0, 1], "next1": [1, 0]}, {"next0": [0, 1, 1], "next1": [1, 0, 0]}]}"#;
        assert!(matches!(parse_bp(text), Err(Error::Seam { index: 0, .. })));
    }

    #[test]
    fn permutation_error() {
        let text = r#"{"n": 2, "widths": [2, 2, 2], "start": 0, "accept": [0], "order": [1, 1],
            "layers": [{"next0": [0, 1], "next1": [1, 0]}, {"next0": [0, 1], "next1": [1, 0]}]}"#;
        assert!(matches!(parse_bp(text), Err(Error::BadPermutation { .. })));
    }

    #[test]
    fn out_of_range_state_names_layer() {
        let text = r#"{"n": 2, "widths": [2, 2, 2], "start": 0, "accept": [0], "order": [0, 1],
            "layers": [{"next0": [0, 1], "next1": [1, 0]}, {"next0": [0, 5], "next1": [1, 0]}]}"#;
        assert!(matches!(parse_bp(text), Err(Error::InvalidLayer { layer: 1, .. })));
    }

    #[test]
    fn malformed_text() {
        assert!(matches!(parse_bp("{not json"), Err(Error::Parse(_))));
    }
}
