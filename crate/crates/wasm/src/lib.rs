//! Three operations for the demo page. Each returns a JSON string; the
//! `*_json` functions are the same operations without the JS boundary.

use bpprg::bp::families;
use bpprg::fourier::{lambda, mass, MassOptions};
use bpprg::prg::{derive_scaled, Overrides, Prg};
use bpprg::samplers::{exact_bias, SeedSource, SmallBiasSpec};
use bpprg::BranchingProgram;
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Largest program the page will analyse; the spectrum has `2^n` terms.
pub const MAX_N: usize = 16;

fn family(name: &str, size: usize) -> Result<BranchingProgram, String> {
    let b = match name {
        "tribes" => families::tribes(size),
        "mod3" => families::mod3(size),
        "xor" => families::xor(size),
        "dictator" => families::dictator(size, 0),
        other => return Err(format!("unknown family {other:?}")),
    }
    .map_err(|e| e.to_string())?;
    if b.len() > MAX_N {
        return Err(format!("{name}({size}) has {} bits; the demo stops at {MAX_N}", b.len()));
    }
    Ok(b)
}

pub fn spectrum_json(name: &str, size: usize, p: f64) -> Result<String, String> {
    let b = family(name, size)?;
    let matrix = mass(&b, &MassOptions::default().with_p(&[p])).map_err(|e| e.to_string())?;
    let scalar = mass(&b, &MassOptions::default().scalar().with_p(&[p])).map_err(|e| e.to_string())?;
    Ok(json!({
        "n": b.len(),
        "widths": b.widths(),
        "lambda": lambda(&b),
        "matrix": matrix.per_level,
        "scalar": scalar.per_level,
        "matrix_total": matrix.total,
        "scalar_total": scalar.total,
        "damped_matrix": matrix.damped[0].value,
        "damped_scalar": scalar.damped[0].value,
    })
    .to_string())
}

pub fn prg_json(n: usize, threshold: usize, m_t: u32, m_x: u32, seed: u32, count: u32) -> Result<String, String> {
    let o = Overrides {
        threshold: Some(threshold),
        m_t: Some(m_t),
        m_x: Some(m_x),
        ..Default::default()
    };
    let params = derive_scaled(1.0, 2.0, 3, n, 0.25, o).map_err(|e| e.to_string())?;
    let prg = Prg::new(params).map_err(|e| e.to_string())?;
    let mut outputs = Vec::new();
    for i in 0..count {
        let mut src = SeedSource::stream(((seed as u64) << 32) | i as u64);
        let (bits, trace) = prg.generate(&mut src).map_err(|e| e.to_string())?;
        outputs.push(json!({
            "bits": bits.to_string(),
            "ones": bits.count_ones(),
            "levels": trace.levels.iter().map(|l| l.n).collect::<Vec<_>>(),
            "zeroed_out": trace.zeroed_out(),
        }));
    }
    Ok(json!({ "seed_length": prg.seed_length(), "outputs": outputs }).to_string())
}

pub fn bias_json(n: usize, m: u32) -> Result<String, String> {
    if 2 * m > 20 || n > 16 {
        return Err("the demo enumerates seeds up to 2m = 20 bits and n up to 16".into());
    }
    let spec = SmallBiasSpec::new(n, m).map_err(|e| e.to_string())?;
    let (bias, s) = exact_bias(&spec).map_err(|e| e.to_string())?;
    Ok(json!({
        "bias": bias,
        "worst_test": format!("{s:0n$b}").chars().rev().collect::<String>(),
        "bound": spec.claimed_bias(),
        "seed_bits": spec.seed_len(),
    })
    .to_string())
}

#[wasm_bindgen]
pub fn spectrum(family: &str, size: usize, p: f64) -> Result<String, JsError> {
    spectrum_json(family, size, p).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn prg(n: usize, threshold: usize, m_t: u32, m_x: u32, seed: u32, count: u32) -> Result<String, JsError> {
    prg_json(n, threshold, m_t, m_x, seed, count).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn small_bias(n: usize, m: u32) -> Result<String, JsError> {
    bias_json(n, m).map_err(|e| JsError::new(&e))
}
