use anyhow::Result;
use bpprg::analysis::growth_report;
use bpprg::bp::serialize_bp;
use bpprg::fourier::{self, matrix_spectrum, scalar_spectrum_rows, spectrum_csv, LayeredFunction, MassOptions, SUBSET_BUDGET};
use bpprg::BitSubset;
use clap::Args;
use serde::Serialize;
use serde_json::json;

use crate::output::{csv, Output};
use crate::program::ProgramArgs;

#[derive(Args, Debug, Serialize)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub program: ProgramArgs,

    /// Spectral norms of the matrix coefficients instead of the scalar function.
    #[arg(long)]
    pub matrix: bool,

    /// Highest level listed in matrix mode.
    #[arg(long)]
    pub k_max: Option<usize>,
}

fn rows_json(rows: &[(BitSubset, f64)]) -> Vec<serde_json::Value> {
    rows.iter().map(|(s, v)| json!({ "s": s.to_hex(), "weight": s.count_ones(), "value": v })).collect()
}

pub fn spectrum(a: &SpectrumArgs, out: &Output) -> Result<bool> {
    let b = a.program.load()?;
    let rows = if a.matrix {
        matrix_spectrum(&LayeredFunction::from_bp(&b), a.k_max.unwrap_or(b.len()), SUBSET_BUDGET)?
    } else {
        scalar_spectrum_rows(&b)?
    };
    out.write("spectrum", &rows_json(&rows), &spectrum_csv(&rows))?;
    Ok(true)
}

#[derive(Args, Debug, Serialize)]
pub struct MassArgs {
    #[command(flatten)]
    pub program: ProgramArgs,

    #[arg(long)]
    pub k_max: Option<usize>,

    /// Damping values, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub p: Vec<f64>,

    /// Use |f̂[s]| of the accept function instead of ‖B̂[s]‖₂.
    #[arg(long)]
    pub scalar: bool,
}

pub fn mass(a: &MassArgs, out: &Output) -> Result<bool> {
    let b = a.program.load()?;
    let mut opts = MassOptions::default().with_p(&a.p);
    opts.k_max = a.k_max;
    opts.use_scalar = a.scalar;
    let rep = fourier::mass(&b, &opts)?;
    println!("total mass {:.6} over levels 1..={}", rep.total, rep.k_max);
    out.write("mass", &rep, &rep.to_csv())?;
    Ok(true)
}

#[derive(Args, Debug, Serialize)]
pub struct LambdaArgs {
    #[command(flatten)]
    pub program: ProgramArgs,

    /// Damping values; defaults to the mixing-lemma value for the program's non-regular layer count.
    #[arg(long, value_delimiter = ',')]
    pub p: Vec<f64>,
}

#[derive(Serialize)]
struct LambdaReport {
    lambda: f64,
    widths: Vec<usize>,
    nonregular: usize,
    damped: Vec<(f64, f64)>,
}

pub fn lambda(a: &LambdaArgs, out: &Output) -> Result<bool> {
    let b = a.program.load()?;
    let nonregular = b.layers().iter().filter(|l| !l.is_regular()).count();
    let ps = if a.p.is_empty() { vec![bpprg::analysis::lemma_p(nonregular)] } else { a.p.clone() };
    let lam = fourier::lambda(&b);
    let rep = fourier::mass(&b, &MassOptions::default().with_p(&ps))?;
    let report = LambdaReport {
        lambda: lam,
        widths: b.widths(),
        nonregular,
        damped: rep.damped.iter().map(|d| (d.p, d.value)).collect(),
    };
    println!("lambda {lam:.12}");
    let rows = report.damped.iter().map(|(p, v)| format!("{p},{lam:.17e},{v:.17e},{:.17e}", lam + v));
    out.write("lambda", &report, &csv("lambda", "p,lambda,L_p,lambda_plus_L_p", rows))?;
    Ok(true)
}

#[derive(Args, Debug, Serialize)]
pub struct FamilyGenArgs {
    #[command(flatten)]
    pub program: ProgramArgs,
}

pub fn family_gen(a: &FamilyGenArgs, out: &Output) -> Result<bool> {
    let b = a.program.load()?;
    let rows = b.layers().iter().enumerate().map(|(i, l)| {
        let c = l.classify();
        format!(
            "{i},{},{},{},{},{},{}",
            b.order()[i],
            l.width_in(),
            l.width_out(),
            c.regular,
            c.trivial,
            c.has_collision
        )
    });
    let table = csv("layers", "layer,position,width_in,width_out,regular,trivial,collision", rows);
    out.write_text("family-gen.bp.json", &serialize_bp(&b))?;
    out.write("family-gen", &b, &table)?;
    Ok(true)
}

#[derive(Args, Debug, Serialize)]
pub struct GrowthArgs {
    #[command(flatten)]
    pub program: ProgramArgs,

    #[arg(long, default_value_t = 8)]
    pub k_max: usize,

    #[arg(long, value_delimiter = ',', default_value = "0.1,0.5,1")]
    pub p: Vec<f64>,
}

pub fn growth(a: &GrowthArgs, out: &Output) -> Result<bool> {
    let b = a.program.load()?;
    let rep = growth_report(&b, a.k_max, &a.p)?;
    println!("minimal C: matrix {:.4}, scalar {:.4}", rep.min_c_matrix, rep.min_c_scalar);
    println!("{}", rep.note);
    out.write("growth-report", &rep, &rep.to_csv())?;
    Ok(true)
}
