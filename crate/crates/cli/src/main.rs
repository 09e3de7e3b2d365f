mod analysis;
mod lemma;
mod output;
mod prg;
mod program;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use output::Output;

/// Fourier analysis, samplers and a pseudorandom generator for width-3 branching programs.
#[derive(Parser, Debug)]
#[command(name = "bpprg", version, about)]
struct Cli {
    /// Directory for the JSON and CSV outputs.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Worker threads; results do not depend on this.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Every Fourier coefficient of a program.
    Spectrum(analysis::SpectrumArgs),
    /// Level masses L^k, total mass and damped masses.
    Mass(analysis::MassArgs),
    /// Mixing parameter and damped mass.
    Lambda(analysis::LambdaArgs),
    /// Run the generator.
    PrgGen(prg::GenArgs),
    /// Measure how well the generator fools a program.
    PrgTest(prg::TestArgs),
    /// Exact checks of the small-bias and almost k-wise samplers.
    SamplerVerify(prg::SamplerArgs),
    /// Check a structural lemma over a batch of generated instances.
    LemmaCheck(lemma::LemmaArgs),
    /// Write a program from a named family.
    FamilyGen(analysis::FamilyGenArgs),
    /// L^k against the growth envelope, with the minimal constant.
    GrowthReport(analysis::GrowthArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Spectrum(_) => "spectrum",
            Command::Mass(_) => "mass",
            Command::Lambda(_) => "lambda",
            Command::PrgGen(_) => "prg-gen",
            Command::PrgTest(_) => "prg-test",
            Command::SamplerVerify(_) => "sampler-verify",
            Command::LemmaCheck(_) => "lemma-check",
            Command::FamilyGen(_) => "family-gen",
            Command::GrowthReport(_) => "growth-report",
        }
    }
}

/// `Ok(false)` means an invariant was violated.
fn run(cli: &Cli) -> Result<bool> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global()?;
    }
    let name = cli.command.name();
    let config = json!({ "command": name, "options": cli.command, "threads": cli.threads });
    let out = Output::new(&cli.out, config)?;
    match &cli.command {
        Command::Spectrum(a) => analysis::spectrum(a, &out),
        Command::Mass(a) => analysis::mass(a, &out),
        Command::Lambda(a) => analysis::lambda(a, &out),
        Command::PrgGen(a) => prg::gen(a, &out),
        Command::PrgTest(a) => prg::test(a, &out),
        Command::SamplerVerify(a) => prg::sampler_verify(a, &out),
        Command::LemmaCheck(a) => lemma::check(a, &out),
        Command::FamilyGen(a) => analysis::family_gen(a, &out),
        Command::GrowthReport(a) => analysis::growth(a, &out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
