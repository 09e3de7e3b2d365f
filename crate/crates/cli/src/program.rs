use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use bpprg::bp::{make_family, parse_bp, FamilySpec};
use bpprg::BranchingProgram;
use clap::{Args, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Tribes,
    Mod3,
    Xor,
    Dictator,
    Random3,
    RandomRegular2,
}

/// Where the program comes from: a file in the text format, or a named family.
#[derive(Args, Clone, Debug, Serialize)]
pub struct ProgramArgs {
    /// Program file in the JSON interchange format.
    #[arg(long, conflicts_with = "family")]
    pub bp: Option<PathBuf>,

    #[arg(long, value_enum)]
    pub family: Option<Family>,

    /// Length for mod3, xor, dictator, random3 and random-regular2.
    #[arg(long)]
    pub n: Option<usize>,

    /// Block size for tribes.
    #[arg(long)]
    pub m: Option<usize>,

    /// Dictator position.
    #[arg(long, default_value_t = 0)]
    pub i: usize,

    /// Fraction of random3 layers that start a chunk.
    #[arg(long, default_value_t = 0.25)]
    pub density: f64,

    /// Seed for random families.
    #[arg(long, default_value_t = 0)]
    pub family_seed: u64,
}

impl ProgramArgs {
    pub fn spec(&self) -> Result<FamilySpec> {
        let Some(family) = self.family else {
            bail!("give --bp FILE or --family NAME");
        };
        let n = || self.n.with_context(|| format!("--family {family:?} needs --n"));
        Ok(match family {
            Family::Tribes => FamilySpec::Tribes {
                m: self.m.context("--family tribes needs --m")?,
            },
            Family::Mod3 => FamilySpec::Mod3 { n: n()? },
            Family::Xor => FamilySpec::Xor { n: n()? },
            Family::Dictator => FamilySpec::Dictator { n: n()?, i: self.i },
            Family::Random3 => FamilySpec::Random3 {
                n: n()?,
                density: self.density,
            },
            Family::RandomRegular2 => FamilySpec::RandomRegular2 { n: n()? },
        })
    }

    pub fn load(&self) -> Result<BranchingProgram> {
        if let Some(path) = &self.bp {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            return Ok(parse_bp(&text)?);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.family_seed);
        Ok(make_family(&self.spec()?, &mut rng)?)
    }
}
