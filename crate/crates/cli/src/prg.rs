use anyhow::{bail, Result};
use bpprg::prg::{derive_params, derive_scaled, fool_test, FoolMode, Overrides, Prg, PrgParams};
use bpprg::samplers::{exact_bias, verify_kwise, AlmostKWiseSpec, SeedSource, SmallBiasSpec};
use clap::{Args, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::output::{csv, Output};
use crate::program::ProgramArgs;

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ParamMode {
    /// Every constraint as derived; usually far beyond desk scale.
    Rigorous,
    /// Derived values with the given overrides applied.
    Scaled,
}

#[derive(Args, Debug, Serialize)]
pub struct ParamArgs {
    /// Growth constants in L^k ≤ a·b^k.
    #[arg(long, default_value_t = 1.0)]
    pub a: f64,
    #[arg(long, default_value_t = 2.0)]
    pub b: f64,
    #[arg(long, default_value_t = 3)]
    pub w: usize,
    #[arg(long, default_value_t = 0.25)]
    pub eps: f64,
    #[arg(long, value_enum, default_value_t = ParamMode::Scaled)]
    pub mode: ParamMode,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub mu: Option<f64>,
    /// Lengths at or below this are output verbatim from the seed.
    #[arg(long)]
    pub threshold: Option<usize>,
    /// Field degree of the sampler choosing T.
    #[arg(long)]
    pub m_t: Option<u32>,
    /// Field degree of the small-bias source for the T positions.
    #[arg(long)]
    pub m_x: Option<u32>,
}

impl ParamArgs {
    pub fn params(&self, n: usize) -> Result<PrgParams> {
        Ok(match self.mode {
            ParamMode::Rigorous => derive_params(self.a, self.b, self.w, n, self.eps)?,
            ParamMode::Scaled => {
                let o = Overrides {
                    k: self.k,
                    delta: self.delta,
                    mu: self.mu,
                    threshold: self.threshold,
                    m_t: self.m_t,
                    m_x: self.m_x,
                };
                derive_scaled(self.a, self.b, self.w, n, self.eps, o)?
            }
        })
    }
}

#[derive(Args, Debug, Serialize)]
pub struct GenArgs {
    /// Output length.
    #[arg(long)]
    pub n: usize,

    #[command(flatten)]
    pub params: ParamArgs,

    /// Explicit seed, bit 0 in the low bit of the last digit.
    #[arg(long, conflicts_with = "seed")]
    pub seed_hex: Option<String>,

    /// Root of the seed stream; output `i` reads stream `i`.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[arg(long, default_value_t = 1)]
    pub count: u64,
}

pub fn gen(a: &GenArgs, out: &Output) -> Result<bool> {
    let prg = Prg::new(a.params.params(a.n)?)?;
    let mut outputs = Vec::new();
    let mut rows = Vec::new();
    if a.seed_hex.is_some() && a.count != 1 {
        bail!("--seed-hex gives exactly one output");
    }
    for i in 0..a.count {
        let mut seed = match &a.seed_hex {
            Some(h) => SeedSource::from_hex(h)?,
            None => {
                let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
                rng.set_stream(i);
                SeedSource::from_rng(rng)
            }
        };
        let (bits, trace) = prg.generate(&mut seed)?;
        rows.push(format!("{i},{bits},{},{},{}", trace.consumed, trace.levels.len(), trace.zeroed_out()));
        outputs.push(json!({ "index": i, "bits": bits.to_string(), "hex": bits.to_hex(), "trace": trace }));
    }
    println!("seed length {} bits", prg.seed_length());
    let result = json!({ "params": prg.params(), "plan": prg.plan(), "seed_length": prg.seed_length(), "outputs": outputs });
    out.write("prg-gen", &result, &csv("prg-gen", "index,bits,consumed,levels,zeroed_out", rows))?;
    Ok(true)
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FoolArg {
    Exact,
    Sampled,
}

#[derive(Args, Debug, Serialize)]
pub struct TestArgs {
    #[command(flatten)]
    pub program: ProgramArgs,

    #[command(flatten)]
    pub params: ParamArgs,

    #[arg(long, value_enum, default_value_t = FoolArg::Exact)]
    pub fool: FoolArg,

    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

pub fn test(a: &TestArgs, out: &Output) -> Result<bool> {
    let b = a.program.load()?;
    let params = a.params.params(b.len())?;
    let mode = match a.fool {
        FoolArg::Exact => FoolMode::Exact,
        FoolArg::Sampled => FoolMode::Sampled,
    };
    let r = fool_test(&b, &params, mode, a.trials, a.seed)?;
    println!("gap {:.6} (99% interval {:.6}..{:.6}), eps {}", r.gap, r.ci_low, r.ci_high, r.eps);
    println!("{}", r.note);
    let row = format!("{},{},{},{},{},{},{}", r.gap, r.ci_low, r.ci_high, r.eps, r.seed_len, r.seeds, r.zero_out_rate);
    out.write("prg-test", &json!({ "params": params, "report": r }), &csv("prg-test", "gap,ci_low,ci_high,eps,seed_len,seeds,zero_out_rate", [row]))?;
    Ok(true)
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplerKind {
    SmallBias,
    Kwise,
}

#[derive(Args, Debug, Serialize)]
pub struct SamplerArgs {
    #[arg(long, value_enum)]
    pub kind: SamplerKind,

    #[arg(long)]
    pub n: usize,

    /// Field degree of the small-bias generator.
    #[arg(long)]
    pub m: u32,

    /// Bits ANDed per output bit, so each bit is 1 with probability 2^-d.
    #[arg(long, default_value_t = 1)]
    pub d: u32,

    #[arg(long, default_value_t = 2)]
    pub k: usize,
}

pub fn sampler_verify(a: &SamplerArgs, out: &Output) -> Result<bool> {
    match a.kind {
        SamplerKind::SmallBias => {
            let spec = SmallBiasSpec::new(a.n, a.m)?;
            let (bias, s) = exact_bias(&spec)?;
            let pass = bias <= spec.claimed_bias();
            println!("bias {bias:.6} at s = {s:#x}, bound {:.6}: {}", spec.claimed_bias(), verdict(pass));
            let row = format!("{},{},{bias:.17e},{s},{:.17e},{pass}", a.n, a.m, spec.claimed_bias());
            out.write("sampler-verify", &json!({ "spec": spec, "bias": bias, "argmax": s, "pass": pass }), &csv("small-bias", "n,m,bias,argmax,bound,pass", [row]))?;
            Ok(pass)
        }
        SamplerKind::Kwise => {
            let spec = AlmostKWiseSpec::new(a.n, a.d, a.k, a.m)?;
            let r = verify_kwise(&spec)?;
            println!("distance {:.6}, bound {:.6}: {}", r.max_distance, r.bound, verdict(r.pass));
            let row = format!("{},{},{},{},{:.17e},{:.17e},{:.17e},{}", a.n, a.d, a.k, a.m, r.max_distance, r.max_distance_to_marginals, r.bound, r.pass);
            let table = csv("kwise", "n,d,k,m,max_distance,max_distance_to_marginals,bound,pass", [row]);
            out.write("sampler-verify", &json!({ "spec": spec, "report": r }), &table)?;
            Ok(r.pass)
        }
    }
}

pub fn verdict(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "FAIL"
    }
}
