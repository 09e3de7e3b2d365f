use anyhow::Result;
use bpprg::analysis::{
    charge_partition, collision_flip, ensemble, interwoven_mass_check, lemma_p, sum_product_decompose, ChunkRule, EnsembleKind, EnsembleSpec,
    DEFAULT_MIN_LAMBDA,
};
use bpprg::bp::{families, serialize_bp};
use bpprg::fourier::{lambda, mass, scalar_spectrum, MassOptions};
use bpprg::samplers::{chernoff_check, AlmostKWiseSpec, BitSampler, UniformBits};
use bpprg::{BitSubset, BranchingProgram};
use clap::{Args, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::output::{csv, Output};
use crate::prg::verdict;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Check {
    Interwoven,
    Charge,
    Sumproduct,
    Collision,
    Lambdalp,
    Chernoff,
}

#[derive(Args, Debug, Serialize)]
pub struct LemmaArgs {
    #[arg(value_enum)]
    pub check: Check,

    /// Generated instances.
    #[arg(long, default_value_t = 200)]
    pub trials: u64,

    /// Largest program length.
    #[arg(long, default_value_t = 12)]
    pub maxn: usize,

    /// Root seed; instance `i` uses stream `i`.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Interwoven groups, or the field degree for the chernoff sampler.
    #[arg(long)]
    pub m: Option<usize>,

    /// Level for interwoven, non-regular layers for ensembles, independence for chernoff.
    #[arg(long)]
    pub k: Option<usize>,

    /// Sampler length for chernoff.
    #[arg(long, default_value_t = 20)]
    pub n: usize,

    /// Bits per output bit for the chernoff sampler; 0 means fair independent bits.
    #[arg(long, default_value_t = 0)]
    pub d: u32,

    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
}

/// One instance's outcome. `value` is the slack of the checked inequality.
#[derive(Serialize)]
struct Row {
    index: u64,
    n: usize,
    k: usize,
    skipped: bool,
    ok: bool,
    value: f64,
    #[serde(skip)]
    program: Option<BranchingProgram>,
}

impl Row {
    fn new(index: u64, b: &BranchingProgram, k: usize, ok: bool, value: f64) -> Row {
        Row {
            index,
            n: b.len(),
            k,
            skipped: false,
            ok,
            value,
            program: (!ok).then(|| b.clone()),
        }
    }

    fn skipped(index: u64, b: &BranchingProgram, k: usize) -> Row {
        Row {
            skipped: true,
            ..Row::new(index, b, k, true, 0.0)
        }
    }
}

fn stream(root: u64, i: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(root);
    r.set_stream(i);
    r
}

/// Width-3 program with width-2 ends: mixing, leaky two-track or pseudomixing by `i mod 3`.
fn ensemble_instance(a: &LemmaArgs, i: u64) -> Result<(usize, BranchingProgram)> {
    let mut r = stream(a.seed, i);
    let k = a.k.unwrap_or_else(|| r.gen_range(1..=4));
    let n = r.gen_range(k.max(2)..=a.maxn.max(k.max(2)));
    let kind = match i % 3 {
        0 => EnsembleKind::Mixing,
        1 => EnsembleKind::TwoTrack { leak: 0.5 },
        _ => EnsembleKind::TwoTrack { leak: 0.0 },
    };
    Ok((k, ensemble::generate(&EnsembleSpec { kind, n, k }, &mut r)?))
}

fn first_order(b: &BranchingProgram) -> Result<f64> {
    let spec = scalar_spectrum(b)?;
    Ok((0..b.len()).map(|i| spec[1 << i].abs()).sum())
}

fn instance(a: &LemmaArgs, i: u64) -> Result<Row> {
    match a.check {
        Check::Interwoven => {
            let mut r = stream(a.seed, i);
            let n = r.gen_range(6.min(a.maxn)..=a.maxn);
            let b = families::random3(n, 0.5, &mut r)?;
            let m = a.m.unwrap_or_else(|| r.gen_range(2..=4));
            let k = a.k.unwrap_or_else(|| r.gen_range(1..=2));
            let rep = interwoven_mass_check(&b, m, k, ChunkRule::default(), 1000, i)?;
            Ok(Row::new(i, &b, k, rep.pass, rep.rhs - rep.lhs))
        }
        Check::Charge => {
            let (k, d) = ensemble_instance(a, i)?;
            if lambda(&d) < DEFAULT_MIN_LAMBDA {
                return Ok(Row::skipped(i, &d, k));
            }
            let prof = charge_partition(&d)?;
            let sums = prof.charges.iter().all(|c| c.iter().sum::<f64>() == 0.0);
            let monotone = prof.total.windows(2).all(|t| t[1] <= t[0]);
            let slack = (2 * k + 1) as f64 - prof.crossing_count() as f64;
            Ok(Row::new(i, &d, k, sums && monotone && slack >= 0.0, slack))
        }
        Check::Sumproduct => {
            let (k, d) = ensemble_instance(a, i)?;
            if lambda(&d) < DEFAULT_MIN_LAMBDA {
                return Ok(Row::skipped(i, &d, k));
            }
            let form = sum_product_decompose(&d, DEFAULT_MIN_LAMBDA)?;
            let n = d.len();
            let mut bad = 0u64;
            for x in 0..1u64 << n {
                let x = BitSubset::from_u64(n, x);
                bad += (form.eval(&x)? != d.eval_bool(&x)? as u32) as u64;
            }
            Ok(Row::new(i, &d, k, bad == 0, if bad == 0 { 0.0 } else { -(bad as f64) }))
        }
        Check::Collision => {
            let mut r = stream(a.seed, i);
            let n = r.gen_range(1..=a.maxn);
            let w = r.gen_range(2..=4);
            let order = families::random_order(n, &mut r);
            let b = families::random_program(&vec![w; n + 1], &mut r)?.with_order(order)?;
            let f = collision_flip(&b)?;
            let collides = f.layers().iter().all(|l| l.is_trivial() || l.has_collision());
            let gain = first_order(&f)? - first_order(&b)?;
            let idempotent = collision_flip(&f)? == f;
            Ok(Row::new(i, &b, 0, collides && idempotent && gain >= -1e-12, gain))
        }
        Check::Lambdalp => {
            let (k, d) = ensemble_instance(a, i)?;
            let lp = mass(&d, &MassOptions::default().with_p(&[lemma_p(k)]))?.damped[0].value;
            let slack = 1.0 - lambda(&d) - lp;
            Ok(Row::new(i, &d, k, slack >= 0.0, slack))
        }
        Check::Chernoff => unreachable!("handled separately"),
    }
}

fn chernoff(a: &LemmaArgs, out: &Output) -> Result<bool> {
    let sampler: Box<dyn BitSampler> = if a.d == 0 {
        Box::new(UniformBits { n: a.n })
    } else {
        let k = a.k.unwrap_or(2);
        Box::new(AlmostKWiseSpec::new(a.n, a.d, k, a.m.unwrap_or(10) as u32)?)
    };
    let r = chernoff_check(sampler.as_ref(), a.alpha, a.k, a.trials, a.seed)?;
    println!("tail {:.6}, bound {:.6e} ({}): {}", r.tail, r.bound, if r.exhaustive { "exhaustive" } else { "sampled" }, verdict(r.pass));
    let row = format!("{},{},{},{},{:.17e},{:.17e},{:.17e},{},{}", r.n, r.k, r.alpha, r.mu, r.tail, r.bound, r.sigma, r.exhaustive, r.pass);
    out.write("lemma-check-chernoff", &r, &csv("chernoff", "n,k,alpha,mu,tail,bound,sigma,exhaustive,pass", [row]))?;
    Ok(r.pass)
}

pub fn check(a: &LemmaArgs, out: &Output) -> Result<bool> {
    if a.check == Check::Chernoff {
        return chernoff(a, out);
    }
    let rows: Vec<Row> = (0..a.trials).into_par_iter().map(|i| instance(a, i)).collect::<Result<_>>()?;
    let checked = rows.iter().filter(|r| !r.skipped).count();
    let failures: Vec<&Row> = rows.iter().filter(|r| !r.ok).collect();
    let min_slack = rows.iter().filter(|r| !r.skipped).map(|r| r.value).fold(f64::INFINITY, f64::min);
    let name = format!("{:?}", a.check).to_lowercase();
    println!("{name}: {checked} checked, {} skipped, {} violations, min slack {min_slack:.6e}", rows.len() - checked, failures.len());
    if let Some(first) = failures.first() {
        let text = serialize_bp(first.program.as_ref().expect("failing rows keep their program"));
        eprintln!("first violation at instance {} (seed {}):\n{text}", first.index, a.seed);
        out.write_text(&format!("lemma-check-{name}-failure.bp.json"), &text)?;
    }
    let table = csv(
        &format!("lemma-{name}"),
        "index,n,k,skipped,ok,slack",
        rows.iter().map(|r| format!("{},{},{},{},{},{:.17e}", r.index, r.n, r.k, r.skipped, r.ok, r.value)),
    );
    let result = json!({
        "check": name,
        "checked": checked,
        "skipped": rows.len() - checked,
        "violations": failures.len(),
        "min_slack": min_slack,
        "instances": rows,
    });
    out.write(&format!("lemma-check-{name}"), &result, &table)?;
    println!("{}", verdict(failures.is_empty()));
    Ok(failures.is_empty())
}
