//! Instance sources: distribution files and named generators.

use std::f64::consts::SQRT_2;

use anyhow::{anyhow, bail, Context, Result};
use qdtest::harness::trial_rng;
use qdtest::oracles::{io, Distribution, SampleSpace};
use qdtest::reference::{
    gen_fourier_spike, gen_hadamard_code_uniform, gen_l1_lowerbound_pair, gen_l2_lowerbound_pair,
    gen_parity_uniform, gen_random_multiset_uniform, SubsetIndex,
};

use crate::args::Common;

pub const DEFAULT_CLOSENESS_N: usize = 8;
pub const DEFAULT_KWISE_N: usize = 4;

/// Generator stream index, kept away from the trial indices.
const GENERATOR_STREAM: u64 = u64::MAX;

pub struct Instance {
    pub name: String,
    pub p: Distribution,
    pub q: Option<Distribution>,
}

fn split_gen(spec: &str) -> (&str, Vec<&str>) {
    let mut parts = spec.split(':');
    let name = parts.next().unwrap_or_default();
    (name, parts.collect())
}

fn arg<T: std::str::FromStr>(args: &[&str], i: usize, what: &str) -> Result<Option<T>> {
    match args.get(i) {
        None => Ok(None),
        Some(s) => s
            .parse()
            .map(Some)
            .map_err(|_| anyhow!("cannot parse {what} from `{s}`")),
    }
}

fn no_extra_args(name: &str, args: &[&str], allowed: usize) -> Result<()> {
    if args.len() > allowed {
        bail!("generator `{name}` takes at most {allowed} argument(s)");
    }
    Ok(())
}

fn load(path: &std::path::Path) -> Result<Distribution> {
    io::load(path).with_context(|| format!("reading {}", path.display()))
}

/// Source of a closeness instance: two files, or a generator at size `n`.
pub fn closeness(common: &Common, eps: f64, nu: f64, n: Option<usize>) -> Result<Instance> {
    match (&common.generator, &common.dist, &common.dist2) {
        (Some(_), Some(_), _) | (Some(_), _, Some(_)) => {
            bail!("give either --gen or --dist/--dist2, not both")
        }
        (None, Some(a), Some(b)) => Ok(Instance {
            name: format!("{} vs {}", a.display(), b.display()),
            p: load(a)?,
            q: Some(load(b)?),
        }),
        (None, Some(_), None) | (None, None, Some(_)) => {
            bail!("closeness testing needs both --dist and --dist2")
        }
        (None, None, None) => bail!("no instance: give --gen NAME[:args] or --dist/--dist2"),
        (Some(spec), None, None) => {
            let n = n.or(common.n).unwrap_or(DEFAULT_CLOSENESS_N);
            let (p, q) = closeness_generator(spec, n, eps, nu, common.seed)?;
            Ok(Instance {
                name: spec.clone(),
                p,
                q: Some(q),
            })
        }
    }
}

fn closeness_generator(
    spec: &str,
    n: usize,
    eps: f64,
    nu: f64,
    seed: u64,
) -> Result<(Distribution, Distribution)> {
    let (name, args) = split_gen(spec);
    if n < 2 {
        bail!("closeness generators need --n ≥ 2");
    }
    let space = SampleSpace::Range { size: n };
    let pair = match name {
        "uniform" => {
            no_extra_args(name, &args, 0)?;
            let u = Distribution::uniform(space)?;
            (u.clone(), u)
        }
        "random" => {
            no_extra_args(name, &args, 0)?;
            let p = Distribution::random(space, &mut trial_rng(seed, GENERATOR_STREAM))?;
            (p.clone(), p)
        }
        "random-pair" => {
            no_extra_args(name, &args, 0)?;
            let mut rng = trial_rng(seed, GENERATOR_STREAM);
            (
                Distribution::random(space, &mut rng)?,
                Distribution::random(space, &mut rng)?,
            )
        }
        "l2-pair" => {
            no_extra_args(name, &args, 1)?;
            let e = arg(&args, 0, "ε′")?.unwrap_or((eps * SQRT_2).min(1.0));
            gen_l2_lowerbound_pair(n, e)?
        }
        "l1-pair" => {
            no_extra_args(name, &args, 1)?;
            let e = arg(&args, 0, "ε′")?.unwrap_or(eps.min(1.0));
            gen_l1_lowerbound_pair(n, e)?
        }
        "boundary" => {
            no_extra_args(name, &args, 0)?;
            gen_l2_lowerbound_pair(n, ((1.0 - nu) * eps * SQRT_2).min(1.0))?
        }
        "disjoint" => {
            no_extra_args(name, &args, 0)?;
            (
                Distribution::point_mass(space, 0)?,
                Distribution::point_mass(space, n - 1)?,
            )
        }
        other => bail!(
            "unknown closeness generator `{other}` \
             (uniform, random, random-pair, l2-pair[:ε′], l1-pair[:ε′], boundary, disjoint)"
        ),
    };
    Ok(pair)
}

/// Source of a k-wise instance: a file over `{0,1}ⁿ` (or a range of
/// power-of-two size, read as bitstrings) or a generator.
pub fn kwise(common: &Common, k: u32, n: Option<usize>) -> Result<Instance> {
    if common.dist2.is_some() {
        bail!("k-wise testing takes a single distribution; drop --dist2");
    }
    match (&common.generator, &common.dist) {
        (Some(_), Some(_)) => bail!("give either --gen or --dist, not both"),
        (None, None) => bail!("no instance: give --gen NAME[:args] or --dist"),
        (None, Some(path)) => {
            let p = load(path)?
                .to_bitstrings()
                .context("k-wise testing needs a distribution over {0,1}^n")?;
            Ok(Instance {
                name: path.display().to_string(),
                p,
                q: None,
            })
        }
        (Some(spec), None) => {
            let n = n.or(common.n).unwrap_or(DEFAULT_KWISE_N);
            Ok(Instance {
                name: spec.clone(),
                p: kwise_generator(spec, n, k, common.seed)?,
                q: None,
            })
        }
    }
}

fn parse_subset(n: u32, text: &str) -> Result<SubsetIndex> {
    let coords = text
        .split(['+', ','])
        .map(|c| c.trim().parse::<u32>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|_| anyhow!("cannot parse subset `{text}` (use e.g. 0+2)"))?;
    Ok(SubsetIndex::from_coordinates(n, &coords)?)
}

fn kwise_generator(spec: &str, n: usize, k: u32, seed: u64) -> Result<Distribution> {
    let (name, args) = split_gen(spec);
    let bits = u32::try_from(n)
        .ok()
        .filter(|b| (1..=20).contains(b))
        .ok_or_else(|| anyhow!("--n must lie in 1..=20 for k-wise instances"))?;
    let p = match name {
        "uniform" => {
            no_extra_args(name, &args, 0)?;
            Distribution::uniform(SampleSpace::Bitstring { bits })?
        }
        "spike" => {
            no_extra_args(name, &args, 2)?;
            let t = match args.first() {
                Some(text) => parse_subset(bits, text)?,
                None => {
                    let coords: Vec<u32> = (0..k.min(bits)).collect();
                    SubsetIndex::from_coordinates(bits, &coords)?
                }
            };
            let delta = arg(&args, 1, "δ")?.unwrap_or(0.6);
            gen_fourier_spike(bits, t, delta)?
        }
        "multiset" => {
            no_extra_args(name, &args, 1)?;
            let q = arg(&args, 0, "Q")?.unwrap_or(1usize << (bits - 1));
            gen_random_multiset_uniform(bits, q, &mut trial_rng(seed, GENERATOR_STREAM))?
        }
        "parity" => {
            no_extra_args(name, &args, 0)?;
            gen_parity_uniform(bits)?
        }
        "hadamard" => {
            no_extra_args(name, &args, 0)?;
            gen_hadamard_code_uniform(bits)?
        }
        other => bail!(
            "unknown k-wise generator `{other}` \
             (uniform, spike[:T[:δ]], multiset[:Q], parity, hadamard)"
        ),
    };
    Ok(p)
}
