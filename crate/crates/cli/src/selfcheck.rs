//! Built-in invariant suites run by `qdtest selfcheck`.

use std::f64::consts::PI;
use std::sync::Arc;
use std::time::Instant;

use anyhow::Result;
use qdtest::amplitude_estimation::{dense_phase_distribution, phase_distribution, AeConfig};
use qdtest::harness::{trial_rng, trial_seed};
use qdtest::ledger::QueryLedger;
use qdtest::oracles::{
    closeness_problem, make_purified_oracle, Distribution, GarbageStyle, SampleSpace,
};
use qdtest::reference::{
    fourier_coefficient, fourier_spectrum, gen_parity_uniform, lp_distance, SubsetIndex,
};
use qdtest::statevec::{
    apply, dense_matrix_of, max_unitarity_defect, ApplyMode, FourierTransform, RegisterLayout,
    Sequence, StateVector, XorFunction, DEFAULT_DENSE_CAP,
};
use qdtest::testers::{prepare_kwise, prepare_l2, TesterOptions};

const TOL: f64 = 1e-9;
const SUCCESS: f64 = 2.0 / 3.0;

struct Check {
    name: &'static str,
    pass: bool,
    detail: String,
}

fn check(name: &'static str, pass: bool, detail: impl Into<String>) -> Check {
    Check {
        name,
        pass,
        detail: detail.into(),
    }
}

fn statevec(seed: u64, _fault: bool) -> Result<Vec<Check>> {
    let mut rng = trial_rng(seed, 0);
    let layout = RegisterLayout::new([("A", 8), ("B", 8)])?;
    let op = Sequence::new("circuit")
        .then(Arc::new(FourierTransform::new("B", 8)))
        .then(Arc::new(XorFunction::copy(
            vec!["B".into()],
            vec!["A".into()],
            8,
        )));
    let start = StateVector::random(layout.clone(), &mut rng);
    let mut s = start.clone();
    let mut ledger = QueryLedger::new();
    apply(&op, &mut s, ApplyMode::Forward, &mut ledger)?;
    let norm = (s.norm_sqr() - 1.0).abs();
    apply(&op, &mut s, ApplyMode::Inverse, &mut ledger)?;
    let round_trip = s.max_abs_diff(&start);
    let defect = max_unitarity_defect(&dense_matrix_of(&op, &layout, DEFAULT_DENSE_CAP)?);
    Ok(vec![
        check("norm preserved", norm < TOL, format!("{norm:.1e}")),
        check(
            "inverse round trip",
            round_trip < TOL,
            format!("{round_trip:.1e}"),
        ),
        check(
            "dense matrix unitary",
            defect < TOL,
            format!("{defect:.1e}"),
        ),
    ])
}

fn oracles(seed: u64, _fault: bool) -> Result<Vec<Check>> {
    let mut rng = trial_rng(seed, 1);
    let space = SampleSpace::Range { size: 6 };
    let p = Distribution::random(space, &mut rng)?;
    let q = Distribution::random(space, &mut rng)?;
    let op = make_purified_oracle(&p, GarbageStyle::Haar, trial_seed(seed, 10))?;
    let oq = make_purified_oracle(&q, GarbageStyle::Haar, trial_seed(seed, 11))?;
    let defect = op.invariant_defect()?.max(oq.invariant_defect()?);
    let problem = closeness_problem(&op.relabeled("p"), &oq.relabeled("q"))?;
    let mass = problem
        .projector
        .norm_sq(&problem.prepared_state(&mut QueryLedger::new())?)?;
    let d = lp_distance(&p, &q, 2)?;
    let err = (mass - d * d / 4.0).abs();
    Ok(vec![
        check(
            "purification invariant",
            defect < TOL,
            format!("{defect:.1e}"),
        ),
        check("closeness mass ‖p−q‖²/4", err < TOL, format!("{err:.1e}")),
    ])
}

fn amplitude_estimation(seed: u64, fault: bool) -> Result<Vec<Check>> {
    let mut rng = trial_rng(seed, 2);
    let space = SampleSpace::Range { size: 4 };
    let p = Distribution::random(space, &mut rng)?;
    let q = Distribution::random(space, &mut rng)?;
    let problem = closeness_problem(
        &make_purified_oracle(&p, GarbageStyle::Basis, 0)?.relabeled("p"),
        &make_purified_oracle(&q, GarbageStyle::Basis, 0)?.relabeled("q"),
    )?;
    let mut config = AeConfig::new(7);
    config.flip_marked_sign = fault;
    let fast = phase_distribution(&problem, &config)?;
    let dense = dense_phase_distribution(&problem, &config)?;
    let gap = fast
        .probabilities
        .iter()
        .zip(&dense.probabilities)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);

    let same = make_purified_oracle(&p, GarbageStyle::Basis, 0)?;
    let zero = closeness_problem(&same.relabeled("p"), &same.relabeled("q"))?;
    let at_zero = phase_distribution(&zero, &config)?.probabilities[0];

    let a = {
        let d = lp_distance(&p, &q, 2)?;
        d * d / 4.0
    };
    let theta = a.sqrt().asin() / PI;
    let m = config.m() as f64;
    let coverage = fast.probability_that(|e| (e.sqrt().asin() / PI - theta).abs() <= 1.0 / m);
    Ok(vec![
        check(
            "fast path matches dense circuit",
            gap < TOL,
            format!("{gap:.1e}"),
        ),
        check(
            "zero amplitude gives y = 0",
            (at_zero - 1.0).abs() < TOL,
            format!("P(y=0) = {at_zero:.3}"),
        ),
        check(
            "estimate within one phase step",
            coverage >= 8.0 / (PI * PI),
            format!("{coverage:.3}"),
        ),
    ])
}

fn testers(seed: u64, fault: bool) -> Result<Vec<Check>> {
    let opts = TesterOptions {
        flip_marked_sign: fault,
        ..TesterOptions::default()
    };
    let mut rng = trial_rng(seed, 3);
    let p = Distribution::random(SampleSpace::Range { size: 4 }, &mut rng)?;
    let o = make_purified_oracle(&p, GarbageStyle::Haar, trial_seed(seed, 12))?;
    let far = Distribution::point_mass(SampleSpace::Range { size: 4 }, 0)?;
    let of = make_purified_oracle(
        &Distribution::point_mass(SampleSpace::Range { size: 4 }, 3)?,
        GarbageStyle::Basis,
        0,
    )?;
    let close = prepare_l2(&o, &o, 0.2, &opts)?.acceptance_probability();
    let reject = 1.0
        - prepare_l2(
            &make_purified_oracle(&far, GarbageStyle::Basis, 0)?,
            &of,
            0.2,
            &opts,
        )?
        .acceptance_probability();
    let parity = make_purified_oracle(&gen_parity_uniform(4)?, GarbageStyle::Basis, 0)?;
    let yes = prepare_kwise(&parity, 3, 0.3, &opts)?.acceptance_probability();
    Ok(vec![
        check("ℓ² accepts p = p", close >= SUCCESS, format!("{close:.3}")),
        check(
            "ℓ² rejects disjoint supports",
            reject >= SUCCESS,
            format!("{reject:.3}"),
        ),
        check(
            "k-wise accepts 3-wise uniform parity",
            yes >= SUCCESS,
            format!("{yes:.3}"),
        ),
    ])
}

fn reference(seed: u64, _fault: bool) -> Result<Vec<Check>> {
    let mut rng = trial_rng(seed, 4);
    let p = Distribution::random(SampleSpace::Bitstring { bits: 5 }, &mut rng)?;
    let spectrum = fourier_spectrum(&p)?;
    let parseval = (spectrum.iter().map(|c| c * c).sum::<f64>()
        - 32.0 * p.weights().iter().map(|w| w * w).sum::<f64>())
    .abs();
    let mut worst = 0.0f64;
    for (mask, c) in spectrum.iter().enumerate() {
        worst = worst.max((fourier_coefficient(&p, SubsetIndex::new(5, mask)?)? - c).abs());
    }
    Ok(vec![
        check("Parseval", parseval < TOL, format!("{parseval:.1e}")),
        check(
            "fast transform matches direct sums",
            worst < TOL,
            format!("{worst:.1e}"),
        ),
    ])
}

type Suite = fn(u64, bool) -> Result<Vec<Check>>;

const SUITES: [(&str, Suite); 5] = [
    ("statevec", statevec),
    ("oracles", oracles),
    ("amplitude_estimation", amplitude_estimation),
    ("testers", testers),
    ("reference", reference),
];

/// Runs every suite, printing one line per check; true when all pass.
pub fn run(seed: u64, inject_fault: bool) -> bool {
    let mut all = true;
    for (name, suite) in SUITES {
        let start = Instant::now();
        let checks = suite(seed, inject_fault);
        let secs = start.elapsed().as_secs_f64();
        match checks {
            Ok(checks) => {
                let ok = checks.iter().all(|c| c.pass);
                all &= ok;
                println!(
                    "{name}: {} ({} checks, {secs:.3}s)",
                    if ok { "PASS" } else { "FAIL" },
                    checks.len()
                );
                for c in checks {
                    println!(
                        "  {} {} ({})",
                        if c.pass { "ok  " } else { "FAIL" },
                        c.name,
                        c.detail
                    );
                }
            }
            Err(e) => {
                all = false;
                println!("{name}: FAIL (error: {e:#}, {secs:.3}s)");
            }
        }
    }
    println!("selfcheck: {}", if all { "PASS" } else { "FAIL" });
    all
}
