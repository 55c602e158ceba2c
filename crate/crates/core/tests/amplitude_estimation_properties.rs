use std::f64::consts::PI;
use std::sync::Arc;

use proptest::prelude::*;
use qdtest::amplitude_estimation::{
    amplitude_estimation, dense_phase_distribution, exact_amplitude, phase_distribution,
    qpe_distribution, zero_tester, AeConfig, AmplitudeProblem, ZeroVerdict, UNITARY_LABEL,
};
use qdtest::harness::{frequency, run_trials};
use qdtest::oracles::{
    closeness_problem, make_purified_oracle, Distribution, GarbageStyle, SampleSpace,
};
use qdtest::par::Execution;
use qdtest::statevec::{LocalUnitary, Projector, RegisterLayout};
use qdtest::C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rotation(a: f64) -> AmplitudeProblem {
    let (c, s) = ((1.0 - a).sqrt(), a.sqrt());
    let u = LocalUnitary::new(
        "rot",
        vec!["q".into()],
        2,
        vec![
            C64::new(c, 0.0),
            C64::new(-s, 0.0),
            C64::new(s, 0.0),
            C64::new(c, 0.0),
        ],
    )
    .unwrap();
    AmplitudeProblem::new(
        RegisterLayout::new([("q", 2)]).unwrap(),
        Arc::new(u),
        Projector::new(vec![("q".into(), 1)]),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 24,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn fast_path_matches_dense_on_closeness(n in 2usize..5, t in 1usize..12, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let space = SampleSpace::Range { size: n };
        let p = Distribution::random(space, &mut rng).unwrap();
        let q = Distribution::random(space, &mut rng).unwrap();
        let problem = closeness_problem(
            &make_purified_oracle(&p, GarbageStyle::Haar, seed).unwrap().relabeled("p"),
            &make_purified_oracle(&q, GarbageStyle::Basis, 0).unwrap().relabeled("q"),
        )
        .unwrap();
        let cfg = AeConfig::new(t);
        let fast = phase_distribution(&problem, &cfg).unwrap();
        let dense = dense_phase_distribution(&problem, &cfg).unwrap();
        let analytic = qpe_distribution(exact_amplitude(&problem).unwrap(), t);
        for y in 0..t {
            prop_assert!((fast.probabilities[y] - dense.probabilities[y]).abs() < 1e-9);
            prop_assert!((fast.probabilities[y] - analytic[y]).abs() < 1e-9);
        }
        prop_assert_eq!(&fast.ledger, &dense.ledger);
    }

    #[test]
    fn phase_distribution_is_normalised(a in 0.0f64..1.0, t in 1usize..300) {
        let d = phase_distribution(&rotation(a), &AeConfig::new(t)).unwrap();
        prop_assert!((d.probabilities.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        prop_assert!(d.probabilities.iter().all(|p| *p >= 0.0));
    }
}

#[test]
fn sampled_phases_match_analytic_distribution() {
    for (a, m) in [(0.3, 16), (0.1, 32), (0.75, 13)] {
        let d = phase_distribution(&rotation(a), &AeConfig::new(m)).unwrap();
        let ys = run_trials(10_000, 17, Execution::Parallel, |_, rng| d.sample(rng).y);
        let mut empirical = vec![0.0; m];
        ys.iter().for_each(|&y| empirical[y] += 1e-4);
        let analytic = qpe_distribution(a, m);
        let tv: f64 = 0.5
            * empirical
                .iter()
                .zip(&analytic)
                .map(|(e, p)| (e - p).abs())
                .sum::<f64>();
        assert!(tv <= 0.02, "a = {a}, M = {m}: TV {tv}");
    }
}

#[test]
fn error_bound_coverage_at_point_three() {
    let (a, t) = (0.3, 128);
    let bound = 2.0 * PI * (a * (1.0f64 - a)).sqrt() / t as f64 + PI * PI / (t * t) as f64;
    let problem = rotation(a);
    let hits = run_trials(500, 23, Execution::Parallel, |_, rng| {
        (amplitude_estimation(&problem, t, rng).unwrap().estimate - a).abs() <= bound
    });
    assert!(frequency(&hits, |h| *h) >= 0.81 - 0.05);
}

#[test]
fn zero_tester_examples() {
    let eps = 0.01;
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    for _ in 0..100 {
        assert_eq!(
            zero_tester(&rotation(0.0), eps, &mut rng).unwrap().verdict,
            ZeroVerdict::Yes
        );
    }
    for a in [2.0 * eps, 5.0 * eps] {
        let problem = rotation(a);
        let verdicts = run_trials(300, 31, Execution::Parallel, |_, rng| {
            zero_tester(&problem, eps, rng).unwrap().verdict
        });
        assert!(
            frequency(&verdicts, |v| *v == ZeroVerdict::No) >= 0.75,
            "a = {a}"
        );
    }
}

#[test]
fn power_of_two_register_rounds_up() {
    let cfg = AeConfig::power_of_two(100);
    assert_eq!(cfg.m(), 128);
    let d = phase_distribution(&rotation(0.5), &AeConfig::power_of_two(5)).unwrap();
    assert_eq!(d.m, 8);
    let c = d.ledger.counts(UNITARY_LABEL);
    assert_eq!(c.forward + c.controlled_forward, 8);
    assert_eq!(c.inverse + c.controlled_inverse, 7);
}

#[test]
fn exact_amplitude_examples() {
    let u = Distribution::uniform(SampleSpace::Range { size: 4 }).unwrap();
    let a = Distribution::point_mass(SampleSpace::Range { size: 4 }, 0).unwrap();
    let b = Distribution::point_mass(SampleSpace::Range { size: 4 }, 3).unwrap();
    let oracle = |d: &Distribution, l: &str| {
        make_purified_oracle(d, GarbageStyle::Basis, 0)
            .unwrap()
            .relabeled(l)
    };
    let same = closeness_problem(&oracle(&u, "p"), &oracle(&u, "q")).unwrap();
    assert!(exact_amplitude(&same).unwrap().abs() < 1e-12);
    let disjoint = closeness_problem(&oracle(&a, "p"), &oracle(&b, "q")).unwrap();
    assert!((exact_amplitude(&disjoint).unwrap() - 0.5).abs() < 1e-12);
}
