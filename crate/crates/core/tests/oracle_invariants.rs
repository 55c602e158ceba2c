use std::sync::Arc;

use proptest::prelude::*;
use qdtest::amplitude_estimation::{exact_amplitude, phase_distribution, AeConfig, UNITARY_LABEL};
use qdtest::ledger::QueryLedger;
use qdtest::oracles::{
    closeness_problem, from_discrete_oracle, from_pure_state_oracle, io, kwise_problem,
    make_purified_oracle, Distribution, GarbageStyle, PurifiedOracle, SampleSpace,
};
use qdtest::reference::{binom_sum, fourier_weight, lp_distance};
use qdtest::statevec::{hadamard, Sequence, StatePrep};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

fn pair(
    p: &Distribution,
    q: &Distribution,
    g: GarbageStyle,
    seed: u64,
) -> (PurifiedOracle, PurifiedOracle) {
    (
        make_purified_oracle(p, g, seed).unwrap().relabeled("p"),
        make_purified_oracle(q, g, seed + 1).unwrap().relabeled("q"),
    )
}

proptest! {
    #![proptest_config(config(40))]

    #[test]
    fn purification_invariant_holds(n in 1usize..20, seed in any::<u64>(), haar in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = Distribution::random(SampleSpace::Range { size: n }, &mut rng).unwrap();
        let g = if haar { GarbageStyle::Haar } else { GarbageStyle::Basis };
        let o = make_purified_oracle(&p, g, seed).unwrap();
        prop_assert!(o.invariant_defect().unwrap() < 1e-10);
    }

    #[test]
    fn closeness_mass_is_garbage_independent(n in 2usize..12, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let space = SampleSpace::Range { size: n };
        let p = Distribution::random(space, &mut rng).unwrap();
        let q = Distribution::random(space, &mut rng).unwrap();
        let d = lp_distance(&p, &q, 2).unwrap();
        for g in [GarbageStyle::Basis, GarbageStyle::Haar] {
            let (op, oq) = pair(&p, &q, g, seed);
            let mass = exact_amplitude(&closeness_problem(&op, &oq).unwrap()).unwrap();
            prop_assert!((mass - d * d / 4.0).abs() < 1e-10);
        }
    }

    #[test]
    fn kwise_mass_is_normalised_fourier_weight(n in 1u32..6, k in 1u32..4, seed in any::<u64>()) {
        let k = k.min(n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = Distribution::random(SampleSpace::Bitstring { bits: n }, &mut rng).unwrap();
        let o = make_purified_oracle(&p, GarbageStyle::Haar, seed).unwrap();
        let mass = exact_amplitude(&kwise_problem(&o, k).unwrap()).unwrap();
        let want = fourier_weight(&p, k).unwrap() / binom_sum(n, k).unwrap() as f64;
        prop_assert!((mass - want).abs() < 1e-10);
    }

    #[test]
    fn discrete_oracle_matches_preimage_counts(table in prop::collection::vec(0usize..6, 1..12)) {
        let o = from_discrete_oracle(&table, SampleSpace::Range { size: 6 }).unwrap();
        for (i, w) in o.distribution().weights().iter().enumerate() {
            let c = table.iter().filter(|&&v| v == i).count();
            prop_assert!((w - c as f64 / table.len() as f64).abs() < 1e-15);
        }
        prop_assert!(o.invariant_defect().unwrap() < 1e-10);
    }
}

#[test]
fn ledger_counts_every_oracle_application() {
    let u = Distribution::uniform(SampleSpace::Range { size: 4 }).unwrap();
    let (op, oq) = pair(&u, &u, GarbageStyle::Basis, 0);
    let problem = closeness_problem(&op, &oq).unwrap();
    let mut ledger = QueryLedger::new();
    problem.prepared_state(&mut ledger).unwrap();
    for label in ["p", "q"] {
        let c = ledger.counts(label);
        assert_eq!((c.controlled_forward, c.controlled_inverse), (1, 1));
        assert_eq!((c.forward, c.inverse), (0, 0));
    }
    assert_eq!(ledger.counts(UNITARY_LABEL).forward, 1);

    let m = 9;
    let d = phase_distribution(&problem, &AeConfig::new(m)).unwrap();
    let u_counts = d.ledger.counts(UNITARY_LABEL);
    assert_eq!(u_counts.forward, 1);
    assert_eq!(u_counts.controlled_forward, m as u64 - 1);
    assert_eq!(u_counts.controlled_inverse, m as u64 - 1);
    // each U holds one forward and one inverse query to each oracle
    assert_eq!(d.ledger.oracle_totals().total(), 4 * (2 * m as u64 - 1));
}

#[test]
fn discrete_and_standard_oracles_give_same_closeness_mass() {
    let table = [0usize, 0, 1, 3, 3, 3, 2, 0];
    let a = from_discrete_oracle(&table, SampleSpace::Range { size: 4 }).unwrap();
    let b =
        from_discrete_oracle(&[1, 1, 2, 3, 0, 3, 2, 1], SampleSpace::Range { size: 4 }).unwrap();
    let d = lp_distance(a.distribution(), b.distribution(), 2).unwrap();
    let mass =
        exact_amplitude(&closeness_problem(&a.relabeled("p"), &b.relabeled("q")).unwrap()).unwrap();
    assert!((mass - d * d / 4.0).abs() < 1e-12);
}

#[test]
fn pure_state_oracle_feeds_the_closeness_encoding() {
    let v = Arc::new(Sequence::new("v").then(Arc::new(hadamard("B"))));
    let p = from_pure_state_oracle(v, 2).unwrap().relabeled("p");
    let w = StatePrep::new("w", vec!["B".into()], &[0.6, 0.8]).unwrap();
    let q = from_pure_state_oracle(Arc::new(w), 2)
        .unwrap()
        .relabeled("q");
    let d = lp_distance(p.distribution(), q.distribution(), 2).unwrap();
    let mass = exact_amplitude(&closeness_problem(&p, &q).unwrap()).unwrap();
    assert!((mass - d * d / 4.0).abs() < 1e-12);
    assert!((q.distribution().weights()[1] - 0.64).abs() < 1e-12);
}

#[test]
fn json_file_round_trip_preserves_encoding() {
    let p = Distribution::over_bitstrings(2, vec![0.1, 0.2, 0.3, 0.4]).unwrap();
    let text = io::to_json(&p);
    let back = io::parse_json(&text).unwrap();
    assert_eq!(p, back);
}
