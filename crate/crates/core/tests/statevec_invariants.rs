use std::sync::Arc;

use approx::assert_abs_diff_eq;
use proptest::prelude::*;
use qdtest::ledger::QueryLedger;
use qdtest::oracles::haar_unitary;
use qdtest::statevec::{
    apply, dense_matrix_of, hadamard, max_unitarity_defect, ApplyMode, Condition, Controlled,
    FourierTransform, LocalUnitary, QuantumOp, RegisterLayout, Sequence, SharedOp, StatePrep,
    StateVector, XorFunction,
};
use qdtest::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Three registers `R0 (d0), R1 (d1), Q (2)` and a random circuit on them.
fn random_circuit(d0: usize, d1: usize, seed: u64) -> (RegisterLayout, Sequence) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let layout = RegisterLayout::new([("R0", d0), ("R1", d1), ("Q", 2)]).unwrap();
    let g = LocalUnitary::new("g", vec!["R0".into()], d0, haar_unitary(d0, &mut rng)).unwrap();
    let mut target: Vec<f64> = (0..d1).map(|_| rng.random::<f64>() + 0.01).collect();
    let norm = target.iter().map(|x| x * x).sum::<f64>().sqrt();
    target.iter_mut().for_each(|x| *x /= norm);
    let prep = StatePrep::new("prep", vec!["R1".into()], &target).unwrap();
    let table: Vec<usize> = (0..d0).map(|_| rng.random_range(0..2)).collect();
    let xor = XorFunction::new("f", vec!["R0".into()], vec!["Q".into()], table);
    let pair = LocalUnitary::new(
        "pair",
        vec!["R1".into(), "Q".into()],
        2 * d1,
        haar_unitary(2 * d1, &mut rng),
    )
    .unwrap();
    let inner =
        LocalUnitary::new("inner", vec!["R1".into()], d1, haar_unitary(d1, &mut rng)).unwrap();
    let seq = Sequence::new("circuit")
        .then(Arc::new(g))
        .then(Arc::new(hadamard("Q")))
        .then(Arc::new(prep))
        .then(Arc::new(xor))
        .then(Arc::new(FourierTransform::new("R0", d0)))
        .then(Arc::new(Controlled::new(
            "Q",
            Condition::Equals(1),
            Arc::new(inner) as SharedOp,
        )))
        .then_inverse(Arc::new(pair));
    (layout, seq)
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 48,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn circuits_preserve_norm_and_invert(d0 in 1usize..6, d1 in 1usize..5, seed in any::<u64>()) {
        let (layout, circuit) = random_circuit(d0, d1, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
        let start = StateVector::random(layout, &mut rng);
        let mut s = start.clone();
        let mut ledger = QueryLedger::new();
        apply(&circuit, &mut s, ApplyMode::Forward, &mut ledger).unwrap();
        prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
        apply(&circuit, &mut s, ApplyMode::Inverse, &mut ledger).unwrap();
        prop_assert!(s.max_abs_diff(&start) < 1e-10);
    }

    #[test]
    fn dense_matrix_is_unitary_and_matches_application(d0 in 1usize..5, d1 in 1usize..4, seed in any::<u64>()) {
        let (layout, circuit) = random_circuit(d0, d1, seed);
        let u = dense_matrix_of(&circuit, &layout, 4096).unwrap();
        prop_assert!(max_unitarity_defect(&u) < 1e-10);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 2);
        let start = StateVector::random(layout, &mut rng);
        let mut s = start.clone();
        apply(&circuit, &mut s, ApplyMode::Forward, &mut QueryLedger::new()).unwrap();
        let dim = start.amplitudes().len();
        for i in 0..dim {
            let want: C64 = (0..dim).map(|j| u[(i, j)] * start.amplitudes()[j]).sum();
            prop_assert!((want - s.amplitudes()[i]).norm() < 1e-10);
        }
    }

    #[test]
    fn controlled_ops_act_only_on_their_block(d in 2usize..6, v in 0usize..6, seed in any::<u64>()) {
        let v = v % d;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let layout = RegisterLayout::new([("C", d), ("T", 3)]).unwrap();
        let inner: SharedOp = Arc::new(
            LocalUnitary::new("u", vec!["T".into()], 3, haar_unitary(3, &mut rng)).unwrap(),
        );
        for cond in [Condition::Equals(v), Condition::AtLeast(v)] {
            let op = Controlled::new("C", cond, inner.clone());
            let m = dense_matrix_of(&op, &layout, 4096).unwrap();
            let u = dense_matrix_of(inner.as_ref(), &RegisterLayout::new([("T", 3)]).unwrap(), 16).unwrap();
            for c in 0..d {
                for c2 in 0..d {
                    for a in 0..3 {
                        for b in 0..3 {
                            let got = m[(c * 3 + a, c2 * 3 + b)];
                            let want = if c != c2 {
                                C64::default()
                            } else if cond.holds(c) {
                                u[(a, b)]
                            } else if a == b {
                                C64::new(1.0, 0.0)
                            } else {
                                C64::default()
                            };
                            prop_assert!((got - want).norm() < 1e-12);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn measurement_collapses_to_outcome(d0 in 1usize..5, d1 in 1usize..4, seed in any::<u64>()) {
        let (layout, circuit) = random_circuit(d0, d1, seed);
        let mut s = StateVector::new_basis_state(layout);
        apply(&circuit, &mut s, ApplyMode::Forward, &mut QueryLedger::new()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let before = s.marginal_probabilities("R1").unwrap();
        let outcome = s.measure("R1", &mut rng).unwrap();
        prop_assert!(before[outcome] > 0.0);
        let after = s.marginal_probabilities("R1").unwrap();
        prop_assert!((after[outcome] - 1.0).abs() < 1e-10);
        prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
    }
}

#[test]
fn controlled_mode_matches_controlled_wrapper() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let layout = RegisterLayout::new([("c", 2), ("t", 4)]).unwrap();
    let u = LocalUnitary::new("u", vec!["t".into()], 4, haar_unitary(4, &mut rng)).unwrap();
    let start = StateVector::random(layout, &mut rng);
    let mut a = start.clone();
    let mut b = start.clone();
    let mut ledger = QueryLedger::new();
    apply(
        &u,
        &mut a,
        ApplyMode::Controlled {
            control: "c".into(),
            inverse: true,
        },
        &mut ledger,
    )
    .unwrap();
    let wrapped = Controlled::new("c", Condition::Equals(1), Arc::new(u.clone()) as SharedOp);
    apply(&wrapped, &mut b, ApplyMode::Inverse, &mut ledger).unwrap();
    assert!(a.max_abs_diff(&b) < 1e-12);
    assert_abs_diff_eq!(a.norm_sqr(), 1.0, epsilon = 1e-12);
}

#[test]
fn large_states_round_trip_through_chunked_kernels() {
    // 2^16 amplitudes crosses the kernel's parallel threshold
    let layout = RegisterLayout::new([("A", 256), ("B", 256)]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let start = StateVector::random(layout, &mut rng);
    let op = Sequence::new("s")
        .then(Arc::new(FourierTransform::new("B", 256)))
        .then(Arc::new(XorFunction::copy(
            vec!["A".into()],
            vec!["B".into()],
            256,
        )));
    let mut s = start.clone();
    apply(&op, &mut s, ApplyMode::Forward, &mut QueryLedger::new()).unwrap();
    apply(&op, &mut s, ApplyMode::Inverse, &mut QueryLedger::new()).unwrap();
    assert!(s.max_abs_diff(&start) < 1e-10);
    assert_eq!(op.registers(), vec!["B".to_string(), "A".into()]);
}
