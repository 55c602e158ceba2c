use std::sync::Arc;

use crate::amplitude_estimation::AmplitudeProblem;
use crate::ledger::QueryKind;
use crate::oracles::{PurifiedOracle, SampleSpace};
use crate::statevec::{
    controlled_z, hadamard, pauli_x, Condition, Controlled, Counted, Projector, QuantumOp,
    RegisterLayout, Sequence, SharedOp, StatePrep, XorFunction,
};
use crate::{Error, Result};

/// Register receiving the copied sample in `Ũ_p`.
pub const COPY_REGISTER: &str = "C";
/// Qubit selecting between `Ũ_p` and `Ũ_q` in the closeness encoding.
pub const CLOSENESS_CONTROL: &str = "D";

/// `|i⟩_B|j⟩_C → |i⟩_B|j ⊕ i⟩_C` on the oracle's sample registers.
pub fn u_copy(oracle: &PurifiedOracle) -> SharedOp {
    Arc::new(XorFunction::copy(
        oracle.sample_registers().to_vec(),
        vec![COPY_REGISTER.to_string()],
        oracle.sample_dim(),
    ))
}

/// `Ũ_p = U_p† · copy · U_p`, so that `⟨0,0,k|Ũ_p|0,0,0⟩ = p_k`.
pub fn u_tilde(oracle: &PurifiedOracle) -> SharedOp {
    let label = format!("U~_{}", oracle.label());
    let u: SharedOp = Arc::new(oracle.clone());
    let body = Sequence::new(label.clone())
        .then(u.clone())
        .then(u_copy(oracle))
        .then_inverse(u);
    Arc::new(Counted::new(label, QueryKind::Composite, Arc::new(body)))
}

fn check_compatible(p: &PurifiedOracle, q: &PurifiedOracle) -> Result<()> {
    if p.sample_registers() != q.sample_registers() || p.sample_dim() != q.sample_dim() {
        return Err(Error::SampleSpaceMismatch(format!(
            "sample registers {:?} (dim {}) vs {:?} (dim {})",
            p.sample_registers(),
            p.sample_dim(),
            q.sample_registers(),
            q.sample_dim()
        )));
    }
    if p.workspace_register() != q.workspace_register() || p.workspace_dim() != q.workspace_dim() {
        return Err(Error::SampleSpaceMismatch(format!(
            "workspace dimensions {} vs {}",
            p.workspace_dim(),
            q.workspace_dim()
        )));
    }
    if p.distribution().len() != q.distribution().len() {
        return Err(Error::SampleSpaceMismatch(format!(
            "distributions over {} vs {} elements",
            p.distribution().len(),
            q.distribution().len()
        )));
    }
    if p.label() == q.label() {
        return Err(Error::Parameter(format!(
            "both oracles carry the label `{}`",
            p.label()
        )));
    }
    Ok(())
}

/// `U = H_D · (|0⟩⟨0|_D ⊗ Ũ_p + |1⟩⟨1|_D ⊗ Ũ_q) · H_D · X_D`; with
/// `Π = |0⟩⟨0|_A ⊗ |0⟩⟨0|_B ⊗ |0⟩⟨0|_D` it satisfies
/// `‖Π U|0⟩‖² = ‖p − q‖₂² / 4`.
pub fn closeness_unitary(p: &PurifiedOracle, q: &PurifiedOracle) -> Result<SharedOp> {
    check_compatible(p, q)?;
    Ok(Arc::new(
        Sequence::new("closeness")
            .then(Arc::new(pauli_x(CLOSENESS_CONTROL)))
            .then(Arc::new(hadamard(CLOSENESS_CONTROL)))
            .then(Arc::new(Controlled::new(
                CLOSENESS_CONTROL,
                Condition::Equals(0),
                u_tilde(p),
            )))
            .then(Arc::new(Controlled::new(
                CLOSENESS_CONTROL,
                Condition::Equals(1),
                u_tilde(q),
            )))
            .then(Arc::new(hadamard(CLOSENESS_CONTROL))),
    ))
}

/// Closeness encoding together with its layout and projector.
pub fn closeness_problem(p: &PurifiedOracle, q: &PurifiedOracle) -> Result<AmplitudeProblem> {
    let unitary = closeness_unitary(p, q)?;
    let base = p.layout()?;
    let layout = base.concat(&RegisterLayout::new([
        (COPY_REGISTER, p.sample_dim()),
        (CLOSENESS_CONTROL, 2),
    ])?)?;
    let mut zeros: Vec<&str> = vec![p.workspace_register()];
    zeros.extend(p.sample_registers().iter().map(String::as_str));
    zeros.push(CLOSENESS_CONTROL);
    Ok(AmplitudeProblem {
        layout,
        unitary,
        projector: Projector::zeros(&zeros),
    })
}

/// Names of the subset qubits `S0..S{n-1}`.
pub fn subset_registers(n: u32) -> Vec<String> {
    (0..n).map(|i| format!("S{i}")).collect()
}

/// Number of non-empty subsets of `[n]` with at most `k` elements.
pub(crate) fn low_degree_count(n: u32, k: u32) -> usize {
    (1..=k.min(n) as usize)
        .map(|j| binomial(n as usize, j))
        .sum()
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Prepares `M^{-1/2} Σ_{1 ≤ |S| ≤ k} |S⟩` on the subset qubits. Subset `S`
/// is the bitmask whose bit `n−1−i` is set when `i ∈ S`.
pub fn v_k(n: u32, k: u32) -> Result<SharedOp> {
    if n == 0 || k == 0 || k > n {
        return Err(Error::Parameter(format!(
            "need 1 ≤ k ≤ n, got n = {n}, k = {k}"
        )));
    }
    let m = low_degree_count(n, k) as f64;
    let amp = 1.0 / m.sqrt();
    let target: Vec<f64> = (0..1usize << n)
        .map(|s| {
            let w = s.count_ones();
            if w >= 1 && w <= k {
                amp
            } else {
                0.0
            }
        })
        .collect();
    Ok(Arc::new(StatePrep::new(
        "V_k",
        subset_registers(n),
        &target,
    )?))
}

fn check_kwise(oracle: &PurifiedOracle) -> Result<u32> {
    match oracle.distribution().space() {
        SampleSpace::Bitstring { bits } if oracle.sample_registers().len() == bits as usize => {
            Ok(bits)
        }
        _ => Err(Error::Parameter(
            "k-wise encoding needs a bitstring distribution on sample qubits \
             (wrong sample-space kind)"
                .into(),
        )),
    }
}

/// `U = U_p† · Π_i CZ(S_i, X_i) · U_p · V_k`; with
/// `Π = |0⟩⟨0|_A ⊗ |0⟩⟨0|_X` it satisfies
/// `‖Π U|0⟩‖² = M⁻¹ Σ_{1≤|S|≤k} (E_{x∼p} χ_S(x))²`.
pub fn kwise_unitary(oracle: &PurifiedOracle, k: u32) -> Result<SharedOp> {
    let n = check_kwise(oracle)?;
    let u: SharedOp = Arc::new(oracle.clone());
    let mut seq = Sequence::new("kwise").then(v_k(n, k)?).then(u.clone());
    for (s, x) in subset_registers(n).iter().zip(oracle.sample_registers()) {
        seq = seq.then(Arc::new(controlled_z(s, x)));
    }
    Ok(Arc::new(seq.then_inverse(u)))
}

/// k-wise encoding together with its layout and projector.
pub fn kwise_problem(oracle: &PurifiedOracle, k: u32) -> Result<AmplitudeProblem> {
    let unitary = kwise_unitary(oracle, k)?;
    let n = check_kwise(oracle)?;
    let subsets = RegisterLayout::new(subset_registers(n).into_iter().map(|s| (s, 2)))?;
    let layout = subsets.concat(&oracle.layout()?)?;
    let mut zeros: Vec<&str> = vec![oracle.workspace_register()];
    zeros.extend(oracle.sample_registers().iter().map(String::as_str));
    Ok(AmplitudeProblem {
        layout,
        unitary,
        projector: Projector::zeros(&zeros),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amplitude_estimation::exact_amplitude;
    use crate::ledger::QueryLedger;
    use crate::oracles::{make_purified_oracle, Distribution, GarbageStyle};
    use crate::statevec::{apply, ApplyMode, StateVector};

    fn oracle(w: Vec<f64>, label: &str) -> PurifiedOracle {
        make_purified_oracle(
            &Distribution::over_range(w).unwrap(),
            GarbageStyle::Basis,
            0,
        )
        .unwrap()
        .relabeled(label)
    }

    #[test]
    fn u_tilde_marginal_amplitudes_are_probabilities() {
        let p = oracle(vec![0.1, 0.2, 0.3, 0.4], "p");
        let layout = p
            .layout()
            .unwrap()
            .concat(&RegisterLayout::new([(COPY_REGISTER, 4)]).unwrap())
            .unwrap();
        let mut s = StateVector::new_basis_state(layout);
        let mut ledger = QueryLedger::new();
        apply(
            u_tilde(&p).as_ref(),
            &mut s,
            ApplyMode::Forward,
            &mut ledger,
        )
        .unwrap();
        for (k, pk) in [0.1, 0.2, 0.3, 0.4].iter().enumerate() {
            assert!((s.amplitude(&[0, 0, k]).unwrap().re - pk).abs() < 1e-12);
        }
        assert_eq!(ledger.counts("p").forward, 1);
        assert_eq!(ledger.counts("p").inverse, 1);
        assert_eq!(ledger.counts("U~_p").forward, 1);
    }

    #[test]
    fn closeness_mass_examples() {
        let p = oracle(vec![1.0, 0.0], "p");
        let q = oracle(vec![0.0, 1.0], "q");
        let same = oracle(vec![1.0, 0.0], "q");
        let disjoint = exact_amplitude(&closeness_problem(&p, &q).unwrap()).unwrap();
        assert!((disjoint - 0.5).abs() < 1e-12);
        let equal = exact_amplitude(&closeness_problem(&p, &same).unwrap()).unwrap();
        assert!(equal.abs() < 1e-12);
    }

    #[test]
    fn closeness_rejects_mismatch_and_shared_label() {
        let p = oracle(vec![0.5, 0.5], "p");
        let q = oracle(vec![0.25; 4], "q");
        assert!(matches!(
            closeness_unitary(&p, &q),
            Err(Error::SampleSpaceMismatch(_))
        ));
        assert!(closeness_unitary(&p, &p).is_err());
    }

    #[test]
    fn v_k_amplitude_counts() {
        for (n, k, m) in [(4u32, 2u32, 10usize), (3, 3, 7)] {
            let layout =
                RegisterLayout::new(subset_registers(n).into_iter().map(|s| (s, 2))).unwrap();
            let mut s = StateVector::new_basis_state(layout);
            apply(
                v_k(n, k).unwrap().as_ref(),
                &mut s,
                ApplyMode::Forward,
                &mut QueryLedger::new(),
            )
            .unwrap();
            let nonzero: Vec<_> = s.amplitudes().iter().filter(|a| a.norm() > 1e-12).collect();
            assert_eq!(nonzero.len(), m);
            for a in nonzero {
                assert!((a.re - 1.0 / (m as f64).sqrt()).abs() < 1e-12);
            }
        }
        assert!(v_k(3, 4).is_err());
    }

    #[test]
    fn kwise_uniform_has_zero_mass_and_range_is_rejected() {
        let u = Distribution::uniform(SampleSpace::Bitstring { bits: 4 }).unwrap();
        let o = make_purified_oracle(&u, GarbageStyle::Basis, 0).unwrap();
        assert!(exact_amplitude(&kwise_problem(&o, 2).unwrap()).unwrap() < 1e-20);
        let r = oracle(vec![0.5, 0.5], "p");
        assert!(kwise_unitary(&r, 1).is_err());
    }
}
