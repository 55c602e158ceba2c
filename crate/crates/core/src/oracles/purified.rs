use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::ledger::{QueryKind, QueryLedger};
use crate::oracles::{Distribution, SampleSpace};
use crate::statevec::{
    apply, ApplyCtx, ApplyMode, LocalUnitary, QuantumOp, RegisterLayout, Sequence, SharedOp,
    StatePrep, StateVector, XorFunction,
};
use crate::{Error, Result, AMPLITUDE_TOL, C64};

/// Name of the purification workspace register.
pub const WORKSPACE_REGISTER: &str = "A";
/// Name of the sample register for range sample spaces.
pub const SAMPLE_REGISTER: &str = "B";

/// Name of the `i`-th sample qubit for bitstring sample spaces.
pub fn sample_qubit(i: usize) -> String {
    format!("X{i}")
}

/// How the orthonormal workspace states |φ_i⟩ are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GarbageStyle {
    /// |φ_i⟩ = |i⟩.
    #[default]
    Basis,
    /// |φ_i⟩ = i-th column of a seeded Haar-random unitary.
    Haar,
}

#[derive(Clone)]
enum Garbage {
    Basis,
    /// Row-major unitary whose columns are the workspace states.
    Unitary(Arc<Vec<C64>>),
    /// |φ_i⟩ ∝ Σ_{j : f(j) = i} |j⟩.
    Preimages(Arc<Vec<usize>>),
}

struct Inner {
    label: String,
    distribution: Distribution,
    workspace: String,
    workspace_dim: usize,
    sample: Vec<String>,
    sample_dim: usize,
    program: Sequence,
    garbage: Garbage,
}

/// Purified query access `U_p|0⟩_A|0⟩_B = Σ_i √p_i |φ_i⟩_A |i⟩_B`.
///
/// Every application (forward, inverse, controlled) records one oracle query
/// under the oracle's label.
#[derive(Clone)]
pub struct PurifiedOracle {
    inner: Arc<Inner>,
}

fn sample_registers(space: SampleSpace) -> Vec<String> {
    match space {
        SampleSpace::Range { .. } => vec![SAMPLE_REGISTER.to_string()],
        SampleSpace::Bitstring { bits } => (0..bits as usize).map(sample_qubit).collect(),
    }
}

/// Seeded Haar-random unitary of dimension `dim` (row-major), from
/// Gram–Schmidt on a complex Ginibre matrix.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<C64> {
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut v: Vec<C64> = (0..dim)
            .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        // two passes keep the columns orthonormal to machine precision
        for _ in 0..2 {
            for c in &cols {
                let dot: C64 = c.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                v.iter_mut().zip(c).for_each(|(x, ci)| *x -= dot * ci);
            }
        }
        let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-8 {
            continue;
        }
        v.iter_mut().for_each(|x| *x /= norm);
        cols.push(v);
    }
    let mut m = vec![C64::default(); dim * dim];
    for (j, col) in cols.iter().enumerate() {
        for (i, x) in col.iter().enumerate() {
            m[i * dim + j] = *x;
        }
    }
    m
}

/// Builds `U_p` for `p`. Non-power-of-two range spaces are padded with
/// zero-probability elements; the workspace has the padded dimension.
pub fn make_purified_oracle(
    p: &Distribution,
    garbage: GarbageStyle,
    seed: u64,
) -> Result<PurifiedOracle> {
    let dim = p.padded_len();
    let sample = sample_registers(p.space());
    let amplitudes: Vec<f64> = p.padded_weights().iter().map(|w| w.sqrt()).collect();
    let mut program = Sequence::new("U_p")
        .then(Arc::new(StatePrep::new(
            "prep",
            sample.clone(),
            &amplitudes,
        )?))
        .then(Arc::new(XorFunction::copy(
            sample.clone(),
            vec![WORKSPACE_REGISTER.to_string()],
            dim,
        )));
    let garbage = match garbage {
        GarbageStyle::Basis => Garbage::Basis,
        GarbageStyle::Haar => {
            let g = haar_unitary(dim, &mut ChaCha8Rng::seed_from_u64(seed));
            program = program.then(Arc::new(LocalUnitary::new(
                "garbage",
                vec![WORKSPACE_REGISTER.to_string()],
                dim,
                g.clone(),
            )?));
            Garbage::Unitary(Arc::new(g))
        }
    };
    Ok(PurifiedOracle {
        inner: Arc::new(Inner {
            label: "p".into(),
            distribution: p.clone(),
            workspace: WORKSPACE_REGISTER.to_string(),
            workspace_dim: dim,
            sample,
            sample_dim: dim,
            program,
            garbage,
        }),
    })
}

/// Turns a pure-state preparation `v|0⟩ = Σ √p_i |i⟩` on a single register
/// of dimension `dim` into purified access by copying the register into a
/// fresh workspace (|φ_i⟩ = |i⟩). Each use of the result is one query.
pub fn from_pure_state_oracle(v: SharedOp, dim: usize) -> Result<PurifiedOracle> {
    let regs = v.registers();
    let [register] = regs.as_slice() else {
        return Err(Error::Parameter(format!(
            "pure-state oracle must act on one register, acts on {regs:?}"
        )));
    };
    if register == WORKSPACE_REGISTER {
        return Err(Error::Parameter(format!(
            "register name `{WORKSPACE_REGISTER}` is reserved for the workspace"
        )));
    }
    if !dim.is_power_of_two() {
        return Err(Error::Parameter(format!(
            "pure-state register dimension {dim} must be a power of two"
        )));
    }
    let layout = RegisterLayout::new([(register.clone(), dim)])?;
    let mut scratch = QueryLedger::new();
    let mut probe = StateVector::new_basis_state(layout.clone());
    apply(v.as_ref(), &mut probe, ApplyMode::Forward, &mut scratch)?;
    if (probe.norm_sqr() - 1.0).abs() > AMPLITUDE_TOL {
        return Err(Error::NotUnitary(format!("‖v|0⟩‖² = {}", probe.norm_sqr())));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..3 {
        let mut s = StateVector::random(layout.clone(), &mut rng);
        apply(v.as_ref(), &mut s, ApplyMode::Forward, &mut scratch)?;
        if (s.norm_sqr() - 1.0).abs() > AMPLITUDE_TOL {
            return Err(Error::NotUnitary(format!(
                "norm² of a random state became {}",
                s.norm_sqr()
            )));
        }
    }
    if let Some(a) = probe
        .amplitudes()
        .iter()
        .find(|a| a.im.abs() > AMPLITUDE_TOL || a.re < -AMPLITUDE_TOL)
    {
        return Err(Error::Parameter(format!(
            "prepared amplitude {a} is not real and non-negative"
        )));
    }
    let weights: Vec<f64> = probe.amplitudes().iter().map(|a| a.norm_sqr()).collect();
    let sum: f64 = weights.iter().sum();
    let distribution = Distribution::over_range(weights.into_iter().map(|w| w / sum).collect())?;
    let program = Sequence::new("U_p")
        .then(v)
        .then(Arc::new(XorFunction::copy(
            vec![register.clone()],
            vec![WORKSPACE_REGISTER.to_string()],
            dim,
        )));
    Ok(PurifiedOracle {
        inner: Arc::new(Inner {
            label: "p".into(),
            distribution,
            workspace: WORKSPACE_REGISTER.to_string(),
            workspace_dim: dim,
            sample: vec![register.clone()],
            sample_dim: dim,
            program,
            garbage: Garbage::Basis,
        }),
    })
}

/// Purified access from a table `f : [n] → Ω`: the uniform superposition
/// over `[n]` in the workspace followed by `|j⟩|b⟩ → |j⟩|b ⊕ f(j)⟩`, giving
/// `p_i = |{j : f(j) = i}| / n`.
pub fn from_discrete_oracle(table: &[usize], space: SampleSpace) -> Result<PurifiedOracle> {
    let n = table.len();
    if n == 0 {
        return Err(Error::Parameter("empty function table".into()));
    }
    let omega = space.len();
    if let Some(&bad) = table.iter().find(|&&v| v >= omega) {
        return Err(Error::Parameter(format!(
            "function value {bad} outside the sample space of size {omega}"
        )));
    }
    let mut counts = vec![0usize; omega];
    for &v in table {
        counts[v] += 1;
    }
    let distribution =
        Distribution::new(space, counts.iter().map(|&c| c as f64 / n as f64).collect())?;
    let sample = sample_registers(space);
    let workspace = vec![WORKSPACE_REGISTER.to_string()];
    let uniform = vec![1.0 / (n as f64).sqrt(); n];
    let program = Sequence::new("U_p")
        .then(Arc::new(StatePrep::new(
            "uniform",
            workspace.clone(),
            &uniform,
        )?))
        .then(Arc::new(XorFunction::new(
            "O_f",
            workspace,
            sample.clone(),
            table.to_vec(),
        )));
    Ok(PurifiedOracle {
        inner: Arc::new(Inner {
            label: "p".into(),
            distribution,
            workspace: WORKSPACE_REGISTER.to_string(),
            workspace_dim: n,
            sample,
            sample_dim: omega.next_power_of_two(),
            program,
            garbage: Garbage::Preimages(Arc::new(table.to_vec())),
        }),
    })
}

impl PurifiedOracle {
    pub fn distribution(&self) -> &Distribution {
        &self.inner.distribution
    }

    /// Same oracle recording its queries under a different label.
    pub fn relabeled(&self, label: &str) -> PurifiedOracle {
        let i = &self.inner;
        PurifiedOracle {
            inner: Arc::new(Inner {
                label: label.to_string(),
                distribution: i.distribution.clone(),
                workspace: i.workspace.clone(),
                workspace_dim: i.workspace_dim,
                sample: i.sample.clone(),
                sample_dim: i.sample_dim,
                program: i.program.clone(),
                garbage: i.garbage.clone(),
            }),
        }
    }

    pub fn workspace_register(&self) -> &str {
        &self.inner.workspace
    }

    pub fn workspace_dim(&self) -> usize {
        self.inner.workspace_dim
    }

    pub fn sample_registers(&self) -> &[String] {
        &self.inner.sample
    }

    /// Joint dimension of the sample registers (padded).
    pub fn sample_dim(&self) -> usize {
        self.inner.sample_dim
    }

    /// Minimal layout the oracle acts on: workspace, then sample registers.
    pub fn layout(&self) -> Result<RegisterLayout> {
        let per_register = if self.inner.sample.len() == 1 {
            self.inner.sample_dim
        } else {
            2
        };
        RegisterLayout::new(
            std::iter::once((self.inner.workspace.clone(), self.inner.workspace_dim))
                .chain(self.inner.sample.iter().map(|r| (r.clone(), per_register))),
        )
    }

    /// The workspace state |φ_i⟩, or `None` for a zero-probability element
    /// of a table oracle (where it is undefined).
    pub fn garbage_state(&self, i: usize) -> Option<Vec<C64>> {
        let d = self.inner.workspace_dim;
        match &self.inner.garbage {
            Garbage::Basis => {
                let mut v = vec![C64::default(); d];
                v[i] = C64::new(1.0, 0.0);
                Some(v)
            }
            Garbage::Unitary(g) => Some((0..d).map(|r| g[r * d + i]).collect()),
            Garbage::Preimages(table) => {
                let pre: Vec<usize> = (0..table.len()).filter(|&j| table[j] == i).collect();
                if pre.is_empty() {
                    return None;
                }
                let a = 1.0 / (pre.len() as f64).sqrt();
                let mut v = vec![C64::default(); d];
                pre.into_iter().for_each(|j| v[j] = C64::new(a, 0.0));
                Some(v)
            }
        }
    }

    /// Σ_i √p_i |φ_i⟩|i⟩ over [`Self::layout`].
    pub fn expected_state(&self) -> Vec<C64> {
        let ds = self.inner.sample_dim;
        let mut out = vec![C64::default(); self.inner.workspace_dim * ds];
        for (i, &p) in self.inner.distribution.weights().iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            let phi = self
                .garbage_state(i)
                .expect("non-zero weight has a workspace state");
            for (a, x) in phi.iter().enumerate() {
                out[a * ds + i] += *x * p.sqrt();
            }
        }
        out
    }

    /// Largest amplitude deviation of `U_p|0,0⟩` from Σ √p_i |φ_i⟩|i⟩.
    pub fn invariant_defect(&self) -> Result<f64> {
        let mut s = StateVector::new_basis_state(self.layout()?);
        apply(self, &mut s, ApplyMode::Forward, &mut QueryLedger::new())?;
        Ok(s.amplitudes()
            .iter()
            .zip(self.expected_state())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}

impl QuantumOp for PurifiedOracle {
    fn label(&self) -> &str {
        &self.inner.label
    }

    fn registers(&self) -> Vec<String> {
        let mut regs = vec![self.inner.workspace.clone()];
        regs.extend(self.inner.sample.iter().cloned());
        regs
    }

    fn apply_in(&self, ctx: &mut ApplyCtx<'_>) -> Result<()> {
        ctx.record(&self.inner.label, QueryKind::Oracle);
        ctx.run(&self.inner.program, false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statevec::hadamard;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn prepared(o: &PurifiedOracle) -> StateVector {
        let mut s = StateVector::new_basis_state(o.layout().unwrap());
        apply(o, &mut s, ApplyMode::Forward, &mut QueryLedger::new()).unwrap();
        s
    }

    #[test]
    fn half_half_basis_garbage() {
        let p = Distribution::over_range(vec![0.5, 0.5]).unwrap();
        let o = make_purified_oracle(&p, GarbageStyle::Basis, 0).unwrap();
        let s = prepared(&o);
        assert!((s.amplitude(&[0, 0]).unwrap().re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((s.amplitude(&[1, 1]).unwrap().re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!(s.amplitude(&[0, 1]).unwrap().norm() < 1e-15);
    }

    #[test]
    fn point_mass_prepares_product_state() {
        let p = Distribution::over_range(vec![1.0, 0.0]).unwrap();
        let o = make_purified_oracle(&p, GarbageStyle::Basis, 0).unwrap();
        let s = prepared(&o);
        assert!((s.amplitude(&[0, 0]).unwrap() - C64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn haar_garbage_is_orthonormal_and_realises_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let p = Distribution::random(SampleSpace::Range { size: 6 }, &mut rng).unwrap();
        let o = make_purified_oracle(&p, GarbageStyle::Haar, 4).unwrap();
        assert_eq!(o.workspace_dim(), 8);
        for i in 0..8 {
            for j in 0..8 {
                let (a, b) = (o.garbage_state(i).unwrap(), o.garbage_state(j).unwrap());
                let dot: C64 = a.iter().zip(&b).map(|(x, y)| x.conj() * y).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((dot - want).norm() < 1e-10);
            }
        }
        assert!(o.invariant_defect().unwrap() < 1e-10);
    }

    #[test]
    fn oracle_inverse_undoes_forward() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let p = Distribution::random(SampleSpace::Range { size: 4 }, &mut rng).unwrap();
        let o = make_purified_oracle(&p, GarbageStyle::Haar, 1).unwrap();
        let s0 = StateVector::random(o.layout().unwrap(), &mut rng);
        let mut s = s0.clone();
        let mut ledger = QueryLedger::new();
        apply(&o, &mut s, ApplyMode::Forward, &mut ledger).unwrap();
        apply(&o, &mut s, ApplyMode::Inverse, &mut ledger).unwrap();
        assert!(s.max_abs_diff(&s0) < 1e-12);
        assert_eq!(ledger.counts("p").forward, 1);
        assert_eq!(ledger.counts("p").inverse, 1);
    }

    #[test]
    fn pure_state_from_hadamard() {
        let o = from_pure_state_oracle(Arc::new(hadamard("B")), 2).unwrap();
        assert_eq!(o.distribution().weights().len(), 2);
        for w in o.distribution().weights() {
            assert!((w - 0.5).abs() < 1e-15);
        }
        assert!(o.invariant_defect().unwrap() < 1e-15);
    }

    #[test]
    fn pure_state_from_identity_is_point_mass() {
        let id = Sequence::new("id");
        struct OnB(Sequence);
        impl QuantumOp for OnB {
            fn label(&self) -> &str {
                "id"
            }
            fn registers(&self) -> Vec<String> {
                vec!["B".into()]
            }
            fn apply_in(&self, ctx: &mut ApplyCtx<'_>) -> Result<()> {
                ctx.run(&self.0, false)
            }
        }
        let o = from_pure_state_oracle(Arc::new(OnB(id)), 4).unwrap();
        assert_eq!(o.distribution().weights(), &[1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn pure_state_rejects_non_unitary_and_complex() {
        struct Shrink;
        impl QuantumOp for Shrink {
            fn label(&self) -> &str {
                "shrink"
            }
            fn registers(&self) -> Vec<String> {
                vec!["B".into()]
            }
            fn apply_in(&self, ctx: &mut ApplyCtx<'_>) -> Result<()> {
                ctx.for_each_block(&["B".to_string()], &[], |buf, _| {
                    buf.iter_mut().for_each(|b| *b *= 0.5)
                })
            }
        }
        assert!(matches!(
            from_pure_state_oracle(Arc::new(Shrink), 2),
            Err(Error::NotUnitary(_))
        ));
        let s_gate = LocalUnitary::new(
            "S",
            vec!["B".into()],
            2,
            vec![
                C64::new(FRAC_1_SQRT_2, 0.0),
                C64::new(FRAC_1_SQRT_2, 0.0),
                C64::new(0.0, FRAC_1_SQRT_2),
                C64::new(0.0, -FRAC_1_SQRT_2),
            ],
        )
        .unwrap();
        assert!(from_pure_state_oracle(Arc::new(s_gate), 2).is_err());
    }

    #[test]
    fn discrete_identity_constant_and_two_to_one() {
        let range = |n| SampleSpace::Range { size: n };
        let id = from_discrete_oracle(&[0, 1, 2, 3], range(4)).unwrap();
        assert_eq!(id.distribution().weights(), &[0.25; 4]);
        assert!(id.invariant_defect().unwrap() < 1e-14);

        let constant = from_discrete_oracle(&[2, 2, 2], range(4)).unwrap();
        assert_eq!(constant.distribution().weights(), &[0.0, 0.0, 1.0, 0.0]);
        assert!(constant.invariant_defect().unwrap() < 1e-14);

        // j -> j / 2 on [8]: support {0,1,2,3}, each with two preimages
        let table: Vec<usize> = (0..8).map(|j| j / 2).collect();
        let two = from_discrete_oracle(&table, range(8)).unwrap();
        let mut counts = [0usize; 8];
        table.iter().for_each(|&v| counts[v] += 1);
        for (w, c) in two.distribution().weights().iter().zip(counts) {
            assert_eq!(*w, c as f64 / 8.0);
        }
        assert!(two.invariant_defect().unwrap() < 1e-14);
        assert!(from_discrete_oracle(&[0, 9], range(4)).is_err());
    }
}
