use rustfft::FftPlanner;

use super::{AeConfig, AmplitudeProblem, PhaseDistribution};
use crate::ledger::QueryLedger;
use crate::statevec::{apply, ApplyMode, StateVector};
use crate::{Error, Result, C64};

/// A Krylov vector whose residual is below this is treated as lying in the
/// span already found.
const CLOSURE_TOL: f64 = 1e-10;
/// The invariant subspace of `Q` containing `U|0⟩` is at most two
/// dimensional; a few extra slots absorb rounding.
const MAX_KRYLOV: usize = 8;

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Phase-register distribution of amplitude estimation.
///
/// Phase estimation prepares `M^{-1/2} Σ_x |x⟩ ⊗ Q^x U|0⟩` and applies the
/// inverse Fourier transform. `Q^x U|0⟩` stays in a small invariant
/// subspace, so `Q` is applied only until that subspace closes (Arnoldi),
/// the powers are taken on the restricted matrix and each coordinate
/// sequence is Fourier transformed. The ledger is that of the circuit: one
/// `U`, then `M − 1` controlled applications of `Q`.
pub fn phase_distribution(
    problem: &AmplitudeProblem,
    config: &AeConfig,
) -> Result<PhaseDistribution> {
    config.validate()?;
    let m = config.m();
    let q = config.iterate(problem);

    let mut ledger = QueryLedger::new();
    let start = problem.prepared_state(&mut ledger)?;
    let layout = start.layout().clone();

    let mut basis: Vec<Vec<C64>> = vec![start.into_amplitudes()];
    // columns of Q restricted to the basis
    let mut h: Vec<Vec<C64>> = Vec::new();
    let mut q_ledger = QueryLedger::new();
    let mut j = 0;
    while j < basis.len() {
        let mut s = StateVector::from_amplitudes(layout.clone(), basis[j].clone())?;
        let mut step = QueryLedger::new();
        apply(&q, &mut s, ApplyMode::Forward, &mut step)?;
        if j == 0 {
            q_ledger = step;
        }
        let mut w = s.into_amplitudes();
        let mut col = vec![C64::default(); basis.len()];
        for _ in 0..2 {
            for (i, b) in basis.iter().enumerate() {
                let c = dot(b, &w);
                col[i] += c;
                w.iter_mut().zip(b).for_each(|(x, bi)| *x -= c * bi);
            }
        }
        let r = dot(&w, &w).re.sqrt();
        if r > CLOSURE_TOL {
            if basis.len() == MAX_KRYLOV {
                return Err(Error::Parameter(
                    "Grover iterate has no small invariant subspace; is U unitary?".into(),
                ));
            }
            w.iter_mut().for_each(|x| *x /= r);
            basis.push(w);
            col.push(C64::new(r, 0.0));
        }
        h.push(col);
        j += 1;
    }
    let dim = basis.len();

    // coefficient sequences c_x = H^x e_0, one row per basis vector
    let mut seqs = vec![vec![C64::default(); m]; dim];
    let mut c = vec![C64::default(); dim];
    c[0] = C64::new(1.0, 0.0);
    for x in 0..m {
        for b in 0..dim {
            seqs[b][x] = c[b];
        }
        let mut next = vec![C64::default(); dim];
        for (col, cj) in h.iter().zip(&c) {
            for (i, hij) in col.iter().enumerate() {
                next[i] += hij * cj;
            }
        }
        c = next;
    }

    let fft = FftPlanner::<f64>::new().plan_fft_forward(m);
    let mut probabilities = vec![0.0; m];
    let scale = 1.0 / m as f64;
    for mut seq in seqs {
        fft.process(&mut seq);
        for (p, a) in probabilities.iter_mut().zip(&seq) {
            *p += (a * scale).norm_sqr();
        }
    }

    ledger.absorb_repeated(&q_ledger, (m - 1) as u64, true);
    Ok(PhaseDistribution {
        m,
        probabilities,
        ledger,
    })
}
