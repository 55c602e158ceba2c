use std::sync::Arc;

use super::{AeConfig, AmplitudeProblem, PhaseDistribution, PHASE_REGISTER};
use crate::ledger::QueryLedger;
use crate::statevec::{
    apply, ApplyMode, Condition, Controlled, FourierTransform, RegisterLayout, StateVector,
};
use crate::{Error, Result};

/// Largest joint dimension (system × phase) the dense path will simulate.
pub const DENSE_PHASE_CAP: usize = 1 << 22;

/// Phase estimation simulated literally: a phase register of dimension `M`,
/// its Fourier transform, `U` on the system, `Q` controlled on
/// `PHASE ≥ j` for `j = 1..M` (so block `x` receives `Q^x`), the inverse
/// transform and the register's marginal. Reference for
/// [`super::phase_distribution`] on small systems.
pub fn dense_phase_distribution(
    problem: &AmplitudeProblem,
    config: &AeConfig,
) -> Result<PhaseDistribution> {
    config.validate()?;
    let m = config.m();
    let dim = problem.layout.total_dim().saturating_mul(m);
    if dim > DENSE_PHASE_CAP {
        return Err(Error::DenseCapExceeded {
            dim,
            cap: DENSE_PHASE_CAP,
        });
    }
    let layout = RegisterLayout::new([(PHASE_REGISTER, m)])?.concat(&problem.layout)?;
    let mut state = StateVector::new_basis_state(layout);
    let mut ledger = QueryLedger::new();
    let qft = FourierTransform::new(PHASE_REGISTER, m);
    let mut scratch = QueryLedger::new();
    apply(&qft, &mut state, ApplyMode::Forward, &mut scratch)?;
    apply(
        problem.counted_unitary().as_ref(),
        &mut state,
        ApplyMode::Forward,
        &mut ledger,
    )?;
    let q = Arc::new(config.iterate(problem));
    for j in 1..m {
        let cq = Controlled::new(PHASE_REGISTER, Condition::AtLeast(j), q.clone());
        apply(&cq, &mut state, ApplyMode::Forward, &mut ledger)?;
    }
    apply(&qft, &mut state, ApplyMode::Inverse, &mut scratch)?;
    Ok(PhaseDistribution {
        m,
        probabilities: state.marginal_probabilities(PHASE_REGISTER)?,
        ledger,
    })
}
