use nalgebra::DMatrix;

use crate::ledger::QueryLedger;
use crate::statevec::{apply, ApplyMode, QuantumOp, RegisterLayout, StateVector};
use crate::{Error, Result, C64};

pub const DEFAULT_DENSE_CAP: usize = 4096;

/// Materialises `op` on `layout`: column `j` is the op applied to basis
/// state `j`. Ledger activity during materialisation is discarded.
pub fn dense_matrix_of(
    op: &dyn QuantumOp,
    layout: &RegisterLayout,
    cap: usize,
) -> Result<DMatrix<C64>> {
    let dim = layout.total_dim();
    if dim > cap {
        return Err(Error::DenseCapExceeded { dim, cap });
    }
    let mut m = DMatrix::<C64>::zeros(dim, dim);
    let mut scratch = QueryLedger::new();
    for j in 0..dim {
        let mut amps = vec![C64::default(); dim];
        amps[j] = C64::new(1.0, 0.0);
        let mut s = StateVector::from_amplitudes(layout.clone(), amps)?;
        apply(op, &mut s, ApplyMode::Forward, &mut scratch)?;
        m.column_mut(j)
            .iter_mut()
            .zip(s.amplitudes())
            .for_each(|(dst, a)| *dst = *a);
    }
    Ok(m)
}

/// ‖U†U − I‖_max.
pub fn max_unitarity_defect(u: &DMatrix<C64>) -> f64 {
    let g = u.adjoint() * u;
    let n = g.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let want = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g[(i, j)] - C64::new(want, 0.0)).norm());
        }
    }
    worst
}
