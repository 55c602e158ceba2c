use crate::statevec::{PhaseFlip, RegisterLayout, StateVector};
use crate::{Error, Result, C64};

/// Computational-basis projector: each listed register is fixed to a value,
/// every other register is a wildcard.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Projector {
    pattern: Vec<(String, usize)>,
}

impl Projector {
    pub fn new(pattern: Vec<(String, usize)>) -> Self {
        Projector { pattern }
    }

    /// Projector fixing every listed register to |0⟩.
    pub fn zeros<S: AsRef<str>>(registers: &[S]) -> Self {
        Projector {
            pattern: registers
                .iter()
                .map(|r| (r.as_ref().to_string(), 0))
                .collect(),
        }
    }

    pub fn fixing(mut self, register: &str, value: usize) -> Self {
        self.pattern.push((register.to_string(), value));
        self
    }

    pub fn pattern(&self) -> &[(String, usize)] {
        &self.pattern
    }

    fn resolve(&self, layout: &RegisterLayout) -> Result<Vec<(usize, usize)>> {
        self.pattern
            .iter()
            .map(|(reg, v)| {
                let pos = layout.position(reg)?;
                let dim = layout.dim_at(pos);
                if *v >= dim {
                    return Err(Error::DimensionMismatch {
                        register: reg.clone(),
                        expected: dim,
                        actual: v + 1,
                    });
                }
                Ok((pos, *v))
            })
            .collect()
    }

    fn matches(layout: &RegisterLayout, fixed: &[(usize, usize)], index: usize) -> bool {
        fixed.iter().all(|&(pos, v)| layout.digit(index, pos) == v)
    }

    /// ‖Π|ψ⟩‖².
    pub fn norm_sq(&self, state: &StateVector) -> Result<f64> {
        let layout = state.layout();
        let fixed = self.resolve(layout)?;
        Ok(state
            .amplitudes()
            .iter()
            .enumerate()
            .filter(|(i, _)| Self::matches(layout, &fixed, *i))
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// Replaces the state with the (unnormalised) projection Π|ψ⟩.
    pub fn project(&self, state: &mut StateVector) -> Result<()> {
        let layout = state.layout().clone();
        let fixed = self.resolve(&layout)?;
        for (i, a) in state.amplitudes_mut().iter_mut().enumerate() {
            if !Self::matches(&layout, &fixed, i) {
                *a = C64::default();
            }
        }
        Ok(())
    }

    /// The reflection `I − 2Π`.
    pub fn reflection(&self) -> PhaseFlip {
        PhaseFlip::new("reflect", self.pattern.clone())
    }
}

/// Σ over basis indices matching `proj` of |amplitude|².
pub fn projector_norm_sq(state: &StateVector, proj: &Projector) -> Result<f64> {
    proj.norm_sq(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ledger::QueryLedger;
    use crate::statevec::{hadamard, ApplyMode};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn full_overlap_and_half_mass() {
        let layout = RegisterLayout::new([("A", 2), ("B", 2)]).unwrap();
        let s = StateVector::new_basis_state(layout);
        assert_eq!(Projector::zeros(&["A", "B"]).norm_sq(&s).unwrap(), 1.0);

        let mut plus = StateVector::new_basis_state(RegisterLayout::new([("A", 2)]).unwrap());
        plus.apply(&hadamard("A"), ApplyMode::Forward, &mut QueryLedger::new())
            .unwrap();
        let m = Projector::zeros(&["A"]).norm_sq(&plus).unwrap();
        assert!((m - 0.5).abs() < 1e-15);
    }

    #[test]
    fn projection_is_idempotent() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let layout = RegisterLayout::new([("A", 3), ("B", 2), ("C", 4)]).unwrap();
        let proj = Projector::zeros(&["A"]).fixing("C", 2);
        let mut once = StateVector::random(layout, &mut rng);
        proj.project(&mut once).unwrap();
        let mut twice = once.clone();
        proj.project(&mut twice).unwrap();
        assert_eq!(once.max_abs_diff(&twice), 0.0);
        assert!((proj.norm_sq(&once).unwrap() - once.norm_sqr()).abs() < 1e-15);
    }

    #[test]
    fn reflection_flips_exactly_the_projected_part() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let layout = RegisterLayout::new([("A", 3), ("B", 2)]).unwrap();
        let proj = Projector::zeros(&["B"]);
        let s = StateVector::random(layout, &mut rng);
        let mut r = s.clone();
        r.apply(
            &proj.reflection(),
            ApplyMode::Forward,
            &mut QueryLedger::new(),
        )
        .unwrap();
        let mut p = s.clone();
        proj.project(&mut p).unwrap();
        for i in 0..s.amplitudes().len() {
            let want = s.amplitudes()[i] - p.amplitudes()[i] * 2.0;
            assert!((r.amplitudes()[i] - want).norm() < 1e-15);
        }
    }

    #[test]
    fn unknown_register_is_an_error() {
        let s = StateVector::new_basis_state(RegisterLayout::new([("A", 2)]).unwrap());
        assert!(Projector::zeros(&["Z"]).norm_sq(&s).is_err());
        assert!(Projector::new(vec![("A".into(), 5)]).norm_sq(&s).is_err());
    }
}
