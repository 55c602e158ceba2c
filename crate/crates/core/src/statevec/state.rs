use std::collections::HashMap;
use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::ledger::QueryLedger;
use crate::statevec::kernel::{for_each_block, BlockPlan, PlanKey};
use crate::statevec::{apply, ApplyMode, QuantumOp, RegisterLayout};
use crate::{Error, Result, C64};

/// Complex amplitude array over a [`RegisterLayout`].
#[derive(Debug, Clone)]
pub struct StateVector {
    layout: RegisterLayout,
    amps: Vec<C64>,
    plans: HashMap<PlanKey, Arc<BlockPlan>>,
}

impl StateVector {
    /// The all-zeros basis state.
    pub fn new_basis_state(layout: RegisterLayout) -> Self {
        let mut amps = vec![C64::default(); layout.total_dim()];
        amps[0] = C64::new(1.0, 0.0);
        StateVector {
            layout,
            amps,
            plans: HashMap::new(),
        }
    }

    /// Basis state with the given per-register values.
    pub fn basis(layout: RegisterLayout, values: &[usize]) -> Result<Self> {
        let idx = layout.encode(values)?;
        let mut amps = vec![C64::default(); layout.total_dim()];
        amps[idx] = C64::new(1.0, 0.0);
        Ok(StateVector {
            layout,
            amps,
            plans: HashMap::new(),
        })
    }

    pub fn from_amplitudes(layout: RegisterLayout, amps: Vec<C64>) -> Result<Self> {
        if amps.len() != layout.total_dim() {
            return Err(Error::AmplitudeLength {
                expected: layout.total_dim(),
                actual: amps.len(),
            });
        }
        Ok(StateVector {
            layout,
            amps,
            plans: HashMap::new(),
        })
    }

    /// Normalised state with i.i.d. complex Gaussian amplitudes.
    pub fn random<R: Rng + ?Sized>(layout: RegisterLayout, rng: &mut R) -> Self {
        let mut amps: Vec<C64> = (0..layout.total_dim())
            .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        amps.iter_mut().for_each(|a| *a /= norm);
        StateVector {
            layout,
            amps,
            plans: HashMap::new(),
        }
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn amplitude(&self, values: &[usize]) -> Result<C64> {
        Ok(self.amps[self.layout.encode(values)?])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Largest per-amplitude deviation from `other` (same layout assumed).
    pub fn max_abs_diff(&self, other: &StateVector) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn apply(
        &mut self,
        op: &dyn QuantumOp,
        mode: ApplyMode,
        ledger: &mut QueryLedger,
    ) -> Result<()> {
        apply(op, self, mode, ledger)
    }

    /// Born probabilities of each value of `register`.
    pub fn marginal_probabilities(&self, register: &str) -> Result<Vec<f64>> {
        let pos = self.layout.position(register)?;
        let mut probs = vec![0.0; self.layout.dim_at(pos)];
        for (i, a) in self.amps.iter().enumerate() {
            probs[self.layout.digit(i, pos)] += a.norm_sqr();
        }
        Ok(probs)
    }

    /// Measures `register` in the computational basis, collapsing the state
    /// onto the observed block and renormalising it.
    pub fn measure<R: Rng + ?Sized>(&mut self, register: &str, rng: &mut R) -> Result<usize> {
        let pos = self.layout.position(register)?;
        let probs = self.marginal_probabilities(register)?;
        let total: f64 = probs.iter().sum();
        let outcome = sample_index(&probs, total, rng);
        let mass = probs[outcome];
        if mass <= 0.0 {
            return Err(Error::DegenerateMeasurement);
        }
        let scale = 1.0 / mass.sqrt();
        for (i, a) in self.amps.iter_mut().enumerate() {
            if self.layout.digit(i, pos) == outcome {
                *a *= scale;
            } else {
                *a = C64::default();
            }
        }
        Ok(outcome)
    }

    pub(crate) fn run_blocks<F>(&mut self, key: PlanKey, f: F) -> Result<()>
    where
        F: Fn(&mut [C64], &mut [C64]) + Sync + Send,
    {
        let plan = match self.plans.get(&key) {
            Some(p) => Arc::clone(p),
            None => {
                let p = Arc::new(BlockPlan::build(&self.layout, &key)?);
                self.plans.insert(key, Arc::clone(&p));
                p
            }
        };
        for_each_block(&mut self.amps, &plan, f);
        Ok(())
    }
}

/// Draws an index with probability `probs[i] / total`.
pub(crate) fn sample_index<R: Rng + ?Sized>(probs: &[f64], total: f64, rng: &mut R) -> usize {
    let mut u = rng.random::<f64>() * total;
    let mut last_nonzero = 0;
    for (i, &p) in probs.iter().enumerate() {
        if p > 0.0 {
            last_nonzero = i;
            if u < p {
                return i;
            }
            u -= p;
        }
    }
    last_nonzero
}
