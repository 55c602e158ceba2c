//! Amplitude estimation by phase estimation on the Grover iterate, and the
//! zero tester built on it.
//!
//! The phase-register distribution is computed once per problem and then
//! sampled, so repeated trials of the same instance only cost a draw.

mod dense;
mod phase;

use std::f64::consts::PI;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::ledger::{QueryKind, QueryLedger};
use crate::statevec::{
    apply, ApplyCtx, ApplyMode, Counted, GlobalPhase, PhaseFlip, Projector, QuantumOp,
    RegisterLayout, SharedOp, StateVector,
};
use crate::{Error, Result, C64};

pub use dense::dense_phase_distribution;
pub use phase::phase_distribution;

/// Ledger label under which applications of the encoding unitary are counted.
pub const UNITARY_LABEL: &str = "U";
/// Name of the phase register in the dense reference path.
pub const PHASE_REGISTER: &str = "PHASE";

/// An encoding unitary `U` on a layout together with the projector `Π`
/// whose mass `‖ΠU|0⟩‖²` is the amplitude of interest.
#[derive(Clone)]
pub struct AmplitudeProblem {
    pub layout: RegisterLayout,
    pub unitary: SharedOp,
    pub projector: Projector,
}

impl AmplitudeProblem {
    pub fn new(layout: RegisterLayout, unitary: SharedOp, projector: Projector) -> Result<Self> {
        for r in unitary.registers() {
            layout.position(&r)?;
        }
        for (r, _) in projector.pattern() {
            layout.position(r)?;
        }
        Ok(AmplitudeProblem {
            layout,
            unitary,
            projector,
        })
    }

    /// `U`, recording one composite application per use.
    pub fn counted_unitary(&self) -> SharedOp {
        Arc::new(Counted::new(
            UNITARY_LABEL,
            QueryKind::Composite,
            self.unitary.clone(),
        ))
    }

    /// `U|0⟩`.
    pub fn prepared_state(&self, ledger: &mut QueryLedger) -> Result<StateVector> {
        let mut s = StateVector::new_basis_state(self.layout.clone());
        apply(
            self.counted_unitary().as_ref(),
            &mut s,
            ApplyMode::Forward,
            ledger,
        )?;
        Ok(s)
    }
}

/// `‖ΠU|0⟩‖²` read directly off the simulated state.
pub fn exact_amplitude(problem: &AmplitudeProblem) -> Result<f64> {
    let s = problem.prepared_state(&mut QueryLedger::new())?;
    problem.projector.norm_sq(&s)
}

/// `Q = −U S₀ U† S_Π` with `S₀ = I − 2|0⟩⟨0|` and `S_Π = I − 2Π`.
#[derive(Clone)]
pub struct GroverIterate {
    unitary: SharedOp,
    marked: PhaseFlip,
    zero: PhaseFlip,
    minus: GlobalPhase,
    registers: Vec<String>,
    flip_marked_sign: bool,
}

/// The Grover iterate of `problem`. Each application costs one `U` and
/// one `U†` in the ledger.
pub fn grover_iterate(problem: &AmplitudeProblem) -> GroverIterate {
    let registers: Vec<String> = problem
        .layout
        .registers()
        .iter()
        .map(|r| r.name.clone())
        .collect();
    GroverIterate {
        unitary: problem.counted_unitary(),
        marked: problem.projector.reflection(),
        zero: Projector::zeros(&registers).reflection(),
        minus: GlobalPhase::new(registers.clone(), C64::new(-1.0, 0.0)),
        registers,
        flip_marked_sign: false,
    }
}

impl GroverIterate {
    /// Fault injection: replaces `S_Π` by `−S_Π`. Used to check that the
    /// self-check suites notice a broken reflection.
    pub fn with_flipped_marked_sign(mut self) -> Self {
        self.flip_marked_sign = true;
        self
    }
}

impl QuantumOp for GroverIterate {
    fn label(&self) -> &str {
        "Q"
    }

    fn registers(&self) -> Vec<String> {
        self.registers.clone()
    }

    fn apply_in(&self, ctx: &mut ApplyCtx<'_>) -> Result<()> {
        let steps: [(&dyn QuantumOp, bool); 5] = [
            (&self.marked, false),
            (self.unitary.as_ref(), true),
            (&self.zero, false),
            (self.unitary.as_ref(), false),
            (&self.minus, false),
        ];
        let forward = !ctx.is_inverse();
        let order: Vec<usize> = if forward {
            (0..5).collect()
        } else {
            (0..5).rev().collect()
        };
        for i in order {
            let (op, inv) = steps[i];
            ctx.run(op, inv)?;
        }
        if self.flip_marked_sign {
            ctx.run(&self.minus, false)?;
        }
        Ok(())
    }
}

/// Size of the phase register.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseRegister {
    /// `M = t`, Fourier transform over `Z_t`.
    #[default]
    Exact,
    /// `M = 2^⌈log₂ t⌉`, the qubit-register form.
    PowerOfTwo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AeConfig {
    pub t: usize,
    pub phase_register: PhaseRegister,
    /// Replaces `S_Π` by `−S_Π` (fault injection).
    #[serde(default)]
    pub flip_marked_sign: bool,
}

impl AeConfig {
    pub fn new(t: usize) -> Self {
        AeConfig {
            t,
            phase_register: PhaseRegister::Exact,
            flip_marked_sign: false,
        }
    }

    pub fn power_of_two(t: usize) -> Self {
        AeConfig {
            phase_register: PhaseRegister::PowerOfTwo,
            ..AeConfig::new(t)
        }
    }

    /// Phase-register dimension `M ≥ t`.
    pub fn m(&self) -> usize {
        match self.phase_register {
            PhaseRegister::Exact => self.t,
            PhaseRegister::PowerOfTwo => self.t.next_power_of_two(),
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if self.t == 0 {
            return Err(Error::Parameter("amplitude estimation needs t ≥ 1".into()));
        }
        Ok(())
    }

    pub(crate) fn iterate(&self, problem: &AmplitudeProblem) -> GroverIterate {
        let q = grover_iterate(problem);
        if self.flip_marked_sign {
            q.with_flipped_marked_sign()
        } else {
            q
        }
    }
}

/// One amplitude-estimation outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AeResult {
    /// `p̃ = sin²(πy/M)`.
    pub estimate: f64,
    pub y: usize,
    pub m: usize,
    pub ledger: QueryLedger,
}

/// Distribution of the measured phase-register value `y` for one problem,
/// with the ledger of a single run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseDistribution {
    pub m: usize,
    pub probabilities: Vec<f64>,
    pub ledger: QueryLedger,
}

/// `sin²(πy/M)`.
pub fn estimate_from_phase(y: usize, m: usize) -> f64 {
    let s = (PI * y as f64 / m as f64).sin();
    (s * s).clamp(0.0, 1.0)
}

impl PhaseDistribution {
    /// One measurement of the phase register.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> AeResult {
        let total: f64 = self.probabilities.iter().sum();
        let y = crate::statevec::sample_index(&self.probabilities, total, rng);
        AeResult {
            estimate: estimate_from_phase(y, self.m),
            y,
            m: self.m,
            ledger: self.ledger.clone(),
        }
    }

    /// Probability that the estimate satisfies `pred`.
    pub fn probability_that(&self, pred: impl Fn(f64) -> bool) -> f64 {
        self.probabilities
            .iter()
            .enumerate()
            .filter(|(y, _)| pred(estimate_from_phase(*y, self.m)))
            .map(|(_, p)| p)
            .sum()
    }
}

/// Runs amplitude estimation with `t` Grover iterations and measures once.
pub fn amplitude_estimation<R: Rng + ?Sized>(
    problem: &AmplitudeProblem,
    t: usize,
    rng: &mut R,
) -> Result<AeResult> {
    Ok(phase_distribution(problem, &AeConfig::new(t))?.sample(rng))
}

/// Analytic phase-estimation distribution for amplitude `a` with `M`
/// outcomes: the average of the Fejér kernels centred at `±Mθ/π`.
pub fn qpe_distribution(a: f64, m: usize) -> Vec<f64> {
    let theta = a.clamp(0.0, 1.0).sqrt().asin();
    let mf = m as f64;
    let kernel = |delta: f64| {
        let den = (PI * delta / mf).sin();
        if den.abs() < 1e-12 {
            1.0
        } else {
            let num = (PI * delta).sin();
            (num * num) / (mf * mf * den * den)
        }
    };
    let centre = mf * theta / PI;
    (0..m)
        .map(|y| 0.5 * (kernel(y as f64 - centre) + kernel(y as f64 + centre)))
        .collect()
}

/// Iterations used by the zero tester at threshold `ε`: `⌈10π/√ε⌉`.
pub fn zero_tester_iterations(eps: f64) -> usize {
    (10.0 * PI / eps.sqrt()).ceil() as usize
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum ZeroVerdict {
    Yes,
    No,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroTestOutcome {
    pub verdict: ZeroVerdict,
    pub t: usize,
    pub result: AeResult,
}

/// The zero tester at threshold `eps`: estimates with `⌈10π/√ε⌉`
/// iterations and answers YES iff `p̃ < ε/2`.
pub fn zero_tester<R: Rng + ?Sized>(
    problem: &AmplitudeProblem,
    eps: f64,
    rng: &mut R,
) -> Result<ZeroTestOutcome> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Parameter(format!(
            "zero-tester threshold must lie in (0,1), got {eps}"
        )));
    }
    let t = zero_tester_iterations(eps);
    let result = amplitude_estimation(problem, t, rng)?;
    let verdict = if result.estimate < eps / 2.0 {
        ZeroVerdict::Yes
    } else {
        ZeroVerdict::No
    };
    Ok(ZeroTestOutcome { verdict, t, result })
}
