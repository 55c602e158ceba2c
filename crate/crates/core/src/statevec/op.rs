use std::sync::Arc;

use crate::ledger::{QueryKind, QueryLedger};
use crate::statevec::kernel::{Condition, PlanKey};
use crate::statevec::{RegisterLayout, StateVector};
use crate::{Error, Result, C64};

/// A unitary acting in place on the registers it names.
///
/// Implementations only describe the forward action; inversion and control
/// are carried by the [`ApplyCtx`] and honoured by the primitive kernels, so
/// every operator automatically has inverse and controlled forms.
pub trait QuantumOp: Send + Sync {
    fn label(&self) -> &str;

    /// Registers the operator acts on.
    fn registers(&self) -> Vec<String>;

    fn apply_in(&self, ctx: &mut ApplyCtx<'_>) -> Result<()>;
}

pub type SharedOp = Arc<dyn QuantumOp>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ApplyMode {
    Forward,
    Inverse,
    /// Apply on the block where the qubit register `control` is |1⟩.
    Controlled {
        control: String,
        inverse: bool,
    },
}

/// Execution context threaded through nested operator applications.
pub struct ApplyCtx<'a> {
    state: &'a mut StateVector,
    ledger: &'a mut QueryLedger,
    conditions: Vec<(usize, Condition)>,
    inverse: bool,
}

impl<'a> ApplyCtx<'a> {
    pub fn new(state: &'a mut StateVector, ledger: &'a mut QueryLedger) -> Self {
        ApplyCtx {
            state,
            ledger,
            conditions: Vec::new(),
            inverse: false,
        }
    }

    pub fn is_inverse(&self) -> bool {
        self.inverse
    }

    pub fn is_controlled(&self) -> bool {
        !self.conditions.is_empty()
    }

    pub fn layout(&self) -> &RegisterLayout {
        self.state.layout()
    }

    pub fn record(&mut self, label: &str, kind: QueryKind) {
        let (inverse, controlled) = (self.inverse, self.is_controlled());
        self.ledger.record(label, kind, inverse, controlled);
    }

    /// Applies `op`, inverted relative to the current direction if `inverse`.
    pub fn run(&mut self, op: &dyn QuantumOp, inverse: bool) -> Result<()> {
        let saved = self.inverse;
        self.inverse ^= inverse;
        let out = op.apply_in(self);
        self.inverse = saved;
        out
    }

    /// Applies `op` on the block where `register` satisfies `condition`.
    pub fn run_controlled(
        &mut self,
        op: &dyn QuantumOp,
        register: &str,
        condition: Condition,
        inverse: bool,
    ) -> Result<()> {
        let pos = self.state.layout().position(register)?;
        self.conditions.push((pos, condition));
        let out = self.run(op, inverse);
        self.conditions.pop();
        out
    }

    /// Product of the dimensions of `targets`.
    pub fn local_dim(&self, targets: &[String]) -> Result<usize> {
        targets
            .iter()
            .map(|t| self.state.layout().dim_of(t))
            .product()
    }

    /// Runs `f(block, scratch)` over every block of `targets` under the
    /// active controls plus `extra` conditions.
    pub fn for_each_block<F>(
        &mut self,
        targets: &[String],
        extra: &[(String, Condition)],
        f: F,
    ) -> Result<()>
    where
        F: Fn(&mut [C64], &mut [C64]) + Sync + Send,
    {
        let layout = self.state.layout();
        let targets = targets
            .iter()
            .map(|t| layout.position(t))
            .collect::<Result<Vec<_>>>()?;
        let mut conditions = self.conditions.clone();
        for (name, cond) in extra {
            conditions.push((layout.position(name)?, *cond));
        }
        self.state.run_blocks(
            PlanKey {
                targets,
                conditions,
            },
            f,
        )
    }
}

/// Applies `op` to `state` in the given mode, recording attributed queries.
pub fn apply(
    op: &dyn QuantumOp,
    state: &mut StateVector,
    mode: ApplyMode,
    ledger: &mut QueryLedger,
) -> Result<()> {
    for reg in op.registers() {
        state.layout().position(&reg)?;
    }
    let mut ctx = ApplyCtx::new(state, ledger);
    match mode {
        ApplyMode::Forward => ctx.run(op, false),
        ApplyMode::Inverse => ctx.run(op, true),
        ApplyMode::Controlled { control, inverse } => {
            let dim = ctx.layout().dim_of(&control)?;
            if dim != 2 {
                return Err(Error::NotAQubit {
                    register: control,
                    dim,
                });
            }
            ctx.run_controlled(op, &control, Condition::Equals(1), inverse)
        }
    }
}

/// Ordered composition; step `i` is applied after step `i - 1`.
#[derive(Clone)]
pub struct Sequence {
    label: String,
    steps: Vec<(SharedOp, bool)>,
}

impl Sequence {
    pub fn new(label: impl Into<String>) -> Self {
        Sequence {
            label: label.into(),
            steps: Vec::new(),
        }
    }

    pub fn then(mut self, op: SharedOp) -> Self {
        self.steps.push((op, false));
        self
    }

    pub fn then_inverse(mut self, op: SharedOp) -> Self {
        self.steps.push((op, true));
        self
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

impl QuantumOp for Sequence {
    fn label(&self) -> &str {
        &self.label
    }

    fn registers(&self) -> Vec<String> {
        let mut regs: Vec<String> = Vec::new();
        for (op, _) in &self.steps {
            for r in op.registers() {
                if !regs.contains(&r) {
                    regs.push(r);
                }
            }
        }
        regs
    }

    fn apply_in(&self, ctx: &mut ApplyCtx<'_>) -> Result<()> {
        if ctx.is_inverse() {
            for (op, inv) in self.steps.iter().rev() {
                ctx.run(op.as_ref(), *inv)?;
            }
        } else {
            for (op, inv) in &self.steps {
                ctx.run(op.as_ref(), *inv)?;
            }
        }
        Ok(())
    }
}

/// Records one ledger entry under its label per application, then applies
/// the wrapped operator.
#[derive(Clone)]
pub struct Counted {
    label: String,
    kind: QueryKind,
    inner: SharedOp,
}

impl Counted {
    pub fn new(label: impl Into<String>, kind: QueryKind, inner: SharedOp) -> Self {
        Counted {
            label: label.into(),
            kind,
            inner,
        }
    }
}

impl QuantumOp for Counted {
    fn label(&self) -> &str {
        &self.label
    }

    fn registers(&self) -> Vec<String> {
        self.inner.registers()
    }

    fn apply_in(&self, ctx: &mut ApplyCtx<'_>) -> Result<()> {
        ctx.record(&self.label, self.kind);
        ctx.run(self.inner.as_ref(), false)
    }
}

/// `inner` applied on the block where `register` satisfies `condition`,
/// identity elsewhere.
#[derive(Clone)]
pub struct Controlled {
    label: String,
    register: String,
    condition: Condition,
    inner: SharedOp,
}

impl Controlled {
    pub fn new(register: impl Into<String>, condition: Condition, inner: SharedOp) -> Self {
        let register = register.into();
        Controlled {
            label: format!("c[{register}]-{}", inner.label()),
            register,
            condition,
            inner,
        }
    }
}

impl QuantumOp for Controlled {
    fn label(&self) -> &str {
        &self.label
    }

    fn registers(&self) -> Vec<String> {
        let mut regs = vec![self.register.clone()];
        regs.extend(self.inner.registers());
        regs
    }

    fn apply_in(&self, ctx: &mut ApplyCtx<'_>) -> Result<()> {
        ctx.run_controlled(self.inner.as_ref(), &self.register, self.condition, false)
    }
}
