//! Primitive operators. Everything else in the crate is composed from these.

use std::f64::consts::FRAC_1_SQRT_2;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use crate::statevec::{ApplyCtx, Condition, QuantumOp};
use crate::{Error, Result, C64};

fn check_local_dim(ctx: &ApplyCtx<'_>, targets: &[String], expected: usize) -> Result<()> {
    let actual = ctx.local_dim(targets)?;
    if actual != expected {
        return Err(Error::DimensionMismatch {
            register: targets.join(","),
            expected,
            actual,
        });
    }
    Ok(())
}

/// Dense unitary on the joint space of its target registers (first target
/// most significant).
#[derive(Debug, Clone)]
pub struct LocalUnitary {
    label: String,
    registers: Vec<String>,
    dim: usize,
    /// Row-major.
    matrix: Vec<C64>,
}

impl LocalUnitary {
    pub fn new(
        label: impl Into<String>,
        registers: Vec<String>,
        dim: usize,
        matrix: Vec<C64>,
    ) -> Result<Self> {
        if matrix.len() != dim * dim {
            return Err(Error::Parameter(format!(
                "matrix has {} entries, expected {}",
                matrix.len(),
                dim * dim
            )));
        }
        for i in 0..dim {
            for j in 0..dim {
                let dot: C64 = (0..dim)
                    .map(|k| matrix[k * dim + i].conj() * matrix[k * dim + j])
                    .sum();
                let want = if i == j { 1.0 } else { 0.0 };
                if (dot - want).norm() > 1e-10 {
                    return Err(Error::NotUnitary(format!(
                        "column inner product ({i},{j}) = {dot}"
                    )));
                }
            }
        }
        Ok(LocalUnitary {
            label: label.into(),
            registers,
            dim,
            matrix,
        })
    }

    pub fn matrix(&self) -> &[C64] {
        &self.matrix
    }
}

impl QuantumOp for LocalUnitary {
    fn label(&self) -> &str {
        &self.label
    }

    fn registers(&self) -> Vec<String> {
        self.registers.clone()
    }

    fn apply_in(&self, ctx: &mut ApplyCtx<'_>) -> Result<()> {
        check_local_dim(ctx, &self.registers, self.dim)?;
        let d = self.dim;
        let m = &self.matrix;
        if ctx.is_inverse() {
            ctx.for_each_block(&self.registers, &[], |buf, tmp| {
                for (i, out) in tmp.iter_mut().enumerate() {
                    *out = (0..d).map(|k| m[k * d + i].conj() * buf[k]).sum();
                }
                buf.copy_from_slice(tmp);
            })
        } else {
            ctx.for_each_block(&self.registers, &[], |buf, tmp| {
                for (i, out) in tmp.iter_mut().enumerate() {
                    let row = &m[i * d..(i + 1) * d];
                    *out = row.iter().zip(buf.iter()).map(|(a, b)| a * b).sum();
                }
                buf.copy_from_slice(tmp);
            })
        }
    }
}

fn qubit_gate(label: &str, register: &str, m: [f64; 4]) -> LocalUnitary {
    LocalUnitary {
        label: label.to_string(),
        registers: vec![register.to_string()],
        dim: 2,
        matrix: m.iter().map(|&x| C64::new(x, 0.0)).collect(),
    }
}

pub fn hadamard(register: &str) -> LocalUnitary {
    let h = FRAC_1_SQRT_2;
    qubit_gate("H", register, [h, h, h, -h])
}

pub fn pauli_x(register: &str) -> LocalUnitary {
    qubit_gate("X", register, [0.0, 1.0, 1.0, 0.0])
}

/// Multiplies by −1 every amplitude whose registers match `pattern`; an
/// empty pattern flips the whole (controlled) block. Self-inverse.
#[derive(Debug, Clone)]
pub struct PhaseFlip {
    label: String,
    pattern: Vec<(String, usize)>,
    qubits_only: bool,
}

impl PhaseFlip {
    pub fn new(label: impl Into<String>, pattern: Vec<(String, usize)>) -> Self {
        PhaseFlip {
            label: label.into(),
            pattern,
            qubits_only: false,
        }
    }
}

impl QuantumOp for PhaseFlip {
    fn label(&self) -> &str {
        &self.label
    }

    fn registers(&self) -> Vec<String> {
        self.pattern.iter().map(|(r, _)| r.clone()).collect()
    }

    fn apply_in(&self, ctx: &mut ApplyCtx<'_>) -> Result<()> {
        let mut extra = Vec::with_capacity(self.pattern.len());
        for (reg, value) in &self.pattern {
            let dim = ctx.layout().dim_of(reg)?;
            if self.qubits_only && dim != 2 {
                return Err(Error::NotAQubit {
                    register: reg.clone(),
                    dim,
                });
            }
            if *value >= dim {
                return Err(Error::DimensionMismatch {
                    register: reg.clone(),
                    expected: dim,
                    actual: value + 1,
                });
            }
            extra.push((reg.clone(), Condition::Equals(*value)));
        }
        ctx.for_each_block(&[], &extra, |buf, _| buf[0] = -buf[0])
    }
}

/// Controlled-Z between two qubit registers.
pub fn controlled_z(control: &str, target: &str) -> PhaseFlip {
    PhaseFlip {
        label: "CZ".into(),
        pattern: vec![(control.to_string(), 1), (target.to_string(), 1)],
        qubits_only: true,
    }
}

/// Multiplies the (controlled) block by a phase. Uncontrolled this is a
/// global phase; under a control it becomes a relative one.
#[derive(Debug, Clone)]
pub struct GlobalPhase {
    label: String,
    registers: Vec<String>,
    phase: C64,
}

impl GlobalPhase {
    pub fn new(registers: Vec<String>, phase: C64) -> Self {
        GlobalPhase {
            label: "phase".into(),
            registers,
            phase,
        }
    }
}

impl QuantumOp for GlobalPhase {
    fn label(&self) -> &str {
        &self.label
    }

    fn registers(&self) -> Vec<String> {
        self.registers.clone()
    }

    fn apply_in(&self, ctx: &mut ApplyCtx<'_>) -> Result<()> {
        let phase = if ctx.is_inverse() {
            self.phase.conj()
        } else {
            self.phase
        };
        ctx.for_each_block(&[], &[], move |buf, _| buf[0] *= phase)
    }
}

/// Householder reflection `I − 2|w⟩⟨w|` sending |0⟩ to a real unit target
/// vector. It is its own inverse, so it also sends the target back to |0⟩.
#[derive(Debug, Clone)]
pub struct StatePrep {
    label: String,
    registers: Vec<String>,
    dim: usize,
    /// `None` when the target already is |0⟩.
    normal: Option<Vec<f64>>,
}

impl StatePrep {
    pub fn new(label: impl Into<String>, registers: Vec<String>, target: &[f64]) -> Result<Self> {
        let norm: f64 = target.iter().map(|x| x * x).sum::<f64>();
        if target.is_empty() || (norm - 1.0).abs() > 1e-10 || target.iter().any(|x| !x.is_finite())
        {
            return Err(Error::Parameter(format!(
                "state-preparation target must be a unit vector (norm² = {norm})"
            )));
        }
        let mut w = target.iter().map(|x| -x).collect::<Vec<f64>>();
        w[0] += 1.0;
        let wn = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        let normal = if wn < 1e-14 {
            None
        } else {
            Some(w.into_iter().map(|x| x / wn).collect())
        };
        Ok(StatePrep {
            label: label.into(),
            registers,
            dim: target.len(),
            normal,
        })
    }
}

impl QuantumOp for StatePrep {
    fn label(&self) -> &str {
        &self.label
    }

    fn registers(&self) -> Vec<String> {
        self.registers.clone()
    }

    fn apply_in(&self, ctx: &mut ApplyCtx<'_>) -> Result<()> {
        check_local_dim(ctx, &self.registers, self.dim)?;
        let Some(w) = &self.normal else {
            return Ok(());
        };
        ctx.for_each_block(&self.registers, &[], |buf, _| {
            let s: C64 = w.iter().zip(buf.iter()).map(|(wi, b)| b * *wi).sum();
            let s2 = s * 2.0;
            for (b, wi) in buf.iter_mut().zip(w) {
                *b -= s2 * *wi;
            }
        })
    }
}

/// Reversible classical function `|s⟩|t⟩ → |s⟩|t ⊕ f(s)⟩`. The target space
/// must have power-of-two dimension. Self-inverse.
#[derive(Debug, Clone)]
pub struct XorFunction {
    label: String,
    source: Vec<String>,
    target: Vec<String>,
    table: Vec<usize>,
    square: bool,
}

impl XorFunction {
    pub fn new(
        label: impl Into<String>,
        source: Vec<String>,
        target: Vec<String>,
        table: Vec<usize>,
    ) -> Self {
        XorFunction {
            label: label.into(),
            source,
            target,
            table,
            square: false,
        }
    }

    /// `|i⟩|j⟩ → |i⟩|j ⊕ i⟩` between two spaces of equal dimension `dim`.
    pub fn copy(source: Vec<String>, target: Vec<String>, dim: usize) -> Self {
        XorFunction {
            label: "copy".into(),
            source,
            target,
            table: (0..dim).collect(),
            square: true,
        }
    }
}

impl QuantumOp for XorFunction {
    fn label(&self) -> &str {
        &self.label
    }

    fn registers(&self) -> Vec<String> {
        self.source.iter().chain(&self.target).cloned().collect()
    }

    fn apply_in(&self, ctx: &mut ApplyCtx<'_>) -> Result<()> {
        let ds = ctx.local_dim(&self.source)?;
        let dt = ctx.local_dim(&self.target)?;
        if ds != self.table.len() {
            return Err(Error::DimensionMismatch {
                register: self.source.join(","),
                expected: self.table.len(),
                actual: ds,
            });
        }
        if self.square && ds != dt {
            return Err(Error::DimensionMismatch {
                register: self.target.join(","),
                expected: ds,
                actual: dt,
            });
        }
        if !dt.is_power_of_two() {
            return Err(Error::Parameter(format!(
                "XOR target dimension {dt} is not a power of two"
            )));
        }
        if let Some(&bad) = self.table.iter().find(|&&v| v >= dt) {
            return Err(Error::Parameter(format!(
                "function value {bad} does not fit target dimension {dt}"
            )));
        }
        let targets: Vec<String> = self.registers();
        let table = &self.table;
        ctx.for_each_block(&targets, &[], |buf, tmp| {
            for (s, &fs) in table.iter().enumerate() {
                for t in 0..dt {
                    tmp[s * dt + (t ^ fs)] = buf[s * dt + t];
                }
            }
            buf.copy_from_slice(tmp);
        })
    }
}

/// Quantum Fourier transform over Z_M on one register of dimension M:
/// `|x⟩ → M^{-1/2} Σ_y e^{2πi xy/M} |y⟩`.
#[derive(Clone)]
pub struct FourierTransform {
    label: String,
    register: String,
    dim: usize,
    plus: Arc<dyn Fft<f64>>,
    minus: Arc<dyn Fft<f64>>,
}

impl FourierTransform {
    pub fn new(register: &str, dim: usize) -> Self {
        let mut planner = FftPlanner::new();
        FourierTransform {
            label: "QFT".into(),
            register: register.to_string(),
            dim,
            plus: planner.plan_fft_inverse(dim),
            minus: planner.plan_fft_forward(dim),
        }
    }
}

impl QuantumOp for FourierTransform {
    fn label(&self) -> &str {
        &self.label
    }

    fn registers(&self) -> Vec<String> {
        vec![self.register.clone()]
    }

    fn apply_in(&self, ctx: &mut ApplyCtx<'_>) -> Result<()> {
        let regs = [self.register.clone()];
        check_local_dim(ctx, &regs, self.dim)?;
        let fft = if ctx.is_inverse() {
            Arc::clone(&self.minus)
        } else {
            Arc::clone(&self.plus)
        };
        let scale = 1.0 / (self.dim as f64).sqrt();
        ctx.for_each_block(&regs, &[], move |buf, _| {
            fft.process(buf);
            buf.iter_mut().for_each(|b| *b *= scale);
        })
    }
}
