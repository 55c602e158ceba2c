use crate::{Error, Result};

/// Hard cap on the joint dimension of a layout (2^28 amplitudes, 4 GiB).
const MAX_TOTAL_DIM: usize = 1 << 28;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Register {
    pub name: String,
    pub dim: usize,
}

/// Ordered list of named registers. The first register is the most
/// significant digit of the joint basis index.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RegisterLayout {
    registers: Vec<Register>,
    strides: Vec<usize>,
    total_dim: usize,
}

impl RegisterLayout {
    pub fn new<I, S>(registers: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, usize)>,
        S: Into<String>,
    {
        let registers: Vec<Register> = registers
            .into_iter()
            .map(|(name, dim)| Register {
                name: name.into(),
                dim,
            })
            .collect();
        let mut total_dim = 1usize;
        for (i, reg) in registers.iter().enumerate() {
            if reg.dim == 0 {
                return Err(Error::ZeroDimension(reg.name.clone()));
            }
            if registers[..i].iter().any(|r| r.name == reg.name) {
                return Err(Error::DuplicateRegister(reg.name.clone()));
            }
            total_dim = total_dim
                .checked_mul(reg.dim)
                .filter(|&d| d <= MAX_TOTAL_DIM)
                .ok_or(Error::LayoutTooLarge)?;
        }
        let mut strides = vec![1usize; registers.len()];
        for i in (0..registers.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * registers[i + 1].dim;
        }
        Ok(RegisterLayout {
            registers,
            strides,
            total_dim,
        })
    }

    /// Returns a new layout with `other`'s registers appended.
    pub fn concat(&self, other: &RegisterLayout) -> Result<Self> {
        RegisterLayout::new(
            self.registers
                .iter()
                .chain(other.registers.iter())
                .map(|r| (r.name.clone(), r.dim)),
        )
    }

    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    pub fn total_dim(&self) -> usize {
        self.total_dim
    }

    pub fn position(&self, name: &str) -> Result<usize> {
        self.registers
            .iter()
            .position(|r| r.name == name)
            .ok_or_else(|| Error::UnknownRegister(name.to_string()))
    }

    pub fn dim_of(&self, name: &str) -> Result<usize> {
        Ok(self.registers[self.position(name)?].dim)
    }

    pub(crate) fn dim_at(&self, pos: usize) -> usize {
        self.registers[pos].dim
    }

    pub(crate) fn stride_at(&self, pos: usize) -> usize {
        self.strides[pos]
    }

    /// Joint index of the basis state with the given per-register values.
    pub fn encode(&self, values: &[usize]) -> Result<usize> {
        if values.len() != self.registers.len() {
            return Err(Error::Parameter(format!(
                "expected {} register values, got {}",
                self.registers.len(),
                values.len()
            )));
        }
        let mut idx = 0;
        for (pos, &v) in values.iter().enumerate() {
            let reg = &self.registers[pos];
            if v >= reg.dim {
                return Err(Error::DimensionMismatch {
                    register: reg.name.clone(),
                    expected: reg.dim,
                    actual: v + 1,
                });
            }
            idx += v * self.strides[pos];
        }
        Ok(idx)
    }

    pub fn decode(&self, index: usize) -> Vec<usize> {
        self.strides
            .iter()
            .zip(&self.registers)
            .map(|(&s, r)| (index / s) % r.dim)
            .collect()
    }

    /// Value of register `pos` at joint index `index`.
    pub(crate) fn digit(&self, index: usize, pos: usize) -> usize {
        (index / self.strides[pos]) % self.registers[pos].dim
    }
}
