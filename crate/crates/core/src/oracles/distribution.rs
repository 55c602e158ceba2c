use rand::Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::{Error, Result, DISTRIBUTION_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleSpace {
    /// Elements `0..size`.
    Range { size: usize },
    /// `{0,1}^bits`; element `x` has coordinate `i` in bit `bits − 1 − i`.
    Bitstring { bits: u32 },
}

impl SampleSpace {
    pub fn len(&self) -> usize {
        match *self {
            SampleSpace::Range { size } => size,
            SampleSpace::Bitstring { bits } => 1usize << bits,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Largest supported bitstring length.
pub const MAX_BITS: u32 = 20;

/// Finite probability vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Distribution {
    space: SampleSpace,
    weights: Vec<f64>,
}

impl Distribution {
    pub fn new(space: SampleSpace, weights: Vec<f64>) -> Result<Self> {
        if let SampleSpace::Bitstring { bits } = space {
            if bits == 0 || bits > MAX_BITS {
                return Err(Error::InvalidDistribution(format!(
                    "bitstring length {bits} outside 1..={MAX_BITS}"
                )));
            }
        }
        if weights.is_empty() {
            return Err(Error::InvalidDistribution("empty sample space".into()));
        }
        if weights.len() != space.len() {
            return Err(Error::InvalidDistribution(format!(
                "{} weights for a sample space of size {}",
                weights.len(),
                space.len()
            )));
        }
        if let Some((i, w)) = weights
            .iter()
            .enumerate()
            .find(|(_, w)| !w.is_finite() || **w < 0.0)
        {
            return Err(Error::InvalidDistribution(format!("weight {i} is {w}")));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > DISTRIBUTION_TOL {
            return Err(Error::InvalidDistribution(format!("weights sum to {sum}")));
        }
        Ok(Distribution { space, weights })
    }

    pub fn over_range(weights: Vec<f64>) -> Result<Self> {
        Self::new(
            SampleSpace::Range {
                size: weights.len(),
            },
            weights,
        )
    }

    pub fn over_bitstrings(bits: u32, weights: Vec<f64>) -> Result<Self> {
        Self::new(SampleSpace::Bitstring { bits }, weights)
    }

    pub fn uniform(space: SampleSpace) -> Result<Self> {
        let n = space.len();
        Self::new(space, vec![1.0 / n as f64; n])
    }

    pub fn point_mass(space: SampleSpace, element: usize) -> Result<Self> {
        let mut w = vec![0.0; space.len()];
        *w.get_mut(element).ok_or_else(|| {
            Error::Parameter(format!("element {element} outside the sample space"))
        })? = 1.0;
        Self::new(space, w)
    }

    /// Uniformly random point of the probability simplex.
    pub fn random<R: Rng + ?Sized>(space: SampleSpace, rng: &mut R) -> Result<Self> {
        let raw: Vec<f64> = (0..space.len())
            .map(|_| rng.sample::<f64, _>(Exp1))
            .collect();
        let sum: f64 = raw.iter().sum();
        Self::new(space, raw.into_iter().map(|x| x / sum).collect())
    }

    pub fn space(&self) -> SampleSpace {
        self.space
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn bits(&self) -> Option<u32> {
        match self.space {
            SampleSpace::Bitstring { bits } => Some(bits),
            SampleSpace::Range { .. } => None,
        }
    }

    /// Size after padding with zero-probability elements to a power of two.
    pub fn padded_len(&self) -> usize {
        self.len().next_power_of_two()
    }

    pub fn padded_weights(&self) -> Vec<f64> {
        let mut w = self.weights.clone();
        w.resize(self.padded_len(), 0.0);
        w
    }

    /// Reinterprets a range distribution of power-of-two size as one over
    /// bitstrings.
    pub fn to_bitstrings(&self) -> Result<Self> {
        match self.space {
            SampleSpace::Bitstring { .. } => Ok(self.clone()),
            SampleSpace::Range { size } if size.is_power_of_two() && size > 1 => {
                Self::over_bitstrings(size.trailing_zeros(), self.weights.clone())
            }
            SampleSpace::Range { size } => Err(Error::InvalidDistribution(format!(
                "range of size {size} is not a bitstring space"
            ))),
        }
    }

    /// Reinterprets the same weights over the range `0..len`.
    pub fn to_range(&self) -> Self {
        Distribution {
            space: SampleSpace::Range {
                size: self.weights.len(),
            },
            weights: self.weights.clone(),
        }
    }
}
