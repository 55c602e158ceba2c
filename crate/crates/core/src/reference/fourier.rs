use serde::{Deserialize, Serialize};

use crate::oracles::{Distribution, MAX_BITS};
use crate::{Error, Result, DISTRIBUTION_TOL};

/// Squared Fourier weight below this counts as zero.
pub const FOURIER_ZERO_TOL: f64 = 1e-18;

/// A subset `S ⊆ [n]` as a bitmask: coordinate `i` is bit `n−1−i`, the
/// same convention as bitstring indices, so `χ_S(x) = (−1)^{|S ∧ x|}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SubsetIndex {
    pub n: u32,
    pub mask: usize,
}

impl SubsetIndex {
    pub fn new(n: u32, mask: usize) -> Result<Self> {
        if n > MAX_BITS || mask >> n != 0 {
            return Err(Error::Parameter(format!(
                "mask {mask:#b} is not a subset of [{n}]"
            )));
        }
        Ok(SubsetIndex { n, mask })
    }

    pub fn from_coordinates(n: u32, coords: &[u32]) -> Result<Self> {
        let mut mask = 0usize;
        for &i in coords {
            if i >= n {
                return Err(Error::Parameter(format!("coordinate {i} outside [{n}]")));
            }
            mask |= 1 << (n - 1 - i);
        }
        SubsetIndex::new(n, mask)
    }

    pub fn size(&self) -> u32 {
        self.mask.count_ones()
    }

    pub fn coordinates(&self) -> Vec<u32> {
        (0..self.n)
            .filter(|i| self.mask >> (self.n - 1 - i) & 1 == 1)
            .collect()
    }

    /// `χ_S(x)`.
    pub fn character(&self, x: usize) -> f64 {
        if (self.mask & x).count_ones().is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }
}

/// `φ(x) = 2ⁿ p_x`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityFunction {
    n: u32,
    values: Vec<f64>,
}

impl DensityFunction {
    pub fn new(n: u32, values: Vec<f64>) -> Result<Self> {
        if n == 0 || n > MAX_BITS || values.len() != 1 << n {
            return Err(Error::Parameter(format!(
                "density over {{0,1}}^{n} needs 2^{n} values, got {}",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidDistribution(
                "density values must be non-negative".into(),
            ));
        }
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        if (mean - 1.0).abs() > DISTRIBUTION_TOL {
            return Err(Error::InvalidDistribution(format!(
                "density has mean {mean}, expected 1"
            )));
        }
        Ok(DensityFunction { n, values })
    }

    pub fn from_distribution(p: &Distribution) -> Result<Self> {
        let n = bits_of(p)?;
        let scale = (1usize << n) as f64;
        DensityFunction::new(n, p.weights().iter().map(|w| w * scale).collect())
    }

    pub fn to_distribution(&self) -> Result<Distribution> {
        let scale = (1usize << self.n) as f64;
        Distribution::over_bitstrings(self.n, self.values.iter().map(|v| v / scale).collect())
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

fn bits_of(p: &Distribution) -> Result<u32> {
    p.bits().ok_or_else(|| {
        Error::Parameter("Fourier analysis needs a distribution over {0,1}^n".into())
    })
}

/// `φ̂(S) = 2⁻ⁿ Σ_x φ(x) χ_S(x) = Σ_x p_x χ_S(x)`, by direct summation.
pub fn fourier_coefficient(p: &Distribution, s: SubsetIndex) -> Result<f64> {
    let n = bits_of(p)?;
    if s.n != n {
        return Err(Error::Parameter(format!(
            "subset of [{}] for a distribution over {{0,1}}^{n}",
            s.n
        )));
    }
    Ok(p.weights()
        .iter()
        .enumerate()
        .map(|(x, w)| w * s.character(x))
        .sum())
}

/// All coefficients `φ̂(S)` indexed by mask, via the fast Walsh–Hadamard
/// transform.
pub fn fourier_spectrum(p: &Distribution) -> Result<Vec<f64>> {
    bits_of(p)?;
    let mut a = p.weights().to_vec();
    let mut h = 1;
    while h < a.len() {
        for block in a.chunks_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (x, y) in lo.iter_mut().zip(hi.iter_mut()) {
                let (u, v) = (*x, *y);
                *x = u + v;
                *y = u - v;
            }
        }
        h *= 2;
    }
    Ok(a)
}

/// `Σ_{1≤|S|≤k} φ̂(S)²`.
pub fn fourier_weight(p: &Distribution, k: u32) -> Result<f64> {
    let n = bits_of(p)?;
    if k > n {
        return Err(Error::Parameter(format!("k = {k} exceeds n = {n}")));
    }
    Ok(fourier_spectrum(p)?
        .iter()
        .enumerate()
        .filter(|(s, _)| (1..=k).contains(&s.count_ones()))
        .map(|(_, c)| c * c)
        .sum())
}

/// `M^n_k = Σ_{i=1}^k C(n, i)`.
pub fn binom_sum(n: u32, k: u32) -> Result<u64> {
    if k > n {
        return Err(Error::Parameter(format!("k = {k} exceeds n = {n}")));
    }
    let mut c = 1u64;
    let mut sum = 0u64;
    for i in 1..=k as u64 {
        c = c * (n as u64 - i + 1) / i;
        sum += c;
    }
    Ok(sum)
}

fn k_subsets(n: u32, k: u32) -> impl Iterator<Item = usize> {
    (0usize..1 << n).filter(move |s| s.count_ones() == k)
}

/// Every marginal on `k` coordinates is uniform (within `1e-9`). Marginals on
/// fewer coordinates then are too.
pub fn is_kwise_uniform(p: &Distribution, k: u32) -> Result<bool> {
    let n = bits_of(p)?;
    if k > n {
        return Err(Error::Parameter(format!("k = {k} exceeds n = {n}")));
    }
    if k == 0 {
        return Ok(true);
    }
    let target = 1.0 / (1usize << k) as f64;
    for mask in k_subsets(n, k) {
        let bits: Vec<usize> = (0..n as usize).filter(|b| mask >> b & 1 == 1).collect();
        let mut marginal = vec![0.0; 1 << k];
        for (x, w) in p.weights().iter().enumerate() {
            let pattern = bits
                .iter()
                .enumerate()
                .fold(0usize, |acc, (j, &b)| acc | ((x >> b & 1) << j));
            marginal[pattern] += w;
        }
        if marginal
            .iter()
            .any(|m| (m - target).abs() > DISTRIBUTION_TOL)
        {
            return Ok(false);
        }
    }
    Ok(true)
}
