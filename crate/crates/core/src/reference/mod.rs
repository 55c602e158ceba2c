//! Classical ground truth: exact distances, Fourier analysis over
//! `{0,1}ⁿ`, k-wise uniformity checks, instance generators and a plug-in
//! sampling baseline.

mod fourier;
mod generators;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution as _;
use rand::Rng;

use crate::oracles::Distribution;
use crate::{Error, Result};

pub use fourier::{
    binom_sum, fourier_coefficient, fourier_spectrum, fourier_weight, is_kwise_uniform,
    DensityFunction, SubsetIndex, FOURIER_ZERO_TOL,
};
pub use generators::{
    gen_fourier_spike, gen_hadamard_code_uniform, gen_l1_lowerbound_pair, gen_l2_lowerbound_pair,
    gen_parity_uniform, gen_random_multiset_uniform,
};

fn check_same_space(p: &Distribution, q: &Distribution) -> Result<()> {
    if p.len() != q.len() {
        return Err(Error::SampleSpaceMismatch(format!(
            "{} vs {} elements",
            p.len(),
            q.len()
        )));
    }
    Ok(())
}

/// `‖p − q‖_α` for `α ∈ {1, 2}`.
pub fn lp_distance(p: &Distribution, q: &Distribution, alpha: u32) -> Result<f64> {
    check_same_space(p, q)?;
    let diffs = p
        .weights()
        .iter()
        .zip(q.weights())
        .map(|(a, b)| (a - b).abs());
    match alpha {
        1 => Ok(diffs.sum()),
        2 => Ok(diffs.map(|d| d * d).sum::<f64>().sqrt()),
        _ => Err(Error::Parameter(format!("α must be 1 or 2, got {alpha}"))),
    }
}

/// `½‖p − q‖₁`.
pub fn tv_distance(p: &Distribution, q: &Distribution) -> Result<f64> {
    Ok(0.5 * lp_distance(p, q, 1)?)
}

/// `√(½ Σ (√p_i − √q_i)²)`.
pub fn hellinger_distance(p: &Distribution, q: &Distribution) -> Result<f64> {
    check_same_space(p, q)?;
    let s: f64 = p
        .weights()
        .iter()
        .zip(q.weights())
        .map(|(a, b)| (a.sqrt() - b.sqrt()).powi(2))
        .sum();
    Ok((0.5 * s).sqrt())
}

fn empirical<R: Rng + ?Sized>(p: &Distribution, samples: usize, rng: &mut R) -> Vec<f64> {
    let idx = WeightedIndex::new(p.weights()).expect("distribution weights are valid");
    let mut counts = vec![0usize; p.len()];
    for _ in 0..samples {
        counts[idx.sample(rng)] += 1;
    }
    counts
        .into_iter()
        .map(|c| c as f64 / samples as f64)
        .collect()
}

/// ℓ² distance between the empirical distributions of `samples` independent
/// draws from each of `p` and `q`.
pub fn classical_sampling_l2_estimate<R: Rng + ?Sized>(
    p: &Distribution,
    q: &Distribution,
    samples: usize,
    rng: &mut R,
) -> Result<f64> {
    check_same_space(p, q)?;
    if samples == 0 {
        return Err(Error::Parameter("need at least one sample".into()));
    }
    let ep = empirical(p, samples, rng);
    let eq = empirical(q, samples, rng);
    Ok(ep
        .iter()
        .zip(&eq)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::SampleSpace;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn range(w: &[f64]) -> Distribution {
        Distribution::over_range(w.to_vec()).unwrap()
    }

    #[test]
    fn distances_on_disjoint_point_masses() {
        let (p, q) = (range(&[1.0, 0.0]), range(&[0.0, 1.0]));
        assert_eq!(lp_distance(&p, &q, 1).unwrap(), 2.0);
        assert!((lp_distance(&p, &q, 2).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(tv_distance(&p, &q).unwrap(), 1.0);
        assert!((hellinger_distance(&p, &q).unwrap() - 1.0).abs() < 1e-15);
        for a in [1, 2] {
            assert_eq!(lp_distance(&p, &p, a).unwrap(), 0.0);
        }
        assert_eq!(hellinger_distance(&p, &p).unwrap(), 0.0);
        assert!(lp_distance(&p, &q, 3).is_err());
        assert!(lp_distance(&p, &range(&[0.5, 0.25, 0.25]), 1).is_err());
    }

    #[test]
    fn sampling_baseline() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (p, q) = (range(&[1.0, 0.0]), range(&[0.0, 1.0]));
        for n in [1, 7, 100] {
            let e = classical_sampling_l2_estimate(&p, &q, n, &mut rng).unwrap();
            assert!((e - 2f64.sqrt()).abs() < 1e-15);
        }
        let u = Distribution::uniform(SampleSpace::Range { size: 8 }).unwrap();
        let e = classical_sampling_l2_estimate(&u, &u, 100_000, &mut rng).unwrap();
        assert!((0.0..0.05).contains(&e));
        assert!(classical_sampling_l2_estimate(&u, &u, 0, &mut rng).is_err());
    }
}
