use rand::Rng;

use crate::oracles::{Distribution, SampleSpace};
use crate::reference::SubsetIndex;
use crate::{Error, Result};

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::Parameter(format!("ε must lie in (0,1], got {eps}")));
    }
    Ok(())
}

/// `p = (½, ½, 0, …)`, `q = ((1−ε)/2, (1+ε)/2, 0, …)` over `[n]`, so that
/// `‖p − q‖₂ = ε/√2`.
pub fn gen_l2_lowerbound_pair(n: usize, eps: f64) -> Result<(Distribution, Distribution)> {
    if n < 2 {
        return Err(Error::Parameter(format!("need n ≥ 2, got {n}")));
    }
    check_eps(eps)?;
    let mut p = vec![0.0; n];
    let mut q = vec![0.0; n];
    p[0] = 0.5;
    p[1] = 0.5;
    q[0] = (1.0 - eps) / 2.0;
    q[1] = (1.0 + eps) / 2.0;
    Ok((Distribution::over_range(p)?, Distribution::over_range(q)?))
}

/// `p_i = 1/n`, `q_i = (1 + (−1)^i ε)/n` for `i = 1..n` (even `n`), so that
/// `‖p − q‖₁ = ε`.
pub fn gen_l1_lowerbound_pair(n: usize, eps: f64) -> Result<(Distribution, Distribution)> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(Error::Parameter(format!("need even n ≥ 2, got {n}")));
    }
    check_eps(eps)?;
    let nf = n as f64;
    let q = (1..=n)
        .map(|i| {
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            (1.0 + sign * eps) / nf
        })
        .collect();
    Ok((
        Distribution::uniform(SampleSpace::Range { size: n })?,
        Distribution::over_range(q)?,
    ))
}

/// Density `1 + δχ_T` over `{0,1}ⁿ`, i.e. `p_x = (1 + δχ_T(x))/2ⁿ`.
pub fn gen_fourier_spike(n: u32, t: SubsetIndex, delta: f64) -> Result<Distribution> {
    if t.n != n || t.size() == 0 {
        return Err(Error::Parameter(
            "spike needs a non-empty subset of [n]".into(),
        ));
    }
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::Parameter(format!(
            "δ must lie in [0,1], got {delta}"
        )));
    }
    let scale = 1.0 / (1usize << n) as f64;
    Distribution::over_bitstrings(
        n,
        (0..1usize << n)
            .map(|x| (1.0 + delta * t.character(x)) * scale)
            .collect(),
    )
}

/// Uniform distribution over a multiset of `q` strings drawn uniformly with
/// replacement; duplicates count with multiplicity.
pub fn gen_random_multiset_uniform<R: Rng + ?Sized>(
    n: u32,
    q: usize,
    rng: &mut R,
) -> Result<Distribution> {
    if q == 0 {
        return Err(Error::Parameter("multiset needs Q ≥ 1".into()));
    }
    let space = SampleSpace::Bitstring { bits: n };
    let size = space.len();
    let mut w = vec![0.0; size];
    let unit = 1.0 / q as f64;
    for _ in 0..q {
        w[rng.random_range(0..size)] += unit;
    }
    let sum: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= sum);
    Distribution::over_bitstrings(n, w)
}

/// Uniform over the even-parity strings of length `n`: `(n−1)`-wise but not
/// `n`-wise uniform.
pub fn gen_parity_uniform(n: u32) -> Result<Distribution> {
    if n < 2 {
        return Err(Error::Parameter(format!("need n ≥ 2, got {n}")));
    }
    let w = 1.0 / (1usize << (n - 1)) as f64;
    Distribution::over_bitstrings(
        n,
        (0..1usize << n)
            .map(|x| if x.count_ones() % 2 == 0 { w } else { 0.0 })
            .collect(),
    )
}

/// Uniform over the Hadamard-code words `x_i = ⟨a, v_i⟩ mod 2`,
/// `a ∈ {0,1}^m`, with `v_1..v_n` distinct non-zero vectors of `F₂^m` and `m`
/// minimal. Any two coordinates are independent, so the distribution is
/// pairwise uniform; for `n ≥ 3` its support has `2^m < 2ⁿ` strings.
pub fn gen_hadamard_code_uniform(n: u32) -> Result<Distribution> {
    if n < 2 {
        return Err(Error::Parameter(format!("need n ≥ 2, got {n}")));
    }
    let mut m = 1;
    while (1usize << m) - 1 < n as usize {
        m += 1;
    }
    let mut w = vec![0.0; 1 << n];
    let unit = 1.0 / (1usize << m) as f64;
    for a in 0usize..1 << m {
        let x = (1..=n as usize).fold(0usize, |acc, v| {
            (acc << 1) | ((a & v).count_ones() as usize & 1)
        });
        w[x] += unit;
    }
    Distribution::over_bitstrings(n, w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference::{
        fourier_weight, hellinger_distance, is_kwise_uniform, lp_distance, tv_distance,
    };
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn l2_pair_distance() {
        for eps in [0.1, 0.3, 0.4] {
            let (p, q) = gen_l2_lowerbound_pair(8, eps).unwrap();
            assert!((lp_distance(&p, &q, 2).unwrap() - eps / 2f64.sqrt()).abs() < 1e-15);
            let closed = (1.0 - (1.0 + eps).sqrt() / 2.0 - (1.0 - eps).sqrt() / 2.0).sqrt();
            let h = hellinger_distance(&p, &q).unwrap();
            assert!((h - closed).abs() < 1e-12);
            assert!(h <= eps);
        }
        assert!(gen_l2_lowerbound_pair(1, 0.1).is_err());
    }

    #[test]
    fn l1_pair_distance() {
        let (p, q) = gen_l1_lowerbound_pair(8, 0.3).unwrap();
        assert!((lp_distance(&p, &q, 1).unwrap() - 0.3).abs() < 1e-15);
        assert!(gen_l1_lowerbound_pair(7, 0.3).is_err());
    }

    #[test]
    fn spike_tv_and_weight() {
        let t = SubsetIndex::from_coordinates(4, &[1, 2]).unwrap();
        let p = gen_fourier_spike(4, t, 0.6).unwrap();
        let u = Distribution::uniform(SampleSpace::Bitstring { bits: 4 }).unwrap();
        assert!((tv_distance(&p, &u).unwrap() - 0.3).abs() < 1e-15);
        assert!((fourier_weight(&p, 2).unwrap() - 0.36).abs() < 1e-14);
        assert!(gen_fourier_spike(4, t, 1.5).is_err());
    }

    #[test]
    fn hadamard_code_is_pairwise_not_uniform() {
        for n in 3..=7 {
            let p = gen_hadamard_code_uniform(n).unwrap();
            assert!(is_kwise_uniform(&p, 2).unwrap(), "n = {n}");
            assert!(!is_kwise_uniform(&p, n).unwrap());
        }
    }

    #[test]
    fn multiset_weights_are_multiples_of_one_over_q() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = gen_random_multiset_uniform(5, 12, &mut rng).unwrap();
        for w in p.weights() {
            let c = w * 12.0;
            assert!((c - c.round()).abs() < 1e-12);
        }
    }
}
