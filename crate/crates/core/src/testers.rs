//! Closeness, distance-estimation and k-wise uniformity testers.
//!
//! Each tester builds its encoding, computes the phase-register
//! distribution of one amplitude-estimation run, and turns a measured
//! estimate into a verdict. [`PreparedTest`] exposes the prepared form so
//! that many trials of one instance cost one simulation.

use std::f64::consts::{E, PI};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::amplitude_estimation::{
    phase_distribution, zero_tester_iterations, AeConfig, AmplitudeProblem, PhaseDistribution,
    PhaseRegister,
};
use crate::ledger::QueryLedger;
use crate::oracles::{closeness_problem, kwise_problem, PurifiedOracle, SampleSpace};
use crate::reference::binom_sum;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Close,
    Far,
    Yes,
    No,
}

impl Verdict {
    /// CLOSE or YES.
    pub fn is_accept(self) -> bool {
        matches!(self, Verdict::Close | Verdict::Yes)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Close => "CLOSE",
            Verdict::Far => "FAR",
            Verdict::Yes => "YES",
            Verdict::No => "NO",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestKind {
    TolerantL2,
    L2,
    L1,
    KWise,
}

/// Parameters as given, plus the `ε` actually handed to the inner routine.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestParams {
    pub eps: f64,
    pub nu: Option<f64>,
    pub k: Option<u32>,
    /// Sample-space size (closeness) or string length (k-wise).
    pub n: usize,
    pub effective_eps: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestVerdict {
    pub kind: TestKind,
    pub verdict: Verdict,
    /// `Δ′` for closeness, `p̃` for k-wise.
    pub statistic: f64,
    pub t: usize,
    pub threshold: f64,
    pub params: TestParams,
    pub ledger: QueryLedger,
    /// Testers never check whether the input satisfies the promise.
    pub promise_unchecked: bool,
}

/// Knobs for the underlying amplitude estimation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TesterOptions {
    pub phase_register: PhaseRegister,
    /// Replaces `S_Π` by `−S_Π`; only useful to check that the self-check
    /// notices.
    pub flip_marked_sign: bool,
}

impl TesterOptions {
    fn config(&self, t: usize) -> AeConfig {
        AeConfig {
            t,
            phase_register: self.phase_register,
            flip_marked_sign: self.flip_marked_sign,
        }
    }
}

/// A tester with its amplitude-estimation outcome distribution computed.
#[derive(Debug, Clone)]
pub struct PreparedTest {
    kind: TestKind,
    params: TestParams,
    t: usize,
    threshold: f64,
    /// Accept iff the estimate is below this.
    cut: f64,
    phases: PhaseDistribution,
}

impl PreparedTest {
    pub fn kind(&self) -> TestKind {
        self.kind
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn params(&self) -> &TestParams {
        &self.params
    }

    pub fn phases(&self) -> &PhaseDistribution {
        &self.phases
    }

    /// Exact probability of CLOSE / YES.
    pub fn acceptance_probability(&self) -> f64 {
        let cut = self.cut;
        self.phases.probability_that(|p| p < cut)
    }

    fn verdict_for(&self, accept: bool) -> Verdict {
        match (self.kind, accept) {
            (TestKind::KWise, true) => Verdict::Yes,
            (TestKind::KWise, false) => Verdict::No,
            (_, true) => Verdict::Close,
            (_, false) => Verdict::Far,
        }
    }

    /// One run of the tester.
    pub fn trial<R: Rng + ?Sized>(&self, rng: &mut R) -> TestVerdict {
        let r = self.phases.sample(rng);
        TestVerdict {
            kind: self.kind,
            verdict: self.verdict_for(r.estimate < self.cut),
            statistic: r.estimate,
            t: self.t,
            threshold: self.threshold,
            params: self.params,
            ledger: r.ledger,
            promise_unchecked: true,
        }
    }

    /// Majority vote over `reps` (odd) runs; the ledger is the sum and the
    /// statistic the median.
    pub fn majority_trial<R: Rng + ?Sized>(&self, reps: usize, rng: &mut R) -> Result<TestVerdict> {
        if reps.is_multiple_of(2) {
            return Err(Error::Parameter(format!(
                "majority vote needs an odd number of repetitions, got {reps}"
            )));
        }
        let runs: Vec<TestVerdict> = (0..reps).map(|_| self.trial(rng)).collect();
        let accepts = runs.iter().filter(|v| v.verdict.is_accept()).count();
        let mut stats: Vec<f64> = runs.iter().map(|v| v.statistic).collect();
        stats.sort_by(f64::total_cmp);
        let mut ledger = QueryLedger::new();
        runs.iter().for_each(|v| ledger.absorb(&v.ledger));
        let mut out = runs.into_iter().next().expect("reps ≥ 1");
        out.verdict = self.verdict_for(2 * accepts > reps);
        out.statistic = stats[reps / 2];
        out.ledger = ledger;
        Ok(out)
    }
}

fn check_unit_open(name: &str, x: f64) -> Result<()> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::Parameter(format!(
            "{name} must lie in (0,1), got {x}"
        )));
    }
    Ok(())
}

fn closeness(p: &PurifiedOracle, q: &PurifiedOracle) -> Result<AmplitudeProblem> {
    closeness_problem(&p.relabeled("p"), &q.relabeled("q"))
}

/// Iterations of the tolerant tester: `⌈20π/(νε)⌉`.
pub fn tolerant_l2_iterations(eps: f64, nu: f64) -> usize {
    (20.0 * PI / (nu * eps)).ceil() as usize
}

/// Decision threshold of the tolerant tester: `(1/4 − ν/8)ε²`.
pub fn tolerant_l2_threshold(eps: f64, nu: f64) -> f64 {
    (0.25 - nu / 8.0) * eps * eps
}

fn prepare_l2_inner(
    p: &PurifiedOracle,
    q: &PurifiedOracle,
    kind: TestKind,
    params: TestParams,
    options: &TesterOptions,
) -> Result<PreparedTest> {
    let (eps, nu) = (params.effective_eps, params.nu.unwrap_or(0.5));
    check_unit_open("ε", eps)?;
    if !(nu > 0.0 && nu <= 1.0) {
        return Err(Error::Parameter(format!("ν must lie in (0,1], got {nu}")));
    }
    let t = tolerant_l2_iterations(eps, nu);
    let threshold = tolerant_l2_threshold(eps, nu);
    let phases = phase_distribution(&closeness(p, q)?, &options.config(t))?;
    Ok(PreparedTest {
        kind,
        params,
        t,
        threshold,
        cut: threshold,
        phases,
    })
}

/// Tolerant ℓ² closeness: decides `‖p − q‖₂ ≤ (1−ν)ε` versus `‖p − q‖₂ ≥ ε`.
pub fn prepare_tolerant_l2(
    p: &PurifiedOracle,
    q: &PurifiedOracle,
    eps: f64,
    nu: f64,
    options: &TesterOptions,
) -> Result<PreparedTest> {
    let params = TestParams {
        eps,
        nu: Some(nu),
        k: None,
        n: p.distribution().len(),
        effective_eps: eps,
    };
    prepare_l2_inner(p, q, TestKind::TolerantL2, params, options)
}

/// ℓ² closeness: the tolerant tester with `ν = ½`.
pub fn prepare_l2(
    p: &PurifiedOracle,
    q: &PurifiedOracle,
    eps: f64,
    options: &TesterOptions,
) -> Result<PreparedTest> {
    let params = TestParams {
        eps,
        nu: Some(0.5),
        k: None,
        n: p.distribution().len(),
        effective_eps: eps,
    };
    prepare_l2_inner(p, q, TestKind::L2, params, options)
}

/// ℓ¹ closeness over `[n]`: ℓ² closeness at `ε/√n`.
pub fn prepare_l1(
    p: &PurifiedOracle,
    q: &PurifiedOracle,
    eps: f64,
    options: &TesterOptions,
) -> Result<PreparedTest> {
    if !(eps > 0.0 && eps <= 2.0) {
        return Err(Error::Parameter(format!("ε must lie in (0,2], got {eps}")));
    }
    let n = p.distribution().len();
    let params = TestParams {
        eps,
        nu: Some(0.5),
        k: None,
        n,
        effective_eps: eps / (n as f64).sqrt(),
    };
    prepare_l2_inner(p, q, TestKind::L1, params, options)
}

/// Threshold handed to the zero tester by the k-wise tester:
/// `ε² / (e^{2k} M^n_k)`.
pub fn kwise_threshold(n: u32, k: u32, eps: f64) -> Result<f64> {
    let m = binom_sum(n, k)? as f64;
    Ok(eps * eps / ((2.0 * k as f64).exp() * m))
}

/// k-wise uniformity over `{0,1}ⁿ`: the zero tester on the Fourier
/// encoding at threshold [`kwise_threshold`].
pub fn prepare_kwise(
    oracle: &PurifiedOracle,
    k: u32,
    eps: f64,
    options: &TesterOptions,
) -> Result<PreparedTest> {
    let n = match oracle.distribution().space() {
        SampleSpace::Bitstring { bits } => bits,
        SampleSpace::Range { .. } => {
            return Err(Error::Parameter(
                "k-wise testing needs a distribution over {0,1}^n (wrong sample-space kind)".into(),
            ))
        }
    };
    if k == 0 || k > n {
        return Err(Error::Parameter(format!(
            "need 1 ≤ k ≤ n, got k = {k}, n = {n}"
        )));
    }
    check_unit_open("ε", eps)?;
    let threshold = kwise_threshold(n, k, eps)?;
    let t = zero_tester_iterations(threshold);
    let phases = phase_distribution(&kwise_problem(oracle, k)?, &options.config(t))?;
    Ok(PreparedTest {
        kind: TestKind::KWise,
        params: TestParams {
            eps,
            nu: None,
            k: Some(k),
            n: n as usize,
            effective_eps: eps,
        },
        t,
        threshold,
        cut: threshold / 2.0,
        phases,
    })
}

pub fn tolerant_l2_closeness<R: Rng + ?Sized>(
    p: &PurifiedOracle,
    q: &PurifiedOracle,
    eps: f64,
    nu: f64,
    rng: &mut R,
) -> Result<TestVerdict> {
    Ok(prepare_tolerant_l2(p, q, eps, nu, &TesterOptions::default())?.trial(rng))
}

pub fn l2_closeness<R: Rng + ?Sized>(
    p: &PurifiedOracle,
    q: &PurifiedOracle,
    eps: f64,
    rng: &mut R,
) -> Result<TestVerdict> {
    Ok(prepare_l2(p, q, eps, &TesterOptions::default())?.trial(rng))
}

pub fn l1_closeness<R: Rng + ?Sized>(
    p: &PurifiedOracle,
    q: &PurifiedOracle,
    eps: f64,
    rng: &mut R,
) -> Result<TestVerdict> {
    Ok(prepare_l1(p, q, eps, &TesterOptions::default())?.trial(rng))
}

pub fn kwise_uniformity_test<R: Rng + ?Sized>(
    oracle: &PurifiedOracle,
    k: u32,
    eps: f64,
    rng: &mut R,
) -> Result<TestVerdict> {
    Ok(prepare_kwise(oracle, k, eps, &TesterOptions::default())?.trial(rng))
}

/// Iterations of the distance estimator: `⌈8π/ε⌉`.
pub fn estimator_iterations(eps: f64) -> usize {
    (8.0 * PI / eps).ceil() as usize
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceEstimate {
    /// `2√Δ′`.
    pub estimate: f64,
    pub delta_prime: f64,
    pub eps: f64,
    pub t: usize,
    pub ledger: QueryLedger,
}

/// ℓ² distance estimator with its phase distribution computed.
#[derive(Debug, Clone)]
pub struct PreparedEstimate {
    eps: f64,
    t: usize,
    phases: PhaseDistribution,
}

impl PreparedEstimate {
    pub fn t(&self) -> usize {
        self.t
    }

    pub fn phases(&self) -> &PhaseDistribution {
        &self.phases
    }

    /// Exact probability that the estimate is within `tol` of `target`.
    pub fn probability_within(&self, target: f64, tol: f64) -> f64 {
        self.phases
            .probability_that(|d| (2.0 * d.sqrt() - target).abs() <= tol)
    }

    pub fn trial<R: Rng + ?Sized>(&self, rng: &mut R) -> DistanceEstimate {
        let r = self.phases.sample(rng);
        DistanceEstimate {
            estimate: 2.0 * r.estimate.sqrt(),
            delta_prime: r.estimate,
            eps: self.eps,
            t: self.t,
            ledger: r.ledger,
        }
    }
}

pub fn prepare_estimate(
    p: &PurifiedOracle,
    q: &PurifiedOracle,
    eps: f64,
    options: &TesterOptions,
) -> Result<PreparedEstimate> {
    check_unit_open("ε", eps)?;
    let t = estimator_iterations(eps);
    let phases = phase_distribution(&closeness(p, q)?, &options.config(t))?;
    Ok(PreparedEstimate { eps, t, phases })
}

/// Estimates `‖p − q‖₂` to within `ε`.
pub fn estimate_l2_distance<R: Rng + ?Sized>(
    p: &PurifiedOracle,
    q: &PurifiedOracle,
    eps: f64,
    rng: &mut R,
) -> Result<DistanceEstimate> {
    Ok(prepare_estimate(p, q, eps, &TesterOptions::default())?.trial(rng))
}

/// Closed-form k-wise budget `⌈10π e^k √M^n_k / ε⌉`.
pub fn kwise_budget_formula(n: u32, k: u32, eps: f64) -> Result<usize> {
    let m = binom_sum(n, k)? as f64;
    Ok((10.0 * PI * E.powi(k as i32) * m.sqrt() / eps).ceil() as usize)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::{make_purified_oracle, Distribution, GarbageStyle};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn oracle(w: Vec<f64>) -> PurifiedOracle {
        make_purified_oracle(
            &Distribution::over_range(w).unwrap(),
            GarbageStyle::Basis,
            0,
        )
        .unwrap()
    }

    #[test]
    fn formula_values() {
        assert_eq!(tolerant_l2_iterations(0.2, 0.5), 629);
        assert_eq!(tolerant_l2_iterations(0.1, 0.5), 1257);
        assert_eq!(estimator_iterations(0.05), 503);
        let tau = kwise_threshold(4, 2, 0.3).unwrap();
        assert_eq!(zero_tester_iterations(tau), 2447);
        assert!((tolerant_l2_threshold(0.2, 0.5) - 0.0075).abs() < 1e-15);
    }

    #[test]
    fn identical_is_close_with_certainty() {
        let p = oracle(vec![0.125; 8]);
        let test = prepare_tolerant_l2(&p, &p, 0.2, 0.5, &TesterOptions::default()).unwrap();
        assert!((test.acceptance_probability() - 1.0).abs() < 1e-12);
        let v = test.trial(&mut ChaCha8Rng::seed_from_u64(0));
        assert_eq!(v.verdict, Verdict::Close);
        assert_eq!(v.t, 629);
        assert!(v.promise_unchecked);
    }

    #[test]
    fn disjoint_masses_are_far() {
        let (p, q) = (oracle(vec![1.0, 0.0]), oracle(vec![0.0, 1.0]));
        let test = prepare_l2(&p, &q, 0.5, &TesterOptions::default()).unwrap();
        assert!(test.acceptance_probability() < 0.05);
    }

    #[test]
    fn parameter_errors() {
        let p = oracle(vec![0.5, 0.5]);
        let o = TesterOptions::default();
        assert!(prepare_tolerant_l2(&p, &p, 1.2, 0.5, &o).is_err());
        assert!(prepare_tolerant_l2(&p, &p, 0.2, 0.0, &o).is_err());
        assert!(prepare_kwise(&p, 1, 0.3, &o).is_err());
        assert!(prepare_estimate(&p, &p, 0.0, &o).is_err());
    }

    #[test]
    fn majority_vote() {
        let p = oracle(vec![0.5, 0.5]);
        let test = prepare_l2(&p, &p, 0.3, &TesterOptions::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let v = test.majority_trial(3, &mut rng).unwrap();
        assert_eq!(v.verdict, Verdict::Close);
        let single = test.trial(&mut rng);
        assert_eq!(
            v.ledger.oracle_totals().total(),
            3 * single.ledger.oracle_totals().total()
        );
        assert!(test.majority_trial(2, &mut rng).is_err());
    }
}
