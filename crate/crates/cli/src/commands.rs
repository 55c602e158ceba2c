//! Experiment subcommands.

use anyhow::{bail, Result};
use qdtest::harness::{frequency, run_trials, trial_seed};
use qdtest::oracles::{make_purified_oracle, Distribution, GarbageStyle, PurifiedOracle};
use qdtest::par::Execution;
use qdtest::reference::{fourier_weight, is_kwise_uniform, lp_distance};
use qdtest::testers::{
    prepare_estimate, prepare_kwise, prepare_l1, prepare_l2, prepare_tolerant_l2, PreparedTest,
    TestKind, TestVerdict, TesterOptions, Verdict,
};
use serde_json::Value;

use crate::args::{
    ClosenessArgs, Common, EstimateArgs, Garbage, KwiseArgs, Metric, SweepArgs, SweepTester,
};
use crate::instances;
use crate::plot::{self, Series};
use crate::report::Report;

/// Relative slack when comparing exact distances against promise bounds.
const PROMISE_SLACK: f64 = 1e-9;

const TRIAL_COLUMNS: [&str; 6] = [
    "trial",
    "verdict",
    "statistic",
    "queries_forward",
    "queries_inverse",
    "queries_ctrl",
];

fn garbage_style(g: Garbage) -> GarbageStyle {
    match g {
        Garbage::Basis => GarbageStyle::Basis,
        Garbage::Haar => GarbageStyle::Haar,
    }
}

fn garbage_name(g: Garbage) -> &'static str {
    match g {
        Garbage::Basis => "basis",
        Garbage::Haar => "haar",
    }
}

fn oracle(p: &Distribution, common: &Common, stream: u64) -> Result<PurifiedOracle> {
    let seed = trial_seed(common.seed, u64::MAX - stream);
    Ok(make_purified_oracle(
        p,
        garbage_style(common.garbage),
        seed,
    )?)
}

fn kind_name(kind: TestKind) -> &'static str {
    match kind {
        TestKind::TolerantL2 => "tolerant-l2",
        TestKind::L2 => "l2",
        TestKind::L1 => "l1",
        TestKind::KWise => "kwise",
    }
}

fn check_majority(reps: usize) -> Result<()> {
    if reps == 0 || reps.is_multiple_of(2) {
        bail!("--majority must be a positive odd number, got {reps}");
    }
    Ok(())
}

fn run(test: &PreparedTest, trials: u64, seed: u64, reps: usize) -> Result<Vec<TestVerdict>> {
    run_trials(trials as usize, seed, Execution::Parallel, |_, rng| {
        if reps == 1 {
            Ok(test.trial(rng))
        } else {
            test.majority_trial(reps, rng)
        }
    })
    .into_iter()
    .collect::<qdtest::Result<Vec<_>>>()
    .map_err(Into::into)
}

/// The verdict the tester owes on this instance, or `None` outside the promise.
fn closeness_expectation(
    kind: TestKind,
    p: &Distribution,
    q: &Distribution,
    eps: f64,
    nu: f64,
) -> Result<Option<Verdict>> {
    let d2 = lp_distance(p, q, 2)?;
    let (far, close_bound) = match kind {
        TestKind::L1 => {
            let n = p.len() as f64;
            (
                lp_distance(p, q, 1)? >= eps * (1.0 - PROMISE_SLACK),
                eps / (2.0 * n.sqrt()),
            )
        }
        _ => (d2 >= eps * (1.0 - PROMISE_SLACK), (1.0 - nu) * eps),
    };
    Ok(if far {
        Some(Verdict::Far)
    } else if d2 <= close_bound * (1.0 + PROMISE_SLACK) {
        Some(Verdict::Close)
    } else {
        None
    })
}

/// YES for k-wise uniform inputs; NO when the low-degree Fourier weight
/// exceeds the far-side bound `ε/e^k`.
fn kwise_expectation(p: &Distribution, k: u32, eps: f64) -> Result<Option<Verdict>> {
    if is_kwise_uniform(p, k)? {
        return Ok(Some(Verdict::Yes));
    }
    let bound = eps / (k as f64).exp();
    Ok((fourier_weight(p, k)?.sqrt() > bound).then_some(Verdict::No))
}

fn expectation_value(e: Option<Verdict>) -> Value {
    e.map_or(Value::Null, |v| v.as_str().into())
}

fn promise_warning(e: Option<Verdict>, what: &str) -> Option<String> {
    e.is_none().then(|| {
        format!("instance lies outside the promise of the {what} tester; no verdict is guaranteed")
    })
}

fn trial_rows(report: &mut Report, verdicts: &[TestVerdict]) {
    for (i, v) in verdicts.iter().enumerate() {
        let c = v.ledger.oracle_totals();
        report.row(vec![
            i.into(),
            v.verdict.as_str().into(),
            v.statistic.into(),
            c.forward.into(),
            c.inverse.into(),
            c.controlled().into(),
        ]);
    }
}

fn verdict_summary(
    report: &mut Report,
    verdicts: &[TestVerdict],
    labels: [Verdict; 2],
    expected: Option<Verdict>,
    test: &PreparedTest,
) {
    for l in labels {
        let key = match l {
            Verdict::Close => "frequency_CLOSE",
            Verdict::Far => "frequency_FAR",
            Verdict::Yes => "frequency_YES",
            Verdict::No => "frequency_NO",
        };
        report.summary(key, frequency(verdicts, |v| v.verdict == l));
    }
    report.summary("expected", expectation_value(expected));
    report.summary(
        "success_frequency",
        expected.map_or(Value::Null, |e| {
            frequency(verdicts, |v| v.verdict == e).into()
        }),
    );
    report.summary(
        "single_run_accept_probability",
        test.acceptance_probability(),
    );
    report.summary("mean_queries", mean_queries(verdicts));
}

fn mean_queries(verdicts: &[TestVerdict]) -> f64 {
    if verdicts.is_empty() {
        return 0.0;
    }
    verdicts
        .iter()
        .map(|v| v.ledger.oracle_totals().total() as f64)
        .sum::<f64>()
        / verdicts.len() as f64
}

fn warn(report: &mut Report, warning: Option<String>) {
    if let Some(w) = warning {
        eprintln!("warning: {w}");
        report.warnings.push(w);
    }
}

struct ClosenessRun {
    test: PreparedTest,
    expected: Option<Verdict>,
    d1: f64,
    d2: f64,
}

fn prepare_closeness(
    common: &Common,
    p: &Distribution,
    q: &Distribution,
    metric: Metric,
    eps: f64,
    nu: Option<f64>,
) -> Result<ClosenessRun> {
    let (op, oq) = (oracle(p, common, 1)?, oracle(q, common, 2)?);
    let opts = TesterOptions::default();
    let test = match (metric, nu) {
        (Metric::L2, Some(nu)) => prepare_tolerant_l2(&op, &oq, eps, nu, &opts)?,
        (Metric::L2, None) => prepare_l2(&op, &oq, eps, &opts)?,
        (Metric::L1, None) => prepare_l1(&op, &oq, eps, &opts)?,
        (Metric::L1, Some(_)) => bail!("--nu applies to the ℓ² tester only"),
    };
    let expected = closeness_expectation(test.kind(), p, q, eps, nu.unwrap_or(0.5))?;
    Ok(ClosenessRun {
        expected,
        d1: lp_distance(p, q, 1)?,
        d2: lp_distance(p, q, 2)?,
        test,
    })
}

pub fn test_closeness(a: &ClosenessArgs) -> Result<()> {
    check_majority(a.majority)?;
    let inst = instances::closeness(&a.common, a.eps, a.nu.unwrap_or(0.5), None)?;
    let q = inst
        .q
        .as_ref()
        .expect("closeness instances carry two distributions");
    let run = prepare_closeness(&a.common, &inst.p, q, a.metric, a.eps, a.nu)?;
    let verdicts = run_test(&run.test, &a.common, a.majority)?;

    let mut report = Report::new("test-closeness", TRIAL_COLUMNS.to_vec());
    test_params(&mut report, &run.test, &a.common, &inst.name, a.majority);
    report.param("l1_distance", run.d1);
    report.param("l2_distance", run.d2);
    warn(&mut report, promise_warning(run.expected, "closeness"));
    trial_rows(&mut report, &verdicts);
    verdict_summary(
        &mut report,
        &verdicts,
        [Verdict::Close, Verdict::Far],
        run.expected,
        &run.test,
    );
    report.emit(a.common.format, a.common.out.as_deref())
}

fn run_test(test: &PreparedTest, common: &Common, reps: usize) -> Result<Vec<TestVerdict>> {
    run(test, common.trials, common.seed, reps)
}

fn test_params(report: &mut Report, test: &PreparedTest, common: &Common, name: &str, reps: usize) {
    let p = test.params();
    report.param("tester", kind_name(test.kind()));
    report.param("instance", name);
    report.param("n", p.n);
    report.param("eps", p.eps);
    report.param("nu", p.nu.map_or(Value::Null, Value::from));
    report.param("k", p.k.map_or(Value::Null, Value::from));
    report.param("effective_eps", p.effective_eps);
    report.param("t", test.t());
    report.param("threshold", test.threshold());
    report.param("garbage", garbage_name(common.garbage));
    report.param("trials", common.trials);
    report.param("majority", reps);
    report.param("seed", common.seed);
}

pub fn test_kwise(a: &KwiseArgs) -> Result<()> {
    check_majority(a.majority)?;
    let inst = instances::kwise(&a.common, a.k, None)?;
    let bits = inst.p.bits().unwrap_or(0);
    if a.k == 0 || a.k > bits {
        bail!("need 1 ≤ k ≤ n, got k = {} with n = {bits}", a.k);
    }
    let test = prepare_kwise(
        &oracle(&inst.p, &a.common, 1)?,
        a.k,
        a.eps,
        &TesterOptions::default(),
    )?;
    let expected = kwise_expectation(&inst.p, a.k, a.eps)?;
    let verdicts = run_test(&test, &a.common, a.majority)?;

    let mut report = Report::new("test-kwise", TRIAL_COLUMNS.to_vec());
    test_params(&mut report, &test, &a.common, &inst.name, a.majority);
    report.param("fourier_weight", fourier_weight(&inst.p, a.k)?);
    warn(&mut report, promise_warning(expected, "k-wise uniformity"));
    trial_rows(&mut report, &verdicts);
    verdict_summary(
        &mut report,
        &verdicts,
        [Verdict::Yes, Verdict::No],
        expected,
        &test,
    );
    report.emit(a.common.format, a.common.out.as_deref())
}

pub fn estimate(a: &EstimateArgs) -> Result<()> {
    let inst = instances::closeness(&a.common, a.eps, 0.5, None)?;
    let q = inst
        .q
        .as_ref()
        .expect("closeness instances carry two distributions");
    let (op, oq) = (oracle(&inst.p, &a.common, 1)?, oracle(q, &a.common, 2)?);
    let est = prepare_estimate(&op, &oq, a.eps, &TesterOptions::default())?;
    let truth = lp_distance(&inst.p, q, 2)?;
    let results = run_trials(
        a.common.trials as usize,
        a.common.seed,
        Execution::Parallel,
        |_, rng| est.trial(rng),
    );

    let mut report = Report::new(
        "estimate",
        vec!["trial", "estimate", "true_value", "error", "queries"],
    );
    report.param("instance", inst.name.as_str());
    report.param("n", inst.p.len());
    report.param("eps", a.eps);
    report.param("t", est.t());
    report.param("garbage", garbage_name(a.common.garbage));
    report.param("trials", a.common.trials);
    report.param("seed", a.common.seed);
    for (i, r) in results.iter().enumerate() {
        report.row(vec![
            i.into(),
            r.estimate.into(),
            truth.into(),
            (r.estimate - truth).into(),
            r.ledger.oracle_totals().total().into(),
        ]);
    }
    let n = results.len().max(1) as f64;
    report.summary(
        "within_eps_frequency",
        frequency(&results, |r| (r.estimate - truth).abs() <= a.eps),
    );
    report.summary(
        "single_run_within_eps_probability",
        est.probability_within(truth, a.eps),
    );
    report.summary(
        "mean_estimate",
        results.iter().map(|r| r.estimate).sum::<f64>() / n,
    );
    report.summary(
        "mean_abs_error",
        results
            .iter()
            .map(|r| (r.estimate - truth).abs())
            .sum::<f64>()
            / n,
    );
    report.emit(a.common.format, a.common.out.as_deref())
}

fn tester_name(t: SweepTester) -> &'static str {
    match t {
        SweepTester::L2 => "l2",
        SweepTester::L1 => "l1",
        SweepTester::Kwise => "kwise",
    }
}

pub fn sweep(a: &SweepArgs) -> Result<()> {
    let common = &a.common;
    let from_files = common.dist.is_some() || common.dist2.is_some();
    if from_files && !a.n_grid.is_empty() {
        bail!("--n-grid needs a generator; file instances have a fixed size");
    }
    let eps_grid = if a.eps_grid.is_empty() {
        vec![a.eps]
    } else {
        a.eps_grid.clone()
    };
    let n_grid: Vec<Option<usize>> = if a.n_grid.is_empty() {
        vec![common.n]
    } else {
        a.n_grid.iter().copied().map(Some).collect()
    };
    let mut common = common.clone();
    if !from_files && common.generator.is_none() {
        common.generator = Some(
            match a.tester {
                SweepTester::L2 => "l2-pair",
                SweepTester::L1 => "l1-pair",
                SweepTester::Kwise => "spike",
            }
            .to_string(),
        );
    }

    let mut report = Report::new(
        "sweep",
        vec![
            "tester",
            "n",
            "eps",
            "nu",
            "k",
            "t",
            "threshold",
            "mean_queries",
            "accept_frequency",
            "expected",
            "success_frequency",
        ],
    );
    report.param("tester", tester_name(a.tester));
    report.param(
        "instance",
        common.generator.clone().map_or(Value::Null, Value::from),
    );
    report.param("garbage", garbage_name(common.garbage));
    report.param("trials", common.trials);
    report.param("seed", common.seed);

    let mut points = Vec::new();
    for &n in &n_grid {
        for &eps in &eps_grid {
            let (test, expected) = match a.tester {
                SweepTester::Kwise => {
                    let inst = instances::kwise(&common, a.k, n)?;
                    let bits = inst.p.bits().unwrap_or(0);
                    if a.k == 0 || a.k > bits {
                        bail!("need 1 ≤ k ≤ n, got k = {} with n = {bits}", a.k);
                    }
                    let o = oracle(&inst.p, &common, 1)?;
                    (
                        prepare_kwise(&o, a.k, eps, &TesterOptions::default())?,
                        kwise_expectation(&inst.p, a.k, eps)?,
                    )
                }
                SweepTester::L2 | SweepTester::L1 => {
                    let inst = instances::closeness(&common, eps, a.nu, n)?;
                    let q = inst
                        .q
                        .as_ref()
                        .expect("closeness instances carry two distributions");
                    let (metric, nu) = match a.tester {
                        SweepTester::L2 => (Metric::L2, Some(a.nu)),
                        _ => (Metric::L1, None),
                    };
                    let run = prepare_closeness(&common, &inst.p, q, metric, eps, nu)?;
                    (run.test, run.expected)
                }
            };
            if let Some(w) = promise_warning(expected, tester_name(a.tester)) {
                let n = test.params().n;
                warn(&mut report, Some(format!("n = {n}, ε = {eps}: {w}")));
            }
            let verdicts = run_test(&test, &common, 1)?;
            let params = test.params();
            let mq = mean_queries(&verdicts);
            points.push((params.n, eps, mq));
            report.row(vec![
                tester_name(a.tester).into(),
                params.n.into(),
                eps.into(),
                params.nu.map_or(Value::Null, Value::from),
                params.k.map_or(Value::Null, Value::from),
                test.t().into(),
                test.threshold().into(),
                mq.into(),
                frequency(&verdicts, |v| v.verdict.is_accept()).into(),
                expectation_value(expected),
                expected.map_or(Value::Null, |e| {
                    frequency(&verdicts, |v| v.verdict == e).into()
                }),
            ]);
        }
    }

    if let Some(path) = &a.plot {
        let by_eps = eps_grid.len() > 1 || n_grid.len() == 1;
        let series = if by_eps {
            group(
                &points,
                |&(n, _, _)| format!("n = {n}"),
                |&(_, e, q)| (1.0 / e, q),
            )
        } else {
            group(
                &points,
                |&(_, e, _)| format!("ε = {e}"),
                |&(n, _, q)| (n as f64, q),
            )
        };
        let x_label = if by_eps { "1/ε" } else { "n" };
        plot::write_svg(
            path,
            &format!("{} tester: oracle queries", tester_name(a.tester)),
            x_label,
            "mean oracle queries",
            &series,
        )?;
    }
    report.emit(common.format, common.out.as_deref())
}

fn group<P>(
    points: &[P],
    key: impl Fn(&P) -> String,
    xy: impl Fn(&P) -> (f64, f64),
) -> Vec<Series> {
    let mut out: Vec<Series> = Vec::new();
    for p in points {
        let k = key(p);
        match out.iter_mut().find(|s| s.name == k) {
            Some(s) => s.points.push(xy(p)),
            None => out.push(Series {
                name: k,
                points: vec![xy(p)],
            }),
        }
    }
    for s in &mut out {
        s.points.sort_by(|a, b| a.0.total_cmp(&b.0));
    }
    out
}
