use qdtest::harness::trial_rng;
use qdtest::oracles::{make_purified_oracle, Distribution, GarbageStyle};
use qdtest::testers::{prepare_l2, TesterOptions};

fn main() -> qdtest::Result<()> {
    let p = Distribution::over_range(vec![0.5, 0.25, 0.25, 0.0])?;
    let q = Distribution::uniform(p.space())?;
    let op = make_purified_oracle(&p, GarbageStyle::Haar, 1)?;
    let oq = make_purified_oracle(&q, GarbageStyle::Haar, 2)?;
    let test = prepare_l2(&op, &oq, 0.2, &TesterOptions::default())?;
    let verdict = test.trial(&mut trial_rng(0, 0));
    println!(
        "{} after {} oracle calls (P[CLOSE] = {:.3})",
        verdict.verdict.as_str(),
        verdict.ledger.oracle_totals().total(),
        test.acceptance_probability()
    );
    Ok(())
}
