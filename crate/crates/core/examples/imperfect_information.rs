// Imperfect information: a player who cannot tell states apart must act
// the same way in all of them, so memory becomes the only way to count.
//
// In the k-th model of the family the player sees only "start" and
// "later" and must go exactly at step `k + 1`. Under complete information a
// memoryless strategy suffices; under incomplete information the player
// needs `k` memory states. Perfect-recall and uncapped finite-memory
// questions under incomplete information are undecidable and refused.

use std::error::Error;

use atlcheck::fixtures::fig3_family;
use atlcheck::{evaluate_at, parse_formula, CheckError, CheckOptions, InfoMode, SemanticsSpec};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let f = parse_formula("<<1>> F p")?;
    let opts = CheckOptions::default();
    for k in 1..=3 {
        let model = fig3_family(k)?;
        let s0 = model.state_id("s0").ok_or("no s0")?;
        let complete = evaluate_at(&model, &f, &SemanticsSpec::memoryless(InfoMode::Complete), &opts, &[s0])?;
        let mut line = format!("k = {k}: I·r {}", complete[0].outcome.name());
        for bound in 1..=3 {
            let v = evaluate_at(&model, &f, &SemanticsSpec::incomplete_bounded(bound), &opts, &[s0])?;
            if v[0].outcome.holds() != (bound >= k) {
                return Err(format!("k = {k}, i·F_{bound}: {:?}", v[0].outcome).into());
            }
            line += &format!(", i·F_{bound} {}", v[0].outcome.name());
        }
        println!("{line}");
    }

    let model = fig3_family(2)?;
    let s0 = model.state_id("s0").ok_or("no s0")?;
    let capped = evaluate_at(&model, &f, &SemanticsSpec::finite(InfoMode::Auto, Some(1)), &opts, &[s0])?;
    println!("i·F with cap 1: {:?}", capped[0].outcome);
    for sem in [SemanticsSpec::perfect_recall(InfoMode::Auto, None), SemanticsSpec::finite(InfoMode::Auto, None)] {
        match evaluate_at(&model, &f, &sem, &opts, &[s0]) {
            Err(e @ CheckError::Unsupported { .. }) => println!("{sem}: {e}"),
            other => return Err(format!("{sem}: expected a refusal, got {other:?}").into()),
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
