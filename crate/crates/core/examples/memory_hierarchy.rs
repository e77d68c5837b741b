// Counting needs memory: `<<1>> X^k p` at `s0` of a waiting game needs a
// strategy with exactly `k` memory states.
//
// The player must wait `k - 1` times and then go; a memoryless strategy
// sees the same state `s0` every time and cannot count.

use std::error::Error;

use atlcheck::fixtures::fig2_model;
use atlcheck::{evaluate_at, parse_formula, CheckOptions, Outcome, SemanticsSpec};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let model = fig2_model();
    let s0 = model.state_id("s0").ok_or("no s0")?;
    let opts = CheckOptions::default();
    for k in 1..=4 {
        let f = parse_formula(&format!("<<1>> {}p", "X ".repeat(k)))?;
        let mut row = Vec::new();
        for bound in 1..=4 {
            let v = evaluate_at(&model, &f, &SemanticsSpec::complete_bounded(bound), &opts, &[s0])?.remove(0);
            if v.outcome.holds() != (bound >= k) {
                return Err(format!("{f} under F_{bound}: {:?}", v.outcome).into());
            }
            row.push(format!("F_{bound}: {:<5}", v.outcome.name()));
        }
        println!("{:<22} {}", f.to_string(), row.join("  "));
    }

    let f = parse_formula("<<1>> X X X p")?;
    let v = evaluate_at(&model, &f, &SemanticsSpec::complete_bounded(3), &opts, &[s0])?.remove(0);
    if let Outcome::Holds { witness: Some(w) } = v.outcome {
        println!("a counting strategy for {f}:");
        print!("{}", w.profile.to_text(&model));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
