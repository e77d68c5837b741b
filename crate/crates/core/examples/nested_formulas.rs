// Nested strategic formulas are checked innermost first: each inner
// quantified subformula becomes a fresh proposition labeling the states
// where it holds. Under incomplete information an inner verdict may be
// unknown, and the outer check then reads it pessimistically or
// optimistically depending on polarity.

use std::error::Error;

use atlcheck::fixtures::{fig1_model, fig3_family};
use atlcheck::{classify, evaluate, parse_formula, strategic_subformulas, InfoMode, Outcome, SemanticsSpec};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let model = fig1_model();
    let f = parse_formula("<<1,2>> F !<<1>> X !p")?;
    println!("{f} is in fragment {:?}", classify(&f));
    for (i, g) in strategic_subformulas(&f).iter().enumerate() {
        println!("  round {}: {g}", i + 1);
    }
    let sem = SemanticsSpec::memoryless(InfoMode::Auto);
    for v in evaluate(&model, &f, &sem)? {
        println!("  {}: {}", model.state_name(v.state), v.outcome.name());
        if !v.outcome.holds() {
            return Err(format!("{f} should hold everywhere").into());
        }
    }

    // With a cap of 1 the inner i·F question at s0 stays open, and so does
    // anything that depends on it.
    let model = fig3_family(2)?;
    let f = parse_formula("<<1>> X !<<1>> F p")?;
    let sem = SemanticsSpec::finite(InfoMode::Auto, Some(1));
    for v in evaluate(&model, &f, &sem)? {
        let shown = match v.outcome {
            Outcome::Unknown { bound } => format!("unknown (cap {bound})"),
            ref o => o.name().to_string(),
        };
        println!("  {f} at {}: {shown}", model.state_name(v.state));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
