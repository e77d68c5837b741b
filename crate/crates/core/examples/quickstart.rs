// Parse a model from text, validate it, and check a few formulas.
//
// Two players must pick the same action at `s0` to reach `s1`, where `p`
// holds. Neither can force it alone; together they can.

use std::error::Error;

use atlcheck::{evaluate, parse_formula, parse_model, InfoMode, Outcome, SemanticsSpec};

const MODEL: &str = include_str!("models/coordination.cgm");

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let model = parse_model(MODEL)?;
    let violations = model.validate();
    if !violations.is_empty() {
        return Err(format!("model is invalid: {violations:?}").into());
    }
    println!(
        "{} states, {} players, propositions {:?}",
        model.state_count(),
        model.player_count(),
        model.propositions()
    );
    let s0 = model.state_id("s0").ok_or("no s0")?;
    let sem = SemanticsSpec::memoryless(InfoMode::Auto);
    let expected = [("<<1>> F p", false), ("<<2>> F p", false), ("<<1,2>> X p", true), ("<<>> G q", true)];
    for (text, want) in expected {
        let f = parse_formula(text)?;
        let verdicts = evaluate(&model, &f, &sem)?;
        let v = &verdicts[s0];
        println!("s0 |= {f} under {sem}: {}", v.outcome.name());
        if v.outcome.holds() != want {
            return Err(format!("{f}: unexpected {:?}", v.outcome).into());
        }
        if let Outcome::Holds { witness: Some(w) } = &v.outcome {
            print!("{}", w.profile.to_text(&model));
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
