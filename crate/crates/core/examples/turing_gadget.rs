// The Turing-machine gadget: finite-memory strategies for the coalition
// exist exactly when the machine's run repeats a configuration.
//
// For a machine that accepts after one step the search finds a 3-state
// witness, and replaying it shows player 1 playing the run's configurations.
// For a machine that writes 0s forever the search exhausts its cap.

use std::error::Error;

use atlcheck::fixtures::tm::{expected_stream, reveal_stream};
use atlcheck::fixtures::{tm_parse, tm_to_icgm};
use atlcheck::{evaluate_at, parse_formula, CheckOptions, InfoMode, Outcome, Player, SemanticsSpec};

const ACCEPT_ONE_STEP: &str = include_str!("machines/accept_one_step.tm");
const ZERO_WRITER: &str = include_str!("machines/zero_writer.tm");

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let f = parse_formula("<<1,2>> G !p")?;
    let opts = CheckOptions::default();

    let tm = tm_parse(ACCEPT_ONE_STEP)?;
    let model = tm_to_icgm(&tm)?;
    let s0 = model.state_id("s0").ok_or("no start state")?;
    println!("accept-one-step gadget: {} states", model.state_count());
    let started = std::time::Instant::now();
    let sem = SemanticsSpec::finite(InfoMode::Auto, Some(4));
    let v = evaluate_at(&model, &f, &sem, &opts, &[s0])?.remove(0);
    let Outcome::Holds { witness: Some(w) } = &v.outcome else {
        return Err(format!("expected a witness, got {:?}", v.outcome).into());
    };
    println!(
        "  holds with memory {} ({} partial profiles, {:.2?})",
        w.memory,
        v.profiles_examined,
        started.elapsed()
    );
    let p1 = w.profile.get(Player(1)).ok_or("no strategy for player 1")?;
    for round in 1..=6 {
        let played = reveal_stream(&model, p1, round, 4);
        if played != expected_stream(&tm, round, 4)? {
            return Err(format!("round {round}: player 1 played {played:?}").into());
        }
        println!("  I in round {round}: player 1 plays {}", played.join(" "));
    }

    let tm = tm_parse(ZERO_WRITER)?;
    let model = tm_to_icgm(&tm)?;
    let s0 = model.state_id("s0").ok_or("no start state")?;
    println!("zero-writer gadget: {} states", model.state_count());
    let started = std::time::Instant::now();
    let sem = SemanticsSpec::finite(InfoMode::Auto, Some(2));
    let v = evaluate_at(&model, &f, &sem, &opts, &[s0])?.remove(0);
    println!("  {:?} ({} partial profiles, {:.2?})", v.outcome, v.profiles_examined, started.elapsed());
    if v.outcome != (Outcome::Unknown { bound: 2 }) {
        return Err("the zero-writer should exhaust the cap".into());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
