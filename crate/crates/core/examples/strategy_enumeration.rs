// Finite-memory strategies as transducers: build one from text, run it on
// observation histories, canonicalize it, and enumerate every canonical
// strategy up to a memory bound.

use std::error::Error;

use atlcheck::fixtures::fig2_model;
use atlcheck::{apply_strategy, canonicalize, enumerate_profiles, run_memory, Dfst, Player};

const WAIT_TWICE: &str = "\
dfst player=1 k=4
m0 s0 -> m1 / w
m0 s1 -> m0 / w
m0 s2 -> m0 / w
m1 s0 -> m2 / w
m1 s1 -> m1 / w
m1 s2 -> m1 / w
m2 s0 -> m0 / g
m2 s1 -> m2 / w
m2 s2 -> m2 / w
m3 s0 -> m3 / g
m3 s1 -> m3 / g
m3 s2 -> m3 / g
";

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let model = fig2_model();
    let d = Dfst::parse(WAIT_TWICE, &model)?;
    let s0 = model.class_index(Player(1), model.state_id("s0").ok_or("no s0")?);
    for len in 1..=4 {
        let history = vec![s0; len];
        let a = apply_strategy(&d, &history)?;
        println!(
            "after {len} observation(s) of s0: memory {}, action {}",
            run_memory(&d, &history[..len - 1])?,
            model.action_name(a)
        );
    }

    // m3 is unreachable, so the canonical form has three states.
    let c = canonicalize(&d);
    println!("canonical form ({} states):\n{}", c.size(), c.to_text(&model));
    if c.size() != 3 || canonicalize(&c) != c {
        return Err("canonicalization is not a 3-state fixpoint".into());
    }

    for k in 1..=2 {
        let space = enumerate_profiles(&model, &[Player(1)], k)?;
        println!("canonical {k}-memory strategies for player 1: {}", space.len());
        if k == 1 {
            for p in space.iter() {
                let m = &p.members()[0];
                let acts: Vec<&str> = (0..m.class_count()).map(|c| model.action_name(m.output(0, c))).collect();
                println!("  {}", acts.join(" "));
            }
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
