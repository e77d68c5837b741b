// Fix a strategy profile, build the product of game and memory, and ask
// LTL questions about every outcome.
//
// In the coordination game player 1 commits to `a` forever. The outcomes
// are then controlled by player 2 alone, so `F p` can fail, while
// `G (p -> X p)` holds because `s1` is absorbing.

use std::error::Error;

use atlcheck::fixtures::fig1_model;
use atlcheck::temporal::universal_ltl_counterexamples;
use atlcheck::{
    build_product, check_universal_ltl, exists_lasso, ltl_to_buchi, outcome_correspondence_check, parse_formula,
    Dfst, Player, StrategyProfile,
};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let model = fig1_model();
    let a = model.action_id("a").ok_or("no action a")?;
    let c = model.action_id("c").ok_or("no action c")?;
    let always_a = Dfst::memoryless(Player(1), vec![a, c]);
    let profile = StrategyProfile::new(vec![always_a])?;
    let s0 = model.state_id("s0").ok_or("no s0")?;
    let product = build_product(&model, &profile, &[s0])?;
    print!("{}", product.dump());
    if !outcome_correspondence_check(&model, &profile, &product, product.len() + 1) {
        return Err("product paths disagree with simulated outcomes".into());
    }

    for (text, want) in [("F p", false), ("G (p -> X p)", true), ("G q", true), ("F G p | G !p", true)] {
        let f = parse_formula(text)?;
        let holds = check_universal_ltl(&product, &f)?[0];
        println!("all outcomes satisfy {f}: {holds}");
        if holds != want {
            return Err(format!("{f}: expected {want}").into());
        }
        if let Some(l) = &universal_ltl_counterexamples(&product, &f)?[0] {
            println!("  counterexample {}", l.render(&product));
        }
    }

    // Existential reading: some outcome eventually reaches p.
    let f = parse_formula("F p")?;
    let lasso = exists_lasso(&product, &ltl_to_buchi(&f)?).ok_or("no outcome reaches p")?;
    println!("an outcome satisfying {f}: {}", lasso.render(&product));
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
