//! Shared corpus and helpers for the integration tests.
#![allow(dead_code)]

pub mod oracle;

pub use atlcheck::logic::Formula;
pub use atlcheck::temporal::{LabelledGraph, SimpleGraph};

use atlcheck::fixtures::{self, random_model, RandomModelParams};
use atlcheck::{parse_formula, Dfst, GameModel, Player, StrategyProfile};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_models(seed: u64, count: usize, incomplete: bool) -> Vec<GameModel> {
    let mut r = rng(seed);
    (0..count)
        .map(|_| {
            let params = RandomModelParams {
                states: r.gen_range(2..=4),
                incomplete,
                props: vec!["p".into(), "q".into()],
                ..Default::default()
            };
            random_model(&mut r, &params)
        })
        .collect()
}

/// The named fixtures plus seeded random models of both kinds.
pub fn corpus() -> Vec<(String, GameModel)> {
    let mut out = vec![
        ("fig1".to_string(), fixtures::fig1_model()),
        ("fig2".to_string(), fixtures::fig2_model()),
    ];
    for k in 1..=3 {
        out.push((format!("fig3_{k}"), fixtures::fig3_family(k).unwrap()));
    }
    for (i, m) in random_models(11, 12, false).into_iter().enumerate() {
        out.push((format!("random_complete_{i}"), m));
    }
    for (i, m) in random_models(12, 12, true).into_iter().enumerate() {
        out.push((format!("random_incomplete_{i}"), m));
    }
    out
}

/// Formulas of the fragment with one outer quantifier, over `p` and `q`.
pub const SINGLE_QUANTIFIER: &[&str] = &[
    "<<1>> X p",
    "<<1>> G p",
    "<<1>> F p",
    "<<1>> (q U p)",
    "<<2>> G !p",
    "<<1,2>> X X p",
    "<<1,2>> F p",
    "<<>> G (p | q)",
    "<<1>> (F p & G q)",
    "<<1>> G F p",
    "<<2>> F G !q",
    "<<1,2>> (X p & X X !p)",
];

pub const NESTED: &[&str] = &[
    "<<1>> X <<2>> G p",
    "!<<1>> F p",
    "<<1,2>> F !<<1>> X p",
    "<<1>> G (p -> <<>> X q)",
    "<<1>> X p & !<<2>> X p",
];

/// The formulas from `candidates` whose players and propositions exist.
pub fn formulas_for(model: &GameModel, candidates: &[&str]) -> Vec<Formula> {
    candidates
        .iter()
        .map(|f| parse_formula(f).unwrap())
        .filter(|f| {
            f.players().iter().all(|&p| model.has_player(p))
                && f.propositions().iter().all(|p| model.propositions().contains(p))
        })
        .collect()
}

/// A transducer with uniformly random tables.
pub fn random_dfst(r: &mut impl Rng, model: &GameModel, player: Player, k: usize) -> Dfst {
    let classes = model.class_count(player);
    let next = (0..k * classes).map(|_| r.gen_range(0..k)).collect();
    let output = (0..k * classes)
        .map(|e| *model.class_legal(player, e % classes).choose(r).unwrap())
        .collect();
    Dfst::new(player, classes, 0, next, output).unwrap()
}

/// A random profile for a random non-empty coalition.
pub fn random_profile(r: &mut impl Rng, model: &GameModel, max_k: usize) -> StrategyProfile {
    let mut members = Vec::new();
    for p in model.players() {
        if r.gen_bool(0.6) {
            let k = r.gen_range(1..=max_k);
            members.push(random_dfst(r, model, p, k));
        }
    }
    StrategyProfile::new(members).unwrap()
}

/// A random quantifier-free path formula with at most `size` connectives.
pub fn random_ltl(r: &mut impl Rng, props: &[&str], size: usize) -> Formula {
    if size == 0 || r.gen_bool(0.25) {
        return match r.gen_range(0..props.len() + 1) {
            0 => Formula::True,
            i => Formula::prop(props[i - 1]),
        };
    }
    let sub = |r: &mut _| random_ltl(r, props, size - 1);
    match r.gen_range(0..6) {
        0 => Formula::not(sub(r)),
        1 => Formula::or(sub(r), random_ltl(r, props, (size - 1) / 2)),
        2 => Formula::and(sub(r), random_ltl(r, props, (size - 1) / 2)),
        3 => Formula::next(sub(r)),
        4 => Formula::until(sub(r), random_ltl(r, props, (size - 1) / 2)),
        _ => Formula::globally(sub(r)),
    }
}
