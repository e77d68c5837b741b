mod common;

use atlcheck::fixtures::{random_model, RandomModelParams};
use atlcheck::{
    apply_strategy, build_product, canonicalize, check_atl_fixpoint_complete, check_universal_ltl, classify,
    evaluate, evaluate_with, parse_model, CheckError, CheckOptions, Engine, FragmentTag, GameModel, InfoMode,
    MemoryMode, Outcome, Player, SemanticsSpec,
};
use atlcheck::strategy::StrategyError;
use common::{formulas_for, random_dfst, rng, Formula, NESTED, SINGLE_QUANTIFIER};
use proptest::prelude::*;
use rand::Rng;

fn model(seed: u64, states: usize, incomplete: bool) -> GameModel {
    let params = RandomModelParams {
        states,
        players: 2,
        actions: 2,
        props: vec!["p".into(), "q".into()],
        incomplete,
    };
    random_model(&mut rng(seed), &params)
}

fn pick(m: &GameModel, candidates: &[&str], i: usize) -> Option<Formula> {
    let fs = formulas_for(m, candidates);
    (!fs.is_empty()).then(|| fs[i % fs.len()].clone())
}

fn bounded(k: usize) -> SemanticsSpec {
    SemanticsSpec::new(InfoMode::Auto, MemoryMode::Bounded(k))
}

fn lazy_and_exhaustive(m: &GameModel, f: &Formula, k: usize) -> Option<(Vec<bool>, Vec<bool>)> {
    let exhaustive = CheckOptions {
        engine: Engine::Exhaustive,
        ..CheckOptions::default()
    };
    let lazy = evaluate(m, f, &bounded(k)).unwrap();
    let exh = match evaluate_with(m, f, &bounded(k), &exhaustive) {
        Ok(v) => v,
        Err(CheckError::Strategy(StrategyError::TooLarge(_))) => return None,
        Err(e) => panic!("{e}"),
    };
    let holds = |v: &[atlcheck::Verdict]| v.iter().map(|x| x.outcome.holds()).collect();
    Some((holds(&lazy), holds(&exh)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn memoryless_equals_one_state_memory(seed: u64, states in 1usize..=4, incomplete: bool, i: usize) {
        let m = model(seed, states, incomplete);
        let mut candidates = SINGLE_QUANTIFIER.to_vec();
        candidates.extend_from_slice(NESTED);
        if let Some(f) = pick(&m, &candidates, i) {
            let r = evaluate(&m, &f, &SemanticsSpec::memoryless(InfoMode::Auto)).unwrap();
            prop_assert_eq!(r, evaluate(&m, &f, &bounded(1)).unwrap());
        }
    }

    #[test]
    fn lazy_search_agrees_with_enumeration(seed: u64, states in 1usize..=3, incomplete: bool, i: usize, k in 1usize..=2) {
        let m = model(seed, states, incomplete);
        if let Some(f) = pick(&m, SINGLE_QUANTIFIER, i) {
            if let Some((lazy, exh)) = lazy_and_exhaustive(&m, &f, k) {
                prop_assert_eq!(lazy, exh, "{} under F_{}\n{}", f, k, m.serialize());
            }
        }
    }

    #[test]
    fn witnesses_win_when_replayed(seed: u64, states in 1usize..=4, incomplete: bool, i: usize, k in 1usize..=3) {
        let m = model(seed, states, incomplete);
        let Some(f) = pick(&m, SINGLE_QUANTIFIER, i) else { return Ok(()) };
        let Formula::Coalition(_, body) = &f else { unreachable!() };
        for v in evaluate(&m, &f, &bounded(k)).unwrap() {
            if let Outcome::Holds { witness: Some(w) } = v.outcome {
                prop_assert!(w.memory <= k);
                prop_assert!(w.profile.check_against(&m).is_ok());
                let ps = build_product(&m, &w.profile, &[v.state]).unwrap();
                prop_assert_eq!(check_universal_ltl(&ps, body).unwrap(), vec![true]);
            }
        }
    }

    #[test]
    fn verdicts_do_not_depend_on_thread_count(seed: u64, states in 1usize..=4, incomplete: bool, i: usize) {
        let m = model(seed, states, incomplete);
        let mut candidates = SINGLE_QUANTIFIER.to_vec();
        candidates.extend_from_slice(NESTED);
        if let Some(f) = pick(&m, &candidates, i) {
            let run = |jobs| {
                let opts = CheckOptions { jobs: Some(jobs), ..CheckOptions::default() };
                evaluate_with(&m, &f, &bounded(2), &opts).unwrap()
            };
            prop_assert_eq!(run(1), run(4));
        }
    }

    #[test]
    fn nested_atl_collapses_under_complete_information(seed: u64, states in 1usize..=4, i: usize, k in 1usize..=2) {
        let m = model(seed, states, false);
        let nested: Vec<Formula> = formulas_for(&m, NESTED)
            .into_iter()
            .filter(|f| classify(f).within(FragmentTag::Atl))
            .collect();
        if nested.is_empty() {
            return Ok(());
        }
        let f = &nested[i % nested.len()];
        let exact = check_atl_fixpoint_complete(&m, f).unwrap();
        let got: Vec<bool> = evaluate(&m, f, &bounded(k)).unwrap().iter().map(|v| v.outcome.holds()).collect();
        let want: Vec<bool> = (0..m.state_count()).map(|s| exact.contains(&s)).collect();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn more_memory_never_hurts(seed: u64, states in 1usize..=4, incomplete: bool, i: usize) {
        let m = model(seed, states, incomplete);
        if let Some(f) = pick(&m, SINGLE_QUANTIFIER, i) {
            let one = evaluate(&m, &f, &bounded(1)).unwrap();
            let two = evaluate(&m, &f, &bounded(2)).unwrap();
            for (a, b) in one.iter().zip(&two) {
                prop_assert!(!a.outcome.holds() || b.outcome.holds(), "{} at {}", f, a.state);
            }
        }
    }

    #[test]
    fn canonical_form_is_a_behavior_preserving_fixpoint(seed: u64, states in 1usize..=4, incomplete: bool, k in 1usize..=4) {
        let m = model(seed, states, incomplete);
        let mut r = rng(seed ^ 0x5eed);
        let d = random_dfst(&mut r, &m, Player(1), k);
        let c = canonicalize(&d);
        prop_assert!(c.size() <= d.size());
        prop_assert_eq!(canonicalize(&c), c.clone());
        let classes = m.class_count(Player(1));
        for _ in 0..20 {
            let len = r.gen_range(1..=8);
            let h: Vec<usize> = (0..len).map(|_| r.gen_range(0..classes)).collect();
            prop_assert_eq!(apply_strategy(&d, &h).unwrap(), apply_strategy(&c, &h).unwrap());
        }
    }

    #[test]
    fn models_survive_serialization(seed: u64, states in 1usize..=5, incomplete: bool) {
        let m = model(seed, states, incomplete);
        prop_assert!(m.validate().is_empty());
        prop_assert_eq!(parse_model(&m.serialize()).unwrap(), m);
    }
}
