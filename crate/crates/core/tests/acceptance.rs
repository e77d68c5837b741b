//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines are always printed; exits non-zero on any failure.

mod common;

use std::collections::BTreeSet;
use std::io::Write as _;
use std::process::Command;
use std::time::{Duration, Instant};

use atlcheck::fixtures::tm::{expected_stream, reveal_stream};
use atlcheck::fixtures::{self, random_model, tm_parse, tm_to_icgm, RandomModelParams};
use atlcheck::temporal::universal_ltl_counterexamples;
use atlcheck::{
    build_product, check_atl_fixpoint_complete, check_universal_ltl, check_universal_objective, evaluate,
    evaluate_at, exists_lasso, ltl_to_buchi, outcome_correspondence_check, parse_formula, CheckOptions,
    GameModel, InfoMode, MemoryMode, Objective, Outcome, Player, SemanticsSpec, StrategyProfile,
};
use common::oracle::{all_lassos_satisfy, eval_word, LassoWord};
use common::{corpus, formulas_for, random_ltl, random_profile, Formula, LabelledGraph, NESTED, SINGLE_QUANTIFIER};

type Check = fn() -> Result<String, String>;

fn main() {
    let criteria: [(&str, Check); 10] = [
        ("fig2 separation F_k vs F_(k-1), k = 1..4", fig2_separation),
        ("fig3 separation i·F_k vs i·F_(k-1), k = 1..3", fig3_separation),
        ("complete-information ATL collapse on 200 random models", atl_collapse),
        ("r and F_1 give identical verdicts", memoryless_is_f1),
        ("bounded-memory monotonicity, k = 1, 2", monotonicity),
        ("product/outcome correspondence on 100 random profiles", product_correspondence),
        ("temporal checks agree with the lasso oracle", temporal_oracle),
        ("empty and grand coalition dualities", dualities),
        ("Turing gadget: Holds with replay, Unknown for the 0-writer", turing_gadget),
        ("undecidable requests are refused", refusal),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let result = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let secs = started.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {:>2}: PASS  {name} [{detail}; {secs:.2}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2}: FAIL  {name} [{why}; {secs:.2}s]", i + 1);
            }
        }
        std::io::stdout().flush().ok();
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn timed_at(model: &GameModel, f: &Formula, sem: SemanticsSpec, s: usize) -> Result<(Outcome, Duration), String> {
    let started = Instant::now();
    let v = evaluate_at(model, f, &sem, &CheckOptions::default(), &[s]).map_err(|e| e.to_string())?;
    Ok((v[0].outcome.clone(), started.elapsed()))
}

fn fig2_separation() -> Result<String, String> {
    let m = fixtures::fig2_model();
    let s0 = m.state_id("s0").unwrap();
    let mut slowest = Duration::ZERO;
    for k in 1..=4 {
        let f = parse_formula(&format!("<<1>> {}p", "X ".repeat(k))).unwrap();
        let (o, t) = timed_at(&m, &f, SemanticsSpec::complete_bounded(k), s0)?;
        ensure(o.holds(), || format!("k = {k}: {o:?} under F_{k}"))?;
        slowest = slowest.max(t);
        if k >= 2 {
            let (o, t) = timed_at(&m, &f, SemanticsSpec::complete_bounded(k - 1), s0)?;
            ensure(o == Outcome::Fails, || format!("k = {k}: {o:?} under F_{}", k - 1))?;
            slowest = slowest.max(t);
        }
    }
    ensure(slowest < Duration::from_secs(5), || format!("slowest query {slowest:?}"))?;
    Ok(format!("slowest query {slowest:.2?}"))
}

fn fig3_separation() -> Result<String, String> {
    let f = parse_formula("<<1>> F p").unwrap();
    let mut slowest = Duration::ZERO;
    for k in 1..=3 {
        let m = fixtures::fig3_family(k).unwrap();
        let s0 = m.state_id("s0").unwrap();
        let (o, t) = timed_at(&m, &f, SemanticsSpec::incomplete_bounded(k), s0)?;
        ensure(o.holds(), || format!("k = {k}: {o:?} under i·F_{k}"))?;
        slowest = slowest.max(t);
        if k >= 2 {
            let (o, t) = timed_at(&m, &f, SemanticsSpec::incomplete_bounded(k - 1), s0)?;
            ensure(o == Outcome::Fails, || format!("k = {k}: {o:?} under i·F_{}", k - 1))?;
            slowest = slowest.max(t);
        }
    }
    ensure(slowest < Duration::from_secs(60), || format!("slowest query {slowest:?}"))?;
    Ok(format!("slowest query {slowest:.2?}"))
}

/// Every `<<A>> X a`, `<<A>> G a`, `<<A>> (a U b)` with `a, b` in
/// `{p, !p, true}` and `A` any coalition of two players.
fn atl0_shapes() -> Vec<Formula> {
    let lits = ["p", "!p", "true"];
    let mut bodies: Vec<String> = Vec::new();
    for a in lits {
        bodies.push(format!("X {a}"));
        bodies.push(format!("G {a}"));
        for b in lits {
            bodies.push(format!("({a} U {b})"));
        }
    }
    let mut out = Vec::new();
    for coalition in ["", "1", "2", "1,2"] {
        for b in &bodies {
            out.push(parse_formula(&format!("<<{coalition}>> {b}")).unwrap());
        }
    }
    out
}

fn atl_collapse() -> Result<String, String> {
    let mut r = common::rng(3);
    let shapes = atl0_shapes();
    let mut checks = 0;
    for i in 0..200 {
        let params = RandomModelParams {
            states: 1 + i % 4,
            players: 2,
            actions: 2,
            props: vec!["p".into()],
            incomplete: false,
        };
        let m = loop {
            let m = random_model(&mut r, &params);
            if m.propositions().contains("p") {
                break m;
            }
        };
        for f in &shapes {
            let exact = check_atl_fixpoint_complete(&m, f).map_err(|e| e.to_string())?;
            for k in 1..=3 {
                let v = evaluate(&m, f, &SemanticsSpec::complete_bounded(k)).map_err(|e| e.to_string())?;
                for (s, verdict) in v.iter().enumerate() {
                    checks += 1;
                    ensure(verdict.outcome.holds() == exact.contains(&s), || {
                        format!("model {i}, {f}, F_{k}, state {s}: {:?}\n{}", verdict.outcome, m.serialize())
                    })?;
                }
            }
        }
    }
    Ok(format!("{checks} state verdicts, {} formulas per model", shapes.len()))
}

fn memoryless_is_f1() -> Result<String, String> {
    let mut pairs = 0;
    for (name, m) in corpus() {
        let mut candidates = SINGLE_QUANTIFIER.to_vec();
        candidates.extend_from_slice(NESTED);
        for f in formulas_for(&m, &candidates) {
            let r = evaluate(&m, &f, &SemanticsSpec::memoryless(InfoMode::Auto)).map_err(|e| e.to_string())?;
            let f1 = evaluate(&m, &f, &SemanticsSpec::new(InfoMode::Auto, MemoryMode::Bounded(1)))
                .map_err(|e| e.to_string())?;
            ensure(r == f1, || format!("{name}, {f}"))?;
            pairs += 1;
        }
    }
    Ok(format!("{pairs} (model, formula) pairs"))
}

fn monotonicity() -> Result<String, String> {
    let mut implications = 0;
    for (name, m) in corpus() {
        for f in formulas_for(&m, SINGLE_QUANTIFIER) {
            let holds = |k: usize| -> Result<Vec<bool>, String> {
                let sem = SemanticsSpec::new(InfoMode::Auto, MemoryMode::Bounded(k));
                Ok(evaluate(&m, &f, &sem)
                    .map_err(|e| e.to_string())?
                    .iter()
                    .map(|v| v.outcome.holds())
                    .collect())
            };
            let (h1, h2, h3) = (holds(1)?, holds(2)?, holds(3)?);
            for s in 0..m.state_count() {
                ensure(!h1[s] || h2[s], || format!("{name}, {f}, state {s}: F_1 holds, F_2 does not"))?;
                ensure(!h2[s] || h3[s], || format!("{name}, {f}, state {s}: F_2 holds, F_3 does not"))?;
                implications += usize::from(h1[s]) + usize::from(h2[s]);
            }
        }
    }
    Ok(format!("{implications} holding verdicts carried upward"))
}

fn product_correspondence() -> Result<String, String> {
    let mut r = common::rng(5);
    let mut fixtures_list = vec![fixtures::fig1_model(), fixtures::fig2_model()];
    fixtures_list.extend((1..=3).map(|k| fixtures::fig3_family(k).unwrap()));
    let mut checked = 0;
    for m in &fixtures_list {
        for _ in 0..100 {
            let profile = random_profile(&mut r, m, 3);
            let starts: Vec<usize> = (0..m.state_count()).filter(|_| rand::Rng::gen_bool(&mut r, 0.5)).collect();
            let starts = if starts.is_empty() { vec![0] } else { starts };
            let ps = build_product(m, &profile, &starts).map_err(|e| e.to_string())?;
            ensure(outcome_correspondence_check(m, &profile, &ps, ps.len() + 1), || {
                format!("profile\n{}", profile.to_text(m))
            })?;
            checked += 1;
        }
    }
    Ok(format!("{checked} (fixture, profile) pairs"))
}

fn word_of<G: LabelledGraph>(g: &G, stem: &[usize], cycle: &[usize], props: &[String]) -> LassoWord {
    let label = |q: usize| -> BTreeSet<String> { props.iter().filter(|p| g.holds(q, p)).cloned().collect() };
    LassoWord {
        stem: stem.iter().map(|&q| label(q)).collect(),
        cycle: cycle.iter().map(|&q| label(q)).collect(),
    }
}

fn is_path<G: LabelledGraph>(g: &G, start: usize, nodes: &[usize], back_to: usize) -> bool {
    nodes.first() == Some(&start)
        && nodes.windows(2).all(|w| g.successors(w[0]).contains(&w[1]))
        && g.successors(*nodes.last().unwrap()).contains(&nodes[back_to])
}

fn temporal_oracle() -> Result<String, String> {
    let mut r = common::rng(7);
    let mut products = Vec::new();
    for (_, m) in corpus() {
        for attempt in 0..6 {
            let profile = if attempt == 0 {
                StrategyProfile::empty()
            } else {
                random_profile(&mut r, &m, 2)
            };
            let ps = build_product(&m, &profile, &[0]).map_err(|e| e.to_string())?;
            if ps.len() <= 8 {
                products.push(ps);
            }
        }
    }
    let pq = |f: &str| parse_formula(f).unwrap();
    let objectives: Vec<Objective> = ["X p", "X !q", "G p", "G (p | q)", "(q U p)", "(!p U q)", "F p"]
        .iter()
        .map(|f| Objective::from_body(&pq(f)))
        .collect();
    let ltl: Vec<Formula> = (0..50).map(|_| random_ltl(&mut r, &["p", "q"], 4)).collect();
    let mut fixpoint_checks = 0;
    let mut ltl_checks = 0;
    let mut confirmed = 0;
    for ps in &products {
        let props: Vec<String> = ["p", "q"].iter().filter(|p| ps.knows(p)).map(|p| p.to_string()).collect();
        let bound = ps.len() + 1;
        for obj in &objectives {
            let f = obj.to_formula();
            if !f.propositions().iter().all(|p| props.contains(p)) {
                continue;
            }
            let got = check_universal_objective(ps, obj).map_err(|e| e.to_string())?;
            for (q, &holds) in got.iter().enumerate() {
                fixpoint_checks += 1;
                ensure(holds == all_lassos_satisfy(ps, q, &f, bound), || {
                    format!("{f} at node {q}:\n{}", ps.dump())
                })?;
            }
        }
        for f in &ltl {
            if !f.propositions().iter().all(|p| props.contains(p)) {
                continue;
            }
            let holds = check_universal_ltl(ps, f).map_err(|e| e.to_string())?;
            let cex = universal_ltl_counterexamples(ps, f).map_err(|e| e.to_string())?;
            for (i, &q) in ps.initial_nodes().iter().enumerate() {
                ltl_checks += 1;
                let oracle = all_lassos_satisfy(ps, q, f, bound);
                ensure(oracle || !holds[i], || format!("{f}: oracle finds a violation the checker missed"))?;
                if let Some(l) = &cex[i] {
                    let nodes: Vec<usize> = l.stem.iter().chain(&l.cycle).copied().collect();
                    ensure(is_path(ps, q, &nodes, l.stem.len()), || format!("{f}: counterexample is not a path"))?;
                    let w = word_of(ps, &l.stem, &l.cycle, &props);
                    ensure(!eval_word(f, &w), || format!("{f}: counterexample satisfies the formula"))?;
                    confirmed += usize::from(!oracle);
                }
                ensure(holds[i] == cex[i].is_none(), || format!("{f}: inconsistent counterexample"))?;
            }
        }
    }
    Ok(format!(
        "{} products, {fixpoint_checks} fixpoint and {ltl_checks} LTL checks, {confirmed} violations confirmed by both",
        products.len()
    ))
}

fn dualities() -> Result<String, String> {
    let bodies = ["X p", "G p", "F p", "(q U p)", "G F p", "F G !p", "(X p | X X q)", "G (p -> X !p)"];
    let mut empty_checks = 0;
    let mut full_checks = 0;
    for (name, m) in corpus() {
        let agt: Vec<String> = m.players().map(|p| p.0.to_string()).collect();
        for body in bodies {
            let b = parse_formula(body).unwrap();
            if !b.propositions().iter().all(|p| m.propositions().contains(p)) {
                continue;
            }
            let none = parse_formula(&format!("<<>> {body}")).unwrap();
            let sem = SemanticsSpec::new(InfoMode::Auto, MemoryMode::Bounded(1));
            let v = evaluate(&m, &none, &sem).map_err(|e| e.to_string())?;
            for (s, verdict) in v.iter().enumerate() {
                let ps = build_product(&m, &StrategyProfile::empty(), &[s]).map_err(|e| e.to_string())?;
                let universal = check_universal_ltl(&ps, &b).map_err(|e| e.to_string())?[0];
                ensure(verdict.outcome.holds() == universal, || format!("{name}, <<>> {body}, state {s}"))?;
                empty_checks += 1;
            }
            let full = parse_formula(&format!("<<{}>> {body}", agt.join(","))).unwrap();
            let sem = SemanticsSpec::finite(InfoMode::Complete, Some(4));
            let v = evaluate(&m, &full, &sem).map_err(|e| e.to_string())?;
            let aut = ltl_to_buchi(&b).map_err(|e| e.to_string())?;
            for (s, verdict) in v.iter().enumerate() {
                let ps = build_product(&m, &StrategyProfile::empty(), &[s]).map_err(|e| e.to_string())?;
                let lasso = exists_lasso(&ps, &aut).is_some();
                let ok = match &verdict.outcome {
                    Outcome::Holds { .. } => lasso,
                    Outcome::Fails => !lasso,
                    Outcome::Unknown { .. } => false,
                };
                ensure(ok, || format!("{name}, {full}, state {s}: {:?}, lasso {lasso}", verdict.outcome))?;
                full_checks += 1;
            }
        }
    }
    Ok(format!("{empty_checks} empty-coalition and {full_checks} grand-coalition checks"))
}

const ACCEPT_ONE_STEP: &str = include_str!("../examples/machines/accept_one_step.tm");
const ZERO_WRITER: &str = include_str!("../examples/machines/zero_writer.tm");

fn turing_gadget() -> Result<String, String> {
    let f = parse_formula("<<1,2>> G !p").unwrap();
    let tm = tm_parse(ACCEPT_ONE_STEP).map_err(|e| e.to_string())?;
    let m = tm_to_icgm(&tm).map_err(|e| e.to_string())?;
    ensure(m.validate().is_empty(), || "gadget does not validate".into())?;
    let s0 = m.state_id("s0").unwrap();
    let started = Instant::now();
    let (o, _) = timed_at(&m, &f, SemanticsSpec::finite(InfoMode::Auto, Some(4)), s0)?;
    let holds_time = started.elapsed();
    let Outcome::Holds { witness: Some(w) } = o else {
        return Err(format!("accepting machine: {o:?}"));
    };
    for member in [Player(1), Player(2)] {
        let d = w.profile.get(member).ok_or("missing member strategy")?;
        for v in 1..=6 {
            let played = reveal_stream(&m, d, v, 6);
            let want = expected_stream(&tm, v, 6).map_err(|e| e.to_string())?;
            ensure(played == want, || format!("player {member}, v = {v}: {played:?} vs {want:?}"))?;
        }
    }
    ensure(holds_time < Duration::from_secs(1800), || format!("search took {holds_time:?}"))?;

    let tm0 = tm_parse(ZERO_WRITER).map_err(|e| e.to_string())?;
    let m0 = tm_to_icgm(&tm0).map_err(|e| e.to_string())?;
    let s0 = m0.state_id("s0").unwrap();
    let (o, _) = timed_at(&m0, &f, SemanticsSpec::finite(InfoMode::Auto, Some(2)), s0)?;
    ensure(o == Outcome::Unknown { bound: 2 }, || format!("0-writer: {o:?}"))?;
    Ok(format!(
        "gadgets with {} and {} states, Holds({}) in {holds_time:.2?}, replay v <= 6",
        m.state_count(),
        m0.state_count(),
        w.memory
    ))
}

fn refusal() -> Result<String, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("fig3.cgm");
    std::fs::write(&path, fixtures::fig3_family(2).unwrap().serialize()).map_err(|e| e.to_string())?;
    let cases: [&[&str]; 4] = [
        &["--semantics", "R", "--info", "incomplete"],
        &["--semantics", "R"],
        &["--semantics", "F", "--max-k", "none"],
        &["--semantics", "F", "--max-k", "none", "--info", "incomplete"],
    ];
    for extra in cases {
        let out = Command::new(env!("CARGO_BIN_EXE_atlcheck"))
            .args(["check", "--model"])
            .arg(&path)
            .args(["--formula", "<<1>> F p"])
            .args(extra)
            .output()
            .map_err(|e| e.to_string())?;
        let stderr = String::from_utf8_lossy(&out.stderr);
        ensure(out.status.code() == Some(3), || format!("{extra:?}: exit {:?}", out.status.code()))?;
        ensure(
            stderr.contains("unsupported semantics i·") && stderr.contains("undecidable"),
            || format!("{extra:?}: {stderr}"),
        )?;
    }
    Ok(format!("{} refused with exit 3", cases.len()))
}
