//! Universal path objectives over labelled transition systems.
//!
//! The three ATL shapes (`X`, `G`, `U` over propositional formulas) are
//! decided by the usual fixpoint labeling. General LTL bodies go through a
//! Büchi automaton for the negated body and a nested depth-first search for
//! an accepting lasso in the product.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::logic::Formula;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TemporalError {
    #[error("strategic quantifier in a path objective: {0}")]
    Quantifier(String),
    #[error("expected a propositional formula, found {0}")]
    NotPropositional(String),
    #[error("unknown proposition {0}")]
    UnknownProp(String),
    #[error("formula has {0} propositions; at most 64 are supported")]
    TooManyProps(usize),
}

/// A finite graph with initial nodes and proposition labels. Nodes without
/// successors are allowed and simply end every path through them.
pub trait LabelledGraph {
    fn node_count(&self) -> usize;
    fn initial_nodes(&self) -> &[usize];
    fn successors(&self, q: usize) -> &[usize];
    fn holds(&self, q: usize, prop: &str) -> bool;
    /// Whether `prop` belongs to the labeling's proposition universe.
    fn knows(&self, _prop: &str) -> bool {
        true
    }
    fn node_name(&self, q: usize) -> String {
        q.to_string()
    }
}

/// A plain adjacency-list graph, handy for tests and partial explorations.
#[derive(Clone, Debug, Default)]
pub struct SimpleGraph {
    pub succ: Vec<Vec<usize>>,
    pub labels: Vec<BTreeSet<String>>,
    pub initial: Vec<usize>,
    pub names: Vec<String>,
}

impl LabelledGraph for SimpleGraph {
    fn node_count(&self) -> usize {
        self.succ.len()
    }
    fn initial_nodes(&self) -> &[usize] {
        &self.initial
    }
    fn successors(&self, q: usize) -> &[usize] {
        &self.succ[q]
    }
    fn holds(&self, q: usize, prop: &str) -> bool {
        self.labels[q].contains(prop)
    }
    fn node_name(&self, q: usize) -> String {
        self.names.get(q).cloned().unwrap_or_else(|| q.to_string())
    }
}

/// Truth of a propositional formula at a node.
pub fn eval_prop<G: LabelledGraph + ?Sized>(g: &G, q: usize, f: &Formula) -> bool {
    match f {
        Formula::True => true,
        Formula::Prop(p) => g.holds(q, p),
        Formula::Not(a) => !eval_prop(g, q, a),
        Formula::Or(a, b) => eval_prop(g, q, a) || eval_prop(g, q, b),
        Formula::Next(_) | Formula::Until(..) | Formula::Coalition(..) => {
            panic!("eval_prop called on a non-propositional formula")
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Objective {
    /// Every successor satisfies the goal.
    Next(Formula),
    /// Every path stays in safe nodes.
    Globally(Formula),
    /// Every path keeps `maintain` until it reaches `goal`.
    Until(Formula, Formula),
    /// Every path satisfies the quantifier-free path formula.
    Ltl(Formula),
}

impl Objective {
    /// Recognizes the fixpoint shapes of a quantifier-free path formula and
    /// falls back to [`Objective::Ltl`].
    pub fn from_body(body: &Formula) -> Objective {
        use crate::logic::{atl_shape, AtlShape};
        match atl_shape(body) {
            Some(AtlShape::Next(a)) if a.is_propositional() => Objective::Next(a.clone()),
            Some(AtlShape::Globally(a)) if a.is_propositional() => Objective::Globally(a.clone()),
            Some(AtlShape::Until(a, b)) if a.is_propositional() && b.is_propositional() => {
                Objective::Until(a.clone(), b.clone())
            }
            _ => Objective::Ltl(body.clone()),
        }
    }

    /// The objective as a path formula.
    pub fn to_formula(&self) -> Formula {
        match self {
            Objective::Next(a) => Formula::next(a.clone()),
            Objective::Globally(a) => Formula::globally(a.clone()),
            Objective::Until(a, b) => Formula::until(a.clone(), b.clone()),
            Objective::Ltl(f) => f.clone(),
        }
    }

    fn formulas(&self) -> Vec<&Formula> {
        match self {
            Objective::Next(a) | Objective::Globally(a) | Objective::Ltl(a) => vec![a],
            Objective::Until(a, b) => vec![a, b],
        }
    }
}

fn check_props<G: LabelledGraph + ?Sized>(g: &G, f: &Formula) -> Result<(), TemporalError> {
    for p in f.propositions() {
        if !g.knows(&p) {
            return Err(TemporalError::UnknownProp(p));
        }
    }
    Ok(())
}

fn predecessors<G: LabelledGraph + ?Sized>(g: &G) -> Vec<Vec<usize>> {
    let mut pred = vec![Vec::new(); g.node_count()];
    for q in 0..g.node_count() {
        for &t in g.successors(q) {
            pred[t].push(q);
        }
    }
    pred
}

/// The nodes satisfying `A obj` for a fixpoint objective. Nodes without
/// successors vacuously satisfy `AX` and `AG`-continuations, so callers
/// should pass total graphs.
pub fn check_universal_objective<G: LabelledGraph + ?Sized>(
    g: &G,
    obj: &Objective,
) -> Result<Vec<bool>, TemporalError> {
    for f in obj.formulas() {
        if f.has_coalition() {
            return Err(TemporalError::Quantifier(f.to_string()));
        }
        if !matches!(obj, Objective::Ltl(_)) && !f.is_propositional() {
            return Err(TemporalError::NotPropositional(f.to_string()));
        }
        check_props(g, f)?;
    }
    let n = g.node_count();
    match obj {
        Objective::Next(goal) => {
            let good: Vec<bool> = (0..n).map(|q| eval_prop(g, q, goal)).collect();
            Ok((0..n).map(|q| g.successors(q).iter().all(|&t| good[t])).collect())
        }
        Objective::Globally(safe) => {
            // Complement of "some path reaches an unsafe node".
            let pred = predecessors(g);
            let mut bad: Vec<bool> = (0..n).map(|q| !eval_prop(g, q, safe)).collect();
            let mut work: Vec<usize> = (0..n).filter(|&q| bad[q]).collect();
            while let Some(q) = work.pop() {
                for &p in &pred[q] {
                    if !bad[p] {
                        bad[p] = true;
                        work.push(p);
                    }
                }
            }
            Ok(bad.into_iter().map(|b| !b).collect())
        }
        Objective::Until(maintain, goal) => {
            let pred = predecessors(g);
            let keep: Vec<bool> = (0..n).map(|q| eval_prop(g, q, maintain)).collect();
            let mut win: Vec<bool> = (0..n).map(|q| eval_prop(g, q, goal)).collect();
            let mut missing: Vec<usize> = (0..n).map(|q| g.successors(q).len()).collect();
            let mut work: Vec<usize> = (0..n).filter(|&q| win[q]).collect();
            while let Some(q) = work.pop() {
                for &p in &pred[q] {
                    if win[p] {
                        continue;
                    }
                    missing[p] -= 1;
                    if missing[p] == 0 && keep[p] {
                        win[p] = true;
                        work.push(p);
                    }
                }
            }
            Ok(win)
        }
        Objective::Ltl(f) => {
            let aut = ltl_to_buchi(&Formula::not(f.clone()))?;
            Ok((0..n)
                .map(|q| find_lasso_from(g, &aut, &[q]).is_none())
                .collect())
        }
    }
}

/// Negation normal form over proposition indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Nnf {
    True,
    False,
    Lit(usize, bool),
    And(Box<Nnf>, Box<Nnf>),
    Or(Box<Nnf>, Box<Nnf>),
    Next(Box<Nnf>),
    Until(Box<Nnf>, Box<Nnf>),
    Release(Box<Nnf>, Box<Nnf>),
}

fn to_nnf(f: &Formula, positive: bool, props: &[String]) -> Nnf {
    let b = Box::new;
    match (f, positive) {
        (Formula::True, true) => Nnf::True,
        (Formula::True, false) => Nnf::False,
        (Formula::Prop(p), pol) => Nnf::Lit(props.binary_search(p).expect("collected"), pol),
        (Formula::Not(a), pol) => to_nnf(a, !pol, props),
        (Formula::Or(x, y), true) => Nnf::Or(b(to_nnf(x, true, props)), b(to_nnf(y, true, props))),
        (Formula::Or(x, y), false) => {
            Nnf::And(b(to_nnf(x, false, props)), b(to_nnf(y, false, props)))
        }
        (Formula::Next(a), pol) => Nnf::Next(b(to_nnf(a, pol, props))),
        (Formula::Until(x, y), true) => {
            Nnf::Until(b(to_nnf(x, true, props)), b(to_nnf(y, true, props)))
        }
        (Formula::Until(x, y), false) => {
            Nnf::Release(b(to_nnf(x, false, props)), b(to_nnf(y, false, props)))
        }
        (Formula::Coalition(..), _) => unreachable!("checked by caller"),
    }
}

/// A Büchi automaton with state-based guards: a run visits state `n` at
/// position `i` only if the letter at `i` satisfies the guard of `n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BuchiAutomaton {
    props: Vec<String>,
    /// Per state: propositions required true and required false (bit masks
    /// over `props`).
    pos: Vec<u64>,
    neg: Vec<u64>,
    succ: Vec<Vec<usize>>,
    initial: Vec<usize>,
    accepting: Vec<bool>,
}

impl BuchiAutomaton {
    pub fn state_count(&self) -> usize {
        self.succ.len()
    }

    pub fn initial(&self) -> &[usize] {
        &self.initial
    }

    pub fn successors(&self, n: usize) -> &[usize] {
        &self.succ[n]
    }

    pub fn is_accepting(&self, n: usize) -> bool {
        self.accepting[n]
    }

    /// The propositions the automaton reads, sorted.
    pub fn propositions(&self) -> &[String] {
        &self.props
    }

    /// Whether a letter (bit mask over [`Self::propositions`]) satisfies the
    /// guard of state `n`.
    pub fn admits(&self, n: usize, letter: u64) -> bool {
        letter & self.pos[n] == self.pos[n] && letter & self.neg[n] == 0
    }

    /// The letter a graph node presents to the automaton.
    pub fn letter_of<G: LabelledGraph + ?Sized>(&self, g: &G, q: usize) -> u64 {
        self.props
            .iter()
            .enumerate()
            .filter(|(_, p)| g.holds(q, p))
            .fold(0, |acc, (i, _)| acc | (1 << i))
    }
}

#[derive(Clone, Default)]
struct Cover {
    old: BTreeSet<Nnf>,
    next: BTreeSet<Nnf>,
}

/// All ways to satisfy the obligations in `new` at the current position.
fn expand(mut new: Vec<Nnf>, cover: Cover, out: &mut Vec<Cover>) {
    let Some(f) = new.pop() else {
        out.push(cover);
        return;
    };
    if cover.old.contains(&f) {
        return expand(new, cover, out);
    }
    let mut cover = cover;
    match &f {
        Nnf::True => expand(new, cover, out),
        Nnf::False => {}
        Nnf::Lit(p, v) => {
            if cover.old.contains(&Nnf::Lit(*p, !v)) {
                return;
            }
            cover.old.insert(f);
            expand(new, cover, out)
        }
        Nnf::And(a, b) => {
            new.push((**a).clone());
            new.push((**b).clone());
            cover.old.insert(f);
            expand(new, cover, out)
        }
        Nnf::Next(a) => {
            cover.next.insert((**a).clone());
            cover.old.insert(f);
            expand(new, cover, out)
        }
        Nnf::Or(a, b) => {
            cover.old.insert(f.clone());
            let mut left = new.clone();
            left.push((**a).clone());
            expand(left, cover.clone(), out);
            new.push((**b).clone());
            expand(new, cover, out)
        }
        Nnf::Until(a, b) => {
            // a U b  =  b | (a & X(a U b))
            cover.old.insert(f.clone());
            let mut now = new.clone();
            now.push((**b).clone());
            expand(now, cover.clone(), out);
            new.push((**a).clone());
            cover.next.insert(f.clone());
            expand(new, cover, out)
        }
        Nnf::Release(a, b) => {
            // a R b  =  b & (a | X(a R b))
            cover.old.insert(f.clone());
            let mut both = new.clone();
            both.push((**a).clone());
            both.push((**b).clone());
            expand(both, cover.clone(), out);
            new.push((**b).clone());
            cover.next.insert(f.clone());
            expand(new, cover, out)
        }
    }
}

fn collect_untils(f: &Nnf, out: &mut BTreeSet<Nnf>) {
    match f {
        Nnf::True | Nnf::False | Nnf::Lit(..) => {}
        Nnf::Next(a) => collect_untils(a, out),
        Nnf::And(a, b) | Nnf::Or(a, b) | Nnf::Release(a, b) => {
            collect_untils(a, out);
            collect_untils(b, out);
        }
        Nnf::Until(a, b) => {
            out.insert(f.clone());
            collect_untils(a, out);
            collect_untils(b, out);
        }
    }
}

/// A Büchi automaton accepting exactly the words (sequences of truth
/// assignments over the propositions of `f`) that satisfy `f`.
///
/// Tableau construction: a state is a cover of the current obligations;
/// each until `a U b` contributes the acceptance set of covers that either
/// do not contain it or contain `b`; the generalized condition is turned into
/// a plain one with a round-robin counter.
pub fn ltl_to_buchi(f: &Formula) -> Result<BuchiAutomaton, TemporalError> {
    if f.has_coalition() {
        return Err(TemporalError::Quantifier(f.to_string()));
    }
    let props: Vec<String> = f.propositions().into_iter().collect();
    if props.len() > 64 {
        return Err(TemporalError::TooManyProps(props.len()));
    }
    let nnf = to_nnf(f, true, &props);
    let mut untils = BTreeSet::new();
    collect_untils(&nnf, &mut untils);
    let untils: Vec<Nnf> = untils.into_iter().collect();

    // Generalized automaton over covers.
    let mut ids: HashMap<(BTreeSet<Nnf>, BTreeSet<Nnf>), usize> = HashMap::new();
    let mut covers: Vec<Cover> = Vec::new();
    let mut gsucc: Vec<Vec<usize>> = Vec::new();
    let mut intern = |c: Cover, covers: &mut Vec<Cover>, gsucc: &mut Vec<Vec<usize>>| -> usize {
        let key = (c.old.clone(), c.next.clone());
        *ids.entry(key).or_insert_with(|| {
            covers.push(c);
            gsucc.push(Vec::new());
            covers.len() - 1
        })
    };
    let mut start = Vec::new();
    expand(vec![nnf], Cover::default(), &mut start);
    let initial: Vec<usize> = start
        .into_iter()
        .map(|c| intern(c, &mut covers, &mut gsucc))
        .collect();
    let mut done = 0;
    while done < covers.len() {
        let mut next = Vec::new();
        expand(covers[done].next.iter().cloned().collect(), Cover::default(), &mut next);
        let mut targets: Vec<usize> = next
            .into_iter()
            .map(|c| intern(c, &mut covers, &mut gsucc))
            .collect();
        targets.sort_unstable();
        targets.dedup();
        gsucc[done] = targets;
        done += 1;
    }
    let in_set = |n: usize, i: usize| -> bool {
        let Nnf::Until(_, b) = &untils[i] else {
            unreachable!()
        };
        !covers[n].old.contains(&untils[i]) || covers[n].old.contains(b)
    };

    // Degeneralize: state (n, i) waits for acceptance set i.
    let k = untils.len().max(1);
    let g = covers.len();
    let id = |n: usize, i: usize| n * k + i;
    let mut succ = vec![Vec::new(); g * k];
    let mut accepting = vec![false; g * k];
    for n in 0..g {
        for i in 0..k {
            let hit = untils.is_empty() || in_set(n, i);
            let j = if hit { (i + 1) % k } else { i };
            succ[id(n, i)] = gsucc[n].iter().map(|&t| id(t, j)).collect();
            accepting[id(n, i)] = i == 0 && hit;
        }
    }
    let mut pos = vec![0u64; g * k];
    let mut neg = vec![0u64; g * k];
    for n in 0..g {
        let (mut p, mut q) = (0u64, 0u64);
        for f in &covers[n].old {
            if let Nnf::Lit(i, v) = f {
                if *v {
                    p |= 1 << i;
                } else {
                    q |= 1 << i;
                }
            }
        }
        for i in 0..k {
            pos[id(n, i)] = p;
            neg[id(n, i)] = q;
        }
    }
    let initial = {
        let mut v: Vec<usize> = initial.into_iter().map(|n| id(n, 0)).collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    Ok(BuchiAutomaton {
        props,
        pos,
        neg,
        succ,
        initial,
        accepting,
    })
}

/// An ultimately periodic path: `stem` followed by `cycle` repeated forever.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lasso {
    pub stem: Vec<usize>,
    pub cycle: Vec<usize>,
}

impl Lasso {
    /// `lasso: s0 s1 [ s2 s3 ]` with node names from the graph.
    pub fn render<G: LabelledGraph + ?Sized>(&self, g: &G) -> String {
        let names = |v: &[usize]| v.iter().map(|&q| g.node_name(q)).collect::<Vec<_>>();
        let mut parts = vec!["lasso:".to_string()];
        parts.extend(names(&self.stem));
        parts.push("[".into());
        parts.extend(names(&self.cycle));
        parts.push("]".into());
        parts.join(" ")
    }

    /// Total number of positions before the path repeats.
    pub fn len(&self) -> usize {
        self.stem.len() + self.cycle.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl fmt::Display for Lasso {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "lasso: {:?} [ {:?} ]", self.stem, self.cycle)
    }
}

/// A reachable accepting cycle of `g` x `b`, projected to graph nodes.
pub fn exists_lasso<G: LabelledGraph + ?Sized>(g: &G, b: &BuchiAutomaton) -> Option<Lasso> {
    find_lasso_from(g, b, g.initial_nodes())
}

/// Like [`exists_lasso`], starting from the given graph nodes.
///
/// Nested depth-first search; successors are visited in graph order, then
/// automaton order, so the witness is deterministic.
pub fn find_lasso_from<G: LabelledGraph + ?Sized>(
    g: &G,
    b: &BuchiAutomaton,
    starts: &[usize],
) -> Option<Lasso> {
    let nb = b.state_count();
    if nb == 0 {
        return None;
    }
    let letters: Vec<u64> = (0..g.node_count()).map(|q| b.letter_of(g, q)).collect();
    let succ_of = |(q, n): (usize, usize)| -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for &q2 in g.successors(q) {
            for &n2 in b.successors(n) {
                if b.admits(n2, letters[q2]) {
                    out.push((q2, n2));
                }
            }
        }
        out
    };
    type Frame = ((usize, usize), Vec<(usize, usize)>, usize);
    let key = |(q, n): (usize, usize)| q * nb + n;
    let mut outer_seen: HashMap<usize, ()> = HashMap::new();
    let mut inner_seen: HashMap<usize, ()> = HashMap::new();
    for &q0 in starts {
        for &n0 in b.initial() {
            if !b.admits(n0, letters[q0]) || outer_seen.contains_key(&key((q0, n0))) {
                continue;
            }
            outer_seen.insert(key((q0, n0)), ());
            // Outer stack: (state, successors, next index).
            let mut stack: Vec<Frame> =
                vec![((q0, n0), succ_of((q0, n0)), 0)];
            while let Some(top) = stack.last_mut() {
                if top.2 < top.1.len() {
                    let t = top.1[top.2];
                    top.2 += 1;
                    if outer_seen.insert(key(t), ()).is_none() {
                        stack.push((t, succ_of(t), 0));
                    }
                    continue;
                }
                let (seed, _, _) = stack.pop().expect("non-empty");
                if !b.is_accepting(seed.1) {
                    continue;
                }
                // Inner search for a cycle back to the seed.
                let mut inner: Vec<Frame> =
                    vec![(seed, succ_of(seed), 0)];
                while let Some(top) = inner.last_mut() {
                    if top.2 < top.1.len() {
                        let t = top.1[top.2];
                        top.2 += 1;
                        if t == seed {
                            let stem: Vec<usize> = stack.iter().map(|e| e.0 .0).collect();
                            let cycle: Vec<usize> = inner.iter().map(|e| e.0 .0).collect();
                            return Some(Lasso { stem, cycle });
                        }
                        if inner_seen.insert(key(t), ()).is_none() {
                            inner.push((t, succ_of(t), 0));
                        }
                        continue;
                    }
                    inner.pop();
                }
            }
        }
    }
    None
}

/// For each initial node of `g`: whether every path from it satisfies `f`.
pub fn check_universal_ltl<G: LabelledGraph + ?Sized>(
    g: &G,
    f: &Formula,
) -> Result<Vec<bool>, TemporalError> {
    Ok(universal_ltl_counterexamples(g, f)?
        .into_iter()
        .map(|c| c.is_none())
        .collect())
}

/// For each initial node: a path violating `f`, if there is one.
pub fn universal_ltl_counterexamples<G: LabelledGraph + ?Sized>(
    g: &G,
    f: &Formula,
) -> Result<Vec<Option<Lasso>>, TemporalError> {
    check_props(g, f)?;
    let aut = ltl_to_buchi(&Formula::not(f.clone()))?;
    Ok(g.initial_nodes()
        .iter()
        .map(|&q| find_lasso_from(g, &aut, &[q]))
        .collect())
}

#[cfg(test)]
#[path = "../tests/common/oracle.rs"]
#[allow(dead_code)]
mod oracle;
