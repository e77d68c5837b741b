//! Lazy search for a winning bounded-memory profile.
//!
//! A search node is a partial profile: for each coalition member, a partial
//! table from (memory state, observation class) to (action, next memory).
//! Each node explores the part of the product that the partial tables
//! already determine. A violation found there is a violation of every
//! completion, so the node is pruned; otherwise the search branches on the
//! first missing entry met by the exploration. When nothing is missing the
//! reachable product is fully determined and free of violations, so any
//! completion of the tables wins.
//!
//! Memory targets are chosen in restricted-growth order (a new memory state
//! is always the next unused number), which removes renaming symmetry
//! without losing any strategy.

mod progress;

use std::collections::{HashMap, HashSet};

use crate::checker::fixpoint_objective;
use crate::logic::Formula;
use crate::model::{ActionId, GameModel, Player, StateId};
use crate::product::completions;
use crate::strategy::{canonicalize_to, Dfst, StrategyProfile};
use self::progress::Ltl;
use crate::temporal::{eval_prop, find_lasso_from, ltl_to_buchi, BuchiAutomaton, LabelledGraph, Objective, TemporalError};

/// Labels of game states, as a graph without edges.
struct StateLabels<'a>(&'a GameModel);

impl LabelledGraph for StateLabels<'_> {
    fn node_count(&self) -> usize {
        self.0.state_count()
    }

    fn initial_nodes(&self) -> &[usize] {
        &[]
    }

    fn successors(&self, _q: usize) -> &[usize] {
        &[]
    }

    fn holds(&self, q: usize, prop: &str) -> bool {
        self.0.has_prop(q, prop)
    }
}

/// The determined part of a product, with undetermined nodes as dead ends.
struct Explored<'a> {
    model: &'a GameModel,
    states: Vec<StateId>,
    succ: Vec<Vec<usize>>,
    initial: Vec<usize>,
}

impl LabelledGraph for Explored<'_> {
    fn node_count(&self) -> usize {
        self.states.len()
    }

    fn initial_nodes(&self) -> &[usize] {
        &self.initial
    }

    fn successors(&self, q: usize) -> &[usize] {
        &self.succ[q]
    }

    fn holds(&self, q: usize, prop: &str) -> bool {
        self.model.has_prop(self.states[q], prop)
    }
}

enum Goal {
    Next { goal: Vec<bool> },
    Globally { safe: Vec<bool> },
    Until { maintain: Vec<bool>, goal: Vec<bool> },
    Ltl { negated: BuchiAutomaton, obligation: Ltl },
}

enum Explore {
    Violation,
    /// Member index and table entry to branch on.
    Missing(usize, usize),
    Complete,
}

type Table = Vec<Option<(ActionId, usize)>>;

pub(crate) struct LazySearch<'a> {
    model: &'a GameModel,
    coalition: Vec<Player>,
    classes: Vec<usize>,
    starts: Vec<StateId>,
    goal: Goal,
    k: usize,
    examined: u64,
}

/// Result of a search: a winning profile if one exists, and the number of
/// partial profiles visited.
pub(crate) struct Found {
    pub profile: Option<StrategyProfile>,
    pub examined: u64,
}

impl<'a> LazySearch<'a> {
    pub(crate) fn new(
        model: &'a GameModel,
        coalition: &[Player],
        starts: &[StateId],
        objective: &Objective,
        k: usize,
    ) -> Result<Self, TemporalError> {
        let labels = StateLabels(model);
        let known = |f: &Formula| -> Result<(), TemporalError> {
            match f.propositions().into_iter().find(|p| !model.propositions().contains(p)) {
                Some(p) => Err(TemporalError::UnknownProp(p)),
                None => Ok(()),
            }
        };
        let truth = |f: &Formula| -> Result<Vec<bool>, TemporalError> {
            known(f)?;
            Ok((0..model.state_count()).map(|s| eval_prop(&labels, s, f)).collect())
        };
        // Outside the perfect-information winning region no strategy wins,
        // uniform or not, so reaching such a state is already a violation.
        let region = |obj: &Objective| fixpoint_objective(model, coalition, obj).expect("fixpoint shape");
        let goal = match objective {
            Objective::Next(g) => Goal::Next { goal: truth(g)? },
            Objective::Globally(g) => {
                known(g)?;
                Goal::Globally { safe: region(objective) }
            }
            Objective::Until(a, b) => {
                known(a)?;
                Goal::Until {
                    maintain: region(objective),
                    goal: truth(b)?,
                }
            }
            Objective::Ltl(f) => {
                known(f)?;
                Goal::Ltl {
                    negated: ltl_to_buchi(&Formula::not(f.clone()))?,
                    obligation: Ltl::from_formula(f, true),
                }
            }
        };
        let mut coalition = coalition.to_vec();
        coalition.sort();
        coalition.dedup();
        Ok(LazySearch {
            model,
            classes: coalition.iter().map(|&p| model.class_count(p)).collect(),
            coalition,
            starts: starts.to_vec(),
            goal,
            k: k.max(1),
            examined: 0,
        })
    }

    pub(crate) fn run(mut self) -> Found {
        let mut tables: Vec<Table> = self.classes.iter().map(|&c| vec![None; c * self.k]).collect();
        let mut used = vec![1usize; self.coalition.len()];
        let won = self.dfs(&mut tables, &mut used);
        Found {
            profile: won.then(|| self.complete(&tables)),
            examined: self.examined,
        }
    }

    fn dfs(&mut self, tables: &mut [Table], used: &mut [usize]) -> bool {
        self.examined += 1;
        let (i, e) = match self.explore(tables) {
            Explore::Violation => return false,
            Explore::Complete => return true,
            Explore::Missing(i, e) => (i, e),
        };
        let class = e % self.classes[i];
        // Under a next-step objective nothing after the first step matters.
        let targets = if matches!(self.goal, Goal::Next { .. }) {
            1
        } else {
            (used[i] + 1).min(self.k)
        };
        let actions = self.model.class_legal(self.coalition[i], class).to_vec();
        for a in actions {
            for t in 0..targets {
                tables[i][e] = Some((a, t));
                let before = used[i];
                used[i] = used[i].max(t + 1);
                if self.dfs(tables, used) {
                    return true;
                }
                used[i] = before;
            }
        }
        tables[i][e] = None;
        false
    }

    /// The entries used at `(s, mem)`, or the first missing one.
    fn entries(&self, tables: &[Table], s: StateId, mem: &[usize]) -> Result<Vec<(ActionId, usize)>, (usize, usize)> {
        let mut out = Vec::with_capacity(mem.len());
        for (i, &m) in mem.iter().enumerate() {
            let e = m * self.classes[i] + self.model.class_index(self.coalition[i], s);
            match tables[i][e] {
                Some(x) => out.push(x),
                None => return Err((i, e)),
            }
        }
        Ok(out)
    }

    fn explore(&self, tables: &[Table]) -> Explore {
        let n = self.coalition.len();
        let mut states: Vec<StateId> = Vec::new();
        let mut mems: Vec<Vec<usize>> = Vec::new();
        let mut index: HashMap<(StateId, Vec<usize>), usize> = HashMap::new();
        let mut succ: Vec<Vec<usize>> = Vec::new();
        let mut expanded: Vec<bool> = Vec::new();
        let mut intern = |s: StateId, mem: Vec<usize>, states: &mut Vec<StateId>, mems: &mut Vec<Vec<usize>>| {
            *index.entry((s, mem.clone())).or_insert_with(|| {
                states.push(s);
                mems.push(mem);
                states.len() - 1
            })
        };
        let initial: Vec<usize> = self
            .starts
            .iter()
            .map(|&s| intern(s, vec![0; n], &mut states, &mut mems))
            .collect();
        let mut missing = None;
        let mut q = 0;
        while q < states.len() {
            let s = states[q];
            succ.push(Vec::new());
            expanded.push(false);
            match &self.goal {
                Goal::Globally { safe } if !safe[s] => return Explore::Violation,
                Goal::Until { maintain, goal } => {
                    if goal[s] {
                        q += 1;
                        continue;
                    }
                    if !maintain[s] {
                        return Explore::Violation;
                    }
                }
                Goal::Next { .. } if q >= initial.len() => {
                    q += 1;
                    continue;
                }
                _ => {}
            }
            let entries = match self.entries(tables, s, &mems[q]) {
                Ok(x) => x,
                Err(at) => {
                    missing.get_or_insert(at);
                    q += 1;
                    continue;
                }
            };
            let mut fixed = vec![None; self.model.player_count()];
            for (i, &(a, _)) in entries.iter().enumerate() {
                fixed[self.coalition[i].index()] = Some(a);
            }
            let next_mem: Vec<usize> = entries.iter().map(|&(_, t)| t).collect();
            let mut targets = Vec::new();
            for mv in completions(self.model, s, &fixed) {
                let t = self.model.transition(s, &mv).expect("validated model is total");
                if let Goal::Next { goal } = &self.goal {
                    if !goal[t] {
                        return Explore::Violation;
                    }
                    continue;
                }
                targets.push(intern(t, next_mem.clone(), &mut states, &mut mems));
            }
            targets.sort_unstable();
            targets.dedup();
            succ[q] = targets;
            expanded[q] = true;
            q += 1;
        }
        let violated = match &self.goal {
            Goal::Until { .. } => has_cycle(&succ, &expanded),
            Goal::Ltl { negated, obligation } => {
                let g = Explored {
                    model: self.model,
                    states,
                    succ,
                    initial: initial.clone(),
                };
                has_bad_prefix(&g, &expanded, obligation) || find_lasso_from(&g, negated, &initial).is_some()
            }
            _ => false,
        };
        match (violated, missing) {
            (true, _) => Explore::Violation,
            (false, Some((i, e))) => Explore::Missing(i, e),
            (false, None) => Explore::Complete,
        }
    }

    /// Fills unused entries with the first legal action and a self-loop.
    fn complete(&self, tables: &[Table]) -> StrategyProfile {
        let members = tables
            .iter()
            .enumerate()
            .map(|(i, t)| {
                let c = self.classes[i];
                let p = self.coalition[i];
                let mut next = Vec::with_capacity(t.len());
                let mut output = Vec::with_capacity(t.len());
                for (e, entry) in t.iter().enumerate() {
                    let (a, m) = entry.unwrap_or((self.model.class_legal(p, e % c)[0], e / c));
                    output.push(a);
                    next.push(m);
                }
                let d = Dfst::new(p, c, 0, next, output).expect("tables are total");
                canonicalize_to(&d, self.k)
            })
            .collect();
        StrategyProfile::new(members).expect("one table per member")
    }
}

/// Pairs of (node, obligation) explored before giving up on a bad prefix.
const PROGRESSION_LIMIT: usize = 4096;

/// Whether some path through expanded nodes progresses `f` to `false`.
/// Every completion of the tables shares that prefix, and the model is
/// total, so each completion has a violating outcome.
fn has_bad_prefix(g: &Explored<'_>, expanded: &[bool], f: &Ltl) -> bool {
    let mut seen: HashSet<(usize, Ltl)> = HashSet::new();
    let mut stack: Vec<(usize, Ltl)> = g.initial.iter().map(|&q| (q, f.clone())).collect();
    while let Some((q, o)) = stack.pop() {
        if seen.len() >= PROGRESSION_LIMIT {
            return false;
        }
        if !seen.insert((q, o.clone())) {
            continue;
        }
        let rest = o.progress(&|p: &str| g.holds(q, p));
        if rest.is_false() {
            return true;
        }
        if expanded[q] && rest != Ltl::Const(true) {
            stack.extend(g.succ[q].iter().map(|&t| (t, rest.clone())));
        }
    }
    false
}

/// Whether the subgraph of expanded nodes has a cycle.
fn has_cycle(succ: &[Vec<usize>], expanded: &[bool]) -> bool {
    // Kahn's algorithm restricted to expanded nodes.
    let n = succ.len();
    let mut indeg = vec![0usize; n];
    for q in (0..n).filter(|&q| expanded[q]) {
        for &t in &succ[q] {
            if expanded[t] {
                indeg[t] += 1;
            }
        }
    }
    let mut work: Vec<usize> = (0..n).filter(|&q| expanded[q] && indeg[q] == 0).collect();
    let mut removed = 0;
    while let Some(q) = work.pop() {
        removed += 1;
        for &t in &succ[q] {
            if expanded[t] {
                indeg[t] -= 1;
                if indeg[t] == 0 {
                    work.push(t);
                }
            }
        }
    }
    removed < expanded.iter().filter(|&&x| x).count()
}
