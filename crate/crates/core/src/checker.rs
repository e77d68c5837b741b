//! Semantics dispatch and the bottom-up driver for nested formulas.
//!
//! A quantified subformula `<<A>> body` with a quantifier-free body is
//! decided at a state `s` by searching for a coalition profile whose product
//! with the game satisfies the body on every outcome from the start set
//! (`{s}`, or the union of the members' observation classes of `s` under
//! incomplete information).
//!
//! Nested formulas are handled innermost first: each decided subformula is
//! replaced by a fresh proposition that labels the states where it holds.
//! Because finite-memory rounds may end in `Unknown`, every round writes two
//! labels, `@j` (holds) and `@j.u` (holds or unknown). Later bodies are
//! checked once with `@j` at positive and `@j.u` at negative occurrences
//! (an under-approximation) and, if that does not hold, once the other way
//! round (an over-approximation). The top level is evaluated in Kleene's
//! three-valued logic.

use std::collections::BTreeSet;
use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::logic::{atl_shape, AtlShape, Formula, LogicError};
use crate::model::{GameModel, Player, StateId};
use crate::product::{build_product, completions, ProductError};
use crate::search::LazySearch;
use crate::strategy::{enumerate_profiles, Dfst, StrategyError, StrategyProfile};
use crate::temporal::{
    check_universal_ltl, check_universal_objective, eval_prop, find_lasso_from, ltl_to_buchi,
    LabelledGraph, Objective, TemporalError,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum InfoMode {
    /// Complete information iff every partition is the identity.
    #[default]
    Auto,
    Complete,
    Incomplete,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MemoryMode {
    /// Memoryless strategies (`r`), the same as `Bounded(1)`.
    Memoryless,
    /// Strategies with `k` memory states (`F_k`).
    Bounded(usize),
    /// Finite memory (`F`), searched up to `cap` memory states.
    Finite { cap: Option<usize> },
    /// Perfect recall (`R`); `cap` bounds the finite-memory search used where
    /// no exact procedure applies.
    PerfectRecall { cap: Option<usize> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SemanticsSpec {
    pub info: InfoMode,
    pub memory: MemoryMode,
}

impl SemanticsSpec {
    pub fn new(info: InfoMode, memory: MemoryMode) -> Self {
        SemanticsSpec { info, memory }
    }

    pub fn complete_bounded(k: usize) -> Self {
        Self::new(InfoMode::Complete, MemoryMode::Bounded(k))
    }

    pub fn incomplete_bounded(k: usize) -> Self {
        Self::new(InfoMode::Incomplete, MemoryMode::Bounded(k))
    }

    pub fn memoryless(info: InfoMode) -> Self {
        Self::new(info, MemoryMode::Memoryless)
    }

    pub fn finite(info: InfoMode, cap: Option<usize>) -> Self {
        Self::new(info, MemoryMode::Finite { cap })
    }

    pub fn perfect_recall(info: InfoMode, cap: Option<usize>) -> Self {
        Self::new(info, MemoryMode::PerfectRecall { cap })
    }

    fn memory_label(&self) -> String {
        match self.memory {
            MemoryMode::Memoryless => "r".to_string(),
            MemoryMode::Bounded(k) => format!("F_{k}"),
            MemoryMode::Finite { .. } => "F".to_string(),
            MemoryMode::PerfectRecall { .. } => "R".to_string(),
        }
    }

    fn label(&self, complete: bool) -> String {
        format!("{}·{}", if complete { "I" } else { "i" }, self.memory_label())
    }
}

impl fmt::Display for SemanticsSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let x = match self.info {
            InfoMode::Auto => "auto",
            InfoMode::Complete => "I",
            InfoMode::Incomplete => "i",
        };
        write!(f, "{x}·{}", self.memory_label())
    }
}

/// How bounded-memory profiles are searched.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Engine {
    /// Partial profiles with pruning on the determined part of the product.
    #[default]
    Lazy,
    /// Every canonical profile in enumeration order.
    Exhaustive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CheckOptions {
    pub engine: Engine,
    /// Worker threads; `None` uses the global pool.
    pub jobs: Option<usize>,
    /// Largest accepted memory bound or cap.
    pub k_ceiling: usize,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            engine: Engine::Lazy,
            jobs: None,
            k_ceiling: 8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub profile: StrategyProfile,
    /// Memory bound at which the profile was found (0 for the empty coalition).
    pub memory: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Holds { witness: Option<Witness> },
    Fails,
    /// No profile up to `bound` memory states, and the semantics admits
    /// larger ones.
    Unknown { bound: usize },
}

impl Outcome {
    pub fn holds(&self) -> bool {
        matches!(self, Outcome::Holds { .. })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Outcome::Holds { .. } => "holds",
            Outcome::Fails => "fails",
            Outcome::Unknown { .. } => "unknown",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub state: StateId,
    pub outcome: Outcome,
    /// Profiles (or partial profiles) visited for this state over all rounds.
    pub profiles_examined: u64,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CheckError {
    #[error("unsupported semantics {semantics}: {reason}")]
    Unsupported { semantics: String, reason: String },
    #[error("memory bound must be at least 1")]
    ZeroBound,
    #[error("memory bound {k} exceeds the ceiling {ceiling}")]
    BoundTooLarge { k: usize, ceiling: usize },
    #[error("player {0} does not exist in the model")]
    UnknownPlayer(Player),
    #[error("unknown proposition {0}")]
    UnknownProp(String),
    #[error("not a state formula: {0}")]
    NotStateFormula(String),
    #[error("the body contains a strategic quantifier: {0}")]
    NestedBody(String),
    #[error("the fixpoint algorithm needs complete information")]
    NeedsCompleteInformation,
    #[error("not an ATL formula: {0}")]
    NotAtl(String),
    #[error("state {0} out of range")]
    BadState(StateId),
    #[error("witness failed re-verification at state {0}")]
    WitnessRejected(String),
    #[error(transparent)]
    Logic(#[from] LogicError),
    #[error(transparent)]
    Temporal(#[from] TemporalError),
    #[error(transparent)]
    Product(#[from] ProductError),
    #[error(transparent)]
    Strategy(#[from] StrategyError),
}

#[derive(Clone, Debug)]
struct Decision {
    outcome: Outcome,
    examined: u64,
}

impl Decision {
    fn new(outcome: Outcome, examined: u64) -> Self {
        Decision { outcome, examined }
    }
}

/// Resolved semantics for one run.
struct Ctx {
    complete: bool,
    memory: MemoryMode,
    opts: CheckOptions,
    label: String,
}

impl Ctx {
    fn resolve(model: &GameModel, sem: &SemanticsSpec, opts: &CheckOptions) -> Result<Ctx, CheckError> {
        let complete = match sem.info {
            InfoMode::Auto => model.is_complete_information(),
            InfoMode::Complete => true,
            InfoMode::Incomplete => false,
        };
        let label = sem.label(complete);
        let unsupported = |reason: &str| CheckError::Unsupported {
            semantics: label.clone(),
            reason: reason.to_string(),
        };
        let check_k = |k: usize| -> Result<(), CheckError> {
            if k == 0 {
                Err(CheckError::ZeroBound)
            } else if k > opts.k_ceiling {
                Err(CheckError::BoundTooLarge {
                    k,
                    ceiling: opts.k_ceiling,
                })
            } else {
                Ok(())
            }
        };
        match sem.memory {
            MemoryMode::Memoryless => {}
            MemoryMode::Bounded(k) => check_k(k)?,
            MemoryMode::Finite { cap } | MemoryMode::PerfectRecall { cap } => {
                if let Some(c) = cap {
                    check_k(c)?;
                }
            }
        }
        match sem.memory {
            MemoryMode::PerfectRecall { .. } if !complete => {
                return Err(unsupported(
                    "perfect-recall strategies under incomplete information make model checking undecidable",
                ))
            }
            MemoryMode::Finite { cap: None } if !complete => {
                return Err(unsupported(
                    "finite-memory strategies under incomplete information make model checking undecidable; give a memory cap",
                ))
            }
            _ => {}
        }
        Ok(Ctx {
            complete,
            memory: sem.memory,
            opts: *opts,
            label,
        })
    }

    fn nominal_bound(&self) -> usize {
        match self.memory {
            MemoryMode::Memoryless => 1,
            MemoryMode::Bounded(k) => k,
            MemoryMode::Finite { cap } | MemoryMode::PerfectRecall { cap } => cap.unwrap_or(0),
        }
    }

    fn starts(&self, model: &GameModel, s: StateId, coalition: &[Player]) -> Vec<StateId> {
        if self.complete || coalition.is_empty() {
            return vec![s];
        }
        let mut out: BTreeSet<StateId> = BTreeSet::new();
        for &a in coalition {
            out.extend(model.partition(a)[model.class_index(a, s)].iter().copied());
        }
        out.into_iter().collect()
    }

    /// Searches for a profile with exactly `k` memory states.
    fn search(
        &self,
        model: &GameModel,
        coalition: &[Player],
        starts: &[StateId],
        obj: &Objective,
        k: usize,
    ) -> Result<(Option<StrategyProfile>, u64), CheckError> {
        let (profile, examined) = match self.opts.engine {
            Engine::Lazy => {
                let found = LazySearch::new(model, coalition, starts, obj, k)?.run();
                (found.profile, found.examined)
            }
            Engine::Exhaustive => {
                let space = enumerate_profiles(model, coalition, k)?;
                let len = u64::try_from(space.len()).map_err(|_| StrategyError::TooLarge(space.len()))?;
                let hit = (0..len)
                    .into_par_iter()
                    .map(|i| profile_wins(model, &space.get(i as u128), starts, obj).map(|ok| ok.then_some(i)))
                    .find_first(|r| !matches!(r, Ok(None)));
                match hit {
                    Some(Ok(Some(i))) => (Some(space.get(i as u128)), i + 1),
                    Some(Err(e)) => return Err(e),
                    _ => (None, len),
                }
            }
        };
        if let Some(p) = &profile {
            if !profile_wins(model, p, starts, obj)? {
                return Err(CheckError::WitnessRejected(model.state_name(starts[0]).to_string()));
            }
        }
        Ok((profile, examined))
    }

    fn bounded(
        &self,
        model: &GameModel,
        coalition: &[Player],
        starts: &[StateId],
        obj: &Objective,
        k: usize,
    ) -> Result<Decision, CheckError> {
        let (profile, examined) = self.search(model, coalition, starts, obj, k)?;
        let outcome = match profile {
            Some(profile) => Outcome::Holds {
                witness: Some(Witness { profile, memory: k }),
            },
            None => Outcome::Fails,
        };
        Ok(Decision::new(outcome, examined))
    }

    /// `k = 1, 2, .., cap`; `Unknown(cap)` when every bound fails.
    fn deepen(
        &self,
        model: &GameModel,
        coalition: &[Player],
        starts: &[StateId],
        obj: &Objective,
        cap: usize,
    ) -> Result<Decision, CheckError> {
        let mut examined = 0;
        for k in 1..=cap {
            let d = self.bounded(model, coalition, starts, obj, k)?;
            examined += d.examined;
            if d.outcome.holds() {
                return Ok(Decision::new(d.outcome, examined));
            }
        }
        Ok(Decision::new(Outcome::Unknown { bound: cap }, examined))
    }

    fn need_cap(&self, cap: Option<usize>) -> Result<usize, CheckError> {
        cap.ok_or_else(|| CheckError::Unsupported {
            semantics: self.label.clone(),
            reason: "no exact procedure for this coalition and body; give a memory cap".into(),
        })
    }

    /// Decides `<<coalition>> body` at `s`. `fixpoint` holds the precomputed
    /// satisfaction vector when the exact fixpoint algorithm applies.
    fn decide(
        &self,
        model: &GameModel,
        s: StateId,
        coalition: &[Player],
        body: &Formula,
        fixpoint: Option<&[bool]>,
    ) -> Result<Decision, CheckError> {
        let obj = Objective::from_body(body);
        let starts = self.starts(model, s, coalition);
        if coalition.is_empty() {
            let p = StrategyProfile::empty();
            let outcome = if profile_wins(model, &p, &starts, &obj)? {
                Outcome::Holds {
                    witness: Some(Witness { profile: p, memory: 0 }),
                }
            } else {
                Outcome::Fails
            };
            return Ok(Decision::new(outcome, 1));
        }
        let atl = !matches!(obj, Objective::Ltl(_));
        let everyone = coalition.len() == model.player_count();
        match self.memory {
            MemoryMode::Memoryless => self.bounded(model, coalition, &starts, &obj, 1),
            MemoryMode::Bounded(k) => self.bounded(model, coalition, &starts, &obj, k),
            MemoryMode::Finite { cap } => {
                if self.complete && atl {
                    self.bounded(model, coalition, &starts, &obj, 1)
                } else if self.complete && everyone {
                    lasso_route(model, s, body)
                } else {
                    self.deepen(model, coalition, &starts, &obj, self.need_cap(cap)?)
                }
            }
            MemoryMode::PerfectRecall { cap } => {
                if let Some(sat) = fixpoint {
                    let outcome = if sat[s] {
                        Outcome::Holds { witness: None }
                    } else {
                        Outcome::Fails
                    };
                    Ok(Decision::new(outcome, 0))
                } else if everyone {
                    lasso_route(model, s, body)
                } else {
                    self.deepen(model, coalition, &starts, &obj, self.need_cap(cap)?)
                }
            }
        }
    }

    fn uses_fixpoint(&self, coalition: &[Player], body: &Formula) -> bool {
        matches!(self.memory, MemoryMode::PerfectRecall { .. })
            && !coalition.is_empty()
            && !matches!(Objective::from_body(body), Objective::Ltl(_))
    }

    /// One round of the driver: decides `<<coalition>> body` at `states`
    /// under both approximations of earlier unknown labels.
    fn round(
        &self,
        model: &GameModel,
        coalition: &[Player],
        body: &Formula,
        states: &[StateId],
    ) -> Result<Vec<Decision>, CheckError> {
        let pess = polarize(body, true, true);
        let opt = polarize(body, true, false);
        let fix = |b: &Formula| -> Result<Option<Vec<bool>>, CheckError> {
            if self.uses_fixpoint(coalition, b) {
                Ok(Some(fixpoint_objective(model, coalition, &Objective::from_body(b))?))
            } else {
                Ok(None)
            }
        };
        let (fix_pess, fix_opt) = (fix(&pess)?, if pess == opt { None } else { fix(&opt)? });
        let one = |s: StateId| -> Result<Decision, CheckError> {
            let d = self.decide(model, s, coalition, &pess, fix_pess.as_deref())?;
            if d.outcome.holds() || pess == opt {
                return Ok(d);
            }
            let d2 = self.decide(model, s, coalition, &opt, fix_opt.as_deref())?;
            let outcome = match d2.outcome {
                Outcome::Fails => Outcome::Fails,
                Outcome::Unknown { bound } => Outcome::Unknown { bound },
                Outcome::Holds { .. } => match d.outcome {
                    Outcome::Unknown { bound } => Outcome::Unknown { bound },
                    _ => Outcome::Unknown {
                        bound: self.nominal_bound(),
                    },
                },
            };
            Ok(Decision::new(outcome, d.examined + d2.examined))
        };
        states.par_iter().map(|&s| one(s)).collect()
    }
}

/// Rewrites driver labels by polarity: with `pessimistic`, positive
/// occurrences read `@j` and negative ones `@j.u`; otherwise the reverse.
fn polarize(f: &Formula, positive: bool, pessimistic: bool) -> Formula {
    match f {
        Formula::Prop(p) if p.starts_with('@') => {
            let base = p.trim_end_matches(".u");
            if positive == pessimistic {
                Formula::prop(base)
            } else {
                Formula::prop(&format!("{base}.u"))
            }
        }
        Formula::True | Formula::Prop(_) => f.clone(),
        Formula::Not(a) => Formula::not(polarize(a, !positive, pessimistic)),
        Formula::Or(a, b) => Formula::or(polarize(a, positive, pessimistic), polarize(b, positive, pessimistic)),
        Formula::Next(a) => Formula::next(polarize(a, positive, pessimistic)),
        Formula::Until(a, b) => {
            Formula::until(polarize(a, positive, pessimistic), polarize(b, positive, pessimistic))
        }
        Formula::Coalition(ps, a) => Formula::Coalition(ps.clone(), Box::new(polarize(a, positive, pessimistic))),
    }
}

/// Whether every outcome of `profile` from every start satisfies `obj`.
fn profile_wins(
    model: &GameModel,
    profile: &StrategyProfile,
    starts: &[StateId],
    obj: &Objective,
) -> Result<bool, CheckError> {
    let ps = build_product(model, profile, starts)?;
    let ok = match obj {
        Objective::Ltl(f) => check_universal_ltl(&ps, f)?,
        _ => {
            let all = check_universal_objective(&ps, obj)?;
            ps.initial_nodes().iter().map(|&q| all[q]).collect()
        }
    };
    Ok(ok.into_iter().all(|b| b))
}

/// The grand coalition under complete information: `body` is enforceable
/// iff some path from `s` satisfies it, and then a lasso-shaped one does.
/// The witness steps through the lasso with one memory state per position.
fn lasso_route(model: &GameModel, s: StateId, body: &Formula) -> Result<Decision, CheckError> {
    let ps = build_product(model, &StrategyProfile::empty(), &[s])?;
    let aut = ltl_to_buchi(body)?;
    let Some(lasso) = find_lasso_from(&ps, &aut, ps.initial_nodes()) else {
        return Ok(Decision::new(Outcome::Fails, 1));
    };
    let seq: Vec<StateId> = lasso.stem.iter().chain(&lasso.cycle).map(|&q| ps.game_state(q)).collect();
    let len = seq.len();
    let after = |i: usize| if i + 1 < len { i + 1 } else { lasso.stem.len() };
    let moves: Vec<Vec<usize>> = (0..len)
        .map(|i| {
            model
                .successors(seq[i])
                .into_iter()
                .find(|(_, t)| *t == seq[after(i)])
                .map(|(mv, _)| mv.0)
                .expect("consecutive lasso states are connected")
        })
        .collect();
    let members = model
        .players()
        .map(|p| {
            let classes = model.class_count(p);
            let mut next = Vec::with_capacity(len * classes);
            let mut output = Vec::with_capacity(len * classes);
            for i in 0..len {
                let here = model.class_index(p, seq[i]);
                for c in 0..classes {
                    next.push(after(i));
                    output.push(if c == here {
                        moves[i][p.index()]
                    } else {
                        model.class_legal(p, c)[0]
                    });
                }
            }
            Dfst::new(p, classes, 0, next, output)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let profile = StrategyProfile::new(members)?;
    if !profile_wins(model, &profile, &[s], &Objective::Ltl(body.clone()))? {
        return Err(CheckError::WitnessRejected(model.state_name(s).to_string()));
    }
    Ok(Decision::new(
        Outcome::Holds {
            witness: Some(Witness { profile, memory: len }),
        },
        1,
    ))
}

/// `Pre_A(target)`: states where the coalition has a joint action all of
/// whose completions lead into `target`.
fn force(model: &GameModel, coalition: &[Player], target: &[bool]) -> Vec<bool> {
    (0..model.state_count())
        .map(|s| {
            let mut tuples: Vec<Vec<Option<usize>>> = vec![vec![None; model.player_count()]];
            for &a in coalition {
                tuples = tuples
                    .into_iter()
                    .flat_map(|t| {
                        model.legal(s, a).iter().map(move |&x| {
                            let mut t2 = t.clone();
                            t2[a.index()] = Some(x);
                            t2
                        })
                    })
                    .collect();
            }
            tuples.iter().any(|fixed| {
                completions(model, s, fixed)
                    .iter()
                    .all(|mv| target[model.transition(s, mv).expect("validated model is total")])
            })
        })
        .collect()
}

struct Labels<'a>(&'a GameModel);

impl LabelledGraph for Labels<'_> {
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

fn truth(model: &GameModel, f: &Formula) -> Vec<bool> {
    let g = Labels(model);
    (0..model.state_count()).map(|s| eval_prop(&g, s, f)).collect()
}

/// Satisfaction vector of `<<coalition>> obj` for a fixpoint objective
/// under complete information.
pub(crate) fn fixpoint_objective(model: &GameModel, coalition: &[Player], obj: &Objective) -> Result<Vec<bool>, CheckError> {
    let n = model.state_count();
    Ok(match obj {
        Objective::Next(a) => force(model, coalition, &truth(model, a)),
        Objective::Globally(a) => {
            let safe = truth(model, a);
            let mut z = safe.clone();
            loop {
                let pre = force(model, coalition, &z);
                let z2: Vec<bool> = (0..n).map(|s| safe[s] && pre[s]).collect();
                if z2 == z {
                    break z;
                }
                z = z2;
            }
        }
        Objective::Until(a, b) => {
            let (keep, goal) = (truth(model, a), truth(model, b));
            let mut z = goal.clone();
            loop {
                let pre = force(model, coalition, &z);
                let z2: Vec<bool> = (0..n).map(|s| goal[s] || (keep[s] && pre[s])).collect();
                if z2 == z {
                    break z;
                }
                z = z2;
            }
        }
        Objective::Ltl(f) => return Err(CheckError::NotAtl(f.to_string())),
    })
}

/// The states satisfying an ATL formula under complete information, by
/// the one-step force operator and least/greatest fixpoints.
pub fn check_atl_fixpoint_complete(model: &GameModel, f: &Formula) -> Result<BTreeSet<StateId>, CheckError> {
    if !model.is_complete_information() {
        return Err(CheckError::NeedsCompleteInformation);
    }
    check_formula(model, f)?;
    fn sat(model: &GameModel, f: &Formula) -> Result<Vec<bool>, CheckError> {
        Ok(match f {
            Formula::True => vec![true; model.state_count()],
            Formula::Prop(p) => (0..model.state_count()).map(|s| model.has_prop(s, p)).collect(),
            Formula::Not(a) => sat(model, a)?.into_iter().map(|x| !x).collect(),
            Formula::Or(a, b) => sat(model, a)?.into_iter().zip(sat(model, b)?).map(|(x, y)| x || y).collect(),
            Formula::Coalition(ps, body) => {
                let (obj, inner): (Objective, Vec<&Formula>) = match atl_shape(body) {
                    Some(AtlShape::Next(a)) => (Objective::Next(Formula::prop("@1")), vec![a]),
                    Some(AtlShape::Globally(a)) => (Objective::Globally(Formula::prop("@1")), vec![a]),
                    Some(AtlShape::Until(a, b)) => (
                        Objective::Until(Formula::prop("@1"), Formula::prop("@2")),
                        vec![a, b],
                    ),
                    None => return Err(CheckError::NotAtl(f.to_string())),
                };
                let mut extra = vec![Vec::new(); model.state_count()];
                for (i, g) in inner.iter().enumerate() {
                    for (s, x) in sat(model, g)?.into_iter().enumerate() {
                        if x {
                            extra[s].push(format!("@{}", i + 1));
                        }
                    }
                }
                let labelled = model.with_extra_labels(["@1".to_string(), "@2".to_string()], &extra);
                fixpoint_objective(&labelled, ps, &obj)?
            }
            Formula::Next(_) | Formula::Until(..) => return Err(CheckError::NotAtl(f.to_string())),
        })
    }
    Ok(sat(model, f)?
        .into_iter()
        .enumerate()
        .filter(|&(_, x)| x)
        .map(|(s, _)| s)
        .collect())
}

fn check_formula(model: &GameModel, f: &Formula) -> Result<(), CheckError> {
    if let Some(&p) = f.players().iter().find(|&&p| !model.has_player(p)) {
        return Err(CheckError::UnknownPlayer(p));
    }
    if let Some(p) = f.propositions().iter().find(|p| !model.propositions().contains(*p)) {
        return Err(CheckError::UnknownProp(p.clone()));
    }
    Ok(())
}

fn with_pool<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match jobs.and_then(|n| rayon::ThreadPoolBuilder::new().num_threads(n).build().ok()) {
        Some(pool) => pool.install(f),
        None => f(),
    }
}

/// Verdicts at every state, indexed by state.
pub fn evaluate(model: &GameModel, f: &Formula, sem: &SemanticsSpec) -> Result<Vec<Verdict>, CheckError> {
    evaluate_with(model, f, sem, &CheckOptions::default())
}

pub fn evaluate_with(
    model: &GameModel,
    f: &Formula,
    sem: &SemanticsSpec,
    opts: &CheckOptions,
) -> Result<Vec<Verdict>, CheckError> {
    let all: Vec<StateId> = (0..model.state_count()).collect();
    evaluate_at(model, f, sem, opts, &all)
}

/// Verdicts at the query states only. Inner subformulas are still decided
/// wherever later rounds need their labels.
pub fn evaluate_at(
    model: &GameModel,
    f: &Formula,
    sem: &SemanticsSpec,
    opts: &CheckOptions,
    query: &[StateId],
) -> Result<Vec<Verdict>, CheckError> {
    if let Some(&s) = query.iter().find(|&&s| s >= model.state_count()) {
        return Err(CheckError::BadState(s));
    }
    check_formula(model, f)?;
    if !f.is_state_formula() {
        return Err(CheckError::NotStateFormula(f.to_string()));
    }
    let ctx = Ctx::resolve(model, sem, opts)?;
    let base = if ctx.complete {
        model.with_complete_information()
    } else {
        model.clone()
    };
    with_pool(opts.jobs, || drive(&ctx, &base, f, query))
}

fn drive(ctx: &Ctx, base: &GameModel, f: &Formula, query: &[StateId]) -> Result<Vec<Verdict>, CheckError> {
    let n = base.state_count();
    let all: Vec<StateId> = (0..n).collect();
    let mut current = f.clone();
    let mut extra: Vec<Vec<String>> = vec![Vec::new(); n];
    let mut universe: Vec<String> = Vec::new();
    let mut examined = vec![0u64; n];
    let mut witnesses: Vec<Option<Witness>> = vec![None; n];
    let mut bound = ctx.nominal_bound();
    let mut round = 0;
    while let Some(sub) = crate::logic::strategic_subformulas(&current).into_iter().next() {
        round += 1;
        let Formula::Coalition(coalition, body) = &sub else {
            unreachable!("strategic subformulas are quantified")
        };
        let prop = format!("@{round}");
        current = crate::logic::substitute(&current, &sub, &prop)?;
        let nested = {
            let mut hit = false;
            current.visit(&mut |g| {
                if let Formula::Coalition(_, b) = g {
                    hit |= b.propositions().iter().any(|p| p.trim_end_matches(".u") == prop);
                }
            });
            hit
        };
        let states = if nested { &all[..] } else { query };
        let labelled = base.with_extra_labels(universe.iter().cloned(), &extra);
        let decisions = ctx.round(&labelled, coalition, body, states)?;
        universe.push(prop.clone());
        universe.push(format!("{prop}.u"));
        let last = current == Formula::prop(&prop);
        for (&s, d) in states.iter().zip(decisions) {
            examined[s] += d.examined;
            match d.outcome {
                Outcome::Holds { witness } => {
                    extra[s].push(prop.clone());
                    extra[s].push(format!("{prop}.u"));
                    if last {
                        witnesses[s] = witness;
                    }
                }
                Outcome::Unknown { bound: b } => {
                    extra[s].push(format!("{prop}.u"));
                    bound = bound.max(b);
                }
                Outcome::Fails => {}
            }
        }
    }
    let labelled = base.with_extra_labels(universe, &extra);
    Ok(query
        .iter()
        .map(|&s| {
            let outcome = match kleene(&labelled, s, &current) {
                Some(true) => Outcome::Holds {
                    witness: witnesses[s].take(),
                },
                Some(false) => Outcome::Fails,
                None => Outcome::Unknown { bound },
            };
            Verdict {
                state: s,
                outcome,
                profiles_examined: examined[s],
            }
        })
        .collect())
}

/// Three-valued value of a propositional formula over driver labels.
fn kleene(model: &GameModel, s: StateId, f: &Formula) -> Option<bool> {
    match f {
        Formula::True => Some(true),
        Formula::Prop(p) if p.starts_with('@') => {
            if model.has_prop(s, p) {
                Some(true)
            } else if model.has_prop(s, &format!("{p}.u")) {
                None
            } else {
                Some(false)
            }
        }
        Formula::Prop(p) => Some(model.has_prop(s, p)),
        Formula::Not(a) => kleene(model, s, a).map(|x| !x),
        Formula::Or(a, b) => match (kleene(model, s, a), kleene(model, s, b)) {
            (Some(true), _) | (_, Some(true)) => Some(true),
            (Some(false), Some(false)) => Some(false),
            _ => None,
        },
        _ => unreachable!("the driver leaves a propositional formula"),
    }
}

/// Decides `<<coalition>> body` at one state; `body` must be quantifier-free.
pub fn check_quantified(
    model: &GameModel,
    s: StateId,
    coalition: &[Player],
    body: &Formula,
    sem: &SemanticsSpec,
) -> Result<Verdict, CheckError> {
    check_quantified_with(model, s, coalition, body, sem, &CheckOptions::default())
}

pub fn check_quantified_with(
    model: &GameModel,
    s: StateId,
    coalition: &[Player],
    body: &Formula,
    sem: &SemanticsSpec,
    opts: &CheckOptions,
) -> Result<Verdict, CheckError> {
    if body.has_coalition() {
        return Err(CheckError::NestedBody(body.to_string()));
    }
    let f = Formula::coalition(coalition.iter().copied(), body.clone());
    Ok(evaluate_at(model, &f, sem, opts, &[s])?.remove(0))
}

/// Finite-memory semantics with information inferred from the model:
/// `k = 1, .., cap`, conclusive at `k = 1` for fixpoint bodies under
/// complete information.
pub fn check_finite_memory_deepening(
    model: &GameModel,
    s: StateId,
    coalition: &[Player],
    body: &Formula,
    cap: usize,
) -> Result<Verdict, CheckError> {
    check_quantified(model, s, coalition, body, &SemanticsSpec::finite(InfoMode::Auto, Some(cap)))
}
