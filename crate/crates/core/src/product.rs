//! The transition system induced by fixing a coalition's strategy profile.
//!
//! Nodes are pairs of a game state and the tuple of the members' memory
//! states. From `(s, m)` every member plays `G_j(m_j, [s]_j)` and moves its
//! memory to `T_j(m_j, [s]_j)`; the opponents' choices are absorbed into the
//! edge relation. Paths from the initial node of a start state are exactly
//! the outcomes of the profile from that state.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use thiserror::Error;

use crate::model::{ActionId, GameModel, Player, StateId};
use crate::strategy::{apply_strategy, StrategyError, StrategyProfile};
use crate::temporal::LabelledGraph;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProductError {
    #[error(transparent)]
    Strategy(#[from] StrategyError),
    #[error("no start states")]
    NoStarts,
    #[error("start state {0} out of range")]
    BadStart(StateId),
}

#[derive(Clone, Debug)]
pub struct ProductSystem {
    coalition: Vec<Player>,
    nodes: Vec<(StateId, Vec<usize>)>,
    succ: Vec<Vec<usize>>,
    initial: Vec<usize>,
    starts: Vec<StateId>,
    labels: Vec<BTreeSet<String>>,
    universe: BTreeSet<String>,
    state_names: Vec<String>,
}

/// All action tuples of the players outside the coalition at `s`, as full
/// moves with the coalition's entries already filled in.
pub(crate) fn completions(model: &GameModel, s: StateId, fixed: &[Option<ActionId>]) -> Vec<Vec<ActionId>> {
    let mut out = vec![Vec::with_capacity(fixed.len())];
    for (j, f) in fixed.iter().enumerate() {
        match f {
            Some(a) => out.iter_mut().for_each(|m| m.push(*a)),
            None => {
                let legal = model.legal(s, Player::from_index(j));
                out = out
                    .into_iter()
                    .flat_map(|m| {
                        legal.iter().map(move |&a| {
                            let mut m2 = m.clone();
                            m2.push(a);
                            m2
                        })
                    })
                    .collect();
            }
        }
    }
    out
}

/// Builds the reachable part of the product from `(s, m0)` for each start.
pub fn build_product(
    model: &GameModel,
    profile: &StrategyProfile,
    starts: &[StateId],
) -> Result<ProductSystem, ProductError> {
    if starts.is_empty() {
        return Err(ProductError::NoStarts);
    }
    if let Some(&s) = starts.iter().find(|&&s| s >= model.state_count()) {
        return Err(ProductError::BadStart(s));
    }
    profile.check_against(model)?;
    let members = profile.members();
    let mut nodes: Vec<(StateId, Vec<usize>)> = Vec::new();
    let mut index: HashMap<(StateId, Vec<usize>), usize> = HashMap::new();
    let mut succ: Vec<Vec<usize>> = Vec::new();
    let mut intern = |key: (StateId, Vec<usize>), nodes: &mut Vec<_>, succ: &mut Vec<Vec<usize>>| {
        *index.entry(key.clone()).or_insert_with(|| {
            nodes.push(key);
            succ.push(Vec::new());
            nodes.len() - 1
        })
    };
    let m0: Vec<usize> = members.iter().map(|d| d.initial()).collect();
    let initial: Vec<usize> = starts
        .iter()
        .map(|&s| intern((s, m0.clone()), &mut nodes, &mut succ))
        .collect();
    let mut done = 0;
    while done < nodes.len() {
        let (s, mem) = nodes[done].clone();
        let mut fixed = vec![None; model.player_count()];
        let mut next_mem = Vec::with_capacity(members.len());
        for (d, &m) in members.iter().zip(&mem) {
            let c = model.class_index(d.player(), s);
            fixed[d.player().index()] = Some(d.output(m, c));
            next_mem.push(d.next_memory(m, c));
        }
        let mut targets: Vec<usize> = completions(model, s, &fixed)
            .iter()
            .map(|mv| {
                let t = model.transition(s, mv).expect("validated model is total");
                intern((t, next_mem.clone()), &mut nodes, &mut succ)
            })
            .collect();
        targets.sort_unstable();
        targets.dedup();
        succ[done] = targets;
        done += 1;
    }
    Ok(ProductSystem {
        coalition: profile.coalition(),
        nodes,
        succ,
        initial,
        starts: starts.to_vec(),
        labels: (0..model.state_count()).map(|s| model.label(s).clone()).collect(),
        universe: model.propositions().clone(),
        state_names: model.state_names().to_vec(),
    })
}

impl ProductSystem {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn coalition(&self) -> &[Player] {
        &self.coalition
    }

    pub fn game_state(&self, q: usize) -> StateId {
        self.nodes[q].0
    }

    pub fn memory(&self, q: usize) -> &[usize] {
        &self.nodes[q].1
    }

    /// The start states, parallel to [`LabelledGraph::initial_nodes`].
    pub fn starts(&self) -> &[StateId] {
        &self.starts
    }

    /// The initial node of a start state.
    pub fn initial_of(&self, start: StateId) -> Option<usize> {
        self.starts
            .iter()
            .position(|&s| s == start)
            .map(|i| self.initial[i])
    }

    pub fn label(&self, q: usize) -> &BTreeSet<String> {
        &self.labels[self.nodes[q].0]
    }

    pub fn state_name(&self, q: usize) -> &str {
        &self.state_names[self.nodes[q].0]
    }

    /// Line-oriented dump: `pstate <game-state> <m1,...,mr>` per node in id
    /// order (`-` for an empty tuple), then `pedge <id> -> <id>` per edge.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (s, mem) in &self.nodes {
            let tuple = if mem.is_empty() {
                "-".to_string()
            } else {
                mem.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(",")
            };
            let _ = writeln!(out, "pstate {} {}", self.state_names[*s], tuple);
        }
        for (q, ts) in self.succ.iter().enumerate() {
            for t in ts {
                let _ = writeln!(out, "pedge {q} -> {t}");
            }
        }
        out
    }
}

impl LabelledGraph for ProductSystem {
    fn node_count(&self) -> usize {
        self.nodes.len()
    }

    fn initial_nodes(&self) -> &[usize] {
        &self.initial
    }

    fn successors(&self, q: usize) -> &[usize] {
        &self.succ[q]
    }

    fn holds(&self, q: usize, prop: &str) -> bool {
        self.labels[self.nodes[q].0].contains(prop)
    }

    fn knows(&self, prop: &str) -> bool {
        self.universe.contains(prop)
    }

    fn node_name(&self, q: usize) -> String {
        self.state_name(q).to_string()
    }
}

/// Compares, for each start, the game-state projections of product paths
/// with `depth` states against outcome prefixes obtained by simulating the
/// profile directly on observation histories against every opponent choice.
pub fn outcome_correspondence_check(
    model: &GameModel,
    profile: &StrategyProfile,
    product: &ProductSystem,
    depth: usize,
) -> bool {
    if depth == 0 {
        return true;
    }
    for (&start, &q0) in product.starts.iter().zip(&product.initial) {
        // Product side: extend (projection, node) pairs.
        let mut layer: BTreeSet<(Vec<StateId>, usize)> = BTreeSet::new();
        layer.insert((vec![product.game_state(q0)], q0));
        for _ in 1..depth {
            let mut next = BTreeSet::new();
            for (path, q) in &layer {
                for &t in product.successors(*q) {
                    let mut p = path.clone();
                    p.push(product.game_state(t));
                    next.insert((p, t));
                }
            }
            layer = next;
        }
        let from_product: BTreeSet<Vec<StateId>> = layer.into_iter().map(|(p, _)| p).collect();

        // Direct simulation of the strategies on histories.
        let mut histories: BTreeSet<Vec<StateId>> = BTreeSet::new();
        histories.insert(vec![start]);
        for _ in 1..depth {
            let mut next = BTreeSet::new();
            for h in &histories {
                let s = *h.last().expect("non-empty history");
                let mut fixed = vec![None; model.player_count()];
                for d in profile.members() {
                    let obs: Vec<usize> = h.iter().map(|&x| model.class_index(d.player(), x)).collect();
                    match apply_strategy(d, &obs) {
                        Ok(a) => fixed[d.player().index()] = Some(a),
                        Err(_) => return false,
                    }
                }
                for mv in completions(model, s, &fixed) {
                    let Some(t) = model.transition(s, &mv) else {
                        return false;
                    };
                    let mut h2 = h.clone();
                    h2.push(t);
                    next.insert(h2);
                }
            }
            histories = next;
        }
        if histories != from_product {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::strategy::{enumerate_profiles, Dfst};

    #[test]
    fn empty_profile_on_fig1_is_the_game_graph() {
        let m = fixtures::fig1_model();
        let s0 = m.state_id("s0").unwrap();
        let s1 = m.state_id("s1").unwrap();
        let ps = build_product(&m, &StrategyProfile::empty(), &[s0]).unwrap();
        assert_eq!(ps.len(), 2);
        let q0 = ps.initial_of(s0).unwrap();
        let targets: Vec<StateId> = ps.successors(q0).iter().map(|&q| ps.game_state(q)).collect();
        assert_eq!(targets, vec![s0, s1]);
        assert_eq!(ps.dump(), "pstate s0 -\npstate s1 -\npedge 0 -> 0\npedge 0 -> 1\npedge 1 -> 1\n");
        for depth in 1..=3 {
            assert!(outcome_correspondence_check(&m, &StrategyProfile::empty(), &ps, depth));
        }
    }

    #[test]
    fn fig2_winning_strategy_has_a_single_outcome() {
        let m = fixtures::fig2_model();
        let p = Player(1);
        let (w, g) = (m.action_id("w").unwrap(), m.action_id("g").unwrap());
        let classes = m.class_count(p);
        let next = vec![1; 2 * classes];
        let mut output = vec![w; classes];
        output.extend(vec![g; classes]);
        let d = Dfst::new(p, classes, 0, next, output).unwrap();
        let prof = StrategyProfile::new(vec![d]).unwrap();
        let s0 = m.state_id("s0").unwrap();
        let ps = build_product(&m, &prof, &[s0]).unwrap();
        assert_eq!(
            ps.dump(),
            "pstate s0 0\npstate s0 1\npstate s1 1\npstate s2 1\n\
             pedge 0 -> 1\npedge 1 -> 2\npedge 2 -> 3\npedge 3 -> 3\n"
        );
        assert!(outcome_correspondence_check(&m, &prof, &ps, 4));
    }

    #[test]
    fn fig3_always_g_goes_to_lose() {
        let m = fixtures::fig3_family(1).unwrap();
        let p = Player(1);
        let g = m.action_id("g").unwrap();
        let d = Dfst::memoryless(p, vec![g; m.class_count(p)]);
        let prof = StrategyProfile::new(vec![d]).unwrap();
        let s0 = m.state_id("s0").unwrap();
        let ps = build_product(&m, &prof, &[s0]).unwrap();
        let q0 = ps.initial_of(s0).unwrap();
        let t: Vec<&str> = ps.successors(q0).iter().map(|&q| ps.state_name(q)).collect();
        assert_eq!(t, vec!["s_lose"]);
    }

    #[test]
    fn correspondence_on_enumerated_profiles() {
        let m = fixtures::fig1_model();
        for coalition in [vec![Player(1)], vec![Player(2)], vec![Player(1), Player(2)]] {
            for prof in enumerate_profiles(&m, &coalition, 2).unwrap().iter().take(50) {
                let ps = build_product(&m, &prof, &[0, 1]).unwrap();
                assert!(outcome_correspondence_check(&m, &prof, &ps, ps.len() + 1));
                // The coalition's choice at a node is unique: successors vary
                // only through the opponent.
                for q in 0..ps.len() {
                    assert!(!ps.successors(q).is_empty());
                }
            }
        }
    }

    #[test]
    fn errors() {
        let m = fixtures::fig1_model();
        assert_eq!(
            build_product(&m, &StrategyProfile::empty(), &[]).unwrap_err(),
            ProductError::NoStarts
        );
        let bad = Dfst::memoryless(Player(1), vec![0]);
        let prof = StrategyProfile::new(vec![bad]).unwrap();
        assert!(matches!(
            build_product(&m, &prof, &[0]),
            Err(ProductError::Strategy(_))
        ));
    }
}
