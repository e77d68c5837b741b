//! Concurrent game models, with or without incomplete information.
//!
//! A [`GameModel`] bundles states, players, actions, the legality map, a
//! transition table defined on legal moves, per-player observation partitions
//! and a proposition labeling. A complete-information model is the special
//! case where every partition is the identity.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

pub type StateId = usize;
pub type ActionId = usize;

/// A player, numbered from 1 as in model files and formulas.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Player(pub usize);

impl Player {
    /// Zero-based index into per-player tables.
    pub fn index(self) -> usize {
        self.0 - 1
    }

    pub fn from_index(index: usize) -> Self {
        Player(index + 1)
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// One action per player, ordered by player index.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Move(pub Vec<ActionId>);

/// An observation set of one player.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObservationClass {
    pub player: Player,
    /// Position of the class in the player's partition.
    pub index: usize,
    /// Stable identifier: the name of the first member state.
    pub id: String,
    pub members: Vec<StateId>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("line {line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid model: {}", join_violations(.0))]
    Invalid(Vec<Violation>),
    #[error("model construction failed: {}", .0.join("; "))]
    Build(Vec<String>),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("unknown player {0}")]
    UnknownPlayer(usize),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

/// A broken structural invariant, as reported by [`GameModel::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    EmptyLegal { state: String, player: Player },
    MissingTransition { state: String, moves: String },
    PartitionGap { player: Player, state: String },
    PartitionOverlap { player: Player, state: String },
    EmptyClass { player: Player, index: usize },
    NonUniform { player: Player, left: String, right: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyLegal { state, player } => {
                write!(f, "empty legal set for player {player} at {state}")
            }
            Violation::MissingTransition { state, moves } => {
                write!(f, "missing transition for legal move {moves} at {state}")
            }
            Violation::PartitionGap { player, state } => {
                write!(f, "player {player}: partition does not cover {state}")
            }
            Violation::PartitionOverlap { player, state } => {
                write!(f, "player {player}: {state} belongs to more than one class")
            }
            Violation::EmptyClass { player, index } => {
                write!(f, "player {player}: observation class {index} is empty")
            }
            Violation::NonUniform {
                player,
                left,
                right,
            } => write!(
                f,
                "player {player}: {left} and {right} are indistinguishable but have different legal actions"
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameModel {
    states: Vec<String>,
    state_index: HashMap<String, StateId>,
    players: usize,
    actions: Vec<String>,
    action_index: HashMap<String, ActionId>,
    /// `legal[s][j]`, sorted by action id.
    legal: Vec<Vec<Vec<ActionId>>>,
    /// `trans[s][move_index]`; `None` only in unvalidated models.
    trans: Vec<Vec<Option<StateId>>>,
    /// `partitions[j]`: classes sorted internally and ordered by first member.
    partitions: Vec<Vec<Vec<StateId>>>,
    /// `class_of[j][s]`, `usize::MAX` when `s` is in no class.
    class_of: Vec<Vec<usize>>,
    labels: Vec<BTreeSet<String>>,
    propositions: BTreeSet<String>,
}

impl GameModel {
    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn player_count(&self) -> usize {
        self.players
    }

    pub fn players(&self) -> impl Iterator<Item = Player> {
        (0..self.players).map(Player::from_index)
    }

    pub fn action_count(&self) -> usize {
        self.actions.len()
    }

    pub fn state_name(&self, s: StateId) -> &str {
        &self.states[s]
    }

    pub fn state_names(&self) -> &[String] {
        &self.states
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.state_index.get(name).copied()
    }

    pub fn action_name(&self, a: ActionId) -> &str {
        &self.actions[a]
    }

    pub fn action_names(&self) -> &[String] {
        &self.actions
    }

    pub fn action_id(&self, name: &str) -> Option<ActionId> {
        self.action_index.get(name).copied()
    }

    pub fn legal(&self, s: StateId, player: Player) -> &[ActionId] {
        &self.legal[s][player.index()]
    }

    pub fn label(&self, s: StateId) -> &BTreeSet<String> {
        &self.labels[s]
    }

    pub fn has_prop(&self, s: StateId, prop: &str) -> bool {
        self.labels[s].contains(prop)
    }

    /// The proposition universe: every proposition labeling some state, plus
    /// any registered with [`GameModel::with_extra_labels`].
    pub fn propositions(&self) -> &BTreeSet<String> {
        &self.propositions
    }

    pub fn has_player(&self, player: Player) -> bool {
        player.0 >= 1 && player.0 <= self.players
    }

    /// Number of legal moves at `s`.
    pub fn move_count(&self, s: StateId) -> usize {
        self.legal[s].iter().map(|l| l.len()).product()
    }

    /// Mixed-radix index of a move, last player fastest. `None` if some
    /// component is not legal.
    pub fn move_index(&self, s: StateId, actions: &[ActionId]) -> Option<usize> {
        if actions.len() != self.players {
            return None;
        }
        let mut idx = 0;
        for (j, a) in actions.iter().enumerate() {
            let legal = &self.legal[s][j];
            let pos = legal.binary_search(a).ok()?;
            idx = idx * legal.len() + pos;
        }
        Some(idx)
    }

    fn move_at(&self, s: StateId, mut idx: usize) -> Move {
        let mut out = vec![0; self.players];
        for j in (0..self.players).rev() {
            let legal = &self.legal[s][j];
            out[j] = legal[idx % legal.len()];
            idx /= legal.len();
        }
        Move(out)
    }

    /// Successor of `s` under a joint action, if the action tuple is legal.
    pub fn transition(&self, s: StateId, actions: &[ActionId]) -> Option<StateId> {
        let idx = self.move_index(s, actions)?;
        self.trans[s][idx]
    }

    /// All `(move, successor)` pairs at `s`, in move order.
    pub fn successors(&self, s: StateId) -> Vec<(Move, StateId)> {
        (0..self.move_count(s))
            .filter_map(|i| self.trans[s][i].map(|t| (self.move_at(s, i), t)))
            .collect()
    }

    /// Distinct successor states of `s`, ascending.
    pub fn successor_states(&self, s: StateId) -> Vec<StateId> {
        let set: BTreeSet<StateId> = self.trans[s].iter().flatten().copied().collect();
        set.into_iter().collect()
    }

    pub fn format_move(&self, m: &Move) -> String {
        let parts: Vec<&str> = m.0.iter().map(|&a| self.action_name(a)).collect();
        format!("({})", parts.join(","))
    }

    /// The observation sets of a player, in canonical order.
    pub fn partition(&self, player: Player) -> &[Vec<StateId>] {
        &self.partitions[player.index()]
    }

    pub fn class_count(&self, player: Player) -> usize {
        self.partitions[player.index()].len()
    }

    /// Index of the class containing `s` for `player`.
    pub fn class_index(&self, player: Player, s: StateId) -> usize {
        self.class_of[player.index()][s]
    }

    /// Identifier of a class: the name of its first member.
    pub fn class_id(&self, player: Player, class: usize) -> &str {
        let members = &self.partitions[player.index()][class];
        members.first().map_or("", |&s| self.state_name(s))
    }

    pub fn class_by_id(&self, player: Player, id: &str) -> Option<usize> {
        let s = self.state_id(id)?;
        let c = self.class_of[player.index()][s];
        (c != usize::MAX && self.partitions[player.index()][c][0] == s).then_some(c)
    }

    pub fn observation_class(
        &self,
        player: Player,
        state: &str,
    ) -> Result<ObservationClass, ModelError> {
        if !self.has_player(player) {
            return Err(ModelError::UnknownPlayer(player.0));
        }
        let s = self
            .state_id(state)
            .ok_or_else(|| ModelError::UnknownState(state.to_string()))?;
        let index = self.class_of[player.index()][s];
        if index == usize::MAX {
            return Err(ModelError::Invalid(vec![Violation::PartitionGap {
                player,
                state: state.to_string(),
            }]));
        }
        let members = self.partitions[player.index()][index].clone();
        Ok(ObservationClass {
            player,
            index,
            id: self.class_id(player, index).to_string(),
            members,
        })
    }

    /// Legal actions of `player` in an observation class.
    pub fn class_legal(&self, player: Player, class: usize) -> &[ActionId] {
        let s = self.partitions[player.index()][class][0];
        self.legal(s, player)
    }

    pub fn is_identity_partition(&self, player: Player) -> bool {
        self.partitions[player.index()].iter().all(|c| c.len() == 1)
    }

    pub fn is_complete_information(&self) -> bool {
        self.players().all(|p| self.is_identity_partition(p))
    }

    /// The same game with every partition replaced by the identity.
    pub fn with_complete_information(&self) -> GameModel {
        let mut m = self.clone();
        let identity: Vec<Vec<StateId>> = (0..self.states.len()).map(|s| vec![s]).collect();
        m.partitions = vec![identity; self.players];
        m.class_of = compute_class_of(&m.partitions, self.states.len());
        m
    }

    /// A copy with additional propositions. `extra[s]` is added to the label
    /// of `s`; every name in `universe` joins the proposition universe.
    pub fn with_extra_labels(
        &self,
        universe: impl IntoIterator<Item = String>,
        extra: &[Vec<String>],
    ) -> GameModel {
        let mut m = self.clone();
        m.propositions.extend(universe);
        for (s, props) in extra.iter().enumerate() {
            for p in props {
                m.labels[s].insert(p.clone());
                m.propositions.insert(p.clone());
            }
        }
        m
    }

    /// Every broken invariant; empty iff the model is a valid (i)CGM.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for s in 0..self.states.len() {
            for j in 0..self.players {
                if self.legal[s][j].is_empty() {
                    out.push(Violation::EmptyLegal {
                        state: self.states[s].clone(),
                        player: Player::from_index(j),
                    });
                }
            }
            if self.legal[s].iter().all(|l| !l.is_empty()) {
                for i in 0..self.move_count(s) {
                    if self.trans[s][i].is_none() {
                        out.push(Violation::MissingTransition {
                            state: self.states[s].clone(),
                            moves: self.format_move(&self.move_at(s, i)),
                        });
                    }
                }
            }
        }
        for j in 0..self.players {
            let player = Player::from_index(j);
            let mut seen = vec![0usize; self.states.len()];
            for (ci, class) in self.partitions[j].iter().enumerate() {
                if class.is_empty() {
                    out.push(Violation::EmptyClass { player, index: ci });
                }
                for &s in class {
                    seen[s] += 1;
                }
            }
            for (s, &count) in seen.iter().enumerate() {
                let state = self.states[s].clone();
                if count == 0 {
                    out.push(Violation::PartitionGap { player, state });
                } else if count > 1 {
                    out.push(Violation::PartitionOverlap { player, state });
                }
            }
            for class in &self.partitions[j] {
                if let Some((&first, rest)) = class.split_first() {
                    for &other in rest {
                        if self.legal[first][j] != self.legal[other][j] {
                            out.push(Violation::NonUniform {
                                player,
                                left: self.states[first].clone(),
                                right: self.states[other].clone(),
                            });
                        }
                    }
                }
            }
        }
        out
    }

    /// Canonical text form; see [`crate::parse_model`] for the grammar.
    pub fn serialize(&self) -> String {
        let mut out = String::from("cgm\n");
        out.push_str(&format!("players {}\n", self.players));
        out.push_str(&format!("actions {}\n", self.actions.join(" ")));
        for (s, name) in self.states.iter().enumerate() {
            if self.labels[s].is_empty() {
                out.push_str(&format!("state {name}\n"));
            } else {
                let props: Vec<&str> = self.labels[s].iter().map(String::as_str).collect();
                out.push_str(&format!("state {name} props {}\n", props.join(" ")));
            }
        }
        for (s, name) in self.states.iter().enumerate() {
            for j in 0..self.players {
                let acts: Vec<&str> = self.legal[s][j].iter().map(|&a| self.action_name(a)).collect();
                out.push_str(&format!("legal {name} {} {}\n", j + 1, acts.join(" ")));
            }
        }
        for s in 0..self.states.len() {
            for (m, t) in self.successors(s) {
                out.push_str(&format!(
                    "trans {} {} {}\n",
                    self.states[s],
                    self.format_move(&m),
                    self.states[t]
                ));
            }
        }
        for j in 0..self.players {
            let player = Player::from_index(j);
            if self.is_identity_partition(player) && self.partitions[j].len() == self.states.len() {
                continue;
            }
            let classes: Vec<String> = self.partitions[j]
                .iter()
                .map(|c| {
                    let names: Vec<&str> = c.iter().map(|&s| self.state_name(s)).collect();
                    format!("{{ {} }}", names.join(" "))
                })
                .collect();
            out.push_str(&format!("obs {} {}\n", j + 1, classes.join(" ")));
        }
        out
    }
}

fn compute_class_of(partitions: &[Vec<Vec<StateId>>], n: usize) -> Vec<Vec<usize>> {
    partitions
        .iter()
        .map(|classes| {
            let mut of = vec![usize::MAX; n];
            for (ci, class) in classes.iter().enumerate() {
                for &s in class {
                    if of[s] == usize::MAX {
                        of[s] = ci;
                    }
                }
            }
            of
        })
        .collect()
}

fn normalize_partition(mut classes: Vec<Vec<StateId>>) -> Vec<Vec<StateId>> {
    for c in classes.iter_mut() {
        c.sort_unstable();
    }
    classes.sort_by_key(|c| c.first().copied().unwrap_or(usize::MAX));
    classes
}

/// Incremental construction of a [`GameModel`] by name.
///
/// Name-resolution problems are collected and reported by [`build`](Self::build).
#[derive(Clone, Debug, Default)]
pub struct GameModelBuilder {
    players: usize,
    states: Vec<String>,
    labels: Vec<BTreeSet<String>>,
    actions: Vec<String>,
    legal: BTreeMap<(StateId, usize), Vec<ActionId>>,
    trans: BTreeMap<(StateId, Vec<ActionId>), StateId>,
    obs: BTreeMap<usize, Vec<Vec<StateId>>>,
    errors: Vec<String>,
}

impl GameModelBuilder {
    pub fn new(players: usize) -> Self {
        GameModelBuilder {
            players,
            ..Default::default()
        }
    }

    pub fn action(&mut self, name: &str) -> &mut Self {
        if self.actions.iter().any(|a| a == name) {
            self.errors.push(format!("duplicate action {name}"));
        } else {
            self.actions.push(name.to_string());
        }
        self
    }

    pub fn actions<'a>(&mut self, names: impl IntoIterator<Item = &'a str>) -> &mut Self {
        for n in names {
            self.action(n);
        }
        self
    }

    pub fn state<'a>(&mut self, name: &str, props: impl IntoIterator<Item = &'a str>) -> &mut Self {
        if self.states.iter().any(|s| s == name) {
            self.errors.push(format!("duplicate state {name}"));
        } else {
            self.states.push(name.to_string());
            self.labels.push(props.into_iter().map(str::to_string).collect());
        }
        self
    }

    pub fn has_state(&self, name: &str) -> bool {
        self.states.iter().any(|s| s == name)
    }

    fn state_ref(&mut self, name: &str) -> Option<StateId> {
        let r = self.states.iter().position(|s| s == name);
        if r.is_none() {
            self.errors.push(format!("undeclared state {name}"));
        }
        r
    }

    fn action_ref(&mut self, name: &str) -> Option<ActionId> {
        let r = self.actions.iter().position(|a| a == name);
        if r.is_none() {
            self.errors.push(format!("undeclared action {name}"));
        }
        r
    }

    fn player_ref(&mut self, player: usize) -> Option<usize> {
        if player == 0 || player > self.players {
            self.errors.push(format!("undeclared player {player}"));
            None
        } else {
            Some(player - 1)
        }
    }

    /// Declares the legal actions of a player (1-based) at a state.
    pub fn legal<'a>(
        &mut self,
        state: &str,
        player: usize,
        actions: impl IntoIterator<Item = &'a str>,
    ) -> &mut Self {
        let (Some(s), Some(j)) = (self.state_ref(state), self.player_ref(player)) else {
            return self;
        };
        let mut ids = Vec::new();
        for a in actions {
            if let Some(id) = self.action_ref(a) {
                ids.push(id);
            }
        }
        ids.sort_unstable();
        ids.dedup();
        if self.legal.insert((s, j), ids).is_some() {
            self.errors
                .push(format!("legal actions of player {player} at {state} declared twice"));
        }
        self
    }

    pub fn trans(&mut self, state: &str, actions: &[&str], target: &str) -> &mut Self {
        let (Some(s), Some(t)) = (self.state_ref(state), self.state_ref(target)) else {
            return self;
        };
        if actions.len() != self.players {
            self.errors.push(format!(
                "move at {state} has {} components, expected {}",
                actions.len(),
                self.players
            ));
            return self;
        }
        let mut ids = Vec::new();
        for (j, a) in actions.iter().enumerate() {
            let Some(id) = self.action_ref(a) else {
                return self;
            };
            match self.legal.get(&(s, j)) {
                Some(l) if l.contains(&id) => {}
                _ => {
                    self.errors
                        .push(format!("action {a} not legal for player {} at {state}", j + 1));
                    return self;
                }
            }
            ids.push(id);
        }
        if self.trans.insert((s, ids), t).is_some() {
            self.errors.push(format!(
                "duplicate transition for ({}) at {state}",
                actions.join(",")
            ));
        }
        self
    }

    /// Declares the observation partition of a player (1-based).
    pub fn obs(&mut self, player: usize, classes: &[Vec<&str>]) -> &mut Self {
        let Some(j) = self.player_ref(player) else {
            return self;
        };
        let mut resolved = Vec::new();
        for class in classes {
            let mut ids = Vec::new();
            for name in class {
                if let Some(s) = self.state_ref(name) {
                    ids.push(s);
                }
            }
            resolved.push(ids);
        }
        if self.obs.insert(j, resolved).is_some() {
            self.errors
                .push(format!("observation partition of player {player} declared twice"));
        }
        self
    }

    /// Builds without checking invariants (the result may fail [`GameModel::validate`]).
    pub fn build_unchecked(&self) -> Result<GameModel, ModelError> {
        if !self.errors.is_empty() {
            return Err(ModelError::Build(self.errors.clone()));
        }
        if self.players == 0 {
            return Err(ModelError::Build(vec!["a model needs at least one player".into()]));
        }
        if self.states.is_empty() {
            return Err(ModelError::Build(vec!["a model needs at least one state".into()]));
        }
        let n = self.states.len();
        let mut legal = vec![vec![Vec::new(); self.players]; n];
        for (&(s, j), acts) in &self.legal {
            legal[s][j] = acts.clone();
        }
        let mut model = GameModel {
            state_index: self
                .states
                .iter()
                .enumerate()
                .map(|(i, s)| (s.clone(), i))
                .collect(),
            states: self.states.clone(),
            players: self.players,
            action_index: self
                .actions
                .iter()
                .enumerate()
                .map(|(i, a)| (a.clone(), i))
                .collect(),
            actions: self.actions.clone(),
            trans: Vec::new(),
            legal,
            partitions: Vec::new(),
            class_of: Vec::new(),
            propositions: self.labels.iter().flatten().cloned().collect(),
            labels: self.labels.clone(),
        };
        model.trans = (0..n).map(|s| vec![None; model.move_count(s)]).collect();
        for ((s, acts), &t) in &self.trans {
            let idx = model
                .move_index(*s, acts)
                .expect("builder only records legal moves");
            model.trans[*s][idx] = Some(t);
        }
        model.partitions = (0..self.players)
            .map(|j| match self.obs.get(&j) {
                Some(classes) => normalize_partition(classes.clone()),
                None => (0..n).map(|s| vec![s]).collect(),
            })
            .collect();
        model.class_of = compute_class_of(&model.partitions, n);
        Ok(model)
    }

    pub fn build(&self) -> Result<GameModel, ModelError> {
        let model = self.build_unchecked()?;
        let violations = model.validate();
        if violations.is_empty() {
            Ok(model)
        } else {
            Err(ModelError::Invalid(violations))
        }
    }
}

/// Parses the line-oriented model format.
///
/// ```text
/// cgm
/// players <n>
/// actions <id>+
/// state <id> [props <prop>+]
/// legal <state> <player> <action>+
/// trans <state> (<a1>,...,<an>) <state>
/// obs <player> { <state>+ } ... { <state>+ }
/// ```
///
/// `#` starts a comment. Players without an `obs` line observe states
/// exactly. Declarations may appear in any order after the header.
pub fn parse_model(text: &str) -> Result<GameModel, ModelError> {
    crate::model_parse::parse(text)
}

pub fn serialize_model(model: &GameModel) -> String {
    model.serialize()
}

pub fn validate(model: &GameModel) -> Vec<Violation> {
    model.validate()
}

/// Resolves `state` and returns its `(move, successor)` pairs.
pub fn successors(model: &GameModel, state: &str) -> Result<Vec<(Move, StateId)>, ModelError> {
    let s = model
        .state_id(state)
        .ok_or_else(|| ModelError::UnknownState(state.to_string()))?;
    Ok(model.successors(s))
}

pub fn observation_class(
    model: &GameModel,
    player: Player,
    state: &str,
) -> Result<ObservationClass, ModelError> {
    model.observation_class(player, state)
}

pub(crate) fn is_identifier(s: &str) -> bool {
    !s.is_empty()
        && s.chars()
            .all(|c| c.is_ascii() && !c.is_ascii_whitespace() && !"(),#{}".contains(c) && !c.is_ascii_control())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_state() -> GameModel {
        let mut b = GameModelBuilder::new(1);
        b.action("a").state("s", []).legal("s", 1, ["a"]).trans("s", &["a"], "s");
        b.build().unwrap()
    }

    #[test]
    fn minimal_model_is_valid() {
        let m = one_state();
        assert!(m.validate().is_empty());
        assert_eq!(m.successors(0).len(), 1);
        assert!(m.is_complete_information());
    }

    #[test]
    fn illegal_transition_is_rejected_by_builder() {
        let mut b = GameModelBuilder::new(1);
        b.actions(["a", "b"]).state("s", []).legal("s", 1, ["a"]).trans("s", &["b"], "s");
        let err = b.build().unwrap_err();
        assert!(err.to_string().contains("action b not legal for player 1 at s"));
    }

    #[test]
    fn partition_gap_is_reported() {
        let mut b = GameModelBuilder::new(1);
        b.action("a");
        for s in ["s0", "s1", "s2"] {
            b.state(s, []).legal(s, 1, ["a"]).trans(s, &["a"], s);
        }
        b.obs(1, &[vec!["s0", "s1"]]);
        let m = b.build_unchecked().unwrap();
        let v = m.validate();
        assert_eq!(v.len(), 1);
        assert!(v[0].to_string().contains("partition does not cover s2"));
    }

    #[test]
    fn nonuniform_class_is_reported() {
        let mut b = GameModelBuilder::new(1);
        b.actions(["w", "g"]);
        b.state("s0", []).legal("s0", 1, ["w", "g"]);
        b.state("s1", []).legal("s1", 1, ["w"]);
        b.trans("s0", &["w"], "s0").trans("s0", &["g"], "s1").trans("s1", &["w"], "s1");
        b.obs(1, &[vec!["s0", "s1"]]);
        let v = b.build_unchecked().unwrap().validate();
        assert_eq!(v.len(), 1);
        assert!(matches!(v[0], Violation::NonUniform { .. }));
    }

    #[test]
    fn missing_transition_is_reported() {
        let mut b = GameModelBuilder::new(1);
        b.actions(["a", "b"]).state("s", []).legal("s", 1, ["a", "b"]).trans("s", &["a"], "s");
        let v = b.build_unchecked().unwrap().validate();
        assert_eq!(
            v,
            vec![Violation::MissingTransition {
                state: "s".into(),
                moves: "(b)".into()
            }]
        );
    }

    #[test]
    fn unknown_state_and_player() {
        let m = one_state();
        assert!(matches!(
            m.observation_class(Player(1), "nope"),
            Err(ModelError::UnknownState(_))
        ));
        assert!(matches!(
            m.observation_class(Player(2), "s"),
            Err(ModelError::UnknownPlayer(2))
        ));
        assert!(successors(&m, "t").is_err());
    }

    #[test]
    fn move_index_roundtrip() {
        let mut b = GameModelBuilder::new(2);
        b.actions(["a", "b", "c"]).state("s", []);
        b.legal("s", 1, ["a", "b"]).legal("s", 2, ["a", "b", "c"]);
        for x in ["a", "b"] {
            for y in ["a", "b", "c"] {
                b.trans("s", &[x, y], "s");
            }
        }
        let m = b.build().unwrap();
        for i in 0..m.move_count(0) {
            let mv = m.move_at(0, i);
            assert_eq!(m.move_index(0, &mv.0), Some(i));
        }
        assert_eq!(m.successors(0).len(), 6);
    }
}
