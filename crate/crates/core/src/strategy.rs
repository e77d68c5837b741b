//! Finite-memory strategies as deterministic finite-state transducers.
//!
//! A [`Dfst`] reads the owner's observation classes and outputs actions. With
//! memory transition `T` and output `G`, the strategy plays
//! `G(T*(m0, h[..n-1]), h[n-1])` after the observation history `h`, where
//! `T*` folds `T` over the history and `T*(m, []) = m`.

use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write as _;

use thiserror::Error;

use crate::model::{ActionId, GameModel, Player};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StrategyError {
    #[error("observation class {class} is not an input of the strategy of player {player} ({classes} classes)")]
    BadClass {
        player: Player,
        class: usize,
        classes: usize,
    },
    #[error("strategy of player {player}: {message}")]
    Malformed { player: Player, message: String },
    #[error("empty observation history")]
    EmptyHistory,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("profile space has {0} profiles, too many to enumerate")]
    TooLarge(u128),
}

/// A deterministic finite-state transducer strategy.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dfst {
    player: Player,
    classes: usize,
    initial: usize,
    /// `next[m * classes + c]`
    next: Vec<usize>,
    /// `output[m * classes + c]`
    output: Vec<ActionId>,
}

impl Dfst {
    /// Builds a transducer from row-major tables indexed by `m * classes + c`.
    pub fn new(
        player: Player,
        classes: usize,
        initial: usize,
        next: Vec<usize>,
        output: Vec<ActionId>,
    ) -> Result<Dfst, StrategyError> {
        let bad = |message: String| StrategyError::Malformed { player, message };
        if classes == 0 {
            return Err(bad("no input classes".into()));
        }
        if next.is_empty() || !next.len().is_multiple_of(classes) || next.len() != output.len() {
            return Err(bad("tables are not total over memory x classes".into()));
        }
        let size = next.len() / classes;
        if initial >= size {
            return Err(bad(format!("initial memory state m{initial} out of range")));
        }
        if let Some(m) = next.iter().find(|&&m| m >= size) {
            return Err(bad(format!("memory state m{m} out of range")));
        }
        Ok(Dfst {
            player,
            classes,
            initial,
            next,
            output,
        })
    }

    /// A one-state strategy playing `outputs[c]` on class `c`.
    pub fn memoryless(player: Player, outputs: Vec<ActionId>) -> Dfst {
        let classes = outputs.len();
        Dfst {
            player,
            classes,
            initial: 0,
            next: vec![0; classes],
            output: outputs,
        }
    }

    pub fn player(&self) -> Player {
        self.player
    }

    /// Number of memory states.
    pub fn size(&self) -> usize {
        self.next.len() / self.classes
    }

    pub fn class_count(&self) -> usize {
        self.classes
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn next_memory(&self, m: usize, class: usize) -> usize {
        self.next[m * self.classes + class]
    }

    pub fn output(&self, m: usize, class: usize) -> ActionId {
        self.output[m * self.classes + class]
    }

    /// Checks that the input alphabet is the owner's partition and that
    /// every output is legal in its class.
    pub fn check_against(&self, model: &GameModel) -> Result<(), StrategyError> {
        let bad = |message: String| StrategyError::Malformed {
            player: self.player,
            message,
        };
        if !model.has_player(self.player) {
            return Err(bad("no such player in the model".into()));
        }
        let classes = model.class_count(self.player);
        if classes != self.classes {
            return Err(bad(format!(
                "reads {} observation classes, the model has {classes}",
                self.classes
            )));
        }
        for m in 0..self.size() {
            for c in 0..classes {
                let a = self.output(m, c);
                if !model.class_legal(self.player, c).contains(&a) {
                    return Err(bad(format!(
                        "m{m} plays {} on class {}, which is not legal there",
                        model.action_names().get(a).map_or("?", String::as_str),
                        model.class_id(self.player, c)
                    )));
                }
            }
        }
        Ok(())
    }

    fn check_class(&self, class: usize) -> Result<(), StrategyError> {
        if class < self.classes {
            Ok(())
        } else {
            Err(StrategyError::BadClass {
                player: self.player,
                class,
                classes: self.classes,
            })
        }
    }

    /// Renders the transducer in the witness format:
    /// `dfst player=<j> k=<n>` followed by `m<i> <class-id> -> m<i'> / <action>`.
    pub fn to_text(&self, model: &GameModel) -> String {
        let mut out = format!("dfst player={} k={}\n", self.player, self.size());
        let order = self.listing_order();
        for m in order {
            for c in 0..self.classes {
                let _ = writeln!(
                    out,
                    "m{} {} -> m{} / {}",
                    m,
                    model.class_id(self.player, c),
                    self.next_memory(m, c),
                    model.action_name(self.output(m, c))
                );
            }
        }
        out
    }

    // The initial state is listed first so the text format needs no extra field.
    fn listing_order(&self) -> Vec<usize> {
        let mut order = vec![self.initial];
        order.extend((0..self.size()).filter(|&m| m != self.initial));
        order
    }

    /// Parses one transducer in the witness format. The first listed memory
    /// state is the initial one.
    pub fn parse(text: &str, model: &GameModel) -> Result<Dfst, StrategyError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let perr = |line: usize, message: String| StrategyError::Parse { line, message };
        let (hline, header) = lines.next().ok_or_else(|| perr(1, "empty input".into()))?;
        let mut player = None;
        let mut size = None;
        let mut parts = header.split_whitespace();
        if parts.next() != Some("dfst") {
            return Err(perr(hline, "expected `dfst player=<j> k=<n>`".into()));
        }
        for p in parts {
            if let Some(v) = p.strip_prefix("player=") {
                player = v.parse::<usize>().ok().filter(|&j| j >= 1).map(Player);
            } else if let Some(v) = p.strip_prefix("k=") {
                size = v.parse::<usize>().ok().filter(|&k| k >= 1);
            } else {
                return Err(perr(hline, format!("unexpected `{p}`")));
            }
        }
        let (Some(player), Some(size)) = (player, size) else {
            return Err(perr(hline, "expected `dfst player=<j> k=<n>`".into()));
        };
        if !model.has_player(player) {
            return Err(perr(hline, format!("unknown player {player}")));
        }
        let classes = model.class_count(player);
        let parse_mem = |line: usize, t: &str| -> Result<usize, StrategyError> {
            t.strip_prefix('m')
                .and_then(|v| v.parse::<usize>().ok())
                .filter(|&m| m < size)
                .ok_or_else(|| perr(line, format!("bad memory state `{t}`")))
        };
        let mut next = vec![usize::MAX; size * classes];
        let mut output = vec![usize::MAX; size * classes];
        let mut initial = None;
        for (line, l) in lines {
            let toks: Vec<&str> = l.split_whitespace().collect();
            let [m, class, "->", m2, "/", action] = toks[..] else {
                return Err(perr(line, "expected `m<i> <class-id> -> m<j> / <action>`".into()));
            };
            let m = parse_mem(line, m)?;
            let m2 = parse_mem(line, m2)?;
            initial.get_or_insert(m);
            let c = model
                .class_by_id(player, class)
                .ok_or_else(|| perr(line, format!("unknown observation class `{class}`")))?;
            let a = model
                .action_id(action)
                .ok_or_else(|| perr(line, format!("unknown action `{action}`")))?;
            let idx = m * classes + c;
            if next[idx] != usize::MAX {
                return Err(perr(line, format!("entry for m{m} on {class} given twice")));
            }
            next[idx] = m2;
            output[idx] = a;
        }
        if next.contains(&usize::MAX) {
            return Err(perr(1, "transducer table is incomplete".into()));
        }
        let d = Dfst::new(player, classes, initial.unwrap_or(0), next, output)?;
        d.check_against(model)?;
        Ok(d)
    }

    /// Adds unreachable memory states until the transducer has `k` states.
    /// Padding states loop on themselves and copy the initial state's outputs.
    pub fn padded(&self, k: usize) -> Dfst {
        let mut d = self.clone();
        while d.size() < k {
            let m = d.size();
            for c in 0..d.classes {
                d.next.push(m);
                d.output.push(self.output(self.initial, c));
            }
        }
        d
    }
}

/// Folds the memory transition over `inputs` starting from `m0`.
pub fn run_memory(d: &Dfst, inputs: &[usize]) -> Result<usize, StrategyError> {
    let mut m = d.initial;
    for &c in inputs {
        d.check_class(c)?;
        m = d.next_memory(m, c);
    }
    Ok(m)
}

/// The action chosen after the observation history `h` (non-empty).
pub fn apply_strategy(d: &Dfst, h: &[usize]) -> Result<ActionId, StrategyError> {
    let (&last, prefix) = h.split_last().ok_or(StrategyError::EmptyHistory)?;
    d.check_class(last)?;
    let m = run_memory(d, prefix)?;
    Ok(d.output(m, last))
}

/// The canonical form of a transducer: unreachable memory states dropped,
/// behaviorally equivalent states merged, and the rest numbered in
/// breadth-first order from the initial state (inputs in class order).
/// The result computes the same strategy and is the same for any two
/// transducers computing the same strategy.
pub fn canonicalize(d: &Dfst) -> Dfst {
    let c = d.classes;
    let n = d.size();
    // Partition refinement: start from output rows, split by successor blocks.
    let mut block: Vec<usize> = vec![0; n];
    let mut count = 0;
    {
        let mut ids: BTreeMap<&[ActionId], usize> = BTreeMap::new();
        for (m, row) in d.output.chunks(c).enumerate() {
            let next_id = ids.len();
            block[m] = *ids.entry(row).or_insert(next_id);
        }
        count = count.max(ids.len());
    }
    loop {
        let mut ids: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
        let mut refined = vec![0; n];
        for m in 0..n {
            let mut sig = Vec::with_capacity(c + 1);
            sig.push(block[m]);
            sig.extend((0..c).map(|x| block[d.next_memory(m, x)]));
            let next_id = ids.len();
            refined[m] = *ids.entry(sig).or_insert(next_id);
        }
        let stable = ids.len() == count;
        count = ids.len();
        block = refined;
        if stable {
            break;
        }
    }
    // Breadth-first numbering of the blocks reachable from the initial one.
    let rep: Vec<usize> = {
        let mut rep = vec![usize::MAX; count];
        for m in 0..n {
            if rep[block[m]] == usize::MAX {
                rep[block[m]] = m;
            }
        }
        rep
    };
    let mut number = vec![usize::MAX; count];
    let mut order = Vec::new();
    let mut queue = VecDeque::new();
    number[block[d.initial]] = 0;
    order.push(block[d.initial]);
    queue.push_back(block[d.initial]);
    while let Some(b) = queue.pop_front() {
        for x in 0..c {
            let t = block[d.next_memory(rep[b], x)];
            if number[t] == usize::MAX {
                number[t] = order.len();
                order.push(t);
                queue.push_back(t);
            }
        }
    }
    let mut next = Vec::with_capacity(order.len() * c);
    let mut output = Vec::with_capacity(order.len() * c);
    for &b in &order {
        for x in 0..c {
            next.push(number[block[d.next_memory(rep[b], x)]]);
            output.push(d.output(rep[b], x));
        }
    }
    Dfst {
        player: d.player,
        classes: c,
        initial: 0,
        next,
        output,
    }
}

/// Canonical form padded with unreachable states to exactly `k` states
/// (`k` must be at least the canonical size).
pub fn canonicalize_to(d: &Dfst, k: usize) -> Dfst {
    canonicalize(d).padded(k)
}

/// One transducer per coalition member, ordered by player.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct StrategyProfile {
    members: Vec<Dfst>,
}

impl StrategyProfile {
    pub fn new(mut members: Vec<Dfst>) -> Result<StrategyProfile, StrategyError> {
        members.sort_by_key(|d| d.player);
        for w in members.windows(2) {
            if w[0].player == w[1].player {
                return Err(StrategyError::Malformed {
                    player: w[0].player,
                    message: "two strategies for the same player".into(),
                });
            }
        }
        Ok(StrategyProfile { members })
    }

    pub fn empty() -> StrategyProfile {
        StrategyProfile::default()
    }

    pub fn members(&self) -> &[Dfst] {
        &self.members
    }

    pub fn coalition(&self) -> Vec<Player> {
        self.members.iter().map(|d| d.player).collect()
    }

    pub fn get(&self, player: Player) -> Option<&Dfst> {
        self.members.iter().find(|d| d.player == player)
    }

    /// Largest memory size among the members (0 for the empty profile).
    pub fn memory(&self) -> usize {
        self.members.iter().map(Dfst::size).max().unwrap_or(0)
    }

    pub fn check_against(&self, model: &GameModel) -> Result<(), StrategyError> {
        self.members.iter().try_for_each(|d| d.check_against(model))
    }

    pub fn to_text(&self, model: &GameModel) -> String {
        self.members.iter().map(|d| d.to_text(model)).collect()
    }

    /// Parses consecutive transducers in the witness format.
    pub fn parse(text: &str, model: &GameModel) -> Result<StrategyProfile, StrategyError> {
        let mut chunks: Vec<String> = Vec::new();
        for line in text.lines() {
            if line.trim_start().starts_with("dfst") {
                chunks.push(String::new());
            }
            match chunks.last_mut() {
                Some(chunk) => {
                    chunk.push_str(line);
                    chunk.push('\n');
                }
                None if line.trim().is_empty() => {}
                None => {
                    return Err(StrategyError::Parse {
                        line: 1,
                        message: "expected `dfst`".into(),
                    })
                }
            }
        }
        let members = chunks
            .iter()
            .map(|c| Dfst::parse(c, model))
            .collect::<Result<Vec<_>, _>>()?;
        StrategyProfile::new(members)
    }
}

/// Every canonical transducer with at most `k` states for `player`, padded to
/// exactly `k` states. Ordered by canonical size, then transition table, then
/// output table, each compared lexicographically in (memory, class) order.
pub fn member_strategies(model: &GameModel, player: Player, k: usize) -> Vec<Dfst> {
    let classes = model.class_count(player);
    let legal: Vec<&[ActionId]> = (0..classes).map(|c| model.class_legal(player, c)).collect();
    let mut out = Vec::new();
    for n in 1..=k {
        for next in bfs_tables(n, classes) {
            let mut digits = vec![0usize; n * classes];
            'outputs: loop {
                let output: Vec<ActionId> = digits
                    .iter()
                    .enumerate()
                    .map(|(i, &d)| legal[i % classes][d])
                    .collect();
                let d = Dfst {
                    player,
                    classes,
                    initial: 0,
                    next: next.clone(),
                    output,
                };
                if n == 1 || canonicalize(&d).size() == n {
                    out.push(d.padded(k));
                }
                // Odometer over output choices, last entry fastest.
                let mut i = digits.len();
                loop {
                    if i == 0 {
                        break 'outputs;
                    }
                    i -= 1;
                    digits[i] += 1;
                    if digits[i] < legal[i % classes].len() {
                        break;
                    }
                    digits[i] = 0;
                }
            }
        }
    }
    out
}

/// Transition tables over `n` states whose numbering is breadth-first from
/// state 0 and that reach every state.
fn bfs_tables(n: usize, classes: usize) -> Vec<Vec<usize>> {
    fn go(n: usize, classes: usize, table: &mut Vec<usize>, max: usize, out: &mut Vec<Vec<usize>>) {
        let i = table.len();
        if i == n * classes {
            if max + 1 == n {
                out.push(table.clone());
            }
            return;
        }
        if i.is_multiple_of(classes) && i / classes > max {
            return;
        }
        for t in 0..=(max + 1).min(n - 1) {
            table.push(t);
            go(n, classes, table, max.max(t), out);
            table.pop();
        }
    }
    let mut out = Vec::new();
    go(n, classes, &mut Vec::new(), 0, &mut out);
    out
}

/// The Cartesian product of per-member strategy lists, last member fastest.
#[derive(Clone, Debug)]
pub struct ProfileSpace {
    members: Vec<Vec<Dfst>>,
    len: u128,
}

/// Upper limit on materialized per-member strategy lists.
const MEMBER_LIMIT: u128 = 1 << 22;

impl ProfileSpace {
    pub fn len(&self) -> u128 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// The profile at a position of the enumeration order.
    pub fn get(&self, mut index: u128) -> StrategyProfile {
        let mut picked = vec![0usize; self.members.len()];
        for (i, list) in self.members.iter().enumerate().rev() {
            let n = list.len() as u128;
            picked[i] = (index % n) as usize;
            index /= n;
        }
        StrategyProfile {
            members: self
                .members
                .iter()
                .zip(picked)
                .map(|(list, i)| list[i].clone())
                .collect(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = StrategyProfile> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }
}

/// Enumerates canonical `k`-memory profiles for a coalition.
///
/// Each member ranges over [`member_strategies`]; every `k`-memory profile
/// behaves like exactly one emitted profile. The empty coalition yields one
/// empty profile.
pub fn enumerate_profiles(
    model: &GameModel,
    coalition: &[Player],
    k: usize,
) -> Result<ProfileSpace, StrategyError> {
    let mut coalition = coalition.to_vec();
    coalition.sort();
    coalition.dedup();
    for &p in &coalition {
        let classes = model.class_count(p) as u32;
        let mut per: u128 = 0;
        for n in 1..=k as u32 {
            let outs: u128 = (0..model.class_count(p))
                .map(|c| model.class_legal(p, c).len() as u128)
                .product::<u128>()
                .saturating_pow(n);
            per = per.saturating_add((n as u128).saturating_pow(n * classes).saturating_mul(outs));
        }
        if per > MEMBER_LIMIT {
            return Err(StrategyError::TooLarge(per));
        }
    }
    let members: Vec<Vec<Dfst>> = coalition
        .iter()
        .map(|&p| member_strategies(model, p, k.max(1)))
        .collect();
    let len = members.iter().map(|l| l.len() as u128).product();
    Ok(ProfileSpace { members, len })
}
