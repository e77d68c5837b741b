//! Turing machines on a semi-infinite tape and their encoding as a
//! three-player game with imperfect information.
//!
//! # Configuration streams
//!
//! A configuration is played as a stream of actions: the written tape cells
//! left of the head, then the control state, then the remaining written
//! cells, followed by the end marker `a` forever. The initial configuration
//! (empty tape, head on cell 0) is the single symbol `q0`.
//!
//! # The game
//!
//! Players 1 and 2 form the coalition; player 3 is the adversary and sees
//! everything. Players 1 and 2 observe only three classes: `0` (the start
//! state), `I` (at most once per play) and `.` (everything else). Both play
//! `a` while waiting; a player who observes `I` in round `v` must then play
//! the `v`-th configuration of the run. Player 3 picks the round and one of
//! three checks:
//!
//! * `m1`: both see `I` in round 1 and must play the initial configuration;
//! * `m2`: both see `I` in the same later round and must play equal streams;
//! * `m3`: player 1 sees `I` in round `v` and player 2 in round `v + 1`;
//!   player 2's stream must be the successor of player 1's configuration.
//!
//! Any deviation leads to the only `p` state, a sink. So `<<1,2>> G !p`
//! holds with finite memory exactly when the run is ultimately periodic in
//! the configurations, i.e. repeats a configuration.
//!
//! The successor check runs a small transducer over player 1's stream that
//! produces the expected successor stream, and compares it with player 2's
//! stream one round later through a bounded queue.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::model::{GameModel, GameModelBuilder, Player};
use crate::strategy::{apply_strategy, Dfst};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TmError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("rule for ({state}, {symbol}) writes the blank symbol")]
    WritesBlank { state: String, symbol: String },
    #[error("duplicate rule for ({state}, {symbol})")]
    DuplicateRule { state: String, symbol: String },
    #[error("no rule for ({state}, {symbol}), reached after {steps} steps")]
    MissingRule {
        state: String,
        symbol: String,
        steps: usize,
    },
    #[error("left move at cell 0 in state {state} after {steps} steps")]
    LeftAtZero { state: String, steps: usize },
    #[error("invalid machine: {0}")]
    Invalid(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Move {
    L,
    R,
}

/// A deterministic machine `(Q, q0, Sigma, delta, B, F)` that never writes
/// the blank. Accepting states keep the configuration unchanged forever.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TuringMachine {
    pub states: Vec<String>,
    pub initial: String,
    pub accept: BTreeSet<String>,
    pub alphabet: Vec<String>,
    pub blank: String,
    /// `(state, read symbol) -> (state, written symbol, move)`; the read
    /// symbol may be the blank.
    pub delta: BTreeMap<(String, String), (String, String, Move)>,
}

/// Written tape contents, head position and control state.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Configuration {
    pub tape: Vec<String>,
    pub head: usize,
    pub state: String,
}

impl Configuration {
    pub fn initial(tm: &TuringMachine) -> Configuration {
        Configuration {
            tape: Vec::new(),
            head: 0,
            state: tm.initial.clone(),
        }
    }

    /// The action stream of the configuration, without the end marker.
    pub fn stream(&self) -> Vec<String> {
        let mut out: Vec<String> = self.tape[..self.head].to_vec();
        out.push(self.state.clone());
        out.extend(self.tape[self.head..].iter().cloned());
        out
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.stream().join(" "))
    }
}

/// Steps simulated by [`tm_parse`] to find missing rules and left moves at
/// cell 0.
pub const VALIDATION_STEPS: usize = 1000;

impl TuringMachine {
    pub fn is_accepting(&self, q: &str) -> bool {
        self.accept.contains(q)
    }

    pub fn has_left_moves(&self) -> bool {
        self.delta.values().any(|(_, _, m)| *m == Move::L)
    }

    /// The first `n` configurations of the run, starting with the initial one.
    pub fn run(&self, n: usize) -> Result<Vec<Configuration>, TmError> {
        let mut out = Vec::with_capacity(n);
        let mut c = Configuration::initial(self);
        for i in 0..n {
            if i > 0 {
                c = tm_step(self, &c)?;
            }
            out.push(c.clone());
        }
        Ok(out)
    }
}

fn is_tm_name(s: &str) -> bool {
    crate::model::is_identifier(s) && s != "a" && !s.starts_with('_') && !s.starts_with('@')
}

/// Parses the machine format:
///
/// ```text
/// tm
/// states q0 qf
/// initial q0
/// accept qf
/// alphabet 0 1
/// blank B
/// delta q0 B -> qf 0 R
/// ```
///
/// State and symbol names become action names in the game, so they must be
/// distinct from each other, from `a`, and must not start with `_`. The run
/// is simulated for [`VALIDATION_STEPS`] steps to reject missing rules and
/// left moves at cell 0. Rules for accepting states are ignored.
pub fn tm_parse(text: &str) -> Result<TuringMachine, TmError> {
    let perr = |line: usize, message: String| TmError::Parse { line, message };
    let mut header = false;
    let mut states: Option<Vec<String>> = None;
    let mut initial = None;
    let mut accept: Option<Vec<String>> = None;
    let mut alphabet: Option<Vec<String>> = None;
    let mut blank = None;
    let mut rules: Vec<(usize, Vec<String>)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let l = raw.split('#').next().unwrap_or("").trim();
        if l.is_empty() {
            continue;
        }
        let toks: Vec<String> = l.split_whitespace().map(str::to_string).collect();
        if !header {
            if toks != ["tm"] {
                return Err(perr(line, "expected header line `tm`".into()));
            }
            header = true;
            continue;
        }
        let rest = toks[1..].to_vec();
        let once = |slot: &mut Option<Vec<String>>, what: &str| -> Result<(), TmError> {
            if slot.replace(rest.clone()).is_some() {
                return Err(perr(line, format!("duplicate `{what}` line")));
            }
            Ok(())
        };
        match toks[0].as_str() {
            "states" => once(&mut states, "states")?,
            "accept" => once(&mut accept, "accept")?,
            "alphabet" => once(&mut alphabet, "alphabet")?,
            "initial" | "blank" => {
                let [v] = &rest[..] else {
                    return Err(perr(line, format!("expected `{} <name>`", toks[0])));
                };
                let slot = if toks[0] == "initial" { &mut initial } else { &mut blank };
                if slot.replace(v.clone()).is_some() {
                    return Err(perr(line, format!("duplicate `{}` line", toks[0])));
                }
            }
            "delta" => rules.push((line, rest)),
            other => return Err(perr(line, format!("unknown directive `{other}`"))),
        }
    }
    if !header {
        return Err(perr(1, "expected header line `tm`".into()));
    }
    let states = states.unwrap_or_default();
    if states.is_empty() {
        return Err(TmError::Invalid("empty state set".into()));
    }
    let alphabet = alphabet.unwrap_or_default();
    let blank = blank.ok_or_else(|| TmError::Invalid("missing `blank` line".into()))?;
    let initial = initial.ok_or_else(|| TmError::Invalid("missing `initial` line".into()))?;
    let accept: BTreeSet<String> = accept.unwrap_or_default().into_iter().collect();
    let mut names = BTreeSet::new();
    for n in states.iter().chain(&alphabet) {
        if !is_tm_name(n) {
            return Err(TmError::Invalid(format!(
                "`{n}` cannot be used as a state or symbol name"
            )));
        }
        if !names.insert(n.clone()) {
            return Err(TmError::Invalid(format!("`{n}` is declared twice")));
        }
    }
    if names.contains(&blank) {
        return Err(TmError::Invalid("the blank must not be a state or tape symbol".into()));
    }
    if !states.contains(&initial) {
        return Err(TmError::Invalid(format!("initial state {initial} is not declared")));
    }
    if let Some(q) = accept.iter().find(|q| !states.contains(q)) {
        return Err(TmError::Invalid(format!("accepting state {q} is not declared")));
    }
    let mut delta = BTreeMap::new();
    for (line, r) in rules {
        let [q, s, arrow, q2, s2, m] = &r[..] else {
            return Err(perr(line, "expected `delta <q> <a> -> <q'> <a'> L|R`".into()));
        };
        if arrow != "->" {
            return Err(perr(line, "expected `->`".into()));
        }
        if !states.contains(q) || !states.contains(q2) {
            return Err(perr(line, "undeclared state".into()));
        }
        if *s != blank && !alphabet.contains(s) {
            return Err(perr(line, format!("undeclared symbol {s}")));
        }
        if *s2 == blank {
            return Err(TmError::WritesBlank {
                state: q.clone(),
                symbol: s.clone(),
            });
        }
        if !alphabet.contains(s2) {
            return Err(perr(line, format!("undeclared symbol {s2}")));
        }
        let m = match m.as_str() {
            "L" => Move::L,
            "R" => Move::R,
            _ => return Err(perr(line, "direction must be L or R".into())),
        };
        if delta
            .insert((q.clone(), s.clone()), (q2.clone(), s2.clone(), m))
            .is_some()
        {
            return Err(TmError::DuplicateRule {
                state: q.clone(),
                symbol: s.clone(),
            });
        }
    }
    delta.retain(|(q, _), _| !accept.contains(q));
    let tm = TuringMachine {
        states,
        initial,
        accept,
        alphabet,
        blank,
        delta,
    };
    tm.run_checked(VALIDATION_STEPS)?;
    Ok(tm)
}

/// The successor configuration. Accepting configurations are their own
/// successors; moving right past the written region appends the written
/// symbol.
pub fn tm_step(tm: &TuringMachine, c: &Configuration) -> Result<Configuration, TmError> {
    if tm.is_accepting(&c.state) {
        return Ok(c.clone());
    }
    let read = c.tape.get(c.head).cloned().unwrap_or_else(|| tm.blank.clone());
    let (q2, write, m) = tm
        .delta
        .get(&(c.state.clone(), read.clone()))
        .ok_or_else(|| TmError::MissingRule {
            state: c.state.clone(),
            symbol: read.clone(),
            steps: 0,
        })?;
    let mut tape = c.tape.clone();
    if c.head == tape.len() {
        tape.push(write.clone());
    } else {
        tape[c.head] = write.clone();
    }
    let head = match m {
        Move::R => c.head + 1,
        Move::L => c.head.checked_sub(1).ok_or_else(|| TmError::LeftAtZero {
            state: c.state.clone(),
            steps: 0,
        })?,
    };
    Ok(Configuration {
        tape,
        head,
        state: q2.clone(),
    })
}

// Step errors from the simulation carry the step count.
impl TuringMachine {
    fn run_checked(&self, n: usize) -> Result<(), TmError> {
        let mut c = Configuration::initial(self);
        for steps in 0..n {
            c = tm_step(self, &c).map_err(|e| match e {
                TmError::MissingRule { state, symbol, .. } => TmError::MissingRule {
                    state,
                    symbol,
                    steps,
                },
                TmError::LeftAtZero { state, .. } => TmError::LeftAtZero { state, steps },
                e => e,
            })?;
        }
        Ok(())
    }
}

/// Stream symbols of the gadget.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Sym {
    Tape(usize),
    Ctrl(usize),
    End,
}

/// States of the successor transducer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Tx {
    /// Before the control state; holds the last tape symbol when the
    /// machine has left moves.
    Pre(Option<usize>),
    /// Just read the control state.
    Head(Option<usize>, usize),
    /// After the head window.
    Copy,
    /// Inside the end markers.
    End,
}

/// Pending comparison between the expected and the actual stream of player 2.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Pending {
    /// Expected symbols not yet played by player 2.
    Expect(VecDeque<Sym>),
    /// Symbols of player 2 not yet produced by the transducer.
    Got(VecDeque<Sym>),
}

const EXPECT_BOUND: usize = 4;
const GOT_BOUND: usize = 2;

struct Gadget<'a> {
    tm: &'a TuringMachine,
    buffered: bool,
    state_ix: HashMap<&'a str, usize>,
    tape_ix: HashMap<&'a str, usize>,
}

impl<'a> Gadget<'a> {
    fn new(tm: &'a TuringMachine) -> Self {
        Gadget {
            tm,
            buffered: tm.has_left_moves(),
            state_ix: tm.states.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect(),
            tape_ix: tm.alphabet.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect(),
        }
    }

    fn name(&self, s: Sym) -> &str {
        match s {
            Sym::Tape(i) => &self.tm.alphabet[i],
            Sym::Ctrl(i) => &self.tm.states[i],
            Sym::End => "a",
        }
    }

    /// One transducer step on player 1's symbol; `None` on a malformed stream.
    fn feed(&self, tx: Tx, x: Sym) -> Option<(Tx, Vec<Sym>)> {
        let mut out = Vec::new();
        match (tx, x) {
            (Tx::Pre(_), Sym::End) => None,
            (Tx::Pre(buf), Sym::Tape(t)) => {
                if self.buffered {
                    out.extend(buf.map(Sym::Tape));
                    Some((Tx::Pre(Some(t)), out))
                } else {
                    Some((Tx::Pre(None), vec![Sym::Tape(t)]))
                }
            }
            (Tx::Pre(buf), Sym::Ctrl(q)) => {
                if self.tm.is_accepting(&self.tm.states[q]) {
                    out.extend(buf.map(Sym::Tape));
                    out.push(Sym::Ctrl(q));
                    Some((Tx::Copy, out))
                } else {
                    Some((Tx::Head(buf, q), out))
                }
            }
            (Tx::Head(..), Sym::Ctrl(_)) => None,
            (Tx::Head(buf, q), c) => {
                let read = match c {
                    Sym::Tape(t) => self.tm.alphabet[t].clone(),
                    _ => self.tm.blank.clone(),
                };
                let (q2, w, m) = self.tm.delta.get(&(self.tm.states[q].clone(), read))?;
                let q2 = Sym::Ctrl(self.state_ix[q2.as_str()]);
                let w = Sym::Tape(self.tape_ix[w.as_str()]);
                match m {
                    Move::R => {
                        out.extend(buf.map(Sym::Tape));
                        out.push(w);
                        out.push(q2);
                    }
                    Move::L => {
                        let b = buf?;
                        out.push(q2);
                        out.push(Sym::Tape(b));
                        out.push(w);
                    }
                }
                if c == Sym::End {
                    out.push(Sym::End);
                    Some((Tx::End, out))
                } else {
                    Some((Tx::Copy, out))
                }
            }
            (Tx::Copy, Sym::Ctrl(_)) => None,
            (Tx::Copy, Sym::Tape(t)) => Some((Tx::Copy, vec![Sym::Tape(t)])),
            (Tx::Copy, Sym::End) | (Tx::End, Sym::End) => Some((Tx::End, vec![Sym::End])),
            (Tx::End, _) => None,
        }
    }

    /// Adds transducer output, then matches player 2's symbol (if any).
    fn advance(&self, pending: &Pending, out: Vec<Sym>, y: Option<Sym>) -> Option<Pending> {
        let (mut expect, mut got) = match pending {
            Pending::Expect(e) => (e.clone(), VecDeque::new()),
            Pending::Got(g) => (VecDeque::new(), g.clone()),
        };
        for s in out {
            match got.pop_front() {
                Some(g) if g != s => return None,
                Some(_) => {}
                None => expect.push_back(s),
            }
        }
        if let Some(y) = y {
            match expect.pop_front() {
                Some(e) if e != y => return None,
                Some(_) => {}
                None => got.push_back(y),
            }
        }
        if expect.len() > EXPECT_BOUND || got.len() > GOT_BOUND || (!self.buffered && !got.is_empty()) {
            return None;
        }
        Some(if got.is_empty() {
            Pending::Expect(expect)
        } else {
            Pending::Got(got)
        })
    }

    fn symbols(&self) -> Vec<Sym> {
        (0..self.tm.alphabet.len())
            .map(Sym::Tape)
            .chain((0..self.tm.states.len()).map(Sym::Ctrl))
            .collect()
    }
}

/// Names used by the gadget for its fixed states.
pub mod names {
    pub const START: &str = "s0";
    pub const WAIT: &str = "w";
    pub const M1_REVEAL: &str = "m1_i";
    pub const M1_TAIL: &str = "m1_t";
    pub const M2_REVEAL: &str = "m2_i";
    pub const M2_TAIL: &str = "m2_e";
    pub const M3_REVEAL: &str = "m3_i";
    pub const SINK: &str = "sink";
    /// Player 3's action that keeps waiting.
    pub const STAY: &str = "_wait";
    pub const TO_M1: &str = "_m1";
    pub const TO_M2: &str = "_m2";
    pub const TO_M3: &str = "_m3";
    pub const GO: &str = "_go";
}

/// Builds the three-player game for a machine; see the module docs.
///
/// Checker states of the successor check are named `m3_c<i>` in discovery
/// order. Every off-protocol move leads to `sink`, the only state labeled `p`.
pub fn tm_to_icgm(tm: &TuringMachine) -> Result<GameModel, TmError> {
    tm.run_checked(1)?;
    use names::*;
    let gd = Gadget::new(tm);
    let syms = gd.symbols();
    let all: Vec<Sym> = std::iter::once(Sym::End).chain(syms.iter().copied()).collect();
    let n = |s: Sym| gd.name(s).to_string();
    let sym_names: Vec<String> = syms.iter().map(|&s| n(s)).collect();
    let all_names: Vec<String> = all.iter().map(|&s| n(s)).collect();

    // Checker states: (transducer, pending, player 2 sees I).
    type Key = (Tx, Pending, bool);
    let mut keys: Vec<Key> = Vec::new();
    let mut key_ix: HashMap<Key, usize> = HashMap::new();
    let mut edges: Vec<Vec<(Sym, Sym, Option<usize>)>> = Vec::new();
    let mut intern = |k: Key, keys: &mut Vec<Key>, edges: &mut Vec<Vec<_>>| -> usize {
        *key_ix.entry(k.clone()).or_insert_with(|| {
            keys.push(k);
            edges.push(Vec::new());
            keys.len() - 1
        })
    };
    // Entry: player 1 plays its first symbol at m3_i while player 2 waits.
    let mut entry: Vec<(Sym, Option<usize>)> = Vec::new();
    for &x in &syms {
        let target = gd
            .feed(Tx::Pre(None), x)
            .and_then(|(tx, out)| gd.advance(&Pending::Expect(VecDeque::new()), out, None).map(|p| (tx, p)))
            .map(|(tx, p)| intern((tx, p, true), &mut keys, &mut edges));
        entry.push((x, target));
    }
    let mut done = 0;
    while done < keys.len() {
        let (tx, pending, first) = keys[done].clone();
        let ys: &[Sym] = if first { &syms } else { &all };
        let mut out_edges = Vec::new();
        for &x in &all {
            for &y in ys {
                let target = gd
                    .feed(tx, x)
                    .and_then(|(tx2, out)| gd.advance(&pending, out, Some(y)).map(|p| (tx2, p)))
                    .map(|(tx2, p)| intern((tx2, p, false), &mut keys, &mut edges));
                out_edges.push((x, y, target));
            }
        }
        edges[done] = out_edges;
        done += 1;
    }

    let checker_name = |i: usize| format!("m3_c{i}");
    let mut b = GameModelBuilder::new(3);
    b.action("a");
    b.actions(sym_names.iter().map(String::as_str));
    b.actions([STAY, TO_M1, TO_M2, TO_M3, GO]);
    let fixed = [START, WAIT, M1_REVEAL, M1_TAIL, M2_REVEAL, M2_TAIL, M3_REVEAL];
    for s in fixed {
        b.state(s, []);
    }
    let checkers: Vec<String> = (0..keys.len()).map(checker_name).collect();
    for c in &checkers {
        b.state(c, []);
    }
    b.state(SINK, ["p"]);

    let dot = all_names.iter().map(String::as_str);
    let reveal = sym_names.iter().map(String::as_str);
    // Classes per player: 0 = start, I = reveal states, . = everything else.
    let mut i1: Vec<&str> = vec![M1_REVEAL, M2_REVEAL, M3_REVEAL];
    let mut i2: Vec<&str> = vec![M1_REVEAL, M2_REVEAL];
    for (i, k) in keys.iter().enumerate() {
        if k.2 {
            i2.push(checkers[i].as_str());
        }
    }
    let every: Vec<&str> = fixed
        .iter()
        .copied()
        .chain(checkers.iter().map(String::as_str))
        .chain([SINK])
        .collect();
    for &s in &every {
        for (j, reveal_set) in [(1, &i1), (2, &i2)] {
            if s == START {
                b.legal(s, j, ["a"]);
            } else if reveal_set.contains(&s) {
                b.legal(s, j, reveal.clone());
            } else {
                b.legal(s, j, dot.clone());
            }
        }
        match s {
            START => b.legal(s, 3, [TO_M1, STAY, TO_M3]),
            WAIT => b.legal(s, 3, [STAY, TO_M2, TO_M3]),
            _ => b.legal(s, 3, [GO]),
        };
    }
    let legal_names = |s: &str, j: usize| -> Vec<String> {
        if s == START {
            vec!["a".into()]
        } else if (j == 1 && i1.contains(&s)) || (j == 2 && i2.contains(&s)) {
            sym_names.clone()
        } else {
            all_names.clone()
        }
    };
    // Adds transitions for every coalition pair at `s`: `ok` returns the
    // target for protocol moves, anything else goes to the sink.
    let wire = |b: &mut GameModelBuilder, s: &str, p3: &str, ok: &dyn Fn(&str, &str) -> Option<String>| {
        for x in legal_names(s, 1) {
            for y in legal_names(s, 2) {
                let t = ok(&x, &y).unwrap_or_else(|| SINK.to_string());
                b.trans(s, &[&x, &y, p3], &t);
            }
        }
    };
    let both_a = |t: &'static str| move |x: &str, y: &str| (x == "a" && y == "a").then(|| t.to_string());
    wire(&mut b, START, TO_M1, &both_a(M1_REVEAL));
    wire(&mut b, START, STAY, &both_a(WAIT));
    wire(&mut b, START, TO_M3, &both_a(M3_REVEAL));
    wire(&mut b, WAIT, STAY, &both_a(WAIT));
    wire(&mut b, WAIT, TO_M2, &both_a(M2_REVEAL));
    wire(&mut b, WAIT, TO_M3, &both_a(M3_REVEAL));
    let q0 = tm.initial.clone();
    wire(&mut b, M1_REVEAL, GO, &|x, y| (x == q0 && y == q0).then(|| M1_TAIL.to_string()));
    wire(&mut b, M1_TAIL, GO, &both_a(M1_TAIL));
    wire(&mut b, M2_REVEAL, GO, &|x, y| (x == y).then(|| M2_TAIL.to_string()));
    wire(&mut b, M2_TAIL, GO, &|x, y| (x == y).then(|| M2_TAIL.to_string()));
    let entry_names: HashMap<String, Option<usize>> = entry.iter().map(|&(x, t)| (n(x), t)).collect();
    wire(&mut b, M3_REVEAL, GO, &|x, y| {
        if y != "a" {
            return None;
        }
        entry_names.get(x).copied().flatten().map(checker_name)
    });
    for (i, es) in edges.iter().enumerate() {
        let table: HashMap<(String, String), Option<usize>> =
            es.iter().map(|&(x, y, t)| ((n(x), n(y)), t)).collect();
        wire(&mut b, &checkers[i], GO, &|x, y| {
            table
                .get(&(x.to_string(), y.to_string()))
                .copied()
                .flatten()
                .map(checker_name)
        });
    }
    wire(&mut b, SINK, GO, &|_, _| Some(SINK.to_string()));

    i1.sort_unstable();
    i2.sort_unstable();
    for (j, reveal_set) in [(1, &i1), (2, &i2)] {
        let dots: Vec<&str> = every
            .iter()
            .copied()
            .filter(|s| *s != START && !reveal_set.contains(s))
            .collect();
        b.obs(j, &[vec![START], reveal_set.to_vec(), dots]);
    }
    b.build()
        .map_err(|e| TmError::Invalid(format!("gadget construction failed: {e}")))
}

/// The actions a coalition member's strategy plays when it observes `0`,
/// then `.` for `v - 1` rounds, then `I`, then `.` for `len - 1` rounds.
/// The result has `len` actions, starting with the one played at `I`.
pub fn reveal_stream(model: &GameModel, d: &Dfst, v: usize, len: usize) -> Vec<String> {
    let p: Player = d.player();
    let start = model.state_id(names::START).expect("gadget start state");
    let zero = model.class_index(p, start);
    let reveal_state = if p == Player(1) { names::M3_REVEAL } else { names::M2_REVEAL };
    let reveal = model.class_index(p, model.state_id(reveal_state).expect("gadget reveal state"));
    let dot = model.class_index(p, model.state_id(names::WAIT).expect("gadget wait state"));
    let mut history = vec![zero];
    history.extend(std::iter::repeat_n(dot, v.saturating_sub(1)));
    let mut out = Vec::with_capacity(len);
    history.push(reveal);
    for _ in 0..len {
        let a = apply_strategy(d, &history).expect("history over the player's classes");
        out.push(model.action_name(a).to_string());
        history.push(dot);
    }
    out
}

/// The stream a correct player plays after observing `I` in round `v`:
/// the `v`-th configuration followed by end markers, truncated to `len`.
pub fn expected_stream(tm: &TuringMachine, v: usize, len: usize) -> Result<Vec<String>, TmError> {
    let c = tm.run(v)?.pop().expect("v >= 1");
    let mut s = c.stream();
    s.resize(len.max(s.len()), "a".into());
    s.truncate(len);
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub const ACCEPT_ONE_STEP: &str = "tm\nstates q0 qf\ninitial q0\naccept qf\nalphabet 0\nblank B\ndelta q0 B -> qf 0 R\n";
    pub const ZERO_WRITER: &str = "tm\nstates q0\ninitial q0\naccept\nalphabet 0\nblank B\ndelta q0 B -> q0 0 R\n";

    #[test]
    fn parse_and_step() {
        let tm = tm_parse(ZERO_WRITER).unwrap();
        let c0 = Configuration::initial(&tm);
        let c1 = tm_step(&tm, &c0).unwrap();
        assert_eq!(c1.tape, vec!["0".to_string()]);
        assert_eq!(c1.head, 1);
        assert_eq!(c1.state, "q0");
        assert_eq!(c1.to_string(), "0 q0");

        let acc = tm_parse(ACCEPT_ONE_STEP).unwrap();
        let c1 = tm_step(&acc, &Configuration::initial(&acc)).unwrap();
        assert_eq!(tm_step(&acc, &c1).unwrap(), c1);
    }

    #[test]
    fn step_beyond_written_region_reads_blank() {
        let text = "tm\nstates q r\ninitial q\naccept\nalphabet 0 1\nblank B\n\
                    delta q B -> r 1 R\ndelta r B -> q 0 L\ndelta q 1 -> r 1 R\ndelta r 0 -> q 0 L\n";
        let tm = tm_parse(text).unwrap();
        let run = tm.run(4).unwrap();
        assert_eq!(run[1].to_string(), "1 r");
        assert_eq!(run[2].to_string(), "q 1 0");
        assert_eq!(run[3].to_string(), "1 r 0");
    }

    #[test]
    fn parse_errors() {
        let blank_write = ZERO_WRITER.replace("q0 0 R", "q0 B R");
        assert!(matches!(tm_parse(&blank_write), Err(TmError::WritesBlank { .. })));
        let empty = "tm\nstates\ninitial q0\nalphabet 0\nblank B\n";
        assert!(matches!(tm_parse(empty), Err(TmError::Invalid(_))));
        let dup = format!("{ZERO_WRITER}delta q0 B -> q0 0 L\n");
        assert!(matches!(tm_parse(&dup), Err(TmError::DuplicateRule { .. })));
        let missing = "tm\nstates q0 q1\ninitial q0\naccept\nalphabet 0\nblank B\ndelta q0 B -> q1 0 R\n";
        assert!(matches!(
            tm_parse(missing),
            Err(TmError::MissingRule { steps: 1, .. })
        ));
        let left = "tm\nstates q0\ninitial q0\naccept\nalphabet 0\nblank B\ndelta q0 B -> q0 0 L\n";
        assert!(matches!(tm_parse(left), Err(TmError::LeftAtZero { .. })));
        let bad_name = ZERO_WRITER.replace("alphabet 0", "alphabet a");
        assert!(matches!(tm_parse(&bad_name), Err(TmError::Invalid(_))));
    }

    #[test]
    fn gadget_is_valid_with_one_sink() {
        for text in [ACCEPT_ONE_STEP, ZERO_WRITER] {
            let tm = tm_parse(text).unwrap();
            let m = tm_to_icgm(&tm).unwrap();
            assert!(m.validate().is_empty());
            let p_states: Vec<usize> = (0..m.state_count()).filter(|&s| m.has_prop(s, "p")).collect();
            assert_eq!(p_states, vec![m.state_id(names::SINK).unwrap()]);
            for j in [Player(1), Player(2)] {
                assert_eq!(m.class_count(j), 3);
            }
            let w = m.observation_class(Player(2), names::M3_REVEAL).unwrap();
            assert!(w.members.contains(&m.state_id(names::WAIT).unwrap()));
            assert!(m.state_count() <= 60, "{} states", m.state_count());
        }
    }

    pub const LEFT_MOVER: &str = "tm\nstates q r\ninitial q\naccept\nalphabet 0 1\nblank B\n\
                                  delta q B -> r 1 R\ndelta r B -> q 0 L\ndelta q 1 -> r 1 R\ndelta r 0 -> q 0 L\n";

    #[derive(Clone, Copy)]
    enum Check {
        M1,
        M2,
        M3,
    }

    /// Plays `rounds` rounds with players revealing the correct streams,
    /// optionally with player 2's symbol at stream position `bad.0`
    /// replaced by `bad.1`. Returns whether the play reaches the sink.
    fn play(m: &GameModel, tm: &TuringMachine, check: Check, v: usize, bad: Option<(usize, &str)>) -> bool {
        let (r1, r2) = match check {
            Check::M1 => (1, 1),
            Check::M2 => (v, v),
            Check::M3 => (v, v + 1),
        };
        let stream = |reveal: usize, r: usize| -> String {
            if r < reveal {
                "a".into()
            } else {
                expected_stream(tm, reveal, r - reveal + 1).unwrap().pop().unwrap()
            }
        };
        let mut s = m.state_id(names::START).unwrap();
        for r in 0..20 {
            let x = if r == 0 { "a".into() } else { stream(r1, r) };
            let mut y = if r == 0 { "a".into() } else { stream(r2, r) };
            if let Some((i, sym)) = bad {
                if r >= r2 && r - r2 == i {
                    y = sym.into();
                }
            }
            let p3 = match (m.state_name(s), check) {
                (names::START, Check::M1) => names::TO_M1,
                (names::START, Check::M3) if v == 1 => names::TO_M3,
                (names::START, _) => names::STAY,
                (names::WAIT, _) if r + 1 < v => names::STAY,
                (names::WAIT, Check::M2) => names::TO_M2,
                (names::WAIT, _) => names::TO_M3,
                _ => names::GO,
            };
            let ids: Vec<usize> = [x.as_str(), y.as_str(), p3].iter().map(|a| m.action_id(a).unwrap()).collect();
            s = m.transition(s, &ids).expect("protocol actions are legal");
            if m.has_prop(s, "p") {
                return true;
            }
        }
        false
    }

    #[test]
    fn honest_streams_avoid_the_sink_and_deviations_do_not() {
        for text in [ACCEPT_ONE_STEP, ZERO_WRITER, LEFT_MOVER] {
            let tm = tm_parse(text).unwrap();
            let m = tm_to_icgm(&tm).unwrap();
            let symbols: Vec<&str> = tm.alphabet.iter().chain(&tm.states).map(String::as_str).collect();
            assert!(!play(&m, &tm, Check::M1, 1, None));
            for v in 1..=6 {
                if v >= 2 {
                    assert!(!play(&m, &tm, Check::M2, v, None));
                }
                assert!(!play(&m, &tm, Check::M3, v, None), "v = {v}");
                let len = tm.run(v + 1).unwrap()[v].stream().len();
                for i in 0..len + 2 {
                    let right = expected_stream(&tm, v + 1, i + 1).unwrap().pop().unwrap();
                    for &wrong in symbols.iter().chain(&["a"]) {
                        if wrong == right || (i == 0 && wrong == "a") {
                            continue;
                        }
                        assert!(
                            play(&m, &tm, Check::M3, v, Some((i, wrong))),
                            "v = {v}, position {i}, {wrong} instead of {right}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn expected_streams() {
        let tm = tm_parse(ACCEPT_ONE_STEP).unwrap();
        assert_eq!(expected_stream(&tm, 1, 3).unwrap(), vec!["q0", "a", "a"]);
        assert_eq!(expected_stream(&tm, 4, 3).unwrap(), vec!["0", "qf", "a"]);
    }
}
