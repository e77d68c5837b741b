//! Generators for the example models and the Turing-machine gadget.
//!
//! * [`fig1_model`]: two players, two states, coordination to reach `p`.
//! * [`fig2_model`]: one player who must wait `k - 1` rounds before moving to
//!   the `p` state, which needs `k` memory states.
//! * [`fig3_family`]: the same counting task for a player who cannot tell the
//!   chain states apart.
//! * [`tm`]: Turing machines and their encoding as a three-player game.

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::model::{GameModel, GameModelBuilder};

pub mod tm;

pub use tm::{tm_parse, tm_step, tm_to_icgm, Configuration, Move as HeadMove, TmError, TuringMachine};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FixtureError {
    #[error("fig3 family index must be at least 1, got {0}")]
    BadIndex(usize),
}

/// Two players with actions `a`, `b` at `s0` (`q`) and `c` at `s1` (`p`, `q`).
/// Matching moves lead to `s1`, mismatches stay at `s0`; `s1` loops.
pub fn fig1_model() -> GameModel {
    let mut b = GameModelBuilder::new(2);
    b.actions(["a", "b", "c"]);
    b.state("s0", ["q"]).state("s1", ["p", "q"]);
    b.legal("s0", 1, ["a", "b"]).legal("s0", 2, ["a", "b"]);
    b.legal("s1", 1, ["c"]).legal("s1", 2, ["c"]);
    b.trans("s0", &["a", "a"], "s1").trans("s0", &["b", "b"], "s1");
    b.trans("s0", &["a", "b"], "s0").trans("s0", &["b", "a"], "s0");
    b.trans("s1", &["c", "c"], "s1");
    b.build().expect("fig1 model is valid")
}

/// One player. At `s0`, `w` waits and `g` goes to `s1` (`p`); from `s1`
/// every action leads to the sink `s2`.
pub fn fig2_model() -> GameModel {
    let mut b = GameModelBuilder::new(1);
    b.actions(["w", "g"]);
    b.state("s0", []).state("s1", ["p"]).state("s2", []);
    for s in ["s0", "s1", "s2"] {
        b.legal(s, 1, ["w", "g"]);
    }
    b.trans("s0", &["w"], "s0").trans("s0", &["g"], "s1");
    b.trans("s1", &["w"], "s2").trans("s1", &["g"], "s2");
    b.trans("s2", &["w"], "s2").trans("s2", &["g"], "s2");
    b.build().expect("fig2 model is valid")
}

/// The chain `s0 .. s_k` for one player who observes `s0` and cannot
/// distinguish any other states. `w` advances along the chain and `g`
/// leaves it for `s_lose`, except at `s_k` where `g` reaches `s_win` (`p`)
/// and `w` goes to `s_lose`. Both sinks loop.
pub fn fig3_family(k: usize) -> Result<GameModel, FixtureError> {
    if k == 0 {
        return Err(FixtureError::BadIndex(k));
    }
    let mut b = GameModelBuilder::new(1);
    b.actions(["w", "g"]);
    let chain: Vec<String> = (0..=k).map(|i| format!("s{i}")).collect();
    for s in &chain {
        b.state(s, []);
    }
    b.state("s_lose", []).state("s_win", ["p"]);
    for s in chain.iter().map(String::as_str).chain(["s_lose", "s_win"]) {
        b.legal(s, 1, ["w", "g"]);
    }
    for i in 0..k {
        b.trans(&chain[i], &["w"], &chain[i + 1]);
        b.trans(&chain[i], &["g"], "s_lose");
    }
    b.trans(&chain[k], &["w"], "s_lose").trans(&chain[k], &["g"], "s_win");
    for sink in ["s_lose", "s_win"] {
        b.trans(sink, &["w"], sink).trans(sink, &["g"], sink);
    }
    let rest: Vec<&str> = chain[1..]
        .iter()
        .map(String::as_str)
        .chain(["s_lose", "s_win"])
        .collect();
    b.obs(1, &[vec!["s0"], rest]);
    Ok(b.build().expect("fig3 model is valid"))
}

/// Shape of a random model.
#[derive(Clone, Debug)]
pub struct RandomModelParams {
    pub states: usize,
    pub players: usize,
    pub actions: usize,
    pub props: Vec<String>,
    /// Draw random observation partitions (with uniform legal sets).
    pub incomplete: bool,
}

impl Default for RandomModelParams {
    fn default() -> Self {
        RandomModelParams {
            states: 4,
            players: 2,
            actions: 2,
            props: vec!["p".into()],
            incomplete: false,
        }
    }
}

/// A random valid model. States are `s0, s1, ...`, actions `a0, a1, ...`.
pub fn random_model<R: Rng + ?Sized>(rng: &mut R, params: &RandomModelParams) -> GameModel {
    let n = params.states.max(1);
    let states: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
    let actions: Vec<String> = (0..params.actions.max(1)).map(|i| format!("a{i}")).collect();
    let mut b = GameModelBuilder::new(params.players.max(1));
    b.actions(actions.iter().map(String::as_str));
    for s in &states {
        let props: Vec<&str> = params
            .props
            .iter()
            .filter(|_| rng.gen_bool(0.5))
            .map(String::as_str)
            .collect();
        b.state(s, props);
    }
    let mut partitions: Vec<Vec<Vec<usize>>> = Vec::new();
    for _ in 0..params.players.max(1) {
        if params.incomplete {
            let blocks = rng.gen_range(1..=n);
            let mut classes = vec![Vec::new(); blocks];
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(rng);
            for (i, s) in order.into_iter().enumerate() {
                let c = if i < blocks { i } else { rng.gen_range(0..blocks) };
                classes[c].push(s);
            }
            partitions.push(classes);
        } else {
            partitions.push((0..n).map(|s| vec![s]).collect());
        }
    }
    let mut legal = vec![vec![Vec::new(); params.players.max(1)]; n];
    for (j, classes) in partitions.iter().enumerate() {
        for class in classes {
            let count = rng.gen_range(1..=actions.len());
            let mut pick: Vec<usize> = (0..actions.len()).collect();
            pick.shuffle(rng);
            pick.truncate(count);
            pick.sort_unstable();
            for &s in class {
                legal[s][j] = pick.clone();
            }
        }
    }
    for s in 0..n {
        for (j, acts) in legal[s].iter().enumerate() {
            b.legal(&states[s], j + 1, acts.iter().map(|&a| actions[a].as_str()));
        }
    }
    for s in 0..n {
        let mut moves: Vec<Vec<usize>> = vec![Vec::new()];
        for acts in &legal[s] {
            moves = moves
                .into_iter()
                .flat_map(|m| {
                    acts.iter().map(move |&a| {
                        let mut m2 = m.clone();
                        m2.push(a);
                        m2
                    })
                })
                .collect();
        }
        for m in moves {
            let names: Vec<&str> = m.iter().map(|&a| actions[a].as_str()).collect();
            let t = rng.gen_range(0..n);
            b.trans(&states[s], &names, &states[t]);
        }
    }
    if params.incomplete {
        for (j, classes) in partitions.iter().enumerate() {
            let named: Vec<Vec<&str>> = classes
                .iter()
                .map(|c| c.iter().map(|&s| states[s].as_str()).collect())
                .collect();
            b.obs(j + 1, &named);
        }
    }
    b.build().expect("random models are valid by construction")
}
