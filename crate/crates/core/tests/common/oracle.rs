//! Brute-force reference semantics for LTL on ultimately periodic words.
//!
//! Shared by unit tests (through `#[path]`) and integration tests.

use std::collections::BTreeSet;

use super::{Formula, LabelledGraph, SimpleGraph};

/// `stem` followed by `cycle` repeated forever; each letter is a label set.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct LassoWord {
    pub stem: Vec<BTreeSet<String>>,
    pub cycle: Vec<BTreeSet<String>>,
}

impl LassoWord {
    fn len(&self) -> usize {
        self.stem.len() + self.cycle.len()
    }

    fn letter(&self, i: usize) -> &BTreeSet<String> {
        if i < self.stem.len() {
            &self.stem[i]
        } else {
            &self.cycle[i - self.stem.len()]
        }
    }

    fn succ(&self, i: usize) -> usize {
        if i + 1 < self.len() {
            i + 1
        } else {
            self.stem.len()
        }
    }

    /// The word as a single-path graph.
    pub fn to_graph(&self) -> SimpleGraph {
        let n = self.len();
        SimpleGraph {
            succ: (0..n).map(|i| vec![self.succ(i)]).collect(),
            labels: (0..n).map(|i| self.letter(i).clone()).collect(),
            initial: vec![0],
            names: Vec::new(),
        }
    }
}

fn truth(f: &Formula, w: &LassoWord) -> Vec<bool> {
    let n = w.len();
    match f {
        Formula::True => vec![true; n],
        Formula::Prop(p) => (0..n).map(|i| w.letter(i).contains(p)).collect(),
        Formula::Not(a) => truth(a, w).into_iter().map(|x| !x).collect(),
        Formula::Or(a, b) => {
            let (x, y) = (truth(a, w), truth(b, w));
            (0..n).map(|i| x[i] || y[i]).collect()
        }
        Formula::Next(a) => {
            let x = truth(a, w);
            (0..n).map(|i| x[w.succ(i)]).collect()
        }
        Formula::Until(a, b) => {
            let (x, y) = (truth(a, w), truth(b, w));
            let mut u = vec![false; n];
            for _ in 0..=n {
                for i in (0..n).rev() {
                    u[i] = y[i] || (x[i] && u[w.succ(i)]);
                }
            }
            u
        }
        Formula::Coalition(..) => panic!("quantifier in an LTL formula"),
    }
}

/// Whether the word satisfies the quantifier-free path formula at position 0.
pub fn eval_word(f: &Formula, w: &LassoWord) -> bool {
    truth(f, w)[0]
}

/// Every lasso word over `props` with stem length `0..=max` and cycle
/// length `1..=max`.
pub fn lasso_words(props: &[&str], max: usize) -> Vec<LassoWord> {
    let letters: Vec<BTreeSet<String>> = (0..1usize << props.len())
        .map(|bits| {
            props
                .iter()
                .enumerate()
                .filter(|(i, _)| bits >> i & 1 == 1)
                .map(|(_, p)| p.to_string())
                .collect()
        })
        .collect();
    let seqs = |len: usize| -> Vec<Vec<BTreeSet<String>>> {
        let mut out = vec![Vec::new()];
        for _ in 0..len {
            out = out
                .into_iter()
                .flat_map(|s| {
                    letters.iter().map(move |l| {
                        let mut s2 = s.clone();
                        s2.push(l.clone());
                        s2
                    })
                })
                .collect();
        }
        out
    };
    let mut out = Vec::new();
    for s in 0..=max {
        for c in 1..=max {
            for stem in seqs(s) {
                for cycle in seqs(c) {
                    out.push(LassoWord {
                        stem: stem.clone(),
                        cycle,
                    });
                }
            }
        }
    }
    out
}

/// The label words (restricted to `props`) of all lassos of `g` from
/// `start` whose stem and cycle together have at most `max_len` nodes.
pub fn graph_lasso_words<G: LabelledGraph>(
    g: &G,
    start: usize,
    max_len: usize,
    props: &[String],
) -> BTreeSet<LassoWord> {
    let mut out = BTreeSet::new();
    let label = |q: usize| -> BTreeSet<String> {
        props.iter().filter(|p| g.holds(q, p)).cloned().collect()
    };
    let mut stack: Vec<Vec<usize>> = vec![vec![start]];
    while let Some(path) = stack.pop() {
        let last = *path.last().expect("non-empty");
        for &t in g.successors(last) {
            // Close the loop at any earlier occurrence of t.
            for (i, &q) in path.iter().enumerate() {
                if q == t {
                    out.insert(LassoWord {
                        stem: path[..i].iter().map(|&x| label(x)).collect(),
                        cycle: path[i..].iter().map(|&x| label(x)).collect(),
                    });
                }
            }
            if path.len() < max_len {
                let mut p2 = path.clone();
                p2.push(t);
                stack.push(p2);
            }
        }
    }
    out
}

/// Whether all lassos from `start` (up to the bound) satisfy `f`.
pub fn all_lassos_satisfy<G: LabelledGraph>(g: &G, start: usize, f: &Formula, max_len: usize) -> bool {
    let props: Vec<String> = f.propositions().into_iter().collect();
    graph_lasso_words(g, start, max_len, &props)
        .iter()
        .all(|w| eval_word(f, w))
}
