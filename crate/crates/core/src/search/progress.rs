//! Formula progression for detecting bad prefixes.
//!
//! A path `s0 s1 ...` satisfies `f` iff `s1 ...` satisfies `progress(f, s0)`.
//! Progressed obligations are kept in negation normal form with flattened,
//! sorted conjunctions and disjunctions so that equal obligations compare
//! equal and the set of obligations stays small.

use crate::logic::Formula;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) enum Ltl {
    Const(bool),
    Lit(String, bool),
    And(Vec<Ltl>),
    Or(Vec<Ltl>),
    Next(Box<Ltl>),
    Until(Box<Ltl>, Box<Ltl>),
    Release(Box<Ltl>, Box<Ltl>),
}

impl Ltl {
    /// Negation normal form of a quantifier-free path formula.
    pub(crate) fn from_formula(f: &Formula, positive: bool) -> Ltl {
        match f {
            Formula::True => Ltl::Const(positive),
            Formula::Prop(p) => Ltl::Lit(p.clone(), positive),
            Formula::Not(a) => Ltl::from_formula(a, !positive),
            Formula::Or(a, b) => {
                let (a, b) = (Ltl::from_formula(a, positive), Ltl::from_formula(b, positive));
                if positive {
                    or(vec![a, b])
                } else {
                    and(vec![a, b])
                }
            }
            Formula::Next(a) => Ltl::Next(Box::new(Ltl::from_formula(a, positive))),
            Formula::Until(a, b) => {
                let (a, b) = (Ltl::from_formula(a, positive), Ltl::from_formula(b, positive));
                if positive {
                    Ltl::Until(Box::new(a), Box::new(b))
                } else {
                    Ltl::Release(Box::new(a), Box::new(b))
                }
            }
            Formula::Coalition(..) => panic!("progression of a quantified formula"),
        }
    }

    /// The obligation left for the rest of the path after a node where
    /// exactly the propositions accepted by `holds` are true.
    pub(crate) fn progress(&self, holds: &impl Fn(&str) -> bool) -> Ltl {
        match self {
            Ltl::Const(b) => Ltl::Const(*b),
            Ltl::Lit(p, positive) => Ltl::Const(holds(p) == *positive),
            Ltl::And(xs) => and(xs.iter().map(|x| x.progress(holds)).collect()),
            Ltl::Or(xs) => or(xs.iter().map(|x| x.progress(holds)).collect()),
            Ltl::Next(a) => (**a).clone(),
            Ltl::Until(a, b) => or(vec![b.progress(holds), and(vec![a.progress(holds), self.clone()])]),
            Ltl::Release(a, b) => and(vec![b.progress(holds), or(vec![a.progress(holds), self.clone()])]),
        }
    }

    pub(crate) fn is_false(&self) -> bool {
        *self == Ltl::Const(false)
    }
}

fn junction(xs: Vec<Ltl>, conj: bool) -> Ltl {
    let mut flat = Vec::with_capacity(xs.len());
    for x in xs {
        match x {
            Ltl::Const(b) if b == conj => {}
            Ltl::Const(_) => return Ltl::Const(!conj),
            Ltl::And(ys) if conj => flat.extend(ys),
            Ltl::Or(ys) if !conj => flat.extend(ys),
            x => flat.push(x),
        }
    }
    flat.sort();
    flat.dedup();
    let contradicts = flat.windows(2).any(|w| matches!((&w[0], &w[1]), (Ltl::Lit(p, a), Ltl::Lit(q, b)) if p == q && a != b));
    if contradicts {
        return Ltl::Const(!conj);
    }
    match flat.len() {
        0 => Ltl::Const(conj),
        1 => flat.pop().unwrap(),
        _ if conj => Ltl::And(flat),
        _ => Ltl::Or(flat),
    }
}

fn and(xs: Vec<Ltl>) -> Ltl {
    junction(xs, true)
}

fn or(xs: Vec<Ltl>) -> Ltl {
    junction(xs, false)
}
