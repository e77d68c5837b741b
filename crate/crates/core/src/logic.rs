//! ATL* formulas: syntax tree, parser, printer and fragment classification.
//!
//! The tree keeps only `true`, propositions, negation, disjunction, `X`, `U`
//! and coalition quantifiers. The other connectives are desugared while
//! parsing: `a & b` is `!(!a | !b)`, `a -> b` is `!a | b`, `a <-> b` is
//! `(a -> b) & (b -> a)`, `F f` is `true U f`, `G f` is `!(true U !f)` and
//! `false` is `!true`. The printer recognizes these shapes again, so printing
//! and re-parsing gives back the same tree.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::model::Player;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    True,
    Prop(String),
    Not(Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Next(Box<Formula>),
    Until(Box<Formula>, Box<Formula>),
    /// `<<A>> f` with `A` sorted and free of duplicates.
    Coalition(Vec<Player>, Box<Formula>),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LogicError {
    #[error("empty formula")]
    Empty,
    #[error("column {column}: {message}")]
    Syntax { column: usize, message: String },
    #[error("proposition {0} is reserved for internal use")]
    Reserved(String),
    #[error("proposition {0} already occurs in the formula")]
    PropOccurs(String),
    #[error("subformula {0} does not occur in the formula")]
    TargetAbsent(String),
}

impl Formula {
    pub fn prop(name: &str) -> Formula {
        Formula::Prop(name.to_string())
    }

    pub fn falsum() -> Formula {
        Formula::not(Formula::True)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::not(Formula::or(Formula::not(a), Formula::not(b)))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::or(Formula::not(a), b)
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::and(
            Formula::implies(a.clone(), b.clone()),
            Formula::implies(b, a),
        )
    }

    pub fn next(f: Formula) -> Formula {
        Formula::Next(Box::new(f))
    }

    pub fn until(a: Formula, b: Formula) -> Formula {
        Formula::Until(Box::new(a), Box::new(b))
    }

    pub fn eventually(f: Formula) -> Formula {
        Formula::until(Formula::True, f)
    }

    pub fn globally(f: Formula) -> Formula {
        Formula::not(Formula::eventually(Formula::not(f)))
    }

    /// `<<coalition>> body`; the coalition is sorted and deduplicated.
    pub fn coalition(players: impl IntoIterator<Item = Player>, body: Formula) -> Formula {
        let set: BTreeSet<Player> = players.into_iter().collect();
        Formula::Coalition(set.into_iter().collect(), Box::new(body))
    }

    /// `Some(g)` when `self` is `G g`, i.e. `!(true U !g)`.
    pub fn as_globally(&self) -> Option<&Formula> {
        match self {
            Formula::Not(inner) => match inner.as_ref() {
                Formula::Until(a, b) if **a == Formula::True => match b.as_ref() {
                    Formula::Not(g) => Some(g),
                    _ => None,
                },
                _ => None,
            },
            _ => None,
        }
    }

    /// `Some((a, b))` when `self` is `a & b`, i.e. `!(!a | !b)`.
    pub fn as_and(&self) -> Option<(&Formula, &Formula)> {
        match self {
            Formula::Not(inner) => match inner.as_ref() {
                Formula::Or(l, r) => match (l.as_ref(), r.as_ref()) {
                    (Formula::Not(a), Formula::Not(b)) => Some((a, b)),
                    _ => None,
                },
                _ => None,
            },
            _ => None,
        }
    }

    pub fn has_coalition(&self) -> bool {
        match self {
            Formula::True | Formula::Prop(_) => false,
            Formula::Coalition(..) => true,
            Formula::Not(a) | Formula::Next(a) => a.has_coalition(),
            Formula::Or(a, b) | Formula::Until(a, b) => a.has_coalition() || b.has_coalition(),
        }
    }

    pub fn has_temporal(&self) -> bool {
        match self {
            Formula::True | Formula::Prop(_) => false,
            Formula::Next(_) | Formula::Until(..) => true,
            Formula::Not(a) | Formula::Coalition(_, a) => a.has_temporal(),
            Formula::Or(a, b) => a.has_temporal() || b.has_temporal(),
        }
    }

    pub fn is_propositional(&self) -> bool {
        !self.has_coalition() && !self.has_temporal()
    }

    /// State formulas are built from propositions with Boolean connectives
    /// and quantifiers; anything with a temporal operator outside a
    /// quantifier is a path formula.
    pub fn is_state_formula(&self) -> bool {
        match self {
            Formula::True | Formula::Prop(_) | Formula::Coalition(..) => true,
            Formula::Not(a) => a.is_state_formula(),
            Formula::Or(a, b) => a.is_state_formula() && b.is_state_formula(),
            Formula::Next(_) | Formula::Until(..) => false,
        }
    }

    pub fn propositions(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_props(&mut out);
        out
    }

    fn collect_props(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::True => {}
            Formula::Prop(p) => {
                out.insert(p.clone());
            }
            Formula::Not(a) | Formula::Next(a) | Formula::Coalition(_, a) => a.collect_props(out),
            Formula::Or(a, b) | Formula::Until(a, b) => {
                a.collect_props(out);
                b.collect_props(out);
            }
        }
    }

    pub fn players(&self) -> BTreeSet<Player> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Formula::Coalition(a, _) = f {
                out.extend(a.iter().copied());
            }
        });
        out
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_| n += 1);
        n
    }

    /// Pre-order traversal.
    pub fn visit(&self, f: &mut impl FnMut(&Formula)) {
        f(self);
        match self {
            Formula::True | Formula::Prop(_) => {}
            Formula::Not(a) | Formula::Next(a) | Formula::Coalition(_, a) => a.visit(f),
            Formula::Or(a, b) | Formula::Until(a, b) => {
                a.visit(f);
                b.visit(f);
            }
        }
    }

    fn replace(&self, target: &Formula, with: &Formula, hit: &mut bool) -> Formula {
        if self == target {
            *hit = true;
            return with.clone();
        }
        match self {
            Formula::True | Formula::Prop(_) => self.clone(),
            Formula::Not(a) => Formula::not(a.replace(target, with, hit)),
            Formula::Next(a) => Formula::next(a.replace(target, with, hit)),
            Formula::Coalition(p, a) => {
                Formula::Coalition(p.clone(), Box::new(a.replace(target, with, hit)))
            }
            Formula::Or(a, b) => {
                Formula::or(a.replace(target, with, hit), b.replace(target, with, hit))
            }
            Formula::Until(a, b) => {
                Formula::until(a.replace(target, with, hit), b.replace(target, with, hit))
            }
        }
    }
}

fn write_atom(f: &Formula, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    if *f == Formula::falsum() {
        return write!(out, "false");
    }
    if let Some(g) = f.as_globally() {
        write!(out, "G ")?;
        return write_atom(g, out);
    }
    if let Some((a, b)) = f.as_and() {
        write!(out, "(")?;
        write_atom(a, out)?;
        write!(out, " & ")?;
        write_atom(b, out)?;
        return write!(out, ")");
    }
    match f {
        Formula::True => write!(out, "true"),
        Formula::Prop(p) => write!(out, "{p}"),
        Formula::Not(a) => {
            write!(out, "!")?;
            write_atom(a, out)
        }
        Formula::Or(a, b) => {
            write!(out, "(")?;
            if let Formula::Not(na) = a.as_ref() {
                write_atom(na, out)?;
                write!(out, " -> ")?;
            } else {
                write_atom(a, out)?;
                write!(out, " | ")?;
            }
            write_atom(b, out)?;
            write!(out, ")")
        }
        Formula::Next(a) => {
            write!(out, "X ")?;
            write_atom(a, out)
        }
        Formula::Until(a, b) if **a == Formula::True => {
            write!(out, "F ")?;
            write_atom(b, out)
        }
        Formula::Until(a, b) => {
            write!(out, "(")?;
            write_atom(a, out)?;
            write!(out, " U ")?;
            write_atom(b, out)?;
            write!(out, ")")
        }
        Formula::Coalition(players, body) => {
            let list: Vec<String> = players.iter().map(|p| p.to_string()).collect();
            write!(out, "<<{}>> ", list.join(","))?;
            write_atom(body, out)
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_atom(self, f)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Num(usize),
    Not,
    And,
    Or,
    Implies,
    Iff,
    LParen,
    RParen,
    LAngle,
    RAngle,
    Comma,
}

fn is_prop_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '.' || c == '\'' || c == '@'
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>, LogicError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let syntax = |column: usize, message: String| LogicError::Syntax { column, message };
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        let rest: String = chars[i..chars.len().min(i + 3)].iter().collect();
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let (tok, len) = if rest.starts_with("<->") {
            (Tok::Iff, 3)
        } else if rest.starts_with("->") {
            (Tok::Implies, 2)
        } else if rest.starts_with("<<") {
            (Tok::LAngle, 2)
        } else if rest.starts_with(">>") {
            (Tok::RAngle, 2)
        } else {
            match c {
                '!' => (Tok::Not, 1),
                '&' => (Tok::And, 1),
                '|' => (Tok::Or, 1),
                '(' => (Tok::LParen, 1),
                ')' => (Tok::RParen, 1),
                ',' => (Tok::Comma, 1),
                c if is_prop_char(c) => {
                    let mut j = i;
                    while j < chars.len() && is_prop_char(chars[j]) {
                        j += 1;
                    }
                    let word: String = chars[i..j].iter().collect();
                    let tok = if word.chars().all(|c| c.is_ascii_digit()) {
                        Tok::Num(word.parse().map_err(|_| syntax(col, format!("number {word} out of range")))?)
                    } else {
                        Tok::Ident(word)
                    };
                    (tok, j - i)
                }
                other => return Err(syntax(col, format!("unexpected character `{other}`"))),
            }
        };
        out.push((tok, col));
        i += len;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
    allow_reserved: bool,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(_, c)| *c)
    }

    fn error(&self, message: impl Into<String>) -> LogicError {
        LogicError::Syntax {
            column: self.col(),
            message: message.into(),
        }
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(w)) if w == kw)
    }

    fn expr(&mut self) -> Result<Formula, LogicError> {
        let mut left = self.implication()?;
        while self.eat(&Tok::Iff) {
            let right = self.implication()?;
            left = Formula::iff(left, right);
        }
        Ok(left)
    }

    fn implication(&mut self) -> Result<Formula, LogicError> {
        let left = self.disjunction()?;
        if self.eat(&Tok::Implies) {
            let right = self.implication()?;
            return Ok(Formula::implies(left, right));
        }
        Ok(left)
    }

    fn disjunction(&mut self) -> Result<Formula, LogicError> {
        let mut left = self.conjunction()?;
        while self.eat(&Tok::Or) {
            let right = self.conjunction()?;
            left = Formula::or(left, right);
        }
        Ok(left)
    }

    fn conjunction(&mut self) -> Result<Formula, LogicError> {
        let mut left = self.unary()?;
        while self.eat(&Tok::And) {
            let right = self.unary()?;
            left = Formula::and(left, right);
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<Formula, LogicError> {
        if self.eat(&Tok::Not) {
            return Ok(Formula::not(self.unary()?));
        }
        for (kw, build) in [
            ("X", Formula::next as fn(Formula) -> Formula),
            ("G", Formula::globally),
            ("F", Formula::eventually),
        ] {
            if self.is_keyword(kw) {
                self.pos += 1;
                return Ok(build(self.unary()?));
            }
        }
        if self.eat(&Tok::LAngle) {
            let mut players = Vec::new();
            if !self.eat(&Tok::RAngle) {
                loop {
                    match self.peek() {
                        Some(Tok::Num(n)) if *n >= 1 => {
                            players.push(Player(*n));
                            self.pos += 1;
                        }
                        _ => return Err(self.error("expected a player index (1, 2, ...)")),
                    }
                    if self.eat(&Tok::RAngle) {
                        break;
                    }
                    if !self.eat(&Tok::Comma) {
                        return Err(self.error("expected `,` or `>>`"));
                    }
                }
            }
            return Ok(Formula::coalition(players, self.unary()?));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Formula, LogicError> {
        match self.peek().cloned() {
            Some(Tok::LParen) => {
                self.pos += 1;
                let left = self.expr()?;
                let f = if self.is_keyword("U") {
                    self.pos += 1;
                    let right = self.expr()?;
                    Formula::until(left, right)
                } else {
                    left
                };
                if !self.eat(&Tok::RParen) {
                    return Err(self.error(if self.is_keyword("U") {
                        "`U` must be parenthesized: write `((a U b) U c)`"
                    } else {
                        "expected `)`"
                    }));
                }
                Ok(f)
            }
            Some(Tok::Ident(w)) => {
                match w.as_str() {
                    "true" => {
                        self.pos += 1;
                        return Ok(Formula::True);
                    }
                    "false" => {
                        self.pos += 1;
                        return Ok(Formula::falsum());
                    }
                    "U" => return Err(self.error("`U` must be written inside parentheses: `(a U b)`")),
                    _ => {}
                }
                if w.starts_with('@') && !self.allow_reserved {
                    return Err(LogicError::Reserved(w));
                }
                self.pos += 1;
                Ok(Formula::Prop(w))
            }
            Some(Tok::Num(n)) => Err(self.error(format!("unexpected number {n}"))),
            Some(_) => Err(self.error("expected a formula")),
            None => Err(self.error("unexpected end of formula")),
        }
    }
}

fn parse_with(text: &str, allow_reserved: bool) -> Result<Formula, LogicError> {
    let toks = tokenize(text)?;
    if toks.is_empty() {
        return Err(LogicError::Empty);
    }
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.chars().count() + 1,
        allow_reserved,
    };
    let f = p.expr()?;
    if p.pos < p.toks.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(f)
}

/// Parses a formula.
///
/// Precedence from tightest: `!`, then `X`/`G`/`F`/`<<A>>`, then `&`, `|`,
/// `->` (right associative) and `<->`. `U` must be parenthesized.
/// Propositions starting with `@` are reserved for the checker.
pub fn parse_formula(text: &str) -> Result<Formula, LogicError> {
    parse_with(text, false)
}

/// Like [`parse_formula`], but accepts the reserved `@` propositions.
pub fn parse_formula_internal(text: &str) -> Result<Formula, LogicError> {
    parse_with(text, true)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FragmentTag {
    Propositional,
    Ltl,
    Atl0,
    Atl,
    Atl0Star,
    AtlStar,
}

impl FragmentTag {
    /// Language inclusion between fragments.
    pub fn within(self, other: FragmentTag) -> bool {
        use FragmentTag::*;
        match self {
            Propositional => true,
            Ltl => matches!(other, Ltl | AtlStar),
            Atl0 => matches!(other, Atl0 | Atl | Atl0Star | AtlStar),
            Atl => matches!(other, Atl | AtlStar),
            Atl0Star => matches!(other, Atl0Star | AtlStar),
            AtlStar => other == AtlStar,
        }
    }
}

impl fmt::Display for FragmentTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FragmentTag::Propositional => "PROPOSITIONAL",
            FragmentTag::Ltl => "LTL",
            FragmentTag::Atl0 => "ATL0",
            FragmentTag::Atl => "ATL",
            FragmentTag::Atl0Star => "ATL0_STAR",
            FragmentTag::AtlStar => "ATL_STAR",
        };
        f.write_str(s)
    }
}

/// The three temporal shapes allowed directly under an ATL quantifier.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AtlShape<'a> {
    Next(&'a Formula),
    Globally(&'a Formula),
    Until(&'a Formula, &'a Formula),
}

/// Matches `X a`, `G a` or `(a U b)`. `G` is checked before `U`, so the
/// desugared `!(true U !a)` is reported as `Globally(a)`.
pub fn atl_shape(body: &Formula) -> Option<AtlShape<'_>> {
    if let Some(g) = body.as_globally() {
        return Some(AtlShape::Globally(g));
    }
    match body {
        Formula::Next(a) => Some(AtlShape::Next(a)),
        Formula::Until(a, b) => Some(AtlShape::Until(a, b)),
        _ => None,
    }
}

fn is_atl(f: &Formula) -> bool {
    match f {
        Formula::True | Formula::Prop(_) => true,
        Formula::Not(a) => is_atl(a),
        Formula::Or(a, b) => is_atl(a) && is_atl(b),
        Formula::Next(_) | Formula::Until(..) => false,
        Formula::Coalition(_, body) => match atl_shape(body) {
            Some(AtlShape::Next(a)) | Some(AtlShape::Globally(a)) => is_atl(a),
            Some(AtlShape::Until(a, b)) => is_atl(a) && is_atl(b),
            None => false,
        },
    }
}

/// The least fragment containing `f`.
pub fn classify(f: &Formula) -> FragmentTag {
    if !f.has_coalition() {
        return if f.has_temporal() {
            FragmentTag::Ltl
        } else {
            FragmentTag::Propositional
        };
    }
    if let Formula::Coalition(_, body) = f {
        if !body.has_coalition() {
            let atl0 = match atl_shape(body) {
                Some(AtlShape::Next(a)) | Some(AtlShape::Globally(a)) => a.is_propositional(),
                Some(AtlShape::Until(a, b)) => a.is_propositional() && b.is_propositional(),
                None => false,
            };
            return if atl0 {
                FragmentTag::Atl0
            } else {
                FragmentTag::Atl0Star
            };
        }
    }
    if is_atl(f) {
        FragmentTag::Atl
    } else {
        FragmentTag::AtlStar
    }
}

/// Quantified subformulas in post-order, left to right, without repeats.
pub fn strategic_subformulas(f: &Formula) -> Vec<Formula> {
    fn go(f: &Formula, out: &mut Vec<Formula>) {
        match f {
            Formula::True | Formula::Prop(_) => {}
            Formula::Not(a) | Formula::Next(a) => go(a, out),
            Formula::Or(a, b) | Formula::Until(a, b) => {
                go(a, out);
                go(b, out);
            }
            Formula::Coalition(_, a) => {
                go(a, out);
                if !out.contains(f) {
                    out.push(f.clone());
                }
            }
        }
    }
    let mut out = Vec::new();
    go(f, &mut out);
    out
}

/// Replaces every occurrence of `target` by the proposition `prop`.
pub fn substitute(f: &Formula, target: &Formula, prop: &str) -> Result<Formula, LogicError> {
    if f.propositions().contains(prop) {
        return Err(LogicError::PropOccurs(prop.to_string()));
    }
    let mut hit = false;
    let out = f.replace(target, &Formula::prop(prop), &mut hit);
    if !hit {
        return Err(LogicError::TargetAbsent(target.to_string()));
    }
    Ok(out)
}
