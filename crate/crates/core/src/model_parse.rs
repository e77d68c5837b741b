use std::collections::HashMap;

use crate::model::{is_identifier, GameModel, GameModelBuilder, ModelError, Player, Violation};

#[derive(Clone, Debug)]
struct Tok {
    text: String,
    line: usize,
    col: usize,
}

fn err(tok: &Tok, message: impl Into<String>) -> ModelError {
    ModelError::Parse {
        line: tok.line,
        column: tok.col,
        message: message.into(),
    }
}

fn tokenize(line_no: usize, line: &str) -> Vec<Tok> {
    let line = line.split('#').next().unwrap_or("");
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut start = 0;
    for (i, c) in line.chars().enumerate() {
        let col = i + 1;
        if c.is_whitespace() || "(),{}".contains(c) {
            if !cur.is_empty() {
                out.push(Tok {
                    text: std::mem::take(&mut cur),
                    line: line_no,
                    col: start,
                });
            }
            if !c.is_whitespace() {
                out.push(Tok {
                    text: c.to_string(),
                    line: line_no,
                    col,
                });
            }
        } else {
            if cur.is_empty() {
                start = col;
            }
            cur.push(c);
        }
    }
    if !cur.is_empty() {
        out.push(Tok {
            text: cur,
            line: line_no,
            col: start,
        });
    }
    out
}

enum Stmt {
    Players(Tok, usize),
    Actions(Vec<Tok>),
    State(Tok, Vec<Tok>),
    Legal(Tok, Tok, Vec<Tok>),
    Trans(Tok, Vec<Tok>, Tok),
    Obs(Tok, Vec<Vec<Tok>>),
}

fn ident(tok: &Tok, what: &str) -> Result<(), ModelError> {
    if is_identifier(&tok.text) {
        Ok(())
    } else {
        Err(err(tok, format!("invalid {what} identifier `{}`", tok.text)))
    }
}

fn parse_stmt(toks: Vec<Tok>) -> Result<Stmt, ModelError> {
    let head = &toks[0];
    let rest = &toks[1..];
    let end_col = |t: &Tok| Tok {
        text: String::new(),
        line: t.line,
        col: t.col + t.text.len(),
    };
    match head.text.as_str() {
        "players" => {
            let [n] = rest else {
                return Err(err(head, "expected `players <n>`"));
            };
            let count: usize = n
                .text
                .parse()
                .map_err(|_| err(n, format!("expected a player count, found `{}`", n.text)))?;
            if count == 0 {
                return Err(err(n, "a model needs at least one player"));
            }
            Ok(Stmt::Players(head.clone(), count))
        }
        "actions" => {
            if rest.is_empty() {
                return Err(err(&end_col(head), "expected at least one action"));
            }
            for t in rest {
                ident(t, "action")?;
            }
            Ok(Stmt::Actions(rest.to_vec()))
        }
        "state" => {
            let Some((name, tail)) = rest.split_first() else {
                return Err(err(&end_col(head), "expected a state name"));
            };
            ident(name, "state")?;
            let props = match tail.split_first() {
                None => Vec::new(),
                Some((kw, props)) if kw.text == "props" => {
                    if props.is_empty() {
                        return Err(err(&end_col(kw), "expected at least one proposition"));
                    }
                    for p in props {
                        ident(p, "proposition")?;
                        if p.text.starts_with('@') {
                            return Err(err(p, "propositions starting with `@` are reserved"));
                        }
                    }
                    props.to_vec()
                }
                Some((t, _)) => return Err(err(t, format!("expected `props`, found `{}`", t.text))),
            };
            Ok(Stmt::State(name.clone(), props))
        }
        "legal" => {
            if rest.len() < 3 {
                return Err(err(head, "expected `legal <state> <player> <action>+`"));
            }
            ident(&rest[0], "state")?;
            for t in &rest[2..] {
                ident(t, "action")?;
            }
            Ok(Stmt::Legal(rest[0].clone(), rest[1].clone(), rest[2..].to_vec()))
        }
        "trans" => {
            let Some((src, tail)) = rest.split_first() else {
                return Err(err(&end_col(head), "expected a source state"));
            };
            ident(src, "state")?;
            let mut it = tail.iter();
            match it.next() {
                Some(t) if t.text == "(" => {}
                Some(t) => return Err(err(t, format!("expected `(`, found `{}`", t.text))),
                None => return Err(err(&end_col(src), "expected `(`")),
            }
            let mut actions = Vec::new();
            loop {
                let Some(a) = it.next() else {
                    return Err(err(&end_col(src), "unterminated move"));
                };
                ident(a, "action")?;
                actions.push(a.clone());
                match it.next() {
                    Some(t) if t.text == "," => continue,
                    Some(t) if t.text == ")" => break,
                    Some(t) => return Err(err(t, format!("expected `,` or `)`, found `{}`", t.text))),
                    None => return Err(err(&end_col(a), "unterminated move")),
                }
            }
            let Some(target) = it.next() else {
                return Err(err(&end_col(tail.last().unwrap_or(src)), "expected a target state"));
            };
            ident(target, "state")?;
            if let Some(extra) = it.next() {
                return Err(err(extra, format!("unexpected `{}`", extra.text)));
            }
            Ok(Stmt::Trans(src.clone(), actions, target.clone()))
        }
        "obs" => {
            let Some((player, tail)) = rest.split_first() else {
                return Err(err(&end_col(head), "expected a player index"));
            };
            let mut classes = Vec::new();
            let mut it = tail.iter();
            while let Some(open) = it.next() {
                if open.text != "{" {
                    return Err(err(open, format!("expected `{{`, found `{}`", open.text)));
                }
                let mut members = Vec::new();
                loop {
                    match it.next() {
                        Some(t) if t.text == "}" => break,
                        Some(t) => {
                            ident(t, "state")?;
                            members.push(t.clone());
                        }
                        None => return Err(err(open, "unterminated observation class")),
                    }
                }
                if members.is_empty() {
                    return Err(err(open, "empty observation class"));
                }
                classes.push(members);
            }
            if classes.is_empty() {
                return Err(err(player, "expected at least one observation class"));
            }
            Ok(Stmt::Obs(player.clone(), classes))
        }
        other => Err(err(head, format!("unknown directive `{other}`"))),
    }
}

fn player_index(tok: &Tok, players: usize) -> Result<usize, ModelError> {
    match tok.text.parse::<usize>() {
        Ok(p) if p >= 1 && p <= players => Ok(p),
        Ok(p) => Err(err(tok, format!("undeclared player {p}"))),
        Err(_) => Err(err(tok, format!("expected a player index, found `{}`", tok.text))),
    }
}

pub(crate) fn parse(text: &str) -> Result<GameModel, ModelError> {
    let mut stmts = Vec::new();
    let mut header_seen = false;
    for (i, line) in text.lines().enumerate() {
        let toks = tokenize(i + 1, line);
        if toks.is_empty() {
            continue;
        }
        if !header_seen {
            if toks[0].text != "cgm" || toks.len() != 1 {
                return Err(err(&toks[0], "expected header line `cgm`"));
            }
            header_seen = true;
            continue;
        }
        stmts.push(parse_stmt(toks)?);
    }
    if !header_seen {
        return Err(ModelError::Parse {
            line: 1,
            column: 1,
            message: "expected header line `cgm`".into(),
        });
    }

    // Declarations first, so that later directives may appear in any order.
    let mut players = None;
    let mut actions: HashMap<String, Tok> = HashMap::new();
    let mut action_order = Vec::new();
    let mut states: HashMap<String, Tok> = HashMap::new();
    let mut state_order = Vec::new();
    for st in &stmts {
        match st {
            Stmt::Players(tok, n) => {
                if players.replace(*n).is_some() {
                    return Err(err(tok, "duplicate `players` line"));
                }
            }
            Stmt::Actions(list) => {
                for a in list {
                    if actions.insert(a.text.clone(), a.clone()).is_some() {
                        return Err(err(a, format!("duplicate action {}", a.text)));
                    }
                    action_order.push(a.text.clone());
                }
            }
            Stmt::State(name, props) => {
                if states.insert(name.text.clone(), name.clone()).is_some() {
                    return Err(err(name, format!("duplicate state {}", name.text)));
                }
                state_order.push((name.text.clone(), props.iter().map(|p| p.text.clone()).collect::<Vec<_>>()));
            }
            _ => {}
        }
    }
    let Some(players) = players else {
        return Err(ModelError::Parse {
            line: 1,
            column: 1,
            message: "missing `players` line".into(),
        });
    };
    if state_order.is_empty() {
        return Err(ModelError::Parse {
            line: 1,
            column: 1,
            message: "a model needs at least one state".into(),
        });
    }

    let mut b = GameModelBuilder::new(players);
    b.actions(action_order.iter().map(String::as_str));
    for (name, props) in &state_order {
        b.state(name, props.iter().map(String::as_str));
    }

    let check_state = |t: &Tok| -> Result<(), ModelError> {
        if states.contains_key(&t.text) {
            Ok(())
        } else {
            Err(err(t, format!("undeclared state {}", t.text)))
        }
    };
    let check_action = |t: &Tok| -> Result<(), ModelError> {
        if actions.contains_key(&t.text) {
            Ok(())
        } else {
            Err(err(t, format!("undeclared action {}", t.text)))
        }
    };

    let mut legal: HashMap<(String, usize), Vec<String>> = HashMap::new();
    for st in &stmts {
        if let Stmt::Legal(s, p, acts) = st {
            check_state(s)?;
            let j = player_index(p, players)?;
            let mut names = Vec::new();
            for a in acts {
                check_action(a)?;
                if names.contains(&a.text) {
                    return Err(err(a, format!("duplicate action {} in legal set", a.text)));
                }
                names.push(a.text.clone());
            }
            if legal.insert((s.text.clone(), j), names.clone()).is_some() {
                return Err(err(
                    s,
                    format!("legal actions of player {j} at {} declared twice", s.text),
                ));
            }
            b.legal(&s.text, j, names.iter().map(String::as_str));
        }
    }

    let mut seen_moves: HashMap<(String, Vec<String>), usize> = HashMap::new();
    for st in &stmts {
        if let Stmt::Trans(s, acts, t) = st {
            check_state(s)?;
            check_state(t)?;
            if acts.len() != players {
                return Err(err(
                    s,
                    format!("move has {} components, expected {players}", acts.len()),
                ));
            }
            for (j, a) in acts.iter().enumerate() {
                check_action(a)?;
                let ok = legal
                    .get(&(s.text.clone(), j + 1))
                    .is_some_and(|l| l.contains(&a.text));
                if !ok {
                    return Err(err(
                        a,
                        format!("action {} not legal for player {} at {}", a.text, j + 1, s.text),
                    ));
                }
            }
            let names: Vec<String> = acts.iter().map(|a| a.text.clone()).collect();
            if let Some(prev) = seen_moves.insert((s.text.clone(), names.clone()), s.line) {
                return Err(err(
                    s,
                    format!(
                        "duplicate transition for ({}) at {} (first given on line {prev})",
                        names.join(","),
                        s.text
                    ),
                ));
            }
            let refs: Vec<&str> = names.iter().map(String::as_str).collect();
            b.trans(&s.text, &refs, &t.text);
        }
    }

    let mut obs_lines: HashMap<usize, Tok> = HashMap::new();
    for st in &stmts {
        if let Stmt::Obs(p, classes) = st {
            let j = player_index(p, players)?;
            if obs_lines.insert(j, p.clone()).is_some() {
                return Err(err(p, format!("observation partition of player {j} declared twice")));
            }
            for c in classes {
                for s in c {
                    check_state(s)?;
                }
            }
            let names: Vec<Vec<&str>> = classes
                .iter()
                .map(|c| c.iter().map(|t| t.text.as_str()).collect())
                .collect();
            b.obs(j, &names);
        }
    }

    let model = b.build_unchecked()?;
    if let Some(v) = model.validate().into_iter().next() {
        let tok = match &v {
            Violation::EmptyLegal { state, .. } | Violation::MissingTransition { state, .. } => {
                states[state].clone()
            }
            Violation::PartitionGap { player, .. }
            | Violation::PartitionOverlap { player, .. }
            | Violation::EmptyClass { player, .. }
            | Violation::NonUniform { player, .. } => obs_lines[&Player::index(*player).saturating_add(1)].clone(),
        };
        return Err(err(&tok, v.to_string()));
    }
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::parse_model;

    pub const FIG1: &str = "\
cgm
players 2
actions a b c
state s0 props q
state s1 props p q
legal s0 1 a b
legal s0 2 a b
legal s1 1 c
legal s1 2 c
trans s0 (a,a) s1
trans s0 (b,b) s1
trans s0 (a,b) s0
trans s0 (b,a) s0
trans s1 (c,c) s1
";

    #[test]
    fn parses_fig1() {
        let m = parse_model(FIG1).unwrap();
        assert_eq!(m.state_count(), 2);
        assert_eq!(m.player_count(), 2);
        assert_eq!(m.action_names(), &["a", "b", "c"]);
        let s1 = m.state_id("s1").unwrap();
        assert_eq!(
            m.label(s1).iter().cloned().collect::<Vec<_>>(),
            vec!["p".to_string(), "q".to_string()]
        );
    }

    #[test]
    fn illegal_action_names_player_and_state() {
        let text = format!("{FIG1}trans s0 (a,c) s1\n");
        let e = parse_model(&text).unwrap_err();
        assert!(
            e.to_string().contains("action c not legal for player 2 at s0"),
            "{e}"
        );
        assert!(matches!(e, ModelError::Parse { line: 15, .. }));
    }

    #[test]
    fn duplicate_transition() {
        let text = format!("{FIG1}trans s0 (a,a) s0\n");
        let e = parse_model(&text).unwrap_err();
        assert!(e.to_string().contains("duplicate transition"), "{e}");
    }

    #[test]
    fn missing_transition_names_state_line() {
        let text = FIG1.replace("trans s0 (b,a) s0\n", "");
        let e = parse_model(&text).unwrap_err();
        assert!(e.to_string().contains("missing transition for legal move (b,a) at s0"), "{e}");
        assert!(matches!(e, ModelError::Parse { line: 4, .. }));
    }

    #[test]
    fn undeclared_references() {
        let e = parse_model(&FIG1.replace("trans s1 (c,c) s1", "trans s1 (c,c) s9")).unwrap_err();
        assert!(e.to_string().contains("undeclared state s9"), "{e}");
        let e = parse_model(&FIG1.replace("legal s1 2 c", "legal s1 3 c")).unwrap_err();
        assert!(e.to_string().contains("undeclared player 3"), "{e}");
        let e = parse_model(&FIG1.replace("legal s1 2 c", "legal s1 2 d")).unwrap_err();
        assert!(e.to_string().contains("undeclared action d"), "{e}");
    }

    #[test]
    fn empty_legal_set() {
        let text = FIG1.replace("legal s1 2 c\n", "").replace("trans s1 (c,c) s1\n", "");
        let e = parse_model(&text).unwrap_err();
        assert!(e.to_string().contains("empty legal set for player 2 at s1"), "{e}");
    }

    #[test]
    fn nonuniform_observation_class() {
        let text = format!("{FIG1}obs 1 {{ s0 s1 }}\n");
        let e = parse_model(&text).unwrap_err();
        assert!(e.to_string().contains("indistinguishable"), "{e}");
        assert!(matches!(e, ModelError::Parse { line: 15, .. }));
    }

    #[test]
    fn syntax_errors_carry_columns() {
        let e = parse_model("cgm\nplayers 1\nactions a\nstate s\nlegal s 1 a\ntrans s (a s\n").unwrap_err();
        assert!(matches!(e, ModelError::Parse { line: 6, .. }), "{e}");
        let e = parse_model("cgx\n").unwrap_err();
        assert!(matches!(e, ModelError::Parse { line: 1, column: 1, .. }));
        let e = parse_model("cgm\nplayers 1\nfoo bar\n").unwrap_err();
        assert!(e.to_string().contains("unknown directive"), "{e}");
        let e = parse_model("cgm\nplayers 1\nactions a\nstate s props @1\n").unwrap_err();
        assert!(e.to_string().contains("reserved"), "{e}");
    }

    #[test]
    fn comments_and_spacing() {
        let text = "# leading comment\ncgm # header\nplayers 1\nactions a\nstate s props p # labelled\nlegal s 1 a\ntrans s ( a ) s\n";
        let m = parse_model(text).unwrap();
        assert!(m.has_prop(0, "p"));
    }

    #[test]
    fn serialization_roundtrip() {
        let m = parse_model(FIG1).unwrap();
        let again = parse_model(&m.serialize()).unwrap();
        assert_eq!(m, again);
        let with_obs = format!("{FIG1}obs 2 {{ s1 }} {{ s0 }}\n");
        let m = parse_model(&with_obs).unwrap();
        assert_eq!(m, parse_model(&m.serialize()).unwrap());
    }
}
