//! Reader for a deterministic, state-based subset of the HOA format.
//!
//! Supported: `States`, a single `Start`, `AP`, state-labelled acceptance
//! marks, explicit edge labels, and `Acceptance` conditions `t`, `f`,
//! `Inf(i)`, `Fin(i)` and Rabin disjunctions of `Fin(i)&Inf(j)`.

use super::native::Cursor;
use super::{AcceptanceCondition, OmegaAutomaton, Semiautomaton, StateSet};
use crate::alphabet::{ApSet, Letter};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
enum Label {
    True,
    False,
    Ap(usize),
    Not(Box<Label>),
    And(Box<Label>, Box<Label>),
    Or(Box<Label>, Box<Label>),
}

impl Label {
    fn eval(&self, l: Letter) -> bool {
        match self {
            Label::True => true,
            Label::False => false,
            Label::Ap(i) => l.contains(*i),
            Label::Not(a) => !a.eval(l),
            Label::And(a, b) => a.eval(l) && b.eval(l),
            Label::Or(a, b) => a.eval(l) || b.eval(l),
        }
    }
}

fn label_or(c: &mut Cursor, aps: usize) -> Result<Label> {
    let mut acc = label_and(c, aps)?;
    while c.eat("|") {
        acc = Label::Or(Box::new(acc), Box::new(label_and(c, aps)?));
    }
    Ok(acc)
}

fn label_and(c: &mut Cursor, aps: usize) -> Result<Label> {
    let mut acc = label_atom(c, aps)?;
    while c.eat("&") {
        acc = Label::And(Box::new(acc), Box::new(label_atom(c, aps)?));
    }
    Ok(acc)
}

fn label_atom(c: &mut Cursor, aps: usize) -> Result<Label> {
    if c.eat("!") {
        return Ok(Label::Not(Box::new(label_atom(c, aps)?)));
    }
    if c.eat("(") {
        let l = label_or(c, aps)?;
        c.expect(")")?;
        return Ok(l);
    }
    if c.eat("@") {
        return Err(Error::UnsupportedFeature("aliases".into()));
    }
    match c.peek() {
        Some(d) if d.is_ascii_digit() => {
            c.skip_ws();
            let col = c.col();
            let i = c.number()? as usize;
            if i >= aps {
                return Err(Error::parse(
                    c.line_no,
                    col,
                    format!("AP index {i} out of range"),
                ));
            }
            Ok(Label::Ap(i))
        }
        _ => match c.word() {
            Some("t") => Ok(Label::True),
            Some("f") => Ok(Label::False),
            _ => Err(c.err("expected a label expression")),
        },
    }
}

/// Acceptance formula as a disjunction of conjunctions of `Fin`/`Inf` atoms.
fn acceptance_dnf(c: &mut Cursor) -> Result<Vec<Vec<(bool, u32)>>> {
    let mut out = Vec::new();
    loop {
        let paren = c.eat("(");
        let mut conj = Vec::new();
        loop {
            let w = c.word().ok_or_else(|| c.err("expected Inf, Fin, t or f"))?;
            match w {
                "t" => {}
                "f" => conj.push((false, u32::MAX)),
                "Inf" | "Fin" => {
                    c.expect("(")?;
                    if c.eat("!") {
                        return Err(Error::UnsupportedFeature(
                            "complemented acceptance sets".into(),
                        ));
                    }
                    let i = c.number()?;
                    c.expect(")")?;
                    conj.push((w == "Inf", i));
                }
                other => {
                    return Err(Error::UnsupportedFeature(format!(
                        "acceptance atom `{other}`"
                    )))
                }
            }
            if !c.eat("&") {
                break;
            }
        }
        if paren {
            c.expect(")")?;
        }
        out.push(conj);
        if !c.eat("|") {
            return Ok(out);
        }
    }
}

fn marked(marks: &[StateSet], i: u32) -> StateSet {
    marks.get(i as usize).cloned().unwrap_or_default()
}

fn build_acceptance(
    dnf: &[Vec<(bool, u32)>],
    marks: &[StateSet],
    n: usize,
) -> Result<AcceptanceCondition> {
    let all: StateSet = (0..n as u32).collect();
    let unsupported = || {
        Error::UnsupportedFeature("acceptance condition outside Buchi, coBuchi and Rabin".into())
    };
    match dnf {
        [conj] if conj.is_empty() => return Ok(AcceptanceCondition::Buchi(all)),
        [conj] if conj == &[(false, u32::MAX)] => {
            return Ok(AcceptanceCondition::Buchi(StateSet::new()))
        }
        [conj] if conj.len() == 1 => {
            let (inf, i) = conj[0];
            let s = marked(marks, i);
            return Ok(if inf {
                AcceptanceCondition::Buchi(s)
            } else {
                AcceptanceCondition::CoBuchi(s)
            });
        }
        _ => {}
    }
    let mut pairs = Vec::new();
    for conj in dnf {
        let fins: Vec<u32> = conj
            .iter()
            .filter(|(inf, _)| !inf)
            .map(|&(_, i)| i)
            .collect();
        let infs: Vec<u32> = conj
            .iter()
            .filter(|(inf, _)| *inf)
            .map(|&(_, i)| i)
            .collect();
        if fins.len() > 1 || infs.len() > 1 || fins.contains(&u32::MAX) {
            return Err(unsupported());
        }
        let g = match infs.first() {
            Some(&i) => marked(marks, i),
            None => all.clone(),
        };
        let b = fins.first().map(|&i| marked(marks, i)).unwrap_or_default();
        pairs.push((g, b));
    }
    Ok(AcceptanceCondition::Rabin(pairs))
}

pub fn parse_hoa(text: &str) -> Result<OmegaAutomaton> {
    let mut states: Option<usize> = None;
    let mut start: Option<u32> = None;
    let mut ap_names: Option<Vec<String>> = None;
    let mut acc: Option<Vec<Vec<(bool, u32)>>> = None;
    let mut lines = text.lines().enumerate().peekable();
    let mut saw_version = false;

    for (i, raw) in lines.by_ref() {
        let line_no = i + 1;
        let mut c = Cursor::new(line_no, raw);
        if c.at_end() {
            continue;
        }
        if c.eat("--BODY--") {
            break;
        }
        if c.eat("HOA:") {
            saw_version = true;
        } else if c.eat("States:") {
            states = Some(c.number()? as usize);
        } else if c.eat("Start:") {
            if start.is_some() {
                return Err(Error::UnsupportedFeature("multiple initial states".into()));
            }
            start = Some(c.number()?);
            if !c.at_end() {
                return Err(Error::UnsupportedFeature(
                    "conjunctive initial states".into(),
                ));
            }
        } else if c.eat("AP:") {
            let k = c.number()? as usize;
            let mut names = Vec::new();
            for part in raw.split('"').skip(1).step_by(2) {
                names.push(part.to_string());
            }
            if names.len() != k {
                return Err(Error::parse(
                    line_no,
                    1,
                    format!("AP header declares {k} names, found {}", names.len()),
                ));
            }
            ap_names = Some(names);
        } else if c.eat("Acceptance:") {
            c.number()?;
            acc = Some(acceptance_dnf(&mut c)?);
        } else if c.eat("Alias:") {
            return Err(Error::UnsupportedFeature("aliases".into()));
        } else if c.eat("acc-name:") || c.eat("name:") || c.eat("tool:") || c.eat("properties:") {
            // informational
        } else if raw
            .trim_start()
            .starts_with(|ch: char| ch.is_ascii_alphabetic())
            && raw.contains(':')
        {
            // unknown headers with lower-case names may be ignored per the format
            let key = raw.trim_start().split(':').next().unwrap_or("");
            if key.starts_with(|ch: char| ch.is_ascii_uppercase()) {
                return Err(Error::UnsupportedFeature(format!("header `{key}`")));
            }
        } else {
            return Err(c.err("malformed header line"));
        }
    }
    if !saw_version {
        return Err(Error::parse(1, 1, "missing `HOA:` header"));
    }
    let n = states.ok_or_else(|| Error::parse(1, 1, "missing `States:` header"))?;
    if n == 0 {
        return Err(Error::Rejected("automaton has no states".into()));
    }
    let start = start.ok_or_else(|| Error::parse(1, 1, "missing `Start:` header"))?;
    let aps =
        ApSet::new(&ap_names.unwrap_or_default()).map_err(|e| Error::parse(1, 1, e.to_string()))?;
    let acc = acc.ok_or_else(|| Error::parse(1, 1, "missing `Acceptance:` header"))?;

    let sigma = aps.alphabet_size();
    let mut delta: Vec<Option<u32>> = vec![None; n * sigma];
    let mut marks: Vec<StateSet> = Vec::new();
    let mut current: Option<u32> = None;
    let mut ended = false;
    for (i, raw) in lines {
        let line_no = i + 1;
        let mut c = Cursor::new(line_no, raw);
        if c.at_end() {
            continue;
        }
        if c.eat("--END--") {
            ended = true;
            break;
        }
        if c.eat("State:") {
            if c.peek() == Some('[') {
                return Err(Error::UnsupportedFeature("state labels".into()));
            }
            c.skip_ws();
            let col = c.col();
            let q = c.number()?;
            if q as usize >= n {
                return Err(Error::parse(
                    line_no,
                    col,
                    format!("state {q} out of range"),
                ));
            }
            if c.peek() == Some('"') {
                c.skip_quoted()?;
            }
            if c.eat("{") {
                loop {
                    if c.eat("}") {
                        break;
                    }
                    let m = c.number()? as usize;
                    if marks.len() <= m {
                        marks.resize(m + 1, StateSet::new());
                    }
                    marks[m].insert(q);
                }
            }
            if !c.at_end() {
                return Err(c.err("unexpected trailing input"));
            }
            current = Some(q);
            continue;
        }
        let q = current.ok_or_else(|| c.err("edge before any `State:` line"))?;
        if !c.eat("[") {
            return Err(Error::UnsupportedFeature("implicit edge labels".into()));
        }
        let label = label_or(&mut c, aps.len())?;
        c.expect("]")?;
        c.skip_ws();
        let col = c.col();
        let t = c.number()?;
        if t as usize >= n {
            return Err(Error::parse(
                line_no,
                col,
                format!("state {t} out of range"),
            ));
        }
        if c.eat("&") {
            return Err(Error::UnsupportedFeature("alternation".into()));
        }
        if c.peek() == Some('{') {
            return Err(Error::UnsupportedFeature(
                "transition-based acceptance".into(),
            ));
        }
        if !c.at_end() {
            return Err(c.err("unexpected trailing input"));
        }
        for l in aps.letters() {
            if label.eval(l) {
                let slot = &mut delta[q as usize * sigma + l.index()];
                match *slot {
                    Some(prev) if prev != t => {
                        return Err(Error::UnsupportedFeature(format!(
                            "nondeterminism: state {q} has several successors on {}",
                            aps.format_letter(l)
                        )))
                    }
                    _ => *slot = Some(t),
                }
            }
        }
    }
    if !ended {
        return Err(Error::parse(
            text.lines().count().max(1),
            1,
            "missing `--END--`",
        ));
    }
    let mut table = Vec::with_capacity(delta.len());
    for (i, t) in delta.into_iter().enumerate() {
        table.push(t.ok_or_else(|| {
            Error::Rejected(format!(
                "missing transition for state {} on {}",
                i / sigma,
                aps.format_letter(Letter((i % sigma) as u32))
            ))
        })?);
    }
    let acceptance = build_acceptance(&acc, &marks, n)?;
    OmegaAutomaton::new(Semiautomaton::new(aps, n, table)?, start, acceptance)
}
