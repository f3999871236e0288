//! Native text format.
//!
//! ```text
//! AP: p q
//! States: 2
//! Initial: 0
//! Acceptance: Buchi {1}
//! 0 {} -> 0
//! 0 {p} -> 1
//! ...
//! ```
//!
//! Acceptance is one of `Buchi {..}`, `CoBuchi {..}`, `Rabin ({G};{B}) ...`
//! or `Muller {..} {..} ...`. Every (state, letter) pair needs exactly one
//! transition line. `#` starts a comment.

use std::fmt::Write;

use super::{AcceptanceCondition, OmegaAutomaton, Semiautomaton, StateSet};
use crate::alphabet::ApSet;
use crate::error::{Error, Result};

/// Byte cursor over one line, reporting 1-based columns.
pub(crate) struct Cursor<'a> {
    pub line_no: usize,
    text: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    pub fn new(line_no: usize, text: &'a str) -> Self {
        Cursor {
            line_no,
            text,
            pos: 0,
        }
    }

    pub fn err(&self, msg: impl Into<String>) -> Error {
        Error::parse(self.line_no, self.pos + 1, msg)
    }

    pub fn skip_ws(&mut self) {
        while self.text[self.pos..].starts_with(|c: char| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    pub fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos >= self.text.len()
    }

    pub fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.text[self.pos..].chars().next()
    }

    pub fn expect(&mut self, s: &str) -> Result<()> {
        self.skip_ws();
        if self.text[self.pos..].starts_with(s) {
            self.pos += s.len();
            Ok(())
        } else {
            Err(self.err(format!("expected `{s}`")))
        }
    }

    pub fn eat(&mut self, s: &str) -> bool {
        self.skip_ws();
        if self.text[self.pos..].starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    pub fn number(&mut self) -> Result<u32> {
        self.skip_ws();
        let start = self.pos;
        while self.text[self.pos..].starts_with(|c: char| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a number"));
        }
        self.text[start..self.pos]
            .parse()
            .map_err(|_| Error::parse(self.line_no, start + 1, "number too large"))
    }

    pub fn word(&mut self) -> Option<&'a str> {
        self.skip_ws();
        let start = self.pos;
        while self.text[self.pos..].starts_with(|c: char| c.is_ascii_alphanumeric() || c == '_') {
            self.pos += 1;
        }
        (start < self.pos).then(|| &self.text[start..self.pos])
    }

    /// Skips a `"..."` string.
    pub fn skip_quoted(&mut self) -> Result<()> {
        self.expect("\"")?;
        let close = self.text[self.pos..]
            .find('"')
            .ok_or_else(|| self.err("unterminated string"))?;
        self.pos += close + 1;
        Ok(())
    }

    pub fn col(&self) -> usize {
        self.pos + 1
    }

    /// `{1,2}` as a state set.
    pub fn state_set(&mut self, states: usize) -> Result<StateSet> {
        self.expect("{")?;
        let mut out = StateSet::new();
        if self.eat("}") {
            return Ok(out);
        }
        loop {
            self.skip_ws();
            let col = self.col();
            let q = self.number()?;
            if q as usize >= states {
                return Err(Error::parse(
                    self.line_no,
                    col,
                    format!("state {q} out of range"),
                ));
            }
            out.insert(q);
            if self.eat("}") {
                return Ok(out);
            }
            self.expect(",")?;
        }
    }

    /// `{a,b}` as a letter.
    pub fn letter(&mut self, aps: &ApSet) -> Result<crate::alphabet::Letter> {
        self.skip_ws();
        let col = self.col();
        self.expect("{")?;
        let close = self.text[self.pos..]
            .find('}')
            .ok_or_else(|| self.err("unterminated letter"))?;
        let body = &self.text[self.pos..self.pos + close];
        self.pos += close + 1;
        aps.parse_letter_body(body).map_err(|e| match e {
            Error::UndeclaredAtom(a) => {
                Error::parse(self.line_no, col, format!("undeclared proposition `{a}`"))
            }
            other => other,
        })
    }
}

pub(crate) fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("")
}

pub fn parse_automaton(text: &str) -> Result<OmegaAutomaton> {
    let mut aps: Option<ApSet> = None;
    let mut states: Option<usize> = None;
    let mut initial: Option<u32> = None;
    let mut acc_line: Option<(usize, String)> = None;
    let mut delta: Vec<Option<u32>> = Vec::new();
    let mut last_line = 0;

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        last_line = line_no;
        let line = strip_comment(raw);
        if line.trim().is_empty() {
            continue;
        }
        let mut c = Cursor::new(line_no, line);
        if c.eat("AP:") {
            let mut names = Vec::new();
            while let Some(w) = c.word() {
                names.push(w.to_string());
            }
            if !c.at_end() {
                return Err(c.err("expected proposition names"));
            }
            aps = Some(ApSet::new(&names).map_err(|e| Error::parse(line_no, 1, e.to_string()))?);
        } else if c.eat("States:") {
            let n = c.number()? as usize;
            if n == 0 {
                return Err(c.err("at least one state required"));
            }
            states = Some(n);
        } else if c.eat("Initial:") {
            initial = Some(c.number()?);
        } else if c.eat("Acceptance:") {
            acc_line = Some((line_no, line.to_string()));
        } else {
            let (Some(aps), Some(n)) = (&aps, states) else {
                return Err(c.err("transitions must follow the `AP:` and `States:` headers"));
            };
            if delta.is_empty() {
                delta = vec![None; n * aps.alphabet_size()];
            }
            c.skip_ws();
            let src_col = c.col();
            let q = c.number()?;
            if q as usize >= n {
                return Err(Error::parse(
                    line_no,
                    src_col,
                    format!("state {q} out of range"),
                ));
            }
            let l = c.letter(aps)?;
            c.expect("->")?;
            c.skip_ws();
            let tcol = c.col();
            let t = c.number()?;
            if t as usize >= n {
                return Err(Error::parse(
                    line_no,
                    tcol,
                    format!("state {t} out of range"),
                ));
            }
            if !c.at_end() {
                return Err(c.err("unexpected trailing input"));
            }
            let slot = &mut delta[q as usize * aps.alphabet_size() + l.index()];
            if slot.is_some() {
                return Err(Error::Rejected(format!(
                    "line {line_no}: duplicate transition for state {q} on {}",
                    aps.format_letter(l)
                )));
            }
            *slot = Some(t);
        }
    }
    let missing =
        |what: &str| Error::parse(last_line.max(1), 1, format!("missing `{what}` header"));
    let aps = aps.ok_or_else(|| missing("AP:"))?;
    let n = states.ok_or_else(|| missing("States:"))?;
    let initial = initial.ok_or_else(|| missing("Initial:"))?;
    let (acc_no, acc_text) = acc_line.ok_or_else(|| missing("Acceptance:"))?;
    if delta.is_empty() {
        delta = vec![None; n * aps.alphabet_size()];
    }
    let mut table = Vec::with_capacity(delta.len());
    for (i, t) in delta.iter().enumerate() {
        match t {
            Some(t) => table.push(*t),
            None => {
                let (q, l) = (i / aps.alphabet_size(), i % aps.alphabet_size());
                return Err(Error::Rejected(format!(
                    "missing transition for state {q} on {}",
                    aps.format_letter(crate::alphabet::Letter(l as u32))
                )));
            }
        }
    }
    if initial as usize >= n {
        return Err(Error::Rejected(format!(
            "initial state {initial} out of range"
        )));
    }
    let acceptance = parse_acceptance(acc_no, &acc_text, n)?;
    let semi = Semiautomaton::new(aps, n, table)?;
    OmegaAutomaton::new(semi, initial, acceptance)
}

fn parse_acceptance(line_no: usize, line: &str, n: usize) -> Result<AcceptanceCondition> {
    let mut c = Cursor::new(line_no, line);
    c.expect("Acceptance:")?;
    let kind = c
        .word()
        .ok_or_else(|| c.err("expected an acceptance kind"))?;
    let acc = match kind {
        "Buchi" => AcceptanceCondition::Buchi(c.state_set(n)?),
        "CoBuchi" => AcceptanceCondition::CoBuchi(c.state_set(n)?),
        "Rabin" => {
            let mut pairs = Vec::new();
            while !c.at_end() {
                c.expect("(")?;
                let g = c.state_set(n)?;
                c.expect(";")?;
                let b = c.state_set(n)?;
                c.expect(")")?;
                pairs.push((g, b));
            }
            AcceptanceCondition::Rabin(pairs)
        }
        "Muller" => {
            let mut sets = Vec::new();
            while !c.at_end() {
                c.skip_ws();
                let col = c.col();
                let s = c.state_set(n)?;
                if s.is_empty() {
                    return Err(Error::parse(line_no, col, "Muller sets must be nonempty"));
                }
                sets.push(s);
            }
            AcceptanceCondition::Muller(sets)
        }
        other => return Err(c.err(format!("unknown acceptance kind `{other}`"))),
    };
    if !c.at_end() {
        return Err(c.err("unexpected trailing input"));
    }
    Ok(acc)
}

pub(crate) fn format_set(s: &StateSet) -> String {
    let items: Vec<String> = s.iter().map(|q| q.to_string()).collect();
    format!("{{{}}}", items.join(","))
}

pub fn render_automaton(a: &OmegaAutomaton) -> String {
    let semi = a.semi();
    let mut s = String::new();
    let _ = writeln!(
        s,
        "AP:{}",
        semi.aps()
            .names()
            .iter()
            .map(|n| format!(" {n}"))
            .collect::<String>()
    );
    let _ = writeln!(s, "States: {}", semi.states());
    let _ = writeln!(s, "Initial: {}", a.initial());
    let acc = match a.acceptance() {
        AcceptanceCondition::Buchi(x) => format!("Buchi {}", format_set(x)),
        AcceptanceCondition::CoBuchi(x) => format!("CoBuchi {}", format_set(x)),
        AcceptanceCondition::Rabin(p) => {
            let parts: Vec<String> = p
                .iter()
                .map(|(g, b)| format!("({};{})", format_set(g), format_set(b)))
                .collect();
            format!("Rabin {}", parts.join(" ")).trim_end().to_string()
        }
        AcceptanceCondition::Muller(m) => {
            let parts: Vec<String> = m.iter().map(format_set).collect();
            format!("Muller {}", parts.join(" ")).trim_end().to_string()
        }
    };
    let _ = writeln!(s, "Acceptance: {acc}");
    for q in 0..semi.states() as u32 {
        for l in semi.aps().letters() {
            let _ = writeln!(
                s,
                "{q} {} -> {}",
                semi.aps().format_letter(l),
                semi.step(q, l)
            );
        }
    }
    s
}
