//! Infix rendering and parsing.
//!
//! Grammar, loosest first: `->` (right), `|` (left), `&` (left), `U` / `R`
//! (right), prefix `!`, `X`, `F`, `G`. Letters are written `{a,b}` and fix
//! every proposition: the listed ones true, all others false.
//! `true U φ` renders as `F φ`, `¬(true U ¬φ)` as `G φ`, `¬true` as `false`.

use std::fmt::Write;

use super::store::{FormulaId, FormulaStore, Node};
use crate::error::{Error, Result};

const P_OR: u8 = 1;
const P_AND: u8 = 2;
const P_TEMPORAL: u8 = 3;
const P_UNARY: u8 = 4;

enum View {
    Leaf(String),
    Unary(&'static str, FormulaId),
    Binary(&'static str, u8, FormulaId, FormulaId),
}

impl FormulaStore {
    fn view(&self, f: FormulaId) -> View {
        match self.node(f) {
            Node::True => View::Leaf("true".into()),
            Node::Atom(a) => View::Leaf(self.aps().names()[a as usize].clone()),
            Node::Letter(l) => View::Leaf(self.aps().format_letter(l)),
            Node::Not(c) => match self.node(c) {
                Node::True => View::Leaf("false".into()),
                Node::Until(t, nx) if self.is_true(t) => match self.node(nx) {
                    Node::Not(x) => View::Unary("G ", x),
                    _ => View::Unary("!", c),
                },
                _ => View::Unary("!", c),
            },
            Node::Next(c) => View::Unary("X ", c),
            Node::Until(a, b) if self.is_true(a) => View::Unary("F ", b),
            Node::Until(a, b) => View::Binary(" U ", P_TEMPORAL, a, b),
            Node::Release(a, b) => View::Binary(" R ", P_TEMPORAL, a, b),
            Node::And(a, b) => View::Binary(" & ", P_AND, a, b),
            Node::Or(a, b) => View::Binary(" | ", P_OR, a, b),
        }
    }

    fn precedence(&self, f: FormulaId) -> u8 {
        match self.view(f) {
            View::Leaf(_) | View::Unary(..) => P_UNARY,
            View::Binary(_, p, _, _) => p,
        }
    }

    fn write_formula(&self, f: FormulaId, out: &mut String) {
        match self.view(f) {
            View::Leaf(s) => out.push_str(&s),
            View::Unary(op, c) => {
                out.push_str(op);
                self.write_child(c, self.precedence(c) < P_UNARY, out);
            }
            View::Binary(op, p, a, b) => {
                // `&`, `|` associate left; `U`, `R` associate right
                let (lp, rp) = if p == P_TEMPORAL {
                    (self.precedence(a) <= p, self.precedence(b) < p)
                } else {
                    (self.precedence(a) < p, self.precedence(b) <= p)
                };
                self.write_child(a, lp, out);
                out.push_str(op);
                self.write_child(b, rp, out);
            }
        }
    }

    fn write_child(&self, c: FormulaId, paren: bool, out: &mut String) {
        if paren {
            out.push('(');
            self.write_formula(c, out);
            out.push(')');
        } else {
            self.write_formula(c, out);
        }
    }

    /// Inline rendering of the whole syntax tree. Its size is the formula's
    /// tree length; see [`Self::render_bounded`] for shared DAGs.
    pub fn render(&self, f: FormulaId) -> String {
        let mut s = String::new();
        self.write_formula(f, &mut s);
        s
    }

    /// Inline rendering, or `None` when the tree has more than `max_nodes` nodes.
    pub fn render_bounded(&self, f: FormulaId, max_nodes: u64) -> Option<String> {
        if *self.length(f) > max_nodes.into() {
            None
        } else {
            Some(self.render(f))
        }
    }

    /// One definition line per shared node, children first: `n3 = n1 U n2`.
    pub fn render_dag(&self, f: FormulaId) -> String {
        let mut s = String::new();
        let order = self.reachable(&[f]);
        let n = |c: FormulaId| format!("n{}", c.index());
        for g in order {
            let rhs = match self.node(g) {
                Node::True => "true".to_string(),
                Node::Atom(a) => self.aps().names()[a as usize].clone(),
                Node::Letter(l) => self.aps().format_letter(l),
                Node::Not(c) => format!("!{}", n(c)),
                Node::Next(c) => format!("X {}", n(c)),
                Node::And(a, b) => format!("{} & {}", n(a), n(b)),
                Node::Or(a, b) => format!("{} | {}", n(a), n(b)),
                Node::Until(a, b) => format!("{} U {}", n(a), n(b)),
                Node::Release(a, b) => format!("{} R {}", n(a), n(b)),
            };
            let _ = writeln!(s, "{} = {}", n(g), rhs);
        }
        let _ = writeln!(s, "root = {}", n(f));
        s
    }

    pub fn parse(&mut self, text: &str) -> Result<FormulaId> {
        let tokens = tokenize(text)?;
        let mut p = Parser {
            store: self,
            tokens,
            pos: 0,
            text,
        };
        let f = p.implication()?;
        if p.pos < p.tokens.len() {
            let (col, _) = &p.tokens[p.pos];
            return Err(Error::parse(1, *col, "unexpected trailing input"));
        }
        Ok(f)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Letter(String),
    True,
    False,
    Not,
    And,
    Or,
    Implies,
    LParen,
    RParen,
    Next,
    Eventually,
    Globally,
    Until,
    Release,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let tok = match c {
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '!' | '~' => Tok::Not,
            '&' => {
                if chars.get(i + 1) == Some(&'&') {
                    i += 1;
                }
                Tok::And
            }
            '|' => {
                if chars.get(i + 1) == Some(&'|') {
                    i += 1;
                }
                Tok::Or
            }
            '-' if chars.get(i + 1) == Some(&'>') => {
                i += 1;
                Tok::Implies
            }
            '{' => {
                let close = chars[i..]
                    .iter()
                    .position(|&x| x == '}')
                    .ok_or_else(|| Error::parse(1, col, "unterminated letter"))?;
                let body: String = chars[i + 1..i + close].iter().collect();
                i += close;
                Tok::Letter(body)
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i + 1 < chars.len()
                    && (chars[i + 1].is_ascii_alphanumeric() || chars[i + 1] == '_')
                {
                    i += 1;
                }
                let word: String = chars[start..=i].iter().collect();
                match word.as_str() {
                    "true" => Tok::True,
                    "false" => Tok::False,
                    "X" => Tok::Next,
                    "F" => Tok::Eventually,
                    "G" => Tok::Globally,
                    "U" => Tok::Until,
                    "R" => Tok::Release,
                    _ => Tok::Ident(word),
                }
            }
            other => {
                return Err(Error::parse(
                    1,
                    col,
                    format!("unexpected character `{other}`"),
                ))
            }
        };
        out.push((col, tok));
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    store: &'a mut FormulaStore,
    tokens: Vec<(usize, Tok)>,
    pos: usize,
    text: &'a str,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn col(&self) -> usize {
        self.tokens
            .get(self.pos)
            .map_or(self.text.chars().count() + 1, |(c, _)| *c)
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn implication(&mut self) -> Result<FormulaId> {
        let lhs = self.disjunction()?;
        if self.eat(&Tok::Implies) {
            let rhs = self.implication()?;
            return Ok(self.store.implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<FormulaId> {
        let mut acc = self.conjunction()?;
        while self.eat(&Tok::Or) {
            let rhs = self.conjunction()?;
            acc = self.store.or(acc, rhs);
        }
        Ok(acc)
    }

    fn conjunction(&mut self) -> Result<FormulaId> {
        let mut acc = self.temporal()?;
        while self.eat(&Tok::And) {
            let rhs = self.temporal()?;
            acc = self.store.and(acc, rhs);
        }
        Ok(acc)
    }

    fn temporal(&mut self) -> Result<FormulaId> {
        let lhs = self.unary()?;
        if self.eat(&Tok::Until) {
            let rhs = self.temporal()?;
            return Ok(self.store.until(lhs, rhs));
        }
        if self.eat(&Tok::Release) {
            let rhs = self.temporal()?;
            return Ok(self.store.release(lhs, rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<FormulaId> {
        let col = self.col();
        let Some((_, tok)) = self.tokens.get(self.pos).cloned() else {
            return Err(Error::parse(1, col, "unexpected end of formula"));
        };
        self.pos += 1;
        match tok {
            Tok::Not => {
                let c = self.unary()?;
                Ok(self.store.not(c))
            }
            Tok::Next => {
                let c = self.unary()?;
                Ok(self.store.next(c))
            }
            Tok::Eventually => {
                let c = self.unary()?;
                Ok(self.store.eventually(c))
            }
            Tok::Globally => {
                let c = self.unary()?;
                Ok(self.store.globally(c))
            }
            Tok::True => Ok(self.store.tt()),
            Tok::False => Ok(self.store.ff()),
            Tok::Ident(name) => self
                .store
                .atom(&name)
                .map_err(|_| Error::parse(1, col, format!("undeclared proposition `{name}`"))),
            Tok::Letter(body) => {
                let l = self
                    .store
                    .aps()
                    .parse_letter_body(&body)
                    .map_err(|e| match e {
                        Error::UndeclaredAtom(a) => {
                            Error::parse(1, col, format!("undeclared proposition `{a}`"))
                        }
                        other => other,
                    })?;
                Ok(self.store.letter(l))
            }
            Tok::LParen => {
                let f = self.implication()?;
                if !self.eat(&Tok::RParen) {
                    return Err(Error::parse(1, self.col(), "expected `)`"));
                }
                Ok(f)
            }
            other => Err(Error::parse(1, col, format!("unexpected token {other:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::{ApSet, Letter};

    #[test]
    fn sugar_and_round_trip() {
        let mut s = FormulaStore::new(ApSet::new(&["a", "b"]).unwrap());
        let a = s.atom("a").unwrap();
        let t = s.tt();
        let fa = s.construct(super::super::NodeKind::Until, &[t, a]).unwrap();
        assert_eq!(s.render(fa), "F a");
        for text in [
            "a U b U a",
            "(a U b) U a",
            "a & b & (a | b)",
            "a & (b & a)",
            "G (a -> F b)",
            "!(a R X b) | {a} & {}",
            "false R !true",
            "X X !X a",
            "G F a & F G !b",
        ] {
            let f = s.parse(text).unwrap();
            let r = s.render(f);
            assert_eq!(s.parse(&r).unwrap(), f, "{text} -> {r}");
        }
        let l = s.parse("{a,b}").unwrap();
        assert_eq!(s.node(l), Node::Letter(Letter(3)));
    }

    #[test]
    fn parse_errors_have_columns() {
        let mut s = FormulaStore::new(ApSet::new(&["a"]).unwrap());
        assert_eq!(
            s.parse("a & q"),
            Err(Error::Parse {
                line: 1,
                column: 5,
                message: "undeclared proposition `q`".into()
            })
        );
        assert!(matches!(s.parse("(a"), Err(Error::Parse { column: 3, .. })));
        assert!(matches!(
            s.parse("a a"),
            Err(Error::Parse { column: 3, .. })
        ));
    }
}
