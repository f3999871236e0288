//! Atomic propositions, letters over `2^AP`, and ultimately periodic words.

use std::fmt;

use crate::error::{Error, Result};

/// Upper bound on |AP|; letters are dense indices into `0..2^|AP|`.
pub const MAX_APS: usize = 16;

/// A letter is the set of propositions that hold, bit `i` standing for `names[i]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Letter(pub u32);

impl Letter {
    pub fn contains(self, ap: usize) -> bool {
        self.0 >> ap & 1 == 1
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct ApSet {
    names: Vec<String>,
}

impl ApSet {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Self> {
        let names: Vec<String> = names.iter().map(|s| s.as_ref().to_string()).collect();
        if names.len() > MAX_APS {
            return Err(Error::Rejected(format!(
                "at most {MAX_APS} propositions supported"
            )));
        }
        for (i, n) in names.iter().enumerate() {
            if !is_identifier(n) {
                return Err(Error::Rejected(format!(
                    "`{n}` is not a valid proposition name"
                )));
            }
            if names[..i].contains(n) {
                return Err(Error::Rejected(format!("duplicate proposition `{n}`")));
            }
        }
        Ok(ApSet { names })
    }

    /// The empty proposition set, where `Σ = {∅}` (unary mode).
    pub fn empty() -> Self {
        ApSet { names: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn alphabet_size(&self) -> usize {
        1 << self.names.len()
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> {
        (0..self.alphabet_size() as u32).map(Letter)
    }

    pub fn format_letter(&self, l: Letter) -> String {
        let mut s = String::from("{");
        let mut first = true;
        for (i, n) in self.names.iter().enumerate() {
            if l.contains(i) {
                if !first {
                    s.push(',');
                }
                s.push_str(n);
                first = false;
            }
        }
        s.push('}');
        s
    }

    /// Parses the inside of a brace-set such as `a,b` (braces already stripped).
    pub fn parse_letter_body(&self, body: &str) -> Result<Letter> {
        let mut bits = 0u32;
        for part in body.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let i = self
                .index_of(part)
                .ok_or_else(|| Error::UndeclaredAtom(part.to_string()))?;
            bits |= 1 << i;
        }
        Ok(Letter(bits))
    }

    /// Parses a brace-set letter `{a,b}`.
    pub fn parse_letter(&self, text: &str) -> Result<Letter> {
        let t = text.trim();
        let body = t
            .strip_prefix('{')
            .and_then(|r| r.strip_suffix('}'))
            .ok_or_else(|| {
                Error::parse(1, 1, format!("expected a letter like {{a,b}}, found `{t}`"))
            })?;
        self.parse_letter_body(body)
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    if chars.all(|c| c.is_ascii_alphanumeric() || c == '_') {
        !matches!(s, "true" | "false" | "X" | "U" | "R" | "F" | "G")
    } else {
        false
    }
}

/// The ultimately periodic word `u · v^ω`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Lasso {
    spoke: Vec<Letter>,
    cycle: Vec<Letter>,
}

impl Lasso {
    pub fn new(spoke: Vec<Letter>, cycle: Vec<Letter>) -> Result<Self> {
        if cycle.is_empty() {
            return Err(Error::EmptyPeriod);
        }
        Ok(Lasso { spoke, cycle })
    }

    pub fn spoke(&self) -> &[Letter] {
        &self.spoke
    }

    pub fn cycle(&self) -> &[Letter] {
        &self.cycle
    }

    /// Number of distinct positions, `|u| + |v|`.
    pub fn positions(&self) -> usize {
        self.spoke.len() + self.cycle.len()
    }

    /// The letter at any position of the infinite word.
    pub fn letter_at(&self, i: usize) -> Letter {
        if i < self.spoke.len() {
            self.spoke[i]
        } else {
            self.cycle[(i - self.spoke.len()) % self.cycle.len()]
        }
    }

    /// Canonical position in `0..|u|+|v|` representing position `i`.
    pub fn fold(&self, i: usize) -> usize {
        if i < self.spoke.len() {
            i
        } else {
            self.spoke.len() + (i - self.spoke.len()) % self.cycle.len()
        }
    }

    /// `(u · v, v)`: same word, longer spoke.
    pub fn unroll_spoke(&self) -> Lasso {
        let mut spoke = self.spoke.clone();
        spoke.extend_from_slice(&self.cycle);
        Lasso {
            spoke,
            cycle: self.cycle.clone(),
        }
    }

    /// `(u, v · v)`: same word, doubled period.
    pub fn unroll_cycle(&self) -> Lasso {
        let mut cycle = self.cycle.clone();
        cycle.extend_from_slice(&self.cycle);
        Lasso {
            spoke: self.spoke.clone(),
            cycle,
        }
    }

    /// The suffix starting at position `i`, again a lasso.
    pub fn suffix(&self, i: usize) -> Lasso {
        if i <= self.spoke.len() {
            Lasso {
                spoke: self.spoke[i..].to_vec(),
                cycle: self.cycle.clone(),
            }
        } else {
            let r = (i - self.spoke.len()) % self.cycle.len();
            let mut cycle = self.cycle[r..].to_vec();
            cycle.extend_from_slice(&self.cycle[..r]);
            Lasso {
                spoke: Vec::new(),
                cycle,
            }
        }
    }

    pub fn display<'a>(&'a self, aps: &'a ApSet) -> LassoDisplay<'a> {
        LassoDisplay { lasso: self, aps }
    }

    /// Parses the literal form `{p} {} ; {q}` (spoke letters, `;`, cycle letters).
    pub fn parse(aps: &ApSet, text: &str) -> Result<Lasso> {
        let (u, v) = text
            .split_once(';')
            .ok_or_else(|| Error::parse(1, 1, "lasso literal needs `;` between spoke and cycle"))?;
        let parse_seq = |s: &str, offset: usize| -> Result<Vec<Letter>> {
            let mut out = Vec::new();
            let mut rest = s;
            let mut col = offset;
            loop {
                let trimmed = rest.trim_start();
                col += rest.len() - trimmed.len();
                if trimmed.is_empty() {
                    return Ok(out);
                }
                if !trimmed.starts_with('{') {
                    return Err(Error::parse(1, col + 1, "expected `{`"));
                }
                let close = trimmed
                    .find('}')
                    .ok_or_else(|| Error::parse(1, col + 1, "unterminated letter"))?;
                let letter = aps
                    .parse_letter_body(&trimmed[1..close])
                    .map_err(|e| match e {
                        Error::UndeclaredAtom(a) => {
                            Error::parse(1, col + 2, format!("undeclared proposition `{a}`"))
                        }
                        other => other,
                    })?;
                out.push(letter);
                col += close + 1;
                rest = &trimmed[close + 1..];
            }
        };
        let spoke = parse_seq(u, 0)?;
        let cycle = parse_seq(v, u.len() + 1)?;
        Lasso::new(spoke, cycle)
    }
}

pub struct LassoDisplay<'a> {
    lasso: &'a Lasso,
    aps: &'a ApSet,
}

impl fmt::Display for LassoDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.lasso.spoke {
            write!(f, "{} ", self.aps.format_letter(*l))?;
        }
        write!(f, ";")?;
        for l in &self.lasso.cycle {
            write!(f, " {}", self.aps.format_letter(*l))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lasso_literal_round_trip() {
        let aps = ApSet::new(&["p", "q"]).unwrap();
        let l = Lasso::parse(&aps, "{p} {} ; {q} {p,q}").unwrap();
        assert_eq!(l.spoke(), &[Letter(1), Letter(0)]);
        assert_eq!(l.cycle(), &[Letter(2), Letter(3)]);
        let text = l.display(&aps).to_string();
        assert_eq!(Lasso::parse(&aps, &text).unwrap(), l);
        assert_eq!(Lasso::parse(&aps, " ; {}").unwrap().spoke().len(), 0);
        assert_eq!(Lasso::parse(&aps, "{p} ;"), Err(Error::EmptyPeriod));
        assert!(matches!(
            Lasso::parse(&aps, "{r};{p}"),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn suffix_and_fold() {
        let l = Lasso::new(vec![Letter(1)], vec![Letter(0), Letter(2)]).unwrap();
        for i in 0..10 {
            let s = l.suffix(i);
            for j in 0..6 {
                assert_eq!(s.letter_at(j), l.letter_at(i + j));
            }
            assert_eq!(l.letter_at(l.fold(i)), l.letter_at(i));
        }
    }

    #[test]
    fn reserved_names_rejected() {
        assert!(ApSet::new(&["X"]).is_err());
        assert!(ApSet::new(&["a", "a"]).is_err());
        assert!(ApSet::new(&["1a"]).is_err());
    }
}
