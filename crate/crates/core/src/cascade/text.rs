//! Cascade text format. Levels are numbered from 0.
//!
//! ```text
//! AP: p
//! Level 0: states 2
//! default: id
//! on {p},() -> reset 1
//! Level 1: states 2
//! default: id
//! on {p},(1) -> reset 1
//! on {},(1) -> reset 0
//! Homomorphism:
//! (0,0) -> 0
//! ```
//!
//! Action lines list the entries that differ from the level default. The
//! homomorphism section is optional. `#` starts a comment.

use std::collections::BTreeMap;
use std::fmt::Write;

use super::{Action, Configuration, Homomorphism, LevelSpec, ResetCascade};
use crate::alphabet::ApSet;
use crate::automata::native::{strip_comment, Cursor};
use crate::error::{Error, Result};

fn tuple(c: &mut Cursor<'_>) -> Result<Vec<u32>> {
    c.expect("(")?;
    let mut out = Vec::new();
    if c.eat(")") {
        return Ok(out);
    }
    loop {
        out.push(c.number()?);
        if c.eat(")") {
            return Ok(out);
        }
        c.expect(",")?;
    }
}

fn action(c: &mut Cursor<'_>) -> Result<Action> {
    if c.eat("id") {
        Ok(Action::Identity)
    } else if c.eat("reset") {
        Ok(Action::Reset(c.number()?))
    } else {
        Err(c.err("expected `id` or `reset j`"))
    }
}

fn finish(c: &mut Cursor<'_>) -> Result<()> {
    if c.at_end() {
        Ok(())
    } else {
        Err(c.err("unexpected trailing input"))
    }
}

/// Parses a cascade and its homomorphism (empty when the section is absent).
pub fn parse_cascade(text: &str) -> Result<(ResetCascade, Homomorphism)> {
    let mut aps: Option<ApSet> = None;
    let mut specs: Vec<LevelSpec> = Vec::new();
    let mut hom = Homomorphism::default();
    let mut in_hom = false;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
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
            finish(&mut c)?;
            aps = Some(ApSet::new(&names).map_err(|e| Error::parse(line_no, 1, e.to_string()))?);
            continue;
        }
        let Some(a) = &aps else {
            return Err(c.err("the `AP:` header must come first"));
        };
        if c.eat("Homomorphism:") {
            finish(&mut c)?;
            in_hom = true;
        } else if in_hom {
            let cfg = Configuration(tuple(&mut c)?);
            c.expect("->")?;
            let q = c.number()?;
            finish(&mut c)?;
            if hom.map.insert(cfg.clone(), q).is_some() {
                return Err(Error::Rejected(format!(
                    "line {line_no}: {cfg} mapped twice"
                )));
            }
        } else if c.eat("Level") {
            c.skip_ws();
            let col = c.col();
            let idx = c.number()? as usize;
            if idx != specs.len() {
                return Err(Error::parse(
                    line_no,
                    col,
                    format!("expected level {}", specs.len()),
                ));
            }
            c.expect(":")?;
            c.expect("states")?;
            let states = c.number()?;
            finish(&mut c)?;
            specs.push(LevelSpec {
                states,
                default: Action::Identity,
                entries: BTreeMap::new(),
            });
        } else {
            let Some(spec) = specs.last_mut() else {
                return Err(c.err("expected a `Level` header"));
            };
            if c.eat("default:") {
                spec.default = action(&mut c)?;
                finish(&mut c)?;
            } else if c.eat("on") {
                let l = c.letter(a)?;
                c.expect(",")?;
                let lower = tuple(&mut c)?;
                c.expect("->")?;
                let act = action(&mut c)?;
                finish(&mut c)?;
                if spec.entries.insert((l, lower), act).is_some() {
                    return Err(Error::Rejected(format!("line {line_no}: duplicate action")));
                }
            } else {
                return Err(c.err("expected `default:`, `on` or a header"));
            }
        }
    }
    let aps = aps.ok_or_else(|| Error::parse(1, 1, "missing `AP:` header"))?;
    let cascade = ResetCascade::new(aps, specs)?;
    for cfg in hom.map.keys() {
        if cfg.level() != cascade.level_count() || !cascade.is_valid(cfg) {
            return Err(Error::LevelMismatch(format!(
                "{cfg} is not a full configuration"
            )));
        }
    }
    Ok((cascade, hom))
}

fn format_action(a: Action) -> String {
    match a {
        Action::Identity => "id".into(),
        Action::Reset(j) => format!("reset {j}"),
    }
}

pub fn render_cascade(c: &ResetCascade, h: Option<&Homomorphism>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "AP: {}", c.aps().names().join(" "));
    for (i, lv) in c.levels().iter().enumerate() {
        let _ = writeln!(out, "Level {i}: states {}", lv.states());
        let _ = writeln!(out, "default: {}", format_action(lv.default_action()));
        for ((l, lower), a) in lv.explicit() {
            let _ = writeln!(
                out,
                "on {},{} -> {}",
                c.aps().format_letter(*l),
                Configuration(lower.clone()),
                format_action(*a)
            );
        }
    }
    if let Some(h) = h {
        let _ = writeln!(out, "Homomorphism:");
        for (cfg, q) in &h.map {
            let _ = writeln!(out, "{cfg} -> {q}");
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cascade::tests::two_level;

    #[test]
    fn round_trip() {
        let c = two_level();
        let h = Homomorphism {
            map: c
                .configurations(2)
                .enumerate()
                .map(|(i, k)| (k, i as u32))
                .collect(),
        };
        let text = render_cascade(&c, Some(&h));
        let (c2, h2) = parse_cascade(&text).unwrap();
        assert_eq!(c2, c);
        assert_eq!(h2, h);
        assert_eq!(render_cascade(&c2, Some(&h2)), text);
    }

    #[test]
    fn doc_example_parses() {
        let text = "AP: p\nLevel 0: states 2\ndefault: id\non {p},() -> reset 1\n\
                    Level 1: states 2\ndefault: id\non {p},(1) -> reset 1\non {},(1) -> reset 0\n\
                    Homomorphism:\n(0,0) -> 0\n";
        let (c, h) = parse_cascade(text).unwrap();
        assert_eq!(c.states_per_level(), vec![2, 2]);
        assert_eq!(h.map.len(), 1);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            parse_cascade("Level 0: states 2\n"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            parse_cascade("AP: p\nLevel 1: states 2\n"),
            Err(Error::Parse {
                line: 2,
                column: 7,
                ..
            })
        ));
        assert!(matches!(
            parse_cascade("AP: p\nLevel 0: states 2\non {p},(0) -> id\n"),
            Err(Error::LevelMismatch(_))
        ));
        assert!(matches!(
            parse_cascade("AP: p\nLevel 0: states 2\non {q},() -> id\n"),
            Err(Error::Parse { line: 3, .. })
        ));
        assert!(matches!(
            parse_cascade("AP: p\nLevel 0: states 2\nHomomorphism:\n(0,1) -> 0\n"),
            Err(Error::LevelMismatch(_))
        ));
    }
}
