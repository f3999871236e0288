use serde::Serialize;

use super::store::{FormulaId, Node};
use crate::alphabet::ApSet;

/// Least levels of the syntactic future hierarchy a formula belongs to.
///
/// Every LTL formula lies in some finite level, so all three fields are finite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct HierarchyClass {
    pub min_sigma: u32,
    pub min_pi: u32,
    pub min_delta: u32,
}

impl HierarchyClass {
    pub const ZERO: HierarchyClass = HierarchyClass {
        min_sigma: 0,
        min_pi: 0,
        min_delta: 0,
    };

    pub fn in_sigma(&self, i: u32) -> bool {
        self.min_sigma <= i
    }

    pub fn in_pi(&self, i: u32) -> bool {
        self.min_pi <= i
    }

    pub fn in_delta(&self, i: u32) -> bool {
        self.min_delta <= i
    }

    /// Componentwise `self ≤ other`.
    pub fn le(&self, other: &HierarchyClass) -> bool {
        self.min_sigma <= other.min_sigma
            && self.min_pi <= other.min_pi
            && self.min_delta <= other.min_delta
    }
}

fn sd(s: u32, p: u32, d: u32) -> HierarchyClass {
    HierarchyClass {
        min_sigma: s,
        min_pi: p,
        min_delta: d.min(s).min(p),
    }
}

/// Class of the negation of a formula of class `c` that is not itself a
/// level-0 literal: `Σ_{i+1}` holds negated `Π_{i+1}` formulas, `Π_0`-negations
/// land in level 1, and `Δ` is closed under negation from level 1 up.
fn negate(c: HierarchyClass) -> HierarchyClass {
    let s = c.min_pi.max(1).min(c.min_sigma.max(1) + 1);
    let p = c.min_sigma.max(1).min(c.min_pi.max(1) + 1);
    sd(s, p, c.min_delta.max(1))
}

/// Whether `Not(child)` is a negated atom (or `false`), hence in `Σ_0`.
fn negated_literal(child: Node, aps: &ApSet) -> bool {
    match child {
        Node::True | Node::Atom(_) => true,
        // a letter over one proposition is that literal; over none it is `true`
        Node::Letter(l) => aps.is_empty() || (aps.len() == 1 && l.contains(0)),
        _ => false,
    }
}

pub(crate) fn combine(
    node: &Node,
    class_of: impl Fn(FormulaId) -> HierarchyClass,
    node_of: impl Fn(FormulaId) -> Node,
    aps: &ApSet,
) -> HierarchyClass {
    match *node {
        Node::True | Node::Atom(_) | Node::Letter(_) => HierarchyClass::ZERO,
        Node::Not(c) => {
            if negated_literal(node_of(c), aps) {
                HierarchyClass::ZERO
            } else {
                negate(class_of(c))
            }
        }
        Node::And(a, b) | Node::Or(a, b) => {
            let (x, y) = (class_of(a), class_of(b));
            let sa = x.min_sigma.max(y.min_sigma);
            let pa = x.min_pi.max(y.min_pi);
            let s = sa.min(pa + 1);
            let p = pa.min(sa + 1);
            sd(s, p, x.min_delta.max(y.min_delta))
        }
        Node::Next(c) => {
            let x = class_of(c);
            let s = x.min_sigma.max(1).min(x.min_pi.max(1) + 1);
            let p = x.min_pi.max(1).min(x.min_sigma.max(1) + 1);
            sd(s, p, u32::MAX)
        }
        Node::Until(a, b) => {
            let (x, y) = (class_of(a), class_of(b));
            let s = x.min_sigma.max(y.min_sigma).max(1);
            sd(s, s + 1, u32::MAX)
        }
        Node::Release(a, b) => {
            let (x, y) = (class_of(a), class_of(b));
            let p = x.min_pi.max(y.min_pi).max(1);
            sd(p + 1, p, u32::MAX)
        }
    }
}
