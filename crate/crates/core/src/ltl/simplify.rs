//! Optional rewriting passes. Construction never simplifies on its own.

use std::collections::HashMap;

use super::store::{FormulaId, FormulaStore, Node};

impl FormulaStore {
    /// Negation normal form: negations only on `true`, atoms and letters.
    pub fn nnf(&mut self, f: FormulaId) -> FormulaId {
        let mut memo = HashMap::new();
        self.nnf_rec(f, false, &mut memo)
    }

    fn nnf_rec(
        &mut self,
        f: FormulaId,
        neg: bool,
        memo: &mut HashMap<(FormulaId, bool), FormulaId>,
    ) -> FormulaId {
        if let Some(&g) = memo.get(&(f, neg)) {
            return g;
        }
        let g = match (self.node(f), neg) {
            (Node::True | Node::Atom(_) | Node::Letter(_), false) => f,
            (Node::True | Node::Atom(_) | Node::Letter(_), true) => self.not(f),
            (Node::Not(c), n) => self.nnf_rec(c, !n, memo),
            (Node::Next(c), n) => {
                let c = self.nnf_rec(c, n, memo);
                self.next(c)
            }
            (Node::And(a, b), n) | (Node::Or(a, b), n) => {
                let is_and = matches!(self.node(f), Node::And(..));
                let (a, b) = (self.nnf_rec(a, n, memo), self.nnf_rec(b, n, memo));
                if is_and != n {
                    self.and(a, b)
                } else {
                    self.or(a, b)
                }
            }
            (Node::Until(a, b), n) | (Node::Release(a, b), n) => {
                let is_until = matches!(self.node(f), Node::Until(..));
                let (a, b) = (self.nnf_rec(a, n, memo), self.nnf_rec(b, n, memo));
                if is_until != n {
                    self.until(a, b)
                } else {
                    self.release(a, b)
                }
            }
        };
        memo.insert((f, neg), g);
        g
    }

    /// Constant folding with `true`/`false` units. A rewrite is kept only if
    /// it does not raise any hierarchy level of the node it replaces.
    /// `X true ≡ true` holds on infinite words only, so this pass is not
    /// sound for the finite-word semantics.
    pub fn fold_constants(&mut self, f: FormulaId) -> FormulaId {
        let mut map: HashMap<FormulaId, FormulaId> = HashMap::new();
        for g in self.reachable(&[f]) {
            let m = |c: FormulaId| map[&c];
            let rebuilt = match self.node(g) {
                Node::Not(c) => Node::Not(m(c)),
                Node::Next(c) => Node::Next(m(c)),
                Node::And(a, b) => Node::And(m(a), m(b)),
                Node::Or(a, b) => Node::Or(m(a), m(b)),
                Node::Until(a, b) => Node::Until(m(a), m(b)),
                Node::Release(a, b) => Node::Release(m(a), m(b)),
                leaf => leaf,
            };
            let plain = self.intern(rebuilt);
            let folded = self.fold_node(rebuilt);
            let out = match folded {
                Some(h) if self.class(h).le(&self.class(plain)) => h,
                _ => plain,
            };
            map.insert(g, out);
        }
        map[&f]
    }

    fn fold_node(&mut self, n: Node) -> Option<FormulaId> {
        let t = |s: &Self, x: FormulaId| s.is_true(x);
        let fl = |s: &Self, x: FormulaId| s.is_false(x);
        match n {
            Node::Not(c) => match self.node(c) {
                Node::Not(cc) => Some(cc),
                _ => None,
            },
            Node::And(a, b) => {
                if fl(self, a) || fl(self, b) {
                    Some(self.ff())
                } else if t(self, a) {
                    Some(b)
                } else if t(self, b) || a == b {
                    Some(a)
                } else {
                    None
                }
            }
            Node::Or(a, b) => {
                if t(self, a) || t(self, b) {
                    Some(self.tt())
                } else if fl(self, a) {
                    Some(b)
                } else if fl(self, b) || a == b {
                    Some(a)
                } else {
                    None
                }
            }
            Node::Next(c) => (t(self, c) || fl(self, c)).then_some(c),
            Node::Until(a, b) => {
                if t(self, b) || fl(self, b) || fl(self, a) {
                    Some(b)
                } else {
                    None
                }
            }
            Node::Release(a, b) => {
                if t(self, b) || fl(self, b) || t(self, a) {
                    Some(b)
                } else {
                    None
                }
            }
            _ => None,
        }
    }
}
