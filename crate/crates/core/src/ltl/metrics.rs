use num_bigint::BigUint;
use num_traits::One;
use serde::Serialize;

use super::store::{FormulaId, FormulaStore, Node};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Metrics {
    pub depth: u32,
    /// Syntax-tree node count, exact.
    #[serde(serialize_with = "crate::ltl::metrics::ser_big")]
    pub length: BigUint,
    /// Distinct reachable DAG nodes.
    pub dag_size: usize,
}

pub(crate) fn ser_big<S: serde::Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// How a letter node is counted in length metrics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LetterCost {
    /// One node, as in the length bounds.
    #[default]
    Unit,
    /// The node count of the literal conjunction the letter abbreviates.
    Expanded,
}

impl FormulaStore {
    pub fn metrics(&self, f: FormulaId) -> Metrics {
        Metrics {
            depth: self.depth(f),
            length: self.length(f).clone(),
            dag_size: self.dag_size(f),
        }
    }

    pub fn metrics_with(&self, f: FormulaId, cost: LetterCost) -> Metrics {
        match cost {
            LetterCost::Unit => self.metrics(f),
            LetterCost::Expanded => Metrics {
                depth: self.depth(f),
                length: self.expanded_length(f),
                dag_size: self.dag_size(f),
            },
        }
    }

    pub fn dag_size(&self, f: FormulaId) -> usize {
        self.reachable(&[f]).len()
    }

    /// Length with each letter replaced by its conjunction of |AP| literals:
    /// a positive literal is one node, a negative one two, plus |AP|−1 `∧` nodes.
    pub fn expanded_length(&self, f: FormulaId) -> BigUint {
        let order = self.reachable(&[f]);
        let mut memo: std::collections::HashMap<FormulaId, BigUint> = Default::default();
        let k = self.aps().len();
        for &g in &order {
            let m = |c: FormulaId| &memo[&c];
            let v = match self.node(g) {
                Node::True | Node::Atom(_) => BigUint::one(),
                Node::Letter(l) => {
                    if k == 0 {
                        BigUint::one()
                    } else {
                        let pos = l.0.count_ones() as usize;
                        BigUint::from(pos + 2 * (k - pos) + (k - 1))
                    }
                }
                Node::Not(c) | Node::Next(c) => m(c) + 1u32,
                Node::And(a, b) | Node::Or(a, b) | Node::Until(a, b) | Node::Release(a, b) => {
                    m(a) + m(b) + 1u32
                }
            };
            memo.insert(g, v);
        }
        memo.remove(&f).unwrap()
    }
}
