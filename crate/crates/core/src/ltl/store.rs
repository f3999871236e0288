use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::One;

use super::classify::{self, HierarchyClass};
use crate::alphabet::{ApSet, Letter};
use crate::error::{Error, Result};

/// Canonical handle of a node in a [`FormulaStore`]. Children always have
/// smaller ids than their parents, so id order is a topological order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FormulaId(pub(crate) u32);

impl FormulaId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// One node of the formula DAG.
///
/// `Letter(σ)` stands for the conjunction of all |AP| literals fixing σ
/// exactly; with an empty proposition set it denotes `true`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Node {
    True,
    Atom(u32),
    Letter(Letter),
    Not(FormulaId),
    And(FormulaId, FormulaId),
    Or(FormulaId, FormulaId),
    Next(FormulaId),
    Until(FormulaId, FormulaId),
    Release(FormulaId, FormulaId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeKind {
    True,
    Atom(u32),
    Letter(Letter),
    Not,
    And,
    Or,
    Next,
    Until,
    Release,
}

impl Node {
    pub fn children(&self) -> impl Iterator<Item = FormulaId> {
        let (a, b) = match *self {
            Node::True | Node::Atom(_) | Node::Letter(_) => (None, None),
            Node::Not(c) | Node::Next(c) => (Some(c), None),
            Node::And(l, r) | Node::Or(l, r) | Node::Until(l, r) | Node::Release(l, r) => {
                (Some(l), Some(r))
            }
        };
        a.into_iter().chain(b)
    }

    pub fn is_temporal(&self) -> bool {
        matches!(self, Node::Next(_) | Node::Until(..) | Node::Release(..))
    }
}

struct NodeInfo {
    depth: u32,
    length: BigUint,
    class: HierarchyClass,
}

/// Hash-consed arena of LTL formulas over a fixed proposition set.
///
/// Construction needs `&mut self`; afterwards the store is immutable and
/// may be shared across threads.
pub struct FormulaStore {
    aps: ApSet,
    nodes: Vec<Node>,
    info: Vec<NodeInfo>,
    index: HashMap<Node, FormulaId>,
}

impl FormulaStore {
    pub fn new(aps: ApSet) -> Self {
        FormulaStore {
            aps,
            nodes: Vec::new(),
            info: Vec::new(),
            index: HashMap::new(),
        }
    }

    pub fn aps(&self) -> &ApSet {
        &self.aps
    }

    /// Number of nodes ever interned.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, f: FormulaId) -> Node {
        self.nodes[f.index()]
    }

    pub fn depth(&self, f: FormulaId) -> u32 {
        self.info[f.index()].depth
    }

    /// Syntax-tree node count with letters counted as one node.
    pub fn length(&self, f: FormulaId) -> &BigUint {
        &self.info[f.index()].length
    }

    pub fn class(&self, f: FormulaId) -> HierarchyClass {
        self.info[f.index()].class
    }

    pub fn intern(&mut self, node: Node) -> FormulaId {
        if let Some(&id) = self.index.get(&node) {
            return id;
        }
        debug_assert!(node.children().all(|c| c.index() < self.nodes.len()));
        let info = self.compute_info(&node);
        let id = FormulaId(u32::try_from(self.nodes.len()).expect("formula store overflow"));
        self.nodes.push(node);
        self.info.push(info);
        self.index.insert(node, id);
        id
    }

    fn compute_info(&self, node: &Node) -> NodeInfo {
        let d = |c: FormulaId| self.info[c.index()].depth;
        let l = |c: FormulaId| &self.info[c.index()].length;
        let depth = match *node {
            Node::True | Node::Atom(_) | Node::Letter(_) => 0,
            Node::Not(c) => d(c),
            Node::And(a, b) | Node::Or(a, b) => d(a).max(d(b)),
            Node::Next(c) => d(c) + 1,
            Node::Until(a, b) | Node::Release(a, b) => d(a).max(d(b)) + 1,
        };
        let length = match *node {
            Node::True | Node::Atom(_) | Node::Letter(_) => BigUint::one(),
            Node::Not(c) | Node::Next(c) => l(c) + 1u32,
            Node::And(a, b) | Node::Or(a, b) | Node::Until(a, b) | Node::Release(a, b) => {
                l(a) + l(b) + 1u32
            }
        };
        let class = classify::combine(
            node,
            |c| self.info[c.index()].class,
            |c| self.nodes[c.index()],
            &self.aps,
        );
        NodeInfo {
            depth,
            length,
            class,
        }
    }

    /// Generic constructor: `kind` plus the right number of children.
    pub fn construct(&mut self, kind: NodeKind, children: &[FormulaId]) -> Result<FormulaId> {
        let arity = |n: usize| -> Result<()> {
            if children.len() == n {
                Ok(())
            } else {
                Err(Error::Rejected(format!(
                    "{kind:?} takes {n} children, got {}",
                    children.len()
                )))
            }
        };
        let node = match kind {
            NodeKind::True => {
                arity(0)?;
                Node::True
            }
            NodeKind::Atom(i) => {
                arity(0)?;
                if i as usize >= self.aps.len() {
                    return Err(Error::UndeclaredAtom(format!("#{i}")));
                }
                Node::Atom(i)
            }
            NodeKind::Letter(l) => {
                arity(0)?;
                if l.index() >= self.aps.alphabet_size() {
                    return Err(Error::Rejected(format!(
                        "letter {} is outside the alphabet",
                        l.0
                    )));
                }
                Node::Letter(l)
            }
            NodeKind::Not => {
                arity(1)?;
                Node::Not(children[0])
            }
            NodeKind::Next => {
                arity(1)?;
                Node::Next(children[0])
            }
            NodeKind::And => {
                arity(2)?;
                Node::And(children[0], children[1])
            }
            NodeKind::Or => {
                arity(2)?;
                Node::Or(children[0], children[1])
            }
            NodeKind::Until => {
                arity(2)?;
                Node::Until(children[0], children[1])
            }
            NodeKind::Release => {
                arity(2)?;
                Node::Release(children[0], children[1])
            }
        };
        if node.children().any(|c| c.index() >= self.nodes.len()) {
            return Err(Error::Rejected(
                "child id does not belong to this store".into(),
            ));
        }
        Ok(self.intern(node))
    }

    pub fn tt(&mut self) -> FormulaId {
        self.intern(Node::True)
    }

    /// `false` is `¬true`.
    pub fn ff(&mut self) -> FormulaId {
        let t = self.tt();
        self.not(t)
    }

    pub fn atom(&mut self, name: &str) -> Result<FormulaId> {
        let i = self
            .aps
            .index_of(name)
            .ok_or_else(|| Error::UndeclaredAtom(name.to_string()))?;
        Ok(self.intern(Node::Atom(i as u32)))
    }

    pub fn atom_index(&mut self, i: usize) -> Result<FormulaId> {
        self.construct(NodeKind::Atom(i as u32), &[])
    }

    pub fn letter(&mut self, l: Letter) -> FormulaId {
        assert!(
            l.index() < self.aps.alphabet_size(),
            "letter outside alphabet"
        );
        self.intern(Node::Letter(l))
    }

    pub fn not(&mut self, f: FormulaId) -> FormulaId {
        self.intern(Node::Not(f))
    }

    pub fn and(&mut self, a: FormulaId, b: FormulaId) -> FormulaId {
        self.intern(Node::And(a, b))
    }

    pub fn or(&mut self, a: FormulaId, b: FormulaId) -> FormulaId {
        self.intern(Node::Or(a, b))
    }

    pub fn next(&mut self, f: FormulaId) -> FormulaId {
        self.intern(Node::Next(f))
    }

    pub fn until(&mut self, a: FormulaId, b: FormulaId) -> FormulaId {
        self.intern(Node::Until(a, b))
    }

    pub fn release(&mut self, a: FormulaId, b: FormulaId) -> FormulaId {
        self.intern(Node::Release(a, b))
    }

    pub fn implies(&mut self, a: FormulaId, b: FormulaId) -> FormulaId {
        let na = self.not(a);
        self.or(na, b)
    }

    /// `F f = true U f`.
    pub fn eventually(&mut self, f: FormulaId) -> FormulaId {
        let t = self.tt();
        self.until(t, f)
    }

    /// `G f = ¬F¬f`.
    pub fn globally(&mut self, f: FormulaId) -> FormulaId {
        let nf = self.not(f);
        let fnf = self.eventually(nf);
        self.not(fnf)
    }

    /// Left-nested conjunction; the empty conjunction is `true`.
    pub fn and_all(&mut self, items: impl IntoIterator<Item = FormulaId>) -> FormulaId {
        let mut acc = None;
        for f in items {
            acc = Some(match acc {
                None => f,
                Some(a) => self.and(a, f),
            });
        }
        acc.unwrap_or_else(|| self.tt())
    }

    /// Left-nested disjunction; the empty disjunction is `false`.
    pub fn or_all(&mut self, items: impl IntoIterator<Item = FormulaId>) -> FormulaId {
        let mut acc = None;
        for f in items {
            acc = Some(match acc {
                None => f,
                Some(a) => self.or(a, f),
            });
        }
        acc.unwrap_or_else(|| self.ff())
    }

    pub fn is_true(&self, f: FormulaId) -> bool {
        matches!(self.node(f), Node::True)
    }

    pub fn is_false(&self, f: FormulaId) -> bool {
        matches!(self.node(f), Node::Not(c) if self.is_true(c))
    }

    /// All nodes reachable from `roots`, in ascending id order.
    pub fn reachable(&self, roots: &[FormulaId]) -> Vec<FormulaId> {
        let mut seen = vec![false; self.nodes.len()];
        let mut stack: Vec<FormulaId> = roots.to_vec();
        while let Some(f) = stack.pop() {
            if std::mem::replace(&mut seen[f.index()], true) {
                continue;
            }
            stack.extend(self.nodes[f.index()].children());
        }
        seen.iter()
            .enumerate()
            .filter(|(_, &s)| s)
            .map(|(i, _)| FormulaId(i as u32))
            .collect()
    }

    /// Copies `f` from another store over the same propositions.
    pub fn import(&mut self, other: &FormulaStore, f: FormulaId) -> FormulaId {
        let mut map: HashMap<FormulaId, FormulaId> = HashMap::new();
        for g in other.reachable(&[f]) {
            let m = |c: FormulaId| map[&c];
            let node = match other.node(g) {
                Node::Not(c) => Node::Not(m(c)),
                Node::Next(c) => Node::Next(m(c)),
                Node::And(a, b) => Node::And(m(a), m(b)),
                Node::Or(a, b) => Node::Or(m(a), m(b)),
                Node::Until(a, b) => Node::Until(m(a), m(b)),
                Node::Release(a, b) => Node::Release(m(a), m(b)),
                leaf => leaf,
            };
            let id = self.intern(node);
            map.insert(g, id);
        }
        map[&f]
    }
}
