//! Unary-alphabet constructions on nonempty finite words: threshold-language
//! formulas, an alternating bit counter, the `V_k` NFA family and unary
//! NFA → LTL translation.
//!
//! Formulas live in a store over no propositions, so `Σ = {∅}` and the only
//! letter is `a = Letter(0)`. The empty word is never considered.

use serde::Serialize;

use crate::alphabet::{ApSet, Letter};
use crate::automata::StateSet;
use crate::error::{Error, Result};
use crate::ltl::{FormulaId, FormulaStore};

/// The single unary letter.
pub const A: Letter = Letter(0);

/// `a^len`.
pub fn word(len: usize) -> Vec<Letter> {
    vec![A; len]
}

/// A store over no propositions.
pub fn unary_store() -> FormulaStore {
    FormulaStore::new(ApSet::empty())
}

/// A language of nonempty unary words fixed on lengths `1..=n` and constant above.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ThresholdLanguage {
    /// `membership[i]` is whether `a^{i+1}` belongs.
    pub membership: Vec<bool>,
    /// Whether every `a^m` with `m > n` belongs.
    pub above: bool,
}

impl ThresholdLanguage {
    pub fn new(membership: Vec<bool>, above: bool) -> Self {
        ThresholdLanguage { membership, above }
    }

    /// `{a^k}`.
    pub fn singleton(k: usize) -> Self {
        assert!(k >= 1);
        let mut m = vec![false; k];
        m[k - 1] = true;
        ThresholdLanguage {
            membership: m,
            above: false,
        }
    }

    pub fn n(&self) -> usize {
        self.membership.len()
    }

    pub fn contains(&self, len: usize) -> bool {
        assert!(len >= 1, "the empty word is excluded");
        self.membership.get(len - 1).copied().unwrap_or(self.above)
    }

    /// Largest length whose membership differs from `above`, or 0.
    pub fn boundary(&self) -> usize {
        self.membership
            .iter()
            .rposition(|&b| b != self.above)
            .map_or(0, |i| i + 1)
    }
}

/// A formula over no propositions true exactly on the members of `l`.
///
/// With `last = ¬X true`, position `k` (word length so far `k − 1`) carries
/// `θ_k = (last if k ∈ L) ∨ X θ_{k+1}`, and `θ_{g+1}` is the constant
/// `above`. Shared `last` keeps the DAG within `3g + 3` nodes.
pub fn threshold_formula(st: &mut FormulaStore, l: &ThresholdLanguage) -> Result<FormulaId> {
    if !st.aps().is_empty() {
        return Err(Error::AlphabetMismatch(
            "threshold formulas use a store over no propositions".into(),
        ));
    }
    let g = l.boundary();
    let t = st.tt();
    let xt = st.next(t);
    let last = st.not(xt);
    // None stands for `false`
    let mut theta: Option<FormulaId> = if l.above { Some(t) } else { None };
    for k in (1..=g).rev() {
        let step = theta.map(|f| st.next(f));
        theta = match (l.membership[k - 1], step) {
            (true, Some(s)) => Some(st.or(last, s)),
            (true, None) => Some(last),
            (false, s) => s,
        };
    }
    Ok(theta.unwrap_or_else(|| st.ff()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnaryNfa {
    pub states: usize,
    pub initial: StateSet,
    /// Successors of each state on `a`.
    pub delta: Vec<StateSet>,
    pub accepting: StateSet,
}

impl UnaryNfa {
    pub fn new(
        states: usize,
        initial: StateSet,
        delta: Vec<StateSet>,
        accepting: StateSet,
    ) -> Result<Self> {
        let ok = |s: &StateSet| s.iter().all(|&q| (q as usize) < states);
        if delta.len() != states || !ok(&initial) || !ok(&accepting) || !delta.iter().all(ok) {
            return Err(Error::Rejected("NFA references a missing state".into()));
        }
        Ok(UnaryNfa {
            states,
            initial,
            delta,
            accepting,
        })
    }

    fn post(&self, s: &StateSet) -> StateSet {
        s.iter()
            .flat_map(|&q| self.delta[q as usize].iter().copied())
            .collect()
    }

    pub fn accepts(&self, len: usize) -> bool {
        let mut s = self.initial.clone();
        for _ in 0..len {
            s = self.post(&s);
        }
        !s.is_disjoint(&self.accepting)
    }

    /// The subset sequence `T_0, T_1, …` as a tail of length `tail` followed by a
    /// cycle of length `period`: `T_{tail+period} = T_tail`.
    pub fn determinize(&self) -> UnaryDfa {
        let mut seen: Vec<StateSet> = Vec::new();
        let mut s = self.initial.clone();
        loop {
            if let Some(tail) = seen.iter().position(|x| *x == s) {
                let accepting = seen
                    .iter()
                    .map(|x| !x.is_disjoint(&self.accepting))
                    .collect();
                return UnaryDfa {
                    tail,
                    period: seen.len() - tail,
                    accepting,
                };
            }
            let next = self.post(&s);
            seen.push(s);
            s = next;
        }
    }

    /// Parses `states N`, `initial q…`, `accepting q…`, then `q -> r…` lines.
    pub fn parse(text: &str) -> Result<Self> {
        let mut states: Option<usize> = None;
        let mut initial = StateSet::new();
        let mut accepting = StateSet::new();
        let mut edges: Vec<(u32, u32)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |m: &str| Error::parse(i + 1, 1, m.to_string());
            let nums = |s: &str| -> Result<Vec<u32>> {
                s.split_whitespace()
                    .map(|w| w.parse::<u32>().map_err(|_| bad("expected a state number")))
                    .collect()
            };
            if let Some(rest) = line.strip_prefix("states") {
                let v = nums(rest)?;
                if v.len() != 1 {
                    return Err(bad("`states` takes one number"));
                }
                states = Some(v[0] as usize);
            } else if let Some(rest) = line.strip_prefix("initial") {
                initial.extend(nums(rest)?);
            } else if let Some(rest) = line.strip_prefix("accepting") {
                accepting.extend(nums(rest)?);
            } else if let Some((l, r)) = line.split_once("->") {
                let from = nums(l)?;
                if from.len() != 1 {
                    return Err(bad("an edge line has one source state"));
                }
                edges.extend(nums(r)?.into_iter().map(|t| (from[0], t)));
            } else {
                return Err(bad(
                    "expected `states`, `initial`, `accepting` or `q -> r…`",
                ));
            }
        }
        let n = states.ok_or_else(|| Error::parse(1, 1, "missing `states` line"))?;
        let mut delta = vec![StateSet::new(); n];
        for (q, r) in edges {
            if q as usize >= n {
                return Err(Error::Rejected(format!("edge from missing state {q}")));
            }
            delta[q as usize].insert(r);
        }
        UnaryNfa::new(n, initial, delta, accepting)
    }

    pub fn render(&self) -> String {
        let list = |s: &StateSet| {
            s.iter()
                .map(|q| q.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        };
        let mut out = format!(
            "states {}\ninitial {}\naccepting {}\n",
            self.states,
            list(&self.initial),
            list(&self.accepting)
        );
        for (q, succ) in self.delta.iter().enumerate() {
            if !succ.is_empty() {
                out.push_str(&format!("{q} -> {}\n", list(succ)));
            }
        }
        out
    }
}

/// A unary DFA as a lasso: states `0..tail+period`, the last one stepping
/// back to `tail`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UnaryDfa {
    pub tail: usize,
    pub period: usize,
    pub accepting: Vec<bool>,
}

impl UnaryDfa {
    pub fn states(&self) -> usize {
        self.tail + self.period
    }

    pub fn accepts(&self, len: usize) -> bool {
        let i = if len < self.tail {
            len
        } else {
            self.tail + (len - self.tail) % self.period
        };
        self.accepting[i]
    }

    /// The language as a threshold language, or `NotLtlExpressible` when the
    /// cycle mixes accepting and rejecting states.
    pub fn threshold(&self) -> Result<ThresholdLanguage> {
        let cycle = &self.accepting[self.tail..];
        let above = cycle[0];
        if cycle.iter().any(|&b| b != above) {
            return Err(Error::NotLtlExpressible);
        }
        let n = self.tail.max(1);
        let mut l = ThresholdLanguage::new((1..=n).map(|m| self.accepts(m)).collect(), above);
        let g = l.boundary();
        l.membership.truncate(g);
        Ok(l)
    }
}

/// `V_k`: a `k`-cycle through the initial and accepting state 0, with a
/// one-state detour making rounds of length `k + 1` possible. Accepts `a^m`,
/// `m ≥ 1`, exactly when `m ∈ S_k = {ik + j(k+1)}`.
pub fn vk_nfa(k: usize) -> Result<UnaryNfa> {
    if k < 2 {
        return Err(Error::PreconditionViolated(format!(
            "V_k needs k ≥ 2, got {k}"
        )));
    }
    let detour = k as u32;
    let mut delta: Vec<StateSet> = (0..k as u32).map(|q| [(q + 1) % k as u32].into()).collect();
    delta[k - 1].insert(detour);
    delta.push([0].into());
    UnaryNfa::new(k + 1, [0].into(), delta, [0].into())
}

/// Largest natural number outside `S_k`, by the closed form `k² − k − 1`.
pub fn frobenius(k: usize) -> usize {
    k * k - k - 1
}

/// Longest rejected length among `1..=limit`, if any.
pub fn max_gap(accepts: impl Fn(usize) -> bool, limit: usize) -> Option<usize> {
    (1..=limit).rev().find(|&m| !accepts(m))
}

/// Translates a unary NFA through determinization and the threshold formula.
pub fn unary_nfa_to_ltl(st: &mut FormulaStore, n: &UnaryNfa) -> Result<FormulaId> {
    let l = n.determinize().threshold()?;
    threshold_formula(st, &l)
}

/// A positive Boolean formula node; children precede parents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PosBool {
    True,
    False,
    State(u32),
    And(u32, u32),
    Or(u32, u32),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnaryAfa {
    pub states: usize,
    /// Hash-consed formula arena shared by the initial condition and all transitions.
    pub nodes: Vec<PosBool>,
    pub initial: u32,
    pub delta: Vec<u32>,
    pub accepting: StateSet,
}

/// Builder for hash-consed positive formulas.
#[derive(Debug, Default)]
pub struct PosBoolArena {
    nodes: Vec<PosBool>,
    index: std::collections::HashMap<PosBool, u32>,
}

impl PosBoolArena {
    pub fn node(&mut self, n: PosBool) -> u32 {
        if let Some(&i) = self.index.get(&n) {
            return i;
        }
        let i = self.nodes.len() as u32;
        self.nodes.push(n);
        self.index.insert(n, i);
        i
    }

    pub fn state(&mut self, q: u32) -> u32 {
        self.node(PosBool::State(q))
    }

    pub fn and(&mut self, a: u32, b: u32) -> u32 {
        self.node(PosBool::And(a, b))
    }

    pub fn or(&mut self, a: u32, b: u32) -> u32 {
        self.node(PosBool::Or(a, b))
    }

    pub fn into_nodes(self) -> Vec<PosBool> {
        self.nodes
    }
}

impl UnaryAfa {
    fn eval_all(&self, val: &[bool]) -> Vec<bool> {
        let mut out = Vec::with_capacity(self.nodes.len());
        for n in &self.nodes {
            let v = match *n {
                PosBool::True => true,
                PosBool::False => false,
                PosBool::State(q) => val[q as usize],
                PosBool::And(a, b) => out[a as usize] && out[b as usize],
                PosBool::Or(a, b) => out[a as usize] || out[b as usize],
            };
            out.push(v);
        }
        out
    }

    /// Acceptance of `a^len` for every `len` in `0..=max`, by backward
    /// evaluation: a state accepts the empty suffix iff it is accepting, and
    /// `a^{r+1}` iff its transition holds under the valuation for `a^r`.
    pub fn language(&self, max: usize) -> Vec<bool> {
        let mut val: Vec<bool> = (0..self.states as u32)
            .map(|q| self.accepting.contains(&q))
            .collect();
        let mut out = Vec::with_capacity(max + 1);
        for r in 0..=max {
            let nodes = self.eval_all(&val);
            out.push(nodes[self.initial as usize]);
            if r < max {
                val = self.delta.iter().map(|&d| nodes[d as usize]).collect();
            }
        }
        out
    }

    /// Number of distinct subformulas of the transition function.
    pub fn size(&self) -> usize {
        let mut seen = vec![false; self.nodes.len()];
        let mut stack: Vec<u32> = self.delta.clone();
        let mut count = 0;
        while let Some(i) = stack.pop() {
            if std::mem::replace(&mut seen[i as usize], true) {
                continue;
            }
            count += 1;
            if let PosBool::And(a, b) | PosBool::Or(a, b) = self.nodes[i as usize] {
                stack.extend([a, b]);
            }
        }
        count
    }
}

/// Acceptance of `a^len`, `len ≥ 1`.
pub fn afa_accepts(a: &UnaryAfa, len: usize) -> Result<bool> {
    if len == 0 {
        return Err(Error::EmptyWord);
    }
    Ok(a.language(len)[len])
}

/// An alternating automaton with `2n` states accepting exactly `a^{2^{n−1}}`.
///
/// State `(i, b)` asserts "bit `i` of the remaining length is `b`".
/// Decrementing flips bit `i` of `r + 1` exactly when bits `0..i` of `r` are
/// all 1, which is checked universally with shared prefix chains. The top
/// bit has no wrap-around branch, so `(n−1, 0)` means `r < 2^{n−1}` and
/// `(n−1, 1)` means `2^{n−1} ≤ r < 2^n`.
pub fn counter_afa(n: usize) -> Result<UnaryAfa> {
    if n == 0 {
        return Err(Error::PreconditionViolated(
            "the counter needs at least one bit".into(),
        ));
    }
    let q = |i: usize, b: usize| (2 * i + b) as u32;
    let mut ar = PosBoolArena::default();
    let f = ar.node(PosBool::False);
    let t = ar.node(PosBool::True);
    // some lower bit is 0; all lower bits are 1
    let (mut some0, mut all1) = (f, t);
    let mut delta = vec![0u32; 2 * n];
    for i in 0..n {
        let (s0, s1) = (ar.state(q(i, 0)), ar.state(q(i, 1)));
        let keep1 = ar.and(s1, some0);
        let flip1 = ar.and(s0, all1);
        delta[q(i, 1) as usize] = ar.or(keep1, flip1);
        let keep0 = ar.and(s0, some0);
        delta[q(i, 0) as usize] = if i + 1 == n {
            keep0
        } else {
            let flip0 = ar.and(s1, all1);
            ar.or(keep0, flip0)
        };
        some0 = if i == 0 { s0 } else { ar.or(some0, s0) };
        all1 = if i == 0 { s1 } else { ar.and(all1, s1) };
    }
    let mut init = ar.state(q(n - 1, 1));
    for i in 0..n - 1 {
        let s = ar.state(q(i, 0));
        init = ar.and(init, s);
    }
    let accepting: StateSet = (0..n).map(|i| q(i, 0)).collect();
    Ok(UnaryAfa {
        states: 2 * n,
        nodes: ar.into_nodes(),
        initial: init,
        delta,
        accepting,
    })
}

/// One row of the succinctness evidence table for parameter `k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundsRow {
    pub k: usize,
    /// States of the DFA for `{a^k}` (a chain plus a sink).
    pub dfa_states: usize,
    pub dfa_ltl_size: usize,
    pub nfa_states: usize,
    /// DAG size of the formula for `V_k`.
    pub nfa_ltl_size: usize,
    pub afa_states: usize,
    pub afa_size: usize,
    /// DAG size of the formula for `{a^{2^{k−1}}}`.
    pub afa_ltl_size: usize,
}

/// Evidence for the `Θ(n)`, `Θ(n²)` and `Θ(2ⁿ)` DFA, NFA and AFA separations.
pub fn bounds_table(max_k: usize) -> Result<Vec<BoundsRow>> {
    let mut rows = Vec::new();
    for k in 2..=max_k {
        let mut st = unary_store();
        let d = threshold_formula(&mut st, &ThresholdLanguage::singleton(k))?;
        let v = unary_nfa_to_ltl(&mut st, &vk_nfa(k)?)?;
        let afa = counter_afa(k)?;
        let c = threshold_formula(&mut st, &ThresholdLanguage::singleton(1 << (k - 1)))?;
        rows.push(BoundsRow {
            k,
            dfa_states: k + 2,
            dfa_ltl_size: st.dag_size(d),
            nfa_states: k + 1,
            nfa_ltl_size: st.dag_size(v),
            afa_states: afa.states,
            afa_size: afa.size(),
            afa_ltl_size: st.dag_size(c),
        });
    }
    Ok(rows)
}
