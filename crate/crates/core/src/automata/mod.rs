//! Deterministic semiautomata and omega-automata over `2^AP`.

mod hoa;
mod monoid;
pub(crate) mod native;
mod structure;

use std::collections::BTreeSet;

pub use hoa::parse_hoa;
pub use monoid::{is_counter_free, is_reset, transition_monoid};
pub use native::{parse_automaton, render_automaton};
pub use structure::{sccs, StructuralFlags};

use crate::alphabet::{ApSet, Lasso, Letter};
use crate::error::{Error, Result};

pub type StateSet = BTreeSet<u32>;

/// Total deterministic transition function, stored row-major by state.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Semiautomaton {
    aps: ApSet,
    states: usize,
    delta: Vec<u32>,
}

impl Semiautomaton {
    /// `delta[q * |Σ| + σ]` is the successor of `q` on letter `σ`.
    pub fn new(aps: ApSet, states: usize, delta: Vec<u32>) -> Result<Self> {
        if states == 0 {
            return Err(Error::Rejected(
                "a semiautomaton needs at least one state".into(),
            ));
        }
        if delta.len() != states * aps.alphabet_size() {
            return Err(Error::Rejected(format!(
                "transition table has {} entries, expected {}",
                delta.len(),
                states * aps.alphabet_size()
            )));
        }
        if let Some(bad) = delta.iter().find(|&&t| t as usize >= states) {
            return Err(Error::Rejected(format!(
                "transition target {bad} out of range"
            )));
        }
        Ok(Semiautomaton { aps, states, delta })
    }

    pub fn from_fn(aps: ApSet, states: usize, f: impl Fn(u32, Letter) -> u32) -> Result<Self> {
        let mut delta = Vec::with_capacity(states * aps.alphabet_size());
        for q in 0..states as u32 {
            for l in aps.letters() {
                delta.push(f(q, l));
            }
        }
        Semiautomaton::new(aps, states, delta)
    }

    pub fn aps(&self) -> &ApSet {
        &self.aps
    }

    pub fn states(&self) -> usize {
        self.states
    }

    pub fn alphabet_size(&self) -> usize {
        self.aps.alphabet_size()
    }

    pub fn step(&self, q: u32, l: Letter) -> u32 {
        self.delta[q as usize * self.alphabet_size() + l.index()]
    }

    pub fn run(&self, q: u32, word: &[Letter]) -> u32 {
        word.iter().fold(q, |q, &l| self.step(q, l))
    }

    /// The map `q ↦ δ(q, σ)` of one letter.
    pub fn letter_action(&self, l: Letter) -> Vec<u32> {
        (0..self.states as u32).map(|q| self.step(q, l)).collect()
    }

    /// Number of distinct letter actions.
    pub fn effective_alphabet_size(&self) -> usize {
        self.aps
            .letters()
            .map(|l| self.letter_action(l))
            .collect::<BTreeSet<_>>()
            .len()
    }

    /// States reachable from `q`, including `q`.
    pub fn reachable_from(&self, q: u32) -> StateSet {
        let mut seen = StateSet::new();
        let mut stack = vec![q];
        while let Some(p) = stack.pop() {
            if seen.insert(p) {
                stack.extend(self.aps.letters().map(|l| self.step(p, l)));
            }
        }
        seen
    }

    /// The same transition structure with states renamed by `perm[old] = new`.
    pub fn permuted(&self, perm: &[u32]) -> Semiautomaton {
        let mut inv = vec![0u32; self.states];
        for (old, &new) in perm.iter().enumerate() {
            inv[new as usize] = old as u32;
        }
        Semiautomaton::from_fn(self.aps.clone(), self.states, |q, l| {
            perm[self.step(inv[q as usize], l) as usize]
        })
        .expect("permutation preserves totality")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum AcceptanceCondition {
    /// `inf ∩ α ≠ ∅`.
    Buchi(StateSet),
    /// `inf ∩ α = ∅`.
    CoBuchi(StateSet),
    /// Some pair `(G, B)` with `inf ∩ G ≠ ∅` and `inf ∩ B = ∅`.
    Rabin(Vec<(StateSet, StateSet)>),
    /// `inf` equals one of the sets.
    Muller(Vec<StateSet>),
}

impl AcceptanceCondition {
    pub fn accepts(&self, inf: &StateSet) -> bool {
        match self {
            AcceptanceCondition::Buchi(a) => !inf.is_disjoint(a),
            AcceptanceCondition::CoBuchi(a) => inf.is_disjoint(a),
            AcceptanceCondition::Rabin(pairs) => pairs
                .iter()
                .any(|(g, b)| !inf.is_disjoint(g) && inf.is_disjoint(b)),
            AcceptanceCondition::Muller(sets) => sets.iter().any(|m| m == inf),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            AcceptanceCondition::Buchi(_) => "Buchi",
            AcceptanceCondition::CoBuchi(_) => "CoBuchi",
            AcceptanceCondition::Rabin(_) => "Rabin",
            AcceptanceCondition::Muller(_) => "Muller",
        }
    }

    fn referenced(&self) -> Box<dyn Iterator<Item = u32> + '_> {
        match self {
            AcceptanceCondition::Buchi(a) | AcceptanceCondition::CoBuchi(a) => {
                Box::new(a.iter().copied())
            }
            AcceptanceCondition::Rabin(p) => {
                Box::new(p.iter().flat_map(|(g, b)| g.iter().chain(b).copied()))
            }
            AcceptanceCondition::Muller(m) => Box::new(m.iter().flatten().copied()),
        }
    }

    pub fn validate(&self, states: usize) -> Result<()> {
        if let Some(q) = self.referenced().find(|&q| q as usize >= states) {
            return Err(Error::Rejected(format!(
                "acceptance references missing state {q}"
            )));
        }
        if let AcceptanceCondition::Muller(m) = self {
            if m.iter().any(|s| s.is_empty()) {
                return Err(Error::Rejected("Muller sets must be nonempty".into()));
            }
        }
        Ok(())
    }

    /// Bitmask form of the condition, valid while every state is below 64.
    fn masks(&self) -> MaskCondition {
        let m = |s: &StateSet| s.iter().fold(0u64, |acc, &q| acc | 1 << q);
        match self {
            AcceptanceCondition::Buchi(a) => MaskCondition::Buchi(m(a)),
            AcceptanceCondition::CoBuchi(a) => MaskCondition::CoBuchi(m(a)),
            AcceptanceCondition::Rabin(p) => {
                MaskCondition::Rabin(p.iter().map(|(g, b)| (m(g), m(b))).collect())
            }
            AcceptanceCondition::Muller(s) => MaskCondition::Muller(s.iter().map(m).collect()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum MaskCondition {
    Buchi(u64),
    CoBuchi(u64),
    Rabin(Vec<(u64, u64)>),
    Muller(Vec<u64>),
}

impl MaskCondition {
    fn accepts(&self, inf: u64) -> bool {
        match self {
            MaskCondition::Buchi(a) => inf & a != 0,
            MaskCondition::CoBuchi(a) => inf & a == 0,
            MaskCondition::Rabin(p) => p.iter().any(|&(g, b)| inf & g != 0 && inf & b == 0),
            MaskCondition::Muller(s) => s.contains(&inf),
        }
    }
}

/// Anything that decides acceptance of lassos: used by the equivalence checker.
/// Verdicts of `u · v^ω` for a fixed cycle `v`, as a function of the spoke `u`.
pub type SpokeVerdicts<'a> = Box<dyn Fn(&[Letter]) -> bool + 'a>;

pub trait LassoAcceptor: Sync {
    fn aps(&self) -> &ApSet;

    fn accepts(&self, lasso: &Lasso) -> bool;

    /// Acceptance of `u · v^ω` for every spoke at once: returns a closure
    /// from spokes to verdicts. The default just builds lassos.
    fn with_cycle<'a>(&'a self, cycle: &[Letter]) -> SpokeVerdicts<'a> {
        let cycle = cycle.to_vec();
        Box::new(move |spoke| {
            self.accepts(&Lasso::new(spoke.to_vec(), cycle.clone()).expect("nonempty cycle"))
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OmegaAutomaton {
    semi: Semiautomaton,
    initial: u32,
    acceptance: AcceptanceCondition,
    masks: Option<MaskCondition>,
}

impl OmegaAutomaton {
    pub fn new(semi: Semiautomaton, initial: u32, acceptance: AcceptanceCondition) -> Result<Self> {
        if initial as usize >= semi.states() {
            return Err(Error::Rejected(format!(
                "initial state {initial} out of range"
            )));
        }
        acceptance.validate(semi.states())?;
        let masks = (semi.states() <= 64).then(|| acceptance.masks());
        Ok(OmegaAutomaton {
            semi,
            initial,
            acceptance,
            masks,
        })
    }

    pub fn semi(&self) -> &Semiautomaton {
        &self.semi
    }

    pub fn initial(&self) -> u32 {
        self.initial
    }

    pub fn acceptance(&self) -> &AcceptanceCondition {
        &self.acceptance
    }

    pub fn states(&self) -> usize {
        self.semi.states()
    }

    /// States visited infinitely often on the run from `q` over `cycle^ω`,
    /// together with the verdict.
    pub fn run_cycle_from(&self, q: u32, cycle: &[Letter]) -> (StateSet, bool) {
        let (starts, visits) = self.cycle_iterations(q, cycle);
        let mut inf = StateSet::new();
        for it in &visits[starts..] {
            inf.extend(it.iter().copied());
        }
        let acc = self.acceptance.accepts(&inf);
        (inf, acc)
    }

    /// Iterates the cycle from `q` until a cycle-start state repeats.
    /// Returns the index of the first repeated iteration and the states seen
    /// in each iteration.
    fn cycle_iterations(&self, mut q: u32, cycle: &[Letter]) -> (usize, Vec<Vec<u32>>) {
        let mut starts: Vec<u32> = Vec::new();
        let mut visits: Vec<Vec<u32>> = Vec::new();
        loop {
            if let Some(k) = starts.iter().position(|&s| s == q) {
                return (k, visits);
            }
            starts.push(q);
            let mut it = Vec::with_capacity(cycle.len());
            for &l in cycle {
                it.push(q);
                q = self.semi.step(q, l);
            }
            visits.push(it);
        }
    }

    /// Infinitely-visited states and verdict of the run from the initial state.
    pub fn run_lasso(&self, lasso: &Lasso) -> (StateSet, bool) {
        let q = self.semi.run(self.initial, lasso.spoke());
        self.run_cycle_from(q, lasso.cycle())
    }

    fn cycle_verdict_from(&self, q: u32, cycle: &[Letter]) -> bool {
        match &self.masks {
            Some(m) => {
                let (k, visits) = self.cycle_iterations(q, cycle);
                let inf = visits[k..]
                    .iter()
                    .flatten()
                    .fold(0u64, |acc, &s| acc | 1 << s);
                m.accepts(inf)
            }
            None => self.run_cycle_from(q, cycle).1,
        }
    }

    /// Verdict of `cycle^ω` read from each state.
    pub fn cycle_verdicts(&self, cycle: &[Letter]) -> Vec<bool> {
        (0..self.states() as u32)
            .map(|q| self.cycle_verdict_from(q, cycle))
            .collect()
    }

    /// Same semiautomaton, Muller condition listing every accepted nonempty subset.
    pub fn to_muller(&self) -> Result<OmegaAutomaton> {
        let n = self.states();
        if n > 20 {
            return Err(Error::TooLarge {
                what: "subset enumeration".into(),
                count: format!("2^{n}"),
                limit: 1 << 20,
            });
        }
        let sets: Vec<StateSet> = (1u64..1 << n)
            .map(|mask| {
                (0..n as u32)
                    .filter(|q| mask >> q & 1 == 1)
                    .collect::<StateSet>()
            })
            .filter(|s| self.acceptance.accepts(s))
            .collect();
        OmegaAutomaton::new(
            self.semi.clone(),
            self.initial,
            AcceptanceCondition::Muller(sets),
        )
    }

    /// Weak and looping flags; only defined for Büchi and coBüchi conditions.
    pub fn classify_structure(&self) -> Result<StructuralFlags> {
        structure::classify(self)
    }

    /// The automaton with states renamed by `perm[old] = new`.
    pub fn permuted(&self, perm: &[u32]) -> OmegaAutomaton {
        let p = |s: &StateSet| s.iter().map(|&q| perm[q as usize]).collect::<StateSet>();
        let acc = match &self.acceptance {
            AcceptanceCondition::Buchi(a) => AcceptanceCondition::Buchi(p(a)),
            AcceptanceCondition::CoBuchi(a) => AcceptanceCondition::CoBuchi(p(a)),
            AcceptanceCondition::Rabin(pairs) => {
                AcceptanceCondition::Rabin(pairs.iter().map(|(g, b)| (p(g), p(b))).collect())
            }
            AcceptanceCondition::Muller(m) => {
                AcceptanceCondition::Muller(m.iter().map(p).collect())
            }
        };
        OmegaAutomaton::new(self.semi.permuted(perm), perm[self.initial as usize], acc)
            .expect("renaming keeps validity")
    }
}

impl LassoAcceptor for OmegaAutomaton {
    fn aps(&self) -> &ApSet {
        self.semi.aps()
    }

    fn accepts(&self, lasso: &Lasso) -> bool {
        let q = self.semi.run(self.initial, lasso.spoke());
        self.cycle_verdict_from(q, lasso.cycle())
    }

    fn with_cycle<'a>(&'a self, cycle: &[Letter]) -> SpokeVerdicts<'a> {
        let table = self.cycle_verdicts(cycle);
        Box::new(move |spoke| table[self.semi.run(self.initial, spoke) as usize])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(v: &[u32]) -> StateSet {
        v.iter().copied().collect()
    }

    /// Two states; `{p}` moves to 1, `{}` stays.
    fn tiny(acc: AcceptanceCondition) -> OmegaAutomaton {
        let aps = ApSet::new(&["p"]).unwrap();
        let semi =
            Semiautomaton::from_fn(aps, 2, |q, l| if l.contains(0) { 1 } else { q }).unwrap();
        OmegaAutomaton::new(semi, 0, acc).unwrap()
    }

    #[test]
    fn run_lasso_examples() {
        let lasso = Lasso::new(vec![Letter(1)], vec![Letter(0)]).unwrap();
        let b = tiny(AcceptanceCondition::Buchi(set(&[1])));
        assert_eq!(b.run_lasso(&lasso), (set(&[1]), true));
        let c = tiny(AcceptanceCondition::CoBuchi(set(&[1])));
        assert!(!c.run_lasso(&lasso).1);
        let r = tiny(AcceptanceCondition::Rabin(vec![(set(&[1]), set(&[0]))]));
        assert!(r.run_lasso(&lasso).1);
        let never = Lasso::new(vec![], vec![Letter(0)]).unwrap();
        assert_eq!(r.run_lasso(&never), (set(&[0]), false));
    }

    #[test]
    fn inf_set_of_alternating_run() {
        // a two-cycle that only repeats its phase after two periods
        let aps = ApSet::new(&["p"]).unwrap();
        let semi =
            Semiautomaton::from_fn(aps, 3, |q, l| if l.contains(0) { (q + 1) % 3 } else { q })
                .unwrap();
        let a = OmegaAutomaton::new(semi, 0, AcceptanceCondition::Muller(vec![set(&[0, 1, 2])]))
            .unwrap();
        let lasso = Lasso::new(vec![], vec![Letter(1), Letter(1)]).unwrap();
        assert_eq!(a.run_lasso(&lasso), (set(&[0, 1, 2]), true));
        assert!(a.accepts(&lasso));
    }

    #[test]
    fn to_muller_examples() {
        let b = tiny(AcceptanceCondition::Buchi(set(&[1])));
        assert_eq!(
            b.to_muller().unwrap().acceptance(),
            &AcceptanceCondition::Muller(vec![set(&[1]), set(&[0, 1])])
        );
        let c = tiny(AcceptanceCondition::CoBuchi(set(&[1])));
        assert_eq!(
            c.to_muller().unwrap().acceptance(),
            &AcceptanceCondition::Muller(vec![set(&[0])])
        );
    }

    #[test]
    fn validation() {
        let aps = ApSet::new(&["p"]).unwrap();
        assert!(Semiautomaton::new(aps.clone(), 1, vec![0]).is_err());
        assert!(Semiautomaton::new(aps.clone(), 1, vec![0, 1]).is_err());
        let semi = Semiautomaton::new(aps, 1, vec![0, 0]).unwrap();
        assert!(
            OmegaAutomaton::new(semi.clone(), 0, AcceptanceCondition::Muller(vec![set(&[])]))
                .is_err()
        );
        assert!(OmegaAutomaton::new(semi, 0, AcceptanceCondition::Buchi(set(&[3]))).is_err());
    }
}
