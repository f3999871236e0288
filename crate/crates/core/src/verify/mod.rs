//! Independent oracles: lasso-family equivalence, the intended semantics of
//! reachability formulas, the extended Wolper property and seeded corpora.

mod corpus;
mod oracle;

use std::fmt;

pub use corpus::{generate_corpus, random_cascade, random_formula, random_request, CorpusKind};
pub use oracle::{fin_by_simulation, horizon, intended_semantics, Oracle};

use crate::alphabet::{ApSet, Lasso, Letter};
use crate::automata::LassoAcceptor;
use crate::error::{Error, Result};
use crate::ltl::{FormulaId, FormulaStore, Program};

/// All lassos `(u, v)` with `|u| ≤ max_spoke` and `1 ≤ |v| ≤ max_cycle`.
///
/// Enumeration order: by cycle length, then cycle in lexicographic order
/// grouped into chunks of 64, then spoke in depth-first order of
/// prepended letters, then lane.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LassoFamily {
    pub aps: ApSet,
    pub max_spoke: usize,
    pub max_cycle: usize,
}

impl LassoFamily {
    pub fn new(aps: ApSet, max_spoke: usize, max_cycle: usize) -> Self {
        LassoFamily {
            aps,
            max_spoke,
            max_cycle,
        }
    }

    /// Number of `(u, v)` pairs, counted with multiplicity of representation.
    pub fn len(&self) -> u128 {
        let s = self.aps.alphabet_size() as u128;
        let spokes: u128 = (0..=self.max_spoke as u32).map(|k| s.pow(k)).sum();
        let cycles: u128 = (1..=self.max_cycle as u32).map(|k| s.pow(k)).sum();
        spokes * cycles
    }

    pub fn is_empty(&self) -> bool {
        self.max_cycle == 0
    }

    /// Visits the family in enumeration order with the truth of every root
    /// of `prog`; stops early when `f` returns `false`.
    pub fn visit(
        &self,
        prog: &Program,
        mut f: impl FnMut(&[Letter], &[Vec<Letter>], &[u64]) -> bool,
    ) {
        let mut go = true;
        prog.for_each_lasso_chunk(
            self.aps.alphabet_size(),
            self.max_spoke,
            self.max_cycle,
            |u, cycles, masks| {
                if go {
                    go = f(u, cycles, masks);
                }
            },
        );
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub lasso: Lasso,
    pub expected: bool,
    pub got: bool,
    pub context: String,
}

impl Counterexample {
    pub fn display<'a>(&'a self, aps: &'a ApSet) -> CounterexampleDisplay<'a> {
        CounterexampleDisplay { cx: self, aps }
    }
}

pub struct CounterexampleDisplay<'a> {
    cx: &'a Counterexample,
    aps: &'a ApSet,
}

impl fmt::Display for CounterexampleDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: expected {}, formula gives {} ({})",
            self.cx.lasso.display(self.aps),
            self.cx.expected,
            self.cx.got,
            self.cx.context
        )
    }
}

/// First lasso of `fam` on which `phi` and `a` disagree.
pub fn equivalent_on_lassos(
    st: &FormulaStore,
    phi: FormulaId,
    a: &dyn LassoAcceptor,
    fam: &LassoFamily,
) -> Option<Counterexample> {
    let prog = Program::new(st, &[phi]);
    let mut found = None;
    // verdict tables for the cycles of the current chunk, keyed by its first cycle
    let mut key: Option<(Vec<Letter>, usize)> = None;
    let mut tables: Vec<crate::automata::SpokeVerdicts<'_>> = Vec::new();
    fam.visit(&prog, |u, cycles, masks| {
        let k = (cycles[0].clone(), cycles.len());
        if key.as_ref() != Some(&k) {
            tables = cycles.iter().map(|v| a.with_cycle(v)).collect();
            key = Some(k);
        }
        for (lane, v) in cycles.iter().enumerate() {
            let got = masks[0] >> lane & 1 == 1;
            let expected = tables[lane](u);
            if got != expected {
                found = Some(Counterexample {
                    lasso: Lasso::new(u.to_vec(), v.clone()).expect("nonempty cycle"),
                    expected,
                    got,
                    context: "formula vs automaton".into(),
                });
                return false;
            }
        }
        true
    });
    found
}

/// First lasso of `fam` on which two formulas of one store disagree; `expected` is `g`.
pub fn formulas_agree_on_lassos(
    st: &FormulaStore,
    f: FormulaId,
    g: FormulaId,
    fam: &LassoFamily,
) -> Option<Counterexample> {
    let prog = Program::new(st, &[f, g]);
    let mut found = None;
    fam.visit(&prog, |u, cycles, masks| {
        let diff = masks[0] ^ masks[1];
        let lanes = if cycles.len() == 64 {
            !0
        } else {
            (1u64 << cycles.len()) - 1
        };
        if diff & lanes == 0 {
            return true;
        }
        let lane = (diff & lanes).trailing_zeros() as usize;
        found = Some(Counterexample {
            lasso: Lasso::new(u.to_vec(), cycles[lane].clone()).expect("nonempty cycle"),
            expected: masks[1] >> lane & 1 == 1,
            got: masks[0] >> lane & 1 == 1,
            context: "formula vs formula".into(),
        });
        false
    });
    found
}

/// Truth of `phi` on `u·v^i·t` and `u·v^j·t` agrees. Both `i` and `j` must
/// exceed the temporal depth of `phi`.
pub fn wolper_check(
    st: &FormulaStore,
    phi: FormulaId,
    u: &[Letter],
    v: &[Letter],
    t: &Lasso,
    i: usize,
    j: usize,
) -> Result<bool> {
    let d = st.depth(phi) as usize;
    if i <= d || j <= d {
        return Err(Error::PreconditionViolated(format!(
            "i = {i} and j = {j} must exceed the depth {d}"
        )));
    }
    if v.is_empty() {
        return Err(Error::EmptyWord);
    }
    let word = |k: usize| {
        let mut spoke = u.to_vec();
        for _ in 0..k {
            spoke.extend_from_slice(v);
        }
        spoke.extend_from_slice(t.spoke());
        Lasso::new(spoke, t.cycle().to_vec()).expect("nonempty cycle")
    };
    Ok(st.evaluate_lasso(phi, &word(i)) == st.evaluate_lasso(phi, &word(j)))
}
