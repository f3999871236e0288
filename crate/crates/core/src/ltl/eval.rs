//! Exact evaluation on finite words and lassos.
//!
//! Formulas are compiled to a straight-line program over the reachable DAG in
//! id order. Each program slot holds one truth bit-vector per position, and
//! each bit is a separate word (a lane), so up to 64 words of the same shape
//! are evaluated at once.

use super::store::{FormulaId, FormulaStore, Node};
use crate::alphabet::{Lasso, Letter};
use crate::error::{Error, Result};

pub const LANES: usize = 64;

#[derive(Debug, Clone, Copy)]
enum Instr {
    True,
    Atom(u32),
    Letter(u32),
    Not(u32),
    And(u32, u32),
    Or(u32, u32),
    Next(u32),
    Until(u32, u32),
    Release(u32, u32),
}

/// A compiled evaluator for a fixed set of root formulas.
#[derive(Debug, Clone)]
pub struct Program {
    instrs: Vec<Instr>,
    roots: Vec<usize>,
    aps: usize,
}

impl Program {
    pub fn new(store: &FormulaStore, roots: &[FormulaId]) -> Program {
        let order = store.reachable(roots);
        let mut slot = vec![u32::MAX; order.last().map_or(0, |f| f.index() + 1)];
        for (i, f) in order.iter().enumerate() {
            slot[f.index()] = i as u32;
        }
        let s = |c: FormulaId| slot[c.index()];
        let instrs = order
            .iter()
            .map(|&f| match store.node(f) {
                Node::True => Instr::True,
                Node::Atom(a) => Instr::Atom(a),
                Node::Letter(l) => Instr::Letter(l.0),
                Node::Not(c) => Instr::Not(s(c)),
                Node::And(a, b) => Instr::And(s(a), s(b)),
                Node::Or(a, b) => Instr::Or(s(a), s(b)),
                Node::Next(c) => Instr::Next(s(c)),
                Node::Until(a, b) => Instr::Until(s(a), s(b)),
                Node::Release(a, b) => Instr::Release(s(a), s(b)),
            })
            .collect();
        let roots = roots.iter().map(|&r| s(r) as usize).collect();
        Program {
            instrs,
            roots,
            aps: store.aps().len(),
        }
    }

    pub fn slots(&self) -> usize {
        self.instrs.len()
    }

    fn letter_bits(&self, atoms: &[u64], mask: u32) -> u64 {
        let mut r = !0u64;
        for (ap, &bits) in atoms.iter().enumerate().take(self.aps) {
            r &= if mask >> ap & 1 == 1 { bits } else { !bits };
        }
        r
    }

    /// Evaluates every slot at positions `0..p`.
    ///
    /// `atoms[j]` holds, per proposition, the lanes where it is true at `j`.
    /// With `wrap = Some(k)` position `p` is identified with `k` (a lasso);
    /// with `None` the word ends at `p` (strong next, finite semantics).
    fn eval_positions(&self, p: usize, wrap: Option<usize>, atoms: &[Vec<u64>]) -> Vec<u64> {
        let mut v = vec![0u64; self.instrs.len() * p];
        for (i, ins) in self.instrs.iter().enumerate() {
            let base = i * p;
            match *ins {
                Instr::True => v[base..base + p].fill(!0),
                Instr::Atom(a) => {
                    for j in 0..p {
                        v[base + j] = atoms[j][a as usize];
                    }
                }
                Instr::Letter(m) => {
                    for j in 0..p {
                        v[base + j] = self.letter_bits(&atoms[j], m);
                    }
                }
                Instr::Not(c) => {
                    let c = c as usize * p;
                    for j in 0..p {
                        v[base + j] = !v[c + j];
                    }
                }
                Instr::And(a, b) => {
                    let (a, b) = (a as usize * p, b as usize * p);
                    for j in 0..p {
                        v[base + j] = v[a + j] & v[b + j];
                    }
                }
                Instr::Or(a, b) => {
                    let (a, b) = (a as usize * p, b as usize * p);
                    for j in 0..p {
                        v[base + j] = v[a + j] | v[b + j];
                    }
                }
                Instr::Next(c) => {
                    let c = c as usize * p;
                    for j in 0..p {
                        v[base + j] = if j + 1 < p {
                            v[c + j + 1]
                        } else {
                            wrap.map_or(0, |k| v[c + k])
                        };
                    }
                }
                Instr::Until(a, b) => {
                    self.fixpoint(&mut v, base, a as usize * p, b as usize * p, p, wrap, false)
                }
                Instr::Release(a, b) => {
                    self.fixpoint(&mut v, base, a as usize * p, b as usize * p, p, wrap, true)
                }
            }
        }
        v
    }

    /// Until (least fixpoint) or Release (greatest fixpoint) of
    /// `x = r ⊙ (l ⊕ X x)`. Two sweeps over the cycle suffice: after the
    /// first, the value at the cycle entry is exact.
    #[allow(clippy::too_many_arguments)]
    fn fixpoint(
        &self,
        v: &mut [u64],
        out: usize,
        l: usize,
        r: usize,
        p: usize,
        wrap: Option<usize>,
        release: bool,
    ) {
        let step = |v: &[u64], j: usize, next: u64| {
            if release {
                v[r + j] & (v[l + j] | next)
            } else {
                v[r + j] | (v[l + j] & next)
            }
        };
        let init = if release { !0u64 } else { 0 };
        let mut next = init;
        let lo = match wrap {
            Some(k) => {
                for round in 0..2 {
                    if round == 1 {
                        next = v[out + k];
                    }
                    for j in (k..p).rev() {
                        next = step(v, j, next);
                        v[out + j] = next;
                    }
                }
                k
            }
            None => p,
        };
        for j in (0..lo).rev() {
            next = step(v, j, next);
            v[out + j] = next;
        }
    }

    fn single_atoms(&self, letters: impl Iterator<Item = Letter>) -> Vec<Vec<u64>> {
        letters
            .map(|l| {
                (0..self.aps)
                    .map(|a| if l.contains(a) { 1 } else { 0 })
                    .collect()
            })
            .collect()
    }

    /// Truth of root `r` at every position `0..|u|+|v|` of the lasso.
    pub fn truth_along(&self, lasso: &Lasso, r: usize) -> Vec<bool> {
        let p = lasso.positions();
        let atoms = self.single_atoms(lasso.spoke().iter().chain(lasso.cycle()).copied());
        let v = self.eval_positions(p, Some(lasso.spoke().len()), &atoms);
        let base = self.roots[r] * p;
        (0..p).map(|j| v[base + j] & 1 == 1).collect()
    }

    /// Truth of every root at position 0 of each lasso; all lassos must
    /// share one shape and there must be at most [`LANES`] of them.
    pub fn eval_same_shape(&self, lassos: &[&Lasso]) -> Vec<u64> {
        assert!(!lassos.is_empty() && lassos.len() <= LANES);
        let (su, sv) = (lassos[0].spoke().len(), lassos[0].cycle().len());
        assert!(lassos
            .iter()
            .all(|l| l.spoke().len() == su && l.cycle().len() == sv));
        let p = su + sv;
        let atoms: Vec<Vec<u64>> = (0..p)
            .map(|j| {
                (0..self.aps)
                    .map(|a| {
                        lassos.iter().enumerate().fold(0u64, |acc, (lane, l)| {
                            acc | (l.letter_at(j).contains(a) as u64) << lane
                        })
                    })
                    .collect()
            })
            .collect();
        let v = self.eval_positions(p, Some(su), &atoms);
        self.roots.iter().map(|&r| v[r * p]).collect()
    }

    /// Values of all slots at position 0 of `σ · w`, given the slots at
    /// position 0 of `w`. All lanes share the prepended letter.
    fn prepend(&self, sigma: Letter, next: &[u64], out: &mut Vec<u64>) {
        out.clear();
        for ins in &self.instrs {
            let x = match *ins {
                Instr::True => !0,
                Instr::Atom(a) => {
                    if sigma.contains(a as usize) {
                        !0
                    } else {
                        0
                    }
                }
                Instr::Letter(m) => {
                    if sigma.0 == m {
                        !0
                    } else {
                        0
                    }
                }
                Instr::Not(c) => !out[c as usize],
                Instr::And(a, b) => out[a as usize] & out[b as usize],
                Instr::Or(a, b) => out[a as usize] | out[b as usize],
                Instr::Next(c) => next[c as usize],
                Instr::Until(a, b) => out[b as usize] | (out[a as usize] & next[out.len()]),
                Instr::Release(a, b) => out[b as usize] & (out[a as usize] | next[out.len()]),
            };
            out.push(x);
        }
    }

    /// Visits every lasso `(u, v)` with `|u| ≤ max_u`, `1 ≤ |v| ≤ max_v` over
    /// an alphabet of `alphabet` letters, in chunks of up to [`LANES`] cycles
    /// sharing one spoke. The callback gets the spoke, the chunk's cycles and
    /// one lane mask per root.
    ///
    /// Cycle values are computed once per chunk; every spoke then costs a
    /// single prepend step.
    pub fn for_each_lasso_chunk<F>(&self, alphabet: usize, max_u: usize, max_v: usize, mut f: F)
    where
        F: FnMut(&[Letter], &[Vec<Letter>], &[u64]),
    {
        for k in 1..=max_v {
            for chunk in cycle_chunks(alphabet, k) {
                self.visit_chunk(alphabet, max_u, &chunk, &mut f);
            }
        }
    }

    /// The chunk-level work of [`Self::for_each_lasso_chunk`], exposed so
    /// callers can distribute chunks across threads.
    pub fn visit_chunk<F>(&self, alphabet: usize, max_u: usize, cycles: &[Vec<Letter>], f: &mut F)
    where
        F: FnMut(&[Letter], &[Vec<Letter>], &[u64]),
    {
        let k = cycles[0].len();
        let atoms: Vec<Vec<u64>> = (0..k)
            .map(|j| {
                (0..self.aps)
                    .map(|a| {
                        cycles.iter().enumerate().fold(0u64, |acc, (lane, c)| {
                            acc | (c[j].contains(a) as u64) << lane
                        })
                    })
                    .collect()
            })
            .collect();
        let v = self.eval_positions(k, Some(0), &atoms);
        let base: Vec<u64> = (0..self.instrs.len()).map(|i| v[i * k]).collect();
        let roots = |vals: &[u64]| -> Vec<u64> { self.roots.iter().map(|&r| vals[r]).collect() };
        f(&[], cycles, &roots(&base));
        let mut stack: Vec<Vec<u64>> = vec![base];
        let mut rev: Vec<Letter> = Vec::new();
        self.spoke_dfs(alphabet, max_u, cycles, &mut stack, &mut rev, f, &roots);
    }

    #[allow(clippy::too_many_arguments)]
    fn spoke_dfs<F>(
        &self,
        alphabet: usize,
        max_u: usize,
        cycles: &[Vec<Letter>],
        stack: &mut Vec<Vec<u64>>,
        rev: &mut Vec<Letter>,
        f: &mut F,
        roots: &dyn Fn(&[u64]) -> Vec<u64>,
    ) where
        F: FnMut(&[Letter], &[Vec<Letter>], &[u64]),
    {
        if rev.len() == max_u {
            return;
        }
        let mut buf = Vec::with_capacity(self.instrs.len());
        for s in 0..alphabet as u32 {
            let sigma = Letter(s);
            self.prepend(sigma, stack.last().unwrap(), &mut buf);
            rev.push(sigma);
            let spoke: Vec<Letter> = rev.iter().rev().copied().collect();
            f(&spoke, cycles, &roots(&buf));
            stack.push(std::mem::take(&mut buf));
            self.spoke_dfs(alphabet, max_u, cycles, stack, rev, f, roots);
            buf = stack.pop().unwrap();
            rev.pop();
        }
    }
}

/// All cycles of length `k`, in lexicographic order, in chunks of [`LANES`].
pub fn cycle_chunks(alphabet: usize, k: usize) -> Vec<Vec<Vec<Letter>>> {
    let total = alphabet.pow(k as u32);
    let words: Vec<Vec<Letter>> = (0..total).map(|n| word_of_index(n, alphabet, k)).collect();
    words.chunks(LANES).map(|c| c.to_vec()).collect()
}

/// The `n`-th word of length `k` in lexicographic order (first letter most significant).
pub fn word_of_index(mut n: usize, alphabet: usize, k: usize) -> Vec<Letter> {
    let mut w = vec![Letter(0); k];
    for j in (0..k).rev() {
        w[j] = Letter((n % alphabet) as u32);
        n /= alphabet;
    }
    w
}

impl FormulaStore {
    pub fn evaluate_lasso(&self, f: FormulaId, lasso: &Lasso) -> bool {
        Program::new(self, &[f]).truth_along(lasso, 0)[0]
    }

    /// Truth at every position `0..|u|+|v|`.
    pub fn truth_along_lasso(&self, f: FormulaId, lasso: &Lasso) -> Vec<bool> {
        Program::new(self, &[f]).truth_along(lasso, 0)
    }

    /// Parses both parts and evaluates; an empty period is an error.
    pub fn evaluate_lasso_parts(
        &self,
        f: FormulaId,
        spoke: &[Letter],
        cycle: &[Letter],
    ) -> Result<bool> {
        let lasso = Lasso::new(spoke.to_vec(), cycle.to_vec())?;
        Ok(self.evaluate_lasso(f, &lasso))
    }

    pub fn evaluate_finite(&self, f: FormulaId, word: &[Letter]) -> Result<bool> {
        Ok(self.truth_along_finite(f, word)?[0])
    }

    /// Truth at every position of a nonempty finite word.
    pub fn truth_along_finite(&self, f: FormulaId, word: &[Letter]) -> Result<Vec<bool>> {
        if word.is_empty() {
            return Err(Error::EmptyWord);
        }
        let prog = Program::new(self, &[f]);
        let atoms = prog.single_atoms(word.iter().copied());
        let v = prog.eval_positions(word.len(), None, &atoms);
        let base = prog.roots[0] * word.len();
        Ok((0..word.len()).map(|j| v[base + j] & 1 == 1).collect())
    }
}
