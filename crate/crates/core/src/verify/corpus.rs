//! Seeded random automata, cascades, formulas and reachability requests.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::alphabet::{ApSet, Letter};
use crate::automata::{
    is_counter_free, sccs, AcceptanceCondition, OmegaAutomaton, Semiautomaton, StateSet,
};
use crate::cascade::{Action, Configuration, LevelSpec, ResetCascade};
use crate::ltl::{FormulaId, FormulaStore};
use crate::reach::{ReachKind, ReachRequest};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum CorpusKind {
    Buchi,
    CoBuchi,
    Weak,
    LoopingBuchi,
    LoopingCoBuchi,
    Muller,
}

impl CorpusKind {
    pub const ALL: [CorpusKind; 6] = [
        CorpusKind::Buchi,
        CorpusKind::CoBuchi,
        CorpusKind::Weak,
        CorpusKind::LoopingBuchi,
        CorpusKind::LoopingCoBuchi,
        CorpusKind::Muller,
    ];
}

/// Deterministic pseudo-random counter-free automata, cycling through
/// `kinds`. Every state is reachable from the initial state 0.
pub fn generate_corpus(
    seed: u64,
    count: usize,
    max_states: usize,
    ap_count: usize,
    kinds: &[CorpusKind],
) -> Vec<(CorpusKind, OmegaAutomaton)> {
    assert!(max_states >= 1 && !kinds.is_empty());
    let names: Vec<String> = ["p", "q", "r", "s"]
        .iter()
        .take(ap_count)
        .map(|s| s.to_string())
        .collect();
    let names = if ap_count > 4 {
        (0..ap_count).map(|i| format!("p{i}")).collect()
    } else {
        names
    };
    let aps = ApSet::new(&names).expect("valid proposition names");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut k = 0;
    while out.len() < count {
        let kind = kinds[k % kinds.len()];
        if let Some(a) = sample(&mut rng, &aps, max_states, kind) {
            out.push((kind, a));
            k += 1;
        }
    }
    out
}

fn random_semi(rng: &mut ChaCha8Rng, aps: &ApSet, n: usize, sink: Option<u32>) -> Semiautomaton {
    let sigma = aps.alphabet_size();
    let mut delta = Vec::with_capacity(n * sigma);
    for q in 0..n as u32 {
        for _ in 0..sigma {
            delta.push(if Some(q) == sink {
                q
            } else {
                rng.gen_range(0..n as u32)
            });
        }
    }
    Semiautomaton::new(aps.clone(), n, delta).expect("valid table")
}

fn random_subset(rng: &mut ChaCha8Rng, n: usize) -> StateSet {
    (0..n as u32).filter(|_| rng.gen_bool(0.5)).collect()
}

fn sample(
    rng: &mut ChaCha8Rng,
    aps: &ApSet,
    max_states: usize,
    kind: CorpusKind,
) -> Option<OmegaAutomaton> {
    let looping = matches!(kind, CorpusKind::LoopingBuchi | CorpusKind::LoopingCoBuchi);
    let n =
        rng.gen_range(if looping { 2 } else { 1 }..=max_states.max(if looping { 2 } else { 1 }));
    let sink = looping.then(|| rng.gen_range(1..n as u32));
    let semi = random_semi(rng, aps, n, sink);
    if semi.reachable_from(0).len() != n || !is_counter_free(&semi) {
        return None;
    }
    let all: StateSet = (0..n as u32).collect();
    let acc = match kind {
        CorpusKind::Buchi => AcceptanceCondition::Buchi(random_subset(rng, n)),
        CorpusKind::CoBuchi => AcceptanceCondition::CoBuchi(random_subset(rng, n)),
        CorpusKind::Weak => {
            let mut alpha = StateSet::new();
            for comp in sccs(&semi) {
                if rng.gen_bool(0.5) {
                    alpha.extend(comp);
                }
            }
            if rng.gen_bool(0.5) {
                AcceptanceCondition::Buchi(alpha)
            } else {
                AcceptanceCondition::CoBuchi(alpha)
            }
        }
        CorpusKind::LoopingBuchi | CorpusKind::LoopingCoBuchi => {
            let mut alpha = all.clone();
            alpha.remove(&sink.expect("looping kinds have a sink"));
            if kind == CorpusKind::LoopingBuchi {
                AcceptanceCondition::Buchi(alpha)
            } else {
                AcceptanceCondition::CoBuchi(alpha)
            }
        }
        CorpusKind::Muller => {
            let sets = rng.gen_range(1..=2.min((1usize << n) - 1));
            let mut m: Vec<StateSet> = Vec::new();
            while m.len() < sets {
                let s = random_subset(rng, n);
                if !s.is_empty() && !m.contains(&s) {
                    m.push(s);
                }
            }
            AcceptanceCondition::Muller(m)
        }
    };
    OmegaAutomaton::new(semi, 0, acc).ok()
}

/// A reset cascade with `1..=max_levels` levels of `1..=max_states` states;
/// each action is the identity or a random reset with equal odds.
pub fn random_cascade(
    rng: &mut impl Rng,
    aps: &ApSet,
    max_levels: usize,
    max_states: u32,
) -> ResetCascade {
    let levels = rng.gen_range(1..=max_levels);
    let mut states = Vec::with_capacity(levels);
    let mut specs = Vec::with_capacity(levels);
    for i in 0..levels {
        let k = rng.gen_range(1..=max_states);
        let lowers: usize = states.iter().map(|&s| s as usize).product();
        let mut entries = BTreeMap::new();
        for l in aps.letters() {
            for idx in 0..lowers {
                let mut lower = vec![0u32; i];
                let mut x = idx;
                for j in (0..i).rev() {
                    lower[j] = (x % states[j] as usize) as u32;
                    x /= states[j] as usize;
                }
                if rng.gen_bool(0.5) {
                    entries.insert((l, lower), Action::Reset(rng.gen_range(0..k)));
                }
            }
        }
        states.push(k);
        specs.push(LevelSpec {
            states: k,
            default: Action::Identity,
            entries,
        });
    }
    ResetCascade::new(aps.clone(), specs).expect("valid random cascade")
}

/// A random formula of temporal depth at most `depth` over the store's
/// propositions, using every connective.
pub fn random_formula(rng: &mut impl Rng, st: &mut FormulaStore, depth: u32) -> FormulaId {
    let leaf = |rng: &mut dyn rand::RngCore, st: &mut FormulaStore| -> FormulaId {
        let aps = st.aps().len();
        match rng.gen_range(0..4) {
            0 => st.tt(),
            1 => st.ff(),
            2 if aps > 0 => {
                let l = Letter(rng.gen_range(0..st.aps().alphabet_size() as u32));
                st.letter(l)
            }
            _ if aps > 0 => st.atom_index(rng.gen_range(0..aps)).expect("declared atom"),
            _ => st.tt(),
        }
    };
    gen(rng, st, depth, 3, &leaf)
}

fn gen(
    rng: &mut impl Rng,
    st: &mut FormulaStore,
    depth: u32,
    size: u32,
    leaf: &dyn Fn(&mut dyn rand::RngCore, &mut FormulaStore) -> FormulaId,
) -> FormulaId {
    if size == 0 || rng.gen_bool(0.25) {
        return leaf(rng, st);
    }
    let temporal = depth > 0 && rng.gen_bool(0.6);
    if temporal {
        match rng.gen_range(0..3) {
            0 => {
                let a = gen(rng, st, depth - 1, size - 1, leaf);
                st.next(a)
            }
            1 => {
                let (a, b) = (
                    gen(rng, st, depth - 1, size - 1, leaf),
                    gen(rng, st, depth - 1, size - 1, leaf),
                );
                st.until(a, b)
            }
            _ => {
                let (a, b) = (
                    gen(rng, st, depth - 1, size - 1, leaf),
                    gen(rng, st, depth - 1, size - 1, leaf),
                );
                st.release(a, b)
            }
        }
    } else {
        match rng.gen_range(0..3) {
            0 => {
                let a = gen(rng, st, depth, size - 1, leaf);
                st.not(a)
            }
            1 => {
                let (a, b) = (
                    gen(rng, st, depth, size - 1, leaf),
                    gen(rng, st, depth, size - 1, leaf),
                );
                st.and(a, b)
            }
            _ => {
                let (a, b) = (
                    gen(rng, st, depth, size - 1, leaf),
                    gen(rng, st, depth, size - 1, leaf),
                );
                st.or(a, b)
            }
        }
    }
}

/// A random well-formed request of the given kind on `c`, with `β`, `τ`
/// of depth at most `formula_depth`.
pub fn random_request(
    rng: &mut impl Rng,
    c: &ResetCascade,
    st: &mut FormulaStore,
    kind: ReachKind,
    formula_depth: u32,
) -> ReachRequest {
    let n = c.level_count();
    let level = if kind.needs_top() {
        rng.gen_range(1..=n)
    } else {
        rng.gen_range(0..=n)
    };
    let configs: Vec<Configuration> = c.configurations(level).collect();
    let mut pick = || {
        configs
            .choose(rng)
            .expect("at least one configuration")
            .clone()
    };
    let (source, bad, target) = (pick(), pick(), pick());
    let beta = random_formula(rng, st, formula_depth);
    let tau = random_formula(rng, st, formula_depth);
    ReachRequest {
        kind,
        source,
        bad,
        beta,
        target,
        tau,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_is_reproducible_and_valid() {
        let a = generate_corpus(7, 30, 3, 1, &CorpusKind::ALL);
        let b = generate_corpus(7, 30, 3, 1, &CorpusKind::ALL);
        assert_eq!(a, b);
        for (kind, aut) in &a {
            assert!(is_counter_free(aut.semi()));
            match kind {
                CorpusKind::LoopingBuchi | CorpusKind::LoopingCoBuchi => {
                    assert!(aut.classify_structure().unwrap().looping)
                }
                CorpusKind::Weak => assert!(aut.classify_structure().unwrap().weak),
                _ => {}
            }
        }
    }

    #[test]
    fn random_formula_depth() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut st = FormulaStore::new(ApSet::new(&["p", "q"]).unwrap());
        for d in 0..4 {
            for _ in 0..50 {
                let f = random_formula(&mut rng, &mut st, d);
                assert!(st.depth(f) <= d);
            }
        }
    }
}
