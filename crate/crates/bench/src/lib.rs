//! Fixed workloads shared by the benchmarks and their smoke test.

use aut2ltl_core::automata::OmegaAutomaton;
use aut2ltl_core::reach::{ReachKind, ReachRequest};
use aut2ltl_core::verify::{generate_corpus, random_cascade, random_request, CorpusKind};
use aut2ltl_core::{ApSet, FormulaStore, ResetCascade};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const SEED: u64 = 7;

/// Counter-free automata with at most `max_states` states over two propositions.
pub fn corpus(count: usize, max_states: usize) -> Vec<OmegaAutomaton> {
    generate_corpus(SEED, count, max_states, 2, &CorpusKind::ALL)
        .into_iter()
        .map(|(_, a)| a)
        .collect()
}

/// One request of every kind on a two-level cascade, in a shared store.
pub fn reach_workload() -> (ResetCascade, FormulaStore, Vec<ReachRequest>) {
    let aps = ApSet::new(&["p"]).expect("valid name");
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let c = loop {
        let c = random_cascade(&mut rng, &aps, 2, 3);
        if c.level_count() == 2 {
            break c;
        }
    };
    let mut st = FormulaStore::new(aps);
    let reqs = ReachKind::ALL
        .iter()
        .map(|&k| random_request(&mut rng, &c, &mut st, k, 2))
        .collect();
    (c, st, reqs)
}
