use std::collections::{HashSet, VecDeque};

use super::Semiautomaton;

fn compose(t: &[u32], u: &[u32]) -> Vec<u32> {
    // first t, then u
    t.iter().map(|&q| u[q as usize]).collect()
}

/// All transformations induced by nonempty words, in BFS order.
pub fn transition_monoid(s: &Semiautomaton) -> Vec<Vec<u32>> {
    let gens: Vec<Vec<u32>> = s.aps().letters().map(|l| s.letter_action(l)).collect();
    let mut seen: HashSet<Vec<u32>> = HashSet::new();
    let mut order = Vec::new();
    let mut queue: VecDeque<Vec<u32>> = VecDeque::new();
    for g in &gens {
        if seen.insert(g.clone()) {
            queue.push_back(g.clone());
        }
    }
    while let Some(t) = queue.pop_front() {
        for g in &gens {
            let u = compose(&t, g);
            if seen.insert(u.clone()) {
                queue.push_back(u);
            }
        }
        order.push(t);
    }
    order
}

fn power(t: &[u32], k: usize) -> Vec<u32> {
    let mut r: Vec<u32> = (0..t.len() as u32).collect();
    for _ in 0..k {
        r = compose(&r, t);
    }
    r
}

/// Aperiodicity of the transition monoid: `t^n = t^(n+1)` with `n = |Q|`.
pub fn is_counter_free(s: &Semiautomaton) -> bool {
    let n = s.states();
    transition_monoid(s).iter().all(|t| {
        let tn = power(t, n);
        compose(&tn, t) == tn
    })
}

/// Every letter acts as the identity or as a constant map.
pub fn is_reset(s: &Semiautomaton) -> bool {
    s.aps().letters().all(|l| {
        let a = s.letter_action(l);
        a.iter().enumerate().all(|(q, &t)| t as usize == q) || a.iter().all(|&t| t == a[0])
    })
}
