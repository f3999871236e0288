use serde::Serialize;

use super::{AcceptanceCondition, OmegaAutomaton, Semiautomaton, StateSet};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StructuralFlags {
    /// Every SCC lies entirely inside or entirely outside α.
    pub weak: bool,
    /// Exactly one state lies outside α and it is a sink.
    pub looping: bool,
    /// The sink of a looping automaton.
    pub sink: Option<u32>,
}

/// Strongly connected components, ordered by their least state.
pub fn sccs(s: &Semiautomaton) -> Vec<StateSet> {
    let n = s.states();
    let reach: Vec<StateSet> = (0..n as u32).map(|q| s.reachable_from(q)).collect();
    let mut assigned = vec![false; n];
    let mut out = Vec::new();
    for q in 0..n {
        if assigned[q] {
            continue;
        }
        let comp: StateSet = reach[q]
            .iter()
            .copied()
            .filter(|&p| reach[p as usize].contains(&(q as u32)))
            .collect();
        for &p in &comp {
            assigned[p as usize] = true;
        }
        out.push(comp);
    }
    out
}

pub(super) fn classify(a: &OmegaAutomaton) -> Result<StructuralFlags> {
    let alpha = match a.acceptance() {
        AcceptanceCondition::Buchi(x) | AcceptanceCondition::CoBuchi(x) => x,
        other => {
            return Err(Error::NotApplicable(format!(
                "structural flags are defined for Buchi and coBuchi acceptance, not {}",
                other.kind_name()
            )))
        }
    };
    let semi = a.semi();
    let weak = sccs(semi)
        .iter()
        .all(|c| c.is_subset(alpha) || c.is_disjoint(alpha));
    let outside: Vec<u32> = (0..semi.states() as u32)
        .filter(|q| !alpha.contains(q))
        .collect();
    let sink = match outside.as_slice() {
        [q] if semi.aps().letters().all(|l| semi.step(*q, l) == *q) => Some(*q),
        _ => None,
    };
    Ok(StructuralFlags {
        weak,
        looping: sink.is_some(),
        sink,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::ApSet;

    fn set(v: &[u32]) -> StateSet {
        v.iter().copied().collect()
    }

    fn chain() -> Semiautomaton {
        // 0 --p--> 1 --p--> 2, state 2 a sink; {} stays
        let aps = ApSet::new(&["p"]).unwrap();
        Semiautomaton::from_fn(
            aps,
            3,
            |q, l| if l.contains(0) { (q + 1).min(2) } else { q },
        )
        .unwrap()
    }

    #[test]
    fn flags() {
        let a = OmegaAutomaton::new(chain(), 0, AcceptanceCondition::Buchi(set(&[0, 1]))).unwrap();
        let f = a.classify_structure().unwrap();
        assert!(f.weak && f.looping);
        assert_eq!(f.sink, Some(2));

        let aps = ApSet::new(&["p"]).unwrap();
        let swap =
            Semiautomaton::from_fn(aps, 2, |q, l| if l.contains(0) { 1 - q } else { q }).unwrap();
        let mixed =
            OmegaAutomaton::new(swap.clone(), 0, AcceptanceCondition::Buchi(set(&[0]))).unwrap();
        assert!(!mixed.classify_structure().unwrap().weak);
        let all = OmegaAutomaton::new(swap, 0, AcceptanceCondition::CoBuchi(set(&[0, 1]))).unwrap();
        assert!(all.classify_structure().unwrap().weak);

        let m =
            OmegaAutomaton::new(chain(), 0, AcceptanceCondition::Muller(vec![set(&[2])])).unwrap();
        assert!(matches!(
            m.classify_structure(),
            Err(Error::NotApplicable(_))
        ));
    }

    #[test]
    fn sccs_of_chain() {
        assert_eq!(sccs(&chain()), vec![set(&[0]), set(&[1]), set(&[2])]);
    }
}
