use std::collections::{BTreeSet, HashMap};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use super::{Configuration, Homomorphism, ResetCascade};
use crate::alphabet::{ApSet, Lasso, Letter};
use crate::automata::{AcceptanceCondition, LassoAcceptor, OmegaAutomaton, StateSet};
use crate::error::{Error, Result};

pub type ConfigSet = BTreeSet<Configuration>;

/// An acceptance condition stated over full configurations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConfigAcceptance {
    Buchi(ConfigSet),
    CoBuchi(ConfigSet),
    Rabin(Vec<(ConfigSet, ConfigSet)>),
    Muller(Vec<ConfigSet>),
}

/// A cascade with an initial configuration and an acceptance condition.
///
/// Only configurations reachable from the initial one are kept; the
/// acceptance condition is restricted to them.
#[derive(Debug, Clone)]
pub struct CascadeAutomaton {
    cascade: ResetCascade,
    initial: Configuration,
    configs: Vec<Configuration>,
    index: HashMap<Configuration, u32>,
    acceptance: ConfigAcceptance,
    automaton: OmegaAutomaton,
}

impl CascadeAutomaton {
    pub fn new(
        cascade: ResetCascade,
        initial: Configuration,
        acceptance: ConfigAcceptance,
        max_configs: usize,
    ) -> Result<Self> {
        let (semi, configs) = cascade.expand_to_semiautomaton(Some(&initial), max_configs)?;
        let index: HashMap<Configuration, u32> = configs
            .iter()
            .enumerate()
            .map(|(i, c)| (c.clone(), i as u32))
            .collect();
        let keep = |s: &ConfigSet| {
            s.iter()
                .filter(|c| index.contains_key(*c))
                .cloned()
                .collect::<ConfigSet>()
        };
        let acceptance = match acceptance {
            ConfigAcceptance::Buchi(a) => ConfigAcceptance::Buchi(keep(&a)),
            ConfigAcceptance::CoBuchi(a) => ConfigAcceptance::CoBuchi(keep(&a)),
            ConfigAcceptance::Rabin(p) => {
                ConfigAcceptance::Rabin(p.iter().map(|(g, b)| (keep(g), keep(b))).collect())
            }
            // a set with an unreachable member can never be an inf-set
            ConfigAcceptance::Muller(m) => ConfigAcceptance::Muller(
                m.into_iter()
                    .filter(|s| s.iter().all(|c| index.contains_key(c)))
                    .collect(),
            ),
        };
        let ids = |s: &ConfigSet| s.iter().map(|c| index[c]).collect::<StateSet>();
        let cond = match &acceptance {
            ConfigAcceptance::Buchi(a) => AcceptanceCondition::Buchi(ids(a)),
            ConfigAcceptance::CoBuchi(a) => AcceptanceCondition::CoBuchi(ids(a)),
            ConfigAcceptance::Rabin(p) => {
                AcceptanceCondition::Rabin(p.iter().map(|(g, b)| (ids(g), ids(b))).collect())
            }
            ConfigAcceptance::Muller(m) => AcceptanceCondition::Muller(m.iter().map(ids).collect()),
        };
        let automaton = OmegaAutomaton::new(semi, 0, cond)?;
        Ok(CascadeAutomaton {
            cascade,
            initial,
            configs,
            index,
            acceptance,
            automaton,
        })
    }

    pub fn cascade(&self) -> &ResetCascade {
        &self.cascade
    }

    pub fn initial(&self) -> &Configuration {
        &self.initial
    }

    /// Reachable configurations in BFS order; index 0 is the initial one.
    pub fn configurations(&self) -> &[Configuration] {
        &self.configs
    }

    pub fn index_of(&self, c: &Configuration) -> Option<u32> {
        self.index.get(c).copied()
    }

    pub fn acceptance(&self) -> &ConfigAcceptance {
        &self.acceptance
    }

    /// The expanded automaton over configuration indices.
    pub fn automaton(&self) -> &OmegaAutomaton {
        &self.automaton
    }

    /// Number of acceptance sets or pairs.
    pub fn acceptance_size(&self) -> usize {
        match &self.acceptance {
            ConfigAcceptance::Buchi(_) | ConfigAcceptance::CoBuchi(_) => 1,
            ConfigAcceptance::Rabin(p) => p.len(),
            ConfigAcceptance::Muller(m) => m.len(),
        }
    }
}

impl LassoAcceptor for CascadeAutomaton {
    fn aps(&self) -> &ApSet {
        self.cascade.aps()
    }

    fn accepts(&self, lasso: &Lasso) -> bool {
        self.automaton.accepts(lasso)
    }

    fn with_cycle<'a>(&'a self, cycle: &[Letter]) -> crate::automata::SpokeVerdicts<'a> {
        self.automaton.with_cycle(cycle)
    }
}

/// Transfers `d`'s acceptance condition to the cascade along `h`.
///
/// The initial configuration is the least preimage of `d`'s initial state,
/// and only configurations reachable from it take part. Muller sets are
/// counted exactly before enumeration; more than `max_sets` is an error.
pub fn lift_acceptance(
    d: &OmegaAutomaton,
    c: &ResetCascade,
    h: &Homomorphism,
    max_sets: usize,
    max_configs: usize,
) -> Result<CascadeAutomaton> {
    let pre = h.preimages(d.states());
    let initial = pre[d.initial() as usize]
        .first()
        .cloned()
        .ok_or_else(|| Error::Rejected("initial state has no preimage".into()))?;
    let reach: BTreeSet<Configuration> = c.reachable(&initial, max_configs)?.into_iter().collect();
    let pre: Vec<Vec<Configuration>> = pre
        .into_iter()
        .map(|v| v.into_iter().filter(|x| reach.contains(x)).collect())
        .collect();
    let inv = |s: &StateSet| {
        s.iter()
            .flat_map(|&q| pre[q as usize].iter().cloned())
            .collect::<ConfigSet>()
    };
    let acceptance = match d.acceptance() {
        AcceptanceCondition::Buchi(a) => ConfigAcceptance::Buchi(inv(a)),
        AcceptanceCondition::CoBuchi(a) => ConfigAcceptance::CoBuchi(inv(a)),
        AcceptanceCondition::Rabin(p) => {
            ConfigAcceptance::Rabin(p.iter().map(|(g, b)| (inv(g), inv(b))).collect())
        }
        AcceptanceCondition::Muller(m) => {
            let count = muller_lift_count(m, &pre);
            if count > BigUint::from(max_sets) {
                return Err(Error::TooManySets {
                    count: count.to_string(),
                    limit: max_sets,
                });
            }
            let mut sets = Vec::with_capacity(count.to_usize().unwrap_or(0));
            for set in m {
                let parts: Vec<&Vec<Configuration>> =
                    set.iter().map(|&q| &pre[q as usize]).collect();
                choose(&parts, 0, &mut ConfigSet::new(), &mut sets);
            }
            ConfigAcceptance::Muller(sets)
        }
    };
    CascadeAutomaton::new(c.clone(), initial, acceptance, max_configs)
}

/// `Σ_M Π_{q∈M} (2^{|h⁻¹(q)|} − 1)`.
pub fn muller_lift_count(sets: &[StateSet], pre: &[Vec<Configuration>]) -> BigUint {
    let mut total = BigUint::zero();
    for m in sets {
        let mut prod = BigUint::one();
        for &q in m {
            prod *= (BigUint::one() << pre[q as usize].len()) - 1u32;
        }
        total += prod;
    }
    total
}

/// Every union of nonempty subsets, one per part.
fn choose(parts: &[&Vec<Configuration>], i: usize, acc: &mut ConfigSet, out: &mut Vec<ConfigSet>) {
    if i == parts.len() {
        out.push(acc.clone());
        return;
    }
    let p = parts[i];
    for mask in 1u64..(1 << p.len()) {
        let chosen: Vec<&Configuration> = (0..p.len())
            .filter(|b| mask >> b & 1 == 1)
            .map(|b| &p[b])
            .collect();
        for c in &chosen {
            acc.insert((*c).clone());
        }
        choose(parts, i + 1, acc, out);
        for c in &chosen {
            acc.remove(*c);
        }
    }
}
