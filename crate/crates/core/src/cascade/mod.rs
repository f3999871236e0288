//! Reset cascades: levels of reset semiautomata where level `i` reads the
//! input letter together with the states of levels `0..i`.
//!
//! Levels are indexed from 0 in this API. A configuration of the first `m`
//! levels is an `m`-tuple; the empty tuple is the 0-configuration.

mod holonomy;
mod lift;
mod text;

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

pub use holonomy::decompose_holonomy;
pub use lift::{lift_acceptance, muller_lift_count, CascadeAutomaton, ConfigAcceptance, ConfigSet};
pub use text::{parse_cascade, render_cascade};

use crate::alphabet::{ApSet, Letter};
use crate::automata::Semiautomaton;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Action {
    Identity,
    Reset(u32),
}

/// Per-level states, lowest level first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Configuration(pub Vec<u32>);

impl Configuration {
    pub fn empty() -> Self {
        Configuration(Vec::new())
    }

    pub fn level(&self) -> usize {
        self.0.len()
    }

    pub fn prefix(&self, m: usize) -> Configuration {
        Configuration(self.0[..m].to_vec())
    }

    /// `⟨self, q⟩`.
    pub fn push(&self, q: u32) -> Configuration {
        let mut v = self.0.clone();
        v.push(q);
        Configuration(v)
    }

    pub fn top(&self) -> Option<u32> {
        self.0.last().copied()
    }

    /// Splits `⟨S, s⟩` into `(S, s)`.
    pub fn split_top(&self) -> Option<(Configuration, u32)> {
        let (&s, rest) = self.0.split_last()?;
        Some((Configuration(rest.to_vec()), s))
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, q) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{q}")?;
        }
        write!(f, ")")
    }
}

/// A letter of level `i`: an input letter plus a configuration of the lower levels.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CombinedLetter {
    pub letter: Letter,
    pub lower: Configuration,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundarySets {
    /// Combined letters resetting to the state.
    pub enter: Vec<CombinedLetter>,
    /// Combined letters fixing the state: `enter` plus identity letters.
    pub stay: Vec<CombinedLetter>,
    /// The complement of `stay`.
    pub leave: Vec<CombinedLetter>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Level {
    states: u32,
    default: Action,
    /// Entries differing from `default`.
    explicit: BTreeMap<(Letter, Vec<u32>), Action>,
    /// `dense[letter * prefixes + prefix_index]`.
    dense: Vec<Action>,
}

impl Level {
    pub fn states(&self) -> u32 {
        self.states
    }

    pub fn default_action(&self) -> Action {
        self.default
    }

    pub fn explicit(&self) -> &BTreeMap<(Letter, Vec<u32>), Action> {
        &self.explicit
    }
}

/// Action table of one level as supplied to [`ResetCascade::new`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelSpec {
    pub states: u32,
    pub default: Action,
    pub entries: BTreeMap<(Letter, Vec<u32>), Action>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResetCascade {
    aps: ApSet,
    levels: Vec<Level>,
    /// `prefixes[i]` is the number of configurations of levels `0..i`.
    prefixes: Vec<usize>,
}

/// Cap on `|Σ| · |Q_0 × … × Q_{i−1}|` for a dense action table.
pub const MAX_TABLE: usize = 1 << 24;

impl ResetCascade {
    pub fn new(aps: ApSet, specs: Vec<LevelSpec>) -> Result<Self> {
        let mut prefixes = vec![1usize];
        for s in &specs {
            if s.states == 0 {
                return Err(Error::Rejected(
                    "every level needs at least one state".into(),
                ));
            }
            let next = prefixes.last().unwrap().checked_mul(s.states as usize);
            prefixes.push(
                next.filter(|&n| n <= MAX_TABLE)
                    .ok_or_else(|| Error::TooLarge {
                        what: "cascade configurations".into(),
                        count: "overflow".into(),
                        limit: MAX_TABLE,
                    })?,
            );
        }
        let sigma = aps.alphabet_size();
        let mut levels = Vec::with_capacity(specs.len());
        for (i, spec) in specs.into_iter().enumerate() {
            let check = |a: Action| match a {
                Action::Reset(q) if q >= spec.states => Err(Error::Rejected(format!(
                    "level {i}: reset target {q} out of range"
                ))),
                _ => Ok(()),
            };
            check(spec.default)?;
            let size = sigma
                .checked_mul(prefixes[i])
                .filter(|&n| n <= MAX_TABLE)
                .ok_or_else(|| Error::TooLarge {
                    what: format!("action table of level {i}"),
                    count: "overflow".into(),
                    limit: MAX_TABLE,
                })?;
            let mut dense = vec![spec.default; size];
            let mut explicit = BTreeMap::new();
            for ((l, lower), a) in spec.entries {
                check(a)?;
                if l.index() >= sigma {
                    return Err(Error::Rejected(format!(
                        "level {i}: letter outside the alphabet"
                    )));
                }
                if lower.len() != i {
                    return Err(Error::LevelMismatch(format!(
                        "level {i} action keyed by a {}-configuration",
                        lower.len()
                    )));
                }
                let idx = index_in(&levels, &lower).ok_or_else(|| {
                    Error::Rejected(format!(
                        "level {i}: lower configuration {:?} out of range",
                        lower
                    ))
                })?;
                dense[l.index() * prefixes[i] + idx] = a;
                if a != spec.default {
                    explicit.insert((l, lower), a);
                }
            }
            levels.push(Level {
                states: spec.states,
                default: spec.default,
                explicit,
                dense,
            });
        }
        Ok(ResetCascade {
            aps,
            levels,
            prefixes,
        })
    }

    pub fn aps(&self) -> &ApSet {
        &self.aps
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn level_count(&self) -> usize {
        self.levels.len()
    }

    pub fn states_per_level(&self) -> Vec<u32> {
        self.levels.iter().map(|l| l.states).collect()
    }

    pub fn max_states(&self) -> u32 {
        self.levels.iter().map(|l| l.states).max().unwrap_or(0)
    }

    /// Number of configurations of the first `m` levels.
    pub fn configuration_count(&self, m: usize) -> usize {
        self.prefixes[m]
    }

    pub fn is_valid(&self, c: &Configuration) -> bool {
        c.level() <= self.levels.len() && c.0.iter().zip(&self.levels).all(|(&q, l)| q < l.states)
    }

    pub fn check(&self, c: &Configuration) -> Result<()> {
        if self.is_valid(c) {
            Ok(())
        } else {
            Err(Error::LevelMismatch(format!(
                "{c} is not a configuration of this cascade"
            )))
        }
    }

    /// Mixed-radix index of a prefix configuration among those of its level.
    pub fn index_of(&self, c: &Configuration) -> usize {
        index_in(&self.levels, &c.0).expect("valid configuration")
    }

    pub fn config_of_index(&self, m: usize, mut idx: usize) -> Configuration {
        let mut v = vec![0u32; m];
        for i in (0..m).rev() {
            let k = self.levels[i].states as usize;
            v[i] = (idx % k) as u32;
            idx /= k;
        }
        Configuration(v)
    }

    /// All configurations of the first `m` levels, lexicographically.
    pub fn configurations(&self, m: usize) -> impl Iterator<Item = Configuration> + '_ {
        (0..self.prefixes[m]).map(move |i| self.config_of_index(m, i))
    }

    pub fn action(&self, level: usize, l: Letter, lower: &[u32]) -> Action {
        let lv = &self.levels[level];
        let idx = index_in(&self.levels, lower).expect("valid lower configuration");
        lv.dense[l.index() * self.prefixes[level] + idx]
    }

    /// One step on a (prefix) configuration; each level reads the pre-step
    /// states of the levels below it.
    pub fn step(&self, c: &Configuration, l: Letter) -> Configuration {
        let mut out = Vec::with_capacity(c.level());
        let mut idx = 0usize;
        for (i, &q) in c.0.iter().enumerate() {
            let lv = &self.levels[i];
            let a = lv.dense[l.index() * self.prefixes[i] + idx];
            out.push(match a {
                Action::Identity => q,
                Action::Reset(t) => t,
            });
            idx = idx * lv.states as usize + q as usize;
        }
        Configuration(out)
    }

    pub fn run(&self, c: &Configuration, word: &[Letter]) -> Configuration {
        word.iter().fold(c.clone(), |c, &l| self.step(&c, l))
    }

    /// Enter, Stay and Leave of state `q` at `level`, each sorted.
    pub fn boundary_sets(&self, level: usize, q: u32) -> Result<BoundarySets> {
        if level >= self.levels.len() || q >= self.levels[level].states {
            return Err(Error::LevelMismatch(format!(
                "no state {q} at level {level}"
            )));
        }
        let mut b = BoundarySets {
            enter: Vec::new(),
            stay: Vec::new(),
            leave: Vec::new(),
        };
        for l in self.aps.letters() {
            for lower in self.configurations(level) {
                let cl = CombinedLetter { letter: l, lower };
                match self.action(level, l, &cl.lower.0) {
                    Action::Reset(t) if t == q => {
                        b.enter.push(cl.clone());
                        b.stay.push(cl);
                    }
                    Action::Identity => b.stay.push(cl),
                    Action::Reset(_) => b.leave.push(cl),
                }
            }
        }
        Ok(b)
    }

    /// Semiautomaton over configurations: those reachable from `initial`, or
    /// all of them when `initial` is `None`. Returns it with the state order.
    pub fn expand_to_semiautomaton(
        &self,
        initial: Option<&Configuration>,
        limit: usize,
    ) -> Result<(Semiautomaton, Vec<Configuration>)> {
        let n = self.levels.len();
        let configs: Vec<Configuration> = match initial {
            None => {
                if self.prefixes[n] > limit {
                    return Err(Error::TooLarge {
                        what: "cascade configurations".into(),
                        count: self.prefixes[n].to_string(),
                        limit,
                    });
                }
                self.configurations(n).collect()
            }
            Some(i) => {
                if i.level() != n || !self.is_valid(i) {
                    return Err(Error::LevelMismatch(format!(
                        "{i} is not a full configuration"
                    )));
                }
                self.reachable(i, limit)?
            }
        };
        let pos: HashMap<&Configuration, u32> = configs
            .iter()
            .enumerate()
            .map(|(i, c)| (c, i as u32))
            .collect();
        let semi = Semiautomaton::from_fn(self.aps.clone(), configs.len(), |q, l| {
            pos[&self.step(&configs[q as usize], l)]
        })?;
        Ok((semi, configs))
    }

    /// Configurations reachable from `start`, in BFS order over letters.
    pub fn reachable(&self, start: &Configuration, limit: usize) -> Result<Vec<Configuration>> {
        let mut seen: BTreeSet<Configuration> = BTreeSet::new();
        let mut order = Vec::new();
        let mut queue = VecDeque::from([start.clone()]);
        seen.insert(start.clone());
        while let Some(c) = queue.pop_front() {
            for l in self.aps.letters() {
                let d = self.step(&c, l);
                if seen.insert(d.clone()) {
                    if seen.len() > limit {
                        return Err(Error::TooLarge {
                            what: "reachable configurations".into(),
                            count: format!("more than {limit}"),
                            limit,
                        });
                    }
                    queue.push_back(d);
                }
            }
            order.push(c);
        }
        Ok(order)
    }
}

fn index_in(levels: &[Level], lower: &[u32]) -> Option<usize> {
    let mut idx = 0usize;
    for (i, &q) in lower.iter().enumerate() {
        let k = levels.get(i)?.states;
        if q >= k {
            return None;
        }
        idx = idx * k as usize + q as usize;
    }
    Some(idx)
}

/// Partial map from full configurations to automaton states.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Homomorphism {
    pub map: BTreeMap<Configuration, u32>,
}

impl Homomorphism {
    pub fn get(&self, c: &Configuration) -> Option<u32> {
        self.map.get(c).copied()
    }

    /// The preimage of every state, each sorted.
    pub fn preimages(&self, states: usize) -> Vec<Vec<Configuration>> {
        let mut out = vec![Vec::new(); states];
        for (c, &q) in &self.map {
            if (q as usize) < states {
                out[q as usize].push(c.clone());
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NotSurjective {
        state: u32,
    },
    InvalidConfiguration {
        config: Configuration,
    },
    ImageOutOfRange {
        config: Configuration,
        image: u32,
    },
    NotClosed {
        config: Configuration,
        letter: Letter,
    },
    NotCommuting {
        config: Configuration,
        letter: Letter,
        expected: u32,
        found: u32,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NotSurjective { state } => write!(f, "state {state} has no preimage"),
            Violation::InvalidConfiguration { config } => {
                write!(f, "{config} is not a full configuration")
            }
            Violation::ImageOutOfRange { config, image } => {
                write!(f, "{config} maps to missing state {image}")
            }
            Violation::NotClosed { config, letter } => {
                write!(
                    f,
                    "successor of {config} on letter #{} leaves the domain",
                    letter.0
                )
            }
            Violation::NotCommuting {
                config,
                letter,
                expected,
                found,
            } => write!(
                f,
                "{config} on letter #{}: automaton goes to {expected}, cascade image is {found}",
                letter.0
            ),
        }
    }
}

/// Exhaustive check of surjectivity, domain closure and commutation.
pub fn verify_homomorphism(
    s: &Semiautomaton,
    c: &ResetCascade,
    h: &Homomorphism,
) -> Option<Violation> {
    let n = c.level_count();
    for (cfg, &q) in &h.map {
        if cfg.level() != n || !c.is_valid(cfg) {
            return Some(Violation::InvalidConfiguration {
                config: cfg.clone(),
            });
        }
        if q as usize >= s.states() {
            return Some(Violation::ImageOutOfRange {
                config: cfg.clone(),
                image: q,
            });
        }
    }
    let mut hit = vec![false; s.states()];
    for &q in h.map.values() {
        hit[q as usize] = true;
    }
    if let Some(q) = hit.iter().position(|&x| !x) {
        return Some(Violation::NotSurjective { state: q as u32 });
    }
    for (cfg, &q) in &h.map {
        for l in s.aps().letters() {
            let next = c.step(cfg, l);
            match h.get(&next) {
                None => {
                    return Some(Violation::NotClosed {
                        config: cfg.clone(),
                        letter: l,
                    })
                }
                Some(found) if found != s.step(q, l) => {
                    return Some(Violation::NotCommuting {
                        config: cfg.clone(),
                        letter: l,
                        expected: s.step(q, l),
                        found,
                    })
                }
                _ => {}
            }
        }
    }
    None
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    /// One level over `{p}`: `{p}` resets to 1, `{}` is the identity.
    pub(crate) fn tiny() -> ResetCascade {
        let aps = ApSet::new(&["p"]).unwrap();
        let entries = BTreeMap::from([((Letter(1), vec![]), Action::Reset(1))]);
        ResetCascade::new(
            aps,
            vec![LevelSpec {
                states: 2,
                default: Action::Identity,
                entries,
            }],
        )
        .unwrap()
    }

    /// Two levels; level 1 resets to 1 on `{p}` only when level 0 is in 1.
    pub(crate) fn two_level() -> ResetCascade {
        let aps = ApSet::new(&["p"]).unwrap();
        let l0 = BTreeMap::from([
            ((Letter(1), vec![]), Action::Reset(1)),
            ((Letter(0), vec![]), Action::Reset(0)),
        ]);
        let l1 = BTreeMap::from([
            ((Letter(1), vec![1]), Action::Reset(1)),
            ((Letter(0), vec![1]), Action::Reset(0)),
        ]);
        ResetCascade::new(
            aps,
            vec![
                LevelSpec {
                    states: 2,
                    default: Action::Identity,
                    entries: l0,
                },
                LevelSpec {
                    states: 2,
                    default: Action::Identity,
                    entries: l1,
                },
            ],
        )
        .unwrap()
    }

    #[test]
    fn step_examples() {
        let c = tiny();
        assert_eq!(
            c.step(&Configuration(vec![0]), Letter(1)),
            Configuration(vec![1])
        );
        assert_eq!(
            c.step(&Configuration(vec![0]), Letter(0)),
            Configuration(vec![0])
        );
        // level 1 reads the pre-step level-0 state
        let d = two_level();
        let s = Configuration(vec![0, 0]);
        let s1 = d.step(&s, Letter(1));
        assert_eq!(s1, Configuration(vec![1, 0]));
        assert_eq!(d.step(&s1, Letter(1)), Configuration(vec![1, 1]));
        assert_eq!(
            d.step(&Configuration(vec![1, 1]), Letter(0)),
            Configuration(vec![0, 0])
        );
        // prefix configurations step independently of higher levels
        assert_eq!(
            d.step(&Configuration(vec![0]), Letter(1)),
            Configuration(vec![1])
        );
    }

    #[test]
    fn boundary_sets_partition() {
        let d = two_level();
        for level in 0..2 {
            for q in 0..2 {
                let b = d.boundary_sets(level, q).unwrap();
                assert!(b.enter.iter().all(|e| b.stay.contains(e)));
                assert_eq!(
                    b.stay.len() + b.leave.len(),
                    2 * d.configuration_count(level)
                );
                assert!(b.stay.iter().all(|s| !b.leave.contains(s)));
            }
        }
        let b = tiny().boundary_sets(0, 1).unwrap();
        assert_eq!(
            b.enter,
            vec![CombinedLetter {
                letter: Letter(1),
                lower: Configuration::empty()
            }]
        );
        assert_eq!(b.stay.len(), 2);
        let b0 = tiny().boundary_sets(0, 0).unwrap();
        assert!(b0.enter.is_empty());
        assert_eq!(
            b0.leave,
            vec![CombinedLetter {
                letter: Letter(1),
                lower: Configuration::empty()
            }]
        );
    }

    #[test]
    fn expansion() {
        let (s, cfgs) = tiny().expand_to_semiautomaton(None, 100).unwrap();
        assert_eq!(s.states(), 2);
        assert_eq!(cfgs, vec![Configuration(vec![0]), Configuration(vec![1])]);
        let d = two_level();
        let (s, _) = d.expand_to_semiautomaton(None, 100).unwrap();
        assert_eq!(s.states(), 4);
        // composite actions are not resets
        assert!(!crate::automata::is_reset(&s));
        assert!(matches!(
            d.expand_to_semiautomaton(None, 3),
            Err(Error::TooLarge { .. })
        ));
        let (r, _) = d
            .expand_to_semiautomaton(Some(&Configuration(vec![0, 0])), 100)
            .unwrap();
        assert_eq!(r.states(), 3);
    }

    #[test]
    fn identity_homomorphism_verifies() {
        let c = two_level();
        let (s, cfgs) = c.expand_to_semiautomaton(None, 100).unwrap();
        let mut h = Homomorphism {
            map: cfgs
                .iter()
                .cloned()
                .enumerate()
                .map(|(i, c)| (c, i as u32))
                .collect(),
        };
        assert_eq!(verify_homomorphism(&s, &c, &h), None);
        let first = cfgs[0].clone();
        let orig = h.map[&first];
        h.map.insert(first, (orig + 1) % 4);
        assert!(matches!(
            verify_homomorphism(&s, &c, &h),
            Some(Violation::NotSurjective { .. } | Violation::NotCommuting { .. })
        ));
    }
}
