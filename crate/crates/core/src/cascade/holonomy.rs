//! Holonomy decomposition of counter-free semiautomata into reset cascades.
//!
//! Work over the image family `I = {Q} ∪ {Q·w} ∪ singletons`, which is
//! closed under letter images. `R ≤ P` (subduction) iff `R ⊆ P·w` for some
//! word `w`. Mutually subducting sets form a class with a representative
//! `rep` and, for each member `P`, a word-induced bijection `u_P: rep → P`.
//! Heights: singletons 0, otherwise one more than the highest set strictly
//! below. Tiles of `P` are the maximal members of `I` strictly inside `P`.
//!
//! Cascade level `j` (0-based) handles height `H − j` where `H = h(Q)`. Its
//! coordinate names a tile of the current set's representative, or is 0 when
//! the current set has a lower height (inactive). Decoding a configuration
//! walks from `Q` down through tiles to a singleton `{q}`, the image `q`.
//!
//! On letter `s`, with `C` the old current set at a level and `C'` the new
//! one (`C·s ⊆ C'` is maintained), the level resets to 0 when inactive,
//! keeps its coordinate when `C·s = C'` (then `s` is a bijection inside one
//! class, and aperiodicity makes the induced permutation of tiles trivial),
//! and otherwise resets to the least tile of `C'` containing `C·s`.

use std::collections::{BTreeMap, HashMap, VecDeque};

use super::{Action, Configuration, Homomorphism, LevelSpec, ResetCascade};
use crate::alphabet::Letter;
use crate::automata::{is_counter_free, Semiautomaton};
use crate::error::{Error, Result};

type Set = u64;

struct Family<'a> {
    semi: &'a Semiautomaton,
    sets: Vec<Set>,
    id: HashMap<Set, usize>,
    height: Vec<u32>,
    rep: Vec<usize>,
    /// `bij[p][x] = u_P(x)` for every element `x` of `rep(P)`.
    bij: Vec<Vec<u32>>,
    /// Tiles of each representative, ordered by bitmask.
    tiles: Vec<Vec<Set>>,
}

fn image(semi: &Semiautomaton, s: Set, l: Letter) -> Set {
    let mut out = 0;
    let mut rest = s;
    while rest != 0 {
        let q = rest.trailing_zeros();
        rest &= rest - 1;
        out |= 1 << semi.step(q, l);
    }
    out
}

impl<'a> Family<'a> {
    fn build(semi: &'a Semiautomaton) -> Family<'a> {
        let n = semi.states();
        let full: Set = if n == 64 { !0 } else { (1 << n) - 1 };
        let mut sets = vec![full];
        let mut id = HashMap::from([(full, 0usize)]);
        let mut queue = VecDeque::from([full]);
        while let Some(s) = queue.pop_front() {
            for l in semi.aps().letters() {
                let t = image(semi, s, l);
                if let std::collections::hash_map::Entry::Vacant(e) = id.entry(t) {
                    e.insert(sets.len());
                    sets.push(t);
                    queue.push_back(t);
                }
            }
        }
        for q in 0..n {
            let t = 1u64 << q;
            if let std::collections::hash_map::Entry::Vacant(e) = id.entry(t) {
                e.insert(sets.len());
                sets.push(t);
            }
        }
        let mut f = Family {
            semi,
            sets,
            id,
            height: Vec::new(),
            rep: Vec::new(),
            bij: Vec::new(),
            tiles: Vec::new(),
        };
        f.analyse();
        f
    }

    /// Orbit of a set under all words (including the empty one), with a
    /// witness word for each member, in BFS order.
    fn orbit(&self, s: Set) -> Vec<(Set, Vec<Letter>)> {
        let mut seen: HashMap<Set, Vec<Letter>> = HashMap::from([(s, Vec::new())]);
        let mut order = vec![(s, Vec::new())];
        let mut queue = VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            let w = seen[&x].clone();
            for l in self.semi.aps().letters() {
                let y = image(self.semi, x, l);
                if let std::collections::hash_map::Entry::Vacant(e) = seen.entry(y) {
                    let mut wy = w.clone();
                    wy.push(l);
                    e.insert(wy.clone());
                    order.push((y, wy));
                    queue.push_back(y);
                }
            }
        }
        order
    }

    #[allow(clippy::needless_range_loop)]
    fn analyse(&mut self) {
        let m = self.sets.len();
        let orbits: Vec<Vec<(Set, Vec<Letter>)>> =
            self.sets.iter().map(|&s| self.orbit(s)).collect();
        // le[r][p]: R ≤ P
        let le: Vec<Vec<bool>> = (0..m)
            .map(|r| {
                (0..m)
                    .map(|p| orbits[p].iter().any(|(x, _)| self.sets[r] & !x == 0))
                    .collect()
            })
            .collect();
        // classes and representatives (least bitmask)
        let mut rep = vec![usize::MAX; m];
        for p in 0..m {
            if rep[p] != usize::MAX {
                continue;
            }
            let class: Vec<usize> = (0..m).filter(|&r| le[r][p] && le[p][r]).collect();
            let r0 = *class.iter().min_by_key(|&&r| self.sets[r]).unwrap();
            for &r in &class {
                rep[r] = r0;
            }
        }
        // bijections rep → P via a witness word
        let mut bij = vec![Vec::new(); m];
        for p in 0..m {
            let r = rep[p];
            let (_, w) = orbits[r]
                .iter()
                .find(|(x, _)| *x == self.sets[p])
                .expect("class members are images of the representative");
            bij[p] = elements(self.sets[r])
                .map(|x| self.semi.run(x, w))
                .collect();
        }
        // heights by memoised recursion over strict subduction, which is acyclic
        let below: Vec<Vec<usize>> = (0..m)
            .map(|p| (0..m).filter(|&r| le[r][p] && !le[p][r]).collect())
            .collect();
        let mut height = vec![u32::MAX; m];
        fn visit(p: usize, below: &[Vec<usize>], sets: &[Set], height: &mut [u32]) -> u32 {
            if height[p] == u32::MAX {
                height[p] = if sets[p].count_ones() == 1 {
                    0
                } else {
                    1 + below[p]
                        .iter()
                        .map(|&r| visit(r, below, sets, height))
                        .max()
                        .unwrap_or(0)
                };
            }
            height[p]
        }
        for p in 0..m {
            visit(p, &below, &self.sets, &mut height);
        }
        let mut tiles = vec![Vec::new(); m];
        for p in 0..m {
            let s = self.sets[p];
            let inside: Vec<Set> = self
                .sets
                .iter()
                .copied()
                .filter(|&t| t != s && t & !s == 0)
                .collect();
            let mut t: Vec<Set> = inside
                .iter()
                .copied()
                .filter(|&t| !inside.iter().any(|&u| u != t && t & !u == 0))
                .collect();
            t.sort_unstable();
            tiles[p] = t;
        }
        self.height = height;
        self.rep = rep;
        self.bij = bij;
        self.tiles = tiles;
    }

    fn idx(&self, s: Set) -> usize {
        self.id[&s]
    }

    /// `u_P` applied to a subset of `rep(P)`.
    fn transport(&self, p: usize, sub: Set) -> Set {
        let r = self.sets[self.rep[p]];
        elements(r)
            .zip(&self.bij[p])
            .filter(|(x, _)| sub >> x & 1 == 1)
            .fold(0, |acc, (_, &y)| acc | 1 << y)
    }

    /// `u_P^{-1}` applied to a subset of `P`.
    fn transport_back(&self, p: usize, sub: Set) -> Set {
        let r = self.sets[self.rep[p]];
        elements(r)
            .zip(&self.bij[p])
            .filter(|(_, &y)| sub >> y & 1 == 1)
            .fold(0, |acc, (x, _)| acc | 1 << x)
    }

    fn tiles_of(&self, p: usize) -> &[Set] {
        &self.tiles[self.rep[p]]
    }
}

fn elements(s: Set) -> impl Iterator<Item = u32> {
    (0..64u32).filter(move |q| s >> q & 1 == 1)
}

/// Current set at every level after decoding a prefix configuration, or
/// `None` for ill-formed prefixes. `out[j]` is the set seen by level `j`.
fn decode(f: &Family, top: u32, prefix: &[u32]) -> Option<Vec<usize>> {
    let mut cur = 0usize; // Q
    let mut out = Vec::with_capacity(prefix.len() + 1);
    for (j, &x) in prefix.iter().enumerate() {
        out.push(cur);
        let k = top - j as u32;
        if f.height[cur] == k {
            let tiles = f.tiles_of(cur);
            let t = *tiles.get(x as usize)?;
            cur = f.idx(f.transport(cur, t));
        } else if x != 0 {
            return None;
        }
    }
    out.push(cur);
    Some(out)
}

/// Reset cascade homomorphic to `s` with at most `2^|Q|` levels of at most
/// `2^|Q|` states each.
pub fn decompose_holonomy(s: &Semiautomaton) -> Result<(ResetCascade, Homomorphism)> {
    if !is_counter_free(s) {
        return Err(Error::NotCounterFree);
    }
    if s.states() > 64 {
        return Err(Error::TooLarge {
            what: "states for holonomy decomposition".into(),
            count: s.states().to_string(),
            limit: 64,
        });
    }
    let f = Family::build(s);
    let top = f.height[0];
    if top == 0 {
        // one state: a single trivial level
        let cascade = ResetCascade::new(
            s.aps().clone(),
            vec![LevelSpec {
                states: 1,
                default: Action::Identity,
                entries: BTreeMap::new(),
            }],
        )?;
        let hom = Homomorphism {
            map: BTreeMap::from([(Configuration(vec![0]), 0)]),
        };
        return Ok((cascade, hom));
    }
    let levels: Vec<u32> = (0..top)
        .map(|j| {
            let k = top - j;
            (0..f.sets.len())
                .filter(|&p| f.height[p] == k)
                .map(|p| f.tiles_of(p).len() as u32)
                .max()
                .unwrap_or(1)
                .max(1)
        })
        .collect();

    let skeleton = ResetCascade::new(
        s.aps().clone(),
        levels
            .iter()
            .map(|&k| LevelSpec {
                states: k,
                default: Action::Identity,
                entries: BTreeMap::new(),
            })
            .collect(),
    )?;
    let mut specs = Vec::with_capacity(levels.len());
    for (j, &states) in levels.iter().enumerate() {
        let k = top - j as u32;
        let mut entries = BTreeMap::new();
        for l in s.aps().letters() {
            for lower in skeleton.configurations(j) {
                let Some(old) = decode(&f, top, &lower.0) else {
                    continue;
                };
                let new_lower = next_prefix(&f, top, &lower.0, l);
                let Some(new) = decode(&f, top, &new_lower) else {
                    unreachable!("successor prefixes are well-formed")
                };
                let (c_old, c_new) = (old[j], new[j]);
                let action = if f.height[c_new] != k {
                    Action::Reset(0)
                } else if f.height[c_old] == k && image(s, f.sets[c_old], l) == f.sets[c_new] {
                    Action::Identity
                } else {
                    let img = image(s, f.sets[c_old], l);
                    let tiles = f.tiles_of(c_new);
                    let frame = f.transport_back(c_new, img);
                    let t = tiles
                        .iter()
                        .position(|&t| frame & !t == 0)
                        .expect("some tile covers the image");
                    Action::Reset(t as u32)
                };
                if action != Action::Identity {
                    entries.insert((l, lower.0.clone()), action);
                }
            }
        }
        specs.push(LevelSpec {
            states,
            default: Action::Identity,
            entries,
        });
    }
    let cascade = ResetCascade::new(s.aps().clone(), specs)?;

    let mut map = BTreeMap::new();
    for c in cascade.configurations(levels.len()) {
        if let Some(path) = decode(&f, top, &c.0) {
            let last = f.sets[*path.last().unwrap()];
            debug_assert_eq!(last.count_ones(), 1);
            map.insert(c, last.trailing_zeros());
        }
    }
    Ok((cascade, Homomorphism { map }))
}

/// Successor of a well-formed prefix under the construction's actions,
/// computed level by level from the top set down.
fn next_prefix(f: &Family, top: u32, prefix: &[u32], l: Letter) -> Vec<u32> {
    let old = decode(f, top, prefix).expect("well-formed prefix");
    let mut new_cur = 0usize;
    let mut out = Vec::with_capacity(prefix.len());
    for (j, &x) in prefix.iter().enumerate() {
        let k = top - j as u32;
        let c_old = old[j];
        let img = image(f.semi, f.sets[c_old], l);
        let x_new = if f.height[new_cur] != k {
            0
        } else if f.height[c_old] == k && img == f.sets[new_cur] {
            x
        } else {
            let frame = f.transport_back(new_cur, img);
            f.tiles_of(new_cur)
                .iter()
                .position(|&t| frame & !t == 0)
                .expect("some tile covers the image") as u32
        };
        if f.height[new_cur] == k {
            let t = f.tiles_of(new_cur)[x_new as usize];
            new_cur = f.idx(f.transport(new_cur, t));
        }
        out.push(x_new);
    }
    out
}
