//! Reachability formulas over reset cascades.
//!
//! Five kinds, all taking a source `S`, a bad configuration `B` guarded by
//! `β` and a target `T` guarded by `τ`, of one common level:
//!
//! 1. `reach`: not reaching `B(β)` until reaching `T(τ)`.
//! 2. `weak_reach`: reaching `T(τ)` releases not reaching `B(β)`.
//! 3. `stay_reach`: as 1, while the top state stays unchanged.
//! 4. `weak_stay_reach`: reaching `T(τ)` releases not (reaching `B(β)` or
//!    leaving the top state).
//! 5. `leave_reach`: as 1, and the top state is left on the way.
//!
//! Kinds 3 to 5 need level at least 1; the top state of a configuration is
//! its last component. Construction is memoised per request, which keeps
//! the DAG small although the tree length grows multiply exponentially.

use std::collections::HashMap;
use std::rc::Rc;

use num_bigint::BigUint;
use serde::Serialize;

use crate::alphabet::Letter;
use crate::cascade::{BoundarySets, Configuration, ResetCascade};
use crate::error::{Error, Result};
use crate::ltl::{FormulaId, FormulaStore};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum ReachKind {
    Reach,
    WeakReach,
    StayReach,
    WeakStayReach,
    LeaveReach,
}

impl ReachKind {
    pub const ALL: [ReachKind; 5] = [
        ReachKind::Reach,
        ReachKind::WeakReach,
        ReachKind::StayReach,
        ReachKind::WeakStayReach,
        ReachKind::LeaveReach,
    ];

    /// 1 to 5, in the order of the module documentation.
    pub fn number(self) -> u8 {
        self as u8 + 1
    }

    pub fn from_number(n: u8) -> Option<ReachKind> {
        ReachKind::ALL.get((n as usize).checked_sub(1)?).copied()
    }

    pub fn needs_top(self) -> bool {
        matches!(
            self,
            ReachKind::StayReach | ReachKind::WeakStayReach | ReachKind::LeaveReach
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ReachRequest {
    pub kind: ReachKind,
    pub source: Configuration,
    pub bad: Configuration,
    pub beta: FormulaId,
    pub target: Configuration,
    pub tau: FormulaId,
}

impl ReachRequest {
    pub fn level(&self) -> usize {
        self.source.level()
    }

    /// Checks levels and state ranges against `c`.
    pub fn validate(&self, c: &ResetCascade) -> Result<()> {
        for x in [&self.source, &self.bad, &self.target] {
            c.check(x)?;
        }
        let i = self.source.level();
        if self.bad.level() != i || self.target.level() != i {
            return Err(Error::LevelMismatch(format!(
                "configurations {}, {}, {} have different levels",
                self.source, self.bad, self.target
            )));
        }
        if self.kind.needs_top() && i == 0 {
            return Err(Error::LevelMismatch(format!(
                "kind {} needs level at least 1",
                self.kind.number()
            )));
        }
        Ok(())
    }
}

/// Builds reachability formulas for one cascade into a formula store.
pub struct ReachBuilder<'c> {
    cascade: &'c ResetCascade,
    memo: Option<HashMap<ReachRequest, FormulaId>>,
    /// Requests in order of first completion, when recording.
    log: Option<Vec<(ReachRequest, FormulaId)>>,
    boundary: HashMap<(usize, u32), Rc<BoundarySets>>,
}

impl<'c> ReachBuilder<'c> {
    pub fn new(cascade: &'c ResetCascade) -> Self {
        ReachBuilder {
            cascade,
            memo: Some(HashMap::new()),
            log: None,
            boundary: HashMap::new(),
        }
    }

    /// Without memoisation every request is rebuilt; results are identical
    /// because the store hash-conses.
    pub fn without_memo(cascade: &'c ResetCascade) -> Self {
        ReachBuilder {
            cascade,
            memo: None,
            log: None,
            boundary: HashMap::new(),
        }
    }

    /// Records every distinct constructed request, see [`Self::constructed`].
    pub fn recording(mut self) -> Self {
        self.log = Some(Vec::new());
        self
    }

    pub fn cascade(&self) -> &'c ResetCascade {
        self.cascade
    }

    pub fn memo_len(&self) -> usize {
        self.memo.as_ref().map_or(0, HashMap::len)
    }

    /// Every request built so far (nested ones included) with its formula.
    pub fn constructed(&self) -> &[(ReachRequest, FormulaId)] {
        self.log.as_deref().unwrap_or(&[])
    }

    pub fn build(&mut self, st: &mut FormulaStore, req: &ReachRequest) -> Result<FormulaId> {
        req.validate(self.cascade)?;
        for f in [req.beta, req.tau] {
            if f.index() >= st.len() {
                return Err(Error::PreconditionViolated(
                    "formula id outside the store".into(),
                ));
            }
        }
        Ok(self.get(st, req.clone()))
    }

    pub fn reach(
        &mut self,
        st: &mut FormulaStore,
        s: &Configuration,
        b: &Configuration,
        beta: FormulaId,
        t: &Configuration,
        tau: FormulaId,
    ) -> Result<FormulaId> {
        self.build_kind(st, ReachKind::Reach, s, b, beta, t, tau)
    }

    pub fn weak_reach(
        &mut self,
        st: &mut FormulaStore,
        s: &Configuration,
        b: &Configuration,
        beta: FormulaId,
        t: &Configuration,
        tau: FormulaId,
    ) -> Result<FormulaId> {
        self.build_kind(st, ReachKind::WeakReach, s, b, beta, t, tau)
    }

    pub fn stay_reach(
        &mut self,
        st: &mut FormulaStore,
        s: &Configuration,
        b: &Configuration,
        beta: FormulaId,
        t: &Configuration,
        tau: FormulaId,
    ) -> Result<FormulaId> {
        self.build_kind(st, ReachKind::StayReach, s, b, beta, t, tau)
    }

    pub fn weak_stay_reach(
        &mut self,
        st: &mut FormulaStore,
        s: &Configuration,
        b: &Configuration,
        beta: FormulaId,
        t: &Configuration,
        tau: FormulaId,
    ) -> Result<FormulaId> {
        self.build_kind(st, ReachKind::WeakStayReach, s, b, beta, t, tau)
    }

    pub fn leave_reach(
        &mut self,
        st: &mut FormulaStore,
        s: &Configuration,
        b: &Configuration,
        beta: FormulaId,
        t: &Configuration,
        tau: FormulaId,
    ) -> Result<FormulaId> {
        self.build_kind(st, ReachKind::LeaveReach, s, b, beta, t, tau)
    }

    #[allow(clippy::too_many_arguments)]
    fn build_kind(
        &mut self,
        st: &mut FormulaStore,
        kind: ReachKind,
        s: &Configuration,
        b: &Configuration,
        beta: FormulaId,
        t: &Configuration,
        tau: FormulaId,
    ) -> Result<FormulaId> {
        let req = ReachRequest {
            kind,
            source: s.clone(),
            bad: b.clone(),
            beta,
            target: t.clone(),
            tau,
        };
        self.build(st, &req)
    }

    /// `reach(S, T, false, T, true)`: `T` is reachable from `S`.
    pub fn reach_tt(
        &mut self,
        st: &mut FormulaStore,
        s: &Configuration,
        t: &Configuration,
    ) -> Result<FormulaId> {
        let (f, tr) = (st.ff(), st.tt());
        self.reach(st, s, t, f, t, tr)
    }

    /// `⋁_σ (σ ∧ X reach_tt(δ(S,σ), T))`: `T` is reachable from `S` along a nonempty prefix.
    pub fn nonempty_reach_tt(
        &mut self,
        st: &mut FormulaStore,
        s: &Configuration,
        t: &Configuration,
    ) -> Result<FormulaId> {
        self.cascade.check(s)?;
        self.cascade.check(t)?;
        let mut parts = Vec::new();
        for l in self.cascade.aps().letters() {
            let next = self.cascade.step(s, l);
            let r = self.reach_tt(st, &next, t)?;
            parts.push(letter_then(st, l, r));
        }
        Ok(st.or_all(parts))
    }

    /// `¬reach_tt(ι, C) ∨ reach(ι, C, false, C, ¬nonempty_reach_tt(C, C))`:
    /// the run from `ι` visits `C` finitely often.
    pub fn fin(
        &mut self,
        st: &mut FormulaStore,
        iota: &Configuration,
        c: &Configuration,
    ) -> Result<FormulaId> {
        let n = self.cascade.level_count();
        if iota.level() != n || c.level() != n {
            return Err(Error::LevelMismatch("fin needs full configurations".into()));
        }
        let never = self.reach_tt(st, iota, c)?;
        let never = st.not(never);
        let again = self.nonempty_reach_tt(st, c, c)?;
        let no_return = st.not(again);
        let f = st.ff();
        let eventually_stuck = self.reach(st, iota, c, f, c, no_return)?;
        Ok(st.or(never, eventually_stuck))
    }

    fn boundary(&mut self, level: usize, q: u32) -> Rc<BoundarySets> {
        let c = self.cascade;
        self.boundary
            .entry((level, q))
            .or_insert_with(|| Rc::new(c.boundary_sets(level, q).expect("state of the cascade")))
            .clone()
    }

    fn get(&mut self, st: &mut FormulaStore, req: ReachRequest) -> FormulaId {
        if let Some(&f) = self.memo.as_ref().and_then(|m| m.get(&req)) {
            return f;
        }
        let f = match req.kind {
            ReachKind::Reach => self.make_reach(st, &req),
            ReachKind::WeakReach => {
                let dual = ReachRequest {
                    kind: ReachKind::Reach,
                    source: req.source.clone(),
                    bad: req.target.clone(),
                    beta: req.tau,
                    target: req.bad.clone(),
                    tau: req.beta,
                };
                let r = self.get(st, dual);
                st.not(r)
            }
            ReachKind::StayReach => self.make_stay(st, &req, false),
            ReachKind::WeakStayReach => self.make_stay(st, &req, true),
            ReachKind::LeaveReach => self.make_leave(st, &req),
        };
        if let Some(m) = self.memo.as_mut() {
            if let Some(log) = self.log.as_mut() {
                log.push((req.clone(), f));
            }
            m.insert(req, f);
        }
        f
    }

    #[allow(clippy::too_many_arguments)]
    fn sub(
        &mut self,
        st: &mut FormulaStore,
        kind: ReachKind,
        source: &Configuration,
        bad: &Configuration,
        beta: FormulaId,
        target: &Configuration,
        tau: FormulaId,
    ) -> FormulaId {
        self.get(
            st,
            ReachRequest {
                kind,
                source: source.clone(),
                bad: bad.clone(),
                beta,
                target: target.clone(),
                tau,
            },
        )
    }

    fn make_reach(&mut self, st: &mut FormulaStore, r: &ReachRequest) -> FormulaId {
        if r.level() == 0 {
            let nb = st.not(r.beta);
            return st.until(nb, r.tau);
        }
        let a = self.sub(
            st,
            ReachKind::StayReach,
            &r.source,
            &r.bad,
            r.beta,
            &r.target,
            r.tau,
        );
        let b = self.sub(
            st,
            ReachKind::LeaveReach,
            &r.source,
            &r.bad,
            r.beta,
            &r.target,
            r.tau,
        );
        st.or(a, b)
    }

    /// Kinds 3 and 4.
    fn make_stay(&mut self, st: &mut FormulaStore, r: &ReachRequest, weak: bool) -> FormulaId {
        let c = self.cascade;
        let level = r.level() - 1;
        let (s_low, s) = r.source.split_top().expect("level at least 1");
        let bounds = self.boundary(level, s);
        let inner = if weak {
            ReachKind::WeakReach
        } else {
            ReachKind::Reach
        };
        // stay letters from ⟨B′,s⟩ into ⟨B,b⟩, with their guards ρ ∧ Xβ
        let bad_preds: Vec<(Configuration, FormulaId)> = bounds
            .stay
            .iter()
            .filter(|cl| c.step(&cl.lower.push(s), cl.letter) == r.bad)
            .map(|cl| (cl.lower.clone(), letter_then(st, cl.letter, r.beta)))
            .collect();
        let leave: Vec<(Configuration, FormulaId)> = bounds
            .leave
            .iter()
            .map(|cl| (cl.lower.clone(), st.letter(cl.letter)))
            .collect();

        let mut disjuncts = Vec::new();
        for cl in bounds
            .stay
            .iter()
            .filter(|cl| c.step(&cl.lower.push(s), cl.letter) == r.target)
        {
            let t_low = &cl.lower;
            let goal = letter_then(st, cl.letter, r.tau);
            let mut conj = Vec::new();
            if !weak {
                let f = st.ff();
                conj.push(self.sub(st, ReachKind::Reach, &s_low, &s_low, f, t_low, goal));
            }
            for (l, eta) in &leave {
                conj.push(self.sub(st, inner, &s_low, l, *eta, t_low, goal));
            }
            for (bp, guard) in &bad_preds {
                conj.push(self.sub(st, inner, &s_low, bp, *guard, t_low, goal));
            }
            disjuncts.push(st.and_all(conj));
        }
        if weak {
            // never reaching the target: target S with τ = false
            let f = st.ff();
            let mut conj = Vec::new();
            for (l, eta) in &leave {
                conj.push(self.sub(st, ReachKind::WeakReach, &s_low, l, *eta, &s_low, f));
            }
            for (bp, guard) in &bad_preds {
                conj.push(self.sub(st, ReachKind::WeakReach, &s_low, bp, *guard, &s_low, f));
            }
            disjuncts.push(st.and_all(conj));
        }
        let ne = st.or_all(disjuncts);
        let at_bad = r.source == r.bad;
        let at_target = r.source == r.target;
        match (at_bad, at_target, weak) {
            (false, false, _) => ne,
            (false, true, _) => st.or(ne, r.tau),
            (true, false, _) => {
                let nb = st.not(r.beta);
                st.and(ne, nb)
            }
            (true, true, false) => {
                let nb = st.not(r.beta);
                let x = st.and(ne, nb);
                st.or(x, r.tau)
            }
            (true, true, true) => {
                let nb = st.not(r.beta);
                let x = st.or(ne, r.tau);
                st.and(x, nb)
            }
        }
    }

    fn make_leave(&mut self, st: &mut FormulaStore, r: &ReachRequest) -> FormulaId {
        let c = self.cascade;
        let level = r.level() - 1;
        let (s_low, s) = r.source.split_top().expect("level at least 1");
        let b = r.bad.top().expect("level at least 1");
        let t = r.target.top().expect("level at least 1");
        let enter_t = self.boundary(level, t);
        let enter_b = self.boundary(level, b);
        let leave_s = self.boundary(level, s);

        // guards for entering b: η ∧ X weak_stay_reach(δ(⟨R,·⟩,η), ⟨T,t⟩, τ, ⟨B,b⟩, β)
        let mut b_guards = Vec::new();
        for cl in &enter_b.enter {
            let nb = reset_successor(c, &cl.lower, cl.letter, b);
            let w = self.sub(
                st,
                ReachKind::WeakStayReach,
                &nb,
                &r.target,
                r.tau,
                &r.bad,
                r.beta,
            );
            b_guards.push((cl.lower.clone(), letter_then(st, cl.letter, w)));
        }
        let mut lines12 = Vec::new();
        for cl in &enter_t.enter {
            let nt = reset_successor(c, &cl.lower, cl.letter, t);
            let cont = self.sub(
                st,
                ReachKind::StayReach,
                &nt,
                &r.bad,
                r.beta,
                &r.target,
                r.tau,
            );
            let goal = letter_then(st, cl.letter, cont);
            let f = st.ff();
            let mut conj = vec![self.sub(st, ReachKind::Reach, &s_low, &s_low, f, &cl.lower, goal)];
            for (rl, guard) in &b_guards {
                conj.push(self.sub(st, ReachKind::Reach, &s_low, rl, *guard, &cl.lower, goal));
            }
            lines12.push(st.and_all(conj));
        }
        let lines12 = st.or_all(lines12);
        let mut line3 = Vec::new();
        for cl in &leave_s.leave {
            let ls = cl.lower.push(s);
            let side = if ls == r.bad { st.not(r.beta) } else { st.tt() };
            let sigma = st.letter(cl.letter);
            let goal = st.and(sigma, side);
            line3.push(self.sub(
                st,
                ReachKind::StayReach,
                &r.source,
                &r.bad,
                r.beta,
                &ls,
                goal,
            ));
        }
        let line3 = st.or_all(line3);
        st.and(lines12, line3)
    }
}

/// `σ ∧ X f`.
fn letter_then(st: &mut FormulaStore, l: Letter, f: FormulaId) -> FormulaId {
    let sigma = st.letter(l);
    let x = st.next(f);
    st.and(sigma, x)
}

/// `δ(⟨R,·⟩, σ)` for a combined letter resetting the top level to `q`.
fn reset_successor(c: &ResetCascade, lower: &Configuration, l: Letter, q: u32) -> Configuration {
    let next = c.step(&lower.push(0), l);
    assert_eq!(
        next.top(),
        Some(q),
        "entering letter must reset to its state"
    );
    next
}

/// `d + 3^i`.
pub fn depth_bound(i: usize, d: u32) -> BigUint {
    BigUint::from(d) + BigUint::from(3u32).pow(i as u32)
}

/// `d + 3·2^i − 2`, the exact solution of the per-kind depth recurrences
/// `D(0) = d + 1` and `D(i, d) = D(i−1, 1 + D(i−1, d+1))`. It exceeds
/// `depth_bound` at levels 1 and 2 and is below it from level 3 on.
pub fn recurrence_depth_bound(i: usize, d: u32) -> BigUint {
    BigUint::from(d) + BigUint::from(3u32) * (BigUint::from(1u32) << i) - BigUint::from(2u32)
}

/// `l · (10·|Σ|²·n)^{4^i}`. Panics when `4^i` does not fit in 32 bits.
pub fn length_bound(i: usize, l: &BigUint, sigma: usize, n: usize) -> BigUint {
    let base =
        BigUint::from(10u32) * BigUint::from(sigma) * BigUint::from(sigma) * BigUint::from(n);
    let exp = 4u32.checked_pow(i as u32).expect("exponent overflow");
    l * base.pow(exp)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundReport {
    pub kind: ReachKind,
    pub level: usize,
    pub depth: u32,
    #[serde(serialize_with = "crate::ltl::metrics::ser_big")]
    pub depth_bound: BigUint,
    #[serde(serialize_with = "crate::ltl::metrics::ser_big")]
    pub recurrence_depth_bound: BigUint,
    #[serde(serialize_with = "crate::ltl::metrics::ser_big")]
    pub length: BigUint,
    /// `None` when the bound is too large to materialise; it then exceeds
    /// `length` by a bit-length argument.
    #[serde(serialize_with = "ser_opt_big")]
    pub length_bound: Option<BigUint>,
    pub depth_ok: bool,
    pub length_ok: bool,
}

impl BoundReport {
    pub fn holds(&self) -> bool {
        self.depth_ok && self.length_ok
    }
}

fn ser_opt_big<S: serde::Serializer>(
    v: &Option<BigUint>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(b) => s.serialize_str(&b.to_string()),
        None => s.serialize_none(),
    }
}

/// Measures a constructed formula against the depth and length bounds,
/// with `n = max(levels, states per level)` and letters of length 1.
pub fn bound_report(
    st: &FormulaStore,
    cascade: &ResetCascade,
    req: &ReachRequest,
    produced: FormulaId,
) -> Result<BoundReport> {
    let i = req.level();
    let d = st.depth(req.beta).max(st.depth(req.tau));
    let l = st.length(req.beta).max(st.length(req.tau)).clone();
    let sigma = cascade.aps().alphabet_size();
    let n = cascade.level_count().max(cascade.max_states() as usize);
    let depth = st.depth(produced);
    let db = depth_bound(i, d);
    let length = st.length(produced).clone();
    // the bound has more than 4^i · floor(log2 base) bits; materialise it only when that is small
    let base_bits = (10 * sigma * sigma * n).ilog2() as u64;
    let bits = 4u64
        .checked_pow(i as u32)
        .map(|e| e.saturating_mul(base_bits));
    let lb = match bits {
        Some(b) if b <= MAX_BOUND_BITS => Some(length_bound(i, &l, sigma, n)),
        Some(b) if b > length.bits() => None,
        _ => {
            return Err(Error::TooLarge {
                what: "length bound".into(),
                count: format!("level {i}"),
                limit: MAX_BOUND_BITS as usize,
            })
        }
    };
    let depth_ok = BigUint::from(depth) <= db;
    let length_ok = lb.as_ref().is_none_or(|b| &length <= b);
    Ok(BoundReport {
        kind: req.kind,
        level: i,
        depth,
        depth_bound: db,
        recurrence_depth_bound: recurrence_depth_bound(i, d),
        length,
        length_bound: lb,
        depth_ok,
        length_ok,
    })
}

/// As `bound_report`, failing with `BoundViolation` when a bound is exceeded.
pub fn bound_check(
    st: &FormulaStore,
    cascade: &ResetCascade,
    req: &ReachRequest,
    produced: FormulaId,
) -> Result<BoundReport> {
    let r = bound_report(st, cascade, req, produced)?;
    if !r.depth_ok {
        return Err(Error::BoundViolation(format!(
            "{:?} at level {}: depth {} exceeds {}",
            r.kind, r.level, r.depth, r.depth_bound
        )));
    }
    if !r.length_ok {
        return Err(Error::BoundViolation(format!(
            "{:?} at level {}: length {} exceeds {}",
            r.kind,
            r.level,
            r.length,
            r.length_bound.as_ref().expect("checked against a bound")
        )));
    }
    Ok(r)
}

/// Bit-length cap for materialising a length bound.
const MAX_BOUND_BITS: u64 = 1 << 16;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::{ApSet, Lasso};
    use crate::cascade::{Action, LevelSpec};
    use std::collections::BTreeMap;

    fn tiny() -> ResetCascade {
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

    fn cfg(v: &[u32]) -> Configuration {
        Configuration(v.to_vec())
    }

    fn all_lassos(sigma: usize, max_u: usize, max_v: usize) -> Vec<Lasso> {
        let mut out = Vec::new();
        for u in 0..=max_u {
            for v in 1..=max_v {
                for iu in 0..sigma.pow(u as u32) {
                    for iv in 0..sigma.pow(v as u32) {
                        let w = |mut n: usize, k: usize| {
                            (0..k)
                                .map(|_| {
                                    let l = Letter((n % sigma) as u32);
                                    n /= sigma;
                                    l
                                })
                                .collect::<Vec<_>>()
                        };
                        out.push(Lasso::new(w(iu, u), w(iv, v)).unwrap());
                    }
                }
            }
        }
        out
    }

    #[test]
    fn level_zero_is_until() {
        let c = tiny();
        let mut st = FormulaStore::new(c.aps().clone());
        let b = st.atom("p").unwrap();
        let t = st.tt();
        let mut rb = ReachBuilder::new(&c);
        let e = Configuration::empty();
        let f = rb.reach(&mut st, &e, &e, b, &e, t).unwrap();
        assert_eq!(st.render(f), "!p U true");
    }

    #[test]
    fn level_one_depth_exceeds_stated_bound() {
        // leave part: (true U (σ ∧ X stay)), stay containing !(ρ ∧ X β) U goal
        let c = tiny();
        let mut st = FormulaStore::new(c.aps().clone());
        let mut rb = ReachBuilder::new(&c);
        let (f0, t0) = (st.ff(), st.tt());
        let req = ReachRequest {
            kind: ReachKind::Reach,
            source: cfg(&[0]),
            bad: cfg(&[0]),
            beta: f0,
            target: cfg(&[1]),
            tau: t0,
        };
        let f = rb.build(&mut st, &req).unwrap();
        assert_eq!(st.depth(f), 4);
        let r = bound_report(&st, &c, &req, f).unwrap();
        assert!(!r.depth_ok && r.length_ok);
        assert_eq!(r.recurrence_depth_bound, BigUint::from(4u32));
        assert!(matches!(
            bound_check(&st, &c, &req, f),
            Err(Error::BoundViolation(_))
        ));
    }

    #[test]
    fn reach_equals_eventually_p() {
        let c = tiny();
        let mut st = FormulaStore::new(c.aps().clone());
        let mut rb = ReachBuilder::new(&c);
        let (f0, t0) = (st.ff(), st.tt());
        let f = rb
            .reach(&mut st, &cfg(&[0]), &cfg(&[0]), f0, &cfg(&[1]), t0)
            .unwrap();
        let fp = st.parse("F p").unwrap();
        for l in all_lassos(2, 4, 3) {
            assert_eq!(
                st.evaluate_lasso(f, &l),
                st.evaluate_lasso(fp, &l),
                "{}",
                l.display(c.aps())
            );
        }
    }

    #[test]
    fn fin_is_globally_not_p() {
        let c = tiny();
        let mut st = FormulaStore::new(c.aps().clone());
        let mut rb = ReachBuilder::new(&c);
        let f = rb.fin(&mut st, &cfg(&[0]), &cfg(&[1])).unwrap();
        let g = st.parse("G !p").unwrap();
        for l in all_lassos(2, 4, 3) {
            assert_eq!(
                st.evaluate_lasso(f, &l),
                st.evaluate_lasso(g, &l),
                "{}",
                l.display(c.aps())
            );
        }
        assert!(st.class(f).in_sigma(2));
    }

    #[test]
    fn memo_transparency() {
        let c = crate::cascade::tests::two_level();
        let mut st = FormulaStore::new(c.aps().clone());
        let beta = st.parse("p").unwrap();
        let tau = st.parse("X p").unwrap();
        let mut with = ReachBuilder::new(&c);
        let mut without = ReachBuilder::without_memo(&c);
        for kind in ReachKind::ALL {
            let req = ReachRequest {
                kind,
                source: cfg(&[0, 0]),
                bad: cfg(&[1, 0]),
                beta,
                target: cfg(&[1, 1]),
                tau,
            };
            assert_eq!(
                with.build(&mut st, &req).unwrap(),
                without.build(&mut st, &req).unwrap()
            );
        }
    }

    #[test]
    fn errors_and_bounds() {
        let c = tiny();
        let mut st = FormulaStore::new(c.aps().clone());
        let t = st.tt();
        let mut rb = ReachBuilder::new(&c);
        assert!(matches!(
            rb.reach(&mut st, &cfg(&[0]), &cfg(&[]), t, &cfg(&[0]), t),
            Err(Error::LevelMismatch(_))
        ));
        let e = Configuration::empty();
        assert!(matches!(
            rb.stay_reach(&mut st, &e, &e, t, &e, t),
            Err(Error::LevelMismatch(_))
        ));
        assert!(matches!(
            rb.reach(&mut st, &cfg(&[2]), &cfg(&[0]), t, &cfg(&[0]), t),
            Err(Error::LevelMismatch(_))
        ));
        assert_eq!(depth_bound(2, 0), BigUint::from(9u32));
        let rec: Vec<BigUint> = (0..5).map(|i| recurrence_depth_bound(i, 0)).collect();
        assert_eq!(rec, [1u32, 4, 10, 22, 46].map(BigUint::from).to_vec());
        assert!((3..12).all(|i| recurrence_depth_bound(i, 0) <= depth_bound(i, 0)));
        assert_eq!(
            length_bound(1, &BigUint::from(1u32), 2, 2),
            BigUint::from(40_960_000u32)
        );
        assert_eq!(ReachKind::from_number(3), Some(ReachKind::StayReach));
        assert_eq!(ReachKind::from_number(0), None);
    }
}
