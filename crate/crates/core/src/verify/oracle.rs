//! Direct evaluation of the intended semantics of reachability formulas.
//!
//! Every position quantifier is bounded by a horizon `H`. From position
//! `|u|` on, the pair (lasso phase, configuration) determines all
//! predicates, and it repeats within `|v| · count` further steps, so
//! `H = |u| + |v| · count + |v|` covers every witness. A multiplier scales
//! `H` for the stability check.

use crate::alphabet::Lasso;
use crate::cascade::{Action, Configuration, ResetCascade};
use crate::ltl::{FormulaStore, Program};
use crate::reach::{ReachKind, ReachRequest};

/// `multiplier · (|u| + |v| · count + |v|)` with `count` the number of
/// configurations at the request's level.
pub fn horizon(c: &ResetCascade, level: usize, lasso: &Lasso, multiplier: usize) -> usize {
    let count = c.configuration_count(level);
    multiplier * (lasso.spoke().len() + lasso.cycle().len() * count + lasso.cycle().len())
}

/// Evaluates one request on many lassos.
pub struct Oracle<'a> {
    cascade: &'a ResetCascade,
    req: ReachRequest,
    prog: Program,
    multiplier: usize,
}

impl<'a> Oracle<'a> {
    pub fn new(cascade: &'a ResetCascade, st: &FormulaStore, req: &ReachRequest) -> Self {
        Self::with_multiplier(cascade, st, req, 1)
    }

    pub fn with_multiplier(
        cascade: &'a ResetCascade,
        st: &FormulaStore,
        req: &ReachRequest,
        multiplier: usize,
    ) -> Self {
        Oracle {
            cascade,
            req: req.clone(),
            prog: Program::new(st, &[req.beta, req.tau]),
            multiplier,
        }
    }

    pub fn eval(&self, lasso: &Lasso) -> bool {
        let c = self.cascade;
        let r = &self.req;
        let level = r.level();
        let h = horizon(c, level, lasso, self.multiplier);
        let beta_at = self.prog.truth_along(lasso, 0);
        let tau_at = self.prog.truth_along(lasso, 1);
        let mut cfg: Vec<Configuration> = Vec::with_capacity(h + 1);
        cfg.push(r.source.clone());
        for j in 0..h {
            let next = c.step(&cfg[j], lasso.letter_at(j));
            cfg.push(next);
        }
        let bad = |j: usize| cfg[j] == r.bad && beta_at[lasso.fold(j)];
        let good = |j: usize| cfg[j] == r.target && tau_at[lasso.fold(j)];
        // the combined letter read at position j by the top level
        let action = |j: usize| -> Action {
            let lower = &cfg[j].0[..level - 1];
            c.action(level - 1, lasso.letter_at(j), lower)
        };
        let s = r.source.top();
        let stays = |j: usize| {
            matches!(action(j), Action::Identity) || Some(action(j)) == s.map(Action::Reset)
        };
        let first = |p: &dyn Fn(usize) -> bool| (0..=h).find(|&j| p(j));
        match r.kind {
            ReachKind::Reach => {
                let fb = first(&bad).unwrap_or(usize::MAX);
                (0..=h).any(|i| good(i) && i <= fb)
            }
            ReachKind::WeakReach => {
                let fg = first(&good).unwrap_or(usize::MAX);
                (0..=h).all(|i| !bad(i) || fg < i)
            }
            ReachKind::StayReach => {
                let fb = first(&bad).unwrap_or(usize::MAX);
                let fl = (0..h).find(|&j| !stays(j)).unwrap_or(usize::MAX);
                (0..=h).any(|i| good(i) && i <= fb && i <= fl)
            }
            ReachKind::WeakStayReach => {
                let fg = first(&good).unwrap_or(usize::MAX);
                (0..=h).all(|i| {
                    let trigger = bad(i) || (i > 0 && !stays(i - 1));
                    !trigger || fg < i
                })
            }
            ReachKind::LeaveReach => {
                let t = r.target.top().expect("level at least 1");
                let fb = first(&bad).unwrap_or(usize::MAX);
                // the earliest leave is the best choice of i2
                match (0..=h).find(|&j| !stays(j)) {
                    Some(i2) if i2 < fb => {}
                    _ => return false,
                }
                let fe = (0..=h).find(|&j| action(j) == Action::Reset(t));
                let Some(fe) = fe else { return false };
                // i1 > fe, and positions up to i1 − 1 avoid the bad situation
                (fe + 1..=h).any(|i1| good(i1) && i1 <= fb)
            }
        }
    }
}

/// The intended semantics of `req` on `lasso`, with the default horizon.
pub fn intended_semantics(
    c: &ResetCascade,
    st: &FormulaStore,
    req: &ReachRequest,
    lasso: &Lasso,
) -> bool {
    Oracle::new(c, st, req).eval(lasso)
}

/// Whether the run from `iota` visits `target` only finitely often.
pub fn fin_by_simulation(
    c: &ResetCascade,
    iota: &Configuration,
    target: &Configuration,
    lasso: &Lasso,
) -> bool {
    let mut q = c.run(iota, lasso.spoke());
    // iterate the cycle until its start configuration repeats
    let mut starts = Vec::new();
    let mut visits: Vec<bool> = Vec::new();
    loop {
        if let Some(k) = starts.iter().position(|s| *s == q) {
            return !visits[k..].iter().any(|&v| v);
        }
        starts.push(q.clone());
        let mut hit = false;
        for &l in lasso.cycle() {
            hit |= q == *target;
            q = c.step(&q, l);
        }
        visits.push(hit);
    }
}
