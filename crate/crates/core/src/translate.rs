//! End-to-end translation: automaton → reset cascade → lifted acceptance →
//! LTL formula in the syntactic fragment matching the acceptance type.
//!
//! | acceptance        | encoding                              | fragment |
//! |-------------------|---------------------------------------|----------|
//! | looping coBüchi   | `⋁ reach_tt(ι′, C)` over the sink     | Σ₁       |
//! | looping Büchi     | its negation                          | Π₁       |
//! | weak              | reach an accepting SCC, never leave   | Δ₁       |
//! | coBüchi           | `⋀ Fin(C)` over `α′`                  | Σ₂       |
//! | Büchi             | `¬⋀ Fin(C)` over `α′`                 | Π₂       |
//! | Muller, Rabin     | Boolean combination of `Fin(C)`       | Δ₂       |

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::automata::{is_counter_free, sccs, AcceptanceCondition, OmegaAutomaton, StateSet};
use crate::cascade::{
    decompose_holonomy, lift_acceptance, CascadeAutomaton, ConfigAcceptance, ConfigSet,
    Homomorphism,
};
use crate::error::{Error, Result};
use crate::ltl::{FormulaId, FormulaStore, HierarchyClass, Metrics};
use crate::reach::{bound_report, BoundReport, ReachBuilder, ReachRequest};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Fragment {
    Pi1,
    Sigma1,
    Delta1,
    Pi2,
    Sigma2,
    Delta2,
}

impl Fragment {
    /// Whether a formula of class `c` belongs to the fragment.
    pub fn admits(self, c: &HierarchyClass) -> bool {
        match self {
            Fragment::Sigma1 => c.in_sigma(1),
            Fragment::Pi1 => c.in_pi(1),
            Fragment::Delta1 => c.in_delta(1),
            Fragment::Sigma2 => c.in_sigma(2),
            Fragment::Pi2 => c.in_pi(2),
            Fragment::Delta2 => c.in_delta(2),
        }
    }
}

impl fmt::Display for Fragment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Fragment::Pi1 => "Π₁",
            Fragment::Sigma1 => "Σ₁",
            Fragment::Delta1 => "Δ₁",
            Fragment::Pi2 => "Π₂",
            Fragment::Sigma2 => "Σ₂",
            Fragment::Delta2 => "Δ₂",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Encoding {
    LoopingCoBuchi,
    LoopingBuchi,
    Weak,
    CoBuchi,
    Buchi,
    Muller,
}

impl Encoding {
    pub fn fragment(self) -> Fragment {
        match self {
            Encoding::LoopingCoBuchi => Fragment::Sigma1,
            Encoding::LoopingBuchi => Fragment::Pi1,
            Encoding::Weak => Fragment::Delta1,
            Encoding::CoBuchi => Fragment::Sigma2,
            Encoding::Buchi => Fragment::Pi2,
            Encoding::Muller => Fragment::Delta2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranslateOptions {
    pub max_configs: usize,
    pub max_muller_sets: usize,
    /// Use the looping and weak encoders when the structure allows. Off by
    /// default, so Büchi and coBüchi inputs land in Π₂ and Σ₂.
    pub structural: bool,
    /// Check the depth and length bounds of every reachability formula.
    pub check_bounds: bool,
}

impl Default for TranslateOptions {
    fn default() -> Self {
        TranslateOptions {
            max_configs: 4096,
            max_muller_sets: 4096,
            structural: false,
            check_bounds: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PipelineStats {
    pub levels: usize,
    pub states_per_level: Vec<u32>,
    /// Configurations reachable from the initial one.
    pub configurations: usize,
    /// Size of the lifted acceptance condition.
    pub lifted_set_count: usize,
}

#[derive(Debug, Clone)]
pub struct TranslationResult {
    pub formula: FormulaId,
    pub encoding: Encoding,
    pub claimed_fragment: Fragment,
    pub class: HierarchyClass,
    pub metrics: Metrics,
    pub stats: PipelineStats,
    /// Every reachability formula built, in construction order, when requested.
    pub reach_log: Vec<(ReachRequest, FormulaId)>,
    pub bounds: Vec<BoundReport>,
    pub cascade_automaton: CascadeAutomaton,
    pub homomorphism: Homomorphism,
}

impl TranslationResult {
    /// Whether the classifier confirms the claimed fragment.
    pub fn fragment_confirmed(&self) -> bool {
        self.claimed_fragment.admits(&self.class)
    }
}

/// Translates a counter-free deterministic automaton into an LTL formula in `st`.
pub fn translate(
    st: &mut FormulaStore,
    d: &OmegaAutomaton,
    opts: &TranslateOptions,
) -> Result<TranslationResult> {
    if st.aps() != d.semi().aps() {
        return Err(Error::AlphabetMismatch(
            "formula store and automaton declare different propositions".into(),
        ));
    }
    if !is_counter_free(d.semi()) {
        return Err(Error::NotCounterFree);
    }
    // Rabin conditions are rewritten as the equivalent Muller condition
    let muller;
    let d = if matches!(d.acceptance(), AcceptanceCondition::Rabin(_)) {
        muller = d.to_muller()?;
        &muller
    } else {
        d
    };
    let (cascade, hom) = decompose_holonomy(d.semi())?;
    if cascade.configuration_count(cascade.level_count()) > opts.max_configs {
        return Err(Error::TooLarge {
            what: "cascade configurations".into(),
            count: cascade
                .configuration_count(cascade.level_count())
                .to_string(),
            limit: opts.max_configs,
        });
    }
    let ca = lift_acceptance(d, &cascade, &hom, opts.max_muller_sets, opts.max_configs)?;
    let mut b = ReachBuilder::new(ca.cascade()).recording();
    let flags = if opts.structural {
        d.classify_structure().ok()
    } else {
        None
    };
    let (encoding, formula) = match (d.acceptance(), flags) {
        (AcceptanceCondition::Buchi(_), Some(f)) if f.looping => (
            Encoding::LoopingBuchi,
            encode_looping(st, &mut b, &ca, &hom, d, false)?,
        ),
        (AcceptanceCondition::CoBuchi(_), Some(f)) if f.looping => (
            Encoding::LoopingCoBuchi,
            encode_looping(st, &mut b, &ca, &hom, d, true)?,
        ),
        (AcceptanceCondition::Buchi(_) | AcceptanceCondition::CoBuchi(_), Some(f)) if f.weak => {
            (Encoding::Weak, encode_weak(st, &mut b, &ca, &hom, d)?)
        }
        (AcceptanceCondition::Buchi(_), _) => (Encoding::Buchi, encode_buchi(st, &mut b, &ca)?),
        (AcceptanceCondition::CoBuchi(_), _) => {
            (Encoding::CoBuchi, encode_cobuchi(st, &mut b, &ca)?)
        }
        _ => (Encoding::Muller, encode_muller(st, &mut b, &ca)?),
    };
    let reach_log = b.constructed().to_vec();
    let bounds = if opts.check_bounds {
        reach_log
            .iter()
            .map(|(r, f)| bound_report(st, ca.cascade(), r, *f))
            .collect::<Result<Vec<_>>>()?
    } else {
        Vec::new()
    };
    let stats = PipelineStats {
        levels: cascade.level_count(),
        states_per_level: cascade.states_per_level(),
        configurations: ca.configurations().len(),
        lifted_set_count: ca.acceptance_size(),
    };
    Ok(TranslationResult {
        formula,
        encoding,
        claimed_fragment: encoding.fragment(),
        class: st.class(formula),
        metrics: st.metrics(formula),
        stats,
        reach_log,
        bounds,
        cascade_automaton: ca,
        homomorphism: hom,
    })
}

fn fins(
    st: &mut FormulaStore,
    b: &mut ReachBuilder<'_>,
    ca: &CascadeAutomaton,
    set: &ConfigSet,
) -> Result<Vec<FormulaId>> {
    set.iter().map(|c| b.fin(st, ca.initial(), c)).collect()
}

fn wrong_kind(what: &str, ca: &CascadeAutomaton) -> Error {
    let kind = match ca.acceptance() {
        ConfigAcceptance::Buchi(_) => "Buchi",
        ConfigAcceptance::CoBuchi(_) => "CoBuchi",
        ConfigAcceptance::Rabin(_) => "Rabin",
        ConfigAcceptance::Muller(_) => "Muller",
    };
    Error::NotApplicable(format!(
        "{what} encoding needs {what} acceptance, found {kind}"
    ))
}

/// `⋀_{C∈α′} Fin(C)`.
pub fn encode_cobuchi(
    st: &mut FormulaStore,
    b: &mut ReachBuilder<'_>,
    ca: &CascadeAutomaton,
) -> Result<FormulaId> {
    let ConfigAcceptance::CoBuchi(alpha) = ca.acceptance() else {
        return Err(wrong_kind("CoBuchi", ca));
    };
    let f = fins(st, b, ca, alpha)?;
    Ok(st.and_all(f))
}

/// The negation of the coBüchi encoding of the complement automaton.
pub fn encode_buchi(
    st: &mut FormulaStore,
    b: &mut ReachBuilder<'_>,
    ca: &CascadeAutomaton,
) -> Result<FormulaId> {
    let ConfigAcceptance::Buchi(alpha) = ca.acceptance() else {
        return Err(wrong_kind("Buchi", ca));
    };
    let f = fins(st, b, ca, alpha)?;
    let co = st.and_all(f);
    Ok(st.not(co))
}

/// `⋁_M (⋀_{C∈M} ¬Fin(C) ∧ ⋀_{C∉M} Fin(C))`, `C` ranging over reachable configurations.
pub fn encode_muller(
    st: &mut FormulaStore,
    b: &mut ReachBuilder<'_>,
    ca: &CascadeAutomaton,
) -> Result<FormulaId> {
    let ConfigAcceptance::Muller(sets) = ca.acceptance() else {
        return Err(wrong_kind("Muller", ca));
    };
    let all: ConfigSet = ca.configurations().iter().cloned().collect();
    let fin: Vec<FormulaId> = fins(st, b, ca, &all)?;
    let mut disjuncts = Vec::with_capacity(sets.len());
    for m in sets {
        let parts: Vec<FormulaId> = all
            .iter()
            .zip(&fin)
            .map(|(c, &f)| if m.contains(c) { st.not(f) } else { f })
            .collect();
        disjuncts.push(st.and_all(parts));
    }
    Ok(st.or_all(disjuncts))
}

fn reachable_preimage(ca: &CascadeAutomaton, h: &Homomorphism, states: &StateSet) -> ConfigSet {
    ca.configurations()
        .iter()
        .filter(|c| h.get(c).is_some_and(|q| states.contains(&q)))
        .cloned()
        .collect()
}

/// Looping coBüchi: `⋁_{C∈h⁻¹(sink)} reach_tt(ι′, C)`; looping Büchi: its negation.
pub fn encode_looping(
    st: &mut FormulaStore,
    b: &mut ReachBuilder<'_>,
    ca: &CascadeAutomaton,
    h: &Homomorphism,
    d: &OmegaAutomaton,
    cobuchi: bool,
) -> Result<FormulaId> {
    let flags = d.classify_structure()?;
    let Some(sink) = flags.sink else {
        return Err(Error::NotApplicable("automaton is not looping".into()));
    };
    let targets = reachable_preimage(ca, h, &[sink].into());
    let reach: Vec<FormulaId> = targets
        .iter()
        .map(|c| b.reach_tt(st, ca.initial(), c))
        .collect::<Result<_>>()?;
    let f = st.or_all(reach);
    Ok(if cobuchi { f } else { st.not(f) })
}

/// `⋁_G (⋁_{C∈h⁻¹(G)} reach_tt(ι′, C) ∧ ⋀_{C∈h⁻¹(G′)} ¬reach_tt(ι′, C))` over
/// accepting SCCs `G`, with `G′` the states reachable from `G` outside `G`.
pub fn encode_weak(
    st: &mut FormulaStore,
    b: &mut ReachBuilder<'_>,
    ca: &CascadeAutomaton,
    h: &Homomorphism,
    d: &OmegaAutomaton,
) -> Result<FormulaId> {
    if !d.classify_structure()?.weak {
        return Err(Error::NotApplicable("automaton is not weak".into()));
    }
    let (alpha, buchi) = match d.acceptance() {
        AcceptanceCondition::Buchi(a) => (a, true),
        AcceptanceCondition::CoBuchi(a) => (a, false),
        _ => unreachable!("structural flags exist only for Buchi and coBuchi"),
    };
    let semi = d.semi();
    let live = semi.reachable_from(d.initial());
    let mut disjuncts = Vec::new();
    for g in sccs(semi) {
        // a run settles in G only if G is reachable and has an internal edge
        let cyclic = g
            .iter()
            .any(|&q| semi.aps().letters().any(|l| g.contains(&semi.step(q, l))));
        if !cyclic || g.is_disjoint(&live) || buchi != g.is_subset(alpha) {
            continue;
        }
        let closure: BTreeSet<u32> = g.iter().flat_map(|&q| semi.reachable_from(q)).collect();
        let beyond: StateSet = closure.difference(&g).copied().collect();
        let enter: Vec<FormulaId> = reachable_preimage(ca, h, &g)
            .iter()
            .map(|c| b.reach_tt(st, ca.initial(), c))
            .collect::<Result<_>>()?;
        let mut parts = vec![st.or_all(enter)];
        for c in reachable_preimage(ca, h, &beyond) {
            let r = b.reach_tt(st, ca.initial(), &c)?;
            parts.push(st.not(r));
        }
        disjuncts.push(st.and_all(parts));
    }
    Ok(st.or_all(disjuncts))
}

/// Size, shape and bound summary of a translation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StatsReport {
    pub encoding: Encoding,
    pub fragment: String,
    pub class: HierarchyClass,
    pub depth: u32,
    /// Exact tree length in decimal.
    pub length: String,
    pub dag_size: usize,
    pub levels: usize,
    pub states_per_level: Vec<u32>,
    pub configurations: usize,
    pub lifted_set_count: usize,
    pub reach_calls: usize,
    pub bounds_checked: usize,
}

pub fn stats_report(r: &TranslationResult) -> StatsReport {
    StatsReport {
        encoding: r.encoding,
        fragment: r.claimed_fragment.to_string(),
        class: r.class,
        depth: r.metrics.depth,
        length: r.metrics.length.to_string(),
        dag_size: r.metrics.dag_size,
        levels: r.stats.levels,
        states_per_level: r.stats.states_per_level.clone(),
        configurations: r.stats.configurations,
        lifted_set_count: r.stats.lifted_set_count,
        reach_calls: r.reach_log.len(),
        bounds_checked: r.bounds.len(),
    }
}

impl fmt::Display for StatsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "encoding: {:?}", self.encoding)?;
        writeln!(f, "fragment: {}", self.fragment)?;
        writeln!(
            f,
            "class: sigma {} pi {} delta {}",
            self.class.min_sigma, self.class.min_pi, self.class.min_delta
        )?;
        writeln!(f, "depth: {}", self.depth)?;
        writeln!(f, "length: {}", self.length)?;
        writeln!(f, "dag_size: {}", self.dag_size)?;
        writeln!(f, "levels: {}", self.levels)?;
        let spl: Vec<String> = self
            .states_per_level
            .iter()
            .map(|s| s.to_string())
            .collect();
        writeln!(f, "states_per_level: {}", spl.join(","))?;
        writeln!(f, "configurations: {}", self.configurations)?;
        writeln!(f, "lifted_set_count: {}", self.lifted_set_count)?;
        writeln!(f, "reach_calls: {}", self.reach_calls)?;
        write!(f, "bounds_checked: {}", self.bounds_checked)
    }
}
