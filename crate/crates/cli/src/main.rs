//! `aut2ltl`: counter-free deterministic omega-automata to LTL.
//!
//! Exit status: 0 success, 1 counterexample or failed check, 2 usage or
//! parse error, 3 resource limit.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use aut2ltl_core::automata::{
    is_counter_free, parse_automaton, parse_hoa, render_automaton, LassoAcceptor,
};
use aut2ltl_core::cascade::{
    decompose_holonomy, lift_acceptance, parse_cascade, render_cascade, verify_homomorphism,
    ConfigAcceptance, ConfigSet,
};
use aut2ltl_core::ltl::LetterCost;
use aut2ltl_core::reach::{bound_report, ReachBuilder, ReachKind, ReachRequest};
use aut2ltl_core::translate::stats_report;
use aut2ltl_core::unary::{
    bounds_table, counter_afa, frobenius, max_gap, unary_nfa_to_ltl, unary_store, vk_nfa, UnaryNfa,
};
use aut2ltl_core::verify::{
    equivalent_on_lassos, generate_corpus, random_cascade, random_request, CorpusKind, LassoFamily,
    Oracle,
};
use aut2ltl_core::{
    translate, ApSet, Configuration, Error, FormulaId, FormulaStore, Fragment, Lasso, Letter,
    OmegaAutomaton, TranslateOptions,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

const DEFAULT_SEED: u64 = 20240601;
/// Formulas with a longer syntax tree are printed as shared definitions.
const INLINE_LIMIT: u64 = 20_000;

#[derive(Parser)]
#[command(
    name = "aut2ltl",
    version,
    about = "Translate counter-free deterministic omega-automata into LTL"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Global {
    /// Machine-readable JSON on stdout; byte-identical across runs.
    #[arg(long, global = true)]
    json: bool,
    /// Configuration count limit for decomposition and lifting.
    #[arg(long, global = true, default_value_t = 4096)]
    max_configs: usize,
    /// Limit on lifted Muller sets.
    #[arg(long, global = true, default_value_t = 4096)]
    max_muller_sets: usize,
    /// Longest lasso spoke enumerated by verification.
    #[arg(long, global = true, default_value_t = 5)]
    max_u: usize,
    /// Longest lasso cycle enumerated by verification.
    #[arg(long, global = true, default_value_t = 4)]
    max_v: usize,
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Worker threads; 0 uses all cores.
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Translate an automaton into an LTL formula.
    Translate {
        #[arg(long = "in")]
        input: PathBuf,
        /// Classify the output and fail unless it lies in the claimed fragment.
        #[arg(long)]
        fragment_check: bool,
        /// Use the looping and weak encoders when the input allows them.
        #[arg(long)]
        structural: bool,
        /// Fold `true`/`false` constants in the output; never raises its class.
        #[arg(long)]
        simplify: bool,
        /// Print every reachability formula built along the way.
        #[arg(long)]
        emit_reach: bool,
        /// Check the depth and length bounds of every reachability formula.
        #[arg(long)]
        check_bounds: bool,
        /// Print the formula as shared definitions.
        #[arg(long)]
        dag: bool,
    },
    /// Holonomy decomposition into a reset cascade with its homomorphism.
    Decompose {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Lift the acceptance condition onto the cascade configurations.
    Lift {
        #[arg(long = "in")]
        input: PathBuf,
        /// Print the lifted automaton in the native format.
        #[arg(long)]
        automaton: bool,
    },
    /// Structural checks on an automaton, or on a cascade against it.
    Check {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        counter_free: bool,
        /// Weak and looping flags.
        #[arg(long)]
        structure: bool,
        /// Check a cascade file with homomorphism against the automaton.
        #[arg(long)]
        cascade: Option<PathBuf>,
    },
    /// Least syntactic hierarchy levels of a formula.
    Classify {
        #[arg(long)]
        formula: String,
        /// Atomic propositions, comma or space separated.
        #[arg(long, default_value = "")]
        aps: String,
        /// Fail unless the formula lies in this fragment.
        #[arg(long)]
        expect: Option<FragmentArg>,
    },
    /// Evaluate a formula or an automaton on a lasso or finite word.
    Eval {
        #[arg(long)]
        formula: Option<String>,
        /// Automaton file; its propositions replace `--aps`.
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[arg(long, default_value = "")]
        aps: String,
        /// Lasso literal: spoke letters `;` cycle letters.
        #[arg(long, conflicts_with = "finite")]
        lasso: Option<String>,
        /// Finite word as a sequence of letters (formulas only).
        #[arg(long)]
        finite: Option<String>,
    },
    /// Check a translation, or a random corpus, against exhaustive lassos.
    Verify {
        #[arg(long = "in", required_unless_present_any = ["corpus", "reach"])]
        input: Option<PathBuf>,
        /// Check this formula instead of the translation.
        #[arg(long, requires = "input")]
        formula: Option<String>,
        /// Translate and check this many random counter-free automata.
        #[arg(long)]
        corpus: Option<usize>,
        /// Check this many random reachability formulas against the oracle.
        #[arg(long)]
        reach: Option<usize>,
    },
    /// Unary-alphabet constructions on finite words.
    Unary {
        #[command(subcommand)]
        command: UnaryCommand,
    },
    /// Size and depth report for a translation or one reachability formula.
    Stats {
        #[arg(
            long = "in",
            conflicts_with = "cascade",
            required_unless_present = "cascade"
        )]
        input: Option<PathBuf>,
        /// Cascade file for a single reachability formula.
        #[arg(long, requires_all = ["kind", "source", "target"])]
        cascade: Option<PathBuf>,
        #[arg(long, value_enum)]
        kind: Option<KindArg>,
        /// Configuration such as `(0,1)`; `()` is the empty one.
        #[arg(long)]
        source: Option<String>,
        /// Defaults to the source.
        #[arg(long)]
        bad: Option<String>,
        #[arg(long)]
        target: Option<String>,
        #[arg(long, default_value = "false")]
        beta: String,
        #[arg(long, default_value = "true")]
        tau: String,
        /// Count each letter as its literal conjunction.
        #[arg(long)]
        expanded_letters: bool,
        /// Print every reachability formula built along the way.
        #[arg(long)]
        emit_reach: bool,
    },
}

#[derive(Subcommand)]
enum UnaryCommand {
    /// The size-O(n) alternating counter accepting exactly a^(2^(n-1)).
    Afa {
        n: usize,
        /// Longest word checked.
        #[arg(long, default_value_t = 40)]
        max_len: usize,
    },
    /// The (k+1)-state NFA whose language omits exactly the non-sums of k and k+1.
    Vk {
        k: usize,
        /// Print only the largest rejected length.
        #[arg(long)]
        max_gap: bool,
        /// Also translate it into LTL.
        #[arg(long)]
        ltl: bool,
    },
    /// Translate a unary NFA file into LTL over finite words.
    Nfa2ltl { file: PathBuf },
    /// DFA, NFA and AFA succinctness evidence table.
    Bounds {
        #[arg(long, default_value_t = 5)]
        max_k: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FragmentArg {
    Pi1,
    Sigma1,
    Delta1,
    Pi2,
    Sigma2,
    Delta2,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Reach,
    WeakReach,
    StayReach,
    WeakStayReach,
    LeaveReach,
}

impl From<KindArg> for ReachKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Reach => ReachKind::Reach,
            KindArg::WeakReach => ReachKind::WeakReach,
            KindArg::StayReach => ReachKind::StayReach,
            KindArg::WeakStayReach => ReachKind::WeakStayReach,
            KindArg::LeaveReach => ReachKind::LeaveReach,
        }
    }
}

/// A finished command: stdout text and exit status.
struct Report {
    text: String,
    json: Value,
    status: u8,
}

impl Report {
    fn ok(text: String, json: Value) -> Self {
        Report {
            text,
            json,
            status: 0,
        }
    }

    fn failed(text: String, json: Value) -> Self {
        Report {
            text,
            json,
            status: 1,
        }
    }
}

enum Failure {
    Usage(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

type Outcome = std::result::Result<Report, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.global.jobs > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.global.jobs)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let json = cli.global.json;
    match run(cli) {
        Ok(r) => {
            if json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&r.json).expect("serialisable report")
                );
            } else {
                print!("{}", r.text);
            }
            ExitCode::from(r.status)
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(status_of(&e))
        }
    }
}

fn status_of(e: &Error) -> u8 {
    if e.is_resource_limit() {
        3
    } else if matches!(
        e,
        Error::NotCounterFree | Error::NotLtlExpressible | Error::BoundViolation(_)
    ) {
        1
    } else {
        2
    }
}

fn run(cli: Cli) -> Outcome {
    let g = cli.global;
    match cli.command {
        Command::Translate {
            input,
            fragment_check,
            structural,
            simplify,
            emit_reach,
            check_bounds,
            dag,
        } => {
            let flags = TranslateFlags {
                fragment_check,
                structural,
                simplify,
                emit_reach,
                check_bounds,
                dag,
            };
            cmd_translate(&g, &input, flags)
        }
        Command::Decompose { input } => cmd_decompose(&g, &input),
        Command::Lift { input, automaton } => cmd_lift(&g, &input, automaton),
        Command::Check {
            input,
            counter_free,
            structure,
            cascade,
        } => cmd_check(&input, counter_free, structure, cascade.as_deref()),
        Command::Classify {
            formula,
            aps,
            expect,
        } => cmd_classify(&formula, &aps, expect),
        Command::Eval {
            formula,
            input,
            aps,
            lasso,
            finite,
        } => cmd_eval(formula, input, &aps, lasso, finite),
        Command::Verify {
            input,
            formula,
            corpus,
            reach,
        } => match (input, corpus, reach) {
            (Some(p), None, None) => cmd_verify_file(&g, &p, formula),
            (None, Some(n), None) => cmd_verify_corpus(&g, n),
            (None, None, Some(n)) => cmd_verify_reach(&g, n),
            _ => Err(Failure::Usage(
                "give exactly one of --in, --corpus, --reach".into(),
            )),
        },
        Command::Unary { command } => cmd_unary(command),
        Command::Stats {
            input,
            cascade,
            kind,
            source,
            bad,
            target,
            beta,
            tau,
            expanded_letters,
            emit_reach,
        } => match (input, cascade) {
            (Some(p), None) => cmd_stats_translation(&g, &p, expanded_letters, emit_reach),
            (None, Some(c)) => {
                let kind = kind.expect("required by clap").into();
                let source = source.expect("required by clap");
                let bad = bad.unwrap_or_else(|| source.clone());
                let target = target.expect("required by clap");
                cmd_stats_reach(
                    &c,
                    kind,
                    &source,
                    &bad,
                    &target,
                    &beta,
                    &tau,
                    expanded_letters,
                )
            }
            _ => Err(Failure::Usage("give --in or --cascade".into())),
        },
    }
}

fn read(path: &Path) -> std::result::Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

/// Native format, or the interchange format when the file starts with `HOA:`.
fn load_automaton(path: &Path) -> std::result::Result<OmegaAutomaton, Failure> {
    let text = read(path)?;
    let parsed = if text.trim_start().starts_with("HOA:") {
        parse_hoa(&text)
    } else {
        parse_automaton(&text)
    };
    parsed.map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn parse_aps(text: &str) -> std::result::Result<ApSet, Failure> {
    let names: Vec<&str> = text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .collect();
    ApSet::new(&names).map_err(|e| Failure::Usage(e.to_string()))
}

fn parse_formula(st: &mut FormulaStore, text: &str) -> std::result::Result<FormulaId, Failure> {
    st.parse(text)
        .map_err(|e| Failure::Usage(format!("formula: {e}")))
}

fn parse_configuration(text: &str) -> std::result::Result<Configuration, Failure> {
    let body = text
        .trim()
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(|| {
            Failure::Usage(format!("configuration `{text}` must look like (q1,...,qi)"))
        })?;
    let states = body
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<u32>()
                .map_err(|_| Failure::Usage(format!("bad state `{s}` in `{text}`")))
        })
        .collect::<std::result::Result<Vec<u32>, Failure>>()?;
    Ok(Configuration(states))
}

fn formula_text(st: &FormulaStore, f: FormulaId, dag: bool) -> String {
    match (dag, st.render_bounded(f, INLINE_LIMIT)) {
        (false, Some(s)) => s,
        _ => st.render_dag(f),
    }
}

fn class_json(c: &aut2ltl_core::HierarchyClass) -> Value {
    json!({ "sigma": c.min_sigma, "pi": c.min_pi, "delta": c.min_delta })
}

fn translate_opts(g: &Global, structural: bool, check_bounds: bool) -> TranslateOptions {
    TranslateOptions {
        max_configs: g.max_configs,
        max_muller_sets: g.max_muller_sets,
        structural,
        check_bounds,
    }
}

fn reach_lines(st: &FormulaStore, log: &[(ReachRequest, FormulaId)]) -> (String, Vec<Value>) {
    let mut text = String::new();
    let mut items = Vec::new();
    for (r, f) in log {
        let head = format!(
            "{:?} level {} s={} b={} t={}",
            r.kind,
            r.level(),
            r.source,
            r.bad,
            r.target
        );
        let body = st
            .render_bounded(*f, INLINE_LIMIT)
            .unwrap_or_else(|| format!("<{} nodes>", st.length(*f)));
        text.push_str(&format!("reach: {head}: {body}\n"));
        let m = st.metrics(*f);
        items.push(json!({
            "kind": format!("{:?}", r.kind),
            "level": r.level(),
            "source": r.source.to_string(),
            "bad": r.bad.to_string(),
            "target": r.target.to_string(),
            "depth": m.depth,
            "length": m.length.to_string(),
            "dag_size": m.dag_size,
        }));
    }
    (text, items)
}

struct TranslateFlags {
    fragment_check: bool,
    structural: bool,
    simplify: bool,
    emit_reach: bool,
    check_bounds: bool,
    dag: bool,
}

fn cmd_translate(g: &Global, input: &Path, flags: TranslateFlags) -> Outcome {
    let TranslateFlags {
        fragment_check,
        structural,
        simplify,
        emit_reach,
        check_bounds,
        dag,
    } = flags;
    let d = load_automaton(input)?;
    let mut st = FormulaStore::new(d.semi().aps().clone());
    let start = Instant::now();
    let r = translate(&mut st, &d, &translate_opts(g, structural, check_bounds))?;
    let formula = if simplify {
        st.fold_constants(r.formula)
    } else {
        r.formula
    };
    let elapsed = start.elapsed();
    let metrics = st.metrics(formula);
    let class = st.class(formula);
    let mut text = if dag {
        format!(
            "formula:\n{}\n",
            formula_text(&st, formula, true).trim_end()
        )
    } else {
        format!(
            "formula: {}\n",
            formula_text(&st, formula, false).trim_end()
        )
    };
    text.push_str(&format!("encoding: {:?}\n", r.encoding));
    text.push_str(&format!("fragment: {}\n", r.claimed_fragment));
    text.push_str(&format!(
        "depth: {}\nlength: {}\ndag_size: {}\n",
        metrics.depth, metrics.length, metrics.dag_size
    ));
    let mut json = json!({
        "formula": st.render_bounded(formula, INLINE_LIMIT),
        "encoding": format!("{:?}", r.encoding),
        "fragment": r.claimed_fragment.to_string(),
        "metrics": metrics,
    });
    let mut status = 0;
    if fragment_check {
        let confirmed = r.claimed_fragment.admits(&class);
        text.push_str(&format!(
            "class: sigma {} pi {} delta {}\nfragment check: {}\n",
            class.min_sigma,
            class.min_pi,
            class.min_delta,
            if confirmed { "confirmed" } else { "FAILED" }
        ));
        json["class"] = class_json(&class);
        json["fragment_confirmed"] = json!(confirmed);
        if !confirmed {
            status = 1;
        }
    }
    if check_bounds {
        let bad: Vec<_> = r.bounds.iter().filter(|b| !b.holds()).collect();
        let over_recurrence = r
            .bounds
            .iter()
            .filter(|b| b.recurrence_depth_bound < b.depth.into())
            .count();
        text.push_str(&format!(
            "bounds: {} checked, {} outside the stated bounds, {} above the recurrence depth bound\n",
            r.bounds.len(),
            bad.len(),
            over_recurrence
        ));
        for b in &bad {
            text.push_str(&format!(
                "  {:?} level {}: depth {} (bound {}), length {} ({})\n",
                b.kind,
                b.level,
                b.depth,
                b.depth_bound,
                b.length,
                if b.length_ok {
                    "within bound"
                } else {
                    "over bound"
                }
            ));
        }
        json["bounds"] = json!(r.bounds);
        if bad.iter().any(|b| !b.length_ok) || over_recurrence > 0 {
            status = 1;
        }
    }
    if emit_reach {
        let (t, items) = reach_lines(&st, &r.reach_log);
        text.push_str(&t);
        json["reach"] = Value::Array(items);
    }
    text.push_str(&format!("time: {:.3}s\n", elapsed.as_secs_f64()));
    Ok(Report { text, json, status })
}

fn cmd_decompose(g: &Global, input: &Path) -> Outcome {
    let d = load_automaton(input)?;
    if !is_counter_free(d.semi()) {
        return Err(Error::NotCounterFree.into());
    }
    let (c, h) = decompose_holonomy(d.semi())?;
    let configs: usize = c.configuration_count(c.level_count());
    if configs > g.max_configs {
        return Err(Error::TooLarge {
            what: "configurations".into(),
            count: configs.to_string(),
            limit: g.max_configs,
        }
        .into());
    }
    let rendered = render_cascade(&c, Some(&h));
    let json = json!({
        "levels": c.level_count(),
        "states_per_level": c.states_per_level(),
        "cascade": rendered,
    });
    Ok(Report::ok(rendered, json))
}

fn config_set(s: &ConfigSet) -> String {
    let items: Vec<String> = s.iter().map(|c| c.to_string()).collect();
    format!("{{{}}}", items.join(" "))
}

fn cmd_lift(g: &Global, input: &Path, automaton: bool) -> Outcome {
    let d = load_automaton(input)?;
    if !is_counter_free(d.semi()) {
        return Err(Error::NotCounterFree.into());
    }
    let (c, h) = decompose_holonomy(d.semi())?;
    let ca = lift_acceptance(&d, &c, &h, g.max_muller_sets, g.max_configs)?;
    let acc = match ca.acceptance() {
        ConfigAcceptance::Buchi(s) => format!("Buchi {}", config_set(s)),
        ConfigAcceptance::CoBuchi(s) => format!("CoBuchi {}", config_set(s)),
        ConfigAcceptance::Rabin(p) => {
            let pairs: Vec<String> = p
                .iter()
                .map(|(a, b)| format!("({};{})", config_set(a), config_set(b)))
                .collect();
            format!("Rabin {}", pairs.join(" "))
        }
        ConfigAcceptance::Muller(m) => format!(
            "Muller {}",
            m.iter().map(config_set).collect::<Vec<_>>().join(" ")
        ),
    };
    let configs: Vec<String> = ca.configurations().iter().map(|c| c.to_string()).collect();
    let mut text = format!(
        "initial: {}\nconfigurations: {}\nacceptance: {acc}\nsets: {}\n",
        ca.initial(),
        configs.join(" "),
        ca.acceptance_size()
    );
    let rendered = render_automaton(ca.automaton());
    if automaton {
        text.push_str(&rendered);
    }
    let json = json!({
        "initial": ca.initial().to_string(),
        "configurations": configs,
        "acceptance": acc,
        "sets": ca.acceptance_size(),
        "automaton": rendered,
    });
    Ok(Report::ok(text, json))
}

fn cmd_check(input: &Path, counter_free: bool, structure: bool, cascade: Option<&Path>) -> Outcome {
    let d = load_automaton(input)?;
    let all = !counter_free && !structure && cascade.is_none();
    let mut text = String::new();
    let mut json = json!({});
    let mut status = 0;
    if counter_free || all {
        let cf = is_counter_free(d.semi());
        text.push_str(if cf {
            "counter-free\n"
        } else {
            "not counter-free\n"
        });
        json["counter_free"] = json!(cf);
        if !cf {
            status = 1;
        }
    }
    if structure || all {
        match d.classify_structure() {
            Ok(f) => {
                text.push_str(&format!("weak: {}\nlooping: {}\n", f.weak, f.looping));
                if let Some(s) = f.sink {
                    text.push_str(&format!("sink: {s}\n"));
                }
                json["structure"] = json!(f);
            }
            Err(e) if all => {
                text.push_str(&format!("structure: {e}\n"));
            }
            Err(e) => return Err(e.into()),
        }
    }
    if let Some(p) = cascade {
        let (c, h) = parse_cascade(&read(p)?)
            .map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?;
        if c.aps() != d.semi().aps() {
            return Err(Error::AlphabetMismatch(
                "cascade and automaton propositions differ".into(),
            )
            .into());
        }
        match verify_homomorphism(d.semi(), &c, &h) {
            None => {
                text.push_str("homomorphism: ok\n");
                json["homomorphism"] = json!(null);
            }
            Some(v) => {
                text.push_str(&format!("homomorphism: {v}\n"));
                json["homomorphism"] = json!(v.to_string());
                status = 1;
            }
        }
    }
    Ok(Report { text, json, status })
}

impl From<FragmentArg> for Fragment {
    fn from(f: FragmentArg) -> Self {
        match f {
            FragmentArg::Pi1 => Fragment::Pi1,
            FragmentArg::Sigma1 => Fragment::Sigma1,
            FragmentArg::Delta1 => Fragment::Delta1,
            FragmentArg::Pi2 => Fragment::Pi2,
            FragmentArg::Sigma2 => Fragment::Sigma2,
            FragmentArg::Delta2 => Fragment::Delta2,
        }
    }
}

fn cmd_classify(formula: &str, aps: &str, expect: Option<FragmentArg>) -> Outcome {
    let mut st = FormulaStore::new(parse_aps(aps)?);
    let f = parse_formula(&mut st, formula)?;
    let c = st.class(f);
    let mut text = format!(
        "sigma: {}\npi: {}\ndelta: {}\n",
        c.min_sigma, c.min_pi, c.min_delta
    );
    let mut json = json!({ "class": class_json(&c) });
    let mut status = 0;
    if let Some(e) = expect {
        let frag = Fragment::from(e);
        let name = frag.to_string();
        let inside = frag.admits(&c);
        text.push_str(&format!("{}in {name}\n", if inside { "" } else { "not " }));
        json["expected"] = json!(name);
        json["inside"] = json!(inside);
        if !inside {
            status = 1;
        }
    }
    Ok(Report { text, json, status })
}

fn parse_letters(aps: &ApSet, text: &str) -> std::result::Result<Vec<Letter>, Failure> {
    // a lasso with an empty spoke reuses the letter parser
    let l =
        Lasso::parse(aps, &format!(";{text}")).map_err(|e| Failure::Usage(format!("word: {e}")))?;
    Ok(l.cycle().to_vec())
}

fn cmd_eval(
    formula: Option<String>,
    input: Option<PathBuf>,
    aps: &str,
    lasso: Option<String>,
    finite: Option<String>,
) -> Outcome {
    let automaton = input.as_deref().map(load_automaton).transpose()?;
    let aps = match &automaton {
        Some(a) => a.semi().aps().clone(),
        None => parse_aps(aps)?,
    };
    let mut st = FormulaStore::new(aps.clone());
    let f = formula
        .as_deref()
        .map(|t| parse_formula(&mut st, t))
        .transpose()?;
    if f.is_none() && automaton.is_none() {
        return Err(Failure::Usage("give --formula or --in".into()));
    }
    let mut text = String::new();
    let mut json = json!({});
    match (lasso, finite) {
        (Some(l), None) => {
            let l = Lasso::parse(&aps, &l).map_err(|e| Failure::Usage(format!("lasso: {e}")))?;
            if let Some(f) = f {
                let v = st.evaluate_lasso(f, &l);
                text.push_str(&format!("formula: {v}\n"));
                json["formula"] = json!(v);
            }
            if let Some(a) = &automaton {
                let v = a.accepts(&l);
                text.push_str(&format!("automaton: {v}\n"));
                json["automaton"] = json!(v);
            }
        }
        (None, Some(w)) => {
            let Some(f) = f else {
                return Err(Failure::Usage(
                    "finite words are evaluated by formulas only".into(),
                ));
            };
            let word = parse_letters(&aps, &w)?;
            let v = st.evaluate_finite(f, &word)?;
            text.push_str(&format!("formula: {v}\n"));
            json["formula"] = json!(v);
        }
        _ => return Err(Failure::Usage("give --lasso or --finite".into())),
    }
    Ok(Report::ok(text, json))
}

fn cmd_verify_file(g: &Global, input: &Path, formula: Option<String>) -> Outcome {
    let d = load_automaton(input)?;
    let aps = d.semi().aps().clone();
    let mut st = FormulaStore::new(aps.clone());
    let f = match formula {
        Some(t) => parse_formula(&mut st, &t)?,
        None => translate(&mut st, &d, &translate_opts(g, false, false))?.formula,
    };
    let fam = LassoFamily::new(aps.clone(), g.max_u, g.max_v);
    let lassos = fam.len().to_string();
    match equivalent_on_lassos(&st, f, &d, &fam) {
        None => Ok(Report::ok(
            format!(
                "no counterexample on {lassos} lassos (|u| <= {}, |v| <= {})\n",
                g.max_u, g.max_v
            ),
            json!({ "lassos": lassos, "counterexample": null }),
        )),
        Some(cx) => Ok(Report::failed(
            format!(
                "counterexample: {}\nautomaton: {}\nformula: {}\n",
                cx.lasso.display(&aps),
                cx.expected,
                cx.got
            ),
            json!({
                "lassos": lassos,
                "counterexample": cx.lasso.display(&aps).to_string(),
                "automaton": cx.expected,
                "formula": cx.got,
            }),
        )),
    }
}

fn cmd_verify_corpus(g: &Global, n: usize) -> Outcome {
    let mut corpus = generate_corpus(g.seed, n.div_ceil(2), 3, 1, &CorpusKind::ALL);
    corpus.extend(generate_corpus(
        g.seed.wrapping_add(1),
        n / 2,
        3,
        2,
        &CorpusKind::ALL,
    ));
    let outcomes: Vec<std::result::Result<Option<String>, Error>> = corpus
        .par_iter()
        .map(|(_, d)| {
            let aps = d.semi().aps().clone();
            let mut st = FormulaStore::new(aps.clone());
            let r = translate(&mut st, d, &translate_opts(g, false, false))?;
            let fam = LassoFamily::new(aps.clone(), g.max_u, g.max_v);
            let cx = equivalent_on_lassos(&st, r.formula, d, &fam)
                .map(|c| c.lasso.display(&aps).to_string());
            let frag = (!r.fragment_confirmed()).then(|| format!("outside {}", r.claimed_fragment));
            Ok(cx.or(frag))
        })
        .collect();
    let mut text = String::new();
    let mut items = Vec::new();
    let mut failures = 0;
    for (i, ((kind, d), o)) in corpus.iter().zip(outcomes).enumerate() {
        let verdict = match o {
            Ok(None) => "ok".to_string(),
            Ok(Some(m)) => {
                failures += 1;
                format!("counterexample {m}")
            }
            Err(e) if e.is_resource_limit() => format!("skipped: {e}"),
            Err(e) => {
                failures += 1;
                format!("error: {e}")
            }
        };
        text.push_str(&format!(
            "#{i} {kind:?} ({} states): {verdict}\n",
            d.states()
        ));
        items.push(json!({ "index": i, "kind": format!("{kind:?}"), "verdict": verdict }));
    }
    text.push_str(&format!("{} automata, {failures} failures\n", corpus.len()));
    let json = json!({ "seed": g.seed, "results": items, "failures": failures });
    Ok(Report {
        text,
        json,
        status: (failures > 0) as u8,
    })
}

fn cmd_verify_reach(g: &Global, n: usize) -> Outcome {
    let aps = ApSet::new(&["p"]).expect("valid name");
    let mut rng = ChaCha8Rng::seed_from_u64(g.seed);
    let mut instances = Vec::with_capacity(n);
    while instances.len() < n {
        let c = random_cascade(&mut rng, &aps, 2, 3);
        let kind = ReachKind::ALL[instances.len() % 5];
        let mut st = FormulaStore::new(aps.clone());
        let req = random_request(&mut rng, &c, &mut st, kind, 2);
        instances.push((c, st, req));
    }
    let family: Vec<Lasso> = lassos_upto(&aps, g.max_u.min(4), g.max_v.min(3));
    let outcomes: Vec<std::result::Result<Option<String>, Error>> = instances
        .into_par_iter()
        .map(|(c, mut st, req)| {
            let f = ReachBuilder::new(&c).build(&mut st, &req)?;
            let oracle = Oracle::new(&c, &st, &req);
            Ok(family
                .iter()
                .find(|l| st.evaluate_lasso(f, l) != oracle.eval(l))
                .map(|l| format!("{:?} on {}", req.kind, l.display(&aps))))
        })
        .collect();
    let mut mismatches = Vec::new();
    for (i, o) in outcomes.into_iter().enumerate() {
        if let Some(m) = o? {
            mismatches.push(format!("#{i} {m}"));
        }
    }
    let mut text: String = mismatches
        .iter()
        .map(|m| format!("mismatch {m}\n"))
        .collect();
    text.push_str(&format!(
        "{n} reach instances x {} lassos, {} mismatches\n",
        family.len(),
        mismatches.len()
    ));
    let json =
        json!({ "seed": g.seed, "instances": n, "lassos": family.len(), "mismatches": mismatches });
    Ok(Report {
        text,
        json,
        status: (!mismatches.is_empty()) as u8,
    })
}

fn lassos_upto(aps: &ApSet, max_u: usize, max_v: usize) -> Vec<Lasso> {
    let s = aps.alphabet_size();
    let words = |lo: usize, hi: usize| -> Vec<Vec<Letter>> {
        (lo..=hi)
            .flat_map(|k| {
                (0..s.pow(k as u32)).map(move |i| aut2ltl_core::ltl::word_of_index(i, s, k))
            })
            .collect()
    };
    let spokes = words(0, max_u);
    words(1, max_v)
        .into_iter()
        .flat_map(|v| {
            spokes
                .iter()
                .map(move |u| Lasso::new(u.clone(), v.clone()).expect("nonempty cycle"))
        })
        .collect()
}

fn cmd_unary(c: UnaryCommand) -> Outcome {
    match c {
        UnaryCommand::Afa { n, max_len } => {
            let a = counter_afa(n)?;
            let lang = a.language(max_len);
            let accepted: Vec<usize> = (1..=max_len).filter(|&k| lang[k]).collect();
            let list: Vec<String> = accepted.iter().map(|k| k.to_string()).collect();
            let text = format!(
                "states: {}\nsize: {}\naccepted lengths up to {max_len}: {}\n",
                a.states,
                a.size(),
                list.join(" ")
            );
            Ok(Report::ok(
                text,
                json!({ "states": a.states, "size": a.size(), "accepted": accepted }),
            ))
        }
        UnaryCommand::Vk {
            k,
            max_gap: only_gap,
            ltl,
        } => {
            let v = vk_nfa(k)?;
            let limit = k * k + k;
            let gap = max_gap(|m| v.accepts(m), limit);
            let gap_text = gap.map_or("none".to_string(), |g| g.to_string());
            if only_gap {
                return Ok(Report::ok(
                    format!("{gap_text}\n"),
                    json!({ "k": k, "max_gap": gap }),
                ));
            }
            let mut text = format!(
                "{}max gap: {gap_text} (k^2-k-1 = {})\n",
                v.render(),
                frobenius(k)
            );
            let mut json = json!({ "k": k, "nfa": v.render(), "max_gap": gap });
            if ltl {
                let mut st = unary_store();
                let f = unary_nfa_to_ltl(&mut st, &v)?;
                text.push_str(&format!(
                    "formula: {}\ndag_size: {}\n",
                    st.render(f),
                    st.dag_size(f)
                ));
                json["formula"] = json!(st.render(f));
                json["dag_size"] = json!(st.dag_size(f));
            }
            Ok(Report::ok(text, json))
        }
        UnaryCommand::Nfa2ltl { file } => {
            let n = UnaryNfa::parse(&read(&file)?)
                .map_err(|e| Failure::Usage(format!("{}: {e}", file.display())))?;
            let mut st = unary_store();
            let f = unary_nfa_to_ltl(&mut st, &n)?;
            let m = st.metrics(f);
            let text = format!(
                "formula: {}\ndepth: {}\nlength: {}\ndag_size: {}\n",
                formula_text(&st, f, false).trim_end(),
                m.depth,
                m.length,
                m.dag_size
            );
            Ok(Report::ok(
                text,
                json!({ "formula": st.render_bounded(f, INLINE_LIMIT), "metrics": m }),
            ))
        }
        UnaryCommand::Bounds { max_k } => {
            let rows = bounds_table(max_k)?;
            let mut text = String::from(
                "k dfa_states dfa_ltl nfa_states nfa_ltl afa_states afa_size afa_ltl\n",
            );
            for r in &rows {
                text.push_str(&format!(
                    "{} {} {} {} {} {} {} {}\n",
                    r.k,
                    r.dfa_states,
                    r.dfa_ltl_size,
                    r.nfa_states,
                    r.nfa_ltl_size,
                    r.afa_states,
                    r.afa_size,
                    r.afa_ltl_size
                ));
            }
            Ok(Report::ok(text, json!({ "rows": rows })))
        }
    }
}

fn cmd_stats_translation(g: &Global, input: &Path, expanded: bool, emit_reach: bool) -> Outcome {
    let d = load_automaton(input)?;
    let mut st = FormulaStore::new(d.semi().aps().clone());
    let start = Instant::now();
    let r = translate(&mut st, &d, &translate_opts(g, false, true))?;
    let elapsed = start.elapsed();
    let mut report = stats_report(&r);
    if expanded {
        report.length = st
            .metrics_with(r.formula, LetterCost::Expanded)
            .length
            .to_string();
    }
    let mut text = format!("{report}\n");
    let mut json = serde_json::to_value(&report).expect("serialisable report");
    if emit_reach {
        let (t, items) = reach_lines(&st, &r.reach_log);
        text.push_str(&t);
        json["reach"] = Value::Array(items);
    }
    text.push_str(&format!("time: {:.3}s\n", elapsed.as_secs_f64()));
    Ok(Report::ok(text, json))
}

#[allow(clippy::too_many_arguments)]
fn cmd_stats_reach(
    cascade: &Path,
    kind: ReachKind,
    source: &str,
    bad: &str,
    target: &str,
    beta: &str,
    tau: &str,
    expanded: bool,
) -> Outcome {
    let (c, _) = parse_cascade(&read(cascade)?)
        .map_err(|e| Failure::Usage(format!("{}: {e}", cascade.display())))?;
    let mut st = FormulaStore::new(c.aps().clone());
    let req = ReachRequest {
        kind,
        source: parse_configuration(source)?,
        bad: parse_configuration(bad)?,
        beta: parse_formula(&mut st, beta)?,
        target: parse_configuration(target)?,
        tau: parse_formula(&mut st, tau)?,
    };
    req.validate(&c)
        .map_err(|e| Failure::Usage(e.to_string()))?;
    let start = Instant::now();
    let f = ReachBuilder::new(&c).build(&mut st, &req)?;
    let elapsed = start.elapsed();
    let b = bound_report(&st, &c, &req, f)?;
    let m = st.metrics_with(
        f,
        if expanded {
            LetterCost::Expanded
        } else {
            LetterCost::Unit
        },
    );
    let input_len = st.length(req.beta).max(st.length(req.tau)).clone();
    let length_bound = b
        .length_bound
        .as_ref()
        .map_or("unmaterialised".to_string(), |l| l.to_string());
    let text = format!(
        "kind: {:?}\nlevel: {}\ninput_length: {input_len}\ndepth: {}\ndepth_bound: {}\nrecurrence_depth_bound: {}\n\
         length: {}\nlength_bound: {length_bound}\ndag_size: {}\nformula: {}\ntime: {:.3}s\n",
        kind,
        req.level(),
        m.depth,
        b.depth_bound,
        b.recurrence_depth_bound,
        m.length,
        m.dag_size,
        formula_text(&st, f, false).trim_end(),
        elapsed.as_secs_f64()
    );
    let json = json!({
        "kind": format!("{kind:?}"),
        "level": req.level(),
        "input_length": input_len.to_string(),
        "metrics": m,
        "bounds": b,
        "formula": st.render_bounded(f, INLINE_LIMIT),
    });
    Ok(Report::ok(text, json))
}
