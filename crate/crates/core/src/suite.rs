//! The acceptance suite: ten exhaustive or sampled cross-checks.

use crate::context::{decompositions, Context};
use crate::derivation::{check_derivation, check_proof, Derivation};
use crate::enumerate::{alphabet, for_each_multiset_where, for_each_orbit_where, multisets, random_structure, Enumerator};
use crate::expand::{expand_corule, expand_g_down, expand_g_up, expand_i_down, expand_i_up, interaction, par_extrusion};
use crate::merge::{merge_recursive, merge_semantic, Merger};
use crate::mll::{from_structure, parse_sequent, prove_mll, sequent_to_structure, simulate_mll, to_structure, MllProver, Sequent};
use crate::rules::{premisses, RuleId, RuleInstance, System, Witness};
use crate::search::{
    balanced, consistency_check_with, derivable, eliminate_up_with, split_find_with, Consistency, Derivability, Prover,
    SearchConfig, SplitKind,
};
use crate::structure::{Atom, Kind, Structure};
use crate::syntax::parse_structure;
use crate::web::{check_axioms, energy_leq_with, reconstruct, web_of, Rel, WebCandidate};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHashSet;
use serde::Serialize;
use std::collections::BTreeSet;
use std::fmt;
use std::time::{Duration, Instant};

#[derive(Clone, Debug, Serialize)]
pub struct SuiteConfig {
    /// Enumeration bound on atom occurrences.
    pub max_size: usize,
    pub atoms: Vec<String>,
    pub seed: u64,
    /// Random structures checked against the web axioms.
    pub web_samples: usize,
    /// Structures over distinct atoms checked exhaustively for reconstruction.
    pub web_labelled: usize,
    /// Shapes (one labelling each) checked for reconstruction.
    pub web_shapes: usize,
    /// Occurrences for the brute-force comparison of candidates.
    pub candidate_size: usize,
    pub merge_size: usize,
    pub expand_size: usize,
    /// `ai↑` steps allowed when comparing with the up fragment.
    pub up_budget: u8,
}

impl Default for SuiteConfig {
    fn default() -> SuiteConfig {
        SuiteConfig {
            max_size: 6,
            atoms: vec!["a".into(), "b".into(), "c".into()],
            seed: 0x5eed,
            web_samples: 10_000,
            web_labelled: 6,
            web_shapes: 7,
            candidate_size: 4,
            merge_size: 6,
            expand_size: 5,
            up_budget: 1,
        }
    }
}

impl SuiteConfig {
    /// The defaults, with `BV_MAX_SIZE` overriding the enumeration bound.
    pub fn from_env() -> SuiteConfig {
        let mut c = SuiteConfig::default();
        if let Some(n) = std::env::var("BV_MAX_SIZE").ok().and_then(|v| v.trim().parse().ok()) {
            c.max_size = n;
        }
        c
    }

    fn names(&self) -> Vec<&str> {
        self.atoms.iter().map(String::as_str).collect()
    }
}

pub const TITLES: [&str; 10] = [
    "running examples",
    "consistency",
    "up-fragment admissibility",
    "conservativity over MLL+mix",
    "relation webs",
    "merge sets",
    "derivability separations",
    "expansions",
    "splitting",
    "monotonicity",
];

#[derive(Clone, Debug, Serialize)]
pub struct CriterionReport {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub checked: u64,
    pub failed: u64,
    pub scope: String,
    /// The first few failures.
    pub failures: Vec<String>,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "criterion {:>2} {} {}: {} checks, {} failed ({})",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.title,
            self.checked,
            self.failed,
            self.scope
        )
    }
}

#[derive(Default)]
struct Tally {
    checked: u64,
    failed: u64,
    failures: Vec<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failed += 1;
            if self.failures.len() < 10 {
                self.failures.push(what());
            }
        }
    }
}

pub fn run_criterion(id: u8, cfg: &SuiteConfig) -> CriterionReport {
    let start = Instant::now();
    let mut t = Tally::default();
    let scope = match id {
        1 => running_examples(&mut t),
        2 => consistency(cfg, &mut t),
        3 => up_admissibility(cfg, &mut t),
        4 => conservativity(cfg, &mut t),
        5 => webs(cfg, &mut t),
        6 => merges(cfg, &mut t),
        7 => separations(&mut t),
        8 => expansions(cfg, &mut t),
        9 => splitting(cfg, &mut t),
        10 => monotonicity(cfg, &mut t),
        _ => panic!("no criterion {id}"),
    };
    CriterionReport {
        id,
        title: TITLES[id as usize - 1],
        passed: t.failed == 0 && t.checked > 0,
        checked: t.checked,
        failed: t.failed,
        scope,
        failures: t.failures,
        elapsed: start.elapsed(),
    }
}

pub fn run_suite(cfg: &SuiteConfig, ids: &[u8]) -> Vec<CriterionReport> {
    ids.iter().map(|&i| run_criterion(i, cfg)).collect()
}

fn p(s: &str) -> Structure {
    parse_structure(s).expect("fixed example parses")
}

/// Distinct positive atoms `first`, `first+1`, ...
fn labels(first: char, n: usize) -> Vec<Atom> {
    (0..n).map(|i| Atom::positive(char::from(first as u8 + i as u8).to_string())).collect()
}

fn valid_proof(d: &Derivation, s: &Structure, sys: &System) -> bool {
    &d.conclusion == s && d.is_proof() && check_proof(d, sys).is_ok()
}

fn running_examples(t: &mut Tally) -> String {
    let bv = System::bv();
    let seq = parse_sequent("|- a | (b | (~b * ((~a * c) | ~c)))").expect("fixed sequent parses");
    let translated = sequent_to_structure(&seq);
    for (label, s) in [("structure", p("[a,b,(~b,[(~a,c),~c])]")), ("translated formula", translated.clone())] {
        let start = Instant::now();
        let ok = match Prover::bv().prove(&s) {
            Some(d) => {
                let back = Derivation::from_json(&d.to_json("BV")).ok();
                valid_proof(&d, &s, &bv) && back.is_some_and(|b| valid_proof(&b, &s, &bv))
            }
            None => false,
        };
        let took = start.elapsed();
        t.check(ok, || format!("{label} {s}: no validating certificate"));
        t.check(took < Duration::from_secs(1), || format!("{label} {s}: took {took:?}"));
    }
    let fbv = System::fbv();
    match prove_mll(&seq) {
        Some(pr) => {
            t.check(pr.check(false).is_ok(), || "sequent proof does not replay".into());
            let d = simulate_mll(&pr);
            t.check(valid_proof(&d, &translated, &fbv), || "simulated sequent proof is not an FBV proof".into());
        }
        None => t.check(false, || format!("{seq} not provable in MLL+mix")),
    }
    "BV certificates with JSON roundtrip, 1 s limit each; the sequent proof simulated in FBV".into()
}

fn consistency(cfg: &SuiteConfig, t: &mut Tally) -> String {
    let names = cfg.names();
    let (mut n, mut provable) = (0u64, 0u64);
    t.check(consistency_check_with(&mut Prover::bv(), &Structure::Unit) == Consistency::Exempt, || "unit".into());
    for_each_multiset_where(&alphabet(&names), cfg.max_size, balanced, |_, all| {
        let mut bv = Prover::bv();
        for s in all {
            n += 1;
            let c = consistency_check_with(&mut bv, s);
            if let Consistency::Pass { provable: true, .. } = c {
                provable += 1;
            }
            t.check(c.ok(), || format!("{s} and its negation are both provable"));
        }
    });
    format!(
        "{n} balanced structures up to size {} over {}, {provable} provable; unbalanced structures are not provable",
        cfg.max_size,
        names.join(",")
    )
}

fn up_admissibility(cfg: &SuiteConfig, t: &mut Tally) -> String {
    let names = cfg.names();
    let with_qup = System::bv().with(&[RuleId::QUp]);
    let (mut n, mut eliminated) = (0u64, 0u64);
    for_each_multiset_where(&alphabet(&names), cfg.max_size, balanced, |_, all| {
        let mut bv = Prover::bv();
        let mut up = Prover::new(with_qup.clone());
        for s in all {
            n += 1;
            let (a, b) = (bv.provable(s), up.provable(s));
            t.check(a == b, || format!("{s}: BV {a}, with q↑ {b}"));
            if let Some(d) = up.prove_with_up(s) {
                eliminated += 1;
                check_elimination(&mut bv, &d, s, t);
            }
        }
    });
    let (mut reps, mut eliminated_ai) = (0u64, 0u64);
    let cfg_up = SearchConfig { up_budget: cfg.up_budget, ..SearchConfig::default() };
    for_each_orbit_where(&names, cfg.max_size, balanced, |_, all| {
        let mut bv = Prover::bv();
        let mut up = Prover::with_config(System::bv_up(), cfg_up.clone());
        for s in all {
            reps += 1;
            if up.memo_len() > 2_000_000 {
                up.clear();
            }
            let (a, b) = (bv.provable(s), up.provable(s));
            t.check(a == b, || format!("{s}: BV {a}, with q↑ and ai↑ {b}"));
            if a {
                if let Some(d) = up.prove_using(s, RuleId::AiUp) {
                    eliminated_ai += 1;
                    check_elimination(&mut bv, &d, s, t);
                }
            }
        }
    });
    format!(
        "BV against BV+q↑ on {n} balanced structures ({eliminated} q↑ proofs eliminated); \
         against BV+q↑+ai↑ with {} ai↑ step(s) on {reps} representatives up to renaming ({eliminated_ai} ai↑ proofs eliminated)",
        cfg.up_budget
    )
}

fn check_elimination(bv: &mut Prover, d: &Derivation, s: &Structure, t: &mut Tally) {
    let ok = match eliminate_up_with(bv, d) {
        Ok(e) => valid_proof(&e, s, &System::bv()),
        Err(_) => false,
    };
    t.check(ok, || format!("{s}: eliminating the up rules of a proof failed"));
}

fn conservativity(cfg: &SuiteConfig, t: &mut Tally) -> String {
    let alpha = alphabet(&cfg.names());
    let fbv = System::fbv();
    let mut en = Enumerator::flat();
    let (mut n, mut provable) = (0u64, 0u64);
    for size in 1..=cfg.max_size {
        for m in multisets(&alpha, size) {
            let all = en.over(&m);
            let mut bv = Prover::bv();
            let mut fb = Prover::new(fbv.clone());
            let mut mll = MllProver::new(false);
            for s in &all {
                n += 1;
                let Ok(f) = from_structure(s) else {
                    t.check(false, || format!("{s} has no formula"));
                    continue;
                };
                t.check(&to_structure(&f) == s, || format!("{s}: translation roundtrip"));
                let seq = Sequent::new(vec![f]);
                let (a, b) = (bv.provable(s), fb.provable(s));
                let c = mll.prove(&seq);
                t.check(a == b && b == c.is_some(), || format!("{s}: BV {a}, FBV {b}, MLL+mix {}", c.is_some()));
                if let Some(pr) = c {
                    provable += 1;
                    let ok = pr.check(false).is_ok() && valid_proof(&simulate_mll(&pr), s, &fbv);
                    t.check(ok, || format!("{s}: sequent proof does not simulate"));
                }
            }
        }
        if size >= 5 {
            en.clear();
        }
    }
    format!("{n} flat structures up to size {}, {provable} provable", cfg.max_size)
}

type WebKey = Vec<(Atom, Atom, Option<Rel>)>;

/// The relations of a web keyed by atom, independent of occurrence order.
fn web_key(w: &WebCandidate) -> WebKey {
    let a = w.atoms();
    let mut key: WebKey =
        (0..a.len()).flat_map(|i| (0..a.len()).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| (a[i].clone(), a[j].clone(), w.rel(i, j))).collect();
    key.sort();
    key
}

fn web_roundtrip(s: &Structure, t: &mut Tally) {
    let w = web_of(s);
    t.check(check_axioms(&w).passes(), || format!("web of {s} fails an axiom"));
    t.check(reconstruct(&w).as_ref() == Ok(s), || format!("{s} is not reconstructed from its web"));
}

fn webs(cfg: &SuiteConfig, t: &mut Tally) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let alpha = alphabet(&["a", "b", "c", "d"]);
    for _ in 0..cfg.web_samples {
        let size = rng.gen_range(1..=10);
        web_roundtrip(&random_structure(&mut rng, size, &alpha), t);
    }
    let mut en = Enumerator::new();
    let mut labelled = 0;
    for n in 1..=cfg.web_labelled {
        for s in en.over(&labels('a', n)) {
            labelled += 1;
            web_roundtrip(&s, t);
        }
        en.clear();
    }
    let mut shapes = 0;
    let x = vec![Atom::positive("x"); cfg.web_shapes];
    for shape in Enumerator::new().over(&x) {
        shapes += 1;
        let mut k = 0u8;
        let s = shape.map_atoms(&mut |_: &Atom| {
            k += 1;
            Structure::Atom(Atom::positive(char::from(b'a' + k - 1).to_string()))
        });
        web_roundtrip(&s, t);
    }
    let mut candidates = 0u64;
    for n in 1..=cfg.candidate_size {
        let atoms = labels('a', n);
        let realizable: FxHashSet<WebKey> = en.over(&atoms).iter().map(|s| web_key(&web_of(s))).collect();
        en.clear();
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        let rels = [Rel::Before, Rel::After, Rel::Par, Rel::Copar];
        for code in 0..4u64.pow(pairs.len() as u32) {
            let mut z = WebCandidate::new(atoms.clone());
            let mut c = code;
            for &(i, j) in &pairs {
                z.set(i, j, rels[(c % 4) as usize]);
                c /= 4;
            }
            candidates += 1;
            let passes = check_axioms(&z).passes();
            let real = realizable.contains(&web_key(&z));
            t.check(passes == real, || format!("candidate {code} on {n} occurrences: axioms {passes}, realizable {real}"));
            if passes {
                let ok = reconstruct(&z).is_ok_and(|s| web_key(&web_of(&s)) == web_key(&z));
                t.check(ok, || format!("candidate {code} on {n} occurrences is not reconstructed"));
            }
        }
    }
    format!(
        "{} random structures (seed {}); {labelled} structures over up to {} distinct atoms; {shapes} shapes of size {}; \
         {candidates} candidates on up to {} occurrences",
        cfg.web_samples, cfg.seed, cfg.web_labelled, cfg.web_shapes, cfg.candidate_size
    )
}

fn merges(cfg: &SuiteConfig, t: &mut Tally) -> String {
    let mut en = Enumerator::new();
    let mut pairs = 0u64;
    let negset = |m: &BTreeSet<Structure>| m.iter().map(Structure::negate).collect::<BTreeSet<_>>();
    for k in 1..cfg.merge_size {
        for j in 1..=cfg.merge_size - k {
            let rs = en.over(&labels('a', k));
            let ts = en.over(&labels('n', j));
            for r in &rs {
                for s in &ts {
                    pairs += 1;
                    let rec = merge_recursive(r, s);
                    let same = merge_semantic(r, s).is_ok_and(|sem| sem.members == rec.members);
                    t.check(same, || format!("{r} ⋄ {s}: recursive and semantic merge sets differ"));
                    let neg = merge_recursive(&r.negate(), &s.negate());
                    t.check(neg.members == negset(&rec.members), || format!("{r} ⋄ {s}: negation is not a bijection"));
                }
            }
        }
    }
    let rec = merge_recursive(&p("[a,b]"), &p("[c,d]"));
    t.check(!rec.contains(&p("[<a;c>,<b;d>]")), || "[<a;c>,<b;d>] is a merge of [a,b] and [c,d]".into());
    let rec = merge_recursive(&p("(a,b)"), &p("(c,d)"));
    t.check(!rec.contains(&p("([a,c],[b,d])")), || "([a,c],[b,d]) is a merge of (a,b) and (c,d)".into());
    let q = p("([a,c],[b,d])");
    let mut m = Merger::new();
    let right = m.merge(&p("b"), &p("(c,d)"));
    let in_right = right.iter().any(|x| m.member(&q, &p("a"), x));
    let left = m.merge(&p("a"), &p("b"));
    let in_left = left.iter().any(|x| m.member(&q, x, &p("(c,d)")));
    t.check(in_right && !in_left, || "merge non-associativity witness does not reproduce".into());
    format!("{pairs} pairs over distinct atoms with total size up to {}; exclusion and non-associativity witnesses", cfg.merge_size)
}

fn separations(t: &mut Tally) -> String {
    let cfg = SearchConfig::default();
    let sys = |rules: &[RuleId]| System::new("t", rules);
    let cases = [
        ("(<a;c>,b)", "<(a,b);c>", sys(&[RuleId::QUp]), sys(&[RuleId::QDown, RuleId::S])),
        ("([a,c],b)", "[(a,b),c]", sys(&[RuleId::S]), sys(&[RuleId::QDown, RuleId::QUp])),
    ];
    for (top, bottom, yes, no) in cases {
        let (top, bottom) = (p(top), p(bottom));
        let found = match derivable(&top, &bottom, &yes, &cfg) {
            Ok(Derivability::Derivable(d)) => {
                check_derivation(&d, &yes).is_ok() && d.conclusion == bottom && d.top() == &top
            }
            _ => false,
        };
        t.check(found, || format!("{top} to {bottom} not found in {yes}"));
        let absent = matches!(derivable(&top, &bottom, &no, &cfg), Ok(Derivability::NotDerivable));
        t.check(absent, || format!("{top} to {bottom} not refuted in {no}"));
    }
    "q↑ against {q↓,s}; s against {q↓,q↑}".into()
}

/// Every structure over distinct atoms starting at `first`, of each size
/// up to `max`, unit included.
fn shapes_upto(en: &mut Enumerator, first: char, max: usize) -> Vec<Vec<Structure>> {
    let mut out = vec![vec![Structure::Unit]];
    for n in 1..=max {
        out.push(en.over(&labels(first, n)));
    }
    out
}

fn expansions(cfg: &SuiteConfig, t: &mut Tally) -> String {
    let max = cfg.expand_size;
    let sys = |rules: &[RuleId]| System::new("t", rules);
    let down = sys(&[RuleId::AiDown, RuleId::QDown, RuleId::S]);
    let up = sys(&[RuleId::AiUp, RuleId::QUp, RuleId::S]);
    let qs = sys(&[RuleId::QDown, RuleId::S]);
    let qus = sys(&[RuleId::QUp, RuleId::S]);
    let ctxs = [Context::hole(), Context::from_frames(vec![crate::context::Frame::Seq {
        before: vec![p("y")],
        after: vec![],
    }])
    .within(&Context::par_with(&p("z")))];
    let mut en = Enumerator::new();
    let a = shapes_upto(&mut en, 'a', max);
    let mut counts = [0u64; 5];
    let fits = |d: &Derivation, inst: &RuleInstance, s: &System| {
        d.conclusion == inst.conclusion && d.top() == &inst.premiss && check_derivation(d, s).is_ok()
    };
    // interaction
    for r in a.iter().flatten() {
        counts[0] += 1;
        let d = interaction(r);
        t.check(d.conclusion == Structure::par2(r.clone(), r.negate()) && check_derivation(&d, &down).is_ok(), || {
            format!("interaction of {r}")
        });
        for c in &ctxs {
            let w = Witness::Interaction { r: r.clone() };
            let i = RuleInstance::new(RuleId::IDown, c.clone(), w.clone()).expect("interaction schema");
            t.check(expand_i_down(&i).is_ok_and(|d| fits(&d, &i, &down)), || format!("i↓ with {r}"));
            let i = RuleInstance::new(RuleId::IUp, c.clone(), w).expect("interaction schema");
            t.check(expand_i_up(&i).is_ok_and(|d| fits(&d, &i, &up)), || format!("i↑ with {r}"));
        }
    }
    // merges
    let b = shapes_upto(&mut en, 'n', max);
    let mut merger = Merger::new();
    for k in 0..=max {
        for j in 0..=max - k {
            for r in &a[k] {
                for s in &b[j] {
                    for q in merger.merge(r, s).iter() {
                        counts[1] += 1;
                        let w = Witness::Merge { r: r.clone(), t: s.clone(), q: q.clone() };
                        let i = RuleInstance::new(RuleId::GDown, Context::hole(), w.clone()).expect("merge schema");
                        t.check(expand_g_down(&i).is_ok_and(|d| fits(&d, &i, &qs)), || format!("g↓ {q} from {r}, {s}"));
                        let i = RuleInstance::new(RuleId::GUp, Context::hole(), w).expect("merge schema");
                        t.check(expand_g_up(&i).is_ok_and(|d| fits(&d, &i, &qus)), || format!("g↑ {q} from {r}, {s}"));
                    }
                }
            }
        }
    }
    // corules: q↑ through q↓ and back
    let shapes: Vec<Vec<Vec<Structure>>> =
        ['a', 'f', 'k', 'p'].iter().map(|&c| shapes_upto(&mut en, c, max)).collect();
    for sizes in compositions(4, max) {
        for r in &shapes[0][sizes[0]] {
            for s in &shapes[1][sizes[1]] {
                for r2 in &shapes[2][sizes[2]] {
                    for s2 in &shapes[3][sizes[3]] {
                        let w = Witness::Quad { r: r.clone(), t: s.clone(), r2: r2.clone(), t2: s2.clone() };
                        for (rule, co) in [(RuleId::QUp, RuleId::QDown), (RuleId::QDown, RuleId::QUp)] {
                            let i = RuleInstance::new(rule, Context::hole(), w.clone()).expect("seq schema");
                            if i.is_trivial() {
                                continue;
                            }
                            counts[2] += 1;
                            let target = sys(&[RuleId::IDown, RuleId::IUp, RuleId::S, co]);
                            t.check(expand_corule(&i).is_ok_and(|d| fits(&d, &i, &target)), || {
                                format!("{rule} with {r}, {s}, {r2}, {s2}")
                            });
                        }
                    }
                }
            }
        }
    }
    // par extrusion: contexts from structures with one marked atom
    let hole = Atom::positive("h");
    for k in 0..max.saturating_sub(1) {
        let mut atoms = labels('a', k);
        atoms.push(hole.clone());
        let contexts: Vec<Context> = en
            .over(&atoms)
            .iter()
            .flat_map(|u| decompositions(u).into_iter().filter(|(_, x)| x.as_atom() == Some(&hole)).map(|(c, _)| c))
            .collect();
        for rs in 1..max - k {
            for ts in 1..=max - k - rs {
                for c in &contexts {
                    for r in &shapes[1][rs] {
                        for s in &shapes[2][ts] {
                            counts[3] += 1;
                            let d = par_extrusion(c, r, s);
                            let ok = d.conclusion == Structure::par2(c.plug(r), s.clone())
                                && d.top() == &c.plug(&Structure::par2(r.clone(), s.clone()))
                                && check_derivation(&d, &qs).is_ok();
                            t.check(ok, || format!("extrusion of {r}, {s} from {}", c.plug(&p("o"))));
                        }
                    }
                }
            }
        }
    }
    format!(
        "witness size up to {max} over distinct atoms: {} interactions, {} merges, {} seq corule instances, {} extrusions",
        counts[0], counts[1], counts[2], counts[3]
    )
}

/// Size vectors of length `parts` summing to at most `max`.
fn compositions(parts: usize, max: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return vec![vec![]];
    }
    let mut out = vec![];
    for first in 0..=max {
        for mut rest in compositions(parts - 1, max - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// The ways to read `s` as `[(R,T),P]` or `[<R;T>,P]`.
fn split_views(s: &Structure) -> Vec<(Structure, Structure, Structure, SplitKind)> {
    let items = s.parts(Kind::Par);
    let mut out = vec![];
    for (i, x) in items.iter().enumerate() {
        let rest = Structure::par(items.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, y)| y.clone()));
        match x {
            Structure::Copar(cs) => {
                for mask in (1u32..(1 << cs.len()) - 1).filter(|m| m & 1 == 1) {
                    let pick = |inside: bool| {
                        Structure::copar(cs.iter().enumerate().filter(|(k, _)| (mask & (1 << k) != 0) == inside).map(|(_, c)| c.clone()))
                    };
                    out.push((pick(true), pick(false), rest.clone(), SplitKind::Copar));
                }
            }
            Structure::Seq(cs) => {
                for k in 1..cs.len() {
                    let r = Structure::seq(cs[..k].iter().cloned());
                    let t = Structure::seq(cs[k..].iter().cloned());
                    out.push((r, t, rest.clone(), SplitKind::Seq));
                }
            }
            _ => {}
        }
    }
    out
}

fn splitting(cfg: &SuiteConfig, t: &mut Tally) -> String {
    let bv = System::bv();
    let mut views = 0u64;
    for_each_multiset_where(&alphabet(&cfg.names()), cfg.max_size, balanced, |_, all| {
        let mut prover = Prover::bv();
        for s in all {
            if !prover.provable(s) {
                continue;
            }
            for (r, tt, pp, kind) in split_views(s) {
                views += 1;
                let ok = match split_find_with(&mut prover, &r, &tt, &pp, kind) {
                    Ok(w) => {
                        let glued = match kind {
                            SplitKind::Seq => Structure::seq2(w.p1.clone(), w.p2.clone()),
                            SplitKind::Copar => Structure::par2(w.p1.clone(), w.p2.clone()),
                        };
                        valid_proof(&w.left_proof, &Structure::par2(r.clone(), w.p1.clone()), &bv)
                            && valid_proof(&w.right_proof, &Structure::par2(tt.clone(), w.p2.clone()), &bv)
                            && w.bridge.conclusion == pp
                            && w.bridge.top() == &glued
                            && check_derivation(&w.bridge, &bv).is_ok()
                    }
                    Err(_) => false,
                };
                t.check(ok, || format!("no valid split of {s} as {} with {r} and {tt}", match kind {
                    SplitKind::Seq => "seq",
                    SplitKind::Copar => "copar",
                }));
            }
        }
    });
    format!("{views} copar and seq readings of provable structures up to size {}", cfg.max_size)
}

fn monotonicity(cfg: &SuiteConfig, t: &mut Tally) -> String {
    let names = cfg.names();
    let sys = System::new("t", &[RuleId::AiDown, RuleId::QDown, RuleId::QUp, RuleId::S]);
    let mut instances = 0u64;
    let mut visit = |all: &[Structure], t: &mut Tally| {
        for s in all {
            for inst in premisses(s, &sys) {
                instances += 1;
                if inst.rule != RuleId::QUp {
                    t.check(inst.premiss.size() <= inst.conclusion.size(), || format!("{} {} above {s} grows", inst.rule, inst.premiss));
                }
                if inst.rule == RuleId::AiDown {
                    continue;
                }
                let ok = inst.tagged().is_ok_and(|(tp, tc)| {
                    let target = tc.atoms();
                    let map: Option<Vec<usize>> = tp.atoms().iter().map(|a| target.iter().position(|b| b == a)).collect();
                    tp != tc && map.is_some_and(|m| energy_leq_with(&tp, &tc, &m))
                });
                t.check(ok, || format!("{} {} above {s} does not lower energy", inst.rule, inst.premiss));
            }
        }
    };
    let small = cfg.max_size.min(4);
    for_each_multiset_where(&alphabet(&names), small, |_| true, |_, all| visit(all, t));
    for_each_orbit_where(&names, cfg.max_size, |m| m.len() > small && balanced(m), |_, all| visit(all, t));
    format!(
        "{instances} instances of ai↓, q↓, q↑, s: all structures up to size {small}, balanced ones up to size {} up to renaming",
        cfg.max_size
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suite() {
        let cfg = SuiteConfig { max_size: 4, web_samples: 200, web_labelled: 4, web_shapes: 5, candidate_size: 3, merge_size: 4, expand_size: 3, ..SuiteConfig::default() };
        for r in run_suite(&cfg, &[1, 2, 3, 4, 5, 6, 7, 8, 9, 10]) {
            assert!(r.passed, "{r}: {:?}", r.failures);
        }
    }

    #[test]
    fn compositions_count() {
        // C(max + parts, parts)
        assert_eq!(compositions(4, 5).len(), 126);
        assert!(compositions(3, 2).iter().all(|v| v.iter().sum::<usize>() <= 2));
    }
}
