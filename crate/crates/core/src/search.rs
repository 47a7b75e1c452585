//! Provability, derivability, splitting and up-fragment elimination.

use crate::context::{decompositions, positions, Context, Frame};
use crate::derivation::{check_proof, Builder, ChainError, Derivation, Proof};
use crate::expand::par_extrusion;
use crate::rules::{hole_positions, rule_order, rule_premisses, seq_splits, MatchOptions, RuleId, RuleInstance, System, Witness};
use crate::structure::{Atom, Kind, Structure};
use crate::web::web_of;
use rustc_hash::{FxHashMap, FxHashSet};
use std::collections::VecDeque;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("the system grows structures bottom-up; a depth bound is required")]
    DepthBoundRequired,
    #[error("{0} is not provable")]
    NotProvable(Structure),
    #[error("not a proof in the expected system: {0}")]
    MalformedProof(String),
    #[error("internal invariant failed: {0}")]
    Internal(String),
}

impl From<ChainError> for SearchError {
    fn from(e: ChainError) -> SearchError {
        SearchError::Internal(e.to_string())
    }
}

#[derive(Clone, Debug)]
pub struct SearchConfig {
    /// States larger than this are not explored.
    pub max_size: usize,
    pub memo_enabled: bool,
    /// Step bound for derivability in growing systems.
    pub derivability_depth: Option<usize>,
    /// How many atom-introducing up steps (`ai↑`, `i↑`) a proof may use.
    pub up_budget: u8,
    /// Largest structure introduced by one `i↑`.
    pub intro_size: usize,
    /// Discard states that cannot pair their atoms off.
    pub prune: bool,
}

impl Default for SearchConfig {
    fn default() -> SearchConfig {
        SearchConfig { max_size: usize::MAX, memo_enabled: true, derivability_depth: None, up_budget: 0, intro_size: 1, prune: true }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Status {
    InProgress,
    Unprovable,
    Provable { rule: RuleId, premiss: Structure },
}

type Key = (Structure, u8, bool);

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub states: usize,
    pub pruned: usize,
}

/// Memoizing bottom-up prover. The memo survives between queries.
pub struct Prover {
    sys: System,
    cfg: SearchConfig,
    alphabet: Option<Vec<Atom>>,
    memo: FxHashMap<Key, Status>,
    /// The rule a proof must use when one is required; any up rule if `None`.
    wanted: Option<RuleId>,
    pub stats: SearchStats,
}

impl Prover {
    pub fn new(sys: System) -> Prover {
        Prover::with_config(sys, SearchConfig::default())
    }

    pub fn with_config(sys: System, cfg: SearchConfig) -> Prover {
        Prover { sys, cfg, alphabet: None, memo: FxHashMap::default(), wanted: None, stats: SearchStats::default() }
    }

    pub fn bv() -> Prover {
        Prover::new(System::bv())
    }

    pub fn system(&self) -> &System {
        &self.sys
    }

    /// Atom names `ai↑` may introduce; by default those of each state.
    pub fn set_alphabet(&mut self, names: Vec<Atom>) {
        self.alphabet = Some(names);
        self.memo.clear();
    }

    pub fn clear(&mut self) {
        self.memo.clear();
    }

    pub fn memo_len(&self) -> usize {
        self.memo.len()
    }

    pub fn provable(&mut self, s: &Structure) -> bool {
        let b = self.cfg.up_budget;
        self.decide(s, b, false).0
    }

    pub fn prove(&mut self, s: &Structure) -> Option<Proof> {
        let b = self.cfg.up_budget;
        self.prove_key(s, b, false)
    }

    /// A proof using at least one up rule of the system, if there is one.
    pub fn prove_with_up(&mut self, s: &Structure) -> Option<Proof> {
        self.want(None);
        let b = self.cfg.up_budget;
        self.prove_key(s, b, true)
    }

    /// A proof using at least one instance of `rule`, if there is one.
    pub fn prove_using(&mut self, s: &Structure, rule: RuleId) -> Option<Proof> {
        self.want(Some(rule));
        let b = self.cfg.up_budget;
        self.prove_key(s, b, true)
    }

    fn want(&mut self, rule: Option<RuleId>) {
        if self.wanted != rule {
            self.memo.retain(|k, _| !k.2);
            self.wanted = rule;
        }
    }

    fn meets(&self, rule: RuleId) -> bool {
        match self.wanted {
            None => rule.is_up(),
            Some(w) => rule == w,
        }
    }

    fn prove_key(&mut self, s: &Structure, budget: u8, need: bool) -> Option<Proof> {
        let memo_was = self.cfg.memo_enabled;
        self.cfg.memo_enabled = true;
        let ok = self.decide(s, budget, need).0;
        let out = if ok { Some(self.reconstruct(s, budget, need)) } else { None };
        self.cfg.memo_enabled = memo_was;
        if !memo_was {
            self.memo.clear();
        }
        out
    }

    fn reconstruct(&mut self, s: &Structure, budget: u8, need: bool) -> Proof {
        let mut steps = Vec::new();
        let (mut cur, mut b, mut n) = (s.clone(), budget, need);
        loop {
            if cur.is_unit() && !n {
                steps.push(RuleInstance::unit());
                break;
            }
            let Some(Status::Provable { rule, premiss }) = self.memo.get(&(cur.clone(), b, n)).cloned() else {
                unreachable!("reconstruction follows provable entries");
            };
            let opts = self.options();
            let nodes = positions(&cur);
            let inst = rule_premisses(&cur, rule, &opts, &nodes)
                .into_iter()
                .find(|i| i.premiss == premiss)
                .expect("recorded premiss is regenerated");
            if rule.introduces_atoms() {
                b -= 1;
            }
            n = n && !self.meets(rule);
            cur = premiss;
            steps.push(inst);
        }
        Derivation { conclusion: s.clone(), steps }
    }

    fn options(&self) -> MatchOptions {
        MatchOptions { alphabet: self.alphabet.clone(), intro_size: self.cfg.intro_size }
    }

    fn viable(&self, s: &Structure, budget: u8) -> bool {
        let occ = s.atom_multiset();
        if !balanced(&occ) {
            return false;
        }
        if !self.cfg.prune {
            return true;
        }
        let slack = match budget {
            _ if !grows(&self.sys) => 0,
            0 => 0,
            _ if self.sys.contains(RuleId::IUp) => return true,
            b => b as usize,
        };
        2 * (par_matching(s) + slack) >= occ.len()
    }

    /// Returns provability and whether the answer depended on a cycle cut.
    fn decide(&mut self, s: &Structure, budget: u8, need: bool) -> (bool, bool) {
        if s.is_unit() && !need {
            return (true, false);
        }
        let key = (s.clone(), budget, need);
        match self.memo.get(&key) {
            Some(Status::InProgress) => return (false, true),
            Some(Status::Unprovable) => return (false, false),
            Some(Status::Provable { .. }) => return (true, false),
            None => {}
        }
        self.stats.states += 1;
        if !self.viable(s, budget) {
            self.stats.pruned += 1;
            return (false, false);
        }
        self.memo.insert(key.clone(), Status::InProgress);
        let opts = self.options();
        let nodes = positions(s);
        let mut tainted = false;
        for rule in rule_order(&self.sys) {
            if rule.introduces_atoms() && budget == 0 {
                continue;
            }
            let b2 = if rule.introduces_atoms() { budget - 1 } else { budget };
            let n2 = need && !self.meets(rule);
            let gen = if rule == RuleId::AiUp && b2 == 0 && self.cfg.prune {
                atomic_cuts(s, &opts)
            } else {
                rule_premisses(s, rule, &opts, &nodes)
            };
            for inst in gen {
                if inst.premiss.size() > self.cfg.max_size {
                    continue;
                }
                let (ok, t) = self.decide(&inst.premiss, b2, n2);
                tainted |= t;
                if ok {
                    self.memo.insert(key, Status::Provable { rule, premiss: inst.premiss });
                    return (true, false);
                }
            }
        }
        if tainted || !self.cfg.memo_enabled {
            self.memo.remove(&key);
        } else {
            self.memo.insert(key, Status::Unprovable);
        }
        (false, tainted)
    }
}

/// The `ai↑` instances whose new pair can each meet a dual partner in par
/// relation; the others have no proof without further atom introduction.
fn atomic_cuts(s: &Structure, opts: &MatchOptions) -> Vec<RuleInstance> {
    let mut out = Vec::new();
    let mut seen = FxHashSet::default();
    let names = opts.names(s);
    for ctx in hole_positions(s) {
        let mut near: Vec<Atom> = Vec::new();
        for f in ctx.frames() {
            if let Frame::Par(sibs) = f {
                for x in sibs {
                    near.extend(x.atoms());
                }
            }
        }
        for a in &names {
            if near.contains(a) && near.contains(&a.dual()) {
                let inst = RuleInstance::new(RuleId::AiUp, ctx.clone(), Witness::Atom(a.clone())).expect("atom schema");
                if seen.insert(inst.premiss.clone()) {
                    out.push(inst);
                }
            }
        }
    }
    out
}

/// Each atom name occurs as often positively as negatively.
pub fn balanced(occ: &[Atom]) -> bool {
    let mut count: FxHashMap<&str, i32> = FxHashMap::default();
    for a in occ {
        *count.entry(a.name()).or_default() += if a.is_positive() { 1 } else { -1 };
    }
    count.values().all(|&c| c == 0)
}

/// Size of a largest set of disjoint dual pairs of occurrences in par
/// relation. Down rules never take a pair out of par relation, and every
/// atomic interaction joins a pair in par relation, so a proof without
/// atom-introducing steps needs a perfect such matching.
pub fn par_matching(s: &Structure) -> usize {
    let w = web_of(s);
    let atoms = w.atoms().to_vec();
    let pos: Vec<usize> = (0..atoms.len()).filter(|&i| atoms[i].is_positive()).collect();
    let neg: Vec<usize> = (0..atoms.len()).filter(|&i| !atoms[i].is_positive()).collect();
    let adj: Vec<Vec<usize>> = pos
        .iter()
        .map(|&i| (0..neg.len()).filter(|&k| atoms[neg[k]].is_dual_of(&atoms[i]) && w.par(i, neg[k])).collect())
        .collect();
    let mut matched: Vec<Option<usize>> = vec![None; neg.len()];
    fn augment(u: usize, adj: &[Vec<usize>], seen: &mut [bool], matched: &mut [Option<usize>]) -> bool {
        for &v in &adj[u] {
            if seen[v] {
                continue;
            }
            seen[v] = true;
            if matched[v].is_none() || augment(matched[v].unwrap(), adj, seen, matched) {
                matched[v] = Some(u);
                return true;
            }
        }
        false
    }
    let mut size = 0;
    for u in 0..pos.len() {
        let mut seen = vec![false; neg.len()];
        if augment(u, &adj, &mut seen, &mut matched) {
            size += 1;
        }
    }
    size
}

/// Decides provability in `sys` (BV, FBV or a subsystem of them) and returns a
/// proof when there is one.
pub fn prove(s: &Structure, sys: &System) -> Option<Proof> {
    Prover::new(sys.clone()).prove(s)
}

/// Provability in SBV with the unit axiom, decided through BV; the
/// certificate is a BV proof.
pub fn prove_sbv(s: &Structure) -> Option<Proof> {
    prove(s, &System::bv())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Derivability {
    Derivable(Derivation),
    NotDerivable,
    /// Not found within the depth or size bound.
    Unknown,
}

fn grows(sys: &System) -> bool {
    sys.contains(RuleId::AiUp) || sys.contains(RuleId::IUp)
}

fn contains_multiset(big: &[Atom], small: &[Atom]) -> bool {
    let mut i = 0;
    for a in small {
        while i < big.len() && &big[i] < a {
            i += 1;
        }
        if i == big.len() || &big[i] != a {
            return false;
        }
        i += 1;
    }
    true
}

/// Searches for a derivation from `t` to `r` bottom-up from `r`.
pub fn derivable(t: &Structure, r: &Structure, sys: &System, cfg: &SearchConfig) -> Result<Derivability, SearchError> {
    let growing = grows(sys);
    if growing && cfg.derivability_depth.is_none() {
        return Err(SearchError::DepthBoundRequired);
    }
    let mut names: Vec<Atom> = t.atoms().into_iter().chain(r.atoms()).collect();
    names.sort();
    names.dedup();
    let opts = MatchOptions { alphabet: Some(names), intro_size: cfg.intro_size };
    let target = t.atom_multiset();
    let mut parent: FxHashMap<Structure, RuleInstance> = FxHashMap::default();
    let mut seen: FxHashSet<Structure> = FxHashSet::default();
    let mut frontier = vec![r.clone()];
    seen.insert(r.clone());
    let mut cut = false;
    let mut depth = 0usize;
    let order: Vec<RuleId> = rule_order(sys);
    while !frontier.is_empty() {
        if frontier.iter().any(|x| x == t) {
            return Ok(Derivability::Derivable(path(t, r, &parent)));
        }
        if cfg.derivability_depth.is_some_and(|d| depth >= d) {
            cut = true;
            break;
        }
        let mut next = Vec::new();
        for x in &frontier {
            let nodes = positions(x);
            for &rule in &order {
                for inst in rule_premisses(x, rule, &opts, &nodes) {
                    let p = inst.premiss.clone();
                    if seen.contains(&p) {
                        continue;
                    }
                    if p.size() > cfg.max_size {
                        cut = true;
                        continue;
                    }
                    if !growing && !contains_multiset(&p.atom_multiset(), &target) {
                        continue;
                    }
                    seen.insert(p.clone());
                    parent.insert(p.clone(), inst);
                    next.push(p);
                }
            }
        }
        frontier = next;
        depth += 1;
    }
    Ok(if cut { Derivability::Unknown } else { Derivability::NotDerivable })
}

/// The derivation from `top` down to `bottom` recorded in `parent`.
fn path(top: &Structure, bottom: &Structure, parent: &FxHashMap<Structure, RuleInstance>) -> Derivation {
    let mut steps = Vec::new();
    let mut cur = top.clone();
    while &cur != bottom {
        let inst = parent[&cur].clone();
        cur = inst.conclusion.clone();
        steps.push(inst);
    }
    steps.reverse();
    Derivation { conclusion: bottom.clone(), steps }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SplitKind {
    /// `[<R;T>,P]`, split into `<P1;P2>`.
    Seq,
    /// `[(R,T),P]`, split into `[P1,P2]`.
    Copar,
}

impl SplitKind {
    pub fn joined(self, r: &Structure, t: &Structure) -> Structure {
        match self {
            SplitKind::Seq => Structure::seq2(r.clone(), t.clone()),
            SplitKind::Copar => Structure::copar2(r.clone(), t.clone()),
        }
    }

    fn glue(self, p1: &Structure, p2: &Structure) -> Structure {
        match self {
            SplitKind::Seq => Structure::seq2(p1.clone(), p2.clone()),
            SplitKind::Copar => Structure::par2(p1.clone(), p2.clone()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitWitness {
    pub kind: SplitKind,
    pub p1: Structure,
    pub p2: Structure,
    /// From `<P1;P2>` (or `[P1,P2]`) to `P`.
    pub bridge: Derivation,
    /// Proves `[R,P1]`.
    pub left_proof: Proof,
    /// Proves `[T,P2]`.
    pub right_proof: Proof,
}

fn splits_of(y: &Structure, kind: SplitKind) -> Vec<(Structure, Structure)> {
    match kind {
        SplitKind::Seq => seq_splits(y),
        SplitKind::Copar => match y {
            Structure::Unit => vec![(Structure::Unit, Structure::Unit)],
            Structure::Par(cs) => (0u32..(1 << cs.len()))
                .map(|mask| {
                    let pick = |inside: bool| {
                        Structure::par(cs.iter().enumerate().filter(|(i, _)| (mask & (1 << i) != 0) == inside).map(|(_, c)| c.clone()))
                    };
                    (pick(true), pick(false))
                })
                .collect(),
            _ => vec![(y.clone(), Structure::Unit), (Structure::Unit, y.clone())],
        },
    }
}

/// Finds `P1`, `P2` for a provable `[<R;T>,P]` or `[(R,T),P]`, using
/// `prover` (a BV prover) for the side conditions.
pub fn split_find_with(prover: &mut Prover, r: &Structure, t: &Structure, p: &Structure, kind: SplitKind) -> Result<SplitWitness, SearchError> {
    let whole = Structure::par2(kind.joined(r, t), p.clone());
    if !prover.provable(&whole) {
        return Err(SearchError::NotProvable(whole));
    }
    let down = System::new("BV", &[RuleId::AiDown, RuleId::QDown, RuleId::S]);
    let opts = MatchOptions::default();
    let mut parent: FxHashMap<Structure, RuleInstance> = FxHashMap::default();
    let mut seen: FxHashSet<Structure> = FxHashSet::default();
    let mut queue = VecDeque::from([p.clone()]);
    seen.insert(p.clone());
    let ra = r.atom_multiset();
    let ta = t.atom_multiset();
    while let Some(y) = queue.pop_front() {
        for (p1, p2) in splits_of(&y, kind) {
            let mut l = ra.clone();
            l.extend(p1.atoms());
            let mut rr = ta.clone();
            rr.extend(p2.atoms());
            if !balanced(&l) || !balanced(&rr) {
                continue;
            }
            let left = Structure::par2(r.clone(), p1.clone());
            let right = Structure::par2(t.clone(), p2.clone());
            if prover.provable(&left) && prover.provable(&right) {
                let glued = kind.glue(&p1, &p2);
                debug_assert_eq!(glued, y);
                return Ok(SplitWitness {
                    kind,
                    bridge: path(&y, p, &parent),
                    left_proof: prover.prove(&left).expect("decided provable"),
                    right_proof: prover.prove(&right).expect("decided provable"),
                    p1,
                    p2,
                });
            }
        }
        let nodes = positions(&y);
        for rule in rule_order(&down) {
            for inst in rule_premisses(&y, rule, &opts, &nodes) {
                if seen.insert(inst.premiss.clone()) {
                    queue.push_back(inst.premiss.clone());
                    parent.insert(inst.premiss.clone(), inst);
                }
            }
        }
    }
    Err(SearchError::Internal(format!("no split found for {whole}")))
}

pub fn split_find(r: &Structure, t: &Structure, p: &Structure, kind: SplitKind) -> Result<SplitWitness, SearchError> {
    split_find_with(&mut Prover::bv(), r, t, p, kind)
}

#[derive(Clone, Debug)]
enum Layer {
    /// `S{ } = [(S'{ },T),P]`.
    Copar { inner: Context, t: Structure, split: SplitWitness },
    /// `S{ } = [<B;S'{ }>,P]`.
    SeqBefore { inner: Context, b: Structure, split: SplitWitness },
    /// `S{ } = [<S'{ };A>,P]`.
    SeqAfter { inner: Context, a: Structure, split: SplitWitness },
}

/// The result of reducing a context: `[R,U]` is provable and `[X,U]`
/// derives `S{X}` for every `X`.
#[derive(Clone, Debug)]
pub struct ContextReduction {
    pub context: Context,
    pub u: Structure,
    /// Outermost first.
    layers: Vec<Layer>,
    /// `U` when the innermost layer is a par context.
    base: Structure,
}

impl ContextReduction {
    /// A derivation from `[X,U]` to `S{X}` in BV.
    pub fn transport(&self, x: &Structure) -> Derivation {
        let mut b = Builder::from_top(Structure::par2(x.clone(), self.u.clone()));
        for layer in self.layers.iter().rev() {
            match layer {
                Layer::Copar { inner, t, split } => {
                    // [S'{X},P1] -> ([S'{X},P1],[T,P2]) -> [(S'{X},T),P1,P2] -> [(S'{X},T),P]
                    let sx = inner.plug(x);
                    let left = Structure::par2(sx.clone(), split.p1.clone());
                    b.append(&split.right_proof.in_context(&Context::copar_with(&left))).expect("transport chains");
                    let rt = Structure::par2(t.clone(), split.p2.clone());
                    b.push(switch(&Context::hole(), &sx, &split.p1, &rt)).expect("transport chains");
                    let around = Context::par_with(&split.p1);
                    b.push(switch(&around, t, &split.p2, &sx)).expect("transport chains");
                    let top = Structure::copar2(sx, t.clone());
                    b.append(&split.bridge.in_context(&Context::par_with(&top))).expect("transport chains");
                }
                Layer::SeqBefore { inner, b: first, split } => {
                    // [S'{X},P2] -> <[B,P1];[S'{X},P2]> -> [<B;S'{X}>,<P1;P2>] -> [<B;S'{X}>,P]
                    let sx = inner.plug(x);
                    let rest = Structure::par2(sx.clone(), split.p2.clone());
                    b.append(&split.left_proof.in_context(&Context::seq_before(&rest))).expect("transport chains");
                    b.push(seq_step(&Context::hole(), first, &split.p1, &sx, &split.p2)).expect("transport chains");
                    let top = Structure::seq2(first.clone(), sx);
                    b.append(&split.bridge.in_context(&Context::par_with(&top))).expect("transport chains");
                }
                Layer::SeqAfter { inner, a, split } => {
                    // [S'{X},P1] -> <[S'{X},P1];[A,P2]> -> [<S'{X};A>,<P1;P2>] -> [<S'{X};A>,P]
                    let sx = inner.plug(x);
                    let first = Structure::par2(sx.clone(), split.p1.clone());
                    b.append(&split.right_proof.in_context(&Context::seq_after(&first))).expect("transport chains");
                    b.push(seq_step(&Context::hole(), &sx, &split.p1, a, &split.p2)).expect("transport chains");
                    let top = Structure::seq2(sx, a.clone());
                    b.append(&split.bridge.in_context(&Context::par_with(&top))).expect("transport chains");
                }
            }
        }
        let _ = &self.base;
        b.finish()
    }
}

fn switch(ctx: &Context, r: &Structure, t: &Structure, r2: &Structure) -> RuleInstance {
    RuleInstance::new(RuleId::S, ctx.clone(), Witness::Switch { r: r.clone(), t: t.clone(), r2: r2.clone() }).expect("switch schema")
}

fn seq_step(ctx: &Context, r: &Structure, t: &Structure, r2: &Structure, t2: &Structure) -> RuleInstance {
    let w = Witness::Quad { r: r.clone(), t: t.clone(), r2: r2.clone(), t2: t2.clone() };
    RuleInstance::new(RuleId::QDown, ctx.clone(), w).expect("seq schema")
}

pub fn context_reduce_with(prover: &mut Prover, ctx: &Context, r: &Structure) -> Result<ContextReduction, SearchError> {
    let whole = ctx.plug(r);
    if !prover.provable(&whole) {
        return Err(SearchError::NotProvable(whole));
    }
    let mut layers = Vec::new();
    let mut cur = ctx.clone();
    loop {
        let frames = cur.frames().to_vec();
        let (p, rest) = match frames.first() {
            Some(Frame::Par(sibs)) => (Structure::par(sibs.iter().cloned()), frames[1..].to_vec()),
            _ => (Structure::Unit, frames.clone()),
        };
        if rest.is_empty() {
            return Ok(ContextReduction { context: ctx.clone(), u: p.clone(), layers, base: p });
        }
        let inner_frames = rest[1..].to_vec();
        match &rest[0] {
            Frame::Copar(sibs) => {
                let inner = Context::from_frames(inner_frames);
                let t = Structure::copar(sibs.iter().cloned());
                let split = split_find_with(prover, &inner.plug(r), &t, &p, SplitKind::Copar)?;
                cur = inner.within(&Context::par_with(&split.p1));
                layers.push(Layer::Copar { inner, t, split });
            }
            Frame::Seq { before, after } if !before.is_empty() => {
                let b = Structure::seq(before.iter().cloned());
                let mut fs = Vec::new();
                if !after.is_empty() {
                    fs.push(Frame::Seq { before: vec![], after: after.clone() });
                }
                fs.extend(inner_frames);
                let inner = Context::from_frames(fs);
                let split = split_find_with(prover, &b, &inner.plug(r), &p, SplitKind::Seq)?;
                cur = inner.within(&Context::par_with(&split.p2));
                layers.push(Layer::SeqBefore { inner, b, split });
            }
            Frame::Seq { after, .. } => {
                let inner = Context::from_frames(inner_frames);
                let a = Structure::seq(after.iter().cloned());
                let split = split_find_with(prover, &inner.plug(r), &a, &p, SplitKind::Seq)?;
                cur = inner.within(&Context::par_with(&split.p1));
                layers.push(Layer::SeqAfter { inner, a, split });
            }
            Frame::Par(_) => return Err(SearchError::Internal("unnormalized context".into())),
        }
    }
}

pub fn context_reduce(ctx: &Context, r: &Structure) -> Result<ContextReduction, SearchError> {
    context_reduce_with(&mut Prover::bv(), ctx, r)
}

/// Turns a proof in BV with `q↑` and `ai↑` into a BV proof of the same
/// structure, removing the topmost up step first.
pub fn eliminate_up(proof: &Proof) -> Result<Proof, SearchError> {
    eliminate_up_with(&mut Prover::bv(), proof)
}

pub fn eliminate_up_with(prover: &mut Prover, proof: &Proof) -> Result<Proof, SearchError> {
    check_proof(proof, &System::bv_up()).map_err(|e| SearchError::MalformedProof(e.to_string()))?;
    let mut steps = proof.steps.clone();
    while let Some(i) = steps.iter().rposition(|s| s.rule.is_up()) {
        let inst = steps[i].clone();
        let upper = match inst.rule {
            RuleId::QUp => eliminate_qup(prover, &inst)?,
            RuleId::AiUp => eliminate_aiup(prover, &inst)?,
            r => return Err(SearchError::MalformedProof(format!("unexpected rule {r}"))),
        };
        if upper.conclusion != inst.conclusion || !upper.is_proof() {
            return Err(SearchError::Internal("replacement does not fit".into()));
        }
        steps.truncate(i);
        steps.extend(upper.steps);
    }
    Ok(Derivation { conclusion: proof.conclusion.clone(), steps })
}

fn eliminate_qup(prover: &mut Prover, inst: &RuleInstance) -> Result<Proof, SearchError> {
    let Witness::Quad { r, t, r2, t2 } = &inst.witness else {
        return Err(SearchError::MalformedProof("q↑ witness".into()));
    };
    let above = Structure::copar2(Structure::seq2(r.clone(), t.clone()), Structure::seq2(r2.clone(), t2.clone()));
    let red = context_reduce_with(prover, &inst.context, &above)?;
    let outer = split_find_with(prover, &Structure::seq2(r.clone(), t.clone()), &Structure::seq2(r2.clone(), t2.clone()), &red.u, SplitKind::Copar)?;
    let first = split_find_with(prover, r, t, &outer.p1, SplitKind::Seq)?;
    let second = split_find_with(prover, r2, t2, &outer.p2, SplitKind::Seq)?;
    let (sr, st) = (&first.p1, &first.p2);
    let (sr2, st2) = (&second.p1, &second.p2);
    let w = Structure::seq2(sr2.clone(), st2.clone());
    let hole = Context::hole();
    let mut b = Builder::proof();
    // <[R',S_R'];[T',S_T']> -> [<R';T'>, <S_R';S_T'>]
    b.append(&second.left_proof)?;
    b.append(&second.right_proof.in_context(&Context::seq_after(&Structure::par2(r2.clone(), sr2.clone()))))?;
    b.push(seq_step(&hole, r2, sr2, t2, st2))?;
    // [<R';([T,S_T],T')>, W] -> [<R';[(T,T'),S_T]>, W]
    let c1 = Context::from_frames(vec![
        Frame::Par(vec![w.clone()]),
        Frame::Seq { before: r2.parts(Kind::Seq), after: vec![] },
        Frame::Copar(t2.parts(Kind::Copar)),
    ]);
    b.append(&first.right_proof.in_context(&c1))?;
    let c2 = Context::from_frames(vec![Frame::Par(vec![w.clone()]), Frame::Seq { before: r2.parts(Kind::Seq), after: vec![] }]);
    b.push(switch(&c2, t, st, t2))?;
    // [<([R,S_R],R');[(T,T'),S_T]>, W] -> [<[(R,R'),S_R];[(T,T'),S_T]>, W]
    let tt = Structure::par2(Structure::copar2(t.clone(), t2.clone()), st.clone());
    let c3 = Context::from_frames(vec![
        Frame::Par(vec![w.clone()]),
        Frame::Seq { before: vec![], after: tt.parts(Kind::Seq) },
        Frame::Copar(r2.parts(Kind::Copar)),
    ]);
    b.append(&first.left_proof.in_context(&c3))?;
    let c4 = Context::from_frames(vec![Frame::Par(vec![w.clone()]), Frame::Seq { before: vec![], after: tt.parts(Kind::Seq) }]);
    b.push(switch(&c4, r, sr, r2))?;
    let rr = Structure::copar2(r.clone(), r2.clone());
    let ttc = Structure::copar2(t.clone(), t2.clone());
    b.push(seq_step(&Context::par_with(&w), &rr, sr, &ttc, st))?;
    // bridges down to [X,U], then the context
    let x = Structure::seq2(rr, ttc);
    b.append(&first.bridge.in_context(&Context::par_with(&Structure::par2(x.clone(), w.clone()))))?;
    b.append(&second.bridge.in_context(&Context::par_with(&Structure::par2(x.clone(), outer.p1.clone()))))?;
    b.append(&outer.bridge.in_context(&Context::par_with(&x)))?;
    b.append(&red.transport(&x))?;
    Ok(b.finish())
}

fn eliminate_aiup(prover: &mut Prover, inst: &RuleInstance) -> Result<Proof, SearchError> {
    let Witness::Atom(a) = &inst.witness else {
        return Err(SearchError::MalformedProof("ai↑ witness".into()));
    };
    let (pa, na) = (Structure::Atom(a.clone()), Structure::Atom(a.dual()));
    let red = context_reduce_with(prover, &inst.context, &Structure::copar2(pa.clone(), na.clone()))?;
    let split = split_find_with(prover, &pa, &na, &red.u, SplitKind::Copar)?;
    let (s1, s2) = (&split.p1, &split.p2);
    let c1 = killer(prover, s1, &na)?;
    let c2 = killer(prover, s2, &pa)?;
    let mut b = Builder::proof();
    b.append(&prover.prove(&c1.plug(&Structure::Unit)).expect("decided provable"))?;
    b.append(&prover.prove(&c2.plug(&Structure::Unit)).expect("decided provable").in_context(&c1))?;
    let both = c2.within(&c1);
    let ai = RuleInstance::new(RuleId::AiDown, both, Witness::Atom(if a.is_positive() { a.clone() } else { a.dual() }))
        .expect("atom schema");
    b.push(ai)?;
    // S1'{S2'[a,ā]} -> S1'[S2'{a},ā] -> [S1'{ā},S2'{a}]
    b.append(&par_extrusion(&c2, &pa, &na).in_context(&c1))?;
    b.append(&par_extrusion(&c1, &na, &c2.plug(&pa)))?;
    b.append(&Derivation::empty(Structure::par2(s1.clone(), s2.clone())))?;
    b.append(&split.bridge)?;
    b.append(&red.transport(&Structure::Unit))?;
    Ok(b.finish())
}

/// A context `C` with `C{x} = s` and `C{◦}` provable.
fn killer(prover: &mut Prover, s: &Structure, x: &Structure) -> Result<Context, SearchError> {
    for (c, y) in decompositions(s) {
        if &y == x && prover.provable(&c.plug(&Structure::Unit)) {
            return Ok(c);
        }
    }
    Err(SearchError::Internal(format!("no interacting occurrence of {x} in {s}")))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Consistency {
    /// `◦` is provable and self-dual.
    Exempt,
    Pass { provable: bool, dual_provable: bool },
    Fail,
}

impl Consistency {
    pub fn ok(self) -> bool {
        self != Consistency::Fail
    }
}

/// `S` and its negation are never both provable unless `S = ◦`.
pub fn consistency_check_with(prover: &mut Prover, s: &Structure) -> Consistency {
    if s.is_unit() {
        return Consistency::Exempt;
    }
    let p = prover.provable(s);
    let n = prover.provable(&s.negate());
    if p && n {
        Consistency::Fail
    } else {
        Consistency::Pass { provable: p, dual_provable: n }
    }
}

pub fn consistency_check(s: &Structure) -> Consistency {
    consistency_check_with(&mut Prover::bv(), s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derivation::check_derivation;
    use crate::syntax::{parse_context, parse_structure};

    fn p(s: &str) -> Structure {
        parse_structure(s).unwrap()
    }

    #[test]
    fn small_provability() {
        let bv = System::bv();
        for s in ["[a,b,(~b,[(~a,c),~c])]", "[<a;b>,<~a;~b>]", "[a,~a]", "o"] {
            let pr = prove(&p(s), &bv).unwrap_or_else(|| panic!("{s}"));
            assert!(check_proof(&pr, &bv).is_ok());
        }
        assert_eq!(prove(&Structure::Unit, &bv).unwrap().len(), 1);
        for s in ["(a,~a)", "<a;~a>", "a", "[<a;b>,<~b;~a>]"] {
            assert!(prove(&p(s), &bv).is_none(), "{s}");
        }
    }

    #[test]
    fn derivability_examples() {
        let cfg = SearchConfig::default();
        let qs = System::new("q↓,s", &[RuleId::QDown, RuleId::S]);
        assert_eq!(derivable(&p("(<a;c>,b)"), &p("<(a,b);c>"), &qs, &cfg).unwrap(), Derivability::NotDerivable);
        let s = System::new("s", &[RuleId::S]);
        for (t, r, sys) in [("([a,c],b)", "[(a,b),c]", &s), ("(a,b)", "[a,b]", &s)] {
            match derivable(&p(t), &p(r), sys, &cfg).unwrap() {
                Derivability::Derivable(d) => {
                    assert_eq!(d.len(), 1);
                    assert!(check_derivation(&d, sys).is_ok());
                }
                other => panic!("{other:?}"),
            }
        }
        let up = System::sbv();
        assert_eq!(derivable(&p("a"), &p("a"), &up, &cfg), Err(SearchError::DepthBoundRequired));
    }

    #[test]
    fn splitting_examples() {
        let w = split_find(&p("a"), &p("b"), &p("[~a,~b]"), SplitKind::Copar).unwrap();
        assert_eq!((w.p1.clone(), w.p2.clone()), (p("~a"), p("~b")));
        assert!(w.bridge.is_empty());
        let w = split_find(&p("a"), &p("b"), &p("<~a;~b>"), SplitKind::Seq).unwrap();
        assert_eq!((w.p1, w.p2), (p("~a"), p("~b")));
        let w = split_find(&p("[a,~a]"), &p("[b,~b]"), &Structure::Unit, SplitKind::Copar).unwrap();
        assert_eq!((w.p1, w.p2), (Structure::Unit, Structure::Unit));
        assert!(matches!(split_find(&p("a"), &p("b"), &p("~a"), SplitKind::Copar), Err(SearchError::NotProvable(_))));
    }

    #[test]
    fn context_reduction() {
        let red = context_reduce(&Context::hole(), &p("[a,~a]")).unwrap();
        assert!(red.u.is_unit());
        let red = context_reduce(&parse_context("[{},~a]").unwrap(), &p("a")).unwrap();
        assert_eq!(red.u, p("~a"));
        for (c, r) in [("[(<{};b>,~c),~b,c]", "a"), ("[<~a;{}>,a]", "[b,~b]"), ("[(b,{}),~a,~b]", "a")] {
            let ctx = parse_context(c).unwrap();
            let r = if r == "a" && c.starts_with("[(<") { p("[a,~a]") } else { p(r) };
            let red = context_reduce(&ctx, &r).unwrap_or_else(|e| panic!("{c}: {e}"));
            assert!(prove(&Structure::par2(r.clone(), red.u.clone()), &System::bv()).is_some());
            for x in ["a", "<b;c>", "(d,~e)"] {
                let d = red.transport(&p(x));
                assert_eq!(d.conclusion, ctx.plug(&p(x)));
                assert_eq!(d.top(), &Structure::par2(p(x), red.u.clone()));
                assert!(check_derivation(&d, &System::bv()).is_ok());
            }
        }
    }

    #[test]
    fn up_elimination() {
        let sys = System::bv_up();
        let cfg = SearchConfig { up_budget: 1, ..SearchConfig::default() };
        for s in ["[a,~a]", "[<a;b>,<~a;~b>]", "[a,b,~a,~b]", "[(a,b),~a,~b]"] {
            let mut prover = Prover::with_config(sys.clone(), cfg.clone());
            let pr = prover.prove_with_up(&p(s)).unwrap_or_else(|| panic!("{s}"));
            assert!(pr.rules_used().iter().any(|r| r.is_up()));
            assert!(check_proof(&pr, &sys).is_ok());
            let out = eliminate_up(&pr).unwrap();
            assert_eq!(out.conclusion, p(s));
            assert!(check_proof(&out, &System::bv()).is_ok(), "{s}");
        }
    }

    #[test]
    fn consistency() {
        assert_eq!(consistency_check(&Structure::Unit), Consistency::Exempt);
        assert_eq!(consistency_check(&p("[a,~a]")), Consistency::Pass { provable: true, dual_provable: false });
        assert_eq!(consistency_check(&p("a")), Consistency::Pass { provable: false, dual_provable: false });
    }
}
