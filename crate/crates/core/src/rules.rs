//! Inference rules, systems, rule instances and one-step matching.

use crate::context::{decompositions, positions, split_by, submultisets, Context, Frame};
use crate::enumerate::Enumerator;
use crate::merge::{merge_weak, Merger};
use crate::structure::{Atom, Structure};
use crate::web::{reconstruct, web_of};
use rustc_hash::FxHashSet;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RuleId {
    UnitDown,
    AiDown,
    AiUp,
    QDown,
    QUp,
    S,
    Ws,
    IDown,
    IUp,
    GDown,
    GUp,
    WgDown,
    WgUp,
}

pub const ALL_RULES: [RuleId; 13] = [
    RuleId::UnitDown,
    RuleId::AiDown,
    RuleId::AiUp,
    RuleId::QDown,
    RuleId::QUp,
    RuleId::S,
    RuleId::Ws,
    RuleId::IDown,
    RuleId::IUp,
    RuleId::GDown,
    RuleId::GUp,
    RuleId::WgDown,
    RuleId::WgUp,
];

impl RuleId {
    pub fn name(self) -> &'static str {
        match self {
            RuleId::UnitDown => "◦↓",
            RuleId::AiDown => "ai↓",
            RuleId::AiUp => "ai↑",
            RuleId::QDown => "q↓",
            RuleId::QUp => "q↑",
            RuleId::S => "s",
            RuleId::Ws => "ws",
            RuleId::IDown => "i↓",
            RuleId::IUp => "i↑",
            RuleId::GDown => "g↓",
            RuleId::GUp => "g↑",
            RuleId::WgDown => "wg↓",
            RuleId::WgUp => "wg↑",
        }
    }

    /// The rule obtained by exchanging premiss and conclusion and negating
    /// both. The unit axiom has none.
    pub fn corule(self) -> Option<RuleId> {
        Some(match self {
            RuleId::UnitDown => return None,
            RuleId::AiDown => RuleId::AiUp,
            RuleId::AiUp => RuleId::AiDown,
            RuleId::QDown => RuleId::QUp,
            RuleId::QUp => RuleId::QDown,
            RuleId::S => RuleId::S,
            RuleId::Ws => RuleId::Ws,
            RuleId::IDown => RuleId::IUp,
            RuleId::IUp => RuleId::IDown,
            RuleId::GDown => RuleId::GUp,
            RuleId::GUp => RuleId::GDown,
            RuleId::WgDown => RuleId::WgUp,
            RuleId::WgUp => RuleId::WgDown,
        })
    }

    /// Rules that may grow the structure when read bottom-up.
    pub fn introduces_atoms(self) -> bool {
        matches!(self, RuleId::AiUp | RuleId::IUp)
    }

    pub fn is_up(self) -> bool {
        matches!(self, RuleId::AiUp | RuleId::QUp | RuleId::IUp | RuleId::GUp | RuleId::WgUp)
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown rule or system {0:?}")]
pub struct UnknownRule(pub String);

impl FromStr for RuleId {
    type Err = UnknownRule;
    fn from_str(s: &str) -> Result<RuleId, UnknownRule> {
        let key: String = s
            .trim()
            .to_lowercase()
            .replace('↓', "down")
            .replace('↑', "up")
            .replace('◦', "o")
            .chars()
            .filter(|c| !matches!(c, '_' | '-' | ' '))
            .collect();
        Ok(match key.as_str() {
            "odown" | "unit" | "unitdown" => RuleId::UnitDown,
            "aidown" => RuleId::AiDown,
            "aiup" => RuleId::AiUp,
            "qdown" => RuleId::QDown,
            "qup" => RuleId::QUp,
            "s" => RuleId::S,
            "ws" => RuleId::Ws,
            "idown" => RuleId::IDown,
            "iup" => RuleId::IUp,
            "gdown" => RuleId::GDown,
            "gup" => RuleId::GUp,
            "wgdown" => RuleId::WgDown,
            "wgup" => RuleId::WgUp,
            _ => return Err(UnknownRule(s.to_string())),
        })
    }
}

/// A named set of rules.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct System {
    pub name: String,
    pub rules: BTreeSet<RuleId>,
}

impl System {
    pub fn new(name: &str, rules: &[RuleId]) -> System {
        System { name: name.to_string(), rules: rules.iter().copied().collect() }
    }

    pub fn bv() -> System {
        System::new("BV", &[RuleId::UnitDown, RuleId::AiDown, RuleId::QDown, RuleId::S])
    }

    pub fn fbv() -> System {
        System::new("FBV", &[RuleId::UnitDown, RuleId::AiDown, RuleId::S])
    }

    pub fn sbv() -> System {
        System::new("SBV", &[RuleId::AiDown, RuleId::AiUp, RuleId::QDown, RuleId::QUp, RuleId::S])
    }

    pub fn sbvc() -> System {
        System::new("SBVc", &[RuleId::QDown, RuleId::QUp, RuleId::S])
    }

    pub fn mv() -> System {
        System::new("MV", &[RuleId::GDown, RuleId::GUp])
    }

    pub fn wmv() -> System {
        System::new("WMV", &[RuleId::WgDown, RuleId::WgUp])
    }

    /// BV together with the up fragment.
    pub fn bv_up() -> System {
        System::bv().with(&[RuleId::QUp, RuleId::AiUp])
    }

    pub fn with(&self, extra: &[RuleId]) -> System {
        let mut rules = self.rules.clone();
        rules.extend(extra.iter().copied());
        let name = format!("{}+{}", self.name, extra.iter().map(|r| r.name()).collect::<Vec<_>>().join(","));
        System { name, rules }
    }

    pub fn contains(&self, r: RuleId) -> bool {
        self.rules.contains(&r)
    }

    pub fn is_subset_of(&self, other: &System) -> bool {
        self.rules.is_subset(&other.rules)
    }

    /// A preset name or a list of presets and rule ids separated by `,` or `+`.
    pub fn parse(s: &str) -> Result<System, UnknownRule> {
        match s.trim().to_uppercase().as_str() {
            "BV" => return Ok(System::bv()),
            "FBV" => return Ok(System::fbv()),
            "SBV" => return Ok(System::sbv()),
            "SBVC" => return Ok(System::sbvc()),
            "MV" => return Ok(System::mv()),
            "WMV" => return Ok(System::wmv()),
            _ => {}
        }
        let mut rules = BTreeSet::new();
        for part in s.split([',', '+']) {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            match part.to_uppercase().as_str() {
                "BV" => rules.extend(System::bv().rules),
                "FBV" => rules.extend(System::fbv().rules),
                "SBV" => rules.extend(System::sbv().rules),
                "SBVC" => rules.extend(System::sbvc().rules),
                "MV" => rules.extend(System::mv().rules),
                "WMV" => rules.extend(System::wmv().rules),
                _ => {
                    rules.insert(part.parse::<RuleId>()?);
                }
            }
        }
        if rules.is_empty() {
            return Err(UnknownRule(s.to_string()));
        }
        let name = rules.iter().map(|r| r.name()).collect::<Vec<_>>().join(",");
        Ok(System { name, rules })
    }
}

impl fmt::Display for System {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)
    }
}

/// Explicit bindings of a rule's schematic variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Witness {
    None,
    /// The atom of an atomic interaction.
    Atom(Atom),
    /// `R` of `i↓`/`i↑`.
    Interaction { r: Structure },
    /// `R`, `T`, `R'` of `s`.
    Switch { r: Structure, t: Structure, r2: Structure },
    /// `R`, `T`, `R'`, `T'` of `q↓`, `q↑`, `ws`.
    Quad { r: Structure, t: Structure, r2: Structure, t2: Structure },
    /// `R`, `T` and the merge member `Q` of the `g` and `wg` rules.
    Merge { r: Structure, t: Structure, q: Structure },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemaError {
    #[error("witness does not fit rule {0}")]
    WrongWitness(RuleId),
    #[error("{q} is not in the merge set of {r} and {t}")]
    NotAMerge { q: Structure, r: Structure, t: Structure },
    #[error("weak merge check exceeded the enumeration bound")]
    TooLarge,
}

/// Premiss and conclusion redexes of a rule under a witness. The unit
/// axiom has no premiss; its redex pair is `(◦, ◦)`.
pub fn schema(rule: RuleId, w: &Witness) -> Result<(Structure, Structure), SchemaError> {
    use Structure as S;
    let wrong = || SchemaError::WrongWitness(rule);
    Ok(match (rule, w) {
        (RuleId::UnitDown, Witness::None) => (S::Unit, S::Unit),
        (RuleId::AiDown, Witness::Atom(a)) => {
            (S::Unit, S::par2(S::Atom(a.clone()), S::Atom(a.dual())))
        }
        (RuleId::AiUp, Witness::Atom(a)) => {
            (S::copar2(S::Atom(a.clone()), S::Atom(a.dual())), S::Unit)
        }
        (RuleId::IDown, Witness::Interaction { r }) => (S::Unit, S::par2(r.clone(), r.negate())),
        (RuleId::IUp, Witness::Interaction { r }) => (S::copar2(r.clone(), r.negate()), S::Unit),
        (RuleId::S, Witness::Switch { r, t, r2 }) => (
            S::copar2(S::par2(r.clone(), t.clone()), r2.clone()),
            S::par2(S::copar2(r.clone(), r2.clone()), t.clone()),
        ),
        (RuleId::QDown, Witness::Quad { r, t, r2, t2 }) => (
            S::seq2(S::par2(r.clone(), t.clone()), S::par2(r2.clone(), t2.clone())),
            S::par2(S::seq2(r.clone(), r2.clone()), S::seq2(t.clone(), t2.clone())),
        ),
        (RuleId::QUp, Witness::Quad { r, t, r2, t2 }) => (
            S::copar2(S::seq2(r.clone(), t.clone()), S::seq2(r2.clone(), t2.clone())),
            S::seq2(S::copar2(r.clone(), r2.clone()), S::copar2(t.clone(), t2.clone())),
        ),
        (RuleId::Ws, Witness::Quad { r, t, r2, t2 }) => (
            S::copar2(S::par2(r.clone(), t.clone()), S::par2(r2.clone(), t2.clone())),
            S::par2(S::copar2(r.clone(), r2.clone()), S::copar2(t.clone(), t2.clone())),
        ),
        (RuleId::GDown | RuleId::WgDown, Witness::Merge { r, t, q }) => {
            check_merge(rule, q, r, t)?;
            (q.clone(), S::par2(r.clone(), t.clone()))
        }
        (RuleId::GUp | RuleId::WgUp, Witness::Merge { r, t, q }) => {
            check_merge(rule, q, r, t)?;
            (S::copar2(r.clone(), t.clone()), q.clone())
        }
        _ => return Err(wrong()),
    })
}

fn check_merge(rule: RuleId, q: &Structure, r: &Structure, t: &Structure) -> Result<(), SchemaError> {
    let ok = match rule {
        RuleId::GDown | RuleId::GUp => Merger::new().member(q, r, t),
        _ => merge_weak(r, t).map_err(|_| SchemaError::TooLarge)?.contains(q),
    };
    if ok {
        Ok(())
    } else {
        Err(SchemaError::NotAMerge { q: q.clone(), r: r.clone(), t: t.clone() })
    }
}

/// A rule application: premiss `context{p}` above conclusion `context{c}`
/// where `(p, c)` is the schema instantiated by the witness.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RuleInstance {
    pub rule: RuleId,
    pub context: Context,
    pub witness: Witness,
    pub premiss: Structure,
    pub conclusion: Structure,
}

impl RuleInstance {
    pub fn new(rule: RuleId, context: Context, witness: Witness) -> Result<RuleInstance, SchemaError> {
        let (p, c) = schema(rule, &witness)?;
        Ok(RuleInstance { rule, premiss: context.plug(&p), conclusion: context.plug(&c), context, witness })
    }

    pub fn unit() -> RuleInstance {
        RuleInstance {
            rule: RuleId::UnitDown,
            context: Context::hole(),
            witness: Witness::None,
            premiss: Structure::Unit,
            conclusion: Structure::Unit,
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.rule != RuleId::UnitDown && self.premiss == self.conclusion
    }

    /// Recomputes premiss and conclusion from context and witness.
    pub fn replay(&self) -> Result<(Structure, Structure), SchemaError> {
        let (p, c) = schema(self.rule, &self.witness)?;
        Ok((self.context.plug(&p), self.context.plug(&c)))
    }

    /// The same instance placed inside `outer`.
    pub fn in_context(&self, outer: &Context) -> RuleInstance {
        RuleInstance {
            rule: self.rule,
            context: self.context.within(outer),
            witness: self.witness.clone(),
            premiss: outer.plug(&self.premiss),
            conclusion: outer.plug(&self.conclusion),
        }
    }

    /// The instance of the corule read upside down: premiss and conclusion
    /// exchanged and negated.
    pub fn dual(&self) -> Option<RuleInstance> {
        let rule = self.rule.corule()?;
        let n = |s: &Structure| s.negate();
        let witness = match &self.witness {
            Witness::None => Witness::None,
            Witness::Atom(a) => Witness::Atom(a.clone()),
            Witness::Interaction { r } => Witness::Interaction { r: r.clone() },
            Witness::Switch { r, t, r2 } => Witness::Switch { r: n(r), t: n(r2), r2: n(t) },
            Witness::Quad { r, t, r2, t2 } => Witness::Quad { r: n(r), t: n(r2), r2: n(t), t2: n(t2) },
            Witness::Merge { r, t, q } => Witness::Merge { r: n(r), t: n(t), q: n(q) },
        };
        Some(RuleInstance {
            rule,
            context: self.context.negate(),
            witness,
            premiss: self.conclusion.negate(),
            conclusion: self.premiss.negate(),
        })
    }

    /// Premiss and conclusion with every atom occurrence renamed apart, so
    /// that occurrences correspond by name across the two.
    pub fn tagged(&self) -> Result<(Structure, Structure), SchemaError> {
        let mut k = 0usize;
        let mut tag = |s: &Structure| {
            s.map_atoms(&mut |a: &Atom| {
                k += 1;
                Structure::Atom(Atom::new(format!("{}#{}", a.name(), k), a.polarity()))
            })
        };
        let frames: Vec<Frame> = self
            .context
            .frames()
            .iter()
            .map(|f| match f {
                Frame::Seq { before, after } => Frame::Seq {
                    before: before.iter().map(&mut tag).collect(),
                    after: after.iter().map(&mut tag).collect(),
                },
                Frame::Par(s) => Frame::Par(s.iter().map(&mut tag).collect()),
                Frame::Copar(s) => Frame::Copar(s.iter().map(&mut tag).collect()),
            })
            .collect();
        let ctx = Context::from_frames(frames);
        let w = match &self.witness {
            Witness::None => Witness::None,
            Witness::Atom(a) => Witness::Atom(a.clone()),
            Witness::Interaction { r } => Witness::Interaction { r: tag(r) },
            Witness::Switch { r, t, r2 } => Witness::Switch { r: tag(r), t: tag(t), r2: tag(r2) },
            Witness::Quad { r, t, r2, t2 } => Witness::Quad { r: tag(r), t: tag(t), r2: tag(r2), t2: tag(t2) },
            Witness::Merge { .. } => self.witness.clone(),
        };
        let (p, c) = schema(self.rule, &w)?;
        Ok((ctx.plug(&p), ctx.plug(&c)))
    }
}

/// Parameters for rules that introduce atoms when read bottom-up.
#[derive(Clone, Debug, Default)]
pub struct MatchOptions {
    /// Atom names available to `ai↑` (and `i↑`); defaults to those occurring.
    pub alphabet: Option<Vec<Atom>>,
    /// Largest `R` introduced by a bottom-up `i↑`.
    pub intro_size: usize,
}

impl MatchOptions {
    /// Positive atoms for the names `ai↑` and `i↑` may introduce.
    pub fn names(&self, s: &Structure) -> Vec<Atom> {
        let mut v: Vec<Atom> = match &self.alphabet {
            Some(a) => a.iter().map(|x| Atom::positive(x.name())).collect(),
            None => s.atoms().iter().map(|x| Atom::positive(x.name())).collect(),
        };
        v.sort();
        v.dedup();
        v
    }
}

/// Order in which rules are tried.
const ORDER: [RuleId; 12] = [
    RuleId::AiDown,
    RuleId::S,
    RuleId::QDown,
    RuleId::Ws,
    RuleId::IDown,
    RuleId::GDown,
    RuleId::WgDown,
    RuleId::QUp,
    RuleId::AiUp,
    RuleId::GUp,
    RuleId::WgUp,
    RuleId::IUp,
];

/// All non-trivial instances of rules of `sys` whose conclusion is `s`.
pub fn premisses(s: &Structure, sys: &System) -> Vec<RuleInstance> {
    premisses_with(s, sys, &MatchOptions::default())
}

pub fn premisses_with(s: &Structure, sys: &System, opts: &MatchOptions) -> Vec<RuleInstance> {
    let mut list = Vec::new();
    let nodes = positions(s);
    for rule in ORDER {
        if sys.contains(rule) {
            list.extend(rule_premisses(s, rule, opts, &nodes));
        }
    }
    if s.is_unit() && sys.contains(RuleId::UnitDown) {
        list.push(RuleInstance::unit());
    }
    list
}

/// Rules in the order the matcher and the prover try them.
pub fn rule_order(sys: &System) -> Vec<RuleId> {
    ORDER.iter().copied().filter(|r| sys.contains(*r)).collect()
}

/// Non-trivial instances of one rule concluding `s`; `nodes` is
/// `positions(s)`.
pub fn rule_premisses(s: &Structure, rule: RuleId, opts: &MatchOptions, nodes: &[(Context, Structure)]) -> Vec<RuleInstance> {
    let mut out = Out { seen: FxHashSet::default(), list: Vec::new(), conclusion: s.clone() };
    match rule {
        RuleId::AiDown | RuleId::S | RuleId::QDown | RuleId::Ws | RuleId::IDown | RuleId::GDown | RuleId::WgDown => {
            for (ctx, node) in nodes {
                if let Structure::Par(cs) = node {
                    match_par(rule, ctx, cs, &mut out);
                }
            }
        }
        RuleId::QUp => {
            for (ctx, node) in nodes {
                if let Structure::Seq(cs) = node {
                    match_qup(ctx, cs, &mut out);
                }
            }
        }
        RuleId::GUp | RuleId::WgUp => match_gup(rule, s, &mut out),
        RuleId::AiUp => {
            let holes = hole_positions(s);
            for a in opts.names(s) {
                let x = Structure::copar2(Structure::Atom(a.clone()), Structure::Atom(a.dual()));
                for ctx in &holes {
                    out.emit(rule, ctx.clone(), Witness::Atom(a.clone()), &x);
                }
            }
        }
        RuleId::IUp => {
            let alpha: Vec<Atom> = opts.names(s).iter().flat_map(|a| [a.clone(), a.dual()]).collect();
            let mut en = Enumerator::new();
            let holes = hole_positions(s);
            for n in 1..=opts.intro_size {
                for m in crate::enumerate::multisets(&alpha, n) {
                    for r in en.over(&m) {
                        let x = Structure::copar2(r.clone(), r.negate());
                        for ctx in &holes {
                            out.emit(rule, ctx.clone(), Witness::Interaction { r: r.clone() }, &x);
                        }
                    }
                }
            }
        }
        RuleId::UnitDown => {}
    }
    out.list
}

/// All non-trivial instances of rules of `sys` whose premiss is `s`,
/// obtained from the corule instances of the negation.
pub fn conclusions(s: &Structure, sys: &System) -> Vec<RuleInstance> {
    conclusions_with(s, sys, &MatchOptions::default())
}

pub fn conclusions_with(s: &Structure, sys: &System, opts: &MatchOptions) -> Vec<RuleInstance> {
    let co: BTreeSet<RuleId> = sys.rules.iter().filter_map(|r| r.corule()).collect();
    let cosys = System { name: format!("co-{}", sys.name), rules: co };
    premisses_with(&s.negate(), &cosys, opts).iter().filter_map(RuleInstance::dual).collect()
}

struct Out {
    seen: FxHashSet<Structure>,
    list: Vec<RuleInstance>,
    conclusion: Structure,
}

impl Out {
    fn emit(&mut self, rule: RuleId, context: Context, witness: Witness, p: &Structure) {
        let premiss = context.plug(p);
        if premiss == self.conclusion || !self.seen.insert(premiss.clone()) {
            return;
        }
        self.list.push(RuleInstance { rule, context, witness, premiss, conclusion: self.conclusion.clone() });
    }

}

/// Contexts `C{op(X, R)}` for every decomposition `(C, R)` and every way
/// `op` of attaching a new substructure `X`.
pub fn hole_positions(s: &Structure) -> Vec<Context> {
    if s.is_unit() {
        return vec![Context::hole()];
    }
    let mut out = Vec::new();
    let mut seen = FxHashSet::default();
    for (c, r) in decompositions(s) {
        for f in [
            Frame::Seq { before: vec![], after: vec![r.clone()] },
            Frame::Seq { before: vec![r.clone()], after: vec![] },
            Frame::Par(vec![r.clone()]),
            Frame::Copar(vec![r.clone()]),
        ] {
            let ctx = c.inner(f);
            if seen.insert(ctx.clone()) {
                out.push(ctx);
            }
        }
    }
    out
}

/// Pairs of disjoint nonempty index sets `(A, B)`; with `unordered` only
/// those where `A` holds the least selected index.
fn selections(n: usize, unordered: bool) -> Vec<(Vec<usize>, Vec<usize>)> {
    let mut out = Vec::new();
    let total = 3usize.pow(n as u32);
    for code in 0..total {
        let mut a = Vec::new();
        let mut b = Vec::new();
        let mut c = code;
        for i in 0..n {
            match c % 3 {
                1 => a.push(i),
                2 => b.push(i),
                _ => {}
            }
            c /= 3;
        }
        if a.is_empty() || b.is_empty() {
            continue;
        }
        if unordered && b[0] < a[0] {
            continue;
        }
        out.push((a, b));
    }
    out
}

fn pick(cs: &[Structure], idx: &[usize]) -> Vec<Structure> {
    idx.iter().map(|&i| cs[i].clone()).collect()
}

fn rest_of(cs: &[Structure], used: &[usize]) -> Vec<Structure> {
    cs.iter().enumerate().filter(|(i, _)| !used.contains(i)).map(|(_, c)| c.clone()).collect()
}

/// Ways to read `x` as `<R;R'>`.
pub(crate) fn seq_splits(x: &Structure) -> Vec<(Structure, Structure)> {
    match x {
        Structure::Unit => vec![(Structure::Unit, Structure::Unit)],
        Structure::Seq(cs) => (0..=cs.len())
            .map(|i| (Structure::seq(cs[..i].iter().cloned()), Structure::seq(cs[i..].iter().cloned())))
            .collect(),
        _ => vec![(x.clone(), Structure::Unit), (Structure::Unit, x.clone())],
    }
}

/// Ways to read `x` as `(R,R')`.
pub(crate) fn copar_splits(x: &Structure) -> Vec<(Structure, Structure)> {
    match x {
        Structure::Unit => vec![(Structure::Unit, Structure::Unit)],
        Structure::Copar(cs) => submultisets(cs, 0, cs.len())
            .into_iter()
            .map(|p| {
                let (a, b) = split_by(cs, &p);
                (Structure::copar(a), Structure::copar(b))
            })
            .collect(),
        _ => vec![(x.clone(), Structure::Unit), (Structure::Unit, x.clone())],
    }
}

fn match_par(rule: RuleId, ctx: &Context, cs: &[Structure], out: &mut Out) {
    let n = cs.len();
    let frame_ctx = |used: &[usize]| ctx.inner(Frame::Par(rest_of(cs, used)));
    match rule {
        RuleId::AiDown => {
            for i in 0..n {
                for j in i + 1..n {
                    if let (Some(a), Some(b)) = (cs[i].as_atom(), cs[j].as_atom()) {
                        if a.is_dual_of(b) {
                            let pos = if a.is_positive() { a.clone() } else { b.clone() };
                            let p = schema(rule, &Witness::Atom(pos.clone())).unwrap().0;
                            out.emit(rule, frame_ctx(&[i, j]), Witness::Atom(pos), &p);
                        }
                    }
                }
            }
        }
        RuleId::S => {
            for (a, b) in selections(n, true) {
                let r2 = Structure::par(pick(cs, &a));
                let t = Structure::par(pick(cs, &b));
                let used: Vec<usize> = a.iter().chain(b.iter()).copied().collect();
                let w = Witness::Switch { r: Structure::Unit, t, r2 };
                let p = schema(rule, &w).unwrap().0;
                out.emit(rule, frame_ctx(&used), w, &p);
            }
            for k in 0..n {
                let Structure::Copar(ks) = &cs[k] else { continue };
                let others: Vec<usize> = (0..n).filter(|&i| i != k).collect();
                for bmask in 1u32..(1 << others.len()) {
                    let b: Vec<usize> = others.iter().enumerate().filter(|(x, _)| bmask & (1 << x) != 0).map(|(_, &i)| i).collect();
                    let t = Structure::par(pick(cs, &b));
                    let mut used = b.clone();
                    used.push(k);
                    for sel in submultisets(ks, 1, ks.len() - 1) {
                        let (x, y) = split_by(ks, &sel);
                        let w = Witness::Switch { r: Structure::copar(x), t: t.clone(), r2: Structure::copar(y) };
                        let p = schema(rule, &w).unwrap().0;
                        out.emit(rule, frame_ctx(&used), w, &p);
                    }
                }
            }
        }
        RuleId::QDown | RuleId::Ws => {
            let splits = if rule == RuleId::QDown { seq_splits } else { copar_splits };
            for (a, b) in selections(n, true) {
                let x = Structure::par(pick(cs, &a));
                let y = Structure::par(pick(cs, &b));
                let used: Vec<usize> = a.iter().chain(b.iter()).copied().collect();
                let ctx2 = frame_ctx(&used);
                for (r, r2) in splits(&x) {
                    for (t, t2) in splits(&y) {
                        let w = Witness::Quad { r: r.clone(), t, r2: r2.clone(), t2 };
                        let p = schema(rule, &w).unwrap().0;
                        out.emit(rule, ctx2.clone(), w, &p);
                    }
                }
            }
        }
        RuleId::IDown => {
            for (a, b) in selections(n, false) {
                let r = Structure::par(pick(cs, &a));
                let rb = Structure::par(pick(cs, &b));
                if rb != r.negate() {
                    continue;
                }
                let used: Vec<usize> = a.iter().chain(b.iter()).copied().collect();
                let w = Witness::Interaction { r };
                let p = schema(rule, &w).unwrap().0;
                out.emit(rule, frame_ctx(&used), w, &p);
            }
        }
        RuleId::GDown | RuleId::WgDown => {
            let mut merger = Merger::new();
            for (a, b) in selections(n, true) {
                let r = Structure::par(pick(cs, &a));
                let t = Structure::par(pick(cs, &b));
                let used: Vec<usize> = a.iter().chain(b.iter()).copied().collect();
                let ctx2 = frame_ctx(&used);
                let members: Vec<Structure> = if rule == RuleId::GDown {
                    merger.merge(&r, &t).iter().cloned().collect()
                } else {
                    match merge_weak(&r, &t) {
                        Ok(m) => m.members.into_iter().collect(),
                        Err(_) => continue,
                    }
                };
                for q in members {
                    let w = Witness::Merge { r: r.clone(), t: t.clone(), q: q.clone() };
                    out.emit(rule, ctx2.clone(), w, &q);
                }
            }
        }
        _ => {}
    }
}

fn match_qup(ctx: &Context, cs: &[Structure], out: &mut Out) {
    let n = cs.len();
    for i in 0..n {
        for j in i + 2..=n {
            let ctx2 = ctx.inner(Frame::Seq { before: cs[..i].to_vec(), after: cs[j..].to_vec() });
            for m in i + 1..j {
                let a = Structure::seq(cs[i..m].iter().cloned());
                let b = Structure::seq(cs[m..j].iter().cloned());
                for (r, r2) in copar_splits(&a) {
                    for (t, t2) in copar_splits(&b) {
                        let w = Witness::Quad { r: r.clone(), t, r2: r2.clone(), t2 };
                        let p = schema(RuleId::QUp, &w).unwrap().0;
                        out.emit(RuleId::QUp, ctx2.clone(), w, &p);
                    }
                }
            }
        }
    }
}

fn match_gup(rule: RuleId, s: &Structure, out: &mut Out) {
    let mut merger = Merger::new();
    for (ctx, q) in decompositions(s) {
        let n = q.size();
        if !(2..=20).contains(&n) {
            continue;
        }
        let w = web_of(&q);
        // subsets holding occurrence 0; (R,T) and (T,R) give the same premiss
        for mask in 1u32..(1 << n) {
            if mask & 1 == 0 || mask == (1 << n) - 1 {
                continue;
            }
            let inside: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
            let outside: Vec<usize> = (0..n).filter(|i| mask & (1 << i) == 0).collect();
            let r = reconstruct(&w.restrict(&inside)).expect("restriction of a web");
            let t = reconstruct(&w.restrict(&outside)).expect("restriction of a web");
            let ok = if rule == RuleId::GUp {
                merger.member(&q, &r, &t)
            } else {
                true
            };
            if !ok {
                continue;
            }
            let wit = Witness::Merge { r: r.clone(), t: t.clone(), q: q.clone() };
            let p = Structure::copar2(r, t);
            out.emit(rule, ctx.clone(), wit, &p);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_structure;

    fn p(s: &str) -> Structure {
        parse_structure(s).unwrap()
    }

    fn premiss_strings(s: &str, sys: &System) -> Vec<String> {
        let mut v: Vec<String> = premisses(&p(s), sys).iter().map(|i| i.premiss.to_string()).collect();
        v.sort();
        v
    }

    #[test]
    fn ai_down() {
        let v = premisses(&p("[a,~a]"), &System::bv());
        assert!(v.iter().any(|i| i.rule == RuleId::AiDown && i.premiss.is_unit()));
    }

    #[test]
    fn switch_example() {
        let sys = System::new("s", &[RuleId::S]);
        // the third one is the instance with R = o, which acts as mix
        assert_eq!(premiss_strings("[(a,b),c]", &sys), ["(a,[b,c])", "(a,b,c)", "(b,[a,c])"]);
    }

    #[test]
    fn notable_q_down() {
        let sys = System::new("q", &[RuleId::QDown]);
        assert_eq!(premiss_strings("[a,b]", &sys), ["<a;b>", "<b;a>"]);
        assert!(premisses(&p("<a;b>"), &System::bv()).is_empty());
    }

    #[test]
    fn conclusions_by_duality() {
        let sys = System::new("q", &[RuleId::QUp]);
        let v = conclusions(&p("(<a;c>,b)"), &sys);
        assert!(v.iter().any(|i| i.conclusion == p("<(a,b);c>")));
        let qd = System::new("q", &[RuleId::QDown]);
        assert!(conclusions(&p("<a;b>"), &qd).iter().any(|i| i.conclusion == p("[a,b]")));
        let ai = System::new("ai", &[RuleId::AiDown]);
        assert!(conclusions(&Structure::Unit, &ai)
            .iter()
            .all(|i| i.premiss.is_unit()));
        let opts = MatchOptions { alphabet: Some(vec![Atom::positive("a")]), intro_size: 0 };
        assert!(conclusions_with(&Structure::Unit, &ai, &opts).iter().any(|i| i.conclusion == p("[a,~a]")));
    }

    #[test]
    fn instances_replay() {
        let sys = System::new("all", &ALL_RULES);
        let opts = MatchOptions { alphabet: None, intro_size: 1 };
        for s in ["[a,~a,<b;c>]", "<(a,b);[c,~c]>", "[(a,~b),<b;~a>]"] {
            for inst in premisses_with(&p(s), &sys, &opts) {
                let (pr, co) = inst.replay().unwrap();
                assert_eq!(pr, inst.premiss, "{:?}", inst.rule);
                assert_eq!(co, inst.conclusion);
                assert_eq!(co, p(s));
                assert!(!inst.is_trivial());
            }
        }
    }

    #[test]
    fn system_parsing() {
        assert_eq!(System::parse("BV").unwrap(), System::bv());
        let s = System::parse("q↓,s").unwrap();
        assert!(s.contains(RuleId::QDown) && s.contains(RuleId::S) && s.rules.len() == 2);
        assert!(System::parse("qdown, ai_up").unwrap().contains(RuleId::AiUp));
        assert!(System::parse("zz").is_err());
    }
}
