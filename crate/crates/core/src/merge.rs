//! Merge sets, computed both from the recursive clauses and from webs.

use crate::context::{split_by, submultisets};
use crate::structure::{Atom, Kind, Structure};
use crate::web::{check_axioms, web_of, Rel, WebCandidate};
use rustc_hash::FxHashMap;
use std::collections::BTreeSet;
use std::sync::Arc;
use thiserror::Error;

pub const DEFAULT_BOUND: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MergeError {
    #[error("{occurrences} occurrences exceed the enumeration bound {bound}")]
    TooLarge { occurrences: usize, bound: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MergeSet {
    pub left: Structure,
    pub right: Structure,
    pub members: BTreeSet<Structure>,
}

impl MergeSet {
    pub fn contains(&self, q: &Structure) -> bool {
        self.members.contains(q)
    }
}

fn seq_splits(x: &Structure) -> Vec<(Structure, Structure)> {
    match x {
        Structure::Unit => vec![(Structure::Unit, Structure::Unit)],
        Structure::Seq(cs) => (0..=cs.len())
            .map(|i| (Structure::seq(cs[..i].iter().cloned()), Structure::seq(cs[i..].iter().cloned())))
            .collect(),
        _ => vec![(x.clone(), Structure::Unit), (Structure::Unit, x.clone())],
    }
}

fn proper(a: &Structure, b: &Structure) -> bool {
    !a.is_unit() && !b.is_unit()
}

/// How a member arises from the recursive clauses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MergeStep {
    /// `Q = <R;T>`
    SeqRT,
    /// `Q = <T;R>`
    SeqTR,
    /// `Q = [R,T]`
    Par,
    /// `Q = (R,T)`
    Copar,
    /// `Q = <Q';Q''>` with `Q' ∈ R'⋄T'`, `Q'' ∈ R''⋄T''`.
    Seq {
        q1: Structure,
        q2: Structure,
        r1: Structure,
        r2: Structure,
        t1: Structure,
        t2: Structure,
    },
    /// `R = K(R', kept)`, `Q = K(Q', kept)` with `Q' ∈ R'⋄T`.
    Left { kind: Kind, q1: Structure, r1: Structure, kept: Structure },
    /// `T = K(kept, T'')`, `Q = K(kept, Q'')` with `Q'' ∈ R⋄T''`.
    Right { kind: Kind, q2: Structure, t2: Structure, kept: Structure },
}

/// Memoizing evaluator for the recursive definition.
#[derive(Default)]
pub struct Merger {
    sets: FxHashMap<(Structure, Structure), Arc<BTreeSet<Structure>>>,
    members: FxHashMap<(Structure, Structure, Structure), bool>,
}

impl Merger {
    pub fn new() -> Merger {
        Merger::default()
    }

    pub fn merge(&mut self, r: &Structure, t: &Structure) -> Arc<BTreeSet<Structure>> {
        let key = (r.clone(), t.clone());
        if let Some(s) = self.sets.get(&key) {
            return s.clone();
        }
        let mut out = BTreeSet::new();
        out.insert(Structure::seq2(r.clone(), t.clone()));
        out.insert(Structure::seq2(t.clone(), r.clone()));
        out.insert(Structure::par2(r.clone(), t.clone()));
        out.insert(Structure::copar2(r.clone(), t.clone()));
        for (r1, r2) in seq_splits(r) {
            for (t1, t2) in seq_splits(t) {
                if !(proper(&r1, &r2) || proper(&t1, &t2)) {
                    continue;
                }
                let left = self.merge(&r1, &t1);
                let right = self.merge(&r2, &t2);
                for q1 in left.iter() {
                    for q2 in right.iter() {
                        out.insert(Structure::seq2(q1.clone(), q2.clone()));
                    }
                }
            }
        }
        if let Some((kind, cs)) = r.node().filter(|(k, _)| k.is_commutative()) {
            for pick in submultisets(cs, 1, cs.len() - 1) {
                let (kept, rest) = split_by(cs, &pick);
                let kept = Structure::build(kind, kept);
                let sub = self.merge(&Structure::build(kind, rest), t);
                for q in sub.iter() {
                    out.insert(Structure::build(kind, [q.clone(), kept.clone()]));
                }
            }
        }
        if let Some((kind, cs)) = t.node().filter(|(k, _)| k.is_commutative()) {
            for pick in submultisets(cs, 1, cs.len() - 1) {
                let (kept, rest) = split_by(cs, &pick);
                let kept = Structure::build(kind, kept);
                let sub = self.merge(r, &Structure::build(kind, rest));
                for q in sub.iter() {
                    out.insert(Structure::build(kind, [kept.clone(), q.clone()]));
                }
            }
        }
        let out = Arc::new(out);
        self.sets.insert(key, out.clone());
        out
    }

    pub fn member(&mut self, q: &Structure, r: &Structure, t: &Structure) -> bool {
        let key = (q.clone(), r.clone(), t.clone());
        if let Some(&b) = self.members.get(&key) {
            return b;
        }
        let b = self.explain(q, r, t).is_some();
        self.members.insert(key, b);
        b
    }

    /// The clause witnessing `Q ∈ R⋄T`, if any.
    pub fn explain(&mut self, q: &Structure, r: &Structure, t: &Structure) -> Option<MergeStep> {
        let mut rt = r.atom_multiset();
        rt.extend(t.atoms());
        rt.sort();
        if q.atom_multiset() != rt {
            return None;
        }
        if *q == Structure::seq2(r.clone(), t.clone()) {
            return Some(MergeStep::SeqRT);
        }
        if *q == Structure::seq2(t.clone(), r.clone()) {
            return Some(MergeStep::SeqTR);
        }
        if *q == Structure::par2(r.clone(), t.clone()) {
            return Some(MergeStep::Par);
        }
        if *q == Structure::copar2(r.clone(), t.clone()) {
            return Some(MergeStep::Copar);
        }
        if let Structure::Seq(qs) = q {
            for i in 1..qs.len() {
                let q1 = Structure::seq(qs[..i].iter().cloned());
                let q2 = Structure::seq(qs[i..].iter().cloned());
                let m1 = q1.atom_multiset();
                for (r1, r2) in seq_splits(r) {
                    for (t1, t2) in seq_splits(t) {
                        if !(proper(&r1, &r2) || proper(&t1, &t2)) {
                            continue;
                        }
                        let mut rt1 = r1.atom_multiset();
                        rt1.extend(t1.atoms());
                        rt1.sort();
                        if rt1 != m1 {
                            continue;
                        }
                        if self.member(&q1, &r1, &t1) && self.member(&q2, &r2, &t2) {
                            return Some(MergeStep::Seq { q1, q2, r1, r2, t1, t2 });
                        }
                    }
                }
            }
        }
        let (qk, qs) = q.node()?;
        if !qk.is_commutative() {
            return None;
        }
        if let Some((rk, rs)) = r.node() {
            if rk == qk {
                for pick in submultisets(rs, 1, rs.len() - 1) {
                    let (kept, rest) = split_by(rs, &pick);
                    if let Some(qrest) = remove_all(qs, &kept) {
                        let q1 = Structure::build(qk, qrest);
                        let r1 = Structure::build(qk, rest);
                        if self.member(&q1, &r1, t) {
                            let kept = Structure::build(qk, kept);
                            return Some(MergeStep::Left { kind: qk, q1, r1, kept });
                        }
                    }
                }
            }
        }
        if let Some((tk, ts)) = t.node() {
            if tk == qk {
                for pick in submultisets(ts, 1, ts.len() - 1) {
                    let (kept, rest) = split_by(ts, &pick);
                    if let Some(qrest) = remove_all(qs, &kept) {
                        let q2 = Structure::build(qk, qrest);
                        let t2 = Structure::build(qk, rest);
                        if self.member(&q2, r, &t2) {
                            let kept = Structure::build(qk, kept);
                            return Some(MergeStep::Right { kind: qk, q2, t2, kept });
                        }
                    }
                }
            }
        }
        None
    }
}

/// `xs` minus the multiset `ys`, if `ys` is contained in it.
fn remove_all(xs: &[Structure], ys: &[Structure]) -> Option<Vec<Structure>> {
    let mut rest = xs.to_vec();
    for y in ys {
        let i = rest.iter().position(|x| x == y)?;
        rest.remove(i);
    }
    Some(rest)
}

pub fn merge_recursive(r: &Structure, t: &Structure) -> MergeSet {
    let members = Merger::new().merge(r, t).as_ref().clone();
    MergeSet { left: r.clone(), right: t.clone(), members }
}

pub fn merge_member(q: &Structure, r: &Structure, t: &Structure) -> bool {
    Merger::new().member(q, r, t)
}

/// Index-labelled tree used by the semantic enumeration.
#[derive(Clone, Debug)]
enum Shape {
    Leaf(usize),
    Node(Kind, Vec<Shape>),
}

impl Shape {
    fn kind(&self) -> Option<Kind> {
        match self {
            Shape::Leaf(_) => None,
            Shape::Node(k, _) => Some(*k),
        }
    }

    fn join(kind: Kind, head: &Shape, tail: &Shape) -> Shape {
        let mut v = vec![head.clone()];
        match tail {
            Shape::Node(k, cs) if *k == kind => v.extend(cs.iter().cloned()),
            _ => v.push(tail.clone()),
        }
        Shape::Node(kind, v)
    }

    fn leaves(&self, out: &mut Vec<usize>) {
        match self {
            Shape::Leaf(i) => out.push(*i),
            Shape::Node(_, cs) => cs.iter().for_each(|c| c.leaves(out)),
        }
    }

    fn relations(&self, n: usize, rel: &mut Vec<Option<Rel>>) {
        if let Shape::Node(k, cs) = self {
            let groups: Vec<Vec<usize>> = cs
                .iter()
                .map(|c| {
                    let mut v = Vec::new();
                    c.leaves(&mut v);
                    v
                })
                .collect();
            for x in 0..groups.len() {
                for y in x + 1..groups.len() {
                    for &i in &groups[x] {
                        for &j in &groups[y] {
                            let (a, b) = match k {
                                Kind::Seq => (Rel::Before, Rel::After),
                                Kind::Par => (Rel::Par, Rel::Par),
                                Kind::Copar => (Rel::Copar, Rel::Copar),
                            };
                            rel[i * n + j] = Some(a);
                            rel[j * n + i] = Some(b);
                        }
                    }
                }
            }
            cs.iter().for_each(|c| c.relations(n, rel));
        }
    }

    fn to_structure(&self, atoms: &[Atom]) -> Structure {
        match self {
            Shape::Leaf(i) => Structure::Atom(atoms[*i].clone()),
            Shape::Node(k, cs) => Structure::build(*k, cs.iter().map(|c| c.to_structure(atoms))),
        }
    }
}

/// Generates every shape over a set of labelled leaves whose pair relations
/// agree with a partial prescription.
struct Constrained<'a> {
    n: usize,
    fixed: &'a [Option<Rel>],
    memo: FxHashMap<u32, Arc<Vec<Shape>>>,
}

impl<'a> Constrained<'a> {
    fn allowed(&self, i: usize, j: usize, r: Rel) -> bool {
        match self.fixed[i * self.n + j] {
            None => true,
            Some(f) => f == r,
        }
    }

    fn cross_ok(&self, a: u32, b: u32, r: Rel) -> bool {
        bits(a).all(|i| bits(b).all(|j| self.allowed(i, j, r)))
    }

    fn all(&mut self, set: u32) -> Arc<Vec<Shape>> {
        if let Some(v) = self.memo.get(&set) {
            return v.clone();
        }
        let mut out = Vec::new();
        if set.count_ones() == 1 {
            out.push(Shape::Leaf(set.trailing_zeros() as usize));
        } else {
            let low = set & set.wrapping_neg();
            for kind in [Kind::Seq, Kind::Par, Kind::Copar] {
                let rel = match kind {
                    Kind::Seq => Rel::Before,
                    Kind::Par => Rel::Par,
                    Kind::Copar => Rel::Copar,
                };
                // nonempty proper subsets as the first block
                let mut sub = (set - 1) & set;
                while sub != 0 {
                    let first = sub;
                    sub = (sub - 1) & set;
                    if kind != Kind::Seq && first & low == 0 {
                        continue;
                    }
                    let rest = set & !first;
                    if !self.cross_ok(first, rest, rel) {
                        continue;
                    }
                    let heads: Vec<Shape> =
                        self.all(first).iter().filter(|s| s.kind() != Some(kind)).cloned().collect();
                    if heads.is_empty() {
                        continue;
                    }
                    let tails = self.all(rest);
                    for h in &heads {
                        for t in tails.iter() {
                            out.push(Shape::join(kind, h, t));
                        }
                    }
                }
            }
        }
        let out = Arc::new(out);
        self.memo.insert(set, out.clone());
        out
    }
}

fn bits(x: u32) -> impl Iterator<Item = usize> {
    (0..32).filter(move |i| x & (1 << i) != 0)
}

fn m2_holds(rel: &[Option<Rel>], n: usize, m: usize, want: Rel) -> bool {
    let r = |i: usize, j: usize| rel[i * n + j] == Some(want);
    for a in 0..m {
        for b in 0..m {
            if a == b || !r(a, b) {
                continue;
            }
            for c in m..n {
                if !r(b, c) {
                    continue;
                }
                for d in m..n {
                    if c == d || !r(c, d) || !r(a, d) {
                        continue;
                    }
                    if !(r(a, c) || r(b, d)) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

fn semantic(r: &Structure, t: &Structure, bound: usize, integrity: bool) -> Result<MergeSet, MergeError> {
    let mut atoms = r.atoms();
    let m = atoms.len();
    atoms.extend(t.atoms());
    let n = atoms.len();
    if n > bound || n > 31 {
        return Err(MergeError::TooLarge { occurrences: n, bound });
    }
    let mut members = BTreeSet::new();
    if n == 0 {
        members.insert(Structure::Unit);
        return Ok(MergeSet { left: r.clone(), right: t.clone(), members });
    }
    let wr = web_of(r);
    let wt = web_of(t);
    let mut fixed = vec![None; n * n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            if i < m && j < m {
                fixed[i * n + j] = wr.rel(i, j);
            } else if i >= m && j >= m {
                fixed[i * n + j] = wt.rel(i - m, j - m);
            }
        }
    }
    let mut gen = Constrained { n, fixed: &fixed, memo: FxHashMap::default() };
    let full = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    for shape in gen.all(full).iter() {
        if integrity {
            let mut rel = vec![None; n * n];
            shape.relations(n, &mut rel);
            if !m2_holds(&rel, n, m, Rel::Par) || !m2_holds(&rel, n, m, Rel::Copar) {
                continue;
            }
        }
        members.insert(shape.to_structure(&atoms));
    }
    Ok(MergeSet { left: r.clone(), right: t.clone(), members })
}

/// Every structure on the combined occurrences in which both arguments are
/// immersed and the integrity condition holds.
pub fn merge_semantic(r: &Structure, t: &Structure) -> Result<MergeSet, MergeError> {
    semantic(r, t, DEFAULT_BOUND, true)
}

pub fn merge_semantic_bounded(r: &Structure, t: &Structure, bound: usize) -> Result<MergeSet, MergeError> {
    semantic(r, t, bound, true)
}

/// The merge set without the integrity condition.
pub fn merge_weak(r: &Structure, t: &Structure) -> Result<MergeSet, MergeError> {
    semantic(r, t, DEFAULT_BOUND, false)
}

/// Second oracle: every assignment of relations to the cross pairs, kept
/// when the resulting candidate satisfies the web axioms and the integrity
/// condition.
pub fn merge_semantic_webs(r: &Structure, t: &Structure, bound: usize) -> Result<MergeSet, MergeError> {
    let mut atoms = r.atoms();
    let m = atoms.len();
    atoms.extend(t.atoms());
    let n = atoms.len();
    let cross = m * (n - m);
    if cross > bound {
        return Err(MergeError::TooLarge { occurrences: n, bound });
    }
    let wr = web_of(r);
    let wt = web_of(t);
    let mut members = BTreeSet::new();
    let choices = [Rel::Before, Rel::After, Rel::Par, Rel::Copar];
    for code in 0..(1u64 << (2 * cross)) {
        let mut w = WebCandidate::new(atoms.clone());
        for i in 0..m {
            for j in 0..m {
                if i < j {
                    w.set(i, j, wr.rel(i, j).unwrap());
                }
            }
        }
        for i in 0..n - m {
            for j in 0..n - m {
                if i < j {
                    w.set(m + i, m + j, wt.rel(i, j).unwrap());
                }
            }
        }
        let mut c = code;
        for i in 0..m {
            for j in m..n {
                w.set(i, j, choices[(c & 3) as usize]);
                c >>= 2;
            }
        }
        if !check_axioms(&w).passes() {
            continue;
        }
        let mut rel = vec![None; n * n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    rel[i * n + j] = w.rel(i, j);
                }
            }
        }
        if !m2_holds(&rel, n, m, Rel::Par) || !m2_holds(&rel, n, m, Rel::Copar) {
            continue;
        }
        members.insert(crate::web::reconstruct(&w).expect("axioms checked"));
    }
    if n == 0 {
        members.insert(Structure::Unit);
    }
    Ok(MergeSet { left: r.clone(), right: t.clone(), members })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_structure;

    fn p(s: &str) -> Structure {
        parse_structure(s).unwrap()
    }

    fn strings(m: &MergeSet) -> Vec<String> {
        m.members.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn atoms() {
        let m = merge_recursive(&p("a"), &p("b"));
        assert_eq!(strings(&m), ["<a;b>", "<b;a>", "[a,b]", "(a,b)"]);
        assert_eq!(merge_semantic(&p("a"), &p("b")).unwrap().members, m.members);
    }

    #[test]
    fn exclusion_witnesses() {
        let (r, t) = (p("[a,b]"), p("[c,d]"));
        let rec = merge_recursive(&r, &t);
        assert!(!rec.contains(&p("[<a;c>,<b;d>]")));
        assert!(rec.contains(&p("[a,<b;c>,d]")));
        assert!(rec.contains(&p("[<[a,b];c>,d]")));
        assert!(!merge_member(&p("[<a;c>,<b;d>]"), &r, &t));
        let sem = merge_semantic(&r, &t).unwrap();
        assert_eq!(sem.members, rec.members);
        let (r, t) = (p("(a,b)"), p("(c,d)"));
        assert!(!merge_semantic(&r, &t).unwrap().contains(&p("([a,c],[b,d])")));
        assert!(!merge_recursive(&r, &t).contains(&p("([a,c],[b,d])")));
    }

    #[test]
    fn units() {
        let r = p("<a;[b,c]>");
        assert_eq!(strings(&merge_recursive(&r, &Structure::Unit)), [r.to_string()]);
        assert_eq!(strings(&merge_semantic(&Structure::Unit, &Structure::Unit).unwrap()), ["o"]);
    }

    #[test]
    fn non_associativity() {
        let q = p("([a,c],[b,d])");
        let mut m = Merger::new();
        let inner = m.merge(&p("b"), &p("(c,d)"));
        assert!(inner.iter().any(|x| m.member(&q, &p("a"), x)));
        let ab = m.merge(&p("a"), &p("b"));
        assert!(!ab.iter().any(|x| m.member(&q, x, &p("(c,d)"))));
    }

    #[test]
    fn web_oracle_agrees() {
        for (r, t) in [("a", "[b,c]"), ("<a;b>", "c"), ("[a,b]", "(c,d)")] {
            let (r, t) = (p(r), p(t));
            let a = merge_semantic_webs(&r, &t, 9).unwrap();
            assert_eq!(a.members, merge_recursive(&r, &t).members);
        }
    }

    #[test]
    fn guard() {
        let big = p("[a,b,c,d,e]");
        assert!(merge_semantic(&big, &big).is_err());
    }
}
