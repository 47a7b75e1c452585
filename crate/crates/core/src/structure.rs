//! Structures in canonical normal form.
//!
//! Every value of [`Structure`] is kept canonical by its constructors: nested
//! nodes of the same kind are flattened, units are dropped, singletons
//! collapse, and par/copar children are sorted under the total order below.
//! Canonical equality is therefore plain structural equality.

use smol_str::SmolStr;
use std::cmp::Ordering;
use std::fmt;
use std::ops::Deref;
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Polarity {
    Positive,
    Negative,
}

impl Polarity {
    pub fn flip(self) -> Polarity {
        match self {
            Polarity::Positive => Polarity::Negative,
            Polarity::Negative => Polarity::Positive,
        }
    }
}

/// A polarized atom. Ordered by name, then positive before negative.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    name: SmolStr,
    polarity: Polarity,
}

impl Atom {
    pub fn new(name: impl Into<SmolStr>, polarity: Polarity) -> Atom {
        Atom { name: name.into(), polarity }
    }

    pub fn positive(name: impl Into<SmolStr>) -> Atom {
        Atom::new(name, Polarity::Positive)
    }

    pub fn negative(name: impl Into<SmolStr>) -> Atom {
        Atom::new(name, Polarity::Negative)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn polarity(&self) -> Polarity {
        self.polarity
    }

    pub fn is_positive(&self) -> bool {
        self.polarity == Polarity::Positive
    }

    pub fn dual(&self) -> Atom {
        Atom { name: self.name.clone(), polarity: self.polarity.flip() }
    }

    pub fn is_dual_of(&self, other: &Atom) -> bool {
        self.name == other.name && self.polarity != other.polarity
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.polarity {
            Polarity::Positive => write!(f, "{}", self.name),
            Polarity::Negative => write!(f, "~{}", self.name),
        }
    }
}

/// The three structural connectives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kind {
    Seq,
    Par,
    Copar,
}

impl Kind {
    /// Par and copar swap under negation, seq is self-dual.
    pub fn dual(self) -> Kind {
        match self {
            Kind::Seq => Kind::Seq,
            Kind::Par => Kind::Copar,
            Kind::Copar => Kind::Par,
        }
    }

    pub fn is_commutative(self) -> bool {
        self != Kind::Seq
    }
}

/// Children of a composite node. Always at least two, never a unit and never
/// a node of the parent's kind.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Children(Arc<[Structure]>);

impl Deref for Children {
    type Target = [Structure];
    fn deref(&self) -> &[Structure] {
        &self.0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Structure {
    Unit,
    Atom(Atom),
    Seq(Children),
    Par(Children),
    Copar(Children),
}

impl Structure {
    pub fn atom(a: Atom) -> Structure {
        Structure::Atom(a)
    }

    pub fn pos(name: &str) -> Structure {
        Structure::Atom(Atom::positive(name))
    }

    pub fn neg(name: &str) -> Structure {
        Structure::Atom(Atom::negative(name))
    }

    /// Builds a node of the given kind from arbitrary canonical parts,
    /// restoring the canonical form.
    pub fn build<I>(kind: Kind, items: I) -> Structure
    where
        I: IntoIterator<Item = Structure>,
    {
        let mut v: Vec<Structure> = Vec::new();
        for item in items {
            match item {
                Structure::Unit => {}
                s => match s.node() {
                    Some((k, cs)) if k == kind => v.extend(cs.iter().cloned()),
                    _ => v.push(s),
                },
            }
        }
        match v.len() {
            0 => Structure::Unit,
            1 => v.pop().unwrap(),
            _ => {
                if kind.is_commutative() {
                    v.sort_unstable();
                }
                let cs = Children(v.into());
                match kind {
                    Kind::Seq => Structure::Seq(cs),
                    Kind::Par => Structure::Par(cs),
                    Kind::Copar => Structure::Copar(cs),
                }
            }
        }
    }

    pub fn seq<I: IntoIterator<Item = Structure>>(items: I) -> Structure {
        Structure::build(Kind::Seq, items)
    }

    pub fn par<I: IntoIterator<Item = Structure>>(items: I) -> Structure {
        Structure::build(Kind::Par, items)
    }

    pub fn copar<I: IntoIterator<Item = Structure>>(items: I) -> Structure {
        Structure::build(Kind::Copar, items)
    }

    pub fn seq2(a: Structure, b: Structure) -> Structure {
        Structure::seq([a, b])
    }

    pub fn par2(a: Structure, b: Structure) -> Structure {
        Structure::par([a, b])
    }

    pub fn copar2(a: Structure, b: Structure) -> Structure {
        Structure::copar([a, b])
    }

    pub fn is_unit(&self) -> bool {
        matches!(self, Structure::Unit)
    }

    pub fn as_atom(&self) -> Option<&Atom> {
        match self {
            Structure::Atom(a) => Some(a),
            _ => None,
        }
    }

    /// Kind and children of a composite node.
    pub fn node(&self) -> Option<(Kind, &[Structure])> {
        match self {
            Structure::Seq(cs) => Some((Kind::Seq, cs)),
            Structure::Par(cs) => Some((Kind::Par, cs)),
            Structure::Copar(cs) => Some((Kind::Copar, cs)),
            _ => None,
        }
    }

    pub fn kind(&self) -> Option<Kind> {
        self.node().map(|(k, _)| k)
    }

    /// Children when viewed as a node of kind `kind`: the node's children if
    /// it has that kind, the structure itself otherwise, nothing for the unit.
    pub fn parts(&self, kind: Kind) -> Vec<Structure> {
        match self.node() {
            Some((k, cs)) if k == kind => cs.to_vec(),
            _ if self.is_unit() => Vec::new(),
            _ => vec![self.clone()],
        }
    }

    pub fn is_proper_seq(&self) -> bool {
        matches!(self, Structure::Seq(_))
    }

    pub fn is_proper_par(&self) -> bool {
        matches!(self, Structure::Par(_))
    }

    pub fn is_proper_copar(&self) -> bool {
        matches!(self, Structure::Copar(_))
    }

    /// Number of atom occurrences.
    pub fn size(&self) -> usize {
        match self {
            Structure::Unit => 0,
            Structure::Atom(_) => 1,
            Structure::Seq(cs) | Structure::Par(cs) | Structure::Copar(cs) => {
                cs.iter().map(Structure::size).sum()
            }
        }
    }

    pub fn negate(&self) -> Structure {
        match self {
            Structure::Unit => Structure::Unit,
            Structure::Atom(a) => Structure::Atom(a.dual()),
            Structure::Seq(cs) => Structure::seq(cs.iter().map(Structure::negate)),
            Structure::Par(cs) => Structure::copar(cs.iter().map(Structure::negate)),
            Structure::Copar(cs) => Structure::par(cs.iter().map(Structure::negate)),
        }
    }

    /// Atoms in canonical left-to-right order.
    pub fn atoms(&self) -> Vec<Atom> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut Vec<Atom>) {
        match self {
            Structure::Unit => {}
            Structure::Atom(a) => out.push(a.clone()),
            Structure::Seq(cs) | Structure::Par(cs) | Structure::Copar(cs) => {
                for c in cs.iter() {
                    c.collect_atoms(out);
                }
            }
        }
    }

    pub fn occurrences(&self) -> Vec<Occurrence> {
        self.atoms()
            .into_iter()
            .enumerate()
            .map(|(index, atom)| Occurrence { index, atom })
            .collect()
    }

    /// Sorted multiset of atoms.
    pub fn atom_multiset(&self) -> Vec<Atom> {
        let mut v = self.atoms();
        v.sort();
        v
    }

    /// True when no seq node occurs.
    pub fn is_flat(&self) -> bool {
        match self {
            Structure::Unit | Structure::Atom(_) => true,
            Structure::Seq(_) => false,
            Structure::Par(cs) | Structure::Copar(cs) => cs.iter().all(Structure::is_flat),
        }
    }

    /// Checks the canonical-form invariants. Values built through the public
    /// constructors always satisfy them.
    pub fn is_canonical(&self) -> bool {
        match self.node() {
            None => true,
            Some((k, cs)) => {
                cs.len() >= 2
                    && cs.iter().all(|c| !c.is_unit() && c.kind() != Some(k) && c.is_canonical())
                    && (!k.is_commutative() || cs.windows(2).all(|w| w[0] <= w[1]))
            }
        }
    }

    /// Applies `f` to every atom and rebuilds canonically.
    pub fn map_atoms(&self, f: &mut impl FnMut(&Atom) -> Structure) -> Structure {
        match self {
            Structure::Unit => Structure::Unit,
            Structure::Atom(a) => f(a),
            Structure::Seq(cs) | Structure::Par(cs) | Structure::Copar(cs) => {
                let k = self.kind().unwrap();
                let mapped: Vec<Structure> = cs.iter().map(|c| c.map_atoms(f)).collect();
                Structure::build(k, mapped)
            }
        }
    }

    fn rank(&self) -> u8 {
        match self {
            Structure::Unit => 0,
            Structure::Atom(_) => 1,
            Structure::Seq(_) => 2,
            Structure::Par(_) => 3,
            Structure::Copar(_) => 4,
        }
    }
}

impl PartialOrd for Structure {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Structure {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.rank().cmp(&other.rank()) {
            Ordering::Equal => {}
            o => return o,
        }
        match (self, other) {
            (Structure::Unit, Structure::Unit) => Ordering::Equal,
            (Structure::Atom(a), Structure::Atom(b)) => a.cmp(b),
            _ => {
                let (_, xs) = self.node().unwrap();
                let (_, ys) = other.node().unwrap();
                xs.len().cmp(&ys.len()).then_with(|| xs.cmp(ys))
            }
        }
    }
}

impl fmt::Display for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Structure::Unit => write!(f, "o"),
            Structure::Atom(a) => write!(f, "{a}"),
            Structure::Seq(cs) => write_list(f, "<", ";", ">", cs),
            Structure::Par(cs) => write_list(f, "[", ",", "]", cs),
            Structure::Copar(cs) => write_list(f, "(", ",", ")", cs),
        }
    }
}

fn write_list(
    f: &mut fmt::Formatter<'_>,
    open: &str,
    sep: &str,
    close: &str,
    cs: &[Structure],
) -> fmt::Result {
    write!(f, "{open}")?;
    for (i, c) in cs.iter().enumerate() {
        if i > 0 {
            write!(f, "{sep}")?;
        }
        write!(f, "{c}")?;
    }
    write!(f, "{close}")
}

impl From<Atom> for Structure {
    fn from(a: Atom) -> Structure {
        Structure::Atom(a)
    }
}

/// An atom together with its position in the canonical traversal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Occurrence {
    pub index: usize,
    pub atom: Atom,
}

impl fmt::Display for Occurrence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.atom, self.index)
    }
}

/// A term that need not be in normal form: any arity, negation anywhere.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Term {
    Unit,
    Atom(Atom),
    Seq(Vec<Term>),
    Par(Vec<Term>),
    Copar(Vec<Term>),
    Neg(Box<Term>),
}

impl Term {
    pub fn neg(t: Term) -> Term {
        Term::Neg(Box::new(t))
    }

    pub fn canonicalize(&self) -> Structure {
        canon(self, false)
    }
}

fn canon(t: &Term, negated: bool) -> Structure {
    let node = |k: Kind, ts: &[Term]| {
        let k = if negated { k.dual() } else { k };
        Structure::build(k, ts.iter().map(|t| canon(t, negated)))
    };
    match t {
        Term::Unit => Structure::Unit,
        Term::Atom(a) => Structure::Atom(if negated { a.dual() } else { a.clone() }),
        Term::Seq(ts) => node(Kind::Seq, ts),
        Term::Par(ts) => node(Kind::Par, ts),
        Term::Copar(ts) => node(Kind::Copar, ts),
        Term::Neg(t) => canon(t, !negated),
    }
}

pub fn canonicalize(t: &Term) -> Structure {
    t.canonicalize()
}

pub fn equivalent(s: &Structure, t: &Structure) -> bool {
    s == t
}

impl From<&Structure> for Term {
    fn from(s: &Structure) -> Term {
        match s {
            Structure::Unit => Term::Unit,
            Structure::Atom(a) => Term::Atom(a.clone()),
            Structure::Seq(cs) => Term::Seq(cs.iter().map(Term::from).collect()),
            Structure::Par(cs) => Term::Par(cs.iter().map(Term::from).collect()),
            Structure::Copar(cs) => Term::Copar(cs.iter().map(Term::from).collect()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a() -> Structure {
        Structure::pos("a")
    }
    fn b() -> Structure {
        Structure::pos("b")
    }

    #[test]
    fn unit_law_and_singletons() {
        let s = Structure::par([a(), Structure::Unit, b()]);
        assert_eq!(s.to_string(), "[a,b]");
        assert_eq!(Structure::copar([Structure::Unit, a()]), a());
        assert_eq!(Structure::seq([]), Structure::Unit);
    }

    #[test]
    fn flattening() {
        let inner = Structure::par([a(), b()]);
        let s = Structure::par([inner, Structure::pos("c")]);
        assert_eq!(s.to_string(), "[a,b,c]");
        let q = Structure::seq([Structure::seq([a(), b()]), a()]);
        assert_eq!(q.to_string(), "<a;b;a>");
    }

    #[test]
    fn order_of_children() {
        let s = Structure::par([
            Structure::copar([a(), b()]),
            Structure::seq([b(), a()]),
            Structure::neg("a"),
            a(),
        ]);
        assert_eq!(s.to_string(), "[a,~a,<b;a>,(a,b)]");
    }

    #[test]
    fn negation() {
        let t = Term::neg(Term::Par(vec![Term::Atom(Atom::positive("a")), Term::Atom(Atom::positive("b"))]));
        assert_eq!(t.canonicalize().to_string(), "(~a,~b)");
        let t = Term::neg(Term::Seq(vec![Term::Atom(Atom::positive("a")), Term::Atom(Atom::positive("b"))]));
        assert_eq!(t.canonicalize().to_string(), "<~a;~b>");
        let s = Structure::seq([a(), Structure::copar([b(), Structure::pos("c")])]);
        assert_eq!(s.negate().to_string(), "<~a;[~b,~c]>");
        assert_eq!(Structure::Unit.negate(), Structure::Unit);
        assert_eq!(Structure::copar([a(), Structure::neg("b")]).negate().to_string(), "[~a,b]");
    }

    #[test]
    fn occurrences_follow_canonical_order() {
        let s = Structure::seq([a(), a()]);
        let occ = s.occurrences();
        assert_eq!(occ.len(), 2);
        assert_eq!(occ[1].to_string(), "a@1");
        assert!(Structure::Unit.occurrences().is_empty());
        let c = Structure::copar([b(), Structure::neg("a")]);
        let names: Vec<String> = c.occurrences().iter().map(|o| o.to_string()).collect();
        assert_eq!(names, ["~a@0", "b@1"]);
    }

    #[test]
    fn equivalence_examples() {
        let l = Structure::par([a(), Structure::Unit, b()]);
        let r = Structure::par([b(), a()]);
        assert!(equivalent(&l, &r));
        assert!(!equivalent(&Structure::seq([a(), b()]), &Structure::seq([b(), a()])));
        assert!(equivalent(&Structure::copar([Structure::Unit, a()]), &a()));
    }
}
