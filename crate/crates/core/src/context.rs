//! Structure contexts and the enumeration of decompositions.

use crate::structure::{Kind, Structure};
use std::fmt;

/// One layer between the hole and the root.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Frame {
    Seq { before: Vec<Structure>, after: Vec<Structure> },
    Par(Vec<Structure>),
    Copar(Vec<Structure>),
}

impl Frame {
    pub fn commutative(kind: Kind, siblings: Vec<Structure>) -> Frame {
        match kind {
            Kind::Par => Frame::Par(siblings),
            Kind::Copar => Frame::Copar(siblings),
            Kind::Seq => Frame::Seq { before: siblings, after: Vec::new() },
        }
    }

    pub fn kind(&self) -> Kind {
        match self {
            Frame::Seq { .. } => Kind::Seq,
            Frame::Par(_) => Kind::Par,
            Frame::Copar(_) => Kind::Copar,
        }
    }

    pub fn wrap(&self, x: Structure) -> Structure {
        match self {
            Frame::Seq { before, after } => {
                Structure::seq(before.iter().cloned().chain([x]).chain(after.iter().cloned()))
            }
            Frame::Par(sib) => Structure::par(sib.iter().cloned().chain([x])),
            Frame::Copar(sib) => Structure::copar(sib.iter().cloned().chain([x])),
        }
    }

    fn is_empty(&self) -> bool {
        match self {
            Frame::Seq { before, after } => {
                before.iter().all(Structure::is_unit) && after.iter().all(Structure::is_unit)
            }
            Frame::Par(s) | Frame::Copar(s) => s.iter().all(Structure::is_unit),
        }
    }

    fn negate(&self) -> Frame {
        let neg = |v: &Vec<Structure>| v.iter().map(Structure::negate).collect();
        match self {
            Frame::Seq { before, after } => Frame::Seq { before: neg(before), after: neg(after) },
            Frame::Par(s) => Frame::Copar(neg(s)),
            Frame::Copar(s) => Frame::Par(neg(s)),
        }
    }
}

/// A structure with one hole. Frames are stored outermost first.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Context {
    frames: Vec<Frame>,
}

impl Context {
    pub fn hole() -> Context {
        Context { frames: Vec::new() }
    }

    pub fn from_frames(frames: Vec<Frame>) -> Context {
        Context { frames }.normalized()
    }

    pub fn frames(&self) -> &[Frame] {
        &self.frames
    }

    pub fn is_hole(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn plug(&self, x: &Structure) -> Structure {
        let mut cur = x.clone();
        for f in self.frames.iter().rev() {
            cur = f.wrap(cur);
        }
        cur
    }

    /// Adds a frame just around the hole.
    pub fn inner(&self, f: Frame) -> Context {
        let mut frames = self.frames.clone();
        frames.push(f);
        Context { frames }.normalized()
    }

    /// The context `outer{self{ }}`.
    pub fn within(&self, outer: &Context) -> Context {
        let mut frames = outer.frames.clone();
        frames.extend(self.frames.iter().cloned());
        Context { frames }.normalized()
    }

    pub fn negate(&self) -> Context {
        Context { frames: self.frames.iter().map(Frame::negate).collect() }
    }

    /// Splits off the outermost frame.
    pub fn split_outer(&self) -> Option<(Frame, Context)> {
        let (first, rest) = self.frames.split_first()?;
        Some((first.clone(), Context { frames: rest.to_vec() }))
    }

    /// `[{ }, P]` for a structure `P`.
    pub fn par_with(p: &Structure) -> Context {
        Context::hole().inner(Frame::Par(vec![p.clone()]))
    }

    pub fn copar_with(p: &Structure) -> Context {
        Context::hole().inner(Frame::Copar(vec![p.clone()]))
    }

    /// `<{ }; P>`.
    pub fn seq_before(p: &Structure) -> Context {
        Context::hole().inner(Frame::Seq { before: Vec::new(), after: vec![p.clone()] })
    }

    /// `<P; { }>`.
    pub fn seq_after(p: &Structure) -> Context {
        Context::hole().inner(Frame::Seq { before: vec![p.clone()], after: Vec::new() })
    }

    /// Kind of `S{X}` for any `X` other than the unit, if it is proper.
    pub fn proper_kind(&self) -> Option<Kind> {
        self.frames.first().map(Frame::kind)
    }

    pub fn is_proper_seq(&self) -> bool {
        self.proper_kind() == Some(Kind::Seq)
    }

    pub fn is_proper_par(&self) -> bool {
        self.proper_kind() == Some(Kind::Par)
    }

    pub fn is_proper_copar(&self) -> bool {
        self.proper_kind() == Some(Kind::Copar)
    }

    /// Restores the normal form of the frame list: sibling lists are
    /// flattened and sorted, empty frames vanish, and adjacent frames of one
    /// kind merge.
    fn normalized(self) -> Context {
        let mut out: Vec<Frame> = Vec::with_capacity(self.frames.len());
        for f in self.frames {
            let f = normalize_frame(f);
            if f.is_empty() {
                continue;
            }
            match (out.last_mut(), f) {
                (Some(Frame::Par(a)), Frame::Par(b)) | (Some(Frame::Copar(a)), Frame::Copar(b)) => {
                    a.extend(b);
                    a.sort_unstable();
                }
                (Some(Frame::Seq { before: b0, after: a0 }), Frame::Seq { before, after }) => {
                    b0.extend(before);
                    let mut na = after;
                    na.append(a0);
                    *a0 = na;
                }
                (_, f) => out.push(f),
            }
        }
        Context { frames: out }
    }
}

fn normalize_frame(f: Frame) -> Frame {
    let flat = |k: Kind, v: Vec<Structure>| -> Vec<Structure> {
        let mut out: Vec<Structure> = v.iter().flat_map(|s| s.parts(k)).collect();
        if k.is_commutative() {
            out.sort_unstable();
        }
        out
    };
    match f {
        Frame::Seq { before, after } => {
            Frame::Seq { before: flat(Kind::Seq, before), after: flat(Kind::Seq, after) }
        }
        Frame::Par(s) => Frame::Par(flat(Kind::Par, s)),
        Frame::Copar(s) => Frame::Copar(flat(Kind::Copar, s)),
    }
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut cur = "{}".to_string();
        for fr in self.frames.iter().rev() {
            let join = |v: &[Structure]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
            cur = match fr {
                Frame::Seq { before, after } => {
                    let mut parts = join(before);
                    parts.push(cur);
                    parts.extend(join(after));
                    format!("<{}>", parts.join(";"))
                }
                Frame::Par(s) => {
                    let mut parts = vec![cur];
                    parts.extend(join(s));
                    format!("[{}]", parts.join(","))
                }
                Frame::Copar(s) => {
                    let mut parts = vec![cur];
                    parts.extend(join(s));
                    format!("({})", parts.join(","))
                }
            };
        }
        write!(f, "{cur}")
    }
}

/// Index subsets of a sorted child list, one per distinct sub-multiset.
/// Within every run of equal children only prefixes of the run are chosen.
pub(crate) fn submultisets(cs: &[Structure], min: usize, max: usize) -> Vec<Vec<usize>> {
    let n = cs.len();
    let mut out = Vec::new();
    for mask in 0u32..(1u32 << n) {
        let k = mask.count_ones() as usize;
        if k < min || k > max {
            continue;
        }
        let ok = (1..n).all(|i| {
            let chosen = mask & (1 << i) != 0;
            let prev_chosen = mask & (1 << (i - 1)) != 0;
            !(chosen && !prev_chosen && cs[i] == cs[i - 1])
        });
        if ok {
            out.push((0..n).filter(|i| mask & (1 << i) != 0).collect());
        }
    }
    out
}

pub(crate) fn split_by(cs: &[Structure], pick: &[usize]) -> (Vec<Structure>, Vec<Structure>) {
    let mut inside = Vec::with_capacity(pick.len());
    let mut rest = Vec::with_capacity(cs.len() - pick.len());
    let mut j = 0;
    for (i, c) in cs.iter().enumerate() {
        if j < pick.len() && pick[j] == i {
            inside.push(c.clone());
            j += 1;
        } else {
            rest.push(c.clone());
        }
    }
    (inside, rest)
}

/// Every `(C, R)` with `C{R} = S` and `R` not the unit, up to equivalence.
pub fn decompositions(s: &Structure) -> Vec<(Context, Structure)> {
    let mut out = Vec::new();
    if !s.is_unit() {
        walk(s, &Context::hole(), &mut out);
    }
    out
}

fn walk(node: &Structure, ctx: &Context, out: &mut Vec<(Context, Structure)>) {
    out.push((ctx.clone(), node.clone()));
    let Some((kind, cs)) = node.node() else { return };
    match kind {
        Kind::Par | Kind::Copar => {
            for pick in submultisets(cs, 1, cs.len() - 1) {
                let (inside, rest) = split_by(cs, &pick);
                let inner = ctx.inner(Frame::commutative(kind, rest));
                if inside.len() == 1 {
                    walk(&inside[0], &inner, out);
                } else {
                    out.push((inner, Structure::build(kind, inside)));
                }
            }
        }
        Kind::Seq => {
            let n = cs.len();
            for i in 0..n {
                for j in i + 1..=n {
                    if j - i == n {
                        continue;
                    }
                    let inner = ctx.inner(Frame::Seq {
                        before: cs[..i].to_vec(),
                        after: cs[j..].to_vec(),
                    });
                    if j - i == 1 {
                        walk(&cs[i], &inner, out);
                    } else {
                        out.push((inner, Structure::seq(cs[i..j].iter().cloned())));
                    }
                }
            }
        }
    }
}

/// Paths to every node of `s` (no sub-multiset selection), with the
/// context leading to it.
pub fn positions(s: &Structure) -> Vec<(Context, Structure)> {
    let mut out = Vec::new();
    if !s.is_unit() {
        nodes(s, &Context::hole(), &mut out);
    }
    out
}

fn nodes(node: &Structure, ctx: &Context, out: &mut Vec<(Context, Structure)>) {
    out.push((ctx.clone(), node.clone()));
    if let Some((kind, cs)) = node.node() {
        let n = cs.len();
        let mut seen: Option<&Structure> = None;
        for i in 0..n {
            if kind.is_commutative() && seen == Some(&cs[i]) {
                continue;
            }
            seen = Some(&cs[i]);
            let f = match kind {
                Kind::Seq => Frame::Seq { before: cs[..i].to_vec(), after: cs[i + 1..].to_vec() },
                k => {
                    let mut rest = cs.to_vec();
                    rest.remove(i);
                    Frame::commutative(k, rest)
                }
            };
            nodes(&cs[i], &ctx.inner(f), out);
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
    fn c() -> Structure {
        Structure::pos("c")
    }

    #[test]
    fn decompositions_of_atom() {
        let d = decompositions(&a());
        assert_eq!(d.len(), 1);
        assert!(d[0].0.is_hole());
    }

    #[test]
    fn decompositions_of_two_par() {
        let s = Structure::par([a(), b()]);
        let d: Vec<String> = decompositions(&s).iter().map(|(c, r)| format!("{c} {r}")).collect();
        assert_eq!(d.len(), 3);
        assert!(d.contains(&"{} [a,b]".to_string()));
        assert!(d.contains(&"[{},b] a".to_string()));
        assert!(d.contains(&"[{},a] b".to_string()));
    }

    #[test]
    fn seq_segments_are_contiguous() {
        let s = Structure::seq([a(), b(), c()]);
        let d = decompositions(&s);
        for (ctx, r) in &d {
            assert_eq!(ctx.plug(r), s);
        }
        let rs: Vec<String> = d.iter().map(|(_, r)| r.to_string()).collect();
        assert!(rs.contains(&"<a;b>".to_string()));
        assert!(rs.contains(&"<b;c>".to_string()));
        assert!(!rs.contains(&"<a;c>".to_string()));
        assert_eq!(d.len(), 6);
    }

    #[test]
    fn duplicate_children_are_not_repeated() {
        let s = Structure::par([a(), a(), b()]);
        let d = decompositions(&s);
        // whole, {a}, {b}, {a,a}, {a,b}
        assert_eq!(d.len(), 5);
    }

    #[test]
    fn contexts_compose_and_negate() {
        let ctx = Context::par_with(&b()).within(&Context::seq_after(&c()));
        assert_eq!(ctx.to_string(), "<c;[{},b]>");
        assert_eq!(ctx.plug(&a()).to_string(), "<c;[a,b]>");
        assert_eq!(ctx.negate().plug(&a().negate()), ctx.plug(&a()).negate());
        assert!(ctx.is_proper_seq());
        let nested = Context::par_with(&a()).within(&Context::par_with(&b()));
        assert_eq!(nested.frames().len(), 1);
    }
}
