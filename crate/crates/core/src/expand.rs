//! Replacing general rule instances by derivations in smaller systems.

use crate::context::{Context, Frame};
use crate::derivation::{Builder, ChainError, Derivation};
use crate::merge::{MergeStep, Merger};
use crate::rules::{RuleId, RuleInstance, Witness};
use crate::structure::{Kind, Structure};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExpandError {
    #[error("expected an instance of {expected}, got {got}")]
    WrongRule { expected: &'static str, got: RuleId },
    #[error("{q} is not in the merge set of {r} and {t}")]
    MergeWitnessInvalid { q: Structure, r: Structure, t: Structure },
    #[error("internal: {0}")]
    Chain(#[from] ChainError),
}

fn s_inst(ctx: &Context, r: &Structure, t: &Structure, r2: &Structure) -> RuleInstance {
    RuleInstance::new(RuleId::S, ctx.clone(), Witness::Switch { r: r.clone(), t: t.clone(), r2: r2.clone() })
        .expect("switch schema")
}

fn q_inst(ctx: &Context, r: &Structure, t: &Structure, r2: &Structure, t2: &Structure) -> RuleInstance {
    let w = Witness::Quad { r: r.clone(), t: t.clone(), r2: r2.clone(), t2: t2.clone() };
    RuleInstance::new(RuleId::QDown, ctx.clone(), w).expect("seq schema")
}

/// From `◦` to `[R,R̄]` in `{ai↓, q↓, s}`.
pub fn interaction(r: &Structure) -> Derivation {
    let mut b = Builder::from_top(Structure::Unit);
    build_interaction(r, &mut b).expect("interaction chains");
    b.finish()
}

fn build_interaction(r: &Structure, b: &mut Builder) -> Result<(), ChainError> {
    match r {
        Structure::Unit => Ok(()),
        Structure::Atom(a) => {
            let pos = if a.is_positive() { a.clone() } else { a.dual() };
            b.push(RuleInstance::new(RuleId::AiDown, Context::hole(), Witness::Atom(pos)).expect("atom schema"))
        }
        Structure::Seq(cs) => {
            let r1 = cs[0].clone();
            let r2 = Structure::seq(cs[1..].iter().cloned());
            let d1 = interaction(&r1);
            b.append(&d1)?;
            let left = Structure::par2(r1.clone(), r1.negate());
            b.append(&interaction(&r2).in_context(&Context::seq_after(&left)))?;
            b.push(q_inst(&Context::hole(), &r1, &r1.negate(), &r2, &r2.negate()))
        }
        Structure::Par(cs) => {
            let r1 = cs[0].clone();
            let r2 = Structure::par(cs[1..].iter().cloned());
            b.append(&interaction(&r1))?;
            let left = Structure::par2(r1.clone(), r1.negate());
            b.append(&interaction(&r2).in_context(&Context::copar_with(&left)))?;
            // ([R1,R̄1],[R2,R̄2]) -> [(R̄1,[R2,R̄2]),R1] -> [R1,R2,(R̄1,R̄2)]
            let right = Structure::par2(r2.clone(), r2.negate());
            b.push(s_inst(&Context::hole(), &r1.negate(), &r1, &right))?;
            b.push(s_inst(&Context::par_with(&r1), &r2.negate(), &r2, &r1.negate()))
        }
        Structure::Copar(_) => build_interaction(&r.negate(), b),
    }
}

/// An `i↓` instance as a derivation in `{ai↓, q↓, s}`.
pub fn expand_i_down(inst: &RuleInstance) -> Result<Derivation, ExpandError> {
    match (&inst.rule, &inst.witness) {
        (RuleId::IDown, Witness::Interaction { r }) => Ok(interaction(r).in_context(&inst.context)),
        _ => Err(ExpandError::WrongRule { expected: "i↓", got: inst.rule }),
    }
}

/// An `i↑` instance as a derivation in `{ai↑, q↑, s}`.
pub fn expand_i_up(inst: &RuleInstance) -> Result<Derivation, ExpandError> {
    if inst.rule != RuleId::IUp {
        return Err(ExpandError::WrongRule { expected: "i↑", got: inst.rule });
    }
    let down = inst.dual().expect("i↑ has a corule");
    Ok(expand_i_down(&down)?.flip().expect("no unit axiom"))
}

/// From `Q` to `[R,T]` in `{q↓, s}` for `Q ∈ R⋄T`.
pub fn merge_to_par(q: &Structure, r: &Structure, t: &Structure) -> Result<Derivation, ExpandError> {
    let mut m = Merger::new();
    let mut b = Builder::from_top(q.clone());
    build_merge(&mut m, q, r, t, &mut b)?;
    Ok(b.finish())
}

fn build_merge(m: &mut Merger, q: &Structure, r: &Structure, t: &Structure, b: &mut Builder) -> Result<(), ExpandError> {
    let hole = Context::hole();
    let o = Structure::Unit;
    let step = m
        .explain(q, r, t)
        .ok_or_else(|| ExpandError::MergeWitnessInvalid { q: q.clone(), r: r.clone(), t: t.clone() })?;
    match step {
        MergeStep::Par => {}
        MergeStep::SeqRT => b.push(q_inst(&hole, r, &o, &o, t))?,
        MergeStep::SeqTR => b.push(q_inst(&hole, &o, t, r, &o))?,
        MergeStep::Copar => b.push(s_inst(&hole, &o, t, r))?,
        MergeStep::Seq { q1, q2, r1, r2, t1, t2 } => {
            let mut inner = Builder::from_top(q2.clone());
            build_merge(m, &q2, &r2, &t2, &mut inner)?;
            b.append(&inner.finish().in_context(&Context::seq_after(&q1)))?;
            let mut inner = Builder::from_top(q1.clone());
            build_merge(m, &q1, &r1, &t1, &mut inner)?;
            let lower = Structure::par2(r2.clone(), t2.clone());
            b.append(&inner.finish().in_context(&Context::seq_before(&lower)))?;
            b.push(q_inst(&hole, &r1, &t1, &r2, &t2))?;
        }
        MergeStep::Left { kind, q1, r1, kept } => {
            let mut inner = Builder::from_top(q1.clone());
            build_merge(m, &q1, &r1, t, &mut inner)?;
            let ctx = Context::from_frames(vec![Frame::commutative(kind, vec![kept.clone()])]);
            b.append(&inner.finish().in_context(&ctx))?;
            if kind == Kind::Copar {
                b.push(s_inst(&hole, &r1, t, &kept))?;
            }
        }
        MergeStep::Right { kind, q2, t2, kept } => {
            let mut inner = Builder::from_top(q2.clone());
            build_merge(m, &q2, r, &t2, &mut inner)?;
            let ctx = Context::from_frames(vec![Frame::commutative(kind, vec![kept.clone()])]);
            b.append(&inner.finish().in_context(&ctx))?;
            if kind == Kind::Copar {
                b.push(s_inst(&hole, &t2, r, &kept))?;
            }
        }
    }
    Ok(())
}

/// A `g↓` instance as a derivation in `{q↓, s}`.
pub fn expand_g_down(inst: &RuleInstance) -> Result<Derivation, ExpandError> {
    match (&inst.rule, &inst.witness) {
        (RuleId::GDown, Witness::Merge { r, t, q }) => Ok(merge_to_par(q, r, t)?.in_context(&inst.context)),
        _ => Err(ExpandError::WrongRule { expected: "g↓", got: inst.rule }),
    }
}

/// A `g↑` instance as a derivation in `{q↑, s}`.
pub fn expand_g_up(inst: &RuleInstance) -> Result<Derivation, ExpandError> {
    if inst.rule != RuleId::GUp {
        return Err(ExpandError::WrongRule { expected: "g↑", got: inst.rule });
    }
    let down = inst.dual().expect("g↑ has a corule");
    Ok(expand_g_down(&down)?.flip().expect("no unit axiom"))
}

/// An instance of the corule `π` of some `ρ`, replaced by
/// `i↓`, `s`, `ρ`, `i↑`:
/// `S{P}` to `S(P,[Q,Q̄])` to `S[(P,Q̄),Q]` to `S[(P,P̄),Q]` to `S{Q}`.
pub fn expand_corule(inst: &RuleInstance) -> Result<Derivation, ExpandError> {
    if inst.rule.corule().is_none() {
        return Err(ExpandError::WrongRule { expected: "a rule with a corule", got: inst.rule });
    }
    let local = RuleInstance::new(inst.rule, Context::hole(), inst.witness.clone())
        .map_err(|_| ExpandError::WrongRule { expected: "a well formed instance", got: inst.rule })?;
    let (p, q) = (local.premiss.clone(), local.conclusion.clone());
    let s = &inst.context;
    let mut b = Builder::from_top(inst.premiss.clone());
    let i_down = RuleInstance::new(RuleId::IDown, s.inner(Frame::Copar(vec![p.clone()])), Witness::Interaction { r: q.clone() })
        .expect("interaction schema");
    b.push(i_down)?;
    b.push(s_inst(s, &q.negate(), &q, &p))?;
    let r = local.dual().expect("corule exists");
    let around = s.inner(Frame::Par(vec![q.clone()])).inner(Frame::Copar(vec![p.clone()]));
    b.push(r.in_context(&around))?;
    let i_up = RuleInstance::new(RuleId::IUp, s.inner(Frame::Par(vec![q.clone()])), Witness::Interaction { r: p.clone() })
        .expect("interaction schema");
    b.push(i_up)?;
    Ok(b.finish())
}

/// From `S[R,T]` to `[S{R},T]` in `{q↓, s}`.
pub fn par_extrusion(ctx: &Context, r: &Structure, t: &Structure) -> Derivation {
    let mut b = Builder::from_top(ctx.plug(&Structure::par2(r.clone(), t.clone())));
    let frames = ctx.frames();
    let mut inner_r = r.clone();
    for k in (0..frames.len()).rev() {
        let outer = Context::from_frames(frames[..k].to_vec());
        let o = Structure::Unit;
        match &frames[k] {
            Frame::Par(_) => {}
            Frame::Copar(sibs) => {
                let u = Structure::copar(sibs.iter().cloned());
                b.push(s_inst(&outer, &inner_r, t, &u)).expect("extrusion chains");
            }
            Frame::Seq { before, after } => {
                let bs = Structure::seq(before.iter().cloned());
                let af = Structure::seq(after.iter().cloned());
                let ctx1 = Context::seq_before(&af).within(&outer);
                b.push(q_inst(&ctx1, &bs, &o, &inner_r, t)).expect("extrusion chains");
                let left = Structure::seq2(bs.clone(), inner_r.clone());
                b.push(q_inst(&outer, &left, t, &af, &o)).expect("extrusion chains");
            }
        }
        inner_r = frames[k].wrap(inner_r);
    }
    b.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derivation::check_derivation;
    use crate::rules::System;
    use crate::syntax::{parse_context, parse_structure};

    fn p(s: &str) -> Structure {
        parse_structure(s).unwrap()
    }

    fn sys(rules: &[RuleId]) -> System {
        System::new("t", rules)
    }

    #[test]
    fn interactions() {
        let ids = sys(&[RuleId::AiDown, RuleId::QDown, RuleId::S]);
        assert!(interaction(&Structure::Unit).is_empty());
        assert_eq!(interaction(&p("a")).len(), 1);
        let d = interaction(&p("<a;b>"));
        assert_eq!(d.conclusion, p("[<a;b>,<~a;~b>]"));
        assert_eq!(d.count(RuleId::QDown), 1);
        assert_eq!(d.count(RuleId::AiDown), 2);
        for r in ["[a,b]", "(a,<b;~c>)", "<[a,b];(c,d);e>", "[(a,b),(c,<d;a>)]"] {
            let d = interaction(&p(r));
            assert_eq!(d.conclusion, Structure::par2(p(r), p(r).negate()));
            assert!(check_derivation(&d, &ids).is_ok(), "{r}");
        }
    }

    #[test]
    fn merges() {
        let qs = sys(&[RuleId::QDown, RuleId::S]);
        let d = merge_to_par(&p("(a,b)"), &p("a"), &p("b")).unwrap();
        assert_eq!(d.len(), 1);
        assert!(merge_to_par(&p("[a,b]"), &p("a"), &p("b")).unwrap().is_empty());
        for (q, r, t) in [("[<a;c>,<b;d>]", "<a;b>", "<c;d>"), ("<[a,c];[b,d]>", "<a;b>", "<c;d>"), ("([a,c],b)", "(a,b)", "c")] {
            match merge_to_par(&p(q), &p(r), &p(t)) {
                Ok(d) => {
                    assert_eq!(d.conclusion, Structure::par2(p(r), p(t)));
                    assert!(check_derivation(&d, &qs).is_ok());
                }
                Err(ExpandError::MergeWitnessInvalid { .. }) => assert_eq!(q, "[<a;c>,<b;d>]"),
                Err(e) => panic!("{e}"),
            }
        }
    }

    #[test]
    fn corule_sandwich() {
        let w = Witness::Quad { r: p("a"), t: p("c"), r2: p("b"), t2: Structure::Unit };
        let inst = RuleInstance::new(RuleId::QUp, parse_context("[{},d]").unwrap(), w).unwrap();
        let d = expand_corule(&inst).unwrap();
        assert_eq!(d.len(), 4);
        assert_eq!(d.conclusion, inst.conclusion);
        assert_eq!(d.top(), &inst.premiss);
        let target = sys(&[RuleId::IDown, RuleId::IUp, RuleId::S, RuleId::QDown]);
        assert!(check_derivation(&d, &target).is_ok());
    }

    #[test]
    fn extrusion() {
        let qs = sys(&[RuleId::QDown, RuleId::S]);
        assert!(par_extrusion(&Context::hole(), &p("a"), &p("b")).is_empty());
        let d = par_extrusion(&parse_context("(c,{})").unwrap(), &p("a"), &p("b"));
        assert_eq!(d.len(), 1);
        assert_eq!(d.conclusion, p("[(c,a),b]"));
        let d = par_extrusion(&parse_context("<c;{}>").unwrap(), &p("a"), &p("b"));
        assert_eq!((d.len(), d.count(RuleId::QDown)), (1, 1));
        for c in ["<c;[(d,{}),e];f>", "(<{};x>,[y,z])", "[<c;({},d)>,e]"] {
            let ctx = parse_context(c).unwrap();
            let d = par_extrusion(&ctx, &p("<a;b>"), &p("(e,~e)"));
            assert_eq!(d.conclusion, Structure::par2(ctx.plug(&p("<a;b>")), p("(e,~e)")));
            assert!(check_derivation(&d, &qs).is_ok(), "{c}");
        }
    }
}
