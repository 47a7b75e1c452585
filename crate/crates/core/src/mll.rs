//! Multiplicative linear logic with mix: formulas, a naive sequent prover
//! used as an independent oracle, and the translations to flat structures.
//!
//! Syntax: identifiers for atoms, `~` negation, `*` times, `|` par,
//! `bot` and `1` for the units, and `|- A, B` for sequents. `*` binds
//! tighter than `|`.

use crate::context::Context;
use crate::derivation::{Builder, Proof};
use crate::expand::interaction;
use crate::rules::{RuleId, RuleInstance, Witness};
use crate::structure::{Atom, Kind, Structure};
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Atom { name: String, positive: bool },
    Par(Box<Formula>, Box<Formula>),
    Times(Box<Formula>, Box<Formula>),
    Bottom,
    One,
}

impl Formula {
    pub fn atom(name: &str, positive: bool) -> Formula {
        Formula::Atom { name: name.to_string(), positive }
    }

    pub fn par(a: Formula, b: Formula) -> Formula {
        Formula::Par(Box::new(a), Box::new(b))
    }

    pub fn times(a: Formula, b: Formula) -> Formula {
        Formula::Times(Box::new(a), Box::new(b))
    }

    pub fn negate(&self) -> Formula {
        match self {
            Formula::Atom { name, positive } => Formula::Atom { name: name.clone(), positive: !positive },
            Formula::Par(a, b) => Formula::times(a.negate(), b.negate()),
            Formula::Times(a, b) => Formula::par(a.negate(), b.negate()),
            Formula::Bottom => Formula::One,
            Formula::One => Formula::Bottom,
        }
    }

    pub fn has_units(&self) -> bool {
        match self {
            Formula::Atom { .. } => false,
            Formula::Par(a, b) | Formula::Times(a, b) => a.has_units() || b.has_units(),
            Formula::Bottom | Formula::One => true,
        }
    }

    pub fn atom_count(&self) -> usize {
        match self {
            Formula::Atom { .. } => 1,
            Formula::Par(a, b) | Formula::Times(a, b) => a.atom_count() + b.atom_count(),
            Formula::Bottom | Formula::One => 0,
        }
    }

    /// Flattened and sorted form; equal exactly when the formulas agree up
    /// to associativity and commutativity of par and times.
    pub fn ac_normal(&self) -> AcForm {
        fn collect(f: &Formula, par: bool, out: &mut Vec<AcForm>) {
            match (f, par) {
                (Formula::Par(a, b), true) | (Formula::Times(a, b), false) => {
                    collect(a, par, out);
                    collect(b, par, out);
                }
                _ => out.push(f.ac_normal()),
            }
        }
        match self {
            Formula::Atom { name, positive } => AcForm::Atom(name.clone(), *positive),
            Formula::Bottom => AcForm::Bottom,
            Formula::One => AcForm::One,
            Formula::Par(..) | Formula::Times(..) => {
                let par = matches!(self, Formula::Par(..));
                let mut v = Vec::new();
                collect(self, par, &mut v);
                v.sort();
                if par {
                    AcForm::Par(v)
                } else {
                    AcForm::Times(v)
                }
            }
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, outer: u8) -> fmt::Result {
        let (prec, op, a, b) = match self {
            Formula::Atom { name, positive } => return write!(f, "{}{name}", if *positive { "" } else { "~" }),
            Formula::Bottom => return write!(f, "bot"),
            Formula::One => return write!(f, "1"),
            Formula::Par(a, b) => (1, " | ", a, b),
            Formula::Times(a, b) => (2, " * ", a, b),
        };
        if prec < outer {
            write!(f, "(")?;
        }
        a.fmt_prec(f, prec + 1)?;
        write!(f, "{op}")?;
        b.fmt_prec(f, prec)?;
        if prec < outer {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AcForm {
    Atom(String, bool),
    Par(Vec<AcForm>),
    Times(Vec<AcForm>),
    Bottom,
    One,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sequent {
    pub formulas: Vec<Formula>,
}

impl Sequent {
    pub fn new(mut formulas: Vec<Formula>) -> Sequent {
        formulas.sort();
        Sequent { formulas }
    }

    fn has_units(&self) -> bool {
        self.formulas.iter().any(Formula::has_units)
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|-")?;
        for (i, a) in self.formulas.iter().enumerate() {
            write!(f, "{}{a}", if i == 0 { " " } else { ", " })?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("formula syntax error at column {column}: {message}")]
pub struct FormulaError {
    pub column: usize,
    pub message: String,
}

struct FParser<'a> {
    src: &'a str,
    pos: usize,
}

impl FParser<'_> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T, FormulaError> {
        Err(FormulaError { column: self.src[..self.pos].chars().count() + 1, message: message.into() })
    }

    fn ws(&mut self) {
        let rest = &self.src[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.ws();
        if self.src[self.pos..].starts_with(tok) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn par(&mut self) -> Result<Formula, FormulaError> {
        let a = self.times()?;
        if self.eat("|") {
            if self.src[self.pos..].starts_with('-') {
                return self.err("unexpected turnstile");
            }
            return Ok(Formula::par(a, self.par()?));
        }
        Ok(a)
    }

    fn times(&mut self) -> Result<Formula, FormulaError> {
        let a = self.unary()?;
        if self.eat("*") {
            return Ok(Formula::times(a, self.times()?));
        }
        Ok(a)
    }

    fn unary(&mut self) -> Result<Formula, FormulaError> {
        if self.eat("~") {
            return Ok(self.unary()?.negate());
        }
        if self.eat("(") {
            let f = self.par()?;
            if !self.eat(")") {
                return self.err("expected ')'");
            }
            return Ok(f);
        }
        if self.eat("1") {
            return Ok(Formula::One);
        }
        self.ws();
        let rest = &self.src[self.pos..];
        let len = rest.find(|c: char| !(c.is_alphanumeric() || c == '_' || c == '\'')).unwrap_or(rest.len());
        if len == 0 || !rest.starts_with(|c: char| c.is_alphabetic()) {
            return self.err("expected a formula");
        }
        let name = &rest[..len];
        self.pos += len;
        Ok(if name == "bot" { Formula::Bottom } else { Formula::atom(name, true) })
    }

    fn end(&mut self) -> Result<(), FormulaError> {
        self.ws();
        if self.pos < self.src.len() {
            return self.err("unexpected trailing input");
        }
        Ok(())
    }
}

pub fn parse_formula(src: &str) -> Result<Formula, FormulaError> {
    let mut p = FParser { src, pos: 0 };
    let f = p.par()?;
    p.end()?;
    Ok(f)
}

/// Parses `|- A, B, ...`; the turnstile is optional.
pub fn parse_sequent(src: &str) -> Result<Sequent, FormulaError> {
    let mut p = FParser { src, pos: 0 };
    p.eat("|-");
    let mut fs = Vec::new();
    p.ws();
    if p.pos < src.len() {
        fs.push(p.par()?);
        while p.eat(",") {
            fs.push(p.par()?);
        }
    }
    p.end()?;
    Ok(Sequent::new(fs))
}

pub fn to_structure(a: &Formula) -> Structure {
    match a {
        Formula::Atom { name, positive } => {
            Structure::Atom(if *positive { Atom::positive(name.as_str()) } else { Atom::negative(name.as_str()) })
        }
        Formula::Par(a, b) => Structure::par2(to_structure(a), to_structure(b)),
        Formula::Times(a, b) => Structure::copar2(to_structure(a), to_structure(b)),
        Formula::Bottom | Formula::One => Structure::Unit,
    }
}

pub fn sequent_to_structure(s: &Sequent) -> Structure {
    Structure::par(s.formulas.iter().map(to_structure))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TranslateError {
    #[error("{0} contains a seq")]
    NotFlat(Structure),
    #[error("the unit has no formula")]
    IsUnit,
}

pub fn from_structure(p: &Structure) -> Result<Formula, TranslateError> {
    if !p.is_flat() {
        return Err(TranslateError::NotFlat(p.clone()));
    }
    fn go(p: &Structure) -> Formula {
        match p.node() {
            None => {
                let a = p.as_atom().expect("non-unit leaf");
                Formula::atom(a.name(), a.is_positive())
            }
            Some((kind, cs)) => {
                let mut it = cs.iter().rev().map(go);
                let last = it.next().expect("nodes have children");
                it.fold(last, |acc, f| if kind == Kind::Par { Formula::par(f, acc) } else { Formula::times(f, acc) })
            }
        }
    }
    if p.is_unit() {
        return Err(TranslateError::IsUnit);
    }
    Ok(go(p))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MllRule {
    Id,
    Par,
    Times,
    Mix,
    Bottom,
    One,
    Mix0,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MllProof {
    pub rule: MllRule,
    pub conclusion: Sequent,
    pub premisses: Vec<MllProof>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct MllProofJson {
    pub rule: MllRule,
    pub conclusion: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub premisses: Vec<MllProofJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MllCheckError {
    #[error("bad {rule:?} step concluding {conclusion}")]
    BadStep { rule: MllRule, conclusion: String },
    #[error("unit rule {0:?} outside units mode")]
    UnitsDisabled(MllRule),
    #[error(transparent)]
    Syntax(#[from] FormulaError),
}

fn remove_one(v: &mut Vec<Formula>, f: &Formula) -> bool {
    match v.iter().position(|x| x == f) {
        Some(i) => {
            v.remove(i);
            true
        }
        None => false,
    }
}

impl MllProof {
    pub fn size(&self) -> usize {
        1 + self.premisses.iter().map(MllProof::size).sum::<usize>()
    }

    /// Replays every step.
    pub fn check(&self, units: bool) -> Result<(), MllCheckError> {
        for p in &self.premisses {
            p.check(units)?;
        }
        let bad = || MllCheckError::BadStep { rule: self.rule, conclusion: self.conclusion.to_string() };
        let c = &self.conclusion.formulas;
        let prem: Vec<&Vec<Formula>> = self.premisses.iter().map(|p| &p.conclusion.formulas).collect();
        if matches!(self.rule, MllRule::Bottom | MllRule::One | MllRule::Mix0) && !units {
            return Err(MllCheckError::UnitsDisabled(self.rule));
        }
        let ok = match self.rule {
            MllRule::Id => prem.is_empty() && c.len() == 2 && c[0] == c[1].negate(),
            MllRule::One => prem.is_empty() && c.len() == 1 && c[0] == Formula::One,
            MllRule::Mix0 => prem.is_empty() && c.is_empty(),
            MllRule::Par => {
                prem.len() == 1
                    && c.iter().enumerate().any(|(i, f)| match f {
                        Formula::Par(a, b) => {
                            let mut rest = c.clone();
                            rest.remove(i);
                            rest.push((**a).clone());
                            rest.push((**b).clone());
                            Sequent::new(rest).formulas == *prem[0]
                        }
                        _ => false,
                    })
            }
            MllRule::Bottom => {
                prem.len() == 1 && {
                    let mut rest = c.clone();
                    remove_one(&mut rest, &Formula::Bottom) && Sequent::new(rest).formulas == *prem[0]
                }
            }
            MllRule::Mix => {
                prem.len() == 2 && {
                    let mut all = prem[0].clone();
                    all.extend(prem[1].iter().cloned());
                    Sequent::new(all).formulas == *c
                }
            }
            MllRule::Times => {
                prem.len() == 2
                    && c.iter().enumerate().any(|(i, f)| match f {
                        Formula::Times(a, b) => {
                            let (mut l, mut r) = (prem[0].clone(), prem[1].clone());
                            if !remove_one(&mut l, a) || !remove_one(&mut r, b) {
                                return false;
                            }
                            let mut rest = c.clone();
                            rest.remove(i);
                            l.extend(r);
                            Sequent::new(l).formulas == rest
                        }
                        _ => false,
                    })
            }
        };
        if ok {
            Ok(())
        } else {
            Err(bad())
        }
    }

    pub fn to_json(&self) -> MllProofJson {
        MllProofJson {
            rule: self.rule,
            conclusion: self.conclusion.to_string(),
            premisses: self.premisses.iter().map(MllProof::to_json).collect(),
        }
    }

    pub fn from_json(j: &MllProofJson) -> Result<MllProof, MllCheckError> {
        Ok(MllProof {
            rule: j.rule,
            conclusion: parse_sequent(&j.conclusion)?,
            premisses: j.premisses.iter().map(MllProof::from_json).collect::<Result<_, _>>()?,
        })
    }
}

/// Exhaustive cut-free search. Par and bottom are applied eagerly; times and
/// mix branch over every partition of the context.
pub struct MllProver {
    units: bool,
    memo: FxHashMap<Vec<Formula>, Option<MllProof>>,
}

impl MllProver {
    pub fn new(units: bool) -> MllProver {
        MllProver { units, memo: FxHashMap::default() }
    }

    pub fn prove(&mut self, s: &Sequent) -> Option<MllProof> {
        if !self.units && s.has_units() {
            return None;
        }
        self.search(Sequent::new(s.formulas.clone()))
    }

    fn search(&mut self, s: Sequent) -> Option<MllProof> {
        if let Some(r) = self.memo.get(&s.formulas) {
            return r.clone();
        }
        let r = self.search_uncached(&s);
        self.memo.insert(s.formulas, r.clone());
        r
    }

    fn search_uncached(&mut self, s: &Sequent) -> Option<MllProof> {
        let fs = &s.formulas;
        let leaf = |rule| Some(MllProof { rule, conclusion: s.clone(), premisses: vec![] });
        if fs.is_empty() {
            return if self.units { leaf(MllRule::Mix0) } else { None };
        }
        for (i, f) in fs.iter().enumerate() {
            let mut rest = fs.clone();
            rest.remove(i);
            match f {
                Formula::Par(a, b) => {
                    rest.push((**a).clone());
                    rest.push((**b).clone());
                    let p = self.search(Sequent::new(rest))?;
                    return Some(MllProof { rule: MllRule::Par, conclusion: s.clone(), premisses: vec![p] });
                }
                Formula::Bottom => {
                    let p = self.search(Sequent::new(rest))?;
                    return Some(MllProof { rule: MllRule::Bottom, conclusion: s.clone(), premisses: vec![p] });
                }
                _ => {}
            }
        }
        if fs.len() == 2 && fs[0] == fs[1].negate() {
            return leaf(MllRule::Id);
        }
        if fs.len() == 1 && fs[0] == Formula::One {
            return leaf(MllRule::One);
        }
        let n = fs.len();
        for (i, f) in fs.iter().enumerate() {
            let Formula::Times(a, b) = f else { continue };
            let rest: Vec<Formula> = fs.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, g)| g.clone()).collect();
            for mask in 0u32..(1 << rest.len()) {
                let (mut l, mut r) = (vec![(**a).clone()], vec![(**b).clone()]);
                for (j, g) in rest.iter().enumerate() {
                    if mask & (1 << j) != 0 { l.push(g.clone()) } else { r.push(g.clone()) }
                }
                let Some(pl) = self.search(Sequent::new(l)) else { continue };
                let Some(pr) = self.search(Sequent::new(r)) else { continue };
                return Some(MllProof { rule: MllRule::Times, conclusion: s.clone(), premisses: vec![pl, pr] });
            }
        }
        // mix: the first formula always goes left, both sides nonempty
        for mask in 0u32..(1 << (n - 1)) {
            let (mut l, mut r) = (vec![fs[0].clone()], vec![]);
            for j in 1..n {
                if mask & (1 << (j - 1)) != 0 { l.push(fs[j].clone()) } else { r.push(fs[j].clone()) }
            }
            if r.is_empty() {
                continue;
            }
            let Some(pl) = self.search(Sequent::new(l)) else { continue };
            let Some(pr) = self.search(Sequent::new(r)) else { continue };
            return Some(MllProof { rule: MllRule::Mix, conclusion: s.clone(), premisses: vec![pl, pr] });
        }
        None
    }
}

pub fn prove_mll(s: &Sequent) -> Option<MllProof> {
    MllProver::new(false).prove(s)
}

pub fn prove_mll_units(s: &Sequent) -> Option<MllProof> {
    MllProver::new(true).prove(s)
}

fn par_of(fs: &[Formula]) -> Structure {
    Structure::par(fs.iter().map(to_structure))
}

/// An FBV proof of the translation of the conclusion of `d`.
pub fn simulate_mll(d: &MllProof) -> Proof {
    let mut b = Builder::proof();
    simulate_into(d, &mut b);
    b.finish()
}

fn simulate_into(d: &MllProof, b: &mut Builder) {
    let fs = &d.conclusion.formulas;
    match d.rule {
        MllRule::Id => {
            let a = to_structure(&fs[0]);
            b.append(&interaction(&a)).expect("identity chains");
        }
        MllRule::Par | MllRule::Bottom => simulate_into(&d.premisses[0], b),
        MllRule::One | MllRule::Mix0 => {}
        MllRule::Mix => {
            let (l, r) = (&d.premisses[0], &d.premisses[1]);
            simulate_into(l, b);
            let phi = par_of(&l.conclusion.formulas);
            let psi = par_of(&r.conclusion.formulas);
            b.append(&simulate_mll(r).in_context(&Context::copar_with(&phi))).expect("mix chains");
            // (Φ,Ψ) -> [Φ,Ψ]
            b.push(switch(&Context::hole(), &Structure::Unit, &phi, &psi)).expect("mix chains");
        }
        MllRule::Times => {
            let (l, r) = (&d.premisses[0], &d.premisses[1]);
            let (a, phi, bb, psi) = times_parts(d);
            simulate_into(l, b);
            let left = Structure::par2(a.clone(), phi.clone());
            b.append(&simulate_mll(r).in_context(&Context::copar_with(&left))).expect("times chains");
            // ([A,Φ],[B,Ψ]) -> [(B,[A,Φ]),Ψ] -> [(A,B),Φ,Ψ]
            b.push(switch(&Context::hole(), &bb, &psi, &left)).expect("times chains");
            b.push(switch(&Context::par_with(&psi), &a, &phi, &bb)).expect("times chains");
        }
    }
}

/// The active formulas and contexts of a times step, in translation.
fn times_parts(d: &MllProof) -> (Structure, Structure, Structure, Structure) {
    let (l, r) = (&d.premisses[0].conclusion.formulas, &d.premisses[1].conclusion.formulas);
    for f in &d.conclusion.formulas {
        let Formula::Times(a, b) = f else { continue };
        let (mut ll, mut rr) = (l.clone(), r.clone());
        if remove_one(&mut ll, a) && remove_one(&mut rr, b) {
            return (to_structure(a), par_of(&ll), to_structure(b), par_of(&rr));
        }
    }
    unreachable!("checked times step")
}

fn switch(ctx: &Context, r: &Structure, t: &Structure, r2: &Structure) -> RuleInstance {
    RuleInstance::new(RuleId::S, ctx.clone(), Witness::Switch { r: r.clone(), t: t.clone(), r2: r2.clone() }).expect("switch schema")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derivation::check_proof;
    use crate::rules::System;
    use crate::syntax::parse_structure;

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn seq(s: &str) -> Sequent {
        parse_sequent(s).unwrap()
    }

    #[test]
    fn translation() {
        assert_eq!(to_structure(&f("a | ~a")), parse_structure("[a,~a]").unwrap());
        assert_eq!(sequent_to_structure(&seq("|- a, b * c")), parse_structure("[a,(b,c)]").unwrap());
        assert_eq!(sequent_to_structure(&seq("|-")), Structure::Unit);
        assert_eq!(from_structure(&parse_structure("[a,(b,~c)]").unwrap()).unwrap(), f("a | (b * ~c)"));
        assert!(matches!(from_structure(&parse_structure("<a;b>").unwrap()), Err(TranslateError::NotFlat(_))));
        assert_eq!(from_structure(&Structure::Unit), Err(TranslateError::IsUnit));
        assert_eq!(f("~(a * ~b)"), f("~a | b"));
        assert_eq!(f("a | b | c").ac_normal(), f("(c | a) | b").ac_normal());
        assert_ne!(f("a | b * c").ac_normal(), f("(a | b) * c").ac_normal());
    }

    #[test]
    fn prover_examples() {
        assert_eq!(prove_mll(&seq("|- a, ~a")).unwrap().rule, MllRule::Id);
        assert!(prove_mll(&seq("|- a | ~a")).is_some());
        assert!(prove_mll(&seq("|- a * ~a")).is_none());
        let running = seq("|- a | (b | (~b * ((~a * c) | ~c)))");
        let pr = prove_mll(&running).unwrap();
        pr.check(false).unwrap();
        assert!(prove_mll(&seq("|- a, ~a, b, ~b")).is_some());
        assert!(prove_mll(&seq("|- a * b, ~a * ~b")).is_none());
        assert!(prove_mll(&seq("|-")).is_none());
        assert!(prove_mll_units(&seq("|- bot, bot")).is_some());
        assert!(prove_mll_units(&seq("|- 1, 1")).is_some());
        assert_eq!(sequent_to_structure(&seq("|- 1, 1")), Structure::Unit);
    }

    #[test]
    fn simulation() {
        let fbv = System::fbv();
        let id = prove_mll(&seq("|- a, ~a")).unwrap();
        let d = simulate_mll(&id);
        assert_eq!(d.len(), 2);
        check_proof(&d, &fbv).unwrap();
        let mix = prove_mll(&seq("|- a, ~a, b, ~b")).unwrap();
        assert_eq!(mix.rule, MllRule::Mix);
        let d = simulate_mll(&mix);
        assert_eq!(d.steps[0].rule, RuleId::S);
        assert_eq!(d.conclusion, parse_structure("[a,~a,b,~b]").unwrap());
        check_proof(&d, &fbv).unwrap();
        let running = prove_mll(&seq("|- a | (b | (~b * ((~a * c) | ~c)))")).unwrap();
        let d = simulate_mll(&running);
        assert_eq!(d.conclusion, parse_structure("[a,b,(~b,[(~a,c),~c])]").unwrap());
        check_proof(&d, &fbv).unwrap();
    }

    #[test]
    fn json_tree() {
        let pr = prove_mll(&seq("|- a * b, ~a, ~b")).unwrap();
        let j = serde_json::to_string(&pr.to_json()).unwrap();
        let back = MllProof::from_json(&serde_json::from_str(&j).unwrap()).unwrap();
        assert_eq!(back, pr);
        back.check(false).unwrap();
        let mut bad = pr.clone();
        bad.conclusion = seq("|- a * b, ~a, b");
        assert!(bad.check(false).is_err());
    }
}
