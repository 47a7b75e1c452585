//! Derivations as checkable certificates.
//!
//! Steps are stored bottom-up: `steps[0]` has the derivation's conclusion
//! as its conclusion and each later step proves the premiss of the one
//! before it. A proof ends (at the top) with the unit axiom.

use crate::context::Context;
use crate::rules::{schema, RuleId, RuleInstance, System, Witness};
use crate::structure::{Atom, Structure};
use crate::syntax::{parse_context, parse_structure, SyntaxError};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Derivation {
    pub conclusion: Structure,
    pub steps: Vec<RuleInstance>,
}

/// A derivation topped by `◦↓`.
pub type Proof = Derivation;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("step does not continue the chain: expected premiss {expected}, got {got}")]
pub struct ChainError {
    pub expected: Structure,
    pub got: Structure,
}

impl Derivation {
    pub fn empty(s: Structure) -> Derivation {
        Derivation { conclusion: s, steps: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn is_proof(&self) -> bool {
        self.steps.last().is_some_and(|s| s.rule == RuleId::UnitDown)
    }

    /// The structure at the top; `◦` for a proof.
    pub fn top(&self) -> &Structure {
        self.steps.last().map(|s| &s.premiss).unwrap_or(&self.conclusion)
    }

    /// The premiss; proofs have none.
    pub fn premiss(&self) -> Option<&Structure> {
        if self.is_proof() {
            None
        } else {
            Some(self.top())
        }
    }

    pub fn rules_used(&self) -> std::collections::BTreeSet<RuleId> {
        self.steps.iter().map(|s| s.rule).collect()
    }

    pub fn count(&self, rule: RuleId) -> usize {
        self.steps.iter().filter(|s| s.rule == rule).count()
    }

    /// Every structure from the top down.
    pub fn structures(&self) -> Vec<Structure> {
        let mut v = vec![self.top().clone()];
        for s in self.steps.iter().rev() {
            v.push(s.conclusion.clone());
        }
        v
    }

    /// The same derivation inside `ctx`. A proof of `X` becomes a
    /// derivation from `ctx{◦}` to `ctx{X}`.
    pub fn in_context(&self, ctx: &Context) -> Derivation {
        Derivation {
            conclusion: ctx.plug(&self.conclusion),
            steps: self
                .steps
                .iter()
                .filter(|s| s.rule != RuleId::UnitDown)
                .map(|s| s.in_context(ctx))
                .collect(),
        }
    }

    /// The dual derivation: from the negated conclusion to the negated
    /// premiss, using corules. Proofs cannot be flipped.
    pub fn flip(&self) -> Option<Derivation> {
        if self.is_proof() {
            return None;
        }
        let steps: Option<Vec<RuleInstance>> = self.steps.iter().rev().map(RuleInstance::dual).collect();
        Some(Derivation { conclusion: self.top().negate(), steps: steps? })
    }

    /// Removes steps whose premiss equals their conclusion.
    pub fn without_trivial(mut self) -> Derivation {
        self.steps.retain(|s| !s.is_trivial());
        self
    }

    /// `self` with `upper` stacked on top; `upper` must conclude with
    /// the premiss of `self`.
    pub fn then_above(mut self, upper: &Derivation) -> Result<Derivation, ChainError> {
        if self.is_proof() || self.top() != &upper.conclusion {
            return Err(ChainError { expected: self.top().clone(), got: upper.conclusion.clone() });
        }
        self.steps.extend(upper.steps.iter().cloned());
        Ok(self)
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.render_text(),
            Format::Latex => self.render_latex(),
            Format::Json => serde_json::to_string_pretty(&self.to_json("")).unwrap(),
        }
    }

    /// Vertical layout, premiss on top, one rule line per step.
    pub fn render_text(&self) -> String {
        let rows = self.structures();
        let width = rows.iter().map(|s| s.to_string().chars().count()).max().unwrap_or(1).max(1);
        let mut out = String::new();
        let center = |s: &str| {
            let w = s.chars().count();
            format!("{}{}", " ".repeat((width - w) / 2), s)
        };
        if !self.is_proof() {
            let _ = writeln!(out, "{}", center(&rows[0].to_string()));
        }
        for (k, step) in self.steps.iter().rev().enumerate() {
            let _ = writeln!(out, "{} {}", "-".repeat(width), step.rule);
            let _ = writeln!(out, "{}", center(&rows[k + 1].to_string()));
        }
        if self.steps.is_empty() {
            return format!("{}\n", rows[0]);
        }
        out
    }

    pub fn render_latex(&self) -> String {
        let rows = self.structures();
        let mut out = String::from("\\[\n\\begin{array}{cl}\n");
        if !self.is_proof() {
            let _ = writeln!(out, "{} & \\\\", latex(&rows[0]));
        }
        for (k, step) in self.steps.iter().rev().enumerate() {
            let _ = writeln!(out, "\\hline");
            let _ = writeln!(out, "{} & {} \\\\", latex(&rows[k + 1]), latex_rule(step.rule));
        }
        out.push_str("\\end{array}\n\\]\n");
        out
    }

    pub fn to_json(&self, system: &str) -> CertificateJson {
        CertificateJson {
            system: system.to_string(),
            conclusion: self.conclusion.to_string(),
            steps: self
                .steps
                .iter()
                .map(|s| StepJson {
                    rule: s.rule.name().to_string(),
                    context: s.context.to_string(),
                    witness: witness_json(&s.witness),
                    premiss: (s.rule != RuleId::UnitDown).then(|| s.premiss.to_string()),
                })
                .collect(),
        }
    }

    /// Reads a certificate. Each step's conclusion is recomputed from its
    /// context and witness, its premiss is taken as stated.
    pub fn from_json(c: &CertificateJson) -> Result<Derivation, CertificateError> {
        let conclusion = field(parse_structure(&c.conclusion), None, "conclusion")?;
        let mut steps = Vec::new();
        for (i, st) in c.steps.iter().enumerate() {
            let rule: RuleId = st.rule.parse().map_err(|_| CertificateError::UnknownRule { step: i, rule: st.rule.clone() })?;
            let context = field(parse_context(&st.context), Some(i), "context")?;
            let witness = witness_from_json(rule, &st.witness, i)?;
            let (_, c) = schema(rule, &witness).map_err(|e| CertificateError::BadWitness { step: i, reason: e.to_string() })?;
            let premiss = match (&st.premiss, rule) {
                (None, RuleId::UnitDown) => Structure::Unit,
                (None, _) => return Err(CertificateError::MissingPremiss { step: i }),
                (Some(s), _) => field(parse_structure(s), Some(i), "premiss")?,
            };
            steps.push(RuleInstance { rule, conclusion: context.plug(&c), context, witness, premiss });
        }
        Ok(Derivation { conclusion, steps })
    }
}

fn field<T>(r: Result<T, SyntaxError>, step: Option<usize>, name: &'static str) -> Result<T, CertificateError> {
    r.map_err(|error| CertificateError::Syntax { step, field: name, error })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
    Latex,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepJson {
    pub rule: String,
    pub context: String,
    pub witness: BTreeMap<String, String>,
    pub premiss: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateJson {
    pub system: String,
    pub conclusion: String,
    pub steps: Vec<StepJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertificateError {
    #[error("step {step:?}: bad {field}: {error}")]
    Syntax { step: Option<usize>, field: &'static str, error: SyntaxError },
    #[error("step {step}: unknown rule {rule:?}")]
    UnknownRule { step: usize, rule: String },
    #[error("step {step}: bad witness: {reason}")]
    BadWitness { step: usize, reason: String },
    #[error("step {step}: missing premiss")]
    MissingPremiss { step: usize },
}

fn witness_json(w: &Witness) -> BTreeMap<String, String> {
    let mut m = BTreeMap::new();
    let mut put = |k: &str, s: &Structure| {
        m.insert(k.to_string(), s.to_string());
    };
    match w {
        Witness::None => {}
        Witness::Atom(a) => put("a", &Structure::Atom(a.clone())),
        Witness::Interaction { r } => put("R", r),
        Witness::Switch { r, t, r2 } => {
            put("R", r);
            put("T", t);
            put("R'", r2);
        }
        Witness::Quad { r, t, r2, t2 } => {
            put("R", r);
            put("T", t);
            put("R'", r2);
            put("T'", t2);
        }
        Witness::Merge { r, t, q } => {
            put("R", r);
            put("T", t);
            put("Q", q);
        }
    }
    m
}

fn witness_from_json(rule: RuleId, m: &BTreeMap<String, String>, step: usize) -> Result<Witness, CertificateError> {
    let get = |k: &str| -> Result<Structure, CertificateError> {
        let src = m.get(k).ok_or_else(|| CertificateError::BadWitness { step, reason: format!("missing {k}") })?;
        parse_structure(src).map_err(|error| CertificateError::Syntax { step: Some(step), field: "witness", error })
    };
    Ok(match rule {
        RuleId::UnitDown => Witness::None,
        RuleId::AiDown | RuleId::AiUp => match get("a")? {
            Structure::Atom(a) => Witness::Atom(Atom::positive(a.name())),
            other => return Err(CertificateError::BadWitness { step, reason: format!("{other} is not an atom") }),
        },
        RuleId::IDown | RuleId::IUp => Witness::Interaction { r: get("R")? },
        RuleId::S => Witness::Switch { r: get("R")?, t: get("T")?, r2: get("R'")? },
        RuleId::QDown | RuleId::QUp | RuleId::Ws => Witness::Quad { r: get("R")?, t: get("T")?, r2: get("R'")?, t2: get("T'")? },
        RuleId::GDown | RuleId::GUp | RuleId::WgDown | RuleId::WgUp => Witness::Merge { r: get("R")?, t: get("T")?, q: get("Q")? },
    })
}

pub fn latex(s: &Structure) -> String {
    match s {
        Structure::Unit => "\\circ".to_string(),
        Structure::Atom(a) if a.is_positive() => a.name().to_string(),
        Structure::Atom(a) => format!("\\bar{{{}}}", a.name()),
        Structure::Seq(cs) => format!("\\langle {} \\rangle", cs.iter().map(latex).collect::<Vec<_>>().join("; ")),
        Structure::Par(cs) => format!("[{}]", cs.iter().map(latex).collect::<Vec<_>>().join(", ")),
        Structure::Copar(cs) => format!("({})", cs.iter().map(latex).collect::<Vec<_>>().join(", ")),
    }
}

fn latex_rule(r: RuleId) -> String {
    let (base, dir) = match r {
        RuleId::UnitDown => ("\\circ", "\\downarrow"),
        RuleId::AiDown => ("\\mathsf{ai}", "\\downarrow"),
        RuleId::AiUp => ("\\mathsf{ai}", "\\uparrow"),
        RuleId::QDown => ("\\mathsf{q}", "\\downarrow"),
        RuleId::QUp => ("\\mathsf{q}", "\\uparrow"),
        RuleId::S => ("\\mathsf{s}", ""),
        RuleId::Ws => ("\\mathsf{ws}", ""),
        RuleId::IDown => ("\\mathsf{i}", "\\downarrow"),
        RuleId::IUp => ("\\mathsf{i}", "\\uparrow"),
        RuleId::GDown => ("\\mathsf{g}", "\\downarrow"),
        RuleId::GUp => ("\\mathsf{g}", "\\uparrow"),
        RuleId::WgDown => ("\\mathsf{wg}", "\\downarrow"),
        RuleId::WgUp => ("\\mathsf{wg}", "\\uparrow"),
    };
    format!("{base}{dir}")
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("step {step}: {reason}")]
    MalformedInstance { step: usize, reason: String },
    #[error("step {step}: premiss and conclusion do not chain")]
    BrokenChain { step: usize },
    #[error("step {step}: rule {rule} is not in the system")]
    RuleNotInSystem { step: usize, rule: RuleId },
    #[error("derivation is not topped by the unit axiom")]
    NotAProof,
}

impl CheckError {
    pub fn step(&self) -> Option<usize> {
        match self {
            CheckError::MalformedInstance { step, .. }
            | CheckError::BrokenChain { step }
            | CheckError::RuleNotInSystem { step, .. } => Some(*step),
            CheckError::NotAProof => None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CheckReport {
    /// Steps whose premiss equals their conclusion. Accepted, but flagged.
    pub trivial_steps: Vec<usize>,
}

/// Checks every step bottom-up: rule membership, chaining with its
/// neighbours, then replay of the schema.
pub fn check_derivation(d: &Derivation, sys: &System) -> Result<CheckReport, CheckError> {
    check(d, sys, false)
}

/// As `check_derivation`, additionally requiring the unit axiom on top.
/// The unit axiom is accepted whether or not `sys` lists it.
pub fn check_proof(d: &Derivation, sys: &System) -> Result<CheckReport, CheckError> {
    check(d, sys, true)
}

fn check(d: &Derivation, sys: &System, proof: bool) -> Result<CheckReport, CheckError> {
    let mut report = CheckReport::default();
    let n = d.steps.len();
    for (i, st) in d.steps.iter().enumerate() {
        let unit_ok = proof && st.rule == RuleId::UnitDown;
        if !sys.contains(st.rule) && !unit_ok {
            return Err(CheckError::RuleNotInSystem { step: i, rule: st.rule });
        }
        let expected = if i == 0 { &d.conclusion } else { &d.steps[i - 1].premiss };
        if &st.conclusion != expected {
            return Err(CheckError::BrokenChain { step: i });
        }
        if i + 1 < n && st.premiss != d.steps[i + 1].conclusion {
            return Err(CheckError::BrokenChain { step: i });
        }
        if st.rule == RuleId::UnitDown {
            if i + 1 != n || !st.context.is_hole() || !st.conclusion.is_unit() {
                return Err(CheckError::MalformedInstance { step: i, reason: "the unit axiom concludes ◦ at the top".into() });
            }
            continue;
        }
        let (p, c) = st.replay().map_err(|e| CheckError::MalformedInstance { step: i, reason: e.to_string() })?;
        if p != st.premiss || c != st.conclusion {
            return Err(CheckError::MalformedInstance { step: i, reason: "schema replay differs".into() });
        }
        if st.is_trivial() {
            report.trivial_steps.push(i);
        }
    }
    if proof && !d.is_proof() {
        return Err(CheckError::NotAProof);
    }
    Ok(report)
}

/// Builds a derivation top-down.
#[derive(Clone, Debug)]
pub struct Builder {
    cur: Structure,
    rev: Vec<RuleInstance>,
}

impl Builder {
    pub fn from_top(top: Structure) -> Builder {
        Builder { cur: top, rev: Vec::new() }
    }

    /// Starts a proof: `◦` justified by the unit axiom.
    pub fn proof() -> Builder {
        Builder { cur: Structure::Unit, rev: vec![RuleInstance::unit()] }
    }

    pub fn current(&self) -> &Structure {
        &self.cur
    }

    /// Applies one step below the current bottom. Trivial steps are
    /// dropped.
    pub fn push(&mut self, inst: RuleInstance) -> Result<(), ChainError> {
        if inst.premiss != self.cur {
            return Err(ChainError { expected: self.cur.clone(), got: inst.premiss });
        }
        if !inst.is_trivial() {
            self.cur = inst.conclusion.clone();
            self.rev.push(inst);
        }
        Ok(())
    }

    /// Appends a whole derivation whose top is the current bottom. The unit
    /// axiom of a proof appended this way is dropped.
    pub fn append(&mut self, d: &Derivation) -> Result<(), ChainError> {
        if d.top() != &self.cur {
            return Err(ChainError { expected: self.cur.clone(), got: d.top().clone() });
        }
        for st in d.steps.iter().rev() {
            if st.rule != RuleId::UnitDown {
                self.push(st.clone())?;
            }
        }
        Ok(())
    }

    pub fn finish(self) -> Derivation {
        let mut steps = self.rev;
        steps.reverse();
        Derivation { conclusion: self.cur, steps }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rules::premisses;

    fn p(s: &str) -> Structure {
        parse_structure(s).unwrap()
    }

    fn ctx(s: &str) -> Context {
        parse_context(s).unwrap()
    }

    fn step(rule: RuleId, c: &str, w: Witness) -> RuleInstance {
        RuleInstance::new(rule, ctx(c), w).unwrap()
    }

    fn a(n: &str) -> Witness {
        Witness::Atom(Atom::positive(n))
    }

    // [a,b,(~b,[(~a,c),~c])] by three atomic interactions and three
    // switches, written top-down.
    pub(crate) fn running_proof() -> Derivation {
        let mut b = Builder::proof();
        b.push(step(RuleId::AiDown, "{}", a("c"))).unwrap();
        b.push(step(RuleId::AiDown, "[({},c),~c]", a("a"))).unwrap();
        b.push(step(RuleId::AiDown, "({},[([a,~a],c),~c])", a("b"))).unwrap();
        b.push(step(RuleId::S, "([{},~c],[b,~b])", Witness::Switch { r: p("~a"), t: p("a"), r2: p("c") })).unwrap();
        b.push(step(RuleId::S, "{}", Witness::Switch { r: p("[(~a,c),~c]"), t: p("a"), r2: p("[b,~b]") })).unwrap();
        b.push(step(RuleId::S, "[a,{}]", Witness::Switch { r: p("~b"), t: p("b"), r2: p("[(~a,c),~c]") })).unwrap();
        b.finish()
    }

    #[test]
    fn builder_and_check() {
        let mut b = Builder::proof();
        b.push(step(RuleId::AiDown, "{}", a("a"))).unwrap();
        let d = b.finish();
        assert_eq!(d.conclusion, p("[a,~a]"));
        assert_eq!(d.len(), 2);
        assert!(check_proof(&d, &System::bv()).is_ok());
        assert_eq!(d.top(), &Structure::Unit);
        assert!(d.premiss().is_none());
    }

    #[test]
    fn running_example_checks() {
        let d = running_proof();
        assert_eq!(d.conclusion, p("[a,b,(~b,[(~a,c),~c])]"));
        assert_eq!(check_proof(&d, &System::fbv()), Ok(CheckReport::default()));
        let mut bad = d.clone();
        bad.steps[2].premiss = p("([b,~b],[a,~a,c,~c])");
        assert_eq!(check_proof(&bad, &System::bv()), Err(CheckError::BrokenChain { step: 2 }));
        let j = Derivation::from_json(&d.to_json("BV")).unwrap();
        assert_eq!(j, d);
        let mut cj = d.to_json("BV");
        cj.steps[2].premiss = Some("([b,~b],[a,~a,c,~c])".into());
        let back = Derivation::from_json(&cj).unwrap();
        assert_eq!(check_proof(&back, &System::bv()), Err(CheckError::BrokenChain { step: 2 }));
    }

    #[test]
    fn perturbed_and_foreign() {
        let mut b = Builder::from_top(p("<a;b>"));
        b.push(step(RuleId::QDown, "{}", Witness::Quad { r: p("a"), t: Structure::Unit, r2: Structure::Unit, t2: p("b") })).unwrap();
        let d = b.finish();
        assert_eq!(d.conclusion, p("[a,b]"));
        assert!(check_derivation(&d, &System::new("q", &[RuleId::QDown])).is_ok());
        assert_eq!(
            check_derivation(&d, &System::fbv()),
            Err(CheckError::RuleNotInSystem { step: 0, rule: RuleId::QDown })
        );
        let mut bad = d.clone();
        bad.conclusion = p("[a,c]");
        assert_eq!(check_derivation(&bad, &System::bv()), Err(CheckError::BrokenChain { step: 0 }));
        assert_eq!(check_proof(&d, &System::bv()), Err(CheckError::NotAProof));
    }

    #[test]
    fn json_roundtrip_and_flip() {
        let inst = premisses(&p("[(a,b),c]"), &System::bv()).into_iter().next().unwrap();
        let d = Derivation { conclusion: inst.conclusion.clone(), steps: vec![inst] };
        let j = d.to_json("BV");
        let text = serde_json::to_string(&j).unwrap();
        let back: CertificateJson = serde_json::from_str(&text).unwrap();
        assert_eq!(Derivation::from_json(&back).unwrap(), d);
        let f = d.flip().unwrap();
        assert_eq!(f.conclusion, d.top().negate());
        assert!(check_derivation(&f, &System::bv()).is_ok());
        assert!(d.render_text().contains("s"));
        assert!(d.render_latex().contains("\\mathsf{s}"));
    }
}
