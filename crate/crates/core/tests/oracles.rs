//! Cross-checks against deliberately naive reimplementations.

use bv_core::context::decompositions;
use bv_core::enumerate::{alphabet, for_each_multiset, Enumerator};
use bv_core::rules::schema;
use bv_core::search::SearchConfig;
use bv_core::{parse_structure, premisses, Atom, Prover, RuleId, Structure, System, Witness};
use std::collections::{BTreeMap, BTreeSet};

struct Pieces {
    en: Enumerator,
    structures: BTreeMap<Vec<Atom>, Vec<Structure>>,
}

impl Pieces {
    fn new() -> Pieces {
        Pieces { en: Enumerator::new(), structures: BTreeMap::new() }
    }

    fn structures(&mut self, m: &[Atom]) -> Vec<Structure> {
        if m.is_empty() {
            return vec![Structure::Unit];
        }
        let en = &mut self.en;
        self.structures.entry(m.to_vec()).or_insert_with(|| en.over(m)).clone()
    }
}

fn product(lists: &[Vec<Structure>]) -> Vec<Vec<Structure>> {
    lists.iter().fold(vec![vec![]], |acc, l| {
        acc.iter().flat_map(|prefix| l.iter().map(move |x| [prefix.clone(), vec![x.clone()]].concat())).collect()
    })
}

/// Premisses of `s` under `rule`: every substructure in context, against
/// every witness over its atoms.
fn brute_premisses(s: &Structure, rule: RuleId, pieces: &mut Pieces) -> BTreeSet<Structure> {
    let mut out = BTreeSet::new();
    for (ctx, x) in decompositions(s) {
        let m = x.atom_multiset();
        let witnesses: Vec<Witness> = if rule == RuleId::AiDown {
            m.iter().filter(|a| a.is_positive()).map(|a| Witness::Atom(a.clone())).collect()
        } else {
            let arity: usize = if rule == RuleId::S { 3 } else { 4 };
            let mut ws = vec![];
            for code in 0..arity.pow(m.len() as u32) {
                let mut parts = vec![vec![]; arity];
                let mut c = code;
                for a in &m {
                    parts[c % arity].push(a.clone());
                    c /= arity;
                }
                let lists: Vec<Vec<Structure>> = parts.iter().map(|p| pieces.structures(p)).collect();
                for v in product(&lists) {
                    ws.push(match rule {
                        RuleId::S => Witness::Switch { r: v[0].clone(), t: v[1].clone(), r2: v[2].clone() },
                        _ => Witness::Quad { r: v[0].clone(), t: v[1].clone(), r2: v[2].clone(), t2: v[3].clone() },
                    });
                }
            }
            ws
        };
        for w in witnesses {
            let (p, c) = schema(rule, &w).unwrap();
            if c == x {
                let prem = ctx.plug(&p);
                if &prem != s {
                    out.insert(prem);
                }
            }
        }
    }
    out
}

fn samples() -> Vec<Structure> {
    let mut en = Enumerator::new();
    let mut out = vec![];
    for m in [
        vec![Atom::positive("a"), Atom::positive("b"), Atom::positive("c")],
        vec![Atom::positive("a"), Atom::positive("b"), Atom::positive("c"), Atom::positive("d")],
        vec![Atom::positive("a"), Atom::negative("a"), Atom::positive("b"), Atom::negative("b")],
        vec![Atom::positive("a"), Atom::positive("a"), Atom::negative("a")],
    ] {
        let mut m = m;
        m.sort();
        out.extend(en.over(&m));
    }
    out
}

#[test]
fn matcher_agrees_with_brute_force() {
    let mut pieces = Pieces::new();
    let mut compared = 0;
    for s in samples() {
        for rule in [RuleId::AiDown, RuleId::S, RuleId::QDown, RuleId::QUp] {
            let sys = System::new("one", &[rule]);
            let got: BTreeSet<Structure> = premisses(&s, &sys).into_iter().map(|i| i.premiss).collect();
            let want = brute_premisses(&s, rule, &mut pieces);
            assert_eq!(got, want, "{rule} above {s}");
            compared += 1;
        }
    }
    assert!(compared > 1000);
}

#[test]
fn switch_on_three_atoms() {
    let mut pieces = Pieces::new();
    let s = parse_structure("[(a,b),c]").unwrap();
    let want: BTreeSet<Structure> =
        ["([a,c],b)", "([b,c],a)", "(a,b,c)"].iter().map(|x| parse_structure(x).unwrap()).collect();
    assert_eq!(brute_premisses(&s, RuleId::S, &mut pieces), want);
}

/// Provability by plain depth-first search over premisses.
fn naive_provable(s: &Structure, sys: &System, seen: &mut BTreeMap<Structure, bool>) -> bool {
    if s.is_unit() {
        return true;
    }
    if let Some(&v) = seen.get(s) {
        return v;
    }
    seen.insert(s.clone(), false);
    let v = premisses(s, sys).iter().any(|i| naive_provable(&i.premiss, sys, seen));
    seen.insert(s.clone(), v);
    v
}

#[test]
fn prover_agrees_with_naive_search() {
    let sys = System::new("BV without the axiom", &[RuleId::AiDown, RuleId::QDown, RuleId::S]);
    let plain = SearchConfig { memo_enabled: false, prune: false, ..SearchConfig::default() };
    let (mut total, mut provable) = (0, 0);
    for_each_multiset(&alphabet(&["a", "b"]), 4, |_, all| {
        let mut fast = Prover::bv();
        let mut slow = Prover::with_config(System::bv(), plain.clone());
        let mut seen = BTreeMap::new();
        for s in all {
            let want = naive_provable(s, &sys, &mut seen);
            assert_eq!(fast.provable(s), want, "{s}");
            assert_eq!(slow.provable(s), want, "{s}");
            total += 1;
            provable += want as usize;
        }
    });
    assert!(total > 5000 && provable > 50, "{total} {provable}");
}

#[test]
fn up_proofs_use_the_requested_rule() {
    let bv_up = System::bv_up();
    for s in ["[<a;b>,<~a;~b>]", "[a,~a]", "[<(a,b);c>,~b,<~a;~c>]"] {
        let s = parse_structure(s).unwrap();
        let mut p = Prover::with_config(bv_up.clone(), SearchConfig { up_budget: 1, ..SearchConfig::default() });
        let d = p.prove_using(&s, RuleId::AiUp).expect("ai↑ proof");
        assert!(d.count(RuleId::AiUp) > 0);
        assert!(bv_core::check_proof(&d, &bv_up).is_ok());
    }
}
