use bv_core::mll::{from_structure, parse_formula, to_structure, Formula};
use bv_core::web::{check_axioms, reconstruct, web_of};
use bv_core::{parse_structure, Structure};
use proptest::prelude::*;

/// Raw concrete syntax, units and negations anywhere.
fn term() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        Just("o".to_string()),
        "[a-d]".prop_map(|s| s),
        "[a-d]".prop_map(|s| format!("~{s}")),
    ];
    leaf.prop_recursive(4, 24, 4, |inner| {
        (0..3usize, prop::collection::vec(inner, 1..4), any::<bool>()).prop_map(|(k, xs, neg)| {
            let (l, r, sep) = [("<", ">", ";"), ("[", "]", ","), ("(", ")", ",")][k];
            format!("{}{l}{}{r}", if neg { "~" } else { "" }, xs.join(sep))
        })
    })
}

fn formula() -> impl Strategy<Value = Formula> {
    let leaf = ("[a-c]", any::<bool>()).prop_map(|(n, p)| Formula::atom(&n, p));
    leaf.prop_recursive(4, 16, 2, |inner| {
        (inner.clone(), inner, any::<bool>()).prop_map(|(a, b, par)| if par { Formula::par(a, b) } else { Formula::times(a, b) })
    })
}

proptest! {
    #[test]
    fn print_parse_roundtrip(t in term()) {
        let s = parse_structure(&t).unwrap();
        prop_assert!(s.is_canonical());
        let printed = s.to_string();
        let again = parse_structure(&printed).unwrap();
        prop_assert_eq!(&again, &s);
        prop_assert_eq!(again.to_string(), printed);
    }

    #[test]
    fn negation_is_an_involution(t in term()) {
        let s = parse_structure(&t).unwrap();
        prop_assert_eq!(s.negate().negate(), s.clone());
        prop_assert_eq!(parse_structure(&format!("~<{t}>")).unwrap(), s.negate());
        let mut atoms: Vec<_> = s.atom_multiset().iter().map(|a| a.dual()).collect();
        atoms.sort();
        prop_assert_eq!(s.negate().atom_multiset(), atoms);
    }

    #[test]
    fn webs_determine_structures(t in term()) {
        let s = parse_structure(&t).unwrap();
        let w = web_of(&s);
        prop_assert!(check_axioms(&w).passes());
        prop_assert_eq!(reconstruct(&w).unwrap(), s);
    }

    #[test]
    fn formula_roundtrips(f in formula()) {
        prop_assert_eq!(parse_formula(&f.to_string()).unwrap().ac_normal(), f.ac_normal());
        let s = to_structure(&f);
        prop_assert_eq!(from_structure(&s).unwrap().ac_normal(), f.ac_normal());
        prop_assert_eq!(to_structure(&f.negate()), s.negate());
        prop_assert_eq!(f.negate().negate(), f);
    }
}

#[test]
fn units_vanish() {
    assert_eq!(parse_structure("<o;[o,(o)]>").unwrap(), Structure::Unit);
    assert_eq!(parse_structure("<a;[o,b]>").unwrap(), parse_structure("<a;b>").unwrap());
}
