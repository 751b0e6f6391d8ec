use proptest::prelude::*;

use tuplerc::gen::Gen;
use tuplerc::syntax::parse_raw_term;
use tuplerc::term::{typecheck, Substitution};
use tuplerc::{corpus, parse_spec, parse_term, parse_type, SpecFile, Term, TypeError};

fn map_system() -> SpecFile {
    parse_spec(corpus::MAP_VERBATIM).unwrap()
}

fn term(spec: &SpecFile, s: &str) -> Term {
    parse_term(s, &spec.signature, &spec.vars).unwrap()
}

#[test]
fn type_orders() {
    let order = |s: &str| parse_type(s).unwrap().order();
    assert_eq!(order("nat"), 0);
    assert_eq!(order("nat => nat"), 1);
    assert_eq!(order("(nat => nat) => list => list"), 2);
}

#[test]
fn typechecking_examples() {
    let spec = map_system();
    assert_eq!(term(&spec, "map F xs").ty().to_string(), "list");
    assert_eq!(term(&spec, "cons 0").ty().to_string(), "list => list");
    let raw = parse_raw_term("0 0").unwrap();
    let err = typecheck(&raw, &spec.signature, &spec.vars).unwrap_err();
    assert!(matches!(err, TypeError::TypeMismatch { .. }), "{err}");
    let raw = parse_raw_term("frob 0").unwrap();
    let err = typecheck(&raw, &spec.signature, &spec.vars).unwrap_err();
    assert!(matches!(err, TypeError::UnknownIdentifier { .. }), "{err}");
}

#[test]
fn variables_of_terms() {
    let spec = map_system();
    let names = |s: &str| -> Vec<String> { term(&spec, s).vars().iter().map(|v| v.to_string()).collect() };
    assert_eq!(names("add x (s y)"), ["x", "y"]);
    assert!(names("d (s 0)").is_empty());
    assert_eq!(names("comp F G x"), ["F", "G", "x"]);
}

#[test]
fn substitution_examples() {
    let spec = map_system();
    let mut g = Substitution::new();
    g.insert("x".into(), term(&spec, "s 0"));
    assert_eq!(
        term(&spec, "add x 0").substitute(&g).unwrap().to_string(),
        "add (s 0) 0"
    );

    let mut g = Substitution::new();
    g.insert("F".into(), term(&spec, "d"));
    g.insert("x".into(), term(&spec, "0"));
    assert_eq!(term(&spec, "F x").substitute(&g).unwrap().to_string(), "d 0");

    assert_eq!(
        term(&spec, "x").substitute(&Substitution::new()).unwrap(),
        term(&spec, "x")
    );

    let mut bad = Substitution::new();
    bad.insert("x".into(), term(&spec, "nil"));
    assert!(matches!(
        term(&spec, "s x").substitute(&bad),
        Err(TypeError::BindingMismatch { .. })
    ));
}

#[test]
fn term_sizes() {
    let spec = map_system();
    // Leaves of the printed term: every word is one symbol or variable.
    let leaves = |s: &str| s.split([' ', '(', ')']).filter(|w| !w.is_empty()).count();
    for s in ["0", "d (s 0)", "add (s 0) (s (s 0))", "map F (cons x xs)"] {
        assert_eq!(term(&spec, s).size(), leaves(s), "{s}");
    }
    assert_eq!(term(&spec, "d (s 0)").size(), 3);
    assert_eq!(term(&spec, "add (s 0) (s (s 0))").size(), 6);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn substitution_laws(seed in any::<u64>()) {
        let spec = map_system();
        let mut g = Gen::new(seed);
        let sig = &spec.signature;
        let ty = g.simple_type(sig.sorts(), 1);
        let Some(t) = g.term(sig, &spec.vars, &ty, 3) else { return Ok(()) };
        let mut gamma = Substitution::new();
        for (name, vty) in t.typed_vars() {
            if let Some(u) = g.term(sig, &spec.vars, &vty, 2) {
                gamma.insert(name, u);
            }
        }
        let s = t.substitute(&gamma).unwrap();
        prop_assert_eq!(s.ty(), t.ty());
        // Typechecking the printed result gives the same type.
        let again = parse_term(&s.to_string(), sig, &spec.vars).unwrap();
        prop_assert_eq!(again.ty(), t.ty());
        if t.vars().iter().all(|v| gamma.contains_key(v)) {
            let expected: std::collections::BTreeSet<_> =
                t.vars().iter().flat_map(|v| gamma[v].vars()).collect();
            prop_assert_eq!(s.vars(), expected);
        }
        prop_assert!(s.size() >= t.size());
    }

    #[test]
    fn typing_is_deterministic(seed in any::<u64>()) {
        let spec = map_system();
        let mut g = Gen::new(seed);
        let ty = g.simple_type(spec.signature.sorts(), 1);
        if let Some(t) = g.term(&spec.signature, &spec.vars, &ty, 3) {
            let raw = parse_raw_term(&t.to_string()).unwrap();
            let a = typecheck(&raw, &spec.signature, &spec.vars).unwrap();
            let b = typecheck(&raw, &spec.signature, &spec.vars).unwrap();
            prop_assert_eq!(a.ty(), &ty);
            prop_assert_eq!(a, b);
        }
    }
}
