mod common;

use proptest::prelude::*;

use tuplerc::gen::Gen;
use tuplerc::interp::sem::{Atom, Neutral};
use tuplerc::{
    cmp, obligations, parse_type, sem_apply, shape_of, MaxPoly, MetaType, Mode, SimpleType, SortDecl, TupleAlgebra,
};
use tuplerc::{corpus, parse_spec};

use common::eval_at;

fn sorts() -> Vec<SortDecl> {
    vec![SortDecl::new("nat", &[]), SortDecl::new("list", &["l", "m"])]
}

#[test]
fn shapes_of_small_types() {
    let show = |s: &str| {
        let shape = shape_of(&parse_type(s).unwrap(), &sorts()).unwrap();
        (shape.cost.to_string(), shape.size.to_string())
    };
    assert_eq!(show("nat"), ("ℕ × unit".into(), "ℕ".into()));
    assert_eq!(show("list"), ("ℕ × unit".into(), "ℕ²".into()));
    assert_eq!(show("nat => nat"), ("ℕ × (unit × ℕ ⇒ ℕ × unit)".into(), "ℕ ⇒ ℕ".into()));
    assert!(shape_of(&SimpleType::base("tree"), &sorts()).is_err());
}

#[test]
fn application_of_bundled_entries() {
    let spec = parse_spec(corpus::D_ADD).unwrap();
    let alg = TupleAlgebra::from_spec(&spec).unwrap();
    let zero = alg.value_of("0").unwrap();
    let s = alg.value_of("s").unwrap();
    let d = alg.value_of("d").unwrap();
    let one = sem_apply(&s, &zero).unwrap();
    assert_eq!(one.ground_cost(), Some(0));
    assert_eq!(one.to_string(), "⟨(0, u), 1⟩");
    let two = sem_apply(&d, &one).unwrap();
    // cost 1 + 1, size 2 * 1
    assert_eq!(two.ground_cost(), Some(2));
    assert_eq!(two.size().unwrap().as_nat().unwrap().as_constant(), Some(2));
    assert!(sem_apply(&zero, &zero).is_err());
}

#[test]
fn order_examples() {
    let spec = parse_spec(corpus::D_ADD).unwrap();
    let alg = TupleAlgebra::from_spec(&spec).unwrap();
    let zero = alg.value_of("0").unwrap();
    let s = alg.value_of("s").unwrap();
    let d = alg.value_of("d").unwrap();
    let d0 = sem_apply(&d, &zero).unwrap();
    assert!(cmp(&d0, &zero, Mode::Strict).unwrap());
    assert!(!cmp(&zero, &d0, Mode::Weak).unwrap());
    assert!(cmp(&zero, &zero, Mode::Weak).unwrap());
    assert!(!cmp(&zero, &zero, Mode::Strict).unwrap());
    // d costs more but s is larger at 0: neither dominates the other.
    assert!(!cmp(&d, &s, Mode::Weak).unwrap());
    assert!(!cmp(&s, &d, Mode::Weak).unwrap());
    assert!(cmp(&d, &d, Mode::Weak).unwrap());
    let obls: Vec<String> = obligations(&d0, &zero, Mode::Strict)
        .unwrap()
        .iter()
        .map(|o| o.to_string())
        .collect();
    assert_eq!(obls, ["cost: 1 > 0", "size: 0 ⊒ 0"]);
    assert!(cmp(&zero, &s, Mode::Weak).is_err());
}

#[test]
fn meta_type_helpers() {
    let t = MetaType::fun(MetaType::Nat, MetaType::prod([MetaType::Nat, MetaType::Unit]));
    assert_eq!(t.to_string(), "ℕ ⇒ ℕ × unit");
    assert!(t.same_shape(&t.clone()));
    assert!(!t.same_shape(&MetaType::Nat));
    assert!(t.as_fun().is_some());
}

fn poly(a: u64, b: u64, c: u64) -> MaxPoly {
    let x = MaxPoly::atom(Neutral::atom(Atom::fresh("x", MetaType::Nat)));
    MaxPoly::constant(a)
        .mul(&x)
        .add(&MaxPoly::constant(b))
        .join(&MaxPoly::constant(c))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn polynomial_arithmetic(a in 0u64..5, b in 0u64..5, c in 0u64..20, d in 0u64..5, x in 0u64..50) {
        let p = poly(a, b, c);
        let q = MaxPoly::constant(d);
        let at = |p: &MaxPoly| eval_at(p, &[("x", x)]);
        prop_assert_eq!(at(&p), (a * x + b).max(c));
        prop_assert_eq!(at(&p.add(&q)), at(&p) + d);
        prop_assert_eq!(at(&p.mul(&q)), at(&p) * d);
        prop_assert_eq!(at(&p.join(&q)), at(&p).max(d));
        prop_assert_eq!(at(&p.join(&p)), at(&p));
    }

    #[test]
    fn order_is_reflexive_and_strict_implies_weak(seed in any::<u64>()) {
        let mut g = Gen::new(seed);
        let sorts = Gen::standard_sorts();
        let ty = g.simple_type(&sorts, 2);
        let a = g.value(&ty, &sorts, 3);
        let b = g.value(&ty, &sorts, 3);
        prop_assert!(cmp(&a, &a, Mode::Weak).unwrap());
        prop_assert!(!cmp(&a, &a, Mode::Strict).unwrap());
        if cmp(&a, &b, Mode::Strict).unwrap() {
            prop_assert!(cmp(&a, &b, Mode::Weak).unwrap());
        }
    }

    #[test]
    fn application_keeps_shapes(seed in any::<u64>()) {
        let mut g = Gen::new(seed);
        let sorts = Gen::standard_sorts();
        let dom = g.simple_type(&sorts, 1);
        let cod = g.simple_type(&sorts, 1);
        let f = g.value(&SimpleType::arrow(dom.clone(), cod.clone()), &sorts, 3);
        let x = g.value(&dom, &sorts, 3);
        let r = sem_apply(&f, &x).unwrap();
        prop_assert_eq!(r.shape(), &shape_of(&cod, &sorts).unwrap());
        prop_assert!(r.ground_cost().is_some());
    }
}
