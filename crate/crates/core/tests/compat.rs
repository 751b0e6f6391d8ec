mod common;

use proptest::prelude::*;

use tuplerc::compat::{find_counterexample, AlgebraError, CompatError};
use tuplerc::gen::{ground_term, Gen};
use tuplerc::harness::classify;
use tuplerc::{
    check_trs, corpus, interpret_term, parse_spec, parse_term, Overall, SearchConfig, SpecFile, SymbolicValuation,
    TupleAlgebra, Verdict,
};

use common::d_add_interp;

fn load(text: &str) -> (SpecFile, TupleAlgebra) {
    let spec = parse_spec(text).unwrap();
    let alg = TupleAlgebra::from_spec(&spec).unwrap();
    (spec, alg)
}

#[test]
fn bundled_verdicts() {
    let cfg = SearchConfig::default();
    for (text, expected) in [
        (corpus::D_ONLY, Overall::Compatible),
        (corpus::D_ADD, Overall::Compatible),
        (corpus::PARTIAL, Overall::Compatible),
        (corpus::MAP_CORRECTED, Overall::Compatible),
        (corpus::MAP_VERBATIM, Overall::Incompatible),
    ] {
        let (spec, alg) = load(text);
        let report = check_trs(&spec.trs(), &alg, &cfg).unwrap();
        assert_eq!(report.overall, expected, "{}", text.lines().next().unwrap());
        assert_eq!(report.rules.len(), spec.rules.len());
        for (i, r) in report.rules.iter().enumerate() {
            assert_eq!(r.index, i);
            assert_eq!(r.rule, spec.rules[i].to_string());
        }
    }
}

#[test]
fn algebra_errors() {
    let base = "sort nat\n0 :: nat\ns :: nat => nat\n0 := cost: 0 ; size: 0\n";
    let spec = parse_spec(base).unwrap();
    assert_eq!(
        TupleAlgebra::from_spec(&spec).unwrap_err(),
        AlgebraError::Missing("s".into())
    );

    let mut spec = parse_spec(&(base.to_string() + "s := cost: \\x. 0 ; size: \\x. x + 1")).unwrap();
    assert!(TupleAlgebra::from_spec(&spec).is_ok());
    let dup = spec.interpretations[1].clone();
    spec.interpretations.push(dup);
    assert_eq!(
        TupleAlgebra::from_spec(&spec).unwrap_err(),
        AlgebraError::Duplicate("s".into())
    );
    spec.interpretations.pop();
    spec.interpretations[1].symbol = "t".into();
    assert_eq!(
        TupleAlgebra::from_spec(&spec).unwrap_err(),
        AlgebraError::Unknown("t".into())
    );
}

#[test]
fn unbound_variables_are_reported() {
    let (spec, alg) = load(corpus::D_ONLY);
    let t = parse_term("d x", &spec.signature, &spec.vars).unwrap();
    let err = interpret_term(&t, &alg, &SymbolicValuation::empty()).unwrap_err();
    assert_eq!(err, CompatError::UnboundVariable("x".into()));
}

#[test]
fn data_terms_cost_nothing() {
    for (name, text) in corpus::ALL {
        let (spec, alg) = load(text);
        let classes = classify(&spec.trs());
        let mut g = Gen::new(0xc057);
        for _ in 0..1000 {
            let Some(t) = ground_term(&mut g, &spec.signature, 4) else {
                continue;
            };
            if classes.is_data(&t) {
                let v = interpret_term(&t, &alg, &SymbolicValuation::empty()).unwrap();
                assert_eq!(v.ground_cost(), Some(0), "{name}: {t}");
            }
        }
    }
}

#[test]
fn report_serializes_to_json() {
    let (spec, alg) = load(corpus::MAP_VERBATIM);
    let report = check_trs(&spec.trs(), &alg, &SearchConfig::default()).unwrap();
    let json: serde_json::Value = serde_json::to_value(&report).unwrap();
    assert_eq!(json["overall"], "incompatible");
    let rules = json["rules"].as_array().unwrap();
    assert_eq!(rules.len(), 8);
    assert_eq!(rules[0]["verdict"]["status"], "certified");
    let map = &rules[1]["verdict"];
    assert_eq!(map["status"], "refuted");
    assert!(map["witness"]["assignments"].as_array().is_some_and(|a| !a.is_empty()));
    assert!(rules[0].get("raw").is_none());
    for r in rules {
        for o in r["obligations"].as_array().unwrap() {
            assert!(o["path"].is_string() && o["lhs"].is_string() && o["rhs"].is_string());
        }
    }
}

/// A `0, s, d, add` algebra with linear entries chosen by the caller.
fn d_add_algebra(c: [u64; 9]) -> String {
    let [s_size, d_cost_x, d_cost, d_size, add_cost_x, add_cost_y, add_cost, add_size, max_size] = c;
    let add_size = if max_size % 2 == 0 {
        format!("x + y + {add_size}")
    } else {
        format!("max(x, y) + {add_size}")
    };
    format!(
        "sort nat\n0 :: nat\ns :: nat => nat\nd :: nat => nat\nadd :: nat => nat => nat\nvar x y :: nat\n\
         d 0 -> 0\nd (s x) -> s (s (d x))\nadd x 0 -> x\nadd x (s y) -> s (add x y)\n\
         0 := cost: 0 ; size: 0\n\
         s := cost: \\x. 0 ; size: \\x. x + {s_size}\n\
         d := cost: \\x. {d_cost_x} * x + {d_cost} ; size: \\x. {d_size} * x\n\
         add := cost: \\x y. {add_cost_x} * x + {add_cost_y} * y + {add_cost} ; size: \\x y. {add_size}\n"
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn certified_rules_have_no_counterexample(c in proptest::array::uniform9(0u64..4)) {
        let (spec, alg) = load(&d_add_algebra(c));
        let cfg = SearchConfig { budget: 2000, samples: 200, ..SearchConfig::default() };
        let report = check_trs(&spec.trs(), &alg, &cfg).unwrap();
        for (r, rep) in spec.rules.iter().zip(&report.rules) {
            let found = find_counterexample(r, &alg, &cfg).unwrap();
            match &rep.verdict {
                Verdict::Certified => prop_assert!(found.is_none(), "{r}: {:?}", found),
                Verdict::Refuted { .. } => {
                    let (o, w) = found.expect("the checker found one");
                    prop_assert!(w.violates(&o.lhs, &o.rhs, o.relation.is_strict()));
                }
                Verdict::Unknown { .. } => {}
            }
        }
    }
}

#[test]
fn d_add_entries_match_closure_oracle() {
    let (spec, alg) = load(corpus::D_ADD);
    let mut g = Gen::new(0x0dd);
    let mut checked = 0;
    while checked < 500 {
        let Some(t) = ground_term(&mut g, &spec.signature, 4) else {
            continue;
        };
        if !t.ty().is_base() {
            continue;
        }
        let v = interpret_term(&t, &alg, &SymbolicValuation::empty()).unwrap();
        let (cost, size) = d_add_interp(&t).unwrap();
        assert_eq!(v.ground_cost(), Some(cost), "{t}");
        assert_eq!(v.size().unwrap().as_nat().unwrap().as_constant(), Some(size), "{t}");
        checked += 1;
    }
}
