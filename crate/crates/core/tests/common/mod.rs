//! Independent oracles shared by the integration tests. None of these call
//! into the rewrite engine, the enumerator or the interpreter.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use tuplerc::interp::compare::atom_names;
use tuplerc::interp::sem::{instantiate, Instantiation, Val};
use tuplerc::term::TermNode;
use tuplerc::{MaxPoly, Rule, Signature, SimpleType, Term};

/// Value of a unary numeral `s (.. (s 0))`.
pub fn numeral(t: &Term) -> Option<u64> {
    let (head, args) = t.spine();
    match (head_name(head)?, args.as_slice()) {
        ("0", []) => Some(0),
        ("s", [a]) => Some(numeral(a)? + 1),
        _ => None,
    }
}

fn head_name(t: &Term) -> Option<&str> {
    match t.node() {
        TermNode::Sym { name, .. } => Some(name),
        _ => None,
    }
}

/// `(value, innermost steps)` of a ground term over `0, s, d, add`, by
/// arithmetic: `d` on `k` takes `k + 1` steps, `add a b` takes `b + 1`.
/// Every innermost derivation has this length, so it is also `dh`.
pub fn d_add_eval(t: &Term) -> Option<(u64, u64)> {
    let (head, args) = t.spine();
    let ev: Option<Vec<(u64, u64)>> = args.iter().map(|a| d_add_eval(a)).collect();
    let ev = ev?;
    match (head_name(head)?, ev.as_slice()) {
        ("0", []) => Some((0, 0)),
        ("s", [(v, n)]) => Some((v + 1, *n)),
        ("d", [(v, n)]) => Some((2 * v, n + v + 1)),
        ("add", [(a, n), (b, m)]) => Some((a + b, n + m + b + 1)),
        _ => None,
    }
}

/// The bundled interpretation of `0, s, d, add`, written as closures:
/// returns `(numeric cost, size)` of a ground term.
pub fn d_add_interp(t: &Term) -> Option<(u64, u64)> {
    let (head, args) = t.spine();
    let ev: Option<Vec<(u64, u64)>> = args.iter().map(|a| d_add_interp(a)).collect();
    let ev = ev?;
    let cost_d = |x: u64| x + 1;
    let size_d = |x: u64| 2 * x;
    let cost_add = |_x: u64, y: u64| y + 1;
    let size_add = |x: u64, y: u64| x + y;
    match (head_name(head)?, ev.as_slice()) {
        ("0", []) => Some((0, 0)),
        ("s", [(c, x)]) => Some((*c, x + 1)),
        ("d", [(c, x)]) => Some((c + cost_d(*x), size_d(*x))),
        ("add", [(c1, x), (c2, y)]) => Some((c1 + c2 + cost_add(*x, *y), size_add(*x, *y))),
        _ => None,
    }
}

/// Evaluates a max-polynomial whose atoms are natural numbers, by name.
pub fn eval_at(p: &MaxPoly, values: &[(&str, u64)]) -> u64 {
    let mut map = BTreeMap::new();
    for (id, name) in atom_names(p) {
        let v = values
            .iter()
            .find(|(n, _)| *n == name)
            .unwrap_or_else(|| panic!("no value for {name}"))
            .1;
        map.insert(id, Val::nat(v));
    }
    instantiate(p, &Instantiation::new(map), 0)
        .expect("natural atoms")
        .as_constant()
        .expect("all atoms instantiated")
}

/// Symbols heading a rule, computed from the rules alone.
pub fn rule_heads(rules: &[Rule]) -> BTreeSet<String> {
    rules
        .iter()
        .filter_map(|r| head_name(r.lhs().spine().0).map(str::to_string))
        .collect()
}

/// All closed well-typed terms of size at most `n`, built bottom-up by
/// applying every term to every term.
pub fn all_closed_terms(sig: &Signature, n: usize) -> Vec<Term> {
    let mut by_size: Vec<Vec<Term>> = vec![Vec::new(); n + 1];
    if n == 0 {
        return Vec::new();
    }
    for (name, ty) in sig.symbols() {
        by_size[1].push(Term::sym(name, ty.clone()));
    }
    for k in 2..=n {
        let mut out = Vec::new();
        for i in 1..k {
            for f in &by_size[i] {
                for a in &by_size[k - i] {
                    if let Ok(t) = Term::app(f.clone(), a.clone()) {
                        out.push(t);
                    }
                }
            }
        }
        by_size[k] = out;
    }
    by_size.into_iter().flatten().collect()
}

fn is_data_oracle(t: &Term, defined: &BTreeSet<String>, sig: &Signature) -> bool {
    let (head, args) = t.spine();
    match head_name(head) {
        Some(name) => {
            !defined.contains(name)
                && sig.type_of(name).is_some_and(|ty| ty.order() <= 1)
                && args.iter().all(|a| is_data_oracle(a, defined, sig))
        }
        None => false,
    }
}

/// Naive generate-and-filter enumeration of basic terms.
pub fn basic_terms_oracle(sig: &Signature, rules: &[Rule], n: usize) -> BTreeSet<String> {
    let defined = rule_heads(rules);
    all_closed_terms(sig, n)
        .into_iter()
        .filter(|t| {
            let (head, args) = t.spine();
            matches!(t.ty(), SimpleType::Base(_))
                && head_name(head).is_some_and(|h| defined.contains(h))
                && args.iter().all(|a| is_data_oracle(a, &defined, sig))
        })
        .map(|t| t.to_string())
        .collect()
}

/// Longest path in the innermost reduction graph, given a successor
/// function, by plain recursion with memoisation.
pub fn longest_path(t: &Term, succ: &dyn Fn(&Term) -> Vec<Term>, memo: &mut HashMap<Term, u64>) -> u64 {
    if let Some(&h) = memo.get(t) {
        return h;
    }
    let h = succ(t)
        .iter()
        .map(|s| 1 + longest_path(s, succ, memo))
        .max()
        .unwrap_or(0);
    memo.insert(t.clone(), h);
    h
}

pub fn arc(s: &str) -> Arc<str> {
    Arc::from(s)
}
