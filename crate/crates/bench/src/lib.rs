//! Shared inputs for the benchmarks.

use tuplerc::{corpus, parse_spec, parse_term, SpecFile, Term, TupleAlgebra};

pub fn load(text: &str) -> (SpecFile, TupleAlgebra) {
    let spec = parse_spec(text).expect("bundled specs parse");
    let alg = TupleAlgebra::from_spec(&spec).expect("bundled specs are interpreted");
    (spec, alg)
}

/// `s^k 0`.
pub fn numeral(k: usize) -> String {
    "s (".repeat(k) + "0" + &")".repeat(k)
}

/// `d (add (s^k 0) (s^k 0))` over the doubling-and-addition system.
pub fn d_add_term(spec: &SpecFile, k: usize) -> Term {
    let n = numeral(k);
    parse_term(&format!("d (add ({n}) ({n}))"), &spec.signature, &spec.vars).expect("well-typed")
}

/// `main (s^k 0) [0, .., 0]` with `len` elements, over the corrected map system.
pub fn main_term(spec: &SpecFile, k: usize, len: usize) -> Term {
    let list = (0..len).fold("nil".to_string(), |acc, _| format!("cons 0 ({acc})"));
    parse_term(&format!("main ({}) ({list})", numeral(k)), &spec.signature, &spec.vars).expect("well-typed")
}

pub fn d_add() -> (SpecFile, TupleAlgebra) {
    load(corpus::D_ADD)
}

pub fn corrected() -> (SpecFile, TupleAlgebra) {
    load(corpus::MAP_CORRECTED)
}
