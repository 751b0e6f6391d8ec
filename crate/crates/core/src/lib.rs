//! Innermost runtime-complexity analysis for applicative simply-typed term
//! rewriting systems, using cost-size tuple interpretations.
//!
//! The pipeline: parse a spec file ([`parse_spec`]), run or measure the
//! rewrite system ([`Trs`]), check the interpretation entries rule by rule
//! ([`check_trs`]) and compare the certified cost bounds with measured
//! derivation heights ([`validate_bounds`]).

pub mod compat;
pub mod corpus;
pub mod domain;
pub mod gen;
pub mod harness;
pub mod interp;
pub mod rewrite;
pub mod syntax;
pub mod term;
pub mod types;

pub use compat::{
    check_rule, check_trs, find_counterexample, interpret_term, AlgebraError, CompatError, CompatReport, Overall,
    RuleReport, SymbolicValuation, TupleAlgebra, Verdict,
};
pub use domain::{
    cmp, obligations, sem_apply, shape_of, CostSizeShape, CostSizeValue, MetaType, Mode, Obligation, Relation,
};
pub use harness::{
    bound_for, classify, enumerate_basic, measure_rc, rc_table, validate_bounds, Classification, ComplexityReport,
    HarnessConfig, HarnessError, RcRow, SymbolClass,
};
pub use interp::compare::{Outcome, SearchConfig, Witness};
pub use interp::expr::{InterpEntry, InterpExpr};
pub use interp::poly::MaxPoly;
pub use interp::ShapeError;
pub use rewrite::{Fuel, Normalized, RewriteError, Rule, RuleError, Trace, Trs};
pub use syntax::{parse_expr, parse_interp, parse_spec, parse_term, parse_type, ParseError, SpecFile};
pub use term::{Position, Term, TypeError, VarEnv};
pub use types::{Signature, SimpleType, SortDecl};
