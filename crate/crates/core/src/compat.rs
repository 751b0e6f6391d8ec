//! Tuple algebras, term interpretation and per-rule compatibility verdicts.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::domain::{
    apply_values, cost_fun_type, lift, obligations, shape_of, CostSizeValue, Mode, Obligation, Relation,
};
use crate::interp::compare::{search, Outcome, SearchConfig, Witness};
use crate::interp::elab::up;
use crate::interp::expr::InterpEntry;
use crate::interp::sem::{eval, fresh_value, Atom, Env, Sem, Val};
use crate::interp::{check_entry, CheckedEntry, ShapeError};
use crate::rewrite::{Rule, Trs};
use crate::syntax::SpecFile;
use crate::term::{Term, TermNode};
use crate::types::{Signature, SimpleType};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("no interpretation given for symbol `{0}`")]
    Missing(String),
    #[error("interpretation given for undeclared symbol `{0}`")]
    Unknown(String),
    #[error("symbol `{0}` is interpreted twice")]
    Duplicate(String),
    #[error("interpretation of `{symbol}`: {source}")]
    Shape {
        symbol: String,
        #[source]
        source: ShapeError,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompatError {
    #[error("variable `{0}` has no value in the valuation")]
    UnboundVariable(String),
    #[error("symbol `{0}` has no interpretation")]
    UnknownSymbol(String),
    #[error(transparent)]
    Shape(#[from] ShapeError),
}

impl From<crate::interp::sem::EvalError> for CompatError {
    fn from(e: crate::interp::sem::EvalError) -> Self {
        CompatError::Shape(e.into())
    }
}

/// An interpretation `⟦f⟧ ∈ ⟦typeOf(f)⟧` for every symbol.
#[derive(Debug, Clone)]
pub struct TupleAlgebra {
    signature: Signature,
    entries: Vec<CheckedEntry>,
    index: HashMap<Arc<str>, usize>,
}

impl TupleAlgebra {
    pub fn new(signature: &Signature, entries: &[InterpEntry]) -> Result<Self, AlgebraError> {
        let mut by_name: HashMap<&str, &InterpEntry> = HashMap::new();
        for e in entries {
            if !signature.contains(&e.symbol) {
                return Err(AlgebraError::Unknown(e.symbol.clone()));
            }
            if by_name.insert(&e.symbol, e).is_some() {
                return Err(AlgebraError::Duplicate(e.symbol.clone()));
            }
        }
        let mut checked = Vec::new();
        let mut index = HashMap::new();
        for (name, ty) in signature.symbols() {
            let e = by_name
                .get(&**name)
                .ok_or_else(|| AlgebraError::Missing(name.to_string()))?;
            let c = check_entry(signature, ty, e).map_err(|source| AlgebraError::Shape {
                symbol: name.to_string(),
                source,
            })?;
            index.insert(name.clone(), checked.len());
            checked.push(c);
        }
        Ok(TupleAlgebra {
            signature: signature.clone(),
            entries: checked,
            index,
        })
    }

    pub fn from_spec(spec: &SpecFile) -> Result<Self, AlgebraError> {
        TupleAlgebra::new(&spec.signature, &spec.interpretations)
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn entries(&self) -> &[CheckedEntry] {
        &self.entries
    }

    pub fn entry(&self, symbol: &str) -> Option<&CheckedEntry> {
        self.index.get(symbol).map(|&i| &self.entries[i])
    }

    pub fn value_of(&self, symbol: &str) -> Option<CostSizeValue> {
        let e = self.entry(symbol)?;
        Some(CostSizeValue::new_unchecked(e.shape.clone(), e.value.clone()))
    }
}

/// Values for variables: base variables get `⟨(0, u), x⟩` with size atoms,
/// functional ones `⟨(0, F.c), F.s⟩` with function atoms.
#[derive(Debug, Clone, Default)]
pub struct SymbolicValuation {
    vars: BTreeMap<Arc<str>, CostSizeValue>,
}

impl SymbolicValuation {
    pub fn empty() -> Self {
        SymbolicValuation::default()
    }

    pub fn for_vars(vars: &BTreeMap<Arc<str>, SimpleType>, sig: &Signature) -> Result<Self, ShapeError> {
        let mut out = BTreeMap::new();
        for (name, ty) in vars {
            let shape = shape_of(ty, sig.sorts())?;
            let size = fresh_value(&shape.size, &format!("{name}"));
            let cost_fun = if ty.is_base() {
                Val::Unit
            } else {
                let cf = cost_fun_type(ty, sig.sorts()).map_err(ShapeError::UnknownSort)?;
                let atom = Atom::fresh(&format!("{name}.c"), lift(&cf));
                eval(&up(&cf, Sem::Atom(atom)), &Env::default(), 0)?
            };
            let size = if ty.is_base() {
                size
            } else {
                fresh_value(&shape.size, &format!("{name}.s"))
            };
            let val = Val::tuple(vec![Val::tuple(vec![Val::nat(0), cost_fun]), size]);
            out.insert(name.clone(), CostSizeValue::new_unchecked(shape, val));
        }
        Ok(SymbolicValuation { vars: out })
    }

    pub fn get(&self, name: &str) -> Option<&CostSizeValue> {
        self.vars.get(name)
    }

    pub fn insert(&mut self, name: &str, value: CostSizeValue) {
        self.vars.insert(Arc::from(name), value);
    }
}

/// `⟦x⟧ = α(x)`, `⟦f⟧` from the algebra, `⟦s t⟧ = ⟦s⟧ · ⟦t⟧`.
pub fn interpret_term(t: &Term, alg: &TupleAlgebra, alpha: &SymbolicValuation) -> Result<CostSizeValue, CompatError> {
    match t.node() {
        TermNode::Var { name, .. } => alpha
            .get(name)
            .cloned()
            .ok_or_else(|| CompatError::UnboundVariable(name.to_string())),
        TermNode::Sym { name, .. } => alg
            .value_of(name)
            .ok_or_else(|| CompatError::UnknownSymbol(name.to_string())),
        TermNode::App { fun, arg, .. } => {
            let f = interpret_term(fun, alg, alpha)?;
            let x = interpret_term(arg, alg, alpha)?;
            let shape = f.shape().result().expect("well-typed application");
            Ok(CostSizeValue::new_unchecked(shape, apply_values(f.val(), x.val())?))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum Verdict {
    Certified,
    Refuted { obligation: String, witness: Witness },
    Unknown { reason: String },
}

impl Verdict {
    pub fn is_certified(&self) -> bool {
        matches!(self, Verdict::Certified)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Certified => write!(f, "Certified"),
            Verdict::Refuted { obligation, witness } => {
                write!(f, "Refuted at {obligation} with {witness}")
            }
            Verdict::Unknown { reason } => write!(f, "Unknown ({reason})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ObligationStatus {
    Certified,
    Refuted,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ObligationReport {
    pub path: String,
    pub lhs: String,
    pub relation: Relation,
    pub rhs: String,
    pub status: ObligationStatus,
}

#[derive(Debug, Clone, Serialize)]
pub struct RuleReport {
    pub index: usize,
    pub rule: String,
    pub lhs_value: String,
    pub rhs_value: String,
    pub obligations: Vec<ObligationReport>,
    pub verdict: Verdict,
    /// The inequalities themselves, for re-checking witnesses.
    #[serde(skip)]
    pub raw: Vec<Obligation>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Overall {
    Compatible,
    Incompatible,
    Unknown,
}

impl fmt::Display for Overall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Overall::Compatible => "Compatible",
            Overall::Incompatible => "Incompatible",
            Overall::Unknown => "Unknown",
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CompatReport {
    pub overall: Overall,
    pub rules: Vec<RuleReport>,
}

impl CompatReport {
    pub fn is_compatible(&self) -> bool {
        self.overall == Overall::Compatible
    }
}

/// Both sides of a rule under a fresh symbolic valuation of its variables.
pub fn interpret_rule(rule: &Rule, alg: &TupleAlgebra) -> Result<(CostSizeValue, CostSizeValue), CompatError> {
    let alpha = SymbolicValuation::for_vars(&rule.lhs().typed_vars(), alg.signature())?;
    Ok((
        interpret_term(rule.lhs(), alg, &alpha)?,
        interpret_term(rule.rhs(), alg, &alpha)?,
    ))
}

/// Decides `⟦ℓ⟧ ≻ ⟦r⟧`: strict on the numeric cost, weak elsewhere.
pub fn check_rule(
    index: usize,
    rule: &Rule,
    alg: &TupleAlgebra,
    cfg: &SearchConfig,
) -> Result<RuleReport, CompatError> {
    let (l, r) = interpret_rule(rule, alg)?;
    let obls = obligations(&l, &r, Mode::Strict)?;
    let mut reports = Vec::new();
    let mut refuted: Option<(String, Witness)> = None;
    let mut unknown: Option<String> = None;
    for o in &obls {
        let status = match o.decide(cfg) {
            Outcome::Certified => ObligationStatus::Certified,
            Outcome::Refuted(w) => {
                refuted.get_or_insert_with(|| (o.to_string(), w));
                ObligationStatus::Refuted
            }
            Outcome::Unknown => {
                unknown.get_or_insert_with(|| format!("could not decide {o}"));
                ObligationStatus::Unknown
            }
        };
        reports.push(ObligationReport {
            path: o.path.clone(),
            lhs: o.lhs.to_string(),
            relation: o.relation,
            rhs: o.rhs.to_string(),
            status,
        });
    }
    let verdict = match (refuted, unknown) {
        (Some((obligation, witness)), _) => Verdict::Refuted { obligation, witness },
        (None, Some(reason)) => Verdict::Unknown { reason },
        (None, None) => Verdict::Certified,
    };
    Ok(RuleReport {
        index,
        rule: rule.to_string(),
        lhs_value: l.to_string(),
        rhs_value: r.to_string(),
        obligations: reports,
        verdict,
        raw: obls,
    })
}

/// Checks every rule; `Compatible` only if all are certified.
pub fn check_trs(trs: &Trs, alg: &TupleAlgebra, cfg: &SearchConfig) -> Result<CompatReport, CompatError> {
    let rules: Vec<RuleReport> = trs
        .rules()
        .par_iter()
        .enumerate()
        .map(|(i, r)| check_rule(i, r, alg, cfg))
        .collect::<Result<_, _>>()?;
    let overall = if rules.iter().all(|r| r.verdict.is_certified()) {
        Overall::Compatible
    } else if rules.iter().any(|r| matches!(r.verdict, Verdict::Refuted { .. })) {
        Overall::Incompatible
    } else {
        Overall::Unknown
    };
    Ok(CompatReport { overall, rules })
}

/// Searches atom values violating `⟦ℓ⟧ ≻ ⟦r⟧`, without trying to certify
/// first. `None` means the budget ran out, not that the rule is compatible.
pub fn find_counterexample(
    rule: &Rule,
    alg: &TupleAlgebra,
    cfg: &SearchConfig,
) -> Result<Option<(Obligation, Witness)>, CompatError> {
    let (l, r) = interpret_rule(rule, alg)?;
    for o in obligations(&l, &r, Mode::Strict)? {
        if let Some(w) = search(&o.lhs, &o.rhs, o.relation.is_strict(), cfg) {
            return Ok(Some((o, w)));
        }
    }
    Ok(None)
}
