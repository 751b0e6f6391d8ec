//! Symbol classification and basic terms. Measures derivation heights and
//! runtime complexity, and checks cost bounds against them.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::compat::{check_trs, interpret_term, CompatError, Overall, SymbolicValuation, TupleAlgebra};
use crate::interp::compare::SearchConfig;
use crate::rewrite::{Fuel, RewriteError, Trs};
use crate::term::{Term, TermNode};
use crate::types::SimpleType;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum SymbolClass {
    Defined,
    Constructor,
    Neither,
}

#[derive(Debug, Clone, Error)]
pub enum HarnessError {
    #[error("more than {limit} basic terms of size at most {n}; lower --max-n or raise the term budget")]
    TooManyTerms { n: usize, limit: usize },
    #[error("the algebra is not certified compatible (overall verdict: {0}); bounds are not claimed")]
    NotCompatible(Overall),
    #[error("the size interpretation of constructor `{0}` is not bounded by an additive polynomial")]
    NotAdditive(String),
    #[error("the cost of `{0}` is not a ground number")]
    NonGroundCost(String),
    #[error("could not start worker pool: {0}")]
    Pool(String),
    #[error(transparent)]
    Compat(#[from] CompatError),
}

/// Per-symbol classification of a system.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Classification {
    classes: BTreeMap<Arc<str>, SymbolClass>,
    /// Constructors in declaration order.
    #[serde(skip)]
    constructors: Vec<(Arc<str>, SimpleType)>,
    /// Defined symbols in declaration order.
    #[serde(skip)]
    defined: Vec<(Arc<str>, SimpleType)>,
}

/// Defined iff heading a rule; otherwise a constructor iff of order at most 1.
pub fn classify(trs: &Trs) -> Classification {
    let heads = trs.defined_symbols();
    let mut classes = BTreeMap::new();
    let mut constructors = Vec::new();
    let mut defined = Vec::new();
    for (name, ty) in trs.signature().symbols() {
        let c = if heads.contains(&**name) {
            defined.push((name.clone(), ty.clone()));
            SymbolClass::Defined
        } else if ty.order() <= 1 {
            constructors.push((name.clone(), ty.clone()));
            SymbolClass::Constructor
        } else {
            SymbolClass::Neither
        };
        classes.insert(name.clone(), c);
    }
    Classification {
        classes,
        constructors,
        defined,
    }
}

impl Classification {
    pub fn class_of(&self, symbol: &str) -> Option<SymbolClass> {
        self.classes.get(symbol).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Arc<str>, SymbolClass)> {
        self.classes.iter().map(|(k, v)| (k, *v))
    }

    pub fn constructors(&self) -> impl Iterator<Item = &Arc<str>> {
        self.constructors.iter().map(|(n, _)| n)
    }

    pub fn defined(&self) -> impl Iterator<Item = &Arc<str>> {
        self.defined.iter().map(|(n, _)| n)
    }

    fn head_is(&self, t: &Term, class: SymbolClass) -> bool {
        matches!(t.node(), TermNode::Sym { name, .. } if self.class_of(name) == Some(class))
    }

    /// `c d1 .. dk` with `c` a constructor and every `di` data (any type).
    pub fn is_data(&self, t: &Term) -> bool {
        let (head, args) = t.spine();
        self.head_is(head, SymbolClass::Constructor) && args.iter().all(|a| self.is_data(a))
    }

    /// `f d1 .. dm` of base type with `f` defined and every `di` data.
    pub fn is_basic(&self, t: &Term) -> bool {
        let (head, args) = t.spine();
        t.ty().is_base() && self.head_is(head, SymbolClass::Defined) && args.iter().all(|a| self.is_data(a))
    }
}

/// Exhaustive, duplicate-free enumeration of data and basic terms by size.
pub struct Enumerator<'a> {
    classes: &'a Classification,
    data: HashMap<(SimpleType, usize), Arc<Vec<Term>>>,
    limit: usize,
}

impl<'a> Enumerator<'a> {
    pub fn new(classes: &'a Classification, limit: usize) -> Self {
        Enumerator {
            classes,
            data: HashMap::new(),
            limit,
        }
    }

    /// Data terms of type `ty` and size exactly `size`.
    pub fn data(&mut self, ty: &SimpleType, size: usize) -> Result<Arc<Vec<Term>>, HarnessError> {
        let key = (ty.clone(), size);
        if let Some(v) = self.data.get(&key) {
            return Ok(v.clone());
        }
        let mut out = Vec::new();
        if size > 0 {
            for (c, cty) in &self.classes.constructors {
                let (params, _) = cty.uncurry();
                // Partial applications: take as many arguments as make `ty`.
                for k in 0..=params.len() {
                    if result_after(cty, k) != ty {
                        continue;
                    }
                    let head = Term::sym(c, cty.clone());
                    let params: Vec<SimpleType> = params[..k].iter().map(|p| (*p).clone()).collect();
                    self.applications(&head, &params, size - 1, &mut out)?;
                }
            }
        }
        let out = Arc::new(out);
        self.data.insert(key, out.clone());
        Ok(out)
    }

    /// All `head a1 .. ak` with `ai` data of type `params[i]` and sizes summing to `budget`.
    fn applications(
        &mut self,
        head: &Term,
        params: &[SimpleType],
        budget: usize,
        out: &mut Vec<Term>,
    ) -> Result<(), HarnessError> {
        match params.split_first() {
            None => {
                if budget == 0 {
                    out.push(head.clone());
                }
            }
            Some((p, rest)) => {
                if budget < params.len() {
                    return Ok(());
                }
                for s in 1..=budget - rest.len() {
                    for a in self.data(p, s)?.iter() {
                        let t = Term::app(head.clone(), a.clone()).expect("argument types follow the signature");
                        self.applications(&t, rest, budget - s, out)?;
                        if out.len() > self.limit {
                            return Err(HarnessError::TooManyTerms {
                                n: 0,
                                limit: self.limit,
                            });
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Basic terms of size exactly `size`, defined symbols in declaration order.
    pub fn basic(&mut self, size: usize) -> Result<Vec<Term>, HarnessError> {
        let mut out = Vec::new();
        if size == 0 {
            return Ok(out);
        }
        let defined = self.classes.defined.clone();
        for (f, fty) in &defined {
            let (params, _) = fty.uncurry();
            let head = Term::sym(f, fty.clone());
            let params: Vec<SimpleType> = params.into_iter().cloned().collect();
            self.applications(&head, &params, size - 1, &mut out)?;
        }
        Ok(out)
    }
}

fn result_after(ty: &SimpleType, k: usize) -> &SimpleType {
    let mut cur = ty;
    for _ in 0..k {
        cur = cur.as_arrow().expect("k is within the arity").1;
    }
    cur
}

/// Basic terms with size at most `n`, ordered by size and then by
/// generation order. Fails if more than `limit` terms would be produced.
pub fn enumerate_basic(trs: &Trs, n: usize, limit: usize) -> Result<Vec<Term>, HarnessError> {
    let classes = classify(trs);
    let mut e = Enumerator::new(&classes, limit);
    let mut out = Vec::new();
    for size in 1..=n {
        out.extend(e.basic(size).map_err(|err| with_n(err, n))?);
        if out.len() > limit {
            return Err(HarnessError::TooManyTerms { n, limit });
        }
    }
    Ok(out)
}

fn with_n(err: HarnessError, n: usize) -> HarnessError {
    match err {
        HarnessError::TooManyTerms { limit, .. } => HarnessError::TooManyTerms { n, limit },
        e => e,
    }
}

/// Sorts whose argument types admit no data term make a defined symbol
/// contribute nothing; this lists such symbols.
pub fn unproductive_symbols(trs: &Trs) -> Vec<String> {
    let classes = classify(trs);
    let mut inhabited: BTreeSet<SimpleType> = BTreeSet::new();
    // Least fixpoint over constructor partial applications.
    loop {
        let before = inhabited.len();
        for (_, cty) in &classes.constructors {
            let (params, _) = cty.uncurry();
            for k in 0..=params.len() {
                if params[..k].iter().all(|p| inhabited.contains(*p)) {
                    inhabited.insert(result_after(cty, k).clone());
                }
            }
        }
        if inhabited.len() == before {
            break;
        }
    }
    classes
        .defined
        .iter()
        .filter(|(_, ty)| !ty.uncurry().0.iter().all(|p| inhabited.contains(*p)))
        .map(|(n, _)| n.to_string())
        .collect()
}

#[derive(Debug, Clone)]
pub struct HarnessConfig {
    pub fuel: Fuel,
    /// Upper bound on the number of basic terms considered.
    pub max_terms: usize,
    /// Worker threads; `None` uses rayon's default.
    pub jobs: Option<usize>,
    /// Only consider basic terms headed by this symbol.
    pub only_head: Option<Arc<str>>,
    pub search: SearchConfig,
}

impl Default for HarnessConfig {
    fn default() -> Self {
        HarnessConfig {
            fuel: Fuel::default(),
            max_terms: 200_000,
            jobs: None,
            only_head: None,
            search: SearchConfig::default(),
        }
    }
}

impl HarnessConfig {
    fn run<T: Send>(&self, f: impl FnOnce() -> T + Send) -> Result<T, HarnessError> {
        match self.jobs {
            None => Ok(f()),
            Some(j) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(j.max(1))
                    .build()
                    .map_err(|e| HarnessError::Pool(e.to_string()))?;
                Ok(pool.install(f))
            }
        }
    }

    fn basic_terms(&self, trs: &Trs, n: usize) -> Result<Vec<Term>, HarnessError> {
        let mut terms = enumerate_basic(trs, n, self.max_terms)?;
        if let Some(h) = &self.only_head {
            terms.retain(|t| t.head_symbol() == Some(h));
        }
        Ok(terms)
    }
}

/// `Ok(h)` for an exact height, `Err(lb)` when the budget ran out after
/// finding a derivation of length `lb`.
fn height(trs: &Trs, t: &Term, fuel: Fuel) -> Result<u64, u64> {
    match trs.derivation_height(t, fuel) {
        Ok(h) => Ok(h),
        Err(RewriteError::HeightBudgetExhausted { lower_bound }) => Err(lower_bound),
        Err(RewriteError::FuelExhausted { steps, .. }) => Err(steps),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RcRow {
    pub n: usize,
    pub rc: u64,
    /// False when some term exhausted its budget, making `rc` a lower bound.
    pub exact: bool,
    pub basic_terms: usize,
    /// Terms attaining `rc`.
    pub witnesses: Vec<String>,
}

/// `rc(n)` for every `n` in `1..=max_n`. The maximum over no terms is 0.
pub fn rc_table(trs: &Trs, max_n: usize, cfg: &HarnessConfig) -> Result<Vec<RcRow>, HarnessError> {
    let terms = cfg.basic_terms(trs, max_n)?;
    let heights: Vec<Result<u64, u64>> = cfg.run(|| terms.par_iter().map(|t| height(trs, t, cfg.fuel)).collect())?;
    Ok((1..=max_n)
        .map(|n| {
            let upto: Vec<usize> = (0..terms.len()).filter(|&i| terms[i].size() <= n).collect();
            let value = |i: usize| match heights[i] {
                Ok(h) | Err(h) => h,
            };
            let rc = upto.iter().map(|&i| value(i)).max().unwrap_or(0);
            RcRow {
                n,
                rc,
                exact: upto.iter().all(|&i| heights[i].is_ok()),
                basic_terms: upto.len(),
                witnesses: upto
                    .iter()
                    .filter(|&&i| value(i) == rc && rc > 0)
                    .map(|&i| terms[i].to_string())
                    .collect(),
            }
        })
        .collect())
}

/// `rc(n)` alone.
pub fn measure_rc(trs: &Trs, n: usize, cfg: &HarnessConfig) -> Result<RcRow, HarnessError> {
    if n == 0 {
        return Ok(RcRow {
            n,
            rc: 0,
            exact: true,
            basic_terms: 0,
            witnesses: Vec::new(),
        });
    }
    Ok(rc_table(trs, n, cfg)?.pop().expect("n >= 1 gives a row"))
}

/// Numeric cost of `⟦t⟧` for a ground term `t`.
pub fn bound_for(t: &Term, alg: &TupleAlgebra) -> Result<u64, HarnessError> {
    let v = interpret_term(t, alg, &SymbolicValuation::empty())?;
    v.ground_cost()
        .ok_or_else(|| HarnessError::NonGroundCost(t.to_string()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TermRow {
    pub term: String,
    pub size: usize,
    /// Exact derivation height, absent when the budget ran out.
    pub dh: Option<u64>,
    /// Longest derivation found; equals `dh` when that is known.
    pub dh_lower_bound: u64,
    pub bound: u64,
}

impl TermRow {
    pub fn violates(&self) -> bool {
        self.dh_lower_bound > self.bound
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SizeRow {
    pub n: usize,
    pub rc: u64,
    pub exact: bool,
    /// Largest bound among the terms of size at most `n`.
    pub bound: u64,
    pub max_ratio: f64,
    pub witnesses: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComplexityReport {
    pub max_n: usize,
    pub rows: Vec<SizeRow>,
    pub terms: Vec<TermRow>,
    pub violations: Vec<TermRow>,
    pub inconclusive: usize,
    pub unproductive: Vec<String>,
}

impl ComplexityReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty() && self.inconclusive == 0
    }
}

/// Measures `dh(t)` for every basic term of size at most `max_n` and compares
/// it to the cost bound. Refuses unless the algebra is certified compatible
/// and all constructor sizes are additively bounded.
pub fn validate_bounds(
    trs: &Trs,
    alg: &TupleAlgebra,
    max_n: usize,
    cfg: &HarnessConfig,
) -> Result<ComplexityReport, HarnessError> {
    let report = cfg.run(|| check_trs(trs, alg, &cfg.search))??;
    if report.overall != Overall::Compatible {
        return Err(HarnessError::NotCompatible(report.overall));
    }
    let classes = classify(trs);
    for c in classes.constructors() {
        let entry = alg.entry(c).expect("the algebra covers the signature");
        if !entry.is_additively_bounded() {
            return Err(HarnessError::NotAdditive(c.to_string()));
        }
    }
    let terms = cfg.basic_terms(trs, max_n)?;
    let rows: Vec<TermRow> = cfg.run(|| {
        terms
            .par_iter()
            .map(|t| {
                let bound = bound_for(t, alg)?;
                let h = height(trs, t, cfg.fuel);
                Ok(TermRow {
                    term: t.to_string(),
                    size: t.size(),
                    dh: h.ok(),
                    dh_lower_bound: match h {
                        Ok(h) | Err(h) => h,
                    },
                    bound,
                })
            })
            .collect::<Result<Vec<_>, HarnessError>>()
    })??;

    let size_rows = (1..=max_n)
        .map(|n| {
            let upto: Vec<&TermRow> = rows.iter().filter(|r| r.size <= n).collect();
            let rc = upto.iter().map(|r| r.dh_lower_bound).max().unwrap_or(0);
            let ratio = |r: &TermRow| {
                if r.bound == 0 {
                    if r.dh_lower_bound == 0 {
                        0.0
                    } else {
                        f64::INFINITY
                    }
                } else {
                    r.dh_lower_bound as f64 / r.bound as f64
                }
            };
            SizeRow {
                n,
                rc,
                exact: upto.iter().all(|r| r.dh.is_some()),
                bound: upto.iter().map(|r| r.bound).max().unwrap_or(0),
                max_ratio: upto.iter().map(|r| ratio(r)).fold(0.0, f64::max),
                witnesses: upto
                    .iter()
                    .filter(|r| rc > 0 && r.dh_lower_bound == rc)
                    .map(|r| r.term.clone())
                    .collect(),
            }
        })
        .collect();

    Ok(ComplexityReport {
        max_n,
        rows: size_rows,
        violations: rows.iter().filter(|r| r.violates()).cloned().collect(),
        inconclusive: rows.iter().filter(|r| r.dh.is_none()).count(),
        terms: rows,
        unproductive: unproductive_symbols(trs),
    })
}
