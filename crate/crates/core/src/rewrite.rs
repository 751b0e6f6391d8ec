//! Matching and the innermost rewrite relation, with normalisation and derivation height.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::term::{Position, Side, Substitution, Term, TermNode};
use crate::types::{Signature, SimpleType};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleError {
    #[error("left-hand side must be headed by a function symbol")]
    HeadNotSymbol,
    #[error("left-hand side has type {lhs} but right-hand side has type {rhs}")]
    TypeMismatch { lhs: SimpleType, rhs: SimpleType },
    #[error("variable `{0}` occurs on the right but not on the left")]
    UnboundVariable(String),
    #[error("rule mentions symbol `{0}` which the signature does not declare with that type")]
    ForeignSymbol(String),
}

/// A rewrite rule `f l1 .. lm -> r` with both sides of the same type.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Rule {
    lhs: Term,
    rhs: Term,
}

impl Rule {
    pub fn new(lhs: Term, rhs: Term) -> Result<Rule, RuleError> {
        if lhs.head_symbol().is_none() {
            return Err(RuleError::HeadNotSymbol);
        }
        if lhs.ty() != rhs.ty() {
            return Err(RuleError::TypeMismatch {
                lhs: lhs.ty().clone(),
                rhs: rhs.ty().clone(),
            });
        }
        let lv = lhs.vars();
        if let Some(v) = rhs.vars().into_iter().find(|v| !lv.contains(v)) {
            return Err(RuleError::UnboundVariable(v.to_string()));
        }
        Ok(Rule { lhs, rhs })
    }

    pub fn lhs(&self) -> &Term {
        &self.lhs
    }

    pub fn rhs(&self) -> &Term {
        &self.rhs
    }

    pub fn head(&self) -> &Arc<str> {
        self.lhs.head_symbol().expect("checked in Rule::new")
    }

    fn lhs_arity(&self) -> usize {
        self.lhs.spine().1.len()
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.lhs, self.rhs)
    }
}

/// First-order syntactic matching on the applicative tree. Repeated
/// variables must bind equal terms.
pub fn matches(pattern: &Term, subject: &Term) -> Option<Substitution> {
    let mut subst = Substitution::new();
    match_into(pattern, subject, &mut subst).then_some(subst)
}

fn match_into(pattern: &Term, subject: &Term, subst: &mut Substitution) -> bool {
    match (pattern.node(), subject.node()) {
        (TermNode::Var { name, ty }, _) => {
            if ty != subject.ty() {
                return false;
            }
            match subst.get(name) {
                Some(bound) => bound == subject,
                None => {
                    subst.insert(name.clone(), subject.clone());
                    true
                }
            }
        }
        (TermNode::Sym { name: a, .. }, TermNode::Sym { name: b, .. }) => a == b,
        (TermNode::App { fun: pf, arg: pa, .. }, TermNode::App { fun: sf, arg: sa, .. }) => {
            match_into(pf, sf, subst) && match_into(pa, sa, subst)
        }
        _ => false,
    }
}

/// One innermost step: the resulting term, where the redex was, which rule fired.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Step {
    pub term: Term,
    pub position: Position,
    pub rule: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    pub term: Term,
    pub position: Position,
    pub rule: usize,
}

/// Terms visited by a run, each with the redex contracted next.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Trace {
    pub steps: Vec<TraceStep>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Normalized {
    pub term: Term,
    pub steps: u64,
    pub trace: Trace,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RewriteError {
    #[error("fuel exhausted after {steps} steps at `{last}`")]
    FuelExhausted { last: Term, steps: u64 },
    #[error("exploration budget exhausted; derivation height is at least {lower_bound}")]
    HeightBudgetExhausted { lower_bound: u64 },
}

/// Limits for exhaustive exploration of the innermost reduction graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fuel {
    pub max_nodes: usize,
    pub max_depth: usize,
}

impl Default for Fuel {
    fn default() -> Self {
        Fuel {
            max_nodes: 1_000_000,
            max_depth: 10_000,
        }
    }
}

/// A signature with a list of rules.
#[derive(Debug, Clone)]
pub struct Trs {
    signature: Signature,
    rules: Vec<Rule>,
    by_head: HashMap<Arc<str>, Vec<usize>>,
}

impl Trs {
    pub fn new(signature: Signature, rules: Vec<Rule>) -> Result<Trs, RuleError> {
        let mut by_head: HashMap<Arc<str>, Vec<usize>> = HashMap::new();
        for (i, r) in rules.iter().enumerate() {
            let mut foreign = None;
            r.lhs.walk(&mut |t| check_symbol(&signature, t, &mut foreign));
            r.rhs.walk(&mut |t| check_symbol(&signature, t, &mut foreign));
            if let Some(name) = foreign {
                return Err(RuleError::ForeignSymbol(name));
            }
            by_head.entry(r.head().clone()).or_default().push(i);
        }
        Ok(Trs {
            signature,
            rules,
            by_head,
        })
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    /// Symbols heading some left-hand side.
    pub fn defined_symbols(&self) -> HashSet<&str> {
        self.by_head.keys().map(|k| &**k).collect()
    }

    /// Rules whose left-hand side matches `t` at the root, with their contracta.
    fn root_contracta(&self, t: &Term) -> Vec<(usize, Term)> {
        let (head, args) = t.spine();
        let TermNode::Sym { name, .. } = head.node() else {
            return Vec::new();
        };
        let Some(candidates) = self.by_head.get(name) else {
            return Vec::new();
        };
        candidates
            .iter()
            .filter(|&&i| self.rules[i].lhs_arity() == args.len())
            .filter_map(|&i| {
                let r = &self.rules[i];
                matches(&r.lhs, t).map(|s| (i, r.rhs.apply_subst(&s)))
            })
            .collect()
    }

    pub fn is_root_redex(&self, t: &Term) -> bool {
        !self.root_contracta(t).is_empty()
    }

    /// True iff no subterm is a redex.
    pub fn is_normal_form(&self, t: &Term) -> bool {
        match t.node() {
            TermNode::App { fun, arg, .. } => {
                self.is_normal_form(fun) && self.is_normal_form(arg) && !self.is_root_redex(t)
            }
            _ => !self.is_root_redex(t),
        }
    }

    /// All one-step innermost reducts of `t`, leftmost-innermost first.
    pub fn innermost_successors(&self, t: &Term) -> Vec<Step> {
        let mut path = Vec::new();
        let mut out = Vec::new();
        self.successors_into(t, &mut path, &mut out);
        out.into_iter()
            .map(|(pos, rule, contractum)| Step {
                term: t.replace_at(&pos, contractum),
                position: Position(pos),
                rule,
            })
            .collect()
    }

    /// Collects `(position, rule, contractum)` for innermost redexes; returns
    /// whether `t` is a normal form.
    fn successors_into(&self, t: &Term, path: &mut Vec<Side>, out: &mut Vec<(Vec<Side>, usize, Term)>) -> bool {
        let children_normal = match t.node() {
            TermNode::App { fun, arg, .. } => {
                path.push(Side::Fun);
                let nf = self.successors_into(fun, path, out);
                path.pop();
                path.push(Side::Arg);
                let na = self.successors_into(arg, path, out);
                path.pop();
                nf && na
            }
            _ => true,
        };
        if !children_normal {
            return false;
        }
        let contracta = self.root_contracta(t);
        let normal = contracta.is_empty();
        out.extend(contracta.into_iter().map(|(i, c)| (path.clone(), i, c)));
        normal
    }

    /// Contracts the leftmost-innermost redex until a normal form is reached.
    pub fn normalize(&self, t: &Term, fuel: u64) -> Result<Normalized, RewriteError> {
        let mut cur = t.clone();
        let mut trace = Trace::default();
        let mut steps = 0;
        loop {
            let mut succ = self.innermost_successors(&cur);
            if succ.is_empty() {
                return Ok(Normalized {
                    term: cur,
                    steps,
                    trace,
                });
            }
            if steps >= fuel {
                return Err(RewriteError::FuelExhausted { last: cur, steps });
            }
            let step = succ.swap_remove(0);
            trace.steps.push(TraceStep {
                term: cur,
                position: step.position,
                rule: step.rule,
            });
            cur = step.term;
            steps += 1;
        }
    }

    /// Length of the longest innermost derivation from `t`, by memoised
    /// exhaustive search of the reduction graph.
    pub fn derivation_height(&self, t: &Term, fuel: Fuel) -> Result<u64, RewriteError> {
        struct Frame {
            term: Term,
            succs: Vec<Term>,
            next: usize,
            best: u64,
        }
        let distinct = |t: &Term| -> Vec<Term> {
            let mut seen = HashSet::new();
            self.innermost_successors(t)
                .into_iter()
                .map(|s| s.term)
                .filter(|s| seen.insert(s.clone()))
                .collect()
        };

        let mut memo: HashMap<Term, u64> = HashMap::new();
        let mut on_path: HashSet<Term> = HashSet::new();
        let mut lower_bound = 0u64;
        let mut explored = 1usize;
        on_path.insert(t.clone());
        let mut stack = vec![Frame {
            term: t.clone(),
            succs: distinct(t),
            next: 0,
            best: 0,
        }];

        while let Some(top) = stack.last_mut() {
            if top.next < top.succs.len() {
                let s = top.succs[top.next].clone();
                top.next += 1;
                let depth = stack.len() as u64;
                if let Some(&h) = memo.get(&s) {
                    let top = stack.last_mut().unwrap();
                    top.best = top.best.max(h + 1);
                    lower_bound = lower_bound.max(depth - 1 + h + 1);
                    continue;
                }
                lower_bound = lower_bound.max(depth);
                explored += 1;
                if on_path.contains(&s) || stack.len() >= fuel.max_depth || explored > fuel.max_nodes {
                    return Err(RewriteError::HeightBudgetExhausted { lower_bound });
                }
                on_path.insert(s.clone());
                let succs = distinct(&s);
                stack.push(Frame {
                    term: s,
                    succs,
                    next: 0,
                    best: 0,
                });
            } else {
                let done = stack.pop().unwrap();
                on_path.remove(&done.term);
                memo.insert(done.term, done.best);
                match stack.last_mut() {
                    Some(parent) => parent.best = parent.best.max(done.best + 1),
                    None => return Ok(done.best),
                }
            }
        }
        unreachable!("the root frame returns")
    }
}

fn check_symbol(sig: &Signature, t: &Term, foreign: &mut Option<String>) {
    if let TermNode::Sym { name, ty } = t.node() {
        if sig.type_of(name) != Some(ty) && foreign.is_none() {
            *foreign = Some(name.to_string());
        }
    }
}
