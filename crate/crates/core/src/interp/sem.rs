//! Evaluation of interpretation terms by normalisation by evaluation.
//!
//! `Sem` is the elaborated, fully explicit term language. Evaluating it yields
//! `Val`s; function values that meet an unknown (an atom) get stuck as
//! neutrals, and `reify` reads values back into η-long normal forms `Nf`
//! whose natural-number leaves are `MaxPoly`s.
//!
//! Bound variables of normal forms are named by binder depth, so two
//! α-equivalent normal forms built at the same depth are syntactically equal.

use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};
use std::sync::Arc;

use thiserror::Error;

use crate::domain::MetaType;

use super::poly::MaxPoly;

static NEXT_ATOM: AtomicU64 = AtomicU64::new(0);
static NEXT_VAR: AtomicU64 = AtomicU64::new(0);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("ill-shaped evaluation: {0}")]
pub struct EvalError(pub String);

fn bad<T>(msg: impl Into<String>) -> Result<T, EvalError> {
    Err(EvalError(msg.into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AtomId {
    Free(u64),
    Bound { depth: u32, leaf: u32 },
}

/// An unknown natural number or monotone function. Identity is the id alone.
#[derive(Debug, Clone)]
pub struct Atom {
    id: AtomId,
    name: Arc<str>,
    ty: Arc<MetaType>,
}

impl Atom {
    pub fn fresh(name: &str, ty: MetaType) -> Atom {
        Atom {
            id: AtomId::Free(NEXT_ATOM.fetch_add(1, AtomicOrdering::Relaxed)),
            name: Arc::from(name),
            ty: Arc::new(ty),
        }
    }

    fn bound(depth: u32, leaf: u32, name: &str, ty: MetaType) -> Atom {
        Atom {
            id: AtomId::Bound { depth, leaf },
            name: Arc::from(name),
            ty: Arc::new(ty),
        }
    }

    pub fn id(&self) -> AtomId {
        self.id
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn ty(&self) -> &MetaType {
        &self.ty
    }

    pub fn is_free(&self) -> bool {
        matches!(self.id, AtomId::Free(_))
    }
}

impl PartialEq for Atom {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id
    }
}

impl Eq for Atom {}

impl Hash for Atom {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.id.hash(state)
    }
}

impl PartialOrd for Atom {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Atom {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.id.cmp(&other.id)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Elim {
    Arg(Nf),
    Proj(usize),
}

/// An atom followed by a spine of applications and projections.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Neutral {
    pub head: Atom,
    pub spine: Vec<Elim>,
}

impl Neutral {
    pub fn atom(head: Atom) -> Neutral {
        Neutral {
            head,
            spine: Vec::new(),
        }
    }

    fn push(&self, e: Elim) -> Neutral {
        let mut spine = self.spine.clone();
        spine.push(e);
        Neutral {
            head: self.head.clone(),
            spine,
        }
    }
}

impl fmt::Display for Neutral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.head.name)?;
        let mut open = false;
        for e in &self.spine {
            match e {
                Elim::Arg(nf) => {
                    write!(f, "{}{nf}", if open { ", " } else { "(" })?;
                    open = true;
                }
                Elim::Proj(i) => {
                    if open {
                        write!(f, ")")?;
                        open = false;
                    }
                    write!(f, ".{i}")?;
                }
            }
        }
        if open {
            write!(f, ")")?;
        }
        Ok(())
    }
}

/// η-long normal forms.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Nf {
    Nat(MaxPoly),
    Unit,
    Tuple(Vec<Nf>),
    /// Binds the atoms `reflect_bound(dom, depth)` in `body`.
    Lam {
        depth: u32,
        dom: Arc<MetaType>,
        body: Box<Nf>,
    },
}

impl fmt::Display for Nf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Nf::Nat(p) => write!(f, "{p}"),
            Nf::Unit => write!(f, "u"),
            Nf::Tuple(items) => {
                write!(f, "(")?;
                for (i, x) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, ")")
            }
            Nf::Lam { depth, body, .. } => write!(f, "λy{depth}. {body}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(u64);

impl VarId {
    pub fn fresh() -> VarId {
        VarId(NEXT_VAR.fetch_add(1, AtomicOrdering::Relaxed))
    }
}

/// Elaborated terms. Closed up to atoms once elaboration is done.
#[derive(Debug, Clone)]
pub enum Sem {
    Lit(u64),
    Unit,
    Var(VarId),
    Atom(Atom),
    Add(Box<Sem>, Box<Sem>),
    Mul(Box<Sem>, Box<Sem>),
    Max(Vec<Sem>),
    Tuple(Vec<Sem>),
    Proj(Box<Sem>, usize),
    Lam(VarId, Arc<Sem>),
    App(Box<Sem>, Box<Sem>),
}

impl Sem {
    pub fn lam(body: impl FnOnce(Sem) -> Sem) -> Sem {
        let v = VarId::fresh();
        Sem::Lam(v, Arc::new(body(Sem::Var(v))))
    }

    pub fn app(f: Sem, a: Sem) -> Sem {
        Sem::App(Box::new(f), Box::new(a))
    }

    pub fn proj(e: Sem, i: usize) -> Sem {
        Sem::Proj(Box::new(e), i)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(a: Sem, b: Sem) -> Sem {
        Sem::Add(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(a: Sem, b: Sem) -> Sem {
        Sem::Mul(Box::new(a), Box::new(b))
    }

    /// Sum of `items`, `0` if empty.
    pub fn sum(items: Vec<Sem>) -> Sem {
        items.into_iter().reduce(Sem::add).unwrap_or(Sem::Lit(0))
    }
}

#[derive(Debug, Clone, Default)]
pub struct Env(Option<Arc<EnvNode>>);

#[derive(Debug)]
pub struct EnvNode {
    var: VarId,
    val: Val,
    next: Env,
}

impl Env {
    pub fn extend(&self, var: VarId, val: Val) -> Env {
        Env(Some(Arc::new(EnvNode {
            var,
            val,
            next: self.clone(),
        })))
    }

    fn get(&self, var: VarId) -> Option<&Val> {
        let mut cur = self.0.as_deref();
        while let Some(node) = cur {
            if node.var == var {
                return Some(&node.val);
            }
            cur = node.next.0.as_deref();
        }
        None
    }
}

/// Values assigned to atoms, used to instantiate normal forms.
#[derive(Debug, Clone, Default)]
pub struct Instantiation(Arc<BTreeMap<AtomId, Val>>);

impl Instantiation {
    pub fn new(map: BTreeMap<AtomId, Val>) -> Self {
        Instantiation(Arc::new(map))
    }

    pub fn get(&self, id: AtomId) -> Option<&Val> {
        self.0.get(&id)
    }

    fn with(&self, extra: impl IntoIterator<Item = (AtomId, Val)>) -> Instantiation {
        let mut map = (*self.0).clone();
        map.extend(extra);
        Instantiation(Arc::new(map))
    }
}

#[derive(Debug, Clone)]
pub enum Val {
    Nat(MaxPoly),
    Unit,
    Tuple(Arc<[Val]>),
    Closure {
        env: Env,
        var: VarId,
        body: Arc<Sem>,
    },
    NfClosure {
        inst: Instantiation,
        depth: u32,
        dom: Arc<MetaType>,
        body: Arc<Nf>,
    },
    /// Stuck function-typed neutral together with its type.
    Neutral(Neutral, Arc<MetaType>),
}

impl Val {
    pub fn nat(c: u64) -> Val {
        Val::Nat(MaxPoly::constant(c))
    }

    pub fn tuple(items: Vec<Val>) -> Val {
        Val::Tuple(items.into())
    }

    pub fn as_nat(&self) -> Result<&MaxPoly, EvalError> {
        match self {
            Val::Nat(p) => Ok(p),
            other => bad(format!("expected a number, got {}", other.kind())),
        }
    }

    pub fn is_function(&self) -> bool {
        matches!(self, Val::Closure { .. } | Val::NfClosure { .. } | Val::Neutral(..))
    }

    fn kind(&self) -> &'static str {
        match self {
            Val::Nat(_) => "a number",
            Val::Unit => "the unit value",
            Val::Tuple(_) => "a tuple",
            _ => "a function",
        }
    }
}

pub fn eval(sem: &Sem, env: &Env, depth: u32) -> Result<Val, EvalError> {
    Ok(match sem {
        Sem::Lit(n) => Val::nat(*n),
        Sem::Unit => Val::Unit,
        Sem::Var(v) => match env.get(*v) {
            Some(val) => val.clone(),
            None => return bad("unbound variable"),
        },
        Sem::Atom(a) => reflect(Neutral::atom(a.clone()), a.ty()),
        Sem::Add(a, b) => {
            let (a, b) = (eval(a, env, depth)?, eval(b, env, depth)?);
            Val::Nat(a.as_nat()?.add(b.as_nat()?))
        }
        Sem::Mul(a, b) => {
            let (a, b) = (eval(a, env, depth)?, eval(b, env, depth)?);
            Val::Nat(a.as_nat()?.mul(b.as_nat()?))
        }
        Sem::Max(items) => {
            let mut acc: Option<MaxPoly> = None;
            for e in items {
                let v = eval(e, env, depth)?;
                let p = v.as_nat()?;
                acc = Some(match acc {
                    None => p.clone(),
                    Some(a) => a.join(p),
                });
            }
            Val::Nat(acc.unwrap_or_default())
        }
        Sem::Tuple(items) => Val::Tuple(
            items
                .iter()
                .map(|e| eval(e, env, depth))
                .collect::<Result<Vec<_>, _>>()?
                .into(),
        ),
        Sem::Proj(e, i) => proj(&eval(e, env, depth)?, *i)?,
        Sem::Lam(var, body) => Val::Closure {
            env: env.clone(),
            var: *var,
            body: body.clone(),
        },
        Sem::App(f, a) => {
            let f = eval(f, env, depth)?;
            let a = eval(a, env, depth)?;
            apply(&f, a, depth)?
        }
    })
}

pub fn proj(v: &Val, i: usize) -> Result<Val, EvalError> {
    match v {
        Val::Tuple(items) => match items.get(i) {
            Some(x) => Ok(x.clone()),
            None => bad(format!("projection .{i} out of range")),
        },
        other => bad(format!("projection .{i} from {}", other.kind())),
    }
}

pub fn apply(f: &Val, arg: Val, depth: u32) -> Result<Val, EvalError> {
    match f {
        Val::Closure { env, var, body } => eval(body, &env.extend(*var, arg), depth),
        Val::NfClosure {
            inst,
            depth: d,
            dom,
            body,
        } => {
            let mut binds = Vec::new();
            bind_leaves(dom, &arg, *d, &mut 0, &mut binds)?;
            eval_nf(body, &inst.with(binds), depth)
        }
        Val::Neutral(n, ty) => match &**ty {
            MetaType::Fun(dom, cod) => {
                let nf = reify(&arg, dom, depth)?;
                Ok(reflect(n.push(Elim::Arg(nf)), cod))
            }
            _ => bad("neutral of non-function type applied"),
        },
        other => bad(format!("applied {}", other.kind())),
    }
}

/// Pairs the leaves of `arg` with the bound atoms of a binder at `depth`.
fn bind_leaves(
    ty: &MetaType,
    arg: &Val,
    depth: u32,
    leaf: &mut u32,
    out: &mut Vec<(AtomId, Val)>,
) -> Result<(), EvalError> {
    match ty {
        MetaType::Unit => Ok(()),
        MetaType::Nat | MetaType::Fun(..) => {
            out.push((AtomId::Bound { depth, leaf: *leaf }, arg.clone()));
            *leaf += 1;
            Ok(())
        }
        MetaType::Prod(fields) => {
            for (i, fld) in fields.iter().enumerate() {
                bind_leaves(&fld.ty, &proj(arg, i)?, depth, leaf, out)?;
            }
            Ok(())
        }
    }
}

/// η-expands a neutral of type `ty` into a value.
pub fn reflect(n: Neutral, ty: &MetaType) -> Val {
    match ty {
        MetaType::Nat => Val::Nat(MaxPoly::atom(n)),
        MetaType::Unit => Val::Unit,
        MetaType::Prod(fields) => Val::tuple(
            fields
                .iter()
                .enumerate()
                .map(|(i, f)| reflect(n.push(Elim::Proj(i)), &f.ty))
                .collect(),
        ),
        MetaType::Fun(..) => Val::Neutral(n, Arc::new(ty.clone())),
    }
}

pub fn reify(v: &Val, ty: &MetaType, depth: u32) -> Result<Nf, EvalError> {
    match ty {
        MetaType::Nat => Ok(Nf::Nat(v.as_nat()?.clone())),
        MetaType::Unit => Ok(Nf::Unit),
        MetaType::Prod(fields) => Ok(Nf::Tuple(
            fields
                .iter()
                .enumerate()
                .map(|(i, f)| reify(&proj(v, i)?, &f.ty, depth))
                .collect::<Result<_, _>>()?,
        )),
        MetaType::Fun(dom, cod) => {
            if !v.is_function() {
                return bad(format!("expected a function, got {}", v.kind()));
            }
            let x = reflect_bound(dom, depth);
            let body = reify(&apply(v, x, depth + 1)?, cod, depth + 1)?;
            Ok(Nf::Lam {
                depth,
                dom: dom.clone(),
                body: Box::new(body),
            })
        }
    }
}

/// Builds a value of type `ty` whose leaves are atoms made by `mk`, named
/// `base` when there is one leaf and `base.label` or `base.i` otherwise.
pub fn atoms_of(ty: &MetaType, base: &str, mk: &mut dyn FnMut(&str, &MetaType) -> Atom) -> Val {
    fn go(ty: &MetaType, name: String, single: bool, base: &str, mk: &mut dyn FnMut(&str, &MetaType) -> Atom) -> Val {
        match ty {
            MetaType::Unit => Val::Unit,
            MetaType::Nat | MetaType::Fun(..) => {
                let a = mk(if single { base } else { &name }, ty);
                reflect(Neutral::atom(a), ty)
            }
            MetaType::Prod(fields) => Val::tuple(
                fields
                    .iter()
                    .enumerate()
                    .map(|(i, f)| {
                        let label = match &f.label {
                            Some(l) => l.to_string(),
                            None => i.to_string(),
                        };
                        go(&f.ty, format!("{name}.{label}"), single, base, mk)
                    })
                    .collect(),
            ),
        }
    }
    let single = ty.leaf_count() == 1;
    go(ty, base.to_string(), single, base, mk)
}

/// A value of type `ty` built from fresh free atoms.
pub fn fresh_value(ty: &MetaType, base: &str) -> Val {
    atoms_of(ty, base, &mut |name, t| Atom::fresh(name, t.clone()))
}

fn reflect_bound(dom: &MetaType, depth: u32) -> Val {
    let mut leaf = 0;
    atoms_of(dom, &format!("y{depth}"), &mut |name, t| {
        let a = Atom::bound(depth, leaf, name, t.clone());
        leaf += 1;
        a
    })
}

/// Evaluates a normal form after substituting the atoms in `inst`.
pub fn eval_nf(nf: &Nf, inst: &Instantiation, depth: u32) -> Result<Val, EvalError> {
    Ok(match nf {
        Nf::Nat(p) => Val::Nat(instantiate(p, inst, depth)?),
        Nf::Unit => Val::Unit,
        Nf::Tuple(items) => Val::Tuple(
            items
                .iter()
                .map(|x| eval_nf(x, inst, depth))
                .collect::<Result<Vec<_>, _>>()?
                .into(),
        ),
        Nf::Lam { depth: d, dom, body } => Val::NfClosure {
            inst: inst.clone(),
            depth: *d,
            dom: dom.clone(),
            body: Arc::new((**body).clone()),
        },
    })
}

pub fn eval_neutral(n: &Neutral, inst: &Instantiation, depth: u32) -> Result<Val, EvalError> {
    let mut v = match inst.get(n.head.id) {
        Some(v) => v.clone(),
        None => reflect(Neutral::atom(n.head.clone()), n.head.ty()),
    };
    for e in &n.spine {
        v = match e {
            Elim::Arg(nf) => apply(&v, eval_nf(nf, inst, depth)?, depth)?,
            Elim::Proj(i) => proj(&v, *i)?,
        };
    }
    Ok(v)
}

/// Substitutes atom values into a max-polynomial.
pub fn instantiate(p: &MaxPoly, inst: &Instantiation, depth: u32) -> Result<MaxPoly, EvalError> {
    let mut acc: Option<MaxPoly> = None;
    for poly in p.polys() {
        let mut sum = MaxPoly::zero();
        for (m, c) in poly.terms() {
            let mut prod = MaxPoly::constant(c);
            for (n, e) in m.factors() {
                let v = eval_neutral(n, inst, depth)?;
                let base = v.as_nat()?;
                for _ in 0..e {
                    prod = prod.mul(base);
                }
            }
            sum = sum.add(&prod);
        }
        acc = Some(match acc {
            None => sum,
            Some(a) => a.join(&sum),
        });
    }
    Ok(acc.unwrap_or_default())
}

/// Free atoms occurring anywhere in `p`, including inside function arguments.
pub fn free_atoms(p: &MaxPoly, out: &mut BTreeMap<AtomId, Atom>) {
    for n in p.neutrals() {
        free_atoms_neutral(n, out);
    }
}

fn free_atoms_neutral(n: &Neutral, out: &mut BTreeMap<AtomId, Atom>) {
    if n.head.is_free() {
        out.entry(n.head.id).or_insert_with(|| n.head.clone());
    }
    for e in &n.spine {
        if let Elim::Arg(nf) = e {
            free_atoms_nf(nf, out);
        }
    }
}

pub fn free_atoms_nf(nf: &Nf, out: &mut BTreeMap<AtomId, Atom>) {
    match nf {
        Nf::Nat(p) => free_atoms(p, out),
        Nf::Unit => {}
        Nf::Tuple(items) => items.iter().for_each(|x| free_atoms_nf(x, out)),
        Nf::Lam { body, .. } => free_atoms_nf(body, out),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nat_fun() -> MetaType {
        MetaType::fun(MetaType::Nat, MetaType::Nat)
    }

    #[test]
    fn beta_reduces_and_reifies() {
        // (λf. λx. f (x + 1)) applied to the free atom g
        let g = Atom::fresh("g", nat_fun());
        let term = Sem::app(
            Sem::lam(|f| Sem::lam(|x| Sem::app(f, Sem::add(x, Sem::Lit(1))))),
            Sem::Atom(g),
        );
        let v = eval(&term, &Env::default(), 0).unwrap();
        let nf = reify(&v, &nat_fun(), 0).unwrap();
        assert_eq!(nf.to_string(), "λy0. g(y0 + 1)");
    }

    #[test]
    fn alpha_equivalent_results_coincide() {
        let id1 = eval(&Sem::lam(|x| x), &Env::default(), 0).unwrap();
        let id2 = eval(&Sem::lam(|y| Sem::add(y, Sem::Lit(0))), &Env::default(), 0).unwrap();
        assert_eq!(reify(&id1, &nat_fun(), 0).unwrap(), reify(&id2, &nat_fun(), 0).unwrap());
    }

    #[test]
    fn instantiation_substitutes_atoms() {
        let g = Atom::fresh("g", nat_fun());
        let x = Atom::fresh("x", MetaType::Nat);
        let term = Sem::app(Sem::Atom(g.clone()), Sem::mul(Sem::Lit(2), Sem::Atom(x.clone())));
        let v = eval(&term, &Env::default(), 0).unwrap();
        let p = v.as_nat().unwrap().clone();
        assert_eq!(p.to_string(), "g(2*x)");
        let succ = eval(&Sem::lam(|y| Sem::add(y, Sem::Lit(1))), &Env::default(), 0).unwrap();
        let inst = Instantiation::new(BTreeMap::from([(g.id(), succ), (x.id(), Val::nat(3))]));
        assert_eq!(instantiate(&p, &inst, 0).unwrap().as_constant(), Some(7));
    }
}
