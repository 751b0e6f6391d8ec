//! Applicative typed terms with substitution and positions.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::types::{Signature, SimpleType};

/// Line/column of a token in source text, both 1-based.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SrcPos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for SrcPos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// An untyped applicative term as produced by the parser.
#[derive(Debug, Clone)]
pub enum RawTerm {
    Ident(String, SrcPos),
    App(Box<RawTerm>, Box<RawTerm>),
}

impl RawTerm {
    pub fn pos(&self) -> SrcPos {
        match self {
            RawTerm::Ident(_, p) => *p,
            RawTerm::App(f, _) => f.pos(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeError {
    /// Neither a declared symbol nor a declared variable.
    #[error("{pos}: undeclared identifier `{name}`")]
    UnknownIdentifier { name: String, pos: SrcPos },
    #[error("{pos}: type mismatch: expected {expected}, found {found}")]
    TypeMismatch {
        pos: SrcPos,
        expected: String,
        found: String,
    },
    #[error("variable `{name}` is bound to a term of type {found}, expected {expected}")]
    BindingMismatch {
        name: String,
        expected: SimpleType,
        found: SimpleType,
    },
    #[error("variable `{0}` declared with two different types")]
    ConflictingVariable(String),
}

/// Typing context for variables: each name has exactly one type.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VarEnv {
    vars: BTreeMap<Arc<str>, SimpleType>,
}

impl VarEnv {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, name: &str, ty: SimpleType) -> Result<(), TypeError> {
        match self.vars.get(name) {
            Some(t) if *t != ty => Err(TypeError::ConflictingVariable(name.to_string())),
            Some(_) => Ok(()),
            None => {
                self.vars.insert(Arc::from(name), ty);
                Ok(())
            }
        }
    }

    pub fn get(&self, name: &str) -> Option<&SimpleType> {
        self.vars.get(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Arc<str>, &SimpleType)> {
        self.vars.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TermNode {
    Var { name: Arc<str>, ty: SimpleType },
    Sym { name: Arc<str>, ty: SimpleType },
    App { fun: Term, arg: Term, ty: SimpleType },
}

/// A well-typed applicative term. Cheap to clone; structurally compared.
#[derive(Clone, Eq, PartialOrd, Ord)]
pub struct Term(Arc<TermNode>);

impl PartialEq for Term {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

impl std::hash::Hash for Term {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.0.hash(state)
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Term({self})")
    }
}

impl Serialize for Term {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Simultaneous replacement of variables by terms.
pub type Substitution = BTreeMap<Arc<str>, Term>;

impl Term {
    pub fn var(name: &str, ty: SimpleType) -> Term {
        Term(Arc::new(TermNode::Var {
            name: Arc::from(name),
            ty,
        }))
    }

    pub fn sym(name: &str, ty: SimpleType) -> Term {
        Term(Arc::new(TermNode::Sym {
            name: Arc::from(name),
            ty,
        }))
    }

    /// Application; fails unless `fun : σ ⇒ τ` and `arg : σ`.
    pub fn app(fun: Term, arg: Term) -> Result<Term, TypeError> {
        let ty = match fun.ty() {
            SimpleType::Arrow(dom, cod) if **dom == *arg.ty() => (**cod).clone(),
            SimpleType::Arrow(dom, _) => {
                return Err(TypeError::TypeMismatch {
                    pos: SrcPos::default(),
                    expected: dom.to_string(),
                    found: arg.ty().to_string(),
                })
            }
            other => {
                return Err(TypeError::TypeMismatch {
                    pos: SrcPos::default(),
                    expected: "an arrow type".to_string(),
                    found: other.to_string(),
                })
            }
        };
        Ok(Term(Arc::new(TermNode::App { fun, arg, ty })))
    }

    /// Applies `head` to `args` left to right.
    pub fn apply_all(head: Term, args: impl IntoIterator<Item = Term>) -> Result<Term, TypeError> {
        args.into_iter().try_fold(head, Term::app)
    }

    pub fn node(&self) -> &TermNode {
        &self.0
    }

    pub fn ty(&self) -> &SimpleType {
        match &*self.0 {
            TermNode::Var { ty, .. } | TermNode::Sym { ty, .. } | TermNode::App { ty, .. } => ty,
        }
    }

    pub fn is_var(&self) -> bool {
        matches!(&*self.0, TermNode::Var { .. })
    }

    /// Head of the application spine and its arguments: `f t1 .. tn` gives `(f, [t1, .., tn])`.
    pub fn spine(&self) -> (&Term, Vec<&Term>) {
        let mut args = Vec::new();
        let mut cur = self;
        while let TermNode::App { fun, arg, .. } = &*cur.0 {
            args.push(arg);
            cur = fun;
        }
        args.reverse();
        (cur, args)
    }

    /// Name of the head symbol, if the head is a symbol.
    pub fn head_symbol(&self) -> Option<&Arc<str>> {
        match &*self.spine().0 .0 {
            TermNode::Sym { name, .. } => Some(name),
            _ => None,
        }
    }

    /// Variables occurring in the term.
    pub fn vars(&self) -> BTreeSet<Arc<str>> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<Arc<str>>) {
        match &*self.0 {
            TermNode::Var { name, .. } => {
                out.insert(name.clone());
            }
            TermNode::Sym { .. } => {}
            TermNode::App { fun, arg, .. } => {
                fun.collect_vars(out);
                arg.collect_vars(out);
            }
        }
    }

    /// Variables together with their types.
    pub fn typed_vars(&self) -> BTreeMap<Arc<str>, SimpleType> {
        let mut out = BTreeMap::new();
        self.walk(&mut |t| {
            if let TermNode::Var { name, ty } = t.node() {
                out.insert(name.clone(), ty.clone());
            }
        });
        out
    }

    pub fn is_ground(&self) -> bool {
        self.vars().is_empty()
    }

    /// Number of symbol and variable occurrences; application nodes count 0.
    pub fn size(&self) -> usize {
        match &*self.0 {
            TermNode::Var { .. } | TermNode::Sym { .. } => 1,
            TermNode::App { fun, arg, .. } => fun.size() + arg.size(),
        }
    }

    /// Pre-order traversal over all subterms.
    pub fn walk<F: FnMut(&Term)>(&self, f: &mut F) {
        f(self);
        if let TermNode::App { fun, arg, .. } = &*self.0 {
            fun.walk(f);
            arg.walk(f);
        }
    }

    /// Replaces variables bound in `subst`; checks binding types.
    pub fn substitute(&self, subst: &Substitution) -> Result<Term, TypeError> {
        for (name, ty) in self.typed_vars() {
            if let Some(u) = subst.get(&name) {
                if *u.ty() != ty {
                    return Err(TypeError::BindingMismatch {
                        name: name.to_string(),
                        expected: ty,
                        found: u.ty().clone(),
                    });
                }
            }
        }
        Ok(self.apply_subst(subst))
    }

    /// Substitution without type checks; bindings must preserve types.
    pub(crate) fn apply_subst(&self, subst: &Substitution) -> Term {
        match &*self.0 {
            TermNode::Var { name, .. } => subst.get(name).cloned().unwrap_or_else(|| self.clone()),
            TermNode::Sym { .. } => self.clone(),
            TermNode::App { fun, arg, ty } => {
                let f = fun.apply_subst(subst);
                let a = arg.apply_subst(subst);
                if f == *fun && a == *arg {
                    self.clone()
                } else {
                    Term(Arc::new(TermNode::App {
                        fun: f,
                        arg: a,
                        ty: ty.clone(),
                    }))
                }
            }
        }
    }

    /// Rebuilds an application node whose children changed but keep their types.
    pub(crate) fn with_children(&self, fun: Term, arg: Term) -> Term {
        match &*self.0 {
            TermNode::App { ty, .. } => Term(Arc::new(TermNode::App {
                fun,
                arg,
                ty: ty.clone(),
            })),
            _ => unreachable!("with_children on a leaf"),
        }
    }

    pub fn subterm_at(&self, pos: &Position) -> Option<&Term> {
        let mut cur = self;
        for side in &pos.0 {
            match (&*cur.0, side) {
                (TermNode::App { fun, .. }, Side::Fun) => cur = fun,
                (TermNode::App { arg, .. }, Side::Arg) => cur = arg,
                _ => return None,
            }
        }
        Some(cur)
    }

    /// Replaces the subterm at `pos` by a term of the same type.
    pub fn replace_at(&self, pos: &[Side], new: Term) -> Term {
        match pos.split_first() {
            None => new,
            Some((side, rest)) => match &*self.0 {
                TermNode::App { fun, arg, .. } => match side {
                    Side::Fun => self.with_children(fun.replace_at(rest, new), arg.clone()),
                    Side::Arg => self.with_children(fun.clone(), arg.replace_at(rest, new)),
                },
                _ => panic!("position does not exist"),
            },
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, as_arg: bool) -> fmt::Result {
        match &*self.0 {
            TermNode::Var { name, .. } | TermNode::Sym { name, .. } => write!(f, "{name}"),
            TermNode::App { fun, arg, .. } => {
                if as_arg {
                    write!(f, "(")?;
                }
                fun.fmt_prec(f, false)?;
                write!(f, " ")?;
                arg.fmt_prec(f, true)?;
                if as_arg {
                    write!(f, ")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, false)
    }
}

/// One step into an application node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Fun,
    Arg,
}

/// Path from the root to a subterm. Printed as `ε` for the root, otherwise
/// as dot-separated `1` (function side) and `2` (argument side).
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Position(pub Vec<Side>);

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "ε");
        }
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ".")?;
            }
            write!(f, "{}", if *s == Side::Fun { 1 } else { 2 })?;
        }
        Ok(())
    }
}

impl Serialize for Position {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Assigns types to a raw term: identifiers declared in `sig` are symbols,
/// identifiers bound in `env` are variables.
pub fn typecheck(raw: &RawTerm, sig: &Signature, env: &VarEnv) -> Result<Term, TypeError> {
    match raw {
        RawTerm::Ident(name, pos) => {
            if let Some(ty) = sig.type_of(name) {
                Ok(Term::sym(name, ty.clone()))
            } else if let Some(ty) = env.get(name) {
                Ok(Term::var(name, ty.clone()))
            } else {
                Err(TypeError::UnknownIdentifier {
                    name: name.clone(),
                    pos: *pos,
                })
            }
        }
        RawTerm::App(f, a) => {
            let fun = typecheck(f, sig, env)?;
            let arg = typecheck(a, sig, env)?;
            Term::app(fun, arg).map_err(|e| match e {
                TypeError::TypeMismatch { expected, found, .. } => {
                    let pos = if expected == "an arrow type" { f.pos() } else { a.pos() };
                    TypeError::TypeMismatch { pos, expected, found }
                }
                other => other,
            })
        }
    }
}
