//! The interpretation language: surface expressions, shape checking,
//! evaluation to max-polynomial normal forms and symbolic comparison.

pub mod compare;
pub mod elab;
pub mod expr;
pub mod poly;
pub mod sem;

use thiserror::Error;

use crate::domain::{self, lift, CostSizeShape, MetaType};
use crate::types::{Signature, SimpleType};

use expr::InterpEntry;
use sem::{eval, fresh_value, Env, EvalError, Sem, Val};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ShapeError {
    #[error("`{expr}` has shape {found} where {expected} is required")]
    Mismatch {
        expr: String,
        expected: String,
        found: String,
    },
    #[error("unknown parameter `{0}`")]
    UnknownParam(String),
    #[error("`{expr}` of shape {ty} has no component `{component}`")]
    UnknownComponent {
        expr: String,
        component: String,
        ty: String,
    },
    #[error("`{expr}` of shape {ty} cannot take another argument")]
    NotAFunction { expr: String, ty: String },
    #[error("cannot infer the shape of `{0}`; a lambda needs an expected function shape")]
    Uninferable(String),
    #[error("parameter `{0}` is bound twice")]
    DuplicateParam(String),
    #[error("undeclared sort `{0}`")]
    UnknownSort(String),
    #[error("expected a value of type {expected}, got one of type {found}")]
    TypeMismatch { expected: String, found: String },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// A shape-checked interpretation entry, elaborated to the complete form.
#[derive(Debug, Clone)]
pub struct CheckedEntry {
    pub entry: InterpEntry,
    pub ty: SimpleType,
    pub shape: CostSizeShape,
    /// Closed term of shape `C_σ`.
    pub cost: Sem,
    /// Closed term of shape `S_σ`.
    pub size: Sem,
    /// `⟨cost, size⟩`, evaluated once.
    pub value: Val,
}

impl CheckedEntry {
    /// Whether every size component is bounded by `Σ xᵢ + a`.
    pub fn is_additively_bounded(&self) -> bool {
        is_additively_bounded(&self.value, &self.shape.size)
    }
}

/// Checks an entry for a symbol of type `ty` against `⟦ty⟧`.
pub fn check_entry(sig: &Signature, ty: &SimpleType, entry: &InterpEntry) -> Result<CheckedEntry, ShapeError> {
    let shape = domain::shape_of(ty, sig.sorts())?;
    let cost_lifted = elab::elaborate(&entry.cost, &lift(&shape.cost))?;
    let cost = elab::up(&shape.cost, cost_lifted);
    let size = elab::elaborate(&entry.size, &shape.size)?;
    let value = eval(&Sem::Tuple(vec![cost.clone(), size.clone()]), &Env::default(), 0)?;
    Ok(CheckedEntry {
        entry: entry.clone(),
        ty: ty.clone(),
        shape,
        cost,
        size,
        value,
    })
}

/// Checks a size function (in the complete value `⟨cost, size⟩`) for
/// additive boundedness: after applying it to atoms, every polynomial of
/// every component uses coefficient 1 on degree-one monomials and nothing
/// of higher degree. A `max` of such forms is bounded by their sum.
pub fn is_additively_bounded(value: &Val, size_ty: &MetaType) -> bool {
    let Ok(size) = sem::proj(value, 1) else {
        return false;
    };
    additive_at(&size, size_ty)
}

fn additive_at(v: &Val, ty: &MetaType) -> bool {
    match ty {
        MetaType::Fun(dom, cod) => {
            let x = fresh_value(dom, "x");
            match sem::apply(v, x, 0) {
                Ok(r) => additive_at(&r, cod),
                Err(_) => false,
            }
        }
        MetaType::Nat => match v {
            Val::Nat(p) => p
                .polys()
                .all(|q| q.terms().all(|(m, c)| m.is_one() || (m.degree() == 1 && c == 1))),
            _ => false,
        },
        MetaType::Unit => true,
        MetaType::Prod(fields) => fields
            .iter()
            .enumerate()
            .all(|(i, f)| sem::proj(v, i).is_ok_and(|x| additive_at(&x, &f.ty))),
    }
}
