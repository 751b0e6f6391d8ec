use std::fmt;
use std::sync::Arc;

use crate::types::{SimpleType, SortDecl};

/// A product component, optionally named (`l`, `m`, `c`, `s`, ...).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Field {
    pub label: Option<Arc<str>>,
    pub ty: MetaType,
}

/// The meta-level sets cost-size tuples live in: ℕ, the one-point set,
/// finite products and weakly monotonic function spaces.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MetaType {
    Nat,
    Unit,
    Prod(Vec<Field>),
    Fun(Arc<MetaType>, Arc<MetaType>),
}

impl MetaType {
    pub fn fun(dom: MetaType, cod: MetaType) -> Self {
        MetaType::Fun(Arc::new(dom), Arc::new(cod))
    }

    pub fn prod(items: impl IntoIterator<Item = MetaType>) -> Self {
        MetaType::Prod(items.into_iter().map(|ty| Field { label: None, ty }).collect())
    }

    pub fn labeled(items: impl IntoIterator<Item = (Arc<str>, MetaType)>) -> Self {
        MetaType::Prod(items.into_iter().map(|(l, ty)| Field { label: Some(l), ty }).collect())
    }

    pub fn fields(&self) -> Option<&[Field]> {
        match self {
            MetaType::Prod(f) => Some(f),
            _ => None,
        }
    }

    pub fn as_fun(&self) -> Option<(&MetaType, &MetaType)> {
        match self {
            MetaType::Fun(a, b) => Some((a, b)),
            _ => None,
        }
    }

    /// Structural equality ignoring component names.
    pub fn same_shape(&self, other: &MetaType) -> bool {
        match (self, other) {
            (MetaType::Nat, MetaType::Nat) | (MetaType::Unit, MetaType::Unit) => true,
            (MetaType::Prod(a), MetaType::Prod(b)) => {
                a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.ty.same_shape(&y.ty))
            }
            (MetaType::Fun(a1, b1), MetaType::Fun(a2, b2)) => a1.same_shape(a2) && b1.same_shape(b2),
            _ => false,
        }
    }

    /// Number of ℕ and function leaves, looking through products only.
    pub fn leaf_count(&self) -> usize {
        match self {
            MetaType::Unit => 0,
            MetaType::Nat | MetaType::Fun(..) => 1,
            MetaType::Prod(f) => f.iter().map(|x| x.ty.leaf_count()).sum(),
        }
    }

    /// `(ℕ, F)` pairs: the numeric cost next to a function.
    pub fn as_cost_pair(&self) -> Option<(&MetaType, &MetaType)> {
        match self {
            MetaType::Prod(f) if f.len() == 2 && f[0].ty == MetaType::Nat && matches!(f[1].ty, MetaType::Fun(..)) => {
                f[1].ty.as_fun()
            }
            _ => None,
        }
    }

    fn prec(&self) -> u8 {
        match self {
            MetaType::Fun(..) => 0,
            MetaType::Prod(f) if f.len() == 1 => f[0].ty.prec(),
            MetaType::Prod(f) if f.len() >= 2 && !self.is_power() => 1,
            _ => 2,
        }
    }

    fn is_power(&self) -> bool {
        matches!(self, MetaType::Prod(f) if f.len() >= 2 && f.iter().all(|x| x.ty == MetaType::Nat))
    }

    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.prec() < min {
            write!(f, "(")?;
            self.fmt_at(f, 0)?;
            return write!(f, ")");
        }
        match self {
            MetaType::Nat => write!(f, "ℕ"),
            MetaType::Unit => write!(f, "unit"),
            MetaType::Prod(fields) if self.is_power() => {
                write!(f, "ℕ{}", superscript(fields.len()))
            }
            MetaType::Prod(fields) if fields.is_empty() => write!(f, "unit"),
            MetaType::Prod(fields) if fields.len() == 1 => fields[0].ty.fmt_at(f, min),
            MetaType::Prod(fields) => {
                for (i, x) in fields.iter().enumerate() {
                    if i > 0 {
                        write!(f, " × ")?;
                    }
                    x.ty.fmt_at(f, 2)?;
                }
                Ok(())
            }
            MetaType::Fun(a, b) => {
                a.fmt_at(f, 1)?;
                write!(f, " ⇒ ")?;
                b.fmt_at(f, 0)
            }
        }
    }
}

fn superscript(n: usize) -> String {
    const DIGITS: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];
    n.to_string()
        .chars()
        .map(|c| DIGITS[c.to_digit(10).unwrap() as usize])
        .collect()
}

impl fmt::Display for MetaType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 0)
    }
}

/// Drops one-point factors: `unit × A` and `A × unit` become `A`, a product
/// of only units becomes `unit`. Component names survive.
pub fn lift(ty: &MetaType) -> MetaType {
    match ty {
        MetaType::Nat | MetaType::Unit => ty.clone(),
        MetaType::Prod(fields) => {
            let kept: Vec<Field> = fields
                .iter()
                .map(|f| Field {
                    label: f.label.clone(),
                    ty: lift(&f.ty),
                })
                .filter(|f| f.ty != MetaType::Unit)
                .collect();
            match kept.len() {
                0 => MetaType::Unit,
                1 => kept.into_iter().next().unwrap().ty,
                _ => MetaType::Prod(kept),
            }
        }
        MetaType::Fun(a, b) => MetaType::fun(lift(a), lift(b)),
    }
}

/// `S_σ`: ℕ^K at a sort, monotone functions at arrows.
pub fn size_type(ty: &SimpleType, sorts: &[SortDecl]) -> Result<MetaType, String> {
    match ty {
        SimpleType::Base(name) => {
            let decl = sorts.iter().find(|s| s.name == *name).ok_or_else(|| name.to_string())?;
            Ok(if decl.components.is_empty() {
                MetaType::Nat
            } else {
                MetaType::labeled(decl.components.iter().map(|c| (c.clone(), MetaType::Nat)))
            })
        }
        SimpleType::Arrow(a, b) => Ok(MetaType::fun(size_type(a, sorts)?, size_type(b, sorts)?)),
    }
}

/// The functional part of the cost set: unit at a sort, and
/// `(F_σ × S_σ) ⇒ C_τ` at `σ ⇒ τ`.
pub fn cost_fun_type(ty: &SimpleType, sorts: &[SortDecl]) -> Result<MetaType, String> {
    match ty {
        SimpleType::Base(name) => {
            if sorts.iter().any(|s| s.name == *name) {
                Ok(MetaType::Unit)
            } else {
                Err(name.to_string())
            }
        }
        SimpleType::Arrow(a, b) => Ok(MetaType::fun(
            MetaType::labeled([
                (Arc::from("c"), cost_fun_type(a, sorts)?),
                (Arc::from("s"), size_type(a, sorts)?),
            ]),
            cost_type(b, sorts)?,
        )),
    }
}

/// `C_σ = ℕ × F_σ`.
pub fn cost_type(ty: &SimpleType, sorts: &[SortDecl]) -> Result<MetaType, String> {
    Ok(MetaType::prod([MetaType::Nat, cost_fun_type(ty, sorts)?]))
}
