//! The semantic domain `⟦σ⟧ = C_σ × S_σ`, its inhabitants, semantic
//! application and the orders `≻`, `≽`.

mod meta;

use std::fmt;

use serde::Serialize;

pub use meta::{cost_fun_type, cost_type, lift, size_type, Field, MetaType};

use crate::interp::compare::{certify_ge, certify_gt, cmp_exprs, Outcome, SearchConfig};
use crate::interp::poly::MaxPoly;
use crate::interp::sem::{self, fresh_value, reify, EvalError, Nf, Val};
use crate::interp::ShapeError;
use crate::types::{SimpleType, SortDecl};

/// The shape of `⟦σ⟧`: the cost set `C_σ = ℕ × F_σ` and the size set `S_σ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostSizeShape {
    pub ty: SimpleType,
    pub cost: MetaType,
    pub size: MetaType,
}

impl CostSizeShape {
    /// The functional part `F_σ` of the cost set.
    pub fn cost_fun(&self) -> &MetaType {
        &self.cost.fields().expect("cost sets are pairs")[1].ty
    }

    /// `C_σ × S_σ` as one product.
    pub fn full(&self) -> MetaType {
        MetaType::prod([self.cost.clone(), self.size.clone()])
    }

    /// Shape of the result of applying a value of this shape once.
    pub fn result(&self) -> Option<CostSizeShape> {
        let (_, cod_ty) = self.ty.as_arrow()?;
        let (_, cost) = self.cost_fun().as_fun()?;
        let (_, size) = self.size.as_fun()?;
        Some(CostSizeShape {
            ty: cod_ty.clone(),
            cost: cost.clone(),
            size: size.clone(),
        })
    }
}

impl fmt::Display for CostSizeShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "cost: {} ; size: {}", self.cost, self.size)
    }
}

/// Structural shape of `⟦ty⟧` given the declared sorts (and their `K`).
pub fn shape_of(ty: &SimpleType, sorts: &[SortDecl]) -> Result<CostSizeShape, ShapeError> {
    Ok(CostSizeShape {
        ty: ty.clone(),
        cost: cost_type(ty, sorts).map_err(ShapeError::UnknownSort)?,
        size: size_type(ty, sorts).map_err(ShapeError::UnknownSort)?,
    })
}

/// Whether `v` inhabits `ty`. Functions are probed once on fresh atoms.
pub fn conforms(v: &Val, ty: &MetaType) -> bool {
    match (ty, v) {
        (MetaType::Nat, Val::Nat(_)) | (MetaType::Unit, Val::Unit) => true,
        (MetaType::Prod(fields), Val::Tuple(items)) => {
            fields.len() == items.len() && fields.iter().zip(items.iter()).all(|(f, x)| conforms(x, &f.ty))
        }
        (MetaType::Fun(dom, cod), f) if f.is_function() => match sem::apply(f, fresh_value(dom, "t"), 0) {
            Ok(r) => conforms(&r, cod),
            Err(_) => false,
        },
        _ => false,
    }
}

/// An element `⟨(n, f), s⟩` of `⟦σ⟧`. Function components are values of the
/// expression language, so they can be printed and compared symbolically.
#[derive(Debug, Clone)]
pub struct CostSizeValue {
    shape: CostSizeShape,
    val: Val,
}

impl CostSizeValue {
    pub fn new(shape: CostSizeShape, val: Val) -> Result<Self, ShapeError> {
        if !conforms(&val, &shape.full()) {
            return Err(ShapeError::TypeMismatch {
                expected: shape.full().to_string(),
                found: describe(&val),
            });
        }
        Ok(CostSizeValue { shape, val })
    }

    pub(crate) fn new_unchecked(shape: CostSizeShape, val: Val) -> Self {
        CostSizeValue { shape, val }
    }

    pub fn shape(&self) -> &CostSizeShape {
        &self.shape
    }

    pub fn ty(&self) -> &SimpleType {
        &self.shape.ty
    }

    pub fn val(&self) -> &Val {
        &self.val
    }

    fn part(&self, path: &[usize]) -> Result<Val, EvalError> {
        path.iter().try_fold(self.val.clone(), |v, &i| sem::proj(&v, i))
    }

    /// The numeric cost `n`.
    pub fn numeric(&self) -> Result<MaxPoly, EvalError> {
        Ok(self.part(&[0, 0])?.as_nat()?.clone())
    }

    /// The functional cost `f`, the unit value at base types.
    pub fn cost_fun(&self) -> Result<Val, EvalError> {
        self.part(&[0, 1])
    }

    pub fn size(&self) -> Result<Val, EvalError> {
        self.part(&[1])
    }

    /// The numeric cost as a number, when no atom occurs in it.
    pub fn ground_cost(&self) -> Option<u64> {
        self.numeric().ok()?.as_constant()
    }

    pub fn normal_form(&self) -> Result<Nf, EvalError> {
        reify(&self.val, &self.shape.full(), 0)
    }
}

fn describe(v: &Val) -> String {
    match v {
        Val::Nat(_) => "ℕ".into(),
        Val::Unit => "unit".into(),
        Val::Tuple(items) => {
            let parts: Vec<String> = items.iter().map(describe).collect();
            format!("({})", parts.join(" × "))
        }
        _ => "a function".into(),
    }
}

impl fmt::Display for CostSizeValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.normal_form() {
            Ok(Nf::Tuple(parts)) if parts.len() == 2 => match &parts[0] {
                Nf::Tuple(c) if c.len() == 2 => write!(f, "⟨({}, {}), {}⟩", c[0], c[1], parts[1]),
                other => write!(f, "⟨{}, {}⟩", other, parts[1]),
            },
            Ok(nf) => write!(f, "{nf}"),
            Err(e) => write!(f, "<{e}>"),
        }
    }
}

/// `⟨(n, f), s⟩ · ⟨(m, g), t⟩ = ⟨(n + m + k, h), s(t)⟩` where `f(g, t) = (k, h)`.
pub fn apply_values(f: &Val, x: &Val) -> Result<Val, EvalError> {
    let p = |v: &Val, i: usize| sem::proj(v, i);
    let (fc, fs) = (p(f, 0)?, p(f, 1)?);
    let (xc, xs) = (p(x, 0)?, p(x, 1)?);
    let (n, fcf) = (p(&fc, 0)?, p(&fc, 1)?);
    let (m, gc) = (p(&xc, 0)?, p(&xc, 1)?);
    let kh = sem::apply(&fcf, Val::tuple(vec![gc, xs.clone()]), 0)?;
    let (k, h) = (p(&kh, 0)?, p(&kh, 1)?);
    let num = n.as_nat()?.add(m.as_nat()?).add(k.as_nat()?);
    let size = sem::apply(&fs, xs, 0)?;
    Ok(Val::tuple(vec![Val::tuple(vec![Val::Nat(num), h]), size]))
}

/// Semantic application.
pub fn sem_apply(f: &CostSizeValue, x: &CostSizeValue) -> Result<CostSizeValue, ShapeError> {
    let (dom, _) = f.ty().as_arrow().ok_or_else(|| ShapeError::TypeMismatch {
        expected: "an arrow type".into(),
        found: f.ty().to_string(),
    })?;
    if dom != x.ty() {
        return Err(ShapeError::TypeMismatch {
            expected: dom.to_string(),
            found: x.ty().to_string(),
        });
    }
    let shape = f.shape.result().expect("arrow shape");
    Ok(CostSizeValue::new_unchecked(shape, apply_values(&f.val, &x.val)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Strict,
    Weak,
}

/// `>` on the numeric cost, `≥` on functional cost, `⊒` on size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = ">")]
    Greater,
    #[serde(rename = ">=")]
    GreaterEq,
    #[serde(rename = "⊒")]
    Covers,
}

impl Relation {
    pub fn is_strict(self) -> bool {
        self == Relation::Greater
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Greater => ">",
            Relation::GreaterEq => "≥",
            Relation::Covers => "⊒",
        })
    }
}

/// One natural-number inequality that `a ≻ b` (or `a ≽ b`) reduces to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Obligation {
    pub path: String,
    pub lhs: MaxPoly,
    pub relation: Relation,
    pub rhs: MaxPoly,
}

impl Obligation {
    pub fn certified(&self) -> bool {
        if self.relation.is_strict() {
            certify_gt(&self.lhs, &self.rhs)
        } else {
            certify_ge(&self.lhs, &self.rhs)
        }
    }

    pub fn decide(&self, cfg: &SearchConfig) -> Outcome {
        cmp_exprs(&self.lhs, &self.rhs, self.relation.is_strict(), cfg)
    }
}

impl fmt::Display for Obligation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} {} {}", self.path, self.lhs, self.relation, self.rhs)
    }
}

/// Splits `a ≻ b` (strict) or `a ≽ b` into inequalities between
/// max-polynomials. Function components are compared at shared fresh atoms.
pub fn obligations(a: &CostSizeValue, b: &CostSizeValue, mode: Mode) -> Result<Vec<Obligation>, ShapeError> {
    if a.ty() != b.ty() {
        return Err(ShapeError::TypeMismatch {
            expected: a.ty().to_string(),
            found: b.ty().to_string(),
        });
    }
    let mut out = Vec::new();
    let rel = match mode {
        Mode::Strict => Relation::Greater,
        Mode::Weak => Relation::GreaterEq,
    };
    out.push(Obligation {
        path: "cost".into(),
        lhs: a.numeric()?,
        relation: rel,
        rhs: b.numeric()?,
    });
    let mut fresh = 0;
    walk(
        &a.cost_fun()?,
        &b.cost_fun()?,
        a.shape.cost_fun(),
        "cost.f".into(),
        Relation::GreaterEq,
        &mut fresh,
        &mut out,
    )?;
    walk(
        &a.size()?,
        &b.size()?,
        &a.shape.size,
        "size".into(),
        Relation::Covers,
        &mut fresh,
        &mut out,
    )?;
    Ok(out)
}

fn walk(
    x: &Val,
    y: &Val,
    ty: &MetaType,
    path: String,
    rel: Relation,
    fresh: &mut usize,
    out: &mut Vec<Obligation>,
) -> Result<(), EvalError> {
    match ty {
        MetaType::Unit => Ok(()),
        MetaType::Nat => {
            out.push(Obligation {
                path,
                lhs: x.as_nat()?.clone(),
                relation: rel,
                rhs: y.as_nat()?.clone(),
            });
            Ok(())
        }
        MetaType::Prod(fields) => {
            for (i, f) in fields.iter().enumerate() {
                let label = f.label.as_deref().map(str::to_string).unwrap_or_else(|| i.to_string());
                walk(
                    &sem::proj(x, i)?,
                    &sem::proj(y, i)?,
                    &f.ty,
                    format!("{path}.{label}"),
                    rel,
                    fresh,
                    out,
                )?;
            }
            Ok(())
        }
        MetaType::Fun(dom, cod) => {
            *fresh += 1;
            let name = format!("a{fresh}");
            let arg = fresh_value(dom, &name);
            let (fx, fy) = (sem::apply(x, arg.clone(), 0)?, sem::apply(y, arg, 0)?);
            walk(&fx, &fy, cod, format!("{path}({name})"), rel, fresh, out)
        }
    }
}

/// Certified comparison: true only if every obligation is certified.
pub fn cmp(a: &CostSizeValue, b: &CostSizeValue, mode: Mode) -> Result<bool, ShapeError> {
    Ok(obligations(a, b, mode)?.iter().all(Obligation::certified))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_type;

    fn sorts() -> Vec<SortDecl> {
        vec![SortDecl::new("nat", &[]), SortDecl::new("list", &["l", "m"])]
    }

    #[test]
    fn base_shapes() {
        let nat = shape_of(&parse_type("nat").unwrap(), &sorts()).unwrap();
        assert_eq!(nat.cost, MetaType::prod([MetaType::Nat, MetaType::Unit]));
        assert_eq!(nat.size, MetaType::Nat);
        let list = shape_of(&parse_type("list").unwrap(), &sorts()).unwrap();
        assert_eq!(list.size.to_string(), "ℕ²");
        assert!(shape_of(&parse_type("tree").unwrap(), &sorts()).is_err());
    }

    #[test]
    fn map_shape_prints_like_the_worked_example() {
        let ty = parse_type("(nat => nat) => list => list").unwrap();
        let sh = shape_of(&ty, &sorts()).unwrap();
        assert_eq!(
            sh.cost_fun().to_string(),
            "(unit × ℕ ⇒ ℕ × unit) × (ℕ ⇒ ℕ) ⇒ ℕ × (unit × ℕ² ⇒ ℕ × unit)"
        );
        assert_eq!(lift(sh.cost_fun()).to_string(), "(ℕ ⇒ ℕ) × (ℕ ⇒ ℕ) ⇒ ℕ × (ℕ² ⇒ ℕ)");
        assert_eq!(sh.size.to_string(), "(ℕ ⇒ ℕ) ⇒ ℕ² ⇒ ℕ²");
    }

    fn ground(n: u64, size: u64) -> CostSizeValue {
        let shape = shape_of(&parse_type("nat").unwrap(), &sorts()).unwrap();
        let v = Val::tuple(vec![Val::tuple(vec![Val::nat(n), Val::Unit]), Val::nat(size)]);
        CostSizeValue::new(shape, v).unwrap()
    }

    #[test]
    fn ground_orders() {
        assert!(cmp(&ground(1, 3), &ground(0, 3), Mode::Strict).unwrap());
        assert!(!cmp(&ground(0, 3), &ground(0, 3), Mode::Strict).unwrap());
        assert!(cmp(&ground(0, 3), &ground(0, 3), Mode::Weak).unwrap());
        assert!(!cmp(&ground(5, 2), &ground(0, 3), Mode::Weak).unwrap());
    }

    #[test]
    fn non_conforming_values_are_rejected() {
        let shape = shape_of(&parse_type("list").unwrap(), &sorts()).unwrap();
        let v = Val::tuple(vec![Val::tuple(vec![Val::nat(0), Val::Unit]), Val::nat(1)]);
        assert!(CostSizeValue::new(shape, v).is_err());
    }
}
