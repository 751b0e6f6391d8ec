//! Shape checking of surface expressions and their elaboration into `Sem`.
//!
//! Users write entries against the lifted shapes, where one-point factors are
//! projected away. `up` and `down` convert between a full shape and its lift
//! so that semantic application always works on the complete form.

use crate::domain::{lift, MetaType};

use super::expr::InterpExpr;
use super::sem::{Sem, VarId};
use super::ShapeError;

/// Turns `e : lift(ty)` into a term of the full shape `ty`.
pub fn up(ty: &MetaType, e: Sem) -> Sem {
    match ty {
        MetaType::Nat => e,
        MetaType::Unit => Sem::Unit,
        MetaType::Prod(fields) => {
            let kept: Vec<usize> = (0..fields.len())
                .filter(|&i| lift(&fields[i].ty) != MetaType::Unit)
                .collect();
            if kept.len() == 1 {
                let k = kept[0];
                let mut e = Some(e);
                return Sem::Tuple(
                    fields
                        .iter()
                        .enumerate()
                        .map(|(i, f)| {
                            if i == k {
                                up(&f.ty, e.take().unwrap())
                            } else {
                                up(&f.ty, Sem::Unit)
                            }
                        })
                        .collect(),
                );
            }
            let fields = fields.clone();
            let body = move |v: Sem| {
                let mut j = 0;
                Sem::Tuple(
                    fields
                        .iter()
                        .enumerate()
                        .map(|(i, f)| {
                            if kept.contains(&i) {
                                j += 1;
                                up(&f.ty, Sem::proj(v.clone(), j - 1))
                            } else {
                                up(&f.ty, Sem::Unit)
                            }
                        })
                        .collect(),
                )
            };
            share(e, body)
        }
        MetaType::Fun(a, b) => {
            let (a, b) = (a.clone(), b.clone());
            Sem::lam(move |v| up(&b, Sem::app(e, down(&a, v))))
        }
    }
}

/// Turns `e : ty` into a term of the lifted shape `lift(ty)`.
pub fn down(ty: &MetaType, e: Sem) -> Sem {
    match ty {
        MetaType::Nat => e,
        MetaType::Unit => Sem::Unit,
        MetaType::Prod(fields) => {
            let kept: Vec<usize> = (0..fields.len())
                .filter(|&i| lift(&fields[i].ty) != MetaType::Unit)
                .collect();
            match kept.len() {
                0 => Sem::Unit,
                1 => down(&fields[kept[0]].ty, Sem::proj(e, kept[0])),
                _ => {
                    let fields = fields.clone();
                    share(e, move |v| {
                        Sem::Tuple(
                            kept.iter()
                                .map(|&i| down(&fields[i].ty, Sem::proj(v.clone(), i)))
                                .collect(),
                        )
                    })
                }
            }
        }
        MetaType::Fun(a, b) => {
            let (a, b) = (a.clone(), b.clone());
            Sem::lam(move |v| down(&b, Sem::app(e, up(&a, v))))
        }
    }
}

/// Binds `e` once so `body` may mention it several times.
fn share(e: Sem, body: impl FnOnce(Sem) -> Sem) -> Sem {
    match e {
        Sem::Var(_) | Sem::Lit(_) | Sem::Unit => body(e),
        e => Sem::app(Sem::lam(body), e),
    }
}

struct Ctx {
    params: Vec<(String, MetaType, VarId)>,
}

/// Checks `expr` against the lifted shape `expected` and elaborates it.
pub fn elaborate(expr: &InterpExpr, expected: &MetaType) -> Result<Sem, ShapeError> {
    Ctx { params: Vec::new() }.check(expr, expected)
}

fn mismatch(expr: &InterpExpr, expected: &MetaType, found: impl ToString) -> ShapeError {
    ShapeError::Mismatch {
        expr: expr.to_string(),
        expected: expected.to_string(),
        found: found.to_string(),
    }
}

impl Ctx {
    fn check(&mut self, expr: &InterpExpr, expected: &MetaType) -> Result<Sem, ShapeError> {
        match expr {
            InterpExpr::Lam(params, body) => {
                if let MetaType::Fun(dom, cod) = expected {
                    let (first, rest) = params.split_first().expect("parser yields a binder");
                    if self.params.iter().any(|(p, ..)| p == first) || rest.contains(first) {
                        return Err(ShapeError::DuplicateParam(first.clone()));
                    }
                    let var = VarId::fresh();
                    self.params.push((first.clone(), (**dom).clone(), var));
                    let inner = if rest.is_empty() {
                        self.check(body, cod)
                    } else {
                        self.check(&InterpExpr::Lam(rest.to_vec(), body.clone()), cod)
                    };
                    self.params.pop();
                    return Ok(Sem::Lam(var, inner?.into()));
                }
                if let Some((dom, cod)) = expected.as_cost_pair() {
                    // A bare λ where (n, λ..) is expected: n = 0.
                    let f = MetaType::Fun(dom.clone().into(), cod.clone().into());
                    return Ok(Sem::Tuple(vec![Sem::Lit(0), self.check(expr, &f)?]));
                }
                Err(mismatch(expr, expected, "a function"))
            }
            InterpExpr::Tuple(items) => match expected {
                MetaType::Prod(fields) if fields.len() == items.len() => Ok(Sem::Tuple(
                    items
                        .iter()
                        .zip(fields)
                        .map(|(e, f)| self.check(e, &f.ty))
                        .collect::<Result<_, _>>()?,
                )),
                _ => {
                    let (_, found) = self.synth(expr)?;
                    Err(mismatch(expr, expected, found))
                }
            },
            _ => {
                let (sem, found) = self.synth(expr)?;
                if found.same_shape(expected) {
                    Ok(sem)
                } else {
                    Err(mismatch(expr, expected, found))
                }
            }
        }
    }

    fn synth(&mut self, expr: &InterpExpr) -> Result<(Sem, MetaType), ShapeError> {
        match expr {
            InterpExpr::Nat(n) => Ok((Sem::Lit(*n), MetaType::Nat)),
            InterpExpr::Param(p) => self
                .params
                .iter()
                .rev()
                .find(|(name, ..)| name == p)
                .map(|(_, ty, v)| (Sem::Var(*v), ty.clone()))
                .ok_or_else(|| ShapeError::UnknownParam(p.clone())),
            InterpExpr::Field(e, name) => {
                let (sem, ty) = self.synth(e)?;
                if let MetaType::Prod(fields) = &ty {
                    let by_label = fields.iter().position(|f| f.label.as_deref() == Some(name.as_str()));
                    let idx = by_label.or_else(|| name.parse::<usize>().ok().filter(|i| *i < fields.len()));
                    if let Some(i) = idx {
                        return Ok((Sem::proj(sem, i), fields[i].ty.clone()));
                    }
                }
                if matches!(ty, MetaType::Fun(..)) && name == "s" {
                    // In size context a functional parameter already is its size.
                    return Ok((sem, ty));
                }
                Err(ShapeError::UnknownComponent {
                    expr: e.to_string(),
                    component: name.clone(),
                    ty: ty.to_string(),
                })
            }
            InterpExpr::Add(a, b) => Ok((
                Sem::add(self.check(a, &MetaType::Nat)?, self.check(b, &MetaType::Nat)?),
                MetaType::Nat,
            )),
            InterpExpr::Mul(a, b) => Ok((
                Sem::mul(self.check(a, &MetaType::Nat)?, self.check(b, &MetaType::Nat)?),
                MetaType::Nat,
            )),
            InterpExpr::Max(items) => Ok((
                Sem::Max(
                    items
                        .iter()
                        .map(|e| self.check(e, &MetaType::Nat))
                        .collect::<Result<_, _>>()?,
                ),
                MetaType::Nat,
            )),
            InterpExpr::Tuple(items) => {
                let mut sems = Vec::new();
                let mut tys = Vec::new();
                for e in items {
                    let (s, t) = self.synth(e)?;
                    sems.push(s);
                    tys.push(t);
                }
                Ok((Sem::Tuple(sems), MetaType::prod(tys)))
            }
            InterpExpr::Lam(..) => Err(ShapeError::Uninferable(expr.to_string())),
            InterpExpr::App(f, args) => {
                let (mut sem, mut ty) = self.synth(f)?;
                // Numeric costs of intermediate partial applications.
                let mut acc: Vec<Sem> = Vec::new();
                for arg in args {
                    if let MetaType::Fun(dom, cod) = &ty {
                        sem = Sem::app(sem, self.check(arg, dom)?);
                        ty = (**cod).clone();
                    } else if let Some((dom, cod)) = ty.as_cost_pair() {
                        let a = self.check(arg, dom)?;
                        let cod = cod.clone();
                        acc.push(Sem::proj(sem.clone(), 0));
                        sem = Sem::app(Sem::proj(sem, 1), a);
                        ty = cod;
                    } else {
                        return Err(ShapeError::NotAFunction {
                            expr: f.to_string(),
                            ty: ty.to_string(),
                        });
                    }
                }
                if acc.is_empty() {
                    return Ok((sem, ty));
                }
                match &ty {
                    MetaType::Nat => {
                        acc.push(sem);
                        Ok((Sem::sum(acc), ty))
                    }
                    MetaType::Prod(fields) if fields.len() == 2 && fields[0].ty == MetaType::Nat => {
                        acc.push(Sem::proj(sem.clone(), 0));
                        Ok((Sem::Tuple(vec![Sem::sum(acc), Sem::proj(sem, 1)]), ty))
                    }
                    _ => Err(ShapeError::NotAFunction {
                        expr: expr.to_string(),
                        ty: ty.to_string(),
                    }),
                }
            }
        }
    }
}
