//! Seeded random generators for property tests: types, signatures, terms,
//! spec files, interpretation expressions and monotone semantic values.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::domain::{shape_of, CostSizeValue, MetaType};
use crate::interp::expr::{InterpEntry, InterpExpr};
use crate::interp::sem::{eval, Env, Sem, VarId};
use crate::rewrite::Rule;
use crate::syntax::SpecFile;
use crate::term::{Term, VarEnv};
use crate::types::{Signature, SimpleType, SortDecl};

const PARAMS: [&str; 8] = ["x", "y", "z", "q", "F", "G", "x1", "acc"];
const COMPONENTS: [&str; 4] = ["l", "m", "c", "s"];
const SYMBOLS: [&str; 10] = ["0", "s", "f", "g", "h", "nil", "cons", "plus", "main", "k2"];
const VARS: [&str; 6] = ["x", "y", "z", "xs", "F", "G"];

pub struct Gen {
    rng: ChaCha8Rng,
}

impl Gen {
    pub fn new(seed: u64) -> Self {
        Gen {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// `nat` with one size component and `list (l, m)` with two.
    pub fn standard_sorts() -> Vec<SortDecl> {
        vec![SortDecl::new("nat", &[]), SortDecl::new("list", &["l", "m"])]
    }

    /// A type over `sorts` of order at most `max_order`.
    pub fn simple_type(&mut self, sorts: &[SortDecl], max_order: usize) -> SimpleType {
        let base = |g: &mut Gen| SimpleType::Base(sorts.choose(&mut g.rng).expect("some sort").name.clone());
        if max_order == 0 || self.rng.gen_bool(0.3) {
            return base(self);
        }
        let arity = self.rng.gen_range(1..=2);
        let args: Vec<SimpleType> = (0..arity)
            .map(|_| {
                if max_order >= 2 && self.rng.gen_bool(0.25) {
                    self.simple_type(sorts, max_order - 1)
                } else {
                    base(self)
                }
            })
            .collect();
        let result = base(self);
        SimpleType::curried(args, result)
    }

    /// A signature over one or two sorts with at least one constant per sort.
    pub fn signature(&mut self) -> Signature {
        let mut sorts = vec![SortDecl::new("nat", &[])];
        if self.rng.gen_bool(0.5) {
            sorts.push(SortDecl::new("list", &["l", "m"]));
        }
        let mut names: Vec<&str> = SYMBOLS.to_vec();
        names.shuffle(&mut self.rng);
        let mut symbols: Vec<(Arc<str>, SimpleType)> = Vec::new();
        for (i, s) in sorts.iter().enumerate() {
            symbols.push((Arc::from(names[i]), SimpleType::Base(s.name.clone())));
        }
        let extra = self.rng.gen_range(1..=4);
        for name in names.iter().skip(sorts.len()).take(extra) {
            let ty = self.simple_type(&sorts, 2);
            symbols.push((Arc::from(*name), ty));
        }
        Signature::new(sorts, symbols).expect("generated signatures are well-formed")
    }

    /// A variable context over the signature's sorts.
    pub fn var_env(&mut self, sig: &Signature) -> VarEnv {
        let mut env = VarEnv::new();
        let n = self.rng.gen_range(0..=VARS.len());
        for name in VARS.iter().take(n) {
            if sig.contains(name) {
                continue;
            }
            let ty = self.simple_type(sig.sorts(), 1);
            env.insert(name, ty).expect("fresh names");
        }
        env
    }

    /// A term of type `ty`, or `None` if the depth ran out first.
    pub fn term(&mut self, sig: &Signature, env: &VarEnv, ty: &SimpleType, depth: usize) -> Option<Term> {
        let mut heads: Vec<(Term, usize)> = Vec::new();
        let mut push = |head: Term| {
            let mut cur = head.ty().clone();
            let mut k = 0;
            loop {
                if &cur == ty {
                    heads.push((head.clone(), k));
                }
                match cur {
                    SimpleType::Arrow(_, b) => {
                        cur = (*b).clone();
                        k += 1;
                    }
                    SimpleType::Base(_) => break,
                }
            }
        };
        for (name, t) in sig.symbols() {
            push(Term::sym(name, t.clone()));
        }
        for (name, t) in env.iter() {
            push(Term::var(name, t.clone()));
        }
        if depth == 0 {
            heads.retain(|(_, k)| *k == 0);
        }
        for _ in 0..4 {
            let (head, k) = heads.choose(&mut self.rng)?.clone();
            let (params, _) = head.ty().uncurry();
            let params: Vec<SimpleType> = params[..k].iter().map(|p| (*p).clone()).collect();
            let mut args = Vec::new();
            for p in &params {
                match self.term(sig, env, p, depth.saturating_sub(1)) {
                    Some(a) => args.push(a),
                    None => break,
                }
            }
            if args.len() == k {
                return Some(Term::apply_all(head, args).expect("argument types match"));
            }
        }
        None
    }

    /// A well-formed rule with a symbol-headed left-hand side whose
    /// arguments are variables or small terms.
    fn rule(&mut self, sig: &Signature, env: &VarEnv) -> Option<Rule> {
        let (name, fty) = sig.symbols().choose(&mut self.rng)?.clone();
        let k = self.rng.gen_range(0..=fty.arity());
        let (params, _) = fty.uncurry();
        let mut lhs = Term::sym(&name, fty.clone());
        for p in params[..k].iter() {
            let arg = self.term(sig, env, p, 1)?;
            lhs = Term::app(lhs, arg).ok()?;
        }
        let lhs_vars: VarEnv = {
            let mut e = VarEnv::new();
            for (n, t) in lhs.typed_vars() {
                e.insert(&n, t).ok()?;
            }
            e
        };
        let rhs = self.term(sig, &lhs_vars, lhs.ty(), 2)?;
        Rule::new(lhs, rhs).ok()
    }

    /// An interpretation expression; syntactically valid, not shape-checked.
    pub fn expr(&mut self, depth: usize) -> InterpExpr {
        let leaf = self.rng.gen_bool(if depth == 0 { 1.0 } else { 0.3 });
        if leaf {
            return if self.rng.gen_bool(0.4) {
                InterpExpr::Nat(self.rng.gen_range(0..20))
            } else {
                InterpExpr::param(PARAMS.choose(&mut self.rng).expect("nonempty"))
            };
        }
        let d = depth - 1;
        match self.rng.gen_range(0..8) {
            0 => {
                let base = InterpExpr::param(PARAMS.choose(&mut self.rng).expect("nonempty"));
                let name = if self.rng.gen_bool(0.2) {
                    self.rng.gen_range(0..3).to_string()
                } else {
                    COMPONENTS.choose(&mut self.rng).expect("nonempty").to_string()
                };
                base.field(&name)
            }
            1 => self.expr(d).add(self.expr(d)),
            2 => self.expr(d).mul(self.expr(d)),
            3 => {
                let n = self.rng.gen_range(2..=3);
                InterpExpr::Max((0..n).map(|_| self.expr(d)).collect())
            }
            4 => {
                let n = self.rng.gen_range(2..=3);
                InterpExpr::Tuple((0..n).map(|_| self.expr(d)).collect())
            }
            5 => {
                let n = self.rng.gen_range(1..=3);
                let mut ps: Vec<&str> = PARAMS.to_vec();
                ps.shuffle(&mut self.rng);
                InterpExpr::lam(&ps[..n], self.expr(d))
            }
            6 => {
                let f = InterpExpr::param(PARAMS.choose(&mut self.rng).expect("nonempty"));
                let f = if self.rng.gen_bool(0.5) { f.field("c") } else { f };
                let n = self.rng.gen_range(1..=2);
                f.call((0..n).map(|_| self.expr(d)).collect())
            }
            _ => self.expr(d).add(InterpExpr::Nat(self.rng.gen_range(0..5))),
        }
    }

    /// A random spec file, possibly with a `main` designation.
    pub fn spec(&mut self) -> SpecFile {
        let signature = self.signature();
        let vars = self.var_env(&signature);
        let mut rules = Vec::new();
        for _ in 0..self.rng.gen_range(0..5) {
            if let Some(r) = self.rule(&signature, &vars) {
                // Only variables from the declared context may occur.
                if r.lhs().typed_vars().iter().all(|(n, t)| vars.get(n) == Some(t)) {
                    rules.push(r);
                }
            }
        }
        let mut interpretations = Vec::new();
        for (name, _) in signature.symbols() {
            if self.rng.gen_bool(0.6) {
                interpretations.push(InterpEntry {
                    symbol: name.to_string(),
                    cost: self.expr(3),
                    size: self.expr(3),
                });
            }
        }
        let main = if self.rng.gen_bool(0.3) {
            signature.symbols().choose(&mut self.rng).map(|(n, _)| n.clone())
        } else {
            None
        };
        let interp_positions = vec![Default::default(); interpretations.len()];
        SpecFile {
            signature,
            vars,
            rules,
            interpretations,
            main,
            interp_positions,
        }
    }

    /// A closed, weakly monotonic element of `⟦ty⟧`. Constants are drawn
    /// from `0..=max_const`.
    pub fn value(&mut self, ty: &SimpleType, sorts: &[SortDecl], max_const: u64) -> CostSizeValue {
        let shape = shape_of(ty, sorts).expect("types over declared sorts");
        let sem = self.sem(&shape.full(), &mut Vec::new(), 3, max_const);
        let val = eval(&sem, &Env::default(), 0).expect("generated terms are well-shaped");
        CostSizeValue::new(shape, val).expect("generated values conform")
    }

    /// A term of shape `ty` built only from monotone operations, over the
    /// parameters in `ctx`.
    pub fn sem(&mut self, ty: &MetaType, ctx: &mut Vec<(VarId, MetaType)>, depth: usize, max_const: u64) -> Sem {
        match ty {
            MetaType::Unit => Sem::Unit,
            MetaType::Prod(fields) => {
                Sem::Tuple(fields.iter().map(|f| self.sem(&f.ty, ctx, depth, max_const)).collect())
            }
            MetaType::Fun(dom, cod) => {
                let v = VarId::fresh();
                ctx.push((v, (**dom).clone()));
                let body = self.sem(cod, ctx, depth, max_const);
                ctx.pop();
                Sem::Lam(v, Arc::new(body))
            }
            MetaType::Nat => self.nat(ctx, depth, max_const),
        }
    }

    fn nat(&mut self, ctx: &mut Vec<(VarId, MetaType)>, depth: usize, max_const: u64) -> Sem {
        let usable: Vec<(VarId, MetaType)> = ctx.iter().filter(|(_, t)| has_nat(t)).cloned().collect();
        if depth == 0 {
            return Sem::Lit(self.rng.gen_range(0..=max_const));
        }
        if self.rng.gen_bool(0.35) {
            if !usable.is_empty() && self.rng.gen_bool(0.6) {
                let (v, t) = usable.choose(&mut self.rng).expect("nonempty").clone();
                return self.read_nat(Sem::Var(v), &t, ctx, depth.saturating_sub(1), max_const);
            }
            return Sem::Lit(self.rng.gen_range(0..=max_const));
        }
        let d = depth - 1;
        match self.rng.gen_range(0..4) {
            0 | 1 => Sem::add(self.nat(ctx, d, max_const), self.nat(ctx, d, max_const)),
            2 => Sem::mul(self.nat(ctx, d, max_const), self.nat(ctx, d, max_const)),
            _ => Sem::Max(vec![self.nat(ctx, d, max_const), self.nat(ctx, d, max_const)]),
        }
    }

    /// A natural number read off `e : ty`, applying functions to generated arguments.
    fn read_nat(
        &mut self,
        e: Sem,
        ty: &MetaType,
        ctx: &mut Vec<(VarId, MetaType)>,
        depth: usize,
        max_const: u64,
    ) -> Sem {
        match ty {
            MetaType::Nat => e,
            MetaType::Prod(fields) => {
                let idx: Vec<usize> = (0..fields.len()).filter(|&i| has_nat(&fields[i].ty)).collect();
                let i = *idx.choose(&mut self.rng).expect("has_nat holds");
                self.read_nat(Sem::proj(e, i), &fields[i].ty, ctx, depth, max_const)
            }
            MetaType::Fun(dom, cod) => {
                let arg = self.sem(dom, ctx, depth, max_const);
                self.read_nat(Sem::app(e, arg), cod, ctx, depth, max_const)
            }
            MetaType::Unit => unreachable!("units carry no number"),
        }
    }
}

fn has_nat(ty: &MetaType) -> bool {
    match ty {
        MetaType::Nat => true,
        MetaType::Unit => false,
        MetaType::Prod(fields) => fields.iter().any(|f| has_nat(&f.ty)),
        MetaType::Fun(_, c) => has_nat(c),
    }
}

/// Ground terms of the system's signature, biased to contain redexes.
pub fn ground_term(g: &mut Gen, sig: &Signature, depth: usize) -> Option<Term> {
    let (_, ty) = sig.symbols().choose(&mut g.rng)?.clone();
    let (params, result) = ty.uncurry();
    let k = g.rng.gen_range(0..=params.len());
    let target = if k == params.len() {
        result.clone()
    } else {
        let rest: Vec<SimpleType> = params[k..].iter().map(|p| (*p).clone()).collect();
        SimpleType::curried(rest, result.clone())
    };
    g.term(sig, &VarEnv::new(), &target, depth)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::conforms;

    #[test]
    fn generated_values_conform() {
        let mut g = Gen::new(1);
        let sorts = Gen::standard_sorts();
        for _ in 0..200 {
            let ty = g.simple_type(&sorts, 2);
            let v = g.value(&ty, &sorts, 5);
            assert!(conforms(v.val(), &v.shape().full()));
        }
    }

    #[test]
    fn generated_specs_are_consistent() {
        let mut g = Gen::new(2);
        for _ in 0..100 {
            let spec = g.spec();
            for r in &spec.rules {
                assert!(r.rhs().vars().is_subset(&r.lhs().vars()));
            }
        }
    }

    #[test]
    fn ground_terms_are_closed() {
        let spec = crate::syntax::parse_spec(crate::corpus::MAP_CORRECTED).unwrap();
        let mut g = Gen::new(3);
        let mut found = 0;
        for _ in 0..200 {
            if let Some(t) = ground_term(&mut g, &spec.signature, 3) {
                assert!(t.is_ground());
                found += 1;
            }
        }
        assert!(found > 100);
    }
}
