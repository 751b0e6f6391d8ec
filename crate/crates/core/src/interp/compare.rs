//! Three-valued comparison of max-polynomial normal forms.
//!
//! Certification is sound and incomplete: every polynomial on the right must
//! be dominated by one on the left, coefficient by coefficient, where a
//! function atom applied to larger arguments may stand in for the same atom
//! applied to smaller ones (all inhabitants are weakly monotonic).
//!
//! Refutation instantiates the atoms with concrete naturals and small
//! monotone probe functions until the inequality fails.

use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::domain::MetaType;

use super::poly::{MaxPoly, Monomial, Poly};
use super::sem::{
    eval, free_atoms, instantiate, reify, Atom, AtomId, Elim, Env, EvalError, Instantiation, Neutral, Nf, Sem, Val,
};

/// Certified `a >= b` for all values of the atoms.
pub fn certify_ge(a: &MaxPoly, b: &MaxPoly) -> bool {
    b.polys().all(|q| a.polys().any(|p| poly_ge(p, q)))
}

/// Certified `a > b`, i.e. `a >= b + 1` over ℕ.
pub fn certify_gt(a: &MaxPoly, b: &MaxPoly) -> bool {
    certify_ge(a, &b.add(&MaxPoly::constant(1)))
}

fn poly_ge(p: &Poly, q: &Poly) -> bool {
    if p.dominates(q) {
        return true;
    }
    let mut budget: Vec<(&Monomial, u64)> = p.terms().collect();
    let mut need: Vec<(&Monomial, u64)> = q.terms().collect();
    // Exact matches first, then monotone absorption.
    for (m, c) in need.iter_mut() {
        if let Some(slot) = budget.iter_mut().find(|(b, _)| b == m) {
            let take = slot.1.min(*c);
            slot.1 -= take;
            *c -= take;
        }
    }
    for (m, c) in need.iter_mut() {
        for slot in budget.iter_mut() {
            if *c == 0 {
                break;
            }
            if slot.1 > 0 && monomial_ge(slot.0, m) {
                let take = slot.1.min(*c);
                slot.1 -= take;
                *c -= take;
            }
        }
        if *c > 0 {
            return false;
        }
    }
    true
}

fn monomial_ge(a: &Monomial, b: &Monomial) -> bool {
    if a == b {
        return true;
    }
    if a.degree() != b.degree() || a.is_one() {
        return false;
    }
    let expand = |m: &Monomial| -> Vec<Neutral> {
        m.factors()
            .flat_map(|(n, e)| std::iter::repeat_n(n.clone(), e as usize))
            .collect()
    };
    let (xs, ys) = (expand(a), expand(b));
    if xs.len() > 8 {
        return false;
    }
    let mut used = vec![false; xs.len()];
    perfect_match(&xs, &ys, 0, &mut used)
}

fn perfect_match(xs: &[Neutral], ys: &[Neutral], j: usize, used: &mut [bool]) -> bool {
    if j == ys.len() {
        return true;
    }
    for i in 0..xs.len() {
        if !used[i] && neutral_ge(&xs[i], &ys[j]) {
            used[i] = true;
            if perfect_match(xs, ys, j + 1, used) {
                return true;
            }
            used[i] = false;
        }
    }
    false
}

fn neutral_ge(a: &Neutral, b: &Neutral) -> bool {
    a == b
        || (a.head == b.head
            && a.spine.len() == b.spine.len()
            && a.spine.iter().zip(&b.spine).all(|pair| match pair {
                (Elim::Proj(i), Elim::Proj(j)) => i == j,
                (Elim::Arg(u), Elim::Arg(v)) => nf_ge(u, v),
                _ => false,
            }))
}

/// Certified pointwise `u >= v` between normal forms of the same shape.
pub fn nf_ge(u: &Nf, v: &Nf) -> bool {
    match (u, v) {
        (Nf::Nat(p), Nf::Nat(q)) => certify_ge(p, q),
        (Nf::Unit, Nf::Unit) => true,
        (Nf::Tuple(xs), Nf::Tuple(ys)) => xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| nf_ge(x, y)),
        (
            Nf::Lam {
                depth: d1, body: b1, ..
            },
            Nf::Lam {
                depth: d2, body: b2, ..
            },
        ) => d1 == d2 && nf_ge(b1, b2),
        _ => false,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Certified,
    Refuted(Witness),
    Unknown,
}

/// Limits for refutation search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchConfig {
    /// Largest value tried for a natural-number atom.
    pub grid: u64,
    pub coef_max: u64,
    pub off_max: u64,
    /// Candidates enumerated by increasing total weight.
    pub budget: usize,
    /// Seeded random candidates tried afterwards.
    pub samples: usize,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            grid: 8,
            coef_max: 2,
            off_max: 2,
            budget: 20_000,
            samples: 2_000,
            seed: 0x7e57,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Assignment {
    pub atom: String,
    pub value: String,
}

/// Concrete atom values under which a claimed inequality fails.
#[derive(Debug, Clone, Serialize)]
pub struct Witness {
    pub assignments: Vec<Assignment>,
    pub lhs: u64,
    pub rhs: u64,
    #[serde(skip)]
    instantiation: Instantiation,
}

impl PartialEq for Witness {
    fn eq(&self, other: &Self) -> bool {
        self.assignments == other.assignments && self.lhs == other.lhs && self.rhs == other.rhs
    }
}

impl Eq for Witness {}

impl Witness {
    pub fn instantiation(&self) -> &Instantiation {
        &self.instantiation
    }

    /// Evaluates both sides again; true iff the relation really fails.
    pub fn violates(&self, lhs: &MaxPoly, rhs: &MaxPoly, strict: bool) -> bool {
        match (ground(lhs, &self.instantiation), ground(rhs, &self.instantiation)) {
            (Some(l), Some(r)) => fails(l, r, strict),
            _ => false,
        }
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, a) in self.assignments.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{} = {}", a.atom, a.value)?;
        }
        if !self.assignments.is_empty() {
            write!(f, "; ")?;
        }
        write!(f, "lhs = {}, rhs = {}", self.lhs, self.rhs)
    }
}

fn fails(l: u64, r: u64, strict: bool) -> bool {
    if strict {
        l <= r
    } else {
        l < r
    }
}

fn ground(p: &MaxPoly, inst: &Instantiation) -> Option<u64> {
    instantiate(p, inst, 0).ok()?.as_constant()
}

/// Certifies `lhs > rhs` (strict) or `lhs >= rhs`, otherwise searches for a witness.
pub fn cmp_exprs(lhs: &MaxPoly, rhs: &MaxPoly, strict: bool, cfg: &SearchConfig) -> Outcome {
    let ok = if strict {
        certify_gt(lhs, rhs)
    } else {
        certify_ge(lhs, rhs)
    };
    if ok {
        return Outcome::Certified;
    }
    match search(lhs, rhs, strict, cfg) {
        Some(w) => Outcome::Refuted(w),
        None => Outcome::Unknown,
    }
}

/// How the atoms of a comparison are turned into digits.
struct Space {
    atoms: Vec<Atom>,
    /// Digit offset of each atom.
    starts: Vec<usize>,
    bounds: Vec<u64>,
}

fn output_leaves(ty: &MetaType) -> usize {
    match ty {
        MetaType::Nat => 1,
        MetaType::Unit => 0,
        MetaType::Prod(f) => f.iter().map(|x| output_leaves(&x.ty)).sum(),
        MetaType::Fun(_, c) => output_leaves(c),
    }
}

impl Space {
    fn new(lhs: &MaxPoly, rhs: &MaxPoly, nat_max: u64, coef_max: u64, off_max: u64) -> Space {
        let mut found = BTreeMap::new();
        free_atoms(lhs, &mut found);
        free_atoms(rhs, &mut found);
        let atoms: Vec<Atom> = found.into_values().collect();
        let mut starts = Vec::new();
        let mut bounds = Vec::new();
        for a in &atoms {
            starts.push(bounds.len());
            match a.ty() {
                MetaType::Fun(_, cod) => {
                    bounds.push(1);
                    for _ in 0..output_leaves(cod) {
                        bounds.push(coef_max);
                        bounds.push(off_max);
                    }
                }
                _ => bounds.push(nat_max),
            }
        }
        Space { atoms, starts, bounds }
    }

    fn digits_of(&self, i: usize) -> std::ops::Range<usize> {
        let end = self.starts.get(i + 1).copied().unwrap_or(self.bounds.len());
        self.starts[i]..end
    }

    fn decode(&self, digits: &[u64]) -> Result<Instantiation, EvalError> {
        let mut map = BTreeMap::new();
        for (i, a) in self.atoms.iter().enumerate() {
            let ds = &digits[self.digits_of(i)];
            let v = match a.ty() {
                MetaType::Fun(..) => eval(&probe(a.ty(), ds[0] == 1, &ds[1..]), &Env::default(), 0)?,
                _ => Val::nat(ds[0]),
            };
            map.insert(a.id(), v);
        }
        Ok(Instantiation::new(map))
    }

    fn witness(&self, inst: Instantiation, lhs: u64, rhs: u64) -> Witness {
        let assignments = self
            .atoms
            .iter()
            .map(|a| {
                let v = inst.get(a.id()).expect("decoded atom");
                let value = match v {
                    Val::Nat(p) => p.to_string(),
                    f => reify(f, a.ty(), 0)
                        .map(|nf| nf.to_string())
                        .unwrap_or_else(|e| e.to_string()),
                };
                Assignment {
                    atom: a.name().to_string(),
                    value,
                }
            })
            .collect();
        Witness {
            assignments,
            lhs,
            rhs,
            instantiation: inst,
        }
    }

    fn try_digits(&self, digits: &[u64], lhs: &MaxPoly, rhs: &MaxPoly, strict: bool) -> Option<Witness> {
        let inst = self.decode(digits).ok()?;
        let l = ground(lhs, &inst)?;
        let r = ground(rhs, &inst)?;
        fails(l, r, strict).then(|| self.witness(inst, l, r))
    }
}

/// A monotone probe `λa. coef * combine(leaves a) + off` per output leaf,
/// where `combine` is a sum or a max over the natural leaves of the input.
fn probe(ty: &MetaType, use_max: bool, params: &[u64]) -> Sem {
    let mut params = params.chunks(2).map(|c| (c[0], c[1]));
    let (dom, cod) = ty.as_fun().expect("probe at function type");
    probe_fun(dom, cod, Vec::new(), use_max, &mut params)
}

fn probe_fun(
    dom: &MetaType,
    cod: &MetaType,
    acc: Vec<Sem>,
    use_max: bool,
    params: &mut dyn Iterator<Item = (u64, u64)>,
) -> Sem {
    let (dom, cod) = (dom.clone(), cod.clone());
    Sem::lam(move |v| {
        let mut inputs = acc;
        inputs.extend(leaves(v, &dom));
        probe_out(&cod, inputs, use_max, params)
    })
}

fn probe_out(ty: &MetaType, inputs: Vec<Sem>, use_max: bool, params: &mut dyn Iterator<Item = (u64, u64)>) -> Sem {
    match ty {
        MetaType::Nat => {
            let (c, o) = params.next().unwrap_or((0, 0));
            let combined = match (inputs.len(), use_max) {
                (0, _) => Sem::Lit(0),
                (1, _) => inputs.into_iter().next().unwrap(),
                (_, true) => Sem::Max(inputs),
                (_, false) => Sem::sum(inputs),
            };
            Sem::add(Sem::mul(Sem::Lit(c), combined), Sem::Lit(o))
        }
        MetaType::Unit => Sem::Unit,
        MetaType::Prod(fields) => Sem::Tuple(
            fields
                .iter()
                .map(|f| probe_out(&f.ty, inputs.clone(), use_max, params))
                .collect(),
        ),
        MetaType::Fun(d, c) => probe_fun(d, c, inputs, use_max, params),
    }
}

/// Natural-number leaves of `v : ty`; function components are read at zero.
pub(crate) fn leaves(v: Sem, ty: &MetaType) -> Vec<Sem> {
    match ty {
        MetaType::Nat => vec![v],
        MetaType::Unit => Vec::new(),
        MetaType::Prod(fields) => fields
            .iter()
            .enumerate()
            .flat_map(|(i, f)| leaves(Sem::proj(v.clone(), i), &f.ty))
            .collect(),
        MetaType::Fun(d, c) => leaves(Sem::app(v, zero(d)), c),
    }
}

pub(crate) fn zero(ty: &MetaType) -> Sem {
    match ty {
        MetaType::Nat => Sem::Lit(0),
        MetaType::Unit => Sem::Unit,
        MetaType::Prod(fields) => Sem::Tuple(fields.iter().map(|f| zero(&f.ty)).collect()),
        MetaType::Fun(_, c) => {
            let c = c.clone();
            Sem::lam(move |_| zero(&c))
        }
    }
}

/// Calls `f` on digit vectors with `0 <= d[i] <= bounds[i]` in order of
/// increasing sum; stops when `f` returns false or `limit` calls were made.
fn by_weight(bounds: &[u64], limit: usize, f: &mut dyn FnMut(&[u64]) -> bool) {
    let mut suffix = vec![0u64; bounds.len() + 1];
    for i in (0..bounds.len()).rev() {
        suffix[i] = suffix[i + 1] + bounds[i];
    }
    let mut calls = 0usize;
    let mut digits = vec![0u64; bounds.len()];

    #[allow(clippy::too_many_arguments)]
    fn rec(
        i: usize,
        left: u64,
        bounds: &[u64],
        suffix: &[u64],
        digits: &mut Vec<u64>,
        calls: &mut usize,
        limit: usize,
        f: &mut dyn FnMut(&[u64]) -> bool,
    ) -> bool {
        if i == bounds.len() {
            if left != 0 {
                return true;
            }
            *calls += 1;
            return f(digits) && *calls < limit;
        }
        let lo = left.saturating_sub(suffix[i + 1]);
        let hi = left.min(bounds[i]);
        for d in lo..=hi {
            digits[i] = d;
            if !rec(i + 1, left - d, bounds, suffix, digits, calls, limit, f) {
                return false;
            }
        }
        digits[i] = 0;
        true
    }

    for w in 0..=suffix[0] {
        if !rec(0, w, bounds, &suffix, &mut digits, &mut calls, limit, f) {
            return;
        }
    }
}

/// Looks for atom values violating `lhs > rhs` (strict) or `lhs >= rhs`.
pub fn search(lhs: &MaxPoly, rhs: &MaxPoly, strict: bool, cfg: &SearchConfig) -> Option<Witness> {
    let space = Space::new(lhs, rhs, cfg.grid, cfg.coef_max, cfg.off_max);
    let mut found = None;
    if cfg.budget > 0 {
        by_weight(&space.bounds, cfg.budget, &mut |digits| {
            found = space.try_digits(digits, lhs, rhs, strict);
            found.is_none()
        });
    }
    if found.is_some() {
        return found;
    }
    random_search(&space, lhs, rhs, strict, cfg.samples, cfg.seed)
}

/// Purely random instantiations with the given ranges; used to cross-check
/// certified answers.
pub fn sample_violation(lhs: &MaxPoly, rhs: &MaxPoly, strict: bool, cfg: &SearchConfig) -> Option<Witness> {
    let space = Space::new(lhs, rhs, cfg.grid, cfg.coef_max, cfg.off_max);
    random_search(&space, lhs, rhs, strict, cfg.samples, cfg.seed)
}

fn random_search(
    space: &Space,
    lhs: &MaxPoly,
    rhs: &MaxPoly,
    strict: bool,
    samples: usize,
    seed: u64,
) -> Option<Witness> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut digits = vec![0u64; space.bounds.len()];
    for _ in 0..samples {
        for (d, b) in digits.iter_mut().zip(&space.bounds) {
            *d = rng.gen_range(0..=*b);
        }
        if let Some(w) = space.try_digits(&digits, lhs, rhs, strict) {
            return Some(w);
        }
    }
    None
}

/// Identifier of each free atom in `p` by name.
pub fn atom_names(p: &MaxPoly) -> Vec<(AtomId, String)> {
    let mut found = BTreeMap::new();
    free_atoms(p, &mut found);
    found.into_iter().map(|(id, a)| (id, a.name().to_string())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interp::sem::Atom;

    fn nat(name: &str) -> (Atom, MaxPoly) {
        let a = Atom::fresh(name, MetaType::Nat);
        let p = MaxPoly::atom(Neutral::atom(a.clone()));
        (a, p)
    }

    fn c(n: u64) -> MaxPoly {
        MaxPoly::constant(n)
    }

    fn apply_atom(f: &Atom, arg: MaxPoly) -> MaxPoly {
        let n = Neutral {
            head: f.clone(),
            spine: vec![Elim::Arg(Nf::Nat(arg))],
        };
        MaxPoly::atom(n)
    }

    #[test]
    fn coefficient_comparison() {
        let (_, x) = nat("x");
        let cfg = SearchConfig::default();
        assert_eq!(cmp_exprs(&x.add(&c(2)), &x.add(&c(1)), true, &cfg), Outcome::Certified);
        assert_eq!(cmp_exprs(&x.add(&c(1)), &x.add(&c(1)), false, &cfg), Outcome::Certified);
        assert!(matches!(
            cmp_exprs(&x.add(&c(1)), &x.add(&c(1)), true, &cfg),
            Outcome::Refuted(_)
        ));
    }

    #[test]
    fn monotone_absorption() {
        let (_, x) = nat("x");
        let (_, m) = nat("m");
        let f = Atom::fresh("F.c", MetaType::fun(MetaType::Nat, MetaType::Nat));
        let lhs = apply_atom(&f, x.join(&m));
        let rhs = apply_atom(&f, x.clone());
        assert!(certify_ge(&lhs, &rhs));
        assert!(!certify_ge(&rhs, &lhs));
    }

    #[test]
    fn refutation_instantiates_function_atoms() {
        // 1 > F(x) + 1 fails as soon as F(x) >= 0, i.e. always.
        let (_, x) = nat("x");
        let f = Atom::fresh("F.c", MetaType::fun(MetaType::Nat, MetaType::Nat));
        let rhs = apply_atom(&f, x).add(&c(1));
        match cmp_exprs(&c(1), &rhs, true, &SearchConfig::default()) {
            Outcome::Refuted(w) => {
                assert!(w.violates(&c(1), &rhs, true));
                assert_eq!(w.lhs, 1);
            }
            other => panic!("expected a refutation, got {other:?}"),
        }
    }

    #[test]
    fn enumeration_goes_by_weight() {
        let mut seen = Vec::new();
        by_weight(&[1, 2], 100, &mut |d| {
            seen.push(d.to_vec());
            true
        });
        let sums: Vec<u64> = seen.iter().map(|d| d.iter().sum()).collect();
        assert!(sums.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(seen.len(), 6);
    }

    #[test]
    fn probes_are_monotone_functions() {
        let ty = MetaType::fun(MetaType::prod([MetaType::Nat, MetaType::Nat]), MetaType::Nat);
        let v = eval(&probe(&ty, false, &[2, 1]), &Env::default(), 0).unwrap();
        assert_eq!(reify(&v, &ty, 0).unwrap().to_string(), "λy0. 2*y0.0 + 2*y0.1 + 1");
    }
}
