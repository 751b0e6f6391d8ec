//! Max-of-polynomials normal forms over natural numbers.
//!
//! Atoms are neutral terms (free size variables, or uninterpreted function
//! atoms applied to normal-form arguments). `+` and `*` distribute over `max`,
//! which is sound over ℕ because both are monotone.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::sem::Neutral;

/// A product of atoms with exponents. The empty product is `1`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(BTreeMap<Neutral, u32>);

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn atom(n: Neutral) -> Self {
        Monomial(BTreeMap::from([(n, 1)]))
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.values().sum()
    }

    pub fn factors(&self) -> impl Iterator<Item = (&Neutral, u32)> {
        self.0.iter().map(|(n, e)| (n, *e))
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = self.0.clone();
        for (n, e) in &other.0 {
            *out.entry(n.clone()).or_insert(0) += e;
        }
        Monomial(out)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        for (i, (n, e)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            write!(f, "{n}")?;
            if *e > 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

/// A polynomial with positive natural coefficients.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Poly(BTreeMap<Monomial, u64>);

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(c: u64) -> Self {
        let mut p = Poly::zero();
        if c > 0 {
            p.0.insert(Monomial::one(), c);
        }
        p
    }

    pub fn atom(n: Neutral) -> Self {
        Poly(BTreeMap::from([(Monomial::atom(n), 1)]))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, u64)> {
        self.0.iter().map(|(m, c)| (m, *c))
    }

    pub fn coefficient(&self, m: &Monomial) -> u64 {
        self.0.get(m).copied().unwrap_or(0)
    }

    pub fn constant_term(&self) -> u64 {
        self.coefficient(&Monomial::one())
    }

    pub fn is_constant(&self) -> bool {
        self.0.keys().all(Monomial::is_one)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.0.clone();
        for (m, c) in &other.0 {
            let slot = out.entry(m.clone()).or_insert(0);
            *slot = slot.saturating_add(*c);
        }
        Poly(out)
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out: BTreeMap<Monomial, u64> = BTreeMap::new();
        for (m1, c1) in &self.0 {
            for (m2, c2) in &other.0 {
                let slot = out.entry(m1.mul(m2)).or_insert(0);
                *slot = slot.saturating_add(c1.saturating_mul(*c2));
            }
        }
        Poly(out)
    }

    /// Coefficientwise domination, which implies pointwise `>=` over ℕ.
    pub fn dominates(&self, other: &Poly) -> bool {
        other.0.iter().all(|(m, c)| self.coefficient(m) >= *c)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let mut terms: Vec<(&Monomial, u64)> = self.terms().collect();
        // Highest degree first, constant last.
        terms.sort_by(|(a, _), (b, _)| b.degree().cmp(&a.degree()).then_with(|| a.cmp(b)));
        for (i, (m, c)) in terms.into_iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            match (m.is_one(), c) {
                (true, c) => write!(f, "{c}")?,
                (false, 1) => write!(f, "{m}")?,
                (false, c) => write!(f, "{c}*{m}")?,
            }
        }
        Ok(())
    }
}

/// `max` of finitely many polynomials; never empty.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MaxPoly(BTreeSet<Poly>);

impl Default for MaxPoly {
    fn default() -> Self {
        MaxPoly::zero()
    }
}

impl MaxPoly {
    pub fn zero() -> Self {
        MaxPoly::constant(0)
    }

    pub fn constant(c: u64) -> Self {
        MaxPoly(BTreeSet::from([Poly::constant(c)]))
    }

    pub fn atom(n: Neutral) -> Self {
        MaxPoly(BTreeSet::from([Poly::atom(n)]))
    }

    pub fn from_polys(polys: impl IntoIterator<Item = Poly>) -> Self {
        let set: BTreeSet<Poly> = polys.into_iter().collect();
        if set.is_empty() {
            return MaxPoly::zero();
        }
        MaxPoly(prune(set))
    }

    pub fn polys(&self) -> impl Iterator<Item = &Poly> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The value if no atom occurs.
    pub fn as_constant(&self) -> Option<u64> {
        if self.0.iter().all(Poly::is_constant) {
            self.0.iter().map(Poly::constant_term).max()
        } else {
            None
        }
    }

    pub fn add(&self, other: &MaxPoly) -> MaxPoly {
        self.combine(other, Poly::add)
    }

    pub fn mul(&self, other: &MaxPoly) -> MaxPoly {
        self.combine(other, Poly::mul)
    }

    pub fn join(&self, other: &MaxPoly) -> MaxPoly {
        MaxPoly::from_polys(self.0.iter().chain(other.0.iter()).cloned())
    }

    fn combine(&self, other: &MaxPoly, op: fn(&Poly, &Poly) -> Poly) -> MaxPoly {
        MaxPoly::from_polys(self.0.iter().flat_map(|p| other.0.iter().map(move |q| op(p, q))))
    }

    /// Every neutral occurring in a monomial, outermost only.
    pub fn neutrals(&self) -> BTreeSet<&Neutral> {
        self.0
            .iter()
            .flat_map(|p| p.0.keys())
            .flat_map(|m| m.0.keys())
            .collect()
    }
}

/// Drops polynomials coefficientwise dominated by another member.
fn prune(set: BTreeSet<Poly>) -> BTreeSet<Poly> {
    let items: Vec<Poly> = set.into_iter().collect();
    let mut keep = vec![true; items.len()];
    for i in 0..items.len() {
        for j in 0..items.len() {
            if i != j && keep[j] && items[j].dominates(&items[i]) {
                keep[i] = false;
                break;
            }
        }
    }
    items
        .into_iter()
        .zip(keep)
        .filter_map(|(p, k)| k.then_some(p))
        .collect()
}

impl fmt::Display for MaxPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() == 1 {
            return write!(f, "{}", self.0.iter().next().unwrap());
        }
        write!(f, "max(")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::MetaType;
    use crate::interp::sem::Atom;

    fn var(name: &str) -> MaxPoly {
        MaxPoly::atom(Neutral::atom(Atom::fresh(name, MetaType::Nat)))
    }

    #[test]
    fn expansion_and_printing() {
        let x = var("x");
        let e = x.add(&MaxPoly::constant(1)).mul(&MaxPoly::constant(2));
        assert_eq!(e.to_string(), "2*x + 2");
        assert_eq!(x.mul(&x).add(&x).to_string(), "x^2 + x");
    }

    #[test]
    fn addition_distributes_over_max() {
        let (x, y) = (var("x"), var("y"));
        let e = x.join(&y).add(&MaxPoly::constant(1));
        assert_eq!(e.len(), 2);
        assert_eq!(e.to_string(), "max(x + 1, y + 1)");
    }

    #[test]
    fn dominated_members_are_pruned() {
        let x = var("x");
        let e = x.join(&x.add(&MaxPoly::constant(1)));
        assert_eq!(e.to_string(), "x + 1");
        assert_eq!(MaxPoly::constant(3).join(&MaxPoly::constant(5)).as_constant(), Some(5));
        assert_eq!(x.as_constant(), None);
    }
}
