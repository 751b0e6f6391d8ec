//! Simple types and signatures.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// A simple type: a sort, or an arrow between two types.
///
/// Arrows associate to the right in concrete syntax; the tree form is kept as is.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SimpleType {
    Base(Arc<str>),
    Arrow(Arc<SimpleType>, Arc<SimpleType>),
}

impl SimpleType {
    pub fn base(name: &str) -> Self {
        SimpleType::Base(Arc::from(name))
    }

    pub fn arrow(dom: SimpleType, cod: SimpleType) -> Self {
        SimpleType::Arrow(Arc::new(dom), Arc::new(cod))
    }

    /// Builds `a1 => a2 => ... => result`.
    pub fn curried(args: impl IntoIterator<Item = SimpleType>, result: SimpleType) -> Self {
        let args: Vec<_> = args.into_iter().collect();
        args.into_iter().rev().fold(result, |acc, a| SimpleType::arrow(a, acc))
    }

    pub fn is_base(&self) -> bool {
        matches!(self, SimpleType::Base(_))
    }

    /// `order(ι) = 0`, `order(σ ⇒ τ) = max(order(σ) + 1, order(τ))`.
    pub fn order(&self) -> usize {
        match self {
            SimpleType::Base(_) => 0,
            SimpleType::Arrow(a, b) => (a.order() + 1).max(b.order()),
        }
    }

    /// Splits `a1 => ... => an => ι` into `([a1, .., an], ι)`.
    pub fn uncurry(&self) -> (Vec<&SimpleType>, &SimpleType) {
        let mut args = Vec::new();
        let mut cur = self;
        while let SimpleType::Arrow(a, b) = cur {
            args.push(a.as_ref());
            cur = b.as_ref();
        }
        (args, cur)
    }

    pub fn arity(&self) -> usize {
        self.uncurry().0.len()
    }

    /// Domain and codomain of an arrow type.
    pub fn as_arrow(&self) -> Option<(&SimpleType, &SimpleType)> {
        match self {
            SimpleType::Arrow(a, b) => Some((a, b)),
            SimpleType::Base(_) => None,
        }
    }

    /// All sort names mentioned in the type.
    pub fn sorts(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_sorts(&mut out);
        out
    }

    fn collect_sorts<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            SimpleType::Base(s) => out.push(s),
            SimpleType::Arrow(a, b) => {
                a.collect_sorts(out);
                b.collect_sorts(out);
            }
        }
    }
}

impl fmt::Display for SimpleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimpleType::Base(s) => write!(f, "{s}"),
            SimpleType::Arrow(a, b) => {
                if a.is_base() {
                    write!(f, "{a} => {b}")
                } else {
                    write!(f, "({a}) => {b}")
                }
            }
        }
    }
}

/// A sort together with the names of its size components.
///
/// A sort without component names has a single, unnamed size dimension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SortDecl {
    pub name: Arc<str>,
    pub components: Vec<Arc<str>>,
}

impl SortDecl {
    pub fn new(name: &str, components: &[&str]) -> Self {
        SortDecl {
            name: Arc::from(name),
            components: components.iter().map(|c| Arc::from(*c)).collect(),
        }
    }

    /// Number of size dimensions, `K(ι)`.
    pub fn typecount(&self) -> usize {
        self.components.len().max(1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SignatureError {
    #[error("signature declares no function symbols")]
    NoSymbols,
    #[error("sort `{0}` declared twice")]
    DuplicateSort(String),
    #[error("sort `{0}` declares a single named component; single-component sorts are unnamed")]
    SingleComponent(String),
    #[error("sort `{sort}` repeats component name `{component}`")]
    DuplicateComponent { sort: String, component: String },
    #[error("symbol `{0}` declared twice")]
    DuplicateSymbol(String),
    #[error("symbol `{symbol}` mentions undeclared sort `{sort}`")]
    UnknownSort { symbol: String, sort: String },
}

/// Sorts and typed function symbols, kept in declaration order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    sorts: Vec<SortDecl>,
    symbols: Vec<(Arc<str>, SimpleType)>,
    sort_index: HashMap<Arc<str>, usize>,
    symbol_index: HashMap<Arc<str>, usize>,
}

impl Signature {
    pub fn new(sorts: Vec<SortDecl>, symbols: Vec<(Arc<str>, SimpleType)>) -> Result<Self, SignatureError> {
        if symbols.is_empty() {
            return Err(SignatureError::NoSymbols);
        }
        let mut sort_index = HashMap::new();
        for (i, s) in sorts.iter().enumerate() {
            if sort_index.insert(s.name.clone(), i).is_some() {
                return Err(SignatureError::DuplicateSort(s.name.to_string()));
            }
            if s.components.len() == 1 {
                return Err(SignatureError::SingleComponent(s.name.to_string()));
            }
            for (j, c) in s.components.iter().enumerate() {
                if s.components[..j].contains(c) {
                    return Err(SignatureError::DuplicateComponent {
                        sort: s.name.to_string(),
                        component: c.to_string(),
                    });
                }
            }
        }
        let mut symbol_index = HashMap::new();
        for (i, (name, ty)) in symbols.iter().enumerate() {
            if symbol_index.insert(name.clone(), i).is_some() {
                return Err(SignatureError::DuplicateSymbol(name.to_string()));
            }
            if let Some(s) = ty.sorts().into_iter().find(|s| !sort_index.contains_key(*s)) {
                return Err(SignatureError::UnknownSort {
                    symbol: name.to_string(),
                    sort: s.to_string(),
                });
            }
        }
        Ok(Signature {
            sorts,
            symbols,
            sort_index,
            symbol_index,
        })
    }

    pub fn sorts(&self) -> &[SortDecl] {
        &self.sorts
    }

    pub fn sort(&self, name: &str) -> Option<&SortDecl> {
        self.sort_index.get(name).map(|&i| &self.sorts[i])
    }

    pub fn symbols(&self) -> &[(Arc<str>, SimpleType)] {
        &self.symbols
    }

    /// The `typeOf` function.
    pub fn type_of(&self, symbol: &str) -> Option<&SimpleType> {
        self.symbol_index.get(symbol).map(|&i| &self.symbols[i].1)
    }

    pub fn contains(&self, symbol: &str) -> bool {
        self.symbol_index.contains_key(symbol)
    }

    /// Shared name handle for a declared symbol.
    pub fn symbol_name(&self, symbol: &str) -> Option<&Arc<str>> {
        self.symbol_index.get(symbol).map(|&i| &self.symbols[i].0)
    }

    /// Checks that every sort in `ty` is declared.
    pub fn check_type(&self, ty: &SimpleType) -> Result<(), String> {
        match ty.sorts().into_iter().find(|s| self.sort(s).is_none()) {
            Some(s) => Err(s.to_string()),
            None => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nat() -> SimpleType {
        SimpleType::base("nat")
    }
    fn list() -> SimpleType {
        SimpleType::base("list")
    }

    #[test]
    fn order_of_types() {
        assert_eq!(nat().order(), 0);
        assert_eq!(SimpleType::arrow(nat(), nat()).order(), 1);
        let map_ty = SimpleType::curried([SimpleType::arrow(nat(), nat()), list()], list());
        assert_eq!(map_ty.order(), 2);
    }

    #[test]
    fn display_uses_minimal_parentheses() {
        let map_ty = SimpleType::curried([SimpleType::arrow(nat(), nat()), list()], list());
        assert_eq!(map_ty.to_string(), "(nat => nat) => list => list");
        let (args, res) = map_ty.uncurry();
        assert_eq!(args.len(), 2);
        assert_eq!(res, &list());
    }

    #[test]
    fn signature_rejects_unknown_sort_and_duplicates() {
        let sorts = vec![SortDecl::new("nat", &[])];
        let err = Signature::new(sorts.clone(), vec![(Arc::from("nil"), list())]).unwrap_err();
        assert!(matches!(err, SignatureError::UnknownSort { .. }));
        let err = Signature::new(sorts.clone(), vec![(Arc::from("0"), nat()), (Arc::from("0"), nat())]).unwrap_err();
        assert!(matches!(err, SignatureError::DuplicateSymbol(_)));
        assert_eq!(Signature::new(sorts, vec![]).unwrap_err(), SignatureError::NoSymbols);
    }

    #[test]
    fn typecount_defaults_to_one() {
        assert_eq!(SortDecl::new("nat", &[]).typecount(), 1);
        assert_eq!(SortDecl::new("list", &["l", "m"]).typecount(), 2);
    }
}
