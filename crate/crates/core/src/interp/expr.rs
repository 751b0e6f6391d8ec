//! Surface syntax of interpretation expressions.
//!
//! Expressions denote weakly monotonic functions over the naturals: the grammar
//! has literals, parameters, component access, `+`, `*`, `max`, tuples,
//! application and lambda binders, and nothing that could break monotonicity.

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum InterpExpr {
    Nat(u64),
    Param(String),
    /// `e.name` or `e.0`: a named size component, `.c`/`.s` of a functional
    /// parameter, or a positional projection.
    Field(Box<InterpExpr>, String),
    Add(Box<InterpExpr>, Box<InterpExpr>),
    Mul(Box<InterpExpr>, Box<InterpExpr>),
    /// `max(e1, .., en)`, n >= 2.
    Max(Vec<InterpExpr>),
    /// `(e1, .., en)`, n >= 2.
    Tuple(Vec<InterpExpr>),
    /// `\x1 .. xn. body`
    Lam(Vec<String>, Box<InterpExpr>),
    /// `f(a1, .., an)`
    App(Box<InterpExpr>, Vec<InterpExpr>),
}

impl InterpExpr {
    pub fn param(name: &str) -> Self {
        InterpExpr::Param(name.to_string())
    }

    pub fn field(self, name: &str) -> Self {
        InterpExpr::Field(Box::new(self), name.to_string())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(self, rhs: InterpExpr) -> Self {
        InterpExpr::Add(Box::new(self), Box::new(rhs))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(self, rhs: InterpExpr) -> Self {
        InterpExpr::Mul(Box::new(self), Box::new(rhs))
    }

    pub fn lam(params: &[&str], body: InterpExpr) -> Self {
        InterpExpr::Lam(params.iter().map(|p| p.to_string()).collect(), Box::new(body))
    }

    pub fn call(self, args: Vec<InterpExpr>) -> Self {
        InterpExpr::App(Box::new(self), args)
    }

    fn prec(&self) -> u8 {
        match self {
            InterpExpr::Lam(..) => 0,
            InterpExpr::Add(..) => 1,
            InterpExpr::Mul(..) => 2,
            _ => 3,
        }
    }

    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.prec() < min {
            write!(f, "(")?;
            self.fmt_at(f, 0)?;
            return write!(f, ")");
        }
        match self {
            InterpExpr::Nat(n) => write!(f, "{n}"),
            InterpExpr::Param(p) => write!(f, "{p}"),
            InterpExpr::Field(e, name) => {
                e.fmt_at(f, 3)?;
                write!(f, ".{name}")
            }
            InterpExpr::Add(a, b) => {
                a.fmt_at(f, 1)?;
                write!(f, " + ")?;
                b.fmt_at(f, 2)
            }
            InterpExpr::Mul(a, b) => {
                a.fmt_at(f, 2)?;
                write!(f, " * ")?;
                b.fmt_at(f, 3)
            }
            InterpExpr::Max(items) => {
                write!(f, "max")?;
                write_list(f, items)
            }
            InterpExpr::Tuple(items) => write_list(f, items),
            InterpExpr::Lam(params, body) => {
                write!(f, "\\{}. ", params.join(" "))?;
                body.fmt_at(f, 0)
            }
            InterpExpr::App(fun, args) => {
                fun.fmt_at(f, 3)?;
                write_list(f, args)
            }
        }
    }
}

fn write_list(f: &mut fmt::Formatter<'_>, items: &[InterpExpr]) -> fmt::Result {
    write!(f, "(")?;
    for (i, e) in items.iter().enumerate() {
        if i > 0 {
            write!(f, ", ")?;
        }
        e.fmt_at(f, 0)?;
    }
    write!(f, ")")
}

impl fmt::Display for InterpExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 0)
    }
}

/// The cost and size expressions given for one symbol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InterpEntry {
    pub symbol: String,
    pub cost: InterpExpr,
    pub size: InterpExpr,
}

impl fmt::Display for InterpEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} := cost: {} ; size: {}", self.symbol, self.cost, self.size)
    }
}
