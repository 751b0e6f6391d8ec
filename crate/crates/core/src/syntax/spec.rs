use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::interp::expr::InterpEntry;
use crate::rewrite::{Rule, Trs};
use crate::term::{typecheck, SrcPos, TypeError, VarEnv};
use crate::types::{Signature, SimpleType, SortDecl};

use super::lexer::{lex, Tok, Token};
use super::{arc, entry, is_entry, statements, ParseError, Parser};

/// A parsed spec file: signature, variables, rules, interpretation entries
/// and an optional designated entry-point symbol.
#[derive(Debug, Clone)]
pub struct SpecFile {
    pub signature: Signature,
    pub vars: VarEnv,
    pub rules: Vec<Rule>,
    pub interpretations: Vec<InterpEntry>,
    pub main: Option<Arc<str>>,
    /// Source positions of `interpretations`, in the same order.
    pub interp_positions: Vec<SrcPos>,
}

impl PartialEq for SpecFile {
    fn eq(&self, other: &Self) -> bool {
        self.signature == other.signature
            && self.vars == other.vars
            && self.rules == other.rules
            && self.interpretations == other.interpretations
            && self.main == other.main
    }
}

impl SpecFile {
    pub fn trs(&self) -> Trs {
        Trs::new(self.signature.clone(), self.rules.clone()).expect("rules were validated while parsing")
    }

    pub fn has_interpretation(&self) -> bool {
        !self.interpretations.is_empty()
    }
}

enum Stmt {
    Sort(SortDecl, SrcPos),
    Symbols(Vec<(String, SrcPos)>, SimpleType, SrcPos),
    Vars(Vec<(String, SrcPos)>, SimpleType, SrcPos),
    Main(String, SrcPos),
    Entry(InterpEntry, SrcPos),
    Rule(Vec<Token>, SrcPos),
}

const KEYWORDS: [&str; 2] = ["sort", "var"];

fn declared_names(p: &mut Parser<'_>) -> Result<Vec<(String, SrcPos)>, ParseError> {
    let mut names = Vec::new();
    while let Some(Tok::Word(_)) = p.peek() {
        let (w, pos) = p.word()?;
        if KEYWORDS.contains(&w.as_str()) {
            return Err(ParseError::Syntax {
                pos,
                msg: format!("`{w}` is a keyword"),
            });
        }
        names.push((w, pos));
    }
    if names.is_empty() {
        return p.unexpected("a name");
    }
    p.expect(&Tok::DColon)?;
    Ok(names)
}

fn classify(stmt: Vec<Token>) -> Result<Stmt, ParseError> {
    let pos = stmt[0].pos;
    if is_entry(&stmt) {
        let (e, pos) = entry(&stmt)?;
        return Ok(Stmt::Entry(e, pos));
    }
    let mut p = Parser::new(&stmt);
    match &stmt[0].tok {
        Tok::Word(w) if w == "sort" => {
            p.bump();
            let (name, _) = p.word()?;
            let mut comps = Vec::new();
            if p.eat(&Tok::LParen) {
                comps.push(arc(&p.word()?.0));
                while p.eat(&Tok::Comma) {
                    comps.push(arc(&p.word()?.0));
                }
                p.expect(&Tok::RParen)?;
            }
            p.finish()?;
            Ok(Stmt::Sort(
                SortDecl {
                    name: arc(&name),
                    components: comps,
                },
                pos,
            ))
        }
        Tok::Word(w) if w == "var" => {
            p.bump();
            let names = declared_names(&mut p)?;
            let (ty, _) = p.ty()?;
            p.finish()?;
            Ok(Stmt::Vars(names, ty, pos))
        }
        // `main f` designates the entry point; `main` may also be a symbol.
        Tok::Word(w) if w == "main" && stmt.len() == 2 => {
            p.bump();
            let (name, _) = p.word()?;
            p.finish()?;
            Ok(Stmt::Main(name, pos))
        }
        _ if stmt.iter().any(|t| t.tok == Tok::DColon) => {
            let names = declared_names(&mut p)?;
            let (ty, _) = p.ty()?;
            p.finish()?;
            Ok(Stmt::Symbols(names, ty, pos))
        }
        _ if stmt.iter().any(|t| t.tok == Tok::Arrow) => Ok(Stmt::Rule(stmt, pos)),
        _ => Err(ParseError::Syntax {
            pos,
            msg: "expected a declaration, a rule `lhs -> rhs` or an interpretation `f := ..`".into(),
        }),
    }
}

fn check_sorts(sig_sorts: &[SortDecl], ty: &SimpleType, pos: SrcPos) -> Result<(), ParseError> {
    for s in ty.sorts() {
        if !sig_sorts.iter().any(|d| &*d.name == s) {
            return Err(ParseError::Undeclared {
                name: s.to_string(),
                pos,
            });
        }
    }
    Ok(())
}

/// Parses a complete spec file.
pub fn parse_spec(text: &str) -> Result<SpecFile, ParseError> {
    let stmts = statements(lex(text)?)
        .into_iter()
        .map(classify)
        .collect::<Result<Vec<_>, _>>()?;

    let mut sorts: Vec<SortDecl> = Vec::new();
    for s in &stmts {
        if let Stmt::Sort(d, pos) = s {
            if sorts.iter().any(|o| o.name == d.name) {
                return Err(ParseError::Redeclared {
                    name: d.name.to_string(),
                    pos: *pos,
                });
            }
            sorts.push(d.clone());
        }
    }

    let mut symbols: Vec<(Arc<str>, SimpleType)> = Vec::new();
    let mut seen: HashMap<String, SrcPos> = HashMap::new();
    for s in &stmts {
        if let Stmt::Symbols(names, ty, pos) = s {
            check_sorts(&sorts, ty, *pos)?;
            for (n, npos) in names {
                if seen.insert(n.clone(), *npos).is_some() {
                    return Err(ParseError::Redeclared {
                        name: n.clone(),
                        pos: *npos,
                    });
                }
                symbols.push((arc(n), ty.clone()));
            }
        }
    }
    let sig_pos = stmts
        .first()
        .map(|s| match s {
            Stmt::Sort(_, p)
            | Stmt::Symbols(_, _, p)
            | Stmt::Vars(_, _, p)
            | Stmt::Main(_, p)
            | Stmt::Entry(_, p)
            | Stmt::Rule(_, p) => *p,
        })
        .unwrap_or(SrcPos { line: 1, col: 1 });
    let signature = Signature::new(sorts.clone(), symbols).map_err(|source| {
        let pos = match &source {
            crate::types::SignatureError::DuplicateSort(n)
            | crate::types::SignatureError::SingleComponent(n)
            | crate::types::SignatureError::DuplicateComponent { sort: n, .. } => stmts
                .iter()
                .find_map(|s| match s {
                    Stmt::Sort(d, p) if &*d.name == n => Some(*p),
                    _ => None,
                })
                .unwrap_or(sig_pos),
            _ => sig_pos,
        };
        ParseError::Signature { pos, source }
    })?;

    let mut vars = VarEnv::new();
    for s in &stmts {
        if let Stmt::Vars(names, ty, pos) = s {
            check_sorts(&sorts, ty, *pos)?;
            for (n, npos) in names {
                if signature.contains(n) || vars.get(n).is_some() {
                    return Err(ParseError::Redeclared {
                        name: n.clone(),
                        pos: *npos,
                    });
                }
                vars.insert(n, ty.clone()).map_err(ParseError::Type)?;
            }
        }
    }

    let mut rules = Vec::new();
    let mut interpretations: Vec<InterpEntry> = Vec::new();
    let mut interp_positions = Vec::new();
    let mut main = None;
    for s in stmts {
        match s {
            Stmt::Rule(toks, pos) => {
                let mut p = Parser::new(&toks);
                let lhs = p.raw_term()?;
                p.expect(&Tok::Arrow)?;
                let rhs = p.raw_term()?;
                p.finish()?;
                let lhs = typecheck(&lhs, &signature, &vars).map_err(ParseError::Type)?;
                let rhs = typecheck(&rhs, &signature, &vars).map_err(ParseError::Type)?;
                let rule = Rule::new(lhs, rhs).map_err(|source| match source {
                    crate::rewrite::RuleError::TypeMismatch { lhs, rhs } => ParseError::Type(TypeError::TypeMismatch {
                        pos,
                        expected: lhs.to_string(),
                        found: rhs.to_string(),
                    }),
                    source => ParseError::Rule { pos, source },
                })?;
                rules.push(rule);
            }
            Stmt::Entry(e, pos) => {
                if !signature.contains(&e.symbol) {
                    return Err(ParseError::Undeclared {
                        name: e.symbol.clone(),
                        pos,
                    });
                }
                if interpretations.iter().any(|o| o.symbol == e.symbol) {
                    return Err(ParseError::Redeclared {
                        name: e.symbol.clone(),
                        pos,
                    });
                }
                interpretations.push(e);
                interp_positions.push(pos);
            }
            Stmt::Main(name, pos) => {
                if main.is_some() {
                    return Err(ParseError::Redeclared {
                        name: "main".into(),
                        pos,
                    });
                }
                match signature.symbol_name(&name) {
                    Some(n) => main = Some(n.clone()),
                    None => return Err(ParseError::Undeclared { name, pos }),
                }
            }
            Stmt::Sort(..) | Stmt::Symbols(..) | Stmt::Vars(..) => {}
        }
    }

    Ok(SpecFile {
        signature,
        vars,
        rules,
        interpretations,
        main,
        interp_positions,
    })
}

impl fmt::Display for SpecFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in self.signature.sorts() {
            write!(f, "sort {}", s.name)?;
            if !s.components.is_empty() {
                let names: Vec<&str> = s.components.iter().map(|c| &**c).collect();
                write!(f, " ({})", names.join(", "))?;
            }
            writeln!(f)?;
        }
        for (name, ty) in self.signature.symbols() {
            writeln!(f, "{name} :: {ty}")?;
        }
        for (name, ty) in self.vars.iter() {
            writeln!(f, "var {name} :: {ty}")?;
        }
        for r in &self.rules {
            writeln!(f, "{r}")?;
        }
        if let Some(m) = &self.main {
            writeln!(f, "main {m}")?;
        }
        for e in &self.interpretations {
            writeln!(f, "{e}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const D: &str =
        "sort nat\n0 :: nat\ns :: nat => nat\nd :: nat => nat ; var x :: nat\nd 0 -> 0 ; d (s x) -> s (s (d x))";

    #[test]
    fn inline_statements() {
        let spec = parse_spec(D).unwrap();
        assert_eq!(spec.rules.len(), 2);
        assert_eq!(spec.rules[1].to_string(), "d (s x) -> s (s (d x))");
    }

    #[test]
    fn no_rules_is_fine() {
        let spec = parse_spec("sort nat\n0 :: nat").unwrap();
        assert!(spec.rules.is_empty());
    }

    #[test]
    fn rule_sides_must_agree_in_type() {
        let text = "sort nat\nsort list (l, m)\n0 :: nat\nnil :: list\ncons :: nat => list => list\n\
                    map :: (nat => nat) => list => list\nvar F :: nat => nat\nmap F nil -> cons";
        let err = parse_spec(text).unwrap_err();
        assert!(matches!(err, ParseError::Type(TypeError::TypeMismatch { .. })), "{err}");
        assert_eq!(err.pos().line, 8);
    }

    #[test]
    fn declaration_errors_are_positioned() {
        let err = parse_spec("sort nat\n0 :: nat\n0 :: nat").unwrap_err();
        assert!(matches!(err, ParseError::Redeclared { .. }));
        assert_eq!(err.pos().line, 3);
        let err = parse_spec("sort nat\n0 :: nat\nf :: nat => foo").unwrap_err();
        assert!(matches!(err, ParseError::Undeclared { .. }));
        let err = parse_spec("sort nat\n0 :: nat\nvar x :: nat\nd x -> x").unwrap_err();
        assert!(matches!(err, ParseError::Type(TypeError::UnknownIdentifier { .. })));
        let err = parse_spec("sort nat\n0 :: nat\nvar x :: nat\nx -> 0").unwrap_err();
        assert!(matches!(err, ParseError::Rule { .. }));
        let err = parse_spec("sort nat\n0 :: nat\ng := cost: 0 ; size: 0").unwrap_err();
        assert!(matches!(err, ParseError::Undeclared { .. }));
    }

    #[test]
    fn entries_may_continue_on_next_line() {
        let text = "sort nat\n0 :: nat\ns :: nat => nat\ns := cost: \\x. 0\n  size: \\x. x + 1\n0 := cost: 0 ; size: 0";
        let spec = parse_spec(text).unwrap();
        assert_eq!(spec.interpretations.len(), 2);
        assert_eq!(
            spec.interpretations[0].to_string(),
            "s := cost: \\x. 0 ; size: \\x. x + 1"
        );
    }

    #[test]
    fn printing_round_trips() {
        let spec = parse_spec(crate::corpus::MAP_VERBATIM).unwrap();
        let again = parse_spec(&spec.to_string()).unwrap();
        assert_eq!(spec, again);
    }
}
