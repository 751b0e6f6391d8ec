//! Concrete syntax of spec files and of everything inside them.
//!
//! A spec file is a sequence of statements separated by `;` or line breaks
//! (line breaks inside parentheses do not separate). `#` starts a comment.
//!
//! ```text
//! sort nat                      # one size dimension
//! sort list (l, m)              # two named size dimensions
//! 0 :: nat
//! s :: nat => nat
//! var x y :: nat
//! add x (s y) -> s (add x y)
//! main add                      # optional entry point
//! s := cost: \x. 0 ; size: \x. x + 1
//! ```

mod lexer;
mod spec;

use std::sync::Arc;

use thiserror::Error;

use crate::interp::expr::{InterpEntry, InterpExpr};
use crate::interp::ShapeError;
use crate::rewrite::RuleError;
use crate::term::{typecheck, RawTerm, SrcPos, Term, TypeError, VarEnv};
use crate::types::{Signature, SignatureError, SimpleType};

use lexer::{lex, Tok, Token};
pub use spec::{parse_spec, SpecFile};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{pos}: syntax error: {msg}")]
    Syntax { pos: SrcPos, msg: String },
    #[error("{pos}: `{name}` is declared twice")]
    Redeclared { name: String, pos: SrcPos },
    #[error("{pos}: undeclared identifier `{name}`")]
    Undeclared { name: String, pos: SrcPos },
    #[error("{0}")]
    Type(TypeError),
    #[error("{pos}: invalid rule: {source}")]
    Rule { pos: SrcPos, source: RuleError },
    #[error("{pos}: {source}")]
    Signature { pos: SrcPos, source: SignatureError },
    #[error("{pos}: interpretation of `{symbol}`: {source}")]
    Shape {
        pos: SrcPos,
        symbol: String,
        source: ShapeError,
    },
}

impl ParseError {
    /// Source position of the rejection.
    pub fn pos(&self) -> SrcPos {
        match self {
            ParseError::Syntax { pos, .. }
            | ParseError::Redeclared { pos, .. }
            | ParseError::Undeclared { pos, .. }
            | ParseError::Rule { pos, .. }
            | ParseError::Signature { pos, .. }
            | ParseError::Shape { pos, .. } => *pos,
            ParseError::Type(t) => match t {
                TypeError::UnknownIdentifier { pos, .. } | TypeError::TypeMismatch { pos, .. } => *pos,
                _ => SrcPos::default(),
            },
        }
    }
}

/// Splits a token stream into statements at `;` and line ends outside
/// parentheses. `cost:`/`size:` continuations are glued onto the preceding
/// interpretation entry.
pub(crate) fn statements(tokens: Vec<Token>) -> Vec<Vec<Token>> {
    let mut out: Vec<Vec<Token>> = Vec::new();
    let mut cur = Vec::new();
    let mut depth = 0usize;
    for t in tokens {
        match t.tok {
            Tok::LParen => depth += 1,
            Tok::RParen => depth = depth.saturating_sub(1),
            _ => {}
        }
        let sep = matches!(t.tok, Tok::Semi | Tok::Newline) && depth == 0;
        if sep {
            if !cur.is_empty() {
                push_statement(&mut out, std::mem::take(&mut cur), t.pos);
            }
        } else if t.tok != Tok::Newline {
            cur.push(t);
        }
    }
    if !cur.is_empty() {
        let pos = cur.last().map(|t: &Token| t.pos).unwrap_or_default();
        push_statement(&mut out, cur, pos);
    }
    out
}

fn push_statement(out: &mut Vec<Vec<Token>>, stmt: Vec<Token>, sep_pos: SrcPos) {
    let is_continuation = matches!(
        (&stmt[0].tok, stmt.get(1).map(|t| &t.tok)),
        (Tok::Word(w), Some(Tok::Colon)) if w == "cost" || w == "size"
    );
    if is_continuation {
        if let Some(prev) = out.last_mut() {
            if is_entry(prev) {
                prev.push(Token {
                    tok: Tok::Semi,
                    pos: sep_pos,
                });
                prev.extend(stmt);
                return;
            }
        }
    }
    out.push(stmt);
}

fn is_entry(stmt: &[Token]) -> bool {
    matches!(
        (stmt.first().map(|t| &t.tok), stmt.get(1).map(|t| &t.tok)),
        (Some(Tok::Word(_)), Some(Tok::Assign))
    )
}

pub(crate) struct Parser<'a> {
    toks: &'a [Token],
    i: usize,
    end: SrcPos,
}

impl<'a> Parser<'a> {
    pub(crate) fn new(toks: &'a [Token]) -> Self {
        let end = toks
            .last()
            .map(|t| SrcPos {
                line: t.pos.line,
                col: t.pos.col + 1,
            })
            .unwrap_or(SrcPos { line: 1, col: 1 });
        Parser { toks, i: 0, end }
    }

    fn peek(&self) -> Option<&'a Tok> {
        self.toks.get(self.i).map(|t| &t.tok)
    }

    pub(crate) fn pos(&self) -> SrcPos {
        self.toks.get(self.i).map(|t| t.pos).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<&'a Token> {
        let t = self.toks.get(self.i);
        self.i += 1;
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn error<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            pos: self.pos(),
            msg: msg.into(),
        })
    }

    fn unexpected<T>(&self, wanted: &str) -> Result<T, ParseError> {
        match self.peek() {
            Some(t) => self.error(format!("expected {wanted}, found {t}")),
            None => self.error(format!("expected {wanted}, found end of statement")),
        }
    }

    fn expect(&mut self, tok: &Tok) -> Result<(), ParseError> {
        if self.eat(tok) {
            Ok(())
        } else {
            self.unexpected(&tok.to_string())
        }
    }

    pub(crate) fn word(&mut self) -> Result<(String, SrcPos), ParseError> {
        match self.peek() {
            Some(Tok::Word(w)) => {
                let pos = self.pos();
                self.i += 1;
                Ok((w.clone(), pos))
            }
            _ => self.unexpected("an identifier"),
        }
    }

    pub(crate) fn at_end(&self) -> bool {
        self.i >= self.toks.len()
    }

    pub(crate) fn finish(&self) -> Result<(), ParseError> {
        if self.at_end() {
            Ok(())
        } else {
            self.unexpected("end of statement")
        }
    }

    pub(crate) fn ty(&mut self) -> Result<(SimpleType, SrcPos), ParseError> {
        let pos = self.pos();
        let dom = match self.peek() {
            Some(Tok::Word(_)) => SimpleType::base(&self.word()?.0),
            Some(Tok::LParen) => {
                self.bump();
                let (t, _) = self.ty()?;
                self.expect(&Tok::RParen)?;
                t
            }
            _ => return self.unexpected("a type"),
        };
        if self.eat(&Tok::FatArrow) {
            let (cod, _) = self.ty()?;
            Ok((SimpleType::arrow(dom, cod), pos))
        } else {
            Ok((dom, pos))
        }
    }

    pub(crate) fn raw_term(&mut self) -> Result<RawTerm, ParseError> {
        let mut t = self.raw_term_atom()?;
        while matches!(self.peek(), Some(Tok::Word(_)) | Some(Tok::LParen)) {
            let a = self.raw_term_atom()?;
            t = RawTerm::App(Box::new(t), Box::new(a));
        }
        Ok(t)
    }

    fn raw_term_atom(&mut self) -> Result<RawTerm, ParseError> {
        match self.peek() {
            Some(Tok::Word(_)) => {
                let (w, pos) = self.word()?;
                Ok(RawTerm::Ident(w, pos))
            }
            Some(Tok::LParen) => {
                self.bump();
                let t = self.raw_term()?;
                self.expect(&Tok::RParen)?;
                Ok(t)
            }
            Some(Tok::Lambda) => self.error("abstractions are not part of the term language"),
            _ => self.unexpected("a term"),
        }
    }

    pub(crate) fn expr(&mut self) -> Result<InterpExpr, ParseError> {
        if self.eat(&Tok::Lambda) {
            let mut params = Vec::new();
            while let Some(Tok::Word(_)) = self.peek() {
                let (w, pos) = self.word()?;
                if !is_param_name(&w) {
                    return Err(ParseError::Syntax {
                        pos,
                        msg: format!("`{w}` cannot name a parameter"),
                    });
                }
                params.push(w);
            }
            if params.is_empty() {
                return self.unexpected("a parameter name");
            }
            self.expect(&Tok::Dot)?;
            let body = self.expr()?;
            return Ok(InterpExpr::Lam(params, Box::new(body)));
        }
        let mut e = self.product()?;
        while self.eat(&Tok::Plus) {
            let rhs = self.product()?;
            e = InterpExpr::Add(Box::new(e), Box::new(rhs));
        }
        Ok(e)
    }

    fn product(&mut self) -> Result<InterpExpr, ParseError> {
        let mut e = self.postfix()?;
        while self.eat(&Tok::Star) {
            let rhs = self.postfix()?;
            e = InterpExpr::Mul(Box::new(e), Box::new(rhs));
        }
        Ok(e)
    }

    fn postfix(&mut self) -> Result<InterpExpr, ParseError> {
        let mut e = self.expr_atom()?;
        loop {
            if self.eat(&Tok::Dot) {
                let (name, _) = self.word()?;
                e = InterpExpr::Field(Box::new(e), name);
            } else if self.peek() == Some(&Tok::LParen) {
                let args = self.expr_list()?;
                e = InterpExpr::App(Box::new(e), args);
            } else {
                return Ok(e);
            }
        }
    }

    fn expr_list(&mut self) -> Result<Vec<InterpExpr>, ParseError> {
        self.expect(&Tok::LParen)?;
        let mut items = vec![self.expr()?];
        while self.eat(&Tok::Comma) {
            items.push(self.expr()?);
        }
        self.expect(&Tok::RParen)?;
        Ok(items)
    }

    fn expr_atom(&mut self) -> Result<InterpExpr, ParseError> {
        match self.peek() {
            Some(Tok::Word(w)) if w == "max" => {
                self.bump();
                let pos = self.pos();
                let items = self.expr_list()?;
                if items.len() < 2 {
                    return Err(ParseError::Syntax {
                        pos,
                        msg: "max takes at least two arguments".into(),
                    });
                }
                Ok(InterpExpr::Max(items))
            }
            Some(Tok::Word(w)) => {
                let pos = self.pos();
                self.bump();
                if w.chars().next().is_some_and(|c| c.is_ascii_digit()) {
                    w.parse::<u64>().map(InterpExpr::Nat).map_err(|_| ParseError::Syntax {
                        pos,
                        msg: format!("invalid number `{w}`"),
                    })
                } else {
                    Ok(InterpExpr::Param(w.clone()))
                }
            }
            Some(Tok::LParen) => {
                let mut items = self.expr_list()?;
                if items.len() == 1 {
                    Ok(items.pop().unwrap())
                } else {
                    Ok(InterpExpr::Tuple(items))
                }
            }
            _ => self.unexpected("an expression"),
        }
    }
}

fn is_param_name(w: &str) -> bool {
    w != "max" && !w.chars().next().is_some_and(|c| c.is_ascii_digit())
}

fn single_statement(text: &str) -> Result<Vec<Token>, ParseError> {
    let toks: Vec<Token> = lex(text)?.into_iter().filter(|t| t.tok != Tok::Newline).collect();
    if toks.is_empty() {
        return Err(ParseError::Syntax {
            pos: SrcPos { line: 1, col: 1 },
            msg: "empty input".into(),
        });
    }
    Ok(toks)
}

pub fn parse_type(text: &str) -> Result<SimpleType, ParseError> {
    let toks = single_statement(text)?;
    let mut p = Parser::new(&toks);
    let (t, _) = p.ty()?;
    p.finish()?;
    Ok(t)
}

pub fn parse_raw_term(text: &str) -> Result<RawTerm, ParseError> {
    let toks = single_statement(text)?;
    let mut p = Parser::new(&toks);
    let t = p.raw_term()?;
    p.finish()?;
    Ok(t)
}

/// Parses and typechecks a term against a signature and variable context.
pub fn parse_term(text: &str, sig: &Signature, env: &VarEnv) -> Result<Term, ParseError> {
    let raw = parse_raw_term(text)?;
    typecheck(&raw, sig, env).map_err(ParseError::Type)
}

pub fn parse_expr(text: &str) -> Result<InterpExpr, ParseError> {
    let toks = single_statement(text)?;
    let mut p = Parser::new(&toks);
    let e = p.expr()?;
    p.finish()?;
    Ok(e)
}

/// Parses one `name := cost: e ; size: e` statement (already split).
pub(crate) fn entry(stmt: &[Token]) -> Result<(InterpEntry, SrcPos), ParseError> {
    let mut p = Parser::new(stmt);
    let (symbol, pos) = p.word()?;
    p.expect(&Tok::Assign)?;
    let mut cost = None;
    let mut size = None;
    loop {
        let (key, kpos) = p.word()?;
        p.expect(&Tok::Colon)?;
        let slot = match key.as_str() {
            "cost" => &mut cost,
            "size" => &mut size,
            _ => {
                return Err(ParseError::Syntax {
                    pos: kpos,
                    msg: format!("unknown component `{key}`, expected `cost` or `size`"),
                })
            }
        };
        if slot.is_some() {
            return Err(ParseError::Syntax {
                pos: kpos,
                msg: format!("`{key}` given twice"),
            });
        }
        *slot = Some(p.expr()?);
        if !p.eat(&Tok::Semi) {
            break;
        }
    }
    p.finish()?;
    match (cost, size) {
        (Some(cost), Some(size)) => Ok((InterpEntry { symbol, cost, size }, pos)),
        (None, _) => Err(ParseError::Syntax {
            pos,
            msg: format!("interpretation of `{symbol}` lacks `cost:`"),
        }),
        (_, None) => Err(ParseError::Syntax {
            pos,
            msg: format!("interpretation of `{symbol}` lacks `size:`"),
        }),
    }
}

/// Parses a block of interpretation entries and shape-checks each against `sig`.
pub fn parse_interp(text: &str, sig: &Signature) -> Result<Vec<crate::interp::CheckedEntry>, ParseError> {
    let mut out: Vec<crate::interp::CheckedEntry> = Vec::new();
    for stmt in statements(lex(text)?) {
        if !is_entry(&stmt) {
            return Err(ParseError::Syntax {
                pos: stmt[0].pos,
                msg: "expected an interpretation entry `name := cost: .. ; size: ..`".into(),
            });
        }
        let (e, pos) = entry(&stmt)?;
        let Some(ty) = sig.type_of(&e.symbol) else {
            return Err(ParseError::Undeclared { name: e.symbol, pos });
        };
        if out.iter().any(|c| c.entry.symbol == e.symbol) {
            return Err(ParseError::Redeclared { name: e.symbol, pos });
        }
        let checked = crate::interp::check_entry(sig, ty, &e).map_err(|source| ParseError::Shape {
            pos,
            symbol: e.symbol.clone(),
            source,
        })?;
        out.push(checked);
    }
    Ok(out)
}

pub(crate) fn arc(s: &str) -> Arc<str> {
    Arc::from(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arrows_associate_right() {
        let t = parse_type("(nat => nat) => list => list").unwrap();
        assert_eq!(t.to_string(), "(nat => nat) => list => list");
        let (args, _) = t.uncurry();
        assert_eq!(args.len(), 2);
        assert_eq!(
            parse_type("nat => (nat => nat)").unwrap().to_string(),
            "nat => nat => nat"
        );
    }

    #[test]
    fn application_associates_left() {
        let t = parse_raw_term("add (s 0) x").unwrap();
        match t {
            RawTerm::App(f, a) => {
                assert!(matches!(*a, RawTerm::Ident(ref x, _) if x == "x"));
                assert!(matches!(*f, RawTerm::App(..)));
            }
            _ => panic!(),
        }
    }

    #[test]
    fn abstraction_in_terms_is_rejected() {
        assert!(matches!(parse_raw_term("\\x. x"), Err(ParseError::Syntax { .. })));
    }

    #[test]
    fn expressions_round_trip_through_printing() {
        for s in [
            "\\x. x + 1",
            "\\x q. (q.l + 1, max(x, q.m))",
            "\\F q. q.l * F.c(q.m) + 1",
            "\\F G x. F.c(G.s(x)) + G.c(x) + 1",
            "(x + 1) * 2",
            "max(x, y, 3) + 1",
            "\\x. (1, \\y. x + y)",
        ] {
            let e = parse_expr(s).unwrap();
            assert_eq!(e.to_string(), s);
            assert_eq!(parse_expr(&e.to_string()).unwrap(), e);
        }
    }

    #[test]
    fn subtraction_and_garbage_are_positioned_errors() {
        let err = parse_expr("\\x. x - 1").unwrap_err();
        assert_eq!(err.pos(), SrcPos { line: 1, col: 7 });
        let err = parse_expr("\\x. x +").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { .. }));
        assert!(parse_expr("max(x)").is_err());
        assert!(parse_expr("2x").is_err());
    }
}
