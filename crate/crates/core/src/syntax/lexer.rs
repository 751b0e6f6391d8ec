use std::fmt;

use crate::term::SrcPos;

use super::ParseError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Word(String),
    DColon,
    Arrow,
    FatArrow,
    Assign,
    Colon,
    Semi,
    LParen,
    RParen,
    Comma,
    Lambda,
    Dot,
    Plus,
    Star,
    Newline,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Word(w) => return write!(f, "`{w}`"),
            Tok::DColon => "`::`",
            Tok::Arrow => "`->`",
            Tok::FatArrow => "`=>`",
            Tok::Assign => "`:=`",
            Tok::Colon => "`:`",
            Tok::Semi => "`;`",
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
            Tok::Comma => "`,`",
            Tok::Lambda => "`\\`",
            Tok::Dot => "`.`",
            Tok::Plus => "`+`",
            Tok::Star => "`*`",
            Tok::Newline => "end of line",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub pos: SrcPos,
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

pub(crate) fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let pos = SrcPos {
                line: lineno + 1,
                col: i + 1,
            };
            let next = chars.get(i + 1).copied();
            let (tok, width) = match c {
                '#' => break,
                c if c.is_whitespace() => {
                    i += 1;
                    continue;
                }
                ':' if next == Some(':') => (Tok::DColon, 2),
                ':' if next == Some('=') => (Tok::Assign, 2),
                ':' => (Tok::Colon, 1),
                '-' if next == Some('>') => (Tok::Arrow, 2),
                '=' if next == Some('>') => (Tok::FatArrow, 2),
                ';' => (Tok::Semi, 1),
                '(' => (Tok::LParen, 1),
                ')' => (Tok::RParen, 1),
                ',' => (Tok::Comma, 1),
                '\\' | 'λ' => (Tok::Lambda, 1),
                '.' => (Tok::Dot, 1),
                '+' => (Tok::Plus, 1),
                '*' => (Tok::Star, 1),
                c if is_word_char(c) && c != 'λ' => {
                    let start = i;
                    while i < chars.len() && is_word_char(chars[i]) && chars[i] != 'λ' {
                        i += 1;
                    }
                    out.push(Token {
                        tok: Tok::Word(chars[start..i].iter().collect()),
                        pos,
                    });
                    continue;
                }
                other => {
                    return Err(ParseError::Syntax {
                        pos,
                        msg: format!("unexpected character `{other}`"),
                    })
                }
            };
            out.push(Token { tok, pos });
            i += width;
        }
        out.push(Token {
            tok: Tok::Newline,
            pos: SrcPos {
                line: lineno + 1,
                col: chars.len() + 1,
            },
        });
    }
    Ok(out)
}
