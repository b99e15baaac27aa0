//! Recursive descent parser for the concrete syntax.
//!
//! The grammar is LL(2) except at `(`, where an assertion may open either a
//! parenthesized assertion or the left operand of a comparison; that spot is
//! resolved by backtracking and the error that made it furthest wins.

use num_bigint::BigInt;
use thiserror::Error;

use super::{AExpr, AInstr, Assert, BExpr, Condition, Ident, Instr};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("{line}:{col}: unexpected character {ch:?}")]
    UnexpectedChar { line: u32, col: u32, ch: char },
    #[error("{line}:{col}: expected {} but found {found}", expected.join(" or "))]
    Unexpected {
        line: u32,
        col: u32,
        expected: Vec<String>,
        found: String,
    },
}

impl ParseError {
    pub fn position(&self) -> (u32, u32) {
        match self {
            ParseError::UnexpectedChar { line, col, .. } => (*line, *col),
            ParseError::Unexpected { line, col, .. } => (*line, *col),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Num(BigInt),
    Plus,
    Lt,
    Comma,
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Semi,
    Assign,
    AndAnd,
    Tilde,
    Arrow,
    Skip,
    While,
    Do,
    Done,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier {s:?}"),
            Tok::Num(n) => format!("number {n}"),
            Tok::Plus => "`+`".into(),
            Tok::Lt => "`<`".into(),
            Tok::Comma => "`,`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Assign => "`:=`".into(),
            Tok::AndAnd => "`/\\`".into(),
            Tok::Tilde => "`~`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Skip => "`skip`".into(),
            Tok::While => "`while`".into(),
            Tok::Do => "`do`".into(),
            Tok::Done => "`done`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

struct Token {
    tok: Tok,
    line: u32,
    col: u32,
}

fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let mut line = 1u32;
    let mut col = 1u32;
    macro_rules! bump {
        () => {{
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                col = 1;
            } else if c.is_some() {
                col += 1;
            }
            c
        }};
    }
    loop {
        let (tline, tcol) = (line, col);
        let c = match chars.peek().copied() {
            None => {
                out.push(Token { tok: Tok::Eof, line: tline, col: tcol });
                return Ok(out);
            }
            Some(c) => c,
        };
        if c.is_whitespace() {
            bump!();
            continue;
        }
        let tok = match c {
            '+' => {
                bump!();
                Tok::Plus
            }
            '<' => {
                bump!();
                Tok::Lt
            }
            ',' => {
                bump!();
                Tok::Comma
            }
            '(' => {
                bump!();
                Tok::LParen
            }
            ')' => {
                bump!();
                Tok::RParen
            }
            '{' => {
                bump!();
                Tok::LBrace
            }
            '}' => {
                bump!();
                Tok::RBrace
            }
            '[' => {
                bump!();
                Tok::LBracket
            }
            ']' => {
                bump!();
                Tok::RBracket
            }
            ';' => {
                bump!();
                Tok::Semi
            }
            '~' => {
                bump!();
                Tok::Tilde
            }
            ':' => {
                bump!();
                match chars.peek() {
                    Some('=') => {
                        bump!();
                        Tok::Assign
                    }
                    _ => return Err(ParseError::UnexpectedChar { line: tline, col: tcol, ch: ':' }),
                }
            }
            '/' => {
                bump!();
                match chars.peek() {
                    Some('\\') => {
                        bump!();
                        Tok::AndAnd
                    }
                    _ => return Err(ParseError::UnexpectedChar { line: tline, col: tcol, ch: '/' }),
                }
            }
            '-' => {
                bump!();
                match chars.peek() {
                    Some('>') => {
                        bump!();
                        Tok::Arrow
                    }
                    Some(d) if d.is_ascii_digit() => {
                        let mut digits = String::from("-");
                        while let Some(d) = chars.peek() {
                            if d.is_ascii_digit() {
                                digits.push(*d);
                                bump!();
                            } else {
                                break;
                            }
                        }
                        Tok::Num(digits.parse().expect("digit string"))
                    }
                    _ => return Err(ParseError::UnexpectedChar { line: tline, col: tcol, ch: '-' }),
                }
            }
            d if d.is_ascii_digit() => {
                let mut digits = String::new();
                while let Some(d) = chars.peek() {
                    if d.is_ascii_digit() {
                        digits.push(*d);
                        bump!();
                    } else {
                        break;
                    }
                }
                Tok::Num(digits.parse().expect("digit string"))
            }
            a if a.is_ascii_alphabetic() || a == '_' => {
                let mut name = String::new();
                while let Some(a) = chars.peek() {
                    if a.is_ascii_alphanumeric() || *a == '_' {
                        name.push(*a);
                        bump!();
                    } else {
                        break;
                    }
                }
                match name.as_str() {
                    "skip" => Tok::Skip,
                    "while" => Tok::While,
                    "do" => Tok::Do,
                    "done" => Tok::Done,
                    _ => Tok::Ident(name),
                }
            }
            other => return Err(ParseError::UnexpectedChar { line: tline, col: tcol, ch: other }),
        };
        out.push(Token { tok, line: tline, col: tcol });
    }
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn peek2(&self) -> &Tok {
        let i = (self.pos + 1).min(self.tokens.len() - 1);
        &self.tokens[i].tok
    }

    fn next(&mut self) -> &Tok {
        let t = &self.tokens[self.pos].tok;
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, expected: &[&str]) -> Result<T, ParseError> {
        let t = &self.tokens[self.pos];
        Err(ParseError::Unexpected {
            line: t.line,
            col: t.col,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: t.tok.describe(),
        })
    }

    fn expect(&mut self, tok: Tok, desc: &str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.next();
            Ok(())
        } else {
            self.fail(&[desc])
        }
    }

    fn ident(&mut self) -> Result<Ident, ParseError> {
        match self.peek() {
            Tok::Ident(name) => {
                let name = name.clone();
                self.next();
                Ok(Ident(name))
            }
            _ => self.fail(&["identifier"]),
        }
    }

    fn aterm(&mut self) -> Result<AExpr, ParseError> {
        match self.peek().clone() {
            Tok::Num(n) => {
                self.next();
                Ok(AExpr::Num(n))
            }
            Tok::Ident(name) => {
                self.next();
                Ok(AExpr::Var(Ident(name)))
            }
            Tok::LParen => {
                self.next();
                let e = self.aexpr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            _ => self.fail(&["number", "identifier", "`(`"]),
        }
    }

    // Chains of `+` associate to the left.
    fn aexpr(&mut self) -> Result<AExpr, ParseError> {
        let mut e = self.aterm()?;
        while *self.peek() == Tok::Plus {
            self.next();
            let rhs = self.aterm()?;
            e = AExpr::plus(e, rhs);
        }
        Ok(e)
    }

    fn bexpr(&mut self) -> Result<BExpr, ParseError> {
        let a = self.aexpr()?;
        self.expect(Tok::Lt, "`<`")?;
        let b = self.aexpr()?;
        Ok(BExpr::Lt(a, b))
    }

    fn pred_app(&mut self) -> Result<Assert, ParseError> {
        let name = self.ident()?;
        self.expect(Tok::LParen, "`(`")?;
        let mut args = Vec::new();
        if *self.peek() != Tok::RParen {
            args.push(self.aexpr()?);
            while *self.peek() == Tok::Comma {
                self.next();
                args.push(self.aexpr()?);
            }
        }
        self.expect(Tok::RParen, "`)`")?;
        Ok(Assert::Pred(name, args))
    }

    fn aconj(&mut self) -> Result<Assert, ParseError> {
        match self.peek() {
            Tok::Tilde => {
                self.next();
                Ok(Assert::not(self.aconj()?))
            }
            Tok::Ident(_) if *self.peek2() == Tok::LParen => self.pred_app(),
            Tok::LParen => {
                // Either a comparison whose left side is parenthesized, or a
                // parenthesized assertion. Try the comparison first; on a
                // double failure the error that got furthest wins.
                let mark = self.pos;
                match self.bexpr() {
                    Ok(b) => Ok(Assert::Bool(b)),
                    Err(e1) => {
                        self.pos = mark;
                        self.next();
                        let a = self.assertion().and_then(|a| {
                            self.expect(Tok::RParen, "`)`")?;
                            Ok(a)
                        });
                        match a {
                            Ok(a) => Ok(a),
                            Err(e2) if e2.position() >= e1.position() => Err(e2),
                            Err(_) => Err(e1),
                        }
                    }
                }
            }
            Tok::Num(_) | Tok::Ident(_) => Ok(Assert::Bool(self.bexpr()?)),
            _ => self.fail(&["`~`", "predicate", "expression", "`(`"]),
        }
    }

    // `/\` associates to the right.
    fn assertion(&mut self) -> Result<Assert, ParseError> {
        let a = self.aconj()?;
        if *self.peek() == Tok::AndAnd {
            self.next();
            let rest = self.assertion()?;
            Ok(Assert::conj(a, rest))
        } else {
            Ok(a)
        }
    }

    fn condition(&mut self) -> Result<Condition, ParseError> {
        let hyp = self.assertion()?;
        self.expect(Tok::Arrow, "`->`")?;
        let concl = self.assertion()?;
        Ok(Condition { hyp, concl })
    }

    fn aitem(&mut self) -> Result<AInstr, ParseError> {
        match self.peek() {
            Tok::Skip => {
                self.next();
                Ok(AInstr::Skip)
            }
            Tok::Ident(_) => {
                let x = self.ident()?;
                self.expect(Tok::Assign, "`:=`")?;
                let e = self.aexpr()?;
                Ok(AInstr::Assign(x, e))
            }
            Tok::LBrace => {
                self.next();
                let a = self.assertion()?;
                self.expect(Tok::RBrace, "`}`")?;
                let i = self.aitem()?;
                Ok(AInstr::prec(a, i))
            }
            Tok::While => {
                self.next();
                let b = self.bexpr()?;
                self.expect(Tok::Do, "`do`")?;
                self.expect(Tok::LBracket, "`[`")?;
                let inv = self.assertion()?;
                self.expect(Tok::RBracket, "`]`")?;
                let body = self.ainstr()?;
                self.expect(Tok::Done, "`done`")?;
                Ok(AInstr::while_loop(b, inv, body))
            }
            _ => self.fail(&["`skip`", "identifier", "`{`", "`while`"]),
        }
    }

    // `;` associates to the right.
    fn ainstr(&mut self) -> Result<AInstr, ParseError> {
        let i = self.aitem()?;
        if *self.peek() == Tok::Semi {
            self.next();
            let rest = self.ainstr()?;
            Ok(AInstr::seq(i, rest))
        } else {
            Ok(i)
        }
    }

    fn item(&mut self) -> Result<Instr, ParseError> {
        match self.peek() {
            Tok::Skip => {
                self.next();
                Ok(Instr::Skip)
            }
            Tok::Ident(_) => {
                let x = self.ident()?;
                self.expect(Tok::Assign, "`:=`")?;
                let e = self.aexpr()?;
                Ok(Instr::Assign(x, e))
            }
            Tok::While => {
                self.next();
                let b = self.bexpr()?;
                self.expect(Tok::Do, "`do`")?;
                let body = self.instr()?;
                self.expect(Tok::Done, "`done`")?;
                Ok(Instr::while_loop(b, body))
            }
            _ => self.fail(&["`skip`", "identifier", "`while`"]),
        }
    }

    fn instr(&mut self) -> Result<Instr, ParseError> {
        let i = self.item()?;
        if *self.peek() == Tok::Semi {
            self.next();
            let rest = self.instr()?;
            Ok(Instr::seq(i, rest))
        } else {
            Ok(i)
        }
    }

    fn eof(&mut self) -> Result<(), ParseError> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            self.fail(&["end of input"])
        }
    }
}

fn run<T>(text: &str, f: impl FnOnce(&mut Parser) -> Result<T, ParseError>) -> Result<T, ParseError> {
    let tokens = tokenize(text)?;
    let mut p = Parser { tokens, pos: 0 };
    let v = f(&mut p)?;
    p.eof()?;
    Ok(v)
}

/// Parses an annotated instruction; every `while` must carry a bracketed
/// invariant.
pub fn parse_instr(text: &str) -> Result<AInstr, ParseError> {
    run(text, Parser::ainstr)
}

/// Parses a bare instruction; `{...}` annotations and `[...]` invariants are
/// rejected.
pub fn parse_bare(text: &str) -> Result<Instr, ParseError> {
    run(text, Parser::instr)
}

pub fn parse_assert(text: &str) -> Result<Assert, ParseError> {
    run(text, Parser::assertion)
}

pub fn parse_condition(text: &str) -> Result<Condition, ParseError> {
    run(text, Parser::condition)
}

pub fn parse_aexpr(text: &str) -> Result<AExpr, ParseError> {
    run(text, Parser::aexpr)
}

pub fn parse_bexpr(text: &str) -> Result<BExpr, ParseError> {
    run(text, Parser::bexpr)
}
