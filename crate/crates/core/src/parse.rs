//! Text syntax for jet-space expressions.
//!
//! ```text
//! expr    := ['-'] term (('+' | '-') term)*
//! term    := unary (('*' factor) | ('/' number))*
//! unary   := '-' unary | primary
//! primary := number | name | name '_' letters | call | '(' expr ')'
//! call    := inv(expr) | comm(expr, expr) | D(expr, coord)
//!          | sin(expr) | cos(expr) | exp(expr)
//! ```
//!
//! Multiplication is explicit and order-preserving. Subscript letters after
//! `_` name single-letter coordinates in any order (`u_xt` = `u_tx`); they
//! apply to the dependent variable and to declared base functions.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::calculus::total_derivative;
use crate::error::{Error, Result};
use crate::expr::{commutator, Atom, Expr, MultiIndex, ScalarFn};
use crate::normalize::NormalForm;
use crate::problem::{Problem, Symbol};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String, Option<String>),
    Plus,
    Minus,
    Star,
    Slash,
    LParen,
    RParen,
    Comma,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        match c {
            ' ' | '\t' | '\n' | '\r' => {
                i += 1;
                continue;
            }
            '+' => out.push((start, Tok::Plus)),
            '-' => out.push((start, Tok::Minus)),
            '*' => out.push((start, Tok::Star)),
            '/' => out.push((start, Tok::Slash)),
            '(' => out.push((start, Tok::LParen)),
            ')' => out.push((start, Tok::RParen)),
            ',' => out.push((start, Tok::Comma)),
            '0'..='9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n: BigInt = text[start..i].parse().expect("digits");
                out.push((start, Tok::Num(n)));
                continue;
            }
            c if c.is_ascii_alphabetic() => {
                while i < bytes.len() && bytes[i].is_ascii_alphanumeric() {
                    i += 1;
                }
                let name = text[start..i].to_string();
                let mut sub = None;
                if i < bytes.len() && bytes[i] == b'_' {
                    let s = i + 1;
                    i = s;
                    while i < bytes.len() && bytes[i].is_ascii_alphabetic() {
                        i += 1;
                    }
                    if i == s {
                        return Err(Error::parse(s, "expected subscript letters after `_`"));
                    }
                    sub = Some(text[s..i].to_string());
                }
                out.push((start, Tok::Ident(name, sub)));
                continue;
            }
            other => {
                return Err(Error::parse(
                    start,
                    format!("unexpected character `{other}`"),
                ))
            }
        }
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    problem: &'a Problem,
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        let at = self.offset();
        match self.bump() {
            Some(t) if t == tok => Ok(()),
            _ => Err(Error::parse(at, format!("expected {what}"))),
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut items = vec![self.term()?];
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    items.push(self.term()?);
                }
                Some(Tok::Minus) => {
                    self.bump();
                    items.push(-self.term()?);
                }
                _ => break,
            }
        }
        Ok(if items.len() == 1 {
            items.pop().unwrap()
        } else {
            Expr::Sum(items)
        })
    }

    fn term(&mut self) -> Result<Expr> {
        let mut factors = vec![self.unary()?];
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    factors.push(self.unary()?);
                }
                Some(Tok::Slash) => {
                    self.bump();
                    let at = self.offset();
                    match self.bump() {
                        Some(Tok::Num(n)) if !n.is_zero() => {
                            let r = BigRational::new(BigInt::from(1), n);
                            let lhs = if factors.len() == 1 {
                                factors.pop().unwrap()
                            } else {
                                Expr::Product(std::mem::take(&mut factors))
                            };
                            factors.push(Expr::scaled(r, lhs));
                        }
                        _ => {
                            return Err(Error::parse(
                                at,
                                "division is only by a nonzero integer literal",
                            ))
                        }
                    }
                }
                Some(Tok::Num(_)) | Some(Tok::Ident(..)) | Some(Tok::LParen) => {
                    return Err(Error::parse(
                        self.offset(),
                        "juxtaposition is not multiplication; use `*`",
                    ))
                }
                _ => break,
            }
        }
        Ok(if factors.len() == 1 {
            factors.pop().unwrap()
        } else {
            Expr::Product(factors)
        })
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.peek() == Some(&Tok::Minus) {
            self.bump();
            return Ok(-self.unary()?);
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Expr> {
        let at = self.offset();
        match self.bump() {
            Some(Tok::Num(n)) => Ok(Expr::rational(BigRational::from_integer(n))),
            Some(Tok::LParen) => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Some(Tok::Ident(name, sub)) => {
                if self.peek() == Some(&Tok::LParen) && sub.is_none() {
                    if let Some(e) = self.call(&name, at)? {
                        return Ok(e);
                    }
                }
                self.name(&name, sub.as_deref(), at)
            }
            _ => Err(Error::parse(at, "expected an operand")),
        }
    }

    fn call(&mut self, name: &str, at: usize) -> Result<Option<Expr>> {
        let wrap = |e: Error| match e {
            Error::Parse { .. } => e,
            other => Error::parse(at, other.to_string()),
        };
        let e = match name {
            "inv" => {
                self.bump();
                let arg = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Expr::inverse(arg).map_err(wrap)?
            }
            "comm" => {
                self.bump();
                let a = self.expr()?;
                self.expect(Tok::Comma, "`,`")?;
                let b = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                commutator(a, b)
            }
            "D" => {
                self.bump();
                let arg = self.expr()?;
                self.expect(Tok::Comma, "`,`")?;
                let cat = self.offset();
                let coord = match self.bump() {
                    Some(Tok::Ident(c, None)) => self
                        .problem
                        .coordinate(&c)
                        .map_err(|e| Error::parse(cat, e.to_string()))?,
                    _ => return Err(Error::parse(cat, "expected a coordinate name")),
                };
                self.expect(Tok::RParen, "`)`")?;
                let nf = NormalForm::from_expr(&arg).map_err(wrap)?;
                total_derivative(self.problem, &nf, coord)
                    .map_err(wrap)?
                    .to_expr()
            }
            _ => match ScalarFn::from_name(name) {
                Some(f) => {
                    self.bump();
                    let arg = self.expr()?;
                    self.expect(Tok::RParen, "`)`")?;
                    Expr::func(f, arg).map_err(wrap)?
                }
                None => return Ok(None),
            },
        };
        Ok(Some(e))
    }

    fn subscript(&self, sub: &str, at: usize) -> Result<MultiIndex> {
        sub.chars()
            .map(|c| {
                self.problem
                    .coordinate(&c.to_string())
                    .map_err(|_| Error::parse(at, format!("`{c}` is not a coordinate")))
            })
            .collect()
    }

    fn name(&self, name: &str, sub: Option<&str>, at: usize) -> Result<Expr> {
        let symbol = self
            .problem
            .lookup(name)
            .ok_or_else(|| Error::parse(at, format!("undeclared symbol `{name}`")))?;
        match (symbol, sub) {
            (Symbol::Dependent, Some(s)) => {
                Ok(Expr::Atom(self.problem.jet_atom(self.subscript(s, at)?)))
            }
            (Symbol::Function, Some(s)) => {
                let idx = self.subscript(s, at)?;
                let mut atom = self.problem.symbol_atom(name)?;
                if let Atom::Base { args, partials, .. } = &mut atom {
                    if idx.iter().any(|i| !args.iter().any(|a| a == i)) {
                        return Ok(Expr::zero());
                    }
                    *partials = idx;
                }
                Ok(Expr::Atom(atom))
            }
            (_, Some(_)) => Err(Error::parse(
                at,
                format!("`{name}` does not take subscripts"),
            )),
            (_, None) => self.problem.symbol(name),
        }
    }
}

/// Parses `text` against the declarations of `problem`.
pub fn parse_expr(problem: &Problem, text: &str) -> Result<Expr> {
    let toks = lex(text)?;
    if toks.is_empty() {
        return Err(Error::parse(0, "empty expression"));
    }
    let mut p = Parser {
        problem,
        toks,
        pos: 0,
        end: text.len(),
    };
    let e = p.expr()?;
    if p.pos < p.toks.len() {
        return Err(Error::parse(p.offset(), "unexpected trailing input"));
    }
    Ok(e)
}
