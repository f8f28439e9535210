//! Recursive-descent parser for the expression grammar in `docs/grammar.md`.

use num::{BigInt, Zero};

use crate::error::{Error, Result};
use crate::expr::ast::{Ast, BinOp};
use crate::scalar::{Elementary, Rational};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Rational),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    offset: usize,
    /// Integer literal without fraction or exponent part.
    integral: bool,
}

fn syntax(offset: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        offset,
        message: message.into(),
    }
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let single = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'/' => Some(Tok::Slash),
            b'^' => Some(Tok::Caret),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(tok) = single {
            out.push(Token {
                tok,
                offset: start,
                integral: false,
            });
            i += 1;
        } else if c.is_ascii_digit() || c == b'.' {
            let (value, end, integral) = lex_number(text, start)?;
            out.push(Token {
                tok: Tok::Num(value),
                offset: start,
                integral,
            });
            i = end;
        } else if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push(Token {
                tok: Tok::Ident(text[start..i].to_string()),
                offset: start,
                integral: false,
            });
        } else {
            let ch = text[start..].chars().next().unwrap_or('?');
            return Err(syntax(start, format!("unexpected character `{ch}`")));
        }
    }
    out.push(Token {
        tok: Tok::End,
        offset: text.len(),
        integral: false,
    });
    Ok(out)
}

/// Decimal literal `digits [. digits] [e [+-] digits]` as an exact rational.
fn lex_number(text: &str, start: usize) -> Result<(Rational, usize, bool)> {
    let bytes = text.as_bytes();
    let mut i = start;
    let digits = |i: &mut usize| {
        let s = *i;
        while *i < bytes.len() && bytes[*i].is_ascii_digit() {
            *i += 1;
        }
        &text[s..*i]
    };
    let int_part = digits(&mut i);
    let mut frac_part = "";
    let mut integral = true;
    if i < bytes.len() && bytes[i] == b'.' {
        i += 1;
        frac_part = digits(&mut i);
        integral = false;
    }
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(syntax(start, "malformed number"));
    }
    let mut exp: i64 = 0;
    if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
        let mut j = i + 1;
        let negative = j < bytes.len() && bytes[j] == b'-';
        if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
            j += 1;
        }
        let e = digits(&mut j);
        if e.is_empty() {
            return Err(syntax(j, "malformed exponent in number"));
        }
        exp = e
            .parse::<i64>()
            .map_err(|_| syntax(i, "exponent too large"))?;
        if negative {
            exp = -exp;
        }
        i = j;
        integral = false;
    }
    let mantissa: BigInt = format!("{int_part}{frac_part}")
        .parse()
        .unwrap_or_else(|_| BigInt::zero());
    let scale = exp - frac_part.len() as i64;
    let ten = BigInt::from(10);
    let value = if scale >= 0 {
        Rational::from_integer(mantissa * num::pow(ten, scale as usize))
    } else {
        Rational::new(mantissa, num::pow(ten, (-scale) as usize))
    };
    Ok((value, i, integral))
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    vars: &'a [String],
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        let t = self.bump();
        if t.tok == tok {
            Ok(())
        } else {
            Err(syntax(t.offset, format!("expected {what}")))
        }
    }

    fn expr(&mut self) -> Result<Ast> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek().tok {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Ast::binary(op, lhs, rhs);
        }
    }

    fn term(&mut self) -> Result<Ast> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek().tok {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = Ast::binary(op, lhs, rhs);
        }
    }

    fn unary(&mut self) -> Result<Ast> {
        if self.peek().tok == Tok::Minus {
            self.bump();
            return Ok(Ast::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Ast> {
        let base = self.primary()?;
        if self.peek().tok != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let exponent = self.exponent()?;
        Ok(Ast::Pow(Box::new(base), exponent))
    }

    /// `['-'] INT ['^' exponent]`, folded right-associatively.
    fn exponent(&mut self) -> Result<i64> {
        let negative = if self.peek().tok == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        let t = self.bump();
        let value = match (&t.tok, t.integral) {
            (Tok::Num(q), true) => q.to_integer(),
            (Tok::End, _) => return Err(syntax(t.offset, "expected exponent")),
            _ => return Err(Error::NonIntegerExponent { offset: t.offset }),
        };
        let mut e: i64 = value
            .try_into()
            .map_err(|_| syntax(t.offset, "exponent too large"))?;
        if negative {
            e = -e;
        }
        if self.peek().tok == Tok::Caret {
            let at = self.bump().offset;
            let inner = self.exponent()?;
            let inner = u32::try_from(inner)
                .map_err(|_| syntax(at, "nested exponent must be a non-negative integer"))?;
            e = e
                .checked_pow(inner)
                .ok_or_else(|| syntax(at, "exponent too large"))?;
        }
        Ok(e)
    }

    fn primary(&mut self) -> Result<Ast> {
        let t = self.bump();
        match t.tok {
            Tok::Num(q) => Ok(Ast::Number(q)),
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                if self.peek().tok == Tok::LParen {
                    let func =
                        Elementary::from_name(&name).ok_or_else(|| Error::UnknownIdentifier {
                            name: name.clone(),
                            offset: t.offset,
                        })?;
                    self.bump();
                    let arg = self.expr()?;
                    self.expect(Tok::RParen, "`)`")?;
                    return Ok(Ast::Call(func, Box::new(arg)));
                }
                match self.vars.iter().position(|v| *v == name) {
                    Some(index) => Ok(Ast::Var { index, name }),
                    None => Err(Error::UnknownIdentifier {
                        name,
                        offset: t.offset,
                    }),
                }
            }
            Tok::End => Err(syntax(t.offset, "unexpected end of input")),
            _ => Err(syntax(t.offset, "expected a number, variable or `(`")),
        }
    }
}

/// Parses `text` with the declared variable names.
pub fn parse(text: &str, vars: &[String]) -> Result<Ast> {
    let tokens = lex(text)?;
    if tokens.len() == 1 {
        return Err(syntax(0, "empty expression"));
    }
    let mut p = Parser {
        tokens,
        pos: 0,
        vars,
    };
    let ast = p.expr()?;
    let t = p.peek();
    if t.tok != Tok::End {
        return Err(syntax(t.offset, "unexpected trailing input"));
    }
    Ok(ast)
}
