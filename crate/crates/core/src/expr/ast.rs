use std::fmt;

use num::{BigInt, Integer, One, Signed};

use crate::error::Result;
use crate::scalar::{Elementary, Rational, Ring, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Ast {
    /// Non-negative literal, stored exactly.
    Number(Rational),
    /// Variable, by position in the declared variable list.
    Var {
        index: usize,
        name: String,
    },
    Neg(Box<Ast>),
    Binary {
        op: BinOp,
        lhs: Box<Ast>,
        rhs: Box<Ast>,
    },
    Pow(Box<Ast>, i64),
    Call(Elementary, Box<Ast>),
}

impl Ast {
    pub fn binary(op: BinOp, lhs: Ast, rhs: Ast) -> Ast {
        Ast::Binary {
            op,
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Ast::Binary { op, .. } => op.precedence(),
            Ast::Neg(_) => 3,
            Ast::Pow(..) => 4,
            Ast::Number(_) | Ast::Var { .. } | Ast::Call(..) => 5,
        }
    }

    /// Whether the expression only uses ring operations (no elementary calls).
    pub fn is_polynomial(&self) -> bool {
        match self {
            Ast::Number(_) | Ast::Var { .. } => true,
            Ast::Neg(a) => a.is_polynomial(),
            Ast::Binary { op, lhs, rhs } => {
                *op != BinOp::Div && lhs.is_polynomial() && rhs.is_polynomial()
            }
            Ast::Pow(a, e) => *e >= 0 && a.is_polynomial(),
            Ast::Call(..) => false,
        }
    }

    /// Evaluates with `env[i]` bound to variable `i`; `like` shapes constants.
    pub fn eval<E: Ring>(&self, env: &[E], like: &E) -> Result<E> {
        Ok(match self {
            Ast::Number(q) => like.constant_like(E::Base::from_rational(q)),
            Ast::Var { index, .. } => env[*index].clone(),
            Ast::Neg(a) => a.eval(env, like)?.neg(),
            Ast::Binary { op, lhs, rhs } => {
                let a = lhs.eval(env, like)?;
                let b = rhs.eval(env, like)?;
                match op {
                    BinOp::Add => a.add(&b),
                    BinOp::Sub => a.sub(&b),
                    BinOp::Mul => a.mul(&b),
                    BinOp::Div => a.div(&b)?,
                }
            }
            Ast::Pow(a, e) => a.eval(env, like)?.powi(*e)?,
            Ast::Call(f, a) => a.eval(env, like)?.apply(*f)?,
        })
    }
}

/// Finite decimal expansion of a literal (its denominator only has factors 2 and 5).
fn write_decimal(f: &mut fmt::Formatter<'_>, q: &Rational) -> fmt::Result {
    let (numer, denom) = (q.numer().abs(), q.denom().clone());
    if denom.is_one() {
        return write!(f, "{numer}");
    }
    let ten = BigInt::from(10);
    let mut digits = 0usize;
    let mut scaled = numer.clone();
    while !scaled.is_multiple_of(&denom) && digits < 4096 {
        scaled *= &ten;
        digits += 1;
    }
    if !scaled.is_multiple_of(&denom) {
        // not a decimal literal; fall back to a parenthesized quotient
        return write!(f, "({numer}/{denom})");
    }
    let s = (scaled / denom).to_string();
    let s = format!("{s:0>width$}", width = digits + 1);
    let (int_part, frac_part) = s.split_at(s.len() - digits);
    write!(f, "{int_part}.{frac_part}")
}

impl fmt::Display for Ast {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let child = |f: &mut fmt::Formatter<'_>, a: &Ast, parens: bool| {
            if parens {
                write!(f, "({a})")
            } else {
                write!(f, "{a}")
            }
        };
        match self {
            Ast::Number(q) => {
                if q.is_negative() {
                    write!(f, "(-")?;
                    write_decimal(f, q)?;
                    write!(f, ")")
                } else {
                    write_decimal(f, q)
                }
            }
            Ast::Var { name, .. } => f.write_str(name),
            Ast::Neg(a) => {
                f.write_str("-")?;
                child(f, a, a.precedence() < 3)
            }
            Ast::Binary { op, lhs, rhs } => {
                child(f, lhs, lhs.precedence() < op.precedence())?;
                write!(f, " {} ", op.symbol())?;
                child(f, rhs, rhs.precedence() <= op.precedence())
            }
            Ast::Pow(a, e) => {
                child(f, a, a.precedence() < 5)?;
                write!(f, "^{e}")
            }
            Ast::Call(func, a) => write!(f, "{func}({a})"),
        }
    }
}
