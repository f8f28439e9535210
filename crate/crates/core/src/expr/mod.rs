//! Expression language for metric entries, map components and test functions.
//!
//! The grammar is documented in `docs/grammar.md`. Expressions are parsed once
//! and evaluated in any [`Ring`]: plain scalars, or jet/Laplace elements to
//! obtain derivatives without symbolic differentiation.

mod ast;
mod parser;

use std::collections::HashMap;
use std::fmt;

pub use ast::{Ast, BinOp};
pub use parser::parse;

use crate::error::{Error, Result};
use crate::scalar::Ring;

/// A parsed expression together with its declared variables.
#[derive(Clone, Debug, PartialEq)]
pub struct Expr {
    ast: Ast,
    vars: Vec<String>,
    source: String,
}

impl Expr {
    pub fn parse(text: &str, vars: &[impl AsRef<str>]) -> Result<Self> {
        let vars: Vec<String> = vars.iter().map(|v| v.as_ref().to_string()).collect();
        let ast = parse(text, &vars)?;
        Ok(Self {
            ast,
            vars,
            source: text.to_string(),
        })
    }

    pub fn ast(&self) -> &Ast {
        &self.ast
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// Evaluates with positional arguments (one per declared variable).
    pub fn eval<E: Ring>(&self, args: &[E]) -> Result<E> {
        if args.len() != self.vars.len() {
            return Err(Error::Arity {
                expected: self.vars.len(),
                found: args.len(),
            });
        }
        let like = args.first().ok_or(Error::Arity {
            expected: 1,
            found: 0,
        })?;
        if args.iter().any(|a| !a.compatible(like)) {
            return Err(Error::IncompatibleArguments);
        }
        self.ast.eval(args, like)
    }

    /// Evaluates a constant or variable expression using `like` to shape constants.
    pub fn eval_like<E: Ring>(&self, args: &[E], like: &E) -> Result<E> {
        if args.len() != self.vars.len() {
            return Err(Error::Arity {
                expected: self.vars.len(),
                found: args.len(),
            });
        }
        self.ast.eval(args, like)
    }

    /// Evaluates with a name-to-element environment.
    pub fn eval_named<E: Ring>(&self, env: &HashMap<String, E>) -> Result<E> {
        let args = self
            .vars
            .iter()
            .enumerate()
            .map(|(offset, name)| {
                env.get(name)
                    .cloned()
                    .ok_or_else(|| Error::UnknownIdentifier {
                        name: name.clone(),
                        offset,
                    })
            })
            .collect::<Result<Vec<_>>>()?;
        self.eval(&args)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.ast.fmt(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{Rational, Scalar};
    use crate::weil::{jet2_to_lap, Jet2, Lap};

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn conformal_factor_at_origin() {
        let e = Expr::parse("4/(1 + x^2 + y^2)^2", &["x", "y"]).unwrap();
        assert_eq!(e.eval(&[q(0, 1), q(0, 1)]).unwrap(), q(4, 1));
        assert_eq!(e.eval(&[q(1, 1), q(1, 1)]).unwrap(), q(4, 9));
    }

    #[test]
    fn generators_in_laplace_algebra() {
        let x = Lap::<Rational>::generator(0, 2).unwrap();
        let y = Lap::<Rational>::generator(1, 2).unwrap();
        let xy = Expr::parse("x*y", &["x", "y"]).unwrap();
        assert!(xy.eval(&[x.clone(), y.clone()]).unwrap().is_zero());
        let sq = Expr::parse("x^2+y^2", &["x", "y"]).unwrap();
        assert_eq!(
            sq.eval(&[x, y]).unwrap(),
            Lap::sigma(2).unwrap().scale(&q(2, 1))
        );
    }

    #[test]
    fn division_by_vanishing_value_is_an_error() {
        let e = Expr::parse("1/x", &["x"]).unwrap();
        assert_eq!(e.eval(&[q(0, 1)]), Err(Error::DivisionByZero));
        let j = Jet2::variable(q(0, 1), 0, 1);
        assert_eq!(e.eval(&[j]), Err(Error::DivisionByZero));
    }

    #[test]
    fn named_environment() {
        let e = Expr::parse("x - 2*y", &["x", "y"]).unwrap();
        let env: HashMap<String, Rational> =
            [("x".to_string(), q(1, 2)), ("y".to_string(), q(1, 3))].into();
        assert_eq!(e.eval_named(&env).unwrap(), q(-1, 6));
        let partial: HashMap<String, Rational> = [("x".to_string(), q(1, 1))].into();
        assert!(matches!(
            e.eval_named(&partial),
            Err(Error::UnknownIdentifier { .. })
        ));
    }

    #[test]
    fn arity_is_checked() {
        let e = Expr::parse("x", &["x", "y"]).unwrap();
        assert_eq!(
            e.eval(&[q(1, 1)]),
            Err(Error::Arity {
                expected: 2,
                found: 1
            })
        );
    }

    #[test]
    fn quotient_commutes_with_evaluation() {
        let e = Expr::parse("x^3*y - 3*x*y^2 + (x - y)^2 + 7", &["x", "y"]).unwrap();
        let point = [q(1, 3), q(-2, 5)];
        let jets = Jet2::seed(&point);
        let laps: Vec<Lap<Rational>> = jets.iter().map(|j| jet2_to_lap(j).unwrap()).collect();
        let via_jet = jet2_to_lap(&e.eval(&jets).unwrap()).unwrap();
        let via_lap = e.eval(&laps).unwrap();
        assert_eq!(via_jet, via_lap);
    }
}
