use num::{BigInt, Zero};
use proptest::prelude::*;

use lapweil::error::Error;
use lapweil::expr::{Ast, BinOp, Expr};
use lapweil::scalar::{Elementary, Rational, Ring, Scalar};
use lapweil::weil::{jet2_to_lap, Jet1, Jet2, Lap, MultiDual};

const VARS: [&str; 3] = ["x", "y", "z"];

fn rational() -> impl Strategy<Value = Rational> {
    (-9i64..=9, 1i64..=9).prop_map(|(p, q)| Rational::from_ratio(p, q))
}

fn rationals(n: usize) -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec(rational(), n)
}

fn jet1(n: usize) -> impl Strategy<Value = Jet1<Rational>> {
    (rational(), rationals(n)).prop_map(|(v, g)| Jet1::new(v, g))
}

fn jet2(n: usize) -> impl Strategy<Value = Jet2<Rational>> {
    (rational(), rationals(n), rationals(n * n)).prop_map(move |(v, g, raw)| {
        let mut h = raw.clone();
        for i in 0..n {
            for j in 0..i {
                h[i * n + j] = raw[j * n + i].clone();
            }
        }
        Jet2::new(v, g, h).unwrap()
    })
}

fn lap(n: usize) -> impl Strategy<Value = Lap<Rational>> {
    (rational(), rationals(n), rational()).prop_map(|(v, g, s)| Lap::new(v, g, s).unwrap())
}

fn multidual(k: usize) -> impl Strategy<Value = MultiDual<Rational>> {
    rationals(1 << k).prop_map(|coeffs| MultiDual { coeffs })
}

fn ring_laws<E: Ring>(a: &E, b: &E, c: &E) -> Result<(), TestCaseError> {
    prop_assert_eq!(a.mul(b).mul(c), a.mul(&b.mul(c)));
    prop_assert_eq!(a.add(b).add(c), a.add(&b.add(c)));
    prop_assert_eq!(a.mul(b), b.mul(a));
    prop_assert_eq!(a.add(b), b.add(a));
    prop_assert_eq!(a.mul(&b.add(c)), a.mul(b).add(&a.mul(c)));
    prop_assert_eq!(a.mul(&a.one_like()), a.clone());
    prop_assert!(a.sub(a).is_zero());
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn jet1_ring_laws((a, b, c) in (1usize..=5).prop_flat_map(|n| (jet1(n), jet1(n), jet1(n)))) {
        ring_laws(&a, &b, &c)?;
    }

    #[test]
    fn jet2_ring_laws((a, b, c) in (1usize..=5).prop_flat_map(|n| (jet2(n), jet2(n), jet2(n)))) {
        ring_laws(&a, &b, &c)?;
    }

    #[test]
    fn lap_ring_laws((a, b, c) in (2usize..=5).prop_flat_map(|n| (lap(n), lap(n), lap(n)))) {
        ring_laws(&a, &b, &c)?;
    }

    #[test]
    fn multidual_ring_laws((a, b, c) in (1usize..=3).prop_flat_map(|k| (multidual(k), multidual(k), multidual(k)))) {
        ring_laws(&a, &b, &c)?;
    }

    #[test]
    fn quotient_is_a_ring_map((a, b) in (2usize..=5).prop_flat_map(|n| (jet2(n), jet2(n)))) {
        let (qa, qb) = (jet2_to_lap(&a).unwrap(), jet2_to_lap(&b).unwrap());
        prop_assert_eq!(jet2_to_lap(&a.mul(&b)).unwrap(), qa.mul(&qb));
        prop_assert_eq!(jet2_to_lap(&a.add(&b)).unwrap(), qa.add(&qb));
        prop_assert_eq!(jet2_to_lap(&a.one_like()).unwrap(), qa.one_like());
    }

    #[test]
    fn quotient_kills_trace_free_second_order_part(a in (2usize..=5).prop_flat_map(jet2)) {
        let n = a.dim();
        let tr: Rational = (0..n).map(|i| a.hess_at(i, i).clone()).fold(<Rational as Zero>::zero(), |s, t| s + t);
        let mut h = a.hess.clone();
        for i in 0..n {
            h[i * n + i] = h[i * n + i].clone() - tr.clone() / Rational::from_i64(n as i64);
        }
        let free = Jet2::new(<Rational as Zero>::zero(), vec![<Rational as Zero>::zero(); n], h).unwrap();
        prop_assert!(jet2_to_lap(&free).unwrap().is_zero());
    }

    #[test]
    fn lap_reciprocal(a in (2usize..=5).prop_flat_map(lap)) {
        prop_assume!(!Ring::is_zero(&a.value));
        prop_assert_eq!(a.mul(&a.recip().unwrap()), a.one_like());
    }

    #[test]
    fn print_parse_round_trip(ast in ast_strategy(true)) {
        let text = ast.to_string();
        let parsed = Expr::parse(&text, &VARS).unwrap();
        prop_assert_eq!(parsed.ast(), &ast, "printed as {}", text);
    }

    #[test]
    fn eval_matches_reference(ast in ast_strategy(false), env in rationals(3)) {
        let e = Expr::parse(&ast.to_string(), &VARS).unwrap();
        match (e.eval(&env), reference(&ast, &env)) {
            (Ok(v), Some(r)) => prop_assert_eq!(v, r),
            (Err(Error::DivisionByZero), None) => {}
            (got, want) => prop_assert!(false, "{:?} vs {:?} for {}", got, want, ast),
        }
    }

    #[test]
    fn jet_value_matches_scalar_eval(ast in ast_strategy(false), env in rationals(3)) {
        let e = Expr::parse(&ast.to_string(), &VARS).unwrap();
        let jets = Jet2::seed(&env);
        if let (Ok(j), Ok(v)) = (e.eval(&jets), e.eval(&env)) {
            prop_assert_eq!(j.value, v);
        }
    }
}

/// Non-negative literals with a finite decimal expansion, as the printer emits.
fn literal() -> impl Strategy<Value = Rational> {
    (0i64..200, 0u32..3).prop_map(|(n, d)| Rational::new(BigInt::from(n), BigInt::from(10i64.pow(d))))
}

fn ast_strategy(with_calls: bool) -> impl Strategy<Value = Ast> {
    let leaf = prop_oneof![
        literal().prop_map(Ast::Number),
        (0usize..3).prop_map(|i| Ast::Var { index: i, name: VARS[i].into() }),
    ];
    leaf.prop_recursive(4, 24, 2, move |inner| {
        let op = prop_oneof![Just(BinOp::Add), Just(BinOp::Sub), Just(BinOp::Mul), Just(BinOp::Div)];
        let mut cases = vec![
            inner.clone().prop_map(|a| Ast::Neg(Box::new(a))).boxed(),
            (op, inner.clone(), inner.clone()).prop_map(|(o, a, b)| Ast::binary(o, a, b)).boxed(),
            (inner.clone(), -2i64..=3).prop_map(|(a, e)| Ast::Pow(Box::new(a), e)).boxed(),
        ];
        if with_calls {
            cases.push(
                (0usize..Elementary::ALL.len(), inner)
                    .prop_map(|(f, a)| Ast::Call(Elementary::ALL[f], Box::new(a)))
                    .boxed(),
            );
        }
        proptest::strategy::Union::new(cases)
    })
}

/// Straightforward recursive evaluation on `BigRational`; `None` on division by zero.
fn reference(ast: &Ast, env: &[Rational]) -> Option<Rational> {
    Some(match ast {
        Ast::Number(q) => q.clone(),
        Ast::Var { index, .. } => env[*index].clone(),
        Ast::Neg(a) => -reference(a, env)?,
        Ast::Binary { op, lhs, rhs } => {
            let (a, b) = (reference(lhs, env)?, reference(rhs, env)?);
            match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                BinOp::Mul => a * b,
                BinOp::Div if Zero::is_zero(&b) => return None,
                BinOp::Div => a / b,
            }
        }
        Ast::Pow(a, e) => {
            let base = reference(a, env)?;
            if *e < 0 && Zero::is_zero(&base) {
                return None;
            }
            num::pow::Pow::pow(base, *e as i32)
        }
        Ast::Call(..) => unreachable!("calls are not generated here"),
    })
}
