//! Base fields and the ring contract shared by scalars and Weil algebras.
//!
//! Every algebra in this crate implements [`Ring`]. A ring is always built on
//! top of one of the two base fields ([`Scalar`]): exact rationals or `f64`.
//! Algebras nest (a first-order jet whose coefficients are Laplace elements is
//! again a [`Ring`]), which is how metric data is evaluated at points whose
//! coordinates are themselves infinitesimal.

use std::fmt;

use num::{BigInt, BigRational, Signed, ToPrimitive};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Default relative tolerance for float64 mode verdicts.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Elementary functions that can be lifted to nilpotent arguments.
///
/// Powers and reciprocals are ring operations and are not listed here.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Elementary {
    Sqrt,
    Sin,
    Cos,
    Exp,
    Log,
    Tanh,
}

impl Elementary {
    pub const ALL: [Elementary; 6] = [
        Elementary::Sqrt,
        Elementary::Sin,
        Elementary::Cos,
        Elementary::Exp,
        Elementary::Log,
        Elementary::Tanh,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Elementary::Sqrt => "sqrt",
            Elementary::Sin => "sin",
            Elementary::Cos => "cos",
            Elementary::Exp => "exp",
            Elementary::Log => "log",
            Elementary::Tanh => "tanh",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.name() == name)
    }
}

impl fmt::Display for Elementary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Commutative ring with unit over a base field.
///
/// Method names shadow `std::ops`; generic code should call them directly.
/// Binary operations on algebra elements of different dimensions panic; the
/// algebra types expose fallible `try_*` variants for untrusted input.
pub trait Ring: Clone + fmt::Debug + PartialEq + Send + Sync + 'static {
    type Base: Scalar;

    /// The constant `c` with the same shape (dimension, nesting) as `self`.
    fn constant_like(&self, c: Self::Base) -> Self;

    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    fn scale(&self, c: &Self::Base) -> Self;

    /// The real part, all the way down the nesting.
    fn base_value(&self) -> Self::Base;

    fn is_zero(&self) -> bool;

    /// Largest absolute coefficient, used for float tolerances.
    fn magnitude(&self) -> f64;

    /// Whether `self` and `other` live in the same algebra.
    fn compatible(&self, other: &Self) -> bool;

    /// Multiplicative inverse; fails when the value component is zero.
    fn recip(&self) -> Result<Self>;

    /// `f(self), f'(self), ..., f^(order)(self)`.
    fn elementary_derivatives(&self, f: Elementary, order: usize) -> Result<Vec<Self>>;

    fn zero_like(&self) -> Self {
        self.constant_like(Self::Base::zero())
    }

    fn one_like(&self) -> Self {
        self.constant_like(Self::Base::one())
    }

    fn div(&self, rhs: &Self) -> Result<Self> {
        Ok(self.mul(&rhs.recip()?))
    }

    fn powi(&self, exponent: i64) -> Result<Self> {
        if exponent < 0 {
            return self.recip()?.powi(-exponent);
        }
        let mut result = self.one_like();
        let mut base = self.clone();
        let mut e = exponent as u64;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        Ok(result)
    }

    fn apply(&self, f: Elementary) -> Result<Self> {
        let mut d = self.elementary_derivatives(f, 0)?;
        Ok(d.swap_remove(0))
    }

    /// Zero test that is exact for rationals and relative for floats.
    fn is_negligible(&self, scale: f64, tol: f64) -> bool {
        if Self::Base::EXACT {
            self.is_zero()
        } else {
            self.magnitude() <= tol * scale
        }
    }
}

/// A base field: exact rationals or `f64`.
pub trait Scalar: Ring<Base = Self> + PartialOrd + fmt::Display {
    const EXACT: bool;
    const MODE: &'static str;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    fn from_rational(q: &Rational) -> Self;
    fn to_f64(&self) -> f64;
    fn abs(&self) -> Self;

    /// Square root when it exists in the field (perfect squares for rationals).
    fn sqrt_exact(&self) -> Option<Self>;

    /// Serialized form used in reports: `p/q` for rationals.
    fn certificate(&self) -> String;

    /// Rank of a row-major `rows x cols` matrix.
    fn matrix_rank(rows: usize, cols: usize, data: &[Self], tol: f64) -> usize;

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_rational(&Rational::new(BigInt::from(num), BigInt::from(den)))
    }

    fn is_positive(&self) -> bool {
        *self > Self::zero()
    }
}

fn factorial(k: usize) -> u64 {
    (1..=k as u64).product()
}

/// `1/j!` in the base field.
pub(crate) fn inv_factorial<S: Scalar>(j: usize) -> S {
    S::from_rational(&Rational::new(BigInt::from(1), BigInt::from(factorial(j))))
}

impl Ring for Rational {
    type Base = Rational;

    fn constant_like(&self, c: Rational) -> Self {
        c
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn scale(&self, c: &Rational) -> Self {
        self * c
    }
    fn base_value(&self) -> Rational {
        self.clone()
    }
    fn is_zero(&self) -> bool {
        num::Zero::is_zero(self)
    }
    fn magnitude(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::INFINITY).abs()
    }
    fn compatible(&self, _other: &Self) -> bool {
        true
    }
    fn recip(&self) -> Result<Self> {
        if num::Zero::is_zero(self) {
            Err(Error::DivisionByZero)
        } else {
            Ok(<Rational as num::One>::one() / self)
        }
    }
    fn elementary_derivatives(&self, f: Elementary, _order: usize) -> Result<Vec<Self>> {
        Err(Error::TranscendentalInExactMode(f.name()))
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;
    const MODE: &'static str = "exact";

    fn zero() -> Self {
        num::Zero::zero()
    }
    fn one() -> Self {
        num::One::one()
    }
    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }
    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn abs(&self) -> Self {
        Signed::abs(self)
    }
    fn sqrt_exact(&self) -> Option<Self> {
        if self.is_negative() {
            return None;
        }
        let (n, d) = (self.numer(), self.denom());
        let (rn, rd) = (n.sqrt(), d.sqrt());
        (&rn * &rn == *n && &rd * &rd == *d).then(|| Rational::new(rn, rd))
    }
    fn certificate(&self) -> String {
        format!("{}/{}", self.numer(), self.denom())
    }
    fn matrix_rank(rows: usize, cols: usize, data: &[Self], _tol: f64) -> usize {
        let mut m = data.to_vec();
        let mut rank = 0;
        for col in 0..cols {
            let Some(p) = (rank..rows).find(|&r| !num::Zero::is_zero(&m[r * cols + col])) else {
                continue;
            };
            for c in 0..cols {
                m.swap(p * cols + c, rank * cols + c);
            }
            let pivot = m[rank * cols + col].clone();
            for r in 0..rows {
                if r == rank || num::Zero::is_zero(&m[r * cols + col]) {
                    continue;
                }
                let factor = &m[r * cols + col] / &pivot;
                for c in col..cols {
                    let delta = &factor * &m[rank * cols + c];
                    m[r * cols + c] -= delta;
                }
            }
            rank += 1;
            if rank == rows {
                break;
            }
        }
        rank
    }
}

fn domain_error(f: Elementary, x: f64) -> Error {
    Error::Domain {
        func: f.name(),
        value: format!("{x:?}"),
    }
}

/// Derivatives of `tanh` as polynomials in `t = tanh(x)`.
fn tanh_derivatives(t: f64, order: usize) -> Vec<f64> {
    let eval = |p: &[f64]| p.iter().rev().fold(0.0, |acc, c| acc * t + c);
    let mut poly = vec![0.0, 1.0];
    let mut out = Vec::with_capacity(order + 1);
    out.push(t);
    for _ in 0..order {
        // d/dx P(t) = P'(t) (1 - t^2)
        let deriv: Vec<f64> = poly
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * i as f64)
            .collect();
        let mut next = vec![0.0; deriv.len() + 2];
        for (i, c) in deriv.iter().enumerate() {
            next[i] += c;
            next[i + 2] -= c;
        }
        poly = next;
        out.push(eval(&poly));
    }
    out
}

fn f64_derivatives(f: Elementary, x: f64, order: usize) -> Result<Vec<f64>> {
    let out: Vec<f64> = match f {
        Elementary::Sin => (0..=order)
            .map(|k| match k % 4 {
                0 => x.sin(),
                1 => x.cos(),
                2 => -x.sin(),
                _ => -x.cos(),
            })
            .collect(),
        Elementary::Cos => (0..=order)
            .map(|k| match k % 4 {
                0 => x.cos(),
                1 => -x.sin(),
                2 => -x.cos(),
                _ => x.sin(),
            })
            .collect(),
        Elementary::Exp => vec![x.exp(); order + 1],
        Elementary::Log => {
            if x <= 0.0 {
                return Err(domain_error(f, x));
            }
            let mut out = vec![x.ln()];
            for k in 1..=order {
                let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                out.push(sign * factorial(k - 1) as f64 / x.powi(k as i32));
            }
            out
        }
        Elementary::Sqrt => {
            if x < 0.0 || (x == 0.0 && order > 0) {
                return Err(domain_error(f, x));
            }
            let mut coeff = 1.0;
            (0..=order)
                .map(|k| {
                    let d = coeff * x.powf(0.5 - k as f64);
                    coeff *= 0.5 - k as f64;
                    d
                })
                .collect()
        }
        Elementary::Tanh => tanh_derivatives(x.tanh(), order),
    };
    if out.iter().all(|d| d.is_finite()) {
        Ok(out)
    } else {
        Err(domain_error(f, x))
    }
}

impl Ring for f64 {
    type Base = f64;

    fn constant_like(&self, c: f64) -> Self {
        c
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn scale(&self, c: &f64) -> Self {
        self * c
    }
    fn base_value(&self) -> f64 {
        *self
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn magnitude(&self) -> f64 {
        f64::abs(*self)
    }
    fn compatible(&self, _other: &Self) -> bool {
        true
    }
    fn recip(&self) -> Result<Self> {
        if *self == 0.0 {
            Err(Error::DivisionByZero)
        } else {
            Ok(1.0 / self)
        }
    }
    fn elementary_derivatives(&self, f: Elementary, order: usize) -> Result<Vec<Self>> {
        f64_derivatives(f, *self, order)
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;
    const MODE: &'static str = "float64";

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn from_rational(q: &Rational) -> Self {
        ToPrimitive::to_f64(q).unwrap_or(f64::NAN)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn sqrt_exact(&self) -> Option<Self> {
        (*self >= 0.0).then(|| self.sqrt())
    }
    fn certificate(&self) -> String {
        format!("{self:?}")
    }
    fn matrix_rank(rows: usize, cols: usize, data: &[Self], tol: f64) -> usize {
        if rows == 0 || cols == 0 {
            return 0;
        }
        let m = nalgebra::DMatrix::from_row_slice(rows, cols, data);
        let sv = m.singular_values();
        let largest = sv.iter().cloned().fold(0.0, f64::max);
        if largest == 0.0 {
            return 0;
        }
        sv.iter().filter(|s| **s > tol * largest).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn rational_sqrt_only_for_perfect_squares() {
        assert_eq!(q(9, 4).sqrt_exact(), Some(q(3, 2)));
        assert_eq!(q(2, 1).sqrt_exact(), None);
        assert_eq!(q(-1, 1).sqrt_exact(), None);
    }

    #[test]
    fn certificates_are_lowest_terms() {
        assert_eq!(q(4, -6).certificate(), "-2/3");
        assert_eq!(q(20, 1).certificate(), "20/1");
    }

    #[test]
    fn transcendentals_rejected_in_exact_mode() {
        assert_eq!(
            q(1, 2).apply(Elementary::Sin),
            Err(Error::TranscendentalInExactMode("sin"))
        );
    }

    #[test]
    fn division_by_zero_is_an_error() {
        assert_eq!(Ring::recip(&Rational::zero()), Err(Error::DivisionByZero));
        assert_eq!(Ring::recip(&0.0f64), Err(Error::DivisionByZero));
    }

    #[test]
    fn float_derivatives_match_finite_differences() {
        let h = 1e-5;
        for f in Elementary::ALL {
            let x = 0.7;
            let d = f64_derivatives(f, x, 3).unwrap();
            for k in 0..3 {
                let plus = f64_derivatives(f, x + h, k).unwrap()[k];
                let minus = f64_derivatives(f, x - h, k).unwrap()[k];
                let fd = (plus - minus) / (2.0 * h);
                assert!(
                    (fd - d[k + 1]).abs() < 1e-6 * (1.0 + fd.abs()),
                    "{f} order {k}"
                );
            }
        }
    }

    #[test]
    fn log_domain() {
        assert!(matches!(
            0.0f64.apply(Elementary::Log),
            Err(Error::Domain { func: "log", .. })
        ));
        assert!(matches!(
            (-1.0f64).apply(Elementary::Sqrt),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn exact_rank() {
        let d = [1, 2, 2, 4].map(|v| q(v, 1));
        assert_eq!(Rational::matrix_rank(2, 2, &d, 0.0), 1);
        let d = [1, 0, 0, 0, 1, 0].map(|v| q(v, 1));
        assert_eq!(Rational::matrix_rank(2, 3, &d, 0.0), 2);
        assert_eq!(f64::matrix_rank(2, 2, &[1.0, 2.0, 2.0, 4.0], 1e-9), 1);
    }

    #[test]
    fn integer_powers() {
        assert_eq!(q(2, 3).powi(3).unwrap(), q(8, 27));
        assert_eq!(q(2, 3).powi(-2).unwrap(), q(9, 4));
        assert_eq!(Rational::zero().powi(-1), Err(Error::DivisionByZero));
    }
}
