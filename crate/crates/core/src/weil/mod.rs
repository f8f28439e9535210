//! Finite-dimensional Weil algebras.
//!
//! * [`Jet1`]: `R[x_1..x_n]/m^2`, first-order neighbourhood.
//! * [`Jet2`]: `R[x_1..x_n]/m^3`, second-order neighbourhood.
//! * [`Lap`]: `R[x_1..x_n]/(x_i^2 - x_j^2, x_i x_j)`, the Laplace neighbourhood
//!   with basis `1, x_1..x_n, sigma` where `sigma` is the class of `x_1^2+..+x_n^2`.
//! * [`MultiDual`]: `R[e_1..e_k]/(e_1^2..e_k^2)`, used to test multilinear identities.
//!
//! All of them are generic over their coefficient ring, so they can be nested.
//! Elementary functions are lifted by Taylor expansion, which is exact because
//! the nilpotent part of every element is nilpotent of bounded order.

mod jet1;
mod jet2;
mod lap;
mod multidual;

pub use jet1::Jet1;
pub use jet2::{jet2_to_lap, Jet2};
pub use lap::{lap_mul, Lap};
pub use multidual::MultiDual;

use crate::error::Result;
use crate::scalar::{inv_factorial, Elementary, Ring};

/// A local algebra `Inner ⊕ nilpotents`.
pub trait WeilAlgebra: Ring {
    type Inner: Ring<Base = Self::Base>;

    /// Largest `k` such that `nu^k` can be nonzero for a nilpotent `nu`.
    fn nilpotency(&self) -> usize;

    fn value(&self) -> &Self::Inner;

    /// The constant element `v` of the same shape as `self`.
    fn embed(&self, v: Self::Inner) -> Self;

    /// `self - value`.
    fn nilpotent_part(&self) -> Self;
}

pub(crate) fn weil_recip<A: WeilAlgebra>(a: &A) -> Result<A> {
    // (c + nu)^-1 = c^-1 * sum_k (-nu/c)^k, finite by nilpotency.
    let inv = a.embed(a.value().recip()?);
    let ratio = a.nilpotent_part().mul(&inv).neg();
    let mut sum = a.one_like();
    let mut term = a.one_like();
    for _ in 0..a.nilpotency() {
        term = term.mul(&ratio);
        sum = sum.add(&term);
    }
    Ok(sum.mul(&inv))
}

pub(crate) fn weil_derivatives<A: WeilAlgebra>(
    a: &A,
    f: Elementary,
    order: usize,
) -> Result<Vec<A>> {
    let depth = a.nilpotency();
    let inner = a.value().elementary_derivatives(f, order + depth)?;
    let nu = a.nilpotent_part();
    let mut powers = vec![a.one_like()];
    for j in 1..=depth {
        powers.push(powers[j - 1].mul(&nu));
    }
    Ok((0..=order)
        .map(|k| {
            powers
                .iter()
                .enumerate()
                .fold(a.zero_like(), |acc, (j, p)| {
                    let coeff = a.embed(inner[k + j].clone()).scale(&inv_factorial(j));
                    acc.add(&coeff.mul(p))
                })
        })
        .collect())
}

/// `Ring` impl plus `std::ops` operators for an algebra type that implements
/// `WeilAlgebra` and inherent `plus`, `minus`, `times`, `negate`, `scaled`,
/// `shape_eq`, `coefficients` methods.
macro_rules! impl_weil_ring {
    ($ty:ident) => {
        impl<T: $crate::scalar::Ring> $crate::scalar::Ring for $ty<T> {
            type Base = T::Base;

            fn constant_like(&self, c: T::Base) -> Self {
                $crate::weil::WeilAlgebra::embed(
                    self,
                    $crate::weil::WeilAlgebra::value(self).constant_like(c),
                )
            }
            fn add(&self, rhs: &Self) -> Self {
                self.plus(rhs)
            }
            fn sub(&self, rhs: &Self) -> Self {
                self.minus(rhs)
            }
            fn mul(&self, rhs: &Self) -> Self {
                self.times(rhs)
            }
            fn neg(&self) -> Self {
                self.negate()
            }
            fn scale(&self, c: &T::Base) -> Self {
                self.scaled(c)
            }
            fn base_value(&self) -> T::Base {
                $crate::weil::WeilAlgebra::value(self).base_value()
            }
            fn is_zero(&self) -> bool {
                self.coefficients().all(|c| c.is_zero())
            }
            fn magnitude(&self) -> f64 {
                self.coefficients()
                    .map(|c| c.magnitude())
                    .fold(0.0, f64::max)
            }
            fn compatible(&self, other: &Self) -> bool {
                self.shape_eq(other)
                    && $crate::weil::WeilAlgebra::value(self)
                        .compatible($crate::weil::WeilAlgebra::value(other))
            }
            fn recip(&self) -> $crate::error::Result<Self> {
                $crate::weil::weil_recip(self)
            }
            fn elementary_derivatives(
                &self,
                f: $crate::scalar::Elementary,
                order: usize,
            ) -> $crate::error::Result<Vec<Self>> {
                $crate::weil::weil_derivatives(self, f, order)
            }
        }

        impl<T: $crate::scalar::Ring> std::ops::Add for &$ty<T> {
            type Output = $ty<T>;
            fn add(self, rhs: Self) -> $ty<T> {
                self.plus(rhs)
            }
        }

        impl<T: $crate::scalar::Ring> std::ops::Sub for &$ty<T> {
            type Output = $ty<T>;
            fn sub(self, rhs: Self) -> $ty<T> {
                self.minus(rhs)
            }
        }

        impl<T: $crate::scalar::Ring> std::ops::Mul for &$ty<T> {
            type Output = $ty<T>;
            fn mul(self, rhs: Self) -> $ty<T> {
                self.times(rhs)
            }
        }

        impl<T: $crate::scalar::Ring> std::ops::Neg for &$ty<T> {
            type Output = $ty<T>;
            fn neg(self) -> $ty<T> {
                self.negate()
            }
        }
    };
}

pub(crate) use impl_weil_ring;

/// Panics with a uniform message on mismatched algebra dimensions.
#[track_caller]
pub(crate) fn assert_same_dim(a: usize, b: usize) {
    assert_eq!(a, b, "algebra dimension mismatch ({a} vs {b})");
}
