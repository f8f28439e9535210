use crate::error::{Error, Result};
use crate::scalar::{Ring, Scalar};
use crate::weil::{assert_same_dim, impl_weil_ring, WeilAlgebra};

/// Element of `R[e_1..e_k]/(e_1^2, .., e_k^2)`, the algebra of `D x .. x D`.
///
/// Coefficient `coeffs[mask]` multiplies the monomial `prod_{i in mask} e_i`.
/// Identities that are multilinear in `k` independent first-order
/// displacements hold in this algebra iff the top coefficient matches.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiDual<T> {
    pub coeffs: Vec<T>,
}

impl<T: Ring> MultiDual<T> {
    pub fn constant(value: T, generators: usize) -> Self {
        let zero = value.zero_like();
        let mut coeffs = vec![zero; 1 << generators];
        coeffs[0] = value;
        Self { coeffs }
    }

    /// `value + e_index`.
    pub fn variable(value: T, index: usize, generators: usize) -> Self {
        let mut out = Self::constant(value, generators);
        out.coeffs[1 << index] = out.coeffs[0].one_like();
        out
    }

    pub fn generators(&self) -> usize {
        self.coeffs.len().trailing_zeros() as usize
    }

    /// Coefficient of `prod_{i in mask} e_i`.
    pub fn coeff(&self, mask: usize) -> &T {
        &self.coeffs[mask]
    }

    pub fn try_mul(&self, rhs: &Self) -> Result<Self> {
        if self.generators() != rhs.generators() {
            return Err(Error::DimensionMismatch {
                expected: self.generators(),
                found: rhs.generators(),
            });
        }
        Ok(self.times(rhs))
    }

    fn plus(&self, rhs: &Self) -> Self {
        assert_same_dim(self.generators(), rhs.generators());
        Self {
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    fn minus(&self, rhs: &Self) -> Self {
        assert_same_dim(self.generators(), rhs.generators());
        Self {
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a.sub(b))
                .collect(),
        }
    }

    fn times(&self, rhs: &Self) -> Self {
        assert_same_dim(self.generators(), rhs.generators());
        let len = self.coeffs.len();
        let mut coeffs = vec![self.coeffs[0].zero_like(); len];
        for a in 0..len {
            if self.coeffs[a].is_zero() {
                continue;
            }
            // iterate over submasks b of the complement of a
            let free = (len - 1) & !a;
            let mut b = free;
            loop {
                coeffs[a | b] = coeffs[a | b].add(&self.coeffs[a].mul(&rhs.coeffs[b]));
                if b == 0 {
                    break;
                }
                b = (b - 1) & free;
            }
        }
        Self { coeffs }
    }

    fn negate(&self) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(Ring::neg).collect(),
        }
    }

    fn scaled(&self, c: &T::Base) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|v| v.scale(c)).collect(),
        }
    }

    fn shape_eq(&self, other: &Self) -> bool {
        self.coeffs.len() == other.coeffs.len()
    }

    fn coefficients(&self) -> impl Iterator<Item = &T> {
        self.coeffs.iter()
    }
}

impl<S: Scalar> MultiDual<S> {
    pub fn from_scalar(value: S, generators: usize) -> Self {
        Self::constant(value, generators)
    }
}

impl<T: Ring> WeilAlgebra for MultiDual<T> {
    type Inner = T;

    fn nilpotency(&self) -> usize {
        self.generators()
    }
    fn value(&self) -> &T {
        &self.coeffs[0]
    }
    fn embed(&self, v: T) -> Self {
        Self::constant(v, self.generators())
    }
    fn nilpotent_part(&self) -> Self {
        let mut out = self.clone();
        out.coeffs[0] = out.coeffs[0].zero_like();
        out
    }
}

impl_weil_ring!(MultiDual);
