use crate::error::{Error, Result};
use crate::scalar::{Ring, Scalar};
use crate::weil::{assert_same_dim, impl_weil_ring, WeilAlgebra};

/// Element `value + grad . delta` of `R[delta_1..delta_n]/m^2` (dual numbers).
#[derive(Clone, Debug, PartialEq)]
pub struct Jet1<T> {
    pub value: T,
    pub grad: Vec<T>,
}

impl<T: Ring> Jet1<T> {
    pub fn new(value: T, grad: Vec<T>) -> Self {
        Self { value, grad }
    }

    pub fn constant(value: T, n: usize) -> Self {
        let zero = value.zero_like();
        Self {
            value,
            grad: vec![zero; n],
        }
    }

    /// The point coordinate `value + delta_index`.
    pub fn variable(value: T, index: usize, n: usize) -> Self {
        let mut out = Self::constant(value, n);
        out.grad[index] = out.value.one_like();
        out
    }

    pub fn dim(&self) -> usize {
        self.grad.len()
    }

    pub fn try_mul(&self, rhs: &Self) -> Result<Self> {
        if self.dim() != rhs.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: rhs.dim(),
            });
        }
        Ok(self.times(rhs))
    }

    fn plus(&self, rhs: &Self) -> Self {
        assert_same_dim(self.dim(), rhs.dim());
        Self {
            value: self.value.add(&rhs.value),
            grad: self
                .grad
                .iter()
                .zip(&rhs.grad)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    fn minus(&self, rhs: &Self) -> Self {
        assert_same_dim(self.dim(), rhs.dim());
        Self {
            value: self.value.sub(&rhs.value),
            grad: self
                .grad
                .iter()
                .zip(&rhs.grad)
                .map(|(a, b)| a.sub(b))
                .collect(),
        }
    }

    fn times(&self, rhs: &Self) -> Self {
        assert_same_dim(self.dim(), rhs.dim());
        Self {
            value: self.value.mul(&rhs.value),
            grad: self
                .grad
                .iter()
                .zip(&rhs.grad)
                .map(|(a, b)| self.value.mul(b).add(&rhs.value.mul(a)))
                .collect(),
        }
    }

    fn negate(&self) -> Self {
        Self {
            value: self.value.neg(),
            grad: self.grad.iter().map(Ring::neg).collect(),
        }
    }

    fn scaled(&self, c: &T::Base) -> Self {
        Self {
            value: self.value.scale(c),
            grad: self.grad.iter().map(|g| g.scale(c)).collect(),
        }
    }

    fn shape_eq(&self, other: &Self) -> bool {
        self.dim() == other.dim()
    }

    fn coefficients(&self) -> impl Iterator<Item = &T> {
        std::iter::once(&self.value).chain(&self.grad)
    }
}

impl<S: Scalar> Jet1<S> {
    /// Jets of the coordinate functions at `point`.
    pub fn seed(point: &[S]) -> Vec<Self> {
        let n = point.len();
        point
            .iter()
            .enumerate()
            .map(|(i, x)| Self::variable(x.clone(), i, n))
            .collect()
    }
}

impl<T: Ring> WeilAlgebra for Jet1<T> {
    type Inner = T;

    fn nilpotency(&self) -> usize {
        1
    }
    fn value(&self) -> &T {
        &self.value
    }
    fn embed(&self, v: T) -> Self {
        Self::constant(v, self.dim())
    }
    fn nilpotent_part(&self) -> Self {
        Self {
            value: self.value.zero_like(),
            grad: self.grad.clone(),
        }
    }
}

impl_weil_ring!(Jet1);
