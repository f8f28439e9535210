use crate::error::{Error, Result};
use crate::scalar::{Rational, Ring, Scalar};
use crate::weil::{assert_same_dim, impl_weil_ring, Lap, WeilAlgebra};

/// Element `value + grad . delta + 1/2 delta^T hess delta` of `R[delta]/m^3`.
///
/// `hess` is the symmetric `n x n` matrix in row-major order.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet2<T> {
    pub value: T,
    pub grad: Vec<T>,
    pub hess: Vec<T>,
}

impl<T: Ring> Jet2<T> {
    pub fn new(value: T, grad: Vec<T>, hess: Vec<T>) -> Result<Self> {
        let n = grad.len();
        if hess.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: hess.len(),
            });
        }
        for i in 0..n {
            for j in 0..i {
                if hess[i * n + j] != hess[j * n + i] {
                    return Err(Error::NotSymmetric);
                }
            }
        }
        Ok(Self { value, grad, hess })
    }

    pub fn constant(value: T, n: usize) -> Self {
        let zero = value.zero_like();
        Self {
            value,
            grad: vec![zero.clone(); n],
            hess: vec![zero; n * n],
        }
    }

    pub fn variable(value: T, index: usize, n: usize) -> Self {
        let mut out = Self::constant(value, n);
        out.grad[index] = out.value.one_like();
        out
    }

    pub fn dim(&self) -> usize {
        self.grad.len()
    }

    pub fn hess_at(&self, i: usize, j: usize) -> &T {
        &self.hess[i * self.dim() + j]
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
            hess: self
                .hess
                .iter()
                .zip(&rhs.hess)
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
            hess: self
                .hess
                .iter()
                .zip(&rhs.hess)
                .map(|(a, b)| a.sub(b))
                .collect(),
        }
    }

    fn times(&self, rhs: &Self) -> Self {
        assert_same_dim(self.dim(), rhs.dim());
        let n = self.dim();
        let (v1, v2) = (&self.value, &rhs.value);
        let (g1, g2) = (&self.grad, &rhs.grad);
        let mut hess = vec![v1.zero_like(); n * n];
        // both Hessians are symmetric, so fill the upper triangle and mirror it
        for i in 0..n {
            for j in i..n {
                let k = i * n + j;
                let cross = g1[i].mul(&g2[j]).add(&g2[i].mul(&g1[j]));
                let h = v1.mul(&rhs.hess[k]).add(&v2.mul(&self.hess[k])).add(&cross);
                if i != j {
                    hess[j * n + i] = h.clone();
                }
                hess[k] = h;
            }
        }
        Self {
            value: v1.mul(v2),
            grad: g1
                .iter()
                .zip(g2)
                .map(|(a, b)| v1.mul(b).add(&v2.mul(a)))
                .collect(),
            hess,
        }
    }

    fn negate(&self) -> Self {
        Self {
            value: self.value.neg(),
            grad: self.grad.iter().map(Ring::neg).collect(),
            hess: self.hess.iter().map(Ring::neg).collect(),
        }
    }

    fn scaled(&self, c: &T::Base) -> Self {
        Self {
            value: self.value.scale(c),
            grad: self.grad.iter().map(|g| g.scale(c)).collect(),
            hess: self.hess.iter().map(|h| h.scale(c)).collect(),
        }
    }

    fn shape_eq(&self, other: &Self) -> bool {
        self.dim() == other.dim()
    }

    fn coefficients(&self) -> impl Iterator<Item = &T> {
        std::iter::once(&self.value)
            .chain(&self.grad)
            .chain(&self.hess)
    }
}

impl<S: Scalar> Jet2<S> {
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

impl<T: Ring> WeilAlgebra for Jet2<T> {
    type Inner = T;

    fn nilpotency(&self) -> usize {
        2
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
            ..self.clone()
        }
    }
}

impl_weil_ring!(Jet2);

/// Restriction of a function on the second neighbourhood to the Laplace
/// neighbourhood: `(value, grad, hess) -> (value, grad, trace(hess)/2)`.
///
/// This is the quotient ring homomorphism `R[x]/m^3 -> R[x]/I_L`.
pub fn jet2_to_lap<T: Ring>(a: &Jet2<T>) -> Result<Lap<T>> {
    let n = a.dim();
    if n < 2 {
        return Err(Error::InvalidDimension {
            dim: n,
            reason: "the Laplace algebra needs at least two generators",
        });
    }
    let half = T::Base::from_rational(&Rational::new(1.into(), 2.into()));
    let trace = (0..n).fold(a.value.zero_like(), |acc, i| acc.add(a.hess_at(i, i)));
    Lap::new(a.value.clone(), a.grad.clone(), trace.scale(&half))
}
