use crate::error::{Error, Result};
use crate::scalar::{Ring, Scalar};
use crate::weil::{assert_same_dim, impl_weil_ring, WeilAlgebra};

/// Element `value + grad . x + sigma * (x_1^2 + .. + x_n^2)` of the Laplace
/// algebra `R[x_1..x_n]/I_L`, `n >= 2`.
///
/// Multiplication realizes `x_i x_j = 0` for `i != j`, `x_i^2 = sigma`,
/// `x_i sigma = 0` and `sigma^2 = 0`, so the algebra has dimension `n + 2`.
#[derive(Clone, Debug, PartialEq)]
pub struct Lap<T> {
    pub value: T,
    pub grad: Vec<T>,
    pub sigma: T,
}

fn check_dim(n: usize) -> Result<()> {
    if n < 2 {
        Err(Error::InvalidDimension {
            dim: n,
            reason: "the Laplace algebra needs at least two generators",
        })
    } else {
        Ok(())
    }
}

impl<T: Ring> Lap<T> {
    pub fn new(value: T, grad: Vec<T>, sigma: T) -> Result<Self> {
        check_dim(grad.len())?;
        Ok(Self { value, grad, sigma })
    }

    pub fn constant(value: T, n: usize) -> Result<Self> {
        check_dim(n)?;
        let zero = value.zero_like();
        Ok(Self {
            value,
            grad: vec![zero.clone(); n],
            sigma: zero,
        })
    }

    /// The generator `x_index` with coefficients shaped like `like`.
    pub fn generator_like(index: usize, n: usize, like: &T) -> Result<Self> {
        let mut out = Self::constant(like.zero_like(), n)?;
        out.grad[index] = like.one_like();
        Ok(out)
    }

    /// The basis element `sigma`.
    pub fn sigma_like(n: usize, like: &T) -> Result<Self> {
        let mut out = Self::constant(like.zero_like(), n)?;
        out.sigma = like.one_like();
        Ok(out)
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

    /// Whether the element is a multiple of `sigma` (value and linear part vanish).
    pub fn is_pure_sigma(&self) -> bool {
        self.value.is_zero() && self.grad.iter().all(Ring::is_zero)
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
            sigma: self.sigma.add(&rhs.sigma),
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
            sigma: self.sigma.sub(&rhs.sigma),
        }
    }

    fn times(&self, rhs: &Self) -> Self {
        assert_same_dim(self.dim(), rhs.dim());
        let (v1, v2) = (&self.value, &rhs.value);
        let dot = self
            .grad
            .iter()
            .zip(&rhs.grad)
            .fold(v1.zero_like(), |acc, (a, b)| acc.add(&a.mul(b)));
        Self {
            value: v1.mul(v2),
            grad: self
                .grad
                .iter()
                .zip(&rhs.grad)
                .map(|(a, b)| v1.mul(b).add(&v2.mul(a)))
                .collect(),
            sigma: v1.mul(&rhs.sigma).add(&v2.mul(&self.sigma)).add(&dot),
        }
    }

    fn negate(&self) -> Self {
        Self {
            value: self.value.neg(),
            grad: self.grad.iter().map(Ring::neg).collect(),
            sigma: self.sigma.neg(),
        }
    }

    fn scaled(&self, c: &T::Base) -> Self {
        Self {
            value: self.value.scale(c),
            grad: self.grad.iter().map(|g| g.scale(c)).collect(),
            sigma: self.sigma.scale(c),
        }
    }

    fn shape_eq(&self, other: &Self) -> bool {
        self.dim() == other.dim()
    }

    fn coefficients(&self) -> impl Iterator<Item = &T> {
        std::iter::once(&self.value)
            .chain(&self.grad)
            .chain(std::iter::once(&self.sigma))
    }
}

impl<S: Scalar> Lap<S> {
    pub fn generator(index: usize, n: usize) -> Result<Self> {
        Self::generator_like(index, n, &S::zero())
    }

    pub fn sigma(n: usize) -> Result<Self> {
        Self::sigma_like(n, &S::zero())
    }

    /// The `n + 2` basis elements `1, x_1, .., x_n, sigma`.
    pub fn basis(n: usize) -> Result<Vec<Self>> {
        let mut out = vec![Self::constant(S::one(), n)?];
        for i in 0..n {
            out.push(Self::generator(i, n)?);
        }
        out.push(Self::sigma(n)?);
        Ok(out)
    }

    /// Coordinates in the basis returned by [`Lap::basis`].
    pub fn coordinates(&self) -> Vec<S> {
        self.coefficients().cloned().collect()
    }
}

impl<T: Ring> WeilAlgebra for Lap<T> {
    type Inner = T;

    fn nilpotency(&self) -> usize {
        2
    }
    fn value(&self) -> &T {
        &self.value
    }
    fn embed(&self, v: T) -> Self {
        let zero = v.zero_like();
        Self {
            value: v,
            grad: vec![zero.clone(); self.dim()],
            sigma: zero,
        }
    }
    fn nilpotent_part(&self) -> Self {
        Self {
            value: self.value.zero_like(),
            ..self.clone()
        }
    }
}

impl_weil_ring!(Lap);

/// Product in the Laplace algebra, checking dimensions.
pub fn lap_mul<T: Ring>(a: &Lap<T>, b: &Lap<T>) -> Result<Lap<T>> {
    a.try_mul(b)
}
