use crate::error::{Error, Result};
use crate::innerprod::InnerProduct;
use crate::linalg::Matrix;
use crate::riemann::Metric;
use crate::scalar::{Ring, Scalar};
use crate::weil::Jet1;

/// Relation between the bilinear `Gamma(x; u, v)` and classical Christoffel symbols.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SignConvention {
    /// `Gamma(x; u, v)^k = -sum_ij Gamma^k_ij u^i v^j`.
    #[default]
    Standard,
    /// The opposite sign; only useful to watch the Levi-Civita check fail.
    Flipped,
}

/// Christoffel data of a metric at one point, with exp/log/mirror built on it.
///
/// The base point may itself have infinitesimal coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaData<E> {
    x: Vec<E>,
    gram: Matrix<E>,
    /// `symbols[k*n*n + i*n + j] = Gamma^k_ij`.
    symbols: Vec<E>,
    sign: SignConvention,
}

/// Classical symbols at a real point, after checking the metric is positive definite there.
pub fn christoffel<S: Scalar>(g: &Metric, x: &[S]) -> Result<GammaData<S>> {
    GammaData::at(g, x, SignConvention::Standard)
}

impl<E: Ring> GammaData<E> {
    pub fn at(g: &Metric, x: &[E], sign: SignConvention) -> Result<Self> {
        let n = g.dim();
        if x.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: x.len(),
            });
        }
        let seeds: Vec<Jet1<E>> = (0..n).map(|i| Jet1::variable(x[i].clone(), i, n)).collect();
        let jet_gram = g.gram_at(&seeds)?;
        let gram = jet_gram.map(|e| e.value.clone());
        InnerProduct::new(gram.map(Ring::base_value))?;
        let inv = gram.inverse()?;
        // d(l)[i][j] = d_l g_ij
        let d = |l: usize, i: usize, j: usize| &jet_gram.get(i, j).grad[l];
        let half = E::Base::from_ratio(1, 2);
        let mut symbols = Vec::with_capacity(n * n * n);
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut acc = x[0].zero_like();
                    for l in 0..n {
                        let t = d(i, j, l).add(d(j, i, l)).sub(d(l, i, j));
                        acc = acc.add(&inv.get(k, l).mul(&t));
                    }
                    symbols.push(acc.scale(&half));
                }
            }
        }
        Ok(Self {
            x: x.to_vec(),
            gram,
            symbols,
            sign,
        })
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    pub fn point(&self) -> &[E] {
        &self.x
    }

    /// `G(x)`.
    pub fn gram(&self) -> &Matrix<E> {
        &self.gram
    }

    pub fn sign(&self) -> SignConvention {
        self.sign
    }

    /// Classical `Gamma^k_ij`.
    pub fn symbol(&self, k: usize, i: usize, j: usize) -> &E {
        let n = self.dim();
        &self.symbols[k * n * n + i * n + j]
    }

    pub fn is_flat(&self) -> bool {
        self.symbols.iter().all(Ring::is_zero)
    }

    fn check(&self, v: &[E]) -> Result<()> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: v.len(),
            });
        }
        Ok(())
    }

    /// The bilinear form `Gamma(x; u, v)`.
    pub fn gamma(&self, u: &[E], v: &[E]) -> Result<Vec<E>> {
        self.check(u)?;
        self.check(v)?;
        let n = self.dim();
        Ok((0..n)
            .map(|k| {
                let mut acc = u[0].zero_like();
                for i in 0..n {
                    if u[i].is_zero() {
                        continue;
                    }
                    for j in 0..n {
                        acc = acc.add(&self.symbol(k, i, j).mul(&u[i]).mul(&v[j]));
                    }
                }
                match self.sign {
                    SignConvention::Standard => acc.neg(),
                    SignConvention::Flipped => acc,
                }
            })
            .collect())
    }

    fn displacement(&self, z: &[E]) -> Result<Vec<E>> {
        self.check(z)?;
        z.iter()
            .zip(&self.x)
            .enumerate()
            .map(|(coord, (a, b))| {
                let d = a.sub(b);
                if d.base_value().is_zero() {
                    Ok(d)
                } else {
                    Err(Error::NotNilpotent { coord })
                }
            })
            .collect()
    }

    fn offset(&self, parts: &[&[E]], coeffs: &[E::Base]) -> Vec<E> {
        (0..self.dim())
            .map(|k| {
                parts
                    .iter()
                    .zip(coeffs)
                    .fold(self.x[k].clone(), |acc, (p, c)| acc.add(&p[k].scale(c)))
            })
            .collect()
    }

    /// `nabla(x, y, z) = y - x + z + Gamma(x; y - x, z - x)`.
    pub fn nabla(&self, y: &[E], z: &[E]) -> Result<Vec<E>> {
        let a = self.displacement(y)?;
        let b = self.displacement(z)?;
        let c = self.gamma(&a, &b)?;
        let one = E::Base::one();
        Ok(self.offset(&[&a, &b, &c], &[one.clone(), one.clone(), one]))
    }

    /// `exp_x(u) = x + u + Gamma(x; u, u)/2`.
    pub fn exp2(&self, u: &[E]) -> Result<Vec<E>> {
        self.check(u)?;
        let c = self.gamma(u, u)?;
        Ok(self.offset(&[u, &c], &[E::Base::one(), E::Base::from_ratio(1, 2)]))
    }

    /// `log_x(x + u) = u - Gamma(x; u, u)/2`.
    pub fn log2(&self, z: &[E]) -> Result<Vec<E>> {
        let u = self.displacement(z)?;
        let c = self.gamma(&u, &u)?;
        let half = E::Base::from_ratio(1, 2);
        Ok(u.iter()
            .zip(&c)
            .map(|(a, b)| a.sub(&b.scale(&half)))
            .collect())
    }

    /// `z' = x - u + Gamma(x; u, u)` for `z = x + u`.
    pub fn mirror(&self, z: &[E]) -> Result<Vec<E>> {
        let u = self.displacement(z)?;
        let c = self.gamma(&u, &u)?;
        Ok(self.offset(&[&u, &c], &[E::Base::one().neg(), E::Base::one()]))
    }

    /// `z' = exp_x(-log_x z)`.
    pub fn mirror_by_definition(&self, z: &[E]) -> Result<Vec<E>> {
        let v: Vec<E> = self.log2(z)?.iter().map(Ring::neg).collect();
        self.exp2(&v)
    }
}

impl<S: Scalar> GammaData<S> {
    /// The same data with every coefficient embedded in the algebra of `like`.
    pub fn lift<A: Ring<Base = S>>(&self, like: &A) -> GammaData<A> {
        let embed = |v: &S| like.constant_like(v.clone());
        GammaData {
            x: self.x.iter().map(embed).collect(),
            gram: self.gram.lift(like),
            symbols: self.symbols.iter().map(embed).collect(),
            sign: self.sign,
        }
    }

    pub fn with_sign(mut self, sign: SignConvention) -> Self {
        self.sign = sign;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use crate::weil::Jet2;

    fn q(n: i64) -> Rational {
        Rational::from_i64(n)
    }

    fn hyperbolic() -> Metric {
        Metric::diagonal(&["x", "y"], &["1/y^2", "1/y^2"]).unwrap()
    }

    #[test]
    fn flat_symbols_vanish() {
        let g = Metric::flat(&["x", "y"]).unwrap();
        assert!(christoffel(&g, &[q(3), q(-2)]).unwrap().is_flat());
    }

    #[test]
    fn hyperbolic_symbols() {
        let gd = christoffel(&hyperbolic(), &[q(0), q(1)]).unwrap();
        for k in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    let expected = match (k, i, j) {
                        (0, 0, 1) | (0, 1, 0) => -1,
                        (1, 0, 0) => 1,
                        (1, 1, 1) => -1,
                        _ => 0,
                    };
                    assert_eq!(*gd.symbol(k, i, j), q(expected), "Gamma^{k}_{i}{j}");
                }
            }
        }
    }

    #[test]
    fn sphere_chart_flat_at_origin() {
        let g = Metric::conformal(&["x", "y"], "4/(1 + x^2 + y^2)^2").unwrap();
        assert!(christoffel(&g, &[q(0), q(0)]).unwrap().is_flat());
        assert!(!christoffel(&g, &[q(1), q(0)]).unwrap().is_flat());
    }

    fn generic_displacement(x: &[Rational]) -> Vec<Jet2<Rational>> {
        let seeds = Jet2::seed(x);
        seeds
            .iter()
            .zip(x)
            .map(|(s, c)| s.sub(&s.constant_like(c.clone())))
            .collect()
    }

    #[test]
    fn exp_log_inverse_and_mirror() {
        let x = [q(1), q(2)];
        let gd = christoffel(&hyperbolic(), &x).unwrap();
        let u = generic_displacement(&x);
        let l = gd.lift(&u[0]);
        let z = l.exp2(&u).unwrap();
        assert_eq!(l.log2(&z).unwrap(), u);
        let w: Vec<_> = z.clone();
        assert_eq!(l.exp2(&l.log2(&w).unwrap()).unwrap(), w);
        let zm = l.mirror(&z).unwrap();
        assert_eq!(zm, l.mirror_by_definition(&z).unwrap());
        assert_eq!(l.mirror(&zm).unwrap(), z);
    }

    #[test]
    fn nabla_axioms() {
        let x = [q(1), q(2)];
        let gd = christoffel(&hyperbolic(), &x).unwrap();
        let d = generic_displacement(&x);
        let l = gd.lift(&d[0]);
        let y = l.exp2(&[d[0].clone(), d[0].zero_like()]).unwrap();
        let z = l.exp2(&[d[1].zero_like(), d[1].clone()]).unwrap();
        let xs = l.point().to_vec();
        assert_eq!(l.nabla(&xs, &z).unwrap(), z);
        assert_eq!(l.nabla(&y, &xs).unwrap(), y);
        assert_eq!(l.nabla(&y, &z).unwrap(), l.nabla(&z, &y).unwrap());
    }

    #[test]
    fn log_rejects_distant_point() {
        let gd = christoffel(&Metric::flat(&["x"]).unwrap(), &[q(0)]).unwrap();
        assert_eq!(gd.log2(&[q(1)]), Err(Error::NotNilpotent { coord: 0 }));
    }
}
