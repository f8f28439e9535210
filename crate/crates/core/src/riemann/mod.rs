//! Riemannian charts: metrics, the Levi-Civita connection in bilinear form,
//! second-order exp/log, mirror images, the Laplacian and harmonic 2-jets.

mod checks;
mod connection;
mod jets;
mod laplace;

pub use checks::{
    first_order_mirror_defect, lsmall_symmetry_evidence, verify_levicivita, LeviCivitaReport,
};
pub use connection::{christoffel, GammaData, SignConvention};
pub use jets::{
    harmonic_jet_basis, is_harmonic_jet, jet_on_lneighbour, HarmonicCertificate, Jet2Scalar,
    LabeledJet,
};
pub(crate) use laplace::by_carrier;
pub use laplace::{
    laplace_beltrami_oracle, laplacian, second_difference, LProbe, ProbeCarrier, ProbeParts,
};

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::innerprod::InnerProduct;
use crate::linalg::Matrix;
use crate::scalar::{Ring, Scalar};

/// Metric tensor on a single chart, given by its upper triangle.
#[derive(Clone, Debug, PartialEq)]
pub struct Metric {
    coords: Vec<String>,
    /// Row-major upper triangle: (0,0), (0,1), .., (0,n-1), (1,1), ..
    entries: Vec<Expr>,
}

pub(crate) fn check_coords(coords: &[String]) -> Result<()> {
    if coords.is_empty() {
        return Err(Error::InvalidDimension {
            dim: 0,
            reason: "a chart needs at least one coordinate",
        });
    }
    for (i, c) in coords.iter().enumerate() {
        if coords[..i].contains(c) {
            return Err(Error::DuplicateCoordinate(c.clone()));
        }
    }
    Ok(())
}

fn upper_index(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * n - i * (i + 1) / 2 + j
}

impl Metric {
    /// `upper` lists the entries `g_ij`, `i <= j`, row by row.
    pub fn new(coords: &[impl AsRef<str>], upper: &[impl AsRef<str>]) -> Result<Self> {
        let coords: Vec<String> = coords.iter().map(|c| c.as_ref().to_string()).collect();
        check_coords(&coords)?;
        let n = coords.len();
        if upper.len() != n * (n + 1) / 2 {
            return Err(Error::DimensionMismatch {
                expected: n * (n + 1) / 2,
                found: upper.len(),
            });
        }
        let entries = upper
            .iter()
            .map(|e| Expr::parse(e.as_ref(), &coords))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { coords, entries })
    }

    pub fn flat(coords: &[impl AsRef<str>]) -> Result<Self> {
        Self::conformal(coords, "1")
    }

    /// `factor * Identity`.
    pub fn conformal(coords: &[impl AsRef<str>], factor: &str) -> Result<Self> {
        let n = coords.len();
        let upper: Vec<&str> = (0..n)
            .flat_map(|i| (i..n).map(move |j| if i == j { factor } else { "0" }))
            .collect();
        Self::new(coords, &upper)
    }

    pub fn diagonal(coords: &[impl AsRef<str>], diag: &[&str]) -> Result<Self> {
        let n = coords.len();
        if diag.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: diag.len(),
            });
        }
        let upper: Vec<&str> = (0..n)
            .flat_map(|i| (i..n).map(move |j| if i == j { diag[i] } else { "0" }))
            .collect();
        Self::new(coords, &upper)
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[String] {
        &self.coords
    }

    pub fn entry(&self, i: usize, j: usize) -> &Expr {
        &self.entries[upper_index(self.dim(), i, j)]
    }

    /// The Gram matrix `G(p)` at a point whose coordinates may be infinitesimal.
    pub fn gram_at<E: Ring>(&self, point: &[E]) -> Result<Matrix<E>> {
        let n = self.dim();
        if point.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: point.len(),
            });
        }
        let upper = self
            .entries
            .iter()
            .map(|e| e.eval(point))
            .collect::<Result<Vec<_>>>()?;
        Ok(Matrix::from_fn(n, n, |i, j| {
            upper[upper_index(n, i, j)].clone()
        }))
    }

    pub fn inner_product_at<S: Scalar>(&self, x: &[S]) -> Result<InnerProduct<S>> {
        InnerProduct::new(self.gram_at(x)?)
    }

    /// Square distance `g(p, q) = G(p; q - p, q - p)`.
    pub fn square_distance<E: Ring>(&self, p: &[E], q: &[E]) -> Result<E> {
        let d: Vec<E> = q.iter().zip(p).map(|(a, b)| a.sub(b)).collect();
        self.gram_at(p)?.bilinear(&d, &d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    #[test]
    fn upper_triangle_layout() {
        let g = Metric::new(&["x", "y", "z"], &["1", "2", "3", "4", "5", "6"]).unwrap();
        let m = g.gram_at(&vec![Rational::from_i64(0); 3]).unwrap();
        assert_eq!(
            m,
            Matrix::from_i64_rows(&[&[1, 2, 3], &[2, 4, 5], &[3, 5, 6]])
        );
    }

    #[test]
    fn wrong_entry_count() {
        assert_eq!(
            Metric::new(&["x", "y"], &["1", "0"]),
            Err(Error::DimensionMismatch {
                expected: 3,
                found: 2
            })
        );
        assert_eq!(
            Metric::flat(&["x", "x"]),
            Err(Error::DuplicateCoordinate("x".into()))
        );
    }

    #[test]
    fn non_spd_point_rejected() {
        let g = Metric::diagonal(&["x", "y"], &["x", "1"]).unwrap();
        let r = g.inner_product_at(&[Rational::from_i64(-1), Rational::from_i64(0)]);
        assert_eq!(r, Err(Error::NotPositiveDefinite { minor: 1 }));
    }
}
