//! Inner-product spaces: orthonormal frames, L-small vectors, trace-zero
//! probes and semi-conformal linear maps.

use crate::error::{Error, Result};
use crate::linalg::{dot, Matrix};
use crate::scalar::{Ring, Scalar};
use crate::riemann::ProbeCarrier;
use crate::weil::Lap;

/// A symmetric positive-definite Gram matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct InnerProduct<S> {
    gram: Matrix<S>,
}

impl<S: Scalar> InnerProduct<S> {
    /// Validates symmetry and positive definiteness (via square-root free
    /// LDL^T pivots, so no Cholesky factor needs to exist in the field).
    pub fn new(gram: Matrix<S>) -> Result<Self> {
        if !gram.is_square() {
            return Err(Error::DimensionMismatch {
                expected: gram.rows(),
                found: gram.cols(),
            });
        }
        if !gram.is_symmetric() {
            return Err(Error::NotSymmetric);
        }
        ldl_pivots(&gram)?;
        Ok(Self { gram })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            gram: Matrix::identity(n),
        }
    }

    pub fn dim(&self) -> usize {
        self.gram.rows()
    }

    pub fn gram(&self) -> &Matrix<S> {
        &self.gram
    }

    /// `<a, b>` for vectors with coefficients in any algebra over `S`.
    pub fn inner<E: Ring<Base = S>>(&self, a: &[E], b: &[E]) -> Result<E> {
        let like = a.first().ok_or(Error::DimensionMismatch {
            expected: self.dim(),
            found: 0,
        })?;
        self.gram.lift(like).bilinear(a, b)
    }
}

fn ldl_pivots<S: Scalar>(gram: &Matrix<S>) -> Result<Vec<S>> {
    let n = gram.rows();
    let mut l = Matrix::<S>::identity(n);
    let mut d: Vec<S> = Vec::with_capacity(n);
    for j in 0..n {
        let mut dj = gram.get(j, j).clone();
        for k in 0..j {
            dj = dj.sub(&l.get(j, k).mul(l.get(j, k)).mul(&d[k]));
        }
        if !dj.is_positive() {
            return Err(Error::NotPositiveDefinite { minor: j + 1 });
        }
        for i in j + 1..n {
            let mut v = gram.get(i, j).clone();
            for k in 0..j {
                v = v.sub(&l.get(i, k).mul(l.get(j, k)).mul(&d[k]));
            }
            l.set(i, j, v.div(&dj)?);
        }
        d.push(dj);
    }
    Ok(d)
}

/// Upper-triangular `S` with positive diagonal and `S^T S = gram`.
///
/// In exact mode every pivot must be the square of a rational.
pub fn cholesky<S: Scalar>(ip: &InnerProduct<S>) -> Result<Matrix<S>> {
    cholesky_of(ip.gram())
}

fn cholesky_of<S: Scalar>(gram: &Matrix<S>) -> Result<Matrix<S>> {
    let n = gram.rows();
    let mut s = Matrix::<S>::zeros(n, n);
    for i in 0..n {
        let mut pivot = gram.get(i, i).clone();
        for k in 0..i {
            pivot = pivot.sub(&s.get(k, i).mul(s.get(k, i)));
        }
        if !pivot.is_positive() {
            return Err(Error::NotPositiveDefinite { minor: i + 1 });
        }
        let root = pivot.sqrt_exact().ok_or_else(|| Error::IrrationalSqrt {
            pivot: pivot.certificate(),
        })?;
        for j in i + 1..n {
            let mut v = gram.get(i, j).clone();
            for k in 0..i {
                v = v.sub(&s.get(k, i).mul(s.get(k, j)));
            }
            s.set(i, j, v.div(&root)?);
        }
        s.set(i, i, root);
    }
    Ok(s)
}

/// `F . generators` with `F = S^{-1}`: the generators read as coordinates in an
/// orthonormal frame, expressed in the original coordinates.
pub fn frame_probe<S: Scalar, E: Ring<Base = S>>(
    ip: &InnerProduct<S>,
    generators: &[E],
) -> Result<Vec<E>> {
    if generators.len() != ip.dim() {
        return Err(Error::DimensionMismatch {
            expected: ip.dim(),
            found: generators.len(),
        });
    }
    let frame = cholesky(ip)?.inverse()?;
    frame.lift(&generators[0]).mul_vec(generators)
}

/// The generic L-small vector `u = S^{-1} delta` with `delta` the generators of Lap(n).
pub fn lsmall_probe<S: Scalar>(ip: &InnerProduct<S>) -> Result<Vec<Lap<S>>> {
    let n = ip.dim();
    let gens = (0..n)
        .map(|i| Lap::generator(i, n))
        .collect::<Result<Vec<_>>>()?;
    frame_probe(ip, &gens)
}

fn basis_vector<E: Ring>(i: usize, n: usize, like: &E) -> Vec<E> {
    (0..n)
        .map(|k| {
            if k == i {
                like.one_like()
            } else {
                like.zero_like()
            }
        })
        .collect()
}

/// Residuals `<u,e_i><u,e_j> - (1/n)<u,u><e_i,e_j>` over all basis pairs `i <= j`.
///
/// The Gram matrix may itself have algebra-valued entries.
pub fn lsmall_defects<E: Ring>(u: &[E], gram: &Matrix<E>) -> Result<Vec<E>> {
    let n = u.len();
    if gram.rows() != n || gram.cols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: gram.rows(),
        });
    }
    let like = &u[0];
    let gu = gram.mul_vec(u)?;
    let uu = dot(u, &gu);
    let inv_n = E::Base::from_ratio(1, n as i64);
    let mut out = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        for j in i..n {
            let lhs = gu[i].mul(&gu[j]);
            let ei = basis_vector(i, n, like);
            let ej = basis_vector(j, n, like);
            let rhs = uu.mul(&gram.bilinear(&ei, &ej)?).scale(&inv_n);
            out.push(lhs.sub(&rhs));
        }
    }
    Ok(out)
}

/// Whether `u` satisfies the L-smallness identity for every pair of basis vectors.
pub fn is_lsmall<E: Ring>(u: &[E], gram: &Matrix<E>, tol: f64) -> Result<bool> {
    let scale = 1.0
        + u.iter().map(Ring::magnitude).fold(0.0, f64::max).powi(2)
            * gram.data().iter().map(Ring::magnitude).fold(0.0, f64::max);
    Ok(lsmall_defects(u, gram)?
        .iter()
        .all(|d| d.is_negligible(scale, tol)))
}

/// Coordinate form of L-smallness in an orthonormal frame: mixed products
/// vanish and all squares agree.
pub fn orthonormal_relations_hold<E: Ring>(w: &[E]) -> bool {
    let n = w.len();
    (0..n).all(|i| {
        (i + 1..n).all(|j| w[i].mul(&w[j]).is_zero()) && w[i].mul(&w[i]) == w[0].mul(&w[0])
    })
}

/// Residuals of the sum condition `<a,u><b,v> + <a,v><b,u> = (2/n)<a,b><u,v>`
/// over basis pairs `u = e_i`, `v = e_j`, `i <= j`.
pub fn sum_lsmall_defects<E: Ring>(a: &[E], b: &[E], gram: &Matrix<E>) -> Result<Vec<E>> {
    let n = gram.rows();
    if a.len() != n || b.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: a.len().min(b.len()),
        });
    }
    let ga = gram.mul_vec(a)?;
    let gb = gram.mul_vec(b)?;
    let ab = dot(a, &gb);
    let two_over_n = E::Base::from_ratio(2, n as i64);
    let mut out = Vec::new();
    for i in 0..n {
        for j in i..n {
            let lhs = ga[i].mul(&gb[j]).add(&ga[j].mul(&gb[i]));
            let rhs = ab.mul(gram.get(i, j)).scale(&two_over_n);
            out.push(lhs.sub(&rhs));
        }
    }
    Ok(out)
}

/// Whether `a + b` is L-small given that `a` and `b` are, tested symbolically.
pub fn sum_lsmall_condition<S: Scalar, E: Ring<Base = S>>(
    a: &[E],
    b: &[E],
    ip: &InnerProduct<S>,
) -> Result<bool> {
    let like = a.first().ok_or(Error::DimensionMismatch {
        expected: ip.dim(),
        found: 0,
    })?;
    Ok(sum_lsmall_defects(a, b, &ip.gram().lift(like))?
        .iter()
        .all(Ring::is_zero))
}

/// `E_ij + E_ji` for `i < j`, then `E_ii - E_{i+1,i+1}`.
pub fn tracezero_selfadjoint_basis<S: Scalar>(n: usize) -> Result<Vec<Matrix<S>>> {
    if n < 2 {
        return Err(Error::InvalidDimension {
            dim: n,
            reason: "trace-zero probes need n >= 2",
        });
    }
    let mut out = Vec::with_capacity(n * (n + 1) / 2 - 1);
    for i in 0..n {
        for j in i + 1..n {
            let mut m = Matrix::zeros(n, n);
            m.set(i, j, S::one());
            m.set(j, i, S::one());
            out.push(m);
        }
    }
    for i in 0..n - 1 {
        let mut m = Matrix::zeros(n, n);
        m.set(i, i, S::one());
        m.set(i + 1, i + 1, S::one().neg());
        out.push(m);
    }
    Ok(out)
}

/// Classification of a linear map between inner-product spaces.
#[derive(Clone, Debug, PartialEq)]
pub struct SemiConformalReport<S> {
    pub is_semiconformal: bool,
    /// The square dilation, present iff the map is semi-conformal.
    pub dilation: Option<S>,
    /// Largest of the row-norm spread and the off-diagonal row products.
    pub worst_defect: S,
}

fn check_full_row_rank<S: Scalar>(a: &Matrix<S>, tol: f64) -> Result<()> {
    let m = a.rows();
    let rank = a.rank(tol);
    if rank < m {
        return Err(Error::RankDeficient { rank, expected: m });
    }
    Ok(())
}

/// Tests whether `A` (m x n, full row rank) is semi-conformal from `dom` to `cod`.
///
/// Works with `B = S_cod A S_dom^{-1}`, the matrix in orthonormal frames.
pub fn semiconformal_matrix<S: Scalar>(
    a: &Matrix<S>,
    dom: &InnerProduct<S>,
    cod: &InnerProduct<S>,
    tol: f64,
) -> Result<SemiConformalReport<S>> {
    if a.cols() != dom.dim() {
        return Err(Error::DimensionMismatch {
            expected: dom.dim(),
            found: a.cols(),
        });
    }
    if a.rows() != cod.dim() {
        return Err(Error::DimensionMismatch {
            expected: cod.dim(),
            found: a.rows(),
        });
    }
    check_full_row_rank(a, tol)?;
    let b = cholesky(cod)?
        .try_mul(a)?
        .try_mul(&cholesky(dom)?.inverse()?)?;
    let m = b.rows();
    let norms: Vec<S> = (0..m).map(|i| dot(b.row(i), b.row(i))).collect();
    let mut max = norms[0].clone();
    let mut min = norms[0].clone();
    for v in &norms[1..] {
        if *v > max {
            max = v.clone();
        }
        if *v < min {
            min = v.clone();
        }
    }
    let mut worst = max.sub(&min);
    for i in 0..m {
        for j in i + 1..m {
            let off = dot(b.row(i), b.row(j)).abs();
            if off > worst {
                worst = off;
            }
        }
    }
    let ok = if S::EXACT {
        worst.is_zero()
    } else {
        worst.to_f64() <= tol * max.to_f64()
    };
    let dilation = ok.then(|| {
        norms
            .iter()
            .fold(S::zero(), |acc, v| acc.add(v))
            .mul(&S::from_ratio(1, m as i64))
    });
    Ok(SemiConformalReport {
        is_semiconformal: ok,
        dilation,
        worst_defect: worst,
    })
}

/// Whether `u -> A u + B(u, u)` maps the L-probe of `dom` to an L-small vector of `cod`.
///
/// `quadratic` holds one symmetric n x n matrix per codomain coordinate.
pub fn preserves_lsmall<S: Scalar>(
    a: &Matrix<S>,
    quadratic: Option<&[Matrix<S>]>,
    dom: &InnerProduct<S>,
    cod: &InnerProduct<S>,
) -> Result<bool> {
    check_full_row_rank(a, crate::scalar::DEFAULT_TOL)?;
    crate::riemann::by_carrier!(dom.dim(), S, preserves_lsmall_in(a, quadratic, dom, cod))
}

fn preserves_lsmall_in<P: ProbeCarrier>(
    a: &Matrix<P::Base>,
    quadratic: Option<&[Matrix<P::Base>]>,
    dom: &InnerProduct<P::Base>,
    cod: &InnerProduct<P::Base>,
) -> Result<bool> {
    let u = frame_probe(dom, &P::probe_generators(dom.dim())?)?;
    let like = &u[0];
    let mut v = a.lift(like).mul_vec(&u)?;
    if let Some(quad) = quadratic {
        if quad.len() != a.rows() {
            return Err(Error::DimensionMismatch {
                expected: a.rows(),
                found: quad.len(),
            });
        }
        for (vi, q) in v.iter_mut().zip(quad) {
            *vi = vi.add(&q.lift(like).bilinear(&u, &u)?);
        }
    }
    is_lsmall(&v, &cod.gram().lift(like), crate::scalar::DEFAULT_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn ip(rows: &[&[i64]]) -> InnerProduct<Rational> {
        InnerProduct::new(Matrix::from_i64_rows(rows)).unwrap()
    }

    fn q(n: i64) -> Rational {
        Rational::from_i64(n)
    }

    #[test]
    fn cholesky_examples() {
        assert_eq!(
            cholesky(&ip(&[&[1, 0], &[0, 1]])).unwrap(),
            Matrix::identity(2)
        );
        assert_eq!(
            cholesky(&ip(&[&[4, 0], &[0, 9]])).unwrap(),
            Matrix::from_i64_rows(&[&[2, 0], &[0, 3]])
        );
        let bad = InnerProduct::<Rational>::new(Matrix::from_i64_rows(&[&[1, 2], &[2, 1]]));
        assert_eq!(bad, Err(Error::NotPositiveDefinite { minor: 2 }));
    }

    #[test]
    fn cholesky_reconstructs_gram() {
        let g = ip(&[&[4, 2, 0], &[2, 10, 3], &[0, 3, 10]]);
        let s = cholesky(&g).unwrap();
        assert_eq!(s.transpose().try_mul(&s).unwrap(), *g.gram());
    }

    #[test]
    fn irrational_pivot_is_reported() {
        let g = ip(&[&[2, 0], &[0, 1]]);
        assert!(matches!(cholesky(&g), Err(Error::IrrationalSqrt { .. })));
        let f = InnerProduct::new(Matrix::<f64>::from_i64_rows(&[&[2, 0], &[0, 1]])).unwrap();
        assert!((cholesky(&f).unwrap().get(0, 0) - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn asymmetric_gram_rejected() {
        let m = Matrix::<Rational>::from_i64_rows(&[&[1, 1], &[0, 1]]);
        assert_eq!(InnerProduct::new(m), Err(Error::NotSymmetric));
    }

    #[test]
    fn probe_identity_examples() {
        let g2 = ip(&[&[1, 0], &[0, 1]]);
        let u = lsmall_probe(&g2).unwrap();
        assert_eq!(
            u,
            vec![Lap::generator(0, 2).unwrap(), Lap::generator(1, 2).unwrap()]
        );
        assert!(lsmall_defects(&u, &g2.gram().lift(&u[0]))
            .unwrap()
            .iter()
            .all(Ring::is_zero));

        let g3 = InnerProduct::<Rational>::identity(3);
        let u = lsmall_probe(&g3).unwrap();
        assert_eq!(
            g3.inner(&u, &u).unwrap(),
            Lap::sigma(3).unwrap().scale(&q(3))
        );

        let g = ip(&[&[4, 0], &[0, 9]]);
        let u = lsmall_probe(&g).unwrap();
        assert!(is_lsmall(&u, &g.gram().lift(&u[0]), 0.0).unwrap());
    }

    #[test]
    fn non_lsmall_vector_detected() {
        let g = InnerProduct::<Rational>::identity(2);
        let d1 = Lap::<Rational>::generator(0, 2).unwrap();
        let u = vec![d1.clone(), d1];
        assert!(!is_lsmall(&u, &g.gram().lift(&u[0]), 0.0).unwrap());
        assert!(!orthonormal_relations_hold(&u));
    }

    #[test]
    fn sum_condition_examples() {
        let g = InnerProduct::<Rational>::identity(2);
        let u = lsmall_probe(&g).unwrap();
        let zero = vec![u[0].zero_like(); 2];
        assert!(sum_lsmall_condition(&u, &zero, &g).unwrap());
        assert!(sum_lsmall_condition(&u, &u, &g).unwrap());
        let d1 = Lap::<Rational>::generator(0, 2).unwrap();
        let a = vec![d1.clone(), d1.zero_like()];
        let b = vec![d1.zero_like(), d1];
        // <a,e1><b,e2> + <a,e2><b,e1> = sigma, while <a,b> = 0
        assert!(!sum_lsmall_condition(&a, &b, &g).unwrap());
    }

    #[test]
    fn tracezero_basis_kills_probe() {
        let b2 = tracezero_selfadjoint_basis::<Rational>(2).unwrap();
        assert_eq!(b2[0], Matrix::from_i64_rows(&[&[0, 1], &[1, 0]]));
        assert_eq!(b2[1], Matrix::from_i64_rows(&[&[1, 0], &[0, -1]]));
        assert_eq!(tracezero_selfadjoint_basis::<Rational>(3).unwrap().len(), 5);
        assert!(tracezero_selfadjoint_basis::<Rational>(1).is_err());
        let g = InnerProduct::<Rational>::identity(3);
        let u = lsmall_probe(&g).unwrap();
        for l in tracezero_selfadjoint_basis::<Rational>(3).unwrap() {
            let lu = l.lift(&u[0]).mul_vec(&u).unwrap();
            assert!(g.inner(&lu, &u).unwrap().is_zero());
        }
    }

    #[test]
    fn semiconformal_examples() {
        let id = InnerProduct::<Rational>::identity(2);
        let r = semiconformal_matrix(&Matrix::from_i64_rows(&[&[3, 4], &[4, -3]]), &id, &id, 0.0)
            .unwrap();
        assert!(r.is_semiconformal);
        assert_eq!(r.dilation, Some(q(25)));
        let r = semiconformal_matrix(&Matrix::identity(2), &id, &id, 0.0).unwrap();
        assert_eq!(r.dilation, Some(q(1)));
        let r = semiconformal_matrix(&Matrix::from_i64_rows(&[&[1, 0], &[0, 2]]), &id, &id, 0.0)
            .unwrap();
        assert!(!r.is_semiconformal);
        assert_eq!(r.dilation, None);
        assert_eq!(r.worst_defect, q(3));
    }

    #[test]
    fn rank_deficient_rejected() {
        let id = InnerProduct::<Rational>::identity(2);
        let a = Matrix::from_i64_rows(&[&[1, 2], &[2, 4]]);
        assert_eq!(
            semiconformal_matrix(&a, &id, &id, 0.0),
            Err(Error::RankDeficient {
                rank: 1,
                expected: 2
            })
        );
    }

    #[test]
    fn float_semiconformal_within_tolerance() {
        let id = InnerProduct::<f64>::identity(2);
        let a = Matrix::new(2, 2, vec![3.0, 4.0, 4.0, -3.0 + 1e-13]).unwrap();
        let r = semiconformal_matrix(&a, &id, &id, 1e-9).unwrap();
        assert!(r.is_semiconformal);
        assert!((r.dilation.unwrap() - 25.0).abs() < 1e-9);
    }
}
