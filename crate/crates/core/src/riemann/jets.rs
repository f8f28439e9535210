use crate::error::{Error, Result};
use crate::innerprod::{cholesky, tracezero_selfadjoint_basis, InnerProduct};
use crate::linalg::Matrix;
use crate::riemann::laplace::by_carrier;
use crate::riemann::{christoffel, LProbe, Metric, ProbeCarrier, ProbeParts, SignConvention};
use crate::scalar::{Ring, Scalar};

/// A 2-jet `z -> value + p.(z - x) + (z - x)^T H (z - x) / 2` at a base point `x`.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet2Scalar<S> {
    pub value: S,
    pub covector: Vec<S>,
    pub form: Matrix<S>,
}

impl<S: Scalar> Jet2Scalar<S> {
    pub fn new(value: S, covector: Vec<S>, form: Matrix<S>) -> Result<Self> {
        let n = covector.len();
        if form.rows() != n || form.cols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: form.rows(),
            });
        }
        if !form.is_symmetric() {
            return Err(Error::NotSymmetric);
        }
        Ok(Self {
            value,
            covector,
            form,
        })
    }

    pub fn constant(value: S, n: usize) -> Self {
        Self {
            value,
            covector: vec![S::zero(); n],
            form: Matrix::zeros(n, n),
        }
    }

    pub fn dim(&self) -> usize {
        self.covector.len()
    }

    /// Largest absolute entry.
    pub fn norm(&self) -> f64 {
        self.covector
            .iter()
            .map(Scalar::to_f64)
            .chain(std::iter::once(self.value.to_f64()))
            .map(f64::abs)
            .fold(self.form.max_abs(), f64::max)
    }

    /// Evaluates at a point `z` with infinitesimal coordinates near `x`.
    pub fn eval_at<E: Ring<Base = S>>(&self, x: &[S], z: &[E]) -> Result<E> {
        let n = self.dim();
        if x.len() != n || z.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: z.len(),
            });
        }
        let like = &z[0];
        let d: Vec<E> = z
            .iter()
            .zip(x)
            .map(|(a, b)| a.sub(&like.constant_like(b.clone())))
            .collect();
        let mut out = like.constant_like(self.value.clone());
        for i in 0..n {
            out = out.add(&d[i].scale(&self.covector[i]));
        }
        let quad = self.form.lift(like).bilinear(&d, &d)?;
        Ok(out.add(&quad.scale(&S::from_ratio(1, 2))))
    }
}

/// Verdict of the harmonic 2-jet test, with the sigma-coefficient `c` of
/// `j(z) + j(z') - 2 j(x)` as certificate.
#[derive(Clone, Debug, PartialEq)]
pub struct HarmonicCertificate<S> {
    pub harmonic: bool,
    pub certificate: S,
}

fn jet_second_difference<P: ProbeCarrier>(
    j: &Jet2Scalar<P::Base>,
    g: &Metric,
    x: &[P::Base],
) -> Result<ProbeParts<P::Base>> {
    let probe = LProbe::<P>::new(g, x, SignConvention::Standard)?;
    let jz = j.eval_at(x, &probe.z)?;
    let jm = j.eval_at(x, &probe.z_mirror)?;
    let jx = probe.u[0].constant_like(j.value.clone());
    Ok(jz.add(&jm).sub(&jx.scale(&P::Base::from_i64(2))).parts())
}

pub fn is_harmonic_jet<S: Scalar>(
    j: &Jet2Scalar<S>,
    g: &Metric,
    x: &[S],
    tol: f64,
) -> Result<HarmonicCertificate<S>> {
    if j.dim() != g.dim() {
        return Err(Error::DimensionMismatch {
            expected: g.dim(),
            found: j.dim(),
        });
    }
    let c = by_carrier!(g.dim(), S, jet_second_difference(j, g, x))?.sigma;
    let harmonic = c.is_negligible(1.0 + j.norm(), tol);
    Ok(HarmonicCertificate {
        harmonic,
        certificate: c,
    })
}

fn jet_on_probe<P: ProbeCarrier>(
    j: &Jet2Scalar<P::Base>,
    g: &Metric,
    x: &[P::Base],
) -> Result<ProbeParts<P::Base>> {
    let probe = LProbe::<P>::new(g, x, SignConvention::Standard)?;
    Ok(j.eval_at(x, &probe.z)?.parts())
}

/// `j(exp_x(u))` for the L-probe `u`.
pub fn jet_on_lneighbour<S: Scalar>(
    j: &Jet2Scalar<S>,
    g: &Metric,
    x: &[S],
) -> Result<ProbeParts<S>> {
    by_carrier!(g.dim(), S, jet_on_probe(j, g, x))
}

#[derive(Clone, Debug, PartialEq)]
pub struct LabeledJet<S> {
    /// Description in orthonormal coordinates `w = S log_x(z)`.
    pub label: String,
    pub jet: Jet2Scalar<S>,
}

fn tracezero_label<S: Scalar>(c: &Matrix<S>) -> String {
    let n = c.rows();
    for i in 0..n {
        for j in i + 1..n {
            if !c.get(i, j).is_zero() {
                return format!("2*w{}*w{}", i + 1, j + 1);
            }
        }
    }
    let plus = (0..n).find(|&i| c.get(i, i).is_positive()).unwrap_or(0);
    let minus = (0..n).find(|&i| c.get(i, i).to_f64() < 0.0).unwrap_or(0);
    format!("w{}^2 - w{}^2", plus + 1, minus + 1)
}

/// Constant, affine (`p o log_x`) and trace-zero quadratic (`q o log_x`)
/// harmonic 2-jets at `x`, expanded in the chart coordinates.
pub fn harmonic_jet_basis<S: Scalar>(g: &Metric, x: &[S]) -> Result<Vec<LabeledJet<S>>> {
    let n = g.dim();
    let gd = christoffel(g, x)?;
    let s = cholesky(&InnerProduct::new(gd.gram().clone())?)?;
    let unit = |i: usize| -> Vec<S> {
        (0..n)
            .map(|k| if k == i { S::one() } else { S::zero() })
            .collect()
    };
    // gamma_ij = Gamma(x; e_i, e_j)
    let mut gamma = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            gamma.push(gd.gamma(&unit(i), &unit(j))?);
        }
    }
    let mut out = vec![LabeledJet {
        label: "1".into(),
        jet: Jet2Scalar::constant(S::one(), n),
    }];
    for k in 0..n {
        let covector = s.row(k).to_vec();
        let form = Matrix::from_fn(n, n, |i, j| {
            (0..n).fold(S::zero(), |acc, l| {
                acc.sub(&s.get(k, l).mul(&gamma[i * n + j][l]))
            })
        });
        out.push(LabeledJet {
            label: format!("w{}", k + 1),
            jet: Jet2Scalar::new(S::zero(), covector, form)?,
        });
    }
    if n >= 2 {
        let two = S::from_i64(2);
        for c in tracezero_selfadjoint_basis::<S>(n)? {
            let form = s.transpose().try_mul(&c)?.try_mul(&s)?.scale(&two);
            out.push(LabeledJet {
                label: tracezero_label(&c),
                jet: Jet2Scalar::new(S::zero(), vec![S::zero(); n], form)?,
            });
        }
    }
    Ok(out)
}
