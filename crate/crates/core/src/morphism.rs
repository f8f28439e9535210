//! Smooth maps between charts: differentials, semi-conformality, tension,
//! harmonic morphisms and the jet-pullback characterization.

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::innerprod::{is_lsmall, semiconformal_matrix, SemiConformalReport};
use crate::linalg::Matrix;
use crate::riemann::{
    christoffel, harmonic_jet_basis, is_harmonic_jet, Jet2Scalar, LProbe, Metric, ProbeCarrier,
    ProbeParts, SignConvention,
};
use crate::scalar::{Ring, Scalar};
use crate::weil::{Jet1, Jet2};

/// `m` component expressions in the `n` domain coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct SmoothMap {
    coords: Vec<String>,
    components: Vec<Expr>,
}

impl SmoothMap {
    pub fn new(coords: &[impl AsRef<str>], components: &[impl AsRef<str>]) -> Result<Self> {
        let coords: Vec<String> = coords.iter().map(|c| c.as_ref().to_string()).collect();
        crate::riemann::check_coords(&coords)?;
        if components.is_empty() {
            return Err(Error::InvalidDimension {
                dim: 0,
                reason: "a map needs at least one component",
            });
        }
        let components = components
            .iter()
            .map(|c| Expr::parse(c.as_ref(), &coords))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { coords, components })
    }

    pub fn domain_dim(&self) -> usize {
        self.coords.len()
    }

    pub fn codomain_dim(&self) -> usize {
        self.components.len()
    }

    pub fn coords(&self) -> &[String] {
        &self.coords
    }

    pub fn components(&self) -> &[Expr] {
        &self.components
    }

    pub fn eval<E: Ring>(&self, point: &[E]) -> Result<Vec<E>> {
        self.components.iter().map(|c| c.eval(point)).collect()
    }
}

/// The 2-jet of a map at a point: value, Jacobian and one Hessian per component.
#[derive(Clone, Debug, PartialEq)]
pub struct MapJet<S> {
    pub value: Vec<S>,
    pub jacobian: Matrix<S>,
    pub hessians: Vec<Matrix<S>>,
}

impl<S: Scalar> MapJet<S> {
    pub fn norm(&self) -> f64 {
        self.hessians
            .iter()
            .map(Matrix::max_abs)
            .fold(self.jacobian.max_abs(), f64::max)
    }
}

/// `d(phi)_x`, row `i` the gradient of component `i`.
pub fn differential<S: Scalar>(phi: &SmoothMap, x: &[S]) -> Result<Matrix<S>> {
    check_point_dim(phi, x)?;
    let rows = phi
        .eval(&Jet1::seed(x))?
        .into_iter()
        .map(|j| j.grad)
        .collect();
    Matrix::from_rows(rows)
}

pub fn map_jet<S: Scalar>(phi: &SmoothMap, x: &[S]) -> Result<MapJet<S>> {
    check_point_dim(phi, x)?;
    let n = phi.domain_dim();
    let jets = phi.eval(&Jet2::seed(x))?;
    let value = jets.iter().map(|j| j.value.clone()).collect();
    let jacobian = Matrix::from_rows(jets.iter().map(|j| j.grad.clone()).collect())?;
    let hessians = jets
        .iter()
        .map(|j| Matrix::new(n, n, j.hess.clone()))
        .collect::<Result<Vec<_>>>()?;
    Ok(MapJet {
        value,
        jacobian,
        hessians,
    })
}

fn check_point_dim<S>(phi: &SmoothMap, x: &[S]) -> Result<()> {
    if x.len() != phi.domain_dim() {
        return Err(Error::DimensionMismatch {
            expected: phi.domain_dim(),
            found: x.len(),
        });
    }
    Ok(())
}

fn check_metrics(phi: &SmoothMap, g: &Metric, h: &Metric) -> Result<()> {
    if g.dim() != phi.domain_dim() {
        return Err(Error::DimensionMismatch {
            expected: phi.domain_dim(),
            found: g.dim(),
        });
    }
    if h.dim() != phi.codomain_dim() {
        return Err(Error::DimensionMismatch {
            expected: phi.codomain_dim(),
            found: h.dim(),
        });
    }
    Ok(())
}

/// 2-jet chain rule: `j o phi` at `x` for a jet `j` based at `phi(x)`.
pub fn pullback<S: Scalar>(j: &Jet2Scalar<S>, phi: &MapJet<S>) -> Result<Jet2Scalar<S>> {
    let a = &phi.jacobian;
    if j.dim() != a.rows() {
        return Err(Error::DimensionMismatch {
            expected: a.rows(),
            found: j.dim(),
        });
    }
    let covector = a.transpose().mul_vec(&j.covector)?;
    let mut form = a.transpose().try_mul(&j.form)?.try_mul(a)?;
    for (p, k) in j.covector.iter().zip(&phi.hessians) {
        form = form.add(&k.scale(p))?;
    }
    // rounding can break symmetry in float64
    let form = form
        .add(&form.transpose())?
        .scale(&S::from_ratio(1, 2));
    Jet2Scalar::new(j.value.clone(), covector, form)
}

/// Matrix route, plus in exact mode the probe route
/// `log_{phi(x)} o phi o exp_x` applied to the L-probe.
#[derive(Clone, Debug, PartialEq)]
pub struct SemiConformalCheck<S> {
    pub report: SemiConformalReport<S>,
    pub probe_route: Option<bool>,
}

fn probe_route_in<P: ProbeCarrier>(
    phi: &SmoothMap,
    g: &Metric,
    h: &Metric,
    x: &[P::Base],
    image: &[P::Base],
) -> Result<bool> {
    let probe = LProbe::<P>::new(g, x, SignConvention::Standard)?;
    let cod = christoffel(h, image)?.lift(&probe.u[0]);
    let v = cod.log2(&phi.eval(&probe.z)?)?;
    is_lsmall(&v, cod.gram(), 0.0)
}

/// Whether `phi` maps the generic L-neighbour of `x` to an L-neighbour of `phi(x)`.
pub fn preserves_lneighbours<S: Scalar>(
    phi: &SmoothMap,
    g: &Metric,
    h: &Metric,
    x: &[S],
) -> Result<bool> {
    check_metrics(phi, g, h)?;
    let image = phi.eval(x)?;
    crate::riemann::by_carrier!(g.dim(), S, probe_route_in(phi, g, h, x, &image))
}

pub fn is_semiconformal_at<S: Scalar>(
    phi: &SmoothMap,
    g: &Metric,
    h: &Metric,
    x: &[S],
    tol: f64,
) -> Result<SemiConformalCheck<S>> {
    check_metrics(phi, g, h)?;
    let a = differential(phi, x)?;
    let image = phi.eval(x)?;
    let report = semiconformal_matrix(
        &a,
        &g.inner_product_at(x)?,
        &h.inner_product_at(&image)?,
        tol,
    )?;
    let probe_route = if S::EXACT {
        Some(preserves_lneighbours(phi, g, h, x)?)
    } else {
        None
    };
    Ok(SemiConformalCheck {
        report,
        probe_route,
    })
}

fn tension_in<P: ProbeCarrier>(
    phi: &SmoothMap,
    g: &Metric,
    h: &Metric,
    x: &[P::Base],
    image: &[P::Base],
) -> Result<Vec<ProbeParts<P::Base>>> {
    let probe = LProbe::<P>::new(g, x, SignConvention::Standard)?;
    let cod = christoffel(h, image)?.lift(&probe.u[0]);
    let at_mirror = phi.eval(&probe.z_mirror)?;
    let mirrored_image = cod.mirror(&phi.eval(&probe.z)?)?;
    Ok(at_mirror
        .iter()
        .zip(&mirrored_image)
        .map(|(a, b)| a.sub(b).parts())
        .collect())
}

/// `phi(z') - phi(z)'` over the generic L-neighbour `z`, componentwise.
pub fn tension_parts<S: Scalar>(
    phi: &SmoothMap,
    g: &Metric,
    h: &Metric,
    x: &[S],
) -> Result<Vec<ProbeParts<S>>> {
    check_metrics(phi, g, h)?;
    let image = phi.eval(x)?;
    crate::riemann::by_carrier!(g.dim(), S, tension_in(phi, g, h, x, &image))
}

/// Sigma-coefficients of the mirror defect; equal to the classical tension field.
pub fn tension<S: Scalar>(phi: &SmoothMap, g: &Metric, h: &Metric, x: &[S]) -> Result<Vec<S>> {
    Ok(tension_parts(phi, g, h, x)?
        .into_iter()
        .map(|p| p.sigma)
        .collect())
}

/// `tau^c = g^ij (d_i d_j phi^c - Gamma^k_ij d_k phi^c + Gamma^c_ab d_i phi^a d_j phi^b)`.
pub fn classical_tension<S: Scalar>(
    phi: &SmoothMap,
    g: &Metric,
    h: &Metric,
    x: &[S],
) -> Result<Vec<S>> {
    check_metrics(phi, g, h)?;
    let (n, m) = (phi.domain_dim(), phi.codomain_dim());
    let mj = map_jet(phi, x)?;
    let dom = christoffel(g, x)?;
    let cod = christoffel(h, &mj.value)?;
    let inv = dom.gram().inverse()?;
    let d = &mj.jacobian;
    let mut out = Vec::with_capacity(m);
    for c in 0..m {
        let mut acc = S::zero();
        for i in 0..n {
            for j in 0..n {
                let mut t = mj.hessians[c].get(i, j).clone();
                for k in 0..n {
                    t = t.sub(&dom.symbol(k, i, j).mul(d.get(c, k)));
                }
                for a in 0..m {
                    for b in 0..m {
                        t = t.add(&cod.symbol(c, a, b).mul(d.get(a, i)).mul(d.get(b, j)));
                    }
                }
                acc = acc.add(&inv.get(i, j).mul(&t));
            }
        }
        out.push(acc);
    }
    Ok(out)
}

/// Side-by-side verdicts of the two characterizations of harmonic morphisms.
#[derive(Clone, Debug, PartialEq)]
pub struct FiReport<S> {
    /// Harmonic and semi-conformal.
    pub direct: bool,
    /// Every basis harmonic 2-jet at `phi(x)` pulls back to a harmonic 2-jet.
    pub pullback: bool,
    pub jets_checked: usize,
    /// First basis jet whose pullback is not harmonic, with its certificate.
    pub failing_jet: Option<(String, S)>,
}

impl<S> FiReport<S> {
    pub fn agrees(&self) -> bool {
        self.direct == self.pullback
    }
}

fn pullback_verdict<S: Scalar>(
    direct: bool,
    mj: &MapJet<S>,
    g: &Metric,
    h: &Metric,
    x: &[S],
    tol: f64,
) -> Result<FiReport<S>> {
    let basis = harmonic_jet_basis(h, &mj.value)?;
    let mut failing_jet = None;
    for b in &basis {
        let pb = pullback(&b.jet, mj)?;
        let cert = is_harmonic_jet(&pb, g, x, tol)?;
        if !cert.harmonic {
            failing_jet = Some((b.label.clone(), cert.certificate));
            break;
        }
    }
    Ok(FiReport {
        direct,
        pullback: failing_jet.is_none(),
        jets_checked: basis.len(),
        failing_jet,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CheckOptions {
    pub tol: f64,
    pub fi: bool,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self {
            tol: crate::scalar::DEFAULT_TOL,
            fi: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PointReport<S> {
    pub point: Vec<S>,
    pub image: Vec<S>,
    pub differential: Matrix<S>,
    pub semiconformal: SemiConformalReport<S>,
    pub probe_route: Option<bool>,
    pub tension: Vec<S>,
    pub classical_tension: Vec<S>,
    pub tension_agrees: bool,
    pub harmonic: bool,
    pub harmonic_morphism: bool,
    pub fi: Option<FiReport<S>>,
}

fn harmonic_from_tension<S: Scalar>(tau: &[S], mj: &MapJet<S>, tol: f64) -> bool {
    let scale = 1.0 + mj.norm();
    tau.iter().all(|t| t.is_negligible(scale, tol))
}

/// All pointwise checks. Fails with `RankDeficient` when `phi` is not a submersion at `x`.
pub fn check_point<S: Scalar>(
    phi: &SmoothMap,
    g: &Metric,
    h: &Metric,
    x: &[S],
    opts: CheckOptions,
) -> Result<PointReport<S>> {
    check_metrics(phi, g, h)?;
    let mj = map_jet(phi, x)?;
    let sc = is_semiconformal_at(phi, g, h, x, opts.tol)?;
    let tau = tension(phi, g, h, x)?;
    let classical = classical_tension(phi, g, h, x)?;
    let scale = 1.0 + mj.norm();
    let tension_agrees = tau
        .iter()
        .zip(&classical)
        .all(|(a, b)| a.sub(b).is_negligible(scale, opts.tol));
    let harmonic = harmonic_from_tension(&tau, &mj, opts.tol);
    let harmonic_morphism = harmonic && sc.report.is_semiconformal;
    let fi = if opts.fi {
        Some(pullback_verdict(harmonic_morphism, &mj, g, h, x, opts.tol)?)
    } else {
        None
    };
    Ok(PointReport {
        point: x.to_vec(),
        image: mj.value.clone(),
        differential: mj.jacobian.clone(),
        semiconformal: sc.report,
        probe_route: sc.probe_route,
        tension: tau,
        classical_tension: classical,
        tension_agrees,
        harmonic,
        harmonic_morphism,
        fi,
    })
}

/// Direct verdict against the harmonic 2-jet pullback verdict.
pub fn fuglede_ishihara_check<S: Scalar>(
    phi: &SmoothMap,
    g: &Metric,
    h: &Metric,
    x: &[S],
    tol: f64,
) -> Result<FiReport<S>> {
    let report = check_point(phi, g, h, x, CheckOptions { tol, fi: true })?;
    Ok(report.fi.expect("requested"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn q(n: i64) -> Rational {
        Rational::from_i64(n)
    }

    fn flat2() -> Metric {
        Metric::flat(&["x", "y"]).unwrap()
    }

    fn map(components: &[&str]) -> SmoothMap {
        SmoothMap::new(&["x", "y"], components).unwrap()
    }

    fn check(phi: &SmoothMap, x: &[Rational]) -> PointReport<Rational> {
        let h = Metric::flat(
            &(0..phi.codomain_dim())
                .map(|i| format!("w{i}"))
                .collect::<Vec<_>>(),
        )
        .unwrap();
        check_point(phi, &flat2(), &h, x, CheckOptions { tol: 0.0, fi: true }).unwrap()
    }

    #[test]
    fn differential_examples() {
        let sq = map(&["x^2 - y^2", "2*x*y"]);
        assert_eq!(
            differential(&sq, &[q(1), q(2)]).unwrap(),
            Matrix::from_i64_rows(&[&[2, -4], &[4, 2]])
        );
        assert_eq!(
            differential(&map(&["x", "y"]), &[q(5), q(7)]).unwrap(),
            Matrix::identity(2)
        );
        assert_eq!(
            differential(&map(&["3", "1"]), &[q(5), q(7)]).unwrap(),
            Matrix::zeros(2, 2)
        );
    }

    #[test]
    fn complex_square_is_a_morphism() {
        let r = check(&map(&["x^2 - y^2", "2*x*y"]), &[q(1), q(2)]);
        assert!(r.harmonic_morphism);
        assert_eq!(r.semiconformal.dilation, Some(q(20)));
        assert_eq!(r.probe_route, Some(true));
        assert_eq!(r.tension, vec![q(0), q(0)]);
        assert!(r.fi.unwrap().pullback);
    }

    #[test]
    fn stretch_is_harmonic_only() {
        let r = check(&map(&["x", "2*y"]), &[q(1), q(1)]);
        assert!(r.harmonic);
        assert!(!r.semiconformal.is_semiconformal);
        assert_eq!(r.probe_route, Some(false));
        let fi = r.fi.unwrap();
        assert!(!fi.direct && !fi.pullback);
        assert_eq!(fi.failing_jet.unwrap().0, "w1^2 - w2^2");
    }

    #[test]
    fn quadratic_map_tension() {
        let r = check(&map(&["x^2 + y^2", "x"]), &[q(1), q(1)]);
        assert_eq!(r.tension, vec![q(4), q(0)]);
        assert_eq!(r.classical_tension, r.tension);
        assert!(!r.harmonic && !r.harmonic_morphism);
        assert!(!r.fi.unwrap().pullback);
    }

    #[test]
    fn projection_is_a_morphism() {
        let phi = SmoothMap::new(&["x", "y", "z"], &["x", "y"]).unwrap();
        let g = Metric::flat(&["x", "y", "z"]).unwrap();
        let h = Metric::flat(&["u", "v"]).unwrap();
        let fi = fuglede_ishihara_check(&phi, &g, &h, &[q(1), q(2), q(3)], 0.0).unwrap();
        assert!(fi.direct && fi.pullback);
        assert_eq!(fi.jets_checked, 5);
    }

    #[test]
    fn line_codomain() {
        let r = check(&map(&["x + y"]), &[q(0), q(0)]);
        assert_eq!(r.semiconformal.dilation, Some(q(2)));
        assert!(r.harmonic_morphism);
    }

    #[test]
    fn hyperbolic_identity_has_no_tension() {
        let hyp = Metric::diagonal(&["x", "y"], &["1/y^2", "1/y^2"]).unwrap();
        let id = map(&["x", "y"]);
        let x = [q(1), q(3)];
        assert_eq!(tension(&id, &hyp, &hyp, &x).unwrap(), vec![q(0), q(0)]);
        let r = check_point(&id, &flat2(), &hyp, &x, CheckOptions { tol: 0.0, fi: true }).unwrap();
        assert!(r.harmonic_morphism && r.fi.unwrap().pullback);
    }

    #[test]
    fn non_submersion_is_an_error() {
        let phi = map(&["x^2 - y^2", "2*x*y"]);
        let r = check_point(
            &phi,
            &flat2(),
            &flat2(),
            &[q(0), q(0)],
            CheckOptions::default(),
        );
        assert_eq!(
            r,
            Err(Error::RankDeficient {
                rank: 0,
                expected: 2
            })
        );
    }

    #[test]
    fn pullback_chain_rule() {
        let phi = map(&["x^2 - y^2", "2*x*y"]);
        let x = [q(1), q(2)];
        let mj = map_jet(&phi, &x).unwrap();
        // f(u, v) = u v around phi(x) = (-3, 4)
        let f = Jet2Scalar::new(
            q(-12),
            vec![q(4), q(-3)],
            Matrix::from_i64_rows(&[&[0, 1], &[1, 0]]),
        )
        .unwrap();
        let direct = Expr::parse("(x^2 - y^2)*2*x*y", &["x", "y"])
            .unwrap()
            .eval(&Jet2::seed(&x))
            .unwrap();
        let pb = pullback(&f, &mj).unwrap();
        assert_eq!(pb.value, direct.value);
        assert_eq!(pb.covector, direct.grad);
        assert_eq!(pb.form.data(), direct.hess.as_slice());
    }
}
