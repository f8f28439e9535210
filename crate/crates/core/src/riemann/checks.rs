use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::innerprod::is_lsmall;
use crate::riemann::laplace::by_carrier;
use crate::riemann::{GammaData, LProbe, Metric, ProbeCarrier, SignConvention};
use crate::scalar::{Ring, Scalar};
use crate::weil::{Jet1, MultiDual};

/// Outcome of the metric-compatibility test for the connection.
#[derive(Clone, Debug, PartialEq)]
pub struct LeviCivitaReport<S> {
    pub holds: bool,
    pub triples_checked: usize,
    pub counterexample: Option<LeviCivitaCounterexample<S>>,
}

/// Directions `(a, b, c)` for which `g(nabla(x,y,z), nabla(x,y,u)) != g(z,u)`,
/// with the coefficients of `e1 e2 e3` on both sides.
#[derive(Clone, Debug, PartialEq)]
pub struct LeviCivitaCounterexample<S> {
    pub directions: [usize; 3],
    pub lhs: S,
    pub rhs: S,
}

/// Checks `g(nabla(x,y,z), nabla(x,y,u)) = g(z,u)` for `y = x + e1 a`,
/// `z = x + e2 b`, `u = x + e3 c` over all basis directions, where `e1, e2, e3`
/// are independent square-zero infinitesimals.
pub fn verify_levicivita<S: Scalar>(
    g: &Metric,
    x: &[S],
    sign: SignConvention,
    tol: f64,
) -> Result<LeviCivitaReport<S>> {
    let n = g.dim();
    let gd = GammaData::at(g, x, SignConvention::Standard)?.with_sign(sign);
    let like = MultiDual::from_scalar(S::zero(), 3);
    let lifted = gd.lift(&like);
    let base = lifted.point().to_vec();
    let shifted = |dir: usize, generator: usize| {
        let mut p = base.clone();
        p[dir] = p[dir].add(&MultiDual::variable(S::zero(), generator, 3));
        p
    };
    let scale = 1.0 + gd.gram().max_abs();
    let mut checked = 0;
    for a in 0..n {
        let y = shifted(a, 0);
        for b in 0..n {
            let z = shifted(b, 1);
            let yz = lifted.nabla(&y, &z)?;
            for c in 0..n {
                let u = shifted(c, 2);
                let yu = lifted.nabla(&y, &u)?;
                let lhs = g.square_distance(&yz, &yu)?;
                let rhs = g.square_distance(&z, &u)?;
                checked += 1;
                if !lhs.sub(&rhs).is_negligible(scale, tol) {
                    return Ok(LeviCivitaReport {
                        holds: false,
                        triples_checked: checked,
                        counterexample: Some(LeviCivitaCounterexample {
                            directions: [a, b, c],
                            lhs: lhs.coeff(0b111).clone(),
                            rhs: rhs.coeff(0b111).clone(),
                        }),
                    });
                }
            }
        }
    }
    Ok(LeviCivitaReport {
        holds: true,
        triples_checked: checked,
        counterexample: None,
    })
}

fn symmetry_evidence_in<P: ProbeCarrier>(g: &Metric, x: &[P::Base], tol: f64) -> Result<bool> {
    let probe = LProbe::<P>::new(g, x, SignConvention::Standard)?;
    let at_z = GammaData::at(g, &probe.z, SignConvention::Standard)?;
    let back = at_z.log2(probe.point())?;
    is_lsmall(&back, at_z.gram(), tol)
}

/// Whether `log_z(x)` is L-small for `G(z)`, where `z` is the generic
/// L-neighbour of `x`. Evidence for symmetry of the relation, not a proof.
pub fn lsmall_symmetry_evidence<S: Scalar>(g: &Metric, x: &[S], tol: f64) -> Result<bool> {
    by_carrier!(g.dim(), S, symmetry_evidence_in(g, x, tol))
}

/// `f(z) + f(z') - 2 f(x)` for a first-order neighbour `z = x + d`.
pub fn first_order_mirror_defect<S: Scalar>(f: &Expr, g: &Metric, x: &[S]) -> Result<Jet1<S>> {
    let n = g.dim();
    if x.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: x.len(),
        });
    }
    let gd = GammaData::at(g, x, SignConvention::Standard)?;
    let lifted = gd.lift(&Jet1::constant(S::zero(), n));
    let z: Vec<Jet1<S>> = (0..n).map(|i| Jet1::variable(x[i].clone(), i, n)).collect();
    let zm = lifted.mirror(&z)?;
    let fx = f.eval(lifted.point())?;
    Ok(f.eval(&z)?
        .add(&f.eval(&zm)?)
        .sub(&fx.scale(&S::from_i64(2))))
}
