use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::innerprod::{frame_probe, InnerProduct};
use crate::linalg::Matrix;
use crate::riemann::{GammaData, Metric, SignConvention};
use crate::scalar::{Ring, Scalar};
use crate::weil::{Jet1, Jet2, Lap};

/// Coordinates of an element of the L-neighbourhood algebra:
/// `value + grad . delta + sigma * (delta_1^2 + .. + delta_n^2)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbeParts<S> {
    pub value: S,
    pub grad: Vec<S>,
    pub sigma: S,
}

impl<S: Scalar> ProbeParts<S> {
    pub fn is_pure_sigma(&self) -> bool {
        self.value.is_zero() && self.grad.iter().all(Ring::is_zero)
    }

    pub fn is_zero(&self) -> bool {
        self.is_pure_sigma() && self.sigma.is_zero()
    }
}

/// Algebra carrying the generic L-small displacement: Lap(n) for `n >= 2`,
/// and the second neighbourhood Jet2(1) on a line.
pub trait ProbeCarrier: Ring {
    fn probe_generators(n: usize) -> Result<Vec<Self>>;
    fn parts(&self) -> ProbeParts<Self::Base>;
}

impl<S: Scalar> ProbeCarrier for Lap<S> {
    fn probe_generators(n: usize) -> Result<Vec<Self>> {
        (0..n).map(|i| Lap::generator(i, n)).collect()
    }

    fn parts(&self) -> ProbeParts<S> {
        ProbeParts {
            value: self.value.clone(),
            grad: self.grad.clone(),
            sigma: self.sigma.clone(),
        }
    }
}

impl<S: Scalar> ProbeCarrier for Jet2<S> {
    fn probe_generators(n: usize) -> Result<Vec<Self>> {
        if n != 1 {
            return Err(Error::InvalidDimension {
                dim: n,
                reason: "Jet2 only carries the L-probe on a line",
            });
        }
        Ok(vec![Jet2::variable(S::zero(), 0, 1)])
    }

    fn parts(&self) -> ProbeParts<S> {
        ProbeParts {
            value: self.value.clone(),
            grad: self.grad.clone(),
            sigma: self.hess[0].scale(&S::from_ratio(1, 2)),
        }
    }
}

/// Calls `$f::<P>(args)` with the carrier matching dimension `$n`.
macro_rules! by_carrier {
    ($n:expr, $s:ty, $f:ident($($arg:expr),* $(,)?)) => {
        if $n == 1 {
            $f::<$crate::weil::Jet2<$s>>($($arg),*)
        } else {
            $f::<$crate::weil::Lap<$s>>($($arg),*)
        }
    };
}
pub(crate) use by_carrier;

/// The generic L-neighbour `z = exp_x(u)` of `x`, `u` the L-small probe, and its mirror image.
#[derive(Clone, Debug)]
pub struct LProbe<P> {
    pub gamma: GammaData<P>,
    pub u: Vec<P>,
    pub z: Vec<P>,
    pub z_mirror: Vec<P>,
}

impl<P: ProbeCarrier> LProbe<P> {
    pub fn new(g: &Metric, x: &[P::Base], sign: SignConvention) -> Result<Self> {
        let gd = GammaData::at(g, x, sign)?;
        let ip = InnerProduct::new(gd.gram().clone())?;
        let u = frame_probe(&ip, &P::probe_generators(g.dim())?)?;
        let gamma = gd.lift(&u[0]);
        let z = gamma.exp2(&u)?;
        let z_mirror = gamma.mirror(&z)?;
        Ok(Self {
            gamma,
            u,
            z,
            z_mirror,
        })
    }

    /// The base point, embedded as constants.
    pub fn point(&self) -> &[P] {
        self.gamma.point()
    }

    /// `f(z) + f(z') - 2 f(x)`.
    pub fn second_difference(&self, f: &Expr) -> Result<P> {
        let fz = f.eval(&self.z)?;
        let fm = f.eval(&self.z_mirror)?;
        let fx = f.eval(self.point())?;
        Ok(fz.add(&fm).sub(&fx.scale(&P::Base::from_i64(2))))
    }
}

fn second_difference_in<P: ProbeCarrier>(
    f: &Expr,
    g: &Metric,
    x: &[P::Base],
) -> Result<ProbeParts<P::Base>> {
    Ok(LProbe::<P>::new(g, x, SignConvention::Standard)?
        .second_difference(f)?
        .parts())
}

/// `f(z) + f(z') - 2 f(x)` over the generic L-neighbour `z` of `x`.
pub fn second_difference<S: Scalar>(f: &Expr, g: &Metric, x: &[S]) -> Result<ProbeParts<S>> {
    by_carrier!(g.dim(), S, second_difference_in(f, g, x))
}

/// The Laplacian as the sigma-coefficient of the second difference over the L-probe.
///
/// Since `<u, u> = n sigma`, this is the same as reading `f(z) + f(z') - 2 f(x)`
/// as a multiple of `g(x, z) / n`.
pub fn laplacian<S: Scalar>(f: &Expr, g: &Metric, x: &[S]) -> Result<S> {
    Ok(second_difference(f, g, x)?.sigma)
}

/// Classical Laplace-Beltrami operator in divergence form, expanded so that no
/// square root of `det g` is needed:
/// `g^ij f_ij + (d_i g^ij) f_j + (1/2) tr(G^-1 d_i G) g^ij f_j`.
pub fn laplace_beltrami_oracle<S: Scalar>(f: &Expr, g: &Metric, x: &[S]) -> Result<S> {
    let n = g.dim();
    if x.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: x.len(),
        });
    }
    let fj = f.eval(&Jet2::seed(x))?;
    let gj = g.gram_at(&Jet1::seed(x))?;
    let gram = gj.map(|e| e.value.clone());
    InnerProduct::new(gram.clone())?;
    let inv = gram.inverse()?;
    let dg: Vec<Matrix<S>> = (0..n).map(|l| gj.map(|e| e.grad[l].clone())).collect();
    let mut out = S::zero();
    for i in 0..n {
        let d_inv = inv.try_mul(&dg[i])?.try_mul(&inv)?;
        let log_det = inv.try_mul(&dg[i])?.trace().scale(&S::from_ratio(1, 2));
        for j in 0..n {
            out = out.add(&inv.get(i, j).mul(fj.hess_at(i, j)));
            out = out.sub(&d_inv.get(i, j).mul(&fj.grad[j]));
            out = out.add(&log_det.mul(inv.get(i, j)).mul(&fj.grad[j]));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn flat() -> Metric {
        Metric::flat(&["x", "y"]).unwrap()
    }

    fn hyperbolic() -> Metric {
        Metric::diagonal(&["x", "y"], &["1/y^2", "1/y^2"]).unwrap()
    }

    fn f(text: &str) -> Expr {
        Expr::parse(text, &["x", "y"]).unwrap()
    }

    #[test]
    fn flat_examples() {
        let x = [q(1, 3), q(-2, 1)];
        assert_eq!(laplacian(&f("x^2 - y^2"), &flat(), &x).unwrap(), q(0, 1));
        assert_eq!(laplacian(&f("x^2 + y^2"), &flat(), &x).unwrap(), q(4, 1));
        assert_eq!(
            laplace_beltrami_oracle(&f("x^2 + y^2"), &flat(), &x).unwrap(),
            q(4, 1)
        );
        assert_eq!(
            laplacian(&f("7"), &hyperbolic(), &[q(0, 1), q(1, 1)]).unwrap(),
            q(0, 1)
        );
        assert_eq!(
            laplace_beltrami_oracle(&f("7"), &hyperbolic(), &[q(0, 1), q(1, 1)]).unwrap(),
            q(0, 1)
        );
    }

    #[test]
    fn hyperbolic_log_float() {
        let x = [0.0, 1.0];
        let d = laplacian(&f("log(y)"), &hyperbolic(), &x).unwrap();
        assert!((d + 1.0).abs() < 1e-9);
        let o = laplace_beltrami_oracle(&f("log(y)"), &hyperbolic(), &x).unwrap();
        assert!((o + 1.0).abs() < 1e-9);
    }

    #[test]
    fn exact_mode_rejects_transcendentals() {
        let r = laplacian(&f("log(y)"), &hyperbolic(), &[q(0, 1), q(1, 1)]);
        assert_eq!(r, Err(Error::TranscendentalInExactMode("log")));
    }

    #[test]
    fn agrees_with_oracle_on_curved_metrics() {
        let sphere = Metric::conformal(&["x", "y"], "4/(1 + x^2 + y^2)^2").unwrap();
        let shear = Metric::new(&["x", "y"], &["1", "x", "1 + x^2"]).unwrap();
        for g in [hyperbolic(), sphere, shear] {
            for func in ["x^3*y - y^2", "x/(1 + y^2)", "x*y^3 + 2*x"] {
                let x = [q(1, 2), q(3, 2)];
                let lhs = laplacian(&f(func), &g, &x).unwrap();
                let rhs = laplace_beltrami_oracle(&f(func), &g, &x).unwrap();
                assert_eq!(lhs, rhs, "{func}");
            }
        }
    }

    #[test]
    fn second_difference_is_pure_sigma() {
        let x = [q(2, 1), q(1, 3)];
        let parts = second_difference(&f("x^3 - x*y + y^4"), &hyperbolic(), &x).unwrap();
        assert!(parts.is_pure_sigma());
    }

    #[test]
    fn one_dimensional_chart() {
        let g = Metric::new(&["t"], &["(1 + t^2)^2"]).unwrap();
        let func = Expr::parse("t^3", &["t"]).unwrap();
        let x = [q(1, 2)];
        assert_eq!(
            laplacian(&func, &g, &x).unwrap(),
            laplace_beltrami_oracle(&func, &g, &x).unwrap()
        );
    }
}
