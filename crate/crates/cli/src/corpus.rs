//! Built-in metrics, test functions and map cases shared by `verify-paper`
//! and the shipped manifests.

use lapweil::morphism::SmoothMap;
use lapweil::riemann::Metric;
use lapweil::scalar::Scalar;

use crate::random::Sampler;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MetricId {
    Flat2,
    Hyperbolic,
    Sphere,
    Shear,
    Flat3,
    Warped3,
    Flat4,
}

impl MetricId {
    pub const SURFACES: [MetricId; 3] = [MetricId::Flat2, MetricId::Hyperbolic, MetricId::Sphere];

    pub fn name(self) -> &'static str {
        match self {
            MetricId::Flat2 => "flat plane",
            MetricId::Hyperbolic => "hyperbolic half-plane",
            MetricId::Sphere => "conformal sphere chart",
            MetricId::Shear => "sheared plane",
            MetricId::Flat3 => "flat 3-space",
            MetricId::Warped3 => "warped 3-space",
            MetricId::Flat4 => "flat 4-space",
        }
    }

    pub fn coords(self) -> &'static [&'static str] {
        match self {
            MetricId::Flat2 | MetricId::Hyperbolic | MetricId::Sphere | MetricId::Shear => &["x", "y"],
            MetricId::Flat3 | MetricId::Warped3 => &["x", "y", "z"],
            MetricId::Flat4 => &["x1", "x2", "x3", "x4"],
        }
    }

    pub fn upper(self) -> &'static [&'static str] {
        match self {
            MetricId::Flat2 => &["1", "0", "1"],
            MetricId::Hyperbolic => &["1/y^2", "0", "1/y^2"],
            MetricId::Sphere => &["4/(1 + x^2 + y^2)^2", "0", "4/(1 + x^2 + y^2)^2"],
            MetricId::Shear => &["1", "x", "1 + x^2"],
            MetricId::Flat3 => &["1", "0", "0", "1", "0", "1"],
            MetricId::Warped3 => &["1", "0", "0", "(1 + x^2)^2", "0", "1"],
            MetricId::Flat4 => &["1", "0", "0", "0", "1", "0", "0", "1", "0", "1"],
        }
    }

    pub fn metric(self) -> Metric {
        Metric::new(self.coords(), self.upper()).expect("built-in metric")
    }

    /// A random rational point inside the chart (`y != 0` on the half-plane).
    pub fn point<S: Scalar>(self, rng: &mut Sampler) -> Vec<S> {
        let mut p: Vec<S> = rng.vector(self.coords().len());
        if self == MetricId::Hyperbolic {
            p[1] = rng.positive();
        }
        p
    }
}

/// Metric/function pairs with rational data.
pub fn laplacian_pairs() -> Vec<(MetricId, &'static str)> {
    vec![
        (MetricId::Flat2, "x^3*y - x*y^2 + 2*x^2"),
        (MetricId::Hyperbolic, "x^2*y + y^3/(1 + x^2)"),
        (MetricId::Sphere, "x*y^2 - x^3 + y"),
        (MetricId::Shear, "x^2*y^2 + x - y^3"),
        (MetricId::Warped3, "x*y*z + x*z^2 - y^2"),
    ]
}

/// Metric/function pairs needing float64 arithmetic.
pub fn transcendental_pairs() -> Vec<(MetricId, &'static str)> {
    vec![
        (MetricId::Hyperbolic, "log(y) + sin(x)"),
        (MetricId::Sphere, "exp(x)*cos(y)"),
        (MetricId::Flat2, "tanh(x*y) + sqrt(1 + x^2)"),
    ]
}

/// Test functions on a metric's coordinates.
pub fn test_functions(id: MetricId) -> Vec<String> {
    let c = id.coords();
    let (a, b) = (c[0], c[1]);
    let mut out = vec![
        format!("{a}^2 + {b}^2"),
        format!("{a}^2 - {b}^2"),
        format!("{a}^3*{b} - 2*{a}*{b}^2 + 5"),
        format!("1/(1 + {a}^2 + {b}^2)"),
    ];
    if c.len() > 2 {
        out.push(format!("{a}*{b}*{} + {}^3", c[2], c[2]));
    }
    out
}

/// Expected verdicts for a map at the listed points.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Verdicts {
    pub semiconformal: bool,
    pub harmonic: bool,
}

impl Verdicts {
    pub fn morphism(self) -> bool {
        self.semiconformal && self.harmonic
    }
}

#[derive(Clone, Debug)]
pub struct MapCase {
    pub name: &'static str,
    pub domain: MetricId,
    pub codomain: Codomain,
    pub components: &'static [&'static str],
    pub points: &'static [&'static [(i64, i64)]],
    pub expect: Verdicts,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Codomain {
    Metric(MetricId),
    /// The real line with its standard metric.
    Line,
}

impl MapCase {
    pub fn map(&self) -> SmoothMap {
        SmoothMap::new(self.domain.coords(), self.components).expect("built-in map")
    }

    pub fn codomain_metric(&self) -> Metric {
        match self.codomain {
            Codomain::Metric(id) => id.metric(),
            Codomain::Line => Metric::new(&["w"], &["1"]).expect("line"),
        }
    }

    pub fn points<S: Scalar>(&self) -> Vec<Vec<S>> {
        self.points
            .iter()
            .map(|p| p.iter().map(|&(n, d)| S::from_ratio(n, d)).collect())
            .collect()
    }
}

const fn v(semiconformal: bool, harmonic: bool) -> Verdicts {
    Verdicts { semiconformal, harmonic }
}

/// Harmonic-morphism corpus covering all four verdict combinations.
pub fn map_cases() -> Vec<MapCase> {
    use Codomain::{Line, Metric as M};
    use MetricId::*;
    vec![
        MapCase {
            name: "complex square",
            domain: Flat2,
            codomain: M(Flat2),
            components: &["x^2 - y^2", "2*x*y"],
            points: &[&[(1, 1), (2, 1)], &[(1, 1), (0, 1)], &[(-1, 3), (5, 2)]],
            expect: v(true, true),
        },
        MapCase {
            name: "anisotropic stretch",
            domain: Flat2,
            codomain: M(Flat2),
            components: &["x", "2*y"],
            points: &[&[(1, 1), (1, 1)], &[(0, 1), (0, 1)]],
            expect: v(false, true),
        },
        MapCase {
            name: "shear",
            domain: Flat2,
            codomain: M(Flat2),
            components: &["x", "x + y"],
            points: &[&[(1, 2), (-3, 1)]],
            expect: v(false, true),
        },
        MapCase {
            name: "radial square and abscissa",
            domain: Flat2,
            codomain: M(Flat2),
            components: &["x^2 + y^2", "x"],
            points: &[&[(1, 1), (1, 1)], &[(2, 1), (-1, 3)]],
            expect: v(false, false),
        },
        MapCase {
            name: "parabolic shift",
            domain: Flat2,
            codomain: M(Flat2),
            components: &["x", "y + x^2"],
            points: &[&[(0, 1), (0, 1)], &[(0, 1), (7, 3)]],
            expect: v(true, false),
        },
        MapCase {
            name: "bent projection from 3-space",
            domain: Flat3,
            codomain: M(Flat2),
            components: &["x + z^2", "y"],
            points: &[&[(0, 1), (0, 1), (0, 1)], &[(1, 2), (-1, 1), (0, 1)]],
            expect: v(true, false),
        },
        MapCase {
            name: "projection from 3-space",
            domain: Flat3,
            codomain: M(Flat2),
            components: &["x", "y"],
            points: &[&[(1, 1), (2, 1), (3, 1)], &[(-1, 2), (0, 1), (4, 3)]],
            expect: v(true, true),
        },
        MapCase {
            name: "Hopf-type quadratic map",
            domain: Flat4,
            codomain: M(Flat3),
            components: &["x1^2 + x2^2 - x3^2 - x4^2", "2*(x1*x3 + x2*x4)", "2*(x2*x3 - x1*x4)"],
            points: &[&[(1, 1), (0, 1), (0, 1), (0, 1)], &[(1, 2), (-1, 1), (2, 3), (1, 1)]],
            expect: v(true, true),
        },
        MapCase {
            name: "harmonic quadratic to the line",
            domain: Flat2,
            codomain: Line,
            components: &["x^2 - y^2"],
            points: &[&[(1, 1), (2, 1)], &[(-3, 2), (1, 5)]],
            expect: v(true, true),
        },
        MapCase {
            name: "radial square to the line",
            domain: Flat2,
            codomain: Line,
            components: &["x^2 + y^2"],
            points: &[&[(1, 1), (0, 1)], &[(2, 3), (-1, 1)]],
            expect: v(true, false),
        },
        MapCase {
            name: "linear form to the line",
            domain: Flat2,
            codomain: Line,
            components: &["x + y"],
            points: &[&[(0, 1), (0, 1)], &[(4, 1), (-2, 7)]],
            expect: v(true, true),
        },
        MapCase {
            name: "hyperbolic identity",
            domain: Hyperbolic,
            codomain: M(Hyperbolic),
            components: &["x", "y"],
            points: &[&[(0, 1), (1, 1)], &[(3, 2), (1, 3)]],
            expect: v(true, true),
        },
        MapCase {
            name: "flat plane into the half-plane",
            domain: Flat2,
            codomain: M(Hyperbolic),
            components: &["x", "y"],
            points: &[&[(0, 1), (1, 1)], &[(-2, 1), (5, 4)]],
            expect: v(true, true),
        },
        MapCase {
            name: "half-plane onto the flat plane",
            domain: Hyperbolic,
            codomain: M(Flat2),
            components: &["x", "y"],
            points: &[&[(1, 1), (2, 1)]],
            expect: v(true, true),
        },
        MapCase {
            name: "sphere chart onto the flat plane",
            domain: Sphere,
            codomain: M(Flat2),
            components: &["x", "y"],
            points: &[&[(1, 2), (1, 3)], &[(0, 1), (0, 1)]],
            expect: v(true, true),
        },
        MapCase {
            name: "stretch into the half-plane",
            domain: Flat2,
            codomain: M(Hyperbolic),
            components: &["2*x", "y"],
            points: &[&[(1, 1), (1, 1)]],
            expect: v(false, false),
        },
    ]
}
