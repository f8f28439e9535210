//! TOML manifests: metrics, maps, points and options, all as DSL strings.
//!
//! See `docs/manifest.md` for the format.

use std::collections::BTreeMap;
use std::path::Path;

use lapweil::expr::Expr;
use lapweil::linalg::Matrix;
use lapweil::morphism::SmoothMap;
use lapweil::riemann::{Jet2Scalar, Metric};
use lapweil::scalar::{Rational, Scalar};
use serde::Deserialize;
use sha2::{Digest, Sha256};

#[derive(Debug, thiserror::Error)]
pub enum ManifestError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed manifest: {0}")]
    Toml(String),
    #[error("missing section [{0}]")]
    MissingSection(&'static str),
    #[error("{field}: {message}")]
    Invalid { field: String, message: String },
    #[error("{field}: {source}\n  {text}\n  {caret}")]
    Expr {
        field: String,
        text: String,
        caret: String,
        source: lapweil::error::Error,
    },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Exact,
    Float64,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Float64 => "float64",
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpace {
    coords: Vec<String>,
    dim: Option<usize>,
    metric: BTreeMap<String, String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMap {
    components: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawNumber {
    Int(i64),
    Text(String),
    Float(f64),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPoints {
    at: Vec<Vec<RawNumber>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOptions {
    mode: Option<Mode>,
    tol: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLaplacian {
    functions: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawJet {
    value: RawNumber,
    covector: Vec<RawNumber>,
    form: Vec<Vec<RawNumber>>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expect {
    pub semiconformal: Option<bool>,
    pub harmonic: Option<bool>,
    pub harmonic_morphism: Option<bool>,
    pub jet_harmonic: Option<bool>,
    /// Expected Laplacian of each listed function, the same at every point.
    #[serde(default)]
    pub laplacian: BTreeMap<String, String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawManifest {
    domain: Option<RawSpace>,
    codomain: Option<RawSpace>,
    map: Option<RawMap>,
    points: Option<RawPoints>,
    #[serde(default)]
    options: RawOptions,
    laplacian: Option<RawLaplacian>,
    jet: Option<RawJet>,
    #[serde(default)]
    expect: Expect,
}

/// A 2-jet given with exact coefficients.
#[derive(Clone, Debug)]
pub struct JetSpec {
    pub value: Rational,
    pub covector: Vec<Rational>,
    pub form: Vec<Vec<Rational>>,
}

impl JetSpec {
    pub fn to_jet<S: Scalar>(&self) -> lapweil::error::Result<Jet2Scalar<S>> {
        let conv = |q: &Rational| S::from_rational(q);
        let form = Matrix::from_rows(
            self.form
                .iter()
                .map(|r| r.iter().map(conv).collect())
                .collect(),
        )?;
        Jet2Scalar::new(
            conv(&self.value),
            self.covector.iter().map(conv).collect(),
            form,
        )
    }
}

#[derive(Clone, Debug)]
pub struct Manifest {
    pub domain: Option<Metric>,
    pub codomain: Option<Metric>,
    pub map: Option<SmoothMap>,
    pub points: Vec<Vec<Rational>>,
    pub mode: Option<Mode>,
    pub tol: Option<f64>,
    pub functions: Vec<String>,
    pub jet: Option<JetSpec>,
    pub expect: Expect,
    /// Hex SHA-256 of the manifest bytes.
    pub digest: String,
}

fn invalid(field: impl Into<String>, message: impl Into<String>) -> ManifestError {
    ManifestError::Invalid {
        field: field.into(),
        message: message.into(),
    }
}

/// Wraps an expression error with the offending text and a caret under its offset.
pub fn expr_error(field: &str, text: &str, e: lapweil::error::Error) -> ManifestError {
    use lapweil::error::Error as E;
    let offset = match &e {
        E::Syntax { offset, .. }
        | E::UnknownIdentifier { offset, .. }
        | E::NonIntegerExponent { offset } => Some(*offset),
        _ => None,
    };
    let caret = offset.map_or_else(String::new, |o| {
        let col = text.get(..o.min(text.len())).map_or(o, |s| s.chars().count());
        format!("{}^", " ".repeat(col))
    });
    ManifestError::Expr {
        field: field.into(),
        text: text.into(),
        caret,
        source: e,
    }
}

/// Exact value of a constant DSL expression such as `"-3/4"` or `"2^10"`.
pub fn parse_rational(field: &str, text: &str) -> Result<Rational, ManifestError> {
    let no_vars: [&str; 0] = [];
    let e = Expr::parse(text, &no_vars).map_err(|e| expr_error(field, text, e))?;
    e.eval_like(&[], &Rational::from_i64(0)).map_err(|e| expr_error(field, text, e))
}

fn number(field: &str, n: &RawNumber) -> Result<Rational, ManifestError> {
    match n {
        RawNumber::Int(i) => Ok(Rational::from_i64(*i)),
        RawNumber::Text(t) => parse_rational(field, t),
        RawNumber::Float(f) => Err(invalid(
            field,
            format!("TOML float {f} is not allowed; write it as a string such as \"1/2\""),
        )),
    }
}

fn space(section: &'static str, raw: RawSpace) -> Result<Metric, ManifestError> {
    let n = raw.coords.len();
    if n == 0 {
        return Err(invalid(format!("{section}.coords"), "at least one coordinate is required"));
    }
    if let Some(d) = raw.dim {
        if d != n {
            return Err(invalid(
                format!("{section}.dim"),
                format!("dim = {d} but {n} coordinates are listed"),
            ));
        }
    }
    let mut upper = Vec::with_capacity(n * (n + 1) / 2);
    let mut consumed = std::collections::BTreeSet::new();
    for i in 0..n {
        for j in i..n {
            let (a, b) = (&raw.coords[i], &raw.coords[j]);
            let key = format!("{a},{b}");
            let alt = format!("{b},{a}");
            let text = match (raw.metric.get(&key), raw.metric.get(&alt)) {
                (Some(t), None) | (None, Some(t)) => t,
                (Some(t), Some(_)) if i == j => t,
                (Some(_), Some(_)) => {
                    return Err(invalid(
                        format!("{section}.metric"),
                        format!("entry ({a},{b}) is given twice, as \"{key}\" and \"{alt}\""),
                    ))
                }
                (None, None) => {
                    return Err(invalid(
                        format!("{section}.metric"),
                        format!("missing entry \"{key}\""),
                    ))
                }
            };
            consumed.insert(key.clone());
            consumed.insert(alt);
            Expr::parse(text, &raw.coords)
                .map_err(|e| expr_error(&format!("{section}.metric.\"{key}\""), text, e))?;
            upper.push(text.clone());
        }
    }
    let extra: Vec<&String> = raw.metric.keys().filter(|k| !consumed.contains(*k)).collect();
    if !extra.is_empty() {
        return Err(invalid(
            format!("{section}.metric"),
            format!("keys must be coordinate pairs \"a,b\"; unexpected {extra:?}"),
        ));
    }
    Metric::new(&raw.coords, &upper).map_err(|e| invalid(section, e.to_string()))
}

impl Manifest {
    pub fn load(path: &Path) -> Result<Self, ManifestError> {
        let bytes = std::fs::read(path).map_err(|source| ManifestError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let text = String::from_utf8(bytes)
            .map_err(|_| ManifestError::Toml("file is not valid UTF-8".into()))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ManifestError> {
        let raw: RawManifest =
            toml::from_str(text).map_err(|e| ManifestError::Toml(e.to_string()))?;
        let digest = hex::encode(Sha256::digest(text.as_bytes()));
        let domain = raw.domain.map(|s| space("domain", s)).transpose()?;
        let codomain = raw.codomain.map(|s| space("codomain", s)).transpose()?;
        let map = match raw.map {
            None => None,
            Some(m) => {
                let d = domain.as_ref().ok_or(ManifestError::MissingSection("domain"))?;
                for (k, c) in m.components.iter().enumerate() {
                    Expr::parse(c, d.coords())
                        .map_err(|e| expr_error(&format!("map.components[{k}]"), c, e))?;
                }
                if let Some(h) = &codomain {
                    if h.dim() != m.components.len() {
                        return Err(invalid(
                            "map.components",
                            format!(
                                "{} components for a {}-dimensional codomain",
                                m.components.len(),
                                h.dim()
                            ),
                        ));
                    }
                }
                Some(SmoothMap::new(d.coords(), &m.components).map_err(|e| invalid("map", e.to_string()))?)
            }
        };
        let mut points = Vec::new();
        if let Some(p) = raw.points {
            let n = domain.as_ref().map(Metric::dim);
            for (k, row) in p.at.iter().enumerate() {
                let field = format!("points.at[{k}]");
                if let Some(n) = n {
                    if row.len() != n {
                        return Err(invalid(
                            field,
                            format!("expected {n} coordinates, found {}", row.len()),
                        ));
                    }
                }
                points.push(row.iter().map(|v| number(&field, v)).collect::<Result<Vec<_>, _>>()?);
            }
        }
        if let Some(t) = raw.options.tol {
            if !(t.is_finite() && t >= 0.0) {
                return Err(invalid("options.tol", "must be a finite non-negative number"));
            }
        }
        let functions = raw.laplacian.map(|l| l.functions).unwrap_or_default();
        let jet = match raw.jet {
            None => None,
            Some(j) => Some(JetSpec {
                value: number("jet.value", &j.value)?,
                covector: j
                    .covector
                    .iter()
                    .map(|v| number("jet.covector", v))
                    .collect::<Result<_, _>>()?,
                form: j
                    .form
                    .iter()
                    .map(|r| r.iter().map(|v| number("jet.form", v)).collect())
                    .collect::<Result<_, _>>()?,
            }),
        };
        for (f, v) in &raw.expect.laplacian {
            parse_rational(&format!("expect.laplacian.\"{f}\""), v)?;
        }
        Ok(Self {
            domain,
            codomain,
            map,
            points,
            mode: raw.options.mode,
            tol: raw.options.tol,
            functions,
            jet,
            expect: raw.expect,
            digest,
        })
    }

    pub fn require_domain(&self) -> Result<&Metric, ManifestError> {
        self.domain.as_ref().ok_or(ManifestError::MissingSection("domain"))
    }

    pub fn require_points(&self) -> Result<&[Vec<Rational>], ManifestError> {
        if self.points.is_empty() {
            return Err(ManifestError::MissingSection("points"));
        }
        Ok(&self.points)
    }
}
