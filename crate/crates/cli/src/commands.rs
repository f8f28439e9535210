//! Manifest-driven subcommands. Each returns a JSON report, a one-paragraph
//! summary and whether every requested check passed.

use lapweil::error::Error;
use lapweil::expr::Expr;
use lapweil::morphism::{check_point, CheckOptions, PointReport};
use lapweil::riemann::{is_harmonic_jet, laplace_beltrami_oracle, laplacian};
use lapweil::scalar::{Rational, Scalar, DEFAULT_TOL};
use serde_json::{json, Map, Value};

use crate::manifest::{expr_error, parse_rational, Manifest, ManifestError, Mode};
use crate::report;
use crate::suite::{self, SuiteOptions};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Manifest(#[from] ManifestError),
    #[error("point {point}: {source}")]
    Point { point: String, source: Error },
    #[error("{0}")]
    Usage(String),
}

/// Command-line overrides of the manifest options.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub mode: Option<Mode>,
    pub tol: Option<f64>,
    pub fi: bool,
    pub functions: Vec<String>,
}

impl RunOptions {
    pub fn mode(&self, m: &Manifest) -> Mode {
        self.mode.or(m.mode).unwrap_or_default()
    }

    pub fn tol(&self, m: &Manifest) -> f64 {
        self.tol.or(m.tol).unwrap_or(DEFAULT_TOL)
    }
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub report: Value,
    pub summary: String,
    pub passed: bool,
}

fn point_label(x: &[Rational]) -> String {
    let parts: Vec<String> = x.iter().map(ToString::to_string).collect();
    format!("({})", parts.join(", "))
}

fn point_error(x: &[Rational], source: Error) -> CliError {
    CliError::Point {
        point: point_label(x),
        source,
    }
}

fn convert<S: Scalar>(x: &[Rational]) -> Vec<S> {
    x.iter().map(S::from_rational).collect()
}

fn header(command: &str, m: &Manifest, mode: Mode, tol: f64) -> Map<String, Value> {
    let mut out = report::envelope(command, mode.name());
    out.insert("manifest_sha256".into(), json!(m.digest));
    if mode == Mode::Float64 {
        out.insert("tol".into(), json!(tol));
    }
    out
}

fn finish(mut out: Map<String, Value>, passed: bool, summary: String) -> Outcome {
    out.insert("status".into(), json!(if passed { "pass" } else { "fail" }));
    Outcome {
        report: Value::Object(out),
        summary,
        passed,
    }
}

fn agree<S: Scalar>(a: &S, b: &S, tol: f64) -> bool {
    agree_at_scale(a, b, tol, b.to_f64().abs())
}

fn agree_at_scale<S: Scalar>(a: &S, b: &S, tol: f64, scale: f64) -> bool {
    if S::EXACT {
        a == b
    } else {
        (a.to_f64() - b.to_f64()).abs() <= tol * scale.max(1.0)
    }
}

// ---- laplacian -----------------------------------------------------------

pub fn laplacian_cmd(m: &Manifest, opts: &RunOptions) -> Result<Outcome, CliError> {
    match opts.mode(m) {
        Mode::Exact => laplacian_in::<Rational>(m, opts),
        Mode::Float64 => laplacian_in::<f64>(m, opts),
    }
}

fn laplacian_in<S: Scalar>(m: &Manifest, opts: &RunOptions) -> Result<Outcome, CliError> {
    let g = m.require_domain()?;
    let points = m.require_points()?;
    let (mode, tol) = (opts.mode(m), opts.tol(m));
    let functions = if opts.functions.is_empty() {
        &m.functions
    } else {
        &opts.functions
    };
    if functions.is_empty() {
        return Err(CliError::Usage(
            "no function given: use --function or a [laplacian] section".into(),
        ));
    }
    let mut out = header("laplacian", m, mode, tol);
    let mut results = Vec::new();
    let (mut checks, mut failures) = (0, 0);
    for (k, text) in functions.iter().enumerate() {
        let f = Expr::parse(text, g.coords())
            .map_err(|e| expr_error(&format!("function[{k}]"), text, e))?;
        let expected = match m.expect.laplacian.get(text) {
            Some(v) => Some(S::from_rational(&parse_rational("expect.laplacian", v)?)),
            None => None,
        };
        let mut rows = Vec::new();
        for x in points {
            let xs = convert::<S>(x);
            let value = laplacian(&f, g, &xs).map_err(|e| point_error(x, e))?;
            let oracle = laplace_beltrami_oracle(&f, g, &xs).map_err(|e| point_error(x, e))?;
            let scale = if S::EXACT {
                0.0
            } else {
                let xf: Vec<f64> = xs.iter().map(Scalar::to_f64).collect();
                suite::laplacian_scale(&f, g, &xf).map_err(|e| point_error(x, e))?
            };
            let agrees = agree_at_scale(&value, &oracle, tol, scale);
            let mut row = Map::new();
            row.insert("point".into(), report::vector(&xs));
            row.insert("laplacian".into(), report::scalar(&value));
            row.insert("oracle".into(), report::scalar(&oracle));
            row.insert("oracle_agrees".into(), json!(agrees));
            checks += 1;
            failures += usize::from(!agrees);
            if let Some(e) = &expected {
                let ok = agree_at_scale(&value, e, tol, scale);
                row.insert("expected".into(), report::scalar(e));
                row.insert("matches_expected".into(), json!(ok));
                checks += 1;
                failures += usize::from(!ok);
            }
            rows.push(Value::Object(row));
        }
        results.push(json!({ "function": text, "points": rows }));
    }
    out.insert("results".into(), Value::Array(results));
    let summary = format!(
        "laplacian: {} function(s) at {} point(s) in {} mode; {} of {checks} checks passed",
        functions.len(),
        points.len(),
        mode.name(),
        checks - failures
    );
    Ok(finish(out, failures == 0, summary))
}

// ---- check-map -----------------------------------------------------------

pub fn check_map_cmd(m: &Manifest, opts: &RunOptions) -> Result<Outcome, CliError> {
    match opts.mode(m) {
        Mode::Exact => check_map_in::<Rational>(m, opts),
        Mode::Float64 => check_map_in::<f64>(m, opts),
    }
}

fn verdict<S: Scalar>(r: &PointReport<S>) -> &'static str {
    match (r.semiconformal.is_semiconformal, r.harmonic) {
        (true, true) => "harmonic morphism",
        (false, true) => "harmonic, not semi-conformal",
        (true, false) => "semi-conformal, not harmonic",
        (false, false) => "neither harmonic nor semi-conformal",
    }
}

/// Certificates explaining a negative verdict.
fn failing_certificates<S: Scalar>(r: &PointReport<S>) -> Vec<Value> {
    let mut out = Vec::new();
    if !r.semiconformal.is_semiconformal {
        out.push(json!({
            "check": "semiconformal",
            "worst_defect": report::scalar(&r.semiconformal.worst_defect),
        }));
    }
    if !r.harmonic {
        out.push(json!({ "check": "tension", "value": report::vector(&r.tension) }));
    }
    if let Some((label, c)) = r.fi.as_ref().and_then(|f| f.failing_jet.as_ref()) {
        out.push(json!({
            "check": "harmonic_jet_pullback",
            "jet": label,
            "certificate": report::scalar(c),
        }));
    }
    out
}

fn expectations<S: Scalar>(m: &Manifest, r: &PointReport<S>) -> Vec<(&'static str, bool, bool)> {
    let e = &m.expect;
    [
        ("semiconformal", e.semiconformal, r.semiconformal.is_semiconformal),
        ("harmonic", e.harmonic, r.harmonic),
        ("harmonic_morphism", e.harmonic_morphism, r.harmonic_morphism),
    ]
    .into_iter()
    .filter_map(|(name, want, got)| want.map(|w| (name, w, got)))
    .collect()
}

fn check_map_in<S: Scalar>(m: &Manifest, opts: &RunOptions) -> Result<Outcome, CliError> {
    let g = m.require_domain()?;
    let h = m
        .codomain
        .as_ref()
        .ok_or(ManifestError::MissingSection("codomain"))?;
    let phi = m.map.as_ref().ok_or(ManifestError::MissingSection("map"))?;
    let points = m.require_points()?;
    let (mode, tol) = (opts.mode(m), opts.tol(m));
    let check_opts = CheckOptions { tol, fi: opts.fi };
    let mut out = header("check-map", m, mode, tol);
    out.insert("fi".into(), json!(opts.fi));
    let mut rows = Vec::new();
    let (mut ok_points, mut deficient, mut failures) = (0, 0, 0);
    for x in points {
        let xs = convert::<S>(x);
        let r = match check_point(phi, g, h, &xs, check_opts) {
            Ok(r) => r,
            Err(e @ Error::RankDeficient { .. }) => {
                deficient += 1;
                rows.push(json!({
                    "point": report::vector(&xs),
                    "status": "rank-deficient",
                    "note": format!("not a submersion here: {e}"),
                }));
                continue;
            }
            Err(e) => return Err(point_error(x, e)),
        };
        ok_points += 1;
        let mut row = match report::point_report(&r) {
            Value::Object(o) => o,
            _ => unreachable!("point reports are objects"),
        };
        row.insert("verdict".into(), json!(verdict(&r)));
        let certs = failing_certificates(&r);
        if !certs.is_empty() {
            row.insert("failing_certificates".into(), Value::Array(certs));
        }
        let mut cross = r.tension_agrees;
        if let Some(p) = r.probe_route {
            cross &= p == r.semiconformal.is_semiconformal;
        }
        if let Some(f) = &r.fi {
            cross &= f.agrees();
        }
        row.insert("cross_checks_agree".into(), json!(cross));
        failures += usize::from(!cross);
        let exp = expectations(m, &r);
        if !exp.is_empty() {
            let mut e = Map::new();
            for (name, want, got) in exp {
                e.insert(name.into(), json!({ "expected": want, "got": got }));
                failures += usize::from(want != got);
            }
            row.insert("expectations".into(), Value::Object(e));
        }
        rows.push(Value::Object(row));
    }
    out.insert("points".into(), Value::Array(rows));
    let summary = format!(
        "check-map: {} point(s) in {} mode, {ok_points} checked, {deficient} rank-deficient; {}",
        points.len(),
        mode.name(),
        if failures == 0 {
            "all checks passed".to_string()
        } else {
            format!("{failures} check(s) failed")
        }
    );
    Ok(finish(out, failures == 0, summary))
}

// ---- check-jet -----------------------------------------------------------

pub fn check_jet_cmd(m: &Manifest, opts: &RunOptions) -> Result<Outcome, CliError> {
    match opts.mode(m) {
        Mode::Exact => check_jet_in::<Rational>(m, opts),
        Mode::Float64 => check_jet_in::<f64>(m, opts),
    }
}

fn check_jet_in<S: Scalar>(m: &Manifest, opts: &RunOptions) -> Result<Outcome, CliError> {
    let g = m.require_domain()?;
    let spec = m.jet.as_ref().ok_or(ManifestError::MissingSection("jet"))?;
    let points = m.require_points()?;
    let (mode, tol) = (opts.mode(m), opts.tol(m));
    let jet = spec.to_jet::<S>().map_err(|e| ManifestError::Invalid {
        field: "jet".into(),
        message: e.to_string(),
    })?;
    if jet.dim() != g.dim() {
        return Err(ManifestError::Invalid {
            field: "jet.covector".into(),
            message: format!("expected {} entries, found {}", g.dim(), jet.dim()),
        }
        .into());
    }
    let mut out = header("check-jet", m, mode, tol);
    out.insert(
        "jet".into(),
        json!({
            "value": report::scalar(&jet.value),
            "covector": report::vector(&jet.covector),
            "form": report::matrix(&jet.form),
        }),
    );
    let mut rows = Vec::new();
    let mut failures = 0;
    for x in points {
        let xs = convert::<S>(x);
        let c = is_harmonic_jet(&jet, g, &xs, tol).map_err(|e| point_error(x, e))?;
        let classical =
            suite::classical_jet_laplacian(&jet, g, &xs).map_err(|e| point_error(x, e))?;
        let agrees = agree(&c.certificate, &classical, tol);
        failures += usize::from(!agrees);
        let mut row = Map::new();
        row.insert("point".into(), report::vector(&xs));
        row.insert("harmonic".into(), json!(c.harmonic));
        row.insert("certificate".into(), report::scalar(&c.certificate));
        row.insert("classical".into(), report::scalar(&classical));
        row.insert("cross_checks_agree".into(), json!(agrees));
        if let Some(want) = m.expect.jet_harmonic {
            row.insert(
                "expectations".into(),
                json!({ "jet_harmonic": { "expected": want, "got": c.harmonic } }),
            );
            failures += usize::from(want != c.harmonic);
        }
        rows.push(Value::Object(row));
    }
    out.insert("points".into(), Value::Array(rows));
    let summary = format!(
        "check-jet: {} point(s) in {} mode; {}",
        points.len(),
        mode.name(),
        if failures == 0 {
            "all checks passed".to_string()
        } else {
            format!("{failures} check(s) failed")
        }
    );
    Ok(finish(out, failures == 0, summary))
}

// ---- verify-paper --------------------------------------------------------

pub fn verify_paper_cmd(mode: Mode, opts: &SuiteOptions) -> Outcome {
    let results = suite::run_suite(mode == Mode::Exact, opts);
    let mut out = report::envelope("verify-paper", mode.name());
    out.insert("seed".into(), json!(opts.seed));
    if opts.sign != Default::default() {
        out.insert("gamma_sign".into(), json!("flipped"));
    }
    let failed: Vec<&str> = results.iter().filter(|r| !r.passed).map(|r| r.name).collect();
    out.insert(
        "lines".into(),
        Value::Array(results.iter().map(suite::LineResult::to_json).collect()),
    );
    let mut summary: Vec<String> = results
        .iter()
        .map(|r| {
            format!(
                "{} {:<30} {:>6} cases",
                if r.passed { "PASS" } else { "FAIL" },
                r.name,
                r.cases
            )
        })
        .collect();
    summary.push(format!(
        "verify-paper: {} of {} lines passed in {} mode (seed {})",
        results.len() - failed.len(),
        results.len(),
        mode.name(),
        opts.seed
    ));
    finish(out, failed.is_empty(), summary.join("\n"))
}
