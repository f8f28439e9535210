//! JSON encoding of scalars, vectors and reports, plus the stderr summary.

use lapweil::innerprod::SemiConformalReport;
use lapweil::linalg::Matrix;
use lapweil::morphism::{FiReport, PointReport};
use lapweil::scalar::Scalar;
use serde_json::{json, Map, Value};

pub const TOOL: &str = "lapweil";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Exact values as `"p/q"`, floats as JSON numbers.
pub fn scalar<S: Scalar>(v: &S) -> Value {
    if S::EXACT {
        Value::String(v.certificate())
    } else {
        json!(v.to_f64())
    }
}

pub fn vector<S: Scalar>(v: &[S]) -> Value {
    Value::Array(v.iter().map(scalar).collect())
}

pub fn matrix<S: Scalar>(m: &Matrix<S>) -> Value {
    Value::Array((0..m.rows()).map(|i| vector(m.row(i))).collect())
}

fn semiconformal<S: Scalar>(r: &SemiConformalReport<S>, probe: Option<bool>) -> Value {
    let mut out = Map::new();
    out.insert("holds".into(), json!(r.is_semiconformal));
    out.insert(
        "dilation".into(),
        r.dilation.as_ref().map_or(Value::Null, scalar),
    );
    out.insert("worst_defect".into(), scalar(&r.worst_defect));
    if let Some(p) = probe {
        out.insert("probe_route".into(), json!(p));
    }
    Value::Object(out)
}

fn fi<S: Scalar>(r: &FiReport<S>) -> Value {
    json!({
        "direct": r.direct,
        "pullback": r.pullback,
        "agrees": r.agrees(),
        "jets_checked": r.jets_checked,
        "failing_jet": r.failing_jet.as_ref().map_or(Value::Null, |(label, c)| json!({
            "label": label,
            "certificate": scalar(c),
        })),
    })
}

pub fn point_report<S: Scalar>(r: &PointReport<S>) -> Value {
    let mut out = Map::new();
    out.insert("point".into(), vector(&r.point));
    out.insert("status".into(), json!("ok"));
    out.insert("image".into(), vector(&r.image));
    out.insert("differential".into(), matrix(&r.differential));
    out.insert(
        "semiconformal".into(),
        semiconformal(&r.semiconformal, r.probe_route),
    );
    out.insert(
        "tension".into(),
        json!({
            "mirror_defect": vector(&r.tension),
            "classical": vector(&r.classical_tension),
            "agrees": r.tension_agrees,
        }),
    );
    out.insert("harmonic".into(), json!(r.harmonic));
    out.insert("harmonic_morphism".into(), json!(r.harmonic_morphism));
    if let Some(f) = &r.fi {
        out.insert("fuglede_ishihara".into(), fi(f));
    }
    Value::Object(out)
}

/// Common header fields of every report.
pub fn envelope(command: &str, mode: &str) -> Map<String, Value> {
    let mut out = Map::new();
    out.insert("tool".into(), json!(TOOL));
    out.insert("version".into(), json!(VERSION));
    out.insert("command".into(), json!(command));
    out.insert("mode".into(), json!(mode));
    out
}

/// Pretty JSON with a trailing newline.
pub fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values are serializable");
    s.push('\n');
    s
}
