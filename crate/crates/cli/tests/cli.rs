use std::path::PathBuf;
use std::process::{Command, Output};

use lapweil::expr::Expr;
use lapweil::scalar::{Rational, Ring, Scalar};
use serde_json::Value;

fn corpus(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lapweil"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_corpus(cmd: &str, manifest: &str, extra: &[&str]) -> Output {
    let path = corpus(manifest);
    let mut args = vec![cmd, path.to_str().unwrap()];
    args.extend_from_slice(extra);
    run(&args)
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}\nstderr: {}", String::from_utf8_lossy(&out.stderr))
    })
}

fn rational(v: &Value) -> Rational {
    let s = v.as_str().expect("exact values are strings");
    let (p, q) = s.split_once('/').expect("p/q");
    let r = Rational::new(p.parse().unwrap(), q.parse().unwrap());
    // lowest terms with a positive denominator
    assert_eq!(format!("{}/{}", r.numer(), r.denom()), s);
    r
}

fn write_manifest(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    std::io::Write::write_all(&mut f, text.as_bytes()).unwrap();
    f
}

#[test]
fn flat_laplacian_values() {
    let out = run_corpus("laplacian", "flat-laplacian.toml", &[]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["command"], "laplacian");
    assert_eq!(r["manifest_sha256"].as_str().unwrap().len(), 64);
    for row in r["results"][0]["points"].as_array().unwrap() {
        assert_eq!(row["laplacian"], "4/1");
        assert_eq!(row["oracle_agrees"], true);
    }
    for row in r["results"][1]["points"].as_array().unwrap() {
        assert_eq!(row["laplacian"], "0/1");
    }
}

#[test]
fn function_flag_overrides_manifest_list() {
    let out = run_corpus("laplacian", "flat-laplacian.toml", &["--function", "x^2*y"]);
    let r = json(&out);
    let results = r["results"].as_array().unwrap();
    assert_eq!(results.len(), 1);
    // laplacian of x^2 y is 2y
    let rows = results[0]["points"].as_array().unwrap();
    assert_eq!(rows[1]["laplacian"], "4/1");
}

#[test]
fn syntax_error_exit_two_with_caret() {
    let out = run_corpus("laplacian", "bad-syntax.toml", &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("syntax error at byte 2"), "{err}");
    assert!(err.contains("  x^\n    ^"), "{err}");
}

#[test]
fn input_errors_exit_two() {
    let missing = run(&["check-map", "/nonexistent/manifest.toml"]);
    assert_eq!(missing.status.code(), Some(2));
    let exact_log = run_corpus("laplacian", "hyperbolic-laplacian.toml", &["--function", "log(y)"]);
    assert_eq!(exact_log.status.code(), Some(2));
    let no_map = run_corpus("check-map", "flat-laplacian.toml", &[]);
    assert_eq!(no_map.status.code(), Some(2));
    let bad_flag = run(&["verify-paper", "--mode", "decimal"]);
    assert_eq!(bad_flag.status.code(), Some(2));
}

#[test]
fn non_positive_definite_metric_exit_two() {
    let f = write_manifest(
        r#"
[domain]
coords = ["x", "y"]
[domain.metric]
"x,x" = "1"
"x,y" = "2"
"y,y" = "1"
[points]
at = [[0, 0]]
[laplacian]
functions = ["x^2"]
"#,
    );
    let out = run(&["laplacian", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("point (0, 0)"), "{err}");
}

#[test]
fn failed_expectation_exit_one() {
    let text = std::fs::read_to_string(corpus("stretch.toml")).unwrap();
    let f = write_manifest(&text.replace("semiconformal = false", "semiconformal = true"));
    let out = run(&["check-map", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let r = json(&out);
    assert_eq!(r["status"], "fail");
    assert_eq!(r["points"][0]["expectations"]["semiconformal"]["got"], false);
}

#[test]
fn complex_square_report() {
    let out = run_corpus("check-map", "complex-square.toml", &["--fi"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    let pts = r["points"].as_array().unwrap();
    assert_eq!(pts[0]["verdict"], "harmonic morphism");
    assert_eq!(pts[0]["semiconformal"]["dilation"], "20/1");
    assert_eq!(pts[0]["fuglede_ishihara"]["agrees"], true);
    assert_eq!(pts[1]["status"], "rank-deficient");
    assert!(pts[1]["note"].as_str().unwrap().contains("rank 0"));
    // the point after the critical one is still checked
    assert_eq!(pts[2]["status"], "ok");
}

#[test]
fn stretch_names_failing_certificate() {
    let out = run_corpus("check-map", "stretch.toml", &["--fi"]);
    let r = json(&out);
    let p = &r["points"][0];
    assert_eq!(p["harmonic_morphism"], false);
    let certs = p["failing_certificates"].as_array().unwrap();
    assert!(certs.iter().any(|c| c["check"] == "semiconformal" && c["worst_defect"] == "3/1"));
    assert!(certs.iter().any(|c| c["check"] == "harmonic_jet_pullback"));
}

#[test]
fn reports_are_byte_stable() {
    for (cmd, m, extra) in [
        ("check-map", "hopf.toml", &["--fi"][..]),
        ("laplacian", "sphere-laplacian.toml", &[]),
        ("check-jet", "hyperbolic-jet.toml", &[]),
    ] {
        let a = run_corpus(cmd, m, extra);
        let b = run_corpus(cmd, m, extra);
        assert_eq!(a.stdout, b.stdout, "{m}");
        assert!(!a.stdout.is_empty());
    }
    let a = run(&["verify-paper", "--seed", "5"]);
    let b = run(&["verify-paper", "--seed", "5"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn verdicts_do_not_depend_on_seed() {
    let verdicts = |seed: &str| {
        let r = json(&run(&["verify-paper", "--seed", seed, "--mode", "float64"]));
        r["lines"]
            .as_array()
            .unwrap()
            .iter()
            .map(|l| (l["name"].as_str().unwrap().to_owned(), l["passed"].as_bool().unwrap()))
            .collect::<Vec<_>>()
    };
    let base = verdicts("0");
    assert!(base.iter().all(|(_, p)| *p));
    for seed in ["1", "77", "123456789"] {
        assert_eq!(verdicts(seed), base, "seed {seed}");
    }
}

#[test]
fn flipped_sign_fails_only_the_sign_line() {
    let out = run(&["verify-paper", "--flip-gamma-sign"]);
    assert_eq!(out.status.code(), Some(1));
    let r = json(&out);
    let failed: Vec<&Value> = r["lines"].as_array().unwrap().iter().filter(|l| l["passed"] == false).collect();
    assert_eq!(failed.len(), 1);
    assert_eq!(failed[0]["name"], "levi-civita-sign");
    assert_eq!(failed[0]["counterexample"]["at"]["metric"], "hyperbolic half-plane");
}

#[test]
fn summary_output_goes_to_stdout_only() {
    let out = run_corpus("check-jet", "hyperbolic-jet.toml", &["--output", "summary"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stderr.is_empty());
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("check-jet:"));
}

#[test]
fn mode_flag_overrides_manifest() {
    let out = run_corpus("laplacian", "hyperbolic-transcendental.toml", &[]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["mode"], "float64");
    let out = run_corpus("laplacian", "hyperbolic-transcendental.toml", &["--mode", "exact"]);
    assert_eq!(out.status.code(), Some(2));
}

// ---- self-certification: substitute reported values back into their identities

#[test]
fn dilation_certificates_reproduce_row_products() {
    let r = json(&run_corpus("check-map", "hopf.toml", &[]));
    for p in r["points"].as_array().unwrap() {
        let rows: Vec<Vec<Rational>> = p["differential"]
            .as_array()
            .unwrap()
            .iter()
            .map(|row| row.as_array().unwrap().iter().map(rational).collect())
            .collect();
        let lambda = rational(&p["semiconformal"]["dilation"]);
        for (i, a) in rows.iter().enumerate() {
            for (j, b) in rows.iter().enumerate() {
                let dot = a.iter().zip(b).fold(Rational::from_i64(0), |s, (u, v)| s + u * v);
                let want = if i == j { lambda.clone() } else { Rational::from_i64(0) };
                assert_eq!(dot, want);
            }
        }
    }
}

#[test]
fn laplacian_certificates_match_formula() {
    // on the sphere chart the Laplacian is (1 + x^2 + y^2)^2 / 4 times the flat one
    let r = json(&run_corpus("laplacian", "sphere-laplacian.toml", &[]));
    for res in r["results"].as_array().unwrap() {
        let f = res["function"].as_str().unwrap();
        let flat_lap = match f {
            "x*y" => "0",
            "x*y^2 - x^3 + y" => "2*x - 6*x",
            "x^2 + y^2" => "4",
            other => panic!("unexpected {other}"),
        };
        let e = Expr::parse(&format!("(1 + x^2 + y^2)^2/4*({flat_lap})"), &["x", "y"]).unwrap();
        for row in res["points"].as_array().unwrap() {
            let x: Vec<Rational> = row["point"].as_array().unwrap().iter().map(rational).collect();
            assert_eq!(e.eval(&x).unwrap(), rational(&row["laplacian"]), "{f}");
        }
    }
}

#[test]
fn jet_certificates_match_classical_formula() {
    // conformal metric in two dimensions: certificate = y^2 tr(H)
    let r = json(&run_corpus("check-jet", "hyperbolic-jet.toml", &[]));
    for row in r["points"].as_array().unwrap() {
        let c = rational(&row["certificate"]);
        assert!(c.is_zero());
        assert_eq!(row["classical"], row["certificate"]);
        assert_eq!(row["harmonic"], true);
    }
}

#[test]
fn tension_certificates_match_flat_hessian_trace() {
    // flat to flat: tension of (x^2 + y^2, x) is (4, 0)
    let r = json(&run_corpus("check-map", "quadratic-neither.toml", &[]));
    for p in r["points"].as_array().unwrap() {
        let t: Vec<Rational> = p["tension"]["mirror_defect"].as_array().unwrap().iter().map(rational).collect();
        assert_eq!(t, vec![Rational::from_i64(4), Rational::from_i64(0)]);
        assert_eq!(p["tension"]["classical"], p["tension"]["mirror_defect"]);
    }
}
