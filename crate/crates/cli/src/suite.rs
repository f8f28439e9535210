//! The `verify-paper` suite: one named line per statement, each checked on
//! seeded random instances and on the built-in corpus.

use std::time::Instant;

use lapweil::error::{Error, Result};
use lapweil::expr::Expr;
use lapweil::innerprod::{
    cholesky, frame_probe, is_lsmall, lsmall_defects, lsmall_probe, orthonormal_relations_hold,
    preserves_lsmall, semiconformal_matrix, sum_lsmall_condition, sum_lsmall_defects,
    tracezero_selfadjoint_basis, InnerProduct,
};
use lapweil::linalg::Matrix;
use lapweil::morphism::{check_point, classical_tension, tension_parts, CheckOptions, SmoothMap};
use lapweil::riemann::{
    christoffel, first_order_mirror_defect, harmonic_jet_basis, is_harmonic_jet,
    jet_on_lneighbour, laplace_beltrami_oracle, laplacian, lsmall_symmetry_evidence,
    verify_levicivita, Jet2Scalar, LProbe, Metric, ProbeCarrier, ProbeParts, SignConvention,
};
use lapweil::scalar::{Ring, Scalar};
use lapweil::weil::{jet2_to_lap, Jet2, Lap};
use serde_json::{json, Value};

use crate::corpus::{
    laplacian_pairs, map_cases, test_functions, transcendental_pairs, MapCase, MetricId,
};
use crate::random::Sampler;
use crate::report;

/// Relative tolerance used when the suite runs in float64.
pub const TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug)]
pub struct SuiteOptions {
    pub seed: u64,
    /// Sign used by the connection in the Levi-Civita line.
    pub sign: SignConvention,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            sign: SignConvention::Standard,
        }
    }
}

#[derive(Clone, Debug)]
pub struct LineResult {
    pub name: &'static str,
    pub statement: &'static str,
    pub passed: bool,
    pub cases: usize,
    pub note: Option<String>,
    pub counterexample: Option<Value>,
    pub seconds: f64,
}

impl LineResult {
    /// JSON form; timings are left out so reports stay byte-stable.
    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "name": self.name,
            "statement": self.statement,
            "passed": self.passed,
            "cases": self.cases,
        });
        if let Some(n) = &self.note {
            v["note"] = json!(n);
        }
        if let Some(c) = &self.counterexample {
            v["counterexample"] = c.clone();
        }
        v
    }
}

#[derive(Default)]
struct Tally {
    cases: usize,
    failure: Option<Value>,
    note: Option<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, witness: impl FnOnce() -> Value) {
        self.cases += 1;
        if !ok && self.failure.is_none() {
            self.failure = Some(witness());
        }
    }
}

type LineFn = fn(&mut Sampler, &SuiteOptions) -> Result<Tally>;

struct Line {
    name: &'static str,
    statement: &'static str,
    run_exact: LineFn,
    run_float: LineFn,
}

macro_rules! line {
    ($name:literal, $statement:literal, $f:ident) => {
        Line {
            name: $name,
            statement: $statement,
            run_exact: $f::<lapweil::scalar::Rational>,
            run_float: $f::<f64>,
        }
    };
}

fn lines() -> Vec<Line> {
    vec![
        line!(
            "algebra-laws",
            "Jet1(n), Jet2(n) and Lap(n) are commutative associative rings, n <= 5",
            algebra_laws
        ),
        line!(
            "laplace-algebra-quotient",
            "Lap(n) has basis 1, x_i, sigma; restriction from Jet2(n) is a ring map whose kernel on jets vanishing to first order is the trace-zero Hessians",
            laplace_algebra_quotient
        ),
        line!(
            "first-order-agreement",
            "functions agreeing to first order differ on the L-probe by c <z,z> with c = tr(G^-1 (H1 - H2)) / 2n",
            first_order_agreement
        ),
        line!(
            "lsmall-probe-identity",
            "the L-probe u satisfies <u,a><u,b> = (1/n)<u,u><a,b> for all a, b",
            lsmall_probe_identity
        ),
        line!(
            "coordinate-characterization",
            "u is L-small iff in orthonormal coordinates the mixed products vanish and the squares agree",
            coordinate_characterization
        ),
        line!(
            "sum-condition",
            "for L-small a, b the sum a + b is L-small iff <a,u><b,v> + <a,v><b,u> = (2/n)<a,b><u,v>",
            sum_condition
        ),
        line!(
            "trace-zero-selfadjoint",
            "for self-adjoint L, <Lu,u> = tr(L) <u,u>/n on the L-probe, so trace-zero maps kill L-small vectors",
            trace_zero_selfadjoint
        ),
        line!(
            "semiconformal-matrices",
            "a linear map preserves L-small vectors iff it is semi-conformal, and then <Au,Au> = (m/n) Lambda <u,u>",
            semiconformal_matrices
        ),
        line!(
            "quadratic-perturbation",
            "adding a quadratic term B(u,u) does not change whether a 2-jet map preserves L-small vectors",
            quadratic_perturbation
        ),
        line!(
            "exp-log-inverse",
            "exp_x and log_x are mutually inverse on the second neighbourhood",
            exp_log_inverse
        ),
        line!(
            "log-isometry",
            "g(x,z) = <log_x z, log_x z> = g(z,x) for second-order neighbours z",
            log_isometry
        ),
        line!(
            "mirror-involution",
            "the mirror image z' = exp_x(-log_x z) satisfies z'' = z",
            mirror_involution
        ),
        line!(
            "nabla-axioms",
            "nabla(x,x,z) = z, nabla(x,y,x) = y and nabla(x,y,z) = nabla(x,z,y)",
            nabla_axioms
        ),
        line!(
            "levi-civita-sign",
            "with the chosen sign of Gamma, nabla preserves the metric; with the opposite sign it does not on the half-plane",
            levi_civita_sign
        ),
        line!(
            "mirror-defect-first-order",
            "f(z) + f(z') - 2 f(x) vanishes for first-order neighbours z",
            mirror_defect_first_order
        ),
        line!(
            "second-difference-pure-sigma",
            "f(z) + f(z') - 2 f(x) over the L-probe equals (Delta f / n) g(x,z), with no value or gradient part",
            second_difference_pure_sigma
        ),
        line!(
            "laplacian-vs-oracle",
            "the sigma-coefficient Laplacian equals the classical Laplace-Beltrami operator",
            laplacian_vs_oracle
        ),
        line!(
            "lsmall-symmetry-evidence",
            "log_z(x) is L-small at z for the generic L-neighbour z of x",
            lsmall_symmetry_evidence_line
        ),
        line!(
            "harmonic-jet-basis",
            "affine and trace-zero quadratic jets in log_x are harmonic, independent, and enough to recognize harmonicity",
            harmonic_jet_basis_line
        ),
        line!(
            "harmonic-jet-converse",
            "a harmonic 2-jet vanishing to first order vanishes on the L-neighbourhood",
            harmonic_jet_converse
        ),
        line!(
            "semiconformal-routes-agree",
            "the differential is semi-conformal iff the map sends the generic L-neighbour to an L-neighbour",
            semiconformal_routes_agree
        ),
        line!(
            "tension-vs-classical",
            "phi(z') - phi(z)' is a pure sigma-multiple whose coefficient is the classical tension field",
            tension_vs_classical
        ),
        line!(
            "fuglede-ishihara",
            "a submersion is a harmonic morphism at x iff it pulls harmonic 2-jets back to harmonic 2-jets",
            fuglede_ishihara
        ),
        line!(
            "codomain-line-collapse",
            "every submersion to the line is semi-conformal, and harmonic iff its Laplacian vanishes",
            codomain_line_collapse
        ),
        line!(
            "morphism-corpus",
            "built-in maps get their known verdicts; the complex square has Lambda = 4(x^2 + y^2)",
            morphism_corpus
        ),
    ]
}

pub fn line_names() -> Vec<&'static str> {
    lines().iter().map(|l| l.name).collect()
}

fn run(line: &Line, exact: bool, opts: &SuiteOptions) -> LineResult {
    let start = Instant::now();
    let mut rng = Sampler::derived(opts.seed, line.name);
    let f = if exact { line.run_exact } else { line.run_float };
    let (passed, cases, note, counterexample) = match f(&mut rng, opts) {
        Ok(t) => (t.failure.is_none(), t.cases, t.note, t.failure),
        Err(e) => (false, 0, None, Some(json!({ "error": e.to_string() }))),
    };
    LineResult {
        name: line.name,
        statement: line.statement,
        passed,
        cases,
        note,
        counterexample,
        seconds: start.elapsed().as_secs_f64(),
    }
}

/// Runs one line by name.
pub fn run_line(name: &str, exact: bool, opts: &SuiteOptions) -> Option<LineResult> {
    lines()
        .iter()
        .find(|l| l.name == name)
        .map(|l| run(l, exact, opts))
}

/// Runs every line, in parallel, returning results in declaration order.
pub fn run_suite(exact: bool, opts: &SuiteOptions) -> Vec<LineResult> {
    let all = lines();
    std::thread::scope(|scope| {
        let handles: Vec<_> = all
            .iter()
            .map(|l| scope.spawn(move || run(l, exact, opts)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("suite line panicked"))
            .collect()
    })
}

// ---- helpers -------------------------------------------------------------

fn near<E: Ring>(a: &E, b: &E) -> bool {
    if <E::Base as Scalar>::EXACT {
        return a == b;
    }
    let scale = 1.0 + a.magnitude().max(b.magnitude());
    a.sub(b).is_negligible(scale, TOL)
}

fn near_all<E: Ring>(a: &[E], b: &[E]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| near(x, y))
}

fn negligible<E: Ring>(a: &E, scale: f64) -> bool {
    a.is_negligible(1.0 + scale, TOL)
}

fn pure_sigma<S: Scalar>(p: &ProbeParts<S>, scale: f64) -> bool {
    negligible(&p.value, scale) && p.grad.iter().all(|g| negligible(g, scale))
}

fn dbg<T: std::fmt::Debug>(v: &T) -> Value {
    json!(format!("{v:?}"))
}

fn point_json<S: Scalar>(id: MetricId, x: &[S]) -> Value {
    json!({ "metric": id.name(), "point": report::vector(x) })
}

fn constants<S: Scalar, E: Ring<Base = S>>(v: &[S], like: &E) -> Vec<E> {
    v.iter().map(|c| like.constant_like(c.clone())).collect()
}

fn parse(text: &str, id: MetricId) -> Result<Expr> {
    Expr::parse(text, id.coords())
}

/// `r Q` with `Q` a random orthogonal matrix.
fn conformal<S: Scalar>(rng: &mut Sampler, n: usize) -> Matrix<S> {
    let r = rng.positive::<S>();
    rng.orthogonal::<S>(n).scale(&r)
}

/// Whether `M M^T` is a multiple of the identity.
fn rows_conformal<S: Scalar>(m: &Matrix<S>) -> bool {
    let p = m.try_mul(&m.transpose()).expect("shapes");
    let n = p.rows();
    (0..n).all(|i| (0..n).all(|j| near(p.get(i, j), &if i == j { p.get(0, 0).clone() } else { S::zero() })))
}

/// `M delta` for the generators `delta` of Lap(n).
fn lap_combination<S: Scalar>(m: &Matrix<S>) -> Result<Vec<Lap<S>>> {
    let n = m.cols();
    let gens = (0..n)
        .map(|i| Lap::generator(i, n))
        .collect::<Result<Vec<_>>>()?;
    m.lift(&gens[0]).mul_vec(&gens)
}

/// `M epsilon` with `epsilon` the generators of Jet2(k) starting at `offset`.
fn jet2_combination<S: Scalar>(m: &Matrix<S>, offset: usize, k: usize) -> Result<Vec<Jet2<S>>> {
    let gens: Vec<Jet2<S>> = (0..m.cols())
        .map(|i| Jet2::variable(S::zero(), offset + i, k))
        .collect();
    m.lift(&gens[0]).mul_vec(&gens)
}

fn full_row_rank<S: Scalar>(rng: &mut Sampler, m: usize, n: usize) -> Matrix<S> {
    loop {
        let a = rng.matrix::<S>(m, n);
        if a.rank(TOL) == m {
            return a;
        }
    }
}

fn skip_point(e: &Error) -> bool {
    matches!(
        e,
        Error::RankDeficient { .. } | Error::NotPositiveDefinite { .. } | Error::DivisionByZero
    )
}

const ALL_METRICS: [MetricId; 5] = [
    MetricId::Flat2,
    MetricId::Hyperbolic,
    MetricId::Sphere,
    MetricId::Shear,
    MetricId::Warped3,
];

// ---- algebra -------------------------------------------------------------

fn ring_laws<E: Ring>(a: &E, b: &E, c: &E) -> Option<&'static str> {
    if !near(&a.mul(&b.mul(c)), &a.mul(b).mul(c)) {
        return Some("multiplication is associative");
    }
    if !near(&a.mul(b), &b.mul(a)) {
        return Some("multiplication is commutative");
    }
    if !near(&a.mul(&b.add(c)), &a.mul(b).add(&a.mul(c))) {
        return Some("multiplication distributes over addition");
    }
    if !near(&a.add(&b.add(c)), &a.add(b).add(c)) {
        return Some("addition is associative");
    }
    if !near(&a.add(b), &b.add(a)) {
        return Some("addition is commutative");
    }
    if !near(&a.mul(&a.one_like()), a) {
        return Some("one is a unit");
    }
    None
}

const TRIPLES: usize = 1000;

fn check_laws<E: Ring>(
    t: &mut Tally,
    algebra: &str,
    n: usize,
    mut sample: impl FnMut() -> E,
) {
    for _ in 0..TRIPLES {
        let (a, b, c) = (sample(), sample(), sample());
        let broken = ring_laws(&a, &b, &c);
        t.check(broken.is_none(), || {
            json!({
                "algebra": algebra,
                "n": n,
                "law": broken,
                "a": dbg(&a), "b": dbg(&b), "c": dbg(&c),
            })
        });
    }
}

fn algebra_laws<S: Scalar>(rng: &mut Sampler, _: &SuiteOptions) -> Result<Tally> {
    let mut jobs: Vec<(&'static str, usize, u64)> = Vec::new();
    for n in 1..=5 {
        for algebra in ["Jet1", "Jet2", "Lap"] {
            if algebra != "Lap" || n >= 2 {
                jobs.push((algebra, n, rng.int(0, i64::MAX) as u64));
            }
        }
    }
    let tallies: Vec<Tally> = std::thread::scope(|scope| {
        let handles: Vec<_> = jobs
            .iter()
            .map(|&(algebra, n, seed)| {
                scope.spawn(move || {
                    let mut t = Tally::default();
                    let mut rng = Sampler::new(seed);
                    match algebra {
                        "Jet1" => check_laws(&mut t, algebra, n, || rng.jet1::<S>(n)),
                        "Jet2" => check_laws(&mut t, algebra, n, || rng.jet2::<S>(n)),
                        _ => check_laws(&mut t, algebra, n, || rng.lap::<S>(n)),
                    }
                    t
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("law check panicked"))
            .collect()
    });
    let mut t = Tally::default();
    for part in tallies {
        t.cases += part.cases;
        if t.failure.is_none() {
            t.failure = part.failure;
        }
    }
    Ok(t)
}

fn upper_entries<S: Scalar>(m: &Matrix<S>) -> Vec<S> {
    let n = m.rows();
    (0..n)
        .flat_map(|i| (i..n).map(move |j| (i, j)))
        .map(|(i, j)| m.get(i, j).clone())
        .collect()
}

fn pure_hessian<S: Scalar>(h: &Matrix<S>) -> Result<Jet2<S>> {
    let n = h.rows();
    Jet2::new(S::zero(), vec![S::zero(); n], h.data().to_vec())
}

fn laplace_algebra_quotient<S: Scalar>(rng: &mut Sampler, _: &SuiteOptions) -> Result<Tally> {
    let mut t = Tally::default();
    for n in 2..=5 {
        let basis = Lap::<S>::basis(n)?;
        t.check(basis.len() == n + 2, || json!({ "n": n, "basis_size": basis.len() }));
        let sigma = Lap::<S>::sigma(n)?;
        let zero = Lap::<S>::constant(S::zero(), n)?;
        for i in 0..n {
            for j in 0..n {
                let p = basis[1 + i].mul(&basis[1 + j]);
                let expect = if i == j { &sigma } else { &zero };
                t.check(p == *expect, || json!({ "n": n, "product": [i, j], "got": dbg(&p) }));
            }
            t.check(basis[1 + i].mul(&sigma).is_zero(), || json!({ "n": n, "product": [i, "sigma"] }));
        }
        t.check(sigma.mul(&sigma).is_zero(), || json!({ "n": n, "product": ["sigma", "sigma"] }));

        for _ in 0..100 {
            let a = rng.jet2::<S>(n);
            let b = rng.jet2::<S>(n);
            let (la, lb) = (jet2_to_lap(&a)?, jet2_to_lap(&b)?);
            let mul_ok = near(&jet2_to_lap(&a.mul(&b))?, &la.mul(&lb));
            let add_ok = near(&jet2_to_lap(&a.add(&b))?, &la.add(&lb));
            t.check(mul_ok && add_ok, || json!({ "n": n, "a": dbg(&a), "b": dbg(&b) }));
        }

        // Kernel on jets vanishing to first order.
        let tz = tracezero_selfadjoint_basis::<S>(n)?;
        let expected = n * (n + 1) / 2 - 1;
        let rows: Vec<S> = tz.iter().flat_map(upper_entries).collect();
        let rank = Matrix::new(tz.len(), n * (n + 1) / 2, rows)?.rank(TOL);
        t.check(tz.len() == expected && rank == expected, || {
            json!({ "n": n, "kernel_basis": tz.len(), "rank": rank, "expected": expected })
        });
        for c in &tz {
            let img = jet2_to_lap(&pure_hessian(c)?)?;
            t.check(img.is_zero(), || json!({ "n": n, "hessian": report::matrix(c) }));
        }
        for k in 0..20 {
            let mut h = rng.symmetric::<S>(n);
            if k % 2 == 0 {
                let shift = h.trace().mul(&S::from_ratio(1, n as i64));
                h = h.add(&Matrix::<S>::identity(n).scale(&shift.neg()))?;
            }
            let tr = h.trace();
            let img = jet2_to_lap(&pure_hessian(&h)?)?;
            let ok = img.value.is_zero()
                && img.grad.iter().all(Ring::is_zero)
                && near(&img.sigma, &tr.mul(&S::from_ratio(1, 2)))
                && (negligible(&img.sigma, h.max_abs()) == negligible(&tr, h.max_abs()));
            t.check(ok, || json!({ "n": n, "hessian": report::matrix(&h), "image": dbg(&img) }));
        }

        // Surjective: 1, x_i and x_1^2 hit the basis.
        let x0 = Jet2::<S>::variable(S::zero(), 0, n);
        let mut hits = vec![jet2_to_lap(&Jet2::constant(S::one(), n))? == basis[0]];
        for i in 0..n {
            hits.push(jet2_to_lap(&Jet2::variable(S::zero(), i, n))? == basis[1 + i]);
        }
        hits.push(jet2_to_lap(&x0.mul(&x0))? == sigma);
        t.check(hits.iter().all(|&h| h), || json!({ "n": n, "surjectivity": hits }));

        // Products of three nilpotents vanish.
        for _ in 0..10 {
            let nil = |rng: &mut Sampler| {
                let mut a = rng.lap::<S>(n);
                a.value = S::zero();
                a
            };
            let (a, b, c) = (nil(rng), nil(rng), nil(rng));
            t.check(a.mul(&b).mul(&c).is_zero(), || json!({ "n": n, "a": dbg(&a) }));
        }
    }
    Ok(t)
}

fn first_order_agreement<S: Scalar>(rng: &mut Sampler, _: &SuiteOptions) -> Result<Tally> {
    let mut t = Tally::default();
    for n in 2..=4 {
        for _ in 0..10 {
            let ip = InnerProduct::new(rng.spd::<S>(n))?;
            let u = lsmall_probe(&ip)?;
            let origin = vec![S::zero(); n];
            let value = rng.rational::<S>();
            let covector = rng.vector::<S>(n);
            let f1 = Jet2Scalar::new(value.clone(), covector.clone(), rng.symmetric(n))?;
            let f2 = Jet2Scalar::new(value, covector, rng.symmetric(n))?;
            let diff = f1.eval_at(&origin, &u)?.sub(&f2.eval_at(&origin, &u)?);
            let dh = f1.form.add(&f2.form.scale(&S::one().neg()))?;
            let c = ip
                .gram()
                .inverse()?
                .try_mul(&dh)?
                .trace()
                .mul(&S::from_ratio(1, 2 * n as i64));
            let uu = ip.inner(&u, &u)?;
            t.check(near(&diff, &uu.scale(&c)), || {
                json!({
                    "gram": report::matrix(ip.gram()),
                    "difference": dbg(&diff),
                    "c": report::scalar(&c),
                })
            });
        }
    }
    Ok(t)
}

fn lsmall_probe_identity<S: Scalar>(rng: &mut Sampler, _: &SuiteOptions) -> Result<Tally> {
    let mut t = Tally::default();
    for n in 2..=4 {
        for _ in 0..10 {
            let ip = InnerProduct::new(rng.spd::<S>(n))?;
            let u = lsmall_probe(&ip)?;
            let like = u[0].clone();
            let defects = lsmall_defects(&u, &ip.gram().lift(&like))?;
            let scale = ip.gram().max_abs();
            t.check(defects.iter().all(|d| negligible(d, scale)), || {
                json!({ "gram": report::matrix(ip.gram()), "defects": dbg(&defects) })
            });
            let uu = ip.inner(&u, &u)?;
            for _ in 0..5 {
                let a = rng.vector::<S>(n);
                let b = rng.vector::<S>(n);
                let (al, bl) = (constants(&a, &like), constants(&b, &like));
                let lhs = ip.inner(&u, &al)?.mul(&ip.inner(&u, &bl)?);
                let rhs = uu.scale(&ip.inner(&a, &b)?.mul(&S::from_ratio(1, n as i64)));
                t.check(near(&lhs, &rhs), || {
                    json!({
                        "gram": report::matrix(ip.gram()),
                        "a": report::vector(&a),
                        "b": report::vector(&b),
                    })
                });
            }
        }
    }
    Ok(t)
}

fn coordinate_relations<E: Ring>(w: &[E]) -> bool {
    let n = w.len();
    let zero = w[0].zero_like();
    (0..n).all(|i| {
        (i + 1..n).all(|j| near(&w[i].mul(&w[j]), &zero)) && near(&w[i].mul(&w[i]), &w[0].mul(&w[0]))
    })
}

fn coordinate_characterization<S: Scalar>(rng: &mut Sampler, _: &SuiteOptions) -> Result<Tally> {
    let mut t = Tally::default();
    for k in 0..60 {
        let n = 2 + k % 3;
        let ip = InnerProduct::new(rng.spd::<S>(n))?;
        let m = if rng.coin() {
            conformal::<S>(rng, n)
        } else {
            rng.matrix::<S>(n, n)
        };
        let expected = rows_conformal(&m);
        let w = lap_combination(&m)?;
        let u = frame_probe(&ip, &w)?;
        let small = is_lsmall(&u, &ip.gram().lift(&u[0]), TOL)?;
        let coords = coordinate_relations(&w);
        let literal = !S::EXACT || orthonormal_relations_hold(&w) == coords;
        t.check(small == coords && coords == expected && literal, || {
            json!({
                "gram": report::matrix(ip.gram()),
                "frame_coefficients": report::matrix(&m),
                "lsmall": small,
                "coordinate_relations": coords,
            })
        });
    }
    Ok(t)
}

fn sum_condition<S: Scalar>(rng: &mut Sampler, _: &SuiteOptions) -> Result<Tally> {
    let mut t = Tally::default();
    for k in 0..60 {
        let n = 2 + k % 3;
        let ip = InnerProduct::new(rng.spd::<S>(n))?;
        let q = rng.orthogonal::<S>(n);
        let m1 = q.scale(&rng.positive::<S>());
        let m2 = match k % 3 {
            0 => q.scale(&rng.nonzero::<S>()),
            1 => conformal::<S>(rng, n),
            _ => rng.orthogonal::<S>(n).try_mul(&q)?.scale(&rng.positive::<S>()),
        };
        let a = frame_probe(&ip, &lap_combination(&m1)?)?;
        let b = frame_probe(&ip, &lap_combination(&m2)?)?;
        let gram = ip.gram().lift(&a[0]);
        let premise = is_lsmall(&a, &gram, TOL)? && is_lsmall(&b, &gram, TOL)?;
        let condition = if S::EXACT {
            sum_lsmall_condition(&a, &b, &ip)?
        } else {
            let scale = gram.data().iter().map(Ring::magnitude).fold(0.0, f64::max);
            sum_lsmall_defects(&a, &b, &gram)?
                .iter()
                .all(|d| negligible(d, scale * 100.0))
        };
        let sum: Vec<Lap<S>> = a.iter().zip(&b).map(|(x, y)| x.add(y)).collect();
        let small = is_lsmall(&sum, &gram, TOL)?;
        t.check(premise && condition == small, || {
            json!({
                "gram": report::matrix(ip.gram()),
                "a_frame": report::matrix(&m1),
                "b_frame": report::matrix(&m2),
                "condition": condition,
                "sum_lsmall": small,
            })
        });
    }
    Ok(t)
}

fn trace_zero_selfadjoint<S: Scalar>(rng: &mut Sampler, _: &SuiteOptions) -> Result<Tally> {
    let mut t = Tally::default();
    for n in 2..=4 {
        for k in 0..10 {
            let ip = InnerProduct::new(rng.spd::<S>(n))?;
            let s = cholesky(&ip)?;
            let u = lsmall_probe(&ip)?;
            let mut cs = tracezero_selfadjoint_basis::<S>(n)?;
            let mut c = rng.symmetric::<S>(n);
            if k % 2 == 0 {
                let shift = c.trace().mul(&S::from_ratio(1, n as i64));
                c = c.add(&Matrix::<S>::identity(n).scale(&shift.neg()))?;
            }
            cs.push(c);
            for c in &cs {
                let l = s.inverse()?.try_mul(c)?.try_mul(&s)?;
                let gl = ip.gram().try_mul(&l)?;
                let selfadjoint = near_all(gl.data(), gl.transpose().data());
                let lu = l.lift(&u[0]).mul_vec(&u)?;
                let lhs = ip.inner(&lu, &u)?;
                let rhs = ip.inner(&u, &u)?.scale(&l.trace().mul(&S::from_ratio(1, n as i64)));
                let trace_ok = near(&l.trace(), &c.trace());
                t.check(selfadjoint && trace_ok && near(&lhs, &rhs), || {
                    json!({
                        "gram": report::matrix(ip.gram()),
                        "frame_form": report::matrix(c),
                        "lhs": dbg(&lhs),
                        "rhs": dbg(&rhs),
                    })
                });
            }
        }
    }
    Ok(t)
}

/// `<Au,Au> = factor <u,u>` on the L-probe `u`.
fn dilation_on_probe<P: ProbeCarrier>(
    a: &Matrix<P::Base>,
    dom: &InnerProduct<P::Base>,
    cod: &InnerProduct<P::Base>,
    factor: &P::Base,
) -> Result<bool> {
    let u = frame_probe(dom, &P::probe_generators(dom.dim())?)?;
    let au = a.lift(&u[0]).mul_vec(&u)?;
    Ok(near(&cod.inner(&au, &au)?, &dom.inner(&u, &u)?.scale(factor)))
}

fn semiconformal_matrices<S: Scalar>(rng: &mut Sampler, _: &SuiteOptions) -> Result<Tally> {
    let mut t = Tally::default();
    let mut positives = 0;
    for k in 0..200 {
        let n = 1 + rng.index(4);
        let m = 1 + rng.index(n);
        let dom = InnerProduct::new(rng.spd::<S>(n))?;
        let cod = InnerProduct::new(rng.spd::<S>(m))?;
        let by_construction = k % 2 == 0;
        let a = if by_construction {
            rng.semiconformal(m, &cholesky(&dom)?, &cholesky(&cod)?)
        } else {
            full_row_rank::<S>(rng, m, n)
        };
        let report = semiconformal_matrix(&a, &dom, &cod, TOL)?;
        let probe = preserves_lsmall(&a, None, &dom, &cod)?;
        let mut law = true;
        if let Some(lambda) = &report.dilation {
            positives += 1;
            // A G_dom^-1 A^T G_cod = Lambda I
            let p = a
                .try_mul(&dom.gram().inverse()?)?
                .try_mul(&a.transpose())?
                .try_mul(cod.gram())?;
            let target = Matrix::<S>::identity(m).scale(lambda);
            law &= near_all(p.data(), target.data());
            let factor = lambda.mul(&S::from_ratio(m as i64, n as i64));
            law &= if n == 1 {
                dilation_on_probe::<Jet2<S>>(&a, &dom, &cod, &factor)?
            } else {
                dilation_on_probe::<Lap<S>>(&a, &dom, &cod, &factor)?
            };
        }
        let ok = report.is_semiconformal == probe
            && (!by_construction || report.is_semiconformal)
            && law;
        t.check(ok, || {
            json!({
                "matrix": report::matrix(&a),
                "gram_domain": report::matrix(dom.gram()),
                "gram_codomain": report::matrix(cod.gram()),
                "by_construction": by_construction,
                "matrix_route": report.is_semiconformal,
                "probe_route": probe,
                "dilation_law": law,
            })
        });
    }
    t.note = Some(format!("{positives} of 200 cases semi-conformal"));
    Ok(t)
}

fn quadratic_perturbation<S: Scalar>(rng: &mut Sampler, _: &SuiteOptions) -> Result<Tally> {
    let mut t = Tally::default();
    for k in 0..20 {
        let n = 2 + rng.index(3);
        let m = 1 + rng.index(n);
        let dom = InnerProduct::new(rng.spd::<S>(n))?;
        let cod = InnerProduct::new(rng.spd::<S>(m))?;
        let a = if k % 2 == 0 {
            rng.semiconformal(m, &cholesky(&dom)?, &cholesky(&cod)?)
        } else {
            full_row_rank::<S>(rng, m, n)
        };
        let q: Vec<Matrix<S>> = (0..m).map(|_| rng.symmetric(n)).collect();
        let b: Vec<Matrix<S>> = (0..m).map(|_| rng.symmetric(n)).collect();
        let qb = q
            .iter()
            .zip(&b)
            .map(|(x, y)| x.add(y))
            .collect::<Result<Vec<_>>>()?;
        let linear = preserves_lsmall(&a, None, &dom, &cod)?;
        let f = preserves_lsmall(&a, Some(&q), &dom, &cod)?;
        let fb = preserves_lsmall(&a, Some(&qb), &dom, &cod)?;
        t.check(linear == f && f == fb, || {
            json!({
                "linear_part": report::matrix(&a),
                "f": f,
                "f_plus_b": fb,
            })
        });
    }
    Ok(t)
}

// ---- connection ----------------------------------------------------------

const CONNECTION_POINTS: usize = 20;

/// A random generic displacement `u = M epsilon` in Jet2(n).
fn generic_displacement<S: Scalar>(rng: &mut Sampler, n: usize) -> Result<Vec<Jet2<S>>> {
    let m = loop {
        let m = rng.matrix::<S>(n, n);
        if m.rank(TOL) == n {
            break m;
        }
    };
    jet2_combination(&m, 0, n)
}

fn connection_line<S: Scalar>(
    rng: &mut Sampler,
    mut body: impl FnMut(&mut Sampler, &mut Tally, MetricId, &[S]) -> Result<()>,
) -> Result<Tally> {
    let mut t = Tally::default();
    for id in MetricId::SURFACES {
        for _ in 0..CONNECTION_POINTS {
            let x = id.point::<S>(rng);
            body(rng, &mut t, id, &x)?;
        }
    }
    Ok(t)
}

fn exp_log_inverse<S: Scalar>(rng: &mut Sampler, _: &SuiteOptions) -> Result<Tally> {
    connection_line::<S>(rng, |rng, t, id, x| {
        let g = id.metric();
        let u = generic_displacement::<S>(rng, 2)?;
        let l = christoffel(&g, x)?.lift(&u[0]);
        let z = l.exp2(&u)?;
        let back = l.log2(&z)?;
        // a second-order neighbour with a quadratic part
        let w: Vec<Jet2<S>> = l
            .point()
            .iter()
            .zip(&u)
            .map(|(p, d)| p.add(d).add(&d.mul(&u[0]).scale(&rng.rational())))
            .collect();
        let again = l.exp2(&l.log2(&w)?)?;
        t.check(near_all(&back, &u) && near_all(&again, &w), || {
            json!({ "at": point_json(id, x), "u": dbg(&u) })
        });
        Ok(())
    })
}

fn log_isometry<S: Scalar>(rng: &mut Sampler, _: &SuiteOptions) -> Result<Tally> {
    connection_line::<S>(rng, |rng, t, id, x| {
        let g = id.metric();
        let u = generic_displacement::<S>(rng, 2)?;
        let l = christoffel(&g, x)?.lift(&u[0]);
        let z = l.exp2(&u)?;
        let v = l.log2(&z)?;
        let norm = l.gram().bilinear(&v, &v)?;
        let gxz = g.square_distance(l.point(), &z)?;
        let gzx = g.square_distance(&z, l.point())?;
        t.check(near(&gxz, &norm) && near(&gzx, &norm), || {
            json!({ "at": point_json(id, x), "g_xz": dbg(&gxz), "norm_log": dbg(&norm) })
        });
        Ok(())
    })
}

fn mirror_involution<S: Scalar>(rng: &mut Sampler, _: &SuiteOptions) -> Result<Tally> {
    connection_line::<S>(rng, |rng, t, id, x| {
        let g = id.metric();
        let u = generic_displacement::<S>(rng, 2)?;
        let l = christoffel(&g, x)?.lift(&u[0]);
        let z = l.exp2(&u)?;
        let zm = l.mirror(&z)?;
        let neg: Vec<Jet2<S>> = l.log2(&z)?.iter().map(Ring::neg).collect();
        let ok = near_all(&l.mirror(&zm)?, &z)
            && near_all(&zm, &l.mirror_by_definition(&z)?)
            && near_all(&l.log2(&zm)?, &neg);
        t.check(ok, || json!({ "at": point_json(id, x), "z": dbg(&z), "mirror": dbg(&zm) }));
        Ok(())
    })
}

fn nabla_axioms<S: Scalar>(rng: &mut Sampler, _: &SuiteOptions) -> Result<Tally> {
    connection_line::<S>(rng, |rng, t, id, x| {
        let g = id.metric();
        let n = 2;
        let a = jet2_combination(&rng.matrix::<S>(n, n), 0, 2 * n)?;
        let b = jet2_combination(&rng.matrix::<S>(n, n), n, 2 * n)?;
        let l = christoffel(&g, x)?.lift(&a[0]);
        let xs = l.point().to_vec();
        let y: Vec<Jet2<S>> = xs.iter().zip(&a).map(|(p, d)| p.add(d)).collect();
        let z: Vec<Jet2<S>> = xs.iter().zip(&b).map(|(p, d)| p.add(d)).collect();
        let ok = near_all(&l.nabla(&xs, &z)?, &z)
            && near_all(&l.nabla(&y, &xs)?, &y)
            && near_all(&l.nabla(&y, &z)?, &l.nabla(&z, &y)?);
        t.check(ok, || json!({ "at": point_json(id, x), "y": dbg(&y), "z": dbg(&z) }));
        Ok(())
    })
}

fn flip(sign: SignConvention) -> SignConvention {
    match sign {
        SignConvention::Standard => SignConvention::Flipped,
        SignConvention::Flipped => SignConvention::Standard,
    }
}

fn levi_civita_sign<S: Scalar>(rng: &mut Sampler, opts: &SuiteOptions) -> Result<Tally> {
    let mut t = Tally::default();
    let witness = |id: MetricId, x: &[S], sign: SignConvention, r: &lapweil::riemann::LeviCivitaReport<S>| {
        let cx = r.counterexample.as_ref();
        json!({
            "at": point_json(id, x),
            "sign": format!("{sign:?}").to_lowercase(),
            "holds": r.holds,
            "directions": cx.map(|c| json!(c.directions)),
            "lhs": cx.map(|c| report::scalar(&c.lhs)),
            "rhs": cx.map(|c| report::scalar(&c.rhs)),
        })
    };
    // The half-plane goes first so a wrong chosen sign is reported there.
    let order = [
        MetricId::Hyperbolic,
        MetricId::Flat2,
        MetricId::Sphere,
        MetricId::Shear,
        MetricId::Warped3,
    ];
    for id in order {
        let g = id.metric();
        for _ in 0..4 {
            let x = id.point::<S>(rng);
            let r = verify_levicivita(&g, &x, opts.sign, TOL)?;
            t.check(r.holds, || witness(id, &x, opts.sign, &r));
        }
    }
    let g = MetricId::Hyperbolic.metric();
    for _ in 0..4 {
        let x = MetricId::Hyperbolic.point::<S>(rng);
        let r = verify_levicivita(&g, &x, flip(opts.sign), TOL)?;
        t.check(!r.holds, || witness(MetricId::Hyperbolic, &x, flip(opts.sign), &r));
    }
    Ok(t)
}

fn mirror_defect_first_order<S: Scalar>(rng: &mut Sampler, _: &SuiteOptions) -> Result<Tally> {
    let mut t = Tally::default();
    for id in ALL_METRICS {
        let g = id.metric();
        for text in test_functions(id) {
            let f = parse(&text, id)?;
            for _ in 0..5 {
                let x = id.point::<S>(rng);
                let d = first_order_mirror_defect(&f, &g, &x)?;
                let ok = negligible(&d.value, 0.0) && d.grad.iter().all(|v| negligible(v, 0.0));
                t.check(ok, || json!({ "at": point_json(id, &x), "f": text, "defect": dbg(&d) }));
            }
        }
    }
    Ok(t)
}

fn second_difference_pure_sigma<S: Scalar>(rng: &mut Sampler, _: &SuiteOptions) -> Result<Tally> {
    let mut t = Tally::default();
    let mut funcs: Vec<(MetricId, String)> = Vec::new();
    for id in ALL_METRICS {
        funcs.extend(test_functions(id).into_iter().map(|f| (id, f)));
    }
    funcs.extend(laplacian_pairs().into_iter().map(|(id, f)| (id, f.to_string())));
    if !S::EXACT {
        funcs.extend(transcendental_pairs().into_iter().map(|(id, f)| (id, f.to_string())));
    }
    for (id, text) in &funcs {
        let g = id.metric();
        let f = parse(text, *id)?;
        let n = g.dim() as i64;
        for _ in 0..5 {
            let x = id.point::<S>(rng);
            let probe = LProbe::<Lap<S>>::new(&g, &x, SignConvention::Standard)?;
            let d = probe.second_difference(&f)?;
            let gxz = g.square_distance(probe.point(), &probe.z)?;
            let scale = d.magnitude();
            let pure = negligible(&d.value, scale) && d.grad.iter().all(|v| negligible(v, scale));
            let literal = near(&d, &gxz.scale(&d.sigma.mul(&S::from_ratio(1, n))));
            t.check(pure && literal, || {
                json!({ "at": point_json(*id, &x), "f": text, "second_difference": dbg(&d) })
            });
        }
    }
    Ok(t)
}

const ORACLE_POINTS: usize = 50;

fn laplacian_vs_oracle<S: Scalar>(rng: &mut Sampler, _: &SuiteOptions) -> Result<Tally> {
    let mut t = Tally::default();
    let pairs = laplacian_pairs();
    for (id, text) in &pairs {
        let g = id.metric();
        let f = parse(text, *id)?;
        for _ in 0..ORACLE_POINTS {
            let x = id.point::<S>(rng);
            let lhs = laplacian(&f, &g, &x)?;
            let rhs = laplace_beltrami_oracle(&f, &g, &x)?;
            t.check(near(&lhs, &rhs), || {
                json!({
                    "at": point_json(*id, &x),
                    "f": text,
                    "sigma_coefficient": report::scalar(&lhs),
                    "oracle": report::scalar(&rhs),
                })
            });
        }
    }
    // Transcendental pairs always run in float64.
    for (id, text) in transcendental_pairs() {
        let g = id.metric();
        let f = parse(text, id)?;
        for _ in 0..ORACLE_POINTS {
            let x = id.point::<f64>(rng);
            let lhs = laplacian(&f, &g, &x)?;
            let rhs = laplace_beltrami_oracle(&f, &g, &x)?;
            let scale = laplacian_scale(&f, &g, &x)?;
            t.check((lhs - rhs).abs() <= TOL * scale.max(1.0), || {
                json!({ "at": point_json(id, &x), "f": text, "sigma_coefficient": lhs, "oracle": rhs })
            });
        }
    }
    t.note = Some(format!(
        "{} rational pairs, {} transcendental pairs in float64",
        pairs.len(),
        transcendental_pairs().len()
    ));
    Ok(t)
}

fn lsmall_symmetry_evidence_line<S: Scalar>(rng: &mut Sampler, _: &SuiteOptions) -> Result<Tally> {
    let mut t = Tally::default();
    for id in ALL_METRICS {
        let g = id.metric();
        for _ in 0..10 {
            let x = id.point::<S>(rng);
            let ok = lsmall_symmetry_evidence(&g, &x, TOL)?;
            t.check(ok, || point_json(id, &x));
        }
    }
    t.note = Some("evidence, not proof: checked at finitely many points of finitely many metrics".into());
    Ok(t)
}

// ---- harmonic jets -------------------------------------------------------

fn jet_coordinates<S: Scalar>(j: &Jet2Scalar<S>) -> Vec<S> {
    let mut out = vec![j.value.clone()];
    out.extend(j.covector.iter().cloned());
    out.extend(upper_entries(&j.form));
    out
}

/// Classical Laplacian of a 2-jet, `g^ij (H_ij - Gamma^k_ij p_k)`.
pub fn classical_jet_laplacian<S: Scalar>(j: &Jet2Scalar<S>, g: &Metric, x: &[S]) -> Result<S> {
    let gd = christoffel(g, x)?;
    let inv = gd.gram().inverse()?;
    let n = g.dim();
    let mut out = S::zero();
    for i in 0..n {
        for jj in 0..n {
            let mut h = j.form.get(i, jj).clone();
            for k in 0..n {
                h = h.sub(&gd.symbol(k, i, jj).mul(&j.covector[k]));
            }
            out = out.add(&inv.get(i, jj).mul(&h));
        }
    }
    Ok(out)
}

/// Size of the terms summed by the classical Laplacian of `f` at `x`,
/// `sum |g^ij| (|f_ij| + sum_k |Gamma^k_ij f_k|)`. Float comparisons of a
/// Laplacian are relative to this, since the sum itself may cancel to zero.
pub fn laplacian_scale(f: &Expr, g: &Metric, x: &[f64]) -> Result<f64> {
    let j = f.eval(&Jet2::seed(x))?;
    let gd = christoffel(g, x)?;
    let inv = gd.gram().inverse()?;
    let n = g.dim();
    let mut out = 0.0;
    for i in 0..n {
        for jj in 0..n {
            let mut h = j.hess_at(i, jj).abs();
            for k in 0..n {
                h += (gd.symbol(k, i, jj) * j.grad[k]).abs();
            }
            out += inv.get(i, jj).abs() * h;
        }
    }
    Ok(out)
}

fn harmonic_jet_basis_line<S: Scalar>(rng: &mut Sampler, _: &SuiteOptions) -> Result<Tally> {
    let mut t = Tally::default();
    for id in ALL_METRICS {
        let g = id.metric();
        let n = g.dim();
        for _ in 0..5 {
            let x = id.point::<S>(rng);
            let basis = harmonic_jet_basis(&g, &x)?;
            let expected = 1 + n + n * (n + 1) / 2 - 1;
            let rows: Vec<S> = basis.iter().flat_map(|b| jet_coordinates(&b.jet)).collect();
            let width = 1 + n + n * (n + 1) / 2;
            let rank = Matrix::new(basis.len(), width, rows)?.rank(TOL);
            t.check(basis.len() == expected && rank == expected, || {
                json!({ "at": point_json(id, &x), "basis": basis.len(), "rank": rank })
            });
            for (k, b) in basis.iter().enumerate() {
                let c = is_harmonic_jet(&b.jet, &g, &x, TOL)?;
                let on_l = jet_on_lneighbour(&b.jet, &g, &x)?;
                // trace-zero jets vanish on the L-neighbourhood
                let vanishes = k <= n || on_l.sigma.is_negligible(1.0 + b.jet.norm(), TOL) && pure_sigma(&on_l, b.jet.norm());
                t.check(c.harmonic && vanishes, || {
                    json!({
                        "at": point_json(id, &x),
                        "jet": b.label,
                        "certificate": report::scalar(&c.certificate),
                    })
                });
            }
            // Recognition: the certificate is the classical Laplacian of the 2-jet.
            for _ in 0..5 {
                let j = Jet2Scalar::new(rng.rational::<S>(), rng.vector(n), rng.symmetric(n))?;
                let c = is_harmonic_jet(&j, &g, &x, TOL)?;
                let classical = classical_jet_laplacian(&j, &g, &x)?;
                t.check(near(&c.certificate, &classical) && c.harmonic == negligible(&classical, j.norm()), || {
                    json!({
                        "at": point_json(id, &x),
                        "jet": dbg(&j),
                        "certificate": report::scalar(&c.certificate),
                        "classical": report::scalar(&classical),
                    })
                });
            }
        }
    }
    Ok(t)
}

fn harmonic_jet_converse<S: Scalar>(rng: &mut Sampler, _: &SuiteOptions) -> Result<Tally> {
    let mut t = Tally::default();
    for id in ALL_METRICS {
        let g = id.metric();
        let n = g.dim();
        for _ in 0..5 {
            let x = id.point::<S>(rng);
            let gram = g.gram_at(&x)?;
            let inv = gram.inverse()?;
            for _ in 0..3 {
                let h = rng.symmetric::<S>(n);
                let c = inv.try_mul(&h)?.trace();
                let shift = c.mul(&S::from_ratio(1, n as i64)).neg();
                let hz = h.add(&gram.scale(&shift))?;
                let zero = vec![S::zero(); n];
                let harmonic = Jet2Scalar::new(S::zero(), zero.clone(), hz)?;
                let plain = Jet2Scalar::new(S::zero(), zero, h)?;
                let cert = is_harmonic_jet(&harmonic, &g, &x, TOL)?;
                let on_l = jet_on_lneighbour(&harmonic, &g, &x)?;
                let scale = harmonic.norm();
                let vanishes = pure_sigma(&on_l, scale) && negligible(&on_l.sigma, scale);
                // without the correction the value on M_L is c/2 sigma
                let plain_on_l = jet_on_lneighbour(&plain, &g, &x)?;
                let contrast = near(&plain_on_l.sigma, &c.mul(&S::from_ratio(1, 2)));
                t.check(cert.harmonic && vanishes && contrast, || {
                    json!({
                        "at": point_json(id, &x),
                        "form": report::matrix(&harmonic.form),
                        "on_l_neighbourhood": dbg(&on_l),
                    })
                });
            }
        }
    }
    Ok(t)
}

// ---- maps ----------------------------------------------------------------

fn map_witness<S: Scalar>(case: &str, x: &[S], extra: Value) -> Value {
    json!({ "map": case, "point": report::vector(x), "detail": extra })
}

/// Listed points of a corpus case plus random points where it is a submersion.
fn case_points<S: Scalar>(case: &MapCase, rng: &mut Sampler, extra: usize) -> Vec<(Vec<S>, bool)> {
    let mut out: Vec<(Vec<S>, bool)> = case.points::<S>().into_iter().map(|p| (p, true)).collect();
    let g = case.domain.metric();
    let h = case.codomain_metric();
    let phi = case.map();
    let mut added = 0;
    let mut tries = 0;
    while added < extra && tries < 50 * extra {
        tries += 1;
        let x = case.domain.point::<S>(rng);
        match check_point(&phi, &g, &h, &x, CheckOptions { tol: TOL, fi: false }) {
            Err(e) if skip_point(&e) => continue,
            _ => {
                out.push((x, false));
                added += 1;
            }
        }
    }
    out
}

fn semiconformal_routes_agree<S: Scalar>(rng: &mut Sampler, _: &SuiteOptions) -> Result<Tally> {
    let mut t = Tally::default();
    for case in map_cases() {
        let (g, h, phi) = (case.domain.metric(), case.codomain_metric(), case.map());
        for (x, listed) in case_points::<S>(&case, rng, 3) {
            let r = check_point(&phi, &g, &h, &x, CheckOptions { tol: TOL, fi: false })?;
            let routes = r.probe_route.is_none_or(|p| p == r.semiconformal.is_semiconformal);
            let expected = !listed || r.semiconformal.is_semiconformal == case.expect.semiconformal;
            t.check(routes && expected, || {
                map_witness(case.name, &x, json!({
                    "matrix_route": r.semiconformal.is_semiconformal,
                    "probe_route": r.probe_route,
                }))
            });
        }
    }
    if !S::EXACT {
        t.note = Some("probe route needs exact arithmetic; float64 compares the matrix route with the corpus".into());
    }
    Ok(t)
}

/// Random quadratic maps between surfaces whose metrics are defined everywhere.
fn random_surface_maps(rng: &mut Sampler, count: usize) -> Vec<(MetricId, MetricId, SmoothMap)> {
    let pairs = [
        (MetricId::Flat2, MetricId::Sphere),
        (MetricId::Hyperbolic, MetricId::Shear),
        (MetricId::Sphere, MetricId::Flat2),
        (MetricId::Flat2, MetricId::Flat2),
    ];
    let vars: Vec<String> = ["x", "y"].iter().map(|s| s.to_string()).collect();
    (0..count)
        .map(|k| {
            let (dom, cod) = pairs[k % pairs.len()];
            let comps = [rng.polynomial(&vars, 2, 3), rng.polynomial(&vars, 2, 3)];
            (dom, cod, SmoothMap::new(&vars, &comps).expect("generated map parses"))
        })
        .collect()
}

fn tension_vs_classical<S: Scalar>(rng: &mut Sampler, _: &SuiteOptions) -> Result<Tally> {
    let mut t = Tally::default();
    let check = |t: &mut Tally, name: &str, phi: &SmoothMap, g: &Metric, h: &Metric, x: &[S]| -> Result<()> {
        let parts = tension_parts(phi, g, h, x)?;
        let classical = classical_tension(phi, g, h, x)?;
        let scale = parts.iter().map(|p| p.sigma.magnitude()).fold(0.0, f64::max);
        let ok = parts
            .iter()
            .zip(&classical)
            .all(|(p, c)| pure_sigma(p, scale) && near(&p.sigma, c));
        t.check(ok, || {
            map_witness(name, x, json!({
                "mirror_defect": parts.iter().map(dbg).collect::<Vec<_>>(),
                "classical": report::vector(&classical),
            }))
        });
        Ok(())
    };
    for case in map_cases() {
        let (g, h, phi) = (case.domain.metric(), case.codomain_metric(), case.map());
        for (x, _) in case_points::<S>(&case, rng, 2) {
            check(&mut t, case.name, &phi, &g, &h, &x)?;
        }
    }
    for (dom, cod, phi) in random_surface_maps(rng, 12) {
        let x = dom.point::<S>(rng);
        let name = format!("{} -> {}: {:?}", dom.name(), cod.name(), phi.components().iter().map(|c| c.source()).collect::<Vec<_>>());
        check(&mut t, &name, &phi, &dom.metric(), &cod.metric(), &x)?;
    }
    Ok(t)
}

fn fuglede_ishihara<S: Scalar>(rng: &mut Sampler, _: &SuiteOptions) -> Result<Tally> {
    let mut t = Tally::default();
    let opts = CheckOptions { tol: TOL, fi: true };
    let cases = map_cases();
    for case in &cases {
        let (g, h, phi) = (case.domain.metric(), case.codomain_metric(), case.map());
        for (x, listed) in case_points::<S>(case, rng, 2) {
            let r = check_point(&phi, &g, &h, &x, opts)?;
            let fi = r.fi.as_ref().expect("requested");
            let expected = !listed || fi.direct == case.expect.morphism();
            t.check(fi.agrees() && expected, || {
                map_witness(case.name, &x, json!({
                    "direct": fi.direct,
                    "pullback": fi.pullback,
                    "expected": case.expect.morphism(),
                    "failing_jet": fi.failing_jet.as_ref().map(|(l, c)| json!([l, report::scalar(c)])),
                }))
            });
        }
    }
    let mut random = 0;
    for (dom, cod, phi) in random_surface_maps(rng, 12) {
        let x = dom.point::<S>(rng);
        let r = match check_point(&phi, &dom.metric(), &cod.metric(), &x, opts) {
            Err(e) if skip_point(&e) => continue,
            r => r?,
        };
        random += 1;
        let fi = r.fi.expect("requested");
        t.check(fi.agrees(), || {
            map_witness("random quadratic map", &x, json!({
                "components": phi.components().iter().map(|c| c.source()).collect::<Vec<_>>(),
                "direct": fi.direct,
                "pullback": fi.pullback,
            }))
        });
    }
    t.note = Some(format!("{} corpus maps, {random} random maps", cases.len()));
    Ok(t)
}

fn codomain_line_collapse<S: Scalar>(rng: &mut Sampler, _: &SuiteOptions) -> Result<Tally> {
    let mut t = Tally::default();
    let line = Metric::new(&["w"], &["1"])?;
    for id in [MetricId::Flat2, MetricId::Hyperbolic, MetricId::Sphere, MetricId::Warped3] {
        let g = id.metric();
        let vars: Vec<String> = id.coords().iter().map(|s| s.to_string()).collect();
        let mut funcs: Vec<String> = (0..5).map(|_| rng.polynomial(&vars, 3, 4)).collect();
        funcs.push(format!("{}^2 - {}^2", vars[0], vars[1]));
        for text in funcs {
            let phi = SmoothMap::new(&vars, &[text.as_str()])?;
            let f = parse(&text, id)?;
            for _ in 0..2 {
                let x = id.point::<S>(rng);
                let r = match check_point(&phi, &g, &line, &x, CheckOptions { tol: TOL, fi: false }) {
                    Err(e) if skip_point(&e) => continue,
                    r => r?,
                };
                let lap = laplacian(&f, &g, &x)?;
                let ok = r.semiconformal.is_semiconformal
                    && near(&r.tension[0], &lap)
                    && r.harmonic == negligible(&lap, 1.0 + r.differential.max_abs());
                t.check(ok, || {
                    map_witness(&text, &x, json!({
                        "metric": id.name(),
                        "semiconformal": r.semiconformal.is_semiconformal,
                        "tension": report::vector(&r.tension),
                        "laplacian": report::scalar(&lap),
                    }))
                });
            }
        }
    }
    Ok(t)
}

fn morphism_corpus<S: Scalar>(rng: &mut Sampler, _: &SuiteOptions) -> Result<Tally> {
    let mut t = Tally::default();
    let opts = CheckOptions { tol: TOL, fi: false };
    let cases = map_cases();
    for case in &cases {
        let (g, h, phi) = (case.domain.metric(), case.codomain_metric(), case.map());
        for x in case.points::<S>() {
            let r = check_point(&phi, &g, &h, &x, opts)?;
            let ok = r.semiconformal.is_semiconformal == case.expect.semiconformal
                && r.harmonic == case.expect.harmonic;
            t.check(ok, || {
                map_witness(case.name, &x, json!({
                    "semiconformal": r.semiconformal.is_semiconformal,
                    "harmonic": r.harmonic,
                    "expected": { "semiconformal": case.expect.semiconformal, "harmonic": case.expect.harmonic },
                }))
            });
        }
    }
    // Dilation laws at random points.
    let laws: [(&str, fn(&[S]) -> S, usize); 2] = [
        ("complex square", |x| sum_squares(x).scale(&S::from_i64(4)), 20),
        ("Hopf-type quadratic map", |x| sum_squares(x).scale(&S::from_i64(4)), 10),
    ];
    for (name, lambda, count) in laws {
        let case = cases.iter().find(|c| c.name == name).expect("corpus case");
        let (g, h, phi) = (case.domain.metric(), case.codomain_metric(), case.map());
        let mut done = 0;
        while done < count {
            let x = case.domain.point::<S>(rng);
            if sum_squares(&x).is_zero() {
                continue;
            }
            done += 1;
            let r = check_point(&phi, &g, &h, &x, opts)?;
            let want = lambda(&x);
            let ok = r.harmonic_morphism && r.semiconformal.dilation.as_ref().is_some_and(|d| near(d, &want));
            t.check(ok, || {
                map_witness(name, &x, json!({
                    "dilation": r.semiconformal.dilation.as_ref().map(report::scalar),
                    "expected": report::scalar(&want),
                }))
            });
        }
    }
    // Verdicts that hold at every point.
    for (name, count) in [("anisotropic stretch", 5), ("projection from 3-space", 5), ("shear", 5)] {
        let case = cases.iter().find(|c| c.name == name).expect("corpus case");
        let (g, h, phi) = (case.domain.metric(), case.codomain_metric(), case.map());
        for _ in 0..count {
            let x = case.domain.point::<S>(rng);
            let r = check_point(&phi, &g, &h, &x, opts)?;
            let ok = r.semiconformal.is_semiconformal == case.expect.semiconformal
                && r.harmonic == case.expect.harmonic;
            t.check(ok, || map_witness(name, &x, json!({ "harmonic": r.harmonic })));
        }
    }
    Ok(t)
}

fn sum_squares<S: Scalar>(x: &[S]) -> S {
    x.iter().fold(S::zero(), |acc, v| acc.add(&v.mul(v)))
}
