//! Seeded generators for random rational test data.

use lapweil::linalg::Matrix;
use lapweil::scalar::Scalar;
use lapweil::weil::{Jet1, Jet2, Lap};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// Independent stream for a named consumer.
    pub fn derived(seed: u64, label: &str) -> Self {
        let h = label.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
            (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3)
        });
        Self::new(seed ^ h)
    }

    pub fn index(&mut self, bound: usize) -> usize {
        self.rng.gen_range(0..bound)
    }

    pub fn coin(&mut self) -> bool {
        self.rng.gen_bool(0.5)
    }

    pub fn int(&mut self, lo: i64, hi: i64) -> i64 {
        self.rng.gen_range(lo..=hi)
    }

    /// `p/q` with `|p| <= 9`, `1 <= q <= 9`.
    pub fn rational<S: Scalar>(&mut self) -> S {
        let p = self.int(-9, 9);
        let q = self.int(1, 9);
        S::from_ratio(p, q)
    }

    pub fn nonzero<S: Scalar>(&mut self) -> S {
        loop {
            let v = self.rational::<S>();
            if !v.is_zero() {
                return v;
            }
        }
    }

    pub fn positive<S: Scalar>(&mut self) -> S {
        let p = self.int(1, 9);
        let q = self.int(1, 9);
        S::from_ratio(p, q)
    }

    pub fn vector<S: Scalar>(&mut self, n: usize) -> Vec<S> {
        (0..n).map(|_| self.rational()).collect()
    }

    pub fn matrix<S: Scalar>(&mut self, rows: usize, cols: usize) -> Matrix<S> {
        Matrix::from_fn(rows, cols, |_, _| self.rational())
    }

    pub fn symmetric<S: Scalar>(&mut self, n: usize) -> Matrix<S> {
        let m: Matrix<S> = self.matrix(n, n);
        Matrix::from_fn(n, n, |i, j| if i <= j { m.get(i, j).clone() } else { m.get(j, i).clone() })
    }

    /// Upper triangular with positive diagonal.
    pub fn upper_factor<S: Scalar>(&mut self, n: usize) -> Matrix<S> {
        Matrix::from_fn(n, n, |i, j| match i.cmp(&j) {
            std::cmp::Ordering::Equal => self.positive(),
            std::cmp::Ordering::Less => self.rational(),
            std::cmp::Ordering::Greater => S::zero(),
        })
    }

    /// `S^T S`, so the Cholesky factor is rational.
    pub fn spd<S: Scalar>(&mut self, n: usize) -> Matrix<S> {
        let s = self.upper_factor::<S>(n);
        s.transpose().try_mul(&s).expect("square")
    }

    /// Rational orthogonal matrix `(I - K)(I + K)^{-1}` for a random skew `K`.
    pub fn orthogonal<S: Scalar>(&mut self, n: usize) -> Matrix<S> {
        let upper: Matrix<S> = self.matrix(n, n);
        let k = Matrix::from_fn(n, n, |i, j| match i.cmp(&j) {
            std::cmp::Ordering::Less => upper.get(i, j).clone(),
            std::cmp::Ordering::Greater => upper.get(j, i).neg(),
            std::cmp::Ordering::Equal => S::zero(),
        });
        let id = Matrix::<S>::identity(n);
        let minus = id.add(&k.scale(&S::one().neg())).expect("square");
        let plus = id.add(&k).expect("square");
        // I + K is invertible for skew K
        minus.try_mul(&plus.inverse().expect("I + K invertible")).expect("square")
    }

    /// A semi-conformal `m x n` matrix for the Gram matrices `s_dom^T s_dom`,
    /// `s_cod^T s_cod`: `s_cod^{-1} (r Q_m) s_dom` with `Q_m` rows of an orthogonal matrix.
    pub fn semiconformal<S: Scalar>(
        &mut self,
        m: usize,
        s_dom: &Matrix<S>,
        s_cod: &Matrix<S>,
    ) -> Matrix<S> {
        let n = s_dom.rows();
        let q = self.orthogonal::<S>(n);
        let r = self.positive::<S>();
        let rows = Matrix::from_fn(m, n, |i, j| q.get(i, j).mul(&r));
        s_cod
            .inverse()
            .expect("triangular with positive diagonal")
            .try_mul(&rows)
            .and_then(|b| b.try_mul(s_dom))
            .expect("shapes")
    }

    pub fn jet1<S: Scalar>(&mut self, n: usize) -> Jet1<S> {
        Jet1::new(self.rational(), self.vector(n))
    }

    pub fn jet2<S: Scalar>(&mut self, n: usize) -> Jet2<S> {
        let h = self.symmetric::<S>(n);
        Jet2::new(self.rational(), self.vector(n), h.data().to_vec()).expect("symmetric")
    }

    pub fn lap<S: Scalar>(&mut self, n: usize) -> Lap<S> {
        Lap::new(self.rational(), self.vector(n), self.rational()).expect("n >= 2")
    }

    /// Random polynomial of degree at most `degree` in `vars`, as DSL text.
    pub fn polynomial(&mut self, vars: &[String], degree: u32, terms: usize) -> String {
        let mut out = Vec::with_capacity(terms);
        for _ in 0..terms {
            let (p, q) = (self.int(-9, 9), self.int(1, 9));
            let mut term = if q == 1 { format!("{p}") } else { format!("{p}/{q}") };
            let d = self.int(0, i64::from(degree));
            for _ in 0..d {
                term.push('*');
                term.push_str(&vars[self.index(vars.len())]);
            }
            out.push(format!("({term})"));
        }
        out.join(" + ")
    }
}
