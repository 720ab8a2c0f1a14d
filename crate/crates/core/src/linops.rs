//! Dense complex operators on small truncated Hilbert spaces.
//!
//! Everything here works on square row-major matrices of dimension up to a
//! few hundred. Hermitian eigenproblems are solved with a cyclic complex
//! Jacobi method, which is slow asymptotically but accurate to a few ulps on
//! the sizes used by the cycle (2n with n around 30).

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative tolerance for the Hermiticity check.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Largest imaginary part tolerated in a physical expectation value.
pub const IMAG_TRACE_TOL: f64 = 1e-10;

const JACOBI_MAX_SWEEPS: usize = 100;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Square complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct Operator {
    dim: usize,
    data: Vec<Complex64>,
}

impl fmt::Debug for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Operator({}x{})", self.dim, self.dim)?;
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|j| {
                    let z = self[(i, j)];
                    format!("{:+.6}{:+.6}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl Operator {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "operator dimension must be positive");
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut op = Self::zeros(dim);
        for i in 0..dim {
            op[(i, i)] = ONE;
        }
        op
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut op = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            op[(i, i)] = Complex64::new(d, 0.0);
        }
        op
    }

    /// Builds a matrix from row slices; panics if the rows are ragged.
    pub fn from_rows<R: AsRef<[Complex64]>>(rows: &[R]) -> Self {
        let dim = rows.len();
        let mut op = Self::zeros(dim);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            assert_eq!(row.len(), dim, "row {i} has wrong length");
            op.data[i * dim..(i + 1) * dim].copy_from_slice(row);
        }
        op
    }

    pub fn from_real_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let dim = rows.len();
        let mut op = Self::zeros(dim);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            assert_eq!(row.len(), dim, "row {i} has wrong length");
            for (j, &x) in row.iter().enumerate() {
                op[(i, j)] = Complex64::new(x, 0.0);
            }
        }
        op
    }

    /// Outer product |v><v|.
    pub fn projector(v: &[Complex64]) -> Self {
        let mut op = Self::zeros(v.len());
        for i in 0..v.len() {
            for j in 0..v.len() {
                op[(i, j)] = v[i] * v[j].conj();
            }
        }
        op
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_complex(&self, s: Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest |H_ij - conj(H_ji)|.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian_defect() <= HERMITIAN_TOL * self.max_abs()
    }

    pub(crate) fn ensure_hermitian(&self) -> Result<()> {
        let asymmetry = self.hermitian_defect();
        let scale = self.max_abs();
        if asymmetry > HERMITIAN_TOL * scale {
            return Err(Error::NonHermitian { asymmetry, scale });
        }
        Ok(())
    }

    /// (A + A^dagger) / 2.
    pub fn hermitian_part(&self) -> Self {
        let mut out = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out[(i, j)] = (self[(i, j)] + self[(j, i)].conj()) * 0.5;
            }
        }
        out
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "matmul dimension mismatch");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                let row = &rhs.data[k * n..(k + 1) * n];
                let dst = &mut out.data[i * n..(i + 1) * n];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }

    /// [A, B] = AB - BA.
    pub fn commutator(&self, rhs: &Self) -> Self {
        &self.matmul(rhs) - &rhs.matmul(self)
    }

    /// tr(A B) without forming the product.
    pub fn trace_product(&self, rhs: &Self) -> Complex64 {
        assert_eq!(self.dim, rhs.dim);
        let n = self.dim;
        let mut acc = ZERO;
        for i in 0..n {
            for k in 0..n {
                acc += self.data[i * n + k] * rhs.data[k * n + i];
            }
        }
        acc
    }
}

impl Index<(usize, usize)> for Operator {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for Operator {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim, rhs.dim);
        Operator {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim, rhs.dim);
        Operator {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        self.matmul(rhs)
    }
}

pub fn sigma_x() -> Operator {
    Operator::from_real_rows(&[[0.0, 1.0], [1.0, 0.0]])
}

pub fn sigma_z() -> Operator {
    Operator::from_real_rows(&[[1.0, 0.0], [0.0, -1.0]])
}

/// Tensor product space of the two-level system (first factor) and a
/// truncated bosonic mode with `n` Fock levels (second factor).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProductSpace {
    n: usize,
}

impl ProductSpace {
    pub const DIM_TLS: usize = 2;

    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidTruncation(n));
        }
        Ok(Self { n })
    }

    pub fn dim_rc(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        Self::DIM_TLS * self.n
    }

    /// Flat index of the tensor index (s, k).
    pub fn flat(&self, s: usize, k: usize) -> usize {
        debug_assert!(s < Self::DIM_TLS && k < self.n);
        s * self.n + k
    }

    pub fn split(&self, idx: usize) -> (usize, usize) {
        (idx / self.n, idx % self.n)
    }

    fn check(&self, rho: &Operator) -> Result<()> {
        if rho.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: rho.dim(),
            });
        }
        Ok(())
    }
}

/// Kronecker product; the first factor's index is the slow one.
pub fn kron(a: &Operator, b: &Operator) -> Operator {
    let (da, db) = (a.dim(), b.dim());
    let mut out = Operator::zeros(da * db);
    for ia in 0..da {
        for ja in 0..da {
            let x = a[(ia, ja)];
            if x == ZERO {
                continue;
            }
            for ib in 0..db {
                for jb in 0..db {
                    out[(ia * db + ib, ja * db + jb)] = x * b[(ib, jb)];
                }
            }
        }
    }
    out
}

/// Truncated bosonic annihilation operator on `n` Fock levels.
pub fn annihilation(n: usize) -> Result<Operator> {
    if n == 0 {
        return Err(Error::InvalidTruncation(n));
    }
    let mut a = Operator::zeros(n);
    for k in 1..n {
        a[(k - 1, k)] = Complex64::new((k as f64).sqrt(), 0.0);
    }
    Ok(a)
}

/// Number operator a^dagger a = diag(0, 1, ..., n-1).
pub fn number(n: usize) -> Result<Operator> {
    if n == 0 {
        return Err(Error::InvalidTruncation(n));
    }
    Ok(Operator::from_real_diagonal(
        &(0..n).map(|k| k as f64).collect::<Vec<_>>(),
    ))
}

/// Position-like quadrature a^dagger + a.
pub fn quadrature(n: usize) -> Result<Operator> {
    let a = annihilation(n)?;
    Ok(&a + &a.adjoint())
}

/// Eigendecomposition of a Hermitian operator.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Column j is the eigenvector of `eigenvalues[j]`.
    pub eigenvectors: Operator,
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// V diag(f(lambda)) V^dagger.
    pub fn reconstruct_with(&self, weights: &[f64]) -> Operator {
        let n = self.dim();
        assert_eq!(weights.len(), n);
        let v = &self.eigenvectors;
        let mut out = Operator::zeros(n);
        for (k, &w) in weights.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let vik = v[(i, k)] * w;
                if vik == ZERO {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += vik * v[(j, k)].conj();
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> Operator {
        self.reconstruct_with(&self.eigenvalues)
    }
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi
/// rotations. Eigenvalues ascending; ties keep the original diagonal order.
/// Each eigenvector is phased so its largest-modulus component (first one on
/// ties) is real and positive.
pub fn hermitian_eig(h: &Operator) -> Result<EigenSystem> {
    h.ensure_hermitian()?;
    let n = h.dim();
    let mut a = h.hermitian_part();
    let mut v = Operator::identity(n);

    let frob: f64 = a.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let target = f64::EPSILON * frob;

    let off_norm = |a: &Operator| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                s += a[(i, j)].norm_sqr();
            }
        }
        (2.0 * s).sqrt()
    };

    let mut converged = n == 1 || off_norm(&a) <= target;
    let mut sweeps = 0;
    while !converged && sweeps < JACOBI_MAX_SWEEPS {
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let g = apq.norm();
                if g == 0.0 {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                // Past the first few sweeps, drop elements that cannot change
                // either diagonal entry in floating point.
                if sweeps > 4 && 100.0 * g + app.abs() == app.abs() && 100.0 * g + aqq.abs() == aqq.abs()
                {
                    a[(p, q)] = ZERO;
                    a[(q, p)] = ZERO;
                    continue;
                }
                let phase = apq / g;
                let theta = (aqq - app) / (2.0 * g);
                let t = if theta.is_infinite() {
                    0.0
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // J = [[c, s], [-s conj(phase), c conj(phase)]] on (p, q).
                let jpp = Complex64::new(c, 0.0);
                let jpq = Complex64::new(s, 0.0);
                let jqp = -phase.conj() * s;
                let jqq = phase.conj() * c;
                // A <- A J
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * jpp + akq * jqp;
                    a[(k, q)] = akp * jpq + akq * jqq;
                }
                // A <- J^dagger A
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = jpp.conj() * apk + jqp.conj() * aqk;
                    a[(q, k)] = jpq.conj() * apk + jqq.conj() * aqk;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = Complex64::new(app - t * g, 0.0);
                a[(q, q)] = Complex64::new(aqq + t * g, 0.0);
                // V <- V J
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * jpp + vkq * jqp;
                    v[(k, q)] = vkp * jpq + vkq * jqq;
                }
            }
        }
        converged = off_norm(&a) <= target;
    }
    if !converged {
        return Err(Error::NoConvergence {
            sweeps,
            residual: off_norm(&a),
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re).then(i.cmp(&j)));

    let eigenvalues: Vec<f64> = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vectors = Operator::zeros(n);
    for (col, &src) in order.iter().enumerate() {
        let mut best = 0;
        let mut best_mag = -1.0;
        for i in 0..n {
            let m = v[(i, src)].norm();
            if m > best_mag * (1.0 + 1e-12) {
                best = i;
                best_mag = m;
            }
        }
        let pivot = v[(best, src)];
        let fix = if pivot.norm() > 0.0 {
            pivot.conj() / pivot.norm()
        } else {
            ONE
        };
        for i in 0..n {
            vectors[(i, col)] = v[(i, src)] * fix;
        }
        vectors[(best, col)] = Complex64::new(vectors[(best, col)].norm(), 0.0);
    }

    Ok(EigenSystem {
        eigenvalues,
        eigenvectors: vectors,
    })
}

/// f(H) = V diag(f(lambda_i)) V^dagger for Hermitian H.
pub fn matrix_function<F: Fn(f64) -> f64>(h: &Operator, f: F) -> Result<Operator> {
    let eig = hermitian_eig(h)?;
    matrix_function_of(&eig, f)
}

/// As [`matrix_function`], reusing an existing decomposition.
pub fn matrix_function_of<F: Fn(f64) -> f64>(eig: &EigenSystem, f: F) -> Result<Operator> {
    let weights = eig
        .eigenvalues
        .iter()
        .map(|&lam| {
            let y = f(lam);
            if y.is_finite() {
                Ok(y)
            } else {
                Err(Error::FunctionUndefined { eigenvalue: lam })
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(eig.reconstruct_with(&weights).hermitian_part())
}

/// Re tr(obs rho), rejecting results with a non-negligible imaginary part.
pub fn expectation(obs: &Operator, rho: &Operator) -> Result<f64> {
    if obs.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: obs.dim(),
            found: rho.dim(),
        });
    }
    let t = obs.trace_product(rho);
    let scale = obs.max_abs().max(1.0);
    if t.im.abs() > IMAG_TRACE_TOL * scale {
        return Err(Error::ComplexTrace { imag: t.im });
    }
    Ok(t.re)
}

/// Traces out the bosonic factor, leaving a 2x2 operator.
pub fn partial_trace_rc(rho: &Operator, space: ProductSpace) -> Result<Operator> {
    space.check(rho)?;
    let mut out = Operator::zeros(ProductSpace::DIM_TLS);
    for s in 0..ProductSpace::DIM_TLS {
        for t in 0..ProductSpace::DIM_TLS {
            out[(s, t)] = (0..space.dim_rc())
                .map(|k| rho[(space.flat(s, k), space.flat(t, k))])
                .sum();
        }
    }
    Ok(out)
}

/// Traces out the two-level factor, leaving an n x n operator.
pub fn partial_trace_tls(rho: &Operator, space: ProductSpace) -> Result<Operator> {
    space.check(rho)?;
    let n = space.dim_rc();
    let mut out = Operator::zeros(n);
    for k in 0..n {
        for l in 0..n {
            out[(k, l)] = (0..ProductSpace::DIM_TLS)
                .map(|s| rho[(space.flat(s, k), space.flat(s, l))])
                .sum();
        }
    }
    Ok(out)
}
