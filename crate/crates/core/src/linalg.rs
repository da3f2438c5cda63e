//! Dense complex linear algebra for small Hermitian problems.
//!
//! Hermitian eigendecompositions use cyclic Jacobi rotations. Everything
//! else (inverse square roots on the support, support projectors, norms)
//! is a spectral function built on top of that. `general_spectrum` handles
//! real non-symmetric matrices via balancing, Hessenberg reduction and
//! Francis double-shift QR.

use crate::{Error, Result};
use num_complex::Complex64;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

pub type C64 = Complex64;

const HERMITICITY_TOL: f64 = 1e-12;
const MAX_SWEEPS: usize = 100;

/// Dense row-major complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        CMatrix { rows, cols, data }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {}x{} matrix",
                data.len(),
                rows,
                cols
            )));
        }
        Ok(CMatrix { rows, cols, data })
    }

    /// Assemble from separate real and imaginary row arrays.
    pub fn from_parts(re: &[Vec<f64>], im: &[Vec<f64>]) -> Result<Self> {
        let rows = re.len();
        if im.len() != rows {
            return Err(Error::Dimension("re and im row counts differ".into()));
        }
        let cols = re.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(rows * cols);
        for (r, i) in re.iter().zip(im) {
            if r.len() != cols || i.len() != cols {
                return Err(Error::Dimension("ragged matrix rows".into()));
            }
            for (a, b) in r.iter().zip(i) {
                data.push(C64::new(*a, *b));
            }
        }
        Ok(CMatrix { rows, cols, data })
    }

    /// Column vector as an n×1 matrix.
    pub fn column_vector(v: &[C64]) -> Self {
        CMatrix {
            rows: v.len(),
            cols: 1,
            data: v.to_vec(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        CMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        CMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scale(&self, s: C64) -> Self {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn kron(&self, other: &CMatrix) -> CMatrix {
        let (r2, c2) = (other.rows, other.cols);
        CMatrix::from_fn(self.rows * r2, self.cols * c2, |i, j| {
            self[(i / r2, j / c2)] * other[(i % r2, j % c2)]
        })
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        (0..self.rows)
            .map(|i| {
                let row = &self.data[i * self.cols..(i + 1) * self.cols];
                row.iter().zip(v).map(|(a, b)| a * b).sum()
            })
            .collect()
    }

    pub fn matmul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, other.rows, "matrix product dimension mismatch");
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                let orow = &other.data[k * other.cols..(k + 1) * other.cols];
                let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (o, b) in out_row.iter_mut().zip(orow) {
                    *o += a * b;
                }
            }
        }
        out
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul<&CMatrix> for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.matmul(rhs)
    }
}

impl Add<&CMatrix> for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub<&CMatrix> for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

/// Factor dimensions of a bipartite system; the first factor is the one
/// transposed by `partial_transpose`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BipartiteShape {
    pub d1: usize,
    pub d2: usize,
}

impl BipartiteShape {
    pub fn new(d1: usize, d2: usize) -> Result<Self> {
        if d1 == 0 || d2 == 0 {
            return Err(Error::InvalidArgument("factor dimensions must be positive".into()));
        }
        Ok(BipartiteShape { d1, d2 })
    }

    pub fn dim(&self) -> usize {
        self.d1 * self.d2
    }

    pub fn check(&self, dim: usize) -> Result<()> {
        if self.dim() != dim {
            return Err(Error::Dimension(format!(
                "shape {}x{} does not match dimension {}",
                self.d1, self.d2, dim
            )));
        }
        Ok(())
    }
}

/// Dense Hermitian matrix. Construction symmetrizes, so `entry(i,j)` is the
/// exact conjugate of `entry(j,i)` afterwards.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix(CMatrix);

impl HermitianMatrix {
    /// Validate hermiticity to `1e-12 * max|entry|` and symmetrize.
    pub fn new(m: CMatrix) -> Result<Self> {
        if m.rows != m.cols {
            return Err(Error::Dimension(format!("{}x{} is not square", m.rows, m.cols)));
        }
        if !m.is_finite() {
            return Err(Error::NonFinite);
        }
        let n = m.rows;
        let mut dev: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
            }
        }
        if dev > HERMITICITY_TOL * m.max_abs() {
            return Err(Error::NotHermitian(dev));
        }
        Ok(HermitianMatrix::hermitian_part(&m))
    }

    /// (M + M†)/2 without validation.
    pub fn hermitian_part(m: &CMatrix) -> Self {
        assert_eq!(m.rows, m.cols, "hermitian_part needs a square matrix");
        let n = m.rows;
        let mut out = CMatrix::zeros(n, n);
        for i in 0..n {
            out[(i, i)] = C64::new(m[(i, i)].re, 0.0);
            for j in i + 1..n {
                let z = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
                out[(i, j)] = z;
                out[(j, i)] = z.conj();
            }
        }
        HermitianMatrix(out)
    }

    pub fn from_fn(n: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        HermitianMatrix::hermitian_part(&CMatrix::from_fn(n, n, f))
    }

    pub fn zeros(n: usize) -> Self {
        HermitianMatrix(CMatrix::zeros(n, n))
    }

    pub fn identity(n: usize) -> Self {
        HermitianMatrix(CMatrix::identity(n))
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = CMatrix::zeros(n, n);
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(*d, 0.0);
        }
        HermitianMatrix(m)
    }

    /// Real symmetric matrix from row-major entries.
    pub fn from_real(n: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::Dimension("wrong number of entries".into()));
        }
        HermitianMatrix::new(CMatrix::from_fn(n, n, |i, j| C64::new(entries[i * n + j], 0.0)))
    }

    /// Unnormalized rank-one |v⟩⟨v|.
    pub fn outer(v: &[C64]) -> Self {
        let n = v.len();
        HermitianMatrix::hermitian_part(&CMatrix::from_fn(n, n, |i, j| v[i] * v[j].conj()))
    }

    /// |v⟩⟨v| / ⟨v|v⟩.
    pub fn pure_state(v: &[C64]) -> Result<Self> {
        let norm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if norm2 == 0.0 || !norm2.is_finite() {
            return Err(Error::InvalidArgument("state vector must be nonzero and finite".into()));
        }
        Ok(HermitianMatrix::outer(v).scale(1.0 / norm2))
    }

    pub fn dim(&self) -> usize {
        self.0.rows
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.0[(i, j)]
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.0[(i, i)].re).sum()
    }

    /// Hilbert-Schmidt inner product tr(AB), real for Hermitian A, B.
    pub fn inner(&self, other: &HermitianMatrix) -> f64 {
        assert_eq!(self.dim(), other.dim(), "inner product dimension mismatch");
        self.0
            .data
            .iter()
            .zip(&other.0.data)
            .map(|(a, b)| (a * b.conj()).re)
            .sum()
    }

    /// ⟨v|H|v⟩.
    pub fn expectation(&self, v: &[C64]) -> f64 {
        let hv = self.0.mul_vec(v);
        v.iter().zip(&hv).map(|(a, b)| (a.conj() * b).re).sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        HermitianMatrix(self.0.scale(C64::new(s, 0.0)))
    }

    pub fn max_abs(&self) -> f64 {
        self.0.max_abs()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.frobenius_norm()
    }

    pub fn is_zero(&self) -> bool {
        self.max_abs() == 0.0
    }

    /// X H X†.
    pub fn congruence(&self, x: &CMatrix) -> HermitianMatrix {
        HermitianMatrix::hermitian_part(&(&(x * &self.0) * &x.adjoint()))
    }

    pub fn kron(&self, other: &HermitianMatrix) -> HermitianMatrix {
        HermitianMatrix(self.0.kron(&other.0))
    }

    pub fn partial_transpose(&self, shape: BipartiteShape) -> Result<HermitianMatrix> {
        partial_transpose(self, shape)
    }

    /// Best-effort eigendecomposition; see `eig_hermitian` for the checked
    /// variant.
    pub fn eigh(&self) -> EigenSystem {
        jacobi(self).0
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.eigh().values
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues().last().copied().unwrap_or(0.0)
    }

    /// Nearest psd matrix in Frobenius norm (negative eigenvalues clipped).
    pub fn psd_projection(&self) -> HermitianMatrix {
        self.eigh().map(|l| l.max(0.0))
    }

    pub fn sqrt_psd(&self) -> HermitianMatrix {
        self.eigh().map(|l| l.max(0.0).sqrt())
    }
}

impl Add<&HermitianMatrix> for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn add(self, rhs: &HermitianMatrix) -> HermitianMatrix {
        HermitianMatrix(&self.0 + &rhs.0)
    }
}

impl Sub<&HermitianMatrix> for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn sub(self, rhs: &HermitianMatrix) -> HermitianMatrix {
        HermitianMatrix(&self.0 - &rhs.0)
    }
}

impl Add for HermitianMatrix {
    type Output = HermitianMatrix;
    fn add(self, rhs: HermitianMatrix) -> HermitianMatrix {
        &self + &rhs
    }
}

impl Sub for HermitianMatrix {
    type Output = HermitianMatrix;
    fn sub(self, rhs: HermitianMatrix) -> HermitianMatrix {
        &self - &rhs
    }
}

impl AddAssign<&HermitianMatrix> for HermitianMatrix {
    fn add_assign(&mut self, rhs: &HermitianMatrix) {
        assert_eq!(self.dim(), rhs.dim());
        for (a, b) in self.0.data.iter_mut().zip(&rhs.0.data) {
            *a += b;
        }
    }
}

impl SubAssign<&HermitianMatrix> for HermitianMatrix {
    fn sub_assign(&mut self, rhs: &HermitianMatrix) {
        assert_eq!(self.dim(), rhs.dim());
        for (a, b) in self.0.data.iter_mut().zip(&rhs.0.data) {
            *a -= b;
        }
    }
}

impl Neg for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn neg(self) -> HermitianMatrix {
        self.scale(-1.0)
    }
}

impl Mul<f64> for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn mul(self, s: f64) -> HermitianMatrix {
        self.scale(s)
    }
}

/// Eigenvalues in ascending order with orthonormal eigenvectors as columns.
#[derive(Clone, Debug)]
pub struct EigenSystem {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.column(k)
    }

    pub fn max_abs_value(&self) -> f64 {
        self.values.iter().fold(0.0, |m, l| m.max(l.abs()))
    }

    /// Σ f(λ_k) |v_k⟩⟨v_k|.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> HermitianMatrix {
        let n = self.dim();
        let weights: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        let mut out = CMatrix::zeros(n, n);
        for (k, &w) in weights.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let vi = self.vectors[(i, k)] * w;
                if vi == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += vi * self.vectors[(j, k)].conj();
                }
            }
        }
        HermitianMatrix::hermitian_part(&out)
    }

    pub fn reconstruct(&self) -> HermitianMatrix {
        self.map(|l| l)
    }
}

/// Cyclic complex Jacobi. Returns the (sorted) system, a convergence flag
/// and the final off-diagonal Frobenius norm.
fn jacobi(h: &HermitianMatrix) -> (EigenSystem, bool, f64) {
    let n = h.dim();
    let mut a = h.0.data.clone();
    let mut v = CMatrix::identity(n).data;
    let zero = C64::new(0.0, 0.0);
    let mut converged = n <= 1;
    let mut off = 0.0;
    if !converged {
        for sweep in 0..MAX_SWEEPS {
            off = 0.0;
            for p in 0..n {
                for q in p + 1..n {
                    off += a[p * n + q].norm_sqr();
                }
            }
            off = (2.0 * off).sqrt();
            if off == 0.0 {
                converged = true;
                break;
            }
            let mut rotated = false;
            for p in 0..n - 1 {
                for q in p + 1..n {
                    let apq = a[p * n + q];
                    let g = apq.norm();
                    if g == 0.0 {
                        continue;
                    }
                    let app = a[p * n + p].re;
                    let aqq = a[q * n + q].re;
                    if sweep > 3 && app.abs() + 100.0 * g == app.abs() && aqq.abs() + 100.0 * g == aqq.abs() {
                        a[p * n + q] = zero;
                        a[q * n + p] = zero;
                        continue;
                    }
                    rotated = true;
                    let theta = (aqq - app) / (2.0 * g);
                    let t = if theta.abs() > 1e150 {
                        0.5 / theta
                    } else {
                        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                    };
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    let phc = (apq / g).conj();
                    let u_pp = C64::new(c, 0.0);
                    let u_pq = C64::new(s, 0.0);
                    let u_qp = phc * (-s);
                    let u_qq = phc * c;
                    for k in 0..n {
                        let akp = a[k * n + p];
                        let akq = a[k * n + q];
                        a[k * n + p] = akp * u_pp + akq * u_qp;
                        a[k * n + q] = akp * u_pq + akq * u_qq;
                    }
                    for k in 0..n {
                        let apk = a[p * n + k];
                        let aqk = a[q * n + k];
                        a[p * n + k] = u_pp.conj() * apk + u_qp.conj() * aqk;
                        a[q * n + k] = u_pq.conj() * apk + u_qq.conj() * aqk;
                    }
                    a[p * n + q] = zero;
                    a[q * n + p] = zero;
                    a[p * n + p] = C64::new(app - t * g, 0.0);
                    a[q * n + q] = C64::new(aqq + t * g, 0.0);
                    for k in 0..n {
                        let vkp = v[k * n + p];
                        let vkq = v[k * n + q];
                        v[k * n + p] = vkp * u_pp + vkq * u_qp;
                        v[k * n + q] = vkp * u_pq + vkq * u_qq;
                    }
                }
            }
            if !rotated {
                converged = true;
                off = 0.0;
                break;
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].re.total_cmp(&a[j * n + j].re));
    let values = order.iter().map(|&i| a[i * n + i].re).collect();
    let vectors = CMatrix::from_fn(n, n, |i, k| v[i * n + order[k]]);
    (EigenSystem { values, vectors }, converged, off)
}

/// Eigendecomposition with ascending eigenvalues.
pub fn eig_hermitian(h: &HermitianMatrix) -> Result<EigenSystem> {
    let (sys, converged, off) = jacobi(h);
    if converged {
        Ok(sys)
    } else {
        Err(Error::NoConvergence {
            routine: "Jacobi eigensolver",
            residual: off,
        })
    }
}

/// min eigenvalue ≥ −tol·(1 + ‖H‖∞).
pub fn psd_check(h: &HermitianMatrix, tol: f64) -> bool {
    let sys = h.eigh();
    let min = sys.values.first().copied().unwrap_or(0.0);
    min >= -tol * (1.0 + sys.max_abs_value())
}

fn support_cut(sys: &EigenSystem, rank_tol: f64) -> f64 {
    let lmax = sys.values.last().copied().unwrap_or(0.0);
    rank_tol * lmax
}

/// Σ λ^(−1/2) |v⟩⟨v| over eigenvalues above `rank_tol * λ_max`.
pub fn pseudo_inv_sqrt(h: &HermitianMatrix, rank_tol: f64) -> HermitianMatrix {
    let sys = h.eigh();
    let cut = support_cut(&sys, rank_tol);
    if sys.values.last().copied().unwrap_or(0.0) <= 0.0 {
        return HermitianMatrix::zeros(h.dim());
    }
    sys.map(|l| if l > cut { 1.0 / l.sqrt() } else { 0.0 })
}

/// Projector onto eigenvectors with eigenvalue above `rank_tol * λ_max`.
pub fn support_projector(h: &HermitianMatrix, rank_tol: f64) -> HermitianMatrix {
    let sys = h.eigh();
    let cut = support_cut(&sys, rank_tol);
    if sys.values.last().copied().unwrap_or(0.0) <= 0.0 {
        return HermitianMatrix::zeros(h.dim());
    }
    sys.map(|l| if l > cut { 1.0 } else { 0.0 })
}

/// supp A ⊆ supp B, tested as ‖(I − P_B) A (I − P_B)‖∞ ≤ rank_tol·(1 + ‖A‖∞).
pub fn support_contained(a: &HermitianMatrix, b: &HermitianMatrix, rank_tol: f64) -> bool {
    assert_eq!(a.dim(), b.dim(), "support test dimension mismatch");
    let q = &HermitianMatrix::identity(b.dim()) - &support_projector(b, rank_tol);
    let outside = a.congruence(q.matrix());
    op_norm(&outside) <= rank_tol * (1.0 + op_norm(a))
}

/// Transpose of the first tensor factor: ((i,k),(j,l)) ↦ ((j,k),(i,l)).
pub fn partial_transpose(h: &HermitianMatrix, shape: BipartiteShape) -> Result<HermitianMatrix> {
    shape.check(h.dim())?;
    let d2 = shape.d2;
    let n = h.dim();
    let m = CMatrix::from_fn(n, n, |r, c| {
        let (j, k) = (r / d2, r % d2);
        let (i, l) = (c / d2, c % d2);
        h.0[(i * d2 + k, j * d2 + l)]
    });
    Ok(HermitianMatrix(m))
}

pub fn trace_norm(h: &HermitianMatrix) -> f64 {
    h.eigenvalues().iter().map(|l| l.abs()).sum()
}

pub fn op_norm(h: &HermitianMatrix) -> f64 {
    h.eigh().max_abs_value()
}

pub fn kron(a: &HermitianMatrix, b: &HermitianMatrix) -> HermitianMatrix {
    a.kron(b)
}

/// Eigenvalues of a real square matrix (row-major), sorted by modulus,
/// largest first. Balancing and elimination to Hessenberg form are
/// similarity transforms; the QR phase is backward stable, so eigenvalues
/// carry an error of order machine epsilon times the matrix norm divided by
/// their condition number.
pub fn general_spectrum(n: usize, entries: &[f64]) -> Result<Vec<C64>> {
    if entries.len() != n * n {
        return Err(Error::Dimension(format!("{} entries for a {}x{} matrix", entries.len(), n, n)));
    }
    if entries.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite);
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut a = vec![vec![0.0; n + 1]; n + 1];
    for i in 0..n {
        for j in 0..n {
            a[i + 1][j + 1] = entries[i * n + j];
        }
    }
    balance(&mut a, n);
    hessenberg(&mut a, n);
    let (wr, wi) = hqr(&mut a, n, 100 * n * n)?;
    let mut out: Vec<C64> = (1..=n).map(|i| C64::new(wr[i], wi[i])).collect();
    out.sort_by(|x, y| {
        y.norm()
            .total_cmp(&x.norm())
            .then(y.re.total_cmp(&x.re))
            .then(y.im.total_cmp(&x.im))
    });
    Ok(out)
}

// The three routines below use 1-based indexing on an (n+1)×(n+1) array.

fn balance(a: &mut [Vec<f64>], n: usize) {
    const RADIX: f64 = 2.0;
    let sqrdx = RADIX * RADIX;
    let mut done = false;
    while !done {
        done = true;
        for i in 1..=n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 1..=n {
                if j != i {
                    c += a[j][i].abs();
                    r += a[i][j].abs();
                }
            }
            if c != 0.0 && r != 0.0 {
                let mut g = r / RADIX;
                let mut f = 1.0;
                let s = c + r;
                while c < g {
                    f *= RADIX;
                    c *= sqrdx;
                }
                g = r * RADIX;
                while c > g {
                    f /= RADIX;
                    c /= sqrdx;
                }
                if (c + r) / f < 0.95 * s {
                    done = false;
                    let g = 1.0 / f;
                    for j in 1..=n {
                        a[i][j] *= g;
                    }
                    for row in a.iter_mut().take(n + 1).skip(1) {
                        row[i] *= f;
                    }
                }
            }
        }
    }
}

fn hessenberg(a: &mut [Vec<f64>], n: usize) {
    for m in 2..n {
        let mut x = 0.0;
        let mut piv = m;
        for j in m..=n {
            if a[j][m - 1].abs() > f64::abs(x) {
                x = a[j][m - 1];
                piv = j;
            }
        }
        if piv != m {
            for j in (m - 1)..=n {
                let tmp = a[piv][j];
                a[piv][j] = a[m][j];
                a[m][j] = tmp;
            }
            for row in a.iter_mut().take(n + 1).skip(1) {
                row.swap(piv, m);
            }
        }
        if x != 0.0 {
            for i in (m + 1)..=n {
                let mut y = a[i][m - 1];
                if y != 0.0 {
                    y /= x;
                    a[i][m - 1] = y;
                    for j in m..=n {
                        a[i][j] -= y * a[m][j];
                    }
                    for row in a.iter_mut().take(n + 1).skip(1) {
                        row[m] += y * row[i];
                    }
                }
            }
        }
    }
    for i in 1..=n {
        for j in 1..=n {
            if i > j + 1 {
                a[i][j] = 0.0;
            }
        }
    }
}

fn sign(a: f64, b: f64) -> f64 {
    if b >= 0.0 {
        a.abs()
    } else {
        -a.abs()
    }
}

#[allow(clippy::many_single_char_names)]
fn hqr(a: &mut [Vec<f64>], n: usize, cap: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut wr = vec![0.0; n + 1];
    let mut wi = vec![0.0; n + 1];
    let mut anorm = 0.0;
    for i in 1..=n {
        for j in i.saturating_sub(1).max(1)..=n {
            anorm += a[i][j].abs();
        }
    }
    let mut nn = n;
    let mut t = 0.0;
    let mut total = 0usize;
    while nn >= 1 {
        let mut its = 0;
        loop {
            let mut l = nn;
            while l >= 2 {
                let s0 = a[l - 1][l - 1].abs() + a[l][l].abs();
                let s = if s0 == 0.0 { anorm } else { s0 };
                if a[l][l - 1].abs() + s == s {
                    a[l][l - 1] = 0.0;
                    break;
                }
                l -= 1;
            }
            let x0 = a[nn][nn];
            if l == nn {
                wr[nn] = x0 + t;
                wi[nn] = 0.0;
                nn -= 1;
            } else {
                let y0 = a[nn - 1][nn - 1];
                let w0 = a[nn][nn - 1] * a[nn - 1][nn];
                if l == nn - 1 {
                    let p = 0.5 * (y0 - x0);
                    let q = p * p + w0;
                    let z = q.abs().sqrt();
                    let xx = x0 + t;
                    if q >= 0.0 {
                        let z = p + sign(z, p);
                        wr[nn - 1] = xx + z;
                        wr[nn] = xx + z;
                        if z != 0.0 {
                            wr[nn] = xx - w0 / z;
                        }
                        wi[nn - 1] = 0.0;
                        wi[nn] = 0.0;
                    } else {
                        wr[nn - 1] = xx + p;
                        wr[nn] = xx + p;
                        wi[nn - 1] = -z;
                        wi[nn] = z;
                    }
                    nn -= 2;
                } else {
                    total += 1;
                    if total > cap {
                        return Err(Error::NoConvergence {
                            routine: "Hessenberg QR",
                            residual: a[nn][nn - 1].abs(),
                        });
                    }
                    let (mut x, mut y, mut w) = (x0, y0, w0);
                    if its > 0 && its % 10 == 0 {
                        t += x;
                        for i in 1..=nn {
                            a[i][i] -= x;
                        }
                        let s = a[nn][nn - 1].abs() + a[nn - 1][nn - 2].abs();
                        x = 0.75 * s;
                        y = x;
                        w = -0.4375 * s * s;
                    }
                    its += 1;
                    let mut m = nn - 2;
                    let (mut p, mut q, mut r, mut z);
                    loop {
                        z = a[m][m];
                        r = x - z;
                        let s = y - z;
                        p = (r * s - w) / a[m + 1][m] + a[m][m + 1];
                        q = a[m + 1][m + 1] - z - r - s;
                        r = a[m + 2][m + 1];
                        let s = p.abs() + q.abs() + r.abs();
                        p /= s;
                        q /= s;
                        r /= s;
                        if m == l {
                            break;
                        }
                        let u = a[m][m - 1].abs() * (q.abs() + r.abs());
                        let v = p.abs() * (a[m - 1][m - 1].abs() + z.abs() + a[m + 1][m + 1].abs());
                        if u + v == v {
                            break;
                        }
                        m -= 1;
                    }
                    for i in (m + 2)..=nn {
                        a[i][i - 2] = 0.0;
                        if i != m + 2 {
                            a[i][i - 3] = 0.0;
                        }
                    }
                    for k in m..nn {
                        if k != m {
                            p = a[k][k - 1];
                            q = a[k + 1][k - 1];
                            r = 0.0;
                            if k != nn - 1 {
                                r = a[k + 2][k - 1];
                            }
                            x = p.abs() + q.abs() + r.abs();
                            if x != 0.0 {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        let s = sign((p * p + q * q + r * r).sqrt(), p);
                        if s != 0.0 {
                            if k == m {
                                if l != m {
                                    a[k][k - 1] = -a[k][k - 1];
                                }
                            } else {
                                a[k][k - 1] = -s * x;
                            }
                            p += s;
                            x = p / s;
                            y = q / s;
                            z = r / s;
                            q /= p;
                            r /= p;
                            for j in k..=nn {
                                p = a[k][j] + q * a[k + 1][j];
                                if k != nn - 1 {
                                    p += r * a[k + 2][j];
                                    a[k + 2][j] -= p * z;
                                }
                                a[k + 1][j] -= p * y;
                                a[k][j] -= p * x;
                            }
                            let mmin = if nn < k + 3 { nn } else { k + 3 };
                            for row in a.iter_mut().take(mmin + 1).skip(l) {
                                p = x * row[k] + y * row[k + 1];
                                if k != nn - 1 {
                                    p += z * row[k + 2];
                                    row[k + 2] -= p * r;
                                }
                                row[k + 1] -= p * q;
                                row[k] -= p;
                            }
                        }
                    }
                }
            }
            if l + 1 >= nn {
                break;
            }
        }
    }
    Ok((wr, wi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_density, random_hermitian, rng};

    const TOL: f64 = 1e-10;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn omega2() -> HermitianMatrix {
        let s = 0.5f64.sqrt();
        HermitianMatrix::outer(&[c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)])
    }

    #[test]
    fn identity_and_diagonal_spectra() {
        let sys = eig_hermitian(&HermitianMatrix::identity(3)).unwrap();
        assert_eq!(sys.values, vec![1.0, 1.0, 1.0]);
        let sys = eig_hermitian(&HermitianMatrix::from_diagonal(&[2.0, -1.0])).unwrap();
        assert_eq!(sys.values, vec![-1.0, 2.0]);
    }

    #[test]
    fn reconstruction_and_orthonormality() {
        let mut r = rng(11);
        for n in [1, 2, 3, 5, 8, 16] {
            let h = random_hermitian(n, &mut r);
            let sys = eig_hermitian(&h).unwrap();
            let err = (&sys.reconstruct() - &h).max_abs();
            assert!(err <= TOL * (1.0 + op_norm(&h)), "n={n} err={err}");
            let gram = &sys.vectors.adjoint() * &sys.vectors;
            let dev = (&gram - &CMatrix::identity(n)).max_abs();
            assert!(dev <= TOL, "n={n} dev={dev}");
            assert!(sys.values.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn hermiticity_is_validated() {
        let m = CMatrix::from_fn(2, 2, |i, j| if i < j { c(1.0, 0.0) } else { c(0.0, 0.0) });
        assert!(matches!(HermitianMatrix::new(m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn psd_check_band() {
        assert!(psd_check(&HermitianMatrix::identity(2), 1e-9));
        assert!(!psd_check(&HermitianMatrix::from_diagonal(&[1.0, -1.0]), 1e-9));
        assert!(psd_check(&HermitianMatrix::from_diagonal(&[1.0, -1e-12]), 1e-9));
    }

    #[test]
    fn pseudo_inverse_square_root() {
        let i2 = HermitianMatrix::identity(2);
        assert!((&pseudo_inv_sqrt(&i2, 1e-9) - &i2).max_abs() < 1e-15);
        let p = pseudo_inv_sqrt(&HermitianMatrix::from_diagonal(&[4.0, 0.0]), 1e-9);
        assert!((&p - &HermitianMatrix::from_diagonal(&[0.5, 0.0])).max_abs() < 1e-15);
        let p = pseudo_inv_sqrt(&HermitianMatrix::from_diagonal(&[9.0, 1.0]), 1e-9);
        assert!((&p - &HermitianMatrix::from_diagonal(&[1.0 / 3.0, 1.0])).max_abs() < 1e-15);
        assert!(pseudo_inv_sqrt(&HermitianMatrix::zeros(3), 1e-9).is_zero());
    }

    #[test]
    fn pseudo_inverse_sandwich_is_support_projector() {
        let mut r = rng(5);
        for n in [2, 3, 4] {
            let g = random_density(n, &mut r);
            // rank-deficient: project out one direction
            let v = random_density(n, &mut r).eigh().vector(0);
            let q = &HermitianMatrix::identity(n) - &HermitianMatrix::outer(&v);
            let h = g.congruence(q.matrix());
            let s = pseudo_inv_sqrt(&h, 1e-9);
            let lhs = h.congruence(s.matrix());
            let err = (&lhs - &support_projector(&h, 1e-9)).max_abs();
            assert!(err < 1e-8, "err={err}");
            let comm = (&(s.matrix() * h.matrix()) - &(h.matrix() * s.matrix())).max_abs();
            assert!(comm < 1e-9);
        }
    }

    #[test]
    fn support_containment() {
        let a = HermitianMatrix::from_diagonal(&[1.0, 0.0]);
        let b = HermitianMatrix::from_diagonal(&[0.0, 1.0]);
        assert!(!support_contained(&a, &b, 1e-9));
        assert!(support_contained(&a, &HermitianMatrix::identity(2), 1e-9));
        let f = HermitianMatrix::from_diagonal(&[0.3, 0.7]);
        assert!(support_contained(&f, &f, 1e-9));
    }

    #[test]
    fn partial_transpose_examples() {
        let shape = BipartiteShape::new(2, 2).unwrap();
        let i4 = HermitianMatrix::identity(4);
        assert_eq!(partial_transpose(&i4, shape).unwrap(), i4);
        let pt = partial_transpose(&omega2(), shape).unwrap();
        let vals = pt.eigenvalues();
        let expect = [-0.5, 0.5, 0.5, 0.5];
        for (v, e) in vals.iter().zip(expect) {
            assert!((v - e).abs() < 1e-14);
        }
        let swap_half = HermitianMatrix::from_fn(4, |r, col| {
            let (i, k) = (r / 2, r % 2);
            let (j, l) = (col / 2, col % 2);
            if i == l && k == j {
                c(0.5, 0.0)
            } else {
                c(0.0, 0.0)
            }
        });
        assert!((&pt - &swap_half).max_abs() < 1e-15);
        assert!(partial_transpose(&HermitianMatrix::identity(3), shape).is_err());
    }

    #[test]
    fn partial_transpose_of_product() {
        let mut r = rng(3);
        let a = random_hermitian(2, &mut r);
        let b = random_hermitian(3, &mut r);
        let shape = BipartiteShape::new(2, 3).unwrap();
        let lhs = partial_transpose(&a.kron(&b), shape).unwrap();
        let at = HermitianMatrix::hermitian_part(&a.matrix().transpose());
        let rhs = at.kron(&b);
        assert!((&lhs - &rhs).max_abs() < 1e-15);
    }

    #[test]
    fn norms() {
        assert_eq!(trace_norm(&HermitianMatrix::from_diagonal(&[1.0, -1.0])), 2.0);
        assert_eq!(op_norm(&HermitianMatrix::from_diagonal(&[3.0, -5.0])), 5.0);
        let mut r = rng(8);
        let rho = random_density(4, &mut r);
        assert!((trace_norm(&rho) - 1.0).abs() < TOL);
    }

    #[test]
    fn spectrum_identity_and_rotation() {
        let mut id = vec![0.0; 16];
        for i in 0..4 {
            id[i * 4 + i] = 1.0;
        }
        let s = general_spectrum(4, &id).unwrap();
        assert!(s.iter().all(|z| (z - c(1.0, 0.0)).norm() < 1e-14));
        let th: f64 = 0.7;
        let rot = [th.cos(), -th.sin(), th.sin(), th.cos()];
        let s = general_spectrum(2, &rot).unwrap();
        assert!((s[0] - c(th.cos(), th.sin())).norm() < 1e-14);
        assert!((s[1] - c(th.cos(), -th.sin())).norm() < 1e-14);
    }

    #[test]
    fn spectrum_block_diagonal_union() {
        let th: f64 = 1.1;
        // blocks: rotation scaled by 0.6, [[2,1],[0,-3]], [0.25]
        let n = 5;
        let mut m = vec![0.0; n * n];
        let set = |m: &mut Vec<f64>, i: usize, j: usize, v: f64| m[i * n + j] = v;
        set(&mut m, 0, 0, 0.6 * th.cos());
        set(&mut m, 0, 1, -0.6 * th.sin());
        set(&mut m, 1, 0, 0.6 * th.sin());
        set(&mut m, 1, 1, 0.6 * th.cos());
        set(&mut m, 2, 2, 2.0);
        set(&mut m, 2, 3, 1.0);
        set(&mut m, 3, 3, -3.0);
        set(&mut m, 4, 4, 0.25);
        let s = general_spectrum(n, &m).unwrap();
        let expect = [
            c(-3.0, 0.0),
            c(2.0, 0.0),
            c(0.6 * th.cos(), 0.6 * th.sin()),
            c(0.6 * th.cos(), -0.6 * th.sin()),
            c(0.25, 0.0),
        ];
        for (z, e) in s.iter().zip(expect) {
            assert!((z - e).norm() < 1e-7, "{z} vs {e}");
        }
    }
}
