//! Linear maps on Hermitian matrices.
//!
//! A `Channel` stores the real matrix of the map in the orthonormal basis
//! I/√d, then for each pair j < k the symmetric and antisymmetric
//! off-diagonal elements, then the traceless diagonal elements. In this
//! basis the adjoint is the transpose.

use crate::cones::{hilbert_distance_unchecked, member, qubit_from_coordinates, ConeSpec, ExtendedReal};
use crate::linalg::{general_spectrum, partial_transpose, psd_check, BipartiteShape, CMatrix, HermitianMatrix, C64};
use crate::norms::base_norm;
use crate::random::{derive_seed, gaussian_c64, random_pure_vector, rng};
use crate::report::{CheckReport, CheckStatus};
use crate::{Error, Result, Tolerances};
use rand::Rng;

const SQRT2: f64 = std::f64::consts::SQRT_2;

/// Coordinates of H in the Hermitian basis (length d²).
pub fn coords(h: &HermitianMatrix) -> Vec<f64> {
    let d = h.dim();
    let mut x = Vec::with_capacity(d * d);
    x.push(h.trace() / (d as f64).sqrt());
    for j in 0..d {
        for k in j + 1..d {
            let z = h.entry(j, k);
            x.push(SQRT2 * z.re);
            x.push(-SQRT2 * z.im);
        }
    }
    let mut partial = 0.0;
    for l in 1..d {
        partial += h.entry(l - 1, l - 1).re;
        let lf = l as f64;
        x.push((partial - lf * h.entry(l, l).re) / (lf * (lf + 1.0)).sqrt());
    }
    x
}

/// Inverse of `coords`.
pub fn from_coords(d: usize, x: &[f64]) -> Result<HermitianMatrix> {
    if x.len() != d * d {
        return Err(Error::Dimension(format!("{} coordinates for dimension {}", x.len(), d)));
    }
    let mut m = CMatrix::zeros(d, d);
    let mut idx = 1;
    for j in 0..d {
        for k in j + 1..d {
            let z = C64::new(x[idx], -x[idx + 1]) / SQRT2;
            m[(j, k)] = z;
            m[(k, j)] = z.conj();
            idx += 2;
        }
    }
    let base = x[0] / (d as f64).sqrt();
    for i in 0..d {
        m[(i, i)] = C64::new(base, 0.0);
    }
    for l in 1..d {
        let lf = l as f64;
        let c = x[idx] / (lf * (lf + 1.0)).sqrt();
        for i in 0..l {
            m[(i, i)] += c;
        }
        m[(l, l)] -= c * lf;
        idx += 1;
    }
    Ok(HermitianMatrix::hermitian_part(&m))
}

/// The basis elements in coordinate order.
pub fn hermitian_basis(d: usize) -> Vec<HermitianMatrix> {
    (0..d * d)
        .map(|k| {
            let mut x = vec![0.0; d * d];
            x[k] = 1.0;
            from_coords(d, &x).expect("length matches")
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct Channel {
    in_dim: usize,
    out_dim: usize,
    /// Row-major, out_dim² rows by in_dim² columns.
    matrix: Vec<f64>,
    pub label: Option<String>,
}

impl Channel {
    pub fn from_matrix(in_dim: usize, out_dim: usize, matrix: Vec<f64>) -> Result<Self> {
        if in_dim == 0 || out_dim == 0 {
            return Err(Error::Dimension("dimensions must be positive".into()));
        }
        if matrix.len() != in_dim * in_dim * out_dim * out_dim {
            return Err(Error::Dimension("superoperator matrix has the wrong size".into()));
        }
        if matrix.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Channel {
            in_dim,
            out_dim,
            matrix,
            label: None,
        })
    }

    /// Tabulate a real-linear map on Hermitian matrices.
    pub fn from_linear_map(in_dim: usize, out_dim: usize, f: impl Fn(&HermitianMatrix) -> HermitianMatrix) -> Result<Self> {
        let (ni, no) = (in_dim * in_dim, out_dim * out_dim);
        let mut matrix = vec![0.0; ni * no];
        for (k, b) in hermitian_basis(in_dim).iter().enumerate() {
            let img = f(b);
            if img.dim() != out_dim {
                return Err(Error::Dimension("map output has the wrong dimension".into()));
            }
            for (r, c) in coords(&img).into_iter().enumerate() {
                matrix[r * ni + k] = c;
            }
        }
        Channel::from_matrix(in_dim, out_dim, matrix)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn identity(d: usize) -> Self {
        Channel::from_linear_map(d, d, |h| h.clone()).expect("valid").with_label("identity")
    }

    /// ρ ↦ tr(ρ)·σ.
    pub fn constant(in_dim: usize, sigma: &HermitianMatrix) -> Self {
        Channel::from_linear_map(in_dim, sigma.dim(), |h| sigma.scale(h.trace()))
            .expect("valid")
            .with_label("constant")
    }

    /// Full transposition ρ ↦ ρᵀ.
    pub fn transpose_map(d: usize) -> Self {
        Channel::from_linear_map(d, d, |h| HermitianMatrix::hermitian_part(&h.matrix().transpose()))
            .expect("valid")
            .with_label("transpose")
    }

    /// ρ ↦ Σ K ρ K†.
    pub fn from_kraus(kraus: &[CMatrix]) -> Result<Self> {
        let first = kraus.first().ok_or_else(|| Error::InvalidArgument("empty Kraus list".into()))?;
        let (d_out, d_in) = (first.rows(), first.cols());
        for k in kraus {
            if k.rows() != d_out || k.cols() != d_in {
                return Err(Error::Dimension("Kraus operators differ in shape".into()));
            }
            if !k.is_finite() {
                return Err(Error::NonFinite);
            }
        }
        Channel::from_linear_map(d_in, d_out, |h| {
            let mut acc = HermitianMatrix::zeros(d_out);
            for k in kraus {
                acc += &h.congruence(k);
            }
            acc
        })
    }

    /// T(X)_kl = Σ_ij X_ij J[(i,k),(j,l)].
    pub fn from_choi(choi: &HermitianMatrix, in_dim: usize, out_dim: usize) -> Result<Self> {
        if choi.dim() != in_dim * out_dim {
            return Err(Error::Dimension("Choi matrix does not match the dimensions".into()));
        }
        let j = choi.matrix();
        Channel::from_linear_map(in_dim, out_dim, |x| {
            HermitianMatrix::from_fn(out_dim, |k, l| {
                let mut s = C64::new(0.0, 0.0);
                for i in 0..in_dim {
                    for jj in 0..in_dim {
                        s += x.entry(i, jj) * j[(i * out_dim + k, jj * out_dim + l)];
                    }
                }
                s
            })
        })
    }

    /// Build from the real superoperator plus dims; alias of `from_matrix`.
    pub fn from_superoperator(in_dim: usize, out_dim: usize, matrix: Vec<f64>) -> Result<Self> {
        Channel::from_matrix(in_dim, out_dim, matrix)
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn matrix(&self) -> &[f64] {
        &self.matrix
    }

    pub fn entry(&self, r: usize, c: usize) -> f64 {
        self.matrix[r * self.in_dim * self.in_dim + c]
    }

    pub fn apply(&self, h: &HermitianMatrix) -> Result<HermitianMatrix> {
        if h.dim() != self.in_dim {
            return Err(Error::Dimension(format!("channel expects dimension {}, got {}", self.in_dim, h.dim())));
        }
        let x = coords(h);
        let ni = self.in_dim * self.in_dim;
        let y: Vec<f64> = (0..self.out_dim * self.out_dim)
            .map(|r| self.matrix[r * ni..(r + 1) * ni].iter().zip(&x).map(|(a, b)| a * b).sum())
            .collect();
        from_coords(self.out_dim, &y)
    }

    /// Complex-linear extension applied to an arbitrary square matrix.
    pub fn apply_complex(&self, x: &CMatrix) -> Result<CMatrix> {
        let s = HermitianMatrix::hermitian_part(x);
        let anti = CMatrix::from_fn(x.rows(), x.cols(), |i, j| (x[(i, j)] - x[(j, i)].conj()) * C64::new(0.0, -0.5));
        let a = HermitianMatrix::hermitian_part(&anti);
        let ts = self.apply(&s)?;
        let ta = self.apply(&a)?;
        Ok(ts.matrix() + &ta.matrix().scale(C64::new(0.0, 1.0)))
    }

    /// J = Σ_ij E_ij ⊗ T(E_ij).
    pub fn to_choi(&self) -> HermitianMatrix {
        let (di, dout) = (self.in_dim, self.out_dim);
        let mut j = CMatrix::zeros(di * dout, di * dout);
        for i in 0..di {
            for jj in 0..di {
                let mut e = CMatrix::zeros(di, di);
                e[(i, jj)] = C64::new(1.0, 0.0);
                let img = self.apply_complex(&e).expect("dimension fixed");
                for k in 0..dout {
                    for l in 0..dout {
                        j[(i * dout + k, jj * dout + l)] = img[(k, l)];
                    }
                }
            }
        }
        HermitianMatrix::hermitian_part(&j)
    }

    /// Kraus operators from the Choi eigendecomposition (eigenvalues below
    /// `tol · λ_max` dropped). Only meaningful for CP maps.
    pub fn to_kraus(&self, tol: f64) -> Vec<CMatrix> {
        let sys = self.to_choi().eigh();
        let lmax = sys.values.last().copied().unwrap_or(0.0);
        let (di, dout) = (self.in_dim, self.out_dim);
        let mut out = Vec::new();
        for (idx, &l) in sys.values.iter().enumerate() {
            if l <= tol * lmax || l <= 0.0 {
                continue;
            }
            let w = sys.vector(idx);
            let s = l.sqrt();
            out.push(CMatrix::from_fn(dout, di, |k, i| w[i * dout + k] * s));
        }
        out
    }

    /// T2 ∘ T1.
    pub fn compose(t2: &Channel, t1: &Channel) -> Result<Channel> {
        if t2.in_dim != t1.out_dim {
            return Err(Error::Dimension("composition dimension mismatch".into()));
        }
        let (a, b, c) = (t2.out_dim * t2.out_dim, t2.in_dim * t2.in_dim, t1.in_dim * t1.in_dim);
        let mut m = vec![0.0; a * c];
        for i in 0..a {
            for k in 0..b {
                let x = t2.matrix[i * b + k];
                if x == 0.0 {
                    continue;
                }
                for j in 0..c {
                    m[i * c + j] += x * t1.matrix[k * c + j];
                }
            }
        }
        Channel::from_matrix(t1.in_dim, t2.out_dim, m)
    }

    pub fn adjoint(&self) -> Channel {
        let (ni, no) = (self.in_dim * self.in_dim, self.out_dim * self.out_dim);
        let mut m = vec![0.0; ni * no];
        for r in 0..no {
            for c in 0..ni {
                m[c * no + r] = self.matrix[r * ni + c];
            }
        }
        Channel {
            in_dim: self.out_dim,
            out_dim: self.in_dim,
            matrix: m,
            label: self.label.as_ref().map(|l| format!("{l}*")),
        }
    }

    pub fn scale(&self, s: f64) -> Channel {
        Channel {
            in_dim: self.in_dim,
            out_dim: self.out_dim,
            matrix: self.matrix.iter().map(|x| x * s).collect(),
            label: self.label.clone(),
        }
    }

    /// T*(I) = I.
    pub fn is_trace_preserving(&self, tol: f64) -> bool {
        let img = self.adjoint().apply(&HermitianMatrix::identity(self.out_dim)).expect("dims");
        (&img - &HermitianMatrix::identity(self.in_dim)).max_abs() <= tol
    }

    /// T(I) = I.
    pub fn is_unital(&self, tol: f64) -> bool {
        if self.in_dim != self.out_dim {
            return false;
        }
        let img = self.apply(&HermitianMatrix::identity(self.in_dim)).expect("dims");
        (&img - &HermitianMatrix::identity(self.out_dim)).max_abs() <= tol
    }

    pub fn is_completely_positive(&self, tol: f64) -> bool {
        psd_check(&self.to_choi(), tol)
    }

    /// One-sided positivity test: false means a pure state with a
    /// non-psd image was found.
    pub fn is_positive_sampled(&self, n_samples: usize, seed: u64) -> bool {
        let d = self.in_dim;
        let tol = 1e-9;
        let ok = |v: &[C64]| psd_check(&self.apply(&HermitianMatrix::outer(v)).expect("dims"), tol);
        for v in structured_vectors(d) {
            if !ok(&v) {
                return false;
            }
        }
        let mut r = rng(seed);
        (0..n_samples).all(|_| ok(&random_pure_vector(d, &mut r)))
    }

    /// Eigenvalues of the superoperator matrix, largest modulus first.
    pub fn spectrum(&self) -> Result<Vec<C64>> {
        if self.in_dim != self.out_dim {
            return Err(Error::Dimension("spectrum needs equal input and output dimension".into()));
        }
        general_spectrum(self.in_dim * self.in_dim, &self.matrix)
    }
}

/// Basis states and the pairwise superpositions (|i⟩ + |j⟩)/√2,
/// (|i⟩ + i|j⟩)/√2.
fn structured_vectors(d: usize) -> Vec<Vec<C64>> {
    let z = C64::new(0.0, 0.0);
    let mut out = Vec::new();
    for i in 0..d {
        let mut v = vec![z; d];
        v[i] = C64::new(1.0, 0.0);
        out.push(v);
    }
    let s = 1.0 / SQRT2;
    for i in 0..d {
        for j in i + 1..d {
            for ph in [C64::new(s, 0.0), C64::new(-s, 0.0), C64::new(0.0, s), C64::new(0.0, -s)] {
                let mut v = vec![z; d];
                v[i] = C64::new(s, 0.0);
                v[j] = ph;
                out.push(v);
            }
        }
    }
    out
}

/// ρ ↦ pρ + (1 − p)·tr(ρ)·σ.
pub fn depolarizing(p: f64, sigma: &HermitianMatrix) -> Result<Channel> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!("p = {p} outside [0, 1]")));
    }
    check_state(sigma)?;
    let d = sigma.dim();
    let n = d * d;
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        m[i * n + i] = p;
    }
    let s = coords(sigma);
    let root = (d as f64).sqrt();
    for r in 0..n {
        m[r * n] += (1.0 - p) * root * s[r];
    }
    Ok(Channel::from_matrix(d, d, m)?.with_label(format!("depolarizing(p={p})")))
}

fn check_state(sigma: &HermitianMatrix) -> Result<()> {
    if (sigma.trace() - 1.0).abs() > 1e-9 || !psd_check(sigma, 1e-9) {
        return Err(Error::InvalidArgument("sigma must be a density matrix".into()));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiameterMethod {
    DepolarizingClosedForm,
    QubitUnital,
    Sampled,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiameterEstimate {
    pub lower: ExtendedReal,
    pub upper: Option<ExtendedReal>,
    pub exact: bool,
    pub method: DiameterMethod,
    pub samples_used: usize,
    /// The sampled value exceeded ln(1e12).
    pub inf_suspect: bool,
}

/// Sampled values above this are reported as effectively infinite.
pub fn inf_threshold() -> f64 {
    1e12f64.ln()
}

impl DiameterEstimate {
    pub fn exact(value: ExtendedReal, method: DiameterMethod) -> Self {
        DiameterEstimate {
            lower: value,
            upper: Some(value),
            exact: true,
            method,
            samples_used: 0,
            inf_suspect: false,
        }
    }

    /// The value a bound should use: the upper end when certified, else the
    /// sampled lower end.
    pub fn certifying_value(&self) -> ExtendedReal {
        self.upper.unwrap_or(self.lower)
    }

    pub fn is_certified(&self) -> bool {
        self.upper.is_some()
    }
}

/// Projective diameter of the depolarizing channel. With λ₁ ≤ λ₂ the two
/// smallest eigenvalues of σ and x = p/(1−p), the eigenstate pair gives
/// ln(1 + x/λ₁) + ln(1 + x/λ₂) and the defining ratios bound it by
/// 2 ln(1 + x/λ₁); both agree when λ₁ = λ₂. On the PPT cone the same formula
/// applies to σ^T1.
pub fn diameter_depolarizing(p: f64, sigma: &HermitianMatrix, cone: &ConeSpec) -> Result<DiameterEstimate> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!("p = {p} outside [0, 1]")));
    }
    check_state(sigma)?;
    let target = match cone {
        ConeSpec::Psd => sigma.clone(),
        ConeSpec::Ppt(s) => {
            let st = partial_transpose(sigma, *s)?;
            if !psd_check(&st, 1e-9) {
                return Err(Error::OutsideCone("sigma^T1 is not psd".into()));
            }
            st
        }
        other => {
            return Err(Error::NotApplicable(format!("no closed form on {}", other.name())));
        }
    };
    let m = DiameterMethod::DepolarizingClosedForm;
    if sigma.dim() < 2 || p == 0.0 {
        return Ok(DiameterEstimate::exact(ExtendedReal::Finite(0.0), m));
    }
    if p == 1.0 {
        return Ok(DiameterEstimate::exact(ExtendedReal::Infinite, m));
    }
    let vals = target.eigenvalues();
    let lmax = vals[vals.len() - 1];
    let (l1, l2) = (vals[0].max(0.0), vals[1].max(0.0));
    if l1 <= 1e-14 * lmax {
        return Ok(DiameterEstimate::exact(ExtendedReal::Infinite, m));
    }
    let x = p / (1.0 - p);
    let lower = (x / l1).ln_1p() + (x / l2).ln_1p();
    let upper = 2.0 * (x / l1).ln_1p();
    let exact = (l2 - l1).abs() <= 1e-9 * l2;
    Ok(DiameterEstimate {
        lower: ExtendedReal::from_f64(if exact { upper } else { lower }),
        upper: Some(ExtendedReal::from_f64(upper)),
        exact,
        method: m,
        samples_used: 0,
        inf_suspect: false,
    })
}

/// tanh(Δ/4), with ∞ ↦ 1.
pub fn birkhoff_coefficient(delta: ExtendedReal) -> f64 {
    match delta {
        ExtendedReal::Infinite => 1.0,
        ExtendedReal::Finite(x) => (x / 4.0).tanh(),
    }
}

/// Sampling knobs shared by the sampled estimators.
#[derive(Clone, Copy, Debug)]
pub struct SampleOptions {
    pub n_samples: usize,
    pub n_refine: usize,
    pub seed: u64,
    /// Independent partitions run on scoped threads; 1 runs inline.
    pub partitions: usize,
}

impl Default for SampleOptions {
    fn default() -> Self {
        SampleOptions {
            n_samples: 64,
            n_refine: 3,
            seed: 0,
            partitions: 1,
        }
    }
}

/// Parametrized extreme rays of an input cone.
#[derive(Clone, Copy, Debug)]
enum RayKind {
    /// |ψ⟩⟨ψ|.
    Pure,
    /// (|ψ⟩⟨ψ|)^T1.
    PureTransposed(BipartiteShape),
    /// |ψ⊗φ⟩⟨ψ⊗φ|; parameters are ψ followed by φ.
    Product(BipartiteShape),
    /// Deformed-cone boundary (1, f(r̂)r̂); parameters are r in the real parts.
    Deformed(crate::cones::Deformation),
}

#[derive(Clone, Debug)]
struct Ray {
    kind: RayKind,
    params: Vec<C64>,
}

impl Ray {
    fn realize(&self) -> HermitianMatrix {
        match self.kind {
            RayKind::Pure => HermitianMatrix::pure_state(&self.params).expect("nonzero"),
            RayKind::PureTransposed(s) => {
                partial_transpose(&HermitianMatrix::pure_state(&self.params).expect("nonzero"), s).expect("shape")
            }
            RayKind::Product(s) => {
                let (a, b) = self.params.split_at(s.d1);
                let v: Vec<C64> = a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect();
                HermitianMatrix::pure_state(&v).expect("nonzero")
            }
            RayKind::Deformed(d) => {
                let r = [self.params[0].re, self.params[1].re, self.params[2].re];
                let n = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt().max(1e-300);
                let f = d.radius(r);
                qubit_from_coordinates(1.0, [f * r[0] / n, f * r[1] / n, f * r[2] / n])
            }
        }
    }

    fn is_real(&self) -> bool {
        matches!(self.kind, RayKind::Deformed(_))
    }

    fn perturbed(&self, k: usize, dir: C64) -> Option<Ray> {
        let mut params = self.params.clone();
        params[k] += dir;
        if params.iter().all(|z| z.norm() == 0.0) {
            return None;
        }
        Some(Ray { kind: self.kind, params })
    }
}

fn random_ray<R: Rng + ?Sized>(cone: &ConeSpec, d: usize, r: &mut R) -> Ray {
    match cone {
        ConeSpec::Psd => Ray {
            kind: RayKind::Pure,
            params: random_pure_vector(d, r),
        },
        ConeSpec::Ppt(s) => Ray {
            kind: RayKind::PureTransposed(*s),
            params: random_pure_vector(d, r),
        },
        ConeSpec::ConvPsdPpt(s) => Ray {
            kind: if r.random_bool(0.5) { RayKind::Pure } else { RayKind::PureTransposed(*s) },
            params: random_pure_vector(d, r),
        },
        ConeSpec::PptCapPsd(s) => {
            let mut params = random_pure_vector(s.d1, r);
            params.extend(random_pure_vector(s.d2, r));
            Ray {
                kind: RayKind::Product(*s),
                params,
            }
        }
        ConeSpec::QubitDeformed(def) => Ray {
            kind: RayKind::Deformed(*def),
            params: (0..3).map(|_| C64::new(gaussian_c64(r).re, 0.0)).collect(),
        },
    }
}

fn structured_rays(cone: &ConeSpec, d: usize) -> Vec<Ray> {
    let wrap = |kind: RayKind| structured_vectors(d).into_iter().map(move |params| Ray { kind, params });
    match cone {
        ConeSpec::Psd => wrap(RayKind::Pure).collect(),
        ConeSpec::Ppt(s) => wrap(RayKind::PureTransposed(*s)).collect(),
        ConeSpec::ConvPsdPpt(s) => wrap(RayKind::Pure).chain(wrap(RayKind::PureTransposed(*s))).collect(),
        ConeSpec::PptCapPsd(s) => {
            let mut out = Vec::new();
            for a in structured_vectors(s.d1) {
                for b in structured_vectors(s.d2) {
                    let mut params = a.clone();
                    params.extend(b);
                    out.push(Ray {
                        kind: RayKind::Product(*s),
                        params,
                    });
                }
            }
            out
        }
        ConeSpec::QubitDeformed(def) => {
            let mut out = Vec::new();
            for k in 0..3 {
                for sgn in [1.0, -1.0] {
                    let mut params = vec![C64::new(0.0, 0.0); 3];
                    params[k] = C64::new(sgn, 0.0);
                    out.push(Ray {
                        kind: RayKind::Deformed(*def),
                        params,
                    });
                }
            }
            out
        }
    }
}

/// Best pair found by sampling followed by coordinate refinement.
struct PairSearch {
    value: f64,
    candidates: usize,
}

fn search_pairs(
    rays: Vec<Ray>,
    image: &(dyn Fn(&Ray) -> Option<HermitianMatrix> + Sync),
    objective: &(dyn Fn(&HermitianMatrix, &HermitianMatrix) -> f64 + Sync),
    n_refine: usize,
) -> PairSearch {
    let imgs: Vec<Option<HermitianMatrix>> = rays.iter().map(image).collect();
    let mut best = (f64::NEG_INFINITY, 0usize, 0usize);
    for i in 0..rays.len() {
        for j in i + 1..rays.len() {
            if let (Some(a), Some(b)) = (&imgs[i], &imgs[j]) {
                let v = objective(a, b);
                if v > best.0 {
                    best = (v, i, j);
                }
            }
        }
    }
    let candidates = rays.len();
    if best.0 == f64::NEG_INFINITY {
        return PairSearch { value: 0.0, candidates };
    }
    if best.0 == f64::INFINITY {
        return PairSearch {
            value: f64::INFINITY,
            candidates,
        };
    }
    let mut pair = [rays[best.1].clone(), rays[best.2].clone()];
    let mut imgs_pair = [imgs[best.1].clone().expect("set"), imgs[best.2].clone().expect("set")];
    let mut value = best.0;
    let dirs_complex = [C64::new(1.0, 0.0), C64::new(-1.0, 0.0), C64::new(0.0, 1.0), C64::new(0.0, -1.0)];
    let dirs_real = [C64::new(1.0, 0.0), C64::new(-1.0, 0.0)];
    'rounds: for _ in 0..n_refine {
        let mut step = 0.25;
        while step >= 1e-9 {
            let mut improved = false;
            for side in 0..2 {
                let dirs: &[C64] = if pair[side].is_real() { &dirs_real } else { &dirs_complex };
                for k in 0..pair[side].params.len() {
                    for dir in dirs {
                        let Some(cand) = pair[side].perturbed(k, dir * step) else { continue };
                        let Some(img) = image(&cand) else { continue };
                        let v = if side == 0 {
                            objective(&img, &imgs_pair[1])
                        } else {
                            objective(&imgs_pair[0], &img)
                        };
                        if v > value {
                            value = v;
                            pair[side] = cand;
                            imgs_pair[side] = img;
                            improved = true;
                            if value == f64::INFINITY {
                                break 'rounds;
                            }
                        }
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
    }
    PairSearch { value, candidates }
}

fn run_partitioned(
    cone_in: &ConeSpec,
    d_in: usize,
    opts: &SampleOptions,
    image: &(dyn Fn(&Ray) -> Option<HermitianMatrix> + Sync),
    objective: &(dyn Fn(&HermitianMatrix, &HermitianMatrix) -> f64 + Sync),
) -> PairSearch {
    let parts = opts.partitions.max(1);
    let per = opts.n_samples.div_ceil(parts);
    let job = |k: usize| {
        let mut r = rng(derive_seed(opts.seed, k as u64));
        let mut rays = if k == 0 { structured_rays(cone_in, d_in) } else { Vec::new() };
        rays.extend((0..per).map(|_| random_ray(cone_in, d_in, &mut r)));
        search_pairs(rays, image, objective, opts.n_refine)
    };
    let results: Vec<PairSearch> = if parts == 1 {
        vec![job(0)]
    } else {
        std::thread::scope(|sc| {
            let handles: Vec<_> = (0..parts).map(|k| sc.spawn(move || job(k))).collect();
            handles.into_iter().map(|h| h.join().expect("sampling worker panicked")).collect()
        })
    };
    let candidates = results.iter().map(|r| r.candidates).sum();
    let value = results.iter().map(|r| r.value).fold(0.0, f64::max);
    PairSearch { value, candidates }
}

/// Lower bound on the projective diameter from sampled extreme rays of the
/// input cone, refined by coordinate ascent on the best pair.
pub fn diameter_sampled(t: &Channel, cone: &ConeSpec, opts: &SampleOptions) -> Result<DiameterEstimate> {
    diameter_sampled_between(t, cone, cone, opts)
}

pub fn diameter_sampled_between(t: &Channel, cone_in: &ConeSpec, cone_out: &ConeSpec, opts: &SampleOptions) -> Result<DiameterEstimate> {
    cone_in.check_dim(t.in_dim())?;
    cone_out.check_dim(t.out_dim())?;
    let tol = Tolerances::default();
    let image = |r: &Ray| t.apply(&r.realize()).ok();
    let objective = |a: &HermitianMatrix, b: &HermitianMatrix| {
        hilbert_distance_unchecked(cone_out, a, b, &tol).map(|h| h.value()).unwrap_or(f64::NEG_INFINITY)
    };
    let res = run_partitioned(cone_in, t.in_dim(), opts, &image, &objective);
    let inf_suspect = res.value > inf_threshold();
    Ok(DiameterEstimate {
        lower: ExtendedReal::from_f64(res.value),
        upper: None,
        exact: false,
        method: DiameterMethod::Sampled,
        samples_used: res.candidates,
        inf_suspect,
    })
}

/// ½ max ‖T(b₁) − T(b₂)‖ over sampled base points. For trace-preserving
/// qubit maps on PSD the exact value ‖Λ‖∞ is returned instead.
pub fn base_norm_contraction_coefficient(t: &Channel, cone: &ConeSpec, opts: &SampleOptions) -> Result<f64> {
    cone.check_dim(t.in_dim())?;
    if !t.is_trace_preserving(1e-9) {
        return Err(Error::InvalidArgument("map is not base preserving".into()));
    }
    if matches!(cone, ConeSpec::Psd) && t.in_dim() == 2 && t.out_dim() == 2 {
        return crate::qubit::eta1(t);
    }
    let image = |r: &Ray| {
        let b = r.realize();
        let tr = b.trace();
        if tr <= 0.0 {
            return None;
        }
        t.apply(&b.scale(1.0 / tr)).ok()
    };
    let objective = |a: &HermitianMatrix, b: &HermitianMatrix| {
        base_norm(cone, &(a - b)).map(|r| r.value / 2.0).unwrap_or(f64::NEG_INFINITY)
    };
    Ok(run_partitioned(cone, t.in_dim(), opts, &image, &objective).value)
}

/// Fixed point of T by power iteration from the normalized identity.
fn fixed_point(t: &Channel) -> Option<HermitianMatrix> {
    let d = t.in_dim();
    let mut rho = HermitianMatrix::identity(d).scale(1.0 / d as f64);
    for _ in 0..10_000 {
        let next = t.apply(&rho).ok()?;
        let tr = next.trace();
        if tr.abs() < 1e-300 {
            return None;
        }
        let next = next.scale(1.0 / tr);
        let change = (&next - &rho).max_abs();
        rho = next;
        if change < 1e-13 {
            return Some(rho);
        }
    }
    None
}

/// Every eigenvalue of T except the leading one has modulus at most
/// tanh(Δ/4), given a fixed point inside the cone.
pub fn spectral_bound_check(t: &Channel, cone: &ConeSpec, delta: &DiameterEstimate) -> Result<CheckReport> {
    let ctx = format!("subleading eigenvalues of {} vs tanh(D/4)", t.label.clone().unwrap_or_else(|| "T".into()));
    let Some(fp) = fixed_point(t) else {
        return Ok(CheckReport::not_applicable(format!("{ctx}: no fixed point found")));
    };
    if !member(cone, &fp, 1e-9)? {
        return Ok(CheckReport::not_applicable(format!("{ctx}: fixed point outside the cone")));
    }
    let spec = t.spectrum()?;
    let lhs = spec.iter().skip(1).map(|z| z.norm()).fold(0.0, f64::max);
    let rhs = birkhoff_coefficient(delta.certifying_value());
    let status = if delta.is_certified() { CheckStatus::Certified } else { CheckStatus::Advisory };
    Ok(CheckReport::less_eq(ctx, lhs, rhs, 1e-7, status))
}

/// Sampled diameters of T (on `cone`) and T* (on the dual cone) should
/// agree. Sampling only gives lower bounds, so this is a consistency probe.
pub fn adjoint_diameter_check(t: &Channel, cone: &ConeSpec, opts: &SampleOptions) -> Result<CheckReport> {
    let a = diameter_sampled(t, cone, opts)?;
    let b = diameter_sampled(&t.adjoint(), &cone.dual(), opts)?;
    let ctx = "sampled diameter of T vs its adjoint";
    if a.inf_suspect && b.inf_suspect {
        return Ok(CheckReport::equal(ctx, f64::INFINITY, f64::INFINITY, 0.0, CheckStatus::Advisory));
    }
    let (x, y) = (a.lower.value(), b.lower.value());
    let tol = 1e-2 * (1.0 + x.max(y));
    Ok(CheckReport::equal(ctx, x, y, tol, CheckStatus::Advisory))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cones::hilbert_distance;
    use crate::random::{random_density, random_hermitian, random_kraus};
    use proptest::prelude::*;

    fn max_abs_diff(a: &Channel, b: &Channel) -> f64 {
        a.matrix().iter().zip(b.matrix()).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
    }

    #[test]
    fn basis_is_orthonormal_and_ordered() {
        for d in 1..5 {
            let b = hermitian_basis(d);
            for i in 0..b.len() {
                for j in 0..b.len() {
                    let g = b[i].inner(&b[j]);
                    let e = if i == j { 1.0 } else { 0.0 };
                    assert!((g - e).abs() < 1e-14, "d={d} i={i} j={j} g={g}");
                }
            }
        }
        // qubit order: I, σx, σy, σz (each over √2)
        let b = hermitian_basis(2);
        let s = 1.0 / SQRT2;
        assert!((b[2].entry(0, 1) - C64::new(0.0, -s)).norm() < 1e-15);
        assert!((b[3].entry(0, 0).re - s).abs() < 1e-15);
    }

    #[test]
    fn coords_round_trip() {
        let mut r = rng(1);
        for d in 1..6 {
            let h = random_hermitian(d, &mut r);
            let back = from_coords(d, &coords(&h)).unwrap();
            assert!((&back - &h).max_abs() < 1e-14);
        }
    }

    #[test]
    fn kraus_identity_and_choi() {
        let id = Channel::from_kraus(&[CMatrix::identity(2)]).unwrap();
        assert!(max_abs_diff(&id, &Channel::identity(2)) < 1e-15);
        let j = id.to_choi();
        let s = 0.5f64.sqrt();
        let z = C64::new(0.0, 0.0);
        let omega = HermitianMatrix::outer(&[C64::new(s, 0.0), z, z, C64::new(s, 0.0)]);
        assert!((&j - &omega.scale(2.0)).max_abs() < 1e-14);
        assert!(psd_check(&j, 1e-12));
    }

    #[test]
    fn choi_round_trip_and_kraus() {
        let mut r = rng(2);
        let ks = random_kraus(3, 2, 3, &mut r);
        let t = Channel::from_kraus(&ks).unwrap();
        assert!(t.is_completely_positive(1e-10));
        assert!(t.is_trace_preserving(1e-10));
        let back = Channel::from_choi(&t.to_choi(), 3, 2).unwrap();
        assert!(max_abs_diff(&t, &back) < 1e-10);
        let t2 = Channel::from_kraus(&t.to_kraus(1e-12)).unwrap();
        assert!(max_abs_diff(&t, &t2) < 1e-10);
        // direct action matches Σ K ρ K†
        let rho = random_density(3, &mut r);
        let mut direct = HermitianMatrix::zeros(2);
        for k in &ks {
            direct += &rho.congruence(k);
        }
        assert!((&t.apply(&rho).unwrap() - &direct).max_abs() < 1e-12);
    }

    #[test]
    fn adjoint_pairs() {
        let mut r = rng(3);
        let t = Channel::from_kraus(&random_kraus(2, 3, 2, &mut r)).unwrap();
        let a = t.adjoint();
        for _ in 0..10 {
            let e = random_hermitian(3, &mut r);
            let rho = random_hermitian(2, &mut r);
            let lhs = a.apply(&e).unwrap().inner(&rho);
            let rhs = e.inner(&t.apply(&rho).unwrap());
            assert!((lhs - rhs).abs() < 1e-10);
        }
        let id = Channel::identity(3);
        assert!(max_abs_diff(&id.adjoint(), &id) == 0.0);
        let img = a.apply(&HermitianMatrix::identity(3)).unwrap();
        assert!((&img - &HermitianMatrix::identity(2)).max_abs() < 1e-10);
    }

    #[test]
    fn composition_is_associative() {
        let mut r = rng(4);
        let t1 = Channel::from_kraus(&random_kraus(2, 3, 2, &mut r)).unwrap();
        let t2 = Channel::from_kraus(&random_kraus(3, 2, 2, &mut r)).unwrap();
        let t3 = Channel::from_kraus(&random_kraus(2, 2, 2, &mut r)).unwrap();
        let a = Channel::compose(&t3, &Channel::compose(&t2, &t1).unwrap()).unwrap();
        let b = Channel::compose(&Channel::compose(&t3, &t2).unwrap(), &t1).unwrap();
        assert!(max_abs_diff(&a, &b) < 1e-10);
    }

    #[test]
    fn predicates() {
        let sigma = HermitianMatrix::from_diagonal(&[0.7, 0.3]);
        let t = depolarizing(0.4, &sigma).unwrap();
        assert!(t.is_trace_preserving(1e-12));
        assert!(!t.is_unital(1e-12));
        assert!(depolarizing(1.0, &sigma).unwrap().is_unital(1e-12));
        let tr = Channel::transpose_map(2);
        assert!(tr.is_positive_sampled(200, 5));
        assert!(!tr.is_completely_positive(1e-9));
        assert!((tr.to_choi().min_eigenvalue() + 1.0).abs() < 1e-12);
        let neg = Channel::identity(2).scale(-1.0);
        assert!(!neg.is_positive_sampled(10, 5));
    }

    #[test]
    fn depolarizing_examples() {
        let half = HermitianMatrix::identity(2).scale(0.5);
        let id = depolarizing(1.0, &half).unwrap();
        assert!(max_abs_diff(&id, &Channel::identity(2)) < 1e-15);
        let c = depolarizing(0.0, &half).unwrap();
        let mut r = rng(6);
        let rho = random_density(2, &mut r);
        assert!((&c.apply(&rho).unwrap() - &half).max_abs() < 1e-15);
        let t = depolarizing(0.5, &half).unwrap();
        let out = t.apply(&HermitianMatrix::from_diagonal(&[1.0, 0.0])).unwrap();
        assert!((&out - &HermitianMatrix::from_diagonal(&[0.75, 0.25])).max_abs() < 1e-15);
        assert!(depolarizing(1.5, &half).is_err());
        assert!(depolarizing(0.5, &HermitianMatrix::identity(2)).is_err());
    }

    #[test]
    fn depolarizing_spectrum() {
        for d in 2..5 {
            let t = depolarizing(0.3, &HermitianMatrix::identity(d).scale(1.0 / d as f64)).unwrap();
            let s = t.spectrum().unwrap();
            assert!((s[0] - C64::new(1.0, 0.0)).norm() < 1e-12);
            for z in &s[1..] {
                assert!((z - C64::new(0.3, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn depolarizing_diameter_examples() {
        let half = HermitianMatrix::identity(2).scale(0.5);
        let d = diameter_depolarizing(0.5, &half, &ConeSpec::Psd).unwrap();
        assert!(d.exact);
        assert!((d.lower.value() - 2.0 * 3f64.ln()).abs() < 1e-14);
        let z = diameter_depolarizing(0.0, &half, &ConeSpec::Psd).unwrap();
        assert_eq!(z.lower, ExtendedReal::Finite(0.0));
        let third = HermitianMatrix::identity(3).scale(1.0 / 3.0);
        let d3 = diameter_depolarizing(0.5, &third, &ConeSpec::Psd).unwrap();
        assert!((d3.lower.value() - 2.0 * 4f64.ln()).abs() < 1e-14);
        assert!((birkhoff_coefficient(d3.lower) - 0.6).abs() < 1e-15);
        let one = diameter_depolarizing(1.0, &half, &ConeSpec::Psd).unwrap();
        assert_eq!(one.lower, ExtendedReal::Infinite);
        let skew = diameter_depolarizing(0.5, &HermitianMatrix::from_diagonal(&[0.2, 0.3, 0.5]), &ConeSpec::Psd).unwrap();
        assert!(!skew.exact);
        assert!(skew.lower.value() < skew.upper.unwrap().value());
    }

    #[test]
    fn birkhoff_values() {
        assert_eq!(birkhoff_coefficient(ExtendedReal::Finite(0.0)), 0.0);
        assert_eq!(birkhoff_coefficient(ExtendedReal::Infinite), 1.0);
        assert!((birkhoff_coefficient(ExtendedReal::Finite(2.0 * 3f64.ln())) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn sampled_diameters() {
        let half = HermitianMatrix::identity(2).scale(0.5);
        let t = depolarizing(0.5, &half).unwrap();
        let opts = SampleOptions {
            n_samples: 20,
            n_refine: 3,
            seed: 1,
            partitions: 1,
        };
        let est = diameter_sampled(&t, &ConeSpec::Psd, &opts).unwrap();
        assert!((est.lower.value() - 2.0 * 3f64.ln()).abs() < 1e-3);
        assert!(est.lower.value() <= 2.0 * 3f64.ln() + 1e-9);
        let c = Channel::constant(2, &half);
        assert_eq!(diameter_sampled(&c, &ConeSpec::Psd, &opts).unwrap().lower.value(), 0.0);
        let id = diameter_sampled(&Channel::identity(2), &ConeSpec::Psd, &opts).unwrap();
        assert!(id.inf_suspect);
    }

    #[test]
    fn partitioned_sampling_is_deterministic() {
        let sigma = HermitianMatrix::from_diagonal(&[0.6, 0.4]);
        let t = depolarizing(0.3, &sigma).unwrap();
        let opts = SampleOptions {
            n_samples: 24,
            n_refine: 1,
            seed: 9,
            partitions: 3,
        };
        let a = diameter_sampled(&t, &ConeSpec::Psd, &opts).unwrap();
        let b = diameter_sampled(&t, &ConeSpec::Psd, &opts).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn contraction_coefficient_of_depolarizing() {
        let sigma = HermitianMatrix::from_diagonal(&[0.2, 0.3, 0.5]);
        let t = depolarizing(0.4, &sigma).unwrap();
        let opts = SampleOptions {
            n_samples: 16,
            n_refine: 1,
            seed: 2,
            partitions: 1,
        };
        let eta = base_norm_contraction_coefficient(&t, &ConeSpec::Psd, &opts).unwrap();
        assert!((eta - 0.4).abs() < 1e-12);
        let c = Channel::constant(3, &sigma);
        assert!(base_norm_contraction_coefficient(&c, &ConeSpec::Psd, &opts).unwrap().abs() < 1e-12);
    }

    #[test]
    fn spectral_check_examples() {
        for (d, eq) in [(2usize, true), (3, false)] {
            let mixed = HermitianMatrix::identity(d).scale(1.0 / d as f64);
            let t = depolarizing(0.5, &mixed).unwrap();
            let delta = diameter_depolarizing(0.5, &mixed, &ConeSpec::Psd).unwrap();
            let rep = spectral_bound_check(&t, &ConeSpec::Psd, &delta).unwrap();
            assert!(rep.passed && rep.status == CheckStatus::Certified);
            assert_eq!(rep.slack.abs() < 1e-9, eq);
        }
        let half = HermitianMatrix::identity(2).scale(0.5);
        let c = Channel::constant(2, &half);
        let delta = DiameterEstimate::exact(ExtendedReal::Finite(0.0), DiameterMethod::DepolarizingClosedForm);
        let rep = spectral_bound_check(&c, &ConeSpec::Psd, &delta).unwrap();
        assert!(rep.passed && rep.lhs.abs() < 1e-12);
    }

    #[test]
    fn adjoint_diameter_examples() {
        let opts = SampleOptions {
            n_samples: 16,
            n_refine: 2,
            seed: 3,
            partitions: 1,
        };
        let third = HermitianMatrix::identity(3).scale(1.0 / 3.0);
        let t = depolarizing(0.5, &third).unwrap();
        let rep = adjoint_diameter_check(&t, &ConeSpec::Psd, &opts).unwrap();
        assert!(rep.passed);
        assert!((rep.lhs - 2.0 * 4f64.ln()).abs() < 1e-2);
        assert!(adjoint_diameter_check(&Channel::identity(2), &ConeSpec::Psd, &opts).unwrap().passed);
        let c = Channel::constant(2, &HermitianMatrix::identity(2).scale(0.5));
        let rep = adjoint_diameter_check(&c, &ConeSpec::Psd, &opts).unwrap();
        assert!(rep.passed && rep.lhs == 0.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn birkhoff_hopf_on_random_pairs(seed in any::<u64>(), p in 0.05f64..0.95) {
            let mut r = rng(seed);
            let sigma = random_density(3, &mut r);
            let t = depolarizing(p, &sigma).unwrap();
            let delta = diameter_depolarizing(p, &sigma, &ConeSpec::Psd).unwrap();
            let k = birkhoff_coefficient(delta.certifying_value());
            let a = random_density(3, &mut r);
            let b = random_density(3, &mut r);
            let h0 = hilbert_distance(&ConeSpec::Psd, &a, &b).unwrap().value();
            let h1 = hilbert_distance(&ConeSpec::Psd, &t.apply(&a).unwrap(), &t.apply(&b).unwrap()).unwrap().value();
            prop_assert!(h1 <= k * h0 + 1e-7);
        }

        #[test]
        fn depolarizing_trace_ratio_is_p(seed in any::<u64>(), p in 0.0f64..1.0) {
            let mut r = rng(seed);
            let sigma = random_density(2, &mut r);
            let t = depolarizing(p, &sigma).unwrap();
            let a = random_density(2, &mut r);
            let b = random_density(2, &mut r);
            let n0 = crate::linalg::trace_norm(&(&a - &b));
            let n1 = crate::linalg::trace_norm(&(&t.apply(&a).unwrap() - &t.apply(&b).unwrap()));
            prop_assert!((n1 - p * n0).abs() <= 1e-10);
        }
    }
}
