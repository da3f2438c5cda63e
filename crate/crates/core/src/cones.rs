//! Cones on Hermitian matrices, order ratios and Hilbert's projective metric.
//!
//! For a proper cone C, `sup(a/b) = inf{λ : λb − a ∈ C}` and
//! `h(a, b) = ln[sup(a/b) · sup(b/a)]`. PSD, PPT and their intersection have
//! spectral closed forms. The convex hull of PSD ∪ PPT is handled by a
//! feasibility solver in the product space (P, Q) with v = P + Q^T1.
//! Qubit deformed cones are linear images of the PSD cone.

use crate::linalg::{op_norm, partial_transpose, pseudo_inv_sqrt, psd_check, support_contained, HermitianMatrix, C64};
use crate::sdp::{conv_sup_ratio, AdmmSettings};
use crate::{Error, Result, Tolerances};
use std::fmt;

pub use crate::linalg::BipartiteShape;

/// Base of a deformed qubit cone, given as a radius function on Bloch
/// directions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Deformation {
    /// Ball of radius c.
    Sphere(f64),
    /// Axis-aligned ellipsoid with the given semi-axes.
    Ellipsoid([f64; 3]),
}

impl Deformation {
    pub fn validate(&self) -> Result<()> {
        let ok = |c: f64| c > 0.0 && c <= 1.0;
        let valid = match self {
            Deformation::Sphere(c) => ok(*c),
            Deformation::Ellipsoid(a) => a.iter().all(|c| ok(*c)),
        };
        if valid {
            Ok(())
        } else {
            Err(Error::InvalidArgument("deformation parameters must lie in (0, 1]".into()))
        }
    }

    /// Semi-axes (a sphere has three equal ones).
    pub fn axes(&self) -> [f64; 3] {
        match self {
            Deformation::Sphere(c) => [*c; 3],
            Deformation::Ellipsoid(a) => *a,
        }
    }

    /// Radius f(r̂) of the base along the direction of `r` (need not be unit).
    pub fn radius(&self, r: [f64; 3]) -> f64 {
        let n = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
        if n == 0.0 {
            return self.axes()[0];
        }
        let a = self.axes();
        let q: f64 = (0..3).map(|i| (r[i] / (n * a[i])).powi(2)).sum();
        1.0 / q.sqrt()
    }

    /// E⁻¹x: maps the deformed base onto the unit ball.
    pub fn normalize(&self, x: [f64; 3]) -> [f64; 3] {
        let a = self.axes();
        [x[0] / a[0], x[1] / a[1], x[2] / a[2]]
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ConeSpec {
    Psd,
    /// {H : H^T1 ≥ 0}.
    Ppt(BipartiteShape),
    /// PSD ∩ PPT, the cone generated by PPT states.
    PptCapPsd(BipartiteShape),
    /// conv(PSD ∪ PPT), the dual of `PptCapPsd`.
    ConvPsdPpt(BipartiteShape),
    QubitDeformed(Deformation),
}

impl ConeSpec {
    pub fn shape(&self) -> Option<BipartiteShape> {
        match self {
            ConeSpec::Ppt(s) | ConeSpec::PptCapPsd(s) | ConeSpec::ConvPsdPpt(s) => Some(*s),
            _ => None,
        }
    }

    /// The dual cone under the trace inner product.
    pub fn dual(&self) -> ConeSpec {
        match self {
            ConeSpec::PptCapPsd(s) => ConeSpec::ConvPsdPpt(*s),
            ConeSpec::ConvPsdPpt(s) => ConeSpec::PptCapPsd(*s),
            other => *other,
        }
    }

    pub fn check_dim(&self, dim: usize) -> Result<()> {
        match self {
            ConeSpec::Psd => Ok(()),
            ConeSpec::Ppt(s) | ConeSpec::PptCapPsd(s) | ConeSpec::ConvPsdPpt(s) => s.check(dim),
            ConeSpec::QubitDeformed(d) => {
                d.validate()?;
                if dim == 2 {
                    Ok(())
                } else {
                    Err(Error::Dimension("deformed cones are defined on qubits only".into()))
                }
            }
        }
    }

    pub fn name(&self) -> String {
        match self {
            ConeSpec::Psd => "PSD".into(),
            ConeSpec::Ppt(s) => format!("PPT({}x{})", s.d1, s.d2),
            ConeSpec::PptCapPsd(s) => format!("PPT_CAP_PSD({}x{})", s.d1, s.d2),
            ConeSpec::ConvPsdPpt(s) => format!("CONV_PSD_PPT({}x{})", s.d1, s.d2),
            ConeSpec::QubitDeformed(Deformation::Sphere(c)) => format!("SPHERE({c})"),
            ConeSpec::QubitDeformed(Deformation::Ellipsoid(a)) => {
                format!("ELLIPSOID({}, {}, {})", a[0], a[1], a[2])
            }
        }
    }
}

/// Nonnegative real or +∞.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtendedReal {
    Finite(f64),
    Infinite,
}

impl ExtendedReal {
    /// Maps +∞ to `Infinite`; clamps tiny negative rounding to zero.
    pub fn from_f64(x: f64) -> Self {
        if x == f64::INFINITY {
            ExtendedReal::Infinite
        } else {
            ExtendedReal::Finite(x.max(0.0))
        }
    }

    pub fn value(&self) -> f64 {
        match self {
            ExtendedReal::Finite(x) => *x,
            ExtendedReal::Infinite => f64::INFINITY,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtendedReal::Finite(_))
    }

    pub fn finite(&self) -> Option<f64> {
        match self {
            ExtendedReal::Finite(x) => Some(*x),
            ExtendedReal::Infinite => None,
        }
    }

    /// 1/x with 1/∞ = 0 and 1/0 = ∞.
    pub fn recip(&self) -> ExtendedReal {
        match self {
            ExtendedReal::Infinite => ExtendedReal::Finite(0.0),
            ExtendedReal::Finite(x) if *x == 0.0 => ExtendedReal::Infinite,
            ExtendedReal::Finite(x) => ExtendedReal::Finite(1.0 / x),
        }
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedReal::Finite(x) => write!(f, "{x}"),
            ExtendedReal::Infinite => write!(f, "inf"),
        }
    }
}

/// Bloch coordinates of a qubit operator written as (t·I + x·σ)/2.
pub fn qubit_coordinates(h: &HermitianMatrix) -> (f64, [f64; 3]) {
    let a = h.entry(0, 0).re;
    let d = h.entry(1, 1).re;
    let o = h.entry(0, 1);
    (a + d, [2.0 * o.re, -2.0 * o.im, a - d])
}

pub fn qubit_from_coordinates(t: f64, x: [f64; 3]) -> HermitianMatrix {
    HermitianMatrix::from_fn(2, |i, j| match (i, j) {
        (0, 0) => C64::new((t + x[2]) / 2.0, 0.0),
        (1, 1) => C64::new((t - x[2]) / 2.0, 0.0),
        (0, 1) => C64::new(x[0] / 2.0, -x[1] / 2.0),
        _ => C64::new(x[0] / 2.0, x[1] / 2.0),
    })
}

/// The linear map (t, x) ↦ (t, E⁻¹x) sending a deformed cone onto PSD.
fn undeform(d: &Deformation, h: &HermitianMatrix) -> HermitianMatrix {
    let (t, x) = qubit_coordinates(h);
    qubit_from_coordinates(t, d.normalize(x))
}

pub fn member(cone: &ConeSpec, h: &HermitianMatrix, tol: f64) -> Result<bool> {
    cone.check_dim(h.dim())?;
    match cone {
        ConeSpec::Psd => Ok(psd_check(h, tol)),
        ConeSpec::Ppt(s) => Ok(psd_check(&partial_transpose(h, *s)?, tol)),
        ConeSpec::PptCapPsd(s) => Ok(psd_check(h, tol) && psd_check(&partial_transpose(h, *s)?, tol)),
        ConeSpec::ConvPsdPpt(s) => match feasibility_decompose(h, *s, tol)? {
            Decomposition::Feasible { .. } => Ok(true),
            Decomposition::Infeasible { .. } => Ok(false),
            Decomposition::Indeterminate { iterations, residual } => {
                Err(Error::Indeterminate { iterations, residual })
            }
        },
        ConeSpec::QubitDeformed(d) => {
            let (t, x) = qubit_coordinates(h);
            let y = d.normalize(x);
            let r = (y[0] * y[0] + y[1] * y[1] + y[2] * y[2]).sqrt();
            let scale = 1.0 + t.abs() + r;
            Ok(t >= -tol * scale && r <= t + tol * scale)
        }
    }
}

/// Outcome of the conv(PSD ∪ PPT) feasibility problem.
#[derive(Clone, Debug)]
pub enum Decomposition {
    /// v = P + Q^T1 with P, Q psd.
    Feasible {
        p: HermitianMatrix,
        q: HermitianMatrix,
        residual: f64,
        iterations: usize,
    },
    /// W ≥ 0, W^T1 ≥ 0, tr W = 1 and ⟨W, v⟩ < 0.
    Infeasible { witness: HermitianMatrix, value: f64 },
    Indeterminate { iterations: usize, residual: f64 },
}

const DYKSTRA_CAP: usize = 20_000;
const WITNESS_EVERY: usize = 25;

/// Check a candidate separating functional, shifting it by εI into both
/// dual cones first. Returns the normalized witness and ⟨W, v⟩.
fn certify_witness(r: &HermitianMatrix, v: &HermitianMatrix, shape: BipartiteShape) -> Option<(HermitianMatrix, f64)> {
    if r.is_zero() {
        return None;
    }
    let rt = partial_transpose(r, shape).ok()?;
    let eps = (-r.min_eigenvalue()).max(-rt.min_eigenvalue()).max(0.0);
    // a hair above the exact shift so both cones are entered strictly
    let eps = if eps > 0.0 { eps * (1.0 + 1e-12) + 1e-300 } else { 0.0 };
    let w = r + &HermitianMatrix::identity(r.dim()).scale(eps);
    let tr = w.trace();
    if tr <= 0.0 {
        return None;
    }
    let w = w.scale(1.0 / tr);
    let value = w.inner(v);
    if value < 0.0 {
        Some((w, value))
    } else {
        None
    }
}

/// Projected subgradient on the unit-trace slice of PSD ∩ PPT, minimizing
/// ⟨W, v⟩. Used only when the Dykstra residual gives no usable witness.
fn witness_search(v: &HermitianMatrix, shape: BipartiteShape, start: &HermitianMatrix) -> Option<(HermitianMatrix, f64)> {
    let n = v.dim();
    let mut w = if start.is_zero() {
        HermitianMatrix::identity(n).scale(1.0 / n as f64)
    } else {
        start.clone()
    };
    let vn = v.frobenius_norm().max(1e-300);
    for k in 0..400 {
        let step = 1.0 / ((k + 1) as f64).sqrt();
        w = &w - &v.scale(step / vn);
        for _ in 0..20 {
            w = w.psd_projection();
            let wt = partial_transpose(&w, shape).ok()?.psd_projection();
            w = partial_transpose(&wt, shape).ok()?;
        }
        let tr = w.trace();
        if tr <= 1e-300 {
            return None;
        }
        w = w.scale(1.0 / tr);
        if let Some(found) = certify_witness(&w, v, shape) {
            return Some(found);
        }
    }
    None
}

/// Decide v ∈ conv(PSD ∪ PPT) by Dykstra's alternating projections between
/// {(P, Q) : P + Q^T1 = v} and psd × psd. Since AA* = 2I for
/// A(P, Q) = P + Q^T1 the affine projection is explicit, and only the cone
/// step needs a Dykstra increment.
pub fn feasibility_decompose(v: &HermitianMatrix, shape: BipartiteShape, tol: f64) -> Result<Decomposition> {
    shape.check(v.dim())?;
    let n = v.dim();
    if psd_check(v, tol) {
        return Ok(Decomposition::Feasible {
            p: v.psd_projection(),
            q: HermitianMatrix::zeros(n),
            residual: 0.0,
            iterations: 0,
        });
    }
    let vt = partial_transpose(v, shape)?;
    if psd_check(&vt, tol) {
        return Ok(Decomposition::Feasible {
            p: HermitianMatrix::zeros(n),
            q: vt.psd_projection(),
            residual: 0.0,
            iterations: 0,
        });
    }
    let vnorm = op_norm(v);
    let target = tol * (1.0 + vnorm);
    let pt = |h: &HermitianMatrix| partial_transpose(h, shape).expect("shape checked");
    let residual_of = |p: &HermitianMatrix, q: &HermitianMatrix| &(p + &pt(q)) - v;

    let mut xp = v.scale(0.5);
    let mut xq = vt.scale(0.5);
    let mut ip = HermitianMatrix::zeros(n);
    let mut iq = HermitianMatrix::zeros(n);
    let mut last_r = HermitianMatrix::zeros(n);
    let mut last_res = f64::INFINITY;
    for it in 1..=DYKSTRA_CAP {
        let sp = &xp + &ip;
        let sq = &xq + &iq;
        let yp = sp.psd_projection();
        let yq = sq.psd_projection();
        ip = &sp - &yp;
        iq = &sq - &yq;
        let r = residual_of(&yp, &yq);
        let res = op_norm(&r);
        if res <= target {
            return Ok(Decomposition::Feasible {
                p: yp,
                q: yq,
                residual: res,
                iterations: it,
            });
        }
        if it % WITNESS_EVERY == 0 {
            if let Some((witness, value)) = certify_witness(&r, v, shape) {
                return Ok(Decomposition::Infeasible { witness, value });
            }
        }
        xp = &yp - &r.scale(0.5);
        xq = &yq - &pt(&r).scale(0.5);
        last_res = res;
        last_r = r;
    }
    if let Some((witness, value)) = witness_search(v, shape, &last_r) {
        return Ok(Decomposition::Infeasible { witness, value });
    }
    Ok(Decomposition::Indeterminate {
        iterations: DYKSTRA_CAP,
        residual: last_res,
    })
}

fn psd_sup(a: &HermitianMatrix, b: &HermitianMatrix, rank_tol: f64) -> ExtendedReal {
    if !support_contained(a, b, rank_tol) {
        return ExtendedReal::Infinite;
    }
    let s = pseudo_inv_sqrt(b, rank_tol);
    ExtendedReal::from_f64(a.congruence(s.matrix()).max_eigenvalue())
}

fn zero_convention(a: &HermitianMatrix, b: &HermitianMatrix) -> Option<ExtendedReal> {
    if a.is_zero() {
        Some(ExtendedReal::Finite(0.0))
    } else if b.is_zero() {
        Some(ExtendedReal::Infinite)
    } else {
        None
    }
}

fn require_members(cone: &ConeSpec, a: &HermitianMatrix, b: &HermitianMatrix, tol: &Tolerances) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::Dimension("arguments differ in dimension".into()));
    }
    for (name, h) in [("a", a), ("b", b)] {
        if !member(cone, h, tol.member_tol)? {
            return Err(Error::OutsideCone(format!("{name} is not in {}", cone.name())));
        }
    }
    Ok(())
}

/// sup(a/b) = inf{λ : λb − a ∈ C}.
pub fn sup_ratio(cone: &ConeSpec, a: &HermitianMatrix, b: &HermitianMatrix) -> Result<ExtendedReal> {
    sup_ratio_with(cone, a, b, &Tolerances::default())
}

pub fn sup_ratio_with(cone: &ConeSpec, a: &HermitianMatrix, b: &HermitianMatrix, tol: &Tolerances) -> Result<ExtendedReal> {
    require_members(cone, a, b, tol)?;
    sup_ratio_unchecked(cone, a, b, tol)
}

/// As `sup_ratio_with` without the membership precondition check.
pub fn sup_ratio_unchecked(cone: &ConeSpec, a: &HermitianMatrix, b: &HermitianMatrix, tol: &Tolerances) -> Result<ExtendedReal> {
    if let Some(z) = zero_convention(a, b) {
        return Ok(z);
    }
    match cone {
        ConeSpec::Psd => Ok(psd_sup(a, b, tol.rank_tol)),
        ConeSpec::Ppt(s) => Ok(psd_sup(&partial_transpose(a, *s)?, &partial_transpose(b, *s)?, tol.rank_tol)),
        ConeSpec::PptCapPsd(s) => {
            let x = psd_sup(a, b, tol.rank_tol);
            let y = psd_sup(&partial_transpose(a, *s)?, &partial_transpose(b, *s)?, tol.rank_tol);
            Ok(ExtendedReal::from_f64(x.value().max(y.value())))
        }
        ConeSpec::QubitDeformed(d) => {
            d.validate()?;
            Ok(psd_sup(&undeform(d, a), &undeform(d, b), tol.rank_tol))
        }
        ConeSpec::ConvPsdPpt(s) => conv_sup(a, b, *s, tol),
    }
}

/// Hull-cone ratio from the certified conic program. The reported value is
/// the primal (achievable) end of the bracket when it is finite.
fn conv_sup(a: &HermitianMatrix, b: &HermitianMatrix, shape: BipartiteShape, tol: &Tolerances) -> Result<ExtendedReal> {
    let parts = match feasibility_decompose(b, shape, tol.member_tol)? {
        Decomposition::Feasible { p, q, .. } => Some((p, q)),
        _ => None,
    };
    let settings = AdmmSettings {
        tol: tol.solver_tol * 1e-2,
        ..AdmmSettings::default()
    };
    let br = conv_sup_ratio(a, b, parts.as_ref().map(|(p, q)| (p, q)), shape, &settings)?;
    let value = if br.upper.is_finite() { br.upper } else { br.lower };
    let width = if br.upper.is_finite() { br.upper - br.lower } else { 0.0 };
    if !br.converged && width > tol.bisection_tol * (1.0 + value) {
        return Err(Error::Indeterminate {
            iterations: br.iterations,
            residual: width,
        });
    }
    Ok(ExtendedReal::from_f64(value))
}

/// Result of the bisection oracle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleRatio {
    pub value: ExtendedReal,
    pub iterations: usize,
    /// The doubling search hit its cap; ∞ is then a numerical verdict, not a
    /// proof.
    pub cap_reached: bool,
}

const ORACLE_MAX_BISECTIONS: usize = 200;
const ORACLE_CAP_EXPONENT: i32 = 60;

fn oracle_member_tol(cone: &ConeSpec) -> f64 {
    match cone {
        ConeSpec::ConvPsdPpt(_) => 1e-9,
        _ => 1e-13,
    }
}

/// Membership with an absolute band, for operands normalized by the caller.
fn member_abs(cone: &ConeSpec, h: &HermitianMatrix, tol: f64) -> Result<bool> {
    let min_eig = |m: &HermitianMatrix| m.min_eigenvalue() >= -tol;
    match cone {
        ConeSpec::Psd => Ok(min_eig(h)),
        ConeSpec::Ppt(s) => Ok(min_eig(&partial_transpose(h, *s)?)),
        ConeSpec::PptCapPsd(s) => Ok(min_eig(h) && min_eig(&partial_transpose(h, *s)?)),
        ConeSpec::QubitDeformed(d) => {
            let (t, x) = qubit_coordinates(h);
            let y = d.normalize(x);
            let r = (y[0] * y[0] + y[1] * y[1] + y[2] * y[2]).sqrt();
            Ok(t >= -tol && r <= t + tol)
        }
        ConeSpec::ConvPsdPpt(_) => member(cone, h, tol),
    }
}

/// Bisection on λ over membership of λb − a, independent of every closed
/// form. Inputs are rescaled to unit operator norm first so the membership
/// band is scale-free.
pub fn sup_ratio_oracle(cone: &ConeSpec, a: &HermitianMatrix, b: &HermitianMatrix, tol: f64) -> Result<OracleRatio> {
    cone.check_dim(a.dim())?;
    cone.check_dim(b.dim())?;
    if let Some(z) = zero_convention(a, b) {
        return Ok(OracleRatio {
            value: z,
            iterations: 0,
            cap_reached: false,
        });
    }
    let (na, nb) = (a.max_abs(), b.max_abs());
    let (a1, b1) = (a.scale(1.0 / na), b.scale(1.0 / nb));
    let mtol = oracle_member_tol(cone);
    let inside = |lambda: f64| member_abs(cone, &(&b1.scale(lambda) - &a1), mtol);
    let mut iterations = 0;
    let mut hi = 1.0;
    let mut lo = 0.0;
    while !inside(hi)? {
        iterations += 1;
        lo = hi;
        hi *= 2.0;
        if hi > 2f64.powi(ORACLE_CAP_EXPONENT) {
            return Ok(OracleRatio {
                value: ExtendedReal::Infinite,
                iterations,
                cap_reached: true,
            });
        }
    }
    for _ in 0..ORACLE_MAX_BISECTIONS {
        if hi - lo <= tol * hi {
            break;
        }
        iterations += 1;
        let mid = 0.5 * (lo + hi);
        if inside(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(OracleRatio {
        value: ExtendedReal::from_f64(0.5 * (lo + hi) * na / nb),
        iterations,
        cap_reached: false,
    })
}

/// inf(a/b) = 1 / sup(b/a).
pub fn inf_ratio(cone: &ConeSpec, a: &HermitianMatrix, b: &HermitianMatrix) -> Result<ExtendedReal> {
    Ok(sup_ratio(cone, b, a)?.recip())
}

pub fn hilbert_distance(cone: &ConeSpec, a: &HermitianMatrix, b: &HermitianMatrix) -> Result<ExtendedReal> {
    hilbert_distance_with(cone, a, b, &Tolerances::default())
}

pub fn hilbert_distance_with(cone: &ConeSpec, a: &HermitianMatrix, b: &HermitianMatrix, tol: &Tolerances) -> Result<ExtendedReal> {
    require_members(cone, a, b, tol)?;
    hilbert_distance_unchecked(cone, a, b, tol)
}

/// h(0,0) = 0, h(0,a) = h(a,0) = ∞.
pub fn hilbert_distance_unchecked(cone: &ConeSpec, a: &HermitianMatrix, b: &HermitianMatrix, tol: &Tolerances) -> Result<ExtendedReal> {
    match (a.is_zero(), b.is_zero()) {
        (true, true) => return Ok(ExtendedReal::Finite(0.0)),
        (true, false) | (false, true) => return Ok(ExtendedReal::Infinite),
        _ => {}
    }
    let m1 = sup_ratio_unchecked(cone, a, b, tol)?;
    let m2 = sup_ratio_unchecked(cone, b, a, tol)?;
    match (m1, m2) {
        (ExtendedReal::Finite(x), ExtendedReal::Finite(y)) if x > 0.0 && y > 0.0 => {
            Ok(ExtendedReal::from_f64(x.ln() + y.ln()))
        }
        _ => Ok(ExtendedReal::Infinite),
    }
}

/// sup(a/b) − inf(a/b).
pub fn oscillation(cone: &ConeSpec, a: &HermitianMatrix, b: &HermitianMatrix) -> Result<ExtendedReal> {
    if b.is_zero() {
        return Err(Error::InvalidArgument("oscillation needs a nonzero reference".into()));
    }
    let s = sup_ratio(cone, a, b)?;
    let i = inf_ratio(cone, a, b)?;
    Ok(match s {
        ExtendedReal::Infinite => ExtendedReal::Infinite,
        ExtendedReal::Finite(x) => ExtendedReal::from_f64(x - i.value()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_density, random_psd, rng};
    use proptest::prelude::*;

    fn omega(d: usize) -> HermitianMatrix {
        let s = 1.0 / (d as f64).sqrt();
        let v: Vec<C64> = (0..d * d)
            .map(|k| if k / d == k % d { C64::new(s, 0.0) } else { C64::new(0.0, 0.0) })
            .collect();
        HermitianMatrix::outer(&v)
    }

    fn shape22() -> BipartiteShape {
        BipartiteShape::new(2, 2).unwrap()
    }

    #[test]
    fn membership_examples() {
        let s = shape22();
        assert!(!member(&ConeSpec::Ppt(s), &omega(2), 1e-9).unwrap());
        let mixed = HermitianMatrix::identity(4).scale(0.25);
        assert!(member(&ConeSpec::PptCapPsd(s), &mixed, 1e-9).unwrap());
        assert!(member(&ConeSpec::ConvPsdPpt(s), &omega(2), 1e-9).unwrap());
        assert!(member(&ConeSpec::Psd, &HermitianMatrix::identity(3), 1e-9).is_ok());
        assert!(member(&ConeSpec::Ppt(s), &HermitianMatrix::identity(3), 1e-9).is_err());
    }

    #[test]
    fn decomposition_quick_paths() {
        let s = shape22();
        let mut r = rng(4);
        let rho = random_density(4, &mut r);
        match feasibility_decompose(&rho, s, 1e-9).unwrap() {
            Decomposition::Feasible { p, q, .. } => {
                assert!((&p - &rho).max_abs() < 1e-12);
                assert!(q.is_zero());
            }
            other => panic!("{other:?}"),
        }
        // a non-psd matrix whose partial transpose is psd
        let q0 = HermitianMatrix::outer(&[
            C64::new(0.0, 0.0),
            C64::new(1.0, 0.0),
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
        ]);
        let v = partial_transpose(&q0, s).unwrap();
        assert!(!psd_check(&v, 1e-9));
        match feasibility_decompose(&v, s, 1e-9).unwrap() {
            Decomposition::Feasible { p, q, .. } => {
                assert!(p.is_zero());
                assert!((&q - &q0).max_abs() < 1e-12);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn negative_identity_has_trace_witness() {
        let v = HermitianMatrix::identity(4).scale(-1.0);
        match feasibility_decompose(&v, shape22(), 1e-9).unwrap() {
            Decomposition::Infeasible { witness, value } => {
                assert!((&witness - &HermitianMatrix::identity(4).scale(0.25)).max_abs() < 1e-9);
                assert!(value < 0.0);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn decomposition_of_mixed_sum() {
        let s = shape22();
        let mut r = rng(21);
        let p0 = omega(2);
        let q0 = random_density(4, &mut r).scale(0.5);
        // Ω + (Q0)^T1 lies in the hull; neither summand alone need match
        let v = &p0 + &partial_transpose(&omega(2), s).unwrap();
        let v = &v + &partial_transpose(&q0, s).unwrap();
        match feasibility_decompose(&v, s, 1e-9).unwrap() {
            Decomposition::Feasible { p, q, residual, .. } => {
                assert!(psd_check(&p, 1e-9) && psd_check(&q, 1e-9));
                let back = &p + &partial_transpose(&q, s).unwrap();
                assert!(op_norm(&(&back - &v)) <= 1e-9 * (1.0 + op_norm(&v)));
                assert!(residual <= 1e-9 * (1.0 + op_norm(&v)));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn infeasible_entangled_direction() {
        // −Ω + tiny identity is negative on the PPT∩PSD state I/4? ⟨I/4, v⟩ < 0.
        let s = shape22();
        let v = &omega(2).scale(-1.0) + &HermitianMatrix::identity(4).scale(0.1);
        match feasibility_decompose(&v, s, 1e-9).unwrap() {
            Decomposition::Infeasible { witness, value } => {
                assert!(value < 0.0);
                assert!(psd_check(&witness, 0.0));
                assert!(psd_check(&partial_transpose(&witness, s).unwrap(), 0.0));
                assert!((witness.trace() - 1.0).abs() < 1e-12);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn sup_ratio_examples() {
        let a = HermitianMatrix::from_diagonal(&[2.0, 1.0]);
        let i2 = HermitianMatrix::identity(2);
        assert_eq!(sup_ratio(&ConeSpec::Psd, &a, &i2).unwrap(), ExtendedReal::Finite(2.0));
        let e0 = HermitianMatrix::from_diagonal(&[1.0, 0.0]);
        let e1 = HermitianMatrix::from_diagonal(&[0.0, 1.0]);
        assert_eq!(sup_ratio(&ConeSpec::Psd, &e0, &e1).unwrap(), ExtendedReal::Infinite);
        assert_eq!(inf_ratio(&ConeSpec::Psd, &a, &i2).unwrap(), ExtendedReal::Finite(1.0));
        assert_eq!(inf_ratio(&ConeSpec::Psd, &e0, &i2).unwrap(), ExtendedReal::Finite(0.0));
        assert!(sup_ratio(&ConeSpec::Psd, &HermitianMatrix::from_diagonal(&[1.0, -1.0]), &i2).is_err());
    }

    #[test]
    fn zero_conventions() {
        let z = HermitianMatrix::zeros(2);
        let i2 = HermitianMatrix::identity(2);
        assert_eq!(sup_ratio(&ConeSpec::Psd, &z, &i2).unwrap(), ExtendedReal::Finite(0.0));
        assert_eq!(sup_ratio(&ConeSpec::Psd, &i2, &z).unwrap(), ExtendedReal::Infinite);
        assert_eq!(hilbert_distance(&ConeSpec::Psd, &z, &z).unwrap(), ExtendedReal::Finite(0.0));
        assert_eq!(hilbert_distance(&ConeSpec::Psd, &z, &i2).unwrap(), ExtendedReal::Infinite);
        assert_eq!(hilbert_distance(&ConeSpec::Psd, &i2, &z).unwrap(), ExtendedReal::Infinite);
    }

    #[test]
    fn hilbert_examples() {
        let a = HermitianMatrix::from_diagonal(&[2.0 / 3.0, 1.0 / 3.0]);
        let b = HermitianMatrix::identity(2).scale(0.5);
        let h = hilbert_distance(&ConeSpec::Psd, &a, &b).unwrap().value();
        assert!((h - 2f64.ln()).abs() < 1e-14);
        assert!(hilbert_distance(&ConeSpec::Psd, &a, &a).unwrap().value() < 1e-14);
        let e0 = HermitianMatrix::from_diagonal(&[1.0, 0.0]);
        let e1 = HermitianMatrix::from_diagonal(&[0.0, 1.0]);
        assert_eq!(hilbert_distance(&ConeSpec::Psd, &e0, &e1).unwrap(), ExtendedReal::Infinite);
        // pure state against itself: finite (same face)
        assert!(hilbert_distance(&ConeSpec::Psd, &e0, &e0.scale(3.0)).unwrap().value() < 1e-14);
    }

    #[test]
    fn oscillation_examples() {
        let a = HermitianMatrix::from_diagonal(&[2.0, 1.0]);
        let i2 = HermitianMatrix::identity(2);
        assert_eq!(oscillation(&ConeSpec::Psd, &a, &a).unwrap(), ExtendedReal::Finite(0.0));
        assert_eq!(oscillation(&ConeSpec::Psd, &a, &i2).unwrap(), ExtendedReal::Finite(1.0));
        let shifted = &a + &i2.scale(3.0);
        let o1 = oscillation(&ConeSpec::Psd, &shifted, &i2).unwrap().value();
        assert!((o1 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn werner_sup_ratio() {
        // Werner states on C^3 ⊗ C^3: p·P_sym/d_sym + (1−p)·P_anti/d_anti
        let d = 3;
        let n = d * d;
        let swap = HermitianMatrix::from_fn(n, |r, c| {
            let (i, k) = (r / d, r % d);
            let (j, l) = (c / d, c % d);
            if i == l && k == j {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let id = HermitianMatrix::identity(n);
        let sym = (&id + &swap).scale(0.5);
        let anti = (&id - &swap).scale(0.5);
        let werner = |p: f64| &sym.scale(p / 6.0) + &anti.scale((1.0 - p) / 3.0);
        let m = sup_ratio(&ConeSpec::Psd, &werner(0.9), &werner(0.4)).unwrap().value();
        assert!((m - 2.25).abs() < 1e-12);
    }

    #[test]
    fn oracle_matches_closed_forms() {
        let mut r = rng(12);
        let tol = Tolerances::default();
        let s = shape22();
        for cone in [ConeSpec::Psd, ConeSpec::Ppt(s), ConeSpec::PptCapPsd(s)] {
            for _ in 0..5 {
                // PPT∩PSD members: identity-heavy mixtures
                let a = &random_density(4, &mut r) + &HermitianMatrix::identity(4).scale(0.3);
                let b = &random_density(4, &mut r) + &HermitianMatrix::identity(4).scale(0.3);
                let cf = sup_ratio_with(&cone, &a, &b, &tol).unwrap().value();
                let or = sup_ratio_oracle(&cone, &a, &b, 1e-9).unwrap().value.value();
                assert!((cf - or).abs() <= 1e-6 * cf, "{cone:?}: {cf} vs {or}");
            }
        }
        let i2 = HermitianMatrix::identity(2);
        let o = sup_ratio_oracle(&ConeSpec::Psd, &i2, &i2, 1e-9).unwrap();
        assert!((o.value.value() - 1.0).abs() < 1e-8);
        let b = random_density(3, &mut r);
        let o = sup_ratio_oracle(&ConeSpec::Psd, &b.scale(2.0), &b, 1e-9).unwrap();
        assert!((o.value.value() - 2.0).abs() < 1e-8);
    }

    #[test]
    fn oracle_cap_flag() {
        let e0 = HermitianMatrix::from_diagonal(&[1.0, 0.0]);
        let e1 = HermitianMatrix::from_diagonal(&[0.0, 1.0]);
        let o = sup_ratio_oracle(&ConeSpec::Psd, &e0, &e1, 1e-6).unwrap();
        assert_eq!(o.value, ExtendedReal::Infinite);
        assert!(o.cap_reached);
    }

    #[test]
    fn conv_cone_ratio_via_oracle() {
        let s = shape22();
        let i4 = HermitianMatrix::identity(4);
        let cone = ConeSpec::ConvPsdPpt(s);
        let m = sup_ratio(&cone, &i4.scale(2.0), &i4).unwrap().value();
        assert!((m - 2.0).abs() < 1e-5);
        // for PSD inputs the hull ratio never exceeds the PSD ratio
        let mut r = rng(30);
        let a = random_density(4, &mut r);
        let b = random_density(4, &mut r);
        let conv = sup_ratio(&cone, &a, &b).unwrap().value();
        let psd = sup_ratio(&ConeSpec::Psd, &a, &b).unwrap().value();
        assert!(conv <= psd * (1.0 + 1e-5));
    }

    #[test]
    fn deformed_cone_closed_form_vs_oracle() {
        let mut r = rng(40);
        for d in [Deformation::Sphere(0.5), Deformation::Ellipsoid([1.0, 0.95, 0.45])] {
            let cone = ConeSpec::QubitDeformed(d);
            for _ in 0..10 {
                let a = &random_density(2, &mut r).scale(0.2) + &HermitianMatrix::identity(2).scale(0.4);
                let b = &random_density(2, &mut r).scale(0.2) + &HermitianMatrix::identity(2).scale(0.4);
                let cf = sup_ratio(&cone, &a, &b).unwrap().value();
                let or = sup_ratio_oracle(&cone, &a, &b, 1e-10).unwrap().value.value();
                assert!((cf - or).abs() <= 1e-6 * cf, "{cf} vs {or}");
            }
        }
    }

    #[test]
    fn deformed_membership() {
        let cone = ConeSpec::QubitDeformed(Deformation::Sphere(0.5));
        assert!(member(&cone, &qubit_from_coordinates(1.0, [0.5, 0.0, 0.0]), 1e-12).unwrap());
        assert!(!member(&cone, &qubit_from_coordinates(1.0, [0.51, 0.0, 0.0]), 1e-12).unwrap());
        let h = qubit_from_coordinates(0.7, [0.1, -0.2, 0.3]);
        let (t, x) = qubit_coordinates(&h);
        assert!((t - 0.7).abs() < 1e-15);
        assert!((x[1] + 0.2).abs() < 1e-15);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn projective_invariance(seed in any::<u64>(), alpha in 0.01f64..10.0, beta in 0.01f64..10.0) {
            let mut r = rng(seed);
            let a = random_psd(3, &mut r);
            let b = random_psd(3, &mut r);
            let h = hilbert_distance(&ConeSpec::Psd, &a, &b).unwrap().value();
            let h2 = hilbert_distance(&ConeSpec::Psd, &a.scale(alpha), &b.scale(beta)).unwrap().value();
            prop_assert!((h - h2).abs() <= 1e-9 * (1.0 + h));
        }

        #[test]
        fn triangle_inequality(seed in any::<u64>(), n in 2usize..5) {
            let mut r = rng(seed);
            let a = random_psd(n, &mut r);
            let b = random_psd(n, &mut r);
            let c = random_psd(n, &mut r);
            let h = |x: &HermitianMatrix, y: &HermitianMatrix| hilbert_distance(&ConeSpec::Psd, x, y).unwrap().value();
            prop_assert!(h(&a, &c) <= h(&a, &b) + h(&b, &c) + 1e-8);
        }

        #[test]
        fn additive_on_lines(seed in any::<u64>(), lambda in 0.01f64..0.99) {
            let mut r = rng(seed);
            let a = random_density(3, &mut r);
            let c = random_density(3, &mut r);
            let b = &a.scale(lambda) + &c.scale(1.0 - lambda);
            let h = |x: &HermitianMatrix, y: &HermitianMatrix| hilbert_distance(&ConeSpec::Psd, x, y).unwrap().value();
            prop_assert!((h(&a, &c) - h(&a, &b) - h(&b, &c)).abs() <= 1e-8 * (1.0 + h(&a, &c)));
        }

        #[test]
        fn tensor_additivity(seed in any::<u64>()) {
            let mut r = rng(seed);
            let (a1, b1) = (random_psd(2, &mut r), random_psd(2, &mut r));
            let (a2, b2) = (random_psd(3, &mut r), random_psd(3, &mut r));
            let h = |x: &HermitianMatrix, y: &HermitianMatrix| hilbert_distance(&ConeSpec::Psd, x, y).unwrap().value();
            let lhs = h(&a1.kron(&a2), &b1.kron(&b2));
            prop_assert!((lhs - h(&a1, &b1) - h(&a2, &b2)).abs() <= 1e-8);
        }

        #[test]
        fn oscillation_shift_invariance(seed in any::<u64>(), beta in 0.0f64..5.0) {
            let mut r = rng(seed);
            let a = random_psd(3, &mut r);
            let b = random_psd(3, &mut r);
            let o1 = oscillation(&ConeSpec::Psd, &a, &b).unwrap().value();
            let o2 = oscillation(&ConeSpec::Psd, &(&a + &b.scale(beta)), &b).unwrap().value();
            prop_assert!((o1 - o2).abs() <= 1e-8 * (1.0 + o1));
        }

        #[test]
        fn intersection_is_max_of_components(seed in any::<u64>()) {
            let mut r = rng(seed);
            let s = BipartiteShape::new(2, 2).unwrap();
            let a = &random_density(4, &mut r) + &HermitianMatrix::identity(4).scale(0.3);
            let b = &random_density(4, &mut r) + &HermitianMatrix::identity(4).scale(0.3);
            let cap = sup_ratio(&ConeSpec::PptCapPsd(s), &a, &b).unwrap().value();
            let x = sup_ratio(&ConeSpec::Psd, &a, &b).unwrap().value();
            let y = sup_ratio(&ConeSpec::Ppt(s), &a, &b).unwrap().value();
            prop_assert_eq!(cap, x.max(y));
        }
    }
}
