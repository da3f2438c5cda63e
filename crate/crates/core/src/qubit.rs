//! Qubit closed forms in Bloch coordinates.

use crate::channels::{diameter_sampled, Channel, DiameterEstimate, DiameterMethod, SampleOptions};
use crate::cones::{qubit_coordinates, qubit_from_coordinates, ConeSpec, Deformation, ExtendedReal};
use crate::linalg::HermitianMatrix;
use crate::report::{CheckReport, CheckStatus};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochVector {
    pub r: [f64; 3],
}

impl BlochVector {
    pub fn new(r: [f64; 3]) -> Self {
        BlochVector { r }
    }

    pub fn norm(&self) -> f64 {
        dot(&self.r, &self.r).sqrt()
    }
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Bloch vector of a unit-trace qubit operator.
pub fn to_bloch(rho: &HermitianMatrix) -> Result<BlochVector> {
    if rho.dim() != 2 {
        return Err(Error::Dimension("Bloch vectors need a qubit".into()));
    }
    let (t, x) = qubit_coordinates(rho);
    if (t - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!("trace {t} is not 1")));
    }
    Ok(BlochVector::new(x))
}

/// ρ = (I + r·σ)/2; rejects |r| > 1.
pub fn from_bloch(r: &BlochVector) -> Result<HermitianMatrix> {
    if r.r.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite);
    }
    if r.norm() > 1.0 + 1e-12 {
        return Err(Error::OutsideCone(format!("|r| = {} exceeds 1", r.norm())));
    }
    Ok(qubit_from_coordinates(1.0, r.r))
}

/// Hilbert distance between two qubit states on the PSD cone.
pub fn hilbert_qubit(r: &BlochVector, t: &BlochVector) -> ExtendedReal {
    let rt = dot(&r.r, &t.r);
    let a = 1.0 - rt;
    let disc = (a * a - (1.0 - dot(&r.r, &r.r)) * (1.0 - dot(&t.r, &t.r))).max(0.0);
    let s = disc.sqrt();
    let den = a - s;
    if den <= 0.0 {
        return if s == 0.0 { ExtendedReal::Finite(0.0) } else { ExtendedReal::Infinite };
    }
    ExtendedReal::from_f64(((a + s) / den).ln())
}

/// r ↦ Λr + v.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AffineQubitMap {
    pub lambda: [[f64; 3]; 3],
    pub v: [f64; 3],
}

impl AffineQubitMap {
    pub fn new(lambda: [[f64; 3]; 3], v: [f64; 3]) -> Result<Self> {
        if lambda.iter().flatten().chain(v.iter()).any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(AffineQubitMap { lambda, v })
    }

    pub fn apply(&self, r: &[f64; 3]) -> [f64; 3] {
        let mut out = self.v;
        for (i, o) in out.iter_mut().enumerate() {
            *o += dot(&self.lambda[i], r);
        }
        out
    }

    /// The trace-preserving map (t, x) ↦ (t, Λx + t·v).
    pub fn to_channel(&self) -> Channel {
        Channel::from_linear_map(2, 2, |h| {
            let (t, x) = qubit_coordinates(h);
            let mut y = self.apply(&x);
            for k in 0..3 {
                y[k] += (t - 1.0) * self.v[k];
            }
            qubit_from_coordinates(t, y)
        })
        .expect("qubit map")
    }

    pub fn is_unital(&self, tol: f64) -> bool {
        self.v.iter().all(|x| x.abs() <= tol)
    }

    /// Largest singular value of Λ.
    pub fn lambda_norm(&self) -> f64 {
        let l = &self.lambda;
        let mut g = [0.0; 9];
        for i in 0..3 {
            for j in 0..3 {
                g[i * 3 + j] = (0..3).map(|k| l[k][i] * l[k][j]).sum();
            }
        }
        let gram = HermitianMatrix::from_real(3, &g).expect("3x3");
        gram.max_eigenvalue().max(0.0).sqrt()
    }

    /// The same map written in the coordinates where a deformed base is the
    /// unit ball: E⁻¹(ΛE r + v).
    pub fn undeformed(&self, d: &Deformation) -> AffineQubitMap {
        let a = d.axes();
        let mut lambda = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                lambda[i][j] = self.lambda[i][j] * a[j] / a[i];
            }
        }
        AffineQubitMap {
            lambda,
            v: d.normalize(self.v),
        }
    }
}

/// Λ and v read off the Hermitian-basis matrix of a trace-preserving qubit map.
pub fn channel_to_affine(t: &Channel) -> Result<AffineQubitMap> {
    if t.in_dim() != 2 || t.out_dim() != 2 {
        return Err(Error::Dimension("affine form needs a qubit-to-qubit map".into()));
    }
    if !t.is_trace_preserving(1e-9) {
        return Err(Error::InvalidArgument("map is not trace preserving".into()));
    }
    let mut lambda = [[0.0; 3]; 3];
    let mut v = [0.0; 3];
    for i in 0..3 {
        v[i] = t.entry(i + 1, 0);
        for j in 0..3 {
            lambda[i][j] = t.entry(i + 1, j + 1);
        }
    }
    AffineQubitMap::new(lambda, v)
}

/// Trace-norm contraction coefficient ‖Λ‖∞.
pub fn eta1(t: &Channel) -> Result<f64> {
    Ok(channel_to_affine(t)?.lambda_norm())
}

/// 2 ln((1 + s)/(1 − s)) with s = ‖Λ‖∞, for unital maps.
pub fn unital_diameter(map: &AffineQubitMap) -> Result<ExtendedReal> {
    if !map.is_unital(1e-10) {
        return Err(Error::InvalidArgument("map is not unital".into()));
    }
    let s = map.lambda_norm();
    if s >= 1.0 {
        return Ok(ExtendedReal::Infinite);
    }
    Ok(ExtendedReal::from_f64(2.0 * ((1.0 + s) / (1.0 - s)).ln()))
}

/// Exact diameter for unital qubit maps, sampled lower bound otherwise.
pub fn qubit_diameter(t: &Channel, opts: &SampleOptions) -> Result<DiameterEstimate> {
    let map = channel_to_affine(t)?;
    if map.is_unital(1e-10) {
        return Ok(DiameterEstimate::exact(unital_diameter(&map)?, DiameterMethod::QubitUnital));
    }
    diameter_sampled(t, &ConeSpec::Psd, opts)
}

/// η₁ ≤ tanh(Δ/4), with equality exactly for unital or constant maps.
pub fn equality_case_report(t: &Channel, opts: &SampleOptions) -> Result<Vec<CheckReport>> {
    let map = channel_to_affine(t)?;
    let eta = map.lambda_norm();
    let constant = map.lambda.iter().flatten().all(|x| x.abs() <= 1e-12);
    let unital = map.is_unital(1e-10);
    let (delta, status) = if constant {
        (ExtendedReal::Finite(0.0), CheckStatus::Certified)
    } else if unital {
        (unital_diameter(&map)?, CheckStatus::Certified)
    } else {
        (diameter_sampled(t, &ConeSpec::Psd, opts)?.lower, CheckStatus::Advisory)
    };
    let k = crate::channels::birkhoff_coefficient(delta);
    let mut out = vec![CheckReport::less_eq("eta1 <= tanh(D/4)", eta, k, 1e-9, status)];
    if constant || unital {
        out.push(CheckReport::equal("eta1 == tanh(D/4) (unital or constant)", eta, k, 1e-6, CheckStatus::Certified));
    } else {
        out.push(CheckReport::less_eq(
            "eta1 + gap < tanh(D/4) (neither unital nor constant)",
            eta + 1e-6,
            k,
            0.0,
            CheckStatus::Advisory,
        ));
    }
    Ok(out)
}

/// Hilbert distance from the centre of a deformed cone to (1, r).
pub fn deformed_cone_distance_origin(f: &Deformation, r: &BlochVector) -> Result<ExtendedReal> {
    f.validate()?;
    let n = r.norm();
    if n == 0.0 {
        return Ok(ExtendedReal::Finite(0.0));
    }
    let fwd = f.radius(r.r);
    let back = f.radius([-r.r[0], -r.r[1], -r.r[2]]);
    if n >= fwd {
        return Ok(ExtendedReal::Infinite);
    }
    Ok(ExtendedReal::from_f64(((1.0 + n / back) / (1.0 - n / fwd)).ln()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RestrictionCase {
    SphericalUnital,
    SphericalNonunital,
    Ellipsoid,
}

impl RestrictionCase {
    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_uppercase().as_str() {
            "SPHERICAL_UNITAL" | "A" => Some(RestrictionCase::SphericalUnital),
            "SPHERICAL_NONUNITAL" | "B" => Some(RestrictionCase::SphericalNonunital),
            "ELLIPSOID" | "C" => Some(RestrictionCase::Ellipsoid),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RestrictionDemo {
    pub case: RestrictionCase,
    pub map: AffineQubitMap,
    pub psd: DiameterEstimate,
    pub restricted: Vec<(Deformation, DiameterEstimate)>,
    pub checks: Vec<CheckReport>,
}

impl RestrictionDemo {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Axes of the ellipsoidal base used for the anisotropic example.
pub const ELLIPSOID_AXES: [f64; 3] = [1.0, 0.95, 0.45];

/// Restricting to a subcone can keep, destroy or restore finiteness of the
/// projective diameter.
pub fn restriction_demo(case: RestrictionCase, opts: &SampleOptions) -> Result<RestrictionDemo> {
    let mut checks = Vec::new();
    let mut restricted = Vec::new();
    let inf_name = "INF-suspect threshold";
    match case {
        RestrictionCase::SphericalUnital => {
            let map = AffineQubitMap::new(diag(0.5), [0.0; 3])?;
            let t = map.to_channel();
            let psd = DiameterEstimate::exact(unital_diameter(&map)?, DiameterMethod::QubitUnital);
            for c in [0.3, 0.5, 0.7] {
                let def = Deformation::Sphere(c);
                let est = diameter_sampled(&t, &ConeSpec::QubitDeformed(def), opts)?;
                checks.push(CheckReport::equal(
                    format!("sphere c={c} diameter vs PSD diameter"),
                    est.lower.value(),
                    psd.lower.value(),
                    1e-3,
                    CheckStatus::Advisory,
                ));
                restricted.push((def, est));
            }
            Ok(RestrictionDemo {
                case,
                map,
                psd,
                restricted,
                checks,
            })
        }
        RestrictionCase::SphericalNonunital => {
            let map = AffineQubitMap::new(diag(1.0 / 3.0), [1.0 / 3.0, 0.0, 0.0])?;
            let t = map.to_channel();
            let psd = diameter_sampled(&t, &ConeSpec::Psd, opts)?;
            checks.push(CheckReport::less_eq(
                format!("PSD diameter below {inf_name}"),
                psd.lower.value(),
                crate::channels::inf_threshold(),
                0.0,
                CheckStatus::Advisory,
            ));
            let def = Deformation::Sphere(0.5);
            let est = diameter_sampled(&t, &ConeSpec::QubitDeformed(def), opts)?;
            checks.push(CheckReport::less_eq(
                format!("sphere c=0.5 diameter exceeds {inf_name}"),
                crate::channels::inf_threshold(),
                est.lower.value(),
                0.0,
                CheckStatus::Advisory,
            ));
            restricted.push((def, est));
            Ok(RestrictionDemo {
                case,
                map,
                psd,
                restricted,
                checks,
            })
        }
        RestrictionCase::Ellipsoid => {
            let map = AffineQubitMap::new([[0.0, 1.0, 0.0], [0.5, 0.0, 0.0], [0.0, 0.0, 0.5]], [0.0; 3])?;
            let t = map.to_channel();
            let psd = DiameterEstimate::exact(unital_diameter(&map)?, DiameterMethod::QubitUnital);
            checks.push(CheckReport::less_eq(
                format!("PSD diameter exceeds {inf_name}"),
                crate::channels::inf_threshold(),
                psd.lower.value(),
                0.0,
                CheckStatus::Certified,
            ));
            let def = Deformation::Ellipsoid(ELLIPSOID_AXES);
            let sampled = diameter_sampled(&t, &ConeSpec::QubitDeformed(def), opts)?;
            // In coordinates where the ellipsoid is the unit ball the map is still unital.
            let exact = unital_diameter(&map.undeformed(&def))?;
            checks.push(CheckReport::less_eq(
                "ellipsoid diameter finite",
                exact.value(),
                crate::channels::inf_threshold(),
                0.0,
                CheckStatus::Certified,
            ));
            checks.push(CheckReport::equal(
                "sampled ellipsoid diameter vs undeformed closed form",
                sampled.lower.value(),
                exact.value(),
                1e-3,
                CheckStatus::Advisory,
            ));
            let est = DiameterEstimate {
                upper: Some(exact),
                ..sampled
            };
            restricted.push((def, est));
            Ok(RestrictionDemo {
                case,
                map,
                psd,
                restricted,
                checks,
            })
        }
    }
}

fn diag(s: f64) -> [[f64; 3]; 3] {
    [[s, 0.0, 0.0], [0.0, s, 0.0], [0.0, 0.0, s]]
}
