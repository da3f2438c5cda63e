//! Base norms, negativities and distinguishability norms.
//!
//! The base functional is always the trace. For PSD and PPT the base norm is
//! a trace norm; PSD ∩ PPT and conv(PSD ∪ PPT) go through the certified
//! conic solvers in `sdp`.

use crate::cones::{qubit_coordinates, qubit_from_coordinates, ConeSpec};
use crate::linalg::{partial_transpose, trace_norm, BipartiteShape, HermitianMatrix};
use crate::report::{CheckReport, CheckStatus};
use crate::sdp::{cap_base_norm, conv_base_norm, AdmmSettings, Bracket};
use crate::{Error, Result};

/// Sets of two-outcome measurement operators E (0 ≤ E ≤ I plus extra
/// constraints).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MeasurementSet {
    /// All measurements.
    Plus,
    /// 0 ≤ E^T1 ≤ I.
    Ppt(BipartiteShape),
    /// Both of the above.
    PptPlus(BipartiteShape),
}

impl MeasurementSet {
    /// Cone whose base norm equals the distinguishability norm of this set.
    pub fn dual_cone(&self) -> ConeSpec {
        match self {
            MeasurementSet::Plus => ConeSpec::Psd,
            MeasurementSet::Ppt(s) => ConeSpec::Ppt(*s),
            MeasurementSet::PptPlus(s) => ConeSpec::ConvPsdPpt(*s),
        }
    }

    pub fn name(&self) -> String {
        match self {
            MeasurementSet::Plus => "M_PLUS".into(),
            MeasurementSet::Ppt(s) => format!("M_PPT({}x{})", s.d1, s.d2),
            MeasurementSet::PptPlus(s) => format!("M_PPT_PLUS({}x{})", s.d1, s.d2),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormMethod {
    ClosedForm,
    ConicSolver,
}

#[derive(Clone, Debug)]
pub struct NormReport {
    /// Certified upper end (value of an explicit decomposition).
    pub value: f64,
    /// Certified lower end (dual value); equals `value` for closed forms.
    pub lower: f64,
    /// v = c₊ − c₋ with c± in the cone.
    pub decomposition: Option<(HermitianMatrix, HermitianMatrix)>,
    /// Measurement operator E attaining `lower` as ⟨2E − I, v⟩.
    pub witness: Option<HermitianMatrix>,
    pub method: NormMethod,
    /// Closed forms: reconstruction error of the decomposition. Solver:
    /// width of the certified bracket.
    pub residual: f64,
    pub iterations: usize,
}

fn split(v: &HermitianMatrix) -> (HermitianMatrix, HermitianMatrix) {
    let sys = v.eigh();
    (sys.map(|l| l.max(0.0)), sys.map(|l| (-l).max(0.0)))
}

fn closed_form(v: &HermitianMatrix, c_plus: HermitianMatrix, c_minus: HermitianMatrix, value: f64) -> NormReport {
    let residual = (&(&c_plus - &c_minus) - v).max_abs();
    NormReport {
        value,
        lower: value,
        decomposition: Some((c_plus, c_minus)),
        witness: None,
        method: NormMethod::ClosedForm,
        residual,
        iterations: 0,
    }
}

fn solver_report(b: &Bracket, c_plus: HermitianMatrix, c_minus: HermitianMatrix, witness: Option<HermitianMatrix>) -> NormReport {
    NormReport {
        value: b.upper,
        lower: b.lower,
        decomposition: Some((c_plus, c_minus)),
        witness,
        method: NormMethod::ConicSolver,
        residual: (b.upper - b.lower).max(0.0),
        iterations: b.iterations,
    }
}

pub fn base_norm(cone: &ConeSpec, v: &HermitianMatrix) -> Result<NormReport> {
    base_norm_with(cone, v, &AdmmSettings::default())
}

pub fn base_norm_with(cone: &ConeSpec, v: &HermitianMatrix, settings: &AdmmSettings) -> Result<NormReport> {
    cone.check_dim(v.dim())?;
    match cone {
        ConeSpec::Psd => {
            let (p, m) = split(v);
            let value = p.trace() + m.trace();
            Ok(closed_form(v, p, m, value))
        }
        ConeSpec::Ppt(s) => {
            let vt = partial_transpose(v, *s)?;
            let (p, m) = split(&vt);
            let value = p.trace() + m.trace();
            Ok(closed_form(v, partial_transpose(&p, *s)?, partial_transpose(&m, *s)?, value))
        }
        ConeSpec::QubitDeformed(d) => {
            // (t, x) ↦ (t, E⁻¹x) maps the cone onto PSD and keeps the trace
            let (t, x) = qubit_coordinates(v);
            let u = qubit_from_coordinates(t, d.normalize(x));
            let (p, m) = split(&u);
            let a = d.axes();
            let back = |h: &HermitianMatrix| {
                let (t, y) = qubit_coordinates(h);
                qubit_from_coordinates(t, [y[0] * a[0], y[1] * a[1], y[2] * a[2]])
            };
            let value = p.trace() + m.trace();
            Ok(closed_form(v, back(&p), back(&m), value))
        }
        ConeSpec::PptCapPsd(s) => {
            let sol = cap_base_norm(v, *s, settings)?;
            Ok(solver_report(&sol.bracket, sol.c_plus, sol.c_minus, None))
        }
        ConeSpec::ConvPsdPpt(s) => {
            let sol = conv_base_norm(v, *s, settings)?;
            Ok(solver_report(&sol.bracket, sol.c_plus, sol.c_minus, Some(sol.witness)))
        }
    }
}

/// (‖v‖ − tr v)/2.
pub fn negativity(cone: &ConeSpec, v: &HermitianMatrix) -> Result<f64> {
    Ok((base_norm(cone, v)?.value - v.trace()) / 2.0)
}

/// ln ‖v‖; −∞ for v = 0.
pub fn log_negativity(cone: &ConeSpec, v: &HermitianMatrix) -> Result<f64> {
    let b = base_norm(cone, v)?.value;
    Ok(if b > 0.0 { b.ln() } else { f64::NEG_INFINITY })
}

/// sup over E in the set of ⟨2E − I, v⟩, as the base norm of the dual cone.
pub fn dist_norm(m: &MeasurementSet, v: &HermitianMatrix) -> Result<NormReport> {
    match m {
        MeasurementSet::Plus => {
            let mut r = base_norm(&ConeSpec::Psd, v)?;
            r.witness = Some(v.eigh().map(|l| if l > 0.0 { 1.0 } else { 0.0 }));
            Ok(r)
        }
        MeasurementSet::Ppt(s) => {
            let mut r = base_norm(&ConeSpec::Ppt(*s), v)?;
            let vt = partial_transpose(v, *s)?;
            let et = vt.eigh().map(|l| if l > 0.0 { 1.0 } else { 0.0 });
            r.witness = Some(partial_transpose(&et, *s)?);
            Ok(r)
        }
        MeasurementSet::PptPlus(s) => base_norm(&ConeSpec::ConvPsdPpt(*s), v),
    }
}

/// Half the distinguishability norm of ρ₁ − ρ₂.
pub fn max_bias(m: &MeasurementSet, rho1: &HermitianMatrix, rho2: &HermitianMatrix) -> Result<f64> {
    for r in [rho1, rho2] {
        if (r.trace() - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument("states must have unit trace".into()));
        }
    }
    Ok(dist_norm(m, &(rho1 - rho2))?.value / 2.0)
}

/// Compares the measurement-side value with the base norm of the dual cone.
/// For `Plus` it also checks sup_{0≤E≤I}⟨E, v⟩ = (‖v‖₁ + tr v)/2.
pub fn duality_report(v: &HermitianMatrix, m: &MeasurementSet) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    let d = dist_norm(m, v)?;
    let b = base_norm(&m.dual_cone(), v)?;
    let lhs = match &d.witness {
        Some(e) => (&e.scale(2.0) - &HermitianMatrix::identity(v.dim())).inner(v),
        None => d.lower,
    };
    let tol = match d.method {
        NormMethod::ClosedForm => 1e-9 * (1.0 + b.value),
        NormMethod::ConicSolver => 1e-4,
    };
    out.push(CheckReport::equal(
        format!("{}: measurement value vs dual-cone base norm", m.name()),
        lhs,
        b.value,
        tol,
        CheckStatus::Certified,
    ));
    if let MeasurementSet::Plus = m {
        let best: f64 = v.eigenvalues().iter().filter(|l| **l > 0.0).sum();
        out.push(CheckReport::equal(
            "sup over 0<=E<=I of <E,v> vs (trace norm + trace)/2",
            best,
            (trace_norm(v) + v.trace()) / 2.0,
            1e-9 * (1.0 + best.abs()),
            CheckStatus::Certified,
        ));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cones::{member, Deformation};
    use crate::linalg::C64;
    use crate::random::{random_density, random_hermitian, rng};
    use proptest::prelude::*;

    fn shape(d1: usize, d2: usize) -> BipartiteShape {
        BipartiteShape::new(d1, d2).unwrap()
    }

    fn omega2() -> HermitianMatrix {
        let s = 0.5f64.sqrt();
        let z = C64::new(0.0, 0.0);
        HermitianMatrix::outer(&[C64::new(s, 0.0), z, z, C64::new(s, 0.0)])
    }

    #[test]
    fn base_norm_examples() {
        let v = HermitianMatrix::from_diagonal(&[1.0, -1.0]);
        assert_eq!(base_norm(&ConeSpec::Psd, &v).unwrap().value, 2.0);
        let r = base_norm(&ConeSpec::Ppt(shape(2, 2)), &omega2()).unwrap();
        assert!((r.value - 2.0).abs() < 1e-12);
        assert!(r.residual < 1e-12);
        let mut g = rng(1);
        let rho = random_density(4, &mut g).scale(0.7);
        for cone in [ConeSpec::Psd, ConeSpec::PptCapPsd(shape(2, 2)), ConeSpec::ConvPsdPpt(shape(2, 2))] {
            let sep = &rho.scale(0.5) + &HermitianMatrix::identity(4).scale(0.1);
            let b = base_norm(&cone, &sep).unwrap();
            assert!((b.value - sep.trace()).abs() < 1e-6, "{cone:?} {}", b.value);
        }
    }

    #[test]
    fn negativity_examples() {
        let mut g = rng(2);
        let rho = random_density(3, &mut g);
        assert!(negativity(&ConeSpec::Psd, &rho).unwrap().abs() < 1e-12);
        assert!((negativity(&ConeSpec::Ppt(shape(2, 2)), &omega2()).unwrap() - 0.5).abs() < 1e-12);
        let v = HermitianMatrix::from_diagonal(&[1.0, -1.0]);
        assert_eq!(negativity(&ConeSpec::Psd, &v).unwrap(), 1.0);
    }

    #[test]
    fn log_negativity_examples() {
        let mut g = rng(3);
        let rho = random_density(3, &mut g);
        assert!(log_negativity(&ConeSpec::Psd, &rho).unwrap().abs() < 1e-12);
        assert!((log_negativity(&ConeSpec::Ppt(shape(2, 2)), &omega2()).unwrap() - 2f64.ln()).abs() < 1e-12);
        assert!((log_negativity(&ConeSpec::Psd, &rho.scale(2.0)).unwrap() - 2f64.ln()).abs() < 1e-12);
        assert_eq!(log_negativity(&ConeSpec::Psd, &HermitianMatrix::zeros(2)).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn max_bias_examples() {
        let e0 = HermitianMatrix::from_diagonal(&[1.0, 0.0]);
        let e1 = HermitianMatrix::from_diagonal(&[0.0, 1.0]);
        assert_eq!(max_bias(&MeasurementSet::Plus, &e0, &e0).unwrap(), 0.0);
        assert_eq!(max_bias(&MeasurementSet::Plus, &e0, &e1).unwrap(), 1.0);
    }

    #[test]
    fn duality_on_diagonal() {
        let v = HermitianMatrix::from_diagonal(&[3.0, -1.0]);
        let reps = duality_report(&v, &MeasurementSet::Plus).unwrap();
        assert!(reps.iter().all(|r| r.passed));
        assert_eq!(reps[1].lhs, 3.0);
        assert_eq!(reps[1].rhs, 3.0);
    }

    #[test]
    fn deformed_base_norm_is_trace_inside_cone() {
        let cone = ConeSpec::QubitDeformed(Deformation::Ellipsoid([1.0, 0.5, 0.5]));
        let inside = crate::cones::qubit_from_coordinates(1.0, [0.3, 0.2, 0.1]);
        assert!(member(&cone, &inside, 1e-12).unwrap());
        assert!((base_norm(&cone, &inside).unwrap().value - 1.0).abs() < 1e-12);
        let outside = crate::cones::qubit_from_coordinates(1.0, [0.0, 1.0, 0.0]);
        assert!(base_norm(&cone, &outside).unwrap().value > 1.0 + 1e-6);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn norm_axioms_and_chain(seed in any::<u64>(), t in -3.0f64..3.0) {
            let mut g = rng(seed);
            let s = shape(2, 2);
            let a = random_hermitian(4, &mut g);
            let b = random_hermitian(4, &mut g);
            for cone in [ConeSpec::Psd, ConeSpec::Ppt(s), ConeSpec::ConvPsdPpt(s)] {
                let n = |v: &HermitianMatrix| base_norm(&cone, v).unwrap().value;
                let tol = 1e-6 * (1.0 + n(&a) + n(&b));
                prop_assert!(n(&(&a + &b)) <= n(&a) + n(&b) + tol);
                prop_assert!((n(&a.scale(t)) - t.abs() * n(&a)).abs() <= tol * (1.0 + t.abs()));
                prop_assert!(n(&a) >= a.trace().abs() - tol);
            }
            let pp = dist_norm(&MeasurementSet::PptPlus(s), &a).unwrap().value;
            let pl = dist_norm(&MeasurementSet::Plus, &a).unwrap().value;
            prop_assert!(pp <= pl + 1e-6);
        }

        #[test]
        fn decompositions_reproduce_value(seed in any::<u64>()) {
            let mut g = rng(seed);
            let s = shape(2, 2);
            let v = random_hermitian(4, &mut g);
            for cone in [ConeSpec::PptCapPsd(s), ConeSpec::ConvPsdPpt(s)] {
                let r = base_norm(&cone, &v).unwrap();
                let (cp, cm) = r.decomposition.clone().unwrap();
                prop_assert!((&(&cp - &cm) - &v).max_abs() <= 1e-8);
                prop_assert!((cp.trace() + cm.trace() - r.value).abs() <= 1e-6);
                prop_assert!(r.residual <= 1e-6 * (1.0 + r.value));
                if let ConeSpec::PptCapPsd(_) = cone {
                    // hull-cone parts are members by construction (psd + transposed psd)
                    prop_assert!(member(&cone, &cp, 1e-9).unwrap());
                    prop_assert!(member(&cone, &cm, 1e-9).unwrap());
                }
            }
        }
    }
}
