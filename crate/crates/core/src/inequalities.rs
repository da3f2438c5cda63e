//! Verifiers for the contraction and distinguishability bounds.
//!
//! Every check takes the projective diameter as a `DiameterEstimate`. A
//! certified (closed-form) diameter yields a `Certified` report; a sampled
//! lower bound can only weaken the right-hand side, so such reports are
//! `Advisory`.

use crate::channels::{Channel, DiameterEstimate};
use crate::cones::{hilbert_distance, inf_ratio, member, sup_ratio, ConeSpec, ExtendedReal};
use crate::linalg::{psd_check, trace_norm, HermitianMatrix, C64};
use crate::norms::{base_norm, dist_norm, MeasurementSet};
use crate::random::{random_pure_vector, rng};
use crate::report::{CheckReport, CheckStatus};
use crate::{Error, Result};

/// Absolute tolerance for a comparison whose sides come from `cone`.
fn tol_for(cones: &[&ConeSpec], scale: f64) -> f64 {
    if cones.iter().any(|c| matches!(c, ConeSpec::PptCapPsd(_) | ConeSpec::ConvPsdPpt(_))) {
        1e-4
    } else {
        1e-9 * (1.0 + scale.abs())
    }
}

fn tol_for_set(ms: &[&MeasurementSet], scale: f64) -> f64 {
    if ms.iter().any(|m| matches!(m, MeasurementSet::PptPlus(_))) {
        1e-4
    } else {
        1e-9 * (1.0 + scale.abs())
    }
}

fn delta_status(delta: &DiameterEstimate) -> CheckStatus {
    if delta.is_certified() {
        CheckStatus::Certified
    } else {
        CheckStatus::Advisory
    }
}

fn tanh_of(delta: ExtendedReal, div: f64) -> f64 {
    match delta {
        ExtendedReal::Infinite => 1.0,
        ExtendedReal::Finite(x) => (x / div).tanh(),
    }
}

fn check_unit_trace(v: &HermitianMatrix, what: &str) -> Result<()> {
    if (v.trace() - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!("{what} must have unit trace")));
    }
    Ok(())
}

fn check_base_preserving(t: &Channel) -> Result<()> {
    if !t.is_trace_preserving(1e-9) {
        return Err(Error::InvalidArgument("map is not base preserving (trace)".into()));
    }
    Ok(())
}

/// The three sup/inf expressions bounding half the base-norm distance, as
/// functions of M = sup(b₁/b₂) and m = inf(b₁/b₂). Limits are taken when
/// M = ∞ or m = 0.
pub fn chain_links(big_m: ExtendedReal, small_m: ExtendedReal) -> [f64; 3] {
    let m = small_m.value();
    match big_m {
        ExtendedReal::Infinite => [1.0 - m, 1.0 / (1.0 + m), 1.0],
        ExtendedReal::Finite(mm) => {
            if mm - m <= 0.0 {
                return [0.0, 0.0, 0.0];
            }
            let first = (mm - 1.0) * (1.0 - m) / (mm - m);
            let second = 1.0 / (1.0 + m) - 1.0 / (1.0 + mm);
            let third = if m > 0.0 { ((mm / m).ln() / 4.0).tanh() } else { 1.0 };
            [first, second, third]
        }
    }
}

fn chain_reports(label: &str, half: f64, big_m: ExtendedReal, small_m: ExtendedReal, tol: f64) -> Vec<CheckReport> {
    let [a, b, c] = chain_links(big_m, small_m);
    vec![
        CheckReport::less_eq(format!("{label} <= (M-1)(1-m)/(M-m)"), half, a, tol, CheckStatus::Certified),
        CheckReport::less_eq("(M-1)(1-m)/(M-m) <= 1/(1+m) - 1/(1+M)", a, b, 1e-9, CheckStatus::Certified),
        CheckReport::less_eq("1/(1+m) - 1/(1+M) <= tanh(h/4)", b, c, 1e-9, CheckStatus::Certified),
    ]
}

/// ½‖b₁ − b₂‖ against the sup/inf chain and tanh(h/4).
pub fn base_norm_hilbert_chain(cone: &ConeSpec, b1: &HermitianMatrix, b2: &HermitianMatrix) -> Result<Vec<CheckReport>> {
    check_unit_trace(b1, "b1")?;
    check_unit_trace(b2, "b2")?;
    let half = base_norm(cone, &(b1 - b2))?.value / 2.0;
    let big = sup_ratio(cone, b1, b2)?;
    let small = inf_ratio(cone, b1, b2)?;
    Ok(chain_reports("half base-norm distance", half, big, small, tol_for(&[cone], 1.0)))
}

/// Same chain with the distinguishability norm of a measurement set on the
/// left and its dual cone on the right.
pub fn dist_norm_hilbert_chain(m: &MeasurementSet, b1: &HermitianMatrix, b2: &HermitianMatrix) -> Result<Vec<CheckReport>> {
    check_unit_trace(b1, "b1")?;
    check_unit_trace(b2, "b2")?;
    let cone = m.dual_cone();
    let half = dist_norm(m, &(b1 - b2))?.value / 2.0;
    let big = sup_ratio(&cone, b1, b2)?;
    let small = inf_ratio(&cone, b1, b2)?;
    Ok(chain_reports(&format!("half {} distance", m.name()), half, big, small, tol_for_set(&[m], 1.0)))
}

/// 𝒩'(T(v)) ≤ 𝒩(v)·tanh(Δ/4).
pub fn negativity_contraction_check(
    t: &Channel,
    cone: &ConeSpec,
    cone_out: &ConeSpec,
    v: &HermitianMatrix,
    delta: &DiameterEstimate,
) -> Result<CheckReport> {
    check_base_preserving(t)?;
    if v.trace() < -1e-12 {
        return Err(Error::InvalidArgument("v must have non-negative trace".into()));
    }
    let tv = t.apply(v)?;
    let lhs = crate::norms::negativity(cone_out, &tv)?;
    let rhs = crate::norms::negativity(cone, v)? * tanh_of(delta.certifying_value(), 4.0);
    Ok(CheckReport::less_eq(
        "N(T(v)) <= N(v) tanh(D/4)",
        lhs,
        rhs,
        tol_for(&[cone, cone_out], rhs),
        delta_status(delta),
    ))
}

/// ‖T(v₁) − T(v₂)‖' ≤ ‖v₁ − v₂‖·tanh(Δ/4) for equal-trace v₁, v₂.
pub fn base_norm_distance_contraction_check(
    t: &Channel,
    cone: &ConeSpec,
    cone_out: &ConeSpec,
    v1: &HermitianMatrix,
    v2: &HermitianMatrix,
    delta: &DiameterEstimate,
) -> Result<CheckReport> {
    check_base_preserving(t)?;
    if (v1.trace() - v2.trace()).abs() > 1e-9 {
        return Err(Error::InvalidArgument("v1 and v2 must have equal trace".into()));
    }
    let diff = v1 - v2;
    let lhs = base_norm(cone_out, &t.apply(&diff)?)?.value;
    let rhs = base_norm(cone, &diff)?.value * tanh_of(delta.certifying_value(), 4.0);
    Ok(CheckReport::less_eq(
        "||T(v1)-T(v2)|| <= ||v1-v2|| tanh(D/4)",
        lhs,
        rhs,
        tol_for(&[cone, cone_out], rhs),
        delta_status(delta),
    ))
}

/// ‖T(v)‖' ≤ ‖v‖·tanh(Δ/2) when T(v) leaves the cone, together with the
/// additive decrease of the logarithmic negativity.
pub fn base_norm_contraction_check(
    t: &Channel,
    cone: &ConeSpec,
    cone_out: &ConeSpec,
    v: &HermitianMatrix,
    delta: &DiameterEstimate,
) -> Result<Vec<CheckReport>> {
    check_base_preserving(t)?;
    if v.trace() < -1e-12 {
        return Err(Error::InvalidArgument("v must have non-negative trace".into()));
    }
    let tv = t.apply(v)?;
    if member(cone_out, &tv, 1e-9)? {
        return Ok(vec![CheckReport::not_applicable("T(v) lies in the cone")]);
    }
    let k = tanh_of(delta.certifying_value(), 2.0);
    let n_out = base_norm(cone_out, &tv)?.value;
    let n_in = base_norm(cone, v)?.value;
    let tol = tol_for(&[cone, cone_out], n_in);
    let status = delta_status(delta);
    let mut out = vec![CheckReport::less_eq("||T(v)|| <= ||v|| tanh(D/2)", n_out, n_in * k, tol, status)];
    out.push(CheckReport::less_eq(
        "-ln tanh(D/2) <= ln||v|| - ln||T(v)||",
        -k.ln(),
        n_in.ln() - n_out.ln(),
        tol / n_out.max(1e-300),
        status,
    ));
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct FiniteTimeReport {
    /// ln‖v‖ / (−ln tanh(Δ/2)).
    pub n1: f64,
    /// (e^Δ/2)·ln‖v‖.
    pub n2: f64,
    /// First n with Tⁿ(v) in the cone (searched up to max(⌈n₁⌉, 1000)).
    pub entry_step: Option<usize>,
    pub checks: Vec<CheckReport>,
}

/// Both iteration counts that guarantee Tⁿ(v) ∈ C, plus the observed entry.
pub fn finite_time_cone_entry_check(t: &Channel, cone: &ConeSpec, v: &HermitianMatrix, delta: &DiameterEstimate) -> Result<FiniteTimeReport> {
    check_base_preserving(t)?;
    check_unit_trace(v, "v")?;
    let d = match delta.certifying_value() {
        ExtendedReal::Finite(x) if delta.is_certified() => x,
        _ => {
            return Ok(FiniteTimeReport {
                n1: f64::NAN,
                n2: f64::NAN,
                entry_step: None,
                checks: vec![CheckReport::not_applicable("needs a finite closed-form diameter")],
            })
        }
    };
    let norm = base_norm(cone, v)?.value;
    let log_norm = norm.ln().max(0.0);
    let n1 = if log_norm == 0.0 { 0.0 } else { log_norm / -(d / 2.0).tanh().ln() };
    let n2 = d.exp() / 2.0 * log_norm;
    let target = n1.ceil() as usize;
    let limit = target.max(1000);
    let mut cur = v.clone();
    let mut entry = None;
    let mut at_target = false;
    for n in 0..=limit {
        let inside = member(cone, &cur, 1e-9)?;
        if inside && entry.is_none() {
            entry = Some(n);
        }
        if n == target {
            at_target = inside;
            if entry.is_some() {
                break;
            }
        }
        cur = t.apply(&cur)?;
    }
    let checks = vec![
        CheckReport::less_eq("n1 <= n2", n1, n2, 1e-9 * (1.0 + n2.abs()), CheckStatus::Certified),
        CheckReport::equal(
            format!("T^{target}(v) in cone"),
            if at_target { 1.0 } else { 0.0 },
            1.0,
            0.0,
            CheckStatus::Certified,
        ),
        CheckReport::less_eq(
            "first entry step <= ceil(n1)",
            entry.map_or(f64::INFINITY, |e| e as f64),
            target as f64,
            0.0,
            CheckStatus::Certified,
        ),
    ];
    Ok(FiniteTimeReport {
        n1,
        n2,
        entry_step: entry,
        checks,
    })
}

/// One branch of a non-deterministic operation: the map, its output cone,
/// and its projective diameter.
#[derive(Clone, Debug)]
pub struct Branch {
    pub map: Channel,
    pub cone_out: ConeSpec,
    pub delta: DiameterEstimate,
}

/// Σ pᵢ𝒩ᵢ(ρᵢ) ≤ 𝒩(ρ)·tanh(maxᵢ Δᵢ/4), plus the base-norm and
/// log-negativity monotone relations.
pub fn ensemble_negativity_check(branches: &[Branch], cone: &ConeSpec, rho: &HermitianMatrix) -> Result<Vec<CheckReport>> {
    if branches.is_empty() {
        return Err(Error::InvalidArgument("no branches".into()));
    }
    check_unit_trace(rho, "rho")?;
    let d = rho.dim();
    // Σ tr Tᵢ(b) ≤ 1 on the base ⟺ I − Σ Tᵢ*(I) lies in the dual cone.
    let mut total = HermitianMatrix::zeros(d);
    for b in branches {
        total += &b.map.adjoint().apply(&HermitianMatrix::identity(b.map.out_dim()))?;
    }
    let slack_op = &HermitianMatrix::identity(d) - &total;
    if !member(&cone.dual(), &slack_op, 1e-9)? {
        return Ok(vec![CheckReport::not_applicable("branch traces exceed 1 on the base")]);
    }
    let mut lhs = 0.0;
    let mut norm_avg = 0.0;
    let mut log_avg = 0.0;
    let mut psum = 0.0;
    let mut dmax = ExtendedReal::Finite(0.0);
    let mut certified = true;
    for b in branches {
        let img = b.map.apply(rho)?;
        let p = img.trace();
        if p < -1e-12 {
            return Ok(vec![CheckReport::not_applicable("negative branch probability")]);
        }
        certified &= b.delta.is_certified();
        let dv = b.delta.certifying_value();
        if dv.value() > dmax.value() {
            dmax = dv;
        }
        if p <= 1e-15 {
            continue;
        }
        psum += p;
        let nb = base_norm(&b.cone_out, &img)?.value;
        lhs += (nb - p) / 2.0;
        norm_avg += nb;
        log_avg += p * (nb / p).ln();
    }
    let status = if certified { CheckStatus::Certified } else { CheckStatus::Advisory };
    let cones: Vec<&ConeSpec> = std::iter::once(cone).chain(branches.iter().map(|b| &b.cone_out)).collect();
    let nb_rho = base_norm(cone, rho)?.value;
    let n_rho = (nb_rho - 1.0) / 2.0;
    let tol = tol_for(&cones, nb_rho);
    let mut out = vec![
        CheckReport::less_eq(
            "sum p_i N(rho_i) <= N(rho) tanh(max D_i/4)",
            lhs,
            n_rho * tanh_of(dmax, 4.0),
            tol,
            status,
        ),
        CheckReport::less_eq("sum p_i ||rho_i|| <= ||rho||", norm_avg, nb_rho, tol, CheckStatus::Certified),
    ];
    if (psum - 1.0).abs() <= 1e-9 {
        out.push(CheckReport::less_eq(
            "sum p_i ln||rho_i|| <= ln||rho||",
            log_avg,
            nb_rho.ln(),
            tol,
            CheckStatus::Certified,
        ));
    }
    Ok(out)
}

fn measurement_member(m: &MeasurementSet, e: &HermitianMatrix, tol: f64) -> Result<bool> {
    let id = HermitianMatrix::identity(e.dim());
    let in_plus = |x: &HermitianMatrix| psd_check(x, tol) && psd_check(&(&id - x), tol);
    Ok(match m {
        MeasurementSet::Plus => in_plus(e),
        MeasurementSet::Ppt(s) => in_plus(&crate::linalg::partial_transpose(e, *s)?),
        MeasurementSet::PptPlus(s) => in_plus(e) && in_plus(&crate::linalg::partial_transpose(e, *s)?),
    })
}

/// Sampled extreme measurement operators of a set: rank-k projectors and
/// their partial transposes, filtered by membership.
fn sample_measurements(m: &MeasurementSet, d: usize, n: usize, seed: u64) -> Result<Vec<HermitianMatrix>> {
    let mut r = rng(seed);
    let mut out = vec![HermitianMatrix::zeros(d), HermitianMatrix::identity(d)];
    let mut tries = 0;
    while out.len() < n + 2 && tries < 20 * n {
        tries += 1;
        let k = 1 + tries % d.max(1);
        let mut p = HermitianMatrix::zeros(d);
        let mut basis: Vec<Vec<C64>> = Vec::new();
        while basis.len() < k {
            let mut v = random_pure_vector(d, &mut r);
            for b in &basis {
                let ip: C64 = b.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= ip * bi;
                }
            }
            let nrm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if nrm < 1e-8 {
                continue;
            }
            v.iter_mut().for_each(|z| *z /= nrm);
            p += &HermitianMatrix::outer(&v);
            basis.push(v);
        }
        let cand = match m {
            MeasurementSet::Plus => p,
            MeasurementSet::Ppt(s) | MeasurementSet::PptPlus(s) => {
                if tries % 2 == 0 {
                    crate::linalg::partial_transpose(&p, *s)?
                } else {
                    p
                }
            }
        };
        if measurement_member(m, &cand, 1e-9)? {
            out.push(cand);
        }
    }
    Ok(out)
}

/// Distinguishability-norm contraction: (a) without a rate under
/// T*(M') ⊆ M (sampled), (b) with rate tanh(Δ/4) for base-preserving T.
#[allow(clippy::too_many_arguments)]
pub fn dist_norm_contraction_check(
    t: &Channel,
    m: &MeasurementSet,
    m_out: &MeasurementSet,
    v1: &HermitianMatrix,
    v2: &HermitianMatrix,
    delta: &DiameterEstimate,
    n_samples: usize,
    seed: u64,
) -> Result<Vec<CheckReport>> {
    if (v1.trace() - v2.trace()).abs() > 1e-9 {
        return Err(Error::InvalidArgument("v1 and v2 must have equal trace".into()));
    }
    let diff = v1 - v2;
    let lhs = dist_norm(m_out, &t.apply(&diff)?)?.value;
    let base = dist_norm(m, &diff)?.value;
    let tol = tol_for_set(&[m, m_out], base);
    let mut out = Vec::new();
    let tp = t.is_trace_preserving(1e-9);
    let adj = t.adjoint();
    let mut pre_a = tp;
    if pre_a {
        for e in sample_measurements(m_out, t.out_dim(), n_samples, seed)? {
            if !measurement_member(m, &adj.apply(&e)?, 1e-9)? {
                pre_a = false;
                break;
            }
        }
    }
    if pre_a {
        out.push(CheckReport::less_eq(
            "(a) ||T(v1)-T(v2)||_(M') <= ||v1-v2||_(M)",
            lhs,
            base,
            tol,
            CheckStatus::Advisory,
        ));
    } else {
        out.push(CheckReport::not_applicable("(a) T*(M') not inside M on sampled operators"));
    }
    if tp {
        out.push(CheckReport::less_eq(
            "(b) ||T(v1)-T(v2)||_(M') <= ||v1-v2||_(M) tanh(D/4)",
            lhs,
            base * tanh_of(delta.certifying_value(), 4.0),
            tol,
            delta_status(delta),
        ));
    } else {
        out.push(CheckReport::not_applicable("(b) map is not base preserving"));
    }
    Ok(out)
}

/// tr √(√ρ₁ ρ₂ √ρ₁).
pub fn fidelity(rho1: &HermitianMatrix, rho2: &HermitianMatrix) -> Result<f64> {
    if rho1.dim() != rho2.dim() {
        return Err(Error::Dimension("fidelity of matrices of different size".into()));
    }
    let s = rho1.sqrt_psd();
    let inner = rho2.congruence(s.matrix());
    Ok(inner.eigenvalues().iter().map(|l| l.max(0.0).sqrt()).sum())
}

fn check_state(rho: &HermitianMatrix) -> Result<()> {
    check_unit_trace(rho, "state")?;
    if !psd_check(rho, 1e-9) {
        return Err(Error::OutsideCone("state is not psd".into()));
    }
    Ok(())
}

/// 1 − F ≤ ½‖ρ₁ − ρ₂‖₁ ≤ √(1 − F²) ≤ tanh(h/4).
pub fn fidelity_bounds_check(rho1: &HermitianMatrix, rho2: &HermitianMatrix) -> Result<Vec<CheckReport>> {
    check_state(rho1)?;
    check_state(rho2)?;
    let f = fidelity(rho1, rho2)?.min(1.0);
    let td = trace_norm(&(rho1 - rho2)) / 2.0;
    let root = (1.0 - f * f).max(0.0).sqrt();
    let h = hilbert_distance(&ConeSpec::Psd, rho1, rho2)?;
    let st = CheckStatus::Certified;
    Ok(vec![
        CheckReport::less_eq("1 - F <= trace distance", 1.0 - f, td, 1e-9, st),
        CheckReport::less_eq("trace distance <= sqrt(1 - F^2)", td, root, 1e-9, st),
        CheckReport::less_eq("sqrt(1 - F^2) <= tanh(h/4)", root, tanh_of(h, 4.0), 1e-9, st),
    ])
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChernoffResult {
    /// −ln min_s Q(s).
    pub xi: ExtendedReal,
    pub q_min: f64,
    pub s_opt: f64,
}

/// Q(s) = tr ρ₁ˢ ρ₂¹⁻ˢ from the two eigendecompositions, with powers taken
/// on the supports (0⁰ := 0).
struct ChernoffFn {
    a: Vec<f64>,
    b: Vec<f64>,
    overlap: Vec<f64>,
}

impl ChernoffFn {
    fn new(rho1: &HermitianMatrix, rho2: &HermitianMatrix) -> Self {
        let s1 = rho1.eigh();
        let s2 = rho2.eigh();
        let cut = |v: &[f64]| {
            let lmax = v.iter().cloned().fold(0.0, f64::max);
            v.iter().map(|&l| if l > 1e-12 * lmax { l } else { 0.0 }).collect::<Vec<_>>()
        };
        let d = rho1.dim();
        let mut overlap = vec![0.0; d * d];
        for i in 0..d {
            let u = s1.vector(i);
            for j in 0..d {
                let w = s2.vector(j);
                let ip: C64 = u.iter().zip(&w).map(|(x, y)| x.conj() * y).sum();
                overlap[i * d + j] = ip.norm_sqr();
            }
        }
        ChernoffFn {
            a: cut(&s1.values),
            b: cut(&s2.values),
            overlap,
        }
    }

    fn eval(&self, s: f64) -> f64 {
        let d = self.a.len();
        let mut q = 0.0;
        for i in 0..d {
            if self.a[i] == 0.0 {
                continue;
            }
            let ai = self.a[i].powf(s);
            for j in 0..d {
                if self.b[j] == 0.0 {
                    continue;
                }
                q += ai * self.b[j].powf(1.0 - s) * self.overlap[i * d + j];
            }
        }
        q
    }
}

/// Chernoff exponent by a 64-interval grid scan followed by golden-section
/// refinement to width 1e-8.
pub fn chernoff(rho1: &HermitianMatrix, rho2: &HermitianMatrix) -> Result<ChernoffResult> {
    check_state(rho1)?;
    check_state(rho2)?;
    let f = ChernoffFn::new(rho1, rho2);
    let n = 64;
    let (mut best_k, mut best_q) = (0, f64::INFINITY);
    for k in 0..=n {
        let q = f.eval(k as f64 / n as f64);
        if q < best_q {
            best_q = q;
            best_k = k;
        }
    }
    let (mut lo, mut hi) = ((best_k.max(1) - 1) as f64 / n as f64, ((best_k + 1).min(n)) as f64 / n as f64);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f.eval(x1), f.eval(x2));
    while hi - lo > 1e-8 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f.eval(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f.eval(x2);
        }
    }
    let mut s_opt = (lo + hi) / 2.0;
    let mut q_min = f.eval(s_opt);
    if best_q < q_min {
        q_min = best_q;
        s_opt = best_k as f64 / n as f64;
    }
    let xi = if q_min <= 0.0 {
        ExtendedReal::Infinite
    } else {
        ExtendedReal::from_f64(-q_min.min(1.0).ln())
    };
    Ok(ChernoffResult { xi, q_min, s_opt })
}

/// ξ ≤ h/2.
pub fn chernoff_check(rho1: &HermitianMatrix, rho2: &HermitianMatrix) -> Result<CheckReport> {
    let c = chernoff(rho1, rho2)?;
    let h = hilbert_distance(&ConeSpec::Psd, rho1, rho2)?;
    Ok(CheckReport::less_eq("chernoff xi <= h/2", c.xi.value(), h.value() / 2.0, 1e-9, CheckStatus::Certified))
}

/// √(1 − Q_min²) vs tanh(h/4); an unproven strengthening, so the report is
/// exploratory.
pub fn conjecture_probe(rho1: &HermitianMatrix, rho2: &HermitianMatrix) -> Result<CheckReport> {
    let c = chernoff(rho1, rho2)?;
    let h = hilbert_distance(&ConeSpec::Psd, rho1, rho2)?;
    let lhs = (1.0 - c.q_min.min(1.0).powi(2)).max(0.0).sqrt();
    Ok(CheckReport::less_eq(
        "sqrt(1 - Qmin^2) <= tanh(h/4)",
        lhs,
        tanh_of(h, 4.0),
        1e-9,
        CheckStatus::Exploratory,
    ))
}
