//! Completely positive maps between two pairs of states.
//!
//! A CP map with T(ρᵢ) = pᵢρᵢ′ exists exactly when the PSD Hilbert distance
//! does not grow (given compatible supports). `synthesize` builds one,
//! `complete_to_instrument` embeds it into a trace-preserving map with a
//! classical flag, and `optimality_witness` builds the segment-image channels
//! that saturate the contraction bounds.

use crate::channels::Channel;
use crate::cones::{hilbert_distance, inf_ratio, sup_ratio, ConeSpec, ExtendedReal};
use crate::linalg::{op_norm, psd_check, support_contained, HermitianMatrix, C64};
use crate::norms::{base_norm, negativity};
use crate::report::{CheckReport, CheckStatus};
use crate::{Error, Result, Tolerances};

/// Band used when comparing the two Hilbert distances.
pub const FEASIBILITY_BAND: f64 = 1e-9;
/// Lower bound for the Choi spectrum of a synthesized map.
pub const CHOI_TOL: f64 = 1e-9;
/// Bound for ‖T(ρᵢ) − pᵢρᵢ′‖∞.
pub const RESIDUAL_TOL: f64 = 1e-8;

fn check_density(rho: &HermitianMatrix, name: &str) -> Result<()> {
    if !rho.matrix().is_finite() {
        return Err(Error::NonFinite);
    }
    if (rho.trace() - 1.0).abs() > 1e-8 {
        return Err(Error::InvalidArgument(format!("{name} has trace {}", rho.trace())));
    }
    if !psd_check(rho, 1e-9) {
        return Err(Error::OutsideCone(format!("{name} is not positive semidefinite")));
    }
    Ok(())
}

fn check_pairs(r1: &HermitianMatrix, r2: &HermitianMatrix, q1: &HermitianMatrix, q2: &HermitianMatrix) -> Result<()> {
    if r1.dim() != r2.dim() {
        return Err(Error::Dimension(format!("input pair has dims {} and {}", r1.dim(), r2.dim())));
    }
    if q1.dim() != q2.dim() {
        return Err(Error::Dimension(format!("output pair has dims {} and {}", q1.dim(), q2.dim())));
    }
    check_density(r1, "rho1")?;
    check_density(r2, "rho2")?;
    check_density(q1, "rho1'")?;
    check_density(q2, "rho2'")
}

/// Both support implications: supp ρ₁ ⊆ supp ρ₂ ⇒ supp ρ₁′ ⊆ supp ρ₂′, and
/// the same with the indices swapped.
pub fn support_compatible(
    rho1: &HermitianMatrix,
    rho2: &HermitianMatrix,
    rho1p: &HermitianMatrix,
    rho2p: &HermitianMatrix,
    tol: f64,
) -> bool {
    let forward = !support_contained(rho1, rho2, tol) || support_contained(rho1p, rho2p, tol);
    let backward = !support_contained(rho2, rho1, tol) || support_contained(rho2p, rho1p, tol);
    forward && backward
}

#[derive(Clone, Debug, PartialEq)]
pub struct Feasibility {
    pub feasible: bool,
    pub compatible: bool,
    pub h_in: ExtendedReal,
    pub h_out: ExtendedReal,
    pub reason: Option<String>,
}

/// Compatibility plus h(ρ₁,ρ₂) ≥ h(ρ₁′,ρ₂′) − 1e-9.
pub fn feasibility(
    rho1: &HermitianMatrix,
    rho2: &HermitianMatrix,
    rho1p: &HermitianMatrix,
    rho2p: &HermitianMatrix,
) -> Result<Feasibility> {
    check_pairs(rho1, rho2, rho1p, rho2p)?;
    let h_in = hilbert_distance(&ConeSpec::Psd, rho1, rho2)?;
    let h_out = hilbert_distance(&ConeSpec::Psd, rho1p, rho2p)?;
    let compatible = support_compatible(rho1, rho2, rho1p, rho2p, Tolerances::default().rank_tol);
    let fits = match (h_in, h_out) {
        (ExtendedReal::Infinite, _) => true,
        (ExtendedReal::Finite(_), ExtendedReal::Infinite) => false,
        (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) => b <= a + FEASIBILITY_BAND,
    };
    let reason = if !compatible {
        Some("supports of the two pairs are not compatible".to_string())
    } else if !fits {
        Some(format!("h(rho1', rho2') = {} exceeds h(rho1, rho2) = {}", h_out.value(), h_in.value()))
    } else {
        None
    };
    Ok(Feasibility {
        feasible: compatible && fits,
        compatible,
        h_in,
        h_out,
        reason,
    })
}

pub fn feasible(rho1: &HermitianMatrix, rho2: &HermitianMatrix, rho1p: &HermitianMatrix, rho2p: &HermitianMatrix) -> Result<bool> {
    Ok(feasibility(rho1, rho2, rho1p, rho2p)?.feasible)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SynthesisBranch {
    /// Equal inputs or equal outputs: T(ρ) = tr(ρ)·ρ₁′.
    Constant,
    /// One support contains the other; `swapped` means supp ρ₂ ⊆ supp ρ₁.
    SupportInclusion { swapped: bool },
    /// Neither support contains the other.
    NoInclusion,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    /// Smallest eigenvalue of the Choi matrix.
    pub choi_min_eig: f64,
    /// ‖T(ρ₁) − p₁ρ₁′‖∞ and ‖T(ρ₂) − p₂ρ₂′‖∞.
    pub residuals: [f64; 2],
}

impl Certificate {
    pub fn passed(&self, p: (f64, f64)) -> bool {
        self.choi_min_eig >= -CHOI_TOL && self.residuals.iter().all(|r| *r <= RESIDUAL_TOL) && p.0 > 0.0 && p.1 > 0.0
    }
}

#[derive(Clone, Debug)]
pub struct SynthesisResult {
    pub feasibility: Feasibility,
    pub channel: Option<Channel>,
    pub p1: Option<f64>,
    pub p2: Option<f64>,
    pub branch: Option<SynthesisBranch>,
    pub certificate: Option<Certificate>,
    /// Relative spectral gap at the kernel cut of the matrices that chose the
    /// kernel vectors; small values mean the branch choice is fragile.
    pub margin: Option<f64>,
}

impl SynthesisResult {
    pub fn feasible(&self) -> bool {
        self.feasibility.feasible
    }

    pub fn certified(&self) -> bool {
        match (&self.certificate, self.p1, self.p2) {
            (Some(c), Some(p1), Some(p2)) => c.passed((p1, p2)),
            _ => false,
        }
    }
}

/// Kernel of a psd matrix together with the relative gap at the cut.
fn kernel(h: &HermitianMatrix, rank_tol: f64) -> (Vec<Vec<C64>>, f64) {
    let sys = h.eigh();
    let lmax = sys.values.last().copied().unwrap_or(0.0).max(0.0);
    let cut = rank_tol * lmax;
    let mut basis = Vec::new();
    let mut below = f64::NEG_INFINITY;
    let mut above = f64::INFINITY;
    for (k, &l) in sys.values.iter().enumerate() {
        if l <= cut {
            basis.push(sys.vector(k));
            below = below.max(l);
        } else {
            above = above.min(l);
        }
    }
    let gap = if lmax > 0.0 && !basis.is_empty() && above.is_finite() {
        (above - below.max(0.0)) / lmax
    } else {
        1.0
    };
    (basis, gap)
}

/// Unit vector in span(basis) maximizing ⟨x|a|x⟩.
fn best_in_span(basis: &[Vec<C64>], a: &HermitianMatrix) -> Option<(Vec<C64>, f64)> {
    if basis.is_empty() {
        return None;
    }
    let k = basis.len();
    let av: Vec<Vec<C64>> = basis.iter().map(|b| a.matrix().mul_vec(b)).collect();
    let compressed = HermitianMatrix::from_fn(k, |i, j| basis[i].iter().zip(&av[j]).map(|(x, y)| x.conj() * y).sum());
    let sys = compressed.eigh();
    let coeffs = sys.vector(k - 1);
    let n = basis[0].len();
    let mut x = vec![C64::new(0.0, 0.0); n];
    for (c, b) in coeffs.iter().zip(basis) {
        for (xi, bi) in x.iter_mut().zip(b) {
            *xi += c * bi;
        }
    }
    let value = a.expectation(&x);
    Some((x, value))
}

/// The proof guarantees the kernel vectors exist; reaching this is a bug.
fn bug(what: &str) -> Error {
    Error::InvalidArgument(format!("kernel vector search failed for {what}; this should not happen"))
}

fn equal_states(a: &HermitianMatrix, b: &HermitianMatrix) -> bool {
    (a - b).max_abs() <= 1e-12
}

/// T(ρ) = ⟨x|ρ|x⟩/nx · A + ⟨y|ρ|y⟩/ny · B.
fn rank_two_map(
    in_dim: usize,
    x: &[C64],
    nx: f64,
    a: &HermitianMatrix,
    y: &[C64],
    ny: f64,
    b: &HermitianMatrix,
) -> Result<Channel> {
    let out = a.dim();
    Channel::from_linear_map(in_dim, out, |rho| {
        &a.scale(rho.expectation(x) / nx) + &b.scale(rho.expectation(y) / ny)
    })
}

/// Inclusion branch for supp ρ₁ ⊆ supp ρ₂. Returns (T, κ, margin).
fn inclusion_branch(
    rho1: &HermitianMatrix,
    rho2: &HermitianMatrix,
    rho1p: &HermitianMatrix,
    rho2p: &HermitianMatrix,
    rank_tol: f64,
) -> Result<(Channel, f64)> {
    let psd = ConeSpec::Psd;
    let big_m = sup_ratio(&psd, rho1, rho2)?.value();
    let small_m = inf_ratio(&psd, rho1, rho2)?.value();
    let big_mp = sup_ratio(&psd, rho1p, rho2p)?.value();
    let small_mp = inf_ratio(&psd, rho1p, rho2p)?.value();
    if !big_m.is_finite() || !big_mp.is_finite() {
        return Err(Error::InvalidArgument("inclusion branch needs supp rho1 within supp rho2".into()));
    }
    // Valid rescalings κ of ρ₁′ satisfy κM′ ≤ M and κm′ ≥ m.
    let upper = big_m / big_mp;
    let kappa = if small_m > 0.0 && small_mp > 0.0 {
        (small_m / small_mp * upper).sqrt()
    } else {
        upper.min(1.0)
    };
    let t1p = rho1p.scale(kappa);
    let u = &rho2.scale(big_m) - rho1;
    let v = rho1 - &rho2.scale(small_m);
    let tu = &rho2p.scale(big_m) - &t1p;
    let tv = &t1p - &rho2p.scale(small_m);
    let (ker_v, gap_v) = kernel(&v, rank_tol);
    let (ker_u, gap_u) = kernel(&u, rank_tol);
    let (psi, npsi) = best_in_span(&ker_v, &u).ok_or_else(|| bug("v"))?;
    let (phi, nphi) = best_in_span(&ker_u, &v).ok_or_else(|| bug("u"))?;
    if npsi <= 0.0 || nphi <= 0.0 {
        return Err(bug("degenerate"));
    }
    let t = rank_two_map(rho1.dim(), &psi, npsi, &tu, &phi, nphi, &tv)?;
    Ok((t, gap_u.min(gap_v)))
}

fn certificate(
    t: &Channel,
    rho1: &HermitianMatrix,
    rho2: &HermitianMatrix,
    rho1p: &HermitianMatrix,
    rho2p: &HermitianMatrix,
) -> Result<(Certificate, f64, f64)> {
    let i1 = t.apply(rho1)?;
    let i2 = t.apply(rho2)?;
    let (p1, p2) = (i1.trace(), i2.trace());
    let residuals = [op_norm(&(&i1 - &rho1p.scale(p1))), op_norm(&(&i2 - &rho2p.scale(p2)))];
    let choi_min_eig = t.to_choi().min_eigenvalue();
    Ok((Certificate { choi_min_eig, residuals }, p1, p2))
}

/// Builds a CP map with T(ρᵢ) = pᵢρᵢ′ when one exists. Infeasible inputs give
/// a result with `channel = None` and the reason in `feasibility`.
pub fn synthesize(
    rho1: &HermitianMatrix,
    rho2: &HermitianMatrix,
    rho1p: &HermitianMatrix,
    rho2p: &HermitianMatrix,
) -> Result<SynthesisResult> {
    let feas = feasibility(rho1, rho2, rho1p, rho2p)?;
    if !feas.feasible {
        return Ok(SynthesisResult {
            feasibility: feas,
            channel: None,
            p1: None,
            p2: None,
            branch: None,
            certificate: None,
            margin: None,
        });
    }
    let rank_tol = Tolerances::default().rank_tol;
    let d = rho1.dim();
    let (t, branch, margin) = if equal_states(rho1, rho2) || equal_states(rho1p, rho2p) {
        (Channel::constant(d, rho1p), SynthesisBranch::Constant, 1.0)
    } else if support_contained(rho1, rho2, rank_tol) {
        let (t, m) = inclusion_branch(rho1, rho2, rho1p, rho2p, rank_tol)?;
        (t, SynthesisBranch::SupportInclusion { swapped: false }, m)
    } else if support_contained(rho2, rho1, rank_tol) {
        let (t, m) = inclusion_branch(rho2, rho1, rho2p, rho1p, rank_tol)?;
        (t, SynthesisBranch::SupportInclusion { swapped: true }, m)
    } else {
        let (ker1, g1) = kernel(rho1, rank_tol);
        let (ker2, g2) = kernel(rho2, rank_tol);
        // ψ ∈ ker ρ₁ seen by ρ₂, φ ∈ ker ρ₂ seen by ρ₁.
        let (psi, _) = best_in_span(&ker1, rho2).ok_or_else(|| bug("rho1"))?;
        let (phi, _) = best_in_span(&ker2, rho1).ok_or_else(|| bug("rho2"))?;
        let t = rank_two_map(d, &phi, 1.0, rho1p, &psi, 1.0, rho2p)?;
        (t, SynthesisBranch::NoInclusion, g1.min(g2))
    };
    let (cert, p1, p2) = certificate(&t, rho1, rho2, rho1p, rho2p)?;
    Ok(SynthesisResult {
        feasibility: feas,
        channel: Some(t.with_label("synthesized")),
        p1: Some(p1),
        p2: Some(p2),
        branch: Some(branch),
        certificate: Some(cert),
        margin: Some(margin),
    })
}

/// Trace-preserving completion of a CP map with a flag qubit.
///
/// The system register has dimension max(d_in, d_out); both T(ρ) and BρB†
/// are embedded in its leading block. The output index is system·2 + flag.
#[derive(Clone, Debug)]
pub struct Instrument {
    pub channel: Channel,
    pub c: f64,
    pub b: HermitianMatrix,
    pub system_dim: usize,
    pub map_out_dim: usize,
}

fn embed(h: &HermitianMatrix, n: usize) -> HermitianMatrix {
    let d = h.dim();
    HermitianMatrix::from_fn(n, |i, j| if i < d && j < d { h.entry(i, j) } else { C64::new(0.0, 0.0) })
}

fn with_flag(h: &HermitianMatrix, flag: usize) -> HermitianMatrix {
    let n = h.dim();
    HermitianMatrix::from_fn(2 * n, |r, c| {
        if r % 2 == flag && c % 2 == flag {
            h.entry(r / 2, c / 2)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

impl Instrument {
    /// System block conditioned on the flag value (0 or 1), unnormalized.
    pub fn branch(&self, rho: &HermitianMatrix, flag: usize) -> Result<HermitianMatrix> {
        let out = self.channel.apply(rho)?;
        let n = self.system_dim;
        Ok(HermitianMatrix::from_fn(n, |i, j| out.entry(2 * i + flag, 2 * j + flag)))
    }

    pub fn success_probability(&self, rho: &HermitianMatrix) -> Result<f64> {
        Ok(self.branch(rho, 1)?.trace())
    }

    /// max ‖flag-1 block − c·T(ρ)‖ over the basis inputs.
    pub fn branch_error(&self, t: &Channel) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for e in crate::channels::hermitian_basis(t.in_dim()) {
            let got = self.branch(&e, 1)?;
            let want = embed(&t.apply(&e)?.scale(self.c), self.system_dim);
            worst = worst.max((&got - &want).max_abs());
        }
        Ok(worst)
    }
}

/// T̃(ρ) = c·T(ρ)⊗|1⟩⟨1| + BρB†⊗|0⟩⟨0| with c = 1/‖T*(I)‖∞, B = √(I − cT*(I)).
pub fn complete_to_instrument(t: &Channel) -> Result<Instrument> {
    if !t.is_completely_positive(CHOI_TOL) {
        return Err(Error::OutsideCone("map is not completely positive".into()));
    }
    let x = t.adjoint().apply(&HermitianMatrix::identity(t.out_dim()))?;
    let norm = op_norm(&x);
    if !(norm > 1e-14) {
        return Err(Error::InvalidArgument("the zero map has no instrument completion".into()));
    }
    let c = 1.0 / norm;
    let rest = (&HermitianMatrix::identity(t.in_dim()) - &x.scale(c)).psd_projection();
    let b = rest.sqrt_psd();
    let n = t.in_dim().max(t.out_dim());
    let channel = Channel::from_linear_map(t.in_dim(), 2 * n, |rho| {
        let yes = t.apply(rho).expect("dimension checked").scale(c);
        let no = rho.congruence(b.matrix());
        &with_flag(&embed(&yes, n), 1) + &with_flag(&embed(&no, n), 0)
    })?
    .with_label("instrument");
    Ok(Instrument {
        channel,
        c,
        b,
        system_dim: n,
        map_out_dim: t.out_dim(),
    })
}

/// Segment-image channel saturating the contraction bounds.
#[derive(Clone, Debug)]
pub struct OptimalityWitness {
    pub delta: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub channel: Channel,
    pub v: HermitianMatrix,
    pub c1: HermitianMatrix,
    pub c2: HermitianMatrix,
    pub mu: (f64, f64),
    /// h(c′₁, c′₂), the projective diameter of the channel.
    pub image_diameter: ExtendedReal,
    pub negativity_ratio: f64,
    pub negativity_ratio_closed: f64,
    pub base_norm_ratio: f64,
    pub base_norm_ratio_closed: f64,
    pub checks: Vec<CheckReport>,
}

impl OptimalityWitness {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// (e^{Δ/2} − √(λ₁/λ₂))² / (e^Δ − 1).
pub fn witness_negativity_ratio(delta: f64, lambda1: f64, lambda2: f64) -> f64 {
    let a = (0.5 * delta).exp() - (lambda1 / lambda2).sqrt();
    a * a / delta.exp_m1()
}

/// [λ₁ − λ₂ + 2(e^{Δ/2}√λ₂ − √λ₁)²/(e^Δ − 1)] / (λ₁ + λ₂).
pub fn witness_base_norm_ratio(delta: f64, lambda1: f64, lambda2: f64) -> f64 {
    let a = (0.5 * delta).exp() * lambda2.sqrt() - lambda1.sqrt();
    (lambda1 - lambda2 + 2.0 * a * a / delta.exp_m1()) / (lambda1 + lambda2)
}

fn basis_projector(d: usize, k: usize) -> HermitianMatrix {
    let mut diag = vec![0.0; d];
    diag[k] = 1.0;
    HermitianMatrix::from_diagonal(&diag)
}

/// Witness on the PSD cone: b₁ = |0⟩⟨0|, b₂ = |1⟩⟨1| on C^{d_in}, and a
/// measure-and-prepare channel whose image is the segment [c′₁, c′₂] with
/// c′ᵢ = (1 − μᵢ)|0⟩⟨0| + μᵢ|1⟩⟨1| on C^{d_out}.
pub fn optimality_witness(delta: f64, lambda1: f64, lambda2: f64, dims: (usize, usize)) -> Result<OptimalityWitness> {
    let (d_in, d_out) = dims;
    if d_in < 2 || d_out < 2 {
        return Err(Error::Dimension("witness needs dimension at least 2".into()));
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidArgument(format!("delta = {delta} must be positive and finite")));
    }
    if !(lambda2 > 0.0 && lambda1 >= lambda2 && lambda2 > (-delta).exp() * lambda1) {
        return Err(Error::InvalidArgument(format!(
            "need lambda1 >= lambda2 > exp(-delta) lambda1, got {lambda1}, {lambda2}"
        )));
    }
    let root = (lambda2 / lambda1).sqrt();
    let small_m = (-0.5 * delta).exp() * root;
    let big_m = (0.5 * delta).exp() * root;
    // μ₁/μ₂ = m and (1 − μ₁)/(1 − μ₂) = M.
    let mu2 = (big_m - 1.0) / (big_m - small_m);
    let mu1 = small_m * mu2;
    let p0 = basis_projector(d_out, 0);
    let p1 = basis_projector(d_out, 1);
    let c1 = &p0.scale(1.0 - mu1) + &p1.scale(mu1);
    let c2 = &p0.scale(1.0 - mu2) + &p1.scale(mu2);
    let (k1, k2) = (c1.clone(), c2.clone());
    let channel = Channel::from_linear_map(d_in, d_out, move |rho| {
        let first = rho.entry(0, 0).re;
        &k1.scale(first) + &k2.scale(rho.trace() - first)
    })?
    .with_label("optimality witness");
    let b1 = basis_projector(d_in, 0);
    let b2 = basis_projector(d_in, 1);
    let v = &b1.scale(lambda1) - &b2.scale(lambda2);
    let tv = channel.apply(&v)?;
    let psd = ConeSpec::Psd;
    let negativity_ratio = negativity(&psd, &tv)? / negativity(&psd, &v)?;
    let base_norm_ratio = base_norm(&psd, &tv)?.value / base_norm(&psd, &v)?.value;
    let negativity_ratio_closed = witness_negativity_ratio(delta, lambda1, lambda2);
    let base_norm_ratio_closed = witness_base_norm_ratio(delta, lambda1, lambda2);
    let image_diameter = hilbert_distance(&psd, &c1, &c2)?;
    let checks = vec![
        CheckReport::equal("witness negativity ratio vs closed form", negativity_ratio, negativity_ratio_closed, 1e-8, CheckStatus::Certified),
        CheckReport::equal("witness base-norm ratio vs closed form", base_norm_ratio, base_norm_ratio_closed, 1e-8, CheckStatus::Certified),
        CheckReport::equal("witness image diameter vs prescribed", image_diameter.value(), delta, 1e-9 * (1.0 + delta), CheckStatus::Certified),
    ];
    Ok(OptimalityWitness {
        delta,
        lambda1,
        lambda2,
        channel,
        v,
        c1,
        c2,
        mu: (mu1, mu2),
        image_diameter,
        negativity_ratio,
        negativity_ratio_closed,
        base_norm_ratio,
        base_norm_ratio_closed,
        checks,
    })
}
