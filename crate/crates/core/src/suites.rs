//! Seeded verification sweeps and worked-example demos.
//!
//! Each suite draws `n` instances from a seeded generator (instance `k` uses
//! `derive_seed(seed, k)`), runs the matching checks and collects the
//! reports. Identical configurations give identical reports.

use std::collections::BTreeMap;
use std::fmt;

use crate::channels::{
    adjoint_diameter_check, depolarizing, diameter_depolarizing, spectral_bound_check, Channel, DiameterEstimate,
    SampleOptions,
};
use crate::cones::{hilbert_distance, member, ConeSpec, ExtendedReal};
use crate::inequalities::{
    base_norm_contraction_check, base_norm_distance_contraction_check, base_norm_hilbert_chain, chernoff_check,
    conjecture_probe, dist_norm_contraction_check, dist_norm_hilbert_chain, ensemble_negativity_check,
    fidelity_bounds_check, finite_time_cone_entry_check, negativity_contraction_check, Branch,
};
use crate::linalg::{partial_transpose, BipartiteShape, CMatrix, HermitianMatrix, C64};
use crate::norms::{base_norm, dist_norm, duality_report, MeasurementSet, NormMethod};
use crate::qubit::{qubit_diameter, restriction_demo, RestrictionCase};
use crate::random::{derive_seed, random_density, random_hermitian, random_kraus, random_psd, rng, SeededRng};
use crate::report::{CheckReport, CheckStatus};
use crate::sdp::{conv_base_norm, AdmmSettings};
use crate::synthesis::optimality_witness;
use crate::{Error, Result};
use rand::Rng;

pub const SUITES: [&str; 15] = [
    "prop7",
    "prop8",
    "cor9",
    "prop10",
    "cor11",
    "prop13",
    "prop16",
    "fidelity",
    "chernoff",
    "conjecture",
    "birkhoff",
    "spectral",
    "lemma17",
    "duality",
    "additivity",
];

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteConfig {
    pub n: usize,
    pub seed: u64,
    /// Hilbert-space dimensions drawn in turn; perfect squares ≥ 4 also get
    /// PPT-cone instances with the matching bipartite shape.
    pub dims: Vec<usize>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            n: 50,
            seed: 0,
            dims: vec![2, 3, 4],
        }
    }
}

#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub name: String,
    pub rows: Vec<CheckReport>,
    pub notes: Vec<String>,
}

/// Rows grouped by context and status.
#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub context: String,
    pub status: CheckStatus,
    pub total: usize,
    pub failed: usize,
    pub min_slack: f64,
}

fn status_rank(s: CheckStatus) -> u8 {
    match s {
        CheckStatus::Certified => 0,
        CheckStatus::Advisory => 1,
        CheckStatus::Exploratory => 2,
        CheckStatus::NotApplicable => 3,
    }
}

impl SuiteReport {
    fn new(name: &str) -> Self {
        SuiteReport {
            name: name.to_string(),
            rows: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn certified_failures(&self) -> usize {
        self.rows.iter().filter(|r| r.is_certified_failure()).count()
    }

    pub fn count(&self, status: CheckStatus) -> usize {
        self.rows.iter().filter(|r| r.status == status).count()
    }

    pub fn failures(&self, status: CheckStatus) -> usize {
        self.rows.iter().filter(|r| r.status == status && !r.passed).count()
    }

    /// Smallest slack among rows with the given status (∞ when none).
    pub fn min_slack(&self, status: CheckStatus) -> f64 {
        self.rows
            .iter()
            .filter(|r| r.status == status && !r.slack.is_nan())
            .map(|r| r.slack)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn passed(&self) -> bool {
        self.certified_failures() == 0
    }

    pub fn summary(&self) -> Vec<SummaryRow> {
        let mut groups: BTreeMap<(u8, String), SummaryRow> = BTreeMap::new();
        for r in &self.rows {
            let e = groups.entry((status_rank(r.status), r.context.clone())).or_insert(SummaryRow {
                context: r.context.clone(),
                status: r.status,
                total: 0,
                failed: 0,
                min_slack: f64::INFINITY,
            });
            e.total += 1;
            if !r.passed {
                e.failed += 1;
            }
            if !r.slack.is_nan() {
                e.min_slack = e.min_slack.min(r.slack);
            }
        }
        groups.into_values().collect()
    }

    fn push_tagged(&mut self, rows: Vec<CheckReport>, tag: &str) {
        for mut r in rows {
            r.context = format!("{} [{tag}]", r.context);
            self.rows.push(r);
        }
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "suite {}: {} checks", self.name, self.rows.len())?;
        writeln!(f, "{:<6} {:<14} {:>6} {:>6} {:>12}  context", "result", "status", "total", "failed", "min slack")?;
        for s in self.summary() {
            let verdict = match (s.status, s.failed) {
                (CheckStatus::NotApplicable, _) => "n/a",
                (_, 0) => "PASS",
                _ => "FAIL",
            };
            let slack = if s.min_slack.is_finite() {
                format!("{:.3e}", s.min_slack)
            } else if s.min_slack == f64::INFINITY && s.status != CheckStatus::NotApplicable {
                "inf".to_string()
            } else {
                "-".to_string()
            };
            writeln!(
                f,
                "{:<6} {:<14} {:>6} {:>6} {:>12}  {}",
                verdict,
                format!("{:?}", s.status),
                s.total,
                s.failed,
                slack,
                s.context
            )?;
        }
        for n in &self.notes {
            writeln!(f, "note: {n}")?;
        }
        write!(
            f,
            "certified failures: {} (advisory failures {}, exploratory failures {})",
            self.certified_failures(),
            self.failures(CheckStatus::Advisory),
            self.failures(CheckStatus::Exploratory)
        )
    }
}

/// Runs one named suite.
pub fn run_suite(name: &str, cfg: &SuiteConfig) -> Result<SuiteReport> {
    if cfg.dims.is_empty() || cfg.dims.iter().any(|d| *d < 2) {
        return Err(Error::InvalidArgument("dims must be a non-empty list of values >= 2".into()));
    }
    let f: fn(&SuiteConfig, &mut SuiteReport) -> Result<()> = match name {
        "prop7" => suite_prop7,
        "prop8" => suite_prop8,
        "cor9" => suite_cor9,
        "prop10" => suite_prop10,
        "cor11" => suite_cor11,
        "prop13" => suite_prop13,
        "prop16" => suite_prop16,
        "fidelity" => suite_fidelity,
        "chernoff" => suite_chernoff,
        "conjecture" => suite_conjecture,
        "birkhoff" => suite_birkhoff,
        "spectral" => suite_spectral,
        "lemma17" => suite_lemma17,
        "duality" => suite_duality,
        "additivity" => suite_additivity,
        other => return Err(Error::InvalidArgument(format!("unknown suite '{other}'"))),
    };
    let mut rep = SuiteReport::new(name);
    f(cfg, &mut rep)?;
    Ok(rep)
}

// ---------------------------------------------------------------- generators

/// d1×d2 with d1 = d2 when d is a perfect square ≥ 4.
pub fn square_shape(d: usize) -> Option<BipartiteShape> {
    let a = (d as f64).sqrt().round() as usize;
    if a >= 2 && a * a == d {
        BipartiteShape::new(a, a).ok()
    } else {
        None
    }
}

struct Instance {
    rng: SeededRng,
    d: usize,
    /// PPT cone when the instance is bipartite, else PSD.
    cone: ConeSpec,
    tag: String,
}

fn instance(cfg: &SuiteConfig, k: usize) -> Instance {
    let d = cfg.dims[k % cfg.dims.len()];
    let r = rng(derive_seed(cfg.seed, k as u64));
    // every other square-dimensional instance uses the PPT cone
    let cone = match square_shape(d) {
        Some(s) if (k / cfg.dims.len()) % 2 == 1 => ConeSpec::Ppt(s),
        _ => ConeSpec::Psd,
    };
    let tag = format!("{} d={d}", cone.name());
    Instance { rng: r, d, cone, tag }
}

/// Full-rank state inside `cone`: PSD states, or separable mixtures of two
/// product states plus white noise for the PPT cone.
fn state_in(cone: &ConeSpec, d: usize, r: &mut SeededRng) -> HermitianMatrix {
    match cone.shape() {
        Some(s) => {
            let a = random_density(s.d1, r).kron(&random_density(s.d2, r));
            let b = random_density(s.d1, r).kron(&random_density(s.d2, r));
            let w: f64 = r.random_range(0.0..1.0);
            let mix = &a.scale(w) + &b.scale(1.0 - w);
            &mix.scale(0.9) + &HermitianMatrix::identity(d).scale(0.1 / d as f64)
        }
        None => random_density(d, r),
    }
}

/// Depolarizing channel towards a random full-rank state of the cone, with
/// its closed-form diameter.
fn closed_form_channel(cone: &ConeSpec, d: usize, r: &mut SeededRng) -> Result<(Channel, DiameterEstimate, f64)> {
    let p: f64 = r.random_range(0.05..0.95);
    let sigma = state_in(cone, d, r);
    let t = depolarizing(p, &sigma)?;
    let delta = diameter_depolarizing(p, &sigma, cone)?;
    Ok((t, delta, p))
}

/// (1 + a)ρ₁ − aρ₂ with unit trace and typically a negative part.
fn unit_trace_vector(cone: &ConeSpec, d: usize, r: &mut SeededRng) -> HermitianMatrix {
    let a: f64 = r.random_range(0.0..3.0);
    let r1 = random_density(d, r);
    let r2 = match cone {
        ConeSpec::Ppt(_) => crate::random::random_pure_state(d, r),
        _ => random_density(d, r),
    };
    &r1.scale(1.0 + a) - &r2.scale(a)
}

/// Random unitary exp(iH).
fn random_unitary(d: usize, r: &mut SeededRng) -> CMatrix {
    let h = random_hermitian(d, r);
    let sys = h.eigh();
    let v = &sys.vectors;
    let phases = CMatrix::from_fn(d, d, |i, j| {
        if i == j {
            C64::from_polar(1.0, sys.values[i])
        } else {
            C64::new(0.0, 0.0)
        }
    });
    &(v * &phases) * &v.adjoint()
}

/// Mixture of unitary conjugations (unital, so its diameter is exact on
/// qubits).
fn random_unital_qubit(r: &mut SeededRng) -> Result<Channel> {
    let k = r.random_range(1..4usize);
    let mut w: Vec<f64> = (0..k).map(|_| r.random_range(0.1..1.0)).collect();
    let s: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= s);
    let kraus: Vec<CMatrix> = w
        .iter()
        .map(|q| random_unitary(2, r).scale(C64::new(q.sqrt(), 0.0)))
        .collect();
    Channel::from_kraus(&kraus)
}

fn opts(seed: u64) -> SampleOptions {
    SampleOptions {
        n_samples: 16,
        n_refine: 1,
        seed,
        partitions: 1,
    }
}

// ---------------------------------------------------------------- suites

fn suite_prop7(cfg: &SuiteConfig, rep: &mut SuiteReport) -> Result<()> {
    for k in 0..cfg.n {
        let mut it = instance(cfg, k);
        let b1 = state_in(&it.cone, it.d, &mut it.rng);
        let b2 = state_in(&it.cone, it.d, &mut it.rng);
        rep.push_tagged(base_norm_hilbert_chain(&it.cone, &b1, &b2)?, &it.tag);
        if let ConeSpec::Ppt(s) = it.cone {
            rep.push_tagged(dist_norm_hilbert_chain(&MeasurementSet::Ppt(s), &b1, &b2)?, &it.tag);
        }
    }
    Ok(())
}

fn suite_prop8(cfg: &SuiteConfig, rep: &mut SuiteReport) -> Result<()> {
    for k in 0..cfg.n {
        let mut it = instance(cfg, k);
        let (t, delta, _) = closed_form_channel(&it.cone, it.d, &mut it.rng)?;
        let v = unit_trace_vector(&it.cone, it.d, &mut it.rng).scale(it.rng.random_range(0.1..3.0));
        rep.push_tagged(vec![negativity_contraction_check(&t, &it.cone, &it.cone, &v, &delta)?], &it.tag);
    }
    Ok(())
}

fn suite_cor9(cfg: &SuiteConfig, rep: &mut SuiteReport) -> Result<()> {
    for k in 0..cfg.n {
        let mut it = instance(cfg, k);
        let (t, delta, _) = closed_form_channel(&it.cone, it.d, &mut it.rng)?;
        let v1 = unit_trace_vector(&it.cone, it.d, &mut it.rng);
        let v2 = if k % 2 == 0 {
            state_in(&it.cone, it.d, &mut it.rng)
        } else {
            unit_trace_vector(&it.cone, it.d, &mut it.rng)
        };
        rep.push_tagged(
            vec![base_norm_distance_contraction_check(&t, &it.cone, &it.cone, &v1, &v2, &delta)?],
            &it.tag,
        );
    }
    Ok(())
}

fn suite_prop10(cfg: &SuiteConfig, rep: &mut SuiteReport) -> Result<()> {
    for k in 0..cfg.n {
        let mut it = instance(cfg, k);
        let (t, delta, _) = closed_form_channel(&it.cone, it.d, &mut it.rng)?;
        let v = unit_trace_vector(&it.cone, it.d, &mut it.rng);
        rep.push_tagged(base_norm_contraction_check(&t, &it.cone, &it.cone, &v, &delta)?, &it.tag);
    }
    Ok(())
}

/// The qubit instance T = depolarizing(1/2, I/2), v = diag(2, −1).
pub fn finite_time_worked_instance() -> Result<crate::inequalities::FiniteTimeReport> {
    let half = HermitianMatrix::identity(2).scale(0.5);
    let t = depolarizing(0.5, &half)?;
    let delta = diameter_depolarizing(0.5, &half, &ConeSpec::Psd)?;
    let v = HermitianMatrix::from_diagonal(&[2.0, -1.0]);
    finite_time_cone_entry_check(&t, &ConeSpec::Psd, &v, &delta)
}

fn suite_cor11(cfg: &SuiteConfig, rep: &mut SuiteReport) -> Result<()> {
    let worked = finite_time_worked_instance()?;
    rep.notes.push(format!(
        "worked qubit instance: enters the cone at n = {:?}, bound ceil(n1) = {}",
        worked.entry_step,
        worked.n1.ceil()
    ));
    rep.push_tagged(worked.checks, "worked qubit instance");
    for k in 0..cfg.n {
        let mut it = instance(cfg, k);
        let (t, delta, _) = closed_form_channel(&it.cone, it.d, &mut it.rng)?;
        let v = unit_trace_vector(&it.cone, it.d, &mut it.rng);
        rep.push_tagged(finite_time_cone_entry_check(&t, &it.cone, &v, &delta)?.checks, &it.tag);
    }
    Ok(())
}

fn suite_prop13(cfg: &SuiteConfig, rep: &mut SuiteReport) -> Result<()> {
    for k in 0..cfg.n {
        let mut it = instance(cfg, k);
        let nb = it.rng.random_range(2..4usize);
        let mut w: Vec<f64> = (0..nb).map(|_| it.rng.random_range(0.1..1.0)).collect();
        // every third instance loses some weight (Σ pᵢ < 1)
        let total: f64 = w.iter().sum::<f64>() / if k % 3 == 0 { 0.8 } else { 1.0 };
        w.iter_mut().for_each(|x| *x /= total);
        let mut branches = Vec::new();
        for q in &w {
            let (t, delta, _) = closed_form_channel(&it.cone, it.d, &mut it.rng)?;
            branches.push(Branch {
                map: t.scale(*q),
                cone_out: it.cone,
                delta,
            });
        }
        let v = unit_trace_vector(&it.cone, it.d, &mut it.rng);
        rep.push_tagged(ensemble_negativity_check(&branches, &it.cone, &v)?, &it.tag);
    }
    Ok(())
}

fn suite_prop16(cfg: &SuiteConfig, rep: &mut SuiteReport) -> Result<()> {
    for k in 0..cfg.n {
        let mut it = instance(cfg, k);
        let (t, delta, _) = closed_form_channel(&it.cone, it.d, &mut it.rng)?;
        let m = match it.cone {
            ConeSpec::Ppt(s) => MeasurementSet::Ppt(s),
            _ => MeasurementSet::Plus,
        };
        let v1 = random_density(it.d, &mut it.rng);
        let v2 = random_density(it.d, &mut it.rng);
        let seed = derive_seed(cfg.seed ^ 0x16, k as u64);
        let tag = format!("{} d={}", m.name(), it.d);
        rep.push_tagged(dist_norm_contraction_check(&t, &m, &m, &v1, &v2, &delta, 8, seed)?, &tag);
    }
    Ok(())
}

fn suite_pairs(cfg: &SuiteConfig, rep: &mut SuiteReport, f: impl Fn(&HermitianMatrix, &HermitianMatrix) -> Result<Vec<CheckReport>>) -> Result<()> {
    for k in 0..cfg.n {
        let d = cfg.dims[k % cfg.dims.len()];
        let mut r = rng(derive_seed(cfg.seed, k as u64));
        let a = random_density(d, &mut r);
        let b = random_density(d, &mut r);
        rep.push_tagged(f(&a, &b)?, &format!("d={d}"));
    }
    Ok(())
}

fn suite_fidelity(cfg: &SuiteConfig, rep: &mut SuiteReport) -> Result<()> {
    suite_pairs(cfg, rep, fidelity_bounds_check)
}

fn suite_chernoff(cfg: &SuiteConfig, rep: &mut SuiteReport) -> Result<()> {
    suite_pairs(cfg, rep, |a, b| Ok(vec![chernoff_check(a, b)?]))
}

fn suite_conjecture(cfg: &SuiteConfig, rep: &mut SuiteReport) -> Result<()> {
    suite_pairs(cfg, rep, |a, b| Ok(vec![conjecture_probe(a, b)?]))?;
    rep.notes.push("exploratory probe of an unproven strengthening; never counts as a failure".into());
    Ok(())
}

fn birkhoff_row(t: &Channel, cone: &ConeSpec, delta: &DiameterEstimate, a: &HermitianMatrix, b: &HermitianMatrix) -> Result<CheckReport> {
    let h_in = hilbert_distance(cone, a, b)?;
    let h_out = hilbert_distance(cone, &t.apply(a)?, &t.apply(b)?)?;
    let k = crate::channels::birkhoff_coefficient(delta.certifying_value());
    let rhs = match h_in {
        ExtendedReal::Infinite => f64::INFINITY,
        ExtendedReal::Finite(h) => k * h,
    };
    let status = if delta.is_certified() {
        CheckStatus::Certified
    } else {
        CheckStatus::Advisory
    };
    Ok(CheckReport::less_eq(
        "h(T(a),T(b)) <= tanh(D/4) h(a,b)",
        h_out.value(),
        rhs,
        1e-9 * (1.0 + rhs.min(1e6)),
        status,
    ))
}

fn suite_birkhoff(cfg: &SuiteConfig, rep: &mut SuiteReport) -> Result<()> {
    for k in 0..cfg.n {
        let mut it = instance(cfg, k);
        let (t, delta, _) = closed_form_channel(&it.cone, it.d, &mut it.rng)?;
        let a = state_in(&it.cone, it.d, &mut it.rng);
        let b = state_in(&it.cone, it.d, &mut it.rng);
        rep.push_tagged(vec![birkhoff_row(&t, &it.cone, &delta, &a, &b)?], &format!("depolarizing {}", it.tag));
        if it.d == 2 {
            let u = random_unital_qubit(&mut it.rng)?;
            let du = qubit_diameter(&u, &SampleOptions::default())?;
            rep.push_tagged(vec![birkhoff_row(&u, &ConeSpec::Psd, &du, &a, &b)?], "unital qubit");
        }
    }
    Ok(())
}

fn suite_spectral(cfg: &SuiteConfig, rep: &mut SuiteReport) -> Result<()> {
    for &d in &cfg.dims {
        let sigma = HermitianMatrix::identity(d).scale(1.0 / d as f64);
        for p in [0.25, 0.5, 0.75] {
            let t = depolarizing(p, &sigma)?;
            let delta = diameter_depolarizing(p, &sigma, &ConeSpec::Psd)?;
            let (dev, ones) = spectrum_deviation(&t, p)?;
            let tag = format!("d={d} p={p}");
            rep.push_tagged(
                vec![
                    CheckReport::equal("spectrum = {1} u {p x (d^2-1)}: max deviation", dev, 0.0, 1e-7, CheckStatus::Certified),
                    CheckReport::equal("eigenvalue 1 appears once", ones as f64, 1.0, 0.0, CheckStatus::Certified),
                    spectral_bound_check(&t, &ConeSpec::Psd, &delta)?,
                ],
                &tag,
            );
            let k = crate::channels::birkhoff_coefficient(delta.certifying_value());
            if (k - p).abs() <= 1e-12 {
                rep.notes.push(format!("{tag}: p = tanh(D/4) with equality"));
            }
        }
    }
    for k in 0..cfg.n {
        let mut it = instance(cfg, k);
        let (t, delta, _) = closed_form_channel(&ConeSpec::Psd, it.d, &mut it.rng)?;
        rep.push_tagged(vec![spectral_bound_check(&t, &ConeSpec::Psd, &delta)?], &format!("random sigma d={}", it.d));
    }
    Ok(())
}

/// Max distance of the non-unit eigenvalues from p, and the count of
/// eigenvalues within 1e-7 of 1.
fn spectrum_deviation(t: &Channel, p: f64) -> Result<(f64, usize)> {
    let mut spec = t.spectrum()?;
    spec.sort_by(|a, b| (b - C64::new(1.0, 0.0)).norm().total_cmp(&(a - C64::new(1.0, 0.0)).norm()).reverse());
    let ones = spec.iter().filter(|z| (*z - C64::new(1.0, 0.0)).norm() <= 1e-7).count();
    let dev = spec[1..].iter().map(|z| (z - C64::new(p, 0.0)).norm()).fold(0.0, f64::max);
    let dev = dev.max((spec[0] - C64::new(1.0, 0.0)).norm());
    Ok((dev, ones))
}

fn suite_lemma17(cfg: &SuiteConfig, rep: &mut SuiteReport) -> Result<()> {
    for k in 0..cfg.n {
        let mut it = instance(cfg, k);
        let d = it.d;
        let t = Channel::from_kraus(&random_kraus(d, d, 1 + k % 3, &mut it.rng))?;
        let adj = t.adjoint();
        let tag = format!("random channel d={d}");
        // (c) trace preservation ⟺ T*(I) = I
        let star = adj.apply(&HermitianMatrix::identity(d))?;
        let mut rows = vec![CheckReport::equal(
            "(c) ||T*(I) - I|| for trace-preserving T",
            (&star - &HermitianMatrix::identity(d)).max_abs(),
            0.0,
            1e-9,
            CheckStatus::Certified,
        )];
        // (c) converse direction on a non-trace-preserving scaling
        let half = t.scale(0.5);
        rows.push(CheckReport::equal(
            "(c) T*(I) = I iff T trace-preserving (scaled map)",
            if half.is_trace_preserving(1e-9) { 1.0 } else { 0.0 },
            if (&half.adjoint().apply(&HermitianMatrix::identity(d))? - &HermitianMatrix::identity(d)).max_abs() <= 1e-9 {
                1.0
            } else {
                0.0
            },
            0.0,
            CheckStatus::Certified,
        ));
        // (a) T* keeps psd operators psd
        let x = random_psd(d, &mut it.rng);
        let y = adj.apply(&x)?;
        rows.push(CheckReport::less_eq(
            "(a) -min eig T*(X) <= 0 for psd X",
            -y.min_eigenvalue(),
            0.0,
            1e-9 * (1.0 + x.max_abs()),
            CheckStatus::Certified,
        ));
        // (b) equal diameters, sampled
        if k % 10 == 0 {
            rows.push(adjoint_diameter_check(&t, &ConeSpec::Psd, &opts(derive_seed(cfg.seed, k as u64)))?);
        }
        rep.push_tagged(rows, &tag);
    }
    rep.notes.push("(b) compares two sampled diameters and is advisory".into());
    Ok(())
}

/// Duality rows for one difference of states, plus checks of the explicit
/// decomposition c₊ − c₋ = v behind the base-norm value.
pub fn duality_rows(v: &HermitianMatrix, s: BipartiteShape) -> Result<Vec<CheckReport>> {
    let mut rows = Vec::new();
    for m in [MeasurementSet::Ppt(s), MeasurementSet::PptPlus(s)] {
        rows.extend(duality_report(v, &m)?);
        let cone = m.dual_cone();
        let b = base_norm(&cone, v)?;
        let tol = match b.method {
            NormMethod::ClosedForm => 1e-9 * (1.0 + b.value),
            NormMethod::ConicSolver => 10.0 * crate::Tolerances::default().solver_tol * (1.0 + b.value),
        };
        if let Some((cp, cm)) = &b.decomposition {
            rows.push(CheckReport::equal(
                format!("{}: tr c+ + tr c- vs base norm", m.name()),
                cp.trace() + cm.trace(),
                b.value,
                tol,
                CheckStatus::Certified,
            ));
            rows.push(CheckReport::equal(
                format!("{}: ||c+ - c- - v||", m.name()),
                (&(cp - cm) - v).max_abs(),
                0.0,
                tol,
                CheckStatus::Certified,
            ));
            let inside = match cone {
                // parts of the solver decomposition are checked below
                ConeSpec::ConvPsdPpt(_) => true,
                _ => member(&cone, cp, tol)? && member(&cone, cm, tol)?,
            };
            rows.push(CheckReport::equal(
                format!("{}: c+ and c- in the cone", m.name()),
                if inside { 1.0 } else { 0.0 },
                1.0,
                0.0,
                CheckStatus::Certified,
            ));
        }
    }
    // c± = P± + Q±^T1 with all four blocks psd
    let sol = conv_base_norm(v, s, &AdmmSettings::default())?;
    let scale = 1.0 + sol.bracket.upper;
    let min_eig = sol.parts.iter().map(|b| b.min_eigenvalue()).fold(f64::INFINITY, f64::min);
    rows.push(CheckReport::less_eq(
        "CONV decomposition: -min eig of the psd blocks",
        -min_eig,
        0.0,
        1e-12 * scale,
        CheckStatus::Certified,
    ));
    let rebuilt = [(&sol.parts[0], &sol.parts[2], &sol.c_plus), (&sol.parts[1], &sol.parts[3], &sol.c_minus)]
        .iter()
        .map(|(p, q, c)| Ok((&(*p + &partial_transpose(q, s)?) - *c).max_abs()))
        .collect::<Result<Vec<f64>>>()?;
    rows.push(CheckReport::equal(
        "CONV decomposition: ||P + Q^T1 - c||",
        rebuilt.into_iter().fold(0.0, f64::max),
        0.0,
        1e-12 * scale,
        CheckStatus::Certified,
    ));
    // measurement side: the solver's effect E must satisfy 0 <= E, E^T1 <= I
    let e = &sol.witness;
    let id = HermitianMatrix::identity(v.dim());
    let et = partial_transpose(e, s)?;
    let worst = [e.clone(), &id - e, et.clone(), &id - &et]
        .iter()
        .map(|b| b.min_eigenvalue())
        .fold(f64::INFINITY, f64::min);
    rows.push(CheckReport::less_eq(
        "M_PPT_PLUS witness: -min eig of E, I-E, E^T1, I-E^T1",
        -worst,
        0.0,
        1e-9,
        CheckStatus::Certified,
    ));
    let bias = (&e.scale(2.0) - &id).inner(v);
    rows.push(CheckReport::equal(
        "M_PPT_PLUS distinguishability norm vs CONV base norm",
        bias,
        sol.c_plus.trace() + sol.c_minus.trace(),
        1e-4,
        CheckStatus::Certified,
    ));
    Ok(rows)
}

fn suite_duality(cfg: &SuiteConfig, rep: &mut SuiteReport) -> Result<()> {
    let mut shapes: Vec<BipartiteShape> = cfg.dims.iter().filter_map(|d| square_shape(*d)).collect();
    if shapes.is_empty() {
        shapes = vec![BipartiteShape::new(2, 2)?, BipartiteShape::new(3, 3)?];
        rep.notes.push("no square dimension given; using 2x2 and 3x3".into());
    }
    for k in 0..cfg.n {
        let s = shapes[k % shapes.len()];
        let mut r = rng(derive_seed(cfg.seed, k as u64));
        let a = random_density(s.dim(), &mut r);
        let b = random_density(s.dim(), &mut r);
        rep.push_tagged(duality_rows(&(&a - &b), s)?, &format!("{}x{}", s.d1, s.d2));
    }
    Ok(())
}

fn suite_additivity(cfg: &SuiteConfig, rep: &mut SuiteReport) -> Result<()> {
    let psd = ConeSpec::Psd;
    for k in 0..cfg.n {
        let d1 = cfg.dims[k % cfg.dims.len()];
        let d2 = cfg.dims[(k / cfg.dims.len()) % cfg.dims.len()];
        let mut r = rng(derive_seed(cfg.seed, k as u64));
        let (a1, b1) = (random_psd(d1, &mut r), random_psd(d1, &mut r));
        let (a2, b2) = (random_psd(d2, &mut r), random_psd(d2, &mut r));
        let joint = hilbert_distance(&psd, &a1.kron(&a2), &b1.kron(&b2))?.value();
        let sum = hilbert_distance(&psd, &a1, &b1)?.value() + hilbert_distance(&psd, &a2, &b2)?.value();
        rep.push_tagged(
            vec![CheckReport::equal("h(A1(x)A2, B1(x)B2) = h(A1,B1) + h(A2,B2)", joint, sum, 1e-8, CheckStatus::Certified)],
            &format!("{d1}x{d2}"),
        );
    }
    Ok(())
}

// ---------------------------------------------------------------- demos

pub const DEMOS: [&str; 4] = ["data_hiding", "werner_diameters", "qubit_restriction", "optimality"];

/// Swap operator F|ij⟩ = |ji⟩ on C^d ⊗ C^d.
pub fn swap_operator(d: usize) -> HermitianMatrix {
    HermitianMatrix::from_fn(d * d, |r, c| {
        let (i, j) = (r / d, r % d);
        let (k, l) = (c / d, c % d);
        if i == l && j == k {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Werner state p·P_sym/d_s + (1 − p)·P_anti/d_a.
pub fn werner(d: usize, p: f64) -> HermitianMatrix {
    let id = HermitianMatrix::identity(d * d);
    let f = swap_operator(d);
    let sym = (&id + &f).scale(0.5);
    let anti = (&id - &f).scale(0.5);
    let ds = (d * (d + 1) / 2) as f64;
    let da = (d * (d - 1) / 2) as f64;
    &sym.scale(p / ds) + &anti.scale((1.0 - p) / da)
}

#[derive(Clone, Debug)]
pub struct DemoOptions {
    pub d: usize,
    pub p1: f64,
    pub p2: f64,
    /// Depolarizing strength for the Werner diameter scan.
    pub p: f64,
    /// Number of q values in the Werner scan over [1/2, 1].
    pub q_steps: usize,
    pub delta: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub sample: SampleOptions,
}

impl Default for DemoOptions {
    fn default() -> Self {
        DemoOptions {
            d: 3,
            p1: 0.9,
            p2: 0.4,
            p: 0.5,
            q_steps: 13,
            delta: 1.0,
            lambda1: 1.0,
            lambda2: 1.0,
            sample: SampleOptions::default(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct DemoReport {
    pub title: String,
    pub lines: Vec<String>,
    pub checks: Vec<CheckReport>,
}

impl DemoReport {
    pub fn certified_failures(&self) -> usize {
        self.checks.iter().filter(|c| c.is_certified_failure()).count()
    }
}

impl fmt::Display for DemoReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.title)?;
        for l in &self.lines {
            writeln!(f, "  {l}")?;
        }
        for c in &self.checks {
            writeln!(f, "  {c}")?;
        }
        write!(f, "certified failures: {}", self.certified_failures())
    }
}

pub fn run_demo(name: &str, o: &DemoOptions) -> Result<DemoReport> {
    match name {
        "data_hiding" => data_hiding(o.d, o.p1, o.p2),
        "werner_diameters" => werner_diameters_demo(o),
        "qubit_restriction" => qubit_restriction_demo(&o.sample),
        "optimality" => optimality_demo(o.delta, o.lambda1, o.lambda2),
        other => Err(Error::InvalidArgument(format!("unknown demo '{other}'"))),
    }
}

#[derive(Clone, Debug)]
pub struct DataHiding {
    pub trace_norm: f64,
    pub ppt_norm: f64,
    pub ppt_plus_norm: f64,
    pub ppt_plus_lower: f64,
}

/// The three distinguishability norms of the difference of two Werner states.
pub fn data_hiding_norms(d: usize, p1: f64, p2: f64) -> Result<DataHiding> {
    let s = BipartiteShape::new(d, d)?;
    let v = &werner(d, p1) - &werner(d, p2);
    let plus = dist_norm(&MeasurementSet::PptPlus(s), &v)?;
    Ok(DataHiding {
        trace_norm: dist_norm(&MeasurementSet::Plus, &v)?.value,
        ppt_norm: dist_norm(&MeasurementSet::Ppt(s), &v)?.value,
        ppt_plus_norm: plus.value,
        ppt_plus_lower: plus.lower,
    })
}

fn data_hiding(d: usize, p1: f64, p2: f64) -> Result<DemoReport> {
    if d < 2 || !(0.0..=1.0).contains(&p1) || !(0.0..=1.0).contains(&p2) {
        return Err(Error::InvalidArgument("need d >= 2 and p1, p2 in [0, 1]".into()));
    }
    let n = data_hiding_norms(d, p1, p2)?;
    let dp = (p1 - p2).abs();
    let df = d as f64;
    let mut lines = vec![
        format!("Werner states d={d}, p1={p1}, p2={p2}"),
        format!("trace norm        {:.6}   (2|p1-p2| = {:.6})", n.trace_norm, 2.0 * dp),
        format!("M_PPT norm        {:.6}   (4|p1-p2|/d = {:.6})", n.ppt_norm, 4.0 * dp / df),
        format!(
            "M_PPT_PLUS norm   {:.6}   (4|p1-p2|/(d+1) = {:.6}; certified bracket [{:.6}, {:.6}])",
            n.ppt_plus_norm,
            4.0 * dp / (df + 1.0),
            n.ppt_plus_lower,
            n.ppt_plus_norm
        ),
    ];
    let mut checks = vec![
        CheckReport::equal("trace norm vs 2|p1-p2|", n.trace_norm, 2.0 * dp, 1e-10, CheckStatus::Certified),
        CheckReport::equal("M_PPT norm vs 4|p1-p2|/d", n.ppt_norm, 4.0 * dp / df, 1e-10, CheckStatus::Certified),
        CheckReport::equal("M_PPT_PLUS norm vs 4|p1-p2|/(d+1)", n.ppt_plus_norm, 4.0 * dp / (df + 1.0), 1e-4, CheckStatus::Certified),
    ];
    // Hilbert-metric bounds on the maximal bias, one per measurement set.
    let (w1, w2) = (werner(d, p1), werner(d, p2));
    let s = BipartiteShape::new(d, d)?;
    for m in [MeasurementSet::Plus, MeasurementSet::Ppt(s), MeasurementSet::PptPlus(s)] {
        match dist_norm_hilbert_chain(&m, &w1, &w2) {
            Ok(rows) => {
                let bound = rows.last().map(|r| r.rhs).unwrap_or(f64::NAN);
                lines.push(format!("{}: half the norm is at most tanh(h/4) = {:.6}", m.name(), bound));
                for mut r in rows {
                    r.context = format!("{} [{}]", r.context, m.name());
                    checks.push(r);
                }
            }
            Err(Error::OutsideCone(msg)) => {
                lines.push(format!("{}: Hilbert bound not applicable ({msg})", m.name()));
                checks.push(CheckReport::not_applicable(format!("{} Hilbert bound: a state lies outside the cone", m.name())));
            }
            Err(e) => return Err(e),
        }
    }
    Ok(DemoReport {
        title: "data hiding with Werner states".into(),
        lines,
        checks,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct WernerRow {
    pub q: f64,
    pub psd: DiameterEstimate,
    pub ppt: DiameterEstimate,
}

/// Diameters of depolarizing(p, σ_q) with σ_q = werner(d, q) on the PSD and
/// PPT cones, for q ≥ 1/2 (σ_q must be PPT).
pub fn werner_diameters(d: usize, p: f64, qs: &[f64]) -> Result<Vec<WernerRow>> {
    let s = BipartiteShape::new(d, d)?;
    qs.iter()
        .map(|&q| {
            let sigma = werner(d, q);
            Ok(WernerRow {
                q,
                psd: diameter_depolarizing(p, &sigma, &ConeSpec::Psd)?,
                ppt: diameter_depolarizing(p, &sigma, &ConeSpec::Ppt(s))?,
            })
        })
        .collect()
}

/// The q at which σ_q^T1 is maximally mixed.
pub fn werner_crossover(d: usize) -> f64 {
    (d as f64 + 1.0) / (2.0 * d as f64)
}

/// −1, 0 or 1 when Δ_PSD is certifiably below, equal to (within 1e-9), or
/// above Δ_PPT; None when the brackets overlap.
pub fn werner_order(row: &WernerRow) -> Option<i8> {
    let pu = row.psd.certifying_value().value();
    let pl = row.psd.lower.value();
    let tu = row.ppt.certifying_value().value();
    let tl = row.ppt.lower.value();
    let same = pu == tu || (pu.is_finite() && tu.is_finite() && (pu - tu).abs() <= 1e-9 * (1.0 + pu.abs()));
    if row.psd.exact && row.ppt.exact && same {
        Some(0)
    } else if pu < tl {
        Some(-1)
    } else if tu < pl {
        Some(1)
    } else {
        None
    }
}

fn fmt_ext(x: ExtendedReal) -> String {
    match x {
        ExtendedReal::Infinite => "inf".into(),
        ExtendedReal::Finite(v) => format!("{v:.6}"),
    }
}

fn werner_diameters_demo(o: &DemoOptions) -> Result<DemoReport> {
    let steps = o.q_steps.max(2);
    let qc = werner_crossover(o.d);
    let mut qs: Vec<f64> = (0..steps).map(|k| 0.5 + 0.5 * k as f64 / (steps - 1) as f64).collect();
    if !qs.iter().any(|q| (q - qc).abs() < 1e-12) {
        qs.push(qc);
        qs.sort_by(f64::total_cmp);
    }
    let rows = werner_diameters(o.d, o.p, &qs)?;
    let mut lines = vec![
        format!("depolarizing p={} towards Werner sigma_q, d={}, crossover q=(d+1)/2d={qc:.6}", o.p, o.d),
        format!("{:>9} {:>12} {:>12} {:>12} {:>12}  order", "q", "PSD lower", "PSD upper", "PPT lower", "PPT upper"),
    ];
    let mut checks = Vec::new();
    for row in &rows {
        let ord = werner_order(row);
        lines.push(format!(
            "{:>9.6} {:>12} {:>12} {:>12} {:>12}  {}",
            row.q,
            fmt_ext(row.psd.lower),
            fmt_ext(row.psd.certifying_value()),
            fmt_ext(row.ppt.lower),
            fmt_ext(row.ppt.certifying_value()),
            match ord {
                Some(-1) => "PSD < PPT",
                Some(0) => "PSD = PPT",
                Some(_) => "PSD > PPT",
                None => "undecided",
            }
        ));
        let want = if (row.q - qc).abs() < 1e-12 {
            0
        } else if row.q < qc {
            -1
        } else {
            1
        };
        checks.push(CheckReport::equal(
            format!("ordering at q={:.6}", row.q),
            ord.map_or(f64::NAN, |x| x as f64),
            want as f64,
            0.0,
            CheckStatus::Certified,
        ));
    }
    Ok(DemoReport {
        title: "Werner depolarizing diameters on the PSD and PPT cones".into(),
        lines,
        checks,
    })
}

fn qubit_restriction_demo(sample: &SampleOptions) -> Result<DemoReport> {
    let mut lines = Vec::new();
    let mut checks = Vec::new();
    for (label, case) in [
        ("(a) spherical subcones, unital map", RestrictionCase::SphericalUnital),
        ("(b) spherical subcone, non-unital map", RestrictionCase::SphericalNonunital),
        ("(c) ellipsoidal subcone", RestrictionCase::Ellipsoid),
    ] {
        let demo = restriction_demo(case, sample)?;
        lines.push(format!("{label}: PSD diameter {}", describe(&demo.psd)));
        for (def, est) in &demo.restricted {
            lines.push(format!("    {def:?}: {}", describe(est)));
        }
        checks.extend(demo.checks);
    }
    Ok(DemoReport {
        title: "qubit maps restricted to deformed cones".into(),
        lines,
        checks,
    })
}

fn describe(e: &DiameterEstimate) -> String {
    let kind = if e.is_certified() { "exact" } else { "sampled lower bound" };
    let flag = if e.inf_suspect { " (INF-suspect)" } else { "" };
    format!("{} [{kind}]{flag}", fmt_ext(e.certifying_value()))
}

fn optimality_demo(delta: f64, lambda1: f64, lambda2: f64) -> Result<DemoReport> {
    let w = optimality_witness(delta, lambda1, lambda2, (2, 2))?;
    let lines = vec![
        format!("delta={delta}, lambda1={lambda1}, lambda2={lambda2}, mu=({:.9}, {:.9})", w.mu.0, w.mu.1),
        format!("image diameter h(c1', c2') = {}", fmt_ext(w.image_diameter)),
        format!(
            "negativity ratio {:.9} (closed form {:.9}; tanh(delta/4) = {:.9})",
            w.negativity_ratio,
            w.negativity_ratio_closed,
            (delta / 4.0).tanh()
        ),
        format!(
            "base-norm ratio  {:.9} (closed form {:.9}; tanh(delta/2) = {:.9})",
            w.base_norm_ratio,
            w.base_norm_ratio_closed,
            (delta / 2.0).tanh()
        ),
    ];
    Ok(DemoReport {
        title: "segment-image witness for the contraction bounds".into(),
        lines,
        checks: w.checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SuiteConfig {
        SuiteConfig {
            n: 6,
            seed: 3,
            dims: vec![2, 3, 4],
        }
    }

    #[test]
    fn every_suite_runs_clean() {
        for name in SUITES {
            let cfg = if name == "duality" {
                SuiteConfig { n: 2, seed: 1, dims: vec![4] }
            } else {
                small()
            };
            let rep = run_suite(name, &cfg).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert!(!rep.rows.is_empty(), "{name}");
            assert_eq!(rep.certified_failures(), 0, "{rep}");
        }
    }

    #[test]
    fn suites_are_deterministic() {
        let a = run_suite("prop8", &small()).unwrap();
        let b = run_suite("prop8", &small()).unwrap();
        assert_eq!(a.rows, b.rows);
        assert_eq!(format!("{a}"), format!("{b}"));
    }

    #[test]
    fn unknown_suite_and_bad_dims() {
        assert!(run_suite("prop99", &small()).is_err());
        let cfg = SuiteConfig { n: 1, seed: 0, dims: vec![] };
        assert!(run_suite("prop7", &cfg).is_err());
    }

    #[test]
    fn werner_helpers() {
        let w = werner(3, 0.9);
        assert!((w.trace() - 1.0).abs() < 1e-14);
        // tr(F ρ) = p − (1 − p)
        assert!((w.inner(&swap_operator(3)) - 0.8).abs() < 1e-12);
        assert_eq!(square_shape(9).map(|s| s.d1), Some(3));
        assert!(square_shape(6).is_none() && square_shape(2).is_none());
    }

    #[test]
    fn spectral_equality_noted_at_qubits_only() {
        let rep = run_suite("spectral", &SuiteConfig { n: 0, seed: 0, dims: vec![2, 3] }).unwrap();
        assert!(rep.passed());
        assert_eq!(rep.notes.len(), 3);
        assert!(rep.notes.iter().all(|n| n.starts_with("d=2")));
    }

    #[test]
    fn data_hiding_values() {
        let n = data_hiding_norms(3, 0.9, 0.4).unwrap();
        assert!((n.trace_norm - 1.0).abs() < 1e-12);
        assert!((n.ppt_norm - 2.0 / 3.0).abs() < 1e-10);
        assert!((n.ppt_plus_norm - 0.5).abs() < 1e-4);
    }

    #[test]
    fn werner_crossover_ordering() {
        let rows = werner_diameters(3, 0.5, &[0.55, 2.0 / 3.0, 0.8]).unwrap();
        let ords: Vec<_> = rows.iter().map(werner_order).collect();
        assert_eq!(ords, vec![Some(-1), Some(0), Some(1)]);
    }

    #[test]
    fn demos_run() {
        let o = DemoOptions {
            sample: SampleOptions {
                n_samples: 24,
                n_refine: 2,
                ..SampleOptions::default()
            },
            ..DemoOptions::default()
        };
        for name in ["werner_diameters", "optimality"] {
            let rep = run_demo(name, &o).unwrap();
            assert_eq!(rep.certified_failures(), 0, "{rep}");
        }
        assert!(run_demo("nope", &o).is_err());
    }

    #[test]
    fn worked_finite_time_instance() {
        let r = finite_time_worked_instance().unwrap();
        assert_eq!(r.entry_step, Some(2));
        assert_eq!(r.n1.ceil(), 5.0);
    }
}
