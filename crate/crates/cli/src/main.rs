use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::builder::PossibleValuesParser;
use clap::{Args, Parser, Subcommand, ValueEnum};
use conemetric::channels::{
    depolarizing, diameter_depolarizing, diameter_sampled_between, Channel, DiameterEstimate, SampleOptions,
};
use conemetric::cones::{hilbert_distance_with, oscillation, sup_ratio_with, ConeSpec, ExtendedReal};
use conemetric::linalg::{BipartiteShape, CMatrix, HermitianMatrix};
use conemetric::norms::{base_norm_with, dist_norm, MeasurementSet, NormMethod, NormReport};
use conemetric::qubit::{qubit_diameter, AffineQubitMap};
use conemetric::sdp::AdmmSettings;
use conemetric::suites::{run_demo, run_suite, DemoOptions, SuiteConfig, DEMOS, SUITES};
use conemetric::synthesis::{complete_to_instrument, synthesize, SynthesisBranch};
use conemetric::{Error, Tolerances};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

/// Hilbert metric, base norms, contraction and map synthesis over operator cones.
#[derive(Parser)]
#[command(name = "conemetric", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Global {
    /// Membership and rank-decision band.
    #[arg(long, global = true, default_value_t = Tolerances::default().member_tol)]
    tol: f64,
    /// Relative eigenvalue cut for supports.
    #[arg(long, global = true, default_value_t = Tolerances::default().rank_tol)]
    rank_tol: f64,
    /// Conic solver stopping tolerance.
    #[arg(long, global = true, default_value_t = AdmmSettings::default().tol)]
    solver_tol: f64,
    /// Append timing and solver diagnostics to this file.
    #[arg(long, global = true)]
    log: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// sup/inf ratios, Hilbert distance and oscillation of two cone elements.
    Hilbert {
        a: PathBuf,
        b: PathBuf,
        #[command(flatten)]
        cone: ConeArgs,
    },
    /// Base norm over a cone or distinguishability norm of a measurement set.
    Norm {
        v: PathBuf,
        #[arg(long, value_enum, default_value = "base")]
        kind: NormKind,
        #[command(flatten)]
        cone: ConeArgs,
        /// Measurement set for --kind dist.
        #[arg(long, value_enum, default_value = "plus")]
        measurements: Measurements,
    },
    /// Projective diameter of a channel's image.
    Diameter {
        channel: PathBuf,
        #[command(flatten)]
        cone: ConeArgs,
        #[arg(long, default_value_t = 64)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Randomized verification suite; exits 1 on a certified failure.
    Check {
        #[arg(long, value_parser = PossibleValuesParser::new(SUITES))]
        suite: String,
        #[arg(long, default_value_t = 50)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Comma separated, e.g. 2,3,4.
        #[arg(long, value_delimiter = ',', default_value = "2,3,4")]
        dims: Vec<usize>,
    },
    /// Build T with T(rho_i) = p_i rho_i' and its trace-preserving completion.
    Synthesize {
        rho1: PathBuf,
        rho2: PathBuf,
        rho1p: PathBuf,
        rho2p: PathBuf,
    },
    /// Worked examples.
    Demo {
        #[arg(long, value_parser = PossibleValuesParser::new(DEMOS))]
        name: String,
        #[arg(long, default_value_t = 3)]
        d: usize,
        #[arg(long, default_value_t = 0.9)]
        p1: f64,
        #[arg(long, default_value_t = 0.4)]
        p2: f64,
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        #[arg(long, default_value_t = 13)]
        q_steps: usize,
        #[arg(long, default_value_t = 1.0)]
        delta: f64,
        #[arg(long, default_value_t = 1.0)]
        lambda1: f64,
        #[arg(long, default_value_t = 1.0)]
        lambda2: f64,
        #[arg(long, default_value_t = 64)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct ConeArgs {
    #[arg(long, value_enum, default_value = "psd")]
    cone: ConeKind,
    /// Bipartite shape d1xd2; falls back to the input file's shape.
    #[arg(long)]
    shape: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConeKind {
    Psd,
    Ppt,
    PptCapPsd,
    Conv,
}

#[derive(Clone, Copy, ValueEnum)]
enum NormKind {
    Base,
    Dist,
}

#[derive(Clone, Copy, ValueEnum)]
enum Measurements {
    Plus,
    Ppt,
    PptPlus,
}

/// Hermitian matrix as separate real and imaginary parts.
#[derive(Serialize, Deserialize)]
struct MatrixFile {
    dim: usize,
    re: Vec<Vec<f64>>,
    #[serde(default)]
    im: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    shape: Option<[usize; 2]>,
}

/// General complex matrix, used for Kraus operators.
#[derive(Deserialize)]
struct ComplexFile {
    re: Vec<Vec<f64>>,
    #[serde(default)]
    im: Option<Vec<Vec<f64>>>,
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum ChannelFile {
    Kraus {
        kraus: Vec<ComplexFile>,
    },
    Choi {
        in_dim: usize,
        out_dim: usize,
        choi: MatrixFile,
    },
    /// Rows act on coordinates in the generalized Gell-Mann basis.
    Superop {
        in_dim: usize,
        out_dim: usize,
        matrix: Vec<Vec<f64>>,
    },
    Depolarizing {
        p: f64,
        sigma: MatrixFile,
    },
    QubitAffine {
        lambda: [[f64; 3]; 3],
        v: [f64; 3],
    },
}

enum Failure {
    Usage(String),
    Domain(String),
    Certified(String),
    Infeasible(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Certified(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Domain(_) => 3,
            Failure::Infeasible(_) => 4,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NotHermitian(_) | Error::NonFinite => Failure::Usage(e.to_string()),
            Error::NoConvergence { .. } | Error::Indeterminate { .. } => Failure::Certified(e.to_string()),
            _ => Failure::Domain(e.to_string()),
        }
    }
}

type Out<T> = std::result::Result<T, Failure>;

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Out<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn assemble(re: &[Vec<f64>], im: Option<&Vec<Vec<f64>>>) -> Out<CMatrix> {
    let zeros: Vec<Vec<f64>> = re.iter().map(|r| vec![0.0; r.len()]).collect();
    let im = im.unwrap_or(&zeros);
    let rows = re.len();
    let cols = re.first().map_or(0, |r| r.len());
    if rows == 0 || cols == 0 {
        return Err(Failure::Usage("empty matrix".into()));
    }
    let ragged = |m: &[Vec<f64>]| m.len() != rows || m.iter().any(|r| r.len() != cols);
    if ragged(re) || ragged(im) {
        return Err(Failure::Usage("re and im must be rectangular arrays of the same size".into()));
    }
    Ok(CMatrix::from_fn(rows, cols, |i, j| Complex64::new(re[i][j], im[i][j])))
}

impl MatrixFile {
    fn matrix(&self) -> Out<HermitianMatrix> {
        let m = assemble(&self.re, self.im.as_ref())?;
        if m.rows() != self.dim || m.cols() != self.dim {
            return Err(Failure::Usage(format!("dim is {} but the arrays are {}x{}", self.dim, m.rows(), m.cols())));
        }
        if let Some([d1, d2]) = self.shape {
            if d1 * d2 != self.dim {
                return Err(Failure::Usage(format!("shape {d1}x{d2} does not match dim {}", self.dim)));
            }
        }
        Ok(HermitianMatrix::new(m)?)
    }

    fn from_matrix(h: &HermitianMatrix, shape: Option<[usize; 2]>) -> Self {
        let d = h.dim();
        MatrixFile {
            dim: d,
            re: (0..d).map(|i| (0..d).map(|j| h.entry(i, j).re).collect()).collect(),
            im: Some((0..d).map(|i| (0..d).map(|j| h.entry(i, j).im).collect()).collect()),
            shape,
        }
    }
}

fn complex_json(c: &CMatrix) -> Value {
    let part = |f: fn(&Complex64) -> f64| -> Vec<Vec<f64>> {
        (0..c.rows()).map(|i| (0..c.cols()).map(|j| f(&c.data()[i * c.cols() + j])).collect()).collect()
    };
    json!({ "re": part(|z| z.re), "im": part(|z| z.im) })
}

fn load_matrix(path: &Path) -> Out<(HermitianMatrix, Option<[usize; 2]>)> {
    let f: MatrixFile = read_json(path)?;
    Ok((f.matrix()?, f.shape))
}

/// The channel plus which closed form applies to it, if any.
enum Closed {
    Depolarizing(f64, HermitianMatrix),
    Qubit,
    None,
}

fn load_channel(path: &Path) -> Out<(Channel, Closed)> {
    let f: ChannelFile = read_json(path)?;
    Ok(match f {
        ChannelFile::Kraus { kraus } => {
            let ks = kraus.iter().map(|k| assemble(&k.re, k.im.as_ref())).collect::<Out<Vec<_>>>()?;
            let t = Channel::from_kraus(&ks)?;
            let closed = if t.in_dim() == 2 && t.out_dim() == 2 { Closed::Qubit } else { Closed::None };
            (t, closed)
        }
        ChannelFile::Choi { in_dim, out_dim, choi } => {
            let t = Channel::from_choi(&choi.matrix()?, in_dim, out_dim)?;
            let closed = if in_dim == 2 && out_dim == 2 { Closed::Qubit } else { Closed::None };
            (t, closed)
        }
        ChannelFile::Superop { in_dim, out_dim, matrix } => {
            let rows = out_dim * out_dim;
            let cols = in_dim * in_dim;
            if matrix.len() != rows || matrix.iter().any(|r| r.len() != cols) {
                return Err(Failure::Usage(format!("superop must be {rows}x{cols}")));
            }
            let t = Channel::from_superoperator(in_dim, out_dim, matrix.concat())?;
            let closed = if in_dim == 2 && out_dim == 2 { Closed::Qubit } else { Closed::None };
            (t, closed)
        }
        ChannelFile::Depolarizing { p, sigma } => {
            let s = sigma.matrix()?;
            (depolarizing(p, &s)?, Closed::Depolarizing(p, s))
        }
        ChannelFile::QubitAffine { lambda, v } => (AffineQubitMap::new(lambda, v)?.to_channel(), Closed::Qubit),
    })
}

fn parse_shape(s: &str) -> Out<[usize; 2]> {
    let bad = || Failure::Usage(format!("shape must look like 2x3, got {s:?}"));
    let (a, b) = s.split_once(['x', 'X', ',']).ok_or_else(bad)?;
    Ok([a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?])
}

fn cone_spec(args: &ConeArgs, from_file: Option<[usize; 2]>) -> Out<ConeSpec> {
    let shape = || -> Out<BipartiteShape> {
        let s = match &args.shape {
            Some(s) => parse_shape(s)?,
            None => from_file.ok_or_else(|| Failure::Usage("this cone needs --shape or a shape in the input".into()))?,
        };
        Ok(BipartiteShape::new(s[0], s[1])?)
    };
    Ok(match args.cone {
        ConeKind::Psd => ConeSpec::Psd,
        ConeKind::Ppt => ConeSpec::Ppt(shape()?),
        ConeKind::PptCapPsd => ConeSpec::PptCapPsd(shape()?),
        ConeKind::Conv => ConeSpec::ConvPsdPpt(shape()?),
    })
}

fn ext(x: ExtendedReal) -> Value {
    match x {
        ExtendedReal::Finite(v) => json!(v),
        ExtendedReal::Infinite => json!("inf"),
    }
}

fn num(x: f64) -> Value {
    if x == f64::INFINITY {
        json!("inf")
    } else if x.is_finite() {
        json!(x)
    } else {
        json!(x.to_string())
    }
}

fn print(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

struct Log {
    path: Option<PathBuf>,
    buf: String,
}

impl Log {
    fn line(&mut self, s: impl AsRef<str>) {
        if self.path.is_some() {
            let _ = writeln!(self.buf, "{}", s.as_ref());
        }
    }

    fn flush(&self) {
        if let Some(p) = &self.path {
            use std::io::Write;
            let file = std::fs::OpenOptions::new().create(true).append(true).open(p);
            match file {
                Ok(mut f) => {
                    let _ = f.write_all(self.buf.as_bytes());
                }
                Err(e) => eprintln!("warning: cannot write log {}: {e}", p.display()),
            }
        }
    }
}

fn tolerances(g: &Global) -> Tolerances {
    Tolerances {
        rank_tol: g.rank_tol,
        member_tol: g.tol,
        solver_tol: g.solver_tol,
        ..Tolerances::default()
    }
}

fn admm(g: &Global) -> AdmmSettings {
    AdmmSettings {
        tol: g.solver_tol,
        ..AdmmSettings::default()
    }
}

fn cmd_hilbert(g: &Global, a: &Path, b: &Path, cone: &ConeArgs) -> Out<()> {
    let (a, sa) = load_matrix(a)?;
    let (b, sb) = load_matrix(b)?;
    let spec = cone_spec(cone, sa.or(sb))?;
    let tol = tolerances(g);
    let sup = sup_ratio_with(&spec, &a, &b, &tol)?;
    let inf = sup_ratio_with(&spec, &b, &a, &tol)?.recip();
    let h = hilbert_distance_with(&spec, &a, &b, &tol)?;
    let osc = oscillation(&spec, &a, &b)?;
    print(&json!({ "sup": ext(sup), "inf": ext(inf), "h": ext(h), "osc": ext(osc) }));
    Ok(())
}

fn norm_json(r: &NormReport, name: String) -> Value {
    let method = match r.method {
        NormMethod::ClosedForm => "closed_form",
        NormMethod::ConicSolver => "conic_solver",
    };
    let mut out = json!({
        "norm": name,
        "value": num(r.value),
        "lower": num(r.lower),
        "method": method,
        "residual": num(r.residual),
        "iterations": r.iterations,
    });
    if let Some((cp, cm)) = &r.decomposition {
        out["decomposition"] = json!({
            "c_plus": MatrixFile::from_matrix(cp, None),
            "c_minus": MatrixFile::from_matrix(cm, None),
        });
    }
    if let Some(w) = &r.witness {
        out["witness"] = json!(MatrixFile::from_matrix(w, None));
    }
    out
}

fn cmd_norm(g: &Global, v: &Path, kind: NormKind, cone: &ConeArgs, m: Measurements, log: &mut Log) -> Out<()> {
    let (v, shape) = load_matrix(v)?;
    let start = Instant::now();
    let report = match kind {
        NormKind::Base => {
            let spec = cone_spec(cone, shape)?;
            let r = base_norm_with(&spec, &v, &admm(g))?;
            norm_json(&r, format!("base norm over {}", spec_name(&spec)))
        }
        NormKind::Dist => {
            let set = match m {
                Measurements::Plus => MeasurementSet::Plus,
                Measurements::Ppt | Measurements::PptPlus => {
                    let s = cone_spec(&ConeArgs { cone: ConeKind::Ppt, shape: cone.shape.clone() }, shape)?;
                    let s = s.shape().expect("bipartite");
                    if matches!(m, Measurements::Ppt) {
                        MeasurementSet::Ppt(s)
                    } else {
                        MeasurementSet::PptPlus(s)
                    }
                }
            };
            let r = match set {
                // the solver tolerance only matters for the conic case
                MeasurementSet::PptPlus(s) => base_norm_with(&ConeSpec::ConvPsdPpt(s), &v, &admm(g))?,
                _ => dist_norm(&set, &v)?,
            };
            norm_json(&r, format!("distinguishability norm of {}", set.name()))
        }
    };
    log.line(format!("norm: {:.3}s, iterations {}", start.elapsed().as_secs_f64(), report["iterations"]));
    print(&report);
    Ok(())
}

fn spec_name(c: &ConeSpec) -> String {
    match c {
        ConeSpec::Psd => "PSD".into(),
        ConeSpec::Ppt(s) => format!("PPT({}x{})", s.d1, s.d2),
        ConeSpec::PptCapPsd(s) => format!("PSD∩PPT({}x{})", s.d1, s.d2),
        ConeSpec::ConvPsdPpt(s) => format!("conv(PSD∪PPT)({}x{})", s.d1, s.d2),
        ConeSpec::QubitDeformed(d) => format!("deformed qubit cone {d:?}"),
    }
}

fn diameter_json(d: &DiameterEstimate) -> Value {
    json!({
        "lower": ext(d.lower),
        "upper": d.upper.map(ext),
        "exact": d.exact,
        "method": format!("{:?}", d.method),
        "samples_used": d.samples_used,
        "inf_suspect": d.inf_suspect,
        "birkhoff_coefficient": num((d.certifying_value().value() / 4.0).tanh()),
    })
}

fn cmd_diameter(path: &Path, cone: &ConeArgs, samples: usize, seed: u64, log: &mut Log) -> Out<()> {
    let (t, closed) = load_channel(path)?;
    let opts = SampleOptions { n_samples: samples, seed, ..SampleOptions::default() };
    let start = Instant::now();
    let est = match cone.cone {
        ConeKind::Psd => {
            if !t.is_positive_sampled(256, seed) {
                return Err(Failure::Domain("the map is not positive, so it does not preserve the PSD cone".into()));
            }
            match closed {
                Closed::Depolarizing(p, s) => diameter_depolarizing(p, &s, &ConeSpec::Psd)?,
                Closed::Qubit if t.is_trace_preserving(1e-9) => qubit_diameter(&t, &opts)?,
                _ => diameter_sampled_between(&t, &ConeSpec::Psd, &ConeSpec::Psd, &opts)?,
            }
        }
        _ => {
            let guess = |d: usize| {
                let r = (d as f64).sqrt().round() as usize;
                (r * r == d).then_some([r, r])
            };
            let cin = cone_spec(cone, guess(t.in_dim()))?;
            let cout = cone_spec(cone, guess(t.out_dim()))?;
            match (&closed, &cin) {
                (Closed::Depolarizing(p, s), ConeSpec::Ppt(_)) if t.in_dim() == t.out_dim() => {
                    diameter_depolarizing(*p, s, &cin)?
                }
                _ => diameter_sampled_between(&t, &cin, &cout, &opts)?,
            }
        }
    };
    log.line(format!("diameter: {:.3}s, {} samples", start.elapsed().as_secs_f64(), est.samples_used));
    print(&diameter_json(&est));
    Ok(())
}

fn cmd_check(suite: &str, n: usize, seed: u64, dims: Vec<usize>, log: &mut Log) -> Out<()> {
    let start = Instant::now();
    let rep = run_suite(suite, &SuiteConfig { n, seed, dims })?;
    log.line(format!("check {suite}: {:.3}s, {} rows", start.elapsed().as_secs_f64(), rep.rows.len()));
    print!("{rep}");
    if rep.certified_failures() > 0 {
        return Err(Failure::Certified(format!("{} certified failures", rep.certified_failures())));
    }
    Ok(())
}

fn cmd_synthesize(files: [&Path; 4], log: &mut Log) -> Out<()> {
    let mut m = Vec::new();
    for f in files {
        m.push(load_matrix(f)?.0);
    }
    let start = Instant::now();
    let res = synthesize(&m[0], &m[1], &m[2], &m[3])?;
    log.line(format!("synthesize: {:.3}s", start.elapsed().as_secs_f64()));
    let fz = &res.feasibility;
    let mut out = json!({
        "feasible": fz.feasible,
        "compatible": fz.compatible,
        "h_in": ext(fz.h_in),
        "h_out": ext(fz.h_out),
    });
    if let Some(r) = &fz.reason {
        out["reason"] = json!(r);
    }
    let Some(t) = &res.channel else {
        print(&out);
        let why = fz.reason.clone().unwrap_or_else(|| format!("h of the outputs {} exceeds h of the inputs {}", fz.h_out, fz.h_in));
        return Err(Failure::Infeasible(why));
    };
    out["p"] = json!([res.p1, res.p2]);
    out["branch"] = json!(match res.branch {
        Some(SynthesisBranch::Constant) => "constant".to_string(),
        Some(SynthesisBranch::SupportInclusion { swapped }) =>
            if swapped { "support_inclusion_swapped".into() } else { "support_inclusion".into() },
        Some(SynthesisBranch::NoInclusion) => "no_inclusion".into(),
        None => "none".into(),
    });
    out["margin"] = json!(res.margin.map(num));
    if let Some(c) = &res.certificate {
        out["certificate"] = json!({ "choi_min_eig": num(c.choi_min_eig), "residuals": [num(c.residuals[0]), num(c.residuals[1])] });
    }
    let kraus_tol = 1e-12;
    out["map"] = json!({
        "in_dim": t.in_dim(),
        "out_dim": t.out_dim(),
        "choi": MatrixFile::from_matrix(&t.to_choi(), Some([t.in_dim(), t.out_dim()])),
        "kraus": t.to_kraus(kraus_tol).iter().map(complex_json).collect::<Vec<_>>(),
    });
    let inst = complete_to_instrument(t)?;
    let c = &inst.channel;
    out["instrument"] = json!({
        "in_dim": c.in_dim(),
        "out_dim": c.out_dim(),
        "system_dim": inst.system_dim,
        "flag_layout": "output index = 2*system + flag, flag 0 = success",
        "scale": num(inst.c),
        "trace_preserving": c.is_trace_preserving(1e-9),
        "choi": MatrixFile::from_matrix(&c.to_choi(), Some([c.in_dim(), c.out_dim()])),
        "kraus": c.to_kraus(kraus_tol).iter().map(complex_json).collect::<Vec<_>>(),
    });
    print(&out);
    let certified = res.certified() && c.is_trace_preserving(1e-9);
    if !certified {
        return Err(Failure::Certified("the synthesized map failed its certificate".into()));
    }
    Ok(())
}

fn run(cli: Cli, log: &mut Log) -> Out<()> {
    let g = &cli.global;
    match cli.cmd {
        Cmd::Hilbert { a, b, cone } => cmd_hilbert(g, &a, &b, &cone),
        Cmd::Norm { v, kind, cone, measurements } => cmd_norm(g, &v, kind, &cone, measurements, log),
        Cmd::Diameter { channel, cone, samples, seed } => cmd_diameter(&channel, &cone, samples, seed, log),
        Cmd::Check { suite, n, seed, dims } => cmd_check(&suite, n, seed, dims, log),
        Cmd::Synthesize { rho1, rho2, rho1p, rho2p } => cmd_synthesize([&rho1, &rho2, &rho1p, &rho2p], log),
        Cmd::Demo { name, d, p1, p2, p, q_steps, delta, lambda1, lambda2, samples, seed } => {
            let o = DemoOptions {
                d,
                p1,
                p2,
                p,
                q_steps,
                delta,
                lambda1,
                lambda2,
                sample: SampleOptions { n_samples: samples, seed, ..SampleOptions::default() },
            };
            let start = Instant::now();
            let rep = run_demo(&name, &o)?;
            log.line(format!("demo {name}: {:.3}s", start.elapsed().as_secs_f64()));
            print!("{rep}");
            if rep.certified_failures() > 0 {
                return Err(Failure::Certified(format!("{} certified failures", rep.certified_failures())));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut log = Log { path: cli.global.log.clone(), buf: String::new() };
    let result = run(cli, &mut log);
    log.flush();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Usage(m) | Failure::Domain(m) | Failure::Certified(m) => eprintln!("error: {m}"),
                Failure::Infeasible(m) => eprintln!("infeasible: {m}"),
            }
            ExitCode::from(f.code())
        }
    }
}
