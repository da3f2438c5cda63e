//! Small semidefinite programs solved by an alternating direction method on
//! the dual augmented Lagrangian.
//!
//! Standard form: minimize ⟨C, X⟩ subject to A(X) = b, X ⪰ 0, where X is a
//! tuple of Hermitian blocks. The dual is maximize ⟨b, y⟩ subject to
//! C − A*(y) ⪰ 0. Each problem below turns the approximate primal/dual pair
//! into a feasible pair, so the reported interval [lower, upper] is
//! certified up to eigenvalue rounding.

use crate::linalg::{op_norm, partial_transpose, BipartiteShape, HermitianMatrix};
use crate::{Error, Result};

pub type Blocks = Vec<HermitianMatrix>;

fn add(a: &[HermitianMatrix], b: &[HermitianMatrix]) -> Blocks {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn sub(a: &[HermitianMatrix], b: &[HermitianMatrix]) -> Blocks {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn scale(a: &[HermitianMatrix], s: f64) -> Blocks {
    a.iter().map(|x| x.scale(s)).collect()
}

fn inner(a: &[HermitianMatrix], b: &[HermitianMatrix]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.inner(y)).sum()
}

fn norm(a: &[HermitianMatrix]) -> f64 {
    a.iter().map(|x| x.frobenius_norm().powi(2)).sum::<f64>().sqrt()
}

/// A conic program in standard form.
pub trait Sdp {
    fn cost(&self) -> Blocks;
    fn rhs(&self) -> Blocks;
    fn apply(&self, x: &[HermitianMatrix]) -> Blocks;
    fn adjoint(&self, y: &[HermitianMatrix]) -> Blocks;
    /// (AA*)⁻¹ r.
    fn normal_solve(&self, r: &[HermitianMatrix]) -> Blocks;
}

#[derive(Clone, Copy, Debug)]
pub struct AdmmSettings {
    pub tol: f64,
    pub max_iter: usize,
    pub mu0: f64,
}

impl Default for AdmmSettings {
    fn default() -> Self {
        AdmmSettings {
            tol: 1e-9,
            max_iter: 50_000,
            mu0: 1.0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct AdmmOutput {
    pub x: Blocks,
    pub y: Blocks,
    pub s: Blocks,
    pub iterations: usize,
    pub primal_infeasibility: f64,
    pub dual_infeasibility: f64,
    pub gap: f64,
    pub converged: bool,
}

pub fn admm<P: Sdp>(p: &P, settings: &AdmmSettings) -> AdmmOutput {
    let c = p.cost();
    let b = p.rhs();
    let nb = norm(&b);
    let nc = norm(&c);
    let mut x: Blocks = c.iter().map(|m| HermitianMatrix::zeros(m.dim())).collect();
    let mut s = c.clone();
    let mut y: Blocks = b.iter().map(|m| HermitianMatrix::zeros(m.dim())).collect();
    let mut mu = settings.mu0;
    let (mut pinf, mut dinf, mut gap) = (f64::INFINITY, f64::INFINITY, f64::INFINITY);
    let (mut pacc, mut dacc) = (0.0, 0.0);
    for it in 1..=settings.max_iter {
        let ax = p.apply(&x);
        let r = add(&scale(&sub(&b, &ax), mu), &p.apply(&sub(&c, &s)));
        y = p.normal_solve(&r);
        let aty = p.adjoint(&y);
        let v = sub(&sub(&c, &aty), &scale(&x, mu));
        let mut x_new = Vec::with_capacity(v.len());
        let mut s_new = Vec::with_capacity(v.len());
        for blk in &v {
            let sys = blk.eigh();
            s_new.push(sys.map(|l| l.max(0.0)));
            x_new.push(sys.map(|l| (-l).max(0.0) / mu));
        }
        x = x_new;
        s = s_new;
        if it % 10 == 0 || it == settings.max_iter {
            pinf = norm(&sub(&p.apply(&x), &b)) / (1.0 + nb);
            dinf = norm(&sub(&sub(&c, &p.adjoint(&y)), &s)) / (1.0 + nc);
            let (pobj, dobj) = (inner(&c, &x), inner(&b, &y));
            gap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());
            if pinf <= settings.tol && dinf <= settings.tol && gap <= settings.tol {
                return AdmmOutput {
                    x,
                    y,
                    s,
                    iterations: it,
                    primal_infeasibility: pinf,
                    dual_infeasibility: dinf,
                    gap,
                    converged: true,
                };
            }
            pacc += pinf;
            dacc += dinf;
            if it % 50 == 0 {
                // balance the two residuals by moving the penalty
                if pacc > 5.0 * dacc {
                    mu = (mu * 1.6).min(1e6);
                } else if dacc > 5.0 * pacc {
                    mu = (mu / 1.6).max(1e-6);
                }
                pacc = 0.0;
                dacc = 0.0;
            }
        }
    }
    AdmmOutput {
        x,
        y,
        s,
        iterations: settings.max_iter,
        primal_infeasibility: pinf,
        dual_infeasibility: dinf,
        gap,
        converged: false,
    }
}

/// Certified bracket from a solved program.
#[derive(Clone, Debug)]
pub struct Bracket {
    pub lower: f64,
    pub upper: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn pos_neg(h: &HermitianMatrix) -> (HermitianMatrix, HermitianMatrix) {
    let sys = h.eigh();
    (sys.map(|l| l.max(0.0)), sys.map(|l| (-l).max(0.0)))
}

/// min tr(P1 + P2 + Q1 + Q2) s.t. P1 − P2 + Q1^T1 − Q2^T1 = v.
struct ConvBaseNorm {
    v: HermitianMatrix,
    shape: BipartiteShape,
}

impl ConvBaseNorm {
    fn pt(&self, h: &HermitianMatrix) -> HermitianMatrix {
        partial_transpose(h, self.shape).expect("shape checked")
    }
}

impl Sdp for ConvBaseNorm {
    fn cost(&self) -> Blocks {
        vec![HermitianMatrix::identity(self.v.dim()); 4]
    }
    fn rhs(&self) -> Blocks {
        vec![self.v.clone()]
    }
    fn apply(&self, x: &[HermitianMatrix]) -> Blocks {
        vec![&(&x[0] - &x[1]) + &self.pt(&(&x[2] - &x[3]))]
    }
    fn adjoint(&self, y: &[HermitianMatrix]) -> Blocks {
        let yt = self.pt(&y[0]);
        vec![y[0].clone(), -&y[0], yt.clone(), -&yt]
    }
    fn normal_solve(&self, r: &[HermitianMatrix]) -> Blocks {
        vec![r[0].scale(0.25)]
    }
}

/// Base norm of the cone conv(PSD ∪ PPT), with a decomposition v = c₊ − c₋
/// and a measurement E (0 ≤ E ≤ I, 0 ≤ E^T1 ≤ I) certifying the value.
#[derive(Clone, Debug)]
pub struct ConvNormSolution {
    pub bracket: Bracket,
    pub c_plus: HermitianMatrix,
    pub c_minus: HermitianMatrix,
    /// ⟨2E − I, v⟩ equals the dual lower bound.
    pub witness: HermitianMatrix,
    /// psd blocks [P₊, P₋, Q₊, Q₋] with c± = P± + Q±^T1.
    pub parts: [HermitianMatrix; 4],
}

pub fn conv_base_norm(v: &HermitianMatrix, shape: BipartiteShape, settings: &AdmmSettings) -> Result<ConvNormSolution> {
    shape.check(v.dim())?;
    let n = v.dim();
    let scale_v = v.frobenius_norm();
    if scale_v == 0.0 {
        let z = HermitianMatrix::zeros(n);
        return Ok(ConvNormSolution {
            bracket: Bracket {
                lower: 0.0,
                upper: 0.0,
                iterations: 0,
                converged: true,
            },
            c_plus: z.clone(),
            c_minus: z.clone(),
            witness: HermitianMatrix::identity(n).scale(0.5),
            parts: [z.clone(), z.clone(), z.clone(), z],
        });
    }
    let prob = ConvBaseNorm {
        v: v.scale(1.0 / scale_v),
        shape,
    };
    let out = admm(&prob, settings);
    // primal: absorb the residual into the PSD blocks
    let (rp, rm) = pos_neg(&(&prob.v - &prob.apply(&out.x)[0]));
    let p1 = &out.x[0] + &rp;
    let p2 = &out.x[1] + &rm;
    let c_plus = &p1 + &prob.pt(&out.x[2]);
    let c_minus = &p2 + &prob.pt(&out.x[3]);
    let upper = p1.trace() + p2.trace() + out.x[2].trace() + out.x[3].trace();
    // dual: shrink Y into {‖Y‖∞ ≤ 1, ‖Y^T1‖∞ ≤ 1}
    let y = &out.y[0];
    let yt = prob.pt(y);
    let alpha = 1.0 / op_norm(y).max(op_norm(&yt)).max(1.0);
    let ys = y.scale(alpha);
    let lower = ys.inner(&prob.v);
    let witness = (&HermitianMatrix::identity(n) + &ys).scale(0.5);
    Ok(ConvNormSolution {
        bracket: Bracket {
            lower: lower * scale_v,
            upper: upper * scale_v,
            iterations: out.iterations,
            converged: out.converged,
        },
        c_plus: c_plus.scale(scale_v),
        c_minus: c_minus.scale(scale_v),
        witness,
        parts: [
            p1.scale(scale_v),
            p2.scale(scale_v),
            out.x[2].scale(scale_v),
            out.x[3].scale(scale_v),
        ],
    })
}

/// min tr(X1 + X2) s.t. X1 − X2 = v, X1^T1 = Z1, X2^T1 = Z2, all blocks psd.
struct CapBaseNorm {
    v: HermitianMatrix,
    shape: BipartiteShape,
}

impl CapBaseNorm {
    fn pt(&self, h: &HermitianMatrix) -> HermitianMatrix {
        partial_transpose(h, self.shape).expect("shape checked")
    }
}

impl Sdp for CapBaseNorm {
    fn cost(&self) -> Blocks {
        let n = self.v.dim();
        vec![
            HermitianMatrix::identity(n),
            HermitianMatrix::identity(n),
            HermitianMatrix::zeros(n),
            HermitianMatrix::zeros(n),
        ]
    }
    fn rhs(&self) -> Blocks {
        let n = self.v.dim();
        vec![self.v.clone(), HermitianMatrix::zeros(n), HermitianMatrix::zeros(n)]
    }
    fn apply(&self, x: &[HermitianMatrix]) -> Blocks {
        vec![
            &x[0] - &x[1],
            &self.pt(&x[0]) - &x[2],
            &self.pt(&x[1]) - &x[3],
        ]
    }
    fn adjoint(&self, y: &[HermitianMatrix]) -> Blocks {
        vec![
            &y[0] + &self.pt(&y[1]),
            &self.pt(&y[2]) - &y[0],
            -&y[1],
            -&y[2],
        ]
    }
    fn normal_solve(&self, r: &[HermitianMatrix]) -> Blocks {
        let y = &r[0] - &(&self.pt(&r[1]) - &self.pt(&r[2])).scale(0.5);
        let yt = self.pt(&y);
        vec![
            y,
            (&r[1] - &yt).scale(0.5),
            (&r[2] + &yt).scale(0.5),
        ]
    }
}

/// Base norm of PSD ∩ PPT with a certified decomposition.
#[derive(Clone, Debug)]
pub struct CapNormSolution {
    pub bracket: Bracket,
    pub c_plus: HermitianMatrix,
    pub c_minus: HermitianMatrix,
}

pub fn cap_base_norm(v: &HermitianMatrix, shape: BipartiteShape, settings: &AdmmSettings) -> Result<CapNormSolution> {
    shape.check(v.dim())?;
    let n = v.dim();
    let scale_v = v.frobenius_norm();
    if scale_v == 0.0 {
        let z = HermitianMatrix::zeros(n);
        return Ok(CapNormSolution {
            bracket: Bracket {
                lower: 0.0,
                upper: 0.0,
                iterations: 0,
                converged: true,
            },
            c_plus: z.clone(),
            c_minus: z,
        });
    }
    let prob = CapBaseNorm {
        v: v.scale(1.0 / scale_v),
        shape,
    };
    let out = admm(&prob, settings);
    let (rp, rm) = pos_neg(&(&prob.v - &(&out.x[0] - &out.x[1])));
    let mut x1 = &out.x[0] + &rp;
    let mut x2 = &out.x[1] + &rm;
    let eps = [&x1, &x2]
        .iter()
        .flat_map(|x| [x.min_eigenvalue(), prob.pt(x).min_eigenvalue()])
        .fold(0.0f64, |m, l| m.max(-l));
    if eps > 0.0 {
        let shift = HermitianMatrix::identity(n).scale(eps);
        x1 += &shift;
        x2 += &shift;
    }
    let upper = x1.trace() + x2.trace();
    // dual: y with w1, w2 ⪰ 0, y + w1^T1 ≤ I, −y + w2^T1 ≤ I
    let w1 = out.y[1].psd_projection();
    let w2 = out.y[2].psd_projection();
    let y = &out.y[0];
    let m1 = (y + &prob.pt(&w1)).max_eigenvalue();
    let m2 = (&prob.pt(&w2) - y).max_eigenvalue();
    let mut alpha: f64 = 1.0;
    for m in [m1, m2] {
        if m > 1.0 {
            alpha = alpha.min(1.0 / m);
        }
    }
    let lower = alpha * y.inner(&prob.v);
    Ok(CapNormSolution {
        bracket: Bracket {
            lower: lower * scale_v,
            upper: upper * scale_v,
            iterations: out.iterations,
            converged: out.converged,
        },
        c_plus: x1.scale(scale_v),
        c_minus: x2.scale(scale_v),
    })
}

/// min λ s.t. λb − a = P + Q^T1, P, Q ⪰ 0 (λ is a 1×1 block).
struct ConvRatio {
    a: HermitianMatrix,
    b: HermitianMatrix,
    shape: BipartiteShape,
    bb: f64,
}

impl ConvRatio {
    fn pt(&self, h: &HermitianMatrix) -> HermitianMatrix {
        partial_transpose(h, self.shape).expect("shape checked")
    }
}

impl Sdp for ConvRatio {
    fn cost(&self) -> Blocks {
        let n = self.a.dim();
        vec![
            HermitianMatrix::zeros(n),
            HermitianMatrix::zeros(n),
            HermitianMatrix::identity(1),
        ]
    }
    fn rhs(&self) -> Blocks {
        vec![-&self.a]
    }
    fn apply(&self, x: &[HermitianMatrix]) -> Blocks {
        let lambda = x[2].trace();
        vec![&(&x[0] + &self.pt(&x[1])) - &self.b.scale(lambda)]
    }
    fn adjoint(&self, y: &[HermitianMatrix]) -> Blocks {
        vec![
            y[0].clone(),
            self.pt(&y[0]),
            HermitianMatrix::from_diagonal(&[-self.b.inner(&y[0])]),
        ]
    }
    fn normal_solve(&self, r: &[HermitianMatrix]) -> Blocks {
        // (2I + b b*)⁻¹ by Sherman-Morrison
        let k = self.b.inner(&r[0]) / (2.0 + self.bb);
        vec![(&r[0] - &self.b.scale(k)).scale(0.5)]
    }
}

/// Certified bracket on sup(a/b) for the cone conv(PSD ∪ PPT).
///
/// The lower bound comes from W ∈ PSD ∩ PPT via ⟨W, a⟩/⟨W, b⟩. The upper
/// bound adds the primal residual to P; whatever negativity that leaves is
/// covered by εI ≤ (ε/β)·b, where β is the smallest eigenvalue of a psd
/// summand in a known decomposition `b_parts = (P_b, Q_b)` of b.
pub fn conv_sup_ratio(
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    b_parts: Option<(&HermitianMatrix, &HermitianMatrix)>,
    shape: BipartiteShape,
    settings: &AdmmSettings,
) -> Result<Bracket> {
    shape.check(a.dim())?;
    shape.check(b.dim())?;
    let (na, nb) = (a.frobenius_norm(), b.frobenius_norm());
    if na == 0.0 || nb == 0.0 {
        return Err(Error::InvalidArgument("ratio of zero operands".into()));
    }
    let prob = ConvRatio {
        a: a.scale(1.0 / na),
        b: b.scale(1.0 / nb),
        shape,
        bb: 1.0,
    };
    let out = admm(&prob, settings);
    let n = a.dim();
    let lambda = out.x[2].trace().max(0.0);
    let resid = &(&prob.b.scale(lambda) - &prob.a) - &(&out.x[0] + &prob.pt(&out.x[1]));
    let p = &out.x[0] + &resid;
    let eps = (-p.min_eigenvalue()).max(0.0);
    let upper = if eps == 0.0 {
        lambda
    } else {
        let beta = b_parts
            .map(|(pb, qb)| pb.min_eigenvalue().max(qb.min_eigenvalue()) / nb)
            .unwrap_or(0.0);
        if beta > 0.0 {
            lambda + eps / beta
        } else {
            f64::INFINITY
        }
    };
    let w = -&out.y[0];
    let wt = prob.pt(&w);
    let shift = (-w.min_eigenvalue()).max(-wt.min_eigenvalue()).max(0.0);
    let w = &w + &HermitianMatrix::identity(n).scale(shift);
    let wb = w.inner(&prob.b);
    let lower = if wb > 0.0 { (w.inner(&prob.a) / wb).max(0.0) } else { 0.0 };
    let ratio = na / nb;
    Ok(Bracket {
        lower: lower * ratio,
        upper: upper * ratio,
        iterations: out.iterations,
        converged: out.converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{trace_norm, C64};
    use crate::random::{random_hermitian, rng};

    fn shape(d1: usize, d2: usize) -> BipartiteShape {
        BipartiteShape::new(d1, d2).unwrap()
    }

    #[test]
    fn conv_norm_of_psd_is_trace() {
        let rho = HermitianMatrix::from_diagonal(&[0.5, 0.25, 0.125, 0.125]);
        let sol = conv_base_norm(&rho, shape(2, 2), &AdmmSettings::default()).unwrap();
        assert!(sol.bracket.lower <= sol.bracket.upper + 1e-12);
        assert!((sol.bracket.upper - 1.0).abs() < 1e-6, "{:?}", sol.bracket);
    }

    #[test]
    fn conv_norm_bracket_and_witness() {
        let mut r = rng(3);
        let v = random_hermitian(4, &mut r);
        let sol = conv_base_norm(&v, shape(2, 2), &AdmmSettings::default()).unwrap();
        let b = &sol.bracket;
        assert!(b.lower <= b.upper + 1e-12);
        assert!(b.upper - b.lower < 1e-6 * (1.0 + b.upper), "{b:?}");
        // witness value reproduces the lower bound
        let e = &sol.witness;
        let val = (&e.scale(2.0) - &HermitianMatrix::identity(4)).inner(&v);
        assert!((val - b.lower).abs() < 1e-9 * (1.0 + b.lower));
        assert!(e.min_eigenvalue() >= -1e-12 && e.max_eigenvalue() <= 1.0 + 1e-12);
        // decomposition reproduces v and its value
        let back = &sol.c_plus - &sol.c_minus;
        assert!((&back - &v).max_abs() < 1e-9);
        // conv norm never exceeds the trace norm
        assert!(b.upper <= trace_norm(&v) + 1e-6);
    }

    #[test]
    fn cap_norm_of_entangled_state() {
        // Ω on 2x2: PPT∩PSD base norm of a state outside PPT exceeds 1
        let s = 0.5f64.sqrt();
        let z = C64::new(0.0, 0.0);
        let omega = HermitianMatrix::outer(&[C64::new(s, 0.0), z, z, C64::new(s, 0.0)]);
        let sol = cap_base_norm(&omega, shape(2, 2), &AdmmSettings::default()).unwrap();
        let b = &sol.bracket;
        assert!(b.lower <= b.upper + 1e-12);
        assert!(b.upper - b.lower < 1e-6, "{b:?}");
        assert!(b.upper >= trace_norm(&omega.partial_transpose(shape(2, 2)).unwrap()) - 1e-6);
    }

    #[test]
    fn conv_ratio_of_multiples() {
        let i4 = HermitianMatrix::identity(4);
        let br = conv_sup_ratio(&i4.scale(3.0), &i4, Some((&i4, &HermitianMatrix::zeros(4))), shape(2, 2), &AdmmSettings::default()).unwrap();
        assert!(br.lower <= 3.0 + 1e-9 && br.upper >= 3.0 - 1e-9);
        assert!(br.upper - br.lower < 1e-6, "{br:?}");
    }
}
