//! Materializing completions.
//!
//! Two routes produce the completion vectors. The optimal route
//! eigendecomposes the defect operator `cI - S` at the minimal feasible count
//! and factors it exactly. The Cholesky route trades optimality for a
//! factorization that never diagonalizes anything: it inflates the tight
//! constant until `cI - S` is safely positive definite, takes the Cholesky
//! factor, and lets the rotation loop do the rest. Both finish by steering
//! column norms onto the prescribed values with Gram-preserving plane
//! rotations, one column fixed per step.

use crate::completion::{describe_infeasibility, feasible_finite, tight_constant, NormSpec};
use crate::error::{Error, Result};
use crate::frame::{analyze, frame_operator, tightness_residual, VectorFamily};
use crate::linalg::{
    apply_rotation, cholesky_lower, jacobi_eigen, opnorm_upper_bound, solve_rotation, ColumnMatrix,
    RotationPlan, SymMatrix,
};
use crate::majorization::{majorizes, SortedSeq};

/// Which pipeline produced a certificate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Eigendecomposition of the defect operator at the requested count.
    Optimal,
    /// Operator-norm bound, bracketed count, Cholesky factor.
    Cholesky,
}

impl Method {
    /// Wire name used in certificate files and on the command line.
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Optimal => "optimal",
            Method::Cholesky => "theorem-c",
        }
    }

    pub fn from_str(s: &str) -> Result<Method> {
        match s {
            "optimal" => Ok(Method::Optimal),
            "theorem-c" => Ok(Method::Cholesky),
            other => Err(Error::Parse(format!(
                "unknown method {other:?}, expected \"optimal\" or \"theorem-c\""
            ))),
        }
    }
}

/// A constructed completion together with its verification data.
#[derive(Debug, Clone)]
pub struct CompletionCertificate {
    /// The completion vectors g₁..g_r.
    pub vectors: Vec<Vec<f64>>,
    /// Tight constant of the completed frame.
    pub c: f64,
    /// Number of completion vectors.
    pub r: usize,
    /// `max_i |‖gᵢ‖² - aᵢ|`.
    pub norm_residual: f64,
    /// Max-entry norm of `S_{F∪G} - cI`.
    pub tightness_residual: f64,
    pub method: Method,
    /// Plane rotations spent in the norm-steering loop (at most r-1).
    pub rotation_count: usize,
}

/// Output of [`realize_bessel`]: the factor plus loop statistics.
#[derive(Debug, Clone)]
pub struct Realization {
    /// n×r matrix `Y` with `Y Yᵀ` equal to the target and squared column
    /// norms equal to the requested sequence.
    pub columns: ColumnMatrix,
    pub rotation_count: usize,
    /// Largest max-entry deviation of the working Gram matrix from the
    /// target observed after any single step of the loop.
    pub max_gram_drift: f64,
}

/// Factor a positive semidefinite target as `Y Yᵀ` with prescribed squared
/// column norms.
///
/// The target spectrum must majorize the requested norms (padded with zeros
/// as needed); the factor starts as `Q diag(√λ)` and the rotation loop steers
/// the column norms onto the targets.
pub fn realize_bessel(target: &SymMatrix, a: &SortedSeq, tol: f64) -> Result<Realization> {
    let n = target.dim();
    let eig = jacobi_eigen(target, 1e-12)?;
    let lam_scale = 1.0 + eig.values[0].abs().max(eig.values[n - 1].abs());
    if eig.values[n - 1] < -tol * lam_scale {
        return Err(Error::Majorization {
            detail: format!(
                "target operator is not positive semidefinite (smallest eigenvalue {:.3e})",
                eig.values[n - 1]
            ),
        });
    }
    let clamped: Vec<f64> = eig.values.iter().map(|&v| v.max(0.0)).collect();
    let spectrum = SortedSeq::non_increasing(clamped.clone())?;
    if !majorizes(&spectrum, a, tol) {
        return Err(Error::Majorization {
            detail: majorization_failure(&spectrum, a),
        });
    }

    let r = a.len();
    let m = n.max(r);
    let mut x = ColumnMatrix::zeros(n, m);
    for j in 0..n {
        let scale = clamped[j].sqrt();
        let src: Vec<f64> = eig.vectors.col(j).iter().map(|&q| scale * q).collect();
        x.col_mut(j).copy_from_slice(&src);
    }
    let targets = a.padded(m - r);

    let loop_out = equalize(x, &targets, target, tol)?;
    let columns = loop_out.matrix.select_columns(&loop_out.assignment[..r]);
    Ok(Realization {
        columns,
        rotation_count: loop_out.rotations,
        max_gram_drift: loop_out.max_drift,
    })
}

fn majorization_failure(spectrum: &SortedSeq, a: &SortedSeq) -> String {
    let t = spectrum.len().min(a.len());
    for j in 1..=t {
        if spectrum.prefix_sum(j) < a.prefix_sum(j) {
            return format!(
                "prefix {j}: spectrum sum {:.6e} is below the requested norm sum {:.6e}",
                spectrum.prefix_sum(j),
                a.prefix_sum(j)
            );
        }
    }
    format!(
        "totals differ: spectrum sums to {:.6e}, requested norms to {:.6e}",
        spectrum.total(),
        a.total()
    )
}

struct LoopOutput {
    matrix: ColumnMatrix,
    /// `assignment[i]` is the column holding target `i`.
    assignment: Vec<usize>,
    rotations: usize,
    max_drift: f64,
}

/// Drive the squared column norms of `x` onto `targets` (non-increasing,
/// same length as the column count) with plane rotations, fixing one column
/// per step: the largest remaining target is met from the extreme pair of
/// unfixed columns, which the majorization precondition keeps bracketed.
fn equalize(
    mut x: ColumnMatrix,
    targets: &SortedSeq,
    reference: &SymMatrix,
    tol: f64,
) -> Result<LoopOutput> {
    let m = x.cols();
    assert_eq!(targets.len(), m, "one target per column");
    let mut fixed = vec![false; m];
    let mut assignment = vec![usize::MAX; m];
    let mut rotations = 0usize;
    let mut max_drift = 0.0f64;

    let near = |t: f64, b: f64| (t - b).abs() <= 1e-12 * (1.0 + t.abs() + b.abs());

    for ti in 0..m {
        let t = targets.get(ti);
        let live: Vec<(usize, f64)> = (0..m)
            .filter(|&j| !fixed[j])
            .map(|j| (j, x.col_sq_norm(j)))
            .collect();

        let chosen = if live.len() == 1 {
            let (j, b) = live[0];
            debug_assert!(
                near(t, b) || (t - b).abs() <= tol * (1.0 + t.abs() + b.abs()),
                "last column norm {b} should match target {t}"
            );
            j
        } else {
            let &(hi, b_hi) = live
                .iter()
                .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
                .unwrap();
            let &(lo, b_lo) = live
                .iter()
                .filter(|&&(j, _)| j != hi)
                .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
                .unwrap();
            if near(t, b_hi) {
                hi
            } else if near(t, b_lo) {
                lo
            } else {
                match solve_rotation(&x, hi, lo, t)? {
                    RotationPlan::AlreadyAt { fixed: col } => col,
                    RotationPlan::Rotate {
                        fixed: col,
                        other,
                        cos,
                        sin,
                    } => {
                        apply_rotation(&mut x, col, other, cos, sin);
                        rotations += 1;
                        col
                    }
                }
            }
        };
        fixed[chosen] = true;
        assignment[ti] = chosen;

        let drift = x.gram().sub(reference).max_abs();
        max_drift = max_drift.max(drift);
    }

    Ok(LoopOutput {
        matrix: x,
        assignment,
        rotations,
        max_drift,
    })
}

fn certificate_residuals(
    f: &VectorFamily,
    vectors: &[Vec<f64>],
    a: &SortedSeq,
    c: f64,
) -> Result<(f64, f64)> {
    let mut norm_residual = 0.0f64;
    for (g, i) in vectors.iter().zip(0..a.len()) {
        let sq: f64 = g.iter().map(|x| x * x).sum();
        norm_residual = norm_residual.max((sq - a.get(i)).abs());
    }
    let union = f.extended(vectors)?;
    Ok((norm_residual, tightness_residual(&union, c)))
}

/// Complete with exactly `r` vectors through the defect-operator route: the
/// tight constant is forced by the norms, and `cI - S` is factored with the
/// requested column norms.
pub fn complete_optimal(
    f: &VectorFamily,
    a: &NormSpec,
    r: usize,
    tol: f64,
) -> Result<CompletionCertificate> {
    let an = analyze(f)?;
    if !feasible_finite(&an, a, r, tol)? {
        return Err(Error::Infeasible {
            r,
            reason: describe_infeasibility(&an, a, r, tol),
        });
    }
    let c = tight_constant(&an, a, r)?;
    let n = f.dim();
    let target = SymMatrix::scaled_identity(n, c).sub(&an.op);
    let a_seq = a.leading(r)?;
    let realization = realize_bessel(&target, &a_seq, tol)?;
    let vectors = realization.columns.to_columns();
    let (norm_residual, tightness_residual) = certificate_residuals(f, &vectors, &a_seq, c)?;
    Ok(CompletionCertificate {
        vectors,
        c,
        r,
        norm_residual,
        tightness_residual,
        method: Method::Optimal,
        rotation_count: realization.rotation_count,
    })
}

/// Complete through the Cholesky pipeline.
///
/// An operator-norm bound `d` (the row-sum bound, or the exact top eigenvalue
/// when `exact_norm` is set) fixes a provisional constant
/// `c = max(d + beta, d + a₁)`; the count `r` is bracketed by
/// `Σ_{i<r} aᵢ < c·n - α ≤ Σ_{i≤r} aᵢ`; the constant is then re-derived from
/// the norms, `cI - S` is Cholesky-factored with floor `beta/2`, and the
/// rotation loop steers the factor's column norms onto `a₁..a_r`. The count
/// is generally larger than the minimal one.
pub fn complete_cholesky(
    f: &VectorFamily,
    a: &NormSpec,
    beta: f64,
    exact_norm: bool,
    tol: f64,
) -> Result<CompletionCertificate> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::Domain(format!(
            "positivity margin beta must be positive, got {beta}"
        )));
    }
    let an = analyze(f)?;
    let n = f.dim();
    let d = if exact_norm {
        an.lambda_max()
    } else {
        opnorm_upper_bound(&an.op)
    };
    let c_initial = (d + beta).max(d + a.first());
    let need = c_initial * n as f64 - an.alpha;
    let r = bracket_count(a, need)?;

    let c = tight_constant(&an, a, r)?;
    let target = SymMatrix::scaled_identity(n, c).sub(&an.op);
    let l = cholesky_lower(&target, beta / 2.0)?;

    let a_seq = a.leading(r)?;
    let col_norms = SortedSeq::from_unsorted((0..n).map(|j| l.col_sq_norm(j)).collect())?;
    if !majorizes(&col_norms, &a_seq, tol) {
        return Err(Error::Majorization {
            detail: majorization_failure(&col_norms, &a_seq),
        });
    }

    debug_assert!(r >= n, "the bracketed count sits at or above the dimension");
    let mut x = ColumnMatrix::zeros(n, r);
    for j in 0..n {
        let src = l.col(j).to_vec();
        x.col_mut(j).copy_from_slice(&src);
    }
    let loop_out = equalize(x, &a_seq, &target, tol)?;
    let columns = loop_out.matrix.select_columns(&loop_out.assignment[..r]);
    let vectors = columns.to_columns();
    let (norm_residual, tightness_residual) = certificate_residuals(f, &vectors, &a_seq, c)?;
    Ok(CompletionCertificate {
        vectors,
        c,
        r,
        norm_residual,
        tightness_residual,
        method: Method::Cholesky,
        rotation_count: loop_out.rotations,
    })
}

/// Least `r ≥ 1` with `Σ_{i≤r} aᵢ ≥ need`.
fn bracket_count(a: &NormSpec, need: f64) -> Result<usize> {
    const CAP: usize = 10_000_000;
    let budget_err = |needed: usize| Error::Budget {
        needed,
        available: a.available().unwrap_or(0),
    };

    let mut r = match a {
        NormSpec::Constant(v) => ((need / v).ceil().max(1.0)) as usize,
        NormSpec::Geometric { first, ratio } => {
            let total = first / (1.0 - ratio);
            if need >= total {
                return Err(Error::Budget {
                    needed: usize::MAX,
                    available: 0,
                });
            }
            (((total - need) / total).ln() / ratio.ln()).ceil().max(1.0) as usize
        }
        NormSpec::List(values) => {
            let mut acc = 0.0;
            for (i, v) in values.iter().enumerate() {
                acc += v;
                if acc >= need {
                    return Ok(i + 1);
                }
            }
            return Err(budget_err(values.len() + 1));
        }
    };
    r = r.clamp(1, CAP);
    while r > 1 && a.prefix_sum(r - 1).is_some_and(|p| p >= need) {
        r -= 1;
    }
    let mut guard = 0usize;
    while a.prefix_sum(r).is_none_or(|p| p < need) {
        if a.prefix_sum(r).is_none() {
            return Err(budget_err(r));
        }
        r += 1;
        guard += 1;
        if guard > CAP {
            return Err(budget_err(r));
        }
    }
    Ok(r)
}

/// Verification outcome for a certificate, rebuilt from scratch.
#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub r: usize,
    pub c_claimed: f64,
    /// `(Σ_{i≤r} aᵢ + α)/n`, when the spec covers `r` terms.
    pub c_expected: Option<f64>,
    pub norm_residual: Option<f64>,
    pub tightness_residual: Option<f64>,
    pub rotation_count: usize,
    pub shape_ok: bool,
    pub c_ok: bool,
    pub norms_ok: bool,
    pub tightness_ok: bool,
    pub rotations_ok: bool,
    pub pass: bool,
}

/// Re-derive every certificate claim from the raw inputs: the frame operator
/// of the union, the forced tight constant, and both residuals. Failures are
/// entries in the report, never errors.
pub fn verify(f: &VectorFamily, cert: &CompletionCertificate, a: &NormSpec) -> VerifyReport {
    let n = f.dim();
    let alpha = frame_operator(f).trace();

    let shape_ok = cert.vectors.len() == cert.r
        && cert
            .vectors
            .iter()
            .all(|g| g.len() == n && g.iter().all(|x| x.is_finite()));
    let c_expected = a
        .prefix_sum(cert.r)
        .map(|p| (p + alpha) / n as f64)
        .filter(|c| c.is_finite());

    let rotations_ok = cert.rotation_count <= cert.r.saturating_sub(1);

    if !shape_ok || c_expected.is_none() {
        return VerifyReport {
            r: cert.r,
            c_claimed: cert.c,
            c_expected,
            norm_residual: None,
            tightness_residual: None,
            rotation_count: cert.rotation_count,
            shape_ok,
            c_ok: false,
            norms_ok: false,
            tightness_ok: false,
            rotations_ok,
            pass: false,
        };
    }
    let c_expected_val = c_expected.unwrap();

    let mut norm_residual = 0.0f64;
    for (i, g) in cert.vectors.iter().enumerate() {
        let sq: f64 = g.iter().map(|x| x * x).sum();
        norm_residual = norm_residual.max((sq - a.term(i).unwrap()).abs());
    }
    let union = f
        .extended(&cert.vectors)
        .expect("shapes were checked above");
    let tightness = tightness_residual(&union, c_expected_val.max(0.0));

    let c_ok = (cert.c - c_expected_val).abs() <= 1e-10 * (1.0 + c_expected_val.abs());
    let norms_ok = norm_residual <= 1e-9 * (1.0 + a.first());
    let tightness_ok = tightness <= 1e-8 * (1.0 + c_expected_val);

    VerifyReport {
        r: cert.r,
        c_claimed: cert.c,
        c_expected,
        norm_residual: Some(norm_residual),
        tightness_residual: Some(tightness),
        rotation_count: cert.rotation_count,
        shape_ok,
        c_ok,
        norms_ok,
        tightness_ok,
        rotations_ok,
        pass: c_ok && norms_ok && tightness_ok && rotations_ok,
    }
}
