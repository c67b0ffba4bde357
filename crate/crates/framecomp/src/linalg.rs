//! Dense real symmetric kernels: cyclic Jacobi eigendecomposition, Cholesky
//! factorization, an operator-norm upper bound, and norm-steering plane
//! rotations on matrix columns.
//!
//! Everything here is sized for desk-scale problems (n up to a few hundred);
//! matrices are stored densely and operations are straightforward loops.

use crate::error::{Error, Result};

/// Dense real symmetric matrix, row-major storage.
///
/// Symmetry is enforced at construction by averaging mirrored entries.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl SymMatrix {
    /// Build from a row-major `n*n` slice, averaging `(a[i][j] + a[j][i]) / 2`.
    pub fn from_rows(n: usize, entries: &[f64]) -> Self {
        assert!(n >= 1, "dimension must be at least 1");
        assert_eq!(entries.len(), n * n, "entry count must be n*n");
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = 0.5 * (entries[i * n + j] + entries[j * n + i]);
            }
        }
        SymMatrix { n, entries: out }
    }

    pub fn zeros(n: usize) -> Self {
        assert!(n >= 1);
        SymMatrix {
            n,
            entries: vec![0.0; n * n],
        }
    }

    /// `c * I`.
    pub fn scaled_identity(n: usize, c: f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.entries[i * n + i] = c;
        }
        m
    }

    pub fn identity(n: usize) -> Self {
        Self::scaled_identity(n, 1.0)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    /// Set both `(i, j)` and `(j, i)`.
    #[inline]
    pub fn set_sym(&mut self, i: usize, j: usize, v: f64) {
        self.entries[i * self.n + j] = v;
        self.entries[j * self.n + i] = v;
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0f64, |m, &x| m.max(x.abs()))
    }

    pub fn frobenius(&self) -> f64 {
        self.entries.iter().map(|&x| x * x).sum::<f64>().sqrt()
    }

    /// Entrywise difference `self - other`.
    pub fn sub(&self, other: &SymMatrix) -> SymMatrix {
        assert_eq!(self.n, other.n);
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a - b)
            .collect();
        SymMatrix {
            n: self.n,
            entries,
        }
    }

    /// Max-entry norm of `self - c*I`.
    pub fn residual_from_scaled_identity(&self, c: f64) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for j in 0..self.n {
                let target = if i == j { c } else { 0.0 };
                worst = worst.max((self.get(i, j) - target).abs());
            }
        }
        worst
    }

    /// Accumulate the outer product `v vᵀ` into the matrix.
    pub fn add_outer(&mut self, v: &[f64]) {
        assert_eq!(v.len(), self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                self.entries[i * self.n + j] += v[i] * v[j];
            }
        }
    }
}

/// Dense rectangular matrix with column-major storage; columns are the unit
/// of work for rotations and norm accounting.
#[derive(Debug, Clone, PartialEq)]
pub struct ColumnMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl ColumnMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1);
        ColumnMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_columns(rows: usize, columns: &[Vec<f64>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows, "column length mismatch");
            m.col_mut(j).copy_from_slice(col);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn col(&self, j: usize) -> &[f64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    #[inline]
    pub fn col_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn col_sq_norm(&self, j: usize) -> f64 {
        self.col(j).iter().map(|&x| x * x).sum()
    }

    /// The Gram matrix `X Xᵀ` (rows × rows).
    pub fn gram(&self) -> SymMatrix {
        let mut g = SymMatrix::zeros(self.rows);
        for j in 0..self.cols {
            g.add_outer(self.col(j));
        }
        g
    }

    pub fn to_columns(&self) -> Vec<Vec<f64>> {
        (0..self.cols).map(|j| self.col(j).to_vec()).collect()
    }

    /// Selected columns, in the given order, as a new matrix.
    pub fn select_columns(&self, indices: &[usize]) -> ColumnMatrix {
        let mut out = ColumnMatrix::zeros(self.rows, indices.len());
        for (k, &j) in indices.iter().enumerate() {
            let src = self.col(j).to_vec();
            out.col_mut(k).copy_from_slice(&src);
        }
        out
    }
}

/// Eigendecomposition of a symmetric matrix: `values` sorted non-increasing,
/// column `i` of `vectors` paired with `values[i]`.
#[derive(Debug, Clone)]
pub struct EigenDecomp {
    pub values: Vec<f64>,
    pub vectors: ColumnMatrix,
}

impl EigenDecomp {
    /// Reconstruct `Q diag(values) Qᵀ`.
    pub fn reconstruct(&self) -> SymMatrix {
        let n = self.values.len();
        let mut m = SymMatrix::zeros(n);
        for (k, &lam) in self.values.iter().enumerate() {
            let col = self.vectors.col(k);
            for i in 0..n {
                for j in 0..n {
                    m.entries[i * n + j] += lam * col[i] * col[j];
                }
            }
        }
        m
    }

    /// Max-entry norm of `QᵀQ - I`.
    pub fn orthogonality_defect(&self) -> f64 {
        let n = self.values.len();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let dot: f64 = self
                    .vectors
                    .col(i)
                    .iter()
                    .zip(self.vectors.col(j))
                    .map(|(a, b)| a * b)
                    .sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }
}

const MAX_SWEEPS: usize = 100;

/// Eigendecomposition by cyclic Jacobi rotations with a fixed row-major sweep
/// order, so results are deterministic for a given input.
///
/// Converges when the largest off-diagonal magnitude drops to
/// `tol * frobenius(m)`; errors out after 100 sweeps (unreachable for the
/// matrix sizes this crate targets).
pub fn jacobi_eigen(m: &SymMatrix, tol: f64) -> Result<EigenDecomp> {
    assert!(tol > 0.0, "tolerance must be positive");
    let n = m.dim();
    let mut a = m.entries.clone();
    let mut q = ColumnMatrix::zeros(n, n);
    for i in 0..n {
        q.col_mut(i)[i] = 1.0;
    }

    let idx = |i: usize, j: usize| i * n + j;
    let threshold = tol * m.frobenius();

    let max_off = |a: &[f64]| -> f64 {
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                worst = worst.max(a[idx(i, j)].abs());
            }
        }
        worst
    };

    if n > 1 && max_off(&a) > threshold {
        let mut converged = false;
        for sweep in 0..MAX_SWEEPS {
            for p in 0..n - 1 {
                for r in (p + 1)..n {
                    let apr = a[idx(p, r)];
                    if apr == 0.0 {
                        continue;
                    }
                    let app = a[idx(p, p)];
                    let arr = a[idx(r, r)];
                    // Classic annihilating rotation for the (p, r) pivot.
                    let theta = (arr - app) / (2.0 * apr);
                    let t = if theta >= 0.0 {
                        1.0 / (theta + (1.0 + theta * theta).sqrt())
                    } else {
                        -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                    };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = t * c;

                    for k in 0..n {
                        if k == p || k == r {
                            continue;
                        }
                        let akp = a[idx(k, p)];
                        let akr = a[idx(k, r)];
                        let new_kp = c * akp - s * akr;
                        let new_kr = s * akp + c * akr;
                        a[idx(k, p)] = new_kp;
                        a[idx(p, k)] = new_kp;
                        a[idx(k, r)] = new_kr;
                        a[idx(r, k)] = new_kr;
                    }
                    a[idx(p, p)] = app - t * apr;
                    a[idx(r, r)] = arr + t * apr;
                    a[idx(p, r)] = 0.0;
                    a[idx(r, p)] = 0.0;

                    for k in 0..n {
                        let qkp = q.col(p)[k];
                        let qkr = q.col(r)[k];
                        q.col_mut(p)[k] = c * qkp - s * qkr;
                        q.col_mut(r)[k] = s * qkp + c * qkr;
                    }
                }
            }
            if max_off(&a) <= threshold {
                converged = true;
                break;
            }
            if sweep + 1 == MAX_SWEEPS {
                return Err(Error::NonConvergence {
                    sweeps: MAX_SWEEPS,
                    off: max_off(&a),
                });
            }
        }
        debug_assert!(converged);
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[idx(j, j)].partial_cmp(&a[idx(i, i)]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| a[idx(i, i)]).collect();
    let vectors = q.select_columns(&order);

    Ok(EigenDecomp { values, vectors })
}

/// Lower-triangular Cholesky factor `L` with `L Lᵀ = m`.
///
/// Any pivot at or below `min_pivot` aborts with a positivity error; callers
/// choose the floor from their positivity margin.
pub fn cholesky_lower(m: &SymMatrix, min_pivot: f64) -> Result<ColumnMatrix> {
    assert!(min_pivot > 0.0, "pivot floor must be positive");
    let n = m.dim();
    let mut l = ColumnMatrix::zeros(n, n);
    for j in 0..n {
        for i in j..n {
            let mut s = m.get(i, j);
            for k in 0..j {
                s -= l.col(k)[i] * l.col(k)[j];
            }
            if i == j {
                if s <= min_pivot {
                    return Err(Error::Positivity {
                        index: j,
                        pivot: s,
                        floor: min_pivot,
                    });
                }
                l.col_mut(j)[j] = s.sqrt();
            } else {
                let d = l.col(j)[j];
                l.col_mut(j)[i] = s / d;
            }
        }
    }
    Ok(l)
}

/// Row-sum (induced ∞-norm) upper bound for the spectral norm of a symmetric
/// matrix: `max_i Σ_j |m[i][j]|`.
pub fn opnorm_upper_bound(m: &SymMatrix) -> f64 {
    let n = m.dim();
    let mut worst = 0.0f64;
    for i in 0..n {
        let row_sum: f64 = (0..n).map(|j| m.get(i, j).abs()).sum();
        worst = worst.max(row_sum);
    }
    worst
}

/// How a rotation target is met for a column pair.
pub(crate) enum RotationPlan {
    /// One column already carries the target norm; nothing to do.
    AlreadyAt { fixed: usize },
    /// Rotate the pair; afterwards `fixed` carries squared norm `t`.
    Rotate { fixed: usize, other: usize, cos: f64, sin: f64 },
}

/// Solve for the plane rotation that moves the squared norm of one of the two
/// columns to `t`, leaving the pair's Gram contribution unchanged.
///
/// With `b_hi ≥ b_lo` the squared column norms and `g` their inner product,
/// the tangent solves `(b_lo - t)τ² + 2gτ + (b_hi - t) = 0`; the root is taken
/// in the cancellation-free form. Requires `b_lo ≤ t ≤ b_hi`.
pub(crate) fn solve_rotation(
    x: &ColumnMatrix,
    j: usize,
    k: usize,
    t: f64,
) -> Result<RotationPlan> {
    let bj = x.col_sq_norm(j);
    let bk = x.col_sq_norm(k);
    let (hi, lo, b_hi, b_lo) = if bj >= bk { (j, k, bj, bk) } else { (k, j, bk, bj) };

    let endpoint = |a: f64, b: f64| (a - b).abs() <= 1e-13 * (1.0 + a.abs().max(b.abs()));
    if endpoint(t, b_hi) {
        return Ok(RotationPlan::AlreadyAt { fixed: hi });
    }
    if endpoint(t, b_lo) {
        return Ok(RotationPlan::AlreadyAt { fixed: lo });
    }
    if t < b_lo || t > b_hi {
        return Err(Error::Bracket {
            target: t,
            lo: b_lo,
            hi: b_hi,
        });
    }

    let g: f64 = x.col(hi).iter().zip(x.col(lo)).map(|(a, b)| a * b).sum();
    // Discriminant (quarter form) is nonnegative inside the bracket.
    let disc = (g * g + (t - b_lo) * (b_hi - t)).max(0.0);
    let q = -(g + f64::copysign(1.0, g) * disc.sqrt());
    let lead = b_lo - t;
    let tau = if lead.abs() > 1e-14 {
        q / lead
    } else {
        (b_hi - t) / q
    };
    let cos = 1.0 / (1.0 + tau * tau).sqrt();
    let sin = tau * cos;
    Ok(RotationPlan::Rotate {
        fixed: hi,
        other: lo,
        cos,
        sin,
    })
}

/// In-place plane rotation of columns: `C_fixed ← c·C_fixed + s·C_other`,
/// `C_other ← -s·C_fixed + c·C_other`.
pub(crate) fn apply_rotation(x: &mut ColumnMatrix, fixed: usize, other: usize, cos: f64, sin: f64) {
    for i in 0..x.rows() {
        let u = x.col(fixed)[i];
        let v = x.col(other)[i];
        x.col_mut(fixed)[i] = cos * u + sin * v;
        x.col_mut(other)[i] = -sin * u + cos * v;
    }
}

/// Rotate columns `j` and `k` so that one of them ends with squared norm
/// exactly `t`; returns the new matrix and the index of that column.
///
/// The Gram matrix `X Xᵀ` and the two-column squared-norm sum are preserved.
/// The target must lie between the two current squared norms.
pub fn rotate_to_target(
    x: &ColumnMatrix,
    j: usize,
    k: usize,
    t: f64,
) -> Result<(ColumnMatrix, usize)> {
    assert!(j != k, "column indices must differ");
    assert!(j < x.cols() && k < x.cols(), "column index out of range");
    assert!(t >= 0.0, "target squared norm must be nonnegative");
    let mut out = x.clone();
    match solve_rotation(x, j, k, t)? {
        RotationPlan::AlreadyAt { fixed } => Ok((out, fixed)),
        RotationPlan::Rotate {
            fixed,
            other,
            cos,
            sin,
        } => {
            apply_rotation(&mut out, fixed, other, cos, sin);
            Ok((out, fixed))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_entry_diff(a: &SymMatrix, b: &SymMatrix) -> f64 {
        a.sub(b).max_abs()
    }

    #[test]
    fn jacobi_diagonal_input_is_sorted_with_permutation_vectors() {
        let m = SymMatrix::from_rows(3, &[3.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 2.0]);
        let e = jacobi_eigen(&m, 1e-12).unwrap();
        assert_eq!(e.values, vec![3.0, 2.0, 1.0]);
        // No rotations happen on a diagonal input, so Q is an exact permutation.
        for j in 0..3 {
            for i in 0..3 {
                let v = e.vectors.col(j)[i];
                assert!(v == 0.0 || v == 1.0, "entry {v} is not 0/1");
            }
            assert!((e.vectors.col_sq_norm(j) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn jacobi_two_vector_frame_operator_spectrum() {
        // Frame operator of {(1,0), (cos θ, sin θ)} at θ = 2π/3 has
        // eigenvalues 1 ± cos θ = 3/2, 1/2.
        let s3 = 3.0f64.sqrt();
        let m = SymMatrix::from_rows(2, &[1.25, -s3 / 4.0, -s3 / 4.0, 0.75]);
        let e = jacobi_eigen(&m, 1e-12).unwrap();
        assert!((e.values[0] - 1.5).abs() < 1e-12);
        assert!((e.values[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn jacobi_reconstructs_random_5x5() {
        let raw = [
            1.3, 0.2, -0.7, 0.05, 0.9, //
            0.2, -2.1, 0.4, 1.1, -0.3, //
            -0.7, 0.4, 0.8, -0.6, 0.01, //
            0.05, 1.1, -0.6, 2.4, 0.33, //
            0.9, -0.3, 0.01, 0.33, -1.7,
        ];
        let m = SymMatrix::from_rows(5, &raw);
        let e = jacobi_eigen(&m, 1e-12).unwrap();
        let bound = 1e-9 * (1.0 + m.max_abs());
        assert!(max_entry_diff(&e.reconstruct(), &m) <= bound);
        assert!(e.orthogonality_defect() <= 1e-10);
        for w in e.values.windows(2) {
            assert!(w[0] >= w[1]);
        }
    }

    #[test]
    fn jacobi_zero_matrix() {
        let e = jacobi_eigen(&SymMatrix::zeros(4), 1e-12).unwrap();
        assert!(e.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn cholesky_identity() {
        let l = cholesky_lower(&SymMatrix::identity(3), 1e-12).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_eq!(l.col(j)[i], expect);
            }
        }
    }

    #[test]
    fn cholesky_2x2_closed_form() {
        let m = SymMatrix::from_rows(2, &[2.0, 1.0, 1.0, 2.0]);
        let l = cholesky_lower(&m, 1e-12).unwrap();
        assert!((l.col(0)[0] - 2.0f64.sqrt()).abs() < 1e-14);
        assert!((l.col(0)[1] - 1.0 / 2.0f64.sqrt()).abs() < 1e-14);
        assert!(l.col(1)[0] == 0.0);
        assert!((l.col(1)[1] - 1.5f64.sqrt()).abs() < 1e-14);
        // Independent check: multiply the factor back.
        let g = l.gram();
        assert!(max_entry_diff(&g, &m) <= 1e-10 * (1.0 + m.max_abs()));
    }

    #[test]
    fn cholesky_rejects_pivot_below_floor() {
        let m = SymMatrix::scaled_identity(3, 0.5);
        match cholesky_lower(&m, 1.0) {
            Err(Error::Positivity { pivot, .. }) => assert!((pivot - 0.5).abs() < 1e-15),
            other => panic!("expected positivity error, got {other:?}"),
        }
    }

    #[test]
    fn opnorm_bound_examples() {
        let d = SymMatrix::from_rows(3, &[2.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 1.0]);
        assert_eq!(opnorm_upper_bound(&d), 2.0);
        assert_eq!(opnorm_upper_bound(&SymMatrix::zeros(2)), 0.0);

        let s3 = 3.0f64.sqrt();
        let m = SymMatrix::from_rows(2, &[1.25, -s3 / 4.0, -s3 / 4.0, 0.75]);
        let bound = opnorm_upper_bound(&m);
        assert!((bound - (1.25 + s3 / 4.0)).abs() < 1e-14);
        let lam_max = jacobi_eigen(&m, 1e-12).unwrap().values[0];
        assert!(bound >= lam_max);
    }

    #[test]
    fn rotate_endpoint_target_leaves_matrix_unchanged() {
        let x = ColumnMatrix::from_columns(2, &[vec![1.0, 0.0], vec![0.0, 1.0]]);
        let (y, fixed) = rotate_to_target(&x, 0, 1, 1.0).unwrap();
        assert_eq!(y, x);
        assert!((y.col_sq_norm(fixed) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rotate_steers_norm_pair_and_preserves_gram() {
        let x = ColumnMatrix::from_columns(
            2,
            &[vec![2.5f64.sqrt(), 0.0], vec![0.0, 1.5f64.sqrt()]],
        );
        let before = x.gram();
        let (y, fixed) = rotate_to_target(&x, 0, 1, 2.0).unwrap();
        assert!((y.col_sq_norm(fixed) - 2.0).abs() <= 1e-11 * 2.0);
        let other = 1 - fixed;
        assert!((y.col_sq_norm(fixed) + y.col_sq_norm(other) - 4.0).abs() < 1e-12);
        assert!(max_entry_diff(&y.gram(), &before) <= 1e-10 * (1.0 + before.max_abs()));
    }

    #[test]
    fn rotate_rejects_target_outside_bracket() {
        let x = ColumnMatrix::from_columns(2, &[vec![1.0, 0.0], vec![0.0, 2.0]]);
        match rotate_to_target(&x, 0, 1, 9.0) {
            Err(Error::Bracket { .. }) => {}
            other => panic!("expected bracket error, got {other:?}"),
        }
    }
}
