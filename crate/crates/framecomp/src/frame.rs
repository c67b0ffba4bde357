//! Vector families, the frame operator, and tightness tests.

use crate::error::{Error, Result};
use crate::linalg::{jacobi_eigen, EigenDecomp, SymMatrix};

/// Tolerance passed to the eigensolver when analyzing a family.
const EIGEN_TOL: f64 = 1e-12;

/// A finite family of vectors in ℝⁿ. The family may be empty and the frame
/// operator may be singular; nothing here assumes the family spans.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorFamily {
    dim: usize,
    vectors: Vec<Vec<f64>>,
}

impl VectorFamily {
    pub fn new(dim: usize, vectors: Vec<Vec<f64>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Domain("dimension must be at least 1".into()));
        }
        for (i, v) in vectors.iter().enumerate() {
            if v.len() != dim {
                return Err(Error::Domain(format!(
                    "vector {i} has length {}, expected {dim}",
                    v.len()
                )));
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::Domain(format!("vector {i} has a non-finite entry")));
            }
        }
        Ok(VectorFamily { dim, vectors })
    }

    pub fn empty(dim: usize) -> Result<Self> {
        Self::new(dim, Vec::new())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of vectors in the family.
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    /// The family extended by further vectors (checked for dimension).
    pub fn extended(&self, extra: &[Vec<f64>]) -> Result<VectorFamily> {
        let mut vectors = self.vectors.clone();
        vectors.extend(extra.iter().cloned());
        VectorFamily::new(self.dim, vectors)
    }
}

/// Frame operator together with its spectral data.
///
/// `alpha` is the trace of the operator (equal to the squared-norm sum of the
/// family) and `h = n·λ₁ - alpha` measures the distance from tightness:
/// it vanishes exactly when the operator is a multiple of the identity.
#[derive(Debug, Clone)]
pub struct FrameAnalysis {
    pub op: SymMatrix,
    pub spectrum: EigenDecomp,
    pub alpha: f64,
    pub h: f64,
}

impl FrameAnalysis {
    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    /// Largest eigenvalue.
    pub fn lambda_max(&self) -> f64 {
        self.spectrum.values[0]
    }

    /// Sum of the `k` smallest eigenvalues.
    pub fn smallest_sum(&self, k: usize) -> f64 {
        let n = self.dim();
        assert!(k <= n);
        self.spectrum.values[n - k..].iter().sum()
    }
}

/// The frame operator `S = Σᵢ fᵢ fᵢᵀ` as a matrix; positive semidefinite,
/// zero for the empty family.
pub fn frame_operator(f: &VectorFamily) -> SymMatrix {
    let mut s = SymMatrix::zeros(f.dim());
    for v in f.vectors() {
        s.add_outer(v);
    }
    s
}

/// Frame operator plus spectrum, trace, and tightness deficit.
pub fn analyze(f: &VectorFamily) -> Result<FrameAnalysis> {
    let op = frame_operator(f);
    let spectrum = jacobi_eigen(&op, EIGEN_TOL)?;
    let alpha = op.trace();
    let n = f.dim() as f64;
    let h = (n * spectrum.values[0] - alpha).max(0.0);
    Ok(FrameAnalysis {
        op,
        spectrum,
        alpha,
        h,
    })
}

/// Max-entry norm of `S - c·I`; a small value certifies that the family is a
/// c-tight frame.
pub fn tightness_residual(f: &VectorFamily, c: f64) -> f64 {
    assert!(c >= 0.0, "tight constant must be nonnegative");
    frame_operator(f).residual_from_scaled_identity(c)
}


#[cfg(test)]
mod tests {
    use super::fixtures::{axis_family, onb, two_vector_family};
    use super::*;

    #[test]
    fn operator_of_axis_family_is_diagonal() {
        let s = frame_operator(&axis_family());
        for i in 0..3 {
            for j in 0..3 {
                let expect = match (i, j) {
                    (0, 0) | (1, 1) => 2.0,
                    (2, 2) => 1.0,
                    _ => 0.0,
                };
                assert!((s.get(i, j) - expect).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn operator_of_two_vector_family() {
        let s = frame_operator(&two_vector_family(2.0 * std::f64::consts::PI / 3.0));
        let s3 = 3.0f64.sqrt();
        assert!((s.get(0, 0) - 1.25).abs() < 1e-14);
        assert!((s.get(0, 1) + s3 / 4.0).abs() < 1e-14);
        assert!((s.get(1, 1) - 0.75).abs() < 1e-14);
        // Eigenvalues must come out as 1 ± cos θ.
        let an = analyze(&two_vector_family(2.0 * std::f64::consts::PI / 3.0)).unwrap();
        assert!((an.spectrum.values[0] - 1.5).abs() < 1e-12);
        assert!((an.spectrum.values[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn empty_family_gives_zero_operator() {
        let f = VectorFamily::empty(2).unwrap();
        assert_eq!(frame_operator(&f).max_abs(), 0.0);
        let an = analyze(&f).unwrap();
        assert_eq!(an.alpha, 0.0);
        assert_eq!(an.h, 0.0);
    }

    #[test]
    fn analyze_axis_family() {
        let an = analyze(&axis_family()).unwrap();
        assert!((an.alpha - 5.0).abs() < 1e-12);
        assert!((an.spectrum.values[0] - 2.0).abs() < 1e-12);
        assert!((an.spectrum.values[1] - 2.0).abs() < 1e-12);
        assert!((an.spectrum.values[2] - 1.0).abs() < 1e-12);
        assert!((an.h - 1.0).abs() < 1e-12);
    }

    #[test]
    fn analyze_two_vector_family_deficit() {
        let an = analyze(&two_vector_family(2.0 * std::f64::consts::PI / 3.0)).unwrap();
        assert!((an.h - 1.0).abs() < 1e-12);
    }

    #[test]
    fn orthonormal_basis_is_already_tight() {
        let f = onb(4);
        let an = analyze(&f).unwrap();
        assert!(an.spectrum.values.iter().all(|&v| (v - 1.0).abs() < 1e-12));
        assert!(an.h.abs() < 1e-12);
        assert!(tightness_residual(&f, 1.0) < 1e-15);
    }

    #[test]
    fn tightness_residual_examples() {
        let theta = 2.0 * std::f64::consts::PI / 3.0;
        let mercedes = two_vector_family(theta)
            .extended(&[vec![-0.5, -(3.0f64.sqrt()) / 2.0]])
            .unwrap();
        assert!(tightness_residual(&mercedes, 1.5) <= 1e-12);

        assert!((tightness_residual(&axis_family(), 2.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn trace_matches_squared_norm_sum() {
        let f = VectorFamily::new(
            3,
            vec![
                vec![0.3, -1.1, 0.7],
                vec![2.0, 0.4, -0.2],
                vec![-0.6, 0.9, 1.4],
                vec![0.05, 0.0, -2.3],
            ],
        )
        .unwrap();
        let an = analyze(&f).unwrap();
        let sum: f64 = f
            .vectors()
            .iter()
            .map(|v| v.iter().map(|x| x * x).sum::<f64>())
            .sum();
        assert!((an.alpha - sum).abs() <= 1e-10 * (1.0 + sum));
    }
}
