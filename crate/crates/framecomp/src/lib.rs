//! Completion of finite vector families to tight frames with prescribed norms.
//!
//! Given a family `F` of vectors in ℝⁿ and a non-increasing sequence of
//! prescribed squared norms, this crate decides whether `F` can be extended to
//! a tight frame by vectors carrying exactly those norms, computes the minimal
//! number of completion vectors (which may be finite, infinite, or not exist),
//! and explicitly constructs completions together with verification residuals.
//!
//! The library is organized around the pipeline:
//!
//! * [`frame`] — vector families, the frame operator `S = Σ fᵢfᵢᵀ`, its
//!   spectrum, and tightness tests;
//! * [`majorization`] — prefix-sum dominance between non-increasing sequences,
//!   the admissibility notion linking squared norms to spectra;
//! * [`completion`] — feasibility of completing with `r` vectors of prescribed
//!   norms, the running threshold table `c₀ ≤ c₁ ≤ … ≤ cₙ`, and minimal counts;
//! * [`construct`] — materializing completions, either through an
//!   eigendecomposition of `cI − S` or through a Cholesky factor, finishing
//!   with norm-steering plane rotations;
//! * [`linalg`] — the dense symmetric kernels backing all of the above;
//! * [`cli`] — JSON problem files and the command implementations.

pub mod cli;
pub mod completion;
pub mod construct;
mod error;
pub mod frame;
pub mod linalg;
pub mod majorization;

pub use error::{Error, Result};

/// Default relative tolerance for feasibility and equality tests.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Default positivity margin `beta` for the Cholesky completion pipeline.
pub const DEFAULT_BETA: f64 = 1.0;
