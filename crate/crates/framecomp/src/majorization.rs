//! Majorization between non-increasing nonnegative sequences.
//!
//! `b` majorizes `a` when every prefix sum of `b` dominates the matching
//! prefix sum of `a` (up to the shorter length) and the totals agree. Trailing
//! zeros on either side change nothing, which is exactly what makes the notion
//! usable for comparing norm lists of different lengths against spectra.
//!
//! Infinite norm sequences never appear here directly: callers hold a finite
//! truncation together with an analytic total and run the prefix checks up to
//! the ambient dimension, with the total-sum equality evaluated against the
//! analytic limit.

use crate::error::{Error, Result};

/// Finite non-increasing sequence of nonnegative reals with cached prefix
/// sums (`prefix[k]` is the sum of the first `k + 1` values, accumulated
/// left to right).
#[derive(Debug, Clone, PartialEq)]
pub struct SortedSeq {
    values: Vec<f64>,
    prefix: Vec<f64>,
}

impl SortedSeq {
    /// Validate and wrap an already non-increasing nonnegative sequence.
    pub fn non_increasing(values: Vec<f64>) -> Result<Self> {
        for (i, &v) in values.iter().enumerate() {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::Domain(format!(
                    "sequence entry {i} is {v}, expected a finite nonnegative value"
                )));
            }
            if i > 0 && values[i - 1] < v {
                return Err(Error::Domain(format!(
                    "sequence is not non-increasing at position {i}: {} < {v}",
                    values[i - 1]
                )));
            }
        }
        let mut prefix = Vec::with_capacity(values.len());
        let mut acc = 0.0;
        for &v in &values {
            acc += v;
            prefix.push(acc);
        }
        Ok(SortedSeq { values, prefix })
    }

    /// Sort descending, then wrap.
    pub fn from_unsorted(mut values: Vec<f64>) -> Result<Self> {
        values.sort_by(|a, b| b.partial_cmp(a).expect("non-NaN values"));
        Self::non_increasing(values)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, i: usize) -> f64 {
        self.values[i]
    }

    /// Sum of the first `k` values (`k = 0` gives 0).
    pub fn prefix_sum(&self, k: usize) -> f64 {
        assert!(k <= self.len(), "prefix length out of range");
        if k == 0 {
            0.0
        } else {
            self.prefix[k - 1]
        }
    }

    pub fn total(&self) -> f64 {
        self.prefix_sum(self.len())
    }

    /// Append `extra` zeros.
    pub fn padded(&self, extra: usize) -> SortedSeq {
        let mut values = self.values.clone();
        values.extend(std::iter::repeat(0.0).take(extra));
        SortedSeq::non_increasing(values).expect("padding preserves ordering")
    }
}

/// Does `b` majorize `a`? Prefix sums of `b` must dominate those of `a` up to
/// the shorter length, and the totals must agree, all to a relative tolerance
/// scaled by `1 + Σa`.
pub fn majorizes(b: &SortedSeq, a: &SortedSeq, tol: f64) -> bool {
    let t = b.len().min(a.len());
    let scale = 1.0 + a.total();
    for j in 1..=t {
        if b.prefix_sum(j) < a.prefix_sum(j) - tol * scale {
            return false;
        }
    }
    (b.total() - a.total()).abs() <= tol * scale
}

/// Structural check behind the padding equivalences: when `b` majorizes `a`
/// and is longer, every entry of `b` past `a`'s length must vanish.
pub fn zero_tail_check(b: &SortedSeq, a: &SortedSeq, tol: f64) -> bool {
    let scale = 1.0 + a.total();
    b.values.iter().skip(a.len()).all(|&v| v <= tol * scale)
}
