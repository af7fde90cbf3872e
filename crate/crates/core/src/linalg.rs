//! Dense vectors, sparse examples and the handful of kernels every loss and
//! solver needs.
//!
//! Feature indices are 0-based everywhere inside the crate. Readers shift
//! 1-based files at the I/O boundary.

use std::ops::{Deref, DerefMut};

use crate::error::{Error, Result};

/// A parameter or gradient vector of fixed length.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DenseVector(Vec<f64>);

impl DenseVector {
    pub fn zeros(len: usize) -> Self {
        DenseVector(vec![0.0; len])
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        norm(&self.0)
    }

    /// `self - other`, componentwise.
    pub fn sub(&self, other: &[f64]) -> DenseVector {
        assert_eq!(self.len(), other.len(), "length mismatch in sub");
        self.iter().zip(other).map(|(a, b)| a - b).collect()
    }

    pub fn scale(&mut self, c: f64) {
        self.iter_mut().for_each(|v| *v *= c);
    }
}

impl Deref for DenseVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl DerefMut for DenseVector {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

impl From<Vec<f64>> for DenseVector {
    fn from(v: Vec<f64>) -> Self {
        DenseVector(v)
    }
}

impl From<&[f64]> for DenseVector {
    fn from(v: &[f64]) -> Self {
        DenseVector(v.to_vec())
    }
}

impl FromIterator<f64> for DenseVector {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        DenseVector(iter.into_iter().collect())
    }
}

/// One data instance: `(index, value)` pairs with strictly increasing
/// indices and no stored zeros.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseExample {
    entries: Vec<(usize, f64)>,
}

impl SparseExample {
    /// Builds an example from pairs that must already be strictly
    /// increasing in index. Explicit zeros are dropped.
    pub fn new(entries: Vec<(usize, f64)>) -> Result<Self> {
        for pair in entries.windows(2) {
            if pair[1].0 <= pair[0].0 {
                return Err(Error::InvalidInput(format!(
                    "feature indices not strictly increasing: {} then {}",
                    pair[0].0, pair[1].0
                )));
            }
        }
        if let Some(&(idx, v)) = entries.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "non-finite value {v} at feature {idx}"
            )));
        }
        Ok(Self::from_sorted(entries))
    }

    /// Dense row to sparse example, skipping zeros.
    pub fn from_dense(row: &[f64]) -> Self {
        SparseExample {
            entries: row
                .iter()
                .enumerate()
                .filter(|(_, v)| **v != 0.0)
                .map(|(j, v)| (j, *v))
                .collect(),
        }
    }

    pub(crate) fn from_sorted(mut entries: Vec<(usize, f64)>) -> Self {
        entries.retain(|(_, v)| *v != 0.0);
        SparseExample { entries }
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    /// Largest stored index, if any.
    pub fn max_index(&self) -> Option<usize> {
        self.entries.last().map(|(j, _)| *j)
    }

    /// `w · x`. Panics if an index is out of range for `w`; use [`dot`] for
    /// the checked variant.
    #[inline]
    pub fn dot(&self, w: &[f64]) -> f64 {
        let mut acc = 0.0;
        for &(j, v) in &self.entries {
            acc += w[j] * v;
        }
        acc
    }

    /// `w · x` ignoring any index beyond `w.len()`.
    pub fn dot_truncated(&self, w: &[f64]) -> f64 {
        let mut acc = 0.0;
        for &(j, v) in &self.entries {
            if j >= w.len() {
                break;
            }
            acc += w[j] * v;
        }
        acc
    }

    pub fn squared_norm(&self) -> f64 {
        self.entries.iter().map(|(_, v)| v * v).sum()
    }

    /// `y += a * x`.
    #[inline]
    pub fn add_scaled_to(&self, a: f64, y: &mut [f64]) {
        for &(j, v) in &self.entries {
            y[j] += a * v;
        }
    }
}

/// Checked sparse dot product `Σ a[idx]·val`.
pub fn dot(a: &[f64], b: &SparseExample) -> Result<f64> {
    if let Some(max) = b.max_index() {
        if max >= a.len() {
            return Err(Error::DimensionMismatch {
                expected: a.len(),
                found: max + 1,
            });
        }
    }
    Ok(b.dot(a))
}

/// Euclidean norm.
pub fn norm(a: &[f64]) -> f64 {
    a.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn dense_dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `y += a * x`.
pub fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    debug_assert_eq!(y.len(), x.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

/// `x ← x − alpha·g`.
pub fn multiply_accumulate(x: &mut [f64], alpha: f64, g: &[f64]) -> Result<()> {
    if x.len() != g.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            found: g.len(),
        });
    }
    axpy(x, -alpha, g);
    Ok(())
}

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}
