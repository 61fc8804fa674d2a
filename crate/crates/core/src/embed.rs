//! Embedding containers, normalization, distances and spherical class centroids.
//!
//! All matrices are dense and row-major with `f64` storage, whatever the
//! on-disk precision was.

use crate::error::{Error, Result};

/// Rows or class sums with a norm at or below this are rejected as degenerate.
pub const NORM_EPS: f64 = 1e-12;

/// An `n x d` matrix of finite feature embeddings, one row per sample.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingSet {
    data: Vec<f64>,
    n: usize,
    d: usize,
}

impl EmbeddingSet {
    pub fn new(data: Vec<f64>, n: usize, d: usize) -> Result<Self> {
        if n == 0 || d == 0 {
            return Err(Error::EmptySet { n, d });
        }
        if data.len() != n * d {
            return Err(Error::ShapeMismatch { len: data.len(), n, d });
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue { row: pos / d, col: pos % d });
        }
        Ok(Self { data, n, d })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        let d = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(n * d);
        for row in rows {
            let row = row.as_ref();
            if row.len() != d {
                return Err(Error::DimensionMismatch { expected: d, found: row.len() });
            }
            data.extend_from_slice(row);
        }
        Self::new(data, n, d)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> std::slice::ChunksExact<'_, f64> {
        self.data.chunks_exact(self.d)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    /// New set made of the given rows, in the given order.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        let mut data = Vec::with_capacity(indices.len() * self.d);
        for &i in indices {
            data.extend_from_slice(self.row(i));
        }
        Self::new(data, indices.len(), self.d)
    }

    /// Applies `f` to every row in place of the original values.
    pub fn map_rows(&self, mut f: impl FnMut(usize, &[f64], &mut [f64])) -> Result<Self> {
        let mut data = vec![0.0; self.data.len()];
        for (i, (src, dst)) in self.rows().zip(data.chunks_exact_mut(self.d)).enumerate() {
            f(i, src, dst);
        }
        Self::new(data, self.n, self.d)
    }
}

/// Embeddings plus one class id per row over `num_classes` classes.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledEmbeddingSet {
    embeddings: EmbeddingSet,
    labels: Vec<usize>,
    num_classes: usize,
}

impl LabeledEmbeddingSet {
    /// Validates that every label lies in `[0, num_classes)`, every class is
    /// present, and there are at least two classes.
    pub fn new(embeddings: EmbeddingSet, labels: Vec<usize>, num_classes: usize) -> Result<Self> {
        if labels.len() != embeddings.n() {
            return Err(Error::LabelCountMismatch { labels: labels.len(), rows: embeddings.n() });
        }
        if num_classes < 2 {
            return Err(Error::TooFewClasses(num_classes));
        }
        let mut seen = vec![false; num_classes];
        for (row, &label) in labels.iter().enumerate() {
            if label >= num_classes {
                return Err(Error::LabelOutOfRange { row, label, num_classes });
            }
            seen[label] = true;
        }
        if let Some(c) = seen.iter().position(|s| !s) {
            return Err(Error::MissingClass(c));
        }
        Ok(Self { embeddings, labels, num_classes })
    }

    /// Like [`LabeledEmbeddingSet::new`] with `num_classes = max(label) + 1`.
    pub fn with_inferred_classes(embeddings: EmbeddingSet, labels: Vec<usize>) -> Result<Self> {
        let num_classes = labels.iter().max().map_or(0, |m| m + 1);
        Self::new(embeddings, labels, num_classes)
    }

    pub fn embeddings(&self) -> &EmbeddingSet {
        &self.embeddings
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn n(&self) -> usize {
        self.embeddings.n()
    }

    pub fn dim(&self) -> usize {
        self.embeddings.dim()
    }

    /// Row indices of each class, ascending within a class.
    pub fn class_indices(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.num_classes];
        for (i, &l) in self.labels.iter().enumerate() {
            out[l].push(i);
        }
        out
    }

    /// Same labels over replacement embeddings of identical shape.
    pub(crate) fn with_embeddings(&self, embeddings: EmbeddingSet) -> Self {
        debug_assert_eq!(embeddings.n(), self.embeddings.n());
        Self { embeddings, labels: self.labels.clone(), num_classes: self.num_classes }
    }

    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        let emb = self.embeddings.select(indices)?;
        let labels = indices.iter().map(|&i| self.labels[i]).collect();
        Self::new(emb, labels, self.num_classes)
    }
}

/// Unit-length class centroids, one row per class.
#[derive(Debug, Clone, PartialEq)]
pub struct CentroidTable {
    centroids: Vec<f64>,
    num_classes: usize,
    d: usize,
}

impl CentroidTable {
    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn centroid(&self, c: usize) -> &[f64] {
        &self.centroids[c * self.d..(c + 1) * self.d]
    }

    pub fn iter(&self) -> std::slice::ChunksExact<'_, f64> {
        self.centroids.chunks_exact(self.d)
    }
}

/// Dot product with eight independent accumulators so the loop vectorizes.
/// The reduction order depends only on the length, never on threading.
#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [0.0f64; 8];
    let ca = a.chunks_exact(8);
    let cb = b.chunks_exact(8);
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        for k in 0..8 {
            acc[k] += x[k] * y[k];
        }
    }
    let mut tail = 0.0;
    for (x, y) in ra.iter().zip(rb) {
        tail += x * y;
    }
    ((acc[0] + acc[4]) + (acc[1] + acc[5])) + ((acc[2] + acc[6]) + (acc[3] + acc[7])) + tail
}

/// `‖a - b‖²`, computed from the differences so that it is exactly symmetric.
#[inline]
pub fn squared_euclidean(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [0.0f64; 4];
    let ca = a.chunks_exact(4);
    let cb = b.chunks_exact(4);
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        for k in 0..4 {
            let t = x[k] - y[k];
            acc[k] += t * t;
        }
    }
    let mut tail = 0.0;
    for (x, y) in ra.iter().zip(rb) {
        let t = x - y;
        tail += t * t;
    }
    (acc[0] + acc[2]) + (acc[1] + acc[3]) + tail
}

pub fn norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

/// Divides every row by its Euclidean norm.
pub fn unit_normalize(e: &EmbeddingSet) -> Result<EmbeddingSet> {
    let mut data = e.as_slice().to_vec();
    for (i, row) in data.chunks_exact_mut(e.dim()).enumerate() {
        let nrm = norm(row);
        if nrm.is_nan() || nrm <= NORM_EPS {
            return Err(Error::ZeroVector(i));
        }
        row.iter_mut().for_each(|v| *v /= nrm);
    }
    EmbeddingSet::new(data, e.n(), e.dim())
}

fn check_dims(u: &[f64], v: &[f64]) -> Result<()> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch { expected: u.len(), found: v.len() });
    }
    Ok(())
}

/// `1 - u·v` for unit vectors, clamped to `[0, 2]`.
pub fn cosine_distance(u: &[f64], v: &[f64]) -> Result<f64> {
    check_dims(u, v)?;
    Ok(cosine_distance_unchecked(u, v))
}

#[inline]
pub(crate) fn cosine_distance_unchecked(u: &[f64], v: &[f64]) -> f64 {
    (1.0 - dot(u, v)).clamp(0.0, 2.0)
}

pub fn euclidean_distance(u: &[f64], v: &[f64]) -> Result<f64> {
    check_dims(u, v)?;
    Ok(squared_euclidean(u, v).sqrt())
}

/// Spherical centroid of every class: the normalized sum of its member rows.
///
/// Rows are expected to be unit length already (see [`unit_normalize`]).
/// Members are summed sequentially in row order, so the output does not
/// depend on scheduling.
pub fn class_centroids(s: &LabeledEmbeddingSet) -> Result<CentroidTable> {
    let c = s.num_classes();
    let d = s.dim();
    let mut sums = vec![0.0f64; c * d];
    for (row, &label) in s.embeddings().rows().zip(s.labels()) {
        let acc = &mut sums[label * d..(label + 1) * d];
        for (a, x) in acc.iter_mut().zip(row) {
            *a += x;
        }
    }
    for (class, acc) in sums.chunks_exact_mut(d).enumerate() {
        let nrm = norm(acc);
        if nrm.is_nan() || nrm <= NORM_EPS {
            return Err(Error::DegenerateClass(class));
        }
        acc.iter_mut().for_each(|v| *v /= nrm);
    }
    Ok(CentroidTable { centroids: sums, num_classes: c, d })
}
