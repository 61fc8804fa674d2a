//! The Potential Adaptability Score, its label-aware oracle, and two
//! alternative distance choices, each with per-sample diagnostics.
//!
//! For every target sample the score looks at its distances to all source
//! classes, takes the shortest (`d1`) and second shortest (`d2`), and
//! contributes the relative margin `(d2 - d1) / d2`. The score is the mean
//! contribution over the target set.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embed::{
    class_centroids, cosine_distance_unchecked, squared_euclidean, unit_normalize, CentroidTable,
    EmbeddingSet, LabeledEmbeddingSet,
};
use crate::error::{Error, Result};
use crate::method::Method;

/// One target sample's share of a score.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerSampleBreakdown {
    pub sample_index: usize,
    /// Shortest distance. For the oracle: distance to the true class.
    pub d1: f64,
    /// Second shortest distance. For the oracle: nearest non-true class.
    pub d2: f64,
    /// Closest class, lowest id among ties.
    pub nearest_class: usize,
    pub contribution: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreResult {
    pub method: Method,
    pub value: f64,
    pub breakdown: Vec<PerSampleBreakdown>,
    pub n_target: usize,
    pub n_source: usize,
    pub num_classes: usize,
}

/// Smallest and second smallest entries of `dists` in a single pass, plus the
/// index of the smallest (first occurrence). A repeated minimum yields
/// `d1 == d2`.
pub fn two_smallest(dists: &[f64]) -> (f64, f64, usize) {
    debug_assert!(dists.len() >= 2);
    let mut d1 = f64::INFINITY;
    let mut d2 = f64::INFINITY;
    let mut arg = 0;
    for (c, &v) in dists.iter().enumerate() {
        if v < d1 {
            d2 = d1;
            d1 = v;
            arg = c;
        } else if v < d2 {
            d2 = v;
        }
    }
    (d1, d2, arg)
}

/// `(d2 - d1) / d2`, with `0` when `d2 == 0` (the sample sits on two or more
/// centroids at once and expresses no preference).
#[inline]
pub fn relative_margin(d1: f64, d2: f64) -> f64 {
    if d2 > 0.0 {
        (d2 - d1) / d2
    } else {
        0.0
    }
}

fn check_dims(source: &LabeledEmbeddingSet, target: &EmbeddingSet) -> Result<()> {
    if source.dim() != target.dim() {
        return Err(Error::DimensionMismatch { expected: source.dim(), found: target.dim() });
    }
    if source.num_classes() < 2 {
        return Err(Error::TooFewClasses(source.num_classes()));
    }
    Ok(())
}

/// Normalizes both sets and builds the source centroids.
fn prepare(
    source: &LabeledEmbeddingSet,
    target: &EmbeddingSet,
) -> Result<(LabeledEmbeddingSet, EmbeddingSet, CentroidTable)> {
    check_dims(source, target)?;
    let src = source.with_embeddings(unit_normalize(source.embeddings())?);
    let tgt = unit_normalize(target)?;
    let centroids = class_centroids(&src)?;
    Ok((src, tgt, centroids))
}

/// Runs `per_sample` over all target rows in parallel. `fill` writes the
/// per-class distances of one row into a scratch buffer; `reduce` turns the
/// filled buffer into a breakdown entry. Output order follows the target.
fn per_sample<F, R>(target: &EmbeddingSet, num_classes: usize, fill: F, reduce: R) -> Vec<PerSampleBreakdown>
where
    F: Fn(&[f64], &mut [f64]) + Sync,
    R: Fn(usize, &[f64]) -> PerSampleBreakdown + Sync,
{
    (0..target.n())
        .into_par_iter()
        .map_init(
            || vec![0.0f64; num_classes],
            |buf, i| {
                fill(target.row(i), buf);
                reduce(i, buf)
            },
        )
        .collect()
}

fn margin_reduce(i: usize, dists: &[f64]) -> PerSampleBreakdown {
    let (d1, d2, nearest_class) = two_smallest(dists);
    PerSampleBreakdown { sample_index: i, d1, d2, nearest_class, contribution: relative_margin(d1, d2) }
}

/// Mean contribution, summed sequentially in sample order.
fn mean_contribution(breakdown: &[PerSampleBreakdown]) -> f64 {
    let sum: f64 = breakdown.iter().map(|b| b.contribution).sum();
    sum / breakdown.len() as f64
}

fn finish(method: Method, breakdown: Vec<PerSampleBreakdown>, source: &LabeledEmbeddingSet) -> ScoreResult {
    ScoreResult {
        method,
        value: mean_contribution(&breakdown),
        n_target: breakdown.len(),
        n_source: source.n(),
        num_classes: source.num_classes(),
        breakdown,
    }
}

fn cosine_to_centroids(centroids: &CentroidTable) -> impl Fn(&[f64], &mut [f64]) + Sync + '_ {
    move |row, out| {
        for (o, mu) in out.iter_mut().zip(centroids.iter()) {
            *o = cosine_distance_unchecked(row, mu);
        }
    }
}

/// Potential Adaptability Score of `source` for `target`, in `[0, 1]`.
///
/// Raw embeddings are accepted; both sets are unit-normalized first.
pub fn pas(source: &LabeledEmbeddingSet, target: &EmbeddingSet) -> Result<ScoreResult> {
    let (src, tgt, centroids) = prepare(source, target)?;
    let breakdown = per_sample(&tgt, src.num_classes(), cosine_to_centroids(&centroids), margin_reduce);
    Ok(finish(Method::Pas, breakdown, &src))
}

/// PAS with Euclidean distance between unit-normalized targets and centroids.
pub fn pas_euclidean(source: &LabeledEmbeddingSet, target: &EmbeddingSet) -> Result<ScoreResult> {
    let (src, tgt, centroids) = prepare(source, target)?;
    let fill = |row: &[f64], out: &mut [f64]| {
        for (o, mu) in out.iter_mut().zip(centroids.iter()) {
            *o = squared_euclidean(row, mu).sqrt();
        }
    };
    let breakdown = per_sample(&tgt, src.num_classes(), fill, margin_reduce);
    Ok(finish(Method::PasEuclidean, breakdown, &src))
}

/// PAS where the per-class distance is the mean cosine distance to every
/// member of the class instead of the distance to its centroid.
///
/// Uses `mean_j (1 - t·s_j) = 1 - t·mean_j(s_j)`, so each class collapses to
/// its (unnormalized) mean vector.
pub fn pas_avg_pairwise(source: &LabeledEmbeddingSet, target: &EmbeddingSet) -> Result<ScoreResult> {
    check_dims(source, target)?;
    let src = source.with_embeddings(unit_normalize(source.embeddings())?);
    let tgt = unit_normalize(target)?;
    let d = src.dim();
    let c = src.num_classes();
    let mut means = vec![0.0f64; c * d];
    let mut counts = vec![0usize; c];
    for (row, &l) in src.embeddings().rows().zip(src.labels()) {
        counts[l] += 1;
        for (a, x) in means[l * d..(l + 1) * d].iter_mut().zip(row) {
            *a += x;
        }
    }
    for (m, &k) in means.chunks_exact_mut(d).zip(&counts) {
        m.iter_mut().for_each(|v| *v /= k as f64);
    }
    let fill = |row: &[f64], out: &mut [f64]| {
        for (o, m) in out.iter_mut().zip(means.chunks_exact(d)) {
            *o = cosine_distance_unchecked(row, m);
        }
    };
    let breakdown = per_sample(&tgt, c, fill, margin_reduce);
    Ok(finish(Method::PasAvgPairwise, breakdown, &src))
}

/// Label-aware reference score in `[-1, 1]`.
///
/// `d1` is the distance to the centroid of the sample's true class and `d2`
/// the distance to the closest other centroid; the contribution is
/// `(d2 - d1) / max(d1, d2)` (zero when both vanish). Equals the PAS
/// contribution whenever the nearest centroid is the true class, and is
/// strictly negative otherwise.
pub fn oracle_score(source: &LabeledEmbeddingSet, target: &LabeledEmbeddingSet) -> Result<ScoreResult> {
    oracle_score_with_labels(source, target.embeddings(), target.labels())
}

/// [`oracle_score`] for target labels that need not cover every class.
pub fn oracle_score_with_labels(
    source: &LabeledEmbeddingSet,
    target: &EmbeddingSet,
    labels: &[usize],
) -> Result<ScoreResult> {
    if labels.len() != target.n() {
        return Err(Error::LabelCountMismatch { labels: labels.len(), rows: target.n() });
    }
    let c = source.num_classes();
    for (row, &label) in labels.iter().enumerate() {
        if label >= c {
            return Err(Error::LabelOutOfRange { row, label, num_classes: c });
        }
    }
    let (src, tgt, centroids) = prepare(source, target)?;
    let reduce = |i: usize, dists: &[f64]| {
        let truth = labels[i];
        let (_, _, nearest_class) = two_smallest(dists);
        let d1 = dists[truth];
        let d2 = dists
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != truth)
            .map(|(_, &v)| v)
            .fold(f64::INFINITY, f64::min);
        let denom = d1.max(d2);
        let contribution = if denom > 0.0 { (d2 - d1) / denom } else { 0.0 };
        PerSampleBreakdown { sample_index: i, d1, d2, nearest_class, contribution }
    };
    let breakdown = per_sample(&tgt, c, cosine_to_centroids(&centroids), reduce);
    Ok(finish(Method::Oracle, breakdown, &src))
}

/// Nearest source centroid (cosine, lowest id on ties) for every target row.
pub fn nearest_classes(source: &LabeledEmbeddingSet, target: &EmbeddingSet) -> Result<Vec<usize>> {
    Ok(pas(source, target)?.breakdown.into_iter().map(|b| b.nearest_class).collect())
}
