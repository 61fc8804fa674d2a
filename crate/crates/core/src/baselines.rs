//! Symmetric reference metrics: Gaussian-kernel MMD, proxy A-distance and
//! the classical silhouette. All of them work on unit-normalized rows.

use std::cmp::Ordering;

use rand::seq::{index, SliceRandom};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embed::{
    cosine_distance_unchecked, dot, squared_euclidean, unit_normalize, EmbeddingSet, LabeledEmbeddingSet,
};
use crate::error::{Error, Result};

/// Pooled points used to estimate the median-heuristic bandwidth.
pub const MEDIAN_HEURISTIC_MAX_POINTS: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bandwidth {
    /// σ = median pairwise Euclidean distance over the pooled sample.
    MedianHeuristic,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MmdConfig {
    pub bandwidth: Bandwidth,
    pub max_samples_per_domain: usize,
    pub seed: u64,
}

impl Default for MmdConfig {
    fn default() -> Self {
        Self { bandwidth: Bandwidth::MedianHeuristic, max_samples_per_domain: 10_000, seed: 0 }
    }
}

impl MmdConfig {
    pub fn validate(&self) -> Result<()> {
        if let Bandwidth::Fixed(s) = self.bandwidth {
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::ConfigInvalid(format!("bandwidth must be > 0, got {s}")));
            }
        }
        if self.max_samples_per_domain < 2 {
            return Err(Error::ConfigInvalid("max_samples_per_domain must be >= 2".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProxyClassifierConfig {
    pub train_fraction: f64,
    pub epochs: usize,
    pub learning_rate: f64,
    pub l2_penalty: f64,
    pub seed: u64,
}

impl Default for ProxyClassifierConfig {
    fn default() -> Self {
        Self { train_fraction: 0.5, epochs: 200, learning_rate: 0.01, l2_penalty: 1e-4, seed: 0 }
    }
}

impl ProxyClassifierConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(Error::ConfigInvalid("train_fraction must lie in (0, 1)".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::ConfigInvalid("learning_rate must be > 0".into()));
        }
        if !(self.l2_penalty >= 0.0 && self.l2_penalty.is_finite()) {
            return Err(Error::ConfigInvalid("l2_penalty must be >= 0".into()));
        }
        Ok(())
    }
}

fn check_pair(a: &EmbeddingSet, b: &EmbeddingSet, min_n: usize) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    for s in [a, b] {
        if s.n() < min_n {
            return Err(Error::TooFewSamples { needed: min_n, found: s.n() });
        }
    }
    Ok(())
}

/// Total order on sets by shape, then content. Symmetric metrics process
/// their arguments in this order so that swapping them is bit-exact.
fn content_cmp(a: &EmbeddingSet, b: &EmbeddingSet) -> Ordering {
    a.n().cmp(&b.n()).then_with(|| {
        a.as_slice()
            .iter()
            .zip(b.as_slice())
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal)
    })
}

fn canonical<'a>(a: &'a EmbeddingSet, b: &'a EmbeddingSet) -> (&'a EmbeddingSet, &'a EmbeddingSet) {
    if content_cmp(a, b) == Ordering::Greater {
        (b, a)
    } else {
        (a, b)
    }
}

fn subsample(set: EmbeddingSet, cap: usize, rng: &mut ChaCha8Rng) -> Result<EmbeddingSet> {
    if set.n() <= cap {
        return Ok(set);
    }
    let mut idx = index::sample(rng, set.n(), cap).into_vec();
    idx.sort_unstable();
    set.select(&idx)
}

/// Median of all pairwise Euclidean distances among the rows of `a` and `b`
/// pooled. At most [`MEDIAN_HEURISTIC_MAX_POINTS`] pooled rows are used.
fn median_heuristic(a: &EmbeddingSet, b: &EmbeddingSet, rng: &mut ChaCha8Rng) -> f64 {
    let pooled: Vec<&[f64]> = a.rows().chain(b.rows()).collect();
    let points: Vec<&[f64]> = if pooled.len() > MEDIAN_HEURISTIC_MAX_POINTS {
        let mut idx = index::sample(rng, pooled.len(), MEDIAN_HEURISTIC_MAX_POINTS).into_vec();
        idx.sort_unstable();
        idx.into_iter().map(|i| pooled[i]).collect()
    } else {
        pooled
    };
    let mut dists = Vec::with_capacity(points.len() * (points.len() - 1) / 2);
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            dists.push(squared_euclidean(points[i], points[j]).sqrt());
        }
    }
    if dists.is_empty() {
        return 1.0;
    }
    let mid = dists.len() / 2;
    let (_, &mut hi, _) = dists.select_nth_unstable_by(mid, f64::total_cmp);
    let median = if dists.len() % 2 == 1 {
        hi
    } else {
        let lo = dists[..mid].iter().copied().fold(f64::NEG_INFINITY, f64::max);
        0.5 * (lo + hi)
    };
    // more than half of the pairs coincide; any positive width works
    if median > 0.0 {
        median
    } else {
        1.0
    }
}

/// Mean of `exp(-‖x - y‖² / (2σ²))` over all `(x, y)` in `a × b`.
/// Rows are reduced in parallel, then summed in row order.
fn mean_kernel(a: &EmbeddingSet, b: &EmbeddingSet, gamma: f64) -> f64 {
    let row_sums: Vec<f64> = (0..a.n())
        .into_par_iter()
        .map(|i| {
            let x = a.row(i);
            b.rows().map(|y| (-gamma * squared_euclidean(x, y)).exp()).sum::<f64>()
        })
        .collect();
    row_sums.iter().sum::<f64>() / (a.n() as f64 * b.n() as f64)
}

/// Biased (V-statistic) estimate of squared MMD under a Gaussian kernel.
///
/// Domains larger than `max_samples_per_domain` are uniformly subsampled
/// with `cfg.seed`. The value is exactly symmetric in its arguments.
pub fn mmd_gaussian(source: &EmbeddingSet, target: &EmbeddingSet, cfg: &MmdConfig) -> Result<f64> {
    cfg.validate()?;
    check_pair(source, target, 1)?;
    let (first, second) = canonical(source, target);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let x = subsample(unit_normalize(first)?, cfg.max_samples_per_domain, &mut rng)?;
    let y = subsample(unit_normalize(second)?, cfg.max_samples_per_domain, &mut rng)?;
    let sigma = match cfg.bandwidth {
        Bandwidth::Fixed(s) => s,
        Bandwidth::MedianHeuristic => median_heuristic(&x, &y, &mut rng),
    };
    let gamma = 1.0 / (2.0 * sigma * sigma);
    let kxx = mean_kernel(&x, &x, gamma);
    let kyy = mean_kernel(&y, &y, gamma);
    let kxy = mean_kernel(&x, &y, gamma);
    Ok((kxx + kyy - 2.0 * kxy).max(0.0))
}

/// Logistic-regression domain classifier trained by full-batch gradient
/// descent. Each domain carries half of the total loss weight.
struct DomainClassifier {
    w: Vec<f64>,
    b: f64,
}

impl DomainClassifier {
    fn train(zeros: &[&[f64]], ones: &[&[f64]], d: usize, cfg: &ProxyClassifierConfig) -> Self {
        let mut w = vec![0.0; d];
        let mut b = 0.0;
        let mut grad = vec![0.0; d];
        let weights = [0.5 / zeros.len() as f64, 0.5 / ones.len() as f64];
        for _ in 0..cfg.epochs {
            grad.iter_mut().for_each(|g| *g = 0.0);
            let mut grad_b = 0.0;
            for (label, rows) in [zeros, ones].into_iter().enumerate() {
                for x in rows {
                    let p = sigmoid(dot(&w, x) + b);
                    let r = weights[label] * (p - label as f64);
                    grad_b += r;
                    for (g, xi) in grad.iter_mut().zip(x.iter()) {
                        *g += r * xi;
                    }
                }
            }
            for (wi, g) in w.iter_mut().zip(&grad) {
                *wi -= cfg.learning_rate * (g + cfg.l2_penalty * *wi);
            }
            b -= cfg.learning_rate * grad_b;
        }
        Self { w, b }
    }

    fn predict(&self, x: &[f64]) -> usize {
        usize::from(dot(&self.w, x) + self.b > 0.0)
    }
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Proxy A-distance `2(1 - 2ε̂)` in `[0, 2]` from a linear domain classifier.
///
/// Each domain is split with `cfg.seed` into train and held-out parts;
/// `ε` is the class-balanced held-out error and `ε̂ = min(ε, 1 - ε)`.
/// Failure to separate the domains is not an error: it shows up as a
/// score near zero.
pub fn proxy_a_distance(
    source: &EmbeddingSet,
    target: &EmbeddingSet,
    cfg: &ProxyClassifierConfig,
) -> Result<f64> {
    cfg.validate()?;
    check_pair(source, target, 4)?;
    let (first, second) = canonical(source, target);
    let domains = [unit_normalize(first)?, unit_normalize(second)?];
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut train: [Vec<&[f64]>; 2] = Default::default();
    let mut test: [Vec<&[f64]>; 2] = Default::default();
    for (k, set) in domains.iter().enumerate() {
        let mut idx: Vec<usize> = (0..set.n()).collect();
        idx.shuffle(&mut rng);
        let n_train = ((cfg.train_fraction * set.n() as f64).round() as usize).clamp(1, set.n() - 1);
        train[k] = idx[..n_train].iter().map(|&i| set.row(i)).collect();
        test[k] = idx[n_train..].iter().map(|&i| set.row(i)).collect();
    }
    let clf = DomainClassifier::train(&train[0], &train[1], first.dim(), cfg);
    let mut err = 0.0;
    for (label, rows) in test.iter().enumerate() {
        let wrong = rows.iter().filter(|x| clf.predict(x) != label).count();
        err += 0.5 * wrong as f64 / rows.len() as f64;
    }
    let folded = err.min(1.0 - err);
    Ok((2.0 * (1.0 - 2.0 * folded)).clamp(0.0, 2.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SilhouetteMetric {
    Cosine,
    Euclidean,
}

/// Mean silhouette `(b - a) / max(a, b)` over all samples, where `a` is the
/// mean distance to the other members of the sample's class and `b` the
/// smallest mean distance to another class.
pub fn silhouette(data: &LabeledEmbeddingSet, metric: SilhouetteMetric) -> Result<f64> {
    let c = data.num_classes();
    if c < 2 {
        return Err(Error::TooFewClasses(c));
    }
    let mut sizes = vec![0usize; c];
    for &l in data.labels() {
        sizes[l] += 1;
    }
    if let Some(single) = sizes.iter().position(|&k| k < 2) {
        return Err(Error::SingletonClass(single));
    }
    let emb = unit_normalize(data.embeddings())?;
    let labels = data.labels();
    let dist = |x: &[f64], y: &[f64]| match metric {
        SilhouetteMetric::Cosine => cosine_distance_unchecked(x, y),
        SilhouetteMetric::Euclidean => squared_euclidean(x, y).sqrt(),
    };
    let per_sample: Vec<f64> = (0..emb.n())
        .into_par_iter()
        .map(|i| {
            let x = emb.row(i);
            let mut sums = vec![0.0f64; c];
            for (j, y) in emb.rows().enumerate() {
                if j != i {
                    sums[labels[j]] += dist(x, y);
                }
            }
            let own = labels[i];
            let a = sums[own] / (sizes[own] - 1) as f64;
            let b =
                (0..c).filter(|&k| k != own).map(|k| sums[k] / sizes[k] as f64).fold(f64::INFINITY, f64::min);
            let m = a.max(b);
            if m > 0.0 {
                (b - a) / m
            } else {
                0.0
            }
        })
        .collect();
    Ok(per_sample.iter().sum::<f64>() / per_sample.len() as f64)
}
