#![allow(dead_code)]

#[allow(clippy::approx_constant)]
pub mod tables;

use adaptscore::{EmbeddingSet, LabeledEmbeddingSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn deg(a: f64) -> [f64; 2] {
    let r = a.to_radians();
    [r.cos(), r.sin()]
}

/// Two classes with centroids on the x and y axes.
pub fn axis_source() -> LabeledEmbeddingSet {
    let e = EmbeddingSet::from_rows(&[[1.0, 0.0], [0.0, 1.0]]).unwrap();
    LabeledEmbeddingSet::new(e, vec![0, 1], 2).unwrap()
}

pub fn rows(points: &[[f64; 2]]) -> EmbeddingSet {
    EmbeddingSet::from_rows(points).unwrap()
}

pub fn gaussian_set(rng: &mut ChaCha8Rng, n: usize, d: usize, offset: &[f64]) -> EmbeddingSet {
    let data = (0..n * d).map(|i| rng.sample::<f64, _>(StandardNormal) + offset[i % d]).collect();
    EmbeddingSet::new(data, n, d).unwrap()
}

/// Random labeled set with every class present (labels cycle first).
pub fn random_labeled(rng: &mut ChaCha8Rng, n: usize, d: usize, c: usize) -> LabeledEmbeddingSet {
    let emb = gaussian_set(rng, n, d, &vec![0.0; d]);
    let labels: Vec<usize> = (0..n).map(|i| if i < c { i } else { rng.random_range(0..c) }).collect();
    LabeledEmbeddingSet::new(emb, labels, c).unwrap()
}

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// Brute-force reference computations, written without the library's
// helpers: plain loops, sorts, and direct sums.

fn naive_unit(v: &[f64]) -> Vec<f64> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter().map(|x| x / n).collect()
}

pub fn naive_centroids(s: &LabeledEmbeddingSet) -> Vec<Vec<f64>> {
    let d = s.dim();
    let mut sums = vec![vec![0.0; d]; s.num_classes()];
    for (row, &l) in s.embeddings().rows().zip(s.labels()) {
        for (acc, x) in sums[l].iter_mut().zip(naive_unit(row)) {
            *acc += x;
        }
    }
    sums.iter().map(|v| naive_unit(v)).collect()
}

pub fn naive_cosine(u: &[f64], v: &[f64]) -> f64 {
    let (u, v) = (naive_unit(u), naive_unit(v));
    1.0 - u.iter().zip(&v).map(|(a, b)| a * b).sum::<f64>()
}

/// Sorts the whole distance list and takes the first two entries.
pub fn sorted_two(dists: &[f64]) -> (f64, f64) {
    let mut s = dists.to_vec();
    s.sort_by(f64::total_cmp);
    (s[0], s[1])
}

pub fn naive_margin(d1: f64, d2: f64) -> f64 {
    if d2 == 0.0 {
        0.0
    } else {
        (d2 - d1) / d2
    }
}

pub fn naive_pas(source: &LabeledEmbeddingSet, target: &EmbeddingSet) -> f64 {
    let cents = naive_centroids(source);
    let total: f64 = target
        .rows()
        .map(|t| {
            let dists: Vec<f64> = cents.iter().map(|c| naive_cosine(t, c)).collect();
            let (d1, d2) = sorted_two(&dists);
            naive_margin(d1, d2)
        })
        .sum();
    total / target.n() as f64
}

/// Average cosine distance to every source sample of each class, no shortcuts.
pub fn naive_pas_avg_pairwise(source: &LabeledEmbeddingSet, target: &EmbeddingSet) -> f64 {
    let c = source.num_classes();
    let total: f64 = target
        .rows()
        .map(|t| {
            let mut sum = vec![0.0; c];
            let mut count = vec![0usize; c];
            for (s, &l) in source.embeddings().rows().zip(source.labels()) {
                sum[l] += naive_cosine(t, s);
                count[l] += 1;
            }
            let dists: Vec<f64> = sum.iter().zip(&count).map(|(s, &k)| s / k as f64).collect();
            let (d1, d2) = sorted_two(&dists);
            naive_margin(d1, d2)
        })
        .sum();
    total / target.n() as f64
}

/// Biased MMD² as the explicit triple sum of Gaussian kernels.
pub fn naive_mmd(x: &EmbeddingSet, y: &EmbeddingSet, sigma: f64) -> f64 {
    let k = |a: &[f64], b: &[f64]| {
        let d2: f64 = a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum();
        (-d2 / (2.0 * sigma * sigma)).exp()
    };
    let mean = |a: &EmbeddingSet, b: &EmbeddingSet| {
        let mut s = 0.0;
        for u in a.rows() {
            for v in b.rows() {
                s += k(u, v);
            }
        }
        s / (a.n() * b.n()) as f64
    };
    mean(x, x) + mean(y, y) - 2.0 * mean(x, y)
}

/// Silhouette from the textbook definition on normalized rows.
pub fn naive_silhouette(s: &LabeledEmbeddingSet) -> f64 {
    let pts: Vec<Vec<f64>> = s.embeddings().rows().map(naive_unit).collect();
    let labels = s.labels();
    let dist = |a: &[f64], b: &[f64]| 1.0 - a.iter().zip(b).map(|(p, q)| p * q).sum::<f64>();
    let mut total = 0.0;
    for i in 0..pts.len() {
        let mut sums = vec![0.0; s.num_classes()];
        let mut counts = vec![0usize; s.num_classes()];
        for j in 0..pts.len() {
            if i != j {
                sums[labels[j]] += dist(&pts[i], &pts[j]);
                counts[labels[j]] += 1;
            }
        }
        let a = sums[labels[i]] / counts[labels[i]] as f64;
        let b = (0..s.num_classes())
            .filter(|&c| c != labels[i])
            .map(|c| sums[c] / counts[c] as f64)
            .fold(f64::INFINITY, f64::min);
        let m = a.max(b);
        total += if m == 0.0 { 0.0 } else { (b - a) / m };
    }
    total / pts.len() as f64
}

/// Spearman via the rank-difference formula; valid only without ties.
pub fn naive_spearman_no_ties(x: &[f64], y: &[f64]) -> f64 {
    let rank = |v: &[f64]| -> Vec<f64> {
        v.iter().map(|a| 1.0 + v.iter().filter(|b| *b < a).count() as f64).collect()
    };
    let (rx, ry) = (rank(x), rank(y));
    let n = x.len() as f64;
    let d2: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - b) * (a - b)).sum();
    1.0 - 6.0 * d2 / (n * (n * n - 1.0))
}
