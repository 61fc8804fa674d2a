//! Correlation statistics, candidate ranking, and the subsample robustness
//! study.

use std::collections::{BTreeMap, HashSet};

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embed::{EmbeddingSet, LabeledEmbeddingSet};
use crate::error::{Error, Result};
use crate::method::Method;
use crate::scores::pas;

/// One candidate's scores, plus its measured accuracy when known (percent).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateScoreRow {
    pub candidate_id: String,
    pub method_scores: BTreeMap<Method, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub accuracy: Option<f64>,
}

impl CandidateScoreRow {
    pub fn new(candidate_id: impl Into<String>) -> Self {
        Self { candidate_id: candidate_id.into(), method_scores: BTreeMap::new(), accuracy: None }
    }

    pub fn with_score(mut self, method: Method, value: f64) -> Self {
        self.method_scores.insert(method, value);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationResult {
    pub pearson: f64,
    pub spearman: f64,
    pub n: usize,
}

fn check_pair(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch { left: x.len(), right: y.len() });
    }
    if x.len() < 2 {
        return Err(Error::TooFewSamples { needed: 2, found: x.len() });
    }
    Ok(())
}

/// Sample Pearson correlation.
///
/// Undefined when both inputs are constant ([`Error::ConstantInput`]); when
/// only one is constant there is no linear association and the result is 0.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    check_pair(x, y)?;
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (da, db) = (a - mx, b - my);
        sxy += da * db;
        sxx += da * da;
        syy += db * db;
    }
    match (sxx > 0.0, syy > 0.0) {
        (false, false) => Err(Error::ConstantInput),
        (true, true) => Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0)),
        _ => Ok(0.0),
    }
}

/// 1-based ranks; tied values share the average of their positions.
pub fn average_ranks(x: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut ranks = vec![0.0; x.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && x[order[end]] == x[order[start]] {
            end += 1;
        }
        // positions start..end hold equal values; 1-based mean rank
        let rank = (start + end + 1) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = rank;
        }
        start = end;
    }
    ranks
}

/// Spearman rank correlation: Pearson correlation of the average ranks.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    check_pair(x, y)?;
    pearson(&average_ranks(x), &average_ranks(y))
}

pub fn correlate(x: &[f64], y: &[f64]) -> Result<CorrelationResult> {
    Ok(CorrelationResult { pearson: pearson(x, y)?, spearman: spearman(x, y)?, n: x.len() })
}

/// Orders candidates best first for `method`; the head is the selection.
///
/// Higher scores win; for distance methods (MMD, A-distance) the negated
/// value is used, so the smallest distance wins. Ties go to the
/// lexicographically smaller candidate id.
pub fn rank_candidates(rows: &[CandidateScoreRow], method: Method) -> Result<Vec<String>> {
    let mut seen = HashSet::new();
    let mut keyed = Vec::with_capacity(rows.len());
    for row in rows {
        if !seen.insert(row.candidate_id.as_str()) {
            return Err(Error::DuplicateCandidate(row.candidate_id.clone()));
        }
        let raw = row.method_scores.get(&method).ok_or_else(|| Error::MissingScore {
            candidate: row.candidate_id.clone(),
            method: method.to_string(),
        })?;
        keyed.push((method.oriented(*raw), row.candidate_id.as_str()));
    }
    keyed.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| a.1.cmp(b.1)));
    Ok(keyed.into_iter().map(|(_, id)| id.to_string()).collect())
}

/// Candidate stream index reserved for the target subsample.
pub const TARGET_STREAM: u64 = u64::MAX;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of one subsample draw:
/// `base ^ splitmix64(splitmix64(splitmix64(bits(fraction)) ^ repeat) ^ stream)`,
/// where `stream` is the candidate index or [`TARGET_STREAM`]. The draw itself
/// uses ChaCha8 seeded through `seed_from_u64`.
pub fn derive_seed(base_seed: u64, fraction: f64, repeat: u64, stream: u64) -> u64 {
    let h = splitmix64(fraction.to_bits());
    let h = splitmix64(h ^ repeat);
    base_seed ^ splitmix64(h ^ stream)
}

fn take(n: usize, fraction: f64) -> usize {
    ((fraction * n as f64).round() as usize).clamp(1, n)
}

/// Per-class proportional subsample keeping at least one row per class.
pub fn stratified_subsample(
    source: &LabeledEmbeddingSet,
    fraction: f64,
    seed: u64,
    candidate: usize,
) -> Result<LabeledEmbeddingSet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = Vec::new();
    for members in source.class_indices() {
        let k = take(members.len(), fraction);
        picked.extend(index::sample(&mut rng, members.len(), k).into_iter().map(|j| members[j]));
    }
    picked.sort_unstable();
    source.select(&picked).map_err(|e| match e {
        Error::MissingClass(class) => Error::EmptyClassAfterSubsample { candidate, class },
        other => other,
    })
}

pub fn uniform_subsample(target: &EmbeddingSet, fraction: f64, seed: u64) -> Result<EmbeddingSet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut idx = index::sample(&mut rng, target.n(), take(target.n(), fraction)).into_vec();
    idx.sort_unstable();
    target.select(&idx)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsampleStudyResult {
    pub fractions: Vec<f64>,
    pub repeats: usize,
    pub base_seed: u64,
    /// PAS of each candidate on all data.
    pub full_scores: Vec<f64>,
    /// Candidate indices, best first, on all data.
    pub full_ranking: Vec<usize>,
    /// `scores[f][r][c]`: candidate `c`, repeat `r`, fraction `f`.
    pub scores: Vec<Vec<Vec<f64>>>,
    /// `rankings[f][r]`: candidate indices, best first.
    pub rankings: Vec<Vec<Vec<usize>>>,
    /// `stable[f][r]`: ranking equals `full_ranking`.
    pub stable: Vec<Vec<bool>>,
    /// Per fraction: every repeat kept the full-data ranking.
    pub rank_stable: Vec<bool>,
    /// Per fraction: share of repeats that kept the full-data ranking.
    pub stable_rate: Vec<f64>,
    /// `mean[f][c]` and `std[f][c]` of scores across repeats (sample std).
    pub mean: Vec<Vec<f64>>,
    pub std: Vec<Vec<f64>>,
}

fn ranking_of(scores: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    order
}

fn mean_std(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count() as f64;
    let mean = values.clone().sum::<f64>() / n;
    if n < 2.0 {
        return (mean, 0.0);
    }
    let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Scores every source candidate on random subsets of itself and of the
/// target, and checks whether the candidate ranking survives.
///
/// Sources are subsampled per class (at least one row each); the target
/// uniformly, with one target draw per `(fraction, repeat)` shared by all
/// candidates. At fraction 1.0 no sampling happens and the full-data scores
/// are reused.
pub fn subsample_study(
    sources: &[LabeledEmbeddingSet],
    target: &EmbeddingSet,
    fractions: &[f64],
    repeats: usize,
    base_seed: u64,
) -> Result<SubsampleStudyResult> {
    if sources.is_empty() {
        return Err(Error::ConfigInvalid("no source candidates".into()));
    }
    if fractions.is_empty() || fractions.iter().any(|&f| !(f > 0.0 && f <= 1.0)) {
        return Err(Error::ConfigInvalid("fractions must lie in (0, 1]".into()));
    }
    if fractions.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::ConfigInvalid("fractions must be sorted ascending".into()));
    }
    if repeats == 0 {
        return Err(Error::ConfigInvalid("repeats must be >= 1".into()));
    }

    let full_scores =
        sources.par_iter().map(|s| pas(s, target).map(|r| r.value)).collect::<Result<Vec<_>>>()?;
    let full_ranking = ranking_of(&full_scores);

    let cells: Vec<(usize, usize)> =
        (0..fractions.len()).flat_map(|f| (0..repeats).map(move |r| (f, r))).collect();
    let cell_scores = cells
        .par_iter()
        .map(|&(fi, r)| {
            let f = fractions[fi];
            if f == 1.0 {
                return Ok(full_scores.clone());
            }
            let t = uniform_subsample(target, f, derive_seed(base_seed, f, r as u64, TARGET_STREAM))?;
            sources
                .iter()
                .enumerate()
                .map(|(c, s)| {
                    let seed = derive_seed(base_seed, f, r as u64, c as u64);
                    let sub = stratified_subsample(s, f, seed, c)?;
                    Ok(pas(&sub, &t)?.value)
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let mut scores = vec![Vec::with_capacity(repeats); fractions.len()];
    for ((fi, _), s) in cells.iter().zip(cell_scores) {
        scores[*fi].push(s);
    }
    let rankings: Vec<Vec<Vec<usize>>> =
        scores.iter().map(|per_f| per_f.iter().map(|s| ranking_of(s)).collect()).collect();
    let stable: Vec<Vec<bool>> =
        rankings.iter().map(|per_f| per_f.iter().map(|r| *r == full_ranking).collect()).collect();
    let rank_stable = stable.iter().map(|s| s.iter().all(|&b| b)).collect();
    let stable_rate =
        stable.iter().map(|s| s.iter().filter(|&&b| b).count() as f64 / s.len() as f64).collect();
    let (mut mean, mut std) = (Vec::new(), Vec::new());
    for per_f in &scores {
        let (m, s): (Vec<f64>, Vec<f64>) =
            (0..sources.len()).map(|c| mean_std(per_f.iter().map(move |row| row[c]))).unzip();
        mean.push(m);
        std.push(s);
    }

    Ok(SubsampleStudyResult {
        fractions: fractions.to_vec(),
        repeats,
        base_seed,
        full_scores,
        full_ranking,
        scores,
        rankings,
        stable,
        rank_stable,
        stable_rate,
        mean,
        std,
    })
}
