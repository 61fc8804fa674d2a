//! Manifest and report schemas, and the pipeline that turns one into the
//! other.
//!
//! A manifest names a target domain and a list of candidates (a source
//! embedding file with labels, an inline synthetic config, or precomputed
//! scores). Relative paths resolve against the manifest's directory.
//!
//! ```json
//! {
//!   "target": { "emb": "target.pemb", "labels": "target.plbl" },
//!   "candidates": [
//!     { "id": "dslr", "source_emb": "dslr.pemb", "source_labels": "dslr.plbl", "model_id": "resnet50" },
//!     { "id": "toy", "source_emb": { "synth": { "num_classes": 4, "dim": 16, "...": "..." } } },
//!     { "id": "webcam", "scores": { "pas": 0.239 } }
//!   ],
//!   "methods": ["pas", "mmd"],
//!   "seed": 7
//! }
//! ```

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{
    mmd_gaussian, proxy_a_distance, silhouette, Bandwidth, MmdConfig, ProxyClassifierConfig, SilhouetteMetric,
};
use crate::embed::{EmbeddingSet, LabeledEmbeddingSet};
use crate::error::{Error, Result};
use crate::eval::{rank_candidates, CandidateScoreRow};
use crate::io::{load_embeddings, load_labels};
use crate::method::Method;
use crate::scores::{
    oracle_score_with_labels, pas, pas_avg_pairwise, pas_euclidean, PerSampleBreakdown, ScoreResult,
};
use crate::synth::{generate_pair, SynthConfig};

pub const REPORT_SCHEMA: &str = "adaptscore-report-v1";
pub const TOOLKIT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EmbSpec {
    Synth { synth: SynthConfig },
    Path(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TargetSpec {
    Synth {
        synth: SynthConfig,
    },
    File {
        emb: PathBuf,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        labels: Option<PathBuf>,
    },
    Path(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CandidateSpec {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_emb: Option<EmbSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_labels: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model_id: Option<String>,
    /// Scores supplied by the caller; these methods are not recomputed.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub scores: BTreeMap<Method, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub accuracy: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<TargetSpec>,
    pub candidates: Vec<CandidateSpec>,
    pub methods: Vec<Method>,
    #[serde(default)]
    pub seed: u64,
    /// Per-domain sample cap for MMD.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_samples: Option<usize>,
}

impl Manifest {
    pub fn from_json(text: &str) -> Result<Self> {
        let m: Manifest = serde_json::from_str(text)?;
        m.validate()?;
        Ok(m)
    }

    /// Reads a manifest; returns it with the directory relative paths resolve against.
    pub fn load(path: impl AsRef<Path>) -> Result<(Self, PathBuf)> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok((Self::from_json(&text)?, base))
    }

    pub fn validate(&self) -> Result<()> {
        if self.methods.is_empty() {
            return Err(Error::ConfigInvalid("manifest lists no methods".into()));
        }
        if self.candidates.is_empty() {
            return Err(Error::ConfigInvalid("manifest lists no candidates".into()));
        }
        let mut seen = HashSet::new();
        for c in &self.candidates {
            if !seen.insert(c.id.as_str()) {
                return Err(Error::DuplicateCandidate(c.id.clone()));
            }
        }
        Ok(())
    }
}

/// Target domain loaded into memory.
#[derive(Debug, Clone)]
pub struct LoadedTarget {
    pub embeddings: EmbeddingSet,
    /// Only the oracle reads these; they need not cover every class.
    pub labels: Option<Vec<usize>>,
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

pub fn load_target(spec: &TargetSpec, base: &Path) -> Result<LoadedTarget> {
    match spec {
        TargetSpec::Synth { synth } => {
            let pair = generate_pair(synth)?;
            Ok(LoadedTarget {
                embeddings: pair.target.embeddings().clone(),
                labels: Some(pair.target.labels().to_vec()),
            })
        }
        TargetSpec::File { emb, labels } => {
            let embeddings = load_embeddings(resolve(base, emb))?;
            let labels = labels.as_ref().map(|l| load_labels(resolve(base, l))).transpose()?;
            if let Some(l) = &labels {
                if l.len() != embeddings.n() {
                    return Err(Error::LabelCountMismatch { labels: l.len(), rows: embeddings.n() });
                }
            }
            Ok(LoadedTarget { embeddings, labels })
        }
        TargetSpec::Path(emb) => {
            Ok(LoadedTarget { embeddings: load_embeddings(resolve(base, emb))?, labels: None })
        }
    }
}

pub fn load_source(c: &CandidateSpec, base: &Path) -> Result<LabeledEmbeddingSet> {
    match &c.source_emb {
        Some(EmbSpec::Synth { synth }) => Ok(generate_pair(synth)?.source),
        Some(EmbSpec::Path(p)) => {
            let emb = load_embeddings(resolve(base, p))?;
            let labels_path = c
                .source_labels
                .as_ref()
                .ok_or_else(|| Error::ConfigInvalid(format!("candidate {:?} has no source_labels", c.id)))?;
            let labels = load_labels(resolve(base, labels_path))?;
            LabeledEmbeddingSet::with_inferred_classes(emb, labels)
        }
        None => {
            Err(Error::ConfigInvalid(format!("candidate {:?} needs source_emb to compute its scores", c.id)))
        }
    }
}

/// Settings shared by every candidate's baseline computations.
#[derive(Debug, Clone, Copy)]
pub struct ScoringOptions {
    pub mmd: MmdConfig,
    pub adist: ProxyClassifierConfig,
}

impl ScoringOptions {
    pub fn new(seed: u64, max_samples: Option<usize>) -> Self {
        Self {
            mmd: MmdConfig {
                bandwidth: Bandwidth::MedianHeuristic,
                max_samples_per_domain: max_samples.unwrap_or(10_000),
                seed,
            },
            adist: ProxyClassifierConfig { seed, ..Default::default() },
        }
    }
}

/// Scalar value plus, for the PAS family, the per-sample breakdown.
pub fn score_method(
    method: Method,
    source: &LabeledEmbeddingSet,
    target: &LoadedTarget,
    opts: &ScoringOptions,
) -> Result<(f64, Option<ScoreResult>)> {
    let full = |r: ScoreResult| (r.value, Some(r));
    Ok(match method {
        Method::Pas => full(pas(source, &target.embeddings)?),
        Method::PasEuclidean => full(pas_euclidean(source, &target.embeddings)?),
        Method::PasAvgPairwise => full(pas_avg_pairwise(source, &target.embeddings)?),
        Method::Oracle => {
            let labels = target
                .labels
                .as_ref()
                .ok_or_else(|| Error::ConfigInvalid("the oracle method needs target labels".into()))?;
            full(oracle_score_with_labels(source, &target.embeddings, labels)?)
        }
        Method::Mmd => (mmd_gaussian(source.embeddings(), &target.embeddings, &opts.mmd)?, None),
        Method::ADistance => (proxy_a_distance(source.embeddings(), &target.embeddings, &opts.adist)?, None),
        Method::Silhouette => (silhouette(source, SilhouetteMetric::Cosine)?, None),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetDescriptor {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub synth: Option<SynthConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub candidate_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model_id: Option<String>,
    /// Raw values; distances are nonnegative.
    pub scores: BTreeMap<Method, f64>,
    /// Higher-is-better values: distances negated.
    pub display: BTreeMap<Method, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub accuracy: Option<f64>,
}

impl ReportRow {
    pub fn to_score_row(&self) -> CandidateScoreRow {
        CandidateScoreRow {
            candidate_id: self.candidate_id.clone(),
            method_scores: self.scores.clone(),
            accuracy: self.accuracy,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub target: TargetDescriptor,
    pub rows: Vec<ReportRow>,
    pub ranking: BTreeMap<Method, Vec<String>>,
    pub selection: BTreeMap<Method, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub breakdown_path: Option<PathBuf>,
    pub seed: u64,
    pub toolkit_version: String,
}

impl Report {
    pub fn validate(&self) -> Result<()> {
        if self.schema != REPORT_SCHEMA {
            return Err(Error::ConfigInvalid(format!("unknown report schema {:?}", self.schema)));
        }
        for (method, order) in &self.ranking {
            if order.first() != self.selection.get(method) {
                return Err(Error::ConfigInvalid(format!(
                    "selection for {method} does not head its ranking"
                )));
            }
        }
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let r: Report = serde_json::from_str(&text)?;
        r.validate()?;
        Ok(r)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

/// Per-sample diagnostics keyed by candidate id, then method.
pub type Breakdowns = BTreeMap<String, BTreeMap<Method, Vec<PerSampleBreakdown>>>;

fn describe_target(spec: Option<&TargetSpec>, loaded: Option<&LoadedTarget>) -> TargetDescriptor {
    let (n, dim) = loaded.map_or((None, None), |t| (Some(t.embeddings.n()), Some(t.embeddings.dim())));
    match spec {
        None => TargetDescriptor { kind: "none".into(), path: None, synth: None, n, dim },
        Some(TargetSpec::Synth { synth }) => {
            TargetDescriptor { kind: "synth".into(), path: None, synth: Some(synth.clone()), n, dim }
        }
        Some(TargetSpec::File { emb, .. } | TargetSpec::Path(emb)) => {
            TargetDescriptor { kind: "file".into(), path: Some(emb.clone()), synth: None, n, dim }
        }
    }
}

/// Scores every candidate with every manifest method, then ranks.
///
/// Candidates are scored concurrently; results land in manifest order, so
/// the report depends only on the manifest and its seed.
pub fn build_report(manifest: &Manifest, base: &Path) -> Result<(Report, Breakdowns)> {
    manifest.validate()?;
    let needs_compute =
        manifest.candidates.iter().any(|c| manifest.methods.iter().any(|m| !c.scores.contains_key(m)));
    let target = if needs_compute {
        let spec = manifest
            .target
            .as_ref()
            .ok_or_else(|| Error::ConfigInvalid("manifest needs a target to compute scores".into()))?;
        Some(load_target(spec, base)?)
    } else {
        None
    };
    let opts = ScoringOptions::new(manifest.seed, manifest.max_samples);

    let scored = manifest
        .candidates
        .par_iter()
        .map(|c| {
            let mut scores = BTreeMap::new();
            let mut details = BTreeMap::new();
            let missing: Vec<Method> =
                manifest.methods.iter().copied().filter(|m| !c.scores.contains_key(m)).collect();
            let source = match (&target, missing.is_empty()) {
                (Some(_), false) => Some(load_source(c, base)?),
                _ => None,
            };
            for &m in &manifest.methods {
                if let Some(&v) = c.scores.get(&m) {
                    scores.insert(m, v);
                    continue;
                }
                let (src, tgt) = (source.as_ref().expect("loaded"), target.as_ref().expect("loaded"));
                let (v, detail) = score_method(m, src, tgt, &opts)?;
                scores.insert(m, v);
                if let Some(d) = detail {
                    details.insert(m, d.breakdown);
                }
            }
            Ok((scores, details))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut rows = Vec::with_capacity(scored.len());
    let mut breakdowns = Breakdowns::new();
    for (c, (scores, details)) in manifest.candidates.iter().zip(scored) {
        let display = scores.iter().map(|(&m, &v)| (m, m.oriented(v))).collect();
        rows.push(ReportRow {
            candidate_id: c.id.clone(),
            model_id: c.model_id.clone(),
            scores,
            display,
            accuracy: c.accuracy,
        });
        if !details.is_empty() {
            breakdowns.insert(c.id.clone(), details);
        }
    }

    let score_rows: Vec<CandidateScoreRow> = rows.iter().map(ReportRow::to_score_row).collect();
    let mut ranking = BTreeMap::new();
    let mut selection = BTreeMap::new();
    for &m in &manifest.methods {
        let order = rank_candidates(&score_rows, m)?;
        selection.insert(m, order[0].clone());
        ranking.insert(m, order);
    }

    let report = Report {
        schema: REPORT_SCHEMA.into(),
        target: describe_target(manifest.target.as_ref(), target.as_ref()),
        rows,
        ranking,
        selection,
        breakdown_path: None,
        seed: manifest.seed,
        toolkit_version: TOOLKIT_VERSION.into(),
    };
    report.validate()?;
    Ok((report, breakdowns))
}
