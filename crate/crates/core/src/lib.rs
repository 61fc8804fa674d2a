//! Transferability estimation for unsupervised domain adaptation.
//!
//! Given embeddings of a labeled source domain and an unlabeled target
//! domain produced by some pre-trained feature extractor, the Potential
//! Adaptability Score ([`scores::pas`]) estimates how well that
//! (extractor, source) pair will transfer before any adaptation is run.
//! The crate also provides symmetric baselines ([`baselines`]), ranking
//! and correlation tools ([`eval`]), a synthetic domain-shift generator
//! ([`synth`]), file formats ([`io`]), and the `adaptscore` command line.

pub mod baselines;
pub mod cli;
pub mod embed;
pub mod error;
pub mod eval;
pub mod io;
pub mod manifest;
pub mod method;
pub mod scores;
pub mod synth;

pub use embed::{CentroidTable, EmbeddingSet, LabeledEmbeddingSet};
pub use error::{Error, ErrorCategory, Result};
pub use method::Method;
pub use scores::{PerSampleBreakdown, ScoreResult};
