use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Identifier of a scoring method, as used in manifests, reports and on the
/// command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "pas")]
    Pas,
    #[serde(rename = "pas_euclidean")]
    PasEuclidean,
    #[serde(rename = "pas_avg_pairwise")]
    PasAvgPairwise,
    #[serde(rename = "oracle")]
    Oracle,
    #[serde(rename = "mmd")]
    Mmd,
    #[serde(rename = "adist")]
    ADistance,
    #[serde(rename = "silhouette")]
    Silhouette,
}

impl Method {
    pub const ALL: [Method; 7] = [
        Method::Pas,
        Method::PasEuclidean,
        Method::PasAvgPairwise,
        Method::Oracle,
        Method::Mmd,
        Method::ADistance,
        Method::Silhouette,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Method::Pas => "pas",
            Method::PasEuclidean => "pas_euclidean",
            Method::PasAvgPairwise => "pas_avg_pairwise",
            Method::Oracle => "oracle",
            Method::Mmd => "mmd",
            Method::ADistance => "adist",
            Method::Silhouette => "silhouette",
        }
    }

    /// Distances (MMD, A-distance) are better when smaller.
    pub fn is_distance(self) -> bool {
        matches!(self, Method::Mmd | Method::ADistance)
    }

    /// Maps a raw value to "higher is better" orientation, negating distances.
    pub fn oriented(self, raw: f64) -> f64 {
        if self.is_distance() {
            -raw
        } else {
            raw
        }
    }

    /// Whether the method reads target labels.
    pub fn needs_target_labels(self) -> bool {
        matches!(self, Method::Oracle)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL.into_iter().find(|m| m.id() == s).ok_or_else(|| Error::UnknownMethod(s.to_string()))
    }
}
