//! Seeded synthetic source/target pairs under a controllable covariate shift,
//! and a nearest-centroid accuracy used as a stand-in for post-adaptation
//! accuracy.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::embed::{dot, norm, unit_normalize, EmbeddingSet, LabeledEmbeddingSet, NORM_EPS};
use crate::error::{Error, Result};
use crate::scores::nearest_classes;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub num_classes: usize,
    pub dim: usize,
    pub n_source_per_class: usize,
    pub n_target_per_class: usize,
    /// Per-coordinate standard deviation of the noise added to class means.
    pub intra_spread: f64,
    /// Noise for the target domain; defaults to `intra_spread`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_spread: Option<f64>,
    /// Rotation angle (radians) in a random plane, and scale of the
    /// per-class mean jitter applied to the target domain.
    pub shift: f64,
    pub seed: u64,
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::ConfigInvalid(m.to_string()));
        if self.num_classes < 2 {
            return bad("num_classes must be >= 2");
        }
        if self.dim < 2 {
            return bad("dim must be >= 2");
        }
        if self.n_source_per_class == 0 || self.n_target_per_class == 0 {
            return bad("per-class sample counts must be >= 1");
        }
        let nonneg = |v: f64| v >= 0.0 && v.is_finite();
        if !nonneg(self.intra_spread) || !self.target_spread.is_none_or(nonneg) {
            return bad("spreads must be finite and >= 0");
        }
        if !nonneg(self.shift) {
            return bad("shift must be finite and >= 0");
        }
        Ok(())
    }

    pub fn target_spread(&self) -> f64 {
        self.target_spread.unwrap_or(self.intra_spread)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticPair {
    pub source: LabeledEmbeddingSet,
    /// Target labels are only for evaluation; scores never read them.
    pub target: LabeledEmbeddingSet,
    pub warnings: Vec<String>,
}

fn gaussian(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
}

/// Removes the components along `basis` (assumed orthonormal) and normalizes.
/// Returns `None` when nothing is left.
fn orthonormalize(mut v: Vec<f64>, basis: &[Vec<f64>]) -> Option<Vec<f64>> {
    for b in basis {
        let p = dot(&v, b);
        v.iter_mut().zip(b).for_each(|(x, y)| *x -= p * y);
    }
    let n = norm(&v);
    (n > 1e-8).then(|| v.into_iter().map(|x| x / n).collect())
}

/// Draws vectors until `count` orthonormal directions are collected.
fn orthonormal_directions(rng: &mut ChaCha8Rng, count: usize, d: usize) -> Vec<Vec<f64>> {
    let mut basis = Vec::with_capacity(count);
    while basis.len() < count {
        if let Some(v) = orthonormalize(gaussian(rng, d), &basis) {
            basis.push(v);
        }
    }
    basis
}

fn rotate_in_plane(x: &[f64], u: &[f64], v: &[f64], angle: f64) -> Vec<f64> {
    let (a, b) = (dot(x, u), dot(x, v));
    let (s, c) = angle.sin_cos();
    let du = a * c - b * s - a;
    let dv = a * s + b * c - b;
    x.iter().zip(u).zip(v).map(|((xi, ui), vi)| xi + du * ui + dv * vi).collect()
}

fn draw_domain(
    rng: &mut ChaCha8Rng,
    means: &[Vec<f64>],
    per_class: usize,
    spread: f64,
) -> Result<LabeledEmbeddingSet> {
    let d = means[0].len();
    let mut data = Vec::with_capacity(means.len() * per_class * d);
    let mut labels = Vec::with_capacity(means.len() * per_class);
    for (c, mean) in means.iter().enumerate() {
        for _ in 0..per_class {
            let noise = gaussian(rng, d);
            data.extend(mean.iter().zip(&noise).map(|(m, z)| m + spread * z));
            labels.push(c);
        }
    }
    let raw = EmbeddingSet::new(data, labels.len(), d)?;
    LabeledEmbeddingSet::new(unit_normalize(&raw)?, labels, means.len())
}

/// Generates a labeled source domain and a shifted, labeled target domain.
///
/// One ChaCha8 stream seeded with `cfg.seed` is consumed in a fixed order:
/// class means, rotation plane, mean jitter, source samples, target samples.
/// The plane and jitter are drawn even when `shift == 0`, so changing only the
/// shift leaves the class means and source samples untouched.
pub fn generate_pair(cfg: &SynthConfig) -> Result<SyntheticPair> {
    cfg.validate()?;
    let (c, d) = (cfg.num_classes, cfg.dim);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut warnings = Vec::new();

    let means = if c <= d {
        orthonormal_directions(&mut rng, c, d)
    } else {
        warnings
            .push(format!("num_classes ({c}) exceeds dim ({d}); class means drawn uniformly on the sphere"));
        (0..c)
            .map(|_| loop {
                let g = gaussian(&mut rng, d);
                let n = norm(&g);
                if n > NORM_EPS {
                    break g.into_iter().map(|x| x / n).collect::<Vec<_>>();
                }
            })
            .collect()
    };
    let plane = orthonormal_directions(&mut rng, 2, d);
    let jitter_scale = cfg.shift / (d as f64).sqrt();
    let target_means: Vec<Vec<f64>> = means
        .iter()
        .map(|m| {
            let jitter = gaussian(&mut rng, d);
            rotate_in_plane(m, &plane[0], &plane[1], cfg.shift)
                .into_iter()
                .zip(jitter)
                .map(|(x, j)| x + jitter_scale * j)
                .collect()
        })
        .collect();

    let source = draw_domain(&mut rng, &means, cfg.n_source_per_class, cfg.intra_spread)?;
    let target = draw_domain(&mut rng, &target_means, cfg.n_target_per_class, cfg.target_spread())?;
    Ok(SyntheticPair { source, target, warnings })
}

/// Share of target samples whose nearest source centroid (cosine distance,
/// lowest class id on ties) is their true class.
pub fn nearest_centroid_accuracy(source: &LabeledEmbeddingSet, target: &LabeledEmbeddingSet) -> Result<f64> {
    for (row, &label) in target.labels().iter().enumerate() {
        if label >= source.num_classes() {
            return Err(Error::LabelOutOfRange { row, label, num_classes: source.num_classes() });
        }
    }
    let predicted = nearest_classes(source, target.embeddings())?;
    let correct = predicted.iter().zip(target.labels()).filter(|(p, t)| p == t).count();
    Ok(correct as f64 / target.n() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scores::pas;

    fn cfg(shift: f64, spread: f64) -> SynthConfig {
        SynthConfig {
            num_classes: 4,
            dim: 8,
            n_source_per_class: 10,
            n_target_per_class: 10,
            intra_spread: spread,
            target_spread: None,
            shift,
            seed: 11,
        }
    }

    #[test]
    fn noiseless_unshifted_targets_sit_on_means() {
        let p = generate_pair(&cfg(0.0, 0.0)).unwrap();
        for (row, &label) in p.target.embeddings().rows().zip(p.target.labels()) {
            let src_row = p.source.embeddings().row(label * 10);
            for (a, b) in row.iter().zip(src_row) {
                assert!((a - b).abs() < 1e-12);
            }
        }
        assert_eq!(nearest_centroid_accuracy(&p.source, &p.target).unwrap(), 1.0);
        assert!((pas(&p.source, p.target.embeddings()).unwrap().value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_classes_in_the_plane_have_two_distinct_rows() {
        let c = SynthConfig { num_classes: 2, dim: 2, ..cfg(0.4, 0.0) };
        let p = generate_pair(&c).unwrap();
        for set in [p.source.embeddings(), p.target.embeddings()] {
            let mut distinct: Vec<&[f64]> = Vec::new();
            for r in set.rows() {
                if !distinct.contains(&r) {
                    distinct.push(r);
                }
            }
            assert_eq!(distinct.len(), 2);
        }
    }

    #[test]
    fn same_seed_same_bits() {
        let a = generate_pair(&cfg(0.3, 0.2)).unwrap();
        let b = generate_pair(&cfg(0.3, 0.2)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn shift_only_touches_target() {
        let a = generate_pair(&cfg(0.0, 0.2)).unwrap();
        let b = generate_pair(&cfg(0.6, 0.2)).unwrap();
        assert_eq!(a.source, b.source);
        assert_ne!(a.target, b.target);
    }

    #[test]
    fn more_classes_than_dims_warns() {
        let c = SynthConfig { num_classes: 5, dim: 3, ..cfg(0.0, 0.1) };
        let p = generate_pair(&c).unwrap();
        assert_eq!(p.warnings.len(), 1);
        assert_eq!(p.source.num_classes(), 5);
    }

    #[test]
    fn invalid_configs() {
        for bad in [
            SynthConfig { num_classes: 1, ..cfg(0.0, 0.1) },
            SynthConfig { dim: 1, ..cfg(0.0, 0.1) },
            SynthConfig { n_target_per_class: 0, ..cfg(0.0, 0.1) },
            cfg(-0.1, 0.1),
            cfg(0.0, f64::NAN),
            SynthConfig { target_spread: Some(-1.0), ..cfg(0.0, 0.1) },
        ] {
            assert!(matches!(generate_pair(&bad), Err(Error::ConfigInvalid(_))));
        }
    }

    #[test]
    fn deranged_labels_score_zero_accuracy() {
        let p = generate_pair(&cfg(0.0, 0.0)).unwrap();
        let shifted: Vec<usize> = p.target.labels().iter().map(|l| (l + 1) % 4).collect();
        let t = LabeledEmbeddingSet::new(p.target.embeddings().clone(), shifted, 4).unwrap();
        assert_eq!(nearest_centroid_accuracy(&p.source, &t).unwrap(), 0.0);
    }

    #[test]
    fn tie_goes_to_lowest_class() {
        let e = EmbeddingSet::from_rows(&[[1.0, 0.0], [0.0, 1.0]]).unwrap();
        let s = LabeledEmbeddingSet::new(e, vec![0, 1], 2).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let t = EmbeddingSet::from_rows(&[[h, h], [0.0, 1.0]]).unwrap();
        let as0 = LabeledEmbeddingSet::new(t.clone(), vec![0, 1], 2).unwrap();
        let as1 = LabeledEmbeddingSet::new(t, vec![1, 0], 2).unwrap();
        assert_eq!(nearest_centroid_accuracy(&s, &as0).unwrap(), 1.0);
        assert_eq!(nearest_centroid_accuracy(&s, &as1).unwrap(), 0.0);
    }

    #[test]
    fn rotation_preserves_length() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let plane = orthonormal_directions(&mut rng, 2, 6);
        let x = gaussian(&mut rng, 6);
        let y = rotate_in_plane(&x, &plane[0], &plane[1], 0.7);
        assert!((norm(&x) - norm(&y)).abs() < 1e-12);
        let back = rotate_in_plane(&y, &plane[0], &plane[1], -0.7);
        for (a, b) in x.iter().zip(&back) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
