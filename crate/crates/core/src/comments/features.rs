//! N-gram features and information-gain feature selection.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::text::{is_stopword, stem, words};
use super::{CommentError, Label};

pub const DEFAULT_IG_THRESHOLD: f64 = 0.01;

/// Sparse n-gram counts. Values are counts for extracted vectors and may be
/// fractional for synthetic oversampled ones.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub features: BTreeMap<String, f64>,
    pub label: Option<Label>,
}

impl FeatureVector {
    pub fn labeled(features: BTreeMap<String, f64>, label: Label) -> Self {
        FeatureVector {
            features,
            label: Some(label),
        }
    }

    pub fn get(&self, feature: &str) -> f64 {
        self.features.get(feature).copied().unwrap_or(0.0)
    }

    pub fn has(&self, feature: &str) -> bool {
        self.get(feature) > 0.0
    }

    /// Keeps only the features in `keep`.
    pub fn restrict(&self, keep: &BTreeSet<String>) -> FeatureVector {
        FeatureVector {
            features: self
                .features
                .iter()
                .filter(|(k, _)| keep.contains(*k))
                .map(|(k, v)| (k.clone(), *v))
                .collect(),
            label: self.label,
        }
    }
}

/// 1-grams without stopwords and Porter-stemmed, plus 2- and 3-grams of the
/// raw lowercased words.
pub fn extract_features(body: &str) -> FeatureVector {
    let ws = words(body);
    let mut features: BTreeMap<String, f64> = BTreeMap::new();
    for w in ws.iter().filter(|w| !is_stopword(w)) {
        *features.entry(stem(w)).or_default() += 1.0;
    }
    for n in 2..=3 {
        for gram in ws.windows(n) {
            *features.entry(gram.join(" ")).or_default() += 1.0;
        }
    }
    FeatureVector { features, label: None }
}

fn entropy(counts: &[usize]) -> f64 {
    let total: usize = counts.iter().sum();
    if total == 0 {
        return 0.0;
    }
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / total as f64;
            -p * p.log2()
        })
        .sum()
}

fn labels_of(vectors: &[FeatureVector]) -> Result<Vec<Label>, CommentError> {
    if vectors.is_empty() {
        return Err(CommentError::EmptyInput);
    }
    let labels: Vec<Label> = vectors
        .iter()
        .enumerate()
        .map(|(i, v)| v.label.ok_or(CommentError::Unlabeled { index: i }))
        .collect::<Result<_, _>>()?;
    if labels.iter().all(|l| *l == labels[0]) {
        return Err(CommentError::SingleClass);
    }
    Ok(labels)
}

fn class_counts<'a>(labels: impl Iterator<Item = &'a Label>) -> [usize; 2] {
    let mut counts = [0; 2];
    for l in labels {
        counts[l.index()] += 1;
    }
    counts
}

/// Label entropy minus the label entropy conditioned on whether `feature` is
/// present, in bits.
pub fn information_gain(vectors: &[FeatureVector], feature: &str) -> Result<f64, CommentError> {
    let labels = labels_of(vectors)?;
    Ok(gain(vectors, &labels, feature))
}

fn gain(vectors: &[FeatureVector], labels: &[Label], feature: &str) -> f64 {
    let n = labels.len() as f64;
    let (with, without): (Vec<_>, Vec<_>) = vectors
        .iter()
        .zip(labels)
        .partition(|(v, _)| v.has(feature));
    let with = class_counts(with.iter().map(|(_, l)| *l));
    let without = class_counts(without.iter().map(|(_, l)| *l));
    let total = class_counts(labels.iter());
    let n_with = (with[0] + with[1]) as f64;
    let n_without = (without[0] + without[1]) as f64;
    let conditional = n_with / n * entropy(&with) + n_without / n * entropy(&without);
    (entropy(&total) - conditional).max(0.0)
}

/// Features whose information gain reaches `threshold`.
pub fn select_features(vectors: &[FeatureVector], threshold: f64) -> Result<BTreeSet<String>, CommentError> {
    let labels = labels_of(vectors)?;
    let candidates: BTreeSet<&String> = vectors.iter().flat_map(|v| v.features.keys()).collect();
    Ok(candidates
        .into_iter()
        .filter(|f| gain(vectors, &labels, f) >= threshold)
        .cloned()
        .collect())
}
