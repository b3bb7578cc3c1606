//! SMOTE oversampling of the minority class.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::features::FeatureVector;
use super::{CommentError, Label};

pub const DEFAULT_NEIGHBORS: usize = 5;

fn distance_sq(a: &FeatureVector, b: &FeatureVector) -> f64 {
    let keys: BTreeSet<&String> = a.features.keys().chain(b.features.keys()).collect();
    keys.into_iter()
        .map(|k| {
            let d = a.get(k) - b.get(k);
            d * d
        })
        .sum()
}

/// Point `gap` of the way from `a` to `b`.
fn interpolate(a: &FeatureVector, b: &FeatureVector, gap: f64) -> BTreeMap<String, f64> {
    let keys: BTreeSet<&String> = a.features.keys().chain(b.features.keys()).collect();
    keys.into_iter()
        .filter_map(|k| {
            let (x, y) = (a.get(k), b.get(k));
            let v = x + gap * (y - x);
            (v != 0.0).then(|| (k.clone(), v))
        })
        .collect()
}

/// Adds synthetic minority samples until both classes have the same size.
///
/// Originals keep their order and the synthetic samples are appended. Each
/// synthetic sample lies on the segment between a minority sample and one of
/// its `k` nearest minority neighbours. A minority class of one sample is
/// duplicated instead.
pub fn oversample_minority(
    vectors: &[FeatureVector],
    k: usize,
    seed: u64,
) -> Result<Vec<FeatureVector>, CommentError> {
    if vectors.is_empty() {
        return Err(CommentError::EmptyInput);
    }
    let mut by_class: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
    for (i, v) in vectors.iter().enumerate() {
        let label = v.label.ok_or(CommentError::Unlabeled { index: i })?;
        by_class[label.index()].push(i);
    }
    if by_class.iter().any(Vec::is_empty) {
        return Err(CommentError::SingleClass);
    }
    let (minority_label, minority, majority_len) = if by_class[0].len() < by_class[1].len() {
        (Label::from_index(0), &by_class[0], by_class[1].len())
    } else {
        (Label::from_index(1), &by_class[1], by_class[0].len())
    };
    let mut out = vectors.to_vec();
    let needed = majority_len - minority.len();
    if needed == 0 {
        return Ok(out);
    }
    if minority.len() == 1 {
        log::warn!("minority class has a single sample; duplicating it instead of interpolating");
        out.extend(std::iter::repeat_n(vectors[minority[0]].clone(), needed));
        return Ok(out);
    }

    let k = k.max(1).min(minority.len() - 1);
    let neighbours: Vec<Vec<usize>> = minority
        .iter()
        .map(|&i| {
            let mut others: Vec<(f64, usize)> = minority
                .iter()
                .filter(|&&j| j != i)
                .map(|&j| (distance_sq(&vectors[i], &vectors[j]), j))
                .collect();
            others.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            others.into_iter().take(k).map(|(_, j)| j).collect()
        })
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for n in 0..needed {
        let slot = n % minority.len();
        let base = &vectors[minority[slot]];
        let other = &vectors[neighbours[slot][rng.random_range(0..k)]];
        let gap: f64 = rng.random();
        out.push(FeatureVector::labeled(interpolate(base, other, gap), minority_label));
    }
    Ok(out)
}
