//! Deduplication and train/eval/test splitting.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{AttritionStats, DatasetError, MethodTriplet};
use crate::abstraction::IdiomSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Eval,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Eval, Split::Test];

    pub fn name(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Eval => "eval",
            Split::Test => "test",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitRatios {
    pub train: f64,
    pub eval: f64,
    pub test: f64,
}

impl Default for SplitRatios {
    fn default() -> Self {
        SplitRatios {
            train: 0.8,
            eval: 0.1,
            test: 0.1,
        }
    }
}

impl SplitRatios {
    pub fn validate(&self) -> Result<(), DatasetError> {
        let parts = [self.train, self.eval, self.test];
        if parts.iter().any(|r| !r.is_finite() || *r < 0.0 || *r > 1.0) {
            return Err(DatasetError::Ratios {
                reason: format!("each ratio must lie in [0, 1], got {parts:?}"),
            });
        }
        let sum: f64 = parts.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(DatasetError::Ratios {
                reason: format!("ratios sum to {sum}, not 1"),
            });
        }
        Ok(())
    }

    /// `(train, eval, test)` sizes for `n` instances: eval and test are
    /// floored, train takes the remainder.
    pub fn sizes(&self, n: usize) -> (usize, usize, usize) {
        let eval = (n as f64 * self.eval).floor() as usize;
        let test = (n as f64 * self.test).floor() as usize;
        (n - eval - test, eval, test)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetBundle {
    pub train: Vec<MethodTriplet>,
    pub eval: Vec<MethodTriplet>,
    pub test: Vec<MethodTriplet>,
    pub idioms: IdiomSet,
    pub stats: AttritionStats,
    pub seed: u64,
    pub ratios: SplitRatios,
}

impl DatasetBundle {
    pub fn split(&self, split: Split) -> &[MethodTriplet] {
        match split {
            Split::Train => &self.train,
            Split::Eval => &self.eval,
            Split::Test => &self.test,
        }
    }

    pub fn len(&self) -> usize {
        self.train.len() + self.eval.len() + self.test.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Removes duplicates, then shuffles with `seed` and splits.
///
/// A triplet is a duplicate when its D_t line equals an earlier one. A
/// triplet whose D_p line (the same method pair under another comment)
/// equals an earlier one is dropped as well, so that D_p is free of
/// duplicates and stays aligned with D_t.
pub fn split_and_dedup(
    triplets: Vec<MethodTriplet>,
    ratios: SplitRatios,
    seed: u64,
    idioms: IdiomSet,
    mut stats: AttritionStats,
) -> Result<DatasetBundle, DatasetError> {
    ratios.validate()?;
    let mut seen_dt = HashSet::new();
    let mut seen_dp = HashSet::new();
    let mut unique = Vec::with_capacity(triplets.len());
    stats.duplicate_triplets = 0;
    stats.duplicate_pairs = 0;
    for t in triplets {
        if !seen_dt.insert(t.dt_line()) {
            stats.duplicate_triplets += 1;
        } else if !seen_dp.insert(t.dp_line()) {
            stats.duplicate_pairs += 1;
        } else {
            unique.push(t);
        }
    }
    if unique.len() < 3 {
        return Err(DatasetError::TooFewInstances { found: unique.len() });
    }
    stats.instances_out = unique.len();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    unique.shuffle(&mut rng);
    let (n_train, n_eval, _) = ratios.sizes(unique.len());
    let test = unique.split_off(n_train + n_eval);
    let eval = unique.split_off(n_train);
    Ok(DatasetBundle {
        train: unique,
        eval,
        test,
        idioms,
        stats,
        seed,
        ratios,
    })
}
