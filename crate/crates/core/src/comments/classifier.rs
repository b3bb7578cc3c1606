//! N-gram relevance classifiers and cross-validation.
//!
//! These exist for comparison with the keyword heuristics, which remain the
//! filter used when building datasets.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::features::{extract_features, select_features, FeatureVector, DEFAULT_IG_THRESHOLD};
use super::smote::{oversample_minority, DEFAULT_NEIGHBORS};
use super::{CommentError, Label};

pub const DEFAULT_FOLDS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    RandomForest,
    DecisionTree,
    NaiveBayes,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub trees: usize,
    pub seed: u64,
    pub ig_threshold: f64,
    /// Balance the training data with SMOTE before fitting.
    pub oversample: bool,
    pub neighbors: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            trees: 100,
            seed: 0,
            ig_threshold: DEFAULT_IG_THRESHOLD,
            oversample: false,
            neighbors: DEFAULT_NEIGHBORS,
        }
    }
}

#[derive(Debug, Clone)]
enum Node {
    Leaf {
        p_relevant: f64,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone)]
struct Tree {
    nodes: Vec<Node>,
}

impl Tree {
    fn p_relevant(&self, x: &[f64]) -> f64 {
        let mut at = 0;
        loop {
            match self.nodes[at] {
                Node::Leaf { p_relevant } => return p_relevant,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => at = if x[feature] <= threshold { left } else { right },
            }
        }
    }
}

fn gini(relevant: usize, total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let p = relevant as f64 / total as f64;
    2.0 * p * (1.0 - p)
}

struct Grower<'a> {
    x: &'a [Vec<f64>],
    y: &'a [bool],
    /// Features drawn per node; `None` considers all of them.
    mtry: Option<usize>,
    rng: ChaCha8Rng,
    nodes: Vec<Node>,
}

impl Grower<'_> {
    /// Best (weighted impurity, feature, threshold) over `features`.
    fn best_split(&self, rows: &[usize], features: &[usize]) -> Option<(f64, usize, f64)> {
        let total_rel = rows.iter().filter(|&&r| self.y[r]).count();
        let n = rows.len();
        let mut best: Option<(f64, usize, f64)> = None;
        let mut sorted = rows.to_vec();
        for &f in features {
            sorted.sort_by(|&a, &b| self.x[a][f].total_cmp(&self.x[b][f]));
            let mut left_rel = 0;
            for i in 0..n - 1 {
                if self.y[sorted[i]] {
                    left_rel += 1;
                }
                let (v, next) = (self.x[sorted[i]][f], self.x[sorted[i + 1]][f]);
                if v == next {
                    continue;
                }
                let left_n = i + 1;
                let right_n = n - left_n;
                let score = (left_n as f64 * gini(left_rel, left_n)
                    + right_n as f64 * gini(total_rel - left_rel, right_n))
                    / n as f64;
                if best.is_none_or(|(s, _, _)| score < s - 1e-12) {
                    best = Some((score, f, (v + next) / 2.0));
                }
            }
        }
        best
    }

    fn grow(&mut self, rows: &[usize]) -> usize {
        let id = self.nodes.len();
        let relevant = rows.iter().filter(|&&r| self.y[r]).count();
        self.nodes.push(Node::Leaf {
            p_relevant: relevant as f64 / rows.len() as f64,
        });
        if relevant == 0 || relevant == rows.len() {
            return id;
        }
        let width = self.x[0].len();
        let mut order: Vec<usize> = (0..width).collect();
        let split = match self.mtry {
            Some(m) if m < width => {
                order.shuffle(&mut self.rng);
                // Fall back to the remaining features when the drawn ones
                // cannot separate anything.
                self.best_split(rows, &order[..m])
                    .or_else(|| self.best_split(rows, &order[m..]))
            }
            _ => self.best_split(rows, &order),
        };
        let Some((_, feature, threshold)) = split else {
            return id;
        };
        let (l, r): (Vec<usize>, Vec<usize>) = rows.iter().partition(|&&i| self.x[i][feature] <= threshold);
        let left = self.grow(&l);
        let right = self.grow(&r);
        self.nodes[id] = Node::Split {
            feature,
            threshold,
            left,
            right,
        };
        id
    }
}

fn fit_tree(x: &[Vec<f64>], y: &[bool], rows: &[usize], mtry: Option<usize>, seed: u64) -> Tree {
    let mut grower = Grower {
        x,
        y,
        mtry,
        rng: ChaCha8Rng::seed_from_u64(seed),
        nodes: Vec::new(),
    };
    grower.grow(rows);
    Tree { nodes: grower.nodes }
}

/// Multinomial naive Bayes with add-one smoothing.
#[derive(Debug, Clone)]
struct NaiveBayes {
    log_prior: [f64; 2],
    log_likelihood: [Vec<f64>; 2],
}

impl NaiveBayes {
    fn fit(x: &[Vec<f64>], y: &[bool]) -> Self {
        let width = x.first().map_or(0, Vec::len);
        let mut totals = [vec![0.0; width], vec![0.0; width]];
        let mut docs = [0usize; 2];
        for (row, &rel) in x.iter().zip(y) {
            let c = usize::from(rel);
            docs[c] += 1;
            for (t, v) in totals[c].iter_mut().zip(row) {
                *t += v;
            }
        }
        let log_likelihood = totals.map(|t| {
            let sum: f64 = t.iter().sum::<f64>() + width as f64;
            t.iter().map(|v| ((v + 1.0) / sum).ln()).collect()
        });
        let n = x.len() as f64;
        NaiveBayes {
            log_prior: docs.map(|d| (d as f64 / n).ln()),
            log_likelihood,
        }
    }

    fn p_relevant(&self, x: &[f64]) -> f64 {
        let score = |c: usize| {
            self.log_prior[c] + x.iter().zip(&self.log_likelihood[c]).map(|(v, l)| v * l).sum::<f64>()
        };
        let (s0, s1) = (score(0), score(1));
        1.0 / (1.0 + (s0 - s1).exp())
    }
}

#[derive(Debug, Clone)]
enum State {
    Tree(Tree),
    Forest(Vec<Tree>),
    Bayes(NaiveBayes),
}

#[derive(Debug, Clone)]
pub struct RelevanceModel {
    pub kind: ModelKind,
    pub selected_features: BTreeSet<String>,
    vocabulary: Vec<String>,
    state: State,
}

impl RelevanceModel {
    fn dense(&self, v: &FeatureVector) -> Vec<f64> {
        self.vocabulary.iter().map(|f| v.get(f)).collect()
    }

    /// Estimated probability that `v` is relevant.
    pub fn p_relevant(&self, v: &FeatureVector) -> f64 {
        let x = self.dense(v);
        match &self.state {
            State::Tree(t) => t.p_relevant(&x),
            State::Forest(trees) => trees.iter().map(|t| t.p_relevant(&x)).sum::<f64>() / trees.len() as f64,
            State::Bayes(nb) => nb.p_relevant(&x),
        }
    }

    pub fn predict(&self, v: &FeatureVector) -> Label {
        if self.p_relevant(v) >= 0.5 {
            Label::Relevant
        } else {
            Label::Irrelevant
        }
    }
}

/// Selects features by information gain, optionally oversamples, and fits
/// a model of the requested kind.
pub fn train_relevance_model(
    vectors: &[FeatureVector],
    kind: ModelKind,
    config: &TrainConfig,
) -> Result<RelevanceModel, CommentError> {
    let selected = select_features(vectors, config.ig_threshold)?;
    let mut training: Vec<FeatureVector> = vectors.iter().map(|v| v.restrict(&selected)).collect();
    if config.oversample {
        training = oversample_minority(&training, config.neighbors, config.seed)?;
    }
    let vocabulary: Vec<String> = selected.iter().cloned().collect();
    let x: Vec<Vec<f64>> = training
        .iter()
        .map(|v| vocabulary.iter().map(|f| v.get(f)).collect())
        .collect();
    let y: Vec<bool> = training.iter().map(|v| v.label == Some(Label::Relevant)).collect();
    let rows: Vec<usize> = (0..x.len()).collect();
    let state = match kind {
        ModelKind::DecisionTree => State::Tree(fit_tree(&x, &y, &rows, None, config.seed)),
        ModelKind::RandomForest => {
            let width = vocabulary.len();
            let mtry = (width.max(1) as f64).log2().floor() as usize + 1;
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            let trees = (0..config.trees.max(1))
                .map(|_| {
                    let bag: Vec<usize> = (0..rows.len()).map(|_| rng.random_range(0..rows.len())).collect();
                    fit_tree(&x, &y, &bag, Some(mtry), rng.random())
                })
                .collect();
            State::Forest(trees)
        }
        ModelKind::NaiveBayes => State::Bayes(NaiveBayes::fit(&x, &y)),
    };
    Ok(RelevanceModel {
        kind,
        selected_features: selected,
        vocabulary,
        state,
    })
}

/// Classifies a comment body that has already gone through abstraction.
pub fn classify(model: &RelevanceModel, body: &str) -> Label {
    model.predict(&extract_features(body))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassScores {
    pub precision: f64,
    pub recall: f64,
    pub support: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationReport {
    pub relevant: ClassScores,
    pub irrelevant: ClassScores,
    pub accuracy: f64,
    /// `confusion[truth][predicted]`, indexed by [`Label::index`].
    pub confusion: [[usize; 2]; 2],
}

impl ClassificationReport {
    /// Precision of a class that is never predicted is reported as 0.
    pub fn from_predictions(truth: &[Label], predicted: &[Label]) -> Self {
        assert_eq!(truth.len(), predicted.len(), "one prediction per sample");
        let mut confusion = [[0usize; 2]; 2];
        for (t, p) in truth.iter().zip(predicted) {
            confusion[t.index()][p.index()] += 1;
        }
        let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
        let scores = |c: usize| ClassScores {
            precision: ratio(confusion[c][c], confusion[0][c] + confusion[1][c]),
            recall: ratio(confusion[c][c], confusion[c][0] + confusion[c][1]),
            support: confusion[c][0] + confusion[c][1],
        };
        ClassificationReport {
            relevant: scores(Label::Relevant.index()),
            irrelevant: scores(Label::Irrelevant.index()),
            accuracy: ratio(confusion[0][0] + confusion[1][1], truth.len()),
            confusion,
        }
    }
}

/// Scores of the classifier that answers "relevant" for every comment.
pub fn constant_baseline(truth: &[Label]) -> ClassificationReport {
    ClassificationReport::from_predictions(truth, &vec![Label::Relevant; truth.len()])
}

/// Stratified k-fold cross-validation. Feature selection and oversampling
/// only ever see the training folds.
pub fn cross_validate(
    vectors: &[FeatureVector],
    kind: ModelKind,
    config: &TrainConfig,
    folds: usize,
) -> Result<ClassificationReport, CommentError> {
    if folds < 2 || vectors.len() < folds {
        return Err(CommentError::TooFewSamples {
            have: vectors.len(),
            folds,
        });
    }
    let truth: Vec<Label> = vectors
        .iter()
        .enumerate()
        .map(|(i, v)| v.label.ok_or(CommentError::Unlabeled { index: i }))
        .collect::<Result<_, _>>()?;

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut fold_of = vec![0usize; vectors.len()];
    let mut next = 0;
    for label in [Label::Relevant, Label::Irrelevant] {
        let mut members: Vec<usize> = (0..vectors.len()).filter(|&i| truth[i] == label).collect();
        members.shuffle(&mut rng);
        for i in members {
            fold_of[i] = next % folds;
            next += 1;
        }
    }

    let mut predicted = vec![Label::Relevant; vectors.len()];
    for fold in 0..folds {
        let train: Vec<FeatureVector> = (0..vectors.len())
            .filter(|&i| fold_of[i] != fold)
            .map(|i| vectors[i].clone())
            .collect();
        let model = train_relevance_model(&train, kind, config)?;
        for i in (0..vectors.len()).filter(|&i| fold_of[i] == fold) {
            predicted[i] = model.predict(&vectors[i]);
        }
    }
    Ok(ClassificationReport::from_predictions(&truth, &predicted))
}
