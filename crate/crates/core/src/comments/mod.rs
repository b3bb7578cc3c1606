//! Reviewer comments: linking to methods and relevance filtering.

mod classifier;
mod features;
mod rules;
mod smote;
pub mod text;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::extract::MethodRecord;
use crate::miner::ReviewComment;

pub use classifier::{
    classify, constant_baseline, cross_validate, train_relevance_model, ClassScores, ClassificationReport,
    ModelKind, RelevanceModel, TrainConfig, DEFAULT_FOLDS,
};
pub use features::{extract_features, information_gain, select_features, FeatureVector, DEFAULT_IG_THRESHOLD};
pub use rules::{Matcher, Rule, RuleSet, Verdict};
pub use smote::{oversample_minority, DEFAULT_NEIGHBORS};

#[derive(Debug, Error)]
pub enum CommentError {
    #[error("no samples")]
    EmptyInput,
    #[error("all samples carry the same label")]
    SingleClass,
    #[error("sample {index} has no label")]
    Unlabeled { index: usize },
    #[error("{have} samples cannot be split into {folds} folds")]
    TooFewSamples { have: usize, folds: usize },
    #[error("rule file line {line}: {reason}")]
    RuleFormat { line: usize, reason: String },
    #[error("labeled comments line {line}: {reason}")]
    LabeledFormat { line: usize, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Relevant,
    Irrelevant,
}

impl Label {
    /// Dense index: relevant 0, irrelevant 1.
    pub fn index(self) -> usize {
        match self {
            Label::Relevant => 0,
            Label::Irrelevant => 1,
        }
    }

    pub fn from_index(i: usize) -> Label {
        if i == 0 {
            Label::Relevant
        } else {
            Label::Irrelevant
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Relevance {
    #[default]
    Unknown,
    Relevant,
    Irrelevant,
}

impl From<Label> for Relevance {
    fn from(l: Label) -> Self {
        match l {
            Label::Relevant => Relevance::Relevant,
            Label::Irrelevant => Relevance::Irrelevant,
        }
    }
}

/// Decides whether a comment is likely to have caused a code change.
pub trait RelevanceFilter: Sync {
    fn verdict(&self, body: &str) -> Verdict;
}

impl RelevanceFilter for RuleSet {
    fn verdict(&self, body: &str) -> Verdict {
        self.classify(body)
    }
}

impl RelevanceFilter for RelevanceModel {
    fn verdict(&self, body: &str) -> Verdict {
        Verdict {
            label: classify(self, body),
            fired_rule: None,
        }
    }
}

/// Identifies a method within one file version.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MethodKey {
    pub file_path: String,
    pub signature_key: String,
    pub line_start: u32,
}

impl From<&MethodRecord> for MethodKey {
    fn from(m: &MethodRecord) -> Self {
        MethodKey {
            file_path: m.file_path.clone(),
            signature_key: m.signature_key.clone(),
            line_start: m.line_start,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkedComment {
    pub comment: ReviewComment,
    pub method_key: MethodKey,
    pub relevance: Relevance,
    pub fired_rule: Option<String>,
}

impl LinkedComment {
    pub fn new(comment: ReviewComment, method: &MethodRecord) -> Self {
        LinkedComment {
            comment,
            method_key: method.into(),
            relevance: Relevance::Unknown,
            fired_rule: None,
        }
    }

    pub fn apply(&mut self, verdict: Verdict) {
        self.relevance = verdict.label.into();
        self.fired_rule = verdict.fired_rule;
    }
}

/// Index of the innermost method of the comment's file whose span contains
/// the comment's whole line range.
pub fn link_comment(comment: &ReviewComment, methods: &[MethodRecord]) -> Option<usize> {
    methods
        .iter()
        .enumerate()
        .filter(|(_, m)| m.file_path == comment.path && m.contains_lines(comment.line_start, comment.line_end))
        .min_by_key(|(_, m)| (m.line_end - m.line_start, std::cmp::Reverse(m.line_start)))
        .map(|(i, _)| i)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledComment {
    pub body: String,
    pub label: Label,
}

/// Reads line-delimited `{"body": ..., "label": "relevant"|"irrelevant"}`
/// records. Blank lines are skipped.
pub fn parse_labeled_comments(text: &str) -> Result<Vec<LabeledComment>, CommentError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| CommentError::LabeledFormat {
                line: i + 1,
                reason: e.to_string(),
            })
        })
        .collect()
}

/// Feature vectors carrying the human labels.
pub fn labeled_vectors(comments: &[LabeledComment]) -> Vec<FeatureVector> {
    comments
        .iter()
        .map(|c| FeatureVector {
            label: Some(c.label),
            ..extract_features(&c.body)
        })
        .collect()
}
