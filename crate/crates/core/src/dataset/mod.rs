//! Triplet (D_t) and pair (D_p) datasets built from review rounds.

mod build;
mod io;
mod normalize;
mod split;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::abstraction::{AbstractedMethod, AbstractionMap};
use crate::miner::HostKind;

pub use build::{build_triplets, submitted_methods, BuildConfig, BuildOutput, DEFAULT_MAX_TOKENS};
pub use io::{
    read_maps, read_pairs, read_triplets, write_atomic, write_bundle, Manifest, PairLine, SplitCounts, TripletLine,
    MANIFEST_FILE,
};
pub use normalize::{mark_span, normalize_comment, with_markers, MarkedSpan};
pub use split::{split_and_dedup, DatasetBundle, Split, SplitRatios};

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("{found} instances left after deduplication; at least 3 are needed to split")]
    TooFewInstances { found: usize },
    #[error("invalid split ratios: {reason}")]
    Ratios { reason: String },
    #[error("{path}:{line}: {reason}")]
    Format { path: String, line: usize, reason: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub host_kind: HostKind,
    pub project_id: String,
    pub change_id: String,
    pub round_index: u32,
    pub file_path: String,
    pub signature_key: String,
    /// Position of the comment within its round.
    pub comment_index: usize,
    pub comment_lines: (u32, u32),
}

/// A submitted method, the reviewer comment it received and its revision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MethodTriplet {
    pub m_s: AbstractedMethod,
    pub m_r: AbstractedMethod,
    pub r_nl: Vec<String>,
    pub map: AbstractionMap,
    pub span: MarkedSpan,
    pub provenance: Provenance,
}

impl MethodTriplet {
    /// `m_s` with the reviewed region marked.
    pub fn marked_source(&self) -> Vec<String> {
        with_markers(&self.m_s, self.span)
    }

    /// `m_s<TAB>r_nl<TAB>m_r` with markers in `m_s`.
    pub fn dt_line(&self) -> String {
        format!("{}\t{}\t{}", self.marked_source().join(" "), self.r_nl.join(" "), self.m_r.to_wire())
    }

    /// `m_s<TAB>m_r` without markers.
    pub fn dp_line(&self) -> String {
        format!("{}\t{}", self.m_s.to_wire(), self.m_r.to_wire())
    }
}

/// How many items each filter removed. Comment-level filters count
/// comments; candidate-level filters count (method, round) candidates.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttritionStats {
    pub rounds_in: usize,
    pub comments_in: usize,
    pub unlinked: usize,
    pub no_revised_method: usize,
    pub irrelevant: usize,
    pub contributor: usize,
    pub code_comment_line: usize,
    pub comments_kept: usize,
    pub candidates: usize,
    pub abstraction_failed: usize,
    pub unchanged: usize,
    pub too_long: usize,
    pub new_identifier: usize,
    pub multiple_comments: usize,
    pub empty_comment: usize,
    pub triplets_out: usize,
    pub duplicate_triplets: usize,
    pub duplicate_pairs: usize,
    pub instances_out: usize,
}

impl AttritionStats {
    fn absorb(&mut self, o: &AttritionStats) {
        self.comments_in += o.comments_in;
        self.unlinked += o.unlinked;
        self.no_revised_method += o.no_revised_method;
        self.irrelevant += o.irrelevant;
        self.contributor += o.contributor;
        self.code_comment_line += o.code_comment_line;
        self.comments_kept += o.comments_kept;
        self.candidates += o.candidates;
        self.abstraction_failed += o.abstraction_failed;
        self.unchanged += o.unchanged;
        self.too_long += o.too_long;
        self.new_identifier += o.new_identifier;
        self.multiple_comments += o.multiple_comments;
        self.empty_comment += o.empty_comment;
        self.triplets_out += o.triplets_out;
    }

    /// Rows `(stage, removed)` in filter order, for reports.
    pub fn removals(&self) -> Vec<(&'static str, usize)> {
        vec![
            ("unlinked", self.unlinked),
            ("no_revised_method", self.no_revised_method),
            ("irrelevant", self.irrelevant),
            ("contributor", self.contributor),
            ("code_comment_line", self.code_comment_line),
            ("abstraction_failed", self.abstraction_failed),
            ("unchanged", self.unchanged),
            ("too_long", self.too_long),
            ("new_identifier", self.new_identifier),
            ("multiple_comments", self.multiple_comments),
            ("empty_comment", self.empty_comment),
            ("duplicate_triplets", self.duplicate_triplets),
            ("duplicate_pairs", self.duplicate_pairs),
        ]
    }

    /// Every stage accounts exactly for its input.
    pub fn is_consistent(&self) -> bool {
        let comments = self.unlinked
            + self.no_revised_method
            + self.irrelevant
            + self.contributor
            + self.code_comment_line
            + self.comments_kept;
        let candidates = self.abstraction_failed
            + self.unchanged
            + self.too_long
            + self.new_identifier
            + self.multiple_comments
            + self.empty_comment
            + self.triplets_out;
        comments == self.comments_in
            && candidates == self.candidates
            && self.candidates <= self.comments_kept
            && self.triplets_out == self.duplicate_triplets + self.duplicate_pairs + self.instances_out
    }
}
