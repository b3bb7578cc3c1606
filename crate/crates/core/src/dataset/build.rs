//! Triplet construction: linking, filtering and abstraction of review rounds.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::normalize::{mark_span, normalize_comment, MarkedSpan};
use super::{AttritionStats, MethodTriplet, Provenance};
use crate::abstraction::{abstract_comment, abstract_pair, IdiomSet};
use crate::comments::{link_comment, Label, RelevanceFilter};
use crate::extract::{extract_methods, match_method_versions, MethodRecord, SkipRecord};
use crate::java::lex_from_line;
use crate::miner::{ReviewComment, ReviewRound};

pub const DEFAULT_MAX_TOKENS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildConfig {
    pub max_tokens: usize,
}

impl Default for BuildConfig {
    fn default() -> Self {
        BuildConfig {
            max_tokens: DEFAULT_MAX_TOKENS,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct BuildOutput {
    pub triplets: Vec<MethodTriplet>,
    pub stats: AttritionStats,
    pub skips: Vec<SkipRecord>,
}

/// Every method of the submitted files of `rounds`, for idiom mining.
pub fn submitted_methods(rounds: &[ReviewRound]) -> (Vec<MethodRecord>, Vec<SkipRecord>) {
    let mut methods = Vec::new();
    let mut skips = Vec::new();
    for round in rounds {
        for file in round.submitted.iter().filter(|f| f.is_java()) {
            match extract_methods(file) {
                Ok(ms) => methods.extend(ms),
                Err(e) => skips.push(SkipRecord::from(&e)),
            }
        }
    }
    (methods, skips)
}

/// Turns review rounds into triplets. Comments pass, in order, the linking,
/// relevance, contributor and code-comment-line filters; the surviving
/// comments of each method then form a candidate that must pass the
/// abstraction, equality, length, new-identifier and singleton filters and
/// keep a non-empty normalized comment.
pub fn build_triplets(
    rounds: &[ReviewRound],
    idioms: &IdiomSet,
    relevance: &dyn RelevanceFilter,
    config: &BuildConfig,
) -> BuildOutput {
    let parts: Vec<BuildOutput> = rounds
        .par_iter()
        .map(|round| build_round(round, idioms, relevance, config))
        .collect();
    let mut out = BuildOutput {
        stats: AttritionStats {
            rounds_in: rounds.len(),
            ..AttritionStats::default()
        },
        ..BuildOutput::default()
    };
    for part in parts {
        out.triplets.extend(part.triplets);
        out.stats.absorb(&part.stats);
        out.skips.extend(part.skips);
    }
    out
}

fn context(round: &ReviewRound) -> String {
    format!("{} change {} round {}", round.project.project_id, round.change_id, round.round_index)
}

/// Whether the anchored lines hold comments but no code.
fn on_code_comment_lines(method: &MethodRecord, comment: &ReviewComment) -> bool {
    let Ok(lexed) = lex_from_line(&method.source_text, method.line_start) else {
        return false;
    };
    let code = lexed.code_lines();
    let range = comment.line_start..=comment.line_end;
    !range.clone().any(|l| code.contains(&l)) && range.into_iter().any(|l| lexed.comment_lines.contains(&l))
}

fn build_round(
    round: &ReviewRound,
    idioms: &IdiomSet,
    relevance: &dyn RelevanceFilter,
    config: &BuildConfig,
) -> BuildOutput {
    let mut out = BuildOutput::default();
    let stats = &mut out.stats;
    let mut skipped_paths = BTreeSet::new();

    let mut methods: Vec<MethodRecord> = Vec::new();
    for file in round.submitted.iter().filter(|f| f.is_java()) {
        match extract_methods(file) {
            Ok(ms) => methods.extend(ms),
            Err(e) => {
                skipped_paths.insert(e.path.clone());
                out.skips.push(SkipRecord {
                    path: e.path,
                    reason: format!("{}: submitted file: {}", context(round), e.reason),
                });
            }
        }
    }
    let (pairings, errors) = match_method_versions(&round.submitted, &round.revised);
    for e in errors {
        if !skipped_paths.contains(&e.path) {
            out.skips.push(SkipRecord {
                path: e.path,
                reason: format!("{}: revised file: {}", context(round), e.reason),
            });
        }
    }
    let revised_of: BTreeMap<(&str, &str, u32), &MethodRecord> = pairings
        .iter()
        .map(|p| ((p.before.file_path.as_str(), p.before.signature_key.as_str(), p.before.line_start), &p.after))
        .collect();

    // Comments grouped by the index of the method they are linked to.
    let mut groups: BTreeMap<usize, Vec<(usize, &ReviewComment)>> = BTreeMap::new();
    for (comment_index, comment) in round.comments.iter().enumerate() {
        stats.comments_in += 1;
        let Some(index) = link_comment(comment, &methods) else {
            stats.unlinked += 1;
            continue;
        };
        let m = &methods[index];
        if !revised_of.contains_key(&(m.file_path.as_str(), m.signature_key.as_str(), m.line_start)) {
            stats.no_revised_method += 1;
            continue;
        }
        if relevance.verdict(&comment.body).label == Label::Irrelevant {
            stats.irrelevant += 1;
            continue;
        }
        if comment.is_contributor {
            stats.contributor += 1;
            continue;
        }
        if on_code_comment_lines(m, comment) {
            stats.code_comment_line += 1;
            continue;
        }
        stats.comments_kept += 1;
        groups.entry(index).or_default().push((comment_index, comment));
    }

    for (index, comments) in groups {
        stats.candidates += 1;
        let before = &methods[index];
        let after = revised_of[&(before.file_path.as_str(), before.signature_key.as_str(), before.line_start)];
        let (m_s, m_r, map) = match abstract_pair(before, after, idioms) {
            Ok(v) => v,
            Err(e) => {
                stats.abstraction_failed += 1;
                out.skips.push(SkipRecord {
                    path: before.file_path.clone(),
                    reason: format!("{}: {}: {e}", context(round), before.signature_key),
                });
                continue;
            }
        };
        if m_s.texts() == m_r.texts() {
            stats.unchanged += 1;
            continue;
        }
        if m_s.token_count() > config.max_tokens || m_r.token_count() > config.max_tokens {
            stats.too_long += 1;
            continue;
        }
        let known: BTreeSet<_> = m_s.abstract_ids().collect();
        if m_r.abstract_ids().any(|id| !known.contains(&id)) {
            stats.new_identifier += 1;
            continue;
        }
        let [(comment_index, comment)] = comments.as_slice() else {
            stats.multiple_comments += 1;
            continue;
        };
        let r_nl = normalize_comment(&abstract_comment(&comment.body, &map));
        if r_nl.is_empty() {
            stats.empty_comment += 1;
            continue;
        }
        let span: MarkedSpan = mark_span(&m_s, comment.line_start, comment.line_end);
        stats.triplets_out += 1;
        out.triplets.push(MethodTriplet {
            provenance: Provenance {
                host_kind: round.project.host_kind,
                project_id: round.project.project_id.clone(),
                change_id: round.change_id.clone(),
                round_index: round.round_index,
                file_path: before.file_path.clone(),
                signature_key: before.signature_key.clone(),
                comment_index: *comment_index,
                comment_lines: (comment.line_start, comment.line_end),
            },
            m_s,
            m_r,
            r_nl,
            map,
            span,
        });
    }
    out
}
