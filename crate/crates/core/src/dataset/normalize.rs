//! Comment normalization and span marking.

use std::sync::OnceLock;

use regex::Regex;

use crate::abstraction::{AbstractId, AbstractedMethod, CODE_PLACEHOLDER, END_MARKER, START_MARKER};
use crate::comments::text::is_stopword;

fn url_pattern() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?i)^<?(https?://|ftp://|www\.)\S+$").expect("valid URL pattern"))
}

const EDGE_PUNCTUATION: &[char] = &[
    '?', '!', '.', ',', ';', ':', '"', '\'', '`', '(', ')', '[', ']', '{', '}', '<', '>', '*', '\u{201c}', '\u{201d}',
    '\u{2018}', '\u{2019}',
];

fn is_code_word(word: &str) -> bool {
    word == CODE_PLACEHOLDER || word.parse::<AbstractId>().is_ok()
}

/// Cleans a code-abstracted comment: drops links, strips punctuation around
/// words, lowercases everything except abstract IDs and `_CODE_`, and removes
/// stopwords.
pub fn normalize_comment<S: AsRef<str>>(words: &[S]) -> Vec<String> {
    words
        .iter()
        .map(AsRef::as_ref)
        .filter(|w| !url_pattern().is_match(w))
        .filter_map(|w| {
            let w = w.trim_matches(EDGE_PUNCTUATION);
            if w.is_empty() {
                return None;
            }
            if is_code_word(w) {
                return Some(w.to_string());
            }
            let lower = w.to_lowercase();
            let key: String = lower.chars().filter(|&c| c != '\'' && c != '\u{2019}').collect();
            (!is_stopword(&key)).then_some(lower)
        })
        .collect()
}

/// Inclusive token range of the reviewed region within `m_s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct MarkedSpan {
    pub start: usize,
    pub end: usize,
    /// The anchor lines held no tokens and the span was moved to the nearest
    /// following token.
    pub snapped: bool,
}

/// Locates the tokens of `m_s` that come from lines `line_start..=line_end`.
pub fn mark_span(m_s: &AbstractedMethod, line_start: u32, line_end: u32) -> MarkedSpan {
    let lines = &m_s.lines;
    let last = lines.len().saturating_sub(1);
    let exact = lines.contains(&line_start) && lines.contains(&line_end);
    let start = lines.iter().position(|&l| l >= line_start).unwrap_or(last);
    let end = lines.iter().rposition(|&l| l <= line_end).unwrap_or(start);
    if end < start {
        return MarkedSpan {
            start,
            end: start,
            snapped: true,
        };
    }
    MarkedSpan {
        start,
        end,
        snapped: !exact,
    }
}

/// Token texts of `m_s` with `<START>` before the span and `<END>` after it.
pub fn with_markers(m_s: &AbstractedMethod, span: MarkedSpan) -> Vec<String> {
    let mut out = Vec::with_capacity(m_s.tokens.len() + 2);
    for (i, tok) in m_s.tokens.iter().enumerate() {
        if i == span.start {
            out.push(START_MARKER.to_string());
        }
        out.push(tok.text.clone());
        if i == span.end {
            out.push(END_MARKER.to_string());
        }
    }
    out
}
