//! Word-level text processing shared by feature extraction and comment
//! normalization.

use std::collections::HashSet;
use std::sync::OnceLock;

const STOPWORDS: &str = include_str!("../../data/stopwords.txt");

/// Lowercased words of `text`. Apostrophes are dropped so `don't` stays one
/// word; any other character that is not alphanumeric or `_` separates words.
pub fn words(text: &str) -> Vec<String> {
    text.to_lowercase()
        .replace(['\'', '\u{2019}'], "")
        .split(|c: char| !(c.is_alphanumeric() || c == '_'))
        .filter(|w| !w.is_empty())
        .map(str::to_string)
        .collect()
}

fn stopword_set() -> &'static HashSet<String> {
    static SET: OnceLock<HashSet<String>> = OnceLock::new();
    SET.get_or_init(|| {
        STOPWORDS
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(|l| l.replace('\'', ""))
            .collect()
    })
}

/// Whether `word` (lowercase, apostrophes removed) is an English stopword.
pub fn is_stopword(word: &str) -> bool {
    stopword_set().contains(word)
}

pub fn stopword_count() -> usize {
    stopword_set().len()
}

/// Porter (1980) stem of a lowercase word.
pub fn stem(word: &str) -> String {
    porter_stemmer::stem(word)
}
