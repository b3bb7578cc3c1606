use std::collections::{BTreeSet, HashMap};

use sha2::{Digest, Sha256};

use super::AbstractionError;
use crate::extract::MethodRecord;
use crate::java::lexer::{self, LexKind};

pub const DEFAULT_IDIOM_COUNT: usize = 300;

/// Identifiers and literals frequent enough to be kept verbatim by the
/// abstraction.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IdiomSet {
    entries: BTreeSet<String>,
}

impl IdiomSet {
    pub fn from_entries<I, S>(entries: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self {
            entries: entries
                .into_iter()
                .map(Into::into)
                .filter(|e: &String| usable_idiom(e))
                .collect(),
        }
    }

    pub fn contains(&self, raw: &str) -> bool {
        self.entries.contains(raw)
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(String::as_str)
    }

    /// One idiom per line, sorted.
    pub fn to_text(&self) -> String {
        self.entries.iter().map(|e| format!("{e}\n")).collect()
    }

    pub fn from_text(text: &str) -> Self {
        Self::from_entries(text.lines().filter(|l| !l.is_empty()))
    }

    /// Hex SHA-256 of [`IdiomSet::to_text`].
    pub fn digest(&self) -> String {
        let hash = Sha256::digest(self.to_text().as_bytes());
        hash.iter().map(|b| format!("{b:02x}")).collect()
    }
}

// Tokens containing whitespace cannot survive the space-separated wire format.
fn usable_idiom(raw: &str) -> bool {
    !raw.is_empty() && !raw.chars().any(char::is_whitespace)
}

/// The `top_n` most frequent identifiers and literals across `corpus`, ties
/// broken by lexicographic order. Methods that fail to lex are skipped.
pub fn compute_idioms(corpus: &[MethodRecord], top_n: usize) -> Result<IdiomSet, AbstractionError> {
    if top_n == 0 {
        return Err(AbstractionError::InvalidTopN);
    }
    if corpus.is_empty() {
        return Err(AbstractionError::EmptyCorpus);
    }
    let mut counts: HashMap<String, usize> = HashMap::new();
    for method in corpus {
        let Ok(lexed) = lexer::lex(&method.source_text) else {
            continue;
        };
        for tok in lexed.tokens {
            if matches!(tok.kind, LexKind::Identifier | LexKind::Literal(_)) && usable_idiom(&tok.text) {
                *counts.entry(tok.text).or_default() += 1;
            }
        }
    }
    let mut ranked: Vec<(String, usize)> = counts.into_iter().collect();
    ranked.sort_by(|(a, ca), (b, cb)| cb.cmp(ca).then_with(|| a.cmp(b)));
    Ok(IdiomSet {
        entries: ranked.into_iter().take(top_n).map(|(t, _)| t).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(src: &str) -> MethodRecord {
        MethodRecord {
            file_path: "A.java".into(),
            name: "f".into(),
            parameter_arity: 0,
            signature_key: "f()".into(),
            line_start: 1,
            line_end: 1,
            source_text: src.into(),
        }
    }

    #[test]
    fn most_frequent_wins() {
        // `i` appears 10 times, `total` twice, `f` once
        let corpus = vec![
            record("void f() { for (i = i; i < i; i++) { total += i; } }"),
            record("{ i = i + i + total + i; }"),
        ];
        let idioms = compute_idioms(&corpus, 1).unwrap();
        assert_eq!(idioms.entries().collect::<Vec<_>>(), vec!["i"]);
    }

    #[test]
    fn saturates_at_distinct_count() {
        let corpus = vec![record("void f() { int a = 1; b(a, \"s\"); }")];
        let idioms = compute_idioms(&corpus, 300).unwrap();
        assert_eq!(idioms.entries().collect::<Vec<_>>(), vec!["\"s\"", "1", "a", "b", "f"]);
    }

    #[test]
    fn ties_break_lexicographically() {
        // `beta` and `alpha` both appear twice, `gamma` once
        let corpus = vec![record("{ beta(alpha); alpha = beta; gamma(); }")];
        let idioms = compute_idioms(&corpus, 1).unwrap();
        assert_eq!(idioms.entries().collect::<Vec<_>>(), vec!["alpha"]);
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(compute_idioms(&[], 3), Err(AbstractionError::EmptyCorpus));
        assert_eq!(compute_idioms(&[record("{}")], 0), Err(AbstractionError::InvalidTopN));
    }

    #[test]
    fn whitespace_literals_are_never_idioms() {
        let corpus = vec![record("{ s(\"a b\"); s(\"a b\"); s(\"a b\"); }")];
        let idioms = compute_idioms(&corpus, 10).unwrap();
        assert!(!idioms.contains("\"a b\""));
        assert!(idioms.contains("s"));
    }

    #[test]
    fn text_round_trip_and_digest() {
        let idioms = IdiomSet::from_entries(["size", "0", "i"]);
        let again = IdiomSet::from_text(&idioms.to_text());
        assert_eq!(idioms, again);
        assert_eq!(idioms.digest(), again.digest());
        assert_eq!(idioms.digest().len(), 64);
    }
}
