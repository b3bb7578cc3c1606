//! Abstraction of Java methods into a vocabulary-limited token stream.
//!
//! Identifiers and literals are replaced by category IDs (`VAR_1`,
//! `METHOD_2`, `STRING_1`, ...) numbered by first occurrence, except for a
//! set of frequent "idioms" that are kept verbatim. A pair of methods shares
//! one [`AbstractionMap`] so the same raw token renders identically in both.

mod idioms;
mod map;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::extract::MethodRecord;
use crate::java::lexer::{self, LexError, LexKind, LexToken, LiteralKind};

pub use idioms::{compute_idioms, IdiomSet, DEFAULT_IDIOM_COUNT};
pub use map::{AbstractId, AbstractionMap, Category};

pub const START_MARKER: &str = "<START>";
pub const END_MARKER: &str = "<END>";
pub const CODE_PLACEHOLDER: &str = "_CODE_";

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum AbstractionError {
    #[error("failed to lex {which} method: {source}")]
    Lex { which: &'static str, source: LexError },
    #[error("cannot compute idioms from an empty corpus")]
    EmptyCorpus,
    #[error("idiom count must be at least 1")]
    InvalidTopN,
    #[error("tokens not present in the abstraction map: {}", ids.join(", "))]
    Unmappable { ids: Vec<String> },
    #[error("abstraction map line {line}: {reason}")]
    MapFormat { line: usize, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TokenKind {
    Keyword,
    Punctuation,
    Identifier,
    Literal,
    AbstractId,
    Special,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Token {
    pub text: String,
    pub kind: TokenKind,
}

impl Token {
    pub fn new(text: impl Into<String>, kind: TokenKind) -> Self {
        Self {
            text: text.into(),
            kind,
        }
    }

    pub fn abstract_id(&self) -> Option<AbstractId> {
        if self.kind == TokenKind::AbstractId {
            self.text.parse().ok()
        } else {
            None
        }
    }

    /// Recovers a token from its wire text, as found in dataset and
    /// prediction files.
    pub fn from_wire(text: &str) -> Self {
        let kind = if matches!(text, START_MARKER | END_MARKER | CODE_PLACEHOLDER) {
            TokenKind::Special
        } else if text.parse::<AbstractId>().is_ok() {
            TokenKind::AbstractId
        } else {
            match lexer::lex(text).map(|l| l.tokens) {
                Ok(toks) if toks.len() == 1 => match toks[0].kind {
                    LexKind::Keyword => TokenKind::Keyword,
                    LexKind::Punctuation => TokenKind::Punctuation,
                    LexKind::Identifier => TokenKind::Identifier,
                    LexKind::Literal(_) => TokenKind::Literal,
                },
                _ => TokenKind::Identifier,
            }
        };
        Self::new(text, kind)
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

/// An abstracted method. `lines[i]` is the source line token `i` came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbstractedMethod {
    pub tokens: Vec<Token>,
    pub lines: Vec<u32>,
}

impl AbstractedMethod {
    pub fn token_count(&self) -> usize {
        self.tokens.len()
    }

    pub fn texts(&self) -> Vec<&str> {
        self.tokens.iter().map(|t| t.text.as_str()).collect()
    }

    /// Single-line, space-separated rendering used by the dataset files.
    pub fn to_wire(&self) -> String {
        join_tokens(&self.tokens)
    }

    pub fn abstract_ids(&self) -> impl Iterator<Item = AbstractId> + '_ {
        self.tokens.iter().filter_map(Token::abstract_id)
    }
}

pub fn join_tokens(tokens: &[Token]) -> String {
    tokens
        .iter()
        .map(|t| t.text.as_str())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Role of the identifier at `i`, judged from its neighbours only.
fn identifier_category(toks: &[LexToken], i: usize) -> Category {
    let prev = i.checked_sub(1).map(|j| toks[j].text.as_str());
    let next = toks.get(i + 1);
    let text = toks[i].text.as_str();
    if prev == Some("@") {
        return Category::Type;
    }
    if next.is_some_and(|t| t.is("(")) {
        return if prev == Some("new") {
            Category::Type
        } else {
            Category::Method
        };
    }
    if prev == Some("new") {
        return Category::Type;
    }
    if prev == Some("::") {
        return Category::Method;
    }
    let first_upper = text.chars().next().is_some_and(char::is_uppercase);
    if first_upper {
        let constant = text.chars().count() > 1
            && text
                .chars()
                .all(|c| c.is_uppercase() || c.is_ascii_digit() || c == '_' || c == '$');
        return if constant { Category::Var } else { Category::Type };
    }
    if next.is_some_and(|t| t.is_identifier()) {
        return Category::Type;
    }
    Category::Var
}

fn literal_category(kind: LiteralKind) -> Category {
    match kind {
        LiteralKind::String => Category::String,
        LiteralKind::Char => Category::Char,
        LiteralKind::Int => Category::Int,
        LiteralKind::Float => Category::Float,
    }
}

fn lex_method(method: &MethodRecord, which: &'static str) -> Result<Vec<LexToken>, AbstractionError> {
    lexer::lex_from_line(&method.source_text, method.line_start)
        .map(|l| l.tokens)
        .map_err(|source| AbstractionError::Lex { which, source })
}

fn abstract_tokens(toks: &[LexToken], idioms: &IdiomSet, map: &mut AbstractionMap) -> AbstractedMethod {
    let mut tokens = Vec::with_capacity(toks.len());
    let mut lines = Vec::with_capacity(toks.len());
    for (i, tok) in toks.iter().enumerate() {
        let category = match tok.kind {
            LexKind::Keyword => {
                tokens.push(Token::new(&tok.text, TokenKind::Keyword));
                lines.push(tok.line);
                continue;
            }
            LexKind::Punctuation => {
                tokens.push(Token::new(&tok.text, TokenKind::Punctuation));
                lines.push(tok.line);
                continue;
            }
            LexKind::Identifier => identifier_category(toks, i),
            LexKind::Literal(kind) => literal_category(kind),
        };
        let token = if idioms.contains(&tok.text) {
            let kind = if category.is_identifier() {
                TokenKind::Identifier
            } else {
                TokenKind::Literal
            };
            Token::new(&tok.text, kind)
        } else {
            Token::new(map.intern(&tok.text, category).to_string(), TokenKind::AbstractId)
        };
        tokens.push(token);
        lines.push(tok.line);
    }
    AbstractedMethod { tokens, lines }
}

/// Abstracts a single method with its own map.
pub fn abstract_method(
    method: &MethodRecord,
    idioms: &IdiomSet,
) -> Result<(AbstractedMethod, AbstractionMap), AbstractionError> {
    let toks = lex_method(method, "submitted")?;
    let mut map = AbstractionMap::new();
    let out = abstract_tokens(&toks, idioms, &mut map);
    Ok((out, map))
}

/// Abstracts `before` and `after` with one shared map: IDs are assigned by
/// scanning `before` completely, then `after` for tokens not yet seen.
pub fn abstract_pair(
    before: &MethodRecord,
    after: &MethodRecord,
    idioms: &IdiomSet,
) -> Result<(AbstractedMethod, AbstractedMethod, AbstractionMap), AbstractionError> {
    let before_toks = lex_method(before, "submitted")?;
    let after_toks = lex_method(after, "revised")?;
    let mut map = AbstractionMap::new();
    let b = abstract_tokens(&before_toks, idioms, &mut map);
    let a = abstract_tokens(&after_toks, idioms, &mut map);
    Ok((b, a, map))
}

/// Maps abstract IDs back to raw text. Span markers are dropped; every other
/// token is returned as is.
pub fn concretize(tokens: &[Token], map: &AbstractionMap) -> Result<Vec<String>, AbstractionError> {
    let mut out = Vec::with_capacity(tokens.len());
    let mut missing: Vec<String> = Vec::new();
    for tok in tokens {
        if tok.kind == TokenKind::Special && (tok.text == START_MARKER || tok.text == END_MARKER) {
            continue;
        }
        match tok.abstract_id() {
            Some(id) => match map.raw(&id) {
                Some(raw) => out.push(raw.to_string()),
                None => {
                    if !missing.contains(&tok.text) {
                        missing.push(tok.text.clone());
                    }
                }
            },
            None => out.push(tok.text.clone()),
        }
    }
    if missing.is_empty() {
        Ok(out)
    } else {
        Err(AbstractionError::Unmappable { ids: missing })
    }
}

/// Lowercase letter followed by an uppercase one, or an underscore between
/// two alphanumerics.
pub fn is_camel_case(word: &str) -> bool {
    let chars: Vec<char> = word.chars().collect();
    chars.windows(2).any(|w| w[0].is_lowercase() && w[1].is_uppercase())
        || chars
            .windows(3)
            .any(|w| w[1] == '_' && w[0].is_alphanumeric() && w[2].is_alphanumeric())
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '$'
}

/// Rewrites code mentions in a reviewer comment using the method pair's map.
///
/// Each whitespace-separated word is split into identifier-like runs and the
/// punctuation between them. Runs bound in `map` become their IDs; remaining
/// camel-case runs become `_CODE_`. Everything else is left untouched.
pub fn abstract_comment(body: &str, map: &AbstractionMap) -> Vec<String> {
    body.split_whitespace()
        .map(|word| {
            let mut out = String::with_capacity(word.len());
            let mut run = String::new();
            let flush = |run: &mut String, out: &mut String| {
                if run.is_empty() {
                    return;
                }
                out.push_str(&rewrite_run(run, map));
                run.clear();
            };
            for c in word.chars() {
                if is_word_char(c) {
                    run.push(c);
                } else {
                    flush(&mut run, &mut out);
                    out.push(c);
                }
            }
            flush(&mut run, &mut out);
            out
        })
        .collect()
}

fn rewrite_run(run: &str, map: &AbstractionMap) -> String {
    let starts_like_identifier = run
        .chars()
        .next()
        .is_some_and(|c| c.is_alphabetic() || c == '_' || c == '$');
    if !starts_like_identifier || run.parse::<AbstractId>().is_ok() || run == CODE_PLACEHOLDER {
        return run.to_string();
    }
    if let Some(id) = map.lookup_any(run) {
        return id.to_string();
    }
    if is_camel_case(run) {
        return CODE_PLACEHOLDER.to_string();
    }
    run.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn method(src: &str) -> MethodRecord {
        MethodRecord {
            file_path: "A.java".into(),
            name: "m".into(),
            parameter_arity: 0,
            signature_key: "m()".into(),
            line_start: 1,
            line_end: src.lines().count().max(1) as u32,
            source_text: src.into(),
        }
    }

    fn rendered(src: &str, idioms: &[&str]) -> String {
        let idioms = IdiomSet::from_entries(idioms.iter().copied());
        abstract_method(&method(src), &idioms).unwrap().0.to_wire()
    }

    #[test]
    fn statement_without_idioms() {
        assert_eq!(rendered("int sum = 0;", &[]), "int VAR_1 = INT_1 ;");
    }

    #[test]
    fn idioms_are_kept() {
        assert_eq!(rendered("int sum = 0;", &["0"]), "int VAR_1 = 0 ;");
    }

    #[test]
    fn roles_from_context() {
        let src = r#"@Override public List<Item> load(String path) throws IOException {
  Item first = Loader.read(path, MAX_SIZE, 'c', 1.5f, "x");
  return new ArrayList<>(cache.values());
}"#;
        assert_eq!(
            rendered(src, &[]),
            "@ TYPE_1 public TYPE_2 < TYPE_3 > METHOD_1 ( TYPE_4 VAR_1 ) throws TYPE_5 { \
             TYPE_3 VAR_2 = TYPE_6 . METHOD_2 ( VAR_1 , VAR_3 , CHAR_1 , FLOAT_1 , STRING_1 ) ; \
             return new TYPE_7 < > ( VAR_4 . METHOD_3 ( ) ) ; }"
        );
    }

    #[test]
    fn comments_are_stripped() {
        assert_eq!(rendered("int a = 1; // note\n/* more */ a++;", &[]), "int VAR_1 = INT_1 ; VAR_1 ++ ;");
    }

    #[test]
    fn pair_shares_ids() {
        let before = method("int f() { int sum = 0; return sum; }");
        let after = method("int f() { int total = 0; int sum = total; return sum; }");
        let (b, a, map) = abstract_pair(&before, &after, &IdiomSet::default()).unwrap();
        assert_eq!(b.to_wire(), "int METHOD_1 ( ) { int VAR_1 = INT_1 ; return VAR_1 ; }");
        assert_eq!(
            a.to_wire(),
            "int METHOD_1 ( ) { int VAR_2 = INT_1 ; int VAR_1 = VAR_2 ; return VAR_1 ; }"
        );
        assert_eq!(map.raw(&"VAR_2".parse().unwrap()), Some("total"));
    }

    #[test]
    fn token_lines_follow_the_file() {
        let mut m = method("void f() {\n  x();\n}");
        m.line_start = 10;
        let (out, _) = abstract_method(&m, &IdiomSet::default()).unwrap();
        assert_eq!(out.lines, vec![10, 10, 10, 10, 10, 11, 11, 11, 11, 12]);
    }

    #[test]
    fn lexing_failures_name_the_side() {
        let ok = method("void f() {}");
        let bad = method("void f() { \"open }");
        let err = abstract_pair(&ok, &bad, &IdiomSet::default()).unwrap_err();
        assert!(matches!(err, AbstractionError::Lex { which: "revised", .. }));
    }

    #[test]
    fn concretize_inverts_the_walk() {
        let (out, map) = abstract_method(&method("int sum = 0;"), &IdiomSet::default()).unwrap();
        assert_eq!(concretize(&out.tokens, &map).unwrap(), vec!["int", "sum", "=", "0", ";"]);
    }

    #[test]
    fn concretize_without_ids_is_identity() {
        let toks: Vec<Token> = ["return", "i", ";"].iter().map(|t| Token::from_wire(t)).collect();
        assert_eq!(concretize(&toks, &AbstractionMap::new()).unwrap(), vec!["return", "i", ";"]);
    }

    #[test]
    fn concretize_reports_unknown_ids() {
        let mut map = AbstractionMap::new();
        map.intern("a", Category::Var);
        map.intern("b", Category::Var);
        let toks: Vec<Token> = "VAR_1 = VAR_3 + VAR_2".split(' ').map(Token::from_wire).collect();
        assert_eq!(
            concretize(&toks, &map),
            Err(AbstractionError::Unmappable {
                ids: vec!["VAR_3".into()]
            })
        );
    }

    #[test]
    fn wire_token_kinds() {
        assert_eq!(Token::from_wire("VAR_1").kind, TokenKind::AbstractId);
        assert_eq!(Token::from_wire("<START>").kind, TokenKind::Special);
        assert_eq!(Token::from_wire("_CODE_").kind, TokenKind::Special);
        assert_eq!(Token::from_wire("while").kind, TokenKind::Keyword);
        assert_eq!(Token::from_wire(">>=").kind, TokenKind::Punctuation);
        assert_eq!(Token::from_wire("0").kind, TokenKind::Literal);
        assert_eq!(Token::from_wire("size").kind, TokenKind::Identifier);
    }

    #[test]
    fn comment_mentions_are_abstracted() {
        let mut map = AbstractionMap::new();
        map.intern("sum", Category::Var);
        let words = abstract_comment("change the type of sum to double", &map);
        assert_eq!(words.join(" "), "change the type of VAR_1 to double");
        assert_eq!(
            abstract_comment("rename getFooBar please", &AbstractionMap::new()).join(" "),
            "rename _CODE_ please"
        );
        assert_eq!(abstract_comment("looks good", &map).join(" "), "looks good");
        assert_eq!(abstract_comment("why sum?", &map).join(" "), "why VAR_1?");
        assert!(abstract_comment("", &map).is_empty());
    }

    #[test]
    fn camel_case_detection() {
        for yes in ["getFoo", "a_b", "MAX_SIZE", "iPhone"] {
            assert!(is_camel_case(yes), "{yes}");
        }
        for no in ["String", "hello", "_private", "trailing_", "URL"] {
            assert!(!is_camel_case(no), "{no}");
        }
    }
}
