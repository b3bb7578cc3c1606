//! Method extraction from Java files and matching of submitted methods to
//! their revised counterparts.
//!
//! The parser only understands enough structure to find member declarations:
//! type bodies, member boundaries, method headers and brace-delimited bodies.
//! Methods inside anonymous or local classes are emitted as records of their
//! own, so comment linking can pick the innermost one.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::java::lexer::{self, LexError, LexKind, LexToken};
use crate::miner::FileVersion;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MethodRecord {
    pub file_path: String,
    pub name: String,
    pub parameter_arity: usize,
    /// `name(Type1,Type2)` with generic arguments erased and type names kept
    /// exactly as written.
    pub signature_key: String,
    pub line_start: u32,
    pub line_end: u32,
    /// Declaration text from the first annotation or modifier through the
    /// closing brace (or semicolon for bodiless declarations).
    pub source_text: String,
}

impl MethodRecord {
    pub fn contains_lines(&self, start: u32, end: u32) -> bool {
        start >= self.line_start && end <= self.line_end
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MethodPairing {
    pub before: MethodRecord,
    pub after: MethodRecord,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot extract methods from {path}: {reason}")]
pub struct ExtractionError {
    pub path: String,
    pub reason: String,
}

/// Machine-readable record of a file or item skipped by the pipeline.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkipRecord {
    pub path: String,
    pub reason: String,
}

impl From<&ExtractionError> for SkipRecord {
    fn from(err: &ExtractionError) -> Self {
        Self {
            path: err.path.clone(),
            reason: err.reason.clone(),
        }
    }
}

/// Minimum share of common tokens for the rename fallback in
/// [`match_method_versions`].
pub const RENAME_OVERLAP_THRESHOLD: f64 = 0.6;

pub fn extract_methods(file: &FileVersion) -> Result<Vec<MethodRecord>, ExtractionError> {
    let fail = |reason: String| ExtractionError {
        path: file.path.clone(),
        reason,
    };
    let lexed = lexer::lex(&file.content).map_err(|e: LexError| fail(e.to_string()))?;
    let matching = match_brackets(&lexed.tokens).map_err(fail)?;
    let mut parser = Parser {
        toks: &lexed.tokens,
        matching: &matching,
        src: &file.content,
        path: &file.path,
        pos: 0,
        out: Vec::new(),
    };
    parser.compilation_unit().map_err(fail)?;
    let mut out = parser.out;
    out.sort_by_key(|(start, _)| *start);
    Ok(out.into_iter().map(|(_, m)| m).collect())
}

/// For every bracket token, the index of its partner.
fn match_brackets(toks: &[LexToken]) -> Result<Vec<Option<usize>>, String> {
    let mut matching = vec![None; toks.len()];
    let mut stack: Vec<usize> = Vec::new();
    for (i, tok) in toks.iter().enumerate() {
        if tok.kind != LexKind::Punctuation {
            continue;
        }
        let open = match tok.text.as_str() {
            "(" | "{" | "[" => {
                stack.push(i);
                continue;
            }
            ")" => "(",
            "}" => "{",
            "]" => "[",
            _ => continue,
        };
        match stack.pop() {
            Some(j) if toks[j].text == open => {
                matching[i] = Some(j);
                matching[j] = Some(i);
            }
            _ => return Err(format!("unbalanced '{}' on line {}", tok.text, tok.line)),
        }
    }
    if let Some(&j) = stack.last() {
        return Err(format!("unclosed '{}' on line {}", toks[j].text, toks[j].line));
    }
    Ok(matching)
}

const MODIFIERS: &[&str] = &[
    "public",
    "protected",
    "private",
    "static",
    "final",
    "abstract",
    "native",
    "synchronized",
    "transient",
    "volatile",
    "strictfp",
    "default",
];

struct Parser<'a> {
    toks: &'a [LexToken],
    matching: &'a [Option<usize>],
    src: &'a str,
    path: &'a str,
    pos: usize,
    out: Vec<(usize, MethodRecord)>,
}

type ParseResult<T = ()> = Result<T, String>;

impl<'a> Parser<'a> {
    fn tok(&self, i: usize) -> Option<&'a LexToken> {
        self.toks.get(i)
    }

    fn is(&self, i: usize, text: &str) -> bool {
        self.tok(i).is_some_and(|t| t.text == text)
    }

    fn partner(&self, i: usize) -> ParseResult<usize> {
        self.matching[i].ok_or_else(|| format!("no partner for token on line {}", self.toks[i].line))
    }

    fn eof(&self) -> String {
        "unexpected end of file".to_string()
    }

    fn compilation_unit(&mut self) -> ParseResult {
        while self.pos < self.toks.len() {
            if self.at_type_declaration(self.pos) {
                self.type_declaration()?;
            } else {
                self.pos += 1;
            }
        }
        Ok(())
    }

    /// `class`, `interface`, `enum`, `@interface` or a `record` header.
    fn at_type_declaration(&self, i: usize) -> bool {
        let Some(tok) = self.tok(i) else { return false };
        let after_dot = i > 0 && self.is(i - 1, ".");
        match tok.text.as_str() {
            "class" | "interface" | "enum" => !after_dot && tok.kind == LexKind::Keyword,
            "record" => {
                tok.is_identifier()
                    && self.tok(i + 1).is_some_and(LexToken::is_identifier)
                    && (self.is(i + 2, "(") || self.is(i + 2, "<"))
            }
            _ => false,
        }
    }

    /// Parses from a type keyword through the end of its body.
    fn type_declaration(&mut self) -> ParseResult {
        let is_enum = self.is(self.pos, "enum");
        let mut i = self.pos + 1;
        loop {
            let tok = self.tok(i).ok_or_else(|| self.eof())?;
            match tok.text.as_str() {
                "{" => break,
                "(" => i = self.partner(i)? + 1,
                ";" => {
                    return Err(format!("type declaration without body on line {}", tok.line));
                }
                _ => i += 1,
            }
        }
        self.pos = i + 1;
        self.class_body(is_enum)
    }

    /// Parses members until the `}` closing the body, consuming it.
    fn class_body(&mut self, is_enum: bool) -> ParseResult {
        if is_enum {
            self.enum_constants()?;
        }
        loop {
            let tok = self.tok(self.pos).ok_or_else(|| self.eof())?;
            match tok.text.as_str() {
                "}" => {
                    self.pos += 1;
                    return Ok(());
                }
                ";" => self.pos += 1,
                _ => self.member()?,
            }
        }
    }

    /// Enum constants, with optional arguments and bodies, up to the `;` that
    /// starts ordinary members (or the closing brace).
    fn enum_constants(&mut self) -> ParseResult {
        loop {
            self.skip_annotations()?;
            let tok = self.tok(self.pos).ok_or_else(|| self.eof())?;
            match tok.text.as_str() {
                ";" => {
                    self.pos += 1;
                    return Ok(());
                }
                "}" => return Ok(()),
                "," => self.pos += 1,
                "(" => self.pos = self.partner(self.pos)? + 1,
                "{" => {
                    self.pos += 1;
                    self.class_body(false)?;
                }
                _ => self.pos += 1,
            }
        }
    }

    fn skip_annotations(&mut self) -> ParseResult {
        while self.is(self.pos, "@") && !self.is(self.pos + 1, "interface") {
            self.pos += 1;
            while self.tok(self.pos).is_some_and(LexToken::is_identifier) {
                self.pos += 1;
                if self.is(self.pos, ".") {
                    self.pos += 1;
                } else {
                    break;
                }
            }
            if self.is(self.pos, "(") {
                self.pos = self.partner(self.pos)? + 1;
            }
        }
        Ok(())
    }

    fn skip_modifiers(&mut self) -> ParseResult {
        loop {
            let before = self.pos;
            self.skip_annotations()?;
            while let Some(tok) = self.tok(self.pos) {
                let contextual = tok.is_identifier()
                    && matches!(tok.text.as_str(), "sealed" | "non")
                    && !self.is(self.pos + 1, "(");
                if MODIFIERS.contains(&tok.text.as_str()) && tok.kind == LexKind::Keyword {
                    self.pos += 1;
                } else if contextual {
                    // `sealed`, and `non-sealed` which lexes as three tokens
                    self.pos += if tok.text == "non" { 3 } else { 1 };
                } else {
                    break;
                }
            }
            if self.pos == before {
                return Ok(());
            }
        }
    }

    fn member(&mut self) -> ParseResult {
        let start = self.pos;
        self.skip_modifiers()?;
        if self.is(self.pos, "@") && self.is(self.pos + 1, "interface") {
            self.pos += 1;
            return self.type_declaration();
        }
        if self.at_type_declaration(self.pos) {
            return self.type_declaration();
        }
        if self.is(self.pos, "{") {
            self.pos += 1;
            return self.block();
        }
        // Compact canonical constructor of a record: `Name {`.
        if self.tok(self.pos).is_some_and(LexToken::is_identifier) && self.is(self.pos + 1, "{") {
            let name_idx = self.pos;
            let close = self.partner(self.pos + 1)?;
            self.pos += 2;
            self.block()?;
            return self.emit(start, name_idx, None, close);
        }
        let mut i = self.pos;
        loop {
            let tok = self.tok(i).ok_or_else(|| self.eof())?;
            match tok.text.as_str() {
                "(" => {
                    let name_ok = i > self.pos && self.toks[i - 1].is_identifier();
                    if !name_ok {
                        return Err(format!("unexpected '(' in member on line {}", tok.line));
                    }
                    return self.method(start, i - 1, i);
                }
                "=" => {
                    self.pos = i + 1;
                    return self.until_semicolon();
                }
                ";" => {
                    self.pos = i + 1;
                    return Ok(());
                }
                "{" | "}" => {
                    return Err(format!("unexpected '{}' in member on line {}", tok.text, tok.line));
                }
                "[" => i = self.partner(i)? + 1,
                _ => i += 1,
            }
        }
    }

    fn method(&mut self, start: usize, name_idx: usize, open: usize) -> ParseResult {
        let close = self.partner(open)?;
        let mut i = close + 1;
        loop {
            let tok = self.tok(i).ok_or_else(|| self.eof())?;
            match tok.text.as_str() {
                ";" => {
                    self.pos = i + 1;
                    return self.emit(start, name_idx, Some((open, close)), i);
                }
                "{" => {
                    let end = self.partner(i)?;
                    self.pos = i + 1;
                    self.block()?;
                    return self.emit(start, name_idx, Some((open, close)), end);
                }
                "default" => {
                    // annotation element default value, may hold `{...}`
                    self.pos = i + 1;
                    self.until_semicolon()?;
                    let end = self.pos - 1;
                    return self.emit(start, name_idx, Some((open, close)), end);
                }
                "(" | "[" => i = self.partner(i)? + 1,
                "}" => return Err(format!("unexpected '}}' after method header on line {}", tok.line)),
                _ => i += 1,
            }
        }
    }

    fn emit(
        &mut self,
        start: usize,
        name_idx: usize,
        params: Option<(usize, usize)>,
        end: usize,
    ) -> ParseResult {
        let name = self.toks[name_idx].text.clone();
        let types = match params {
            Some((open, close)) => self.parameter_types(open + 1, close)?,
            None => Vec::new(),
        };
        let first = &self.toks[start];
        let last = &self.toks[end];
        let record = MethodRecord {
            file_path: self.path.to_string(),
            signature_key: format!("{}({})", name, types.join(",")),
            parameter_arity: types.len(),
            name,
            line_start: first.line,
            line_end: last.end_line,
            source_text: self.src[first.start..last.end].to_string(),
        };
        self.out.push((first.start, record));
        Ok(())
    }

    /// Erased type names of the parameters between `from` and `to`
    /// (exclusive).
    fn parameter_types(&self, from: usize, to: usize) -> ParseResult<Vec<String>> {
        let mut params: Vec<Vec<&LexToken>> = Vec::new();
        let mut current: Vec<&LexToken> = Vec::new();
        let mut angle = 0i32;
        let mut i = from;
        while i < to {
            let tok = &self.toks[i];
            match tok.text.as_str() {
                "(" | "[" => {
                    let end = self.partner(i)?;
                    current.extend(&self.toks[i..=end]);
                    i = end + 1;
                    continue;
                }
                "<" => angle += 1,
                ">" => angle -= 1,
                ">>" => angle -= 2,
                ">>>" => angle -= 3,
                "," if angle == 0 => {
                    params.push(std::mem::take(&mut current));
                    i += 1;
                    continue;
                }
                _ => {}
            }
            current.push(tok);
            i += 1;
        }
        if !current.is_empty() {
            params.push(current);
        }
        params.into_iter().map(|p| erased_type(&p)).collect()
    }

    /// Scans a block body, consuming the closing brace. Anonymous and local
    /// classes found along the way are parsed for their methods.
    fn block(&mut self) -> ParseResult {
        let mut depth = 1usize;
        loop {
            let tok = self.tok(self.pos).ok_or_else(|| self.eof())?;
            match tok.text.as_str() {
                "{" if self.opens_anonymous_class(self.pos) => {
                    self.pos += 1;
                    self.class_body(false)?;
                }
                "{" => {
                    depth += 1;
                    self.pos += 1;
                }
                "}" => {
                    depth -= 1;
                    self.pos += 1;
                    if depth == 0 {
                        return Ok(());
                    }
                }
                _ if self.at_type_declaration(self.pos) => self.type_declaration()?,
                _ => self.pos += 1,
            }
        }
    }

    /// Scans an initializer expression through its terminating `;`.
    fn until_semicolon(&mut self) -> ParseResult {
        loop {
            let tok = self.tok(self.pos).ok_or_else(|| self.eof())?;
            match tok.text.as_str() {
                ";" => {
                    self.pos += 1;
                    return Ok(());
                }
                "{" if self.opens_anonymous_class(self.pos) => {
                    self.pos += 1;
                    self.class_body(false)?;
                }
                "{" => {
                    self.pos += 1;
                    self.block()?;
                }
                "}" => return Err(format!("unexpected '}}' in initializer on line {}", tok.line)),
                _ => self.pos += 1,
            }
        }
    }

    /// True when the `{` at `i` follows `new Type<...>(...)`.
    fn opens_anonymous_class(&self, i: usize) -> bool {
        if i == 0 || !self.is(i - 1, ")") {
            return false;
        }
        let Some(open) = self.matching[i - 1] else { return false };
        let mut j = open;
        while j > 0 {
            j -= 1;
            let tok = &self.toks[j];
            match tok.text.as_str() {
                "new" => return true,
                "." | "<" | ">" | ">>" | ">>>" | "," | "?" | "&" | "extends" | "super" => {}
                _ if tok.is_identifier() => {}
                _ => return false,
            }
        }
        false
    }
}

/// Type text of one parameter: annotations, `final` and the parameter name
/// removed, generic arguments erased, dimensions kept.
fn erased_type(param: &[&LexToken]) -> ParseResult<String> {
    let mut toks: Vec<&LexToken> = Vec::with_capacity(param.len());
    let mut i = 0;
    while i < param.len() {
        let tok = param[i];
        if tok.is("@") {
            // annotation name, possibly qualified, then optional arguments
            i += 1;
            while i < param.len() && param[i].is_identifier() {
                i += 1;
                if i + 1 < param.len() && param[i].is(".") && param[i + 1].is_identifier() {
                    i += 1;
                } else {
                    break;
                }
            }
            if i < param.len() && param[i].is("(") {
                let mut depth = 0;
                while i < param.len() {
                    match param[i].text.as_str() {
                        "(" => depth += 1,
                        ")" => depth -= 1,
                        _ => {}
                    }
                    i += 1;
                    if depth == 0 {
                        break;
                    }
                }
            }
            continue;
        }
        if tok.is("final") {
            i += 1;
            continue;
        }
        toks.push(tok);
        i += 1;
    }
    // Trailing `[]` pairs after the name belong to the type.
    let mut dims = 0;
    while toks.len() >= 2 && toks[toks.len() - 1].is("]") && toks[toks.len() - 2].is("[") {
        toks.truncate(toks.len() - 2);
        dims += 1;
    }
    match toks.last() {
        Some(t) if t.is_identifier() || t.is("this") => {
            toks.pop();
        }
        _ => {
            let line = param.first().map_or(0, |t| t.line);
            return Err(format!("malformed parameter on line {line}"));
        }
    }
    if toks.is_empty() {
        let line = param.first().map_or(0, |t| t.line);
        return Err(format!("parameter without type on line {line}"));
    }
    let mut out = String::new();
    let mut angle = 0i32;
    for tok in toks {
        match tok.text.as_str() {
            "<" => angle += 1,
            ">" => angle -= 1,
            ">>" => angle -= 2,
            ">>>" => angle -= 3,
            _ if angle == 0 => out.push_str(&tok.text),
            _ => {}
        }
    }
    for _ in 0..dims {
        out.push_str("[]");
    }
    Ok(out)
}

/// Share of tokens two methods have in common: the multiset intersection
/// size over the longer token count.
pub fn token_overlap(a: &MethodRecord, b: &MethodRecord) -> f64 {
    let (Ok(la), Ok(lb)) = (lexer::lex(&a.source_text), lexer::lex(&b.source_text)) else {
        return 0.0;
    };
    let longest = la.tokens.len().max(lb.tokens.len());
    if longest == 0 {
        return 0.0;
    }
    let mut counts: HashMap<&str, isize> = HashMap::new();
    for t in &la.tokens {
        *counts.entry(t.text.as_str()).or_default() += 1;
    }
    let mut common = 0usize;
    for t in &lb.tokens {
        if let Some(c) = counts.get_mut(t.text.as_str()) {
            if *c > 0 {
                *c -= 1;
                common += 1;
            }
        }
    }
    common as f64 / longest as f64
}

/// Pairs methods across two versions of a file set.
///
/// Methods are matched by `(file_path, signature_key)`; repeated keys in one
/// file (e.g. two anonymous `run()` methods) pair up in source order. Within a
/// file, if exactly one unmatched before/after pair has equal arity and at
/// least [`RENAME_OVERLAP_THRESHOLD`] token overlap, it is matched as a
/// signature change. Files failing extraction are reported and skipped.
pub fn match_method_versions(
    before_files: &[FileVersion],
    after_files: &[FileVersion],
) -> (Vec<MethodPairing>, Vec<ExtractionError>) {
    let mut errors = Vec::new();
    let mut pairings = Vec::new();
    let after_by_path: BTreeMap<&str, &FileVersion> =
        after_files.iter().map(|f| (f.path.as_str(), f)).collect();
    for before_file in before_files {
        let Some(after_file) = after_by_path.get(before_file.path.as_str()) else {
            continue;
        };
        let before = match extract_methods(before_file) {
            Ok(m) => m,
            Err(e) => {
                errors.push(e);
                continue;
            }
        };
        let after = match extract_methods(after_file) {
            Ok(m) => m,
            Err(e) => {
                errors.push(e);
                continue;
            }
        };
        pairings.extend(match_file(before, after));
    }
    (pairings, errors)
}

fn match_file(before: Vec<MethodRecord>, after: Vec<MethodRecord>) -> Vec<MethodPairing> {
    let mut after_slots: Vec<Option<MethodRecord>> = after.into_iter().map(Some).collect();
    let mut by_key: HashMap<String, Vec<usize>> = HashMap::new();
    for (i, m) in after_slots.iter().enumerate() {
        if let Some(m) = m {
            by_key.entry(m.signature_key.clone()).or_default().push(i);
        }
    }
    for v in by_key.values_mut() {
        v.reverse();
    }
    let mut pairs = Vec::new();
    let mut unmatched_before = Vec::new();
    for b in before {
        match by_key.get_mut(&b.signature_key).and_then(Vec::pop) {
            Some(i) => {
                let a = after_slots[i].take().expect("slot used once");
                pairs.push(MethodPairing { before: b, after: a });
            }
            None => unmatched_before.push(b),
        }
    }
    let mut candidates = Vec::new();
    for (bi, b) in unmatched_before.iter().enumerate() {
        for (ai, a) in after_slots.iter().enumerate() {
            let Some(a) = a else { continue };
            if b.parameter_arity == a.parameter_arity
                && token_overlap(b, a) >= RENAME_OVERLAP_THRESHOLD
            {
                candidates.push((bi, ai));
            }
        }
    }
    if let [(bi, ai)] = candidates[..] {
        let a = after_slots[ai].take().expect("candidate slot unused");
        pairs.push(MethodPairing {
            before: unmatched_before.swap_remove(bi),
            after: a,
        });
    }
    pairs
}

#[cfg(test)]
mod tests {
    use super::*;

    fn file(content: &str) -> FileVersion {
        FileVersion::new("src/A.java", content, "r1")
    }

    fn names(content: &str) -> Vec<(String, u32, u32)> {
        extract_methods(&file(content))
            .unwrap()
            .into_iter()
            .map(|m| (m.signature_key, m.line_start, m.line_end))
            .collect()
    }

    #[test]
    fn single_line_method() {
        let src = "package p;\n\nclass A { int sum(int a, int b){return a+b;} }\n";
        let methods = extract_methods(&file(src)).unwrap();
        assert_eq!(methods.len(), 1);
        let m = &methods[0];
        assert_eq!((m.line_start, m.line_end, m.parameter_arity), (3, 3, 2));
        assert_eq!(m.signature_key, "sum(int,int)");
        assert_eq!(m.source_text, "int sum(int a, int b){return a+b;}");
    }

    #[test]
    fn empty_file() {
        assert!(extract_methods(&file("")).unwrap().is_empty());
    }

    #[test]
    fn interface_methods_have_no_body() {
        let src = "interface Shape {\n  double area();\n  String name(int lang);\n}\n";
        assert_eq!(
            names(src),
            vec![("area()".into(), 2, 2), ("name(int)".into(), 3, 3)]
        );
        let methods = extract_methods(&file(src)).unwrap();
        assert!(methods.iter().all(|m| !m.source_text.contains('{')));
    }

    #[test]
    fn annotations_are_part_of_the_span() {
        let src = "class A {\n  /** doc */\n  @Override\n  public String toString() {\n    return \"a\";\n  }\n}\n";
        let m = &extract_methods(&file(src)).unwrap()[0];
        assert_eq!((m.line_start, m.line_end), (3, 6));
        assert!(m.source_text.starts_with("@Override"));
    }

    #[test]
    fn constructors_fields_and_initializers() {
        let src = r#"
class A<T> extends B implements C {
  private static final Map<String, List<T>> CACHE = new HashMap<>();
  private int[] xs = {1, 2};
  static { init(); }
  A(Map<String, Integer> m, final int... rest) { super(); }
  public <R> List<R> map(java.util.function.Function<T, R> f, @Nullable String[] names) { return null; }
}
"#;
        assert_eq!(
            names(src),
            vec![
                ("A(Map,int...)".into(), 6, 6),
                ("map(java.util.function.Function,String[])".into(), 7, 7)
            ]
        );
    }

    #[test]
    fn nested_anonymous_and_local_classes() {
        let src = r#"class A {
  void outer() {
    Runnable r = new Runnable() {
      @Override public void run() { go(); }
    };
    class Local { int f(int x) { return x; } }
  }
  static class Inner { void g() {} }
  enum E { ONE { int v() { return 1; } }, TWO; int v() { return 0; } }
}
"#;
        assert_eq!(
            names(src),
            vec![
                ("outer()".into(), 2, 7),
                ("run()".into(), 4, 4),
                ("f(int)".into(), 6, 6),
                ("g()".into(), 8, 8),
                ("v()".into(), 9, 9),
                ("v()".into(), 9, 9),
            ]
        );
    }

    #[test]
    fn records_and_annotation_types() {
        let src = r#"record Point(int x, int y) {
  Point { check(x); }
  int sum() { return x + y; }
}
@interface Tag { String value() default "x"; String[] more() default {"a", "b"}; }
"#;
        assert_eq!(
            names(src),
            vec![
                ("Point()".into(), 2, 2),
                ("sum()".into(), 3, 3),
                ("value()".into(), 5, 5),
                ("more()".into(), 5, 5),
            ]
        );
    }

    #[test]
    fn lambdas_and_class_literals_do_not_confuse_the_parser() {
        let src = r#"class A {
  void a() { list.forEach(x -> { use(x); }); Class<?> c = A.class; }
  void b() { if (x) { y(); } else { z(); } }
}
"#;
        assert_eq!(names(src), vec![("a()".into(), 2, 2), ("b()".into(), 3, 3)]);
    }

    #[test]
    fn syntax_errors_carry_the_path() {
        let err = extract_methods(&file("class A { void f() { }")).unwrap_err();
        assert_eq!(err.path, "src/A.java");
        assert!(extract_methods(&file("class A { String s = \"open; }")).is_err());
    }

    #[test]
    fn extraction_is_deterministic() {
        let src = "class A { void f() {} void g(int a) {} }";
        assert_eq!(extract_methods(&file(src)), extract_methods(&file(src)));
    }

    fn pair_names(before: &str, after: &str) -> Vec<(String, String)> {
        let (pairs, errors) = match_method_versions(&[file(before)], &[file(after)]);
        assert!(errors.is_empty());
        pairs
            .into_iter()
            .map(|p| (p.before.name, p.after.name))
            .collect()
    }

    #[test]
    fn exact_key_match() {
        let before = "class A { int f(int a) { return a; } }";
        let after = "class A { int f(int a) { return a + 1; } }";
        assert_eq!(pair_names(before, after), vec![("f".into(), "f".into())]);
    }

    #[test]
    fn deleted_method_is_not_paired() {
        let before = "class A { int f(int a) { return a; } void gone() { x(); y(); } }";
        let after = "class A { int f(int a) { return a; } }";
        assert_eq!(pair_names(before, after), vec![("f".into(), "f".into())]);
    }

    #[test]
    fn rename_fallback() {
        let before = "class A { int sum(int a, int b) { return a + b; } }";
        let after = "class A { int total(int a, int b) { return a + b; } }";
        // 16 tokens each, 15 shared
        let b = &extract_methods(&file(before)).unwrap()[0];
        let a = &extract_methods(&file(after)).unwrap()[0];
        assert!((token_overlap(b, a) - 15.0 / 16.0).abs() < 1e-12);
        assert_eq!(pair_names(before, after), vec![("sum".into(), "total".into())]);
    }

    #[test]
    fn ambiguous_rename_is_dropped() {
        let before = "class A { int sum(int a) { return a; } }";
        let after = "class A { int total(int a) { return a; } int other(int a) { return a; } }";
        assert!(pair_names(before, after).is_empty());
    }

    #[test]
    fn rename_requires_arity() {
        let before = "class A { int sum(int a, int b) { return a + b; } }";
        let after = "class A { int total(int a) { return a + a; } }";
        assert!(pair_names(before, after).is_empty());
    }
}
