//! A Java lexer that keeps line provenance for every token.
//!
//! Comments and whitespace are dropped from the token stream, but the lines
//! they occupy are recorded so callers can tell code lines from comment-only
//! lines.

use std::collections::BTreeSet;

use thiserror::Error;

/// Java reserved words, plus the literal keywords `true`, `false`, `null`
/// and the local-variable type `var`.
pub const KEYWORDS: &[&str] = &[
    "abstract",
    "assert",
    "boolean",
    "break",
    "byte",
    "case",
    "catch",
    "char",
    "class",
    "const",
    "continue",
    "default",
    "do",
    "double",
    "else",
    "enum",
    "extends",
    "false",
    "final",
    "finally",
    "float",
    "for",
    "goto",
    "if",
    "implements",
    "import",
    "instanceof",
    "int",
    "interface",
    "long",
    "native",
    "new",
    "null",
    "package",
    "private",
    "protected",
    "public",
    "return",
    "short",
    "static",
    "strictfp",
    "super",
    "switch",
    "synchronized",
    "this",
    "throw",
    "throws",
    "transient",
    "true",
    "try",
    "var",
    "void",
    "volatile",
    "while",
];

// Longest first so that greedy matching picks `>>>=` over `>>`.
const OPERATORS: &[&str] = &[
    ">>>=", "<<=", ">>=", ">>>", "...", "->", "::", "++", "--", "&&", "||", "==", "!=", "<=", ">=",
    "+=", "-=", "*=", "/=", "&=", "|=", "^=", "%=", "<<", ">>", "(", ")", "{", "}", "[", "]", ";",
    ",", ".", "@", "=", ">", "<", "!", "~", "?", ":", "+", "-", "*", "/", "&", "|", "^", "%",
];

pub fn is_keyword(word: &str) -> bool {
    KEYWORDS.binary_search(&word).is_ok()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LiteralKind {
    String,
    Char,
    Int,
    Float,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LexKind {
    Keyword,
    Identifier,
    Punctuation,
    Literal(LiteralKind),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexToken {
    pub text: String,
    pub kind: LexKind,
    /// 1-based line on which the token starts.
    pub line: u32,
    /// 1-based line on which the token ends (differs from `line` only for
    /// text blocks).
    pub end_line: u32,
    /// Byte range in the lexed source.
    pub start: usize,
    pub end: usize,
}

impl LexToken {
    pub fn is(&self, text: &str) -> bool {
        self.text == text
    }

    pub fn is_identifier(&self) -> bool {
        self.kind == LexKind::Identifier
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Lexed {
    pub tokens: Vec<LexToken>,
    /// Lines that carry comment text.
    pub comment_lines: BTreeSet<u32>,
}

impl Lexed {
    /// Lines holding at least one code token.
    pub fn code_lines(&self) -> BTreeSet<u32> {
        let mut lines = BTreeSet::new();
        for tok in &self.tokens {
            lines.extend(tok.line..=tok.end_line);
        }
        lines
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LexError {
    #[error("unterminated {what} starting on line {line}")]
    Unterminated { what: &'static str, line: u32 },
    #[error("unexpected character {ch:?} on line {line}")]
    UnexpectedChar { ch: char, line: u32 },
    #[error("malformed number literal {text:?} on line {line}")]
    BadNumber { text: String, line: u32 },
}

/// Lexes `source`, numbering lines from 1.
pub fn lex(source: &str) -> Result<Lexed, LexError> {
    lex_from_line(source, 1)
}

/// Lexes `source` whose first line is line `first_line` of some larger file.
pub fn lex_from_line(source: &str, first_line: u32) -> Result<Lexed, LexError> {
    Lexer {
        src: source,
        bytes: source.as_bytes(),
        pos: 0,
        line: first_line,
        out: Lexed::default(),
    }
    .run()
}

struct Lexer<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
    line: u32,
    out: Lexed,
}

impl<'a> Lexer<'a> {
    fn run(mut self) -> Result<Lexed, LexError> {
        while let Some(ch) = self.peek_char() {
            match ch {
                '\n' => {
                    self.line += 1;
                    self.pos += 1;
                }
                c if c.is_whitespace() => self.pos += c.len_utf8(),
                '/' if self.starts_with("//") => self.line_comment(),
                '/' if self.starts_with("/*") => self.block_comment()?,
                '"' => self.string()?,
                '\'' => self.char_literal()?,
                c if c.is_ascii_digit() => self.number()?,
                '.' if self.byte_at(self.pos + 1).is_some_and(|b| b.is_ascii_digit()) => {
                    self.number()?
                }
                c if is_ident_start(c) => self.word(),
                c => self.operator(c)?,
            }
        }
        Ok(self.out)
    }

    fn peek_char(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn byte_at(&self, idx: usize) -> Option<u8> {
        self.bytes.get(idx).copied()
    }

    fn starts_with(&self, pat: &str) -> bool {
        self.src[self.pos..].starts_with(pat)
    }

    fn push(&mut self, kind: LexKind, start: usize, start_line: u32) {
        self.out.tokens.push(LexToken {
            text: self.src[start..self.pos].to_string(),
            kind,
            line: start_line,
            end_line: self.line,
            start,
            end: self.pos,
        });
    }

    fn line_comment(&mut self) {
        self.out.comment_lines.insert(self.line);
        while let Some(b) = self.byte_at(self.pos) {
            if b == b'\n' {
                break;
            }
            self.pos += 1;
        }
    }

    fn block_comment(&mut self) -> Result<(), LexError> {
        let start_line = self.line;
        self.pos += 2;
        loop {
            match self.byte_at(self.pos) {
                None => {
                    return Err(LexError::Unterminated {
                        what: "block comment",
                        line: start_line,
                    })
                }
                Some(b'*') if self.byte_at(self.pos + 1) == Some(b'/') => {
                    self.out.comment_lines.insert(self.line);
                    self.pos += 2;
                    return Ok(());
                }
                Some(b'\n') => {
                    self.out.comment_lines.insert(self.line);
                    self.line += 1;
                    self.pos += 1;
                }
                Some(_) => self.pos += 1,
            }
        }
    }

    fn string(&mut self) -> Result<(), LexError> {
        let start = self.pos;
        let start_line = self.line;
        if self.starts_with("\"\"\"") {
            self.pos += 3;
            loop {
                match self.byte_at(self.pos) {
                    None => {
                        return Err(LexError::Unterminated {
                            what: "text block",
                            line: start_line,
                        })
                    }
                    Some(b'\\') => self.pos += 2,
                    Some(b'\n') => {
                        self.line += 1;
                        self.pos += 1;
                    }
                    Some(b'"') if self.starts_with("\"\"\"") => {
                        self.pos += 3;
                        break;
                    }
                    Some(_) => self.pos += 1,
                }
            }
        } else {
            self.quoted(b'"', "string literal")?;
        }
        self.push(LexKind::Literal(LiteralKind::String), start, start_line);
        Ok(())
    }

    fn char_literal(&mut self) -> Result<(), LexError> {
        let start = self.pos;
        let line = self.line;
        self.quoted(b'\'', "character literal")?;
        self.push(LexKind::Literal(LiteralKind::Char), start, line);
        Ok(())
    }

    fn quoted(&mut self, quote: u8, what: &'static str) -> Result<(), LexError> {
        let line = self.line;
        self.pos += 1;
        loop {
            match self.byte_at(self.pos) {
                None | Some(b'\n') => return Err(LexError::Unterminated { what, line }),
                Some(b'\\') => {
                    if self.byte_at(self.pos + 1).is_none_or(|b| b == b'\n') {
                        return Err(LexError::Unterminated { what, line });
                    }
                    self.pos += 2;
                }
                Some(b) if b == quote => {
                    self.pos += 1;
                    return Ok(());
                }
                Some(_) => self.pos += 1,
            }
        }
    }

    fn number(&mut self) -> Result<(), LexError> {
        let start = self.pos;
        let line = self.line;
        let mut float = false;
        let hex = self.starts_with("0x") || self.starts_with("0X");
        let bin = self.starts_with("0b") || self.starts_with("0B");
        if hex || bin {
            self.pos += 2;
            while self
                .byte_at(self.pos)
                .is_some_and(|b| b.is_ascii_hexdigit() || b == b'_')
            {
                self.pos += 1;
            }
            if hex && self.byte_at(self.pos) == Some(b'.') {
                float = true;
                self.pos += 1;
                while self
                    .byte_at(self.pos)
                    .is_some_and(|b| b.is_ascii_hexdigit() || b == b'_')
                {
                    self.pos += 1;
                }
            }
            if hex && matches!(self.byte_at(self.pos), Some(b'p' | b'P')) {
                float = true;
                self.exponent();
            }
        } else {
            self.digits();
            if self.byte_at(self.pos) == Some(b'.')
                && self.byte_at(self.pos + 1).is_none_or(|b| !b.is_ascii_alphabetic() || matches!(b, b'e' | b'E' | b'f' | b'F' | b'd' | b'D'))
                && self.byte_at(self.pos + 1) != Some(b'.')
            {
                float = true;
                self.pos += 1;
                self.digits();
            }
            if matches!(self.byte_at(self.pos), Some(b'e' | b'E')) {
                float = true;
                self.exponent();
            }
        }
        match self.byte_at(self.pos) {
            Some(b'l' | b'L') => self.pos += 1,
            Some(b'f' | b'F' | b'd' | b'D') if !bin => {
                float = true;
                self.pos += 1;
            }
            _ => {}
        }
        if self
            .peek_char()
            .is_some_and(|c| is_ident_part(c) || c == '.' && float)
        {
            // Swallow the rest so the error message shows the whole token.
            while self.peek_char().is_some_and(is_ident_part) {
                self.pos += self.peek_char().map_or(1, char::len_utf8);
            }
            return Err(LexError::BadNumber {
                text: self.src[start..self.pos].to_string(),
                line,
            });
        }
        let kind = if float {
            LiteralKind::Float
        } else {
            LiteralKind::Int
        };
        self.push(LexKind::Literal(kind), start, line);
        Ok(())
    }

    fn digits(&mut self) {
        while self
            .byte_at(self.pos)
            .is_some_and(|b| b.is_ascii_digit() || b == b'_')
        {
            self.pos += 1;
        }
    }

    fn exponent(&mut self) {
        self.pos += 1;
        if matches!(self.byte_at(self.pos), Some(b'+' | b'-')) {
            self.pos += 1;
        }
        self.digits();
    }

    fn word(&mut self) {
        let start = self.pos;
        let line = self.line;
        while let Some(c) = self.peek_char() {
            if !is_ident_part(c) {
                break;
            }
            self.pos += c.len_utf8();
        }
        let kind = if is_keyword(&self.src[start..self.pos]) {
            LexKind::Keyword
        } else {
            LexKind::Identifier
        };
        self.push(kind, start, line);
    }

    fn operator(&mut self, ch: char) -> Result<(), LexError> {
        let start = self.pos;
        let line = self.line;
        match OPERATORS.iter().find(|op| self.starts_with(op)) {
            Some(op) => {
                self.pos += op.len();
                self.push(LexKind::Punctuation, start, line);
                Ok(())
            }
            None => Err(LexError::UnexpectedChar { ch, line }),
        }
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_' || c == '$'
}

fn is_ident_part(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '$'
}
