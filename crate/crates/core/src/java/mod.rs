pub mod lexer;

pub use lexer::{lex, lex_from_line, LexError, LexKind, LexToken, Lexed, LiteralKind};
