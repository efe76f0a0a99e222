//! Reading and parsing PDDL text.

pub mod advice;
pub mod ast;
pub mod parser;
pub mod sexpr;
pub mod span;

pub use advice::StripAdvice;
pub use ast::*;
pub use parser::{parse_definition, parse_source, ItemKind, ParseOutput, Parser};
pub use sexpr::{read, read_str, tokenize, Atom, AtomKind, List, SExpr, Token, TokenKind};
pub use span::{FileId, LineIndex, SourceSpan};
