use super::span::{FileId, LineIndex, SourceSpan};
use crate::diagnostics::{DiagCode, Diagnostic};
use std::fmt;
use std::hash::{Hash, Hasher};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AtomKind {
    /// `letter (letter | digit | - | _)*`
    Name,
    /// `:` followed by name characters.
    Keyword,
    /// `?` followed by name characters.
    Variable,
    /// optional sign, digits, optional `.digits`
    Number,
    /// Anything else that is lexically legal: `-`, `=`, `<=`, `^^`, `--`, ...
    Symbol,
}

/// A single token of an s-expression. Equality and hashing use the
/// lower-cased text only.
#[derive(Debug, Clone)]
pub struct Atom {
    pub kind: AtomKind,
    pub text: String,
    pub original: String,
    pub span: SourceSpan,
}

impl Atom {
    pub fn new(original: &str, span: SourceSpan) -> Atom {
        Atom {
            kind: classify(original),
            text: original.to_ascii_lowercase(),
            original: original.to_string(),
            span,
        }
    }

    pub fn is(&self, text: &str) -> bool {
        self.text == text
    }
}

impl PartialEq for Atom {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.text == other.text
    }
}

impl Eq for Atom {}

impl Hash for Atom {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.kind.hash(state);
        self.text.hash(state);
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct List {
    pub items: Vec<SExpr>,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SExpr {
    Atom(Atom),
    List(List),
}

impl Default for SExpr {
    fn default() -> Self {
        SExpr::List(List {
            items: Vec::new(),
            span: SourceSpan::default(),
        })
    }
}

impl SExpr {
    pub fn span(&self) -> SourceSpan {
        match self {
            SExpr::Atom(a) => a.span,
            SExpr::List(l) => l.span,
        }
    }

    pub fn as_atom(&self) -> Option<&Atom> {
        match self {
            SExpr::Atom(a) => Some(a),
            SExpr::List(_) => None,
        }
    }

    pub fn as_list(&self) -> Option<&[SExpr]> {
        match self {
            SExpr::List(l) => Some(&l.items),
            SExpr::Atom(_) => None,
        }
    }

    /// The lower-cased text of an atom of the given kind.
    pub fn atom_text(&self, kind: AtomKind) -> Option<&str> {
        self.as_atom()
            .filter(|a| a.kind == kind)
            .map(|a| a.text.as_str())
    }

    pub fn is_atom(&self, text: &str) -> bool {
        self.as_atom().is_some_and(|a| a.text == text)
    }

    pub fn is_keyword(&self) -> bool {
        self.as_atom().is_some_and(|a| a.kind == AtomKind::Keyword)
    }

    /// Head atom text of a list, if the list starts with an atom.
    pub fn head(&self) -> Option<&str> {
        self.as_list()?.first()?.as_atom().map(|a| a.text.as_str())
    }

    /// Finds the node whose span is exactly `span`.
    pub fn find(&self, span: &SourceSpan) -> Option<&SExpr> {
        let own = self.span();
        if own.same_range(span) {
            return Some(self);
        }
        if !own.contains(span) {
            return None;
        }
        self.as_list()?.iter().find_map(|c| c.find(span))
    }

    /// Visits every node, parents before children.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a SExpr)) {
        f(self);
        if let SExpr::List(l) = self {
            for c in &l.items {
                c.walk(f);
            }
        }
    }

    pub fn synthetic_atom(text: &str) -> SExpr {
        SExpr::Atom(Atom::new(text, SourceSpan::default()))
    }
}

impl fmt::Display for SExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SExpr::Atom(a) => f.write_str(&a.text),
            SExpr::List(l) => {
                f.write_str("(")?;
                for (i, c) in l.items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{c}")?;
                }
                f.write_str(")")
            }
        }
    }
}

pub fn is_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
}

pub fn is_number(s: &str) -> bool {
    let digits = s.strip_prefix(['+', '-']).unwrap_or(s);
    let (int, frac) = match digits.split_once('.') {
        Some((i, f)) => (i, Some(f)),
        None => (digits, None),
    };
    !int.is_empty()
        && int.bytes().all(|b| b.is_ascii_digit())
        && frac.is_none_or(|f| !f.is_empty() && f.bytes().all(|b| b.is_ascii_digit()))
}

fn classify(s: &str) -> AtomKind {
    if let Some(rest) = s.strip_prefix(':') {
        if is_name(rest) {
            return AtomKind::Keyword;
        }
    }
    if let Some(rest) = s.strip_prefix('?') {
        if is_name(rest) {
            return AtomKind::Variable;
        }
    }
    if is_name(s) {
        AtomKind::Name
    } else if is_number(s) {
        AtomKind::Number
    } else {
        AtomKind::Symbol
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    Open,
    Close,
    Atom,
}

#[derive(Debug, Clone)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    pub span: SourceSpan,
}

fn is_illegal(c: char) -> bool {
    !c.is_ascii()
        || (c.is_ascii_control() && !c.is_ascii_whitespace())
        || matches!(
            c,
            '"' | '\'' | '`' | ',' | '#' | '|' | '\\' | '{' | '}' | '[' | ']' | '@' | '$' | '%' | '&' | '~'
        )
}

fn is_delimiter(c: char) -> bool {
    c.is_ascii_whitespace() || c == '(' || c == ')' || c == ';'
}

/// Splits `text` into parentheses and atoms. Comments run from `;` to the end
/// of the line and act as whitespace. An atom containing an illegal character
/// is still produced (so later stages can anchor to it) and flagged.
pub fn tokenize(text: &str, file: FileId) -> (Vec<Token>, Vec<Diagnostic>) {
    let index = LineIndex::new(text);
    let mut tokens = Vec::new();
    let mut diags = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(start, c)) = chars.peek() {
        if c.is_ascii_whitespace() {
            chars.next();
        } else if c == ';' {
            while let Some(&(_, c)) = chars.peek() {
                if c == '\n' {
                    break;
                }
                chars.next();
            }
        } else if c == '(' || c == ')' {
            chars.next();
            tokens.push(Token {
                kind: if c == '(' {
                    TokenKind::Open
                } else {
                    TokenKind::Close
                },
                text: c.to_string(),
                span: index.span(file, start, start + 1),
            });
        } else {
            let mut end = start;
            let mut illegal = false;
            while let Some(&(i, c)) = chars.peek() {
                if is_delimiter(c) {
                    break;
                }
                illegal |= is_illegal(c);
                end = i + c.len_utf8();
                chars.next();
            }
            let token = Token {
                kind: TokenKind::Atom,
                text: text[start..end].to_string(),
                span: index.span(file, start, end),
            };
            if illegal {
                let atom = SExpr::Atom(Atom::new(&token.text, token.span));
                diags.push(Diagnostic::new(DiagCode::IllegalCharacter, &atom));
            }
            tokens.push(token);
        }
    }
    (tokens, diags)
}

/// Builds trees from a token stream. A missing `)` is closed at end of input;
/// a stray `)` is dropped. Both are flagged.
pub fn read(tokens: &[Token], text_len: usize) -> (Vec<SExpr>, Vec<Diagnostic>) {
    let mut top = Vec::new();
    let mut diags = Vec::new();
    let mut stack: Vec<(SourceSpan, Vec<SExpr>)> = Vec::new();
    for tok in tokens {
        match tok.kind {
            TokenKind::Open => stack.push((tok.span, Vec::new())),
            TokenKind::Close => match stack.pop() {
                Some((open, items)) => {
                    let node = SExpr::List(List {
                        items,
                        span: open.to(tok.span),
                    });
                    push(&mut stack, &mut top, node);
                }
                None => {
                    let stray = SExpr::Atom(Atom::new(")", tok.span));
                    diags.push(Diagnostic::new(DiagCode::UnmatchedClose, &stray).detached());
                }
            },
            TokenKind::Atom => {
                push(&mut stack, &mut top, SExpr::Atom(Atom::new(&tok.text, tok.span)));
            }
        }
    }
    while let Some((open, items)) = stack.pop() {
        let mut span = open;
        span.end = text_len.max(open.end);
        let node = SExpr::List(List { items, span });
        diags.push(Diagnostic::new(DiagCode::UnclosedList, &node));
        push(&mut stack, &mut top, node);
    }
    (top, diags)
}

fn push(stack: &mut [(SourceSpan, Vec<SExpr>)], top: &mut Vec<SExpr>, node: SExpr) {
    match stack.last_mut() {
        Some((_, items)) => items.push(node),
        None => top.push(node),
    }
}

/// Tokenizes and reads a whole file.
pub fn read_str(text: &str, file: FileId) -> (Vec<SExpr>, Vec<Diagnostic>) {
    let (tokens, mut diags) = tokenize(text, file);
    let (forms, read_diags) = read(&tokens, text.len());
    diags.extend(read_diags);
    (forms, diags)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn texts(src: &str) -> Vec<String> {
        tokenize(src, FileId(0)).0.into_iter().map(|t| t.text).collect()
    }

    #[test]
    fn comment_ends_at_newline() {
        assert_eq!(texts("(at B home) ; note"), ["(", "at", "B", "home", ")"]);
        assert_eq!(texts("(a ; x y z\n b)"), ["(", "a", "b", ")"]);
    }

    #[test]
    fn empty_input() {
        assert!(texts("").is_empty());
        let (forms, diags) = read_str("", FileId(0));
        assert!(forms.is_empty() && diags.is_empty());
    }

    #[test]
    fn keywords_are_atoms() {
        let (tokens, _) = tokenize("(:requirements :strips)", FileId(0));
        assert_eq!(tokens.len(), 4);
        let atoms: Vec<_> = tokens[1..3]
            .iter()
            .map(|t| Atom::new(&t.text, t.span).kind)
            .collect();
        assert_eq!(atoms, [AtomKind::Keyword, AtomKind::Keyword]);
    }

    #[test]
    fn classification() {
        assert_eq!(classify("briefcase-world"), AtomKind::Name);
        assert_eq!(classify("?x"), AtomKind::Variable);
        assert_eq!(classify(":typing"), AtomKind::Keyword);
        assert_eq!(classify("-3.5"), AtomKind::Number);
        assert_eq!(classify("7"), AtomKind::Number);
        assert_eq!(classify("5."), AtomKind::Symbol);
        assert_eq!(classify("-"), AtomKind::Symbol);
        assert_eq!(classify("^^"), AtomKind::Symbol);
        assert_eq!(classify("goal-type:"), AtomKind::Symbol);
        assert_eq!(classify("a_b-2"), AtomKind::Name);
    }

    #[test]
    fn nested_list() {
        let (forms, diags) = read_str("(a (b) c)", FileId(0));
        assert!(diags.is_empty());
        assert_eq!(forms.len(), 1);
        assert_eq!(forms[0].as_list().unwrap().len(), 3);
    }

    #[test]
    fn unclosed_lists_recover() {
        let (forms, diags) = read_str("(a (b c", FileId(0));
        assert_eq!(forms.len(), 1);
        assert_eq!(diags.len(), 2);
        assert!(diags.iter().all(|d| d.code == DiagCode::UnclosedList));
        assert_eq!(forms[0].to_string(), "(a (b c))");
    }

    #[test]
    fn stray_close_is_dropped() {
        let (forms, diags) = read_str("(a)) (b)", FileId(0));
        assert_eq!(forms.len(), 2);
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].code, DiagCode::UnmatchedClose);
        assert!(diags[0].detached);
    }

    #[test]
    fn single_define_spans_line() {
        let src = "(define (domain d))";
        let (forms, _) = read_str(src, FileId(0));
        assert_eq!(forms.len(), 1);
        assert_eq!(forms[0].span().start, 0);
        assert_eq!(forms[0].span().end, src.len());
    }

    #[test]
    fn illegal_character_flagged_and_kept() {
        let (forms, diags) = read_str("(at #b home)", FileId(0));
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].code, DiagCode::IllegalCharacter);
        assert_eq!(diags[0].subject.to_string(), "#b");
        assert_eq!(forms[0].as_list().unwrap().len(), 3);
    }

    #[test]
    fn find_by_span() {
        let (forms, _) = read_str("(a (b c) d)", FileId(0));
        let inner = forms[0].as_list().unwrap()[1].clone();
        let found = forms[0].find(&inner.span()).unwrap();
        assert_eq!(found.to_string(), "(b c)");
    }
}
