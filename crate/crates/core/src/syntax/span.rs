use std::fmt;
use std::hash::{Hash, Hasher};

/// Identifies a source file within one checking session.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FileId(pub u32);

/// A byte range in a source file, with the 1-based line/column of its start.
///
/// Spans never take part in equality or hashing: two syntax trees that differ
/// only in where they were read from compare equal. Use [`SourceSpan::same_range`]
/// when the location itself matters.
#[derive(Debug, Clone, Copy, Default)]
pub struct SourceSpan {
    pub file: FileId,
    pub start: usize,
    pub end: usize,
    pub line: u32,
    pub col: u32,
}

impl SourceSpan {
    pub fn new(file: FileId, start: usize, end: usize, line: u32, col: u32) -> Self {
        debug_assert!(start <= end);
        SourceSpan {
            file,
            start,
            end,
            line,
            col,
        }
    }

    /// Smallest span covering both `self` and `other` (same file assumed).
    pub fn to(self, other: SourceSpan) -> SourceSpan {
        if other.start < self.start {
            return other.to(self);
        }
        SourceSpan {
            end: self.end.max(other.end),
            ..self
        }
    }

    pub fn same_range(&self, other: &SourceSpan) -> bool {
        self.file == other.file && self.start == other.start && self.end == other.end
    }

    pub fn contains(&self, other: &SourceSpan) -> bool {
        self.file == other.file && self.start <= other.start && other.end <= self.end
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }
}

impl PartialEq for SourceSpan {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl Eq for SourceSpan {}

impl Hash for SourceSpan {
    fn hash<H: Hasher>(&self, _: &mut H) {}
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// Maps byte offsets of one file to line/column positions.
#[derive(Debug, Clone)]
pub struct LineIndex {
    line_starts: Vec<usize>,
}

impl LineIndex {
    pub fn new(text: &str) -> Self {
        let mut line_starts = vec![0];
        line_starts.extend(text.match_indices('\n').map(|(i, _)| i + 1));
        LineIndex { line_starts }
    }

    pub fn position(&self, offset: usize) -> (u32, u32) {
        let line = match self.line_starts.binary_search(&offset) {
            Ok(l) => l,
            Err(l) => l - 1,
        };
        ((line + 1) as u32, (offset - self.line_starts[line] + 1) as u32)
    }

    pub fn span(&self, file: FileId, start: usize, end: usize) -> SourceSpan {
        let (line, col) = self.position(start);
        SourceSpan::new(file, start, end, line, col)
    }
}
