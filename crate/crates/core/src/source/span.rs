use std::fmt;
use std::sync::Arc;

/// 1-based source range. `end_col` is exclusive: it points one past the
/// last character of the range on `end_line`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SourceSpan {
    pub file: Arc<str>,
    pub start_line: u32,
    pub start_col: u32,
    pub end_line: u32,
    pub end_col: u32,
}

impl SourceSpan {
    pub fn new(file: Arc<str>, start: Position, end: Position) -> Self {
        Self {
            file,
            start_line: start.line,
            start_col: start.col,
            end_line: end.line,
            end_col: end.col,
        }
    }

    pub fn start(&self) -> Position {
        Position {
            line: self.start_line,
            col: self.start_col,
        }
    }

    pub fn end(&self) -> Position {
        Position {
            line: self.end_line,
            col: self.end_col,
        }
    }

    /// Smallest span covering both.
    pub fn to(&self, other: &SourceSpan) -> SourceSpan {
        SourceSpan::new(
            self.file.clone(),
            self.start().min(other.start()),
            self.end().max(other.end()),
        )
    }

    pub fn contains(&self, inner: &SourceSpan) -> bool {
        self.start() <= inner.start() && inner.end() <= self.end()
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.start_line, self.start_col)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Position {
    pub line: u32,
    pub col: u32,
}

impl Position {
    pub const START: Position = Position { line: 1, col: 1 };
}
