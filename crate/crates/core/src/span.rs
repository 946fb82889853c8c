//! Source locations.

use serde::Serialize;

/// A byte range in the source with the 1-based line/column of its start.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
    pub line: u32,
    pub column: u32,
}

impl SourceSpan {
    pub fn new(start: usize, end: usize, line: u32, column: u32) -> Self {
        debug_assert!(start <= end);
        SourceSpan {
            start,
            end,
            line,
            column,
        }
    }

    /// Smallest span covering both `self` and `other`.
    pub fn to(self, other: SourceSpan) -> SourceSpan {
        if other.end <= self.start {
            return SourceSpan::new(other.start, self.end.max(other.end), other.line, other.column);
        }
        SourceSpan {
            start: self.start,
            end: self.end.max(other.end),
            line: self.line,
            column: self.column,
        }
    }

    pub fn contains(&self, offset: usize) -> bool {
        self.start <= offset && offset <= self.end
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }
}

/// Maps byte offsets to 1-based (line, column) pairs. Columns count chars.
#[derive(Debug, Clone)]
pub struct LineIndex {
    line_starts: Vec<usize>,
    text: String,
}

impl LineIndex {
    pub fn new(text: &str) -> Self {
        let mut line_starts = vec![0];
        for (i, b) in text.bytes().enumerate() {
            if b == b'\n' {
                line_starts.push(i + 1);
            }
        }
        LineIndex {
            line_starts,
            text: text.to_owned(),
        }
    }

    pub fn line_col(&self, offset: usize) -> (u32, u32) {
        let offset = offset.min(self.text.len());
        let line = match self.line_starts.binary_search(&offset) {
            Ok(l) => l,
            Err(l) => l - 1,
        };
        let start = self.line_starts[line];
        let col = self.text[start..offset].chars().count();
        (line as u32 + 1, col as u32 + 1)
    }

    /// Inverse of [`line_col`](Self::line_col); out-of-range positions clamp.
    pub fn offset(&self, line: u32, column: u32) -> usize {
        let line = (line.max(1) - 1) as usize;
        let Some(&start) = self.line_starts.get(line) else {
            return self.text.len();
        };
        let end = self
            .line_starts
            .get(line + 1)
            .map(|e| e - 1)
            .unwrap_or(self.text.len());
        let mut off = start;
        for (n, (i, _)) in self.text[start..end].char_indices().enumerate() {
            if n + 1 == column as usize {
                return start + i;
            }
            off = start + i;
        }
        if column as usize > self.text[start..end].chars().count() {
            end
        } else {
            off
        }
    }

    pub fn span(&self, start: usize, end: usize) -> SourceSpan {
        let (line, column) = self.line_col(start);
        SourceSpan::new(start, end, line, column)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_col_round_trip() {
        let idx = LineIndex::new("ab\ncdé\n\nx");
        assert_eq!(idx.line_col(0), (1, 1));
        assert_eq!(idx.line_col(3), (2, 1));
        assert_eq!(idx.line_col(5), (2, 3));
        assert_eq!(idx.line_col(8), (3, 1));
        assert_eq!(idx.line_col(9), (4, 1));
        for off in [0, 1, 3, 4, 5, 7, 8, 9] {
            let (l, c) = idx.line_col(off);
            assert_eq!(idx.offset(l, c), off);
        }
    }

    #[test]
    fn join_spans() {
        let a = SourceSpan::new(2, 4, 1, 3);
        let b = SourceSpan::new(6, 9, 1, 7);
        assert_eq!(a.to(b), SourceSpan::new(2, 9, 1, 3));
        assert_eq!(b.to(a), SourceSpan::new(2, 9, 1, 3));
    }
}
