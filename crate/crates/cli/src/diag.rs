use std::fmt;

/// A position in the input: 1-based line and column (in characters), and the
/// length of the marked text.
#[derive(Clone, Copy, Debug, Default, Eq)]
pub struct Span {
    pub line: usize,
    pub column: usize,
    pub len: usize,
}

impl Span {
    pub fn new(line: usize, column: usize, len: usize) -> Self {
        Span { line, column, len }
    }

    /// From the start of `self` to the end of `other`, when both are on one line.
    pub fn to(self, other: Span) -> Span {
        if other.line != self.line || other.column < self.column {
            return self;
        }
        Span { len: other.column + other.len - self.column, ..self }
    }
}

/// Positions are ignored by structural equality.
impl PartialEq for Span {
    fn eq(&self, _: &Span) -> bool {
        true
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub message: String,
    pub line: usize,
    pub column: usize,
    pub len: usize,
    /// The full input line the diagnostic points into.
    pub excerpt: String,
}

impl Diagnostic {
    pub fn error(source: &str, span: Span, message: impl Into<String>) -> Self {
        let excerpt = source.lines().nth(span.line.saturating_sub(1)).unwrap_or("").to_string();
        Diagnostic { severity: Severity::Error, message: message.into(), line: span.line, column: span.column, len: span.len, excerpt }
    }

    /// Compiler-style rendering with the offending text underlined.
    pub fn render(&self, file: &str) -> String {
        let label = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        let gutter = " ".repeat(self.line.to_string().len());
        let marker = format!("{}{}", " ".repeat(self.column.saturating_sub(1)), "^".repeat(self.len.max(1)));
        format!(
            "{label}: {}\n{gutter}--> {file}:{}:{}\n{gutter} |\n{} | {}\n{gutter} | {marker}\n",
            self.message, self.line, self.column, self.line, self.excerpt
        )
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}
