//! DITQASM 2.0: parsing into a [`Circuit`](crate::Circuit) and canonical printing.
//!
//! ```text
//! DITQASM 2.0;
//! qreg reg_1 [2][2, 3];
//! creg meas[2];
//! h reg_1[1] ctl reg_1[0] [1];
//! rxy (0, 2, pi, pi/2) reg_1[1];
//! measure reg_1[0] -> meas[0];
//! ```
//!
//! The second bracket of a `qreg` lists per-qudit dimensions. `//` starts a
//! line comment. For `csum` the first operand is the control. `pswap` takes
//! `(a1, a2, b1, b2, θ, φ)` and `cu` takes its matrix row-major as re/im pairs.

mod emit;
mod expr;
mod lexer;
mod parser;

use std::fmt;

pub use emit::{emit, format_float};
pub use expr::parse_expr;
pub use parser::{parse, parse_bytes};

/// Location of a token or statement. `line`/`column` are 1-based, offsets are bytes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SourceSpan {
    pub line: usize,
    pub column: usize,
    pub start: usize,
    pub end: usize,
}

impl SourceSpan {
    pub(crate) fn from_offsets(text: &str, start: usize, end: usize) -> SourceSpan {
        let start = start.min(text.len());
        let end = end.clamp(start, text.len());
        let before = &text.as_bytes()[..start];
        let line = before.iter().filter(|&&b| b == b'\n').count() + 1;
        let line_start = before.iter().rposition(|&b| b == b'\n').map_or(0, |p| p + 1);
        let column = text[line_start..start].chars().count() + 1;
        SourceSpan { line, column, start, end }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseDiagnostic {
    pub severity: Severity,
    pub message: String,
    pub span: SourceSpan,
    pub hint: Option<String>,
}

impl ParseDiagnostic {
    pub(crate) fn error(message: impl Into<String>, span: SourceSpan) -> Self {
        ParseDiagnostic { severity: Severity::Error, message: message.into(), span, hint: None }
    }

    pub(crate) fn with_hint(mut self, hint: impl Into<String>) -> Self {
        self.hint = Some(hint.into());
        self
    }
}

impl fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{}:{}: {sev}: {}", self.span.line, self.span.column, self.message)?;
        if let Some(h) = &self.hint {
            write!(f, " (hint: {h})")?;
        }
        Ok(())
    }
}
