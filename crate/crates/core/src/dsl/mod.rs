//! Text formats: `.compos` component files and `.diagram` architecture files.
//!
//! Component grammar:
//!
//! ```text
//! component   = "component" IDENT
//!               "variables" [ IDENT { "," IDENT } ":" "bool" ]
//!               "actions" [ IDENT { "," IDENT } ]
//!               "events" [ IDENT { "," IDENT } ]
//!               "*[" { block } "]"
//! block       = ( IDENT | "_" ) ":" rule { rule }
//! rule        = IDENT ":" sentences ( "-->" | "->" ) sentences
//! sentences   = formula { "," formula }
//! formula     = disj [ "\implies" formula ]
//! disj        = conj { "\or" conj }
//! conj        = unary { "\and" unary }
//! unary       = "\not" unary | IDENT | "True" | "False" | "(" formula ")"
//! ```
//!
//! A rule `e: a: G --> D` under event `e` makes `e` observe `a` and adds `G` to
//! the guard and `D` to the effect of `a`. The block label `_` introduces actions
//! observed by no event. `--` starts a comment running to the end of the line.

mod component;
mod diagram;
mod lexer;

use std::fmt;

use thiserror::Error;

use crate::diagnostics::{Report, Sort};

pub use component::{
    emit_component, parse_component, parse_component_unit, parse_sentences, ComponentParse,
};
pub use diagram::{
    emit_legs, emit_morphism, parse_diagram, DiagramFile, FsLoader, MapLoader, SourceLoader,
};

/// Source text plus where it came from.
#[derive(Debug, Clone)]
pub struct SourceUnit {
    pub origin: String,
    pub text: String,
}

impl SourceUnit {
    pub fn new(origin: impl Into<String>, text: impl Into<String>) -> Self {
        SourceUnit {
            origin: origin.into(),
            text: text.into(),
        }
    }

    pub fn inline(text: impl Into<String>) -> Self {
        Self::new("<inline>", text)
    }

    /// The 1-based `line`, without its terminator.
    pub fn line_text(&self, line: usize) -> Option<&str> {
        self.text.lines().nth(line.checked_sub(1)?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntaxError {
    pub line: usize,
    pub col: usize,
    pub found: String,
    pub expected: Vec<String>,
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: unexpected {}", self.line, self.col, self.found)?;
        if !self.expected.is_empty() {
            write!(f, ", expected {}", self.expected.join(" or "))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DslError {
    #[error("syntax error at {0}")]
    Syntax(SyntaxError),
    #[error("{line}:{col}: unresolved {what} `{name}`")]
    UnresolvedReference {
        line: usize,
        col: usize,
        what: String,
        name: String,
    },
    #[error("{line}: TotalityViolation({edge}, {name}): {sort} `{name}` has no image")]
    TotalityViolation {
        line: usize,
        edge: String,
        sort: Sort,
        name: String,
    },
    #[error("{line}:{col}: duplicate {what} `{name}`")]
    Duplicate {
        line: usize,
        col: usize,
        what: String,
        name: String,
    },
    #[error("{subject} is invalid: {}", render(.report))]
    Validation { subject: String, report: Report },
    #[error("cannot read `{path}`: {message}")]
    Io { path: String, message: String },
    #[error("in `{path}`: {error}")]
    InFile { path: String, error: Box<DslError> },
}

fn render(report: &Report) -> String {
    report
        .iter()
        .map(|v| format!("[{}] {v}", v.code()))
        .collect::<Vec<_>>()
        .join("; ")
}

impl DslError {
    pub fn code(&self) -> &'static str {
        match self {
            DslError::Syntax(_) => "E001",
            DslError::UnresolvedReference { .. } => "E002",
            DslError::TotalityViolation { .. } => "E003",
            DslError::Duplicate { .. } => "E004",
            DslError::Validation { .. } => "E005",
            DslError::Io { .. } => "E006",
            DslError::InFile { error, .. } => error.code(),
        }
    }

    /// Errors caused by unreadable inputs rather than by their content.
    pub fn is_io(&self) -> bool {
        match self {
            DslError::Io { .. } => true,
            DslError::InFile { error, .. } => error.is_io(),
            _ => false,
        }
    }

    /// Innermost error, skipping file wrappers.
    pub fn root(&self) -> &DslError {
        match self {
            DslError::InFile { error, .. } => error.root(),
            e => e,
        }
    }
}

/// A non-fatal finding, e.g. a name used in a body but missing from its header.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Warning {
    /// The component file the position refers to, when it is not the file being read.
    pub file: Option<String>,
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl Warning {
    pub fn code(&self) -> &'static str {
        "W001"
    }
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(file) = &self.file {
            write!(f, "{file}:")?;
        }
        write!(f, "{}:{}: {}", self.line, self.col, self.message)
    }
}
