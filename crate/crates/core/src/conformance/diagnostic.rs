use std::fmt;

use serde_json::{json, Value};

use crate::source::SourceSpan;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CheckStage {
    HostLookup,
    Protocol,
    BasePath,
    Route,
    Method,
    QueryParams,
    Payload,
}

impl CheckStage {
    pub fn as_str(self) -> &'static str {
        match self {
            CheckStage::HostLookup => "HostLookup",
            CheckStage::Protocol => "Protocol",
            CheckStage::BasePath => "BasePath",
            CheckStage::Route => "Route",
            CheckStage::Method => "Method",
            CheckStage::QueryParams => "QueryParams",
            CheckStage::Payload => "Payload",
        }
    }

    pub fn code(self) -> &'static str {
        match self {
            CheckStage::HostLookup => "WAC100",
            CheckStage::Protocol => "WAC001",
            CheckStage::BasePath | CheckStage::Route => "WAC002",
            CheckStage::Method => "WAC003",
            CheckStage::QueryParams => "WAC004",
            CheckStage::Payload => "WAC005",
        }
    }
}

impl fmt::Display for CheckStage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Severity {
    Error,
    Warning,
    Info,
}

impl Severity {
    pub fn as_str(self) -> &'static str {
        match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
            Severity::Info => "info",
        }
    }
}

/// Code for source files that could not be fully parsed.
pub const PARSE_WARNING_CODE: &str = "WAC900";

/// An endpoint considered when a check failed.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Candidate {
    pub spec: String,
    pub method: String,
    /// Base path joined with the endpoint template.
    pub path: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: String,
    pub message: String,
    pub span: SourceSpan,
    /// None for findings not tied to a check stage, such as parse warnings.
    pub stage: Option<CheckStage>,
    pub candidates: Vec<Candidate>,
}

impl Diagnostic {
    pub fn parse_warning(message: impl Into<String>, span: SourceSpan) -> Self {
        Diagnostic {
            severity: Severity::Warning,
            code: PARSE_WARNING_CODE.into(),
            message: message.into(),
            span,
            stage: None,
            candidates: Vec::new(),
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }

    pub fn to_json(&self) -> Value {
        let candidates: Vec<Value> = self
            .candidates
            .iter()
            .map(|c| json!({"spec": c.spec, "method": c.method, "path": c.path}))
            .collect();
        json!({
            "file": self.span.file.as_ref(),
            "line": self.span.start_line,
            "col": self.span.start_col,
            "endLine": self.span.end_line,
            "endCol": self.span.end_col,
            "severity": self.severity.as_str(),
            "code": self.code,
            "stage": self.stage.map(CheckStage::as_str),
            "message": self.message,
            "candidates": candidates,
        })
    }

    /// Sort key for reports: file, then position, then code.
    pub fn order_key(&self) -> (&str, u32, u32, &str) {
        (&self.span.file, self.span.start_line, self.span.start_col, &self.code)
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}[{}]: {}", self.span, self.severity.as_str(), self.code, self.message)
    }
}

/// Sorts diagnostics into report order.
pub fn sort_diagnostics(diags: &mut [Diagnostic]) {
    diags.sort_by(|a, b| a.order_key().cmp(&b.order_key()).then_with(|| a.message.cmp(&b.message)));
}

pub fn render_text(diags: &[Diagnostic]) -> String {
    diags.iter().map(|d| format!("{d}\n")).collect()
}

pub fn render_json(diags: &[Diagnostic]) -> String {
    let list: Vec<Value> = diags.iter().map(Diagnostic::to_json).collect();
    let mut out = serde_json::to_string_pretty(&list).expect("diagnostics serialize");
    out.push('\n');
    out
}
