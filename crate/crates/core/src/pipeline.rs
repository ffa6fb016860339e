//! Source text to extracted requests and diagnostics. The CLI and the
//! service both go through here, so they report the same findings.

use crate::conformance::{check_request, sort_diagnostics, CheckConfig, Diagnostic};
use crate::extract::{extract_all, ExtractedRequest};
use crate::source::parse;
use crate::spec_model::SpecDatabase;
use crate::string_flow::{analyze, Limits};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct AnalysisOptions {
    pub limits: Limits,
    pub check: CheckConfig,
}

#[derive(Debug, Clone)]
pub struct SourceReport {
    pub requests: Vec<ExtractedRequest>,
    /// One warning per syntax error; the rest of the file is still analyzed.
    pub warnings: Vec<Diagnostic>,
}

pub fn extract_source(source: &str, file: &str, limits: &Limits) -> SourceReport {
    let parsed = parse(source, file);
    let warnings = parsed
        .errors
        .iter()
        .map(|e| Diagnostic::parse_warning(format!("syntax error: {}", e.message), e.span.clone()))
        .collect();
    let flow = analyze(&parsed.program, limits);
    SourceReport {
        requests: extract_all(&parsed.program, &flow),
        warnings,
    }
}

/// Parse warnings and conformance findings for one file, in report order.
pub fn check_source(source: &str, file: &str, db: &SpecDatabase, opts: &AnalysisOptions) -> Vec<Diagnostic> {
    let report = extract_source(source, file, &opts.limits);
    let mut out = report.warnings;
    for req in &report.requests {
        out.extend(check_request(req, db, &opts.check));
    }
    sort_diagnostics(&mut out);
    out
}
