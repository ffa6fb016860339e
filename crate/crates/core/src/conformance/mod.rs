//! Staged matching of extracted requests against specifications. An error is
//! reported only when no endpoint of any specification for the host accepts
//! the request.

mod diagnostic;
mod matching;

use std::collections::BTreeSet;

pub use diagnostic::{
    render_json, render_text, sort_diagnostics, Candidate, CheckStage, Diagnostic, Severity, PARSE_WARNING_CODE,
};
pub use matching::{match_path, match_prefix, segment_matches, segment_matches_text, SymbolicSegmentPolicy};

use crate::extract::{parse_url_pattern, render_segment, ExtractedRequest, MethodValue, Payload, UrlHost, UrlParts, UrlScheme, UrlValue};
use crate::spec_model::{ApiSpecification, Endpoint, SpecDatabase};
use crate::string_flow::OVERFLOW;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckConfig {
    pub symbolic_segment_policy: SymbolicSegmentPolicy,
    pub max_candidates_reported: usize,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            symbolic_segment_policy: SymbolicSegmentPolicy::OneSegmentNoSlash,
            max_candidates_reported: 5,
        }
    }
}

/// Required query parameters of `endpoint` that the request does not send.
/// Names come from the URL and from query data; if either had names that
/// could not be determined, nothing is reported missing.
pub fn check_query(url: &UrlParts, req: &ExtractedRequest, endpoint: &Endpoint) -> Vec<String> {
    if url.query_truncated || req.query_truncated {
        return Vec::new();
    }
    endpoint
        .required_query()
        .filter(|name| !url.query.contains_key(*name) && !req.query_params.contains_key(*name))
        .map(str::to_string)
        .collect()
}

/// Required body fields of `endpoint` missing from the request payload.
pub fn check_payload(req: &ExtractedRequest, endpoint: &Endpoint) -> Vec<String> {
    match &req.payload {
        Payload::Opaque => Vec::new(),
        Payload::None => endpoint.required_body_fields.iter().cloned().collect(),
        Payload::Shape(fields) => endpoint
            .required_body_fields
            .iter()
            .filter(|f| !fields.contains_key(*f))
            .cloned()
            .collect(),
    }
}

/// Outcome for one URL alternative.
enum Outcome {
    /// Accepted, or not checkable.
    Pass,
    UnknownHost(String),
    Fail(Failure),
}

struct Failure {
    stage: CheckStage,
    message: String,
    candidates: Vec<Candidate>,
}

fn candidate(spec: &ApiSpecification, endpoint: &Endpoint) -> Candidate {
    Candidate {
        spec: spec.id.clone(),
        method: endpoint.method.as_str().into(),
        path: spec.full_template(endpoint).render(),
    }
}

fn render_path(url: &UrlParts) -> String {
    if url.path.is_empty() {
        return "/".into();
    }
    url.path.iter().map(|s| format!("/{}", render_segment(s))).collect()
}

fn method_text(m: &MethodValue) -> String {
    match m {
        MethodValue::Known(m) => m.as_str().into(),
        MethodValue::Unrecognized(s) => s.clone(),
        MethodValue::Symbolic => "?".into(),
    }
}

fn quoted_list(names: &[String]) -> String {
    names.iter().map(|n| format!("`{n}`")).collect::<Vec<_>>().join(", ")
}

fn check_alternative(url: &UrlParts, req: &ExtractedRequest, db: &SpecDatabase, cfg: &CheckConfig) -> Outcome {
    let host = match &url.host {
        UrlHost::Symbolic(_) => return Outcome::Pass,
        UrlHost::Literal(h) => h,
    };
    // a widened pattern may stand for any number of segments
    let widened = url
        .path
        .iter()
        .flatten()
        .any(|p| matches!(p, crate::string_flow::StringPart::Symbolic(n) if n == OVERFLOW));
    if widened {
        return Outcome::Pass;
    }
    let specs = db.lookup_by_host(host);
    if specs.is_empty() {
        return Outcome::UnknownHost(host.clone());
    }
    let policy = cfg.symbolic_segment_policy;

    // (stage failed at, spec, endpoint, missing names)
    let mut failures: Vec<(CheckStage, &ApiSpecification, &Endpoint, Vec<String>)> = Vec::new();
    for spec in specs {
        let scheme_ok = match url.scheme {
            UrlScheme::Literal(s) => spec.schemes.contains(&s),
            UrlScheme::Symbolic | UrlScheme::Missing => true,
        };
        let base_ok = match_prefix(&url.path, &spec.base_path, policy);
        for endpoint in &spec.endpoints {
            let stage = if !scheme_ok {
                CheckStage::Protocol
            } else if !base_ok {
                CheckStage::BasePath
            } else if !match_path(&url.path, &spec.full_template(endpoint), policy) {
                CheckStage::Route
            } else if !match req.method {
                MethodValue::Known(m) => m == endpoint.method,
                MethodValue::Unrecognized(_) => false,
                MethodValue::Symbolic => true,
            } {
                CheckStage::Method
            } else {
                let missing = check_query(url, req, endpoint);
                if !missing.is_empty() {
                    failures.push((CheckStage::QueryParams, spec, endpoint, missing));
                    continue;
                }
                let missing = check_payload(req, endpoint);
                if !missing.is_empty() {
                    failures.push((CheckStage::Payload, spec, endpoint, missing));
                    continue;
                }
                return Outcome::Pass;
            };
            failures.push((stage, spec, endpoint, Vec::new()));
        }
    }

    let Some(deepest) = failures.iter().map(|f| f.0).max() else {
        // the host's specifications declare no endpoints
        return Outcome::Fail(Failure {
            stage: CheckStage::Route,
            message: format!("no endpoint for `{host}` matches path `{}`", render_path(url)),
            candidates: Vec::new(),
        });
    };
    let at_deepest: Vec<_> = failures.iter().filter(|f| f.0 == deepest).collect();
    let (_, first_spec, first_endpoint, first_missing) = at_deepest[0];
    let path = render_path(url);
    let message = match deepest {
        CheckStage::Protocol => {
            let supported: BTreeSet<&str> = specs.iter().flat_map(|s| s.schemes.iter().map(|s| s.as_str())).collect();
            let scheme = match url.scheme {
                UrlScheme::Literal(s) => s.as_str(),
                _ => "?",
            };
            format!(
                "scheme `{scheme}` is not supported by `{host}` (supported: {})",
                supported.into_iter().collect::<Vec<_>>().join(", ")
            )
        }
        CheckStage::BasePath => {
            let bases: BTreeSet<String> = specs.iter().map(|s| s.base_path.render()).collect();
            format!(
                "path `{path}` does not start with a base path of `{host}` ({})",
                bases.into_iter().collect::<Vec<_>>().join(", ")
            )
        }
        CheckStage::Route => format!("no endpoint for `{host}` matches path `{path}`"),
        CheckStage::Method => {
            let allowed: BTreeSet<&str> = at_deepest.iter().map(|f| f.2.method.as_str()).collect();
            format!(
                "method `{}` is not allowed for `{path}` (allowed: {})",
                method_text(&req.method),
                allowed.into_iter().collect::<Vec<_>>().join(", ")
            )
        }
        CheckStage::QueryParams => format!(
            "missing required query parameter {} for {} {}",
            quoted_list(first_missing),
            first_endpoint.method,
            first_spec.full_template(first_endpoint).render()
        ),
        CheckStage::Payload => format!(
            "missing required payload field {} for {} {}",
            quoted_list(first_missing),
            first_endpoint.method,
            first_spec.full_template(first_endpoint).render()
        ),
        CheckStage::HostLookup => unreachable!("host lookup failures are handled above"),
    };
    let candidates = at_deepest
        .iter()
        .take(cfg.max_candidates_reported)
        .map(|f| candidate(f.1, f.2))
        .collect();
    Outcome::Fail(Failure {
        stage: deepest,
        message,
        candidates,
    })
}

/// Checks one request. Every URL alternative is tried; an error is reported
/// only if all of them fail, at the deepest stage any of them reached.
pub fn check_request(req: &ExtractedRequest, db: &SpecDatabase, cfg: &CheckConfig) -> Vec<Diagnostic> {
    let patterns = match &req.url {
        UrlValue::Unknown => return Vec::new(),
        UrlValue::Patterns(set) if set.is_truncated() => return Vec::new(),
        UrlValue::Patterns(set) => set,
    };
    let mut unknown_host = None;
    let mut worst: Option<Failure> = None;
    for pattern in patterns {
        match check_alternative(&parse_url_pattern(pattern), req, db, cfg) {
            Outcome::Pass => return Vec::new(),
            Outcome::UnknownHost(h) => {
                unknown_host.get_or_insert(h);
            }
            Outcome::Fail(f) => {
                if worst.as_ref().is_none_or(|w| f.stage > w.stage) {
                    worst = Some(f);
                }
            }
        }
    }
    // a host we cannot check might be the one really contacted
    if let Some(host) = unknown_host {
        return vec![Diagnostic {
            severity: Severity::Info,
            code: CheckStage::HostLookup.code().into(),
            message: format!("no specification for host `{host}`"),
            span: req.span.clone(),
            stage: Some(CheckStage::HostLookup),
            candidates: Vec::new(),
        }];
    }
    match worst {
        Some(f) => vec![Diagnostic {
            severity: Severity::Error,
            code: f.stage.code().into(),
            message: f.message,
            span: req.span.clone(),
            stage: Some(f.stage),
            candidates: f.candidates,
        }],
        None => Vec::new(),
    }
}

/// Checks every request and returns the diagnostics in report order.
pub fn check_requests(reqs: &[ExtractedRequest], db: &SpecDatabase, cfg: &CheckConfig) -> Vec<Diagnostic> {
    let mut out: Vec<Diagnostic> = reqs.iter().flat_map(|r| check_request(r, db, cfg)).collect();
    sort_diagnostics(&mut out);
    out
}
