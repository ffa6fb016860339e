use std::collections::BTreeSet;
use std::str::FromStr;

use serde::Deserialize;
use serde_json::Value;
use url::Url;

use crate::spec_model::{HttpMethod, Scheme};

/// One concrete request from a traffic log.
#[derive(Debug, Clone, PartialEq)]
pub struct RequestObservation {
    pub method: HttpMethod,
    pub scheme: Scheme,
    /// Lowercase host, with `:port` when the port is not the default.
    pub host: String,
    /// Non-empty path segments, still percent-encoded.
    pub segments: Vec<String>,
    pub query: BTreeSet<String>,
    pub body: Option<Value>,
    pub status: Option<u16>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkippedLine {
    /// 1-based.
    pub line: usize,
    pub reason: String,
}

#[derive(Deserialize)]
struct RawObservation {
    method: String,
    url: String,
    #[serde(default)]
    body: Option<Value>,
    #[serde(default)]
    status: Option<u16>,
}

impl RequestObservation {
    pub fn new(method: HttpMethod, url: &str, body: Option<Value>) -> Result<Self, String> {
        let parsed = Url::parse(url).map_err(|e| format!("invalid url `{url}`: {e}"))?;
        let scheme = Scheme::parse(parsed.scheme()).ok_or_else(|| format!("unsupported scheme `{}`", parsed.scheme()))?;
        let host = parsed
            .host_str()
            .filter(|h| !h.is_empty())
            .ok_or_else(|| format!("url `{url}` has no host"))?
            .to_ascii_lowercase();
        let host = match parsed.port() {
            Some(p) => format!("{host}:{p}"),
            None => host,
        };
        let segments = parsed
            .path_segments()
            .map(|s| s.filter(|s| !s.is_empty()).map(str::to_string).collect())
            .unwrap_or_default();
        let query = parsed
            .query_pairs()
            .map(|(k, _)| k.into_owned())
            .filter(|k| !k.is_empty())
            .collect();
        Ok(RequestObservation {
            method,
            scheme,
            host,
            segments,
            query,
            body,
            status: None,
        })
    }

    /// Parses one JSON Lines record.
    pub fn from_json_line(line: &str) -> Result<Self, String> {
        let raw: RawObservation = serde_json::from_str(line).map_err(|e| e.to_string())?;
        let method = HttpMethod::from_str(&raw.method).map_err(|_| format!("unknown method `{}`", raw.method))?;
        let mut obs = RequestObservation::new(method, &raw.url, raw.body.filter(|b| !b.is_null()))?;
        obs.status = raw.status;
        Ok(obs)
    }
}

/// Parses a JSON Lines log. Blank lines are ignored; bad lines are returned
/// with their line numbers instead of failing the whole log.
pub fn parse_log(text: &str) -> (Vec<RequestObservation>, Vec<SkippedLine>) {
    let mut observations = Vec::new();
    let mut skipped = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        match RequestObservation::from_json_line(line) {
            Ok(o) => observations.push(o),
            Err(reason) => skipped.push(SkippedLine { line: i + 1, reason }),
        }
    }
    (observations, skipped)
}
