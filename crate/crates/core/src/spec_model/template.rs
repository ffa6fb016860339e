use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

/// One `/`-delimited piece of a path template.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TemplateSegment {
    Fixed(String),
    Param(String),
}

impl TemplateSegment {
    pub fn is_param(&self) -> bool {
        matches!(self, TemplateSegment::Param(_))
    }
}

impl fmt::Display for TemplateSegment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TemplateSegment::Fixed(text) => f.write_str(text),
            TemplateSegment::Param(name) => write!(f, "{{{name}}}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TemplateError {
    #[error("path template `{0}` must begin with '/'")]
    MissingLeadingSlash(String),
    #[error("unbalanced braces in segment `{0}`")]
    UnbalancedBraces(String),
    #[error("parameter in segment `{0}` must span the whole segment")]
    PartialSegmentParam(String),
    #[error("empty parameter name in segment `{0}`")]
    EmptyParamName(String),
    #[error("duplicate parameter `{0}`")]
    DuplicateParam(String),
}

/// A URL path with named placeholder segments, e.g. `/user/{username}/profile`.
///
/// Empty segments (from `//` or a trailing slash) are dropped, so the
/// rendered form is the normalized form of the input.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PathTemplate {
    segments: Vec<TemplateSegment>,
}

impl PathTemplate {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds a template from raw segments, enforcing the segment invariants.
    pub fn from_segments(segments: Vec<TemplateSegment>) -> Result<Self, TemplateError> {
        let mut seen = HashSet::new();
        for seg in &segments {
            match seg {
                TemplateSegment::Fixed(text) => {
                    if text.is_empty() || text.contains(['/', '{', '}']) {
                        return Err(TemplateError::UnbalancedBraces(text.clone()));
                    }
                }
                TemplateSegment::Param(name) => {
                    if name.is_empty() {
                        return Err(TemplateError::EmptyParamName(String::new()));
                    }
                    if name.contains(['/', '{', '}']) {
                        return Err(TemplateError::UnbalancedBraces(name.clone()));
                    }
                    if !seen.insert(name.as_str()) {
                        return Err(TemplateError::DuplicateParam(name.clone()));
                    }
                }
            }
        }
        Ok(Self { segments })
    }

    pub fn segments(&self) -> &[TemplateSegment] {
        &self.segments
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn params(&self) -> impl Iterator<Item = &str> {
        self.segments.iter().filter_map(|s| match s {
            TemplateSegment::Param(name) => Some(name.as_str()),
            TemplateSegment::Fixed(_) => None,
        })
    }

    pub fn is_all_fixed(&self) -> bool {
        self.segments.iter().all(|s| !s.is_param())
    }

    /// Concatenation `self ++ other`. Duplicate parameter names across the two
    /// halves are kept as-is; callers that need the uniqueness invariant use
    /// [`PathTemplate::from_segments`].
    pub fn join(&self, other: &PathTemplate) -> PathTemplate {
        let mut segments = self.segments.clone();
        segments.extend(other.segments.iter().cloned());
        PathTemplate { segments }
    }

    pub fn render(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for PathTemplate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.segments.is_empty() {
            return f.write_str("/");
        }
        for seg in &self.segments {
            write!(f, "/{seg}")?;
        }
        Ok(())
    }
}

/// Parses `/a/{b}/c` style templates. The empty string and `/` both yield
/// the empty template.
pub fn parse_path_template(text: &str) -> Result<PathTemplate, TemplateError> {
    if text.is_empty() {
        return Ok(PathTemplate::empty());
    }
    if !text.starts_with('/') {
        return Err(TemplateError::MissingLeadingSlash(text.to_string()));
    }
    let mut segments = Vec::new();
    let mut seen = HashSet::new();
    for raw in text.split('/').filter(|s| !s.is_empty()) {
        let opens = raw.matches('{').count();
        let closes = raw.matches('}').count();
        if opens == 0 && closes == 0 {
            segments.push(TemplateSegment::Fixed(raw.to_string()));
            continue;
        }
        if opens != closes || opens > 1 {
            return Err(TemplateError::UnbalancedBraces(raw.to_string()));
        }
        let open = raw.find('{').unwrap_or_default();
        let close = raw.find('}').unwrap_or_default();
        if close < open {
            return Err(TemplateError::UnbalancedBraces(raw.to_string()));
        }
        if open != 0 || close != raw.len() - 1 {
            return Err(TemplateError::PartialSegmentParam(raw.to_string()));
        }
        let name = &raw[1..raw.len() - 1];
        if name.is_empty() {
            return Err(TemplateError::EmptyParamName(raw.to_string()));
        }
        if !seen.insert(name.to_string()) {
            return Err(TemplateError::DuplicateParam(name.to_string()));
        }
        segments.push(TemplateSegment::Param(name.to_string()));
    }
    Ok(PathTemplate { segments })
}
