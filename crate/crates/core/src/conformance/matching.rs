use crate::extract::PatternSegment;
use crate::spec_model::{PathTemplate, TemplateSegment};
use crate::string_flow::StringPart;

/// How far a symbolic piece of the request path may reach.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SymbolicSegmentPolicy {
    /// A symbolic piece stands for one or more characters other than '/'.
    #[default]
    OneSegmentNoSlash,
    /// As above, and a trailing purely symbolic segment may also stand for
    /// several template segments.
    MultiSegment,
}

/// Whether `segment` can render exactly `text`, each symbolic piece taking at
/// least one character and never '/'.
pub fn segment_matches_text(segment: &[StringPart], text: &str) -> bool {
    let text = text.as_bytes();
    // reachable[i]: the parts consumed so far can produce text[..i]
    let mut reachable = vec![false; text.len() + 1];
    reachable[0] = true;
    for part in segment {
        let mut next = vec![false; text.len() + 1];
        match part {
            StringPart::Literal(lit) => {
                let lit = lit.as_bytes();
                for i in 0..=text.len() {
                    if reachable[i] && text[i..].starts_with(lit) {
                        next[i + lit.len()] = true;
                    }
                }
            }
            StringPart::Symbolic(_) => {
                for (i, _) in reachable.iter().enumerate().take(text.len()).filter(|(_, r)| **r) {
                    for j in i..text.len() {
                        if text[j] == b'/' {
                            break;
                        }
                        next[j + 1] = true;
                    }
                }
            }
        }
        reachable = next;
    }
    reachable[text.len()]
}

/// Matches one request segment against one template segment.
pub fn segment_matches(segment: &[StringPart], template: &TemplateSegment) -> bool {
    match template {
        // request segments are never empty, so they always render something
        TemplateSegment::Param(_) => !segment.is_empty(),
        TemplateSegment::Fixed(text) => segment_matches_text(segment, text),
    }
}

fn is_purely_symbolic(segment: &[StringPart]) -> bool {
    !segment.is_empty() && segment.iter().all(|p| matches!(p, StringPart::Symbolic(_)))
}

/// Matches a request path against a whole template.
pub fn match_path(segments: &[PatternSegment], template: &PathTemplate, policy: SymbolicSegmentPolicy) -> bool {
    match_segments(segments, template.segments(), policy)
}

fn match_segments(segments: &[PatternSegment], template: &[TemplateSegment], policy: SymbolicSegmentPolicy) -> bool {
    if segments.len() == template.len() {
        return segments.iter().zip(template).all(|(s, t)| segment_matches(s, t));
    }
    match (policy, segments.split_last()) {
        (SymbolicSegmentPolicy::MultiSegment, Some((last, init)))
            if is_purely_symbolic(last) && segments.len() < template.len() =>
        {
            init.iter().zip(template).all(|(s, t)| segment_matches(s, t))
        }
        _ => false,
    }
}

/// Whether the request path can begin with `prefix`. Used to tell a base
/// path mismatch apart from a route mismatch.
pub fn match_prefix(segments: &[PatternSegment], prefix: &PathTemplate, policy: SymbolicSegmentPolicy) -> bool {
    let prefix = prefix.segments();
    if segments.len() >= prefix.len() {
        return segments.iter().zip(prefix).all(|(s, t)| segment_matches(s, t));
    }
    match_segments(segments, prefix, policy)
}
