use std::collections::BTreeMap;
use std::fmt;

use crate::spec_model::Scheme;
use crate::string_flow::{PatternSet, StringPart, StringPattern};

/// Host assumed for relative URLs: the page's own origin, unknown statically.
pub const ORIGIN: &str = "origin";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UrlScheme {
    Literal(Scheme),
    Symbolic,
    Missing,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UrlHost {
    Literal(String),
    Symbolic(String),
}

/// One path segment as a sequence of parts. Never empty.
pub type PatternSegment = Vec<StringPart>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UrlParts {
    pub scheme: UrlScheme,
    pub host: UrlHost,
    pub path: Vec<PatternSegment>,
    pub query: BTreeMap<String, PatternSet>,
    /// Some query pair had a symbolic name and was dropped.
    pub query_truncated: bool,
}

/// A literal character or a whole symbolic part.
#[derive(Clone, Copy)]
enum Piece<'a> {
    Char(char),
    Sym(&'a str),
}

fn pieces(p: &StringPattern) -> Vec<Piece<'_>> {
    let mut out = Vec::new();
    for part in p.parts() {
        match part {
            StringPart::Literal(s) => out.extend(s.chars().map(Piece::Char)),
            StringPart::Symbolic(n) => out.push(Piece::Sym(n)),
        }
    }
    out
}

fn to_parts(pieces: &[Piece<'_>]) -> Vec<StringPart> {
    let mut out: Vec<StringPart> = Vec::new();
    for p in pieces {
        match p {
            Piece::Char(c) => match out.last_mut() {
                Some(StringPart::Literal(s)) => s.push(*c),
                _ => out.push(StringPart::Literal(c.to_string())),
            },
            Piece::Sym(n) => out.push(StringPart::Symbolic(n.to_string())),
        }
    }
    out
}

fn strip_prefix_ci(pieces: &[Piece<'_>], prefix: &str) -> bool {
    let mut it = pieces.iter();
    prefix.chars().all(|want| matches!(it.next(), Some(Piece::Char(c)) if c.to_ascii_lowercase() == want))
}

/// Splits `pieces` at every literal occurrence of `sep`.
fn split<'p, 'a>(pieces: &'p [Piece<'a>], sep: char) -> Vec<&'p [Piece<'a>]> {
    pieces
        .split(|p| matches!(p, Piece::Char(c) if *c == sep))
        .collect()
}

/// Decomposes a URL pattern. Separators are only recognized inside literal
/// parts; a symbolic part never splits a segment.
pub fn parse_url_pattern(url: &StringPattern) -> UrlParts {
    let all = pieces(url);
    // A '#' fragment never reaches the server.
    let end = all
        .iter()
        .position(|p| matches!(p, Piece::Char('#')))
        .unwrap_or(all.len());
    let all = &all[..end];

    let (scheme, rest) = if strip_prefix_ci(all, "https://") {
        (UrlScheme::Literal(Scheme::Https), Some(&all[8..]))
    } else if strip_prefix_ci(all, "http://") {
        (UrlScheme::Literal(Scheme::Http), Some(&all[7..]))
    } else if strip_prefix_ci(all, "//") {
        (UrlScheme::Missing, Some(&all[2..]))
    } else if let Some(n) = other_scheme_len(all) {
        (UrlScheme::Symbolic, Some(&all[n..]))
    } else {
        (UrlScheme::Missing, None)
    };

    let (host, path_and_query) = match rest {
        Some(after) => {
            let host_end = after
                .iter()
                .position(|p| matches!(p, Piece::Char('/' | '?')))
                .unwrap_or(after.len());
            (authority(&after[..host_end], &scheme), &after[host_end..])
        }
        None => match all.first() {
            Some(Piece::Sym(_)) => {
                // "{base}/path": everything up to the first '/' is unknown
                let host_end = all
                    .iter()
                    .position(|p| matches!(p, Piece::Char('/' | '?')))
                    .unwrap_or(all.len());
                (UrlHost::Symbolic(sym_name(&all[..host_end])), &all[host_end..])
            }
            _ => (UrlHost::Symbolic(ORIGIN.into()), all),
        },
    };
    let scheme = match (&scheme, rest, all.first()) {
        (UrlScheme::Missing, None, Some(Piece::Sym(_))) => UrlScheme::Symbolic,
        _ => scheme,
    };

    let q = path_and_query
        .iter()
        .position(|p| matches!(p, Piece::Char('?')))
        .unwrap_or(path_and_query.len());
    let path = split(&path_and_query[..q], '/')
        .into_iter()
        .filter(|s| !s.is_empty())
        .map(to_parts)
        .collect();

    let mut query = BTreeMap::new();
    let mut query_truncated = false;
    if q < path_and_query.len() {
        for pair in split(&path_and_query[q + 1..], '&') {
            if pair.is_empty() {
                continue;
            }
            let eq = pair.iter().position(|p| matches!(p, Piece::Char('=')));
            let (name, value) = match eq {
                Some(i) => (&pair[..i], &pair[i + 1..]),
                None => (pair, &pair[pair.len()..]),
            };
            if name.iter().any(|p| matches!(p, Piece::Sym(_))) {
                query_truncated = true;
                continue;
            }
            let name: String = name
                .iter()
                .map(|p| match p {
                    Piece::Char(c) => *c,
                    Piece::Sym(_) => unreachable!(),
                })
                .collect();
            if name.is_empty() {
                continue;
            }
            let value = PatternSet::single(StringPattern::from_parts(to_parts(value)));
            query.insert(name, value);
        }
    }

    UrlParts {
        scheme,
        host,
        path,
        query,
        query_truncated,
    }
}

/// Length of a leading `scheme://` for schemes other than http(s).
fn other_scheme_len(all: &[Piece<'_>]) -> Option<usize> {
    let mut i = 0;
    while let Some(Piece::Char(c)) = all.get(i) {
        if c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.') {
            i += 1;
        } else {
            break;
        }
    }
    let starts_alpha = matches!(all.first(), Some(Piece::Char(c)) if c.is_ascii_alphabetic());
    if i > 0 && starts_alpha && strip_prefix_ci(&all[i..], "://") {
        Some(i + 3)
    } else {
        None
    }
}

fn sym_name(pieces: &[Piece<'_>]) -> String {
    pieces
        .iter()
        .find_map(|p| match p {
            Piece::Sym(n) => Some(n.to_string()),
            Piece::Char(_) => None,
        })
        .unwrap_or_else(|| ORIGIN.to_string())
}

fn authority(pieces: &[Piece<'_>], scheme: &UrlScheme) -> UrlHost {
    if pieces.iter().any(|p| matches!(p, Piece::Sym(_))) {
        return UrlHost::Symbolic(sym_name(pieces));
    }
    let text: String = pieces
        .iter()
        .filter_map(|p| match p {
            Piece::Char(c) => Some(*c),
            Piece::Sym(_) => None,
        })
        .collect();
    let host = text.rsplit('@').next().unwrap_or_default().to_ascii_lowercase();
    if host.is_empty() {
        return UrlHost::Symbolic(ORIGIN.into());
    }
    let host = match scheme {
        UrlScheme::Literal(Scheme::Https) => host.strip_suffix(":443").map(str::to_string).unwrap_or(host),
        UrlScheme::Literal(Scheme::Http) => host.strip_suffix(":80").map(str::to_string).unwrap_or(host),
        _ => host,
    };
    UrlHost::Literal(host)
}

pub fn render_segment(seg: &[StringPart]) -> String {
    StringPattern::from_parts(seg.iter().cloned()).to_string()
}

impl fmt::Display for UrlParts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.scheme {
            UrlScheme::Literal(s) => write!(f, "{}://", s.as_str())?,
            UrlScheme::Missing if matches!(&self.host, UrlHost::Literal(_)) => f.write_str("//")?,
            _ => {}
        }
        match &self.host {
            UrlHost::Literal(h) => f.write_str(h)?,
            UrlHost::Symbolic(n) if n == ORIGIN => {}
            UrlHost::Symbolic(n) => write!(f, "{{{n}}}")?,
        }
        for seg in &self.path {
            write!(f, "/{}", render_segment(seg))?;
        }
        for (i, (k, v)) in self.query.iter().enumerate() {
            let value = v.iter().next().map(|p| p.to_string()).unwrap_or_default();
            write!(f, "{}{k}={value}", if i == 0 { '?' } else { '&' })?;
        }
        Ok(())
    }
}
