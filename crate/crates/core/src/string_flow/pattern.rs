use std::collections::BTreeSet;
use std::fmt;

use serde::{Serialize, Serializer};

use super::Limits;

/// Name of the symbolic part that replaces the tail of an over-long pattern.
pub const OVERFLOW: &str = "overflow";

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StringPart {
    Literal(String),
    /// Stands for any string. The name only documents where it came from.
    Symbolic(String),
}

/// A sequence of literal and symbolic parts. Always normalized: no empty
/// literals and no two adjacent literals.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct StringPattern {
    parts: Vec<StringPart>,
}

impl StringPattern {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn literal(s: impl Into<String>) -> Self {
        Self::from_parts([StringPart::Literal(s.into())])
    }

    pub fn symbolic(name: impl Into<String>) -> Self {
        Self {
            parts: vec![StringPart::Symbolic(name.into())],
        }
    }

    pub fn from_parts(parts: impl IntoIterator<Item = StringPart>) -> Self {
        let mut p = Self::empty();
        for part in parts {
            p.push(part);
        }
        p
    }

    fn push(&mut self, part: StringPart) {
        match part {
            StringPart::Literal(s) if s.is_empty() => {}
            StringPart::Literal(s) => match self.parts.last_mut() {
                Some(StringPart::Literal(prev)) => prev.push_str(&s),
                _ => self.parts.push(StringPart::Literal(s)),
            },
            sym => self.parts.push(sym),
        }
    }

    pub fn parts(&self) -> &[StringPart] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// The whole string, if the pattern has no symbolic part.
    pub fn as_literal(&self) -> Option<String> {
        match self.parts.as_slice() {
            [] => Some(String::new()),
            [StringPart::Literal(s)] => Some(s.clone()),
            _ => None,
        }
    }

    pub fn is_literal(&self) -> bool {
        self.parts.iter().all(|p| matches!(p, StringPart::Literal(_)))
    }

    pub fn concat(&self, other: &StringPattern) -> StringPattern {
        let mut out = self.clone();
        for p in &other.parts {
            out.push(p.clone());
        }
        out
    }

    /// Replaces every literal part through `f`, leaving symbolic parts alone.
    pub fn map_literals(&self, f: impl Fn(&str) -> String) -> StringPattern {
        Self::from_parts(self.parts.iter().map(|p| match p {
            StringPart::Literal(s) => StringPart::Literal(f(s)),
            sym => sym.clone(),
        }))
    }

    /// Keeps the pattern within `max_parts`: an over-long pattern keeps its
    /// first part if literal, followed by a single symbolic part.
    fn widened(self, max_parts: usize) -> StringPattern {
        if self.parts.len() <= max_parts {
            return self;
        }
        let mut parts = Vec::new();
        if let Some(StringPart::Literal(s)) = self.parts.first() {
            parts.push(StringPart::Literal(s.clone()));
        }
        parts.push(StringPart::Symbolic(OVERFLOW.into()));
        Self { parts }
    }
}

impl fmt::Display for StringPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.parts {
            match p {
                StringPart::Literal(s) => f.write_str(s)?,
                StringPart::Symbolic(n) => write!(f, "{{{n}}}")?,
            }
        }
        Ok(())
    }
}

impl Serialize for StringPattern {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A bounded set of patterns. When more than `max_patterns` would be kept,
/// only the smallest ones survive and the set is marked truncated: it then
/// no longer covers every possible value.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PatternSet {
    patterns: BTreeSet<StringPattern>,
    truncated: bool,
}

impl PatternSet {
    pub fn single(p: StringPattern) -> Self {
        Self {
            patterns: BTreeSet::from([p]),
            truncated: false,
        }
    }

    pub fn literal(s: impl Into<String>) -> Self {
        Self::single(StringPattern::literal(s))
    }

    pub fn symbolic(name: impl Into<String>) -> Self {
        Self::single(StringPattern::symbolic(name))
    }

    pub fn from_patterns(patterns: impl IntoIterator<Item = StringPattern>, limits: &Limits) -> Self {
        let mut set = Self::default();
        for p in patterns {
            set.patterns.insert(p.widened(limits.max_parts));
        }
        set.trim(limits);
        set
    }

    fn trim(&mut self, limits: &Limits) {
        while self.patterns.len() > limits.max_patterns {
            self.patterns.pop_last();
            self.truncated = true;
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &StringPattern> {
        self.patterns.iter()
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    pub fn mark_truncated(&mut self) {
        self.truncated = true;
    }

    pub fn union(&self, other: &PatternSet, limits: &Limits) -> PatternSet {
        let mut out = self.clone();
        out.patterns.extend(other.patterns.iter().cloned());
        out.truncated |= other.truncated;
        out.trim(limits);
        out
    }

    /// Pairwise concatenation.
    pub fn concat(&self, other: &PatternSet, limits: &Limits) -> PatternSet {
        let mut out = PatternSet::from_patterns(
            self.patterns
                .iter()
                .flat_map(|a| other.patterns.iter().map(move |b| a.concat(b))),
            limits,
        );
        out.truncated |= self.truncated || other.truncated;
        out
    }

    pub fn map(&self, f: impl Fn(&StringPattern) -> StringPattern, limits: &Limits) -> PatternSet {
        let mut out = PatternSet::from_patterns(self.patterns.iter().map(f), limits);
        out.truncated |= self.truncated;
        out
    }

    /// The single literal value, if the set is exactly one literal pattern.
    pub fn as_single_literal(&self) -> Option<String> {
        match (self.patterns.len(), self.truncated) {
            (1, false) => self.patterns.first().and_then(StringPattern::as_literal),
            _ => None,
        }
    }
}

impl<'a> IntoIterator for &'a PatternSet {
    type Item = &'a StringPattern;
    type IntoIter = std::collections::btree_set::Iter<'a, StringPattern>;

    fn into_iter(self) -> Self::IntoIter {
        self.patterns.iter()
    }
}
