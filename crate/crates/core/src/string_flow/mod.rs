//! String analysis: computes, for every expression, an abstract value whose
//! string parts are patterns of literal and symbolic pieces.

mod analysis;
mod pattern;
mod value;

pub use analysis::{analyze, FlowResult};
pub use pattern::{PatternSet, StringPart, StringPattern, OVERFLOW};
pub use value::AbstractValue;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Patterns kept per value before truncation.
    pub max_patterns: usize,
    /// Nested call contexts analyzed with concrete arguments.
    pub max_depth: usize,
    /// Parts per pattern before widening.
    pub max_parts: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_patterns: 16,
            max_depth: 3,
            max_parts: 64,
        }
    }
}
