use std::collections::BTreeMap;

use super::pattern::PatternSet;
use super::Limits;
use crate::source::NodeId;

/// Abstract value of an expression.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AbstractValue {
    Str(PatternSet),
    /// Object with statically known fields.
    Obj(BTreeMap<String, AbstractValue>),
    Func(NodeId),
    /// Non-string primitive with a known string conversion: `1`, `true`,
    /// `null`, `undefined`.
    Prim(String),
    /// Anything. The name becomes the symbolic part when converted to a string.
    Unknown(String),
}

impl AbstractValue {
    pub fn literal(s: impl Into<String>) -> Self {
        AbstractValue::Str(PatternSet::literal(s))
    }

    pub fn undefined() -> Self {
        AbstractValue::Prim("undefined".into())
    }

    pub fn unknown(name: impl Into<String>) -> Self {
        AbstractValue::Unknown(name.into())
    }

    /// Possible results of string conversion. Objects and functions have no
    /// useful conversion and become a symbolic part named `fallback`.
    pub fn to_patterns(&self, fallback: &str) -> PatternSet {
        match self {
            AbstractValue::Str(s) => s.clone(),
            AbstractValue::Prim(text) => PatternSet::literal(text.clone()),
            AbstractValue::Unknown(name) => PatternSet::symbolic(name.clone()),
            AbstractValue::Obj(_) | AbstractValue::Func(_) => PatternSet::symbolic(fallback),
        }
    }

    pub fn field(&self, name: &str) -> AbstractValue {
        match self {
            AbstractValue::Obj(fields) => fields.get(name).cloned().unwrap_or_else(|| AbstractValue::unknown(name)),
            _ => AbstractValue::unknown(name),
        }
    }

    /// Least upper bound. `Unknown` absorbs objects and functions but keeps
    /// string patterns, adding its symbolic part.
    pub fn join(&self, other: &AbstractValue, limits: &Limits) -> AbstractValue {
        use AbstractValue::*;
        match (self, other) {
            (a, b) if a == b => a.clone(),
            (Str(a), Str(b)) => Str(a.union(b, limits)),
            (Str(s), Prim(p)) | (Prim(p), Str(s)) => Str(s.union(&PatternSet::literal(p.clone()), limits)),
            (Str(s), Unknown(n)) | (Unknown(n), Str(s)) => Str(s.union(&PatternSet::symbolic(n.clone()), limits)),
            (Obj(a), Obj(b)) => {
                let mut out = BTreeMap::new();
                for key in a.keys().chain(b.keys()) {
                    if out.contains_key(key) {
                        continue;
                    }
                    let missing = Unknown(key.clone());
                    let va = a.get(key).unwrap_or(&missing);
                    let vb = b.get(key).unwrap_or(&missing);
                    out.insert(key.clone(), va.join(vb, limits));
                }
                Obj(out)
            }
            (Unknown(a), Unknown(b)) => Unknown(a.min(b).clone()),
            (Unknown(n), _) | (_, Unknown(n)) => Unknown(n.clone()),
            _ => Unknown("join".into()),
        }
    }

    /// True if any string pattern inside the value was truncated.
    pub fn is_truncated(&self) -> bool {
        match self {
            AbstractValue::Str(s) => s.is_truncated(),
            AbstractValue::Obj(fields) => fields.values().any(AbstractValue::is_truncated),
            _ => false,
        }
    }
}
