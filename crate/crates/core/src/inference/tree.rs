use std::collections::{BTreeMap, BTreeSet};

use serde_json::Value;

use crate::spec_model::HttpMethod;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    Fixed(String),
    /// A parameter position, with its chosen name.
    Collapsed(String),
}

/// What one observation contributed to the node its path ends at.
#[derive(Debug, Clone, PartialEq)]
pub struct Hit {
    pub query: BTreeSet<String>,
    pub body: Option<Value>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SegmentTreeNode {
    pub children: BTreeMap<Label, SegmentTreeNode>,
    pub hits: BTreeMap<HttpMethod, Vec<Hit>>,
    /// Concrete segment values merged into this node when it is collapsed.
    pub absorbed: BTreeSet<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InferenceConfig {
    /// Distinct sibling values needed to treat a position as a parameter.
    pub collapse_threshold: usize,
    /// Collapse numeric and UUID siblings even below the threshold.
    pub value_class_collapse: bool,
}

impl Default for InferenceConfig {
    fn default() -> Self {
        InferenceConfig {
            collapse_threshold: 3,
            value_class_collapse: true,
        }
    }
}

impl SegmentTreeNode {
    pub fn insert(&mut self, segments: &[String], method: HttpMethod, hit: Hit) {
        let mut node = self;
        for seg in segments {
            node = node.children.entry(Label::Fixed(seg.clone())).or_default();
        }
        node.hits.entry(method).or_default().push(hit);
    }

    fn merge(&mut self, other: SegmentTreeNode) {
        for (method, hits) in other.hits {
            self.hits.entry(method).or_default().extend(hits);
        }
        self.absorbed.extend(other.absorbed);
        for (label, child) in other.children {
            match self.children.get_mut(&label) {
                Some(existing) => existing.merge(child),
                None => {
                    self.children.insert(label, child);
                }
            }
        }
    }

    /// Methods seen here and the labels below, the structure siblings must
    /// share to be merged on count alone.
    fn shape(&self) -> (BTreeSet<HttpMethod>, BTreeSet<&Label>) {
        (self.hits.keys().copied().collect(), self.children.keys().collect())
    }

    fn has_parameter_child(&self) -> bool {
        self.children.keys().any(|l| matches!(l, Label::Collapsed(_)))
    }
}

pub fn is_digits(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit())
}

/// The canonical 8-4-4-4-12 hex shape.
pub fn is_uuid(s: &str) -> bool {
    let groups: Vec<&str> = s.split('-').collect();
    groups.len() == 5
        && groups
            .iter()
            .zip([8, 4, 4, 4, 12])
            .all(|(g, n)| g.len() == n && g.bytes().all(|b| b.is_ascii_hexdigit()))
}

fn param_name(parent: Option<&Label>, depth: usize) -> String {
    match parent {
        Some(Label::Fixed(p)) => {
            let single = p.strip_suffix('s').unwrap_or(p);
            if single.is_empty() || single.contains(['{', '}']) {
                format!("param{depth}")
            } else {
                single.to_string()
            }
        }
        _ => format!("param{depth}"),
    }
}

/// Collapses parameter positions, children first. `depth` is the 1-based
/// index of this node's children in the path.
pub fn collapse_parameters(node: &mut SegmentTreeNode, parent: Option<&Label>, depth: usize, cfg: &InferenceConfig) {
    let children = std::mem::take(&mut node.children);
    node.children = children
        .into_iter()
        .map(|(label, mut child)| {
            collapse_parameters(&mut child, Some(&label), depth + 1, cfg);
            (label, child)
        })
        .collect();

    let fixed: Vec<&str> = node
        .children
        .keys()
        .filter_map(|l| match l {
            Label::Fixed(s) => Some(s.as_str()),
            Label::Collapsed(_) => None,
        })
        .collect();
    if fixed.len() != node.children.len() || fixed.is_empty() {
        return;
    }
    let value_class = cfg.value_class_collapse
        && fixed.len() >= 2
        && (fixed.iter().all(|s| is_digits(s)) || fixed.iter().all(|s| is_uuid(s)));
    // a segment followed by a parameter names a collection, so siblings
    // like that are routes, not values
    let by_count = fixed.len() >= cfg.collapse_threshold
        && !node.children.values().any(SegmentTreeNode::has_parameter_child)
        && {
        let mut shapes = node.children.values().map(SegmentTreeNode::shape);
        let first = shapes.next();
        shapes.all(|s| Some(&s) == first.as_ref())
    };
    if !(value_class || by_count) {
        return;
    }

    let mut merged = SegmentTreeNode::default();
    for (label, child) in std::mem::take(&mut node.children) {
        if let Label::Fixed(value) = label {
            merged.absorbed.insert(value);
        }
        merged.merge(child);
    }
    // merging can bring enough siblings together one level down
    let name = param_name(parent, depth);
    let label = Label::Collapsed(name);
    collapse_parameters(&mut merged, Some(&label), depth + 1, cfg);
    node.children.insert(label, merged);
}
