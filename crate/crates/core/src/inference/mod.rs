//! Infers path-templated specifications from logs of concrete requests.

mod emit;
mod log;
mod tree;

use std::collections::{BTreeMap, BTreeSet};

pub use emit::{emit_spec, emit_spec_text};
pub use log::{parse_log, RequestObservation, SkippedLine};
pub use tree::{collapse_parameters, is_digits, is_uuid, Hit, InferenceConfig, Label, SegmentTreeNode};

use crate::spec_model::{
    ApiSpecification, Endpoint, HttpMethod, ParamLocation, ParameterSpec, PathTemplate, Scheme, TemplateSegment,
    ValueType,
};

/// File name used for a host's inferred document.
pub fn spec_file_stem(host: &str) -> String {
    host.replace(':', "_")
}

/// One specification per host, sorted by host.
pub fn infer_specs(log: &[RequestObservation], cfg: &InferenceConfig) -> Vec<ApiSpecification> {
    let mut hosts: BTreeMap<&str, (SegmentTreeNode, BTreeSet<Scheme>)> = BTreeMap::new();
    for obs in log {
        let (root, schemes) = hosts.entry(&obs.host).or_default();
        schemes.insert(obs.scheme);
        root.insert(
            &obs.segments,
            obs.method,
            Hit {
                query: obs.query.clone(),
                body: obs.body.clone(),
            },
        );
    }
    hosts
        .into_iter()
        .map(|(host, (mut root, schemes))| {
            collapse_parameters(&mut root, None, 1, cfg);
            build_spec(host, &root, schemes)
        })
        .collect()
}

fn build_spec(host: &str, root: &SegmentTreeNode, schemes: BTreeSet<Scheme>) -> ApiSpecification {
    let mut found = Vec::new();
    collect_endpoints(root, &mut Vec::new(), &mut found);

    // longest common fixed prefix, leaving every endpoint at least one segment
    let min_len = found.iter().map(|(segs, _, _)| segs.len()).min().unwrap_or(0);
    let mut base_len = 0;
    while base_len + 1 < min_len.max(1) {
        let first = &found[0].0[base_len];
        let shared = matches!(first, TemplateSegment::Fixed(_)) && found.iter().all(|(s, _, _)| &s[base_len] == first);
        if !shared {
            break;
        }
        base_len += 1;
    }
    let base_path = PathTemplate::from_segments(found.first().map(|f| f.0[..base_len].to_vec()).unwrap_or_default())
        .expect("fixed segments are valid");

    let mut endpoints = Vec::new();
    for (segs, method, hits) in found {
        let template = PathTemplate::from_segments(segs[base_len..].to_vec()).expect("parameter names are unique");
        let mut endpoint = Endpoint::new(template, method);
        let mut required_query: Option<BTreeSet<String>> = None;
        for h in &hits {
            required_query = Some(match required_query {
                None => h.query.clone(),
                Some(r) => r.intersection(&h.query).cloned().collect(),
            });
        }
        let seen_query: BTreeSet<&String> = hits.iter().flat_map(|h| &h.query).collect();
        let required_query = required_query.unwrap_or_default();
        for name in seen_query {
            endpoint.parameters.push(ParameterSpec::new(
                name.clone(),
                ParamLocation::Query,
                required_query.contains(name),
                ValueType::String,
            ));
        }
        let bodies: Vec<&serde_json::Map<String, serde_json::Value>> =
            hits.iter().filter_map(|h| h.body.as_ref().and_then(|b| b.as_object())).collect();
        if !bodies.is_empty() {
            let mut required: BTreeSet<String> = bodies[0].keys().cloned().collect();
            for b in &bodies[1..] {
                required.retain(|k| b.contains_key(k));
            }
            endpoint.required_body_fields = required;
            let all_have_body = bodies.len() == hits.len();
            endpoint
                .parameters
                .push(ParameterSpec::new("body", ParamLocation::Body, all_have_body, ValueType::Object));
        }
        endpoints.push(endpoint);
    }

    let mut spec = ApiSpecification {
        id: spec_file_stem(host),
        title: host.to_string(),
        host: host.to_string(),
        base_path,
        schemes,
        endpoints,
    };
    spec.sort_endpoints();
    spec
}

type Found = (Vec<TemplateSegment>, HttpMethod, Vec<Hit>);

fn collect_endpoints(node: &SegmentTreeNode, path: &mut Vec<TemplateSegment>, out: &mut Vec<Found>) {
    for (method, hits) in &node.hits {
        out.push((path.clone(), *method, hits.clone()));
    }
    for (label, child) in &node.children {
        let seg = match label {
            Label::Fixed(s) => TemplateSegment::Fixed(s.clone()),
            Label::Collapsed(name) => TemplateSegment::Param(unique_name(name, path)),
        };
        path.push(seg);
        collect_endpoints(child, path, out);
        path.pop();
    }
}

fn unique_name(name: &str, path: &[TemplateSegment]) -> String {
    let taken = |n: &str| path.iter().any(|s| matches!(s, TemplateSegment::Param(p) if p == n));
    if !taken(name) {
        return name.to_string();
    }
    (2..)
        .map(|i| format!("{name}{i}"))
        .find(|n| !taken(n))
        .expect("some suffix is free")
}
