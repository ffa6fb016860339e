//! Random specifications, requests built to satisfy one of their endpoints,
//! and bulk corpora for timing runs.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rand::seq::IndexedRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use wac::extract::{ExtractedRequest, Framework, MethodValue, Payload, UrlValue};
use wac::source::{Position, SourceSpan};
use wac::spec_model::{load_spec, ApiSpecification, HttpMethod, TemplateSegment};
use wac::string_flow::{Limits, PatternSet, StringPart, StringPattern};

const WORDS: [&str; 10] = ["users", "items", "v1", "v2", "orders", "media", "tags", "search", "a", "b"];

fn segment_text(rng: &mut ChaCha8Rng) -> String {
    WORDS.choose(rng).unwrap().to_string()
}

/// A random spec document for `host`.
pub fn spec_document(rng: &mut ChaCha8Rng, host: &str) -> Value {
    let base: Vec<String> = (0..rng.random_range(0..3)).map(|_| segment_text(rng)).collect();
    let mut paths = serde_json::Map::new();
    for _ in 0..rng.random_range(1..6) {
        let mut route = String::new();
        let mut params = Vec::new();
        for i in 0..rng.random_range(1..5) {
            if rng.random_bool(0.3) {
                let name = format!("p{i}");
                route.push_str(&format!("/{{{name}}}"));
                params.push(json!({"name": name, "in": "path", "required": true, "type": "string"}));
            } else {
                route.push('/');
                route.push_str(&segment_text(rng));
            }
        }
        let method = HttpMethod::ALL.choose(rng).unwrap().key();
        let mut op_params = params.clone();
        for q in 0..rng.random_range(0..3) {
            op_params.push(json!({"name": format!("q{q}"), "in": "query", "required": rng.random_bool(0.5), "type": "string"}));
        }
        if rng.random_bool(0.4) {
            let fields: Vec<String> = (0..rng.random_range(1..3)).map(|f| format!("f{f}")).collect();
            op_params.push(json!({"name": "body", "in": "body", "schema": {"type": "object", "required": fields}}));
        }
        let entry = paths.entry(route).or_insert_with(|| json!({}));
        entry[method] = json!({"parameters": op_params});
    }
    let schemes: Vec<&str> = match rng.random_range(0..3) {
        0 => vec!["https"],
        1 => vec!["http"],
        _ => vec!["http", "https"],
    };
    json!({
        "swagger": "2.0",
        "host": host,
        "basePath": format!("/{}", base.join("/")),
        "schemes": schemes,
        "paths": paths,
    })
}

pub fn random_specs(rng: &mut ChaCha8Rng) -> Vec<ApiSpecification> {
    let hosts = ["api.one.example", "api.two.example"];
    (0..rng.random_range(1..4))
        .map(|i| {
            let host = hosts.choose(rng).unwrap();
            let doc = spec_document(rng, host);
            load_spec(&doc, &format!("s{i}")).expect("generated spec loads")
        })
        .collect()
}

fn sym(n: &str) -> StringPart {
    StringPart::Symbolic(n.into())
}

fn lit(s: &str) -> StringPart {
    StringPart::Literal(s.into())
}

/// A request that passes every stage against `spec`'s endpoint `idx`, built
/// directly from the endpoint rather than through the checker.
pub fn satisfying_request(rng: &mut ChaCha8Rng, spec: &ApiSpecification, idx: usize) -> ExtractedRequest {
    let endpoint = &spec.endpoints[idx];
    let scheme = match spec.schemes.iter().collect::<Vec<_>>().choose(rng) {
        Some(s) if rng.random_bool(0.8) => format!("{}://", s.as_str()),
        _ => "//".to_string(),
    };
    let mut parts = vec![lit(&format!("{scheme}{}", spec.host))];
    for seg in spec.full_template(endpoint).segments() {
        parts.push(lit("/"));
        match seg {
            TemplateSegment::Param(p) => match rng.random_range(0..3) {
                0 => parts.push(sym(p)),
                1 => parts.push(lit("42")),
                _ => parts.extend([lit("id-"), sym(p)]),
            },
            TemplateSegment::Fixed(t) => match rng.random_range(0..6) {
                0 => parts.push(sym("seg")),
                1 if t.len() > 1 => parts.extend([lit(&t[..1]), sym("rest")]),
                _ => parts.push(lit(t)),
            },
        }
    }
    let mut query_params = BTreeMap::new();
    let mut in_url = Vec::new();
    for name in endpoint.required_query() {
        if rng.random_bool(0.5) {
            in_url.push(name.to_string());
        } else {
            query_params.insert(name.to_string(), PatternSet::symbolic("v"));
        }
    }
    for (i, name) in in_url.iter().enumerate() {
        parts.push(lit(&format!("{}{name}=", if i == 0 { '?' } else { '&' })));
        parts.push(sym("qv"));
    }
    let query_truncated = rng.random_bool(0.1);
    let payload = if rng.random_bool(0.2) {
        Payload::Opaque
    } else if endpoint.required_body_fields.is_empty() && rng.random_bool(0.5) {
        Payload::None
    } else {
        let mut fields: BTreeMap<String, PatternSet> = endpoint
            .required_body_fields
            .iter()
            .map(|f| (f.clone(), PatternSet::literal("x")))
            .collect();
        fields.insert("extra".into(), PatternSet::symbolic("e"));
        Payload::Shape(fields)
    };
    let method = if rng.random_bool(0.15) {
        MethodValue::Symbolic
    } else {
        MethodValue::Known(endpoint.method)
    };
    let limits = Limits::default();
    let mut url = PatternSet::single(StringPattern::from_parts(parts));
    // decoys that match nothing
    for _ in 0..rng.random_range(0..3) {
        let decoy = StringPattern::literal(format!("https://{}/zz/{}", spec.host, rng.random_range(0..1000)));
        url = url.union(&PatternSet::single(decoy), &limits);
    }
    ExtractedRequest {
        span: SourceSpan::new(Arc::from("gen.js"), Position::START, Position::START),
        framework: Framework::JQueryAjax,
        url: UrlValue::Patterns(url),
        method,
        query_params,
        query_truncated,
        payload,
    }
}

/// A JavaScript file of about `lines` lines issuing requests to `hosts`.
pub fn bulk_source(rng: &mut ChaCha8Rng, hosts: &[String], lines: usize) -> String {
    let mut src = String::from("var token = session.token;\n\n");
    let mut i = 0;
    while src.lines().count() + 9 <= lines {
        let host = hosts.choose(rng).unwrap();
        let seg = segment_text(rng);
        let method = ["GET", "POST", "PUT", "DELETE"].choose(rng).unwrap();
        let body = match rng.random_range(0..3) {
            0 => format!(
                "  var url = \"https://{host}/{seg}/\" + id;\n  var settings = {{ url: url, type: \"{method}\", data: {{ access_token: token }} }};\n  send{i}(settings);\n"
            ),
            1 => format!("  var url = \"https://{host}/\" + (flag ? \"{seg}\" : \"v1/{seg}\");\n  $.get(url + \"?q=\" + encodeURIComponent(id));\n"),
            _ => format!("  return fetch(`https://{host}/{seg}/${{id}}`, {{ method: \"{method}\", body: JSON.stringify({{ id: id }}) }});\n"),
        };
        src.push_str(&format!("function call{i}(id) {{\n{body}}}\n\n"));
        src.push_str(&format!("function send{i}(s) {{\n  $.ajax(s);\n}}\n\n"));
        i += 1;
    }
    src
}

/// The ground truth for the inference round trip: ten endpoints, their
/// required query parameters, and value pools for each parameter.
pub struct GroundTruth {
    pub host: &'static str,
    /// (method, template with `{}` for parameters, required query, optional query)
    pub endpoints: Vec<(HttpMethod, &'static str, Vec<&'static str>, Vec<&'static str>)>,
}

pub fn ground_truth() -> GroundTruth {
    use HttpMethod::*;
    GroundTruth {
        host: "api.acme.example",
        endpoints: vec![
            (Get, "/api/user/{}/profile", vec![], vec![]),
            (Put, "/api/user/{}/profile", vec!["token"], vec![]),
            (Get, "/api/products", vec!["category"], vec!["page"]),
            (Get, "/api/products/{}", vec![], vec!["fields"]),
            (Delete, "/api/products/{}", vec!["token"], vec![]),
            (Get, "/api/products/{}/reviews", vec![], vec!["sort"]),
            (Post, "/api/orders", vec![], vec![]),
            (Get, "/api/orders/{}", vec!["token"], vec![]),
            (Get, "/api/search", vec!["q"], vec!["limit"]),
            (Get, "/api/stores/{}/hours", vec![], vec!["day"]),
        ],
    }
}

fn pool(template: &str, position: usize) -> Vec<String> {
    let segs: Vec<&str> = template.split('/').filter(|s| !s.is_empty()).collect();
    match segs.get(position.saturating_sub(1)).copied() {
        Some("user") => ["erik", "annie", "yunhui", "maria", "tom"].map(String::from).to_vec(),
        Some("products") => (0..8).map(|i| (100 + i * 37).to_string()).collect(),
        Some("orders") => (0..6)
            .map(|i| format!("{i:08x}-1b2c-4d3e-8f40-{:012x}", i * 7919 + 1))
            .collect(),
        Some("stores") => ["nyc", "sfo", "lon", "ber", "tyo"].map(String::from).to_vec(),
        _ => vec!["v".to_string()],
    }
}

/// `count` JSON Lines observations sampled from the ground truth; every
/// parameter takes at least three distinct values.
pub fn inference_log(rng: &mut ChaCha8Rng, count: usize) -> Vec<String> {
    let truth = ground_truth();
    let mut lines = Vec::new();
    let mut seen: BTreeMap<(usize, usize), BTreeSet<String>> = BTreeMap::new();
    for n in 0..count {
        // every endpoint gets an equal share, in random order of values
        let idx = n % truth.endpoints.len();
        let (method, template, required, optional) = &truth.endpoints[idx];
        let mut path = String::new();
        for (pos, seg) in template.split('/').filter(|s| !s.is_empty()).enumerate() {
            path.push('/');
            if seg == "{}" {
                let value = pool(template, pos).choose(rng).unwrap().clone();
                seen.entry((idx, pos)).or_default().insert(value.clone());
                path.push_str(&value);
            } else {
                path.push_str(seg);
            }
        }
        let mut query: Vec<String> = required.iter().map(|q| format!("{q}={}", rng.random_range(0..100))).collect();
        for q in optional {
            if rng.random_bool(0.5) {
                query.push(format!("{q}=1"));
            }
        }
        let url = if query.is_empty() {
            format!("https://{}{path}", truth.host)
        } else {
            format!("https://{}{path}?{}", truth.host, query.join("&"))
        };
        let mut obs = json!({"method": method.as_str(), "url": url, "status": 200});
        if *method == HttpMethod::Post {
            let mut body = json!({"productId": rng.random_range(0..9), "quantity": 1});
            if rng.random_bool(0.5) {
                body["note"] = json!("gift");
            }
            obs["body"] = body;
        }
        lines.push(serde_json::to_string(&obs).unwrap());
    }
    for ((idx, pos), values) in &seen {
        assert!(values.len() >= 3, "endpoint {idx} position {pos} saw only {values:?}");
    }
    lines
}
