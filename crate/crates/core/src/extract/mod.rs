//! Recognizes request call sites and turns their flow values into
//! [`ExtractedRequest`] records.

mod url;

use std::collections::BTreeMap;

use serde_json::{json, Map, Value};

pub use url::{parse_url_pattern, render_segment, PatternSegment, UrlHost, UrlParts, UrlScheme, ORIGIN};

use crate::source::ast::{walk_program, Visitor};
use crate::source::{Expr, ExprKind, Program, SourceSpan};
use crate::spec_model::HttpMethod;
use crate::string_flow::{AbstractValue, FlowResult, PatternSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Framework {
    JQueryAjax,
    JQueryGet,
    JQueryPost,
    JQueryGetJson,
    Fetch,
}

impl Framework {
    pub fn as_str(self) -> &'static str {
        match self {
            Framework::JQueryAjax => "jquery_ajax",
            Framework::JQueryGet => "jquery_get",
            Framework::JQueryPost => "jquery_post",
            Framework::JQueryGetJson => "jquery_getjson",
            Framework::Fetch => "fetch",
        }
    }

    fn default_method(self) -> HttpMethod {
        match self {
            Framework::JQueryPost => HttpMethod::Post,
            _ => HttpMethod::Get,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UrlValue {
    Unknown,
    Patterns(PatternSet),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MethodValue {
    Known(HttpMethod),
    /// A literal that is not an HTTP method.
    Unrecognized(String),
    Symbolic,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Payload {
    None,
    Shape(BTreeMap<String, PatternSet>),
    Opaque,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtractedRequest {
    pub span: SourceSpan,
    pub framework: Framework,
    pub url: UrlValue,
    pub method: MethodValue,
    /// Parameters sent as query data (not those written into the URL).
    pub query_params: BTreeMap<String, PatternSet>,
    /// Query data exists whose names are not known.
    pub query_truncated: bool,
    pub payload: Payload,
}

/// Finds `$.ajax`, `jQuery.ajax`, `$.get`, `$.post`, `$.getJSON` and bare
/// `fetch` calls, in source order.
pub fn find_request_sites(program: &Program) -> Vec<(&Expr, Framework)> {
    struct Sites<'a>(Vec<(&'a Expr, Framework)>);
    impl<'a> Visitor<'a> for Sites<'a> {
        fn expr(&mut self, e: &'a Expr) {
            if let ExprKind::Call { callee, .. } = &e.kind {
                if let Some(fw) = framework_of(callee) {
                    self.0.push((e, fw));
                }
            }
        }
    }
    let mut s = Sites(Vec::new());
    walk_program(program, &mut s);
    s.0.sort_by_key(|(e, _)| (e.span.start(), e.span.end()));
    s.0
}

fn framework_of(callee: &Expr) -> Option<Framework> {
    match &callee.kind {
        ExprKind::Ident(n) if n == "fetch" => Some(Framework::Fetch),
        ExprKind::Member { object, property } => {
            let ExprKind::Ident(recv) = &object.kind else { return None };
            if recv != "$" && recv != "jQuery" {
                return None;
            }
            match property.as_str() {
                "ajax" => Some(Framework::JQueryAjax),
                "get" => Some(Framework::JQueryGet),
                "post" => Some(Framework::JQueryPost),
                "getJSON" => Some(Framework::JQueryGetJson),
                _ => None,
            }
        }
        _ => None,
    }
}

/// Runs [`find_request_sites`] and [`extract_request`] over a program.
pub fn extract_all(program: &Program, flow: &FlowResult) -> Vec<ExtractedRequest> {
    find_request_sites(program)
        .into_iter()
        .map(|(site, fw)| extract_request(site, fw, flow))
        .collect()
}

fn value_of(e: &Expr, flow: &FlowResult) -> AbstractValue {
    flow.value(e.id)
        .cloned()
        .unwrap_or_else(|| AbstractValue::unknown("unanalyzed"))
}

fn url_of(v: &AbstractValue) -> UrlValue {
    match v {
        AbstractValue::Str(set) if !set.is_empty() => UrlValue::Patterns(set.clone()),
        AbstractValue::Prim(p) => UrlValue::Patterns(PatternSet::literal(p.clone())),
        _ => UrlValue::Unknown,
    }
}

fn method_of(v: Option<&AbstractValue>, default: HttpMethod) -> MethodValue {
    match v {
        None => MethodValue::Known(default),
        Some(AbstractValue::Str(set)) => {
            if set.is_truncated() {
                return MethodValue::Symbolic;
            }
            let mut found = None;
            for p in set {
                let Some(text) = p.as_literal() else { return MethodValue::Symbolic };
                let m = match text.parse::<HttpMethod>() {
                    Ok(m) => MethodValue::Known(m),
                    Err(_) => MethodValue::Unrecognized(text),
                };
                match &found {
                    None => found = Some(m),
                    Some(prev) if *prev == m => {}
                    // several possible methods: any of them may be right
                    Some(_) => return MethodValue::Symbolic,
                }
            }
            found.unwrap_or(MethodValue::Symbolic)
        }
        Some(AbstractValue::Prim(p)) if p == "undefined" => MethodValue::Known(default),
        Some(AbstractValue::Prim(p)) => MethodValue::Unrecognized(p.clone()),
        Some(_) => MethodValue::Symbolic,
    }
}

/// Where jQuery's `data` goes for a method.
enum DataRoute {
    Query,
    Body,
    Either,
}

fn route_for(method: &MethodValue) -> DataRoute {
    match method {
        MethodValue::Known(m) if m.sends_data_in_query() => DataRoute::Query,
        MethodValue::Known(_) => DataRoute::Body,
        // jQuery treats unknown method strings like POST
        MethodValue::Unrecognized(_) => DataRoute::Body,
        MethodValue::Symbolic => DataRoute::Either,
    }
}

fn shape_of(fields: &BTreeMap<String, AbstractValue>) -> BTreeMap<String, PatternSet> {
    fields
        .iter()
        .map(|(k, v)| (k.clone(), v.to_patterns(k)))
        .collect()
}

struct Data {
    query: BTreeMap<String, PatternSet>,
    query_truncated: bool,
    payload: Payload,
}

fn route_data(data: Option<&AbstractValue>, method: &MethodValue) -> Data {
    let mut out = Data {
        query: BTreeMap::new(),
        query_truncated: false,
        payload: Payload::None,
    };
    let data = match data {
        None | Some(AbstractValue::Prim(_)) => return out,
        Some(d) => d,
    };
    match (route_for(method), data) {
        (DataRoute::Query, AbstractValue::Obj(fields)) => out.query = shape_of(fields),
        (DataRoute::Query, AbstractValue::Str(set)) => match set.iter().next() {
            // a query string given as data
            Some(p) if set.len() == 1 && !set.is_truncated() => {
                let parts = parse_url_pattern(&crate::string_flow::StringPattern::literal("?").concat(p));
                out.query = parts.query;
                out.query_truncated = parts.query_truncated;
            }
            _ => out.query_truncated = true,
        },
        (DataRoute::Query, _) => out.query_truncated = true,
        (DataRoute::Body, AbstractValue::Obj(fields)) => out.payload = Payload::Shape(shape_of(fields)),
        (DataRoute::Body, _) => out.payload = Payload::Opaque,
        (DataRoute::Either, _) => {
            out.query_truncated = true;
            out.payload = Payload::Opaque;
        }
    }
    out
}

/// Builds the request record for one call site.
pub fn extract_request(site: &Expr, framework: Framework, flow: &FlowResult) -> ExtractedRequest {
    let ExprKind::Call { args, .. } = &site.kind else {
        panic!("extract_request requires a call expression");
    };
    let arg = |i: usize| args.get(i).map(|a| value_of(a, flow));
    let default_method = framework.default_method();

    let (url, method, data, fetch_body) = match framework {
        Framework::JQueryAjax => match (arg(0), arg(1)) {
            (Some(settings @ AbstractValue::Obj(_)), _) => settings_fields(None, Some(&settings), default_method),
            (Some(url @ (AbstractValue::Str(_) | AbstractValue::Prim(_))), settings) => {
                settings_fields(Some(url), settings.as_ref(), default_method)
            }
            (first, settings) => settings_fields(None, first.or(settings).as_ref(), default_method),
        },
        Framework::JQueryGet | Framework::JQueryPost | Framework::JQueryGetJson => match arg(0) {
            // settings-object form: $.get({url, data})
            Some(obj @ AbstractValue::Obj(_)) => settings_fields(None, Some(&obj), default_method),
            first => {
                let data = match arg(1) {
                    Some(AbstractValue::Func(_)) => None,
                    other => other,
                };
                let url = first.as_ref().map(url_of).unwrap_or(UrlValue::Unknown);
                (url, MethodValue::Known(default_method), data, None)
            }
        },
        Framework::Fetch => {
            let url = arg(0).as_ref().map(url_of).unwrap_or(UrlValue::Unknown);
            match arg(1) {
                None => (url, MethodValue::Known(HttpMethod::Get), None, None),
                Some(opts @ AbstractValue::Obj(_)) => {
                    let method = match &opts {
                        AbstractValue::Obj(f) => method_of(f.get("method"), HttpMethod::Get),
                        _ => unreachable!(),
                    };
                    (url, method, None, Some(fetch_payload(args.get(1), &opts, flow)))
                }
                Some(_) => (url, MethodValue::Symbolic, None, Some(Payload::Opaque)),
            }
        }
    };

    let routed = route_data(data.as_ref(), &method);
    let payload = fetch_body.unwrap_or(routed.payload);
    ExtractedRequest {
        span: site.span.clone(),
        framework,
        url,
        method,
        query_params: routed.query,
        query_truncated: routed.query_truncated,
        payload,
    }
}

type Fields = (UrlValue, MethodValue, Option<AbstractValue>, Option<Payload>);

/// Reads `url`, `method`/`type` and `data` from a jQuery settings value.
fn settings_fields(url_arg: Option<AbstractValue>, settings: Option<&AbstractValue>, default: HttpMethod) -> Fields {
    match settings {
        Some(AbstractValue::Obj(f)) => {
            let url = match (&url_arg, f.get("url")) {
                (Some(u), _) => url_of(u),
                (None, Some(u)) => url_of(u),
                (None, None) => UrlValue::Unknown,
            };
            let m = f.get("method").or_else(|| f.get("type"));
            (url, method_of(m, default), f.get("data").cloned(), None)
        }
        None | Some(AbstractValue::Prim(_)) => {
            let url = url_arg.as_ref().map(url_of).unwrap_or(UrlValue::Unknown);
            (url, MethodValue::Known(default), None, None)
        }
        Some(_) => {
            // settings exist but their contents are unknown
            let url = url_arg.as_ref().map(url_of).unwrap_or(UrlValue::Unknown);
            (url, MethodValue::Symbolic, Some(AbstractValue::unknown("data")), None)
        }
    }
}

/// `body` of a fetch options object. `JSON.stringify({...})` written inside
/// an options object literal is read as the shape of its argument.
fn fetch_payload(opts_expr: Option<&Expr>, opts: &AbstractValue, flow: &FlowResult) -> Payload {
    let AbstractValue::Obj(fields) = opts else { return Payload::Opaque };
    if !fields.contains_key("body") {
        return Payload::None;
    }
    let body_expr = opts_expr.and_then(|e| match &e.kind {
        ExprKind::Object(props) => props.iter().find(|p| p.key == "body").map(|p| &p.value),
        _ => None,
    });
    if let Some(ExprKind::Call { callee, args }) = body_expr.map(|e| &e.kind) {
        let is_stringify = matches!(&callee.kind, ExprKind::Member { object, property }
            if property == "stringify" && matches!(&object.kind, ExprKind::Ident(n) if n == "JSON"));
        if is_stringify {
            if let Some(AbstractValue::Obj(f)) = args.first().map(|a| value_of(a, flow)) {
                return Payload::Shape(shape_of(&f));
            }
        }
    }
    Payload::Opaque
}

/// A pattern set as JSON: a string for one pattern, an array otherwise.
pub fn patterns_json(set: &PatternSet) -> Value {
    if set.len() == 1 {
        Value::String(set.iter().next().map(|p| p.to_string()).unwrap_or_default())
    } else {
        Value::Array(set.iter().map(|p| Value::String(p.to_string())).collect())
    }
}

impl ExtractedRequest {
    pub fn to_json(&self) -> Value {
        let url = match &self.url {
            UrlValue::Unknown => Value::Null,
            UrlValue::Patterns(set) => patterns_json(set),
        };
        let method = match &self.method {
            MethodValue::Known(m) => Value::String(m.as_str().into()),
            MethodValue::Unrecognized(s) => Value::String(s.clone()),
            MethodValue::Symbolic => Value::Null,
        };
        let query: Map<String, Value> = self
            .query_params
            .iter()
            .map(|(k, v)| (k.clone(), patterns_json(v)))
            .collect();
        let payload = match &self.payload {
            Payload::None => json!({"kind": "none", "fields": {}}),
            Payload::Opaque => json!({"kind": "opaque", "fields": {}}),
            Payload::Shape(f) => {
                let fields: Map<String, Value> = f.iter().map(|(k, v)| (k.clone(), patterns_json(v))).collect();
                json!({"kind": "shape", "fields": fields})
            }
        };
        json!({
            "file": self.span.file.as_ref(),
            "line": self.span.start_line,
            "col": self.span.start_col,
            "url": url,
            "method": method,
            "query": query,
            "payload": payload,
            "framework": self.framework.as_str(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::source::parse;
    use crate::string_flow::{analyze, Limits};

    fn extract(src: &str) -> Vec<ExtractedRequest> {
        let out = parse(src, "t.js");
        assert!(out.errors.is_empty(), "{:?}", out.errors);
        let flow = analyze(&out.program, &Limits::default());
        extract_all(&out.program, &flow)
    }

    fn url_strings(r: &ExtractedRequest) -> Vec<String> {
        match &r.url {
            UrlValue::Unknown => vec![],
            UrlValue::Patterns(s) => s.iter().map(|p| p.to_string()).collect(),
        }
    }

    const FIG1: &str = r#"
function getPictureForTag(tag) {
  var url = "https://api.instagram.com/v1/tags/" + tag + "/media/recent";
  var settings = {
    url: url,
    type: "GET",
    data: { access_token: token }
  };
  sendRequest(settings);
}

function sendRequest(settings) {
  $.ajax(settings);
}
"#;

    #[test]
    fn instagram_request() {
        let reqs = extract(FIG1);
        assert_eq!(reqs.len(), 1);
        assert_eq!(url_strings(&reqs[0]), vec!["https://api.instagram.com/v1/tags/{tag}/media/recent"]);
        assert_eq!(reqs[0].method, MethodValue::Known(HttpMethod::Get));
        assert!(reqs[0].query_params.contains_key("access_token"));
        assert_eq!(reqs[0].payload, Payload::None);
    }

    #[test]
    fn site_recognition() {
        assert_eq!(extract("$.ajax(settings);")[0].framework, Framework::JQueryAjax);
        assert_eq!(extract("jQuery.ajax(settings);")[0].framework, Framework::JQueryAjax);
        assert_eq!(extract("fetch(\"/x\");")[0].framework, Framework::Fetch);
        assert!(extract("foo.ajax(s);").is_empty());
        assert!(extract("$.each(s);").is_empty());
    }

    #[test]
    fn post_with_data_object() {
        let r = &extract("$.post(\"/v1/u\", {name: n});")[0];
        assert_eq!(r.method, MethodValue::Known(HttpMethod::Post));
        let Payload::Shape(f) = &r.payload else { panic!("{:?}", r.payload) };
        assert_eq!(f["name"].iter().next().unwrap().to_string(), "{n}");
        assert!(r.query_params.is_empty());
    }

    #[test]
    fn unknown_url_defaults_to_get() {
        let r = &extract("$.ajax({url: u});")[0];
        assert_eq!(r.url, UrlValue::Unknown);
        assert_eq!(r.method, MethodValue::Known(HttpMethod::Get));
    }

    #[test]
    fn two_argument_ajax() {
        let r = &extract("$.ajax(\"/v1/x\", {method: \"delete\", data: {force: 1}});")[0];
        assert_eq!(url_strings(r), vec!["/v1/x"]);
        assert_eq!(r.method, MethodValue::Known(HttpMethod::Delete));
        assert!(r.query_params.contains_key("force"));
    }

    #[test]
    fn unknown_settings_make_method_symbolic() {
        let r = &extract("function f(s) { $.ajax(s); }")[0];
        assert_eq!(r.url, UrlValue::Unknown);
        let r = &extract("function f(s) { $.ajax(\"/x\", s); }")[0];
        assert_eq!(r.method, MethodValue::Symbolic);
        assert!(r.query_truncated);
        assert_eq!(r.payload, Payload::Opaque);
    }

    #[test]
    fn get_callback_is_not_data() {
        let r = &extract("$.get(\"/a\", function (d) {});")[0];
        assert!(r.query_params.is_empty());
        assert!(!r.query_truncated);
    }

    #[test]
    fn fetch_options() {
        let r = &extract("fetch(\"https://h/o\", {method: \"POST\", body: JSON.stringify({a: 1, b: x})});")[0];
        assert_eq!(r.method, MethodValue::Known(HttpMethod::Post));
        let Payload::Shape(f) = &r.payload else { panic!() };
        assert_eq!(f.keys().collect::<Vec<_>>(), vec!["a", "b"]);
        let r = &extract("fetch(\"https://h/o\", {method: \"PUT\", body: raw});")[0];
        assert_eq!(r.payload, Payload::Opaque);
        let r = &extract("fetch(u);")[0];
        assert_eq!(r.method, MethodValue::Known(HttpMethod::Get));
    }

    #[test]
    fn unrecognized_and_multiple_methods() {
        let r = &extract("$.ajax({url: \"/a\", type: \"FETCH\"});")[0];
        assert_eq!(r.method, MethodValue::Unrecognized("FETCH".into()));
        let r = &extract("$.ajax({url: \"/a\", type: c ? \"GET\" : \"POST\"});")[0];
        assert_eq!(r.method, MethodValue::Symbolic);
    }

    #[test]
    fn sites_are_in_source_order_with_unique_spans() {
        let reqs = extract("fetch(\"/a\");\n$.get(\"/b\");\nfunction f() { fetch(\"/c\"); }");
        let urls: Vec<_> = reqs.iter().flat_map(url_strings).collect();
        assert_eq!(urls, vec!["/a", "/b", "/c"]);
        let mut spans: Vec<_> = reqs.iter().map(|r| r.span.clone()).collect();
        spans.dedup();
        assert_eq!(spans.len(), 3);
    }

    #[test]
    fn json_shape() {
        let r = &extract("$.post(\"/v1/u\", {name: \"x\"});")[0];
        let text = serde_json::to_string(&r.to_json()).unwrap();
        assert_eq!(
            text,
            r#"{"col":1,"file":"t.js","framework":"jquery_post","line":1,"method":"POST","payload":{"fields":{"name":"x"},"kind":"shape"},"query":{},"url":"/v1/u"}"#
        );
    }
}
