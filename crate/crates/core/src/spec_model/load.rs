use std::collections::{BTreeSet, HashSet};

use serde_json::{Map, Value};
use thiserror::Error;

use super::{
    parse_path_template, ApiSpecification, Endpoint, HttpMethod, ParamLocation, ParameterSpec, Scheme,
    TemplateError, ValueType,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LoadError {
    #[error("specification document must be a JSON object")]
    NotAnObject,
    #[error("missing or non-string `host`")]
    MissingHost,
    #[error("invalid host `{0}`: expected a bare host name with optional port")]
    InvalidHost(String),
    #[error("invalid basePath `{path}`: {reason}")]
    InvalidBasePath { path: String, reason: String },
    #[error("unknown scheme `{0}`")]
    UnknownScheme(String),
    #[error("`schemes` must be a non-empty array of strings")]
    InvalidSchemes,
    #[error("`paths` must be an object")]
    InvalidPaths,
    #[error("route `{route}`: {source}")]
    Route { route: String, source: TemplateError },
    #[error("route `{route}`: unknown method key `{key}`")]
    UnknownMethod { route: String, key: String },
    #[error("route `{route}` {method}: malformed parameter: {reason}")]
    Parameter { route: String, method: String, reason: String },
    #[error("duplicate endpoint {method} {template}")]
    DuplicateEndpoint { method: HttpMethod, template: String },
}

/// Loads one specification from an OpenAPI 2.0-subset document.
///
/// Reads `host`, `basePath`, `schemes`, `info.title` and
/// `paths.{route}.{method}.parameters`; everything else is ignored. At the
/// path-item level, `parameters` (shared by all operations) and `x-*`
/// extension keys are accepted; any other non-method key is an error.
/// `in: header` and `in: formData` parameters are skipped.
pub fn load_spec(document: &Value, id: &str) -> Result<ApiSpecification, LoadError> {
    let doc = document.as_object().ok_or(LoadError::NotAnObject)?;

    let host = doc
        .get("host")
        .and_then(Value::as_str)
        .ok_or(LoadError::MissingHost)?
        .trim()
        .to_ascii_lowercase();
    if host.is_empty() || host.contains("://") || host.contains(['/', '?', '#', ' ']) {
        return Err(LoadError::InvalidHost(host));
    }

    let base_text = match doc.get("basePath") {
        None | Some(Value::Null) => "",
        Some(Value::String(s)) => s.as_str(),
        Some(other) => {
            return Err(LoadError::InvalidBasePath {
                path: other.to_string(),
                reason: "not a string".into(),
            })
        }
    };
    let base_path = parse_path_template(base_text).map_err(|e| LoadError::InvalidBasePath {
        path: base_text.to_string(),
        reason: e.to_string(),
    })?;
    if !base_path.is_all_fixed() {
        return Err(LoadError::InvalidBasePath {
            path: base_text.to_string(),
            reason: "parameters are not allowed in a base path".into(),
        });
    }

    let schemes = match doc.get("schemes") {
        None | Some(Value::Null) => BTreeSet::from([Scheme::Https]),
        Some(Value::Array(items)) if !items.is_empty() => {
            let mut out = BTreeSet::new();
            for item in items {
                let s = item.as_str().ok_or(LoadError::InvalidSchemes)?;
                out.insert(Scheme::parse(s).ok_or_else(|| LoadError::UnknownScheme(s.to_string()))?);
            }
            out
        }
        Some(_) => return Err(LoadError::InvalidSchemes),
    };

    let title = doc
        .get("info")
        .and_then(|i| i.get("title"))
        .and_then(Value::as_str)
        .unwrap_or(id)
        .to_string();

    let mut endpoints = Vec::new();
    let mut seen = HashSet::new();
    let empty = Map::new();
    let paths = match doc.get("paths") {
        None | Some(Value::Null) => &empty,
        Some(Value::Object(p)) => p,
        Some(_) => return Err(LoadError::InvalidPaths),
    };
    for (route, item) in paths {
        let template = parse_path_template(route).map_err(|source| LoadError::Route {
            route: route.clone(),
            source,
        })?;
        let item = item.as_object().ok_or(LoadError::InvalidPaths)?;
        let shared = item.get("parameters");
        for (key, operation) in item {
            if key == "parameters" || key.starts_with("x-") {
                continue;
            }
            let method = HttpMethod::ALL
                .into_iter()
                .find(|m| m.key() == key)
                .ok_or_else(|| LoadError::UnknownMethod {
                    route: route.clone(),
                    key: key.clone(),
                })?;
            if !seen.insert((template.clone(), method)) {
                return Err(LoadError::DuplicateEndpoint {
                    method,
                    template: template.render(),
                });
            }
            let mut endpoint = Endpoint {
                template: template.clone(),
                method,
                parameters: Vec::new(),
                required_body_fields: BTreeSet::new(),
            };
            let ctx = |reason: String| LoadError::Parameter {
                route: route.clone(),
                method: method.to_string(),
                reason,
            };
            let own = operation.get("parameters");
            let mut declared: Vec<(ParameterSpec, BTreeSet<String>)> = Vec::new();
            for list in [shared, own].into_iter().flatten() {
                let items = list.as_array().ok_or_else(|| ctx("`parameters` must be an array".into()))?;
                for raw in items {
                    if let Some(parsed) = parse_parameter(raw).map_err(&ctx)? {
                        // Operation-level parameters override shared ones with the same name and location.
                        declared.retain(|(p, _)| !(p.name == parsed.0.name && p.location == parsed.0.location));
                        declared.push(parsed);
                    }
                }
            }
            for (param, body_fields) in declared {
                endpoint.required_body_fields.extend(body_fields);
                endpoint.parameters.push(param);
            }
            for name in template.params() {
                let present = endpoint
                    .parameters
                    .iter()
                    .any(|p| p.location == ParamLocation::Path && p.name == name);
                if !present {
                    endpoint
                        .parameters
                        .push(ParameterSpec::new(name, ParamLocation::Path, true, ValueType::String));
                }
            }
            endpoints.push(endpoint);
        }
    }

    let mut spec = ApiSpecification {
        id: id.to_string(),
        title,
        host,
        base_path,
        schemes,
        endpoints,
    };
    spec.sort_endpoints();
    Ok(spec)
}

fn parse_parameter(raw: &Value) -> Result<Option<(ParameterSpec, BTreeSet<String>)>, String> {
    let obj = raw.as_object().ok_or("parameter must be an object")?;
    let name = obj
        .get("name")
        .and_then(Value::as_str)
        .filter(|n| !n.is_empty())
        .ok_or("parameter without a name")?;
    let location = match obj.get("in").and_then(Value::as_str) {
        Some("query") => ParamLocation::Query,
        Some("path") => ParamLocation::Path,
        Some("body") => ParamLocation::Body,
        Some("header") | Some("formData") => return Ok(None),
        Some(other) => return Err(format!("parameter `{name}` has unsupported location `{other}`")),
        None => return Err(format!("parameter `{name}` has no `in`")),
    };
    let required = obj.get("required").and_then(Value::as_bool).unwrap_or(false);
    let mut body_fields = BTreeSet::new();
    let value_type = if location == ParamLocation::Body {
        let schema = obj.get("schema");
        if let Some(fields) = schema.and_then(|s| s.get("required")).and_then(Value::as_array) {
            for f in fields {
                let f = f
                    .as_str()
                    .ok_or_else(|| format!("parameter `{name}`: schema.required entries must be strings"))?;
                body_fields.insert(f.to_string());
            }
        }
        match schema.and_then(|s| s.get("type")).and_then(Value::as_str) {
            Some(t) => ValueType::from_type_name(Some(t)),
            None => ValueType::Object,
        }
    } else {
        ValueType::from_type_name(obj.get("type").and_then(Value::as_str))
    };
    Ok(Some((ParameterSpec::new(name, location, required, value_type), body_fields)))
}
