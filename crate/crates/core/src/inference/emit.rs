use serde_json::{json, Map, Value};

use crate::spec_model::{ApiSpecification, ParamLocation};

/// Renders a specification as a document that [`crate::spec_model::load_spec`]
/// reads back into an equal specification. Keys come out sorted.
pub fn emit_spec(spec: &ApiSpecification) -> Value {
    let mut paths = Map::new();
    for endpoint in &spec.endpoints {
        let mut parameters = Vec::new();
        for p in &endpoint.parameters {
            let entry = match p.location {
                ParamLocation::Body => {
                    let required: Vec<&String> = endpoint.required_body_fields.iter().collect();
                    json!({
                        "name": p.name,
                        "in": "body",
                        "required": p.required,
                        "schema": {"type": p.value_type.type_name().unwrap_or("object"), "required": required},
                    })
                }
                loc => {
                    let mut e = json!({"name": p.name, "in": loc.as_str(), "required": p.required});
                    if let Some(t) = p.value_type.type_name() {
                        e["type"] = Value::String(t.into());
                    }
                    e
                }
            };
            parameters.push(entry);
        }
        let route = paths
            .entry(endpoint.template.render())
            .or_insert_with(|| Value::Object(Map::new()));
        route[endpoint.method.key()] = json!({"parameters": parameters});
    }
    let schemes: Vec<&str> = spec.schemes.iter().map(|s| s.as_str()).collect();
    json!({
        "swagger": "2.0",
        "info": {"title": spec.title, "version": "inferred"},
        "host": spec.host,
        "basePath": spec.base_path.render(),
        "schemes": schemes,
        "paths": paths,
    })
}

/// Pretty-printed document text with a trailing newline.
pub fn emit_spec_text(spec: &ApiSpecification) -> String {
    let mut text = serde_json::to_string_pretty(&emit_spec(spec)).expect("spec serializes");
    text.push('\n');
    text
}
