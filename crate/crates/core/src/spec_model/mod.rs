//! API specification model, the OpenAPI 2.0 subset loader, and the
//! host-indexed specification database.

mod load;
mod template;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

pub use load::{load_spec, LoadError};
pub use template::{parse_path_template, PathTemplate, TemplateError, TemplateSegment};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum HttpMethod {
    Get,
    Post,
    Put,
    Patch,
    Delete,
    Head,
    Options,
}

impl HttpMethod {
    pub const ALL: [HttpMethod; 7] = [
        HttpMethod::Get,
        HttpMethod::Post,
        HttpMethod::Put,
        HttpMethod::Patch,
        HttpMethod::Delete,
        HttpMethod::Head,
        HttpMethod::Options,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            HttpMethod::Get => "GET",
            HttpMethod::Post => "POST",
            HttpMethod::Put => "PUT",
            HttpMethod::Patch => "PATCH",
            HttpMethod::Delete => "DELETE",
            HttpMethod::Head => "HEAD",
            HttpMethod::Options => "OPTIONS",
        }
    }

    /// Lowercase key used under `paths.{route}` in spec documents.
    pub fn key(self) -> &'static str {
        match self {
            HttpMethod::Get => "get",
            HttpMethod::Post => "post",
            HttpMethod::Put => "put",
            HttpMethod::Patch => "patch",
            HttpMethod::Delete => "delete",
            HttpMethod::Head => "head",
            HttpMethod::Options => "options",
        }
    }

    /// Whether jQuery sends `data` for this method in the query string
    /// rather than the request body.
    pub fn sends_data_in_query(self) -> bool {
        matches!(self, HttpMethod::Get | HttpMethod::Delete | HttpMethod::Head)
    }
}

impl fmt::Display for HttpMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownMethod(pub String);

impl FromStr for HttpMethod {
    type Err = UnknownMethod;

    /// Case-insensitive.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        HttpMethod::ALL
            .into_iter()
            .find(|m| m.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| UnknownMethod(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Http,
    Https,
}

impl Scheme {
    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Http => "http",
            Scheme::Https => "https",
        }
    }

    pub fn parse(s: &str) -> Option<Scheme> {
        if s.eq_ignore_ascii_case("http") {
            Some(Scheme::Http)
        } else if s.eq_ignore_ascii_case("https") {
            Some(Scheme::Https)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ParamLocation {
    Query,
    Path,
    Body,
}

impl ParamLocation {
    pub fn as_str(self) -> &'static str {
        match self {
            ParamLocation::Query => "query",
            ParamLocation::Path => "path",
            ParamLocation::Body => "body",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ValueType {
    String,
    Number,
    Boolean,
    Object,
    Array,
    Any,
}

impl ValueType {
    pub fn from_type_name(name: Option<&str>) -> ValueType {
        match name {
            Some("string") => ValueType::String,
            Some("number") | Some("integer") => ValueType::Number,
            Some("boolean") => ValueType::Boolean,
            Some("object") => ValueType::Object,
            Some("array") => ValueType::Array,
            _ => ValueType::Any,
        }
    }

    pub fn type_name(self) -> Option<&'static str> {
        match self {
            ValueType::String => Some("string"),
            ValueType::Number => Some("number"),
            ValueType::Boolean => Some("boolean"),
            ValueType::Object => Some("object"),
            ValueType::Array => Some("array"),
            ValueType::Any => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParameterSpec {
    pub name: String,
    pub location: ParamLocation,
    /// Always true for [`ParamLocation::Path`].
    pub required: bool,
    pub value_type: ValueType,
}

impl ParameterSpec {
    pub fn new(name: impl Into<String>, location: ParamLocation, required: bool, value_type: ValueType) -> Self {
        Self {
            name: name.into(),
            location,
            required: required || location == ParamLocation::Path,
            value_type,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Endpoint {
    pub template: PathTemplate,
    pub method: HttpMethod,
    pub parameters: Vec<ParameterSpec>,
    pub required_body_fields: BTreeSet<String>,
}

impl Endpoint {
    pub fn new(template: PathTemplate, method: HttpMethod) -> Self {
        let parameters = template
            .params()
            .map(|p| ParameterSpec::new(p, ParamLocation::Path, true, ValueType::String))
            .collect();
        Self {
            template,
            method,
            parameters,
            required_body_fields: BTreeSet::new(),
        }
    }

    pub fn required_query(&self) -> impl Iterator<Item = &str> {
        self.parameters
            .iter()
            .filter(|p| p.location == ParamLocation::Query && p.required)
            .map(|p| p.name.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApiSpecification {
    pub id: String,
    pub title: String,
    /// Lowercase, optionally with `:port`.
    pub host: String,
    /// Only fixed segments.
    pub base_path: PathTemplate,
    pub schemes: BTreeSet<Scheme>,
    /// Sorted by (rendered template, method key), the order the loader produces.
    pub endpoints: Vec<Endpoint>,
}

impl ApiSpecification {
    pub fn full_template(&self, endpoint: &Endpoint) -> PathTemplate {
        full_template(self, endpoint)
    }

    pub(crate) fn sort_endpoints(&mut self) {
        self.endpoints
            .sort_by(|a, b| (a.template.render(), a.method.key()).cmp(&(b.template.render(), b.method.key())));
    }
}

/// `spec.base_path ++ endpoint.template`.
pub fn full_template(spec: &ApiSpecification, endpoint: &Endpoint) -> PathTemplate {
    spec.base_path.join(&endpoint.template)
}

/// Host-indexed collection of specifications. Immutable once built.
#[derive(Debug, Clone, Default)]
pub struct SpecDatabase {
    by_host: BTreeMap<String, Vec<ApiSpecification>>,
}

#[derive(Debug)]
pub struct DirLoadReport {
    pub database: SpecDatabase,
    pub failures: Vec<(PathBuf, String)>,
}

impl SpecDatabase {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_specs(specs: impl IntoIterator<Item = ApiSpecification>) -> Self {
        let mut db = Self::new();
        for spec in specs {
            db.insert(spec);
        }
        db
    }

    pub fn insert(&mut self, spec: ApiSpecification) {
        let list = self.by_host.entry(spec.host.to_ascii_lowercase()).or_default();
        list.push(spec);
        list.sort_by(|a, b| a.id.cmp(&b.id));
    }

    /// All specs whose host equals `host`, ignoring ASCII case, sorted by id.
    pub fn lookup_by_host(&self, host: &str) -> &[ApiSpecification] {
        self.by_host
            .get(&host.to_ascii_lowercase())
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn len(&self) -> usize {
        self.by_host.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.by_host.is_empty()
    }

    pub fn hosts(&self) -> impl Iterator<Item = &str> {
        self.by_host.keys().map(String::as_str)
    }

    pub fn specs(&self) -> impl Iterator<Item = &ApiSpecification> {
        self.by_host.values().flatten()
    }

    /// Returns a copy where every host present in `overrides` is served only
    /// by the override specs.
    pub fn shadowed_by(&self, overrides: &SpecDatabase) -> SpecDatabase {
        let mut merged = self.clone();
        for (host, specs) in &overrides.by_host {
            merged.by_host.insert(host.clone(), specs.clone());
        }
        merged
    }

    /// Loads every `*.json` file in `dir` (non-recursive), using the file stem
    /// as the spec id. Unloadable files are reported, not fatal.
    pub fn load_dir(dir: &Path) -> std::io::Result<DirLoadReport> {
        let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.is_file() && p.extension().is_some_and(|e| e == "json"))
            .collect();
        paths.sort();
        let mut database = SpecDatabase::new();
        let mut failures = Vec::new();
        for path in paths {
            let id = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            let loaded = std::fs::read_to_string(&path)
                .map_err(|e| e.to_string())
                .and_then(|text| serde_json::from_str(&text).map_err(|e| e.to_string()))
                .and_then(|doc| load_spec(&doc, &id).map_err(|e| e.to_string()));
            match loaded {
                Ok(spec) => database.insert(spec),
                Err(msg) => failures.push((path, msg)),
            }
        }
        Ok(DirLoadReport { database, failures })
    }
}
