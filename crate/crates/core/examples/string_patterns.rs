//! Shows the URL patterns the string analysis computes for branches, loops
//! and helper calls.
//!
//! cargo run --example string_patterns

use wac::extract::{patterns_json, UrlValue};
use wac::pipeline::extract_source;
use wac::string_flow::Limits;

const SOURCE: &str = r#"
var base = "https://api.example.com";

function path(kind, id) {
  return "/" + kind + "s/" + encodeURIComponent(id);
}

function fetchThing(kind, id, verbose) {
  var url = base + path(kind, id);
  if (verbose) {
    url += "?expand=all";
  }
  $.get(url);
}

function page(n) {
  var url = `${base}/feed`;
  for (var i = 0; i < n; i++) {
    url = url + "/next";
  }
  fetch(url);
}
"#;

fn main() {
    for limits in [Limits::default(), Limits { max_patterns: 1, ..Limits::default() }] {
        println!("max_patterns = {}", limits.max_patterns);
        for req in extract_source(SOURCE, "patterns.js", &limits).requests {
            let url = match &req.url {
                UrlValue::Patterns(set) if set.is_truncated() => format!("{} (truncated)", patterns_json(set)),
                UrlValue::Patterns(set) => patterns_json(set).to_string(),
                UrlValue::Unknown => "unknown".to_string(),
            };
            println!("  line {}: {url}", req.span.start().line);
        }
    }
}
