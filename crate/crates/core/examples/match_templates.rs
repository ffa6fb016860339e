//! Matches symbolic path segments against path templates under both
//! segment policies.
//!
//! cargo run --example match_templates

use wac::conformance::{match_path, SymbolicSegmentPolicy};
use wac::extract::parse_url_pattern;
use wac::spec_model::parse_path_template;
use wac::string_flow::{StringPart, StringPattern};

fn main() {
    let url = StringPattern::from_parts([
        StringPart::Literal("https://api.example.com/v1/files/".into()),
        StringPart::Symbolic("rest".into()),
    ]);
    let parts = parse_url_pattern(&url);
    println!("url: {parts}");
    for template in ["/v1/files/{name}", "/v1/files/{dir}/{name}", "/v1/files/latest", "/v2/files/{name}"] {
        let t = parse_path_template(template).unwrap();
        let one = match_path(&parts.path, &t, SymbolicSegmentPolicy::OneSegmentNoSlash);
        let multi = match_path(&parts.path, &t, SymbolicSegmentPolicy::MultiSegment);
        println!("  {template:<24} one-segment: {one:<5} multi-segment: {multi}");
    }
}
