//! Checks a few requests against the bundled shop specifications and prints
//! the findings as the CLI would.
//!
//! cargo run --example check_requests

use std::path::Path;

use wac::conformance::render_text;
use wac::pipeline::{check_source, AnalysisOptions};
use wac::spec_model::SpecDatabase;

const SOURCE: &str = r#"
function load(id) {
  $.getJSON("https://api.shop.example/v1/products/" + id);
}

function remove(id) {
  $.ajax({ url: "https://api.shop.example/v1/products/" + id, type: "DELETE" });
}

function order(product) {
  $.post("https://api.shop.example/v1/orders", { productId: product });
}

function search() {
  $.get("http://api.shop.example/v1/search", { q: "lamp" });
}
"#;

fn main() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("specs/shop");
    let db = SpecDatabase::load_dir(&dir).expect("spec directory").database;
    let diags = check_source(SOURCE, "shop.js", &db, &AnalysisOptions::default());
    print!("{}", render_text(&diags));
}
