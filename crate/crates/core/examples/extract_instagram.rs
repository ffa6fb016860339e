//! Extracts the request from a small jQuery program where the URL is built
//! in one function and sent from another.
//!
//! cargo run --example extract_instagram

use wac::pipeline::extract_source;
use wac::string_flow::Limits;

const SOURCE: &str = r#"
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

fn main() {
    let report = extract_source(SOURCE, "tags.js", &Limits::default());
    for req in &report.requests {
        println!("{}", serde_json::to_string_pretty(&req.to_json()).unwrap());
    }
}
