//! Infers a specification from a request log and prints it.
//!
//! cargo run --example infer_from_log

use wac::inference::{emit_spec_text, infer_specs, parse_log, InferenceConfig};

const LOG: &str = r#"
{"method":"GET","url":"https://api.acme.example/api/user/erik/profile"}
{"method":"GET","url":"https://api.acme.example/api/user/annie/profile"}
{"method":"GET","url":"https://api.acme.example/api/user/yunhui/profile"}
{"method":"GET","url":"https://api.acme.example/api/products/17?fields=name"}
{"method":"GET","url":"https://api.acme.example/api/products/23"}
{"method":"DELETE","url":"https://api.acme.example/api/products/23?token=t"}
{"method":"GET","url":"https://api.acme.example/api/search?q=lamp&limit=5"}
{"method":"GET","url":"https://api.acme.example/api/search?q=desk"}
{"method":"POST","url":"https://api.acme.example/api/orders","body":{"productId":17,"quantity":1}}
{"method":"POST","url":"https://api.acme.example/api/orders","body":{"productId":23,"quantity":2,"note":"gift"}}
this line is not JSON
"#;

fn main() {
    let (observations, skipped) = parse_log(LOG);
    for s in &skipped {
        eprintln!("line {}: skipped: {}", s.line, s.reason);
    }
    for spec in infer_specs(&observations, &InferenceConfig::default()) {
        print!("{}", emit_spec_text(&spec));
    }
}
