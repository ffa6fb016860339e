//! Independent reference implementations used as test oracles.

use wac::string_flow::{StringPart, StringPattern};

pub const ALPHABET: [char; 3] = ['a', 'b', 'c'];

/// Every string over `alphabet` with length in `min..=max`.
pub fn words(alphabet: &[char], min: usize, max: usize) -> Vec<String> {
    let mut out = Vec::new();
    let mut layer = vec![String::new()];
    for len in 0..=max {
        if len >= min {
            out.extend(layer.iter().cloned());
        }
        layer = layer
            .iter()
            .flat_map(|w| alphabet.iter().map(move |c| format!("{w}{c}")))
            .collect();
    }
    out
}

/// Brute force: tries every substitution of the symbolic parts by words of
/// length 1 to `max_len` and compares the rendering with `text`.
pub fn brute_force_segment_match(segment: &[StringPart], text: &str, max_len: usize) -> bool {
    let subs = words(&ALPHABET, 1, max_len);
    fn go(parts: &[StringPart], rendered: &mut String, text: &str, subs: &[String]) -> bool {
        if !text.starts_with(rendered.as_str()) {
            return false;
        }
        let Some((first, rest)) = parts.split_first() else {
            return rendered == text;
        };
        match first {
            StringPart::Literal(l) => {
                let len = rendered.len();
                rendered.push_str(l);
                let ok = go(rest, rendered, text, subs);
                rendered.truncate(len);
                ok
            }
            StringPart::Symbolic(_) => subs.iter().any(|s| {
                let len = rendered.len();
                rendered.push_str(s);
                let ok = go(rest, rendered, text, subs);
                rendered.truncate(len);
                ok
            }),
        }
    }
    go(segment, &mut String::new(), text, &subs)
}

/// Whether `concrete` is one of the strings `pattern` describes, with each
/// symbolic part standing for any string at all (empty and '/' included).
/// Written as plain backtracking, separately from the library's matcher.
pub fn pattern_admits(pattern: &StringPattern, concrete: &str) -> bool {
    fn go(parts: &[StringPart], s: &str) -> bool {
        match parts.split_first() {
            None => s.is_empty(),
            Some((StringPart::Literal(l), rest)) => s.strip_prefix(l.as_str()).is_some_and(|t| go(rest, t)),
            Some((StringPart::Symbolic(_), rest)) => {
                let mut cut = 0;
                loop {
                    if go(rest, &s[cut..]) {
                        return true;
                    }
                    match s[cut..].chars().next() {
                        Some(c) => cut += c.len_utf8(),
                        None => return false,
                    }
                }
            }
        }
    }
    go(pattern.parts(), concrete)
}
