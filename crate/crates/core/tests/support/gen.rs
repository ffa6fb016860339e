//! Random request programs in the subset both the analysis and the concrete
//! interpreter understand.

use rand::seq::IndexedRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

const HOSTS: [&str; 4] = [
    "https://api.a.example",
    "http://api.b.example:8080",
    "//cdn.c.example",
    "https://API.D.example",
];
const LITS: [&str; 8] = ["/v1", "/users/", "/items", "?q=", "&page=", "/", "x", "/media/recent"];
const METHODS: [&str; 5] = ["GET", "post", "DELETE", "Put", "PATCH"];

struct Gen<'r> {
    rng: &'r mut ChaCha8Rng,
    helpers: Vec<(String, usize)>,
    globals: Vec<String>,
    flags: usize,
}

fn quote(s: &str) -> String {
    format!("{s:?}")
}

impl Gen<'_> {
    fn flag(&mut self) -> String {
        self.flags += 1;
        format!("flag{}", self.flags)
    }

    /// A string-valued expression over `vars`.
    fn sexpr(&mut self, vars: &[String], depth: usize) -> String {
        let choice = if depth == 0 { self.rng.random_range(0..3) } else { self.rng.random_range(0..10) };
        match choice {
            0 => quote(LITS.choose(self.rng).unwrap()),
            1 if !vars.is_empty() => vars.choose(self.rng).unwrap().clone(),
            1 | 2 => match self.globals.choose(self.rng) {
                Some(g) => g.clone(),
                None => quote("/g"),
            },
            3 | 4 => format!("{} + {}", self.sexpr(vars, depth - 1), self.sexpr(vars, depth - 1)),
            5 => {
                let f = self.flag();
                format!("({f} ? {} : {})", self.sexpr(vars, depth - 1), self.sexpr(vars, depth - 1))
            }
            6 if !self.helpers.is_empty() => {
                let (name, arity) = self.helpers.choose(self.rng).unwrap().clone();
                let args: Vec<String> = (0..arity).map(|_| self.sexpr(vars, depth - 1)).collect();
                format!("{name}({})", args.join(", "))
            }
            7 => format!("encodeURIComponent({})", self.sexpr(vars, depth - 1)),
            8 => format!("`{}${{{}}}{}`", LITS.choose(self.rng).unwrap(), self.sexpr(vars, 0), LITS.choose(self.rng).unwrap()),
            9 => format!("String({})", self.rng.random_range(0..100)),
            _ => quote("/z"),
        }
    }

    /// Statements that update local `s`.
    fn updates(&mut self, vars: &[String], out: &mut String) {
        match self.rng.random_range(0..4) {
            0 => {
                let f = self.flag();
                out.push_str(&format!(
                    "  if ({f}) {{\n    s = s + {};\n  }} else {{\n    s = {};\n  }}\n",
                    self.sexpr(vars, 1),
                    self.sexpr(vars, 2)
                ));
            }
            1 => {
                let n = self.rng.random_range(0..4);
                out.push_str(&format!(
                    "  for (var i = 0; i < {n}; i = i + 1) {{\n    s = s + \"/\" + i;\n  }}\n"
                ));
            }
            2 => out.push_str(&format!("  s += {};\n", self.sexpr(vars, 1))),
            _ => {}
        }
    }

    fn method(&mut self, vars: &[String]) -> String {
        match self.rng.random_range(0..4) {
            0 | 1 => quote(METHODS.choose(self.rng).unwrap()),
            2 => {
                let f = self.flag();
                format!("({f} ? \"GET\" : \"DELETE\")")
            }
            _ => match vars.first() {
                Some(v) => v.clone(),
                None => quote("GET"),
            },
        }
    }

    fn program(&mut self) -> String {
        let mut src = String::new();
        for i in 0..self.rng.random_range(0..3) {
            let name = format!("G{i}");
            let init = match self.rng.random_range(0..3) {
                0 => quote(HOSTS.choose(self.rng).unwrap()),
                1 => format!("{} + {}", quote(HOSTS.choose(self.rng).unwrap()), quote(LITS.choose(self.rng).unwrap())),
                _ => "config.base".to_string(),
            };
            src.push_str(&format!("var {name} = {init};\n"));
            self.globals.push(name);
        }
        let host_global = "H".to_string();
        src.push_str(&format!("var H = {};\n\n", quote(HOSTS.choose(self.rng).unwrap())));
        self.globals.push(host_global);

        for i in 0..self.rng.random_range(0..3) {
            let arity = self.rng.random_range(1..3);
            let params: Vec<String> = (0..arity).map(|p| format!("p{p}")).collect();
            let mut body = format!("  var s = {};\n", self.sexpr(&params, 2));
            self.updates(&params, &mut body);
            body.push_str("  return s;\n");
            src.push_str(&format!("function helper{i}({}) {{\n{body}}}\n\n", params.join(", ")));
            self.helpers.push((format!("helper{i}"), arity));
        }
        let with_sender = self.rng.random_bool(0.5);
        if with_sender {
            src.push_str("function send(settings) {\n  $.ajax(settings);\n}\n\n");
        }

        let n_req = self.rng.random_range(1..4);
        let mut calls = Vec::new();
        for i in 0..n_req {
            let params = vec!["a".to_string(), "b".to_string()];
            let mut body = format!("  var s = H + {};\n", self.sexpr(&params, 3));
            self.updates(&params, &mut body);
            let m = self.method(&params[1..]);
            let site = match self.rng.random_range(0..6) {
                0 if with_sender => format!("  send({{ url: s, type: {m}, data: {{ k: a }} }});\n"),
                0 | 1 => format!("  var cfg = {{ url: s, method: {m} }};\n  $.ajax(cfg);\n"),
                2 => "  $.get(s, function (d) { return d; });\n".to_string(),
                3 => "  $.post(s, { x: b });\n".to_string(),
                4 => format!("  fetch(s, {{ method: {m} }});\n"),
                _ => format!("  jQuery.ajax(s, {{ type: {m} }});\n"),
            };
            body.push_str(&site);
            src.push_str(&format!("function request{i}(a, b) {{\n{body}}}\n\n"));
            if self.rng.random_bool(0.4) {
                let arg = self.sexpr(&[], 1);
                calls.push(format!("request{i}({arg}, {});\n", quote(METHODS.choose(self.rng).unwrap())));
            }
        }
        for c in calls {
            src.push_str(&c);
        }
        src
    }
}

pub fn program(rng: &mut ChaCha8Rng) -> String {
    Gen {
        rng,
        helpers: Vec::new(),
        globals: Vec::new(),
        flags: 0,
    }
    .program()
}
