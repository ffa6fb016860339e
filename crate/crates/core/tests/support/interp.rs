//! A small concrete interpreter for generated programs. It runs the same
//! syntax tree the analysis sees and records every request a run sends.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap, HashSet};
use std::rc::Rc;

use rand::seq::IndexedRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use wac::source::ast::{walk_program, BinaryOp, Visitor};
use wac::source::{Expr, ExprKind, Function, Position, Program, Stmt, StmtKind};

#[derive(Clone)]
pub enum Val<'a> {
    Str(String),
    Num(f64),
    Bool(bool),
    Undef,
    Null,
    Obj(Rc<RefCell<BTreeMap<String, Val<'a>>>>),
    Func(&'a Function, Scope<'a>),
}

type Scope<'a> = Rc<RefCell<Frame<'a>>>;

pub struct Frame<'a> {
    vars: HashMap<String, Val<'a>>,
    parent: Option<Scope<'a>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConcreteRequest {
    /// Start of the call expression.
    pub site: Position,
    pub url: Option<String>,
    pub method: String,
}

/// Values handed to free variables, unknown calls and entry parameters.
pub const INPUTS: [&str; 6] = ["a", "b/c", "", "x y", "42", "%"];

struct Run<'a, 'r> {
    rng: &'r mut ChaCha8Rng,
    globals: Scope<'a>,
    requests: Vec<ConcreteRequest>,
    steps: usize,
}

enum Flow<'a> {
    Normal,
    Return(Val<'a>),
}

const STEP_LIMIT: usize = 200_000;

fn to_str(v: &Val) -> String {
    match v {
        Val::Str(s) => s.clone(),
        Val::Num(n) if n.fract() == 0.0 && n.abs() < 1e15 => format!("{}", *n as i64),
        Val::Num(n) => format!("{n}"),
        Val::Bool(b) => b.to_string(),
        Val::Undef => "undefined".into(),
        Val::Null => "null".into(),
        Val::Obj(_) => "[object Object]".into(),
        Val::Func(..) => "function".into(),
    }
}

fn truthy(v: &Val) -> bool {
    match v {
        Val::Str(s) => !s.is_empty(),
        Val::Num(n) => *n != 0.0 && !n.is_nan(),
        Val::Bool(b) => *b,
        Val::Undef | Val::Null => false,
        Val::Obj(_) | Val::Func(..) => true,
    }
}

fn get<'a>(obj: &Val<'a>, key: &str) -> Val<'a> {
    match obj {
        Val::Obj(o) => o.borrow().get(key).cloned().unwrap_or(Val::Undef),
        _ => Val::Undef,
    }
}

/// encodeURIComponent on a concrete string.
pub fn encode_uri_component(s: &str) -> String {
    let mut out = String::new();
    for b in s.bytes() {
        if b.is_ascii_alphanumeric() || b"-_.!~*'()".contains(&b) {
            out.push(b as char);
        } else {
            out.push_str(&format!("%{b:02X}"));
        }
    }
    out
}

fn lookup<'a>(scope: &Scope<'a>, name: &str) -> Option<Val<'a>> {
    let frame = scope.borrow();
    match frame.vars.get(name) {
        Some(v) => Some(v.clone()),
        None => frame.parent.as_ref().and_then(|p| lookup(p, name)),
    }
}

fn assign<'a>(scope: &Scope<'a>, name: &str, v: Val<'a>) -> bool {
    let mut frame = scope.borrow_mut();
    if let Some(slot) = frame.vars.get_mut(name) {
        *slot = v;
        return true;
    }
    match frame.parent.clone() {
        Some(p) => {
            drop(frame);
            assign(&p, name, v)
        }
        None => false,
    }
}

impl<'a, 'r> Run<'a, 'r> {
    fn input(&mut self, name: &str) -> Val<'a> {
        if name.starts_with("flag") {
            Val::Bool(self.rng.random_bool(0.5))
        } else {
            Val::Str(INPUTS.choose(self.rng).unwrap().to_string())
        }
    }

    fn hoist(&mut self, stmts: &'a [Stmt], scope: &Scope<'a>) {
        for s in stmts {
            match &s.kind {
                StmtKind::FunctionDecl(f) => {
                    let name = f.name.clone().unwrap_or_default();
                    scope.borrow_mut().vars.insert(name, Val::Func(f, scope.clone()));
                }
                StmtKind::VarDecl { decls, .. } => {
                    for d in decls {
                        scope.borrow_mut().vars.entry(d.name.clone()).or_insert(Val::Undef);
                    }
                }
                StmtKind::If { then, otherwise, .. } => {
                    self.hoist(std::slice::from_ref(then), scope);
                    if let Some(o) = otherwise {
                        self.hoist(std::slice::from_ref(o), scope);
                    }
                }
                StmtKind::Block(b) => self.hoist(b, scope),
                StmtKind::While { body, .. } => self.hoist(std::slice::from_ref(body), scope),
                StmtKind::For { init, body, .. } => {
                    if let Some(i) = init {
                        self.hoist(std::slice::from_ref(i), scope);
                    }
                    self.hoist(std::slice::from_ref(body), scope);
                }
                _ => {}
            }
        }
    }

    fn block(&mut self, stmts: &'a [Stmt], scope: &Scope<'a>) -> Result<Flow<'a>, String> {
        for s in stmts {
            if let Flow::Return(v) = self.stmt(s, scope)? {
                return Ok(Flow::Return(v));
            }
        }
        Ok(Flow::Normal)
    }

    fn stmt(&mut self, s: &'a Stmt, scope: &Scope<'a>) -> Result<Flow<'a>, String> {
        self.steps += 1;
        if self.steps > STEP_LIMIT {
            return Err("step limit".into());
        }
        match &s.kind {
            StmtKind::VarDecl { decls, .. } => {
                for d in decls {
                    if let Some(init) = &d.init {
                        let v = self.expr(init, scope)?;
                        if !assign(scope, &d.name, v.clone()) {
                            scope.borrow_mut().vars.insert(d.name.clone(), v);
                        }
                    }
                }
                Ok(Flow::Normal)
            }
            StmtKind::FunctionDecl(_) | StmtKind::Empty => Ok(Flow::Normal),
            StmtKind::Return(e) => {
                let v = match e {
                    Some(e) => self.expr(e, scope)?,
                    None => Val::Undef,
                };
                Ok(Flow::Return(v))
            }
            StmtKind::If { cond, then, otherwise } => {
                if truthy(&self.expr(cond, scope)?) {
                    self.stmt(then, scope)
                } else if let Some(o) = otherwise {
                    self.stmt(o, scope)
                } else {
                    Ok(Flow::Normal)
                }
            }
            StmtKind::While { cond, body } => {
                while truthy(&self.expr(cond, scope)?) {
                    if let Flow::Return(v) = self.stmt(body, scope)? {
                        return Ok(Flow::Return(v));
                    }
                }
                Ok(Flow::Normal)
            }
            StmtKind::For { init, cond, update, body } => {
                if let Some(i) = init {
                    self.stmt(i, scope)?;
                }
                loop {
                    if let Some(c) = cond {
                        if !truthy(&self.expr(c, scope)?) {
                            break;
                        }
                    }
                    if let Flow::Return(v) = self.stmt(body, scope)? {
                        return Ok(Flow::Return(v));
                    }
                    if let Some(u) = update {
                        self.expr(u, scope)?;
                    }
                }
                Ok(Flow::Normal)
            }
            StmtKind::Block(b) => self.block(b, scope),
            StmtKind::Expr(e) => {
                self.expr(e, scope)?;
                Ok(Flow::Normal)
            }
            StmtKind::Opaque(text) => Err(format!("unsupported statement `{text}`")),
        }
    }

    fn ident(&mut self, name: &str, scope: &Scope<'a>) -> Val<'a> {
        if let Some(v) = lookup(scope, name) {
            return v;
        }
        // free variables get a fixed input for the whole run
        let v = self.input(name);
        self.globals.borrow_mut().vars.insert(name.to_string(), v.clone());
        v
    }

    fn expr(&mut self, e: &'a Expr, scope: &Scope<'a>) -> Result<Val<'a>, String> {
        self.steps += 1;
        if self.steps > STEP_LIMIT {
            return Err("step limit".into());
        }
        Ok(match &e.kind {
            ExprKind::Str(s) => Val::Str(s.clone()),
            ExprKind::Number(n) => Val::Num(n.parse().map_err(|_| format!("number {n}"))?),
            ExprKind::Bool(b) => Val::Bool(*b),
            ExprKind::Null => Val::Null,
            ExprKind::Ident(n) if n == "undefined" => Val::Undef,
            ExprKind::Ident(n) => self.ident(n, scope),
            ExprKind::Binary { op, lhs, rhs } => {
                let l = self.expr(lhs, scope)?;
                match op {
                    BinaryOp::And => return if truthy(&l) { self.expr(rhs, scope) } else { Ok(l) },
                    BinaryOp::Or => return if truthy(&l) { Ok(l) } else { self.expr(rhs, scope) },
                    _ => {}
                }
                let r = self.expr(rhs, scope)?;
                match (op, &l, &r) {
                    (BinaryOp::Add, Val::Num(a), Val::Num(b)) => Val::Num(a + b),
                    (BinaryOp::Add, _, _) => Val::Str(to_str(&l) + &to_str(&r)),
                    (BinaryOp::Sub, Val::Num(a), Val::Num(b)) => Val::Num(a - b),
                    (BinaryOp::Lt, Val::Num(a), Val::Num(b)) => Val::Bool(a < b),
                    (BinaryOp::StrictEq, _, _) => Val::Bool(to_str(&l) == to_str(&r)),
                    (BinaryOp::StrictNotEq, _, _) => Val::Bool(to_str(&l) != to_str(&r)),
                    _ => return Err(format!("unsupported operator {}", op.as_str())),
                }
            }
            ExprKind::Member { object, property } => {
                let o = self.expr(object, scope)?;
                match o {
                    Val::Obj(_) => get(&o, property),
                    // a property of an input is another input
                    Val::Str(_) => self.input(property),
                    _ => Val::Undef,
                }
            }
            ExprKind::Index { object, key } => {
                let o = self.expr(object, scope)?;
                let k = to_str(&self.expr(key, scope)?);
                get(&o, &k)
            }
            ExprKind::Object(props) => {
                let mut map = BTreeMap::new();
                for p in props {
                    let v = self.expr(&p.value, scope)?;
                    map.insert(p.key.clone(), v);
                }
                Val::Obj(Rc::new(RefCell::new(map)))
            }
            ExprKind::Function(f) => Val::Func(f, scope.clone()),
            ExprKind::Assign { target, value } => {
                let v = self.expr(value, scope)?;
                match &target.kind {
                    ExprKind::Ident(n) => {
                        if !assign(scope, n, v.clone()) {
                            self.globals.borrow_mut().vars.insert(n.clone(), v.clone());
                        }
                    }
                    ExprKind::Member { object, property } => {
                        if let Val::Obj(o) = self.expr(object, scope)? {
                            o.borrow_mut().insert(property.clone(), v.clone());
                        }
                    }
                    _ => return Err("unsupported assignment target".into()),
                }
                v
            }
            ExprKind::Conditional { cond, then, otherwise } => {
                if truthy(&self.expr(cond, scope)?) {
                    self.expr(then, scope)?
                } else {
                    self.expr(otherwise, scope)?
                }
            }
            ExprKind::Call { callee, args } => self.call(e, callee, args, scope)?,
            ExprKind::Opaque { text, .. } => return Err(format!("unsupported expression `{text}`")),
        })
    }

    fn record(&mut self, site: &Expr, url: &Val, method: String) {
        self.requests.push(ConcreteRequest {
            site: site.span.start(),
            url: match url {
                Val::Str(s) => Some(s.clone()),
                _ => None,
            },
            method: method.to_ascii_uppercase(),
        });
    }

    fn call(&mut self, site: &'a Expr, callee: &'a Expr, args: &'a [Expr], scope: &Scope<'a>) -> Result<Val<'a>, String> {
        let mut vals = Vec::new();
        for a in args {
            vals.push(self.expr(a, scope)?);
        }
        let arg = |i: usize| vals.get(i).cloned().unwrap_or(Val::Undef);
        if let ExprKind::Member { object, property } = &callee.kind {
            if matches!(&object.kind, ExprKind::Ident(n) if n == "$" || n == "jQuery") {
                match property.as_str() {
                    "ajax" => {
                        let (url, settings) = match arg(0) {
                            Val::Obj(_) => (get(&arg(0), "url"), arg(0)),
                            u => (u, arg(1)),
                        };
                        let method = match (get(&settings, "method"), get(&settings, "type")) {
                            (Val::Undef, Val::Undef) => "GET".to_string(),
                            (Val::Undef, t) => to_str(&t),
                            (m, _) => to_str(&m),
                        };
                        self.record(site, &url, method);
                    }
                    "get" | "getJSON" => self.record(site, &arg(0), "GET".into()),
                    "post" => self.record(site, &arg(0), "POST".into()),
                    other => return Err(format!("unsupported jQuery call {other}")),
                }
                return Ok(Val::Undef);
            }
        }
        if let ExprKind::Ident(name) = &callee.kind {
            match name.as_str() {
                "fetch" => {
                    let method = match get(&arg(1), "method") {
                        Val::Undef => "GET".to_string(),
                        m => to_str(&m),
                    };
                    self.record(site, &arg(0), method);
                    return Ok(Val::Undef);
                }
                "encodeURIComponent" => return Ok(Val::Str(encode_uri_component(&to_str(&arg(0))))),
                "String" => return Ok(Val::Str(to_str(&arg(0)))),
                _ => {}
            }
            return match lookup(scope, name) {
                Some(Val::Func(f, env)) => self.invoke(f, env, vals),
                Some(_) => Err(format!("{name} is not a function")),
                // unknown library function
                None => Ok(self.input(name)),
            };
        }
        Err("unsupported callee".into())
    }

    fn invoke(&mut self, f: &'a Function, env: Scope<'a>, args: Vec<Val<'a>>) -> Result<Val<'a>, String> {
        let frame = Rc::new(RefCell::new(Frame {
            vars: HashMap::new(),
            parent: Some(env),
        }));
        for (i, p) in f.params.iter().enumerate() {
            frame.borrow_mut().vars.insert(p.clone(), args.get(i).cloned().unwrap_or(Val::Undef));
        }
        self.hoist(&f.body, &frame);
        match self.block(&f.body, &frame)? {
            Flow::Return(v) => Ok(v),
            Flow::Normal => Ok(Val::Undef),
        }
    }
}

/// Names of top-level functions never called by name: the entry points an
/// environment (event handlers, other scripts) would invoke.
pub fn entry_functions(program: &Program) -> Vec<&Function> {
    struct Callees(HashSet<String>);
    impl<'a> Visitor<'a> for Callees {
        fn expr(&mut self, e: &'a Expr) {
            if let ExprKind::Call { callee, .. } = &e.kind {
                if let ExprKind::Ident(n) = &callee.kind {
                    self.0.insert(n.clone());
                }
            }
        }
    }
    let mut c = Callees(HashSet::new());
    walk_program(program, &mut c);
    program
        .body
        .iter()
        .filter_map(|s| match &s.kind {
            StmtKind::FunctionDecl(f) if !f.name.as_ref().is_some_and(|n| c.0.contains(n)) => Some(f.as_ref()),
            _ => None,
        })
        .collect()
}

/// Runs the top level, then every entry function with random inputs.
pub fn run_program(program: &Program, rng: &mut ChaCha8Rng) -> Result<Vec<ConcreteRequest>, String> {
    let globals = Rc::new(RefCell::new(Frame {
        vars: HashMap::new(),
        parent: None,
    }));
    let mut run = Run {
        rng,
        globals: globals.clone(),
        requests: Vec::new(),
        steps: 0,
    };
    run.hoist(&program.body, &globals);
    run.block(&program.body, &globals)?;
    for f in entry_functions(program) {
        let args = f.params.iter().map(|p| run.input(p)).collect();
        run.invoke(f, globals.clone(), args)?;
    }
    Ok(run.requests)
}
