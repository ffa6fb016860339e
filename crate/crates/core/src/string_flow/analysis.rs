use std::collections::{BTreeMap, HashMap, HashSet};
use std::rc::Rc;

use percent_encoding::{utf8_percent_encode, AsciiSet, NON_ALPHANUMERIC};

use super::pattern::PatternSet;
use super::value::AbstractValue;
use super::Limits;
use crate::source::ast::{walk_program, BinaryOp, Visitor};
use crate::source::{Expr, ExprKind, Function, NodeId, Program, Stmt, StmtKind};

type Env = BTreeMap<String, AbstractValue>;

/// Abstract values of every analyzed expression, joined over all the
/// contexts in which the expression was analyzed.
#[derive(Debug, Default)]
pub struct FlowResult {
    values: HashMap<NodeId, AbstractValue>,
}

impl FlowResult {
    pub fn value(&self, id: NodeId) -> Option<&AbstractValue> {
        self.values.get(&id)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Runs the analysis over a whole program.
///
/// The top level runs first. Then every function not yet analyzed is run as
/// an entry point with unknown parameters: first those whose name never
/// appears as a callee, then the rest. Calls to known functions are analyzed
/// with the actual argument values (one clone per call site) up to
/// `limits.max_depth` frames; deeper or recursive calls return an unknown
/// value and queue the callee for one analysis with unknown parameters.
pub fn analyze(program: &Program, limits: &Limits) -> FlowResult {
    let mut collect = Collect::default();
    walk_program(program, &mut collect);

    let mut a = Analyzer {
        limits: *limits,
        functions: collect.functions.iter().map(|f| (f.id, *f)).collect(),
        parents: collect.parents,
        children: collect.children,
        values: HashMap::new(),
        closures: HashMap::new(),
        analyzed: HashSet::new(),
        limited_done: HashSet::new(),
        limited_queue: Vec::new(),
        expr_names: HashMap::new(),
        globals: Env::new(),
    };

    let mut env = Env::new();
    let mut ctx = Ctx {
        function: None,
        stack: Vec::new(),
        limited: false,
        globals: Rc::new(Env::new()),
        returns: None,
    };
    a.block(&program.body, &mut env, &mut ctx);
    a.globals = env;

    let order: Vec<NodeId> = collect.functions.iter().map(|f| f.id).collect();
    let roots: Vec<NodeId> = collect
        .functions
        .iter()
        .filter(|f| f.name.as_ref().is_none_or(|n| !collect.callee_names.contains(n)))
        .map(|f| f.id)
        .collect();
    for id in roots.into_iter().chain(order) {
        if !a.analyzed.contains(&id) {
            a.entry(id, false);
        }
    }
    while let Some(id) = a.limited_queue.pop() {
        a.entry(id, true);
    }
    FlowResult { values: a.values }
}

#[derive(Default)]
struct Collect<'a> {
    functions: Vec<&'a Function>,
    parents: HashMap<NodeId, Option<NodeId>>,
    children: HashMap<Option<NodeId>, Vec<NodeId>>,
    callee_names: HashSet<String>,
    stack: Vec<(NodeId, &'a Function)>,
}

impl<'a> Visitor<'a> for Collect<'a> {
    fn expr(&mut self, e: &'a Expr) {
        if let ExprKind::Call { callee, .. } = &e.kind {
            if let Some(n) = callee.callee_name() {
                self.callee_names.insert(n.to_string());
            }
        }
    }

    fn function(&mut self, f: &'a Function) {
        // Pre-order walk: pop frames whose span no longer encloses `f`.
        while let Some((_, outer)) = self.stack.last() {
            if outer.span.contains(&f.span) {
                break;
            }
            self.stack.pop();
        }
        let parent = self.stack.last().map(|(id, _)| *id);
        self.parents.insert(f.id, parent);
        self.children.entry(parent).or_default().push(f.id);
        self.functions.push(f);
        self.stack.push((f.id, f));
    }
}

struct Ctx {
    function: Option<NodeId>,
    stack: Vec<NodeId>,
    limited: bool,
    /// Top-level bindings visible to top-level functions called from here.
    globals: Rc<Env>,
    returns: Option<AbstractValue>,
}

struct Analyzer<'a> {
    limits: Limits,
    functions: HashMap<NodeId, &'a Function>,
    parents: HashMap<NodeId, Option<NodeId>>,
    children: HashMap<Option<NodeId>, Vec<NodeId>>,
    values: HashMap<NodeId, AbstractValue>,
    closures: HashMap<NodeId, Env>,
    analyzed: HashSet<NodeId>,
    limited_done: HashSet<NodeId>,
    limited_queue: Vec<NodeId>,
    expr_names: HashMap<NodeId, usize>,
    globals: Env,
}

const URI_COMPONENT: &AsciiSet = &NON_ALPHANUMERIC
    .remove(b'-')
    .remove(b'_')
    .remove(b'.')
    .remove(b'!')
    .remove(b'~')
    .remove(b'*')
    .remove(b'\'')
    .remove(b'(')
    .remove(b')');

const URI: &AsciiSet = &URI_COMPONENT
    .remove(b';')
    .remove(b',')
    .remove(b'/')
    .remove(b'?')
    .remove(b':')
    .remove(b'@')
    .remove(b'&')
    .remove(b'=')
    .remove(b'+')
    .remove(b'$')
    .remove(b'#');

impl<'a> Analyzer<'a> {
    fn record(&mut self, id: NodeId, v: &AbstractValue) {
        match self.values.get_mut(&id) {
            Some(old) => *old = old.join(v, &self.limits),
            None => {
                self.values.insert(id, v.clone());
            }
        }
    }

    /// Stable symbolic name for the result of an expression.
    fn expr_name(&mut self, id: NodeId) -> String {
        let next = self.expr_names.len() + 1;
        let n = *self.expr_names.entry(id).or_insert(next);
        format!("expr{n}")
    }

    fn join_env(&self, a: &Env, b: &Env) -> Env {
        let mut out = Env::new();
        for key in a.keys().chain(b.keys()) {
            if out.contains_key(key) {
                continue;
            }
            let v = match (a.get(key), b.get(key)) {
                (Some(x), Some(y)) => x.join(y, &self.limits),
                (Some(x), None) | (None, Some(x)) => x.join(&AbstractValue::unknown(key.clone()), &self.limits),
                (None, None) => unreachable!(),
            };
            out.insert(key.clone(), v);
        }
        out
    }

    fn entry(&mut self, id: NodeId, limited: bool) {
        if limited && !self.limited_done.insert(id) {
            return;
        }
        let Some(f) = self.functions.get(&id).copied() else { return };
        self.analyzed.insert(id);
        let mut env = match self.parents.get(&id).copied().flatten() {
            None => self.globals.clone(),
            Some(_) => self.closures.get(&id).cloned().unwrap_or_else(|| self.globals.clone()),
        };
        for p in &f.params {
            env.insert(p.clone(), AbstractValue::unknown(p.clone()));
        }
        let mut ctx = Ctx {
            function: Some(id),
            stack: vec![id],
            limited,
            globals: Rc::new(self.globals.clone()),
            returns: None,
        };
        self.block(&f.body, &mut env, &mut ctx);
        self.capture_closures(id, &env);
    }

    fn capture_closures(&mut self, id: NodeId, env: &Env) {
        let Some(kids) = self.children.get(&Some(id)).cloned() else { return };
        for kid in kids {
            let joined = match self.closures.get(&kid) {
                Some(old) => self.join_env(old, env),
                None => env.clone(),
            };
            self.closures.insert(kid, joined);
        }
    }

    fn queue_limited(&mut self, id: NodeId) {
        if !self.limited_done.contains(&id) && !self.limited_queue.contains(&id) {
            self.limited_queue.push(id);
        }
    }

    fn invoke(&mut self, id: NodeId, name: &str, args: Vec<AbstractValue>, env: &Env, ctx: &Ctx) -> AbstractValue {
        let Some(f) = self.functions.get(&id).copied() else {
            return AbstractValue::unknown(name);
        };
        if ctx.limited || ctx.stack.len() >= self.limits.max_depth || ctx.stack.contains(&id) {
            self.queue_limited(id);
            return AbstractValue::unknown(name);
        }
        let parent = self.parents.get(&id).copied().flatten();
        let mut callee_env = if parent == ctx.function {
            env.clone()
        } else if parent.is_none() {
            (*ctx.globals).clone()
        } else {
            self.closures
                .get(&id)
                .cloned()
                .unwrap_or_else(|| (*ctx.globals).clone())
        };
        for (i, p) in f.params.iter().enumerate() {
            callee_env.insert(p.clone(), args.get(i).cloned().unwrap_or_else(AbstractValue::undefined));
        }
        let mut stack = ctx.stack.clone();
        stack.push(id);
        let mut inner = Ctx {
            function: Some(id),
            stack,
            limited: false,
            globals: if ctx.function.is_none() {
                Rc::new(env.clone())
            } else {
                ctx.globals.clone()
            },
            returns: None,
        };
        self.analyzed.insert(id);
        self.block(&f.body, &mut callee_env, &mut inner);
        self.capture_closures(id, &callee_env);
        inner.returns.unwrap_or_else(AbstractValue::undefined)
    }

    // ---- statements ----

    fn hoist(&mut self, stmts: &[Stmt], env: &mut Env) {
        for s in stmts {
            match &s.kind {
                StmtKind::FunctionDecl(f) => {
                    if let Some(n) = &f.name {
                        env.insert(n.clone(), AbstractValue::Func(f.id));
                    }
                }
                StmtKind::Block(b) => self.hoist(b, env),
                StmtKind::If { then, otherwise, .. } => {
                    self.hoist(std::slice::from_ref(&**then), env);
                    if let Some(o) = otherwise {
                        self.hoist(std::slice::from_ref(&**o), env);
                    }
                }
                StmtKind::While { body, .. } | StmtKind::For { body, .. } => {
                    self.hoist(std::slice::from_ref(&**body), env)
                }
                _ => {}
            }
        }
    }

    fn block(&mut self, stmts: &[Stmt], env: &mut Env, ctx: &mut Ctx) {
        self.hoist(stmts, env);
        for s in stmts {
            self.stmt(s, env, ctx);
        }
    }

    fn stmt(&mut self, s: &Stmt, env: &mut Env, ctx: &mut Ctx) {
        match &s.kind {
            StmtKind::VarDecl { decls, .. } => {
                for d in decls {
                    let v = match &d.init {
                        Some(init) => self.eval(init, env, ctx),
                        None => match env.get(&d.name) {
                            // `var x;` does not reset an existing binding
                            Some(v) if ctx.function.is_none() => v.clone(),
                            _ => AbstractValue::unknown(d.name.clone()),
                        },
                    };
                    env.insert(d.name.clone(), v);
                }
            }
            StmtKind::FunctionDecl(_) | StmtKind::Empty | StmtKind::Opaque(_) => {}
            StmtKind::Return(value) => {
                let v = match value {
                    Some(e) => self.eval(e, env, ctx),
                    None => AbstractValue::undefined(),
                };
                ctx.returns = Some(match ctx.returns.take() {
                    Some(old) => old.join(&v, &self.limits),
                    None => v,
                });
            }
            StmtKind::If { cond, then, otherwise } => {
                self.eval(cond, env, ctx);
                let mut then_env = env.clone();
                self.stmt(then, &mut then_env, ctx);
                if let Some(o) = otherwise {
                    self.stmt(o, env, ctx);
                }
                *env = self.join_env(&then_env, env);
            }
            StmtKind::While { cond, body } => self.run_loop(Some(cond), None, body, env, ctx),
            StmtKind::For { init, cond, update, body } => {
                if let Some(i) = init {
                    self.stmt(i, env, ctx);
                }
                self.run_loop(cond.as_ref(), update.as_ref(), body, env, ctx)
            }
            StmtKind::Block(b) => self.block(b, env, ctx),
            StmtKind::Expr(e) => {
                self.eval(e, env, ctx);
            }
        }
    }

    /// One pass over the loop body, starting from a state where everything
    /// the loop assigns has been widened with an unknown value. The result
    /// joins the zero-iteration and one-pass states.
    fn run_loop(&mut self, cond: Option<&Expr>, update: Option<&Expr>, body: &Stmt, env: &mut Env, ctx: &mut Ctx) {
        let mut targets = Targets::default();
        targets.stmt(body);
        for e in cond.iter().chain(update.iter()) {
            targets.expr(e);
        }
        for (root, path) in &targets.paths {
            self.havoc(env, root, path);
        }
        if let Some(c) = cond {
            self.eval(c, env, ctx);
        }
        let mut body_env = env.clone();
        self.stmt(body, &mut body_env, ctx);
        if let Some(u) = update {
            self.eval(u, &mut body_env, ctx);
        }
        *env = self.join_env(env, &body_env);
    }

    fn havoc(&self, env: &mut Env, root: &str, path: &[String]) {
        let limits = self.limits;
        let Some(first) = path.first() else {
            let old = env.get(root).cloned().unwrap_or_else(|| AbstractValue::unknown(root));
            env.insert(root.to_string(), old.join(&AbstractValue::unknown(root), &limits));
            return;
        };
        fn go(v: &mut AbstractValue, field: &str, rest: &[String], limits: &Limits) {
            let AbstractValue::Obj(fields) = v else { return };
            match rest.split_first() {
                None => {
                    let old = fields.get(field).cloned().unwrap_or_else(|| AbstractValue::unknown(field));
                    fields.insert(field.to_string(), old.join(&AbstractValue::unknown(field), limits));
                }
                Some((next, rest)) => {
                    if let Some(inner) = fields.get_mut(field) {
                        go(inner, next, rest, limits);
                    }
                }
            }
        }
        if let Some(v) = env.get_mut(root) {
            go(v, first, &path[1..], &limits);
        }
    }

    // ---- expressions ----

    fn eval(&mut self, e: &Expr, env: &mut Env, ctx: &mut Ctx) -> AbstractValue {
        let v = self.eval_inner(e, env, ctx);
        self.record(e.id, &v);
        v
    }

    fn eval_inner(&mut self, e: &Expr, env: &mut Env, ctx: &mut Ctx) -> AbstractValue {
        match &e.kind {
            ExprKind::Str(s) => AbstractValue::literal(s.clone()),
            ExprKind::Number(n) => AbstractValue::Prim(n.clone()),
            ExprKind::Bool(b) => AbstractValue::Prim(b.to_string()),
            ExprKind::Null => AbstractValue::Prim("null".into()),
            ExprKind::Ident(name) => match env.get(name) {
                Some(v) => v.clone(),
                None if name == "undefined" => AbstractValue::undefined(),
                None => AbstractValue::unknown(name.clone()),
            },
            ExprKind::Binary { op: BinaryOp::Add, .. } => self.eval_concat_chain(e, env, ctx),
            ExprKind::Binary { op, lhs, rhs } => {
                let l = self.eval(lhs, env, ctx);
                let r = self.eval(rhs, env, ctx);
                match op {
                    // the result is one of the operands
                    BinaryOp::Or | BinaryOp::And | BinaryOp::Nullish => l.join(&r, &self.limits),
                    _ => AbstractValue::unknown(self.expr_name(e.id)),
                }
            }
            ExprKind::Member { object, property } => {
                let o = self.eval(object, env, ctx);
                o.field(property)
            }
            ExprKind::Index { object, key } => {
                let o = self.eval(object, env, ctx);
                let k = self.eval(key, env, ctx);
                match literal_key(&k) {
                    Some(k) => o.field(&k),
                    None => AbstractValue::unknown(self.expr_name(e.id)),
                }
            }
            ExprKind::Object(props) => {
                let mut fields = BTreeMap::new();
                for p in props {
                    let v = self.eval(&p.value, env, ctx);
                    fields.insert(p.key.clone(), v);
                }
                AbstractValue::Obj(fields)
            }
            ExprKind::Function(f) => AbstractValue::Func(f.id),
            ExprKind::Call { callee, args } => self.eval_call(callee, args, env, ctx),
            ExprKind::Assign { target, value } => {
                let v = self.eval(value, env, ctx);
                self.assign(target, v.clone(), env, ctx);
                v
            }
            ExprKind::Conditional { cond, then, otherwise } => {
                self.eval(cond, env, ctx);
                let mut then_env = env.clone();
                let a = self.eval(then, &mut then_env, ctx);
                let b = self.eval(otherwise, env, ctx);
                *env = self.join_env(&then_env, env);
                a.join(&b, &self.limits)
            }
            ExprKind::Opaque { children, .. } => {
                for c in children {
                    self.eval(c, env, ctx);
                }
                AbstractValue::unknown(self.expr_name(e.id))
            }
        }
    }

    /// Evaluates a left-nested `+` chain without recursing on its spine.
    fn eval_concat_chain(&mut self, e: &Expr, env: &mut Env, ctx: &mut Ctx) -> AbstractValue {
        let mut spine = Vec::new();
        let mut cur = e;
        while let ExprKind::Binary {
            op: BinaryOp::Add,
            lhs,
            ..
        } = &cur.kind
        {
            spine.push(cur);
            cur = lhs;
        }
        let mut acc = self.eval(cur, env, ctx);
        for (i, node) in spine.iter().rev().enumerate() {
            let ExprKind::Binary { rhs, .. } = &node.kind else { unreachable!() };
            let r = self.eval(rhs, env, ctx);
            acc = self.add(&acc, &r, node.id);
            // the outermost node is recorded by `eval`
            if i + 1 < spine.len() {
                self.record(node.id, &acc);
            }
        }
        acc
    }

    fn add(&mut self, l: &AbstractValue, r: &AbstractValue, id: NodeId) -> AbstractValue {
        let is_str = |v: &AbstractValue| matches!(v, AbstractValue::Str(_));
        let is_prim = |v: &AbstractValue| matches!(v, AbstractValue::Prim(_));
        if !is_str(l) && !is_str(r) && (is_prim(l) || is_prim(r)) {
            // numeric addition or unknown coercion
            return AbstractValue::unknown(self.expr_name(id));
        }
        let name = self.expr_name(id);
        let lp = l.to_patterns(&name);
        let rp = r.to_patterns(&name);
        AbstractValue::Str(lp.concat(&rp, &self.limits))
    }

    fn eval_call(&mut self, callee: &Expr, args: &[Expr], env: &mut Env, ctx: &mut Ctx) -> AbstractValue {
        let (receiver, callee_v) = match &callee.kind {
            ExprKind::Member { object, property } => {
                let o = self.eval(object, env, ctx);
                let f = o.field(property);
                self.record(callee.id, &f);
                (Some(o), f)
            }
            _ => (None, self.eval(callee, env, ctx)),
        };
        let arg_vs: Vec<AbstractValue> = args.iter().map(|a| self.eval(a, env, ctx)).collect();
        let name = callee.callee_name().unwrap_or("call").to_string();
        if let AbstractValue::Func(id) = callee_v {
            return self.invoke(id, &name, arg_vs, env, ctx);
        }
        self.builtin(&name, receiver.as_ref(), &arg_vs)
            .unwrap_or_else(|| AbstractValue::unknown(name))
    }

    fn builtin(&mut self, name: &str, receiver: Option<&AbstractValue>, args: &[AbstractValue]) -> Option<AbstractValue> {
        let limits = self.limits;
        let arg0 = || args.first().cloned().unwrap_or_else(AbstractValue::undefined);
        match (receiver, name) {
            (None, "encodeURIComponent") => Some(encoded(&arg0(), URI_COMPONENT, &limits)),
            (None, "encodeURI") => Some(encoded(&arg0(), URI, &limits)),
            (None, "String") => Some(AbstractValue::Str(arg0().to_patterns("String"))),
            (Some(AbstractValue::Str(s)), "toString" | "valueOf") => Some(AbstractValue::Str(s.clone())),
            (Some(AbstractValue::Prim(p)), "toString") => Some(AbstractValue::literal(p.clone())),
            (Some(AbstractValue::Str(s)), "concat") => {
                let mut acc = s.clone();
                for a in args {
                    acc = acc.concat(&a.to_patterns("concat"), &limits);
                }
                Some(AbstractValue::Str(acc))
            }
            (Some(AbstractValue::Str(s)), "toLowerCase") => {
                Some(AbstractValue::Str(s.map(|p| p.map_literals(str::to_lowercase), &limits)))
            }
            (Some(AbstractValue::Str(s)), "toUpperCase") => {
                Some(AbstractValue::Str(s.map(|p| p.map_literals(str::to_uppercase), &limits)))
            }
            _ => None,
        }
    }

    fn assign(&mut self, target: &Expr, v: AbstractValue, env: &mut Env, ctx: &mut Ctx) {
        let mut path = Vec::new();
        let mut cur = target;
        loop {
            match &cur.kind {
                ExprKind::Ident(_) => break,
                ExprKind::Member { object, property } => {
                    path.push(property.clone());
                    cur = object;
                }
                ExprKind::Index { object, key } => {
                    let k = self.eval(key, env, ctx);
                    match literal_key(&k) {
                        Some(k) => path.push(k),
                        None => {
                            self.eval(object, env, ctx);
                            return;
                        }
                    }
                    cur = object;
                }
                _ => {
                    self.eval(cur, env, ctx);
                    return;
                }
            }
        }
        let ExprKind::Ident(root) = &cur.kind else { return };
        path.reverse();
        self.record(target.id, &v);
        if path.is_empty() {
            env.insert(root.clone(), v);
            return;
        }
        fn set(slot: &mut AbstractValue, path: &[String], v: AbstractValue) {
            if !matches!(slot, AbstractValue::Obj(_)) {
                *slot = AbstractValue::Obj(BTreeMap::new());
            }
            let AbstractValue::Obj(fields) = slot else { unreachable!() };
            match path {
                [last] => {
                    fields.insert(last.clone(), v);
                }
                [first, rest @ ..] => {
                    let inner = fields
                        .entry(first.clone())
                        .or_insert_with(|| AbstractValue::Obj(BTreeMap::new()));
                    set(inner, rest, v);
                }
                [] => {}
            }
        }
        let slot = env
            .entry(root.clone())
            .or_insert_with(|| AbstractValue::Obj(BTreeMap::new()));
        set(slot, &path, v);
    }
}

fn literal_key(k: &AbstractValue) -> Option<String> {
    match k {
        AbstractValue::Str(s) => s.as_single_literal(),
        AbstractValue::Prim(p) => Some(p.clone()),
        _ => None,
    }
}

fn encoded(v: &AbstractValue, set: &'static AsciiSet, limits: &Limits) -> AbstractValue {
    let patterns: PatternSet = v.to_patterns("encoded");
    AbstractValue::Str(patterns.map(|p| p.map_literals(|s| utf8_percent_encode(s, set).to_string()), limits))
}

/// Variables and field paths a loop may assign, excluding nested functions.
#[derive(Default)]
struct Targets {
    paths: Vec<(String, Vec<String>)>,
}

impl Targets {
    fn add(&mut self, root: String, path: Vec<String>) {
        if !self.paths.iter().any(|(r, p)| *r == root && *p == path) {
            self.paths.push((root, path));
        }
    }

    fn stmt(&mut self, s: &Stmt) {
        match &s.kind {
            StmtKind::VarDecl { decls, .. } => {
                for d in decls {
                    self.add(d.name.clone(), Vec::new());
                    if let Some(i) = &d.init {
                        self.expr(i);
                    }
                }
            }
            StmtKind::Return(Some(e)) | StmtKind::Expr(e) => self.expr(e),
            StmtKind::If { cond, then, otherwise } => {
                self.expr(cond);
                self.stmt(then);
                if let Some(o) = otherwise {
                    self.stmt(o);
                }
            }
            StmtKind::While { cond, body } => {
                self.expr(cond);
                self.stmt(body);
            }
            StmtKind::For { init, cond, update, body } => {
                if let Some(i) = init {
                    self.stmt(i);
                }
                for e in cond.iter().chain(update.iter()) {
                    self.expr(e);
                }
                self.stmt(body);
            }
            StmtKind::Block(b) => {
                for s in b {
                    self.stmt(s);
                }
            }
            _ => {}
        }
    }

    fn expr(&mut self, e: &Expr) {
        if let ExprKind::Function(_) = e.kind {
            return;
        }
        if let ExprKind::Assign { target, .. } = &e.kind {
            let mut path = Vec::new();
            let mut cur = &**target;
            loop {
                match &cur.kind {
                    ExprKind::Ident(root) => {
                        path.reverse();
                        // widen the whole path and every prefix of it
                        for n in 0..=path.len() {
                            self.add(root.clone(), path[..n].to_vec());
                        }
                        break;
                    }
                    ExprKind::Member { object, property } => {
                        path.push(property.clone());
                        cur = object;
                    }
                    ExprKind::Index { object, .. } => {
                        // unknown key: widen the whole object
                        path.clear();
                        cur = object;
                    }
                    _ => break,
                }
            }
        }
        for c in e.children() {
            self.expr(c);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::source::ast::Visitor;
    use crate::source::parse;

    /// Patterns of the first argument of every call to `sink`.
    fn sink_args(src: &str) -> Vec<String> {
        let out = parse(src, "t.js");
        assert!(out.errors.is_empty(), "{:?}", out.errors);
        let flow = analyze(&out.program, &Limits::default());
        struct Sinks<'a>(Vec<&'a Expr>);
        impl<'a> Visitor<'a> for Sinks<'a> {
            fn expr(&mut self, e: &'a Expr) {
                if let ExprKind::Call { callee, args } = &e.kind {
                    if matches!(&callee.kind, ExprKind::Ident(n) if n == "sink") {
                        self.0.push(&args[0]);
                    }
                }
            }
        }
        let mut s = Sinks(Vec::new());
        walk_program(&out.program, &mut s);
        let mut got = Vec::new();
        for a in s.0 {
            match flow.value(a.id) {
                Some(v @ (AbstractValue::Str(_) | AbstractValue::Unknown(_))) => {
                    got.extend(v.to_patterns("?").iter().map(|p| p.to_string()))
                }
                Some(other) => got.push(format!("{other:?}")),
                None => got.push("<unanalyzed>".into()),
            }
        }
        got
    }

    #[test]
    fn parameter_becomes_symbolic() {
        let got = sink_args(
            r#"function getPictureForTag(tag) {
                 var url = "https://api.instagram.com/v1/tags/" + tag + "/media/recent";
                 sink(url);
               }"#,
        );
        assert_eq!(got, vec!["https://api.instagram.com/v1/tags/{tag}/media/recent"]);
    }

    #[test]
    fn call_site_cloning_keeps_contexts_apart() {
        let got = sink_args(
            r#"function send(u) { sink(u); }
               send("/a");
               send("/b");"#,
        );
        assert_eq!(got, vec!["/a", "/b"]);
    }

    #[test]
    fn value_flows_through_object_and_helper() {
        let got = sink_args(
            r#"function get(tag) {
                 var settings = { url: "/tags/" + tag, type: "GET" };
                 send(settings);
               }
               function send(s) { sink(s.url); }"#,
        );
        assert_eq!(got, vec!["/tags/{tag}"]);
    }

    #[test]
    fn branches_join() {
        let got = sink_args(
            r#"var u = "https://h/";
               if (x) { u = u + "a"; } else { u = u + "b"; }
               sink(u);"#,
        );
        assert_eq!(got, vec!["https://h/a", "https://h/b"]);
    }

    #[test]
    fn conditional_joins_both_arms() {
        assert_eq!(sink_args("sink(c ? \"/x\" : \"/y\");"), vec!["/x", "/y"]);
    }

    #[test]
    fn loop_widens_assigned_variables() {
        let got = sink_args(
            r#"var u = "/p";
               for (var i = 0; i < n; i = i + 1) { u = u + "/x"; }
               sink(u);"#,
        );
        assert_eq!(got, vec!["/p", "/p/x", "{u}", "{u}/x"]);
    }

    #[test]
    fn recursion_is_bounded() {
        let got = sink_args(
            r#"function f(u) { sink(u); f(u + "/x"); }
               f("/a");"#,
        );
        assert!(got.contains(&"/a".to_string()));
        assert!(got.contains(&"{u}".to_string()));
    }

    #[test]
    fn depth_limit_falls_back_to_unknown_parameters() {
        let got = sink_args(
            r#"function a(x) { b(x + "1"); }
               function b(x) { c(x + "2"); }
               function c(x) { d(x + "3"); }
               function d(x) { sink(x); }
               a("/");"#,
        );
        assert!(got.contains(&"{x}".to_string()), "{got:?}");
    }

    #[test]
    fn unknown_callee_result_is_named_after_callee() {
        assert_eq!(sink_args("sink(\"/u/\" + getUser());"), vec!["/u/{getUser}"]);
        assert_eq!(sink_args("sink(\"/u/\" + api.base);"), vec!["/u/{base}"]);
    }

    #[test]
    fn closures_see_enclosing_locals() {
        let got = sink_args(
            r##"function outer(id) {
                 var base = "/items/" + id;
                 $("#b").click(function () { sink(base + "/buy"); });
               }"##,
        );
        assert_eq!(got, vec!["/items/{id}/buy"]);
    }

    #[test]
    fn encode_uri_component_encodes_literals_only() {
        assert_eq!(
            sink_args("sink(\"/q?x=\" + encodeURIComponent(\"a b\") + encodeURIComponent(v));"),
            vec!["/q?x=a%20b{v}"]
        );
    }

    #[test]
    fn member_assignment_builds_objects() {
        let got = sink_args(
            r#"var s = {};
               s.url = "/a";
               s.data = {};
               s.data.q = "1";
               sink(s.url + "?q=" + s.data.q);"#,
        );
        assert_eq!(got, vec!["/a?q=1"]);
    }

    #[test]
    fn numeric_addition_is_not_concatenation() {
        let got = sink_args("sink(\"/p/\" + (1 + 2));");
        assert_eq!(got.len(), 1);
        assert!(got[0].starts_with("/p/{expr"), "{got:?}");
    }

    #[test]
    fn caller_order_does_not_matter() {
        let got = sink_args(
            r#"function send(s) { sink(s.url); }
               function get(tag) { send({ url: "/tags/" + tag }); }"#,
        );
        assert_eq!(got, vec!["/tags/{tag}"]);
    }
}
