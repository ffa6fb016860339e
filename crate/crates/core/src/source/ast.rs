//! Syntax tree for the supported JavaScript subset.
//!
//! Template literals never appear here: the parser lowers them to `+`
//! chains. Constructs outside the subset become [`ExprKind::Opaque`] or
//! [`StmtKind::Opaque`], keeping any parseable sub-expressions as children.

use std::fmt::Write as _;

use super::span::SourceSpan;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

#[derive(Debug, Clone)]
pub struct Program {
    pub body: Vec<Stmt>,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeclKind {
    Var,
    Let,
    Const,
}

impl DeclKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DeclKind::Var => "var",
            DeclKind::Let => "let",
            DeclKind::Const => "const",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Declarator {
    pub name: String,
    pub init: Option<Expr>,
    pub span: SourceSpan,
}

#[derive(Debug, Clone)]
pub struct Stmt {
    pub kind: StmtKind,
    pub span: SourceSpan,
}

#[derive(Debug, Clone)]
pub enum StmtKind {
    VarDecl {
        kind: DeclKind,
        decls: Vec<Declarator>,
    },
    FunctionDecl(Box<Function>),
    Return(Option<Expr>),
    If {
        cond: Expr,
        then: Box<Stmt>,
        otherwise: Option<Box<Stmt>>,
    },
    While {
        cond: Expr,
        body: Box<Stmt>,
    },
    For {
        init: Option<Box<Stmt>>,
        cond: Option<Expr>,
        update: Option<Expr>,
        body: Box<Stmt>,
    },
    Block(Vec<Stmt>),
    Expr(Expr),
    Empty,
    /// Source text of a statement outside the subset.
    Opaque(String),
}

/// A function declaration, function expression, or arrow function.
#[derive(Debug, Clone)]
pub struct Function {
    pub id: NodeId,
    pub name: Option<String>,
    pub params: Vec<String>,
    pub body: Vec<Stmt>,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    Pow,
    Eq,
    NotEq,
    StrictEq,
    StrictNotEq,
    Lt,
    Gt,
    Le,
    Ge,
    And,
    Or,
    Nullish,
    BitAnd,
    BitOr,
    BitXor,
    Shl,
    Shr,
    UShr,
    In,
    InstanceOf,
}

impl BinaryOp {
    pub fn from_token(s: &str) -> Option<BinaryOp> {
        use BinaryOp::*;
        Some(match s {
            "+" => Add,
            "-" => Sub,
            "*" => Mul,
            "/" => Div,
            "%" => Mod,
            "**" => Pow,
            "==" => Eq,
            "!=" => NotEq,
            "===" => StrictEq,
            "!==" => StrictNotEq,
            "<" => Lt,
            ">" => Gt,
            "<=" => Le,
            ">=" => Ge,
            "&&" => And,
            "||" => Or,
            "??" => Nullish,
            "&" => BitAnd,
            "|" => BitOr,
            "^" => BitXor,
            "<<" => Shl,
            ">>" => Shr,
            ">>>" => UShr,
            "in" => In,
            "instanceof" => InstanceOf,
            _ => return None,
        })
    }

    pub fn as_str(self) -> &'static str {
        use BinaryOp::*;
        match self {
            Add => "+",
            Sub => "-",
            Mul => "*",
            Div => "/",
            Mod => "%",
            Pow => "**",
            Eq => "==",
            NotEq => "!=",
            StrictEq => "===",
            StrictNotEq => "!==",
            Lt => "<",
            Gt => ">",
            Le => "<=",
            Ge => ">=",
            And => "&&",
            Or => "||",
            Nullish => "??",
            BitAnd => "&",
            BitOr => "|",
            BitXor => "^",
            Shl => "<<",
            Shr => ">>",
            UShr => ">>>",
            In => "in",
            InstanceOf => "instanceof",
        }
    }

    /// Binding strength; higher binds tighter. All levels are left-associative
    /// except `**`.
    pub fn precedence(self) -> u8 {
        use BinaryOp::*;
        match self {
            Nullish | Or => 1,
            And => 2,
            BitOr => 3,
            BitXor => 4,
            BitAnd => 5,
            Eq | NotEq | StrictEq | StrictNotEq => 6,
            Lt | Gt | Le | Ge | In | InstanceOf => 7,
            Shl | Shr | UShr => 8,
            Add | Sub => 9,
            Mul | Div | Mod => 10,
            Pow => 11,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Property {
    pub key: String,
    pub value: Expr,
    pub span: SourceSpan,
}

#[derive(Debug, Clone)]
pub struct Expr {
    pub id: NodeId,
    pub kind: ExprKind,
    pub span: SourceSpan,
}

#[derive(Debug, Clone)]
pub enum ExprKind {
    Str(String),
    /// Canonical text of the number.
    Number(String),
    Bool(bool),
    Null,
    Ident(String),
    Binary {
        op: BinaryOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Member {
        object: Box<Expr>,
        property: String,
    },
    Index {
        object: Box<Expr>,
        key: Box<Expr>,
    },
    Object(Vec<Property>),
    Call {
        callee: Box<Expr>,
        args: Vec<Expr>,
    },
    Function(Box<Function>),
    Assign {
        target: Box<Expr>,
        value: Box<Expr>,
    },
    /// `cond ? then : otherwise`
    Conditional {
        cond: Box<Expr>,
        then: Box<Expr>,
        otherwise: Box<Expr>,
    },
    /// Source text of an expression outside the subset, with the
    /// sub-expressions that could still be parsed.
    Opaque {
        text: String,
        children: Vec<Expr>,
    },
}

impl Expr {
    /// Identifier name, or the property name of a member access.
    pub fn callee_name(&self) -> Option<&str> {
        match &self.kind {
            ExprKind::Ident(n) => Some(n),
            ExprKind::Member { property, .. } => Some(property),
            _ => None,
        }
    }

    /// Direct sub-expressions in source order. Function bodies are not
    /// included; see [`walk_program`].
    pub fn children(&self) -> Vec<&Expr> {
        match &self.kind {
            ExprKind::Str(_)
            | ExprKind::Number(_)
            | ExprKind::Bool(_)
            | ExprKind::Null
            | ExprKind::Ident(_)
            | ExprKind::Function(_) => Vec::new(),
            ExprKind::Binary { lhs, rhs, .. } => vec![lhs, rhs],
            ExprKind::Member { object, .. } => vec![object],
            ExprKind::Index { object, key } => vec![object, key],
            ExprKind::Object(props) => props.iter().map(|p| &p.value).collect(),
            ExprKind::Call { callee, args } => std::iter::once(&**callee).chain(args.iter()).collect(),
            ExprKind::Assign { target, value } => vec![target, value],
            ExprKind::Conditional { cond, then, otherwise } => vec![cond, then, otherwise],
            ExprKind::Opaque { children, .. } => children.iter().collect(),
        }
    }

    /// Span- and id-free rendering of the tree shape, for structural comparison.
    pub fn shape(&self) -> String {
        let mut out = String::new();
        shape_expr(self, &mut out);
        out
    }
}

impl Program {
    pub fn shape(&self) -> String {
        let mut out = String::new();
        for s in &self.body {
            shape_stmt(s, &mut out);
            out.push('\n');
        }
        out
    }
}

/// Visitor over every statement, expression, and function in a program,
/// in source order (pre-order).
pub trait Visitor<'a> {
    fn expr(&mut self, _expr: &'a Expr) {}
    fn stmt(&mut self, _stmt: &'a Stmt) {}
    fn function(&mut self, _func: &'a Function) {}
}

pub fn walk_program<'a>(program: &'a Program, v: &mut impl Visitor<'a>) {
    for s in &program.body {
        walk_stmt(s, v);
    }
}

pub fn walk_stmt<'a>(stmt: &'a Stmt, v: &mut impl Visitor<'a>) {
    v.stmt(stmt);
    match &stmt.kind {
        StmtKind::VarDecl { decls, .. } => {
            for d in decls {
                if let Some(init) = &d.init {
                    walk_expr(init, v);
                }
            }
        }
        StmtKind::FunctionDecl(f) => walk_function(f, v),
        StmtKind::Return(e) => {
            if let Some(e) = e {
                walk_expr(e, v);
            }
        }
        StmtKind::If { cond, then, otherwise } => {
            walk_expr(cond, v);
            walk_stmt(then, v);
            if let Some(o) = otherwise {
                walk_stmt(o, v);
            }
        }
        StmtKind::While { cond, body } => {
            walk_expr(cond, v);
            walk_stmt(body, v);
        }
        StmtKind::For { init, cond, update, body } => {
            if let Some(i) = init {
                walk_stmt(i, v);
            }
            if let Some(c) = cond {
                walk_expr(c, v);
            }
            if let Some(u) = update {
                walk_expr(u, v);
            }
            walk_stmt(body, v);
        }
        StmtKind::Block(stmts) => {
            for s in stmts {
                walk_stmt(s, v);
            }
        }
        StmtKind::Expr(e) => walk_expr(e, v),
        StmtKind::Empty | StmtKind::Opaque(_) => {}
    }
}

pub fn walk_function<'a>(func: &'a Function, v: &mut impl Visitor<'a>) {
    v.function(func);
    for s in &func.body {
        walk_stmt(s, v);
    }
}

pub fn walk_expr<'a>(expr: &'a Expr, v: &mut impl Visitor<'a>) {
    v.expr(expr);
    if let ExprKind::Function(f) = &expr.kind {
        walk_function(f, v);
        return;
    }
    for c in expr.children() {
        walk_expr(c, v);
    }
}

fn shape_stmt(stmt: &Stmt, out: &mut String) {
    match &stmt.kind {
        StmtKind::VarDecl { kind, decls } => {
            let _ = write!(out, "({}", kind.as_str());
            for d in decls {
                let _ = write!(out, " [{}", d.name);
                if let Some(i) = &d.init {
                    out.push(' ');
                    shape_expr(i, out);
                }
                out.push(']');
            }
            out.push(')');
        }
        StmtKind::FunctionDecl(f) => shape_function(f, out),
        StmtKind::Return(e) => {
            out.push_str("(return");
            if let Some(e) = e {
                out.push(' ');
                shape_expr(e, out);
            }
            out.push(')');
        }
        StmtKind::If { cond, then, otherwise } => {
            out.push_str("(if ");
            shape_expr(cond, out);
            out.push(' ');
            shape_stmt(then, out);
            if let Some(o) = otherwise {
                out.push(' ');
                shape_stmt(o, out);
            }
            out.push(')');
        }
        StmtKind::While { cond, body } => {
            out.push_str("(while ");
            shape_expr(cond, out);
            out.push(' ');
            shape_stmt(body, out);
            out.push(')');
        }
        StmtKind::For { init, cond, update, body } => {
            out.push_str("(for ");
            match init {
                Some(i) => shape_stmt(i, out),
                None => out.push('_'),
            }
            out.push(' ');
            match cond {
                Some(c) => shape_expr(c, out),
                None => out.push('_'),
            }
            out.push(' ');
            match update {
                Some(u) => shape_expr(u, out),
                None => out.push('_'),
            }
            out.push(' ');
            shape_stmt(body, out);
            out.push(')');
        }
        StmtKind::Block(stmts) => {
            out.push_str("(block");
            for s in stmts {
                out.push(' ');
                shape_stmt(s, out);
            }
            out.push(')');
        }
        StmtKind::Expr(e) => {
            out.push_str("(expr ");
            shape_expr(e, out);
            out.push(')');
        }
        StmtKind::Empty => out.push_str("(empty)"),
        StmtKind::Opaque(text) => {
            let _ = write!(out, "(opaque-stmt {text:?})");
        }
    }
}

fn shape_function(f: &Function, out: &mut String) {
    let _ = write!(
        out,
        "(function {} [{}]",
        f.name.as_deref().unwrap_or("_"),
        f.params.join(" ")
    );
    for s in &f.body {
        out.push(' ');
        shape_stmt(s, out);
    }
    out.push(')');
}

fn shape_expr(e: &Expr, out: &mut String) {
    match &e.kind {
        ExprKind::Str(s) => {
            let _ = write!(out, "{s:?}");
        }
        ExprKind::Number(n) => out.push_str(n),
        ExprKind::Bool(b) => {
            let _ = write!(out, "{b}");
        }
        ExprKind::Null => out.push_str("null"),
        ExprKind::Ident(n) => {
            let _ = write!(out, "${n}");
        }
        ExprKind::Binary { op, lhs, rhs } => {
            let _ = write!(out, "({} ", op.as_str());
            shape_expr(lhs, out);
            out.push(' ');
            shape_expr(rhs, out);
            out.push(')');
        }
        ExprKind::Member { object, property } => {
            out.push_str("(. ");
            shape_expr(object, out);
            let _ = write!(out, " {property})");
        }
        ExprKind::Index { object, key } => {
            out.push_str("([] ");
            shape_expr(object, out);
            out.push(' ');
            shape_expr(key, out);
            out.push(')');
        }
        ExprKind::Object(props) => {
            out.push_str("(obj");
            for p in props {
                let _ = write!(out, " [{:?} ", p.key);
                shape_expr(&p.value, out);
                out.push(']');
            }
            out.push(')');
        }
        ExprKind::Call { callee, args } => {
            out.push_str("(call ");
            shape_expr(callee, out);
            for a in args {
                out.push(' ');
                shape_expr(a, out);
            }
            out.push(')');
        }
        ExprKind::Function(f) => shape_function(f, out),
        ExprKind::Assign { target, value } => {
            out.push_str("(= ");
            shape_expr(target, out);
            out.push(' ');
            shape_expr(value, out);
            out.push(')');
        }
        ExprKind::Conditional { cond, then, otherwise } => {
            out.push_str("(? ");
            shape_expr(cond, out);
            out.push(' ');
            shape_expr(then, out);
            out.push(' ');
            shape_expr(otherwise, out);
            out.push(')');
        }
        ExprKind::Opaque { text, .. } => {
            let _ = write!(out, "(opaque {text:?})");
        }
    }
}
