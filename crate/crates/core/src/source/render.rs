//! Pretty-printer producing source text that parses back to the same tree.

use std::fmt::Write as _;

use super::ast::*;

const ASSIGN: u8 = 0;
const POSTFIX: u8 = 13;

pub fn render(program: &Program) -> String {
    let mut out = String::new();
    for s in &program.body {
        stmt(s, 0, &mut out);
    }
    out
}

pub fn render_expr(e: &Expr) -> String {
    let mut out = String::new();
    expr(e, ASSIGN, &mut out);
    out
}

fn indent(level: usize, out: &mut String) {
    for _ in 0..level {
        out.push_str("  ");
    }
}

fn stmt(s: &Stmt, level: usize, out: &mut String) {
    indent(level, out);
    stmt_inline(s, level, out);
    out.push('\n');
}

/// Renders a statement without leading indentation or trailing newline.
fn stmt_inline(s: &Stmt, level: usize, out: &mut String) {
    match &s.kind {
        StmtKind::VarDecl { kind, decls } => {
            var_decl(*kind, decls, out);
            out.push(';');
        }
        StmtKind::FunctionDecl(f) => function(f, level, out),
        StmtKind::Return(None) => out.push_str("return;"),
        StmtKind::Return(Some(e)) => {
            out.push_str("return ");
            expr(e, ASSIGN, out);
            out.push(';');
        }
        StmtKind::If { cond, then, otherwise } => {
            out.push_str("if (");
            expr(cond, ASSIGN, out);
            out.push_str(") ");
            let dangling = otherwise.is_some() && matches!(then.kind, StmtKind::If { otherwise: None, .. });
            if dangling {
                block(std::slice::from_ref(&**then), level, out);
            } else {
                body(then, level, out);
            }
            if let Some(o) = otherwise {
                out.push_str(" else ");
                body(o, level, out);
            }
        }
        StmtKind::While { cond, body: b } => {
            out.push_str("while (");
            expr(cond, ASSIGN, out);
            out.push_str(") ");
            body(b, level, out);
        }
        StmtKind::For { init, cond, update, body: b } => {
            out.push_str("for (");
            if let Some(i) = init {
                match &i.kind {
                    StmtKind::VarDecl { kind, decls } => var_decl(*kind, decls, out),
                    StmtKind::Expr(e) => expr(e, ASSIGN, out),
                    _ => {}
                }
            }
            out.push_str("; ");
            if let Some(c) = cond {
                expr(c, ASSIGN, out);
            }
            out.push_str("; ");
            if let Some(u) = update {
                expr(u, ASSIGN, out);
            }
            out.push_str(") ");
            body(b, level, out);
        }
        StmtKind::Block(stmts) => block(stmts, level, out),
        StmtKind::Expr(e) => {
            let mut text = String::new();
            expr(e, ASSIGN, &mut text);
            if text.starts_with('{') || text.starts_with("function") {
                let _ = write!(out, "({text});");
            } else {
                out.push_str(&text);
                out.push(';');
            }
        }
        StmtKind::Empty => out.push(';'),
        StmtKind::Opaque(text) => out.push_str(text),
    }
}

fn body(s: &Stmt, level: usize, out: &mut String) {
    if let StmtKind::Block(stmts) = &s.kind {
        block(stmts, level, out);
    } else {
        stmt_inline(s, level, out);
    }
}

fn block(stmts: &[Stmt], level: usize, out: &mut String) {
    if stmts.is_empty() {
        out.push_str("{}");
        return;
    }
    out.push_str("{\n");
    for s in stmts {
        stmt(s, level + 1, out);
    }
    indent(level, out);
    out.push('}');
}

fn var_decl(kind: DeclKind, decls: &[Declarator], out: &mut String) {
    out.push_str(kind.as_str());
    for (i, d) in decls.iter().enumerate() {
        out.push_str(if i == 0 { " " } else { ", " });
        out.push_str(&d.name);
        if let Some(init) = &d.init {
            out.push_str(" = ");
            expr(init, ASSIGN, out);
        }
    }
}

fn function(f: &Function, level: usize, out: &mut String) {
    out.push_str("function");
    if let Some(n) = &f.name {
        out.push(' ');
        out.push_str(n);
    }
    let _ = write!(out, "({}) ", f.params.join(", "));
    block(&f.body, level, out);
}

pub fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 || c == '\u{2028}' || c == '\u{2029}' => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn paren_if(cond: bool, out: &mut String, f: impl FnOnce(&mut String)) {
    if cond {
        out.push('(');
    }
    f(out);
    if cond {
        out.push(')');
    }
}

/// Renders `e` in a context that binds at strength `ctx`, adding
/// parentheses when `e` binds more loosely.
fn expr(e: &Expr, ctx: u8, out: &mut String) {
    match &e.kind {
        ExprKind::Str(s) => out.push_str(&quote(s)),
        ExprKind::Number(n) => out.push_str(n),
        ExprKind::Bool(b) => {
            let _ = write!(out, "{b}");
        }
        ExprKind::Null => out.push_str("null"),
        ExprKind::Ident(n) => out.push_str(n),
        ExprKind::Binary { op, lhs, rhs } => {
            let p = op.precedence();
            paren_if(p < ctx, out, |out| {
                let (lp, rp) = if *op == BinaryOp::Pow { (p + 1, p) } else { (p, p + 1) };
                expr(lhs, lp, out);
                let _ = write!(out, " {} ", op.as_str());
                expr(rhs, rp, out);
            });
        }
        ExprKind::Member { object, property } => {
            object_position(object, out);
            out.push('.');
            out.push_str(property);
        }
        ExprKind::Index { object, key } => {
            object_position(object, out);
            out.push('[');
            expr(key, ASSIGN, out);
            out.push(']');
        }
        ExprKind::Call { callee, args } => {
            object_position(callee, out);
            out.push('(');
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                expr(a, ASSIGN, out);
            }
            out.push(')');
        }
        ExprKind::Object(props) => {
            if props.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push_str("{ ");
            for (i, p) in props.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                let _ = write!(out, "{}: ", quote(&p.key));
                expr(&p.value, ASSIGN, out);
            }
            out.push_str(" }");
        }
        ExprKind::Function(f) => paren_if(ctx > ASSIGN, out, |out| function(f, 0, out)),
        ExprKind::Assign { target, value } => paren_if(ctx > ASSIGN, out, |out| {
            expr(target, POSTFIX, out);
            out.push_str(" = ");
            expr(value, ASSIGN, out);
        }),
        ExprKind::Conditional { cond, then, otherwise } => paren_if(ctx > ASSIGN, out, |out| {
            // the condition binds tighter than any binary operator
            expr(cond, 1, out);
            out.push_str(" ? ");
            expr(then, ASSIGN, out);
            out.push_str(" : ");
            expr(otherwise, ASSIGN, out);
        }),
        ExprKind::Opaque { text, .. } => {
            let _ = write!(out, "({text})");
        }
    }
}

fn object_position(e: &Expr, out: &mut String) {
    let wrap = matches!(
        e.kind,
        ExprKind::Number(_) | ExprKind::Object(_) | ExprKind::Function(_)
    );
    if wrap {
        out.push('(');
        expr(e, ASSIGN, out);
        out.push(')');
    } else {
        expr(e, POSTFIX, out);
    }
}
