//! Front end for the JavaScript subset: lexer, parser, syntax tree and a
//! round-tripping renderer. See `docs/grammar.md` for the accepted grammar.

pub mod ast;
pub mod lexer;
mod parser;
mod render;
pub mod span;

pub use ast::{Expr, ExprKind, Function, NodeId, Program, Stmt, StmtKind};
pub use lexer::{tokenize, LexError, LexErrorKind, Token, TokenKind};
pub use parser::{parse, ParseOutput, SyntaxError};
pub use render::{quote, render, render_expr};
pub use span::{Position, SourceSpan};

#[cfg(test)]
mod properties {
    use std::sync::Arc;

    use proptest::prelude::*;

    use super::ast::*;
    use super::*;

    fn dummy_span() -> SourceSpan {
        SourceSpan::new(Arc::from("gen"), Position::START, Position::START)
    }

    fn mk(kind: ExprKind) -> Expr {
        Expr {
            id: NodeId(0),
            kind,
            span: dummy_span(),
        }
    }

    fn ident() -> impl Strategy<Value = String> {
        prop::sample::select(vec!["a", "b", "url", "data", "x1", "$", "_t"]).prop_map(str::to_string)
    }

    fn binop() -> impl Strategy<Value = BinaryOp> {
        prop::sample::select(vec![
            BinaryOp::Add,
            BinaryOp::Sub,
            BinaryOp::Mul,
            BinaryOp::Pow,
            BinaryOp::StrictEq,
            BinaryOp::Lt,
            BinaryOp::And,
            BinaryOp::Or,
            BinaryOp::BitOr,
            BinaryOp::Shl,
        ])
    }

    fn expr_strategy() -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![
            "[ -~]{0,6}".prop_map(|s| mk(ExprKind::Str(s))),
            (0u32..1000).prop_map(|n| mk(ExprKind::Number(n.to_string()))),
            any::<bool>().prop_map(|b| mk(ExprKind::Bool(b))),
            Just(mk(ExprKind::Null)),
            ident().prop_map(|n| mk(ExprKind::Ident(n))),
        ];
        leaf.prop_recursive(5, 48, 4, |inner| {
            prop_oneof![
                (binop(), inner.clone(), inner.clone()).prop_map(|(op, l, r)| mk(ExprKind::Binary {
                    op,
                    lhs: Box::new(l),
                    rhs: Box::new(r)
                })),
                (inner.clone(), ident()).prop_map(|(o, p)| mk(ExprKind::Member {
                    object: Box::new(o),
                    property: p
                })),
                (inner.clone(), inner.clone()).prop_map(|(o, k)| mk(ExprKind::Index {
                    object: Box::new(o),
                    key: Box::new(k)
                })),
                (inner.clone(), prop::collection::vec(inner.clone(), 0..3)).prop_map(|(c, args)| mk(ExprKind::Call {
                    callee: Box::new(c),
                    args
                })),
                prop::collection::btree_map(ident(), inner.clone(), 0..3).prop_map(|m| mk(ExprKind::Object(
                    m.into_iter()
                        .map(|(key, value)| Property {
                            key,
                            value,
                            span: dummy_span()
                        })
                        .collect()
                ))),
                (inner.clone(), inner.clone(), inner.clone()).prop_map(|(c, t, o)| mk(ExprKind::Conditional {
                    cond: Box::new(c),
                    then: Box::new(t),
                    otherwise: Box::new(o)
                })),
                (ident(), inner.clone()).prop_map(|(t, v)| mk(ExprKind::Assign {
                    target: Box::new(mk(ExprKind::Ident(t))),
                    value: Box::new(v)
                })),
                (prop::collection::vec(ident(), 0..3), inner.clone()).prop_map(|(params, r)| {
                    let span = dummy_span();
                    mk(ExprKind::Function(Box::new(Function {
                        id: NodeId(0),
                        name: None,
                        params,
                        body: vec![Stmt {
                            kind: StmtKind::Return(Some(r)),
                            span: span.clone(),
                        }],
                        span,
                    })))
                }),
            ]
        })
    }

    fn stmt_strategy() -> impl Strategy<Value = Stmt> {
        let s = |kind| Stmt {
            kind,
            span: dummy_span(),
        };
        let simple = prop_oneof![
            expr_strategy().prop_map(move |e| s(StmtKind::Expr(e))),
            (ident(), proptest::option::of(expr_strategy())).prop_map(move |(name, init)| s(StmtKind::VarDecl {
                kind: DeclKind::Var,
                decls: vec![Declarator {
                    name,
                    init,
                    span: dummy_span()
                }]
            })),
            proptest::option::of(expr_strategy()).prop_map(move |e| s(StmtKind::Return(e))),
        ];
        simple.prop_recursive(3, 16, 3, move |inner| {
            prop_oneof![
                prop::collection::vec(inner.clone(), 0..3).prop_map(move |b| s(StmtKind::Block(b))),
                (expr_strategy(), inner.clone(), proptest::option::of(inner.clone())).prop_map(move |(c, t, o)| s(
                    StmtKind::If {
                        cond: c,
                        then: Box::new(s(StmtKind::Block(vec![t]))),
                        otherwise: o.map(|o| Box::new(s(StmtKind::Block(vec![o]))))
                    }
                )),
                (expr_strategy(), inner.clone()).prop_map(move |(c, b)| s(StmtKind::While {
                    cond: c,
                    body: Box::new(s(StmtKind::Block(vec![b])))
                })),
            ]
        })
    }

    fn program_strategy() -> impl Strategy<Value = Program> {
        prop::collection::vec(stmt_strategy(), 0..5).prop_map(|body| Program {
            body,
            span: dummy_span(),
        })
    }

    struct Containment {
        stack_ok: bool,
    }

    fn check_expr(e: &Expr, parent: &SourceSpan, ok: &mut Containment) {
        if !parent.contains(&e.span) {
            ok.stack_ok = false;
        }
        if let ExprKind::Function(f) = &e.kind {
            if !e.span.contains(&f.span) {
                ok.stack_ok = false;
            }
            for s in &f.body {
                check_stmt(s, &f.span, ok);
            }
        }
        for c in e.children() {
            check_expr(c, &e.span, ok);
        }
    }

    fn check_stmt(s: &Stmt, parent: &SourceSpan, ok: &mut Containment) {
        if !parent.contains(&s.span) {
            ok.stack_ok = false;
        }
        let sp = &s.span;
        match &s.kind {
            StmtKind::VarDecl { decls, .. } => {
                for d in decls {
                    if !sp.contains(&d.span) {
                        ok.stack_ok = false;
                    }
                    if let Some(i) = &d.init {
                        check_expr(i, &d.span, ok);
                    }
                }
            }
            StmtKind::FunctionDecl(f) => {
                for b in &f.body {
                    check_stmt(b, &f.span, ok);
                }
            }
            StmtKind::Return(Some(e)) | StmtKind::Expr(e) => check_expr(e, sp, ok),
            StmtKind::If { cond, then, otherwise } => {
                check_expr(cond, sp, ok);
                check_stmt(then, sp, ok);
                if let Some(o) = otherwise {
                    check_stmt(o, sp, ok);
                }
            }
            StmtKind::While { cond, body } => {
                check_expr(cond, sp, ok);
                check_stmt(body, sp, ok);
            }
            StmtKind::For { init, cond, update, body } => {
                if let Some(i) = init {
                    check_stmt(i, sp, ok);
                }
                for e in cond.iter().chain(update.iter()) {
                    check_expr(e, sp, ok);
                }
                check_stmt(body, sp, ok);
            }
            StmtKind::Block(b) => {
                for x in b {
                    check_stmt(x, sp, ok);
                }
            }
            _ => {}
        }
    }

    proptest! {
        #[test]
        fn render_then_parse_preserves_shape(p in program_strategy()) {
            let text = render(&p);
            let out = parse(&text, "rt.js");
            prop_assert!(out.errors.is_empty(), "rendered:\n{}\nerrors: {:?}", text, out.errors);
            prop_assert_eq!(out.program.shape(), p.shape(), "rendered:\n{}", text);
        }

        #[test]
        fn child_spans_nest_inside_parents(p in program_strategy()) {
            let text = render(&p);
            let out = parse(&text, "sp.js");
            let mut ok = Containment { stack_ok: true };
            for s in &out.program.body {
                check_stmt(s, &out.program.span, &mut ok);
            }
            prop_assert!(ok.stack_ok, "rendered:\n{}", text);
        }

        #[test]
        fn parsing_is_total(src in "[ -~\n]{0,200}") {
            let _ = parse(&src, "any.js");
        }

        #[test]
        fn parsing_js_like_noise_is_total(parts in prop::collection::vec(prop::sample::select(vec![
            "function", "(", ")", "{", "}", "var", "x", "=", "\"s\"", "+", ";", "`a${", "}`", "$.ajax", ".", ",",
            ":", "return", "if", "else", "\n", "=>", "[", "]", "for", "while", "1", "?", "'", "/*",
        ]), 0..60)) {
            let src = parts.join(" ");
            let _ = parse(&src, "noise.js");
        }
    }
}
