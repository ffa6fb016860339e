use std::fmt;
use std::sync::Arc;

use super::ast::*;
use super::lexer::{tokenize_partial, Keyword, LexError, TemplatePart, Token, TokenKind};
use super::span::{Position, SourceSpan};

/// Combined statement and expression nesting limit.
const MAX_DEPTH: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntaxError {
    pub message: String,
    pub span: SourceSpan,
    /// What the parser was looking for, e.g. "`;`".
    pub expected: Option<String>,
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.span, self.message)
    }
}

impl std::error::Error for SyntaxError {}

impl From<LexError> for SyntaxError {
    fn from(e: LexError) -> Self {
        SyntaxError {
            message: e.kind.to_string(),
            span: e.span,
            expected: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ParseOutput {
    pub program: Program,
    pub errors: Vec<SyntaxError>,
}

/// Parses a source file. Never fails: syntax errors are collected and the
/// parser resynchronizes at the next `;` or `}`.
pub fn parse(source: &str, file: &str) -> ParseOutput {
    let file: Arc<str> = Arc::from(file);
    let (tokens, lex_error) = tokenize_partial(source, file.clone());
    let eof = end_position(source);
    let mut parser = Parser {
        source,
        tokens,
        pos: 0,

        next_id: 0,
        errors: Vec::new(),
        depth: 0,
        eof: SourceSpan::new(file.clone(), eof, eof),
    };
    let body = parser.statement_list(false);
    let mut errors = parser.errors;
    if let Some(e) = lex_error {
        // the token stream stops at the lexical error; anything the parser
        // reports from there on is a consequence of it
        errors.retain(|p| p.span.start() < e.span.start());
        errors.push(e.into());
    }
    errors.sort_by_key(|e| e.span.start());
    ParseOutput {
        program: Program {
            body,
            span: SourceSpan::new(file, Position::START, eof),
        },
        errors,
    }
}

fn end_position(source: &str) -> Position {
    let mut pos = Position::START;
    let mut chars = source.chars().peekable();
    while let Some(c) = chars.next() {
        if c == '\n' || (c == '\r' && chars.peek() != Some(&'\n')) || c == '\u{2028}' || c == '\u{2029}' {
            pos.line += 1;
            pos.col = 1;
        } else {
            pos.col += 1;
        }
    }
    pos
}

type PResult<T> = Result<T, SyntaxError>;

struct Parser<'s> {
    source: &'s str,
    tokens: Vec<Token>,
    pos: usize,
    next_id: u32,
    errors: Vec<SyntaxError>,
    depth: usize,
    eof: SourceSpan,
}

impl<'s> Parser<'s> {
    // ---- token helpers ----

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn peek_at(&self, n: usize) -> Option<&Token> {
        self.tokens.get(self.pos + n)
    }

    fn at_punct(&self, p: &str) -> bool {
        self.peek().is_some_and(|t| t.is_punct(p))
    }

    fn at_keyword(&self, k: Keyword) -> bool {
        self.peek().is_some_and(|t| t.is_keyword(k))
    }

    fn at_ident(&self, name: &str) -> bool {
        self.peek().is_some_and(|t| t.is_ident(name))
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        if self.at_punct(p) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn here_span(&self) -> SourceSpan {
        self.peek().map(|t| t.span.clone()).unwrap_or_else(|| self.eof.clone())
    }

    fn prev_span(&self) -> SourceSpan {
        self.pos
            .checked_sub(1)
            .and_then(|i| self.tokens.get(i))
            .map(|t| t.span.clone())
            .unwrap_or_else(|| self.here_span())
    }

    fn span_from(&self, start: &SourceSpan) -> SourceSpan {
        start.to(&self.prev_span())
    }

    fn text_from(&self, start_tok: usize) -> String {
        let (Some(first), Some(last)) = (self.tokens.get(start_tok), self.pos.checked_sub(1).and_then(|i| self.tokens.get(i)))
        else {
            return String::new();
        };
        self.source.get(first.start..last.end).unwrap_or_default().to_string()
    }

    fn err_here(&self, message: impl Into<String>, expected: Option<&str>) -> SyntaxError {
        let found = match self.peek() {
            Some(t) => t.kind.to_string(),
            None => "end of input".to_string(),
        };
        let message = message.into();
        SyntaxError {
            message: if expected.is_some() {
                format!("{message}, found {found}")
            } else {
                message
            },
            span: self.here_span(),
            expected: expected.map(str::to_string),
        }
    }

    fn expect_punct(&mut self, p: &'static str) -> PResult<()> {
        if self.eat_punct(p) {
            Ok(())
        } else {
            let expected = format!("`{p}`");
            Err(self.err_here(format!("expected {expected}"), Some(&expected)))
        }
    }

    fn expect_ident(&mut self) -> PResult<String> {
        match self.peek().map(|t| &t.kind) {
            Some(TokenKind::Ident(name)) => {
                let name = name.clone();
                self.pos += 1;
                Ok(name)
            }
            _ => Err(self.err_here("expected identifier", Some("identifier"))),
        }
    }

    fn new_id(&mut self) -> NodeId {
        let id = NodeId(self.next_id);
        self.next_id += 1;
        id
    }

    fn expr(&mut self, kind: ExprKind, span: SourceSpan) -> Expr {
        Expr {
            id: self.new_id(),
            kind,
            span,
        }
    }

    fn opaque(&mut self, start_tok: usize, start: &SourceSpan, children: Vec<Expr>) -> Expr {
        let text = self.text_from(start_tok);
        let span = self.span_from(start);
        self.expr(ExprKind::Opaque { text, children }, span)
    }

    /// Index of the token closing the bracket group opened at `open_idx`.
    fn matching_close(&self, open_idx: usize) -> Option<usize> {
        let mut depth = 0usize;
        for (i, t) in self.tokens.iter().enumerate().skip(open_idx) {
            if t.is_punct("(") || t.is_punct("[") || t.is_punct("{") {
                depth += 1;
            } else if t.is_punct(")") || t.is_punct("]") || t.is_punct("}") {
                depth = depth.checked_sub(1)?;
                if depth == 0 {
                    return Some(i);
                }
            }
        }
        None
    }

    fn enter(&mut self) -> PResult<()> {
        if self.depth >= MAX_DEPTH {
            return Err(self.err_here("nesting too deep", None));
        }
        self.depth += 1;
        Ok(())
    }

    // ---- statements ----

    fn statement_list(&mut self, in_block: bool) -> Vec<Stmt> {
        let mut out = Vec::new();
        loop {
            match self.peek() {
                None => break,
                Some(t) if t.is_punct("}") => {
                    if in_block {
                        break;
                    }
                    let err = self.err_here("unexpected `}`", None);
                    self.errors.push(err);
                    self.pos += 1;
                    continue;
                }
                _ => {}
            }
            let start = self.pos;
            match self.statement() {
                Ok(s) => out.push(s),
                Err(e) => {
                    self.errors.push(e);
                    self.recover(start, in_block);
                }
            }
        }
        out
    }

    /// Skips to just past the next `;`, or past a brace group opened during
    /// the skip, or up to (not past) a `}` closing the enclosing block.
    fn recover(&mut self, start: usize, in_block: bool) {
        if self.pos == start {
            match self.peek() {
                Some(t) if t.is_punct("}") && in_block => return,
                Some(t) if t.is_punct("{") => {}
                Some(_) => self.pos += 1,
                None => return,
            }
        }
        let mut depth = 0usize;
        while let Some(t) = self.peek() {
            if t.is_punct(";") && depth == 0 {
                self.pos += 1;
                return;
            }
            if t.is_punct("{") {
                depth += 1;
            } else if t.is_punct("}") {
                if depth == 0 {
                    if !in_block {
                        self.pos += 1;
                    }
                    return;
                }
                depth -= 1;
                self.pos += 1;
                if depth == 0 {
                    return;
                }
                continue;
            }
            self.pos += 1;
        }
    }

    fn statement(&mut self) -> PResult<Stmt> {
        self.enter()?;
        let r = self.statement_inner();
        self.depth -= 1;
        r
    }

    fn terminate(&mut self) -> PResult<()> {
        if self.eat_punct(";") {
            return Ok(());
        }
        match self.peek() {
            None => Ok(()),
            Some(t) if t.is_punct("}") || t.newline_before => Ok(()),
            Some(_) => Err(self.err_here("expected `;`", Some("`;`"))),
        }
    }

    fn block(&mut self) -> PResult<Vec<Stmt>> {
        self.expect_punct("{")?;
        let body = self.statement_list(true);
        self.expect_punct("}")?;
        Ok(body)
    }

    fn statement_inner(&mut self) -> PResult<Stmt> {
        let start = self.here_span();
        let tok = self.peek().cloned().ok_or_else(|| self.err_here("expected statement", None))?;
        let kind = match &tok.kind {
            TokenKind::Keyword(Keyword::Var | Keyword::Let | Keyword::Const) => {
                let kind = self.var_decl()?;
                self.terminate()?;
                kind
            }
            TokenKind::Keyword(Keyword::Function) => {
                let f = self.function(true)?;
                StmtKind::FunctionDecl(Box::new(f))
            }
            TokenKind::Keyword(Keyword::Return) => {
                self.pos += 1;
                let value = match self.peek() {
                    None => None,
                    Some(t) if t.is_punct(";") || t.is_punct("}") || t.newline_before => None,
                    Some(_) => Some(self.expression()?),
                };
                self.terminate()?;
                StmtKind::Return(value)
            }
            TokenKind::Keyword(Keyword::If) => {
                self.pos += 1;
                self.expect_punct("(")?;
                let cond = self.expression()?;
                self.expect_punct(")")?;
                let then = Box::new(self.statement()?);
                let otherwise = if self.at_keyword(Keyword::Else) {
                    self.pos += 1;
                    Some(Box::new(self.statement()?))
                } else {
                    None
                };
                StmtKind::If { cond, then, otherwise }
            }
            TokenKind::Keyword(Keyword::While) => {
                self.pos += 1;
                self.expect_punct("(")?;
                let cond = self.expression()?;
                self.expect_punct(")")?;
                let body = Box::new(self.statement()?);
                StmtKind::While { cond, body }
            }
            TokenKind::Keyword(Keyword::For) => self.for_statement()?,
            TokenKind::Punct("{") => StmtKind::Block(self.block()?),
            TokenKind::Punct(";") => {
                self.pos += 1;
                StmtKind::Empty
            }
            TokenKind::Ident(word) => match word.as_str() {
                "try" if self.peek_at(1).is_some_and(|t| t.is_punct("{")) => self.try_statement()?,
                "do" => {
                    self.pos += 1;
                    let body = Box::new(self.statement()?);
                    if !self.at_keyword(Keyword::While) {
                        return Err(self.err_here("expected `while`", Some("`while`")));
                    }
                    self.pos += 1;
                    self.expect_punct("(")?;
                    let cond = self.expression()?;
                    self.expect_punct(")")?;
                    self.eat_punct(";");
                    StmtKind::While { cond, body }
                }
                "throw" => {
                    self.pos += 1;
                    let value = self.expression()?;
                    self.terminate()?;
                    StmtKind::Expr(value)
                }
                "break" | "continue" => {
                    self.pos += 1;
                    if let Some(t) = self.peek() {
                        if matches!(t.kind, TokenKind::Ident(_)) && !t.newline_before {
                            self.pos += 1;
                        }
                    }
                    self.terminate()?;
                    StmtKind::Empty
                }
                "switch" if self.peek_at(1).is_some_and(|t| t.is_punct("(")) => self.switch_statement()?,
                "export" => {
                    self.pos += 1;
                    if self.at_ident("default") {
                        self.pos += 1;
                    }
                    return self.statement_inner();
                }
                "class" | "import" | "with" | "debugger" => self.opaque_statement(),
                _ => self.expression_statement()?,
            },
            _ => self.expression_statement()?,
        };
        Ok(Stmt {
            kind,
            span: self.span_from(&start),
        })
    }

    fn expression_statement(&mut self) -> PResult<StmtKind> {
        let e = self.expression()?;
        self.terminate()?;
        Ok(StmtKind::Expr(e))
    }

    fn opaque_statement(&mut self) -> StmtKind {
        let start_tok = self.pos;
        let mut depth = 0usize;
        while let Some(t) = self.peek() {
            if depth == 0 && self.pos > start_tok && t.newline_before {
                break;
            }
            if t.is_punct(";") && depth == 0 {
                self.pos += 1;
                break;
            }
            if t.is_punct("{") || t.is_punct("(") || t.is_punct("[") {
                depth += 1;
            } else if t.is_punct("}") || t.is_punct(")") || t.is_punct("]") {
                if depth == 0 {
                    break;
                }
                depth -= 1;
                if depth == 0 && t.is_punct("}") {
                    self.pos += 1;
                    break;
                }
            }
            self.pos += 1;
        }
        StmtKind::Opaque(self.text_from(start_tok))
    }

    fn var_decl(&mut self) -> PResult<StmtKind> {
        let kind = match self.peek().map(|t| &t.kind) {
            Some(TokenKind::Keyword(Keyword::Let)) => DeclKind::Let,
            Some(TokenKind::Keyword(Keyword::Const)) => DeclKind::Const,
            _ => DeclKind::Var,
        };
        self.pos += 1;
        let mut decls = Vec::new();
        loop {
            let start = self.here_span();
            let name = self.expect_ident()?;
            let init = if self.eat_punct("=") {
                Some(self.assignment()?)
            } else {
                None
            };
            decls.push(Declarator {
                name,
                init,
                span: self.span_from(&start),
            });
            if !self.eat_punct(",") {
                break;
            }
        }
        Ok(StmtKind::VarDecl { kind, decls })
    }

    fn for_statement(&mut self) -> PResult<StmtKind> {
        self.pos += 1;
        let open = self.pos;
        self.expect_punct("(")?;
        let close = self
            .matching_close(open)
            .ok_or_else(|| self.err_here("unbalanced `(`", Some("`)`")))?;
        let mut depth = 0usize;
        let classic = self.tokens[open..close].iter().any(|t| {
            if t.is_punct("(") || t.is_punct("[") || t.is_punct("{") {
                depth += 1;
            } else if t.is_punct(")") || t.is_punct("]") || t.is_punct("}") {
                depth = depth.saturating_sub(1);
            }
            depth == 1 && t.is_punct(";")
        });
        if !classic {
            // for-in / for-of: the loop variable is left unassigned
            self.pos = close + 1;
            let body = Box::new(self.statement()?);
            return Ok(StmtKind::For {
                init: None,
                cond: None,
                update: None,
                body,
            });
        }
        let init = if self.at_punct(";") {
            None
        } else {
            let start = self.here_span();
            let kind = if self.at_keyword(Keyword::Var) || self.at_keyword(Keyword::Let) || self.at_keyword(Keyword::Const) {
                self.var_decl()?
            } else {
                StmtKind::Expr(self.expression()?)
            };
            Some(Box::new(Stmt {
                kind,
                span: self.span_from(&start),
            }))
        };
        self.expect_punct(";")?;
        let cond = if self.at_punct(";") { None } else { Some(self.expression()?) };
        self.expect_punct(";")?;
        let update = if self.at_punct(")") { None } else { Some(self.expression()?) };
        self.expect_punct(")")?;
        let body = Box::new(self.statement()?);
        Ok(StmtKind::For { init, cond, update, body })
    }

    /// `try`/`catch`/`finally` becomes a block of the three blocks.
    fn try_statement(&mut self) -> PResult<StmtKind> {
        self.pos += 1;
        let mut parts = Vec::new();
        let start = self.here_span();
        let body = self.block()?;
        parts.push(Stmt {
            kind: StmtKind::Block(body),
            span: self.span_from(&start),
        });
        if self.at_ident("catch") {
            self.pos += 1;
            if self.eat_punct("(") {
                self.expect_ident()?;
                self.expect_punct(")")?;
            }
            let start = self.here_span();
            let body = self.block()?;
            parts.push(Stmt {
                kind: StmtKind::Block(body),
                span: self.span_from(&start),
            });
        }
        if self.at_ident("finally") {
            self.pos += 1;
            let start = self.here_span();
            let body = self.block()?;
            parts.push(Stmt {
                kind: StmtKind::Block(body),
                span: self.span_from(&start),
            });
        }
        Ok(StmtKind::Block(parts))
    }

    /// `switch` becomes an if/else chain over its cases, so each case body is
    /// an alternative path.
    fn switch_statement(&mut self) -> PResult<StmtKind> {
        self.pos += 1;
        self.expect_punct("(")?;
        let discriminant = self.expression()?;
        self.expect_punct(")")?;
        self.expect_punct("{")?;
        let mut cases: Vec<(Expr, Vec<Stmt>, SourceSpan)> = Vec::new();
        loop {
            if self.eat_punct("}") {
                break;
            }
            if self.peek().is_none() {
                return Err(self.err_here("expected `}`", Some("`}`")));
            }
            let case_start = self.here_span();
            let test = if self.at_ident("case") {
                self.pos += 1;
                let start_tok = self.pos;
                let start = self.here_span();
                let value = self.expression()?;
                let test = self.opaque(start_tok, &start, vec![value]);
                self.expect_punct(":")?;
                test
            } else if self.at_ident("default") {
                let start_tok = self.pos;
                let start = self.here_span();
                self.pos += 1;
                let test = self.opaque(start_tok, &start, Vec::new());
                self.expect_punct(":")?;
                test
            } else {
                return Err(self.err_here("expected `case` or `default`", Some("`case`")));
            };
            let mut body = Vec::new();
            while !(self.at_ident("case") || self.at_ident("default") || self.at_punct("}") || self.peek().is_none()) {
                let start = self.pos;
                match self.statement() {
                    Ok(s) => body.push(s),
                    Err(e) => {
                        self.errors.push(e);
                        self.recover(start, true);
                    }
                }
            }
            cases.push((test, body, self.span_from(&case_start)));
        }
        let mut chain: Option<Box<Stmt>> = None;
        for (test, body, span) in cases.into_iter().rev() {
            chain = Some(Box::new(Stmt {
                kind: StmtKind::If {
                    cond: test,
                    then: Box::new(Stmt {
                        kind: StmtKind::Block(body),
                        span: span.clone(),
                    }),
                    otherwise: chain,
                },
                span,
            }));
        }
        let disc_span = discriminant.span.clone();
        let mut stmts = vec![Stmt {
            kind: StmtKind::Expr(discriminant),
            span: disc_span,
        }];
        if let Some(c) = chain {
            stmts.push(*c);
        }
        Ok(StmtKind::Block(stmts))
    }

    fn params(&mut self) -> PResult<Vec<String>> {
        self.expect_punct("(")?;
        let mut params = Vec::new();
        loop {
            if self.eat_punct(")") {
                break;
            }
            self.eat_punct("...");
            params.push(self.expect_ident()?);
            if self.eat_punct("=") {
                // default value; not tracked
                self.assignment()?;
            }
            if !self.eat_punct(",") {
                self.expect_punct(")")?;
                break;
            }
        }
        Ok(params)
    }

    fn function(&mut self, require_name: bool) -> PResult<Function> {
        let start = self.here_span();
        self.pos += 1;
        self.eat_punct("*");
        let name = if matches!(self.peek().map(|t| &t.kind), Some(TokenKind::Ident(_))) {
            Some(self.expect_ident()?)
        } else if require_name {
            return Err(self.err_here("expected function name", Some("identifier")));
        } else {
            None
        };
        let params = self.params()?;
        let body = self.block()?;
        Ok(Function {
            id: self.new_id(),
            name,
            params,
            body,
            span: self.span_from(&start),
        })
    }

    // ---- expressions ----

    fn expression(&mut self) -> PResult<Expr> {
        let start_tok = self.pos;
        let start = self.here_span();
        let first = self.assignment()?;
        if !self.at_punct(",") {
            return Ok(first);
        }
        let mut children = vec![first];
        while self.eat_punct(",") {
            children.push(self.assignment()?);
        }
        Ok(self.opaque(start_tok, &start, children))
    }

    fn assignment(&mut self) -> PResult<Expr> {
        self.enter()?;
        let r = self.assignment_inner();
        self.depth -= 1;
        r
    }

    fn assignment_inner(&mut self) -> PResult<Expr> {
        let start_tok = self.pos;
        let start = self.here_span();
        let target = self.conditional()?;
        let op = match self.peek().map(|t| &t.kind) {
            Some(TokenKind::Punct(p)) if is_assign_op(p) => *p,
            _ => return Ok(target),
        };
        if !matches!(
            target.kind,
            ExprKind::Ident(_) | ExprKind::Member { .. } | ExprKind::Index { .. }
        ) {
            return Err(self.err_here("invalid assignment target", None));
        }
        self.pos += 1;
        let value = self.assignment()?;
        let span = self.span_from(&start);
        let value = match op {
            "=" => value,
            "+=" => {
                let copy = self.with_fresh_ids(&target);
                let span = value.span.to(&target.span);
                self.expr(
                    ExprKind::Binary {
                        op: BinaryOp::Add,
                        lhs: Box::new(copy),
                        rhs: Box::new(value),
                    },
                    span,
                )
            }
            _ => {
                let copy = self.with_fresh_ids(&target);
                let text = self.text_from(start_tok);
                self.expr(
                    ExprKind::Opaque {
                        text,
                        children: vec![copy, value],
                    },
                    span.clone(),
                )
            }
        };
        Ok(self.expr(
            ExprKind::Assign {
                target: Box::new(target),
                value: Box::new(value),
            },
            span,
        ))
    }

    fn with_fresh_ids(&mut self, e: &Expr) -> Expr {
        let mut copy = e.clone();
        self.renumber(&mut copy);
        copy
    }

    fn renumber(&mut self, e: &mut Expr) {
        e.id = self.new_id();
        match &mut e.kind {
            ExprKind::Binary { lhs, rhs, .. } => {
                self.renumber(lhs);
                self.renumber(rhs);
            }
            ExprKind::Member { object, .. } => self.renumber(object),
            ExprKind::Index { object, key } => {
                self.renumber(object);
                self.renumber(key);
            }
            ExprKind::Call { callee, args } => {
                self.renumber(callee);
                for a in args {
                    self.renumber(a);
                }
            }
            ExprKind::Object(props) => {
                for p in props {
                    self.renumber(&mut p.value);
                }
            }
            ExprKind::Assign { target, value } => {
                self.renumber(target);
                self.renumber(value);
            }
            ExprKind::Conditional { cond, then, otherwise } => {
                self.renumber(cond);
                self.renumber(then);
                self.renumber(otherwise);
            }
            ExprKind::Opaque { children, .. } => {
                for c in children {
                    self.renumber(c);
                }
            }
            // function bodies are never part of an assignment target
            _ => {}
        }
    }

    fn conditional(&mut self) -> PResult<Expr> {
        let start = self.here_span();
        let cond = self.binary(0)?;
        if !self.eat_punct("?") {
            return Ok(cond);
        }
        let then = self.assignment()?;
        self.expect_punct(":")?;
        let otherwise = self.assignment()?;
        let span = self.span_from(&start);
        Ok(self.expr(
            ExprKind::Conditional {
                cond: Box::new(cond),
                then: Box::new(then),
                otherwise: Box::new(otherwise),
            },
            span,
        ))
    }

    fn peek_binary_op(&self) -> Option<BinaryOp> {
        match self.peek().map(|t| &t.kind)? {
            TokenKind::Punct(p) => BinaryOp::from_token(p),
            TokenKind::Ident(w) if w == "in" || w == "instanceof" => BinaryOp::from_token(w),
            _ => None,
        }
    }

    fn binary(&mut self, min_prec: u8) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        while let Some(op) = self.peek_binary_op() {
            let prec = op.precedence();
            if prec < min_prec {
                break;
            }
            self.pos += 1;
            let next_min = if op == BinaryOp::Pow { prec } else { prec + 1 };
            let rhs = self.binary(next_min)?;
            let span = lhs.span.to(&rhs.span);
            lhs = self.expr(
                ExprKind::Binary {
                    op,
                    lhs: Box::new(lhs),
                    rhs: Box::new(rhs),
                },
                span,
            );
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Expr> {
        let is_prefix = match self.peek().map(|t| &t.kind) {
            Some(TokenKind::Punct(p)) => matches!(*p, "!" | "-" | "+" | "~" | "++" | "--"),
            Some(TokenKind::Ident(w)) => {
                matches!(w.as_str(), "typeof" | "void" | "delete" | "await" | "new")
                    && self.peek_at(1).is_some_and(|t| !t.is_punct(")") && !t.is_punct(";") && !t.is_punct(","))
            }
            _ => false,
        };
        if !is_prefix {
            return self.postfix();
        }
        self.enter()?;
        let start_tok = self.pos;
        let start = self.here_span();
        self.pos += 1;
        let operand = self.unary();
        self.depth -= 1;
        let operand = operand?;
        Ok(self.opaque(start_tok, &start, vec![operand]))
    }

    fn postfix(&mut self) -> PResult<Expr> {
        let start_tok = self.pos;
        let start = self.here_span();
        let e = self.call_member()?;
        match self.peek() {
            Some(t) if (t.is_punct("++") || t.is_punct("--")) && !t.newline_before => {
                self.pos += 1;
                Ok(self.opaque(start_tok, &start, vec![e]))
            }
            _ => Ok(e),
        }
    }

    fn property_name(&mut self) -> PResult<String> {
        match self.peek().map(|t| &t.kind) {
            Some(TokenKind::Ident(n)) => {
                let n = n.clone();
                self.pos += 1;
                Ok(n)
            }
            Some(TokenKind::Keyword(k)) => {
                let n = k.as_str().to_string();
                self.pos += 1;
                Ok(n)
            }
            _ => Err(self.err_here("expected property name", Some("identifier"))),
        }
    }

    fn arguments(&mut self) -> PResult<Vec<Expr>> {
        self.expect_punct("(")?;
        let mut args = Vec::new();
        loop {
            if self.eat_punct(")") {
                break;
            }
            if self.at_punct("...") {
                let start_tok = self.pos;
                let start = self.here_span();
                self.pos += 1;
                let inner = self.assignment()?;
                args.push(self.opaque(start_tok, &start, vec![inner]));
            } else {
                args.push(self.assignment()?);
            }
            if !self.eat_punct(",") {
                self.expect_punct(")")?;
                break;
            }
        }
        Ok(args)
    }

    fn call_member(&mut self) -> PResult<Expr> {
        let start_tok = self.pos;
        let start = self.here_span();
        let mut e = self.primary()?;
        while let Some(tok) = self.peek() {
            if tok.is_punct(".") || (tok.is_punct("?.") && !self.peek_at(1).is_some_and(|t| t.is_punct("(") || t.is_punct("["))) {
                self.pos += 1;
                let property = self.property_name()?;
                let span = self.span_from(&start);
                e = self.expr(
                    ExprKind::Member {
                        object: Box::new(e),
                        property,
                    },
                    span,
                );
            } else if tok.is_punct("?.") {
                // optional call or index: `a?.(x)`, `a?.[k]`
                self.pos += 1;
            } else if tok.is_punct("[") {
                self.pos += 1;
                let key = self.expression()?;
                self.expect_punct("]")?;
                let span = self.span_from(&start);
                e = self.expr(
                    ExprKind::Index {
                        object: Box::new(e),
                        key: Box::new(key),
                    },
                    span,
                );
            } else if tok.is_punct("(") {
                let args = self.arguments()?;
                let span = self.span_from(&start);
                e = self.expr(
                    ExprKind::Call {
                        callee: Box::new(e),
                        args,
                    },
                    span,
                );
            } else if matches!(tok.kind, TokenKind::Template(_)) {
                let tpl = self.primary()?;
                e = self.opaque(start_tok, &start, vec![e, tpl]);
            } else {
                break;
            }
        }
        Ok(e)
    }

    fn primary(&mut self) -> PResult<Expr> {
        let start_tok = self.pos;
        let tok = self
            .peek()
            .cloned()
            .ok_or_else(|| self.err_here("expected expression", Some("expression")))?;
        let start = tok.span.clone();
        match tok.kind {
            TokenKind::Str(s) => {
                self.pos += 1;
                Ok(self.expr(ExprKind::Str(s), start))
            }
            TokenKind::Number(n) => {
                self.pos += 1;
                Ok(self.expr(ExprKind::Number(n), start))
            }
            TokenKind::Template(parts) => {
                self.pos += 1;
                self.template(parts, start)
            }
            TokenKind::Keyword(Keyword::True) => {
                self.pos += 1;
                Ok(self.expr(ExprKind::Bool(true), start))
            }
            TokenKind::Keyword(Keyword::False) => {
                self.pos += 1;
                Ok(self.expr(ExprKind::Bool(false), start))
            }
            TokenKind::Keyword(Keyword::Null) => {
                self.pos += 1;
                Ok(self.expr(ExprKind::Null, start))
            }
            TokenKind::Keyword(Keyword::Function) => {
                let f = self.function(false)?;
                let span = f.span.clone();
                Ok(self.expr(ExprKind::Function(Box::new(f)), span))
            }
            TokenKind::Ident(name) => {
                if self.peek_at(1).is_some_and(|t| t.is_punct("=>")) {
                    self.pos += 2;
                    return self.arrow_body(vec![name], start);
                }
                if name == "async"
                    && self
                        .peek_at(1)
                        .is_some_and(|t| !t.newline_before && (t.is_keyword(Keyword::Function) || t.is_punct("(")))
                {
                    let after = self.pos + 1;
                    let arrow = self.tokens[after].is_keyword(Keyword::Function)
                        || self
                            .matching_close(after)
                            .is_some_and(|c| self.tokens.get(c + 1).is_some_and(|t| t.is_punct("=>")));
                    if arrow {
                        self.pos += 1;
                        return self.primary();
                    }
                }
                self.pos += 1;
                Ok(self.expr(ExprKind::Ident(name), start))
            }
            TokenKind::Punct("(") => {
                let close = self.matching_close(self.pos);
                if let Some(close) = close {
                    if self.tokens.get(close + 1).is_some_and(|t| t.is_punct("=>")) {
                        let params = self.params().unwrap_or_else(|_| {
                            // destructuring or other complex parameters
                            Vec::new()
                        });
                        self.pos = close + 1;
                        self.expect_punct("=>")?;
                        return self.arrow_body(params, start);
                    }
                }
                self.pos += 1;
                let inner = self.expression()?;
                self.expect_punct(")")?;
                Ok(inner)
            }
            TokenKind::Punct("{") => self.object_literal(),
            TokenKind::Punct("[") => {
                self.pos += 1;
                let mut children = Vec::new();
                loop {
                    if self.eat_punct("]") {
                        break;
                    }
                    if self.eat_punct(",") {
                        continue;
                    }
                    self.eat_punct("...");
                    children.push(self.assignment()?);
                    if !self.eat_punct(",") {
                        self.expect_punct("]")?;
                        break;
                    }
                }
                Ok(self.opaque(start_tok, &start, children))
            }
            _ => Err(self.err_here("expected expression", Some("expression"))),
        }
    }

    fn arrow_body(&mut self, params: Vec<String>, start: SourceSpan) -> PResult<Expr> {
        let body = if self.at_punct("{") {
            self.block()?
        } else {
            let value = self.assignment()?;
            let span = value.span.clone();
            vec![Stmt {
                kind: StmtKind::Return(Some(value)),
                span,
            }]
        };
        let span = self.span_from(&start);
        let f = Function {
            id: self.new_id(),
            name: None,
            params,
            body,
            span: span.clone(),
        };
        Ok(self.expr(ExprKind::Function(Box::new(f)), span))
    }

    fn object_literal(&mut self) -> PResult<Expr> {
        let start = self.here_span();
        self.expect_punct("{")?;
        let mut props: Vec<Property> = Vec::new();
        loop {
            if self.eat_punct("}") {
                break;
            }
            let prop_start = self.here_span();
            if self.eat_punct("...") {
                self.assignment()?;
            } else if self.eat_punct("[") {
                // computed key: value kept out of the literal
                self.assignment()?;
                self.expect_punct("]")?;
                self.expect_punct(":")?;
                self.assignment()?;
            } else {
                let tok = self
                    .peek()
                    .cloned()
                    .ok_or_else(|| self.err_here("expected property", Some("`}`")))?;
                let (key, is_ident) = match tok.kind {
                    TokenKind::Ident(n) => (n, true),
                    TokenKind::Keyword(k) => (k.as_str().to_string(), false),
                    TokenKind::Str(s) => (s, false),
                    TokenKind::Number(n) => (n, false),
                    _ => return Err(self.err_here("expected property name", Some("property name"))),
                };
                self.pos += 1;
                let value = if self.eat_punct(":") {
                    self.assignment()?
                } else if self.at_punct("(") {
                    let params = self.params()?;
                    let body = self.block()?;
                    let span = self.span_from(&prop_start);
                    let f = Function {
                        id: self.new_id(),
                        name: Some(key.clone()),
                        params,
                        body,
                        span: span.clone(),
                    };
                    self.expr(ExprKind::Function(Box::new(f)), span)
                } else if is_ident && (self.at_punct(",") || self.at_punct("}")) {
                    self.expr(ExprKind::Ident(key.clone()), tok.span.clone())
                } else {
                    return Err(self.err_here("expected `:`", Some("`:`")));
                };
                if let Some(i) = props.iter().position(|p| p.key == key) {
                    self.errors.push(SyntaxError {
                        message: format!("duplicate key `{key}` in object literal"),
                        span: prop_start.clone(),
                        expected: None,
                    });
                    props.remove(i);
                }
                props.push(Property {
                    key,
                    value,
                    span: self.span_from(&prop_start),
                });
            }
            if !self.eat_punct(",") {
                self.expect_punct("}")?;
                break;
            }
        }
        let span = self.span_from(&start);
        Ok(self.expr(ExprKind::Object(props), span))
    }

    /// Lowers `` `a${b}c` `` to `"a" + b + "c"`; a leading hole gets an empty
    /// string operand so the result is always a string concatenation.
    fn template(&mut self, parts: Vec<TemplatePart>, span: SourceSpan) -> PResult<Expr> {
        let mut operands = Vec::new();
        for part in parts {
            match part {
                TemplatePart::Lit(s) => operands.push(self.expr(ExprKind::Str(s), span.clone())),
                TemplatePart::Expr(tokens, hole_span) => {
                    if tokens.is_empty() {
                        return Err(SyntaxError {
                            message: "empty template hole".into(),
                            span: hole_span,
                            expected: Some("expression".into()),
                        });
                    }
                    let saved_tokens = std::mem::replace(&mut self.tokens, tokens);
                    let saved_pos = std::mem::replace(&mut self.pos, 0);
                    let saved_eof = std::mem::replace(&mut self.eof, hole_span);
                    let result = self.expression().and_then(|e| {
                        if self.peek().is_some() {
                            Err(self.err_here("unexpected token in template hole", Some("`}`")))
                        } else {
                            Ok(e)
                        }
                    });
                    self.tokens = saved_tokens;
                    self.pos = saved_pos;
                    self.eof = saved_eof;
                    operands.push(result?);
                }
            }
        }
        let mut iter = operands.into_iter();
        let mut acc = match iter.next() {
            Some(first) if matches!(first.kind, ExprKind::Str(_)) => first,
            Some(first) => {
                let empty = self.expr(ExprKind::Str(String::new()), span.clone());
                self.expr(
                    ExprKind::Binary {
                        op: BinaryOp::Add,
                        lhs: Box::new(empty),
                        rhs: Box::new(first),
                    },
                    span.clone(),
                )
            }
            None => return Ok(self.expr(ExprKind::Str(String::new()), span)),
        };
        for next in iter {
            acc = self.expr(
                ExprKind::Binary {
                    op: BinaryOp::Add,
                    lhs: Box::new(acc),
                    rhs: Box::new(next),
                },
                span.clone(),
            );
        }
        Ok(acc)
    }
}

fn is_assign_op(p: &str) -> bool {
    matches!(
        p,
        "=" | "+=" | "-=" | "*=" | "/=" | "%=" | "**=" | "<<=" | ">>=" | ">>>=" | "&=" | "|=" | "^="
    )
}
