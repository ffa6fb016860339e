use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use super::span::{Position, SourceSpan};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Keyword {
    Var,
    Let,
    Const,
    Function,
    Return,
    If,
    Else,
    True,
    False,
    Null,
    While,
    For,
}

impl Keyword {
    fn from_ident(s: &str) -> Option<Keyword> {
        Some(match s {
            "var" => Keyword::Var,
            "let" => Keyword::Let,
            "const" => Keyword::Const,
            "function" => Keyword::Function,
            "return" => Keyword::Return,
            "if" => Keyword::If,
            "else" => Keyword::Else,
            "true" => Keyword::True,
            "false" => Keyword::False,
            "null" => Keyword::Null,
            "while" => Keyword::While,
            "for" => Keyword::For,
            _ => return None,
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Keyword::Var => "var",
            Keyword::Let => "let",
            Keyword::Const => "const",
            Keyword::Function => "function",
            Keyword::Return => "return",
            Keyword::If => "if",
            Keyword::Else => "else",
            Keyword::True => "true",
            Keyword::False => "false",
            Keyword::Null => "null",
            Keyword::While => "while",
            Keyword::For => "for",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TemplatePart {
    Lit(String),
    /// Tokens of a `${...}` hole, and the span of the hole contents.
    Expr(Vec<Token>, SourceSpan),
}

#[derive(Debug, Clone, PartialEq)]
pub enum TokenKind {
    Ident(String),
    Keyword(Keyword),
    Str(String),
    Template(Vec<TemplatePart>),
    /// Canonical string conversion of the numeric value.
    Number(String),
    Punct(&'static str),
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Ident(s) => write!(f, "identifier `{s}`"),
            TokenKind::Keyword(k) => write!(f, "`{}`", k.as_str()),
            TokenKind::Str(_) => f.write_str("string literal"),
            TokenKind::Template(_) => f.write_str("template literal"),
            TokenKind::Number(n) => write!(f, "number `{n}`"),
            TokenKind::Punct(p) => write!(f, "`{p}`"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: SourceSpan,
    /// Byte offsets into the source.
    pub start: usize,
    pub end: usize,
    /// A line terminator occurs between the previous token and this one.
    pub newline_before: bool,
}

impl Token {
    pub fn is_punct(&self, p: &str) -> bool {
        matches!(&self.kind, TokenKind::Punct(q) if *q == p)
    }

    pub fn is_keyword(&self, k: Keyword) -> bool {
        matches!(&self.kind, TokenKind::Keyword(q) if *q == k)
    }

    pub fn is_ident(&self, name: &str) -> bool {
        matches!(&self.kind, TokenKind::Ident(q) if q == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LexErrorKind {
    #[error("unterminated string literal")]
    UnterminatedString,
    #[error("unterminated template literal")]
    UnterminatedTemplate,
    #[error("unterminated block comment")]
    UnterminatedComment,
    #[error("template literals nested too deeply")]
    TooDeep,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{span}: {kind}")]
pub struct LexError {
    pub kind: LexErrorKind,
    pub span: SourceSpan,
}

const PUNCTUATORS: &[&str] = &[
    ">>>=", "===", "!==", "**=", "...", "<<=", ">>=", ">>>", "==", "!=", "<=", ">=", "&&", "||", "??", "?.", "=>",
    "++", "--", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<", ">>", "**", "{", "}", "(", ")", "[", "]", ";",
    ",", ".", ":", "=", "+", "-", "*", "/", "%", "<", ">", "!", "~", "?", "&", "|", "^", "@", "#",
];

/// Stands in for characters outside the punctuator set.
pub const UNKNOWN_CHAR: &str = "\u{fffd}";

const MAX_TEMPLATE_DEPTH: usize = 32;

struct Lexer<'a> {
    source: &'a str,
    chars: Vec<(usize, char)>,
    pos: usize,
    line: u32,
    col: u32,
    file: Arc<str>,
    depth: usize,
}

/// Tokenizes the whole input. Comments and whitespace are dropped.
pub fn tokenize(source: &str, file: &str) -> Result<Vec<Token>, LexError> {
    match tokenize_partial(source, Arc::from(file)) {
        (tokens, None) => Ok(tokens),
        (_, Some(err)) => Err(err),
    }
}

/// Like [`tokenize`] but keeps the tokens produced before a lexical error.
pub fn tokenize_partial(source: &str, file: Arc<str>) -> (Vec<Token>, Option<LexError>) {
    let mut lexer = Lexer {
        source,
        chars: source.char_indices().collect(),
        pos: 0,
        line: 1,
        col: 1,
        file,
        depth: 0,
    };
    let mut out = Vec::new();
    let err = lexer.run(false, &mut out).err();
    (out, err)
}

impl<'a> Lexer<'a> {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn peek_at(&self, n: usize) -> Option<char> {
        self.chars.get(self.pos + n).map(|&(_, c)| c)
    }

    fn offset(&self) -> usize {
        self.chars.get(self.pos).map(|&(o, _)| o).unwrap_or(self.source.len())
    }

    fn here(&self) -> Position {
        Position {
            line: self.line,
            col: self.col,
        }
    }

    fn advance(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' || (c == '\r' && self.peek() != Some('\n')) || c == '\u{2028}' || c == '\u{2029}' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn span(&self, start: Position) -> SourceSpan {
        SourceSpan::new(self.file.clone(), start, self.here())
    }

    fn error(&self, kind: LexErrorKind, start: Position) -> LexError {
        LexError {
            kind,
            span: self.span(start),
        }
    }

    /// Skips whitespace and comments; returns whether a line break was seen.
    fn skip_trivia(&mut self) -> Result<bool, LexError> {
        let mut newline = false;
        loop {
            match self.peek() {
                Some('\n' | '\r' | '\u{2028}' | '\u{2029}') => {
                    newline = true;
                    self.advance();
                }
                Some(c) if c.is_whitespace() || c == '\u{feff}' => {
                    self.advance();
                }
                Some('/') if self.peek_at(1) == Some('/') => {
                    while let Some(c) = self.peek() {
                        if c == '\n' || c == '\r' {
                            break;
                        }
                        self.advance();
                    }
                }
                Some('/') if self.peek_at(1) == Some('*') => {
                    let start = self.here();
                    self.advance();
                    self.advance();
                    loop {
                        match self.peek() {
                            None => return Err(self.error(LexErrorKind::UnterminatedComment, start)),
                            Some('*') if self.peek_at(1) == Some('/') => {
                                self.advance();
                                self.advance();
                                break;
                            }
                            Some(c) => {
                                if matches!(c, '\n' | '\r') {
                                    newline = true;
                                }
                                self.advance();
                            }
                        }
                    }
                }
                _ => return Ok(newline),
            }
        }
    }

    /// Lexes until end of input, or (inside a template hole) until the
    /// unmatched closing brace, which is consumed. Returns whether that
    /// closing brace was found.
    fn run(&mut self, in_hole: bool, out: &mut Vec<Token>) -> Result<bool, LexError> {
        let mut brace_depth = 0usize;
        loop {
            let newline_before = self.skip_trivia()?;
            let Some(c) = self.peek() else {
                return Ok(false);
            };
            if in_hole && c == '}' && brace_depth == 0 {
                self.advance();
                return Ok(true);
            }
            let start = self.here();
            let start_offset = self.offset();
            let kind = match c {
                '"' | '\'' => TokenKind::Str(self.string(c)?),
                '`' => TokenKind::Template(self.template()?),
                c if c.is_ascii_digit() || (c == '.' && self.peek_at(1).is_some_and(|d| d.is_ascii_digit())) => {
                    TokenKind::Number(self.number())
                }
                c if is_ident_start(c) => {
                    let mut name = String::new();
                    while let Some(c) = self.peek().filter(|&c| is_ident_part(c)) {
                        name.push(c);
                        self.advance();
                    }
                    match Keyword::from_ident(&name) {
                        Some(k) => TokenKind::Keyword(k),
                        None => TokenKind::Ident(name),
                    }
                }
                _ => {
                    let rest = &self.source[start_offset..];
                    let p = PUNCTUATORS
                        .iter()
                        .copied()
                        .find(|p| rest.starts_with(p))
                        .unwrap_or(UNKNOWN_CHAR);
                    if p == UNKNOWN_CHAR {
                        self.advance();
                    } else {
                        for _ in 0..p.chars().count() {
                            self.advance();
                        }
                    }
                    if p == "{" {
                        brace_depth += 1;
                    } else if p == "}" {
                        brace_depth = brace_depth.saturating_sub(1);
                    }
                    TokenKind::Punct(p)
                }
            };
            out.push(Token {
                kind,
                span: self.span(start),
                start: start_offset,
                end: self.offset(),
                newline_before,
            });
        }
    }

    fn string(&mut self, quote: char) -> Result<String, LexError> {
        let start = self.here();
        self.advance();
        let mut text = String::new();
        loop {
            match self.peek() {
                None | Some('\n' | '\r') => return Err(self.error(LexErrorKind::UnterminatedString, start)),
                Some(c) if c == quote => {
                    self.advance();
                    return Ok(text);
                }
                Some('\\') => {
                    self.advance();
                    match self.peek() {
                        None => return Err(self.error(LexErrorKind::UnterminatedString, start)),
                        Some(_) => self.escape(&mut text),
                    }
                }
                Some(c) => {
                    text.push(c);
                    self.advance();
                }
            }
        }
    }

    /// Called with the cursor on the character after a backslash.
    fn escape(&mut self, text: &mut String) {
        let Some(c) = self.advance() else { return };
        match c {
            'n' => text.push('\n'),
            't' => text.push('\t'),
            'r' => text.push('\r'),
            'b' => text.push('\u{8}'),
            'f' => text.push('\u{c}'),
            'v' => text.push('\u{b}'),
            '0' if !self.peek().is_some_and(|d| d.is_ascii_digit()) => text.push('\0'),
            '\r' => {
                if self.peek() == Some('\n') {
                    self.advance();
                }
            }
            '\n' | '\u{2028}' | '\u{2029}' => {}
            'x' => match self.hex_digits(2) {
                Some(v) => text.push(char::from_u32(v).unwrap_or('\u{fffd}')),
                None => text.push('x'),
            },
            'u' => {
                if self.peek() == Some('{') {
                    let save = (self.pos, self.line, self.col);
                    self.advance();
                    let mut v: u32 = 0;
                    let mut digits = 0;
                    while let Some(d) = self.peek().and_then(|c| c.to_digit(16)) {
                        v = v.saturating_mul(16).saturating_add(d);
                        digits += 1;
                        self.advance();
                    }
                    if digits > 0 && self.peek() == Some('}') {
                        self.advance();
                        text.push(char::from_u32(v).unwrap_or('\u{fffd}'));
                    } else {
                        (self.pos, self.line, self.col) = save;
                        text.push('u');
                    }
                } else {
                    match self.hex_digits(4) {
                        Some(v) => text.push(char::from_u32(v).unwrap_or('\u{fffd}')),
                        None => text.push('u'),
                    }
                }
            }
            other => text.push(other),
        }
    }

    fn hex_digits(&mut self, n: usize) -> Option<u32> {
        let mut v = 0;
        for i in 0..n {
            v = v * 16 + self.peek_at(i)?.to_digit(16)?;
        }
        for _ in 0..n {
            self.advance();
        }
        Some(v)
    }

    fn template(&mut self) -> Result<Vec<TemplatePart>, LexError> {
        let start = self.here();
        if self.depth >= MAX_TEMPLATE_DEPTH {
            return Err(self.error(LexErrorKind::TooDeep, start));
        }
        self.advance();
        let mut parts = Vec::new();
        let mut lit = String::new();
        loop {
            match self.peek() {
                None => return Err(self.error(LexErrorKind::UnterminatedTemplate, start)),
                Some('`') => {
                    self.advance();
                    if !lit.is_empty() {
                        parts.push(TemplatePart::Lit(lit));
                    }
                    return Ok(parts);
                }
                Some('\\') => {
                    self.advance();
                    if self.peek().is_none() {
                        return Err(self.error(LexErrorKind::UnterminatedTemplate, start));
                    }
                    self.escape(&mut lit);
                }
                Some('$') if self.peek_at(1) == Some('{') => {
                    self.advance();
                    self.advance();
                    if !lit.is_empty() {
                        parts.push(TemplatePart::Lit(std::mem::take(&mut lit)));
                    }
                    let hole_start = self.here();
                    let mut inner = Vec::new();
                    self.depth += 1;
                    let closed = self.run(true, &mut inner);
                    self.depth -= 1;
                    if !closed? {
                        return Err(self.error(LexErrorKind::UnterminatedTemplate, start));
                    }
                    let mut hole_end = self.here();
                    hole_end.col = hole_end.col.saturating_sub(1).max(1);
                    parts.push(TemplatePart::Expr(inner, SourceSpan::new(self.file.clone(), hole_start, hole_end)));
                }
                Some(c) => {
                    lit.push(c);
                    self.advance();
                }
            }
        }
    }

    fn number(&mut self) -> String {
        let start = self.offset();
        if self.peek() == Some('0') && matches!(self.peek_at(1), Some('x' | 'X' | 'o' | 'O' | 'b' | 'B')) {
            let radix = match self.peek_at(1) {
                Some('x' | 'X') => 16,
                Some('o' | 'O') => 8,
                _ => 2,
            };
            self.advance();
            self.advance();
            let mut v: f64 = 0.0;
            while let Some(d) = self.peek().and_then(|c| c.to_digit(radix)) {
                v = v * radix as f64 + d as f64;
                self.advance();
            }
            return canonical_number(v);
        }
        while self.peek().is_some_and(|c| c.is_ascii_digit() || c == '_') {
            self.advance();
        }
        if self.peek() == Some('.') {
            self.advance();
            while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                self.advance();
            }
        }
        if matches!(self.peek(), Some('e' | 'E'))
            && (self.peek_at(1).is_some_and(|c| c.is_ascii_digit())
                || (matches!(self.peek_at(1), Some('+' | '-')) && self.peek_at(2).is_some_and(|c| c.is_ascii_digit())))
        {
            self.advance();
            self.advance();
            while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                self.advance();
            }
        }
        // BigInt suffix
        if self.peek() == Some('n') {
            self.advance();
        }
        let raw: String = self.source[start..self.offset()]
            .chars()
            .filter(|&c| c != '_' && c != 'n')
            .collect();
        canonical_number(raw.parse::<f64>().unwrap_or(f64::NAN))
    }
}

/// Number-to-string conversion for the values this lexer produces.
pub fn canonical_number(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v.is_infinite() {
        if v > 0.0 { "Infinity".into() } else { "-Infinity".into() }
    } else if v == 0.0 {
        "0".into()
    } else {
        format!("{v}")
    }
}

fn is_ident_start(c: char) -> bool {
    c == '$' || c == '_' || c.is_alphabetic()
}

fn is_ident_part(c: char) -> bool {
    is_ident_start(c) || c.is_alphanumeric() || c == '\u{200c}' || c == '\u{200d}'
}
