//! Reader for the clause text format.
//!
//! ```text
//! clause  := term [ ":-" body ] "."
//! body    := literal { "," literal }
//! literal := [ "\+" ] term
//! term    := variable | atom | number | quoted-string | atom "(" term { "," term } ")"
//! ```
//!
//! Beyond that grammar the reader accepts what statute and case files need:
//! the comparison and arithmetic infix operators (`is`, `=`, `<`, `+`, `*`, ...),
//! list syntax, `/* */` comments and `:- Goal.` directives. Double-quoted
//! strings of the shape `YYYY-MM-DD` become date literals; other quoted
//! strings become atoms.

use std::sync::Arc;

use chrono::NaiveDate;
use num_bigint::BigInt;
use thiserror::Error;

use crate::clause::{mark_negation_locals, Clause, ClauseId, Literal};
use crate::number::Decimal;
use crate::term::{infix_op, is_symbol_char, Assoc, Atom, Compound, Term, Var, ARG_PREC, LIST_NIL, PREFIX_MINUS_PREC};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{file}:{line}:{col}: syntax error: {message}")]
    Syntax { file: String, line: u32, col: u32, message: String },
    #[error("{file}:{line}:{col}: compound `{functor}()` has no arguments")]
    ZeroArity { file: String, line: u32, col: u32, functor: String },
    #[error("{file}:{line}:{col}: clause is not terminated by `.`")]
    Unterminated { file: String, line: u32, col: u32 },
}

impl ParseError {
    pub fn line(&self) -> u32 {
        match self {
            ParseError::Syntax { line, .. }
            | ParseError::ZeroArity { line, .. }
            | ParseError::Unterminated { line, .. } => *line,
        }
    }

    pub fn col(&self) -> u32 {
        match self {
            ParseError::Syntax { col, .. }
            | ParseError::ZeroArity { col, .. }
            | ParseError::Unterminated { col, .. } => *col,
        }
    }
}

/// A top-level item of a source file.
#[derive(Clone, Debug, PartialEq)]
pub enum Item {
    Clause(Clause),
    Directive { body: Vec<Literal>, line: u32 },
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Var(String),
    Atom(String),
    Quoted(String),
    Str(String),
    Int(BigInt),
    Dec(Decimal),
    Sym(String),
    Open,
    Close,
    OpenList,
    CloseList,
    Bar,
    Comma,
    End,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: u32,
    col: u32,
    /// Whitespace or a comment separated this token from the previous one.
    spaced: bool,
}

struct Lexer<'a> {
    src: &'a [u8],
    text: &'a str,
    pos: usize,
    line: u32,
    col: u32,
    file: &'a str,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str, file: &'a str) -> Self {
        Lexer { src: text.as_bytes(), text, pos: 0, line: 1, col: 1, file }
    }

    fn peek_char(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn peek_char_at(&self, off: usize) -> Option<char> {
        self.text[self.pos..].chars().nth(off)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek_char()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn err(&self, line: u32, col: u32, message: impl Into<String>) -> ParseError {
        ParseError::Syntax { file: self.file.to_string(), line, col, message: message.into() }
    }

    /// Skip whitespace and comments; report whether anything was skipped.
    fn skip_layout(&mut self) -> Result<bool, ParseError> {
        let mut skipped = false;
        loop {
            match self.peek_char() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                    skipped = true;
                }
                Some('%') => {
                    while let Some(c) = self.peek_char() {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                    skipped = true;
                }
                Some('/') if self.peek_char_at(1) == Some('*') => {
                    let (line, col) = (self.line, self.col);
                    self.bump();
                    self.bump();
                    loop {
                        match self.bump() {
                            None => return Err(self.err(line, col, "unterminated block comment")),
                            Some('*') if self.peek_char() == Some('/') => {
                                self.bump();
                                break;
                            }
                            _ => {}
                        }
                    }
                    skipped = true;
                }
                _ => return Ok(skipped),
            }
        }
    }

    fn quoted(&mut self, quote: char) -> Result<String, ParseError> {
        let (line, col) = (self.line, self.col);
        self.bump();
        let mut out = String::new();
        loop {
            match self.bump() {
                None => return Err(self.err(line, col, "unterminated quoted text")),
                Some(c) if c == quote => {
                    if self.peek_char() == Some(quote) {
                        self.bump();
                        out.push(quote);
                    } else {
                        return Ok(out);
                    }
                }
                Some('\\') => match self.bump() {
                    Some('n') => out.push('\n'),
                    Some('t') => out.push('\t'),
                    Some(c @ ('\\' | '\'' | '"' | '`')) => out.push(c),
                    Some(c) => return Err(self.err(self.line, self.col, format!("unknown escape `\\{c}`"))),
                    None => return Err(self.err(line, col, "unterminated quoted text")),
                },
                Some(c) => out.push(c),
            }
        }
    }

    fn next_token(&mut self) -> Result<Option<Token>, ParseError> {
        let spaced = self.skip_layout()?;
        let (line, col) = (self.line, self.col);
        let Some(c) = self.peek_char() else { return Ok(None) };
        let start = self.pos;
        let tok = match c {
            '(' => {
                self.bump();
                Tok::Open
            }
            ')' => {
                self.bump();
                Tok::Close
            }
            '[' => {
                self.bump();
                if self.peek_char() == Some(']') {
                    self.bump();
                    Tok::Atom(LIST_NIL.to_string())
                } else {
                    Tok::OpenList
                }
            }
            ']' => {
                self.bump();
                Tok::CloseList
            }
            '|' => {
                self.bump();
                Tok::Bar
            }
            ',' => {
                self.bump();
                Tok::Comma
            }
            '\'' => Tok::Quoted(self.quoted('\'')?),
            '"' => Tok::Str(self.quoted('"')?),
            c if c.is_ascii_digit() => {
                while matches!(self.peek_char(), Some(d) if d.is_ascii_digit() || d == '_') {
                    self.bump();
                }
                let is_dec = self.peek_char() == Some('.')
                    && matches!(self.peek_char_at(1), Some(d) if d.is_ascii_digit());
                if is_dec {
                    self.bump();
                    while matches!(self.peek_char(), Some(d) if d.is_ascii_digit()) {
                        self.bump();
                    }
                }
                let text: String = self.text[start..self.pos].chars().filter(|&c| c != '_').collect();
                if is_dec {
                    Tok::Dec(text.parse().map_err(|_| self.err(line, col, "malformed number"))?)
                } else {
                    Tok::Int(text.parse().map_err(|_| self.err(line, col, "malformed number"))?)
                }
            }
            c if c.is_alphabetic() || c == '_' => {
                while matches!(self.peek_char(), Some(d) if d.is_alphanumeric() || d == '_') {
                    self.bump();
                }
                let text = self.text[start..self.pos].to_string();
                if c.is_uppercase() || c == '_' {
                    Tok::Var(text)
                } else {
                    Tok::Atom(text)
                }
            }
            c if is_symbol_char(c) => {
                // A lone `.` followed by layout or end of input closes a clause.
                if c == '.' {
                    let next = self.peek_char_at(1);
                    if next.is_none() || next.is_some_and(|n| n.is_whitespace() || n == '%') {
                        self.bump();
                        return Ok(Some(Token { tok: Tok::End, line, col, spaced }));
                    }
                }
                while matches!(self.peek_char(), Some(d) if is_symbol_char(d)) {
                    // Leave a terminating `.` for the next token.
                    if self.peek_char() == Some('.') && self.pos > start {
                        let next = self.peek_char_at(1);
                        if next.is_none() || next.is_some_and(|n| n.is_whitespace() || n == '%') {
                            break;
                        }
                    }
                    self.bump();
                }
                Tok::Sym(self.text[start..self.pos].to_string())
            }
            other => return Err(self.err(line, col, format!("unexpected character `{other}`"))),
        };
        debug_assert!(self.pos > start || self.src.is_empty());
        Ok(Some(Token { tok, line, col, spaced }))
    }
}

struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    file: &'a str,
    eof: (u32, u32),
    anon: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos)
    }

    fn peek_at(&self, off: usize) -> Option<&Token> {
        self.toks.get(self.pos + off)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn err_at(&self, tok: Option<&Token>, message: impl Into<String>) -> ParseError {
        let (line, col) = tok.map(|t| (t.line, t.col)).unwrap_or(self.eof);
        ParseError::Syntax { file: self.file.to_string(), line, col, message: message.into() }
    }

    fn unterminated(&self, start: &Token) -> ParseError {
        ParseError::Unterminated { file: self.file.to_string(), line: start.line, col: start.col }
    }

    fn expect(&mut self, want: &Tok, what: &str) -> Result<Token, ParseError> {
        match self.peek() {
            Some(t) if &t.tok == want => Ok(self.next().unwrap()),
            other => Err(self.err_at(other, format!("expected {what}"))),
        }
    }

    fn fresh_anon(&mut self) -> Var {
        self.anon += 1;
        Var::new(format!("_{}", self.anon))
    }

    /// Starts of a term: used to tell prefix minus from a bare `-` atom.
    fn starts_term(tok: &Tok) -> bool {
        !matches!(tok, Tok::Close | Tok::CloseList | Tok::Bar | Tok::Comma | Tok::End)
    }

    fn infix_at(&self) -> Option<(String, u32, Assoc)> {
        let t = self.peek()?;
        let name = match &t.tok {
            Tok::Sym(s) => s.as_str(),
            Tok::Atom(a) if a == "is" => a.as_str(),
            _ => return None,
        };
        infix_op(name).map(|(p, a)| (name.to_string(), p, a))
    }

    fn parse(&mut self, max_prec: u32) -> Result<Term, ParseError> {
        let (mut left, mut left_prec) = self.parse_primary(max_prec)?;
        while let Some((name, prec, assoc)) = self.infix_at() {
            let lmax = match assoc {
                Assoc::Xfx => prec - 1,
                Assoc::Yfx => prec,
            };
            if prec > max_prec || left_prec > lmax {
                break;
            }
            self.next();
            let right = self.parse(prec - 1)?;
            left = Term::app(&name, vec![left, right]);
            left_prec = prec;
        }
        Ok(left)
    }

    fn parse_args(&mut self, functor: &str, at: &Token) -> Result<Vec<Term>, ParseError> {
        self.expect(&Tok::Open, "`(`")?;
        if matches!(self.peek(), Some(t) if t.tok == Tok::Close) {
            return Err(ParseError::ZeroArity {
                file: self.file.to_string(),
                line: at.line,
                col: at.col,
                functor: functor.to_string(),
            });
        }
        let mut args = vec![self.parse(ARG_PREC)?];
        loop {
            match self.next() {
                Some(Token { tok: Tok::Comma, .. }) => args.push(self.parse(ARG_PREC)?),
                Some(Token { tok: Tok::Close, .. }) => return Ok(args),
                other => return Err(self.err_at(other.as_ref(), "expected `,` or `)` in argument list")),
            }
        }
    }

    fn parse_list(&mut self) -> Result<Term, ParseError> {
        let mut items = vec![self.parse(ARG_PREC)?];
        loop {
            match self.next() {
                Some(Token { tok: Tok::Comma, .. }) => items.push(self.parse(ARG_PREC)?),
                Some(Token { tok: Tok::Bar, .. }) => {
                    let tail = self.parse(ARG_PREC)?;
                    self.expect(&Tok::CloseList, "`]`")?;
                    return Ok(Term::list(items, Some(tail)));
                }
                Some(Token { tok: Tok::CloseList, .. }) => return Ok(Term::list(items, None)),
                other => return Err(self.err_at(other.as_ref(), "expected `,`, `|` or `]` in list")),
            }
        }
    }

    fn functional(&self) -> bool {
        matches!(self.peek_at(1), Some(t) if t.tok == Tok::Open && !t.spaced)
    }

    fn parse_primary(&mut self, max_prec: u32) -> Result<(Term, u32), ParseError> {
        let Some(tok) = self.peek().cloned() else {
            return Err(self.err_at(None, "unexpected end of input"));
        };
        let term = match &tok.tok {
            Tok::Var(name) => {
                self.next();
                if name == "_" {
                    Term::Var(self.fresh_anon())
                } else {
                    Term::Var(Var::new(name.as_str()))
                }
            }
            Tok::Int(i) => {
                self.next();
                Term::Int(i.clone())
            }
            Tok::Dec(d) => {
                self.next();
                Term::Dec(d.clone())
            }
            Tok::Str(s) => {
                self.next();
                string_term(s).map_err(|m| self.err_at(Some(&tok), m))?
            }
            Tok::Open => {
                self.next();
                let t = self.parse(1200)?;
                self.expect(&Tok::Close, "`)`")?;
                return Ok((t, 0));
            }
            Tok::OpenList => {
                self.next();
                self.parse_list()?
            }
            Tok::Sym(s) if s == "-" => {
                let next = self.peek_at(1).cloned();
                match next {
                    Some(Token { tok: Tok::Int(i), spaced: false, .. }) => {
                        self.pos += 2;
                        Term::Int(-i)
                    }
                    Some(Token { tok: Tok::Dec(d), spaced: false, .. }) => {
                        self.pos += 2;
                        Term::Dec(d.neg())
                    }
                    Some(Token { tok: Tok::Open, spaced: false, .. }) => {
                        self.next();
                        let args = self.parse_args("-", &tok)?;
                        compound("-", args)
                    }
                    Some(t) if Self::starts_term(&t.tok) && max_prec >= PREFIX_MINUS_PREC => {
                        self.next();
                        let arg = self.parse(PREFIX_MINUS_PREC)?;
                        return Ok((Term::app("-", vec![arg]), PREFIX_MINUS_PREC));
                    }
                    _ => {
                        self.next();
                        Term::atom("-")
                    }
                }
            }
            Tok::Atom(name) | Tok::Quoted(name) | Tok::Sym(name) => {
                if matches!(&tok.tok, Tok::Sym(s) if s == "\\+" || s == ":-") {
                    return Err(self.err_at(Some(&tok), format!("`{name}` cannot start a term here")));
                }
                if self.functional() {
                    self.next();
                    let args = self.parse_args(name, &tok)?;
                    compound(name, args)
                } else {
                    self.next();
                    Term::Atom(Atom::new(name.as_str()))
                }
            }
            Tok::Close | Tok::CloseList | Tok::Bar | Tok::Comma | Tok::End => {
                return Err(self.err_at(Some(&tok), "expected a term"));
            }
        };
        Ok((term, 0))
    }

    fn parse_literal(&mut self) -> Result<Literal, ParseError> {
        let negated = matches!(self.peek(), Some(Token { tok: Tok::Sym(s), .. }) if s == "\\+");
        if negated {
            self.next();
        }
        let at = self.peek().cloned();
        let goal = self.parse(ARG_PREC)?;
        if goal.pred_key().is_none() {
            return Err(self.err_at(at.as_ref(), format!("`{goal}` is not a callable goal")));
        }
        Ok(Literal::new(goal, negated))
    }

    fn parse_body(&mut self, start: &Token) -> Result<Vec<Literal>, ParseError> {
        let mut body = vec![self.parse_literal()?];
        loop {
            match self.peek() {
                Some(Token { tok: Tok::Comma, .. }) => {
                    self.next();
                    body.push(self.parse_literal()?);
                }
                Some(Token { tok: Tok::End, .. }) => {
                    self.next();
                    return Ok(body);
                }
                None => return Err(self.unterminated(start)),
                other => return Err(self.err_at(other, "expected `,` or `.` after literal")),
            }
        }
    }

    /// `:- dynamic foo/1, bar/2.` style directives with a prefix keyword.
    fn parse_prefix_directive(&mut self, keyword: &str, start: &Token) -> Result<Vec<Literal>, ParseError> {
        self.next();
        let mut args = vec![self.parse(ARG_PREC)?];
        loop {
            match self.next() {
                Some(Token { tok: Tok::Comma, .. }) => args.push(self.parse(ARG_PREC)?),
                Some(Token { tok: Tok::End, .. }) => break,
                None => return Err(self.unterminated(start)),
                other => return Err(self.err_at(other.as_ref(), "expected `,` or `.` in directive")),
            }
        }
        Ok(vec![Literal::positive(Term::app(keyword, args))])
    }

    fn parse_item(&mut self) -> Result<Item, ParseError> {
        let start = self.peek().cloned().expect("caller checks for input");
        if matches!(&start.tok, Tok::Sym(s) if s == ":-") {
            self.next();
            let prefix_kw = match self.peek() {
                Some(Token { tok: Tok::Atom(a), .. })
                    if matches!(a.as_str(), "dynamic" | "discontiguous") && !self.functional() =>
                {
                    Some(a.clone())
                }
                _ => None,
            };
            let body = match prefix_kw {
                Some(kw) => self.parse_prefix_directive(&kw, &start)?,
                None => self.parse_body(&start)?,
            };
            return Ok(Item::Directive { body, line: start.line });
        }
        let head = self.parse(ARG_PREC)?;
        if head.pred_key().is_none() {
            return Err(self.err_at(Some(&start), format!("clause head `{head}` must be an atom or compound")));
        }
        let id = Some(ClauseId { file: Arc::from(self.file), line: start.line });
        match self.next() {
            Some(Token { tok: Tok::End, .. }) => Ok(Item::Clause(Clause::new(head, Vec::new(), id))),
            Some(Token { tok: Tok::Sym(s), .. }) if s == ":-" => {
                let body = self.parse_body(&start)?;
                Ok(Item::Clause(Clause::new(head, body, id)))
            }
            None => Err(self.unterminated(&start)),
            other => Err(self.err_at(other.as_ref(), "expected `:-` or `.` after clause head")),
        }
    }
}

fn compound(name: &str, args: Vec<Term>) -> Term {
    Term::Compound(Compound::new(Atom::new(name), args).expect("argument list is non-empty"))
}

fn string_term(s: &str) -> Result<Term, String> {
    let b = s.as_bytes();
    let date_shaped = b.len() == 10
        && b[4] == b'-'
        && b[7] == b'-'
        && b.iter().enumerate().all(|(i, c)| i == 4 || i == 7 || c.is_ascii_digit());
    if date_shaped {
        return NaiveDate::parse_from_str(s, "%Y-%m-%d")
            .map(Term::Date)
            .map_err(|_| format!("\"{s}\" is not a valid calendar date"));
    }
    Ok(Term::Atom(Atom::new(s)))
}

fn tokenize(text: &str, file: &str) -> Result<(Vec<Token>, (u32, u32)), ParseError> {
    let mut lx = Lexer::new(text, file);
    let mut toks = Vec::new();
    while let Some(t) = lx.next_token()? {
        toks.push(t);
    }
    Ok((toks, (lx.line, lx.col)))
}

/// Parse every clause and directive of a source text, in order.
pub fn parse_items(text: &str, file: &str) -> Result<Vec<Item>, ParseError> {
    let (toks, eof) = tokenize(text, file)?;
    let mut p = Parser { toks, pos: 0, file, eof, anon: 0 };
    let mut items = Vec::new();
    while p.peek().is_some() {
        items.push(p.parse_item()?);
    }
    Ok(items)
}

/// Parse a program consisting only of clauses.
pub fn parse_program(text: &str, file: &str) -> Result<Vec<Clause>, ParseError> {
    parse_items(text, file)?
        .into_iter()
        .map(|item| match item {
            Item::Clause(c) => Ok(c),
            Item::Directive { line, .. } => Err(ParseError::Syntax {
                file: file.to_string(),
                line,
                col: 1,
                message: "directives are not allowed here".into(),
            }),
        })
        .collect()
}

/// Parse a single term, e.g. `f(X, "2018-01-01")`.
pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    let (toks, eof) = tokenize(text, "<term>")?;
    let mut p = Parser { toks, pos: 0, file: "<term>", eof, anon: 0 };
    let t = p.parse(1200)?;
    if let Some(Token { tok: Tok::End, .. }) = p.peek() {
        p.next();
    }
    match p.peek() {
        None => Ok(t),
        other => Err(p.err_at(other, "trailing input after term")),
    }
}

/// Parse a query: a comma-separated list of literals with an optional `?-`
/// prefix and trailing `.`.
pub fn parse_query(text: &str) -> Result<Vec<Literal>, ParseError> {
    let trimmed = text.trim();
    let trimmed = trimmed.strip_prefix("?-").or_else(|| trimmed.strip_prefix(":-")).unwrap_or(trimmed).trim();
    if trimmed.is_empty() || trimmed == "." {
        return Ok(Vec::new());
    }
    let mut text = trimmed.to_string();
    if !text.ends_with('.') {
        text.push('.');
    }
    let (toks, eof) = tokenize(&text, "<query>")?;
    let mut p = Parser { toks, pos: 0, file: "<query>", eof, anon: 0 };
    let start = p.peek().cloned().expect("non-empty query");
    let mut body = p.parse_body(&start)?;
    if let Some(t) = p.peek() {
        return Err(p.err_at(Some(t), "trailing input after query"));
    }
    mark_negation_locals(None, &mut body);
    Ok(body)
}
