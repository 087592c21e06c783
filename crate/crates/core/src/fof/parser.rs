//! Recursive-descent parser for the supported FOF subset.
//!
//! Connective precedence, tightest first: `~`, quantifiers, `&`, `|`, then
//! `=>` / `<=>` (non-associative). A quantifier's body is a unary formula,
//! so `![X]: p(X) & q` reads as `(![X]: p(X)) & q`.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use super::ast::{AnnotatedFormula, FofDocument, Formula, Role, Span, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{span}: {kind}")]
pub struct ParseError {
    pub span: Span,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("{0}")]
    Syntax(String),
    #[error("duplicate formula name `{name}` (first defined at {first})")]
    DuplicateName { name: String, first: Span },
    #[error("unknown role `{0}` (expected axiom, hypothesis, definition or conjecture)")]
    UnknownRole(String),
    #[error("second conjecture `{name}` (only one conjecture allowed, first is `{first}`)")]
    MultipleConjectures { name: String, first: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Lower(String),
    Upper(String),
    Quoted(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Dot,
    Colon,
    Bang,
    Question,
    Tilde,
    Amp,
    Pipe,
    Implies,
    Iff,
    Eq,
    Neq,
    /// Recognised TPTP connectives outside the subset (`<=`, `<~>`, `~|`, `~&`).
    Unsupported(&'static str),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Lower(s) | Tok::Upper(s) => write!(f, "`{s}`"),
            Tok::Quoted(s) => write!(f, "'{s}'"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::LBracket => f.write_str("`[`"),
            Tok::RBracket => f.write_str("`]`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::Bang => f.write_str("`!`"),
            Tok::Question => f.write_str("`?`"),
            Tok::Tilde => f.write_str("`~`"),
            Tok::Amp => f.write_str("`&`"),
            Tok::Pipe => f.write_str("`|`"),
            Tok::Implies => f.write_str("`=>`"),
            Tok::Iff => f.write_str("`<=>`"),
            Tok::Eq => f.write_str("`=`"),
            Tok::Neq => f.write_str("`!=`"),
            Tok::Unsupported(s) => write!(f, "`{s}`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    column: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src, pos: 0, line: 1, column: 1 }
    }

    fn peek_char(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek_char()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn span(&self) -> Span {
        Span { line: self.line, column: self.column }
    }

    fn starts_with(&self, s: &str) -> bool {
        self.src[self.pos..].starts_with(s)
    }

    fn skip_trivia(&mut self) {
        while let Some(c) = self.peek_char() {
            if c.is_whitespace() {
                self.bump();
            } else if c == '%' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn next_token(&mut self) -> Result<(Tok, Span), ParseError> {
        self.skip_trivia();
        let span = self.span();
        let Some(c) = self.peek_char() else {
            return Ok((Tok::Eof, span));
        };
        let fixed: &[(&str, Tok)] = &[
            ("<=>", Tok::Iff),
            ("<~>", Tok::Unsupported("<~>")),
            ("<=", Tok::Unsupported("<=")),
            ("=>", Tok::Implies),
            ("!=", Tok::Neq),
            ("~|", Tok::Unsupported("~|")),
            ("~&", Tok::Unsupported("~&")),
            ("(", Tok::LParen),
            (")", Tok::RParen),
            ("[", Tok::LBracket),
            ("]", Tok::RBracket),
            (",", Tok::Comma),
            (".", Tok::Dot),
            (":", Tok::Colon),
            ("!", Tok::Bang),
            ("?", Tok::Question),
            ("~", Tok::Tilde),
            ("&", Tok::Amp),
            ("|", Tok::Pipe),
            ("=", Tok::Eq),
        ];
        for (text, tok) in fixed {
            if self.starts_with(text) {
                for _ in 0..text.len() {
                    self.bump();
                }
                return Ok((tok.clone(), span));
            }
        }
        if c.is_ascii_alphabetic() {
            let start = self.pos;
            while matches!(self.peek_char(), Some(c) if c.is_ascii_alphanumeric() || c == '_') {
                self.bump();
            }
            let word = self.src[start..self.pos].to_string();
            let tok = if c.is_ascii_uppercase() { Tok::Upper(word) } else { Tok::Lower(word) };
            return Ok((tok, span));
        }
        if c == '\'' {
            self.bump();
            let mut out = String::new();
            loop {
                match self.bump() {
                    None | Some('\n') => {
                        return Err(syntax(span, "unterminated quoted string"));
                    }
                    Some('\'') => break,
                    Some('\\') => match self.bump() {
                        Some(e @ ('\\' | '\'')) => out.push(e),
                        _ => return Err(syntax(span, "invalid escape in quoted string")),
                    },
                    Some(ch) => out.push(ch),
                }
            }
            return Ok((Tok::Quoted(out), span));
        }
        let what = match c {
            '0'..='9' => "numbers are not supported".to_string(),
            '$' => "defined symbols (`$...`) are not supported".to_string(),
            '"' => "distinct objects (`\"...\"`) are not supported".to_string(),
            '/' if self.starts_with("/*") => "block comments are not supported; use `%`".to_string(),
            _ => format!("unexpected character `{c}`"),
        };
        Err(syntax(span, what))
    }
}

fn syntax(span: Span, msg: impl Into<String>) -> ParseError {
    ParseError { span, kind: ParseErrorKind::Syntax(msg.into()) }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    tok: Tok,
    span: Span,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Result<Self, ParseError> {
        let mut lexer = Lexer::new(src);
        let (tok, span) = lexer.next_token()?;
        Ok(Parser { lexer, tok, span })
    }

    fn advance(&mut self) -> Result<(Tok, Span), ParseError> {
        let (tok, span) = self.lexer.next_token()?;
        let prev_tok = std::mem::replace(&mut self.tok, tok);
        let prev_span = std::mem::replace(&mut self.span, span);
        Ok((prev_tok, prev_span))
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        let msg = match &self.tok {
            Tok::Unsupported(op) => format!("connective `{op}` is not supported (expected {expected})"),
            other => format!("expected {expected}, found {other}"),
        };
        syntax(self.span, msg)
    }

    fn expect(&mut self, want: Tok, expected: &str) -> Result<Span, ParseError> {
        if self.tok == want {
            Ok(self.advance()?.1)
        } else {
            Err(self.unexpected(expected))
        }
    }

    fn lower_word(&mut self, expected: &str) -> Result<(String, Span), ParseError> {
        match &self.tok {
            Tok::Lower(_) => match self.advance()? {
                (Tok::Lower(w), span) => Ok((w, span)),
                _ => unreachable!(),
            },
            _ => Err(self.unexpected(expected)),
        }
    }

    fn document(&mut self) -> Result<FofDocument, ParseError> {
        let mut doc = FofDocument::default();
        let mut names: HashMap<String, Span> = HashMap::new();
        let mut conjecture: Option<String> = None;
        loop {
            match &self.tok {
                Tok::Eof => break,
                Tok::Lower(w) if w == "include" => {
                    self.advance()?;
                    self.expect(Tok::LParen, "`(`")?;
                    let (path, span) = match self.advance()? {
                        (Tok::Quoted(p), span) => (p, span),
                        (tok, span) => {
                            return Err(syntax(span, format!("expected a single-quoted path, found {tok}")))
                        }
                    };
                    validate_include_path(&path, span)?;
                    if self.tok == Tok::Comma {
                        return Err(syntax(self.span, "include selections are not supported"));
                    }
                    self.expect(Tok::RParen, "`)`")?;
                    self.expect(Tok::Dot, "`.`")?;
                    doc.includes.push(path);
                }
                Tok::Lower(w) if w == "fof" => {
                    let item = self.annotated()?;
                    if let Some(first) = names.get(&item.name) {
                        return Err(ParseError {
                            span: item.span,
                            kind: ParseErrorKind::DuplicateName { name: item.name, first: *first },
                        });
                    }
                    if item.role == Role::Conjecture {
                        if let Some(first) = &conjecture {
                            return Err(ParseError {
                                span: item.span,
                                kind: ParseErrorKind::MultipleConjectures {
                                    name: item.name,
                                    first: first.clone(),
                                },
                            });
                        }
                        conjecture = Some(item.name.clone());
                    }
                    names.insert(item.name.clone(), item.span);
                    doc.formulas.push(item);
                }
                Tok::Lower(w) if matches!(w.as_str(), "cnf" | "tff" | "thf" | "tcf") => {
                    return Err(syntax(self.span, format!("`{w}` items are not supported (only `fof` and `include`)")));
                }
                _ => return Err(self.unexpected("`fof` or `include`")),
            }
        }
        Ok(doc)
    }

    fn annotated(&mut self) -> Result<AnnotatedFormula, ParseError> {
        let (_, span) = self.advance()?;
        self.expect(Tok::LParen, "`(`")?;
        let (name, _) = self.lower_word("a formula name")?;
        self.expect(Tok::Comma, "`,`")?;
        let (role_word, role_span) = self.lower_word("a role")?;
        let role = Role::from_name(&role_word)
            .ok_or(ParseError { span: role_span, kind: ParseErrorKind::UnknownRole(role_word) })?;
        self.expect(Tok::Comma, "`,`")?;
        let formula = self.formula()?;
        if self.tok == Tok::Comma {
            return Err(syntax(self.span, "annotations after the formula are not supported"));
        }
        self.expect(Tok::RParen, "`)`")?;
        self.expect(Tok::Dot, "`.`")?;
        Ok(AnnotatedFormula { name, role, formula, span })
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        let build: fn(Box<Formula>, Box<Formula>) -> Formula = match self.tok {
            Tok::Implies => Formula::Implies,
            Tok::Iff => Formula::Iff,
            _ => return Ok(lhs),
        };
        self.advance()?;
        let rhs = self.disjunction()?;
        if matches!(self.tok, Tok::Implies | Tok::Iff) {
            return Err(syntax(self.span, format!("{} is non-associative; add parentheses", self.tok)));
        }
        Ok(build(Box::new(lhs), Box::new(rhs)))
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let first = self.conjunction()?;
        if self.tok != Tok::Pipe {
            return Ok(first);
        }
        let mut items = vec![first];
        while self.tok == Tok::Pipe {
            self.advance()?;
            items.push(self.conjunction()?);
        }
        Ok(Formula::Or(items))
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let first = self.unary()?;
        if self.tok != Tok::Amp {
            return Ok(first);
        }
        let mut items = vec![first];
        while self.tok == Tok::Amp {
            self.advance()?;
            items.push(self.unary()?);
        }
        Ok(Formula::And(items))
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match &self.tok {
            Tok::Tilde => {
                self.advance()?;
                Ok(Formula::Not(Box::new(self.unary()?)))
            }
            Tok::Bang | Tok::Question => {
                let (q, _) = self.advance()?;
                self.expect(Tok::LBracket, "`[`")?;
                let mut vars: Vec<String> = Vec::new();
                loop {
                    match self.advance()? {
                        (Tok::Upper(v), span) => {
                            if vars.contains(&v) {
                                return Err(syntax(span, format!("variable `{v}` quantified twice")));
                            }
                            vars.push(v);
                        }
                        (tok, span) => {
                            return Err(syntax(span, format!("expected a variable, found {tok}")));
                        }
                    }
                    match self.tok {
                        Tok::Comma => {
                            self.advance()?;
                        }
                        Tok::RBracket => {
                            self.advance()?;
                            break;
                        }
                        _ => return Err(self.unexpected("`,` or `]`")),
                    }
                }
                self.expect(Tok::Colon, "`:`")?;
                let body = Box::new(self.unary()?);
                Ok(if q == Tok::Bang { Formula::Forall(vars, body) } else { Formula::Exists(vars, body) })
            }
            Tok::LParen => {
                self.advance()?;
                let f = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            _ => self.atomic(),
        }
    }

    fn atomic(&mut self) -> Result<Formula, ParseError> {
        let start = self.span;
        let lhs = self.term()?;
        let negated = match self.tok {
            Tok::Eq => false,
            Tok::Neq => true,
            _ => {
                return match lhs {
                    Term::Fn(predicate, args) => Ok(Formula::Atom { predicate, args }),
                    Term::Var(v) => Err(syntax(start, format!("variable `{v}` used as a formula"))),
                };
            }
        };
        self.advance()?;
        let rhs = self.term()?;
        Ok(Formula::Equality { lhs, rhs, negated })
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        match self.advance()? {
            (Tok::Upper(v), _) => Ok(Term::Var(v)),
            (Tok::Lower(f), _) => {
                if self.tok != Tok::LParen {
                    return Ok(Term::Fn(f, Vec::new()));
                }
                self.advance()?;
                let mut args = vec![self.term()?];
                while self.tok == Tok::Comma {
                    self.advance()?;
                    args.push(self.term()?);
                }
                self.expect(Tok::RParen, "`,` or `)`")?;
                Ok(Term::Fn(f, args))
            }
            (Tok::Unsupported(op), span) => Err(syntax(span, format!("connective `{op}` is not supported"))),
            (tok, span) => Err(syntax(span, format!("expected a term or atom, found {tok}"))),
        }
    }
}

fn validate_include_path(path: &str, span: Span) -> Result<(), ParseError> {
    if path.is_empty() {
        return Err(syntax(span, "empty include path"));
    }
    if path.starts_with('/') {
        return Err(syntax(span, format!("include path `{path}` must be relative")));
    }
    if path.contains('\\') {
        return Err(syntax(span, format!("include path `{path}` must use forward slashes")));
    }
    Ok(())
}

/// Parses a FOF document.
pub fn parse_fof(text: &str) -> Result<FofDocument, ParseError> {
    Parser::new(text)?.document()
}

/// Parses a single formula (no `fof(...)` envelope).
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let mut p = Parser::new(text)?;
    let f = p.formula()?;
    if p.tok != Tok::Eof {
        return Err(p.unexpected("end of input"));
    }
    Ok(f)
}
