//! Reader for the `.dhol` surface syntax.
//!
//! ```text
//! file      ::= stmt*
//! stmt      ::= "type" ident ":" ("pi" ident ":" type ".")* "tp" "."
//!             | "const" name ":" type "."
//!             | "axiom" ident ":" term "."
//!             | "conjecture" ident? ":" term "."
//! type      ::= "pi" binds "." type | tyapp (("->" | ">") type)?
//! tyapp     ::= "o" | "$o" | ident atom* | "(" type ")"
//! term      ::= binder | impl
//! binder    ::= ("^" | "!" | "?" | "eps") binds "." term
//! binds     ::= ident ":" type ("," ident ":" type)*
//! impl      ::= or ("=>" term)?
//! or        ::= and ("|" and)*
//! and       ::= unary ("&" unary)*
//! unary     ::= "~" unary | binder | eq
//! eq        ::= app (("=" | "!=") ("[" type "]")? app)?
//! app       ::= atom+
//! atom      ::= ident | numeral | "$false" | "$true" | "(" term ")"
//! ```
//!
//! Comments run from `%` to the end of the line. A numeral `k > 0` stands for
//! `s (... (s 0))`; `0` is an ordinary constant name. Identifiers may contain
//! `'` and `*` after the first character. The elaborator resolves every name
//! against the declarations read so far and recovers the subscript of a bare
//! `=` from the type of its left operand.

use std::fmt;

use thiserror::Error;

use super::synth::synth;
use super::{sugar, Declaration, Term, Theory, Type};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("{pos}: {msg}")]
    Syntax { pos: Pos, msg: String },
    #[error("{pos}: unknown identifier `{name}`")]
    UnknownIdentifier { pos: Pos, name: String },
    #[error("{pos}: base type `{name}` expects {expected} argument(s), found {found}")]
    Arity { pos: Pos, name: String, expected: usize, found: usize },
}

impl ParseError {
    pub fn pos(&self) -> Pos {
        match self {
            ParseError::Syntax { pos, .. }
            | ParseError::UnknownIdentifier { pos, .. }
            | ParseError::Arity { pos, .. } => *pos,
        }
    }
}

/// A parsed `.dhol` file.
#[derive(Clone, Debug, PartialEq)]
pub struct Document {
    pub theory: Theory,
    pub conjecture: Option<Term>,
    /// Source position of each declaration, parallel to `theory.decls`.
    pub positions: Vec<Pos>,
    pub conjecture_pos: Option<Pos>,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Num(u64),
    Colon,
    Dot,
    Comma,
    LParen,
    RParen,
    LBrack,
    RBrack,
    Lambda,
    Bang,
    Question,
    Tilde,
    Implies,
    Eq,
    Neq,
    And,
    Or,
    Arrow,
    False,
    True,
    DollarO,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Num(n) => write!(f, "`{n}`"),
            Tok::Eof => f.write_str("end of input"),
            other => write!(f, "`{}`", tok_text(other)),
        }
    }
}

fn tok_text(t: &Tok) -> &'static str {
    match t {
        Tok::Colon => ":",
        Tok::Dot => ".",
        Tok::Comma => ",",
        Tok::LParen => "(",
        Tok::RParen => ")",
        Tok::LBrack => "[",
        Tok::RBrack => "]",
        Tok::Lambda => "^",
        Tok::Bang => "!",
        Tok::Question => "?",
        Tok::Tilde => "~",
        Tok::Implies => "=>",
        Tok::Eq => "=",
        Tok::Neq => "!=",
        Tok::And => "&",
        Tok::Or => "|",
        Tok::Arrow => "->",
        Tok::False => "$false",
        Tok::True => "$true",
        Tok::DollarO => "$o",
        _ => "?",
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic()
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\'' || c == '*'
}

fn lex(text: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    macro_rules! bump {
        ($n:expr) => {{
            for _ in 0..$n {
                if chars[i] == '\n' {
                    line += 1;
                    col = 1;
                } else {
                    col += 1;
                }
                i += 1;
            }
        }};
    }
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        if c.is_whitespace() {
            bump!(1);
            continue;
        }
        if c == '%' {
            while i < chars.len() && chars[i] != '\n' {
                bump!(1);
            }
            continue;
        }
        let peek = chars.get(i + 1).copied();
        let (tok, len) = match c {
            ':' => (Tok::Colon, 1),
            '.' => (Tok::Dot, 1),
            ',' => (Tok::Comma, 1),
            '(' => (Tok::LParen, 1),
            ')' => (Tok::RParen, 1),
            '[' => (Tok::LBrack, 1),
            ']' => (Tok::RBrack, 1),
            '^' => (Tok::Lambda, 1),
            '?' => (Tok::Question, 1),
            '~' => (Tok::Tilde, 1),
            '&' => (Tok::And, 1),
            '|' => (Tok::Or, 1),
            '>' => (Tok::Arrow, 1),
            '!' if peek == Some('=') => (Tok::Neq, 2),
            '!' => (Tok::Bang, 1),
            '=' if peek == Some('>') => (Tok::Implies, 2),
            '=' => (Tok::Eq, 1),
            '-' if peek == Some('>') => (Tok::Arrow, 2),
            '$' => {
                let mut j = i + 1;
                while j < chars.len() && chars[j].is_ascii_alphanumeric() {
                    j += 1;
                }
                let word: String = chars[i..j].iter().collect();
                let tok = match word.as_str() {
                    "$false" => Tok::False,
                    "$true" => Tok::True,
                    "$o" => Tok::DollarO,
                    _ => {
                        return Err(ParseError::Syntax { pos, msg: format!("unknown token `{word}`") })
                    }
                };
                (tok, j - i)
            }
            c if c.is_ascii_digit() => {
                let mut j = i;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                if j < chars.len() && is_ident_char(chars[j]) {
                    return Err(ParseError::Syntax { pos, msg: "identifiers must start with a letter".into() });
                }
                let digits: String = chars[i..j].iter().collect();
                let n = digits
                    .parse()
                    .map_err(|_| ParseError::Syntax { pos, msg: format!("numeral `{digits}` too large") })?;
                (Tok::Num(n), j - i)
            }
            c if is_ident_start(c) => {
                let mut j = i;
                while j < chars.len() && is_ident_char(chars[j]) {
                    j += 1;
                }
                (Tok::Ident(chars[i..j].iter().collect()), j - i)
            }
            other => {
                return Err(ParseError::Syntax { pos, msg: format!("unexpected character `{other}`") })
            }
        };
        out.push((tok, pos));
        bump!(len);
    }
    out.push((Tok::Eof, Pos { line, col }));
    Ok(out)
}

const KEYWORDS: &[&str] = &["type", "const", "axiom", "conjecture", "tp", "pi", "eps", "o"];

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    thy: Theory,
    locals: Vec<(String, Type)>,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn new(text: &str, thy: Theory) -> PResult<Self> {
        Ok(Parser { toks: lex(text)?, at: 0, thy, locals: Vec::new() })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn next(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> PResult<T> {
        Err(ParseError::Syntax { pos: self.pos(), msg: msg.into() })
    }

    fn expect(&mut self, t: Tok) -> PResult<()> {
        if *self.peek() == t {
            self.next();
            Ok(())
        } else {
            self.err(format!("expected {t}, found {}", self.peek()))
        }
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn expect_kw(&mut self, kw: &str) -> PResult<()> {
        if self.is_kw(kw) {
            self.next();
            Ok(())
        } else {
            self.err(format!("expected `{kw}`, found {}", self.peek()))
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.next();
                Ok(s)
            }
            other => self.err(format!("expected identifier, found {other}")),
        }
    }

    // ---- types ----

    fn ty(&mut self) -> PResult<Type> {
        if self.is_kw("pi") {
            self.next();
            let binds = self.binds()?;
            self.expect(Tok::Dot)?;
            let cod = self.ty();
            self.locals.truncate(self.locals.len() - binds.len());
            let cod = cod?;
            return Ok(binds.into_iter().rev().fold(cod, |acc, (x, a)| Type::pi(x, a, acc)));
        }
        let dom = self.ty_app()?;
        if *self.peek() == Tok::Arrow {
            self.next();
            let cod = self.ty()?;
            return Ok(Type::arrow(dom, cod));
        }
        Ok(dom)
    }

    fn ty_app(&mut self) -> PResult<Type> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::DollarO => {
                self.next();
                Ok(Type::Bool)
            }
            Tok::Ident(s) if s == "o" => {
                self.next();
                Ok(Type::Bool)
            }
            Tok::LParen => {
                self.next();
                let t = self.ty()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            Tok::Ident(_) => {
                let name = self.ident()?;
                let arity = match self.thy.base_type(&name) {
                    Some(tele) => tele.len(),
                    None => return Err(ParseError::UnknownIdentifier { pos, name }),
                };
                let mut args = Vec::new();
                while self.starts_atom() {
                    args.push(self.atom()?);
                }
                if args.len() != arity {
                    return Err(ParseError::Arity { pos, name, expected: arity, found: args.len() });
                }
                Ok(Type::Base(name, args))
            }
            other => self.err(format!("expected a type, found {other}")),
        }
    }

    /// Parses `x : A, y : B, ...`, pushing each variable into scope.
    fn binds(&mut self) -> PResult<Vec<(String, Type)>> {
        let mut out = Vec::new();
        loop {
            let x = match self.ident() {
                Ok(x) => x,
                Err(e) => {
                    self.locals.truncate(self.locals.len() - out.len());
                    return Err(e);
                }
            };
            let ann = self.expect(Tok::Colon).and_then(|_| self.ty());
            let ann = match ann {
                Ok(a) => a,
                Err(e) => {
                    self.locals.truncate(self.locals.len() - out.len());
                    return Err(e);
                }
            };
            self.locals.push((x.clone(), ann.clone()));
            out.push((x, ann));
            if *self.peek() == Tok::Comma {
                self.next();
            } else {
                return Ok(out);
            }
        }
    }

    // ---- terms ----

    fn term(&mut self) -> PResult<Term> {
        if let Some(b) = self.binder_kind() {
            return self.binder(b);
        }
        let lhs = self.or()?;
        if *self.peek() == Tok::Implies {
            self.next();
            let rhs = self.term()?;
            return Ok(Term::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn binder_kind(&self) -> Option<&'static str> {
        match self.peek() {
            Tok::Lambda => Some("^"),
            Tok::Bang => Some("!"),
            Tok::Question => Some("?"),
            Tok::Ident(s) if s == "eps" => Some("eps"),
            _ => None,
        }
    }

    fn binder(&mut self, kind: &str) -> PResult<Term> {
        self.next();
        let binds = self.binds()?;
        let body = self.expect(Tok::Dot).and_then(|_| self.term());
        self.locals.truncate(self.locals.len() - binds.len());
        let body = body?;
        Ok(binds.into_iter().rev().fold(body, |acc, (x, a)| match kind {
            "^" => Term::lambda(x, a, acc),
            "!" => Term::forall(x, a, acc),
            "?" => sugar::exists(x, a, acc),
            _ => Term::choice(x, a, acc),
        }))
    }

    fn or(&mut self) -> PResult<Term> {
        let mut lhs = self.and()?;
        while *self.peek() == Tok::Or {
            self.next();
            let rhs = self.and()?;
            lhs = sugar::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> PResult<Term> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::And {
            self.next();
            let rhs = self.unary()?;
            lhs = sugar::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Term> {
        if *self.peek() == Tok::Tilde {
            self.next();
            return Ok(sugar::not(self.unary()?));
        }
        if let Some(b) = self.binder_kind() {
            return self.binder(b);
        }
        self.eq()
    }

    fn eq(&mut self) -> PResult<Term> {
        let pos = self.pos();
        let lhs = self.app()?;
        let negate = match self.peek() {
            Tok::Eq => false,
            Tok::Neq => true,
            _ => return Ok(lhs),
        };
        self.next();
        let ty = if *self.peek() == Tok::LBrack {
            self.next();
            let ty = self.ty()?;
            self.expect(Tok::RBrack)?;
            ty
        } else {
            synth(&self.thy, &mut self.locals, &lhs).map_err(|msg| ParseError::Syntax {
                pos,
                msg: format!("cannot determine the type of the equation: {msg}"),
            })?
        };
        let rhs = self.app()?;
        let e = Term::eq(ty, lhs, rhs);
        Ok(if negate { sugar::not(e) } else { e })
    }

    fn app(&mut self) -> PResult<Term> {
        let mut f = self.atom()?;
        while self.starts_atom() {
            let a = self.atom()?;
            f = Term::app(f, a);
        }
        Ok(f)
    }

    fn starts_atom(&self) -> bool {
        match self.peek() {
            Tok::Ident(s) => !KEYWORDS.contains(&s.as_str()),
            Tok::Num(_) | Tok::False | Tok::True | Tok::LParen => true,
            _ => false,
        }
    }

    fn resolve(&self, name: &str, pos: Pos) -> PResult<Term> {
        let known = self.locals.iter().any(|(x, _)| x == name) || self.thy.const_type(name).is_some();
        if known {
            Ok(Term::var(name))
        } else {
            Err(ParseError::UnknownIdentifier { pos, name: name.to_string() })
        }
    }

    fn atom(&mut self) -> PResult<Term> {
        let pos = self.pos();
        match self.next() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => self.resolve(&s, pos),
            Tok::Num(n) => {
                let zero = self.resolve("0", pos)?;
                if n == 0 {
                    return Ok(zero);
                }
                let succ = self.resolve("s", pos)?;
                Ok((0..n).fold(zero, |acc, _| Term::app(succ.clone(), acc)))
            }
            Tok::False => Ok(Term::False),
            Tok::True => Ok(sugar::top()),
            Tok::LParen => {
                let t = self.term()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            other => Err(ParseError::Syntax { pos, msg: format!("expected a term, found {other}") }),
        }
    }
}

fn check_fresh(thy: &Theory, name: &str, pos: Pos) -> PResult<()> {
    if thy.names().contains(name) {
        Err(ParseError::Syntax { pos, msg: format!("duplicate declaration of `{name}`") })
    } else {
        Ok(())
    }
}

/// Parses a whole `.dhol` file.
pub fn parse_theory(text: &str) -> Result<Document, ParseError> {
    let mut p = Parser::new(text, Theory::new())?;
    let mut positions = Vec::new();
    let mut conjecture = None;
    let mut conjecture_pos = None;
    loop {
        let pos = p.pos();
        let kw = match p.peek().clone() {
            Tok::Eof => break,
            Tok::Ident(kw) => kw,
            other => return p.err(format!("expected a declaration, found {other}")),
        };
        p.next();
        match statement(&mut p, &kw, pos)? {
            Stmt::Decl(d) => {
                p.thy.push(d);
                positions.push(pos);
            }
            Stmt::Conjecture(t) => {
                if conjecture.is_some() {
                    return Err(ParseError::Syntax { pos, msg: "more than one conjecture".into() });
                }
                conjecture = Some(t);
                conjecture_pos = Some(pos);
            }
        }
    }
    Ok(Document { theory: p.thy, conjecture, positions, conjecture_pos })
}

enum Stmt {
    Decl(Declaration),
    Conjecture(Term),
}

fn statement(p: &mut Parser, kw: &str, pos: Pos) -> PResult<Stmt> {
    let stmt = match kw {
        "type" => {
            let name = p.ident()?;
            check_fresh(&p.thy, &name, pos)?;
            p.expect(Tok::Colon)?;
            let mut tele = Vec::new();
            while p.is_kw("pi") {
                p.next();
                let binds = p.binds()?;
                p.expect(Tok::Dot)?;
                tele.extend(binds);
            }
            p.expect_kw("tp")?;
            p.locals.clear();
            Stmt::Decl(Declaration::BaseType(name, tele))
        }
        "const" => {
            let name = match p.next() {
                Tok::Num(0) => "0".to_string(),
                Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => s,
                other => return Err(ParseError::Syntax { pos, msg: format!("expected a constant name, found {other}") }),
            };
            check_fresh(&p.thy, &name, pos)?;
            p.expect(Tok::Colon)?;
            Stmt::Decl(Declaration::Const(name, p.ty()?))
        }
        "axiom" => {
            let label = p.ident()?;
            p.expect(Tok::Colon)?;
            Stmt::Decl(Declaration::Axiom(label, p.term()?))
        }
        "conjecture" => {
            if matches!(p.peek(), Tok::Ident(_)) {
                p.ident()?;
            }
            p.expect(Tok::Colon)?;
            Stmt::Conjecture(p.term()?)
        }
        other => return Err(ParseError::Syntax { pos, msg: format!("unknown declaration keyword `{other}`") }),
    };
    p.expect(Tok::Dot)?;
    Ok(stmt)
}

/// Parses a single term against the declarations of `thy`.
pub fn parse_term(text: &str, thy: &Theory) -> Result<Term, ParseError> {
    parse_term_in(text, thy, &[])
}

/// Like [`parse_term`] with extra local variables in scope.
pub fn parse_term_in(text: &str, thy: &Theory, locals: &[(String, Type)]) -> Result<Term, ParseError> {
    let mut p = Parser::new(text, thy.clone())?;
    p.locals = locals.to_vec();
    let t = p.term()?;
    p.expect(Tok::Eof)?;
    Ok(t)
}

pub fn parse_type(text: &str, thy: &Theory) -> Result<Type, ParseError> {
    let mut p = Parser::new(text, thy.clone())?;
    let t = p.ty()?;
    p.expect(Tok::Eof)?;
    Ok(t)
}
