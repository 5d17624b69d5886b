//! TPTP THF output and a reader for that output.
//!
//! Constants are mangled to THF lower words (`*` becomes `STAR`, `'` becomes
//! `PRIME`, other non-alphanumerics `_`; names that do not start with a
//! lowercase letter get a `c_` prefix). Bound variables become upper words.
//! Derived connectives are re-sugared on output and expanded again on input,
//! so reading an emitted problem gives back an alpha-equal theory.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use thiserror::Error;

use crate::syntax::sugar::{self, view, Sugared};
use crate::syntax::synth::synth;
use crate::syntax::{subst_many, Declaration, Term, Theory, Type};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ThfError {
    #[error("symbols `{0}` and `{1}` both mangle to `{2}`")]
    Collision(String, String, String),
    #[error("dependent construct in HOL output: {0}")]
    Dependent(String),
    #[error("THF line {line}: {msg}")]
    Syntax { line: usize, msg: String },
}

#[derive(Clone, Debug)]
pub struct ThfProblem {
    pub name: String,
    pub header: Vec<String>,
    /// Original name → THF name, for constants and base types.
    pub symbols: BTreeMap<String, String>,
    pub text: String,
}

/// THF lower word for a constant or base type name.
pub fn mangle(name: &str) -> String {
    let mut s = String::new();
    for ch in name.chars() {
        match ch {
            '*' => s.push_str("STAR"),
            '\'' => s.push_str("PRIME"),
            c if c.is_ascii_alphanumeric() || c == '_' => s.push(c),
            _ => s.push('_'),
        }
    }
    if !s.starts_with(|c: char| c.is_ascii_lowercase()) {
        s.insert_str(0, "c_");
    }
    s
}

fn upper_word(name: &str) -> String {
    let mut s = String::new();
    for ch in name.chars() {
        match ch {
            '*' => s.push_str("STAR"),
            '\'' => s.push_str("PRIME"),
            c if c.is_ascii_alphanumeric() || c == '_' => s.push(c),
            _ => s.push('_'),
        }
    }
    match s.chars().next() {
        Some(c) if c.is_ascii_lowercase() => s[..1].to_ascii_uppercase() + &s[1..],
        Some(c) if c.is_ascii_uppercase() => s,
        _ => format!("V{s}"),
    }
}

struct Emitter {
    symbols: BTreeMap<String, String>,
    /// THF names of enclosing binders, innermost last, with their source names.
    scope: Vec<(String, String)>,
}

impl Emitter {
    fn symbol(&self, x: &str) -> String {
        self.symbols.get(x).cloned().unwrap_or_else(|| mangle(x))
    }

    fn ty(&self, ty: &Type) -> Result<String, ThfError> {
        Ok(match ty {
            Type::Bool => "$o".into(),
            Type::Base(a, args) if args.is_empty() => self.symbol(a),
            Type::Base(..) => return Err(ThfError::Dependent(ty.to_string())),
            Type::Pi(x, a, b) => {
                if b.has_free(x) {
                    return Err(ThfError::Dependent(ty.to_string()));
                }
                let dom = self.ty(a)?;
                let dom = if matches!(**a, Type::Pi(..)) { format!("({dom})") } else { dom };
                format!("{dom} > {}", self.ty(b)?)
            }
        })
    }

    fn binder(&mut self, sym: &str, x: &str, ty: &Type, body: &Term) -> Result<String, ThfError> {
        let base = upper_word(x);
        let taken: BTreeSet<String> = self.scope.iter().map(|(t, _)| t.clone()).collect();
        let mut v = base.clone();
        let mut i = 1;
        while taken.contains(&v) {
            v = format!("{base}{i}");
            i += 1;
        }
        let tys = self.ty(ty)?;
        self.scope.push((v.clone(), x.to_string()));
        let b = self.term(body);
        self.scope.pop();
        Ok(format!("({sym}[{v}: {tys}]: {})", b?))
    }

    fn term(&mut self, t: &Term) -> Result<String, ThfError> {
        if let Some(s) = view(t) {
            return Ok(match s {
                Sugared::Top => "$true".into(),
                Sugared::Not(p) => format!("(~ {})", self.term(p)?),
                Sugared::And(p, q) => format!("({} & {})", self.term(p)?, self.term(q)?),
                Sugared::Or(p, q) => format!("({} | {})", self.term(p)?, self.term(q)?),
                Sugared::Exists(x, ty, b) => self.binder("?", x, ty, b)?,
                Sugared::Neq(_, l, r) => format!("({} != {})", self.term(l)?, self.term(r)?),
            });
        }
        Ok(match t {
            Term::Var(x) => match self.scope.iter().rev().find(|(_, src)| src == x) {
                Some((v, _)) => v.clone(),
                None => self.symbol(x),
            },
            Term::False => "$false".into(),
            Term::App(..) => {
                let (head, args) = t.spine();
                let mut s = format!("({}", self.term(head)?);
                for a in args {
                    write!(s, " @ {}", self.term(a)?).unwrap();
                }
                s.push(')');
                s
            }
            Term::Implies(p, q) => format!("({} => {})", self.term(p)?, self.term(q)?),
            Term::Eq(_, l, r) => format!("({} = {})", self.term(l)?, self.term(r)?),
            Term::Lambda(x, a, b) => self.binder("^", x, a, b)?,
            Term::Forall(x, a, b) => self.binder("!", x, a, b)?,
            Term::Choice(x, a, b) => self.binder("@+", x, a, b)?,
        })
    }
}

/// Builds the symbol map for every constant and base type, rejecting collisions.
pub fn symbol_map(thy: &Theory) -> Result<BTreeMap<String, String>, ThfError> {
    let mut symbols = BTreeMap::new();
    let mut back: BTreeMap<String, String> = BTreeMap::new();
    for d in thy {
        if let Some(name) = d.name() {
            let m = mangle(name);
            if let Some(prev) = back.get(&m) {
                if prev != name {
                    return Err(ThfError::Collision(prev.clone(), name.to_string(), m));
                }
            }
            back.insert(m.clone(), name.to_string());
            symbols.insert(name.to_string(), m);
        }
    }
    Ok(symbols)
}

/// Prints a simply typed theory and optional conjecture as a THF problem.
pub fn emit_thf(thy: &Theory, conjecture: Option<&Term>, name: &str, header: &[String]) -> Result<ThfProblem, ThfError> {
    let symbols = symbol_map(thy)?;
    let mut em = Emitter { symbols, scope: Vec::new() };
    let mut text = String::new();
    for h in header {
        writeln!(text, "% {h}").unwrap();
    }
    let mut labels = BTreeSet::new();
    let mut label = |base: &str| {
        let base = mangle(base);
        let mut l = base.clone();
        let mut i = 2;
        while !labels.insert(l.clone()) {
            l = format!("{base}_{i}");
            i += 1;
        }
        l
    };
    for d in thy {
        match d {
            Declaration::BaseType(a, tele) => {
                if !tele.is_empty() {
                    return Err(ThfError::Dependent(format!("base type {a}")));
                }
                let s = em.symbol(a);
                writeln!(text, "thf({}, type, {s}: $tType).", label(&format!("{a}_type_decl"))).unwrap();
            }
            Declaration::Const(c, ty) => {
                let s = em.symbol(c);
                let tys = em.ty(ty)?;
                writeln!(text, "thf({}, type, {s}: {tys}).", label(&format!("{c}_decl"))).unwrap();
            }
            Declaration::Axiom(l, t) => {
                let f = em.term(t)?;
                writeln!(text, "thf({}, axiom, {f}).", label(l)).unwrap();
            }
        }
    }
    if let Some(c) = conjecture {
        let f = em.term(c)?;
        writeln!(text, "thf({}, conjecture, {f}).", label("goal")).unwrap();
    }
    Ok(ThfProblem { name: name.to_string(), header: header.to_vec(), symbols: em.symbols, text })
}

// ---------------------------------------------------------------------------
// Reader

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Lower(String),
    Upper(String),
    Dollar(String),
    Sym(&'static str),
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ThfError> {
    const SYMS: [&str; 19] =
        ["@+", "=>", "!=", "(", ")", "[", "]", ",", ":", ".", "@", "^", "!", "?", "~", "=", "&", "|", ">"];
    let mut out = Vec::new();
    for (ln, line) in src.lines().enumerate() {
        let line_no = ln + 1;
        let line = line.split('%').next().unwrap_or("");
        let b = line.as_bytes();
        let mut i = 0;
        while i < b.len() {
            let c = b[i] as char;
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            if c.is_ascii_alphanumeric() || c == '_' || c == '$' {
                let start = i;
                i += 1;
                while i < b.len() && ((b[i] as char).is_ascii_alphanumeric() || b[i] == b'_') {
                    i += 1;
                }
                let w = &line[start..i];
                let tok = if c == '$' {
                    Tok::Dollar(w.to_string())
                } else if c.is_ascii_uppercase() {
                    Tok::Upper(w.to_string())
                } else {
                    Tok::Lower(w.to_string())
                };
                out.push((tok, line_no));
                continue;
            }
            match SYMS.iter().find(|s| line[i..].starts_with(**s)) {
                Some(s) => {
                    out.push((Tok::Sym(s), line_no));
                    i += s.len();
                }
                None => return Err(ThfError::Syntax { line: line_no, msg: format!("unexpected character `{c}`") }),
            }
        }
    }
    Ok(out)
}

struct Reader {
    toks: Vec<(Tok, usize)>,
    at: usize,
    sig: Theory,
    locals: Vec<(String, Type)>,
}

impl Reader {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ThfError> {
        let line = self.toks.get(self.at).or(self.toks.last()).map_or(0, |t| t.1);
        Err(ThfError::Syntax { line, msg: msg.into() })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|t| &t.0)
    }

    fn is(&self, s: &str) -> bool {
        matches!(self.peek(), Some(Tok::Sym(x)) if *x == s)
    }

    fn expect(&mut self, s: &str) -> Result<(), ThfError> {
        if self.is(s) {
            self.at += 1;
            Ok(())
        } else {
            self.err(format!("expected `{s}`"))
        }
    }

    fn lower(&mut self) -> Result<String, ThfError> {
        match self.peek() {
            Some(Tok::Lower(w)) => {
                let w = w.clone();
                self.at += 1;
                Ok(w)
            }
            _ => self.err("expected a lower word"),
        }
    }

    fn ty(&mut self) -> Result<Type, ThfError> {
        let dom = self.ty_atom()?;
        if self.is(">") {
            self.at += 1;
            Ok(Type::arrow(dom, self.ty()?))
        } else {
            Ok(dom)
        }
    }

    fn ty_atom(&mut self) -> Result<Type, ThfError> {
        match self.peek().cloned() {
            Some(Tok::Dollar(d)) if d == "$o" => {
                self.at += 1;
                Ok(Type::Bool)
            }
            Some(Tok::Lower(a)) => {
                self.at += 1;
                Ok(Type::simple(a))
            }
            Some(Tok::Sym("(")) => {
                self.at += 1;
                let t = self.ty()?;
                self.expect(")")?;
                Ok(t)
            }
            _ => self.err("expected a type"),
        }
    }

    fn formula(&mut self) -> Result<Term, ThfError> {
        let lhs = self.app()?;
        let op = match self.peek() {
            Some(Tok::Sym(s)) if ["=>", "&", "|", "=", "!="].contains(s) => *s,
            _ => return Ok(lhs),
        };
        let mut acc = lhs;
        while self.is(op) {
            self.at += 1;
            let rhs = self.app()?;
            acc = match op {
                "=>" => Term::implies(acc, rhs),
                "&" => sugar::and(acc, rhs),
                "|" => sugar::or(acc, rhs),
                _ => {
                    let ty = synth(&self.sig, &mut self.locals, &acc).or_else(|e| self.err(e))?;
                    let e = Term::eq(ty, acc, rhs);
                    if op == "!=" {
                        sugar::not(e)
                    } else {
                        e
                    }
                }
            };
            if op == "=>" || op == "=" || op == "!=" {
                break;
            }
        }
        Ok(acc)
    }

    fn app(&mut self) -> Result<Term, ThfError> {
        let mut t = self.unit()?;
        while self.is("@") {
            self.at += 1;
            t = Term::app(t, self.unit()?);
        }
        Ok(t)
    }

    fn unit(&mut self) -> Result<Term, ThfError> {
        match self.peek().cloned() {
            Some(Tok::Sym("(")) => {
                self.at += 1;
                let t = self.formula()?;
                self.expect(")")?;
                Ok(t)
            }
            Some(Tok::Sym("~")) => {
                self.at += 1;
                Ok(sugar::not(self.unit()?))
            }
            Some(Tok::Sym(q)) if ["!", "?", "^", "@+"].contains(&q) => {
                self.at += 1;
                self.expect("[")?;
                let mut binds = Vec::new();
                loop {
                    let v = match self.peek() {
                        Some(Tok::Upper(v)) => v.clone(),
                        _ => return self.err("expected a variable"),
                    };
                    self.at += 1;
                    self.expect(":")?;
                    let ty = self.ty()?;
                    binds.push((v, ty));
                    if self.is(",") {
                        self.at += 1;
                    } else {
                        break;
                    }
                }
                self.expect("]")?;
                self.expect(":")?;
                let n = self.locals.len();
                self.locals.extend(binds.iter().cloned());
                let body = self.unit();
                self.locals.truncate(n);
                let mut acc = body?;
                for (v, ty) in binds.into_iter().rev() {
                    acc = match q {
                        "!" => Term::forall(v, ty, acc),
                        "?" => sugar::exists(v, ty, acc),
                        "^" => Term::lambda(v, ty, acc),
                        _ => Term::choice(v, ty, acc),
                    };
                }
                Ok(acc)
            }
            Some(Tok::Dollar(d)) if d == "$false" => {
                self.at += 1;
                Ok(Term::False)
            }
            Some(Tok::Dollar(d)) if d == "$true" => {
                self.at += 1;
                Ok(sugar::top())
            }
            Some(Tok::Upper(v)) | Some(Tok::Lower(v)) => {
                self.at += 1;
                Ok(Term::var(v))
            }
            _ => self.err("expected a formula"),
        }
    }
}

/// Reads THF text produced by [`emit_thf`]. Names are returned as they
/// appear in the file; use [`demangle`] to map them back.
pub fn read_thf(text: &str) -> Result<(Theory, Option<Term>), ThfError> {
    let mut r = Reader { toks: lex(text)?, at: 0, sig: Theory::new(), locals: Vec::new() };
    let mut conjecture = None;
    while r.peek().is_some() {
        match r.peek() {
            Some(Tok::Lower(w)) if w == "thf" => r.at += 1,
            _ => return r.err("expected `thf`"),
        }
        r.expect("(")?;
        let label = r.lower()?;
        r.expect(",")?;
        let role = r.lower()?;
        r.expect(",")?;
        match role.as_str() {
            "type" => {
                let name = r.lower()?;
                r.expect(":")?;
                if matches!(r.peek(), Some(Tok::Dollar(d)) if d == "$tType") {
                    r.at += 1;
                    r.sig.push(Declaration::BaseType(name, Vec::new()));
                } else {
                    let ty = r.ty()?;
                    r.sig.push(Declaration::Const(name, ty));
                }
            }
            "axiom" => {
                let f = r.formula()?;
                r.sig.push(Declaration::Axiom(label, f));
            }
            "conjecture" => {
                if conjecture.is_some() {
                    return r.err("second conjecture");
                }
                conjecture = Some(r.formula()?);
            }
            other => return r.err(format!("unsupported role `{other}`")),
        }
        r.expect(")")?;
        r.expect(".")?;
    }
    Ok((r.sig, conjecture))
}

/// Maps THF names in a read-back theory to the original names.
pub fn demangle(thy: &Theory, conjecture: Option<&Term>, symbols: &BTreeMap<String, String>) -> (Theory, Option<Term>) {
    let back: BTreeMap<&str, &str> = symbols.iter().map(|(o, m)| (m.as_str(), o.as_str())).collect();
    let pairs: Vec<(String, Term)> =
        back.iter().filter(|(m, o)| m != o).map(|(m, o)| (m.to_string(), Term::var(*o))).collect();
    let name = |n: &str| back.get(n).map_or_else(|| n.to_string(), |o| o.to_string());
    let ty = |t: &Type| rename_type(t, &back);
    let decls = thy
        .iter()
        .map(|d| match d {
            Declaration::BaseType(a, tele) => Declaration::BaseType(name(a), tele.clone()),
            Declaration::Const(c, t) => Declaration::Const(name(c), ty(t)),
            Declaration::Axiom(l, t) => Declaration::Axiom(l.clone(), rename_term(&subst_many(t, &pairs), &back)),
        })
        .collect();
    (Theory::from_decls(decls), conjecture.map(|c| rename_term(&subst_many(c, &pairs), &back)))
}

fn rename_type(t: &Type, back: &BTreeMap<&str, &str>) -> Type {
    match t {
        Type::Bool => Type::Bool,
        Type::Base(a, args) => Type::base(back.get(a.as_str()).map_or(a.as_str(), |o| o).to_string(), args.clone()),
        Type::Pi(x, a, b) => Type::pi(x.clone(), rename_type(a, back), rename_type(b, back)),
    }
}

/// Renames base types inside binder annotations and equality subscripts.
fn rename_term(t: &Term, back: &BTreeMap<&str, &str>) -> Term {
    match t {
        Term::Var(_) | Term::False => t.clone(),
        Term::App(f, a) => Term::app(rename_term(f, back), rename_term(a, back)),
        Term::Implies(p, q) => Term::implies(rename_term(p, back), rename_term(q, back)),
        Term::Eq(ty, l, r) => Term::eq(rename_type(ty, back), rename_term(l, back), rename_term(r, back)),
        Term::Lambda(x, a, b) => Term::lambda(x.clone(), rename_type(a, back), rename_term(b, back)),
        Term::Forall(x, a, b) => Term::forall(x.clone(), rename_type(a, back), rename_term(b, back)),
        Term::Choice(x, a, b) => Term::choice(x.clone(), rename_type(a, back), rename_term(b, back)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{alpha_eq, parse_theory};

    #[test]
    fn mangling() {
        assert_eq!(mangle("a*"), "aSTAR");
        assert_eq!(mangle("0"), "c_0");
        assert_eq!(mangle("Foo"), "c_Foo");
        assert_eq!(mangle("x'"), "xPRIME");
        assert_eq!(upper_word("x"), "X");
        assert_eq!(upper_word("_"), "V_");
    }

    #[test]
    fn false_conjecture() {
        let p = emit_thf(&Theory::new(), Some(&Term::False), "t", &[]).unwrap();
        assert_eq!(p.text, "thf(goal, conjecture, $false).\n");
    }

    #[test]
    fn choice_binder() {
        let d = parse_theory("type a : tp. conjecture : (eps x : a . $true) = (eps x : a . $true).").unwrap();
        let p = emit_thf(&d.theory, d.conjecture.as_ref(), "t", &[]).unwrap();
        assert!(p.text.contains("(@+[X: a]: $true)"), "{}", p.text);
    }

    #[test]
    fn collisions_are_errors() {
        let d = parse_theory("type a : tp. const a* : a. const aSTAR : a.").unwrap();
        assert!(matches!(symbol_map(&d.theory), Err(ThfError::Collision(..))));
    }

    #[test]
    fn dependent_input_rejected() {
        let d = parse_theory("type nat : tp. type fin : pi n : nat . tp.").unwrap();
        assert!(matches!(emit_thf(&d.theory, None, "t", &[]), Err(ThfError::Dependent(_))));
    }

    #[test]
    fn round_trip() {
        let src = "type a : tp. const a* : o -> a -> a -> o. const c : a. const 0 : a.
            axiom c_type : a* $false c c.
            axiom per : ! x : o . ! u : a . ! v : a . a* x u v => u = v.
            axiom misc : ? x : a . ~ (x = c) & (x != 0 | $true).
            conjecture : (^ x : a . ^ x : a . eps y : a . a* $false x y) c c = c.";
        let d = parse_theory(src).unwrap();
        let p = emit_thf(&d.theory, d.conjecture.as_ref(), "t", &[]).unwrap();
        let (thy, conj) = read_thf(&p.text).unwrap();
        let (thy, conj) = demangle(&thy, conj.as_ref(), &p.symbols);
        assert_eq!(thy.len(), d.theory.len());
        for (x, y) in thy.iter().zip(d.theory.iter()) {
            match (x, y) {
                (Declaration::Axiom(_, s), Declaration::Axiom(_, t)) => assert!(alpha_eq(s, t), "{s}\n{t}"),
                _ => assert_eq!(x, y),
            }
        }
        assert!(alpha_eq(&conj.unwrap(), d.conjecture.as_ref().unwrap()));
        assert!(p.text.contains("(^[X: a]: (^[X1: a]: (@+[Y: a]: (aSTAR @ $false @ X1 @ Y))))"), "{}", p.text);
    }
}
