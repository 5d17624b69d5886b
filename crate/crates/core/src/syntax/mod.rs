//! Abstract syntax shared by DHOL and HOL.
//!
//! Terms and types are plain named trees. Binders carry the name chosen by the
//! user; capture avoidance happens in [`subst`] and equality up to renaming in
//! [`alpha`]. Derived connectives are built by the constructors in [`sugar`]
//! and never stored as separate nodes.

pub mod alpha;
pub mod parse;
pub mod print;
pub mod subst;
pub mod sugar;
pub mod synth;

use std::collections::BTreeSet;
use std::fmt;

pub use alpha::{alpha_eq, alpha_eq_type};
pub use parse::{parse_term, parse_theory, parse_type, Document, ParseError, Pos};
pub use subst::{beta_normalize, subst, subst_many, subst_type};

/// Binder name used for non-dependent arrows `A -> B`.
pub const ARROW_BINDER: &str = "_";

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    Lambda(String, Box<Type>, Box<Term>),
    App(Box<Term>, Box<Term>),
    False,
    Implies(Box<Term>, Box<Term>),
    Eq(Box<Type>, Box<Term>, Box<Term>),
    Forall(String, Box<Type>, Box<Term>),
    Choice(String, Box<Type>, Box<Term>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Type {
    Bool,
    Base(String, Vec<Term>),
    Pi(String, Box<Type>, Box<Type>),
}

/// The three binding forms of the term language.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Binder {
    Lambda,
    Forall,
    Choice,
}

impl Term {
    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    pub fn app(f: Term, a: Term) -> Term {
        Term::App(Box::new(f), Box::new(a))
    }

    pub fn apps(f: Term, args: impl IntoIterator<Item = Term>) -> Term {
        args.into_iter().fold(f, Term::app)
    }

    pub fn lambda(x: impl Into<String>, ty: Type, body: Term) -> Term {
        Term::Lambda(x.into(), Box::new(ty), Box::new(body))
    }

    pub fn implies(p: Term, q: Term) -> Term {
        Term::Implies(Box::new(p), Box::new(q))
    }

    pub fn eq(ty: Type, l: Term, r: Term) -> Term {
        Term::Eq(Box::new(ty), Box::new(l), Box::new(r))
    }

    pub fn forall(x: impl Into<String>, ty: Type, body: Term) -> Term {
        Term::Forall(x.into(), Box::new(ty), Box::new(body))
    }

    pub fn choice(x: impl Into<String>, ty: Type, body: Term) -> Term {
        Term::Choice(x.into(), Box::new(ty), Box::new(body))
    }

    pub fn binder(kind: Binder, x: impl Into<String>, ty: Type, body: Term) -> Term {
        match kind {
            Binder::Lambda => Term::lambda(x, ty, body),
            Binder::Forall => Term::forall(x, ty, body),
            Binder::Choice => Term::choice(x, ty, body),
        }
    }

    /// View a binding node as `(kind, name, annotation, body)`.
    pub fn as_binder(&self) -> Option<(Binder, &str, &Type, &Term)> {
        match self {
            Term::Lambda(x, a, b) => Some((Binder::Lambda, x, a, b)),
            Term::Forall(x, a, b) => Some((Binder::Forall, x, a, b)),
            Term::Choice(x, a, b) => Some((Binder::Choice, x, a, b)),
            _ => None,
        }
    }

    /// Splits `f a1 ... an` into `(f, [a1, ..., an])`.
    pub fn spine(&self) -> (&Term, Vec<&Term>) {
        let mut args = Vec::new();
        let mut head = self;
        while let Term::App(f, a) = head {
            args.push(&**a);
            head = f;
        }
        args.reverse();
        (head, args)
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    pub fn has_free(&self, x: &str) -> bool {
        self.free_vars().contains(x)
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(x) => {
                if !bound.iter().any(|b| b == x) {
                    out.insert(x.clone());
                }
            }
            Term::Lambda(x, a, b) | Term::Forall(x, a, b) | Term::Choice(x, a, b) => {
                a.collect_free(bound, out);
                bound.push(x.clone());
                b.collect_free(bound, out);
                bound.pop();
            }
            Term::App(f, a) => {
                f.collect_free(bound, out);
                a.collect_free(bound, out);
            }
            Term::False => {}
            Term::Implies(p, q) => {
                p.collect_free(bound, out);
                q.collect_free(bound, out);
            }
            Term::Eq(ty, l, r) => {
                ty.collect_free(bound, out);
                l.collect_free(bound, out);
                r.collect_free(bound, out);
            }
        }
    }

    /// Every name occurring in the term, bound or free.
    pub fn all_names(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(x) => {
                out.insert(x.clone());
            }
            Term::Lambda(x, a, b) | Term::Forall(x, a, b) | Term::Choice(x, a, b) => {
                out.insert(x.clone());
                a.all_names(out);
                b.all_names(out);
            }
            Term::App(f, a) | Term::Implies(f, a) => {
                f.all_names(out);
                a.all_names(out);
            }
            Term::False => {}
            Term::Eq(ty, l, r) => {
                ty.all_names(out);
                l.all_names(out);
                r.all_names(out);
            }
        }
    }

    pub fn contains_choice(&self) -> bool {
        match self {
            Term::Choice(..) => true,
            Term::Var(_) | Term::False => false,
            Term::Lambda(_, a, b) | Term::Forall(_, a, b) => a.contains_choice() || b.contains_choice(),
            Term::App(f, a) | Term::Implies(f, a) => f.contains_choice() || a.contains_choice(),
            Term::Eq(ty, l, r) => ty.contains_choice() || l.contains_choice() || r.contains_choice(),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) | Term::False => 1,
            Term::Lambda(_, a, b) | Term::Forall(_, a, b) | Term::Choice(_, a, b) => {
                1 + a.size() + b.size()
            }
            Term::App(f, a) | Term::Implies(f, a) => 1 + f.size() + a.size(),
            Term::Eq(ty, l, r) => 1 + ty.size() + l.size() + r.size(),
        }
    }
}

impl Type {
    pub fn base(name: impl Into<String>, args: Vec<Term>) -> Type {
        Type::Base(name.into(), args)
    }

    pub fn simple(name: impl Into<String>) -> Type {
        Type::Base(name.into(), Vec::new())
    }

    pub fn pi(x: impl Into<String>, dom: Type, cod: Type) -> Type {
        Type::Pi(x.into(), Box::new(dom), Box::new(cod))
    }

    pub fn arrow(dom: Type, cod: Type) -> Type {
        Type::pi(ARROW_BINDER, dom, cod)
    }

    /// `A1 -> ... -> An -> cod`
    pub fn arrows(doms: impl IntoIterator<Item = Type>, cod: Type) -> Type {
        let doms: Vec<Type> = doms.into_iter().collect();
        doms.into_iter().rev().fold(cod, |acc, d| Type::arrow(d, acc))
    }

    /// Simple types: `o`, nullary base types, and arrows between simple types.
    pub fn is_simple(&self) -> bool {
        match self {
            Type::Bool => true,
            Type::Base(_, args) => args.is_empty(),
            Type::Pi(x, a, b) => a.is_simple() && b.is_simple() && !b.has_free(x),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    pub fn has_free(&self, x: &str) -> bool {
        self.free_vars().contains(x)
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Type::Bool => {}
            Type::Base(_, args) => args.iter().for_each(|t| t.collect_free(bound, out)),
            Type::Pi(x, a, b) => {
                a.collect_free(bound, out);
                bound.push(x.clone());
                b.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn all_names(&self, out: &mut BTreeSet<String>) {
        match self {
            Type::Bool => {}
            Type::Base(a, args) => {
                out.insert(a.clone());
                args.iter().for_each(|t| t.all_names(out));
            }
            Type::Pi(x, a, b) => {
                out.insert(x.clone());
                a.all_names(out);
                b.all_names(out);
            }
        }
    }

    pub fn contains_choice(&self) -> bool {
        match self {
            Type::Bool => false,
            Type::Base(_, args) => args.iter().any(Term::contains_choice),
            Type::Pi(_, a, b) => a.contains_choice() || b.contains_choice(),
        }
    }

    fn size(&self) -> usize {
        match self {
            Type::Bool => 1,
            Type::Base(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
            Type::Pi(_, a, b) => 1 + a.size() + b.size(),
        }
    }
}

/// A single entry of a theory or context.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Declaration {
    /// `a : Πx1:A1. ... Πxn:An. tp`
    BaseType(String, Vec<(String, Type)>),
    /// A typed constant (in a theory) or variable (in a context).
    Const(String, Type),
    /// An axiom (in a theory) or assumption (in a context).
    Axiom(String, Term),
}

impl Declaration {
    /// The name a declaration introduces, if any.
    pub fn name(&self) -> Option<&str> {
        match self {
            Declaration::BaseType(a, _) | Declaration::Const(a, _) => Some(a),
            Declaration::Axiom(..) => None,
        }
    }
}

/// An ordered sequence of declarations.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Theory {
    pub decls: Vec<Declaration>,
}

/// A theory without base-type declarations: variables and assumptions.
pub type Context = Theory;

impl Theory {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_decls(decls: Vec<Declaration>) -> Self {
        Theory { decls }
    }

    pub fn push(&mut self, d: Declaration) {
        self.decls.push(d);
    }

    pub fn is_empty(&self) -> bool {
        self.decls.is_empty()
    }

    pub fn len(&self) -> usize {
        self.decls.len()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Declaration> {
        self.decls.iter()
    }

    /// `self` followed by `other`.
    pub fn concat(&self, other: &Theory) -> Theory {
        let mut decls = self.decls.clone();
        decls.extend(other.decls.iter().cloned());
        Theory { decls }
    }

    /// Type of the most recent constant named `x`.
    pub fn const_type(&self, x: &str) -> Option<&Type> {
        self.decls.iter().rev().find_map(|d| match d {
            Declaration::Const(c, ty) if c == x => Some(ty),
            _ => None,
        })
    }

    pub fn base_type(&self, a: &str) -> Option<&[(String, Type)]> {
        self.decls.iter().rev().find_map(|d| match d {
            Declaration::BaseType(b, tele) if b == a => Some(tele.as_slice()),
            _ => None,
        })
    }

    pub fn axioms(&self) -> impl Iterator<Item = (&str, &Term)> {
        self.decls.iter().filter_map(|d| match d {
            Declaration::Axiom(l, t) => Some((l.as_str(), t)),
            _ => None,
        })
    }

    pub fn names(&self) -> BTreeSet<String> {
        self.decls.iter().filter_map(|d| d.name().map(str::to_string)).collect()
    }

    pub fn has_base_types(&self) -> bool {
        self.decls.iter().any(|d| matches!(d, Declaration::BaseType(..)))
    }
}

impl<'a> IntoIterator for &'a Theory {
    type Item = &'a Declaration;
    type IntoIter = std::slice::Iter<'a, Declaration>;
    fn into_iter(self) -> Self::IntoIter {
        self.decls.iter()
    }
}

/// Returns `base` if it is not in `avoid`, otherwise the first of `base1`,
/// `base2`, ... that is not. Trailing digits of `base` are stripped first so
/// repeated freshening does not pile up suffixes.
pub fn fresh_name(base: &str, avoid: &BTreeSet<String>) -> String {
    let base = if base.is_empty() || base == ARROW_BINDER { "x" } else { base };
    if !avoid.contains(base) {
        return base.to_string();
    }
    let stem = base.trim_end_matches(|c: char| c.is_ascii_digit());
    let stem = if stem.is_empty() { "x" } else { stem };
    (1..)
        .map(|i| format!("{stem}{i}"))
        .find(|n| !avoid.contains(n))
        .expect("unbounded suffix search")
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print::term_to_string(self))
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print::type_to_string(self))
    }
}
