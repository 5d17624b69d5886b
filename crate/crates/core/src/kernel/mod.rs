//! Type checker for DHOL.
//!
//! Checking is bidirectional over a signature (the declarations already
//! accepted) and a local context of variables and assumptions. Whenever two
//! base types `a t̄` and `a ū` must agree and some `ti`, `ui` are not
//! syntactically equal, or a choice term needs justification, the checker
//! records a proof obligation instead of failing. Obligations are stated in
//! HOL: each carries the erased signature prefix, the erased local context
//! and the erased goal, ready for an external prover.
//!
//! The mode fixes how choice is handled:
//!
//! * [`Mode::StrongEpsilon`] asks for `∃x:A. t` at every `ε x:A. t`;
//! * [`Mode::WeakEpsilon`] only asks that `A` is inhabited;
//! * [`Mode::SimpleHol`] rejects dependent types and emits nothing for choice.

pub mod local;

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::erasure::{erase_declaration, erase_term, ErasureVariant};
use crate::syntax::sugar::{exists, top};
use crate::syntax::{
    alpha_eq, alpha_eq_type, beta_normalize, fresh_name, subst, subst_type, Declaration, Term, Theory, Type,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    StrongEpsilon,
    WeakEpsilon,
    SimpleHol,
}

impl Mode {
    /// The erasure used for obligations, `None` for plain HOL.
    pub fn variant(self) -> Option<ErasureVariant> {
        match self {
            Mode::StrongEpsilon => Some(ErasureVariant::Strong),
            Mode::WeakEpsilon => Some(ErasureVariant::Weak),
            Mode::SimpleHol => None,
        }
    }

    pub fn from_variant(v: ErasureVariant) -> Mode {
        match v {
            ErasureVariant::Strong => Mode::StrongEpsilon,
            ErasureVariant::Weak => Mode::WeakEpsilon,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ObligationKind {
    /// `t =_A u` for two base-type arguments that must agree.
    TypeEq,
    /// `∃x:A. t` justifying `ε x:A. t`.
    ChoiceWitness,
    /// `∃x:A. ⊤` justifying a choice over `A`.
    TypeInhabited,
    /// The problem's conjecture itself.
    Conjecture,
}

impl ObligationKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ObligationKind::TypeEq => "type-eq",
            ObligationKind::ChoiceWitness => "choice-witness",
            ObligationKind::TypeInhabited => "type-inhabited",
            ObligationKind::Conjecture => "conjecture",
        }
    }
}

/// Where an obligation came from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Origin {
    /// Index into the checked theory; `None` for the conjecture.
    pub decl: Option<usize>,
    /// Declaration name or axiom label.
    pub label: String,
    /// Sequence number of the choice node within the run, for choice obligations.
    pub choice_site: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct Obligation {
    pub id: String,
    pub kind: ObligationKind,
    /// Erased signature prefix before the originating declaration.
    pub hol_theory: Arc<Theory>,
    /// Erased local context at the point of emission.
    pub hol_context: Theory,
    /// Erased goal.
    pub conjecture: Term,
    /// The goal before erasure, for diagnostics.
    pub dhol_goal: Term,
    pub origin: Origin,
    /// Closed by the built-in local prover.
    pub auto_discharged: bool,
}

impl Obligation {
    /// Theory and context as one HOL problem.
    pub fn problem(&self) -> Theory {
        self.hol_theory.concat(&self.hol_context)
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum TypeError {
    #[error("unbound identifier `{0}`")]
    Unbound(String),
    #[error("`{0}` is not a base type")]
    UnknownBaseType(String),
    #[error("base type `{name}` expects {expected} argument(s), got {found}")]
    Arity { name: String, expected: usize, found: usize },
    #[error("`{term}` has type {ty}, which is not a function type")]
    NotAFunction { term: Term, ty: Type },
    #[error("`{term}` has type {found}, expected a boolean")]
    NotBoolean { term: Term, found: Type },
    #[error("type mismatch: expected {expected}, found {found}")]
    Mismatch { expected: Type, found: Type },
    #[error("dependent type {0} is not allowed in simple HOL")]
    Dependent(Type),
    #[error("`{0}` is already declared")]
    Duplicate(String),
    #[error("`{0}` clashes with a name reserved for erasure")]
    Reserved(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Diagnostic {
    pub decl: Option<usize>,
    pub label: String,
    pub error: TypeError,
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.label, self.error)
    }
}

#[derive(Clone, Debug)]
pub struct CheckReport {
    pub mode: Mode,
    pub errors: Vec<Diagnostic>,
    pub obligations: Vec<Obligation>,
    /// Erasure of every accepted declaration.
    pub hol_theory: Arc<Theory>,
    pub hol_conjecture: Option<Term>,
}

impl CheckReport {
    pub fn is_well_formed(&self) -> bool {
        self.errors.is_empty()
    }

    /// Obligations the local prover could not close.
    pub fn open(&self) -> impl Iterator<Item = &Obligation> {
        self.obligations.iter().filter(|o| !o.auto_discharged)
    }
}

struct Checker {
    mode: Mode,
    sig: Theory,
    hol: Arc<Theory>,
    ctx: Vec<Declaration>,
    hol_ctx: Vec<Declaration>,
    obligations: Vec<Obligation>,
    origin: Origin,
    hyps: usize,
    choice_sites: usize,
}

type Res<T> = Result<T, TypeError>;

impl Checker {
    fn new(mode: Mode, sig: Theory) -> Self {
        let hol = Arc::new(Theory::from_decls(sig.iter().flat_map(|d| translate_decl(mode, d)).collect()));
        Checker {
            mode,
            sig,
            hol,
            ctx: Vec::new(),
            hol_ctx: Vec::new(),
            obligations: Vec::new(),
            origin: Origin { decl: None, label: String::new(), choice_site: None },
            hyps: 0,
            choice_sites: 0,
        }
    }

    fn translate(&self, t: &Term) -> Term {
        match self.mode.variant() {
            Some(v) => erase_term(t, v),
            None => t.clone(),
        }
    }

    fn lookup(&self, x: &str) -> Option<&Type> {
        self.ctx
            .iter()
            .rev()
            .find_map(|d| match d {
                Declaration::Const(c, ty) if c == x => Some(ty),
                _ => None,
            })
            .or_else(|| self.sig.const_type(x))
    }

    fn in_scope(&self) -> std::collections::BTreeSet<String> {
        let mut names = self.sig.names();
        names.extend(self.ctx.iter().filter_map(|d| d.name().map(str::to_string)));
        names
    }

    fn mark(&self) -> (usize, usize) {
        (self.ctx.len(), self.hol_ctx.len())
    }

    fn reset(&mut self, m: (usize, usize)) {
        self.ctx.truncate(m.0);
        self.hol_ctx.truncate(m.1);
    }

    /// Enters binder `x:A` over `body`, renaming `x` if it is already in scope.
    fn bind(&mut self, x: &str, ty: &Type, body: &Term) -> (String, Term) {
        let mut avoid = self.in_scope();
        let (x, body) = if avoid.contains(x) {
            avoid.extend(body.free_vars());
            let y = fresh_name(x, &avoid);
            let b = subst(body, x, &Term::var(y.clone()));
            (y, b)
        } else {
            (x.to_string(), body.clone())
        };
        self.push_decl(Declaration::Const(x.clone(), ty.clone()));
        (x, body)
    }

    fn assume(&mut self, p: &Term) {
        self.hyps += 1;
        self.push_decl(Declaration::Axiom(format!("hyp{}", self.hyps), p.clone()));
    }

    fn push_decl(&mut self, d: Declaration) {
        self.hol_ctx.extend(translate_decl(self.mode, &d));
        self.ctx.push(d);
    }

    fn emit(&mut self, kind: ObligationKind, goal: Term, site: Option<usize>) {
        let conjecture = self.translate(&goal);
        let mut origin = self.origin.clone();
        origin.choice_site = site;
        self.obligations.push(Obligation {
            id: String::new(),
            kind,
            hol_theory: self.hol.clone(),
            hol_context: Theory::from_decls(self.hol_ctx.clone()),
            conjecture,
            dhol_goal: goal,
            origin,
            auto_discharged: false,
        });
    }

    fn infer(&mut self, t: &Term) -> Res<Type> {
        match t {
            Term::Var(x) => self.lookup(x).cloned().ok_or_else(|| TypeError::Unbound(x.clone())),
            Term::False => Ok(Type::Bool),
            Term::App(f, a) => match self.infer(f)? {
                Type::Pi(x, dom, cod) => {
                    self.check(a, &dom)?;
                    Ok(subst_type(&cod, &x, a))
                }
                ty => Err(TypeError::NotAFunction { term: (**f).clone(), ty }),
            },
            Term::Lambda(x, a, b) => {
                self.wf_type(a)?;
                let m = self.mark();
                let (y, b) = self.bind(x, a, b);
                let cod = self.infer(&b);
                self.reset(m);
                Ok(Type::pi(y, (**a).clone(), cod?))
            }
            Term::Implies(p, q) => {
                self.check_bool(p)?;
                let m = self.mark();
                self.assume(p);
                let r = self.check_bool(q);
                self.reset(m);
                r.map(|_| Type::Bool)
            }
            Term::Eq(a, l, r) => {
                self.wf_type(a)?;
                self.check(l, a)?;
                self.check(r, a)?;
                Ok(Type::Bool)
            }
            Term::Forall(x, a, b) => {
                self.wf_type(a)?;
                let m = self.mark();
                let (_, b) = self.bind(x, a, b);
                let r = self.check_bool(&b);
                self.reset(m);
                r.map(|_| Type::Bool)
            }
            Term::Choice(x, a, b) => {
                self.wf_type(a)?;
                let m = self.mark();
                let (_, body) = self.bind(x, a, b);
                let r = self.check_bool(&body);
                self.reset(m);
                r?;
                self.choice_sites += 1;
                let site = Some(self.choice_sites);
                match self.mode {
                    Mode::StrongEpsilon => {
                        self.emit(ObligationKind::ChoiceWitness, exists(x.clone(), (**a).clone(), (**b).clone()), site)
                    }
                    Mode::WeakEpsilon => {
                        self.emit(ObligationKind::TypeInhabited, exists(x.clone(), (**a).clone(), top()), site)
                    }
                    Mode::SimpleHol => {}
                }
                Ok((**a).clone())
            }
        }
    }

    fn check(&mut self, t: &Term, expected: &Type) -> Res<()> {
        let found = self.infer(t)?;
        self.type_equal(&found, expected)
    }

    fn check_bool(&mut self, t: &Term) -> Res<()> {
        match self.infer(t)? {
            Type::Bool => Ok(()),
            found => Err(TypeError::NotBoolean { term: t.clone(), found }),
        }
    }

    /// Unifies two well-formed types, emitting an obligation for each pair of
    /// base-type arguments that are not syntactically equal.
    fn type_equal(&mut self, found: &Type, expected: &Type) -> Res<()> {
        let mismatch = || TypeError::Mismatch { expected: expected.clone(), found: found.clone() };
        match (found, expected) {
            (Type::Bool, Type::Bool) => Ok(()),
            (Type::Base(a, ts), Type::Base(b, us)) if a == b && ts.len() == us.len() => {
                let tele = self.sig.base_type(a).ok_or_else(|| TypeError::UnknownBaseType(a.clone()))?.to_vec();
                let mut pending = Vec::new();
                for (i, (t, u)) in ts.iter().zip(us).enumerate() {
                    if alpha_eq(&beta_normalize(t), &beta_normalize(u)) {
                        continue;
                    }
                    if self.mode == Mode::SimpleHol {
                        return Err(mismatch());
                    }
                    let ty = tele_type(&tele, ts, i);
                    pending.push(Term::eq(ty, t.clone(), u.clone()));
                }
                for goal in pending {
                    self.emit(ObligationKind::TypeEq, goal, None);
                }
                Ok(())
            }
            (Type::Pi(x, a, b), Type::Pi(y, a2, b2)) => {
                self.type_equal(a, a2)?;
                let m = self.mark();
                let mut avoid = self.in_scope();
                avoid.extend(b.free_vars());
                avoid.extend(b2.free_vars());
                let z = fresh_name(x, &avoid);
                self.push_decl(Declaration::Const(z.clone(), (**a).clone()));
                let zv = Term::var(z);
                let r = self.type_equal(&subst_type(b, x, &zv), &subst_type(b2, y, &zv));
                self.reset(m);
                r
            }
            _ => Err(mismatch()),
        }
    }

    fn wf_type(&mut self, ty: &Type) -> Res<()> {
        match ty {
            Type::Bool => Ok(()),
            Type::Base(a, args) => {
                let tele = self.sig.base_type(a).ok_or_else(|| TypeError::UnknownBaseType(a.clone()))?.to_vec();
                if tele.len() != args.len() {
                    return Err(TypeError::Arity { name: a.clone(), expected: tele.len(), found: args.len() });
                }
                if self.mode == Mode::SimpleHol && !args.is_empty() {
                    return Err(TypeError::Dependent(ty.clone()));
                }
                for (i, t) in args.iter().enumerate() {
                    let expected = tele_type(&tele, args, i);
                    self.check(t, &expected)?;
                }
                Ok(())
            }
            Type::Pi(x, a, b) => {
                self.wf_type(a)?;
                if self.mode == Mode::SimpleHol && x != crate::syntax::ARROW_BINDER && b.has_free(x) {
                    return Err(TypeError::Dependent(ty.clone()));
                }
                let m = self.mark();
                let mut avoid = self.in_scope();
                avoid.extend(b.free_vars());
                let (z, b) = if avoid.contains(x) {
                    let z = fresh_name(x, &avoid);
                    let b = subst_type(b, x, &Term::var(z.clone()));
                    (z, b)
                } else {
                    (x.clone(), (**b).clone())
                };
                self.push_decl(Declaration::Const(z, (**a).clone()));
                let r = self.wf_type(&b);
                self.reset(m);
                r
            }
        }
    }

    fn check_decl(&mut self, d: &Declaration) -> Res<()> {
        if let Some(name) = d.name() {
            if self.sig.names().contains(name) {
                return Err(TypeError::Duplicate(name.to_string()));
            }
            if self.mode != Mode::SimpleHol && name.contains('*') {
                return Err(TypeError::Reserved(name.to_string()));
            }
        }
        match d {
            Declaration::BaseType(_, tele) => {
                let m = self.mark();
                let mut r = Ok(());
                for (x, ty) in tele {
                    if self.mode == Mode::SimpleHol {
                        r = Err(TypeError::Dependent(Type::pi(x.clone(), ty.clone(), Type::Bool)));
                        break;
                    }
                    r = self.wf_type(ty);
                    if r.is_err() {
                        break;
                    }
                    self.push_decl(Declaration::Const(x.clone(), ty.clone()));
                }
                self.reset(m);
                r
            }
            Declaration::Const(_, ty) => self.wf_type(ty),
            Declaration::Axiom(_, t) => self.check_bool(t),
        }
    }

    fn accept(&mut self, d: Declaration) {
        let extra = translate_decl(self.mode, &d);
        Arc::make_mut(&mut self.hol).decls.extend(extra);
        self.sig.push(d);
    }
}

fn translate_decl(mode: Mode, d: &Declaration) -> Vec<Declaration> {
    match mode.variant() {
        Some(v) => erase_declaration(d, v),
        None => vec![d.clone()],
    }
}

/// Type of the `i`-th telescope entry with earlier binders instantiated by `args`.
fn tele_type(tele: &[(String, Type)], args: &[Term], i: usize) -> Type {
    let sub: Vec<(String, Term)> = tele[..i].iter().map(|(x, _)| x.clone()).zip(args[..i].iter().cloned()).collect();
    crate::syntax::subst::subst_type_many(&tele[i].1, &sub)
}

fn label_of(d: &Declaration) -> String {
    match d {
        Declaration::BaseType(a, _) | Declaration::Const(a, _) => a.clone(),
        Declaration::Axiom(l, _) => l.clone(),
    }
}

/// Same declarations up to alpha-equivalence and assumption labels.
fn same_context(a: &Theory, b: &Theory) -> bool {
    a.len() == b.len()
        && a.iter().zip(b.iter()).all(|(x, y)| match (x, y) {
            (Declaration::Axiom(_, s), Declaration::Axiom(_, t)) => alpha_eq(s, t),
            (Declaration::Const(c, s), Declaration::Const(d, t)) => c == d && alpha_eq_type(s, t),
            (Declaration::BaseType(..), _) => x == y,
            _ => false,
        })
}

fn finish(mut obligations: Vec<Obligation>) -> Vec<Obligation> {
    let mut kept: Vec<Obligation> = Vec::new();
    for o in obligations.drain(..) {
        let dup = kept.iter().any(|k| {
            k.kind == o.kind
                && (Arc::ptr_eq(&k.hol_theory, &o.hol_theory) || k.hol_theory == o.hol_theory)
                && same_context(&k.hol_context, &o.hol_context)
                && alpha_eq(&k.conjecture, &o.conjecture)
        });
        if !dup {
            kept.push(o);
        }
    }
    for (i, o) in kept.iter_mut().enumerate() {
        o.id = format!("o{}", i + 1);
        o.auto_discharged = local::discharge(&o.hol_theory, &o.hol_context, &o.conjecture);
    }
    kept
}

/// Infers the type of `t` under a well-formed theory and context.
pub fn infer_type(thy: &Theory, ctx: &Theory, t: &Term, mode: Mode) -> Result<(Type, Vec<Obligation>), TypeError> {
    let mut c = Checker::new(mode, thy.clone());
    c.origin.label = "term".into();
    for d in ctx {
        c.push_decl(d.clone());
    }
    let ty = c.infer(t)?;
    Ok((ty, finish(c.obligations)))
}

/// Checks that `a` and `b` are equal types, returning the obligations that
/// make them so.
pub fn type_equal(thy: &Theory, ctx: &Theory, a: &Type, b: &Type, mode: Mode) -> Result<Vec<Obligation>, TypeError> {
    let mut c = Checker::new(mode, thy.clone());
    c.origin.label = "type".into();
    for d in ctx {
        c.push_decl(d.clone());
    }
    c.type_equal(a, b)?;
    Ok(finish(c.obligations))
}

/// Checks declarations in order; each is checked against the accepted prefix.
/// A failing declaration is reported and skipped so checking can continue.
pub fn check_theory(thy: &Theory, conjecture: Option<&Term>, mode: Mode) -> CheckReport {
    let mut c = Checker::new(mode, Theory::new());
    let mut errors = Vec::new();
    for (i, d) in thy.iter().enumerate() {
        c.origin = Origin { decl: Some(i), label: label_of(d), choice_site: None };
        let before = c.obligations.len();
        match c.check_decl(d) {
            Ok(()) => c.accept(d.clone()),
            Err(error) => {
                c.obligations.truncate(before);
                errors.push(Diagnostic { decl: Some(i), label: label_of(d), error });
            }
        }
    }
    let mut hol_conjecture = None;
    if let Some(goal) = conjecture {
        c.origin = Origin { decl: None, label: "conjecture".into(), choice_site: None };
        let before = c.obligations.len();
        match c.check_bool(goal) {
            Ok(()) => {
                c.emit(ObligationKind::Conjecture, goal.clone(), None);
                hol_conjecture = Some(c.translate(goal));
            }
            Err(error) => {
                c.obligations.truncate(before);
                errors.push(Diagnostic { decl: None, label: "conjecture".into(), error });
            }
        }
    }
    CheckReport { mode, errors, obligations: finish(c.obligations), hol_theory: c.hol, hol_conjecture }
}
