//! Capture-avoiding substitution and beta normalisation.

use std::collections::{BTreeMap, BTreeSet};

use super::{fresh_name, Term, Type, ARROW_BINDER};

type Subst = BTreeMap<String, Term>;

/// `t[x/u]`
pub fn subst(t: &Term, x: &str, u: &Term) -> Term {
    let mut s = Subst::new();
    s.insert(x.to_string(), u.clone());
    subst_term(t, &s)
}

/// Simultaneous substitution `t[x1/u1, ..., xn/un]`. Later pairs win on
/// duplicate names.
pub fn subst_many(t: &Term, pairs: &[(String, Term)]) -> Term {
    let s: Subst = pairs.iter().cloned().collect();
    subst_term(t, &s)
}

/// `A[x/u]`
pub fn subst_type(ty: &Type, x: &str, u: &Term) -> Type {
    let mut s = Subst::new();
    s.insert(x.to_string(), u.clone());
    subst_ty(ty, &s)
}

pub fn subst_type_many(ty: &Type, pairs: &[(String, Term)]) -> Type {
    let s: Subst = pairs.iter().cloned().collect();
    subst_ty(ty, &s)
}

/// Handles one binder: drops the shadowed key, and renames the binder when it
/// would capture a free variable of a substituted term. Returns the binder
/// name to use and the substitution for the body, or `None` when the body is
/// untouched.
fn enter_binder(
    x: &str,
    body_fv: &BTreeSet<String>,
    s: &Subst,
) -> Option<(String, Subst)> {
    let mut inner: Subst = s
        .iter()
        .filter(|(k, _)| k.as_str() != x && body_fv.contains(k.as_str()))
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect();
    if inner.is_empty() {
        return None;
    }
    if x == ARROW_BINDER {
        return Some((x.to_string(), inner));
    }
    let range_fv: BTreeSet<String> = inner.values().flat_map(Term::free_vars).collect();
    if !range_fv.contains(x) {
        return Some((x.to_string(), inner));
    }
    let mut avoid = range_fv;
    avoid.extend(body_fv.iter().cloned());
    avoid.extend(inner.keys().cloned());
    let y = fresh_name(x, &avoid);
    inner.insert(x.to_string(), Term::Var(y.clone()));
    Some((y, inner))
}

fn subst_term(t: &Term, s: &Subst) -> Term {
    if s.is_empty() {
        return t.clone();
    }
    match t {
        Term::Var(x) => s.get(x).cloned().unwrap_or_else(|| t.clone()),
        Term::Lambda(x, a, b) | Term::Forall(x, a, b) | Term::Choice(x, a, b) => {
            let (kind, ..) = t.as_binder().expect("binder");
            let a2 = subst_ty(a, s);
            match enter_binder(x, &b.free_vars(), s) {
                None => Term::binder(kind, x.clone(), a2, (**b).clone()),
                Some((y, inner)) => Term::binder(kind, y, a2, subst_term(b, &inner)),
            }
        }
        Term::App(f, a) => Term::app(subst_term(f, s), subst_term(a, s)),
        Term::False => Term::False,
        Term::Implies(p, q) => Term::implies(subst_term(p, s), subst_term(q, s)),
        Term::Eq(ty, l, r) => Term::eq(subst_ty(ty, s), subst_term(l, s), subst_term(r, s)),
    }
}

fn subst_ty(ty: &Type, s: &Subst) -> Type {
    if s.is_empty() {
        return ty.clone();
    }
    match ty {
        Type::Bool => Type::Bool,
        Type::Base(a, args) => Type::Base(a.clone(), args.iter().map(|t| subst_term(t, s)).collect()),
        Type::Pi(x, a, b) => {
            let a2 = subst_ty(a, s);
            match enter_binder(x, &b.free_vars(), s) {
                None => Type::pi(x.clone(), a2, (**b).clone()),
                Some((y, inner)) => Type::pi(y, a2, subst_ty(b, &inner)),
            }
        }
    }
}

/// Full beta normalisation. Terminates on simply typed input; untyped input
/// may loop.
pub fn beta_normalize(t: &Term) -> Term {
    match t {
        Term::Var(_) | Term::False => t.clone(),
        Term::App(f, a) => {
            let f = beta_normalize(f);
            let a = beta_normalize(a);
            match f {
                Term::Lambda(x, _, body) => beta_normalize(&subst(&body, &x, &a)),
                f => Term::app(f, a),
            }
        }
        Term::Lambda(x, a, b) | Term::Forall(x, a, b) | Term::Choice(x, a, b) => {
            let (kind, ..) = t.as_binder().expect("binder");
            Term::binder(kind, x.clone(), beta_normalize_type(a), beta_normalize(b))
        }
        Term::Implies(p, q) => Term::implies(beta_normalize(p), beta_normalize(q)),
        Term::Eq(ty, l, r) => Term::eq(beta_normalize_type(ty), beta_normalize(l), beta_normalize(r)),
    }
}

pub fn beta_normalize_type(ty: &Type) -> Type {
    match ty {
        Type::Bool => Type::Bool,
        Type::Base(a, args) => Type::Base(a.clone(), args.iter().map(beta_normalize).collect()),
        Type::Pi(x, a, b) => Type::pi(x.clone(), beta_normalize_type(a), beta_normalize_type(b)),
    }
}
