//! Translation from DHOL to HOL.
//!
//! Dependent base types `a t1 ... tn` erase to their head `a`; the lost
//! information is kept in a partial equivalence relation `a*` taking the
//! erased arguments first. A DHOL term inhabits `A` iff the PER `A*` relates
//! its erasure to itself, which is why quantifiers and constants pick up
//! `A* x x` guards.
//!
//! The two variants agree everywhere except at choice nodes:
//!
//! * strong: `ε x:A. t  ↦  ε x:Ā. A* x x ∧ t̄`
//! * weak:   `ε x:A. t  ↦  ε z:Â. (∃x:Â. A*xx ∧ t̂) ∧ z = (ε x:Â. A*xx ∧ t̂)
//!                                ∨ ¬(∃x:Â. A*xx ∧ t̂) ∧ z = (ε x:Â. A*xx)`
//!
//! The inner `z = ...` of the weak form is primitive HOL equality. Derived
//! connectives in the output are expanded to `⊥`, `⇒`, `∀`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::syntax::sugar::{and, exists, not, or};
use crate::syntax::{fresh_name, subst, subst_type, Declaration, Term, Theory, Type};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ErasureVariant {
    Strong,
    Weak,
}

impl ErasureVariant {
    pub fn as_str(self) -> &'static str {
        match self {
            ErasureVariant::Strong => "strong",
            ErasureVariant::Weak => "weak",
        }
    }
}

/// Name of the PER constant generated for base type `a`.
pub fn per_name(a: &str) -> String {
    format!("{a}*")
}

/// `Ā`: drops base-type arguments and Π dependencies.
pub fn erase_type(ty: &Type) -> Type {
    match ty {
        Type::Bool => Type::Bool,
        Type::Base(a, _) => Type::simple(a.clone()),
        Type::Pi(_, a, b) => Type::arrow(erase_type(a), erase_type(b)),
    }
}

/// `A*` as a binary predicate `λu v. A* u v` over `Ā`.
pub fn per(ty: &Type, variant: ErasureVariant) -> Term {
    let mut avoid = ty.free_vars();
    let u = fresh_name("u", &avoid);
    avoid.insert(u.clone());
    let v = fresh_name("v", &avoid);
    let erased = erase_type(ty);
    Term::lambda(
        u.clone(),
        erased.clone(),
        Term::lambda(v.clone(), erased, per_apply(ty, variant, &Term::var(u), &Term::var(v))),
    )
}

/// `A* t u` in beta-normal form at the PER layer. `t` and `u` must already be
/// erased.
pub fn per_apply(ty: &Type, variant: ErasureVariant, t: &Term, u: &Term) -> Term {
    match ty {
        Type::Bool => Term::eq(Type::Bool, t.clone(), u.clone()),
        Type::Base(a, args) => {
            let args = args.iter().map(|s| erase_term(s, variant));
            Term::apps(Term::var(per_name(a)), args.chain([t.clone(), u.clone()]))
        }
        Type::Pi(x, dom, cod) => {
            // ∀x,y:Ā. A* x y ⇒ B* (t x) (u y)
            let mut avoid: BTreeSet<String> = t.free_vars();
            avoid.extend(u.free_vars());
            avoid.extend(dom.free_vars());
            let mut cod_fv = cod.free_vars();
            cod_fv.remove(x);
            avoid.extend(cod_fv);
            let first = fresh_name(x, &avoid);
            avoid.insert(first.clone());
            let second = fresh_name(&format!("{first}'"), &avoid);
            let cod = subst_type(cod, x, &Term::var(first.clone()));
            let (fx, sy) = (Term::var(first.clone()), Term::var(second.clone()));
            let dom_e = erase_type(dom);
            Term::forall(
                first,
                dom_e.clone(),
                Term::forall(
                    second,
                    dom_e,
                    Term::implies(
                        per_apply(dom, variant, &fx, &sy),
                        per_apply(&cod, variant, &Term::app(t.clone(), fx), &Term::app(u.clone(), sy)),
                    ),
                ),
            )
        }
    }
}

/// Renames binder `x` when the annotation mentions a free variable of the same
/// name, since the generated guard `A* x x` would otherwise capture it.
fn unclash(x: &str, ty: &Type, body: &Term) -> (String, Term) {
    let ty_fv = ty.free_vars();
    if !ty_fv.contains(x) {
        return (x.to_string(), body.clone());
    }
    let mut avoid = ty_fv;
    avoid.extend(body.free_vars());
    let y = fresh_name(x, &avoid);
    let body = subst(body, x, &Term::var(y.clone()));
    (y, body)
}

/// `t̄` (strong) or `t̂` (weak).
pub fn erase_term(t: &Term, variant: ErasureVariant) -> Term {
    match t {
        Term::Var(_) | Term::False => t.clone(),
        Term::App(f, a) => Term::app(erase_term(f, variant), erase_term(a, variant)),
        Term::Implies(p, q) => Term::implies(erase_term(p, variant), erase_term(q, variant)),
        Term::Lambda(x, a, b) => Term::lambda(x.clone(), erase_type(a), erase_term(b, variant)),
        Term::Eq(ty, l, r) => per_apply(ty, variant, &erase_term(l, variant), &erase_term(r, variant)),
        Term::Forall(x, a, b) => {
            let (x, b) = unclash(x, a, b);
            let xv = Term::var(x.clone());
            Term::forall(
                x,
                erase_type(a),
                Term::implies(per_apply(a, variant, &xv, &xv), erase_term(&b, variant)),
            )
        }
        Term::Choice(x, a, b) => {
            let (x, b) = unclash(x, a, b);
            let xv = Term::var(x.clone());
            let guard = per_apply(a, variant, &xv, &xv);
            let body = erase_term(&b, variant);
            let ea = erase_type(a);
            match variant {
                ErasureVariant::Strong => Term::choice(x, ea, and(guard, body)),
                ErasureVariant::Weak => {
                    let g = and(guard.clone(), body);
                    let cond = exists(x.clone(), ea.clone(), g.clone());
                    let witness = Term::choice(x.clone(), ea.clone(), g);
                    let fallback = Term::choice(x.clone(), ea.clone(), guard);
                    let mut avoid = cond.free_vars();
                    avoid.extend(fallback.free_vars());
                    avoid.insert(x.clone());
                    let z = fresh_name(&x, &avoid);
                    let zv = Term::var(z.clone());
                    Term::choice(
                        z,
                        ea.clone(),
                        or(
                            and(cond.clone(), Term::eq(ea.clone(), zv.clone(), witness)),
                            and(not(cond), Term::eq(ea, zv, fallback)),
                        ),
                    )
                }
            }
        }
    }
}

/// Result of translating a theory and context.
#[derive(Clone, Debug, PartialEq)]
pub struct ErasedTheory {
    pub hol_theory: Theory,
    /// Base type name → PER constant name.
    pub per_names: BTreeMap<String, String>,
    /// For each declaration of `hol_theory`, the index of the source
    /// declaration it came from (theory first, then context).
    pub provenance: Vec<usize>,
}

/// Translates one declaration.
pub fn erase_declaration(d: &Declaration, variant: ErasureVariant) -> Vec<Declaration> {
    match d {
        Declaration::BaseType(a, tele) => {
            // Telescope binders may repeat; pick distinct names for the axiom.
            let mut used = BTreeSet::new();
            let mut binders = Vec::new();
            let mut renames: Vec<(String, Term)> = Vec::new();
            for (x, ty) in tele {
                let ty = crate::syntax::subst::subst_type_many(ty, &renames);
                let y = fresh_name(x, &used);
                used.insert(y.clone());
                renames.push((x.clone(), Term::var(y.clone())));
                binders.push((y, erase_type(&ty)));
            }
            let carrier = Type::simple(a.clone());
            let star = per_name(a);
            let star_ty = Type::arrows(
                binders.iter().map(|(_, t)| t.clone()).chain([carrier.clone(), carrier.clone()]),
                Type::Bool,
            );
            let u = fresh_name("u", &used);
            used.insert(u.clone());
            let v = fresh_name("v", &used);
            let (uv, vv) = (Term::var(u.clone()), Term::var(v.clone()));
            let applied = Term::apps(
                Term::var(star.clone()),
                binders.iter().map(|(x, _)| Term::var(x.clone())).chain([uv.clone(), vv.clone()]),
            );
            let collapse = Term::implies(applied, Term::eq(carrier.clone(), uv, vv));
            let inner = Term::forall(u, carrier.clone(), Term::forall(v, carrier, collapse));
            let axiom = binders.into_iter().rev().fold(inner, |acc, (x, t)| Term::forall(x, t, acc));
            vec![
                Declaration::BaseType(a.clone(), Vec::new()),
                Declaration::Const(star, star_ty),
                Declaration::Axiom(format!("{a}_per"), axiom),
            ]
        }
        Declaration::Const(c, ty) => {
            let cv = Term::var(c.clone());
            vec![
                Declaration::Const(c.clone(), erase_type(ty)),
                Declaration::Axiom(format!("{c}_type"), per_apply(ty, variant, &cv, &cv)),
            ]
        }
        Declaration::Axiom(l, t) => vec![Declaration::Axiom(l.clone(), erase_term(t, variant))],
    }
}

/// `T̄, Γ̄`
pub fn erase_theory(thy: &Theory, ctx: &Theory, variant: ErasureVariant) -> ErasedTheory {
    let mut out = ErasedTheory { hol_theory: Theory::new(), per_names: BTreeMap::new(), provenance: Vec::new() };
    for (i, d) in thy.iter().chain(ctx.iter()).enumerate() {
        if let Declaration::BaseType(a, _) = d {
            out.per_names.insert(a.clone(), per_name(a));
        }
        for e in erase_declaration(d, variant) {
            out.hol_theory.push(e);
            out.provenance.push(i);
        }
    }
    out
}
