//! Derived connectives.
//!
//! `¬t := t ⇒ ⊥`, `⊤ := ¬⊥`, `t ∧ u := ¬(t ⇒ ¬u)`, `t ∨ u := ¬t ⇒ u`,
//! `∃x:A.t := ¬∀x:A.¬t` and `t ≠ u := ¬(t = u)`. The constructors expand
//! immediately; [`view`] recognises the expanded shapes again for printing.

use super::{Term, Type};

pub fn not(t: Term) -> Term {
    Term::implies(t, Term::False)
}

pub fn top() -> Term {
    not(Term::False)
}

pub fn and(t: Term, u: Term) -> Term {
    not(Term::implies(t, not(u)))
}

pub fn or(t: Term, u: Term) -> Term {
    Term::implies(not(t), u)
}

pub fn exists(x: impl Into<String>, ty: Type, body: Term) -> Term {
    not(Term::forall(x, ty, not(body)))
}

pub fn neq(ty: Type, l: Term, r: Term) -> Term {
    not(Term::eq(ty, l, r))
}

/// Right-nested conjunction; `⊤` when empty.
pub fn conj(ts: impl IntoIterator<Item = Term>) -> Term {
    let ts: Vec<Term> = ts.into_iter().collect();
    let mut it = ts.into_iter().rev();
    match it.next() {
        None => top(),
        Some(last) => it.fold(last, |acc, t| and(t, acc)),
    }
}

/// Right-nested disjunction; `⊥` when empty.
pub fn disj(ts: impl IntoIterator<Item = Term>) -> Term {
    let ts: Vec<Term> = ts.into_iter().collect();
    let mut it = ts.into_iter().rev();
    match it.next() {
        None => Term::False,
        Some(last) => it.fold(last, |acc, t| or(t, acc)),
    }
}

/// A term seen through the derived-connective layer.
#[derive(Debug, PartialEq)]
pub enum Sugared<'a> {
    Top,
    Not(&'a Term),
    And(&'a Term, &'a Term),
    Or(&'a Term, &'a Term),
    Exists(&'a str, &'a Type, &'a Term),
    Neq(&'a Type, &'a Term, &'a Term),
}

fn negated(t: &Term) -> Option<&Term> {
    match t {
        Term::Implies(p, q) if **q == Term::False => Some(p),
        _ => None,
    }
}

/// Recognises the outermost derived connective, if any. Expanding the result
/// with the constructors above gives back exactly `t`.
pub fn view(t: &Term) -> Option<Sugared<'_>> {
    let Term::Implies(p, q) = t else { return None };
    if **q == Term::False {
        match &**p {
            Term::False => return Some(Sugared::Top),
            Term::Forall(x, ty, body) => {
                if let Some(inner) = negated(body) {
                    return Some(Sugared::Exists(x, ty, inner));
                }
            }
            Term::Implies(a, b) => {
                if let Some(u) = negated(b) {
                    return Some(Sugared::And(a, u));
                }
            }
            Term::Eq(ty, l, r) => return Some(Sugared::Neq(ty, l, r)),
            _ => {}
        }
        return Some(Sugared::Not(p));
    }
    negated(p).map(|a| Sugared::Or(a, q))
}
