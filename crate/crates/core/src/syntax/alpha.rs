//! Equality up to renaming of bound variables.

use super::{Term, Type};

/// Pairs of binder names, innermost last.
struct Scope<'a> {
    pairs: Vec<(&'a str, &'a str)>,
}

impl<'a> Scope<'a> {
    fn vars_match(&self, x: &str, y: &str) -> bool {
        let lx = self.pairs.iter().rposition(|(l, _)| *l == x);
        let ry = self.pairs.iter().rposition(|(_, r)| *r == y);
        match (lx, ry) {
            (Some(i), Some(j)) => i == j,
            (None, None) => x == y,
            _ => false,
        }
    }
}

pub fn alpha_eq(t: &Term, u: &Term) -> bool {
    term_eq(t, u, &mut Scope { pairs: Vec::new() })
}

pub fn alpha_eq_type(a: &Type, b: &Type) -> bool {
    type_eq(a, b, &mut Scope { pairs: Vec::new() })
}

fn term_eq<'a>(t: &'a Term, u: &'a Term, sc: &mut Scope<'a>) -> bool {
    match (t, u) {
        (Term::Var(x), Term::Var(y)) => sc.vars_match(x, y),
        (Term::False, Term::False) => true,
        (Term::App(f, a), Term::App(g, b)) | (Term::Implies(f, a), Term::Implies(g, b)) => {
            term_eq(f, g, sc) && term_eq(a, b, sc)
        }
        (Term::Eq(ta, l1, r1), Term::Eq(tb, l2, r2)) => {
            type_eq(ta, tb, sc) && term_eq(l1, l2, sc) && term_eq(r1, r2, sc)
        }
        _ => match (t.as_binder(), u.as_binder()) {
            (Some((k1, x, a, b)), Some((k2, y, c, d))) if k1 == k2 => {
                if !type_eq(a, c, sc) {
                    return false;
                }
                sc.pairs.push((x, y));
                let r = term_eq(b, d, sc);
                sc.pairs.pop();
                r
            }
            _ => false,
        },
    }
}

fn type_eq<'a>(a: &'a Type, b: &'a Type, sc: &mut Scope<'a>) -> bool {
    match (a, b) {
        (Type::Bool, Type::Bool) => true,
        (Type::Base(x, xs), Type::Base(y, ys)) => {
            x == y && xs.len() == ys.len() && xs.iter().zip(ys).all(|(s, t)| term_eq(s, t, sc))
        }
        (Type::Pi(x, a1, b1), Type::Pi(y, a2, b2)) => {
            if !type_eq(a1, a2, sc) {
                return false;
            }
            sc.pairs.push((x, y));
            let r = type_eq(b1, b2, sc);
            sc.pairs.pop();
            r
        }
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::sugar;

    #[test]
    fn renamed_binders() {
        let a = Term::lambda("x", Type::Bool, Term::var("x"));
        let b = Term::lambda("y", Type::Bool, Term::var("y"));
        assert!(alpha_eq(&a, &b));
        let c = Term::lambda("x", Type::Bool, Term::False);
        assert!(!alpha_eq(&a, &c));

        let e1 = Term::choice("x", Type::simple("a"), sugar::top());
        let e2 = Term::choice("z", Type::simple("a"), sugar::top());
        assert!(alpha_eq(&e1, &e2));
    }

    #[test]
    fn free_vs_bound() {
        // λx. y  vs  λy. y
        let a = Term::lambda("x", Type::Bool, Term::var("y"));
        let b = Term::lambda("y", Type::Bool, Term::var("y"));
        assert!(!alpha_eq(&a, &b));
    }

    #[test]
    fn binder_kinds_differ() {
        let a = Term::forall("x", Type::Bool, Term::var("x"));
        let b = Term::choice("x", Type::Bool, Term::var("x"));
        assert!(!alpha_eq(&a, &b));
    }

    #[test]
    fn shadowing() {
        // λx.λx.x  vs  λx.λy.y
        let a = Term::lambda("x", Type::Bool, Term::lambda("x", Type::Bool, Term::var("x")));
        let b = Term::lambda("x", Type::Bool, Term::lambda("y", Type::Bool, Term::var("y")));
        let c = Term::lambda("x", Type::Bool, Term::lambda("y", Type::Bool, Term::var("x")));
        assert!(alpha_eq(&a, &b));
        assert!(!alpha_eq(&a, &c));
    }

    #[test]
    fn pi_types() {
        let a = Type::pi("n", Type::simple("nat"), Type::base("fin", vec![Term::var("n")]));
        let b = Type::pi("m", Type::simple("nat"), Type::base("fin", vec![Term::var("m")]));
        assert!(alpha_eq_type(&a, &b));
        assert!(alpha_eq_type(
            &Type::arrow(Type::Bool, Type::Bool),
            &Type::pi("q", Type::Bool, Type::Bool)
        ));
    }
}
