//! Printer for the `.dhol` surface syntax.
//!
//! Output re-parses to an alpha-equal tree (see the round-trip tests). By
//! default equalities are printed without their type subscript, which the
//! elaborator recovers from the left operand; [`Printer::explicit_eq`] keeps
//! the subscript as `=[A]`.

use std::fmt::Write;

use super::sugar::{view, Sugared};
use super::{Declaration, Term, Theory, Type, ARROW_BINDER};

const P_BINDER: u8 = 0;
const P_IMPL: u8 = 1;
const P_OR: u8 = 2;
const P_AND: u8 = 3;
const P_NOT: u8 = 4;
const P_EQ: u8 = 5;
const P_APP: u8 = 6;
const P_ATOM: u8 = 7;

#[derive(Clone, Copy, Debug, Default)]
pub struct Printer {
    pub explicit_eq: bool,
}

pub fn term_to_string(t: &Term) -> String {
    Printer::default().term(t)
}

pub fn type_to_string(ty: &Type) -> String {
    Printer::default().ty(ty)
}

impl Printer {
    pub fn explicit() -> Self {
        Printer { explicit_eq: true }
    }

    pub fn term(&self, t: &Term) -> String {
        let mut s = String::new();
        self.write_term(&mut s, t, P_BINDER);
        s
    }

    pub fn ty(&self, ty: &Type) -> String {
        let mut s = String::new();
        self.write_type(&mut s, ty, 0);
        s
    }

    fn write_term(&self, out: &mut String, t: &Term, prec: u8) {
        let (level, body) = self.render_term(t);
        if level < prec {
            write!(out, "({body})").unwrap();
        } else {
            out.push_str(&body);
        }
    }

    fn sub(&self, t: &Term, prec: u8) -> String {
        let mut s = String::new();
        self.write_term(&mut s, t, prec);
        s
    }

    fn binder(&self, sym: &str, x: &str, ty: &Type, body: &Term) -> (u8, String) {
        (P_BINDER, format!("{sym} {x} : {} . {}", self.ty(ty), self.sub(body, P_BINDER)))
    }

    fn eq_op(&self, op: &str, ty: &Type) -> String {
        if self.explicit_eq {
            format!("{op}[{}]", self.ty(ty))
        } else {
            op.to_string()
        }
    }

    fn render_term(&self, t: &Term) -> (u8, String) {
        if let Some(s) = view(t) {
            return match s {
                Sugared::Top => (P_ATOM, "$true".into()),
                Sugared::Not(p) => (P_NOT, format!("~ {}", self.sub(p, P_NOT))),
                Sugared::And(p, q) => (P_AND, format!("{} & {}", self.sub(p, P_AND), self.sub(q, P_NOT))),
                Sugared::Or(p, q) => (P_OR, format!("{} | {}", self.sub(p, P_OR), self.sub(q, P_AND))),
                Sugared::Exists(x, ty, body) => self.binder("?", x, ty, body),
                Sugared::Neq(ty, l, r) => (
                    P_EQ,
                    format!("{} {} {}", self.sub(l, P_APP), self.eq_op("!=", ty), self.sub(r, P_APP)),
                ),
            };
        }
        match t {
            Term::Var(x) => (P_ATOM, x.clone()),
            Term::False => (P_ATOM, "$false".into()),
            Term::App(f, a) => (P_APP, format!("{} {}", self.sub(f, P_APP), self.sub(a, P_ATOM))),
            Term::Implies(p, q) => (P_IMPL, format!("{} => {}", self.sub(p, P_OR), self.sub(q, P_IMPL))),
            Term::Eq(ty, l, r) => (
                P_EQ,
                format!("{} {} {}", self.sub(l, P_APP), self.eq_op("=", ty), self.sub(r, P_APP)),
            ),
            Term::Lambda(x, a, b) => self.binder("^", x, a, b),
            Term::Forall(x, a, b) => self.binder("!", x, a, b),
            Term::Choice(x, a, b) => self.binder("eps", x, a, b),
        }
    }

    // Type levels: 0 = pi, 1 = arrow, 2 = applied base, 3 = atom.
    fn write_type(&self, out: &mut String, ty: &Type, prec: u8) {
        let (level, body) = match ty {
            Type::Bool => (3, "o".to_string()),
            Type::Base(a, args) if args.is_empty() => (3, a.clone()),
            Type::Base(a, args) => {
                let mut s = a.clone();
                for t in args {
                    s.push(' ');
                    s.push_str(&self.sub(t, P_ATOM));
                }
                (2, s)
            }
            Type::Pi(x, a, b) if x == ARROW_BINDER || !b.has_free(x) => {
                let mut s = String::new();
                self.write_type(&mut s, a, 2);
                s.push_str(" -> ");
                self.write_type(&mut s, b, 1);
                (1, s)
            }
            Type::Pi(x, a, b) => {
                let mut s = format!("pi {x} : ");
                self.write_type(&mut s, a, 0);
                s.push_str(" . ");
                self.write_type(&mut s, b, 0);
                (0, s)
            }
        };
        if level < prec {
            write!(out, "({body})").unwrap();
        } else {
            out.push_str(&body);
        }
    }

    pub fn declaration(&self, d: &Declaration) -> String {
        match d {
            Declaration::BaseType(a, tele) => {
                let mut s = format!("type {a} :");
                for (x, ty) in tele {
                    write!(s, " pi {x} : {} .", self.ty(ty)).unwrap();
                }
                s.push_str(" tp.");
                s
            }
            Declaration::Const(c, ty) => format!("const {c} : {}.", self.ty(ty)),
            Declaration::Axiom(l, t) => format!("axiom {l} : {}.", self.term(t)),
        }
    }

    pub fn theory(&self, thy: &Theory, conjecture: Option<&Term>) -> String {
        let mut s = String::new();
        for d in thy {
            s.push_str(&self.declaration(d));
            s.push('\n');
        }
        if let Some(c) = conjecture {
            writeln!(s, "conjecture : {}.", self.term(c)).unwrap();
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::sugar;

    #[test]
    fn prints_sugar() {
        let p = Term::var("p");
        let q = Term::var("q");
        assert_eq!(term_to_string(&sugar::top()), "$true");
        assert_eq!(term_to_string(&sugar::not(p.clone())), "~ p");
        assert_eq!(term_to_string(&sugar::and(p.clone(), q.clone())), "p & q");
        assert_eq!(term_to_string(&sugar::or(p.clone(), q.clone())), "p | q");
        assert_eq!(term_to_string(&Term::implies(p.clone(), q.clone())), "p => q");
    }

    #[test]
    fn prints_binders_and_types() {
        let fin2 = Type::base("fin", vec![Term::var("n")]);
        let t = Term::choice("x", fin2, Term::app(Term::var("p"), Term::var("x")));
        assert_eq!(term_to_string(&t), "eps x : fin n . p x");
        let dep = Type::pi("n", Type::simple("nat"), Type::base("fin", vec![Term::var("n")]));
        assert_eq!(type_to_string(&dep), "pi n : nat . fin n");
        let arr = Type::arrows([Type::simple("nat"), Type::simple("nat")], Type::Bool);
        assert_eq!(type_to_string(&arr), "nat -> nat -> o");
        let hi = Type::arrow(Type::arrow(Type::Bool, Type::Bool), Type::Bool);
        assert_eq!(type_to_string(&hi), "(o -> o) -> o");
    }

    #[test]
    fn explicit_equality() {
        let e = Term::eq(Type::simple("nat"), Term::var("x"), Term::var("y"));
        assert_eq!(term_to_string(&e), "x = y");
        assert_eq!(Printer::explicit().term(&e), "x =[nat] y");
    }
}
