//! Random well-typed DHOL terms over a small signature of naturals and
//! finite sets, for fuzzing the erasure and the printers.

#![allow(dead_code)]

use dhol::syntax::sugar::{and, exists, not, or, top};
use dhol::syntax::{alpha_eq, parse_theory, Declaration, Term, Theory, Type};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const SIGNATURE: &str = "type nat : tp.
const 0 : nat.
const s : nat -> nat.
type fin : pi n : nat . tp.
const fz : pi n : nat . fin (s n).
const fs : pi n : nat . fin n -> fin (s n).
const p : pi n : nat . fin n -> o.
const q : nat -> o.
const f : pi n : nat . fin n -> nat.";

pub fn signature() -> Theory {
    parse_theory(SIGNATURE).unwrap().theory
}

fn nat() -> Type {
    Type::simple("nat")
}

fn fin(n: Term) -> Type {
    Type::base("fin", vec![n])
}

/// Free variables available to generated terms: `x` is the substitution
/// target, `m` may occur in the substituted term, `y` depends on `x`.
pub fn context() -> Theory {
    Theory::from_decls(vec![
        Declaration::Const("x".into(), nat()),
        Declaration::Const("m".into(), nat()),
        Declaration::Const("y".into(), fin(Term::var("x"))),
    ])
}

/// Binder names; overlapping the context exercises shadowing and capture.
const BINDERS: [&str; 5] = ["v", "w", "x", "m", "u"];

pub struct Gen {
    rng: ChaCha8Rng,
    env: Vec<(String, Type)>,
}

impl Gen {
    pub fn new(seed: u64) -> Gen {
        let env = context()
            .iter()
            .map(|d| match d {
                Declaration::Const(c, t) => (c.clone(), t.clone()),
                _ => unreachable!(),
            })
            .collect();
        Gen { rng: ChaCha8Rng::seed_from_u64(seed), env }
    }

    /// A generator with no free variables in scope.
    pub fn closed(seed: u64) -> Gen {
        Gen { rng: ChaCha8Rng::seed_from_u64(seed), env: Vec::new() }
    }

    pub fn with_env(seed: u64, env: &[(&str, Type)]) -> Gen {
        Gen { rng: ChaCha8Rng::seed_from_u64(seed), env: env.iter().map(|(n, t)| (n.to_string(), t.clone())).collect() }
    }

    fn pick<'a, T>(&mut self, xs: &'a [T]) -> &'a T {
        &xs[self.rng.random_range(0..xs.len())]
    }

    /// Runs `body` with `name : ty` bound, dropping entries the binder shadows.
    fn bind<R>(&mut self, name: &str, ty: Type, body: impl FnOnce(&mut Gen) -> R) -> R {
        let saved = self.env.clone();
        self.env.retain(|(n, t)| n != name && !t.has_free(name));
        self.env.push((name.to_string(), ty));
        let r = body(self);
        self.env = saved;
        r
    }

    fn vars_of(&self, ty: &Type) -> Vec<Term> {
        self.env.iter().filter(|(_, t)| dhol::syntax::alpha_eq_type(t, ty)).map(|(n, _)| Term::var(n.clone())).collect()
    }

    fn binder(&mut self) -> String {
        self.pick(&BINDERS).to_string()
    }

    pub fn nat(&mut self, depth: u32) -> Term {
        let vars = self.vars_of(&nat());
        let choice = if depth == 0 { self.rng.random_range(0..2) } else { self.rng.random_range(0..6) };
        match choice {
            0 if !vars.is_empty() => self.pick(&vars).clone(),
            0 | 1 => Term::var("0"),
            2 => Term::app(Term::var("s"), self.nat(depth - 1)),
            3 => {
                let n = self.nat(depth - 1);
                let e = self.fin(&n, depth - 1);
                Term::apps(Term::var("f"), [n, e])
            }
            4 => {
                let v = self.binder();
                let body = self.bind(&v, nat(), |g| g.bool(depth - 1));
                Term::choice(v, nat(), body)
            }
            _ => {
                let v = self.binder();
                let arg = self.nat(depth - 1);
                let body = self.bind(&v, nat(), |g| g.nat(depth - 1));
                Term::app(Term::lambda(v, nat(), body), arg)
            }
        }
    }

    /// A term of type `fin n`.
    pub fn fin(&mut self, n: &Term, depth: u32) -> Term {
        let ty = fin(n.clone());
        let vars = self.vars_of(&ty);
        if !vars.is_empty() && self.rng.random_bool(0.5) {
            return self.pick(&vars).clone();
        }
        if let Term::App(h, m) = n {
            if **h == Term::var("s") && depth > 0 && self.rng.random_bool(0.6) {
                let m = (**m).clone();
                return if self.rng.random_bool(0.5) {
                    Term::app(Term::var("fz"), m)
                } else {
                    let e = self.fin(&m, depth - 1);
                    Term::apps(Term::var("fs"), [m, e])
                };
            }
        }
        let v = self.binder();
        let d = depth.saturating_sub(1);
        let body = self.bind(&v, ty.clone(), |g| g.bool(d));
        Term::choice(v, ty, body)
    }

    pub fn bool(&mut self, depth: u32) -> Term {
        let choice = if depth == 0 { self.rng.random_range(0..3) } else { self.rng.random_range(0..12) };
        match choice {
            0 => Term::False,
            1 => top(),
            2 => {
                let vars = self.vars_of(&nat());
                let arg = if vars.is_empty() { Term::var("0") } else { self.pick(&vars).clone() };
                Term::app(Term::var("q"), arg)
            }
            3 => Term::app(Term::var("q"), self.nat(depth - 1)),
            4 => {
                let n = self.nat(depth - 1);
                let e = self.fin(&n, depth - 1);
                Term::apps(Term::var("p"), [n, e])
            }
            5 => Term::implies(self.bool(depth - 1), self.bool(depth - 1)),
            6 => Term::eq(nat(), self.nat(depth - 1), self.nat(depth - 1)),
            7 => {
                let v = self.binder();
                let body = self.bind(&v, nat(), |g| g.bool(depth - 1));
                Term::forall(v, nat(), body)
            }
            8 => {
                let n = self.nat(depth - 1);
                let ty = fin(n);
                let v = self.binder();
                let body = self.bind(&v, ty.clone(), |g| g.bool(depth - 1));
                if self.rng.random_bool(0.5) {
                    Term::forall(v, ty, body)
                } else {
                    exists(v, ty, body)
                }
            }
            9 => {
                let n = self.nat(depth - 1);
                let (l, r) = (self.fin(&n, depth - 1), self.fin(&n, depth - 1));
                Term::eq(fin(n), l, r)
            }
            10 => {
                let (a, b) = (self.bool(depth - 1), self.bool(depth - 1));
                match self.rng.random_range(0..3) {
                    0 => and(a, b),
                    1 => or(a, b),
                    _ => not(a),
                }
            }
            _ => {
                let v = self.binder();
                let arg = self.nat(depth - 1);
                let body = self.bind(&v, nat(), |g| g.bool(depth - 1));
                Term::app(Term::lambda(v, nat(), body), arg)
            }
        }
    }
}

/// Structural equality of theories, comparing axioms up to alpha and
/// ignoring their labels.
pub fn theories_alpha_eq(a: &Theory, b: &Theory) -> bool {
    a.len() == b.len()
        && a.iter().zip(b.iter()).all(|(x, y)| match (x, y) {
            (Declaration::Axiom(_, s), Declaration::Axiom(_, t)) => alpha_eq(s, t),
            _ => x == y,
        })
}
