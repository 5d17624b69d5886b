//! Bounded backward-chaining prover for HOL obligations that need no search.
//!
//! Handles goals that follow from the hypotheses by implication/∀
//! introduction, modus ponens against (instantiated) hypotheses, conjunction
//! splitting on both sides and reflexivity. Universal hypotheses are
//! instantiated only with nullary constants and introduced variables of the
//! matching type. Every
//! step is sound, so a `true` answer is a proof; `false` only means the fuel
//! ran out or no rule applied.

use std::collections::{HashMap, HashSet};
use std::hash::{Hash, Hasher};
use std::rc::Rc;

use crate::syntax::sugar::{view, Sugared};
use crate::syntax::{alpha_eq, alpha_eq_type, fresh_name, subst, Declaration, Term, Theory, Type};

const DEFAULT_FUEL: usize = 20_000;
const MAX_DEPTH: usize = 4;

struct Prover {
    fuel: usize,
    names: std::collections::BTreeSet<String>,
    next_state: usize,
    /// Goal hashes already refuted in a state at a given depth. A collision
    /// can only lose a proof, never invent one.
    failed: HashSet<(usize, u64, usize)>,
    /// Instances of hypothesis `i` in a state.
    instances: HashMap<(usize, usize), Rc<Vec<Term>>>,
}

#[derive(Clone)]
struct State {
    id: usize,
    hyps: Vec<Rc<Term>>,
    /// Witness candidates: nullary terms with their types.
    cands: Vec<(Term, Type)>,
}

/// Tries to prove `goal` from the axioms of `thy` and `ctx`.
pub fn discharge(thy: &Theory, ctx: &Theory, goal: &Term) -> bool {
    let mut st = State { id: 0, hyps: Vec::new(), cands: Vec::new() };
    let mut names = std::collections::BTreeSet::new();
    for d in thy.iter().chain(ctx.iter()) {
        match d {
            Declaration::Axiom(_, t) => assume(&mut st.hyps, t.clone()),
            Declaration::Const(c, ty) => {
                names.insert(c.clone());
                if !matches!(ty, Type::Pi(..)) {
                    st.cands.push((Term::var(c.clone()), ty.clone()));
                }
            }
            Declaration::BaseType(a, _) => {
                names.insert(a.clone());
            }
        }
    }
    goal.all_names(&mut names);
    let mut p = Prover { fuel: DEFAULT_FUEL, names, next_state: 1, failed: HashSet::new(), instances: HashMap::new() };
    p.prove(&st, goal, MAX_DEPTH)
}

/// Adds a hypothesis, split into its conjuncts.
fn assume(hyps: &mut Vec<Rc<Term>>, t: Term) {
    match view(&t) {
        Some(Sugared::And(p, q)) => {
            let (p, q) = (p.clone(), q.clone());
            assume(hyps, p);
            assume(hyps, q);
        }
        _ => hyps.push(Rc::new(t)),
    }
}

fn is_top(t: &Term) -> bool {
    matches!(view(t), Some(Sugared::Top))
}

impl Prover {
    fn tick(&mut self) -> bool {
        if self.fuel == 0 {
            return false;
        }
        self.fuel -= 1;
        true
    }

    fn extend(&mut self, st: &State) -> State {
        let mut st2 = st.clone();
        st2.id = self.next_state;
        self.next_state += 1;
        st2
    }

    fn prove(&mut self, st: &State, goal: &Term, depth: usize) -> bool {
        let mut h = std::collections::hash_map::DefaultHasher::new();
        goal.hash(&mut h);
        let key = (st.id, h.finish(), depth);
        if self.failed.contains(&key) {
            return false;
        }
        let ok = self.search(st, goal, depth);
        if !ok && self.fuel > 0 {
            self.failed.insert(key);
        }
        ok
    }

    fn search(&mut self, st: &State, goal: &Term, depth: usize) -> bool {
        if !self.tick() {
            return false;
        }
        if is_top(goal) || st.hyps.iter().any(|h| **h == Term::False || **h == *goal || alpha_eq(h, goal)) {
            return true;
        }
        if let Term::Eq(_, l, r) = goal {
            if alpha_eq(l, r) {
                return true;
            }
        }
        if let Some(Sugared::And(p, q)) = view(goal) {
            return self.prove(st, p, depth) && self.prove(st, q, depth);
        }
        match goal {
            Term::Implies(p, q) => {
                let mut st2 = self.extend(st);
                assume(&mut st2.hyps, (**p).clone());
                return self.prove(&st2, q, depth);
            }
            Term::Forall(x, ty, body) => {
                let y = fresh_name(x, &self.names);
                self.names.insert(y.clone());
                let mut st2 = self.extend(st);
                st2.cands.push((Term::var(y.clone()), (**ty).clone()));
                return self.prove(&st2, &subst(body, x, &Term::var(y)), depth);
            }
            _ => {}
        }
        if depth == 0 {
            return false;
        }
        // Backward chaining: find a hypothesis instance P1 ⇒ ... ⇒ Pn ⇒ Q with
        // Q = goal or Q = ⊥, then prove every Pi.
        for i in 0..st.hyps.len() {
            let insts = match self.instances.get(&(st.id, i)) {
                Some(v) => v.clone(),
                None => {
                    let v = Rc::new(self.instances(st, &st.hyps[i]));
                    self.instances.insert((st.id, i), v.clone());
                    v
                }
            };
            for inst in insts.iter() {
                let mut premises: Vec<&Term> = Vec::new();
                let mut concl = inst;
                loop {
                    if alpha_eq(concl, goal) || *concl == Term::False {
                        if premises.iter().all(|p| self.prove(st, p, depth - 1)) {
                            return true;
                        }
                        if self.fuel == 0 {
                            return false;
                        }
                    }
                    match concl {
                        Term::Implies(p, q) => {
                            premises.push(p);
                            concl = q;
                        }
                        _ => break,
                    }
                }
            }
        }
        false
    }

    /// The hypothesis itself plus its instantiations with candidate terms.
    fn instances(&mut self, st: &State, h: &Term) -> Vec<Term> {
        let mut out = vec![h.clone()];
        let mut frontier = vec![h.clone()];
        while let Some(t) = frontier.pop() {
            if out.len() > 256 || !self.tick() {
                break;
            }
            if let Term::Forall(x, ty, body) = &t {
                for (c, cty) in &st.cands {
                    if alpha_eq_type(cty, ty) {
                        let inst = subst(body, x, c);
                        frontier.push(inst.clone());
                        out.push(inst);
                    }
                }
            }
        }
        out
    }
}
