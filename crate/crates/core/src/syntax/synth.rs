//! Type synthesis without checking.
//!
//! Used by the elaborator to fill in equality subscripts and by the THF reader.
//! It trusts its input: arguments are not checked against domains and no
//! obligations are produced. The kernel does the real checking.

use super::{subst_type, Term, Theory, Type};

pub fn synth(sig: &Theory, locals: &mut Vec<(String, Type)>, t: &Term) -> Result<Type, String> {
    match t {
        Term::Var(x) => locals
            .iter()
            .rev()
            .find(|(y, _)| y == x)
            .map(|(_, ty)| ty.clone())
            .or_else(|| sig.const_type(x).cloned())
            .ok_or_else(|| format!("unknown identifier `{x}`")),
        Term::App(f, a) => match synth(sig, locals, f)? {
            Type::Pi(x, _, cod) => Ok(subst_type(&cod, &x, a)),
            other => Err(format!("`{f}` has type {other}, which is not a function type")),
        },
        Term::Lambda(x, a, b) => {
            locals.push((x.clone(), (**a).clone()));
            let cod = synth(sig, locals, b);
            locals.pop();
            Ok(Type::pi(x.clone(), (**a).clone(), cod?))
        }
        Term::Choice(_, a, _) => Ok((**a).clone()),
        Term::False | Term::Implies(..) | Term::Eq(..) | Term::Forall(..) => Ok(Type::Bool),
    }
}
