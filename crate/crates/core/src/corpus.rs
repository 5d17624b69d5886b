//! The benchmark problems over naturals, finite sets and fixed-length lists.
//!
//! Problems are written in the surface syntax and elaborated by the parser,
//! so numerals come out as iterated `s`. The `fin` families use per-size
//! ground axioms: `_min` states that the canonical elements
//! `fz`, `fs fz`, ... of `fin N` are pairwise distinct, `_reg` adds that
//! every element is one of them. Universally quantified injectivity of
//! `fz`/`fs` would rule out every finite model and leave the oracle blind.

use std::fmt::{self, Write as _};

use serde::Serialize;
use thiserror::Error;

use crate::syntax::print::Printer;
use crate::syntax::{parse_theory, Term, Theory};

/// Number of problems the published evaluation reports.
pub const PAPER_COUNT: usize = 34;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Yes,
    No,
    ProverDependent,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Yes => "yes",
            Outcome::No => "no",
            Outcome::ProverDependent => "prover-dependent",
        }
    }

    /// Whether a tool verdict is consistent with this expectation.
    pub fn admits(self, verdict: bool) -> bool {
        match self {
            Outcome::Yes => verdict,
            Outcome::No => !verdict,
            Outcome::ProverDependent => true,
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Expected {
    pub eps1_typecheck: Outcome,
    pub eps1_prove: Outcome,
    pub eps2_typecheck: Outcome,
    pub eps2_prove: Outcome,
}

#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub name: String,
    pub theory: Theory,
    pub conjecture: Term,
    pub expected: Expected,
}

impl CorpusEntry {
    /// Surface text with numerals expanded.
    pub fn text(&self) -> String {
        format!("% {}\n{}", self.name, Printer::default().theory(&self.theory, Some(&self.conjecture)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CorpusError {
    #[error("unknown corpus problem `{0}`")]
    Unknown(String),
}

const NAT: &str = "type nat : tp.\nconst 0 : nat.\nconst s : nat -> nat.\n";
const FIN: &str = "type fin : pi n : nat . tp.
const fz : pi n : nat . fin (s n).
const fs : pi n : nat . fin n -> fin (s n).\n";
const LIST: &str = "type list : pi n : nat . tp.
const nil : list 0.
const cons : pi n : nat . nat -> list n -> list (s n).\n";

use Outcome::{No, ProverDependent as Pd, Yes};

fn exp(e1t: Outcome, e1p: Outcome, e2t: Outcome, e2p: Outcome) -> Expected {
    Expected { eps1_typecheck: e1t, eps1_prove: e1p, eps2_typecheck: e2t, eps2_prove: e2p }
}

/// The `i`-th canonical element of `fin n`, for `i < n`.
fn element(n: u64, i: u64) -> String {
    if i == 0 {
        format!("(fz {})", n - 1)
    } else {
        format!("(fs {} {})", n - 1, element(n - 1, i - 1))
    }
}

fn distinct_axioms(n: u64) -> String {
    let mut s = String::new();
    for i in 0..n {
        for j in i + 1..n {
            writeln!(s, "axiom fin{n}_distinct_{i}_{j} : {} != {}.", element(n, i), element(n, j)).unwrap();
        }
    }
    s
}

fn exhaustive_axiom(n: u64) -> String {
    let body = if n == 0 {
        "$false".to_string()
    } else {
        (0..n).map(|i| format!("x = {}", element(n, i))).collect::<Vec<_>>().join(" | ")
    };
    format!("axiom fin{n}_exhaustive : ! x : fin {n} . {body}.\n")
}

fn no_fp(n: u64, regular: bool) -> (String, Expected) {
    let mut src = format!("{NAT}{FIN}{}", distinct_axioms(n));
    if regular {
        src.push_str(&exhaustive_axiom(n));
    }
    writeln!(src, "conjecture : ! x : fin {n} . (^ x : fin {n} . eps y : fin {n} . x != y) x != x.").unwrap();
    let expected = match (n, regular) {
        (1, _) => exp(No, No, Yes, Pd),
        (0, false) => exp(No, No, Yes, No),
        (9, false) => exp(Yes, Yes, Yes, Pd),
        _ => exp(Yes, Yes, Yes, Yes),
    };
    (src, expected)
}

fn source(name: &str) -> Option<(String, Expected)> {
    let fin_prelude = format!("{NAT}{FIN}");
    let list_prelude = format!("{NAT}{LIST}");
    let empty = "const empty : pi n : nat . list n -> o.
axiom empty_nil : empty 0 nil.
axiom empty_cons : ! n : nat . ! x : nat . ! l : list n . ~ empty (s n) (cons n x l).\n";
    Some(match name {
        "choice_def1" => (
            format!("{fin_prelude}const p : fin 2 -> o.\naxiom ex : ? x : fin 2 . p x.\nconjecture : p (eps x : fin 2 . p x).\n"),
            exp(Yes, Yes, Yes, Pd),
        ),
        "choice_def2" => (
            format!(
                "{fin_prelude}const n : nat.\nconst p : fin n -> o.\naxiom ex : ? x : fin n . p x.\nconjecture : p (eps x : fin n . p x).\n"
            ),
            exp(Yes, Yes, Yes, Pd),
        ),
        "choice_def3" => (
            format!(
                "{fin_prelude}type b : pi n : nat . tp.\nconst n : nat.\nconst w : b n.\nconst p : b n -> o.\n\
                 axiom ex : ? x : b n . p x.\nconjecture : p (eps x : b n . p x).\n"
            ),
            exp(Yes, Yes, Yes, Pd),
        ),
        "choice_eq1" | "choice_eq2" => {
            let n: u64 = if name == "choice_eq1" { 1 } else { 2 };
            let src = format!(
                "{fin_prelude}{}{}conjecture : ! x : fin {n} . (eps y : fin {n} . y = x) = x.\n",
                distinct_axioms(n),
                exhaustive_axiom(n)
            );
            let expected = if n == 1 { exp(Yes, Yes, Yes, Pd) } else { exp(Yes, Pd, Yes, Pd) };
            (src, expected)
        }
        "choice_nq" => (
            format!("{fin_prelude}conjecture : ! x : fin 2 . (eps y : fin 2 . y != x) != x.\n"),
            exp(No, Pd, Pd, Pd),
        ),
        "list_empty" => (
            format!("{list_prelude}{empty}conjecture : empty 0 (eps l : list 0 . empty 0 l).\n"),
            exp(Yes, Yes, Yes, Pd),
        ),
        "list_nonempty" => (
            format!("{list_prelude}{empty}conjecture : ~ empty 1 (eps l : list 1 . empty 1 l).\n"),
            exp(Pd, Pd, Pd, Pd),
        ),
        "list_head" => (
            format!(
                "{list_prelude}const hd : pi n : nat . list (s n) -> nat.\n\
                 axiom hd_cons : ! n : nat . ! x : nat . ! l : list n . hd n (cons n x l) = x.\n\
                 conjecture : hd 0 (eps l : list 1 . hd 0 l = 0) = 0.\n"
            ),
            exp(Yes, Pd, Yes, Pd),
        ),
        _ => {
            let rest = name.strip_prefix("no_fp_fin")?;
            let (n, variant) = rest.split_once('_')?;
            let n: u64 = n.parse().ok().filter(|n| *n <= 9)?;
            match variant {
                "reg" => no_fp(n, true),
                "min" => no_fp(n, false),
                _ => return None,
            }
        }
    })
}

/// Every problem name, in generation order.
pub fn names() -> Vec<String> {
    let mut v: Vec<String> = ["choice_def1", "choice_def2", "choice_def3", "choice_eq1", "choice_eq2", "choice_nq"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    for n in 0..=9 {
        v.push(format!("no_fp_fin{n}_reg"));
        v.push(format!("no_fp_fin{n}_min"));
    }
    v.extend(["list_empty", "list_nonempty", "list_head"].iter().map(|s| s.to_string()));
    v
}

pub fn gen_problem(name: &str) -> Result<CorpusEntry, CorpusError> {
    let (src, expected) = source(name).ok_or_else(|| CorpusError::Unknown(name.to_string()))?;
    let doc = parse_theory(&src).unwrap_or_else(|e| panic!("corpus problem {name} does not parse: {e}"));
    Ok(CorpusEntry {
        name: name.to_string(),
        theory: doc.theory,
        conjecture: doc.conjecture.expect("every corpus problem has a conjecture"),
        expected,
    })
}

pub fn gen_all() -> Vec<CorpusEntry> {
    names().iter().map(|n| gen_problem(n).expect("listed name")).collect()
}

/// Expected outcomes, one line per problem.
pub fn manifest(entries: &[CorpusEntry]) -> String {
    let mut s = String::new();
    writeln!(s, "# {} problems generated; the published evaluation reports {PAPER_COUNT}.", entries.len()).unwrap();
    writeln!(s, "# The remaining {} are not described and are not generated.", PAPER_COUNT.saturating_sub(entries.len()))
        .unwrap();
    writeln!(s, "# name eps1-typecheck eps1-prove eps2-typecheck eps2-prove").unwrap();
    for e in entries {
        let x = e.expected;
        writeln!(s, "{} {} {} {} {}", e.name, x.eps1_typecheck, x.eps1_prove, x.eps2_typecheck, x.eps2_prove).unwrap();
    }
    s
}
