//! Finite countermodel search for HOL problems.
//!
//! Base types get finite carriers `{0, ..., n-1}`; `o` is `{0, 1}` with
//! `1` true; a function type `A → B` is the set of all `|B|^|A|` functions,
//! encoded as a number whose `x`-th digit in base `|B|` is the value at `x`.
//! Constants are interpreted by tables indexed by their (uncurried)
//! arguments. Choice `ε x:A. t` picks the least element satisfying `t`, or
//! `0` if there is none; every such interpretation is a legitimate choice
//! function, so models found here are real models.
//!
//! For each assignment of carrier sizes the problem is grounded into
//! propositional clauses (one-hot encodings of every table cell, Tseitin
//! gates for the connectives) and handed to a CDCL solver. Size assignments
//! are tried by largest carrier first, so a countermodel found under some
//! budget is found under every larger one.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

use varisat::{ExtendFormula, Lit, Solver, Var};

use crate::syntax::{beta_normalize, Declaration, Term, Theory, Type, ARROW_BINDER};

/// Largest quantifier or choice domain the evaluator will enumerate.
const MAX_DOMAIN: u64 = 1 << 16;
/// Largest number of cells in one constant table.
const MAX_CELLS: u64 = 1 << 16;
const UNSET: u32 = u32::MAX;

#[derive(Clone, Debug)]
pub struct SearchBudget {
    /// Largest carrier tried for any base type.
    pub max_size: usize,
    /// Largest ground encoding, in clauses, for one size assignment.
    pub max_clauses: u64,
    pub timeout: Option<Duration>,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { max_size: 3, max_clauses: 4_000_000, timeout: Some(Duration::from_secs(10)) }
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum OracleError {
    #[error("unsupported problem: {0}")]
    Unsupported(String),
}

#[derive(Clone, Debug)]
pub enum OracleOutcome {
    /// Axioms hold and the conjecture fails in this model.
    Countermodel(FiniteModel),
    /// Every size assignment up to `max_size` was searched exhaustively.
    NoCountermodel { max_size: usize },
    /// The budget ran out after `sizes_completed` size assignments.
    Exhausted { reason: Exhaustion, sizes_completed: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Exhaustion {
    Time,
    Size,
}

impl OracleOutcome {
    pub fn is_countermodel(&self) -> bool {
        matches!(self, OracleOutcome::Countermodel(_))
    }
}

/// A total interpretation of a finite signature.
#[derive(Clone, Debug, Serialize)]
pub struct FiniteModel {
    pub sizes: BTreeMap<String, usize>,
    pub constants: Vec<ConstInterp>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConstInterp {
    pub name: String,
    pub ty: String,
    /// Declared in the local context rather than the theory.
    pub local: bool,
    /// Argument domains (uncurried) followed by the result domain.
    #[serde(skip)]
    pub arg_types: Vec<Type>,
    #[serde(skip)]
    pub result: Type,
    /// Cell values in mixed-radix order of the arguments.
    pub table: Vec<u32>,
}

impl FiniteModel {
    /// The local constants only: the falsifying variable assignment.
    pub fn assignment(&self) -> impl Iterator<Item = &ConstInterp> {
        self.constants.iter().filter(|c| c.local)
    }

    fn value_name(&self, ty: &Type, v: u64) -> String {
        match ty {
            Type::Bool => if v == 1 { "$true" } else { "$false" }.to_string(),
            Type::Base(a, _) => format!("{a}#{v}"),
            Type::Pi(..) => format!("#{v}"),
        }
    }

    /// Evaluates a closed formula over this model's signature.
    pub fn eval(&self, t: &Term) -> Result<bool, OracleError> {
        let mut sig = Signature::default();
        for (name, n) in &self.sizes {
            sig.sizes.insert(name.clone(), *n as u64);
        }
        let mut tables = Vec::new();
        for c in &self.constants {
            let full = Type::arrows(c.arg_types.iter().cloned(), c.result.clone());
            sig.add_const(&c.name, &full, c.local)?;
            tables.push(c.table.clone());
        }
        let ir = sig.compile(&beta_normalize(t), &mut Vec::new())?;
        let mut ev = Evaluator { sig: &sig, tables: &tables, env: Vec::new(), block: None };
        match ev.eval(&ir) {
            Some(v) => Ok(v == 1),
            None => Err(OracleError::Unsupported("evaluation in a total model left a value unknown".into())),
        }
    }
}

impl fmt::Display for FiniteModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sizes: Vec<_> = self.sizes.iter().map(|(a, n)| format!("|{a}| = {n}")).collect();
        writeln!(f, "carriers: {}", sizes.join(", "))?;
        for c in &self.constants {
            writeln!(f, "{}{} : {}", if c.local { "local " } else { "" }, c.name, c.ty)?;
            let radices: Vec<u64> = c.arg_types.iter().map(|t| domain_size(&self.sizes_u64(), t).unwrap_or(0)).collect();
            for (cell, v) in c.table.iter().enumerate() {
                let args = decode(cell as u64, &radices);
                let mut lhs = c.name.clone();
                for (a, ty) in args.iter().zip(&c.arg_types) {
                    lhs.push(' ');
                    lhs.push_str(&self.value_name(ty, *a));
                }
                writeln!(f, "  {lhs} = {}", self.value_name(&c.result, *v as u64))?;
            }
        }
        Ok(())
    }
}

impl FiniteModel {
    fn sizes_u64(&self) -> BTreeMap<String, u64> {
        self.sizes.iter().map(|(a, n)| (a.clone(), *n as u64)).collect()
    }
}

fn domain_size(sizes: &BTreeMap<String, u64>, ty: &Type) -> Option<u64> {
    match ty {
        Type::Bool => Some(2),
        Type::Base(a, _) => sizes.get(a).copied(),
        Type::Pi(_, a, b) => {
            let (a, b) = (domain_size(sizes, a)?, domain_size(sizes, b)?);
            let bits = (b as f64).log2() * a as f64;
            if bits >= 63.0 {
                None
            } else {
                Some(b.pow(a as u32))
            }
        }
    }
}

/// Mixed-radix digits of `n`, least significant first.
fn decode(mut n: u64, radices: &[u64]) -> Vec<u64> {
    radices
        .iter()
        .map(|r| {
            let d = n % r;
            n /= r;
            d
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Compiled terms

#[derive(Clone, Debug)]
enum Ir {
    False,
    /// De Bruijn index from the top of the environment.
    Bound(usize),
    /// Constant applied to some prefix of its arguments.
    Const(usize, Vec<Ir>),
    /// Application whose head is not a constant; `u64` is `|B|` of the head type `A → B`.
    Apply(Box<Ir>, Box<Ir>, u64),
    Implies(Box<Ir>, Box<Ir>),
    Eq(Box<Ir>, Box<Ir>),
    Forall(u64, Box<Ir>),
    Choice(u64, Box<Ir>),
    /// `(domain, codomain)` sizes.
    Lambda(u64, u64, Box<Ir>),
}

#[derive(Clone, Debug)]
struct ConstInfo {
    name: String,
    args: Vec<Type>,
    result: Type,
    radices: Vec<u64>,
    result_size: u64,
    cells: u64,
    local: bool,
}

#[derive(Clone, Debug, Default)]
struct Signature {
    sizes: BTreeMap<String, u64>,
    consts: Vec<ConstInfo>,
    index: HashMap<String, usize>,
}

fn uncurry(ty: &Type) -> (Vec<Type>, Type) {
    let mut args = Vec::new();
    let mut t = ty;
    while let Type::Pi(_, a, b) = t {
        args.push((**a).clone());
        t = b;
    }
    (args, t.clone())
}

impl Signature {
    fn size(&self, ty: &Type) -> Result<u64, OracleError> {
        domain_size(&self.sizes, ty).ok_or_else(|| OracleError::Unsupported(format!("type {ty} is too large")))
    }

    fn add_const(&mut self, name: &str, ty: &Type, local: bool) -> Result<(), OracleError> {
        let (args, result) = uncurry(ty);
        let radices = args.iter().map(|a| self.size(a)).collect::<Result<Vec<_>, _>>()?;
        let result_size = self.size(&result)?;
        let cells = radices
            .iter()
            .try_fold(1u64, |acc, r| acc.checked_mul(*r).filter(|c| *c <= MAX_CELLS))
            .ok_or_else(|| OracleError::Unsupported(format!("table for `{name}` is too large")))?;
        self.index.insert(name.to_string(), self.consts.len());
        self.consts.push(ConstInfo { name: name.to_string(), args, result, radices, result_size, cells, local });
        Ok(())
    }

    fn compile(&self, t: &Term, scope: &mut Vec<(String, Type)>) -> Result<Ir, OracleError> {
        let (head, args) = t.spine();
        if !args.is_empty() {
            if let Term::Var(x) = head {
                if !scope.iter().any(|(y, _)| y == x) {
                    if let Some(&c) = self.index.get(x) {
                        if args.len() <= self.consts[c].args.len() {
                            let ir = args.iter().map(|a| self.compile(a, scope)).collect::<Result<_, _>>()?;
                            return Ok(Ir::Const(c, ir));
                        }
                    }
                }
            }
        }
        Ok(match t {
            Term::False => Ir::False,
            Term::Var(x) => match scope.iter().rposition(|(y, _)| y == x) {
                Some(i) => Ir::Bound(scope.len() - 1 - i),
                None => match self.index.get(x) {
                    Some(&c) => Ir::Const(c, Vec::new()),
                    None => return Err(OracleError::Unsupported(format!("unknown constant `{x}`"))),
                },
            },
            Term::App(f, a) => {
                let fty = self.type_of(f, scope)?;
                let cod = match &fty {
                    Type::Pi(_, _, b) => self.size(b)?,
                    _ => return Err(OracleError::Unsupported(format!("`{f}` is not a function"))),
                };
                Ir::Apply(Box::new(self.compile(f, scope)?), Box::new(self.compile(a, scope)?), cod)
            }
            Term::Implies(p, q) => Ir::Implies(Box::new(self.compile(p, scope)?), Box::new(self.compile(q, scope)?)),
            Term::Eq(_, l, r) => Ir::Eq(Box::new(self.compile(l, scope)?), Box::new(self.compile(r, scope)?)),
            Term::Forall(x, a, b) | Term::Choice(x, a, b) | Term::Lambda(x, a, b) => {
                let n = self.size(a)?;
                if n > MAX_DOMAIN {
                    return Err(OracleError::Unsupported(format!("domain {a} is too large to enumerate")));
                }
                scope.push((x.clone(), (**a).clone()));
                let body = self.compile(b, scope);
                let bty = if matches!(t, Term::Lambda(..)) { Some(self.type_of(b, scope)) } else { None };
                scope.pop();
                let body = Box::new(body?);
                match t {
                    Term::Forall(..) => Ir::Forall(n, body),
                    Term::Choice(..) => Ir::Choice(n, body),
                    _ => Ir::Lambda(n, self.size(&bty.expect("lambda body type")?)?, body),
                }
            }
        })
    }

    fn type_of(&self, t: &Term, scope: &mut Vec<(String, Type)>) -> Result<Type, OracleError> {
        let mut sig = Theory::new();
        for c in &self.consts {
            sig.push(Declaration::Const(c.name.clone(), Type::arrows(c.args.iter().cloned(), c.result.clone())));
        }
        crate::syntax::synth::synth(&sig, scope, t).map_err(OracleError::Unsupported)
    }
}

// ---------------------------------------------------------------------------
// Three-valued evaluation

struct Evaluator<'a> {
    sig: &'a Signature,
    tables: &'a [Vec<u32>],
    env: Vec<u64>,
    /// First unassigned cell touched by the current evaluation.
    block: Option<(usize, usize)>,
}

fn apply_value(f: u64, x: u64, cod: u64) -> u64 {
    (f / cod.pow(x as u32)) % cod
}

impl Evaluator<'_> {
    fn cell(&mut self, c: usize, args: &[u64]) -> Option<u64> {
        let info = &self.sig.consts[c];
        let mut idx = 0u64;
        let mut mul = 1u64;
        for (a, r) in args.iter().zip(&info.radices) {
            idx += a * mul;
            mul *= r;
        }
        let v = self.tables[c][idx as usize];
        if v == UNSET {
            if self.block.is_none() {
                self.block = Some((c, idx as usize));
            }
            None
        } else {
            Some(v as u64)
        }
    }

    /// Value of `c` applied to `args`, building a function value for partial
    /// applications.
    fn const_value(&mut self, c: usize, args: &mut Vec<u64>) -> Option<u64> {
        let info = &self.sig.consts[c];
        if args.len() == info.args.len() {
            return self.cell(c, args);
        }
        let dom = info.radices[args.len()];
        let rest = Type::arrows(info.args[args.len() + 1..].iter().cloned(), info.result.clone());
        let cod = self.sig.size(&rest).ok()?;
        let mut value = 0u64;
        let mut known = true;
        for x in (0..dom).rev() {
            args.push(x);
            let v = self.const_value(c, args);
            args.pop();
            match v {
                Some(v) => value = value * cod + v,
                None => known = false,
            }
        }
        known.then_some(value)
    }

    fn eval(&mut self, ir: &Ir) -> Option<u64> {
        match ir {
            Ir::False => Some(0),
            Ir::Bound(i) => Some(self.env[self.env.len() - 1 - i]),
            Ir::Const(c, args) => {
                let mut vals = Vec::with_capacity(args.len());
                for a in args {
                    vals.push(self.eval(a)?);
                }
                self.const_value(*c, &mut vals)
            }
            Ir::Apply(f, a, cod) => {
                let f = self.eval(f)?;
                let a = self.eval(a)?;
                Some(apply_value(f, a, *cod))
            }
            Ir::Implies(p, q) => match self.eval(p) {
                Some(0) => Some(1),
                pv => match (pv, self.eval(q)) {
                    (_, Some(1)) => Some(1),
                    (Some(1), Some(0)) => Some(0),
                    _ => None,
                },
            },
            Ir::Eq(l, r) => {
                let l = self.eval(l);
                let r = self.eval(r);
                Some((l? == r?) as u64)
            }
            Ir::Forall(n, body) => {
                let mut unknown = false;
                for x in 0..*n {
                    self.env.push(x);
                    let v = self.eval(body);
                    self.env.pop();
                    match v {
                        Some(0) => return Some(0),
                        Some(_) => {}
                        None => unknown = true,
                    }
                }
                if unknown {
                    None
                } else {
                    Some(1)
                }
            }
            Ir::Choice(n, body) => {
                for x in 0..*n {
                    self.env.push(x);
                    let v = self.eval(body);
                    self.env.pop();
                    match v {
                        Some(0) => {}
                        Some(_) => return Some(x),
                        None => return None,
                    }
                }
                Some(0)
            }
            Ir::Lambda(n, cod, body) => {
                let mut value = 0u64;
                for x in (0..*n).rev() {
                    self.env.push(x);
                    let v = self.eval(body);
                    self.env.pop();
                    value = value * cod + v?;
                }
                Some(value)
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Search

/// Grounds the problem for fixed carrier sizes and asks a SAT solver for a
/// model. Values are one-hot literal vectors over their carrier; formulas
/// are single literals. Gates are hash-consed and constant-folded.
struct Grounder<'a> {
    sig: &'a Signature,
    clauses: Vec<Vec<Lit>>,
    vars: usize,
    t: Lit,
    gates: HashMap<Vec<Lit>, Lit>,
    cells: Vec<Vec<Vec<Lit>>>,
    env: Vec<Vec<Lit>>,
    limit: u64,
}

struct TooLarge;

impl<'a> Grounder<'a> {
    fn new(sig: &'a Signature, limit: u64) -> Self {
        let t = Var::from_index(0).positive();
        let mut g = Grounder {
            sig,
            clauses: vec![vec![t]],
            vars: 1,
            t,
            gates: HashMap::new(),
            cells: Vec::new(),
            env: Vec::new(),
            limit,
        };
        for c in &sig.consts {
            let table = (0..c.cells).map(|_| g.fresh_value(c.result_size)).collect();
            g.cells.push(table);
        }
        g
    }

    fn fresh(&mut self) -> Lit {
        self.vars += 1;
        Var::from_index(self.vars - 1).positive()
    }

    fn fresh_value(&mut self, n: u64) -> Vec<Lit> {
        if n == 1 {
            return vec![self.t];
        }
        let v: Vec<Lit> = (0..n).map(|_| self.fresh()).collect();
        self.clauses.push(v.clone());
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                self.clauses.push(vec![!v[i], !v[j]]);
            }
        }
        v
    }

    fn known(&self, n: u64, k: u64) -> Vec<Lit> {
        (0..n).map(|i| if i == k { self.t } else { !self.t }).collect()
    }

    fn and(&mut self, lits: impl IntoIterator<Item = Lit>) -> Result<Lit, TooLarge> {
        let mut v = Vec::new();
        for l in lits {
            if l == !self.t {
                return Ok(!self.t);
            }
            if l != self.t {
                v.push(l);
            }
        }
        v.sort();
        v.dedup();
        if v.windows(2).any(|w| w[0] == !w[1]) {
            return Ok(!self.t);
        }
        match v.len() {
            0 => return Ok(self.t),
            1 => return Ok(v[0]),
            _ => {}
        }
        if let Some(&g) = self.gates.get(&v) {
            return Ok(g);
        }
        if self.clauses.len() as u64 > self.limit {
            return Err(TooLarge);
        }
        let g = self.fresh();
        for &l in &v {
            self.clauses.push(vec![!g, l]);
        }
        let mut big: Vec<Lit> = v.iter().map(|l| !*l).collect();
        big.push(g);
        self.clauses.push(big);
        self.gates.insert(v, g);
        Ok(g)
    }

    fn or(&mut self, lits: impl IntoIterator<Item = Lit>) -> Result<Lit, TooLarge> {
        let neg: Vec<Lit> = lits.into_iter().map(|l| !l).collect();
        Ok(!self.and(neg)?)
    }

    fn truth(&mut self, ir: &Ir) -> Result<Lit, TooLarge> {
        let v = self.value(ir)?;
        Ok(if v.len() == 2 { v[1] } else { v[0] })
    }

    fn boolean(&self, l: Lit) -> Vec<Lit> {
        vec![!l, l]
    }

    /// Value of the constant applied to `args`; a function value if partial.
    fn const_value(&mut self, c: usize, args: &mut Vec<Vec<Lit>>) -> Result<Vec<Lit>, TooLarge> {
        let info = &self.sig.consts[c];
        if args.len() < info.args.len() {
            let dom = info.radices[args.len()];
            let rest = Type::arrows(info.args[args.len() + 1..].iter().cloned(), info.result.clone());
            let cod = self.sig.size(&rest).map_err(|_| TooLarge)?;
            let mut digits = Vec::new();
            for x in 0..dom {
                args.push(self.known(dom, x));
                let v = self.const_value(c, args);
                args.pop();
                digits.push(v?);
            }
            return self.function_value(&digits, cod);
        }
        let radices = info.radices.clone();
        let n = info.result_size as usize;
        // Enumerate argument tuples that are not ruled out by constants.
        let mut out: Vec<Vec<Lit>> = vec![Vec::new(); n];
        let mut tuple = vec![0u64; args.len()];
        loop {
            let sel: Vec<Lit> = tuple.iter().zip(args.iter()).map(|(k, a)| a[*k as usize]).collect();
            if !sel.contains(&!self.t) {
                let mut idx = 0u64;
                let mut mul = 1u64;
                for (k, r) in tuple.iter().zip(&radices) {
                    idx += k * mul;
                    mul *= r;
                }
                let cell = self.cells[c][idx as usize].clone();
                for (k, lit) in cell.iter().enumerate() {
                    let mut conj = sel.clone();
                    conj.push(*lit);
                    let g = self.and(conj)?;
                    out[k].push(g);
                }
            }
            let mut i = 0;
            loop {
                if i == tuple.len() {
                    let mut res = Vec::with_capacity(n);
                    for disj in out {
                        res.push(self.or(disj)?);
                    }
                    return Ok(res);
                }
                tuple[i] += 1;
                if tuple[i] < radices[i] {
                    break;
                }
                tuple[i] = 0;
                i += 1;
            }
        }
    }

    /// One-hot encoding of the function whose value at `x` is `digits[x]`.
    fn function_value(&mut self, digits: &[Vec<Lit>], cod: u64) -> Result<Vec<Lit>, TooLarge> {
        let size = cod.checked_pow(digits.len() as u32).filter(|s| *s <= 4096).ok_or(TooLarge)?;
        let mut out = Vec::with_capacity(size as usize);
        for idx in 0..size {
            let ds = decode(idx, &vec![cod; digits.len()]);
            let lits: Vec<Lit> = ds.iter().zip(digits).map(|(d, v)| v[*d as usize]).collect();
            out.push(self.and(lits)?);
        }
        Ok(out)
    }

    fn value(&mut self, ir: &Ir) -> Result<Vec<Lit>, TooLarge> {
        Ok(match ir {
            Ir::False => self.boolean(!self.t),
            Ir::Bound(i) => self.env[self.env.len() - 1 - i].clone(),
            Ir::Const(c, args) => {
                let mut vals = Vec::with_capacity(args.len());
                for a in args {
                    vals.push(self.value(a)?);
                }
                self.const_value(*c, &mut vals)?
            }
            Ir::Apply(f, a, cod) => {
                let f = self.value(f)?;
                let a = self.value(a)?;
                let mut out: Vec<Vec<Lit>> = vec![Vec::new(); *cod as usize];
                for (fi, fl) in f.iter().enumerate() {
                    if *fl == !self.t {
                        continue;
                    }
                    for (ai, al) in a.iter().enumerate() {
                        if *al == !self.t {
                            continue;
                        }
                        let k = apply_value(fi as u64, ai as u64, *cod);
                        let g = self.and([*fl, *al])?;
                        out[k as usize].push(g);
                    }
                }
                let mut res = Vec::new();
                for d in out {
                    res.push(self.or(d)?);
                }
                res
            }
            Ir::Implies(p, q) => {
                let p = self.truth(p)?;
                let q = self.truth(q)?;
                let l = self.or([!p, q])?;
                self.boolean(l)
            }
            Ir::Eq(l, r) => {
                let l = self.value(l)?;
                let r = self.value(r)?;
                let mut disj = Vec::new();
                for (a, b) in l.iter().zip(&r) {
                    disj.push(self.and([*a, *b])?);
                }
                let e = self.or(disj)?;
                self.boolean(e)
            }
            Ir::Forall(n, body) => {
                let mut conj = Vec::new();
                for x in 0..*n {
                    let k = self.known(*n, x);
                    self.env.push(k);
                    let b = self.truth(body);
                    self.env.pop();
                    conj.push(b?);
                }
                let l = self.and(conj)?;
                self.boolean(l)
            }
            Ir::Choice(n, body) => {
                let mut sat = Vec::new();
                for x in 0..*n {
                    let k = self.known(*n, x);
                    self.env.push(k);
                    let b = self.truth(body);
                    self.env.pop();
                    sat.push(b?);
                }
                let mut out = Vec::with_capacity(sat.len());
                for k in 0..sat.len() {
                    let mut conj: Vec<Lit> = sat[..k].iter().map(|l| !*l).collect();
                    conj.push(sat[k]);
                    out.push(self.and(conj)?);
                }
                let none = self.and(sat.iter().map(|l| !*l))?;
                out[0] = self.or([out[0], none])?;
                out
            }
            Ir::Lambda(n, cod, body) => {
                let mut digits = Vec::new();
                for x in 0..*n {
                    let k = self.known(*n, x);
                    self.env.push(k);
                    let v = self.value(body);
                    self.env.pop();
                    digits.push(v?);
                }
                self.function_value(&digits, *cod)?
            }
        })
    }

    fn read_tables(&self, model: &[Lit]) -> Vec<Vec<u32>> {
        let holds = |l: Lit| {
            if l == self.t {
                true
            } else if l == !self.t {
                false
            } else {
                model[l.index()] == l
            }
        };
        self.cells
            .iter()
            .map(|table| {
                table
                    .iter()
                    .map(|v| v.iter().position(|l| holds(*l)).expect("one-hot value") as u32)
                    .collect()
            })
            .collect()
    }
}

enum Solved {
    Sat(Vec<Lit>),
    Unsat,
    Timeout,
}

fn solve(clauses: Vec<Vec<Lit>>, deadline: Option<Instant>) -> Solved {
    let run = move || {
        let mut solver = Solver::new();
        for c in &clauses {
            solver.add_clause(c);
        }
        match solver.solve() {
            Ok(true) => Solved::Sat(solver.model().unwrap_or_default()),
            _ => Solved::Unsat,
        }
    };
    let Some(deadline) = deadline else {
        return run();
    };
    // The solver cannot be interrupted; on timeout the worker is abandoned.
    let (tx, rx) = std::sync::mpsc::channel();
    std::thread::spawn(move || {
        let _ = tx.send(run());
    });
    match rx.recv_timeout(deadline.saturating_duration_since(Instant::now())) {
        Ok(s) => s,
        Err(_) => Solved::Timeout,
    }
}

/// All size vectors in `[1, max]^k`, by largest entry then lexicographically.
fn size_vectors(k: usize, max: usize) -> Vec<Vec<usize>> {
    let mut all: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..k {
        all = all.into_iter().flat_map(|v| (1..=max).map(move |n| [v.clone(), vec![n]].concat())).collect();
    }
    all.sort_by_key(|v| (v.iter().copied().max().unwrap_or(0), v.clone()));
    all
}

/// Searches for a model of `thy` (theory and local context, in that order)
/// in which `conjecture` is false. Constants named in `locals` are reported
/// as the falsifying assignment. Without a conjecture this is a plain
/// satisfiability search.
pub fn countermodel(
    thy: &Theory,
    locals: &BTreeSet<String>,
    conjecture: Option<&Term>,
    budget: &SearchBudget,
) -> Result<OracleOutcome, OracleError> {
    let mut bases = Vec::new();
    for d in thy {
        if let Declaration::BaseType(a, tele) = d {
            if !tele.is_empty() {
                return Err(OracleError::Unsupported(format!("dependent base type `{a}`")));
            }
            bases.push(a.clone());
        }
    }
    let deadline = budget.timeout.map(|t| Instant::now() + t);
    let mut completed = 0;
    for sizes in size_vectors(bases.len(), budget.max_size.max(1)) {
        let mut sig = Signature::default();
        for (a, n) in bases.iter().zip(&sizes) {
            sig.sizes.insert(a.clone(), *n as u64);
        }
        for d in thy {
            if let Declaration::Const(c, ty) = d {
                if !ty.is_simple() || has_dependency(ty) {
                    return Err(OracleError::Unsupported(format!("`{c}` has a dependent type")));
                }
                sig.add_const(c, ty, locals.contains(c))?;
            }
        }
        let mut goals = Vec::new();
        if let Some(c) = conjecture {
            goals.push((sig.compile(&beta_normalize(c), &mut Vec::new())?, false));
        }
        for (_, ax) in thy.axioms() {
            goals.push((sig.compile(&beta_normalize(ax), &mut Vec::new())?, true));
        }
        let exhausted = |reason| Ok(OracleOutcome::Exhausted { reason, sizes_completed: completed });
        let mut g = Grounder::new(&sig, budget.max_clauses);
        for (ir, want) in &goals {
            match g.truth(ir) {
                Ok(l) => g.clauses.push(vec![if *want { l } else { !l }]),
                Err(TooLarge) => return exhausted(Exhaustion::Size),
            }
        }
        if deadline.is_some_and(|d| Instant::now() >= d) {
            return exhausted(Exhaustion::Time);
        }
        let clauses = std::mem::take(&mut g.clauses);
        match solve(clauses, deadline) {
            Solved::Sat(model) => {
                let tables = g.read_tables(&model);
                let mut ev = Evaluator { sig: &sig, tables: &tables, env: Vec::new(), block: None };
                for (ir, want) in &goals {
                    assert_eq!(ev.eval(ir), Some(*want as u64), "solver model violates a goal");
                }
                let model = FiniteModel {
                    sizes: bases.iter().cloned().zip(sizes.iter().copied()).collect(),
                    constants: sig
                        .consts
                        .iter()
                        .zip(tables)
                        .map(|(c, table)| ConstInterp {
                            name: c.name.clone(),
                            ty: Type::arrows(c.args.iter().cloned(), c.result.clone()).to_string(),
                            local: c.local,
                            arg_types: c.args.clone(),
                            result: c.result.clone(),
                            table,
                        })
                        .collect(),
                };
                return Ok(OracleOutcome::Countermodel(model));
            }
            Solved::Unsat => completed += 1,
            Solved::Timeout => return exhausted(Exhaustion::Time),
        }
    }
    Ok(OracleOutcome::NoCountermodel { max_size: budget.max_size })
}

fn has_dependency(ty: &Type) -> bool {
    match ty {
        Type::Pi(x, a, b) => (x != ARROW_BINDER && b.has_free(x)) || has_dependency(a) || has_dependency(b),
        _ => false,
    }
}

/// Countermodel search for a kernel obligation; context constants form the assignment.
pub fn check_obligation(
    ob: &crate::kernel::Obligation,
    budget: &SearchBudget,
) -> Result<OracleOutcome, OracleError> {
    let locals = ob.hol_context.names();
    countermodel(&ob.problem(), &locals, Some(&ob.conjecture), budget)
}
