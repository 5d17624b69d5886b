//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any failed.

mod common;

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use dhol::bridge::{demangle, discharge, emit_thf, read_thf, DischargeOptions, ProverConfig};
use dhol::corpus::{gen_all, Outcome};
use dhol::erasure::{erase_term, erase_theory, ErasureVariant};
use dhol::kernel::{check_theory, infer_type, local, Mode, ObligationKind};
use dhol::oracle::{check_obligation, countermodel, ConstInterp, FiniteModel, OracleOutcome, SearchBudget};
use dhol::syntax::sugar::{and, exists, not, or, top};
use dhol::syntax::{alpha_eq, parse_term, parse_theory, subst, Term, Theory, Type};

use common::{context, signature, theories_alpha_eq, Gen};

/// Wall-clock limits per criterion.
const LIMIT_GOLDEN: Duration = Duration::from_secs(1);
const LIMIT_WITNESS: Duration = Duration::from_secs(10);
const LIMIT_SHAPE: Duration = Duration::from_secs(30);
const LIMIT_ROUND_TRIP: Duration = Duration::from_secs(5);
/// Fuzzed terms per erasure variant.
const FUZZ_CASES: u64 = 1000;
/// Largest carrier in the exhaustive semantics check.
const SEMANTICS_MAX_SIZE: usize = 3;
/// External prover time limit when one is configured.
const ATP_SECONDS: u64 = 90;

const VARIANTS: [ErasureVariant; 2] = [ErasureVariant::Strong, ErasureVariant::Weak];
const MODES: [Mode; 2] = [Mode::StrongEpsilon, Mode::WeakEpsilon];

fn within(limit: Duration, start: Instant) -> Result<(), String> {
    let t = start.elapsed();
    if t <= limit {
        Ok(())
    } else {
        Err(format!("took {:.2}s, limit {:.0}s", t.as_secs_f64(), limit.as_secs_f64()))
    }
}

/// The theory `a : Π x:o. tp, c : a ⊥` and the term `εx:a ⊥.⊤`.
fn counterexample() -> (Theory, Term) {
    let thy = parse_theory("type a : pi x : o . tp. const c : a $false.").unwrap().theory;
    let t = Term::choice("x", Type::base("a", vec![Term::False]), top());
    (thy, t)
}

fn golden_erasures() -> Result<String, String> {
    let start = Instant::now();
    let (thy, t) = counterexample();
    let hol = erase_theory(&thy, &Theory::new(), ErasureVariant::Strong).hol_theory;
    // The displayed terms, transcribed.
    let strong = parse_term("eps x : a . (a* $false x x & $true)", &hol).map_err(|e| e.to_string())?;
    let weak = parse_term(
        "eps z : a . (((? x : a . (a* $false x x & $true)) & z = (eps x : a . (a* $false x x & $true)))
                    | (~ (? x : a . (a* $false x x & $true)) & z = (eps x : a . a* $false x x)))",
        &hol,
    )
    .map_err(|e| e.to_string())?;
    for (v, want) in [(ErasureVariant::Strong, &strong), (ErasureVariant::Weak, &weak)] {
        let got = erase_term(&t, v);
        if !alpha_eq(&got, want) {
            return Err(format!("{} erasure: got {got}, want {want}", v.as_str()));
        }
    }
    within(LIMIT_GOLDEN, start)?;
    Ok("strong and weak erasure of the choice counterexample match the displayed terms".into())
}

fn incompleteness_witness() -> Result<String, String> {
    let start = Instant::now();
    let (thy, t) = counterexample();
    for mode in MODES {
        let (ty, obs) = infer_type(&thy, &Theory::new(), &t, mode).map_err(|e| e.to_string())?;
        if ty != Type::base("a", vec![Term::False]) {
            return Err(format!("term has type {ty}"));
        }
        let open: Vec<_> = obs.iter().filter(|o| !o.auto_discharged).collect();
        if !open.is_empty() {
            return Err(format!("{mode:?}: {} typing obligation(s) left open", open.len()));
        }
    }
    let hol = erase_theory(&thy, &Theory::new(), ErasureVariant::Strong).hol_theory;
    if hol.const_type("a*").is_none() {
        return Err("erased theory lacks the PER constant a*".into());
    }
    let reflexive = |e: &Term| Term::apps(Term::var("a*"), [Term::False, e.clone(), e.clone()]);
    let naive = Term::choice("x", Type::simple("a"), top());
    let budget = SearchBudget { max_size: 3, ..SearchBudget::default() };
    let found = match countermodel(&hol, &Default::default(), Some(&reflexive(&naive)), &budget) {
        Ok(OracleOutcome::Countermodel(m)) => m,
        other => return Err(format!("naive erasure: expected a countermodel, got {other:?}")),
    };
    let size = found.sizes.get("a").copied().unwrap_or(0);
    if size > 2 {
        return Err(format!("countermodel carrier has size {size}"));
    }
    let guarded = erase_term(&t, ErasureVariant::Strong);
    match countermodel(&hol, &Default::default(), Some(&reflexive(&guarded)), &budget) {
        Ok(OracleOutcome::NoCountermodel { max_size: 3 }) => {}
        other => return Err(format!("guarded erasure: expected no countermodel up to 3, got {other:?}")),
    }
    within(LIMIT_WITNESS, start)?;
    Ok(format!("naive erasure refuted at carrier size {size}; guarded erasure has no countermodel up to size 3"))
}

fn completeness_shape() -> Result<String, String> {
    let start = Instant::now();
    let mut checked = 0;
    for e in gen_all() {
        for mode in MODES {
            let r = check_theory(&e.theory, Some(&e.conjecture), mode);
            if !r.is_well_formed() {
                continue;
            }
            let hol = check_theory(&r.hol_theory, r.hol_conjecture.as_ref(), Mode::SimpleHol);
            if !hol.is_well_formed() {
                return Err(format!("{} {mode:?}: erased theory rejected: {:?}", e.name, hol.errors));
            }
            for o in &r.obligations {
                let h = check_theory(&o.problem(), Some(&o.conjecture), Mode::SimpleHol);
                if !h.is_well_formed() {
                    return Err(format!("{} {mode:?} {}: {:?}", e.name, o.id, h.errors));
                }
                checked += 1;
            }
        }
    }
    within(LIMIT_SHAPE, start)?;
    Ok(format!("{checked} obligations and every erased corpus theory are simply typed"))
}

fn compositionality() -> Result<String, String> {
    let thy = signature();
    let ctx = context();
    let nat = Type::simple("nat");
    let mut with_choice = 0;
    for v in VARIANTS {
        let mode = Mode::from_variant(v);
        for seed in 0..FUZZ_CASES {
            let t = Gen::new(seed).bool(4);
            let u = Gen::with_env(seed ^ 0x5eed, &[("m", nat.clone())]).nat(3);
            match infer_type(&thy, &ctx, &t, mode) {
                Ok((Type::Bool, _)) => {}
                other => return Err(format!("seed {seed}: generated term ill-typed: {other:?}\n{t}")),
            }
            if !matches!(infer_type(&thy, &ctx, &u, mode), Ok((ref ty, _)) if *ty == nat) {
                return Err(format!("seed {seed}: generated argument ill-typed: {u}"));
            }
            if t.contains_choice() {
                with_choice += 1;
            }
            let lhs = erase_term(&subst(&t, "x", &u), v);
            let rhs = subst(&erase_term(&t, v), "x", &erase_term(&u, v));
            if !alpha_eq(&lhs, &rhs) {
                return Err(format!("{} seed {seed}: t = {t}, u = {u}\n  {lhs}\n  {rhs}", v.as_str()));
            }
        }
    }
    Ok(format!("{FUZZ_CASES} terms per variant ({} with choice), zero failures", with_choice / 2))
}

/// Boolean bodies over `p x`, up to two connectives deep.
fn bodies() -> Vec<Term> {
    let px = Term::app(Term::var("p"), Term::var("x"));
    let mut level = vec![px, top(), Term::False];
    let mut all = level.clone();
    for _ in 0..2 {
        let mut next = Vec::new();
        for a in &level {
            next.push(not(a.clone()));
            for b in &all {
                next.push(and(a.clone(), b.clone()));
                next.push(or(a.clone(), b.clone()));
                next.push(Term::implies(a.clone(), b.clone()));
            }
        }
        all.extend(next.iter().cloned());
        level = next;
    }
    all
}

fn choice_semantics() -> Result<String, String> {
    let a = Type::simple("a");
    let bodies = bodies();
    let mut models = 0;
    let mut evaluated = 0;
    for size in 1..=SEMANTICS_MAX_SIZE {
        for bits in 0u32..(1 << size) {
            let table = (0..size).map(|i| (bits >> i) & 1).collect();
            let p = ConstInterp {
                name: "p".into(),
                ty: "a -> o".into(),
                local: false,
                arg_types: vec![a.clone()],
                result: Type::Bool,
                table,
            };
            let model = FiniteModel { sizes: BTreeMap::from([("a".to_string(), size)]), constants: vec![p] };
            models += 1;
            for t in &bodies {
                let eps = Term::choice("x", a.clone(), t.clone());
                let axiom = Term::implies(exists("x", a.clone(), t.clone()), subst(t, "x", &eps));
                match model.eval(&axiom) {
                    Ok(true) => evaluated += 1,
                    Ok(false) => return Err(format!("violated for {t} in\n{model}")),
                    Err(e) => return Err(format!("{t}: {e}")),
                }
            }
        }
    }
    Ok(format!("{evaluated} instances over {models} models and {} bodies, zero violations", bodies.len()))
}

fn thf_round_trip() -> Result<String, String> {
    let start = Instant::now();
    let mut problems = 0;
    let mut check = |name: &str, thy: &Theory, conj: &Term| -> Result<(), String> {
        let p = emit_thf(thy, Some(conj), name, &[]).map_err(|e| format!("{name}: {e}"))?;
        let (t2, c2) = read_thf(&p.text).map_err(|e| format!("{name}: {e}"))?;
        let (t2, c2) = demangle(&t2, c2.as_ref(), &p.symbols);
        if !theories_alpha_eq(thy, &t2) || !c2.is_some_and(|c| alpha_eq(&c, conj)) {
            return Err(format!("{name} does not round-trip:\n{}", p.text));
        }
        problems += 1;
        Ok(())
    };
    for e in gen_all() {
        for mode in MODES {
            let r = check_theory(&e.theory, Some(&e.conjecture), mode);
            if let Some(c) = &r.hol_conjecture {
                check(&e.name, &r.hol_theory, c)?;
            }
            for o in &r.obligations {
                check(&format!("{}_{}", e.name, o.id), &o.problem(), &o.conjecture)?;
            }
        }
    }
    within(LIMIT_ROUND_TRIP, start)?;
    Ok(format!("{problems} problems re-parse to alpha-equal theories"))
}

fn discharge_options() -> DischargeOptions {
    let prover = std::env::var("DHOL_PROVER_CMD").ok().filter(|c| !c.trim().is_empty()).map(|c| {
        let mut p = ProverConfig::new(c);
        p.time_limit = ATP_SECONDS;
        p
    });
    DischargeOptions { prover, oracle: Some(SearchBudget::default()), jobs: 0 }
}

fn table_typecheck() -> Result<String, String> {
    let opts = discharge_options();
    let mut gated = 0;
    let mut mismatches = Vec::new();
    let mut prove_consistent = 0;
    let mut prove_rows = 0;
    for e in gen_all() {
        for mode in MODES {
            let r = check_theory(&e.theory, Some(&e.conjecture), mode);
            let (typing, conj): (Vec<_>, Vec<_>) =
                r.obligations.iter().cloned().partition(|o| o.kind != ObligationKind::Conjecture);
            let typechecks = r.is_well_formed() && discharge(&typing, &opts).success();
            let (want_tc, want_prove) = match mode {
                Mode::StrongEpsilon => (e.expected.eps1_typecheck, e.expected.eps1_prove),
                _ => (e.expected.eps2_typecheck, e.expected.eps2_prove),
            };
            if want_tc != Outcome::ProverDependent {
                gated += 1;
                if !want_tc.admits(typechecks) {
                    mismatches.push(format!("{} {mode:?}: expected {want_tc}, got {typechecks}", e.name));
                }
            }
            if typechecks {
                prove_rows += 1;
                let proved = discharge(&conj, &opts).success();
                if want_prove.admits(proved) {
                    prove_consistent += 1;
                }
            }
        }
    }
    if !mismatches.is_empty() {
        return Err(mismatches.join("; "));
    }
    Ok(format!(
        "{gated} gated verdicts match; prove column (not gated) consistent on {prove_consistent}/{prove_rows}"
    ))
}

fn mode_implication() -> Result<String, String> {
    let budget = SearchBudget::default();
    let mut sites = 0;
    let mut by_local = 0;
    for e in gen_all() {
        let strong = check_theory(&e.theory, Some(&e.conjecture), Mode::StrongEpsilon);
        let weak = check_theory(&e.theory, Some(&e.conjecture), Mode::WeakEpsilon);
        let weak_sites: BTreeMap<usize, _> = weak
            .obligations
            .iter()
            .filter(|o| o.kind == ObligationKind::TypeInhabited)
            .filter_map(|o| o.origin.choice_site.map(|k| (k, o)))
            .collect();
        for s in strong.obligations.iter().filter(|o| o.kind == ObligationKind::ChoiceWitness) {
            let k = s.origin.choice_site.ok_or("choice obligation without a site")?;
            let w = weak_sites.get(&k).ok_or_else(|| format!("{}: site {k} has no weak obligation", e.name))?;
            if !theories_alpha_eq(&s.hol_context, &w.hol_context) {
                return Err(format!("{}: site {k} contexts differ between modes", e.name));
            }
            sites += 1;
            let goal = Term::implies(s.conjecture.clone(), w.conjecture.clone());
            if local::discharge(&s.hol_theory, &s.hol_context, &goal) {
                by_local += 1;
                continue;
            }
            let mut ob = s.clone();
            ob.conjecture = goal;
            match check_obligation(&ob, &budget) {
                Ok(OracleOutcome::NoCountermodel { .. }) => {}
                other => return Err(format!("{} site {k}: {other:?}", e.name)),
            }
        }
    }
    if sites == 0 {
        return Err("no choice sites in the corpus".into());
    }
    let bounded = sites - by_local;
    Ok(format!("{sites} sites; {by_local} proved by the local prover, {bounded} without countermodel"))
}

type Criterion = (u32, &'static str, fn() -> Result<String, String>);

fn main() {
    let criteria: [Criterion; 8] = [
        (1, "erasure golden terms", golden_erasures),
        (2, "incompleteness witness", incompleteness_witness),
        (3, "completeness shape", completeness_shape),
        (4, "erasure commutes with substitution", compositionality),
        (5, "type-check verdicts", table_typecheck),
        (6, "choice semantics", choice_semantics),
        (7, "THF round trip", thf_round_trip),
        (8, "strong obligation implies weak", mode_implication),
    ];
    // Keep panic messages out of the report; they are caught below.
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (n, name, run) in criteria {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS {n} {name} ({secs:.2}s): {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL {n} {name} ({secs:.2}s): {why}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 8 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
