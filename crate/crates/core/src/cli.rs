//! Command-line front end.
//!
//! Exit codes: 0 success, 1 open obligations or unproved conjecture,
//! 2 structural errors (parse or typing), 64 usage errors.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

use crate::bridge::{discharge, emit_thf, read_thf, DischargeOptions, DischargeReport, ProverConfig};
use crate::corpus;
use crate::erasure::{erase_theory, erase_term, ErasureVariant};
use crate::kernel::{check_theory, CheckReport, Mode, Obligation, ObligationKind};
use crate::oracle::{countermodel, OracleOutcome, SearchBudget};
use crate::syntax::{parse_theory, Document, Term, Theory};

pub const EXIT_OK: i32 = 0;
pub const EXIT_OPEN: i32 = 1;
pub const EXIT_STRUCTURAL: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

/// Environment variable consulted for the prover command when neither a flag
/// nor the config file sets one.
pub const PROVER_ENV: &str = "DHOL_PROVER_CMD";

#[derive(Parser, Debug)]
#[command(name = "dhol", version, about = "Type checker and HOL translator for dependent HOL with choice")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Type-check theories and discharge the typing obligations.
    Check(CommonArgs),
    /// Write the erased theory and conjecture as THF.
    Erase(CommonArgs),
    /// Write every obligation as a THF problem.
    Emit(CommonArgs),
    /// Type-check and prove the conjecture.
    Prove(CommonArgs),
    /// Write the benchmark problems and their manifest.
    GenCorpus {
        #[arg(short, long, default_value = "corpus")]
        output: PathBuf,
    },
    /// Search for a finite countermodel of the erased conjecture.
    Oracle(CommonArgs),
}

#[derive(Args, Debug, Clone)]
struct CommonArgs {
    /// Input files (`.dhol`, or `.p` THF for `oracle`).
    #[arg(required = true)]
    files: Vec<PathBuf>,
    /// Strong choice rule (the default).
    #[arg(long, conflicts_with = "eps2")]
    eps1: bool,
    /// Weak choice rule.
    #[arg(long)]
    eps2: bool,
    /// Strong erasure.
    #[arg(long)]
    strong: bool,
    /// Weak erasure.
    #[arg(long)]
    weak: bool,
    /// Allow an erasure that does not match the choice rule.
    #[arg(long)]
    force_variant: bool,
    /// Output directory.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Prover command template with `{problem}` and `{timeout}` placeholders.
    #[arg(long)]
    prover_cmd: Option<String>,
    /// key=value file with prover_cmd, timeout, jobs, max_size, oracle.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Prover time limit in seconds.
    #[arg(long)]
    timeout: Option<u64>,
    /// Parallel discharge jobs.
    #[arg(long)]
    jobs: Option<usize>,
    /// Write a JSON summary here.
    #[arg(long)]
    json_report: Option<PathBuf>,
    /// Largest carrier size for the oracle.
    #[arg(long)]
    max_size: Option<usize>,
    /// Do not run the finite-model oracle.
    #[arg(long)]
    no_oracle: bool,
}

struct Settings {
    mode: Mode,
    variants: Vec<ErasureVariant>,
    opts: DischargeOptions,
}

fn usage(msg: &str) -> i32 {
    eprintln!("error: {msg}");
    eprintln!("Try 'dhol --help' for more information.");
    EXIT_USAGE
}

fn read_config(path: &Path) -> Result<BTreeMap<String, String>, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let mut map = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| format!("{}:{}: expected key=value", path.display(), i + 1))?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

fn settings(a: &CommonArgs) -> Result<Settings, String> {
    let mode = if a.eps2 || (a.weak && !a.eps1 && !a.strong) { Mode::WeakEpsilon } else { Mode::StrongEpsilon };
    let mut variants = Vec::new();
    if a.strong {
        variants.push(ErasureVariant::Strong);
    }
    if a.weak {
        variants.push(ErasureVariant::Weak);
    }
    let paired = mode.variant().expect("erasing mode");
    if variants.is_empty() {
        variants.push(paired);
    }
    if !a.force_variant && variants.iter().any(|v| *v != paired) {
        return Err(format!(
            "--{} pairs with the {} erasure; pass --force-variant to override",
            if mode == Mode::StrongEpsilon { "eps1" } else { "eps2" },
            paired.as_str()
        ));
    }
    let cfg = match &a.config {
        Some(p) => read_config(p)?,
        None => BTreeMap::new(),
    };
    let parse_num = |key: &str| -> Result<Option<u64>, String> {
        cfg.get(key).map(|v| v.parse::<u64>().map_err(|_| format!("config `{key}` must be a number"))).transpose()
    };
    let command = a.prover_cmd.clone().or_else(|| cfg.get("prover_cmd").cloned()).or_else(|| std::env::var(PROVER_ENV).ok());
    let timeout = a.timeout.or(parse_num("timeout")?).unwrap_or(ProverConfig::DEFAULT_TIME_LIMIT);
    if timeout == 0 {
        return Err("the time limit must be positive".into());
    }
    let jobs = a.jobs.or(parse_num("jobs")?.map(|n| n as usize)).unwrap_or(0);
    let max_size = a.max_size.or(parse_num("max_size")?.map(|n| n as usize)).unwrap_or(SearchBudget::default().max_size);
    if max_size == 0 {
        return Err("--max-size must be at least 1".into());
    }
    let oracle_on = !a.no_oracle && cfg.get("oracle").map_or(true, |v| v != "false" && v != "0");
    let prover = command.filter(|c| !c.trim().is_empty()).map(|c| {
        let mut p = ProverConfig::new(c);
        p.time_limit = timeout;
        p
    });
    let oracle = oracle_on.then(|| SearchBudget { max_size, ..SearchBudget::default() });
    Ok(Settings { mode, variants, opts: DischargeOptions { prover, oracle, jobs } })
}

fn stem(path: &Path) -> String {
    path.file_stem().map_or_else(|| "problem".into(), |s| s.to_string_lossy().into_owned())
}

/// Reads and parses a `.dhol` file, printing diagnostics on failure.
fn load(path: &Path) -> Result<Document, i32> {
    let text = fs::read_to_string(path).map_err(|e| {
        eprintln!("{}: error: {e}", path.display());
        EXIT_STRUCTURAL
    })?;
    parse_theory(&text).map_err(|e| {
        eprintln!("{}:{e}", path.display());
        EXIT_STRUCTURAL
    })
}

fn type_errors(path: &Path, doc: &Document, report: &CheckReport) -> bool {
    for d in &report.errors {
        let pos = match d.decl {
            Some(i) => doc.positions.get(i).copied(),
            None => doc.conjecture_pos,
        };
        match pos {
            Some(p) => eprintln!("{}:{p}: error: {d}", path.display()),
            None => eprintln!("{}: error: {d}", path.display()),
        }
    }
    !report.errors.is_empty()
}

fn write_file(dir: &Path, name: &str, text: &str) -> Result<PathBuf, i32> {
    fs::create_dir_all(dir).map_err(|e| {
        eprintln!("{}: error: {e}", dir.display());
        EXIT_STRUCTURAL
    })?;
    let path = dir.join(name);
    fs::write(&path, text).map_err(|e| {
        eprintln!("{}: error: {e}", path.display());
        EXIT_STRUCTURAL
    })?;
    Ok(path)
}

fn mode_name(m: Mode) -> &'static str {
    match m {
        Mode::StrongEpsilon => "eps1",
        Mode::WeakEpsilon => "eps2",
        Mode::SimpleHol => "hol",
    }
}

fn erased_problem(doc: &Document, variant: ErasureVariant) -> (Theory, Option<Term>) {
    let erased = erase_theory(&doc.theory, &Theory::new(), variant);
    (erased.hol_theory, doc.conjecture.as_ref().map(|c| erase_term(c, variant)))
}

fn print_report(path: &Path, mode: Mode, rep: &DischargeReport) {
    println!("{} [{}]", path.display(), mode_name(mode));
    for line in rep.text().lines() {
        println!("  {line}");
    }
    println!("  {} obligation(s), {} discharged, {} open", rep.entries.len(), rep.discharged(), rep.entries.len() - rep.discharged());
}

fn json_entry(path: &Path, mode: Mode, rep: &DischargeReport) -> serde_json::Value {
    let report: serde_json::Value = serde_json::from_str(&rep.json()).expect("valid report json");
    serde_json::json!({ "file": path.display().to_string(), "mode": mode_name(mode), "report": report })
}

fn write_json(target: &Option<PathBuf>, runs: Vec<serde_json::Value>) -> Result<(), i32> {
    let Some(path) = target else { return Ok(()) };
    let doc = serde_json::json!({ "version": env!("CARGO_PKG_VERSION"), "runs": runs });
    fs::write(path, serde_json::to_string_pretty(&doc).expect("json") + "\n").map_err(|e| {
        eprintln!("{}: error: {e}", path.display());
        EXIT_STRUCTURAL
    })
}

fn cmd_check(a: &CommonArgs, s: &Settings, prove: bool) -> i32 {
    let mut code = EXIT_OK;
    let mut runs = Vec::new();
    for path in &a.files {
        let doc = match load(path) {
            Ok(d) => d,
            Err(c) => {
                code = code.max(c);
                continue;
            }
        };
        let report = check_theory(&doc.theory, doc.conjecture.as_ref(), s.mode);
        if type_errors(path, &doc, &report) {
            code = code.max(EXIT_STRUCTURAL);
            continue;
        }
        let obligations: Vec<Obligation> = report
            .obligations
            .iter()
            .filter(|o| prove || o.kind != ObligationKind::Conjecture)
            .cloned()
            .collect();
        let rep = discharge(&obligations, &s.opts);
        print_report(path, s.mode, &rep);
        if prove && doc.conjecture.is_none() {
            eprintln!("{}: error: no conjecture to prove", path.display());
            code = code.max(EXIT_OPEN);
        }
        if !rep.success() {
            code = code.max(EXIT_OPEN);
        }
        if prove {
            if let Some(dir) = &a.output {
                for v in &s.variants {
                    if let Err(c) = write_erased(path, &doc, *v, dir) {
                        code = code.max(c);
                    }
                }
            }
        }
        runs.push(json_entry(path, s.mode, &rep));
    }
    if let Err(c) = write_json(&a.json_report, runs) {
        code = code.max(c);
    }
    code
}

fn write_erased(path: &Path, doc: &Document, v: ErasureVariant, dir: &Path) -> Result<PathBuf, i32> {
    let name = stem(path);
    let (thy, conj) = erased_problem(doc, v);
    let header = vec![format!("{name}: {} erasure", v.as_str())];
    let problem = emit_thf(&thy, conj.as_ref(), &name, &header).map_err(|e| {
        eprintln!("{}: error: {e}", path.display());
        EXIT_STRUCTURAL
    })?;
    write_file(dir, &format!("{name}.{}.p", v.as_str()), &problem.text)
}

fn cmd_erase(a: &CommonArgs, s: &Settings) -> i32 {
    let mut code = EXIT_OK;
    let dir = a.output.clone().unwrap_or_else(|| PathBuf::from("."));
    for path in &a.files {
        let doc = match load(path) {
            Ok(d) => d,
            Err(c) => {
                code = code.max(c);
                continue;
            }
        };
        let report = check_theory(&doc.theory, doc.conjecture.as_ref(), s.mode);
        if type_errors(path, &doc, &report) {
            code = code.max(EXIT_STRUCTURAL);
            continue;
        }
        for v in &s.variants {
            match write_erased(path, &doc, *v, &dir) {
                Ok(p) => println!("{}", p.display()),
                Err(c) => code = code.max(c),
            }
        }
    }
    code
}

fn cmd_emit(a: &CommonArgs, s: &Settings) -> i32 {
    let mut code = EXIT_OK;
    for path in &a.files {
        let doc = match load(path) {
            Ok(d) => d,
            Err(c) => {
                code = code.max(c);
                continue;
            }
        };
        let report = check_theory(&doc.theory, doc.conjecture.as_ref(), s.mode);
        if type_errors(path, &doc, &report) {
            code = code.max(EXIT_STRUCTURAL);
            continue;
        }
        let name = stem(path);
        let variant = s.mode.variant().expect("erasing mode");
        for ob in &report.obligations {
            let header = vec![
                format!("{name}: obligation {} ({}) from {}", ob.id, ob.kind.as_str(), ob.origin.label),
                format!("{} erasure", variant.as_str()),
            ];
            let file = format!("{name}.{}.{}", variant.as_str(), ob.id);
            match emit_thf(&ob.problem(), Some(&ob.conjecture), &file, &header) {
                Ok(p) => match &a.output {
                    Some(dir) => match write_file(dir, &format!("{file}.p"), &p.text) {
                        Ok(path) => println!("{}", path.display()),
                        Err(c) => code = code.max(c),
                    },
                    None => print!("{}", p.text),
                },
                Err(e) => {
                    eprintln!("{}: error: {e}", path.display());
                    code = code.max(EXIT_STRUCTURAL);
                }
            }
        }
    }
    code
}

fn cmd_oracle(a: &CommonArgs, s: &Settings) -> i32 {
    let mut code = EXIT_OK;
    let budget = s.opts.oracle.clone().unwrap_or_default();
    let mut runs = Vec::new();
    for path in &a.files {
        let problem = if path.extension().is_some_and(|e| e == "p") {
            let text = match fs::read_to_string(path) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("{}: error: {e}", path.display());
                    code = code.max(EXIT_STRUCTURAL);
                    continue;
                }
            };
            match read_thf(&text) {
                Ok(p) => p,
                Err(e) => {
                    eprintln!("{}: error: {e}", path.display());
                    code = code.max(EXIT_STRUCTURAL);
                    continue;
                }
            }
        } else {
            let doc = match load(path) {
                Ok(d) => d,
                Err(c) => {
                    code = code.max(c);
                    continue;
                }
            };
            let report = check_theory(&doc.theory, doc.conjecture.as_ref(), s.mode);
            if type_errors(path, &doc, &report) {
                code = code.max(EXIT_STRUCTURAL);
                continue;
            }
            erased_problem(&doc, s.variants[0])
        };
        let (thy, conj) = problem;
        let outcome = countermodel(&thy, &Default::default(), conj.as_ref(), &budget);
        println!("{}", path.display());
        let json = match outcome {
            Ok(OracleOutcome::Countermodel(m)) => {
                code = code.max(EXIT_OPEN);
                println!("  countermodel:");
                for line in m.to_string().lines() {
                    println!("    {line}");
                }
                serde_json::json!({ "file": path.display().to_string(), "status": "countermodel", "model": m })
            }
            Ok(OracleOutcome::NoCountermodel { max_size }) => {
                println!("  no countermodel with carriers up to {max_size}");
                serde_json::json!({ "file": path.display().to_string(), "status": "no-countermodel", "max_size": max_size })
            }
            Ok(OracleOutcome::Exhausted { reason, sizes_completed }) => {
                code = code.max(EXIT_OPEN);
                println!("  budget exhausted ({reason:?}) after {sizes_completed} size assignment(s)");
                serde_json::json!({ "file": path.display().to_string(), "status": "exhausted", "sizes_completed": sizes_completed })
            }
            Err(e) => {
                code = code.max(EXIT_STRUCTURAL);
                eprintln!("{}: error: {e}", path.display());
                continue;
            }
        };
        runs.push(json);
    }
    if let Err(c) = write_json(&a.json_report, runs) {
        code = code.max(c);
    }
    code
}

fn cmd_gen_corpus(dir: &Path) -> i32 {
    let entries = corpus::gen_all();
    for e in &entries {
        if let Err(c) = write_file(dir, &format!("{}.dhol", e.name), &e.text()) {
            return c;
        }
    }
    if let Err(c) = write_file(dir, "manifest", &corpus::manifest(&entries)) {
        return c;
    }
    println!("wrote {} problems to {}", entries.len(), dir.display());
    EXIT_OK
}

/// Runs the tool on `argv` (including the program name) and returns the exit code.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
        }
    };
    let common = match &cli.cmd {
        Cmd::GenCorpus { output } => return cmd_gen_corpus(output),
        Cmd::Check(a) | Cmd::Erase(a) | Cmd::Emit(a) | Cmd::Prove(a) | Cmd::Oracle(a) => a,
    };
    let s = match settings(common) {
        Ok(s) => s,
        Err(msg) => return usage(&msg),
    };
    match &cli.cmd {
        Cmd::Check(a) => cmd_check(a, &s, false),
        Cmd::Prove(a) => cmd_check(a, &s, true),
        Cmd::Erase(a) => cmd_erase(a, &s),
        Cmd::Emit(a) => cmd_emit(a, &s),
        Cmd::Oracle(a) => cmd_oracle(a, &s),
        Cmd::GenCorpus { .. } => unreachable!(),
    }
}

/// Oracle wall-clock default, exposed for documentation.
pub fn default_oracle_timeout() -> Option<Duration> {
    SearchBudget::default().timeout
}
