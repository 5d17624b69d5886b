//! THF output, external provers and batch discharge of kernel obligations.

pub mod atp;
pub mod thf;

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

pub use atp::{parse_szs, run_atp, AtpResult, ProverConfig, SzsStatus};
pub use thf::{demangle, emit_thf, mangle, read_thf, ThfError, ThfProblem};

use crate::kernel::Obligation;
use crate::oracle::{check_obligation, FiniteModel, OracleOutcome, SearchBudget};

/// How an obligation was settled, or why it was not.
#[derive(Clone, Debug)]
pub enum Verdict {
    /// Closed by the kernel's local prover.
    Local,
    /// The external prover reported a success status.
    Proved(SzsStatus),
    /// No countermodel exists with carriers up to `max_size`.
    NoCountermodel { max_size: usize },
    /// The oracle found a model of the hypotheses falsifying the goal.
    Refuted(FiniteModel),
    /// Nothing settled it.
    Open { oracle: Option<String>, atp: Option<SzsStatus> },
}

impl Verdict {
    pub fn is_discharged(&self) -> bool {
        matches!(self, Verdict::Local | Verdict::Proved(_) | Verdict::NoCountermodel { .. })
    }

    pub fn label(&self) -> String {
        match self {
            Verdict::Local => "discharged (local)".into(),
            Verdict::Proved(s) => format!("discharged (atp: {})", s.label()),
            Verdict::NoCountermodel { max_size } => format!("discharged (no countermodel up to size {max_size})"),
            Verdict::Refuted(_) => "refuted (countermodel)".into(),
            Verdict::Open { oracle, atp } => {
                let mut s = "open".to_string();
                if let Some(o) = oracle {
                    write!(s, " (oracle: {o})").unwrap();
                }
                if let Some(a) = atp {
                    write!(s, " (atp: {})", a.label()).unwrap();
                }
                s
            }
        }
    }

    fn key(&self) -> &'static str {
        match self {
            Verdict::Local => "local",
            Verdict::Proved(_) => "proved",
            Verdict::NoCountermodel { .. } => "no-countermodel",
            Verdict::Refuted(_) => "refuted",
            Verdict::Open { .. } => "open",
        }
    }
}

#[derive(Clone, Debug)]
pub struct DischargeEntry {
    pub obligation: Obligation,
    pub verdict: Verdict,
    pub time: Duration,
}

#[derive(Clone, Debug, Default)]
pub struct DischargeReport {
    pub entries: Vec<DischargeEntry>,
}

#[derive(Serialize)]
struct JsonEntry<'a> {
    id: &'a str,
    kind: &'a str,
    origin: &'a str,
    status: &'static str,
    detail: String,
    time: f64,
}

#[derive(Serialize)]
struct JsonReport<'a> {
    success: bool,
    total: usize,
    discharged: usize,
    obligations: Vec<JsonEntry<'a>>,
}

impl DischargeReport {
    pub fn success(&self) -> bool {
        self.entries.iter().all(|e| e.verdict.is_discharged())
    }

    pub fn discharged(&self) -> usize {
        self.entries.iter().filter(|e| e.verdict.is_discharged()).count()
    }

    /// One line per obligation, in id order.
    pub fn text(&self) -> String {
        let mut s = String::new();
        for e in &self.entries {
            let o = &e.obligation;
            writeln!(
                s,
                "{} {} [{}] {} {:.3}s",
                o.id,
                o.kind.as_str(),
                o.origin.label,
                e.verdict.label(),
                e.time.as_secs_f64()
            )
            .unwrap();
        }
        s
    }

    /// Machine-readable summary: id → status → time, keys in fixed order.
    pub fn json(&self) -> String {
        let report = JsonReport {
            success: self.success(),
            total: self.entries.len(),
            discharged: self.discharged(),
            obligations: self
                .entries
                .iter()
                .map(|e| JsonEntry {
                    id: &e.obligation.id,
                    kind: e.obligation.kind.as_str(),
                    origin: &e.obligation.origin.label,
                    status: e.verdict.key(),
                    detail: e.verdict.label(),
                    time: e.time.as_secs_f64(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&report).expect("report serializes")
    }
}

#[derive(Clone, Debug, Default)]
pub struct DischargeOptions {
    pub prover: Option<ProverConfig>,
    /// Run the finite-model oracle before the prover.
    pub oracle: Option<SearchBudget>,
    /// Worker threads; 0 lets the pool decide.
    pub jobs: usize,
}

fn discharge_one(ob: &Obligation, opts: &DischargeOptions) -> DischargeEntry {
    let start = Instant::now();
    let done = |verdict| DischargeEntry { obligation: ob.clone(), verdict, time: start.elapsed() };
    if ob.auto_discharged {
        return done(Verdict::Local);
    }
    let mut oracle_note = None;
    let mut bounded = None;
    if let Some(budget) = &opts.oracle {
        match check_obligation(ob, budget) {
            Ok(OracleOutcome::Countermodel(m)) => return done(Verdict::Refuted(m)),
            Ok(OracleOutcome::NoCountermodel { max_size }) => bounded = Some(max_size),
            Ok(OracleOutcome::Exhausted { reason, sizes_completed }) => {
                oracle_note = Some(format!("budget exhausted ({reason:?}) after {sizes_completed} size assignments"))
            }
            Err(e) => oracle_note = Some(e.to_string()),
        }
    }
    let mut atp_status = None;
    if let Some(cfg) = &opts.prover {
        let header = vec![format!("obligation {} ({})", ob.id, ob.kind.as_str()), format!("from {}", ob.origin.label)];
        match emit_thf(&ob.problem(), Some(&ob.conjecture), &ob.id, &header) {
            Ok(problem) => {
                let r = run_atp(&problem, cfg);
                if cfg.success.contains(&r.status) {
                    return done(Verdict::Proved(r.status));
                }
                atp_status = Some(r.status);
            }
            Err(e) => atp_status = Some(SzsStatus::Error(e.to_string())),
        }
    }
    match bounded {
        Some(max_size) => done(Verdict::NoCountermodel { max_size }),
        None => done(Verdict::Open { oracle: oracle_note, atp: atp_status }),
    }
}

/// Settles each obligation by the local prover, then the oracle, then the
/// external prover. Entries keep the input order.
pub fn discharge(obligations: &[Obligation], opts: &DischargeOptions) -> DischargeReport {
    let run = || obligations.par_iter().map(|o| discharge_one(o, opts)).collect();
    let entries = match rayon::ThreadPoolBuilder::new().num_threads(opts.jobs).build() {
        Ok(pool) => pool.install(run),
        Err(_) => obligations.iter().map(|o| discharge_one(o, opts)).collect(),
    };
    DischargeReport { entries }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{check_theory, Mode};
    use crate::syntax::parse_theory;

    #[test]
    fn empty_batch_succeeds() {
        let r = discharge(&[], &DischargeOptions::default());
        assert!(r.success());
        assert!(r.entries.is_empty());
    }

    #[test]
    fn verdicts_keep_order_and_ids() {
        let d = parse_theory(
            "type a : tp. const c : a. const p : a -> o.
             axiom h : p c.
             conjecture : p (eps x : a . p x).",
        )
        .unwrap();
        let r = check_theory(&d.theory, d.conjecture.as_ref(), Mode::StrongEpsilon);
        let opts = DischargeOptions { oracle: Some(SearchBudget::default()), jobs: 2, ..Default::default() };
        let rep = discharge(&r.obligations, &opts);
        let ids: Vec<_> = rep.entries.iter().map(|e| e.obligation.id.clone()).collect();
        assert_eq!(ids, ["o1", "o2"]);
        assert!(rep.success(), "{}", rep.text());
        let json: serde_json::Value = serde_json::from_str(&rep.json()).unwrap();
        assert_eq!(json["obligations"][0]["id"], "o1");
    }

    #[test]
    fn prover_fallback_and_failure() {
        let d = parse_theory("type a : tp. const p : a -> o. conjecture : p (eps x : a . p x).").unwrap();
        let r = check_theory(&d.theory, d.conjecture.as_ref(), Mode::StrongEpsilon);
        let yes = DischargeOptions { prover: Some(ProverConfig::new("echo SZS status Theorem")), ..Default::default() };
        assert!(discharge(&r.obligations, &yes).success());
        let broken = DischargeOptions { prover: Some(ProverConfig::new("/nonexistent/prover")), ..Default::default() };
        let rep = discharge(&r.obligations, &broken);
        assert!(!rep.success());
        assert!(rep.text().contains("atp: Error"), "{}", rep.text());
        let with_oracle = DischargeOptions { oracle: Some(SearchBudget::default()), ..Default::default() };
        let rep = discharge(&r.obligations, &with_oracle);
        assert!(matches!(rep.entries[0].verdict, Verdict::Refuted(_)));
    }
}
