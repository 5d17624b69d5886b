//! Running an external THF prover and reading its SZS status.

use std::io::Read;
use std::os::unix::process::CommandExt;
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use serde::Serialize;
use wait_timeout::ChildExt;

use super::thf::ThfProblem;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum SzsStatus {
    Theorem,
    CounterSatisfiable,
    Timeout,
    GaveUp,
    Error(String),
}

impl SzsStatus {
    pub fn label(&self) -> &str {
        match self {
            SzsStatus::Theorem => "Theorem",
            SzsStatus::CounterSatisfiable => "CounterSatisfiable",
            SzsStatus::Timeout => "Timeout",
            SzsStatus::GaveUp => "GaveUp",
            SzsStatus::Error(_) => "Error",
        }
    }

    /// Maps an SZS ontology word onto the statuses we distinguish.
    pub fn from_szs(word: &str) -> SzsStatus {
        match word {
            "Theorem" | "Unsatisfiable" | "ContradictoryAxioms" => SzsStatus::Theorem,
            "CounterSatisfiable" | "Satisfiable" => SzsStatus::CounterSatisfiable,
            "Timeout" | "TimeOut" | "ResourceOut" => SzsStatus::Timeout,
            "GaveUp" | "Unknown" | "Inappropriate" | "Incomplete" => SzsStatus::GaveUp,
            other => SzsStatus::Error(other.to_string()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProverConfig {
    /// Shell command; `{problem}` is replaced by the problem file and
    /// `{timeout}` by the limit in seconds. Without `{problem}` the path is
    /// appended.
    pub command: String,
    pub time_limit: u64,
    /// Statuses that count as a proof.
    pub success: Vec<SzsStatus>,
}

impl ProverConfig {
    pub const DEFAULT_TIME_LIMIT: u64 = 90;

    pub fn new(command: impl Into<String>) -> Self {
        ProverConfig { command: command.into(), time_limit: Self::DEFAULT_TIME_LIMIT, success: vec![SzsStatus::Theorem] }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AtpResult {
    pub status: SzsStatus,
    pub wall_time: Duration,
    /// Prover output when no SZS line was found.
    pub raw: Option<String>,
}

/// Extracts the status word of the first `SZS status` line.
pub fn parse_szs(output: &str) -> Option<SzsStatus> {
    output.lines().find_map(|line| {
        let rest = &line[line.find("SZS status")? + "SZS status".len()..];
        rest.split_whitespace().next().map(SzsStatus::from_szs)
    })
}

fn shell_quote(s: &str) -> String {
    format!("'{}'", s.replace('\'', r"'\''"))
}

/// Runs the configured prover on `problem`. Never fails: spawn errors and
/// crashes come back as [`SzsStatus::Error`].
pub fn run_atp(problem: &ThfProblem, cfg: &ProverConfig) -> AtpResult {
    let start = Instant::now();
    let error = |msg: &str| AtpResult { status: SzsStatus::Error(msg.to_string()), wall_time: start.elapsed(), raw: None };
    let dir = match tempfile::tempdir() {
        Ok(d) => d,
        Err(_) => return error("tempdir"),
    };
    let path = dir.path().join(format!("{}.p", problem.name));
    if std::fs::write(&path, &problem.text).is_err() {
        return error("write");
    }
    let quoted = shell_quote(&path.to_string_lossy());
    let mut cmd = cfg.command.replace("{timeout}", &cfg.time_limit.to_string());
    if cmd.contains("{problem}") {
        cmd = cmd.replace("{problem}", &quoted);
    } else {
        cmd = format!("{cmd} {quoted}");
    }
    let mut child = match Command::new("sh")
        .arg("-c")
        .arg(&cmd)
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .process_group(0)
        .spawn()
    {
        Ok(c) => c,
        Err(_) => return error("spawn"),
    };
    let mut stdout = child.stdout.take().expect("piped stdout");
    let mut stderr = child.stderr.take().expect("piped stderr");
    let out_reader = std::thread::spawn(move || {
        let mut s = String::new();
        let _ = stdout.read_to_string(&mut s);
        s
    });
    let err_reader = std::thread::spawn(move || {
        let mut s = String::new();
        let _ = stderr.read_to_string(&mut s);
        s
    });
    let limit = Duration::from_secs(cfg.time_limit.max(1));
    let exit = match child.wait_timeout(limit) {
        Ok(Some(status)) => Some(status),
        Ok(None) => {
            // Kill the whole group so grandchildren release the pipes.
            let group = format!("-{}", child.id());
            let _ = Command::new("kill").args(["-s", "KILL", "--", &group]).status();
            let _ = child.kill();
            let _ = child.wait();
            None
        }
        Err(_) => return error("wait"),
    };
    let mut output = out_reader.join().unwrap_or_default();
    output.push_str(&err_reader.join().unwrap_or_default());
    let wall_time = start.elapsed();
    match (exit, parse_szs(&output)) {
        (_, Some(status)) => AtpResult { status, wall_time, raw: None },
        (None, None) => AtpResult { status: SzsStatus::Timeout, wall_time, raw: Some(output) },
        (Some(code), None) if code.code() == Some(127) => {
            AtpResult { status: SzsStatus::Error("spawn".into()), wall_time, raw: Some(output) }
        }
        (Some(_), None) => AtpResult { status: SzsStatus::GaveUp, wall_time, raw: Some(output) },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn problem() -> ThfProblem {
        ThfProblem {
            name: "t".into(),
            header: Vec::new(),
            symbols: BTreeMap::new(),
            text: "thf(goal, conjecture, $true).\n".into(),
        }
    }

    #[test]
    fn szs_lines() {
        assert_eq!(parse_szs("% SZS status Theorem for x"), Some(SzsStatus::Theorem));
        assert_eq!(parse_szs("foo\n# SZS status CounterSatisfiable"), Some(SzsStatus::CounterSatisfiable));
        assert_eq!(parse_szs("SZS status ResourceOut"), Some(SzsStatus::Timeout));
        assert_eq!(parse_szs("nothing here"), None);
    }

    #[test]
    fn fake_prover() {
        let cfg = ProverConfig::new("grep -q conjecture {problem} && echo '% SZS status Theorem'");
        assert_eq!(run_atp(&problem(), &cfg).status, SzsStatus::Theorem);
    }

    #[test]
    fn missing_status_is_gave_up() {
        let r = run_atp(&problem(), &ProverConfig::new("echo hello"));
        assert_eq!(r.status, SzsStatus::GaveUp);
        assert!(r.raw.unwrap().contains("hello"));
    }

    #[test]
    fn unavailable_command_is_spawn_error() {
        let r = run_atp(&problem(), &ProverConfig::new("/nonexistent/prover"));
        assert_eq!(r.status, SzsStatus::Error("spawn".into()));
    }

    #[test]
    fn time_limit_is_enforced() {
        let mut cfg = ProverConfig::new("sleep 30; cat {problem}");
        cfg.time_limit = 1;
        let r = run_atp(&problem(), &cfg);
        assert_eq!(r.status, SzsStatus::Timeout);
        assert!(r.wall_time < Duration::from_secs(10));
    }
}
