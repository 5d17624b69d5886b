use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use dhol::bridge::read_thf;
use dhol::corpus::gen_problem;
use dhol::syntax::{Declaration, Term, Type};

fn dhol() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_dhol"));
    c.env_remove("DHOL_PROVER_CMD");
    c
}

fn run(cmd: &mut Command) -> (i32, String, String) {
    let Output { status, stdout, stderr } = cmd.output().unwrap();
    (status.code().unwrap(), String::from_utf8(stdout).unwrap(), String::from_utf8(stderr).unwrap())
}

fn write_problem(dir: &Path, name: &str) -> PathBuf {
    let path = dir.join(format!("{name}.dhol"));
    fs::write(&path, gen_problem(name).unwrap().text()).unwrap();
    path
}

#[test]
fn check_exit_codes_follow_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let ok = write_problem(dir.path(), "choice_def1");
    let (code, out, _) = run(dhol().arg("check").arg(&ok).arg("--eps1"));
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("discharged"), "{out}");

    let nq = write_problem(dir.path(), "choice_nq");
    let (code, out, _) = run(dhol().arg("check").arg(&nq).arg("--eps1"));
    assert_eq!(code, 1, "{out}");
    assert!(out.contains("refuted"), "{out}");
    assert_eq!(run(dhol().arg("check").arg(&nq).arg("--eps1")).0, 1);
}

#[test]
fn structural_errors_exit_2_with_positions() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.dhol");
    fs::write(&bad, "type a : tp.\nconst c : b.\n").unwrap();
    let (code, _, err) = run(dhol().arg("check").arg(&bad));
    assert_eq!(code, 2);
    assert!(err.contains("bad.dhol:2:"), "{err}");

    let ill = dir.path().join("ill.dhol");
    fs::write(&ill, "type a : tp.\nconst p : a -> o.\naxiom h : p p.\n").unwrap();
    let (code, _, err) = run(dhol().arg("check").arg(&ill));
    assert_eq!(code, 2);
    assert!(err.contains("ill.dhol:3:1: error: h:"), "{err}");

    assert_eq!(run(dhol().arg("check").arg(dir.path().join("missing.dhol"))).0, 2);
}

#[test]
fn usage_errors_exit_64() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_problem(dir.path(), "choice_def1");
    assert_eq!(run(dhol().arg("check").arg(&p).arg("--eps2").arg("--strong")).0, 64);
    assert_eq!(run(dhol().arg("check").arg(&p).arg("--eps1").arg("--eps2")).0, 64);
    assert_eq!(run(dhol().arg("frobnicate")).0, 64);
    assert_eq!(run(dhol().arg("check")).0, 64);
    assert_eq!(run(dhol().arg("check").arg(&p).arg("--max-size").arg("0")).0, 64);
    let (code, out, _) = run(dhol().arg("--version"));
    assert_eq!(code, 0);
    assert!(out.starts_with("dhol "), "{out}");
}

#[test]
fn erase_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_problem(dir.path(), "choice_def1");
    let out = dir.path().join("out");
    let first = {
        assert_eq!(run(dhol().args(["erase", "--strong", "-o"]).arg(&out).arg(&p)).0, 0);
        fs::read(out.join("choice_def1.strong.p")).unwrap()
    };
    assert_eq!(run(dhol().args(["erase", "--strong", "-o"]).arg(&out).arg(&p)).0, 0);
    assert_eq!(first, fs::read(out.join("choice_def1.strong.p")).unwrap());
    assert!(String::from_utf8(first).unwrap().contains("thf("));
}

/// True when every position where `a` and `b` differ is a choice term.
fn differ_only_at_choice(a: &Term, b: &Term) -> bool {
    if a == b {
        return true;
    }
    match (a, b) {
        (Term::Choice(..), Term::Choice(..)) => true,
        (Term::App(f, x), Term::App(g, y)) | (Term::Implies(f, x), Term::Implies(g, y)) => {
            differ_only_at_choice(f, g) && differ_only_at_choice(x, y)
        }
        (Term::Eq(s, l1, r1), Term::Eq(t, l2, r2)) => {
            types_differ_only_at_choice(s, t) && differ_only_at_choice(l1, l2) && differ_only_at_choice(r1, r2)
        }
        (Term::Lambda(x, s, b1), Term::Lambda(y, t, b2)) | (Term::Forall(x, s, b1), Term::Forall(y, t, b2)) => {
            x == y && types_differ_only_at_choice(s, t) && differ_only_at_choice(b1, b2)
        }
        _ => false,
    }
}

fn types_differ_only_at_choice(a: &Type, b: &Type) -> bool {
    match (a, b) {
        (Type::Base(x, xs), Type::Base(y, ys)) => {
            x == y && xs.len() == ys.len() && xs.iter().zip(ys).all(|(s, t)| differ_only_at_choice(s, t))
        }
        _ => a == b,
    }
}

#[test]
fn prove_writes_both_variants() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_problem(dir.path(), "choice_eq1");
    let out = dir.path().join("out");
    let (code, stdout, err) =
        run(dhol().args(["prove", "--strong", "--weak", "--force-variant", "-o"]).arg(&out).arg(&p));
    assert_eq!(code, 0, "{stdout}{err}");
    let strong = fs::read_to_string(out.join("choice_eq1.strong.p")).unwrap();
    let weak = fs::read_to_string(out.join("choice_eq1.weak.p")).unwrap();
    assert_ne!(strong, weak);
    let (ts, cs) = read_thf(&strong).unwrap();
    let (tw, cw) = read_thf(&weak).unwrap();
    assert_eq!(ts.len(), tw.len());
    for (x, y) in ts.iter().zip(tw.iter()) {
        match (x, y) {
            (Declaration::Axiom(l1, s), Declaration::Axiom(l2, t)) => {
                assert_eq!(l1, l2);
                assert!(differ_only_at_choice(s, t), "{s}\n{t}");
            }
            _ => assert_eq!(x, y),
        }
    }
    let (cs, cw) = (cs.unwrap(), cw.unwrap());
    assert_ne!(cs, cw);
    assert!(differ_only_at_choice(&cs, &cw), "{cs}\n{cw}");
}

#[test]
fn prover_command_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_problem(dir.path(), "choice_nq");
    let yes = "echo '% SZS status Theorem'";
    let no = "echo '% SZS status GaveUp'";
    let cfg = dir.path().join("dhol.conf");
    fs::write(&cfg, format!("# prover\nprover_cmd = {no}\ntimeout = 5\n")).unwrap();
    let base = || {
        let mut c = dhol();
        c.args(["check", "--eps1", "--no-oracle"]);
        c
    };
    assert_eq!(run(base().arg(&p)).0, 1);
    assert_eq!(run(base().env("DHOL_PROVER_CMD", yes).arg(&p)).0, 0);
    assert_eq!(run(base().env("DHOL_PROVER_CMD", yes).arg("--config").arg(&cfg).arg(&p)).0, 1);
    assert_eq!(run(base().arg("--config").arg(&cfg).args(["--prover-cmd", yes]).arg(&p)).0, 0);
}

#[test]
fn json_report_lists_obligations_in_order() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_problem(dir.path(), "choice_def1");
    let report = dir.path().join("r.json");
    assert_eq!(run(dhol().args(["prove", "--eps1", "--jobs", "2", "--json-report"]).arg(&report).arg(&p)).0, 0);
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    let obs = v["runs"][0]["report"]["obligations"].as_array().unwrap();
    let ids: Vec<_> = obs.iter().map(|o| o["id"].as_str().unwrap()).collect();
    assert_eq!(ids, ["o1", "o2"]);
    assert_eq!(obs[1]["kind"], "conjecture");
    assert!(obs.iter().all(|o| o["time"].is_f64()));
    assert_eq!(v["runs"][0]["mode"], "eps1");
}

#[test]
fn emit_writes_one_problem_per_obligation() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_problem(dir.path(), "choice_def2");
    let out = dir.path().join("obs");
    let (code, stdout, _) = run(dhol().args(["emit", "--eps2", "-o"]).arg(&out).arg(&p));
    assert_eq!(code, 0);
    let files: Vec<_> = stdout.lines().collect();
    assert_eq!(files.len(), 2, "{stdout}");
    for f in files {
        let text = fs::read_to_string(f).unwrap();
        assert!(read_thf(&text).unwrap().1.is_some());
        assert!(text.contains("weak erasure"));
    }
}

#[test]
fn gen_corpus_writes_problems_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("corpus");
    assert_eq!(run(dhol().arg("gen-corpus").arg("-o").arg(&out)).0, 0);
    let manifest = fs::read_to_string(out.join("manifest")).unwrap();
    assert!(manifest.contains("reports 34"));
    let problems = fs::read_dir(&out).unwrap().filter(|e| e.as_ref().unwrap().path().extension().is_some()).count();
    assert_eq!(problems, 29);
    let (code, out_text, _) = run(dhol().args(["check", "--eps2"]).arg(out.join("no_fp_fin1_reg.dhol")));
    assert_eq!(code, 0, "{out_text}");
}

#[test]
fn oracle_reads_dhol_and_thf() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_problem(dir.path(), "choice_nq");
    let (code, out, _) = run(dhol().args(["oracle", "--eps1"]).arg(&p));
    assert_eq!(code, 1, "{out}");
    assert!(out.contains("countermodel"), "{out}");

    let thf = dir.path().join("taut.p");
    fs::write(&thf, "thf(a_type, type, a: $tType).\nthf(c, conjecture, ![X: a]: (X = X)).\n").unwrap();
    let (code, out, _) = run(dhol().arg("oracle").arg(&thf).args(["--max-size", "2"]));
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("up to 2"), "{out}");
}
