//! Python bindings: parse, check, erase, emit THF, discharge and search for
//! countermodels from Python.

use std::collections::BTreeSet;

use dhol::bridge::{discharge, emit_thf, DischargeOptions, ProverConfig};
use dhol::corpus;
use dhol::erasure::{erase_term, erase_theory, ErasureVariant};
use dhol::kernel::{check_theory, CheckReport, Mode, Obligation};
use dhol::oracle::{countermodel as search, OracleOutcome, SearchBudget};
use dhol::syntax::print::Printer;
use dhol::syntax::{parse_theory, Document, Theory as Thy};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn mode_of(s: &str) -> PyResult<Mode> {
    match s {
        "eps1" | "strong" => Ok(Mode::StrongEpsilon),
        "eps2" | "weak" => Ok(Mode::WeakEpsilon),
        "hol" => Ok(Mode::SimpleHol),
        _ => Err(PyValueError::new_err(format!("unknown mode `{s}`; expected eps1, eps2 or hol"))),
    }
}

fn variant_of(s: &str) -> PyResult<ErasureVariant> {
    match s {
        "strong" => Ok(ErasureVariant::Strong),
        "weak" => Ok(ErasureVariant::Weak),
        _ => Err(PyValueError::new_err(format!("unknown erasure `{s}`; expected strong or weak"))),
    }
}

/// A theory with an optional conjecture.
#[pyclass(name = "Theory", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyTheory {
    doc: Document,
}

#[pymethods]
impl PyTheory {
    /// Declared names in order.
    #[getter]
    fn names(&self) -> Vec<String> {
        self.doc.theory.iter().filter_map(|d| d.name().map(str::to_string)).collect()
    }

    #[getter]
    fn conjecture(&self) -> Option<String> {
        self.doc.conjecture.as_ref().map(|c| c.to_string())
    }

    fn __len__(&self) -> usize {
        self.doc.theory.len()
    }

    fn __str__(&self) -> String {
        Printer::default().theory(&self.doc.theory, self.doc.conjecture.as_ref())
    }

    fn __repr__(&self) -> String {
        format!("<Theory with {} declarations>", self.doc.theory.len())
    }

    #[pyo3(signature = (mode = "eps1"))]
    fn check(&self, mode: &str) -> PyResult<PyReport> {
        let report = check_theory(&self.doc.theory, self.doc.conjecture.as_ref(), mode_of(mode)?);
        Ok(PyReport { report })
    }

    /// The HOL translation of the theory and conjecture.
    #[pyo3(signature = (variant = "strong"))]
    fn erase(&self, variant: &str) -> PyResult<PyTheory> {
        let v = variant_of(variant)?;
        let hol = erase_theory(&self.doc.theory, &Thy::new(), v).hol_theory;
        let conjecture = self.doc.conjecture.as_ref().map(|c| erase_term(c, v));
        let positions = vec![Default::default(); hol.len()];
        Ok(PyTheory { doc: Document { theory: hol, conjecture, positions, conjecture_pos: None } })
    }

    /// TPTP THF text; the theory must be simply typed.
    #[pyo3(signature = (name = "problem"))]
    fn to_thf(&self, name: &str) -> PyResult<String> {
        emit_thf(&self.doc.theory, self.doc.conjecture.as_ref(), name, &[])
            .map(|p| p.text)
            .map_err(|e| PyValueError::new_err(e.to_string()))
    }

    /// Searches for a finite model of the (simply typed) theory falsifying
    /// the conjecture. Returns the model table, or None.
    #[pyo3(signature = (max_size = 3))]
    fn countermodel(&self, max_size: usize) -> PyResult<Option<String>> {
        let budget = SearchBudget { max_size, ..SearchBudget::default() };
        match search(&self.doc.theory, &BTreeSet::new(), self.doc.conjecture.as_ref(), &budget) {
            Ok(OracleOutcome::Countermodel(m)) => Ok(Some(m.to_string())),
            Ok(_) => Ok(None),
            Err(e) => Err(PyValueError::new_err(e.to_string())),
        }
    }
}

/// A proof obligation produced by the checker.
#[pyclass(name = "Obligation", frozen)]
struct PyObligation {
    ob: Obligation,
}

#[pymethods]
impl PyObligation {
    #[getter]
    fn id(&self) -> String {
        self.ob.id.clone()
    }

    #[getter]
    fn kind(&self) -> &'static str {
        self.ob.kind.as_str()
    }

    #[getter]
    fn origin(&self) -> String {
        self.ob.origin.label.clone()
    }

    /// The HOL conjecture.
    #[getter]
    fn conjecture(&self) -> String {
        self.ob.conjecture.to_string()
    }

    #[getter]
    fn auto_discharged(&self) -> bool {
        self.ob.auto_discharged
    }

    fn to_thf(&self) -> PyResult<String> {
        emit_thf(&self.ob.problem(), Some(&self.ob.conjecture), &self.ob.id, &[])
            .map(|p| p.text)
            .map_err(|e| PyValueError::new_err(e.to_string()))
    }

    fn __repr__(&self) -> String {
        format!("<Obligation {} {} [{}]>", self.ob.id, self.ob.kind.as_str(), self.ob.origin.label)
    }
}

#[pyclass(name = "Report", frozen)]
struct PyReport {
    report: CheckReport,
}

#[pymethods]
impl PyReport {
    #[getter]
    fn well_formed(&self) -> bool {
        self.report.is_well_formed()
    }

    #[getter]
    fn errors(&self) -> Vec<String> {
        self.report.errors.iter().map(|d| d.to_string()).collect()
    }

    #[getter]
    fn obligations(&self) -> Vec<PyObligation> {
        self.report.obligations.iter().map(|ob| PyObligation { ob: ob.clone() }).collect()
    }

    /// Settles every obligation; returns `(id, verdict)` pairs in id order.
    #[pyo3(signature = (oracle = true, max_size = 3, prover_cmd = None, timeout = 90, jobs = 0))]
    fn discharge(
        &self,
        py: Python<'_>,
        oracle: bool,
        max_size: usize,
        prover_cmd: Option<String>,
        timeout: u64,
        jobs: usize,
    ) -> Vec<(String, String)> {
        let opts = DischargeOptions {
            prover: prover_cmd.map(|c| ProverConfig { time_limit: timeout, ..ProverConfig::new(c) }),
            oracle: oracle.then(|| SearchBudget { max_size, ..SearchBudget::default() }),
            jobs,
        };
        let obligations = &self.report.obligations;
        let rep = py.detach(|| discharge(obligations, &opts));
        rep.entries.iter().map(|e| (e.obligation.id.clone(), e.verdict.label())).collect()
    }
}

#[pyfunction]
fn parse(text: &str) -> PyResult<PyTheory> {
    parse_theory(text).map(|doc| PyTheory { doc }).map_err(|e| PyValueError::new_err(e.to_string()))
}

#[pyfunction]
fn corpus_names() -> Vec<String> {
    corpus::names()
}

#[pyfunction]
fn corpus_problem(name: &str) -> PyResult<PyTheory> {
    let e = corpus::gen_problem(name).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let positions = vec![Default::default(); e.theory.len()];
    Ok(PyTheory { doc: Document { theory: e.theory, conjecture: Some(e.conjecture), positions, conjecture_pos: None } })
}

/// Runs the command-line tool; `args` excludes the program name.
#[pyfunction]
fn run_cli(py: Python<'_>, args: Vec<String>) -> i32 {
    py.detach(|| dhol::cli::run_cli(std::iter::once("dhol".to_string()).chain(args)))
}

#[pymodule]
fn pydhol(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyTheory>()?;
    m.add_class::<PyReport>()?;
    m.add_class::<PyObligation>()?;
    m.add_function(wrap_pyfunction!(parse, m)?)?;
    m.add_function(wrap_pyfunction!(corpus_names, m)?)?;
    m.add_function(wrap_pyfunction!(corpus_problem, m)?)?;
    m.add_function(wrap_pyfunction!(run_cli, m)?)?;
    Ok(())
}
