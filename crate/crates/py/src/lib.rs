//! Python bindings. Structured results cross the boundary as JSON strings
//! in the same encoding the `nwfs` command line uses.

use std::sync::Arc;

use nwfs_core::arrows::{check_stage, Arrow, Corpus, Factorisation, GeneratingSet};
use nwfs_core::corpus;
use nwfs_core::fincat::{HomCap, Morphism};
use nwfs_core::freeseq::{naive_stage_sizes, FreeSequence};
use nwfs_core::onestep::OneStep;
use nwfs_core::presets;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde_json::json;

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn cap_of(cap: Option<u128>) -> HomCap {
    cap.map(HomCap).unwrap_or_else(HomCap::from_env)
}

/// An arrow of a base category.
#[pyclass(name = "Arrow", frozen, eq, from_py_object)]
#[derive(Clone, PartialEq)]
struct PyArrow(Arrow);

#[pymethods]
impl PyArrow {
    /// The function `dom → cod` sending `i` to `map[i]`.
    #[staticmethod]
    fn finset(dom: usize, cod: usize, map: Vec<usize>) -> PyResult<Self> {
        Ok(PyArrow(Arrow::new(Morphism::set_map(dom, cod, map).map_err(err)?)))
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        serde_json::from_str(text).map(PyArrow).map_err(err)
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.0).expect("arrows serialise")
    }

    fn __repr__(&self) -> String {
        format!("Arrow({})", self.to_json())
    }
}

#[pyclass(name = "GeneratingSet", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyGeneratingSet(GeneratingSet);

#[pymethods]
impl PyGeneratingSet {
    /// split-epi, cosection, both, graph-edge, free-module:<q> or empty.
    #[staticmethod]
    fn preset(name: &str) -> PyResult<Self> {
        presets::by_name(name).map(PyGeneratingSet).ok_or_else(|| err(format!("unknown preset `{name}`")))
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        serde_json::from_str(text).map(PyGeneratingSet).map_err(err)
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.0).expect("generating sets serialise")
    }

    fn names(&self) -> Vec<String> {
        self.0.generators().iter().map(|g| g.name.clone()).collect()
    }

    fn __len__(&self) -> usize {
        self.0.generators().len()
    }
}

/// A stage of the free sequence, or its converged limit when `stage` is
/// omitted.
#[pyclass(name = "Nwfs", frozen)]
struct PyNwfs {
    stage: Arc<dyn Factorisation>,
    converged_at: Option<usize>,
    cap: HomCap,
}

#[pymethods]
impl PyNwfs {
    #[new]
    #[pyo3(signature = (generators, stage=None, max_stage=4, witnesses=Vec::new(), cap=None))]
    fn new(
        generators: &PyGeneratingSet,
        stage: Option<usize>,
        max_stage: usize,
        witnesses: Vec<PyArrow>,
        cap: Option<u128>,
    ) -> PyResult<Self> {
        let cap = cap_of(cap);
        let t = Arc::new(OneStep::new(generators.0.clone(), cap));
        match stage {
            Some(n) => {
                let s = FreeSequence::new(t, n).stage(n).map_err(err)?;
                Ok(PyNwfs { stage: s, converged_at: None, cap })
            }
            None => {
                let w: Vec<Arrow> = witnesses.into_iter().map(|a| a.0).collect();
                let n = Arc::new(FreeSequence::new(t, max_stage)).converge(&w).map_err(err)?;
                Ok(PyNwfs { converged_at: Some(n.alpha()), stage: Arc::new(n), cap })
            }
        }
    }

    #[getter]
    fn converged_at(&self) -> Option<usize> {
        self.converged_at
    }

    /// JSON with `lambda`, `mid`, `rho` and, where present, `sigma`, `pi`.
    fn factor(&self, arrow: &PyArrow) -> PyResult<String> {
        let fa = self.stage.factor(&arrow.0).map_err(err)?;
        let mut out = json!({"lambda": fa.lambda, "mid": fa.mid(), "rho": fa.rho});
        if self.stage.has_comult() {
            out["sigma"] = json!(self.stage.comult(&arrow.0).map_err(err)?);
        }
        if self.stage.has_mult() {
            out["pi"] = json!(self.stage.mult(&arrow.0).map_err(err)?);
        }
        Ok(out.to_string())
    }

    fn mid_size(&self, arrow: &PyArrow) -> PyResult<usize> {
        Ok(self.stage.factor(&arrow.0).map_err(err)?.mid().size())
    }

    /// Law report over every finite-set map between sets of size at most
    /// `max_size`, as JSON with a `failed` list.
    #[pyo3(signature = (max_size=2))]
    fn check_laws(&self, max_size: usize) -> PyResult<String> {
        let arrows = corpus::finset_arrows(max_size);
        let squares = corpus::sample_squares(&arrows, 400, self.cap).map_err(err)?;
        let report = check_stage(self.stage.as_ref(), &Corpus { arrows, squares }).map_err(err)?;
        Ok(json!({"laws": report.laws, "failed": report.failed_laws()}).to_string())
    }
}

/// `(stage, naive, coequalized)` for stages `1..=max_stage`.
#[pyfunction]
#[pyo3(signature = (generators, arrow, max_stage=4, cap=None))]
fn size_report(
    generators: &PyGeneratingSet,
    arrow: &PyArrow,
    max_stage: usize,
    cap: Option<u128>,
) -> PyResult<Vec<(usize, usize, usize)>> {
    let t = Arc::new(OneStep::new(generators.0.clone(), cap_of(cap)));
    let seq = FreeSequence::new(t.clone(), max_stage);
    let naive = naive_stage_sizes(&t, &arrow.0, max_stage).map_err(err)?;
    naive
        .into_iter()
        .enumerate()
        .map(|(i, n)| Ok((i + 1, n, seq.stage(i + 1).map_err(err)?.factor(&arrow.0).map_err(err)?.mid().size())))
        .collect()
}

#[pymodule]
fn nwfs(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyArrow>()?;
    m.add_class::<PyGeneratingSet>()?;
    m.add_class::<PyNwfs>()?;
    m.add_function(wrap_pyfunction!(size_report, m)?)?;
    Ok(())
}
