//! Python bindings for the `colorbal` solvers.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use colorbal::bds::solve_fbds_brute;
use colorbal::dp::solve_fbis_dp;
use colorbal::gen::{generate, GenSpec, Model};
use colorbal::mcis::{greedy_mcis, local_search_mcis, LocalSearchConfig};
use colorbal::reductions::{
    decode_domset, decode_indset, parse_dimacs, reduce_domset, reduce_indset, GadgetMetadata,
    ReductionKind,
};
use colorbal::vc::solve_fbis_vc;
use colorbal::{parse_instance, verify_solution, Interval, ProblemKind, SolutionSet};

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn ids(sol: &SolutionSet) -> Vec<usize> {
    sol.ids().iter().copied().collect()
}

/// A vertex-colored interval instance. Intervals are `(left, right, color)`
/// with closed integer endpoints and colors in `1..=k`; ids are list positions.
#[pyclass(name = "Instance", frozen)]
struct PyInstance {
    inner: colorbal::Instance,
}

#[pymethods]
impl PyInstance {
    #[new]
    #[pyo3(signature = (k, intervals, proper = false))]
    fn new(k: usize, intervals: Vec<(i64, i64, usize)>, proper: bool) -> PyResult<Self> {
        let ivs = intervals
            .into_iter()
            .enumerate()
            .map(|(id, (l, r, c))| Interval::new(id, l, r, c))
            .collect();
        let inner = colorbal::Instance::new(k, ivs, proper).map_err(value_error)?;
        Ok(PyInstance { inner })
    }

    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        parse_instance(text)
            .map(|inner| PyInstance { inner })
            .map_err(value_error)
    }

    #[staticmethod]
    #[pyo3(signature = (model, n, k, seed = 0, f_target = 0))]
    fn generate(model: &str, n: usize, k: usize, seed: u64, f_target: usize) -> PyResult<Self> {
        let model: Model = model.parse().map_err(PyValueError::new_err)?;
        if n == 0 || k == 0 {
            return Err(PyValueError::new_err("n and k must be at least 1"));
        }
        let spec = GenSpec::new(model, n, k, seed).with_f_target(f_target);
        Ok(PyInstance {
            inner: generate(&spec),
        })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.k()
    }

    /// `(id, left, right, color)` per interval, by id.
    fn intervals(&self) -> Vec<(usize, i64, i64, usize)> {
        self.inner
            .intervals()
            .iter()
            .map(|iv| (iv.id, iv.left, iv.right, iv.color))
            .collect()
    }

    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    fn __len__(&self) -> usize {
        self.inner.n()
    }

    fn __repr__(&self) -> String {
        format!("Instance(n={}, k={})", self.inner.n(), self.inner.k())
    }
}

/// An f-balanced independent set as a sorted id list, or `None`.
#[pyfunction]
#[pyo3(signature = (inst, f = 1, method = "dp"))]
fn solve_bis(inst: &PyInstance, f: usize, method: &str) -> PyResult<Option<Vec<usize>>> {
    let found = match method {
        "dp" => solve_fbis_dp(&inst.inner, f),
        "vc" => solve_fbis_vc(&inst.inner, f),
        other => return Err(PyValueError::new_err(format!("unknown method {other:?}"))),
    }
    .map_err(value_error)?;
    Ok(found.as_ref().map(ids))
}

/// A color-distinct independent set by greedy (`b = 0`) or b-local search.
#[pyfunction]
#[pyo3(signature = (inst, b = 0))]
fn solve_mcis(inst: &PyInstance, b: usize) -> PyResult<Vec<usize>> {
    if b == 0 {
        return Ok(ids(&greedy_mcis(&inst.inner)));
    }
    let sol = local_search_mcis(&inst.inner, &LocalSearchConfig::with_b(b)).map_err(value_error)?;
    Ok(ids(&sol))
}

#[pyfunction]
#[pyo3(signature = (inst, f = 1))]
fn solve_bds(inst: &PyInstance, f: usize) -> PyResult<Option<Vec<usize>>> {
    let found = solve_fbds_brute(&inst.inner, f).map_err(value_error)?;
    Ok(found.as_ref().map(ids))
}

/// `(valid, violations)` for a `"BIS"`, `"MCIS"` or `"BDS"` solution.
#[pyfunction]
#[pyo3(signature = (inst, kind, solution, f = 1))]
fn verify(
    inst: &PyInstance,
    kind: &str,
    solution: Vec<usize>,
    f: usize,
) -> PyResult<(bool, Vec<String>)> {
    let kind: ProblemKind = kind.parse().map_err(value_error)?;
    let sol = SolutionSet::new(kind, solution, &inst.inner).map_err(value_error)?;
    let verdict = verify_solution(&inst.inner, &sol, f).map_err(value_error)?;
    Ok((
        verdict.valid,
        verdict.violations.iter().map(ToString::to_string).collect(),
    ))
}

/// Reduces a DIMACS formula; returns the instance and its metadata JSON.
#[pyfunction]
fn reduce(kind: &str, dimacs: &str) -> PyResult<(PyInstance, String)> {
    let phi = parse_dimacs(dimacs).map_err(value_error)?;
    let (inner, meta) = match kind {
        "indset" => reduce_indset(&phi),
        "domset" => reduce_domset(&phi),
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown reduction {other:?}"
            )))
        }
    }
    .map_err(value_error)?;
    Ok((PyInstance { inner }, meta.to_json()))
}

/// Reads the assignment encoded by a solution of a reduced instance.
#[pyfunction]
fn decode(inst: &PyInstance, meta: &str, solution: Vec<usize>) -> PyResult<Vec<bool>> {
    let meta = GadgetMetadata::from_json(meta).map_err(value_error)?;
    let (kind, run): (_, fn(_, _, _) -> _) = match meta.reduction {
        ReductionKind::Indset => (ProblemKind::Bis, decode_indset),
        ReductionKind::Domset => (ProblemKind::Bds, decode_domset),
    };
    let sol = SolutionSet::new(kind, solution, &inst.inner).map_err(value_error)?;
    run(&inst.inner, &meta, &sol)
        .map(|a| a.0)
        .map_err(value_error)
}

#[pymodule]
fn pycolorbal(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyInstance>()?;
    m.add_function(wrap_pyfunction!(solve_bis, m)?)?;
    m.add_function(wrap_pyfunction!(solve_mcis, m)?)?;
    m.add_function(wrap_pyfunction!(solve_bds, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(reduce, m)?)?;
    m.add_function(wrap_pyfunction!(decode, m)?)?;
    Ok(())
}
