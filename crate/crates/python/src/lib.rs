//! Python bindings. Reports cross the boundary as JSON strings.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use vertexco::coalgebra::{self, Bundle};
use vertexco::examples::{self, Derivation, DifferentialAlgebraSpec};
use vertexco::formal;
use vertexco::lattice::{self, LatticeBox, LatticePoint, SeedSet};
use vertexco::report::CheckReport;

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn report_json(r: &CheckReport) -> String {
    serde_json::to_string(r).expect("reports serialize")
}

/// A finite-dimensional vertex coalgebra with exact rational coefficients.
#[pyclass(name = "VertexCoalgebra", frozen, skip_from_py_object)]
pub struct PyVertexCoalgebra {
    inner: coalgebra::VertexCoalgebra,
}

#[pymethods]
impl PyVertexCoalgebra {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        coalgebra::parse_coalgebra(text).map(|inner| PyVertexCoalgebra { inner }).map_err(value_error)
    }

    fn to_json(&self) -> String {
        coalgebra::write_coalgebra(&self.inner)
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name().to_string()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    /// `(nMin, nMax)`, or `None` when every coproduct vanishes.
    #[getter]
    fn support(&self) -> Option<(i64, i64)> {
        let s = self.inner.support();
        (!s.is_empty()).then_some((s.lo, s.hi))
    }

    /// `D*` as rows of scalar strings.
    fn dstar(&self) -> Vec<Vec<String>> {
        let m = self.inner.dstar();
        let dim = self.inner.dim();
        (0..dim).map(|row| (0..dim).map(|col| m.column_or_zero(col).get(&[row]).to_string()).collect()).collect()
    }

    fn nilpotency_index(&self) -> Option<u32> {
        self.inner.dstar_data().nilpotency_index
    }

    /// Effective window as `(planes, bounds)` in text form.
    fn effective_window(&self) -> (String, String) {
        let w = coalgebra::effective_window(&self.inner);
        (w.planes.to_string(), w.bounds.to_string())
    }

    fn check_bundle(&self, which: &str) -> PyResult<String> {
        let b: Bundle = which.parse().map_err(value_error)?;
        Ok(report_json(&coalgebra::check_bundle(b, &self.inner)))
    }

    fn check_cb(&self, p: i64, q: i64, r: i64) -> bool {
        coalgebra::check_cb(&self.inner, LatticePoint::new(p, q, r)).passed()
    }

    fn check_cocommutator(&self, p: i64, q: i64) -> bool {
        coalgebra::check_cocommutator(&self.inner, p, q).passed()
    }

    fn check_coassociator(&self, q: i64, r: i64) -> bool {
        coalgebra::check_coassociator(&self.inner, q, r).passed()
    }

    fn check_dstar_properties(&self, z_order: u32) -> PyResult<String> {
        coalgebra::check_dstar_properties(&self.inner, z_order).map(|r| report_json(&r)).map_err(value_error)
    }

    /// Adds `by` to the coefficient of `e_j (x) e_k` in `Delta_n(e_i)`.
    fn mutate(&self, n: i64, i: usize, j: usize, k: usize, by: &str) -> PyResult<Self> {
        let spec = examples::MutationSpec { n, i, j, k, perturbation: by.parse().map_err(value_error)?, seed: None };
        examples::mutate(&self.inner, &spec).map(|inner| PyVertexCoalgebra { inner }).map_err(value_error)
    }

    fn random_mutant(&self, seed: u64) -> PyResult<Self> {
        let spec = examples::random_mutation(&self.inner, seed).map_err(value_error)?;
        examples::mutate(&self.inner, &spec).map(|inner| PyVertexCoalgebra { inner }).map_err(value_error)
    }

    fn __repr__(&self) -> String {
        format!(
            "VertexCoalgebra(name={:?}, dim={}, support={})",
            self.inner.name(),
            self.inner.dim(),
            self.inner.support()
        )
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }
}

/// A closure certificate for the two-of-three rule.
#[pyclass(name = "Certificate", frozen)]
pub struct PyCertificate {
    inner: lattice::Certificate,
}

#[pymethods]
impl PyCertificate {
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        lattice::Certificate::parse(text).map(|inner| PyCertificate { inner }).map_err(value_error)
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    #[getter]
    fn steps(&self) -> usize {
        self.inner.steps.len()
    }

    #[getter]
    fn margin(&self) -> u32 {
        self.inner.margin
    }

    fn verify(&self) -> bool {
        self.inner.verify().passed()
    }

    fn cross_validate(&self, v: &PyVertexCoalgebra) -> String {
        report_json(&lattice::cross_validate(&self.inner, &v.inner))
    }
}

#[pyfunction]
fn trivial() -> PyVertexCoalgebra {
    PyVertexCoalgebra { inner: examples::trivial_coalgebra() }
}

/// Dual of `k[t]/(t^m)` with `t^2 d/dt`, or with `d/dt` when `plain`.
#[pyfunction]
#[pyo3(signature = (m, plain = false))]
fn dualize(m: usize, plain: bool) -> PyResult<PyVertexCoalgebra> {
    let derivation = if plain { Derivation::Plain } else { Derivation::Raising };
    examples::dualize_algebra(&DifferentialAlgebraSpec { m, derivation })
        .map(|inner| PyVertexCoalgebra { inner })
        .map_err(value_error)
}

#[pyfunction]
fn delta_selftest(order: u32) -> PyResult<String> {
    formal::delta_selftest(order).map(|r| report_json(&r)).map_err(value_error)
}

fn seeds_for(planes: &str) -> PyResult<Vec<SeedSet>> {
    match planes {
        "both" => Ok(vec![SeedSet::plane_r(0), SeedSet::plane_p(0)]),
        "r" => Ok(vec![SeedSet::plane_r(0)]),
        "p" => Ok(vec![SeedSet::plane_p(0)]),
        other => Err(value_error(format!("seed planes must be both, r or p, got {other:?}"))),
    }
}

/// Certificate for `[-radius, radius]^3`, or `None` if the seeds leave a gap.
#[pyfunction]
#[pyo3(signature = (radius, margin, seed_planes = "both"))]
fn propagate(radius: i64, margin: u32, seed_planes: &str) -> PyResult<Option<PyCertificate>> {
    let seeds = seeds_for(seed_planes)?;
    Ok(lattice::propagate(&seeds, &LatticeBox::cube(radius), margin).ok().map(|inner| PyCertificate { inner }))
}

#[pymodule]
fn pyvertexco(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyVertexCoalgebra>()?;
    m.add_class::<PyCertificate>()?;
    m.add_function(wrap_pyfunction!(trivial, m)?)?;
    m.add_function(wrap_pyfunction!(dualize, m)?)?;
    m.add_function(wrap_pyfunction!(delta_selftest, m)?)?;
    m.add_function(wrap_pyfunction!(propagate, m)?)?;
    Ok(())
}
