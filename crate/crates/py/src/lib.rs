//! Python bindings for the exact pairing calculus: measures, BV profiles,
//! fields, selectors, the two pairing routes, and the scenario runner.
//! Rationals cross the boundary as `p/q` strings so nothing is rounded.

use std::collections::BTreeMap;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use bvpair::bv::{PiecewiseBV, Selector as CoreSelector, StairBlock};
use bvpair::field::DMField;
use bvpair::measure::{parse_measure, Measure as CoreMeasure};
use bvpair::pairing;
use bvpair::poly::{Piecewise, Poly};
use bvpair::rational::{format_rational, parse_rational, to_f64, Rational};
use bvpair::scenario;

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn rational(s: &str) -> PyResult<Rational> {
    parse_rational(s).map_err(err)
}

fn piecewise(breakpoints: Vec<String>, pieces: Vec<Vec<String>>) -> PyResult<Piecewise> {
    let bps = breakpoints
        .iter()
        .map(|s| rational(s))
        .collect::<PyResult<Vec<_>>>()?;
    let ps = pieces
        .iter()
        .map(|coeffs| {
            Ok(Poly::new(
                coeffs
                    .iter()
                    .map(|s| rational(s))
                    .collect::<PyResult<Vec<_>>>()?,
            ))
        })
        .collect::<PyResult<Vec<_>>>()?;
    Piecewise::new(bps, ps).map_err(err)
}

/// A signed measure: piecewise-polynomial density, atoms, staircase parts.
#[pyclass(name = "Measure", skip_from_py_object)]
#[derive(Clone)]
struct PyMeasure {
    inner: CoreMeasure,
}

#[pymethods]
impl PyMeasure {
    /// Parses the canonical text form
    /// `ac: [...]; atoms: [...]; cantor: [...]`.
    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        Ok(PyMeasure {
            inner: parse_measure(text).map_err(err)?,
        })
    }

    fn to_text(&self) -> String {
        self.inner.to_canonical_text()
    }

    fn __repr__(&self) -> String {
        format!("Measure({})", self.inner.to_canonical_text())
    }

    fn __eq__(&self, other: &PyMeasure) -> bool {
        self.inner == other.inner
    }

    fn is_zero(&self) -> bool {
        self.inner.is_zero()
    }

    /// (location, weight) pairs as rational strings.
    fn atoms(&self) -> Vec<(String, String)> {
        self.inner
            .atoms()
            .iter()
            .map(|(x, w)| (format_rational(x), format_rational(w)))
            .collect()
    }

    fn total_variation(&self) -> PyResult<PyMeasure> {
        Ok(PyMeasure {
            inner: self.inner.total_variation().map_err(err)?,
        })
    }

    fn jordan(&self) -> PyResult<(PyMeasure, PyMeasure)> {
        let (p, n) = self.inner.jordan().map_err(err)?;
        Ok((PyMeasure { inner: p }, PyMeasure { inner: n }))
    }

    /// Measure of the open interval (a, b) as (value, error_bound).
    fn eval_interval(&self, a: &str, b: &str) -> PyResult<(String, String)> {
        let v = self.inner.eval_interval(&rational(a)?, &rational(b)?);
        Ok((format_rational(&v.value), format_rational(&v.err)))
    }

    fn mass(&self) -> PyResult<(String, String)> {
        let v = self.inner.mass();
        Ok((format_rational(&v.value), format_rational(&v.err)))
    }

    fn add(&self, other: &PyMeasure) -> PyMeasure {
        PyMeasure {
            inner: self.inner.add(&other.inner),
        }
    }

    fn sub(&self, other: &PyMeasure) -> PyMeasure {
        PyMeasure {
            inner: self.inner.sub(&other.inner),
        }
    }

    /// ⟨μ, φ⟩ against a piecewise polynomial as (value, error_bound).
    fn act(
        &self,
        breakpoints: Vec<String>,
        pieces: Vec<Vec<String>>,
    ) -> PyResult<(String, String)> {
        let phi = piecewise(breakpoints, pieces)?;
        let v = self.inner.act(&phi).map_err(err)?;
        Ok((format_rational(&v.value), format_rational(&v.err)))
    }
}

/// A BV function: polynomial pieces, explicit jumps, staircase summands.
#[pyclass(name = "BVFunction", skip_from_py_object)]
#[derive(Clone)]
struct PyBV {
    inner: PiecewiseBV,
}

#[pymethods]
impl PyBV {
    #[new]
    #[pyo3(signature = (breakpoints, pieces, stairs=None))]
    fn new(
        breakpoints: Vec<String>,
        pieces: Vec<Vec<String>>,
        stairs: Option<Vec<(String, String, String)>>,
    ) -> PyResult<Self> {
        let poly = piecewise(breakpoints, pieces)?;
        let blocks = stairs
            .unwrap_or_default()
            .iter()
            .map(|(a, b, rise)| Ok(StairBlock::new(rational(a)?, rational(b)?, rational(rise)?)))
            .collect::<PyResult<Vec<_>>>()?;
        Ok(PyBV {
            inner: PiecewiseBV::new(poly, blocks).map_err(err)?,
        })
    }

    fn __repr__(&self) -> String {
        let (lo, hi) = self.inner.domain();
        format!(
            "BVFunction(on ({}, {}), {} jumps, {} staircase blocks)",
            format_rational(lo),
            format_rational(hi),
            self.inner.jumps().len(),
            self.inner.stairs().len()
        )
    }

    /// (u⁻, u⁺) at x.
    fn approx_limits(&self, x: &str) -> PyResult<(String, String)> {
        let (lo, hi) = self.inner.approx_limits(&rational(x)?);
        Ok((format_rational(&lo), format_rational(&hi)))
    }

    /// (location, left, right) for every jump.
    fn jumps(&self) -> Vec<(String, String, String)> {
        self.inner
            .jumps()
            .into_iter()
            .map(|j| {
                (
                    format_rational(&j.x),
                    format_rational(&j.left),
                    format_rational(&j.right),
                )
            })
            .collect()
    }

    fn derivative(&self) -> PyMeasure {
        PyMeasure {
            inner: self.inner.derivative(),
        }
    }

    fn truncate(&self, k: &str) -> PyResult<PyBV> {
        Ok(PyBV {
            inner: self.inner.truncate(&rational(k)?).map_err(err)?,
        })
    }

    /// The superlevel set {u > t} as interval endpoint pairs.
    fn level_set(&self, t: &str) -> PyResult<Vec<(String, String)>> {
        let ls = self.inner.level_set(&rational(t)?).map_err(err)?;
        Ok(ls
            .set
            .intervals()
            .iter()
            .map(|(a, b)| (format_rational(a), format_rational(b)))
            .collect())
    }

    fn sup_norm(&self) -> PyResult<String> {
        Ok(format_rational(&self.inner.sup_norm().map_err(err)?))
    }
}

/// A selector λ: a default value in [0, 1] plus point overrides.
#[pyclass(name = "Selector", skip_from_py_object)]
#[derive(Clone)]
struct PySelector {
    inner: CoreSelector,
}

#[pymethods]
impl PySelector {
    #[new]
    #[pyo3(signature = (default, overrides=None))]
    fn new(default: &str, overrides: Option<BTreeMap<String, String>>) -> PyResult<Self> {
        let mut map = BTreeMap::new();
        for (k, v) in overrides.unwrap_or_default() {
            map.insert(rational(&k)?, rational(&v)?);
        }
        Ok(PySelector {
            inner: CoreSelector::new(rational(default)?, map).map_err(err)?,
        })
    }

    fn value_at(&self, x: &str) -> PyResult<String> {
        Ok(format_rational(&self.inner.value_at(&rational(x)?)))
    }
}

/// A bounded field whose derivative is a measure.
#[pyclass(name = "Field", skip_from_py_object)]
#[derive(Clone)]
struct PyField {
    inner: DMField,
}

#[pymethods]
impl PyField {
    #[new]
    #[pyo3(signature = (breakpoints, pieces, stairs=None))]
    fn new(
        breakpoints: Vec<String>,
        pieces: Vec<Vec<String>>,
        stairs: Option<Vec<(String, String, String)>>,
    ) -> PyResult<Self> {
        let profile = PyBV::new(breakpoints, pieces, stairs)?;
        Ok(PyField {
            inner: DMField::new(profile.inner),
        })
    }

    fn __repr__(&self) -> String {
        format!(
            "Field(divergence: {})",
            self.inner.divergence().to_canonical_text()
        )
    }

    fn divergence(&self) -> PyMeasure {
        PyMeasure {
            inner: self.inner.divergence().clone(),
        }
    }

    fn to_text(&self) -> String {
        self.inner.to_canonical_text()
    }

    fn sup_norm(&self) -> PyResult<String> {
        Ok(format_rational(&self.inner.sup_norm().map_err(err)?))
    }

    /// (Tr⁻, Tr⁺, Tr*) at an oriented point.
    fn traces(&self, x: &str, nu: i8) -> PyResult<(String, String, String)> {
        let t = self.inner.traces_at(&rational(x)?, nu).map_err(err)?;
        Ok((
            format_rational(&t.minus),
            format_rational(&t.plus),
            format_rational(&t.star()),
        ))
    }

    /// "lsc" | "usc" | "both" | "neither".
    fn selector_class(&self, sel: &PySelector) -> String {
        self.inner.selector_class(&sel.inner).name().to_string()
    }

    fn mollify(&self, eps: &str) -> PyResult<PyField> {
        Ok(PyField {
            inner: self.inner.mollify(&rational(eps)?).map_err(err)?,
        })
    }

    fn product(&self, u: &PyBV) -> PyResult<PyField> {
        Ok(PyField {
            inner: self.inner.product(&u.inner).map_err(err)?,
        })
    }
}

/// The pairing measure through the distributional identity.
#[pyfunction]
fn pairing_by_definition(a: &PyField, u: &PyBV, sel: &PySelector) -> PyResult<PyMeasure> {
    Ok(PyMeasure {
        inner: pairing::pairing_by_definition(&a.inner, &u.inner, &sel.inner)
            .map_err(err)?
            .measure,
    })
}

/// The pairing measure assembled from its parts.
#[pyfunction]
fn pairing_by_decomposition(a: &PyField, u: &PyBV, sel: &PySelector) -> PyResult<PyMeasure> {
    Ok(PyMeasure {
        inner: pairing::pairing_by_decomposition(&a.inner, &u.inner, &sel.inner)
            .map_err(err)?
            .measure,
    })
}

/// The extremal closed forms (lower-semicontinuous, upper-semicontinuous).
#[pyfunction]
fn extremal_pairings(a: &PyField, u: &PyBV) -> PyResult<(PyMeasure, PyMeasure)> {
    let (lsc, usc) = pairing::extremal_pairings(&a.inner, &u.inner).map_err(err)?;
    Ok((PyMeasure { inner: lsc }, PyMeasure { inner: usc }))
}

/// ⟨pairing, φ⟩ through the weak route, as (value, error_bound).
#[pyfunction]
fn pairing_act(
    a: &PyField,
    u: &PyBV,
    sel: &PySelector,
    breakpoints: Vec<String>,
    pieces: Vec<Vec<String>>,
) -> PyResult<(String, String)> {
    let phi = piecewise(breakpoints, pieces)?;
    let v = pairing::pairing_act_weak(&a.inner, &u.inner, &sel.inner, &phi).map_err(err)?;
    Ok((format_rational(&v.value), format_rational(&v.err)))
}

/// Runs a scenario file and returns the JSON report as a string.
#[pyfunction]
fn run_scenario_file(path: &str) -> PyResult<String> {
    let text = std::fs::read_to_string(path).map_err(err)?;
    let sc = scenario::parse_scenario(&text).map_err(err)?;
    let outcome = scenario::run_scenario(&sc, None, 1).map_err(err)?;
    serde_json_string(&outcome.json_report())
}

fn serde_json_string(v: &serde_json::Value) -> PyResult<String> {
    serde_json::to_string_pretty(v).map_err(err)
}

/// Every registered check with its description.
#[pyfunction]
fn list_checks() -> Vec<(String, String)> {
    scenario::registry()
        .into_iter()
        .map(|(n, d)| (n.to_string(), d.to_string()))
        .collect()
}

/// Nearest float of a rational string, for plotting convenience.
#[pyfunction]
fn rational_to_float(s: &str) -> PyResult<f64> {
    Ok(to_f64(&rational(s)?))
}

#[pymodule]
fn bvpair_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMeasure>()?;
    m.add_class::<PyBV>()?;
    m.add_class::<PySelector>()?;
    m.add_class::<PyField>()?;
    m.add_function(wrap_pyfunction!(pairing_by_definition, m)?)?;
    m.add_function(wrap_pyfunction!(pairing_by_decomposition, m)?)?;
    m.add_function(wrap_pyfunction!(pairing_act, m)?)?;
    m.add_function(wrap_pyfunction!(extremal_pairings, m)?)?;
    m.add_function(wrap_pyfunction!(run_scenario_file, m)?)?;
    m.add_function(wrap_pyfunction!(list_checks, m)?)?;
    m.add_function(wrap_pyfunction!(rational_to_float, m)?)?;
    Ok(())
}
