//! Python module `hofer_bars`. Rationals cross the boundary as `"p/q"` strings.

use std::collections::BTreeMap;

use hofer_bars::barcodes::{self, reduce_filtered_complex, Field, FilteredComplex, Generator};
use hofer_bars::embedding::{build_generators, theorem1_bounds, EmbeddingPoint};
use hofer_bars::homotopy::CaseData;
use hofer_bars::tracker::{boundary_depth_lower_bound, dispatch_case, run_certificate};
use hofer_bars::{spectrum, Error, ExtendedScalar, ManifoldParams, PLProfile, Quantity, Scalar};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn err(e: Error) -> PyErr {
    match e {
        Error::RuleConflict { .. } => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn q(s: &str) -> PyResult<Scalar> {
    s.parse().map_err(err)
}

fn qs(v: &[String]) -> PyResult<Vec<Scalar>> {
    v.iter().map(|s| q(s)).collect()
}

fn to_py(py: Python<'_>, v: &serde_json::Value) -> PyResult<Py<PyAny>> {
    let json = py.import("json")?;
    Ok(json.call_method1("loads", (v.to_string(),))?.unbind())
}

fn quantity(py: Python<'_>, x: &Quantity) -> PyResult<Py<PyAny>> {
    let v = serde_json::json!({
        "symbolic": x.to_string(),
        "two_pi": x.two_pi.to_string(),
        "raw": x.raw.to_string(),
        "decimal": x.to_decimal(20),
    });
    to_py(py, &v)
}

#[pyclass(name = "Profile", frozen)]
struct PyProfile(PLProfile);

#[pymethods]
impl PyProfile {
    /// Breakpoints `[(r, v), ...]` on `[0, R]`.
    #[new]
    fn new(points: Vec<(String, String)>, radius: &str) -> PyResult<Self> {
        let pts = points.iter().map(|(r, v)| Ok((q(r)?, q(v)?))).collect::<PyResult<Vec<_>>>()?;
        Ok(PyProfile(hofer_bars::make_profile(&pts, &q(radius)?).map_err(err)?))
    }

    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        Ok(PyProfile(PLProfile::parse_text(text).map_err(err)?))
    }

    fn to_text(&self) -> String {
        self.0.to_text()
    }

    fn points(&self) -> Vec<(String, String)> {
        self.0.points().iter().map(|(r, v)| (r.to_string(), v.to_string())).collect()
    }

    fn value_at(&self, r: &str) -> PyResult<String> {
        Ok(self.0.value_at(&q(r)?).to_string())
    }

    fn oscillation(&self) -> String {
        hofer_bars::oscillation(&self.0).to_string()
    }

    fn __repr__(&self) -> String {
        format!("Profile({:?})", self.points())
    }
}

#[pyclass(name = "Params", frozen)]
struct PyParams(ManifoldParams);

#[pymethods]
impl PyParams {
    #[new]
    #[pyo3(signature = (n, chern, gamma2pi, lambda_sign, radius, exterior=vec![0]))]
    fn new(n: i64, chern: i64, gamma2pi: &str, lambda_sign: i64, radius: &str, exterior: Vec<i64>) -> PyResult<Self> {
        Ok(PyParams(ManifoldParams::new(n, chern, q(gamma2pi)?, lambda_sign, q(radius)?, exterior).map_err(err)?))
    }

    #[staticmethod]
    fn sphere(radius: &str) -> PyResult<Self> {
        Ok(PyParams(ManifoldParams::sphere(q(radius)?).map_err(err)?))
    }

    /// Which of the five cases the parameters fall into.
    fn case(&self) -> u8 {
        dispatch_case(&self.0).number()
    }

    fn __repr__(&self) -> String {
        let p = &self.0;
        format!("Params(n={}, N={}, gamma2pi={}, lambda_sign={}, R={})", p.n, p.chern, p.gamma_hat, p.lambda_sign, p.radius)
    }
}

#[pyclass(name = "Barcode", frozen)]
struct PyBarcode(barcodes::Barcode);

#[pymethods]
impl PyBarcode {
    /// Bars as `(left, right)`, right may be `"inf"`.
    #[new]
    fn new(degree: i64, bars: Vec<(String, String)>) -> PyResult<Self> {
        let mut out = Vec::new();
        for (l, r) in &bars {
            let right: ExtendedScalar = r.parse().map_err(err)?;
            out.push(barcodes::Bar::new(q(l)?, right).map_err(err)?);
        }
        Ok(PyBarcode(barcodes::Barcode::new(degree, out)))
    }

    #[getter]
    fn degree(&self) -> i64 {
        self.0.degree
    }

    fn bars(&self) -> Vec<(String, String)> {
        self.0.bars().iter().map(|b| (b.left.to_string(), b.right.to_string())).collect()
    }

    fn to_svg(&self) -> String {
        barcodes::barcode_to_svg(&self.0)
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }
}

/// Indexed actions of degree `d`, as dicts.
#[pyfunction]
fn enumerate_spectrum(py: Python<'_>, f: &PyProfile, p: &PyParams, d: i64) -> PyResult<Py<PyAny>> {
    let acts = spectrum::enumerate_spectrum(&f.0, &p.0, d);
    to_py(py, &spectrum::spectrum_to_json(&acts))
}

/// Exact distance as a string, `"inf"` when the infinite bars differ in number.
#[pyfunction]
fn bottleneck_distance(a: &PyBarcode, b: &PyBarcode) -> PyResult<String> {
    Ok(barcodes::bottleneck_distance(&a.0, &b.0).map_err(err)?.to_string())
}

/// Barcodes of a filtered complex: `generators` are `(degree, action, label)`,
/// `boundary[j]` lists `(i, coefficient)`.
#[pyfunction]
#[pyo3(signature = (generators, boundary, field="Q"))]
fn reduce_complex(
    generators: Vec<(i64, String, String)>,
    boundary: Vec<Vec<(usize, String)>>,
    field: &str,
) -> PyResult<BTreeMap<i64, PyBarcode>> {
    let gens = generators
        .into_iter()
        .map(|(degree, a, label)| Ok(Generator { degree, action: q(&a)?, label }))
        .collect::<PyResult<Vec<_>>>()?;
    let bd = boundary
        .iter()
        .map(|col| col.iter().map(|(i, c)| Ok((*i, q(c)?))).collect::<PyResult<Vec<_>>>())
        .collect::<PyResult<Vec<_>>>()?;
    let field = match field {
        "Q" => Field::Rational,
        "Z2" => Field::Z2,
        other => return Err(PyValueError::new_err(format!("field must be 'Q' or 'Z2', got {other:?}"))),
    };
    let codes = reduce_filtered_complex(&FilteredComplex::new(gens, bd), field).map_err(err)?;
    Ok(codes.into_iter().map(|(d, b)| (d, PyBarcode(b))).collect())
}

/// Bar certificate for the embedding point `coefficients` with `m` generators.
#[pyfunction]
#[pyo3(signature = (p, epsilon, coefficients, seed=0))]
fn certificate(py: Python<'_>, p: &PyParams, epsilon: &str, coefficients: Vec<String>, seed: u64) -> PyResult<Py<PyAny>> {
    let a = qs(&coefficients)?;
    let fam = build_generators(&p.0, &q(epsilon)?, a.len()).map_err(err)?;
    let (data, _) = CaseData::from_embedding(&fam, &a, &p.0, seed).map_err(err)?;
    let cert = run_certificate(&p.0, &data).map_err(err)?;
    to_py(py, &cert.to_json())
}

/// Certified boundary-depth lower bound with the generator it came from.
#[pyfunction]
#[pyo3(signature = (p, epsilon, coefficients, seed=0))]
fn boundary_depth_bound(py: Python<'_>, p: &PyParams, epsilon: &str, coefficients: Vec<String>, seed: u64) -> PyResult<(Py<PyAny>, usize)> {
    let a = qs(&coefficients)?;
    let fam = build_generators(&p.0, &q(epsilon)?, a.len()).map_err(err)?;
    let b = boundary_depth_lower_bound(&a, &fam, &p.0, seed).map_err(err)?;
    Ok((quantity(py, &b.bound)?, b.k + 1))
}

/// Lower, upper and oscillation estimates for the distance between two points.
#[pyfunction]
fn hofer_window(py: Python<'_>, p: &PyParams, epsilon: &str, a: Vec<String>, b: Vec<String>) -> PyResult<Py<PyAny>> {
    let m = a.len().max(b.len());
    let fam = build_generators(&p.0, &q(epsilon)?, m).map_err(err)?;
    let pa = EmbeddingPoint::new(None, qs(&a)?).map_err(err)?;
    let pb = EmbeddingPoint::new(None, qs(&b)?).map_err(err)?;
    let w = theorem1_bounds(&pa, &pb, &p.0, &q(epsilon)?, &fam).map_err(err)?;
    let dict = pyo3::types::PyDict::new(py);
    dict.set_item("lower", quantity(py, &w.lower)?)?;
    dict.set_item("upper", quantity(py, &w.upper)?)?;
    dict.set_item("oscillation", quantity(py, &w.oscillation)?)?;
    Ok(dict.into_any().unbind())
}

#[pymodule]
#[pyo3(name = "hofer_bars")]
fn hofer_bars_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyProfile>()?;
    m.add_class::<PyParams>()?;
    m.add_class::<PyBarcode>()?;
    m.add_function(wrap_pyfunction!(enumerate_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(bottleneck_distance, m)?)?;
    m.add_function(wrap_pyfunction!(reduce_complex, m)?)?;
    m.add_function(wrap_pyfunction!(certificate, m)?)?;
    m.add_function(wrap_pyfunction!(boundary_depth_bound, m)?)?;
    m.add_function(wrap_pyfunction!(hofer_window, m)?)?;
    Ok(())
}
