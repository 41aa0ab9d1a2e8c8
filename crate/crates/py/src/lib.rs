//! Python bindings. Structured results cross the boundary as JSON strings.

use std::collections::BTreeMap;

use pyo3::exceptions::{PyIndexError, PyValueError};
use pyo3::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use mtt_core::checks::{bridge_verdict, channel_report, find_right_visibility};
use mtt_core::cxcore::{BoundedComplex, Degree};
use mtt_core::homcx::{self, LaurentPoly};
use mtt_core::models::{self, DemoParams, GeneratorSpec};
use mtt_core::mtt::MTTDatum;
use mtt_core::suite::{verify_random as run_random, Suite};

fn value_err(e: impl ToString) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Laurent polynomial in `q` with integer coefficients.
#[pyclass(name = "Poly", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
struct Poly(LaurentPoly);

#[pymethods]
impl Poly {
    #[new]
    #[pyo3(signature = (coeffs=None))]
    fn new(coeffs: Option<BTreeMap<i32, i64>>) -> Self {
        Poly(LaurentPoly::from_coeffs(coeffs.unwrap_or_default()))
    }

    /// Exponent to coefficient.
    fn coeffs(&self) -> BTreeMap<i32, i64> {
        self.0.coeffs().clone()
    }

    fn coeff(&self, e: i32) -> i64 {
        self.0.coeff(e)
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    fn w_tot(&self) -> i64 {
        self.0.w_tot()
    }

    fn w_chi(&self) -> i64 {
        self.0.w_chi()
    }

    /// Multiplication by `q^k`.
    fn shift(&self, k: i32) -> Poly {
        Poly(self.0.shift(k))
    }

    fn __add__(&self, other: &Poly) -> Poly {
        Poly(self.0.add(&other.0))
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Poly({})", self.0)
    }
}

/// Bounded cochain complex of finite-dimensional rational vector spaces.
#[pyclass(name = "Complex", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
struct Complex(BoundedComplex);

#[pymethods]
impl Complex {
    /// `dims` maps degrees to dimensions; `diffs[n]` is the matrix of `d^n`
    /// as rows of ints, `Fraction`s or strings such as `"-1/2"`.
    #[new]
    #[pyo3(signature = (dims, diffs=None))]
    fn new(
        dims: BTreeMap<Degree, usize>,
        diffs: Option<BTreeMap<Degree, Vec<Vec<Bound<'_, PyAny>>>>>,
    ) -> PyResult<Self> {
        let dims: BTreeMap<String, usize> = dims.into_iter().map(|(k, v)| (k.to_string(), v)).collect();
        let mut text = BTreeMap::new();
        for (n, rows) in diffs.unwrap_or_default() {
            let rows = rows
                .iter()
                .map(|row| row.iter().map(|x| Ok(x.str()?.to_string())).collect::<PyResult<Vec<_>>>())
                .collect::<PyResult<Vec<_>>>()?;
            text.insert(n.to_string(), rows);
        }
        let diffs = text;
        let repr = serde_json::json!({ "dims": dims, "diffs": diffs });
        serde_json::from_value(repr).map(Complex).map_err(value_err)
    }

    #[staticmethod]
    fn concentrated(degree: Degree, dim: usize) -> Self {
        Complex(BoundedComplex::concentrated(degree, dim))
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        serde_json::from_str(text).map(Complex).map_err(value_err)
    }

    /// A seeded random complex with at most `max_dim` per degree.
    #[staticmethod]
    #[pyo3(signature = (seed, max_dim=3, lo=-2, hi=2))]
    fn random(seed: u64, max_dim: usize, lo: Degree, hi: Degree) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Complex(models::random_complex(&mut rng, max_dim, lo, hi))
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.0).expect("complexes serialize")
    }

    fn dims(&self) -> BTreeMap<Degree, usize> {
        self.0.dims().clone()
    }

    fn shift(&self, k: Degree) -> Complex {
        Complex(self.0.shift(k))
    }

    fn homology_dims(&self) -> BTreeMap<Degree, usize> {
        self.0.homology_dims()
    }

    fn euler_characteristic(&self) -> i64 {
        self.0.euler_characteristic()
    }

    fn is_acyclic(&self) -> bool {
        self.0.is_acyclic()
    }

    fn __repr__(&self) -> String {
        format!("Complex({:?})", self.0.dims())
    }
}

/// A mediated triangle transport datum.
#[pyclass(name = "Datum", frozen)]
struct Datum(MTTDatum);

impl Datum {
    fn check(&self, i: usize, j: usize) -> PyResult<()> {
        let r = self.0.node_count();
        if i >= r || j >= r {
            return Err(PyIndexError::new_err(format!("channel ({i}, {j}) out of range for {r} nodes")));
        }
        Ok(())
    }
}

#[pymethods]
impl Datum {
    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        MTTDatum::load(path).map(Datum).map_err(value_err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        MTTDatum::from_json(text).map(Datum).map_err(value_err)
    }

    /// A seeded random datum with the default caps.
    #[staticmethod]
    #[pyo3(signature = (seed, nodes=2))]
    fn random(seed: u64, nodes: usize) -> PyResult<Self> {
        let spec = GeneratorSpec { nodes, ..GeneratorSpec::default() }.with_seed(seed);
        models::gen_random(&spec).map(Datum).map_err(value_err)
    }

    fn to_json(&self) -> String {
        self.0.to_json()
    }

    #[getter]
    fn nodes(&self) -> usize {
        self.0.node_count()
    }

    fn probe(&self, i: usize) -> PyResult<Complex> {
        self.check(i, i)?;
        Ok(Complex(self.0.probes[i].clone()))
    }

    /// `A_ij(L_i)`, with 0-based indices.
    fn transported_probe(&self, i: usize, j: usize) -> PyResult<Complex> {
        self.check(i, j)?;
        self.0.transported_probe(i, j).map(Complex).map_err(value_err)
    }

    /// `P_ij`, with 0-based indices.
    fn interaction_polynomial(&self, i: usize, j: usize) -> PyResult<Poly> {
        self.check(i, j)?;
        self.0.interaction_polynomial(i, j).map(Poly).map_err(value_err)
    }

    fn semisimple_oracle(&self, i: usize, j: usize) -> PyResult<Poly> {
        self.check(i, j)?;
        models::semisimple_oracle(&self.0, i, j).map(Poly).map_err(value_err)
    }

    /// All `P_ij` as a nested list.
    fn graded_matrix(&self) -> Vec<Vec<Poly>> {
        let g = self.0.graded_matrix();
        (0..g.size())
            .map(|i| (0..g.size()).map(|j| Poly(g.get(i, j).clone())).collect())
            .collect()
    }

    fn package_json(&self) -> String {
        self.0.inherited_package().to_json()
    }

    fn channel_report_json(&self, i: usize, j: usize) -> PyResult<String> {
        self.check(i, j)?;
        let rep = channel_report(&self.0, i, j).map_err(value_err)?;
        Ok(serde_json::to_string(&rep).expect("reports serialize"))
    }

    fn bridge_verdict_json(&self) -> String {
        serde_json::to_string(&bridge_verdict(&self.0)).expect("reports serialize")
    }

    fn __repr__(&self) -> String {
        format!("Datum(nodes={})", self.0.node_count())
    }
}

/// `P(X, Y)`, the Poincaré polynomial of `Hom(X, Y)`.
#[pyfunction]
fn poincare(x: &Complex, y: &Complex) -> Poly {
    Poly(homcx::poincare(&x.0, &y.0))
}

/// Whether a right visibility witness `X → L` exists.
#[pyfunction]
fn right_visible(x: &Complex, l: &Complex) -> bool {
    find_right_visibility(&x.0, &l.0).is_some_and(|w| w.verify())
}

#[pyfunction]
#[pyo3(signature = (name, d=3, m0=2, a=1, b=2, m=-1))]
fn demo(name: &str, d: usize, m0: Degree, a: usize, b: usize, m: Degree) -> PyResult<Vec<Datum>> {
    let params = DemoParams { d, m0, a, b, m };
    models::demo(name, &params)
        .map(|v| v.into_iter().map(Datum).collect())
        .map_err(value_err)
}

#[pyfunction]
fn demo_names() -> Vec<&'static str> {
    models::DEMO_NAMES.to_vec()
}

/// Runs the seeded random suites and returns the report as JSON.
#[pyfunction]
#[pyo3(signature = (suite="all", seed=0, trials=20))]
fn verify_random(py: Python<'_>, suite: &str, seed: u64, trials: usize) -> PyResult<String> {
    let suites: Vec<Suite> = Suite::parse_selector(suite).ok_or_else(|| value_err(format!("unknown suite {suite:?}")))?;
    Ok(py.detach(|| run_random(&suites, seed, trials).to_json()))
}

#[pymodule]
fn mtt_lab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Poly>()?;
    m.add_class::<Complex>()?;
    m.add_class::<Datum>()?;
    m.add_function(wrap_pyfunction!(poincare, m)?)?;
    m.add_function(wrap_pyfunction!(right_visible, m)?)?;
    m.add_function(wrap_pyfunction!(demo, m)?)?;
    m.add_function(wrap_pyfunction!(demo_names, m)?)?;
    m.add_function(wrap_pyfunction!(verify_random, m)?)?;
    Ok(())
}
