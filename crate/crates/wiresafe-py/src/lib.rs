//! Python bindings for the wiresafe library.
//!
//! Thin wrappers over the Rust types: field elements cross the
//! boundary as bit-packed integers (bit i = coefficient of x^i),
//! binary matrices as nested lists of 0/1, and audit results as JSON
//! strings matching the CLI's report format. Every fallible call
//! raises `ValueError` with the library's error message.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use rand_chacha::ChaCha12Rng;
use rand_core::SeedableRng;

use wiresafe::audit;
use wiresafe::budget::Budget;
use wiresafe::coset;
use wiresafe::gf::{BaseMatrix, FieldElement, FieldSpec as Spec};
use wiresafe::netsim::{LinearNetworkCode, Network as Net};
use wiresafe::rankmetric::GabidulinCode as Code;

fn py_err(e: wiresafe::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn budget_from(limit: Option<u64>) -> Budget {
    limit.map_or_else(Budget::default, Budget::with_limit)
}

fn to_json<T: serde::Serialize>(value: &T) -> PyResult<String> {
    serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))
}

fn binary_matrix(rows: Vec<Vec<u8>>) -> PyResult<BaseMatrix> {
    BaseMatrix::from_rows(&rows).map_err(py_err)
}

// ─── Field arithmetic ───────────────────────────────────────────────────────

/// GF(2^m) described by its degree and irreducible modulus polynomial.
#[pyclass(name = "FieldSpec", frozen)]
struct FieldSpec {
    inner: Spec,
}

impl FieldSpec {
    fn elem(&self, value: u64) -> PyResult<FieldElement> {
        self.inner.element(value).map_err(py_err)
    }

    fn elems(&self, values: &[u64]) -> PyResult<Vec<FieldElement>> {
        values.iter().map(|&v| self.elem(v)).collect()
    }
}

#[pymethods]
impl FieldSpec {
    /// A degree-m field; `modulus` (bit-packed, bit i = coefficient of
    /// x^i) defaults to a built-in irreducible polynomial.
    #[new]
    #[pyo3(signature = (m, modulus=None))]
    fn new(m: u32, modulus: Option<u64>) -> PyResult<Self> {
        let inner = match modulus {
            Some(p) => Spec::new(m, p),
            None => Spec::with_degree(m),
        }
        .map_err(py_err)?;
        Ok(FieldSpec { inner })
    }

    #[getter]
    fn m(&self) -> u32 {
        self.inner.m()
    }

    #[getter]
    fn modulus(&self) -> u64 {
        self.inner.modulus()
    }

    #[getter]
    fn order(&self) -> u128 {
        self.inner.order()
    }

    fn add(&self, a: u64, b: u64) -> PyResult<u64> {
        Ok((self.elem(a)? + self.elem(b)?).coeffs())
    }

    fn mul(&self, a: u64, b: u64) -> PyResult<u64> {
        Ok((self.elem(a)? * self.elem(b)?).coeffs())
    }

    fn inverse(&self, a: u64) -> PyResult<u64> {
        Ok(self.elem(a)?.inverse().map_err(py_err)?.coeffs())
    }

    fn pow(&self, a: u64, exp: u64) -> PyResult<u64> {
        Ok(self.elem(a)?.pow(exp).coeffs())
    }

    /// a^(2^i), the i-th Frobenius power.
    fn frobenius(&self, a: u64, i: u32) -> PyResult<u64> {
        Ok(self.elem(a)?.frobenius(i).coeffs())
    }

    fn __repr__(&self) -> String {
        format!("FieldSpec(m={}, modulus={:#x})", self.inner.m(), self.inner.modulus())
    }
}

// ─── The rank-metric code ───────────────────────────────────────────────────

/// A Gabidulin code given by its k x n Moore parity-check matrix.
#[pyclass(name = "GabidulinCode", frozen)]
struct GabidulinCode {
    inner: Code,
}

#[pymethods]
impl GabidulinCode {
    /// `generators` (bit-packed field elements) defaults to
    /// 1, alpha, ..., alpha^(n-1); they must be GF(2)-independent.
    #[new]
    #[pyo3(signature = (spec, n, k, generators=None))]
    fn new(spec: &FieldSpec, n: usize, k: usize, generators: Option<Vec<u64>>) -> PyResult<Self> {
        let inner = match generators {
            Some(g) => {
                if g.len() != n {
                    return Err(PyValueError::new_err(format!(
                        "{} generators for a length-{n} code",
                        g.len()
                    )));
                }
                Code::new(spec.inner, k, spec.elems(&g)?)
            }
            None => Code::with_standard_generators(spec.inner, n, k),
        }
        .map_err(py_err)?;
        Ok(GabidulinCode { inner })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.k()
    }

    /// The parity-check matrix, row-major bit-packed entries.
    fn parity_check(&self) -> Vec<Vec<u64>> {
        let h = self.inner.parity_check();
        (0..h.rows())
            .map(|i| h.row(i).iter().map(|e| e.coeffs()).collect())
            .collect()
    }

    /// Exact minimum rank distance of the kernel code, by enumeration.
    #[pyo3(signature = (budget=None))]
    fn min_rank_distance(&self, budget: Option<u64>) -> PyResult<usize> {
        self.inner.min_rank_distance(&budget_from(budget)).map_err(py_err)
    }

    /// Check H . T nonsingular for every full-column-rank binary T.
    #[pyo3(signature = (budget=None))]
    fn verify_mrd_criterion(&self, budget: Option<u64>) -> PyResult<bool> {
        self.inner.verify_mrd_criterion(&budget_from(budget)).map_err(py_err)
    }

    fn __repr__(&self) -> String {
        format!(
            "GabidulinCode(m={}, n={}, k={})",
            self.inner.spec().m(),
            self.inner.n(),
            self.inner.k()
        )
    }
}

// ─── Coset coding ───────────────────────────────────────────────────────────

/// Syndrome coset coding: k-symbol messages into n-symbol codewords
/// with mu = n - k uniformly random fill symbols.
#[pyclass(name = "CosetScheme", frozen)]
struct CosetScheme {
    inner: coset::CosetScheme,
}

#[pymethods]
impl CosetScheme {
    #[new]
    fn new(code: &GabidulinCode) -> Self {
        CosetScheme { inner: coset::CosetScheme::from_code(&code.inner) }
    }

    /// The scalar MDS baseline (generalized Reed-Solomon parity check)
    /// with the same interface — secure against binary taps, not
    /// against taps over the extension field.
    #[staticmethod]
    #[pyo3(signature = (spec, n, mu, budget=None))]
    fn mds_baseline(spec: &FieldSpec, n: usize, mu: usize, budget: Option<u64>) -> PyResult<Self> {
        let inner =
            coset::build_mds_baseline(spec.inner, n, mu, &budget_from(budget)).map_err(py_err)?;
        Ok(CosetScheme { inner })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.k()
    }

    #[getter]
    fn mu(&self) -> usize {
        self.inner.mu()
    }

    /// Encode a k-symbol message, drawing the mu free symbols from a
    /// seeded deterministic generator.
    fn encode(&self, s: Vec<u64>, seed: u64) -> PyResult<Vec<u64>> {
        let s = self.spec_elems(&s)?;
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let x = self.inner.encode(&s, &mut rng).map_err(py_err)?;
        Ok(x.iter().map(|e| e.coeffs()).collect())
    }

    /// Encode with explicit free symbols (mu of them).
    fn encode_with_free(&self, s: Vec<u64>, free: Vec<u64>) -> PyResult<Vec<u64>> {
        let s = self.spec_elems(&s)?;
        let free = self.spec_elems(&free)?;
        let x = self.inner.encode_with_free(&s, &free).map_err(py_err)?;
        Ok(x.iter().map(|e| e.coeffs()).collect())
    }

    /// Recover the message from a codeword: S = H . X.
    fn decode(&self, x: Vec<u64>) -> PyResult<Vec<u64>> {
        let x = self.spec_elems(&x)?;
        let s = self.inner.decode(&x).map_err(py_err)?;
        Ok(s.iter().map(|e| e.coeffs()).collect())
    }

    fn __repr__(&self) -> String {
        format!(
            "CosetScheme(m={}, n={}, k={}, mu={})",
            self.inner.spec().m(),
            self.inner.n(),
            self.inner.k(),
            self.inner.mu()
        )
    }
}

impl CosetScheme {
    fn spec_elems(&self, values: &[u64]) -> PyResult<Vec<FieldElement>> {
        let spec = self.inner.spec();
        values.iter().map(|&v| spec.element(v).map_err(py_err)).collect()
    }
}

// ─── Networks ───────────────────────────────────────────────────────────────

/// A single-source acyclic network carrying GF(2)-linear packet mixes.
#[pyclass(name = "Network", frozen)]
struct Network {
    inner: Net,
}

#[pymethods]
impl Network {
    /// One of the built-in graphs: "butterfly", "diamond", "line".
    #[staticmethod]
    fn builtin(name: &str) -> PyResult<Self> {
        Net::builtin(name)
            .map(|inner| Network { inner })
            .ok_or_else(|| PyValueError::new_err(format!("unknown built-in graph `{name}`")))
    }

    /// Parse the CLI's graph JSON format.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Network { inner: Net::from_json_str(text).map_err(py_err)? })
    }

    fn to_json(&self) -> PyResult<String> {
        to_json(&self.inner.to_json())
    }

    #[getter]
    fn num_edges(&self) -> usize {
        self.inner.edge_count()
    }

    #[getter]
    fn num_sinks(&self) -> usize {
        self.inner.sinks().len()
    }

    /// Smallest max-flow from the source to any sink — the feasibility
    /// ceiling for the number of source packets n.
    fn mincut(&self) -> usize {
        self.inner.mincut()
    }

    /// Draw a random GF(2)-linear code for n source packets from a
    /// seeded deterministic generator.
    fn assign_random_code(&self, n: usize, seed: u64) -> PyResult<NetworkCode> {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let inner = self.inner.assign_random_code(n, &mut rng).map_err(py_err)?;
        Ok(NetworkCode { inner })
    }

    fn __repr__(&self) -> String {
        format!(
            "Network(nodes={}, edges={}, sinks={})",
            self.inner.node_count(),
            self.inner.edge_count(),
            self.inner.sinks().len()
        )
    }
}

/// A GF(2)-linear network code: one local mix per edge, with the
/// induced global vectors and per-sink transfer matrices.
#[pyclass(name = "NetworkCode", frozen)]
struct NetworkCode {
    inner: LinearNetworkCode,
}

#[pymethods]
impl NetworkCode {
    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    /// True iff every sink's transfer matrix is invertible.
    fn is_feasible(&self) -> bool {
        self.inner.is_feasible()
    }

    /// Global coding vector of an edge, bit-packed over GF(2).
    fn global_vector(&self, edge: usize) -> u64 {
        self.inner.global_vector(edge)
    }

    /// Push n source packets through `net`; returns per-sink received
    /// packet lists (bit-packed field elements).
    fn transmit(&self, net: &Network, x: Vec<u64>, spec: &FieldSpec) -> PyResult<Vec<Vec<u64>>> {
        let x = spec.elems(&x)?;
        let t = self.inner.transmit(&net.inner, &x).map_err(py_err)?;
        Ok(t.sink_inputs
            .iter()
            .map(|row| row.iter().map(|e| e.coeffs()).collect())
            .collect())
    }

    /// Invert a sink's transfer matrix to recover the source packets.
    fn sink_decode(&self, sink_pos: usize, received: Vec<u64>, spec: &FieldSpec) -> PyResult<Vec<u64>> {
        let r = spec.elems(&received)?;
        let x = self.inner.sink_decode(sink_pos, &r).map_err(py_err)?;
        Ok(x.iter().map(|e| e.coeffs()).collect())
    }

    fn __repr__(&self) -> String {
        format!("NetworkCode(n={}, feasible={})", self.inner.n(), self.inner.is_feasible())
    }
}

// ─── Secrecy audits ─────────────────────────────────────────────────────────

/// The matrix secrecy criterion: [H; B] nonsingular for a binary tap
/// B (rows of 0/1, one per tapped observation).
#[pyfunction]
fn check_perfect_secrecy(scheme: &CosetScheme, b: Vec<Vec<u8>>) -> PyResult<bool> {
    audit::check_perfect_secrecy(scheme.inner.parity_check(), &binary_matrix(b)?).map_err(py_err)
}

/// Exhaustively enumerate every (message, randomness) pair against a
/// binary tap; returns the per-tap case as a JSON string with exact
/// entropies.
#[pyfunction]
#[pyo3(signature = (scheme, b, budget=None))]
fn exhaustive_secrecy(scheme: &CosetScheme, b: Vec<Vec<u8>>, budget: Option<u64>) -> PyResult<String> {
    let case = audit::exhaustive_secrecy(&scheme.inner, &binary_matrix(b)?, &budget_from(budget))
        .map_err(py_err)?;
    to_json(&case)
}

/// Audit every full-rank mu x n binary tap; returns the report as a
/// JSON string.
#[pyfunction]
#[pyo3(signature = (scheme, mu, budget=None))]
fn audit_wiretap_sweep(scheme: &CosetScheme, mu: usize, budget: Option<u64>) -> PyResult<String> {
    let report = audit::audit_wiretap_sweep(&scheme.inner, mu, &budget_from(budget)).map_err(py_err)?;
    to_json(&report)
}

/// Audit every mu-edge wiretap set of a concrete network code; returns
/// the report as a JSON string.
#[pyfunction]
#[pyo3(signature = (net, code, scheme, mu, budget=None))]
fn audit_network(
    net: &Network,
    code: &NetworkCode,
    scheme: &CosetScheme,
    mu: usize,
    budget: Option<u64>,
) -> PyResult<String> {
    let report =
        audit::audit_network(&net.inner, &code.inner, &scheme.inner, mu, &budget_from(budget))
            .map_err(py_err)?;
    to_json(&report)
}

#[pymodule]
fn wiresafe_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<FieldSpec>()?;
    m.add_class::<GabidulinCode>()?;
    m.add_class::<CosetScheme>()?;
    m.add_class::<Network>()?;
    m.add_class::<NetworkCode>()?;
    m.add_function(wrap_pyfunction!(check_perfect_secrecy, m)?)?;
    m.add_function(wrap_pyfunction!(exhaustive_secrecy, m)?)?;
    m.add_function(wrap_pyfunction!(audit_wiretap_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(audit_network, m)?)?;
    Ok(())
}
