use std::collections::BTreeMap;

use graphette::{Error, Graphette, GraphetteTable, HostGraph, Identification, Permutation, Report, SamplingStrategy};
use pyo3::create_exception;
use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyBytes;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

create_exception!(
    pygraphette,
    GraphetteError,
    PyValueError,
    "Invalid input or table data."
);

fn to_py(err: Error) -> PyErr {
    match err {
        Error::Io(e) => PyOSError::new_err(e.to_string()),
        other => GraphetteError::new_err(other.to_string()),
    }
}

fn perm(images: Vec<usize>) -> PyResult<Permutation> {
    Permutation::from_images(&images).map_err(to_py)
}

/// A small graph on nodes 0..k stored as a lower-triangle bit vector.
#[pyclass(
    name = "Graphette",
    module = "pygraphette",
    frozen,
    eq,
    hash,
    ord,
    skip_from_py_object
)]
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct PyGraphette(Graphette);

#[pymethods]
impl PyGraphette {
    #[new]
    fn new(k: usize, bits: u128) -> PyResult<Self> {
        Graphette::new(k, bits).map(Self).map_err(to_py)
    }

    #[staticmethod]
    fn from_edges(k: usize, edges: Vec<(usize, usize)>) -> PyResult<Self> {
        Graphette::encode(k, edges).map(Self).map_err(to_py)
    }

    #[getter]
    fn k(&self) -> usize {
        self.0.k()
    }

    #[getter]
    fn bits(&self) -> u128 {
        self.0.bits()
    }

    /// Edges as `(i, j)` pairs with `i > j`.
    fn edges(&self) -> Vec<(usize, usize)> {
        self.0.decode()
    }

    fn has_edge(&self, i: usize, j: usize) -> bool {
        i < self.0.k() && j < self.0.k() && self.0.has_edge(i, j)
    }

    fn edge_count(&self) -> usize {
        self.0.edge_count()
    }

    fn degrees(&self) -> Vec<usize> {
        self.0.degrees()
    }

    fn is_connected(&self) -> bool {
        self.0.is_connected()
    }

    fn complement(&self) -> Self {
        Self(self.0.complement())
    }

    /// Relabels node `u` as `perm[u]`.
    fn permute(&self, perm_images: Vec<usize>) -> PyResult<Self> {
        self.0.apply_permutation(&perm(perm_images)?).map(Self).map_err(to_py)
    }

    /// Every automorphism as an image list.
    fn automorphisms(&self) -> PyResult<Vec<Vec<usize>>> {
        let auts = graphette::generate_automorphisms(&self.0).map_err(to_py)?;
        Ok(auts.perms().iter().map(Permutation::to_vec).collect())
    }

    /// Orbit label of every node (the smallest node of its orbit).
    fn orbits(&self) -> PyResult<Vec<usize>> {
        let part = graphette::orbit_partition(&self.0).map_err(to_py)?;
        Ok(part.labels().iter().map(|&l| l as usize).collect())
    }

    fn __repr__(&self) -> String {
        format!("Graphette(k={}, bits={})", self.0.k(), self.0.bits())
    }
}

/// An isomorphism from `g` onto `h` as an image list, or None.
#[pyfunction]
fn are_isomorphic(g: &PyGraphette, h: &PyGraphette) -> PyResult<Option<Vec<usize>>> {
    let found = graphette::are_isomorphic(&g.0, &h.0).map_err(to_py)?;
    Ok(found.map(|p| p.to_vec()))
}

#[pyfunction]
fn split_cycles(perm_images: Vec<usize>) -> PyResult<Vec<Vec<usize>>> {
    Ok(graphette::split_cycles(&perm(perm_images)?).into_inner())
}

#[pyclass(name = "Identification", module = "pygraphette", frozen, get_all)]
struct PyIdentification {
    canonical_id: u32,
    canonical_bits: u64,
    /// Maps the queried nodes onto canonical positions.
    witness: Vec<usize>,
    connected: bool,
    /// Global orbit ID of every queried node.
    orbits: Vec<u32>,
}

#[pymethods]
impl PyIdentification {
    fn __repr__(&self) -> String {
        format!(
            "Identification(canonical_id={}, canonical_bits={}, witness={:?}, connected={}, orbits={:?})",
            self.canonical_id, self.canonical_bits, self.witness, self.connected, self.orbits
        )
    }
}

/// Canonical catalog, lookup table and orbit numbering for one order.
#[pyclass(name = "GraphetteTable", module = "pygraphette", frozen)]
struct PyTable(GraphetteTable);

impl PyTable {
    fn identification(&self, g: &Graphette, id: Identification) -> PyResult<PyIdentification> {
        Ok(PyIdentification {
            canonical_id: id.canonical_id,
            canonical_bits: id.canonical_bits,
            witness: id.witness.to_vec(),
            connected: id.connected,
            orbits: self.0.node_orbits(g).map_err(to_py)?,
        })
    }
}

#[pymethods]
impl PyTable {
    #[staticmethod]
    #[pyo3(signature = (k, partitions = 1, workers = 1))]
    fn build(py: Python<'_>, k: usize, partitions: usize, workers: usize) -> PyResult<Self> {
        py.detach(|| GraphetteTable::build(k, partitions, workers))
            .map(Self)
            .map_err(to_py)
    }

    #[staticmethod]
    fn load(py: Python<'_>, path: std::path::PathBuf) -> PyResult<Self> {
        py.detach(|| GraphetteTable::load(path)).map(Self).map_err(to_py)
    }

    #[staticmethod]
    fn from_bytes(data: &[u8]) -> PyResult<Self> {
        GraphetteTable::from_bytes(data).map(Self).map_err(to_py)
    }

    fn save(&self, py: Python<'_>, path: std::path::PathBuf) -> PyResult<()> {
        py.detach(|| self.0.save(path)).map_err(to_py)
    }

    fn to_bytes<'py>(&self, py: Python<'py>) -> Bound<'py, PyBytes> {
        PyBytes::new(py, &self.0.to_bytes())
    }

    #[getter]
    fn k(&self) -> usize {
        self.0.k()
    }

    #[getter]
    fn canonical_count(&self) -> usize {
        self.0.canonical_count()
    }

    #[getter]
    fn total_orbits(&self) -> u32 {
        self.0.total_orbits()
    }

    fn canonicals(&self) -> Vec<PyGraphette> {
        let cat = self.0.catalog();
        (0..cat.len()).map(|id| PyGraphette(cat.canonical(id))).collect()
    }

    fn connected_count(&self) -> usize {
        self.0.catalog().connected_count()
    }

    /// Orbit labels of one canonical.
    fn orbit_labels(&self, canonical_id: usize) -> PyResult<Vec<usize>> {
        let parts = self.0.catalog().orbit_partitions();
        let part = parts
            .get(canonical_id)
            .ok_or_else(|| GraphetteError::new_err(format!("no canonical with ID {canonical_id}")))?;
        Ok(part.labels().iter().map(|&l| l as usize).collect())
    }

    fn query(&self, g: &PyGraphette) -> PyResult<PyIdentification> {
        let id = self.0.query(&g.0).map_err(to_py)?;
        self.identification(&g.0, id)
    }

    fn query_bits(&self, bits: u64) -> PyResult<PyIdentification> {
        let g = Graphette::new(self.0.k(), bits as u128).map_err(to_py)?;
        self.query(&PyGraphette(g))
    }

    fn node_orbit(&self, g: &PyGraphette, node: usize) -> PyResult<u32> {
        self.0.node_orbit(&g.0, node).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!(
            "GraphetteTable(k={}, canonicals={}, orbits={})",
            self.0.k(),
            self.0.canonical_count(),
            self.0.total_orbits()
        )
    }
}

/// Host graph that samples are drawn from.
#[pyclass(name = "HostGraph", module = "pygraphette", frozen)]
struct PyHost(HostGraph);

#[pymethods]
impl PyHost {
    /// Nodes are named `0..n`.
    #[staticmethod]
    fn from_edges(n: usize, edges: Vec<(usize, usize)>) -> PyResult<Self> {
        HostGraph::from_edges(n, edges).map(Self).map_err(to_py)
    }

    /// Whitespace-separated edge list; `#` starts a comment.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        HostGraph::parse_edge_list(text).map(Self).map_err(to_py)
    }

    #[staticmethod]
    fn load(path: std::path::PathBuf) -> PyResult<Self> {
        HostGraph::load(path).map(Self).map_err(to_py)
    }

    #[staticmethod]
    #[pyo3(signature = (n, p, seed = 0))]
    fn erdos_renyi(n: usize, p: f64, seed: u64) -> PyResult<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        HostGraph::erdos_renyi(n, p, &mut rng).map(Self).map_err(to_py)
    }

    #[getter]
    fn node_count(&self) -> usize {
        self.0.node_count()
    }

    #[getter]
    fn edge_count(&self) -> usize {
        self.0.edge_count()
    }

    fn names(&self) -> Vec<String> {
        self.0.names().to_vec()
    }

    fn induced(&self, nodes: Vec<usize>) -> PyResult<PyGraphette> {
        self.0.induced_bits(&nodes).map(PyGraphette).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!(
            "HostGraph(nodes={}, edges={})",
            self.0.node_count(),
            self.0.edge_count()
        )
    }
}

/// Frequencies and orbit degree vectors from one sampling or enumeration run.
#[pyclass(name = "Report", module = "pygraphette", frozen)]
struct PyReport {
    report: Report,
    names: Vec<String>,
}

#[pymethods]
impl PyReport {
    #[getter]
    fn k(&self) -> usize {
        self.report.k
    }

    #[getter]
    fn samples(&self) -> u64 {
        self.report.samples
    }

    /// `(canonical_id, bits, connected, count, frequency)` for every canonical.
    fn graphettes(&self) -> Vec<(u32, u64, bool, u64, f64)> {
        self.report
            .graphettes
            .iter()
            .map(|g| (g.canonical_id, g.bits, g.connected, g.count, g.frequency))
            .collect()
    }

    /// Connected graphettes only, renormalized over connected samples.
    fn graphlets(&self) -> Vec<(u32, u64, bool, u64, f64)> {
        self.report
            .graphlet_view()
            .iter()
            .map(|g| (g.canonical_id, g.bits, g.connected, g.count, g.frequency))
            .collect()
    }

    fn frequencies(&self) -> Vec<f64> {
        self.report.frequencies()
    }

    /// `(orbit_id, canonical_id, count, frequency)` for every global orbit.
    fn orbits(&self) -> Vec<(u32, u32, u64, f64)> {
        self.report
            .orbits
            .iter()
            .map(|o| (o.orbit_id, o.canonical_id, o.count, o.frequency))
            .collect()
    }

    /// Node name -> {orbit ID: count}, for nodes seen in at least one sample.
    fn odv(&self) -> BTreeMap<String, BTreeMap<u32, u64>> {
        self.report
            .odv
            .iter()
            .map(|row| {
                (
                    self.names[row.node as usize].clone(),
                    row.counts.iter().copied().collect(),
                )
            })
            .collect()
    }

    fn l1_distance(&self, other: &PyReport) -> f64 {
        self.report.l1_distance(&other.report)
    }

    fn to_tsv(&self, host: &PyHost) -> PyResult<String> {
        let mut out = Vec::new();
        self.report
            .write_tsv(&mut out, &host.0)
            .map_err(|e| PyOSError::new_err(e.to_string()))?;
        String::from_utf8(out).map_err(|e| PyValueError::new_err(e.to_string()))
    }
}

#[pyfunction]
#[pyo3(signature = (host, table, samples, strategy = "uniform", seed = 0, workers = 1))]
fn sample(
    py: Python<'_>,
    host: &PyHost,
    table: &PyTable,
    samples: u64,
    strategy: &str,
    seed: u64,
    workers: usize,
) -> PyResult<PyReport> {
    let strategy: SamplingStrategy = strategy.parse().map_err(to_py)?;
    let report = py
        .detach(|| {
            let acc = graphette::sample(&host.0, &table.0, strategy, samples, seed, workers)?;
            graphette::estimate(&acc, &table.0)
        })
        .map_err(to_py)?;
    Ok(PyReport {
        report,
        names: host.0.names().to_vec(),
    })
}

/// Exact counts over every k-subset of the host.
#[pyfunction]
#[pyo3(signature = (host, table, bound = graphette::DEFAULT_ENUMERATION_BOUND))]
fn enumerate(py: Python<'_>, host: &PyHost, table: &PyTable, bound: u128) -> PyResult<PyReport> {
    let report = py
        .detach(|| {
            let acc = graphette::exhaustive_enumerate(&host.0, &table.0, bound)?;
            graphette::estimate(&acc, &table.0)
        })
        .map_err(to_py)?;
    Ok(PyReport {
        report,
        names: host.0.names().to_vec(),
    })
}

#[pymodule]
fn pygraphette(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("GraphetteError", m.py().get_type::<GraphetteError>())?;
    m.add_class::<PyGraphette>()?;
    m.add_class::<PyIdentification>()?;
    m.add_class::<PyTable>()?;
    m.add_class::<PyHost>()?;
    m.add_class::<PyReport>()?;
    m.add_function(wrap_pyfunction!(are_isomorphic, m)?)?;
    m.add_function(wrap_pyfunction!(split_cycles, m)?)?;
    m.add_function(wrap_pyfunction!(sample, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate, m)?)?;
    Ok(())
}
