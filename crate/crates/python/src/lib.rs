use meshtopo::cutgraph;
use meshtopo::io;
use meshtopo::mesh::{Dim, ElementSet};
use meshtopo::topology::{self, TopologyError};
use meshtopo::{GeneratorSpec, ReportDocument};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn value_error(e: impl ToString) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn json_to_py(py: Python<'_>, text: &str) -> PyResult<Py<PyAny>> {
    let json = py.import("json")?;
    Ok(json.call_method1("loads", (text,))?.unbind())
}

fn dim_from(n: u8) -> PyResult<Dim> {
    match n {
        0 => Ok(Dim::Vertex),
        1 => Ok(Dim::Edge),
        2 => Ok(Dim::Face),
        _ => Err(PyValueError::new_err(format!(
            "dimension must be 0, 1 or 2, got {n}"
        ))),
    }
}

/// Polygon mesh with derived edge table.
#[pyclass(name = "Mesh", frozen, module = "pymeshtopo")]
struct PyMesh {
    inner: meshtopo::Mesh,
}

impl PyMesh {
    fn wrap(inner: meshtopo::Mesh) -> Self {
        PyMesh { inner }
    }
}

#[pymethods]
impl PyMesh {
    #[new]
    #[pyo3(signature = (vertex_count, faces, positions=None))]
    fn new(
        vertex_count: usize,
        faces: Vec<Vec<usize>>,
        positions: Option<Vec<[f64; 3]>>,
    ) -> PyResult<Self> {
        meshtopo::Mesh::new(vertex_count, faces, positions)
            .map(PyMesh::wrap)
            .map_err(value_error)
    }

    /// Builds a generated mesh from a spec such as `"torus_grid:3,3"`.
    #[staticmethod]
    fn generate(spec: &str) -> PyResult<Self> {
        let spec: GeneratorSpec = spec.parse().map_err(value_error)?;
        meshtopo::generate(&spec)
            .map(PyMesh::wrap)
            .map_err(value_error)
    }

    #[staticmethod]
    fn parse_obj(data: &str) -> PyResult<Self> {
        io::parse_obj(data.as_bytes())
            .map(PyMesh::wrap)
            .map_err(value_error)
    }

    #[staticmethod]
    fn parse_off(data: &str) -> PyResult<Self> {
        io::parse_off(data.as_bytes())
            .map(PyMesh::wrap)
            .map_err(value_error)
    }

    #[getter]
    fn vertex_count(&self) -> usize {
        self.inner.vertex_count()
    }

    #[getter]
    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }

    #[getter]
    fn face_count(&self) -> usize {
        self.inner.face_count()
    }

    #[getter]
    fn faces(&self) -> Vec<Vec<usize>> {
        self.inner.faces().to_vec()
    }

    #[getter]
    fn positions(&self) -> Option<Vec<[f64; 3]>> {
        self.inner.positions().map(|p| p.to_vec())
    }

    /// Vertex pairs in edge id order.
    #[getter]
    fn edges(&self) -> Vec<(usize, usize)> {
        self.inner
            .edges()
            .iter()
            .map(|e| {
                let [a, b] = e.vertices();
                (a, b)
            })
            .collect()
    }

    fn euler_characteristic(&self) -> i64 {
        self.inner.euler_characteristic()
    }

    /// Boundary of one element as a sorted list of ids one dimension down.
    fn boundary(&self, dim: u8, id: usize) -> PyResult<Vec<usize>> {
        let element = meshtopo::ElementRef {
            dim: dim_from(dim)?,
            id,
        };
        self.inner
            .boundary(element)
            .map(|s| s.to_vec())
            .map_err(value_error)
    }

    fn is_cycle(&self, dim: u8, ids: Vec<usize>) -> PyResult<bool> {
        self.inner
            .is_cycle(&ElementSet::from_ids(dim_from(dim)?, ids))
            .map_err(value_error)
    }

    fn is_simple_cycle(&self, dim: u8, ids: Vec<usize>) -> PyResult<bool> {
        self.inner
            .is_simple_cycle(&ElementSet::from_ids(dim_from(dim)?, ids))
            .map_err(value_error)
    }

    fn validate(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        let report = meshtopo::validate(&self.inner);
        json_to_py(py, &serde_json::to_string(&report).map_err(value_error)?)
    }

    /// The full report as a dict, the same document `meshtopo info --json` prints.
    #[pyo3(signature = (input="python"))]
    fn report(&self, py: Python<'_>, input: &str) -> PyResult<Py<PyAny>> {
        json_to_py(py, &ReportDocument::build(input, &self.inner).to_json())
    }

    #[pyo3(signature = (method="closed-form", seed=0))]
    fn betti(&self, method: &str, seed: u64) -> PyResult<(i64, i64, i64)> {
        let b = match method {
            "closed-form" => topology::betti_closed_form(&self.inner),
            "incremental" => {
                let f = topology::make_filtration(&self.inner, seed);
                topology::betti_incremental(&self.inner, &f).map_err(value_error)?
            }
            other => return Err(PyValueError::new_err(format!("unknown method `{other}`"))),
        };
        Ok((b.0[0], b.0[1], b.0[2]))
    }

    /// `None` when the genus is undefined.
    fn genus(&self) -> PyResult<Option<u64>> {
        match topology::genus(&self.inner) {
            Ok(g) => Ok(Some(g)),
            Err(TopologyError::GenusUndefined { .. }) => Ok(None),
            Err(e) => Err(value_error(e)),
        }
    }

    fn component_count(&self) -> usize {
        topology::components(&self.inner).count
    }

    /// Each boundary cycle as its vertex sequence.
    fn boundary_cycles(&self) -> PyResult<Vec<Vec<usize>>> {
        topology::boundary_cycles(&self.inner)
            .map(|c| c.into_iter().map(|c| c.vertices).collect())
            .map_err(value_error)
    }

    #[pyo3(signature = (root=0))]
    fn cut_graph(&self, root: usize) -> PyResult<CutGraph> {
        cutgraph::build_cut_graph(&self.inner, root)
            .map(|inner| CutGraph { inner })
            .map_err(value_error)
    }

    /// Cuts along the given edge ids.
    fn cut(&self, edges: Vec<usize>) -> PyResult<PyMesh> {
        cutgraph::cut_mesh(&self.inner, &ElementSet::edges(edges))
            .map(PyMesh::wrap)
            .map_err(value_error)
    }

    #[pyo3(signature = (seams=None))]
    fn write_obj(&self, seams: Option<Vec<usize>>) -> PyResult<String> {
        let seams = seams.map(ElementSet::edges);
        io::write_obj(&self.inner, seams.as_ref()).map_err(value_error)
    }

    fn __repr__(&self) -> String {
        format!(
            "Mesh(V={}, E={}, F={})",
            self.inner.vertex_count(),
            self.inner.edge_count(),
            self.inner.face_count()
        )
    }
}

#[pyclass(frozen, module = "pymeshtopo")]
struct CutGraph {
    inner: cutgraph::CutGraph,
}

#[pymethods]
impl CutGraph {
    #[getter]
    fn root(&self) -> usize {
        self.inner.root
    }

    /// Edge ids of each loop in walk order.
    #[getter]
    fn loops(&self) -> Vec<Vec<usize>> {
        self.inner.loops.iter().map(|l| l.edges.clone()).collect()
    }

    #[getter]
    fn edges(&self) -> Vec<usize> {
        self.inner.edges.to_vec()
    }

    #[getter]
    fn puncture_edge(&self) -> Option<usize> {
        self.inner.puncture_edge
    }

    /// Edges to cut along to open the component into a disc.
    fn cut_edges(&self) -> Vec<usize> {
        self.inner.cut_edges().to_vec()
    }

    fn __len__(&self) -> usize {
        self.inner.loops.len()
    }
}

#[pymodule]
fn pymeshtopo(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMesh>()?;
    m.add_class::<CutGraph>()?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
