//! The JSON document printed by `meshtopo info --json`.
//!
//! Keys are emitted in sorted order and every list has a fixed order, so the
//! same input always produces the same bytes.

use serde::{Deserialize, Serialize};

use crate::cutgraph::{self, CutGraph};
use crate::mesh::Mesh;
use crate::topology::{self, InstigatorPartition};
use crate::validation::{self, ValidationReport};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct Counts {
    pub V: usize,
    pub E: usize,
    pub F: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct CutGraphSummary {
    pub loops: usize,
    pub loop_lengths: Vec<usize>,
    pub B_size: usize,
    pub root: usize,
}

impl CutGraphSummary {
    pub fn new(cut: &CutGraph) -> Self {
        CutGraphSummary {
            loops: cut.loops.len(),
            loop_lengths: cut.loops.iter().map(|l| l.len()).collect(),
            B_size: cut.edges.len(),
            root: cut.root,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema: u32,
    pub version: String,
    pub input: String,
    pub counts: Counts,
    pub components: usize,
    pub boundary_cycles: Option<usize>,
    pub euler_characteristic: i64,
    pub genus: Option<u64>,
    pub watertight: bool,
    pub orientable: bool,
    pub manifold: bool,
    pub partition: InstigatorPartition,
    pub betti: [i64; 3],
    pub validation: ValidationReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutgraph: Option<CutGraphSummary>,
}

impl ReportDocument {
    /// Analyses `mesh`. The cut-graph summary is filled in for connected
    /// meshes that admit a cut graph, rooted at vertex 0.
    pub fn build(input: &str, mesh: &Mesh) -> Self {
        let validation = validation::validate(mesh);
        let topo = topology::analyze(mesh);
        let cutgraph = (topo.components == 1 && mesh.vertex_count() > 0)
            .then(|| cutgraph::build_cut_graph(mesh, 0).ok())
            .flatten()
            .map(|c| CutGraphSummary::new(&c));
        ReportDocument {
            schema: SCHEMA_VERSION,
            version: env!("CARGO_PKG_VERSION").to_string(),
            input: input.to_string(),
            counts: Counts {
                V: topo.vertices,
                E: topo.edges,
                F: topo.faces,
            },
            components: topo.components,
            boundary_cycles: topo.boundary_cycles,
            euler_characteristic: topo.euler_characteristic,
            genus: topo.genus,
            watertight: validation.watertight,
            orientable: validation.orientable,
            manifold: validation.is_manifold(),
            partition: topo.partition,
            betti: topo.betti.0,
            validation,
            cutgraph,
        }
    }

    /// Pretty-printed JSON with sorted keys and a trailing newline.
    pub fn to_json(&self) -> String {
        // going through Value sorts object keys
        let value = serde_json::to_value(self).expect("report is always serialisable");
        let mut text = serde_json::to_string_pretty(&value).expect("value is always serialisable");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}
