//! Topology of polygon meshes: validation, Euler characteristic, genus,
//! Betti numbers and cut graphs.
//!
//! ```
//! use meshtopo::generators::{generate, GeneratorSpec};
//! use meshtopo::topology::{betti_closed_form, genus};
//!
//! let torus = generate(&GeneratorSpec::TorusGrid { m: 3, n: 3 }).unwrap();
//! assert_eq!(betti_closed_form(&torus).0, [1, 2, 1]);
//! assert_eq!(genus(&torus), Ok(1));
//! ```

pub mod cli;
pub mod cutgraph;
pub mod generators;
pub mod io;
pub mod mesh;
pub mod report;
pub mod topology;
mod union_find;
pub mod validation;

pub use cutgraph::{build_cut_graph, cut_mesh, CutGraph, CutGraphError};
pub use generators::{generate, GeneratorError, GeneratorSpec};
pub use io::{parse_obj, parse_off, write_obj, IoError};
pub use mesh::{Dim, ElementRef, ElementSet, Mesh, MeshError};
pub use report::ReportDocument;
pub use topology::{analyze, Betti, TopologyError, TopologyReport};
pub use validation::{validate, ValidationReport};
