//! Qualitative checks: manifoldness, orientability, watertightness.
//!
//! Edge degree throughout is the number of incident face *sides*, so an edge
//! used twice by the same face counts as interior, not as boundary.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mesh::Mesh;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ValidationError {
    #[error("mesh is not edge-manifold: edge {edge} has {degree} incident faces")]
    NotEdgeManifold { edge: usize, degree: usize },
}

/// Outcome of a check with the ids of offending elements in ascending order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub passed: bool,
    pub offenders: Vec<usize>,
}

impl Check {
    fn from_offenders(offenders: Vec<usize>) -> Self {
        Self {
            passed: offenders.is_empty(),
            offenders,
        }
    }
}

/// Result of propagating face orientations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Orientation {
    pub orientable: bool,
    /// First edge found traversed in the same direction by both of its faces.
    pub witness: Option<usize>,
    /// Per face: whether its winding must be reversed to agree with the
    /// lowest-id face of its component. Only meaningful when orientable.
    pub flipped: Vec<bool>,
}

/// A boundary vertex with more than two incident boundary edges.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BowtieVertex {
    pub vertex: usize,
    pub boundary_edges: usize,
    pub acceptable: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub edge_manifold: Check,
    pub vertex_links_connected: Check,
    /// Faces visiting some vertex more than once.
    pub faces_simple: Check,
    pub orientable: bool,
    pub orientation_witness: Option<usize>,
    /// False when orientability was computed on a mesh that is not edge-manifold.
    pub orientation_reliable: bool,
    pub watertight: bool,
    pub boundary_bowtie_vertices: Vec<BowtieVertex>,
    pub isolated_vertices: Vec<usize>,
}

impl ValidationReport {
    pub fn is_manifold(&self) -> bool {
        self.edge_manifold.passed && self.vertex_links_connected.passed
    }
}

/// Every edge has one or two incident faces.
pub fn check_edge_manifold(mesh: &Mesh) -> Check {
    Check::from_offenders(
        mesh.edges()
            .iter()
            .enumerate()
            .filter(|(_, e)| !(1..=2).contains(&e.degree()))
            .map(|(id, _)| id)
            .collect(),
    )
}

/// The edges around each vertex form a single class under "share a face
/// corner", closed transitively. Isolated vertices pass.
pub fn check_vertex_links(mesh: &Mesh) -> Check {
    Check::from_offenders(
        (0..mesh.vertex_count())
            .filter(|&v| mesh.vertex_wedges(v, |_| false).len() > 1)
            .collect(),
    )
}

/// No edge with a single incident face.
pub fn check_watertight(mesh: &Mesh) -> bool {
    mesh.edges().iter().all(|e| !e.is_boundary())
}

/// Faces that are not simple cycles because they visit a vertex twice.
pub fn check_faces_simple(mesh: &Mesh) -> Check {
    Check::from_offenders(
        mesh.faces()
            .iter()
            .enumerate()
            .filter(|(_, face)| {
                let mut sorted = face.to_vec();
                sorted.sort_unstable();
                sorted.windows(2).any(|w| w[0] == w[1])
            })
            .map(|(f, _)| f)
            .collect(),
    )
}

pub fn isolated_vertices(mesh: &Mesh) -> Vec<usize> {
    (0..mesh.vertex_count())
        .filter(|&v| mesh.vertex_edges(v).is_empty())
        .collect()
}

/// Assigns orientations face by face, breadth first from the lowest-id
/// unvisited face, visiting neighbours in side order. Fails on an
/// edge-non-manifold mesh.
pub fn check_orientable(mesh: &Mesh) -> Result<Orientation, ValidationError> {
    if let Some((edge, e)) = mesh
        .edges()
        .iter()
        .enumerate()
        .find(|(_, e)| e.degree() > 2)
    {
        return Err(ValidationError::NotEdgeManifold {
            edge,
            degree: e.degree(),
        });
    }
    Ok(propagate_orientation(mesh))
}

fn propagate_orientation(mesh: &Mesh) -> Orientation {
    propagate_from(mesh, 0..mesh.face_count())
}

/// First orientation conflict within the face component of `start_face`.
pub(crate) fn orientation_conflict_from(mesh: &Mesh, start_face: usize) -> Option<usize> {
    propagate_from(mesh, [start_face]).witness
}

fn propagate_from(mesh: &Mesh, starts: impl IntoIterator<Item = usize>) -> Orientation {
    let faces = mesh.face_count();
    let mut flipped = vec![false; faces];
    let mut visited = vec![false; faces];
    let mut queue = VecDeque::new();

    for start in starts {
        if visited[start] {
            continue;
        }
        visited[start] = true;
        queue.push_back(start);
        while let Some(f) = queue.pop_front() {
            for (side, &e) in mesh.face_edges(f).iter().enumerate() {
                let here = crate::mesh::FaceSide { face: f, side };
                let (a, _) = mesh.side_vertices(here);
                for &other in mesh.edge(e).sides() {
                    if other == here {
                        continue;
                    }
                    let g = other.face;
                    let same_direction = mesh.side_vertices(other).0 == a;
                    if !visited[g] {
                        visited[g] = true;
                        flipped[g] = flipped[f] ^ same_direction;
                        queue.push_back(g);
                    } else if same_direction ^ (flipped[f] != flipped[g]) {
                        return Orientation {
                            orientable: false,
                            witness: Some(e),
                            flipped,
                        };
                    }
                }
            }
        }
    }
    Orientation {
        orientable: true,
        witness: None,
        flipped,
    }
}

/// Classifies vertices with more than two incident boundary edges. Such a
/// vertex is acceptable when every wedge of faces around it contributes
/// exactly two boundary edges, so closing the holes would make it manifold.
pub fn classify_boundary_vertices(mesh: &Mesh) -> Vec<BowtieVertex> {
    let mut out = Vec::new();
    for v in 0..mesh.vertex_count() {
        let boundary_edges = mesh
            .vertex_edges(v)
            .iter()
            .filter(|&&e| mesh.edge(e).is_boundary())
            .count();
        if boundary_edges <= 2 {
            continue;
        }
        let non_manifold_edge = mesh
            .vertex_edges(v)
            .iter()
            .any(|&e| mesh.edge(e).degree() > 2);
        let acceptable = !non_manifold_edge
            && wedge_boundary_edges(mesh, v)
                .iter()
                .all(|edges| edges.len() == 2);
        out.push(BowtieVertex {
            vertex: v,
            boundary_edges,
            acceptable,
        });
    }
    out
}

/// For every wedge around `v`, the boundary edges incident on `v` inside it.
pub(crate) fn wedge_boundary_edges(mesh: &Mesh, v: usize) -> Vec<Vec<usize>> {
    mesh.vertex_wedges(v, |_| false)
        .into_iter()
        .map(|wedge| {
            let mut edges: Vec<usize> = wedge
                .iter()
                .flat_map(|&c| mesh.corner_edges(c))
                .filter(|&e| mesh.edge(e).is_boundary())
                .collect();
            edges.sort_unstable();
            edges.dedup();
            edges
        })
        .collect()
}

/// Runs every check. Orientability is always answered; on a mesh that is not
/// edge-manifold the answer is flagged unreliable.
pub fn validate(mesh: &Mesh) -> ValidationReport {
    let edge_manifold = check_edge_manifold(mesh);
    let orientation = propagate_orientation(mesh);
    ValidationReport {
        vertex_links_connected: check_vertex_links(mesh),
        faces_simple: check_faces_simple(mesh),
        orientable: orientation.orientable,
        orientation_witness: orientation.witness,
        orientation_reliable: edge_manifold.passed,
        edge_manifold,
        watertight: check_watertight(mesh),
        boundary_bowtie_vertices: classify_boundary_vertices(mesh),
        isolated_vertices: isolated_vertices(mesh),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tet() -> Mesh {
        Mesh::new(
            4,
            vec![vec![0, 1, 2], vec![0, 3, 1], vec![0, 2, 3], vec![1, 3, 2]],
            None,
        )
        .unwrap()
    }

    #[test]
    fn tetrahedron_passes_everything() {
        let r = validate(&tet());
        assert!(r.is_manifold());
        assert!(r.orientable && r.watertight && r.faces_simple.passed);
        assert!(r.boundary_bowtie_vertices.is_empty());
        assert!(r.isolated_vertices.is_empty());
    }

    #[test]
    fn three_triangles_on_one_edge() {
        let m = Mesh::new(5, vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 1, 4]], None).unwrap();
        let c = check_edge_manifold(&m);
        assert!(!c.passed);
        assert_eq!(c.offenders, vec![0]);
        assert!(matches!(
            check_orientable(&m),
            Err(ValidationError::NotEdgeManifold { edge: 0, degree: 3 })
        ));
        let r = validate(&m);
        assert!(!r.orientation_reliable);
    }

    #[test]
    fn two_boxes_sharing_an_edge() {
        // unit cubes [0,1]^3 and [1,2]x[1,2]x[0,1] touch along the z-edge at (1,1)
        let cube = |o: usize| -> Vec<Vec<usize>> {
            vec![
                vec![o, o + 2, o + 3, o + 1],
                vec![o + 4, o + 5, o + 7, o + 6],
                vec![o, o + 1, o + 5, o + 4],
                vec![o + 2, o + 6, o + 7, o + 3],
                vec![o, o + 4, o + 6, o + 2],
                vec![o + 1, o + 3, o + 7, o + 5],
            ]
        };
        // second cube reuses the shared corners: its vertex 0 is the first cube's 3, its 4 is 7
        let mut faces = cube(0);
        let remap = |v: usize| match v {
            8 => 3,
            12 => 7,
            other => other,
        };
        faces.extend(
            cube(8)
                .into_iter()
                .map(|f| f.into_iter().map(remap).collect()),
        );
        let m = Mesh::new(16, faces, None).unwrap();
        let c = check_edge_manifold(&m);
        assert_eq!(c.offenders, vec![m.edge_between(3, 7).unwrap()]);
    }

    #[test]
    fn two_tets_joined_at_a_tip() {
        let mut faces = vec![vec![0, 1, 2], vec![0, 3, 1], vec![0, 2, 3], vec![1, 3, 2]];
        faces.extend([vec![0, 5, 4], vec![0, 4, 6], vec![0, 6, 5], vec![4, 5, 6]]);
        let m = Mesh::new(7, faces, None).unwrap();
        let c = check_vertex_links(&m);
        assert_eq!(c.offenders, vec![0]);
        assert!(check_edge_manifold(&m).passed);
    }

    #[test]
    fn fig2_links_are_connected() {
        let m = Mesh::new(5, vec![vec![0, 1, 2, 3], vec![1, 4, 2]], None).unwrap();
        assert!(check_vertex_links(&m).passed);
        let single = Mesh::new(3, vec![vec![0, 1, 2]], None).unwrap();
        assert!(check_vertex_links(&single).passed);
    }

    #[test]
    fn inconsistent_winding_is_fixable() {
        // second triangle wound the same way along the shared edge: still orientable
        let m = Mesh::new(4, vec![vec![0, 1, 2], vec![0, 1, 3]], None).unwrap();
        let o = check_orientable(&m).unwrap();
        assert!(o.orientable);
        assert_eq!(o.flipped, vec![false, true]);
    }

    #[test]
    fn open_cube_is_not_watertight() {
        let m = Mesh::new(
            8,
            vec![
                vec![0, 2, 3, 1],
                vec![4, 5, 7, 6],
                vec![0, 1, 5, 4],
                vec![2, 6, 7, 3],
                vec![0, 4, 6, 2],
            ],
            None,
        )
        .unwrap();
        assert!(!check_watertight(&m));
        assert!(check_watertight(&tet()));
    }

    #[test]
    fn bowtie_of_two_triangles_is_acceptable() {
        let m = Mesh::new(5, vec![vec![0, 1, 2], vec![0, 3, 4]], None).unwrap();
        assert_eq!(
            classify_boundary_vertices(&m),
            vec![BowtieVertex {
                vertex: 0,
                boundary_edges: 4,
                acceptable: true
            }]
        );
        let r = validate(&m);
        assert!(!r.vertex_links_connected.passed);
    }

    #[test]
    fn disc_interior_vertex_is_not_listed() {
        // fan of four triangles around vertex 0
        let m = Mesh::new(
            5,
            vec![vec![0, 1, 2], vec![0, 2, 3], vec![0, 3, 4], vec![0, 4, 1]],
            None,
        )
        .unwrap();
        assert!(classify_boundary_vertices(&m).is_empty());
    }

    #[test]
    fn odd_boundary_count_is_unacceptable() {
        let m = Mesh::new(5, vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 1, 4]], None).unwrap();
        let c = classify_boundary_vertices(&m);
        assert_eq!(c.len(), 2);
        assert!(c.iter().all(|b| b.boundary_edges == 3 && !b.acceptable));
    }

    #[test]
    fn closed_cone_plus_fan_is_unacceptable() {
        // closed tetrahedron at vertex 0 plus a dangling triangle touching 0
        let m = Mesh::new(
            6,
            vec![
                vec![0, 1, 2],
                vec![0, 3, 1],
                vec![0, 2, 3],
                vec![1, 3, 2],
                vec![0, 4, 5],
            ],
            None,
        )
        .unwrap();
        assert!(classify_boundary_vertices(&m).is_empty());
        // with a second dangling triangle the vertex has four boundary edges,
        // but the tetrahedron wedge contributes none
        let m = Mesh::new(
            8,
            vec![
                vec![0, 1, 2],
                vec![0, 3, 1],
                vec![0, 2, 3],
                vec![1, 3, 2],
                vec![0, 4, 5],
                vec![0, 6, 7],
            ],
            None,
        )
        .unwrap();
        let c = classify_boundary_vertices(&m);
        assert_eq!(c.len(), 1);
        assert!(!c[0].acceptable);
    }

    #[test]
    fn multiple_incidence_face_is_flagged() {
        let m = Mesh::new(5, vec![vec![0, 1, 2, 0, 3, 4]], None).unwrap();
        assert_eq!(check_faces_simple(&m).offenders, vec![0]);
    }

    #[test]
    fn isolated_vertex_is_a_warning() {
        let m = Mesh::new(4, vec![vec![0, 1, 2]], None).unwrap();
        let r = validate(&m);
        assert_eq!(r.isolated_vertices, vec![3]);
        assert!(r.is_manifold());
    }
}
