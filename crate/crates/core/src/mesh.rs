//! Indexed polygon meshes with a derived edge table.
//!
//! A [`Mesh`] is built from a vertex count and a list of faces, each face a
//! cyclic list of vertex indices. Edges are not supplied by the caller: every
//! face side `(f[i], f[i + 1])` is identified with the edge keyed by its
//! unordered vertex pair. Edge ids are handed out in first-occurrence order
//! (faces in order, sides in order), so two meshes built from the same face
//! list always agree on edge numbering.
//!
//! On top of the tables the mesh provides the boundary operator `∂`, the
//! coboundary `δ_X(ε)` and the cycle predicates over homogeneous
//! [`ElementSet`]s.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::union_find::UnionFind;

/// Dimension of a mesh element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dim {
    Vertex,
    Edge,
    Face,
}

impl Dim {
    pub fn rank(self) -> u8 {
        match self {
            Dim::Vertex => 0,
            Dim::Edge => 1,
            Dim::Face => 2,
        }
    }

    /// The dimension of this element's boundary, `None` for vertices.
    pub fn below(self) -> Option<Dim> {
        match self {
            Dim::Vertex => None,
            Dim::Edge => Some(Dim::Vertex),
            Dim::Face => Some(Dim::Edge),
        }
    }
}

impl fmt::Display for Dim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Dim::Vertex => "vertex",
            Dim::Edge => "edge",
            Dim::Face => "face",
        };
        f.write_str(name)
    }
}

/// A single vertex, edge or face of a mesh.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ElementRef {
    pub dim: Dim,
    pub id: usize,
}

impl ElementRef {
    pub fn vertex(id: usize) -> Self {
        Self {
            dim: Dim::Vertex,
            id,
        }
    }

    pub fn edge(id: usize) -> Self {
        Self { dim: Dim::Edge, id }
    }

    pub fn face(id: usize) -> Self {
        Self { dim: Dim::Face, id }
    }
}

impl fmt::Display for ElementRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.dim, self.id)
    }
}

/// A duplicate-free set of elements sharing one dimension.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ElementSet {
    dim: Dim,
    members: BTreeSet<usize>,
}

impl ElementSet {
    pub fn new(dim: Dim) -> Self {
        Self {
            dim,
            members: BTreeSet::new(),
        }
    }

    pub fn from_ids(dim: Dim, ids: impl IntoIterator<Item = usize>) -> Self {
        Self {
            dim,
            members: ids.into_iter().collect(),
        }
    }

    pub fn vertices(ids: impl IntoIterator<Item = usize>) -> Self {
        Self::from_ids(Dim::Vertex, ids)
    }

    pub fn edges(ids: impl IntoIterator<Item = usize>) -> Self {
        Self::from_ids(Dim::Edge, ids)
    }

    pub fn faces(ids: impl IntoIterator<Item = usize>) -> Self {
        Self::from_ids(Dim::Face, ids)
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, id: usize) -> bool {
        self.members.contains(&id)
    }

    /// Returns `true` if `id` was not already present.
    pub fn insert(&mut self, id: usize) -> bool {
        self.members.insert(id)
    }

    pub fn extend(&mut self, ids: impl IntoIterator<Item = usize>) {
        self.members.extend(ids);
    }

    /// Members in ascending id order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().copied()
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }
}

/// One side of a face: side `side` runs from corner `side` to corner `side + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FaceSide {
    pub face: usize,
    pub side: usize,
}

/// An occurrence of a vertex in a face: `faces[face][position]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Corner {
    pub face: usize,
    pub position: usize,
}

/// Derived edge record.
#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    vertices: [usize; 2],
    sides: Vec<FaceSide>,
}

impl Edge {
    /// Endpoints, smaller index first.
    pub fn vertices(&self) -> [usize; 2] {
        self.vertices
    }

    /// Face sides identified with this edge, in first-occurrence order.
    pub fn sides(&self) -> &[FaceSide] {
        &self.sides
    }

    /// Number of incident face sides.
    pub fn degree(&self) -> usize {
        self.sides.len()
    }

    pub fn is_boundary(&self) -> bool {
        self.sides.len() == 1
    }

    /// The endpoint opposite to `v`.
    pub fn opposite(&self, v: usize) -> usize {
        if self.vertices[0] == v {
            self.vertices[1]
        } else {
            self.vertices[0]
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MeshError {
    #[error("face {face} references vertex {index} but the mesh has {vertex_count} vertices")]
    IndexOutOfRange {
        face: usize,
        index: usize,
        vertex_count: usize,
    },
    #[error("face {face} repeats vertex {vertex} on consecutive corners")]
    SelfLoopEdge { face: usize, vertex: usize },
    #[error("face {face} has {len} corners, at least 3 are required")]
    DegenerateFace { face: usize, len: usize },
    #[error("{positions} positions given for {vertex_count} vertices")]
    PositionCountMismatch {
        positions: usize,
        vertex_count: usize,
    },
    #[error("{0} does not exist in this mesh")]
    InvalidElement(ElementRef),
    #[error("expected a {expected} element, found a {found} element")]
    DimensionMismatch { expected: Dim, found: Dim },
    #[error("{0} elements have no boundary elements to take a coboundary from")]
    NoLowerDimension(Dim),
}

/// An immutable polygonal mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    vertex_count: usize,
    faces: Vec<Vec<usize>>,
    positions: Option<Vec<[f64; 3]>>,
    edges: Vec<Edge>,
    face_edges: Vec<Vec<usize>>,
    vertex_edges: Vec<Vec<usize>>,
    vertex_corners: Vec<Vec<Corner>>,
}

impl Mesh {
    /// Builds a mesh, deriving the edge table from the face sides.
    pub fn new(
        vertex_count: usize,
        faces: Vec<Vec<usize>>,
        positions: Option<Vec<[f64; 3]>>,
    ) -> Result<Self, MeshError> {
        Self::build(vertex_count, faces, positions, None)
    }

    /// Like [`Mesh::new`], but face sides only share an edge when both their
    /// vertex pair and their label agree. Used by cutting, where the two sides
    /// of a slit keep the same endpoints yet must stay distinct edges.
    pub(crate) fn with_side_labels(
        vertex_count: usize,
        faces: Vec<Vec<usize>>,
        positions: Option<Vec<[f64; 3]>>,
        labels: &[Vec<u32>],
    ) -> Result<Self, MeshError> {
        Self::build(vertex_count, faces, positions, Some(labels))
    }

    fn build(
        vertex_count: usize,
        faces: Vec<Vec<usize>>,
        positions: Option<Vec<[f64; 3]>>,
        labels: Option<&[Vec<u32>]>,
    ) -> Result<Self, MeshError> {
        if let Some(p) = &positions {
            if p.len() != vertex_count {
                return Err(MeshError::PositionCountMismatch {
                    positions: p.len(),
                    vertex_count,
                });
            }
        }
        for (f, face) in faces.iter().enumerate() {
            if face.len() < 3 {
                return Err(MeshError::DegenerateFace {
                    face: f,
                    len: face.len(),
                });
            }
            if let Some(&index) = face.iter().find(|&&v| v >= vertex_count) {
                return Err(MeshError::IndexOutOfRange {
                    face: f,
                    index,
                    vertex_count,
                });
            }
            for i in 0..face.len() {
                if face[i] == face[(i + 1) % face.len()] {
                    return Err(MeshError::SelfLoopEdge {
                        face: f,
                        vertex: face[i],
                    });
                }
            }
        }

        let mut lookup: HashMap<(usize, usize, u32), usize> = HashMap::new();
        let mut edges: Vec<Edge> = Vec::new();
        let mut face_edges = Vec::with_capacity(faces.len());
        let mut vertex_edges = vec![Vec::new(); vertex_count];
        let mut vertex_corners = vec![Vec::new(); vertex_count];

        for (f, face) in faces.iter().enumerate() {
            let n = face.len();
            let mut sides = Vec::with_capacity(n);
            for i in 0..n {
                let (a, b) = (face[i], face[(i + 1) % n]);
                let pair = if a < b { (a, b) } else { (b, a) };
                let label = labels.map_or(0, |l| l[f][i]);
                let id = *lookup.entry((pair.0, pair.1, label)).or_insert_with(|| {
                    edges.push(Edge {
                        vertices: [pair.0, pair.1],
                        sides: Vec::new(),
                    });
                    vertex_edges[pair.0].push(edges.len() - 1);
                    vertex_edges[pair.1].push(edges.len() - 1);
                    edges.len() - 1
                });
                edges[id].sides.push(FaceSide { face: f, side: i });
                sides.push(id);
                vertex_corners[a].push(Corner {
                    face: f,
                    position: i,
                });
            }
            face_edges.push(sides);
        }

        Ok(Self {
            vertex_count,
            faces,
            positions,
            edges,
            face_edges,
            vertex_edges,
            vertex_corners,
        })
    }

    pub fn empty() -> Self {
        Self::new(0, Vec::new(), None).expect("empty mesh is valid")
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    /// `V - E + F`.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count as i64 - self.edges.len() as i64 + self.faces.len() as i64
    }

    pub fn faces(&self) -> &[Vec<usize>] {
        &self.faces
    }

    pub fn face(&self, f: usize) -> &[usize] {
        &self.faces[f]
    }

    pub fn positions(&self) -> Option<&[[f64; 3]]> {
        self.positions.as_deref()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> &Edge {
        &self.edges[e]
    }

    /// Edge id of every side of face `f`, in side order.
    pub fn face_edges(&self, f: usize) -> &[usize] {
        &self.face_edges[f]
    }

    /// Edges incident on `v` in ascending id order.
    pub fn vertex_edges(&self, v: usize) -> &[usize] {
        &self.vertex_edges[v]
    }

    /// Corners at `v` in (face, position) order.
    pub fn vertex_corners(&self, v: usize) -> &[Corner] {
        &self.vertex_corners[v]
    }

    /// Directed vertex pair of a face side, following the face's winding.
    pub fn side_vertices(&self, side: FaceSide) -> (usize, usize) {
        let face = &self.faces[side.face];
        (face[side.side], face[(side.side + 1) % face.len()])
    }

    /// The lowest-id edge joining `u` and `v`, if any.
    pub fn edge_between(&self, u: usize, v: usize) -> Option<usize> {
        self.vertex_edges
            .get(u)?
            .iter()
            .copied()
            .find(|&e| self.edges[e].opposite(u) == v)
    }

    /// Edges at `corner`: the side entering the corner and the side leaving it.
    pub fn corner_edges(&self, corner: Corner) -> [usize; 2] {
        let n = self.faces[corner.face].len();
        let sides = &self.face_edges[corner.face];
        [sides[(corner.position + n - 1) % n], sides[corner.position]]
    }

    /// Groups the corners at `v` into wedges: corners sharing an incident
    /// edge belong to the same wedge unless `separates(edge)` holds.
    /// Wedges are ordered by their first corner.
    pub(crate) fn vertex_wedges(
        &self,
        v: usize,
        separates: impl Fn(usize) -> bool,
    ) -> Vec<Vec<Corner>> {
        let corners = &self.vertex_corners[v];
        let mut uf = UnionFind::new(corners.len());
        let mut first_corner_on_edge: HashMap<usize, usize> = HashMap::new();
        for (k, &corner) in corners.iter().enumerate() {
            for e in self.corner_edges(corner) {
                if separates(e) {
                    continue;
                }
                match first_corner_on_edge.get(&e) {
                    Some(&other) => {
                        uf.union(other, k);
                    }
                    None => {
                        first_corner_on_edge.insert(e, k);
                    }
                }
            }
        }
        let mut groups: BTreeMap<usize, Vec<Corner>> = BTreeMap::new();
        let mut root_to_first: HashMap<usize, usize> = HashMap::new();
        for (k, &corner) in corners.iter().enumerate() {
            let root = uf.find(k);
            let first = *root_to_first.entry(root).or_insert(k);
            groups.entry(first).or_default().push(corner);
        }
        groups.into_values().collect()
    }

    fn check(&self, e: ElementRef) -> Result<(), MeshError> {
        let count = match e.dim {
            Dim::Vertex => self.vertex_count,
            Dim::Edge => self.edges.len(),
            Dim::Face => self.faces.len(),
        };
        if e.id < count {
            Ok(())
        } else {
            Err(MeshError::InvalidElement(e))
        }
    }

    fn check_set(&self, x: &ElementSet) -> Result<(), MeshError> {
        match x.members.last() {
            Some(&id) => self.check(ElementRef { dim: x.dim, id }),
            None => Ok(()),
        }
    }

    /// `∂e`: the edges of a face, the endpoints of an edge, nothing for a vertex.
    pub fn boundary(&self, e: ElementRef) -> Result<ElementSet, MeshError> {
        self.check(e)?;
        Ok(match e.dim {
            Dim::Vertex => ElementSet::new(Dim::Vertex),
            Dim::Edge => ElementSet::vertices(self.edges[e.id].vertices),
            Dim::Face => ElementSet::edges(self.face_edges[e.id].iter().copied()),
        })
    }

    /// `δ_X(ε)`: members of `x` whose boundary contains `eps`.
    pub fn coboundary(&self, x: &ElementSet, eps: ElementRef) -> Result<ElementSet, MeshError> {
        if x.is_empty() {
            return Ok(ElementSet::new(x.dim));
        }
        let expected = x.dim.below().ok_or(MeshError::NoLowerDimension(x.dim))?;
        if eps.dim != expected {
            return Err(MeshError::DimensionMismatch {
                expected,
                found: eps.dim,
            });
        }
        self.check(eps)?;
        self.check_set(x)?;
        let mut out = ElementSet::new(x.dim);
        for id in x.iter() {
            if self
                .boundary(ElementRef { dim: x.dim, id })?
                .contains(eps.id)
            {
                out.insert(id);
            }
        }
        Ok(out)
    }

    /// How many members of `x` have each lower-dimensional element in their boundary.
    fn incidence_counts(&self, x: &ElementSet) -> Result<BTreeMap<usize, usize>, MeshError> {
        self.check_set(x)?;
        let mut counts = BTreeMap::new();
        for id in x.iter() {
            for b in self.boundary(ElementRef { dim: x.dim, id })?.iter() {
                *counts.entry(b).or_insert(0) += 1;
            }
        }
        Ok(counts)
    }

    /// `∂X`: boundary elements of members of `x` that are incident on exactly
    /// one member. Empty for vertex sets.
    pub fn boundary_of_set(&self, x: &ElementSet) -> Result<ElementSet, MeshError> {
        let Some(below) = x.dim.below() else {
            self.check_set(x)?;
            return Ok(ElementSet::new(Dim::Vertex));
        };
        let counts = self.incidence_counts(x)?;
        Ok(ElementSet::from_ids(
            below,
            counts.into_iter().filter(|&(_, c)| c == 1).map(|(b, _)| b),
        ))
    }

    /// A set is a cycle when its boundary is empty. Vertex sets always are.
    pub fn is_cycle(&self, x: &ElementSet) -> Result<bool, MeshError> {
        Ok(self.boundary_of_set(x)?.is_empty())
    }

    /// Connected, and every boundary element of a member is shared by exactly
    /// two members. Vertex sets are never simple cycles.
    pub fn is_simple_cycle(&self, x: &ElementSet) -> Result<bool, MeshError> {
        if x.dim == Dim::Vertex || x.is_empty() {
            self.check_set(x)?;
            return Ok(false);
        }
        let counts = self.incidence_counts(x)?;
        if counts.values().any(|&c| c != 2) {
            return Ok(false);
        }
        let members = x.to_vec();
        let mut uf = UnionFind::new(members.len());
        let mut owner: HashMap<usize, usize> = HashMap::new();
        for (k, &id) in members.iter().enumerate() {
            for b in self.boundary(ElementRef { dim: x.dim, id })?.iter() {
                if let Some(&other) = owner.get(&b) {
                    uf.union(other, k);
                } else {
                    owner.insert(b, k);
                }
            }
        }
        Ok(uf.set_count() == 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig2() -> Mesh {
        Mesh::new(5, vec![vec![0, 1, 2, 3], vec![1, 4, 2]], None).unwrap()
    }

    #[test]
    fn fig2_counts_and_edge_order() {
        let m = fig2();
        assert_eq!(
            (m.vertex_count(), m.edge_count(), m.face_count()),
            (5, 6, 2)
        );
        let pairs: Vec<_> = m.edges().iter().map(|e| e.vertices()).collect();
        assert_eq!(pairs, vec![[0, 1], [1, 2], [2, 3], [0, 3], [1, 4], [2, 4]]);
        assert_eq!(m.face_edges(1), &[4, 5, 1]);
    }

    #[test]
    fn empty_mesh() {
        let m = Mesh::empty();
        assert_eq!(
            (m.vertex_count(), m.edge_count(), m.face_count()),
            (0, 0, 0)
        );
    }

    #[test]
    fn build_errors() {
        assert_eq!(
            Mesh::new(3, vec![vec![0, 1, 3]], None).unwrap_err(),
            MeshError::IndexOutOfRange {
                face: 0,
                index: 3,
                vertex_count: 3
            }
        );
        assert_eq!(
            Mesh::new(3, vec![vec![0, 1, 1, 2]], None).unwrap_err(),
            MeshError::SelfLoopEdge { face: 0, vertex: 1 }
        );
        assert_eq!(
            Mesh::new(3, vec![vec![2, 1, 0, 2]], None).unwrap_err(),
            MeshError::SelfLoopEdge { face: 0, vertex: 2 }
        );
        assert_eq!(
            Mesh::new(3, vec![vec![0, 1]], None).unwrap_err(),
            MeshError::DegenerateFace { face: 0, len: 2 }
        );
        assert_eq!(
            Mesh::new(3, vec![vec![0, 1, 2]], Some(vec![[0.0; 3]; 2])).unwrap_err(),
            MeshError::PositionCountMismatch {
                positions: 2,
                vertex_count: 3
            }
        );
    }

    #[test]
    fn multiple_incidence_is_accepted() {
        // vertex 0 appears twice, not consecutively
        let m = Mesh::new(5, vec![vec![0, 1, 2, 0, 3, 4]], None).unwrap();
        assert_eq!(m.vertex_corners(0).len(), 2);
    }

    #[test]
    fn boundary_of_elements() {
        let m = fig2();
        assert_eq!(
            m.boundary(ElementRef::face(0)).unwrap(),
            ElementSet::edges([0, 1, 2, 3])
        );
        assert_eq!(
            m.boundary(ElementRef::edge(0)).unwrap(),
            ElementSet::vertices([0, 1])
        );
        assert!(m.boundary(ElementRef::vertex(3)).unwrap().is_empty());
        assert!(matches!(
            m.boundary(ElementRef::face(2)),
            Err(MeshError::InvalidElement(_))
        ));
    }

    #[test]
    fn coboundary_examples() {
        let m = fig2();
        let both = ElementSet::faces([0, 1]);
        assert_eq!(
            m.coboundary(&both, ElementRef::edge(1)).unwrap(),
            ElementSet::faces([0, 1])
        );
        assert_eq!(
            m.coboundary(&both, ElementRef::edge(0)).unwrap(),
            ElementSet::faces([0])
        );
        assert!(m
            .coboundary(&ElementSet::new(Dim::Face), ElementRef::vertex(0))
            .unwrap()
            .is_empty());
        assert!(matches!(
            m.coboundary(&both, ElementRef::vertex(0)),
            Err(MeshError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn boundary_of_set_examples() {
        let m = fig2();
        assert_eq!(
            m.boundary_of_set(&ElementSet::faces([0, 1])).unwrap(),
            ElementSet::edges([0, 2, 3, 4, 5])
        );
        assert_eq!(
            m.boundary_of_set(&ElementSet::edges([0])).unwrap(),
            ElementSet::vertices([0, 1])
        );
        assert!(m
            .boundary_of_set(&ElementSet::vertices([0, 1, 2]))
            .unwrap()
            .is_empty());
    }

    #[test]
    fn cycle_predicates() {
        let m = fig2();
        assert!(m.is_cycle(&ElementSet::vertices([0, 4])).unwrap());
        assert!(!m.is_simple_cycle(&ElementSet::vertices([0])).unwrap());
        // the quad's boundary loop
        let quad = ElementSet::edges([0, 1, 2, 3]);
        assert!(m.is_cycle(&quad).unwrap());
        assert!(m.is_simple_cycle(&quad).unwrap());
        // outer boundary loop of both faces
        let outer = ElementSet::edges([0, 2, 3, 4, 5]);
        assert!(m.is_simple_cycle(&outer).unwrap());
        // open path
        assert!(!m.is_cycle(&ElementSet::edges([0, 1])).unwrap());
    }

    #[test]
    fn figure_eight_and_disjoint_loops_are_not_simple() {
        // two triangles sharing vertex 0, and a separate triangle
        let m = Mesh::new(8, vec![vec![0, 1, 2], vec![0, 3, 4], vec![5, 6, 7]], None).unwrap();
        let tri = |f: usize| m.boundary(ElementRef::face(f)).unwrap();
        let mut eight = tri(0);
        eight.extend(tri(1).iter());
        assert!(m.is_cycle(&eight).unwrap());
        assert!(!m.is_simple_cycle(&eight).unwrap());

        let mut apart = tri(0);
        apart.extend(tri(2).iter());
        assert!(m.is_cycle(&apart).unwrap());
        assert!(!m.is_simple_cycle(&apart).unwrap());
    }

    #[test]
    fn wedges_split_at_pinch() {
        let m = Mesh::new(5, vec![vec![0, 1, 2], vec![0, 3, 4]], None).unwrap();
        assert_eq!(m.vertex_wedges(0, |_| false).len(), 2);
        assert_eq!(m.vertex_wedges(1, |_| false).len(), 1);
    }
}
