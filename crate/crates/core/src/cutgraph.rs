//! Tree–cotree cut graphs.
//!
//! A shortest-path tree spans the vertices from a root; a co-tree spans the
//! faces through dual edges that avoid the tree. On a closed, connected,
//! orientable mesh exactly `2g` edges are left over. Each of them closes a
//! loop with the tree, and cutting along the union of those loops (joined
//! to the root through the tree) opens the surface into a topological disc.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

use thiserror::Error;

use crate::mesh::{Corner, ElementSet, FaceSide, Mesh, MeshError};
use crate::topology;
use crate::validation;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CutGraphError {
    #[error("vertex {0} does not exist")]
    InvalidRoot(usize),
    #[error("face {0} does not exist")]
    InvalidFace(usize),
    #[error("edge {0} does not exist")]
    InvalidEdge(usize),
    #[error("mesh is not closed: edge {edge} lies on the boundary")]
    MeshNotClosed { edge: usize },
    #[error("mesh is not edge-manifold: edge {edge} has {degree} incident faces")]
    MeshNotManifold { edge: usize, degree: usize },
    #[error("mesh is not orientable: edge {edge} is traversed the same way by both faces")]
    MeshNotOrientable { edge: usize },
    #[error("edge {0} belongs to the shortest-path tree and does not close a loop")]
    TreeEdge(usize),
    #[error("edge {0} is not reachable from the tree root")]
    Unreachable(usize),
    #[error("cut edge {0} lies on the mesh boundary")]
    CutEdgeOnBoundary(usize),
    #[error("empty cut on a surface of genus {0} would not produce a disc")]
    EmptyCutOnPositiveGenus(u64),
    #[error(transparent)]
    Mesh(#[from] MeshError),
}

/// Shortest-path tree over the vertices of the root's component.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexTree {
    pub root: usize,
    /// Edge to the parent, `None` for the root and unreachable vertices.
    pub parent_edge: Vec<Option<usize>>,
    /// Path length from the root, `None` when unreachable.
    pub distance: Vec<Option<f64>>,
    /// Number of tree edges between the vertex and the root.
    pub depth: Vec<usize>,
}

impl VertexTree {
    pub fn edges(&self) -> ElementSet {
        ElementSet::edges(self.parent_edge.iter().flatten().copied())
    }

    pub fn contains_edge(&self, mesh: &Mesh, e: usize) -> bool {
        let [a, b] = mesh.edge(e).vertices();
        self.parent_edge[a] == Some(e) || self.parent_edge[b] == Some(e)
    }

    pub fn reaches(&self, v: usize) -> bool {
        self.distance[v].is_some()
    }

    fn parent(&self, mesh: &Mesh, v: usize) -> Option<(usize, usize)> {
        self.parent_edge[v].map(|e| (e, mesh.edge(e).opposite(v)))
    }

    /// Tree edges from `v` up to the root.
    pub fn path_to_root(&self, mesh: &Mesh, mut v: usize) -> Vec<usize> {
        let mut path = Vec::new();
        while let Some((e, p)) = self.parent(mesh, v) {
            path.push(e);
            v = p;
        }
        path
    }
}

/// Spanning tree of the faces whose dual edges avoid the vertex tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaceCoTree {
    pub root: usize,
    /// Shared edge with the parent face, `None` for the root and for faces
    /// outside the root's component.
    pub parent_edge: Vec<Option<usize>>,
}

impl FaceCoTree {
    pub fn edges(&self) -> ElementSet {
        ElementSet::edges(self.parent_edge.iter().flatten().copied())
    }
}

/// A closed edge walk closed by one instigator edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Loop {
    pub instigator: usize,
    /// Edges in walk order, ending with the instigator.
    pub edges: Vec<usize>,
    /// `vertices[i]` is where `edges[i]` starts.
    pub vertices: Vec<usize>,
    /// Where the two tree paths meet: the lowest common ancestor of the
    /// instigator's endpoints.
    pub apex: usize,
}

impl Loop {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn edge_set(&self) -> ElementSet {
        ElementSet::edges(self.edges.iter().copied())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CutGraph {
    pub root: usize,
    /// One loop per instigator edge, in ascending instigator order.
    pub loops: Vec<Loop>,
    /// Union of the loops and the tree paths joining each loop apex to the root.
    pub edges: ElementSet,
    /// For a sphere: the single edge to slit open. `None` otherwise.
    pub puncture_edge: Option<usize>,
    pub tree: VertexTree,
    pub cotree: FaceCoTree,
}

impl CutGraph {
    /// The edges to cut along to obtain a disc.
    pub fn cut_edges(&self) -> ElementSet {
        match self.puncture_edge {
            Some(e) => ElementSet::edges([e]),
            None => self.edges.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Frontier {
    distance: f64,
    vertex: usize,
}

impl Eq for Frontier {}

impl Ord for Frontier {
    // reversed for a min-heap on (distance, vertex)
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .distance
            .total_cmp(&self.distance)
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn edge_weight(mesh: &Mesh, e: usize) -> f64 {
    match mesh.positions() {
        Some(p) => {
            let [a, b] = mesh.edge(e).vertices();
            let d: f64 = (0..3).map(|k| (p[a][k] - p[b][k]).powi(2)).sum();
            d.sqrt()
        }
        None => 1.0,
    }
}

/// Dijkstra from `root`. Edge weights are Euclidean lengths when the mesh has
/// positions and 1 otherwise. Frontier entries pop by (distance, vertex id);
/// among equally short parent edges the lowest edge id wins.
pub fn shortest_path_tree(mesh: &Mesh, root: usize) -> Result<VertexTree, CutGraphError> {
    let n = mesh.vertex_count();
    if root >= n {
        return Err(CutGraphError::InvalidRoot(root));
    }
    let mut distance: Vec<Option<f64>> = vec![None; n];
    let mut parent_edge: Vec<Option<usize>> = vec![None; n];
    let mut depth = vec![0usize; n];
    let mut settled = vec![false; n];
    let mut heap = BinaryHeap::new();

    distance[root] = Some(0.0);
    heap.push(Frontier {
        distance: 0.0,
        vertex: root,
    });
    while let Some(Frontier {
        distance: d,
        vertex: u,
    }) = heap.pop()
    {
        if settled[u] {
            continue;
        }
        settled[u] = true;
        if let Some(e) = parent_edge[u] {
            depth[u] = depth[mesh.edge(e).opposite(u)] + 1;
        }
        for &e in mesh.vertex_edges(u) {
            let v = mesh.edge(e).opposite(u);
            if settled[v] {
                continue;
            }
            let candidate = d + edge_weight(mesh, e);
            let better = match distance[v] {
                None => true,
                Some(current) => {
                    candidate < current
                        || (candidate == current && parent_edge[v].is_some_and(|p| e < p))
                }
            };
            if better {
                distance[v] = Some(candidate);
                parent_edge[v] = Some(e);
                heap.push(Frontier {
                    distance: candidate,
                    vertex: v,
                });
            }
        }
    }
    Ok(VertexTree {
        root,
        parent_edge,
        distance,
        depth,
    })
}

/// Checks that every edge reachable from `start_face` through shared edges
/// has exactly two incident faces; returns the faces reached.
fn closed_manifold_component(mesh: &Mesh, start_face: usize) -> Result<Vec<bool>, CutGraphError> {
    let mut reached = vec![false; mesh.face_count()];
    let mut queue = VecDeque::from([start_face]);
    reached[start_face] = true;
    while let Some(f) = queue.pop_front() {
        for &e in mesh.face_edges(f) {
            let edge = mesh.edge(e);
            match edge.degree() {
                1 => return Err(CutGraphError::MeshNotClosed { edge: e }),
                2 => {}
                degree => return Err(CutGraphError::MeshNotManifold { edge: e, degree }),
            }
            for s in edge.sides() {
                if !reached[s.face] {
                    reached[s.face] = true;
                    queue.push_back(s.face);
                }
            }
        }
    }
    Ok(reached)
}

/// Breadth-first growth over the dual graph from `start_face`, crossing only
/// edges outside the vertex tree. Neighbours are visited in side order.
pub fn cotree(
    mesh: &Mesh,
    tree: &VertexTree,
    start_face: usize,
) -> Result<FaceCoTree, CutGraphError> {
    if start_face >= mesh.face_count() {
        return Err(CutGraphError::InvalidFace(start_face));
    }
    closed_manifold_component(mesh, start_face)?;

    let mut parent_edge = vec![None; mesh.face_count()];
    let mut visited = vec![false; mesh.face_count()];
    let mut queue = VecDeque::from([start_face]);
    visited[start_face] = true;
    while let Some(f) = queue.pop_front() {
        for (side, &e) in mesh.face_edges(f).iter().enumerate() {
            if tree.contains_edge(mesh, e) {
                continue;
            }
            let here = FaceSide { face: f, side };
            for &other in mesh.edge(e).sides() {
                if other == here || visited[other.face] {
                    continue;
                }
                visited[other.face] = true;
                parent_edge[other.face] = Some(e);
                queue.push_back(other.face);
            }
        }
    }
    Ok(FaceCoTree {
        root: start_face,
        parent_edge,
    })
}

/// Edges of the tree's component that are in neither the tree nor the co-tree.
pub fn instigator_edges(mesh: &Mesh, tree: &VertexTree, cotree: &FaceCoTree) -> ElementSet {
    let cotree_edges = cotree.edges();
    ElementSet::edges(
        (0..mesh.edge_count())
            .filter(|&e| {
                let [a, _] = mesh.edge(e).vertices();
                tree.reaches(a) && !tree.contains_edge(mesh, e) && !cotree_edges.contains(e)
            })
            .collect::<Vec<_>>(),
    )
}

/// Closes the loop of a non-tree edge: walk from both endpoints up the tree
/// until the paths meet, then close with the edge itself.
pub fn trace_loop(mesh: &Mesh, edge: usize, tree: &VertexTree) -> Result<Loop, CutGraphError> {
    if edge >= mesh.edge_count() {
        return Err(CutGraphError::InvalidEdge(edge));
    }
    if tree.contains_edge(mesh, edge) {
        return Err(CutGraphError::TreeEdge(edge));
    }
    let [u, w] = mesh.edge(edge).vertices();
    if !tree.reaches(u) || !tree.reaches(w) {
        return Err(CutGraphError::Unreachable(edge));
    }

    // climb the deeper side until both meet
    let (mut a, mut b) = (u, w);
    let mut up_from_u: Vec<(usize, usize)> = Vec::new();
    let mut up_from_w: Vec<(usize, usize)> = Vec::new();
    while a != b {
        if tree.depth[a] >= tree.depth[b] {
            let (e, p) = tree.parent(mesh, a).expect("non-root vertex has a parent");
            up_from_u.push((a, e));
            a = p;
        } else {
            let (e, p) = tree.parent(mesh, b).expect("non-root vertex has a parent");
            up_from_w.push((b, e));
            b = p;
        }
    }
    let apex = a;

    let mut edges = Vec::new();
    let mut vertices = Vec::new();
    for &(v, e) in &up_from_u {
        vertices.push(v);
        edges.push(e);
    }
    // down from the apex towards w
    let mut at = apex;
    for &(v, e) in up_from_w.iter().rev() {
        vertices.push(at);
        edges.push(e);
        at = v;
    }
    vertices.push(w);
    edges.push(edge);
    Ok(Loop {
        instigator: edge,
        edges,
        vertices,
        apex,
    })
}

/// Builds the cut graph of the component containing `root`. The component
/// must be closed, edge-manifold and orientable.
pub fn build_cut_graph(mesh: &Mesh, root: usize) -> Result<CutGraph, CutGraphError> {
    let tree = shortest_path_tree(mesh, root)?;
    let start_face = (0..mesh.face_count())
        .find(|&f| tree.reaches(mesh.face(f)[0]))
        .ok_or(CutGraphError::InvalidRoot(root))?;
    closed_manifold_component(mesh, start_face)?;
    if let Some(edge) = validation::orientation_conflict_from(mesh, start_face) {
        return Err(CutGraphError::MeshNotOrientable { edge });
    }
    let cotree = cotree(mesh, &tree, start_face)?;

    let mut loops = Vec::new();
    let mut edges = ElementSet::edges([]);
    for e in instigator_edges(mesh, &tree, &cotree).iter() {
        let lp = trace_loop(mesh, e, &tree)?;
        edges.extend(lp.edges.iter().copied());
        edges.extend(tree.path_to_root(mesh, lp.apex));
        loops.push(lp);
    }
    let puncture_edge = if loops.is_empty() {
        (0..mesh.edge_count()).find(|&e| tree.reaches(mesh.edge(e).vertices()[0]))
    } else {
        None
    };
    Ok(CutGraph {
        root,
        loops,
        edges,
        puncture_edge,
        tree,
        cotree,
    })
}

/// Cuts a closed edge-manifold mesh open along `cut`. Every cut edge becomes
/// two boundary edges. Around each vertex the faces are grouped into wedges
/// separated by cut edges, and each wedge gets its own copy of the vertex.
pub fn cut_mesh(mesh: &Mesh, cut: &ElementSet) -> Result<Mesh, CutGraphError> {
    for e in cut.iter() {
        if e >= mesh.edge_count() {
            return Err(CutGraphError::InvalidEdge(e));
        }
        if mesh.edge(e).is_boundary() {
            return Err(CutGraphError::CutEdgeOnBoundary(e));
        }
    }
    for (e, edge) in mesh.edges().iter().enumerate() {
        match edge.degree() {
            1 => return Err(CutGraphError::MeshNotClosed { edge: e }),
            2 => {}
            degree => return Err(CutGraphError::MeshNotManifold { edge: e, degree }),
        }
    }
    if cut.is_empty() {
        if let Ok(g) = topology::genus(mesh) {
            if g > 0 {
                return Err(CutGraphError::EmptyCutOnPositiveGenus(g));
            }
        }
        return Ok(mesh.clone());
    }

    let mut corner_vertex: Vec<Vec<usize>> = mesh
        .faces()
        .iter()
        .map(|f| vec![usize::MAX; f.len()])
        .collect();
    let mut positions = mesh.positions().map(|_| Vec::new());
    let mut next = 0;
    for v in 0..mesh.vertex_count() {
        let wedges: Vec<Vec<Corner>> = if mesh.vertex_corners(v).is_empty() {
            vec![Vec::new()]
        } else {
            mesh.vertex_wedges(v, |e| cut.contains(e))
        };
        for wedge in wedges {
            for c in wedge {
                corner_vertex[c.face][c.position] = next;
            }
            if let (Some(out), Some(src)) = (positions.as_mut(), mesh.positions()) {
                out.push(src[v]);
            }
            next += 1;
        }
    }

    // keep the two sides of a slit apart when both land on the same vertex pair
    let mut labels: Vec<Vec<u32>> = mesh.faces().iter().map(|f| vec![0; f.len()]).collect();
    let side_pair = |s: FaceSide| {
        let n = corner_vertex[s.face].len();
        let a = corner_vertex[s.face][s.side];
        let b = corner_vertex[s.face][(s.side + 1) % n];
        (a.min(b), a.max(b))
    };
    for e in cut.iter() {
        let sides = mesh.edge(e).sides();
        if side_pair(sides[0]) == side_pair(sides[1]) {
            labels[sides[1].face][sides[1].side] = 1;
        }
    }
    Ok(Mesh::with_side_labels(
        next,
        corner_vertex,
        positions,
        &labels,
    )?)
}

/// Cuts along every edge of the co-tree's component except the co-tree edges.
pub fn cut_all_but_cotree(mesh: &Mesh, cotree: &FaceCoTree) -> Result<Mesh, CutGraphError> {
    let reached = closed_manifold_component(mesh, cotree.root)?;
    let keep = cotree.edges();
    let cut = ElementSet::edges(
        (0..mesh.edge_count())
            .filter(|&e| reached[mesh.edge(e).sides()[0].face] && !keep.contains(e))
            .collect::<Vec<_>>(),
    );
    cut_mesh(mesh, &cut)
}
