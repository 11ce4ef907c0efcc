//! Quantitative topology: components, boundary cycles, genus, the
//! instigator partition and Betti numbers.
//!
//! Betti numbers are computed two ways. [`betti_closed_form`] counts cycle
//! instigators up front (a spanning forest decides which edges are
//! non-instigating, watertight face components decide the face split).
//! [`betti_incremental`] adds the elements of a [`Filtration`] one at a time
//! and asks, after every insertion, whether a new cycle was created. The two
//! routes share no code beyond the mesh tables, which is what makes one a
//! check on the other.
//!
//! All arithmetic here is exact integer arithmetic.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mesh::{Dim, ElementRef, ElementSet, Mesh};
use crate::union_find::UnionFind;
use crate::validation;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TopologyError {
    #[error("boundary edges at vertex {vertex} cannot be paired into cycles")]
    NonManifoldBoundary { vertex: usize },
    #[error("genus is undefined: {reason}")]
    GenusUndefined { reason: String },
    #[error("invalid filtration: {reason}")]
    InvalidFiltration { reason: String },
    #[error("edge {edge} has {degree} incident faces; the incremental algorithm needs an edge-manifold mesh")]
    NotEdgeManifold { edge: usize, degree: usize },
}

/// Connected components over vertex-edge adjacency.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Components {
    pub count: usize,
    /// Component label per vertex; labels are numbered by lowest vertex.
    pub labels: Vec<usize>,
}

impl Components {
    pub fn vertices_of(&self, component: usize) -> impl Iterator<Item = usize> + '_ {
        self.labels
            .iter()
            .enumerate()
            .filter(move |&(_, &c)| c == component)
            .map(|(v, _)| v)
    }
}

/// Flood fill from each unvisited vertex in id order.
pub fn components(mesh: &Mesh) -> Components {
    let n = mesh.vertex_count();
    let mut labels = vec![usize::MAX; n];
    let mut count = 0;
    let mut stack = Vec::new();
    for start in 0..n {
        if labels[start] != usize::MAX {
            continue;
        }
        labels[start] = count;
        stack.push(start);
        while let Some(v) = stack.pop() {
            for &e in mesh.vertex_edges(v) {
                let w = mesh.edge(e).opposite(v);
                if labels[w] == usize::MAX {
                    labels[w] = count;
                    stack.push(w);
                }
            }
        }
        count += 1;
    }
    Components { count, labels }
}

/// A closed walk of boundary edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryCycle {
    pub edges: Vec<usize>,
    /// `vertices[i]` is the start of `edges[i]`.
    pub vertices: Vec<usize>,
}

/// Traces every boundary cycle. At a vertex with several boundary edges the
/// trace stays inside the wedge of faces it arrived through.
pub fn boundary_cycles(mesh: &Mesh) -> Result<Vec<BoundaryCycle>, TopologyError> {
    // partner[(v, e)] = the boundary edge paired with e at vertex v
    let mut partner: HashMap<(usize, usize), usize> = HashMap::new();
    for v in 0..mesh.vertex_count() {
        let has_boundary = mesh
            .vertex_edges(v)
            .iter()
            .any(|&e| mesh.edge(e).is_boundary());
        if !has_boundary {
            continue;
        }
        for edges in validation::wedge_boundary_edges(mesh, v) {
            match edges.as_slice() {
                [] => {}
                [a, b] => {
                    partner.insert((v, *a), *b);
                    partner.insert((v, *b), *a);
                }
                _ => return Err(TopologyError::NonManifoldBoundary { vertex: v }),
            }
        }
        let paired = mesh
            .vertex_edges(v)
            .iter()
            .filter(|&&e| mesh.edge(e).is_boundary())
            .all(|&e| partner.contains_key(&(v, e)));
        if !paired {
            return Err(TopologyError::NonManifoldBoundary { vertex: v });
        }
    }

    let mut visited = vec![false; mesh.edge_count()];
    let mut cycles = Vec::new();
    for start in 0..mesh.edge_count() {
        if visited[start] || !mesh.edge(start).is_boundary() {
            continue;
        }
        let mut cycle = BoundaryCycle {
            edges: Vec::new(),
            vertices: Vec::new(),
        };
        let mut e = start;
        let mut from = mesh.edge(start).vertices()[0];
        loop {
            visited[e] = true;
            cycle.edges.push(e);
            cycle.vertices.push(from);
            let to = mesh.edge(e).opposite(from);
            e = partner[&(to, e)];
            from = to;
            if e == start {
                break;
            }
        }
        cycles.push(cycle);
    }
    Ok(cycles)
}

/// One spanning tree per component, built greedily over edges in id order.
pub fn spanning_forest(mesh: &Mesh) -> ElementSet {
    let mut uf = UnionFind::new(mesh.vertex_count());
    ElementSet::edges(
        mesh.edges()
            .iter()
            .enumerate()
            .filter(|(_, e)| {
                let [a, b] = e.vertices();
                uf.union(a, b)
            })
            .map(|(id, _)| id)
            .collect::<Vec<_>>(),
    )
}

/// Face components joined across shared edges.
fn face_components(mesh: &Mesh) -> UnionFind {
    let mut uf = UnionFind::new(mesh.face_count());
    for edge in mesh.edges() {
        if let Some((first, rest)) = edge.sides().split_first() {
            for s in rest {
                uf.union(first.face, s.face);
            }
        }
    }
    uf
}

/// Number of face components that contain no boundary edge.
pub fn watertight_components(mesh: &Mesh) -> usize {
    let mut uf = face_components(mesh);
    let mut open = vec![false; mesh.face_count()];
    for edge in mesh.edges().iter().filter(|e| e.is_boundary()) {
        let root = uf.find(edge.sides()[0].face);
        open[root] = true;
    }
    (0..mesh.face_count())
        .filter(|&f| uf.find(f) == f && !open[f])
        .count()
}

/// Counts of non-instigating (`*_n`) and cycle-instigating (`*_c`) elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstigatorPartition {
    #[serde(rename = "VN")]
    pub v_n: usize,
    #[serde(rename = "VC")]
    pub v_c: usize,
    #[serde(rename = "EN")]
    pub e_n: usize,
    #[serde(rename = "EC")]
    pub e_c: usize,
    #[serde(rename = "FN")]
    pub f_n: usize,
    #[serde(rename = "FC")]
    pub f_c: usize,
}

pub fn instigator_partition(mesh: &Mesh) -> InstigatorPartition {
    let v = mesh.vertex_count();
    let e = mesh.edge_count();
    let f = mesh.face_count();
    let e_n = spanning_forest(mesh).len();
    let s_w = watertight_components(mesh);
    InstigatorPartition {
        v_n: 0,
        v_c: v,
        e_n,
        e_c: e - e_n,
        f_n: f - s_w,
        f_c: s_w,
    }
}

/// `(β0, β1, β2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Betti(pub [i64; 3]);

impl Betti {
    pub fn alternating_sum(&self) -> i64 {
        self.0[0] - self.0[1] + self.0[2]
    }
}

impl std::fmt::Display for Betti {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} {} {}", self.0[0], self.0[1], self.0[2])
    }
}

impl Serialize for Betti {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Betti {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        <[i64; 3]>::deserialize(d).map(Betti)
    }
}

/// `β0 = V_C − E_N`, `β1 = E_C − F_N`, `β2 = F_C`.
pub fn betti_closed_form(mesh: &Mesh) -> Betti {
    let p = instigator_partition(mesh);
    Betti([
        p.v_c as i64 - p.e_n as i64,
        p.e_c as i64 - p.f_n as i64,
        p.f_c as i64,
    ])
}

/// `g = s − (χ + b) / 2` for a manifold, orientable mesh.
pub fn genus(mesh: &Mesh) -> Result<u64, TopologyError> {
    let undefined = |reason: String| Err(TopologyError::GenusUndefined { reason });
    match validation::check_orientable(mesh) {
        Err(err) => return undefined(err.to_string()),
        Ok(o) if !o.orientable => {
            return undefined(format!(
                "mesh is not orientable (edge {})",
                o.witness.unwrap_or_default()
            ))
        }
        Ok(_) => {}
    }
    let links = validation::check_vertex_links(mesh);
    if !links.passed {
        return undefined(format!(
            "faces around vertex {} do not form a single fan",
            links.offenders[0]
        ));
    }
    let b = match boundary_cycles(mesh) {
        Ok(cycles) => cycles.len() as i64,
        Err(err) => return undefined(err.to_string()),
    };
    genus_from_counts(
        components(mesh).count as i64,
        mesh.euler_characteristic(),
        b,
    )
}

fn genus_from_counts(s: i64, chi: i64, b: i64) -> Result<u64, TopologyError> {
    let twice = 2 * s - chi - b;
    if twice % 2 != 0 {
        return Err(TopologyError::GenusUndefined {
            reason: format!("2(s − g) − b = χ has no integer solution (s={s}, χ={chi}, b={b})"),
        });
    }
    if twice < 0 {
        return Err(TopologyError::GenusUndefined {
            reason: format!("negative genus (s={s}, χ={chi}, b={b})"),
        });
    }
    Ok((twice / 2) as u64)
}

/// An ordering of every vertex, edge and face where each element comes
/// after all elements of its boundary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Filtration {
    order: Vec<ElementRef>,
}

impl Filtration {
    /// Wraps an ordering without checking it; see [`Filtration::validate`].
    pub fn from_order(order: Vec<ElementRef>) -> Self {
        Self { order }
    }

    pub fn elements(&self) -> &[ElementRef] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn validate(&self, mesh: &Mesh) -> Result<(), TopologyError> {
        let invalid = |reason: String| Err(TopologyError::InvalidFiltration { reason });
        let mut seen = [
            vec![false; mesh.vertex_count()],
            vec![false; mesh.edge_count()],
            vec![false; mesh.face_count()],
        ];
        for (i, &el) in self.order.iter().enumerate() {
            let table = &seen[el.dim.rank() as usize];
            if el.id >= table.len() {
                return invalid(format!("position {i}: {el} does not exist"));
            }
            if table[el.id] {
                return invalid(format!("position {i}: {el} appears twice"));
            }
            let ready = match el.dim {
                Dim::Vertex => true,
                Dim::Edge => mesh.edge(el.id).vertices().iter().all(|&v| seen[0][v]),
                Dim::Face => mesh.face_edges(el.id).iter().all(|&e| seen[1][e]),
            };
            if !ready {
                return invalid(format!("position {i}: {el} precedes part of its boundary"));
            }
            seen[el.dim.rank() as usize][el.id] = true;
        }
        let expected = mesh.vertex_count() + mesh.edge_count() + mesh.face_count();
        if self.order.len() != expected {
            return invalid(format!(
                "{} elements listed, the mesh has {expected}",
                self.order.len()
            ));
        }
        Ok(())
    }
}

/// A seeded random filtration: repeatedly picks a uniformly random element
/// among those whose boundary is already present.
pub fn make_filtration(mesh: &Mesh, seed: u64) -> Filtration {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut vertex_missing: Vec<usize> = vec![2; mesh.edge_count()];
    let mut face_missing: Vec<usize> = (0..mesh.face_count())
        .map(|f| distinct_edges(mesh, f).len())
        .collect();
    let mut faces_on_edge: Vec<Vec<usize>> = vec![Vec::new(); mesh.edge_count()];
    for f in 0..mesh.face_count() {
        for e in distinct_edges(mesh, f) {
            faces_on_edge[e].push(f);
        }
    }

    let mut ready: Vec<ElementRef> = (0..mesh.vertex_count()).map(ElementRef::vertex).collect();
    let mut order = Vec::with_capacity(mesh.vertex_count() + mesh.edge_count() + mesh.face_count());
    while !ready.is_empty() {
        let pick = ready.swap_remove(rng.random_range(0..ready.len()));
        order.push(pick);
        match pick.dim {
            Dim::Vertex => {
                for &e in mesh.vertex_edges(pick.id) {
                    vertex_missing[e] -= 1;
                    if vertex_missing[e] == 0 {
                        ready.push(ElementRef::edge(e));
                    }
                }
            }
            Dim::Edge => {
                for &f in &faces_on_edge[pick.id] {
                    face_missing[f] -= 1;
                    if face_missing[f] == 0 {
                        ready.push(ElementRef::face(f));
                    }
                }
            }
            Dim::Face => {}
        }
    }
    Filtration { order }
}

fn distinct_edges(mesh: &Mesh, f: usize) -> Vec<usize> {
    let mut edges = mesh.face_edges(f).to_vec();
    edges.sort_unstable();
    edges.dedup();
    edges
}

/// Adds the filtration's elements one by one. A vertex always opens a new
/// component. An edge joining two already-connected vertices instigates a
/// 1-cycle, otherwise it merges two components. A face instigates a 2-cycle
/// exactly when it closes its face component (no edge of the component is
/// left with an odd number of incident sides), otherwise it fills a 1-cycle.
pub fn betti_incremental(mesh: &Mesh, filtration: &Filtration) -> Result<Betti, TopologyError> {
    if let Some((edge, e)) = mesh
        .edges()
        .iter()
        .enumerate()
        .find(|(_, e)| e.degree() > 2)
    {
        return Err(TopologyError::NotEdgeManifold {
            edge,
            degree: e.degree(),
        });
    }
    filtration.validate(mesh)?;

    let mut betti = [0i64; 3];
    let mut vertices = UnionFind::new(mesh.vertex_count());
    let mut faces = UnionFind::new(mesh.face_count());
    // sides present per edge, and per face-component root the number of
    // edges with an odd count of present sides
    let mut present_sides = vec![0usize; mesh.edge_count()];
    let mut open_edges = vec![0i64; mesh.face_count()];
    let mut face_on_edge: Vec<Option<usize>> = vec![None; mesh.edge_count()];

    for el in filtration.elements() {
        match el.dim {
            Dim::Vertex => betti[0] += 1,
            Dim::Edge => {
                let [a, b] = mesh.edge(el.id).vertices();
                if vertices.union(a, b) {
                    betti[0] -= 1;
                } else {
                    betti[1] += 1;
                }
            }
            Dim::Face => {
                let f = el.id;
                let mut delta = 0i64;
                let mut neighbours = Vec::new();
                for &e in mesh.face_edges(f) {
                    let before = present_sides[e];
                    present_sides[e] += 1;
                    delta += if before.is_multiple_of(2) { 1 } else { -1 };
                    match face_on_edge[e] {
                        Some(g) if g != f => neighbours.push(g),
                        Some(_) => {}
                        None => face_on_edge[e] = Some(f),
                    }
                }
                let mut open = delta;
                for g in neighbours {
                    let (rf, rg) = (faces.find(f), faces.find(g));
                    if rf != rg {
                        open += open_edges[rg];
                        faces.union(rf, rg);
                    }
                }
                let root = faces.find(f);
                open_edges[root] = open;
                if open == 0 {
                    betti[2] += 1;
                } else {
                    betti[1] -= 1;
                }
            }
        }
    }
    Ok(Betti(betti))
}

/// Everything the quantitative analysis produces for one mesh.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TopologyReport {
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    pub components: usize,
    /// `None` when boundary edges cannot be paired into cycles.
    pub boundary_cycles: Option<usize>,
    pub euler_characteristic: i64,
    /// `None` when the genus is undefined for this mesh.
    pub genus: Option<u64>,
    pub watertight_components: usize,
    pub partition: InstigatorPartition,
    pub betti: Betti,
}

pub fn analyze(mesh: &Mesh) -> TopologyReport {
    let partition = instigator_partition(mesh);
    TopologyReport {
        vertices: mesh.vertex_count(),
        edges: mesh.edge_count(),
        faces: mesh.face_count(),
        components: components(mesh).count,
        boundary_cycles: boundary_cycles(mesh).ok().map(|c| c.len()),
        euler_characteristic: mesh.euler_characteristic(),
        genus: genus(mesh).ok(),
        watertight_components: partition.f_c,
        partition,
        betti: betti_closed_form(mesh),
    }
}
