//! Deterministic test meshes.
//!
//! Every generator attaches vertex positions so its output can be written as
//! OBJ. Closed solids are wound counter-clockwise seen from outside.
//!
//! | spec                    | V   | E   | F   | notes                          |
//! |-------------------------|-----|-----|-----|--------------------------------|
//! | `tetrahedron`           | 4   | 6   | 4   |                                |
//! | `cube`                  | 8   | 12  | 6   |                                |
//! | `octahedron`            | 6   | 12  | 8   |                                |
//! | `dodecahedron`          | 20  | 30  | 12  | pentagons                      |
//! | `icosahedron`           | 12  | 30  | 20  |                                |
//! | `hexagon`               | 6   | 6   | 1   | a single hexagonal face        |
//! | `annulus[:k]`           | 2k  | 3k  | k   | ring of quads, k = 6 default   |
//! | `moebius[:k]`           | 2k  | 3k  | k   | ring with a half twist         |
//! | `torus_grid:m,n`        | mn  | 2mn | mn  | m, n ≥ 3                       |
//! | `genus_g:g`             |     |     |     | chain of g 4×4 tori, χ = 2−2g  |
//! | `fig2`                  | 5   | 6   | 2   | quad plus triangle             |
//! | `tri_fan_shared_edge`   | 5   | 7   | 3   | three triangles on one edge    |
//! | `two_tets_shared_vertex`| 7   | 12  | 8   | pinched at vertex 0            |
//! | `cube_open`             | 8   | 12  | 5   | cube without its top           |
//!
//! `genus_g:0` is the cube. For g ≥ 1 the tori are joined by four-quad
//! tubes replacing one face of each neighbour: torus k loses face (2, 2)
//! towards torus k+1, which loses face (0, 0).

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::mesh::{Mesh, MeshError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeneratorError {
    #[error("invalid generator spec `{spec}`: {reason}")]
    InvalidSpec { spec: String, reason: String },
    #[error(transparent)]
    Mesh(#[from] MeshError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GeneratorSpec {
    Tetrahedron,
    Cube,
    Octahedron,
    Dodecahedron,
    Icosahedron,
    Hexagon,
    Annulus { segments: usize },
    Moebius { segments: usize },
    TorusGrid { m: usize, n: usize },
    GenusG { g: usize },
    Fig2,
    TriFanSharedEdge,
    TwoTetsSharedVertex,
    CubeOpen,
}

impl GeneratorSpec {
    /// One instance of every generator kind with default parameters.
    pub fn catalogue() -> Vec<GeneratorSpec> {
        use GeneratorSpec::*;
        vec![
            Tetrahedron,
            Cube,
            Octahedron,
            Dodecahedron,
            Icosahedron,
            Hexagon,
            Annulus { segments: 6 },
            Moebius { segments: 6 },
            TorusGrid { m: 3, n: 3 },
            GenusG { g: 2 },
            Fig2,
            TriFanSharedEdge,
            TwoTetsSharedVertex,
            CubeOpen,
        ]
    }

    fn check(&self) -> Result<(), String> {
        match *self {
            GeneratorSpec::Annulus { segments } | GeneratorSpec::Moebius { segments }
                if segments < 3 =>
            {
                Err(format!("needs at least 3 segments, got {segments}"))
            }
            GeneratorSpec::TorusGrid { m, n } if m < 3 || n < 3 => {
                Err(format!("torus grid needs m, n ≥ 3, got {m}×{n}"))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneratorSpec::Tetrahedron => f.write_str("tetrahedron"),
            GeneratorSpec::Cube => f.write_str("cube"),
            GeneratorSpec::Octahedron => f.write_str("octahedron"),
            GeneratorSpec::Dodecahedron => f.write_str("dodecahedron"),
            GeneratorSpec::Icosahedron => f.write_str("icosahedron"),
            GeneratorSpec::Hexagon => f.write_str("hexagon"),
            GeneratorSpec::Annulus { segments } => write!(f, "annulus:{segments}"),
            GeneratorSpec::Moebius { segments } => write!(f, "moebius:{segments}"),
            GeneratorSpec::TorusGrid { m, n } => write!(f, "torus_grid:{m},{n}"),
            GeneratorSpec::GenusG { g } => write!(f, "genus_g:{g}"),
            GeneratorSpec::Fig2 => f.write_str("fig2"),
            GeneratorSpec::TriFanSharedEdge => f.write_str("tri_fan_shared_edge"),
            GeneratorSpec::TwoTetsSharedVertex => f.write_str("two_tets_shared_vertex"),
            GeneratorSpec::CubeOpen => f.write_str("cube_open"),
        }
    }
}

impl FromStr for GeneratorSpec {
    type Err = GeneratorError;

    /// `name` or `name:arg,arg`.
    fn from_str(spec: &str) -> Result<Self, Self::Err> {
        let invalid = |reason: String| GeneratorError::InvalidSpec {
            spec: spec.to_string(),
            reason,
        };
        let (name, args) = match spec.split_once(':') {
            Some((name, args)) => (name, Some(args)),
            None => (spec, None),
        };
        let args: Vec<usize> = match args {
            Some(a) => a
                .split(',')
                .map(|t| t.trim().parse::<usize>())
                .collect::<Result<_, _>>()
                .map_err(|e| invalid(format!("bad argument: {e}")))?,
            None => Vec::new(),
        };
        let arity = |n: usize| -> Result<(), GeneratorError> {
            if args.len() == n {
                Ok(())
            } else {
                Err(invalid(format!(
                    "expected {n} arguments, got {}",
                    args.len()
                )))
            }
        };
        let optional = |default: usize| -> Result<usize, GeneratorError> {
            match args.as_slice() {
                [] => Ok(default),
                [k] => Ok(*k),
                _ => Err(invalid(format!(
                    "expected at most 1 argument, got {}",
                    args.len()
                ))),
            }
        };
        let parsed = match name {
            "tetrahedron" => arity(0).map(|_| GeneratorSpec::Tetrahedron),
            "cube" => arity(0).map(|_| GeneratorSpec::Cube),
            "octahedron" => arity(0).map(|_| GeneratorSpec::Octahedron),
            "dodecahedron" => arity(0).map(|_| GeneratorSpec::Dodecahedron),
            "icosahedron" => arity(0).map(|_| GeneratorSpec::Icosahedron),
            "hexagon" => arity(0).map(|_| GeneratorSpec::Hexagon),
            "annulus" => optional(6).map(|segments| GeneratorSpec::Annulus { segments }),
            "moebius" => optional(6).map(|segments| GeneratorSpec::Moebius { segments }),
            "torus_grid" => arity(2).map(|_| GeneratorSpec::TorusGrid {
                m: args[0],
                n: args[1],
            }),
            "genus_g" => arity(1).map(|_| GeneratorSpec::GenusG { g: args[0] }),
            "fig2" => arity(0).map(|_| GeneratorSpec::Fig2),
            "tri_fan_shared_edge" => arity(0).map(|_| GeneratorSpec::TriFanSharedEdge),
            "two_tets_shared_vertex" => arity(0).map(|_| GeneratorSpec::TwoTetsSharedVertex),
            "cube_open" => arity(0).map(|_| GeneratorSpec::CubeOpen),
            other => Err(invalid(format!("unknown generator `{other}`"))),
        }?;
        parsed.check().map_err(invalid)?;
        Ok(parsed)
    }
}

pub fn generate(spec: &GeneratorSpec) -> Result<Mesh, GeneratorError> {
    spec.check().map_err(|reason| GeneratorError::InvalidSpec {
        spec: spec.to_string(),
        reason,
    })?;
    let (positions, faces) = match *spec {
        GeneratorSpec::Tetrahedron => tetrahedron(),
        GeneratorSpec::Cube => cube(),
        GeneratorSpec::Octahedron => octahedron(),
        GeneratorSpec::Dodecahedron => dodecahedron(),
        GeneratorSpec::Icosahedron => icosahedron(),
        GeneratorSpec::Hexagon => hexagon(),
        GeneratorSpec::Annulus { segments } => annulus(segments),
        GeneratorSpec::Moebius { segments } => moebius(segments),
        GeneratorSpec::TorusGrid { m, n } => torus_grid(m, n, [0.0; 3]),
        GeneratorSpec::GenusG { g } => genus_chain(g),
        GeneratorSpec::Fig2 => fig2(),
        GeneratorSpec::TriFanSharedEdge => tri_fan_shared_edge(),
        GeneratorSpec::TwoTetsSharedVertex => two_tets_shared_vertex(),
        GeneratorSpec::CubeOpen => {
            let (p, mut f) = cube();
            f.retain(|face| !face.iter().all(|&v| p[v][2] > 0.0));
            (p, f)
        }
    };
    Ok(Mesh::new(positions.len(), faces, Some(positions))?)
}

type Parts = (Vec<[f64; 3]>, Vec<Vec<usize>>);

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn centroid(p: &[[f64; 3]], face: &[usize]) -> [f64; 3] {
    let mut c = [0.0; 3];
    for &v in face {
        for k in 0..3 {
            c[k] += p[v][k] / face.len() as f64;
        }
    }
    c
}

/// Reverses faces of a convex solid centred at the origin whose normal
/// points inwards.
fn orient_outward(p: &[[f64; 3]], faces: &mut [Vec<usize>]) {
    for face in faces.iter_mut() {
        let n = cross(sub(p[face[1]], p[face[0]]), sub(p[face[2]], p[face[0]]));
        if dot(n, centroid(p, face)) < 0.0 {
            face.reverse();
        }
    }
}

fn tetrahedron() -> Parts {
    let p = vec![
        [1.0, 1.0, 1.0],
        [1.0, -1.0, -1.0],
        [-1.0, 1.0, -1.0],
        [-1.0, -1.0, 1.0],
    ];
    let mut f = vec![vec![0, 1, 2], vec![0, 3, 1], vec![0, 2, 3], vec![1, 3, 2]];
    orient_outward(&p, &mut f);
    (p, f)
}

fn cube() -> Parts {
    // vertex i has coordinates from bits (x, y, z) = (i & 1, i >> 1 & 1, i >> 2 & 1)
    let p: Vec<[f64; 3]> = (0..8)
        .map(|i| {
            let s = |bit: usize| if i >> bit & 1 == 1 { 1.0 } else { -1.0 };
            [s(0), s(1), s(2)]
        })
        .collect();
    let mut f = vec![
        vec![0, 2, 6, 4],
        vec![1, 5, 7, 3],
        vec![0, 4, 5, 1],
        vec![2, 3, 7, 6],
        vec![0, 1, 3, 2],
        vec![4, 6, 7, 5],
    ];
    orient_outward(&p, &mut f);
    (p, f)
}

fn octahedron() -> Parts {
    let p = vec![
        [1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, -1.0, 0.0],
        [0.0, 0.0, 1.0],
        [0.0, 0.0, -1.0],
    ];
    let mut f = Vec::new();
    for z in [4, 5] {
        for x in [0, 1] {
            for y in [2, 3] {
                f.push(vec![x, y, z]);
            }
        }
    }
    orient_outward(&p, &mut f);
    (p, f)
}

fn icosahedron() -> Parts {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let mut p = Vec::new();
    for a in [-1.0, 1.0] {
        for b in [-phi, phi] {
            p.push([0.0, a, b]);
            p.push([a, b, 0.0]);
            p.push([b, 0.0, a]);
        }
    }
    let adjacent = |i: usize, j: usize| {
        let d = sub(p[i], p[j]);
        (dot(d, d) - 4.0).abs() < 1e-9
    };
    let mut f = Vec::new();
    for i in 0..12 {
        for j in i + 1..12 {
            for k in j + 1..12 {
                if adjacent(i, j) && adjacent(j, k) && adjacent(i, k) {
                    f.push(vec![i, j, k]);
                }
            }
        }
    }
    orient_outward(&p, &mut f);
    (p, f)
}

/// Dual of the icosahedron: one vertex per triangle, one pentagon per vertex.
fn dodecahedron() -> Parts {
    let (ip, ifaces) = icosahedron();
    let p: Vec<[f64; 3]> = ifaces.iter().map(|face| centroid(&ip, face)).collect();
    let mut f = Vec::new();
    for (v, axis) in ip.iter().enumerate() {
        let ring: Vec<usize> = (0..ifaces.len())
            .filter(|&t| ifaces[t].contains(&v))
            .collect();
        // sort the ring by angle around the vertex axis
        let reference = sub(p[ring[0]], *axis);
        let side = cross(*axis, reference);
        let mut keyed: Vec<(f64, usize)> = ring
            .iter()
            .map(|&t| {
                let d = sub(p[t], *axis);
                (dot(d, side).atan2(dot(d, reference)), t)
            })
            .collect();
        keyed.sort_by(|a, b| a.0.total_cmp(&b.0));
        f.push(keyed.into_iter().map(|(_, t)| t).collect());
    }
    orient_outward(&p, &mut f);
    (p, f)
}

fn hexagon() -> Parts {
    let p = (0..6)
        .map(|k| {
            let a = PI / 3.0 * k as f64;
            [a.cos(), a.sin(), 0.0]
        })
        .collect();
    (p, vec![(0..6).collect()])
}

/// Inner ring `0..k`, outer ring `k..2k`.
fn annulus(k: usize) -> Parts {
    let mut p = Vec::with_capacity(2 * k);
    for radius in [1.0, 2.0] {
        for i in 0..k {
            let a = 2.0 * PI * i as f64 / k as f64;
            p.push([radius * a.cos(), radius * a.sin(), 0.0]);
        }
    }
    let f = (0..k)
        .map(|i| {
            let j = (i + 1) % k;
            vec![i, k + i, k + j, j]
        })
        .collect();
    (p, f)
}

/// Rungs `(i, k + i)`; the last quad re-enters the strip upside down.
fn moebius(k: usize) -> Parts {
    let mut p = vec![[0.0; 3]; 2 * k];
    for i in 0..k {
        let t = 2.0 * PI * i as f64 / k as f64;
        let (radial, up) = ((t / 2.0).cos(), (t / 2.0).sin());
        for (slot, w) in [(i, 0.5), (k + i, -0.5)] {
            let r = 2.0 + w * radial;
            p[slot] = [r * t.cos(), r * t.sin(), w * up];
        }
    }
    let mut f: Vec<Vec<usize>> = (0..k - 1)
        .map(|i| vec![i, k + i, k + i + 1, i + 1])
        .collect();
    f.push(vec![k - 1, 2 * k - 1, 0, k]);
    (p, f)
}

/// Vertex `(i, j)` is `i * n + j`; face `(i, j)` is `i * n + j`.
fn torus_grid(m: usize, n: usize, offset: [f64; 3]) -> Parts {
    let (big, small) = (2.0, 0.75);
    let mut p = Vec::with_capacity(m * n);
    for i in 0..m {
        let u = 2.0 * PI * i as f64 / m as f64;
        for j in 0..n {
            let v = 2.0 * PI * j as f64 / n as f64;
            let r = big + small * v.cos();
            p.push([
                offset[0] + r * u.cos(),
                offset[1] + r * u.sin(),
                offset[2] + small * v.sin(),
            ]);
        }
    }
    let idx = |i: usize, j: usize| (i % m) * n + (j % n);
    let f = (0..m)
        .flat_map(|i| {
            (0..n).map(move |j| vec![idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1)])
        })
        .collect();
    (p, f)
}

fn genus_chain(g: usize) -> Parts {
    if g == 0 {
        return cube();
    }
    const SIDE: usize = 4;
    const OUT: usize = 2 * SIDE + 2;
    const IN: usize = 0;
    let per = SIDE * SIDE;
    let mut positions = Vec::new();
    let mut faces = Vec::new();
    let mut holes: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
    for k in 0..g {
        let (p, f) = torus_grid(SIDE, SIDE, [6.0 * k as f64, 0.0, 0.0]);
        let base = k * per;
        positions.extend(p);
        let shift = |face: &Vec<usize>| face.iter().map(|v| v + base).collect::<Vec<_>>();
        for (id, face) in f.iter().enumerate() {
            let removed = (k > 0 && id == IN) || (k + 1 < g && id == OUT);
            if !removed {
                faces.push(shift(face));
            }
        }
        if k + 1 < g {
            holes.push((shift(&f[OUT]), Vec::new()));
        }
        if k > 0 {
            holes[k - 1].1 = shift(&f[IN]);
        }
    }
    // tube quad i keeps a[i] -> a[i+1] and b[j] -> b[j+1] in the directions
    // the removed faces used, with j = -i mod 4
    for (a, b) in holes {
        for i in 0..4 {
            let j = (4 - i) % 4;
            faces.push(vec![a[i], a[(i + 1) % 4], b[j], b[(j + 1) % 4]]);
        }
    }
    (positions, faces)
}

fn fig2() -> Parts {
    let p = vec![
        [0.0, 0.0, 0.0],
        [1.0, 0.0, 0.0],
        [1.0, 1.0, 0.0],
        [0.0, 1.0, 0.0],
        [2.0, 0.5, 0.0],
    ];
    (p, vec![vec![0, 1, 2, 3], vec![1, 4, 2]])
}

fn tri_fan_shared_edge() -> Parts {
    let mut p = vec![[0.0, 0.0, 0.0], [0.0, 0.0, 1.0]];
    for k in 0..3 {
        let a = 2.0 * PI * k as f64 / 3.0;
        p.push([a.cos(), a.sin(), 0.5]);
    }
    (p, vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 1, 4]])
}

fn two_tets_shared_vertex() -> Parts {
    let (tp, tf) = tetrahedron();
    // second copy mirrored through vertex 0
    let mut p = tp.clone();
    for q in &tp[1..] {
        p.push([
            2.0 * tp[0][0] - q[0],
            2.0 * tp[0][1] - q[1],
            2.0 * tp[0][2] - q[2],
        ]);
    }
    let mut f = tf.clone();
    for face in &tf {
        // mirroring flips handedness, so reverse to keep outward winding
        let mut g: Vec<usize> = face
            .iter()
            .map(|&v| if v == 0 { 0 } else { v + 3 })
            .collect();
        g.reverse();
        f.push(g);
    }
    (p, f)
}
