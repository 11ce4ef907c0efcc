//! OBJ and OFF reading, OBJ writing.
//!
//! Only polygon geometry is read: `v` and `f` from OBJ, the vertex and face
//! blocks from OFF. Everything else in an OBJ file (normals, texture
//! coordinates, materials, groups, line elements) is skipped.

use std::fmt::Write as _;

use thiserror::Error;

use crate::mesh::{Dim, ElementSet, Mesh, MeshError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IoError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: vertex index {index} out of range ({vertex_count} vertices)")]
    IndexOutOfRange {
        line: usize,
        index: i64,
        vertex_count: usize,
    },
    #[error("mesh has no vertex positions")]
    MissingPositions,
    #[error("seams must be an edge set, got {0}")]
    SeamsNotEdges(Dim),
    #[error(transparent)]
    Mesh(#[from] MeshError),
}

fn parse_error(line: usize, message: impl Into<String>) -> IoError {
    IoError::Parse {
        line,
        message: message.into(),
    }
}

/// Splits into `(line number, text)` with comments and surrounding
/// whitespace removed.
fn lines(bytes: &[u8]) -> impl Iterator<Item = Result<(usize, &str), IoError>> {
    bytes.split(|&b| b == b'\n').enumerate().map(|(i, raw)| {
        let text = std::str::from_utf8(raw).map_err(|_| parse_error(i + 1, "invalid UTF-8"))?;
        let text = text.split('#').next().unwrap_or("").trim();
        Ok((i + 1, text))
    })
}

fn parse_coord(line: usize, token: Option<&str>) -> Result<f64, IoError> {
    let token = token.ok_or_else(|| parse_error(line, "expected 3 coordinates"))?;
    token
        .parse::<f64>()
        .map_err(|_| parse_error(line, format!("bad coordinate `{token}`")))
}

pub fn parse_obj(bytes: &[u8]) -> Result<Mesh, IoError> {
    let mut positions: Vec<[f64; 3]> = Vec::new();
    let mut faces: Vec<Vec<usize>> = Vec::new();
    // raw 1-based (or relative) indices are resolved once all vertices are known
    let mut pending: Vec<(usize, Vec<i64>, usize)> = Vec::new();
    for item in lines(bytes) {
        let (line, text) = item?;
        let mut tokens = text.split_whitespace();
        match tokens.next() {
            Some("v") => {
                let p = [
                    parse_coord(line, tokens.next())?,
                    parse_coord(line, tokens.next())?,
                    parse_coord(line, tokens.next())?,
                ];
                positions.push(p);
            }
            Some("f") => {
                let mut indices = Vec::new();
                for token in tokens {
                    let head = token.split('/').next().unwrap_or("");
                    let index: i64 = head
                        .parse()
                        .map_err(|_| parse_error(line, format!("bad face index `{token}`")))?;
                    if index == 0 {
                        return Err(parse_error(line, "face index 0 (OBJ indices start at 1)"));
                    }
                    indices.push(index);
                }
                if indices.len() < 3 {
                    return Err(parse_error(
                        line,
                        format!("face has {} vertices, need at least 3", indices.len()),
                    ));
                }
                pending.push((line, indices, positions.len()));
            }
            _ => {}
        }
    }
    let vertex_count = positions.len();
    for (line, indices, seen) in pending {
        let mut face = Vec::with_capacity(indices.len());
        for index in indices {
            // negative indices count back from the vertices read so far
            let resolved = if index > 0 {
                index - 1
            } else {
                seen as i64 + index
            };
            if resolved < 0 || resolved as usize >= vertex_count {
                return Err(IoError::IndexOutOfRange {
                    line,
                    index,
                    vertex_count,
                });
            }
            face.push(resolved as usize);
        }
        faces.push(face);
    }
    Ok(Mesh::new(vertex_count, faces, Some(positions))?)
}

pub fn parse_off(bytes: &[u8]) -> Result<Mesh, IoError> {
    let mut content = lines(bytes).filter(|item| !matches!(item, Ok((_, ""))));
    let mut last_line = 0;
    let mut next = |what: &str| -> Result<(usize, Vec<&str>), IoError> {
        match content.next() {
            Some(item) => {
                let (line, text) = item?;
                last_line = line;
                Ok((line, text.split_whitespace().collect()))
            }
            None => Err(parse_error(
                last_line + 1,
                format!("unexpected end of file, expected {what}"),
            )),
        }
    };

    let (line, header) = next("OFF header")?;
    if header.first() != Some(&"OFF") {
        return Err(parse_error(line, "missing OFF header"));
    }
    // counts may share the header line
    let (line, counts) = if header.len() > 1 {
        (line, header[1..].to_vec())
    } else {
        next("vertex, face and edge counts")?
    };
    if counts.len() < 2 {
        return Err(parse_error(line, "expected vertex and face counts"));
    }
    let count = |t: &str| {
        t.parse::<usize>()
            .map_err(|_| parse_error(line, format!("bad count `{t}`")))
    };
    let (nv, nf) = (count(counts[0])?, count(counts[1])?);

    let mut positions = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (line, t) = next("vertex")?;
        let mut it = t.into_iter();
        positions.push([
            parse_coord(line, it.next())?,
            parse_coord(line, it.next())?,
            parse_coord(line, it.next())?,
        ]);
    }
    let mut faces = Vec::with_capacity(nf);
    for _ in 0..nf {
        let (line, t) = next("face")?;
        let k: usize = t
            .first()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| parse_error(line, "face must start with its vertex count"))?;
        if k < 3 {
            return Err(parse_error(
                line,
                format!("face has {k} vertices, need at least 3"),
            ));
        }
        if t.len() < k + 1 {
            return Err(parse_error(
                line,
                format!("face lists fewer than {k} indices"),
            ));
        }
        // anything after the indices is a colour and is ignored
        let mut face = Vec::with_capacity(k);
        for token in &t[1..=k] {
            let index: i64 = token
                .parse()
                .map_err(|_| parse_error(line, format!("bad face index `{token}`")))?;
            if index < 0 || index as usize >= nv {
                return Err(IoError::IndexOutOfRange {
                    line,
                    index,
                    vertex_count: nv,
                });
            }
            face.push(index as usize);
        }
        faces.push(face);
    }
    Ok(Mesh::new(nv, faces, Some(positions))?)
}

/// Writes vertices, then faces, then one `l` element per seam polyline.
///
/// Seam edges are split into maximal polylines that only meet at vertices
/// where the seam does not simply pass through; a closed seam component with
/// no such vertex becomes one closed polyline.
pub fn write_obj(mesh: &Mesh, seams: Option<&ElementSet>) -> Result<String, IoError> {
    let polylines = match seams {
        Some(s) if s.dim() != Dim::Edge => return Err(IoError::SeamsNotEdges(s.dim())),
        Some(s) => seam_polylines(mesh, s),
        None => Vec::new(),
    };
    write_obj_polylines(mesh, &polylines)
}

/// Like [`write_obj`] but with explicit polylines given as vertex sequences.
pub fn write_obj_polylines(mesh: &Mesh, polylines: &[Vec<usize>]) -> Result<String, IoError> {
    let positions = match mesh.positions() {
        Some(p) => p,
        None if mesh.vertex_count() == 0 => &[],
        None => return Err(IoError::MissingPositions),
    };
    let mut out = format!("# meshtopo {}\n", env!("CARGO_PKG_VERSION"));
    for p in positions {
        // `{}` on f64 prints the shortest decimal that reads back exactly
        writeln!(out, "v {} {} {}", p[0], p[1], p[2]).expect("writing to a String");
    }
    for face in mesh.faces() {
        out.push('f');
        for v in face {
            write!(out, " {}", v + 1).expect("writing to a String");
        }
        out.push('\n');
    }
    for line in polylines {
        out.push('l');
        for v in line {
            write!(out, " {}", v + 1).expect("writing to a String");
        }
        out.push('\n');
    }
    Ok(out)
}

/// Decomposes an edge set into vertex sequences. Closed polylines repeat
/// their first vertex at the end.
pub fn seam_polylines(mesh: &Mesh, seams: &ElementSet) -> Vec<Vec<usize>> {
    let mut degree = vec![0usize; mesh.vertex_count()];
    for e in seams.iter() {
        for v in mesh.edge(e).vertices() {
            degree[v] += 1;
        }
    }
    let mut used = vec![false; mesh.edge_count()];
    let mut out = Vec::new();
    let walk = |start: usize, first: usize, used: &mut Vec<bool>| {
        let mut line = vec![start];
        let (mut at, mut e) = (start, first);
        loop {
            used[e] = true;
            at = mesh.edge(e).opposite(at);
            line.push(at);
            if degree[at] != 2 || at == start {
                break;
            }
            match mesh
                .vertex_edges(at)
                .iter()
                .copied()
                .find(|&n| seams.contains(n) && !used[n])
            {
                Some(n) => e = n,
                None => break,
            }
        }
        line
    };
    // open polylines start at branch points and ends
    for (v, &d) in degree.iter().enumerate() {
        if d == 0 || d == 2 {
            continue;
        }
        for &e in mesh.vertex_edges(v) {
            if seams.contains(e) && !used[e] {
                out.push(walk(v, e, &mut used));
            }
        }
    }
    // what is left are closed loops through degree-2 vertices only
    for e in seams.iter() {
        if !used[e] {
            let start = mesh.edge(e).vertices()[0];
            out.push(walk(start, e, &mut used));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const TET: &str = "# tetrahedron\nv 1 1 1\nv 1 -1 -1\nv -1 1 -1\nv -1 -1 1\n\
                       f 1 2 3\nf 1 4 2\nf 1 3 4\nf 2 4 3\n";

    #[test]
    fn obj_tetrahedron() {
        let m = parse_obj(TET.as_bytes()).unwrap();
        assert_eq!(
            (m.vertex_count(), m.edge_count(), m.face_count()),
            (4, 6, 4)
        );
        assert_eq!(m.face(1), &[0, 3, 1]);
    }

    #[test]
    fn obj_skips_attributes_and_reads_slashes() {
        let src = "mtllib a.mtl\no thing\nv 0 0 0\nv 1 0 0\nv 0 1 0\nvn 0 0 1\nvt 0 0\n\
                   g grp\nusemtl m\ns off\nf 1/1/1 2//1 3/2\nl 1 2\n";
        let m = parse_obj(src.as_bytes()).unwrap();
        assert_eq!(m.faces(), &[vec![0, 1, 2]]);
    }

    #[test]
    fn obj_negative_indices_are_relative() {
        let src = "v 0 0 0\nv 1 0 0\nv 0 1 0\nf -3 -2 -1\nv 1 1 0\nf -3 -1 -2\n";
        let m = parse_obj(src.as_bytes()).unwrap();
        assert_eq!(m.faces(), &[vec![0, 1, 2], vec![1, 3, 2]]);
    }

    #[test]
    fn obj_errors() {
        let zero = parse_obj(b"v 0 0 0\nv 1 0 0\nv 0 1 0\nf 0 1 2\n").unwrap_err();
        assert!(matches!(zero, IoError::Parse { line: 4, .. }));
        let range = parse_obj(b"v 0 0 0\nv 1 0 0\nv 0 1 0\n\nf 1 2 9\n").unwrap_err();
        assert_eq!(
            range,
            IoError::IndexOutOfRange {
                line: 5,
                index: 9,
                vertex_count: 3
            }
        );
        assert!(matches!(
            parse_obj(b"v 0 0\n").unwrap_err(),
            IoError::Parse { line: 1, .. }
        ));
        assert!(matches!(
            parse_obj(b"v 0 0 0\nv 1 0 0\nf 1 2\n").unwrap_err(),
            IoError::Parse { line: 3, .. }
        ));
    }

    #[test]
    fn off_basic_and_empty() {
        let m = parse_off(b"OFF\n0 0 0\n").unwrap();
        assert_eq!(
            (m.vertex_count(), m.edge_count(), m.face_count()),
            (0, 0, 0)
        );

        let src = "OFF\n# a comment\n4 4 6\n1 1 1\n1 -1 -1\n-1 1 -1\n-1 -1 1\n\
                   3 0 1 2\n3 0 3 1\n3 0 2 3 255 0 0\n3 1 3 2\n";
        let m = parse_off(src.as_bytes()).unwrap();
        assert_eq!(
            (m.vertex_count(), m.edge_count(), m.face_count()),
            (4, 6, 4)
        );
    }

    #[test]
    fn off_errors() {
        assert!(matches!(
            parse_off(b"PLY\n").unwrap_err(),
            IoError::Parse { line: 1, .. }
        ));
        assert!(matches!(
            parse_off(b"OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 3\n").unwrap_err(),
            IoError::IndexOutOfRange {
                line: 6,
                index: 3,
                ..
            }
        ));
        assert!(matches!(
            parse_off(b"OFF\n3 1 0\n0 0 0\n1 0 0\n").unwrap_err(),
            IoError::Parse { line: 5, .. }
        ));
    }

    #[test]
    fn write_round_trip() {
        let m = parse_obj(TET.as_bytes()).unwrap();
        let text = write_obj(&m, None).unwrap();
        assert_eq!(parse_obj(text.as_bytes()).unwrap(), m);
    }

    #[test]
    fn write_empty_and_missing_positions() {
        let text = write_obj(&Mesh::empty(), None).unwrap();
        assert_eq!(text.lines().count(), 1);
        assert!(text.starts_with('#'));
        let bare = Mesh::new(3, vec![vec![0, 1, 2]], None).unwrap();
        assert_eq!(
            write_obj(&bare, None).unwrap_err(),
            IoError::MissingPositions
        );
    }

    #[test]
    fn seams_split_at_branch_points() {
        // quad 0-1-2-3 plus a triangle on edge 1-2: seams 0-1, 1-2, 2-3, 1-4
        let m = Mesh::new(
            5,
            vec![vec![0, 1, 2, 3], vec![1, 4, 2]],
            Some(vec![[0.0; 3]; 5]),
        )
        .unwrap();
        let ids = [[0, 1], [1, 2], [2, 3], [1, 4]].map(|[a, b]| m.edge_between(a, b).unwrap());
        let lines = seam_polylines(&m, &ElementSet::edges(ids));
        assert_eq!(lines, vec![vec![0, 1], vec![1, 2, 3], vec![1, 4]]);

        let all = ElementSet::edges(0..m.edge_count());
        let cycle = ElementSet::edges(m.face_edges(0).iter().copied());
        let closed = seam_polylines(&m, &cycle);
        assert_eq!(closed, vec![vec![0, 1, 2, 3, 0]]);
        assert!(write_obj(&m, Some(&all))
            .unwrap()
            .lines()
            .any(|l| l.starts_with("l ")));
        assert!(write_obj(&m, Some(&ElementSet::faces([0]))).is_err());
    }
}
