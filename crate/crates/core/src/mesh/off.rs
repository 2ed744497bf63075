//! Labeled OFF files.
//!
//! Standard OFF header, vertex and face blocks, then `#LABELS` (one token per
//! face: `M`, `C:<id>` or `P`), `#COLLAR_S` (`vertex s` pairs), `#GAMMA`
//! (vertex indices) and `#EDGE_LENGTHS` (`a b length` triples). Without
//! the edge-length section, lengths are taken from the positions. Reals are
//! written with 17 significant digits, so a round trip is exact.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::Path;

use super::{CircleId, LabeledSurfaceMesh, Region, TriMesh};
use crate::error::MeshError;
use crate::Scalar;

pub fn write_mesh<T: Scalar, W: Write>(mesh: &LabeledSurfaceMesh<T>, mut w: W) -> std::io::Result<()> {
    let tri = mesh.tri();
    let mut s = String::new();
    let _ = writeln!(s, "OFF");
    let _ = writeln!(s, "{} {} {}", tri.n_vertices(), tri.n_faces(), tri.n_edges());
    for p in tri.positions() {
        let _ = writeln!(s, "{:.16e} {:.16e} {:.16e}", p[0], p[1], p[2]);
    }
    for f in tri.faces() {
        let _ = writeln!(s, "3 {} {} {}", f[0], f[1], f[2]);
    }
    let _ = writeln!(s, "#LABELS");
    for r in mesh.labels() {
        let _ = match r {
            Region::Minus => writeln!(s, "M"),
            Region::Plus => writeln!(s, "P"),
            Region::Collar(c) => writeln!(s, "C:{}", c.0),
        };
    }
    let _ = writeln!(s, "#COLLAR_S");
    for (v, cs) in mesh.collar_s().iter().enumerate() {
        if let Some(x) = cs {
            let _ = writeln!(s, "{v} {x:.16e}");
        }
    }
    let _ = writeln!(s, "#GAMMA");
    for v in mesh.gamma_vertices() {
        let _ = writeln!(s, "{v}");
    }
    let _ = writeln!(s, "#EDGE_LENGTHS");
    for (e, &[a, b]) in tri.edges().iter().enumerate() {
        let _ = writeln!(s, "{a} {b} {:.16e}", tri.edge_lengths()[e]);
    }
    w.write_all(s.as_bytes())
}

pub fn save_mesh<T: Scalar>(mesh: &LabeledSurfaceMesh<T>, path: impl AsRef<Path>) -> Result<(), MeshError> {
    let f = std::fs::File::create(path)?;
    let mut w = std::io::BufWriter::new(f);
    write_mesh(mesh, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn load_mesh<T: Scalar>(path: impl AsRef<Path>) -> Result<LabeledSurfaceMesh<T>, MeshError> {
    read_mesh(std::fs::File::open(path)?)
}

#[derive(PartialEq, Clone, Copy)]
enum Block {
    Body,
    Labels,
    CollarS,
    Gamma,
    Lengths,
}

fn real<T: Scalar>(tok: &str, line: usize) -> Result<T, MeshError> {
    tok.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .and_then(T::from_f64)
        .ok_or_else(|| MeshError::Parse {
            line,
            msg: format!("bad number '{tok}'"),
        })
}

fn index(tok: &str, line: usize, bound: usize, what: &str) -> Result<usize, MeshError> {
    match tok.parse::<usize>() {
        Ok(i) if i < bound => Ok(i),
        _ => Err(MeshError::Parse {
            line,
            msg: format!("bad {what} index '{tok}'"),
        }),
    }
}

pub fn read_mesh<T: Scalar, R: Read>(mut r: R) -> Result<LabeledSurfaceMesh<T>, MeshError> {
    let mut text = String::new();
    r.read_to_string(&mut text)?;
    let mut header_seen = false;
    let mut counts: Option<(usize, usize)> = None;
    let mut positions: Vec<[T; 3]> = Vec::new();
    let mut faces: Vec<[usize; 3]> = Vec::new();
    let mut labels = Vec::new();
    let mut collar_s: Vec<Option<T>> = Vec::new();
    let mut gamma = Vec::new();
    let mut lengths: BTreeMap<(usize, usize), T> = BTreeMap::new();
    let mut block = Block::Body;
    let mut last_line = 0;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        last_line = line;
        let t = raw.trim();
        if t.is_empty() {
            continue;
        }
        if let Some(tag) = t.strip_prefix('#') {
            let next = match tag.trim() {
                "LABELS" => Some(Block::Labels),
                "COLLAR_S" => Some(Block::CollarS),
                "GAMMA" => Some(Block::Gamma),
                "EDGE_LENGTHS" => Some(Block::Lengths),
                _ => None,
            };
            if let Some(b) = next {
                let (nv, nf) = counts.unwrap_or((0, 0));
                if positions.len() != nv || faces.len() != nf {
                    return Err(MeshError::Parse {
                        line,
                        msg: "section starts before the vertex and face blocks are complete".into(),
                    });
                }
                block = b;
            }
            continue;
        }
        let toks: Vec<&str> = t.split_whitespace().collect();
        let perr = |msg: &str| MeshError::Parse {
            line,
            msg: msg.to_string(),
        };
        match block {
            Block::Body => {
                if !header_seen {
                    if toks[0] != "OFF" {
                        return Err(perr("missing OFF header"));
                    }
                    header_seen = true;
                    continue;
                }
                match counts {
                    None => {
                        if toks.len() < 2 {
                            return Err(perr("expected vertex and face counts"));
                        }
                        let nv = toks[0].parse().map_err(|_| perr("bad vertex count"))?;
                        let nf = toks[1].parse().map_err(|_| perr("bad face count"))?;
                        counts = Some((nv, nf));
                        collar_s = vec![None; nv];
                    }
                    Some((nv, nf)) => {
                        if positions.len() < nv {
                            if toks.len() != 3 {
                                return Err(perr("vertex line needs 3 coordinates"));
                            }
                            positions.push([
                                real(toks[0], line)?,
                                real(toks[1], line)?,
                                real(toks[2], line)?,
                            ]);
                        } else if faces.len() < nf {
                            if toks.len() != 4 || toks[0] != "3" {
                                return Err(perr("only triangles are supported"));
                            }
                            faces.push([
                                index(toks[1], line, nv, "vertex")?,
                                index(toks[2], line, nv, "vertex")?,
                                index(toks[3], line, nv, "vertex")?,
                            ]);
                        } else {
                            return Err(perr("unexpected data after the face block"));
                        }
                    }
                }
            }
            Block::Labels => {
                for tok in toks {
                    let r = match tok {
                        "M" => Region::Minus,
                        "P" => Region::Plus,
                        _ => {
                            let id = tok
                                .strip_prefix("C:")
                                .and_then(|x| x.parse().ok())
                                .ok_or_else(|| perr(&format!("bad label '{tok}'")))?;
                            Region::Collar(CircleId(id))
                        }
                    };
                    labels.push(r);
                }
            }
            Block::CollarS => {
                if toks.len() != 2 {
                    return Err(perr("expected 'vertex s'"));
                }
                let v = index(toks[0], line, collar_s.len(), "vertex")?;
                collar_s[v] = Some(real(toks[1], line)?);
            }
            Block::Gamma => {
                for tok in toks {
                    gamma.push(index(tok, line, collar_s.len(), "vertex")?);
                }
            }
            Block::Lengths => {
                if toks.len() != 3 {
                    return Err(perr("expected 'a b length'"));
                }
                let a = index(toks[0], line, collar_s.len(), "vertex")?;
                let b = index(toks[1], line, collar_s.len(), "vertex")?;
                lengths.insert((a.min(b), a.max(b)), real(toks[2], line)?);
            }
        }
    }
    let (nv, nf) = counts.ok_or(MeshError::Parse {
        line: last_line,
        msg: "missing counts".into(),
    })?;
    if positions.len() != nv || faces.len() != nf {
        return Err(MeshError::Parse {
            line: last_line,
            msg: "file ends inside the vertex or face block".into(),
        });
    }
    let tri = if lengths.is_empty() {
        TriMesh::from_positions(positions, faces)?
    } else {
        TriMesh::from_lengths(positions, faces, &lengths)?
    };
    LabeledSurfaceMesh::new(tri, labels, collar_s, gamma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::generate_preset;

    fn to_string(m: &LabeledSurfaceMesh<f64>) -> String {
        let mut buf = Vec::new();
        write_mesh(m, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn round_trip_is_exact() {
        let m = generate_preset::<f64>("sphere-equator", 0).unwrap();
        let text = to_string(&m);
        let back: LabeledSurfaceMesh<f64> = read_mesh(text.as_bytes()).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn dropped_face_is_not_closed() {
        let m = generate_preset::<f64>("sphere-equator", 0).unwrap();
        let text = to_string(&m);
        let nf = m.tri().n_faces();
        let nv = m.tri().n_vertices();
        // Remove the last face line and its label.
        let mut lines: Vec<String> = text.lines().map(String::from).collect();
        lines[1] = format!("{} {} 0", nv, nf - 1);
        lines.remove(2 + nv + nf - 1);
        let labels = lines.iter().position(|l| l == "#LABELS").unwrap();
        lines.remove(labels + nf);
        let err = read_mesh::<f64, _>(lines.join("\n").as_bytes()).unwrap_err();
        assert!(err.to_string().contains("not a closed manifold"), "{err}");
    }

    #[test]
    fn shuffled_collar_coordinate_is_rejected() {
        let m = generate_preset::<f64>("sphere-equator", 0).unwrap();
        let text = to_string(&m);
        let col = m.collars()[0].rings[3][5];
        let from = format!("{col} {:.16e}", m.collar_s()[col].unwrap());
        let to = format!("{col} {:.16e}", 0.9);
        let err = read_mesh::<f64, _>(text.replace(&from, &to).as_bytes()).unwrap_err();
        assert!(err.to_string().contains("collar coordinate not monotone"), "{err}");
    }

    #[test]
    fn parse_errors_report_lines() {
        match read_mesh::<f64, _>("OFF\n3 1 0\n0 0 0\n1 x 0\n".as_bytes()) {
            Err(MeshError::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("{other:?}"),
        }
    }
}
