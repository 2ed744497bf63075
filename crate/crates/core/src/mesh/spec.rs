//! Surface specifications and gluing of templates into a closed mesh.

use std::collections::BTreeMap;

use super::templates::{self, Template};
use super::{CircleId, LabeledSurfaceMesh, Region, TriMesh};
use crate::error::MeshError;
use crate::textconf;
use crate::Scalar;

/// Vertex budget for generated meshes.
pub const MAX_VERTICES: usize = 5_000_000;
pub const MAX_LEVEL: u32 = 6;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PieceSpec {
    pub genus: u32,
    pub boundary: Vec<CircleId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CircleSpec {
    pub id: CircleId,
    /// Vertex count at level 0; doubles with each level.
    pub vertices: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurfaceSpec {
    pub minus: Vec<PieceSpec>,
    pub plus: Vec<PieceSpec>,
    pub circles: Vec<CircleSpec>,
    /// Rings on each side of Γ at level 0.
    pub collar_rings: usize,
    pub level: u32,
}

fn parse_circle(tok: &str, line: usize) -> Result<CircleId, MeshError> {
    let digits = tok.strip_prefix('c').unwrap_or(tok);
    digits.parse().map(CircleId).map_err(|_| MeshError::Parse {
        line,
        msg: format!("bad circle id '{tok}'"),
    })
}

fn parse_piece(value: &str, line: usize) -> Result<PieceSpec, MeshError> {
    let (g, rest) = value.split_once(':').ok_or_else(|| MeshError::Parse {
        line,
        msg: "expected 'genus: circle ...'".into(),
    })?;
    let genus = g.trim().parse().map_err(|_| MeshError::Parse {
        line,
        msg: format!("bad genus '{}'", g.trim()),
    })?;
    let boundary = rest
        .split_whitespace()
        .map(|t| parse_circle(t.trim_end_matches(','), line))
        .collect::<Result<_, _>>()?;
    Ok(PieceSpec { genus, boundary })
}

impl SurfaceSpec {
    /// Parses a spec file:
    ///
    /// ```text
    /// [surface]
    /// collar_rings = 8
    /// [circles]
    /// c1 = 32
    /// [minus]
    /// piece = 0: c1
    /// [plus]
    /// piece = 0: c1
    /// ```
    pub fn parse(text: &str) -> Result<Self, MeshError> {
        let sections = textconf::parse(text).map_err(|e| MeshError::Parse {
            line: e.line,
            msg: e.msg,
        })?;
        let mut spec = SurfaceSpec {
            minus: Vec::new(),
            plus: Vec::new(),
            circles: Vec::new(),
            collar_rings: 8,
            level: 0,
        };
        for sec in &sections {
            for e in &sec.entries {
                let bad = |msg: String| MeshError::Parse { line: e.line, msg };
                match (sec.name.as_str(), e.key.as_str()) {
                    ("surface", "collar_rings") => {
                        spec.collar_rings = e.value.parse().map_err(|_| bad("bad collar_rings".into()))?
                    }
                    ("surface", "level") => {
                        spec.level = e.value.parse().map_err(|_| bad("bad level".into()))?
                    }
                    ("circles", k) => spec.circles.push(CircleSpec {
                        id: parse_circle(k, e.line)?,
                        vertices: e.value.parse().map_err(|_| bad("bad vertex count".into()))?,
                    }),
                    ("minus", "piece") => spec.minus.push(parse_piece(&e.value, e.line)?),
                    ("plus", "piece") => spec.plus.push(parse_piece(&e.value, e.line)?),
                    (s, k) => return Err(bad(format!("unknown key '{k}' in section [{s}]"))),
                }
            }
        }
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), MeshError> {
        if self.collar_rings < 4 {
            return Err(MeshError::Spec("collar_rings must be at least 4".into()));
        }
        if self.level > MAX_LEVEL {
            return Err(MeshError::LevelTooLarge {
                level: self.level,
                vertices: self.estimated_vertices(),
            });
        }
        if self.circles.is_empty() {
            return Err(MeshError::Spec("no dividing circles".into()));
        }
        let mut ids = BTreeMap::new();
        for c in &self.circles {
            if c.vertices < 8 {
                return Err(MeshError::CirclePairing {
                    circle: c.id,
                    detail: format!("needs at least 8 vertices, has {}", c.vertices),
                });
            }
            if ids.insert(c.id, 0usize).is_some() {
                return Err(MeshError::CirclePairing {
                    circle: c.id,
                    detail: "declared twice".into(),
                });
            }
        }
        for (side, pieces) in [("minus", &self.minus), ("plus", &self.plus)] {
            if pieces.is_empty() {
                return Err(MeshError::Spec(format!("no {side} components")));
            }
            let mut count: BTreeMap<CircleId, usize> = ids.keys().map(|&k| (k, 0)).collect();
            for p in pieces.iter() {
                if p.boundary.is_empty() {
                    return Err(MeshError::Spec(format!(
                        "a {side} component has no boundary circle"
                    )));
                }
                for c in &p.boundary {
                    *count.get_mut(c).ok_or_else(|| MeshError::CirclePairing {
                        circle: *c,
                        detail: "used as a boundary but not declared".into(),
                    })? += 1;
                }
            }
            for (c, k) in count {
                if k != 1 {
                    return Err(MeshError::CirclePairing {
                        circle: c,
                        detail: format!("appears {k} times among {side} boundaries, expected once"),
                    });
                }
            }
        }
        // Connectivity through the circles.
        let n_minus = self.minus.len();
        let mut parent: Vec<usize> = (0..n_minus + self.plus.len()).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        for c in &self.circles {
            let a = self.minus.iter().position(|p| p.boundary.contains(&c.id)).expect("paired");
            let b = n_minus + self.plus.iter().position(|p| p.boundary.contains(&c.id)).expect("paired");
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            parent[ra] = rb;
        }
        let root = find(&mut parent, 0);
        if (0..parent.len()).any(|i| find(&mut parent, i) != root) {
            return Err(MeshError::Spec("the glued surface is not connected".into()));
        }
        if self.estimated_vertices() > MAX_VERTICES {
            return Err(MeshError::LevelTooLarge {
                level: self.level,
                vertices: self.estimated_vertices(),
            });
        }
        Ok(())
    }

    /// Rough vertex count of the generated mesh.
    pub fn estimated_vertices(&self) -> usize {
        let scale = 1usize << self.level.min(20);
        let rings = self.collar_rings * scale;
        let mut total = 0usize;
        for c in &self.circles {
            let n = c.vertices * scale;
            // Collar plus about one piece-disk worth on each side.
            total = total.saturating_add(n * (2 * rings + 1));
            total = total.saturating_add(n * n / 4);
        }
        total
    }

    fn circle(&self, id: CircleId) -> &CircleSpec {
        self.circles.iter().find(|c| c.id == id).expect("validated")
    }
}

/// Builds the glued, labeled mesh described by `spec`.
///
/// Circles have spacing `π/8` at level 0 (so a 32-vertex circle has
/// circumference `4π`) and the collar coordinate has spacing
/// `1/collar_rings`; both halve per level.
pub fn build_from_spec<T: Scalar>(spec: &SurfaceSpec) -> Result<LabeledSurfaceMesh<T>, MeshError> {
    spec.validate()?;
    let scale = 1usize << spec.level;
    let h_t = T::PI() / T::lit(8.0) / T::from_usize_lossy(scale);
    let r = spec.collar_rings * scale;
    let h_s = T::one() / T::from_usize_lossy(r);
    let diag = (h_s * h_s + h_t * h_t).sqrt();

    let mut positions: Vec<[T; 3]> = Vec::new();
    let mut faces: Vec<[usize; 3]> = Vec::new();
    let mut labels: Vec<Region> = Vec::new();
    let mut lengths: BTreeMap<(usize, usize), T> = BTreeMap::new();
    let mut collar_s: Vec<Option<T>> = Vec::new();
    let mut gamma = Vec::new();
    // First and last ring of each collar.
    let mut ends: BTreeMap<CircleId, (Vec<usize>, Vec<usize>)> = BTreeMap::new();

    let mut x0 = T::zero();
    for c in &spec.circles {
        let n = c.vertices * scale;
        let radius = h_t * T::from_usize_lossy(n) / (T::lit(2.0) * T::PI());
        let base = positions.len();
        let v = |k: usize, j: usize| base + k * n + j % n;
        for k in 0..=2 * r {
            let s = T::from_f64(k as f64 - r as f64).expect("small") / T::from_usize_lossy(r);
            for j in 0..n {
                let th = T::lit(2.0) * T::PI() * T::from_usize_lossy(j) / T::from_usize_lossy(n);
                positions.push([x0 + radius * th.cos(), radius * th.sin(), s]);
                collar_s.push(Some(s));
                if k == r {
                    gamma.push(base + k * n + j);
                }
            }
        }
        for k in 0..2 * r {
            for j in 0..n {
                let (a, b, cc, d) = (v(k, j), v(k, j + 1), v(k + 1, j + 1), v(k + 1, j));
                faces.push([a, d, cc]);
                faces.push([a, cc, b]);
                labels.push(Region::Collar(c.id));
                labels.push(Region::Collar(c.id));
                for (p, q, l) in [(a, d, h_s), (d, cc, h_t), (a, cc, diag), (a, b, h_t)] {
                    lengths.insert((p.min(q), p.max(q)), l);
                }
            }
        }
        ends.insert(
            c.id,
            ((0..n).map(|j| v(0, j)).collect(), (0..n).map(|j| v(2 * r, j)).collect()),
        );
        x0 += T::lit(2.0) * radius + T::one();
    }

    let sides = [(Region::Minus, &spec.minus), (Region::Plus, &spec.plus)];
    for (region, pieces) in sides {
        for (pi, piece) in pieces.iter().enumerate() {
            let counts: Vec<usize> = piece
                .boundary
                .iter()
                .map(|&c| spec.circle(c).vertices * scale)
                .collect();
            let mut t: Template<T> = if piece.genus == 0 && counts.len() == 1 {
                templates::disk(counts[0], h_t, h_s)
            } else if piece.genus == 0 && counts.len() == 2 && counts[0] == counts[1] {
                templates::cylinder(counts[0], h_t, T::lit(2.0), 2 * r)
            } else {
                if let Some(i) = counts.iter().position(|n| n % 2 == 1) {
                    return Err(MeshError::VertexCountMismatch {
                        circle: piece.boundary[i],
                        detail: "grid templates need an even vertex count".into(),
                    });
                }
                let holes: Vec<_> = counts.iter().map(|&n| templates::hole_shape(n)).collect();
                templates::grid(piece.genus, &holes, 4 * scale, 4 * scale, h_t)
            };
            if region == Region::Plus {
                t = t.mirrored();
            }
            let mut map = vec![usize::MAX; t.positions.len()];
            for (li, &c) in t.loops.iter().zip(&piece.boundary) {
                let (first, last) = &ends[&c];
                let n = first.len();
                if li.len() != n {
                    return Err(MeshError::VertexCountMismatch {
                        circle: c,
                        detail: format!("piece loop has {} vertices, collar has {n}", li.len()),
                    });
                }
                for (k, &lv) in li.iter().enumerate() {
                    map[lv] = match region {
                        Region::Minus => first[k],
                        _ => last[(n - k) % n],
                    };
                }
            }
            let z = if region == Region::Minus { -T::lit(3.0) } else { T::lit(3.0) };
            let dx = T::from_usize_lossy(pi) * T::lit(12.0);
            for (lv, p) in t.positions.iter().enumerate() {
                if map[lv] == usize::MAX {
                    map[lv] = positions.len();
                    positions.push([p[0] + dx, p[1], p[2] + z]);
                    collar_s.push(None);
                }
            }
            for f in &t.faces {
                faces.push([map[f[0]], map[f[1]], map[f[2]]]);
                labels.push(region);
            }
            for (&(a, b), &l) in &t.lengths {
                let (ga, gb) = (map[a], map[b]);
                let k = (ga.min(gb), ga.max(gb));
                match lengths.get(&k) {
                    Some(&existing) => {
                        if (existing - l).abs() > T::lit(1e-9) * existing {
                            return Err(MeshError::Spec(format!(
                                "seam edge ({}, {}) has inconsistent lengths",
                                k.0, k.1
                            )));
                        }
                    }
                    None => {
                        lengths.insert(k, l);
                    }
                }
            }
        }
    }
    let tri = TriMesh::from_lengths(positions, faces, &lengths)?;
    LabeledSurfaceMesh::new(tri, labels, collar_s, gamma)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(minus: Vec<PieceSpec>, plus: Vec<PieceSpec>, ids: &[u32]) -> SurfaceSpec {
        SurfaceSpec {
            minus,
            plus,
            circles: ids
                .iter()
                .map(|&i| CircleSpec {
                    id: CircleId(i),
                    vertices: 16,
                })
                .collect(),
            collar_rings: 4,
            level: 0,
        }
    }

    fn p(genus: u32, cs: &[u32]) -> PieceSpec {
        PieceSpec {
            genus,
            boundary: cs.iter().map(|&c| CircleId(c)).collect(),
        }
    }

    #[test]
    fn sphere_with_two_circles_counts() {
        let s = spec(vec![p(0, &[1, 2])], vec![p(0, &[1]), p(0, &[2])], &[1, 2]);
        let m = build_from_spec::<f64>(&s).unwrap();
        assert_eq!(m.euler_characteristic(), 2);
        let mut by_side: Vec<i64> = m.pieces().iter().map(|p| p.euler).collect();
        by_side.sort();
        assert_eq!(by_side, vec![0, 1, 1]);
    }

    #[test]
    fn genus_two_from_two_handles() {
        let s = spec(vec![p(1, &[1])], vec![p(1, &[1])], &[1]);
        let m = build_from_spec::<f64>(&s).unwrap();
        assert_eq!(m.euler_characteristic(), -2);
    }

    #[test]
    fn higher_genus_and_many_holes() {
        let s = spec(vec![p(2, &[1, 2]), p(0, &[3])], vec![p(0, &[1, 2, 3])], &[1, 2, 3]);
        let m = build_from_spec::<f64>(&s).unwrap();
        // χ = (2 - 4 - 2) + 1 + (2 - 3) = -4, genus 3.
        assert_eq!(m.euler_characteristic(), -4);
    }

    #[test]
    fn pairing_errors_name_the_circle() {
        let s = spec(vec![p(0, &[1])], vec![p(0, &[1]), p(0, &[2])], &[1, 2]);
        let err = build_from_spec::<f64>(&s).unwrap_err().to_string();
        assert!(err.contains("c2"), "{err}");
        let s = spec(vec![p(0, &[1])], vec![p(0, &[7])], &[1]);
        let err = build_from_spec::<f64>(&s).unwrap_err().to_string();
        assert!(err.contains("c7"), "{err}");
    }

    #[test]
    fn disconnected_specs_are_rejected() {
        let s = spec(vec![p(0, &[1]), p(0, &[2])], vec![p(0, &[1]), p(0, &[2])], &[1, 2]);
        assert!(matches!(build_from_spec::<f64>(&s), Err(MeshError::Spec(_))));
    }

    #[test]
    fn parse_round_trip() {
        let text = "[surface]\ncollar_rings = 6\n[circles]\nc1 = 24\nc2 = 24\n[minus]\npiece = 0: c1 c2\n[plus]\npiece = 0: c1\npiece = 0: c2\n";
        let s = SurfaceSpec::parse(text).unwrap();
        assert_eq!(s.collar_rings, 6);
        assert_eq!(s.plus.len(), 2);
        assert_eq!(s.minus[0].boundary, vec![CircleId(1), CircleId(2)]);
        assert!(SurfaceSpec::parse("[surface]\nfoo = 1\n").is_err());
    }

    #[test]
    fn odd_circle_on_grid_piece_is_rejected() {
        let mut s = spec(vec![p(1, &[1])], vec![p(1, &[1])], &[1]);
        s.circles[0].vertices = 17;
        assert!(matches!(
            build_from_spec::<f64>(&s),
            Err(MeshError::VertexCountMismatch { .. })
        ));
    }
}
