//! Labeled decomposed surfaces `S- ∪ [-1,1]×Γ ∪ S+`.

mod fixtures;
mod off;
mod presets;
mod spec;
mod templates;
mod tri;

use std::collections::BTreeMap;
use std::fmt;

pub use fixtures::{flat_disk, flat_torus, round_sphere, FlatDisk, RoundSphere};
pub use off::{load_mesh, read_mesh, save_mesh, write_mesh};
pub use presets::{generate_preset, PRESETS};
pub use spec::{build_from_spec, CircleSpec, PieceSpec, SurfaceSpec, MAX_LEVEL};
pub use tri::{distance, triangle_area, TriMesh, NO_FACE};

use crate::error::MeshError;
use crate::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CircleId(pub u32);

impl fmt::Display for CircleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "c{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Region {
    Minus,
    Collar(CircleId),
    Plus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Minus,
    Plus,
}

impl Side {
    /// `-1` on the minus side, `+1` on the plus side.
    pub fn sign(self) -> i32 {
        match self {
            Side::Minus => -1,
            Side::Plus => 1,
        }
    }
}

/// Which part of the surface a vertex belongs to, by the sign the
/// constructed function must take there.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VertexClass {
    Minus,
    Gamma,
    Plus,
}

/// Ring structure of one collar, extracted during validation.
#[derive(Debug, Clone, PartialEq)]
pub struct Collar<T> {
    pub circle: CircleId,
    /// Ring coordinates, strictly increasing from -1 to 1.
    pub s: Vec<T>,
    /// Vertices of each ring, in cyclic order.
    pub rings: Vec<Vec<usize>>,
    pub faces: Vec<usize>,
    /// Length of a ring edge (circumference / vertex count).
    pub spacing: T,
}

impl<T: Scalar> Collar<T> {
    pub fn circumference(&self) -> T {
        self.spacing * T::from_usize_lossy(self.rings[0].len())
    }

    /// Number of rings on each side of Γ.
    pub fn half_rings(&self) -> usize {
        (self.s.len() - 1) / 2
    }
}

/// Connected component of `S-` or `S+`.
#[derive(Debug, Clone, PartialEq)]
pub struct PieceInfo {
    pub side: Side,
    pub faces: Vec<usize>,
    pub circles: Vec<CircleId>,
    pub euler: i64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSurfaceMesh<T> {
    tri: TriMesh<T>,
    labels: Vec<Region>,
    collar_s: Vec<Option<T>>,
    gamma: Vec<usize>,
    collars: Vec<Collar<T>>,
    pieces: Vec<PieceInfo>,
}

impl<T: Scalar> LabeledSurfaceMesh<T> {
    /// Assembles and validates a labeled mesh. `gamma` must list exactly the
    /// vertices with `s = 0`.
    pub fn new(
        tri: TriMesh<T>,
        labels: Vec<Region>,
        collar_s: Vec<Option<T>>,
        gamma: Vec<usize>,
    ) -> Result<Self, MeshError> {
        if labels.len() != tri.n_faces() {
            return Err(MeshError::Labels(format!(
                "{} labels for {} faces",
                labels.len(),
                tri.n_faces()
            )));
        }
        if collar_s.len() != tri.n_vertices() {
            return Err(MeshError::Labels(format!(
                "collar coordinates for {} of {} vertices",
                collar_s.len(),
                tri.n_vertices()
            )));
        }
        tri.validate_closed_manifold()?;
        let mut gamma = gamma;
        gamma.sort_unstable();
        gamma.dedup();
        let zero_set: Vec<usize> = (0..tri.n_vertices())
            .filter(|&v| collar_s[v] == Some(T::zero()))
            .collect();
        if gamma != zero_set {
            return Err(MeshError::Labels(
                "gamma vertices differ from the s = 0 vertices".into(),
            ));
        }
        let collars = extract_collars(&tri, &labels, &collar_s)?;
        check_region_contacts(&tri, &labels, &collar_s)?;
        let pieces = extract_pieces(&tri, &labels, &collar_s, &collars)?;
        let total = tri.euler_characteristic();
        let mut sum: i64 = pieces.iter().map(|p| p.euler).sum();
        for c in &collars {
            let (sub, _) = tri.submesh(&c.faces);
            sum += sub.euler_characteristic();
        }
        if total != sum {
            return Err(MeshError::EulerMismatch { total, sum });
        }
        Ok(Self {
            tri,
            labels,
            collar_s,
            gamma,
            collars,
            pieces,
        })
    }

    pub fn tri(&self) -> &TriMesh<T> {
        &self.tri
    }

    pub fn labels(&self) -> &[Region] {
        &self.labels
    }

    pub fn collar_s(&self) -> &[Option<T>] {
        &self.collar_s
    }

    pub fn gamma_vertices(&self) -> &[usize] {
        &self.gamma
    }

    pub fn collars(&self) -> &[Collar<T>] {
        &self.collars
    }

    pub fn pieces(&self) -> &[PieceInfo] {
        &self.pieces
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.tri.euler_characteristic()
    }

    pub fn collar(&self, circle: CircleId) -> Option<&Collar<T>> {
        self.collars.iter().find(|c| c.circle == circle)
    }

    /// Sign class of every vertex. Collar vertices are classified by `s`,
    /// region vertices by their region.
    pub fn vertex_classes(&self) -> Vec<VertexClass> {
        let mut class = vec![VertexClass::Minus; self.tri.n_vertices()];
        for (f, face) in self.tri.faces().iter().enumerate() {
            if self.labels[f] == Region::Plus {
                for &v in face {
                    class[v] = VertexClass::Plus;
                }
            }
        }
        for (v, s) in self.collar_s.iter().enumerate() {
            if let Some(s) = *s {
                class[v] = if s < T::zero() {
                    VertexClass::Minus
                } else if s > T::zero() {
                    VertexClass::Plus
                } else {
                    VertexClass::Gamma
                };
            }
        }
        class
    }

    /// Reference area form: intrinsic face areas.
    pub fn reference_area(&self) -> Vec<T> {
        (0..self.tri.n_faces()).map(|f| self.tri.face_area(f)).collect()
    }

    /// Largest relative deviation of a collar face's edge lengths from the
    /// flat product metric.
    pub fn collar_flatness_defect(&self) -> T {
        let mut worst = T::zero();
        for c in &self.collars {
            let mut rank = BTreeMap::new();
            for (k, ring) in c.rings.iter().enumerate() {
                for &v in ring {
                    rank.insert(v, k);
                }
            }
            let ds = c.s[1] - c.s[0];
            let diag = (ds * ds + c.spacing * c.spacing).sqrt();
            for &f in &c.faces {
                let fv = self.tri.faces()[f];
                let mut cross = Vec::new();
                for i in 0..3 {
                    let (a, b) = (fv[i], fv[(i + 1) % 3]);
                    let l = edge_len(&self.tri, a, b);
                    if rank[&a] == rank[&b] {
                        worst = worst.max((l - c.spacing).abs() / c.spacing);
                    } else {
                        cross.push(l);
                    }
                }
                cross.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
                worst = worst.max((cross[0] - ds).abs() / ds);
                worst = worst.max((cross[1] - diag).abs() / diag);
            }
        }
        worst
    }

    /// Mirror image of the decomposition: minus and plus regions swap and
    /// the collar coordinate changes sign. Combinatorics and lengths are
    /// untouched.
    pub fn swap_sides(&self) -> Self {
        let labels = self
            .labels
            .iter()
            .map(|r| match r {
                Region::Minus => Region::Plus,
                Region::Plus => Region::Minus,
                c => *c,
            })
            .collect();
        let collar_s = self
            .collar_s
            .iter()
            .map(|s| s.map(|x| if x == T::zero() { x } else { -x }))
            .collect();
        Self::new(self.tri.clone(), labels, collar_s, self.gamma.clone())
            .expect("mirror of a valid mesh is valid")
    }
}

fn extract_collars<T: Scalar>(
    tri: &TriMesh<T>,
    labels: &[Region],
    collar_s: &[Option<T>],
) -> Result<Vec<Collar<T>>, MeshError> {
    let mut by_circle: BTreeMap<CircleId, Vec<usize>> = BTreeMap::new();
    for (f, r) in labels.iter().enumerate() {
        if let Region::Collar(c) = r {
            by_circle.entry(*c).or_default().push(f);
        }
    }
    let mut owner: Vec<Option<CircleId>> = vec![None; tri.n_vertices()];
    let mut out = Vec::new();
    for (circle, faces) in by_circle {
        let not_cyl = |detail: String| MeshError::CollarNotCylinder { circle, detail };
        let mut verts: Vec<usize> = faces.iter().flat_map(|&f| tri.faces()[f]).collect();
        verts.sort_unstable();
        verts.dedup();
        let mut levels: Vec<T> = Vec::new();
        for &v in &verts {
            match (owner[v], collar_s[v]) {
                (Some(other), _) if other != circle => {
                    return Err(MeshError::Labels(format!(
                        "vertex {v} belongs to collars {other} and {circle}"
                    )))
                }
                (_, None) => {
                    return Err(MeshError::CollarNotMonotone {
                        circle,
                        detail: format!("vertex {v} has no collar coordinate"),
                    })
                }
                (_, Some(s)) => {
                    if !(s >= -T::one() && s <= T::one()) {
                        return Err(MeshError::CollarNotMonotone {
                            circle,
                            detail: format!("vertex {v} has s outside [-1, 1]"),
                        });
                    }
                    owner[v] = Some(circle);
                    levels.push(s);
                }
            }
        }
        levels.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        levels.dedup();
        if levels.len() < 3
            || levels[0] != -T::one()
            || *levels.last().expect("nonempty") != T::one()
            || !levels.contains(&T::zero())
        {
            return Err(MeshError::CollarNotMonotone {
                circle,
                detail: "rings must run from s = -1 through 0 to 1".into(),
            });
        }
        let rank = |v: usize| {
            let s = collar_s[v].expect("collar vertex");
            levels.iter().position(|&x| x == s).expect("level")
        };
        let mut rings: Vec<Vec<usize>> = vec![Vec::new(); levels.len()];
        for &v in &verts {
            rings[rank(v)].push(v);
        }
        // Ring edges and cross edges.
        let mut ring_adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &f in &faces {
            let fv = tri.faces()[f];
            for i in 0..3 {
                let (a, b) = (fv[i], fv[(i + 1) % 3]);
                let (ra, rb) = (rank(a), rank(b));
                if ra.abs_diff(rb) > 1 {
                    return Err(MeshError::CollarNotMonotone {
                        circle,
                        detail: format!("edge ({a}, {b}) skips a ring"),
                    });
                }
                if ra == rb {
                    ring_adj.entry(a).or_default().push(b);
                    ring_adj.entry(b).or_default().push(a);
                }
            }
            let ranks = [rank(fv[0]), rank(fv[1]), rank(fv[2])];
            if ranks.iter().all(|&r| r == ranks[0]) {
                return Err(MeshError::CollarNotMonotone {
                    circle,
                    detail: format!("face {f} lies within one ring"),
                });
            }
        }
        let n = rings[0].len();
        if n < 3 || rings.iter().any(|r| r.len() != n) {
            return Err(not_cyl("rings have different vertex counts".into()));
        }
        for a in ring_adj.values_mut() {
            a.sort_unstable();
            a.dedup();
        }
        let mut ordered = Vec::with_capacity(rings.len());
        for ring in &rings {
            let start = ring[0];
            let mut cyc = vec![start];
            let mut prev = usize::MAX;
            let mut cur = start;
            loop {
                let adj = ring_adj.get(&cur).cloned().unwrap_or_default();
                if adj.len() != 2 {
                    return Err(not_cyl(format!("ring vertex {cur} has {} ring neighbours", adj.len())));
                }
                let next = if adj[0] != prev { adj[0] } else { adj[1] };
                if next == start {
                    break;
                }
                if cyc.len() > n {
                    return Err(not_cyl("ring is not a simple cycle".into()));
                }
                prev = cur;
                cur = next;
                cyc.push(cur);
            }
            if cyc.len() != n {
                return Err(not_cyl("ring splits into several cycles".into()));
            }
            ordered.push(cyc);
        }
        // Flat product metric: uniform ring spacing, constant circumference,
        // right triangles with legs (ds, dt).
        let tol = T::lit(1e-12);
        let ds0 = levels[1] - levels[0];
        for k in 1..levels.len() - 1 {
            let ds = levels[k + 1] - levels[k];
            if (ds - ds0).abs() > tol * ds0 {
                return Err(MeshError::CollarNotMonotone {
                    circle,
                    detail: "ring spacing is not uniform".into(),
                });
            }
        }
        let gamma_ring = levels.iter().position(|&x| x == T::zero()).expect("s = 0");
        let spacing = {
            let r = &ordered[gamma_ring];
            let mut sum = T::zero();
            for i in 0..n {
                sum += edge_len(tri, r[i], r[(i + 1) % n]);
            }
            sum / T::from_usize_lossy(n)
        };
        let diag = (ds0 * ds0 + spacing * spacing).sqrt();
        let close = |x: T, y: T| (x - y).abs() <= tol * y;
        for &f in &faces {
            let fv = tri.faces()[f];
            let mut same = Vec::new();
            let mut cross = Vec::new();
            for i in 0..3 {
                let (a, b) = (fv[i], fv[(i + 1) % 3]);
                let l = edge_len(tri, a, b);
                if rank(a) == rank(b) {
                    same.push(l);
                } else {
                    cross.push(l);
                }
            }
            cross.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
            let flat = same.len() == 1
                && close(same[0], spacing)
                && close(cross[0], ds0)
                && close(cross[1], diag);
            if !flat {
                return Err(MeshError::CollarNotFlat { circle, face: f });
            }
        }
        out.push(Collar {
            circle,
            s: levels,
            rings: ordered,
            faces,
            spacing,
        });
    }
    Ok(out)
}

fn edge_len<T: Scalar>(tri: &TriMesh<T>, a: usize, b: usize) -> T {
    let key = [a.min(b), a.max(b)];
    let e = tri
        .edges()
        .binary_search(&key)
        .expect("edge of a face");
    tri.edge_lengths()[e]
}

/// Regions touch collars only along the end rings, and minus never touches
/// plus directly.
fn check_region_contacts<T: Scalar>(
    tri: &TriMesh<T>,
    labels: &[Region],
    collar_s: &[Option<T>],
) -> Result<(), MeshError> {
    let mut side: Vec<Option<Region>> = vec![None; tri.n_vertices()];
    for (f, face) in tri.faces().iter().enumerate() {
        let r = labels[f];
        if matches!(r, Region::Collar(_)) {
            continue;
        }
        for &v in face {
            if let Some(prev) = side[v] {
                if prev != r {
                    return Err(MeshError::Labels(format!(
                        "vertex {v} touches both minus and plus regions"
                    )));
                }
            }
            side[v] = Some(r);
            if let Some(s) = collar_s[v] {
                let want = if r == Region::Minus { -T::one() } else { T::one() };
                if s != want {
                    return Err(MeshError::Labels(format!(
                        "region face {f} touches collar vertex {v} away from its end ring"
                    )));
                }
            }
        }
    }
    Ok(())
}

fn extract_pieces<T: Scalar>(
    tri: &TriMesh<T>,
    labels: &[Region],
    collar_s: &[Option<T>],
    collars: &[Collar<T>],
) -> Result<Vec<PieceInfo>, MeshError> {
    let mut owner: Vec<Option<CircleId>> = vec![None; tri.n_vertices()];
    for c in collars {
        for ring in &c.rings {
            for &v in ring {
                owner[v] = Some(c.circle);
            }
        }
    }
    let mut seen = vec![false; tri.n_faces()];
    let mut pieces = Vec::new();
    for start in 0..tri.n_faces() {
        let region = labels[start];
        if seen[start] || matches!(region, Region::Collar(_)) {
            continue;
        }
        let mut faces = vec![];
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(f) = stack.pop() {
            faces.push(f);
            for &e in &tri.face_edges(f) {
                for &g in &tri.edge_faces(e) {
                    if g != NO_FACE && !seen[g] && labels[g] == region {
                        seen[g] = true;
                        stack.push(g);
                    }
                }
            }
        }
        faces.sort_unstable();
        let (sub, global) = tri.submesh(&faces);
        let mut circles: Vec<CircleId> = global
            .iter()
            .filter(|&&v| collar_s[v].is_some())
            .filter_map(|&v| owner[v])
            .collect();
        circles.sort_unstable();
        circles.dedup();
        if circles.is_empty() {
            return Err(MeshError::Labels(format!(
                "region component containing face {start} has no boundary circle"
            )));
        }
        pieces.push(PieceInfo {
            side: if region == Region::Minus {
                Side::Minus
            } else {
                Side::Plus
            },
            faces,
            circles,
            euler: sub.euler_characteristic(),
        });
    }
    Ok(pieces)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_equator_summary() {
        let m = generate_preset::<f64>("sphere-equator", 0).unwrap();
        assert_eq!(m.euler_characteristic(), 2);
        assert_eq!(m.collars().len(), 1);
        assert_eq!(m.pieces().len(), 2);
        assert!(m.pieces().iter().all(|p| p.euler == 1));
        assert_eq!(m.gamma_vertices().len(), 32);
    }

    #[test]
    fn swap_sides_is_an_involution() {
        let m = generate_preset::<f64>("sphere-equator", 0).unwrap();
        let back = m.swap_sides().swap_sides();
        assert_eq!(back.labels(), m.labels());
        assert_eq!(back.collar_s(), m.collar_s());
    }

    #[test]
    fn vertex_classes_follow_regions() {
        let m = generate_preset::<f64>("sphere-two-circles", 0).unwrap();
        let cls = m.vertex_classes();
        let n_gamma = cls.iter().filter(|&&c| c == VertexClass::Gamma).count();
        assert_eq!(n_gamma, m.gamma_vertices().len());
        for (f, face) in m.tri().faces().iter().enumerate() {
            let want = match m.labels()[f] {
                Region::Minus => VertexClass::Minus,
                Region::Plus => VertexClass::Plus,
                _ => continue,
            };
            assert!(face.iter().all(|&v| cls[v] == want));
        }
    }
}
