//! Oriented triangle meshes with intrinsic edge lengths.

use std::collections::BTreeMap;

use crate::error::MeshError;
use crate::Scalar;

/// Sentinel for "no face" in [`TriMesh::edge_faces`].
pub const NO_FACE: usize = usize::MAX;

/// Triangle mesh whose geometry is carried by edge lengths. Positions are
/// kept only for export and visualization.
///
/// Edges are stored once with `a < b` and sorted lexicographically. Local
/// edge `i` of a face is the edge opposite its local vertex `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct TriMesh<T> {
    positions: Vec<[T; 3]>,
    faces: Vec<[usize; 3]>,
    edges: Vec<[usize; 2]>,
    lengths: Vec<T>,
    face_edges: Vec<[usize; 3]>,
    face_signs: Vec<[i8; 3]>,
    edge_faces: Vec<[usize; 2]>,
}

/// Area of a triangle from its side lengths (Kahan's stable Heron formula).
/// Returns `None` unless the strict triangle inequality holds.
pub fn triangle_area<T: Scalar>(l: [T; 3]) -> Option<T> {
    let mut s = l;
    s.sort_by(|x, y| y.partial_cmp(x).unwrap_or(std::cmp::Ordering::Equal));
    let [a, b, c] = s;
    if !(c > T::zero()) || !(a < b + c) {
        return None;
    }
    let p = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c));
    if p > T::zero() {
        Some(p.sqrt() / T::lit(4.0))
    } else {
        None
    }
}

fn key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

impl<T: Scalar> TriMesh<T> {
    /// Builds a mesh from faces and an explicit length table keyed by
    /// unordered vertex pairs `(min, max)`.
    pub fn from_lengths(
        positions: Vec<[T; 3]>,
        faces: Vec<[usize; 3]>,
        table: &BTreeMap<(usize, usize), T>,
    ) -> Result<Self, MeshError> {
        let nv = positions.len();
        let mut edge_map: BTreeMap<(usize, usize), Vec<(usize, i8)>> = BTreeMap::new();
        for (fi, f) in faces.iter().enumerate() {
            for &v in f {
                if v >= nv {
                    return Err(MeshError::VertexIndex { face: fi, vertex: v });
                }
            }
            if f[0] == f[1] || f[1] == f[2] || f[0] == f[2] {
                return Err(MeshError::TriangleInequality { face: fi });
            }
            for i in 0..3 {
                let a = f[(i + 1) % 3];
                let b = f[(i + 2) % 3];
                let sign = if a < b { 1 } else { -1 };
                edge_map.entry(key(a, b)).or_default().push((fi, sign));
            }
        }
        let mut edges = Vec::with_capacity(edge_map.len());
        let mut lengths = Vec::with_capacity(edge_map.len());
        let mut edge_faces = Vec::with_capacity(edge_map.len());
        let mut index = BTreeMap::new();
        for (k, inc) in &edge_map {
            if inc.len() > 2 {
                return Err(MeshError::NotClosed(k.0, k.1, inc.len()));
            }
            if inc.len() == 2 && inc[0].1 == inc[1].1 {
                return Err(MeshError::Orientation(k.0, k.1));
            }
            let len = *table.get(k).ok_or(MeshError::EdgeLength(k.0, k.1))?;
            if !(len > T::zero()) || !len.is_finite() {
                return Err(MeshError::EdgeLength(k.0, k.1));
            }
            index.insert(*k, edges.len());
            edges.push([k.0, k.1]);
            lengths.push(len);
            // Slot 0 holds the face that traverses the edge from a to b.
            let mut ef = [NO_FACE; 2];
            for &(f, s) in inc {
                ef[if s > 0 { 0 } else { 1 }] = f;
            }
            edge_faces.push(ef);
        }
        let mut face_edges = Vec::with_capacity(faces.len());
        let mut face_signs = Vec::with_capacity(faces.len());
        for f in &faces {
            let mut fe = [0; 3];
            let mut fs = [0i8; 3];
            for i in 0..3 {
                let a = f[(i + 1) % 3];
                let b = f[(i + 2) % 3];
                fe[i] = index[&key(a, b)];
                fs[i] = if a < b { 1 } else { -1 };
            }
            face_edges.push(fe);
            face_signs.push(fs);
        }
        let mesh = Self {
            positions,
            faces,
            edges,
            lengths,
            face_edges,
            face_signs,
            edge_faces,
        };
        for fi in 0..mesh.n_faces() {
            if triangle_area(mesh.face_lengths(fi)).is_none() {
                return Err(MeshError::TriangleInequality { face: fi });
            }
        }
        Ok(mesh)
    }

    /// Builds a mesh whose edge lengths are the Euclidean distances between
    /// the given positions.
    pub fn from_positions(
        positions: Vec<[T; 3]>,
        faces: Vec<[usize; 3]>,
    ) -> Result<Self, MeshError> {
        let mut table = BTreeMap::new();
        for (fi, f) in faces.iter().enumerate() {
            for i in 0..3 {
                let (a, b) = key(f[i], f[(i + 1) % 3]);
                if a >= positions.len() || b >= positions.len() {
                    return Err(MeshError::VertexIndex {
                        face: fi,
                        vertex: a.max(b),
                    });
                }
                table
                    .entry((a, b))
                    .or_insert_with(|| distance(positions[a], positions[b]));
            }
        }
        Self::from_lengths(positions, faces, &table)
    }
}

impl<T> TriMesh<T> {

    pub fn n_vertices(&self) -> usize {
        self.positions.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn n_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn positions(&self) -> &[[T; 3]] {
        &self.positions
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn edge_lengths(&self) -> &[T] {
        &self.lengths
    }

    pub fn face_edges(&self, f: usize) -> [usize; 3] {
        self.face_edges[f]
    }

    /// `+1` where the face traverses its local edge from the lower to the
    /// higher vertex index.
    pub fn face_edge_signs(&self, f: usize) -> [i8; 3] {
        self.face_signs[f]
    }

    /// `[left, right]` faces of an edge `a -> b` (`left` traverses it as
    /// `a -> b`). Either slot may be [`NO_FACE`] on an open mesh.
    pub fn edge_faces(&self, e: usize) -> [usize; 2] {
        self.edge_faces[e]
    }
}

impl<T: Scalar> TriMesh<T> {

    pub fn face_lengths(&self, f: usize) -> [T; 3] {
        let fe = self.face_edges[f];
        [self.lengths[fe[0]], self.lengths[fe[1]], self.lengths[fe[2]]]
    }

    pub fn face_area(&self, f: usize) -> T {
        triangle_area(self.face_lengths(f)).expect("validated face")
    }

    /// Cotangents of the interior angles, indexed by local vertex.
    pub fn face_cotangents(&self, f: usize) -> [T; 3] {
        let l = self.face_lengths(f);
        let four_a = T::lit(4.0) * self.face_area(f);
        let sq = [l[0] * l[0], l[1] * l[1], l[2] * l[2]];
        [
            (sq[1] + sq[2] - sq[0]) / four_a,
            (sq[2] + sq[0] - sq[1]) / four_a,
            (sq[0] + sq[1] - sq[2]) / four_a,
        ]
    }
}

impl<T> TriMesh<T> {

    pub fn is_closed(&self) -> bool {
        self.edge_faces.iter().all(|ef| ef[1] != NO_FACE && ef[0] != NO_FACE)
    }

    /// Indices of edges with a single incident face.
    pub fn boundary_edges(&self) -> Vec<usize> {
        (0..self.n_edges())
            .filter(|&e| self.edge_faces[e].contains(&NO_FACE))
            .collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        let used = self.used_vertices();
        used.iter().filter(|&&u| u).count() as i64 - self.n_edges() as i64
            + self.n_faces() as i64
    }

    fn used_vertices(&self) -> Vec<bool> {
        let mut used = vec![false; self.n_vertices()];
        for f in &self.faces {
            for &v in f {
                used[v] = true;
            }
        }
        used
    }

    /// Sorted vertex neighbors.
    pub fn vertex_neighbors(&self) -> Vec<Vec<usize>> {
        let mut nb = vec![Vec::new(); self.n_vertices()];
        for &[a, b] in &self.edges {
            nb[a].push(b);
            nb[b].push(a);
        }
        for n in &mut nb {
            n.sort_unstable();
        }
        nb
    }

    pub fn vertex_faces(&self) -> Vec<Vec<usize>> {
        let mut vf = vec![Vec::new(); self.n_vertices()];
        for (fi, f) in self.faces.iter().enumerate() {
            for &v in f {
                vf[v].push(fi);
            }
        }
        vf
    }

    /// Checks that the mesh is a closed, connected, oriented 2-manifold
    /// without isolated vertices.
    pub fn validate_closed_manifold(&self) -> Result<(), MeshError> {
        for (e, ef) in self.edge_faces.iter().enumerate() {
            if ef.contains(&NO_FACE) {
                let [a, b] = self.edges[e];
                return Err(MeshError::NotClosed(a, b, 1));
            }
        }
        self.check_vertex_links()?;
        if !self.is_connected() {
            return Err(MeshError::Disconnected);
        }
        Ok(())
    }

    /// Each vertex star must be a single fan (disk or half-disk).
    pub fn check_vertex_links(&self) -> Result<(), MeshError> {
        let used = self.used_vertices();
        if let Some(v) = used.iter().position(|&u| !u) {
            return Err(MeshError::NonManifoldVertex(v));
        }
        let vf = self.vertex_faces();
        for (v, star) in vf.iter().enumerate() {
            // Walk the fan through shared edges; all faces must be reached.
            let mut seen = vec![false; star.len()];
            let mut stack = vec![0usize];
            seen[0] = true;
            let mut count = 1;
            while let Some(i) = stack.pop() {
                let fi = star[i];
                for j in 0..star.len() {
                    if seen[j] {
                        continue;
                    }
                    let shared = self.faces[fi]
                        .iter()
                        .filter(|&&x| x != v && self.faces[star[j]].contains(&x))
                        .count();
                    if shared > 0 {
                        seen[j] = true;
                        count += 1;
                        stack.push(j);
                    }
                }
            }
            if count != star.len() {
                return Err(MeshError::NonManifoldVertex(v));
            }
        }
        Ok(())
    }

    pub fn is_connected(&self) -> bool {
        if self.faces.is_empty() {
            return false;
        }
        let mut seen = vec![false; self.n_faces()];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(f) = stack.pop() {
            for &e in &self.face_edges[f] {
                for &g in &self.edge_faces[e] {
                    if g != NO_FACE && !seen[g] {
                        seen[g] = true;
                        stack.push(g);
                    }
                }
            }
        }
        seen.iter().all(|&s| s)
    }
}

impl<T: Scalar> TriMesh<T> {

    /// Same combinatorics with every edge length multiplied by `k`.
    pub fn scaled(&self, k: T) -> Self {
        let mut m = self.clone();
        for l in &mut m.lengths {
            *l *= k;
        }
        m
    }

    /// Same mesh with every face orientation reversed.
    pub fn reversed(&self) -> Self {
        let faces = self.faces.iter().map(|f| [f[0], f[2], f[1]]).collect();
        let mut table = BTreeMap::new();
        for (e, &[a, b]) in self.edges.iter().enumerate() {
            table.insert((a, b), self.lengths[e]);
        }
        Self::from_lengths(self.positions.clone(), faces, &table).expect("reversal keeps validity")
    }

    /// Sub-mesh on a subset of faces with compacted vertex indices. Returns
    /// the sub-mesh and the map from local to global vertex indices.
    pub fn submesh(&self, face_ids: &[usize]) -> (Self, Vec<usize>) {
        let mut local = vec![usize::MAX; self.n_vertices()];
        let mut global = Vec::new();
        let mut faces = Vec::with_capacity(face_ids.len());
        let mut used: Vec<usize> = face_ids.iter().flat_map(|&f| self.faces[f]).collect();
        used.sort_unstable();
        used.dedup();
        for v in used {
            local[v] = global.len();
            global.push(v);
        }
        let mut table = BTreeMap::new();
        for &f in face_ids {
            let g = self.faces[f];
            faces.push([local[g[0]], local[g[1]], local[g[2]]]);
            for i in 0..3 {
                let e = self.face_edges[f][i];
                let [a, b] = self.edges[e];
                table.insert(key(local[a], local[b]), self.lengths[e]);
            }
        }
        let positions = global.iter().map(|&v| self.positions[v]).collect();
        let sub = Self::from_lengths(positions, faces, &table).expect("submesh of a valid mesh");
        (sub, global)
    }
}

pub fn distance<T: Scalar>(p: [T; 3], q: [T; 3]) -> T {
    let d = [p[0] - q[0], p[1] - q[1], p[2] - q[2]];
    (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tetra() -> TriMesh<f64> {
        let p = vec![
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, 0.0, 1.0],
        ];
        let f = vec![[0, 2, 1], [0, 1, 3], [1, 2, 3], [0, 3, 2]];
        TriMesh::from_positions(p, f).unwrap()
    }

    #[test]
    fn tetrahedron_is_a_sphere() {
        let m = tetra();
        m.validate_closed_manifold().unwrap();
        assert_eq!(m.euler_characteristic(), 2);
        assert_eq!(m.n_edges(), 6);
    }

    #[test]
    fn flipped_face_is_rejected() {
        let p = tetra().positions().to_vec();
        let f = vec![[0, 1, 2], [0, 1, 3], [1, 2, 3], [0, 3, 2]];
        assert!(matches!(
            TriMesh::from_positions(p, f),
            Err(MeshError::Orientation(..))
        ));
    }

    #[test]
    fn open_mesh_is_not_closed() {
        let p = tetra().positions().to_vec();
        let m = TriMesh::from_positions(p, vec![[0, 2, 1], [0, 1, 3]]).unwrap();
        let err = m.validate_closed_manifold().unwrap_err();
        assert!(err.to_string().contains("not a closed manifold"));
        assert_eq!(m.boundary_edges().len(), 4);
    }

    #[test]
    fn heron_matches_right_triangle() {
        let a = triangle_area([3.0, 4.0, 5.0]).unwrap();
        assert!((a - 6.0f64).abs() < 1e-14);
        assert!(triangle_area([1.0, 1.0, 2.0f64]).is_none());
    }

    #[test]
    fn equilateral_cotangents() {
        let m = TriMesh::<f64>::from_positions(
            vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.5, 3f64.sqrt() / 2.0, 0.0]],
            vec![[0, 1, 2]],
        )
        .unwrap();
        for c in m.face_cotangents(0) {
            assert!((c - 1.0 / 3f64.sqrt()).abs() < 1e-14);
        }
    }

    #[test]
    fn edge_faces_orientation() {
        let m = tetra();
        for e in 0..m.n_edges() {
            let [l, r] = m.edge_faces(e);
            let [a, b] = m.edges()[e];
            let fl = m.faces()[l];
            let i = fl.iter().position(|&x| x == a).unwrap();
            assert_eq!(fl[(i + 1) % 3], b);
            assert_ne!(r, NO_FACE);
        }
    }
}
