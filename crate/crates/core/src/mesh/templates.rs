//! Region templates: flat pieces with boundary loops.
//!
//! Every template lists its boundary loops in the induced orientation
//! (piece on the left), starting at the lowest local vertex index.

use std::collections::BTreeMap;

use crate::Scalar;

#[derive(Debug, Clone)]
pub(crate) struct Template<T> {
    pub positions: Vec<[T; 3]>,
    pub faces: Vec<[usize; 3]>,
    pub lengths: BTreeMap<(usize, usize), T>,
    pub loops: Vec<Vec<usize>>,
}

fn key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

impl<T: Scalar> Template<T> {
    fn push_face(&mut self, f: [usize; 3], l: [T; 3]) {
        // l[i] is the length of the edge f[i] -> f[i+1].
        for i in 0..3 {
            self.lengths.entry(key(f[i], f[(i + 1) % 3])).or_insert(l[i]);
        }
        self.faces.push(f);
    }

    fn lengths_from_positions(&mut self) {
        for f in &self.faces {
            for i in 0..3 {
                let (a, b) = key(f[i], f[(i + 1) % 3]);
                let d = super::distance(self.positions[a], self.positions[b]);
                self.lengths.entry((a, b)).or_insert(d);
            }
        }
    }

    /// Opposite orientation: faces and loops are reversed, loops keep their
    /// base point.
    pub fn mirrored(mut self) -> Self {
        for f in &mut self.faces {
            f.swap(1, 2);
        }
        for l in &mut self.loops {
            l[1..].reverse();
        }
        self
    }

    fn rotate_loops(&mut self) {
        for l in &mut self.loops {
            let i = (0..l.len()).min_by_key(|&i| l[i]).expect("nonempty loop");
            l.rotate_left(i);
        }
    }

    /// Drops unreferenced vertices and renumbers the rest in order.
    fn compact(&mut self) {
        let mut used = vec![false; self.positions.len()];
        for f in &self.faces {
            for &v in f {
                used[v] = true;
            }
        }
        let mut map = vec![usize::MAX; used.len()];
        let mut positions = Vec::new();
        for (v, &u) in used.iter().enumerate() {
            if u {
                map[v] = positions.len();
                positions.push(self.positions[v]);
            }
        }
        for f in &mut self.faces {
            for v in f.iter_mut() {
                *v = map[*v];
            }
        }
        self.lengths = std::mem::take(&mut self.lengths)
            .into_iter()
            .filter(|((a, b), _)| used[*a] && used[*b])
            .map(|((a, b), l)| (key(map[a], map[b]), l))
            .collect();
        for l in &mut self.loops {
            for v in l.iter_mut() {
                *v = map[*v];
            }
        }
        self.positions = positions;
        self.rotate_loops();
    }

    fn empty() -> Self {
        Self {
            positions: Vec::new(),
            faces: Vec::new(),
            lengths: BTreeMap::new(),
            loops: Vec::new(),
        }
    }
}

/// Flat polar disk whose boundary is a regular `n`-gon with side `h_t`.
/// Rings are spaced about `h_r` apart; the spoke count halves towards the
/// center whenever the arc spacing drops below half of `h_t`.
pub(crate) fn disk<T: Scalar>(n: usize, h_t: T, h_r: T) -> Template<T> {
    let pi = T::PI();
    let radius = h_t / (T::lit(2.0) * (pi / T::from_usize_lossy(n)).sin());
    let rings = (radius / h_r).round().to_usize().unwrap_or(2).max(2);
    let mut counts = vec![0usize; rings + 1];
    counts[rings] = n;
    for k in (1..rings).rev() {
        let c = counts[k + 1];
        let r = radius * T::from_usize_lossy(k) / T::from_usize_lossy(rings);
        let arc = T::lit(2.0) * pi * r / T::from_usize_lossy(c);
        counts[k] = if arc < T::lit(0.5) * h_t && c % 2 == 0 && c / 2 >= 8 {
            c / 2
        } else {
            c
        };
    }
    let mut t = Template::empty();
    t.positions.push([T::zero(); 3]);
    let mut start = vec![0usize; rings + 1];
    for k in 1..=rings {
        start[k] = t.positions.len();
        let r = radius * T::from_usize_lossy(k) / T::from_usize_lossy(rings);
        for j in 0..counts[k] {
            let th = T::lit(2.0) * pi * T::from_usize_lossy(j) / T::from_usize_lossy(counts[k]);
            t.positions.push([r * th.cos(), r * th.sin(), T::zero()]);
        }
    }
    let v = |k: usize, j: usize| start[k] + j % counts[k];
    for j in 0..counts[1] {
        t.faces.push([0, v(1, j), v(1, j + 1)]);
    }
    for k in 1..rings {
        let (ci, co) = (counts[k], counts[k + 1]);
        if co == ci {
            for j in 0..ci {
                t.faces.push([v(k, j), v(k + 1, j), v(k + 1, j + 1)]);
                t.faces.push([v(k, j), v(k + 1, j + 1), v(k, j + 1)]);
            }
        } else {
            for j in 0..ci {
                t.faces.push([v(k, j), v(k + 1, 2 * j), v(k + 1, 2 * j + 1)]);
                t.faces.push([v(k, j), v(k + 1, 2 * j + 1), v(k, j + 1)]);
                t.faces.push([v(k, j + 1), v(k + 1, 2 * j + 1), v(k + 1, 2 * j + 2)]);
            }
        }
    }
    t.lengths_from_positions();
    for j in 0..n {
        t.lengths.insert(key(v(rings, j), v(rings, j + 1)), h_t);
    }
    t.loops.push((0..n).map(|j| v(rings, j)).collect());
    t.rotate_loops();
    t
}

/// Flat cylinder `[0, length] × (circle of n·h_t)` with `rings` cells
/// across. Loop 0 is the `x = 0` end, loop 1 the `x = length` end.
pub(crate) fn cylinder<T: Scalar>(n: usize, h_t: T, length: T, rings: usize) -> Template<T> {
    let hx = length / T::from_usize_lossy(rings);
    let diag = (hx * hx + h_t * h_t).sqrt();
    let radius = h_t * T::from_usize_lossy(n) / (T::lit(2.0) * T::PI());
    let mut t = Template::empty();
    for k in 0..=rings {
        for j in 0..n {
            let th = T::lit(2.0) * T::PI() * T::from_usize_lossy(j) / T::from_usize_lossy(n);
            t.positions
                .push([hx * T::from_usize_lossy(k), radius * th.cos(), radius * th.sin()]);
        }
    }
    let v = |k: usize, j: usize| k * n + j % n;
    for k in 0..rings {
        for j in 0..n {
            let (a, b, c, d) = (v(k, j), v(k, j + 1), v(k + 1, j + 1), v(k + 1, j));
            t.push_face([a, d, c], [hx, h_t, diag]);
            t.push_face([a, c, b], [diag, hx, h_t]);
        }
    }
    t.loops.push((0..n).map(|j| v(0, (n - j) % n)).collect());
    t.loops.push((0..n).map(|j| v(rings, j)).collect());
    t.rotate_loops();
    t
}

/// Rectangular hole of `a × b` cells whose perimeter has `n` vertices.
pub(crate) fn hole_shape(n: usize) -> (usize, usize) {
    let a = n / 4;
    (a, n / 2 - a)
}

/// Square grid surface with rectangular holes. Genus 0 uses a pillowcase
/// (two grids glued along the rim, holes in the top sheet); genus `g ≥ 1`
/// uses a periodic grid with `g - 1` pairs of square holes glued into
/// handles. `holes` are the cell sizes of the boundary holes, `handle` the
/// side of a handle hole and `margin` the cell gap between holes.
pub(crate) fn grid<T: Scalar>(
    genus: u32,
    holes: &[(usize, usize)],
    handle: usize,
    margin: usize,
    h: T,
) -> Template<T> {
    let periodic = genus >= 1;
    let mut all: Vec<(usize, usize)> = holes.to_vec();
    let n_handles = if periodic { genus as usize - 1 } else { 0 };
    for _ in 0..2 * n_handles {
        all.push((handle, handle));
    }
    let edge = if periodic { margin / 2 } else { margin };
    let mut origins = Vec::new();
    let mut x = edge;
    for &(a, _) in &all {
        origins.push((x, edge));
        x += a + margin;
    }
    let max_b = all.iter().map(|&(_, b)| b).max().unwrap_or(0);
    let (w, hgt) = if periodic {
        (x - margin + edge.max(margin - edge), max_b + margin)
    } else {
        (x - margin + edge, max_b + 2 * edge)
    };
    let in_hole = |i: usize, j: usize| {
        all.iter()
            .zip(&origins)
            .any(|(&(a, b), &(x0, y0))| i >= x0 && i < x0 + a && j >= y0 && j < y0 + b)
    };

    let mut t = Template::empty();
    let (nx, ny) = if periodic { (w, hgt) } else { (w + 1, hgt + 1) };
    for j in 0..ny {
        for i in 0..nx {
            t.positions
                .push([h * T::from_usize_lossy(i), h * T::from_usize_lossy(j), T::zero()]);
        }
    }
    let top = |i: usize, j: usize| (j % ny) * nx + i % nx;
    let diag = h * T::SQRT_2();
    for j in 0..hgt {
        for i in 0..w {
            if in_hole(i, j) {
                continue;
            }
            let (v00, v10, v11, v01) = (top(i, j), top(i + 1, j), top(i + 1, j + 1), top(i, j + 1));
            t.push_face([v00, v10, v11], [h, h, diag]);
            t.push_face([v00, v11, v01], [diag, h, h]);
        }
    }
    if !periodic {
        let base = t.positions.len();
        let mut bottom = vec![usize::MAX; nx * ny];
        for j in 1..hgt {
            for i in 1..w {
                bottom[j * nx + i] = base + (j - 1) * (w - 1) + (i - 1);
                t.positions.push([
                    h * T::from_usize_lossy(i),
                    h * T::from_usize_lossy(j),
                    -h,
                ]);
            }
        }
        let bot = |i: usize, j: usize| {
            if i == 0 || j == 0 || i == w || j == hgt {
                top(i, j)
            } else {
                bottom[j * nx + i]
            }
        };
        for j in 0..hgt {
            for i in 0..w {
                let (v00, v10, v11, v01) = (bot(i, j), bot(i + 1, j), bot(i + 1, j + 1), bot(i, j + 1));
                // Anti-diagonal, so corner cells never share a diagonal
                // with the top sheet.
                t.push_face([v00, v01, v10], [h, diag, h]);
                t.push_face([v10, v01, v11], [diag, h, h]);
            }
        }
    }
    let rect_loop = |(a, b): (usize, usize), (x0, y0): (usize, usize)| {
        let mut l = Vec::with_capacity(2 * (a + b));
        for k in 0..b {
            l.push(top(x0, y0 + k));
        }
        for k in 0..a {
            l.push(top(x0 + k, y0 + b));
        }
        for k in 0..b {
            l.push(top(x0 + a, y0 + b - k));
        }
        for k in 0..a {
            l.push(top(x0 + a - k, y0));
        }
        l
    };
    for (hole, &o) in holes.iter().zip(&origins) {
        t.loops.push(rect_loop(*hole, o));
    }
    // Glue handle hole pairs with opposite orientation.
    let mut merge: Vec<usize> = (0..t.positions.len()).collect();
    for p in 0..n_handles {
        let ip = holes.len() + 2 * p;
        let lp = rect_loop(all[ip], origins[ip]);
        let lq = rect_loop(all[ip + 1], origins[ip + 1]);
        let m = lp.len();
        for i in 0..m {
            merge[lq[(m - i) % m]] = lp[i];
        }
    }
    if n_handles > 0 {
        for f in &mut t.faces {
            for v in f.iter_mut() {
                *v = merge[*v];
            }
        }
        t.lengths = std::mem::take(&mut t.lengths)
            .into_iter()
            .map(|((a, b), l)| (key(merge[a], merge[b]), l))
            .collect();
    }
    t.compact();
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::TriMesh;

    fn open_mesh(t: &Template<f64>) -> TriMesh<f64> {
        TriMesh::from_lengths(t.positions.clone(), t.faces.clone(), &t.lengths).unwrap()
    }

    fn check_loops(t: &Template<f64>) {
        let m = open_mesh(t);
        m.check_vertex_links().unwrap();
        assert!(m.is_connected());
        let n_boundary: usize = t.loops.iter().map(|l| l.len()).sum();
        assert_eq!(m.boundary_edges().len(), n_boundary);
        for l in &t.loops {
            assert_eq!(l[0], *l.iter().min().unwrap());
            for i in 0..l.len() {
                let (a, b) = (l[i], l[(i + 1) % l.len()]);
                // Induced orientation: some face traverses a -> b.
                let hit = m.faces().iter().any(|f| {
                    (0..3).any(|k| f[k] == a && f[(k + 1) % 3] == b)
                });
                assert!(hit, "loop edge {a}->{b} not positively oriented");
            }
        }
    }

    #[test]
    fn disk_is_a_disk() {
        let t = disk::<f64>(32, std::f64::consts::PI / 8.0, 0.125);
        check_loops(&t);
        assert_eq!(open_mesh(&t).euler_characteristic(), 1);
        let mirrored = t.mirrored();
        check_loops(&mirrored);
    }

    #[test]
    fn cylinder_is_an_annulus() {
        let t = cylinder::<f64>(16, 0.3, 2.0, 8);
        check_loops(&t);
        assert_eq!(open_mesh(&t).euler_characteristic(), 0);
    }

    #[test]
    fn pillowcase_with_holes() {
        let t = grid::<f64>(0, &[hole_shape(32), hole_shape(16), hole_shape(8)], 4, 4, 0.4);
        check_loops(&t);
        assert_eq!(open_mesh(&t).euler_characteristic(), 2 - 3);
    }

    #[test]
    fn handles_raise_genus() {
        for g in 1..4u32 {
            let t = grid::<f64>(g, &[hole_shape(32)], 4, 4, 0.4);
            check_loops(&t);
            assert_eq!(open_mesh(&t).euler_characteristic(), 2 - 2 * g as i64 - 1);
        }
    }
}
