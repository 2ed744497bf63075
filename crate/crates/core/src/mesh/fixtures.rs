//! Meshes with known analytic answers, used as oracles.

use std::collections::BTreeMap;

use super::templates;
use super::TriMesh;
use crate::Scalar;

/// Latitude-longitude sphere of radius √2 with its poles on the x axis and
/// the field `u = z`, which satisfies `Δu = -u`.
#[derive(Debug, Clone)]
pub struct RoundSphere<T> {
    pub mesh: TriMesh<T>,
    pub u: Vec<T>,
    /// Longest edge.
    pub h: T,
}

/// `16·2^level` latitude bands and `32·2^level` meridians.
pub fn round_sphere<T: Scalar>(level: u32) -> RoundSphere<T> {
    let nlat = 16usize << level;
    let nlon = 32usize << level;
    let r = T::lit(2.0).sqrt();
    let pi = T::PI();
    let mut p = vec![[r, T::zero(), T::zero()]];
    for i in 1..nlat {
        let phi = pi * T::from_usize_lossy(i) / T::from_usize_lossy(nlat);
        for j in 0..nlon {
            let th = T::lit(2.0) * pi * T::from_usize_lossy(j) / T::from_usize_lossy(nlon);
            p.push([r * phi.cos(), r * phi.sin() * th.cos(), r * phi.sin() * th.sin()]);
        }
    }
    p.push([-r, T::zero(), T::zero()]);
    let south = p.len() - 1;
    let v = |i: usize, j: usize| 1 + (i - 1) * nlon + j % nlon;
    let mut f = Vec::new();
    for j in 0..nlon {
        f.push([0, v(1, j), v(1, j + 1)]);
        f.push([south, v(nlat - 1, j + 1), v(nlat - 1, j)]);
    }
    for i in 1..nlat - 1 {
        for j in 0..nlon {
            f.push([v(i, j), v(i + 1, j), v(i + 1, j + 1)]);
            f.push([v(i, j), v(i + 1, j + 1), v(i, j + 1)]);
        }
    }
    // Orient outward.
    let vol: T = f
        .iter()
        .map(|t| {
            let (a, b, c) = (p[t[0]], p[t[1]], p[t[2]]);
            a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
                + a[2] * (b[0] * c[1] - b[1] * c[0])
        })
        .sum();
    if vol < T::zero() {
        for t in &mut f {
            t.swap(1, 2);
        }
    }
    let u = p.iter().map(|q| q[2]).collect();
    let mesh = TriMesh::from_positions(p, f).expect("valid sphere");
    let h = mesh.edge_lengths().iter().copied().fold(T::zero(), T::max);
    RoundSphere { mesh, u, h }
}

/// Unit disk with `32·2^level` boundary vertices and rings `1/(8·2^level)`
/// apart.
#[derive(Debug, Clone)]
pub struct FlatDisk<T> {
    pub mesh: TriMesh<T>,
    pub radius: Vec<T>,
    pub boundary: Vec<usize>,
    pub h: T,
}

pub fn flat_disk<T: Scalar>(level: u32) -> FlatDisk<T> {
    let n = 32usize << level;
    let h_t = T::lit(2.0) * (T::PI() / T::from_usize_lossy(n)).sin();
    let h_r = T::one() / T::from_usize_lossy(8usize << level);
    let t = templates::disk(n, h_t, h_r);
    let radius = t
        .positions
        .iter()
        .map(|q| (q[0] * q[0] + q[1] * q[1]).sqrt())
        .collect();
    let boundary = t.loops[0].clone();
    let mesh = TriMesh::from_lengths(t.positions, t.faces, &t.lengths).expect("valid disk");
    FlatDisk {
        mesh,
        radius,
        boundary,
        h: h_r,
    }
}

/// Flat unit square torus, `n × n` cells, uniform diagonals.
pub fn flat_torus<T: Scalar>(n: usize) -> TriMesh<T> {
    assert!(n >= 3, "torus grid needs at least 3 cells per side");
    let h = T::one() / T::from_usize_lossy(n);
    let d = h * T::SQRT_2();
    let v = |i: usize, j: usize| (j % n) * n + i % n;
    let mut p = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            p.push([h * T::from_usize_lossy(i), h * T::from_usize_lossy(j), T::zero()]);
        }
    }
    let mut faces = Vec::new();
    let mut lengths = BTreeMap::new();
    let mut put = |a: usize, b: usize, l: T| {
        lengths.insert((a.min(b), a.max(b)), l);
    };
    for j in 0..n {
        for i in 0..n {
            let (a, b, c, e) = (v(i, j), v(i + 1, j), v(i + 1, j + 1), v(i, j + 1));
            faces.push([a, b, c]);
            faces.push([a, c, e]);
            put(a, b, h);
            put(b, c, h);
            put(a, c, d);
            put(c, e, h);
            put(a, e, h);
        }
    }
    TriMesh::from_lengths(p, faces, &lengths).expect("valid torus")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_area_converges() {
        let s = round_sphere::<f64>(1);
        s.mesh.validate_closed_manifold().unwrap();
        assert_eq!(s.mesh.euler_characteristic(), 2);
        let area: f64 = (0..s.mesh.n_faces()).map(|f| s.mesh.face_area(f)).sum();
        let exact = 8.0 * std::f64::consts::PI;
        assert!((area - exact).abs() / exact < 0.01);
    }

    #[test]
    fn disk_boundary_is_the_unit_circle() {
        let d = flat_disk::<f64>(0);
        for &b in &d.boundary {
            assert!((d.radius[b] - 1.0).abs() < 1e-14);
        }
        assert_eq!(d.mesh.euler_characteristic(), 1);
    }

    #[test]
    fn torus_is_closed() {
        let t = flat_torus::<f64>(8);
        t.validate_closed_manifold().unwrap();
        assert_eq!(t.euler_characteristic(), 0);
    }
}
