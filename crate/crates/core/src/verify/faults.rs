//! Minimal perturbations, one per check, each returning the element it
//! touched. Used to show that every check can fail and that it points at
//! the right place.

use crate::construct::ConstructionResult;
use crate::mesh::{LabeledSurfaceMesh, VertexClass};
use crate::Scalar;

/// First vertex of the minus region proper (no collar coordinate), or the
/// first minus vertex of any kind.
pub fn minus_interior_vertex<T: Scalar>(mesh: &LabeledSurfaceMesh<T>) -> usize {
    let classes = mesh.vertex_classes();
    let interior = |v: usize| classes[v] == VertexClass::Minus && mesh.collar_s()[v].is_none();
    let tri = mesh.tri();
    let nbrs = tri.vertex_neighbors();
    // Prefer a vertex whose neighbors are also interior, so ring edits stay
    // inside the region.
    (0..tri.n_vertices())
        .find(|&v| interior(v) && nbrs[v].iter().all(|&w| interior(w)))
        .or_else(|| (0..tri.n_vertices()).find(|&v| interior(v)))
        .expect("mesh has a minus region")
}

/// Flips the sign of `u` at a minus vertex.
pub fn flip_u_sign<T: Scalar>(mesh: &LabeledSurfaceMesh<T>, r: &mut ConstructionResult<T>) -> usize {
    let v = minus_interior_vertex(mesh);
    let u = r.u.values_mut();
    u[v] = -u[v];
    v
}

/// Makes `Ω` vanish on one face.
pub fn zero_omega_face<T: Scalar>(r: &mut ConstructionResult<T>, face: usize) -> usize {
    r.omega.values_mut()[face] = T::zero();
    face
}

/// Sets `u = 0` on a minus vertex and its whole one-ring, killing both
/// `u²` and `|du|²` there.
pub fn zero_u_ring<T: Scalar>(mesh: &LabeledSurfaceMesh<T>, r: &mut ConstructionResult<T>) -> usize {
    let v = minus_interior_vertex(mesh);
    let nbrs = mesh.tri().vertex_neighbors();
    let u = r.u.values_mut();
    u[v] = T::zero();
    for &w in &nbrs[v] {
        u[w] = T::zero();
    }
    v
}

/// Replaces `u` by a constant; `Ku = 0` so the relative residual is 1.
pub fn constant_u<T: Scalar>(r: &mut ConstructionResult<T>) {
    for x in r.u.values_mut() {
        *x = T::one();
    }
}

/// Scales `F` and everything derived from its scale by `factor`, as if
/// the global scale had been chosen larger.
pub fn scale_f<T: Scalar>(r: &mut ConstructionResult<T>, factor: T) {
    for x in r.f.values_mut() {
        *x *= factor;
    }
    for x in r.lap_f.values_mut() {
        *x *= factor;
    }
    r.params.c *= factor;
    r.params.sigma *= factor;
}

/// Flips the sign of `F` at a minus vertex.
pub fn flip_f_sign<T: Scalar>(mesh: &LabeledSurfaceMesh<T>, r: &mut ConstructionResult<T>) -> usize {
    let v = minus_interior_vertex(mesh);
    let f = r.f.values_mut();
    f[v] = -f[v];
    v
}

/// Raises `F` at a minus interior vertex above all its neighbors, creating
/// a strict local maximum where `F` must be subharmonic.
pub fn raise_f<T: Scalar>(mesh: &LabeledSurfaceMesh<T>, r: &mut ConstructionResult<T>) -> usize {
    let v = minus_interior_vertex(mesh);
    let nbrs = mesh.tri().vertex_neighbors();
    let f = r.f.values_mut();
    let top = nbrs[v].iter().map(|&w| f[w]).fold(f[v], T::max);
    f[v] = top + (T::zero() - top) * T::lit(0.5);
    v
}

/// Drops the mirroring on the plus collars: `F = C s` on every plus collar
/// vertex instead of `-G(-s)`. The outer rings then sit above the plus
/// region and its vertices next to the seam stop being superharmonic.
pub fn unmirror_plus<T: Scalar>(mesh: &LabeledSurfaceMesh<T>, r: &mut ConstructionResult<T>) {
    let c = r.params.c;
    let f = r.f.values_mut();
    for (v, s) in mesh.collar_s().iter().enumerate() {
        if let Some(s) = s.filter(|s| *s > T::zero()) {
            f[v] = c * s;
        }
    }
}

/// Moves `F` off the line `C s` at a collar vertex inside the linear band.
pub fn bend_collar<T: Scalar>(mesh: &LabeledSurfaceMesh<T>, r: &mut ConstructionResult<T>) -> usize {
    let eps = r.params.epsilon;
    let v = mesh
        .collar_s()
        .iter()
        .position(|s| s.is_some_and(|s| s < T::zero() && s.abs() < eps))
        .expect("collar has a linear band");
    r.f.values_mut()[v] *= T::lit(1.0 + 1e-6);
    v
}
