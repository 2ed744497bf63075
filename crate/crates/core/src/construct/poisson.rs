//! Strictly subharmonic functions on the region pieces.

use crate::dec::{Cochain, OperatorBundle};
use crate::error::ConstructError;
use crate::mesh::{CircleId, LabeledSurfaceMesh, PieceInfo, Side, TriMesh};
use crate::sparse::pcg;
use crate::Scalar;

pub const SOLVER_TOLERANCE: f64 = 1e-11;

/// A region component cut out of the surface, as an open mesh.
#[derive(Debug, Clone)]
pub struct Piece<T> {
    pub side: Side,
    pub mesh: TriMesh<T>,
    /// Global vertex index of each local vertex.
    pub global: Vec<usize>,
    /// Global face indices.
    pub faces: Vec<usize>,
    pub boundary: Vec<bool>,
    /// Local boundary vertices of each dividing circle.
    pub circles: Vec<(CircleId, Vec<usize>)>,
}

impl<T: Scalar> Piece<T> {
    pub fn from_surface(mesh: &LabeledSurfaceMesh<T>, info: &PieceInfo) -> Self {
        let (sub, global) = mesh.tri().submesh(&info.faces);
        let boundary = boundary_flags(&sub);
        let mut circles = Vec::new();
        for &c in &info.circles {
            let collar = mesh.collar(c).expect("piece circle has a collar");
            let ring = match info.side {
                Side::Minus => &collar.rings[0],
                Side::Plus => collar.rings.last().expect("rings"),
            };
            let local: Vec<usize> = (0..global.len())
                .filter(|&l| boundary[l] && ring.contains(&global[l]))
                .collect();
            circles.push((c, local));
        }
        Self {
            side: info.side,
            mesh: sub,
            global,
            faces: info.faces.clone(),
            boundary,
            circles,
        }
    }

    /// Standalone open mesh; all boundary vertices form circle `c0`.
    pub fn from_open_mesh(mesh: TriMesh<T>) -> Result<Self, ConstructError> {
        let boundary = boundary_flags(&mesh);
        let ring: Vec<usize> = (0..mesh.n_vertices()).filter(|&v| boundary[v]).collect();
        if ring.is_empty() {
            return Err(ConstructError::NoBoundary);
        }
        Ok(Self {
            side: Side::Minus,
            global: (0..mesh.n_vertices()).collect(),
            faces: (0..mesh.n_faces()).collect(),
            mesh,
            boundary,
            circles: vec![(CircleId(0), ring)],
        })
    }

    pub fn interior(&self) -> Vec<usize> {
        (0..self.boundary.len()).filter(|&v| !self.boundary[v]).collect()
    }
}

fn boundary_flags<T: Scalar>(m: &TriMesh<T>) -> Vec<bool> {
    let mut b = vec![false; m.n_vertices()];
    for e in m.boundary_edges() {
        let [x, y] = m.edges()[e];
        b[x] = true;
        b[y] = true;
    }
    b
}

/// Solves `f = −1` on the boundary and `(K f)_v = −rho0·M_v` inside, so
/// that the discrete Laplacian of `f` equals `rho0`.
pub fn solve_subharmonic<T: Scalar>(piece: &Piece<T>, rho0: T) -> Result<Cochain<T>, ConstructError> {
    if !(rho0 >= T::zero()) || !rho0.is_finite() {
        return Err(ConstructError::Parameter(format!("rho0 = {rho0} must be nonnegative")));
    }
    let n = piece.mesh.n_vertices();
    if !piece.boundary.iter().any(|&b| b) {
        return Err(ConstructError::NoBoundary);
    }
    let interior = piece.interior();
    // Every interior vertex must reach the boundary.
    let nb = piece.mesh.vertex_neighbors();
    let mut reached = piece.boundary.clone();
    let mut stack: Vec<usize> = (0..n).filter(|&v| piece.boundary[v]).collect();
    while let Some(v) = stack.pop() {
        for &w in &nb[v] {
            if !reached[w] {
                reached[w] = true;
                stack.push(w);
            }
        }
    }
    if let Some(v) = (0..n).find(|&v| !reached[v]) {
        return Err(ConstructError::Singular(piece.global[v]));
    }
    let ops = OperatorBundle::new(&piece.mesh)?;
    let mass = ops.reference_mass();
    let mut f = vec![-T::one(); n];
    if !interior.is_empty() && rho0 > T::zero() {
        let bnd: Vec<usize> = (0..n).filter(|&v| piece.boundary[v]).collect();
        let k = ops.stiffness();
        let kii = k.submatrix(&interior, &interior);
        let kib = k.submatrix(&interior, &bnd);
        let kb1 = kib.mul_vec(&vec![T::one(); bnd.len()]);
        let rhs: Vec<T> = interior
            .iter()
            .zip(&kb1)
            .map(|(&v, kb)| -rho0 * mass[v] + *kb)
            .collect();
        let (x, _) = pcg(&kii, &rhs, T::lit(SOLVER_TOLERANCE), 20 * interior.len() + 100)
            .map_err(crate::DecError::from)?;
        for (&v, xv) in interior.iter().zip(x) {
            f[v] = xv;
        }
        for &v in &interior {
            if !(f[v] < -T::one()) {
                return Err(ConstructError::MaximumPrinciple {
                    vertex: piece.global[v],
                    value: f[v].to_f64().unwrap_or(f64::NAN),
                });
            }
        }
    }
    Ok(Cochain::primal(0, f)?)
}

/// Outward normal derivative of `f` at each boundary vertex, from the
/// discrete flux `Φ_b = (K f)_b + rho0·M_b` divided by the boundary length
/// `ℓ_b` attached to `b` (half of its two boundary edges). Interior entries
/// are zero.
pub fn normal_derivative<T: Scalar>(piece: &Piece<T>, f: &Cochain<T>, rho0: T) -> Result<Vec<T>, ConstructError> {
    let ops = OperatorBundle::new(&piece.mesh)?;
    let mass = ops.reference_mass();
    let kf = ops.apply_stiffness(f.values());
    let mut ell = vec![T::zero(); piece.mesh.n_vertices()];
    for e in piece.mesh.boundary_edges() {
        let [a, b] = piece.mesh.edges()[e];
        let l = piece.mesh.edge_lengths()[e] / T::lit(2.0);
        ell[a] += l;
        ell[b] += l;
    }
    Ok((0..ell.len())
        .map(|v| {
            if piece.boundary[v] {
                (kf[v] + rho0 * mass[v]) / ell[v]
            } else {
                T::zero()
            }
        })
        .collect())
}

/// `A = safety · e · max ∂_ν f` over the vertices of one dividing circle.
/// With `safety ≥ 1` the profile's end slope `A/e` dominates the outward
/// derivative of `f`, which keeps the glued function weakly subharmonic at
/// the seam.
pub fn derive_slope<T: Scalar>(
    piece: &Piece<T>,
    f: &Cochain<T>,
    circle: CircleId,
    rho0: T,
    safety: T,
) -> Result<T, ConstructError> {
    let (_, ring) = piece
        .circles
        .iter()
        .find(|(c, _)| *c == circle)
        .ok_or(ConstructError::NotOnBoundary(circle))?;
    let dn = normal_derivative(piece, f, rho0)?;
    let max = ring.iter().map(|&v| dn[v]).fold(T::neg_infinity(), T::max);
    Ok(safety * T::E() * max.max(T::zero()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::flat_disk;

    #[test]
    fn harmonic_limit_is_constant() {
        let d = flat_disk::<f64>(0);
        let p = Piece::from_open_mesh(d.mesh).unwrap();
        let f = solve_subharmonic(&p, 0.0).unwrap();
        assert!(f.values().iter().all(|&x| x == -1.0));
        let a = derive_slope(&p, &f, CircleId(0), 0.0, 1.25).unwrap();
        assert!(a.abs() < 1e-12);
    }

    #[test]
    fn disk_matches_radial_solution() {
        let d = flat_disk::<f64>(1);
        let r = d.radius.clone();
        let p = Piece::from_open_mesh(d.mesh).unwrap();
        let f = solve_subharmonic(&p, 0.2).unwrap();
        let err = f
            .values()
            .iter()
            .zip(&r)
            .map(|(f, r)| (f - (-1.0 - 0.2 * (1.0 - r * r) / 4.0)).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-3, "{err}");
        let a = derive_slope(&p, &f, CircleId(0), 0.2, 1.25).unwrap();
        assert!((a - 1.25 * std::f64::consts::E * 0.1).abs() < 5e-3, "{a}");
    }

    #[test]
    fn slope_is_linear_in_rho0() {
        let d = flat_disk::<f64>(0);
        let p = Piece::from_open_mesh(d.mesh).unwrap();
        let a1 = derive_slope(&p, &solve_subharmonic(&p, 0.1).unwrap(), CircleId(0), 0.1, 1.0).unwrap();
        let a2 = derive_slope(&p, &solve_subharmonic(&p, 0.2).unwrap(), CircleId(0), 0.2, 1.0).unwrap();
        assert!((a2 - 2.0 * a1).abs() < 1e-9 * a2);
    }

    #[test]
    fn unknown_circle() {
        let d = flat_disk::<f64>(0);
        let p = Piece::from_open_mesh(d.mesh).unwrap();
        let f = solve_subharmonic(&p, 0.1).unwrap();
        assert!(matches!(
            derive_slope(&p, &f, CircleId(9), 0.1, 1.0),
            Err(ConstructError::NotOnBoundary(CircleId(9)))
        ));
    }
}
