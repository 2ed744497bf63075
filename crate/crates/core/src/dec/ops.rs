use crate::dec::{Cochain, Kind};
use crate::error::DecError;
use crate::mesh::{triangle_area, TriMesh};
use crate::sparse::CsrMatrix;
use crate::Scalar;

/// Metric operators of a mesh. Everything here depends only on the
/// conformal class except the reference areas.
#[derive(Debug, Clone)]
pub struct OperatorBundle<T> {
    /// Signed vertex incidence of each edge `a -> b`: `[(a, -1), (b, +1)]`.
    pub d0: Vec<[(usize, i8); 2]>,
    /// Signed edge incidence of each face.
    pub d1: Vec<[(usize, i8); 3]>,
    faces: Vec<[usize; 3]>,
    edges: Vec<[usize; 2]>,
    cot: Vec<[T; 3]>,
    hodge1: Vec<T>,
    face_area: Vec<T>,
    stiffness: CsrMatrix<T>,
}

impl<T: Scalar> OperatorBundle<T> {
    pub fn new(tri: &TriMesh<T>) -> Result<Self, DecError> {
        let mut cot = Vec::with_capacity(tri.n_faces());
        let mut face_area = Vec::with_capacity(tri.n_faces());
        let mut hodge1 = vec![T::zero(); tri.n_edges()];
        for f in 0..tri.n_faces() {
            let area = triangle_area(tri.face_lengths(f)).ok_or(DecError::DegenerateFace(f))?;
            let c = tri.face_cotangents(f);
            let fe = tri.face_edges(f);
            for i in 0..3 {
                hodge1[fe[i]] += c[i] / T::lit(2.0);
            }
            face_area.push(area);
            cot.push(c);
        }
        let mut triplets = Vec::with_capacity(4 * tri.n_edges());
        for (e, &[a, b]) in tri.edges().iter().enumerate() {
            let w = hodge1[e];
            triplets.push((a, a, w));
            triplets.push((b, b, w));
            triplets.push((a, b, -w));
            triplets.push((b, a, -w));
        }
        let stiffness = CsrMatrix::from_triplets(tri.n_vertices(), tri.n_vertices(), triplets);
        let d0 = tri.edges().iter().map(|&[a, b]| [(a, -1), (b, 1)]).collect();
        let d1 = (0..tri.n_faces())
            .map(|f| {
                let fe = tri.face_edges(f);
                let fs = tri.face_edge_signs(f);
                [(fe[0], fs[0]), (fe[1], fs[1]), (fe[2], fs[2])]
            })
            .collect();
        Ok(Self {
            d0,
            d1,
            faces: tri.faces().to_vec(),
            edges: tri.edges().to_vec(),
            cot,
            hodge1,
            face_area,
            stiffness,
        })
    }

    pub fn n_vertices(&self) -> usize {
        self.stiffness.n_rows()
    }

    pub fn n_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    /// Diagonal cotangent Hodge star on primal 1-cochains,
    /// `w_e = (cot α + cot β) / 2`.
    pub fn hodge1(&self) -> &[T] {
        &self.hodge1
    }

    /// Cotangents of the interior angles of each face, by local vertex.
    pub fn cotangents(&self) -> &[[T; 3]] {
        &self.cot
    }

    /// Intrinsic face areas (the reference area form).
    pub fn face_area(&self) -> &[T] {
        &self.face_area
    }

    /// `K = d0ᵀ W d0`.
    pub fn stiffness(&self) -> &CsrMatrix<T> {
        &self.stiffness
    }

    pub fn apply_stiffness(&self, u: &[T]) -> Vec<T> {
        self.stiffness.mul_vec(u)
    }

    /// Lumped vertex masses `M_v = Σ_{f ∋ v} area_f / 3`.
    pub fn mass(&self, area: &[T]) -> Result<Vec<T>, DecError> {
        if area.len() != self.faces.len() {
            return Err(DecError::Length {
                degree: 2,
                kind: "primal",
                got: area.len(),
                want: self.faces.len(),
            });
        }
        let mut m = vec![T::zero(); self.n_vertices()];
        let third = T::one() / T::lit(3.0);
        for (f, face) in self.faces.iter().enumerate() {
            let a = area[f];
            if !(a > T::zero()) {
                return Err(DecError::NonPositiveArea {
                    face: f,
                    value: a.to_f64().unwrap_or(f64::NAN),
                });
            }
            for &v in face {
                m[v] += a * third;
            }
        }
        Ok(m)
    }

    /// Barycentric dual cell areas of the reference metric.
    pub fn reference_mass(&self) -> Vec<T> {
        self.mass(&self.face_area).expect("reference areas are positive")
    }
}

/// Realizes `c ↦ c∘j`. A primal 1-cochain maps to the dual 1-cochain
/// `-w_e c_e`; a dual 1-cochain maps back by dividing by `w_e` (zero where
/// `w_e = 0`), so applying it twice gives `-c` wherever `w_e ≠ 0`.
pub fn rotate_j<T: Scalar>(ops: &OperatorBundle<T>, c: &Cochain<T>) -> Result<Cochain<T>, DecError> {
    if c.degree() != 1 {
        return Err(DecError::Kind { want: "primal or dual 1" });
    }
    if c.len() != ops.hodge1.len() {
        return Err(DecError::Length {
            degree: 1,
            kind: if c.is_dual() { "dual" } else { "primal" },
            got: c.len(),
            want: ops.hodge1.len(),
        });
    }
    let w = &ops.hodge1;
    match c.kind() {
        Kind::Primal => Cochain::dual(1, c.values().iter().zip(w).map(|(x, w)| -*w * *x).collect()),
        Kind::Dual => Cochain::primal(
            1,
            c.values()
                .iter()
                .zip(w)
                .map(|(x, w)| if *w == T::zero() { T::zero() } else { *x / *w })
                .collect(),
        ),
    }
}

/// Stiffness and lumped mass of the pencil `K u = λ M u` for the given area
/// form. `K` does not depend on `area`.
pub fn assemble_pencil<T: Scalar>(
    ops: &OperatorBundle<T>,
    area: &Cochain<T>,
) -> Result<(CsrMatrix<T>, Vec<T>), DecError> {
    area.expect(2, Kind::Primal)?;
    let m = ops.mass(area.values())?;
    Ok((ops.stiffness.clone(), m))
}

/// Per-vertex residual `r = K u - λ M u`.
pub fn weighted_residuals<T: Scalar>(k: &CsrMatrix<T>, m: &[T], u: &[T], lambda: T) -> Vec<T> {
    let ku = k.mul_vec(u);
    ku.iter()
        .zip(m)
        .zip(u)
        .map(|((ku, m), u)| *ku - lambda * *m * *u)
        .collect()
}

/// `‖K u − λ M u‖ / ‖M u‖` with both norms taken in the `M⁻¹`-weighted ℓ²
/// norm (the discrete L² norm of the corresponding densities).
pub fn eigen_residual<T: Scalar>(
    k: &CsrMatrix<T>,
    m: &[T],
    u: &Cochain<T>,
    lambda: T,
) -> Result<T, DecError> {
    u.expect(0, Kind::Primal)?;
    let u = u.values();
    if u.len() != m.len() || u.len() != k.n_rows() {
        return Err(DecError::Length {
            degree: 0,
            kind: "primal",
            got: u.len(),
            want: m.len(),
        });
    }
    let den: T = u.iter().zip(m).map(|(u, m)| *m * *u * *u).sum();
    if den == T::zero() {
        return Err(DecError::ZeroVector);
    }
    let r = weighted_residuals(k, m, u, lambda);
    let num: T = r.iter().zip(m).map(|(r, m)| *r * *r / *m).sum();
    Ok((num / den).sqrt())
}

/// Dirichlet energy of the linear interpolant on each face,
/// `Σ_i (cot_i / 2)(u_j − u_k)²`. Conformally invariant.
pub fn face_dirichlet_energy<T: Scalar>(ops: &OperatorBundle<T>, u: &[T]) -> Vec<T> {
    ops.faces
        .iter()
        .zip(&ops.cot)
        .map(|(f, c)| {
            (0..3)
                .map(|i| {
                    let du = u[f[(i + 1) % 3]] - u[f[(i + 2) % 3]];
                    c[i] / T::lit(2.0) * du * du
                })
                .sum()
        })
        .collect()
}

/// `|du|²` per face in the metric whose area form is `area`: the face
/// Dirichlet energy divided by the face's area value.
pub fn grad_norm_sq<T: Scalar>(
    ops: &OperatorBundle<T>,
    u: &Cochain<T>,
    area: &Cochain<T>,
) -> Result<Cochain<T>, DecError> {
    u.expect(0, Kind::Primal)?;
    area.expect(2, Kind::Primal)?;
    if u.len() != ops.n_vertices() {
        return Err(DecError::Length {
            degree: 0,
            kind: "primal",
            got: u.len(),
            want: ops.n_vertices(),
        });
    }
    if area.len() != ops.n_faces() {
        return Err(DecError::Length {
            degree: 2,
            kind: "primal",
            got: area.len(),
            want: ops.n_faces(),
        });
    }
    let e = face_dirichlet_energy(ops, u.values());
    let mut out = Vec::with_capacity(e.len());
    for (f, (e, a)) in e.iter().zip(area.values()).enumerate() {
        if !(*a > T::zero()) {
            return Err(DecError::NonPositiveArea {
                face: f,
                value: a.to_f64().unwrap_or(f64::NAN),
            });
        }
        out.push(*e / *a);
    }
    Cochain::primal(2, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dec::d;
    use crate::mesh::flat_torus;

    #[test]
    fn stiffness_kills_constants() {
        let t = flat_torus::<f64>(6);
        let ops = OperatorBundle::new(&t).unwrap();
        let k1 = ops.apply_stiffness(&vec![1.0; t.n_vertices()]);
        assert!(k1.iter().all(|x| x.abs() < 1e-14));
        assert!(ops.stiffness().max_asymmetry() == 0.0);
    }

    #[test]
    fn dual_derivative_of_rotated_gradient_is_stiffness() {
        let t = flat_torus::<f64>(5);
        let ops = OperatorBundle::new(&t).unwrap();
        let u: Vec<f64> = (0..t.n_vertices()).map(|i| (i as f64 * 0.37).sin()).collect();
        let du = d(&t, &Cochain::primal(0, u.clone()).unwrap()).unwrap();
        let star = d(&t, &rotate_j(&ops, &du).unwrap()).unwrap();
        assert!(star.is_dual() && star.degree() == 2);
        let ku = ops.apply_stiffness(&u);
        for (a, b) in star.values().iter().zip(&ku) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn j_squared_is_minus_one() {
        let t = flat_torus::<f64>(4);
        let ops = OperatorBundle::new(&t).unwrap();
        let c: Vec<f64> = (0..t.n_edges()).map(|i| (i as f64).cos()).collect();
        let jj = rotate_j(&ops, &rotate_j(&ops, &Cochain::primal(1, c.clone()).unwrap()).unwrap()).unwrap();
        for (e, (a, b)) in jj.values().iter().zip(&c).enumerate() {
            if ops.hodge1()[e] != 0.0 {
                assert!((a + b).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn constant_residuals() {
        let t = flat_torus::<f64>(4);
        let ops = OperatorBundle::new(&t).unwrap();
        let area = Cochain::primal(2, ops.face_area().to_vec()).unwrap();
        let (k, m) = assemble_pencil(&ops, &area).unwrap();
        let one = Cochain::primal(0, vec![1.0; t.n_vertices()]).unwrap();
        assert!(eigen_residual(&k, &m, &one, 0.0).unwrap() < 1e-14);
        assert!((eigen_residual(&k, &m, &one, 1.0).unwrap() - 1.0).abs() < 1e-14);
        let zero = Cochain::primal(0, vec![0.0; t.n_vertices()]).unwrap();
        assert_eq!(eigen_residual(&k, &m, &zero, 1.0), Err(DecError::ZeroVector));
    }

    #[test]
    fn nonpositive_area_is_reported() {
        let t = flat_torus::<f64>(3);
        let ops = OperatorBundle::new(&t).unwrap();
        let mut a = ops.face_area().to_vec();
        a[4] = 0.0;
        let err = assemble_pencil(&ops, &Cochain::primal(2, a).unwrap()).unwrap_err();
        assert!(matches!(err, DecError::NonPositiveArea { face: 4, .. }));
    }

    #[test]
    fn gradient_scales_inversely_with_area() {
        let t = flat_torus::<f64>(4);
        let ops = OperatorBundle::new(&t).unwrap();
        let u = Cochain::primal(0, (0..t.n_vertices()).map(|i| i as f64).collect()).unwrap();
        let a = Cochain::primal(2, ops.face_area().to_vec()).unwrap();
        let a4 = Cochain::primal(2, ops.face_area().iter().map(|x| 4.0 * x).collect()).unwrap();
        let g = grad_norm_sq(&ops, &u, &a).unwrap();
        let g4 = grad_norm_sq(&ops, &u, &a4).unwrap();
        for (x, y) in g.values().iter().zip(g4.values()) {
            assert!((x / 4.0 - y).abs() <= 1e-14 * x.abs().max(1.0));
        }
    }
}
