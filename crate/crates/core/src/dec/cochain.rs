use num_traits::Num;

use crate::error::DecError;
use crate::mesh::{TriMesh, NO_FACE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kind {
    Primal,
    Dual,
}

/// Values of a discrete k-form. Primal cochains live on vertices, edges and
/// faces; dual ones on faces (dual vertices), dual edges and vertex dual
/// cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Cochain<T> {
    degree: usize,
    kind: Kind,
    values: Vec<T>,
}

impl<T> Cochain<T> {
    pub fn new(degree: usize, kind: Kind, values: Vec<T>) -> Result<Self, DecError> {
        if degree > 2 {
            return Err(DecError::DegreeTooHigh(degree));
        }
        Ok(Self {
            degree,
            kind,
            values,
        })
    }

    pub fn primal(degree: usize, values: Vec<T>) -> Result<Self, DecError> {
        Self::new(degree, Kind::Primal, values)
    }

    pub fn dual(degree: usize, values: Vec<T>) -> Result<Self, DecError> {
        Self::new(degree, Kind::Dual, values)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn is_dual(&self) -> bool {
        self.kind == Kind::Dual
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Number of values a cochain of this degree and kind needs.
    pub fn expected_len<S>(degree: usize, kind: Kind, tri: &TriMesh<S>) -> usize {
        let counts = [tri_len(tri, 0), tri_len(tri, 1), tri_len(tri, 2)];
        match kind {
            Kind::Primal => counts[degree],
            Kind::Dual => counts[2 - degree],
        }
    }

    pub fn check<S>(&self, tri: &TriMesh<S>) -> Result<(), DecError> {
        let want = Self::expected_len(self.degree, self.kind, tri);
        if self.values.len() != want {
            return Err(DecError::Length {
                degree: self.degree,
                kind: if self.is_dual() { "dual" } else { "primal" },
                got: self.values.len(),
                want,
            });
        }
        Ok(())
    }

    pub fn expect(&self, degree: usize, kind: Kind) -> Result<(), DecError> {
        if self.degree != degree || self.kind != kind {
            let want = match (degree, kind) {
                (0, Kind::Primal) => "primal 0",
                (1, Kind::Primal) => "primal 1",
                (2, Kind::Primal) => "primal 2",
                (0, Kind::Dual) => "dual 0",
                (1, Kind::Dual) => "dual 1",
                _ => "dual 2",
            };
            return Err(DecError::Kind { want });
        }
        Ok(())
    }
}

fn tri_len<S>(tri: &TriMesh<S>, k: usize) -> usize {
    match k {
        0 => tri.positions().len(),
        1 => tri.edges().len(),
        _ => tri.faces().len(),
    }
}

/// Exterior derivative. Pure incidence arithmetic, so it is exact for
/// integer and rational values and `d(d c) = 0` holds identically.
pub fn d<S, T: Num + Clone>(tri: &TriMesh<S>, c: &Cochain<T>) -> Result<Cochain<T>, DecError> {
    if c.degree >= 2 {
        return Err(DecError::DegreeTooHigh(c.degree));
    }
    c.check(tri)?;
    let v = &c.values;
    let values: Vec<T> = match (c.kind, c.degree) {
        (Kind::Primal, 0) => tri
            .edges()
            .iter()
            .map(|&[a, b]| v[b].clone() - v[a].clone())
            .collect(),
        (Kind::Primal, _) => (0..tri.faces().len())
            .map(|f| {
                let fe = tri.face_edges(f);
                let fs = tri.face_edge_signs(f);
                (0..3).fold(T::zero(), |acc, i| {
                    if fs[i] > 0 {
                        acc + v[fe[i]].clone()
                    } else {
                        acc - v[fe[i]].clone()
                    }
                })
            })
            .collect(),
        // Dual 0 -> dual 1: value at the left face minus the right face.
        (Kind::Dual, 0) => (0..tri.edges().len())
            .map(|e| {
                let [l, r] = tri.edge_faces(e);
                let vl = if l == NO_FACE { T::zero() } else { v[l].clone() };
                let vr = if r == NO_FACE { T::zero() } else { v[r].clone() };
                vl - vr
            })
            .collect(),
        // Dual 1 -> dual 2 is -d0ᵀ.
        (Kind::Dual, _) => {
            let mut out = vec![T::zero(); tri.positions().len()];
            for (e, &[a, b]) in tri.edges().iter().enumerate() {
                out[a] = out[a].clone() + v[e].clone();
                out[b] = out[b].clone() - v[e].clone();
            }
            out
        }
    };
    Ok(Cochain {
        degree: c.degree + 1,
        kind: c.kind,
        values,
    })
}

/// Integer matrix `d1·d0` (faces × vertices) as a list of nonzero entries.
/// Empty on every valid mesh.
pub fn incidence_product<S>(tri: &TriMesh<S>) -> Vec<(usize, usize, i64)> {
    let mut out = Vec::new();
    for f in 0..tri.faces().len() {
        let mut row: Vec<(usize, i64)> = Vec::new();
        let fe = tri.face_edges(f);
        let fs = tri.face_edge_signs(f);
        for i in 0..3 {
            let [a, b] = tri.edges()[fe[i]];
            let s = fs[i] as i64;
            row.push((a, -s));
            row.push((b, s));
        }
        row.sort_unstable();
        let mut i = 0;
        while i < row.len() {
            let v = row[i].0;
            let mut sum = 0;
            while i < row.len() && row[i].0 == v {
                sum += row[i].1;
                i += 1;
            }
            if sum != 0 {
                out.push((f, v, sum));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::flat_torus;
    use num_rational::Ratio;

    #[test]
    fn degree_two_has_no_derivative() {
        let t = flat_torus::<f64>(3);
        let c = Cochain::primal(2, vec![0.0; t.n_faces()]).unwrap();
        assert_eq!(d(&t, &c).unwrap_err(), DecError::DegreeTooHigh(2));
        assert!(Cochain::<f64>::primal(3, vec![]).is_err());
    }

    #[test]
    fn length_is_checked() {
        let t = flat_torus::<f64>(3);
        let c = Cochain::primal(0, vec![1.0; 2]).unwrap();
        assert!(matches!(d(&t, &c), Err(DecError::Length { .. })));
    }

    #[test]
    fn constants_are_closed_in_exact_arithmetic() {
        let t = flat_torus::<f64>(4);
        let c = Cochain::primal(0, vec![Ratio::new(3i64, 7); t.n_vertices()]).unwrap();
        let dc = d(&t, &c).unwrap();
        assert!(dc.values().iter().all(|x| *x == Ratio::from_integer(0)));
    }

    #[test]
    fn incidence_composes_to_zero() {
        let t = flat_torus::<f64>(5);
        assert!(incidence_product(&t).is_empty());
    }
}
