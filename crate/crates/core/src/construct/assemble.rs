//! Global assembly of `F`, then `u = sin F` and `Ω`.

use crate::construct::poisson::{derive_slope, solve_subharmonic, Piece};
use crate::construct::profile::{ConvexProfile, DEFAULT_WIDTH};
use crate::dec::{face_dirichlet_energy, Cochain, OperatorBundle};
use crate::error::ConstructError;
use crate::mesh::{CircleId, LabeledSurfaceMesh, Side, VertexClass};
use crate::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct ConstructionParams<T> {
    /// Poisson source amplitude.
    pub rho0: T,
    /// `max|F| = (π/2)(1 − margin)`.
    pub margin: T,
    /// Factor on `e·max ∂_ν f` in the slope rule.
    pub safety: T,
    /// Maximum number of `rho0` halvings.
    pub max_retries: usize,
    pub profile_width: T,
    /// Mass-weighted averaging of `F` near the seams.
    pub smooth_seam: bool,
}

impl<T: Scalar> Default for ConstructionParams<T> {
    fn default() -> Self {
        Self {
            rho0: T::lit(0.2),
            margin: T::lit(0.05),
            safety: T::one(),
            max_retries: 8,
            profile_width: T::lit(DEFAULT_WIDTH),
            smooth_seam: false,
        }
    }
}

/// End-model slope of one side of one circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleSlope<T> {
    pub circle: CircleId,
    pub side: Side,
    pub a: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Parameters<T> {
    pub slopes: Vec<CircleSlope<T>>,
    /// Collar slope of the scaled `F`.
    pub c: T,
    /// `F = C·s` for `|s| ≤ epsilon`.
    pub epsilon: T,
    pub sigma: T,
    /// `rho0` actually used.
    pub rho0: T,
    pub margin: T,
    /// Values of `rho0` rejected by the retry loop, in order.
    pub rejected_rho0: Vec<T>,
}

/// Output of [`assemble_f`].
#[derive(Debug, Clone)]
pub struct PartialConstruction<T> {
    pub f: Cochain<T>,
    pub omega_ref: Cochain<T>,
    /// Dual 2-cochain of densities: `ΔF` with `−(ΔF)ω = d(dF∘j)`.
    pub lap_f: Cochain<T>,
    pub params: Parameters<T>,
    pub profiles: Vec<(CircleId, Side, ConvexProfile<T>)>,
}

#[derive(Debug, Clone)]
pub struct ConstructionResult<T> {
    pub f: Cochain<T>,
    pub u: Cochain<T>,
    pub omega_ref: Cochain<T>,
    pub omega: Cochain<T>,
    pub lap_f: Cochain<T>,
    /// `|dF|²` per face in the reference metric.
    pub grad_term: Vec<T>,
    /// `−cot(F̄)·ΔF̄` per face.
    pub cot_term: Vec<T>,
    pub params: Parameters<T>,
    pub profiles: Vec<(CircleId, Side, ConvexProfile<T>)>,
}

/// `ΔF` at every vertex, `−(K F)_v / A_v` with barycentric reference
/// areas, forced to zero on collar vertices with `|s| < epsilon`.
pub fn lap_density<T: Scalar>(
    mesh: &LabeledSurfaceMesh<T>,
    ops: &OperatorBundle<T>,
    f: &[T],
    epsilon: T,
) -> Vec<T> {
    let area = ops.reference_mass();
    let kf = ops.apply_stiffness(f);
    kf.iter()
        .zip(&area)
        .zip(mesh.collar_s())
        .map(|((k, a), s)| match s {
            Some(s) if s.abs() < epsilon => T::zero(),
            _ => -*k / *a,
        })
        .collect()
}

fn solve_all<T: Scalar>(
    pieces: &[Piece<T>],
    rho0: T,
    safety: T,
) -> Result<(Vec<Cochain<T>>, Vec<CircleSlope<T>>), ConstructError> {
    let mut fields = Vec::with_capacity(pieces.len());
    let mut slopes = Vec::new();
    for p in pieces {
        let f = solve_subharmonic(p, rho0)?;
        for (c, _) in &p.circles {
            slopes.push(CircleSlope {
                circle: *c,
                side: p.side,
                a: derive_slope(p, &f, *c, rho0, safety)?,
            });
        }
        fields.push(f);
    }
    Ok((fields, slopes))
}

/// Poisson solves on every piece, slope matching with the retry loop,
/// profiles on the collars, global scaling and `ΔF`.
pub fn assemble_f<T: Scalar>(
    mesh: &LabeledSurfaceMesh<T>,
    params: &ConstructionParams<T>,
) -> Result<PartialConstruction<T>, ConstructError> {
    let half = T::lit(0.5);
    if !(params.rho0 > T::zero()) || !params.rho0.is_finite() {
        return Err(ConstructError::Parameter("rho0 must be positive".into()));
    }
    if !(params.margin > T::zero() && params.margin < T::one()) {
        return Err(ConstructError::Parameter("margin must lie in (0, 1)".into()));
    }
    if !(params.safety >= T::one()) {
        return Err(ConstructError::Parameter("safety must be at least 1".into()));
    }
    let pieces: Vec<Piece<T>> = mesh.pieces().iter().map(|p| Piece::from_surface(mesh, p)).collect();
    let mut rho0 = params.rho0;
    let mut rejected = Vec::new();
    let (fields, slopes) = loop {
        let (fields, slopes) = solve_all(&pieces, rho0, params.safety)?;
        let worst = slopes.iter().map(|s| s.a).fold(T::zero(), T::max);
        if worst < half {
            if let Some(s) = slopes.iter().find(|s| !(s.a > T::zero())) {
                return Err(ConstructError::SlopeOutOfRange(s.a.to_f64().unwrap_or(f64::NAN)));
            }
            break (fields, slopes);
        }
        if rejected.len() == params.max_retries {
            return Err(ConstructError::RetriesExhausted {
                retries: rejected.len(),
                rho0: rho0.to_f64().unwrap_or(f64::NAN),
                a: worst.to_f64().unwrap_or(f64::NAN),
            });
        }
        rejected.push(rho0);
        rho0 = rho0 * half;
    };

    let n = mesh.tri().n_vertices();
    let mut f = vec![T::zero(); n];
    for (p, fp) in pieces.iter().zip(&fields) {
        let sign = if p.side == Side::Minus { T::one() } else { -T::one() };
        for (l, &g) in p.global.iter().enumerate() {
            f[g] = sign * fp.values()[l];
        }
    }
    let mut profiles = Vec::new();
    for s in &slopes {
        profiles.push((s.circle, s.side, ConvexProfile::with_width(s.a, params.profile_width)?));
    }
    let profile = |c: CircleId, side: Side| {
        &profiles
            .iter()
            .find(|(pc, ps, _)| *pc == c && *ps == side)
            .expect("profile per circle side")
            .2
    };
    for collar in mesh.collars() {
        let minus = profile(collar.circle, Side::Minus);
        let plus = profile(collar.circle, Side::Plus);
        for (ring, &s) in collar.rings.iter().zip(&collar.s) {
            let value = if s <= T::zero() { minus.value(s) } else { -plus.value(-s) };
            for &v in ring {
                f[v] = value;
            }
        }
    }
    let epsilon = profiles
        .iter()
        .map(|(_, _, p)| p.linear_extent())
        .fold(T::infinity(), T::min);
    let ops = OperatorBundle::new(mesh.tri())?;
    if params.smooth_seam {
        smooth_seam(mesh, &ops, &mut f, epsilon)?;
    }
    let max_abs = f.iter().map(|x| x.abs()).fold(T::zero(), T::max);
    let sigma = T::FRAC_PI_2() * (T::one() - params.margin) / max_abs;
    for x in &mut f {
        *x *= sigma;
    }
    let lap = lap_density(mesh, &ops, &f, epsilon);
    Ok(PartialConstruction {
        f: Cochain::primal(0, f)?,
        omega_ref: Cochain::primal(2, ops.face_area().to_vec())?,
        lap_f: Cochain::dual(2, lap)?,
        params: Parameters {
            slopes,
            c: T::lit(2.0) * sigma,
            epsilon,
            sigma,
            rho0,
            margin: params.margin,
            rejected_rho0: rejected,
        },
        profiles,
    })
}

/// Three rounds of mass-weighted neighbour averaging on the vertices within
/// three edges of a seam ring, leaving the exact-linear band untouched.
fn smooth_seam<T: Scalar>(
    mesh: &LabeledSurfaceMesh<T>,
    ops: &OperatorBundle<T>,
    f: &mut [T],
    epsilon: T,
) -> Result<(), ConstructError> {
    let nb = mesh.tri().vertex_neighbors();
    let mass = ops.reference_mass();
    let mut dist = vec![usize::MAX; f.len()];
    let mut frontier = Vec::new();
    for c in mesh.collars() {
        for ring in [&c.rings[0], c.rings.last().expect("rings")] {
            for &v in ring {
                dist[v] = 0;
                frontier.push(v);
            }
        }
    }
    for d in 1..=3 {
        let mut next = Vec::new();
        for &v in &frontier {
            for &w in &nb[v] {
                if dist[w] == usize::MAX {
                    dist[w] = d;
                    next.push(w);
                }
            }
        }
        frontier = next;
    }
    let strip: Vec<usize> = (0..f.len())
        .filter(|&v| dist[v] != usize::MAX)
        .filter(|&v| mesh.collar_s()[v].is_none_or(|s| s.abs() > epsilon))
        .collect();
    for _ in 0..3 {
        let old = f.to_vec();
        for &v in &strip {
            let mut num = mass[v] * old[v];
            let mut den = mass[v];
            for &w in &nb[v] {
                num += mass[w] * old[w];
                den += mass[w];
            }
            f[v] = num / den;
        }
    }
    let classes = mesh.vertex_classes();
    for &v in &strip {
        let ok = match classes[v] {
            VertexClass::Minus => f[v] < T::zero(),
            VertexClass::Plus => f[v] > T::zero(),
            VertexClass::Gamma => f[v] == T::zero(),
        };
        if !ok {
            return Err(ConstructError::SmoothingBrokeSigns(v));
        }
    }
    Ok(())
}

/// `u = sin F` and `Ω = (|dF|² − cot(F̄)·ΔF̄)·ω` per face, where `F̄` and
/// `ΔF̄` are face means. Faces whose three `ΔF` values are all zero get no
/// cotangent term; this covers the band around Γ where `F̄` may vanish.
pub fn compute_u_omega<T: Scalar>(
    mesh: &LabeledSurfaceMesh<T>,
    partial: PartialConstruction<T>,
) -> Result<ConstructionResult<T>, ConstructError> {
    let ops = OperatorBundle::new(mesh.tri())?;
    let f = partial.f.values();
    let lap = partial.lap_f.values();
    let omega_ref = partial.omega_ref.values();
    let energy = face_dirichlet_energy(&ops, f);
    let third = T::one() / T::lit(3.0);
    let mut grad_term = Vec::with_capacity(energy.len());
    let mut cot_term = Vec::with_capacity(energy.len());
    let mut omega = Vec::with_capacity(energy.len());
    for (fi, face) in ops.faces().iter().enumerate() {
        let g = energy[fi] / omega_ref[fi];
        let c = if face.iter().all(|&v| lap[v] == T::zero()) {
            T::zero()
        } else {
            let fbar = (f[face[0]] + f[face[1]] + f[face[2]]) * third;
            let lbar = (lap[face[0]] + lap[face[1]] + lap[face[2]]) * third;
            -fbar.cos() / fbar.sin() * lbar
        };
        let om = (g + c) * omega_ref[fi];
        if !(om > T::zero()) {
            return Err(ConstructError::NonPositiveOmega {
                face: fi,
                grad: g.to_f64().unwrap_or(f64::NAN),
                cot: c.to_f64().unwrap_or(f64::NAN),
            });
        }
        grad_term.push(g);
        cot_term.push(c);
        omega.push(om);
    }
    let u = f.iter().map(|x| x.sin()).collect();
    Ok(ConstructionResult {
        u: Cochain::primal(0, u)?,
        omega: Cochain::primal(2, omega)?,
        f: partial.f,
        omega_ref: partial.omega_ref,
        lap_f: partial.lap_f,
        grad_term,
        cot_term,
        params: partial.params,
        profiles: partial.profiles,
    })
}

/// Full construction: [`assemble_f`] then [`compute_u_omega`].
pub fn construct<T: Scalar>(
    mesh: &LabeledSurfaceMesh<T>,
    params: &ConstructionParams<T>,
) -> Result<ConstructionResult<T>, ConstructError> {
    compute_u_omega(mesh, assemble_f(mesh, params)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::generate_preset;

    fn sphere() -> LabeledSurfaceMesh<f64> {
        generate_preset("sphere-equator", 0).unwrap()
    }

    #[test]
    fn result_invariants_on_sphere() {
        let mesh = sphere();
        let r = construct(&mesh, &ConstructionParams::default()).unwrap();
        let p = &r.params;
        let f = r.f.values();
        let max = f.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        assert!((max - std::f64::consts::FRAC_PI_2 * 0.95).abs() < 1e-14);
        assert!(r.u.values().iter().zip(f).all(|(u, f)| *u == f.sin()));
        assert!(p.c > 0.0 && (p.c - 2.0 * p.sigma).abs() == 0.0);
        assert!(p.slopes.iter().all(|s| s.a > 0.0 && s.a < 0.5));
        assert_eq!(p.slopes.len(), 2);
        for (v, s) in mesh.collar_s().iter().enumerate() {
            if let Some(s) = s.filter(|s| s.abs() <= p.epsilon) {
                assert!((f[v] - p.c * s).abs() <= 1e-15, "vertex {v}");
            }
        }
        assert!(r.omega.values().iter().all(|o| *o > 0.0));
    }

    #[test]
    fn large_rho0_is_halved_until_slopes_fit() {
        let mesh = sphere();
        let params = ConstructionParams { rho0: 1.6, ..Default::default() };
        let r = construct(&mesh, &params).unwrap();
        assert_eq!(r.params.rejected_rho0, vec![1.6, 0.8, 0.4, 0.2]);
        assert_eq!(r.params.rho0, 0.1);
        let none_left = ConstructionParams { rho0: 1.6, max_retries: 2, ..Default::default() };
        assert!(matches!(
            construct(&mesh, &none_left),
            Err(ConstructError::RetriesExhausted { retries: 2, .. })
        ));
    }

    #[test]
    fn parameters_are_validated() {
        let mesh = sphere();
        for params in [
            ConstructionParams { rho0: 0.0, ..Default::default() },
            ConstructionParams { margin: 1.0, ..Default::default() },
            ConstructionParams { safety: 0.5, ..Default::default() },
        ] {
            assert!(matches!(construct(&mesh, &params), Err(ConstructError::Parameter(_))));
        }
    }

    #[test]
    fn smoothing_keeps_the_linear_band() {
        let mesh = sphere();
        let plain = construct(&mesh, &ConstructionParams::default()).unwrap();
        let params = ConstructionParams { smooth_seam: true, ..Default::default() };
        let smooth = construct(&mesh, &params).unwrap();
        assert_ne!(plain.f, smooth.f);
        let eps = smooth.params.epsilon;
        for (v, s) in mesh.collar_s().iter().enumerate() {
            if let Some(s) = s.filter(|s| s.abs() <= eps) {
                assert!((smooth.f.values()[v] - smooth.params.c * s).abs() <= 1e-15);
            }
        }
    }

    #[test]
    fn cot_term_vanishes_on_the_linear_band() {
        let mesh = sphere();
        let r = construct(&mesh, &ConstructionParams::default()).unwrap();
        let eps = r.params.epsilon;
        for (fi, face) in mesh.tri().faces().iter().enumerate() {
            if face.iter().all(|&v| mesh.collar_s()[v].is_some_and(|s| s.abs() < eps)) {
                assert_eq!(r.cot_term[fi], 0.0);
                let c2 = r.params.c * r.params.c;
                assert!((r.grad_term[fi] - c2).abs() <= 1e-12 * c2);
            }
        }
    }
}
