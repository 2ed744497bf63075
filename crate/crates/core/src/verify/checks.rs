use std::collections::VecDeque;
use std::f64::consts::FRAC_PI_2;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::construct::ConstructionResult;
use crate::dec::{face_dirichlet_energy, weighted_residuals, OperatorBundle};
use crate::error::DecError;
use crate::mesh::{LabeledSurfaceMesh, Region, VertexClass};
use crate::verify::report::{CheckRecord, VerificationReport};
use crate::Scalar;

pub const DEFAULT_SEED: u64 = 7;
pub const DEFAULT_SAMPLES: usize = 256;

/// Floor used for the "≥ 0" predicates that hold exactly in the continuum.
pub const WEAK_FLOOR: f64 = 1e-12;

/// Eigen-identity tolerance at a refinement level: `0.2 · 2^(-level)`.
pub fn eigen_tolerance(level: u32) -> f64 {
    0.2 * 0.5f64.powi(level as i32)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    /// Refinement level; sets the eigen tolerance and the seam strip width.
    pub level: u32,
    /// Overrides [`eigen_tolerance`].
    pub eigen_tol: Option<f64>,
    pub samples: usize,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { level: 0, eigen_tol: None, samples: DEFAULT_SAMPLES, seed: DEFAULT_SEED }
    }
}

impl VerifyOptions {
    pub fn at_level(level: u32) -> Self {
        Self { level, ..Self::default() }
    }

    pub fn eigen_tol(&self) -> f64 {
        self.eigen_tol.unwrap_or_else(|| eigen_tolerance(self.level))
    }

    /// Seam strip width in edge hops.
    pub fn strip_hops(&self) -> usize {
        1 << self.level
    }
}

/// Orientation of the 3-D product `S × R` used by the Hodge star in the
/// adaptedness check. `Positive` is `dt ∧ ω`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Positive,
    Negative,
}

/// Residual split of the eigen identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualSummary {
    pub total: f64,
    pub interior: f64,
    pub seam: f64,
    pub seam_worst: f64,
    pub linear: f64,
    pub worst_vertex: usize,
}

fn to64<T: Scalar>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

fn record(name: &str, pass: bool, value: f64, tol: f64, worst: Option<usize>, detail: String) -> CheckRecord {
    CheckRecord { name: name.to_string(), pass, value, tol, worst, detail }
}

/// Shared state for checking one construction result on one mesh.
pub struct Verifier<'a, T> {
    mesh: &'a LabeledSurfaceMesh<T>,
    result: &'a ConstructionResult<T>,
    options: VerifyOptions,
    ops: OperatorBundle<T>,
    ref_mass: Vec<T>,
    classes: Vec<VertexClass>,
    strip: Vec<bool>,
}

impl<'a, T: Scalar> Verifier<'a, T> {
    pub fn new(
        mesh: &'a LabeledSurfaceMesh<T>,
        result: &'a ConstructionResult<T>,
        options: VerifyOptions,
    ) -> Result<Self, DecError> {
        let ops = OperatorBundle::new(mesh.tri())?;
        for c in [&result.f, &result.u, &result.lap_f] {
            if c.len() != mesh.tri().n_vertices() {
                return Err(DecError::Length {
                    degree: c.degree(),
                    kind: "vertex",
                    got: c.len(),
                    want: mesh.tri().n_vertices(),
                });
            }
        }
        for c in [&result.omega, &result.omega_ref] {
            if c.len() != mesh.tri().n_faces() {
                return Err(DecError::Length {
                    degree: 2,
                    kind: "primal",
                    got: c.len(),
                    want: mesh.tri().n_faces(),
                });
            }
        }
        let ref_mass = ops.reference_mass();
        let classes = mesh.vertex_classes();
        let strip = seam_strip(mesh, options.strip_hops());
        Ok(Self { mesh, result, options, ops, ref_mass, classes, strip })
    }

    pub fn options(&self) -> &VerifyOptions {
        &self.options
    }

    /// Vertices within the configured number of hops of a collar end ring.
    pub fn seam_strip(&self) -> &[bool] {
        &self.strip
    }

    fn u(&self) -> &[T] {
        self.result.u.values()
    }

    fn f(&self) -> &[T] {
        self.result.f.values()
    }

    fn collar_s(&self, v: usize) -> Option<T> {
        self.mesh.collar_s()[v]
    }

    fn epsilon(&self) -> T {
        self.result.params.epsilon
    }

    /// Ω/ω per face.
    pub fn omega_density(&self) -> Vec<T> {
        self.result
            .omega
            .values()
            .iter()
            .zip(self.result.omega_ref.values())
            .map(|(o, w)| *o / *w)
            .collect()
    }

    /// `u² + max_{f ∋ v} |du|²_ω` per vertex.
    pub fn contact_values(&self) -> Vec<T> {
        let energy = face_dirichlet_energy(&self.ops, self.u());
        let w = self.result.omega_ref.values();
        let mut grad = vec![T::zero(); self.ops.n_vertices()];
        for (fi, face) in self.ops.faces().iter().enumerate() {
            let g = energy[fi] / w[fi];
            for &v in face {
                grad[v] = grad[v].max(g);
            }
        }
        self.u().iter().zip(grad).map(|(u, g)| *u * *u + g).collect()
    }

    /// Residual density `(Ku − M_Ω u)_v / M_Ω,v`, or the error for a
    /// nonpositive Ω face.
    pub fn residual_field(&self) -> Result<Vec<T>, DecError> {
        let m = self.ops.mass(self.result.omega.values())?;
        let r = weighted_residuals(self.ops.stiffness(), &m, self.u(), T::one());
        Ok(r.iter().zip(&m).map(|(r, m)| *r / *m).collect())
    }

    pub fn residuals(&self) -> Result<ResidualSummary, DecError> {
        let m = self.ops.mass(self.result.omega.values())?;
        let u = self.u();
        let r = weighted_residuals(self.ops.stiffness(), &m, u, T::one());
        let den: T = u.iter().zip(&m).map(|(u, m)| *m * *u * *u).sum();
        if den == T::zero() {
            return Err(DecError::ZeroVector);
        }
        let linear = self.linear_collar_vertices();
        let (mut all, mut inner, mut seam, mut lin_num, mut lin_den) =
            (T::zero(), T::zero(), T::zero(), T::zero(), T::zero());
        let mut seam_worst = T::zero();
        let mut worst = (T::zero(), 0);
        for v in 0..u.len() {
            let q = r[v] * r[v] / m[v];
            all += q;
            let density = r[v].abs() / m[v];
            if density > worst.0 {
                worst = (density, v);
            }
            if self.strip[v] {
                seam += q;
                seam_worst = seam_worst.max(density);
            } else {
                inner += q;
            }
            if linear[v] {
                lin_num += q;
                lin_den += m[v] * u[v] * u[v];
            }
        }
        let linear = if lin_den > T::zero() { to64((lin_num / lin_den).sqrt()) } else { 0.0 };
        Ok(ResidualSummary {
            total: to64((all / den).sqrt()),
            interior: to64((inner / den).sqrt()),
            seam: to64((seam / den).sqrt()),
            seam_worst: to64(seam_worst),
            linear,
            worst_vertex: worst.1,
        })
    }

    /// Collar vertices whose whole one-ring lies in the exact-linear band
    /// `|s| ≤ ε`.
    pub fn linear_collar_vertices(&self) -> Vec<bool> {
        let mut out = vec![false; self.ops.n_vertices()];
        let eps = self.epsilon();
        for c in self.mesh.collars() {
            let h = c.s[1] - c.s[0];
            for (k, ring) in c.rings.iter().enumerate() {
                if c.s[k].abs() + h <= eps {
                    for &v in ring {
                        out[v] = true;
                    }
                }
            }
        }
        out
    }

    pub fn nodal_set(&self) -> CheckRecord {
        let u = self.u();
        let mut bad = 0usize;
        let mut first = None;
        let mut note = |v: usize, first: &mut Option<usize>| {
            bad += 1;
            first.get_or_insert(v);
        };
        for (v, class) in self.classes.iter().enumerate() {
            let ok = match class {
                VertexClass::Gamma => u[v] == T::zero(),
                VertexClass::Minus => u[v] < T::zero(),
                VertexClass::Plus => u[v] > T::zero(),
            };
            if !ok {
                note(v, &mut first);
            }
        }
        let mut crossing = 0usize;
        for &[a, b] in self.ops.edges() {
            if u[a] * u[b] < T::zero() {
                let across = match (self.collar_s(a), self.collar_s(b)) {
                    (Some(sa), Some(sb)) => sa * sb < T::zero(),
                    _ => false,
                };
                if !across {
                    crossing += 1;
                    note(if u[a] * self.sign_of(a) < T::zero() { a } else { b }, &mut first);
                }
            }
        }
        record(
            "nodal_set",
            first.is_none(),
            bad as f64,
            0.0,
            first,
            format!(
                "{} violations ({} off-collar sign changes); {} zero vertices",
                bad,
                crossing,
                u.iter().filter(|x| **x == T::zero()).count()
            ),
        )
    }

    fn sign_of(&self, v: usize) -> T {
        match self.classes[v] {
            VertexClass::Minus => -T::one(),
            VertexClass::Plus => T::one(),
            VertexClass::Gamma => T::zero(),
        }
    }

    pub fn positivity(&self) -> CheckRecord {
        let density = self.omega_density();
        let (mut min, mut at) = (T::infinity(), 0);
        for (f, d) in density.iter().enumerate() {
            if !(*d >= min) {
                min = *d;
                at = f;
            }
        }
        let detail = match (self.result.grad_term.get(at), self.result.cot_term.get(at)) {
            (Some(g), Some(c)) => format!("at face {at}: |dF|^2 = {:.6e}, cot term = {:.6e}", to64(*g), to64(*c)),
            _ => String::new(),
        };
        let value = to64(min);
        record("positivity", value > 0.0, value, 0.0, Some(at), detail)
    }

    pub fn contact_condition(&self) -> CheckRecord {
        let c = self.contact_values();
        let (mut min, mut at) = (T::infinity(), 0);
        for (v, x) in c.iter().enumerate() {
            if !(*x >= min) {
                min = *x;
                at = v;
            }
        }
        let cc = self.result.params.c;
        let eps = self.epsilon();
        let floor = cc * cc * (cc * eps).cos().powi(2) * (T::one() - T::lit(1e-6));
        let mut near = T::infinity();
        let mut near_bad = None;
        for (v, x) in c.iter().enumerate() {
            if let Some(s) = self.collar_s(v) {
                if s.abs() <= eps {
                    near = near.min(*x);
                    if *x < floor && near_bad.is_none() {
                        near_bad = Some(v);
                    }
                }
            }
        }
        let value = to64(min);
        let pass = value > 0.0 && near_bad.is_none();
        record(
            "contact_condition",
            pass,
            value,
            0.0,
            Some(near_bad.unwrap_or(at)),
            format!("near-Gamma min {:.6e} vs floor {:.6e}", to64(near), to64(floor)),
        )
    }

    pub fn eigen_identity(&self) -> (CheckRecord, Option<ResidualSummary>) {
        let tol = self.options.eigen_tol();
        match self.residuals() {
            Ok(s) => (
                record(
                    "eigen_identity",
                    s.total <= tol,
                    s.total,
                    tol,
                    Some(s.worst_vertex),
                    format!("interior {:.6e}, seam {:.6e}", s.interior, s.seam),
                ),
                Some(s),
            ),
            Err(e) => {
                let worst = match e {
                    DecError::NonPositiveArea { face, .. } => Some(face),
                    _ => None,
                };
                (record("eigen_identity", false, f64::INFINITY, tol, worst, e.to_string()), None)
            }
        }
    }

    pub fn lemma_i(&self) -> CheckRecord {
        let (mut max, mut at) = (T::zero(), 0);
        for (v, x) in self.f().iter().enumerate() {
            if !(x.abs() <= max) {
                max = x.abs();
                at = v;
            }
        }
        let value = to64(max);
        record("lemma_i", value < FRAC_PI_2, value, FRAC_PI_2, Some(at), "max |F| < pi/2".into())
    }

    pub fn lemma_ii(&self) -> CheckRecord {
        let f = self.f();
        let mut bad = 0usize;
        let mut first = None;
        for v in 0..f.len() {
            let ok = match self.classes[v] {
                VertexClass::Gamma => f[v] == T::zero(),
                VertexClass::Minus => f[v] < T::zero(),
                VertexClass::Plus => f[v] > T::zero(),
            };
            if !ok {
                bad += 1;
                first.get_or_insert(v);
            }
        }
        let energy = face_dirichlet_energy(&self.ops, f);
        let w = self.result.omega_ref.values();
        let cc = self.result.params.c;
        let lin_floor = cc * cc * (T::one() - T::lit(1e-9));
        let eps = self.epsilon();
        let mut min_grad = T::infinity();
        let mut first_face = None;
        for (fi, face) in self.ops.faces().iter().enumerate() {
            if !matches!(self.mesh.labels()[fi], Region::Collar(_)) {
                continue;
            }
            let g = energy[fi] / w[fi];
            min_grad = min_grad.min(g);
            let linear = face.iter().all(|&v| self.collar_s(v).is_some_and(|s| s.abs() <= eps));
            if !(g > T::zero()) || (linear && g < lin_floor) {
                bad += 1;
                first_face.get_or_insert(fi);
            }
        }
        record(
            "lemma_ii",
            bad == 0,
            bad as f64,
            0.0,
            first.or(first_face),
            format!("min collar |dF|^2 = {:.6e}", to64(min_grad)),
        )
    }

    /// `(K F / σ)` with the sign flipped for the minus side, so both sides
    /// are checked as "≥ 0".
    fn side_lemma(&self, name: &str, side: VertexClass) -> CheckRecord {
        let sigma = self.result.params.sigma;
        let unscaled: Vec<T> = self.f().iter().map(|x| *x / sigma).collect();
        let kf = self.ops.apply_stiffness(&unscaled);
        let flip = if side == VertexClass::Minus { -T::one() } else { T::one() };
        let (mut min, mut at) = (T::infinity(), None);
        let (mut strict_min, mut strict_bad) = (T::infinity(), None);
        for v in 0..kf.len() {
            let c = self.classes[v];
            if c != side && c != VertexClass::Gamma {
                continue;
            }
            let x = flip * kf[v];
            if !(x >= min) {
                min = x;
                at = Some(v);
            }
            if c == side && self.collar_s(v).is_none() {
                strict_min = strict_min.min(x);
                if !(x > T::zero()) && strict_bad.is_none() {
                    strict_bad = Some(v);
                }
            }
        }
        let value = to64(min);
        let weak_ok = value >= -WEAK_FLOOR;
        let worst = if !weak_ok { at } else { strict_bad.or(at) };
        record(
            name,
            weak_ok && strict_bad.is_none(),
            value,
            -WEAK_FLOOR,
            worst,
            format!("interior min {:.6e}", to64(strict_min)),
        )
    }

    pub fn lemma_iii(&self) -> CheckRecord {
        self.side_lemma("lemma_iii", VertexClass::Minus)
    }

    pub fn lemma_iv(&self) -> CheckRecord {
        self.side_lemma("lemma_iv", VertexClass::Plus)
    }

    pub fn lemma_v(&self) -> CheckRecord {
        let f = self.f();
        let lap = self.result.lap_f.values();
        let cc = self.result.params.c;
        let eps = self.epsilon();
        let (mut max, mut at) = (T::zero(), None);
        let mut lap_bad = None;
        for v in 0..f.len() {
            let Some(s) = self.collar_s(v) else { continue };
            if s.abs() <= eps {
                let e = (f[v] - cc * s).abs() / cc;
                if !(e <= max) {
                    max = e;
                    at = Some(v);
                }
            }
            if s.abs() < eps && lap[v] != T::zero() && lap_bad.is_none() {
                lap_bad = Some(v);
            }
        }
        let flat = to64(self.mesh.collar_flatness_defect());
        let value = to64(max);
        let pass = value <= WEAK_FLOOR && lap_bad.is_none() && flat <= WEAK_FLOOR;
        let worst = if value > WEAK_FLOOR { at } else { lap_bad.or(at) };
        record(
            "lemma_v",
            pass,
            value,
            WEAK_FLOOR,
            worst,
            format!("collar flatness defect {flat:.3e}"),
        )
    }

    pub fn adaptedness(&self) -> CheckRecord {
        self.adaptedness_with(Orientation::Positive)
    }

    /// Samples faces and compares `⋆α` with `dα` for `α = u dt + du∘j` in
    /// the product coframe `(dt, θ¹, θ²)`. Only the `θ¹∧θ²` component may
    /// differ, by the face's own 2-D identity defect `u − D`.
    pub fn adaptedness_with(&self, orientation: Orientation) -> CheckRecord {
        let faces = self.sampled_faces();
        let ku = self.ops.apply_stiffness(self.u());
        let sign = match orientation {
            Orientation::Positive => 1.0,
            Orientation::Negative => -1.0,
        };
        let (mut worst, mut at) = (0.0f64, None);
        for &fi in &faces {
            let ratio = self.face_defect(fi, &ku, sign);
            if !(ratio <= worst) {
                worst = ratio;
                at = Some(fi);
            }
        }
        record(
            "adaptedness",
            worst <= 1.0,
            worst,
            1.0,
            at,
            format!("{} faces sampled, seed {}", faces.len(), self.options.seed),
        )
    }

    /// Faces visited by the adaptedness check, sorted.
    pub fn sampled_faces(&self) -> Vec<usize> {
        let nf = self.ops.n_faces();
        if self.options.samples >= nf {
            return (0..nf).collect();
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.options.seed);
        let mut faces = sample(&mut rng, nf, self.options.samples).into_vec();
        faces.sort_unstable();
        faces
    }

    /// Largest component defect over its tolerance on one face.
    fn face_defect(&self, fi: usize, ku: &[T], sign: f64) -> f64 {
        let face = self.ops.faces()[fi];
        let l = self.mesh.tri().face_lengths(fi).map(to64);
        // Local ω-orthonormal frame; vertex 0 at the origin, vertex 1 on
        // the x axis, vertex 2 above it.
        let (a, b) = (l[2], l[1]);
        let x2 = (a * a + b * b - l[0] * l[0]) / (2.0 * a);
        let y2 = (b * b - x2 * x2).max(0.0).sqrt();
        let u: Vec<f64> = face.iter().map(|&v| to64(self.u()[v])).collect();
        let gx = (u[1] - u[0]) / a;
        let gy = (u[2] - u[0] - gx * x2) / y2;
        let rho = to64(self.result.omega.values()[fi]) / to64(self.result.omega_ref.values()[fi]);
        if !(rho > 0.0) || !y2.is_finite() || y2 == 0.0 {
            return f64::INFINITY;
        }
        let sr = rho.sqrt();
        let ubar = (u[0] + u[1] + u[2]) / 3.0;
        let dens = face
            .iter()
            .map(|&v| to64(ku[v]) / to64(self.ref_mass[v]))
            .sum::<f64>()
            / 3.0
            / rho;
        // α = a0 θ⁰ + a1 θ¹ + a2 θ².
        let alpha = [ubar, gy / sr, -gx / sr];
        // 2-forms as components on (θ¹∧θ², θ²∧θ⁰, θ⁰∧θ¹).
        let star = [sign * alpha[0], sign * alpha[1], sign * alpha[2]];
        // dα = du∧dt + d(du∘j); du = (gx θ¹ + gy θ²)/√ρ.
        let (du1, du2) = (gx / sr, gy / sr);
        let dalpha = [dens, du2, -du1];
        let allowed = [(ubar - dens).abs() * (1.0 + 1e-9), 0.0, 0.0];
        let scale = 1.0 + alpha.iter().chain(&dalpha).fold(0.0f64, |m, x| m.max(x.abs()));
        (0..3)
            .map(|i| (star[i] - dalpha[i]).abs() / (allowed[i] + WEAK_FLOOR * scale))
            .fold(0.0, f64::max)
    }

    /// All checks in the fixed report order, with summary values filled in.
    pub fn run(&self) -> VerificationReport {
        let mut report = VerificationReport::default();
        let p = &self.result.params;
        report.push_meta("run.level", self.options.level);
        report.push_meta("run.seed", self.options.seed);
        report.push_meta("run.samples", self.options.samples);
        report.push_meta("run.vertices", self.ops.n_vertices());
        report.push_meta("run.faces", self.ops.n_faces());
        report.push_meta("run.strip_hops", self.options.strip_hops());
        report.push_meta("param.C", format!("{:.16e}", to64(p.c)));
        report.push_meta("param.epsilon", format!("{:.16e}", to64(p.epsilon)));
        report.push_meta("param.sigma", format!("{:.16e}", to64(p.sigma)));
        report.push_meta("param.rho0", format!("{:.16e}", to64(p.rho0)));
        report.push_meta("param.margin", format!("{:.16e}", to64(p.margin)));
        for s in &p.slopes {
            let side = match s.side {
                crate::mesh::Side::Minus => "minus",
                crate::mesh::Side::Plus => "plus",
            };
            report.push_meta(&format!("param.A.{}.{side}", s.circle), format!("{:.16e}", to64(s.a)));
        }
        let (eigen, summary) = self.eigen_identity();
        report.checks.push(self.nodal_set());
        report.checks.push(self.positivity());
        report.checks.push(self.contact_condition());
        report.checks.push(eigen);
        report.checks.push(self.lemma_i());
        report.checks.push(self.lemma_ii());
        report.checks.push(self.lemma_iii());
        report.checks.push(self.lemma_iv());
        report.checks.push(self.lemma_v());
        report.checks.push(self.adaptedness());
        report.min_omega = report.check("positivity").map_or(f64::NAN, |c| c.value);
        report.min_contact = report.check("contact_condition").map_or(f64::NAN, |c| c.value);
        let s = summary.unwrap_or(ResidualSummary {
            total: f64::INFINITY,
            interior: f64::INFINITY,
            seam: f64::INFINITY,
            seam_worst: f64::INFINITY,
            linear: f64::INFINITY,
            worst_vertex: 0,
        });
        report.eigen_residual = s.total;
        report.interior_residual = s.interior;
        report.seam_residual = s.seam;
        report.seam_worst = s.seam_worst;
        report.linear_residual = s.linear;
        report
    }
}

/// Runs every check with the given options.
pub fn verify<T: Scalar>(
    mesh: &LabeledSurfaceMesh<T>,
    result: &ConstructionResult<T>,
    options: VerifyOptions,
) -> Result<VerificationReport, DecError> {
    Ok(Verifier::new(mesh, result, options)?.run())
}

/// Largest deviations of `u` from `sin(C s)` and of `Ω/ω` from `C²` over
/// the collar elements with `|s| < ε`, relative to 1 and `C²`.
pub fn collar_closed_form_defect<T: Scalar>(
    mesh: &LabeledSurfaceMesh<T>,
    result: &ConstructionResult<T>,
) -> (f64, f64) {
    let p = &result.params;
    let inside = |v: usize| mesh.collar_s()[v].is_some_and(|s| s.abs() < p.epsilon);
    let u = result.u.values();
    let mut du = 0.0f64;
    for v in 0..u.len() {
        if let Some(s) = mesh.collar_s()[v].filter(|_| inside(v)) {
            du = du.max(to64((u[v] - (p.c * s).sin()).abs()));
        }
    }
    let c2 = p.c * p.c;
    let mut dom = 0.0f64;
    for (f, face) in mesh.tri().faces().iter().enumerate() {
        if face.iter().all(|&v| inside(v)) {
            let rho = result.omega.values()[f] / result.omega_ref.values()[f];
            dom = dom.max(to64(((rho - c2) / c2).abs()));
        }
    }
    (du, dom)
}

fn seam_strip<T: Scalar>(mesh: &LabeledSurfaceMesh<T>, hops: usize) -> Vec<bool> {
    let tri = mesh.tri();
    let nbrs = tri.vertex_neighbors();
    let mut depth = vec![usize::MAX; tri.n_vertices()];
    let mut queue = VecDeque::new();
    for c in mesh.collars() {
        for ring in [c.rings.first(), c.rings.last()].into_iter().flatten() {
            for &v in ring {
                depth[v] = 0;
                queue.push_back(v);
            }
        }
    }
    while let Some(v) = queue.pop_front() {
        if depth[v] == hops {
            continue;
        }
        for &w in &nbrs[v] {
            if depth[w] == usize::MAX {
                depth[w] = depth[v] + 1;
                queue.push_back(w);
            }
        }
    }
    depth.iter().map(|d| *d != usize::MAX).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{construct, ConstructionParams};
    use crate::mesh::generate_preset;

    fn sphere() -> (LabeledSurfaceMesh<f64>, ConstructionResult<f64>) {
        let mesh = generate_preset("sphere-equator", 0).unwrap();
        let r = construct(&mesh, &ConstructionParams::default()).unwrap();
        (mesh, r)
    }

    #[test]
    fn tolerance_halves_per_level() {
        assert_eq!(eigen_tolerance(0), 0.2);
        assert_eq!(eigen_tolerance(2), 0.05);
        let o = VerifyOptions { eigen_tol: Some(0.3), ..VerifyOptions::at_level(2) };
        assert_eq!(o.eigen_tol(), 0.3);
        assert_eq!(VerifyOptions::at_level(3).strip_hops(), 8);
    }

    #[test]
    fn every_check_passes_on_the_sphere() {
        let (mesh, r) = sphere();
        let report = verify(&mesh, &r, VerifyOptions::default()).unwrap();
        assert!(report.all_pass(), "{:?}", report.failing());
        let names: Vec<&str> = report.checks.iter().map(|c| c.name.as_str()).collect();
        assert_eq!(
            names,
            [
                "nodal_set",
                "positivity",
                "contact_condition",
                "eigen_identity",
                "lemma_i",
                "lemma_ii",
                "lemma_iii",
                "lemma_iv",
                "lemma_v",
                "adaptedness"
            ]
        );
        let s = report.interior_residual.powi(2) + report.seam_residual.powi(2);
        assert!((s.sqrt() - report.eigen_residual).abs() < 1e-12);
    }

    #[test]
    fn reports_are_reproducible() {
        let (mesh, r) = sphere();
        let a = verify(&mesh, &r, VerifyOptions::default()).unwrap().to_text();
        let b = verify(&mesh, &r, VerifyOptions::default()).unwrap().to_text();
        assert_eq!(a, b);
    }

    #[test]
    fn seam_strip_covers_end_rings_only() {
        let (mesh, r) = sphere();
        let v = Verifier::new(&mesh, &r, VerifyOptions::default()).unwrap();
        let strip = v.seam_strip();
        for c in mesh.collars() {
            assert!(c.rings[0].iter().all(|&x| strip[x]));
            let mid = &c.rings[c.half_rings()];
            assert!(mid.iter().all(|&x| !strip[x]));
        }
    }

    #[test]
    fn sampling_depends_on_the_seed() {
        let (mesh, r) = sphere();
        let a = Verifier::new(&mesh, &r, VerifyOptions::default()).unwrap();
        let b = Verifier::new(&mesh, &r, VerifyOptions { seed: 8, ..Default::default() }).unwrap();
        assert!(a.adaptedness().pass && b.adaptedness().pass);
        assert_eq!(a.sampled_faces().len(), DEFAULT_SAMPLES);
        assert_eq!(a.sampled_faces(), a.sampled_faces());
        assert_ne!(a.sampled_faces(), b.sampled_faces());
    }

    #[test]
    fn reduction_holds_on_every_face() {
        // Every face, not just a sample.
        let (mesh, r) = sphere();
        let v = Verifier::new(&mesh, &r, VerifyOptions { samples: usize::MAX, ..Default::default() }).unwrap();
        let rec = v.adaptedness();
        assert!(rec.pass);
        assert!(rec.value <= 1.0);
    }

    #[test]
    fn mismatched_fields_are_rejected() {
        let (mesh, mut r) = sphere();
        r.omega = crate::dec::Cochain::primal(2, vec![1.0; 3]).unwrap();
        assert!(Verifier::new(&mesh, &r, VerifyOptions::default()).is_err());
    }

    #[test]
    fn closed_form_defect_is_zero_on_the_band() {
        let (mesh, r) = sphere();
        let (du, dom) = collar_closed_form_defect(&mesh, &r);
        assert!(du <= 1e-15 && dom <= 1e-15);
    }
}
