use num_rational::Ratio;
use proptest::prelude::*;

use nodaldiv::construct::ConvexProfile;
use nodaldiv::dec::{d, eigen_residual, grad_norm_sq, rotate_j, Cochain, OperatorBundle};
use nodaldiv::mesh::{flat_torus, generate_preset};
use nodaldiv::sparse::CsrMatrix;
use nodaldiv::verify::{CheckRecord, VerificationReport};
use nodaldiv::{Mesh, Tri};

fn sphere() -> &'static Mesh {
    use std::sync::OnceLock;
    static M: OnceLock<Mesh> = OnceLock::new();
    M.get_or_init(|| generate_preset("sphere-equator", 0).unwrap())
}

fn torus() -> Tri {
    flat_torus(6)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn d_squared_is_exactly_zero(vals in prop::collection::vec(-1000i64..1000, 36), den in 1i64..50) {
        let t = torus();
        let u: Vec<Ratio<i64>> = vals.iter().map(|v| Ratio::new(*v, den)).collect();
        let du = d(&t, &Cochain::primal(0, u).unwrap()).unwrap();
        let ddu = d(&t, &du).unwrap();
        prop_assert!(ddu.values().iter().all(|x| *x == Ratio::from_integer(0)));
    }

    #[test]
    fn stiffness_is_symmetric(
        u in prop::collection::vec(-1.0f64..1.0, 1234),
        w in prop::collection::vec(-1.0f64..1.0, 1234),
    ) {
        let ops = OperatorBundle::new(sphere().tri()).unwrap();
        prop_assert_eq!(ops.n_vertices(), u.len());
        let (ku, kw) = (ops.apply_stiffness(&u), ops.apply_stiffness(&w));
        let (a, b) = (dot(&ku, &w), dot(&u, &kw));
        prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0));
        prop_assert!(dot(&ku, &u) >= -1e-12);
    }

    #[test]
    fn hodge_star_is_conformally_invariant(k in 0.01f64..100.0) {
        let t = sphere().tri();
        let a = OperatorBundle::new(t).unwrap();
        let b = OperatorBundle::new(&t.scaled(k)).unwrap();
        for (x, y) in a.hodge1().iter().zip(b.hodge1()) {
            prop_assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0));
        }
    }

    #[test]
    fn stiffness_kills_constants(c in -1e3f64..1e3) {
        let ops = OperatorBundle::new(sphere().tri()).unwrap();
        let ku = ops.apply_stiffness(&vec![c; ops.n_vertices()]);
        prop_assert!(ku.iter().all(|x| x.abs() <= 1e-12 * c.abs().max(1.0)));
    }

    #[test]
    fn masses_partition_the_area(scale in prop::collection::vec(0.1f64..10.0, 72)) {
        let t = torus();
        let ops = OperatorBundle::new(&t).unwrap();
        let area: Vec<f64> = ops.face_area().iter().zip(&scale).map(|(a, s)| a * s).collect();
        let m = ops.mass(&area).unwrap();
        let total: f64 = area.iter().sum();
        prop_assert!((m.iter().sum::<f64>() - total).abs() <= 1e-12 * total);
        prop_assert!(m.iter().all(|x| *x > 0.0));
    }

    #[test]
    fn gradient_obeys_the_conformal_law(vals in prop::collection::vec(-1.0f64..1.0, 36), k in 0.1f64..10.0) {
        let t = torus();
        let ops = OperatorBundle::new(&t).unwrap();
        let u = Cochain::primal(0, vals).unwrap();
        let a = Cochain::primal(2, ops.face_area().to_vec()).unwrap();
        let ak = Cochain::primal(2, ops.face_area().iter().map(|x| x * k).collect()).unwrap();
        let g = grad_norm_sq(&ops, &u, &a).unwrap();
        let gk = grad_norm_sq(&ops, &u, &ak).unwrap();
        for (x, y) in g.values().iter().zip(gk.values()) {
            prop_assert!(*x >= 0.0);
            prop_assert!((x / k - y).abs() <= 1e-12 * x.max(1.0));
        }
    }

    #[test]
    fn residual_is_scale_free(vals in prop::collection::vec(0.5f64..1.5, 36), k in 0.1f64..10.0, lambda in 0.0f64..4.0) {
        let t = torus();
        let ops = OperatorBundle::new(&t).unwrap();
        let m = ops.reference_mass();
        let u = Cochain::primal(0, vals.clone()).unwrap();
        let uk = Cochain::primal(0, vals.iter().map(|x| x * k).collect()).unwrap();
        let r = eigen_residual(ops.stiffness(), &m, &u, lambda).unwrap();
        let rk = eigen_residual(ops.stiffness(), &m, &uk, lambda).unwrap();
        prop_assert!(r >= 0.0);
        prop_assert!((r - rk).abs() <= 1e-10 * r.max(1.0));
    }

    #[test]
    fn j_squared_is_minus_one(vals in prop::collection::vec(-1.0f64..1.0, 108)) {
        let t = torus();
        let ops = OperatorBundle::new(&t).unwrap();
        let c = Cochain::primal(1, vals.clone()).unwrap();
        let jj = rotate_j(&ops, &rotate_j(&ops, &c).unwrap()).unwrap();
        for (e, (x, y)) in vals.iter().zip(jj.values()).enumerate() {
            let expect = if ops.hodge1()[e] == 0.0 { 0.0 } else { -x };
            prop_assert!((y - expect).abs() <= 1e-14);
        }
    }

    #[test]
    fn triplets_sum_duplicates(entries in prop::collection::vec((0usize..5, 0usize..5, -10.0f64..10.0), 0..40)) {
        let m = CsrMatrix::from_triplets(5, 5, entries.clone());
        let mut dense = [[0.0f64; 5]; 5];
        for (i, j, v) in &entries {
            dense[*i][*j] += v;
        }
        for (i, row) in dense.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                prop_assert!((m.get(i, j) - v).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn profiles_are_monotone_and_convex(a in 0.01f64..0.499) {
        let p = ConvexProfile::new(a).unwrap();
        let c = p.certify();
        prop_assert!(c.min_slope > 0.0);
        prop_assert!(c.min_curvature >= -1e-12);
        prop_assert!(c.right_endpoint <= 1e-10);
        prop_assert!(p.linear_extent() > 0.0);
        let (s, g, _) = p.samples();
        prop_assert!(g.windows(2).all(|w| w[1] > w[0]));
        prop_assert_eq!(s.len(), 2001);
    }

    #[test]
    fn report_text_round_trips(value in -1e6f64..1e6, tol in 0.0f64..1.0, worst in prop::option::of(0usize..100000), pass in any::<bool>()) {
        let mut r = VerificationReport::default();
        r.checks.push(CheckRecord { name: "lemma_i".into(), pass, value, tol, worst, detail: String::new() });
        r.min_omega = value;
        let back = VerificationReport::parse(&r.to_text()).unwrap();
        prop_assert_eq!(&back.checks, &r.checks);
        prop_assert_eq!(back.min_omega, value);
    }
}

#[test]
fn side_swap_is_an_involution() {
    let m = sphere();
    let back = m.swap_sides().swap_sides();
    assert_eq!(back.labels(), m.labels());
    assert_eq!(back.collar_s(), m.collar_s());
}
