use nodaldiv::construct::{construct, ConstructionParams};
use nodaldiv::mesh::{generate_preset, Region, VertexClass};
use nodaldiv::verify::{convergence_sweep, faults, verify, VerifyOptions, Verifier};
use nodaldiv::{Construction, Mesh};

fn run(name: &str, level: u32) -> (Mesh, Construction) {
    let mesh = generate_preset::<f64>(name, level).unwrap();
    let r = construct(&mesh, &ConstructionParams::default()).unwrap();
    (mesh, r)
}

#[test]
fn torus_has_two_zero_circles() {
    let (mesh, r) = run("torus-two-meridians", 0);
    let report = verify(&mesh, &r, VerifyOptions::default()).unwrap();
    assert!(report.all_pass(), "{:?}", report.failing());
    let zeros: Vec<usize> = (0..r.u.len()).filter(|&v| r.u.values()[v] == 0.0).collect();
    assert_eq!(zeros, {
        let mut g = mesh.gamma_vertices().to_vec();
        g.sort_unstable();
        g
    });
    assert_eq!(mesh.collars().len(), 2);
    for c in mesh.collars() {
        let mid = &c.rings[c.half_rings()];
        assert!(mid.iter().all(|&v| r.u.values()[v] == 0.0));
    }
}

#[test]
fn cot_term_carries_positivity_away_from_the_collar() {
    // Where |dF|² is small (near critical points of F) Ω stays positive
    // through the −cot(F)·ΔF term alone.
    let (mesh, r) = run("sphere-equator", 0);
    for (f, label) in mesh.labels().iter().enumerate() {
        if matches!(label, Region::Minus | Region::Plus) {
            assert!(r.cot_term[f] > 0.0, "face {f}");
        }
    }
}

#[test]
fn unmirrored_plus_side_is_caught_next_to_the_seam() {
    let (mesh, base) = run("sphere-equator", 0);
    let mut r = base.clone();
    faults::unmirror_plus(&mesh, &mut r);
    let v = Verifier::new(&mesh, &r, VerifyOptions::default()).unwrap();
    let rec = v.lemma_iv();
    assert!(!rec.pass);
    let w = rec.worst.unwrap();
    assert_eq!(mesh.vertex_classes()[w], VertexClass::Plus);
    assert!(mesh.collar_s()[w].is_none());
    let nbrs = mesh.tri().vertex_neighbors();
    assert!(nbrs[w].iter().any(|&x| mesh.collar_s()[x] == Some(1.0)));
    // F = C at s = 1 also exceeds the π/2 bound; the minus side is intact.
    assert!(!v.lemma_i().pass);
    assert!(v.lemma_ii().pass && v.lemma_iii().pass);
}

#[test]
fn torus_sweep_decreases() {
    let sweep = convergence_sweep(
        0..=2,
        |l| generate_preset::<f64>("torus-two-meridians", l),
        &ConstructionParams::default(),
        VerifyOptions::default(),
    )
    .unwrap();
    assert!(sweep.strictly_decreasing());
    assert!(sweep.bounded_below());
    let report = sweep.into_report();
    assert_eq!(report.sweep.len(), 3);
    assert!(report.check("sweep_decreasing").unwrap().pass);
    assert!(report.check("sweep_floor").unwrap().pass);
    assert_eq!(report.sweep_csv().lines().count(), 4);
    let h: Vec<f64> = report.sweep.iter().map(|r| r.h).collect();
    let h0 = std::f64::consts::PI / 8.0;
    for (k, h) in h.iter().enumerate() {
        assert!((h - h0 / f64::from(1 << k)).abs() < 1e-14);
    }
}

#[test]
fn single_level_sweep_is_vacuous() {
    let sweep = convergence_sweep(
        [1],
        |l| generate_preset::<f64>("genus2-separating", l),
        &ConstructionParams::default(),
        VerifyOptions::default(),
    )
    .unwrap();
    assert!(sweep.strictly_decreasing());
    assert!(sweep.orders(|r| r.eigen_residual).is_empty());
    assert_eq!(sweep.rows[0].level, 1);
}

#[test]
fn sphere_with_two_circles_runs_end_to_end() {
    let (mesh, r) = run("sphere-two-circles", 0);
    assert_eq!(mesh.euler_characteristic(), 2);
    let report = verify(&mesh, &r, VerifyOptions::default()).unwrap();
    assert!(report.all_pass(), "{:?}", report.failing());
    assert_eq!(r.params.slopes.len(), 4);
}

#[test]
fn residual_field_matches_the_summary() {
    let (mesh, r) = run("sphere-equator", 0);
    let v = Verifier::new(&mesh, &r, VerifyOptions::default()).unwrap();
    let field = v.residual_field().unwrap();
    let s = v.residuals().unwrap();
    let worst = field.iter().map(|x| x.abs()).fold(0.0, f64::max);
    assert_eq!(field[s.worst_vertex].abs(), worst);
}

#[test]
fn nonpositive_omega_is_reported_not_raised() {
    let (mesh, base) = run("sphere-equator", 0);
    let mut r = base.clone();
    faults::zero_omega_face(&mut r, 5);
    let report = verify(&mesh, &r, VerifyOptions::default()).unwrap();
    let e = report.check("eigen_identity").unwrap();
    assert!(!e.pass && e.worst == Some(5));
    assert!(report.eigen_residual.is_infinite());
    assert_eq!(report.check("positivity").unwrap().worst, Some(5));
}
