use super::*;
use crate::fixtures::{catenoid, expr, flat_plane, sphere, unit_sphere};
use crate::rng::SplitMix64;
use alloc::collections::BTreeMap;

#[test]
fn flat_plane_is_totally_geodesic() {
    let amb = AmbientSpace::euclidean(3);
    let geo = geometry_at(&flat_plane(), &amb, &[0.3, -0.7], Orientation::Plus).unwrap();
    assert_eq!(geo.f, 0.0);
    assert_eq!(geo.a_norm_sq, 0.0);
    for i in 0..2 {
        for j in 0..2 {
            assert_eq!(geo.b.at(i, j), 0.0);
        }
    }
    assert_eq!(geo.eta, vec![0.0, 0.0, 1.0]);
}

#[test]
fn unit_sphere_inward_normal_has_f_one() {
    let amb = AmbientSpace::euclidean(3);
    let sg = SurfaceGeometry::new(&unit_sphere(), &amb).unwrap();
    let mut rng = SplitMix64::new(7);
    for _ in 0..12 {
        let u = [rng.uniform(0.2, 3.0), rng.uniform(0.1, 6.0)];
        // Pick the orientation that points inward at this point.
        let geo = sg.at(&u, Orientation::Plus).unwrap();
        let geo = if crate::linalg::dot(&geo.eta, &geo.x) > 0.0 {
            sg.at(&u, Orientation::Minus).unwrap()
        } else {
            geo
        };
        assert!((geo.f - 1.0).abs() < 1e-10, "f = {}", geo.f);
        assert!((geo.a_norm_sq - 2.0).abs() < 1e-9);
        // Umbilic: |A|² − m f² = 0.
        assert!((geo.a_norm_sq - 2.0 * geo.f * geo.f).abs() < 1e-10);
        // Unit normal, orthogonal to the frame.
        assert!((crate::linalg::norm(&geo.eta) - 1.0).abs() < 1e-12);
        for row in &geo.frame {
            assert!(crate::linalg::dot(&geo.eta, row).abs() < 1e-12);
        }
    }
}

#[test]
fn catenoid_is_minimal_with_known_curvatures() {
    let amb = AmbientSpace::euclidean(3);
    let sg = SurfaceGeometry::new(&catenoid(), &amb).unwrap();
    let geo = sg.at(&[1.0, 0.0], Orientation::Plus).unwrap();
    assert!(geo.f.abs() < 1e-10);
    assert!((geo.a_norm_sq - 2.0).abs() < 1e-9);
    // Principal curvatures ±1/cosh²(x₂) from the 2×2 shape operator.
    let tr = geo.a.trace();
    let det = geo.a.at(0, 0) * geo.a.at(1, 1) - geo.a.at(0, 1) * geo.a.at(1, 0);
    let disc = (tr * tr / 4.0 - det).max(0.0).sqrt();
    let (k1, k2) = (tr / 2.0 + disc, tr / 2.0 - disc);
    let x2: f64 = 0.0;
    let want = 1.0 / x2.cosh().powi(2);
    assert!((k1 - want).abs() < 1e-10);
    assert!((k2 + want).abs() < 1e-10);

    // Away from the waist the catenoid is strictly non-umbilic.
    let geo = sg.at(&[0.5, 1.2], Orientation::Plus).unwrap();
    assert!(geo.f.abs() < 1e-10);
    assert!(geo.a_norm_sq - 2.0 * geo.f * geo.f > 1e-3);
}

#[test]
fn shape_operator_is_self_adjoint() {
    let amb = AmbientSpace::conformal(3, None, expr("0.2*z + 0.1*sin(x)")).unwrap();
    let sg = SurfaceGeometry::new(&catenoid(), &amb).unwrap();
    let geo = sg.at(&[0.9, 0.4], Orientation::Plus).unwrap();
    // g(A ∂_i, ∂_j) symmetric.
    let ga = geo.g.matmul(&geo.a);
    for i in 0..2 {
        for j in 0..2 {
            assert!((ga.at(i, j) - ga.at(j, i)).abs() < 1e-10);
        }
    }
    // f = trace(A)/m.
    assert!((geo.f - geo.a.trace() / 2.0).abs() < 1e-12);
    // h̃-unit normal, h̃-orthogonal frame.
    let metric = amb.metric_at(&geo.x).unwrap();
    assert!((metric.quadratic_form(&geo.eta) - 1.0).abs() < 1e-12);
    for row in &geo.frame {
        let mut pair = 0.0;
        for a in 0..3 {
            pair += metric.at(a, a) * geo.eta[a] * row[a];
        }
        assert!(pair.abs() < 1e-11);
    }
}

#[test]
fn degenerate_points_are_reported() {
    // Polar-style chart of a plane: X₂ vanishes where the profile is flat.
    let imm = Immersion::new(
        vec!["x1".into(), "x2".into()],
        vec![
            expr("(1 + x2^2)*cos(x1)"),
            expr("(1 + x2^2)*sin(x1)"),
            expr("1"),
        ],
        vec![(0.1, 6.0), (-1.0, 1.0)],
    )
    .unwrap();
    let amb = AmbientSpace::euclidean(3);
    let sg = SurfaceGeometry::new(&imm, &amb).unwrap();
    match sg.at(&[1.0, 0.0], Orientation::Plus) {
        Err(GeometryError::DegeneratePoint { .. }) => {}
        other => panic!("expected degenerate point, got {other:?}"),
    }
    assert!(sg.at(&[1.0, 0.5], Orientation::Plus).is_ok());
}

#[test]
fn outside_domain_is_rejected() {
    let amb = AmbientSpace::euclidean(3);
    let sg = SurfaceGeometry::new(&flat_plane(), &amb).unwrap();
    assert!(matches!(
        sg.at(&[5.0, 0.0], Orientation::Plus),
        Err(GeometryError::OutsideDomain { .. })
    ));
}

#[test]
fn laplacian_of_constant_and_coordinates() {
    let amb = AmbientSpace::euclidean(3);
    let ops = intrinsic_scalar_ops(&flat_plane(), &amb, &expr("3.5"), &[0.2, 0.4]).unwrap();
    assert_eq!(ops.lap_m, 0.0);
    assert_eq!(ops.grad_m, vec![0.0, 0.0]);

    let ops = intrinsic_scalar_ops(&flat_plane(), &amb, &expr("u1"), &[0.2, 0.4]).unwrap();
    assert!(ops.lap_m.abs() < 1e-13);

    // Euclidean Laplacian of u² + v² is 4.
    let ops =
        intrinsic_scalar_ops(&flat_plane(), &amb, &expr("u1^2 + u2^2"), &[0.2, 0.4]).unwrap();
    assert!((ops.lap_m - 4.0).abs() < 1e-11);
}

#[test]
fn sphere_laplacian_eigenfunction() {
    // On S², cos θ is a degree-1 spherical harmonic: Δ cos θ = −2 cos θ.
    let amb = AmbientSpace::euclidean(3);
    let imm = unit_sphere();
    let mut rng = SplitMix64::new(3);
    for _ in 0..8 {
        let u = [rng.uniform(0.3, 2.8), rng.uniform(0.1, 6.0)];
        let ops = intrinsic_scalar_ops(&imm, &amb, &expr("cos(theta)"), &u).unwrap();
        let want = -2.0 * u[0].cos();
        assert!((ops.lap_m - want).abs() < 1e-9, "{} vs {want}", ops.lap_m);
    }
}

#[test]
fn flat_ambient_curvature_is_exactly_zero() {
    let amb = AmbientSpace::euclidean(3);
    let geo = geometry_at(&unit_sphere(), &amb, &[1.0, 2.0], Orientation::Plus).unwrap();
    let cur = ambient_curvature(&amb, &geo.x, &geo.eta, &geo.frame).unwrap();
    assert_eq!(cur.ric_eta_eta, 0.0);
    assert_eq!(cur.ricci_eta_tan, vec![0.0, 0.0]);
    assert_eq!(cur.scalar_s, 0.0);
}

fn stereographic_gamma() -> Expr {
    expr("ln(2/(1 + x^2 + y^2 + z^2))")
}

#[test]
fn stereographic_sphere_metric_is_einstein() {
    // e^{2γ} h with γ = ln(2/(1+|x|²)) is the round 3-sphere: S = 6 and
    // Ric = 2·metric everywhere.
    let amb = AmbientSpace::einstein(
        3,
        None,
        stereographic_gamma(),
        6.0,
        &[(-2.0, 2.0), (-2.0, 2.0), (-2.0, 2.0)],
        EINSTEIN_SAMPLES,
        EINSTEIN_TOL,
        11,
    )
    .unwrap();
    assert_eq!(
        amb.class(),
        AmbientClass::DeclaredEinstein { scalar_curvature: 6.0 }
    );
    let mut rng = SplitMix64::new(5);
    for _ in 0..10 {
        let x = [rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)];
        let ric = amb.ricci_matrix_at(&x).unwrap();
        let metric = amb.metric_at(&x).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!((ric.at(i, j) - 2.0 * metric.at(i, j)).abs() < 1e-9);
            }
        }
    }

    // A wrong declared curvature fails validation.
    assert!(matches!(
        AmbientSpace::einstein(
            3,
            None,
            stereographic_gamma(),
            5.0,
            &[(-2.0, 2.0), (-2.0, 2.0), (-2.0, 2.0)],
            20,
            EINSTEIN_TOL,
            11,
        ),
        Err(GeometryError::NotEinstein { .. })
    ));
}

#[test]
fn stereographic_scalar_curvature_via_christoffels() {
    let amb = AmbientSpace::conformal(3, None, stereographic_gamma()).unwrap();
    let geo = geometry_at(&sphere(0.4), &amb, &[1.1, 0.7], Orientation::Plus).unwrap();
    let cur = ambient_curvature(&amb, &geo.x, &geo.eta, &geo.frame).unwrap();
    assert!((cur.scalar_s - 6.0).abs() < 1e-9, "S = {}", cur.scalar_s);
    assert!((cur.ric_eta_eta - 2.0).abs() < 1e-9);
}

#[test]
fn normal_coordinate_gamma_has_no_tangential_ricci() {
    // γ = γ(z) on a horizontal plane: (Ricci η)^⊤ vanishes by symmetry.
    let amb = AmbientSpace::conformal(3, None, expr("0.3*z + 0.1*z^2")).unwrap();
    let geo = geometry_at(&flat_plane(), &amb, &[0.4, -0.3], Orientation::Plus).unwrap();
    for t in &geo.ricci_eta_tan {
        assert!(t.abs() < 1e-12);
    }
}

#[test]
fn gamma_fields_on_hyperplane() {
    // Base geometry with γ = z on the plane z = 0: η(γ) = 1, flat Hessian 0,
    // intrinsic composites all vanish.
    let coords = default_coords(3);
    let geo =
        base_geometry_with_gamma(&flat_plane(), &expr("z"), &coords, &[0.3, 0.6], Orientation::Plus)
            .unwrap();
    assert!((geo.eta_gamma - 1.0).abs() < 1e-14);
    assert_eq!(geo.hess_gamma_eta_eta, 0.0);
    assert_eq!(geo.grad_m_gamma, vec![0.0, 0.0]);
    assert_eq!(geo.lap_m_gamma, 0.0);
    assert_eq!(geo.grad_eta_gamma, vec![0.0, 0.0]);
    assert_eq!(geo.lap_s, 0.0);
    assert!((geo.amb_grad_gamma_sq - 1.0).abs() < 1e-14);
    assert_eq!(geo.amb_lap_gamma, 0.0);
    assert_eq!(geo.f, 0.0);
}

#[test]
fn frame_independence_under_linear_chart_change() {
    // Precompose the catenoid with a random linear chart change; scalar
    // fields must agree at matched points.
    let amb = AmbientSpace::conformal(3, None, expr("0.2*z + 0.05*x")).unwrap();
    let imm = catenoid();
    let sg = SurfaceGeometry::new(&imm, &amb).unwrap();

    let mut rng = SplitMix64::new(17);
    for _ in 0..5 {
        let l = [
            [rng.uniform(0.5, 1.5), rng.uniform(-0.4, 0.4)],
            [rng.uniform(-0.4, 0.4), rng.uniform(0.5, 1.5)],
        ];
        let mut map = BTreeMap::new();
        map.insert(
            "x1".to_string(),
            Expr::constant(l[0][0]) * Expr::var("v1") + Expr::constant(l[0][1]) * Expr::var("v2"),
        );
        map.insert(
            "x2".to_string(),
            Expr::constant(l[1][0]) * Expr::var("v1") + Expr::constant(l[1][1]) * Expr::var("v2"),
        );
        let comps: Vec<Expr> = imm.components().iter().map(|c| c.substitute(&map)).collect();
        let reparm = Immersion::new(
            vec!["v1".into(), "v2".into()],
            comps,
            vec![(-50.0, 50.0), (-50.0, 50.0)],
        )
        .unwrap();
        let sg2 = SurfaceGeometry::new(&reparm, &amb).unwrap();

        let v = [rng.uniform(0.5, 1.5), rng.uniform(-0.8, 0.8)];
        let u = [
            l[0][0] * v[0] + l[0][1] * v[1],
            l[1][0] * v[0] + l[1][1] * v[1],
        ];
        if u[1].abs() > 2.8 {
            continue;
        }
        let g1 = sg.at(&u, Orientation::Plus).unwrap();
        let g2 = sg2.at(&v, Orientation::Plus).unwrap();
        // The orientation rule is chart-independent up to the cross product
        // sign; compare orientation-invariant scalars plus |f|.
        assert!((g1.f.abs() - g2.f.abs()).abs() < 1e-8);
        assert!((g1.a_norm_sq - g2.a_norm_sq).abs() < 1e-8);
        assert!((g1.ric_eta_eta - g2.ric_eta_eta).abs() < 1e-8);
        assert!((g1.lap_f.abs() - g2.lap_f.abs()).abs() < 1e-7);
    }
}

#[test]
fn orientation_flip_changes_parities() {
    let amb = AmbientSpace::conformal(3, None, expr("0.2*z")).unwrap();
    let sg = SurfaceGeometry::new(&unit_sphere(), &amb).unwrap();
    let plus = sg.at(&[1.2, 0.8], Orientation::Plus).unwrap();
    let minus = sg.at(&[1.2, 0.8], Orientation::Minus).unwrap();
    assert!((plus.f + minus.f).abs() < 1e-14);
    assert_eq!(plus.a_norm_sq, minus.a_norm_sq);
    assert_eq!(plus.ric_eta_eta, minus.ric_eta_eta);
    assert!((plus.eta_gamma + minus.eta_gamma).abs() < 1e-14);
    assert_eq!(plus.hess_gamma_eta_eta, minus.hess_gamma_eta_eta);
    for a in 0..3 {
        assert!((plus.eta[a] + minus.eta[a]).abs() < 1e-14);
    }
}

#[test]
fn name_collisions_are_rejected() {
    let imm = Immersion::new(
        vec!["x".into(), "y".into()],
        vec![expr("x"), expr("y"), expr("0")],
        vec![(-1.0, 1.0), (-1.0, 1.0)],
    )
    .unwrap();
    let amb = AmbientSpace::euclidean(3);
    assert!(SurfaceGeometry::new(&imm, &amb).is_err());
}
