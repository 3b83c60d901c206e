use super::*;
use crate::expr::Expr;
use crate::fixtures::{catenoid, expr, flat_plane, sphere, unit_sphere};
use crate::geometry::{base_geometry_with_gamma, default_coords, geometry_at};
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;

fn cfg(p: f64, m: usize) -> ProblemConfig {
    ProblemConfig::new(p, m).unwrap()
}

fn hyperplane_at(c: f64) -> Immersion {
    Immersion::new(
        vec!["x1".into(), "x2".into()],
        vec![expr("x1"), expr("x2"), Expr::constant(c)],
        vec![(-1.0, 1.0), (-1.0, 1.0)],
    )
    .unwrap()
}

fn example1_gamma(p: f64, c1: f64, c2: f64) -> Expr {
    let mut map = BTreeMap::new();
    map.insert("p".into(), Expr::constant(p));
    map.insert("c1".into(), Expr::constant(c1));
    map.insert("c2".into(), Expr::constant(c2));
    expr("ln((p-1)*(c1*z+c2))/(p-1)").substitute(&map)
}

fn sphere_geo(radius: f64, p_inward: bool) -> GeometryAtPoint {
    let amb = AmbientSpace::euclidean(3);
    let geo = geometry_at(&sphere(radius), &amb, &[1.1, 0.7], Orientation::Plus).unwrap();
    let inward = crate::linalg::dot(&geo.eta, &geo.x) < 0.0;
    if inward == p_inward {
        geo
    } else {
        geo.flipped()
    }
}

#[test]
fn config_validation() {
    assert!(ProblemConfig::new(1.5, 2).is_err());
    assert!(ProblemConfig::new(2.0, 0).is_err());
    assert!(ProblemConfig::new(2.0, 2).is_ok());
}

#[test]
fn p_tension_values() {
    let amb = AmbientSpace::euclidean(3);
    let geo = geometry_at(&catenoid(), &amb, &[1.0, 0.4], Orientation::Plus).unwrap();
    let t = p_tension(&geo, &cfg(3.0, 2));
    assert!(t.norm <= 1e-9);
    assert!(t.is_p_harmonic);

    let geo = sphere_geo(1.0, true);
    let t = p_tension(&geo, &cfg(2.0, 2));
    assert!((t.norm - 2.0).abs() < 1e-10);
    assert!(!t.is_p_harmonic);

    let geo = geometry_at(&flat_plane(), &amb, &[0.2, 0.3], Orientation::Plus).unwrap();
    assert_eq!(p_tension(&geo, &cfg(2.0, 2)).norm, 0.0);
}

#[test]
fn general_system_on_minimal_surfaces_vanishes() {
    let amb = AmbientSpace::euclidean(3);
    for imm in [catenoid(), flat_plane()] {
        for p in [2.0, 3.0, 5.0] {
            let geo = geometry_at(&imm, &amb, &[0.8, 0.3], Orientation::Plus).unwrap();
            let r = residual_general(&geo, &cfg(p, 2));
            assert!(r.normal_abs < 1e-10, "normal {}", r.normal_abs);
            assert!(r.tangential_norm < 1e-10);
        }
    }
}

#[test]
fn general_system_on_spheres_matches_closed_form() {
    // Unit sphere, inward normal: normal residual m(p−1)/r³, tangential 0.
    for (p, want) in [(2.0, 2.0), (3.0, 4.0)] {
        let geo = sphere_geo(1.0, true);
        let r = residual_general(&geo, &cfg(p, 2));
        assert!((r.normal - want).abs() < 1e-9, "p={p}: {}", r.normal);
        assert!(r.tangential_norm < 1e-10);
    }
}

#[test]
fn scaling_law_on_spheres() {
    // Scaling the immersion by λ scales f by 1/λ, |A|² by 1/λ², and the
    // normal residual by 1/λ³.
    for p in [2.0, 3.0] {
        let g1 = sphere_geo(1.0, true);
        let g2 = sphere_geo(2.0, true);
        assert!((g2.f - g1.f / 2.0).abs() < 1e-10);
        assert!((g2.a_norm_sq - g1.a_norm_sq / 4.0).abs() < 1e-10);
        let r1 = residual_general(&g1, &cfg(p, 2));
        let r2 = residual_general(&g2, &cfg(p, 2));
        assert!((r2.normal - r1.normal / 8.0).abs() < 1e-9);
    }
}

#[test]
fn p_two_drops_the_cubic_and_extra_gradient_terms() {
    let amb = AmbientSpace::conformal(3, None, expr("0.2*z + 0.1*sin(x)")).unwrap();
    let geo = geometry_at(&unit_sphere(), &amb, &[1.3, 0.9], Orientation::Plus).unwrap();
    let r = residual_general(&geo, &cfg(2.0, 2));
    // Hand-assembled p = 2 system: the (p−2) factors vanish exactly.
    let normal = -geo.lap_f + geo.f * geo.a_norm_sq - geo.f * geo.ric_eta_eta;
    let a_grad = geo.a.matvec(&geo.grad_f);
    let tangential: Vec<f64> = (0..2)
        .map(|i| 2.0 * a_grad[i] - 2.0 * geo.f * geo.ricci_eta_tan[i] + 2.0 * geo.f * geo.grad_f[i])
        .collect();
    assert_eq!(r.normal, normal);
    assert_eq!(r.tangential, tangential);
}

#[test]
fn einstein_system_consistency() {
    // Flat space counts as S = 0 and the two systems coincide there.
    let amb = AmbientSpace::euclidean(3);
    let geo = geometry_at(&unit_sphere(), &amb, &[1.0, 0.5], Orientation::Plus).unwrap();
    let re = residual_einstein(&geo, &cfg(3.0, 2), 0.0).unwrap();
    let rg = residual_general(&geo, &cfg(3.0, 2));
    assert!((re.normal - rg.normal).abs() < 1e-12);
    for i in 0..2 {
        assert!((re.tangential[i] - rg.tangential[i]).abs() < 1e-12);
    }

    // A merely-conformal ambient is rejected.
    let conf = AmbientSpace::conformal(3, None, expr("0.1*z")).unwrap();
    let geo = geometry_at(&unit_sphere(), &conf, &[1.0, 0.5], Orientation::Plus).unwrap();
    assert!(matches!(
        residual_einstein(&geo, &cfg(3.0, 2), 0.0),
        Err(ResidualError::NotEinsteinValidated { .. })
    ));
}

#[test]
fn umbilic_classification_cases() {
    let r = umbilic_classification(&cfg(3.0, 2), -6.0);
    assert_eq!(r.beta_solutions, vec![0.0]);
    assert!(r.is_minimal_only);

    let r = umbilic_classification(&cfg(2.0, 2), 6.0);
    assert!(!r.is_minimal_only);
    assert_eq!(r.beta_solutions.len(), 3);
    assert!((r.beta_solutions[0] + 1.0).abs() < 1e-15);
    assert_eq!(r.beta_solutions[1], 0.0);
    assert!((r.beta_solutions[2] - 1.0).abs() < 1e-15);

    let r = umbilic_classification(&cfg(4.0, 2), 0.0);
    assert_eq!(r.beta_solutions, vec![0.0]);
    assert!(r.is_minimal_only);
}

#[test]
fn closed_form_system_with_constant_gamma_vanishes() {
    let coords = default_coords(3);
    let base = base_geometry_with_gamma(
        &catenoid(),
        &Expr::constant(0.4),
        &coords,
        &[1.2, 0.6],
        Orientation::Plus,
    )
    .unwrap();
    let r = residual_conformal_closed_form(&base, &cfg(3.0, 2)).unwrap();
    assert_eq!(r.normal, 0.0);
    assert_eq!(r.tangential_norm, 0.0);
    let r = residual_conformal_tilde(&base, &cfg(3.0, 2)).unwrap();
    assert_eq!(r.normal, 0.0);
    assert_eq!(r.tangential_norm, 0.0);
}

#[test]
fn example1_hyperplane_is_proper_p_biharmonic() {
    // The closed-form γ solves the hyperplane condition for every c with
    // c1·c + c2 > 0, so both systems vanish while f̃ does not.
    let coords = default_coords(3);
    for (p, c1, c2, c) in [(3.0, 1.0, 1.0, 0.0), (2.0, 0.7, 1.3, 0.5), (4.5, 1.8, 0.6, -0.2)] {
        let gamma = example1_gamma(p, c1, c2);
        let imm = hyperplane_at(c);
        let base =
            base_geometry_with_gamma(&imm, &gamma, &coords, &[0.3, -0.4], Orientation::Plus)
                .unwrap();
        let pc = cfg(p, 2);
        let r4 = residual_conformal_closed_form(&base, &pc).unwrap();
        assert!(r4.normal_abs < 1e-10, "p={p}: scalar {}", r4.normal_abs);
        assert!(r4.tangential_norm == 0.0, "p={p}");
        let r5 = residual_conformal_tilde(&base, &pc).unwrap();
        assert!(r5.normal_abs < 1e-10);
        assert!((r4.normal - r5.normal).abs() < 1e-8);
        // Proper: the tilde mean curvature is away from zero.
        let f_tilde = crate::conformal::tilde_mean_curvature(&base).unwrap();
        assert!(f_tilde.abs() > 1e-3);
    }
}

#[test]
fn non_minimal_base_is_rejected_by_both_conformal_routes() {
    let amb = AmbientSpace::euclidean(3);
    let geo = geometry_at(&unit_sphere(), &amb, &[1.2, 0.8], Orientation::Plus).unwrap();
    assert!(matches!(
        residual_conformal_closed_form(&geo, &cfg(2.0, 2)),
        Err(ResidualError::Conformal(ConformalError::NonMinimalBase { .. }))
    ));
    assert!(matches!(
        residual_conformal_tilde(&geo, &cfg(2.0, 2)),
        Err(ResidualError::Conformal(ConformalError::NonMinimalBase { .. }))
    ));
}

#[test]
fn orientation_invariance_of_residual_norms() {
    let gamma = expr("0.3*z + 0.1*sin(x)*cos(y)");
    let coords = default_coords(3);
    let pc = cfg(3.0, 2);
    for u in [[0.8, 0.4], [2.5, -1.0]] {
        let plus =
            base_geometry_with_gamma(&catenoid(), &gamma, &coords, &u, Orientation::Plus).unwrap();
        let minus =
            base_geometry_with_gamma(&catenoid(), &gamma, &coords, &u, Orientation::Minus).unwrap();
        for (rp, rm) in [
            (
                residual_conformal_tilde(&plus, &pc).unwrap(),
                residual_conformal_tilde(&minus, &pc).unwrap(),
            ),
            (
                residual_conformal_closed_form(&plus, &pc).unwrap(),
                residual_conformal_closed_form(&minus, &pc).unwrap(),
            ),
        ] {
            assert!((rp.normal_abs - rm.normal_abs).abs() < 1e-10);
            assert!((rp.tangential_norm - rm.tangential_norm).abs() < 1e-10);
        }
    }
    // General system too, in a conformal ambient.
    let amb = AmbientSpace::conformal(3, None, gamma).unwrap();
    let plus = geometry_at(&unit_sphere(), &amb, &[1.2, 0.8], Orientation::Plus).unwrap();
    let minus = geometry_at(&unit_sphere(), &amb, &[1.2, 0.8], Orientation::Minus).unwrap();
    let rp = residual_general(&plus, &cfg(3.0, 2));
    let rm = residual_general(&minus, &cfg(3.0, 2));
    assert!((rp.normal_abs - rm.normal_abs).abs() < 1e-10);
    assert!((rp.tangential_norm - rm.tangential_norm).abs() < 1e-10);
}

#[test]
fn remark_condition_cases() {
    let coords = default_coords(3);
    let pc = cfg(3.0, 2);

    // Linear γ = kz on a hyperplane: lhs = 0, rhs = m(1−p)k²; satisfied only
    // at k = 0.
    for k in [0.0, 0.5] {
        let gamma = Expr::constant(k) * expr("z");
        let base = base_geometry_with_gamma(
            &hyperplane_at(0.0),
            &gamma,
            &coords,
            &[0.2, 0.2],
            Orientation::Plus,
        )
        .unwrap();
        let r = remark_condition(&base, &pc, RESIDUAL_TOL).unwrap();
        assert_eq!(r.lhs, 0.0);
        let want_rhs = 2.0 * (1.0 - 3.0) * k * k;
        assert!((r.rhs - want_rhs).abs() < 1e-12);
        assert_eq!(r.satisfied, k == 0.0);
    }

    // The closed-form γ makes the right side vanish along with |A|².
    let base = base_geometry_with_gamma(
        &hyperplane_at(0.0),
        &example1_gamma(3.0, 1.0, 1.0),
        &coords,
        &[0.2, 0.2],
        Orientation::Plus,
    )
    .unwrap();
    let r = remark_condition(&base, &pc, RESIDUAL_TOL).unwrap();
    assert!(r.rhs.abs() < 1e-12);
    assert!(r.satisfied);

    // On the catenoid η(γ) varies for γ = z: precondition violated.
    let base = base_geometry_with_gamma(
        &catenoid(),
        &expr("z"),
        &coords,
        &[0.9, 0.7],
        Orientation::Plus,
    )
    .unwrap();
    assert!(matches!(
        remark_condition(&base, &pc, RESIDUAL_TOL),
        Err(ResidualError::ConstancyViolated { .. })
    ));
}

#[test]
fn ode_example1_values() {
    // The closed-form γ solves the condition identically.
    let g = example1_gamma(3.0, 1.0, 1.0);
    let v = ode_example1(&g, 3.0, 0.0).unwrap();
    assert!(v.abs() < 1e-12, "{v}");

    // γ = ln(z)/(p−1) solves it as well (p = 2 at c = 1).
    let v = ode_example1(&expr("ln(z)/(2-1)"), 2.0, 1.0).unwrap();
    assert!(v.abs() < 1e-12);

    // γ = z, p = 3, c = 0: (1−3)·1 − 0 = −2 exactly.
    let v = ode_example1(&expr("z"), 3.0, 0.0).unwrap();
    assert_eq!(v, -2.0);

    // Wrong variable is rejected.
    assert!(matches!(
        ode_example1(&expr("t^2"), 3.0, 0.0),
        Err(ResidualError::BadGammaVariables { .. })
    ));
    // Domain error of γ at c propagates.
    assert!(matches!(
        ode_example1(&expr("ln(z)"), 2.0, -1.0),
        Err(ResidualError::Eval(_))
    ));
}

#[test]
fn residual_route_wrapper_matches_pointwise_call() {
    let amb = AmbientSpace::conformal(3, None, expr("0.2*z")).unwrap();
    let pc = cfg(3.0, 2);
    let u = [1.0, 0.5];
    let via_route = residual_conformal_tilde_route(&catenoid(), &amb, &pc, &u).unwrap();
    let coords = default_coords(3);
    let base =
        base_geometry_with_gamma(&catenoid(), amb.gamma(), &coords, &u, Orientation::Plus).unwrap();
    let direct = residual_conformal_tilde(&base, &pc).unwrap();
    assert_eq!(via_route.normal, direct.normal);
    assert_eq!(via_route.tangential, direct.tangential);
    let _ = format!("{:?}", via_route);
}
