//! Shared fixtures for integration tests.
#![allow(dead_code)] // each test binary uses its own subset

use pbih_core::expr::Expr;
use pbih_core::geometry::Immersion;
use pbih_core::rng::SplitMix64;

pub fn expr(text: &str) -> Expr {
    Expr::parse(text).unwrap()
}

pub fn flat_plane() -> Immersion {
    Immersion::new(
        vec!["u1".into(), "u2".into()],
        vec![expr("u1"), expr("u2"), expr("0")],
        vec![(-2.0, 2.0), (-2.0, 2.0)],
    )
    .unwrap()
}

pub fn sphere(radius: f64) -> Immersion {
    let r = Expr::constant(radius);
    Immersion::new(
        vec!["theta".into(), "phi".into()],
        vec![
            r.clone() * expr("sin(theta)*cos(phi)"),
            r.clone() * expr("sin(theta)*sin(phi)"),
            r * expr("cos(theta)"),
        ],
        vec![(0.0, std::f64::consts::PI), (0.0, 2.0 * std::f64::consts::PI)],
    )
    .unwrap()
}

pub fn catenoid() -> Immersion {
    Immersion::new(
        vec!["x1".into(), "x2".into()],
        vec![
            expr("cosh(x2)*cos(x1)"),
            expr("cosh(x2)*sin(x1)"),
            expr("x2"),
        ],
        vec![(0.0, 2.0 * std::f64::consts::PI), (-3.0, 3.0)],
    )
    .unwrap()
}

/// A smooth conformal exponent exercising every ambient coordinate, with
/// coefficients drawn small enough to keep the geometry well-conditioned.
pub fn random_gamma(rng: &mut SplitMix64) -> Expr {
    let a = rng.uniform(-0.25, 0.25);
    let b = rng.uniform(-0.25, 0.25);
    let c = rng.uniform(-0.25, 0.25);
    let template = expr("a*z + b*sin(x)*cos(y) + c*ln(4 + x^2 + y^2 + z^2)");
    let mut map = std::collections::BTreeMap::new();
    map.insert("a".to_string(), Expr::constant(a));
    map.insert("b".to_string(), Expr::constant(b));
    map.insert("c".to_string(), Expr::constant(c));
    template.substitute(&map)
}

/// Random in-domain chart point, away from the boundary.
pub fn random_point(rng: &mut SplitMix64, imm: &Immersion) -> Vec<f64> {
    imm.domain()
        .iter()
        .map(|(lo, hi)| {
            let w = hi - lo;
            rng.uniform(lo + 0.05 * w, hi - 0.05 * w)
        })
        .collect()
}
