//! Shared immersions for unit tests.

use alloc::vec;

use crate::expr::Expr;
use crate::geometry::Immersion;

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
        vec![(0.0, core::f64::consts::PI), (0.0, 2.0 * core::f64::consts::PI)],
    )
    .unwrap()
}

pub fn unit_sphere() -> Immersion {
    sphere(1.0)
}

pub fn catenoid() -> Immersion {
    Immersion::new(
        vec!["x1".into(), "x2".into()],
        vec![
            expr("cosh(x2)*cos(x1)"),
            expr("cosh(x2)*sin(x1)"),
            expr("x2"),
        ],
        vec![(0.0, 2.0 * core::f64::consts::PI), (-3.0, 3.0)],
    )
    .unwrap()
}
