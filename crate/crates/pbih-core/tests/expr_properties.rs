//! Property tests for the expression engine: the 1000-case derivative vs
//! central-difference oracle, and parse/print round-trips over random
//! canonical trees.

use pbih_core::expr::{BinaryOp, Bindings, Expr, UnaryOp};
use pbih_core::rng::SplitMix64;
use proptest::prelude::*;

const VARS: [&str; 3] = ["x", "y", "z"];

/// Random expression of bounded depth via the smart constructors.
fn random_expr(rng: &mut SplitMix64, depth: usize) -> Expr {
    if depth == 0 || rng.next_f64() < 0.25 {
        return if rng.next_f64() < 0.5 {
            Expr::constant((rng.uniform(-3.0, 3.0) * 8.0).round() / 8.0)
        } else {
            Expr::var(VARS[(rng.next_u64() % 3) as usize])
        };
    }
    match rng.next_u64() % 10 {
        0 => -random_expr(rng, depth - 1),
        1 => random_expr(rng, depth - 1).sin(),
        2 => random_expr(rng, depth - 1).cos(),
        3 => random_expr(rng, depth - 1).exp(),
        4 => random_expr(rng, depth - 1).sqrt(),
        5 => random_expr(rng, depth - 1).ln(),
        6 => random_expr(rng, depth - 1) + random_expr(rng, depth - 1),
        7 => random_expr(rng, depth - 1) - random_expr(rng, depth - 1),
        8 => random_expr(rng, depth - 1) * random_expr(rng, depth - 1),
        _ => {
            if rng.next_f64() < 0.5 {
                random_expr(rng, depth - 1) / random_expr(rng, depth - 1)
            } else {
                let k = (rng.next_u64() % 4) as i64;
                random_expr(rng, depth - 1).powi(k)
            }
        }
    }
}

fn central_difference(e: &Expr, var: &str, at: &Bindings, h: f64) -> Option<f64> {
    let x = at.get(var).unwrap();
    let mut plus = at.clone();
    plus.set(var, x + h);
    let mut minus = at.clone();
    minus.set(var, x - h);
    let fp = e.evaluate(&plus).ok()?;
    let fm = e.evaluate(&minus).ok()?;
    Some((fp - fm) / (2.0 * h))
}

/// 1000 random expressions of depth ≤ 6 at random points away from singular
/// loci: the exact derivative agrees with the central difference to 1e-6
/// relative tolerance.
#[test]
fn derivative_matches_central_difference_thousand_cases() {
    let mut rng = SplitMix64::new(0xFEED_5EED);
    let mut checked = 0usize;
    let mut attempts = 0usize;
    while checked < 1000 {
        attempts += 1;
        assert!(
            attempts < 60_000,
            "generator kept hitting singular cases; {checked} checked"
        );
        let e = random_expr(&mut rng, 6);
        let var = VARS[(rng.next_u64() % 3) as usize];
        if !e.free_vars().contains(var) {
            continue;
        }
        let at = Bindings::from_pairs(&[
            ("x", rng.uniform(0.2, 2.0)),
            ("y", rng.uniform(0.2, 2.0)),
            ("z", rng.uniform(0.2, 2.0)),
        ]);
        // Skip points where the expression (or a step neighbor) leaves the
        // domain, and ill-conditioned spots where the finite difference
        // itself is meaningless.
        let value = match e.evaluate(&at) {
            Ok(v) if v.abs() < 1e6 => v,
            _ => continue,
        };
        let d = e.differentiate(var);
        let exact = match d.evaluate(&at) {
            Ok(v) if v.abs() < 1e6 => v,
            _ => continue,
        };
        let h = 1e-5;
        let Some(fd) = central_difference(&e, var, &at, h) else {
            continue;
        };
        // Second-order check at a smaller step to reject numerically unstable
        // samples rather than loosen the tolerance.
        let Some(fd2) = central_difference(&e, var, &at, h / 4.0) else {
            continue;
        };
        if (fd - fd2).abs() > 1e-7 * (1.0 + exact.abs()) {
            continue;
        }
        let _ = value;
        assert!(
            (exact - fd).abs() <= 1e-6 * (1.0 + exact.abs()),
            "derivative mismatch: exact {exact}, central difference {fd}\n  expr: {e}\n  d/d{var}: {d}"
        );
        checked += 1;
    }
}

#[test]
fn higher_order_derivatives_match_nested_differences() {
    // Fourth derivative of a composite against a nested central difference.
    let e = Expr::parse("sin(2*x) * exp(x/3)").unwrap();
    let d4 = e
        .differentiate("x")
        .differentiate("x")
        .differentiate("x")
        .differentiate("x");
    let at = Bindings::from_pairs(&[("x", 0.9)]);
    let exact = d4.evaluate(&at).unwrap();
    // 5-point stencil for the 4th derivative.
    let h = 1e-2;
    let f = |x: f64| {
        e.evaluate(&Bindings::from_pairs(&[("x", x)])).unwrap()
    };
    let x0 = 0.9;
    let approx =
        (f(x0 - 2.0 * h) - 4.0 * f(x0 - h) + 6.0 * f(x0) - 4.0 * f(x0 + h) + f(x0 + 2.0 * h))
            / h.powi(4);
    assert!(
        (exact - approx).abs() < 1e-3 * (1.0 + exact.abs()),
        "{exact} vs {approx}"
    );
}

// Proptest strategy mirroring the grammar, built with the smart constructors
// so trees are canonical and displayable.
fn arb_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (-8i32..8).prop_map(|n| Expr::constant(n as f64 / 2.0)),
        prop_oneof![Just("x"), Just("y"), Just("z")].prop_map(Expr::var),
    ];
    leaf.prop_recursive(5, 64, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::binary(BinaryOp::Add, a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::binary(BinaryOp::Sub, a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::binary(BinaryOp::Mul, a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::binary(BinaryOp::Div, a, b)),
            (inner.clone(), 0i64..4).prop_map(|(a, k)| a.powi(k)),
            inner.clone().prop_map(|a| Expr::unary(UnaryOp::Neg, a)),
            inner.clone().prop_map(|a| Expr::unary(UnaryOp::Sin, a)),
            inner.clone().prop_map(|a| Expr::unary(UnaryOp::Cosh, a)),
            inner.clone().prop_map(|a| Expr::unary(UnaryOp::Exp, a)),
            inner.clone().prop_map(|a| Expr::unary(UnaryOp::Sqrt, a)),
            inner.prop_map(|a| Expr::unary(UnaryOp::Ln, a)),
        ]
    })
}

proptest! {
    /// Canonical trees survive print → parse structurally.
    #[test]
    fn display_parse_round_trip(e in arb_expr()) {
        let printed = e.to_string();
        let reparsed = Expr::parse(&printed).unwrap();
        prop_assert_eq!(reparsed, e);
    }

    /// The derivative of an expression without the variable is exactly zero.
    #[test]
    fn derivative_without_variable_is_zero(e in arb_expr()) {
        if !e.free_vars().contains("w") {
            let d = e.differentiate("w");
            let b = Bindings::from_pairs(&[("x", 0.7), ("y", 1.1), ("z", 0.4)]);
            if let Ok(v) = d.evaluate(&b) {
                prop_assert_eq!(v, 0.0);
            }
        }
    }
}
