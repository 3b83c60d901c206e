//! The ambient space `(R^{n}, e^{2γ} h)` with `h` the Euclidean metric.
//!
//! Curvature here is computed the pedestrian way: Christoffel symbols of the
//! conformal metric as symbolic expressions in the ambient coordinates,
//! differentiated exactly and contracted into the Ricci tensor. The
//! closed-form conformal identities live in the `conformal` module so the two
//! routes can be tested against each other.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::expr::{Bindings, Evaluator, Expr};
use crate::linalg::Matrix;
use crate::rng::SplitMix64;

use super::GeometryError;

/// How the ambient metric is classified. `DeclaredEinstein` is only ever
/// constructed after numeric validation of `Ric = (S/n) · metric`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AmbientClass {
    Euclidean,
    Conformal,
    DeclaredEinstein { scalar_curvature: f64 },
}

/// Ambient space `(R^dim, e^{2γ} h)`; `γ ≡ 0` is Euclidean space.
#[derive(Clone, Debug)]
pub struct AmbientSpace {
    dim: usize,
    coords: Vec<String>,
    gamma: Expr,
    class: AmbientClass,
    ricci: Vec<Vec<Expr>>,
}

/// Default ambient coordinate names: `x, y, z` in dimension 3, `x1..xn`
/// otherwise.
pub fn default_coords(dim: usize) -> Vec<String> {
    if dim == 3 {
        vec!["x".to_string(), "y".to_string(), "z".to_string()]
    } else {
        (1..=dim).map(|i| format!("x{i}")).collect()
    }
}

impl AmbientSpace {
    pub fn euclidean(dim: usize) -> Self {
        let coords = default_coords(dim);
        let zero = Expr::zero();
        let ricci = build_ricci(&zero, &coords);
        Self {
            dim,
            coords,
            gamma: zero,
            class: AmbientClass::Euclidean,
            ricci,
        }
    }

    /// Conformally flat ambient `e^{2γ} h`. `γ`'s free variables must be a
    /// subset of the coordinate names.
    pub fn conformal(
        dim: usize,
        coords: Option<Vec<String>>,
        gamma: Expr,
    ) -> Result<Self, GeometryError> {
        let coords = coords.unwrap_or_else(|| default_coords(dim));
        if coords.len() != dim {
            return Err(GeometryError::Invalid(format!(
                "expected {dim} coordinate names, got {}",
                coords.len()
            )));
        }
        for (i, a) in coords.iter().enumerate() {
            if coords[..i].contains(a) {
                return Err(GeometryError::Invalid(format!("duplicate coordinate '{a}'")));
            }
        }
        for v in gamma.free_vars() {
            if !coords.contains(&v) {
                return Err(GeometryError::Invalid(format!(
                    "conformal factor uses '{v}', which is not an ambient coordinate"
                )));
            }
        }
        let class = if gamma.free_vars().is_empty()
            && gamma.evaluate(&Bindings::new()) == Ok(0.0)
        {
            AmbientClass::Euclidean
        } else {
            AmbientClass::Conformal
        };
        let ricci = build_ricci(&gamma, &coords);
        Ok(Self {
            dim,
            coords,
            gamma,
            class,
            ricci,
        })
    }

    /// Conformally flat ambient declared Einstein with scalar curvature `s`.
    /// The claim is validated, not assumed: the Ricci tensor is sampled at
    /// `samples` random points of `sample_box` and compared against
    /// `(s/dim) · e^{2γ} h` to `tol`.
    pub fn einstein(
        dim: usize,
        coords: Option<Vec<String>>,
        gamma: Expr,
        scalar_curvature: f64,
        sample_box: &[(f64, f64)],
        samples: usize,
        tol: f64,
        seed: u64,
    ) -> Result<Self, GeometryError> {
        let mut amb = Self::conformal(dim, coords, gamma)?;
        if sample_box.len() != dim {
            return Err(GeometryError::Invalid(format!(
                "einstein sample box needs {dim} intervals, got {}",
                sample_box.len()
            )));
        }
        let lambda = scalar_curvature / dim as f64;
        let mut rng = SplitMix64::new(seed);
        let mut max_dev: f64 = 0.0;
        for _ in 0..samples {
            let x: Vec<f64> = sample_box.iter().map(|(lo, hi)| rng.uniform(*lo, *hi)).collect();
            let ric = amb.ricci_matrix_at(&x)?;
            let metric = amb.metric_at(&x)?;
            for i in 0..dim {
                for j in 0..dim {
                    let dev = (ric.at(i, j) - lambda * metric.at(i, j)).abs();
                    if dev > max_dev {
                        max_dev = dev;
                    }
                }
            }
        }
        if max_dev > tol {
            return Err(GeometryError::NotEinstein {
                max_deviation: max_dev,
                tol,
            });
        }
        amb.class = AmbientClass::DeclaredEinstein { scalar_curvature };
        Ok(amb)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coords(&self) -> &[String] {
        &self.coords
    }

    pub fn gamma(&self) -> &Expr {
        &self.gamma
    }

    pub fn class(&self) -> AmbientClass {
        self.class
    }

    pub fn is_flat(&self) -> bool {
        self.class == AmbientClass::Euclidean
    }

    pub(crate) fn ricci_exprs(&self) -> &[Vec<Expr>] {
        &self.ricci
    }

    fn bindings_at(&self, x: &[f64]) -> Result<Bindings, GeometryError> {
        if x.len() != self.dim {
            return Err(GeometryError::Invalid(format!(
                "ambient point has {} components, expected {}",
                x.len(),
                self.dim
            )));
        }
        let mut b = Bindings::new();
        for (name, v) in self.coords.iter().zip(x) {
            b.set(name, *v);
        }
        Ok(b)
    }

    /// Ricci tensor `R_ab` of `e^{2γ} h` at an ambient point.
    pub fn ricci_matrix_at(&self, x: &[f64]) -> Result<Matrix, GeometryError> {
        let b = self.bindings_at(x)?;
        let mut ev = Evaluator::new(&b);
        let n = self.dim;
        let mut out = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, ev.eval(&self.ricci[i][j])?);
            }
        }
        Ok(out)
    }

    /// Metric `e^{2γ} δ_ab` at an ambient point.
    pub fn metric_at(&self, x: &[f64]) -> Result<Matrix, GeometryError> {
        let b = self.bindings_at(x)?;
        let factor = crate::fmath::exp(2.0 * self.gamma.evaluate(&b)?);
        Ok(Matrix::identity(self.dim).scaled(factor))
    }
}

/// Christoffel symbols of `e^{2γ} h` contracted into the Ricci tensor,
/// all as expressions in the ambient coordinates:
/// `Γ^c_ab = δ^c_a γ_b + δ^c_b γ_a − δ_ab γ^c` and
/// `R_ab = ∂_c Γ^c_ab − ∂_a Γ^c_cb + Γ^c_cd Γ^d_ab − Γ^c_ad Γ^d_cb`.
fn build_ricci(gamma: &Expr, coords: &[String]) -> Vec<Vec<Expr>> {
    let n = coords.len();
    let grad: Vec<Expr> = coords.iter().map(|c| gamma.differentiate(c)).collect();

    let gamma_sym = |c: usize, a: usize, b: usize| -> Expr {
        let mut e = Expr::zero();
        if c == a {
            e = e + grad[b].clone();
        }
        if c == b {
            e = e + grad[a].clone();
        }
        if a == b {
            e = e - grad[c].clone();
        }
        e
    };

    let mut christoffel = vec![vec![vec![Expr::zero(); n]; n]; n];
    for c in 0..n {
        for a in 0..n {
            for b in 0..n {
                christoffel[c][a][b] = gamma_sym(c, a, b);
            }
        }
    }

    let mut ricci = vec![vec![Expr::zero(); n]; n];
    for a in 0..n {
        for b in 0..n {
            let mut r = Expr::zero();
            for c in 0..n {
                r = r + christoffel[c][a][b].differentiate(&coords[c]);
                r = r - christoffel[c][c][b].differentiate(&coords[a]);
                for d in 0..n {
                    r = r + christoffel[c][c][d].clone() * christoffel[d][a][b].clone();
                    r = r - christoffel[c][a][d].clone() * christoffel[d][c][b].clone();
                }
            }
            ricci[a][b] = r;
        }
    }
    ricci
}

/// Curvature data of the ambient space contracted against a unit normal and a
/// tangent frame at one point: `Ric(η, η)`, the tangential part of the Ricci
/// operator applied to `η` in chart components, and the scalar curvature.
#[derive(Clone, Debug)]
pub struct AmbientCurvature {
    pub ric_eta_eta: f64,
    pub ricci_eta_tan: Vec<f64>,
    pub scalar_s: f64,
}

/// Contract the ambient Ricci tensor at `x` against `eta` (unit for the
/// ambient metric) and the tangent `frame` (rows are the frame vectors).
/// The tangential part is returned in chart components with respect to the
/// metric induced on the span of the frame.
pub fn ambient_curvature(
    amb: &AmbientSpace,
    x: &[f64],
    eta: &[f64],
    frame: &[Vec<f64>],
) -> Result<AmbientCurvature, GeometryError> {
    let n = amb.dim();
    let m = frame.len();
    let ric = amb.ricci_matrix_at(x)?;
    let metric = amb.metric_at(x)?;

    let ric_eta_eta = ric.quadratic_form(eta);

    // Induced metric of the frame and its inverse.
    let g = Matrix::from_fn(m, m, |i, j| {
        (0..n).map(|a| metric.at(a, a) * frame[i][a] * frame[j][a]).sum()
    });
    let g_inv = g.inverse().ok_or(GeometryError::DegeneratePoint {
        min_metric_eigenvalue: 0.0,
    })?;

    // t_j = Σ_ac R_ac η^c X_j^a, then raise the chart index with g⁻¹. The
    // conformal factors from raising with the ambient metric and pairing with
    // the frame cancel exactly.
    let reta = ric.matvec(eta);
    let t: Vec<f64> = (0..m).map(|j| crate::linalg::dot(&reta, &frame[j])).collect();
    let ricci_eta_tan = g_inv.matvec(&t);

    let mut b = Bindings::new();
    for (name, v) in amb.coords().iter().zip(x) {
        b.set(name, *v);
    }
    let e2g = crate::fmath::exp(2.0 * amb.gamma().evaluate(&b)?);
    let scalar_s = (0..n).map(|a| ric.at(a, a)).sum::<f64>() / e2g;

    Ok(AmbientCurvature {
        ric_eta_eta,
        ricci_eta_tan,
        scalar_s,
    })
}
