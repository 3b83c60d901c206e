//! Residual evaluation of the p-biharmonicity characterizations.
//!
//! Each characterization is a pair of equations — one scalar equation along
//! the normal, one tangential vector equation — and "the surface is
//! p-biharmonic" becomes "both residuals vanish at every sample point".
//!
//! The general system, for a hypersurface with mean curvature `f` in an
//! ambient with Ricci curvature `Ric`:
//!
//! ```text
//! normal:      −Δf + f|A|² − f·Ric(η,η) + m(p−2)f³
//! tangential:  2A(grad f) − 2f(Ricci η)^⊤ + (p−2+m/2)·grad f²
//! ```
//!
//! Specializations: an Einstein ambient (Ric(η,η) = S/(m+1), tangential
//! Ricci term drops), the totally umbilic constant-solution classification,
//! and two independent routes for a minimal base surface in a conformally
//! flat ambient — the closed-form system in base quantities, and the general
//! system fed with the closed-form tilde quantities. The routes are
//! algebraically equivalent but computationally independent, which is the
//! module's main correctness oracle.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::conformal::{self, ConformalError};
use crate::expr::{Bindings, EvalError, Expr};
use crate::fmath;
use crate::geometry::{
    AmbientClass, AmbientSpace, GeometryAtPoint, GeometryError, Immersion, Orientation,
    SurfaceGeometry,
};
use crate::linalg::Matrix;

/// Default residual tolerance for "vanishes on the grid".
pub const RESIDUAL_TOL: f64 = 1e-8;
/// Tolerance on the p-tension norm for "is p-harmonic".
pub const P_HARMONIC_TOL: f64 = 1e-9;
/// Tolerance on intrinsic gradients for "constant along the surface".
pub const CONSTANCY_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub enum ResidualError {
    /// p < 2 or m < 1.
    InvalidConfig(String),
    Conformal(ConformalError),
    /// `residual_einstein` called for a geometry whose ambient was not
    /// validated as Einstein with the stated scalar curvature.
    NotEinsteinValidated { expected_s: f64 },
    /// A precondition field is not constant along the surface.
    ConstancyViolated { grad_norm: f64 },
    /// The conformal exponent depends on more than the expected variable.
    BadGammaVariables { vars: Vec<String> },
    Geometry(GeometryError),
    Eval(EvalError),
}

impl fmt::Display for ResidualError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ResidualError::InvalidConfig(msg) => write!(f, "{msg}"),
            ResidualError::Conformal(e) => write!(f, "{e}"),
            ResidualError::NotEinsteinValidated { expected_s } => write!(
                f,
                "geometry was not computed in an ambient validated Einstein with S = {expected_s}"
            ),
            ResidualError::ConstancyViolated { grad_norm } => write!(
                f,
                "field is not constant along the surface: intrinsic gradient norm {grad_norm:e}"
            ),
            ResidualError::BadGammaVariables { vars } => {
                write!(f, "conformal factor must depend on z only, found variables {vars:?}")
            }
            ResidualError::Geometry(e) => write!(f, "{e}"),
            ResidualError::Eval(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for ResidualError {}

impl From<ConformalError> for ResidualError {
    fn from(e: ConformalError) -> Self {
        ResidualError::Conformal(e)
    }
}

impl From<GeometryError> for ResidualError {
    fn from(e: GeometryError) -> Self {
        ResidualError::Geometry(e)
    }
}

impl From<EvalError> for ResidualError {
    fn from(e: EvalError) -> Self {
        ResidualError::Eval(e)
    }
}

/// Problem parameters: the exponent `p ≥ 2` and the surface dimension.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProblemConfig {
    pub p: f64,
    pub m: usize,
    pub orientation: Orientation,
}

impl ProblemConfig {
    pub fn new(p: f64, m: usize) -> Result<Self, ResidualError> {
        if !(p >= 2.0) {
            return Err(ResidualError::InvalidConfig(alloc::format!(
                "p must be at least 2, got {p}"
            )));
        }
        if m < 1 {
            return Err(ResidualError::InvalidConfig("m must be at least 1".into()));
        }
        Ok(Self {
            p,
            m,
            orientation: Orientation::Plus,
        })
    }

    pub fn with_orientation(mut self, orientation: Orientation) -> Self {
        self.orientation = orientation;
        self
    }
}

/// Residual of one characterization at one point: the scalar normal-equation
/// value, the tangential vector in chart components, and their norms (the
/// tangential one taken with the metric of the geometry in play).
#[derive(Clone, Debug)]
pub struct SystemResidual {
    pub normal: f64,
    pub tangential: Vec<f64>,
    pub normal_abs: f64,
    pub tangential_norm: f64,
}

impl SystemResidual {
    fn new(normal: f64, tangential: Vec<f64>, metric: &Matrix) -> Self {
        let tangential_norm = fmath::sqrt(metric.quadratic_form(&tangential).max(0.0));
        Self {
            normal,
            tangential,
            normal_abs: fmath::abs(normal),
            tangential_norm,
        }
    }

    /// Largest of the two norms.
    pub fn max_norm(&self) -> f64 {
        self.normal_abs.max(self.tangential_norm)
    }
}

/// p-tension data: for an isometric immersion the p-tension field is
/// `m^{p/2} f η`, so its norm is `m^{p/2} |f|` and p-harmonic ⇔ minimal.
#[derive(Clone, Copy, Debug)]
pub struct PTension {
    pub norm: f64,
    pub is_p_harmonic: bool,
}

pub fn p_tension(geo: &GeometryAtPoint, cfg: &ProblemConfig) -> PTension {
    assert_eq!(geo.m, cfg.m, "geometry dimension does not match config");
    let norm = fmath::powf(cfg.m as f64, cfg.p / 2.0) * fmath::abs(geo.f);
    PTension {
        norm,
        is_p_harmonic: norm <= P_HARMONIC_TOL,
    }
}

/// The general system, evaluated from geometry computed in the ambient under
/// test. `grad f²` is expanded as `2f·grad f`.
pub fn residual_general(geo: &GeometryAtPoint, cfg: &ProblemConfig) -> SystemResidual {
    assert_eq!(geo.m, cfg.m, "geometry dimension does not match config");
    let m = cfg.m as f64;
    let p = cfg.p;
    let f = geo.f;
    let normal = -geo.lap_f + f * geo.a_norm_sq - f * geo.ric_eta_eta + m * (p - 2.0) * f * f * f;
    let a_grad_f = geo.a.matvec(&geo.grad_f);
    let coeff = p - 2.0 + m / 2.0;
    let tangential: Vec<f64> = (0..geo.m)
        .map(|i| {
            2.0 * a_grad_f[i] - 2.0 * f * geo.ricci_eta_tan[i] + coeff * 2.0 * f * geo.grad_f[i]
        })
        .collect();
    SystemResidual::new(normal, tangential, &geo.g)
}

/// The Einstein-ambient system: `Ric(η,η)` is replaced by `S/(m+1)` and the
/// tangential Ricci term drops. Requires geometry computed in an ambient that
/// passed Einstein validation with the same `S` (flat space counts as S = 0).
pub fn residual_einstein(
    geo: &GeometryAtPoint,
    cfg: &ProblemConfig,
    scalar_curvature: f64,
) -> Result<SystemResidual, ResidualError> {
    assert_eq!(geo.m, cfg.m, "geometry dimension does not match config");
    let validated = match geo.ambient_class {
        AmbientClass::DeclaredEinstein { scalar_curvature: s } => s == scalar_curvature,
        AmbientClass::Euclidean => scalar_curvature == 0.0,
        AmbientClass::Conformal => false,
    };
    if !validated {
        return Err(ResidualError::NotEinsteinValidated {
            expected_s: scalar_curvature,
        });
    }
    let m = cfg.m as f64;
    let p = cfg.p;
    let f = geo.f;
    let normal = -geo.lap_f + f * geo.a_norm_sq + m * (p - 2.0) * f * f * f
        - scalar_curvature / (m + 1.0) * f;
    let a_grad_f = geo.a.matvec(&geo.grad_f);
    let coeff = p - 2.0 + m / 2.0;
    let tangential: Vec<f64> = (0..geo.m)
        .map(|i| 2.0 * a_grad_f[i] + coeff * 2.0 * f * geo.grad_f[i])
        .collect();
    Ok(SystemResidual::new(normal, tangential, &geo.g))
}

/// Constant solutions of the totally umbilic system in an Einstein ambient.
#[derive(Clone, Debug, PartialEq)]
pub struct UmbilicResult {
    pub beta_solutions: Vec<f64>,
    pub is_minimal_only: bool,
}

/// For a totally umbilic hypersurface (`B = β·g·η`) in an Einstein ambient
/// with scalar curvature `S`: `β = 0` always solves the system; for `S > 0`
/// also `β = ±√(S / (m(m+1)(p−1)))`. Non-positive `S` forces minimality.
pub fn umbilic_classification(cfg: &ProblemConfig, scalar_curvature: f64) -> UmbilicResult {
    let m = cfg.m as f64;
    if scalar_curvature > 0.0 {
        let beta = fmath::sqrt(scalar_curvature / (m * (m + 1.0) * (cfg.p - 1.0)));
        UmbilicResult {
            beta_solutions: alloc::vec![-beta, 0.0, beta],
            is_minimal_only: false,
        }
    } else {
        UmbilicResult {
            beta_solutions: alloc::vec![0.0],
            is_minimal_only: true,
        }
    }
}

/// The closed-form system for a minimal base in a conformally flat ambient,
/// in base quantities only (with `s = η(γ) e^{−γ}`, `w = η(γ)`):
///
/// ```text
/// scalar:      s·[−Δγ − m·Hess_γ(η,η) + (1−m)|grad γ|² − |A|² + m(1−p)w²]
///              + Δs + (m−2)(grad γ)(s)
/// tangential:  −2A(grad s) + 2(1−m)·s·A(grad γ) + (2p−m)·w·grad s
/// ```
///
/// The returned residual is rescaled by `e^{−2γ}` (scalar) and `e^{−3γ}`
/// (tangential) onto the normalization of [`residual_general`], so the three
/// evaluation routes for the same surface are directly comparable; the
/// rescaling is positive and does not move the zero set. Norms use the
/// rescaled induced metric.
pub fn residual_conformal_closed_form(
    base: &GeometryAtPoint,
    cfg: &ProblemConfig,
) -> Result<SystemResidual, ResidualError> {
    assert_eq!(base.m, cfg.m, "geometry dimension does not match config");
    if fmath::abs(base.f) > conformal::MINIMALITY_TOL {
        return Err(ConformalError::NonMinimalBase { f: base.f }.into());
    }
    let m = cfg.m as f64;
    let p = cfg.p;
    let w = base.eta_gamma;
    let s = w * fmath::exp(-base.gamma_val);

    let grad_s: Vec<f64> = {
        let eg = fmath::exp(-base.gamma_val);
        (0..base.m)
            .map(|i| eg * (base.grad_eta_gamma[i] - w * base.grad_m_gamma[i]))
            .collect()
    };
    let grad_gamma_sq = base.g.quadratic_form(&base.grad_m_gamma);
    let dir_der = {
        let mut acc = 0.0;
        for i in 0..base.m {
            for j in 0..base.m {
                acc += base.g.at(i, j) * base.grad_m_gamma[i] * grad_s[j];
            }
        }
        acc
    };

    let bracket = -base.lap_m_gamma - m * base.hess_gamma_eta_eta + (1.0 - m) * grad_gamma_sq
        - base.a_norm_sq
        + m * (1.0 - p) * w * w;
    let scalar = s * bracket + base.lap_s + (m - 2.0) * dir_der;

    let a_grad_s = base.a.matvec(&grad_s);
    let a_grad_gamma = base.a.matvec(&base.grad_m_gamma);
    let tangential_raw: Vec<f64> = (0..base.m)
        .map(|i| {
            -2.0 * a_grad_s[i] + 2.0 * (1.0 - m) * s * a_grad_gamma[i]
                + (2.0 * p - m) * w * grad_s[i]
        })
        .collect();

    let e2 = fmath::exp(-2.0 * base.gamma_val);
    let e3 = fmath::exp(-3.0 * base.gamma_val);
    let normal = e2 * scalar;
    let tangential = crate::linalg::scale(&tangential_raw, e3);
    let tilde_metric = base.g.scaled(fmath::exp(2.0 * base.gamma_val));
    Ok(SystemResidual::new(normal, tangential, &tilde_metric))
}

/// The general system fed with the closed-form tilde quantities — the route
/// independent of [`residual_conformal_closed_form`]'s algebra.
pub fn residual_conformal_tilde(
    base: &GeometryAtPoint,
    cfg: &ProblemConfig,
) -> Result<SystemResidual, ResidualError> {
    assert_eq!(base.m, cfg.m, "geometry dimension does not match config");
    let t = conformal::tilde_all(base)?;
    let m = cfg.m as f64;
    let p = cfg.p;
    let f = t.f_tilde;
    let normal = -t.lap_f_tilde + f * t.a_tilde_norm_sq - f * t.ric_tilde_eta_eta
        + m * (p - 2.0) * f * f * f;
    let coeff = p - 2.0 + m / 2.0;
    let tangential: Vec<f64> = (0..base.m)
        .map(|i| {
            2.0 * t.a_grad_f_tilde[i] - 2.0 * f * t.ricci_tilde_eta_tan[i]
                + coeff * 2.0 * f * t.grad_f_tilde[i]
        })
        .collect();
    let tilde_metric = base.g.scaled(fmath::exp(2.0 * base.gamma_val));
    Ok(SystemResidual::new(normal, tangential, &tilde_metric))
}

/// Convenience wrapper building the base geometry for one point. For grid
/// evaluation build a [`SurfaceGeometry`] once and use
/// [`residual_conformal_tilde`].
pub fn residual_conformal_tilde_route(
    base_imm: &Immersion,
    amb: &AmbientSpace,
    cfg: &ProblemConfig,
    u: &[f64],
) -> Result<SystemResidual, ResidualError> {
    let sg = SurfaceGeometry::base_with_gamma(base_imm, amb.gamma(), amb.coords())?;
    let base = sg.at(u, cfg.orientation)?;
    residual_conformal_tilde(&base, cfg)
}

/// The constant-composite special case: when `γ` and `η(γ)` are constant
/// along the surface, p-biharmonicity reduces to
/// `|A|² = m(1−p)η(γ)² − m·η(η(γ))`.
#[derive(Clone, Copy, Debug)]
pub struct RemarkCondition {
    pub lhs: f64,
    pub rhs: f64,
    pub satisfied: bool,
}

pub fn remark_condition(
    base: &GeometryAtPoint,
    cfg: &ProblemConfig,
    tol: f64,
) -> Result<RemarkCondition, ResidualError> {
    assert_eq!(base.m, cfg.m, "geometry dimension does not match config");
    let g_gamma = base.tangent_norm(&base.grad_m_gamma);
    if g_gamma > CONSTANCY_TOL {
        return Err(ResidualError::ConstancyViolated { grad_norm: g_gamma });
    }
    let g_w = base.tangent_norm(&base.grad_eta_gamma);
    if g_w > CONSTANCY_TOL {
        return Err(ResidualError::ConstancyViolated { grad_norm: g_w });
    }
    let m = cfg.m as f64;
    let lhs = base.a_norm_sq;
    let rhs = m * (1.0 - cfg.p) * base.eta_gamma * base.eta_gamma - m * base.eta_eta_gamma;
    Ok(RemarkCondition {
        lhs,
        rhs,
        satisfied: fmath::abs(lhs - rhs) <= tol,
    })
}

/// The one-dimensional hyperplane condition `(1−p)γ'(c)² − γ''(c)` for a
/// conformal exponent depending on the last coordinate only.
pub fn ode_example1(gamma_1d: &Expr, p: f64, c: f64) -> Result<f64, ResidualError> {
    let vars = gamma_1d.free_vars();
    let stray: Vec<String> = vars.iter().filter(|v| v.as_str() != "z").cloned().collect();
    if !stray.is_empty() {
        return Err(ResidualError::BadGammaVariables { vars: stray });
    }
    let d1 = gamma_1d.differentiate("z");
    let d2 = d1.differentiate("z");
    let mut b = Bindings::new();
    b.set("z", c);
    // Evaluating γ itself first surfaces domain violations at c that the
    // differentiated expressions may no longer contain.
    gamma_1d.evaluate(&b)?;
    let g1 = d1.evaluate(&b)?;
    let g2 = d2.evaluate(&b)?;
    Ok((1.0 - p) * g1 * g1 - g2)
}

#[cfg(test)]
mod tests;
