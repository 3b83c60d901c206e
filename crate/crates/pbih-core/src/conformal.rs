//! Closed-form conformal-change identities for a minimal hypersurface in
//! flat space.
//!
//! For a base immersion that is minimal in `(R^{m+1}, h)` and the rescaled
//! ambient `(R^{m+1}, e^{2γ} h)`, every tilde quantity of the surface has a
//! closed form in the base geometry and the composites of `γ`:
//!
//! * `B̃(X,Y) = B(X,Y) − g(X,Y) η(γ) η` (no minimality needed);
//! * `f̃ = −η(γ) e^{−γ}`;
//! * `|Ã|² = e^{−2γ}(|A|² + m η(γ)²)`;
//! * `grad f̃ = −e^{−2γ} grad(η(γ) e^{−γ})`;
//! * `Ã(grad f̃) = e^{−3γ}[η(γ) grad s − A(grad s)]` with `s = η(γ) e^{−γ}`;
//! * `Δ̃ f̃ = e^{−2γ}[−Δ s − (m−2)(grad γ)(s)]`;
//! * `Ric̃(η̃, η̃) = e^{−2γ}[−Δ^amb γ + (1−m) Hess_γ(η,η)
//!   + (1−m)|grad^amb γ|² − (1−m) η(γ)²]`;
//! * `(Riccĩ η̃)^⊤ = (1−m) e^{−3γ}[grad η(γ) + A(grad γ) − η(γ) grad γ]`.
//!
//! All vectors are chart components with respect to the base metric; the
//! rescaled orthonormal frames are absorbed into the formulas and never
//! materialized. The whole module is cross-checked against brute-force
//! geometry computed directly in the conformal ambient.

use alloc::vec::Vec;
use core::fmt;

use crate::fmath;
use crate::geometry::GeometryAtPoint;
use crate::linalg::Matrix;

/// Tolerance on the base mean curvature for the minimality precondition.
pub const MINIMALITY_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub enum ConformalError {
    /// The base immersion is not minimal; carries the offending `f`.
    NonMinimalBase { f: f64 },
}

impl fmt::Display for ConformalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConformalError::NonMinimalBase { f: fv } => {
                write!(f, "base immersion is not minimal: f = {fv:e}")
            }
        }
    }
}

impl core::error::Error for ConformalError {}

fn require_minimal(base: &GeometryAtPoint) -> Result<(), ConformalError> {
    if fmath::abs(base.f) > MINIMALITY_TOL {
        return Err(ConformalError::NonMinimalBase { f: base.f });
    }
    Ok(())
}

/// Chart components of `grad(η(γ) e^{−γ})` from base fields.
fn grad_s(base: &GeometryAtPoint) -> Vec<f64> {
    let eg = fmath::exp(-base.gamma_val);
    (0..base.m)
        .map(|i| eg * (base.grad_eta_gamma[i] - base.eta_gamma * base.grad_m_gamma[i]))
        .collect()
}

/// Directional derivative `(grad γ)(s) = g(grad γ, grad s)`.
fn dir_der_gamma_s(base: &GeometryAtPoint) -> f64 {
    let gs = grad_s(base);
    let mut acc = 0.0;
    for i in 0..base.m {
        for j in 0..base.m {
            acc += base.g.at(i, j) * base.grad_m_gamma[i] * gs[j];
        }
    }
    acc
}

/// Scalar second fundamental form of the rescaled ambient along the base
/// normal: `B̃_ij = B_ij − g_ij η(γ)`. Valid for any base immersion.
pub fn tilde_second_fundamental(base: &GeometryAtPoint) -> Matrix {
    Matrix::from_fn(base.m, base.m, |i, j| {
        base.b.at(i, j) - base.g.at(i, j) * base.eta_gamma
    })
}

/// Mean curvature of the surface in the rescaled ambient: `−η(γ) e^{−γ}`.
pub fn tilde_mean_curvature(base: &GeometryAtPoint) -> Result<f64, ConformalError> {
    require_minimal(base)?;
    Ok(-base.eta_gamma * fmath::exp(-base.gamma_val))
}

/// `|Ã|² = e^{−2γ}(|A|² + m η(γ)²)`.
pub fn tilde_a_norm_sq(base: &GeometryAtPoint) -> Result<f64, ConformalError> {
    require_minimal(base)?;
    Ok(fmath::exp(-2.0 * base.gamma_val)
        * (base.a_norm_sq + base.m as f64 * base.eta_gamma * base.eta_gamma))
}

/// `grad f̃ = −e^{−2γ} grad(η(γ) e^{−γ})`, chart components.
pub fn tilde_grad_f(base: &GeometryAtPoint) -> Result<Vec<f64>, ConformalError> {
    require_minimal(base)?;
    let scale = -fmath::exp(-2.0 * base.gamma_val);
    Ok(crate::linalg::scale(&grad_s(base), scale))
}

/// `Ã(grad f̃) = e^{−3γ}[η(γ) grad s − A(grad s)]`, chart components.
pub fn tilde_a_grad_f(base: &GeometryAtPoint) -> Result<Vec<f64>, ConformalError> {
    require_minimal(base)?;
    let gs = grad_s(base);
    let ags = base.a.matvec(&gs);
    let e3 = fmath::exp(-3.0 * base.gamma_val);
    Ok((0..base.m)
        .map(|i| e3 * (base.eta_gamma * gs[i] - ags[i]))
        .collect())
}

/// `Δ̃ f̃ = e^{−2γ}[−Δ s − (m−2)(grad γ)(s)]`.
pub fn tilde_lap_f(base: &GeometryAtPoint) -> Result<f64, ConformalError> {
    require_minimal(base)?;
    let m = base.m as f64;
    Ok(fmath::exp(-2.0 * base.gamma_val) * (-base.lap_s - (m - 2.0) * dir_der_gamma_s(base)))
}

/// Ricci curvature of the rescaled ambient contracted against the rescaled
/// unit normal.
#[derive(Clone, Debug)]
pub struct TildeRicci {
    pub ric_eta_eta: f64,
    pub ricci_eta_tan: Vec<f64>,
}

pub fn tilde_ricci(base: &GeometryAtPoint) -> Result<TildeRicci, ConformalError> {
    require_minimal(base)?;
    let m = base.m as f64;
    let w = base.eta_gamma;
    let ric_eta_eta = fmath::exp(-2.0 * base.gamma_val)
        * (-base.amb_lap_gamma + (1.0 - m) * base.hess_gamma_eta_eta
            + (1.0 - m) * base.amb_grad_gamma_sq
            - (1.0 - m) * w * w);
    let agm = base.a.matvec(&base.grad_m_gamma);
    let e3 = (1.0 - m) * fmath::exp(-3.0 * base.gamma_val);
    let ricci_eta_tan = (0..base.m)
        .map(|i| e3 * (base.grad_eta_gamma[i] + agm[i] - w * base.grad_m_gamma[i]))
        .collect();
    Ok(TildeRicci {
        ric_eta_eta,
        ricci_eta_tan,
    })
}

/// All tilde quantities at one point.
#[derive(Clone, Debug)]
pub struct TildeQuantities {
    pub f_tilde: f64,
    pub grad_f_tilde: Vec<f64>,
    pub a_grad_f_tilde: Vec<f64>,
    pub lap_f_tilde: f64,
    pub a_tilde_norm_sq: f64,
    pub ric_tilde_eta_eta: f64,
    pub ricci_tilde_eta_tan: Vec<f64>,
    pub b_tilde: Matrix,
}

pub fn tilde_all(base: &GeometryAtPoint) -> Result<TildeQuantities, ConformalError> {
    let ricci = tilde_ricci(base)?;
    Ok(TildeQuantities {
        f_tilde: tilde_mean_curvature(base)?,
        grad_f_tilde: tilde_grad_f(base)?,
        a_grad_f_tilde: tilde_a_grad_f(base)?,
        lap_f_tilde: tilde_lap_f(base)?,
        a_tilde_norm_sq: tilde_a_norm_sq(base)?,
        ric_tilde_eta_eta: ricci.ric_eta_eta,
        ricci_tilde_eta_tan: ricci.ricci_eta_tan,
        b_tilde: tilde_second_fundamental(base),
    })
}
