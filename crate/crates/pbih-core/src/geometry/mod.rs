//! Pointwise geometry of a hypersurface immersion `X : U ⊂ R^m → R^{m+1}`
//! in the ambient space `(R^{m+1}, e^{2γ} h)`.
//!
//! Conventions, fixed once and validated by the cross-checks in the residual
//! suite:
//!
//! * second fundamental form `B(X,Y) = (∇^N_X Y)^⊥`, scalarized against the
//!   unit normal `η`;
//! * shape operator `A(X) = −(∇^N_X η)^⊤`, so `⟨A X, Y⟩ = ⟨B(X,Y), η⟩` and
//!   in components `A = g⁻¹ B`;
//! * mean curvature `f = (1/m)·trace A`, mean curvature vector `H = f η`;
//! * `Δ = div ∘ grad` on scalars.
//!
//! The normal orientation is a deterministic tiebreak: with
//! [`Orientation::Plus`], the normal whose last nonzero ambient component is
//! positive; [`Orientation::Minus`] is its negation.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::expr::{Bindings, EvalError, Evaluator, Expr};
use crate::linalg::Matrix;

mod ambient;
mod symbols;

pub use ambient::{ambient_curvature, default_coords, AmbientClass, AmbientCurvature, AmbientSpace};
pub(crate) use symbols::MetricSymbols;
use symbols::{SurfaceSymbols, SymbolInput};

/// A chart point is degenerate when the smallest eigenvalue of the induced
/// metric falls to this level; such points are reported, never used.
pub const METRIC_RANK_TOL: f64 = 1e-12;

/// Sample count and tolerance used when validating a declared Einstein
/// ambient.
pub const EINSTEIN_SAMPLES: usize = 100;
pub const EINSTEIN_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Orientation {
    #[default]
    Plus,
    Minus,
}

#[derive(Clone, Debug, PartialEq)]
pub enum GeometryError {
    Invalid(String),
    OutsideDomain {
        var: String,
        value: f64,
        min: f64,
        max: f64,
    },
    DegeneratePoint {
        min_metric_eigenvalue: f64,
    },
    NotEinstein {
        max_deviation: f64,
        tol: f64,
    },
    Eval(EvalError),
}

impl fmt::Display for GeometryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeometryError::Invalid(msg) => write!(f, "{msg}"),
            GeometryError::OutsideDomain { var, value, min, max } => {
                write!(f, "chart point {var} = {value} outside domain [{min}, {max}]")
            }
            GeometryError::DegeneratePoint {
                min_metric_eigenvalue,
            } => write!(
                f,
                "degenerate chart point: smallest metric eigenvalue {min_metric_eigenvalue:e}"
            ),
            GeometryError::NotEinstein { max_deviation, tol } => write!(
                f,
                "ambient failed Einstein validation: max |Ric - λ·metric| = {max_deviation:e} > {tol:e}"
            ),
            GeometryError::Eval(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for GeometryError {}

impl From<EvalError> for GeometryError {
    fn from(e: EvalError) -> Self {
        GeometryError::Eval(e)
    }
}

/// The map `X : U ⊂ R^m → R^{m+1}` in chart variables, with a box domain.
/// Components may mention extra names (parameters) bound at evaluation time.
#[derive(Clone, Debug)]
pub struct Immersion {
    chart_vars: Vec<String>,
    components: Vec<Expr>,
    domain: Vec<(f64, f64)>,
}

impl Immersion {
    pub fn new(
        chart_vars: Vec<String>,
        components: Vec<Expr>,
        domain: Vec<(f64, f64)>,
    ) -> Result<Self, GeometryError> {
        let m = chart_vars.len();
        if m == 0 {
            return Err(GeometryError::Invalid("immersion needs at least one chart variable".into()));
        }
        if components.len() != m + 1 {
            return Err(GeometryError::Invalid(format!(
                "a hypersurface in R^{} needs {} components, got {}",
                m + 1,
                m + 1,
                components.len()
            )));
        }
        if domain.len() != m {
            return Err(GeometryError::Invalid(format!(
                "domain needs {m} intervals, got {}",
                domain.len()
            )));
        }
        for (i, v) in chart_vars.iter().enumerate() {
            if chart_vars[..i].contains(v) {
                return Err(GeometryError::Invalid(format!("duplicate chart variable '{v}'")));
            }
        }
        for ((lo, hi), v) in domain.iter().zip(&chart_vars) {
            if !(lo < hi) {
                return Err(GeometryError::Invalid(format!(
                    "empty domain [{lo}, {hi}] for chart variable '{v}'"
                )));
            }
        }
        Ok(Self {
            chart_vars,
            components,
            domain,
        })
    }

    pub fn m(&self) -> usize {
        self.chart_vars.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.chart_vars.len() + 1
    }

    pub fn chart_vars(&self) -> &[String] {
        &self.chart_vars
    }

    pub fn components(&self) -> &[Expr] {
        &self.components
    }

    pub fn domain(&self) -> &[(f64, f64)] {
        &self.domain
    }
}

/// Every pointwise quantity the residual systems consume. Tangential vectors
/// are in chart components; `g`-norms contract them with [`Self::g`].
#[derive(Clone, Debug)]
pub struct GeometryAtPoint {
    pub m: usize,
    pub u: Vec<f64>,
    pub x: Vec<f64>,
    pub g: Matrix,
    pub g_inv: Matrix,
    pub frame: Vec<Vec<f64>>,
    /// Unit normal for the ambient metric the geometry was computed in.
    pub eta: Vec<f64>,
    pub b: Matrix,
    /// Shape operator, mixed components `A^i_j`.
    pub a: Matrix,
    pub f: f64,
    pub a_norm_sq: f64,
    pub grad_f: Vec<f64>,
    pub lap_f: f64,
    pub ric_eta_eta: f64,
    pub ricci_eta_tan: Vec<f64>,
    /// `γ` evaluated at the surface point.
    pub gamma_val: f64,
    /// `η(γ)`.
    pub eta_gamma: f64,
    /// `η(η(γ))`: second derivative of `γ` along the straight normal line.
    pub eta_eta_gamma: f64,
    /// Flat-space Hessian of `γ` contracted twice with `η` (coincides with
    /// `eta_eta_gamma` for the flat connection; both names are kept because
    /// they enter different formulas).
    pub hess_gamma_eta_eta: f64,
    pub grad_m_gamma: Vec<f64>,
    /// Intrinsic Laplacian of `γ` restricted to the surface.
    pub lap_m_gamma: f64,
    /// Intrinsic gradient of the chart field `η(γ)`.
    pub grad_eta_gamma: Vec<f64>,
    /// Intrinsic Laplacian of `η(γ) e^{−γ}`.
    pub lap_s: f64,
    /// Flat ambient Laplacian of `γ` at the surface point.
    pub amb_lap_gamma: f64,
    /// Squared flat norm of the full ambient gradient of `γ`.
    pub amb_grad_gamma_sq: f64,
    pub ambient_class: AmbientClass,
}

impl GeometryAtPoint {
    /// g-norm of a tangential vector in chart components.
    pub fn tangent_norm(&self, v: &[f64]) -> f64 {
        crate::fmath::sqrt(self.g.quadratic_form(v).max(0.0))
    }

    /// Orientation flip `η → −η`; every field changes sign with its parity.
    pub fn flipped(&self) -> GeometryAtPoint {
        let mut out = self.clone();
        out.eta = crate::linalg::scale(&self.eta, -1.0);
        out.b = self.b.scaled(-1.0);
        out.a = self.a.scaled(-1.0);
        out.f = -self.f;
        out.grad_f = crate::linalg::scale(&self.grad_f, -1.0);
        out.lap_f = -self.lap_f;
        out.ricci_eta_tan = crate::linalg::scale(&self.ricci_eta_tan, -1.0);
        out.eta_gamma = -self.eta_gamma;
        out.grad_eta_gamma = crate::linalg::scale(&self.grad_eta_gamma, -1.0);
        out.lap_s = -self.lap_s;
        out
    }
}

/// Compiled symbolic geometry of one immersion in one ambient space. Build
/// once, evaluate at many points.
pub struct SurfaceGeometry {
    immersion: Immersion,
    symbols: SurfaceSymbols,
    ambient_class: AmbientClass,
}

impl SurfaceGeometry {
    /// Geometry computed in the ambient's metric; the γ-composite fields use
    /// the same γ and the ambient-unit normal.
    pub fn new(immersion: &Immersion, amb: &AmbientSpace) -> Result<Self, GeometryError> {
        check_names(immersion, amb.coords())?;
        if amb.dim() != immersion.ambient_dim() {
            return Err(GeometryError::Invalid(format!(
                "ambient dimension {} does not match immersion target R^{}",
                amb.dim(),
                immersion.ambient_dim()
            )));
        }
        let ricci = if amb.is_flat() { None } else { Some(amb.ricci_exprs()) };
        let symbols = SurfaceSymbols::build(SymbolInput {
            chart_vars: immersion.chart_vars(),
            components: immersion.components(),
            amb_coords: amb.coords(),
            metric_gamma: amb.gamma(),
            field_gamma: amb.gamma(),
            ricci,
        });
        Ok(Self {
            immersion: immersion.clone(),
            symbols,
            ambient_class: amb.class(),
        })
    }

    /// Geometry computed in flat Euclidean space, with the γ-composite fields
    /// populated from `gamma` and the Euclidean unit normal. This is the form
    /// the conformal-change identities consume.
    pub fn base_with_gamma(
        immersion: &Immersion,
        gamma: &Expr,
        coords: &[String],
    ) -> Result<Self, GeometryError> {
        check_names(immersion, coords)?;
        if coords.len() != immersion.ambient_dim() {
            return Err(GeometryError::Invalid(format!(
                "{} ambient coordinates given for a surface in R^{}",
                coords.len(),
                immersion.ambient_dim()
            )));
        }
        let zero = Expr::zero();
        let symbols = SurfaceSymbols::build(SymbolInput {
            chart_vars: immersion.chart_vars(),
            components: immersion.components(),
            amb_coords: coords,
            metric_gamma: &zero,
            field_gamma: gamma,
            ricci: None,
        });
        Ok(Self {
            immersion: immersion.clone(),
            symbols,
            ambient_class: AmbientClass::Euclidean,
        })
    }

    pub fn immersion(&self) -> &Immersion {
        &self.immersion
    }

    pub fn at(&self, u: &[f64], orientation: Orientation) -> Result<GeometryAtPoint, GeometryError> {
        self.at_with(u, &Bindings::new(), orientation)
    }

    /// Evaluate at a chart point with extra bindings for any parameter names
    /// left free in the immersion or the conformal factor.
    pub fn at_with(
        &self,
        u: &[f64],
        extra: &Bindings,
        orientation: Orientation,
    ) -> Result<GeometryAtPoint, GeometryError> {
        let m = self.symbols.m;
        if u.len() != m {
            return Err(GeometryError::Invalid(format!(
                "chart point has {} components, expected {m}",
                u.len()
            )));
        }
        let mut bindings = extra.clone();
        for (i, name) in self.immersion.chart_vars().iter().enumerate() {
            let (lo, hi) = self.immersion.domain()[i];
            if u[i] < lo || u[i] > hi {
                return Err(GeometryError::OutsideDomain {
                    var: name.clone(),
                    value: u[i],
                    min: lo,
                    max: hi,
                });
            }
            bindings.set(name, u[i]);
        }

        let sym = &self.symbols;
        let mut ev = Evaluator::new(&bindings);

        let g = eval_matrix(&mut ev, &sym.metric.g)?;
        let min_eig = g.sym_eigenvalues()[0];
        if !(min_eig > METRIC_RANK_TOL) {
            return Err(GeometryError::DegeneratePoint {
                min_metric_eigenvalue: min_eig,
            });
        }

        let x = eval_vec(&mut ev, &sym.x)?;
        let g_inv = eval_matrix(&mut ev, &sym.metric.g_inv)?;
        let frame = sym
            .frame
            .iter()
            .map(|row| eval_vec(&mut ev, row))
            .collect::<Result<Vec<_>, _>>()?;
        let n_euc = eval_vec(&mut ev, &sym.n_euc)?;
        let eta = eval_vec(&mut ev, &sym.eta)?;
        let b = eval_matrix(&mut ev, &sym.b)?;
        let a = eval_matrix(&mut ev, &sym.a)?;

        let point = GeometryAtPoint {
            m,
            u: u.to_vec(),
            x,
            g,
            g_inv,
            frame,
            eta,
            b,
            a,
            f: ev.eval(&sym.f)?,
            a_norm_sq: ev.eval(&sym.a_norm_sq)?,
            grad_f: eval_vec(&mut ev, &sym.grad_f)?,
            lap_f: ev.eval(&sym.lap_f)?,
            ric_eta_eta: ev.eval(&sym.ric_eta_eta)?,
            ricci_eta_tan: eval_vec(&mut ev, &sym.ricci_eta_tan)?,
            gamma_val: ev.eval(&sym.gamma_on_m)?,
            eta_gamma: ev.eval(&sym.eta_gamma)?,
            eta_eta_gamma: ev.eval(&sym.hess_gamma_eta_eta)?,
            hess_gamma_eta_eta: ev.eval(&sym.hess_gamma_eta_eta)?,
            grad_m_gamma: eval_vec(&mut ev, &sym.grad_m_gamma)?,
            lap_m_gamma: ev.eval(&sym.lap_m_gamma)?,
            grad_eta_gamma: eval_vec(&mut ev, &sym.grad_eta_gamma)?,
            lap_s: ev.eval(&sym.lap_s)?,
            amb_lap_gamma: ev.eval(&sym.amb_lap_gamma)?,
            amb_grad_gamma_sq: ev.eval(&sym.amb_grad_gamma_sq)?,
            ambient_class: self.ambient_class,
        };

        // Orientation rule: positive last nonzero component of the normal.
        let scale = n_euc.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        let last_nonzero = n_euc
            .iter()
            .rev()
            .find(|v| v.abs() > 1e-12 * scale)
            .copied()
            .unwrap_or(0.0);
        let rule_flip = last_nonzero < 0.0;
        let flip = match orientation {
            Orientation::Plus => rule_flip,
            Orientation::Minus => !rule_flip,
        };
        Ok(if flip { point.flipped() } else { point })
    }
}

fn check_names(immersion: &Immersion, coords: &[String]) -> Result<(), GeometryError> {
    for v in immersion.chart_vars() {
        if coords.contains(v) {
            return Err(GeometryError::Invalid(format!(
                "chart variable '{v}' collides with an ambient coordinate name"
            )));
        }
    }
    Ok(())
}

fn eval_vec(ev: &mut Evaluator<'_>, exprs: &[Expr]) -> Result<Vec<f64>, EvalError> {
    exprs.iter().map(|e| ev.eval(e)).collect()
}

fn eval_matrix(ev: &mut Evaluator<'_>, exprs: &[Vec<Expr>]) -> Result<Matrix, EvalError> {
    let rows = exprs.len();
    let cols = exprs[0].len();
    let mut m = Matrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m.set(i, j, ev.eval(&exprs[i][j])?);
        }
    }
    Ok(m)
}

/// All pointwise geometric quantities of `immersion` in `amb` at `u`.
pub fn geometry_at(
    immersion: &Immersion,
    amb: &AmbientSpace,
    u: &[f64],
    orientation: Orientation,
) -> Result<GeometryAtPoint, GeometryError> {
    SurfaceGeometry::new(immersion, amb)?.at(u, orientation)
}

/// Euclidean geometry of `immersion` with γ-composite fields from `gamma`.
pub fn base_geometry_with_gamma(
    immersion: &Immersion,
    gamma: &Expr,
    coords: &[String],
    u: &[f64],
    orientation: Orientation,
) -> Result<GeometryAtPoint, GeometryError> {
    SurfaceGeometry::base_with_gamma(immersion, gamma, coords)?.at(u, orientation)
}

/// Intrinsic gradient and Laplacian of a chart scalar field at `u`, with
/// respect to the metric `amb` induces on the surface.
#[derive(Clone, Debug)]
pub struct ScalarOps {
    pub grad_m: Vec<f64>,
    pub lap_m: f64,
}

pub fn intrinsic_scalar_ops(
    immersion: &Immersion,
    amb: &AmbientSpace,
    field: &Expr,
    u: &[f64],
) -> Result<ScalarOps, GeometryError> {
    check_names(immersion, amb.coords())?;
    let m = immersion.m();
    let vars = immersion.chart_vars();
    let frame: Vec<Vec<Expr>> = (0..m)
        .map(|i| {
            immersion
                .components()
                .iter()
                .map(|c| c.differentiate(&vars[i]))
                .collect()
        })
        .collect();
    let mut gram = vec![vec![Expr::zero(); m]; m];
    for i in 0..m {
        for j in i..m {
            let mut acc = Expr::zero();
            for a in 0..=m {
                acc = acc + frame[i][a].clone() * frame[j][a].clone();
            }
            gram[i][j] = acc.clone();
            gram[j][i] = acc;
        }
    }
    let mut compose = alloc::collections::BTreeMap::new();
    for (name, comp) in amb.coords().iter().zip(immersion.components()) {
        compose.insert(name.clone(), comp.clone());
    }
    let gamma_on_m = amb.gamma().substitute(&compose);
    let metric = MetricSymbols::new(vars.to_vec(), gram, &gamma_on_m);

    let mut bindings = Bindings::new();
    for (name, v) in vars.iter().zip(u) {
        bindings.set(name, *v);
    }
    let mut ev = Evaluator::new(&bindings);
    let g = eval_matrix(&mut ev, &metric.g)?;
    let min_eig = g.sym_eigenvalues()[0];
    if !(min_eig > METRIC_RANK_TOL) {
        return Err(GeometryError::DegeneratePoint {
            min_metric_eigenvalue: min_eig,
        });
    }
    let grad = metric.grad(field);
    let lap = metric.lap(field);
    Ok(ScalarOps {
        grad_m: eval_vec(&mut ev, &grad)?,
        lap_m: ev.eval(&lap)?,
    })
}

#[cfg(test)]
mod tests;
