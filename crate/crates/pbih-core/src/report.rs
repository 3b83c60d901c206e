//! Grid evaluation of the residual systems over a surface, producing
//! per-point records, summary norms, and a verdict.
//!
//! Route selection: Euclidean ambients use the general system directly. A
//! conformally flat ambient over a base that is minimal in flat space uses
//! the tilde route (the route closest to the general theorem), evaluating
//! the closed-form system alongside it and flagging any disagreement instead
//! of silently preferring either. Non-minimal bases in a conformal ambient
//! fall back to brute-force geometry computed in that ambient.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::catalog::Verdict;
use crate::conformal::MINIMALITY_TOL;
use crate::expr::Bindings;
use crate::geometry::{AmbientSpace, GeometryError, Immersion, Orientation, SurfaceGeometry};
use crate::grid::Grid;
use crate::residuals::{
    p_tension, residual_conformal_closed_form, residual_conformal_tilde, residual_general,
    ProblemConfig, P_HARMONIC_TOL,
};

/// Which computational route produced the residual columns.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Route {
    EuclideanGeneral,
    ConformalTilde,
    ConformalGeneral,
}

impl Route {
    pub fn label(self) -> &'static str {
        match self {
            Route::EuclideanGeneral => "euclidean_general",
            Route::ConformalTilde => "conformal_tilde",
            Route::ConformalGeneral => "conformal_general",
        }
    }
}

/// One evaluated grid point.
#[derive(Clone, Debug)]
pub struct PointRecord {
    pub u: Vec<f64>,
    pub f: f64,
    pub a_norm_sq: f64,
    pub res_normal: f64,
    pub res_tangential_norm: f64,
    pub p_tension_norm: f64,
    /// Max componentwise gap between the two conformal routes, when both ran.
    pub closed_form_gap: Option<f64>,
}

/// A grid point that could not be evaluated, with the reason.
#[derive(Clone, Debug)]
pub struct SkippedPoint {
    pub u: Vec<f64>,
    pub reason: String,
}

#[derive(Clone, Debug)]
pub struct Summary {
    pub max_normal: f64,
    pub max_tangential: f64,
    pub mean_normal: f64,
    pub mean_tangential: f64,
    pub max_p_tension: f64,
    pub max_abs_f: f64,
    pub evaluated_points: usize,
    pub skipped_points: usize,
    pub verdict: Verdict,
    /// Largest closed-form-vs-tilde gap seen, when the comparison ran.
    pub max_closed_form_gap: Option<f64>,
    /// Set when that gap exceeds the tolerance: the tilde-route columns are
    /// reported and the discrepancy is surfaced rather than patched.
    pub closed_form_flagged: bool,
}

/// Evaluated residuals across a grid with provenance.
#[derive(Clone, Debug)]
pub struct ResidualReport {
    pub route: Route,
    pub tolerance: f64,
    pub records: Vec<PointRecord>,
    pub skipped: Vec<SkippedPoint>,
    pub summary: Summary,
}

#[derive(Clone, Debug)]
pub enum ReportError {
    Geometry(GeometryError),
    Residual(crate::residuals::ResidualError),
    AllPointsSkipped { first_reason: String },
}

impl fmt::Display for ReportError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReportError::Geometry(e) => write!(f, "{e}"),
            ReportError::Residual(e) => write!(f, "{e}"),
            ReportError::AllPointsSkipped { first_reason } => {
                write!(f, "every grid point was degenerate or failed: {first_reason}")
            }
        }
    }
}

impl core::error::Error for ReportError {}

impl From<GeometryError> for ReportError {
    fn from(e: GeometryError) -> Self {
        ReportError::Geometry(e)
    }
}

impl From<crate::residuals::ResidualError> for ReportError {
    fn from(e: crate::residuals::ResidualError) -> Self {
        ReportError::Residual(e)
    }
}

/// Compiled evaluation plan for one surface in one ambient: symbolic
/// geometry built once, route fixed by a minimality prepass over the grid.
pub struct SurfacePlan {
    route: Route,
    base: SurfaceGeometry,
    tilde: Option<SurfaceGeometry>,
}

impl SurfacePlan {
    pub fn new(
        immersion: &Immersion,
        amb: &AmbientSpace,
        grid: &Grid,
        orientation: Orientation,
    ) -> Result<Self, ReportError> {
        if amb.is_flat() {
            return Ok(Self {
                route: Route::EuclideanGeneral,
                base: SurfaceGeometry::new(immersion, amb)?,
                tilde: None,
            });
        }
        // Minimality prepass on the flat base geometry.
        let base = SurfaceGeometry::base_with_gamma(immersion, amb.gamma(), amb.coords())?;
        let mut minimal = true;
        let mut any_ok = false;
        for u in grid.points() {
            match base.at(&u, orientation) {
                Ok(geo) => {
                    any_ok = true;
                    if geo.f.abs() > MINIMALITY_TOL {
                        minimal = false;
                        break;
                    }
                }
                Err(GeometryError::DegeneratePoint { .. }) => continue,
                Err(e) => return Err(e.into()),
            }
        }
        if minimal && any_ok {
            Ok(Self {
                route: Route::ConformalTilde,
                base,
                tilde: None,
            })
        } else {
            Ok(Self {
                route: Route::ConformalGeneral,
                base,
                tilde: Some(SurfaceGeometry::new(immersion, amb)?),
            })
        }
    }

    pub fn route(&self) -> Route {
        self.route
    }

    /// Evaluate one chart point; degenerate points and domain failures come
    /// back as `Err(reason)` for the caller to record, not as failures.
    pub fn evaluate_point(
        &self,
        cfg: &ProblemConfig,
        u: &[f64],
        extra: &Bindings,
    ) -> Result<PointRecord, String> {
        let describe = |e: &dyn fmt::Display| format!("{e}");
        match self.route {
            Route::EuclideanGeneral => {
                let geo = self
                    .base
                    .at_with(u, extra, cfg.orientation)
                    .map_err(|e| describe(&e))?;
                let r = residual_general(&geo, cfg);
                let t = p_tension(&geo, cfg);
                Ok(PointRecord {
                    u: u.to_vec(),
                    f: geo.f,
                    a_norm_sq: geo.a_norm_sq,
                    res_normal: r.normal_abs,
                    res_tangential_norm: r.tangential_norm,
                    p_tension_norm: t.norm,
                    closed_form_gap: None,
                })
            }
            Route::ConformalTilde => {
                let base = self
                    .base
                    .at_with(u, extra, cfg.orientation)
                    .map_err(|e| describe(&e))?;
                let tilde = residual_conformal_tilde(&base, cfg).map_err(|e| describe(&e))?;
                let closed =
                    residual_conformal_closed_form(&base, cfg).map_err(|e| describe(&e))?;
                let mut gap = (tilde.normal - closed.normal).abs();
                for i in 0..base.m {
                    gap = gap.max((tilde.tangential[i] - closed.tangential[i]).abs());
                }
                let quants = crate::conformal::tilde_all(&base).map_err(|e| describe(&e))?;
                let p_tension_norm =
                    crate::fmath::powf(cfg.m as f64, cfg.p / 2.0) * quants.f_tilde.abs();
                Ok(PointRecord {
                    u: u.to_vec(),
                    f: quants.f_tilde,
                    a_norm_sq: quants.a_tilde_norm_sq,
                    res_normal: tilde.normal_abs,
                    res_tangential_norm: tilde.tangential_norm,
                    p_tension_norm,
                    closed_form_gap: Some(gap),
                })
            }
            Route::ConformalGeneral => {
                let geo = self
                    .tilde
                    .as_ref()
                    .expect("plan invariant")
                    .at_with(u, extra, cfg.orientation)
                    .map_err(|e| describe(&e))?;
                let r = residual_general(&geo, cfg);
                let t = p_tension(&geo, cfg);
                Ok(PointRecord {
                    u: u.to_vec(),
                    f: geo.f,
                    a_norm_sq: geo.a_norm_sq,
                    res_normal: r.normal_abs,
                    res_tangential_norm: r.tangential_norm,
                    p_tension_norm: t.norm,
                    closed_form_gap: None,
                })
            }
        }
    }

    /// Sequential grid evaluation. Callers that want to fan out across
    /// workers can call [`Self::evaluate_point`] per index and feed the
    /// ordered results to [`summarize`].
    pub fn report(
        &self,
        cfg: &ProblemConfig,
        grid: &Grid,
        tolerance: f64,
    ) -> Result<ResidualReport, ReportError> {
        let mut records = Vec::new();
        let mut skipped = Vec::new();
        let extra = Bindings::new();
        for u in grid.points() {
            match self.evaluate_point(cfg, &u, &extra) {
                Ok(rec) => records.push(rec),
                Err(reason) => skipped.push(SkippedPoint { u, reason }),
            }
        }
        let summary = summarize(&records, &skipped, tolerance)?;
        Ok(ResidualReport {
            route: self.route,
            tolerance,
            records,
            skipped,
            summary,
        })
    }
}

/// Fold records into summary norms and the verdict. Order-independent for
/// the maxima; means accumulate in record order, which callers keep
/// deterministic (row-major).
pub fn summarize(
    records: &[PointRecord],
    skipped: &[SkippedPoint],
    tolerance: f64,
) -> Result<Summary, ReportError> {
    if records.is_empty() {
        return Err(ReportError::AllPointsSkipped {
            first_reason: skipped
                .first()
                .map(|s| s.reason.clone())
                .unwrap_or_else(|| "empty grid".into()),
        });
    }
    let mut max_normal: f64 = 0.0;
    let mut max_tangential: f64 = 0.0;
    let mut sum_normal = 0.0;
    let mut sum_tangential = 0.0;
    let mut max_p_tension: f64 = 0.0;
    let mut max_abs_f: f64 = 0.0;
    let mut max_gap: Option<f64> = None;
    for r in records {
        max_normal = max_normal.max(r.res_normal);
        max_tangential = max_tangential.max(r.res_tangential_norm);
        sum_normal += r.res_normal;
        sum_tangential += r.res_tangential_norm;
        max_p_tension = max_p_tension.max(r.p_tension_norm);
        max_abs_f = max_abs_f.max(r.f.abs());
        if let Some(g) = r.closed_form_gap {
            max_gap = Some(max_gap.unwrap_or(0.0).max(g));
        }
    }
    let n = records.len() as f64;
    let verdict = if max_p_tension <= P_HARMONIC_TOL {
        Verdict::PHarmonic
    } else if max_normal.max(max_tangential) <= tolerance {
        Verdict::ProperPBiharmonic
    } else {
        Verdict::Neither
    };
    Ok(Summary {
        max_normal,
        max_tangential,
        mean_normal: sum_normal / n,
        mean_tangential: sum_tangential / n,
        max_p_tension,
        max_abs_f,
        evaluated_points: records.len(),
        skipped_points: skipped.len(),
        verdict,
        max_closed_form_gap: max_gap,
        closed_form_flagged: max_gap.is_some_and(|g| g > tolerance),
    })
}

/// Evaluate a surface over a grid in one call.
pub fn evaluate_surface(
    immersion: &Immersion,
    amb: &AmbientSpace,
    cfg: &ProblemConfig,
    grid: &Grid,
    tolerance: f64,
) -> Result<ResidualReport, ReportError> {
    SurfacePlan::new(immersion, amb, grid, cfg.orientation)?.report(cfg, grid, tolerance)
}
