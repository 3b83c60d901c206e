//! Derivative-free search over parametrized conformal factors: find `(p, γ)`
//! making a fixed minimal base surface properly p-biharmonic in
//! `(R³, e^{2γ} h)`, by minimizing the worst residual norm over a chart grid.
//!
//! The objective is a grid maximum, hence non-smooth; a bounded Nelder-Mead
//! simplex with seeded random restarts is robust and cheap at this scale.
//! A search can only produce candidates or floors — a reported floor says
//! nothing about nonexistence.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::expr::{Bindings, Expr};
use crate::geometry::{default_coords, GeometryError, Immersion, Orientation, SurfaceGeometry};
use crate::grid::Grid;
use crate::residuals::{residual_conformal_tilde, ProblemConfig};
use crate::rng::SplitMix64;

/// Penalty threshold on `max |f̃|` enforcing "proper" (not minimal in the
/// rescaled ambient).
pub const PROPER_TOL: f64 = 1e-4;

/// A family of conformal factors: a template over the ambient coordinates,
/// the parameter names, and a search box. Within the box the template must
/// stay finite on the search region; violations surface as rejected
/// objective evaluations.
#[derive(Clone, Debug)]
pub struct GammaFamily {
    pub name: String,
    pub template: Expr,
    pub parameter_names: Vec<String>,
    pub bounds: Vec<(f64, f64)>,
    /// Where the family comes from; built-in families are exploratory
    /// choices of this tool, not distinguished candidates.
    pub provenance: String,
}

const BUILTIN_PROVENANCE: &str = "built-in exploratory family";

impl GammaFamily {
    pub fn new(
        name: &str,
        template: Expr,
        parameter_names: Vec<String>,
        bounds: Vec<(f64, f64)>,
    ) -> Result<Self, SearchError> {
        if parameter_names.len() != bounds.len() {
            return Err(SearchError::Invalid(format!(
                "{} parameters but {} bounds",
                parameter_names.len(),
                bounds.len()
            )));
        }
        for ((lo, hi), name) in bounds.iter().zip(&parameter_names) {
            if !(lo <= hi) {
                return Err(SearchError::Invalid(format!(
                    "empty bound [{lo}, {hi}] for parameter '{name}'"
                )));
            }
        }
        Ok(Self {
            name: name.to_string(),
            template,
            parameter_names,
            bounds,
            provenance: "user-supplied family".into(),
        })
    }

    fn builtin(
        name: &str,
        template: &str,
        parameter_names: &[&str],
        bounds: &[(f64, f64)],
    ) -> Self {
        Self {
            name: name.to_string(),
            template: Expr::parse(template).expect("builtin template parses"),
            parameter_names: parameter_names.iter().map(|s| s.to_string()).collect(),
            bounds: bounds.to_vec(),
            provenance: BUILTIN_PROVENANCE.into(),
        }
    }

    /// `γ = a·ln(b·z + c)`; the box keeps `b·z + c` positive for |z| ≤ 3.
    pub fn log_affine_z() -> Self {
        Self::builtin(
            "log_affine_z",
            "a*ln(b*z + c)",
            &["a", "b", "c"],
            &[(-2.0, 2.0), (-0.3, 0.3), (1.0, 3.0)],
        )
    }

    /// Cubic polynomial in the axial coordinate.
    pub fn poly_z() -> Self {
        Self::builtin(
            "poly_z",
            "a*z + b*z^2 + c*z^3",
            &["a", "b", "c"],
            &[(-0.5, 0.5), (-0.2, 0.2), (-0.05, 0.05)],
        )
    }

    /// Radially symmetric factor `a·ln(b + |x|²)`.
    pub fn radial() -> Self {
        Self::builtin(
            "radial",
            "a*ln(b + x^2 + y^2 + z^2)",
            &["a", "b"],
            &[(-1.0, 1.0), (0.5, 3.0)],
        )
    }

    /// A smooth factor exercising every coordinate; used by the
    /// cross-validation suites as the source of random test exponents.
    pub fn mixed_smooth() -> Self {
        Self::builtin(
            "mixed_smooth",
            "a*z + b*sin(x)*cos(y) + c*ln(4 + x^2 + y^2 + z^2)",
            &["a", "b", "c"],
            &[(-0.25, 0.25), (-0.25, 0.25), (-0.25, 0.25)],
        )
    }

    /// The hyperplane solution family `γ = ln((p−1)(c1·z + c2))/(p−1)`,
    /// used as the optimizer recovery oracle.
    pub fn example1() -> Self {
        Self::builtin(
            "example1",
            "ln((p-1)*(c1*z + c2))/(p-1)",
            &["c1", "c2"],
            &[(0.5, 2.0), (0.5, 2.0)],
        )
    }

    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "log_affine_z" => Some(Self::log_affine_z()),
            "poly_z" => Some(Self::poly_z()),
            "radial" => Some(Self::radial()),
            "mixed_smooth" => Some(Self::mixed_smooth()),
            "example1" => Some(Self::example1()),
            _ => None,
        }
    }

    pub const BUILTIN_FAMILY_NAMES: [&'static str; 5] =
        ["log_affine_z", "poly_z", "radial", "mixed_smooth", "example1"];

    /// Bind parameters to values, leaving coordinates (and `p`) free.
    pub fn bind(&self, params: &[f64]) -> Expr {
        let mut map = BTreeMap::new();
        for (name, v) in self.parameter_names.iter().zip(params) {
            map.insert(name.clone(), Expr::constant(*v));
        }
        self.template.substitute(&map)
    }
}

#[derive(Clone, Debug)]
pub enum SearchError {
    Invalid(String),
    NonMinimalBase { max_f: f64 },
    Geometry(GeometryError),
    NoUsableGridPoints,
}

impl fmt::Display for SearchError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SearchError::Invalid(msg) => write!(f, "{msg}"),
            SearchError::NonMinimalBase { max_f } => {
                write!(f, "search base must be minimal in flat space; max |f| = {max_f:e}")
            }
            SearchError::Geometry(e) => write!(f, "{e}"),
            SearchError::NoUsableGridPoints => write!(f, "no non-degenerate grid points"),
        }
    }
}

impl core::error::Error for SearchError {}

impl From<GeometryError> for SearchError {
    fn from(e: GeometryError) -> Self {
        SearchError::Geometry(e)
    }
}

/// A fixed base surface, a γ family, and a sample grid. Symbolic geometry is
/// built once with the family parameters left free, so each objective call
/// is pure numeric evaluation.
pub struct SearchProblem {
    family: GammaFamily,
    geometry: SurfaceGeometry,
    points: Vec<Vec<f64>>,
    m: usize,
}

impl SearchProblem {
    pub fn new(base: &Immersion, family: GammaFamily, grid: &Grid) -> Result<Self, SearchError> {
        let coords = default_coords(base.ambient_dim());
        for v in family.template.free_vars() {
            let ok = family.parameter_names.contains(&v) || coords.contains(&v) || v == "p";
            if !ok {
                return Err(SearchError::Invalid(format!(
                    "family template uses '{v}', which is neither a parameter, an ambient coordinate, nor p"
                )));
            }
        }
        // Verify base minimality once, on flat geometry, and keep only the
        // non-degenerate grid points.
        let flat = SurfaceGeometry::base_with_gamma(base, &Expr::zero(), &coords)?;
        let mut points = Vec::new();
        let mut max_f: f64 = 0.0;
        for u in grid.points() {
            match flat.at(&u, Orientation::Plus) {
                Ok(geo) => {
                    max_f = max_f.max(geo.f.abs());
                    points.push(u);
                }
                Err(GeometryError::DegeneratePoint { .. }) => continue,
                Err(e) => return Err(e.into()),
            }
        }
        if points.is_empty() {
            return Err(SearchError::NoUsableGridPoints);
        }
        if max_f > crate::conformal::MINIMALITY_TOL {
            return Err(SearchError::NonMinimalBase { max_f });
        }
        let geometry = SurfaceGeometry::base_with_gamma(base, &family.template, &coords)?;
        let m = base.m();
        Ok(Self {
            family,
            geometry,
            points,
            m,
        })
    }

    pub fn family(&self) -> &GammaFamily {
        &self.family
    }

    pub fn dim(&self) -> usize {
        self.family.parameter_names.len()
    }

    /// Worst residual norm over the grid plus the properness penalty
    /// `max(0, PROPER_TOL − max |f̃|)`. Domain violations reject the point
    /// with `+∞`.
    pub fn objective(&self, params: &[f64], p: f64) -> f64 {
        debug_assert_eq!(params.len(), self.dim());
        let cfg = match ProblemConfig::new(p, self.m) {
            Ok(c) => c,
            Err(_) => return f64::INFINITY,
        };
        let mut extra = Bindings::new();
        for (name, v) in self.family.parameter_names.iter().zip(params) {
            extra.set(name, *v);
        }
        extra.set("p", p);
        let mut worst: f64 = 0.0;
        let mut max_abs_f: f64 = 0.0;
        for u in &self.points {
            let base = match self.geometry.at_with(u, &extra, Orientation::Plus) {
                Ok(g) => g,
                Err(_) => return f64::INFINITY,
            };
            let r = match residual_conformal_tilde(&base, &cfg) {
                Ok(r) => r,
                Err(_) => return f64::INFINITY,
            };
            worst = worst.max(r.max_norm());
            let f_tilde = -base.eta_gamma * crate::fmath::exp(-base.gamma_val);
            max_abs_f = max_abs_f.max(f_tilde.abs());
            if !worst.is_finite() {
                return f64::INFINITY;
            }
        }
        worst + (PROPER_TOL - max_abs_f).max(0.0)
    }
}

#[derive(Clone, Debug)]
pub struct SearchOptions {
    pub max_iters: usize,
    pub restarts: usize,
    pub simplex_scale: f64,
    pub seed: u64,
    /// Objective at or below this is a candidate.
    pub objective_tol: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            max_iters: 200,
            restarts: 5,
            simplex_scale: 0.25,
            seed: 0x5EED,
            objective_tol: 1e-8,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SearchVerdict {
    CandidateFound { objective: f64 },
    /// Best objective reached; reports a floor, not nonexistence.
    NoCandidate { best_objective: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HistoryEntry {
    pub iteration: usize,
    pub best_objective: f64,
}

#[derive(Clone, Debug)]
pub struct SearchResult {
    pub best_params: Vec<(String, f64)>,
    pub best_p: f64,
    pub objective: f64,
    pub history: Vec<HistoryEntry>,
    pub verdict: SearchVerdict,
    pub evaluations: usize,
    /// Best objective reached by each restart individually.
    pub restart_bests: Vec<f64>,
    pub provenance: String,
}

/// Bounded Nelder-Mead over the family box (and `p`, when `p_range` is a
/// real interval) with seeded restarts. Deterministic for a fixed seed.
pub fn minimize(
    problem: &SearchProblem,
    p_range: (f64, f64),
    options: &SearchOptions,
) -> SearchResult {
    let search_p = p_range.1 > p_range.0;
    let mut bounds = problem.family.bounds.clone();
    if search_p {
        bounds.push(p_range);
    }
    let dim = bounds.len();
    let mut rng = SplitMix64::new(options.seed);
    let mut evaluations = 0usize;
    let mut history = Vec::new();
    let mut iteration = 0usize;
    let mut best_x: Option<Vec<f64>> = None;
    let mut best_f = f64::INFINITY;
    let mut restart_bests = Vec::new();

    let split = |x: &[f64]| -> (Vec<f64>, f64) {
        if search_p {
            (x[..x.len() - 1].to_vec(), x[x.len() - 1])
        } else {
            (x.to_vec(), p_range.0)
        }
    };

    let restarts = options.restarts.max(1);
    for restart in 0..restarts {
        let mut restart_best = f64::INFINITY;
        let x0: Vec<f64> = if restart == 0 {
            bounds.iter().map(|(lo, hi)| 0.5 * (lo + hi)).collect()
        } else {
            bounds.iter().map(|(lo, hi)| rng.uniform(*lo, *hi)).collect()
        };
        let eval = |x: &[f64], evals: &mut usize| -> f64 {
            *evals += 1;
            let (params, p) = split(x);
            problem.objective(&params, p)
        };

        // Initial simplex: x0 plus a scaled step along each coordinate.
        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
        let f0 = eval(&x0, &mut evaluations);
        simplex.push((x0.clone(), f0));
        for i in 0..dim {
            let (lo, hi) = bounds[i];
            let width = hi - lo;
            let mut x = x0.clone();
            let step = options.simplex_scale * width;
            x[i] = if x[i] + step <= hi { x[i] + step } else { x[i] - step };
            let fx = eval(&x, &mut evaluations);
            simplex.push((x, fx));
        }
        record_best(&mut simplex, &mut best_x, &mut best_f);
        history.push(HistoryEntry {
            iteration,
            best_objective: best_f,
        });

        for _ in 0..options.max_iters {
            iteration += 1;
            simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(core::cmp::Ordering::Equal));
            let spread = simplex[dim].1 - simplex[0].1;
            if spread.abs() <= 1e-16 * (1.0 + simplex[0].1.abs()) && simplex[0].1.is_finite() {
                break;
            }
            let centroid: Vec<f64> = (0..dim)
                .map(|i| simplex[..dim].iter().map(|(x, _)| x[i]).sum::<f64>() / dim as f64)
                .collect();
            let worst = simplex[dim].clone();
            let reflect = clamp(
                &(0..dim)
                    .map(|i| centroid[i] + (centroid[i] - worst.0[i]))
                    .collect::<Vec<_>>(),
                &bounds,
            );
            let fr = eval(&reflect, &mut evaluations);
            if fr < simplex[0].1 {
                let expand = clamp(
                    &(0..dim)
                        .map(|i| centroid[i] + 2.0 * (centroid[i] - worst.0[i]))
                        .collect::<Vec<_>>(),
                    &bounds,
                );
                let fe = eval(&expand, &mut evaluations);
                simplex[dim] = if fe < fr { (expand, fe) } else { (reflect, fr) };
            } else if fr < simplex[dim - 1].1 {
                simplex[dim] = (reflect, fr);
            } else {
                let contract = clamp(
                    &(0..dim)
                        .map(|i| centroid[i] + 0.5 * (worst.0[i] - centroid[i]))
                        .collect::<Vec<_>>(),
                    &bounds,
                );
                let fc = eval(&contract, &mut evaluations);
                if fc < worst.1 {
                    simplex[dim] = (contract, fc);
                } else {
                    // Shrink toward the best vertex.
                    let best = simplex[0].0.clone();
                    for v in simplex.iter_mut().skip(1) {
                        let x: Vec<f64> = (0..dim)
                            .map(|i| best[i] + 0.5 * (v.0[i] - best[i]))
                            .collect();
                        let fx = eval(&x, &mut evaluations);
                        *v = (x, fx);
                    }
                }
            }
            record_best(&mut simplex, &mut best_x, &mut best_f);
            for (_, fx) in simplex.iter() {
                if *fx < restart_best {
                    restart_best = *fx;
                }
            }
            history.push(HistoryEntry {
                iteration,
                best_objective: best_f,
            });
        }
        for (_, fx) in simplex.iter() {
            if *fx < restart_best {
                restart_best = *fx;
            }
        }
        restart_bests.push(restart_best);
    }

    let best_x = best_x.unwrap_or_else(|| bounds.iter().map(|(lo, hi)| 0.5 * (lo + hi)).collect());
    let (params, p) = split(&best_x);
    // Recompute at the reported point: the result carries no stale cache.
    let objective = problem.objective(&params, p);
    let verdict = if objective <= options.objective_tol {
        SearchVerdict::CandidateFound { objective }
    } else {
        SearchVerdict::NoCandidate {
            best_objective: objective,
        }
    };
    SearchResult {
        best_params: problem
            .family
            .parameter_names
            .iter()
            .cloned()
            .zip(params)
            .collect(),
        best_p: p,
        objective,
        history,
        verdict,
        evaluations,
        restart_bests,
        provenance: format!("{} ({})", problem.family.name, problem.family.provenance),
    }
}

fn clamp(x: &[f64], bounds: &[(f64, f64)]) -> Vec<f64> {
    x.iter()
        .zip(bounds)
        .map(|(v, (lo, hi))| v.max(*lo).min(*hi))
        .collect()
}

fn record_best(simplex: &mut [(Vec<f64>, f64)], best_x: &mut Option<Vec<f64>>, best_f: &mut f64) {
    for (x, fx) in simplex.iter() {
        if *fx < *best_f {
            *best_f = *fx;
            *best_x = Some(x.clone());
        }
    }
}
