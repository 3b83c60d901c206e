//! Built-in immersions, conformal factors, and named configurations: the
//! worked examples (hyperplane in a log-conformal ambient, horizontal
//! revolution disk in `z^{2/(p−1)} h`) plus standard controls (catenoid,
//! sphere, flat plane).

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::expr::{Expr, ParseError};
use crate::geometry::{AmbientSpace, GeometryError, Immersion, EINSTEIN_SAMPLES, EINSTEIN_TOL};
use crate::residuals::{ProblemConfig, ResidualError, RESIDUAL_TOL};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    PHarmonic,
    ProperPBiharmonic,
    Neither,
}

impl Verdict {
    pub fn label(self) -> &'static str {
        match self {
            Verdict::PHarmonic => "p_harmonic",
            Verdict::ProperPBiharmonic => "proper_p_biharmonic",
            Verdict::Neither => "neither",
        }
    }

    pub fn parse(text: &str) -> Option<Verdict> {
        match text {
            "p_harmonic" => Some(Verdict::PHarmonic),
            "proper_p_biharmonic" => Some(Verdict::ProperPBiharmonic),
            "neither" => Some(Verdict::Neither),
            _ => None,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Expected outcome of a named configuration with its tolerance.
#[derive(Clone, Copy, Debug)]
pub struct Expected {
    pub verdict: Verdict,
    pub tolerance: f64,
}

/// A fully bound example configuration.
#[derive(Clone, Debug)]
pub struct NamedConfiguration {
    pub name: String,
    pub immersion: Immersion,
    pub ambient: AmbientSpace,
    pub cfg: ProblemConfig,
    pub parameters: BTreeMap<String, f64>,
    pub expected: Expected,
}

/// Override value for a builtin parameter.
#[derive(Clone, Debug)]
pub enum ParamValue {
    Number(f64),
    Text(String),
}

pub type Params = BTreeMap<String, ParamValue>;

#[derive(Clone, Debug)]
pub enum CatalogError {
    UnknownName(String),
    UnknownParameter { builtin: &'static str, key: String },
    OutOfDomain { key: String, detail: String },
    BadExpression { key: String, error: ParseError },
    Geometry(GeometryError),
    Residual(ResidualError),
}

impl fmt::Display for CatalogError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CatalogError::UnknownName(name) => write!(
                f,
                "unknown builtin '{name}'; known: {}",
                BUILTIN_NAMES.join(", ")
            ),
            CatalogError::UnknownParameter { builtin, key } => {
                write!(f, "builtin '{builtin}' has no parameter '{key}'")
            }
            CatalogError::OutOfDomain { key, detail } => {
                write!(f, "parameter '{key}' out of domain: {detail}")
            }
            CatalogError::BadExpression { key, error } => {
                write!(f, "parameter '{key}': {error}")
            }
            CatalogError::Geometry(e) => write!(f, "{e}"),
            CatalogError::Residual(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for CatalogError {}

impl From<GeometryError> for CatalogError {
    fn from(e: GeometryError) -> Self {
        CatalogError::Geometry(e)
    }
}

impl From<ResidualError> for CatalogError {
    fn from(e: ResidualError) -> Self {
        CatalogError::Residual(e)
    }
}

pub const BUILTIN_NAMES: [&str; 5] = [
    "hyperplane_example1",
    "revolution_disk_example2",
    "catenoid",
    "sphere",
    "flat_plane",
];

/// One line of `--list-builtins` documentation per parameter.
pub struct BuiltinInfo {
    pub name: &'static str,
    pub summary: &'static str,
    pub expected: &'static str,
    pub parameters: &'static [(&'static str, &'static str)],
}

pub fn describe_builtins() -> Vec<BuiltinInfo> {
    vec![
        BuiltinInfo {
            name: "hyperplane_example1",
            summary: "hyperplane z = c in the ambient e^{2γ(z)}h with γ = ln((p-1)(c1·z+c2))/(p-1)",
            expected: "proper_p_biharmonic",
            parameters: &[
                ("p", "exponent, default 3"),
                ("c", "height of the hyperplane, default 0"),
                ("c1", "slope coefficient of γ, default 1"),
                ("c2", "offset coefficient of γ, default 1 (needs c1·c + c2 > 0)"),
            ],
        },
        BuiltinInfo {
            name: "revolution_disk_example2",
            summary: "horizontal revolution surface (f(x2)·cos x1, f(x2)·sin x1, c) in (z^{2/(p-1)})h",
            expected: "proper_p_biharmonic",
            parameters: &[
                ("p", "exponent, default 3"),
                ("c", "height, default 1 (must be > 0)"),
                ("profile", "radial profile expression in x2, default \"1 + x2^2\" (must stay > 0)"),
            ],
        },
        BuiltinInfo {
            name: "catenoid",
            summary: "catenoid (a·cosh(x2/a + b)·cos x1, a·cosh(x2/a + b)·sin x1, x2), Euclidean ambient",
            expected: "p_harmonic",
            parameters: &[
                ("p", "exponent, default 3"),
                ("a", "neck radius, default 1 (nonzero)"),
                ("b", "axial offset, default 0"),
            ],
        },
        BuiltinInfo {
            name: "sphere",
            summary: "round sphere of the given radius, Euclidean ambient",
            expected: "neither",
            parameters: &[
                ("p", "exponent, default 2"),
                ("radius", "sphere radius, default 1 (must be > 0)"),
            ],
        },
        BuiltinInfo {
            name: "flat_plane",
            summary: "flat plane z = 0, Euclidean ambient",
            expected: "p_harmonic",
            parameters: &[("p", "exponent, default 2")],
        },
    ]
}

struct ParamReader<'a> {
    builtin: &'static str,
    overrides: &'a Params,
    allowed: &'static [&'static str],
}

impl<'a> ParamReader<'a> {
    fn new(
        builtin: &'static str,
        overrides: &'a Params,
        allowed: &'static [&'static str],
    ) -> Result<Self, CatalogError> {
        for key in overrides.keys() {
            if !allowed.contains(&key.as_str()) {
                return Err(CatalogError::UnknownParameter {
                    builtin,
                    key: key.clone(),
                });
            }
        }
        Ok(Self {
            builtin,
            overrides,
            allowed,
        })
    }

    fn number(&self, key: &str, default: f64) -> Result<f64, CatalogError> {
        debug_assert!(self.allowed.contains(&key), "{} {key}", self.builtin);
        match self.overrides.get(key) {
            None => Ok(default),
            Some(ParamValue::Number(v)) => Ok(*v),
            Some(ParamValue::Text(t)) => t.parse().map_err(|_| CatalogError::OutOfDomain {
                key: key.to_string(),
                detail: format!("expected a number, got '{t}'"),
            }),
        }
    }

    fn text(&self, key: &str, default: &str) -> String {
        match self.overrides.get(key) {
            Some(ParamValue::Text(t)) => t.clone(),
            Some(ParamValue::Number(v)) => v.to_string(),
            None => default.to_string(),
        }
    }
}

/// Instantiate a builtin configuration with parameter overrides.
pub fn builtin(name: &str, overrides: &Params) -> Result<NamedConfiguration, CatalogError> {
    match name {
        "hyperplane_example1" => hyperplane_example1(overrides),
        "revolution_disk_example2" => revolution_disk_example2(overrides),
        "catenoid" => catenoid_builtin(overrides),
        "sphere" => sphere_builtin(overrides),
        "flat_plane" => flat_plane_builtin(overrides),
        other => Err(CatalogError::UnknownName(other.to_string())),
    }
}

fn subst_consts(template: &str, values: &[(&str, f64)]) -> Expr {
    let e = Expr::parse(template).expect("builtin template parses");
    let mut map = BTreeMap::new();
    for (name, v) in values {
        map.insert((*name).to_string(), Expr::constant(*v));
    }
    e.substitute(&map)
}

fn hyperplane_example1(overrides: &Params) -> Result<NamedConfiguration, CatalogError> {
    let r = ParamReader::new("hyperplane_example1", overrides, &["p", "c", "c1", "c2"])?;
    let p = r.number("p", 3.0)?;
    let c = r.number("c", 0.0)?;
    let c1 = r.number("c1", 1.0)?;
    let c2 = r.number("c2", 1.0)?;
    if (p - 1.0) * (c1 * c + c2) <= 0.0 {
        return Err(CatalogError::OutOfDomain {
            key: "c2".into(),
            detail: format!("(p-1)(c1·c + c2) must be positive, got {}", (p - 1.0) * (c1 * c + c2)),
        });
    }
    let immersion = Immersion::new(
        vec!["x1".into(), "x2".into()],
        vec![Expr::var("x1"), Expr::var("x2"), Expr::constant(c)],
        vec![(-1.0, 1.0), (-1.0, 1.0)],
    )?;
    let gamma = subst_consts(
        "ln((p-1)*(c1*z+c2))/(p-1)",
        &[("p", p), ("c1", c1), ("c2", c2)],
    );
    let ambient = AmbientSpace::conformal(3, None, gamma)?;
    let mut parameters = BTreeMap::new();
    parameters.insert("p".into(), p);
    parameters.insert("c".into(), c);
    parameters.insert("c1".into(), c1);
    parameters.insert("c2".into(), c2);
    Ok(NamedConfiguration {
        name: "hyperplane_example1".into(),
        immersion,
        ambient,
        cfg: ProblemConfig::new(p, 2)?,
        parameters,
        expected: Expected {
            verdict: Verdict::ProperPBiharmonic,
            tolerance: 1e-9,
        },
    })
}

fn revolution_disk_example2(overrides: &Params) -> Result<NamedConfiguration, CatalogError> {
    let r = ParamReader::new("revolution_disk_example2", overrides, &["p", "c", "profile"])?;
    let p = r.number("p", 3.0)?;
    let c = r.number("c", 1.0)?;
    if c <= 0.0 {
        return Err(CatalogError::OutOfDomain {
            key: "c".into(),
            detail: format!("the surface must stay in z > 0; got c = {c}"),
        });
    }
    let profile_text = r.text("profile", "1 + x2^2");
    let profile = Expr::parse(&profile_text).map_err(|error| CatalogError::BadExpression {
        key: "profile".into(),
        error,
    })?;
    for v in profile.free_vars() {
        if v != "x2" {
            return Err(CatalogError::OutOfDomain {
                key: "profile".into(),
                detail: format!("profile may depend on x2 only, found '{v}'"),
            });
        }
    }
    let immersion = Immersion::new(
        vec!["x1".into(), "x2".into()],
        vec![
            profile.clone() * Expr::var("x1").cos(),
            profile * Expr::var("x1").sin(),
            Expr::constant(c),
        ],
        vec![(0.1, 2.0 * core::f64::consts::PI - 0.1), (-1.0, 1.0)],
    )?;
    // e^{2γ} = z^{2/(p−1)}, i.e. γ = ln(z)/(p−1).
    let gamma = subst_consts("ln(z)/(p-1)", &[("p", p)]);
    let ambient = AmbientSpace::conformal(3, None, gamma)?;
    let mut parameters = BTreeMap::new();
    parameters.insert("p".into(), p);
    parameters.insert("c".into(), c);
    Ok(NamedConfiguration {
        name: "revolution_disk_example2".into(),
        immersion,
        ambient,
        cfg: ProblemConfig::new(p, 2)?,
        parameters,
        expected: Expected {
            verdict: Verdict::ProperPBiharmonic,
            tolerance: 1e-9,
        },
    })
}

fn catenoid_builtin(overrides: &Params) -> Result<NamedConfiguration, CatalogError> {
    let r = ParamReader::new("catenoid", overrides, &["p", "a", "b"])?;
    let p = r.number("p", 3.0)?;
    let a = r.number("a", 1.0)?;
    let b = r.number("b", 0.0)?;
    if a == 0.0 {
        return Err(CatalogError::OutOfDomain {
            key: "a".into(),
            detail: "the neck radius must be nonzero".into(),
        });
    }
    // cosh growth is kept numerically tame by clipping the axial chart range.
    let span = 3.0 * a.abs();
    let immersion = Immersion::new(
        vec!["x1".into(), "x2".into()],
        vec![
            subst_consts("a*cosh(x2/a + b)*cos(x1)", &[("a", a), ("b", b)]),
            subst_consts("a*cosh(x2/a + b)*sin(x1)", &[("a", a), ("b", b)]),
            Expr::var("x2"),
        ],
        vec![(0.0, 2.0 * core::f64::consts::PI), (-span, span)],
    )?;
    let mut parameters = BTreeMap::new();
    parameters.insert("p".into(), p);
    parameters.insert("a".into(), a);
    parameters.insert("b".into(), b);
    Ok(NamedConfiguration {
        name: "catenoid".into(),
        immersion,
        ambient: AmbientSpace::euclidean(3),
        cfg: ProblemConfig::new(p, 2)?,
        parameters,
        expected: Expected {
            verdict: Verdict::PHarmonic,
            tolerance: RESIDUAL_TOL,
        },
    })
}

fn sphere_builtin(overrides: &Params) -> Result<NamedConfiguration, CatalogError> {
    let r = ParamReader::new("sphere", overrides, &["p", "radius"])?;
    let p = r.number("p", 2.0)?;
    let radius = r.number("radius", 1.0)?;
    if radius <= 0.0 {
        return Err(CatalogError::OutOfDomain {
            key: "radius".into(),
            detail: "radius must be positive".into(),
        });
    }
    let immersion = Immersion::new(
        vec!["theta".into(), "phi".into()],
        vec![
            subst_consts("r*sin(theta)*cos(phi)", &[("r", radius)]),
            subst_consts("r*sin(theta)*sin(phi)", &[("r", radius)]),
            subst_consts("r*cos(theta)", &[("r", radius)]),
        ],
        vec![(0.0, core::f64::consts::PI), (0.0, 2.0 * core::f64::consts::PI)],
    )?;
    let mut parameters = BTreeMap::new();
    parameters.insert("p".into(), p);
    parameters.insert("radius".into(), radius);
    Ok(NamedConfiguration {
        name: "sphere".into(),
        immersion,
        ambient: AmbientSpace::euclidean(3),
        cfg: ProblemConfig::new(p, 2)?,
        parameters,
        expected: Expected {
            verdict: Verdict::Neither,
            tolerance: RESIDUAL_TOL,
        },
    })
}

fn flat_plane_builtin(overrides: &Params) -> Result<NamedConfiguration, CatalogError> {
    let r = ParamReader::new("flat_plane", overrides, &["p"])?;
    let p = r.number("p", 2.0)?;
    let immersion = Immersion::new(
        vec!["x1".into(), "x2".into()],
        vec![Expr::var("x1"), Expr::var("x2"), Expr::zero()],
        vec![(-1.0, 1.0), (-1.0, 1.0)],
    )?;
    let mut parameters = BTreeMap::new();
    parameters.insert("p".into(), p);
    Ok(NamedConfiguration {
        name: "flat_plane".into(),
        immersion,
        ambient: AmbientSpace::euclidean(3),
        cfg: ProblemConfig::new(p, 2)?,
        parameters,
        expected: Expected {
            verdict: Verdict::PHarmonic,
            tolerance: RESIDUAL_TOL,
        },
    })
}

/// The round 3-sphere metric in stereographic coordinates:
/// `γ = ln(2/(1+|x|²))`, validated Einstein with scalar curvature 6.
pub fn stereographic_s3_ambient(seed: u64) -> Result<AmbientSpace, GeometryError> {
    AmbientSpace::einstein(
        3,
        None,
        Expr::parse("ln(2/(1 + x^2 + y^2 + z^2))").expect("template parses"),
        6.0,
        &[(-2.0, 2.0), (-2.0, 2.0), (-2.0, 2.0)],
        EINSTEIN_SAMPLES,
        EINSTEIN_TOL,
        seed,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_names_resolve_and_defaults_bind() {
        for name in BUILTIN_NAMES {
            let cfg = builtin(name, &Params::new()).unwrap();
            assert_eq!(cfg.name, name);
            assert!(cfg.parameters.contains_key("p"));
        }
        assert!(matches!(
            builtin("torus", &Params::new()),
            Err(CatalogError::UnknownName(_))
        ));
    }

    #[test]
    fn overrides_are_validated() {
        let mut params = Params::new();
        params.insert("c".into(), ParamValue::Number(-1.0));
        assert!(matches!(
            builtin("revolution_disk_example2", &params),
            Err(CatalogError::OutOfDomain { .. })
        ));

        let mut params = Params::new();
        params.insert("nope".into(), ParamValue::Number(1.0));
        assert!(matches!(
            builtin("sphere", &params),
            Err(CatalogError::UnknownParameter { .. })
        ));

        let mut params = Params::new();
        params.insert("a".into(), ParamValue::Number(0.0));
        assert!(matches!(
            builtin("catenoid", &params),
            Err(CatalogError::OutOfDomain { .. })
        ));

        let mut params = Params::new();
        params.insert("c1".into(), ParamValue::Number(-10.0));
        params.insert("c".into(), ParamValue::Number(1.0));
        assert!(matches!(
            builtin("hyperplane_example1", &params),
            Err(CatalogError::OutOfDomain { .. })
        ));
    }

    #[test]
    fn example1_overrides_bind_into_gamma() {
        let mut params = Params::new();
        params.insert("p".into(), ParamValue::Number(3.0));
        params.insert("c1".into(), ParamValue::Number(1.0));
        params.insert("c2".into(), ParamValue::Number(1.0));
        params.insert("c".into(), ParamValue::Number(0.0));
        let cfg = builtin("hyperplane_example1", &params).unwrap();
        assert_eq!(cfg.expected.verdict, Verdict::ProperPBiharmonic);
        // γ(0) = ln(2)/2 for these parameters.
        let mut b = crate::expr::Bindings::new();
        b.set("x", 0.0);
        b.set("y", 0.0);
        b.set("z", 0.0);
        let v = cfg.ambient.gamma().evaluate(&b).unwrap();
        assert!((v - 0.5 * 2.0f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn stereographic_ambient_validates() {
        let amb = stereographic_s3_ambient(9).unwrap();
        assert!(matches!(
            amb.class(),
            crate::geometry::AmbientClass::DeclaredEinstein { scalar_curvature } if scalar_curvature == 6.0
        ));
    }
}
