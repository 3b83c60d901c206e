//! Run configuration: a flat sectioned key-value text format.
//!
//! ```text
//! # comments start with '#'
//! mode = check
//! p = 3
//! tolerance = 1e-8
//! expect = proper_p_biharmonic
//!
//! [surface]
//! builtin = hyperplane_example1
//! c = 0                      # builtin parameter overrides
//!
//! [ambient]                  # or inherited from the builtin when absent
//! gamma = "ln(z)/2"
//!
//! [grid]
//! x1 = -1 1 16               # min max count, keyed by chart variable
//! margin = 0.001
//!
//! [output]
//! path = report.json
//! format = json
//! ```
//!
//! Values may be double-quoted; expressions must be when they contain
//! spaces. Keys `component`, `domain`, and `bound` may repeat. Errors carry
//! the offending line number.

use std::collections::BTreeMap;
use std::fmt;

use pbih_core::catalog::{self, ParamValue, Params, Verdict};
use pbih_core::expr::Expr;
use pbih_core::geometry::{default_coords, AmbientSpace, Immersion, Orientation};
use pbih_core::grid::{Grid, GridAxis, DEFAULT_MARGIN};
use pbih_core::residuals::{ProblemConfig, RESIDUAL_TOL};
use pbih_core::search::{GammaFamily, SearchOptions};

#[derive(Clone, Debug)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl ConfigError {
    fn at(line: usize, message: impl Into<String>) -> Self {
        Self {
            line: Some(line),
            message: message.into(),
        }
    }

    fn general(message: impl Into<String>) -> Self {
        Self {
            line: None,
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "config error at line {line}: {}", self.message),
            None => write!(f, "config error: {}", self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Check,
    Verify,
    Search,
    Convergence,
}

impl Mode {
    pub fn label(self) -> &'static str {
        match self {
            Mode::Check => "check",
            Mode::Verify => "verify",
            Mode::Search => "search",
            Mode::Convergence => "convergence",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Clone, Debug)]
pub struct SearchSpec {
    pub family: GammaFamily,
    pub p_range: (f64, f64),
    pub options: SearchOptions,
}

/// Fully resolved run configuration.
pub struct RunConfig {
    pub mode: Option<Mode>,
    pub p: f64,
    pub tolerance: f64,
    pub orientation: Orientation,
    pub seed: u64,
    pub workers: Option<usize>,
    pub expect: Option<Verdict>,
    pub surface_name: String,
    pub immersion: Immersion,
    pub ambient: AmbientSpace,
    pub problem: ProblemConfig,
    pub grid: Grid,
    pub output_path: Option<String>,
    pub output_format: OutputFormat,
    pub search: Option<SearchSpec>,
    /// Raw config text, echoed into reports so a run is reproducible from
    /// its own output.
    pub echo: String,
}

struct Entry {
    key: String,
    value: String,
    line: usize,
}

struct Sections {
    by_name: BTreeMap<String, Vec<Entry>>,
    section_lines: BTreeMap<String, usize>,
}

fn parse_sections(text: &str) -> Result<Sections, ConfigError> {
    let mut by_name: BTreeMap<String, Vec<Entry>> = BTreeMap::new();
    let mut section_lines = BTreeMap::new();
    let mut current = String::new();
    by_name.insert(String::new(), Vec::new());
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let Some(name) = rest.strip_suffix(']') else {
                return Err(ConfigError::at(line_no, "unterminated section header"));
            };
            let name = name.trim().to_string();
            if name.is_empty() {
                return Err(ConfigError::at(line_no, "empty section name"));
            }
            section_lines.entry(name.clone()).or_insert(line_no);
            by_name.entry(name.clone()).or_default();
            current = name;
            continue;
        }
        let Some(eq) = line.find('=') else {
            return Err(ConfigError::at(
                line_no,
                format!("expected 'key = value', got '{line}'"),
            ));
        };
        let key = line[..eq].trim().to_string();
        if key.is_empty() {
            return Err(ConfigError::at(line_no, "empty key"));
        }
        let mut value = line[eq + 1..].trim();
        // Strip a trailing comment outside quotes.
        if !value.starts_with('"') {
            if let Some(hash) = value.find('#') {
                value = value[..hash].trim();
            }
        }
        let value = if value.len() >= 2 && value.starts_with('"') && value.ends_with('"') {
            value[1..value.len() - 1].to_string()
        } else {
            value.to_string()
        };
        by_name.get_mut(&current).unwrap().push(Entry {
            key,
            value,
            line: line_no,
        });
    }
    Ok(Sections {
        by_name,
        section_lines,
    })
}

struct SectionView<'a> {
    name: &'static str,
    entries: &'a [Entry],
}

impl<'a> SectionView<'a> {
    fn get(&self, key: &str) -> Option<&'a Entry> {
        self.entries.iter().find(|e| e.key == key)
    }

    fn get_all(&self, key: &str) -> impl Iterator<Item = &'a Entry> + '_ {
        let key = key.to_string();
        self.entries.iter().filter(move |e| e.key == key)
    }

    fn number(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        match self.get(key) {
            None => Ok(None),
            Some(e) => e
                .value
                .parse::<f64>()
                .map(Some)
                .map_err(|_| ConfigError::at(e.line, format!("'{key}' expects a number, got '{}'", e.value))),
        }
    }

    fn integer(&self, key: &str) -> Result<Option<u64>, ConfigError> {
        match self.get(key) {
            None => Ok(None),
            Some(e) => e
                .value
                .parse::<u64>()
                .map(Some)
                .map_err(|_| ConfigError::at(e.line, format!("'{key}' expects an integer, got '{}'", e.value))),
        }
    }

    fn require_known(&self, known: &[&str]) -> Result<(), ConfigError> {
        for e in self.entries {
            if !known.contains(&e.key.as_str()) {
                return Err(ConfigError::at(
                    e.line,
                    format!(
                        "unknown key '{}' in [{}]; known keys: {}",
                        e.key,
                        if self.name.is_empty() { "top level" } else { self.name },
                        known.join(", ")
                    ),
                ));
            }
        }
        Ok(())
    }
}

fn parse_expr_value(e: &Entry) -> Result<Expr, ConfigError> {
    Expr::parse(&e.value)
        .map_err(|err| ConfigError::at(e.line, format!("'{}': {err}", e.key)))
}

fn split_words(value: &str) -> Vec<&str> {
    value
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|w| !w.is_empty())
        .collect()
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<RunConfig, ConfigError> {
        let sections = parse_sections(text)?;
        let view = |name: &'static str| -> Option<SectionView<'_>> {
            sections
                .by_name
                .get(name)
                .map(|entries| SectionView { name, entries })
        };
        for name in sections.by_name.keys() {
            if !["", "surface", "ambient", "grid", "output", "search"].contains(&name.as_str()) {
                return Err(ConfigError::at(
                    *sections.section_lines.get(name).unwrap_or(&0),
                    format!("unknown section [{name}]"),
                ));
            }
        }

        let root = view("").unwrap();
        root.require_known(&[
            "mode",
            "p",
            "tolerance",
            "orientation",
            "seed",
            "workers",
            "expect",
        ])?;

        let mode = match root.get("mode") {
            None => None,
            Some(e) => Some(match e.value.as_str() {
                "check" => Mode::Check,
                "verify" => Mode::Verify,
                "search" => Mode::Search,
                "convergence" => Mode::Convergence,
                other => {
                    return Err(ConfigError::at(
                        e.line,
                        format!("unknown mode '{other}' (check | verify | search | convergence)"),
                    ))
                }
            }),
        };

        let tolerance = root.number("tolerance")?.unwrap_or(RESIDUAL_TOL);
        if !(tolerance > 0.0) {
            let line = root.get("tolerance").map(|e| e.line).unwrap_or(0);
            return Err(ConfigError::at(line, "tolerance must be positive"));
        }
        let orientation = match root.get("orientation") {
            None => Orientation::Plus,
            Some(e) => match e.value.as_str() {
                "plus" => Orientation::Plus,
                "minus" => Orientation::Minus,
                other => {
                    return Err(ConfigError::at(
                        e.line,
                        format!("orientation must be plus or minus, got '{other}'"),
                    ))
                }
            },
        };
        let seed = root.integer("seed")?.unwrap_or(0x5EED);
        let workers = root.integer("workers")?.map(|w| w as usize);
        let expect = match root.get("expect") {
            None => None,
            Some(e) => Some(Verdict::parse(&e.value).ok_or_else(|| {
                ConfigError::at(
                    e.line,
                    format!(
                        "expect must be p_harmonic, proper_p_biharmonic, or neither; got '{}'",
                        e.value
                    ),
                )
            })?),
        };
        let p_top = root.number("p")?;

        // Surface.
        let surface = view("surface")
            .filter(|s| !s.entries.is_empty())
            .ok_or_else(|| ConfigError::general("missing [surface] section"))?;
        let (surface_name, immersion, builtin_ambient, p, parameters) =
            resolve_surface(&surface, p_top)?;

        // Ambient: explicit section wins over the builtin's ambient.
        let ambient = match view("ambient").filter(|s| !s.entries.is_empty()) {
            None => builtin_ambient.unwrap_or_else(|| AmbientSpace::euclidean(3)),
            Some(s) => resolve_ambient(&s, seed)?,
        };

        let problem = ProblemConfig::new(p, immersion.m())
            .map_err(|e| ConfigError::general(e.to_string()))?
            .with_orientation(orientation);

        // Grid.
        let grid = resolve_grid(view("grid"), &immersion)?;

        // Output.
        let (output_path, output_format) = match view("output").filter(|s| !s.entries.is_empty()) {
            None => (None, OutputFormat::Json),
            Some(s) => {
                s.require_known(&["path", "format"])?;
                let path = s.get("path").map(|e| e.value.clone());
                let format = match s.get("format") {
                    None => OutputFormat::Json,
                    Some(e) => match e.value.as_str() {
                        "json" => OutputFormat::Json,
                        "csv" => OutputFormat::Csv,
                        other => {
                            return Err(ConfigError::at(
                                e.line,
                                format!("format must be csv or json, got '{other}'"),
                            ))
                        }
                    },
                };
                (path, format)
            }
        };

        // Search.
        let search = match view("search").filter(|s| !s.entries.is_empty()) {
            None => None,
            Some(s) => Some(resolve_search(&s)?),
        };

        let _ = parameters;
        Ok(RunConfig {
            mode,
            p,
            tolerance,
            orientation,
            seed,
            workers,
            expect,
            surface_name,
            immersion,
            ambient,
            problem,
            grid,
            output_path,
            output_format,
            search,
            echo: text.to_string(),
        })
    }
}

type SurfaceResolution = (
    String,
    Immersion,
    Option<AmbientSpace>,
    f64,
    BTreeMap<String, f64>,
);

fn resolve_surface(
    surface: &SectionView<'_>,
    p_top: Option<f64>,
) -> Result<SurfaceResolution, ConfigError> {
    if let Some(b) = surface.get("builtin") {
        let mut overrides = Params::new();
        for e in surface.entries {
            if e.key == "builtin" {
                continue;
            }
            let value = match e.value.parse::<f64>() {
                Ok(v) => ParamValue::Number(v),
                Err(_) => ParamValue::Text(e.value.clone()),
            };
            overrides.insert(e.key.clone(), value);
        }
        if let Some(p) = p_top {
            overrides.insert("p".into(), ParamValue::Number(p));
        }
        let named = catalog::builtin(&b.value, &overrides)
            .map_err(|e| ConfigError::at(b.line, e.to_string()))?;
        let p = named.parameters.get("p").copied().unwrap_or(2.0);
        return Ok((
            named.name,
            named.immersion,
            Some(named.ambient),
            p,
            named.parameters,
        ));
    }

    // Inline immersion.
    surface.require_known(&["vars", "component", "domain"])?;
    let vars_entry = surface
        .get("vars")
        .ok_or_else(|| ConfigError::general("[surface] needs either builtin = ... or vars/component/domain"))?;
    let vars: Vec<String> = split_words(&vars_entry.value)
        .into_iter()
        .map(|s| s.to_string())
        .collect();
    let components: Vec<Expr> = surface
        .get_all("component")
        .map(parse_expr_value)
        .collect::<Result<_, _>>()?;
    let mut domain = vec![None; vars.len()];
    for e in surface.get_all("domain") {
        let words = split_words(&e.value);
        if words.len() != 3 {
            return Err(ConfigError::at(
                e.line,
                "domain expects 'var min max', e.g. domain = x1 -1 1",
            ));
        }
        let Some(idx) = vars.iter().position(|v| v == words[0]) else {
            return Err(ConfigError::at(
                e.line,
                format!("domain names unknown chart variable '{}'", words[0]),
            ));
        };
        let lo: f64 = words[1]
            .parse()
            .map_err(|_| ConfigError::at(e.line, format!("bad number '{}'", words[1])))?;
        let hi: f64 = words[2]
            .parse()
            .map_err(|_| ConfigError::at(e.line, format!("bad number '{}'", words[2])))?;
        domain[idx] = Some((lo, hi));
    }
    let domain: Vec<(f64, f64)> = domain
        .into_iter()
        .enumerate()
        .map(|(i, d)| {
            d.ok_or_else(|| {
                ConfigError::at(
                    vars_entry.line,
                    format!("missing domain for chart variable '{}'", vars[i]),
                )
            })
        })
        .collect::<Result<_, _>>()?;
    let immersion = Immersion::new(vars, components, domain)
        .map_err(|e| ConfigError::at(vars_entry.line, e.to_string()))?;
    let p = p_top.unwrap_or(2.0);
    Ok(("inline".into(), immersion, None, p, BTreeMap::new()))
}

fn resolve_ambient(s: &SectionView<'_>, seed: u64) -> Result<AmbientSpace, ConfigError> {
    s.require_known(&["builtin", "gamma", "coords", "einstein_s", "einstein_box"])?;
    if let Some(b) = s.get("builtin") {
        return match b.value.as_str() {
            "euclidean" => Ok(AmbientSpace::euclidean(3)),
            "stereographic_s3" => catalog::stereographic_s3_ambient(seed)
                .map_err(|e| ConfigError::at(b.line, e.to_string())),
            other => Err(ConfigError::at(
                b.line,
                format!("unknown ambient builtin '{other}' (euclidean | stereographic_s3)"),
            )),
        };
    }
    let Some(gamma_entry) = s.get("gamma") else {
        return Err(ConfigError::general(
            "[ambient] needs either builtin = ... or gamma = \"<expression>\"",
        ));
    };
    let gamma = parse_expr_value(gamma_entry)?;
    let coords: Option<Vec<String>> = s.get("coords").map(|e| {
        split_words(&e.value)
            .into_iter()
            .map(|w| w.to_string())
            .collect()
    });
    let dim = coords.as_ref().map(|c| c.len()).unwrap_or(3);
    match s.number("einstein_s")? {
        None => AmbientSpace::conformal(dim, coords, gamma)
            .map_err(|e| ConfigError::at(gamma_entry.line, e.to_string())),
        Some(scalar) => {
            let half_width = match s.get("einstein_box") {
                None => 2.0,
                Some(e) => e.value.parse::<f64>().map_err(|_| {
                    ConfigError::at(e.line, "einstein_box expects a half-width number")
                })?,
            };
            let sample_box = vec![(-half_width, half_width); dim];
            AmbientSpace::einstein(
                dim,
                coords,
                gamma,
                scalar,
                &sample_box,
                pbih_core::geometry::EINSTEIN_SAMPLES,
                pbih_core::geometry::EINSTEIN_TOL,
                seed,
            )
            .map_err(|e| ConfigError::at(gamma_entry.line, e.to_string()))
        }
    }
}

fn resolve_grid(s: Option<SectionView<'_>>, immersion: &Immersion) -> Result<Grid, ConfigError> {
    let mut counts: BTreeMap<String, (f64, f64, usize)> = BTreeMap::new();
    let mut margin = DEFAULT_MARGIN;
    if let Some(s) = &s {
        for e in s.entries {
            if e.key == "margin" {
                margin = e
                    .value
                    .parse()
                    .map_err(|_| ConfigError::at(e.line, "margin expects a number"))?;
                continue;
            }
            let Some(idx) = immersion.chart_vars().iter().position(|v| *v == e.key) else {
                return Err(ConfigError::at(
                    e.line,
                    format!(
                        "unknown grid key '{}'; chart variables are {}",
                        e.key,
                        immersion.chart_vars().join(", ")
                    ),
                ));
            };
            let words = split_words(&e.value);
            let (lo, hi, count) = match words.len() {
                1 => {
                    let count: usize = words[0]
                        .parse()
                        .map_err(|_| ConfigError::at(e.line, "grid count expects an integer"))?;
                    let (lo, hi) = immersion.domain()[idx];
                    (lo, hi, count)
                }
                3 => {
                    let lo: f64 = words[0]
                        .parse()
                        .map_err(|_| ConfigError::at(e.line, format!("bad number '{}'", words[0])))?;
                    let hi: f64 = words[1]
                        .parse()
                        .map_err(|_| ConfigError::at(e.line, format!("bad number '{}'", words[1])))?;
                    let count: usize = words[2]
                        .parse()
                        .map_err(|_| ConfigError::at(e.line, "grid count expects an integer"))?;
                    (lo, hi, count)
                }
                _ => {
                    return Err(ConfigError::at(
                        e.line,
                        "grid axis expects 'min max count' or just 'count'",
                    ))
                }
            };
            counts.insert(e.key.clone(), (lo, hi, count));
        }
    }
    let axes: Vec<GridAxis> = immersion
        .chart_vars()
        .iter()
        .enumerate()
        .map(|(i, name)| {
            let (lo, hi) = immersion.domain()[i];
            let (lo, hi, count) = counts.get(name).copied().unwrap_or((lo, hi, 8));
            GridAxis {
                name: name.clone(),
                min: lo,
                max: hi,
                count,
            }
        })
        .collect();
    let grid_line = s.and_then(|s| s.entries.first().map(|e| e.line));
    Grid::new(axes, margin).map_err(|e| ConfigError {
        line: grid_line,
        message: e.to_string(),
    })
}

fn resolve_search(s: &SectionView<'_>) -> Result<SearchSpec, ConfigError> {
    s.require_known(&[
        "family",
        "template",
        "params",
        "bound",
        "p_min",
        "p_max",
        "max_iters",
        "restarts",
        "simplex_scale",
        "objective_tol",
    ])?;
    let family = if let Some(e) = s.get("family") {
        GammaFamily::by_name(&e.value).ok_or_else(|| {
            ConfigError::at(
                e.line,
                format!(
                    "unknown family '{}'; built-ins: {}",
                    e.value,
                    GammaFamily::BUILTIN_FAMILY_NAMES.join(", ")
                ),
            )
        })?
    } else {
        let template_entry = s
            .get("template")
            .ok_or_else(|| ConfigError::general("[search] needs family = ... or template/params/bound"))?;
        let template = parse_expr_value(template_entry)?;
        let params_entry = s
            .get("params")
            .ok_or_else(|| ConfigError::at(template_entry.line, "template needs params = <names>"))?;
        let names: Vec<String> = split_words(&params_entry.value)
            .into_iter()
            .map(|w| w.to_string())
            .collect();
        let mut bounds = vec![None; names.len()];
        for e in s.get_all("bound") {
            let words = split_words(&e.value);
            if words.len() != 3 {
                return Err(ConfigError::at(e.line, "bound expects 'name lo hi'"));
            }
            let Some(idx) = names.iter().position(|n| n == words[0]) else {
                return Err(ConfigError::at(
                    e.line,
                    format!("bound names unknown parameter '{}'", words[0]),
                ));
            };
            let lo: f64 = words[1]
                .parse()
                .map_err(|_| ConfigError::at(e.line, format!("bad number '{}'", words[1])))?;
            let hi: f64 = words[2]
                .parse()
                .map_err(|_| ConfigError::at(e.line, format!("bad number '{}'", words[2])))?;
            bounds[idx] = Some((lo, hi));
        }
        let bounds: Vec<(f64, f64)> = bounds
            .into_iter()
            .enumerate()
            .map(|(i, b)| {
                b.ok_or_else(|| {
                    ConfigError::at(
                        params_entry.line,
                        format!("missing bound for parameter '{}'", names[i]),
                    )
                })
            })
            .collect::<Result<_, _>>()?;
        GammaFamily::new("inline", template, names, bounds)
            .map_err(|e| ConfigError::at(template_entry.line, e.to_string()))?
    };
    let p_min = s.number("p_min")?.unwrap_or(2.0);
    let p_max = s.number("p_max")?.unwrap_or(p_min);
    if p_min < 2.0 || p_max < p_min {
        return Err(ConfigError::general(format!(
            "search p-range [{p_min}, {p_max}] must satisfy 2 <= p_min <= p_max"
        )));
    }
    let defaults = SearchOptions::default();
    let options = SearchOptions {
        max_iters: s.integer("max_iters")?.map(|v| v as usize).unwrap_or(defaults.max_iters),
        restarts: s.integer("restarts")?.map(|v| v as usize).unwrap_or(defaults.restarts),
        simplex_scale: s.number("simplex_scale")?.unwrap_or(defaults.simplex_scale),
        seed: defaults.seed, // overwritten by the run seed
        objective_tol: s.number("objective_tol")?.unwrap_or(defaults.objective_tol),
    };
    Ok(SearchSpec {
        family,
        p_range: (p_min, p_max),
        options,
    })
}
