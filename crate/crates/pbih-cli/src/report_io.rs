//! Report emission. CSV and JSON are written from the same in-memory records
//! through the same real-number formatter, so both carry identical numeric
//! content. Reals print with 17 significant digits, enough to reproduce the
//! exact f64 bit pattern on re-parse.

use std::fmt::Write as _;

use pbih_core::report::{PointRecord, ResidualReport, SkippedPoint};
use pbih_core::search::{SearchResult, SearchVerdict};

/// 17 significant digits in scientific notation; round-trips every f64.
pub fn format_real(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        // Reports never contain non-finite values; guard for robustness.
        format!("\"{v}\"")
    }
}

fn json_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 8);
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out
}

pub struct CheckReport<'a> {
    pub mode: &'a str,
    pub config_echo: &'a str,
    pub p: f64,
    pub m: usize,
    pub seed: u64,
    pub workers: usize,
    pub surface: &'a str,
    pub chart_vars: &'a [String],
    pub grid_counts: &'a [usize],
    pub report: &'a ResidualReport,
    pub expect: Option<&'a str>,
    pub expect_matched: Option<bool>,
}

fn record_json(rec: &PointRecord) -> String {
    let u: Vec<String> = rec.u.iter().map(|v| format_real(*v)).collect();
    let mut s = format!(
        "{{\"u\": [{}], \"f\": {}, \"A_norm_sq\": {}, \"res_normal\": {}, \"res_tangential_norm\": {}, \"p_tension\": {}",
        u.join(", "),
        format_real(rec.f),
        format_real(rec.a_norm_sq),
        format_real(rec.res_normal),
        format_real(rec.res_tangential_norm),
        format_real(rec.p_tension_norm),
    );
    if let Some(gap) = rec.closed_form_gap {
        let _ = write!(s, ", \"closed_form_gap\": {}", format_real(gap));
    }
    s.push('}');
    s
}

fn skipped_json(sk: &SkippedPoint) -> String {
    let u: Vec<String> = sk.u.iter().map(|v| format_real(*v)).collect();
    format!(
        "{{\"u\": [{}], \"reason\": \"{}\"}}",
        u.join(", "),
        json_escape(&sk.reason)
    )
}

pub fn check_json(r: &CheckReport<'_>) -> String {
    let mut out = String::new();
    out.push_str("{\n");
    let _ = writeln!(out, "  \"tool\": \"pbih\",");
    let _ = writeln!(out, "  \"version\": \"{}\",", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(out, "  \"mode\": \"{}\",", r.mode);
    let _ = writeln!(out, "  \"surface\": \"{}\",", json_escape(r.surface));
    let _ = writeln!(out, "  \"route\": \"{}\",", r.report.route.label());
    let _ = writeln!(out, "  \"p\": {},", format_real(r.p));
    let _ = writeln!(out, "  \"m\": {},", r.m);
    let _ = writeln!(out, "  \"tolerance\": {},", format_real(r.report.tolerance));
    let _ = writeln!(out, "  \"seed\": {},", r.seed);
    let _ = writeln!(out, "  \"workers\": {},", r.workers);
    let counts: Vec<String> = r.grid_counts.iter().map(|c| c.to_string()).collect();
    let _ = writeln!(out, "  \"grid_counts\": [{}],", counts.join(", "));
    if let Some(expect) = r.expect {
        let _ = writeln!(out, "  \"expect\": \"{expect}\",");
        let _ = writeln!(
            out,
            "  \"expect_matched\": {},",
            r.expect_matched.unwrap_or(false)
        );
    }
    let s = &r.report.summary;
    let _ = writeln!(out, "  \"summary\": {{");
    let _ = writeln!(out, "    \"verdict\": \"{}\",", s.verdict.label());
    let _ = writeln!(out, "    \"max_normal\": {},", format_real(s.max_normal));
    let _ = writeln!(out, "    \"max_tangential\": {},", format_real(s.max_tangential));
    let _ = writeln!(out, "    \"mean_normal\": {},", format_real(s.mean_normal));
    let _ = writeln!(out, "    \"mean_tangential\": {},", format_real(s.mean_tangential));
    let _ = writeln!(out, "    \"max_p_tension\": {},", format_real(s.max_p_tension));
    let _ = writeln!(out, "    \"max_abs_f\": {},", format_real(s.max_abs_f));
    let _ = writeln!(out, "    \"evaluated_points\": {},", s.evaluated_points);
    let _ = writeln!(out, "    \"skipped_points\": {},", s.skipped_points);
    if let Some(gap) = s.max_closed_form_gap {
        let _ = writeln!(out, "    \"max_closed_form_gap\": {},", format_real(gap));
        let _ = writeln!(out, "    \"closed_form_flagged\": {},", s.closed_form_flagged);
    }
    let _ = writeln!(out, "    \"interpretation\": \"grid maxima; a pass certifies the property at the sampled points only\"");
    let _ = writeln!(out, "  }},");
    let _ = writeln!(out, "  \"degenerate_points\": [");
    for (i, sk) in r.report.skipped.iter().enumerate() {
        let comma = if i + 1 < r.report.skipped.len() { "," } else { "" };
        let _ = writeln!(out, "    {}{comma}", skipped_json(sk));
    }
    let _ = writeln!(out, "  ],");
    let _ = writeln!(out, "  \"records\": [");
    for (i, rec) in r.report.records.iter().enumerate() {
        let comma = if i + 1 < r.report.records.len() { "," } else { "" };
        let _ = writeln!(out, "    {}{comma}", record_json(rec));
    }
    let _ = writeln!(out, "  ],");
    let _ = writeln!(out, "  \"config_echo\": \"{}\"", json_escape(r.config_echo));
    out.push_str("}\n");
    out
}

pub fn check_csv(r: &CheckReport<'_>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# pbih {} report (version {})", r.mode, env!("CARGO_PKG_VERSION"));
    let _ = writeln!(out, "# surface: {}; route: {}", r.surface, r.report.route.label());
    let _ = writeln!(
        out,
        "# verdict: {}; max_normal: {}; max_tangential: {}; max_p_tension: {}",
        r.report.summary.verdict.label(),
        format_real(r.report.summary.max_normal),
        format_real(r.report.summary.max_tangential),
        format_real(r.report.summary.max_p_tension),
    );
    for sk in &r.report.skipped {
        let u: Vec<String> = sk.u.iter().map(|v| format_real(*v)).collect();
        let _ = writeln!(out, "# degenerate: u = {} ({})", u.join(" "), sk.reason);
    }
    for line in r.config_echo.lines() {
        let _ = writeln!(out, "#cfg {line}");
    }
    let vars: Vec<String> = r
        .chart_vars
        .iter()
        .enumerate()
        .map(|(i, _)| format!("u{}", i + 1))
        .collect();
    let _ = writeln!(out, "{},f,A_norm_sq,res_normal,res_tangential_norm", vars.join(","));
    for rec in &r.report.records {
        let u: Vec<String> = rec.u.iter().map(|v| format_real(*v)).collect();
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            u.join(","),
            format_real(rec.f),
            format_real(rec.a_norm_sq),
            format_real(rec.res_normal),
            format_real(rec.res_tangential_norm),
        );
    }
    out
}

pub struct ConvergenceReport<'a> {
    pub config_echo: &'a str,
    pub surface: &'a str,
    pub runs: Vec<(Vec<usize>, &'a ResidualReport)>,
}

pub fn convergence_json(r: &ConvergenceReport<'_>) -> String {
    let mut out = String::new();
    out.push_str("{\n");
    let _ = writeln!(out, "  \"tool\": \"pbih\",");
    let _ = writeln!(out, "  \"mode\": \"convergence\",");
    let _ = writeln!(out, "  \"surface\": \"{}\",", json_escape(r.surface));
    let _ = writeln!(out, "  \"runs\": [");
    for (i, (counts, rep)) in r.runs.iter().enumerate() {
        let comma = if i + 1 < r.runs.len() { "," } else { "" };
        let counts_s: Vec<String> = counts.iter().map(|c| c.to_string()).collect();
        let s = &rep.summary;
        let _ = writeln!(
            out,
            "    {{\"grid_counts\": [{}], \"verdict\": \"{}\", \"max_normal\": {}, \"max_tangential\": {}, \"max_p_tension\": {}}}{comma}",
            counts_s.join(", "),
            s.verdict.label(),
            format_real(s.max_normal),
            format_real(s.max_tangential),
            format_real(s.max_p_tension),
        );
    }
    let _ = writeln!(out, "  ],");
    let _ = writeln!(out, "  \"config_echo\": \"{}\"", json_escape(r.config_echo));
    out.push_str("}\n");
    out
}

pub fn convergence_csv(r: &ConvergenceReport<'_>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# pbih convergence report; surface: {}", r.surface);
    let _ = writeln!(out, "grid,verdict,max_normal,max_tangential,max_p_tension");
    for (counts, rep) in &r.runs {
        let label: Vec<String> = counts.iter().map(|c| c.to_string()).collect();
        let s = &rep.summary;
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            label.join("x"),
            s.verdict.label(),
            format_real(s.max_normal),
            format_real(s.max_tangential),
            format_real(s.max_p_tension),
        );
    }
    out
}

pub struct SearchReport<'a> {
    pub config_echo: &'a str,
    pub surface: &'a str,
    pub result: &'a SearchResult,
    pub p_range: (f64, f64),
    pub objective_tol: f64,
}

pub fn search_json(r: &SearchReport<'_>) -> String {
    let mut out = String::new();
    out.push_str("{\n");
    let _ = writeln!(out, "  \"tool\": \"pbih\",");
    let _ = writeln!(out, "  \"mode\": \"search\",");
    let _ = writeln!(out, "  \"surface\": \"{}\",", json_escape(r.surface));
    let _ = writeln!(out, "  \"family\": \"{}\",", json_escape(&r.result.provenance));
    let _ = writeln!(
        out,
        "  \"p_range\": [{}, {}],",
        format_real(r.p_range.0),
        format_real(r.p_range.1)
    );
    let _ = writeln!(out, "  \"objective_tol\": {},", format_real(r.objective_tol));
    let verdict = match &r.result.verdict {
        SearchVerdict::CandidateFound { .. } => "candidate_found",
        SearchVerdict::NoCandidate { .. } => "no_candidate",
    };
    let _ = writeln!(out, "  \"verdict\": \"{verdict}\",");
    let _ = writeln!(out, "  \"best_objective\": {},", format_real(r.result.objective));
    let _ = writeln!(out, "  \"best_p\": {},", format_real(r.result.best_p));
    let _ = writeln!(out, "  \"best_params\": {{");
    for (i, (name, v)) in r.result.best_params.iter().enumerate() {
        let comma = if i + 1 < r.result.best_params.len() { "," } else { "" };
        let _ = writeln!(out, "    \"{}\": {}{comma}", json_escape(name), format_real(*v));
    }
    let _ = writeln!(out, "  }},");
    let _ = writeln!(out, "  \"evaluations\": {},", r.result.evaluations);
    let bests: Vec<String> = r.result.restart_bests.iter().map(|v| format_real(*v)).collect();
    let _ = writeln!(out, "  \"restart_bests\": [{}],", bests.join(", "));
    let _ = writeln!(out, "  \"history\": [");
    for (i, h) in r.result.history.iter().enumerate() {
        let comma = if i + 1 < r.result.history.len() { "," } else { "" };
        let _ = writeln!(
            out,
            "    {{\"iteration\": {}, \"best_objective\": {}}}{comma}",
            h.iteration,
            format_real(h.best_objective)
        );
    }
    let _ = writeln!(out, "  ],");
    let _ = writeln!(
        out,
        "  \"interpretation\": \"a floor is the best objective reached by this search; it is evidence of nothing beyond itself and in particular not of nonexistence\","
    );
    let _ = writeln!(out, "  \"config_echo\": \"{}\"", json_escape(r.config_echo));
    out.push_str("}\n");
    out
}

pub fn search_csv(r: &SearchReport<'_>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# pbih search report; surface: {}; family: {}", r.surface, r.result.provenance);
    let _ = writeln!(
        out,
        "# best_objective: {}; best_p: {}",
        format_real(r.result.objective),
        format_real(r.result.best_p)
    );
    let _ = writeln!(out, "iteration,best_objective");
    for h in &r.result.history {
        let _ = writeln!(out, "{},{}", h.iteration, format_real(h.best_objective));
    }
    out
}
