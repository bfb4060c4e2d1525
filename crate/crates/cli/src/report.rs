//! JSON report types and plain-text rendering.

use dgpfit::select::ComparisonReport;
use dgpfit::DescriptiveStats;
use serde::Serialize;

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Serialize)]
pub struct Parameter {
    pub name: String,
    pub estimate: f64,
    pub standard_error: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct BootstrapSummary {
    pub replicates: usize,
    pub successful: usize,
    pub failed: usize,
    pub seed: u64,
}

#[derive(Debug, Serialize)]
pub struct ModelFit {
    pub model: &'static str,
    pub parameter_count: u32,
    pub parameters: Vec<Parameter>,
    pub loglik: f64,
    pub aic: f64,
    pub bic: f64,
    pub converged: bool,
    pub iterations: usize,
    pub fit_seed: Option<u64>,
    pub initial_values: Option<Vec<Parameter>>,
    pub bootstrap: Option<BootstrapSummary>,
    pub diagnostics: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct ModelFailure {
    pub model: &'static str,
    pub error: String,
}

#[derive(Debug, Serialize)]
pub struct GroupReport {
    pub label: String,
    pub n: usize,
    /// Absent for `compare`, which reports scores only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fits: Option<Vec<ModelFit>>,
    pub failures: Vec<ModelFailure>,
    pub comparison: Option<ComparisonReport>,
}

#[derive(Debug, Serialize)]
pub struct FitEcho {
    pub annealing_iterations: usize,
    pub annealing_initial_temperature: f64,
    pub cooling_schedule: dgpfit::fit::CoolingSchedule,
    pub refine_locally: bool,
    pub mu_mode: dgpfit::MuMode,
    pub tolerance: f64,
}

#[derive(Debug, Serialize)]
pub struct ConfigEcho {
    pub model: &'static str,
    pub aggregate: bool,
    pub bootstrap_replicates: Option<usize>,
    pub bootstrap_failure_policy: dgpfit::FailurePolicy,
    pub seed: u64,
    pub fit: FitEcho,
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub schema_version: &'static str,
    pub tool_version: &'static str,
    pub command: &'static str,
    pub input_digest: String,
    pub config_echo: ConfigEcho,
    pub groups: Vec<GroupReport>,
    pub aggregate: Option<GroupReport>,
}

impl RunReport {
    pub fn has_failures(&self) -> bool {
        self.groups
            .iter()
            .chain(self.aggregate.as_ref())
            .any(|g| !g.failures.is_empty())
    }
}

#[derive(Debug, Serialize)]
pub struct GroupStats {
    pub label: String,
    pub stats: Option<DescriptiveStats>,
    pub error: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct DescribeReport {
    pub schema_version: &'static str,
    pub tool_version: &'static str,
    pub command: &'static str,
    pub input_digest: String,
    pub groups: Vec<GroupStats>,
}

/// Left-align the first column, right-align the rest.
fn render(rows: &[Vec<String>]) -> String {
    let width = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..width)
        .map(|c| {
            rows.iter()
                .filter_map(|r| r.get(c))
                .map(|s| s.chars().count())
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    for row in rows {
        let mut line = String::new();
        for (c, cell) in row.iter().enumerate() {
            if c == 0 {
                line.push_str(&format!("{cell:<w$}", w = widths[0]));
            } else {
                line.push_str(&format!("  {cell:>w$}", w = widths[c]));
            }
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

fn num(x: f64) -> String {
    format!("{x:.4}")
}

fn opt_num(x: Option<f64>) -> String {
    x.map_or_else(|| "-".to_string(), num)
}

pub fn describe_text(report: &DescribeReport) -> String {
    let mut rows = vec![["group", "n", "mean", "std.dev", "skewness", "ex.kurtosis", "min", "max"]
        .iter()
        .map(|s| s.to_string())
        .collect::<Vec<_>>()];
    for g in &report.groups {
        match (&g.stats, &g.error) {
            (Some(s), _) => rows.push(vec![
                g.label.clone(),
                s.n.to_string(),
                num(s.mean),
                num(s.std_dev),
                opt_num(s.skewness),
                opt_num(s.excess_kurtosis),
                s.min.to_string(),
                s.max.to_string(),
            ]),
            (None, err) => rows.push(vec![g.label.clone(), format!("error: {}", err.as_deref().unwrap_or("?"))]),
        }
    }
    render(&rows)
}

fn model_title(model: &str) -> &'static str {
    match model {
        "dgp" => "Discrete generalised Pareto",
        _ => "Negative binomial",
    }
}

fn columns(report: &RunReport) -> Vec<&GroupReport> {
    report.groups.iter().chain(report.aggregate.as_ref()).collect()
}

fn fit_of<'a>(g: &'a GroupReport, model: &str) -> Option<&'a ModelFit> {
    g.fits.as_ref().and_then(|fits| fits.iter().find(|f| f.model == model))
}

fn fit_grid(report: &RunReport, model: &'static str) -> String {
    let cols = columns(report);
    let Some(template) = cols.iter().find_map(|g| fit_of(g, model)) else {
        return format!("{}: no successful fits\n", model_title(model));
    };
    let mut rows = vec![std::iter::once(String::new())
        .chain(cols.iter().map(|g| g.label.clone()))
        .collect::<Vec<_>>()];
    for (i, p) in template.parameters.iter().enumerate() {
        let mut row = vec![p.name.clone()];
        for g in &cols {
            row.push(match fit_of(g, model) {
                Some(f) => {
                    let q = &f.parameters[i];
                    match q.standard_error {
                        Some(se) => format!("{} ({})", num(q.estimate), num(se)),
                        None => num(q.estimate),
                    }
                }
                None => "failed".to_string(),
            });
        }
        rows.push(row);
    }
    for (name, value) in [("log-lik", 0), ("AIC", 1), ("BIC", 2)] {
        let mut row = vec![name.to_string()];
        for g in &cols {
            row.push(fit_of(g, model).map_or_else(
                || "-".to_string(),
                |f| num([f.loglik, f.aic, f.bic][value]),
            ));
        }
        rows.push(row);
    }
    rows.push(
        std::iter::once("n".to_string())
            .chain(cols.iter().map(|g| g.n.to_string()))
            .collect(),
    );
    format!(
        "{} (d = {}; bootstrap standard errors in parentheses)\n{}",
        model_title(model),
        template.parameter_count,
        render(&rows)
    )
}

fn comparison_grid(report: &RunReport) -> String {
    let cols = columns(report);
    let mut rows = vec![std::iter::once(String::new())
        .chain(cols.iter().map(|g| g.label.clone()))
        .collect::<Vec<_>>()];
    for criterion in ["AIC", "BIC"] {
        for model in ["dgp", "nb"] {
            let mut row = vec![format!("{criterion} {model}")];
            for g in &cols {
                let score = g
                    .comparison
                    .as_ref()
                    .and_then(|c| c.scores.iter().find(|s| s.model_name == model));
                row.push(score.map_or_else(
                    || "-".to_string(),
                    |s| num(if criterion == "AIC" { s.aic } else { s.bic }),
                ));
            }
            rows.push(row);
        }
    }
    for (label, aic) in [("winner AIC", true), ("winner BIC", false)] {
        let mut row = vec![label.to_string()];
        for g in &cols {
            row.push(match &g.comparison {
                Some(c) => {
                    let (winner, tie) = if aic { (&c.winner_aic, c.tie_aic) } else { (&c.winner_bic, c.tie_bic) };
                    if tie {
                        format!("{winner} (tie)")
                    } else {
                        winner.clone()
                    }
                }
                None => "-".to_string(),
            });
        }
        rows.push(row);
    }
    format!("Model comparison (smaller is better)\n{}", render(&rows))
}

fn failure_lines(report: &RunReport) -> String {
    let mut out = String::new();
    for g in columns(report) {
        for f in &g.failures {
            out.push_str(&format!("{} {}: failed: {}\n", g.label, f.model, f.error));
        }
    }
    out
}

pub fn fit_text(report: &RunReport, models: &[&'static str], scores_only: bool) -> String {
    let mut sections = Vec::new();
    if !scores_only {
        for &m in models {
            sections.push(fit_grid(report, m));
        }
    }
    if models.len() > 1 {
        sections.push(comparison_grid(report));
    }
    let failures = failure_lines(report);
    if !failures.is_empty() {
        sections.push(failures);
    }
    sections.join("\n")
}
